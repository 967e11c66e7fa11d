"""Command line entry point: ``ovpframe <command> ...``."""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .. import duality as du
from .. import perturb as pt
from .. import transforms as tr
from ..config import default_config
from ..errors import GuaranteeViolated, HypothesisNotCertified, OVPFrameError
from ..frames import canonical_dual, classify, frame_bounds
from . import io
from .generate import KINDS, GenerationError, GenSpec, generate
from .verify import INJECTIONS, THEOREMS, verify_all


def _exp(text):
    return math.inf if text.lower() in ("inf", "infinity") else float(text)


def _dims(text):
    try:
        d, e = (int(t) for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected d,e") from exc
    return d, e


def _emit(obj, path):
    text = io.dumps(obj)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _one_frame(path):
    out = io.load_frames(path)
    if isinstance(out, list):
        raise OVPFrameError(f"{path} holds {len(out)} frames; pass a single frame")
    return out


def cmd_gen(args, cfg):
    d, e = args.dims
    spec = GenSpec(seed=args.seed, p=args.p, d=d, e=e, N=args.N, kind=args.kind, rX=args.rX, rY=args.rY)
    out = generate(spec)
    doc = {"frames": [io.frame_to_dict(f) for f in out]} if isinstance(out, tuple) else io.frame_to_dict(out)
    _emit(doc, args.output)
    return 0


def cmd_check(args, cfg):
    f = _one_frame(args.frame)
    cls = classify(f, cfg=cfg)
    _emit({"class": cls.as_dict(), "strongest": cls.strongest.value, "bounds": frame_bounds(f, cfg).as_dict()}, args.output)
    return 0


def cmd_dual(args, cfg):
    f = _one_frame(args.frame)
    if args.params:
        doc = io.parse_json(open(args.params, encoding="utf-8").read())
        try:
            U, V = np.array(doc["U"], dtype=float), np.array(doc["V"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise OVPFrameError(f"{args.params}: expected numeric matrices 'U' and 'V'") from exc
        g = du.dual_from_params(f, U, V, cfg)
    else:
        g = canonical_dual(f, cfg)
    cert = du.is_dual(f, g, cfg=cfg)
    _emit({"dual": io.frame_to_dict(g), "certificate": cert.as_dict()}, args.output)
    return 0 if cert.verdict else 1


def cmd_dilate(args, cfg):
    f = _one_frame(args.frame)
    _emit(io.dilation_to_dict(tr.dilate(f, cfg)), args.output)
    return 0


def cmd_perturb(args, cfg):
    f = _one_frame(args.frame)
    g = _one_frame(args.perturbed)
    if not f.same_shape(g):
        raise OVPFrameError("the two frames differ in shape")
    try:
        if args.synthesis:
            cert, _ = pt.perturb_synthesis(f, g.Psi, cfg=cfg)
        else:
            cert, _ = pt.perturb_pair(f, g.A, g.Psi, variant=args.variant, cfg=cfg)
    except HypothesisNotCertified as exc:
        _emit({"hypothesis_ok": False, "reason": str(exc), "refuted": exc.refuted, "details": exc.report or {}}, args.output)
        return 0
    except GuaranteeViolated as exc:
        print(f"guarantee violated: {exc}", file=sys.stderr)
        return 1
    _emit(cert.as_dict(), args.output)
    return 0


def cmd_verify_all(args, cfg):
    report = verify_all(args.only, args.instances, args.seed, args.inject or (), cfg)
    for line in report.summary_lines():
        print(line)
    print(f"total failures: {report.failures}")
    if args.json:
        io.dump(report.as_dict(args.timings), args.json)
    return 0 if report.failures == 0 else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="ovpframe", description="Operator-valued p-approximate Schauder frames.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--kind", choices=KINDS, default="generic")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--p", type=float, default=2.0)
    g.add_argument("--dims", type=_dims, default=(3, 2), help="d,e")
    g.add_argument("--N", type=int, default=4)
    g.add_argument("--rX", type=_exp, default=2.0)
    g.add_argument("--rY", type=_exp, default=2.0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="classify a frame and bound it")
    c.add_argument("frame")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("dual", help="canonical dual, or the dual with parameters U, V")
    d.add_argument("frame")
    d.add_argument("--params", help="JSON file with matrices U and V")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_dual)

    dl = sub.add_parser("dilate", help="dilate a frame to a Riesz basis")
    dl.add_argument("frame")
    dl.add_argument("-o", "--output")
    dl.set_defaults(func=cmd_dilate)

    p = sub.add_parser("perturb", help="certify that a perturbed pair is a frame")
    p.add_argument("frame")
    p.add_argument("perturbed")
    p.add_argument("--variant", type=int, choices=(1, 2, 3, 4), default=1)
    p.add_argument("--synthesis", action="store_true", help="perturb only the synthesis operators")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_perturb)

    v = sub.add_parser("verify-all", help="run the randomized verification suite")
    v.add_argument("--only", action="append", choices=sorted(THEOREMS))
    v.add_argument("--instances", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json")
    v.add_argument("--inject", action="append", choices=INJECTIONS)
    v.add_argument("--timings", action="store_true", help="include wall times in the JSON report")
    v.set_defaults(func=cmd_verify_all)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = default_config()
    try:
        return args.func(args, cfg)
    except (OVPFrameError, GenerationError, ValueError, OSError) as exc:
        print(f"ovpframe {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
