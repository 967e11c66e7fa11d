import json
import math
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ovpframe import duality as du
from ovpframe.config import default_config
from ovpframe.errors import SchemaError
from ovpframe.frames import FrameKind, canonical_dual, classify
from ovpframe.harness import io
from ovpframe.harness.cli import main
from ovpframe.harness.generate import KINDS, GenerationError, GenSpec, generate, rng_for
from ovpframe.harness.verify import THEOREMS, verify_all


class TestGenerate:
    def test_deterministic_bytes(self):
        spec = GenSpec(seed=42, p=1.5, d=3, e=2, N=5, rX=3.0)
        assert io.dumps_frame(generate(spec)) == io.dumps_frame(generate(spec))

    def test_seed_changes_output(self):
        a = generate(GenSpec(seed=1, p=2.0, d=3, e=2, N=4))
        b = generate(GenSpec(seed=2, p=2.0, d=3, e=2, N=4))
        assert not a.allclose(b, atol=1e-3)

    def test_key_separates_kinds(self):
        a = GenSpec(seed=1, p=2.0, d=3, e=2, N=4, kind="generic").key()
        b = GenSpec(seed=1, p=2.0, d=3, e=2, N=4, kind="parseval").key()
        assert a[0] == b[0] and a != b

    def test_rng_stream(self):
        assert rng_for(3, 4).random() == rng_for(3, 4).random()

    @given(st.integers(0, 2**63 - 1), st.sampled_from([1.0, 1.5, 2.0, 3.0]))
    def test_kind_predicates(self, seed, p):
        base = dict(seed=seed, p=p, d=3, e=2, N=4)
        assert FrameKind.PARSEVAL in classify(generate(GenSpec(kind="parseval", **base)))
        assert FrameKind.RIESZ in classify(generate(GenSpec(kind="riesz", **base)))
        assert FrameKind.FRAME not in classify(generate(GenSpec(kind="bessel_only", **base)))
        assert FrameKind.FRAME in classify(generate(GenSpec(kind="generic", **base)))
        assert du.is_orthogonal(*generate(GenSpec(kind="orthogonal_pair", **base)))
        assert du.is_approx_dual(*generate(GenSpec(kind="approx_dual_pair", **base)), samples=0)

    def test_riesz_dimension(self):
        f = generate(GenSpec(seed=0, p=2.0, d=5, e=2, N=3, kind="riesz"))
        assert f.d == 6

    def test_invalid(self):
        with pytest.raises(ValueError):
            GenSpec(seed=0, p=math.inf, d=2, e=1, N=2)
        with pytest.raises(ValueError):
            GenSpec(seed=0, p=2.0, d=2, e=1, N=2, kind="nope")
        with pytest.raises(GenerationError):
            generate(GenSpec(seed=0, p=2.0, d=5, e=1, N=2))

    def test_all_kinds_run(self):
        for kind in KINDS:
            generate(GenSpec(seed=0, p=2.0, d=2, e=1, N=4, kind=kind))


class TestIO:
    def test_roundtrip(self, frame):
        g = io.loads_frame(io.dumps_frame(frame))
        assert np.array_equal(g.A, frame.A) and np.array_equal(g.Psi, frame.Psi)
        assert (g.p, g.X, g.Y) == (frame.p, frame.X, frame.Y)

    def test_canonical_file(self, frame, tmp_path):
        path = tmp_path / "f.json"
        io.save_frame(frame, path)
        assert io.io_roundtrip(path)
        text = path.read_text()
        assert list(json.loads(text)) == sorted(json.loads(text))

    def test_inf_exponent(self):
        f = generate(GenSpec(seed=0, p=2.0, d=2, e=1, N=3, rX=math.inf))
        text = io.dumps_frame(f)
        assert '"r": "inf"' in text
        assert io.loads_frame(text).X.norm_exp == math.inf

    def test_seventeen_digits(self):
        assert io.dumps(0.1) == "0.10000000000000001\n"
        assert float(io.dumps(1 / 3)) == 1 / 3

    def test_p_zero_names_p(self, frame):
        doc = io.frame_to_dict(frame)
        doc["p"] = 0
        text = json.dumps(doc, indent=2)
        with pytest.raises(SchemaError) as err:
            io.loads_frame(text)
        expected = next(i for i, line in enumerate(text.splitlines(), 1) if line.strip().startswith('"p"'))
        assert err.value.field == "p" and err.value.line == expected
        assert str(err.value).startswith("p:")

    @pytest.mark.parametrize(
        "mutate,field",
        [
            (lambda d: d.__setitem__("p", "inf"), "p"),
            (lambda d: d.__setitem__("p", True), "p"),
            (lambda d: d.pop("p"), "p"),
            (lambda d: d["X"].__setitem__("dim", 0), "X.dim"),
            (lambda d: d["Y"].__setitem__("r", 0.5), "Y.r"),
            (lambda d: d.__setitem__("A", [[["x"]]]), "A"),
            (lambda d: d.__setitem__("Psi", d["Psi"][:1]), "Psi"),
            (lambda d: d.pop("A"), "A"),
        ],
    )
    def test_schema_errors(self, frame, mutate, field):
        doc = io.frame_to_dict(frame)
        mutate(doc)
        with pytest.raises(SchemaError) as err:
            io.loads_frame(json.dumps(doc))
        assert err.value.field == field

    def test_malformed_json_line(self):
        with pytest.raises(SchemaError) as err:
            io.loads_frame('{\n  "p": 2,\n  oops\n}')
        assert err.value.line == 3

    def test_large_roundtrip_speed(self, tmp_path):
        f = generate(GenSpec(seed=0, p=2.0, d=8, e=8, N=200))
        path = tmp_path / "big.json"
        t0 = time.perf_counter()
        io.save_frame(f, path)
        g = io.load_frame(path)
        elapsed = time.perf_counter() - t0
        assert np.array_equal(g.A, f.A) and np.array_equal(g.Psi, f.Psi)
        assert elapsed < 1.0

    def test_frames_list(self, tmp_path):
        f, g = generate(GenSpec(seed=0, p=2.0, d=2, e=1, N=4, kind="orthogonal_pair"))
        path = tmp_path / "pair.json"
        io.dump({"frames": [io.frame_to_dict(f), io.frame_to_dict(g)]}, path)
        out = io.load_frames(path)
        assert isinstance(out, list) and len(out) == 2


class TestVerify:
    def test_registry(self):
        assert {"factorization", "dilation", "negative_controls", "perturb_pair"} <= set(THEOREMS)

    def test_only_dilation(self):
        rep = verify_all(only=["dilation"], instances=5)
        assert [r.theorem for r in rep.records] == ["dilation"] and rep.failures == 0

    def test_small_full_run(self):
        rep = verify_all(instances=3)
        assert rep.failures == 0 and len(rep.records) == len(THEOREMS)

    def test_injection_detected(self):
        rep = verify_all(only=["canonical_dual"], instances=5, inject=["tampered_dual"])
        assert rep.failures == 1
        assert rep.records[0].worst_residual > 1e-10

    def test_report_deterministic(self):
        a = verify_all(only=["projection", "tensor"], instances=5, seed=3)
        b = verify_all(only=["projection", "tensor"], instances=5, seed=3)
        assert io.dumps(a.as_dict()) == io.dumps(b.as_dict())
        assert "runtime" not in io.dumps(a.as_dict())
        assert "runtime" in io.dumps(a.as_dict(timings=True))


class TestConfig:
    def test_env_tolerance(self, monkeypatch):
        monkeypatch.setenv("OVPFRAME_TOL", "1e-3")
        assert default_config().tol == 1e-3

    def test_env_changes_verdict(self, monkeypatch, frame):
        g = canonical_dual(frame)
        g = g.replace(Psi=g.Psi * (1 + 1e-6))
        assert not du.is_dual(frame, g)
        monkeypatch.setenv("OVPFRAME_TOL", "1e-4")
        assert du.is_dual(frame, g)


class TestCLI:
    def run(self, capsys, *argv):
        rc = main(list(argv))
        out = capsys.readouterr()
        return rc, out.out, out.err

    def test_gen_check_dual_dilate(self, tmp_path, capsys):
        f = str(tmp_path / "f.json")
        rc, _, _ = self.run(capsys, "gen", "--kind", "generic", "--seed", "1", "--p", "1.5", "--dims", "3,2", "--N", "4", "-o", f)
        assert rc == 0
        rc, out, _ = self.run(capsys, "check", f)
        assert rc == 0 and json.loads(out)["strongest"] == "Frame"
        rc, out, _ = self.run(capsys, "dual", f)
        assert rc == 0 and json.loads(out)["certificate"]["verdict"]
        rc, out, _ = self.run(capsys, "dilate", f)
        assert rc == 0 and len(json.loads(out)["W_basis"]) == 8

    def test_gen_deterministic(self, capsys):
        _, a, _ = self.run(capsys, "gen", "--seed", "5", "--kind", "parseval")
        _, b, _ = self.run(capsys, "gen", "--seed", "5", "--kind", "parseval")
        assert a == b

    def test_dual_params(self, tmp_path, capsys):
        f = tmp_path / "f.json"
        frame = generate(GenSpec(seed=1, p=2.0, d=2, e=1, N=3))
        io.save_frame(frame, f)
        uv = tmp_path / "uv.json"
        io.dump({"U": np.ones((3, 2)), "V": np.ones((2, 3))}, uv)
        rc, out, _ = self.run(capsys, "dual", str(f), "--params", str(uv))
        assert rc == 0 and json.loads(out)["certificate"]["verdict"]

    def test_perturb(self, tmp_path, capsys):
        f, g = tmp_path / "f.json", tmp_path / "g.json"
        frame = generate(GenSpec(seed=1, p=2.0, d=2, e=1, N=3))
        io.save_frame(frame, f)
        io.save_frame(frame.replace(Psi=frame.Psi * 1.001), g)
        rc, out, _ = self.run(capsys, "perturb", str(f), str(g), "--variant", "2")
        assert rc == 0 and json.loads(out)["hypothesis_ok"]
        io.save_frame(frame.replace(Psi=-frame.Psi), g)
        rc, out, _ = self.run(capsys, "perturb", str(f), str(g), "--synthesis")
        assert rc == 0 and not json.loads(out)["hypothesis_ok"]

    def test_schema_error_exit(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        doc = io.frame_to_dict(generate(GenSpec(seed=1, p=2.0, d=2, e=1, N=3)))
        doc["p"] = 0
        bad.write_text(json.dumps(doc, indent=2))
        rc, _, err = self.run(capsys, "check", str(bad))
        assert rc == 2 and "p:" in err

    def test_pair_file_rejected(self, tmp_path, capsys):
        path = str(tmp_path / "pair.json")
        self.run(capsys, "gen", "--kind", "orthogonal_pair", "-o", path)
        rc, _, err = self.run(capsys, "check", path)
        assert rc == 2 and "2 frames" in err

    def test_verify_all(self, tmp_path, capsys):
        report = tmp_path / "r.json"
        rc, out, _ = self.run(capsys, "verify-all", "--only", "tensor", "--instances", "4", "--json", str(report))
        assert rc == 0 and "PASS tensor" in out
        assert json.loads(report.read_text())["failures"] == 0
        rc, out, _ = self.run(capsys, "verify-all", "--only", "canonical_dual", "--instances", "3", "--inject", "tampered_dual")
        assert rc == 1 and "total failures: 1" in out
