"""Instance generators, the verification suite, JSON I/O and the CLI."""

from .generate import KINDS, GenSpec, generate
from .io import dumps_frame, frame_from_dict, frame_to_dict, io_roundtrip, load_frame, loads_frame, save_frame
from .verify import THEOREMS, Report, verify_all

__all__ = [
    "KINDS",
    "GenSpec",
    "generate",
    "dumps_frame",
    "frame_from_dict",
    "frame_to_dict",
    "io_roundtrip",
    "load_frame",
    "loads_frame",
    "save_frame",
    "THEOREMS",
    "Report",
    "verify_all",
]
