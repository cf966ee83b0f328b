"""Kernel selection: compiled extension when available, pure Python otherwise.

Set DPLLC_KERNEL=py or DPLLC_KERNEL=cy to force a backend (cy raises if the
extension is not built).
"""

import importlib
import os


def load(name: str):
    """Load a kernel backend by name ('py' or 'cy')."""
    if name == "py":
        return importlib.import_module("dpllc._kernel_py")
    if name == "cy":
        return importlib.import_module("dpllc._kernel_cy")
    raise ValueError("unknown kernel backend %r" % name)


_forced = os.environ.get("DPLLC_KERNEL")
if _forced:
    impl = load(_forced)
    BACKEND = _forced
else:
    try:
        impl = load("cy")
        BACKEND = "cy"
    except ImportError:
        impl = load("py")
        BACKEND = "py"
