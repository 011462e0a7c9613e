"""Hot-loop kernels with two interchangeable backends.

The compiled Cython backend (``eatsc.kernels._speed``) is preferred when it
was built; otherwise the pure-Python twin (``eatsc.kernels._pure``) is used.
Both implement the same four functions with identical numeric behaviour
(sequential summation order, libm ``exp``), so results are bit-equal across
backends.

Selection can be forced with the ``EATSC_BACKEND`` environment variable:
``auto`` (default), ``python``, or ``compiled``.
"""

import os

from . import _pure

_choice = os.environ.get("EATSC_BACKEND", "auto").lower()
if _choice not in ("auto", "python", "compiled"):
    raise RuntimeError(f"EATSC_BACKEND must be auto, python or compiled, not {_choice!r}")

_impl = None
if _choice in ("auto", "compiled"):
    try:
        from . import _speed as _impl
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = None
if _impl is None:
    _impl = _pure

BACKEND = "compiled" if _impl is not _pure else "python"

penalty_sum = _impl.penalty_sum
wait_sum = _impl.wait_sum
update_carried = _impl.update_carried
run_phase = _impl.run_phase


def available_backends():
    """Map of backend name -> module, for parity tests and benchmarks."""
    out = {"python": _pure}
    try:
        from . import _speed

        out["compiled"] = _speed
    except ImportError:
        pass
    return out
