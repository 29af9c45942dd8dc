"""Simulation kernels with a compiled core and a pure-Python fallback.

The compiled backend is used when the extension built; set
RFR_KIT_BACKEND=pure or RFR_KIT_BACKEND=compiled to force a choice.
Both backends produce bit-identical output on the same platform.
"""

import os

_requested = os.environ.get("RFR_KIT_BACKEND", "").strip().lower()

if _requested in ("pure", "py", "python"):
    from . import _pure as _impl
elif _requested in ("", "compiled", "c"):
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _requested:
            raise ImportError(
                "RFR_KIT_BACKEND=compiled but the extension is not built; "
                "run `pip install -e . --no-build-isolation`"
            ) from None
        from . import _pure as _impl
else:
    raise ValueError(f"unknown RFR_KIT_BACKEND value {_requested!r}")

backend_name: str = _impl.BACKEND
norm_ppf = _impl.norm_ppf
normal_stream = _impl.normal_stream
simulate_paths = _impl.simulate_paths
relative_gaps = _impl.relative_gaps


def available_backends() -> list[str]:
    """Names of the kernel backends importable in this environment."""
    names = []
    try:
        from . import _core  # noqa: F401
        names.append("compiled")
    except ImportError:
        pass
    names.append("pure")
    return names
