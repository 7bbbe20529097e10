"""Backend selection for the sector kernels.

The compiled extension ``_xxcore`` is used when importable; otherwise the
numpy implementation is. Set ``CONNENT_PURE_PYTHON=1`` to force the
fallback.
"""
import os

if os.environ.get("CONNENT_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _xxcore as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl
        BACKEND = "python"

sector_states = _impl.sector_states
xx_sector_coo = _impl.xx_sector_coo
gather_bits = _impl.gather_bits

__all__ = ["BACKEND", "sector_states", "xx_sector_coo", "gather_bits"]
