"""Hot loops, backed by a compiled extension when it is available.

Set ``OWNET_PURE=1`` to force the pure-Python implementations.
"""

import os

from . import _pykernels as pure

compiled = None
if os.environ.get("OWNET_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else pure
BACKEND = "cython" if compiled is not None else "python"

brandes = _impl.brandes
distance_stats = _impl.distance_stats
local_clustering = _impl.local_clustering
rewire_swaps = _impl.rewire_swaps
percolation_counts = _impl.percolation_counts

__all__ = [
    "BACKEND",
    "brandes",
    "compiled",
    "distance_stats",
    "local_clustering",
    "percolation_counts",
    "pure",
    "rewire_swaps",
]
