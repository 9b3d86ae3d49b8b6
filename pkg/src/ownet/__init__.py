"""Typed shareholder networks: projection, null models, centrality, percolation and communities."""

__version__ = "0.1.0"

from .types import OwnerType  # noqa: E402
from .graph import BipartiteNetwork, TypedProjection, components, project  # noqa: E402
from ._kernels import BACKEND  # noqa: E402

__all__ = ["BACKEND", "BipartiteNetwork", "OwnerType", "TypedProjection", "components", "project", "__version__"]
