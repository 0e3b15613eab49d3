"""Hard Euclidean TSP instances whose subtour-LP integrality ratio tends to 4/3."""
from .instances import (
    Family,
    Instance,
    Kind,
    VertexLabel,
    build_modified,
    build_tetrahedron,
    build_three_lines,
    gamma,
    i0_index,
    removal_threshold,
    select_nm,
)
from .kernels import BACKEND

__version__ = "0.1.0"
