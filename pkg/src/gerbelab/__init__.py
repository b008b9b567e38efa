"""Exact-arithmetic workbench for gerbes on orbifolds and Lie algebras.

Submodules:

- :mod:`gerbelab.algebra`   exact rational and integer linear algebra, Smith normal form
- :mod:`gerbelab.lie`       Chevalley-Eilenberg cohomology, invariant metrics, curvature
- :mod:`gerbelab.groups`    finite groups by Cayley table
- :mod:`gerbelab.orbifold`  chart atlases, torus quotients, Chen-Ruan cohomology
- :mod:`gerbelab.cech`      Cech cochains, cohomology, non-abelian 2-cocycles
- :mod:`gerbelab.holonomy`  discrete gerbe holonomy and 2-sequence cocycles
- :mod:`gerbelab.cli`       command-line front end
"""

from . import algebra, cech, groups, holonomy, lie, orbifold

__version__ = "0.1.0"

__all__ = ["__version__", "algebra", "cech", "groups", "holonomy", "lie", "orbifold"]
