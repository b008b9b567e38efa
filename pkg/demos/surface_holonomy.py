"""Holonomy of a flat gerbe on the 7-vertex torus, before and after a gauge change."""

import random
from fractions import Fraction

from gerbelab import cech, holonomy
from gerbelab.cli import load_fixture

if __name__ == "__main__":
    rng = random.Random(1)
    nerve = cech.nerve_from_facets(load_fixture("torus")["input"]["facets"])
    surface = holonomy.orient_surface(nerve)

    def rand(k):
        return cech.Cochain(k, cech.QZ, {s: Fraction(rng.randint(0, 11), 12) for s in nerve.of_degree(k)})

    c, a = rand(2), rand(1)
    print("holonomy:", holonomy.surface_holonomy(holonomy.GerbeConnection(c, a), surface))
    c2 = c + cech.coboundary(nerve, rand(1))
    a2 = a + cech.coboundary(nerve, rand(0))
    print("after gauge change:", holonomy.surface_holonomy(holonomy.GerbeConnection(c2, a2), surface))
