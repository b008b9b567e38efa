"""Lifting a Z/2 cocycle on RP^2 through Z/2 -> Z/4 -> Z/2.

The obstruction is the Bockstein of the generator of H^1(RP^2; Z/2).  It
is nonzero, so the Z/2 bundle has no Z/4 lift.
"""

from gerbelab import cech
from gerbelab.cli import load_fixture, main

if __name__ == "__main__":
    doc = load_fixture("rp2-obstruction")["input"]
    nerve = cech.nerve_from_facets(doc["facets"])
    for k in range(3):
        print(f"H^{k}(RP^2; Z) = {cech.cohomology(nerve, k)}    H^{k}(RP^2; Z/2) = {cech.cohomology(nerve, k, cech.Zmod(2))}")
    print()
    main(["cech", "obstruct", "--fixture", "rp2-obstruction"])
