"""Chen-Ruan degree tables for a few torus quotients.

Prints the sector list (fixed-point counts and degree shifts) and the
resulting degree table for each action.
"""

from gerbelab import orbifold
from gerbelab.cli import load_fixture


def show(name, action):
    print(f"== {name}")
    for r in orbifold.sectors(action):
        print(f"   class of {r.class_rep}: {r.components} fixed components of dim {r.fixed_dim},"
              f" shift {r.shift}, betti {r.betti}")
    table = orbifold.cr_cohomology(action)
    print("   degrees:", ", ".join(f"{d}:{n}" for d, n in table.items()))


if __name__ == "__main__":
    for fixture in ("pillowcase", "kummer"):
        doc = load_fixture(fixture)
        show(doc["description"], orbifold.ToralAction.from_json(doc["input"]))
