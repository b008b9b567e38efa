"""Finite groups given by Cayley tables.

Elements are the indices ``0 .. order-1``; ``labels`` are only for I/O.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations as _permutations

__all__ = [
    "FiniteGroup",
    "GroupTableError",
    "GroupTooLargeError",
    "NotSubgroupError",
    "centralizer",
    "conjugacy_classes",
    "cyclic_group",
    "direct_product",
    "inner_automorphism",
    "is_homomorphism",
    "normalizer",
    "subgroup_classes",
    "subgroups",
    "symmetric_group",
]

DEFAULT_MAX_ORDER = 24


class GroupTableError(ValueError):
    pass


class NotSubgroupError(ValueError):
    pass


class GroupTooLargeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Finite group by multiplication table: ``mul[a][b]`` is the index of ``a*b``.

    The group axioms are verified on construction.
    """

    mul: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        mul = tuple(tuple(int(x) for x in row) for row in self.mul)
        n = len(mul)
        if n == 0 or any(len(r) != n for r in mul):
            raise GroupTableError("multiplication table must be a non-empty square")
        if any(not 0 <= x < n for r in mul for x in r):
            raise GroupTableError("table entry out of range")
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(n))
        if len(labels) != n or len(set(labels)) != n:
            raise GroupTableError("labels must be distinct, one per element")
        object.__setattr__(self, "mul", mul)
        object.__setattr__(self, "labels", labels)
        ids = [e for e in range(n) if all(mul[e][a] == a == mul[a][e] for a in range(n))]
        if not ids:
            raise GroupTableError("no identity element")
        e = ids[0]
        inv = []
        for a in range(n):
            b = next((b for b in range(n) if mul[a][b] == e), None)
            if b is None or mul[b][a] != e:
                raise GroupTableError(f"element {labels[a]} has no two-sided inverse")
            inv.append(b)
        for a in range(n):
            ma = mul[a]
            for b in range(n):
                mab = mul[ma[b]]
                mb = mul[b]
                for c in range(n):
                    if mab[c] != ma[mb[c]]:
                        raise GroupTableError(
                            f"associativity fails on ({labels[a]}, {labels[b]}, {labels[c]})"
                        )
        object.__setattr__(self, "identity", e)
        object.__setattr__(self, "inv", tuple(inv))

    # identity and inv are set in __post_init__
    identity: int = field(init=False, default=0)
    inv: tuple[int, ...] = field(init=False, default=())

    @property
    def order(self) -> int:
        return len(self.mul)

    def __len__(self):
        return len(self.mul)

    def __iter__(self):
        return iter(range(len(self.mul)))

    def m(self, *elements: int) -> int:
        """Product of the given elements, left to right."""
        out = self.identity
        for x in elements:
            out = self.mul[out][x]
        return out

    def conj(self, g: int, x: int) -> int:
        """``g x g^-1``."""
        return self.mul[self.mul[g][x]][self.inv[g]]

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.mul[x][g]
            k += 1
        return k

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inv[g], -k
        x = self.identity
        for _ in range(k):
            x = self.mul[x][g]
        return x

    def index(self, label) -> int:
        if isinstance(label, int) and not isinstance(label, bool):
            if not 0 <= label < self.order:
                raise KeyError(label)
            return label
        try:
            return self._label_index[str(label)]
        except KeyError:
            raise KeyError(f"unknown group element {label!r}") from None

    @cached_property
    def _label_index(self):
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def is_abelian(self) -> bool:
        return all(self.mul[a][b] == self.mul[b][a] for a in self for b in self)

    def is_subgroup(self, elements: Iterable[int]) -> bool:
        s = set(elements)
        return self.identity in s and all(self.mul[a][self.inv[b]] in s for a in s for b in s)

    def generated(self, gens: Iterable[int]) -> frozenset[int]:
        out = {self.identity}
        frontier = list(out)
        gens = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul[x][g]
                    if y not in out:
                        out.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(out)

    @classmethod
    def from_permutations(cls, generators: Sequence[Sequence[int]]) -> FiniteGroup:
        """Close a set of permutations (one-line notation on 0..n-1)."""
        gens = [tuple(int(x) for x in g) for g in generators]
        if not gens:
            raise GroupTableError("need at least one generator")
        n = len(gens[0])
        for g in gens:
            if len(g) != n or sorted(g) != list(range(n)):
                raise GroupTableError(f"{list(g)} is not a permutation of 0..{n - 1}")
        ident = tuple(range(n))
        elems = [ident]
        seen = {ident: 0}
        i = 0
        while i < len(elems):
            x = elems[i]
            for g in gens:
                # apply x then g: (x*g)(p) = g(x(p)); composition order only fixes labels
                y = tuple(g[x[p]] for p in range(n))
                if y not in seen:
                    seen[y] = len(elems)
                    elems.append(y)
            i += 1
        table = [[seen[tuple(b[a[p]] for p in range(n))] for b in elems] for a in elems]
        return cls(tuple(map(tuple, table)), tuple(str(list(e)) for e in elems))

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "table": [list(r) for r in self.mul]}

    @classmethod
    def from_json(cls, doc: Mapping) -> FiniteGroup:
        if "table" in doc:
            labels = tuple(str(x) for x in doc.get("labels", ()))
            table = doc["table"]
            if labels and table and isinstance(table[0][0], str):
                idx = {lab: i for i, lab in enumerate(labels)}
                table = [[idx[x] for x in row] for row in table]
            return cls(tuple(map(tuple, table)), labels)
        if "generators" in doc:
            return cls.from_permutations(doc["generators"])
        if "cyclic" in doc:
            return cyclic_group(int(doc["cyclic"]))
        if "symmetric" in doc:
            return symmetric_group(int(doc["symmetric"]))
        raise GroupTableError("group document needs 'table', 'generators', 'cyclic' or 'symmetric'")


def cyclic_group(n: int) -> FiniteGroup:
    """Z/n with element k labelled ``str(k)``."""
    return FiniteGroup(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)))


def symmetric_group(n: int) -> FiniteGroup:
    """S_n on 0..n-1; ``(a*b)(p) = a(b(p))``, labels in one-line notation."""
    elems = list(_permutations(range(n)))
    idx = {p: i for i, p in enumerate(elems)}
    table = [[idx[tuple(a[b[p]] for p in range(n))] for b in elems] for a in elems]
    return FiniteGroup(tuple(map(tuple, table)), tuple(str(list(e)) for e in elems))


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    pairs = [(g, h) for g in G for h in H]
    idx = {p: i for i, p in enumerate(pairs)}
    table = [[idx[(G.mul[a][c], H.mul[b][d])] for (c, d) in pairs] for (a, b) in pairs]
    return FiniteGroup(tuple(map(tuple, table)), tuple(f"({G.labels[a]},{H.labels[b]})" for a, b in pairs))


# -- conjugacy ---------------------------------------------------------------


def conjugacy_classes(G: FiniteGroup) -> list[tuple[int, ...]]:
    """Conjugacy classes, each sorted, ordered by smallest element."""
    seen = set()
    classes = []
    for x in G:
        if x in seen:
            continue
        cls = tuple(sorted({G.conj(g, x) for g in G}))
        seen.update(cls)
        classes.append(cls)
    return classes


def centralizer(G: FiniteGroup, h: int) -> frozenset[int]:
    return frozenset(g for g in G if G.mul[g][h] == G.mul[h][g])


def normalizer(G: FiniteGroup, H: Iterable[int]) -> frozenset[int]:
    H = frozenset(H)
    if not G.is_subgroup(H):
        raise NotSubgroupError("not closed under multiplication and inverses")
    return frozenset(g for g in G if frozenset(G.conj(g, x) for x in H) == H)


def subgroups(G: FiniteGroup, max_order: int = DEFAULT_MAX_ORDER) -> list[frozenset[int]]:
    """Every subgroup, by closing known subgroups under one more element."""
    if G.order > max_order:
        raise GroupTooLargeError(f"group of order {G.order} exceeds the enumeration bound {max_order}")
    trivial = frozenset({G.identity})
    found = {trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for S in frontier:
            for g in G:
                if g in S:
                    continue
                T = G.generated(list(S) + [g])
                if T not in found:
                    found.add(T)
                    nxt.append(T)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def subgroup_classes(G: FiniteGroup, max_order: int = DEFAULT_MAX_ORDER) -> list[list[frozenset[int]]]:
    """Subgroups grouped into conjugacy classes."""
    remaining = subgroups(G, max_order)
    classes = []
    assigned = set()
    for S in remaining:
        if S in assigned:
            continue
        orbit = {frozenset(G.conj(g, x) for x in S) for g in G}
        orbit = sorted(orbit, key=sorted)
        assigned.update(orbit)
        classes.append(orbit)
    return classes


# -- homomorphisms -----------------------------------------------------------


def is_homomorphism(f: Sequence[int], source: FiniteGroup, target: FiniteGroup) -> bool:
    if len(f) != source.order:
        return False
    return all(f[source.mul[a][b]] == target.mul[f[a]][f[b]] for a in source for b in source)


def inner_automorphism(G: FiniteGroup, g: int) -> tuple[int, ...]:
    """The map ``x -> g x g^-1`` as an element permutation."""
    return tuple(G.conj(g, x) for x in G)
