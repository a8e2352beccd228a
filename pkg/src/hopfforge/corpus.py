"""Deterministic example instances with expectations from group and groupoid
tables.

Every expected value written here (counit, antipode, kernel dimensions, the
idempotent E) comes from composition tables alone, never from the engines.
"""

from __future__ import annotations

import itertools
from typing import Callable, Sequence

from .instance import dumps, parse_instance

ONE_S = "1/1"


class CorpusError(ValueError):
    pass


# ------------------------------------------------------------------ groups

class Group:
    """Finite group from a multiplication table on 0..n-1 (0 is not assumed to be e)."""

    def __init__(self, name: str, labels: Sequence[str], table: Sequence[Sequence[int]]):
        n = len(labels)
        if len(table) != n or any(len(row) != n for row in table):
            raise CorpusError(f"{name}: table must be {n} x {n}")
        if any(not 0 <= x < n for row in table for x in row):
            raise CorpusError(f"{name}: entries out of range")
        for a, b, c in itertools.product(range(n), repeat=3):
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise CorpusError(f"{name}: not associative at ({a}, {b}, {c})")
        units = [e for e in range(n) if all(table[e][x] == x == table[x][e] for x in range(n))]
        if len(units) != 1:
            raise CorpusError(f"{name}: no identity element")
        self.e = units[0]
        self.inv = []
        for a in range(n):
            inv = [b for b in range(n) if table[a][b] == self.e == table[b][a]]
            if not inv:
                raise CorpusError(f"{name}: {labels[a]} has no inverse")
            self.inv.append(inv[0])
        self.name = name
        self.labels = list(labels)
        self.table = [list(r) for r in table]
        self.n = n

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]


def cyclic(n: int) -> Group:
    labels = ["e"] + [f"g{k}" for k in range(1, n)]
    return Group(f"z{n}", labels, [[(a + b) % n for b in range(n)] for a in range(n)])


def symmetric3() -> Group:
    perms = sorted(itertools.permutations(range(3)))
    idx = {p: i for i, p in enumerate(perms)}
    labels = ["e" if p == (0, 1, 2) else "s" + "".join(map(str, p)) for p in perms]
    # (p q)(i) = p(q(i))
    table = [[idx[tuple(p[q[i]] for i in range(3))] for q in perms] for p in perms]
    return Group("s3", labels, table)


GROUPS: dict[str, Callable[[], Group]] = {
    "z1": lambda: cyclic(1),
    "z2": lambda: cyclic(2),
    "z3": lambda: cyclic(3),
    "z4": lambda: cyclic(4),
    "s3": symmetric3,
}


# --------------------------------------------------------------- groupoids

class Groupoid:
    """Finite groupoid; arrows compose as g h when target(g) = source(h)."""

    def __init__(self, name: str, labels: Sequence[str], source: Sequence[int], target: Sequence[int],
                 compose: dict[tuple[int, int], int]):
        self.name = name
        self.labels = list(labels)
        self.n = len(labels)
        self.source = list(source)
        self.target = list(target)
        self.compose = dict(compose)
        n = self.n
        for g in range(n):
            for h in range(n):
                defined = (g, h) in self.compose
                if defined != (self.target[g] == self.source[h]):
                    raise CorpusError(f"{name}: composability of ({labels[g]}, {labels[h]}) is inconsistent")
                if defined:
                    gh = self.compose[(g, h)]
                    if self.source[gh] != self.source[g] or self.target[gh] != self.target[h]:
                        raise CorpusError(f"{name}: composite of ({labels[g]}, {labels[h]}) has wrong ends")
        for (g, h), gh in self.compose.items():
            for k in range(n):
                if (h, k) in self.compose:
                    left = self.compose.get((gh, k))
                    right = self.compose.get((g, self.compose[(h, k)]))
                    if left != right:
                        raise CorpusError(f"{name}: not associative")
        self.units = []
        for g in range(n):
            if self.source[g] == self.target[g] and all(
                    self.compose.get((g, h), h) == h for h in range(n) if self.source[h] == self.source[g]) and all(
                    self.compose.get((h, g), h) == h for h in range(n) if self.target[h] == self.source[g]):
                self.units.append(g)
        if sorted({self.source[u] for u in self.units}) != sorted(set(self.source) | set(self.target)):
            raise CorpusError(f"{name}: missing identity arrows")
        self.inv = []
        for g in range(n):
            cand = [h for h in range(n) if self.compose.get((g, h)) in self.units and
                    self.compose.get((h, g)) in self.units]
            if not cand:
                raise CorpusError(f"{name}: {labels[g]} has no inverse")
            self.inv.append(cand[0])

    def composable_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.compose)


def pair_groupoid(points: int) -> Groupoid:
    arrows = [(x, y) for x in range(points) for y in range(points)]
    idx = {a: i for i, a in enumerate(arrows)}
    comp = {(idx[(x, y)], idx[(y2, z)]): idx[(x, z)] for (x, y) in arrows for (y2, z) in arrows if y == y2}
    return Groupoid(f"pair-groupoid-{points}", [f"{x}{y}" for x, y in arrows],
                    [x for x, _ in arrows], [y for _, y in arrows], comp)


def group_bundle_z2_point() -> Groupoid:
    # object 0 carries Z2 = {e, a}; object 1 carries only its identity p
    labels = ["e", "a", "p"]
    comp = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0, (2, 2): 2}
    return Groupoid("bundle-z2-pt", labels, [0, 0, 1], [0, 0, 1], comp)


def one_object(group: Group) -> Groupoid:
    comp = {(a, b): group.mul(a, b) for a in range(group.n) for b in range(group.n)}
    return Groupoid(f"one-object-{group.name}", group.labels, [0] * group.n, [0] * group.n, comp)


# ---------------------------------------------------------------- builders

def _products_group(g: Group) -> list:
    return [[a, b, [[g.mul(a, b), ONE_S]]] for a in range(g.n) for b in range(g.n)]


def _unit_vec(n: int, keys) -> list[str]:
    return [ONE_S if k in keys else "0/1" for k in range(n)]


def _pointwise(n: int) -> list:
    return [[k, k, [[k, ONE_S]]] for k in range(n)]


def _finish(data: dict) -> dict:
    data["scalars"] = "rational"
    parse_instance(data)  # every generated instance must load
    return data


def gen_group_algebra(g: Group) -> dict:
    """Q[G] with D(g) = g (x) g and phi = psi = delta_e."""
    return _finish({
        "name": g.name,
        "algebra": {"kind": "dense", "basis": g.labels, "products": _products_group(g),
                    "unit": _unit_vec(g.n, {g.e})},
        "coproduct": {"kind": "grouplike"},
        "functionals": {"delta_e": [[g.labels[g.e], ONE_S]]},
        "integrals": {"left": ["delta_e"], "right": ["delta_e"]},
        "expect": "HopfInvertibleS",
        "oracle": {
            "counit": [[lab, ONE_S] for lab in g.labels],
            "antipode": [[g.labels[a], [[g.labels[g.inv[a]], ONE_S]]] for a in range(g.n)],
            "tRank": g.n * g.n,
        },
    })


def gen_function_algebra(g: Group) -> dict:
    """Functions on G with D(f)(s, t) = f(st) and the Haar sum."""
    comp = [[s, t, g.mul(s, t)] for s in range(g.n) for t in range(g.n)]
    return _finish({
        "name": f"fun-{g.name}",
        "algebra": {"kind": "dense", "basis": g.labels, "products": _pointwise(g.n),
                    "unit": _unit_vec(g.n, range(g.n))},
        "coproduct": {"kind": "dualfunction", "composition": comp},
        "functionals": {"haar": [[lab, ONE_S] for lab in g.labels]},
        "integrals": {"left": ["haar"], "right": ["haar"]},
        "expect": "HopfInvertibleS",
        "oracle": {
            "counit": [[g.labels[g.e], ONE_S]],
            "antipode": [[g.labels[a], [[g.labels[g.inv[a]], ONE_S]]] for a in range(g.n)],
            "tRank": g.n * g.n,
        },
    })


def gen_function_algebra_infinite(window: int) -> dict:
    """Finitely supported functions on the integers, checked on {-k..k}."""
    if window < 1:
        raise CorpusError("window must be positive")
    return _finish({
        "name": f"zint-window-{window}",
        "algebra": {"kind": "supported", "productRule": {"name": "pointwise-integers"}, "window": window},
        "coproduct": {"kind": "dualfunction", "rule": "integer-addition"},
        "functionals": {"haar": [["*", ONE_S]]},
        "integrals": {"left": ["haar"], "right": ["haar"]},
        "expect": "MultiplierHopf(window-verified)",
        "oracle": {"deltaOfZeroIsElement": False},
    })


def _non_composable(gd: Groupoid) -> int:
    return gd.n * gd.n - len(gd.compose)


def gen_groupoid_algebra(gd: Groupoid, name: str | None = None) -> dict:
    """Groupoid algebra: e_g e_h = e_gh when composable; D(g) = g (x) g."""
    n = gd.n
    products = [[g, h, [[gh, ONE_S]]] for (g, h), gh in sorted(gd.compose.items())]
    E = [[[u, u], ONE_S] for u in gd.units]
    weak = len(gd.units) > 1
    data = {
        "name": name or gd.name,
        "algebra": {"kind": "dense", "basis": gd.labels, "products": products, "unit": _unit_vec(n, gd.units)},
        "coproduct": {"kind": "grouplike"},
        "functionals": {"units": [[gd.labels[u], ONE_S] for u in gd.units]},
        "integrals": {"left": ["units"], "right": ["units"]},
        "E": {"element": E},
        "expect": "RegularWeakMHA" if weak else "HopfInvertibleS",
        "oracle": {"E": E, "kernelDim": _non_composable(gd), "rangeRank": len(gd.compose),
                   "legB": [gd.labels[u] for u in gd.units]},
    }
    return _finish(data)


def gen_groupoid_function_algebra(gd: Groupoid, name: str | None = None) -> dict:
    """Functions on a groupoid: D(f)(g, h) = f(gh) on composable pairs, zero elsewhere."""
    n = gd.n
    comp = [[g, h, gh] for (g, h), gh in sorted(gd.compose.items())]
    E = [[[g, h], ONE_S] for (g, h) in gd.composable_pairs()]
    # T1(delta_s (x) delta_t) vanishes exactly when no arrow a has a t = s
    ker = sum(1 for s in range(n) for t in range(n) if not any(gd.compose.get((a, t)) == s for a in range(n)))
    weak = len(gd.units) > 1
    data = {
        "name": name or f"fun-{gd.name}",
        "algebra": {"kind": "dense", "basis": gd.labels, "products": _pointwise(n), "unit": _unit_vec(n, range(n))},
        "coproduct": {"kind": "dualfunction", "composition": comp},
        "functionals": {"arrows": [[lab, ONE_S] for lab in gd.labels]},
        "integrals": {"left": ["arrows"], "right": ["arrows"]},
        "E": {"element": E},
        "expect": "RegularWeakMHA" if weak else "HopfInvertibleS",
        "oracle": {"E": E, "kernelDim": ker, "rangeRank": n * n - ker},
    }
    return _finish(data)


# --------------------------------------------------------------- negatives

NEGATIVE_KINDS = ("non-faithful-functional", "non-integral-functional", "broken-coassoc", "non-full-coproduct",
                  "no-E", "zero-product", "non-regular")


def gen_negative(kind: str) -> dict:
    if kind == "non-faithful-functional":
        # a weak integral that ignores the second object: faithfulness is the only failure
        data = gen_groupoid_algebra(group_bundle_z2_point(), name="neg-non-faithful-functional")
        data["functionals"] = {"first-unit": [["e", ONE_S]]}
        data["integrals"] = {"left": ["first-unit"], "right": ["first-unit"]}
        data["expect"] = "Fail"
        data["oracle"] = {"failing": ["weak.faithful-set.left.left", "weak.faithful-set.right.right"]}
        return _finish(data)
    if kind == "non-integral-functional":
        data = gen_group_algebra(cyclic(2))
        data["name"] = "neg-non-integral-functional"
        data["functionals"] = {"delta_g": [["g1", ONE_S]]}
        data["integrals"] = {"left": ["delta_g"], "right": ["delta_g"]}
        data["expect"] = "Fail"
        data["oracle"] = {"failing": ["integral.left", "integral.right"]}
        return _finish(data)
    if kind == "broken-coassoc":
        # functions on Z3 under the non-associative operation s - t
        n = 3
        comp = [[s, t, (s - t) % n] for s in range(n) for t in range(n)]
        triples = [(a, b, c) for a in range(n) for b in range(n) for c in range(n)
                   if ((a - b) - c) % n != (a - (b - c)) % n]
        return _finish({
            "name": "neg-broken-coassoc",
            "algebra": {"kind": "dense", "basis": ["0", "1", "2"], "products": _pointwise(n),
                        "unit": _unit_vec(n, range(n))},
            "coproduct": {"kind": "dualfunction", "composition": comp},
            "functionals": {"haar": [[str(k), ONE_S] for k in range(n)]},
            "integrals": {"left": ["haar"], "right": ["haar"]},
            "expect": "Fail",
            "oracle": {"failing": ["coproduct.coassoc"], "nonAssociativeTriples": len(triples)},
        })
    if kind == "non-full-coproduct":
        # Q[Z2] plus a one-dimensional block f with f f = f and D(f) = 0
        labels = ["e", "g", "f"]
        products = [[0, 0, [[0, ONE_S]]], [0, 1, [[1, ONE_S]]], [1, 0, [[1, ONE_S]]], [1, 1, [[0, ONE_S]]],
                    [2, 2, [[2, ONE_S]]]]
        left = [[0, [0, 0], [[[0, 0], ONE_S]]], [0, [0, 1], [[[0, 1], ONE_S]]],
                [0, [1, 0], [[[1, 0], ONE_S]]], [0, [1, 1], [[[1, 1], ONE_S]]],
                [1, [0, 0], [[[1, 1], ONE_S]]], [1, [0, 1], [[[1, 0], ONE_S]]],
                [1, [1, 0], [[[0, 1], ONE_S]]], [1, [1, 1], [[[0, 0], ONE_S]]]]
        return _finish({
            "name": "neg-non-full-coproduct",
            "algebra": {"kind": "dense", "basis": labels, "products": products, "unit": _unit_vec(3, {0, 2})},
            "coproduct": {"kind": "explicit", "leftAction": left, "rightAction": left},
            "functionals": {"delta_e": [["e", ONE_S]]},
            "integrals": {"left": ["delta_e"], "right": ["delta_e"]},
            "expect": "Fail",
            "oracle": {"failing": ["coproduct.full", "integral.left"], "leftLegRank": 2},
        })
    if kind == "no-E":
        # functions on a partial monoid whose composable pairs are not closed under the extension identity
        table = {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 1, (1, 2): 2, (2, 1): 2}
        comp = [[s, t, v] for (s, t), v in sorted(table.items())]
        return _finish({
            "name": "neg-no-E",
            "algebra": {"kind": "dense", "basis": ["0", "1", "2"], "products": _pointwise(3),
                        "unit": _unit_vec(3, range(3))},
            "coproduct": {"kind": "dualfunction", "composition": comp},
            "functionals": {"haar": [[str(k), ONE_S] for k in range(3)]},
            "integrals": {"left": ["haar"], "right": ["haar"]},
            "E": "derive",
            "expect": "Fail",
            "oracle": {"failing": ["weak.E.derive"]},
        })
    if kind == "zero-product":
        return _finish({
            "name": "neg-zero-product",
            "algebra": {"kind": "dense", "basis": ["x"], "products": []},
            "coproduct": {"kind": "explicit", "leftAction": [], "rightAction": []},
            "functionals": {"delta_x": [["x", ONE_S]]},
            "integrals": {"left": ["delta_x"], "right": ["delta_x"]},
            "expect": "Fail",
            "oracle": {"failing": ["algebra.nondegenerate"]},
        })
    if kind == "non-regular":
        return _finish({
            "name": "neg-non-regular",
            "algebra": {"kind": "supported", "productRule": {"name": "pointwise-integers"}, "window": 2},
            "coproduct": {"kind": "rule", "rule": "zero-indicator"},
            "functionals": {"haar": [["*", ONE_S]]},
            "integrals": {"left": ["haar"], "right": ["haar"]},
            "expect": "Fail",
            "oracle": {"failing": ["coproduct.regular.T1"]},
        })
    raise CorpusError(f"unknown negative kind {kind!r}")


# ------------------------------------------------------------------ catalog

def _catalog() -> dict[str, Callable[[], dict]]:
    cat: dict[str, Callable[[], dict]] = {}
    for key, make in GROUPS.items():
        cat[key] = lambda make=make: gen_group_algebra(make())
        cat[f"fun-{key}"] = lambda make=make: gen_function_algebra(make())
    for k in (2, 4, 8):
        cat[f"zint-window-{k}"] = lambda k=k: gen_function_algebra_infinite(k)
    cat["pair-groupoid-2"] = lambda: gen_groupoid_algebra(pair_groupoid(2))
    cat["fun-pair-groupoid-2"] = lambda: gen_groupoid_function_algebra(pair_groupoid(2))
    cat["bundle-z2-pt"] = lambda: gen_groupoid_algebra(group_bundle_z2_point())
    cat["fun-bundle-z2-pt"] = lambda: gen_groupoid_function_algebra(group_bundle_z2_point())
    cat["one-object-z3"] = lambda: gen_groupoid_algebra(one_object(cyclic(3)))
    for kind in NEGATIVE_KINDS:
        cat[f"neg-{kind}"] = lambda kind=kind: gen_negative(kind)
    return cat


CATALOG = _catalog()


def names() -> list[str]:
    return sorted(CATALOG)


def generate(name: str) -> dict:
    if name not in CATALOG:
        raise CorpusError(f"unknown corpus instance {name!r}")
    return CATALOG[name]()


def generate_text(name: str) -> str:
    return dumps(generate(name))
