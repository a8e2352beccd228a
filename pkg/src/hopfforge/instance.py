"""Instance files: JSON description of an algebra, a coproduct, functionals
and optional expectations. Parsing validates every index and label and
reports the JSON path of the first problem.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .algebra import (SUPPORTED_RULES, Algebra, DenseAlgebra, Key, Multiplier, SupportedAlgebra, Vec,
                      identity_multiplier, multiplier_as_element, zero_multiplier)
from .coproduct import Coproduct, action_tables, dual_function, explicit, grouplike
from .exact_linalg import ONE, format_scalar, scalar
from .integrals import Functional

DEFAULT_MAX_DIM = 64
FORMAT_VERSION = 1


class InstanceError(ValueError):
    """Malformed instance file; ``path`` locates the problem."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def max_dim() -> int:
    raw = os.environ.get("HOPFFORGE_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError:
        raise InstanceError("$HOPFFORGE_MAX_DIM", f"not an integer: {raw!r}") from None
    if value < 1:
        raise InstanceError("$HOPFFORGE_MAX_DIM", "must be positive")
    return value


# Coproduct rules on supported algebras, looked up by name.
def _integer_addition(s, t):
    return s + t


SUPPORTED_COMPOSITIONS = {"integer-addition": _integer_addition}


def _zero_indicator(cop_holder: dict, k: Key) -> Multiplier:
    # D(delta_n) = [n = 0] 1 (x) 1: a homomorphism whose canonical images leave A (x) A
    AA = cop_holder["cop"].AA
    return identity_multiplier(AA) if k == 0 else zero_multiplier(AA)


SUPPORTED_COPRODUCT_RULES = {"zero-indicator": _zero_indicator}


@dataclass
class Instance:
    name: str
    algebra: Algebra
    coproduct: Coproduct
    functionals: dict[str, Functional]
    left: list[str]
    right: list[str]
    E: Vec | str | None = None  # element, "derive", or None
    expect: str | None = None
    oracle: dict = field(default_factory=dict)
    window: int | None = None
    raw: dict = field(default_factory=dict)

    @property
    def weak(self) -> bool:
        """The weak pipeline applies when E is supplied or requested and is not 1 (x) 1."""
        if self.E is None:
            return False
        if isinstance(self.E, str):
            return True
        A = self.algebra
        if A.is_dense and A.unit is not None:
            from .algebra import tensor_elements
            return self.E != tensor_elements([A.unit, A.unit])
        return True

    def phi(self) -> Functional | None:
        return self.functionals[self.left[0]] if self.left else None

    def psi(self) -> Functional | None:
        return self.functionals[self.right[0]] if self.right else None


# ------------------------------------------------------------------- parsing

def _get(obj: dict, key: str, path: str, kind=None, required: bool = True):
    if not isinstance(obj, dict):
        raise InstanceError(path, "expected an object")
    if key not in obj:
        if required:
            raise InstanceError(f"{path}.{key}", "missing")
        return None
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise InstanceError(f"{path}.{key}", f"expected {getattr(kind, '__name__', kind)}")
    return value


def _scalar(value, path: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise InstanceError(path, f"expected a \"p/q\" string, got {value!r}")
    try:
        return scalar(value)
    except (ValueError, ZeroDivisionError):
        raise InstanceError(path, f"not an exact rational: {value!r}") from None


def _index(value, n: int, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or not 0 <= value < n:
        raise InstanceError(path, f"basis index out of range: {value!r}")
    return value


def _coeffs(items, n: int, path: str) -> Vec:
    if not isinstance(items, list):
        raise InstanceError(path, "expected a list of [index, \"p/q\"] pairs")
    out: Vec = {}
    for i, item in enumerate(items):
        if not isinstance(item, list) or len(item) != 2:
            raise InstanceError(f"{path}[{i}]", "expected [index, \"p/q\"]")
        k = _index(item[0], n, f"{path}[{i}][0]")
        c = _scalar(item[1], f"{path}[{i}][1]")
        out[k] = out.get(k, Fraction(0)) + c
    return {k: v for k, v in out.items() if v}


def _pair_coeffs(items, n: int, path: str) -> Vec:
    if not isinstance(items, list):
        raise InstanceError(path, "expected a list of [[i, j], \"p/q\"] entries")
    out: Vec = {}
    for i, item in enumerate(items):
        if not isinstance(item, list) or len(item) != 2 or not isinstance(item[0], list) or len(item[0]) != 2:
            raise InstanceError(f"{path}[{i}]", "expected [[i, j], \"p/q\"]")
        key = (_index(item[0][0], n, f"{path}[{i}][0][0]"), _index(item[0][1], n, f"{path}[{i}][0][1]"))
        out[key] = out.get(key, Fraction(0)) + _scalar(item[1], f"{path}[{i}][1]")
    return {k: v for k, v in out.items() if v}


def _parse_algebra(spec, window: int | None) -> Algebra:
    path = "$.algebra"
    kind = _get(spec, "kind", path, str)
    if kind == "dense":
        basis = _get(spec, "basis", path, list)
        if not basis:
            raise InstanceError(f"{path}.basis", "empty basis")
        if not all(isinstance(b, str) for b in basis):
            raise InstanceError(f"{path}.basis", "labels must be strings")
        if len(set(basis)) != len(basis):
            raise InstanceError(f"{path}.basis", "duplicate labels")
        n = len(basis)
        cap = max_dim()
        if n > cap:
            raise InstanceError(f"{path}.basis", f"dimension {n} exceeds the cap {cap} (HOPFFORGE_MAX_DIM)")
        table = {}
        for r, row in enumerate(_get(spec, "products", path, list)):
            rp = f"{path}.products[{r}]"
            if not isinstance(row, list) or len(row) != 3:
                raise InstanceError(rp, "expected [i, j, [[k, \"p/q\"], ...]]")
            i, j = _index(row[0], n, rp + "[0]"), _index(row[1], n, rp + "[1]")
            if (i, j) in table:
                raise InstanceError(rp, f"duplicate product entry ({i}, {j})")
            table[(i, j)] = _coeffs(row[2], n, rp + "[2]")
        unit = None
        raw_unit = _get(spec, "unit", path, list, required=False)
        if raw_unit is not None:
            if len(raw_unit) != n:
                raise InstanceError(f"{path}.unit", f"expected {n} coefficients")
            unit = {k: _scalar(v, f"{path}.unit[{k}]") for k, v in enumerate(raw_unit)}
            unit = {k: v for k, v in unit.items() if v}
        alg = DenseAlgebra(basis, table, unit)
        if unit is not None:
            for k in range(n):
                e = {k: ONE}
                if alg.multiply(unit, e) != e or alg.multiply(e, unit) != e:
                    raise InstanceError(f"{path}.unit", f"not a unit (fails on {basis[k]})")
        return alg
    if kind == "supported":
        rule = _get(spec, "productRule", path, dict)
        name = _get(rule, "name", f"{path}.productRule", str)
        if name not in SUPPORTED_RULES:
            raise InstanceError(f"{path}.productRule.name", f"unknown rule {name!r}")
        params = _get(rule, "params", f"{path}.productRule", dict, required=False) or {}
        try:
            r = SUPPORTED_RULES[name](**params)
        except TypeError as err:
            raise InstanceError(f"{path}.productRule.params", str(err)) from None
        default = _get(spec, "window", path, int, required=False)
        return SupportedAlgebra(r, default_window=window or default or 4)
    raise InstanceError(f"{path}.kind", f"unknown algebra kind {kind!r}")


def _parse_coproduct(spec, A: Algebra) -> Coproduct:
    path = "$.coproduct"
    kind = _get(spec, "kind", path, str)
    if kind == "grouplike":
        return grouplike(A)
    if kind == "dualfunction":
        if A.is_dense:
            n = A.dim
            comp = {}
            for r, row in enumerate(_get(spec, "composition", path, list)):
                rp = f"{path}.composition[{r}]"
                if not isinstance(row, list) or len(row) != 3:
                    raise InstanceError(rp, "expected [s, t, st]")
                s, t, st = (_index(x, n, f"{rp}[{q}]") for q, x in enumerate(row))
                if (s, t) in comp:
                    raise InstanceError(rp, "duplicate composable pair")
                comp[(s, t)] = st
            pre: dict[int, list] = {}
            for (s, t), st in comp.items():
                pre.setdefault(st, []).append((s, t))
            return dual_function(A, lambda s, t: comp.get((s, t)), lambda k: sorted(pre.get(k, [])),
                                 params={"composition": "table"})
        rule = _get(spec, "rule", path, str)
        if rule not in SUPPORTED_COMPOSITIONS:
            raise InstanceError(f"{path}.rule", f"unknown composition rule {rule!r}")
        return dual_function(A, SUPPORTED_COMPOSITIONS[rule], params={"rule": rule})
    if kind == "rule":
        rule = _get(spec, "rule", path, str)
        if rule not in SUPPORTED_COPRODUCT_RULES:
            raise InstanceError(f"{path}.rule", f"unknown coproduct rule {rule!r}")
        holder: dict = {}
        fn = SUPPORTED_COPRODUCT_RULES[rule]
        cop = Coproduct(A, lambda k: fn(holder, k), kind="rule", params={"rule": rule})
        holder["cop"] = cop
        return cop
    if kind == "explicit":
        if not A.is_dense:
            raise InstanceError(f"{path}.kind", "explicit tables need a dense algebra")
        tables = _parse_tables(spec, A.dim, path)
        return explicit(A, *tables)
    raise InstanceError(f"{path}.kind", f"unknown coproduct kind {kind!r}")


def _parse_tables(spec, n: int, path: str) -> tuple[dict, dict]:
    out = []
    for side in ("leftAction", "rightAction"):
        table: dict = {}
        for r, row in enumerate(_get(spec, side, path, list)):
            rp = f"{path}.{side}[{r}]"
            if not isinstance(row, list) or len(row) != 3 or not isinstance(row[1], list) or len(row[1]) != 2:
                raise InstanceError(rp, "expected [i, [j, k], [[[p, q], \"c\"], ...]]")
            i = _index(row[0], n, rp + "[0]")
            pair = (_index(row[1][0], n, rp + "[1][0]"), _index(row[1][1], n, rp + "[1][1]"))
            table.setdefault(i, {})[pair] = _pair_coeffs(row[2], n, rp + "[2]")
        out.append(table)
    return out[0], out[1]


def _parse_functional(name: str, items, A: Algebra) -> Functional:
    path = f"$.functionals.{name}"
    if not isinstance(items, list):
        raise InstanceError(path, "expected a list of [label, \"p/q\"] pairs")
    values: dict[Key, Fraction] = {}
    default = Fraction(0)
    for i, item in enumerate(items):
        if not isinstance(item, list) or len(item) != 2 or not isinstance(item[0], str):
            raise InstanceError(f"{path}[{i}]", "expected [label, \"p/q\"]")
        c = _scalar(item[1], f"{path}[{i}][1]")
        if item[0] == "*":
            default = c
            continue
        try:
            k = A.key_of(item[0])
        except (KeyError, ValueError):
            raise InstanceError(f"{path}[{i}][0]", f"undeclared label {item[0]!r}") from None
        values[k] = c
    return Functional(values, name, default=default)


def parse_instance(data: Any, name: str = "instance", window: int | None = None) -> Instance:
    if not isinstance(data, dict):
        raise InstanceError("$", "expected a JSON object")
    scal = data.get("scalars", "rational")
    if scal != "rational":
        raise InstanceError("$.scalars", "only \"rational\" is supported")
    A = _parse_algebra(_get(data, "algebra", "$", dict), window)
    cop = _parse_coproduct(_get(data, "coproduct", "$", dict), A)
    functionals = {}
    for fname, items in (_get(data, "functionals", "$", dict, required=False) or {}).items():
        functionals[fname] = _parse_functional(fname, items, A)
    integrals = _get(data, "integrals", "$", dict, required=False) or {}
    sides = {}
    for side in ("left", "right"):
        names = integrals.get(side, [])
        if not isinstance(names, list):
            raise InstanceError(f"$.integrals.{side}", "expected a list of names")
        for i, nm in enumerate(names):
            if nm not in functionals:
                raise InstanceError(f"$.integrals.{side}[{i}]", f"unknown functional {nm!r}")
        sides[side] = list(names)
    E = _parse_E(data.get("E"), A)
    expect = data.get("expect")
    if expect is not None and not isinstance(expect, str):
        raise InstanceError("$.expect", "expected a verdict string")
    oracle = data.get("oracle") or {}
    if not isinstance(oracle, dict):
        raise InstanceError("$.oracle", "expected an object")
    return Instance(data.get("name", name), A, cop, functionals, sides["left"], sides["right"], E, expect,
                    oracle, window, data)


def _parse_E(spec, A: Algebra) -> Vec | str | None:
    path = "$.E"
    if spec is None:
        return None
    if spec == "derive":
        return "derive"
    if not (A.is_dense and A.unit is not None):
        raise InstanceError(path, "E needs a unital dense algebra")
    if not isinstance(spec, dict):
        raise InstanceError(path, "expected \"derive\" or an object with action tables")
    n = A.dim
    if "element" in spec:
        return _pair_coeffs(spec["element"], n, f"{path}.element")
    left, right = _parse_tables(spec, n, path)

    from .algebra import TensorAlgebra

    AA = TensorAlgebra(A, 2)

    def act(tab):
        def f(x):
            out: Vec = {}
            for key, c in x.items():
                for k2, v in tab.get(key, {}).items():
                    out[k2] = out.get(k2, Fraction(0)) + c * v
            return {k: v for k, v in out.items() if v}
        return f
    if set(left) - {0} or set(right) - {0}:
        raise InstanceError(path, "E tables use index 0 for the single multiplier")
    m = Multiplier(AA, act(left.get(0, {})), act(right.get(0, {})))
    e = multiplier_as_element(m, verify=True)
    if e is None:
        raise InstanceError(path, "action tables do not describe an element of A (x) A")
    return e


def load_instance(path: str, window: int | None = None) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as err:
        raise InstanceError(f"{path}:{err.lineno}:{err.colno}", err.msg) from None
    except OSError as err:
        raise InstanceError(path, err.strerror or str(err)) from None
    return parse_instance(data, name=os.path.splitext(os.path.basename(path))[0], window=window)


# --------------------------------------------------------------- serializing

def pair_entries(x: Vec) -> list:
    return [[[i, j], format_scalar(c)] for (i, j), c in sorted(x.items())]


def E_tables(A: DenseAlgebra, E: Vec) -> dict:
    """E as action tables on basis pairs (single multiplier stored under index 0)."""
    from .algebra import TensorAlgebra
    AA = TensorAlgebra(A, 2)
    left, right = [], []
    for y in AA.window():
        lv = AA.multiply(E, {y: ONE})
        rv = AA.multiply({y: ONE}, E)
        if lv:
            left.append([0, list(y), pair_entries(lv)])
        if rv:
            right.append([0, list(y), pair_entries(rv)])
    return {"leftAction": left, "rightAction": right}


def coproduct_tables(cop: Coproduct) -> dict:
    left, right = action_tables(cop)
    return {
        "kind": "explicit",
        "leftAction": [[i, list(y), pair_entries(v)] for i in sorted(left) for y, v in sorted(left[i].items())],
        "rightAction": [[i, list(y), pair_entries(v)] for i in sorted(right) for y, v in sorted(right[i].items())],
    }


def dense_algebra_spec(A: DenseAlgebra) -> dict:
    products = []
    for (i, j), v in sorted(A.table().items()):
        products.append([i, j, [[k, format_scalar(c)] for k, c in sorted(v.items())]])
    spec = {"kind": "dense", "basis": list(A.labels), "products": products}
    if A.unit is not None:
        spec["unit"] = [format_scalar(A.unit.get(k, Fraction(0))) for k in range(A.dim)]
    return spec


def functional_spec(A: Algebra, f: Functional) -> list:
    out = [[A.label(k), format_scalar(v)] for k, v in sorted(f.values.items())]
    if f.default:
        out.append(["*", format_scalar(f.default)])
    return out


def dumps(data: dict) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
