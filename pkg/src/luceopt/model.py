"""Core data model for two-stage Luce choice.

A market is a set of products with strictly positive attractiveness, an
outside option with attractiveness ``a0 >= 0``, and a strict partial order
("dominance") over the products.  Offered an assortment ``S``, customers
first discard every product dominated by another member of ``S`` (the
survivors form the consideration set ``c(S)``) and then choose among the
survivors with multinomial-logit probabilities.  With an empty dominance
relation the model collapses to the plain MNL.

The threshold variant ties dominance to attractiveness: ``x`` dominates
``y`` exactly when ``a_x > (1 + t) * a_y`` for a fixed threshold ``t > 0``.
The price-dependent variant used by the pricing solvers replaces the fixed
attractiveness with ``exp(u_i - p_i)`` for intrinsic utilities ``u_i``.

Everything here is immutable after construction and all operations are pure
functions, so instances can be shared freely across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import CycleError, IdOutOfRange, NonPositiveInput, SchemaError

__all__ = [
    "Product",
    "DominanceRelation",
    "Instance",
    "PricedInstance",
    "PriceVector",
    "validate_partial_order",
    "threshold_dominance",
    "consideration_set",
    "choice_probability",
    "expected_revenue",
    "priced_attractiveness",
    "consideration_set_priced",
    "expected_revenue_priced",
    "is_valid_pair",
    "parse_instance",
    "parse_priced_instance",
    "instance_to_dict",
    "load_instance",
    "dump_instance",
]

# Relative guard band for price-dependent dominance comparisons.  Boundary
# price vectors are constructed so that the extreme attractiveness ratio is
# exactly 1 + t; without the band, one ulp of exp() rounding could flip such
# a product into dominated.  Exact ties still produce no edge.
_PRICED_DOMINANCE_RTOL = 1e-12

#: Prices are plain sequences of floats; ``math.inf`` marks "not offered".
PriceVector = Sequence[float]


@dataclass(frozen=True)
class Product:
    """A sellable item: 1-based id, unit revenue, and attractiveness."""

    id: int
    revenue: float
    attractiveness: float

    def __post_init__(self) -> None:
        if self.id < 1:
            raise IdOutOfRange(f"product id must be >= 1, got {self.id}")
        if self.revenue < 0:
            raise NonPositiveInput(f"revenue must be >= 0, got {self.revenue}")
        if not self.attractiveness > 0:
            raise NonPositiveInput(
                f"attractiveness must be > 0, got {self.attractiveness}"
            )


class DominanceRelation:
    """A strict partial order over products ``1..n``.

    Stores the original edge set together with its transitive closure and
    transitive reduction.  ``(x, y)`` means ``x`` dominates ``y``.  Use
    :func:`validate_partial_order` or :func:`threshold_dominance` to build
    one; the constructor assumes ``closure`` is already a valid strict
    partial order.
    """

    __slots__ = ("n", "edges", "closure", "reduction", "_dominators")

    def __init__(
        self,
        n: int,
        edges: frozenset[tuple[int, int]],
        closure: frozenset[tuple[int, int]],
        reduction: frozenset[tuple[int, int]],
    ) -> None:
        self.n = n
        self.edges = edges
        self.closure = closure
        self.reduction = reduction
        dominators: list[set[int]] = [set() for _ in range(n + 1)]
        for x, y in closure:
            dominators[y].add(x)
        self._dominators = tuple(frozenset(s) for s in dominators)

    def dominators_of(self, y: int) -> frozenset[int]:
        """Products that dominate ``y`` (under the closure)."""
        return self._dominators[y]

    def dominates(self, x: int, y: int) -> bool:
        return (x, y) in self.closure

    def is_antichain(self, subset: Iterable[int]) -> bool:
        s = set(subset)
        return all(not (self._dominators[y] & s) for y in s)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DominanceRelation):
            return NotImplemented
        return self.n == other.n and self.closure == other.closure

    def __hash__(self) -> int:
        return hash((self.n, self.closure))

    def __repr__(self) -> str:
        return f"DominanceRelation(n={self.n}, edges={sorted(self.reduction)})"


def validate_partial_order(
    edges: Iterable[tuple[int, int]], n: int
) -> DominanceRelation:
    """Build a :class:`DominanceRelation` from raw edges.

    The input may or may not be transitively closed; the closure is computed
    here and then checked for irreflexivity and antisymmetry.  Self-loops,
    2-cycles and longer cycles all surface as a :class:`CycleError` because
    any cycle puts some ``(x, x)`` into the closure.

    Raises
    ------
    IdOutOfRange
        if an edge endpoint is outside ``1..n``.
    CycleError
        if the closure is not a strict partial order.
    """
    edge_set = frozenset((int(x), int(y)) for x, y in edges)
    for x, y in edge_set:
        if not (1 <= x <= n) or not (1 <= y <= n):
            raise IdOutOfRange(f"edge ({x}, {y}) references ids outside 1..{n}")

    succ: dict[int, set[int]] = {i: set() for i in range(1, n + 1)}
    for x, y in edge_set:
        succ[x].add(y)

    closure: set[tuple[int, int]] = set()
    for start in range(1, n + 1):
        seen: set[int] = set()
        stack = list(succ[start])
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(succ[v])
        if start in seen:
            raise CycleError(f"product {start} reaches itself; not a strict order")
        closure.update((start, v) for v in seen)

    closure_f = frozenset(closure)
    reduction = _transitive_reduction(closure_f)
    return DominanceRelation(n, edge_set, closure_f, reduction)


def _transitive_reduction(
    closure: frozenset[tuple[int, int]]
) -> frozenset[tuple[int, int]]:
    succ: dict[int, set[int]] = {}
    for x, y in closure:
        succ.setdefault(x, set()).add(y)
    reduction = set()
    for x, y in closure:
        if not any(y in succ.get(z, ()) for z in succ[x] if z != y):
            reduction.add((x, y))
    return frozenset(reduction)


def threshold_dominance(
    attractiveness: Sequence[float], t: float
) -> DominanceRelation:
    """Dominance induced by an attractiveness threshold.

    ``x`` dominates ``y`` iff ``a_x > (1 + t) * a_y`` (strict; a ratio of
    exactly ``1 + t`` produces no edge).  The result is automatically
    transitive, antisymmetric and irreflexive, but it is still passed
    through :func:`validate_partial_order` as a safety net.
    """
    if not t > 0:
        raise NonPositiveInput(f"threshold t must be > 0, got {t}")
    if any(not a > 0 for a in attractiveness):
        raise NonPositiveInput("all attractiveness values must be > 0")
    n = len(attractiveness)
    factor = 1.0 + t
    edges = {
        (i, j)
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if i != j and attractiveness[i - 1] > factor * attractiveness[j - 1]
    }
    return validate_partial_order(edges, n)


@dataclass(frozen=True)
class Instance:
    """Products, an outside option, and a dominance relation."""

    products: tuple[Product, ...]
    a0: float
    dominance: DominanceRelation

    def __post_init__(self) -> None:
        ids = sorted(p.id for p in self.products)
        if ids != list(range(1, len(self.products) + 1)):
            raise IdOutOfRange("product ids must be exactly 1..n")
        if list(ids) != [p.id for p in self.products]:
            object.__setattr__(
                self, "products", tuple(sorted(self.products, key=lambda p: p.id))
            )
        if self.a0 < 0:
            raise NonPositiveInput(f"a0 must be >= 0, got {self.a0}")
        if self.dominance.n != len(self.products):
            raise IdOutOfRange(
                f"dominance is over {self.dominance.n} products, "
                f"instance has {len(self.products)}"
            )

    @property
    def n(self) -> int:
        return len(self.products)

    def revenue(self, i: int) -> float:
        return self.products[i - 1].revenue

    def attractiveness(self, i: int) -> float:
        return self.products[i - 1].attractiveness

    @property
    def ids(self) -> range:
        return range(1, self.n + 1)


def make_instance(
    revenues: Sequence[float],
    attractiveness: Sequence[float],
    a0: float,
    dominance: DominanceRelation,
) -> Instance:
    """Convenience constructor from parallel value lists."""
    products = tuple(
        Product(i + 1, float(r), float(a))
        for i, (r, a) in enumerate(zip(revenues, attractiveness))
    )
    return Instance(products, float(a0), dominance)


def consideration_set(S: Iterable[int], inst: Instance) -> frozenset[int]:
    """Undominated elements of ``S``; the support of the choice distribution.

    Idempotent: ``consideration_set(consideration_set(S)) == ...(S)``.
    """
    s = frozenset(S)
    rel = inst.dominance
    return frozenset(x for x in s if not (rel.dominators_of(x) & s))


def choice_probability(x: int, S: Iterable[int], inst: Instance) -> float:
    """Probability of choosing ``x`` (or the outside option for ``x == 0``)
    from assortment ``S``.

    Dominated members of ``S`` have probability zero; survivors split the
    market proportionally to attractiveness, against ``a0``.
    """
    c = consideration_set(S, inst)
    denom = sum(inst.attractiveness(y) for y in c) + inst.a0
    if x == 0:
        return inst.a0 / denom if denom > 0 else 0.0
    if x not in c:
        return 0.0
    return inst.attractiveness(x) / denom


def expected_revenue(S: Iterable[int], inst: Instance) -> float:
    """Expected per-customer revenue of offering ``S``.

    Invariant: only the consideration set matters, so the value equals the
    expected revenue of ``consideration_set(S)``.  Empty offers earn 0.
    """
    c = consideration_set(S, inst)
    if not c:
        return 0.0
    denom = sum(inst.attractiveness(y) for y in c) + inst.a0
    if denom <= 0.0:
        return 0.0
    num = sum(inst.revenue(y) * inst.attractiveness(y) for y in c)
    return num / denom


# ---------------------------------------------------------------------------
# Price-dependent variant (threshold dominance over exp(u_i - p_i))
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PricedInstance:
    """Products described by intrinsic utilities, with threshold dominance.

    ``utilities`` must be sorted non-increasing (the conventional indexing
    for the pricing results: product 1 has the highest intrinsic utility).
    Attractiveness under a price vector ``p`` is ``exp(u_i - p_i)``.
    """

    utilities: tuple[float, ...]
    t: float
    a0: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "utilities", tuple(float(u) for u in self.utilities))
        if not self.t > 0:
            raise NonPositiveInput(f"threshold t must be > 0, got {self.t}")
        if self.a0 < 0:
            raise NonPositiveInput(f"a0 must be >= 0, got {self.a0}")
        u = self.utilities
        if any(u[i] < u[i + 1] for i in range(len(u) - 1)):
            raise SchemaError("utilities must be sorted non-increasing")

    @property
    def n(self) -> int:
        return len(self.utilities)


def priced_attractiveness(i: int, p: PriceVector, inst: PricedInstance) -> float:
    """``exp(u_i - p_i)``; zero for an infinite price."""
    price = p[i - 1]
    if math.isinf(price):
        return 0.0
    return math.exp(inst.utilities[i - 1] - price)


def consideration_set_priced(
    S: Iterable[int], p: PriceVector, inst: PricedInstance
) -> frozenset[int]:
    """Undominated elements of ``S`` under price-dependent attractiveness."""
    s = sorted(set(S))
    att = {i: priced_attractiveness(i, p, inst) for i in s}
    factor = (1.0 + inst.t) * (1.0 + _PRICED_DOMINANCE_RTOL)
    if not att:
        return frozenset()
    top = max(att.values())
    return frozenset(j for j in s if not top > factor * att[j])


def expected_revenue_priced(
    S: Iterable[int], p: PriceVector, inst: PricedInstance
) -> float:
    """Expected revenue with prices playing the role of unit revenues."""
    c = consideration_set_priced(S, p, inst)
    if not c:
        return 0.0
    att = {i: priced_attractiveness(i, p, inst) for i in c}
    denom = sum(att.values()) + inst.a0
    if denom <= 0.0:
        return 0.0
    return sum(p[i - 1] * att[i] for i in c) / denom


def is_valid_pair(S: Iterable[int], p: PriceVector, inst: PricedInstance) -> bool:
    """True iff ``S`` is exactly the finitely-priced set and no member of
    ``S`` is dominated, i.e. the pair prices precisely what survives."""
    s = frozenset(S)
    finite = frozenset(i for i in range(1, inst.n + 1) if not math.isinf(p[i - 1]))
    if s != finite:
        return False
    return consideration_set_priced(s, p, inst) == s


# ---------------------------------------------------------------------------
# JSON instance schema
# ---------------------------------------------------------------------------

_TOP_KEYS = {"products", "a0", "dominance"}
_PRODUCT_KEYS = {"id", "revenue", "attractiveness", "utility"}


def _check_keys(obj: Mapping, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(f"unknown fields {sorted(unknown)} in {where}")


def _parse_common(obj: Mapping) -> tuple[list[dict], float, Mapping]:
    if not isinstance(obj, Mapping):
        raise SchemaError("instance document must be a JSON object")
    _check_keys(obj, _TOP_KEYS, "instance")
    try:
        products = list(obj["products"])
        a0 = float(obj["a0"])
        dominance = obj["dominance"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"missing or malformed required field: {exc}") from exc
    for prod in products:
        if not isinstance(prod, Mapping):
            raise SchemaError("each product must be a JSON object")
        _check_keys(prod, _PRODUCT_KEYS, "product")
        for key in ("id", "revenue", "attractiveness"):
            if key not in prod:
                raise SchemaError(f"product missing required field '{key}'")
    if not isinstance(dominance, Mapping):
        raise SchemaError("'dominance' must be a JSON object")
    return products, a0, dominance


def _parse_dominance(dom: Mapping, attractiveness: Sequence[float]) -> DominanceRelation:
    dtype = dom.get("type")
    if dtype == "explicit":
        _check_keys(dom, {"type", "edges"}, "dominance")
        edges = dom.get("edges", [])
        try:
            pairs = [(int(x), int(y)) for x, y in edges]
        except (TypeError, ValueError) as exc:
            raise SchemaError("'edges' must be a list of [x, y] pairs") from exc
        return validate_partial_order(pairs, len(attractiveness))
    if dtype == "threshold":
        _check_keys(dom, {"type", "t"}, "dominance")
        if "t" not in dom:
            raise SchemaError("threshold dominance requires field 't'")
        return threshold_dominance(attractiveness, float(dom["t"]))
    raise SchemaError(f"dominance type must be 'explicit' or 'threshold', got {dtype!r}")


def parse_instance(obj: Mapping) -> Instance:
    """Build an :class:`Instance` from a decoded JSON object.

    Schema: ``{"products": [{"id", "revenue", "attractiveness",
    "utility"?}], "a0": float, "dominance": {"type": "explicit", "edges":
    [[x, y], ...]} | {"type": "threshold", "t": float}}``.  Unknown fields
    are rejected.
    """
    raw_products, a0, dominance = _parse_common(obj)
    raw_products.sort(key=lambda prod: int(prod["id"]))
    products = tuple(
        Product(int(prod["id"]), float(prod["revenue"]), float(prod["attractiveness"]))
        for prod in raw_products
    )
    ids = [prod.id for prod in products]
    if ids != list(range(1, len(products) + 1)):
        raise SchemaError(f"product ids must be exactly 1..n, got {ids}")
    rel = _parse_dominance(dominance, [prod.attractiveness for prod in products])
    return Instance(products, a0, rel)


def parse_priced_instance(obj: Mapping) -> PricedInstance:
    """Build a :class:`PricedInstance` from the same JSON schema.

    Requires every product to carry a ``utility`` field and the dominance to
    be of threshold type (that supplies ``t``).  Utilities must already be
    non-increasing in id order.
    """
    raw_products, a0, dominance = _parse_common(obj)
    raw_products.sort(key=lambda prod: int(prod["id"]))
    if dominance.get("type") != "threshold":
        raise SchemaError("pricing requires threshold dominance (field 't')")
    _check_keys(dominance, {"type", "t"}, "dominance")
    utilities = []
    for prod in raw_products:
        if "utility" not in prod:
            raise SchemaError(f"product {prod['id']} has no 'utility' field")
        utilities.append(float(prod["utility"]))
    return PricedInstance(tuple(utilities), float(dominance["t"]), a0)


def instance_to_dict(inst: Instance, utilities: Sequence[float] | None = None) -> dict:
    """Serialize an instance back to the JSON schema (explicit edges use the
    transitive reduction; the closure is rebuilt on load)."""
    products = []
    for i, prod in enumerate(inst.products):
        entry = {
            "id": prod.id,
            "revenue": prod.revenue,
            "attractiveness": prod.attractiveness,
        }
        if utilities is not None:
            entry["utility"] = float(utilities[i])
        products.append(entry)
    return {
        "products": products,
        "a0": inst.a0,
        "dominance": {
            "type": "explicit",
            "edges": [list(e) for e in sorted(inst.dominance.reduction)],
        },
    }


def load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(json.load(fh))


def dump_instance(
    inst: Instance, path: str, utilities: Sequence[float] | None = None
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst, utilities), fh, indent=2, sort_keys=True)
        fh.write("\n")
