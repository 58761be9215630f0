"""Capacitated assortment optimization.

With a cardinality cap the problem is NP-hard in general, so this module
offers an exact enumerator (guarded) plus polynomial algorithms for the two
tractable structures:

* dominance whose transitive reduction is a forest: a two-level dynamic
  program over the tree computes the best antichain of each size, and the
  Dinkelbach driver turns that into the fractional optimum;
* attractiveness-correlated dominance (dominance implies higher
  attractiveness, and anything more attractive than a dominator also
  dominates): fixing the most attractive offered product k reduces the
  search to a dominance-free pool X_k, i.e. one capacitated MNL problem
  per k.

``solve_capacitated_auto`` dispatches in that order and refuses large
unstructured instances instead of silently approximating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .assortment import AssortmentSolution, DEFAULT_EPS, _best_singleton, _dinkelbach
from .errors import NotAttractivenessCorrelated, NotATree, ProblemTooLarge, TooLarge
from .model import DominanceRelation, Instance, expected_revenue

__all__ = [
    "CapacitatedProblem",
    "solve_capacitated_bruteforce",
    "is_forest_reducible",
    "tree_dp_max_att",
    "solve_capacitated_tree",
    "is_attractiveness_correlated",
    "solve_capacitated_mnl",
    "solve_capacitated_attcorr",
    "solve_capacitated_auto",
]

BRUTE_FORCE_MAX_N = 22


@dataclass(frozen=True)
class CapacitatedProblem:
    """An instance together with a cardinality cap ``1 <= capacity <= n``."""

    instance: Instance
    capacity: int

    def __post_init__(self) -> None:
        if not 1 <= self.capacity <= self.instance.n:
            raise ValueError(
                f"capacity must be in 1..{self.instance.n}, got {self.capacity}"
            )


def solve_capacitated_bruteforce(prob: CapacitatedProblem) -> AssortmentSolution:
    """Exact optimum over all antichains of size <= capacity (n <= 22)."""
    from .oracles import brute_force_assortment  # local import avoids a cycle

    inst = prob.instance
    if inst.n > BRUTE_FORCE_MAX_N:
        raise TooLarge(
            f"brute force capped at n={BRUTE_FORCE_MAX_N}, got {inst.n}"
        )
    result = brute_force_assortment(inst, capacity=prob.capacity, antichains_only=True)
    return AssortmentSolution(tuple(result.optimizer), result.value, 1, 0.0)


# ---------------------------------------------------------------------------
# Forest-reducible dominance
# ---------------------------------------------------------------------------


def is_forest_reducible(rel: DominanceRelation) -> tuple[bool, list[int] | None]:
    """Check whether the transitive reduction is a forest.

    Returns ``(True, parents)`` where ``parents[i]`` is the unique direct
    dominator of product ``i`` (0 for roots; index 0 unused), or
    ``(False, None)`` when some product has two direct dominators.
    """
    parents = [0] * (rel.n + 1)
    for x, y in rel.reduction:
        if parents[y] != 0:
            return False, None
        parents[y] = x
    return True, parents


def tree_dp_max_att(
    rel: DominanceRelation,
    weights: Sequence[float],
    capacity: int,
) -> tuple[float, frozenset[int]]:
    """Maximum-weight antichain of size <= capacity in a forest order.

    A virtual zero-weight root dominating every real root makes the forest
    a single tree.  Negative-weight products can never help, so they are
    spliced out with their children promoted to the grandparent (ancestor
    relations among survivors are unchanged).  Two tables drive the DP:
    the best value within one product's subtree, and the best value over a
    combined list of sibling subtrees, split across the capacity.
    """
    ok, parents = is_forest_reducible(rel)
    if not ok:
        raise NotATree("transitive reduction has a node with two direct dominators")
    n = rel.n
    if capacity < 0:
        raise ValueError(f"capacity must be >= 0, got {capacity}")
    if n == 0 or capacity == 0:
        return 0.0, frozenset()

    w = [0.0] + [float(x) for x in weights]  # index 0 is the virtual root
    children: list[list[int]] = [[] for _ in range(n + 1)]
    for v in range(1, n + 1):
        children[parents[v]].append(v)

    # Splice out negative-weight nodes, promoting their children.
    def kept_children(v: int) -> list[int]:
        out: list[int] = []
        stack = list(children[v])
        while stack:
            c = stack.pop()
            if w[c] < 0:
                stack.extend(children[c])
            else:
                out.append(c)
        # Larger weights first; ties by id for determinism.
        out.sort(key=lambda c: (-w[c], c))
        return out

    C = capacity
    table: dict[int, list[float]] = {}
    pick: dict[int, list[tuple[str, object]]] = {}

    # Iterative post-order over the pruned tree rooted at the virtual node.
    order: list[int] = []
    kids: dict[int, list[int]] = {}
    stack = [0]
    while stack:
        v = stack.pop()
        order.append(v)
        kids[v] = kept_children(v)
        stack.extend(kids[v])

    for v in reversed(order):
        # Combine the children subtrees one at a time: comb[c] is the best
        # value using the first j subtrees with total size <= c.
        comb = [0.0] * (C + 1)
        comb_split: list[list[tuple[int, int]]] = [[] for _ in range(C + 1)]
        for child in kids[v]:
            child_tab = table[child]
            new = [0.0] * (C + 1)
            new_split: list[list[tuple[int, int]]] = [[] for _ in range(C + 1)]
            for c in range(C + 1):
                best, best_q = -math.inf, 0
                for q in range(c + 1):
                    val = comb[c - q] + child_tab[q]
                    if val > best:
                        best, best_q = val, q
                new[c] = best
                new_split[c] = comb_split[c - best_q] + [(child, best_q)]
            comb, comb_split = new, new_split
        tab = [0.0] * (C + 1)
        choice: list[tuple[str, object]] = [("none", None)] * (C + 1)
        for c in range(1, C + 1):
            if v != 0 and w[v] > comb[c]:
                tab[c] = w[v]
                choice[c] = ("self", None)
            else:
                tab[c] = comb[c]
                choice[c] = ("children", comb_split[c])
        table[v] = tab
        pick[v] = choice

    chosen: set[int] = set()
    todo: list[tuple[int, int]] = [(0, C)]
    while todo:
        v, c = todo.pop()
        kind, payload = pick[v][c]
        if kind == "self":
            chosen.add(v)
        elif kind == "children":
            todo.extend((child, q) for child, q in payload if q > 0)  # type: ignore[union-attr]
    return table[0][C], frozenset(chosen)


def solve_capacitated_tree(
    prob: CapacitatedProblem,
    eps: float = DEFAULT_EPS,
    trace: list[float] | None = None,
) -> AssortmentSolution:
    """Fractional driver over the tree DP (forest-reducible dominance)."""
    inst = prob.instance
    ok, _ = is_forest_reducible(inst.dominance)
    if not ok:
        raise NotATree("dominance reduction is not a forest")
    rev = [p.revenue for p in inst.products]
    att = [p.attractiveness for p in inst.products]

    def subproblem(lam: float) -> tuple[frozenset[int], float]:
        weights = [(r - lam) * a for r, a in zip(rev, att)]
        value, chosen = tree_dp_max_att(inst.dominance, weights, prob.capacity)
        return chosen, value

    start_set, start_lam = _best_singleton(
        [r * a for r, a in zip(rev, att)], att, inst.a0
    )
    chosen, lam, iterations, gap = _dinkelbach(
        subproblem,
        lambda S: expected_revenue(S, inst),
        start_set,
        start_lam,
        inst.a0,
        eps,
        trace,
    )
    return AssortmentSolution(tuple(sorted(chosen)), lam, iterations, gap)


# ---------------------------------------------------------------------------
# Attractiveness-correlated dominance
# ---------------------------------------------------------------------------


def is_attractiveness_correlated(inst: Instance) -> bool:
    """Both structure conditions on the closure:

    1. a dominator is strictly more attractive than what it dominates;
    2. anything strictly more attractive than a dominator of y also
       dominates y.

    Threshold-induced instances always satisfy both.
    """
    rel = inst.dominance
    att = [p.attractiveness for p in inst.products]
    for x, y in rel.closure:
        if not att[x - 1] > att[y - 1]:
            return False
    for x, y in rel.closure:
        ax = att[x - 1]
        for z in inst.ids:
            if att[z - 1] > ax and (z, y) not in rel.closure:
                return False
    return True


def solve_capacitated_mnl(
    products: Sequence[tuple[float, float]],
    a0: float,
    capacity: int,
    eps: float = DEFAULT_EPS,
) -> AssortmentSolution:
    """Capacitated assortment under the plain MNL (no dominance).

    Dinkelbach again: for a guess ``lam`` the subproblem just keeps the at
    most ``capacity`` largest strictly positive values of
    ``(r_i - lam) a_i``.  Positions in ``products`` are reported 1-based.
    """
    m = len(products)
    if m == 0:
        return AssortmentSolution((), 0.0, 0, 0.0)
    if capacity < 1:
        raise ValueError(f"capacity must be >= 1, got {capacity}")
    rev = [r for r, _ in products]
    att = [a for _, a in products]

    def subproblem(lam: float) -> tuple[frozenset[int], float]:
        weights = [((r - lam) * a, i) for i, (r, a) in enumerate(zip(rev, att), 1)]
        weights.sort(key=lambda t: (-t[0], t[1]))
        chosen = [i for wgt, i in weights[:capacity] if wgt > 0.0]
        return frozenset(chosen), sum(max(wgt, 0.0) for wgt, _ in weights[:capacity])

    def mnl_value(S: frozenset[int]) -> float:
        denom = sum(att[i - 1] for i in S) + a0
        if denom <= 0:
            return 0.0
        return sum(rev[i - 1] * att[i - 1] for i in S) / denom

    start_set, start_lam = _best_singleton(
        [r * a for r, a in zip(rev, att)], att, a0
    )
    chosen, lam, iterations, gap = _dinkelbach(
        subproblem, mnl_value, start_set, start_lam, a0, eps
    )
    return AssortmentSolution(tuple(sorted(chosen)), lam, iterations, gap)


def solve_capacitated_attcorr(
    prob: CapacitatedProblem, eps: float = DEFAULT_EPS
) -> AssortmentSolution:
    """Capacitated optimum for attractiveness-correlated instances.

    For each product k, the pool ``X_k = {i : a_i <= a_k and k does not
    dominate i}`` contains every assortment whose most attractive member is
    k; correlation makes X_k dominance-free, so each pool is one
    capacitated MNL solve and the best pool wins (smallest k on ties).

    Exact ties in attractiveness can leave dominance edges inside a pool
    (the reduction's tie-break gap); such instances fall back to brute
    force when small enough and are refused otherwise.
    """
    inst = prob.instance
    if not is_attractiveness_correlated(inst):
        raise NotAttractivenessCorrelated(
            "instance fails the attractiveness-correlation conditions"
        )
    att = [p.attractiveness for p in inst.products]
    rel = inst.dominance

    pools: list[list[int]] = []
    clean = True
    for k in inst.ids:
        pool = [
            i
            for i in inst.ids
            if att[i - 1] <= att[k - 1] and not rel.dominates(k, i)
        ]
        pools.append(pool)
        pool_set = set(pool)
        if any((rel.dominators_of(i) & pool_set) for i in pool):
            clean = False
    if not clean:
        if inst.n <= BRUTE_FORCE_MAX_N:
            return solve_capacitated_bruteforce(prob)
        raise TooLarge(
            "attractiveness ties leave dominance inside a candidate pool; "
            f"exact fallback capped at n={BRUTE_FORCE_MAX_N}"
        )

    best: AssortmentSolution | None = None
    best_ids: tuple[int, ...] = ()
    for k, pool in zip(inst.ids, pools):
        sub = [(inst.revenue(i), inst.attractiveness(i)) for i in pool]
        sol = solve_capacitated_mnl(sub, inst.a0, prob.capacity, eps)
        ids = tuple(sorted(pool[j - 1] for j in sol.assortment))
        if best is None or sol.revenue > best.revenue:
            best = sol
            best_ids = ids
    assert best is not None
    return AssortmentSolution(best_ids, best.revenue, best.iterations, best.certificate_gap)


def solve_capacitated_auto(
    prob: CapacitatedProblem, eps: float = DEFAULT_EPS
) -> tuple[AssortmentSolution, str]:
    """Dispatch: forest DP, then attractiveness-correlated, then brute
    force, else refuse (the general problem is NP-hard, so no inexact
    fallback is offered).  Returns the solution and the method name."""
    inst = prob.instance
    ok, _ = is_forest_reducible(inst.dominance)
    if ok:
        return solve_capacitated_tree(prob, eps), "tree"
    if is_attractiveness_correlated(inst):
        return solve_capacitated_attcorr(prob, eps), "attcorr"
    if inst.n <= BRUTE_FORCE_MAX_N:
        return solve_capacitated_bruteforce(prob), "bruteforce"
    raise ProblemTooLarge(
        f"no exact method for unstructured capacitated instances with n={inst.n}"
    )
