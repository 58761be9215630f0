"""Random instance generation and the gap benchmark pipelines.

Instances are generated from a counter-based RNG so that any run is
reproducible from ``(seed, cell, index)`` alone: the bit generator is
Philox4x64-10 with ``key = (seed, cell)`` and ``counter = (index, 0, 0,
0)``, and each instance consumes draws in a fixed documented order.  The
report header records this so results can be regenerated elsewhere.

The assortment pipeline compares the revenue-ordered baseline against the
exact solver; the pricing pipeline compares the fixed-price and
quasi-same-price policies against the exact joint solver.  Published gap
tables of this kind are sample statistics over unseeded draws, so the
benchmark asserts per-instance dominance and directional trends rather
than specific historical numbers.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .assortment import revenue_ordered_heuristic, solve_assortment_2slm
from .errors import SchemaError
from .model import (
    Instance,
    PricedInstance,
    make_instance,
    validate_partial_order,
)
from .pricing import fixed_price_policy, quasi_same_price_policy, solve_japtlm

__all__ = [
    "RNG_SPEC",
    "AssortmentExperimentConfig",
    "PricingExperimentConfig",
    "StrategyStats",
    "GapRow",
    "generate_assortment_instance",
    "generate_pricing_instance",
    "generate_tree_instance",
    "run_assortment_benchmark",
    "run_pricing_benchmark",
    "emit_report",
    "parse_benchmark_config",
    "run_config",
]

RNG_SPEC = "philox4x64-10 key=(seed,cell) counter=(index,0,0,0)"


def _rng(seed: int, cell: int, index: int) -> np.random.Generator:
    bitgen = np.random.Philox(
        key=np.array([seed, cell], dtype=np.uint64),
        counter=np.array([index, 0, 0, 0], dtype=np.uint64),
    )
    return np.random.Generator(bitgen)


def _worker_count() -> int:
    raw = os.environ.get("LUCEOPT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_ordered(fn: Callable, items: Sequence) -> list:
    workers = _worker_count()
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class AssortmentExperimentConfig:
    """One benchmark cell: n products, outside option a0, edge density d.

    ``cell`` is the stream id used for RNG splitting (the cell's position
    in a config file; 0 for standalone generation).
    """

    n: int
    a0: float
    d: float
    count: int
    seed: int
    cell: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.d <= 1.0:
            raise ValueError(f"density must be in [0, 1], got {self.d}")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")

    @property
    def label(self) -> str:
        return f"({self.n},{_fmt_num(self.a0)},{_fmt_num(self.d)})"


@dataclass(frozen=True)
class PricingExperimentConfig:
    """One pricing cell: n products, threshold t, outside option a0."""

    n: int
    t: float
    a0: float
    count: int
    seed: int
    cell: int = 0

    def __post_init__(self) -> None:
        if not self.t > 0:
            raise ValueError(f"threshold t must be > 0, got {self.t}")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")

    @property
    def label(self) -> str:
        return f"({self.n},{_fmt_num(self.t)},{_fmt_num(self.a0)})"


def _fmt_num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else str(x)


def generate_assortment_instance(
    cfg: AssortmentExperimentConfig, index: int
) -> Instance:
    """Deterministic random instance for ``(cfg.seed, cfg.cell, index)``.

    Draw order: n revenues ~ U(0, 10), n attractiveness ~ U(0, 10), then
    one uniform per unordered pair (ascending lexicographic order).  A pair
    becomes a dominance edge with probability d, directed from the more
    attractive product to the less attractive one (exact ties get no edge,
    which keeps the sampled relation acyclic); the edge set is then
    transitively closed.
    """
    rng = _rng(cfg.seed, cfg.cell, index)
    n = cfg.n
    revenues = rng.uniform(0.0, 10.0, n)
    attractiveness = rng.uniform(0.0, 10.0, n)
    # U(0,10) never draws exactly 0, but clamp defensively: model requires > 0.
    attractiveness = np.maximum(attractiveness, 1e-12)
    pair_draws = rng.random(n * (n - 1) // 2)
    edges = []
    idx = 0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if pair_draws[idx] < cfg.d:
                ai, aj = attractiveness[i - 1], attractiveness[j - 1]
                if ai > aj:
                    edges.append((i, j))
                elif aj > ai:
                    edges.append((j, i))
            idx += 1
    rel = validate_partial_order(edges, n)
    return make_instance(revenues, attractiveness, cfg.a0, rel)


def generate_pricing_instance(
    cfg: PricingExperimentConfig, index: int
) -> PricedInstance:
    """Utilities ~ U(0, 10) sorted non-increasing; t and a0 from the cell."""
    rng = _rng(cfg.seed, cfg.cell, index)
    utilities = np.sort(rng.uniform(0.0, 10.0, cfg.n))[::-1]
    return PricedInstance(tuple(utilities), cfg.t, cfg.a0)


def generate_tree_instance(
    n: int, a0: float, seed: int, index: int, cell: int = 0
) -> Instance:
    """Random instance whose dominance reduction is a forest (for the tree
    solver's randomized suites): each product's direct dominator is drawn
    uniformly among lower ids (0 meaning none)."""
    rng = _rng(seed, cell, index)
    revenues = rng.uniform(0.0, 10.0, n)
    attractiveness = np.maximum(rng.uniform(0.0, 10.0, n), 1e-12)
    edges = []
    for child in range(2, n + 1):
        parent = int(rng.integers(0, child))
        if parent >= 1:
            edges.append((parent, child))
    rel = validate_partial_order(edges, n)
    return make_instance(revenues, attractiveness, a0, rel)


@dataclass(frozen=True)
class StrategyStats:
    """Aggregates for one baseline strategy within a cell."""

    avg_gap_pct: float
    worst_gap_pct: float
    avg_cardinality: float


@dataclass(frozen=True)
class GapRow:
    """One report row: a cell label, per-baseline gap stats, and the exact
    solver's average assortment size."""

    label: str
    baselines: dict[str, StrategyStats] = field(default_factory=dict)
    optimal_avg_cardinality: float = 0.0


def _gap_pct(opt: float, base: float) -> float:
    if opt <= 0.0:
        return 0.0
    return 100.0 * (1.0 - base / opt)


def run_assortment_benchmark(
    cfg: AssortmentExperimentConfig,
    instances: Iterable[Instance] | None = None,
) -> GapRow:
    """Average/worst revenue-ordered gap over one cell.

    ``instances`` overrides generation (used by tests to benchmark
    hand-built examples); otherwise ``cfg.count`` instances are generated.
    """
    if instances is None:
        instances = [
            generate_assortment_instance(cfg, i) for i in range(cfg.count)
        ]
    else:
        instances = list(instances)

    def evaluate(inst: Instance) -> tuple[float, int, int]:
        opt = solve_assortment_2slm(inst)
        ro = revenue_ordered_heuristic(inst)
        return _gap_pct(opt.revenue, ro.revenue), len(ro.assortment), len(opt.assortment)

    rows = _map_ordered(evaluate, instances)
    gaps = [g for g, _, _ in rows]
    return GapRow(
        label=cfg.label,
        baselines={
            "RO": StrategyStats(
                float(np.mean(gaps)),
                float(np.max(gaps)),
                float(np.mean([c for _, c, _ in rows])),
            )
        },
        optimal_avg_cardinality=float(np.mean([c for _, _, c in rows])),
    )


def run_pricing_benchmark(
    cfg: PricingExperimentConfig,
    instances: Iterable[PricedInstance] | None = None,
) -> GapRow:
    """Fixed-price and quasi-same-price gaps against the exact joint solver."""
    if instances is None:
        instances = [generate_pricing_instance(cfg, i) for i in range(cfg.count)]
    else:
        instances = list(instances)

    def evaluate(inst: PricedInstance):
        opt = solve_japtlm(inst)
        fixed = fixed_price_policy(inst)
        quasi = quasi_same_price_policy(inst)
        return (
            _gap_pct(opt.revenue, fixed.revenue),
            _gap_pct(opt.revenue, quasi.revenue),
            fixed.k,
            quasi.k,
            opt.k,
        )

    rows = _map_ordered(evaluate, instances)
    fixed_gaps = [r[0] for r in rows]
    quasi_gaps = [r[1] for r in rows]
    return GapRow(
        label=cfg.label,
        baselines={
            "Fixed-Price": StrategyStats(
                float(np.mean(fixed_gaps)),
                float(np.max(fixed_gaps)),
                float(np.mean([r[2] for r in rows])),
            ),
            "Quasi-Same-Price": StrategyStats(
                float(np.mean(quasi_gaps)),
                float(np.max(quasi_gaps)),
                float(np.mean([r[3] for r in rows])),
            ),
        },
        optimal_avg_cardinality=float(np.mean([r[4] for r in rows])),
    )


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def _columns(rows: Sequence[GapRow]) -> list[str]:
    header = ["cell"]
    if rows:
        for name in rows[0].baselines:
            key = name.lower().replace("-", "_")
            header += [f"{key}_avg_gap_pct", f"{key}_worst_gap_pct", f"{key}_avg_cardinality"]
    header.append("optimal_avg_cardinality")
    return header


def _row_values(row: GapRow) -> list[str]:
    out = [row.label]
    for stats in row.baselines.values():
        out += [
            f"{stats.avg_gap_pct:.3f}",
            f"{stats.worst_gap_pct:.3f}",
            f"{stats.avg_cardinality:.3f}",
        ]
    out.append(f"{row.optimal_avg_cardinality:.3f}")
    return out


def emit_report(rows: Sequence[GapRow], fmt: str, path: str) -> str:
    """Write the gap table as CSV or Markdown (3-decimal fixed point).

    The header comment records the RNG specification so the numbers can be
    reproduced by any implementation of the same generator.
    """
    if fmt not in ("csv", "markdown"):
        raise ValueError(f"format must be 'csv' or 'markdown', got {fmt!r}")
    header = _columns(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if fmt == "csv":
            fh.write(f"# rng: {RNG_SPEC}\n")
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow(_row_values(row))
        else:
            fh.write(f"<!-- rng: {RNG_SPEC} -->\n")
            fh.write("| " + " | ".join(header) + " |\n")
            fh.write("|" + "|".join(["---"] * len(header)) + "|\n")
            for row in rows:
                fh.write("| " + " | ".join(_row_values(row)) + " |\n")
    return path


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------


def parse_benchmark_config(obj: Mapping) -> list:
    """Decode ``{"experiment": "assortment"|"pricing", "cells": [...],
    "count": int, "seed": int}`` into per-cell config objects."""
    if not isinstance(obj, Mapping):
        raise SchemaError("benchmark config must be a JSON object")
    unknown = set(obj) - {"experiment", "cells", "count", "seed"}
    if unknown:
        raise SchemaError(f"unknown fields {sorted(unknown)} in benchmark config")
    try:
        experiment = obj["experiment"]
        cells = list(obj["cells"])
        count = int(obj["count"])
        seed = int(obj["seed"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"missing or malformed config field: {exc}") from exc
    configs = []
    for pos, cell in enumerate(cells):
        if not isinstance(cell, Mapping):
            raise SchemaError("each cell must be a JSON object")
        if experiment == "assortment":
            unknown = set(cell) - {"n", "a0", "d"}
            if unknown:
                raise SchemaError(f"unknown fields {sorted(unknown)} in cell")
            configs.append(
                AssortmentExperimentConfig(
                    int(cell["n"]), float(cell["a0"]), float(cell["d"]),
                    count, seed, cell=pos,
                )
            )
        elif experiment == "pricing":
            unknown = set(cell) - {"n", "t", "a0"}
            if unknown:
                raise SchemaError(f"unknown fields {sorted(unknown)} in cell")
            configs.append(
                PricingExperimentConfig(
                    int(cell["n"]), float(cell["t"]), float(cell["a0"]),
                    count, seed, cell=pos,
                )
            )
        else:
            raise SchemaError(
                f"experiment must be 'assortment' or 'pricing', got {experiment!r}"
            )
    return configs


def run_config(configs: Sequence) -> list[GapRow]:
    rows = []
    for cfg in configs:
        if isinstance(cfg, AssortmentExperimentConfig):
            rows.append(run_assortment_benchmark(cfg))
        else:
            rows.append(run_pricing_benchmark(cfg))
    return rows
