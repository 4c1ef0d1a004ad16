# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Verification battery and sampling experiments over batches of structure pairs."""

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from .error import TheoremViolation
from .filtration import persistence_spectrum
from .homology import boundary_matrices, homology
from .nerve import (
    OWNER_S,
    OWNER_T,
    DeltaCheck,
    build_nerve,
    delta_checks,
    linear_extension_count,
    simplicial_order,
    verify_structure_lemmas,
)
from .oracle import nerve_mismatches, rational_betti
from .structures import BiSecondaryStructure, make_rng, sample_pair

log = logging.getLogger()

CORPUS_DIR = Path(__file__).parent / "corpus"
DEFAULT_EXTENSIONS = 3


@dataclass(frozen=True)
class VerifyOptions:
    """What the battery checks besides the lemmas, the delta graphs and the theorems."""

    oracle: bool = False
    swapped: bool = False
    extensions: int = DEFAULT_EXTENSIONS
    certificates: bool = False


@dataclass
class InstanceRecord:
    """
    Outcome of the battery on one pair; picklable so workers can return it.

    `checks` maps every theorem-backed check to pass/fail. Swapped delta checks
    and field/integral discrepancies of the filtration are recorded but never
    count as failures.
    """

    index: int
    s_line: str
    t_line: str
    counts: Tuple[int, ...] = ()
    betti: Optional[Tuple[int, ...]] = None
    checks: Dict[str, bool] = field(default_factory=dict)
    swapped_checked: int = 0
    swapped_failed: int = 0
    field_discrepancies: int = 0
    orders_checked: int = 0
    certificates: Dict[int, DeltaCheck] = field(default_factory=dict)
    violation: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def pair(self) -> BiSecondaryStructure:
        return BiSecondaryStructure.from_dot_bracket(self.s_line, self.t_line)


def verify_instance(
    pair: BiSecondaryStructure, index: int = 0, seed: int = 0, options: VerifyOptions = VerifyOptions()
) -> InstanceRecord:
    """
    Run every structural, homological and filtration check on one pair.

    Parameters
    ----------
    pair : BiSecondaryStructure
        Instance to check.
    index, seed : int
        Identify the instance in its batch. The order-invariance check draws
        random linear extensions from the stream of (seed, index) until
        `options.extensions` distinct orders, or every order there is, are checked.
    options : VerifyOptions
        Optional checks.
    """
    record = InstanceRecord(index, pair.S.to_dot_bracket(), pair.T.to_dot_bracket())
    nerve = build_nerve(pair)
    record.counts = nerve.counts()
    checks = record.checks

    lemmas = verify_structure_lemmas(nerve)
    for name, check in lemmas.checks.items():
        checks[f"lemma:{name}"] = check.passed

    deltas = delta_checks(nerve, OWNER_T)
    checks["delta"] = all(outcome.exists for outcome in deltas.values())
    if options.certificates:
        record.certificates = dict(deltas)
    if options.swapped:
        swapped = delta_checks(nerve, OWNER_S)
        record.swapped_checked = len(swapped)
        record.swapped_failed = sum(1 for outcome in swapped.values() if not outcome.exists)

    try:
        cc = boundary_matrices(nerve)
        result = homology(cc)
    except TheoremViolation as err:
        checks["theorems"] = False
        record.violation = str(err)
        return record
    checks["theorems"] = True
    record.betti = result.betti
    checks["euler"] = result.betti[2] == result.euler - 1
    checks["generators"] = len(result.h2_generators) == result.betti[2]

    spectrum = persistence_spectrum(nerve)
    high_levels_flat = all(betti[2] == betti[3] == 0 for t, betti in spectrum.levels.items() if t >= 3)
    checks["filtration"] = spectrum.levels.get(1) == result.betti and high_levels_flat
    record.field_discrepancies = len(spectrum.discrepancies())

    rng = make_rng(seed, index)
    orders = {order.rank: order for order in (nerve.order, simplicial_order(nerve, reverse_siblings=True))}
    wanted = min(options.extensions, linear_extension_count(nerve))
    while len(orders) < wanted:
        order = simplicial_order(nerve, rng=rng)
        orders.setdefault(order.rank, order)
    record.orders_checked = len(orders)
    invariant = True
    for rank, order in orders.items():
        if rank == nerve.order.rank:
            continue
        other = homology(boundary_matrices(nerve, order), generators=False)
        invariant = invariant and order.is_compliant(nerve) and other.betti == result.betti
    checks["order_invariance"] = invariant

    if options.oracle:
        checks["oracle_nerve"] = not nerve_mismatches(nerve)
        checks["oracle_betti"] = rational_betti(cc) == result.betti
    return record


@dataclass
class VerifySummary:
    """Aggregated battery outcome over a batch."""

    total: int = 0
    checked: Counter = field(default_factory=Counter)
    passed: Counter = field(default_factory=Counter)
    swapped_checked: int = 0
    swapped_failed: int = 0
    field_discrepancies: int = 0
    records: List[InstanceRecord] = field(default_factory=list)

    def add(self, record: InstanceRecord) -> None:
        self.total += 1
        for name, ok in record.checks.items():
            self.checked[name] += 1
            self.passed[name] += int(ok)
        self.swapped_checked += record.swapped_checked
        self.swapped_failed += record.swapped_failed
        self.field_discrepancies += record.field_discrepancies
        self.records.append(record)

    @property
    def ok(self) -> bool:
        return self.checked == self.passed

    @property
    def first_failure(self) -> Optional[InstanceRecord]:
        return next((record for record in sorted(self.records, key=lambda rec: rec.index) if not record.passed), None)

    def lines(self) -> List[str]:
        rows = [f"instances {self.total}"]
        for name in sorted(self.checked):
            rows.append(f"{name:<28} {self.passed[name]}/{self.checked[name]}")
        if self.swapped_checked:
            ok = self.swapped_checked - self.swapped_failed
            rows.append(f"{'swapped_delta (recorded)':<28} {ok}/{self.swapped_checked}")
        rows.append(f"{'field_discrepancies':<28} {self.field_discrepancies}")
        return rows


def _random_task(args: Tuple[int, int, int, int, VerifyOptions]) -> InstanceRecord:
    index, n, min_gap, seed, options = args
    pair = sample_pair(n, min_gap, make_rng(seed, index))
    return verify_instance(pair, index, seed, options)


def _pair_task(args: Tuple[int, BiSecondaryStructure, int, VerifyOptions]) -> InstanceRecord:
    index, pair, seed, options = args
    return verify_instance(pair, index, seed, options)


def _run(func, tasks: List[tuple], jobs: int) -> List:
    """Evaluate tasks serially or on a process pool; results in task order."""
    if jobs <= 1:
        return [func(task) for task in tasks]
    results = [None] * len(tasks)
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        futures = {executor.submit(func, task): idx for idx, task in enumerate(tasks)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return results


def verify_pairs(
    pairs: Iterable[BiSecondaryStructure], seed: int = 0, options: VerifyOptions = VerifyOptions(), jobs: int = 1
) -> VerifySummary:
    tasks = [(index, pair, seed, options) for index, pair in enumerate(pairs)]
    summary = VerifySummary()
    for record in _run(_pair_task, tasks, jobs):
        summary.add(record)
    return summary


def verify_random(
    count: int, n: int, min_gap: int = 0, seed: int = 0, options: VerifyOptions = VerifyOptions(), jobs: int = 1
) -> VerifySummary:
    """Battery over `count` uniform pairs; instance i uses the stream of (seed, i)."""
    tasks = [(index, n, min_gap, seed, options) for index in range(count)]
    summary = VerifySummary()
    for record in _run(_random_task, tasks, jobs):
        summary.add(record)
    log.info("verified %d random pairs n=%d min_gap=%d seed=%d", count, n, min_gap, seed)
    return summary


def corpus_paths(directory=CORPUS_DIR) -> List[Path]:
    """Pair files of a corpus directory, sorted by name."""
    directory = Path(directory)
    return sorted(path for path in directory.iterdir() if path.suffix in (".bis", ".json"))


@dataclass
class RankHistogram:
    """Counts of rank(H2) over sampled pairs, stamped with the sampling parameters."""

    bins: Counter
    total: int
    n: int
    min_gap: int
    seed: int

    def frequency(self, rank: int) -> float:
        return self.bins.get(rank, 0) / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return {
            "bins": {str(rank): self.bins[rank] for rank in sorted(self.bins)},
            "total": self.total,
            "n": self.n,
            "min_gap": self.min_gap,
            "seed": self.seed,
        }

    def table(self) -> str:
        rows = [f"# n={self.n} min_gap={self.min_gap} seed={self.seed} total={self.total}", "rank count frequency"]
        for rank in sorted(self.bins):
            rows.append(f"{rank} {self.bins[rank]} {self.frequency(rank):.4f}")
        return "\n".join(rows)


def _rank_task(args: Tuple[int, int, int, int]) -> int:
    index, n, min_gap, seed = args
    nerve = build_nerve(sample_pair(n, min_gap, make_rng(seed, index)))
    return homology(boundary_matrices(nerve), generators=False).h2_rank


def sample_ranks(n: int, count: int, min_gap: int = 0, seed: int = 0, jobs: int = 1) -> RankHistogram:
    """
    rank(H2) over `count` pairs of independent uniform structures.

    Raises
    ------
    TheoremViolation
        If any sampled nerve has the wrong homology.
    """
    tasks = [(index, n, min_gap, seed) for index in range(count)]
    bins = Counter(_run(_rank_task, tasks, jobs))
    return RankHistogram(bins, count, n, min_gap, seed)
