"""Utility-based evaluation of sentence extracts.

Judges assign every sentence a 0-10 utility. From those vectors this module
derives, at a given compression rate:

  J  cross-judge agreement: how well each judge's own extract satisfies the
     other judges' utilities (an asymmetric matrix; its mean is the upper
     reference for system scores),
  R  random performance: the expected score of a uniformly random extract
     (the lower reference), by full enumeration or the exact closed form,
  S  system performance: mean over judges of credited utility divided by
     that judge's maximum achievable utility,
  D  normalized performance: (S - R) / (J - R).

Subsumption annotations mark sentences whose information is contained in
other sentences. A consensus graph over them discounts, by a factor E, the
credit of any extract sentence whose subsumption partner was already
credited, so redundant selections can be punished or ignored. Legacy
precision/recall and percent agreement are included for comparison.

All operations compute in full precision. Report construction additionally
applies half-up 3-decimal rounding at each aggregation step (matrix entries,
per-judge means, their mean, and the S/R/J inputs of D), which is the
arithmetic the reference result tables were produced with.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from math import fsum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .summarizer import compression_size, enumerate_extracts, DEFAULT_ENUMERATION_CAP


class EvaluationError(ValueError):
    """An evaluation precondition does not hold for the given data."""


@dataclass(frozen=True)
class UtilityAnnotation:
    """One judge's 0-10 utility for every sentence of a cluster.

    utilities[i] belongs to global position i + 1; every position gets
    exactly one value.
    """

    judge_id: str
    cluster_id: str
    utilities: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.utilities:
            raise ValueError(f"judge {self.judge_id!r}: empty utility vector")
        for i, u in enumerate(self.utilities):
            if not 0 <= u <= 10:
                raise ValueError(
                    f"judge {self.judge_id!r}: utility {u} at position {i + 1} outside 0..10"
                )

    @property
    def n(self) -> int:
        return len(self.utilities)

    def utility(self, position: int) -> int:
        return self.utilities[position - 1]


@dataclass(frozen=True)
class SubsumptionAnnotation:
    """One judge's subsumption marks: position -> the positions subsuming it."""

    judge_id: str
    cluster_id: str
    subsumers: Mapping[int, frozenset[int]]

    def __post_init__(self) -> None:
        for position, targets in self.subsumers.items():
            if position in targets:
                raise ValueError(
                    f"judge {self.judge_id!r}: sentence {position} cannot subsume itself"
                )

    def subsumers_of(self, position: int) -> frozenset[int]:
        return self.subsumers.get(position, frozenset())


@dataclass(frozen=True)
class SubsumptionGraph:
    """Consensus subsumption edges: (a, b) means a's content is contained in b's.

    Mutual edges are allowed; mutually subsuming sentences form an
    equivalence class and are interchangeable.
    """

    cluster_id: str
    edges: frozenset[tuple[int, int]]
    agreement_threshold: int

    def related(self, a: int, b: int) -> bool:
        return (a, b) in self.edges or (b, a) in self.edges


@dataclass(frozen=True)
class EvalConfig:
    r: float
    E: float = 1.0
    agreement_threshold: int = 3

    def __post_init__(self) -> None:
        if not 0 < self.r <= 1:
            raise ValueError(f"compression rate must be in (0, 1], got {self.r}")
        if not 0 <= self.E <= 1:
            raise ValueError(f"E must be in [0, 1], got {self.E}")
        if self.agreement_threshold < 1:
            raise ValueError("agreement threshold must be >= 1")


def judge_extract(annotation: UtilityAnnotation, k: int) -> frozenset[int]:
    """The k positions this judge values most, ties to the earlier position."""
    if not 1 <= k <= annotation.n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={annotation.n}")
    ranked = sorted(range(1, annotation.n + 1), key=lambda pos: (-annotation.utility(pos), pos))
    return frozenset(ranked[:k])


def max_utility(annotation: UtilityAnnotation, k: int) -> int:
    """The most utility any k-sentence extract can earn from this judge."""
    return sum(annotation.utility(pos) for pos in judge_extract(annotation, k))


def extract_utility(
    extract: Iterable[int],
    annotation: UtilityAnnotation,
    graph: SubsumptionGraph | None = None,
    E: float = 1.0,
) -> float:
    """Utility an extract earns from one judge, optionally subsumption-discounted.

    With a graph, extract members are credited in ascending position order; a
    member linked (in either direction) to an already-credited member earns
    E times its utility, so later members of an equivalence class are
    discounted while the earliest earns full credit. A subsumed sentence
    whose partner is absent from the extract keeps full credit.
    """
    positions = sorted(set(extract))
    if graph is None:
        return float(sum(annotation.utility(pos) for pos in positions))
    total = 0.0
    credited: list[int] = []
    for pos in positions:
        u = annotation.utility(pos)
        if any(graph.related(pos, earlier) for earlier in credited):
            total += E * u
        else:
            total += u
        credited.append(pos)
    return total


def cross_judge_matrix(
    annotations: Sequence[UtilityAnnotation], r: float
) -> list[list[float]]:
    """J[i][j]: how much of judge j's maximum utility judge i's extract earns."""
    if len(annotations) < 2:
        raise EvaluationError("need at least 2 judges")
    first = annotations[0]
    for ann in annotations[1:]:
        if ann.cluster_id != first.cluster_id:
            raise EvaluationError(
                f"annotations mix clusters {first.cluster_id!r} and {ann.cluster_id!r}"
            )
        if ann.n != first.n:
            raise EvaluationError(
                f"judge {ann.judge_id!r} annotated {ann.n} sentences, expected {first.n}"
            )
    k = compression_size(first.n, r)
    maxima = []
    for ann in annotations:
        m = max_utility(ann, k)
        if m == 0:
            raise EvaluationError(
                f"judge {ann.judge_id!r} assigns zero utility everywhere; ratios undefined"
            )
        maxima.append(m)
    extracts = [judge_extract(ann, k) for ann in annotations]
    return [
        [extract_utility(extracts[i], annotations[j]) / maxima[j] for j in range(len(annotations))]
        for i in range(len(annotations))
    ]


def mean_cross_judge(matrix: Sequence[Sequence[float]]) -> tuple[tuple[float, ...], float]:
    """Per-judge agreement (row mean excluding the diagonal) and its mean."""
    per_judge = tuple(
        fsum(value for j, value in enumerate(row) if j != i) / (len(row) - 1)
        for i, row in enumerate(matrix)
    )
    return per_judge, fsum(per_judge) / len(per_judge)


def _checked_max(annotation: UtilityAnnotation, k: int) -> int:
    m = max_utility(annotation, k)
    if m == 0:
        raise EvaluationError(
            f"judge {annotation.judge_id!r} assigns zero utility everywhere; ratios undefined"
        )
    return m


def _system_ratios(
    extract: Iterable[int],
    annotations: Sequence[UtilityAnnotation],
    graph: SubsumptionGraph | None = None,
    E: float = 1.0,
) -> list[float]:
    positions = sorted(set(extract))
    k = len(positions)
    return [
        extract_utility(positions, ann, graph, E) / _checked_max(ann, k)
        for ann in annotations
    ]


def system_performance(
    extract: Iterable[int],
    annotations: Sequence[UtilityAnnotation],
    graph: SubsumptionGraph | None = None,
    E: float = 1.0,
) -> float:
    """Mean over judges of credited utility over that judge's achievable maximum.

    The judges' maxima stay undiscounted; only the evaluated extract's credit
    is subject to the subsumption discount.
    """
    ratios = _system_ratios(extract, annotations, graph, E)
    return fsum(ratios) / len(ratios)


def random_performance(
    annotations: Sequence[UtilityAnnotation],
    r: float,
    mode: str = "closed_form",
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Expected performance of a uniformly random k-sentence extract.

    "enumerate" averages system_performance over every k-subset;
    "closed_form" uses linearity of expectation: a random k-subset earns
    k * mean(utility) from each judge. The two agree exactly.
    """
    if not annotations:
        raise EvaluationError("need at least 1 judge")
    n = annotations[0].n
    k = compression_size(n, r)
    if mode == "enumerate":
        values = [
            system_performance(subset, annotations)
            for subset in enumerate_extracts(n, k, cap)
        ]
        return fsum(values) / len(values)
    if mode == "closed_form":
        ratios = _random_ratios(annotations, k)
        return fsum(ratios) / len(ratios)
    raise ValueError(f"unknown mode {mode!r}; use 'enumerate' or 'closed_form'")


def _random_ratios(annotations: Sequence[UtilityAnnotation], k: int) -> list[float]:
    """Per-judge expected ratio of a uniform random k-subset (exact)."""
    n = annotations[0].n
    return [
        k * (fsum(ann.utilities) / n) / _checked_max(ann, k)
        for ann in annotations
    ]


def normalized_performance(S: float, mean_J: float, R: float) -> float:
    """D = (S - R) / (J - R): 0 at chance level, 1 at judge level.

    Only meaningful when the judges agree better than randomly (J > R); D may
    exceed 1 when a system beats the judges.
    """
    if mean_J <= R:
        raise EvaluationError("judges agree no better than chance (J <= R)")
    return (S - R) / (mean_J - R)


def precision_recall(system: Iterable[int], ideal: Iterable[int]) -> tuple[float, float]:
    system_set, ideal_set = set(system), set(ideal)
    if not system_set or not ideal_set:
        raise ValueError("precision/recall need non-empty extracts")
    hits = len(system_set & ideal_set)
    return hits / len(system_set), hits / len(ideal_set)


def percent_agreement(system: Iterable[int], ideal: Iterable[int], n: int) -> float:
    """Fraction of the n in-or-out decisions on which the two extracts match."""
    disagreements = len(set(system) ^ set(ideal))
    return (n - disagreements) / n


def ideal_extract(annotations: Sequence[UtilityAnnotation], k: int) -> frozenset[int]:
    """Majority extract: positions ranked by how many judges picked them.

    Ties break by summed utility, then by earlier position.
    """
    if not annotations:
        raise EvaluationError("need at least 1 judge")
    votes: Counter = Counter()
    for ann in annotations:
        votes.update(judge_extract(ann, k))
    totals = {
        pos: sum(ann.utility(pos) for ann in annotations)
        for pos in range(1, annotations[0].n + 1)
    }
    ranked = sorted(
        range(1, annotations[0].n + 1),
        key=lambda pos: (-votes[pos], -totals[pos], pos),
    )
    return frozenset(ranked[:k])


def csis_consensus(
    annotations: Sequence[SubsumptionAnnotation], threshold: int
) -> SubsumptionGraph:
    """Keep the subsumption edges at least `threshold` judges agree on."""
    if not annotations:
        raise EvaluationError("need at least 1 judge")
    cluster_id = annotations[0].cluster_id
    for ann in annotations[1:]:
        if ann.cluster_id != cluster_id:
            raise EvaluationError(
                f"annotations mix clusters {cluster_id!r} and {ann.cluster_id!r}"
            )
    support: Counter = Counter()
    for ann in annotations:
        for position, targets in ann.subsumers.items():
            for target in targets:
                support[(position, target)] += 1
    edges = frozenset(edge for edge, count in support.items() if count >= threshold)
    return SubsumptionGraph(cluster_id=cluster_id, edges=edges, agreement_threshold=threshold)


@dataclass(frozen=True)
class SentenceTally:
    """Modal agreement on one sentence's subsumption marks.

    Exactly one of plus_score / minus_score is set: plus_score counts the
    judges backing the modal non-empty subsumer set, minus_score counts the
    judges marking no subsumption when that is the consensus.
    """

    position: int
    plus_score: int | None
    minus_score: int | None

    @property
    def agreement(self) -> int:
        return self.plus_score if self.plus_score is not None else self.minus_score or 0


@dataclass(frozen=True)
class CsisTally:
    rows: tuple[SentenceTally, ...]
    histogram: dict[tuple[int, str], int]  # (judges agreeing, "+"/"-") -> sentences


def csis_agreement_tally(
    annotations: Sequence[SubsumptionAnnotation], n: int | None = None
) -> CsisTally:
    """Per-sentence modal agreement and the agreement-level histogram.

    Covers positions 1..n when n is given, otherwise every position any judge
    marked. A tie between the empty answer and a non-empty one counts as
    agreement on subsumption.
    """
    if not annotations:
        raise EvaluationError("need at least 1 judge")
    if n is not None:
        positions = range(1, n + 1)
    else:
        marked = sorted({pos for ann in annotations for pos in ann.subsumers if ann.subsumers[pos]})
        positions = marked
    rows = []
    histogram: dict[tuple[int, str], int] = {}
    for position in positions:
        answers = [ann.subsumers_of(position) for ann in annotations]
        tallies = Counter(answers)
        # modal answer: highest count; ties prefer a non-empty set, then the
        # smallest sorted tuple for determinism
        modal, modal_count = min(
            tallies.items(), key=lambda item: (-item[1], len(item[0]) == 0, tuple(sorted(item[0])))
        )
        if modal:
            row = SentenceTally(position=position, plus_score=modal_count, minus_score=None)
            sign = "+"
        else:
            row = SentenceTally(position=position, plus_score=None, minus_score=modal_count)
            sign = "-"
        rows.append(row)
        key = (modal_count, sign)
        histogram[key] = histogram.get(key, 0) + 1
    return CsisTally(rows=tuple(rows), histogram=histogram)


# --- report construction -----------------------------------------------------
#
# The reference result tables round half-up to 3 decimals at every step:
# matrix entries first, per-judge means of the rounded entries next, their
# mean last, and D from the rounded S, R and J. Reproducing them exactly
# requires the same chain, so the report path works in Decimal.

_QUANTUM = Decimal("0.001")


def round_half_up(value: float, places: int = 3) -> float:
    """Round to `places` decimals with ties away from zero (table style)."""
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(str(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def _decimal_mean(values: Iterable[float]) -> Decimal:
    decimals = [Decimal(str(v)) for v in values]
    return sum(decimals, Decimal(0)) / len(decimals)


def _report_ratio_mean(ratios: Iterable[float]) -> float:
    """Round each per-judge ratio, then round their mean (table arithmetic)."""
    rounded = [round_half_up(v) for v in ratios]
    return float(_decimal_mean(rounded).quantize(_QUANTUM, rounding=ROUND_HALF_UP))


def report_system_performance(
    extract: Iterable[int],
    annotations: Sequence[UtilityAnnotation],
    graph: SubsumptionGraph | None = None,
    E: float = 1.0,
) -> float:
    """Table-style S: each judge's ratio rounded before the rounded mean."""
    return _report_ratio_mean(_system_ratios(extract, annotations, graph, E))


def report_random_performance(annotations: Sequence[UtilityAnnotation], r: float) -> float:
    """Table-style R over the closed-form per-judge expectations."""
    if not annotations:
        raise EvaluationError("need at least 1 judge")
    k = compression_size(annotations[0].n, r)
    return _report_ratio_mean(_random_ratios(annotations, k))


def report_cross_judge(
    annotations: Sequence[UtilityAnnotation], r: float
) -> tuple[list[list[float]], tuple[float, ...], float]:
    """Table-style J: rounded matrix, rounded per-judge means, rounded mean."""
    matrix = cross_judge_matrix(annotations, r)
    rounded = [[round_half_up(value) for value in row] for row in matrix]
    per_judge = tuple(
        float(
            _decimal_mean(v for j, v in enumerate(row) if j != i).quantize(
                _QUANTUM, rounding=ROUND_HALF_UP
            )
        )
        for i, row in enumerate(rounded)
    )
    mean_j = float(_decimal_mean(per_judge).quantize(_QUANTUM, rounding=ROUND_HALF_UP))
    return rounded, per_judge, mean_j


@dataclass(frozen=True)
class EvalReport:
    """J/R/S/D for a set of systems against one cluster's judges.

    S, R and mean_J are table-rounded; each D is the exact quotient of those
    rounded values (displays round it again).
    """

    cluster_id: str
    r: float
    k: int
    judge_ids: tuple[str, ...]
    J_matrix: tuple[tuple[float, ...], ...]
    J_per_judge: tuple[float, ...]
    mean_J: float
    R: float
    S: dict[str, float]
    D: dict[str, float]
    S_csis: dict[str, float] = field(default_factory=dict)
    D_csis: dict[str, float] = field(default_factory=dict)
    E: float | None = None


def build_report(
    annotations: Sequence[UtilityAnnotation],
    systems: Mapping[str, Iterable[int]],
    r: float,
    graph: SubsumptionGraph | None = None,
    E: float = 1.0,
) -> EvalReport:
    """Evaluate named extracts against the judges at compression rate r."""
    matrix, per_judge, mean_j = report_cross_judge(annotations, r)
    n = annotations[0].n
    k = compression_size(n, r)
    r_value = report_random_performance(annotations, r)
    if mean_j <= r_value:
        raise EvaluationError("judges agree no better than chance (J <= R)")
    denominator = Decimal(str(mean_j)) - Decimal(str(r_value))
    s_scores: dict[str, float] = {}
    d_scores: dict[str, float] = {}
    s_csis: dict[str, float] = {}
    d_csis: dict[str, float] = {}
    for label in sorted(systems):
        positions = sorted(set(systems[label]))
        if len(positions) != k:
            raise EvaluationError(
                f"system {label!r} selected {len(positions)} sentences, expected k={k}"
            )
        s_val = report_system_performance(positions, annotations)
        s_scores[label] = s_val
        d_scores[label] = float(
            (Decimal(str(s_val)) - Decimal(str(r_value))) / denominator
        )
        if graph is not None:
            s_adj = report_system_performance(positions, annotations, graph, E)
            s_csis[label] = s_adj
            d_csis[label] = float(
                (Decimal(str(s_adj)) - Decimal(str(r_value))) / denominator
            )
    return EvalReport(
        cluster_id=annotations[0].cluster_id,
        r=r,
        k=k,
        judge_ids=tuple(ann.judge_id for ann in annotations),
        J_matrix=tuple(tuple(row) for row in matrix),
        J_per_judge=per_judge,
        mean_J=mean_j,
        R=r_value,
        S=s_scores,
        D=d_scores,
        S_csis=s_csis,
        D_csis=d_csis,
        E=E if graph is not None else None,
    )


def agreement_curve(
    annotations: Sequence[UtilityAnnotation],
    r_grid: Sequence[float] | None = None,
) -> list[tuple[float, float]]:
    """Table-style mean J at each compression rate (default 10%..90%)."""
    if r_grid is None:
        r_grid = [i / 10 for i in range(1, 10)]
    curve = []
    for r in r_grid:
        _, _, mean_j = report_cross_judge(annotations, r)
        curve.append((r, mean_j))
    return curve


# --- file formats -------------------------------------------------------------


def load_utility_annotation(path: str | Path) -> UtilityAnnotation:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        return UtilityAnnotation(
            judge_id=str(data["judge_id"]),
            cluster_id=str(data["cluster_id"]),
            utilities=tuple(int(u) for u in data["utilities"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: not a utility annotation file: {exc}") from None


def save_utility_annotation(annotation: UtilityAnnotation, path: str | Path) -> None:
    payload = {
        "judge_id": annotation.judge_id,
        "cluster_id": annotation.cluster_id,
        "utilities": list(annotation.utilities),
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def load_subsumption_annotation(path: str | Path) -> SubsumptionAnnotation:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        subsumers = {
            int(pos): frozenset(int(t) for t in targets)
            for pos, targets in data["subsumers"].items()
        }
        return SubsumptionAnnotation(
            judge_id=str(data["judge_id"]),
            cluster_id=str(data["cluster_id"]),
            subsumers=subsumers,
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"{path}: not a subsumption annotation file: {exc}") from None


def save_subsumption_annotation(annotation: SubsumptionAnnotation, path: str | Path) -> None:
    payload = {
        "judge_id": annotation.judge_id,
        "cluster_id": annotation.cluster_id,
        "subsumers": {
            str(pos): sorted(targets)
            for pos, targets in sorted(annotation.subsumers.items())
            if targets
        },
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def report_to_dict(report: EvalReport) -> dict:
    payload = {
        "cluster_id": report.cluster_id,
        "r": report.r,
        "k": report.k,
        "judges": list(report.judge_ids),
        "j_matrix": [list(row) for row in report.J_matrix],
        "j_per_judge": list(report.J_per_judge),
        "mean_j": report.mean_J,
        "random": report.R,
        "systems": {
            label: {"s": report.S[label], "d": round_half_up(report.D[label])}
            for label in report.S
        },
    }
    if report.E is not None:
        payload["e"] = report.E
        for label in report.S_csis:
            payload["systems"][label]["s_csis"] = report.S_csis[label]
            payload["systems"][label]["d_csis"] = round_half_up(report.D_csis[label])
    return payload
