"""Command-line front end.

Subcommands cover the batch pipeline end to end: build an IDF model from a
background corpus (idf), group documents into event clusters (cluster),
produce extracts at one or many compression rates (summarize), score extracts
and baselines against judge annotations (evaluate), and dump inter-judge
agreement tables (agreement). Identical inputs and settings always produce
byte-identical output files.

Exit codes: 0 success, 2 bad input or configuration, 3 evaluation
precondition failure (for instance judges who agree no better than chance).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from .evaluation import (
    EvalReport,
    EvaluationError,
    agreement_curve,
    build_report,
    csis_agreement_tally,
    csis_consensus,
    load_subsumption_annotation,
    load_utility_annotation,
    report_to_dict,
    round_half_up,
)
from .lexstats import build_centroid, build_idf, incremental_cluster, load_idf, save_idf
from .summarizer import (
    DEFAULT_ENUMERATION_CAP,
    PRESETS,
    ScoreWeights,
    extract,
    extract_to_dict,
    lead_baseline,
    redundancy_rerank,
    score_sentences,
    summary_text,
)
from .text import Cluster, cluster_from_dict, document_from_dict, parse_cluster, write_cluster


@dataclass(frozen=True)
class RunConfig:
    """Settings shared across subcommands; round-trips through key=value files."""

    w_c: float = 1.0
    w_p: float = 0.0
    w_f: float = 0.0
    r: float = 0.2
    r_grid: tuple[float, ...] | None = None
    E: float = 1.0
    centroid_threshold: float = 0.0
    sim_threshold: float = 0.1
    agreement_threshold: int = 3
    redundancy: bool = False
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    seed: int = 0  # reserved for sampling modes

    def __post_init__(self) -> None:
        ScoreWeights(self.w_c, self.w_p, self.w_f)  # range check
        if not 0 < self.r <= 1:
            raise ValueError(f"r must be in (0, 1], got {self.r}")
        if self.r_grid is not None:
            for value in self.r_grid:
                if not 0 < value <= 1:
                    raise ValueError(f"r grid value {value} outside (0, 1]")
        if not 0 <= self.E <= 1:
            raise ValueError(f"E must be in [0, 1], got {self.E}")
        if self.agreement_threshold < 1:
            raise ValueError("agreement threshold must be >= 1")
        if self.enumeration_cap < 1:
            raise ValueError("enumeration cap must be >= 1")

    @property
    def weights(self) -> ScoreWeights:
        return ScoreWeights(self.w_c, self.w_p, self.w_f)

    @property
    def rates(self) -> tuple[float, ...]:
        return self.r_grid if self.r_grid is not None else (self.r,)

    def to_file(self, path: str | Path) -> None:
        lines = [
            f"weights={self.w_c:g},{self.w_p:g},{self.w_f:g}",
            f"r={self.r:g}",
            f"r_grid={format_r_grid(self.r_grid)}",
            f"E={self.E:g}",
            f"centroid_threshold={self.centroid_threshold:g}",
            f"sim_threshold={self.sim_threshold:g}",
            f"agreement_threshold={self.agreement_threshold}",
            f"redundancy={'on' if self.redundancy else 'off'}",
            f"enumeration_cap={self.enumeration_cap}",
            f"seed={self.seed}",
        ]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        updates: dict = {}
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key == "weights":
                w_c, w_p, w_f = parse_weights(value)
                updates.update(w_c=w_c, w_p=w_p, w_f=w_f)
            elif key == "r":
                updates["r"] = float(value)
            elif key == "r_grid":
                updates["r_grid"] = parse_r_grid(value) if value else None
            elif key == "E":
                updates["E"] = float(value)
            elif key in ("centroid_threshold", "sim_threshold"):
                updates[key] = float(value)
            elif key in ("agreement_threshold", "enumeration_cap", "seed"):
                updates[key] = int(value)
            elif key == "redundancy":
                updates["redundancy"] = parse_on_off(value)
            else:
                raise ValueError(f"{path}:{lineno}: unknown setting {key!r}")
        return cls(**updates)


def parse_weights(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"weights need three comma-separated numbers, got {text!r}")
    return tuple(float(p) for p in parts)  # type: ignore[return-value]


def parse_r_grid(text: str) -> tuple[float, ...]:
    """Expand "start:stop:step" into an inclusive grid of rates."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"r grid must be start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or start <= 0 or start > stop or stop > 1:
        raise ValueError(f"r grid {text!r} outside 0 < start <= stop <= 1 with step > 0")
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


def format_r_grid(grid: tuple[float, ...] | None) -> str:
    if grid is None:
        return ""
    if len(grid) == 1:
        return f"{grid[0]:g}:{grid[0]:g}:1"
    return f"{grid[0]:g}:{grid[-1]:g}:{grid[1] - grid[0]:.10g}"


def parse_on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise ValueError(f"expected on or off, got {value!r}")
    return value == "on"


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, overridden by --config file, overridden by explicit flags."""
    config = RunConfig()
    if getattr(args, "config", None):
        config = RunConfig.from_file(args.config)
    updates: dict = {}
    if getattr(args, "preset", None):
        weights = PRESETS[args.preset]
        updates.update(w_c=weights.w_c, w_p=weights.w_p, w_f=weights.w_f)
    if getattr(args, "weights", None):
        w_c, w_p, w_f = parse_weights(args.weights)
        updates.update(w_c=w_c, w_p=w_p, w_f=w_f)
    if getattr(args, "r", None) is not None:
        updates.update(r=args.r, r_grid=None)
    if getattr(args, "r_grid", None):
        updates["r_grid"] = parse_r_grid(args.r_grid)
    for name in ("E", "centroid_threshold", "sim_threshold", "agreement_threshold", "enumeration_cap", "seed"):
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    if getattr(args, "redundancy", None):
        updates["redundancy"] = parse_on_off(args.redundancy)
    return replace(config, **updates)


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(getattr(args, "out", None) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _r_tag(r: float) -> str:
    return f"r{int(round(r * 100)):02d}"


def _load_corpus_documents(corpus_dir: str) -> list:
    """Documents from a directory of document and/or cluster JSON files."""
    root = Path(corpus_dir)
    if not root.is_dir():
        raise ValueError(f"{corpus_dir}: not a directory")
    documents = []
    for path in sorted(root.glob("*.json")):
        data = json.loads(path.read_text(encoding="utf-8"))
        if isinstance(data, dict) and "documents" in data:
            documents.extend(cluster_from_dict(data, where=str(path)).documents)
        else:
            documents.append(document_from_dict(data, where=str(path)))
    return documents


def cmd_idf(args: argparse.Namespace) -> int:
    documents = _load_corpus_documents(args.corpus_dir)
    if not documents:
        raise ValueError(f"{args.corpus_dir}: no documents found")
    model = build_idf(documents)
    out = _out_dir(args) / "idf.json"
    save_idf(model, out)
    print(f"wrote {out} ({model.n_docs} documents, {len(model.df)} terms)")
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    documents = _load_corpus_documents(args.docs_dir)
    idf = load_idf(args.idf)
    clusters = incremental_cluster(
        documents,
        idf,
        sim_threshold=config.sim_threshold,
        centroid_threshold=config.centroid_threshold,
    )
    out = _out_dir(args)
    for cluster in clusters:
        write_cluster(cluster, out / f"{cluster.cluster_id}.json")
        print(f"{cluster.cluster_id}: {cluster.d} documents, {cluster.n} sentences")
    print(f"{len(clusters)} clusters")
    return 0


def _system_extract(cluster: Cluster, config: RunConfig, idf_path: str, r: float):
    idf = load_idf(idf_path)
    centroid = build_centroid(cluster, idf, config.centroid_threshold)
    scores = score_sentences(cluster, centroid, config.weights)
    if config.redundancy:
        return redundancy_rerank(cluster, scores, r)
    return extract(cluster, scores, r)


def cmd_summarize(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    cluster = parse_cluster(args.cluster_file)
    idf = load_idf(args.idf)
    centroid = build_centroid(cluster, idf, config.centroid_threshold)
    scores = score_sentences(cluster, centroid, config.weights)
    out = _out_dir(args)
    for r in config.rates:
        if config.redundancy:
            ext = redundancy_rerank(cluster, scores, r)
        else:
            ext = extract(cluster, scores, r)
        tag = _r_tag(r)
        _write_json(extract_to_dict(ext), out / f"extract_{cluster.cluster_id}_{tag}.json")
        text = summary_text(cluster, ext)
        (out / f"summary_{cluster.cluster_id}_{tag}.txt").write_text(text + "\n", encoding="utf-8")
        print(f"{cluster.cluster_id} {tag}: {ext.k} of {cluster.n} sentences -> {sorted(ext.selected)}")
    return 0


def _load_extract_file(path: str) -> tuple[str, list[int]]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        return str(data["cluster_id"]), sorted(int(p) for p in data["selected"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: not an extract file: {exc}") from None


def _write_report_csv(report: EvalReport, path: Path) -> None:
    """Judge-vs-judge table with per-judge means, then one row per system."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["judge", *report.judge_ids, "per_judge"])
        for i, judge_id in enumerate(report.judge_ids):
            writer.writerow(
                [judge_id]
                + [f"{value:.3f}" for value in report.J_matrix[i]]
                + [f"{report.J_per_judge[i]:.3f}"]
            )
        writer.writerow(["mean_j", f"{report.mean_J:.3f}"])
        writer.writerow(["random", f"{report.R:.3f}"])
        header = ["system", "s", "d"]
        if report.E is not None:
            header += ["s_csis", "d_csis"]
        writer.writerow(header)
        for label in sorted(report.S):
            row = [label, f"{report.S[label]:.3f}", f"{round_half_up(report.D[label]):.3f}"]
            if report.E is not None:
                row += [f"{report.S_csis[label]:.3f}", f"{round_half_up(report.D_csis[label]):.3f}"]
            writer.writerow(row)


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    annotations = [load_utility_annotation(p) for p in args.annotations]
    graph = None
    if args.subsumption:
        subs = [load_subsumption_annotation(p) for p in args.subsumption]
        graph = csis_consensus(subs, config.agreement_threshold)
    if config.r_grid is not None and args.extract:
        raise ValueError("--extract files are fixed to one rate; use --lead/--system with --r-grid")
    lead_cluster = parse_cluster(args.lead) if args.lead else None
    system_cluster = parse_cluster(args.system) if args.system else None
    if args.system and not args.idf:
        raise ValueError("--system needs --idf to score sentences")
    out = _out_dir(args)

    def systems_at(r: float) -> dict[str, list[int]]:
        systems: dict[str, list[int]] = {}
        for path in args.extract or []:
            cluster_id, selected = _load_extract_file(path)
            if cluster_id != annotations[0].cluster_id:
                raise EvaluationError(
                    f"extract {path} is for cluster {cluster_id!r}, "
                    f"annotations are for {annotations[0].cluster_id!r}"
                )
            systems[Path(path).stem] = selected
        if lead_cluster is not None:
            systems["lead"] = sorted(lead_baseline(lead_cluster, r).selected)
        if system_cluster is not None:
            ext = _system_extract(system_cluster, config, args.idf, r)
            systems["system"] = sorted(ext.selected)
        return systems

    if config.r_grid is None:
        report = build_report(annotations, systems_at(config.r), config.r, graph, config.E)
        _write_json(report_to_dict(report), out / "report.json")
        _write_report_csv(report, out / "report.csv")
        print(f"mean_j={report.mean_J:.3f} random={report.R:.3f}")
        for label in sorted(report.D):
            print(f"{label}: s={report.S[label]:.3f} d={report.D[label]:.3f}")
        return 0

    if not (lead_cluster or system_cluster):
        raise ValueError("--r-grid needs --lead and/or --system")
    grid_path = out / "d_grid.csv"
    with open(grid_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        header = ["r", "system", "s", "random", "mean_j", "d"]
        if graph is not None:
            header += ["s_csis", "d_csis"]
        writer.writerow(header)
        for r in config.r_grid:
            report = build_report(annotations, systems_at(r), r, graph, config.E)
            for label in sorted(report.S):
                row = [
                    f"{r:.2f}",
                    label,
                    f"{report.S[label]:.3f}",
                    f"{report.R:.3f}",
                    f"{report.mean_J:.3f}",
                    f"{round_half_up(report.D[label]):.3f}",
                ]
                if graph is not None:
                    row += [f"{report.S_csis[label]:.3f}", f"{round_half_up(report.D_csis[label]):.3f}"]
                writer.writerow(row)
    print(f"wrote {grid_path}")
    return 0


def cmd_agreement(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    out = _out_dir(args)
    if args.mode == "cbsu":
        annotations = [load_utility_annotation(p) for p in args.annotations]
        if len(annotations) < 2:
            raise EvaluationError("need at least 2 judges")
        curve = agreement_curve(annotations, config.r_grid)
        path = out / "agreement_curve.csv"
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["r", "mean_j"])
            for r, mean_j in curve:
                writer.writerow([f"{r:.2f}", f"{mean_j:.3f}"])
        print(f"wrote {path}")
        return 0
    annotations = [load_subsumption_annotation(p) for p in args.annotations]
    tally = csis_agreement_tally(annotations)
    tally_path = out / "csis_tally.csv"
    with open(tally_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["position", "plus_score", "minus_score"])
        for row in tally.rows:
            writer.writerow(
                [
                    row.position,
                    "" if row.plus_score is None else row.plus_score,
                    "" if row.minus_score is None else row.minus_score,
                ]
            )
    hist_path = out / "csis_histogram.csv"
    with open(hist_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["agreement", "sign", "sentences"])
        for (level, sign), count in sorted(tally.histogram.items(), key=lambda kv: (-kv[0][0], kv[0][1])):
            writer.writerow([level, sign, count])
    print(f"wrote {tally_path} and {hist_path}")
    return 0


def _add_common(parser: argparse.ArgumentParser, *, rates: bool = False, scoring: bool = False) -> None:
    parser.add_argument("--config", help="key=value settings file; flags override it")
    parser.add_argument("--out", help="output directory (default: current directory)")
    if rates:
        parser.add_argument("--r", type=float, help="compression rate in (0, 1]")
        parser.add_argument("--r-grid", dest="r_grid", help="rate grid start:stop:step, e.g. 0.1:0.9:0.1")
    if scoring:
        group = parser.add_mutually_exclusive_group()
        group.add_argument("--preset", choices=sorted(PRESETS), help="named weight combination")
        group.add_argument("--weights", help="w_c,w_p,w_f")
        parser.add_argument("--redundancy", choices=["on", "off"], help="rerank with the redundancy penalty")
        parser.add_argument("--centroid-threshold", dest="centroid_threshold", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="centroidsumm",
        description="Cluster news documents, extract summaries, and evaluate them against judges.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_idf = sub.add_parser("idf", help="build an IDF model from a corpus directory")
    p_idf.add_argument("corpus_dir")
    _add_common(p_idf)
    p_idf.set_defaults(func=cmd_idf)

    p_cluster = sub.add_parser("cluster", help="group documents into event clusters")
    p_cluster.add_argument("docs_dir")
    p_cluster.add_argument("--idf", required=True, help="IDF model file")
    p_cluster.add_argument("--sim-threshold", dest="sim_threshold", type=float)
    p_cluster.add_argument("--centroid-threshold", dest="centroid_threshold", type=float)
    _add_common(p_cluster)
    p_cluster.set_defaults(func=cmd_cluster)

    p_sum = sub.add_parser("summarize", help="extract a summary from a cluster file")
    p_sum.add_argument("cluster_file")
    p_sum.add_argument("--idf", required=True, help="IDF model file")
    _add_common(p_sum, rates=True, scoring=True)
    p_sum.set_defaults(func=cmd_summarize)

    p_eval = sub.add_parser("evaluate", help="score extracts and baselines against judges")
    p_eval.add_argument("--annotations", nargs="+", required=True, help="utility annotation files")
    p_eval.add_argument("--extract", action="append", help="extract file to evaluate (repeatable)")
    p_eval.add_argument("--lead", help="cluster file; evaluate its lead baseline")
    p_eval.add_argument("--system", help="cluster file; evaluate a freshly scored extract")
    p_eval.add_argument("--idf", help="IDF model file (needed with --system)")
    p_eval.add_argument("--subsumption", nargs="+", help="subsumption annotation files")
    p_eval.add_argument("--E", dest="E", type=float, help="subsumption discount factor in [0, 1]")
    p_eval.add_argument("--agreement-threshold", dest="agreement_threshold", type=int)
    p_eval.add_argument("--enumeration-cap", dest="enumeration_cap", type=int)
    _add_common(p_eval, rates=True, scoring=True)
    p_eval.set_defaults(func=cmd_evaluate)

    p_agree = sub.add_parser("agreement", help="inter-judge agreement tables")
    p_agree.add_argument("--mode", choices=["cbsu", "csis"], required=True)
    p_agree.add_argument("--annotations", nargs="+", required=True)
    p_agree.add_argument("--r-grid", dest="r_grid", help="rate grid start:stop:step")
    _add_common(p_agree)
    p_agree.set_defaults(func=cmd_agreement)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EvaluationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
