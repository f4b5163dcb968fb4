"""Experiment orchestration: fixed test set, progressive fill, MAE sweep.

A sweep fixes one test set up front, then walks a grid of sparsity
checkpoints: at each one the training matrix is topped up in feed order,
every configured method is rebuilt from scratch, the whole test set is
predicted, and a (method, sparsity, MAE) row is recorded. Reports are
plain CSV plus a key=value diagnostics companion, printed with enough
digits to make reruns byte-identical.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .baselines import BlendRecommender, ItemMeanRecommender, UserMeanRecommender
from .correlation import CorrelationRecommender
from .exceptions import DataError, UndefinedStatisticError
from .ingest import SplitPlan, TimedTriple, fill_to_checkpoint, load_file, reduce_dataset, split
from .metrics import mae
from .ratings import RatingMatrix, sparsity, vote_entropy
from .spectral import SpectralRecommender
from .synthetic import (
    CorrelationTarget,
    correlation_distribution,
    sample_votes,
    sample_votes_bimodal,
    valid_correlation_matrix,
)

DEFAULT_CHECKPOINT_COUNT = 15
DEFAULT_CHECKPOINT_START = 0.02  # fraction of the final sparsity


@dataclass(frozen=True)
class FileSource:
    """A dataset on disk; format auto-detected unless forced."""

    path: str
    format: str = "auto"


@dataclass(frozen=True)
class SyntheticSource:
    """A generated dataset: correlation target plus vote sampling settings."""

    target: CorrelationTarget
    n_items: int
    mode: str = "unimodal"
    delta: float = 0.0
    vote_seed: int = 0

    def __post_init__(self):
        if self.mode not in ("unimodal", "bimodal"):
            raise DataError(f"mode must be 'unimodal' or 'bimodal', got {self.mode!r}")


@dataclass(frozen=True)
class ReductionSpec:
    """Optional random shrink of the dataset before splitting."""

    user_fraction: float = 1.0
    item_fraction: float = 1.0
    n_users: int | None = None
    n_items: int | None = None
    seed: int = 0


@dataclass(frozen=True)
class ExperimentPlan:
    """Everything needed to reproduce one sweep bit-for-bit."""

    source: FileSource | SyntheticSource
    split: SplitPlan
    methods: tuple[str, ...]
    reduction: ReductionSpec | None = None
    diagnostics: bool = True

    def __post_init__(self):
        if not self.methods:
            raise DataError("plan needs at least one method")
        normalized = tuple(normalize_method(m) for m in self.methods)
        object.__setattr__(self, "methods", normalized)


@dataclass(frozen=True)
class SweepRow:
    method: str
    eta: float
    mae: float
    n_predictions: int
    n_fallbacks: int


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]
    diagnostics: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)


# -- method roster ---------------------------------------------------------

_METHOD_FACTORIES: dict[str, Callable] = {
    "item_mean": ItemMeanRecommender,
    "user_mean": UserMeanRecommender,
    "blend": BlendRecommender,
    "correlation": CorrelationRecommender,
    "spectral": SpectralRecommender,
}

_BOOL_WORDS = {"true": True, "false": False, "yes": True, "no": False}


def _parse_value(text: str):
    text = text.strip()
    lowered = text.lower()
    if lowered in _BOOL_WORDS:
        return _BOOL_WORDS[lowered]
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_method(spec: str) -> tuple[str, dict]:
    """Parse a method spec like ``correlation(n_c=3, gamma=1.5)``."""
    spec = spec.strip()
    name, sep, rest = spec.partition("(")
    name = name.strip()
    kwargs: dict = {}
    if sep:
        if not rest.rstrip().endswith(")"):
            raise DataError(f"unbalanced parentheses in method spec {spec!r}")
        body = rest.rstrip()[:-1].strip()
        if body:
            for part in body.split(","):
                key, eq, value = part.partition("=")
                if not eq:
                    raise DataError(f"method arguments must be key=value, got {part!r}")
                kwargs[key.strip()] = _parse_value(value)
    if name not in _METHOD_FACTORIES:
        known = ", ".join(sorted(_METHOD_FACTORIES))
        raise DataError(f"unknown method {name!r} (known: {known})")
    return name, kwargs


def make_method(spec: str):
    """Instantiate the recommender a method spec describes."""
    name, kwargs = parse_method(spec)
    try:
        return _METHOD_FACTORIES[name](**kwargs)
    except TypeError as exc:
        raise DataError(f"bad arguments for method {name!r}: {exc}") from exc


def normalize_method(spec: str) -> str:
    """Canonical text form of a method spec (stable across equivalent input)."""
    name, kwargs = parse_method(spec)
    if not kwargs:
        return name
    body = ",".join(f"{k}={kwargs[k]}" for k in sorted(kwargs))
    return f"{name}({body})"


# -- sweeping ----------------------------------------------------------------

def load_source(source) -> tuple[list[TimedTriple], tuple[float, float]]:
    """Materialize a plan source into triples plus their vote scale."""
    if isinstance(source, FileSource):
        return load_file(source.path, source.format)
    if isinstance(source, SyntheticSource):
        correlation = valid_correlation_matrix(source.target)
        if source.mode == "bimodal":
            votes = sample_votes_bimodal(correlation, source.n_items,
                                         source.delta, seed=source.vote_seed)
        else:
            votes = sample_votes(correlation, source.n_items, seed=source.vote_seed)
        triples = [TimedTriple(u, i, v) for u, i, v in votes.to_triples()]
        return triples, votes.scale()
    raise DataError(f"unknown source type {type(source).__name__}")


def default_checkpoints(eta_final: float) -> tuple[float, ...]:
    """Geometric grid from a small fraction of the final sparsity up to it."""
    grid = np.geomspace(DEFAULT_CHECKPOINT_START * eta_final, eta_final,
                        DEFAULT_CHECKPOINT_COUNT)
    return tuple(float(c) for c in grid)


def _test_hash(test: Sequence[TimedTriple]) -> str:
    digest = hashlib.sha256()
    for t in sorted(test, key=lambda t: (t.user, t.item)):
        digest.update(f"{t.user},{t.item},{t.vote:.12g}\n".encode())
    return digest.hexdigest()


def run_sweep(plan: ExperimentPlan) -> SweepReport:
    """Execute a plan: split once, fill, rebuild, predict, measure."""
    triples, scale = load_source(plan.source)
    if plan.reduction is not None:
        r = plan.reduction
        triples = reduce_dataset(triples, user_fraction=r.user_fraction,
                                 item_fraction=r.item_fraction, seed=r.seed,
                                 n_users=r.n_users, n_items=r.n_items)
    n_users = 1 + max(t.user for t in triples)
    n_items = 1 + max(t.item for t in triples)

    train, test = split(triples, plan.split)
    eta_final = len(train) / (n_users * n_items)
    checkpoints = plan.split.checkpoints or default_checkpoints(eta_final)
    overshoot = [c for c in checkpoints if c > eta_final * (1 + 1e-9)]
    if overshoot:
        raise DataError(
            f"checkpoints {overshoot} exceed the achievable sparsity {eta_final:.6g}")

    test_pairs = np.array([(t.user, t.item) for t in test], dtype=np.int64)
    test_votes = np.array([t.vote for t in test])
    vote_range = scale[1] - scale[0]

    matrix = RatingMatrix(n_users, n_items, scale)
    cursor = 0
    rows: list[SweepRow] = []
    fill_fractions: list[tuple[float, float]] = []
    for eta_target in checkpoints:
        cursor = fill_to_checkpoint(train, matrix, eta_target, start=cursor)
        eta = sparsity(matrix)
        fill_fractions.append((eta, cursor / len(train)))
        for spec in plan.methods:
            model = make_method(spec).fit(matrix)
            predicted, fallback = model.predict_pairs(test_pairs)
            score = mae(np.column_stack([predicted, test_votes]), vote_range)
            rows.append(SweepRow(spec, eta, score, len(test), int(fallback.sum())))
    rows.sort(key=lambda r: (r.method, r.eta))

    diagnostics: dict = {}
    if plan.diagnostics:
        full = RatingMatrix(n_users, n_items, scale)
        for t in triples:
            full.add(t.user, t.item, t.vote)
        diagnostics["vote_entropy"] = vote_entropy(full)
        try:
            summary = correlation_distribution(full, n_c=3)
        except UndefinedStatisticError:
            summary = None
        if summary is not None:
            diagnostics["correlation_mean"] = summary.mean
            diagnostics["correlation_std"] = summary.std
            diagnostics["correlation_histogram"] = summary.histogram.tolist()
            diagnostics["correlation_pairs"] = summary.n_pairs

    provenance = {
        "source": repr(plan.source),
        "reduction": repr(plan.reduction),
        "split_mode": plan.split.mode,
        "n_test": plan.split.n_test,
        "split_seed": plan.split.seed,
        "methods": list(plan.methods),
        "n_users": n_users,
        "n_items": n_items,
        "scale": scale,
        "eta_final": eta_final,
        "test_hash": _test_hash(test),
        "fill_fractions": fill_fractions,
    }
    return SweepReport(tuple(rows), diagnostics, provenance)


# -- report emission ---------------------------------------------------------

REPORT_HEADER = "method,eta,mae,n_predictions,n_fallbacks"


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def emit_report(report: SweepReport, path, format: str = "csv") -> None:
    """Write the row CSV at ``path`` and diagnostics at ``<path>.diag.txt``."""
    if format != "csv":
        raise DataError(f"unsupported report format {format!r}")
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(REPORT_HEADER + "\n")
            for row in report.rows:
                handle.write(f"{row.method},{_fmt(row.eta)},{_fmt(row.mae)},"
                             f"{row.n_predictions},{row.n_fallbacks}\n")
        companion = path.with_name(path.name + ".diag.txt")
        with companion.open("w", encoding="utf-8", newline="\n") as handle:
            for key in sorted(report.provenance):
                value = report.provenance[key]
                if key == "fill_fractions":
                    rendered = ";".join(f"{_fmt(e)}:{_fmt(f)}" for e, f in value)
                    handle.write(f"fill_fractions={rendered}\n")
                else:
                    handle.write(f"{key}={value}\n")
            for key in sorted(report.diagnostics):
                handle.write(f"{key}={report.diagnostics[key]}\n")
    except OSError as exc:
        raise DataError(f"cannot write report to {path}: {exc}") from exc


def read_report(path) -> tuple[SweepRow, ...]:
    """Parse a report CSV back into rows (the emit round trip)."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read report from {path}: {exc}") from exc
    if not lines or lines[0] != REPORT_HEADER:
        raise DataError(f"{path} is not a sweep report (bad header)")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        method, eta, score, n_pred, n_fall = _split_row(line)
        rows.append(SweepRow(method, float(eta), float(score), int(n_pred), int(n_fall)))
    return tuple(rows)


def _split_row(line: str) -> tuple[str, str, str, str, str]:
    # method specs may contain commas inside parentheses, so split from the right
    parts = line.rsplit(",", 4)
    if len(parts) != 5:
        raise DataError(f"malformed report row {line!r}")
    return tuple(parts)  # type: ignore[return-value]


# -- plain-text plan configuration --------------------------------------------

def _split_outside_parens(text: str) -> list[str]:
    parts, depth, current = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    tail = "".join(current).strip()
    if tail:
        parts.append(tail)
    return [p for p in parts if p]


def parse_config(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment, blanks ignored."""
    options: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise DataError(f"config line {lineno}: expected key=value, got {raw!r}")
        options[key.strip()] = value.strip()
    return options


def plan_from_options(options: dict[str, str]) -> ExperimentPlan:
    """Build an ExperimentPlan from flat key=value options.

    Recognized keys: source (path or "synthetic"), format, users, items,
    mu, sigma, dist, mode, delta, corr_seed, vote_seed, max_iter,
    user_fraction, item_fraction, target_users, target_items, reduce_seed,
    split, n_test, split_seed, checkpoints, methods, diagnostics.
    """
    opts = dict(options)

    def pop(key, default=None):
        return opts.pop(key, default)

    source_value = pop("source")
    if source_value is None:
        raise DataError("config needs a 'source' (a file path or 'synthetic')")
    if source_value == "synthetic":
        target = CorrelationTarget(
            n_users=int(pop("users", 250)),
            mean=float(pop("mu", 0.0)),
            std=float(pop("sigma", 0.1)),
            dist=pop("dist", "uniform"),
            max_iter=int(pop("max_iter", 200)),
            seed=int(pop("corr_seed", 0)),
        )
        source = SyntheticSource(
            target=target,
            n_items=int(pop("items", 500)),
            mode=pop("mode", "unimodal"),
            delta=float(pop("delta", 0.0)),
            vote_seed=int(pop("vote_seed", 0)),
        )
    else:
        source = FileSource(source_value, pop("format", "auto"))

    reduction = None
    reduction_keys = ("user_fraction", "item_fraction", "target_users", "target_items")
    if any(k in opts for k in reduction_keys):
        target_users = pop("target_users")
        target_items = pop("target_items")
        reduction = ReductionSpec(
            user_fraction=float(pop("user_fraction", 1.0)),
            item_fraction=float(pop("item_fraction", 1.0)),
            n_users=int(target_users) if target_users else None,
            n_items=int(target_items) if target_items else None,
            seed=int(pop("reduce_seed", 0)),
        )

    checkpoints_value = pop("checkpoints", "")
    checkpoints = tuple(float(c) for c in _split_outside_parens(checkpoints_value))
    split_plan = SplitPlan(
        mode=pop("split", "random"),
        n_test=int(pop("n_test", 10000)),
        seed=int(pop("split_seed", 0)),
        checkpoints=checkpoints,
    )

    methods_value = pop("methods", "")
    methods = tuple(_split_outside_parens(methods_value))
    if not methods:
        raise DataError("config needs a 'methods' list")

    diagnostics = str(pop("diagnostics", "true")).lower() in ("true", "yes", "1")
    pop("out")  # consumed by the CLI, tolerated here
    if opts:
        raise DataError(f"unknown config keys: {sorted(opts)}")
    return ExperimentPlan(source=source, split=split_plan, methods=methods,
                          reduction=reduction, diagnostics=diagnostics)


def load_plan(path, overrides: dict[str, str] | None = None) -> ExperimentPlan:
    """Read a plain-text config file, apply overrides, build the plan."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    options = parse_config(text)
    if overrides:
        options.update(overrides)
    return plan_from_options(options)
