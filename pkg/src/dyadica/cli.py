"""Command-line front end: configuration, verification suites, reports.

Each suite re-runs one family of library checks at configurable size and
emits a machine-readable report: a JSON (or CSV) file with one record per
check and a CSV of per-sample numerics.  Hard records are exact finite
identities and decide the exit status; stability records describe
resolution robustness and only fail the run in strict mode.  Two-axis
suites place roughly half the configured level on each axis so the total
cell count stays comparable with the one-axis suites.

Reports are bit-reproducible: every random draw derives from the
configured seed, and field ordering is fixed.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .analysis import (
    frac_maximal_domination,
    square_function,
    strong_maximal,
)
from .dyadic import DyadicSystem, GoodParams, default_gamma
from .errors import ConfigurationError, DyadicaError
from .fracops import maximal_table, verify_representation
from .grid import build_axis, grid_function, l2_norm, tabulate_midpoint
from .haar import haar_expand, level_average, level_difference
from .paracomm import (
    BloomConfig,
    bloom_experiment,
    decompose_product,
    shift_commutator_expand,
)
from .weights import (
    ProductWeight,
    apq_characteristic,
    exponent_solve,
    power_weight,
    product_ap_characteristic,
    ap_characteristic,
)

__all__ = [
    "SUITES",
    "CheckRecord",
    "ExperimentConfig",
    "SuiteOutcome",
    "config_to_dict",
    "emit_report",
    "load_config",
    "main",
    "run_suite",
]

SUITES = (
    "bloom",
    "commutator",
    "decompose",
    "haar-verify",
    "norms",
    "represent",
    "weights",
)


# -- configuration --------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; every field JSON-representable."""

    suite: str
    seed: int
    levels: Tuple[int, ...] = (6,)
    lambdas: Tuple[float, ...] = (0.5,)
    exponents: Tuple[Tuple[float, float], ...] = ((4.0 / 3.0, 0.5),)
    weights: Tuple[Tuple[float, float], ...] = ((0.3, 0.5), (-0.25, 0.25))
    r: int = 3
    gamma: Optional[float] = None  # None means 1 / (2 (lambda + 1))
    samples: int = 20
    out: str = "reports"
    format: str = "json"


_CONFIG_FIELDS = (
    "suite",
    "seed",
    "levels",
    "lambdas",
    "exponents",
    "weights",
    "r",
    "gamma",
    "samples",
    "out",
    "format",
)


def _fail(name: str, why: str):
    raise ConfigurationError(f"invalid field {name!r}: {why}")


def _config_from_mapping(data: Mapping) -> ExperimentConfig:
    for key in data:
        if key not in _CONFIG_FIELDS:
            raise ConfigurationError(f"unknown field {key!r}")
    suite = data.get("suite")
    if suite not in SUITES + ("all",):
        _fail("suite", f"must be one of {SUITES + ('all',)}, got {suite!r}")
    if "seed" not in data:
        _fail("seed", "a seed is mandatory")
    seed = data["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int):
        _fail("seed", f"must be an integer, got {seed!r}")

    levels = tuple(data.get("levels", (6,)))
    if not levels:
        _fail("levels", "must be non-empty")
    for idx, lv in enumerate(levels):
        if isinstance(lv, bool) or not isinstance(lv, int) or not 1 <= lv <= 14:
            _fail(f"levels[{idx}]", f"must be an integer in [1, 14], got {lv!r}")

    lambdas = tuple(float(x) for x in data.get("lambdas", (0.5,)))
    if not lambdas:
        _fail("lambdas", "must be non-empty")
    for idx, lam in enumerate(lambdas):
        if not 0.0 < lam < 1.0:
            _fail(f"lambdas[{idx}]", f"must lie in (0, 1), got {lam!r}")

    exponents = tuple(tuple(float(v) for v in pair) for pair in data.get("exponents", ((4.0 / 3.0, 0.5),)))
    if not exponents:
        _fail("exponents", "must be non-empty")
    for idx, pair in enumerate(exponents):
        if len(pair) != 2:
            _fail(f"exponents[{idx}]", f"must be a [p, lambda] pair, got {pair!r}")
        try:
            exponent_solve(pair[0], pair[1])
        except DyadicaError as exc:
            _fail(f"exponents[{idx}]", str(exc))

    weights = tuple(tuple(float(v) for v in pair) for pair in data.get("weights", ((0.3, 0.5), (-0.25, 0.25))))
    if not weights:
        _fail("weights", "must be non-empty")
    for idx, pair in enumerate(weights):
        if len(pair) != 2:
            _fail(f"weights[{idx}]", f"must be an [alpha, center] pair, got {pair!r}")
        alpha, center = pair
        if not abs(alpha) < 1.0:
            _fail(f"weights[{idx}]", f"|alpha| must be below 1, got {alpha!r}")
        if not 0.0 <= center < 1.0:
            _fail(f"weights[{idx}]", f"center must lie in [0, 1), got {center!r}")

    r = data.get("r", 3)
    if isinstance(r, bool) or not isinstance(r, int) or r < 1:
        _fail("r", f"must be a positive integer, got {r!r}")
    gamma = data.get("gamma")
    if gamma is not None:
        gamma = float(gamma)
        if not 0.0 < gamma < 0.5:
            _fail("gamma", f"must lie in (0, 1/2), got {gamma!r}")

    samples = data.get("samples", 20)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 1:
        _fail("samples", f"must be a positive integer, got {samples!r}")
    out = data.get("out", "reports")
    if not isinstance(out, str) or not out:
        _fail("out", f"must be a non-empty path string, got {out!r}")
    fmt = data.get("format", "json")
    if fmt not in ("json", "csv"):
        _fail("format", f"must be 'json' or 'csv', got {fmt!r}")

    return ExperimentConfig(
        suite=suite,
        seed=seed,
        levels=levels,
        lambdas=lambdas,
        exponents=exponents,
        weights=weights,
        r=r,
        gamma=gamma,
        samples=samples,
        out=out,
        format=fmt,
    )


def load_config(path) -> ExperimentConfig:
    """Read and validate a JSON experiment config; defaults filled."""
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"config file not found: {p}")
    try:
        text = p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {p}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"parse error in {p} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a JSON object")
    return _config_from_mapping(data)


def config_to_dict(config: ExperimentConfig) -> Dict:
    """JSON-ready mapping; ``load`` of a dump reproduces the config."""
    return {
        "suite": config.suite,
        "seed": config.seed,
        "levels": list(config.levels),
        "lambdas": list(config.lambdas),
        "exponents": [list(p) for p in config.exponents],
        "weights": [list(p) for p in config.weights],
        "r": config.r,
        "gamma": config.gamma,
        "samples": config.samples,
        "out": config.out,
        "format": config.format,
    }


# -- records and reports --------------------------------------------------


@dataclass(frozen=True)
class CheckRecord:
    """One verification outcome; ``hard`` marks exit-status-relevant checks."""

    name: str
    anchor: str
    value: float
    threshold: float
    passed: bool
    hard: bool = True


def _record_dict(record: CheckRecord) -> Dict:
    return {
        "name": record.name,
        "paper_anchor": record.anchor,
        "value": record.value,
        "threshold": record.threshold,
        "pass": record.passed,
    }


def emit_report(records: Sequence[CheckRecord], format: str, path, meta=None) -> None:
    """Write check records as JSON ({meta, checks}) or CSV; stable ordering."""
    out = Path(path)
    full_meta = {"seed": None, "levels": [], "version": __version__}
    if meta:
        full_meta.update(meta)
        full_meta["version"] = __version__
    try:
        if format == "json":
            payload = {
                "meta": full_meta,
                "checks": [_record_dict(r) for r in records],
            }
            out.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        elif format == "csv":
            with out.open("w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["check", "anchor", "value", "threshold", "pass"])
                for r in records:
                    writer.writerow(
                        [r.name, r.anchor, repr(r.value), repr(r.threshold),
                         "true" if r.passed else "false"]
                    )
        else:
            raise ConfigurationError(f"unknown report format {format!r}")
    except OSError as exc:
        raise ConfigurationError(f"cannot write report {out}: {exc}") from exc


def _write_samples(rows: Sequence[Tuple[str, str, float]], path) -> None:
    out = Path(path)
    try:
        with out.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["suite", "sample", "value"])
            for suite, label, value in rows:
                writer.writerow([suite, label, repr(value)])
    except OSError as exc:
        raise ConfigurationError(f"cannot write samples {out}: {exc}") from exc


# -- suites ---------------------------------------------------------------

_PER_AXIS_MIN = 2


def _per_axis(level: int) -> int:
    """Two-axis level budget: about half the configured level per axis."""
    return max(_PER_AXIS_MIN, (level + 2) // 2)


def _suite_rng(config: ExperimentConfig, suite: str) -> np.random.Generator:
    return np.random.default_rng((config.seed, SUITES.index(suite)))


def _suite_haar_verify(config: ExperimentConfig):
    rng = _suite_rng(config, "haar-verify")
    records, rows = [], []
    for level in config.levels:
        axis = build_axis(level)
        n = axis.n_cells
        offsets = sorted({0, 1, n // 2})
        worst_recon = 0.0
        worst_tel = 0.0
        for s in range(config.samples):
            f = grid_function(rng.normal(size=n), axis)
            for off in offsets:
                system = DyadicSystem(axis, off)
                recon = haar_expand(f, system).reconstruct()
                res = float(np.max(np.abs(recon.values - f.values)))
                worst_recon = max(worst_recon, res)
                total = level_average(f, system, 0).values.copy()
                for k in range(level):
                    total += level_difference(f, system, k).values
                tel = float(np.max(np.abs(total - f.values)))
                worst_tel = max(worst_tel, tel)
                rows.append(("haar-verify", f"L{level}-off{off}-s{s}", res))
        records.append(
            CheckRecord(
                name=f"haar-verify-reconstruction-L{level}",
                anchor="haar-orthonormal-expansion",
                value=worst_recon,
                threshold=1e-12,
                passed=worst_recon <= 1e-12,
            )
        )
        records.append(
            CheckRecord(
                name=f"haar-verify-telescoping-L{level}",
                anchor="martingale-telescoping",
                value=worst_tel,
                threshold=1e-12,
                passed=worst_tel <= 1e-12,
            )
        )
    return records, rows


def _suite_represent(config: ExperimentConfig):
    rng = _suite_rng(config, "represent")
    records, rows = [], []
    level = max(config.levels)
    axis = build_axis(level)
    n = axis.n_cells
    systems = [DyadicSystem(axis, off) for off in sorted({0, 1, n // 2})]
    n_pairs = min(config.samples, 5)
    subtracted = 0
    total_inputs = 0
    for lam in config.lambdas:
        params = GoodParams(config.r, config.gamma or default_gamma(lam))
        worst = 0.0
        for s in range(n_pairs):
            f = grid_function(rng.normal(size=n), axis)
            g = grid_function(rng.normal(size=n), axis)
            for h in (f, g):
                total_inputs += 1
                if abs(h.mean()) > 0.0:
                    subtracted += 1
            f = f.with_values(f.values - f.mean())
            g = g.with_values(g.values - g.mean())
            report = verify_representation(f, g, lam, params, systems)
            rel = max(report.relative_residuals)
            worst = max(worst, rel)
            rows.append(("represent", f"lam{lam:g}-s{s}", rel))
        records.append(
            CheckRecord(
                name=f"represent-identity-lam{lam:g}",
                anchor="fractional-representation-identity",
                value=worst,
                threshold=1e-8,
                passed=worst <= 1e-8,
            )
        )
    frac = subtracted / total_inputs if total_inputs else 0.0
    records.append(
        CheckRecord(
            name="represent-mean-subtraction",
            anchor="input-normalization",
            value=frac,
            threshold=1.0,
            passed=frac <= 1.0,
            hard=False,
        )
    )
    return records, rows


def _suite_weights(config: ExperimentConfig):
    records, rows = [], []
    level = max(config.levels)
    axis = build_axis(level)
    built = [power_weight(axis, a, c) for a, c in config.weights]
    deficit = 0.0
    duality = 0.0
    factorization = 0.0
    for wi, w in enumerate(built):
        for p, lam in config.exponents:
            q = exponent_solve(p, lam).q
            char = apq_characteristic(w, p, q)
            deficit = max(deficit, max(0.0, 1.0 - char))
            p_dual = p / (p - 1.0)
            q_dual = q / (q - 1.0)
            dual_char = apq_characteristic(w.power(-1.0), q_dual, p_dual)
            target = char ** (p_dual / q)
            duality = max(duality, abs(dual_char - target) / target)
            rows.append(("weights", f"w{wi}-p{p:g}-char", char))
        partner = built[(wi + 1) % len(built)]
        pw = ProductWeight(w, partner)
        p0 = config.exponents[0][0] + 1.0  # a classical exponent above 1
        joint = product_ap_characteristic(pw, p0)
        split = ap_characteristic(w, p0) * ap_characteristic(partner, p0)
        factorization = max(factorization, abs(joint - split) / split)
    records.append(
        CheckRecord(
            name="weights-characteristic-deficit",
            anchor="characteristic-lower-bound",
            value=deficit,
            threshold=1e-12,
            passed=deficit <= 1e-12,
        )
    )
    records.append(
        CheckRecord(
            name="weights-duality-identity",
            anchor="characteristic-duality",
            value=duality,
            threshold=1e-10,
            passed=duality <= 1e-10,
        )
    )
    records.append(
        CheckRecord(
            name="weights-tensor-factorization",
            anchor="tensor-factorization",
            value=factorization,
            threshold=1e-12,
            passed=factorization <= 1e-12,
        )
    )
    return records, rows


def _suite_norms(config: ExperimentConfig):
    rng = _suite_rng(config, "norms")
    records, rows = [], []
    lam = config.lambdas[0]

    plancherel = 0.0
    deficit = 0.0
    for level in config.levels:
        axis = build_axis(level)
        system = DyadicSystem(axis, 0)
        for s in range(min(config.samples, 10)):
            f = grid_function(rng.normal(size=axis.n_cells), axis)
            sq = square_function(f, system, mode="sole")
            centered = f.with_values(f.values - f.mean())
            rel = abs(l2_norm(sq) - l2_norm(centered)) / l2_norm(centered)
            plancherel = max(plancherel, rel)
            rows.append(("norms", f"L{level}-s{s}-plancherel", rel))
        per = _per_axis(level)
        baxis = build_axis(per)
        for s in range(min(config.samples, 5)):
            g = grid_function(
                rng.normal(size=(baxis.n_cells, baxis.n_cells)), baxis, baxis
            )
            m = strong_maximal(g)
            gap = float(np.max(np.abs(g.values) - m.values))
            deficit = max(deficit, max(0.0, gap))
    records.append(
        CheckRecord(
            name="norms-square-energy",
            anchor="square-function-energy",
            value=plancherel,
            threshold=1e-12,
            passed=plancherel <= 1e-12,
        )
    )
    records.append(
        CheckRecord(
            name="norms-maximal-domination-deficit",
            anchor="maximal-pointwise-domination",
            value=deficit,
            threshold=1e-12,
            passed=deficit <= 1e-12,
        )
    )

    def profile(x):
        return 2.0 + np.sin(2.0 * np.pi * x)

    ratios = []
    for level in sorted(set(config.levels)):
        axis = build_axis(level)
        f = tabulate_midpoint(profile, axis)
        ratio = frac_maximal_domination(f, DyadicSystem(axis, 0), lam)
        ratios.append(ratio)
        rows.append(("norms", f"L{level}-frac-domination", ratio))
    variation = (max(ratios) - min(ratios)) / min(ratios)
    records.append(
        CheckRecord(
            name="norms-frac-domination-variation",
            anchor="fractional-maximal-domination",
            value=variation,
            threshold=0.2,
            passed=variation <= 0.2,
            hard=False,
        )
    )
    return records, rows


def _suite_decompose(config: ExperimentConfig):
    rng = _suite_rng(config, "decompose")
    records, rows = [], []
    worst = 0.0
    for level in config.levels:
        per = _per_axis(level)
        axis = build_axis(per)
        pair = (DyadicSystem(axis, 0), DyadicSystem(axis, 1 % axis.n_cells))
        for s in range(config.samples):
            shape = (axis.n_cells, axis.n_cells)
            b = grid_function(rng.normal(size=shape), axis, axis)
            f = grid_function(rng.normal(size=shape), axis, axis)
            report = decompose_product(b, f, pair)
            scale = float(np.max(np.abs(b.values * f.values)))
            rel = report.residual / scale
            worst = max(worst, rel)
            rows.append(("decompose", f"L{per}x{per}-s{s}", rel))
    records.append(
        CheckRecord(
            name="decompose-product-residual",
            anchor="nine-term-product-split",
            value=worst,
            threshold=1e-12,
            passed=worst <= 1e-12,
        )
    )
    return records, rows


def _suite_commutator(config: ExperimentConfig):
    rng = _suite_rng(config, "commutator")
    records, rows = [], []
    lam1 = config.lambdas[0]
    lam2 = config.lambdas[-1]
    worst = 0.0
    for level in config.levels:
        per = _per_axis(level)
        axis = build_axis(per)
        s1 = DyadicSystem(axis, 0)
        s2 = DyadicSystem(axis, axis.n_cells // 2)
        depth_cases = [(1, 0, 0, 1), (0, 0, 1, 1), (1, 1, 1, 0)]
        depth_cases = [
            c for c in depth_cases if max(c) < per
        ]
        for ci, (i, j, s_, t_) in enumerate(depth_cases):
            t1 = maximal_table(s1, i, j, lam1)
            t2 = maximal_table(s2, s_, t_, lam2)
            for s in range(min(config.samples, 10)):
                shape = (axis.n_cells, axis.n_cells)
                b = grid_function(rng.normal(size=shape), axis, axis)
                f = grid_function(rng.normal(size=shape), axis, axis)
                expansion = shift_commutator_expand(
                    b, f, (i, j, lam1, t1), (s_, t_, lam2, t2), (s1, s2)
                )
                worst = max(worst, expansion.residual)
                rows.append(
                    ("commutator", f"L{per}x{per}-c{ci}-s{s}", expansion.residual)
                )
    records.append(
        CheckRecord(
            name="commutator-expansion-residual",
            anchor="shift-commutator-expansion",
            value=worst,
            threshold=1e-10,
            passed=worst <= 1e-10,
        )
    )
    return records, rows


def _suite_bloom(config: ExperimentConfig):
    records, rows = [], []
    p, lam = config.exponents[0]
    bloom = BloomConfig(
        p1=p, p2=p, lam1=lam, lam2=lam,
        n_samples=min(config.samples, 10),
        seed=config.seed,
    )
    report = bloom_experiment(bloom)
    n_quads = len(report.levels[0].quads)
    worst_char = 0.0
    for qi in range(n_quads):
        maxima = []
        for level_result in report.levels:
            quad = level_result.quads[qi]
            maxima.append(quad.max_ratio)
            worst_char = max(worst_char, max(quad.characteristics))
            rows.append(("bloom", f"L{level_result.level}-quad{qi}", quad.max_ratio))
        low = min(maxima)
        variation = (max(maxima) - low) / low if low > 0.0 else float(max(maxima) > 0.0)
        records.append(
            CheckRecord(
                name=f"bloom-ratio-variation-quad{qi}",
                anchor="two-weight-ratio-stability",
                value=variation,
                threshold=0.5,
                passed=variation <= 0.5,
                hard=False,
            )
        )
    records.append(
        CheckRecord(
            name="bloom-characteristic-budget",
            anchor="characteristic-budget",
            value=worst_char,
            threshold=10.0,
            passed=worst_char <= 10.0,
            hard=False,
        )
    )
    return records, rows


_SUITE_FUNCTIONS = {
    "bloom": _suite_bloom,
    "commutator": _suite_commutator,
    "decompose": _suite_decompose,
    "haar-verify": _suite_haar_verify,
    "norms": _suite_norms,
    "represent": _suite_represent,
    "weights": _suite_weights,
}


# -- orchestration --------------------------------------------------------


@dataclass(frozen=True)
class SuiteOutcome:
    exit_code: int
    records: Tuple[CheckRecord, ...]
    report_path: Path
    samples_path: Path


def _thread_cap() -> int:
    raw = os.environ.get("DYADICA_THREADS", "1")
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ConfigurationError(
            f"DYADICA_THREADS must be an integer, got {raw!r}"
        ) from exc
    return max(1, cap)


def _run_one(name: str, config: ExperimentConfig):
    try:
        return _SUITE_FUNCTIONS[name](config)
    except DyadicaError as exc:
        record = CheckRecord(
            name=f"{name}-contract-error",
            anchor=f"error-{type(exc).__name__}",
            value=1.0,
            threshold=0.0,
            passed=False,
        )
        return [record], []


def run_suite(config: ExperimentConfig, strict: bool = False) -> SuiteOutcome:
    """Run the configured suite(s); write report and sample files.

    Exit code 0 when all hard checks pass (and, in strict mode, all
    stability checks too), else 1.  Deterministic for a fixed config.
    """
    names = list(SUITES) if config.suite == "all" else [config.suite]
    cap = _thread_cap()
    results: Dict[str, Tuple[List[CheckRecord], List]] = {}
    if cap > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=min(cap, len(names))) as pool:
            futures = {name: pool.submit(_run_one, name, config) for name in names}
            for name, fut in futures.items():
                results[name] = fut.result()
    else:
        for name in names:
            results[name] = _run_one(name, config)

    records: List[CheckRecord] = []
    rows: List[Tuple[str, str, float]] = []
    for name in sorted(names):
        suite_records, suite_rows = results[name]
        records.extend(sorted(suite_records, key=lambda r: r.name))
        rows.extend(suite_rows)

    out_dir = Path(config.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigurationError(f"cannot create output dir {out_dir}: {exc}") from exc
    report_path = out_dir / ("report.json" if config.format == "json" else "report.csv")
    samples_path = out_dir / "samples.csv"
    meta = {"seed": config.seed, "levels": list(config.levels)}
    emit_report(records, config.format, report_path, meta=meta)
    _write_samples(rows, samples_path)

    failed = any(
        (not r.passed) and (r.hard or strict) for r in records
    )
    return SuiteOutcome(
        exit_code=1 if failed else 0,
        records=tuple(records),
        report_path=report_path,
        samples_path=samples_path,
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dyadica",
        description="Verification suites for the bi-parameter dyadic toolkit.",
    )
    sub = parser.add_subparsers(dest="suite", required=True, metavar="SUITE")
    for name in SUITES + ("all",):
        p = sub.add_parser(name, help=f"run the {name} suite")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="override the seed")
        p.add_argument("--level", type=int, help="override the level list")
        p.add_argument("--out", help="override the output directory")
        p.add_argument(
            "--strict",
            action="store_true",
            help="stability warnings also fail the run",
        )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config:
            data = config_to_dict(load_config(args.config))
        else:
            data = {}
        data["suite"] = args.suite
        if args.seed is not None:
            data["seed"] = args.seed
        if args.level is not None:
            data["levels"] = [args.level]
        if args.out is not None:
            data["out"] = args.out
        config = _config_from_mapping(data)
        outcome = run_suite(config, strict=args.strict)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for record in outcome.records:
        status = "pass" if record.passed else "FAIL"
        print(
            f"{record.name}: {status} "
            f"(value={record.value:.6g}, threshold={record.threshold:g})"
        )
    print(f"report: {outcome.report_path}")
    print(f"samples: {outcome.samples_path}")
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
