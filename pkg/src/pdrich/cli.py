"""Command-line surface: ingest abundance data, fit, predict, simulate.

Every subcommand emits one machine-readable report (JSON by default, TSV
mirror with --format tsv).  Floats are serialized with 17 significant
digits; reports are byte-identical for identical command lines and seeds
once the timestamp is disabled (--no-timestamp).  PDRICH_SEED provides a
default seed; --seed overrides.
"""

import argparse
import csv
import math
import os
import sys
import time
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .backend import BACKEND
from .prior import (
    ParameterBox,
    PartitionData,
    PDParams,
    fit_params,
    kn_mean,
    kn_moment,
    kn_pmf,
)
from .conditional import (
    DEFAULT_EXACT_CAP,
    PredictionQuery,
    credible_interval,
    km_mean,
    km_moment,
    km_pmf,
    sm_pmf,
)
from .asymptotics import (
    LimitLaw,
    km_moment_asymptotic,
    limit_distribution_grid,
    limit_moment,
    sample_limit,
)
from . import oracle as oracle_mod
from . import simulate as sim


@dataclass(frozen=True)
class AbundanceDataset:
    """Parsed species-abundance records with unique labels."""

    records: tuple  # ((label, count), ...)

    @property
    def partition(self) -> PartitionData:
        return PartitionData(tuple(c for _, c in self.records))


def ingest(path: str, fmt: str = "csv") -> AbundanceDataset:
    """Read abundance data: CSV with header species,count or bare counts."""
    if fmt == "csv":
        records = []
        seen = set()
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: empty dataset") from None
            if [h.strip().lower() for h in header] != ["species", "count"]:
                raise ValueError(f"{path}:1: expected header 'species,count'")
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                if len(row) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
                label = row[0].strip()
                try:
                    count = int(row[1])
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: count {row[1]!r} is not an integer") from None
                if count < 1:
                    raise ValueError(f"{path}:{lineno}: count must be positive, got {count}")
                if label in seen:
                    raise ValueError(f"{path}:{lineno}: duplicate species label {label!r}")
                seen.add(label)
                records.append((label, count))
        if not records:
            raise ValueError(f"{path}: empty dataset")
        return AbundanceDataset(tuple(records))
    if fmt == "counts":
        records = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                for tok in line.split():
                    try:
                        count = int(tok)
                    except ValueError:
                        raise ValueError(f"{path}:{lineno}: count {tok!r} is not an integer") from None
                    if count < 1:
                        raise ValueError(f"{path}:{lineno}: count must be positive, got {count}")
                    records.append((f"sp{len(records) + 1}", count))
        if not records:
            raise ValueError(f"{path}: empty dataset")
        return AbundanceDataset(tuple(records))
    raise ValueError(f"unknown input format {fmt!r}")


@dataclass(frozen=True)
class RunConfig:
    """Resolved run options shared by the subcommands."""

    params: PDParams | None
    m: int | None
    r_list: tuple
    level: float
    method: str
    seed: int
    fmt: str
    exact_cap: int
    runs: int
    timestamp: bool
    params_source: str | None = None


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(float(x), ".17g")


def _json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  "{k}": {_json(v, indent + 1)}' for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple)) for v in obj)
        if flat:
            return "[" + ", ".join(_json(v) for v in obj) + "]"
        items = [f"{pad}  {_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    s = str(obj).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


def _tsv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _render_tsv(results: dict) -> str:
    lines = []
    for key, val in results.items():
        if isinstance(val, dict) and set(val) == {"columns", "rows"}:
            lines.append("\t".join(str(c) for c in val["columns"]))
            for row in val["rows"]:
                lines.append("\t".join(_tsv_cell(c) for c in row))
        elif isinstance(val, dict):
            for k2, v2 in val.items():
                lines.append(f"{key}.{k2}\t{_tsv_cell(v2)}")
        elif isinstance(val, (list, tuple)):
            lines.append(key + "\t" + "\t".join(_tsv_cell(v) for v in val))
        else:
            lines.append(f"{key}\t{_tsv_cell(val)}")
    return "\n".join(lines)


def _table(columns, rows) -> dict:
    return {"columns": list(columns), "rows": [list(r) for r in rows]}


def _report(subcommand: str, inputs: dict, results: dict, cfg: RunConfig,
            method: str | None = None, tolerances: dict | None = None) -> dict:
    out = {
        "tool": "pdrich",
        "version": __version__,
        "backend": BACKEND,
        "subcommand": subcommand,
        "inputs": inputs,
    }
    if method is not None:
        out["method"] = method
    if tolerances:
        out["tolerances"] = tolerances
    if cfg.params_source is not None:
        out["params_source"] = cfg.params_source
    out["seed"] = cfg.seed
    out["results"] = results
    if cfg.timestamp:
        out["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    return out


def _pmf_table(pmf, label: str) -> dict:
    return _table((label, "prob"), zip(pmf.support.tolist(), pmf.probs.tolist()))


def _need_params(cfg: RunConfig) -> PDParams:
    if cfg.params is None:
        raise ValueError("this subcommand needs --alpha and --theta (or a prior `fit`)")
    return cfg.params


def _resolve_nk(args, dataset: AbundanceDataset | None):
    if args.n is not None:
        n = args.n
        k = args.k if getattr(args, "k", None) is not None else None
        return n, k
    if dataset is not None:
        part = dataset.partition
        return part.n, part.k
    raise ValueError("need --n (and --k) or --input")


def _cmd_fit(args, cfg, dataset):
    if dataset is None:
        raise ValueError("fit needs --input")
    part = dataset.partition
    box = ParameterBox()
    res = fit_params(part, box)
    results = {
        "alpha": res.params.alpha,
        "theta": res.params.theta,
        "log_likelihood": res.log_likelihood,
        "at_boundary": list(res.at_boundary),
        "n": part.n,
        "k": part.k,
    }
    return _report("fit", {"n": part.n, "k": part.k}, results, cfg)


def _cmd_kn(args, cfg, dataset):
    params = _need_params(cfg)
    n, _ = _resolve_nk(args, dataset)
    pmf = kn_pmf(params, n)
    results = {
        "pmf": _pmf_table(pmf, "k"),
        "mean": kn_mean(params, n),
    }
    if cfg.r_list:
        results["moments"] = _table(
            ("r", "moment"), [(r, kn_moment(params, n, r)) for r in cfg.r_list]
        )
    inputs = {"alpha": params.alpha, "theta": params.theta, "n": n}
    return _report("kn", inputs, results, cfg)


def _cmd_predict(args, cfg, dataset):
    params = _need_params(cfg)
    n, k = _resolve_nk(args, dataset)
    if k is None:
        raise ValueError("predict needs --k when --n is given directly")
    if cfg.m is None:
        raise ValueError("predict needs --m")
    q = PredictionQuery(params, n, k, cfg.m)
    method = cfg.method
    if method == "auto":
        method = "exact" if cfg.m <= cfg.exact_cap else "asymptotic"
        if method == "asymptotic":
            print(
                f"warning: m={cfg.m} exceeds the exact cap {cfg.exact_cap}; "
                "switching to the asymptotic interval",
                file=sys.stderr,
            )
    mean = km_mean(q)
    if cfg.m == 0:
        interval = {"lo": 0, "hi": 0, "level": cfg.level, "achieved": 1.0}
    else:
        ci = credible_interval(q, cfg.level, method=method,
                               exact_cap=cfg.exact_cap, seed=cfg.seed)
        interval = {"lo": ci.lo, "hi": ci.hi, "level": ci.level, "achieved": ci.achieved}
    inputs = {"alpha": params.alpha, "theta": params.theta, "n": n, "k": k, "m": cfg.m}
    results = {"mean": mean, "interval": interval}
    return _report("predict", inputs, results, cfg, method=method,
                   tolerances={"exact_cap": cfg.exact_cap, "level": cfg.level})


def _cmd_pmf(args, cfg, dataset):
    params = _need_params(cfg)
    n, k = _resolve_nk(args, dataset)
    if k is None:
        raise ValueError("pmf needs --k when --n is given directly")
    if cfg.m is None:
        raise ValueError("pmf needs --m")
    q = PredictionQuery(params, n, k, cfg.m)
    which = args.which
    pmf = km_pmf(q, exact_cap=cfg.exact_cap) if which == "km" else sm_pmf(q)
    label = "k_new" if which == "km" else "s_new"
    inputs = {"alpha": params.alpha, "theta": params.theta, "n": n, "k": k,
              "m": cfg.m, "which": which}
    return _report("pmf", inputs, {"pmf": _pmf_table(pmf, label)}, cfg, method="exact",
                   tolerances={"exact_cap": cfg.exact_cap})


def _cmd_moments(args, cfg, dataset):
    params = _need_params(cfg)
    n, k = _resolve_nk(args, dataset)
    if k is None:
        raise ValueError("moments needs --k when --n is given directly")
    if cfg.m is None:
        raise ValueError("moments needs --m")
    q = PredictionQuery(params, n, k, cfg.m)
    r_list = cfg.r_list or (1,)
    rows = []
    for r in r_list:
        rows.append((r, km_mean(q) if r == 1 else km_moment(q, r)))
    inputs = {"alpha": params.alpha, "theta": params.theta, "n": n, "k": k, "m": cfg.m}
    return _report("moments", inputs, {"moments": _table(("r", "moment"), rows)}, cfg)


def _cmd_asym(args, cfg, dataset):
    params = _need_params(cfg)
    n, k = _resolve_nk(args, dataset)
    if k is None:
        raise ValueError("asym needs --k when --n is given directly")
    law = LimitLaw(params.alpha, params.theta, n, k)
    r_list = cfg.r_list or (1, 2)
    results = {
        "limit_moments": _table(("r", "moment"), [(r, limit_moment(law, r)) for r in r_list])
    }
    if cfg.m is not None:
        results["asymptotic_moments"] = _table(
            ("r", "moment"),
            [(r, km_moment_asymptotic(law, r, cfg.m)) for r in r_list],
        )
    if args.grid_points:
        z, pdf, cdf = limit_distribution_grid(law, npoints=args.grid_points)
        results["density_grid"] = _table(
            ("z", "pdf", "cdf"), zip(z.tolist(), pdf.tolist(), cdf.tolist())
        )
    inputs = {"alpha": params.alpha, "theta": params.theta, "n": n, "k": k, "m": cfg.m}
    return _report("asym", inputs, results, cfg, method="asymptotic",
                   tolerances={"quad_abs": 1e-11, "quad_rel": 1e-10})


def _cmd_limit_sample(args, cfg, dataset):
    params = _need_params(cfg)
    n, k = _resolve_nk(args, dataset)
    if k is None:
        raise ValueError("limit-sample needs --k when --n is given directly")
    law = LimitLaw(params.alpha, params.theta, n, k)
    draws = sample_limit(law, args.count, cfg.seed, decomposition=args.decomposition)
    results = {
        "count": args.count,
        "decomposition": args.decomposition,
        "mean": float(np.mean(draws)),
        "second_moment": float(np.mean(draws**2)),
        "samples": [float(v) for v in draws],
    }
    inputs = {"alpha": params.alpha, "theta": params.theta, "n": n, "k": k}
    return _report("limit-sample", inputs, results, cfg, method="asymptotic")


def _cmd_simulate(args, cfg, dataset):
    params = _need_params(cfg)
    n, k = _resolve_nk(args, dataset)
    runs = cfg.runs
    inputs = {"alpha": params.alpha, "theta": params.theta, "n": n, "runs": runs}
    if cfg.m is None:
        ks = sim.crp_kn_batch(params, n, runs, cfg.seed)
        freqs = np.bincount(ks, minlength=n + 1)[1:] / runs
        results = {
            "empirical_mean_k": float(ks.mean()),
            "exact_mean_k": kn_mean(params, n),
            "pmf": _table(("k", "freq"), [(i + 1, float(f)) for i, f in enumerate(freqs) if f > 0]),
        }
        return _report("simulate", inputs, results, cfg)
    if k is None:
        raise ValueError("simulate with --m needs --k (pilot state summary)")
    state = sim.SeatState((n - k + 1,) + (1,) * (k - 1))
    kq, sq = sim.continue_batch(state, params, cfg.m, runs, cfg.seed)
    inputs["k"] = k
    inputs["m"] = cfg.m
    results = {
        "empirical_mean_new_species": float(kq.mean()),
        "exact_mean_new_species": km_mean(PredictionQuery(params, n, k, cfg.m)),
        "k_new_pmf": _table(
            ("k_new", "freq"),
            [(i, float(f)) for i, f in enumerate(np.bincount(kq, minlength=cfg.m + 1) / runs) if f > 0],
        ),
        "s_new_pmf": _table(
            ("s_new", "freq"),
            [(i, float(f)) for i, f in enumerate(np.bincount(sq, minlength=cfg.m + 1) / runs) if f > 0],
        ),
    }
    return _report("simulate", inputs, results, cfg)


def _cmd_deletion_check(args, cfg, dataset):
    params = _need_params(cfg)
    n, k = _resolve_nk(args, dataset)
    if k is None:
        raise ValueError("deletion-check needs --k")
    if cfg.m is None:
        raise ValueError("deletion-check needs --m")
    report = sim.deletion_check(
        params, n, k, cfg.m, cfg.runs, cfg.seed,
        significance=args.significance, null_theta=args.null_theta,
    )
    rows = [(r.s, r.count, r.p_value, r.dof, r.trivial) for r in report.strata]
    results = {
        "passed": report.passed,
        "rejected_strata": list(report.rejected),
        "null_theta": report.null_theta,
        "significance": report.significance,
        "strata": _table(("s", "count", "p_value", "dof", "trivial"), rows),
    }
    inputs = {"alpha": params.alpha, "theta": params.theta, "n": n, "k": k,
              "m": cfg.m, "runs": cfg.runs}
    return _report("deletion-check", inputs, results, cfg,
                   tolerances={"significance": args.significance})


def _cmd_oracle(args, cfg, dataset):
    params = _need_params(cfg)
    from fractions import Fraction

    rp = oracle_mod.RationalParams(
        Fraction(params.alpha).limit_denominator(10**6),
        Fraction(params.theta).limit_denominator(10**6),
    )
    if args.oracle_op == "kn":
        n, _ = _resolve_nk(args, dataset)
        masses = oracle_mod.exact_kn_pmf(rp, n)
        rows = [(k, str(masses[k]), float(masses[k])) for k in sorted(masses)]
        results = {"pmf": _table(("k", "exact", "float"), rows)}
        inputs = {"alpha": str(rp.alpha), "theta": str(rp.theta), "n": n}
        return _report("oracle", inputs, results, cfg, method="exact-rational")
    if dataset is None:
        raise ValueError("oracle km needs --input with the pilot counts")
    if cfg.m is None:
        raise ValueError("oracle km needs --m")
    pilot = dataset.partition.counts
    cond = oracle_mod.exact_km_pmf(rp, pilot, cfg.m)
    rows = [(j, str(p), float(p)) for j, p in enumerate(cond.pmf)]
    results = {"pmf": _table(("k_new", "exact", "float"), rows)}
    inputs = {"alpha": str(rp.alpha), "theta": str(rp.theta),
              "pilot": list(pilot), "m": cfg.m}
    return _report("oracle", inputs, results, cfg, method="exact-rational")


_COMMANDS = {
    "fit": _cmd_fit,
    "kn": _cmd_kn,
    "predict": _cmd_predict,
    "pmf": _cmd_pmf,
    "moments": _cmd_moments,
    "asym": _cmd_asym,
    "limit-sample": _cmd_limit_sample,
    "simulate": _cmd_simulate,
    "deletion-check": _cmd_deletion_check,
    "oracle": _cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdrich",
        description="Species-richness prediction under a two-parameter "
        "Poisson-Dirichlet prior",
    )
    parser.add_argument("--version", action="version", version=f"pdrich {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p, *, needs_m=False, needs_which=False):
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--theta", type=float, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--r", type=str, default=None,
                       help="comma-separated moment orders, e.g. 1,2,3")
        p.add_argument("--level", type=float, default=0.95)
        p.add_argument("--method", choices=["exact", "asymptotic", "auto"], default="auto")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--runs", type=int, default=100_000)
        p.add_argument("--format", choices=["json", "tsv"], default="json")
        p.add_argument("--exact-cap", type=int, default=DEFAULT_EXACT_CAP)
        p.add_argument("--no-timestamp", action="store_true")
        p.add_argument("--input", type=str, default=None)
        p.add_argument("--input-format", choices=["csv", "counts"], default="csv")
        if needs_which:
            p.add_argument("--which", choices=["km", "sm"], default="km")

    for name in _COMMANDS:
        p = sub.add_parser(name)
        common(p, needs_which=(name == "pmf"))
        if name == "asym":
            p.add_argument("--grid-points", type=int, default=0)
        if name == "limit-sample":
            p.add_argument("--count", type=int, default=1000)
            p.add_argument("--decomposition", choices=["primary", "alternative"],
                           default="primary")
        if name == "deletion-check":
            p.add_argument("--significance", type=float, default=0.001)
            p.add_argument("--null-theta", type=float, default=None)
        if name == "oracle":
            p.add_argument("--oracle-op", choices=["kn", "km"], default="kn")
    return parser


def _make_config(args) -> RunConfig:
    params = None
    if args.alpha is not None or args.theta is not None:
        if args.alpha is None or args.theta is None:
            raise ValueError("--alpha and --theta must be given together")
        params = PDParams(args.alpha, args.theta)
    if args.seed is not None:
        seed = args.seed
    else:
        seed = int(os.environ.get("PDRICH_SEED", "0"))
    r_list = ()
    if args.r:
        r_list = tuple(int(tok) for tok in args.r.split(",") if tok.strip())
    return RunConfig(
        params=params,
        m=args.m,
        r_list=r_list,
        level=args.level,
        method=args.method,
        seed=seed,
        fmt=args.format,
        exact_cap=args.exact_cap,
        runs=args.runs,
        timestamp=not args.no_timestamp,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _make_config(args)
        dataset = ingest(args.input, args.input_format) if args.input else None
        if cfg.params is not None:
            cfg = replace(cfg, params_source="flags")
        elif dataset is not None and args.cmd != "fit" and dataset.partition.k >= 2:
            # no explicit parameters: fall back to an empirical-Bayes fit
            fitted = fit_params(dataset.partition)
            cfg = replace(cfg, params=fitted.params, params_source="fit")
        report = _COMMANDS[args.cmd](args, cfg, dataset)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if cfg.fmt == "tsv":
        print(_render_tsv(report["results"]))
    else:
        print(_json(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
