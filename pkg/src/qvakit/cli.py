"""Command-line suite runner: qvakit --family gl --N 2 --suite rmatrix-core --report out.json"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from . import axioms, config, realizations, rmatrix
from .algebra import make_spec
from .errors import QvaError, UsageError
from .report import CheckReport, reports_to_json, skipped
from .scalar import f_residuals, f_series, format_f_cache, parse_f_cache

SUITES = (
    "rmatrix-core",
    "fusion",
    "braiding-sigma-rho",
    "braiding-mu-nu",
    "hexagons",
    "fixed-points",
    "ek-braiding",
    "deformed-yangian",
    "deformed-generalized",
    "deformed-reflection",
    "commutative-families",
    "centrality",
    "negative-controls",
)

GRID = 4
GL_ONLY = "skipped: needs gl"


@dataclass(frozen=True)
class RunConfig:
    family: str
    N: int
    H: int = 6
    K: int = 12
    seed: int = 0
    samples: int = 5
    suites: tuple = ()
    report: str | None = None

    def __post_init__(self):
        if self.H < 1:
            raise UsageError("--h-order must be at least 1")
        if self.K < max(1, self.H - 1):
            raise UsageError("--f-order must be at least max(1, h-order - 1)")
        if self.samples < 3:
            raise UsageError("--samples must be at least 3")
        if not self.suites:
            raise UsageError("empty suite list")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise UsageError(f"unknown suite id(s): {', '.join(unknown)}")
        make_spec(self.family, self.N)

    @property
    def spec(self):
        return make_spec(self.family, self.N)


@dataclass(frozen=True)
class Job:
    """One check call: module.func(spec, *args, **kwargs), optionally as an expected failure."""

    module: str
    func: str
    args: tuple = ()
    kwargs: tuple = ()
    control: bool = False
    min_h: int = 0
    skip: str = ""
    label: str = ""


_MODULES = {"rmatrix": rmatrix, "axioms": axioms, "realizations": realizations}


def job(module: str, func: str, *args, control: bool = False, min_h: int = 0, skip: str = "", label: str = "",
        **kwargs) -> Job:
    return Job(module, func, args, tuple(sorted(kwargs.items())), control, min_h, skip, label)


def expect_failure(rep: CheckReport) -> CheckReport:
    """A negative control passes when every one of its samples failed."""
    first = rep.h_order
    ok = rep.verdict == "fail" and all(s["verdict"] == "fail" for s in rep.samples)
    for s in rep.samples:
        s["verdict"] = "pass" if s["verdict"] == "fail" else "fail"
    rep.verdict = "pass" if ok else "fail"
    rep.note = f"expected failure, first difference at h^{first}" if ok else "control did not fail at every sample"
    return rep


def run_job(j: Job, spec, H: int, seed: int, timing: bool = False) -> list:
    if j.skip:
        return [skipped(j.label or j.func, {"spec": spec.label, "H": H}, seed, j.skip)]
    if H < j.min_h:
        return [skipped(j.label or j.func, {"spec": spec.label, "H": H}, seed, f"skipped: needs h-order >= {j.min_h}")]
    t0 = time.perf_counter()
    out = getattr(_MODULES[j.module], j.func)(*j.args, **dict(j.kwargs))
    out = list(out) if isinstance(out, (list, tuple)) else [out]
    if j.control:
        out = [expect_failure(r) if r.verdict in ("pass", "fail") else r for r in out]
    millis = int((time.perf_counter() - t0) * 1000) if timing else None
    for r in out:
        r.millis = millis
    return out


def suite_jobs(suite: str, cfg: RunConfig) -> list:
    """The check calls making up one suite for the configured algebra."""
    spec, H, R, seed = cfg.spec, cfg.H, cfg.samples, cfg.seed
    gl = spec.family == "gl"
    nmax = min(2, rmatrix.max_fusion(spec))
    common = {"H": H, "samples": R, "seed": seed}
    grid = {"H": H, "grid": GRID, "seed": seed}
    J = []
    if suite == "rmatrix-core":
        J.append(job("rmatrix", "check_f_series", spec, cfg.K, seed=seed))
        for kind in ("plain", "normalized"):
            J.append(job("rmatrix", "check_qybe", spec, kind, H, samples=R, seed=seed))
        for which in rmatrix.family_symmetries(spec):
            J.append(job("rmatrix", "check_symmetries", spec, which, H, samples=R, seed=seed))
    elif suite == "fusion":
        for n in range(1, min(3, rmatrix.max_fusion(spec)) + 1):
            J.append(job("rmatrix", "check_fusion", spec, n, H, samples=R, seed=seed))
    elif suite == "braiding-sigma-rho":
        J.append(job("axioms", "check_map_qybe", spec, "sigma", **common))
        J.append(job("axioms", "check_map_unitarity", spec, "sigma", **common))
        J.append(job("axioms", "check_compatibility", spec, "sigma-rho", **common))
    elif suite == "braiding-mu-nu":
        names = [("check_map_qybe", "mu"), ("check_map_unitarity", "mu"), ("check_singularity", "mu"),
                 ("check_compatibility", "mu-nu")]
        names += [("check_equivalence", w) for w in axioms.EQUIVALENCES if w != "rho-sigma-ek"]
        for func, which in names:
            kw = dict(common, samples=min(R, 3)) if func == "check_singularity" else common
            J.append(job("axioms", func, spec, which, skip="" if gl else GL_ONLY, label=f"{func}-{which}", **kw))
    elif suite == "hexagons":
        for which in axioms.HEXAGONS:
            skip = GL_ONLY if which == "gamma" and not gl else ""
            J.append(job("axioms", "check_hexagon", spec, which, skip=skip, label=f"hexagon-{which}", **common))
    elif suite == "fixed-points":
        for name in ("sigma", "rho"):
            for n in range(1, nmax + 1):
                for m in range(1, nmax + 1):
                    J.append(job("axioms", "check_fixed_point", spec, name, n, m, **common))
        # the fused length must be N here: w (x) T_[m] with m < N is not fixed
        for name in ("sigma", "rho", "mu"):
            J.append(job("axioms", "check_fixed_point", spec, name, 2, spec.N, form="w", skip="" if gl else GL_ONLY,
                         label=f"fixed-point-{name}-w", **common))
        J.append(job("axioms", "check_fixed_point", spec, "mu", 1, 1, skip="" if gl else GL_ONLY,
                     label="fixed-point-mu-traced", **common))
    elif suite == "ek-braiding":
        J.append(job("axioms", "check_ek_identity", spec, **common))
        J.append(job("axioms", "check_equivalence", spec, "rho-sigma-ek", **common))
        J.append(job("axioms", "check_map_qybe", spec, "S", **common))
        J.append(job("axioms", "check_map_unitarity", spec, "S", **common))
    elif suite in ("deformed-yangian", "deformed-generalized", "deformed-reflection"):
        tag = {"deformed-yangian": "yangian", "deformed-generalized": "generalized_yangian",
               "deformed-reflection": "reflection"}[suite]
        skip = GL_ONLY if tag == "reflection" and not gl else ""
        kind = realizations.ModuleKind(tag)
        for n in range(3):
            for m in range(3):
                J.append(job("realizations", "deformed_axioms_check", kind, spec, n, m, skip=skip,
                             label=f"deformed-{tag}", **common))
        if tag != "reflection":
            fam = "T" if tag == "yangian" else "L"
            J.append(job("realizations", "check_rtt", spec, tag=fam, **common))
            if not gl:
                J.append(job("realizations", "check_crossing_relation", spec, tag=fam, **common))
        else:
            rkw = dict(common, L=2)
            for func in ("check_b_unitarity", "check_reflection_equation"):
                J.append(job("realizations", func, spec, skip=skip, label=func, **rkw))
            for n in (1, 2):
                for m in (1, 2):
                    J.append(job("realizations", "check_generalized_reflection", spec, n, m, skip=skip,
                                 label="reflection-generalized", **rkw))
            for n, m in ((1, 1), (2, 1)):
                J.append(job("realizations", "check_b_factorization", spec, n, m, skip=skip,
                             label="reflection-factorization", **rkw))
    elif suite == "commutative-families":
        for series in ("T_minus", "L"):
            for n1 in range(1, nmax + 1):
                for n2 in range(1, nmax + 1):
                    J.append(job("realizations", "commutativity_check", series, spec, n1, n2, **grid))
        for n1 in sorted({1, spec.N}):
            for n2 in sorted({1, spec.N}):
                J.append(job("realizations", "commutativity_check", "B", spec, n1, n2, skip="" if gl else GL_ONLY,
                             label="commutative-B", **grid))
    elif suite == "centrality":
        for which in realizations.CENTRAL:
            J.append(job("realizations", "centrality_check", which, spec, skip="" if gl else GL_ONLY,
                         label=f"centrality-{which}", **grid))
    elif suite == "negative-controls":
        J.append(job("rmatrix", "check_qybe", spec, "plain", H, samples=R, seed=seed, mutate="quadratic",
                     control=True, min_h=4, label="qybe-quadratic"))
        if not gl:
            J.append(job("rmatrix", "check_qybe", spec, "plain", H, samples=R, seed=seed, mutate="scaled",
                         control=True, min_h=3, label="qybe-scaled"))
        J.append(job("axioms", "check_singularity", spec, "control", control=True, min_h=2,
                     label="braiding-singularity-control", **dict(common, samples=min(R, 3))))
        J.append(job("axioms", "check_compatibility", spec, "sigma-iota", control=True, min_h=3,
                     label="compatibility-sigma-iota", **common))
        J.append(job("axioms", "check_fixed_point", spec, "rho", 1, 1, level=spec.c_crit + 1, control=True,
                     min_h=5, label="fixed-point-rho-traced", **common))
        J.append(job("axioms", "check_fixed_point", spec, "sigma", 2, 1, form="w", control=True, min_h=4,
                     label="fixed-point-sigma-w", **common))
        J.append(job("realizations", "negative_commutator_check", spec, order=2, min_h=3,
                     label="negative-generator-commutator", **grid))
        J.append(job("realizations", "centrality_check", "qdet_yangian", spec, n=1, control=True, min_h=4,
                     skip="" if gl else GL_ONLY, label="centrality-qdet_yangian", **grid))
    return J


# --- execution ------------------------------------------------------------------


def _init_worker(budget: int, f_order: int, spec, cache: str | None) -> None:
    config.set_budget(budget)
    config.set_f_order(f_order)
    if cache:
        load_f_cache(spec, cache)


def _work(args) -> list:
    j, spec, H, seed, timing = args
    return run_job(j, spec, H, seed, timing)


def run_suite(cfg: RunConfig, workers: int | None = None, timing: bool = False, budget: int | None = None,
              f_cache: str | None = None) -> list:
    """Run every suite in cfg, in order; results do not depend on the worker count."""
    budget = config.budget() if budget is None else budget
    _init_worker(budget, cfg.K, cfg.spec, f_cache)
    jobs = [j for s in cfg.suites for j in suite_jobs(s, cfg)]
    tasks = [(j, cfg.spec, cfg.H, cfg.seed, timing) for j in jobs]
    workers = config.worker_count() if workers is None else workers
    if workers <= 1 or len(tasks) <= 1:
        results = [_work(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks)), initializer=_init_worker,
                                 initargs=(budget, cfg.K, cfg.spec, f_cache)) as pool:
            results = list(pool.map(_work, tasks))
    return [r for rs in results for r in rs]


def cache_f(spec, K: int, path: str) -> None:
    """Write or refresh the f-coefficient cache; an existing valid file for the same algebra is reused."""
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            family, N, k0, f = parse_f_cache(fh.read())
        if (family, N) == (spec.family, spec.N) and k0 >= K and not any(f_residuals(spec, f)):
            return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_f_cache(spec, f_series(spec, K)))


def load_f_cache(spec, path: str) -> None:
    with open(path, encoding="utf-8") as fh:
        family, N, K, f = parse_f_cache(fh.read())
    if (family, N) != (spec.family, spec.N):
        raise UsageError(f"f cache {path} is for {family}_{N}, not {spec.label}")
    rmatrix.seed_f_cache(spec, f)


# --- argument parsing -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qvakit", description="Exact identity checks for R-matrix algebras.")
    p.add_argument("--family", required=True, choices=("gl", "o", "sp"))
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--h-order", type=int, default=6, help="truncation order H in h (default 6)")
    p.add_argument("--f-order", type=int, default=12, help="truncation order K of f in 1/u (default 12)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=5, help="sampled points per check (at least 3)")
    p.add_argument("--suite", required=True, help="comma-separated suite ids: " + ", ".join(SUITES))
    p.add_argument("--report", help="write the JSON report here (default: stdout)")
    p.add_argument("--budget", type=int, default=config.DEFAULT_BUDGET, help="largest operator arity (default 7)")
    p.add_argument("--timing", action="store_true", help="record wall time per check (reports are then not reproducible)")
    p.add_argument("--cache-f", metavar="PATH", help="write the f coefficients to PATH and reuse them from there")
    p.add_argument("--workers", type=int, help="worker processes (default: QVAKIT_WORKERS or CPU count)")
    return p


def config_from_args(ns) -> RunConfig:
    suites = tuple(s.strip() for s in ns.suite.split(",") if s.strip())
    return RunConfig(ns.family, ns.N, ns.h_order, ns.f_order, ns.seed, ns.samples, suites, ns.report)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        if ns.budget < 1:
            raise UsageError("--budget must be at least 1")
        if ns.cache_f:
            cache_f(cfg.spec, cfg.K, ns.cache_f)
        reports = run_suite(cfg, workers=ns.workers, timing=ns.timing, budget=ns.budget, f_cache=ns.cache_f)
    except UsageError as e:
        parser.error(str(e))
    except QvaError as e:
        print(f"qvakit: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    text = reports_to_json(reports) + "\n"
    if cfg.report:
        with open(cfg.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failed = [r for r in reports if r.failed]
    for r in reports:
        print(f"{r.verdict:>16}  {r.id}  {r.params}", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
