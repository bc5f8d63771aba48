"""Check reports and seeded sampling of spectral points."""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import PoleAtSample
from .scalar import Rat, rat_str

BOUND = 97
MAX_RESAMPLE = 50


def _jsonable(v):
    if isinstance(v, type(Rat(0))):
        return rat_str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


@dataclass
class CheckReport:
    id: str
    params: dict
    verdict: str
    h_order: int
    samples: list = field(default_factory=list)
    seed: int = 0
    millis: int | None = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def failed(self) -> bool:
        return self.verdict == "fail"

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "params": _jsonable(self.params),
            "verdict": self.verdict,
            "h_order": self.h_order,
            "samples": [{"point": _jsonable(s["point"]), "verdict": s["verdict"]} for s in self.samples],
            "seed": self.seed,
            "millis": self.millis,
        }
        if self.note:
            d["note"] = self.note
        return d


def reports_to_json(reports: Sequence[CheckReport]) -> str:
    if not reports:
        return "[]"
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=False)


def write_report(reports: Sequence[CheckReport], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(reports_to_json(reports))
        fh.write("\n")


def read_report(path: str) -> list:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


class Sampler:
    """Seeded source of small-height nonzero rationals."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def rat(self) -> Rat:
        while True:
            p = self.rng.randint(-BOUND, BOUND)
            if p:
                return Rat(p, self.rng.randint(1, BOUND))

    def point(self, k: int) -> list:
        return [self.rat() for _ in range(k)]


def compare_ops(lhs, rhs) -> int | None:
    """First differing h-order between two operators (or lists of them)."""
    if isinstance(lhs, (list, tuple)):
        worst = None
        for a, b in zip(lhs, rhs):
            d = compare_ops(a, b)
            if d is not None and (worst is None or d < worst):
                worst = d
        return worst
    if hasattr(lhs, "first_difference"):
        return lhs.first_difference(rhs)
    return None if lhs == rhs else 0


def run_sampled(
    check_id: str,
    params: dict,
    seed: int,
    samples: int,
    nvars: int,
    H: int,
    fn: Callable,
    timing: bool = False,
) -> CheckReport:
    """Evaluate fn(point) -> (lhs, rhs) at seeded points and compare exactly.

    Points hitting a pole at h^0 are redrawn. The h_order field is the
    number of leading h-orders that agreed at every sample.
    """
    t0 = time.perf_counter()
    sampler = Sampler(seed)
    out = []
    h_order = H
    for _ in range(samples):
        for _attempt in range(MAX_RESAMPLE):
            pt = sampler.point(nvars)
            try:
                lhs, rhs = fn(pt)
            except PoleAtSample:
                continue
            break
        else:
            raise PoleAtSample(f"{check_id}: no pole-free sample after {MAX_RESAMPLE} draws")
        d = compare_ops(lhs, rhs)
        out.append({"point": pt, "verdict": "pass" if d is None else "fail"})
        if d is not None:
            h_order = min(h_order, d)
    verdict = "pass" if all(s["verdict"] == "pass" for s in out) else "fail"
    millis = int((time.perf_counter() - t0) * 1000) if timing else None
    return CheckReport(check_id, dict(params), verdict, h_order, out, seed, millis)


def skipped(check_id: str, params: dict, seed: int, reason: str = "skipped: budget") -> CheckReport:
    return CheckReport(check_id, dict(params), reason, 0, [], seed, None)


def run_exact(check_id: str, params: dict, seed: int, H: int, fn: Callable) -> CheckReport:
    """A point-free comparison: fn() -> (lhs, rhs), recorded as one empty-point sample."""
    lhs, rhs = fn()
    d = compare_ops(lhs, rhs)
    verdict = "pass" if d is None else "fail"
    return CheckReport(check_id, dict(params), verdict, H if d is None else d, [{"point": [], "verdict": verdict}], seed)
