"""Seeded fuzzing campaigns over the check registry.

Reports are JSON lines sorted by ``(theorem_id, n, seed, p)``, so a rerun of
the same configuration writes identical bytes whatever the worker count.
"""

from __future__ import annotations

import csv
import fnmatch
import io
import json
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..numerics import LpParam
from ..report import SIGMA_BAND, CheckReport
from .checks import REGISTRY, run_check

ONE_SIDED_3SIGMA = 0.0013498980316301  # P(Z > 3)


@dataclass
class CampaignConfig:
    dims: list[int] = field(default_factory=lambda: [1, 2, 3])
    trials: int = 25
    seed: int = 1
    theorems: list[str] = field(default_factory=lambda: ["*"])
    samples: int = 20_000
    p_values: list[str] = field(default_factory=lambda: ["1", "2", "inf"])
    measure: str = "exp:1"
    inclusion_samples: int = 300
    output: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.dims:
            raise ValueError("need at least one dimension")


def id_matches(theorem_id: str, patterns) -> bool:
    """Glob match on the full id or on its numeric part (``5.*`` selects ``thm5.4``)."""
    short = re.sub(r"^[a-z]+", "", theorem_id)
    return any(fnmatch.fnmatchcase(theorem_id, pat) or fnmatch.fnmatchcase(short, pat) for pat in patterns)


def trial_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, dtype=np.uint32)[0])


def plan(cfg: CampaignConfig) -> list[tuple[str, dict, int, int]]:
    tasks = []
    for tid in sorted(REGISTRY):
        spec = REGISTRY[tid]
        if not id_matches(tid, cfg.theorems):
            continue
        for n in cfg.dims:
            if not spec.min_n <= n <= spec.max_n:
                continue
            for p in (cfg.p_values if spec.lp else [None]):
                params = {"n": n, "samples": cfg.samples, "measure": cfg.measure, "jobs": 1,
                          "inclusion_samples": cfg.inclusion_samples}
                if p is not None:
                    params["p"] = LpParam.from_p(p).label()
                for t in range(cfg.trials):
                    tasks.append((tid, params, trial_seed(cfg.seed, t), t))
    return tasks


def _run(task) -> dict:
    tid, params, seed, _ = task
    try:
        rec = run_check(tid, params, seed).to_dict()
    except Exception as exc:  # a crash is a failed check, not a crashed campaign
        rec = {"theorem_id": tid, "instance": {"n": params["n"], "seed": seed, "p": params.get("p")},
               "pass": False, "method": "error", "error": f"{type(exc).__name__}: {exc}"}
    if "p" in params:
        rec["instance"].setdefault("p", params["p"])
    return rec


def sort_key(rec: dict):
    inst = rec.get("instance", {})
    return (rec["theorem_id"], int(inst.get("n", 0)), int(inst.get("seed", 0)), str(inst.get("p", "")))


def run_campaign(cfg: CampaignConfig) -> tuple[list[dict], dict]:
    tasks = plan(cfg)
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            records = list(ex.map(_run, tasks, chunksize=4))
    else:
        records = [_run(t) for t in tasks]
    records.sort(key=sort_key)
    summary = summarize(records)
    if cfg.output:
        path = Path(cfg.output)
        try:
            path.write_text(to_jsonl(records))
        except OSError as exc:
            raise OSError(f"cannot write campaign report to {path}: {exc}") from exc
    return records, summary


def to_jsonl(records: list[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in records)


def read_jsonl(path) -> list[dict]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read report {path}: {exc}") from exc
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def summarize(records: list[dict]) -> dict:
    per = {}
    for r in records:
        c = per.setdefault(r["theorem_id"], Counter())
        c["total"] += 1
        c["pass" if r["pass"] else "fail"] += 1
        c[r.get("method", "?")] += 1
    mc_ineq = sum(1 for r in records if r.get("method") == "mc" and r.get("relation") == "<=")
    mc_eq = sum(1 for r in records if r.get("method") == "mc" and r.get("relation") == "==")
    expected = mc_ineq * ONE_SIDED_3SIGMA + mc_eq * 2 * ONE_SIDED_3SIGMA
    failures = sum(1 for r in records if not r["pass"])
    return {
        "checks": len(records),
        "failures": failures,
        "per_theorem": {k: dict(sorted(v.items())) for k, v in sorted(per.items())},
        "mc_checks": mc_ineq + mc_eq,
        "expected_false_failures": round(expected, 6),
        "bonferroni_note": (f"{mc_ineq + mc_eq} Monte Carlo checks at a {SIGMA_BAND:g}-sigma band "
                            f"(one-sided for inequalities, two-sided for identities): about {expected:.3f} "
                            f"false failures expected by chance; a campaign-wide 5% level would need a "
                            f"per-check level of {0.05 / max(mc_ineq + mc_eq, 1):.2e}"),
        "ok": failures == 0,
    }


def summary_csv(summary: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theorem_id", "total", "pass", "fail"])
    for tid, c in summary["per_theorem"].items():
        w.writerow([tid, c.get("total", 0), c.get("pass", 0), c.get("fail", 0)])
    return buf.getvalue()


def records_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    cols = ["theorem_id", "n", "seed", "p", "method", "relation", "lhs", "lhs_stderr", "rhs", "rhs_stderr",
            "constant", "margin", "pass"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        inst = r.get("instance", {})
        w.writerow([r["theorem_id"], inst.get("n"), inst.get("seed"), inst.get("p", "")] +
                   [r.get(c, "") for c in cols[4:]])
    return buf.getvalue()


__all__ = ["CampaignConfig", "run_campaign", "summarize", "to_jsonl", "read_jsonl", "plan", "id_matches",
           "summary_csv", "records_csv", "CheckReport"]
