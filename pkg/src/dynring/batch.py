"""Cross-product campaigns over ring sizes, identifiers, orientations and adversaries."""

from __future__ import annotations

import itertools
import json
import logging
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from dynring.engine import ConfigError, SimulationConfig, SimulationOutcome, run, verify_trace

log = logging.getLogger("dynring")

PLACEMENTS = ("distinct", "two_together", "three_together")


@dataclass(frozen=True)
class Cell:
    index: int
    config: SimulationConfig


def _int_list(doc, name: str) -> list[int]:
    if isinstance(doc, dict):
        lo, hi = doc.get("min"), doc.get("max")
        if not isinstance(lo, int) or not isinstance(hi, int) or lo > hi:
            raise ConfigError(name, "range needs integer min <= max")
        return list(range(lo, hi + 1))
    if isinstance(doc, list) and doc and all(isinstance(x, int) for x in doc):
        return doc
    if isinstance(doc, int):
        return [doc]
    raise ConfigError(name, "expected an integer, a list of integers or {min, max}")


def _id_triples(spec: dict, seed: int) -> list[tuple[str, ...]]:
    """``{"k": 2, "all": true}``, ``{"k": 3, "random": 50}`` or ``{"triples": [[...], ...]}``."""
    if "triples" in spec:
        return [tuple(t) for t in spec["triples"]]
    k = spec.get("k")
    if not isinstance(k, int) or k < 2:
        raise ConfigError("id_sets", f"k must be an integer >= 2, got {k!r}")
    ids = [format(v, f"0{k}b") for v in range(2**k)]
    if spec.get("all"):
        return list(itertools.combinations(ids, 3))
    count = spec.get("random")
    if not isinstance(count, int) or count < 1:
        raise ConfigError("id_sets", "give 'all': true, 'random': <count> or explicit 'triples'")
    rng = random.Random(f"ids:{seed}:{k}")
    return [tuple(rng.sample(ids, 3)) for _ in range(count)]


def _orientations(spec, mode: str) -> list[tuple[bool, bool, bool]]:
    if spec in (None, "chiral"):
        return [(True, True, True)]
    if spec == "all":
        if mode == "chiral":
            raise ConfigError("orientations", "chiral campaigns need equal orientations")
        return list(itertools.product((True, False), repeat=3))
    if isinstance(spec, list):
        return [tuple(bool(x) for x in o) for o in spec]
    raise ConfigError("orientations", f"unsupported value {spec!r}")


def place(kind: str, n: int, ids: tuple[str, ...], seed: int) -> tuple[int, int, int]:
    """Seeded placement of the three agents; the seed fixes it for a given ring and triple."""
    rng = random.Random(f"place:{kind}:{seed}:{n}:{','.join(ids)}")
    if kind == "distinct":
        return tuple(rng.sample(range(n), 3))
    if kind == "two_together":
        a, b = rng.sample(range(n), 2)
        pair = rng.sample(range(3), 2)
        return tuple(a if i in pair else b for i in range(3))
    if kind == "three_together":
        p = rng.randrange(n)
        return (p, p, p)
    raise ConfigError("placements", f"unknown placement {kind!r}")


def _adversaries(specs: list, seed: int) -> list[dict]:
    out = []
    for s in specs:
        if not isinstance(s, dict) or "kind" not in s:
            raise ConfigError("adversaries", f"expected objects with a 'kind', got {s!r}")
        if s["kind"] == "front_blocker" and s.get("target") == "each":
            out.extend({"kind": "front_blocker", "target": t} for t in range(3))
        elif s["kind"] == "random" and "seeds" in s:
            count = s["seeds"]
            p_none = s.get("p_none", 0.5)
            out.extend({"kind": "random", "seed": seed + i, "p_none": p_none} for i in range(count))
        else:
            out.append(dict(s))
    return out


def expand(manifest: dict, seed_override: int | None = None, multiplier: float | None = None) -> list[Cell]:
    """Every cell of the campaign in a fixed order."""
    if not isinstance(manifest, dict) or not manifest:
        raise ConfigError("manifest", "empty manifest")
    for req in ("mode", "n", "id_sets", "adversaries"):
        if req not in manifest:
            raise ConfigError(req, "missing required field")
    seed = manifest.get("seed", 0) if seed_override is None else seed_override
    mode = manifest["mode"]
    protocol = manifest.get("protocol", "explore")
    trace_level = "full" if manifest.get("verify_traces") else "summary"
    sizes = _int_list(manifest["n"], "n")
    id_sets = manifest["id_sets"]
    if not isinstance(id_sets, list) or not id_sets:
        raise ConfigError("id_sets", "expected a non-empty list")
    triples = [t for spec in id_sets for t in _id_triples(spec, seed)]
    orients = _orientations(manifest.get("orientations"), mode)
    placements = manifest.get("placements", ["distinct"])
    if not placements or any(p not in PLACEMENTS for p in placements):
        raise ConfigError("placements", f"expected a subset of {PLACEMENTS}")
    advs = _adversaries(manifest["adversaries"], seed)
    if not advs:
        raise ConfigError("adversaries", "empty adversary suite")
    cells = []
    for n, ids, kind in itertools.product(sizes, triples, placements):
        pos = place(kind, n, ids, seed)
        for o, a in itertools.product(orients, advs):
            cfg = SimulationConfig(
                n=n,
                ids=ids,
                positions=pos,
                orientations=o,
                mode=mode,
                adversary=a,
                protocol=protocol,
                trace_level=trace_level,
            )
            if multiplier is not None:
                cfg.max_rounds = max(1, int(multiplier * cfg.bound))
            cells.append(Cell(len(cells), cfg))
    return cells


def failure_reason(out: SimulationOutcome) -> str | None:
    if out.violation is not None:
        return f"violation:{out.violation['rule']}"
    bad = [v["name"] for v in out.verdicts if not v["ok"]]
    if bad:
        return "verdict:" + ",".join(bad)
    if out.protocol == "meeting":
        if out.first_meeting_round is None:
            return "no_meeting"
    else:
        if not out.explored:
            return "not_explored"
        if not out.all_terminated:
            return "not_terminated"
    if not out.bound_satisfied:
        return "bound"
    return None


def run_cell(cell: Cell) -> dict:
    out, trace = run(cell.config)
    if cell.config.trace_level == "full":
        out.verdicts = verify_trace(trace, cell.config)
    c = cell.config
    return {
        "cell": cell.index,
        "n": c.n,
        "k": c.k,
        "ids": list(c.ids),
        "positions": list(c.positions),
        "orientations": list(c.orientations),
        "adversary": c.adversary,
        "ok": out.ok,
        "failure": failure_reason(out),
        "rounds": out.rounds_elapsed,
        "first_meeting_round": out.first_meeting_round,
        "bound": out.bound,
    }


def _measure(r: dict, protocol: str) -> int | None:
    return r["first_meeting_round"] if protocol == "meeting" else r["rounds"]


def aggregate(name: str, protocol: str, results: list[dict]) -> dict:
    failed = [r for r in results if not r["ok"]]
    ratios = [(_measure(r, protocol) or 0) / r["bound"] for r in results if r["ok"]]
    groups: dict[str, dict] = {}
    for r in results:
        g = groups.setdefault(f"n={r['n']},k={r['k']}", {"bound": r["bound"], "cells": 0, "failed": 0, "max_rounds": None})
        g["cells"] += 1
        if not r["ok"]:
            g["failed"] += 1
            continue
        m = _measure(r, protocol)
        if m is not None and (g["max_rounds"] is None or m > g["max_rounds"]):
            g["max_rounds"] = m
    reasons: dict[str, int] = {}
    for r in failed:
        reasons[r["failure"]] = reasons.get(r["failure"], 0) + 1
    return {
        "name": name,
        "protocol": protocol,
        "cells": len(results),
        "passed": len(results) - len(failed),
        "failed": len(failed),
        "failure_reasons": dict(sorted(reasons.items())),
        "max_ratio_passing": max(ratios) if ratios else None,
        # max_rounds is over passing cells only
        "by_size": dict(sorted(groups.items())),
        "results": results,
    }


def run_batch(
    manifest: dict,
    jobs: int | None = None,
    seed_override: int | None = None,
    multiplier: float | None = None,
) -> dict:
    cells = expand(manifest, seed_override, multiplier)
    jobs = jobs or os.cpu_count() or 1
    log.info("batch %s: %d cells on %d worker(s)", manifest.get("name", "campaign"), len(cells), jobs)
    if jobs == 1:
        results = [run_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_cell, cells, chunksize=64))
    return aggregate(manifest.get("name", "campaign"), manifest.get("protocol", "explore"), results)


def load_manifest(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError("manifest", f"cannot read {path}: {e}") from None
    if not isinstance(doc, dict):
        raise ConfigError("manifest", "expected a JSON object")
    base = Path(path).parent
    for a in doc.get("adversaries", []):
        if isinstance(a, dict) and a.get("kind") == "scripted" and "path" in a and not Path(a["path"]).is_absolute():
            a["path"] = str(base / a["path"])
    return doc
