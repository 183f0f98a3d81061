"""Command line: run experiment configs, re-validate reports, emit plot data."""

from __future__ import annotations

import argparse
import copy
import csv
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import __version__
from .core import Ball, DomainError, describe_point, describe_set, spread
from .relations import (return_times, rp_delta_test, rp_veech_test, veech_pair, WITNESSED)
from .sensitivity import (NO, YES, SensitivityQuery, certified_stable_times, classify,
                          eq_point_test, syndetic_eq_point_test, timeset_digest)
from .systems.catalog import CATALOG, entry
from .timesets import (CertificateError, SetCertificate, TimeSet, first_window,
                       intersect_all, is_syndetic_up_to, max_gap, validate)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

SCHEMA = "multisens.report/1"
WORKERS_ENV = "MULTISENS_WORKERS"

EXIT_OK, EXIT_EXEC, EXIT_SCHEMA, EXIT_MISMATCH = 0, 1, 2, 3


class SchemaError(ValueError):
    pass


class ValidationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config schema

QUERY_FIELDS = {f.name for f in fields(SensitivityQuery)} - {"system_id", "seed"}
SECTIONS = {
    "eq": {"eps": list, "points": int, "gap": int, "horizon": int},
    "return_times": {"points": int, "resolution": int, "horizon": int, "gap": int, "cap": int},
    "relations": {"pairs": int, "radius": float, "horizon": int, "depth": int},
    "profile": {"sets": int, "horizon": int, "resolution": int},
}
OPERATIONS = ("classify", "eq", "return_times", "relations", "profile")
RUN_FIELDS = {"name", "system", "params", "seed", "operations", "output", "query", "fault",
              *SECTIONS}
DEFAULTS = {
    "eq": {"eps": [0.25, 0.125], "points": 3, "gap": 256, "horizon": 10_000},
    "return_times": {"points": 1, "resolution": 3, "horizon": 10_000, "gap": 1000, "cap": 16},
    "relations": {"pairs": 3, "radius": 0.25, "horizon": 1000, "depth": 3},
    "profile": {"sets": 4, "horizon": 256, "resolution": 2},
}


def _check_keys(where: str, got: dict, allowed) -> None:
    extra = sorted(set(got) - set(allowed))
    if extra:
        raise SchemaError(f"{where}: unknown field(s) {extra}")


def _num(where, v, kind):
    ok = isinstance(v, (int, float)) and not isinstance(v, bool)
    if kind is int:
        ok = isinstance(v, int) and not isinstance(v, bool)
    if not ok:
        raise SchemaError(f"{where}: expected {kind.__name__}, got {v!r}")
    return kind(v)


def normalize_run(raw: dict, index: int) -> dict:
    where = f"runs[{index}]"
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: expected a table")
    _check_keys(where, raw, RUN_FIELDS)
    for key in ("system", "seed", "output"):
        if key not in raw:
            raise SchemaError(f"{where}: missing required field {key!r}")
    if raw["system"] not in CATALOG:
        raise SchemaError(f"{where}: unknown system {raw['system']!r}")
    run = {"name": str(raw.get("name", raw["system"])), "system": raw["system"],
           "params": dict(raw.get("params", {})), "seed": _num(f"{where}.seed", raw["seed"], int),
           "output": str(raw["output"]), "fault": raw.get("fault")}
    ops = raw.get("operations", ["classify"])
    if not isinstance(ops, list) or not ops or any(op not in OPERATIONS for op in ops):
        raise SchemaError(f"{where}.operations: choose from {list(OPERATIONS)}")
    run["operations"] = list(ops)
    if run["fault"] not in (None, "certificate"):
        raise SchemaError(f"{where}.fault: only 'certificate' is supported")
    query = dict(raw.get("query", {}))
    _check_keys(f"{where}.query", query, QUERY_FIELDS)
    try:
        SensitivityQuery(run["system"], seed=run["seed"], **query)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}.query: {exc}") from None
    run["query"] = query
    for name, shape in SECTIONS.items():
        sec = dict(raw.get(name, {}))
        _check_keys(f"{where}.{name}", sec, shape)
        out = dict(DEFAULTS[name])
        for k, v in sec.items():
            if shape[k] is list:
                if not isinstance(v, list) or not v:
                    raise SchemaError(f"{where}.{name}.{k}: expected a non-empty list")
                out[k] = [_num(f"{where}.{name}.{k}", x, float) for x in v]
            else:
                out[k] = _num(f"{where}.{name}.{k}", v, shape[k])
        run[name] = out
    return run


def load_config(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
    try:
        raw = tomllib.loads(text) if path.suffix == ".toml" else json.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: {exc}") from None
    if not isinstance(raw, dict):
        raise SchemaError("config must be a table")
    _check_keys("config", raw, {"runs"})
    runs = raw.get("runs")
    if not isinstance(runs, list) or not runs:
        raise SchemaError("config needs a non-empty 'runs' list")
    return {"runs": [normalize_run(r, i) for i, r in enumerate(runs)], "base": str(path.parent)}


# ---------------------------------------------------------------------------
# operations


class _Sets:
    """Timeset records shared by all operations of one report."""

    def __init__(self):
        self.records: list[dict] = []

    def add(self, ts: TimeSet, **meta) -> int:
        rec = ts.to_json()
        rec.update(meta)
        rec["digest"] = timeset_digest(rec)
        self.records.append(rec)
        return len(self.records) - 1

    def absorb(self, records: list[dict]) -> int:
        off = len(self.records)
        self.records.extend(records)
        return off


def _reindex(obj, off: int):
    if isinstance(obj, dict):
        return {k: (v + off if k == "timeset" else [t + off for t in v] if k == "timesets"
                    else _reindex(v, off)) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_reindex(v, off) for v in obj]
    return obj


def sample_points(system, count: int, seed: int) -> list:
    sets = system.basis(1)
    out = []
    for i in range(count):
        out += system.sample(sets[i % len(sets)], 1, seed + i)[:1]
    return out


def op_classify(system, run, book):
    q = SensitivityQuery(system.id, seed=run["seed"], **run["query"])
    rep = classify(system, q).to_json()
    off = book.absorb(rep.pop("timesets"))
    rep["verdicts"] = _reindex(rep["verdicts"], off)
    return rep


def op_eq(system, run, book):
    cfg = run["eq"]
    horizon = cfg["horizon"]
    gap = min(cfg["gap"], horizon - 1)
    out = []
    for i, x in enumerate(sample_points(system, cfg["points"], run["seed"])):
        for eps in cfg["eps"]:
            eq = eq_point_test(system, x, eps, horizon)
            syn = syndetic_eq_point_test(system, x, eps, gap, horizon)
            item = {"point": i, "x": describe_point(x), "eps": eps, "eq_radius": eq.radius,
                    "syndetic": syn.to_json()}
            if syn:
                j = certified_stable_times(system, Ball(x, syn.radius), eps, horizon)
                item["syndetic"]["timeset"] = book.add(j, kind="J+", delta=eps, set=describe_set(Ball(x, syn.radius)))
            out.append(item)
    return {"gap": gap, "horizon": horizon, "results": out}


def op_return_times(system, run, book):
    cfg = run["return_times"]
    horizon = cfg["horizon"]
    gap = min(cfg["gap"], horizon - 1)
    sets = spread(system.basis(cfg["resolution"]), cfg["cap"])
    out = []
    for i, x in enumerate(sample_points(system, cfg["points"], run["seed"] + 1000)):
        for u in sets:
            ts = return_times(system, x, u, horizon)
            item = {"point": i, "timeset": book.add(ts, kind="N", set=describe_set(u))}
            cert = is_syndetic_up_to(ts, gap)
            item["certificate"] = cert.to_json() if cert else None
            out.append(item)
    return {"gap": gap, "horizon": horizon, "results": out}


def op_relations(system, run, book):
    cfg = run["relations"]
    pts = sample_points(system, 2 * cfg["pairs"], run["seed"] + 2000)
    out = []
    for x, y in zip(pts[::2], pts[1::2]):
        u, v = Ball(x, cfg["radius"]), Ball(y, cfg["radius"])
        ver = rp_veech_test(system, x, y, u, v, cfg["horizon"], require_minimal=False)
        delta = rp_delta_test(system, x, y, v, cfg["horizon"], cfg["depth"], require_minimal=False)
        a = book.add(TimeSet.from_json(ver.data["A"]), kind="N", set=ver.data["U"])
        b = book.add(TimeSet.from_json(ver.data["B"]), kind="N", set=ver.data["V"])
        item = {"x": describe_point(x), "y": describe_point(y), "A": a, "B": b,
                "veech": {"status": ver.status, "n": ver.data.get("n"), "m": ver.data.get("m")},
                "delta": {"status": delta.status, "depth": cfg["depth"], "tower": delta.data.get("tower")}}
        out.append(item)
    return {"results": out, "minimal_expected": system.minimal_expected}


def op_profile(system, run, book):
    cfg = run["profile"]
    out = []
    for u in spread(system.basis(cfg["resolution"]), cfg["sets"]):
        p = system.diam_profile(u, cfg["horizon"])
        out.append({"set": describe_set(u), "lo": p.lo.tolist(), "hi": p.hi.tolist()})
    return {"horizon": cfg["horizon"], "profiles": out}


OPS = {"classify": op_classify, "eq": op_eq, "return_times": op_return_times,
       "relations": op_relations, "profile": op_profile}


def prediction_matrix(name: str, results: dict) -> list[dict]:
    preds = entry(name).predictions
    rows = []
    cls = results.get("classify")
    if cls:
        for prop, verdict in cls["verdicts"].items():
            if prop in preds:
                want = {"yes": YES, "no": NO}[preds[prop].value]
                rows.append({"property": prop, "predicted": preds[prop].value,
                             "observed": verdict["status"], "pass": verdict["status"] == want,
                             "reason": preds[prop].reason})
    eq = results.get("eq")
    if eq and "equicontinuous" in preds:
        seen = all(r["eq_radius"] is not None for r in eq["results"])
        rows.append({"property": "equicontinuous", "predicted": preds["equicontinuous"].value,
                     "observed": seen, "pass": seen == preds["equicontinuous"].value,
                     "reason": preds["equicontinuous"].reason})
    if eq and "syndetic_eq_points" in preds:
        none = not any(r["syndetic"]["radius"] is not None for r in eq["results"])
        rows.append({"property": "syndetic_eq_points", "predicted": preds["syndetic_eq_points"].value,
                     "observed": "none" if none else "some",
                     "pass": none == (preds["syndetic_eq_points"].value == "none"),
                     "reason": preds["syndetic_eq_points"].reason})
    return rows


def execute_run(run: dict) -> dict:
    system = entry(run["system"]).make(**run["params"])
    book = _Sets()
    results = {}
    t0 = time.perf_counter()
    for op in run["operations"]:
        results[op] = OPS[op](system, run, book)
    echo = {k: v for k, v in run.items() if k not in ("output",)}
    report = {"schema": SCHEMA, "tool_version": __version__, "config": echo,
              "system": system.describe(), "results": results, "timesets": book.records,
              "predictions": prediction_matrix(run["system"], results),
              "wall_clock": round(time.perf_counter() - t0, 3)}
    if run.get("fault") == "certificate":
        inject_fault(report)
    return report


def inject_fault(report: dict) -> bool:
    """Flip the low bit of the first witness value (test hook)."""
    paths = witness_paths(report)
    if not paths:
        return False
    flip_bit(report, paths[0], 0)
    return True


# ---------------------------------------------------------------------------
# validation


def _ts(report, i) -> TimeSet:
    try:
        rec = report["timesets"][i]
    except (IndexError, TypeError):
        raise ValidationError(f"timeset index {i!r} out of range") from None
    return TimeSet.from_json(rec)


def _cert(rec) -> SetCertificate:
    return SetCertificate.from_json(rec)


def _check_classify(report, cls):
    q = cls["query"]
    n_top = q["horizon"]
    v = cls["verdicts"]
    sens = v["sensitive"]
    for e in sens["evidence"]:
        s = _ts(report, e["timeset"])
        if e["max"] != s.max():
            raise ValidationError(f"sensitive: max {e['max']} != {s.max()}")
        big = s.max() is not None and s.max() > n_top // 2
        if big != (sens["status"] == YES):
            raise ValidationError("sensitive: maximum on the wrong side of N/2")
    thick = v["thickly_sensitive"]
    for e in thick["evidence"]:
        s = _ts(report, e["timeset"])
        if thick["status"] == YES:
            cert = _cert(e["certificate"])
            if cert.data[0] != q["thick_scale"]:
                raise ValidationError("thick: certificate scale differs from the query")
            validate(cert, s)
        else:
            if e["scale"] != q["thick_scale"] or first_window(s, e["scale"]) is not None:
                raise ValidationError("thick: refuting set has a window")
            if "complement_gap" in e:
                validate(_cert(e["complement_gap"]), s.complement())
    multi = v["multi_sensitive"]
    for e in multi["evidence"]:
        if multi["status"] == YES:
            both = intersect_all([_ts(report, i) for i in e["timesets"]])
            if both.min() != e["n"]:
                raise ValidationError(f"multi: n {e['n']} is not the least common time {both.min()}")
    if multi["status"] == NO and thick["status"] != NO:
        raise ValidationError("multi: derived refutation without a thick refutation")


def _check_eq(report, eq):
    for r in eq["results"]:
        syn = r["syndetic"]
        if syn["radius"] is None:
            continue
        cert = _cert(syn["certificate"])
        if cert.data[0] > eq["gap"]:
            raise ValidationError("eq: gap above the requested bound")
        validate(cert, _ts(report, syn["timeset"]))


def _check_return_times(report, rt):
    for r in rt["results"]:
        s = _ts(report, r["timeset"])
        if r["certificate"] is not None:
            validate(_cert(r["certificate"]), s)
        elif max_gap(s) <= rt["gap"]:
            raise ValidationError("return times: missing syndetic certificate")


def _check_relations(report, rel):
    for r in rel["results"]:
        a, b = _ts(report, r["A"]), _ts(report, r["B"])
        ver = r["veech"]
        found = veech_pair(a, b)
        if ver["status"] == WITNESSED:
            if found is None or tuple(found) != (ver["n"], ver["m"]):
                raise ValidationError(f"veech: ({ver['n']}, {ver['m']}) is not the canonical witness")
        elif found is not None:
            raise ValidationError("veech: a witness exists but none was reported")
        d = r["delta"]
        if d["status"] == WITNESSED:
            validate(SetCertificate("delta_tower", tuple(d["tower"]), b.horizon), b)


CHECKS = {"classify": _check_classify, "eq": _check_eq, "return_times": _check_return_times,
          "relations": _check_relations}


def validate_report(report: dict) -> list[str]:
    """All problems found; an empty list means the report re-validates."""
    if not isinstance(report, dict) or "schema" not in report:
        raise SchemaError("not a report: missing 'schema'")
    if report["schema"] != SCHEMA:
        raise SchemaError(f"unsupported report schema {report['schema']!r}; this tool reads {SCHEMA!r}")
    problems = []
    for i, rec in enumerate(report.get("timesets", [])):
        try:
            if rec.get("digest") != timeset_digest(rec):
                problems.append(f"timeset {i}: digest mismatch")
            TimeSet.from_json(rec)
        except (KeyError, ValueError, TypeError) as exc:
            problems.append(f"timeset {i}: {exc}")
    for op, res in report.get("results", {}).items():
        check = CHECKS.get(op)
        if check is None:
            continue
        try:
            check(report, res)
        except (ValidationError, CertificateError, KeyError, ValueError, TypeError, IndexError) as exc:
            problems.append(f"{op}: {type(exc).__name__}: {exc}")
    return problems


# ---------------------------------------------------------------------------
# witness mutation


def witness_paths(report: dict) -> list[tuple]:
    """Locations of integer witness values: maxima, least times, certificate
    data, Veech pairs and towers."""
    out = []
    res = report.get("results", {})
    cls = res.get("classify")
    if cls:
        for name, v in cls["verdicts"].items():
            for i, e in enumerate(v["evidence"]):
                base = ("results", "classify", "verdicts", name, "evidence", i)
                for key in ("max", "n"):
                    if isinstance(e.get(key), int):
                        out.append(base + (key,))
                for key in ("certificate", "complement_gap"):
                    if key in e:
                        out += [base + (key, "data", j) for j in range(len(e[key]["data"]))]
    for i, r in enumerate(res.get("eq", {}).get("results", [])):
        if r["syndetic"]["certificate"]:
            out.append(("results", "eq", "results", i, "syndetic", "certificate", "data", 0))
    for i, r in enumerate(res.get("return_times", {}).get("results", [])):
        if r["certificate"]:
            out.append(("results", "return_times", "results", i, "certificate", "data", 0))
    for i, r in enumerate(res.get("relations", {}).get("results", [])):
        base = ("results", "relations", "results", i)
        if r["veech"]["status"] == WITNESSED:
            out += [base + ("veech", "n"), base + ("veech", "m")]
        if r["delta"]["tower"]:
            out += [base + ("delta", "tower", j) for j in range(len(r["delta"]["tower"]))]
    return out


def flip_bit(report: dict, path: tuple, bit: int) -> None:
    node = report
    for key in path[:-1]:
        node = node[key]
    node[path[-1]] ^= 1 << bit


def mutate(report: dict, rng: np.random.Generator) -> tuple[dict, tuple, int]:
    """Copy of ``report`` with one bit of one witness value flipped."""
    paths = witness_paths(report)
    if not paths:
        raise ValueError("report carries no witnesses")
    path = paths[int(rng.integers(len(paths)))]
    node = report
    for key in path:
        node = node[key]
    bit = int(rng.integers(max(int(node).bit_length(), 1) + 1))
    out = copy.deepcopy(report)
    flip_bit(out, path, bit)
    return out, path, bit


# ---------------------------------------------------------------------------
# output


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report: dict, path: Path) -> None:
    write_atomic(path, dumps(report))
    lines = "".join(json.dumps({"index": i, **rec}, sort_keys=True) + "\n"
                    for i, rec in enumerate(report["timesets"]))
    write_atomic(path.with_suffix(".timesets.ndjson"), lines)


def workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise SchemaError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def run_config(cfg: dict, out=None) -> int:
    out = out or sys.stdout
    runs = cfg["runs"]

    def job(run):
        try:
            return execute_run(run), None
        except (DomainError, ValueError, ArithmeticError) as exc:
            return None, f"{type(exc).__name__}: {exc}"

    with ThreadPoolExecutor(workers()) as pool:
        outcomes = list(pool.map(job, runs))
    code = EXIT_OK
    for run, (report, err) in zip(runs, outcomes):
        if err:
            print(f"{run['name']}: execution error: {err}", file=out)
            code = max(code, EXIT_EXEC) if code != EXIT_MISMATCH else code
            continue
        path = Path(cfg["base"], run["output"])
        write_report(report, path)
        problems = validate_report(report)
        bad = [r for r in report["predictions"] if not r["pass"]]
        for p in problems:
            print(f"{run['name']}: invalid: {p}", file=out)
        for r in bad:
            print(f"{run['name']}: mismatch: {r['property']} predicted {r['predicted']}, "
                  f"observed {r['observed']}", file=out)
        status = "ok" if not (problems or bad) else "FAILED"
        print(f"{run['name']}: {status} -> {path}", file=out)
        if problems or bad:
            code = EXIT_MISMATCH
    return code


def _load_report(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read report {path}: {exc}") from None


def plot_rows(report: dict, what: str, index: int = 0) -> tuple[list[str], list[list]]:
    if what in ("timeset", "gaps"):
        recs = report.get("timesets", [])
        if not 0 <= index < len(recs):
            raise SchemaError(f"missing series: timeset {index}")
        s = TimeSet.from_json(recs[index])
        if what == "timeset":
            mask = s.mask()
            return ["n", "member"], [[n, int(mask[n])] for n in range(1, s.horizon + 1)]
        members = s.members()
        return ["after", "gap"], [[a, b - a - 1] for a, b in zip(members, members[1:])]
    if what == "diam-profile":
        profs = report.get("results", {}).get("profile", {}).get("profiles", [])
        if not 0 <= index < len(profs):
            raise SchemaError(f"missing series: diam-profile {index}")
        p = profs[index]
        return ["n", "lo", "hi"], [[n, lo, hi] for n, (lo, hi) in enumerate(zip(p["lo"], p["hi"]))]
    raise SchemaError(f"unknown series {what!r}")


# ---------------------------------------------------------------------------
# argument parsing


def _flags_to_run(ns) -> dict:
    raw = {"system": ns.system, "output": ns.output, "operations": ns.op or ["classify"]}
    if ns.seed is not None:
        raw["seed"] = ns.seed
    query = {k: getattr(ns, k) for k in ("deltas", "resolution", "horizon", "k", "thick_scale",
                                         "gap", "mode", "basis_cap", "random_subsets")
             if getattr(ns, k) is not None}
    if query:
        raw["query"] = query
    return raw


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="multisens", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute an experiment config (JSON or TOML) or a single run from flags")
    r.add_argument("config", nargs="?")
    r.add_argument("--system")
    r.add_argument("--seed", type=int)
    r.add_argument("--output")
    r.add_argument("--op", action="append", choices=OPERATIONS)
    r.add_argument("--deltas", type=float, nargs="+")
    for name in ("resolution", "horizon", "k", "thick-scale", "gap", "basis-cap", "random-subsets"):
        r.add_argument(f"--{name}", type=int, dest=name.replace("-", "_"))
    r.add_argument("--mode", choices=("exact-if-available", "sampled"))

    v = sub.add_parser("validate", help="re-validate every certificate and witness in a report")
    v.add_argument("report")

    pd = sub.add_parser("plotdata", help="CSV series from a report")
    pd.add_argument("report")
    pd.add_argument("what", choices=("timeset", "gaps", "diam-profile"))
    pd.add_argument("--index", type=int, default=0)

    c = sub.add_parser("catalog", help="list systems with predicted properties")
    c.add_argument("--json", action="store_true")
    return p


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        if ns.command == "run":
            if ns.config:
                cfg = load_config(ns.config)
            else:
                if not ns.system or not ns.output:
                    raise SchemaError("run needs a config file or --system and --output")
                cfg = {"runs": [normalize_run(_flags_to_run(ns), 0)], "base": "."}
            return run_config(cfg)
        if ns.command == "validate":
            problems = validate_report(_load_report(ns.report))
            for msg in problems:
                print(msg)
            print("valid" if not problems else f"{len(problems)} problem(s)")
            return EXIT_OK if not problems else EXIT_MISMATCH
        if ns.command == "plotdata":
            header, rows = plot_rows(_load_report(ns.report), ns.what, ns.index)
            w = csv.writer(sys.stdout, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
            return EXIT_OK
        if ns.command == "catalog":
            if ns.json:
                print(json.dumps([e.to_json() for e in CATALOG.values()], indent=1))
            else:
                for e in CATALOG.values():
                    print(f"{e.name}: {e.summary}")
                    for prop, pred in e.predictions.items():
                        print(f"  {prop} = {pred.value}  ({pred.reason})")
            return EXIT_OK
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    return EXIT_EXEC


if __name__ == "__main__":
    sys.exit(main())
