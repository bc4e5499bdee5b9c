#!/usr/bin/env python3
"""Golden tests for the qlc command line.

Each case runs qlc, checks the exit code, validates JSON output against its
schema and compares every output with the stored golden copy. Numbers are
compared with a tolerance; everything else must match exactly.

    run_cli_tests.py --qlc PATH --golden DIR --schemas DIR [--update] [-k NAME]
"""

import argparse
import json
import math
import re
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

RTOL = 1e-7
ATOL = 1e-10
SVG_ATOL = 0.011  # coordinates are printed with two decimals

TWO = "inputs/params_two_cycles.json"
FOCUS = ["--gamma", "1", "--beta", "-0.95"]


@dataclass
class Case:
    name: str
    args: list
    exit_code: int = 0
    stdout: str = None  # json, jsonl, csv or None for unchecked
    schema: str = None
    files: dict = field(default_factory=dict)  # flag -> (suffix, kind, schema)
    stderr_has: str = None


CASES = [
    Case("singular_focus", ["singular", *FOCUS], stdout="json", schema="singular"),
    Case("singular_hamiltonian", ["singular"], stdout="json", schema="singular"),
    Case("singular_params_file", ["singular", "--params", TWO], stdout="json", schema="singular"),
    Case("check_conditions_inside", ["check-conditions", "--c", "2", "--gamma", "1", "--beta", "-1.9",
                                     "--lambda", "0.9177645997935898"], stdout="json", schema="check_conditions"),
    Case("check_conditions_outside", ["check-conditions", "--c", "2", "--gamma", "10"],
         stdout="json", schema="check_conditions"),
    Case("check_conditions_undefined", ["check-conditions", "--c", "0.5", "--gamma", "0.05"],
         stdout="json", schema="check_conditions"),
    Case("isoclines_focus", ["isoclines", *FOCUS], stdout="json", schema="isoclines"),
    Case("isoclines_coeffs", ["isoclines", "--coeffs", "inputs/coeffs_irreducible.json"],
         stdout="json", schema="isoclines"),
    Case("rotation_grid", ["rotation", *FOCUS, "--n", "5"], stdout="csv"),
    Case("portrait", ["portrait", *FOCUS, "--grid", "2", "--duration", "5", "--both"], stdout="csv",
         files={"--svg": (".svg", "svg", None)}),
    Case("cycles_one", ["cycles", *FOCUS, "--samples", "32"], stdout="json", schema="cycles",
         files={"--csv": (".csv", "csv", None)}),
    Case("cycles_center_annulus", ["cycles", "--samples", "32"], stdout="json", schema="cycles"),
    Case("cycles_two", ["cycles", "--params", TWO, "--config", "inputs/cycles_config.json"],
         stdout="json", schema="cycles"),
    Case("loop_beta", ["loop", "--gamma", "1", "--lo", "-3", "--hi", "0"], stdout="json", schema="loop"),
    Case("loop_lambda", ["loop", "--gamma", "1", "--beta", "-1.9", "--param", "lambda", "--lo", "0", "--hi", "1"],
         stdout="json", schema="loop"),
    Case("scenario_c2_fold", ["scenario", "--c", "2", "--fold"], stdout="json", schema="scenario"),
    Case("scenario_beta_first", ["scenario", "--c", "1.5", "--order", "beta-first"],
         stdout="json", schema="scenario"),
    Case("sweep_small", ["sweep", "--grid", "inputs/grid_small.json"], stdout="jsonl", schema="sweep_point",
         files={"--summary": (".summary.json", "json", "sweep_summary")}),
    # Exit codes: 0 success or help, 1 domain failure, 2 usage or input error.
    Case("help", ["--help"]),
    Case("no_subcommand", [], exit_code=2, stderr_has="usage error"),
    Case("unknown_subcommand", ["bogus"], exit_code=2, stderr_has="usage error"),
    Case("missing_required", ["check-conditions", "--gamma", "1"], exit_code=2, stderr_has="--c"),
    Case("two_system_specs", ["singular", "--gamma", "1", "--params", TWO], exit_code=2),
    Case("malformed_params", ["singular", "--params", "inputs/params_malformed.json"], exit_code=2),
    Case("unknown_param_key", ["singular", "--params", "inputs/params_unknown_key.json"], exit_code=2,
         stderr_has="mu"),
    Case("missing_file", ["singular", "--params", "inputs/absent.json"], exit_code=2),
    Case("bad_order", ["scenario", "--order", "sideways"], exit_code=2),
    Case("cycles_node_origin", ["cycles", "--gamma", "1", "--beta", "-1.9", "--lambda", "-1.6"], exit_code=1,
         stderr_has="no surrounding cycles"),
    Case("loop_no_bracket", ["loop", "--gamma", "1", "--lo", "-0.5", "--hi", "0"], exit_code=1,
         stderr_has="no bracket"),
    Case("scenario_empty_window", ["scenario", "--c", "1"], exit_code=1),
]


def close(a, b):
    return math.isclose(a, b, rel_tol=RTOL, abs_tol=ATOL)


def compare_json(a, b, path="$"):
    """Returns None when equal, otherwise a description of the first difference."""
    if isinstance(a, bool) or isinstance(b, bool) or a is None or b is None:
        return None if a == b else f"{path}: {a!r} vs {b!r}"
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return None if close(a, b) else f"{path}: {a!r} vs {b!r}"
    if type(a) is not type(b):
        return f"{path}: type {type(a).__name__} vs {type(b).__name__}"
    if isinstance(a, dict):
        if list(a) != list(b):
            return f"{path}: keys {list(a)} vs {list(b)}"
        for k in a:
            d = compare_json(a[k], b[k], f"{path}.{k}")
            if d:
                return d
        return None
    if isinstance(a, list):
        if len(a) != len(b):
            return f"{path}: length {len(a)} vs {len(b)}"
        for i, (x, y) in enumerate(zip(a, b)):
            d = compare_json(x, y, f"{path}[{i}]")
            if d:
                return d
        return None
    return None if a == b else f"{path}: {a!r} vs {b!r}"


def compare_csv(a, b):
    la, lb = a.splitlines(), b.splitlines()
    if len(la) != len(lb):
        return f"line count {len(la)} vs {len(lb)}"
    for n, (x, y) in enumerate(zip(la, lb), 1):
        fx, fy = x.split(","), y.split(",")
        if len(fx) != len(fy):
            return f"line {n}: field count"
        for u, v in zip(fx, fy):
            try:
                same = close(float(u), float(v))
            except ValueError:
                same = u == v
            if not same:
                return f"line {n}: {u!r} vs {v!r}"
    return None


NUMBER = re.compile(r"-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?")


def compare_svg(a, b):
    na, nb = NUMBER.findall(a), NUMBER.findall(b)
    if NUMBER.sub("#", a) != NUMBER.sub("#", b):
        return "markup differs"
    for i, (x, y) in enumerate(zip(na, nb)):
        if abs(float(x) - float(y)) > SVG_ATOL:
            return f"number {i}: {x} vs {y}"
    return None


def parse(kind, text):
    if kind == "json":
        return json.loads(text)
    if kind == "jsonl":
        return [json.loads(line) for line in text.splitlines() if line.strip()]
    return text


def compare(kind, actual, golden):
    if kind in ("json", "jsonl"):
        return compare_json(parse(kind, actual), parse(kind, golden))
    if kind == "csv":
        return compare_csv(actual, golden)
    return compare_svg(actual, golden)


def load_validators(schema_dir):
    schemas = {p.name: json.loads(p.read_text()) for p in schema_dir.glob("*.schema.json")}
    registry = Registry().with_resources(
        [(s["$id"], Resource.from_contents(s)) for s in schemas.values()])
    validators = {}
    for name, s in schemas.items():
        cls = jsonschema.validators.validator_for(s)
        cls.check_schema(s)
        validators[name.removesuffix(".schema.json")] = cls(s, registry=registry)
    return validators


def validate(validators, schema, kind, text):
    docs = parse(kind, text)
    for doc in docs if kind == "jsonl" else [docs]:
        errors = sorted(validators[schema].iter_errors(doc), key=lambda e: list(e.path))
        if errors:
            e = errors[0]
            return f"schema {schema}: {'/'.join(map(str, e.path))}: {e.message[:200]}"
    return None


def run_case(case, qlc, golden_dir, validators, update, tmp):
    args = [str(qlc), *case.args]
    outputs = {}
    for flag, (suffix, kind, schema) in case.files.items():
        path = Path(tmp) / f"{case.name}{suffix}"
        args += [flag, str(path)]
        outputs[suffix] = (path, kind, schema)
    proc = subprocess.run(args, cwd=golden_dir, capture_output=True, text=True, timeout=600)
    problems = []
    if proc.returncode != case.exit_code:
        problems.append(f"exit {proc.returncode}, expected {case.exit_code}: {proc.stderr.strip()[:300]}")
        return problems
    if case.stderr_has and case.stderr_has not in proc.stderr:
        problems.append(f"stderr lacks {case.stderr_has!r}: {proc.stderr.strip()[:300]}")
    if case.exit_code != 0 and proc.stdout.strip():
        problems.append("stdout not empty on failure")

    produced = []
    if case.stdout:
        suffix = {"json": ".json", "jsonl": ".jsonl", "csv": ".csv"}[case.stdout]
        produced.append((suffix, case.stdout, case.schema, proc.stdout))
    for suffix, (path, kind, schema) in outputs.items():
        if not path.exists():
            problems.append(f"{suffix} not written")
            continue
        produced.append((suffix, kind, schema, path.read_text()))

    for suffix, kind, schema, text in produced:
        if schema:
            try:
                bad = validate(validators, schema, kind, text)
            except json.JSONDecodeError as e:
                bad = f"invalid JSON: {e}"
            if bad:
                problems.append(bad)
        golden = golden_dir / f"{case.name}{suffix}"
        if update:
            golden.write_text(text)
            continue
        if not golden.exists():
            problems.append(f"missing golden {golden.name}")
            continue
        diff = compare(kind, text, golden.read_text())
        if diff:
            problems.append(f"{golden.name}: {diff}")
    return problems


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qlc", required=True, type=Path)
    ap.add_argument("--golden", required=True, type=Path)
    ap.add_argument("--schemas", required=True, type=Path)
    ap.add_argument("--update", action="store_true", help="rewrite the golden files")
    ap.add_argument("-k", help="run only cases whose name contains this")
    opt = ap.parse_args()

    validators = load_validators(opt.schemas)
    # The schemas must reject something, or validation proves nothing.
    if not list(validators["singular"].iter_errors({"params": {}, "points": []})):
        print("FAIL schema sanity: singular schema accepts empty params")
        return 1
    failed = 0
    with tempfile.TemporaryDirectory() as tmp:
        for case in CASES:
            if opt.k and opt.k not in case.name:
                continue
            problems = run_case(case, opt.qlc.resolve(), opt.golden.resolve(), validators, opt.update, tmp)
            print(("FAIL " if problems else "ok   ") + case.name)
            for p in problems:
                print("     " + p)
            failed += bool(problems)
    print(f"{failed} failed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
