"""End-to-end checks of the oscillometer executable.

usage: cli_contract.py <oscillometer> <configs dir> <schemas dir>
"""

import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

EXE, CONFIGS, SCHEMAS = (Path(a) for a in sys.argv[1:4])

RUNS = [
    ("growth", "growth-gaussian.json"),
    ("growth", "growth-zero.json"),
    ("doubling-map", "doubling-map-uniform.json"),
    ("kcoeff", "kcoeff.json"),
    ("cover", "cover-random.json"),
    ("norms", "norms-step.json"),
    ("norms", "norms-zero.json"),
    ("equivalence", "constants.json"),
    ("equivalence", "suite.json"),
    ("eta-sweep", "eta-sweep.json"),
]

CSV_HEADERS = {
    "growth": "side,max_ratio,argmax_center",
    "doubling-map": "center,side,mass,expanded_mass,doubling,interior",
    "kcoeff": "index,inner_side,outer_side,value,steps",
    "cover": "instance,size,depth,probes",
    "norms": "definition,semantics,estimate",
    "equivalence": "measure,function,definition,semantics,estimate",
    "eta-sweep": "measure,function,definition,eta,estimate",
}

failures = []


def check(ok, what):
    print(("ok   " if ok else "FAIL ") + what)
    if not ok:
        failures.append(what)


def run(args, threads=None):
    env = dict(os.environ)
    if threads is not None:
        env["OSCILLOMETER_THREADS"] = str(threads)
    return subprocess.run([str(EXE), *args], capture_output=True, text=True, env=env)


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def outputs(d):
    return {p.name: p.read_bytes() for p in sorted(Path(d).iterdir())}


config_schema = schema("config")
for path in sorted(CONFIGS.glob("*.json")):
    try:
        jsonschema.validate(json.loads(path.read_text()), config_schema)
        check(True, f"config schema: {path.name}")
    except jsonschema.ValidationError as e:
        check(False, f"config schema: {path.name}: {e.message}")

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    for sub, cfg in RUNS:
        tag = f"{sub} {cfg}"
        a, b, c = tmp / f"{tag}-a", tmp / f"{tag}-b", tmp / f"{tag}-c"
        r = run([sub, "--config", str(CONFIGS / cfg), "--out", str(a)], threads=1)
        check(r.returncode == 0, f"{tag}: exit 0 (got {r.returncode}: {r.stderr.strip()})")
        if r.returncode != 0:
            continue
        files = outputs(a)
        check(set(files) == {f"{sub}.json", f"{sub}.csv"}, f"{tag}: artifact set {sorted(files)}")
        doc = json.loads(files[f"{sub}.json"])
        try:
            jsonschema.validate(doc, schema(sub))
            check(True, f"{tag}: artifact schema")
        except jsonschema.ValidationError as e:
            check(False, f"{tag}: artifact schema: {e.message} at {list(e.absolute_path)}")
        check(files[f"{sub}.csv"].decode().split("\n", 1)[0] == CSV_HEADERS[sub], f"{tag}: csv header")
        run([sub, "--config", str(CONFIGS / cfg), "--out", str(b)], threads=1)
        check(outputs(b) == files, f"{tag}: byte-identical rerun")
        run([sub, "--config", str(CONFIGS / cfg), "--out", str(c)], threads=4)
        check(outputs(c) == files, f"{tag}: byte-identical with 4 threads")

    r = run(["norms", "--config", str(CONFIGS / "norms-step.json"), "--seed", "424242", "--out", str(tmp / "seeded")])
    check(r.returncode == 0 and json.loads((tmp / "seeded" / "norms.json").read_text())["seed"] == 424242,
          "--seed overrides the config seed")

    cover = json.loads(outputs(tmp / "cover cover-random.json-a")["cover.json"])
    check(cover["coverage"] and all(i["coverage"] for i in cover["instances"]), "cover: every instance covered")

    zero = json.loads(outputs(tmp / "norms norms-zero.json-a")["norms.json"])
    check(all(e is None or e["estimate"] == 0.0 for e in zero["definitions"].values()), "norms: f = 0 gives zeros")

    eq = json.loads(outputs(tmp / "equivalence suite.json-a")["equivalence.json"])
    check(eq["hard_failures"] == 0, "equivalence suite: rbmo1 <= rbmo_yang everywhere")

    bad = tmp / "bad"
    bad.mkdir()
    (bad / "malformed.json").write_text("{ \"seed\": ")
    (bad / "beta.json").write_text(json.dumps({
        "measure": {"preset": "uniform", "params": {"dimension": 1, "cells": 64}},
        "function": {"kind": "sine"}, "doubling": {"beta": 1.0}}))
    (bad / "nofunc.json").write_text(json.dumps({"measure": {"preset": "uniform", "params": {"dimension": 1}}}))
    (bad / "missing-file.json").write_text(json.dumps({"measure": "nowhere.json", "function": {"kind": "sine"}}))
    for args, what in [
        (["norms"], "missing --config"),
        (["frobnicate", "--config", str(CONFIGS / "norms-step.json")], "unknown subcommand"),
        (["norms", "--config", str(bad / "nope.json")], "nonexistent config"),
        (["norms", "--config", str(bad / "malformed.json")], "malformed JSON"),
        (["norms", "--config", str(bad / "beta.json")], "beta below alpha^d"),
        (["norms", "--config", str(bad / "nofunc.json")], "norms without a function"),
        (["norms", "--config", str(bad / "missing-file.json")], "missing measure file"),
        (["norms", "--config", str(CONFIGS / "norms-step.json"), "--seed", "-3"], "negative seed"),
    ]:
        r = run([*args, "--out", str(tmp / "err")])
        check(r.returncode == 2, f"exit 2 for {what} (got {r.returncode})")
    r = run(["norms", "--config", str(CONFIGS / "norms-step.json"), "--out", str(tmp / "err")], threads="lots")
    check(r.returncode == 2, f"exit 2 for a bad OSCILLOMETER_THREADS (got {r.returncode})")

    r = run(["norms", "--config", str(CONFIGS / "pathological.json"), "--out", str(tmp / "patho")])
    check(r.returncode == 3, f"exit 3 for the pathological measure (got {r.returncode})")
    check(not (tmp / "patho" / "norms.json").exists(), "no artifacts for the pathological measure")

    leftovers = [p for p in tmp.rglob("*.tmp")]
    check(not leftovers, "no temporary files left behind")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
