#!/usr/bin/env python3
"""Runs every abisim subcommand and validates its JSON report (and the
stderr error line of failing invocations) against data/schemas/."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema
from referencing import Registry, Resource


def load_registry(schema_dir):
    resources = []
    schemas = {}
    for path in sorted(schema_dir.glob("*.schema.json")):
        doc = json.loads(path.read_text())
        jsonschema.Draft202012Validator.check_schema(doc)
        resources.append((doc["$id"], Resource.from_contents(doc)))
        schemas[path.name.removesuffix(".schema.json")] = doc
    return Registry().with_resources(resources), schemas


def main():
    if len(sys.argv) != 3:
        print("usage: validate_reports.py <abisim> <data dir>", file=sys.stderr)
        return 2
    exe, data = sys.argv[1], Path(sys.argv[2])
    registry, schemas = load_registry(data / "schemas")

    def validator(name):
        return jsonschema.Draft202012Validator(schemas[name], registry=registry)

    failures = 0

    def check(name, args, expect_code=0, stream="stdout"):
        nonlocal failures
        proc = subprocess.run([exe, *args], capture_output=True, text=True)
        label = " ".join(args)
        if proc.returncode != expect_code:
            print(f"FAIL {label}: exit {proc.returncode}, expected {expect_code}\n{proc.stderr}")
            failures += 1
            return
        text = proc.stdout if stream == "stdout" else proc.stderr
        lines = [text] if stream == "stdout" else text.splitlines()
        if stream == "stderr" and len(lines) != 1:
            print(f"FAIL {label}: expected one stderr line, got {len(lines)}")
            failures += 1
            return
        try:
            doc = json.loads(lines[0])
        except json.JSONDecodeError as e:
            print(f"FAIL {label}: not JSON ({e})")
            failures += 1
            return
        errors = sorted(validator(name).iter_errors(doc), key=lambda e: list(e.absolute_path))
        if errors:
            failures += 1
            for e in errors[:5]:
                print(f"FAIL {label}: {'/'.join(map(str, e.absolute_path))}: {e.message}")
        else:
            print(f"ok   {label}")

    demos = sorted((data / "demos").glob("*.abi"))
    for demo in demos:
        check("run", ["run", str(demo), "--timestamp"])
    for workload in ["cnn", "ising", "lp", "gcn", "attn"]:
        check("bench", ["bench", "--workload", workload, "--seed", "5"])
        check("compare", ["compare", "--workload", workload, "--seed", "5"])
    check("bench", ["bench", "--spec", str(data / "specs" / "gcn.json")])
    check("sweep", ["sweep", "--workload", "cnn", "--seeds", "1,2", "--bit-wids", "2,4", "--sparsities", "0,0.5"])
    check("lwsm-stats", ["lwsm-stats", "--seed", "9", "--n", "8,16", "--trials", "300"])
    check("calibrate-check", ["calibrate-check"])

    with tempfile.TemporaryDirectory() as tmp:
        bad = Path(tmp) / "bad.abi"
        bad.write_text("LDR2 value=1\nNOPE\nHALT\n")
        check("error", ["run", str(bad)], expect_code=1, stream="stderr")
        bad.write_text("PRSET dis_s=0\nLDR2 value=0\nVMACRT addr=0\nHALT\n")
        check("error", ["run", str(bad)], expect_code=1, stream="stderr")
        calib = json.loads((data / "calibration.json").read_text())
        calib["baseline"]["instr_latency"] = 50.0
        bad_calib = Path(tmp) / "calib.json"
        bad_calib.write_text(json.dumps(calib))
        check("calibrate-check", ["calibrate-check", "--calibration", str(bad_calib)], expect_code=2)
        check("error", ["calibrate-check", "--calibration", str(bad_calib)], expect_code=2, stream="stderr")
    check("error", ["run", "/nonexistent.abi"], expect_code=1, stream="stderr")
    check("error", ["bench", "--workload", "cnn"], expect_code=1, stream="stderr")
    check("error", ["sweep", "--bogus"], expect_code=1, stream="stderr")

    print(f"{failures} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
