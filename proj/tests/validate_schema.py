"""Runs the congrulab tool on the sample bodies and validates each verdict
against the published schema. Usage: validate_schema.py TOOL SCHEMA DATA_DIR"""

import itertools
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def diameter_direction(path):
    verts = json.loads(Path(path).read_text())["shape"]["vertices"]
    a, b = max(itertools.combinations(verts, 2),
               key=lambda p: sum((x - y) ** 2 for x, y in zip(*p)))
    d = [x - y for x, y in zip(a, b)]
    n = sum(x * x for x in d) ** 0.5
    return ",".join(repr(x / n) for x in d)


def main():
    tool, schema_path, data = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    k = data / "polytope_k.json"
    zeta = diameter_direction(k)
    runs = [
        (["projections", str(k), str(data / "polytope_k_shifted.json")], 0, "Equal"),
        (["projections", str(k), str(data / "polytope_k_reflected.json"), "--ground"], 0, "OEqual"),
    ]
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for i, (args, code, outcome) in enumerate(runs):
            out = Path(tmp) / f"verdict{i}.json"
            cmd = [tool, "verify", *args, "--zeta", zeta, "--grid-t", "16", "--grid-az", "128",
                   "--w-samples", "32", "--out", str(out)]
            proc = subprocess.run(cmd, capture_output=True, text=True)
            verdict = json.loads(out.read_text())
            errors = list(validator.iter_errors(verdict))
            ok = proc.returncode == code and verdict["outcome"] == outcome and not errors
            print(f"{'PASS' if ok else 'FAIL'} {' '.join(args[:1])} -> {verdict['outcome']} "
                  f"(exit {proc.returncode}, {len(errors)} schema errors)")
            for e in errors[:5]:
                print("   ", e.message)
            failures += not ok
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
