#!/usr/bin/env python3
"""Validate consctl JSON reports against docs/report_schema.json.

Checks the shipped examples in docs/examples, confirms they match what the
current binary writes, and validates reports for further CLI variants.
"""

import argparse
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

# (report name, arguments); run from docs/examples so "input" stays relative.
EXAMPLES = [
    ("analyze_example2.json", ["analyze", "example2.graph"]),
    ("leaders_example1.json", ["leaders", "example1.graph", "--all"]),
    ("structural_example2.json", ["structural", "example2.graph", "--leaders", "1", "--certify", "20"]),
    ("adjust_example2.json", ["adjust", "example2.graph"]),
    ("regular_cycle3.json", ["regular", "cycle3.graph"]),
    ("error_self_loop.json", ["analyze", "self_loop.graph"]),
]

EXTRA_GRAPHS = {
    "split.graph": "n 3\n1 2\n",
    "twins.graph": "n 6\n1 3\n1 5\n3 2\n3 6\n4 5\n5 4\n6 4\n",
    "tree.graph": "n 3\n1 2 1\n1 3 1\n",
    "one.graph": "n 1\n",
}

VARIANTS = [
    ["analyze", "example1.graph", "--cluster-tol", "1e-6"],
    ["leaders", "example2.graph", "--require", "2"],
    ["leaders", "example2.graph", "--budget", "1"],
    ["structural", "tree.graph", "--leaders", "1"],
    ["structural", "split.graph", "--leaders", "1", "--certify", "3"],
    ["adjust", "split.graph"],
    ["adjust", "twins.graph"],
    ["adjust", "example2.graph", "--max-iter", "0"],
    ["adjust", "example1.graph"],
    ["regular", "one.graph"],
    ["regular", "example2.graph"],
]


def run(binary, args, cwd, out):
    proc = subprocess.run([binary, *args, "--quiet", "--json", str(out)], cwd=cwd,
                          capture_output=True)
    return proc.returncode


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--consctl", required=True)
    parser.add_argument("--docs", required=True)
    opts = parser.parse_args()

    opts.consctl = str(pathlib.Path(opts.consctl).resolve())
    docs = pathlib.Path(opts.docs)
    examples = docs / "examples"
    schema = json.loads((docs / "report_schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0

    def check(label, text):
        nonlocal failures
        errors = sorted(validator.iter_errors(json.loads(text)), key=lambda e: list(e.path))
        for e in errors:
            print(f"FAIL {label}: {'/'.join(map(str, e.path))}: {e.message}")
        failures += bool(errors)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        for name, args in EXAMPLES:
            shipped = (examples / name).read_text()
            check(f"docs/examples/{name}", shipped)
            run(opts.consctl, args, examples, tmp / name)
            if (tmp / name).read_text() != shipped:
                print(f"FAIL docs/examples/{name}: differs from current output")
                failures += 1

        for src in examples.glob("*.graph"):
            (tmp / src.name).write_text(src.read_text())
        for name, text in EXTRA_GRAPHS.items():
            (tmp / name).write_text(text)
        for k, args in enumerate(VARIANTS):
            out = tmp / f"variant{k}.json"
            code = run(opts.consctl, args, tmp, out)
            report = out.read_text()
            if json.loads(report)["exit_code"] != code:
                print(f"FAIL {' '.join(args)}: exit_code field {code} mismatch")
                failures += 1
            check(" ".join(args), report)

    total = len(EXAMPLES) + len(VARIANTS)
    print(f"{total - failures} of {total} reports valid")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
