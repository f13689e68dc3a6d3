#!/usr/bin/env python3
"""Run one CLI invocation and check its exit code and output.

cli_case.py --exit N [--stdout S]... [--stderr S]... [--json] [--twice] -- cmd args...
  --stdout S   S must occur in stdout
  --stderr S   S must occur in stderr
  --json       stdout must parse as JSON
  --twice      a second run must give byte-identical stdout
"""
import argparse
import json
import subprocess
import sys


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--exit", type=int, required=True)
    ap.add_argument("--stdout", action="append", default=[])
    ap.add_argument("--stderr", action="append", default=[])
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--twice", action="store_true")
    ap.add_argument("--env", action="append", default=[])
    ap.add_argument("cmd", nargs=argparse.REMAINDER)
    a = ap.parse_args()
    cmd = a.cmd[1:] if a.cmd and a.cmd[0] == "--" else a.cmd
    env = None
    if a.env:
        import os
        env = dict(os.environ)
        for kv in a.env:
            k, v = kv.split("=", 1)
            env[k] = v
    r = subprocess.run(cmd, capture_output=True, text=True, env=env)
    print(r.stdout, end="")
    print(r.stderr, end="", file=sys.stderr)
    bad = []
    if r.returncode != a.exit:
        bad.append(f"exit {r.returncode}, expected {a.exit}")
    bad += [f"stdout lacks {s!r}" for s in a.stdout if s not in r.stdout]
    bad += [f"stderr lacks {s!r}" for s in a.stderr if s not in r.stderr]
    if a.json:
        try:
            json.loads(r.stdout)
        except ValueError as e:
            bad.append(f"stdout is not JSON: {e}")
    if a.twice:
        r2 = subprocess.run(cmd, capture_output=True, text=True, env=env)
        if r2.stdout != r.stdout:
            bad.append("second run differs")
    for b in bad:
        print("CHECK FAILED:", b, file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
