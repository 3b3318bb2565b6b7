#!/usr/bin/env python3
"""Black-box checks of the racesim command-line tool."""

import argparse
import filecmp
import json
import os
import subprocess
import sys
import tempfile


def run(cli, *args):
    return subprocess.run([cli, *args], capture_output=True, text=True)


def last_json(stdout):
    lines = [l for l in stdout.splitlines() if l.startswith("{")]
    if not lines:
        raise SystemExit("no JSON line in output:\n" + stdout)
    return json.loads(lines[-1])


def fail(msg):
    print("FAIL: " + msg, file=sys.stderr)
    return 1


def check_exit(cli, expected, args):
    proc = run(cli, *args)
    print(proc.stdout + proc.stderr)
    if proc.returncode != expected:
        return fail("exit %d, expected %d" % (proc.returncode, expected))
    return 0


def check_determinism(cli, args):
    with tempfile.TemporaryDirectory() as tmp:
        outs = []
        for name in ("a.bin", "b.bin"):
            path = os.path.join(tmp, name)
            proc = run(cli, "run", *args, "--out", path)
            if proc.returncode != 0:
                return fail(proc.stderr)
            outs.append((path, last_json(proc.stdout)))
        if not filecmp.cmp(outs[0][0], outs[1][0], shallow=False):
            return fail("replays differ")
        if outs[0][1] != outs[1][1]:
            return fail("summaries differ")
        print("identical replays of %d bytes" % os.path.getsize(outs[0][0]))
    return 0


def check_hover(cli, args, limit):
    proc = run(cli, "run", *args)
    if proc.returncode != 0:
        return fail(proc.stderr)
    summary = last_json(proc.stdout)
    print(json.dumps(summary))
    if not summary["max_speed"] < limit:
        return fail("max speed %g not below %g" % (summary["max_speed"], limit))
    if summary["terminated"] != 0:
        return fail("hover episode terminated")
    return 0


def check_max_thrust(cli, args, target, tol):
    proc = run(cli, "run", "--policy", "max-thrust", *args)
    if proc.returncode != 0:
        return fail(proc.stderr)
    summary = last_json(proc.stdout)
    rel = abs(summary["max_specific_thrust"] - target) / target
    print("max specific thrust %.6f, target %.6f, rel err %.2e; full |F| %.3f" %
          (summary["max_specific_thrust"], target, rel, summary["max_specific_force"]))
    return 0 if rel <= tol else fail("relative error %g above %g" % (rel, tol))


def check_bench(cli, args, floor):
    proc = run(cli, "bench", *args)
    if proc.returncode != 0:
        return fail(proc.stderr)
    report = last_json(proc.stdout)
    print(json.dumps(report))
    if report["steps_per_sec_render"] < floor:
        return fail("%.0f steps/s below the %g floor" % (report["steps_per_sec_render"], floor))
    if not report["steps_per_sec_physics"] > report["steps_per_sec_render"]:
        return fail("physics-only mode is not faster than rendering mode")
    return 0


def check_render(cli, config):
    with tempfile.TemporaryDirectory() as tmp:
        replay = os.path.join(tmp, "r.bin")
        proc = run(cli, "run", "--config", config, "--steps", "40", "--out", replay)
        if proc.returncode != 0:
            return fail(proc.stderr)

        def render(frames, out):
            return run(cli, "render", "--replay", replay, "--frames", frames,
                       "--out", os.path.join(tmp, out))

        proc = render("0:10", "a")
        if proc.returncode != 0 or len(os.listdir(os.path.join(tmp, "a"))) != 10:
            return fail("0:10 should write 10 frames: " + proc.stdout + proc.stderr)
        if last_json(proc.stdout)["files"] != 10:
            return fail("render summary does not report 10 files")
        proc = render("0:10", "b")
        for name in sorted(os.listdir(os.path.join(tmp, "a"))):
            if not filecmp.cmp(os.path.join(tmp, "a", name), os.path.join(tmp, "b", name),
                               shallow=False):
                return fail("re-render of %s differs" % name)
        proc = render("3:3", "c")
        files = os.listdir(os.path.join(tmp, "c")) if os.path.isdir(os.path.join(tmp, "c")) else []
        if proc.returncode != 0 or files:
            return fail("empty range should write nothing")
        proc = render("0:100000", "d")
        if proc.returncode != 1:
            return fail("out-of-range frames exit %d, expected 1" % proc.returncode)
        with open(os.path.join(tmp, "a", "frame_000000.pgm"), "rb") as f:
            if not f.read().startswith(b"P5\n64 64\n255\n"):
                return fail("frame is not a 64x64 binary PGM")
    print("render checks passed")
    return 0


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("cli")
    p.add_argument("check", choices=["exit", "determinism", "hover", "render", "max-thrust", "bench"])
    p.add_argument("--expect", type=int, default=0)
    p.add_argument("--limit", type=float, default=0.1)
    p.add_argument("--config")
    p.add_argument("--target", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=0.01)
    p.add_argument("--floor", type=float, default=1000.0)
    argv = sys.argv[1:]
    rest = []
    if "--" in argv:
        split = argv.index("--")
        argv, rest = argv[:split], argv[split + 1:]
    a = p.parse_args(argv)
    if a.check == "exit":
        return check_exit(a.cli, a.expect, rest)
    if a.check == "determinism":
        return check_determinism(a.cli, rest)
    if a.check == "hover":
        return check_hover(a.cli, rest, a.limit)
    if a.check == "max-thrust":
        return check_max_thrust(a.cli, rest, a.target, a.tol)
    if a.check == "bench":
        return check_bench(a.cli, rest, a.floor)
    return check_render(a.cli, a.config)


if __name__ == "__main__":
    sys.exit(main())
