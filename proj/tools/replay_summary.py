#!/usr/bin/env python3
"""Independent reader for racesim replay files.

Parses the binary format with the standard library only and recomputes the
rollout summary. With --cli, runs `racesim run ... --out <replay>` first and
checks the recomputed summary against the JSON line the CLI printed.
Arguments after `--` are passed to `racesim run`.
"""

import argparse
import json
import math
import os
import struct
import subprocess
import sys
import tempfile
import zlib

MAGIC = b"RSREPLAY"
VERSION = 1
PRIV_SIZE = 57


class Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, fmt):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise ValueError("payload too short")
        values = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return values if len(values) > 1 else values[0]

    def raw(self, n):
        if self.pos + n > len(self.data):
            raise ValueError("payload too short")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out


def decode_record(payload, width, height):
    r = Reader(payload)
    rec = {}
    rec["kind"] = r.take("<B")
    rec["episode"] = r.take("<I")
    rec["step"] = r.take("<q")
    r.raw((width * height + 7) // 8)
    r.take("<3d")
    r.take("<4d")
    r.take("<24d")
    if r.take("<B"):
        r.take("<%dd" % PRIV_SIZE)
    rec["action"] = r.take("<4d")
    rec["reward"] = r.take("<4d")
    rec["termination"] = r.take("<B")
    r.take("<i")
    r.take("<I")
    rec["truncated"] = r.take("<B") != 0
    rec["laps"] = r.take("<I")
    r.take("<q")
    r.take("<B")
    r.take("<q")
    rec["specific_force"] = r.take("<d")
    rec["specific_thrust"] = r.take("<d")
    rec["speed"] = r.take("<d")
    crossings = []
    for _ in range(r.take("<H")):
        gate, kind, y, z, d_g = r.take("<iBddd")
        crossings.append({"gate": gate, "kind": kind, "y": y, "z": z, "half_extent": d_g})
    rec["crossings"] = crossings
    if r.pos != len(payload):
        raise ValueError("trailing payload bytes")
    return rec


def read_replay(path):
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 32 or data[:8] != MAGIC:
        raise ValueError("%s: not a replay file" % path)
    version, width, height, flags, count = struct.unpack_from("<IIIIQ", data, 8)
    if version != VERSION:
        raise ValueError("%s: replay version %d, expected %d" % (path, version, VERSION))
    pos = 32
    records = []
    for i in range(count):
        if len(data) - pos < 4:
            raise ValueError("%s: truncated at record %d" % (path, i))
        (length,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if len(data) - pos < length + 4:
            raise ValueError("%s: truncated at record %d" % (path, i))
        payload = data[pos:pos + length]
        pos += length
        (crc,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if crc != zlib.crc32(payload) & 0xFFFFFFFF:
            raise ValueError("%s: checksum mismatch in record %d" % (path, i))
        records.append(decode_record(payload, width, height))
    if pos != len(data):
        raise ValueError("%s: unexpected bytes after the last record" % path)
    return {"width": width, "height": height, "informed": bool(flags & 1)}, records


def summarize(records):
    s = {"steps": 0, "episodes": 0, "return": 0.0, "laps": 0, "crossings": 0,
         "gates_passed": 0, "max_speed": 0.0, "max_specific_force": 0.0,
         "max_specific_thrust": 0.0, "terminated": 0, "truncated": 0}
    laps = 0
    for rec in records:
        if rec["kind"] == 0:
            s["laps"] += laps
            laps = 0
            s["episodes"] += 1
            continue
        s["steps"] += 1
        s["return"] += rec["reward"][3]
        s["crossings"] += len(rec["crossings"])
        s["gates_passed"] += sum(1 for c in rec["crossings"] if c["kind"] == 1)
        s["max_speed"] = max(s["max_speed"], rec["speed"])
        s["max_specific_force"] = max(s["max_specific_force"], rec["specific_force"])
        s["max_specific_thrust"] = max(s["max_specific_thrust"], rec["specific_thrust"])
        s["terminated"] += rec["termination"] != 0
        s["truncated"] += rec["truncated"]
        laps = rec["laps"]
    s["laps"] += laps
    return s


def compare(ours, theirs, rel_tol=1e-12):
    problems = []
    for key, value in ours.items():
        if key not in theirs:
            problems.append("%s missing from CLI output" % key)
        elif isinstance(value, float):
            if not math.isclose(value, theirs[key], rel_tol=rel_tol, abs_tol=1e-12):
                problems.append("%s: replay %r, CLI %r" % (key, value, theirs[key]))
        elif value != theirs[key]:
            problems.append("%s: replay %r, CLI %r" % (key, value, theirs[key]))
    return problems


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("replay", nargs="?", help="replay file to summarize")
    parser.add_argument("--cli", help="racesim binary; runs it and compares summaries")
    argv = sys.argv[1:]
    cli_args = []
    if "--" in argv:
        split = argv.index("--")
        argv, cli_args = argv[:split], argv[split + 1:]
    args = parser.parse_args(argv)

    if args.cli:
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "rollout.bin")
            proc = subprocess.run([args.cli, "run", *cli_args, "--out", path],
                                  capture_output=True, text=True)
            if proc.returncode != 0:
                sys.stderr.write(proc.stderr)
                return proc.returncode
            lines = [l for l in proc.stdout.splitlines() if l.startswith("{")]
            if not lines:
                print("no JSON summary in CLI output", file=sys.stderr)
                return 1
            cli = json.loads(lines[-1])
            _, records = read_replay(path)
        ours = summarize(records)
        problems = compare(ours, cli)
        print(json.dumps(ours))
        for p in problems:
            print("mismatch: " + p, file=sys.stderr)
        return 1 if problems else 0

    if not args.replay:
        parser.error("a replay path or --cli is required")
    header, records = read_replay(args.replay)
    summary = summarize(records)
    summary.update(header)
    print(json.dumps(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
