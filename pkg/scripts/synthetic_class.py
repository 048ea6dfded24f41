"""Generate a synthetic class of structured logs and time a full `generate` run."""

import argparse
import json
import random
import tempfile
import time
from pathlib import Path

from cmdgraphs.cli import main as cli_main

DATA = Path(__file__).parent / "data"

VOCAB = [
    "nmap 10.1.26.9",
    "nmap -sV 10.1.26.9",
    "msfconsole -q",
    "scp user@10.1.26.9:~/.ssh/id_rsa .",
    "john --wordlist=rockyou.txt id_rsa.hash",
    "ssh -i id_rsa user@10.1.26.9",
    "ls -la",
    "cd secret.txt",
    "cp secret.txt /tmp/",
    "file data.bin",
    "ping 10.1.26.9",
    "whoami",
    "man scp",
]


def write_class(directory: Path, students: int, commands: int, seed: int) -> None:
    rng = random.Random(seed)
    directory.mkdir(parents=True, exist_ok=True)
    for s in range(students):
        sid = f"student{s:03d}"
        with open(directory / f"{sid}.jsonl", "w") as fh:
            for i in range(commands):
                ts = f"2020-07-14T{9 + i // 3600:02d}:{i // 60 % 60:02d}:{i % 60:02d}Z"
                fh.write(json.dumps({"student": sid, "ts": ts, "cmd": rng.choice(VOCAB)}) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--students", type=int, default=50)
    ap.add_argument("--commands", type=int, default=150)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=None, help="keep outputs here instead of a temp dir")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        logs = Path(tmp) / "logs"
        out = args.out or Path(tmp) / "out"
        write_class(logs, args.students, args.commands, args.seed)
        t0 = time.perf_counter()
        status = cli_main(
            ["generate", str(logs), "--refgraph", str(DATA / "locust.dot"),
             "--milestones", str(DATA / "file_wrangler.yaml"), "--out", str(out)]
        )
        elapsed = time.perf_counter() - t0
        report = json.loads((out / "class_report.json").read_text())
    print(f"{args.students} students x {args.commands} commands: exit {status}, {elapsed:.2f}s")
    for m in report["milestone_completion"]:
        print(f"  {m['name']}: {m['achieved']}/{m['students']} achieved")
    print("  most common red commands:", ", ".join(f"{r['command']} ({r['count']})" for r in report["red_commands"][:3]))


if __name__ == "__main__":
    main()
