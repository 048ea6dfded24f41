"""Write the two worked-example graphs (trainee and milestone views) as DOT.

    python3 scripts/worked_examples.py --out examples_out
    dot -Tpng examples_out/locust.trainee.dot -o locust.png
"""

import argparse
from pathlib import Path

from cmdgraphs import (
    CommandEvent,
    SessionTrace,
    build_milestone_graph,
    build_trainee_graph,
    emit_milestone_dot,
    emit_trainee_dot,
    load_milestone_spec,
    parse_reference_dot,
)

DATA = Path(__file__).parent / "data"

# one red detour and one step taken before its prerequisite
LOCUST_TRACE = ["nmap 10.1.26.9", "msfconsole -q", "ping 10.1.26.9", "ssh -i id_rsa user@10.1.26.9"]
# whoami is unrelated, cd is the wrong tool for the copy task, file succeeds
WRANGLER_TRACE = ["whoami", "cd secret.txt", "file data.bin"]


def trace(student, commands):
    return SessionTrace(student, "demo", tuple(CommandEvent(student, i, c) for i, c in enumerate(commands, 1)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("examples_out"))
    ap.add_argument("--palette", default="default", choices=["default", "colorblind"])
    ap.add_argument("--split", type=int, default=None)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    g = parse_reference_dot((DATA / "locust.dot").read_text())
    tg = build_trainee_graph(trace("locust", LOCUST_TRACE), g)
    (args.out / "locust.trainee.dot").write_text(emit_trainee_dot(tg, args.palette, split=args.split))

    spec = load_milestone_spec(DATA / "file_wrangler.yaml")
    mg = build_milestone_graph(trace("wrangler", WRANGLER_TRACE), spec)
    (args.out / "wrangler.milestone.dot").write_text(emit_milestone_dot(mg, args.palette))

    green, yellow, red = tg.counts()
    print(f"trainee view: {green} green, {yellow} yellow, {red} red")
    for m, s in zip(spec.milestones, mg.summaries):
        print(f"milestone {m.name}: {'achieved' if s.achieved else 'not achieved'} ({s.attempt_count} attempts)")
    print(f"wrote {args.out}/locust.trainee.dot and {args.out}/wrangler.milestone.dot")


if __name__ == "__main__":
    main()
