"""End-to-end training and evaluation over the standard splits.

Trains one model variant on the desk-scale training datasets, runs
inference on every test dataset, and scores the predictions with the
simulation toolchain's evaluator.  Both command-line tools are driven
as subprocesses, so this script exercises exactly the file-level
interface between the two packages.

Writes under --out: the checkpoint and loss CSV, one predictions
container per test dataset, per-dataset evaluation reports, and a
merged evaluate_summary.csv for the acceptance suite.
"""

import argparse
import csv
import subprocess
import sys
from pathlib import Path

TRAIN_IDS = (1, 3, 4, 6)
TEST_IDS = (2, 5, 7, 8, 9)


def run(cmd):
    print("+", " ".join(str(c) for c in cmd), flush=True)
    subprocess.run([str(c) for c in cmd], check=True)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", required=True,
                    help="directory with dataset_<i>.stacks and .frames")
    ap.add_argument("--out", required=True)
    ap.add_argument("--model", type=int, default=2)
    ap.add_argument("--epochs", type=int, default=10)
    ap.add_argument("--width", type=int, default=16)
    ap.add_argument("--disc-width", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--skip-train", action="store_true",
                    help="reuse an existing checkpoint in --out")
    args = ap.parse_args(argv)

    data, out = Path(args.data), Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = f"model{args.model}"
    checkpoint = out / f"{name}.pt"

    if not (args.skip_train and checkpoint.is_file()):
        run(["boilcgan", "train", "--data", data,
             "--datasets", ",".join(str(i) for i in TRAIN_IDS),
             "--model", args.model, "--epochs", args.epochs,
             "--width", args.width, "--disc-width", args.disc_width,
             "--seed", args.seed, "--name", name, "--out", out])

    rows = []
    for i in TEST_IDS:
        pred = out / f"dataset_{i}.pred"
        run(["boilcgan", "infer", "--checkpoint", checkpoint,
             "--stacks", data / f"dataset_{i}.stacks", "--out", pred])
        report_dir = out / f"eval_{i}"
        run(["boilgen", "evaluate", "--pred", pred,
             "--truth", data / f"dataset_{i}.stacks",
             "--frames", data / f"dataset_{i}.frames",
             "--label", f"dataset_{i}", "--out", report_dir])
        with open(report_dir / "evaluate_summary.csv") as fh:
            for row in csv.DictReader(fh):
                if row["label"] == f"dataset_{i}":
                    rows.append(row)

    merged = out / "evaluate_summary.csv"
    with open(merged, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    print(f"merged summary: {merged}")
    for row in rows:
        print(f"  {row['label']}: mean%={row['mean_percent_error_all']} "
              f"dq_ST={row['rmse_q_ST_W_cm2']} dq_S={row['rmse_q_S_W_cm2']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
