"""Acceptance gate for the trainer, one PASS/FAIL line per criterion.

The data-backed criteria read desk-scale stack containers produced by
the simulation toolchain.  Point BOILCGAN_DATA at the directory holding
dataset_<i>.stacks (default: ../data relative to this package) and
BOILCGAN_FULL_RUN at the artifacts of the full training run (default:
../runs/full); criteria whose inputs are absent are skipped with the
path they looked for.
"""

import csv
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest
import torch

from boilcgan.containers import read_stacks
from boilcgan.infer import mirror_consistency
from boilcgan.losses import discriminator_loss, generator_loss
from boilcgan.train import (TrainConfig, load_checkpoint, model_config,
                            train)

PKG_ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = Path(os.environ.get("BOILCGAN_DATA", PKG_ROOT.parent / "data"))
FULL_DIR = Path(os.environ.get("BOILCGAN_FULL_RUN",
                               PKG_ROOT.parent / "runs" / "full"))

LN2 = math.log(2.0)


@pytest.fixture
def verdict(capsys):
    """One PASS/FAIL line per criterion, printed through the capture."""
    failures = []

    def check(name, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} {name}"
        if detail:
            line += f"  [{detail}]"
        with capsys.disabled():
            print(line, flush=True)
        if not ok:
            failures.append(line)

    yield check
    assert not failures, " | ".join(failures)


def _stacks(dataset_id):
    path = DATA_DIR / f"dataset_{dataset_id}.stacks"
    if not path.is_file():
        pytest.skip(f"desk-scale stacks not found at {path}")
    return path


def _losses(csv_path):
    with open(csv_path) as fh:
        rows = list(csv.DictReader(fh))
    return {key: np.array([float(r[key]) for r in rows])
            for key in rows[0]}


def test_loss_anchors(verdict):
    truth = torch.rand(1, 1, 8, 8)
    total, comp = generator_loss(truth.clone(), truth,
                                 torch.tensor([0.5]), 10.0, 5.0)
    ok_ln2 = (comp["rec"] == 0.0 and comp["ibc"] == 0.0
              and abs(total.item() - LN2) < 1e-6)
    verdict("generator loss ln-2 anchor", ok_ln2,
            f"L_G={total.item():.6f}")

    pred = torch.rand(1, 1, 8, 8)
    _, single = generator_loss(pred, truth, torch.tensor([0.5]), 10.0, 5.0)
    _, double = generator_loss(pred, truth, torch.tensor([0.5]), 20.0, 10.0)
    ok_lin = (double["rec"] == 2.0 * single["rec"]
              and double["ibc"] == 2.0 * single["ibc"])
    verdict("generator loss linearity in weights", ok_lin)

    half = torch.tensor([0.5])
    l_d, _ = discriminator_loss(half, half)
    verdict("discriminator loss zero at 0.5/0.5", l_d.item() == 0.0,
            f"L_D={l_d.item():.3g}")


def test_training_smoke(verdict, tmp_path):
    inputs_path = _stacks(1)
    inputs, targets, _, _ = read_stacks(inputs_path)
    if inputs.shape[0] < 50:
        pytest.skip("dataset 1 has fewer than 50 stacks")
    from boilcgan.containers import write_container
    subset = tmp_path / "smoke.stacks"
    merged = np.concatenate([inputs[:50], targets[:50, None]], axis=1)
    write_container(subset, merged, layout=2, p=inputs.shape[1] - 2,
                    metadata={"frame_indices": list(range(50))})

    config = model_config(2, epochs=2, seed=0, base_width=16, disc_width=16)
    t0 = time.monotonic()
    result = train([subset], tmp_path / "smoke", config, name="smoke")
    elapsed = time.monotonic() - t0
    curves = _losses(result.losses_csv)

    first = curves["L_REC"][:10].mean()
    last = curves["L_REC"][-10:].mean()
    verdict("smoke: reconstruction loss falls by half",
            last <= 0.5 * first,
            f"first10={first:.4g} last10={last:.4g}")

    final = slice(50, 100)
    healthy = np.ones(50, bool)
    for key in ("L_GAN", "L_C"):
        healthy &= (curves[key][final] >= 0.3) & (curves[key][final] <= 1.4)
    verdict("smoke: adversarial losses in the ln-2 band",
            healthy.mean() >= 0.8,
            f"fraction={healthy.mean():.2f}")
    verdict("smoke: runtime under 10 min CPU", elapsed < 600.0,
            f"{elapsed:.0f}s for 100 steps")


def test_mirror_consistency_ordering(verdict, tmp_path):
    train_path = _stacks(1)
    held_out_path = _stacks(8)
    inputs, targets, _, _ = read_stacks(train_path)
    if inputs.shape[0] < 128:
        pytest.skip("dataset 1 has fewer than 128 stacks")
    from boilcgan.containers import write_container
    subset = tmp_path / "train.stacks"
    merged = np.concatenate([inputs[:128], targets[:128, None]], axis=1)
    write_container(subset, merged, layout=2, p=inputs.shape[1] - 2,
                    metadata={"frame_indices": list(range(128))})
    held_inputs, _, _, _ = read_stacks(held_out_path)
    held = np.ascontiguousarray(held_inputs[:32])

    scores = {}
    for mode in ("none", "input_augmentation", "additional_loss"):
        config = TrainConfig(lambda_rec=10.0, lambda_ibc=5.0, mode=mode,
                             epochs=2, seed=0, base_width=8, disc_width=8)
        result = train([subset], tmp_path / mode, config, name=mode)
        gen, _ = load_checkpoint(result.checkpoint)
        scores[mode] = mirror_consistency(gen, held)

    detail = " ".join(f"{m}={s:.4g}" for m, s in scores.items())
    verdict("mirror-consistency: substitution beats none",
            scores["input_augmentation"] < scores["none"], detail)
    verdict("mirror-consistency: summed loss beats none",
            scores["additional_loss"] < scores["none"], detail)


def test_accuracy_proxy(verdict):
    summary = FULL_DIR / "evaluate_summary.csv"
    if not summary.is_file():
        pytest.skip(f"full-run artifacts not found at {summary}")
    with open(summary) as fh:
        rows = list(csv.DictReader(fh))
    per_dataset = [r for r in rows if r["label"].startswith("dataset_")]
    assert per_dataset, "summary carries no per-dataset rows"
    errs = [float(r["mean_percent_error_all"]) for r in per_dataset]
    mean_err = float(np.mean(errs))
    verdict("accuracy proxy: mean temperature error below 15%",
            mean_err < 15.0,
            f"mean={mean_err:.2f}% over {len(errs)} datasets")
    table = [(r["label"], r["rmse_q_ST_W_cm2"], r["rmse_q_S_W_cm2"])
             for r in per_dataset]
    lines = "; ".join(f"{l}: dq_ST={a} dq_S={b}" for l, a, b in table)
    verdict("accuracy proxy: flux RMSE rows reported", bool(table), lines)
