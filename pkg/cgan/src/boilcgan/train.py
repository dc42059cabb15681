"""Deterministic adversarial training loop.

One step = one discriminator update followed by three generator
updates on a single sample (the discriminator otherwise outpaces the
generator).  Mirror augmentation comes in two flavors: substituting a
horizontally reflected sample with probability 0.5, or evaluating the
generator objective on both orientations and summing.  Loss curves
stream to CSV as training runs; a non-finite loss aborts with a
checkpoint of the last finite step.
"""

import copy
import csv
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import torch

from .containers import ContainerError, read_stacks
from .losses import discriminator_loss, generator_loss
from .models import (DiscriminatorSpec, GeneratorSpec, build_discriminator,
                     build_generator, spec_from_dict, spec_to_dict)

MODES = ("none", "input_augmentation", "additional_loss")

# published model variants: (lambda_rec, lambda_ibc, augmentation mode)
MODEL_TABLE = {
    1: (10.0, 0.0, "none"),
    2: (10.0, 5.0, "none"),
    3: (10.0, 5.0, "input_augmentation"),
    4: (10.0, 5.0, "additional_loss"),
}

LOSS_COLUMNS = ("step", "L_G", "L_REC", "L_IBC", "L_GAN", "L_D", "L_C")


class TrainingDiverged(RuntimeError):
    """Raised when a loss goes non-finite; carries the rescue checkpoint."""

    def __init__(self, message, checkpoint):
        super().__init__(message)
        self.checkpoint = checkpoint


@dataclass(frozen=True)
class TrainConfig:
    lambda_rec: float = 10.0
    lambda_ibc: float = 5.0
    mode: str = "none"
    lr: float = 1e-4
    betas: tuple = (0.9, 0.999)
    batch_size: int = 1
    epochs: int = 10
    gen_updates: int = 3
    augment_prob: float = 0.5
    seed: int = 0
    depth: int = 4
    base_width: int = 64
    disc_width: int = 64

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.lambda_rec < 0 or self.lambda_ibc < 0:
            raise ValueError("loss weights must be non-negative")
        if self.batch_size != 1:
            raise ValueError("only batch size 1 is supported")
        if self.epochs < 1 or self.gen_updates < 1:
            raise ValueError("epochs and gen_updates must be positive")


def model_config(number, **overrides):
    """TrainConfig for a numbered variant from the published table."""
    try:
        lam_rec, lam_ibc, mode = MODEL_TABLE[number]
    except KeyError:
        raise ValueError(f"unknown model number {number}")
    return TrainConfig(lambda_rec=lam_rec, lambda_ibc=lam_ibc, mode=mode,
                       **overrides)


@dataclass
class TrainResult:
    checkpoint: Path
    losses_csv: Path
    steps: int
    aborted: bool
    samples: int = field(default=0)


def load_training_set(stack_paths):
    """Concatenate stack containers into (inputs, targets, p).

    Every container must carry targets and agree on p and shape.
    """
    all_in, all_tg, p_seen = [], [], None
    for path in stack_paths:
        inputs, targets, _, _ = read_stacks(path)
        if targets is None:
            raise ContainerError(f"{path}: training stacks need targets")
        p = inputs.shape[1] - 2
        if p_seen is None:
            p_seen = p
        elif p != p_seen:
            raise ContainerError(f"{path}: p={p} disagrees with {p_seen}")
        all_in.append(inputs)
        all_tg.append(targets)
    if not all_in:
        raise ContainerError("no training stacks given")
    return np.concatenate(all_in), np.concatenate(all_tg), p_seen


def _flip(t):
    return torch.flip(t, dims=(-1,))


def generator_objective(gen, disc, x, y, config):
    """Per-sample generator loss under the configured augmentation mode.

    additional_loss evaluates the objective on the original and the
    reflected pair and sums both totals and components; a horizontally
    symmetric pair therefore scores exactly twice its single-sided
    value.
    """
    pred = gen(x)
    d_out = disc(torch.cat([x, pred], dim=1))
    total, comp = generator_loss(pred, y, d_out,
                                 config.lambda_rec, config.lambda_ibc)
    if config.mode == "additional_loss":
        xm, ym = _flip(x), _flip(y)
        pred_m = gen(xm)
        d_out_m = disc(torch.cat([xm, pred_m], dim=1))
        total_m, comp_m = generator_loss(pred_m, ym, d_out_m,
                                         config.lambda_rec, config.lambda_ibc)
        total = total + total_m
        comp = {k: comp[k] + comp_m[k] for k in comp}
    return total, comp


def _states(gen, disc):
    return (copy.deepcopy(gen.state_dict()), copy.deepcopy(disc.state_dict()))


def _checkpoint_payload(gen_state, disc_state, gen_spec, disc_spec, config,
                        steps, aborted):
    return {
        "generator": gen_state,
        "discriminator": disc_state,
        "generator_spec": spec_to_dict(gen_spec),
        "discriminator_spec": spec_to_dict(disc_spec),
        "train_config": asdict(config),
        "steps_completed": steps,
        "aborted": aborted,
    }


def train(stack_paths, out_dir, config=None, name="model"):
    """Train on the given stack containers; returns a TrainResult.

    Writes <name>.pt and <name>_losses.csv under out_dir.  On
    divergence the checkpoint holds the last finite step's weights and
    TrainingDiverged is raised after writing it.
    """
    config = config or TrainConfig()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    inputs, targets, p = load_training_set(stack_paths)

    torch.manual_seed(config.seed)
    gen_spec = GeneratorSpec(in_channels=p + 2, depth=config.depth,
                             base_width=config.base_width)
    disc_spec = DiscriminatorSpec(in_channels=p + 3,
                                  base_width=config.disc_width)
    gen = build_generator(gen_spec)
    disc = build_discriminator(disc_spec)
    opt_g = torch.optim.Adam(gen.parameters(), lr=config.lr,
                             betas=config.betas)
    opt_d = torch.optim.Adam(disc.parameters(), lr=config.lr,
                             betas=config.betas)

    rng = np.random.default_rng(config.seed)
    ckpt_path = out_dir / f"{name}.pt"
    csv_path = out_dir / f"{name}_losses.csv"
    snap = _states(gen, disc)
    step, aborted = 0, False

    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LOSS_COLUMNS)
        for _ in range(config.epochs):
            order = rng.permutation(inputs.shape[0])
            for i in order:
                x = torch.from_numpy(inputs[i][None])
                y = torch.from_numpy(targets[i][None, None])
                if (config.mode == "input_augmentation"
                        and rng.random() < config.augment_prob):
                    x, y = _flip(x), _flip(y)

                # losses are checked before each optimizer step so a
                # divergence never poisons the weights being saved; torch
                # itself raises once NaN activations reach the BCE
                try:
                    with torch.no_grad():
                        fake = gen(x)
                    d_real = disc(torch.cat([x, y], dim=1))
                    d_fake = disc(torch.cat([x, fake], dim=1))
                    l_d, d_comp = discriminator_loss(d_real, d_fake)
                    if not torch.isfinite(l_d):
                        raise TrainingDiverged("discriminator", None)
                    opt_d.zero_grad()
                    l_d.backward()
                    opt_d.step()

                    for _ in range(config.gen_updates):
                        l_g, g_comp = generator_objective(gen, disc, x, y,
                                                          config)
                        if not torch.isfinite(l_g):
                            raise TrainingDiverged("generator", None)
                        opt_g.zero_grad()
                        l_g.backward()
                        opt_g.step()
                except (TrainingDiverged, RuntimeError):
                    aborted = True
                    break

                row = (step + 1, float(l_g.detach()), g_comp["rec"],
                       g_comp["ibc"], g_comp["gan"], float(l_d.detach()),
                       d_comp["c"])
                if not all(np.isfinite(v) for v in row[1:]):
                    aborted = True
                    break
                step += 1
                writer.writerow(f"{v:.8g}" if isinstance(v, float) else v
                                for v in row)
                snap = _states(gen, disc)
            if aborted:
                break

    payload = _checkpoint_payload(snap[0], snap[1], gen_spec, disc_spec,
                                  config, step, aborted)
    torch.save(payload, ckpt_path)
    if aborted:
        raise TrainingDiverged(
            f"non-finite loss at step {step + 1}; checkpoint on step "
            f"{step} saved to {ckpt_path}", ckpt_path)
    return TrainResult(checkpoint=ckpt_path, losses_csv=csv_path,
                       steps=step, aborted=False,
                       samples=int(inputs.shape[0]))


def load_checkpoint(path):
    """Rebuild the generator (eval mode) and return it with the payload."""
    payload = torch.load(path, map_location="cpu", weights_only=True)
    gen = build_generator(spec_from_dict(payload["generator_spec"]))
    gen.load_state_dict(payload["generator"])
    gen.eval()
    return gen, payload
