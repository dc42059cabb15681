"""Inference: stacks in, prediction containers out."""

import hashlib
from pathlib import Path

import numpy as np
import torch

from .containers import read_stacks, write_predictions
from .train import load_checkpoint


def predict(gen, inputs, batch=1):
    """Run the generator over (N, p+2, ny, nx) inputs; returns (N, ny, nx)."""
    outs = []
    with torch.no_grad():
        for i in range(0, inputs.shape[0], batch):
            x = torch.from_numpy(np.array(inputs[i:i + batch]))
            outs.append(gen(x)[:, 0].numpy())
    return np.concatenate(outs).astype(np.float32)


def mirror_consistency(gen, inputs):
    """Mean |G(x) - reflect(G(reflect(x)))| over samples and pixels.

    Zero for a perfectly orientation-equivariant generator; training
    with mirrored data should push this down.
    """
    direct = predict(gen, inputs)
    reflected = predict(gen, np.ascontiguousarray(inputs[..., ::-1]))
    return float(np.mean(np.abs(direct - reflected[..., ::-1])))


def infer_file(checkpoint_path, stacks_path, out_path):
    """Write one predicted temperature map per stack.

    The source stacks' config hash and frame indices are passed through
    so the evaluator can check provenance; the checkpoint file's digest
    is recorded alongside.
    """
    gen, payload = load_checkpoint(checkpoint_path)
    inputs, _, frame_indices, metadata = read_stacks(stacks_path)
    maps = predict(gen, inputs)
    digest = hashlib.sha256(Path(checkpoint_path).read_bytes()).hexdigest()
    meta = {
        "config_hash": metadata.get("config_hash"),
        "config": metadata.get("config"),
        "trainer": {
            "checkpoint": str(checkpoint_path),
            "checkpoint_sha256": digest,
            "train_config": payload["train_config"],
            "generator_spec": payload["generator_spec"],
            "steps_completed": payload["steps_completed"],
        },
    }
    write_predictions(out_path, maps, frame_indices, meta)
    return out_path
