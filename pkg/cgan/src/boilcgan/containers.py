"""Standalone codec for the simulation toolchain's dataset containers.

The trainer exchanges data with the simulation pipeline purely through
its on-disk container format: a BOIL magic, version byte, layout tag,
JSON metadata block, then a raw little-endian float32 payload, row-major
with channels sequential within each sample.  Reimplemented here so the
trainer carries no dependency on the simulation package itself.
"""

import json
import struct

import numpy as np


class ContainerError(Exception):
    """Malformed, truncated, or incompatible container file."""


MAGIC = b"BOIL"
FORMAT_VERSION = 1

LAYOUT_FRAMES = 1         # (rho, T) per sample
LAYOUT_STACKS_TARGET = 2  # p+1 contours, T0, target per sample
LAYOUT_STACKS = 3         # p+1 contours, T0 per sample
LAYOUT_PREDICTIONS = 4    # single temperature map per sample
LAYOUT_FRAMES_VEL = 5     # (rho, T, vx, vy) per sample

# magic, version, endian flag, width, height, p, samples, layout, channels
_HEADER = struct.Struct("<4sIBIIIIII")

_LAYOUT_CHANNELS = {
    LAYOUT_FRAMES: lambda p: 2,
    LAYOUT_STACKS_TARGET: lambda p: p + 3,
    LAYOUT_STACKS: lambda p: p + 2,
    LAYOUT_PREDICTIONS: lambda p: 1,
    LAYOUT_FRAMES_VEL: lambda p: 4,
}


def _channel_count(layout, p):
    try:
        return _LAYOUT_CHANNELS[layout](p)
    except KeyError:
        raise ContainerError(f"unknown container layout code {layout}")


def read_container(path):
    """Read a container to (samples, layout, p, metadata).

    samples is (count, channels, ny, nx) float32.  Truncation, trailing
    bytes, and header inconsistencies all raise ContainerError.
    """
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) < _HEADER.size:
            raise ContainerError(f"{path}: truncated header")
        magic, version, endian, nx, ny, p, count, layout, channels = \
            _HEADER.unpack(raw)
        if magic != MAGIC:
            raise ContainerError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise ContainerError(f"{path}: unsupported version {version}")
        if endian != 1:
            raise ContainerError(f"{path}: unsupported endianness flag")
        if channels != _channel_count(layout, p):
            raise ContainerError(f"{path}: channel count disagrees with layout")
        len_raw = fh.read(4)
        if len(len_raw) < 4:
            raise ContainerError(f"{path}: truncated metadata length")
        (meta_len,) = struct.unpack("<I", len_raw)
        meta_raw = fh.read(meta_len)
        if len(meta_raw) < meta_len:
            raise ContainerError(f"{path}: truncated metadata block")
        metadata = json.loads(meta_raw.decode("utf-8")) if meta_len else {}
        expect = count * channels * ny * nx * 4
        payload = fh.read(expect + 1)
        if len(payload) < expect:
            raise ContainerError(
                f"{path}: payload truncated ({len(payload)} of {expect} bytes)")
        if len(payload) > expect:
            raise ContainerError(f"{path}: trailing bytes after payload")
    samples = np.frombuffer(payload, dtype="<f4").reshape(count, channels,
                                                          ny, nx)
    return samples, layout, p, metadata


def write_container(path, samples, layout, p=0, metadata=None):
    samples = np.asarray(samples, dtype="<f4")
    if samples.ndim != 4:
        raise ContainerError("container payload must be 4-D")
    count, channels, ny, nx = samples.shape
    if channels != _channel_count(layout, p):
        raise ContainerError(
            f"layout {layout} with p={p} requires "
            f"{_channel_count(layout, p)} channels, got {channels}")
    meta_bytes = json.dumps(metadata or {}, sort_keys=True).encode("utf-8")
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, 1, nx, ny, p, count,
                          layout, channels)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(struct.pack("<I", len(meta_bytes)))
        fh.write(meta_bytes)
        fh.write(np.ascontiguousarray(samples).tobytes())


def read_stacks(path):
    """Load a stack container for training or inference.

    Returns (inputs, targets, frame_indices, metadata) where inputs is
    (N, p+2, ny, nx) float32 (contour history then T0 channel) and
    targets is (N, ny, nx) float32, or None for target-free stacks.
    """
    samples, layout, p, metadata = read_container(path)
    if layout == LAYOUT_STACKS_TARGET:
        inputs = samples[:, :p + 2]
        targets = samples[:, p + 2]
    elif layout == LAYOUT_STACKS:
        inputs, targets = samples, None
    else:
        raise ContainerError(f"{path}: not a stack container")
    indices = metadata.get("frame_indices", list(range(samples.shape[0])))
    if len(indices) != samples.shape[0]:
        raise ContainerError(f"{path}: frame index count mismatch")
    return np.ascontiguousarray(inputs), \
        None if targets is None else np.ascontiguousarray(targets), \
        [int(i) for i in indices], metadata


def write_predictions(path, maps, frame_indices, metadata=None):
    """Write one temperature map per stack in the evaluator's layout.

    Callers pass through the source stacks' config hash and frame
    indices so downstream comparisons can verify provenance.
    """
    maps = np.asarray(maps, dtype="<f4")
    if maps.ndim != 3:
        raise ContainerError("prediction maps must be (N, ny, nx)")
    if len(frame_indices) != maps.shape[0]:
        raise ContainerError("one frame index per prediction map required")
    meta = dict(metadata or {})
    meta["frame_indices"] = [int(i) for i in frame_indices]
    write_container(path, maps[:, None], LAYOUT_PREDICTIONS, p=0,
                    metadata=meta)


def mirror(arrays):
    """Reflect the trailing (x) axis; works on any channel layout."""
    return np.ascontiguousarray(np.asarray(arrays)[..., ::-1])
