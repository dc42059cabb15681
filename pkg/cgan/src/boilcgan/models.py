"""Generator and discriminator for the contour-to-temperature mapping.

Generator: U-net style encoder/decoder, every convolution 5x5 without
bias, batch-normalized, leaky-ReLU activated; decoding upsamples then
applies a unit-stride convolution (transposed convolutions produce
checkerboard artifacts); final layer is a lone convolution squashed by
tanh.  Discriminator: four-convolution feedforward stack with kernel
sizes 7, 5, 3, 5 and a global-average sigmoid head.  Both initialize
from N(0, 0.01) except their last layers, which use He-normal.
"""

from dataclasses import asdict, dataclass

import torch
from torch import nn


@dataclass(frozen=True)
class GeneratorSpec:
    in_channels: int = 4     # p + 2: contour history plus the T0 channel
    depth: int = 4           # number of 2x downsamplings
    base_width: int = 64     # channels at full resolution, doubling per level

    def __post_init__(self):
        if self.in_channels < 1 or self.depth < 1 or self.base_width < 1:
            raise ValueError("generator spec fields must be positive")

    def width(self, level):
        # widths cap at 8x base so the bottleneck does not outgrow memory
        return self.base_width * 2 ** min(level, 3)


@dataclass(frozen=True)
class DiscriminatorSpec:
    in_channels: int = 5     # input stack concatenated with a temperature map
    base_width: int = 64
    kernels: tuple = (7, 5, 3, 5)
    strides: tuple = (2, 2, 2, 1)

    def __post_init__(self):
        if len(self.kernels) != len(self.strides):
            raise ValueError("one stride per kernel required")
        if self.in_channels < 1 or self.base_width < 1:
            raise ValueError("discriminator spec fields must be positive")


class _ConvBlock(nn.Module):
    """5x5 conv (no bias) + batch norm + leaky ReLU."""

    def __init__(self, cin, cout, stride=1):
        super().__init__()
        self.conv = nn.Conv2d(cin, cout, 5, stride=stride, padding=2,
                              bias=False)
        self.norm = nn.BatchNorm2d(cout)
        self.act = nn.LeakyReLU(0.2)

    def forward(self, x):
        return self.act(self.norm(self.conv(x)))


class Generator(nn.Module):
    def __init__(self, spec: GeneratorSpec):
        super().__init__()
        self.spec = spec
        w = spec.width
        self.stem = _ConvBlock(spec.in_channels, w(0))
        self.down = nn.ModuleList()
        for i in range(spec.depth):
            self.down.append(nn.Sequential(
                _ConvBlock(w(i), w(i + 1), stride=2),
                _ConvBlock(w(i + 1), w(i + 1))))
        self.up = nn.ModuleList()
        self.fuse = nn.ModuleList()
        for i in reversed(range(spec.depth)):
            self.up.append(nn.Sequential(
                nn.Upsample(scale_factor=2, mode="nearest"),
                _ConvBlock(w(i + 1), w(i))))
            self.fuse.append(_ConvBlock(2 * w(i), w(i)))
        self.head = nn.Conv2d(w(0), 1, 5, padding=2, bias=False)
        _init_weights(self, last=self.head)

    def forward(self, x):
        ny, nx = x.shape[-2:]
        scale = 2 ** self.spec.depth
        if ny % scale or nx % scale:
            raise ValueError(
                f"input {ny}x{nx} not divisible by 2^depth = {scale}")
        skips = [self.stem(x)]
        h = skips[0]
        for enc in self.down:
            h = enc(h)
            skips.append(h)
        skips.pop()  # bottleneck output is h itself, not a skip
        for dec, fuse in zip(self.up, self.fuse):
            h = dec(h)
            h = fuse(torch.cat([h, skips.pop()], dim=1))
        return torch.tanh(self.head(h))


class Discriminator(nn.Module):
    def __init__(self, spec: DiscriminatorSpec):
        super().__init__()
        self.spec = spec
        blocks = []
        cin, w = spec.in_channels, spec.base_width
        for n, (k, s) in enumerate(zip(spec.kernels, spec.strides)):
            cout = w * 2 ** min(n, 2)
            blocks.append(nn.Sequential(
                nn.Conv2d(cin, cout, k, stride=s, padding=k // 2, bias=False),
                nn.BatchNorm2d(cout),
                nn.LeakyReLU(0.2)))
            cin = cout
        self.features = nn.Sequential(*blocks)
        self.head = nn.Linear(cin, 1, bias=False)
        _init_weights(self, last=self.head)

    def forward(self, x):
        h = self.features(x)
        h = h.mean(dim=(-2, -1))  # global average over space
        return torch.sigmoid(self.head(h)).squeeze(-1)


def _init_weights(module, last):
    for m in module.modules():
        if isinstance(m, (nn.Conv2d, nn.Linear)):
            nn.init.normal_(m.weight, mean=0.0, std=0.01)
    nn.init.kaiming_normal_(last.weight, nonlinearity="linear")


def build_generator(spec=None):
    return Generator(spec or GeneratorSpec())


def build_discriminator(spec=None):
    return Discriminator(spec or DiscriminatorSpec())


def spec_to_dict(spec):
    d = asdict(spec)
    d["kind"] = type(spec).__name__
    return d


def spec_from_dict(d):
    d = dict(d)
    kind = d.pop("kind")
    cls = {"GeneratorSpec": GeneratorSpec,
           "DiscriminatorSpec": DiscriminatorSpec}[kind]
    for key in ("kernels", "strides"):
        if key in d:
            d[key] = tuple(d[key])
    return cls(**d)
