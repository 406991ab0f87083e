"""Synthetic moving-digit trajectory sequences.

Each frame is a one-hot digit code (10 dims) followed by a position code
for the digit on a canvas centred at the origin with side 1. The position
code is either the raw 2-D coordinate (``"xy"``, d = 12) or a unit-norm
Gaussian occupancy map over a ``G x G`` grid (``"map"``, d = 10 + G*G).
Eight parametric trajectories times ten digits give 80 classes.
Full clips run the whole trajectory; part clips run a random contiguous
window of it. All randomness is keyed on ``(seed, class, kind, variant)`` so
datasets are bitwise reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .types import EmbeddedSequence

SHAPES = (
    "eight_cw",
    "infinity_cw",
    "circle_cw",
    "eight_ccw",
    "infinity_ccw",
    "circle_ccw",
    "diag_up",
    "diag_down",
)
N_DIGITS = 10
ENCODINGS = ("xy", "map")

_FULL, _PART, _NOISE, _LOC, _DONOR = 0, 1, 2, 3, 4
_DONOR_VARIANT = 7


@dataclass(frozen=True)
class TrajectoryClass:
    digit: int
    shape: str

    def __post_init__(self):
        if not 0 <= self.digit < N_DIGITS:
            raise ValueError(f"digit must be in 0..9, got {self.digit}")
        if self.shape not in SHAPES:
            raise ValueError(f"unknown trajectory {self.shape!r}")

    @property
    def class_id(self) -> int:
        return self.digit * len(SHAPES) + SHAPES.index(self.shape)

    @classmethod
    def from_id(cls, class_id: int) -> "TrajectoryClass":
        digit, shape = divmod(int(class_id), len(SHAPES))
        return cls(digit, SHAPES[shape])

    def __str__(self):
        return f"[{self.digit}, {self.shape}]"


def all_classes() -> List[TrajectoryClass]:
    return [TrajectoryClass.from_id(c) for c in range(N_DIGITS * len(SHAPES))]


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    t_min: int = 30
    t_max: int = 50
    part_fraction_range: Tuple[float, float] = (0.3, 0.7)
    noise_rate: float = 0.0
    onehot_scale: float = 1.0
    encoding: str = "map"
    grid: int = 8
    sigma: float = 0.1
    map_weight: float = 1.0
    noise_kind: str = "donor"

    def __post_init__(self):
        if not 1 <= self.t_min <= self.t_max:
            raise ValueError("need 1 <= t_min <= t_max")
        lo, hi = self.part_fraction_range
        if not 0 < lo <= hi <= 1:
            raise ValueError("part fractions must satisfy 0 < lo <= hi <= 1")
        if not 0 <= self.noise_rate <= 1:
            raise ValueError("noise_rate must lie in [0, 1]")
        if self.encoding not in ENCODINGS:
            raise ValueError(f"encoding must be one of {ENCODINGS}")
        if self.noise_kind not in ("gaussian", "donor"):
            raise ValueError("noise_kind must be 'gaussian' or 'donor'")
        if self.grid < 1 or self.sigma <= 0:
            raise ValueError("need grid >= 1 and sigma > 0")

    @property
    def feature_dim(self) -> int:
        return N_DIGITS + (2 if self.encoding == "xy" else self.grid ** 2)


def trajectory(shape: str, t) -> np.ndarray:
    """Positions of ``shape`` at curve parameters ``t`` in [0, 1]; shape (len(t), 2)."""
    t = np.asarray(t, dtype=float)
    if shape.endswith("_ccw"):
        t = 1.0 - t
        shape = shape[: -len("_ccw")] + "_cw"
    w = 2 * np.pi * t
    if shape == "circle_cw":
        xy = (np.cos(w), np.sin(w))
    elif shape == "infinity_cw":
        xy = (np.sin(w), np.sin(2 * w) / 2)
    elif shape == "eight_cw":
        xy = (np.sin(w) / 2, np.sin(2 * w))
    elif shape == "diag_up":
        xy = (2 * t - 1, 2 * t - 1)
    elif shape == "diag_down":
        xy = (2 * t - 1, 1 - 2 * t)
    else:
        raise ValueError(f"unknown trajectory {shape!r}")
    return np.stack(xy, axis=1) / 2


def _rng(config: SynthConfig, *key) -> np.random.Generator:
    return np.random.default_rng([config.seed, *[int(k) for k in key]])


def occupancy_map(xy, grid: int = 8, sigma: float = 0.1) -> np.ndarray:
    """Unit-norm Gaussian bumps at ``xy`` sampled on a grid over [-0.5, 0.5]^2."""
    ax = np.linspace(-0.5, 0.5, grid)
    centres = np.stack(np.meshgrid(ax, ax), axis=-1).reshape(-1, 2)
    sq = ((np.asarray(xy)[:, None, :] - centres[None]) ** 2).sum(axis=-1)
    bump = np.exp(-sq / (2 * sigma ** 2))
    return bump / np.linalg.norm(bump, axis=1, keepdims=True)


def _frames(cls: TrajectoryClass, params, config: SynthConfig) -> np.ndarray:
    code = np.zeros((len(params), N_DIGITS))
    code[:, cls.digit] = config.onehot_scale
    xy = trajectory(cls.shape, params)
    if config.encoding == "map":
        xy = config.map_weight * occupancy_map(xy, config.grid, config.sigma)
    return np.hstack([code, xy])


def generate_full(cls: TrajectoryClass, config: SynthConfig = SynthConfig(),
                  variant: int = 0, length: int = None) -> EmbeddedSequence:
    """A clip running the whole trajectory with ``T ~ U{t_min..t_max}`` frames."""
    rng = _rng(config, _FULL, cls.class_id, variant)
    t = int(rng.integers(config.t_min, config.t_max + 1)) if length is None else int(length)
    params = np.linspace(0.0, 1.0, t)
    return EmbeddedSequence(_frames(cls, params, config), np.full(t, cls.class_id))


def generate_part(cls: TrajectoryClass, config: SynthConfig = SynthConfig(),
                  variant: int = 0, length: int = None) -> EmbeddedSequence:
    """A clip over a random contiguous parameter window of the trajectory.

    The window length is drawn from ``part_fraction_range`` and its start is
    uniform over the admissible offsets.
    """
    rng = _rng(config, _PART, cls.class_id, variant)
    t = int(rng.integers(config.t_min, config.t_max + 1))
    if length is not None:
        t = int(length)
    frac = rng.uniform(*config.part_fraction_range)
    start = rng.uniform(0.0, 1.0 - frac)
    params = np.linspace(start, start + frac, t)
    return EmbeddedSequence(_frames(cls, params, config), np.full(t, cls.class_id))


def contaminate(seq: EmbeddedSequence, noise_rate: float, seed: int = 0,
                reference=None, donor=None) -> EmbeddedSequence:
    """Replace ``floor(noise_rate * N)`` random frames by outliers.

    By default outliers are Gaussian draws with the per-coordinate mean and
    standard deviation of ``reference`` (an (M, d) array of clean frames;
    defaults to ``seq``). With ``donor`` (an (M, d) array) the outliers are
    instead frames sampled with replacement from it, e.g. a clip of another
    class. Untouched frames keep their positions and order. Replaced frames
    get label ``-1``.
    """
    if not 0 <= noise_rate <= 1:
        raise ValueError("noise_rate must lie in [0, 1]")
    x = np.array(seq.elements)
    n = x.shape[0]
    rng = np.random.default_rng([int(seed), _NOISE])
    idx = np.sort(rng.choice(n, size=int(np.floor(noise_rate * n)), replace=False))
    if donor is not None:
        donor = np.asarray(donor, dtype=float)
        if donor.ndim != 2 or donor.shape[1] != x.shape[1]:
            raise ValueError("donor frames must have the sequence's feature dimension")
        x[idx] = donor[rng.integers(0, donor.shape[0], size=idx.size)]
    else:
        ref = x if reference is None else np.asarray(reference, dtype=float)
        mu, sd = ref.mean(axis=0), ref.std(axis=0)
        x[idx] = mu + sd * rng.standard_normal((idx.size, x.shape[1]))
    labels = None
    if seq.labels is not None:
        labels = np.array(seq.labels)
        labels[idx] = -1
    return EmbeddedSequence(x, labels)


def outlier_indices(noise_rate: float, n: int, seed: int = 0) -> np.ndarray:
    """The frame indices :func:`contaminate` replaces for this seed."""
    rng = np.random.default_rng([int(seed), _NOISE])
    return np.sort(rng.choice(n, size=int(np.floor(noise_rate * n)), replace=False))


def retrieval_dataset(config: SynthConfig = SynthConfig()):
    """80 contaminated part-clip queries and the 80-clip full gallery.

    Gaussian outlier statistics come from the pooled clean gallery frames.
    Donor outliers for a query come from one part clip of a random other
    class.

    Returns
    -------
    queries, gallery : list of EmbeddedSequence
    classes : np.ndarray of int
        Class id of ``queries[q]`` and ``gallery[q]``.
    """
    classes = all_classes()
    gallery = [generate_full(c, config) for c in classes]
    pool = np.vstack([g.elements for g in gallery])
    queries = []
    for c in classes:
        seed = config.seed * 1000 + c.class_id
        donor = None
        if config.noise_kind == "donor" and config.noise_rate > 0:
            pick = int(_rng(config, _DONOR, c.class_id).integers(len(classes) - 1))
            other = pick + (pick >= c.class_id)
            donor = generate_part(TrajectoryClass.from_id(other), config, variant=_DONOR_VARIANT).elements
        queries.append(contaminate(generate_part(c, config), config.noise_rate,
                                   seed=seed, reference=pool, donor=donor))
    return queries, gallery, np.array([c.class_id for c in classes])


@dataclass
class LocalizationInstance:
    signal: EmbeddedSequence
    query: EmbeddedSequence
    truth: List[Tuple[int, int]]
    target: TrajectoryClass
    clip_classes: List[int]


def build_localization_instance(target: TrajectoryClass, n: int, m: int,
                                config: SynthConfig = SynthConfig(),
                                instance: int = 0) -> LocalizationInstance:
    """Concatenate ``m`` part clips, exactly ``n`` of them of ``target``.

    The ``n`` target slots are uniform among the ``m`` positions; the other
    clips come from distinct non-target classes. The query concatenates
    ``n`` full clips of ``target``. ``truth`` lists the inclusive 0-based
    frame intervals of the target clips inside the signal.
    """
    if not 1 <= n < m:
        raise ValueError("need 1 <= n < m")
    rng = _rng(config, _LOC, target.class_id, instance)
    slots = set(rng.choice(m, size=n, replace=False).tolist())
    others = [c for c in range(N_DIGITS * len(SHAPES)) if c != target.class_id]
    distract = iter(rng.choice(others, size=m - n, replace=False).tolist())
    clips, clip_classes, truth = [], [], []
    start = 0
    for pos in range(m):
        cls = target if pos in slots else TrajectoryClass.from_id(next(distract))
        clip = generate_part(cls, config, variant=instance * 64 + pos + 1)
        clips.append(clip.elements)
        clip_classes.append(cls.class_id)
        if pos in slots:
            truth.append((start, start + len(clip) - 1))
        start += len(clip)
    labels = np.concatenate([np.full(len(c), k) for c, k in zip(clips, clip_classes)])
    signal = EmbeddedSequence(np.vstack(clips), labels)
    query = EmbeddedSequence(np.vstack([
        generate_full(target, config, variant=instance * 64 + q + 1).elements for q in range(n)
    ]))
    return LocalizationInstance(signal, query, truth, target, clip_classes)
