"""Supervised contrastive objective over characteristic representations.

Per-example representations are pooled encoder states passed through one
fully-connected head per characteristic. A mini-batch of N representations
is extended with one dropout-altered view per element (labels preserved) so
every row has at least one same-label partner; the per-row loss is then

    L_i = -1/|P(i)| * sum_{p in P(i)} log( exp(sim(h_i,h_p)/tau)
                                           / sum_{b in B(i)} exp(sim(h_i,h_b)/tau) )

with B(i) all other rows, P(i) its same-label subset, and sim = cosine
similarity. The batch loss is the mean of L_i over the extended batch.

Everything here is float64 and numerically stabilized (max-subtraction
inside the log-sum-exp). ``scl_loss`` returns the analytic gradient with
respect to every representation row; ``reference_scl_loss`` is a deliberately
naive double-summation of the same quantity, kept as an independent oracle,
and ``grad_check`` verifies the gradient against central finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "SclConfig",
    "ProjectionHead",
    "ReprBatch",
    "pool",
    "project",
    "project_rows",
    "extend_batch",
    "scl_loss",
    "reference_scl_loss",
    "total_loss",
    "grad_check",
    "parse_scl_config",
    "load_scl_config",
]


@dataclass(frozen=True)
class SclConfig:
    """Hyperparameters of the contrastive objective.

    ``alpha`` weights the three characteristic losses (sentiment, aspect,
    opinion) in the combined objective; a single float applies to all three.
    """

    tau: float = 0.25
    alpha: tuple[float, float, float] = (0.05, 0.05, 0.05)
    dropout_p: float = 0.1
    rng_seed: int = 0
    pooling: str = "mean"

    def __post_init__(self) -> None:
        alpha = self.alpha
        if isinstance(alpha, (int, float)):
            alpha = (float(alpha),) * 3
        else:
            alpha = tuple(float(a) for a in alpha)
            if len(alpha) != 3:
                raise ValueError(f"alpha must be a single weight or three, got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise ValueError(f"tau must be positive and finite, got {self.tau!r}")
        if not (0.0 <= self.dropout_p < 1.0):
            raise ValueError(f"dropout_p must be in [0, 1), got {self.dropout_p!r}")
        if any(not math.isfinite(a) for a in alpha):
            raise ValueError(f"alpha must be finite, got {alpha!r}")
        if self.pooling not in ("mean", "sum"):
            raise ValueError(f"pooling must be 'mean' or 'sum', got {self.pooling!r}")


@dataclass(frozen=True)
class ProjectionHead:
    """Affine map generating one characteristic representation: W v + b."""

    weight: np.ndarray  # (out_dim, in_dim)
    bias: np.ndarray  # (out_dim,)

    def __post_init__(self) -> None:
        weight = np.asarray(self.weight, dtype=np.float64)
        bias = np.asarray(self.bias, dtype=np.float64)
        if weight.ndim != 2 or bias.ndim != 1 or bias.shape[0] != weight.shape[0]:
            raise ValueError(
                f"head shapes disagree: weight {weight.shape}, bias {bias.shape}"
            )
        if not (np.isfinite(weight).all() and np.isfinite(bias).all()):
            raise ValueError("head parameters must be finite")
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "bias", bias)

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]

    @classmethod
    def random(
        cls, in_dim: int = 1024, out_dim: int = 1024, *, rng: np.random.Generator
    ) -> "ProjectionHead":
        weight = rng.standard_normal((out_dim, in_dim)) / math.sqrt(in_dim)
        return cls(weight=weight, bias=np.zeros(out_dim))


@dataclass(frozen=True)
class ReprBatch:
    """Extended batch: representation rows, labels, and view->source pairing.

    Rows N..2N-1 are the dropout views of rows 0..N-1 in order;
    ``view_of[i]`` is the source row index (``i`` itself for sources).
    """

    reps: np.ndarray  # (rows, dim)
    labels: np.ndarray  # (rows,)
    view_of: np.ndarray  # (rows,)

    def __post_init__(self) -> None:
        reps = np.asarray(self.reps, dtype=np.float64)
        labels = np.asarray(self.labels)
        view_of = np.asarray(self.view_of, dtype=np.intp)
        if reps.ndim != 2 or reps.shape[0] < 2:
            raise ValueError(f"reps must be a (rows >= 2, dim) matrix, got shape {reps.shape}")
        if labels.shape != (reps.shape[0],) or view_of.shape != (reps.shape[0],):
            raise ValueError("labels and view_of must have one entry per representation row")
        if not np.isfinite(reps).all():
            raise ValueError("representations must be finite")
        if view_of.min() < 0 or view_of.max() >= reps.shape[0]:
            raise ValueError("view_of indices out of range")
        if not np.all(labels == labels[view_of]):
            raise ValueError("views must carry the label of their source row")
        object.__setattr__(self, "reps", reps)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "view_of", view_of)

    @property
    def num_rows(self) -> int:
        return self.reps.shape[0]


def pool(hidden: np.ndarray, mode: str = "mean") -> np.ndarray:
    """Pool per-token encoder states (seq_len, dim) into one vector."""
    h = np.asarray(hidden, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] < 1:
        raise ValueError(f"expected a non-empty (seq_len, dim) matrix, got shape {h.shape}")
    if not np.isfinite(h).all():
        raise ValueError("hidden states must be finite")
    if mode == "mean":
        return h.mean(axis=0)
    if mode == "sum":
        return h.sum(axis=0)
    raise ValueError(f"pooling must be 'mean' or 'sum', got {mode!r}")


def project(v: np.ndarray, head: ProjectionHead) -> np.ndarray:
    """Apply a projection head to one pooled vector."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (head.in_dim,):
        raise ValueError(f"vector shape {v.shape} does not match head input dim {head.in_dim}")
    return head.weight @ v + head.bias


def project_rows(vs: np.ndarray, head: ProjectionHead) -> np.ndarray:
    """Apply a projection head to a (rows, in_dim) matrix of pooled vectors."""
    vs = np.asarray(vs, dtype=np.float64)
    if vs.ndim != 2 or vs.shape[1] != head.in_dim:
        raise ValueError(f"matrix shape {vs.shape} does not match head input dim {head.in_dim}")
    return vs @ head.weight.T + head.bias


def dropout_mask(shape: tuple[int, ...], p: float, rng: np.random.Generator) -> np.ndarray:
    """Keep-mask for inverted dropout: True entries survive (prob 1-p)."""
    return rng.random(shape) >= p


def _extend_with_mask(
    reps: np.ndarray, labels: Sequence, cfg: SclConfig
) -> tuple[ReprBatch, np.ndarray]:
    """extend_batch plus the keep-mask it drew (needed for backprop)."""
    reps = np.asarray(reps, dtype=np.float64)
    if reps.ndim != 2 or reps.shape[0] < 1:
        raise ValueError(f"expected a non-empty (N, dim) matrix, got shape {reps.shape}")
    labels_arr = np.asarray(labels)
    if labels_arr.shape != (reps.shape[0],):
        raise ValueError("need exactly one label per representation row")
    rng = np.random.default_rng(cfg.rng_seed)
    keep = dropout_mask(reps.shape, cfg.dropout_p, rng)
    views = reps * keep / (1.0 - cfg.dropout_p)
    n = reps.shape[0]
    batch = ReprBatch(
        reps=np.concatenate([reps, views], axis=0),
        labels=np.concatenate([labels_arr, labels_arr], axis=0),
        view_of=np.concatenate([np.arange(n), np.arange(n)]),
    )
    return batch, keep


def extend_batch(reps: np.ndarray, labels: Sequence, cfg: SclConfig) -> ReprBatch:
    """Extend N representations with one inverted-dropout view per element.

    Kept coordinates are rescaled by 1/(1-p) so views are unbiased; the view
    of row i lands at row N+i with the label copied. Deterministic for a
    fixed ``cfg.rng_seed``.
    """
    batch, _ = _extend_with_mask(reps, labels, cfg)
    return batch


def _cosine_matrix(reps: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    norms = np.linalg.norm(reps, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("zero-norm representation row: cosine similarity undefined")
    unit = reps / norms[:, None]
    return unit @ unit.T, unit, norms


def scl_loss(batch: ReprBatch, tau: float) -> tuple[float, np.ndarray]:
    """Batch-mean contrastive loss and its analytic gradient.

    Returns ``(loss, grad)`` with ``grad`` of shape ``batch.reps.shape``:
    the derivative of the mean per-row loss with respect to every
    representation row (cosine similarity, temperature ``tau``).
    """
    if not (tau > 0 and math.isfinite(tau)):
        raise ValueError(f"tau must be positive and finite, got {tau!r}")
    rows = batch.num_rows
    sims, unit, norms = _cosine_matrix(batch.reps)
    logits = sims / tau

    offdiag = ~np.eye(rows, dtype=bool)
    pos_mask = (batch.labels[:, None] == batch.labels[None, :]) & offdiag
    pos_counts = pos_mask.sum(axis=1)
    if np.any(pos_counts == 0):
        bad = int(np.argmin(pos_counts))
        raise ValueError(f"row {bad} has no same-label partner in the batch")

    # Stabilized log-sum-exp over each row's B(i) = all other rows.
    neg_inf = np.full_like(logits, -np.inf)
    masked = np.where(offdiag, logits, neg_inf)
    row_max = masked.max(axis=1)
    exp_shifted = np.exp(masked - row_max[:, None])
    exp_shifted[~offdiag] = 0.0
    denom = exp_shifted.sum(axis=1)
    lse = row_max + np.log(denom)

    per_row = lse - (logits * pos_mask).sum(axis=1) / pos_counts
    loss = float(per_row.mean())

    softmax = exp_shifted / denom[:, None]
    coeff = softmax - pos_mask / pos_counts[:, None]
    coeff = (coeff + coeff.T) / (rows * tau)
    grad = (coeff @ unit - (coeff * sims).sum(axis=1, keepdims=True) * unit) / norms[:, None]
    return loss, grad


def reference_scl_loss(batch: ReprBatch, tau: float) -> float:
    """Direct double-summation of the per-row loss (independent oracle).

    Plain Python loops, unstabilized exponentials: intentionally shares no
    code path with :func:`scl_loss`.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    reps = [np.asarray(row, dtype=np.float64) for row in batch.reps]
    labels = list(batch.labels)
    rows = len(reps)

    def cos(a: np.ndarray, b: np.ndarray) -> float:
        na = math.sqrt(float(np.dot(a, a)))
        nb = math.sqrt(float(np.dot(b, b)))
        if na == 0.0 or nb == 0.0:
            raise ValueError("zero-norm representation row")
        return float(np.dot(a, b)) / (na * nb)

    losses = []
    for i in range(rows):
        others = [b for b in range(rows) if b != i]
        positives = [p for p in others if labels[p] == labels[i]]
        if not positives:
            raise ValueError(f"row {i} has no same-label partner in the batch")
        denominator = sum(math.exp(cos(reps[i], reps[b]) / tau) for b in others)
        total = 0.0
        for p in positives:
            total += math.log(math.exp(cos(reps[i], reps[p]) / tau) / denominator)
        losses.append(-total / len(positives))
    return sum(losses) / rows


def total_loss(ce: float, scl_sent: float, scl_asp: float, scl_op: float, cfg: SclConfig) -> float:
    """Combined objective: cross-entropy plus weighted characteristic losses."""
    parts = (ce, scl_sent, scl_asp, scl_op)
    if any(not math.isfinite(p) for p in parts):
        raise ValueError(f"loss terms must be finite, got {parts!r}")
    a1, a2, a3 = cfg.alpha
    return ce + a1 * scl_sent + a2 * scl_asp + a3 * scl_op


def grad_check(
    batch: ReprBatch,
    tau: float,
    h_step: float = 1e-5,
    *,
    sample_limit: int = 10_000,
    sample_fraction: float = 0.1,
    rng_seed: int = 0,
) -> float:
    """Max relative error of the analytic gradient vs central differences.

    Checks every coordinate, or a random ``sample_fraction`` of them when the
    batch has more than ``sample_limit`` coordinates. Relative error uses the
    denominator max(|analytic|, |numeric|, 1e-8).
    """
    if h_step <= 0:
        raise ValueError("h_step must be positive")
    _, grad = scl_loss(batch, tau)
    rows, dim = batch.reps.shape
    total = rows * dim
    if total > sample_limit:
        rng = np.random.default_rng(rng_seed)
        count = max(1, int(round(total * sample_fraction)))
        flat = rng.choice(total, size=count, replace=False)
        coords = [(int(k) // dim, int(k) % dim) for k in flat]
    else:
        coords = [(i, j) for i in range(rows) for j in range(dim)]

    max_err = 0.0
    for i, j in coords:
        bumped = batch.reps.copy()
        bumped[i, j] += h_step
        plus, _ = scl_loss(replace(batch, reps=bumped), tau)
        bumped[i, j] -= 2 * h_step
        minus, _ = scl_loss(replace(batch, reps=bumped), tau)
        numeric = (plus - minus) / (2 * h_step)
        analytic = grad[i, j]
        err = abs(numeric - analytic) / max(abs(numeric), abs(analytic), 1e-8)
        max_err = max(max_err, err)
    return max_err


_CONFIG_KEYS = ("tau", "alpha", "alpha1", "alpha2", "alpha3", "dropout", "seed", "pooling")


def parse_scl_config(
    text: str, *, source: str = "<string>", base: SclConfig | None = None
) -> SclConfig:
    """Parse an SclConfig from ``key=value`` lines.

    Recognized keys: tau, alpha (sets all three weights), alpha1/2/3,
    dropout, seed, pooling. Blank lines and ``#`` comments are ignored;
    values not present fall back to ``base`` (or the defaults).
    """
    cfg = base if base is not None else SclConfig()
    values: dict[str, str] = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{line_no}: expected key=value, got {raw_line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{source}:{line_no}: unknown key {key!r}")
        values[key] = value

    tau = float(values["tau"]) if "tau" in values else cfg.tau
    alpha = list(cfg.alpha)
    if "alpha" in values:
        alpha = [float(values["alpha"])] * 3
    for idx, key in enumerate(("alpha1", "alpha2", "alpha3")):
        if key in values:
            alpha[idx] = float(values[key])
    dropout = float(values["dropout"]) if "dropout" in values else cfg.dropout_p
    seed = int(values["seed"]) if "seed" in values else cfg.rng_seed
    pooling = values.get("pooling", cfg.pooling)
    return SclConfig(
        tau=tau, alpha=tuple(alpha), dropout_p=dropout, rng_seed=seed, pooling=pooling
    )


def load_scl_config(path: str | Path, base: SclConfig | None = None) -> SclConfig:
    """Read an SclConfig from a plain ``key=value`` file."""
    path = Path(path)
    return parse_scl_config(path.read_text(encoding="utf-8"), source=str(path), base=base)
