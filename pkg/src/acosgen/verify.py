"""Randomized verification suites for the contrastive loss implementation.

Two independent routes guard the loss kernel: the vectorized implementation
is compared against the naive double-summation oracle on random batches, and
its analytic gradient is compared against central finite differences. Both
suites are deterministic for a given seed; the first offending batch is
serialized so a failure can be replayed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .scl import ReprBatch, SclConfig, extend_batch, grad_check, reference_scl_loss, scl_loss

__all__ = ["VerificationResult", "random_batch", "oracle_suite", "gradient_suite", "save_failure"]

ORACLE_TOLERANCE = 1e-9
GRADIENT_TOLERANCE = 1e-4


@dataclass
class VerificationResult:
    name: str
    cases: int
    failures: int
    max_error: float
    tolerance: float
    first_failure: dict | None = field(default=None)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def summary(self) -> str:
        status = "ok" if self.passed else "FAILED"
        return (
            f"{self.name}: {self.cases - self.failures}/{self.cases} within "
            f"{self.tolerance:g} (max err {self.max_error:.3g}) {status}"
        )


def random_batch(
    rng: np.random.Generator,
    *,
    max_examples: int = 8,
    max_dim: int = 16,
    dropout_p: float = 0.1,
) -> ReprBatch:
    """Random extended batch: N <= max_examples sources plus dropout views.

    At these tiny dimensions dropout can zero out a whole view row, which is
    outside the cosine loss's domain; such draws are redrawn with a fresh
    dropout seed (deterministic given ``rng``).
    """
    n = int(rng.integers(1, max_examples + 1))
    dim = int(rng.integers(2, max_dim + 1))
    reps = rng.standard_normal((n, dim))
    labels = rng.integers(0, int(rng.integers(1, 4)), size=n)
    for _ in range(100):
        cfg = SclConfig(dropout_p=dropout_p, rng_seed=int(rng.integers(2**32)))
        batch = extend_batch(reps, labels, cfg)
        if np.linalg.norm(batch.reps, axis=1).min() > 0.0:
            return batch
    raise RuntimeError("could not draw a batch without zero-norm rows")


def _batch_payload(batch: ReprBatch, tau: float, error: float) -> dict:
    return {
        "tau": tau,
        "error": error,
        "reps": batch.reps.tolist(),
        "labels": [str(label) for label in batch.labels],
        "view_of": batch.view_of.tolist(),
    }


def oracle_suite(
    batches: int = 1000,
    tau: float = 0.25,
    seed: int = 0,
    loss_fn: Callable[[ReprBatch, float], tuple[float, np.ndarray]] = scl_loss,
) -> VerificationResult:
    """Compare the vectorized loss against the double-summation oracle."""
    rng = np.random.default_rng(seed)
    max_err = 0.0
    failures = 0
    first = None
    for _ in range(batches):
        batch = random_batch(rng)
        vectorized, _ = loss_fn(batch, tau)
        reference = reference_scl_loss(batch, tau)
        # Scale-aware relative error: floored at 1 so near-zero losses at
        # sharp temperatures compare on an absolute scale instead of
        # amplifying cancellation noise.
        err = abs(vectorized - reference) / max(abs(reference), abs(vectorized), 1.0)
        max_err = max(max_err, err)
        if err >= ORACLE_TOLERANCE:
            failures += 1
            if first is None:
                first = _batch_payload(batch, tau, err)
    return VerificationResult(
        name="loss oracle",
        cases=batches,
        failures=failures,
        max_error=max_err,
        tolerance=ORACLE_TOLERANCE,
        first_failure=first,
    )


def gradient_suite(
    batches: int = 100,
    tau: float = 0.25,
    seed: int = 0,
    h_step: float = 1e-5,
    loss_fn: Callable[[ReprBatch, float], tuple[float, np.ndarray]] = scl_loss,
) -> VerificationResult:
    """Check analytic gradients against central finite differences.

    The relative-error denominator here is additionally floored at the level
    where central-difference roundoff (eps * logit-scale / h) could itself
    read as a tolerance-sized relative error; below that magnitude a
    derivative is statistically indistinguishable from zero, so only larger
    coordinates are judged relatively. Bugs live in the large coordinates
    (a sign flip still reads as err ~ 2); the floor only stops roundoff on
    saturated, near-zero coordinates from failing sharp-temperature runs.
    :func:`acosgen.scl.grad_check` keeps the plain 1e-8-floored metric.
    """
    rng = np.random.default_rng(seed)
    max_err = 0.0
    failures = 0
    first = None
    for _ in range(batches):
        batch = random_batch(rng)
        err = _conditioned_grad_err(loss_fn, batch, tau, h_step)
        max_err = max(max_err, err)
        if err >= GRADIENT_TOLERANCE:
            failures += 1
            if first is None:
                first = _batch_payload(batch, tau, err)
    return VerificationResult(
        name="gradient check",
        cases=batches,
        failures=failures,
        max_error=max_err,
        tolerance=GRADIENT_TOLERANCE,
        first_failure=first,
    )


def _conditioned_grad_err(loss_fn, batch: ReprBatch, tau: float, h_step: float) -> float:
    """Finite-difference comparison with a noise-aware denominator floor."""
    from dataclasses import replace

    loss, grad = loss_fn(batch, tau)
    # Roundoff on a central difference of a quantity built from ~1/tau-sized
    # log-sum-exp terms; safety factor 10.
    sigma = np.finfo(np.float64).eps * max(1.0, abs(loss), 1.0 / tau) / h_step
    floor = max(1e-8, 10.0 * sigma / GRADIENT_TOLERANCE)
    max_err = 0.0
    rows, dim = batch.reps.shape
    for i in range(rows):
        for j in range(dim):
            bumped = batch.reps.copy()
            bumped[i, j] += h_step
            plus, _ = loss_fn(replace(batch, reps=bumped), tau)
            bumped[i, j] -= 2 * h_step
            minus, _ = loss_fn(replace(batch, reps=bumped), tau)
            numeric = (plus - minus) / (2 * h_step)
            err = abs(numeric - grad[i, j]) / max(abs(numeric), abs(grad[i, j]), floor)
            max_err = max(max_err, err)
    return max_err


def save_failure(result: VerificationResult, path: str | Path) -> Path:
    """Serialize the first offending batch of a failed suite for replay."""
    if result.first_failure is None:
        raise ValueError("suite has no recorded failure")
    path = Path(path)
    path.write_text(
        json.dumps({"suite": result.name, **result.first_failure}, indent=2), encoding="utf-8"
    )
    return path
