"""Iteration drivers for nonnegative low-rank approximation.

Two projection solvers share one loop: ``ap_solve`` projects back onto
the fixed-rank manifold with a full SVD of the dense iterate every step,
while ``tap_solve`` projects onto the tangent space at the previous
iterate first and retracts through a 2r x 2r core, so the only full-size
SVD is the initialization.  Both then clamp at zero.  NMF baselines
(multiplicative updates and HALS) and the empirical contraction-rate
estimator round out the comparison tooling.
"""

import math
import warnings
from dataclasses import dataclass, field
from time import perf_counter
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import DomainError, InsufficientDataError, ShapeError
from .linalg import SvdTriplet, as_matrix, frobenius_norm, matmul
from .projections import (
    TangentFrame,
    project_fixed_rank,
    project_nonnegative,
    retract_to_rank,
    tangent_project_dense,
    tangent_project_structured,
)
from .rng import random_uniform

# Relative error below which an iterate is accepted as an exact fixed point.
# The relative-change rule alone cannot terminate at machine-precision
# errors (successive values fluctuate at the 1e-16 level), so rank-deficient
# nonnegative inputs would spin until max_iter without this floor.
FIXED_POINT_TOL = 1e-12

_LOG_FLOOR = 1e-15  # error differences at or below this are noise, not signal


@dataclass
class SolverConfig:
    """Run parameters shared by all solvers.

    ``seed`` is only consumed by the NMF baselines (factor initialization).
    ``max_iter = 0`` is allowed there and returns the initialization
    unchanged; the projection solvers need at least one iteration.
    """

    rank: int
    max_iter: int = 1000
    rel_change_tol: float = 1e-6
    time_limit: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.rank < 1:
            raise DomainError(f"rank must be >= 1, got {self.rank}")
        if self.max_iter < 0:
            raise DomainError(f"max_iter must be >= 0, got {self.max_iter}")
        if not self.rel_change_tol > 0:
            raise DomainError(
                f"rel_change_tol must be > 0, got {self.rel_change_tol}"
            )
        if self.time_limit is not None and self.time_limit <= 0:
            raise DomainError(f"time_limit must be > 0, got {self.time_limit}")


class TraceRecord(NamedTuple):
    iteration: int
    rel_error: float
    seconds: float      # cumulative wall time over iteration bodies
    min_entry: float    # smallest entry of the current iterate


@dataclass
class IterationTrace:
    """Per-iteration error/time records of a solver run."""

    records: list = field(default_factory=list)

    def append(self, record: TraceRecord) -> None:
        if self.records and record.iteration <= self.records[-1].iteration:
            raise DomainError("trace iteration indices must be strictly increasing")
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def iterations(self):
        return [rec.iteration for rec in self.records]

    @property
    def rel_errors(self):
        return [rec.rel_error for rec in self.records]

    @property
    def seconds(self) -> float:
        """Total wall time of the run (0 for an empty trace)."""
        return self.records[-1].seconds if self.records else 0.0

    def to_dicts(self):
        return [rec._asdict() for rec in self.records]

    @classmethod
    def from_dicts(cls, rows):
        trace = cls()
        for row in rows:
            trace.append(
                TraceRecord(
                    int(row["iteration"]),
                    float(row["rel_error"]),
                    float(row.get("seconds", 0.0)),
                    float(row.get("min_entry", 0.0)),
                )
            )
        return trace


@dataclass
class ApproximationResult:
    """Final iterates and diagnostics of a projection solver run.

    ``x`` is the rank-r iterate (may carry tiny negative entries), ``y``
    its nonnegative clamp.  Errors are reported against the input for
    both; comparisons with published tables use ``rel_error_x``.
    """

    x: SvdTriplet
    y: np.ndarray
    rel_error_x: float
    rel_error_y: float
    trace: IterationTrace
    converged: bool
    degenerate_rank: bool


def relative_error(a: np.ndarray, x_reconstruction: np.ndarray) -> float:
    """``||a - x||_F / ||a||_F``; the accuracy metric used throughout."""
    if a.shape != x_reconstruction.shape:
        raise ShapeError(
            f"shape mismatch: {a.shape} vs {x_reconstruction.shape}"
        )
    norm_a = frobenius_norm(a)
    if norm_a == 0.0:
        raise DomainError("relative error undefined for a zero-norm matrix")
    return frobenius_norm(a - x_reconstruction) / norm_a


def ap_solve(
    a: np.ndarray,
    cfg: SolverConfig,
    on_iterate: Optional[Callable] = None,
) -> ApproximationResult:
    """Alternating projections with a full truncated SVD every iteration.

    Iterates ``X <- best_rank_r(Y)``, ``Y <- clamp(X)`` from ``X = best
    rank r of A``.  ``on_iterate(k, x_dense, y)``, when given, is called
    after every iteration (used by tests to inspect iterates).
    """
    return _alternating_solve(a, cfg, use_tangent=False, on_iterate=on_iterate)


def tap_solve(
    a: np.ndarray,
    cfg: SolverConfig,
    on_iterate: Optional[Callable] = None,
) -> ApproximationResult:
    """Alternating projections through the tangent space of the last iterate.

    After the initial full-size truncated SVD, each step projects Y onto
    the tangent space at X (two thin QRs) and retracts via the SVD of the
    2r x 2r core, so no further m x n SVD is performed.
    """
    return _alternating_solve(a, cfg, use_tangent=True, on_iterate=on_iterate)


def _alternating_solve(a, cfg, use_tangent, on_iterate):
    a = as_matrix(a, "input matrix")
    if cfg.max_iter < 1:
        raise DomainError("projection solvers need max_iter >= 1")
    m, n = a.shape
    r = cfg.rank
    if r > min(m, n):
        raise ShapeError(f"rank {r} exceeds min(m, n) = {min(m, n)}")
    if (a < 0).any():
        warnings.warn(
            "input matrix has negative entries; proceeding anyway",
            RuntimeWarning,
            stacklevel=3,
        )
    norm_a = frobenius_norm(a)
    if norm_a == 0.0:
        raise DomainError("cannot approximate a zero matrix (relative error undefined)")

    eps = float(np.finfo(np.float64).eps)
    trace = IterationTrace()
    elapsed = 0.0

    tic = perf_counter()
    x = project_fixed_rank(a, r)
    x_dense = x.reconstruct()
    y = project_nonnegative(x_dense)
    err = frobenius_norm(a - x_dense) / norm_a
    elapsed += perf_counter() - tic
    trace.append(TraceRecord(1, err, elapsed, float(x_dense.min())))
    if on_iterate is not None:
        on_iterate(1, x_dense, y)

    converged = err < FIXED_POINT_TOL
    k = 1
    while not converged and k < cfg.max_iter:
        if cfg.time_limit is not None and elapsed >= cfg.time_limit:
            break
        k += 1
        tic = perf_counter()
        if use_tangent:
            frame = TangentFrame(x.u, x.v)
            if 2 * r > min(m, n):
                # [U Q] cannot have 2r orthonormal columns here; fall back
                # to the dense evaluation of the same operator.
                x = project_fixed_rank(tangent_project_dense(frame, y), r)
            else:
                x = retract_to_rank(tangent_project_structured(frame, y), r)
        else:
            x = project_fixed_rank(y, r)
        x_dense = x.reconstruct()
        y = project_nonnegative(x_dense)
        prev = err
        err = frobenius_norm(a - x_dense) / norm_a
        elapsed += perf_counter() - tic
        trace.append(TraceRecord(k, err, elapsed, float(x_dense.min())))
        if on_iterate is not None:
            on_iterate(k, x_dense, y)
        if err < FIXED_POINT_TOL or abs(err - prev) / max(err, eps) < cfg.rel_change_tol:
            converged = True

    degenerate = bool(x.s[0] == 0.0 or x.s[-1] <= 1e-13 * x.s[0])
    return ApproximationResult(
        x=x,
        y=y,
        rel_error_x=float(err),
        rel_error_y=float(frobenius_norm(a - y) / norm_a),
        trace=trace,
        converged=converged,
        degenerate_rank=degenerate,
    )


_NMF_EPS = 1e-12  # additive guard against zero denominators


def nmf_mu_solve(a: np.ndarray, cfg: SolverConfig):
    """Multiplicative-update NMF for ``a ~ b @ c`` with b, c >= 0.

    One run from the uniform(0, 1) initialization drawn from ``cfg.seed``;
    restart protocols live in the benchmark harness.  Returns
    ``(b, c, trace)``; the trace records the initialization as iteration 0.
    """

    def update(a_mat, b, c):
        b *= matmul(a_mat, c.T) / (matmul(b, matmul(c, c.T)) + _NMF_EPS)
        c *= matmul(b.T, a_mat) / (matmul(matmul(b.T, b), c) + _NMF_EPS)

    return _nmf_solve(a, cfg, update)


def nmf_hals_solve(a: np.ndarray, cfg: SolverConfig):
    """Hierarchical ALS NMF: cyclic column/row updates clamped at zero.

    Same calling convention as :func:`nmf_mu_solve`.
    """

    def update(a_mat, b, c):
        w = matmul(a_mat, c.T)          # m x r
        s = matmul(c, c.T)              # r x r
        for j in range(b.shape[1]):
            b[:, j] = np.maximum(
                0.0, b[:, j] + (w[:, j] - matmul(b, s[:, j : j + 1])[:, 0]) / max(s[j, j], _NMF_EPS)
            )
        w2 = matmul(b.T, a_mat)         # r x n
        s2 = matmul(b.T, b)             # r x r
        for j in range(c.shape[0]):
            c[j, :] = np.maximum(
                0.0, c[j, :] + (w2[j, :] - matmul(s2[j : j + 1, :], c)[0, :]) / max(s2[j, j], _NMF_EPS)
            )

    return _nmf_solve(a, cfg, update)


def _nmf_solve(a, cfg, update):
    a = as_matrix(a, "input matrix")
    if cfg.seed is None:
        raise DomainError("NMF initialization requires cfg.seed")
    if (a < 0).any():
        warnings.warn(
            "input matrix has negative entries; proceeding anyway",
            RuntimeWarning,
            stacklevel=3,
        )
    m, n = a.shape
    r = cfg.rank
    norm_a = frobenius_norm(a)
    if norm_a == 0.0:
        raise DomainError("cannot factorize a zero matrix (relative error undefined)")

    draws = random_uniform(cfg.seed, m * r + r * n)
    b = draws[: m * r].reshape(m, r).copy()
    c = draws[m * r :].reshape(r, n).copy()

    eps = float(np.finfo(np.float64).eps)
    trace = IterationTrace()
    elapsed = 0.0
    bc = matmul(b, c)
    err = frobenius_norm(a - bc) / norm_a
    trace.append(TraceRecord(0, err, 0.0, float(bc.min())))

    for k in range(1, cfg.max_iter + 1):
        tic = perf_counter()
        update(a, b, c)
        bc = matmul(b, c)
        prev = err
        err = frobenius_norm(a - bc) / norm_a
        elapsed += perf_counter() - tic
        trace.append(TraceRecord(k, err, elapsed, float(bc.min())))
        if err < FIXED_POINT_TOL or abs(err - prev) / max(err, eps) < cfg.rel_change_tol:
            break
        if cfg.time_limit is not None and elapsed >= cfg.time_limit:
            break
    return b, c, trace


def contraction_rate_estimate(trace: IterationTrace, tail_fraction: float):
    """Empirical linear-convergence rate from the tail of an error trace.

    Uses the final trace error as the limit proxy and fits a least-squares
    line to ``log |e_k - e_last|`` over the tail window, keeping records
    whose distance to the limit exceeds 1e-15.  The absolute value matters:
    iterates started from the unconstrained best rank-r point approach the
    limit from below, so the excess error may be negative while its
    magnitude still decays geometrically.  Returns ``(c_hat, r_squared)``
    where ``c_hat`` is the exponentiated slope per iteration.
    """
    if not 0.0 < tail_fraction <= 1.0:
        raise DomainError(f"tail_fraction must be in (0, 1], got {tail_fraction}")
    n = len(trace)
    if n < 10:
        raise InsufficientDataError(f"trace has {n} records; need at least 10")

    errors = np.asarray(trace.rel_errors, dtype=np.float64)
    iters = np.asarray(trace.iterations, dtype=np.float64)
    window = slice(n - math.ceil(tail_fraction * n), n)
    excess = np.abs(errors[window] - errors[-1])
    usable = excess > _LOG_FLOOR
    if int(usable.sum()) < 3:
        raise InsufficientDataError(
            f"only {int(usable.sum())} usable points in the tail window; need at least 3"
        )
    x = iters[window][usable]
    y = np.log(excess[usable])
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    ss_res = float(residuals @ residuals)
    centered = y - y.mean()
    ss_tot = float(centered @ centered)
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(np.exp(slope)), float(r_squared)
