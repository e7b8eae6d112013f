"""Riemannian conjugate-gradient completion on the fixed-TT-rank manifold.

Minimizes ``f(X) = 0.5 * || X - A ||^2`` restricted to the observed entries,
over TT tensors of fixed rank (RTTC), or over the side-information
constrained set when bases are supplied (RTTC-SI).  Each iteration:

  (i)    residual on the training set,
  (ii)   Riemannian gradient by sparse tangent projection (mode-wise
         ``Q_k Q_k^T`` applied on top for RTTC-SI),
  (iii)  Polak-Ribiere+ conjugate direction with transported history,
         restarting to steepest descent when beta <= 0 or the direction
         stops being a descent direction,
  (iv)   exact line search in the flat sampled space, guarded by Armijo
         halving against retraction-induced increase,
  (v)    TT-SVD retraction at the fixed ranks,
  (vi)   bookkeeping: residual histories, stopping tests.

All stopping criteria are relative, so jointly scaling the data and the
initial guess leaves the iteration path decisions unchanged.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from math import prod
from typing import Callable, Optional

import numpy as np

from .manifold import (
    ManifoldPoint,
    TangentVector,
    make_point,
    project_tangent,
    sample_tangent,
    retract,
    tangent_combine,
    tangent_inner,
    transport,
)
from .samples import SparseSamples
from .sideinfo import SideInfo, apply_Q, project_tangent_si
from .tt import DENSE_CAP_DEFAULT, DenseTensor, TTTensor, entries

ALGORITHMS = ("rttc", "rttc-si")

_ARMIJO_C = 1e-4


class NumericalAbort(RuntimeError):
    """Raised when iterates degenerate to NaN or Inf."""


@dataclass(frozen=True)
class CompletionProblem:
    """A completion instance: training and test samples, target ranks,
    optional side information, and the initial guess."""

    train: SparseSamples
    test: SparseSamples
    ranks: tuple[int, ...]
    side: Optional[SideInfo] = None
    initial: Optional[TTTensor] = None

    def __post_init__(self):
        if self.train.dims != self.test.dims:
            raise ValueError(f"train dims {self.train.dims} != test dims {self.test.dims}")
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        if self.initial is not None and self.initial.dims != self.train.dims:
            raise ValueError(f"initial dims {self.initial.dims} != sample dims "
                             f"{self.train.dims}")


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 250
    test_tol: float = 1e-4
    train_tol: float = 1e-6
    stagnation_tol: float = 1e-10
    stagnation_window: int = 10
    cg_restart: Optional[int] = None  # force a steepest-descent restart every n iters
    max_halvings: int = 20
    seed: int = 0  # bookkeeping only; the solve itself draws no randomness


@dataclass
class SolveReport:
    converged: bool
    iterations: int
    train_history: list[float]
    test_history: list[float]
    final: TTTensor
    seconds: float
    final_train_rel: float
    final_test_rel: float
    stop_reason: str

    def to_json_line(self) -> str:
        """One-run-per-line record consumed by the experiment harness."""
        return json.dumps({
            "converged": bool(self.converged),
            "iterations": self.iterations,
            "final_train_rel": self.final_train_rel,
            "final_test_rel": self.final_test_rel,
            "seconds": self.seconds,
            "stop_reason": self.stop_reason,
            "train_history": self.train_history,
            "test_history": self.test_history,
        })


def objective(X: TTTensor, train: SparseSamples) -> float:
    """0.5 * squared residual on the training samples."""
    resid = entries(X, train.indices) - train.values
    return 0.5 * float(np.dot(resid, resid))


def _rel(residual_norm: float, ref: float) -> float:
    return residual_norm / ref if ref > 0 else residual_norm


def solve(problem: CompletionProblem, config: SolverConfig = SolverConfig(),
          algorithm: Optional[str] = None,
          on_iterate: Optional[Callable[[int, TTTensor, float, float], None]] = None,
          ) -> SolveReport:
    """Run the completion iteration; see the module docstring.

    ``algorithm`` defaults to ``"rttc-si"`` when side information is present
    and ``"rttc"`` otherwise.  ``"rttc"`` with side information present
    ignores the bases but keeps the same instance and initial guess, which
    is exactly the baseline comparison the experiments need.
    """
    if algorithm is None:
        algorithm = "rttc-si" if problem.side is not None else "rttc"
    if algorithm not in ALGORITHMS:
        raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")
    if algorithm == "rttc-si" and problem.side is None:
        raise ValueError("rttc-si requested but the problem has no side information")
    if problem.train.n == 0:
        raise ValueError("empty training sample set")
    if problem.initial is None:
        raise ValueError("problem has no initial guess")
    use_si = algorithm == "rttc-si"

    t_start = time.perf_counter()
    train, test = problem.train, problem.test
    train_ref = float(np.linalg.norm(train.values))
    test_ref = float(np.linalg.norm(test.values))

    def gradient(P: ManifoldPoint, resid_vals: np.ndarray) -> TangentVector:
        Z = SparseSamples(train.dims, train.indices, resid_vals)
        if use_si:
            return project_tangent_si(problem.side, P, Z)
        return project_tangent(P, Z)

    X = problem.initial
    P = make_point(X)
    train_vals = entries(X, train.indices)
    if not np.all(np.isfinite(train_vals)):
        raise NumericalAbort("initial guess evaluates to non-finite values")
    resid = train_vals - train.values
    train_rel = _rel(float(np.linalg.norm(resid)), train_ref)
    test_rel = _rel(float(np.linalg.norm(entries(X, test.indices) - test.values)), test_ref)

    train_history: list[float] = []
    test_history: list[float] = []
    stop_reason = "max_iters"
    grad_prev: Optional[TangentVector] = None
    dir_prev: Optional[TangentVector] = None
    gg_prev = 0.0
    iterations = 0

    if train_rel <= config.train_tol:
        stop_reason = "train_tol"
    elif test_rel <= config.test_tol:
        stop_reason = "test_tol"
    else:
        for it in range(1, config.max_iters + 1):
            grad = gradient(P, resid)
            gg = tangent_inner(grad, grad)
            if not np.isfinite(gg):
                raise NumericalAbort(f"iteration {it}: non-finite gradient")
            if gg == 0.0:
                stop_reason = "zero_gradient"
                break

            restart = (grad_prev is None
                       or (config.cg_restart is not None and it % config.cg_restart == 0))
            if restart:
                direction = tangent_combine([-1.0], [grad])
            else:
                grad_moved = transport(P, grad_prev)
                dir_moved = transport(P, dir_prev)
                beta = (gg - tangent_inner(grad, grad_moved)) / gg_prev
                if beta <= 0.0:
                    direction = tangent_combine([-1.0], [grad])
                else:
                    direction = tangent_combine([-1.0, beta], [grad, dir_moved])
                    if tangent_inner(direction, grad) >= 0.0:
                        direction = tangent_combine([-1.0], [grad])

            dir_vals = sample_tangent(direction, train.indices)
            dir_sq = float(np.dot(dir_vals, dir_vals))
            slope = float(np.dot(dir_vals, resid))  # = <direction, grad>, negative
            if dir_sq == 0.0 or not np.isfinite(dir_sq) or slope >= 0.0:
                stop_reason = "flat_direction"
                break
            step = -slope / dir_sq

            f_cur = 0.5 * float(np.dot(resid, resid))
            accepted = False
            for _ in range(config.max_halvings + 1):
                X_new = retract(P, direction, step, problem.ranks)
                new_vals = entries(X_new, train.indices)
                if not np.all(np.isfinite(new_vals)):
                    raise NumericalAbort(f"iteration {it}: non-finite iterate")
                f_new = 0.5 * float(np.dot(new_vals - train.values,
                                           new_vals - train.values))
                if f_new <= f_cur + _ARMIJO_C * step * slope:
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                stop_reason = "line_search_exhausted"
                break

            X = X_new
            P_new = make_point(X)
            grad_prev, dir_prev, gg_prev = grad, direction, gg
            P = P_new
            train_vals = new_vals
            resid = train_vals - train.values
            train_rel = _rel(float(np.linalg.norm(resid)), train_ref)
            test_rel = _rel(float(np.linalg.norm(entries(X, test.indices) - test.values)),
                            test_ref)
            train_history.append(train_rel)
            test_history.append(test_rel)
            iterations = it
            if on_iterate is not None:
                on_iterate(it, X, train_rel, test_rel)

            if train_rel <= config.train_tol:
                stop_reason = "train_tol"
                break
            if test_rel <= config.test_tol:
                stop_reason = "test_tol"
                break
            w = config.stagnation_window
            if len(train_history) >= w:
                old = train_history[-w]
                if old - train_rel <= config.stagnation_tol * old:
                    stop_reason = "stagnation"
                    break

    return SolveReport(
        converged=bool(test_rel < config.test_tol),
        iterations=iterations,
        train_history=train_history,
        test_history=test_history,
        final=X,
        seconds=time.perf_counter() - t_start,
        final_train_rel=train_rel,
        final_test_rel=test_rel,
        stop_reason=stop_reason,
    )


def small_space_gradient_oracle(S: SideInfo, Y: TTTensor, train: SparseSamples,
                                cap: int = DENSE_CAP_DEFAULT) -> DenseTensor:
    """Dense gradient of the reduced objective g(Y) = f(QY); oracle only.

    Materializes the sparse residual densely (the mode products destroy
    sparsity), then applies ``Q_k^T`` to every mode.  Desk scale only.
    """
    if Y.dims != S.reduced_dims:
        raise ValueError(f"dims mismatch: tensor {Y.dims} vs bases {S.reduced_dims}")
    if train.dims != S.full_dims:
        raise ValueError(f"dims mismatch: samples {train.dims} vs bases {S.full_dims}")
    if prod(S.full_dims) > cap:
        raise ValueError(f"dense residual of {prod(S.full_dims)} entries exceeds cap {cap}")
    resid = np.zeros(S.full_dims)
    flat = entries(apply_Q(S, Y), train.indices) - train.values
    for row, val in zip(train.indices, flat):
        resid[tuple(row)] = val
    out = resid
    for k, q in enumerate(S.bases):
        out = np.moveaxis(np.tensordot(q.T, np.moveaxis(out, k, 0), axes=(1, 0)), 0, k)
    return DenseTensor(out, cap=cap)
