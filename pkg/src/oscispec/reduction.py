"""Harmonic reduction of the time-dependent problem to a lambda-bound ODE system.

Substituting z(y, t) = phi(y) exp(lam t) turns the second-order-in-time
problem into dphi/dy = [A(y) + lam^2 B(y) + lam C(y)] phi.  Two routes are
provided: the complex path keeps the N-dimensional complex system, the
real-split path separates real and imaginary parts of phi at lam = i*p into
a 2N-dimensional real system.  Eigenvalues are complex lam = q + i*p with
q the growth/decay rate and p the angular frequency; reported spectra use
the p >= 0 convention (conjugate pairs deduplicated).
"""

from __future__ import annotations

import numpy as np

from .linalg import realify
from .problem import (
    CoefficientField,
    LambdaCoefficientField,
    ProblemDefinition,
    ReducedSystem,
)


def reduce_complex(problem: ProblemDefinition, lam: complex) -> ReducedSystem:
    """Bind lambda into the complex N-dimensional first-order system.

    The coefficient evaluator returns A(y) + lam^2 B(y) + lam C(y); boundary
    and interface polynomials are evaluated at lam into constant complex
    matrices.
    """
    lam = complex(lam)
    coeffs = problem.coefficients
    if isinstance(coeffs, CoefficientField):
        batch = _poly_batch(coeffs, lam)
    else:
        batch = _lambda_batch(coeffs, lam)

    return ReducedSystem(
        partition=problem.partition,
        dim=problem.dim,
        lam=lam,
        is_real=False,
        left_matrix=np.asarray(problem.boundary_left(lam), dtype=complex),
        right_matrix=np.asarray(problem.boundary_right(lam), dtype=complex),
        interfaces=tuple(
            (
                np.asarray(c.d_matrix(lam), dtype=complex),
                np.asarray(c.b_matrix(lam), dtype=complex),
            )
            for c in sorted(problem.conjugations, key=lambda c: c.interface)
        ),
        bound=_reduced_bound(coeffs, lam),
        coeff_batch=batch,
    )


def reduce_real_split(problem: ProblemDefinition, p: float) -> ReducedSystem:
    """Bind a real frequency p into the 2N-dimensional real system.

    The state stacks (real part, imaginary part) of phi; the coefficient
    matrix takes the block form [[A - p^2 B, -p C], [p C, A - p^2 B]].
    Boundary and interface matrices evaluated at lam = i*p are doubled the
    same way, [[Re, -Im], [Im, Re]], each original row contributing two rows.
    """
    p = float(p)
    lam = 1j * p
    coeffs = problem.coefficients
    if isinstance(coeffs, CoefficientField):
        batch = _poly_split_batch(coeffs, p)
    else:
        batch = _lambda_split_batch(coeffs, lam)

    return ReducedSystem(
        partition=problem.partition,
        dim=2 * problem.dim,
        lam=lam,
        is_real=True,
        left_matrix=realify(problem.boundary_left(lam)),
        right_matrix=realify(problem.boundary_right(lam)),
        interfaces=tuple(
            (realify(c.d_matrix(lam)), realify(c.b_matrix(lam)))
            for c in sorted(problem.conjugations, key=lambda c: c.interface)
        ),
        bound=_reduced_bound(coeffs, lam),
        coeff_batch=batch,
    )


# ---------------------------------------------------------------------------
# coefficient evaluators
# ---------------------------------------------------------------------------


def _reduced_bound(coeffs, lam: complex) -> float:
    r = abs(lam)
    return coeffs.bound * (1.0 + r + r * r)


def _poly_batch(coeffs: CoefficientField, lam: complex):
    lam2 = lam * lam
    consts = []
    for i in range(coeffs.partition.n_intervals):
        a, b, c = coeffs.a_polys[i], coeffs.b_polys[i], coeffs.c_polys[i]
        if a.is_constant() and b.is_constant() and c.is_constant():
            consts.append(a.coeffs[0] + lam2 * b.coeffs[0] + lam * c.coeffs[0])
        else:
            consts.append(None)

    def batch(interval: int, ys: np.ndarray) -> np.ndarray:
        const = consts[interval]
        if const is not None:
            return np.broadcast_to(const, (len(ys),) + const.shape)
        return (
            coeffs.a_polys[interval](ys)
            + lam2 * coeffs.b_polys[interval](ys)
            + lam * coeffs.c_polys[interval](ys)
        ).astype(complex)

    return batch


def _poly_split_batch(coeffs: CoefficientField, p: float):
    p2 = p * p
    consts = []
    for i in range(coeffs.partition.n_intervals):
        a, b, c = coeffs.a_polys[i], coeffs.b_polys[i], coeffs.c_polys[i]
        if a.is_constant() and b.is_constant() and c.is_constant():
            consts.append(_split_blocks(a.coeffs[0], b.coeffs[0], c.coeffs[0], p))
        else:
            consts.append(None)

    def batch(interval: int, ys: np.ndarray) -> np.ndarray:
        const = consts[interval]
        if const is not None:
            return np.broadcast_to(const, (len(ys),) + const.shape)
        av = coeffs.a_polys[interval](ys)
        bv = coeffs.b_polys[interval](ys)
        cv = coeffs.c_polys[interval](ys)
        diag = av - p2 * bv
        off = p * cv
        top = np.concatenate([diag, -off], axis=2)
        bottom = np.concatenate([off, diag], axis=2)
        return np.concatenate([top, bottom], axis=1)

    return batch


def _split_blocks(a: np.ndarray, b: np.ndarray, c: np.ndarray, p: float) -> np.ndarray:
    diag = np.real(a) - p * p * np.real(b)
    off = p * np.real(c)
    return np.block([[diag, -off], [off, diag]])


def _lambda_batch(coeffs: LambdaCoefficientField, lam: complex):
    if coeffs.y_independent:
        mids = [
            0.5 * (lo + hi)
            for lo, hi in (coeffs.partition.interval(i) for i in range(coeffs.partition.n_intervals))
        ]
        consts = [
            np.asarray(ev(mids[i], lam), dtype=complex)
            for i, ev in enumerate(coeffs.evaluators)
        ]

        def batch(interval: int, ys: np.ndarray) -> np.ndarray:
            const = consts[interval]
            return np.broadcast_to(const, (len(ys),) + const.shape)

        return batch

    def batch(interval: int, ys: np.ndarray) -> np.ndarray:
        ev = coeffs.evaluators[interval]
        return np.stack([np.asarray(ev(float(y), lam), dtype=complex) for y in ys])

    return batch


def _lambda_split_batch(coeffs: LambdaCoefficientField, lam: complex):
    inner = _lambda_batch(coeffs, lam)

    def batch(interval: int, ys: np.ndarray) -> np.ndarray:
        vals = inner(interval, ys)
        re = np.real(vals)
        im = np.imag(vals)
        top = np.concatenate([re, -im], axis=2)
        bottom = np.concatenate([im, re], axis=2)
        return np.concatenate([top, bottom], axis=1)

    return batch
