"""Independent verification engines.

Two routes that share no code with the solve path: closed-form
characteristic functions for textbook string configurations, and a global
finite-difference discretization of the scalar second-order model solved as
a dense polynomial eigenvalue problem.  Test and verification use only;
variable-in-y coefficients are not supported here (the main solver supports
them).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

#: hard cap on the linearized dense eigenproblem dimension
_DIM_CAP = 6000

#: eigenvalues with modulus above this are companion-pencil artifacts
_SPURIOUS_CUTOFF = 1e8


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def closed_form_determinant(
    model_tag: str,
    p: float,
    rho: float = 1.0,
    tension: float = 1.0,
    length: float = 1.0,
    mass: float = 1.0,
    position: float = 0.5,
) -> float:
    """Textbook characteristic function whose zeros are the eigenfrequencies.

    fixed_fixed_string -> sin(k l); fixed_free_string -> cos(k l);
    point_mass_string (pinned-pinned, one mass) ->
    mass * p^2 sin(k c) sin(k (l-c)) - tension * k sin(k l), with k = p/a and
    a the wave speed.
    """
    a = math.sqrt(tension / rho)
    k = p / a
    if model_tag == "fixed_fixed_string":
        return math.sin(k * length)
    if model_tag == "fixed_free_string":
        return math.cos(k * length)
    if model_tag == "point_mass_string":
        c = position
        return mass * p * p * math.sin(k * c) * math.sin(k * (length - c)) - (
            tension * k * math.sin(k * length)
        )
    raise ValueError(f"unknown closed-form tag {model_tag!r}")


def closed_form_roots(
    model_tag: str,
    p_min: float,
    p_max: float,
    n_grid: int = 4000,
    xtol: float = 1e-13,
    **params,
) -> list[float]:
    """Brute-force bisection roots of a closed-form characteristic function."""
    ps = np.linspace(p_min, p_max, n_grid)
    vals = [closed_form_determinant(model_tag, p, **params) for p in ps]
    roots = []
    for i in range(n_grid - 1):
        lo, hi = ps[i], ps[i + 1]
        f_lo, f_hi = vals[i], vals[i + 1]
        if f_lo == 0.0:
            roots.append(float(lo))
            continue
        if f_lo * f_hi >= 0.0:
            continue
        while hi - lo > xtol:
            mid = 0.5 * (lo + hi)
            f_mid = closed_form_determinant(model_tag, mid, **params)
            if f_mid == 0.0:
                lo = hi = mid
            elif f_lo * f_mid < 0:
                hi = mid
            else:
                lo, f_lo = mid, f_mid
        roots.append(0.5 * (lo + hi))
    return roots


# ---------------------------------------------------------------------------
# finite-difference polynomial eigenvalue oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarWaveForm:
    """Constant-coefficient scalar model a_tt u_tt = a_xx u_xx + a_xxt u_xxt.

    Boundary rows are pairs of lambda-polynomial coefficient tuples
    (poly_u, poly_ux) acting on (u, u_x) at the end; interface rows act on
    (u_left, u_x_left, u_right, u_x_right), two rows per interface.  This is
    the description the FD oracle discretizes; builders attach it to their
    problems as the oracle route.
    """

    breakpoints: tuple[float, ...]
    mass: tuple[float, ...]
    stiffness: tuple[float, ...]
    damping: tuple[float, ...]
    left_row: tuple[tuple[float, ...], tuple[float, ...]]
    right_row: tuple[tuple[float, ...], tuple[float, ...]]
    interface_rows: tuple[
        tuple[tuple[tuple[float, ...], ...], tuple[tuple[float, ...], ...]], ...
    ] = ()


@dataclass(frozen=True)
class FDOracleConfig:
    """Grid size for the finite-difference route (central second differences,
    one-sided second-order end stencils)."""

    n_fd: int = 400

    def __post_init__(self):
        if self.n_fd < 50:
            raise ValueError("n_fd must be at least 50")


def fd_polynomial_eigenvalues(problem, config: FDOracleConfig = FDOracleConfig()):
    """Eigenvalues of the globally discretized second-order problem.

    Central second differences for u_xx on roughly n_fd cells across the
    domain; boundary and interface u_x terms use one-sided second-order
    stencils.  The resulting matrix polynomial in lambda (degree 2, or 3
    when a boundary row carries third time derivatives) is linearized to a
    generalized eigenvalue problem and solved densely.  Returns finite
    eigenvalues sorted by |Im|.

    The problem must carry a ScalarWaveForm (built-in models do); JSON
    problems have no oracle route.
    """
    form = getattr(problem, "scalar_form", None) or problem
    if not isinstance(form, ScalarWaveForm):
        raise ValueError("problem has no scalar second-order form; no oracle route")

    bps = form.breakpoints
    n_int = len(bps) - 1
    total = bps[-1] - bps[0]
    cells = [max(8, round(config.n_fd * (bps[i + 1] - bps[i]) / total)) for i in range(n_int)]
    offsets = []
    n_unknowns = 0
    for k in cells:
        offsets.append(n_unknowns)
        n_unknowns += k + 1

    max_deg = max(
        2,
        *(len(p) - 1 for p in form.left_row),
        *(len(p) - 1 for p in form.right_row),
        *(
            len(p) - 1
            for rows in form.interface_rows
            for row in rows
            for p in row
        ),
    ) if form.interface_rows else max(2, *(len(p) - 1 for p in form.left_row + form.right_row))

    if (max_deg * n_unknowns) > _DIM_CAP:
        raise ValueError(
            f"linearized dimension {max_deg * n_unknowns} exceeds cap {_DIM_CAP}"
        )

    mats = [np.zeros((n_unknowns, n_unknowns)) for _ in range(max_deg + 1)]
    row = 0

    # interior equations: mass lam^2 u = (stiffness + lam damping) u_xx
    for i in range(n_int):
        h = (bps[i + 1] - bps[i]) / cells[i]
        off = offsets[i]
        w = 1.0 / (h * h)
        for j in range(1, cells[i]):
            g = off + j
            mats[2][row, g] += form.mass[i]
            for dj, s in ((-1, 1.0), (0, -2.0), (1, 1.0)):
                mats[0][row, g + dj] -= form.stiffness[i] * s * w
                mats[1][row, g + dj] -= form.damping[i] * s * w
            row += 1

    # boundary rows with one-sided second-order u_x stencils
    h0 = (bps[1] - bps[0]) / cells[0]
    _add_trace_row(mats, row, form.left_row, offsets[0], h0, forward=True)
    row += 1
    hl = (bps[-1] - bps[-2]) / cells[-1]
    _add_trace_row(
        mats, row, form.right_row, offsets[-1] + cells[-1], hl, forward=False
    )
    row += 1

    # interface rows
    for i, rows in enumerate(form.interface_rows):
        h_left = (bps[i + 1] - bps[i]) / cells[i]
        h_right = (bps[i + 2] - bps[i + 1]) / cells[i + 1]
        left_node = offsets[i] + cells[i]
        right_node = offsets[i + 1]
        for row_polys in rows:
            pu_m, pux_m, pu_p, pux_p = row_polys
            _add_trace_row(mats, row, (pu_m, pux_m), left_node, h_left, forward=False)
            _add_trace_row(mats, row, (pu_p, pux_p), right_node, h_right, forward=True)
            row += 1

    assert row == n_unknowns

    while max_deg > 0 and not np.any(mats[max_deg]):
        mats.pop()
        max_deg -= 1

    eigs = _polyeig(mats)
    eigs = eigs[np.isfinite(eigs)]
    eigs = eigs[np.abs(eigs) < _SPURIOUS_CUTOFF]
    return eigs[np.argsort(np.abs(eigs.imag), kind="stable")]


def _add_trace_row(mats, row: int, polys, node: int, h: float, forward: bool):
    """Accumulate poly_u(lam) u + poly_ux(lam) u_x at an interval end node."""
    pu, pux = polys
    for deg, c in enumerate(pu):
        if c:
            mats[deg][row, node] += c
    if forward:
        stencil = ((0, -3.0), (1, 4.0), (2, -1.0))
    else:
        stencil = ((0, 3.0), (-1, -4.0), (-2, 1.0))
    for deg, c in enumerate(pux):
        if c:
            for dj, s in stencil:
                mats[deg][row, node + dj] += c * s / (2.0 * h)


def _polyeig(mats: list[np.ndarray]) -> np.ndarray:
    """Eigenvalues of sum_k lam^k mats[k] via companion linearization."""
    deg = len(mats) - 1
    n = mats[0].shape[0]
    if deg == 1:
        return scipy.linalg.eigvals(-mats[0], mats[1])
    size = deg * n
    big_a = np.zeros((size, size))
    big_b = np.eye(size)
    for blk in range(deg - 1):
        big_a[blk * n : (blk + 1) * n, (blk + 1) * n : (blk + 2) * n] = np.eye(n)
    for k in range(deg):
        big_a[(deg - 1) * n :, k * n : (k + 1) * n] = -mats[k]
    big_b[(deg - 1) * n :, (deg - 1) * n :] = mats[deg]
    return scipy.linalg.eigvals(big_a, big_b)


def leading_frequencies(eigs: np.ndarray, count: int, im_min: float = 1e-6) -> np.ndarray:
    """First count eigenvalues with Im above im_min, ordered by Im."""
    sel = eigs[eigs.imag > im_min]
    sel = sel[np.argsort(sel.imag, kind="stable")]
    return sel[:count]
