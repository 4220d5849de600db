"""Characteristic determinant assembly, root finding and mode shapes.

The pipeline for one lambda: reduce the problem, build the left-boundary
null basis, integrate the normal fundamental matrix of each interval,
carry the coefficient table across each interface by a linear solve, and
close with the right boundary rows.  Eigenvalues are the zeros of the
resulting m x m determinant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import BoundaryDegeneracyError, NotARootError, PropagationError
from .integrate import FundamentalMatrix, estimate_step, integrate_fundamental
from .linalg import rref_null_basis
from .problem import (
    BoundaryOperator,
    ConjugationOperator,
    ProblemDefinition,
    ReducedSystem,
    TOL_SINGULAR,
)
from .reduction import reduce_complex, reduce_real_split

#: largest exponent fed to exp() when undoing the log-scale normalization
_EXP_CLAMP = 700.0


@dataclass(frozen=True)
class Bracket:
    """A candidate root location from a real-frequency scan."""

    p_lo: float
    p_hi: float
    kind: str  # "sign_change" or "minimum"
    p_seed: float


@dataclass(frozen=True)
class ModeShape:
    """Sampled eigenfunction, normalized to unit max-abs.

    Interface breakpoints appear twice in ys (left and right traces differ
    in the non-continuous components).  values has one row per sample and
    one column per state component; complex on the complex path, real of
    doubled dimension on the real-split path.
    """

    lam: complex
    ys: np.ndarray
    values: np.ndarray
    normalization: complex
    interval_slices: tuple[slice, ...]


@dataclass(frozen=True)
class SpectralResult:
    """One refined eigenvalue candidate."""

    lam: complex
    residual: float
    iterations: int
    converged: bool
    message: str = ""
    mode: ModeShape | None = None


@dataclass
class SolveOptions:
    """Configuration for a spectrum solve."""

    scan: tuple[float, float, int] | None = None
    rect: tuple[float, float, float, float, int, int] | None = None
    step: float | None = None
    target_error: float = 1e-10
    tol: float = 1e-10
    max_iter: int = 100
    path: str = "complex"


# ---------------------------------------------------------------------------
# coefficient tables
# ---------------------------------------------------------------------------


def initial_coefficients(left_boundary: BoundaryOperator, lam: complex) -> np.ndarray:
    """Null-space basis (N x m) of the left boundary matrix at lambda.

    For the canonical selection form (row r picks component r) this is
    exactly the complementary 0/1 pattern.  Raises BoundaryDegeneracyError
    if the matrix is rank deficient at lambda.
    """
    matrix = np.asarray(left_boundary(lam), dtype=complex)
    return _null_basis_checked(matrix, lam)


def _null_basis_checked(matrix: np.ndarray, lam: complex) -> np.ndarray:
    rows = matrix.shape[0]
    rank, basis = rref_null_basis(matrix)
    if rank != rows:
        raise BoundaryDegeneracyError(lam, rank, rows)
    return basis


def propagate(
    u: np.ndarray,
    fundamental: FundamentalMatrix | np.ndarray,
    conj: ConjugationOperator,
    lam: complex,
) -> np.ndarray:
    """Carry the coefficient table across one interface.

    Computes the end values W = G^T U of the propagated solutions, then
    solves B(lam) U_next = D(lam) W columnwise.  Equivalent to the
    determinant-ratio recurrence but via LU factorization.
    """
    g = fundamental.end_matrix if isinstance(fundamental, FundamentalMatrix) else fundamental
    dmat = np.asarray(conj.d_matrix(lam))
    bmat = np.asarray(conj.b_matrix(lam))
    return _interface_solve(u, g, dmat, bmat, conj.interface, lam)


def _interface_solve(u, g, dmat, bmat, interface: int, lam: complex) -> np.ndarray:
    w = g.T @ u
    scale = float(np.max(np.abs(bmat)))
    if scale == 0.0 or abs(np.linalg.det(bmat)) <= TOL_SINGULAR * scale ** bmat.shape[0]:
        raise PropagationError(interface, lam, "det below singularity tolerance")
    try:
        return np.linalg.solve(bmat, dmat @ w)
    except np.linalg.LinAlgError as exc:
        raise PropagationError(interface, lam, str(exc)) from None


# ---------------------------------------------------------------------------
# determinant assembly
# ---------------------------------------------------------------------------


def _reduce(problem: ProblemDefinition, lam: complex, path: str) -> ReducedSystem:
    if path == "complex":
        return reduce_complex(problem, lam)
    if path == "real_split":
        if abs(lam.real) > 1e-12 * max(1.0, abs(lam)):
            raise ValueError("real_split path is defined on the imaginary axis only")
        return reduce_real_split(problem, lam.imag)
    raise ValueError(f"unknown path {path!r}")


def _assemble(reduced: ReducedSystem, step: float, keep_samples: bool):
    """Run the full propagation at a bound lambda.

    Returns (u_tables, fundamentals, end_values, closure) where end_values
    W = G^T U are the last interval's propagated end values and closure is
    the m x m matrix whose determinant vanishes at eigenvalues.
    """
    u = _null_basis_checked(reduced.left_matrix, reduced.lam)
    u_tables = [u]
    fundamentals: list[FundamentalMatrix] = []
    n = reduced.partition.n_intervals
    w = None
    for i in range(n):
        fm = integrate_fundamental(reduced, i, step, keep_samples=keep_samples)
        fundamentals.append(fm)
        w = fm.end_matrix.T @ u
        if i < n - 1:
            dmat, bmat = reduced.interfaces[i]
            u = _interface_solve(u, fm.end_matrix, dmat, bmat, i + 1, reduced.lam)
            u_tables.append(u)
    closure = reduced.right_matrix @ w
    return u_tables, fundamentals, w, closure


def _normalized_det(closure: np.ndarray, end_values: np.ndarray) -> complex:
    """det(closure) divided by the product of the m largest row maxima of W.

    The raw determinant grows or decays exponentially with frequency and
    domain length through the fundamental solutions; dividing by the
    dominant row scales of the propagated end values keeps it O(1) without
    moving its zeros.
    """
    m = closure.shape[0]
    row_max = np.max(np.abs(end_values), axis=1)
    top = np.sort(row_max)[-m:]
    if np.any(top == 0.0):
        return 0j
    sign, logdet = np.linalg.slogdet(closure)
    if sign == 0:
        return 0j
    exponent = logdet - float(np.sum(np.log(top)))
    return complex(sign) * float(np.exp(min(exponent, _EXP_CLAMP)))


def characteristic_determinant(
    problem: ProblemDefinition,
    lam: complex,
    step: float,
    path: str = "complex",
) -> complex:
    """Scale-stabilized characteristic determinant D(lambda)."""
    reduced = _reduce(problem, complex(lam), path)
    _, _, w, closure = _assemble(reduced, step, keep_samples=False)
    return _normalized_det(closure, w)


# ---------------------------------------------------------------------------
# root location
# ---------------------------------------------------------------------------


def scan_real_axis(
    problem: ProblemDefinition,
    p_min: float,
    p_max: float,
    n_grid: int,
    step: float,
    path: str = "complex",
    minimum_ratio: float = 0.05,
) -> list[Bracket]:
    """Locate root candidates of D(i p) on a uniform frequency grid.

    Returns sign-change intervals of Re D, plus local minima of |D| below
    minimum_ratio times the grid median as candidate (double) roots.  Grids
    too coarse to separate neighboring roots merge their brackets.
    """
    if not (p_min < p_max):
        raise ValueError("need p_min < p_max")
    if n_grid < 2:
        raise ValueError("need n_grid >= 2")
    ps = np.linspace(p_min, p_max, n_grid)
    dvals = np.array(
        [characteristic_determinant(problem, 1j * p, step, path) for p in ps]
    )
    f = dvals.real
    mag = np.abs(dvals)

    brackets: list[Bracket] = []
    flagged = np.zeros(n_grid, dtype=bool)
    for i in range(n_grid - 1):
        if f[i] * f[i + 1] < 0.0:
            brackets.append(
                Bracket(ps[i], ps[i + 1], "sign_change", 0.5 * (ps[i] + ps[i + 1]))
            )
            flagged[i] = flagged[i + 1] = True

    threshold = minimum_ratio * float(np.median(mag))
    for i in range(1, n_grid - 1):
        if flagged[i - 1] or flagged[i] or flagged[i + 1]:
            continue
        if mag[i] < threshold and mag[i] <= mag[i - 1] and mag[i] <= mag[i + 1]:
            brackets.append(Bracket(ps[i - 1], ps[i + 1], "minimum", ps[i]))

    brackets.sort(key=lambda b: b.p_seed)
    return brackets


def refine_root(
    problem: ProblemDefinition,
    target: Bracket | complex,
    tol: float = 1e-10,
    max_iter: int = 100,
    step: float = 1e-3,
    path: str = "complex",
) -> SpectralResult:
    """Polish one root candidate.

    Sign-change brackets are bisected to width tol along the imaginary
    axis; if the residual at the bisection limit is not genuinely small the
    point is rehanded to Newton (a sign change of Re D alone need not be a
    root when D is complex).  Seeds are refined by damped Newton with a
    central finite-difference derivative; on the real-split path the search
    stays on the frequency axis, where roots touch zero quadratically, and
    finishes with a parabolic vertex polish.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    def dfun(lam: complex) -> complex:
        return characteristic_determinant(problem, lam, step, path)

    if isinstance(target, Bracket):
        if target.kind == "sign_change":
            return _bisect_bracket(dfun, target, tol, max_iter, path)
        seed = 1j * target.p_seed
    else:
        seed = complex(target)
    return _newton(dfun, seed, tol, max_iter, path)


def _bisect_bracket(dfun, bracket: Bracket, tol, max_iter, path) -> SpectralResult:
    lo, hi = bracket.p_lo, bracket.p_hi
    d_lo = dfun(1j * lo)
    d_hi = dfun(1j * hi)
    f_lo, f_hi = d_lo.real, d_hi.real
    iters = 0
    if f_lo * f_hi > 0:
        return _newton(dfun, 1j * bracket.p_seed, tol, max_iter, path)
    d_mid = d_lo
    mid = lo
    while hi - lo > tol and iters < max_iter:
        mid = 0.5 * (lo + hi)
        d_mid = dfun(1j * mid)
        iters += 1
        if d_mid.real == 0.0:
            break
        if f_lo * d_mid.real < 0:
            hi = mid
        else:
            lo, f_lo = mid, d_mid.real
    residual = abs(d_mid)
    endpoint_scale = max(abs(d_lo), abs(d_hi))
    if residual <= 1e-4 * endpoint_scale:
        return SpectralResult(1j * mid, residual, iters, converged=True)
    # Re D crossed zero without |D| vanishing: not a root on the axis, so
    # hand the midpoint to Newton in the complex plane.
    newton = _newton(dfun, 1j * mid, tol, max_iter, path)
    return SpectralResult(
        newton.lam,
        newton.residual,
        iters + newton.iterations,
        newton.converged,
        newton.message,
    )


def _fd_delta(lam: complex) -> float:
    # relative 1e-6 perturbation, floored so seeds near the origin still
    # get a usable central difference
    return 1e-6 * max(abs(lam), 1.0)


def _newton(dfun, seed: complex, tol, max_iter, path) -> SpectralResult:
    on_axis = path == "real_split"
    lam = 1j * seed.imag if on_axis else seed
    d = dfun(lam)
    d0 = max(abs(d), np.finfo(float).tiny)
    best_lam, best_res = lam, abs(d)
    iters = 0
    converged = False
    message = ""
    for _ in range(max_iter):
        if abs(d) <= tol * d0:
            converged = True
            break
        iters += 1
        delta = _fd_delta(lam)
        if on_axis:
            dp = (dfun(lam + 1j * delta) - dfun(lam - 1j * delta)).real / (2 * delta)
            dcur = d.real
        else:
            dp = (dfun(lam + delta) - dfun(lam - delta)) / (2 * delta)
            dcur = d
        if dp == 0:
            message = "derivative vanished"
            break
        s = -dcur / dp
        if on_axis:
            s = complex(0, s.real if isinstance(s, complex) else s)
        # damp: halve the step while it increases |D|
        for _ in range(25):
            cand = lam + s
            d_cand = dfun(cand)
            if abs(d_cand) <= abs(d) or abs(s) < tol:
                break
            s *= 0.5
        lam, d = cand, d_cand
        if abs(d) < best_res:
            best_lam, best_res = lam, abs(d)
        if abs(s) < tol:
            converged = True
            break
    else:
        message = "max_iter exceeded; suspected multiple root"

    if on_axis:
        vert_lam, vert_res, extra = _vertex_polish(dfun, best_lam, best_res, tol)
        iters += extra
        if vert_res <= best_res:
            best_lam, best_res = vert_lam, vert_res
        converged = converged or best_res <= tol * d0 or best_res <= 1e-10 * d0
        return SpectralResult(best_lam, best_res, iters, converged, message)

    if not converged and best_res <= tol * d0:
        converged = True
    return SpectralResult(best_lam, best_res, iters, converged, message)


def _vertex_polish(dfun, lam: complex, res: float, tol: float):
    """Parabolic vertex steps for quadratic (touching) zeros of D(i p).

    On the real-split path the determinant is the squared modulus of the
    complex-path determinant up to a smooth positive factor, so roots are
    quadratic minima; the vertex of a three-point parabola nails them.  A
    wide probe keeps the vertex insensitive to evaluation noise; narrower
    recentered passes remove the residual bias.
    """
    p0 = lam.imag
    scale = max(abs(p0), 1.0)
    p = p0
    passes = 0
    # Shrinking probes: the wide pass is noise-immune, the narrow passes
    # remove the O(delta^2) bias from the smooth factor's slope.
    for delta in (1e-4 * scale, 1e-5 * scale, 1e-6 * scale):
        dm = dfun(1j * (p - delta)).real
        d0 = dfun(1j * p).real
        dp = dfun(1j * (p + delta)).real
        passes += 1
        curvature = dm - 2.0 * d0 + dp
        if curvature == 0.0:
            continue
        step_p = -delta * (dp - dm) / (2.0 * curvature)
        if abs(step_p) > 10.0 * delta:  # fit not trustworthy this far out
            step_p = np.sign(step_p) * 10.0 * delta
        p = p + step_p
    res_new = abs(dfun(1j * p))
    if res_new <= 10.0 * res or res_new <= tol:
        return 1j * p, res_new, passes
    return lam, res, passes


# ---------------------------------------------------------------------------
# mode shapes
# ---------------------------------------------------------------------------


def mode_shape(
    problem: ProblemDefinition,
    lam: complex,
    step: float,
    path: str = "complex",
    rank_tol: float = 1e-6,
) -> ModeShape:
    """Reconstruct the eigenfunction at a converged root.

    The free-constant vector is the near-null direction of the closure
    matrix (two inverse-iteration sweeps on M^H M from e1); each interval's
    solution is the corresponding combination of its fundamental solutions
    on the stored integration grid.  Raises NotARootError when the closure
    matrix is numerically full rank.
    """
    reduced = _reduce(problem, complex(lam), path)
    u_tables, fundamentals, w, closure = _assemble(reduced, step, keep_samples=True)

    c_free = _null_vector(closure, w, complex(lam), rank_tol)

    ys_parts = []
    val_parts = []
    slices = []
    offset = 0
    for u, fm in zip(u_tables, fundamentals):
        coeff = u @ c_free
        vals = np.tensordot(fm.samples, coeff, axes=([1], [0]))
        ys_parts.append(fm.sample_ys)
        val_parts.append(vals)
        slices.append(slice(offset, offset + len(fm.sample_ys)))
        offset += len(fm.sample_ys)

    ys = np.concatenate(ys_parts)
    values = np.concatenate(val_parts, axis=0)
    flat_idx = int(np.argmax(np.abs(values)))
    scale = values.reshape(-1)[flat_idx]
    values = values / scale

    return ModeShape(
        lam=complex(lam),
        ys=ys,
        values=values,
        normalization=complex(scale),
        interval_slices=tuple(slices),
    )


def _null_vector(closure: np.ndarray, end_values: np.ndarray, lam: complex, rank_tol: float) -> np.ndarray:
    svals = np.linalg.svd(closure, compute_uv=False)
    smin, smax = float(svals[-1]), float(svals[0])
    if abs(_normalized_det(closure, end_values)) > rank_tol:
        raise NotARootError(lam, smin)
    m = closure.shape[0]
    if m == 1:
        return np.ones(1, dtype=closure.dtype)
    gram = closure.conj().T @ closure
    v = np.zeros(m, dtype=closure.dtype)
    v[0] = 1.0
    try:
        for _ in range(2):
            v = np.linalg.solve(gram, v)
            v = v / np.linalg.norm(v)
    except np.linalg.LinAlgError:
        v = np.zeros(0)
    if v.size == 0 or np.linalg.norm(closure @ v) > rank_tol * max(smax, 1.0):
        # start vector orthogonal to the null direction, or gram exactly
        # singular: fall back to the smallest right singular vector
        _, _, vh = np.linalg.svd(closure)
        v = vh[-1].conj()
    return v


# ---------------------------------------------------------------------------
# end-to-end solve
# ---------------------------------------------------------------------------


def solve_spectrum(problem: ProblemDefinition, options: SolveOptions) -> list[SpectralResult]:
    """Scan, refine, deduplicate and sort the spectrum of a problem.

    Returns converged roots only, with Im >= 0 (conjugate pairs reported
    once), sorted by |Im| then Re.  An empty list is a valid answer.
    """
    step = resolve_step(problem, options)
    results: list[SpectralResult] = []

    if options.scan is not None:
        p_min, p_max, n_grid = options.scan
        brackets = scan_real_axis(problem, p_min, p_max, n_grid, step, options.path)
        for bracket in brackets:
            results.append(
                refine_root(problem, bracket, options.tol, options.max_iter, step, options.path)
            )

    if options.rect is not None:
        re0, re1, im0, im1, nr, ni = options.rect
        for re in np.linspace(re0, re1, int(nr)):
            for im in np.linspace(im0, im1, int(ni)):
                results.append(
                    refine_root(
                        problem,
                        complex(re, im),
                        options.tol,
                        options.max_iter,
                        step,
                        options.path,
                    )
                )

    accepted = [r for r in results if r.converged]
    return _dedupe(accepted, options.tol)


def resolve_step(problem: ProblemDefinition, options: SolveOptions) -> float:
    """The integration step a solve with these options will use.

    An explicit step wins; otherwise one conservative step is derived from
    the target error at the largest |lambda| the search can probe, so every
    determinant evaluation of the run shares the same grid.
    """
    if options.step is not None:
        if options.step <= 0:
            raise ValueError("step must be positive")
        return options.step
    probes = [0.0]
    if options.scan is not None:
        probes.append(abs(options.scan[0]))
        probes.append(abs(options.scan[1]))
    if options.rect is not None:
        re0, re1, im0, im1, _, _ = options.rect
        probes.append(max(abs(re0), abs(re1)) + max(abs(im0), abs(im1)))
    lam_scale = max(probes)
    reduced = _reduce(problem, 1j * lam_scale, "complex")
    return estimate_step(reduced, options.target_error)


def _dedupe(results: Iterable[SpectralResult], tol: float) -> list[SpectralResult]:
    canonical: list[SpectralResult] = []
    for r in results:
        lam = r.lam
        if lam.imag < 0:
            lam = lam.conjugate()
        canonical.append(
            SpectralResult(lam, r.residual, r.iterations, r.converged, r.message, r.mode)
        )
    canonical.sort(key=lambda r: (abs(r.lam.imag), r.lam.real, r.residual))
    kept: list[SpectralResult] = []
    for r in canonical:
        atol = max(1e3 * tol, 1e-7) + 1e-7 * abs(r.lam)
        dup = None
        for i, k in enumerate(kept):
            if abs(k.lam - r.lam) <= atol:
                dup = i
                break
        if dup is None:
            kept.append(r)
        elif r.residual < kept[dup].residual:
            kept[dup] = r
    kept.sort(key=lambda r: (abs(r.lam.imag), r.lam.real))
    return kept
