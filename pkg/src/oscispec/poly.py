"""Matrices of univariate polynomials.

Used for two things: coefficient matrices polynomial in the space
coordinate, and boundary/interface matrices polynomial in the spectral
parameter.  Coefficients are stored constant-first, matching the JSON
problem format.
"""

from __future__ import annotations

import numpy as np


class PolyMatrix:
    """An (rows x cols) matrix whose entries are polynomials in one variable.

    Internally a single ndarray of shape (deg+1, rows, cols) holding the
    coefficient of x**k at index k.  Real or complex coefficients.
    """

    def __init__(self, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs)
        if coeffs.ndim != 3:
            raise ValueError("PolyMatrix expects a (deg+1, rows, cols) array")
        self.coeffs = coeffs

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, matrix) -> "PolyMatrix":
        m = np.asarray(matrix)
        return cls(m[np.newaxis, :, :].copy())

    @classmethod
    def zero(cls, rows: int, cols: int) -> "PolyMatrix":
        return cls(np.zeros((1, rows, cols)))

    @classmethod
    def from_entries(cls, entries) -> "PolyMatrix":
        """Build from a nested list: entries[i][j] is a coefficient list."""
        rows = len(entries)
        cols = len(entries[0])
        deg = 0
        is_complex = False
        for row in entries:
            if len(row) != cols:
                raise ValueError("ragged entry rows")
            for e in row:
                deg = max(deg, len(e) - 1)
                is_complex = is_complex or any(isinstance(c, complex) for c in e)
        dtype = complex if is_complex else float
        coeffs = np.zeros((deg + 1, rows, cols), dtype=dtype)
        for i, row in enumerate(entries):
            for j, e in enumerate(row):
                for k, c in enumerate(e):
                    coeffs[k, i, j] = c
        return cls(coeffs)

    # -- queries -----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape[1], self.coeffs.shape[2]

    @property
    def degree(self) -> int:
        """Largest k with a nonzero x**k coefficient (0 for the zero matrix)."""
        for k in range(self.coeffs.shape[0] - 1, -1, -1):
            if np.any(self.coeffs[k] != 0):
                return k
        return 0

    @property
    def max_abs_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def is_constant(self) -> bool:
        return self.degree == 0

    # -- evaluation --------------------------------------------------------

    def __call__(self, x):
        """Evaluate at scalar x -> (rows, cols); at array x -> (len(x), rows, cols)."""
        c = self.coeffs
        if np.isscalar(x) or np.asarray(x).ndim == 0:
            out = c[-1].astype(np.result_type(c.dtype, type(x)), copy=True)
            for k in range(c.shape[0] - 2, -1, -1):
                out *= x
                out += c[k]
            return out
        x = np.asarray(x)
        out = np.broadcast_to(
            c[-1], (len(x),) + c.shape[1:]
        ).astype(np.result_type(c.dtype, x.dtype), copy=True)
        xcol = x[:, np.newaxis, np.newaxis]
        for k in range(c.shape[0] - 2, -1, -1):
            out *= xcol
            out += c[k]
        return out

    # -- serialization helpers ----------------------------------------------

    def to_lists(self):
        """Nested lists entries[i][j] = [c0, c1, ...] trimmed to self degree."""
        d = self.degree
        rows, cols = self.shape
        return [
            [[_scalar(self.coeffs[k, i, j]) for k in range(d + 1)] for j in range(cols)]
            for i in range(rows)
        ]

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        d = max(self.coeffs.shape[0], other.coeffs.shape[0])
        a = _pad(self.coeffs, d)
        b = _pad(other.coeffs, d)
        return bool(np.array_equal(a, b))

    def __hash__(self):
        return hash((self.shape, self.degree))

    def __repr__(self):
        return f"PolyMatrix(shape={self.shape}, degree={self.degree})"


def _pad(coeffs: np.ndarray, deg_plus_one: int) -> np.ndarray:
    if coeffs.shape[0] == deg_plus_one:
        return coeffs
    out = np.zeros((deg_plus_one,) + coeffs.shape[1:], dtype=coeffs.dtype)
    out[: coeffs.shape[0]] = coeffs
    return out


def _scalar(x):
    """Native Python number for JSON output."""
    if np.iscomplexobj(x) and np.imag(x) != 0:
        raise ValueError("complex coefficients are not JSON-serializable")
    return float(np.real(x))
