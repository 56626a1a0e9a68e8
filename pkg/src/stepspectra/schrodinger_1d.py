"""Transfer-matrix oracle for piecewise-constant complex potentials on the line.

The global secular function imposes a decaying wave e^{-i*chi*x} left of all
supports, propagates (psi, psi') across the pieces by closed-form 2x2
matrices, and reads off the coefficient of the non-decaying exterior solution
on the right, normalized so the free potential gives identically 1.  Zeros in
{Im sqrt(E) > 0} are exactly the eigenvalues.

Propagating through long gaps loses the subdominant component at a known
exponential rate, so evaluations whose decimal-digit budget exceeds float64
are transparently rerun in mpmath at a precision chosen from the geometry.
"""

from __future__ import annotations

import cmath
import json
import math
import threading
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import SchemaError
from .special_functions import sqrt_upper

_MP_LOCK = threading.Lock()  # mpmath precision state is global
_FLOAT64_DIGIT_BUDGET = 10.0
_trapz = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class TransferMatrix:
    """Maps (psi, psi') at one point to (psi, psi') at another; det = 1."""

    m11: complex
    m12: complex
    m21: complex
    m22: complex

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def apply(self, psi: complex, dpsi: complex) -> tuple[complex, complex]:
        return (self.m11 * psi + self.m12 * dpsi, self.m21 * psi + self.m22 * dpsi)

    @staticmethod
    def identity() -> "TransferMatrix":
        return TransferMatrix(1.0 + 0j, 0j, 0j, 1.0 + 0j)


class PiecewisePotential:
    """Sorted disjoint intervals with complex values; zero elsewhere."""

    def __init__(self, pieces):
        cleaned = []
        for idx, piece in enumerate(pieces):
            a, b, v = piece
            a, b, v = float(a), float(b), complex(v)
            if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
                raise SchemaError(f"piece {idx}: need finite a < b, got ({a}, {b})", index=idx)
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise SchemaError(f"piece {idx}: non-finite value {v!r}", index=idx)
            cleaned.append((a, b, v))
        for idx in range(1, len(cleaned)):
            if cleaned[idx][0] < cleaned[idx - 1][1]:
                raise SchemaError(
                    f"piece {idx} overlaps or is out of order with piece {idx - 1}",
                    index=idx,
                )
        self.pieces = tuple(cleaned)

    def __len__(self) -> int:
        return len(self.pieces)

    def __eq__(self, other) -> bool:
        return isinstance(other, PiecewisePotential) and self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    def __repr__(self) -> str:
        return f"PiecewisePotential({list(self.pieces)!r})"

    @classmethod
    def from_bumps(cls, bumps) -> "PiecewisePotential":
        pieces = []
        for bump in sorted(bumps, key=lambda s: s.center):
            lo, hi = bump.support
            pieces.append((lo, hi, bump.v0))
        return cls(pieces)

    def value_at(self, x: float) -> complex:
        for a, b, v in self.pieces:
            if a <= x <= b:
                return v
        return 0j

    def truncated(self, n: int) -> "PiecewisePotential":
        """Prefix truncation keeping the first n pieces."""
        return PiecewisePotential(self.pieces[:n])

    @property
    def support_hull(self):
        if not self.pieces:
            return None
        return (self.pieces[0][0], self.pieces[-1][1])

    # -- JSON schema: {"pieces":[{"a":..,"b":..,"re":..,"im":..},...]} --------

    def to_dict(self) -> dict:
        return {
            "pieces": [
                {"a": a, "b": b, "re": v.real, "im": v.imag} for a, b, v in self.pieces
            ]
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data) -> "PiecewisePotential":
        if not isinstance(data, dict) or "pieces" not in data:
            raise SchemaError('potential JSON must be an object with a "pieces" array')
        raw = data["pieces"]
        if not isinstance(raw, list):
            raise SchemaError('"pieces" must be an array')
        pieces = []
        for idx, entry in enumerate(raw):
            if not isinstance(entry, dict):
                raise SchemaError(f"piece {idx}: expected an object", index=idx)
            missing = [k for k in ("a", "b", "re", "im") if k not in entry]
            if missing:
                raise SchemaError(f"piece {idx}: missing keys {missing}", index=idx)
            try:
                a = float(entry["a"])
                b = float(entry["b"])
                v = complex(float(entry["re"]), float(entry["im"]))
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"piece {idx}: non-numeric field ({exc})", index=idx)
            pieces.append((a, b, v))
        for idx in range(1, len(pieces)):
            if pieces[idx][0] < pieces[idx - 1][1]:
                raise SchemaError(
                    f"piece {idx}: intervals must be strictly increasing", index=idx
                )
        return cls(pieces)

    @classmethod
    def from_json(cls, text: str) -> "PiecewisePotential":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}")
        return cls.from_dict(data)


def _breakpoints(pot: PiecewisePotential, x_from: float, x_to: float):
    """Constant-value subintervals partitioning [x_from, x_to]."""
    cuts = {x_from, x_to}
    for a, b, _ in pot.pieces:
        for point in (a, b):
            if x_from < point < x_to:
                cuts.add(point)
    xs = sorted(cuts)
    out = []
    for left, right in zip(xs[:-1], xs[1:]):
        mid = 0.5 * (left + right)
        out.append((left, right, pot.value_at(mid)))
    return out


def _piece_matrix(k2: complex, width: float) -> TransferMatrix:
    w = cmath.sqrt(k2) * width
    if abs(w) < 1e-8:
        sinc = 1.0 - w * w / 6.0
    else:
        sinc = cmath.sin(w) / w
    c = cmath.cos(w)
    return TransferMatrix(c, width * sinc, -k2 * width * sinc, c)


def _piece_matrix_mp(k2, width):
    w = mpmath.sqrt(k2) * width
    if abs(w) < mpmath.mpf("1e-12"):
        sinc = 1 - w * w / 6
    else:
        sinc = mpmath.sin(w) / w
    c = mpmath.cos(w)
    return (c, width * sinc, -k2 * width * sinc, c)


def transfer_matrix(pot: PiecewisePotential, E: complex, x_from: float, x_to: float) -> TransferMatrix:
    """Propagator of (psi, psi') from ``x_from`` to ``x_to`` at energy ``E``."""
    if not x_from < x_to:
        raise ValueError(f"need x_from < x_to, got ({x_from}, {x_to})")
    E = complex(E)
    m = TransferMatrix.identity()
    for left, right, v in _breakpoints(pot, x_from, x_to):
        m = _piece_matrix(E - v, right - left) @ m
    return m


def digit_budget(pot: PiecewisePotential, E: complex) -> float:
    """Decimal digits lost to dominant/subdominant splitting in the worst case.

    Contamination injected at a piece's right edge grows at most like
    e^{2*rate*(x_R - b_j)}; the first piece's edge bounds all of them.
    """
    hull = pot.support_hull
    if hull is None or len(pot.pieces) <= 1:
        return 0.0
    chi = sqrt_upper(complex(E))
    rate = chi.imag
    for a, b, v in pot.pieces:
        rate = max(rate, abs(cmath.sqrt(complex(E) - v).imag))
    reach = hull[1] - pot.pieces[0][1]
    return 2.0 * rate * reach / math.log(10.0)


def _global_secular_f64(pot: PiecewisePotential, E: complex) -> complex:
    chi = sqrt_upper(E)
    x_left, x_right = pot.support_hull
    psi, dpsi = 1.0 + 0j, -1j * chi
    m = transfer_matrix(pot, E, x_left, x_right)
    psi_r, dpsi_r = m.apply(psi, dpsi)
    b_coeff = (1j * chi * psi_r - dpsi_r) / (2j * chi)
    return b_coeff * cmath.exp(1j * chi * (x_right - x_left))


def _global_secular_mp(pot: PiecewisePotential, E: complex, dps: int) -> complex:
    with _MP_LOCK:
        old = mpmath.mp.dps
        mpmath.mp.dps = dps
        try:
            Em = mpmath.mpc(E)
            chi = mpmath.sqrt(Em)
            if mpmath.im(chi) < 0:
                chi = -chi
            x_left, x_right = pot.support_hull
            psi, dpsi = mpmath.mpc(1), -1j * chi
            for left, right, v in _breakpoints(pot, x_left, x_right):
                m11, m12, m21, m22 = _piece_matrix_mp(Em - mpmath.mpc(v), mpmath.mpf(right - left))
                psi, dpsi = m11 * psi + m12 * dpsi, m21 * psi + m22 * dpsi
            b_coeff = (1j * chi * psi - dpsi) / (2j * chi)
            value = b_coeff * mpmath.exp(1j * chi * mpmath.mpf(x_right - x_left))
            return complex(value)
        finally:
            mpmath.mp.dps = old


def global_secular(pot: PiecewisePotential, E: complex, dps: int | None = None) -> complex:
    """Coefficient of the non-decaying right exterior wave, free-normalized to 1.

    Analytic in E on the cut plane; zeros (with multiplicity) are the
    eigenvalues.  ``dps=None`` selects float64 or mpmath automatically from
    the decay budget of the geometry; pass an integer to force a precision.
    """
    E = complex(E)
    if not pot.pieces:
        return 1.0 + 0j
    if dps is None:
        budget = digit_budget(pot, E)
        if budget <= _FLOAT64_DIGIT_BUDGET:
            return _global_secular_f64(pot, E)
        dps = 26 + int(math.ceil(budget))
    return _global_secular_mp(pot, E, dps)


def make_secular_handle(pot: PiecewisePotential):
    """E -> global_secular(pot, E); a pure, thread-safe function handle."""

    def handle(E: complex) -> complex:
        return global_secular(pot, E)

    return handle


# ---------------------------------------------------------------------------
# Eigenfunction reconstruction
# ---------------------------------------------------------------------------

def reconstruct_eigenfunction(
    pot: PiecewisePotential,
    E: complex,
    grid,
    tol: float = 1e-6,
):
    """Solution decaying to the left, evaluated on ``grid``, normalized on it.

    Requires |global_secular(pot, E)| < tol, so E must be an eigenvalue (or a
    deliberate quasi-eigenvalue with a loosened tolerance).  The returned
    array has unit discrete L2 norm on the grid.
    """
    E = complex(E)
    fval = abs(global_secular(pot, E))
    if fval >= tol:
        raise ValueError(
            f"E = {E!r} is not an eigenvalue at tolerance {tol:.2e} (|secular| = {fval:.3e})"
        )
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or not np.all(np.diff(grid) > 0):
        raise ValueError("grid must be a strictly increasing 1-D array")

    chi = sqrt_upper(E)
    hull = pot.support_hull
    if hull is None:
        psi = np.exp(-1j * chi * grid)
    else:
        x_left, x_right = hull
        # region table: (x0, k2, psi(x0), psi'(x0)) with psi continued left-to-right
        regions = [(-math.inf, x_left, E, 1.0 + 0j, -1j * chi)]
        psi0, dpsi0 = 1.0 + 0j, -1j * chi
        for left, right, v in _breakpoints(pot, x_left, x_right):
            regions.append((left, right, E - v, psi0, dpsi0))
            m = _piece_matrix(E - v, right - left)
            psi0, dpsi0 = m.apply(psi0, dpsi0)
        regions.append((x_right, math.inf, E, psi0, dpsi0))

        psi = np.empty(grid.shape, dtype=complex)
        for left, right, k2, p0, dp0 in regions:
            if left == -math.inf:
                sel = grid < right
                psi[sel] = p0 * np.exp(-1j * chi * (grid[sel] - right))
                continue
            sel = (grid >= left) & (grid < right) if right < math.inf else grid >= left
            if not np.any(sel):
                continue
            k = cmath.sqrt(k2)
            u = grid[sel] - left
            if abs(k) < 1e-12:
                psi[sel] = p0 + dp0 * u
            else:
                psi[sel] = p0 * np.cos(k * u) + dp0 * np.sin(k * u) / k

    norm = math.sqrt(float(_trapz(np.abs(psi) ** 2, grid)))
    if norm == 0:
        raise ValueError("reconstructed solution vanished on the grid")
    return psi / norm
