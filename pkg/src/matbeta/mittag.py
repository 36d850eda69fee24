"""Two-parameter Mittag-Leffler function on the complex plane.

``E(z) = sum_{k>=0} z^k / Gamma(psi + phi*k)`` for orders ``phi`` in (0, 2]
and ``psi`` in (0, 5].  Evaluation picks one of four strategies per point:
exact closed forms for the four classical order pairs, a compensated Taylor
sum near the origin, the large-argument expansion with explicit exponential
terms, and a parabolic inverse-Laplace contour in between.  The strategy
seams are exercised directly by the test suite: adjacent regions must agree
on shared boundary points.

Non-finite arguments evaluate to 0.  This is the limit convention used by
the beta-family integrands, whose Mittag-Leffler arguments run to -infinity
as the integration variable approaches a clipped endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rgamma

from .errors import DomainError, EvaluationError
from .matcore import apply_scalar_function, as_matrix, inf_norm

#: Taylor region: |z| <= TAYLOR_RADIUS and |z|**(1/phi) <= TAYLOR_ROOT_BUDGET.
#: The second bound caps sum(|term|) near e**11, keeping the cancellation
#: error of the alternating sum around 1e-11 in the worst corner.
TAYLOR_RADIUS = 15.0
TAYLOR_ROOT_BUDGET = 11.0

#: Parabola vertex candidates, tried smallest first; the first whose poles
#: keep POLE_CLEARANCE distance in the sqrt plane wins.  Small vertices are
#: preferred because the kernel magnitude e^mu sets the roundoff floor.
MU_CANDIDATES = (3.5, 4.5, 6.0, 8.0, 11.0, 15.0, 20.0, 26.0)
POLE_CLEARANCE = 0.35

_MAX_TAYLOR_TERMS = 250
_MAX_ASYM_TERMS = 40
_CONTOUR_REFINEMENTS = 3

_CLOSED_FORMS = {(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (2.0, 2.0)}


@dataclass(frozen=True)
class MLParams:
    """Validated order pair (phi, psi)."""

    phi: float
    psi: float

    def __post_init__(self):
        phi = float(self.phi)
        psi = float(self.psi)
        if not math.isfinite(phi) or not 0.0 < phi <= 2.0:
            raise DomainError(f"phi must lie in (0, 2], got {self.phi!r}")
        if not math.isfinite(psi) or not 0.0 < psi <= 5.0:
            raise DomainError(f"psi must lie in (0, 5], got {self.psi!r}")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "psi", psi)


def asymptotic_radius(phi: float) -> float:
    """Smallest |z| at which the large-argument expansion is trusted.

    The floor 28**phi keeps the magnitude of the saddle variable
    |z|**(1/phi) at least 28, so the optimally truncated algebraic series
    bottoms out below 1e-12.
    """
    with np.errstate(over="ignore"):
        return float(max(30.0, 10.0 * (2.0 / phi) ** (1.0 / phi), 28.0**phi))


def pick_strategy(z, params: MLParams) -> str:
    """Name the evaluation strategy used for the scalar argument ``z``."""
    zc = complex(z)
    if not (math.isfinite(zc.real) and math.isfinite(zc.imag)):
        return "zero_limit"
    if (params.phi, params.psi) in _CLOSED_FORMS:
        return "closed_form"
    az = abs(zc)
    if az <= TAYLOR_RADIUS and az ** (1.0 / params.phi) <= TAYLOR_ROOT_BUDGET:
        return "taylor"
    if az >= asymptotic_radius(params.phi):
        return "asymptotic"
    return "contour"


def ml_scalar(z, params: MLParams):
    """Evaluate the function at scalar or ndarray argument ``z``.

    Returns a complex scalar for scalar input, otherwise an ndarray of the
    same shape.  Non-finite entries map to 0 (see module docstring).
    """
    phi, psi = params.phi, params.psi
    arr = np.asarray(z, dtype=complex)
    scalar_in = arr.ndim == 0
    flat = arr.ravel()
    out = np.zeros(flat.shape, dtype=complex)
    finite = np.isfinite(flat)
    zf = flat[finite]
    if zf.size:
        if (phi, psi) in _CLOSED_FORMS:
            vals = _closed_form(zf, phi, psi)
        else:
            vals = np.empty(zf.shape, dtype=complex)
            az = np.abs(zf)
            with np.errstate(over="ignore"):
                root = az ** (1.0 / phi)
            tay = (az <= TAYLOR_RADIUS) & (root <= TAYLOR_ROOT_BUDGET)
            asy = ~tay & (az >= asymptotic_radius(phi))
            con = ~(tay | asy)
            if tay.any():
                vals[tay] = _taylor_batch(zf[tay], phi, psi)
            if asy.any():
                vals[asy] = _asymptotic_batch(zf[asy], phi, psi)
            if con.any():
                vals[con] = _contour_batch(zf[con], phi, psi)
        out[finite] = vals
    out = out.reshape(arr.shape)
    if scalar_in:
        return complex(out[()])
    return out


def ml_matrix(m: np.ndarray, params: MLParams) -> np.ndarray:
    """Evaluate the function at a square matrix argument.

    The function is entire, so the lift through ``apply_scalar_function``
    is well defined for every square matrix.  The zero matrix returns
    ``I / Gamma(psi)`` exactly.
    """
    m = as_matrix(m)
    if inf_norm(m) == 0.0:
        return complex(rgamma(params.psi)) * np.eye(m.shape[0], dtype=complex)
    return apply_scalar_function(m, lambda lam: ml_scalar(lam, params))


def _closed_form(zf: np.ndarray, phi: float, psi: float) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if phi == 1.0 and psi == 1.0:
            return np.exp(zf)
        if phi == 1.0 and psi == 2.0:
            # (e^z - 1)/z; series below 1e-4 avoids the subtractive hole
            out = np.empty_like(zf)
            small = np.abs(zf) < 1e-4
            zs = zf[small]
            out[small] = 1.0 + zs * (0.5 + zs * (1.0 / 6.0 + zs / 24.0))
            zb = zf[~small]
            out[~small] = (np.exp(zb) - 1.0) / zb
            return out
        w = np.sqrt(zf)
        if psi == 1.0:
            return np.cosh(w)
        # sinh(sqrt z)/sqrt z, even in sqrt z so the branch cut drops out
        out = np.empty_like(zf)
        small = np.abs(zf) < 1e-4
        zs = zf[small]
        out[small] = 1.0 + zs * (1.0 / 6.0 + zs / 120.0)
        wb = w[~small]
        out[~small] = np.sinh(wb) / wb
        return out


def _taylor_batch(zf: np.ndarray, phi: float, psi: float) -> np.ndarray:
    rg = rgamma(psi + phi * np.arange(_MAX_TAYLOR_TERMS + 1))
    total = np.full(zf.shape, complex(rg[0]))
    comp = np.zeros_like(total)
    powers = np.ones_like(zf)
    quiet = 0
    for k in range(1, _MAX_TAYLOR_TERMS + 1):
        powers = powers * zf
        contrib = powers * rg[k]
        # Kahan update: the sum alternates, so compensation matters
        y = contrib - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if np.all(np.abs(contrib) <= 1e-17 * (1.0 + np.abs(total))):
            quiet += 1
            if quiet >= 2:
                return total
        else:
            quiet = 0
    raise EvaluationError("power series failed to converge inside its trust region")


def _principal_poles(zf: np.ndarray, phi: float):
    """Roots of s**phi = z on the principal sheet |arg s| <= pi.

    Returns ``(ws, valid)`` of shape (3, n): candidate roots for branch
    offsets j in {-1, 0, 1} and the mask of genuine ones.  The half-open
    angle window (-phi*pi, phi*pi] dedupes the coincident pair that arises
    for integer phi at arguments on the branch cut.
    """
    theta = np.angle(zf)
    theta = np.where(theta == -np.pi, np.pi, theta)
    with np.errstate(over="ignore"):
        r = np.abs(zf) ** (1.0 / phi)
    ws = np.empty((3, zf.size), dtype=complex)
    valid = np.empty((3, zf.size), dtype=bool)
    for row, j in enumerate((-1, 0, 1)):
        tj = theta + 2.0 * np.pi * j
        valid[row] = (tj > -phi * np.pi) & (tj <= phi * np.pi)
        ws[row] = r * np.exp(1j * tj / phi)
    return ws, valid


def _pole_terms(ws: np.ndarray, mask: np.ndarray, phi: float, psi: float) -> np.ndarray:
    """Sum of (1/phi) w**(1-psi) e**w over the masked roots.

    Terms that overflow double precision are rebuilt as directional
    infinities; naive complex multiplication would turn inf * 0 into NaN.
    """
    safe_w = np.where(mask, ws, 1.0)
    with np.errstate(over="ignore", invalid="ignore"):
        terms = safe_w ** (1.0 - psi) * np.exp(safe_w) / phi
    terms = np.where(mask, terms, 0.0)
    bad = mask & ~np.isfinite(terms)
    if np.any(bad):
        ang = ((1.0 - psi) * np.log(safe_w) + safe_w).imag
        c = np.cos(ang)
        s = np.sin(ang)
        big = np.zeros_like(terms)
        big.real = np.where(c == 0.0, 0.0, np.where(c > 0.0, np.inf, -np.inf))
        big.imag = np.where(s == 0.0, 0.0, np.where(s > 0.0, np.inf, -np.inf))
        terms = np.where(bad, big, terms)
    return terms.sum(axis=0)


def _asymptotic_batch(zf: np.ndarray, phi: float, psi: float) -> np.ndarray:
    ws, valid = _principal_poles(zf, phi)
    expo = _pole_terms(ws, valid, phi, psi)
    # algebraic series - sum_k z^{-k} / Gamma(psi - phi k), truncated per
    # point at the smallest term.  "Smallest" is judged on the pairwise-max
    # envelope: whenever psi - phi k lands on a Gamma pole the term vanishes
    # identically, and freezing on the rebound after such an isolated zero
    # would drop an O(|z|^-k) tail
    ks = np.arange(1, _MAX_ASYM_TERMS + 1)
    rg = rgamma(psi - phi * ks)
    with np.errstate(under="ignore"):
        terms = zf[None, :] ** (-ks[:, None]) * rg[:, None]
    mags = np.abs(terms)
    env = np.maximum(mags[:-1], mags[1:])
    keep = env.argmin(axis=0)
    frozen = np.take_along_axis(np.cumsum(terms, axis=0), keep[None, :], axis=0)[0]
    return expo - frozen


def _contour_batch(zf: np.ndarray, phi: float, psi: float) -> np.ndarray:
    ws, valid = _principal_poles(zf, phi)
    # clearance of each pole from each candidate parabola, measured in the
    # sqrt plane where the contour is the vertical line Re = 1
    dmat = np.empty((len(MU_CANDIDATES), zf.size))
    for c, mu in enumerate(MU_CANDIDATES):
        pre = np.sqrt(ws / mu)
        dist = np.where(valid, np.abs(1.0 - pre.real), np.inf).min(axis=0)
        dmat[c] = np.minimum(dist, 1.0)
    ok = dmat >= POLE_CLEARANCE
    first_ok = np.argmax(ok, axis=0)
    chosen = np.where(ok.any(axis=0), first_ok, np.argmax(dmat, axis=0))
    out = np.empty(zf.shape, dtype=complex)
    for c in np.unique(chosen):
        sel = chosen == c
        out[sel] = _contour_group(
            zf[sel], ws[:, sel], valid[:, sel],
            MU_CANDIDATES[int(c)], float(dmat[c, sel].min()), phi, psi,
        )
    return out


def _contour_group(zs, ws, valid, mu, d, phi, psi):
    # poles crossed when the upright integration line bends into the
    # parabola contribute their exact residues
    right = valid & (ws.real > mu - ws.imag**2 / (4.0 * mu))
    res = _pole_terms(ws, right, phi, psi)
    # node spacing tracks pole clearance; the 0.05 floor caps node count when
    # a pole sits nearly on the contour (refinement then does the work)
    h = 2.0 * np.pi * min(1.0, max(d, 0.05)) / 31.0
    prev = None
    gap = scale = floor = None
    for level in range(_CONTOUR_REFINEMENTS + 1):
        cur, absum = _parabola_sum(zs, mu, h / 2**level, phi, psi)
        # summing ~e^mu sized kernel terms leaves an irreducible roundoff
        # floor of eps * sum |term|; agreement below it is not meaningful
        floor = 2.2e-16 * absum
        if prev is not None:
            scale = np.maximum(1.0, np.abs(cur + res))
            gap = np.abs(cur - prev)
            if np.all(gap <= 1e-11 * scale + 30.0 * floor):
                return cur + res
        prev = cur
    if np.any(gap > 1e-8 * scale + 1e3 * floor) or not np.all(np.isfinite(cur)):
        raise EvaluationError("contour quadrature failed to stabilize")
    return cur + res


def _parabola_sum(zs, mu, h, phi, psi):
    """Trapezoid sum of the inverse-Laplace kernel on s = mu (1 + iu)**2.

    Returns the sum and the accumulated absolute magnitude (the latter
    feeds the caller's roundoff-floor estimate).
    """
    umax = math.sqrt(1.0 + 34.0 / mu)  # e^{Re s} < 2e-15 beyond the cut
    n = int(math.ceil(umax / h))
    u = h * np.arange(-n, n + 1)
    line = 1.0 + 1j * u
    s = mu * line**2
    kern = np.exp(s) * s ** (phi - psi) * line * (mu * h / np.pi)
    sphi = s**phi
    total = np.empty(zs.shape, dtype=complex)
    absum = np.empty(zs.shape)
    akern = np.abs(kern)
    chunk = max(1, 2_000_000 // u.size)
    for i in range(0, zs.size, chunk):
        blk = zs[i : i + chunk]
        dist = np.abs(sphi[:, None] - blk[None, :])
        total[i : i + chunk] = (kern[:, None] / (sphi[:, None] - blk[None, :])).sum(axis=0)
        absum[i : i + chunk] = (akern[:, None] / dist).sum(axis=0)
    return total, absum
