"""Log-spectrum of a zero-free characteristic function.

For a law with ``inf |f| > 0`` the distinguished logarithm has the form

    log f(t) = i t gamma0 + sum_u lam_u (exp(i t u) - 1)

with real, absolutely summable ``lam_u`` indexed by the support module.
On a lattice ``a + hZ`` this is a one-dimensional Fourier series of the
periodic factor; for a support with ``d`` independent generators it is a
``d``-dimensional Fourier series on the torus.  Both are computed by FFT of
a sequentially unwrapped logarithm.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import trapezoid

from .charfn import SearchBudget, Tag, _weighted_median, eval_cf, qid_verdict
from .errors import (BasisCollision, CoefficientNotReal, GridTooCoarse, NotLattice,
                     NotQID, ZeroOnPath)
from .law import detect_generating_basis, detect_lattice

__all__ = [
    "SpectralDecomposition",
    "spectrum_lattice",
    "spectrum_torus",
    "bohr_coefficient",
    "eval_from_spectrum",
    "decompose",
]

DROP_TOL = 1e-14
IMAG_TOL = 1e-9
ALIAS_TOL = 1e-13
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Drift ``gamma0`` and coefficients ``lam[k]`` at frequencies ``u[k]``.

    ``index[k]`` holds the integer coordinates of ``u[k]`` in ``structure``
    (lattice span or module generators), so every frequency lies in the
    module exactly.  ``winding`` is the per-generator winding number.
    """

    gamma0: float
    u: np.ndarray
    lam: np.ndarray
    index: np.ndarray
    l1_norm: float
    truncation_bound: float
    structure: object
    winding: tuple = ()
    imag_max: float = 0.0
    n_grid: int = 0
    normalization_error: float = 0.0

    @property
    def coeffs(self):
        return {float(a): float(b) for a, b in zip(self.u, self.lam)}

    def coefficient(self, u, tol=1e-9):
        """``lam_u`` for the stored frequency closest to ``u`` (0.0 if none within tol)."""
        if self.u.size == 0:
            return 0.0
        k = int(np.argmin(np.abs(self.u - u)))
        return float(self.lam[k]) if abs(self.u[k] - u) <= tol * max(1.0, abs(u)) else 0.0

    def at_index(self, *m):
        """``lam`` at integer multi-index ``m`` (0.0 when not stored)."""
        m = np.asarray(m, dtype=np.int64)
        hit = np.nonzero(np.all(self.index == m, axis=1))[0]
        return float(self.lam[hit[0]]) if hit.size else 0.0


def _next_pow2(n):
    return 1 << max(0, int(math.ceil(math.log2(max(1, n)))))


def _wrap(a):
    return (a + math.pi) % TWO_PI - math.pi


def _truncation_bound(freqs_abs, mags, dropped):
    """Geometric tail estimate from the last decade of significant coefficients."""
    kmax_all = int(freqs_abs.max()) if freqs_abs.size else 0
    env = np.zeros(kmax_all + 1)
    np.maximum.at(env, freqs_abs, mags)
    sig = np.nonzero(env[1:] > DROP_TOL)[0] + 1
    if sig.size == 0:
        return dropped
    kmax = int(sig[-1])
    ks = np.arange(max(1, kmax - 9), kmax + 1)
    ks = ks[env[ks] > 0]
    tail = 0.0
    if ks.size >= 3:
        slope = np.polyfit(ks, np.log(env[ks]), 1)[0]
        r = math.exp(slope)
        if r < 1.0:
            tail = 2.0 * env[kmax] * r / (1.0 - r)
        else:
            tail = 2.0 * float(env[ks].sum())
    return dropped + tail


def _unwrap_torus(psi):
    """Continuous phase of ``psi`` on a periodic ``n^d`` grid.

    Unwraps axis by axis from the origin, then checks that every grid edge
    (periodic closures included) moves the phase by less than pi.  Returns
    the phase and the winding integer per axis.
    """
    d, n = psi.ndim, psi.shape[0]
    phase = np.angle(psi)
    un = phase
    for ax in range(d):
        un = np.unwrap(un, axis=ax)
    origin = (0,) * d
    winding = []
    for ax in range(d):
        last = list(origin)
        last[ax] = n - 1
        last = tuple(last)
        end = un[last] + _wrap(phase[origin] - phase[last])
        w_real = (end - un[origin]) / TWO_PI
        w = int(round(w_real))
        if abs(w_real - w) > 1e-9:
            raise GridTooCoarse(f"winding along axis {ax} is not an integer ({w_real!r})")
        winding.append(w)
    for ax in range(d):
        steps = np.diff(un, axis=ax)
        closure = np.take(un, [0], axis=ax) + TWO_PI * winding[ax] - np.take(un, [-1], axis=ax)
        if max(np.abs(steps).max(initial=0.0), np.abs(closure).max()) >= math.pi:
            raise GridTooCoarse("phase field has nonzero curl; refine the grid")
    return un, winding


def _torus_log_spectrum(coords, p, n, mu):
    """Fourier coefficients of ``log Phi(theta) - i <w, theta>`` on an ``n^d`` grid.

    ``coords`` are integer coordinates (K x d) of the atoms.  Returns
    (coefficients array of shape n^d, winding integers, imag-free check data).
    """
    d = coords.shape[1]
    med = np.array([_weighted_median(coords[:, j], p) for j in range(d)]).astype(np.int64)
    cc = coords - med
    lip = np.sum(p[:, None] * np.abs(cc), axis=0)
    arr = np.zeros((n,) * d, dtype=complex)
    np.add.at(arr, tuple((cc % n).T), p)
    psi = np.fft.ifftn(arr) * float(n) ** d
    floor = min(mu, float(np.abs(psi).min()))
    if floor <= 0.0 or float(lip.max()) * TWO_PI / n >= floor:
        raise GridTooCoarse(f"grid of {n} points per axis cannot track the phase safely")
    un, w_c = _unwrap_torus(psi)
    theta = np.arange(n) * (TWO_PI / n)
    ramp = np.zeros((n,) * d)
    for ax in range(d):
        shape = [1] * d
        shape[ax] = n
        ramp = ramp + w_c[ax] * theta.reshape(shape)
    g = np.log(np.abs(psi)) + 1j * (un - ramp)
    c = np.fft.fftn(g) / float(n) ** d
    winding = tuple(int(v) for v in np.asarray(w_c) + med)
    return c, winding


def _collect(c, n, d, drop_tol, imag_tol):
    freqs = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
    grids = np.meshgrid(*([freqs] * d), indexing="ij")
    m = np.stack([gr.ravel() for gr in grids], axis=1)
    vals = c.ravel()
    nonzero = np.any(m != 0, axis=1)
    imag_max = float(np.abs(vals.imag).max())
    if imag_max > imag_tol:
        raise CoefficientNotReal(f"coefficient imaginary part {imag_max:.3g} exceeds {imag_tol:.3g}")
    lam = vals.real
    normalization_error = abs(float(lam.sum()))
    keep = nonzero & (np.abs(lam) >= drop_tol)
    dropped = float(np.abs(lam[nonzero & ~keep]).sum())
    return m, lam, keep, dropped, imag_max, normalization_error


def _aliased(c, n):
    """Largest coefficient magnitude in the outer quarter of the frequency box."""
    freqs = np.abs(np.fft.fftfreq(n, 1.0 / n))
    outer = freqs >= 3 * n // 8
    mags = np.abs(c)
    worst = 0.0
    for ax in range(c.ndim):
        worst = max(worst, float(np.compress(outer, mags, axis=ax).max(initial=0.0)))
    return worst


def _resolve(coords, p, mu, n_start, auto, n_max):
    n = n_start
    while True:
        try:
            c, winding = _torus_log_spectrum(coords, p, n, mu)
        except GridTooCoarse:
            if n * 2 > n_max:
                raise
            n *= 2
            continue
        if auto and _aliased(c, n) > ALIAS_TOL and n * 2 <= n_max:
            n *= 2
            continue
        return c, winding, n


def _require_mu(law, mu):
    if mu is not None:
        if not mu > 0:
            raise ValueError("mu must be positive")
        return mu
    verdict = qid_verdict(law)
    if verdict.tag is not Tag.QID:
        raise NotQID(f"law is {verdict.tag.value}, spectrum needs a certified QID law", verdict)
    return verdict.mu


def spectrum_lattice(law, mu=None, n_fft=None, drop_tol=DROP_TOL, imag_tol=IMAG_TOL,
                     max_n_fft=1 << 22, lattice=None):
    """Spectral decomposition of a lattice law.

    Parameters
    ----------
    law : DiscreteLaw
        Law supported on ``a + h Z`` with ``inf |f| >= mu``.
    mu : float, optional
        Certified lower bound of ``|f|``.  Computed with :func:`qid_verdict`
        when omitted.
    n_fft : int, optional
        FFT length (power of two).  Doubled automatically when the phase
        cannot be tracked safely; chosen adaptively from coefficient decay
        when omitted.
    drop_tol, imag_tol : float
        Coefficients below ``drop_tol`` are discarded; imaginary parts above
        ``imag_tol`` raise :class:`CoefficientNotReal`.

    Returns
    -------
    SpectralDecomposition
        Frequencies ``u = n h`` with ``gamma0 = a + w h`` for the winding
        number ``w`` of the periodic factor.
    """
    lat = lattice or detect_lattice(law)
    if lat is None:
        raise NotLattice("support is not contained in a lattice")
    mu = _require_mu(law, mu)
    n_idx = np.asarray(lat.indices, dtype=np.int64).reshape(-1, 1)
    p = np.asarray(law.p)
    span = int(n_idx.max() - n_idx.min())
    auto = n_fft is None
    if auto:
        n_start = max(64, _next_pow2(4 * law.size), _next_pow2(8 * (span + 1)))
    else:
        n_start = _next_pow2(max(int(n_fft), 4 * law.size))
    n_start = min(n_start, max_n_fft)
    c, winding, n = _resolve(n_idx, p, mu, n_start, auto, max_n_fft)
    m, lam, keep, dropped, imag_max, norm_err = _collect(c, n, 1, drop_tol, imag_tol)
    m, lam = m[keep], lam[keep]
    order = np.argsort(m[:, 0], kind="stable")
    m, lam = m[order], lam[order]
    freqs = np.abs(np.fft.fftfreq(n, 1.0 / n)).astype(np.int64)
    tb = _truncation_bound(freqs, np.abs(c.real), dropped)
    w = winding[0]
    return SpectralDecomposition(
        gamma0=lat.offset + w * lat.span,
        u=m[:, 0] * lat.span,
        lam=lam,
        index=m,
        l1_norm=float(np.abs(lam).sum()),
        truncation_bound=tb,
        structure=lat,
        winding=(w,),
        imag_max=imag_max,
        n_grid=n,
        normalization_error=norm_err,
    )


def spectrum_torus(law, basis, mu=None, n_grid=None, drop_tol=DROP_TOL, imag_tol=IMAG_TOL,
                   u_sep_tol=1e-9, max_grid=None):
    """Spectral decomposition through the torus lift ``f(t) = Phi(beta t)``.

    ``basis`` must hold at most three rationally independent generators.
    Coefficients are indexed by integer vectors ``m`` with ``u = m . beta``;
    two multi-indices giving nearly equal ``u`` raise
    :class:`BasisCollision`.
    """
    d = basis.dim
    if d > 3:
        raise ValueError("torus lift is limited to d <= 3 generators")
    mu = _require_mu(law, mu)
    coords = np.asarray(basis.coords, dtype=np.int64)
    p = np.asarray(law.p)
    if max_grid is None:
        max_grid = {1: 1 << 22, 2: 2048, 3: 128}[d]
    auto = n_grid is None
    spread = int(np.ptp(coords, axis=0).max())
    n_start = max(32, _next_pow2(8 * (spread + 1))) if auto else _next_pow2(int(n_grid))
    n_start = min(n_start, max_grid)
    c, winding, n = _resolve(coords, p, mu, n_start, auto, max_grid)
    m, lam, keep, dropped, imag_max, norm_err = _collect(c, n, d, drop_tol, imag_tol)
    m, lam = m[keep], lam[keep]
    beta = np.asarray(basis.generators, dtype=float)
    u = m @ beta
    order = np.lexsort((lam, u))
    m, lam, u = m[order], lam[order], u[order]
    if u.size > 1:
        gaps = np.diff(u)
        bad = np.nonzero(gaps < u_sep_tol)[0]
        if bad.size:
            k = bad[0]
            raise BasisCollision(f"indices {m[k].tolist()} and {m[k + 1].tolist()} give "
                                 f"frequencies {u[k]!r}, {u[k + 1]!r}")
    freq_abs = np.abs(np.fft.fftfreq(n, 1.0 / n)).astype(np.int64)
    grids = np.meshgrid(*([freq_abs] * d), indexing="ij")
    cheb = np.max(np.stack([gr.ravel() for gr in grids]), axis=0)
    tb = _truncation_bound(cheb, np.abs(c.real).ravel(), dropped)
    return SpectralDecomposition(
        gamma0=float(np.dot(winding, beta)),
        u=u,
        lam=lam,
        index=m,
        l1_norm=float(np.abs(lam).sum()),
        truncation_bound=tb,
        structure=basis,
        winding=winding,
        imag_max=imag_max,
        n_grid=n,
        normalization_error=norm_err,
    )


def bohr_coefficient(law, u, half_window, n, zero_tol=1e-10, drift=0.0):
    """Mean value ``(1/2T) int_{-T}^{T} (log f(t) - i drift t) exp(-iut) dt``.

    Trapezoid rule on ``n`` points.  The logarithm is the continuous branch
    with ``log f(0) = 0``, tracked along the grid.  A linear term ``i t
    gamma0`` has no mean value (its windowed mean is ``-gamma0 cos(uT)/u``
    for every ``T``), so pass ``drift=gamma0`` for laws with nonzero drift.
    Raises :class:`ZeroOnPath` if ``|f|`` gets within ``zero_tol`` of zero
    on the grid.
    """
    if u == 0:
        raise ValueError("u must be nonzero")
    t = np.linspace(-half_window, half_window, int(n))
    f = eval_cf(law, t)
    mod = np.abs(f)
    if mod.min() <= zero_tol:
        raise ZeroOnPath(f"|f| = {mod.min():.3g} at t = {t[np.argmin(mod)]!r}")
    x = np.asarray(law.x)
    c = float(_weighted_median(x, law.p))
    lip = float(np.dot(law.p, np.abs(x - c)))
    dt = t[1] - t[0]
    if lip * dt >= mod.min():
        raise GridTooCoarse("quadrature grid too coarse to follow the phase of f")
    g = f * np.exp(-1j * c * t)
    phase = np.unwrap(np.angle(g))
    j0 = int(np.argmin(np.abs(t)))
    # near t = 0 the principal value is the distinguished branch
    phase += TWO_PI * round((np.angle(g[j0]) - phase[j0]) / TWO_PI)
    logf = np.log(mod) + 1j * (phase + (c - drift) * t)
    return complex(trapezoid(logf * np.exp(-1j * u * t), t) / (2.0 * half_window))


def eval_from_spectrum(spec, t):
    """``exp(i t gamma0 + sum_u lam_u (exp(i t u) - 1))``; scalar or array ``t``."""
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    flat = t.ravel()
    expo = 1j * flat * spec.gamma0
    if spec.u.size:
        step = max(1, (1 << 22) // spec.u.size)
        parts = []
        for s in range(0, flat.size, step):
            parts.append((np.exp(1j * np.outer(flat[s:s + step], spec.u)) - 1.0) @ spec.lam)
        expo = expo + np.concatenate(parts)
    out = np.exp(expo).reshape(t.shape)
    return complex(out[0]) if scalar else out


def decompose(law, budget=None, n_fft=None):
    """Certify the law and return ``(verdict, spectrum)``.

    Lattice laws go through :func:`spectrum_lattice`, others through
    :func:`spectrum_torus`.  Raises :class:`NotQID` unless the verdict is QID.
    """
    budget = budget or SearchBudget()
    verdict = qid_verdict(law, budget)
    if verdict.tag is not Tag.QID:
        raise NotQID(f"law is {verdict.tag.value}; a spectrum needs a certified QID law", verdict)
    lat = detect_lattice(law, budget.denom_bound, budget.struct_tol)
    if lat is not None:
        return verdict, spectrum_lattice(law, verdict.mu, n_fft=n_fft, lattice=lat)
    basis = detect_generating_basis(law, budget.d_max, budget.relation_bound,
                                    budget.struct_tol, budget.denom_bound)
    return verdict, spectrum_torus(law, basis, verdict.mu, n_grid=n_fft)
