"""Truncated Fock-space simulator used as ground truth for every closed form.

Works at desk scale only (|alpha| of order unity, r <= 1 or so, nbar a few):
exact density matrices on a per-mode cutoff, an exactly number-conserving
exchange unitary built block-by-block, and direct operator averages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import expm
from scipy.special import gammaln

from .states import GwSignalParams

DEFAULT_TAIL_TOL = 1e-8
# squeezed thermal corners of the validation box (nbar ~ 2, r ~ 1) decay like
# 0.95^n and need cutoffs well past 200 before the top level drops below 1e-8
MAX_DIM = 320

TRACE_TOL = 1e-10
HERMITICITY_TOL = 1e-12
POSITIVITY_FLOOR = -1e-10


@dataclass(frozen=True)
class TruncatedState:
    """Density matrix on a truncated Fock space with recorded truncation error."""

    dim: int
    rho: NDArray[np.complex128]
    tail_mass: float
    num_modes: int = 1

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        size = self.dim**self.num_modes
        if rho.shape != (size, size):
            raise ValueError(f"expected a {size}x{size} density matrix")
        if abs(np.trace(rho).real - 1.0) > TRACE_TOL or abs(np.trace(rho).imag) > TRACE_TOL:
            raise ValueError("density matrix trace must be 1")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITICITY_TOL:
            raise ValueError("density matrix must be Hermitian")
        if np.linalg.eigvalsh(rho).min() < POSITIVITY_FLOOR:
            raise ValueError("density matrix has a negative eigenvalue beyond tolerance")
        object.__setattr__(self, "rho", rho)


def annihilation(dim: int) -> NDArray[np.float64]:
    return np.diag(np.sqrt(np.arange(1.0, dim)), k=1)


def _renormalized_expm(gen: NDArray[np.complex128]) -> tuple[NDArray[np.complex128], float]:
    """expm of a truncated anti-Hermitian generator, columns renormalized.

    Exponentiated through the spectral decomposition of the (Hermitian)
    i * generator, which is exact for the truncated matrix and keeps the
    result unitary to rounding.  Truncation makes the top columns lose
    fidelity rather than norm; the norm deficit is still measured and
    divided out, and the largest deficit is returned as the leakage.
    """
    herm = 1j * gen
    if np.max(np.abs(herm - herm.conj().T)) > 1e-12 * max(1.0, np.abs(herm).max()):
        op = expm(gen)
    else:
        w, v = np.linalg.eigh(herm)
        op = (v * np.exp(-1j * w)) @ v.conj().T
    norms = np.linalg.norm(op, axis=0)
    leakage = float(np.max(np.abs(1.0 - norms)))
    return op / norms, leakage


def displacement_op(alpha: complex, dim: int) -> tuple[NDArray[np.complex128], float]:
    a = annihilation(dim)
    return _renormalized_expm(alpha * a.T.conj() - np.conj(alpha) * a)


def squeeze_op(r: float, theta: float, dim: int) -> tuple[NDArray[np.complex128], float]:
    a = annihilation(dim)
    xi = r * np.exp(1j * theta)
    return _renormalized_expm(0.5 * (np.conj(xi) * (a @ a) - xi * (a.T @ a.T)))


def thermal_density(nbar: float, dim: int) -> NDArray[np.complex128]:
    """Geometric-weight thermal state, trace-normalized on the cutoff space."""
    if nbar == 0.0:
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    weights = np.exp(np.arange(dim) * math.log(nbar / (nbar + 1.0)))
    weights /= weights.sum()
    return np.diag(weights).astype(complex)


def build_gw_density(
    p: GwSignalParams, dim: int, tail_tol: float = DEFAULT_TAIL_TOL
) -> TruncatedState:
    """Displaced squeezed thermal density matrix D S rho_th S† D†."""
    rho = thermal_density(p.nbar, dim)
    if p.r != 0.0:
        s, _ = squeeze_op(p.r, p.theta, dim)
        rho = s @ rho @ s.conj().T
    if p.alpha != 0:
        d, _ = displacement_op(p.alpha, dim)
        rho = d @ rho @ d.conj().T
    rho /= np.trace(rho).real
    rho = (rho + rho.conj().T) / 2.0
    tail = float(rho[dim - 1, dim - 1].real)
    if tail > tail_tol:
        raise ValueError(f"tail mass {tail:.3e} exceeds {tail_tol}: increase dim")
    return TruncatedState(dim, rho, tail)


def _tail_decay_ratio(p: GwSignalParams) -> float:
    """Asymptotic level-population ratio of the displaced squeezed thermal state.

    Equals the spectral radius of the detection kernel A of the undisplaced
    state: for a thermal state this is nbar / (nbar + 1), squeezing pushes it
    toward 1.
    """
    half = p.nbar + 0.5
    w = half * math.cosh(2 * p.r) + 0.5
    mu = half * math.sinh(2 * p.r)
    det = w * w - mu * mu
    return mu / det + (1.0 - w / det)


def choose_dim(p: GwSignalParams, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Smallest cutoff with acceptable tail mass, capped at MAX_DIM."""
    mean = p.mean_occupation
    q = _tail_decay_ratio(p)
    if q > 1e-3:
        span = math.log(0.05 * tail_tol) / math.log(q)
    else:
        span = 9.0 * math.sqrt(mean + 1.0)
    guess = int(mean + 2.0 * abs(p.alpha) + span + 12)
    dim = min(MAX_DIM, max(12, guess))
    while True:
        try:
            build_gw_density(p, dim, tail_tol)
            return dim
        except ValueError:
            if dim >= MAX_DIM:
                raise
            dim = min(MAX_DIM, int(dim * 1.25) + 1)


def _block_unitary(
    total_n: int, gamma_t: float, j_lo: int = 0, j_hi: int | None = None
) -> NDArray[np.complex128]:
    """exp(-i gamma_t (a b† + a† b)) on the total-number-N block.

    Basis |N - j, j> for j = j_lo..j_hi; the generator is the real symmetric
    tridiagonal with couplings sqrt((N - j)(j + 1)).  Restricting the range
    exponentiates the cutoff-truncated generator, which stays exactly unitary;
    the unrestricted block reproduces the untruncated dynamics.
    """
    j_hi = total_n if j_hi is None else j_hi
    size = j_hi - j_lo + 1
    if size == 1:
        return np.ones((1, 1), dtype=complex)
    j = np.arange(j_lo, j_hi)
    off = np.sqrt((total_n - j) * (j + 1.0))
    tri = np.diag(off, 1) + np.diag(off, -1)
    w, q = np.linalg.eigh(tri)
    return (q * np.exp(-1j * gamma_t * w)) @ q.T


def beamsplitter_unitary(gamma_t: float, dim: int) -> NDArray[np.complex128]:
    """Full two-mode exchange unitary on the dim^2 truncated space.

    Assembled from the number-conserving blocks; every block is exactly
    unitary, and blocks with total number below the cutoff reproduce the
    untruncated dynamics.  Joint index convention: i = n_gw * dim + n_bar.
    """
    u = np.zeros((dim * dim, dim * dim), dtype=complex)
    for total_n in range(2 * dim - 1):
        j_lo = max(0, total_n - dim + 1)
        j_hi = min(total_n, dim - 1)
        block = _block_unitary(total_n, gamma_t, j_lo, j_hi)
        idx = np.array([(total_n - j) * dim + j for j in range(j_lo, j_hi + 1)])
        u[np.ix_(idx, idx)] = block
    return u


def splitting_column(total_n: int, gamma_t: float) -> NDArray[np.complex128]:
    """Exact amplitudes <total_n - m, m| U |total_n, 0> for m = 0..total_n.

    U (a†)^N U† = (cos a† - i sin b†)^N gives the binomial closed form
    sqrt(C(N, m)) cos^{N-m}(gamma_t) (-i sin gamma_t)^m; agrees with the
    exponentiated block to rounding and is what the fast marginal path uses.
    """
    m = np.arange(total_n + 1)
    log_binom = gammaln(total_n + 1) - gammaln(m + 1) - gammaln(total_n - m + 1)
    c, s = math.cos(gamma_t), math.sin(gamma_t)
    mag = np.exp(0.5 * log_binom) * np.abs(c) ** (total_n - m) * np.abs(s) ** m
    phase = np.sign(c) ** (total_n - m) * (-1j * np.sign(s)) ** m
    return mag * phase


def evolved_bar_density(
    gw: TruncatedState, gamma_t: float
) -> tuple[NDArray[np.complex128], float]:
    """Detector marginal of U (rho_gw ⊗ |0><0|) U† without forming the joint.

    rho_bar[m, n] = sum_k V[k, m] rho_gw[k+m, k+n] conj(V[k, n]) with
    V[k, m] = <k, m| U |k+m, 0>, accumulated block by block over k.
    Returns (rho_bar, tail_mass of the marginal).
    """
    dim = gw.dim
    v = np.zeros((dim, dim), dtype=complex)  # v[k, m], support k + m < dim
    for total_n in range(dim):
        col = splitting_column(total_n, gamma_t)
        m = np.arange(total_n + 1)
        v[total_n - m, m] = col
    rho_bar = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        span = dim - k
        sub = gw.rho[k : k + span, k : k + span]
        rho_bar[:span, :span] += v[k, :span, None] * sub * np.conj(v[k, None, :span])
    rho_bar = (rho_bar + rho_bar.conj().T) / 2.0
    return rho_bar, float(rho_bar[dim - 1, dim - 1].real)


def oracle_bar_state(
    p: GwSignalParams,
    gamma_t: float,
    dim: int | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> TruncatedState:
    dim = choose_dim(p, tail_tol) if dim is None else dim
    gw = build_gw_density(p, dim, tail_tol)
    rho_bar, tail = evolved_bar_density(gw, gamma_t)
    return TruncatedState(dim, rho_bar / np.trace(rho_bar).real, tail)


def oracle_pn(
    p: GwSignalParams,
    gamma_t: float,
    n: int,
    dim: int | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> float:
    """tr[rho_bar(t) |n><n|] by direct matrix algebra."""
    bar = oracle_bar_state(p, gamma_t, dim, tail_tol)
    if n >= bar.dim:
        raise ValueError("requested level exceeds the cutoff")
    return float(bar.rho[n, n].real)


def oracle_pn_table(
    p: GwSignalParams,
    gamma_t: float,
    n_max: int,
    dim: int | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> NDArray[np.float64]:
    bar = oracle_bar_state(p, gamma_t, dim, tail_tol)
    return np.diag(bar.rho).real[: n_max + 1].copy()


def oracle_moments_and_g2(
    p: GwSignalParams,
    gamma_t: float,
    dim: int | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> tuple[float, float, float]:
    """(<n>, <n^2>, g2) of the detector marginal; <n> = 0 raises."""
    bar = oracle_bar_state(p, gamma_t, dim, tail_tol)
    levels = np.arange(bar.dim)
    pops = np.diag(bar.rho).real
    mean_n = float(levels @ pops)
    mean_n2 = float((levels**2) @ pops)
    if mean_n == 0.0:
        raise ValueError("g2 undefined: <n> = 0")
    return mean_n, mean_n2, (mean_n2 - mean_n) / mean_n**2


def oracle_normal_moment(
    p: GwSignalParams,
    n_dagger: int,
    n_plain: int,
    dim: int | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> complex:
    """<a†^j a^k> of the wave state itself (no evolution needed)."""
    dim = choose_dim(p, tail_tol) if dim is None else dim
    state = build_gw_density(p, dim, tail_tol)
    a = annihilation(dim).astype(complex)
    op = np.linalg.matrix_power(a.conj().T, n_dagger) @ np.linalg.matrix_power(a, n_plain)
    return complex(np.trace(state.rho @ op))


def oracle_min_quadrature_variance(
    p: GwSignalParams,
    gamma_t: float,
    dim: int | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> tuple[float, float]:
    """(min over rotation angle of Var q(theta), argmin) on the detector marginal.

    Uses <x^2>, <p^2>, <{x, p}> of the evolved marginal; invariant under the
    local phase convention, so directly comparable with the closed form.
    """
    bar = oracle_bar_state(p, gamma_t, dim, tail_tol)
    a = annihilation(bar.dim).astype(complex)
    x = (a + a.conj().T) / math.sqrt(2.0)
    pq = 1j * (a.conj().T - a) / math.sqrt(2.0)
    mx = np.trace(bar.rho @ x).real
    mp = np.trace(bar.rho @ pq).real
    xx = np.trace(bar.rho @ x @ x).real - mx * mx
    pp = np.trace(bar.rho @ pq @ pq).real - mp * mp
    xp = np.trace(bar.rho @ (x @ pq + pq @ x)).real / 2.0 - mx * mp
    mean = 0.5 * (xx + pp)
    amp = math.hypot(0.5 * (xx - pp), xp)
    theta_min = 0.5 * (math.atan2(xp, 0.5 * (xx - pp)) + math.pi) % math.pi
    return mean - amp, theta_min
