"""Fermionic Gaussian states in momentum blocks and their self-consistent dynamics.

The state is one 2x2 Hermitian block per grid momentum,
Gamma_k[a,b] = <psi_{k,a} psi_{k,b}^dagger>.  Translation invariance and
particle-number conservation make this block form exact for every state
reachable here, so storage and the evolution right-hand side are O(N_S)
instead of O(N_S^2).

Internally a block is handled through its Bloch vector,
Gamma_k = (1 + n_k . sigma)/2 with real n_k; the map is affine, so
Runge-Kutta trajectories in either parameterisation coincide.  Trace is
then conserved identically and purity is just ||n_k| - 1|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import (
    GAMMA0,
    GAMMA1,
    LatticeSpec,
    bloch_vector,
    hamiltonian_block,
)


class DegenerateGroundStateError(RuntimeError):
    """Gap closure at a grid momentum makes the Dirac-sea filling ambiguous."""


class ConvergenceError(RuntimeError):
    """Gap-equation fixed-point iteration did not reach tolerance."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or []


class StepSizeError(RuntimeError):
    """Purity drifted beyond tolerance during integration; reduce deta."""


class InternalConsistencyError(RuntimeError):
    """A quantity that must be real came out with a large imaginary part."""


@dataclass(frozen=True)
class CondensatePair:
    """Scalar (Sigma) and pseudo-scalar (Pi) fermion condensates."""

    sigma: float = 0.0
    pi: float = 0.0


@dataclass
class CorrelationState:
    """Momentum-block correlation matrix of a fermionic Gaussian state.

    Attributes
    ----------
    spec : LatticeSpec
    bloch : (N_S, 3) float array
        Bloch vectors n_k; Gamma_k = (1 + n_k . sigma)/2.
    eta : float
        Conformal time of the snapshot.
    a_val : float
        Scale-factor value at the snapshot.
    """

    spec: LatticeSpec
    bloch: np.ndarray
    eta: float = 0.0
    a_val: float = 1.0

    @property
    def blocks(self) -> np.ndarray:
        """Stacked (N_S, 2, 2) complex Hermitian blocks Gamma_k."""
        return blocks_from_bloch(self.bloch)

    @classmethod
    def from_blocks(cls, spec, blocks, eta=0.0, a_val=1.0):
        return cls(spec=spec, bloch=bloch_from_blocks(blocks), eta=eta, a_val=a_val)

    def purity_defect(self) -> float:
        """max_k ||Gamma_k^2 - Gamma_k|| = max_k | |n_k|^2 - 1 | / 4."""
        return float(np.max(np.abs(np.sum(self.bloch**2, axis=-1) - 1.0)) / 4.0)

    def trace_defect(self) -> float:
        """max_k |tr Gamma_k - 1|; identically zero in the Bloch representation."""
        return 0.0

    def copy(self) -> "CorrelationState":
        return CorrelationState(self.spec, self.bloch.copy(), self.eta, self.a_val)


def blocks_from_bloch(n: np.ndarray) -> np.ndarray:
    g = np.zeros(n.shape[:-1] + (2, 2), dtype=complex)
    g[..., 0, 0] = (1.0 + n[..., 2]) / 2.0
    g[..., 1, 1] = (1.0 - n[..., 2]) / 2.0
    g[..., 0, 1] = (n[..., 0] - 1j * n[..., 1]) / 2.0
    g[..., 1, 0] = (n[..., 0] + 1j * n[..., 1]) / 2.0
    return g


def bloch_from_blocks(blocks: np.ndarray) -> np.ndarray:
    blocks = np.asarray(blocks, dtype=complex)
    herm = np.max(np.abs(blocks - np.conj(np.swapaxes(blocks, -1, -2))))
    if herm > 1e-10:
        raise InternalConsistencyError(f"blocks not Hermitian, defect {herm:.3e}")
    nx = 2.0 * blocks[..., 1, 0].real
    ny = 2.0 * blocks[..., 1, 0].imag
    nz = (blocks[..., 0, 0] - blocks[..., 1, 1]).real
    return np.stack([nx, ny, nz], axis=-1)


@dataclass
class Trajectory:
    """Sampled output of :func:`evolve`."""

    etas: np.ndarray
    states: list  # CorrelationState snapshots
    condensates: list  # CondensatePair per sample
    profile: object = None

    def __post_init__(self):
        if len(self.states) != len(self.etas):
            raise ValueError("snapshot count must equal time count")
        if np.any(np.diff(self.etas) <= 0):
            raise ValueError("sample times must be strictly increasing")


# ---------------------------------------------------------------------------
# Condensates and ground states
# ---------------------------------------------------------------------------


def _condensates_from_bloch(bloch, spec: LatticeSpec) -> CondensatePair:
    # <psi^dag gamma0 psi> summed over k reduces to -sum n_z; the gamma1
    # channel to -i * (i sum n_y) after the Hermiticity check.
    pref = spec.coupling / (2.0 * spec.spacing * spec.num_sites)
    return CondensatePair(
        sigma=float(-pref * np.sum(bloch[:, 2])),
        pi=float(pref * np.sum(bloch[:, 1])),
    )


def condensates(state: CorrelationState) -> CondensatePair:
    """Scalar and pseudo-scalar condensates of a state.

    Sigma = g0^2/(2 a N_S) sum_k [Tr(gamma0) - Tr(Gamma_k gamma0)],
    Pi    = i g0^2/(2 a N_S) sum_k [Tr(gamma1) - Tr(Gamma_k gamma1)],
    using <psi^dag A psi> = Tr A - Tr(Gamma A).
    """
    blocks = state.blocks
    pref = state.spec.coupling / (2.0 * state.spec.spacing * state.spec.num_sites)
    sig = pref * np.sum(np.trace(GAMMA0) - np.einsum("kab,ba->k", blocks, GAMMA0))
    pi = 1j * pref * np.sum(np.trace(GAMMA1) - np.einsum("kab,ba->k", blocks, GAMMA1))
    for name, val in (("Sigma", sig), ("Pi", pi)):
        if abs(val.imag) > 1e-12:
            raise InternalConsistencyError(
                f"{name} acquired imaginary part {val.imag:.3e}"
            )
    return CondensatePair(sigma=float(sig.real), pi=float(pi.real))


def free_ground_state(
    spec: LatticeSpec, ma_eff, sigma=0.0, pi=0.0, eta=0.0, a_val=1.0
) -> CorrelationState:
    """Dirac-sea ground state of h_k(ma_eff, sigma, pi) on the grid.

    Each block is the rank-1 projector onto the positive-energy
    eigenvector (equivalently, the negative-energy mode is filled):
    n_k = b_k / |b_k|.
    """
    ks = spec.momentum_grid()
    b = bloch_vector(ks, ma_eff, sigma, pi, spec.spacing)
    eps = np.linalg.norm(b, axis=-1)
    if np.any(eps < 1e-12):
        bad = ks[eps < 1e-12]
        raise DegenerateGroundStateError(
            f"gap closes at k = {bad}; ground state degenerate"
        )
    return CorrelationState(spec, b / eps[:, None], eta=eta, a_val=a_val)


def total_energy(state: CorrelationState, ma_eff, sigma=0.0, pi=0.0) -> float:
    """sum_k <psi_k^dag h_k psi_k> = sum_k [Tr h_k - Tr(Gamma_k h_k)]."""
    ks = state.spec.momentum_grid()
    b = bloch_vector(ks, ma_eff, sigma, pi, state.spec.spacing)
    return float(-np.sum(b * state.bloch))


def mean_field_energy(state: CorrelationState, ma_eff) -> float:
    """Energy functional whose stationary points are the gap-equation vacua.

    E[Gamma] = sum_k [Tr h_k - Tr(Gamma_k h_k)]
             + (a N_S / g0^2) (Sigma[Gamma]^2 - Pi[Gamma]^2).

    Its functional derivative reproduces the condensate-dressed block
    h_k(ma_eff + Sigma) - i Pi gamma1, so it is conserved by the
    self-consistent evolution on static backgrounds and ranks competing
    fixed points (the +-Pi Aoki doublet is exactly degenerate).
    """
    spec = state.spec
    e = total_energy(state, ma_eff)
    if spec.coupling != 0.0:
        c = _condensates_from_bloch(state.bloch, spec)
        e += (spec.spacing * spec.num_sites / spec.coupling) * (
            c.sigma**2 - c.pi**2
        )
    return float(e)


def self_consistent_ground_state(
    spec: LatticeSpec,
    a_val: float,
    tol: float = 1e-10,
    mixing: float = 0.5,
    max_iter: int = 10_000,
    pi_seeds=(0.0, 0.1, -0.1, 0.5, -0.5),
):
    """Gap-equation-consistent vacuum at scale factor a_val.

    Iterates (Sigma, Pi) -> condensates(free_ground_state(...)) with
    linear mixing until the update falls below ``tol``.  Several Pi seeds
    probe the parity-broken (Aoki) branches; the lowest-energy fixed point
    wins and the sign of Pi is reported as found.

    Returns (CorrelationState, CondensatePair).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not (0.0 < mixing <= 1.0):
        raise ValueError("mixing must lie in (0, 1]")
    ma_eff = spec.mass * a_val
    if spec.coupling == 0.0:
        state = free_ground_state(spec, ma_eff, a_val=a_val)
        return state, CondensatePair(0.0, 0.0)

    ks = spec.momentum_grid()
    best = None
    failures = []
    for pi0 in pi_seeds:
        sig, pi = 0.0, float(pi0)
        history = []
        converged = False
        for _ in range(max_iter):
            b = bloch_vector(ks, ma_eff, sig, pi, spec.spacing)
            eps = np.linalg.norm(b, axis=-1)
            if np.any(eps < 1e-12):
                raise DegenerateGroundStateError(
                    f"gap closes at k = {ks[eps < 1e-12]} during iteration"
                )
            new = _condensates_from_bloch(b / eps[:, None], spec)
            d_sig = new.sigma - sig
            d_pi = new.pi - pi
            history.append(max(abs(d_sig), abs(d_pi)))
            sig += mixing * d_sig
            pi += mixing * d_pi
            if history[-1] < tol:
                converged = True
                break
        if not converged:
            failures.append((pi0, history[-10:]))
            continue
        b = bloch_vector(ks, ma_eff, sig, pi, spec.spacing)
        state = CorrelationState(
            spec, b / np.linalg.norm(b, axis=-1)[:, None], a_val=a_val
        )
        energy = mean_field_energy(state, ma_eff)
        if best is None or energy < best[0] - 1e-12:
            best = (energy, state, CondensatePair(sig, pi))
    if best is None:
        raise ConvergenceError(
            f"gap equation did not converge within {max_iter} iterations "
            f"for any seed", residuals=failures
        )
    return best[1], best[2]


def mass_quench_prepare(spec: LatticeSpec, m_pre: float, a_val: float):
    """Ground state at bare mass m_pre, to be evolved at bare mass spec.mass.

    Seeds nonzero particle content at the start of the expansion.  The
    condensates are made self-consistent whenever the coupling is nonzero.
    Returns (CorrelationState, CondensatePair).
    """
    if m_pre == spec.mass:
        raise ValueError("pre-quench mass equals the bare mass: no matter content")
    pre_spec = LatticeSpec(spec.num_sites, spec.spacing, m_pre, spec.coupling)
    state, cond = self_consistent_ground_state(pre_spec, a_val)
    state.spec = spec
    return state, cond


# ---------------------------------------------------------------------------
# Real-time evolution
# ---------------------------------------------------------------------------


def _rhs(bloch, sin_term, wilson_term, ma_t, pref):
    """d n_k / d eta = 2 b_k x n_k with the self-consistent field b_k."""
    sig = -pref * np.sum(bloch[:, 2])
    pi = pref * np.sum(bloch[:, 1])
    bz = ma_t + sig + wilson_term
    # cross product written out; b = (sin_term, pi, bz)
    nx, ny, nz = bloch[:, 0], bloch[:, 1], bloch[:, 2]
    return np.stack(
        [
            2.0 * (pi * nz - bz * ny),
            2.0 * (bz * nx - sin_term * nz),
            2.0 * (sin_term * ny - pi * nx),
        ],
        axis=-1,
    )


def evolve(
    initial: CorrelationState,
    profile,
    eta_span,
    deta: float,
    sample_every: int = 1,
    purity_tol: float = 1e-6,
) -> Trajectory:
    """Integrate the self-consistent block equations over eta_span.

    Classical fixed-step RK4 on d Gamma_k/d eta = -i [h_k(m a(eta),
    Sigma(Gamma), Pi(Gamma)), Gamma_k]; the condensates are recomputed
    from the full set of blocks at every stage.  Snapshots (state plus
    condensates) are kept every ``sample_every`` steps and at the final
    time.  The condensate reduction is a fixed-order numpy sum, so runs
    are bit-reproducible.

    Raises :class:`StepSizeError` if the purity defect of any sample
    exceeds ``purity_tol``.
    """
    if deta <= 0:
        raise ValueError("deta must be positive")
    eta0, eta1 = float(eta_span[0]), float(eta_span[1])
    if eta1 <= eta0:
        raise ValueError("eta_span must be increasing")
    spec = initial.spec
    ks = spec.momentum_grid()
    a = spec.spacing
    sin_term = -np.sin(ks * a) / a
    wilson_term = (1.0 - np.cos(ks * a)) / a
    pref = spec.coupling / (2.0 * a * spec.num_sites)

    n_steps = int(np.ceil((eta1 - eta0) / deta - 1e-12))
    h = (eta1 - eta0) / n_steps

    def ma_at(eta):
        return spec.mass * float(profile.scale_factor(eta))

    n = initial.bloch.copy()
    etas = [eta0]
    states = [CorrelationState(spec, n.copy(), eta0, float(profile.scale_factor(eta0)))]
    conds = [_condensates_from_bloch(n, spec)]
    eta = eta0
    for step in range(n_steps):
        k1 = _rhs(n, sin_term, wilson_term, ma_at(eta), pref)
        k2 = _rhs(n + 0.5 * h * k1, sin_term, wilson_term, ma_at(eta + 0.5 * h), pref)
        k3 = _rhs(n + 0.5 * h * k2, sin_term, wilson_term, ma_at(eta + 0.5 * h), pref)
        k4 = _rhs(n + h * k3, sin_term, wilson_term, ma_at(eta + h), pref)
        n = n + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        eta = eta0 + (step + 1) * h
        if (step + 1) % sample_every == 0 or step == n_steps - 1:
            if etas[-1] < eta:  # final step may coincide with a stride sample
                snap = CorrelationState(
                    spec, n.copy(), eta, float(profile.scale_factor(eta))
                )
                defect = snap.purity_defect()
                if defect > purity_tol:
                    raise StepSizeError(
                        f"purity defect {defect:.3e} at eta = {eta:.6g}; "
                        f"reduce deta (currently {h:.3e})"
                    )
                etas.append(eta)
                states.append(snap)
                conds.append(_condensates_from_bloch(n, spec))
    return Trajectory(np.array(etas), states, conds, profile)


def evolve_adaptive(
    initial: CorrelationState,
    profile,
    eta_span,
    sample_etas=None,
    n_samples: int = 201,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    purity_tol: float = 1e-6,
) -> Trajectory:
    """Adaptive-step integration of the self-consistent block equations.

    Same dynamics as :func:`evolve`, delegated to scipy's DOP853 with
    tight tolerances.  Essential for de Sitter profiles, where the
    effective mass m a(eta) = -m/(H eta) diverges towards eta -> 0^- and
    a fixed step either wastes the early window or blows up at the end;
    the step-size controller tracks the local frequency, so the cost is
    logarithmic in the final scale factor.

    ``sample_etas`` fixes the output grid explicitly; otherwise
    ``n_samples`` points are spread uniformly over ``eta_span``.
    """
    from scipy.integrate import solve_ivp

    eta0, eta1 = float(eta_span[0]), float(eta_span[1])
    if eta1 <= eta0:
        raise ValueError("eta_span must be increasing")
    spec = initial.spec
    ks = spec.momentum_grid()
    a = spec.spacing
    sin_term = -np.sin(ks * a) / a
    wilson_term = (1.0 - np.cos(ks * a)) / a
    pref = spec.coupling / (2.0 * a * spec.num_sites)

    if sample_etas is None:
        sample_etas = np.linspace(eta0, eta1, int(n_samples))
    sample_etas = np.asarray(sample_etas, dtype=float)
    if sample_etas[0] < eta0 - 1e-12 or sample_etas[-1] > eta1 + 1e-12:
        raise ValueError("sample_etas must lie within eta_span")

    def rhs(eta, y):
        n = y.reshape(-1, 3)
        return _rhs(
            n, sin_term, wilson_term, spec.mass * float(profile.scale_factor(eta)), pref
        ).ravel()

    sol = solve_ivp(
        rhs,
        (eta0, eta1),
        initial.bloch.ravel().copy(),
        method="DOP853",
        t_eval=sample_etas,
        rtol=rtol,
        atol=atol,
        dense_output=False,
    )
    if not sol.success:
        raise StepSizeError(f"adaptive integration failed: {sol.message}")
    states, conds = [], []
    for eta, y in zip(sol.t, sol.y.T):
        n = y.reshape(-1, 3)
        snap = CorrelationState(spec, n.copy(), float(eta),
                                float(profile.scale_factor(eta)))
        defect = snap.purity_defect()
        if defect > purity_tol:
            raise StepSizeError(
                f"purity defect {defect:.3e} at eta = {eta:.6g}; tighten rtol"
            )
        states.append(snap)
        conds.append(_condensates_from_bloch(n, spec))
    return Trajectory(np.array(sol.t), states, conds, profile)


# ---------------------------------------------------------------------------
# Real-space reconstruction
# ---------------------------------------------------------------------------


def real_space_correlation(state: CorrelationState) -> np.ndarray:
    """Dense 2N_S x 2N_S correlation matrix, site-major spinor ordering.

    Gamma_{(i,alpha),(j,beta)} = (1/N_S) sum_k exp(i k (x_i - x_j))
    (Gamma_k)_{alpha beta}, evaluated with an FFT over the block array.
    Row index is 2*i + alpha with alpha in {u, d} = {0, 1}.
    """
    ns = state.spec.num_sites
    blocks = state.blocks  # (N, 2, 2), ordered along the momentum grid
    # k_n = -pi/a + 2 pi n/(N a):  exp(i k_n d a) = (-1)^d exp(2 pi i n d / N)
    g = np.fft.ifft(blocks, axis=0)  # (N, 2, 2) indexed by separation d
    g *= ((-1.0) ** np.arange(ns))[:, None, None]
    d = (np.arange(ns)[:, None] - np.arange(ns)[None, :]) % ns
    full = g[d]  # (N, N, 2, 2)
    out = full.transpose(0, 2, 1, 3).reshape(2 * ns, 2 * ns)
    return 0.5 * (out + out.conj().T)
