"""Closed-form quasi-particle predictions for entropy growth and contours.

Entangled particle-antiparticle pairs propagate ballistically at +-v_k
and carry entropy s(k); the block entropy and its contour follow from
counting pairs straddling the partition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import Trajectory
from .lattice import LatticeSpec, group_velocity, band_velocity
from .production import ProductionSpectrum, mode_pair_entropy


class NonEquilibratedWindowError(RuntimeError):
    """Condensates still oscillate over the requested averaging window."""


@dataclass
class QPInput:
    """Per-momentum velocities and pair entropies feeding the predictions.

    ``k`` must be the (sorted ascending) Brillouin-zone grid; ``v`` and
    ``s_pair`` are interpolated periodically onto a refined grid by the
    quadratures.  ``out_of_validity`` tags inputs taken from
    persistent-oscillation regimes where the picture is known to fail.
    """

    k: np.ndarray
    v: np.ndarray
    s_pair: np.ndarray
    block_length: float
    spacing: float = 1.0
    out_of_validity: bool = False

    def __post_init__(self):
        if np.any(self.v < 0):
            raise ValueError("velocities must be nonnegative")
        if np.any(self.s_pair < -1e-12) or np.any(self.s_pair > 2 * np.log(2) + 1e-9):
            raise ValueError("pair entropies must lie in [0, 2 log 2]")

    @property
    def v_max(self) -> float:
        """Maximum entanglement-spreading speed, 2 max_k v_k."""
        return 2.0 * float(np.max(self.v))

    def refined(self, n_points=4096):
        """Periodic interpolation of v and s onto >= n_points BZ momenta."""
        n = max(int(n_points), 2 * self.k.size)
        kk = np.linspace(-np.pi / self.spacing, np.pi / self.spacing, n, endpoint=False)
        period = 2.0 * np.pi / self.spacing
        k_ext = np.concatenate([self.k, [self.k[0] + period]])
        v_ext = np.concatenate([self.v, [self.v[0]]])
        s_ext = np.concatenate([self.s_pair, [self.s_pair[0]]])
        return kk, np.interp(kk, k_ext, v_ext), np.interp(kk, k_ext, s_ext)


def qp_input_from_spectrum(
    spectrum: ProductionSpectrum,
    spec: LatticeSpec,
    block_length: float,
    out_of_validity: bool = False,
) -> QPInput:
    """Assemble a QPInput from a production spectrum and its reference dispersion."""
    ma_eff, sigma, pi = spectrum.reference
    v = band_velocity(spectrum.k, ma_eff, sigma, pi, spec.spacing)
    _, s_pair = mode_pair_entropy(spectrum.beta_sq)
    return QPInput(
        k=spectrum.k,
        v=v,
        s_pair=s_pair,
        block_length=float(block_length),
        spacing=spec.spacing,
        out_of_validity=out_of_validity,
    )


def qp_entropy(qp: QPInput, eta: float, n_points: int = 4096) -> float:
    """Quasi-particle block entropy at conformal time eta.

    S_A(eta) = eta * int_{2 v eta < l} dk/2pi 2 v s(k)
             + l  * int_{2 v eta > l} dk/2pi   s(k);
    the first term counts pairs still straddling a single boundary
    (linear growth), the second the saturated modes (volume-law plateau).
    Trapezoidal quadrature on a refined periodic grid.
    """
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if eta == 0.0:
        return 0.0
    kk, v, s = qp.refined(n_points)
    dk = kk[1] - kk[0]
    growing = 2.0 * v * eta < qp.block_length
    integrand = np.where(growing, eta * 2.0 * v * s, qp.block_length * s)
    return float(np.sum(integrand) * dk / (2.0 * np.pi))


def qp_plateau(qp: QPInput, n_points: int = 4096) -> float:
    """Late-time plateau l_A int s dk / 2pi."""
    kk, _, s = qp.refined(n_points)
    return float(qp.block_length * np.sum(s) * (kk[1] - kk[0]) / (2.0 * np.pi))


def qp_contour(qp: QPInput, eta: float, x, n_points: int = 4096):
    """Quasi-particle contour at depth x into the block (spinor-summed).

    S_A(x) = int dk/2pi s(k) [Theta(2 v_k eta - x)
                              + Theta(2 v_k eta - (l_A - x))],
    with sharp step functions.  The per-spinor prediction is half this
    value.  ``x`` may be an array; values are clipped to [0, l_A].
    """
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    x = np.asarray(x, dtype=float)
    if np.any(x < -1e-12) or np.any(x > qp.block_length + 1e-12):
        raise ValueError("x must lie within the block")
    kk, v, s = qp.refined(n_points)
    dk = kk[1] - kk[0]
    reach = 2.0 * v * eta
    left = reach[None, :] >= x.reshape(-1, 1)
    right = reach[None, :] >= (qp.block_length - x).reshape(-1, 1)
    out = (s[None, :] * (left.astype(float) + right)).sum(axis=1) * dk / (2.0 * np.pi)
    return out if x.ndim else float(out[0])


def condensate_persistence(trajectory: Trajectory, which: str = "sigma") -> float:
    """Late-time / early-time oscillation amplitude ratio of a condensate.

    Amplitudes are standard deviations over the first [5%, 30%] and the
    final quarter of the trajectory.  Damped post-quench transients give
    a small ratio; the synchronized non-equilibrating oscillations of the
    parity-broken regime keep it near one.
    """
    etas = trajectory.etas
    vals = np.array([getattr(c, which) for c in trajectory.condensates])
    t0, t1 = etas[0], etas[-1]
    span = t1 - t0
    early = (etas >= t0 + 0.05 * span) & (etas <= t0 + 0.30 * span)
    late = etas >= t0 + 0.75 * span
    if np.count_nonzero(early) < 4 or np.count_nonzero(late) < 4:
        raise ValueError("trajectory too sparsely sampled for persistence")
    early_amp = float(np.std(vals[early]))
    if early_amp == 0.0:
        return 0.0
    return float(np.std(vals[late])) / early_amp


def renormalized_velocity(
    trajectory: Trajectory,
    spec: LatticeSpec,
    a_f: float,
    window,
    persistence_threshold: float = 0.5,
):
    """Group velocity of the condensate-dressed dispersion after equilibration.

    Averages Sigma and Pi over the window [window[0], window[1]] of the
    trajectory, rebuilds the dispersion at ma_eff = m a_f + mean(Sigma),
    Pi = mean(Pi), and returns its group velocity.  Refuses when the
    scalar condensate's oscillations persist (late-time amplitude above
    ``persistence_threshold`` of the early amplitude) instead of damping
    out, which is the regime where the picture is known to fail.
    """
    etas = trajectory.etas
    mask = (etas >= window[0]) & (etas <= window[1])
    if np.count_nonzero(mask) < 2:
        raise ValueError("window contains fewer than two trajectory samples")
    persistence = condensate_persistence(trajectory, "sigma")
    if persistence > persistence_threshold:
        raise NonEquilibratedWindowError(
            f"Sigma oscillations persist (late/early amplitude ratio "
            f"{persistence:.2f}); the quasi-particle picture does not apply"
        )
    sig = np.array([c.sigma for c in trajectory.condensates])[mask]
    pi = np.array([c.pi for c in trajectory.condensates])[mask]
    return group_velocity(
        spec.mass * a_f, float(np.mean(sig)), float(np.mean(pi)), spec.spacing
    )


def horizon_width(block_length: float, v_g: float, hubble: float, a_0: float) -> float:
    """Width of the causally dark central band, Delta x = l_A - 4 v_g/(H a_0).

    Nonpositive values mean the cones meet and no disconnected region
    survives.
    """
    if hubble <= 0 or a_0 <= 0:
        raise ValueError("hubble and a_0 must be positive")
    return float(block_length - 4.0 * v_g / (hubble * a_0))
