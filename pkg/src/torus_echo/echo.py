"""Loschmidt echo M(t) = |<psi| U_{k'}^{-t} U_k^t |psi>|^2 and ensemble
averages over uniformly drawn coherent states."""

from dataclasses import dataclass, field

import numpy as np

from .dynamics import MapParams, apply_propagator, build_propagator, lyapunov_closed_form
from .hilbert import SpaceDescriptor, coherent_state
from .rng import substream


@dataclass(frozen=True)
class PerturbationSpec:
    """Pair of shear amplitudes (k, k') defining perturbation strength
    sigma = k' - k; sigma_over_hbar = 2*pi*N*sigma is the rescaled strength."""

    k: float
    k_prime: float

    @property
    def sigma(self) -> float:
        return self.k_prime - self.k

    def sigma_over_hbar(self, space: SpaceDescriptor) -> float:
        return self.sigma / space.hbar

    @staticmethod
    def from_sigma_over_hbar(space: SpaceDescriptor, k: float, sigma_over_hbar: float) -> "PerturbationSpec":
        return PerturbationSpec(k=k, k_prime=k + sigma_over_hbar * space.hbar)


@dataclass(frozen=True)
class EchoCurve:
    """M(t) for t = 0..t_max, plus the run metadata that produced it."""

    times: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)


def default_echo_t_max(space: SpaceDescriptor, params: MapParams) -> int:
    """Steps for a Lyapunov-rate curve to reach saturation: ceil((ln N + 2)/lambda)."""
    lam = lyapunov_closed_form(params.a, params.b)
    return int(np.ceil((np.log(space.N) + 2.0) / lam))


def le_curve(psi0: np.ndarray, space: SpaceDescriptor, params: MapParams,
             pert: PerturbationSpec, t_max: int) -> EchoCurve:
    """Echo of a single initial state under the (k, k') propagator pair.

    Both branches advance one application per step; cost O(t_max * N log N).
    """
    if t_max < 1:
        raise ValueError(f"t_max must be >= 1, got {t_max}")
    if psi0.shape[0] != space.N:
        raise ValueError(f"state dimension {psi0.shape[0]} != space dimension {space.N}")
    if pert.k != params.k:
        raise ValueError(f"base amplitude mismatch: params.k={params.k}, pert.k={pert.k}")
    prop = build_propagator(space, MapParams(params.a, params.b, pert.k))
    prop_pert = build_propagator(space, MapParams(params.a, params.b, pert.k_prime))
    values = np.empty(t_max + 1)
    values[0] = abs(np.vdot(psi0, psi0)) ** 2
    phi = psi0
    phi_pert = psi0
    for t in range(1, t_max + 1):
        phi = apply_propagator(phi, prop)
        phi_pert = apply_propagator(phi_pert, prop_pert)
        values[t] = abs(np.vdot(phi_pert, phi)) ** 2
    meta = {"N": space.N, "a": params.a, "b": params.b,
            "k": pert.k, "k_prime": pert.k_prime,
            "sigma_over_hbar": pert.sigma_over_hbar(space)}
    return EchoCurve(times=np.arange(t_max + 1), values=values, meta=meta)


def ensemble_centers(seed: int, n_states: int) -> np.ndarray:
    """Coherent-state centers drawn uniformly on [0,1)^2, one substream per
    state index so the draw is independent of evaluation order."""
    return np.array([substream(seed, i).random(2) for i in range(n_states)])


def averaged_le(space: SpaceDescriptor, params: MapParams, pert: PerturbationSpec,
                t_max: int, n_states: int, seed: int) -> EchoCurve:
    """Mean echo over n_states coherent states; summation in state-index
    order, so results are bitwise reproducible for fixed (seed, n_states)."""
    if n_states < 1:
        raise ValueError(f"n_states must be >= 1, got {n_states}")
    centers = ensemble_centers(seed, n_states)
    acc = np.zeros(t_max + 1)
    for q0, p0 in centers:
        psi0 = coherent_state(space, q0, p0)
        acc += le_curve(psi0, space, params, pert, t_max).values
    values = acc / n_states
    meta = {"N": space.N, "a": params.a, "b": params.b,
            "k": pert.k, "k_prime": pert.k_prime,
            "sigma_over_hbar": pert.sigma_over_hbar(space),
            "n_states": n_states, "seed": seed}
    return EchoCurve(times=np.arange(t_max + 1), values=values, meta=meta)
