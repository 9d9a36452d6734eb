"""Photon sources: ideal encoded inputs, multi-pair emission, distinguishability.

Two down-conversion sources feed the gate. Source E emits the entangled
control pair on (C1, C2); source S emits the target pair on (T1, T2). Each
source is modelled as a truncated two-mode squeezed vacuum
``N^{-1/2} sum_n eps^n K^n / n! |0>`` where ``K`` is the pair creation
polynomial. Sectors with the same total photon number are kept as one
coherent superposition.

Partial distinguishability uses one extra internal mode: photons from source
E occupy internal label 0, photons from source S occupy
``s|0> + sqrt(1 - s^2)|1>``, so two-photon interference between the sources
has visibility ``s^2``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import factorial, sqrt
from typing import Mapping, Sequence

import numpy as np

from . import fock
from .circuits import CircuitSpec, build_cswap_simplified, logical_qubit_poly
from .fock import FockState

POL = ("V", "H")  # logical 0, 1


class SourceError(ValueError):
    pass


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SourceConfig:
    """Physical source parameters.

    ``n_max_pairs`` bounds the total number of pairs from both sources, so
    ``2 * n_max_pairs`` photons must fit under the Fock cutoff.
    ``contamination``, when set, fixes ``epsilon`` so that this fraction of
    four-fold coincidences comes from three-pair emission.
    """

    epsilon: float = 0.0
    n_max_pairs: int = 2
    overlap: float = 1.0
    entangled_state_fidelity: float = 1.0
    components: Mapping[str, Mapping[str, float]] = field(default_factory=dict)
    contamination: float | None = None
    n_max: int = fock.DEFAULT_N_MAX

    def __post_init__(self):
        if self.epsilon < 0:
            raise SourceError("epsilon must be non-negative")
        if not 0.0 <= self.overlap <= 1.0:
            raise SourceError("overlap s must lie in [0, 1]")
        if self.n_max_pairs < 1 or 2 * self.n_max_pairs > self.n_max:
            raise SourceError(f"n_max_pairs={self.n_max_pairs} does not fit N_max={self.n_max}")
        if not 0.25 < self.entangled_state_fidelity <= 1.0:
            raise SourceError("entangled-state fidelity must lie in (1/4, 1]")
        if self.contamination is not None and not 0.0 <= self.contamination < 1.0:
            raise SourceError("contamination must lie in [0, 1)")


# --------------------------------------------------------------------------
# qubit and pair polynomials


def _check_qubit(v, name):
    v = np.asarray(v, dtype=complex)
    if v.shape != (2,) or abs(np.linalg.norm(v) - 1) > 1e-9:
        raise SourceError(f"{name} must be a normalized 2-vector, got {v}")
    return v


def _with_internal(poly, label_amps: Sequence[tuple[int, complex]]):
    """Spread every photon of ``poly`` over internal labels with given amplitudes."""
    out = []
    for coef, modes in poly:
        terms = [(complex(coef), [])]
        for m in modes:
            terms = [
                (c * a, ms + [(m[0], m[1], k)]) for c, ms in terms for k, a in label_amps if a != 0
            ]
        out.extend(terms)
    return out


def _translate(poly, port_map):
    return [(c, [(port_map[m[0]],) + tuple(m[1:]) for m in modes]) for c, modes in poly]


def pair_vector(spec: CircuitSpec, control) -> np.ndarray:
    """Two-photon polarization vector of the encoded control on (C1, C2).

    Basis order is logical |00>, |01>, |10>, |11> of (C1, C2) photons with
    0 = V and 1 = H.
    """
    control = _check_qubit(control, "control")
    vec = np.zeros(4, dtype=complex)
    for coef, modes in logical_qubit_poly(spec.logical_inputs[0], control):
        pols = dict((m[0], m[1]) for m in modes)
        vec[2 * POL.index(pols["C1"]) + POL.index(pols["C2"])] += coef
    return vec


def pair_poly(vec) -> list:
    return [
        (c, [("C1", POL[i // 2]), ("C2", POL[i % 2])]) for i, c in enumerate(vec) if abs(c) > 0
    ]


def target_poly(spec: CircuitSpec, t1, t2) -> list:
    t1 = _check_qubit(t1, "t1")
    t2 = _check_qubit(t2, "t2")
    p1 = logical_qubit_poly(spec.logical_inputs[1], t1)
    p2 = logical_qubit_poly(spec.logical_inputs[2], t2)
    return [(a * b, m1 + m2) for a, m1 in p1 for b, m2 in p2]


# --------------------------------------------------------------------------
# source states


@dataclass(frozen=True)
class SourceState:
    """Input state of the gate with sector bookkeeping.

    ``sectors`` maps (pairs from E, pairs from S) to the corresponding
    unnormalized component; ``state`` is their sum. The two sources have no
    locked relative phase, so detection statistics should add the sectors
    in probability. ``norm_e`` and ``norm_s`` are the per-source
    normalizations, needed to rescale a sector to a run with the other
    source blocked.
    """

    state: FockState
    sectors: Mapping[tuple[int, int], FockState]
    spec: CircuitSpec
    truncation_loss: float = 0.0
    norm_e: float = 1.0
    norm_s: float = 1.0

    @property
    def photon_numbers(self):
        return self.state.photon_numbers()

    def only(self, source: str) -> "SourceState":
        """The state seen when the other source is blocked.

        The blocked source is in vacuum with certainty, so its normalization
        drops out of the kept sectors.
        """
        if source not in ("E", "S"):
            raise SourceError(f"unknown source {source!r}")
        scale = sqrt(self.norm_s if source == "E" else self.norm_e)
        keep = {
            k: v.scaled(scale) for k, v in self.sectors.items() if (k[1] == 0 if source == "E" else k[0] == 0)
        }
        reg = self.state.registry
        total = fock._raw_state(reg, {})
        for v in keep.values():
            total = total + v
        n_e, n_s = (self.norm_e, 1.0) if source == "E" else (1.0, self.norm_s)
        return SourceState(total, keep, self.spec, self.truncation_loss, n_e, n_s)


def _registry_spec(spec: CircuitSpec, overlap: float) -> CircuitSpec:
    internal = (0,) if overlap >= 1.0 else (0, 1)
    return spec if spec.internal == internal else spec.with_internal(internal)


def _power_norms(registry, poly, n_max):
    """||K^n |0> / n!||^2 for n = 0..n_max."""
    out = [1.0]
    for n in range(1, n_max + 1):
        st = fock.product_of_factors(registry, [poly] * n)
        out.append(st.norm_squared() / factorial(n) ** 2)
    return out


def source_state(
    spec: CircuitSpec,
    pair_vec,
    targets: list,
    epsilon: float = 0.0,
    n_max_pairs: int = 1,
    overlap: float = 1.0,
    blocked: str | None = None,
) -> SourceState:
    """Multi-pair input for a given control-pair vector and target polynomial.

    With ``epsilon == 0`` only the (1, 1) sector is kept, which is the ideal
    four-photon input. ``blocked`` ("E" or "S") switches one source off.
    """
    spec = _registry_spec(spec, overlap)
    reg = spec.registry
    k_e = _with_internal(pair_poly(pair_vec), [(0, 1.0)])
    labels = [(0, overlap)] if overlap >= 1.0 else [(0, overlap), (1, sqrt(1 - overlap**2))]
    k_s = _with_internal(targets, labels)
    k_e = _translate(k_e, spec.inputs)
    k_s = _translate(k_s, spec.inputs)

    if epsilon == 0:
        st = fock.product_of_factors(reg, [k_e, k_s])
        return SourceState(st, {(1, 1): st}, spec)

    max_e = 0 if blocked == "E" else n_max_pairs
    max_s = 0 if blocked == "S" else n_max_pairs
    norms_e = _power_norms(reg, k_e, n_max_pairs + 1) if max_e else [1.0]
    norms_s = _power_norms(reg, k_s, n_max_pairs + 1) if max_s else [1.0]
    n_e = sum(epsilon ** (2 * n) * norms_e[n] for n in range(max_e + 1))
    n_s = sum(epsilon ** (2 * n) * norms_s[n] for n in range(max_s + 1))
    kept = 0.0
    sectors = {}
    for ne in range(max_e + 1):
        for ns in range(max_s + 1):
            if ne + ns > n_max_pairs or ne + ns == 0:
                continue
            amp = epsilon ** (ne + ns) / (factorial(ne) * factorial(ns) * sqrt(n_e * n_s))
            st = fock.product_of_factors(reg, [k_e] * ne + [k_s] * ns).scaled(amp)
            sectors[(ne, ns)] = st
            kept += st.norm_squared()
    # leading dropped terms: one more pair than allowed
    dropped = 0.0
    for ne in range(max_e + 1):
        ns = n_max_pairs + 1 - ne
        if 0 <= ns <= max_s:
            ne_norm = norms_e[ne] if ne < len(norms_e) else 0.0
            ns_norm = norms_s[ns] if ns < len(norms_s) else 0.0
            dropped += epsilon ** (2 * (ne + ns)) * ne_norm * ns_norm / (n_e * n_s)
    if kept > 0 and dropped > 1e-6 * kept:
        warnings.warn(
            f"pair truncation at {n_max_pairs} drops relative norm {dropped / kept:.2e}",
            TruncationWarning,
            stacklevel=2,
        )
    total = fock._raw_state(reg, {})
    for v in sectors.values():
        total = total + v
    return SourceState(total, sectors, spec, dropped, n_e, n_s)


def ideal_input(control, t1, t2, spec: CircuitSpec | None = None) -> SourceState:
    """Encoded control pair times the two target photons, exactly four photons."""
    spec = spec or build_cswap_simplified()
    return source_state(spec, pair_vector(spec, control), target_poly(spec, t1, t2))


def spdc_multipair_state(
    config: SourceConfig, control, t1, t2, spec: CircuitSpec | None = None, blocked=None
) -> SourceState:
    spec = spec or build_cswap_simplified()
    return source_state(
        spec,
        pair_vector(spec, control),
        target_poly(spec, t1, t2),
        epsilon=config.epsilon,
        n_max_pairs=config.n_max_pairs,
        overlap=config.overlap,
        blocked=blocked,
    )


def apply_distinguishability(state: SourceState, s: float, control, t1, t2, epsilon=0.0, n_max_pairs=1):
    """Rebuild ``state``'s input with inter-source overlap ``s``."""
    if not 0.0 <= s <= 1.0:
        raise SourceError("overlap s must lie in [0, 1]")
    spec = state.spec.with_internal((0,))
    return source_state(
        spec, pair_vector(spec, control), target_poly(spec, t1, t2), epsilon, n_max_pairs, s
    )


def hom_visibility(s: float) -> float:
    """Two-photon interference visibility of one photon per source on a 50:50 BS."""
    from .elements import ElementSpec

    reg = fock.ModeRegistry.from_ports(("a", "b"), (0, 1))
    photon_b = [(s, [("b", "H", 0)])]
    if s < 1:
        photon_b.append((sqrt(1 - s**2), [("b", "H", 1)]))
    st = fock.product_of_factors(reg, [[(1.0, [("a", "H", 0)])], photon_b])
    bs = ElementSpec("BS", {"R": 0.5}, ("a", "b"))
    out = fock.evolve(st, fock.TransferMatrix(reg, bs.matrix(reg)))
    a_modes = set(reg.port_modes("a"))
    p_coinc = sum(
        abs(v) ** 2
        for occ, v in out.terms.items()
        if sum(occ[i] for i in a_modes) == 1
    )
    return 1 - p_coinc / 0.5


# --------------------------------------------------------------------------
# imperfect entangled pair


PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / sqrt(2)


def werner_lambda(fidelity: float) -> float:
    if not 0.25 < fidelity <= 1.0:
        raise SourceError(f"Werner fidelity {fidelity} outside (1/4, 1]")
    return (4 * fidelity - 1) / 3


def imperfect_entangled_pair(fidelity_target: float, target=PHI_PLUS) -> np.ndarray:
    """Werner mixture lam |psi><psi| + (1 - lam) I/4 with <psi|rho|psi> = target."""
    lam = werner_lambda(fidelity_target)
    psi = np.asarray(target, dtype=complex)
    return lam * np.outer(psi, psi.conj()) + (1 - lam) * np.eye(4) / 4


def werner_components(fidelity: float, psi) -> list[tuple[float, np.ndarray]]:
    """Eigen-decomposition of the Werner state around ``psi`` as (weight, vector)."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    lam = werner_lambda(fidelity)
    if lam >= 1.0:
        return [(1.0, psi)]
    # orthonormal completion of psi, deterministic
    basis = np.eye(4, dtype=complex)
    q, _ = np.linalg.qr(np.column_stack([psi, basis]))
    comps = [(lam + (1 - lam) / 4, psi)]
    for j in range(1, 4):
        v = q[:, j]
        v = v - np.vdot(psi, v) * psi
        v /= np.linalg.norm(v)
        k = int(np.argmax(np.abs(v) > 1e-12))
        v *= abs(v[k]) / v[k]  # fix phase: first nonzero entry real positive
        comps.append(((1 - lam) / 4, v))
    return comps


def calibrate_epsilon(contamination: float, p4: float, p6: float) -> float:
    """Pair amplitude giving the requested three-pair share of four-folds.

    ``p4`` and ``p6`` are the four-fold probabilities of the two- and
    three-pair sectors evaluated at unit amplitude (so they scale as
    eps^4 and eps^6).
    """
    if contamination <= 0:
        return 0.0
    if p6 <= 0:
        raise SourceError("three-pair sector never produces four-fold events")
    return sqrt(contamination / (1 - contamination) * p4 / p6)


__all__ = [
    "SourceConfig",
    "SourceState",
    "TruncationWarning",
    "apply_distinguishability",
    "calibrate_epsilon",
    "hom_visibility",
    "ideal_input",
    "imperfect_entangled_pair",
    "pair_vector",
    "source_state",
    "spdc_multipair_state",
    "werner_components",
    "werner_lambda",
]
