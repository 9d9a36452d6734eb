"""Multi-mode bosonic Fock states and their evolution through linear optics.

Two independent evolution routines are provided:

* :func:`evolve_permanent` computes every output amplitude as a matrix
  permanent of the row/column-repeated transfer submatrix.
* :func:`evolve_sequential` substitutes each creation operator by its image
  under the transfer matrix and expands the resulting polynomial.

They are mathematically identical and are used to cross-check each other.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from math import factorial, sqrt
from typing import Iterable, Mapping, Sequence

import numpy as np

POLARIZATIONS = ("H", "V")
DEFAULT_N_MAX = 6
PRUNE_THRESHOLD = 1e-14
NORM_EPS = 1e-9


class TruncationError(ValueError):
    """Raised when a state carries more photons than the configured cutoff."""


class RegistryMismatchError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ModeIndex:
    spatial: str
    polarization: str
    internal: int = 0

    def __post_init__(self):
        if self.polarization not in POLARIZATIONS:
            raise ValueError(f"polarization must be H or V, got {self.polarization!r}")
        if self.internal < 0:
            raise ValueError("internal label must be non-negative")

    def __str__(self):
        return f"{self.spatial}:{self.polarization}:{self.internal}"


@dataclass(frozen=True)
class ModeRegistry:
    """Ordered, immutable set of modes with a dense integer index."""

    modes: tuple[ModeIndex, ...]
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        modes = tuple(self.modes)
        object.__setattr__(self, "modes", modes)
        lookup = {}
        for i, m in enumerate(modes):
            if m in lookup:
                raise ValueError(f"duplicate mode {m}")
            lookup[m] = i
        object.__setattr__(self, "_lookup", lookup)

    @classmethod
    def from_ports(cls, ports: Iterable[str], internal: Iterable[int] = (0,)) -> "ModeRegistry":
        internal = tuple(internal)
        return cls(
            tuple(ModeIndex(p, pol, k) for p in ports for k in internal for pol in POLARIZATIONS)
        )

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __contains__(self, mode):
        return mode in self._lookup

    def index(self, mode: ModeIndex | tuple) -> int:
        if not isinstance(mode, ModeIndex):
            mode = ModeIndex(*mode)
        try:
            return self._lookup[mode]
        except KeyError:
            raise KeyError(f"mode {mode} not registered") from None

    @property
    def ports(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(m.spatial for m in self.modes))

    @property
    def internal_labels(self) -> tuple[int, ...]:
        return tuple(sorted({m.internal for m in self.modes}))

    def port_modes(self, port: str) -> list[int]:
        return [i for i, m in enumerate(self.modes) if m.spatial == port]

    def extended(self, extra: Iterable[ModeIndex]) -> "ModeRegistry":
        return ModeRegistry(self.modes + tuple(extra))

    def to_json(self) -> list:
        return [[m.spatial, m.polarization, m.internal] for m in self.modes]

    @classmethod
    def from_json(cls, data) -> "ModeRegistry":
        return cls(tuple(ModeIndex(s, p, int(k)) for s, p, k in data))


@dataclass(frozen=True)
class TransferMatrix:
    """Linear map on creation operators: a_j^dagger -> sum_i M[i, j] a_i^dagger."""

    registry: ModeRegistry
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        n = len(self.registry)
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not match {n} registered modes")
        sv = np.linalg.svd(m, compute_uv=False)
        if sv.size and sv.max() > 1 + 1e-9:
            raise ValueError(f"transfer matrix amplifies (max singular value {sv.max():.12g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def is_unitary(self) -> bool:
        m = self.matrix
        return bool(np.allclose(m.conj().T @ m, np.eye(len(m)), rtol=0, atol=1e-9))

    @property
    def flag(self) -> str:
        return "unitary" if self.is_unitary else "sub-unitary"

    @classmethod
    def identity(cls, registry: ModeRegistry) -> "TransferMatrix":
        return cls(registry, np.eye(len(registry), dtype=complex))

    def then(self, other: "TransferMatrix") -> "TransferMatrix":
        """Apply ``self`` first, then ``other``."""
        _check_registry(self.registry, other.registry)
        return TransferMatrix(self.registry, other.matrix @ self.matrix)


def _check_registry(a: ModeRegistry, b: ModeRegistry):
    if a is not b and a.modes != b.modes:
        raise RegistryMismatchError("mode registries differ")


Occupation = tuple[int, ...]


@dataclass(frozen=True)
class FockState:
    """Sparse superposition of occupation-number basis states.

    Sub-normalized states are legal; the missing norm is the probability of
    branches removed by loss or post-selection.
    """

    registry: ModeRegistry
    terms: Mapping[Occupation, complex]

    def __post_init__(self):
        n = len(self.registry)
        clean = {}
        for occ, amp in self.terms.items():
            occ = tuple(int(k) for k in occ)
            if len(occ) != n:
                raise ValueError(f"occupation {occ} has wrong length for {n} modes")
            if any(k < 0 for k in occ):
                raise ValueError(f"negative occupation {occ}")
            amp = complex(amp)
            if abs(amp) >= PRUNE_THRESHOLD:
                clean[occ] = clean.get(occ, 0) + amp
        object.__setattr__(self, "terms", clean)
        if self.norm_squared() > 1 + NORM_EPS:
            raise ValueError(f"state norm^2 {self.norm_squared()} exceeds 1")

    @classmethod
    def vacuum(cls, registry: ModeRegistry) -> "FockState":
        return cls(registry, {(0,) * len(registry): 1.0})

    @classmethod
    def basis(cls, registry: ModeRegistry, occupation: Mapping) -> "FockState":
        """Basis state from a ``{mode: count}`` map (modes as ModeIndex or tuples)."""
        occ = [0] * len(registry)
        for mode, k in occupation.items():
            occ[registry.index(mode)] += k
        return cls(registry, {tuple(occ): 1.0})

    @classmethod
    def from_creation(cls, registry: ModeRegistry, forms: Sequence[Mapping]) -> "FockState":
        """Apply a product of linear creation forms to the vacuum.

        Each form maps modes to coefficients, e.g. one photon in
        ``(|H> + |V>)/sqrt(2)`` on port ``a`` is
        ``{("a", "H"): 1/sqrt(2), ("a", "V"): 1/sqrt(2)}``.
        """
        idx_forms = []
        for form in forms:
            idx_forms.append({registry.index(m): complex(c) for m, c in form.items()})
        poly = _expand_forms({(): 1.0 + 0j}, idx_forms)
        return cls(registry, _poly_to_terms(poly, len(registry)))

    def __len__(self):
        return len(self.terms)

    def norm_squared(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.terms.values()))

    def normalized(self) -> "FockState":
        n = sqrt(self.norm_squared())
        if n == 0:
            raise ZeroDivisionError("cannot normalize the zero state")
        return FockState(self.registry, {k: v / n for k, v in self.terms.items()})

    def scaled(self, factor: complex) -> "FockState":
        return _raw_state(self.registry, {k: v * factor for k, v in self.terms.items()})

    def __add__(self, other: "FockState") -> "FockState":
        _check_registry(self.registry, other.registry)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return _raw_state(self.registry, out)

    def photon_numbers(self) -> set[int]:
        return {sum(occ) for occ in self.terms}

    def max_photons(self) -> int:
        return max((sum(o) for o in self.terms), default=0)

    def amplitude(self, occupation: Mapping) -> complex:
        occ = [0] * len(self.registry)
        for mode, k in occupation.items():
            occ[self.registry.index(mode)] += k
        return self.terms.get(tuple(occ), 0j)

    def to_json(self) -> str:
        body = {
            "modes": self.registry.to_json(),
            "terms": [[list(o), a.real, a.imag] for o, a in sorted(self.terms.items())],
        }
        return json.dumps(body, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FockState":
        data = json.loads(text)
        reg = ModeRegistry.from_json(data["modes"])
        return cls(reg, {tuple(o): complex(re, im) for o, re, im in data["terms"]})


def _raw_state(registry, terms):
    # unchecked constructor for intermediate, possibly unnormalized arithmetic
    obj = object.__new__(FockState)
    object.__setattr__(obj, "registry", registry)
    object.__setattr__(
        obj, "terms", {k: complex(v) for k, v in terms.items() if abs(v) >= PRUNE_THRESHOLD}
    )
    return obj


def inner_product(a: FockState, b: FockState) -> complex:
    """<a|b> in the orthonormal occupation basis."""
    _check_registry(a.registry, b.registry)
    small, large = (a, b) if len(a.terms) <= len(b.terms) else (b, a)
    total = 0j
    for occ, amp in small.terms.items():
        other = large.terms.get(occ)
        if other is not None:
            total += (amp.conjugate() * other) if small is a else (other.conjugate() * amp)
    return total


# --------------------------------------------------------------------------
# permanents


def permanent(matrix) -> complex:
    """Matrix permanent by Ryser's formula with Gray-code updates, O(2^n n)."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n == 1:
        return complex(m[0, 0])
    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    sign = -1.0 if n % 2 else 1.0  # (-1)^n for the empty set, which contributes 0
    prev_gray = 0
    for k in range(1, 1 << n):
        gray = k ^ (k >> 1)
        changed = gray ^ prev_gray
        j = changed.bit_length() - 1
        if gray & changed:
            row_sums += m[:, j]
        else:
            row_sums -= m[:, j]
        prev_gray = gray
        subset_size = bin(gray).count("1")
        term = np.prod(row_sums)
        total += term if (n - subset_size) % 2 == 0 else -term
    return complex(total)


def permanent_naive(matrix) -> complex:
    """Sum over all permutations; O(n! n). Used as an independent check."""
    m = np.asarray(matrix, dtype=complex)
    n = m.shape[0]
    return complex(
        sum(np.prod([m[i, p[i]] for i in range(n)]) for p in itertools.permutations(range(n)))
    ) if n else 1.0 + 0j


# --------------------------------------------------------------------------
# evolution


def _check_truncation(state: FockState, n_max: int):
    n = state.max_photons()
    if n > n_max:
        raise TruncationError(f"state holds {n} photons, above N_max={n_max}")


def _compositions(n: int, slots: Sequence[int]):
    """All ways to place n indistinguishable photons into the given slots."""
    for combo in itertools.combinations_with_replacement(slots, n):
        yield combo


def evolve_permanent(
    state: FockState, u: TransferMatrix, n_max: int = DEFAULT_N_MAX
) -> FockState:
    """Evolve via amplitudes Per(U[m|n]) / sqrt(prod n_i! prod m_j!)."""
    _check_registry(state.registry, u.registry)
    _check_truncation(state, n_max)
    mat = u.matrix
    nmodes = len(state.registry)
    out: dict[Occupation, complex] = {}
    for occ, amp in state.terms.items():
        cols = [j for j, k in enumerate(occ) for _ in range(k)]
        n = len(cols)
        if n == 0:
            out[occ] = out.get(occ, 0) + amp
            continue
        support = sorted({i for j in set(cols) for i in np.flatnonzero(np.abs(mat[:, j]) > 0)})
        norm_in = np.prod([factorial(k) for k in occ])
        for rows in _compositions(n, support):
            sub = mat[np.ix_(rows, cols)]
            a = permanent(sub)
            if a == 0:
                continue
            out_occ = [0] * nmodes
            for r in rows:
                out_occ[r] += 1
            norm_out = np.prod([factorial(k) for k in out_occ])
            key = tuple(out_occ)
            out[key] = out.get(key, 0) + amp * a / sqrt(norm_in * norm_out)
    return _raw_state(state.registry, out)


# A polynomial in creation operators is stored as {sorted mode-index tuple: coeff}.
# Fock amplitude of occupation m equals coeff * sqrt(prod m_i!).


def _state_to_poly(state: FockState) -> dict:
    poly = {}
    for occ, amp in state.terms.items():
        key = tuple(i for i, k in enumerate(occ) for _ in range(k))
        poly[key] = amp / sqrt(np.prod([factorial(k) for k in occ]))
    return poly


def _poly_to_terms(poly: Mapping, nmodes: int) -> dict:
    terms = {}
    for key, c in poly.items():
        occ = [0] * nmodes
        for i in key:
            occ[i] += 1
        terms[tuple(occ)] = terms.get(tuple(occ), 0) + c * sqrt(
            np.prod([factorial(k) for k in occ])
        )
    return terms


def _expand_forms(poly: Mapping, forms: Sequence[Mapping[int, complex]]) -> dict:
    for form in forms:
        nxt: dict = {}
        for key, c in poly.items():
            for i, f in form.items():
                new = tuple(sorted(key + (i,)))
                nxt[new] = nxt.get(new, 0) + c * f
        poly = {k: v for k, v in nxt.items() if abs(v) >= PRUNE_THRESHOLD * 1e-3}
    return dict(poly)


def evolve_sequential(
    state: FockState, u: TransferMatrix, n_max: int = DEFAULT_N_MAX
) -> FockState:
    """Evolve by rewriting a_i^dagger -> sum_j u[j, i] b_j^dagger and expanding."""
    _check_registry(state.registry, u.registry)
    _check_truncation(state, n_max)
    mat = u.matrix
    images = [
        {int(j): complex(mat[j, i]) for j in np.flatnonzero(np.abs(mat[:, i]) > 0)}
        for i in range(mat.shape[1])
    ]
    out: dict = {}
    for key, c in _state_to_poly(state).items():
        expanded = _expand_forms({(): c}, [images[i] for i in key])
        for k, v in expanded.items():
            out[k] = out.get(k, 0) + v
    return _raw_state(state.registry, _poly_to_terms(out, len(state.registry)))


evolve = evolve_sequential


def dilate(u: TransferMatrix, loss_port: str = "loss") -> tuple[TransferMatrix, ModeRegistry]:
    """Embed a sub-unitary transfer matrix in a unitary on extra loss modes.

    Returns the unitary on ``registry + loss modes`` whose upper-left block is
    ``u``. Loss modes are labelled ``(loss_port + str(k), "H", 0)``.
    """
    m = u.matrix
    n = len(m)
    _, s, vh = np.linalg.svd(m)
    defect = np.sqrt(np.clip(1 - s**2, 0, None))
    keep = defect > 1e-12
    r = int(keep.sum())
    extra = [ModeIndex(f"{loss_port}{k}", "H", 0) for k in range(r)]
    reg = u.registry.extended(extra)
    iso = np.vstack([m, defect[keep, None] * vh[keep]])  # (n + r) x n isometry
    full = np.zeros((n + r, n + r), dtype=complex)
    full[:, :n] = iso
    if r:
        # orthonormal complement of the isometry's column space
        w, v = np.linalg.eigh(np.eye(n + r) - iso @ iso.conj().T)
        full[:, n:] = v[:, w > 0.5]
    return TransferMatrix(reg, full), reg


def lift_state(state: FockState, registry: ModeRegistry) -> FockState:
    """Re-express a state on a registry that contains all of its modes."""
    mapping = [registry.index(m) for m in state.registry.modes]
    out = {}
    for occ, amp in state.terms.items():
        new = [0] * len(registry)
        for i, k in enumerate(occ):
            new[mapping[i]] += k
        out[tuple(new)] = amp
    return _raw_state(registry, out)


def product_of_factors(registry: ModeRegistry, factors: Sequence[Sequence]) -> FockState:
    """State built from a product of creation polynomials acting on vacuum.

    Each factor is a list of ``(coefficient, modes)`` terms, where ``modes``
    is a sequence of mode labels whose creation operators are multiplied.
    A Bell pair ``(HH + VV)/sqrt(2)`` on ports a, b is
    ``[(r, [("a","H"), ("b","H")]), (r, [("a","V"), ("b","V")])]``.
    """
    poly = {(): 1.0 + 0j}
    for factor in factors:
        nxt: dict = {}
        for coef, modes in factor:
            idx = tuple(registry.index(m) for m in modes)
            for key, c in poly.items():
                new = tuple(sorted(key + idx))
                nxt[new] = nxt.get(new, 0) + c * complex(coef)
        poly = nxt
    return _raw_state(registry, _poly_to_terms(poly, len(registry)))
