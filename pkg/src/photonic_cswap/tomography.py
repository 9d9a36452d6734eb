"""Two-qubit state tomography from Pauli-basis coincidence counts.

Each of the nine settings measures both photons in one of the X, Y, Z
eigenbases and records the four outcome counts. Outcome 0 is the +1
eigenvector. Linear inversion gives a Hermitian, unit-trace estimate that
may have negative eigenvalues; :func:`project_psd` maps it to the closest
physical state in Frobenius norm.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .measurement import CountRecord, records_from_csv, records_to_csv, setting_seed
from .metrics import X, Y, Z, check_density_matrix

PAULIS = {"I": np.eye(2, dtype=complex), "X": X, "Y": Y, "Z": Z}
BASES = ("X", "Y", "Z")
SETTINGS = tuple(a + b for a, b in itertools.product(BASES, BASES))


class TomographyError(ValueError):
    pass


def _eigvecs(basis: str) -> np.ndarray:
    """Columns are the +1 and -1 eigenvectors (outcomes 0, 1)."""
    r = 1 / np.sqrt(2)
    if basis == "Z":
        return np.eye(2, dtype=complex)
    if basis == "X":
        return np.array([[r, r], [r, -r]], dtype=complex)
    return np.array([[r, r], [1j * r, -1j * r]], dtype=complex)


def born_probabilities(rho: np.ndarray, setting: str) -> np.ndarray:
    b = np.kron(_eigvecs(setting[0]), _eigvecs(setting[1]))
    p = np.einsum("ij,jk,ki->i", b.conj().T, rho, b).real
    return np.clip(p, 0.0, None)


@dataclass
class TomographyDataset:
    """Outcome counts (or exact probabilities) per two-letter setting."""

    counts: dict = field(default_factory=dict)
    shots: int | None = None
    seed: int | None = None

    def __post_init__(self):
        for k, v in self.counts.items():
            v = np.asarray(v, dtype=float)
            if v.shape != (4,) or np.any(v < 0):
                raise TomographyError(f"setting {k} needs four non-negative entries")
            self.counts[k] = v

    def to_records(self) -> list[CountRecord]:
        out = []
        for k in sorted(self.counts):
            for i, c in enumerate(self.counts[k]):
                out.append(CountRecord(k, format(i, "02b"), int(round(c)), self.shots or 0, self.seed))
        return out

    def to_csv(self) -> str:
        return records_to_csv(self.to_records())

    @classmethod
    def from_csv(cls, text: str) -> "TomographyDataset":
        recs = records_from_csv(text)
        counts: dict = {}
        shots = seed = None
        for r in recs:
            counts.setdefault(r.setting_id, np.zeros(4))[int(r.outcome, 2)] = r.count
            shots, seed = r.shots, r.seed
        return cls(counts, shots, seed)


def simulate_tomography(rho, shots: int | None, seed: int = 0) -> TomographyDataset:
    """Counts per setting from exact Born probabilities.

    ``shots=None`` stores the exact probabilities instead of a sample.
    """
    rho = check_density_matrix(rho)
    if rho.shape != (4, 4):
        raise TomographyError("two-qubit density matrix required")
    data = {}
    for s in SETTINGS:
        p = born_probabilities(rho, s)
        if shots is None:
            data[s] = p
        else:
            rng = np.random.default_rng(setting_seed(seed, s))
            data[s] = rng.multinomial(shots, p / p.sum()).astype(float)
    return TomographyDataset(data, shots, seed)


def _expectations(data: TomographyDataset) -> dict:
    missing = set(SETTINGS) - set(data.counts)
    if missing:
        raise TomographyError(f"incomplete settings, missing {sorted(missing)}")
    sign_a = np.array([1, 1, -1, -1])
    sign_b = np.array([1, -1, 1, -1])
    ev: dict = {"II": [1.0]}
    for s in SETTINGS:
        c = data.counts[s]
        tot = c.sum()
        if tot <= 0:
            raise TomographyError(f"setting {s} has no counts")
        p = c / tot
        ev.setdefault(s, []).append(float(sign_a * sign_b @ p))
        ev.setdefault(s[0] + "I", []).append(float(sign_a @ p))
        ev.setdefault("I" + s[1], []).append(float(sign_b @ p))
    # single-qubit terms are seen in three settings each; average them
    return {k: float(np.mean(v)) for k, v in ev.items()}


def reconstruct_linear(data: TomographyDataset) -> np.ndarray:
    """rho = 1/4 sum <s_i s_j> s_i (x) s_j."""
    ev = _expectations(data)
    rho = np.zeros((4, 4), dtype=complex)
    for k, v in ev.items():
        rho += v * np.kron(PAULIS[k[0]], PAULIS[k[1]])
    rho /= 4
    return (rho + rho.conj().T) / 2


def project_psd(rho_raw: np.ndarray) -> np.ndarray:
    """Closest unit-trace PSD matrix in Frobenius norm.

    Eigenvalues are projected onto the probability simplex by truncating
    the most negative ones and spreading the deficit over the rest.
    """
    rho = np.asarray(rho_raw, dtype=complex)
    rho = (rho + rho.conj().T) / 2
    w, v = np.linalg.eigh(rho)
    if w.min() >= 0 and abs(w.sum() - 1) < 1e-12:
        return rho
    order = np.argsort(w)[::-1]  # descending, stable tie-break by eigh order
    w, v = w[order], v[:, order]
    new = np.zeros_like(w)
    n = len(w)
    # largest k with w_k - (sum_{j<=k} w_j - 1)/k > 0
    cs = np.cumsum(w)
    k = max(i + 1 for i in range(n) if w[i] - (cs[i] - 1) / (i + 1) > 0)
    shift = (cs[k - 1] - 1) / k
    new[:k] = w[:k] - shift
    # deterministic eigenvector phases: largest-magnitude entry real positive
    for j in range(n):
        col = v[:, j]
        i = int(np.argmax(np.abs(col) - 1e-12 * np.arange(n)))
        v[:, j] = col * (abs(col[i]) / col[i])
    return (v * new) @ v.conj().T


def reconstruct_ml(data: TomographyDataset, iterations: int = 2000, tol: float = 1e-12) -> np.ndarray:
    """Iterative R rho R maximum-likelihood refinement from the PSD linear estimate."""
    projectors, freqs = [], []
    for s in SETTINGS:
        c = data.counts[s]
        b = np.kron(_eigvecs(s[0]), _eigvecs(s[1]))
        for i in range(4):
            projectors.append(np.outer(b[:, i], b[:, i].conj()))
            freqs.append(c[i])
    freqs = np.array(freqs, dtype=float)
    freqs /= freqs.sum()
    proj = np.array(projectors)
    rho = project_psd(reconstruct_linear(data))
    rho = 0.9 * rho + 0.1 * np.eye(4) / 4  # stay off the boundary
    for _ in range(iterations):
        p = np.einsum("kij,ji->k", proj, rho).real
        weights = np.where(p > 1e-15, freqs / np.maximum(p, 1e-15), 0.0)
        R = np.einsum("k,kij->ij", weights, proj)
        new = R @ rho @ R
        new /= np.trace(new).real
        if np.linalg.norm(new - rho) < tol:
            rho = new
            break
        rho = new
    return (rho + rho.conj().T) / 2


def negative_eigenvalues(rho: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    w = np.linalg.eigvalsh(rho)
    return w[w < -tol]
