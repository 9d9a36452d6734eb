"""Circuit description, compilation and the prebuilt gate constructions.

A circuit acts on named spatial lines. Each input role (``T1``, ``C1``...)
enters on a line and each output role leaves on a line; the two maps differ
whenever a fully reflecting element moves a photon onto another line.

Qubits are polarization encoded with ``|0> = V`` and ``|1> = H`` unless a
builder states otherwise.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from math import pi, sqrt
from typing import Mapping, Sequence

import numpy as np

from . import fock
from .elements import ElementSpec, analyzer_jones
from .fock import FockState, ModeIndex, ModeRegistry, TransferMatrix

SCHEMA_VERSION = 1
R2 = 1 / sqrt(2)

# Jones vectors in (H, V) order
H_VEC = (1.0, 0.0)
V_VEC = (0.0, 1.0)
P_VEC = (R2, R2)
M_VEC = (R2, -R2)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


class CircuitError(ValueError):
    pass


# A creation polynomial: list of (coefficient, [(port, pol), ...]) terms.
Poly = list


def _poly_json(poly):
    out = []
    for coef, modes in poly:
        c = complex(coef)
        out.append([[c.real, c.imag], [list(m) for m in modes]])
    return out


def _poly_from_json(data):
    return [(complex(c[0], c[1]), [tuple(m) for m in modes]) for c, modes in data]


def _vec_json(v):
    return [[complex(x).real, complex(x).imag] for x in v]


def _vec_from_json(data):
    return tuple(complex(a, b) for a, b in data)


@dataclass(frozen=True)
class LogicalInput:
    """One input qubit: the creation polynomials preparing |0> and |1>."""

    name: str
    zero: Poly
    one: Poly

    def state(self, bit: int) -> Poly:
        return self.one if bit else self.zero


@dataclass(frozen=True)
class LogicalOutput:
    """One output qubit read from a single photon on ``role``."""

    name: str
    role: str
    zero: tuple = V_VEC
    one: tuple = H_VEC


@dataclass(frozen=True)
class Branch:
    """A heralded post-selection branch.

    ``projections`` maps output roles to the Jones vector the photon there
    must be found in. ``corrections`` maps output qubit names to the Pauli
    applied by feed-forward when this branch fires.
    """

    projections: Mapping[str, tuple] = field(default_factory=dict)
    corrections: Mapping[str, str] = field(default_factory=dict)


def photon(port: str, vec) -> Poly:
    """Single photon on ``port`` with Jones vector ``vec`` = (h, v)."""
    h, v = vec
    return [(c, [(port, pol)]) for c, pol in ((h, "H"), (v, "V")) if c != 0]


def photon_pair(p1: str, p2: str, terms) -> Poly:
    """Two-photon polynomial from ``[(coef, pol1, pol2), ...]``."""
    return [(c, [(p1, a), (p2, b)]) for c, a, b in terms]


@dataclass(frozen=True)
class CircuitSpec:
    name: str
    ports: tuple[str, ...]
    elements: tuple[ElementSpec, ...]
    inputs: Mapping[str, str]
    outputs: Mapping[str, str]
    logical_inputs: tuple[LogicalInput, ...] = ()
    logical_outputs: tuple[LogicalOutput, ...] = ()
    ancillas: tuple[Poly, ...] = ()
    branches: tuple[Branch, ...] = (Branch(),)
    internal: tuple[int, ...] = (0,)
    n_max: int = fock.DEFAULT_N_MAX
    ideal: str | None = None  # name of the ideal logical gate, if any

    def __post_init__(self):
        object.__setattr__(self, "ports", tuple(self.ports))
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "internal", tuple(self.internal))
        known = set(self.ports)
        for el in self.elements:
            bad = set(el.ports) - known
            if bad:
                raise CircuitError(f"element {el.kind} references unregistered ports {sorted(bad)}")
        for m in (self.inputs, self.outputs):
            bad = set(m.values()) - known
            if bad:
                raise CircuitError(f"port map references unregistered ports {sorted(bad)}")
        roles = set(self.outputs)
        for q in self.logical_outputs:
            if q.role not in roles:
                raise CircuitError(f"logical output {q.name} reads unknown role {q.role}")
        for b in self.branches:
            bad = set(b.projections) - roles
            if bad:
                raise CircuitError(f"branch projects unknown roles {sorted(bad)}")

    @property
    def registry(self) -> ModeRegistry:
        return ModeRegistry.from_ports(self.ports, self.internal)

    @property
    def n_qubits(self) -> int:
        return len(self.logical_inputs)

    def with_elements(self, elements) -> "CircuitSpec":
        return _replace(self, elements=tuple(elements))

    def with_internal(self, internal) -> "CircuitSpec":
        return _replace(self, internal=tuple(internal))

    def override(self, params: Mapping[str, Mapping[str, float]]) -> "CircuitSpec":
        """Replace parameters of labelled elements, e.g. ``{"PPBS-A1": {"R_H": 0.34}}``."""
        labels = {el.label for el in self.elements if el.label}
        unknown = set(params) - labels
        if unknown:
            raise CircuitError(f"no elements labelled {sorted(unknown)}")
        out = []
        for el in self.elements:
            if el.label in params:
                el = ElementSpec(el.kind, {**el.params, **params[el.label]}, el.ports, el.label)
            out.append(el)
        return self.with_elements(out)

    # ---- serialization

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "ports": list(self.ports),
            "internal": list(self.internal),
            "n_max": self.n_max,
            "ideal": self.ideal,
            "elements": [el.to_json() for el in self.elements],
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": dict(sorted(self.outputs.items())),
            "logical_inputs": [
                {"name": q.name, "zero": _poly_json(q.zero), "one": _poly_json(q.one)}
                for q in self.logical_inputs
            ],
            "logical_outputs": [
                {"name": q.name, "role": q.role, "zero": _vec_json(q.zero), "one": _vec_json(q.one)}
                for q in self.logical_outputs
            ],
            "ancillas": [_poly_json(a) for a in self.ancillas],
            "branches": [
                {
                    "projections": {k: _vec_json(v) for k, v in sorted(b.projections.items())},
                    "corrections": dict(sorted(b.corrections.items())),
                }
                for b in self.branches
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "CircuitSpec":
        allowed = set(cls(name="x", ports=(), elements=(), inputs={}, outputs={}).to_dict())
        extra = set(d) - allowed
        if extra:
            raise CircuitError(f"unknown circuit fields {sorted(extra)}")
        if d.get("schema_version") != SCHEMA_VERSION:
            raise CircuitError(f"unsupported schema_version {d.get('schema_version')!r}")
        try:
            return cls(
                name=d["name"],
                ports=tuple(d["ports"]),
                internal=tuple(d.get("internal", (0,))),
                n_max=int(d.get("n_max", fock.DEFAULT_N_MAX)),
                ideal=d.get("ideal"),
                elements=tuple(ElementSpec.from_json(e) for e in d["elements"]),
                inputs=dict(d["inputs"]),
                outputs=dict(d["outputs"]),
                logical_inputs=tuple(
                    LogicalInput(q["name"], _poly_from_json(q["zero"]), _poly_from_json(q["one"]))
                    for q in d.get("logical_inputs", [])
                ),
                logical_outputs=tuple(
                    LogicalOutput(q["name"], q["role"], _vec_from_json(q["zero"]), _vec_from_json(q["one"]))
                    for q in d.get("logical_outputs", [])
                ),
                ancillas=tuple(_poly_from_json(a) for a in d.get("ancillas", [])),
                branches=tuple(
                    Branch(
                        {k: _vec_from_json(v) for k, v in b.get("projections", {}).items()},
                        dict(b.get("corrections", {})),
                    )
                    for b in d.get("branches", [{}])
                ),
            )
        except KeyError as exc:
            raise CircuitError(f"circuit file missing field {exc.args[0]!r}") from None

    @classmethod
    def from_json(cls, text: str) -> "CircuitSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CircuitError(f"circuit file line {exc.lineno} col {exc.colno}: {exc.msg}") from None
        return cls.from_dict(data)


def _replace(spec: CircuitSpec, **kw) -> CircuitSpec:
    import dataclasses

    return dataclasses.replace(spec, **kw)


@dataclass(frozen=True)
class CompiledCircuit:
    spec: CircuitSpec
    transfer: TransferMatrix
    provenance: str

    @property
    def sub_unitary(self) -> bool:
        return not self.transfer.is_unitary

    @property
    def registry(self) -> ModeRegistry:
        return self.transfer.registry


def compile_circuit(spec: CircuitSpec) -> CompiledCircuit:
    reg = spec.registry
    total = np.eye(len(reg), dtype=complex)
    for el in spec.elements:
        total = el.matrix(reg) @ total
    digest = hashlib.sha256(
        json.dumps([el.to_json() for el in spec.elements], sort_keys=True).encode()
    ).hexdigest()
    return CompiledCircuit(spec, TransferMatrix(reg, total), digest)


compile = compile_circuit  # noqa: A001  (public name used in docs)


# --------------------------------------------------------------------------
# logical-level analysis


def _translate(poly: Poly, port_map: Mapping[str, str]) -> Poly:
    return [(c, [(port_map[r], p) for r, p in modes]) for c, modes in poly]


def input_state(spec: CircuitSpec, bits: Sequence[int] | None = None, qubit_polys=None) -> FockState:
    """Circuit input for logical basis ``bits`` (or explicit per-qubit polynomials)."""
    if qubit_polys is None:
        qubit_polys = [q.state(b) for q, b in zip(spec.logical_inputs, bits)]
    factors = [_translate(p, spec.inputs) for p in qubit_polys]
    factors += [_translate(a, spec.inputs) for a in spec.ancillas]
    return fock.product_of_factors(spec.registry, factors)


def logical_qubit_poly(q: LogicalInput, amps) -> Poly:
    """Superposition amps[0]|0> + amps[1]|1> of a logical input as one polynomial."""
    out = [(amps[0] * c, m) for c, m in q.zero] + [(amps[1] * c, m) for c, m in q.one]
    return out


def _output_vector(spec: CircuitSpec, branch: Branch, state: FockState) -> np.ndarray:
    """Amplitudes <out_bits, branch projections | state> for all output bit strings."""
    reg = state.registry
    n = len(spec.logical_outputs)
    vec = np.zeros(2**n, dtype=complex)
    proj = [photon(spec.outputs[r], v) for r, v in sorted(branch.projections.items())]
    for idx, bits in enumerate(itertools.product((0, 1), repeat=n)):
        forms = [
            photon(spec.outputs[q.role], q.one if b else q.zero)
            for q, b in zip(spec.logical_outputs, bits)
        ]
        target = fock.product_of_factors(reg, forms + proj)
        vec[idx] = fock.inner_product(target, state)
    return vec


def _correction_matrix(spec: CircuitSpec, branch: Branch) -> np.ndarray:
    m = np.eye(1, dtype=complex)
    for q in spec.logical_outputs:
        m = np.kron(m, PAULI[branch.corrections.get(q.name, "I")])
    return m


@dataclass
class LogicalOperatorResult:
    matrix: np.ndarray  # sqrt(p) U, branches phase-aligned and combined
    branch_matrices: list
    success_probability: float
    per_input_probability: np.ndarray
    distance: float | None
    rank_deficient: bool
    uniform: bool

    @property
    def unitary(self) -> np.ndarray:
        return self.matrix / sqrt(self.success_probability)


def ideal_gate(name: str) -> np.ndarray:
    if name == "fredkin":
        u = np.eye(8, dtype=complex)
        u[[5, 6]] = u[[6, 5]]
        return u
    if name == "cnot":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if name == "cnot-reversed":
        # |c, t> -> |c xor t, t>: the target acts as control
        return np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)
    if name == "swap":
        return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    if name == "sqrt_swap":
        s = ideal_gate("swap")
        return 0.5 * (1 + 1j) * np.eye(4) + 0.5 * (1 - 1j) * s
    if name.startswith("identity"):
        n = int(name.split("-")[1]) if "-" in name else 1
        return np.eye(2**n, dtype=complex)
    raise CircuitError(f"unknown ideal gate {name!r}")


def phase_aligned_distance(m: np.ndarray, u: np.ndarray) -> float:
    """min over global phase of ||m - e^{i a} u|| (Frobenius)."""
    ov = np.vdot(u, m)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(m - phase * u))


def extract_logical_operator(
    circuit: CompiledCircuit | CircuitSpec, ideal: np.ndarray | str | None = None, tol: float = 1e-9
) -> LogicalOperatorResult:
    """Post-selected logical operator M = sqrt(p) U of an encoded circuit.

    Each heralded branch contributes its own operator (after feed-forward
    correction); branches must agree for the gate to be deterministic up to
    heralding, and their success probabilities add.
    """
    if isinstance(circuit, CircuitSpec):
        circuit = compile_circuit(circuit)
    spec = circuit.spec
    n_in = spec.n_qubits
    n_out = len(spec.logical_outputs)
    branch_ops = []
    for br in spec.branches:
        m = np.zeros((2**n_out, 2**n_in), dtype=complex)
        for col, bits in enumerate(itertools.product((0, 1), repeat=n_in)):
            out = fock.evolve(input_state(spec, bits), circuit.transfer, spec.n_max)
            m[:, col] = _output_vector(spec, br, out)
        branch_ops.append(_correction_matrix(spec, br) @ m)

    per_input = sum(np.sum(np.abs(m) ** 2, axis=0) for m in branch_ops)
    # align branch phases to the first one and combine in quadrature
    ref = branch_ops[0]
    combined = np.zeros_like(ref)
    for m in branch_ops:
        ov = np.vdot(ref, m)
        combined += m * (np.conj(ov) / abs(ov) if abs(ov) > 0 else 1.0)
    # for agreeing branches sqrt(sum p_b) U = combined * sqrt(sum p_b) / sum sqrt(p_b)
    ps = [np.sum(np.abs(m) ** 2) / m.shape[1] for m in branch_ops]
    sp = sum(sqrt(p) for p in ps)
    total = sum(ps)
    matrix = combined * (sqrt(total) / sp) if sp > 0 else combined
    sv = np.linalg.svd(matrix, compute_uv=False)
    rank_deficient = bool(sv.min() < tol * max(sv.max(), 1e-300)) or total == 0
    dist = None
    if ideal is None:
        ideal = spec.ideal
    if ideal is not None and not rank_deficient:
        u = ideal_gate(ideal) if isinstance(ideal, str) else np.asarray(ideal)
        dist = phase_aligned_distance(matrix / sqrt(total), u)
    return LogicalOperatorResult(
        matrix=matrix,
        branch_matrices=branch_ops,
        success_probability=float(total),
        per_input_probability=per_input,
        distance=dist,
        rank_deficient=rank_deficient,
        uniform=bool(np.ptp(per_input) < tol),
    )


# --------------------------------------------------------------------------
# builders

BS = lambda a, b, R=0.5, label="": ElementSpec("BS", {"R": R}, (a, b), label)  # noqa: E731


def _ppbs(a, b, R_H=1 / 3, R_V=1.0, label=""):
    return ElementSpec("PPBS", {"R_H": R_H, "R_V": R_V}, (a, b), label)


def _hwp(p, theta, label=""):
    return ElementSpec("HWP", {"theta": theta}, (p,), label)


def _att(p, R_H, R_V, label=""):
    return ElementSpec("Mirror", {"R_H": R_H, "R_V": R_V}, (p,), label)


def _qubit(port, zero=V_VEC, one=H_VEC, name=None):
    return LogicalInput(name or port, photon(port, zero), photon(port, one))


def build_mach_zehnder(phi: float) -> CircuitSpec:
    """Two balanced beam splitters with a phase plate on the upper arm.

    Input A enters line a, B line b. With this phase convention the photon
    from A leaves on line b (output C) with probability cos^2(phi/2).
    """
    return CircuitSpec(
        name="mach-zehnder",
        ports=("a", "b"),
        elements=(BS("a", "b"), ElementSpec("PhasePlate", {"phi": phi}, ("a",), "PP"), BS("a", "b")),
        inputs={"A": "a", "B": "b"},
        outputs={"C": "b", "D": "a"},
    )


def _sqrt_c(z: complex) -> complex:
    return complex(np.sqrt(complex(z)))


def build_partial_swap(phi: float) -> CircuitSpec:
    """Post-selected partial SWAP exp-type gate on two polarization qubits.

    A Mach-Zehnder whose arms carry amplitudes x, y (phase plate plus
    attenuator) acts on the two photons as
    ``A_aa A_bb I + A_ab A_ba SWAP`` after post-selecting one photon per line.
    Arm values are chosen so the operator is
    ``k^2 (e^{i phi/2} cos(phi/2) I - i e^{i phi/2} sin(phi/2) SWAP)``,
    i.e. identity at 0, SWAP at pi and sqrt(SWAP) at pi/2.
    """
    a2 = np.exp(0.5j * phi) * np.cos(phi / 2)
    b2 = -1j * np.exp(0.5j * phi) * np.sin(phi / 2)
    a2, b2 = (0j if abs(z) < 1e-12 else z for z in (a2, b2))
    al, be = _sqrt_c(a2), _sqrt_c(b2)
    x, y = al + be, be - al
    k = 1 / max(abs(x), abs(y))
    x, y = k * x, k * y
    els = [BS("a", "b")]
    for port, amp, tag in (("a", x, "x"), ("b", y, "y")):
        els.append(ElementSpec("PhasePlate", {"phi": float(np.angle(amp))}, (port,), f"PP-{tag}"))
        r = min(abs(amp) ** 2, 1.0)
        els.append(_att(port, r, r, f"ATT-{tag}"))
    els += [BS("a", "b"), ElementSpec("PhasePlate", {"phi": pi}, ("b",))]
    return CircuitSpec(
        name="partial-swap",
        ports=("a", "b"),
        elements=tuple(els),
        inputs={"T1": "a", "T2": "b"},
        outputs={"T1out": "a", "T2out": "b"},
        logical_inputs=(_qubit("T1"), _qubit("T2")),
        logical_outputs=(LogicalOutput("T1", "T1out"), LogicalOutput("T2", "T2out")),
        ideal=_PARTIAL_SWAP_IDEALS.get(round(float(phi), 12)),
    )


_PARTIAL_SWAP_IDEALS = {0.0: "identity-2", round(pi, 12): "swap", round(pi / 2, 12): "sqrt_swap"}


def build_ppbs_cnot(basis: str = "computational", R_H: float = 1 / 3, R_V: float = 1.0) -> CircuitSpec:
    """Post-selected CNOT from one PPBS and two V attenuators.

    The control enters line a and the target line b; the fully reflected V
    component swaps lines, so the control leaves on b and the target on a.
    ``basis`` selects the qubit encodings of the two standard test bases:
    "computational" (control V/H, target diagonal) or "complementary"
    (control diagonal, target V/H).
    """
    # |1> = (V - H)/sqrt(2) in (H, V) order
    minus = (-R2, R2)
    if basis == "computational":
        c0, c1, t0, t1, ideal = V_VEC, H_VEC, P_VEC, minus, "cnot"
    elif basis == "complementary":
        # in the conjugate basis the roles of control and target reverse
        c0, c1, t0, t1, ideal = P_VEC, minus, V_VEC, H_VEC, "cnot-reversed"
    else:
        raise CircuitError(f"unknown CNOT basis {basis!r}")
    return CircuitSpec(
        name=f"ppbs-cnot-{basis}",
        ports=("a", "b"),
        elements=(
            _ppbs("a", "b", R_H, R_V, "PPBS-A"),
            _att("a", 1.0, 1 / 3, "ATT-a"),
            _att("b", 1.0, 1 / 3, "ATT-b"),
        ),
        inputs={"C": "a", "T": "b"},
        outputs={"Cout": "b", "Tout": "a"},
        logical_inputs=(_qubit("C", c0, c1), _qubit("T", t0, t1)),
        logical_outputs=(
            LogicalOutput("C", "Cout", c0, c1),
            LogicalOutput("T", "Tout", t0, t1),
        ),
        ideal=ideal,
    )


# measured values of the hybrid optics; labels match the simplified CSWAP
MEASURED_COMPONENTS = {
    "PPBS-A1": {"R_H": 0.34, "R_V": 0.98},
    "MIRROR-1": {"R_H": 0.99, "R_V": 1.00},
    "PPBS-A2": {"R_H": 0.36, "R_V": 0.98},
    "BS-2": {"R_H": 0.34, "R_V": 0.38},
}


def _cswap_core(t1, t2, c1, c2, bs2_R=(1 / 3, 1 / 3)) -> list[ElementSpec]:
    """Elements of the simplified CSWAP on lines (t1, t2, c1, c2).

    Line roles after the optics: control 1 on t1, control 2 on c1, target 1
    on c2, target 2 on t2.
    """
    q = pi / 4
    return [
        _hwp(t1, 0.0, "Z-T1in"),
        BS(t1, t2, 0.5, "BS-in"),
        _ppbs(t1, c1, label="PPBS-A1"),
        _hwp(c1, q, "HWP-arm1"),
        _ppbs(c1, c2, label="PPBS-A2"),
        _hwp(c2, q, "HWP-arm2"),
        _att(t2, 1.0, 1.0, "MIRROR-1"),
        _att(t2, bs2_R[0], bs2_R[1], "BS-2"),
        BS(c2, t2, 0.5, "BS-out"),
        _att(t1, 1.0, 1 / 3, "ATT-C1"),
        _att(c1, 1.0, 1 / 3, "ATT-C2"),
        _hwp(t1, 0.0, "Z-C1out"),
        _hwp(c2, 0.0, "Z-T1out"),
    ]


CONTROL_ENCODINGS = ("parallel", "crossed")


def build_cswap_simplified(encoding: str = "parallel", bs2_R=(1 / 3, 1 / 3)) -> CircuitSpec:
    """Four-photon CSWAP with the control encoded on an entangled pair.

    ``encoding="parallel"`` uses |0> = VV, |1> = HH on (C1, C2); ``"crossed"`` uses
    |0> = V_C1 H_C2, |1> = H_C1 V_C2 and adds a half-wave plate at 45 degrees
    on C2in that maps it back to the first form. The output control is read
    on C1out (V = 0, H = 1) with C2out projected on the diagonal P.
    ``bs2_R`` is the (R_H, R_V) of the beam splitter inside the second hybrid
    element.
    """
    if encoding not in CONTROL_ENCODINGS:
        raise CircuitError(f"unknown control encoding {encoding!r}")
    els = _cswap_core("a", "b", "c", "d", bs2_R)
    if encoding == "parallel":
        zero = photon_pair("C1", "C2", [(1.0, "V", "V")])
        one = photon_pair("C1", "C2", [(1.0, "H", "H")])
    else:
        zero = photon_pair("C1", "C2", [(1.0, "V", "H")])
        one = photon_pair("C1", "C2", [(1.0, "H", "V")])
        els = [_hwp("d", pi / 4, "HWP-C2in")] + els
    return CircuitSpec(
        name=f"cswap-simplified-{encoding}",
        ports=("a", "b", "c", "d"),
        elements=tuple(els),
        inputs={"T1": "a", "T2": "b", "C1": "c", "C2": "d"},
        outputs={"T1out": "d", "T2out": "b", "C1out": "a", "C2out": "c"},
        logical_inputs=(LogicalInput("C", zero, one), _qubit("T1"), _qubit("T2")),
        logical_outputs=(
            LogicalOutput("C", "C1out"),
            LogicalOutput("T1", "T1out"),
            LogicalOutput("T2", "T2out"),
        ),
        branches=(Branch({"C2out": P_VEC}),),
        ideal="fredkin",
    )


def build_encoder() -> CircuitSpec:
    """Parity-check encoder: control photon plus a Bell pair on a PBS.

    The control enters line c, the Bell pair lines e (E1) and d (E2). The
    PBS output on line e is heralded in the diagonal basis; the remaining
    photons on (c, d) carry the control on the pair encoding VV / HH.
    """
    bell = photon_pair("E1", "E2", [(R2, "H", "H"), (R2, "V", "V")])
    return CircuitSpec(
        name="parity-encoder",
        ports=("c", "d", "e"),
        elements=(ElementSpec("PBS", {}, ("c", "e"), "PBS-enc"), _hwp("c", 0.0, "Z-enc")),
        inputs={"C": "c", "E1": "e", "E2": "d"},
        outputs={"C1": "c", "C2": "d", "H": "e"},
        logical_inputs=(_qubit("C"),),
        logical_outputs=(),
        ancillas=(bell,),
        branches=(Branch({"H": P_VEC}), Branch({"H": M_VEC})),
    )


def build_cswap_full() -> CircuitSpec:
    """CSWAP from a single control photon, a Bell pair and the encoder.

    Both outcomes of the encoder herald and of the C2out analyzer are kept,
    with feed-forward Z corrections on the output control; the four branches
    together succeed with the same probability as the simplified scheme.
    """
    bell = photon_pair("E1", "E2", [(R2, "H", "H"), (R2, "V", "V")])
    els = [ElementSpec("PBS", {}, ("c", "e"), "PBS-enc"), _hwp("c", 0.0, "Z-enc")]
    els += _cswap_core("a", "b", "c", "d")
    outs = (
        LogicalOutput("C", "C1out"),
        LogicalOutput("T1", "T1out"),
        LogicalOutput("T2", "T2out"),
    )
    branches = []
    for herald, c2 in itertools.product((P_VEC, M_VEC), repeat=2):
        flips = (herald == M_VEC) + (c2 == M_VEC)
        corr = {"C": "Z"} if flips % 2 else {}
        branches.append(Branch({"H": herald, "C2out": c2}, corr))
    return CircuitSpec(
        name="cswap-full",
        ports=("a", "b", "c", "d", "e"),
        elements=tuple(els),
        inputs={"T1": "a", "T2": "b", "C": "c", "E1": "e", "E2": "d"},
        outputs={"T1out": "d", "T2out": "b", "C1out": "a", "C2out": "c", "H": "e"},
        logical_inputs=(_qubit("C"), _qubit("T1"), _qubit("T2")),
        logical_outputs=outs,
        ancillas=(bell,),
        branches=tuple(branches),
        ideal="fredkin",
    )


def identity_circuit(n_qubits: int = 1) -> CircuitSpec:
    ports = tuple(f"q{i}" for i in range(n_qubits))
    return CircuitSpec(
        name="identity",
        ports=ports,
        elements=(),
        inputs={p: p for p in ports},
        outputs={f"{p}out": p for p in ports},
        logical_inputs=tuple(_qubit(p) for p in ports),
        logical_outputs=tuple(LogicalOutput(p, f"{p}out") for p in ports),
        ideal=f"identity-{n_qubits}",
    )


BUILTIN_CIRCUITS = {
    "cswap-simplified": build_cswap_simplified,
    "cswap-full": build_cswap_full,
    "ppbs-cnot": build_ppbs_cnot,
    "partial-swap-sqrt": lambda: build_partial_swap(pi / 2),
    "mach-zehnder": lambda: build_mach_zehnder(0.0),
    "identity": identity_circuit,
}


def analyzer_element(port: str, theta: float, phi: float) -> ElementSpec:
    return ElementSpec("Analyzer", {"theta": theta, "phi": phi}, (port,))


__all__ = [
    "Branch",
    "CircuitSpec",
    "CompiledCircuit",
    "LogicalInput",
    "LogicalOutput",
    "analyzer_element",
    "analyzer_jones",
    "build_cswap_full",
    "build_cswap_simplified",
    "build_encoder",
    "build_mach_zehnder",
    "build_partial_swap",
    "build_ppbs_cnot",
    "compile_circuit",
    "extract_logical_operator",
    "identity_circuit",
    "ModeIndex",
]
