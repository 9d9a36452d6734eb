"""Transfer-matrix builders for the optical elements used in the circuits.

Conventions
-----------
* Coupling two spatial ports with reflectivity R uses
  ``[[sqrt(T), i sqrt(R)], [i sqrt(R), sqrt(T)]]`` with ``T = 1 - R`` unless a
  transmissivity is given explicitly.
* Jones matrices act on the (H, V) amplitudes of one port:
  ``HWP(t) = [[cos 2t, sin 2t], [sin 2t, -cos 2t]]`` and
  ``QWP(t) = [[c^2 - i s^2, (1 + i) s c], [(1 + i) s c, s^2 - i c^2]]``
  (``c = cos t``, ``s = sin t``), the standard retarder with the global
  phase ``exp(-i pi/4)`` dropped.
* Every element acts identically on all internal (distinguishability) labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import cos, sin, sqrt

import numpy as np

from .fock import ModeIndex, ModeRegistry, TransferMatrix


class ElementError(ValueError):
    pass


KINDS = (
    "BS",
    "PPBS",
    "PBS",
    "HWP",
    "QWP",
    "PhasePlate",
    "Mirror",
    "PolarizationRotation",
    "Analyzer",
)
TWO_PORT = {"BS", "PPBS", "PBS"}

# required and optional parameter names per kind
_PARAMS = {
    "BS": ({"R"}, {"T"}),
    "PPBS": ({"R_H", "R_V"}, {"T_H", "T_V"}),
    "PBS": (set(), set()),
    "HWP": ({"theta"}, set()),
    "QWP": ({"theta"}, set()),
    "PhasePlate": ({"phi"}, set()),
    "Mirror": ({"R_H", "R_V"}, set()),
    "PolarizationRotation": ({"angle"}, set()),
    "Analyzer": ({"theta", "phi"}, set()),
}


def _check_fraction(name, value):
    if not 0.0 <= value <= 1.0:
        raise ElementError(f"{name}={value} outside [0, 1]")


def coupler_2x2(R: float, T: float | None = None) -> np.ndarray:
    _check_fraction("R", R)
    T = 1.0 - R if T is None else T
    _check_fraction("T", T)
    return np.array([[sqrt(T), 1j * sqrt(R)], [1j * sqrt(R), sqrt(T)]])


def hwp_jones(theta: float) -> np.ndarray:
    c, s = cos(2 * theta), sin(2 * theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def qwp_jones(theta: float) -> np.ndarray:
    c, s = cos(theta), sin(theta)
    return np.array(
        [[c * c - 1j * s * s, (1 + 1j) * s * c], [(1 + 1j) * s * c, s * s - 1j * c * c]]
    )


def rotation_jones(angle: float) -> np.ndarray:
    c, s = cos(angle), sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


def analyzer_jones(theta: float, phi: float) -> np.ndarray:
    """Rotate the analyzer axis onto the V mode and its orthogonal onto H.

    With |0> = V and |1> = H the axis state is
    ``cos(theta/2)|0> + exp(i phi) sin(theta/2)|1>``. After this element a
    photon found in the V mode is outcome 0 (along the axis), in H outcome 1.
    """
    c, s = cos(theta / 2), sin(theta / 2)
    e = np.exp(1j * phi)
    axis = np.array([e * s, c])  # (H, V) components
    perp = np.array([-e * c, s])
    # output V amplitude = <axis|in>, output H amplitude = <perp|in>
    return np.array([perp.conj(), axis.conj()])


@dataclass(frozen=True)
class ElementSpec:
    kind: str
    params: dict = field(default_factory=dict)
    ports: tuple[str, ...] = ()
    label: str = ""  # optional handle used for parameter overrides

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ElementError(f"unknown element kind {self.kind!r}")
        object.__setattr__(self, "ports", tuple(self.ports))
        object.__setattr__(self, "params", {k: float(v) for k, v in self.params.items()})
        n_ports = 2 if self.kind in TWO_PORT else 1
        if len(self.ports) != n_ports:
            raise ElementError(f"{self.kind} couples {n_ports} port(s), got {self.ports}")
        if n_ports == 2 and self.ports[0] == self.ports[1]:
            raise ElementError(f"{self.kind} needs two distinct ports")
        required, optional = _PARAMS[self.kind]
        keys = set(self.params)
        if not required <= keys:
            raise ElementError(f"{self.kind} missing parameters {sorted(required - keys)}")
        if not keys <= required | optional:
            raise ElementError(f"{self.kind} got unknown parameters {sorted(keys - required - optional)}")
        for k, v in self.params.items():
            if k[0] in "RT":
                _check_fraction(k, v)

    def blocks(self) -> dict[str, np.ndarray]:
        """Per-polarization 2x2 port couplings, or a 'jones' 2x2 polarization map."""
        p = self.params
        if self.kind == "BS":
            m = coupler_2x2(p["R"], p.get("T"))
            return {"H": m, "V": m}
        if self.kind == "PPBS":
            return {
                "H": coupler_2x2(p["R_H"], p.get("T_H")),
                "V": coupler_2x2(p["R_V"], p.get("T_V")),
            }
        if self.kind == "PBS":
            return {"H": coupler_2x2(0.0), "V": coupler_2x2(1.0)}
        if self.kind == "HWP":
            return {"jones": hwp_jones(p["theta"])}
        if self.kind == "QWP":
            return {"jones": qwp_jones(p["theta"])}
        if self.kind == "PhasePlate":
            return {"jones": np.exp(1j * p["phi"]) * np.eye(2)}
        if self.kind == "Mirror":
            return {"jones": np.diag([sqrt(p["R_H"]), sqrt(p["R_V"])]).astype(complex)}
        if self.kind == "PolarizationRotation":
            return {"jones": rotation_jones(p["angle"])}
        return {"jones": analyzer_jones(p["theta"], p["phi"])}

    def matrix(self, registry: ModeRegistry) -> np.ndarray:
        """Dense matrix of this element on every mode of ``registry``."""
        n = len(registry)
        out = np.eye(n, dtype=complex)
        blocks = self.blocks()
        for k in registry.internal_labels:
            if "jones" in blocks:
                (port,) = self.ports
                try:
                    idx = [registry.index(ModeIndex(port, pol, k)) for pol in "HV"]
                except KeyError:
                    if k == 0:
                        raise ElementError(f"port {port!r} not registered") from None
                    continue
                out[np.ix_(idx, idx)] = blocks["jones"]
            else:
                for pol in "HV":
                    try:
                        idx = [registry.index(ModeIndex(q, pol, k)) for q in self.ports]
                    except KeyError:
                        if k == 0:
                            raise ElementError(f"ports {self.ports} not registered") from None
                        continue
                    out[np.ix_(idx, idx)] = blocks[pol]
        return out

    def transfer(self, registry: ModeRegistry | None = None) -> TransferMatrix:
        registry = registry or ModeRegistry.from_ports(self.ports)
        return TransferMatrix(registry, self.matrix(registry))

    def to_json(self) -> dict:
        out = {"kind": self.kind, "params": dict(sorted(self.params.items())), "ports": list(self.ports)}
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ElementSpec":
        extra = set(data) - {"kind", "params", "ports", "label"}
        if extra:
            raise ElementError(f"unknown element fields {sorted(extra)}")
        return cls(
            data["kind"], data.get("params", {}), tuple(data.get("ports", ())), data.get("label", "")
        )


# convenience builders on a default two-port ("a", "b") or one-port ("a") registry


def beam_splitter(R: float, ports=("a", "b")) -> TransferMatrix:
    return ElementSpec("BS", {"R": R}, ports).transfer()


def ppbs(R_H: float, R_V: float, ports=("a", "b"), T_H=None, T_V=None) -> TransferMatrix:
    params = {"R_H": R_H, "R_V": R_V}
    if T_H is not None:
        params["T_H"] = T_H
    if T_V is not None:
        params["T_V"] = T_V
    return ElementSpec("PPBS", params, ports).transfer()


def pbs(ports=("a", "b")) -> TransferMatrix:
    return ElementSpec("PBS", {}, ports).transfer()


def wave_plate(kind: str, theta: float, port="a") -> TransferMatrix:
    kinds = {"half": "HWP", "quarter": "QWP"}
    if kind not in kinds:
        raise ElementError(f"wave plate kind must be 'half' or 'quarter', got {kind!r}")
    return ElementSpec(kinds[kind], {"theta": theta}, (port,)).transfer()


def phase_plate(phi: float, port="a") -> TransferMatrix:
    return ElementSpec("PhasePlate", {"phi": phi}, (port,)).transfer()


def lossy_mirror(R_H: float, R_V: float, port="a") -> TransferMatrix:
    return ElementSpec("Mirror", {"R_H": R_H, "R_V": R_V}, (port,)).transfer()
