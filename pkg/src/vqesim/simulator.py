"""Execution engines: exact statevector and density matrix with idle noise.

The density-matrix engine applies gates as ideal unitaries in ASAP schedule
order; whenever a qubit has sat idle between gates (or while waiting for
the global circuit end), a single-qubit amplitude-damping plus pure
dephasing channel is applied for the accumulated idle duration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .ansatz import Gate, ParameterizedCircuit
from .pauli import PauliSum


class SimulationError(ValueError):
    pass


TABLE1_T1_US = 50.0
TABLE1_T2_US = 50.0
TABLE1_DURATIONS_NS = {
    "H": 60.0, "X": 60.0, "Y": 60.0, "Z": 60.0,
    "RX": 60.0, "RY": 60.0, "RZ": 60.0, "CNOT": 150.0,
}


@dataclass(frozen=True)
class NoiseModel:
    """Relaxation/dephasing times (microseconds) and gate durations (ns)."""

    t1_us: float = TABLE1_T1_US
    t2_us: float = TABLE1_T2_US
    durations_ns: dict = field(default_factory=lambda: dict(TABLE1_DURATIONS_NS))
    enabled: bool = True

    def __post_init__(self):
        if self.t1_us <= 0 or self.t2_us <= 0:
            raise SimulationError("T1 and T2 must be positive")
        if self.t2_us > 2 * self.t1_us + 1e-12:
            raise SimulationError("unphysical times: T2 > 2*T1")
        if any(d <= 0 for d in self.durations_ns.values()):
            raise SimulationError("gate durations must be positive")

    @property
    def t2_prime_us(self) -> float:
        return 1.0 / (1.0 / self.t2_us + 1.0 / (2.0 * self.t1_us))

    def duration(self, kind: str) -> float:
        try:
            return self.durations_ns[kind]
        except KeyError:
            raise SimulationError(f"no duration defined for gate {kind!r}")

    @classmethod
    def from_json(cls, text: str, enabled: bool = True) -> "NoiseModel":
        data = json.loads(text)
        durations = dict(TABLE1_DURATIONS_NS)
        durations.update(data.get("durations_ns", {}))
        return cls(t1_us=data.get("t1_us", TABLE1_T1_US),
                   t2_us=data.get("t2_us", TABLE1_T2_US),
                   durations_ns=durations, enabled=enabled)

    def to_json(self) -> str:
        return json.dumps({"t1_us": self.t1_us, "t2_us": self.t2_us,
                           "durations_ns": self.durations_ns}, indent=2)


@dataclass
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2 ** self.n_qubits,):
            raise SimulationError("amplitude vector has wrong length")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def zero_state(cls, n_qubits: int) -> "Statevector":
        amp = np.zeros(2 ** n_qubits, dtype=complex)
        amp[0] = 1.0
        return cls(n_qubits, amp)


@dataclass
class DensityMatrix:
    n_qubits: int
    rho: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=complex)
        dim = 2 ** self.n_qubits
        if self.rho.shape != (dim, dim):
            raise SimulationError("density matrix has wrong shape")

    @classmethod
    def from_statevector(cls, sv: Statevector) -> "DensityMatrix":
        return cls(sv.n_qubits, np.outer(sv.amplitudes, sv.amplitudes.conj()))


# ---------------------------------------------------------------------------
# gate matrices and application

def gate_matrix(g: Gate) -> np.ndarray:
    if not g.is_bound:
        raise SimulationError(f"unbound parameter on gate {g.kind}")
    k = g.kind
    if k == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    if k == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if k == "Y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if k == "Z":
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if k == "CNOT":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0],
                         [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    t = g.angle / 2.0
    if k == "RX":
        return np.array([[np.cos(t), -1j * np.sin(t)],
                         [-1j * np.sin(t), np.cos(t)]], dtype=complex)
    if k == "RY":
        return np.array([[np.cos(t), -np.sin(t)],
                         [np.sin(t), np.cos(t)]], dtype=complex)
    if k == "RZ":
        return np.array([[np.exp(-1j * t), 0],
                         [0, np.exp(1j * t)]], dtype=complex)
    raise SimulationError(f"unknown gate kind {k!r}")


def _apply_1q(psi: np.ndarray, u: np.ndarray, q: int) -> np.ndarray:
    # qubit q is the axis of stride 2^q
    lo = 2 ** q
    shaped = psi.reshape(-1, 2, lo)
    return np.einsum("ab,xbl->xal", u, shaped).reshape(-1)


def _apply_2q(psi: np.ndarray, u: np.ndarray, q0: int, q1: int) -> np.ndarray:
    # u is 4x4 indexed as |q0 q1> with q0 the most significant bit
    n = psi.size.bit_length() - 1
    t = psi.reshape([2] * n)
    a0, a1 = n - 1 - q0, n - 1 - q1
    t = np.moveaxis(t, (a0, a1), (0, 1))
    shape = t.shape
    t = u.reshape(2, 2, 2, 2).reshape(4, 4) @ t.reshape(4, -1)
    t = t.reshape(shape)
    t = np.moveaxis(t, (0, 1), (a0, a1))
    return t.reshape(-1)


def apply_gate_statevector(psi: np.ndarray, g: Gate) -> np.ndarray:
    u = gate_matrix(g)
    if g.kind == "CNOT":
        # matrix is |control target>
        return _apply_2q(psi, u, g.qubits[0], g.qubits[1])
    return _apply_1q(psi, u, g.qubits[0])


def run_statevector(c: ParameterizedCircuit, cap: int = 24) -> Statevector:
    """Apply a fully bound circuit to |0...0>."""
    if not c.is_bound:
        raise SimulationError("circuit has unbound parameters")
    if c.n_qubits > cap:
        raise SimulationError(f"{c.n_qubits} qubits exceeds cap {cap}")
    psi = Statevector.zero_state(c.n_qubits).amplitudes
    for g in c.gates:
        psi = apply_gate_statevector(psi, g)
    return Statevector(c.n_qubits, psi)


# ---------------------------------------------------------------------------
# expectation values

def _parity(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        x ^= x >> shift
    return x & 1


def _string_action(letters: str) -> tuple[int, int, complex]:
    """Flip mask, sign mask and prefactor of a Pauli string on basis states.

    P|z> = pref * (-1)^popcount(z & sign_mask) |z ^ flip_mask>.
    """
    flip = sign = 0
    n_y = 0
    for q, l in enumerate(letters):
        if l in ("X", "Y"):
            flip |= 1 << q
        if l in ("Y", "Z"):
            sign |= 1 << q
        if l == "Y":
            n_y += 1
    return flip, sign, 1j ** n_y


def expectation_exact(state: Union[Statevector, DensityMatrix],
                      h: PauliSum, hermitian_tol: float = 1e-10) -> float:
    """<H> evaluated term by term without materializing H as a matrix."""
    if state.n_qubits != h.n_qubits:
        raise SimulationError("state / operator qubit-count mismatch")
    if not h.is_hermitian(hermitian_tol):
        raise SimulationError("expectation requires a Hermitian PauliSum")
    idx = np.arange(2 ** state.n_qubits)
    total = 0j
    for letters, coeff in h.items():
        flip, sign, pref = _string_action(letters)
        signs = 1.0 - 2.0 * _parity(idx & sign)
        if isinstance(state, Statevector):
            psi = state.amplitudes
            val = np.sum(np.conj(psi[idx ^ flip]) * signs * psi)
        else:
            val = np.sum(state.rho[idx, idx ^ flip] * signs)
        total += coeff * pref * val
    return float(total.real)


def _measurement_basis_gates(letters: str) -> list[Gate]:
    gates = []
    for q, l in enumerate(letters):
        if l == "X":
            gates.append(Gate("H", (q,)))
        elif l == "Y":
            gates.append(Gate("RX", (q,), angle=np.pi / 2))
    return gates


def _probabilities(state: Union[Statevector, DensityMatrix],
                   rotation: list[Gate]) -> np.ndarray:
    if isinstance(state, Statevector):
        psi = state.amplitudes
        for g in rotation:
            psi = apply_gate_statevector(psi, g)
        p = np.abs(psi) ** 2
    else:
        rho = state.rho
        for g in rotation:
            rho = _conjugate_1q(rho, gate_matrix(g), g.qubits[0])
        p = np.real(np.diag(rho)).copy()
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def sample_bitstrings(state: Union[Statevector, DensityMatrix],
                      n_shots: int, rng_seed: int) -> list[str]:
    """i.i.d. Born-rule samples; qubit 0 is the leftmost character."""
    if n_shots <= 0:
        raise SimulationError("n_shots must be positive")
    p = _probabilities(state, [])
    rng = np.random.default_rng(rng_seed)
    draws = rng.choice(p.size, size=n_shots, p=p)
    n = state.n_qubits
    return [format(z, f"0{n}b")[::-1] for z in draws]


def _qubitwise_groups(h: PauliSum) -> list[tuple[str, list[tuple[str, complex]]]]:
    """Greedy qubit-wise commuting grouping; returns (basis, members) pairs."""
    groups: list[tuple[list[str], list[tuple[str, complex]]]] = []
    for letters, coeff in h.sorted_items():
        placed = False
        for basis, members in groups:
            if all(l == "I" or b == "I" or l == b
                   for l, b in zip(letters, basis)):
                for q, l in enumerate(letters):
                    if l != "I":
                        basis[q] = l
                members.append((letters, coeff))
                placed = True
                break
        if not placed:
            groups.append((list(letters), [(letters, coeff)]))
    return [("".join(basis), members) for basis, members in groups]


def expectation_sampled(state: Union[Statevector, DensityMatrix],
                        h: PauliSum, n_shots: int, rng_seed: int,
                        grouping: str = "none") -> float:
    """Shot-based estimate of <H>; n_shots = 0 falls back to the exact value.

    With grouping="none" every Pauli term is measured independently with
    n_shots samples. grouping="qubitwise" measures greedily formed
    qubit-wise commuting groups instead.
    """
    if n_shots < 0:
        raise SimulationError("n_shots must be >= 0")
    if n_shots == 0:
        return expectation_exact(state, h)
    if not h.is_hermitian():
        raise SimulationError("expectation requires a Hermitian PauliSum")
    rng = np.random.default_rng(rng_seed)
    idx = np.arange(2 ** state.n_qubits)

    if grouping == "none":
        groups = [(letters, [(letters, coeff)])
                  for letters, coeff in h.sorted_items()]
    elif grouping == "qubitwise":
        groups = _qubitwise_groups(h)
    else:
        raise SimulationError(f"unknown grouping {grouping!r}")

    total = 0.0
    for basis, members in groups:
        identity = sum(c.real for l, c in members if set(l) <= {"I"})
        total += identity
        members = [(l, c) for l, c in members if set(l) != {"I"}]
        if not members:
            continue
        p = _probabilities(state, _measurement_basis_gates(basis))
        draws = rng.choice(p.size, size=n_shots, p=p)
        for letters, coeff in members:
            mask = 0
            for q, l in enumerate(letters):
                if l != "I":
                    mask |= 1 << q
            parities = _parity(draws & mask)
            total += coeff.real * float(np.mean(1.0 - 2.0 * parities))
    return total


# ---------------------------------------------------------------------------
# scheduling and the noisy engine

@dataclass(frozen=True)
class Schedule:
    """ASAP gate timing (ns) plus per-qubit idle intervals."""

    gate_spans: tuple[tuple[float, float], ...]   # (start, duration) per gate
    idle_intervals: tuple[tuple[tuple[float, float], ...], ...]  # per qubit
    circuit_end: float


def schedule_circuit(c: ParameterizedCircuit, nm: NoiseModel) -> Schedule:
    """Each gate starts at the max end-time of its qubits' previous gates."""
    ready = np.zeros(c.n_qubits)
    touched = [False] * c.n_qubits
    spans = []
    idles: list[list[tuple[float, float]]] = [[] for _ in range(c.n_qubits)]
    for g in c.gates:
        dur = nm.duration(g.kind)
        start = max(ready[q] for q in g.qubits)
        for q in g.qubits:
            if touched[q] and start > ready[q]:
                idles[q].append((float(ready[q]), float(start)))
            touched[q] = True
            ready[q] = start + dur
        spans.append((float(start), float(dur)))
    end = float(ready.max()) if len(c.gates) else 0.0
    for q in range(c.n_qubits):
        if touched[q] and end > ready[q]:
            idles[q].append((float(ready[q]), end))
    return Schedule(tuple(spans), tuple(tuple(iv) for iv in idles), end)


def _conjugate_1q(rho: np.ndarray, u: np.ndarray, q: int) -> np.ndarray:
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    t = rho.reshape([2] * (2 * n))
    ar, ac = n - 1 - q, 2 * n - 1 - q
    t = np.moveaxis(t, (ar, ac), (0, 1))
    shape = t.shape
    flat = t.reshape(2, 2, -1)
    flat = np.einsum("ab,bcx,dc->adx", u, flat, u.conj())
    t = flat.reshape(shape)
    t = np.moveaxis(t, (0, 1), (ar, ac))
    return t.reshape(dim, dim)


def _conjugate_2q(rho: np.ndarray, u: np.ndarray, q0: int, q1: int) -> np.ndarray:
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    t = rho.reshape([2] * (2 * n))
    axes = (n - 1 - q0, n - 1 - q1, 2 * n - 1 - q0, 2 * n - 1 - q1)
    t = np.moveaxis(t, axes, (0, 1, 2, 3))
    shape = t.shape
    flat = t.reshape(4, 4, -1)
    u4 = u.reshape(4, 4)
    flat = np.einsum("ab,bcx,dc->adx", u4, flat, u4.conj())
    t = flat.reshape(shape)
    t = np.moveaxis(t, (0, 1, 2, 3), axes)
    return t.reshape(dim, dim)


def amplitude_damping_kraus(t_ns: float, t1_us: float) -> list[np.ndarray]:
    p = 1.0 - np.exp(-(t_ns * 1e-3) / t1_us)
    return [np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex),
            np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex)]


def dephasing_kraus(t_ns: float, t2_us: float) -> list[np.ndarray]:
    p = 1.0 - np.exp(-2.0 * (t_ns * 1e-3) / t2_us)
    return [np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex),
            np.array([[0, 0], [0, np.sqrt(p)]], dtype=complex)]


def _apply_kraus_1q(rho: np.ndarray, kraus: list[np.ndarray],
                    q: int) -> np.ndarray:
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    t = rho.reshape([2] * (2 * n))
    ar, ac = n - 1 - q, 2 * n - 1 - q
    t = np.moveaxis(t, (ar, ac), (0, 1))
    shape = t.shape
    flat = t.reshape(2, 2, -1)
    out = np.zeros_like(flat)
    for e in kraus:
        out += np.einsum("ab,bcx,dc->adx", e, flat, e.conj())
    t = out.reshape(shape)
    t = np.moveaxis(t, (0, 1), (ar, ac))
    return t.reshape(dim, dim)


def apply_idle_channel(rho: np.ndarray, q: int, t_ns: float,
                       nm: NoiseModel) -> np.ndarray:
    if t_ns <= 0:
        return rho
    rho = _apply_kraus_1q(rho, amplitude_damping_kraus(t_ns, nm.t1_us), q)
    rho = _apply_kraus_1q(rho, dephasing_kraus(t_ns, nm.t2_us), q)
    return rho


def run_density_matrix(c: ParameterizedCircuit, nm: NoiseModel,
                       cap: int = 12) -> DensityMatrix:
    """Noisy execution: ideal gates with decoherence applied to idle qubits.

    Idle noise starts accruing for a qubit only once its first gate has
    begun; every qubit then idles up to the global circuit end so that
    measurement is simultaneous.
    """
    if not c.is_bound:
        raise SimulationError("circuit has unbound parameters")
    if c.n_qubits > cap:
        raise SimulationError(f"{c.n_qubits} qubits exceeds cap {cap}")
    if not nm.enabled:
        return DensityMatrix.from_statevector(run_statevector(c, cap=24))

    dim = 2 ** c.n_qubits
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    ready = np.zeros(c.n_qubits)
    touched = [False] * c.n_qubits
    for g in c.gates:
        dur = nm.duration(g.kind)
        start = max(ready[q] for q in g.qubits)
        for q in g.qubits:
            if touched[q]:
                rho = apply_idle_channel(rho, q, start - ready[q], nm)
            touched[q] = True
            ready[q] = start + dur
        u = gate_matrix(g)
        if g.kind == "CNOT":
            rho = _conjugate_2q(rho, u, g.qubits[0], g.qubits[1])
        else:
            rho = _conjugate_1q(rho, u, g.qubits[0])
    end = float(ready.max()) if len(c.gates) else 0.0
    for q in range(c.n_qubits):
        if touched[q]:
            rho = apply_idle_channel(rho, q, end - ready[q], nm)
    return DensityMatrix(c.n_qubits, rho)
