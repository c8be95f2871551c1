"""Parameterized circuits: hardware-efficient variants and Trotterized qUCC.

A symbolic rotation angle is stored as (parameter index, scale); binding a
parameter vector theta replaces it by scale * theta[index]. Hardware
efficient layers use scale 1; the qUCC Pauli exponentials carry the
2*coefficient scale of their generator terms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .fermion import FermionOperator, IntegralError, MolecularIntegrals, jordan_wigner
from .pauli import PauliSum

ROTATIONS = ("RX", "RY", "RZ")
FIXED = ("H", "X", "Y", "Z")


class AnsatzError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: Optional[float] = None
    param: Optional[tuple[int, float]] = None   # (index, scale)

    def __post_init__(self):
        if self.kind in ROTATIONS:
            if (self.angle is None) == (self.param is None):
                raise AnsatzError(
                    f"{self.kind} needs exactly one of angle or param")
            if len(self.qubits) != 1:
                raise AnsatzError(f"{self.kind} acts on one qubit")
        elif self.kind in FIXED:
            if self.angle is not None or self.param is not None:
                raise AnsatzError(f"{self.kind} carries no parameter")
            if len(self.qubits) != 1:
                raise AnsatzError(f"{self.kind} acts on one qubit")
        elif self.kind == "CNOT":
            if self.angle is not None or self.param is not None:
                raise AnsatzError("CNOT carries no parameter")
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise AnsatzError("CNOT needs distinct control and target")
        else:
            raise AnsatzError(f"unknown gate kind {self.kind!r}")

    @property
    def is_bound(self) -> bool:
        return self.param is None


@dataclass(frozen=True)
class ParameterizedCircuit:
    n_qubits: int
    gates: tuple[Gate, ...]
    n_parameters: int
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        used = set()
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise AnsatzError(f"qubit {q} out of range")
            if g.param is not None:
                idx = g.param[0]
                if not 0 <= idx < self.n_parameters:
                    raise AnsatzError(f"parameter index {idx} out of range")
                used.add(idx)
        if self.n_parameters and used != set(range(self.n_parameters)):
            missing = set(range(self.n_parameters)) - used
            raise AnsatzError(f"unreferenced parameter indices: {sorted(missing)}")

    @property
    def is_bound(self) -> bool:
        return all(g.is_bound for g in self.gates)

    def bind(self, theta: Sequence[float]) -> "ParameterizedCircuit":
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_parameters,):
            raise AnsatzError(
                f"expected {self.n_parameters} parameters, got {theta.shape}")
        gates = []
        for g in self.gates:
            if g.param is None:
                gates.append(g)
            else:
                idx, scale = g.param
                gates.append(Gate(g.kind, g.qubits,
                                  angle=scale * float(theta[idx])))
        return ParameterizedCircuit(self.n_qubits, tuple(gates), 0,
                                    dict(self.metadata))

    def serialize(self) -> str:
        """One gate per line: `KIND q0 [q1] [p<idx>*<scale> | angle]`."""
        lines = []
        for g in self.gates:
            parts = [g.kind] + [str(q) for q in g.qubits]
            if g.param is not None:
                idx, scale = g.param
                parts.append(f"p{idx}" if scale == 1.0 else f"p{idx}*{scale!r}")
            elif g.angle is not None:
                parts.append(repr(g.angle))
            lines.append(" ".join(parts))
        return "\n".join(lines)

    @classmethod
    def deserialize(cls, text: str, n_qubits: int,
                    n_parameters: int = 0) -> "ParameterizedCircuit":
        gates = []
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            kind = parts[0]
            if kind == "CNOT":
                gates.append(Gate(kind, (int(parts[1]), int(parts[2]))))
            elif kind in FIXED:
                gates.append(Gate(kind, (int(parts[1]),)))
            else:
                q = int(parts[1])
                tok = parts[2]
                if tok.startswith("p"):
                    if "*" in tok:
                        p, s = tok[1:].split("*")
                        gates.append(Gate(kind, (q,), param=(int(p), float(s))))
                    else:
                        gates.append(Gate(kind, (q,), param=(int(tok[1:]), 1.0)))
                else:
                    gates.append(Gate(kind, (q,), angle=float(tok)))
        return cls(n_qubits, tuple(gates), n_parameters)


def he_parameter_count(variant: str, n_qubits: int, depth: int) -> int:
    if variant in ("v1", "v2"):
        return depth * n_qubits
    if variant == "v3":
        return 2 * depth * (3 * n_qubits - 2)
    raise AnsatzError(f"unknown HE variant {variant!r}")


def build_he(variant: str, n_qubits: int, depth: int) -> ParameterizedCircuit:
    """Hardware-efficient circuit; one of the three fixed layouts.

    v1: H on the lower half, then per layer one rotation per qubit
        (RY even / RX odd), HOMO-LUMO CNOTs (i, i+N/2), spin CNOTs (2k, 2k+1).
    v2: H everywhere, per layer one rotation per qubit and a linear CNOT chain.
    v3: H everywhere, per layer an (RY, RX) pair on every qubit, then for
        each chain CNOT an (RY, RX) pair on both of its qubits.
    """
    if depth < 1:
        raise AnsatzError("depth must be >= 1")
    if variant == "v1" and n_qubits % 2:
        raise AnsatzError("v1 requires an even qubit count")
    gates: list[Gate] = []
    p = 0

    def rot(kind, q):
        nonlocal p
        gates.append(Gate(kind, (q,), param=(p, 1.0)))
        p += 1

    if variant == "v1":
        half = n_qubits // 2
        for q in range(half):
            gates.append(Gate("H", (q,)))
        for _ in range(depth):
            for q in range(n_qubits):
                rot("RY" if q % 2 == 0 else "RX", q)
            for i in range(half):
                gates.append(Gate("CNOT", (i, i + half)))
            for k in range(0, n_qubits - 1, 2):
                gates.append(Gate("CNOT", (k, k + 1)))
    elif variant == "v2":
        for q in range(n_qubits):
            gates.append(Gate("H", (q,)))
        for _ in range(depth):
            for q in range(n_qubits):
                rot("RY" if q % 2 == 0 else "RX", q)
            for i in range(n_qubits - 1):
                gates.append(Gate("CNOT", (i, i + 1)))
    elif variant == "v3":
        for q in range(n_qubits):
            gates.append(Gate("H", (q,)))
        for _ in range(depth):
            for q in range(n_qubits):
                rot("RY", q)
                rot("RX", q)
            for i in range(n_qubits - 1):
                gates.append(Gate("CNOT", (i, i + 1)))
                for q in (i, i + 1):
                    rot("RY", q)
                    rot("RX", q)
    else:
        raise AnsatzError(f"unknown HE variant {variant!r}")

    expected = he_parameter_count(variant, n_qubits, depth)
    assert p == expected, (p, expected)
    return ParameterizedCircuit(n_qubits, tuple(gates), p,
                                {"family": f"he_{variant}", "depth": depth})


# ---------------------------------------------------------------------------
# qUCC

@dataclass(frozen=True)
class QuccGenerator:
    """Anti-Hermitian excitation generator, one operator per parameter.

    excitations[k] is either (p, r) for a single or (p, q, r, s) for a
    double, with p, q unoccupied and r, s occupied spin-orbitals of the
    Hartree-Fock reference. operators[k] is the matching anti-Hermitian
    FermionOperator with unit amplitude. Doubles come first, each group
    in lexicographic order.
    """

    n_modes: int
    n_active_electrons: int
    excitations: tuple[tuple[int, ...], ...]
    operators: tuple[FermionOperator, ...]

    @property
    def n_parameters(self) -> int:
        return len(self.excitations)

    def as_operator(self, theta: Sequence[float]) -> FermionOperator:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_parameters,):
            raise AnsatzError("theta length mismatch")
        total = FermionOperator.from_terms(self.n_modes, [])
        for t, op in zip(theta, self.operators):
            total = total + op * t
        return total


def _spin(so: int) -> int:
    return so % 2


def enumerate_excitations(n_modes: int, n_electrons: int):
    """Spin-conserving singles and doubles from the HF reference.

    Occupied spin-orbitals are 0..n_electrons-1. Returns (doubles, singles)
    with doubles as (p, q, r, s), p > q unoccupied, r > s occupied, and the
    created spins matching the annihilated spins as multisets.
    """
    occ = list(range(n_electrons))
    virt = list(range(n_electrons, n_modes))
    singles = [(p, r) for p in virt for r in occ if _spin(p) == _spin(r)]
    doubles = []
    for ip, p in enumerate(virt):
        for q in virt[:ip]:
            for ir, r in enumerate(occ):
                for s in occ[:ir]:
                    if sorted((_spin(p), _spin(q))) == sorted((_spin(r), _spin(s))):
                        doubles.append((p, q, r, s))
    return sorted(doubles), sorted(singles)


def build_qucc_generator(m: MolecularIntegrals,
                         n_active_electrons: Optional[int] = None) -> QuccGenerator:
    """Unit-amplitude anti-Hermitian generator for the frozen integrals."""
    ne = m.n_electrons if n_active_electrons is None else n_active_electrons
    if ne <= 0:
        raise AnsatzError("no active electrons")
    n_modes = 2 * m.n_orbitals
    doubles, singles = enumerate_excitations(n_modes, ne)
    excitations: list[tuple[int, ...]] = []
    operators: list[FermionOperator] = []
    for p, q, r, s in doubles:
        op = FermionOperator.from_terms(n_modes, [
            (1.0, ((p, True), (q, True), (r, False), (s, False))),
            (-1.0, ((r, True), (s, True), (p, False), (q, False))),
        ])
        excitations.append((p, q, r, s))
        operators.append(op)
    for p, r in singles:
        op = FermionOperator.from_terms(n_modes, [
            (1.0, ((p, True), (r, False))),
            (-1.0, ((r, True), (p, False))),
        ])
        excitations.append((p, r))
        operators.append(op)
    return QuccGenerator(n_modes, ne, tuple(excitations), tuple(operators))


@dataclass(frozen=True)
class QuccAmplitudes:
    singles: dict
    doubles: dict

    def to_vector(self, gen: QuccGenerator) -> np.ndarray:
        theta = np.zeros(gen.n_parameters)
        for k, exc in enumerate(gen.excitations):
            table = self.doubles if len(exc) == 4 else self.singles
            theta[k] = table.get(exc, 0.0)
        return theta


def mp2_initial_amplitudes(m: MolecularIntegrals,
                           n_active_electrons: Optional[int] = None,
                           degeneracy_tol: float = 1e-10) -> QuccAmplitudes:
    """Moller-Plesset second-order amplitudes as the qUCC starting point.

    Singles vanish. A double (p, q, r, s) gets
        (<pq|sr> - <pq|rs>) / (eps_r + eps_s - eps_p - eps_q)
    over spin-orbitals, evaluated from the spatial chemists' integrals.
    Degenerate denominators yield a zero amplitude with a warning.
    """
    if m.orbital_energies is None:
        raise AnsatzError("MP2 amplitudes require orbital energies")
    ne = m.n_electrons if n_active_electrons is None else n_active_electrons
    g = m.h_two
    eps = m.orbital_energies
    doubles_idx, singles_idx = enumerate_excitations(2 * m.n_orbitals, ne)
    singles = {exc: 0.0 for exc in singles_idx}
    doubles = {}
    for p, q, r, s in doubles_idx:
        ps, qs, rs, ss = p // 2, q // 2, r // 2, s // 2
        # <PQ|SR> = (ps|qr) with spin(P)=spin(S), spin(Q)=spin(R)
        direct = 0.0
        if _spin(p) == _spin(s) and _spin(q) == _spin(r):
            direct = g[ps, ss, qs, rs]
        exchange = 0.0
        if _spin(p) == _spin(r) and _spin(q) == _spin(s):
            exchange = g[ps, rs, qs, ss]
        numer = direct - exchange
        denom = eps[rs] + eps[ss] - eps[ps] - eps[qs]
        if abs(denom) < degeneracy_tol:
            if abs(numer) > 1e-14:
                warnings.warn(
                    f"degenerate MP2 denominator for excitation {(p, q, r, s)}; "
                    "amplitude set to 0")
            doubles[(p, q, r, s)] = 0.0
        else:
            doubles[(p, q, r, s)] = numer / denom
    return QuccAmplitudes(singles=singles, doubles=doubles)


def _pauli_exponential_gates(letters: str, param_index: int,
                             scale: float) -> list[Gate]:
    """Gates for exp(-i * (scale/2) * theta_k * P) via the CNOT staircase."""
    active = [q for q, l in enumerate(letters) if l != "I"]
    if not active:
        return []  # global phase only
    basis_in, basis_out = [], []
    for q in active:
        l = letters[q]
        if l == "X":
            basis_in.append(Gate("H", (q,)))
            basis_out.append(Gate("H", (q,)))
        elif l == "Y":
            basis_in.append(Gate("RX", (q,), angle=np.pi / 2))
            basis_out.append(Gate("RX", (q,), angle=-np.pi / 2))
    chain = [Gate("CNOT", (a, b)) for a, b in zip(active, active[1:])]
    rz = Gate("RZ", (active[-1],), param=(param_index, scale))
    return basis_in + chain + [rz] + list(reversed(chain)) + list(reversed(basis_out))


def trotterize_qucc(gen: QuccGenerator, order: int = 1,
                    hermiticity_tol: float = 1e-10) -> ParameterizedCircuit:
    """First-order Trotter circuit for exp(T(theta)) after the HF layer.

    Every excitation operator is mapped through Jordan-Wigner; each of its
    Pauli strings i*c*P (c real) becomes one staircase exponential whose RZ
    angle is linear in the excitation's parameter.
    """
    if order != 1:
        raise AnsatzError("only first-order Trotterization is supported")
    gates: list[Gate] = [Gate("X", (q,)) for q in range(gen.n_active_electrons)]
    for k, op in enumerate(gen.operators):
        # anti-Hermitian fermionic input <=> purely imaginary JW coefficients
        jw = jordan_wigner(op)
        for letters, coeff in jw.sorted_items():
            if abs(coeff.real) > hermiticity_tol:
                raise AnsatzError(
                    "anti-Hermitian generator produced a real Pauli coefficient")
            gamma = coeff.imag
            if abs(gamma) <= 1e-14:
                continue
            # exp(theta_k * i*gamma*P) = exp(-i * (-gamma*theta_k) * P)
            gates.extend(_pauli_exponential_gates(letters, k, -2.0 * gamma))
    return ParameterizedCircuit(gen.n_modes, tuple(gates), gen.n_parameters,
                                {"family": "qucc",
                                 "excitations": gen.excitations})
