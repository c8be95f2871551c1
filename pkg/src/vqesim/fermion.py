"""Molecular-integral ingestion, orbital freezing and Jordan-Wigner mapping.

Spin-orbitals are interleaved: spatial orbital p maps to spin-orbitals
2p (alpha) and 2p+1 (beta). Two-body integrals are stored in chemists'
notation (pq|rs) as read from FCIDUMP; the conversion to physicists'
ordering happens when the second-quantized Hamiltonian is assembled.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .pauli import PauliSum, multiply_letters


class IntegralError(ValueError):
    pass


@dataclass
class MolecularIntegrals:
    """One- and two-body integrals over spatial orbitals, in Hartree."""

    n_orbitals: int
    n_electrons: int
    e_core: float
    h_one: np.ndarray
    h_two: np.ndarray                  # chemists' (pq|rs)
    two_body_convention: str = "chemist"
    orbital_energies: Optional[np.ndarray] = None
    noons: Optional[np.ndarray] = None

    def validate(self, tol: float = 1e-10) -> None:
        n = self.n_orbitals
        if self.h_one.shape != (n, n):
            raise IntegralError("h_one has wrong shape")
        if self.h_two.shape != (n, n, n, n):
            raise IntegralError("h_two has wrong shape")
        if self.n_electrons > 2 * n:
            raise IntegralError("more electrons than spin-orbitals")
        if not np.allclose(self.h_one, self.h_one.T, atol=tol):
            raise IntegralError("h_one is not symmetric")
        g = self.h_two
        if self.two_body_convention != "chemist":
            raise IntegralError(
                f"unsupported convention {self.two_body_convention!r}")
        # 8-fold permutational symmetry of real chemists' integrals
        for perm in (g.transpose(1, 0, 2, 3), g.transpose(0, 1, 3, 2),
                     g.transpose(2, 3, 0, 1)):
            if not np.allclose(g, perm, atol=tol):
                raise IntegralError("h_two violates 8-fold symmetry")
        if self.noons is not None:
            if abs(float(np.sum(self.noons)) - self.n_electrons) > 1e-6:
                raise IntegralError("noons do not sum to the electron count")


@dataclass(frozen=True)
class ActiveSpace:
    """Partition of spatial orbitals into active and frozen-occupied sets."""

    active: tuple[int, ...]
    occupied_frozen: tuple[int, ...]
    n_active_electrons: int

    def __post_init__(self):
        if set(self.active) & set(self.occupied_frozen):
            raise IntegralError("active and frozen sets overlap")
        if self.n_active_electrons < 0:
            raise IntegralError("negative active electron count")


_HEADER_RE = re.compile(r"NORB\s*=\s*(\d+)", re.IGNORECASE)
_NELEC_RE = re.compile(r"NELEC\s*=\s*(\d+)", re.IGNORECASE)


def parse_fcidump(text: str) -> MolecularIntegrals:
    """Parse FCIDUMP text into MolecularIntegrals (chemists' two-body).

    Special records: ``v 0 0 0 0`` sets the core energy, ``v i j 0 0``
    a one-body element, ``v i 0 0 0`` an orbital energy.
    """
    lines = text.splitlines()
    header = []
    body_start = None
    for k, line in enumerate(lines):
        header.append(line)
        if "&END" in line.upper() or line.strip() == "/":
            body_start = k + 1
            break
    if body_start is None:
        raise IntegralError("FCIDUMP header has no &END / terminator")
    head = " ".join(header)
    m_norb = _HEADER_RE.search(head)
    m_nelec = _NELEC_RE.search(head)
    if not m_norb or not m_nelec or "&FCI" not in head.upper():
        raise IntegralError("malformed FCIDUMP header")
    n = int(m_norb.group(1))
    nelec = int(m_nelec.group(1))

    h_one = np.zeros((n, n))
    h_two = np.zeros((n, n, n, n))
    seen_one = np.zeros((n, n), dtype=bool)
    seen_two = np.zeros((n, n, n, n), dtype=bool)
    e_core = 0.0
    seen_core = False
    energies: dict[int, float] = {}

    for line in lines[body_start:]:
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise IntegralError(f"malformed record: {line!r}")
        val = float(parts[0])
        i, j, k, l = (int(p) for p in parts[1:])
        for idx in (i, j, k, l):
            if idx < 0 or idx > n:
                raise IntegralError(f"orbital index out of range: {line!r}")
        if i == j == k == l == 0:
            if seen_core:
                raise IntegralError("duplicate core-energy record")
            e_core = val
            seen_core = True
        elif j == k == l == 0:
            if i in energies:
                raise IntegralError(f"duplicate orbital-energy record for {i}")
            energies[i] = val
        elif k == l == 0:
            if i == 0 or j == 0:
                raise IntegralError(f"malformed one-body record: {line!r}")
            a, b = i - 1, j - 1
            if seen_one[a, b] and not np.isclose(h_one[a, b], val):
                raise IntegralError(f"conflicting one-body record: {line!r}")
            h_one[a, b] = h_one[b, a] = val
            seen_one[a, b] = seen_one[b, a] = True
        else:
            if 0 in (i, j, k, l):
                raise IntegralError(f"malformed two-body record: {line!r}")
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            for a, b, c, d in _eightfold(p, q, r, s):
                if seen_two[a, b, c, d] and not np.isclose(h_two[a, b, c, d], val):
                    raise IntegralError(f"conflicting two-body record: {line!r}")
                h_two[a, b, c, d] = val
                seen_two[a, b, c, d] = True

    orbital_energies = None
    if energies:
        orbital_energies = np.zeros(n)
        for i, val in energies.items():
            orbital_energies[i - 1] = val
    m = MolecularIntegrals(n_orbitals=n, n_electrons=nelec, e_core=e_core,
                           h_one=h_one, h_two=h_two,
                           orbital_energies=orbital_energies)
    m.validate()
    return m


def _eightfold(p, q, r, s):
    return {(p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
            (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)}


def write_fcidump(m: MolecularIntegrals, tol: float = 1e-15) -> str:
    """Serialize integrals to FCIDUMP text (inverse of parse_fcidump)."""
    n = m.n_orbitals
    out = [f" &FCI NORB={n},NELEC={m.n_electrons},MS2=0,", " &END"]
    fmt = "{: .16e} {:4d} {:4d} {:4d} {:4d}"
    for p in range(n):
        for q in range(p + 1):
            for r in range(p + 1):
                smax = q if r == p else r
                for s in range(smax + 1):
                    v = m.h_two[p, q, r, s]
                    if abs(v) > tol:
                        out.append(fmt.format(v, p + 1, q + 1, r + 1, s + 1))
    for p in range(n):
        for q in range(p + 1):
            if abs(m.h_one[p, q]) > tol:
                out.append(fmt.format(m.h_one[p, q], p + 1, q + 1, 0, 0))
    if m.orbital_energies is not None:
        for p in range(n):
            out.append(fmt.format(m.orbital_energies[p], p + 1, 0, 0, 0))
    out.append(fmt.format(m.e_core, 0, 0, 0, 0))
    return "\n".join(out) + "\n"


def load_sidecar(path_or_text: str, is_text: bool = False) -> dict:
    """Load the sidecar JSON carrying `noons` and/or `orbital_energies`."""
    if is_text:
        data = json.loads(path_or_text)
    else:
        with open(path_or_text) as fh:
            data = json.load(fh)
    out = {}
    if "noons" in data:
        out["noons"] = np.asarray(data["noons"], dtype=float)
    if "orbital_energies" in data:
        out["orbital_energies"] = np.asarray(data["orbital_energies"], dtype=float)
    return out


def apply_sidecar(m: MolecularIntegrals, sidecar: dict) -> MolecularIntegrals:
    if "noons" in sidecar:
        m.noons = sidecar["noons"]
    if "orbital_energies" in sidecar:
        m.orbital_energies = sidecar["orbital_energies"]
    m.validate()
    return m


def select_active_space(m: MolecularIntegrals, eps1: float,
                        eps2: float) -> ActiveSpace:
    """Threshold-based orbital selection from natural occupation numbers.

    An orbital is active if its occupation lies in [eps2, 2-eps1], or if
    it is nearly doubly occupied but not deep enough below the Fermi level
    (counting orbitals from 1, orbital i is frozen when 2(i+1) < n_elec).
    Nearly doubly occupied orbitals failing that cutoff are frozen;
    everything else is discarded as virtual.
    """
    if m.noons is None:
        raise IntegralError("active-space selection requires noons")
    if not (0 < eps2 < 2 - eps1):
        raise IntegralError("thresholds must satisfy 0 < eps2 < 2 - eps1")
    active, frozen = [], []
    for i, ni in enumerate(m.noons):
        high = ni >= 2 - eps1
        if high and 2 * (i + 2) < m.n_electrons:
            frozen.append(i)
        elif high or eps2 <= ni <= 2 - eps1:
            active.append(i)
    if not active:
        raise IntegralError("active space is empty")
    n_act = m.n_electrons - 2 * len(frozen)
    return ActiveSpace(tuple(active), tuple(frozen), n_act)


def freeze_orbitals(m: MolecularIntegrals, a: ActiveSpace) -> MolecularIntegrals:
    """Fold frozen-occupied orbitals into h_one and the core energy.

    h'_pq = h_pq + sum_i [2(pq|ii) - (pi|iq)]
    E'    = E + sum_i 2 h_ii + sum_ij [2(ii|jj) - (ij|ji)]
    """
    for i in list(a.active) + list(a.occupied_frozen):
        if not 0 <= i < m.n_orbitals:
            raise IntegralError(f"orbital index {i} out of range")
    act = list(a.active)
    occ = list(a.occupied_frozen)
    g = m.h_two
    h = m.h_one.copy()
    e_core = m.e_core
    for i in occ:
        e_core += 2 * h[i, i]  # one-body term counts both spins
    for i in occ:
        for j in occ:
            e_core += 2 * g[i, i, j, j] - g[i, j, j, i]
    for i in occ:
        h += 2 * g[:, :, i, i] - g[:, i, i, :]
    idx = np.ix_(act, act)
    h_act = h[idx]
    g_act = g[np.ix_(act, act, act, act)]
    return MolecularIntegrals(
        n_orbitals=len(act),
        n_electrons=a.n_active_electrons,
        e_core=e_core,
        h_one=h_act,
        h_two=g_act,
        orbital_energies=(None if m.orbital_energies is None
                          else m.orbital_energies[act]),
        noons=None if m.noons is None else m.noons[act],
    )


# ---------------------------------------------------------------------------
# fermionic operators

@dataclass(frozen=True)
class FermionOperator:
    """Sum of products of creation/annihilation operators.

    Each term is (coefficient, ops) where ops is a tuple of
    (spin_orbital_index, is_dagger) applied left to right.
    """

    n_modes: int
    terms: tuple[tuple[complex, tuple[tuple[int, bool], ...]], ...]

    def __post_init__(self):
        for _, ops in self.terms:
            for idx, _ in ops:
                if not 0 <= idx < self.n_modes:
                    raise IntegralError(f"mode index {idx} out of range")

    @classmethod
    def from_terms(cls, n_modes: int, terms: Iterable) -> "FermionOperator":
        kept = tuple((complex(c), tuple((int(i), bool(d)) for i, d in ops))
                     for c, ops in terms if abs(complex(c)) > 1e-14)
        return cls(n_modes, kept)

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        if self.n_modes != other.n_modes:
            raise IntegralError("mode-count mismatch")
        return FermionOperator.from_terms(self.n_modes,
                                          self.terms + other.terms)

    def __mul__(self, scalar) -> "FermionOperator":
        return FermionOperator.from_terms(
            self.n_modes, ((c * complex(scalar), ops) for c, ops in self.terms))

    __rmul__ = __mul__

    def dagger(self) -> "FermionOperator":
        terms = []
        for c, ops in self.terms:
            terms.append((np.conj(c),
                          tuple((i, not d) for i, d in reversed(ops))))
        return FermionOperator.from_terms(self.n_modes, terms)

    def is_zero(self) -> bool:
        return not self.terms


def build_hamiltonian(m: MolecularIntegrals) -> FermionOperator:
    """Second-quantized Hamiltonian over 2*n_orbitals interleaved spin-orbitals.

    H = sum_pq h_pq a+_ps a_qs
      + 1/2 sum_pqrs (pq|rs) sum_st a+_ps a+_rt a_st a_qs
    """
    m.validate()
    n = m.n_orbitals
    n_so = 2 * n
    terms = []
    for p in range(n):
        for q in range(n):
            c = m.h_one[p, q]
            if abs(c) < 1e-14:
                continue
            for sp in (0, 1):
                terms.append((c, ((2 * p + sp, True), (2 * q + sp, False))))
    g = m.h_two
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    c = 0.5 * g[p, q, r, s]
                    if abs(c) < 1e-14:
                        continue
                    for sp in (0, 1):
                        for st in (0, 1):
                            P, Q = 2 * p + sp, 2 * q + sp
                            R, S = 2 * r + st, 2 * s + st
                            if P == R or Q == S:
                                continue  # a+a+ / aa on equal modes vanish
                            terms.append(
                                (c, ((P, True), (R, True), (S, False), (Q, False))))
    return FermionOperator.from_terms(n_so, terms)


def _ladder_pauli(n_qubits: int, i: int, dagger: bool) -> PauliSum:
    # a_i(+) -> (prod_{j<i} Z_j) (X_i -+ i Y_i)/2
    prefix = "Z" * i
    suffix = "I" * (n_qubits - i - 1)
    x_term = prefix + "X" + suffix
    y_term = prefix + "Y" + suffix
    y_coeff = -0.5j if dagger else 0.5j
    return PauliSum(n_qubits, {x_term: 0.5, y_term: y_coeff})


def jordan_wigner(f: FermionOperator) -> PauliSum:
    """Map a FermionOperator to a PauliSum on n_modes qubits."""
    n = f.n_modes
    total: dict[str, complex] = {}
    cache: dict[tuple[int, bool], PauliSum] = {}
    for coeff, ops in f.terms:
        if not ops:
            key = "I" * n
            total[key] = total.get(key, 0) + coeff
            continue
        prod = None
        for op in ops:
            if op not in cache:
                cache[op] = _ladder_pauli(n, op[0], op[1])
            prod = cache[op] if prod is None else prod * cache[op]
        for letters, c in prod.items():
            total[letters] = total.get(letters, 0) + coeff * c
    return PauliSum(n, total)
