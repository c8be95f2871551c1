"""Exact references: sector-restricted diagonalization, 1-RDM and NOONs."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .fermion import FermionOperator, jordan_wigner
from .pauli import PauliSum
from .simulator import Statevector, _parity, _string_action, expectation_exact


class ReferenceError(ValueError):
    pass


@dataclass
class SpectrumResult:
    ground_energy: float      # includes the core energy
    ground_state: Statevector
    sector: int


@dataclass
class OneRdm:
    n_spatial: int
    matrix: np.ndarray        # spin-summed, real symmetric
    noons: np.ndarray         # eigenvalues, descending


def _sector_indices(n_qubits: int, n_electrons: int) -> np.ndarray:
    idx = np.arange(2 ** n_qubits)
    counts = np.zeros_like(idx)
    tmp = idx.copy()
    for _ in range(n_qubits):
        counts += tmp & 1
        tmp >>= 1
    return idx[counts == n_electrons]


def _sector_matrix(h: PauliSum, sector: np.ndarray, sparse: bool):
    """P H P restricted to the given basis indices."""
    order = np.argsort(sector)
    sec_sorted = sector[order]
    dim = sector.size
    if sparse:
        rows, cols, vals = [], [], []
    else:
        mat = np.zeros((dim, dim), dtype=complex)
    for letters, coeff in h.items():
        flip, sign, pref = _string_action(letters)
        targets = sector ^ flip
        pos = np.searchsorted(sec_sorted, targets)
        pos = np.clip(pos, 0, dim - 1)
        ok = sec_sorted[pos] == targets
        signs = 1.0 - 2.0 * _parity(sector & sign)
        vals_term = coeff * pref * signs
        # H[z^f, z] = w(z): row is the flipped state, column the source
        r = order[pos[ok]]
        c = np.nonzero(ok)[0]
        if sparse:
            rows.append(r)
            cols.append(c)
            vals.append(vals_term[ok])
        else:
            mat[r, c] += vals_term[ok]
    if sparse:
        return scipy.sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, dim)).tocsr()
    return mat


def ground_state(h: PauliSum, n_electrons: int, e_core: float = 0.0,
                 dense_cap: int = 12, cap: int = 16,
                 tol: float = 1e-10) -> SpectrumResult:
    """Lowest eigenpair of H restricted to the fixed particle-number sector.

    Dense Hermitian solve up to dense_cap qubits, Lanczos (ARPACK) above.
    """
    n = h.n_qubits
    if n > cap:
        raise ReferenceError(f"{n} qubits exceeds cap {cap}")
    if not 0 <= n_electrons <= n:
        raise ReferenceError(f"empty sector: {n_electrons} electrons on {n} qubits")
    sector = _sector_indices(n, n_electrons)
    if sector.size == 0:
        raise ReferenceError("empty particle-number sector")
    if sector.size == 1:
        mat = _sector_matrix(h, sector, sparse=False)
        energy, vec = float(mat[0, 0].real), np.ones(1, dtype=complex)
    elif n <= dense_cap:
        mat = _sector_matrix(h, sector, sparse=False)
        evals, evecs = np.linalg.eigh(mat)
        energy, vec = float(evals[0]), evecs[:, 0]
    else:
        mat = _sector_matrix(h, sector, sparse=True)
        evals, evecs = scipy.sparse.linalg.eigsh(mat, k=1, which="SA", tol=tol)
        energy, vec = float(evals[0]), evecs[:, 0]
    full = np.zeros(2 ** n, dtype=complex)
    full[sector] = vec
    return SpectrumResult(ground_energy=energy + e_core,
                          ground_state=Statevector(n, full),
                          sector=n_electrons)


def one_rdm(state: Statevector, n_spatial: int) -> OneRdm:
    """Spin-summed one-particle reduced density matrix and its NOONs."""
    if state.n_qubits != 2 * n_spatial:
        raise ReferenceError("state qubit count must be 2 * n_spatial")
    n_modes = state.n_qubits
    d = np.zeros((n_spatial, n_spatial))
    for p in range(n_spatial):
        for q in range(p + 1):
            val = 0.0
            for s in (0, 1):
                op = FermionOperator.from_terms(
                    n_modes, [(1.0, ((2 * p + s, True), (2 * q + s, False)))])
                herm = 0.5 * (op + op.dagger())
                val += expectation_exact(state, jordan_wigner(herm))
            d[p, q] = d[q, p] = val
    noons = np.sort(np.linalg.eigvalsh(d))[::-1]
    return OneRdm(n_spatial=n_spatial, matrix=d, noons=noons)


def noons_to_csv(rows: list[tuple[float, np.ndarray]]) -> str:
    """CSV rows (distortion_parameter, noon_1, ..., noon_n)."""
    if not rows:
        return ""
    n = len(rows[0][1])
    out = io.StringIO()
    out.write("distortion_parameter," +
              ",".join(f"noon_{i + 1}" for i in range(n)) + "\n")
    for param, noons in rows:
        out.write(f"{param:.10g}," +
                  ",".join(f"{x:.12g}" for x in noons) + "\n")
    return out.getvalue()
