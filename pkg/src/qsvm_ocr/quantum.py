"""Dense state-vector / density-matrix primitives.

Qubit 0 is the most significant bit of the amplitude index, so a ket label
|q0 q1 ... q_{n-1}> reads top-to-bottom like a circuit diagram.

Rotations use the full-angle convention R_y(theta) = exp(-i theta sigma_y),
i.e. [[cos, -sin], [sin, cos]], so R_y(theta)|0> = cos(theta)|0> + sin(theta)|1>.
The textbook half-angle gate exp(-i theta sigma_y / 2) is ``ry_half(theta)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

ATOL = 1e-10


class QuantumError(ValueError):
    """Invalid state, gate, or qubit addressing."""


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def _log2(n: int) -> int:
    return n.bit_length() - 1


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if not _is_power_of_two(amps.size):
            raise QuantumError(f"state length {amps.size} is not a power of two")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ATOL:
            raise QuantumError(f"state is not normalized (norm={norm:.12g})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "n_qubits", _log2(amps.size))

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(amps)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """Computational basis state from a label such as ``"010"``."""
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    def __len__(self):
        return self.amplitudes.size

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        """|<self|other>|^2; insensitive to global phase."""
        return abs(self.inner(other)) ** 2

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(np.kron(self.amplitudes, other.amplitudes))

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    entries: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or not _is_power_of_two(rho.shape[0]):
            raise QuantumError(f"density matrix shape {rho.shape} is not 2^n x 2^n")
        if not np.allclose(rho, rho.conj().T, atol=ATOL, rtol=0):
            raise QuantumError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > ATOL:
            raise QuantumError(f"density matrix trace {np.trace(rho).real:.12g} != 1")
        if np.linalg.eigvalsh(rho).min() < -1e-9:
            raise QuantumError("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)
        object.__setattr__(self, "n_qubits", _log2(rho.shape[0]))

    def fidelity_pure(self, state: StateVector) -> float:
        """<psi|rho|psi>."""
        psi = state.amplitudes
        return float(np.real(np.vdot(psi, self.entries @ psi)))


@dataclass(frozen=True)
class Gate:
    matrix: np.ndarray
    name: str = ""
    arity: int = field(init=False)

    def __post_init__(self):
        u = np.array(self.matrix, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1] or not _is_power_of_two(u.shape[0]) or u.shape[0] < 2:
            raise QuantumError(f"gate shape {u.shape} is not 2^k x 2^k")
        if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=ATOL, rtol=0):
            raise QuantumError(f"gate {self.name or '<unnamed>'} is not unitary")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)
        object.__setattr__(self, "arity", _log2(u.shape[0]))

    def dagger(self) -> "Gate":
        return Gate(self.matrix.conj().T, name=f"{self.name}^dag" if self.name else "")


@dataclass(frozen=True)
class Observable:
    """Operator on k qubits. Need not be Hermitian (coherence terms are not)."""

    matrix: np.ndarray
    arity: int = field(init=False)

    def __post_init__(self):
        o = np.array(self.matrix, dtype=complex)
        if o.ndim != 2 or o.shape[0] != o.shape[1] or not _is_power_of_two(o.shape[0]) or o.shape[0] < 2:
            raise QuantumError(f"observable shape {o.shape} is not 2^k x 2^k")
        o.setflags(write=False)
        object.__setattr__(self, "matrix", o)
        object.__setattr__(self, "arity", _log2(o.shape[0]))


# -- standard gates ---------------------------------------------------------

_S2 = 1 / np.sqrt(2)
I2 = Gate(np.eye(2), "I")
X = Gate([[0, 1], [1, 0]], "X")
Y = Gate([[0, -1j], [1j, 0]], "Y")
Z = Gate([[1, 0], [0, -1]], "Z")
H = Gate([[_S2, _S2], [_S2, -_S2]], "H")
S = Gate([[1, 0], [0, 1j]], "S")
SWAP = Gate([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], "SWAP")


def ry(theta: float) -> Gate:
    """Full-angle y rotation exp(-i theta sigma_y)."""
    c, s = np.cos(theta), np.sin(theta)
    return Gate([[c, -s], [s, c]], f"Ry({theta:.6g})")


def ry_half(theta: float) -> Gate:
    """Half-angle y rotation exp(-i theta sigma_y / 2); ry_half(2t) == ry(t)."""
    return ry(theta / 2)


def identity(n_qubits: int) -> Gate:
    return Gate(np.eye(2**n_qubits), f"I{n_qubits}")


def controlled(gate: Gate, control_value: int = 1) -> Gate:
    """Prepend one control qubit; ``gate`` acts when the control equals ``control_value``."""
    if control_value not in (0, 1):
        raise QuantumError(f"control_value must be 0 or 1, got {control_value}")
    d = gate.matrix.shape[0]
    u = np.eye(2 * d, dtype=complex)
    sl = slice(d * control_value, d * (control_value + 1))
    u[sl, sl] = gate.matrix
    return Gate(u, f"C{control_value}-{gate.name}")


def multiplexed(gates: Sequence[Gate]) -> Gate:
    """Block-diagonal select: gate ``gates[k]`` acts on the targets when the control register holds k.

    The control register is the leading log2(len(gates)) qubits.
    """
    if not _is_power_of_two(len(gates)):
        raise QuantumError("number of multiplexed gates must be a power of two")
    d = gates[0].matrix.shape[0]
    if any(g.matrix.shape[0] != d for g in gates):
        raise QuantumError("multiplexed gates must share an arity")
    u = np.zeros((d * len(gates), d * len(gates)), dtype=complex)
    for k, g in enumerate(gates):
        u[k * d:(k + 1) * d, k * d:(k + 1) * d] = g.matrix
    return Gate(u, "MUX")


def householder_to_zero(v: np.ndarray) -> np.ndarray:
    """Unitary W with W v = |0...0> for unit vector v.

    Built as a Householder reflection. For real v the result is real
    orthogonal and carries no phase; for complex v the first column is
    phase-corrected so the image is exactly |0>.
    """
    v = np.asarray(v, dtype=complex).reshape(-1)
    d = v.size
    e0 = np.zeros(d, dtype=complex)
    e0[0] = 1.0
    # reflect onto e^{i arg v0}|0>, then strip the phase
    phase = v[0] / abs(v[0]) if abs(v[0]) > 1e-15 else 1.0
    w = v - phase * e0
    nw = np.linalg.norm(w)
    if nw < 1e-15:
        refl = np.eye(d, dtype=complex)
    else:
        w = w / nw
        refl = np.eye(d, dtype=complex) - 2 * np.outer(w, w.conj())
    # refl v = phase |0>
    out = refl.copy()
    out[0, :] *= np.conj(phase)
    return out


def state_prep(v: np.ndarray) -> Gate:
    """Unitary taking |0...0> to the unit vector v."""
    return Gate(householder_to_zero(v).conj().T, "PREP")


# -- simulation ---------------------------------------------------------------

def _check_targets(n: int, targets: Sequence[int]) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise QuantumError(f"targets {targets} are not distinct")
    for t in targets:
        if not 0 <= t < n:
            raise QuantumError(f"qubit index {t} out of range for {n} qubits")
    return targets


def _apply_matrix(amps: np.ndarray, n: int, matrix: np.ndarray, targets: tuple[int, ...]) -> np.ndarray:
    k = len(targets)
    psi = amps.reshape((2,) * n)
    op = matrix.reshape((2,) * (2 * k))
    # contract gate input axes with the target axes, then restore axis order
    out = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), list(targets)))
    out = np.moveaxis(out, list(range(k)), list(targets))
    return out.reshape(-1)


def apply_gate(state: StateVector, gate: Gate, targets: Sequence[int]) -> StateVector:
    """Apply ``gate`` on ``targets`` (gate's first qubit on ``targets[0]``)."""
    targets = _check_targets(state.n_qubits, targets)
    if gate.arity != len(targets):
        raise QuantumError(f"gate arity {gate.arity} does not match {len(targets)} targets")
    return StateVector(_apply_matrix(state.amplitudes, state.n_qubits, gate.matrix, targets))


def amplitude_encode(v) -> StateVector:
    """State with amplitudes v/|v| (length must be a power of two)."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise QuantumError("cannot amplitude-encode the zero vector")
    return StateVector(v / norm)


def partial_trace(state: StateVector, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix on ``keep`` (returned in the order given)."""
    keep = _check_targets(state.n_qubits, keep)
    if not keep:
        raise QuantumError("keep set must be nonempty")
    n = state.n_qubits
    traced = [q for q in range(n) if q not in keep]
    psi = np.moveaxis(state.amplitudes.reshape((2,) * n), list(keep) + traced, list(range(n)))
    psi = psi.reshape(2 ** len(keep), 2 ** len(traced))
    rho = psi @ psi.conj().T
    # exact Hermitian symmetrization to kill rounding asymmetry
    return DensityMatrix((rho + rho.conj().T) / 2)


def expectation(state: StateVector, obs: Observable, targets: Sequence[int]) -> complex:
    """<psi| O |psi> with O embedded on ``targets``."""
    targets = _check_targets(state.n_qubits, targets)
    if obs.arity != len(targets):
        raise QuantumError(f"observable acts on {obs.arity} qubits, got {len(targets)} targets")
    o_psi = _apply_matrix(state.amplitudes, state.n_qubits, obs.matrix, targets)
    return complex(np.vdot(state.amplitudes, o_psi))


def project(state: StateVector, qubits: Sequence[int], values: Sequence[int]) -> tuple[np.ndarray, float]:
    """Post-select ``qubits`` on ``values``.

    Returns the unnormalized amplitudes of the remaining qubits (original
    order) and the probability of the outcome.
    """
    qubits = _check_targets(state.n_qubits, qubits)
    n = state.n_qubits
    psi = state.amplitudes.reshape((2,) * n)
    index = [slice(None)] * n
    for q, v in zip(qubits, values):
        index[q] = int(v)
    branch = psi[tuple(index)].reshape(-1)
    return branch, float(np.vdot(branch, branch).real)


def qft_matrix(n_qubits: int) -> np.ndarray:
    d = 2**n_qubits
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)
