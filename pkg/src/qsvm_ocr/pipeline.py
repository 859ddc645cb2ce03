"""Simulated quantum SVM: kernel from a reduced density matrix, training by
phase-estimation matrix inversion, classification by a coherence-term sign.

Register layout used throughout:

* kernel state |chi>:     [index (ceil log2 M)] [data]
* classifier states:      [index (ceil log2 (M+1))] [data] [ancilla]
  index slot 0 carries the offset term, slot k the k-th training vector.
* matrix inversion:       [clock (m)] [system] [rotation ancilla]
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quantum as q
from .svm import AMBIGUOUS_THRESHOLD, LABELS, TrainingSet, sign_label


class EigenphaseError(ValueError):
    """The matrix spectrum does not fit the phase-estimation register."""


@dataclass(frozen=True)
class QsvmConfig:
    gamma: float = 2.0
    phase_qubits: int = 2
    t0: float = math.pi / 2
    C: float | None = None
    postselect: str = "exact"
    shots: int = 10_000
    seed: int | None = None

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if int(self.phase_qubits) != self.phase_qubits or self.phase_qubits < 1:
            raise ValueError(f"phase_qubits must be a positive integer, got {self.phase_qubits}")
        if not self.t0 > 0:
            raise ValueError(f"t0 must be positive, got {self.t0}")
        if self.postselect not in ("exact", "sampled"):
            raise ValueError(f"postselect must be 'exact' or 'sampled', got {self.postselect!r}")
        if self.postselect == "sampled" and self.shots < 1:
            raise ValueError("sampled mode needs at least one shot")
        if self.C is not None:
            if not self.C > 0:
                raise ValueError(f"C must be positive, got {self.C}")
            if self.C > self.min_register_eigenvalue * (1 + 1e-12):
                raise EigenphaseError(
                    f"C={self.C:.6g} exceeds the smallest representable eigenvalue "
                    f"{self.min_register_eigenvalue:.6g}"
                )

    @property
    def min_register_eigenvalue(self) -> float:
        """Eigenvalue encoded by clock value 1: 2 pi / (t0 2^m)."""
        return 2 * math.pi / self.t0 / 2**self.phase_qubits

    @property
    def inversion_constant(self) -> float:
        return self.min_register_eigenvalue if self.C is None else self.C


@dataclass(frozen=True)
class OracleSpec:
    angles: np.ndarray
    norms: np.ndarray


@dataclass(frozen=True)
class HhlResult:
    solution: q.StateVector
    success_probability: float


@dataclass(frozen=True)
class ClassificationResult:
    expectation: complex
    label: int
    postselect_probability: float
    overlap: complex = 0j
    alphas: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def character(self) -> str:
        return LABELS[self.label]


def _n_bits(count: int) -> int:
    return max(1, math.ceil(math.log2(count)))


def _pad(v, size):
    out = np.zeros(size, dtype=complex)
    out[: len(v)] = v
    return out


# -- training-data oracle -----------------------------------------------------

def _angle(x) -> float:
    theta = math.atan2(x[1], x[0])
    return math.pi if theta == -math.pi else theta


def oracle_angles(ts: TrainingSet) -> OracleSpec:
    """Angles theta_i with R_y(theta_i)|0> = |x_i> (full-angle convention)."""
    if ts.N != 2:
        raise ValueError(f"oracle needs 2-dimensional features (one data qubit), got N={ts.N}")
    angles = np.array([_angle(x) for x in ts.vectors])
    return OracleSpec(angles=angles, norms=np.linalg.norm(ts.vectors, axis=1))


def oracle_gate(angles, n_index: int) -> q.Gate:
    """Index-controlled R_y on the data qubit; unused index slots get the identity."""
    gates = [q.ry(a) for a in angles]
    gates += [q.I2] * (2**n_index - len(gates))
    return q.multiplexed(gates)


def _encode(coeffs, angles, n_index: int) -> q.StateVector:
    """Run the two-stage preparation: index amplitudes, then the oracle."""
    coeffs = _pad(coeffs, 2**n_index)
    state = q.StateVector.zero(n_index + 1)
    state = q.apply_gate(state, q.state_prep(coeffs / np.linalg.norm(coeffs)), range(n_index))
    return q.apply_gate(state, oracle_gate(angles, n_index), range(n_index + 1))


# -- kernel -------------------------------------------------------------------

def build_chi(ts: TrainingSet, pad: bool = True) -> q.StateVector:
    """|chi> = N_chi^{-1/2} sum_i |x_i| |i>|x_i>."""
    m = ts.M
    if not pad and m & (m - 1):
        raise ValueError(f"M={m} is not a power of two and padding is disabled")
    spec = oracle_angles(ts)
    return _encode(spec.norms, spec.angles, _n_bits(m))


def kernel_via_discard(chi: q.StateVector, ts: TrainingSet) -> q.DensityMatrix:
    """Trace out the data qubit; the index register is left holding K / tr K."""
    return q.partial_trace(chi, keep=range(chi.n_qubits - 1))


def kernel_from_density(rho: q.DensityMatrix, ts: TrainingSet) -> np.ndarray:
    """Undo the tr K normalization; tr K = sum |x_i|^2 is known from the oracle norms."""
    trace_k = float(np.sum(np.linalg.norm(ts.vectors, axis=1) ** 2))
    return rho.entries[: ts.M, : ts.M].real * trace_k


# -- matrix inversion -----------------------------------------------------------

def _check_spectrum(F, cfg: QsvmConfig):
    lam, vecs = np.linalg.eigh(F)
    if lam.min() <= 0:
        raise EigenphaseError(f"matrix must be positive definite, smallest eigenvalue {lam.min():.6g}")
    phase = lam.max() * cfg.t0 / (2 * math.pi)
    if phase >= 1:
        raise EigenphaseError(
            f"eigenphase {phase:.6g} >= 1 overflows the clock register; use t0 < {2 * math.pi / lam.max():.6g}"
        )
    return lam, vecs


def hhl_solve(F, y_state: q.StateVector, cfg: QsvmConfig = QsvmConfig()) -> HhlResult:
    """Phase estimation of exp(i F t0), eigenvalue-conditioned rotation, uncompute.

    The solution is the system register after post-selecting the rotation
    ancilla on |1> and the clock on |0...0>. ``success_probability`` is the
    weight of the ancilla-|1> branch alone.
    """
    F = np.asarray(F, dtype=float)
    if F.ndim != 2 or F.shape[0] != F.shape[1] or F.shape[0] != len(y_state):
        raise ValueError(f"matrix shape {F.shape} does not match state length {len(y_state)}")
    if not np.allclose(F, F.T, atol=1e-12):
        raise ValueError("matrix must be symmetric")
    lam, vecs = _check_spectrum(F, cfg)

    m = cfg.phase_qubits
    s = y_state.n_qubits
    clock = list(range(m))
    system = list(range(m, m + s))
    anc = m + s

    def evolution(power):
        return q.Gate((vecs * np.exp(1j * lam * cfg.t0 * power)) @ vecs.conj().T)

    powered = [q.controlled(evolution(2 ** (m - 1 - j))) for j in range(m)]
    powered_inv = [g.dagger() for g in powered]
    iqft = q.Gate(q.qft_matrix(m).conj().T, "IQFT")

    c = cfg.inversion_constant
    rotations = [q.I2]
    for k in range(1, 2**m):
        lam_k = k * cfg.min_register_eigenvalue
        rotations.append(q.ry(math.asin(min(1.0, c / lam_k))))
    rotation = q.multiplexed(rotations)

    state = q.StateVector.zero(m).tensor(y_state).tensor(q.StateVector.zero(1))
    for j in clock:
        state = q.apply_gate(state, q.H, [j])
    for j in clock:
        state = q.apply_gate(state, powered[j], [j] + system)
    state = q.apply_gate(state, iqft, clock)
    state = q.apply_gate(state, rotation, clock + [anc])
    state = q.apply_gate(state, iqft.dagger(), clock)
    for j in reversed(clock):
        state = q.apply_gate(state, powered_inv[j], [j] + system)
    for j in clock:
        state = q.apply_gate(state, q.H, [j])

    _, p_success = q.project(state, [anc], [1])
    branch, _ = q.project(state, clock + [anc], [0] * m + [1])
    norm = np.linalg.norm(branch)
    if norm < 1e-12:
        raise EigenphaseError("inversion branch vanished; no eigenvalue was resolved by the clock register")
    return HhlResult(solution=q.StateVector(branch / norm), success_probability=min(1.0, p_success))


def label_state(labels) -> q.StateVector:
    """|y>: R_y(-pi/4)|0> for labels (+1, -1), amplitude encoding otherwise."""
    labels = np.asarray(labels, dtype=float)
    if labels.size == 2 and labels[0] == 1 and labels[1] == -1:
        return q.apply_gate(q.StateVector.zero(1), q.ry(-math.pi / 4), [0])
    return q.amplitude_encode(_pad(labels, 2 ** _n_bits(labels.size)))


# -- classification states ------------------------------------------------------

def prepare_u_tilde(alphas, b: float, ts: TrainingSet) -> q.StateVector:
    """N^{-1/2} (b|0>|0> + sum_k |x_k| alpha_k |k>|x_k>)."""
    alphas = np.asarray(alphas, dtype=float)
    spec = oracle_angles(ts)
    coeffs = np.concatenate([[b], alphas * spec.norms])
    if not np.any(coeffs):
        raise ValueError("offset and all weights are zero")
    return _encode(coeffs, np.concatenate([[0.0], spec.angles]), _n_bits(ts.M + 1))


def prepare_x0_tilde(x0, M: int) -> q.StateVector:
    """N^{-1/2} (|0>|0> + sum_k |x0| |k>|x0>), with N = 1 + M |x0|^2."""
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.size != 2:
        raise ValueError(f"query must be 2-dimensional, got {x0.size}")
    norm = np.linalg.norm(x0)
    if norm == 0:
        raise ValueError("query vector is zero")
    coeffs = np.concatenate([[1.0], np.full(M, norm)])
    return _encode(coeffs, np.concatenate([[0.0], np.full(M, _angle(x0))]), _n_bits(M + 1))


def u_x0_unitary(x0_tilde: q.StateVector) -> q.Gate:
    """Unitary whose |0...0> row is <x0_tilde| (Householder completion)."""
    return q.Gate(q.householder_to_zero(x0_tilde.amplitudes), "U_x0")


def coherence_observable(n_register: int) -> q.Observable:
    """|0...0><0...0| on the register tensored with |0><1| on the ancilla (last)."""
    proj = np.zeros((2**n_register, 2**n_register))
    proj[0, 0] = 1.0
    return q.Observable(np.kron(proj, [[0, 1], [0, 0]]))


def readout_state(u_tilde: q.StateVector, x0_tilde: q.StateVector) -> q.StateVector:
    """(|0...0>|0>_A + U_x0|u_tilde>|1>_A) / sqrt 2, ancilla last."""
    n = u_tilde.n_qubits
    register = list(range(n))
    anc = n
    prep = q.state_prep(u_tilde.amplitudes).matrix
    branch = q.Gate(u_x0_unitary(x0_tilde).matrix @ prep, "U_x0 PREP")
    state = q.StateVector.zero(n + 1)
    state = q.apply_gate(state, q.H, [anc])
    return q.apply_gate(state, q.controlled(branch, 1), [anc] + register)


def _sampled_coherence(psi: q.StateVector, n_register: int, shots: int, rng) -> complex:
    """Estimate <P (x) |0><1|> = (<P X> + i <P Y>) / 2 from basis measurements."""
    anc = n_register
    estimates = []
    for basis_change in (q.H, q.Gate(q.H.matrix @ q.S.matrix.conj().T)):
        rotated = q.apply_gate(psi, basis_change, [anc])
        probs = np.abs(rotated.amplitudes) ** 2
        outcomes = rng.choice(probs.size, size=shots, p=probs / probs.sum())
        register_zero = (outcomes >> 1) == 0
        sign = np.where(outcomes & 1, -1.0, 1.0)
        estimates.append(np.mean(register_zero * sign))
    return complex(estimates[0] / 2, estimates[1] / 2)


def qsvm_classify(ts: TrainingSet, x0, cfg: QsvmConfig = QsvmConfig()) -> ClassificationResult:
    """Run the simulated quantum pipeline end to end for one query."""
    rng = np.random.default_rng(cfg.seed)

    chi = build_chi(ts)
    K = kernel_from_density(kernel_via_discard(chi, ts), ts)

    size = 2 ** _n_bits(ts.M)
    F = np.eye(size)
    F[: ts.M, : ts.M] = K + np.eye(ts.M) / cfg.gamma
    inv = hhl_solve(F, label_state(ts.labels), cfg)
    alphas = inv.solution.amplitudes[: ts.M].real

    u_tilde = prepare_u_tilde(alphas, 0.0, ts)
    x0_tilde = prepare_x0_tilde(x0, ts.M)
    psi = readout_state(u_tilde, x0_tilde)
    n_register = u_tilde.n_qubits

    if cfg.postselect == "exact":
        value = q.expectation(psi, coherence_observable(n_register), range(n_register + 1))
        p_success = inv.success_probability
    else:
        value = _sampled_coherence(psi, n_register, cfg.shots, rng)
        p_success = rng.binomial(cfg.shots, inv.success_probability) / cfg.shots

    return ClassificationResult(
        expectation=value,
        label=sign_label(value.real, AMBIGUOUS_THRESHOLD),
        postselect_probability=p_success,
        overlap=x0_tilde.inner(u_tilde),
        alphas=alphas,
    )
