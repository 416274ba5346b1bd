"""Coherent and semiclassical (measured) quantum Fourier transform.

Exact statevector simulation for up to 12 qubits.  The semiclassical
QFT measures each qubit in turn, most significant first, applying the
controlled phase rotations classically conditioned on earlier outcomes;
all 2^n measurement branches are enumerated exactly (no sampling), and
the outcome register is read out in reverse bit order, after which the
distribution coincides with |coherent QFT|^2.  An optional sampled mode
with a seeded generator produces synthetic "measured" datasets, and a
depolarizing knob generates imperfect distributions for overlap
exercises.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import ValidationError

MAX_QUBITS = 12
NORM_TOL = 1e-12
PROB_TOL = 1e-9

STATE_KINDS = ("period1", "period2", "period3", "period4", "period8",
               "period3_phase")


@dataclass(frozen=True)
class PureState:
    """A normalized n-qubit state; amplitudes indexed MSB-first."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        n = amps.size
        if n < 2 or (n & (n - 1)) != 0:
            raise ValidationError(f"amplitude count must be a power of two, got {n}")
        if n > 2 ** MAX_QUBITS:
            raise ValidationError(f"at most {MAX_QUBITS} qubits supported")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL * 100:
            raise ValidationError(f"state is not normalized: |psi|^2 = {norm}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self):
        return int(round(math.log2(self.amplitudes.size)))


@dataclass(frozen=True)
class Distribution:
    """Probabilities over the 2^n computational outcomes."""

    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if np.any(p < -PROB_TOL):
            raise ValidationError("probabilities must be nonnegative")
        total = float(np.sum(p))
        if abs(total - 1.0) > PROB_TOL * 100:
            raise ValidationError(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "probabilities", np.clip(p, 0.0, None))

    def __getitem__(self, idx):
        return float(self.probabilities[idx])


def state_from_kets(kets, phases=None, n_qubits=3):
    """Uniform superposition of computational basis states (normalized)."""
    amps = np.zeros(2 ** n_qubits, dtype=complex)
    phases = phases if phases is not None else [0.0] * len(kets)
    for k, ph in zip(kets, phases):
        amps[k] += np.exp(1j * ph)
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValidationError("empty superposition")
    return PureState(amps / norm)


def prepare(kind, phi_r=0.0):
    """Prepare one of the periodic 3-qubit test states.

    kind: 'period1', 'period2', 'period3', 'period4', 'period8' or
    'period3_phase' (which adds the relative phase phi_r to the second
    and fourth components of the period-3 state).
    """
    if kind == "period1":
        return state_from_kets(range(8))
    if kind == "period2":
        return state_from_kets([0b001, 0b011, 0b101, 0b111])
    if kind == "period3":
        return state_from_kets([0b001, 0b011, 0b100, 0b110])
    if kind == "period3_phase":
        return state_from_kets([0b001, 0b011, 0b100, 0b110],
                               phases=[0.0, phi_r, 0.0, phi_r])
    if kind == "period4":
        return state_from_kets([0b011, 0b111])
    if kind == "period8":
        return state_from_kets([0b111])
    raise ValidationError(f"unknown state kind {kind!r}; choose from {STATE_KINDS}")


def coherent_qft(state):
    """Unitary QFT: |k> -> (1/sqrt(N)) sum_j exp(i 2 pi j k / N) |j>."""
    x = state.amplitudes
    n = x.size
    # numpy's inverse FFT uses the e^{+2 pi i jk/N} kernel with a 1/N factor
    y = np.fft.ifft(x) * math.sqrt(n)
    return PureState(y)


def inverse_qft(state):
    y = np.fft.fft(state.amplitudes) / math.sqrt(state.amplitudes.size)
    return PureState(y)


def product_form_qft(state):
    """QFT via the binary-fraction product form plus bit reversal.

    Internal cross-check of :func:`coherent_qft`: builds the circuit
    unitary from Hadamards and controlled phase rotations.
    """
    n = state.n_qubits
    psi = state.amplitudes.reshape((2,) * n)
    for i in range(n):
        for l in range(i):
            # controlled phase exp(2 pi i / 2^(i-l+1)) between qubits l and i
            theta = 2.0 * math.pi / 2 ** (i - l + 1)
            psi = _controlled_phase(psi, l, i, theta)
        psi = _hadamard(psi, i)
    amps = psi.reshape(-1)
    return PureState(amps[_bit_reversal_permutation(n)])


def _hadamard(psi, axis):
    a = np.take(psi, 0, axis=axis)
    b = np.take(psi, 1, axis=axis)
    out = np.stack([(a + b), (a - b)], axis=axis) / math.sqrt(2.0)
    return out


def _controlled_phase(psi, axis_a, axis_b, theta):
    psi = psi.copy()
    idx = [slice(None)] * psi.ndim
    idx[axis_a] = 1
    idx[axis_b] = 1
    psi[tuple(idx)] *= np.exp(1j * theta)
    return psi


def bit_reverse_index(j, n_qubits):
    out = 0
    for _ in range(n_qubits):
        out = (out << 1) | (j & 1)
        j >>= 1
    return out


def _bit_reversal_permutation(n_qubits):
    return np.array([bit_reverse_index(j, n_qubits)
                     for j in range(2 ** n_qubits)])


def semiclassical_qft(state, readout_reversed=True, conjugate_rotations=False):
    """Measured QFT by exact enumeration of all measurement branches.

    Each qubit (most significant first) receives the classically
    conditioned phase rotation accumulated from earlier measurement
    outcomes, a Hadamard, and a projective measurement; the 2^n branch
    probabilities are computed exactly.  With the default reverse-order
    readout the distribution equals |coherent_qft(state)|^2.

    ``conjugate_rotations`` selects the conjugated hardware convention
    (each qubit ends as |0> - e^{-i 2 pi [0.k...]} |1>); it leaves the
    distribution unchanged for real-amplitude inputs and mirrors the
    sign of input relative phases otherwise.
    """
    n = state.n_qubits
    sign = -1.0 if conjugate_rotations else 1.0
    probs = np.zeros(2 ** n)
    psi0 = state.amplitudes.reshape((2,) * n)

    def descend(psi, bits):
        i = len(bits)                     # qubit being processed, 0-based
        theta = sign * 2.0 * math.pi * sum(
            m / 2 ** (i - l + 1) for l, m in enumerate(bits))
        # feedforward phase on |1> of the current qubit, then the Hadamard-like
        # rotation; the conjugated convention's extra sign on |1> is a pure
        # output phase and never reaches the probabilities
        a = psi[0]
        b = psi[1] * np.exp(1j * theta)
        branch0 = (a + b) / math.sqrt(2.0)
        branch1 = (a - b) / math.sqrt(2.0)
        for outcome, sub in ((0, branch0), (1, branch1)):
            new_bits = bits + (outcome,)
            if i + 1 == n:
                m = 0
                for bit in new_bits:
                    m = (m << 1) | bit
                probs[m] = float(np.abs(sub) ** 2)
            else:
                descend(sub, new_bits)

    descend(psi0, ())
    if readout_reversed:
        probs = probs[_bit_reversal_permutation(n)]
    return Distribution(probs)


def measurement_distribution(state):
    """|amplitudes|^2 of a pure state as a Distribution."""
    return Distribution(np.abs(state.amplitudes) ** 2)


def sso(measured, expected):
    """Squared statistical overlap (sum_j sqrt(m_j) sqrt(e_j))^2 in [0, 1].

    Computed as sqrt(m_j e_j) inside the sum: IEEE square roots of exact
    products make the identical-distribution case come out exactly 1.
    """
    m = measured.probabilities
    e = expected.probabilities
    if m.shape != e.shape:
        raise ValidationError("distributions have different sizes")
    return float(np.sum(np.sqrt(m * e)) ** 2)


def phase_sweep(phis):
    """Semiclassical-QFT output of the phased period-3 state on a phi grid.

    Returns an array of shape (len(phis), 8); each row sums to 1.
    """
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    rows = [semiclassical_qft(prepare("period3_phase", phi_r=phi)).probabilities
            for phi in phis]
    return np.array(rows)


def sample_semiclassical(state, shots, seed):
    """Synthetic measured dataset: multinomial draws from the exact
    branch distribution, with a seeded generator for reproducibility."""
    if shots < 1:
        raise ValidationError("shots must be >= 1")
    exact = semiclassical_qft(state)
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, exact.probabilities)
    return Distribution(counts / shots), counts


def depolarize(dist, p):
    """Mix a distribution with the uniform one: (1-p) d + p/N."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError("depolarization must be in [0, 1]")
    n = dist.probabilities.size
    return Distribution((1.0 - p) * dist.probabilities + p / n)
