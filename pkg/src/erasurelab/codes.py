"""Code constructions: the six-qubit single-erasure code, its 2n-qubit
marginal-hiding generalization, and a five-qubit code for single-excitation
three-qubit states.

Site layout for the six-qubit code: sites 0..2 carry the three message
qubits, sites 3..5 the three ancillas.  The hiding family for n message
qubits uses sites 0..n-1 for the message and n..2n-1 for the ancillas.

Every logical basis state of the six-qubit and hiding codes is a product of
two identical GHZ-type blocks (|u> + s|u-complement>)/sqrt(2), one on the
message half and one on the ancilla half.
"""

from __future__ import annotations

import math

import numpy as np

from .gates import Circuit, apply_circuit, op
from .states import MessageState, PureState, SiteDims, tensor_product

GRAM_TOL = 1e-12
SUPPORT_TOL = 1e-12
HIDING_MAX_QUBITS = 8


class GhzSpec:
    """A GHZ-type n-qubit state (|u> + sign * |u-complement>)/sqrt(2)."""

    __slots__ = ("pattern", "sign")

    def __init__(self, pattern, sign: int):
        pattern = tuple(int(b) for b in pattern)
        if not pattern or any(b not in (0, 1) for b in pattern):
            raise ValueError(f"pattern must be a nonempty bit tuple, got {pattern}")
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign}")
        self.pattern = pattern
        self.sign = int(sign)

    def state(self) -> PureState:
        n = len(self.pattern)
        dims = SiteDims.qubits(n)
        amps = np.zeros(2**n, dtype=np.complex128)
        idx = dims.index_of(self.pattern)
        amps[idx] = 1 / math.sqrt(2)
        amps[2**n - 1 - idx] += self.sign / math.sqrt(2)
        return PureState(dims, amps)

    @classmethod
    def from_state(cls, state: PureState, tol: float = 1e-12) -> "GhzSpec":
        """Classify a state as GHZ-type or raise.

        Requires exactly two nonzero amplitudes of magnitude 1/sqrt(2) on
        complementary bit patterns, with the lower-index amplitude real
        positive (no global phase freedom).
        """
        if any(d != 2 for d in state.dims):
            raise ValueError("GHZ classification needs an all-qubit register")
        nz = np.flatnonzero(np.abs(state.amps) > tol)
        if len(nz) != 2:
            raise ValueError(f"expected exactly 2 nonzero amplitudes, found {len(nz)}")
        i, j = int(nz[0]), int(nz[1])
        if i + j != state.dims.total - 1:
            raise ValueError("nonzero amplitudes are not on complementary patterns")
        a, b = state.amps[i], state.amps[j]
        if abs(a - 1 / math.sqrt(2)) > tol:
            raise ValueError("leading amplitude is not 1/sqrt(2) real positive")
        ratio = b / a
        if abs(ratio - 1) <= tol:
            sign = 1
        elif abs(ratio + 1) <= tol:
            sign = -1
        else:
            raise ValueError(f"amplitude ratio {ratio!r} is not +/-1")
        return cls(state.dims.labels_of(i), sign)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GhzSpec):
            return NotImplemented
        return self.pattern == other.pattern and self.sign == other.sign

    def __hash__(self) -> int:
        return hash((self.pattern, self.sign))

    def __repr__(self) -> str:
        bits = "".join(str(b) for b in self.pattern)
        return f"GhzSpec({bits}, {'+' if self.sign > 0 else '-'})"


class CodeSpec:
    """A code given by its orthonormal logical basis over qubit sites.

    ``message_labels[j]`` is the computational basis index (over k message
    qubits) that encodes to ``logical_basis[j]``.  Codes whose message space
    is a proper subspace (such as the five-qubit single-excitation code) list
    only the labels they support.
    """

    __slots__ = ("label", "n_physical", "k_logical", "logical_basis", "message_labels", "encoder")

    def __init__(self, label, n_physical, k_logical, logical_basis, message_labels, encoder=None):
        n_physical = int(n_physical)
        k_logical = int(k_logical)
        logical_basis = tuple(logical_basis)
        message_labels = tuple(int(m) for m in message_labels)
        if n_physical < 1 or k_logical < 1:
            raise ValueError("physical and logical qubit counts must be positive")
        if len(logical_basis) != len(message_labels):
            raise ValueError("need one message label per logical basis state")
        if not logical_basis:
            raise ValueError("logical basis must be nonempty")
        if len(set(message_labels)) != len(message_labels):
            raise ValueError("message labels must be distinct")
        if any(m < 0 or m >= 2**k_logical for m in message_labels):
            raise ValueError(f"message labels out of range for {k_logical} qubits")
        expected = SiteDims.qubits(n_physical)
        for ls in logical_basis:
            if ls.dims != expected:
                raise ValueError(f"logical state register {ls.dims} is not {n_physical} qubits")
        basis = np.stack([ls.amps for ls in logical_basis])
        gram = basis.conj() @ basis.T
        dev = float(np.max(np.abs(gram - np.eye(len(logical_basis)))))
        if dev > GRAM_TOL:
            raise ValueError(f"logical basis is not orthonormal (deviation {dev:.3e})")
        self.label = str(label)
        self.n_physical = n_physical
        self.k_logical = k_logical
        self.logical_basis = logical_basis
        self.message_labels = message_labels
        self.encoder = encoder

    @property
    def dims(self) -> SiteDims:
        return SiteDims.qubits(self.n_physical)

    def _check_support(self, message: MessageState) -> None:
        if message.n != self.k_logical:
            raise ValueError(f"message has {message.n} qubits, code expects {self.k_logical}")
        supported = set(self.message_labels)
        stray = [
            i for i, a in enumerate(message.amps) if i not in supported and abs(a) > SUPPORT_TOL
        ]
        if stray:
            raise ValueError(f"message has weight outside the encodable subspace at {stray}")

    def logical_combination(self, message: MessageState) -> PureState:
        """Encode by expanding the message directly in the logical basis."""
        self._check_support(message)
        amps = np.zeros(2**self.n_physical, dtype=np.complex128)
        for m, ls in zip(self.message_labels, self.logical_basis):
            amps += message.amps[m] * ls.amps
        return PureState(self.dims, amps)

    def encode(self, message: MessageState) -> PureState:
        """Encode through the encoding circuit when one exists, else the basis."""
        if self.encoder is None:
            return self.logical_combination(message)
        self._check_support(message)
        n_anc = self.n_physical - self.k_logical
        start = tensor_product(message.as_state(), PureState.basis_state(SiteDims.qubits(n_anc), 0))
        return apply_circuit(start, self.encoder)

    def random_message(self, rng: np.random.Generator) -> MessageState:
        amps = np.zeros(2**self.k_logical, dtype=np.complex128)
        for m in self.message_labels:
            amps[m] = rng.standard_normal() + 1j * rng.standard_normal()
        return MessageState(self.k_logical, amps / np.linalg.norm(amps))

    def __repr__(self) -> str:
        return f"CodeSpec({self.label!r}, n={self.n_physical}, k={self.k_logical})"


class RecoveryPlan:
    """Decode and repair circuits for one known bad position.

    Neither circuit ever touches the bad site, so they commute with whatever
    happened there; after both run, the message sits on ``output_register``.
    """

    __slots__ = ("bad_position", "decode", "recover", "output_register")

    def __init__(self, bad_position: int, decode: Circuit, recover: Circuit, output_register):
        bad_position = int(bad_position)
        output_register = tuple(int(s) for s in output_register)
        for name, circ in (("decode", decode), ("recover", recover)):
            touched = {t for c_op in circ.ops for t in c_op.targets}
            if bad_position in touched:
                raise ValueError(f"{name} circuit touches the bad position {bad_position}")
        if bad_position in output_register:
            raise ValueError("output register contains the bad position")
        if len(set(output_register)) != len(output_register):
            raise ValueError("output register has repeated sites")
        self.bad_position = bad_position
        self.decode = decode
        self.recover = recover
        self.output_register = output_register

    def apply(self, state: PureState) -> PureState:
        return apply_circuit(apply_circuit(state, self.decode), self.recover)

    def __repr__(self) -> str:
        return f"RecoveryPlan(bad_position={self.bad_position})"


def _ghz_pair_basis(n: int) -> list[PureState]:
    """Logical states indexed 0..2^n-1: two copies of the GHZ block whose
    pattern is the first n-1 message bits followed by 0 and whose sign is
    set by the last message bit."""
    states = []
    for i in range(2**n):
        bits = [(i >> (n - 1 - j)) & 1 for j in range(n)]
        pattern = tuple(bits[:-1]) + (0,)
        sign = -1 if bits[-1] else 1
        block = GhzSpec(pattern, sign).state()
        states.append(tensor_product(block, block))
    return states


def six_qubit_encoder() -> Circuit:
    """Encoding circuit for the six-qubit code (written order, applied right
    to left): CNOTs copy the message onto the ancillas, Hadamards on sites 2
    and 5 open the superposition, then CNOT fans spread it over each block."""
    ops = [
        op("CNOT", 5, 4),
        op("CNOT", 5, 3),
        op("CNOT", 2, 1),
        op("CNOT", 2, 0),
        op("H", 5),
        op("H", 2),
        op("CNOT", 2, 5),
        op("CNOT", 1, 4),
        op("CNOT", 0, 3),
    ]
    return Circuit(ops, SiteDims.qubits(6))


def six_qubit_logical_basis() -> CodeSpec:
    """The six-qubit code: 3 message qubits in 6, one erasable site."""
    return CodeSpec(
        label="six-qubit-erasure",
        n_physical=6,
        k_logical=3,
        logical_basis=_ghz_pair_basis(3),
        message_labels=range(8),
        encoder=six_qubit_encoder(),
    )


def decoder_for(bad_position: int) -> Circuit:
    """Decoding circuit for a known bad site: always works on the intact
    block, folding it down so the ancillary half reads out the message index."""
    if bad_position in (0, 1, 2):
        ops = [op("H", 5), op("CNOT", 5, 4), op("CNOT", 5, 3)]
    elif bad_position in (3, 4, 5):
        ops = [op("H", 2), op("CNOT", 2, 1), op("CNOT", 2, 0)]
    else:
        raise ValueError(f"bad position {bad_position} out of range 0..5")
    return Circuit(ops, SiteDims.qubits(6))


_RECOVERY_OPS = {
    0: [("TOFFOLI", 3, 5, 1), ("CZ", 5, 1), ("TOFFOLI", 3, 5, 1),
        ("CNOT", 4, 1), ("CNOT", 3, 1), ("CNOT", 3, 2)],
    1: [("TOFFOLI", 4, 5, 0), ("CZ", 5, 0), ("TOFFOLI", 4, 5, 0),
        ("CNOT", 3, 0), ("CNOT", 4, 0), ("CNOT", 4, 2)],
    2: [("CZ", 5, 1), ("CNOT", 4, 1), ("CNOT", 3, 0)],
    3: [("TOFFOLI", 0, 2, 4), ("CZ", 2, 4), ("TOFFOLI", 0, 2, 4),
        ("CNOT", 1, 4), ("CNOT", 0, 4), ("CNOT", 0, 5)],
    4: [("TOFFOLI", 1, 2, 3), ("CZ", 2, 3), ("TOFFOLI", 1, 2, 3),
        ("CNOT", 0, 3), ("CNOT", 1, 3), ("CNOT", 1, 5)],
    5: [("CZ", 2, 4), ("CNOT", 1, 4), ("CNOT", 0, 3)],
}


def recovery_for(bad_position: int) -> RecoveryPlan:
    """Full decode-plus-repair plan for one bad site of the six-qubit code."""
    if bad_position not in _RECOVERY_OPS:
        raise ValueError(f"bad position {bad_position} out of range 0..5")
    decode = decoder_for(bad_position)
    recover = Circuit(
        [op(kind, *targets) for kind, *targets in _RECOVERY_OPS[bad_position]],
        SiteDims.qubits(6),
    )
    output_register = (3, 4, 5) if bad_position in (0, 1, 2) else (0, 1, 2)
    return RecoveryPlan(bad_position, decode, recover, output_register)


# Images of the three single-excitation message states |001>, |010>, |100>
# as (basis index in, pair of basis indices out) over five qubits.
_W_IMAGES = {
    0b001: (0b00001, 0b11110),
    0b010: (0b00100, 0b11011),
    0b100: (0b00010, 0b11101),
}


def w_code() -> CodeSpec:
    """Five-qubit code for three-qubit states with exactly one excitation."""
    basis = []
    labels = sorted(_W_IMAGES)
    for m in labels:
        lo, hi = _W_IMAGES[m]
        amps = np.zeros(32, dtype=np.complex128)
        amps[lo] = 1 / math.sqrt(2)
        amps[hi] = 1 / math.sqrt(2)
        basis.append(PureState(SiteDims.qubits(5), amps))
    return CodeSpec(
        label="w5",
        n_physical=5,
        k_logical=3,
        logical_basis=basis,
        message_labels=labels,
    )


def w_code_encode(message: MessageState) -> PureState:
    """Encode a state supported on the single-excitation subspace."""
    return w_code().logical_combination(message)


def hiding_encoder(n: int) -> Circuit:
    """Encoding circuit for n message qubits into 2n sites, generalizing the
    six-qubit encoder; at n=3 it reproduces that circuit exactly."""
    if not 2 <= n <= HIDING_MAX_QUBITS:
        raise ValueError(f"message qubit count {n} out of range 2..{HIDING_MAX_QUBITS}")
    ops = []
    ops += [op("CNOT", 2 * n - 1, n + i - 1) for i in range(n - 1, 0, -1)]
    ops += [op("CNOT", n - 1, i - 1) for i in range(n - 1, 0, -1)]
    ops += [op("H", 2 * n - 1), op("H", n - 1)]
    ops += [op("CNOT", i - 1, n + i - 1) for i in range(n, 0, -1)]
    return Circuit(ops, SiteDims.qubits(2 * n))


def hiding_code(n: int) -> CodeSpec:
    """Marginal-hiding code on 2n sites: every single-site reduced state of
    any encoded message is maximally mixed.

    n=1 is the Bell-pair case: a single two-site GHZ block rather than a
    product of two one-site blocks (which would not hide anything).  The
    Bell pair hides one classical bit (both basis code states have I/2
    marginals) but cannot correct an erasure, and superposition messages
    do show up in its marginals.
    """
    if n == 1:
        basis = [GhzSpec((0, 0), 1).state(), GhzSpec((0, 0), -1).state()]
        encoder = Circuit([op("CNOT", 0, 1), op("H", 0)], SiteDims.qubits(2))
        return CodeSpec(
            label="hiding-1",
            n_physical=2,
            k_logical=1,
            logical_basis=basis,
            message_labels=(0, 1),
            encoder=encoder,
        )
    if not 2 <= n <= HIDING_MAX_QUBITS:
        raise ValueError(f"message qubit count {n} out of range 1..{HIDING_MAX_QUBITS}")
    return CodeSpec(
        label=f"hiding-{n}",
        n_physical=2 * n,
        k_logical=n,
        logical_basis=_ghz_pair_basis(n),
        message_labels=range(2**n),
        encoder=hiding_encoder(n),
    )
