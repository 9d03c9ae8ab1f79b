"""Gate constructors and circuit plumbing.

Circuits are stored in written order and executed from the last element to
the first, so a list transcribing an operator product U3 U2 U1 applies U1
first.  Controlled gates list their control sites before the target site.
"""

from __future__ import annotations

import math

import numpy as np

from .states import PureState, SiteDims, apply_local_operator

GATE_UNITARITY_TOL = 1e-12

PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)

CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
CZ_MATRIX = np.diag([1, 1, 1, -1]).astype(np.complex128)
TOFFOLI_MATRIX = np.eye(8, dtype=np.complex128)
TOFFOLI_MATRIX[6:8, 6:8] = PAULI_X

PAULI_BY_KIND = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

_STANDARD = {
    "H": (HADAMARD, 1),
    "X": (PAULI_X, 1),
    "Y": (PAULI_Y, 1),
    "Z": (PAULI_Z, 1),
    "CNOT": (CNOT_MATRIX, 2),
    "CZ": (CZ_MATRIX, 2),
    "TOFFOLI": (TOFFOLI_MATRIX, 3),
}

GATE_KINDS = frozenset(_STANDARD) | {"CUSTOM"}


class Gate:
    """A unitary with a kind label and the number of sites it acts on."""

    __slots__ = ("kind", "matrix", "arity")

    def __init__(self, kind: str, matrix, arity: int | None = None):
        if kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {kind!r}")
        matrix = np.array(matrix, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"gate matrix must be square, got shape {matrix.shape}")
        side = matrix.shape[0]
        dev = float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(side))))
        if dev > GATE_UNITARITY_TOL:
            raise ValueError(f"gate matrix is not unitary (deviation {dev:.3e})")
        if arity is None:
            log = side.bit_length() - 1
            arity = log if 2**log == side else 1
        if 2**arity != side and arity != 1:
            raise ValueError(f"arity {arity} does not match matrix side {side}")
        self.kind = kind
        matrix.setflags(write=False)
        self.matrix = matrix
        self.arity = int(arity)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "Gate":
        return Gate(self.kind, self.matrix.conj().T, self.arity)

    def __repr__(self) -> str:
        return f"Gate({self.kind}, arity={self.arity})"


def standard_gate(kind: str) -> Gate:
    if kind not in _STANDARD:
        raise ValueError(f"unknown standard gate kind {kind!r}")
    matrix, arity = _STANDARD[kind]
    return Gate(kind, matrix, arity)


def custom_gate(matrix) -> Gate:
    return Gate("CUSTOM", matrix)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    if dim < 1:
        raise ValueError("dimension must be positive")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_unitary(dim: int, seed) -> Gate:
    """Seeded Haar-random unitary wrapped as a CUSTOM gate."""
    if dim < 2:
        raise ValueError("dimension must be at least 2")
    return custom_gate(haar_unitary(dim, np.random.default_rng(seed)))


def decompose_in_pauli_basis(matrix) -> dict[str, complex]:
    """Coefficients c_k with matrix = sum_k c_k * sigma_k over {I, X, Y, Z}."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.shape != (2, 2):
        raise ValueError("only 2x2 matrices expand in the one-qubit Pauli basis")
    return {k: complex(np.trace(p.conj().T @ matrix)) / 2 for k, p in PAULI_BY_KIND.items()}


class CircuitOp:
    """One gate bound to an ordered tuple of distinct target sites."""

    __slots__ = ("gate", "targets")

    def __init__(self, gate: Gate, targets):
        targets = tuple(int(t) for t in targets)
        if len(targets) != gate.arity:
            raise ValueError(f"gate {gate.kind} needs {gate.arity} sites, got {len(targets)}")
        if len(set(targets)) != len(targets):
            raise ValueError(f"duplicate sites in {targets}")
        if any(t < 0 for t in targets):
            raise ValueError(f"negative site index in {targets}")
        self.gate = gate
        self.targets = targets

    def __repr__(self) -> str:
        return f"{self.gate.kind}{self.targets}"


class Circuit:
    """Sequence of gate applications on a fixed register, in written order."""

    __slots__ = ("ops", "dims")

    def __init__(self, ops, dims):
        self.dims = dims if isinstance(dims, SiteDims) else SiteDims(dims)
        ops = tuple(ops)
        n = len(self.dims)
        for op in ops:
            if any(t >= n for t in op.targets):
                raise ValueError(f"op {op!r} targets a site outside the {n}-site register")
            side = math.prod(self.dims[t] for t in op.targets)
            if side != op.gate.dim:
                raise ValueError(
                    f"op {op!r} acts on dimension {side}, gate matrix is {op.gate.dim}x{op.gate.dim}"
                )
        self.ops = ops

    def __len__(self) -> int:
        return len(self.ops)

    def __repr__(self) -> str:
        return f"Circuit({list(self.ops)!r}, dims={self.dims.dims})"


def op(kind: str, *targets: int) -> CircuitOp:
    """Shorthand for CircuitOp(standard_gate(kind), targets)."""
    return CircuitOp(standard_gate(kind), targets)


def apply_circuit(state: PureState, circuit: Circuit) -> PureState:
    """Run the circuit on a state, last written op first.

    The state may carry extra sites (for example an appended environment) and
    sites whose dimension differs from the circuit register, as long as every
    site the circuit actually touches exists and has the dimension the
    circuit was built for.
    """
    for c_op in circuit.ops:
        for t in c_op.targets:
            if t >= state.n_sites or state.dims[t] != circuit.dims[t]:
                raise ValueError(
                    f"op {c_op!r} does not fit the state register {state.dims.dims}"
                )
    for c_op in reversed(circuit.ops):
        # gate unitarity was already checked at Gate construction (1e-12)
        state = apply_local_operator(state, c_op.gate.matrix, c_op.targets, check_unitary=False)
    return state


def invert_circuit(circuit: Circuit) -> Circuit:
    """Reversed op list with every gate conjugate-transposed."""
    ops = tuple(CircuitOp(c_op.gate.dagger(), c_op.targets) for c_op in reversed(circuit.ops))
    return Circuit(ops, circuit.dims)


def relabel_sites(circuit: Circuit, mapping: dict[int, int]) -> Circuit:
    """Rewrite every target through a site permutation; dimensions must agree."""
    for src, dst in mapping.items():
        if circuit.dims[src] != circuit.dims[dst]:
            raise ValueError(f"sites {src} and {dst} differ in dimension")
    ops = tuple(
        CircuitOp(c_op.gate, tuple(mapping.get(t, t) for t in c_op.targets))
        for c_op in circuit.ops
    )
    return Circuit(ops, circuit.dims)


def circuit_matrix(circuit: Circuit, max_dim: int = 4096) -> np.ndarray:
    """Full unitary of the circuit, built column by column."""
    d = circuit.dims.total
    if d > max_dim:
        raise ValueError(f"refusing to build a {d}x{d} matrix (cap {max_dim})")
    out = np.empty((d, d), dtype=np.complex128)
    for j in range(d):
        col = PureState.basis_state(circuit.dims, j)
        out[:, j] = apply_circuit(col, circuit).amps
    return out
