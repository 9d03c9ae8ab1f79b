"""Code certification and end-to-end recovery trials.

Three families of checks live here:

* algebraic error-correction conditions on a logical basis (the pairwise
  form for a general operator set, and the single-operator form for an
  erasure at a known position),
* numerical synthesis of a recovery unitary straight from the logical
  basis, which refuses whenever the code cannot correct the erasure,
* statistical checks: maximally mixed single-site marginals, and seeded
  encode / damage / repair trials measured by fidelity and purity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codes import CodeSpec
from .noise import ErasureEvent, apply_erasure
from .states import (
    MessageState,
    PureState,
    apply_local_operator,
    fidelity_with_pure,
    partial_trace,
)

DEFAULT_TOLERANCE = 1e-10
DEFAULT_TRIALS = 25
DEFAULT_SEED = 42
RANK_CUTOFF = 1e-12
SYNTHESIS_DIM_CAP = 1024


class RecoverySynthesisError(ValueError):
    """Raised when a code fails the overlap structure an erasure decoder needs."""

    def __init__(self, message: str, worst_deviation: float):
        super().__init__(message)
        self.worst_deviation = worst_deviation


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst_deviation: float
    details: str = ""


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]
    tolerance: float
    seed: int | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass(frozen=True)
class TrialResult:
    fidelity: float
    purity: float


class ErrorOperatorSet:
    """Single-site error operators at one known position.

    The set must contain the identity and span the full one-site operator
    algebra restricted to the qubit Pauli directions, so that passing the
    pairwise conditions on it certifies arbitrary errors at that site.
    """

    __slots__ = ("position", "operators")

    def __init__(self, position: int, operators):
        from .gates import PAULI_BY_KIND

        position = int(position)
        if position < 0:
            raise ValueError("position must be nonnegative")
        operators = tuple(np.array(a, dtype=np.complex128) for a in operators)
        if not operators:
            raise ValueError("operator set must be nonempty")
        shape = operators[0].shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ValueError("operators must be square matrices")
        if any(a.shape != shape for a in operators):
            raise ValueError("operators must all have the same shape")
        d = shape[0]
        if not any(np.max(np.abs(a - np.eye(d))) <= 1e-12 for a in operators):
            raise ValueError("operator set must include the identity")
        stacked = np.stack([a.reshape(-1) for a in operators], axis=1)
        if d == 2:
            span_targets = PAULI_BY_KIND.values()
        else:
            span_targets = (np.eye(d)[:, [a]] @ np.eye(d)[[b], :] for a in range(d) for b in range(d))
        for target in span_targets:
            vec = np.asarray(target, dtype=np.complex128).reshape(-1)
            coeff, *_ = np.linalg.lstsq(stacked, vec, rcond=None)
            if np.linalg.norm(stacked @ coeff - vec) > 1e-10:
                raise ValueError("operator set does not span the one-site algebra")
        for a in operators:
            a.setflags(write=False)
        self.position = position
        self.operators = operators

    @property
    def site_dim(self) -> int:
        return self.operators[0].shape[0]

    @classmethod
    def pauli_set(cls, position: int) -> "ErrorOperatorSet":
        from .gates import PAULI_BY_KIND

        return cls(position, [PAULI_BY_KIND[k] for k in "IXYZ"])

    @classmethod
    def matrix_unit_set(cls, position: int, dim: int) -> "ErrorOperatorSet":
        """Identity plus all dim^2 matrix units, for sites beyond qubits."""
        eye = np.eye(dim)
        units = [np.outer(eye[:, a], eye[b, :]) for a in range(dim) for b in range(dim)]
        return cls(position, [eye] + units)


def _apply_site_matrix(tensor: np.ndarray, op: np.ndarray, axis: int) -> np.ndarray:
    moved = np.tensordot(op, np.moveaxis(tensor, axis, 0), axes=([1], [0]))
    return np.moveaxis(moved, 0, axis)


def _transformed_basis(code: CodeSpec, errors: ErrorOperatorSet) -> list[np.ndarray]:
    """Rows (A_a applied to each logical state), one (L, D) array per operator."""
    if errors.position >= code.n_physical:
        raise ValueError(
            f"error position {errors.position} out of range for {code.n_physical} sites"
        )
    if errors.site_dim != 2:
        raise ValueError("logical bases live on qubit sites; operators must be 2x2")
    out = []
    for a in errors.operators:
        rows = [
            _apply_site_matrix(ls.tensor, a, errors.position).reshape(-1)
            for ls in code.logical_basis
        ]
        out.append(np.stack(rows))
    return out


def _delta_deviation(m: np.ndarray) -> float:
    """Distance of a matrix from (constant * identity)."""
    diag = np.diagonal(m)
    off = np.max(np.abs(m - np.diag(diag))) if m.shape[0] > 1 else 0.0
    spread = np.max(np.abs(diag[:, None] - diag[None, :]))
    return float(max(off, spread))


def check_kl_general(
    code: CodeSpec,
    errors: ErrorOperatorSet,
    tolerance: float = DEFAULT_TOLERANCE,
) -> VerificationReport:
    """Pairwise conditions: <i|A_a^dag A_b|j> must be delta_ij times a
    constant that does not depend on the logical index, for every pair."""
    transformed = _transformed_basis(code, errors)
    worst = 0.0
    for ta in transformed:
        for tb in transformed:
            worst = max(worst, _delta_deviation(ta.conj() @ tb.T))
    check = CheckResult(
        name=f"kl_general_pos{errors.position}",
        passed=worst <= tolerance,
        worst_deviation=worst,
        details=f"{len(transformed)**2} operator pairs over {len(code.logical_basis)} logical states",
    )
    return VerificationReport(checks=(check,), tolerance=tolerance)


def check_erasure_kl(
    code: CodeSpec,
    position: int,
    tolerance: float = DEFAULT_TOLERANCE,
) -> VerificationReport:
    """Single-operator conditions for a known erased site: every Pauli must
    have equal diagonal matrix elements and no off-diagonal ones."""
    errors = ErrorOperatorSet.pauli_set(position)
    basis = np.stack([ls.amps for ls in code.logical_basis])
    worst = 0.0
    for ta in _transformed_basis(code, errors):
        worst = max(worst, _delta_deviation(basis.conj() @ ta.T))
    check = CheckResult(
        name=f"erasure_kl_pos{position}",
        passed=worst <= tolerance,
        worst_deviation=worst,
        details=f"4 Pauli operators over {len(code.logical_basis)} logical states",
    )
    return VerificationReport(checks=(check,), tolerance=tolerance)


@dataclass(frozen=True)
class SynthesizedRecovery:
    """Recovery unitary acting on every site except the damaged one."""

    position: int
    rest_sites: tuple[int, ...]
    junk_sites: tuple[int, ...]
    output_register: tuple[int, ...]
    unitary: np.ndarray = field(repr=False)
    gram: np.ndarray = field(repr=False)
    worst_gram_deviation: float = 0.0

    def apply(self, state: PureState) -> PureState:
        return apply_local_operator(state, self.unitary, self.rest_sites)


def _complete_orthonormal_basis(cols: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns to a full square unitary."""
    d, q = cols.shape
    basis = cols
    for j in range(d):
        if basis.shape[1] == d:
            break
        v = np.zeros(d, dtype=np.complex128)
        v[j] = 1.0
        for _ in range(2):  # two projection passes keep orthogonality tight
            v = v - basis @ (basis.conj().T @ v)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            basis = np.concatenate([basis, (v / norm)[:, None]], axis=1)
    if basis.shape[1] != d:
        raise RuntimeError("failed to complete the orthonormal basis")
    return basis


def synthesize_recovery(
    code: CodeSpec,
    position: int,
    output_register=None,
    tolerance: float = DEFAULT_TOLERANCE,
    max_dim: int = SYNTHESIS_DIM_CAP,
) -> SynthesizedRecovery:
    """Build an erasure decoder directly from the logical basis.

    Splitting each logical state |i> = sum_k |k>_position x w_ik, the code
    corrects the erasure exactly when <w_ik|w_jk'> = delta_ij g_kk' with a
    common 2x2 overlap matrix g.  The synthesized unitary rotates the
    orthonormalized sectors onto junk-register states tensor the message
    basis.  Raises RecoverySynthesisError when the overlap structure fails.
    """
    n = code.n_physical
    if not 0 <= position < n:
        raise ValueError(f"position {position} out of range for {n} sites")
    rest = tuple(s for s in range(n) if s != position)
    rest_dim = 2 ** len(rest)
    if rest_dim > max_dim:
        raise ValueError(
            f"undamaged register dimension {rest_dim} exceeds the synthesis cap {max_dim}"
        )
    n_logical = len(code.logical_basis)
    k = code.k_logical

    sectors = np.empty((n_logical, 2, rest_dim), dtype=np.complex128)
    for j, ls in enumerate(code.logical_basis):
        sectors[j] = np.moveaxis(ls.tensor, position, 0).reshape(2, rest_dim)

    overlaps = np.einsum("iad,jbd->iajb", sectors.conj(), sectors)
    cross = overlaps.copy()
    per_state = np.empty((n_logical, 2, 2), dtype=np.complex128)
    for j in range(n_logical):
        per_state[j] = overlaps[j, :, j, :]
        cross[j, :, j, :] = 0.0
    gram = per_state.mean(axis=0)
    worst = max(
        float(np.max(np.abs(cross))),
        float(np.max(np.abs(per_state - gram))),
    )
    if worst > tolerance:
        raise RecoverySynthesisError(
            f"logical sectors at site {position} do not have the overlap structure "
            f"an erasure decoder needs (worst deviation {worst:.3e})",
            worst,
        )
    gram = (gram + gram.conj().T) / 2

    vals, vecs = np.linalg.eigh(gram)
    vals, vecs = vals[::-1], vecs[:, ::-1]  # dominant sector first
    rank = int(np.sum(vals > RANK_CUTOFF))

    if output_register is None:
        output_register = rest[-k:]
    output_register = tuple(int(s) for s in output_register)
    if len(output_register) != k or len(set(output_register)) != k:
        raise ValueError(f"output register must be {k} distinct sites")
    if any(s not in rest for s in output_register):
        raise ValueError("output register must avoid the damaged site")
    junk = tuple(s for s in rest if s not in output_register)
    if 2 ** len(junk) < rank:
        raise ValueError(
            f"junk register of {len(junk)} sites cannot index {rank} overlap sectors"
        )

    rest_axis = {site: axis for axis, site in enumerate(rest)}

    def basis_index(label: int, junk_label: int) -> int:
        idx = 0
        for pos_in_reg, site in enumerate(output_register):
            bit = (label >> (k - 1 - pos_in_reg)) & 1
            idx |= bit << (len(rest) - 1 - rest_axis[site])
        for pos_in_reg, site in enumerate(junk):
            bit = (junk_label >> (len(junk) - 1 - pos_in_reg)) & 1
            idx |= bit << (len(rest) - 1 - rest_axis[site])
        return idx

    source_cols = []
    target_idx = []
    for m in range(rank):
        for j in range(n_logical):
            w = np.tensordot(vecs[:, m].conj(), sectors[j], axes=([0], [0]))
            source_cols.append(w / np.linalg.norm(w))
            target_idx.append(basis_index(code.message_labels[j], m))
    source = np.stack(source_cols, axis=1)
    ortho_dev = float(np.max(np.abs(source.conj().T @ source - np.eye(source.shape[1]))))
    if ortho_dev > 1e-8:
        raise RecoverySynthesisError(
            f"orthonormalized sectors drifted (deviation {ortho_dev:.3e})", ortho_dev
        )

    full_source = _complete_orthonormal_basis(source)
    used = set(target_idx)
    order = target_idx + [i for i in range(rest_dim) if i not in used]
    full_target = np.zeros((rest_dim, rest_dim), dtype=np.complex128)
    for col, idx in enumerate(order):
        full_target[idx, col] = 1.0
    unitary = full_target @ full_source.conj().T
    unitary_dev = float(np.max(np.abs(unitary.conj().T @ unitary - np.eye(rest_dim))))
    if unitary_dev > 1e-10:
        raise RuntimeError(f"synthesized map is not unitary (deviation {unitary_dev:.3e})")

    return SynthesizedRecovery(
        position=position,
        rest_sites=rest,
        junk_sites=junk,
        output_register=output_register,
        unitary=unitary,
        gram=gram,
        worst_gram_deviation=worst,
    )


def check_hiding(
    code: CodeSpec,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    tolerance: float = DEFAULT_TOLERANCE,
) -> VerificationReport:
    """Encode seeded random messages and compare every single-site marginal
    against the maximally mixed state."""
    rng = np.random.default_rng(seed)
    n = code.n_physical
    worst = np.zeros(n)
    half = np.eye(2) / 2
    for _ in range(trials):
        state = code.encode(code.random_message(rng))
        for s in range(n):
            rho = partial_trace(state, (s,))
            worst[s] = max(worst[s], float(np.max(np.abs(rho.matrix - half))))
    checks = tuple(
        CheckResult(
            name=f"hiding_site{s}",
            passed=worst[s] <= tolerance,
            worst_deviation=float(worst[s]),
            details=f"worst deviation from I/2 over {trials} random messages",
        )
        for s in range(n)
    )
    return VerificationReport(checks=checks, tolerance=tolerance, seed=seed)


def run_recovery_trial(
    code: CodeSpec,
    message: MessageState,
    event: ErasureEvent,
    plan,
) -> TrialResult:
    """Encode, damage one site, run the plan, and score the output register.

    ``plan`` may be a circuit-based RecoveryPlan or a SynthesizedRecovery;
    it only needs ``apply`` and ``output_register``.  Returns the fidelity
    of the reduced output-register state against the original message and
    its purity (1 means the register fully disentangled).
    """
    encoded = code.encode(message)
    damaged = apply_erasure(encoded, event)
    repaired = plan.apply(damaged)
    rho = partial_trace(repaired, plan.output_register)
    return TrialResult(
        fidelity=fidelity_with_pure(rho, message.as_state()),
        purity=rho.purity(),
    )
