"""Command-line front end.

Three subcommands: ``verify`` certifies a code (error-correction conditions
at every site plus hidden marginals), ``recover`` runs seeded damage/repair
trials, and ``share-demo`` splits a random secret over 2n single-qubit
shares and puts it back together.

Reports are JSON with a fixed field order and floats printed with 17
significant digits, so identical configurations produce byte-identical
output.  Exit status: 0 all checks passed, 1 a check or fidelity target
failed, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import codes as codes_mod
from . import noise, verify
from .gates import apply_circuit, invert_circuit
from .states import MessageState, PureState, SiteDims, fidelity_with_pure, partial_trace

DEFAULT_SEED = 42
DEFAULT_TRIALS = 25
DEFAULT_TOLERANCE = 1e-10
SEED_ENV_VAR = "ERASURELAB_SEED"


class ConfigError(ValueError):
    pass


@dataclass
class ChannelSpec:
    """Parsed --channel value; build() instantiates it for one trial seed."""

    kind: str
    pauli_kind: str = "I"
    env_dim: int = noise.DEFAULT_ENV_DIM
    leak_dim: int = 3
    leak_weight: float | None = None

    def build(self, seed: int) -> noise.DecoherenceIsometry:
        if self.kind == "pauli":
            return noise.pauli_error(self.pauli_kind)
        if self.kind == "random":
            return noise.random_decoherence(seed, self.env_dim)
        return noise.leakage_decoherence(seed, self.leak_dim, self.env_dim, self.leak_weight)


@dataclass
class RunConfig:
    command: str
    code: str
    seed: int
    trials: int
    tolerance: float
    bad_position: int | None = None
    channel: ChannelSpec | None = None
    code_file: str | None = None
    out: str | None = None


def parse_channel(text: str) -> ChannelSpec:
    kind, _, rest = text.partition(":")
    try:
        if kind == "pauli":
            if rest not in ("I", "X", "Y", "Z"):
                raise ConfigError(f"unknown Pauli kind {rest!r}")
            return ChannelSpec(kind="pauli", pauli_kind=rest)
        if kind == "random":
            env_dim = int(rest)
            if env_dim < 1:
                raise ConfigError("environment dimension must be at least 1")
            return ChannelSpec(kind="random", env_dim=env_dim)
        if kind == "leak":
            parts = rest.split(",")
            if len(parts) not in (2, 3):
                raise ConfigError("leak channel needs leak_dim,env_dim[,weight]")
            leak_dim, env_dim = int(parts[0]), int(parts[1])
            weight = float(parts[2]) if len(parts) == 3 else None
            if leak_dim < 3:
                raise ConfigError("leak dimension must be at least 3")
            if env_dim < 1:
                raise ConfigError("environment dimension must be at least 1")
            if weight is not None and not 0.0 <= weight <= 1.0:
                raise ConfigError("leak weight must lie in [0, 1]")
            return ChannelSpec(kind="leak", leak_dim=leak_dim, env_dim=env_dim, leak_weight=weight)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed channel spec {text!r}: {exc}") from exc
    raise ConfigError(f"unknown channel kind {kind!r}; expected pauli:, random:, or leak:")


def _parse_hiding(text: str, lo: int) -> int:
    _, _, num = text.partition(":")
    try:
        n = int(num)
    except ValueError as exc:
        raise ConfigError(f"malformed code selector {text!r}") from exc
    if not lo <= n <= codes_mod.HIDING_MAX_QUBITS:
        raise ConfigError(
            f"hiding qubit count {n} out of range {lo}..{codes_mod.HIDING_MAX_QUBITS}"
        )
    return n


def build_code(config: RunConfig) -> codes_mod.CodeSpec:
    if config.code_file is not None:
        return load_code_file(config.code_file)
    text = config.code
    if text == "six":
        return codes_mod.six_qubit_logical_basis()
    if text == "w5":
        return codes_mod.w_code()
    if text.startswith("hiding:"):
        # verify insists on n >= 2 (the Bell pair cannot pass certification);
        # share-demo and recover accept n=1 and report what it can't do
        lo = 2 if config.command == "verify" else 1
        return codes_mod.hiding_code(_parse_hiding(text, lo))
    raise ConfigError(f"unknown code selector {text!r}; expected six, w5, or hiding:n")


def code_to_json_dict(code: codes_mod.CodeSpec) -> dict:
    """External code format: per-state amplitude lists as [re, im] pairs."""
    return {
        "n_sites": code.n_physical,
        "dims": [2] * code.n_physical,
        "logical_basis": [
            [[float(a.real), float(a.imag)] for a in ls.amps] for ls in code.logical_basis
        ],
    }


def code_from_json_dict(data: dict, label: str = "external") -> codes_mod.CodeSpec:
    try:
        n_sites = int(data["n_sites"])
        dims = [int(d) for d in data["dims"]]
        raw_basis = data["logical_basis"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed code file: {exc}") from exc
    if len(dims) != n_sites:
        raise ConfigError(f"dims list has {len(dims)} entries for n_sites={n_sites}")
    if any(d != 2 for d in dims):
        raise ConfigError("only all-qubit external codes are supported")
    states = []
    for row in raw_basis:
        if len(row) != 2**n_sites:
            raise ConfigError(f"logical state has {len(row)} amplitudes, expected {2**n_sites}")
        amps = np.array([complex(re, im) for re, im in row])
        try:
            states.append(PureState(SiteDims.qubits(n_sites), amps))
        except ValueError as exc:
            raise ConfigError(f"bad logical state in code file: {exc}") from exc
    if len(states) < 2:
        raise ConfigError("code file must define at least two logical states")
    k = max(1, (len(states) - 1).bit_length())
    try:
        return codes_mod.CodeSpec(
            label=label,
            n_physical=n_sites,
            k_logical=k,
            logical_basis=states,
            message_labels=range(len(states)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid code: {exc}") from exc


def load_code_file(path: str) -> codes_mod.CodeSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read code file {path!r}: {exc}") from exc
    return code_from_json_dict(data, label=path)


def render_json(value) -> str:
    """Deterministic JSON: insertion-ordered keys, floats at 17 significant
    digits, two-space indentation."""
    return _render(value, 0) + "\n"


def _render(value, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        rows = [f"{inner}{json.dumps(str(k))}: {_render(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        rows = [f"{inner}{_render(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _meta(config: RunConfig) -> dict:
    return {
        "seed": config.seed,
        "code": config.code if config.code_file is None else f"file:{config.code_file}",
        "command": config.command,
        "tolerance": config.tolerance,
    }


def _check_rows(reports) -> list[dict]:
    rows = []
    for report in reports:
        for c in report.checks:
            rows.append(
                {"name": c.name, "pass": bool(c.passed), "worst_deviation": float(c.worst_deviation)}
            )
    return rows


def cmd_verify(config: RunConfig) -> tuple[int, dict]:
    code = build_code(config)
    reports = []
    for p in range(code.n_physical):
        reports.append(
            verify.check_kl_general(code, verify.ErrorOperatorSet.pauli_set(p), config.tolerance)
        )
    for p in range(code.n_physical):
        reports.append(verify.check_erasure_kl(code, p, config.tolerance))
    reports.append(verify.check_hiding(code, config.trials, config.seed, config.tolerance))
    rows = _check_rows(reports)
    report = {"meta": _meta(config), "checks": rows, "trials": []}
    return (0 if all(r["pass"] for r in rows) else 1), report


def cmd_recover(config: RunConfig) -> tuple[int, dict]:
    code = build_code(config)
    if config.bad_position is None:
        raise ConfigError("recover needs --pos")
    if not 0 <= config.bad_position < code.n_physical:
        raise ConfigError(
            f"position {config.bad_position} out of range for {code.n_physical} sites"
        )
    if config.code == "six" and config.code_file is None:
        plan = codes_mod.recovery_for(config.bad_position)
    else:
        try:
            plan = verify.synthesize_recovery(code, config.bad_position, tolerance=config.tolerance)
        except verify.RecoverySynthesisError as exc:
            print(f"error: {exc}", file=sys.stderr)
            failed = {
                "meta": _meta(config),
                "checks": [
                    {"name": "decoder_synthesis", "pass": False,
                     "worst_deviation": float(exc.worst_deviation)}
                ],
                "trials": [],
            }
            return 1, failed
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    rng = np.random.default_rng(config.seed)
    trial_rows = []
    fidelities = []
    purities = []
    for index in range(config.trials):
        message = code.random_message(rng)
        channel_seed = int(rng.integers(0, 2**63 - 1))
        try:
            channel = config.channel.build(channel_seed)
        except ValueError as exc:
            # e.g. leak:3,1 with a nonzero weight: the leaked subspace cannot
            # host two orthonormal images, which only surfaces at build time
            raise ConfigError(str(exc)) from exc
        event = noise.ErasureEvent(config.bad_position, channel)
        result = verify.run_recovery_trial(code, message, event, plan)
        fidelities.append(result.fidelity)
        purities.append(result.purity)
        trial_rows.append(
            {"index": index, "fidelity": result.fidelity, "purity": result.purity}
        )
    min_fid = min(fidelities)
    min_pur = min(purities)
    checks = [
        {
            "name": "min_fidelity",
            "pass": min_fid >= 1.0 - config.tolerance,
            "worst_deviation": max(0.0, 1.0 - min_fid),
        },
        {
            "name": "min_purity",
            "pass": min_pur >= 1.0 - config.tolerance,
            "worst_deviation": max(0.0, 1.0 - min_pur),
        },
    ]
    report = {"meta": _meta(config), "checks": checks, "trials": trial_rows}
    return (0 if checks[0]["pass"] else 1), report


def cmd_share_demo(config: RunConfig) -> tuple[int, dict]:
    if not config.code.startswith("hiding:"):
        raise ConfigError("share-demo needs --code hiding:n")
    code = build_code(config)
    n = code.k_logical
    rng = np.random.default_rng(config.seed)
    if n == 1:
        # the Bell pair only hides a classical bit; a superposition secret
        # would show up in the marginals
        message = MessageState.basis(1, int(rng.integers(2)))
    else:
        message = code.random_message(rng)
    encoded = code.encode(message)

    checks = []
    half = np.eye(2) / 2
    for s in range(code.n_physical):
        rho = partial_trace(encoded, (s,))
        dev = float(np.max(np.abs(rho.matrix - half)))
        checks.append(
            {"name": f"marginal_site{s}", "pass": dev <= config.tolerance, "worst_deviation": dev}
        )

    restored = apply_circuit(encoded, invert_circuit(code.encoder))
    rho_msg = partial_trace(restored, tuple(range(n)))
    fid = fidelity_with_pure(rho_msg, message.as_state())
    purity = rho_msg.purity()
    checks.append(
        {
            "name": "joint_reconstruction",
            "pass": fid >= 1.0 - config.tolerance,
            "worst_deviation": max(0.0, 1.0 - fid),
        }
    )
    report = {
        "meta": _meta(config),
        "checks": checks,
        "trials": [{"index": 0, "fidelity": fid, "purity": purity}],
    }
    return (0 if all(c["pass"] for c in checks) else 1), report


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erasurelab",
        description="Certify and exercise erasure-correcting codes with hidden marginals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_code_file: bool = False) -> None:
        group = p.add_mutually_exclusive_group() if with_code_file else None
        (group or p).add_argument("--code", default="six", help="six | w5 | hiding:n")
        if group is not None:
            group.add_argument("--code-file", default=None, help="JSON code description")
        p.add_argument("--seed", type=int, default=None,
                       help=f"RNG seed (default {DEFAULT_SEED}, or ${SEED_ENV_VAR})")
        p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
        p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
        p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")

    p_verify = sub.add_parser("verify", help="run the certification checks on a code")
    add_common(p_verify, with_code_file=True)

    p_recover = sub.add_parser("recover", help="seeded damage/repair trials at one position")
    add_common(p_recover)
    p_recover.add_argument("--pos", type=int, required=True, help="damaged site index")
    p_recover.add_argument("--channel", default="random:4",
                           help="pauli:K | random:env_dim | leak:d,env_dim[,weight]")

    p_share = sub.add_parser("share-demo", help="split a secret into 2n opaque shares")
    add_common(p_share)
    p_share.set_defaults(code="hiding:3")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    trials = int(args.trials)
    if trials < 1:
        raise ConfigError("trial count must be positive")
    tolerance = float(args.tolerance)
    if not tolerance > 0:
        raise ConfigError("tolerance must be positive")
    return RunConfig(
        command=args.command,
        code=args.code,
        seed=seed,
        trials=trials,
        tolerance=tolerance,
        bad_position=getattr(args, "pos", None),
        channel=parse_channel(args.channel) if hasattr(args, "channel") else None,
        code_file=getattr(args, "code_file", None),
        out=args.out,
    )


_COMMANDS = {
    "verify": cmd_verify,
    "recover": cmd_recover,
    "share-demo": cmd_share_demo,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _config_from_args(args)
        exit_code, report = _COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = render_json(report)
    if config.out is not None:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
