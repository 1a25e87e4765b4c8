"""Command-line surface.

Exit codes: 0 success, 1 validation error (bad flags, malformed files,
violated preconditions), 2 numerical failure (singular noise map,
non-invertible channel).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bias import bias_report
from .channels import (
    NotInvertibleError,
    compose,
    eigenvalues,
    identity_component,
    inverse,
    is_cptp,
)
from .experiments import (
    INVERTIBILITY_FIELDS,
    TABLE_FIELDS,
    ExperimentConfig,
    config_from_dict,
    metadata,
    run_fig3,
    run_fig4,
    run_invertibility_study,
)
from .implementability import (
    TargetOutsideSpanError,
    implementability_lp,
    p_pauli,
    quasi_program,
)
from .measures import log_negativity, purity, trace_norm
from .noise_map import SingularMapError, apply_noise, modified_quasiprobability
from .pauli import PauliString
from .sampler import run_pec
from .serialization import (
    channel_to_dict,
    dump_json,
    free_set_from_dict,
    load_channel,
    load_json,
    load_noise_map,
    lp_result_to_dict,
    operator_from_dict,
    write_records,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems through the exit-code contract."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def build_parser() -> _Parser:
    parser = _Parser(prog="pecsim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"pecsim {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--out", type=Path, default=None, help="output path")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        p.add_argument("--config", type=Path, default=None, help="config file (JSON)")
        return p

    p = add("channel", "inspect, invert, or compose channel files")
    p.add_argument("action", choices=("eig", "invert", "compose", "info"))
    p.add_argument("--in", dest="inputs", action="append", type=Path, required=True,
                   help="channel file; repeat for compose")

    p = add("decompose", "noise-aware quasiprobability program for an error's inverse")
    p.add_argument("--error", type=Path, required=True, help="error channel file")
    p.add_argument("--noise", type=Path, required=True, help="noise-map file")

    p = add("bias", "bias report for one cancellation scenario")
    p.add_argument("--error", type=Path, required=True)
    p.add_argument("--noise", type=Path, required=True)
    p.add_argument("--layers", type=int, default=1)
    p.add_argument("--method", choices=("separate", "direct", "both"), default="both")

    for name, extra in (
        ("fig3", "noisy-cancellation bias study"),
        ("fig4", "inaccurate-error-model bias study"),
        ("invertibility", "finite-shot invertibility study"),
    ):
        p = add(name, extra)
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--layers", type=int, default=20)
        p.add_argument("--rate", type=float, default=0.05)
        p.add_argument("--delta", type=float, default=0.05, help="per-layer residual (fig4)")
        p.add_argument("--seeds", type=int, default=20)
        p.add_argument("--method", choices=("separate", "direct", "both"), default="both")
        p.add_argument("--shots", type=str, default="100,1000,10000",
                       help="shot grid (invertibility)")
        p.add_argument("--failure", type=float, default=0.01,
                       help="failure tolerance (invertibility)")
        p.add_argument("--plot", action="store_true", help="render a PNG next to the table")

    p = add("sample", "signed Monte Carlo estimate of one Pauli expectation")
    p.add_argument("--error", type=Path, required=True)
    p.add_argument("--noise", type=Path, default=None,
                   help="noise-map file; builds the modified program and noisy gates")
    p.add_argument("--observable", type=str, required=True)
    p.add_argument("--shots", type=int, default=100000)
    p.add_argument("--ideal", type=float, default=1.0,
                   help="noise-free expectation of the observable")

    p = add("implementability", "minimum L1 decomposition over a free set")
    p.add_argument("--freeset", type=Path, required=True)
    p.add_argument("--target", type=str, required=True,
                   help="comma-separated coordinates")

    p = add("measures", "dense-matrix measures")
    p.add_argument("action", choices=("trace-norm", "negativity", "purity"))
    p.add_argument("--in", dest="inputs", action="append", type=Path, required=True)
    p.add_argument("--partition", type=str, default=None,
                   help="comma-separated transposed qubits (negativity)")

    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _cmd_channel(args) -> int:
    channels = [load_channel(path) for path in args.inputs]
    if args.action == "compose":
        if len(channels) < 2:
            raise ValueError("compose needs at least two --in files")
        result = channels[0]
        for other in channels[1:]:
            result = compose(result, other)
        _emit(dump_json(channel_to_dict(result), None), args.out)
        return 0
    if len(channels) != 1:
        raise ValueError(f"{args.action} takes exactly one --in file")
    c = channels[0]
    if args.action == "eig":
        _emit(dump_json({"n": c.n, "eigenvalues": list(eigenvalues(c))}, None), args.out)
    elif args.action == "invert":
        _emit(dump_json(channel_to_dict(inverse(c)), None), args.out)
    else:  # info
        info = {
            "n": c.n,
            "cptp": is_cptp(c),
            "p": p_pauli(c),
            "identity_component": identity_component(c),
        }
        _emit(dump_json(info, None), args.out)
    return 0


def _cmd_decompose(args) -> int:
    error = load_channel(args.error)
    theta = load_noise_map(args.noise)
    r = inverse(error).coeffs
    q = modified_quasiprobability(theta, r)
    from .channels import PauliChannel

    realized = compose(apply_noise(theta, PauliChannel(error.n, q)), error)
    residual = float(np.max(np.abs(realized.coeffs - np.eye(1, 4**error.n)[0])))
    program = quasi_program(PauliChannel(error.n, q))
    from .serialization import quasi_program_to_dict

    payload = quasi_program_to_dict(program)
    payload["verification_residual"] = residual
    _emit(dump_json(payload, None), args.out)
    return 0


def _cmd_bias(args) -> int:
    error = load_channel(args.error)
    theta = load_noise_map(args.noise)
    methods = ("separate", "direct") if args.method == "both" else (args.method,)
    reports = [bias_report(error, theta, args.layers, method) for method in methods]
    if args.fmt == "json":
        _emit(dump_json([r.to_dict() for r in reports], None), args.out)
    else:
        rows = [row for r in reports for row in r.records()]
        _emit(write_records(rows, TABLE_FIELDS, None, args.fmt), args.out)
    return 0


def _experiment_config(args, experiment: str) -> ExperimentConfig:
    if args.config is not None:
        data = load_json(args.config)
        if not isinstance(data, dict):
            raise ValueError("config file must hold a JSON object")
        return config_from_dict(data)
    shot_grid = tuple(int(s) for s in args.shots.split(",") if s)
    return ExperimentConfig(
        n=args.n,
        layers=args.layers,
        rate=args.rate,
        residual=args.delta,
        seeds=args.seeds,
        master_seed=args.seed,
        method=args.method,
        out=str(args.out) if args.out else None,
        fmt=args.fmt,
        shot_grid=shot_grid,
        failure=args.failure,
        plot=args.plot,
    )


def _run_experiment(args, experiment: str) -> int:
    config = _experiment_config(args, experiment)
    if experiment == "fig3":
        rows, fields = run_fig3(config), TABLE_FIELDS
    elif experiment == "fig4":
        rows, fields = run_fig4(config), TABLE_FIELDS
    else:
        rows, fields = run_invertibility_study(config), INVERTIBILITY_FIELDS
    out = Path(config.out) if config.out else None
    text = write_records(rows, fields, out, config.fmt)
    if out is None:
        sys.stdout.write(text)
    else:
        dump_json(metadata(config, experiment), out.with_suffix(out.suffix + ".meta.json"))
        if config.plot:
            from . import plotting

            png = out.with_suffix(".png")
            if experiment == "fig3":
                plotting.plot_fig3(rows, png)
            elif experiment == "fig4":
                plotting.plot_fig4(rows, png)
            else:
                plotting.plot_invertibility(rows, png)
    return 0


def _cmd_sample(args) -> int:
    error = load_channel(args.error)
    observable = PauliString.from_label(args.observable)
    if observable.n != error.n:
        raise ValueError("observable and error must share the qubit count")
    if not -1.0 <= args.ideal <= 1.0:
        raise ValueError("ideal expectation must lie in [-1, 1]")
    from .channels import PauliChannel

    r = inverse(error).coeffs
    if args.noise is not None:
        theta = load_noise_map(args.noise)
        program = quasi_program(PauliChannel(error.n, modified_quasiprobability(theta, r)))
        gates = theta
    else:
        program = quasi_program(PauliChannel(error.n, r))
        gates = None
    ideal = np.zeros(4**error.n)
    ideal[observable.index] = args.ideal
    estimate = run_pec(program, gates, error, ideal, observable, args.shots, args.seed)
    _emit(dump_json(estimate.record(), None), args.out)
    return 0


def _cmd_implementability(args) -> int:
    free_set = free_set_from_dict(load_json(args.freeset))
    target = np.array([float(v) for v in args.target.split(",") if v])
    result = implementability_lp(free_set, target)
    _emit(dump_json(lp_result_to_dict(result), None), args.out)
    return 0


def _cmd_measures(args) -> int:
    if len(args.inputs) != 1:
        raise ValueError(f"{args.action} takes exactly one --in file")
    mat = operator_from_dict(load_json(args.inputs[0]))
    if args.action == "trace-norm":
        payload = {"trace_norm": trace_norm(mat)}
    elif args.action == "negativity":
        if args.partition is None:
            raise ValueError("negativity needs --partition")
        qubits = tuple(int(q) for q in args.partition.split(",") if q)
        payload = {"log_negativity": log_negativity(mat, qubits)}
    else:
        payload = {"purity": purity(mat)}
    _emit(dump_json(payload, None), args.out)
    return 0


_COMMANDS = {
    "channel": _cmd_channel,
    "decompose": _cmd_decompose,
    "bias": _cmd_bias,
    "sample": _cmd_sample,
    "implementability": _cmd_implementability,
    "measures": _cmd_measures,
}


def cli_dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            sys.stderr.write(parser.format_usage())
            return 1
        if args.command in ("fig3", "fig4", "invertibility"):
            return _run_experiment(args, args.command)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        sys.stderr.write(str(exc) + "\n")
        return 1
    except (NotInvertibleError, SingularMapError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 2
    except (ValueError, TargetOutsideSpanError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
