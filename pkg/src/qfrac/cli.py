"""Command-line front end.

    qfrac <command> --config <path> [--out <path>] [--format csv|json]

Commands: eval (operator tables), solve (Picard solver), verify (identity
registry), ml (q-Mittag-Leffler partial sums). Configs are flat
`key = value` text files with `#` comments; unknown keys are errors.
The environment variable QFRAC_MAX_TERMS overrides SeriesControl.max_terms.

Exit codes: 0 success; 1 verify failures; 2 config validation; 3 numerical
non-convergence; 4 solver max_iter exhausted; 5 trust-region exit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass

from . import cauchy, exprparse
from .errors import ConvergenceError, DomainError, PoleError, TrustRegionError
from .operators import FracOrder, OperatorContext, caputo_derivative, \
    frac_derivative_rl, frac_integral
from .qcalc import QLattice
from .qcore import DEFAULT_INTEGRATION_CTRL, QParams, SeriesControl
from .verify import run_registry

__all__ = ["main", "RunConfig", "load_config"]

_COMMANDS = ("eval", "solve", "verify", "ml")
_OPERATORS = ("J", "D", "caputo")

_KEY_TYPES = {
    "command": str,
    "q": float,
    "p": float,
    "alpha": float,
    "a": float,
    "b": float,
    "zeta": float,
    "rhs": str,
    "r": float,
    "lipschitz_a": float,
    "lattice_depth": int,
    "tol": float,
    "max_iter": int,
    "operator": str,
    "function": str,
    "m_terms": int,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    q: float | None = None
    p: float = 1.0
    alpha: float | None = None
    a: float = 0.0
    b: float = 1.0
    zeta: float | None = None
    rhs: str | None = None
    r: float = 1.0
    lipschitz_a: float | None = None
    lattice_depth: int = 12
    tol: float = 1e-10
    max_iter: int = 50
    operator: str | None = None
    function: str | None = None
    m_terms: int | None = None

    def resolved(self) -> dict:
        """Fully resolved key = value view, embedded in JSON reports."""
        out = {}
        for key in _KEY_TYPES:
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


def load_config(path: str, command: str) -> RunConfig:
    """Parse and validate a flat key = value config file."""
    raw: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, value = text.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEY_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value

    cfg = RunConfig(command=command)
    for key, value in raw.items():
        typ = _KEY_TYPES[key]
        if typ is str:
            parsed = value
        else:
            try:
                parsed = typ(value)
            except ValueError as exc:
                raise ConfigError(
                    f"{key}: cannot parse {value!r} as {typ.__name__}"
                ) from exc
        setattr(cfg, key, parsed)
    if "command" in raw and raw["command"] != command:
        raise ConfigError(
            f"command: config says {raw['command']!r} but the "
            f"{command!r} subcommand was invoked")
    cfg.command = command
    _validate(cfg)
    return cfg


def _require(cfg: RunConfig, *keys: str) -> None:
    for key in keys:
        if getattr(cfg, key) is None:
            raise ConfigError(f"{key}: required for command {cfg.command!r}")


def _validate(cfg: RunConfig) -> None:
    if cfg.command not in _COMMANDS:
        raise ConfigError(f"command: must be one of {', '.join(_COMMANDS)}")
    if cfg.command != "verify":
        _require(cfg, "q", "alpha")
        if not 0.0 < cfg.q < 1.0:
            raise ConfigError(f"q: must lie in (0, 1), got {cfg.q}")
        if not 0.0 < cfg.alpha < 1.0:
            raise ConfigError(f"alpha: must lie in (0, 1), got {cfg.alpha}")
    if cfg.q is not None and not 0.0 < cfg.q < 1.0:
        raise ConfigError(f"q: must lie in (0, 1), got {cfg.q}")
    if not cfg.p > 0.0:
        raise ConfigError(f"p: must be positive, got {cfg.p}")
    if cfg.a < 0.0:
        raise ConfigError(f"a: must be nonnegative, got {cfg.a}")
    if not cfg.b > cfg.a:
        raise ConfigError(f"b: must exceed a, got a={cfg.a}, b={cfg.b}")
    if cfg.lattice_depth < 1:
        raise ConfigError(f"lattice_depth: must be >= 1, got "
                          f"{cfg.lattice_depth}")
    if not cfg.tol > 0.0:
        raise ConfigError(f"tol: must be positive, got {cfg.tol}")
    if cfg.max_iter < 1:
        raise ConfigError(f"max_iter: must be >= 1, got {cfg.max_iter}")
    if not cfg.r > 0.0:
        raise ConfigError(f"r: must be positive, got {cfg.r}")
    if cfg.lipschitz_a is not None and not cfg.lipschitz_a > 0.0:
        raise ConfigError(f"lipschitz_a: must be positive, got "
                          f"{cfg.lipschitz_a}")
    if cfg.command == "eval":
        _require(cfg, "operator", "function")
        if cfg.operator not in _OPERATORS:
            raise ConfigError(
                f"operator: must be one of {', '.join(_OPERATORS)}")
    elif cfg.command == "solve":
        _require(cfg, "zeta", "rhs")
    elif cfg.command == "ml":
        _require(cfg, "m_terms")
        if cfg.m_terms < 0:
            raise ConfigError(f"m_terms: must be nonnegative, got "
                              f"{cfg.m_terms}")


def _series_control() -> SeriesControl:
    ctrl = DEFAULT_INTEGRATION_CTRL
    override = os.environ.get("QFRAC_MAX_TERMS")
    if override is not None:
        try:
            max_terms = int(override)
        except ValueError as exc:
            raise ConfigError(
                f"QFRAC_MAX_TERMS: cannot parse {override!r} as int"
            ) from exc
        ctrl = SeriesControl(ctrl.abs_tol, ctrl.rel_tol, max_terms,
                             ctrl.consecutive_small)
    return ctrl


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _write_atomic(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qfrac-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header: str, rows: list[tuple[float, float]]) -> str:
    lines = [header]
    lines += [f"{_fmt(x)},{_fmt(v)}" for x, v in rows]
    return "\n".join(lines) + "\n"


def _report_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _compiled_function(source: str, variables: set[str], cfg: RunConfig):
    expr = exprparse.parse(source, variables | {"q", "p", "alpha"})
    consts = {"q": cfg.q, "p": cfg.p, "alpha": cfg.alpha}

    def call(**bindings: float) -> float:
        return exprparse.evaluate(expr, {**consts, **bindings})

    return call


def _cmd_eval(cfg: RunConfig, out: str | None, fmt: str) -> int:
    ctrl = _series_control()
    fn = _compiled_function(cfg.function, {"x"}, cfg)
    f = lambda x: fn(x=x)
    params = QParams(cfg.q, cfg.p)
    ctx = OperatorContext(params, a=cfg.a, ctrl=ctrl)
    order = FracOrder(cfg.alpha)
    op = {
        "J": frac_integral,
        "D": frac_derivative_rl,
        "caputo": caputo_derivative,
    }[cfg.operator]
    lattice = QLattice(cfg.b, cfg.q, cfg.lattice_depth, floor_a=cfg.a)
    rows = []
    for x in lattice.nodes:
        try:
            rows.append((x, op(f, x, order, ctx)))
        except (ConvergenceError, PoleError, DomainError) as exc:
            print(f"operator {cfg.operator} failed at node x={_fmt(x)}: {exc}",
                  file=sys.stderr)
            return 3
    if fmt == "json":
        _write_atomic(out, _report_json({
            "schema": 1,
            "config": cfg.resolved(),
            "table": {"x": [r[0] for r in rows],
                      "value": [r[1] for r in rows]},
        }))
    else:
        _write_atomic(out, _csv("x,value", rows))
    return 0


def _cmd_ml(cfg: RunConfig, out: str | None, fmt: str) -> int:
    ctrl = _series_control()
    params = QParams(cfg.q, cfg.p)
    order = FracOrder(cfg.alpha)
    lattice = QLattice(cfg.b, cfg.q, cfg.lattice_depth, floor_a=cfg.a)
    try:
        rows = [(x, cauchy.q_mittag_leffler(x, cfg.m_terms, order, params,
                                            ctrl))
                for x in lattice.nodes]
    except (ConvergenceError, PoleError) as exc:
        print(f"q-Mittag-Leffler evaluation failed: {exc}", file=sys.stderr)
        return 3
    if fmt == "json":
        _write_atomic(out, _report_json({
            "schema": 1,
            "config": cfg.resolved(),
            "table": {"x": [r[0] for r in rows],
                      "value": [r[1] for r in rows]},
        }))
    else:
        _write_atomic(out, _csv("x,value", rows))
    return 0


def _cmd_solve(cfg: RunConfig, out: str | None, fmt: str) -> int:
    ctrl = _series_control()
    fn = _compiled_function(cfg.rhs, {"t", "u"}, cfg)
    rhs = lambda t, u: fn(t=t, u=u)
    problem = cauchy.CauchyProblem(
        rhs=rhs, a=cfg.a, b=cfg.b, zeta=cfg.zeta,
        order=FracOrder(cfg.alpha), params=QParams(cfg.q, cfg.p),
        lipschitz_A=cfg.lipschitz_a, radius_r=cfg.r,
    )
    lattice = QLattice(cfg.b, cfg.q, cfg.lattice_depth, floor_a=cfg.a)
    try:
        report = cauchy.solve(problem, lattice, tol=cfg.tol,
                              max_iter=cfg.max_iter, ctrl=ctrl)
    except TrustRegionError as exc:
        print(f"trust-region exit: {exc}", file=sys.stderr)
        return 5
    except ConvergenceError as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return 3

    nodes = lattice.nodes
    rows = list(zip(nodes, report.solution))
    payload = {
        "schema": 1,
        "config": cfg.resolved(),
        "table": {"x": [r[0] for r in rows], "u": [r[1] for r in rows]},
        "residuals": report.residuals,
        "apriori_bounds": report.apriori_bounds,
        "converged": report.converged,
        "iterations_used": report.iterations_used,
        "k_estimate": report.k_estimate,
        "bound_slack": report.bound_slack,
    }
    if fmt == "json":
        _write_atomic(out, _report_json(payload))
    else:
        _write_atomic(out, _csv("x,u", rows))
        report_text = _report_json({k: v for k, v in payload.items()
                                    if k != "table"})
        if out is None:
            sys.stderr.write(report_text)
        else:
            _write_atomic(out + ".report.json", report_text)
    if not report.converged:
        print(f"solver did not converge within max_iter={cfg.max_iter} "
              f"(last residual {report.residuals[-1]:.3e})", file=sys.stderr)
        return 4
    return 0


def _cmd_verify(cfg: RunConfig, out: str | None, fmt: str,
                inject_fault: str | None) -> int:
    ctrl = _series_control()
    restrict = {}
    if cfg.q is not None:
        restrict["q"] = cfg.q
    if cfg.p != 1.0:
        restrict["p"] = cfg.p
    results = run_registry(restrict or None, ctrl, inject_fault=inject_fault)
    payload = {
        "schema": 1,
        "config": cfg.resolved(),
        "identity_results": [
            {"name": r.name, "max_error": r.max_error,
             "tolerance": r.tolerance, "passed": r.passed}
            for r in results
        ],
    }
    _write_atomic(out, _report_json(payload))
    failing = [r.name for r in results if not r.passed]
    if failing:
        print("failing identities: " + ", ".join(failing), file=sys.stderr)
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qfrac",
        description="Generalized q-fractional calculus operators and solver.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True,
                         help="flat key = value config file")
        cmd.add_argument("--out", default=None,
                         help="output path (default: stdout)")
        cmd.add_argument("--format", choices=("csv", "json"), default="csv")
        if name == "verify":
            cmd.add_argument("--inject-fault", default=None,
                             metavar="IDENTITY",
                             help="deliberately fail one identity "
                                  "(harness self-test)")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.command)
    except (ConfigError, exprparse.ParseError) as exc:
        print(str(exc), file=sys.stderr)
        return 2

    try:
        if args.command == "eval":
            return _cmd_eval(cfg, args.out, args.format)
        if args.command == "solve":
            return _cmd_solve(cfg, args.out, args.format)
        if args.command == "ml":
            return _cmd_ml(cfg, args.out, args.format)
        return _cmd_verify(cfg, args.out, args.format, args.inject_fault)
    except (ConfigError, exprparse.ParseError) as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except exprparse.EvalError as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
