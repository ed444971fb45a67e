"""Command-line front end: simulate | verify | phase | constants.

Exit codes: 0 success (a passing suite, or any completed run, including
early-terminated orbits), 1 failing verification suite, 2 usage or
configuration error, 3 I/O error.

Parameters may come from flags or from a ``key=value`` config file
(``--config``); flags win on conflict.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields

from .errors import (
    DegenerateParams,
    InsufficientSamples,
    NoConvergence,
    OrbitTerminated,
)
from .export import (
    render_phase_svg,
    write_report,
    write_trajectory_csv,
    write_trajectory_jsonl,
)
from .kahan import StepConfig, Trajectory, orbit
from .systems import (
    QuarticParams,
    SexticParams,
    SystemSpec,
    build_quartic,
    build_sextic,
)
from .vectorfield import Point2
from .verify import (
    SampleSpec,
    VerificationReport,
    conservation_report,
    h_drift_scan,
    measure_report,
    order_report,
    reversibility_report,
)

SUITES = ("conservation", "measure", "reversibility", "order", "drift-scan")
FORMATS = ("csv", "jsonl", "svg")

DEFAULT_REGION = (0.2, 2.0, -2.0, 2.0)
DEFAULT_H_LIST = (1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0)


class CliError(ValueError):
    """A usage/configuration problem; maps to exit code 2.

    Subclasses ValueError so argparse ``type=`` callables that raise it are
    reported as usage errors by argparse itself.
    """


@dataclass
class RunConfig:
    """Resolved invocation parameters shared by all commands."""

    family: str | None = None
    params: tuple[float, ...] | None = None
    h: float | None = None
    x0: float = 1.0
    y0: float = 1.0
    steps: int = 100
    out: str | None = None
    format: str = "csv"
    seed: int = 0
    region: tuple[float, float, float, float] = DEFAULT_REGION
    suite: str | None = None
    orbits: int = 5
    samples: int = 1000
    radius: float = 0.0
    horizon: float = 0.5
    h_list: tuple[float, ...] = DEFAULT_H_LIST
    segment: tuple[float, float, float, float] | None = None
    det_tol: float | None = None
    pole_tol: float | None = None


def _parse_floats(text: str, what: str, arity: int | None = None) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError as err:
        raise CliError(f"could not parse {what} {text!r}: {err}") from err
    if arity is not None and len(values) != arity:
        raise CliError(f"{what} expects {arity} comma-separated values; got {len(values)}")
    return values


def _read_config_file(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise CliError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, value = line.split("=", 1)
                entries[key.strip()] = value.strip()
    except OSError as err:
        raise CliError(f"cannot read config file {path}: {err}") from err
    return entries


_INT_KEYS = {"steps", "seed", "orbits", "samples"}
_FLOAT_KEYS = {"h", "x0", "y0", "radius", "horizon", "det_tol", "pole_tol"}
_TUPLE_KEYS = {"params": None, "region": 4, "h_list": None, "segment": 4}


def _coerce(key: str, value: str):
    if key in _INT_KEYS:
        try:
            return int(value)
        except ValueError as err:
            raise CliError(f"config key {key}={value!r}: {err}") from err
    if key in _FLOAT_KEYS:
        try:
            return float(value)
        except ValueError as err:
            raise CliError(f"config key {key}={value!r}: {err}") from err
    if key in _TUPLE_KEYS:
        return _parse_floats(value, key, _TUPLE_KEYS[key])
    return value


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge config-file entries and flags into a RunConfig; flags win."""
    cfg = RunConfig()
    known = {f.name for f in fields(RunConfig)}
    if getattr(args, "config", None):
        for key, value in _read_config_file(args.config).items():
            name = key.replace("-", "_")
            if name not in known:
                raise CliError(f"unknown config key {key!r}")
            setattr(cfg, name, _coerce(name, value))
    for name in known:
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if cfg.format not in FORMATS:
        raise CliError(f"unknown format {cfg.format!r}; choose from {', '.join(FORMATS)}")
    if cfg.suite is not None and cfg.suite not in SUITES:
        raise CliError(f"unknown suite {cfg.suite!r}; valid suites: {', '.join(SUITES)}")
    return cfg


def build_system(cfg: RunConfig) -> SystemSpec:
    if cfg.family is None:
        raise CliError("missing --family (quartic or sextic)")
    if cfg.params is None:
        raise CliError("missing --params")
    try:
        if cfg.family == "quartic":
            if len(cfg.params) != 5:
                raise CliError(
                    "family 'quartic' expects 5 comma-separated parameters "
                    f"(a,b,c,d,e); got {len(cfg.params)}"
                )
            return build_quartic(QuarticParams(*cfg.params))
        if cfg.family == "sextic":
            if len(cfg.params) != 6:
                raise CliError(
                    "family 'sextic' expects 6 comma-separated parameters "
                    f"(a,b,c,d,e,f); got {len(cfg.params)}"
                )
            return build_sextic(SexticParams(*cfg.params))
    except DegenerateParams as err:
        raise CliError(f"invalid {cfg.family} parameters: {err}") from err
    raise CliError(f"unknown family {cfg.family!r}; choose quartic or sextic")


def _step_config(cfg: RunConfig) -> StepConfig:
    if cfg.h is None:
        raise CliError("missing --h (step size)")
    if cfg.det_tol is not None:
        return StepConfig(cfg.h, det_tol=cfg.det_tol)
    return StepConfig(cfg.h)


def _write_text(path: str, writer) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer(fh)
    except OSError as err:
        raise _IoFailure(f"cannot write {path}: {err}") from err


class _IoFailure(Exception):
    """An output-file problem; maps to exit code 3."""


def cmd_simulate(cfg: RunConfig) -> int:
    system = build_system(cfg)
    step_cfg = _step_config(cfg)
    if cfg.steps < 0:
        raise CliError(f"--steps must be >= 0, got {cfg.steps}")
    if cfg.format == "svg":
        raise CliError("simulate supports formats csv and jsonl, not svg")
    pole_tol = cfg.pole_tol if cfg.pole_tol is not None else 1e-12
    traj = orbit(
        system.field, step_cfg, Point2(cfg.x0, cfg.y0), cfg.steps,
        system=system, pole_tol=pole_tol,
    )
    out = cfg.out if cfg.out is not None else f"trajectory.{cfg.format}"
    writer = write_trajectory_csv if cfg.format == "csv" else write_trajectory_jsonl
    _write_text(out, lambda fh: writer(traj, fh))
    msg = f"wrote {len(traj)} records to {out}"
    if traj.terminated_early:
        msg += f" (terminated early: {traj.termination_reason})"
    print(msg)
    return 0


def _sample_spec(cfg: RunConfig) -> SampleSpec:
    kwargs = {
        "region": cfg.region,
        "count": cfg.samples,
        "seed": cfg.seed,
        "exclusion_radius": cfg.radius,
    }
    if cfg.pole_tol is not None:
        kwargs["pole_tol"] = cfg.pole_tol
    if cfg.det_tol is not None:
        kwargs["min_step_det"] = cfg.det_tol
    try:
        return SampleSpec(**kwargs)
    except ValueError as err:
        raise CliError(str(err)) from err


def _run_suite(cfg: RunConfig) -> VerificationReport:
    system = build_system(cfg)
    if cfg.suite in ("conservation", "measure", "reversibility"):
        if cfg.h is None:
            raise CliError(f"suite {cfg.suite!r} requires --h")
        samples = _sample_spec(cfg)
        try:
            if cfg.suite == "conservation":
                return conservation_report(system, cfg.h, samples)
            if cfg.suite == "measure":
                return measure_report(system, cfg.h, samples)
            return reversibility_report(
                system.field, cfg.h, samples, exclude=system.singular_forms()
            )
        except (InsufficientSamples, ValueError) as err:
            raise CliError(str(err)) from err
    p0 = Point2(cfg.x0, cfg.y0)
    try:
        if cfg.suite == "order":
            return order_report(system, p0, cfg.horizon, cfg.h_list)
        return h_drift_scan(system, p0, cfg.steps, cfg.h_list)
    except (ValueError, NoConvergence, OrbitTerminated) as err:
        raise CliError(str(err)) from err


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.suite is None:
        raise CliError(f"missing --suite; valid suites: {', '.join(SUITES)}")
    report = _run_suite(cfg)
    print(report.summary())
    out = cfg.out if cfg.out is not None else f"report_{cfg.suite}.txt"
    _write_text(out, lambda fh: write_report(report, fh))
    print(f"report written to {out}")
    return 0 if report.passed else 1


def cmd_phase(cfg: RunConfig) -> int:
    system = build_system(cfg)
    step_cfg = _step_config(cfg)
    if cfg.orbits <= 0:
        raise CliError(f"--orbits must be >= 1, got {cfg.orbits}")
    if cfg.steps < 0:
        raise CliError(f"--steps must be >= 0, got {cfg.steps}")
    if cfg.format == "jsonl":
        raise CliError("phase supports formats csv and svg, not jsonl")
    seg = cfg.segment
    if seg is None:
        seg = (cfg.x0, cfg.y0, cfg.x0 + 0.5, cfg.y0 + 0.5)
    pole_tol = cfg.pole_tol if cfg.pole_tol is not None else 1e-12
    trajectories: list[Trajectory] = []
    for i in range(cfg.orbits):
        frac = i / (cfg.orbits - 1) if cfg.orbits > 1 else 0.0
        start = Point2(
            seg[0] + frac * (seg[2] - seg[0]), seg[1] + frac * (seg[3] - seg[1])
        )
        trajectories.append(
            orbit(system.field, step_cfg, start, cfg.steps,
                  system=system, pole_tol=pole_tol)
        )
    out = cfg.out if cfg.out is not None else f"phase.{cfg.format}"
    if cfg.format == "svg":
        svg = render_phase_svg(
            trajectories, cfg.region, f"{cfg.family} family phase portrait"
        )
        _write_text(out, lambda fh: fh.write(svg))
    else:
        def write_all(fh) -> None:
            fh.write("orbit,n,t,x,y,H,Htilde\n")
            from .export import format_number as fmt
            for oid, traj in enumerate(trajectories):
                for r in traj.records:
                    fh.write(
                        f"{oid},{r.n},{fmt(r.t)},{fmt(r.p.x)},{fmt(r.p.y)},"
                        f"{fmt(r.H)},{fmt(r.Htilde)}\n"
                    )
                if traj.terminated_early:
                    fh.write(f"# orbit {oid} terminated_early: {traj.termination_reason}\n")
        _write_text(out, write_all)
    print(f"wrote {cfg.orbits} orbits to {out}")
    return 0


def cmd_constants(cfg: RunConfig) -> int:
    system = build_system(cfg)
    if system.family == "quartic":
        constants = system.invariant_constants(0.0)
        print(f"D={constants.D!r}")
        print(f"E={constants.E!r}")
        return 0
    if cfg.h is None:
        raise CliError("sextic constants require --h (they scale with the step size)")
    constants = system.invariant_constants(cfg.h)
    for name in ("d12", "d23", "d31", "a3", "a4", "a5", "a6", "a7"):
        print(f"{name}={getattr(constants, name)!r}")
    return 0


def _add_shared_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--family", choices=("quartic", "sextic"))
    sub.add_argument("--params", type=lambda s: _parse_floats(s, "--params"))
    sub.add_argument("--h", type=float)
    sub.add_argument("--x0", type=float)
    sub.add_argument("--y0", type=float)
    sub.add_argument("--steps", type=int)
    sub.add_argument("--out")
    sub.add_argument("--format", choices=FORMATS)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--region", type=lambda s: _parse_floats(s, "--region", 4),
                     help="sampling/view rectangle x_min,x_max,y_min,y_max")
    sub.add_argument("--config", help="key=value file; flags win on conflict")
    sub.add_argument("--det-tol", dest="det_tol", type=float)
    sub.add_argument("--pole-tol", dest="pole_tol", type=float)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kahan2d",
        description="Kahan discretization of planar quadratic vector fields: "
        "orbits, invariants, verification suites, phase portraits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one orbit and export it")
    _add_shared_flags(p_sim)

    p_ver = sub.add_parser("verify", help="run a verification suite")
    _add_shared_flags(p_ver)
    p_ver.add_argument("--suite", choices=SUITES)
    p_ver.add_argument("--samples", type=int, help="accepted-sample quota")
    p_ver.add_argument("--radius", type=float,
                       help="exclusion radius around singular lines")
    p_ver.add_argument("--horizon", type=float, help="time horizon for --suite order")
    p_ver.add_argument("--h-list", dest="h_list",
                       type=lambda s: _parse_floats(s, "--h-list"),
                       help="halving step sizes for order / drift-scan")

    p_phase = sub.add_parser("phase", help="export a multi-orbit phase portrait")
    _add_shared_flags(p_phase)
    p_phase.add_argument("--orbits", type=int)
    p_phase.add_argument("--segment", type=lambda s: _parse_floats(s, "--segment", 4),
                         help="seed segment x_start,y_start,x_end,y_end")

    p_const = sub.add_parser("constants", help="print the invariant constants")
    _add_shared_flags(p_const)

    return parser


_COMMANDS = {
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "phase": cmd_phase,
    "constants": cmd_constants,
}


# Flags whose comma-list values may start with '-': argparse would otherwise
# mistake "-0.5,2.5,..." for an option, so fold them into --flag=value form.
_LIST_FLAGS = ("--region", "--segment", "--params", "--h-list")


def _normalize_argv(argv: list[str]) -> list[str]:
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _LIST_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_normalize_argv(list(argv)))
    except SystemExit as err:
        return int(err.code) if err.code is not None else 0
    try:
        cfg = build_run_config(args)
        return _COMMANDS[args.command](cfg)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except _IoFailure as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
