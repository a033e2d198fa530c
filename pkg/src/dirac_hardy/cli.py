"""Command-line front end.

Every flag mirrors a key of the flat ``key = value`` config format, e.g.
``--r-min`` <-> ``r_min``.  Values from ``--config FILE`` are overridden by
flags given on the command line.

Exit status: 0 pass, 1 inequality/check failed, 2 bad configuration or an
excluded parameter.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path


from . import reports
from . import weights as W
from .clifford import build_clifford
from .dirac import GridSpec
from .verifier import (
    DEFAULT_SLACK,
    INEQUALITY_IDS,
    angular_identity_check,
    condition_gamma,
    condition_radial_c,
    d_constant,
    harmonic_test_field,
    magnetic_reduction_check,
    make_case,
    matrix_condition_M,
    thm5_constant,
    verify_inequality,
)

COMMANDS = ("check-weights", "verify", "thm5-constant", "angular-check", "magnetic-verify")
OUTPUT_DIR_ENV = "DIRAC_HARDY_OUTPUT_DIR"
DEFAULT_POINTS = {1: 256, 2: 128, 3: 48}
ANGULAR_TOL = 1e-6


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str | None = None
    ineq: str | None = None
    tau: float | None = None
    alpha: float | None = None
    phi: str = "linear"
    n: int | None = None
    points: int | None = None
    R: float = 3.0
    r_min: float = 1.0
    r_max: float = 2.0
    trials: int | None = None
    seed: int = 0
    slack: float = DEFAULT_SLACK
    massive: bool = False
    r_lo: float | None = None
    r_hi: float | None = None
    per_decade: int = 512
    phase: str = "gaussian"
    amplitude: float = 1.0
    l_max: int = 2
    convention: str = "stated"
    resolution_check: bool = True
    json_out: str | None = None
    csv_out: str | None = None

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                lines.append(f"{f.name} = {_format(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        return cls(**parse_config_text(text))


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _format(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def _coerce(key: str, raw: str):
    kind = _TYPES[key]
    if "bool" in kind:
        low = raw.strip().lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
        return low in ("true", "1", "yes")
    if "int" in kind:
        return int(raw)
    if "float" in kind:
        return float(raw)
    return raw.strip()


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = _coerce(key, raw)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dirac-hardy", description="Weighted Hardy-Carleman inequalities for Dirac operators"
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, default=None, help="flat key = value config file")
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        flag = "--" + f.name.replace("_", "-")
        if "bool" in f.type:
            p.add_argument(flag, dest=f.name, default=None, type=lambda s, k=f.name: _coerce(k, s),
                           metavar="{true,false}")
        else:
            p.add_argument(flag, dest=f.name, default=None, type=lambda s, k=f.name: _coerce(k, s))
    return p


def resolve_config(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = {}
    if args.config is not None:
        try:
            values.update(parse_config_text(args.config.read_text(encoding="utf-8")))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    values["command"] = args.command
    return RunConfig(**values)


def _grid(cfg: RunConfig, default_n: int = 3, default_points=None) -> GridSpec:
    n = cfg.n if cfg.n is not None else default_n
    points = cfg.points or default_points or DEFAULT_POINTS.get(n, 16)
    return GridSpec(n, points, cfg.R)


def _out_paths(cfg: RunConfig, stem: str) -> tuple[Path, Path]:
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    j = Path(cfg.json_out) if cfg.json_out else base / f"{stem}.json"
    c = Path(cfg.csv_out) if cfg.csv_out else base / f"{stem}.csv"
    return j, c


def _case(cfg: RunConfig, n: int):
    if cfg.ineq is None:
        raise ConfigError(f"--ineq is required; choose from {', '.join(INEQUALITY_IDS)}")
    return make_case(cfg.ineq, n, tau=cfg.tau, alpha=cfg.alpha, phi=cfg.phi, annulus=(cfg.r_min, cfg.r_max))


def _summary(rep) -> str:
    const = "none" if rep.paper_constant is None else f"{rep.paper_constant:.6g}"
    return (
        f"{rep.inequality_id} n={rep.grid.n} op={rep.operator}: paper constant {const}, "
        f"observed min {rep.observed_min_quotient:.6g}, verdict {rep.verdict}"
    )


def cmd_verify(cfg: RunConfig) -> int:
    grid = _grid(cfg)
    case = _case(cfg, grid.n)
    op = "H" if cfg.massive else None
    rep = verify_inequality(
        case, grid, trials=cfg.trials or 25, seed=cfg.seed, annulus=(cfg.r_min, cfg.r_max),
        slack=cfg.slack, operator=op, resolution_check=cfg.resolution_check,
    )
    j, c = _out_paths(cfg, f"verify_{case.ineq_id}")
    payload = rep.to_dict()
    payload["config"] = _config_dict(cfg)
    reports.write_json(payload, j)
    reports.write_trials(rep, c)
    print(_summary(rep))
    return 1 if rep.verdict == "fail" else 0


def cmd_magnetic(cfg: RunConfig) -> int:
    grid = _grid(cfg, default_n=2, default_points=256 if (cfg.n in (None, 2)) else None)
    case = _case(cfg, grid.n)
    rep = magnetic_reduction_check(
        case, grid, trials=cfg.trials or 10, seed=cfg.seed, annulus=(cfg.r_min, cfg.r_max),
        slack=cfg.slack, phase=cfg.phase, amplitude=cfg.amplitude,
    )
    j, c = _out_paths(cfg, f"magnetic_{case.ineq_id}")
    payload = rep.to_dict()
    payload["config"] = _config_dict(cfg)
    reports.write_json(payload, j)
    reports.write_trials(rep, c)
    print(_summary(rep) + f", max gauge deviation {rep.extra['max_relative_gauge_deviation']:.3g}")
    return 0 if rep.passed else 1


def cmd_thm5(cfg: RunConfig) -> int:
    if cfg.tau is None:
        raise ConfigError("--tau is required")
    n = cfg.n if cfg.n is not None else 3
    pc = thm5_constant(cfg.tau, n)
    j, _ = _out_paths(cfg, "thm5_constant")
    reports.write_json({"power_case": pc.to_dict(), "config": _config_dict(cfg)}, j)
    if pc.degenerate:
        print(
            f"tau={cfg.tau:g}, n={n}: excluded, tau must differ from 2k - n for integers k "
            f"(here tau = 2*{pc.k_star} - {n})",
            file=sys.stderr,
        )
        return 2
    tie = " (tie, smaller k chosen)" if pc.tie else ""
    print(f"tau={cfg.tau:g} n={n}: nu={pc.nu:g} k*={pc.k_star}{tie} d={pc.d:g} c = {pc.c:g}")
    return 0


def cmd_angular(cfg: RunConfig) -> int:
    grid = _grid(cfg)
    if grid.n != 3:
        raise ConfigError("angular-check runs in n = 3")
    if cfg.convention not in ("stated", "corrected"):
        raise ConfigError("convention must be 'stated' or 'corrected'")
    rep = build_clifford(3)
    rows = []
    for l in range(cfg.l_max + 1):
        for order in range(-l, l + 1):
            fld = harmonic_test_field(grid, rep.m, l, order)
            stated = angular_identity_check(rep, [(fld, l)], shift_sign=1)
            corrected = angular_identity_check(rep, [(fld, l)], shift_sign=-1)
            rows.append((l, order, l * (l + 1), stated, corrected))
    col = 3 if cfg.convention == "stated" else 4
    worst = max(r[col] for r in rows)
    ok = worst <= ANGULAR_TOL
    j, c = _out_paths(cfg, "angular_check")
    reports.write_json(
        {
            "convention": cfg.convention,
            "identity": "L(L+1) = -Delta_omega" if cfg.convention == "stated" else "L(L-1) = -Delta_omega",
            "grid": grid.to_dict(),
            "worst_relative_residual": worst,
            "tolerance": ANGULAR_TOL,
            "verdict": "pass" if ok else "fail",
            "per_mode": [
                {"l": l, "order": o, "eigenvalue": e, "residual_stated": s, "residual_corrected": k}
                for l, o, e, s, k in rows
            ],
            "config": _config_dict(cfg),
        },
        j,
    )
    reports.write_rows(("l", "order", "eigenvalue", "residual_stated", "residual_corrected"), rows, c)
    print(f"angular identity ({cfg.convention}) n=3 grid {grid.points}^3: worst residual {worst:.3g}, "
          f"verdict {'pass' if ok else 'fail'}")
    return 0 if ok else 1


def cmd_check_weights(cfg: RunConfig) -> int:
    n = cfg.n if cfg.n is not None else 3
    case = _case(cfg, n)
    rep = build_clifford(n)
    r_lo = cfg.r_lo if cfg.r_lo is not None else cfg.r_min
    r_hi = cfg.r_hi if cfg.r_hi is not None else cfg.r_max
    r = W.log_samples(r_lo, r_hi, cfg.per_decade)
    massive = case.operator == "H" or cfg.massive
    conds = [matrix_condition_M(rep, case.pair, r, massive=massive), condition_radial_c(case.pair.b, r)]
    if case.pair.pairing == "half_power":
        conds.append(d_constant(rep, case.pair, r))
    if case.phase is not None:
        conds.append(condition_gamma(case.phase, r))
    primary = conds[2] if case.pair.pairing == "half_power" else conds[0]
    j, c = _out_paths(cfg, f"weights_{case.ineq_id}")
    reports.write_json(
        {
            "inequality_id": case.ineq_id,
            "params": dict(sorted(case.params.items())),
            "operator": case.operator,
            "paper_constant": case.paper_constant,
            "primary_criterion": primary.criterion,
            "conditions": [x.to_dict() for x in conds],
            "config": _config_dict(cfg),
        },
        j,
    )
    m_vals = W.radial_M(case.pair, r)
    m0_vals = W.radial_M0(case.pair.b, r)
    reports.write_rows(("r", "M", "M0"), zip(r.tolist(), m_vals.tolist(), m0_vals.tolist()), c)
    print(
        f"{case.ineq_id}: {primary.criterion} = {primary.value:.6g} on [{r_lo:g}, {r_hi:g}] "
        f"({'satisfied' if primary.satisfied else 'not satisfied'})"
    )
    return 0 if primary.satisfied else 1


def _config_dict(cfg: RunConfig) -> dict:
    return {f.name: getattr(cfg, f.name) for f in fields(cfg) if f.name not in ("json_out", "csv_out")}


HANDLERS = {
    "check-weights": cmd_check_weights,
    "verify": cmd_verify,
    "thm5-constant": cmd_thm5,
    "angular-check": cmd_angular,
    "magnetic-verify": cmd_magnetic,
}


def run(cfg: RunConfig) -> int:
    try:
        return HANDLERS[cfg.command](cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
