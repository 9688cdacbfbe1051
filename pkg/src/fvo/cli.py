"""Command-line interface: spectra, wavefunctions, verification, sweeps.

    python3 -m fvo spectrum --scenario oscillator --omega 1 --n-max 2
    python3 -m fvo wavefunction --scenario coulomb --lambda 0.5 --j 1 --r-max 20
    python3 -m fvo verify --suite all
    python3 -m fvo sweep --scenario oscillator --omega 1 --j 1 \\
        --sweep-param alpha --sweep-from 0.3 --sweep-to 1 --sweep-steps 8

Exit codes: 0 ok, 1 invalid input, 2 convergence failure, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field, fields, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import oracle, spectra, verify
from .errors import ConvergenceError, DomainError
from .spacetime import QuantumNumbers, SpacetimeParams
from .spectra import KINDS, ScenarioSpec

EXIT_OK, EXIT_INPUT, EXIT_CONVERGENCE, EXIT_VERIFY = 0, 1, 2, 3

SPECTRUM_COLUMNS = ["n", "E", "omega_used", "mode", "scenario", "alpha", "chi", "K", "j", "lambda"]
WAVEFUNCTION_COLUMNS = ["r", "psi", "phi1", "phi2", "charge_density"]
SWEEP_COLUMNS = ["parameter", "value", "n", "sign", "E", "omega_used", "mode", "scenario"]
SWEEP_PARAMS = ("alpha", "chi", "K", "lambda", "omega")
ORACLE_KEYS = ("grid_points", "fixed_point_tol", "max_fixed_point_iters", "damping")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    scenario: Optional[str] = None
    mode: str = "rederived"
    m: float = 1.0
    omega: Optional[float] = None
    lam: Optional[float] = None
    alpha: float = 1.0
    chi: float = 0.0
    K: float = 0.0
    j: int = 0
    n_max: int = 3
    N_param: Optional[float] = None
    r_max: float = 10.0
    points: int = 401
    format: str = "csv"
    out: Optional[str] = None
    n: int = 0
    E: Optional[float] = None
    branch: int = 1
    suite: str = "all"
    svg: Optional[str] = None
    oracle: bool = False
    oracle_config: Dict[str, float] = field(default_factory=dict)
    sweep_param: Optional[str] = None
    sweep_from: Optional[float] = None
    sweep_to: Optional[float] = None
    sweep_steps: Optional[int] = None


# config-file key -> RunConfig attribute; file keys mirror flags with "_"
_KEY_TO_ATTR = {f.name: f.name for f in fields(RunConfig) if f.name not in ("lam", "oracle_config")}
_KEY_TO_ATTR["lambda"] = "lam"
_KEY_TO_ATTR.update({k: "oracle_config" for k in ORACLE_KEYS})
_INT_KEYS = {"j", "n_max", "points", "n", "branch", "sweep_steps", "grid_points", "max_fixed_point_iters"}
_STR_KEYS = {"scenario", "mode", "format", "out", "suite", "svg", "sweep_param"}


def _coerce(key: str, value):
    if value is None:
        return None
    if key == "oracle":
        if not isinstance(value, bool):
            raise InputError(f"config key {key!r} must be true or false")
        return value
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise InputError(f"config key {key!r} must be a string")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"config key {key!r} must be a number")
    if key in _INT_KEYS:
        if float(value) != int(value):
            raise InputError(f"config key {key!r} must be an integer")
        return int(value)
    return float(value)


def load_config_file(path: str) -> Dict[str, object]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise InputError(f"cannot read config {path}: {err}") from err
    if not isinstance(data, dict):
        raise InputError("config file must hold a single JSON object")
    unknown = sorted(set(data) - set(_KEY_TO_ATTR))
    if unknown:
        raise InputError(f"unknown config keys: {', '.join(unknown)}")
    return data


def build_config(file_values: Dict[str, object], flag_values: Dict[str, object]) -> RunConfig:
    """File values first, then flags; both keyed by file-style names."""
    cfg = RunConfig()
    oracle_cfg: Dict[str, float] = {}
    for source in (file_values, flag_values):
        for key, value in source.items():
            attr = _KEY_TO_ATTR[key]
            if attr == "oracle_config":
                oracle_cfg[key] = _coerce(key, value)
            else:
                setattr(cfg, attr, _coerce(key, value))
    cfg.oracle_config = oracle_cfg
    return cfg


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _shared(parser: argparse.ArgumentParser):
    s = argparse.SUPPRESS
    parser.add_argument("--config", default=s, help="JSON file with flag values")
    parser.add_argument("--scenario", choices=KINDS, default=s)
    parser.add_argument("--mode", choices=("rederived", "as_printed"), default=s)
    parser.add_argument("--m", type=float, default=s, help="particle mass")
    parser.add_argument("--omega", type=float, default=s, help="oscillator frequency")
    parser.add_argument("--lambda", dest="lambda", type=float, default=s, help="Coulomb coupling")
    parser.add_argument("--alpha", type=float, default=s, help="angular parameter, 0 < alpha <= 1")
    parser.add_argument("--chi", type=float, default=s, help="dislocation parameter")
    parser.add_argument("--K", type=float, default=s, help="momentum along z")
    parser.add_argument("--j", type=int, default=s, help="angular quantum number")
    parser.add_argument("--n-max", dest="n_max", type=int, default=s)
    parser.add_argument("--N-param", dest="N_param", type=float, default=s, help="FV splitting parameter (default m)")
    parser.add_argument("--r-max", dest="r_max", type=float, default=s)
    parser.add_argument("--points", type=int, default=s)
    parser.add_argument("--format", choices=("csv", "json"), default=s)
    parser.add_argument("--out", default=s, help="output path (default stdout)")
    parser.add_argument("--grid-points", dest="grid_points", type=int, default=s, help="oracle grid size")
    parser.add_argument("--fixed-point-tol", dest="fixed_point_tol", type=float, default=s)
    parser.add_argument("--max-fixed-point-iters", dest="max_fixed_point_iters", type=int, default=s)
    parser.add_argument("--damping", type=float, default=s)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fvo", description="FV oscillator spectra in dislocation space-time")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    s = argparse.SUPPRESS

    p = sub.add_parser("spectrum", help="closed-form levels, one row per (n, sign)")
    _shared(p)
    p.add_argument("--oracle", action="store_true", default=s, help="add oracle energies (json only)")

    p = sub.add_parser("wavefunction", help="radial profile and FV components on a grid")
    _shared(p)
    p.add_argument("--n", type=int, default=s)
    p.add_argument("--E", type=float, default=s, help="energy (free scenario)")
    p.add_argument("--branch", type=int, choices=(1, -1), default=s)
    p.add_argument("--svg", default=s, help="also write a line chart of psi")

    p = sub.add_parser("verify", help="run a verification suite")
    _shared(p)
    p.add_argument("--suite", default=s)

    p = sub.add_parser("sweep", help="levels over a parameter range, long form")
    _shared(p)
    p.add_argument("--sweep-param", dest="sweep_param", default=s)
    p.add_argument("--sweep-from", dest="sweep_from", type=float, default=s)
    p.add_argument("--sweep-to", dest="sweep_to", type=float, default=s)
    p.add_argument("--sweep-steps", dest="sweep_steps", type=int, default=s)
    return parser


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


def fmt(x) -> str:
    """Shortest round-trip decimal (at most 17 significant digits)."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _csv_text(columns: List[str], rows: List[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _scenario(cfg: RunConfig, need_lambda: bool = True) -> ScenarioSpec:
    if cfg.scenario is None:
        raise InputError("--scenario is required")
    if cfg.scenario in ("oscillator", "oscillator_coulomb") and cfg.omega is None:
        raise InputError(f"--omega is required for scenario {cfg.scenario}")
    if cfg.scenario in ("coulomb", "oscillator_coulomb") and cfg.lam is None and need_lambda:
        raise InputError(f"--lambda is required for scenario {cfg.scenario}")
    params = SpacetimeParams(alpha=cfg.alpha, chi=cfg.chi)
    qn = QuantumNumbers(
        j=cfg.j,
        K=cfg.K,
        n=cfg.n,
        m=cfg.m,
        omega=cfg.omega if cfg.omega is not None else 0.0,
        lam=cfg.lam if cfg.lam is not None else 0.0,
        N_param=cfg.N_param,
    )
    return ScenarioSpec(cfg.scenario, params, qn, cfg.mode)


def _oracle_config(cfg: RunConfig) -> oracle.OracleConfig:
    return oracle.OracleConfig(**cfg.oracle_config)


def _level_rows(spec: ScenarioSpec, result: spectra.SpectrumResult):
    for level in result.levels:
        for E in (level.E_plus, level.E_minus):
            yield level, E


def _oracle_values(spec: ScenarioSpec, result: spectra.SpectrumResult, ocfg: oracle.OracleConfig):
    """Finite-difference energies for each level, keyed like the levels list."""
    out = []
    if spec.kind == "oscillator":
        res = oracle.oscillator_levels(spec, len(result.levels), ocfg)
        return [[float(e), -float(e)] for e in res.eigenvalues]
    for level in result.levels:
        if spec.kind == "coulomb":
            branch = -1 if spec.qn.lam > 0 else 1
            res = oracle.nonlinear_eigensolve(spec, level.n, ocfg, branch=branch)
            out.append([float(v) for v in res.eigenvalues])
        else:
            at = replace(spec, qn=replace(spec.qn, omega=level.omega_used))
            pair = []
            for branch in (1, -1):
                idx = spectra.heun_node_count(level, branch)
                res = oracle.nonlinear_eigensolve(at, idx, ocfg, branch=branch)
                pair.extend(float(v) for v in res.eigenvalues)
            out.append(pair)
    return out


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig) -> int:
    spec = _scenario(cfg)
    if cfg.oracle and cfg.format != "json":
        raise InputError("--oracle output needs --format json")
    result = spectra.spectrum(spec, cfg.n_max)
    if cfg.format == "csv":
        rows = [
            (level.n, E, level.omega_used, spec.mode, spec.kind, cfg.alpha, cfg.chi, cfg.K, cfg.j, spec.qn.lam)
            for level, E in _level_rows(spec, result)
        ]
        _emit(_csv_text(SPECTRUM_COLUMNS, rows), cfg.out)
        return EXIT_OK
    levels = []
    for level in result.levels:
        entry = {
            "n": level.n,
            "E_plus": level.E_plus,
            "E_minus": level.E_minus,
            "omega_used": level.omega_used,
            "constraint_residuals": level.constraint_residuals,
        }
        if level.bound is not None:
            entry["bound"] = level.bound
        if level.alternatives:
            entry["alternatives"] = level.alternatives
        if level.delta is not None:
            entry["delta"] = level.delta
        levels.append(entry)
    if cfg.oracle:
        for entry, values in zip(levels, _oracle_values(spec, result, _oracle_config(cfg))):
            entry["oracle"] = values
    payload = {
        "scenario": spec.kind,
        "mode": spec.mode,
        "params": {"alpha": cfg.alpha, "chi": cfg.chi, "K": cfg.K, "j": cfg.j, "m": cfg.m,
                   "omega": spec.qn.omega, "lambda": spec.qn.lam},
        "levels": levels,
        "diagnostics": result.diagnostics,
    }
    _emit(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", cfg.out)
    return EXIT_OK


def svg_line_chart(x, y, width: int = 480, height: int = 320) -> str:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pad = 30
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(min(y.min(), 0.0)), float(max(y.max(), 0.0))
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def px(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
    zero = py(0.0)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'<line x1="{pad}" y1="{zero:.2f}" x2="{width - pad}" y2="{zero:.2f}" stroke="#999"/>\n'
        f'<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" points="{pts}"/>\n'
        f'<text x="{pad}" y="{pad - 10}" font-size="12">psi(r), r in [{fmt(x0)}, {fmt(x1)}]</text>\n'
        "</svg>\n"
    )


def cmd_wavefunction(cfg: RunConfig) -> int:
    spec = _scenario(cfg)
    if cfg.points < 2:
        raise InputError("--points must be at least 2")
    if not cfg.r_max > 0:
        raise InputError("--r-max must be positive")
    grid = np.linspace(0.0, cfg.r_max, cfg.points)
    sol = spectra.radial_solution(spec, grid, n=cfg.n, E=cfg.E, branch=cfg.branch)
    mode = sol.two_component(spec.qn.N_param)
    rho = spectra.fv_core.charge_density(mode)
    if cfg.format == "csv":
        rows = zip(grid, sol.profile, mode.phi1, mode.phi2, rho)
        _emit(_csv_text(WAVEFUNCTION_COLUMNS, rows), cfg.out)
    else:
        payload = {
            "scenario": spec.kind,
            "mode": spec.mode,
            "energy": sol.energy,
            "normalization": sol.normalization,
            "notes": sol.notes,
            "columns": {
                "r": grid, "psi": sol.profile, "phi1": mode.phi1, "phi2": mode.phi2, "charge_density": rho,
            },
        }
        _emit(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", cfg.out)
    if cfg.svg:
        with open(cfg.svg, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg_line_chart(grid, sol.profile))
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.suite not in verify.SUITES:
        raise InputError(f"unknown suite {cfg.suite!r}; expected one of {', '.join(verify.SUITES)}")
    report = verify.run_suite(cfg.suite)
    if cfg.format == "csv":
        rows = [(c.criterion, c.name, c.measured, "" if c.tolerance is None else c.tolerance,
                 "" if c.passed is None else c.passed) for c in report.checks]
        _emit(_csv_text(["criterion", "check", "measured", "tolerance", "passed"], rows), cfg.out)
    else:
        _emit(report.to_json(), cfg.out)
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.sweep_param is None:
        raise InputError("--sweep-param is required")
    if cfg.sweep_param not in SWEEP_PARAMS:
        raise InputError(f"--sweep-param must be one of {', '.join(SWEEP_PARAMS)}")
    if cfg.sweep_from is None or cfg.sweep_to is None or cfg.sweep_steps is None:
        raise InputError("--sweep-from, --sweep-to and --sweep-steps are required")
    if cfg.sweep_steps <= 0:
        raise InputError("--sweep-steps must be positive")
    attr = "lam" if cfg.sweep_param == "lambda" else cfg.sweep_param
    values = np.linspace(cfg.sweep_from, cfg.sweep_to, cfg.sweep_steps)
    rows = []
    for value in values:
        point = replace(cfg, **{attr: float(value)})
        spec = _scenario(point, need_lambda=attr != "lam")
        result = spectra.spectrum(spec, cfg.n_max)
        for level in result.levels:
            for sign, E in ((1, level.E_plus), (-1, level.E_minus)):
                rows.append((cfg.sweep_param, float(value), level.n, sign, E, level.omega_used, spec.mode, spec.kind))
    _emit(_csv_text(SWEEP_COLUMNS, rows), cfg.out)
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config", None)
    try:
        file_values = load_config_file(config_path) if config_path else {}
        cfg = build_config(file_values, args)
        return COMMANDS[command](cfg)
    except (InputError, DomainError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as err:
        print(f"convergence failure: {err}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
