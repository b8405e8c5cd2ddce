"""Command-line entry point: ``python -m o2hopf <subcommand> [flags]``.

Exit status 0 on success, 1 on validation failure (bad configuration,
inadmissible parameters, failed checks), 2 on numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import experiments as ex
from . import normal_form as nfm
from .center import synthesize
from .galerkin import NumericalInstabilityError, SimConfig, solver_for
from .pressure_law import DomainError, parse_law
from .spectral import Rejection, SingularityError, check_admissible, spectrum_report

COMMANDS = ("spectrum", "admissible", "coeffs", "reduced-flow", "simulate", "sweep", "validate")
DEFAULT_THETAS = (0.003, 0.006, 0.012, 0.024)


class ConfigError(ValueError):
    def __init__(self, field_name: str, msg: str):
        super().__init__(f"{field_name}: {msg}")
        self.field = field_name


class NumericalFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str = "coeffs"
    law: Any = (0.0, 1.0, 1.0)
    k0: int = 1
    a_c: float = 0.0
    mu1: float = 0.0
    mu2: float = 0.0
    modes: int = 64
    dt: Optional[float] = None
    T: Optional[float] = None
    out: str = "."
    jobs: int = 1
    seed: int = 0
    K: Optional[int] = None
    thetas: tuple = DEFAULT_THETAS
    a0: float = 0.05
    full: bool = False

    def __post_init__(self):
        validate_config(self)

    @property
    def law_obj(self):
        return parse_law(_law_value(self.law))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["law"] = _law_value(self.law)
        d["thetas"] = list(self.thetas)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _law_value(v):
    if isinstance(v, (list, tuple)):
        return [float(x) for x in v]
    return v


def _finite(name, v, positive=False, allow_none=False):
    if v is None:
        if allow_none:
            return
        raise ConfigError(name, "is required")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(name, f"must be a number, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(name, "must be finite")
    if positive and not v > 0:
        raise ConfigError(name, "must be positive")


def validate_config(c: RunConfig) -> None:
    if c.command not in COMMANDS:
        raise ConfigError("command", f"must be one of {', '.join(COMMANDS)}")
    if isinstance(c.k0, bool) or not isinstance(c.k0, int):
        raise ConfigError("k0", "must be an integer")
    if c.k0 == 0:
        raise ConfigError("k0", "k0 must be nonzero")
    for name in ("a_c", "mu1", "mu2"):
        _finite(name, getattr(c, name))
    _finite("dt", c.dt, positive=True, allow_none=True)
    _finite("T", c.T, positive=True, allow_none=True)
    _finite("a0", c.a0, positive=True)
    if c.a0 > 0.05:
        raise ConfigError("a0", "must not exceed 0.05")
    for name in ("modes", "jobs", "seed"):
        v = getattr(c, name)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(name, "must be an integer")
    if c.modes < 4 * abs(c.k0):
        raise ConfigError("modes", "must be at least 4|k0|")
    if c.jobs < 1:
        raise ConfigError("jobs", "must be >= 1")
    if c.K is not None and (isinstance(c.K, bool) or not isinstance(c.K, int) or c.K < 4 * abs(c.k0)):
        raise ConfigError("K", "must be an integer >= 4|k0|")
    if not c.thetas:
        raise ConfigError("thetas", "must be non-empty")
    for t in c.thetas:
        _finite("thetas", t)
    try:
        law = parse_law(_law_value(c.law))
    except (ValueError, TypeError) as e:
        raise ConfigError("law", str(e)) from None
    if not all(math.isfinite(x) for x in law.jet):
        raise ConfigError("law", "jet must be finite")
    if not isinstance(c.full, bool):
        raise ConfigError("full", "must be a boolean")


FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def config_from_dict(d: dict) -> RunConfig:
    unknown = sorted(set(d) - FIELDS)
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    d = dict(d)
    if "law" in d and isinstance(d["law"], list):
        d["law"] = tuple(d["law"])
    if "thetas" in d:
        if not isinstance(d["thetas"], (list, tuple)):
            raise ConfigError("thetas", "must be a list")
        d["thetas"] = tuple(d["thetas"])
    return RunConfig(**d)


def load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e.strerror}") from None
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("config", f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(d, dict):
        raise ConfigError("config", "top level must be a JSON object")
    return d


def parse_config(argv=None) -> RunConfig:
    """Build a RunConfig from an optional JSON file plus flags; flags win."""
    p = build_parser()
    ns = p.parse_args(argv)
    d = load_config_file(ns.config) if ns.config else {}
    d["command"] = ns.command
    flag_map = {
        "k0": ns.k0, "a_c": ns.a_c, "mu1": ns.mu1, "mu2": ns.mu2, "law": ns.law, "modes": ns.modes,
        "dt": ns.dt, "T": ns.T, "out": ns.out, "jobs": ns.jobs, "seed": ns.seed, "K": ns.K, "a0": ns.a0,
    }
    for k, v in flag_map.items():
        if v is not None:
            d[k] = v
    if ns.thetas is not None:
        d["thetas"] = [float(x) for x in ns.thetas.split(",") if x.strip()]
    if ns.full:
        d["full"] = True
    return config_from_dict(d)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError("flags", message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="o2hopf", description="O(2) Hopf bifurcation toolkit for the viscous p-system")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config")
    p.add_argument("--k0", type=int)
    p.add_argument("--a-c", dest="a_c", type=float)
    p.add_argument("--mu1", type=float)
    p.add_argument("--mu2", type=float)
    p.add_argument("--law", help='e.g. "poly:0,1,1" or "yao:1"')
    p.add_argument("--modes", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--K", type=int, help="admissibility scan limit")
    p.add_argument("--thetas", help="comma-separated theta values for sweep")
    p.add_argument("--a0", type=float, help="initial amplitude for reduced-flow")
    p.add_argument("--full", action="store_true", help="validate: include the DNS checks")
    return p


# ------------------------------------------------------------ commands
def _write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, allow_nan=True)
        fh.write("\n")


def _critical(c: RunConfig):
    law = c.law_obj
    res = check_admissible(c.k0, c.a_c, law.sp1, c.K)
    if isinstance(res, Rejection):
        raise _Rejected(res)
    return res, law


class _Rejected(Exception):
    def __init__(self, rej: Rejection):
        super().__init__(rej.clause)
        self.rej = rej


def cmd_spectrum(c: RunConfig) -> dict:
    cfg, _ = _critical(c)
    rep = spectrum_report(cfg, c.K or c.modes)
    _write_json(os.path.join(c.out, "spectrum.json"), rep.to_json())
    return {"gap": rep.gap}


def cmd_admissible(c: RunConfig) -> dict:
    cfg, _ = _critical(c)
    return cfg.to_json()


def cmd_coeffs(c: RunConfig) -> dict:
    cfg, law = _critical(c)
    nf = nfm.build_normal_form(cfg, law)
    out = nf.to_json()
    _write_json(os.path.join(c.out, "coeffs.json"), out)
    return out


def cmd_reduced_flow(c: RunConfig) -> dict:
    cfg, law = _critical(c)
    nf = nfm.build_normal_form(cfg, law)
    T = c.T or 20.0 / cfg.omega_c
    n = max(2, int(round(T / (c.dt or 2 * math.pi / cfg.omega_c / 64)))) + 1
    times = np.linspace(0.0, T, n)
    z = ex.reduced_track(nf, c.mu1, c.mu2, (complex(c.a0), complex(c.a0)), times)
    with open(os.path.join(c.out, "center.csv"), "w") as fh:
        fh.write("t,re_z1,im_z1,re_z2,im_z2\n")
        for t, (z1, z2) in zip(times, z):
            fh.write("%.17g,%.17g,%.17g,%.17g,%.17g\n" % (t, z1.real, z1.imag, z2.real, z2.imag))
    try:
        waves = [w.to_json() for w in nfm.predict_waves(nf, c.mu1, c.mu2)]
    except nfm.DegenerateParameterError as e:
        waves = {"degenerate": str(e)}
    out = {"theta": nf.theta(c.mu1, c.mu2), "waves": waves}
    _write_json(os.path.join(c.out, "reduced_flow.json"), out)
    return out


def cmd_simulate(c: RunConfig) -> dict:
    cfg, law = _critical(c)
    nf = nfm.build_normal_form(cfg, law)
    period = 2 * math.pi / cfg.omega_c
    dt = c.dt or 1e-3 * period
    T = c.T or 10 * period
    stride = max(1, int(period / dt) // 64)
    sc = SimConfig(N=c.modes, dt=dt, T=T, a=cfg.a_c + c.mu1, delta=cfg.delta_c + c.mu2, law=law,
                   record_stride=stride)
    std = None
    try:
        std = ex.predicted(nf, c.mu1, c.mu2, "standing")
    except ValueError:
        # no prediction (degenerate or large mu): start from amplitude a0
        pass
    r0 = std.amplitude if std is not None else c.a0
    U0 = ex.initial_state(nf, r0, r0, c.modes, 0.1, c.seed)
    tr = solver_for(sc).run(U0, nf.basis)
    tr.write_csv(os.path.join(c.out, "trajectory.csv"))
    tr.write_center_csv(os.path.join(c.out, "center.csv"))
    d = ex.classify_trajectory(tr)
    return {"seed": c.seed, "family": d.family_guess, "r1": d.r1_mean, "r2": d.r2_mean, "omega": d.omega_fit}


def cmd_sweep(c: RunConfig) -> dict:
    k2 = c.k0 * c.k0
    pts = [(c.mu1, th + c.mu1 * k2) for th in c.thetas]
    st = ex.DNSSettings(N=c.modes)
    res = ex.amplitude_scaling_sweep(pts, c.k0, c.a_c, tuple(c.law_obj.coeffs or ()), st, c.jobs, c.seed)
    res.write_csv(os.path.join(c.out, "sweep.csv"))
    out = {"seed": c.seed, "slope": res.slope() if len(res.rows) > 1 and all(r.amplitude > 0 for r in res.rows) else None,
           "converged": all(r.converged for r in res.rows)}
    if not out["converged"]:
        raise NumericalFailure("sweep point(s) did not reach a plateau")
    return out


def cmd_validate(c: RunConfig) -> dict:
    from .validation import run_validation

    report = run_validation(c.k0, c.a_c, c.law_obj, full=c.full, seed=c.seed)
    _write_json(os.path.join(c.out, "validate.json"), report)
    if not all(ch["pass"] for ch in report["checks"]):
        raise _ChecksFailed(report)
    return {"checks": len(report["checks"]), "all_pass": True}


class _ChecksFailed(Exception):
    def __init__(self, report):
        super().__init__("validation checks failed")
        self.report = report


DISPATCH = {
    "spectrum": cmd_spectrum,
    "admissible": cmd_admissible,
    "coeffs": cmd_coeffs,
    "reduced-flow": cmd_reduced_flow,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def _err(kind: str, msg: str, **extra) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": msg, **extra}) + "\n")


def run(c: RunConfig) -> int:
    if c.command not in ("admissible",):
        os.makedirs(c.out, exist_ok=True)
    try:
        result = DISPATCH[c.command](c)
    except _Rejected as e:
        _err("rejected", e.rej.clause, **e.rej.to_json())
        return 1
    except _ChecksFailed as e:
        failed = [ch["name"] for ch in e.report["checks"] if not ch["pass"]]
        _err("validation_failed", "some checks failed", failed=failed)
        return 1
    except (NumericalInstabilityError, DomainError, nfm.SingularSolveError, SingularityError, NumericalFailure,
            ArithmeticError) as e:
        _err("numerical", str(e), type=type(e).__name__)
        return 2
    except (nfm.DegenerateParameterError, ValueError) as e:
        _err("validation", str(e))
        return 1
    sys.stdout.write(json.dumps(result) + "\n")
    return 0


def main(argv=None) -> int:
    try:
        c = parse_config(argv)
    except ConfigError as e:
        _err("config", str(e), field=e.field)
        return 1
    return run(c)


if __name__ == "__main__":
    sys.exit(main())
