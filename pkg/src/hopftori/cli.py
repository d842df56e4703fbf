"""Command-line pipeline: profiles, closed curves, Hopf and evolution tori, checks.

Usage::

    python3 -m hopftori SUBCOMMAND [--config FILE] [--key value ...]

Every configuration key can come from a plain ``key = value`` file (``#``
starts a comment) or from the flag ``--key value``; flags win.  The output
directory is ``out`` from the file, then ``$HOPFTORI_OUT``, then ``--out``.

Exit status: 0 when every tolerance gate passes, 1 when one fails (the
report lists it), 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .curves import closure_search, curve_stats, profile_for, progression_angle, reconstruct
from .energy import EnergyKind, EnergySpec
from .errors import ConfigError, DomainError, HopfToriError, ParameterError
from .evolution import (
    derived_constant,
    embed_and_fit,
    evolution_report,
    evolve,
    recover_energy,
    surface_curvatures,
    weingarten_residual,
)
from .hopf import horizontal_lift, hopf_torus, phase_matrix, verify_vertical_geometry
from .meshio import TorusMesh, export
from .profiles import el_residual, first_integral_check
from .report import Report

log = logging.getLogger("hopftori")

ENV_OUT = "HOPFTORI_OUT"

DEFAULT_TOLS = {
    "el": 1e-6,
    "first_integral": 1e-8,
    "closure": 1e-6,
    "angle": 1e-7,
    "H": 1e-4,
    "K": 1e-4,
    "metric": 1e-6,
    "weingarten": 1e-6,
    "constant": 1e-5,
    "recover": 1e-3,
}

# key -> (parser, help)
KEYS = {
    "energy": (str, "catalog member: " + ", ".join(k.value for k in EnergyKind)),
    "lambda": (float, "energy parameter lambda"),
    "q": (float, "exponent of the q-elastic energy"),
    "epsilon": (int, "sign of the total-curvature energy (+1 or -1)"),
    "rho": (float, "curvature of the ambient sphere (0 for flat space)"),
    "d": (float, "first integral; excludes m and n"),
    "m": (int, "number of curvature periods of the closed curve"),
    "n": (int, "number of turns around the rotation axis"),
    "periods": (int, "curvature periods swept when d is given"),
    "kappa_hint": (float, "curvature inside the wanted potential well"),
    "n_samples": (int, "profile samples per period (power of two)"),
    "n_t": (int, "samples along the torus circles (power of two)"),
    "out": (str, "output directory"),
    "write": (int, "write artifacts (1) or only print the report (0)"),
    "export_rows": (int, "largest number of mesh rows written to OBJ (power of two)"),
    "export_cols": (int, "largest number of mesh columns written to OBJ (power of two)"),
    "checks": (str, "comma-separated subset of acceptance checks for verify"),
}


@dataclass
class PipelineConfig:
    """Validated run configuration; see ``KEYS`` for the meaning of each field."""

    energy: EnergySpec | None = None
    rho: float = 4.0
    d: float | None = None
    m: int | None = None
    n: int | None = None
    periods: int = 1
    kappa_hint: float | None = None
    n_samples: int = 2048
    n_t: int = 256
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLS))
    out: Path = Path("hopftori_out")
    write: bool = True
    export_rows: int = 1024
    export_cols: int = 64
    checks: list | None = None

    def header(self) -> dict:
        h = {"energy": self.energy.label() if self.energy else "none", "rho": self.rho}
        if self.d is not None:
            h["d"] = self.d
        if self.m is not None:
            h.update(m=self.m, n=self.n)
        h.update({f"tol.{k}": v for k, v in self.tolerances.items()})
        return h


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        k, v = (x.strip() for x in line.split("=", 1))
        values[k] = v
    return values


def _is_pow2(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def build_config(values: dict, need_target: bool = True) -> PipelineConfig:
    """Turn raw string/number values into a :class:`PipelineConfig`."""
    cfg = PipelineConfig()
    tols = dict(DEFAULT_TOLS)
    parsed = {}
    for k, v in values.items():
        if v is None:
            continue
        if k.startswith("tol."):
            name = k[4:]
            try:
                tols[name] = float(v)
            except ValueError as exc:
                raise ConfigError(f"{k}: not a number: {v!r}") from exc
            continue
        if k not in KEYS:
            raise ConfigError(f"unknown key {k!r}")
        try:
            parsed[k] = KEYS[k][0](v)
        except ValueError as exc:
            raise ConfigError(f"{k}: cannot parse {v!r}") from exc
    if any(not t > 0 for t in tols.values()):
        raise ConfigError("all tolerances must be positive")
    cfg.tolerances = tols
    if "energy" in parsed:
        mapping = {"kind": parsed["energy"], "lambda": parsed.get("lambda", 0.0)}
        if "q" in parsed:
            mapping["q"] = parsed["q"]
        if "epsilon" in parsed:
            mapping["epsilon"] = parsed["epsilon"]
        elif parsed["energy"] == EnergyKind.TOTAL_CURVATURE.value:
            mapping["epsilon"] = 1
        try:
            cfg.energy = EnergySpec.from_mapping(mapping)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"energy: {exc}") from exc
    for k in ("rho", "d", "m", "n", "periods", "kappa_hint", "n_samples", "n_t", "export_rows", "export_cols"):
        if k in parsed:
            setattr(cfg, k, parsed[k])
    if "out" in parsed:
        cfg.out = Path(parsed["out"])
    if "write" in parsed:
        cfg.write = bool(parsed["write"])
    if "checks" in parsed:
        cfg.checks = [c.strip() for c in parsed["checks"].split(",") if c.strip()]
    for k in ("n_samples", "n_t", "export_rows", "export_cols"):
        if not _is_pow2(getattr(cfg, k)):
            raise ConfigError(f"{k} must be a power of two")
    if need_target:
        if cfg.energy is None:
            raise ConfigError("energy is required")
        has_d = cfg.d is not None
        has_mn = cfg.m is not None or cfg.n is not None
        if has_d == has_mn:
            raise ConfigError("give exactly one of d or (m, n)")
        if has_mn and (cfg.m is None or cfg.n is None):
            raise ConfigError("m and n must be given together")
    return cfg


# ---------------------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------------------


def _write(cfg, artifact, fmt, name, header=None):
    if cfg.write:
        export(artifact, fmt, cfg.out / name, header)


def _stride(n, limit):
    k = 1
    while n // k > limit and n % (2 * k) == 0:
        k *= 2
    return k


def _decimated(cfg, mesh: TorusMesh, covers=None) -> TorusMesh:
    """Strided copy of ``mesh`` for export; ``covers=(m, phase)`` repeats it around the fibres."""
    a = _stride(mesh.shape[0], cfg.export_rows)
    b = _stride(mesh.shape[1], cfg.export_cols)
    v = mesh.vertices[::a, ::b]
    seam = mesh.seam
    s_length = mesh.s_length
    if covers is not None:
        m, phase = covers
        v = np.concatenate([v @ phase_matrix(c * phase).T for c in range(m)])
        seam, s_length = None, m * s_length
    return TorusMesh(v, s_length, mesh.t_length, mesh.radius, seam, mesh.s_closed)


def _field_columns(cfg, mesh, **fields):
    """Per-vertex fields on the same strided grid as the exported OBJ."""
    a = _stride(mesh.shape[0], cfg.export_rows)
    b = _stride(mesh.shape[1], cfg.export_cols)
    s, t = mesh.s[::a], mesh.t[::b]
    cols = {"s": np.repeat(s, t.size), "t": np.tile(t, s.size)}
    cols.update({k: v[::a, ::b].ravel() for k, v in fields.items()})
    return cols


def _profile(cfg):
    return profile_for(cfg.energy, cfg.rho, cfg.d, cfg.n_samples, kappa_hint=cfg.kappa_hint)


def _curve(cfg):
    """Closed or open curve for the configured target, plus its profile."""
    if cfg.m is not None:
        d_star, curve = closure_search(cfg.energy, cfg.rho, cfg.m, cfg.n, n_samples=cfg.n_samples)
        return d_star, curve
    prof = _profile(cfg)
    return cfg.d, reconstruct(prof, cfg.rho, cfg.periods)


def cmd_profile(cfg: PipelineConfig) -> list[Report]:
    if cfg.d is None:
        raise ConfigError("profile needs d")
    prof = _profile(cfg)
    d_est, dev = first_integral_check(prof)
    rep = Report("profile")
    rep.meta.update(energy=cfg.energy.label(), rho=cfg.rho, d=cfg.d, d_est=d_est, period=prof.period,
                    kappa_min=prof.kappa_range[0], kappa_max=prof.kappa_range[1], closed_form=prof.closed_form)
    rep.add("el_residual", el_residual(prof), cfg.tolerances["el"], "P'_ss + P'(kappa^2 + rho) - kappa P = 0")
    rep.add("first_integral_deviation", dev, cfg.tolerances["first_integral"],
            "P'_s^2 + (kappa P' - P)^2 + rho P'^2 = d")
    _write(cfg, prof, "columns", "profile.txt")
    _write(cfg, rep, "report", "profile_report.txt")
    return [rep]


def cmd_close(cfg: PipelineConfig) -> list[Report]:
    return [_close(cfg)[0]]


def _close(cfg):
    if cfg.m is None:
        raise ConfigError("close needs m and n")
    d_star, curve = closure_search(cfg.energy, cfg.rho, cfg.m, cfg.n, n_samples=cfg.n_samples)
    angle, _ = progression_angle(curve.profile)
    rep = Report("closed curve")
    rep.meta.update(energy=cfg.energy.label(), rho=cfg.rho, m=cfg.m, n=cfg.n, d_star=float(d_star),
                    length=curve.total_length)
    rep.add("abs_progression_angle_error", abs(angle - 2 * math.pi * cfg.n / cfg.m), cfg.tolerances["angle"],
            "Lambda = 2 pi n / m")
    rep.add("closure_gap", curve.closure_gap, cfg.tolerances["closure"], "gamma(m L) = gamma(0)")
    if curve.closure_gap <= cfg.tolerances["closure"]:
        st = curve_stats(curve, cfg.energy)
        rep.meta.update(energy_value=st.energy, area=st.area, area_over_pi=str(st.area_over_pi))
    _write(cfg, curve, "columns", "curve.txt")
    _write(cfg, curve, "obj", "curve.obj")
    _write(cfg, rep, "report", "close_report.txt")
    return rep, curve


def _lift_reports(cfg, curve, name="hopf_torus"):
    lift = horizontal_lift(curve)
    mesh = hopf_torus(lift, m_covers=1, n_t=cfg.n_t)
    rep, H, K = verify_vertical_geometry(mesh, profile=curve.profile, accuracy=4,
                                         tol_H=cfg.tolerances["H"], tol_K=cfg.tolerances["K"])
    rep.meta.update(holonomy=lift.holonomy_per_cover, m_cover=str(lift.m_cover), horizontality=lift.horizontality())
    # the exported mesh closes in s after m_cover traverses
    covers = None if lift.m_cover is None else (lift.m_cover, lift.holonomy_per_cover)
    _write(cfg, _decimated(cfg, mesh, covers), "obj", f"{name}.obj", cfg.header())
    cols = _field_columns(cfg, mesh, H=H, K=K)
    _write(cfg, cols, "columns", f"{name}_fields.txt", cfg.header())
    _write(cfg, rep, "report", f"{name}_report.txt")
    return rep


def cmd_lift(cfg: PipelineConfig) -> list[Report]:
    _, curve = _curve(cfg)
    gate = Report("lift input")
    gate.add("closure_gap", curve.closure_gap, cfg.tolerances["closure"], "base curve is closed")
    if not gate.passed:
        return [gate]
    return [_lift_reports(cfg, curve)]


def _evolution(cfg, curve, name="evolution_torus"):
    emb, motion = embed_and_fit(curve)
    mesh = evolve(emb, motion, curve, cfg.n_t)
    sc = surface_curvatures(mesh, accuracy=4, tol=cfg.tolerances["H"])
    rep = evolution_report(mesh, tol_metric=cfg.tolerances["metric"])
    rep.extend(sc.report)
    prof = curve.profile
    rep.add("weingarten_residual", weingarten_residual(prof), cfg.tolerances["weingarten"], "kappa1 = kappa2 - P/P'")
    vals, expected, label = derived_constant(prof.spec, prof.rho, sc.kappa1, sc.kappa2)
    with np.errstate(invalid="ignore"):
        dev = np.abs(vals - expected)
    rep.add("max_derived_constant_deviation", np.max(dev[np.isfinite(dev)]), cfg.tolerances["constant"], label)
    rep.meta["max_abs_H"] = float(np.max(np.abs(sc.H)))
    _write(cfg, _decimated(cfg, mesh), "obj", f"{name}.obj", cfg.header())
    cols = _field_columns(cfg, mesh, kappa1=sc.kappa1, kappa2=sc.kappa2, H=sc.H, K=sc.K)
    _write(cfg, cols, "columns", f"{name}_fields.txt", cfg.header())
    _write(cfg, rep, "report", f"{name}_report.txt")
    return mesh, rep


def cmd_evolve(cfg: PipelineConfig) -> list[Report]:
    _, curve = _curve(cfg)
    return [_evolution(cfg, curve)[1]]


def cmd_recover(cfg: PipelineConfig) -> list[Report]:
    _, curve = _curve(cfg)
    emb, motion = embed_and_fit(curve)
    mesh = evolve(emb, motion, curve, cfg.n_t)
    rec = recover_energy(mesh, tol=cfg.tolerances["recover"])
    rep = Report("energy recovery")
    rep.meta.update(source=cfg.energy.label(), recovered=rec.spec.label() if rec.spec else "none",
                    lambda_shift=rec.lambda_shift, codazzi_constant=rec.mu)
    for k, v in sorted(rec.scores.items()):
        rep.meta[f"score.{k}"] = v
    rep.add("relative_error", rec.rel_error, cfg.tolerances["recover"], "P recovered up to scale")
    same = rec.spec is not None and rec.spec.kind is cfg.energy.kind
    rep.add("misclassified", 0.0 if same else 1.0, 0.0, "catalog classification")
    _write(cfg, {"kappa": rec.kappa, "P": rec.P, "dP": rec.dP}, "columns", "recovered_energy.txt", cfg.header())
    _write(cfg, rep, "report", "recover_report.txt")
    return [rep]


def cmd_verify(cfg: PipelineConfig) -> list[Report]:
    from .verify import CHECKS

    names = cfg.checks or list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks: {', '.join(unknown)}")
    reports = [CHECKS[n]() for n in names]
    if cfg.write:
        text = "".join(r.to_text() + "\n" for r in reports)
        path = cfg.out / "verify_report.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return reports


def cmd_figure1(cfg: PipelineConfig) -> list[Report]:
    cfg.energy = EnergySpec.extended_blaschke(0.0)
    cfg.rho, cfg.m, cfg.n, cfg.d = 4.0, 3, 2, None
    rep, curve = _close(cfg)
    reports = [rep]
    reports.append(_evolution(cfg, curve, "minimal_torus")[1])
    reports.append(_lift_reports(cfg, curve, "hopf_torus"))
    return reports


COMMANDS = {
    "profile": (cmd_profile, True, "build a critical curvature profile"),
    "close": (cmd_close, True, "search the first integral giving a closed (m, n) curve"),
    "lift": (cmd_lift, True, "Hopf lift and vertical torus over a closed curve"),
    "evolve": (cmd_evolve, True, "binormal evolution torus and its curvature checks"),
    "recover": (cmd_recover, True, "recover the energy from an evolution torus"),
    "verify": (cmd_verify, False, "run the acceptance checks"),
    "figure1": (cmd_figure1, False, "closed (3, 2) curve, minimal torus and Hopf torus"),
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hopftori", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, _, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="key = value configuration file")
        for key, (_, khelp) in KEYS.items():
            p.add_argument(f"--{key}", dest=key, help=khelp)
        p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                       help="tolerance override, e.g. --tol H=1e-5")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    func, need_target, _ = COMMANDS[args.command]
    try:
        values = read_config_file(args.config) if args.config else {}
        if os.environ.get(ENV_OUT):
            values["out"] = os.environ[ENV_OUT]
        for key in KEYS:
            v = getattr(args, key)
            if v is not None:
                values[key] = v
        for item in args.tol:
            if "=" not in item:
                raise ConfigError(f"--tol expects NAME=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            values[f"tol.{k.strip()}"] = v.strip()
        cfg = build_config(values, need_target=need_target)
        reports = func(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ParameterError, DomainError) as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except HopfToriError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for r in reports:
        sys.stdout.write(r.to_text())
    failed = [c.name for r in reports for c in r.failures()]
    if failed:
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
