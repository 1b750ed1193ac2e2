"""Experiment runner: presets for the published figure regimes, config files, CSV output.

Subcommands: ``simulate`` (single-orbit averages at checkpoints), ``ensemble``
(A_n samples over independent orbits), ``arcsine`` (occupation-law report),
``levywalk`` (walk-tower trajectory or ensemble), ``luroth`` (digit and
renewal reports), ``verify`` (the acceptance battery; exit 0 iff all pass).

Every CSV is self-describing: '#'-prefixed header comments echo the full
configuration, seed, and generator algorithm, so identical config + seed +
version reproduce byte-identical files.  Exit codes: 0 success, 1 invalid
configuration, 2 runtime abort (singular orbit).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__, checks
from .birkhoff import CheckpointSchedule, OrbitAbort, ensemble_averages, run_orbit
from .luroth import digits as luroth_digits
from .luroth import gamma_tail_ratio, lemma_error_statistic, sample_digits, sum_level_masses
from .maps import AlphaFareyLine, BooleLine, FareyLine, FareyUnit, AlphaFareyUnit, OrbitPoint
from .observables import CosWave, HalfLineIndicator, LevelStepPeriodic, Wave
from .sequences import PartitionSequence
from .stats import UniformIntervalSampler, occupation_experiment
from .tower import LevyTower, RadialLevyTower, levy_ensemble_averages, levy_trajectory

RNG_NOTE = "PCG64 (numpy default_rng; per-orbit streams spawned from the master seed)"

_MAP_KINDS = {"boole", "farey_unit", "farey_line", "alpha_farey_unit", "alpha_farey_line"}
_OBS_KINDS = {"wave", "cos_wave", "level_step_periodic", "half_line_indicator"}
_SCALE_MODES = {"absolute", "milli"}


class ConfigError(ValueError):
    """Invalid or unknown configuration input."""


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one simulate/ensemble run."""

    map_kind: str
    beta: Optional[float] = None
    obs_kind: str = "cos_wave"
    omega: Optional[float] = 0.2
    coefficients: Tuple[complex, ...] = ()
    cutoff: float = 0.0
    x0: float = 0.65
    n_max: int = 10**7
    window_lo: float = 0.9
    window_hi: float = 1.0
    checkpoints: int = 2000
    seed: int = 0
    scale_mode: str = "absolute"
    ensemble: int = 1
    sampler: str = "uniform:-1,1"
    preset: Optional[str] = None

    def __post_init__(self):
        if self.map_kind not in _MAP_KINDS:
            raise ConfigError(f"unknown map kind {self.map_kind!r}")
        if self.map_kind.startswith("alpha"):
            if self.beta is None or not (0.0 < self.beta <= 1.0):
                raise ConfigError("alpha map kinds need beta in (0, 1]")
        if self.obs_kind not in _OBS_KINDS:
            raise ConfigError(f"unknown observable kind {self.obs_kind!r}")
        if self.obs_kind in ("wave", "cos_wave") and not self.omega:
            raise ConfigError("wave observables need a nonzero omega")
        if self.obs_kind == "level_step_periodic" and not self.coefficients:
            raise ConfigError("level_step_periodic needs coefficients")
        if self.n_max < 1:
            raise ConfigError("n_max must be >= 1")
        if not (0.0 <= self.window_lo < self.window_hi <= 1.0):
            raise ConfigError("window fractions must satisfy 0 <= lo < hi <= 1")
        if self.checkpoints < 1:
            raise ConfigError("checkpoints must be >= 1")
        if self.scale_mode not in _SCALE_MODES:
            raise ConfigError(f"scale_mode must be one of {sorted(_SCALE_MODES)}")
        if self.ensemble < 1:
            raise ConfigError("ensemble must be >= 1")

    # -- construction of the runnable pieces ---------------------------

    def build_system(self):
        seq = PartitionSequence(self.beta) if self.beta is not None else None
        return {
            "boole": lambda: BooleLine(),
            "farey_unit": lambda: FareyUnit(),
            "farey_line": lambda: FareyLine(),
            "alpha_farey_unit": lambda: AlphaFareyUnit(seq),
            "alpha_farey_line": lambda: AlphaFareyLine(seq),
        }[self.map_kind]()

    def build_observable(self):
        if self.obs_kind == "wave":
            return Wave(self.omega)
        if self.obs_kind == "cos_wave":
            return CosWave(self.omega)
        if self.obs_kind == "level_step_periodic":
            return LevelStepPeriodic(self.coefficients)
        return HalfLineIndicator(self.cutoff)

    def build_schedule(self) -> CheckpointSchedule:
        return CheckpointSchedule.figure_window(
            self.n_max, self.window_lo, self.window_hi, self.checkpoints
        )

    def start_point(self, system):
        if isinstance(system, AlphaFareyLine):
            return system.point_from_real(self.x0)
        return self.x0

    def metadata(self) -> List[Tuple[str, str]]:
        items: List[Tuple[str, str]] = [("globalobs", __version__)]
        if self.preset:
            items.append(("preset", self.preset))
        items += [
            ("map.kind", self.map_kind),
            ("observable.kind", self.obs_kind),
        ]
        if self.beta is not None:
            items.insert(3, ("map.beta", repr(self.beta)))
        if self.obs_kind in ("wave", "cos_wave"):
            items.append(("observable.omega", repr(self.omega)))
        if self.coefficients:
            items.append(
                ("observable.coefficients", ",".join(str(c) for c in self.coefficients))
            )
        if self.obs_kind == "half_line_indicator":
            items.append(("observable.cutoff", repr(self.cutoff)))
        items += [
            ("run.x0", repr(self.x0)),
            ("run.n_max", str(self.n_max)),
            ("run.window", f"{self.window_lo},{self.window_hi}"),
            ("run.checkpoints", str(self.checkpoints)),
            ("run.seed", str(self.seed)),
            ("run.ensemble", str(self.ensemble)),
            ("run.sampler", self.sampler),
            ("run.scale_mode", self.scale_mode),
            ("rng", RNG_NOTE),
        ]
        return items


# Desk-scale presets default to n_max = 1e7; --full-scale restores the
# published windows (5e7 for the small-beta figures, 1e8 for the others).
PRESETS: Dict[str, Tuple[RunConfig, int]] = {}


def _preset(name: str, cfg: RunConfig, full_n: int) -> None:
    PRESETS[name] = (replace(cfg, preset=name), full_n)


for _b, _name in ((0.35, "beta_35"), (0.48, "beta_48"), (0.5, "beta_50"),
                  (0.52, "beta_52"), (0.65, "beta_65")):
    _preset(
        _name,
        RunConfig(map_kind="alpha_farey_line", beta=_b, obs_kind="cos_wave", omega=0.2,
                  x0=0.65, n_max=10**7, window_lo=0.9, window_hi=1.0, seed=7,
                  scale_mode="milli"),
        5 * 10**7,
    )
_preset(
    "beta_98",
    RunConfig(map_kind="alpha_farey_line", beta=0.98, obs_kind="cos_wave", omega=0.2,
              x0=0.65, n_max=10**7, window_lo=0.2, window_hi=1.0, seed=7,
              scale_mode="absolute"),
    10**8,
)
_preset(
    "farey",
    RunConfig(map_kind="farey_line", obs_kind="cos_wave", omega=0.2, x0=0.65,
              n_max=10**7, window_lo=0.2, window_hi=1.0, seed=7,
              scale_mode="absolute"),
    10**8,
)


# ----------------------------------------------------------------------
# config files: '[section]' plus 'key = value' lines, unknown keys rejected

_CONFIG_SCHEMA = {
    "map": {"kind", "beta"},
    "observable": {"kind", "omega", "coefficients", "cutoff"},
    "run": {
        "x0", "n_max", "window_lo", "window_hi", "checkpoints", "seed",
        "scale_mode", "ensemble", "sampler",
    },
}


def parse_config_text(text: str) -> Dict[str, Dict[str, str]]:
    sections: Dict[str, Dict[str, str]] = {}
    current: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in _CONFIG_SCHEMA:
                raise ConfigError(f"line {lineno}: unknown section [{current}]")
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: key outside any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_SCHEMA[current]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in [{current}]")
        if key in sections[current]:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        sections[current][key] = value.strip().strip('"')
    return sections


def _parse_coefficients(text: str) -> Tuple[complex, ...]:
    try:
        return tuple(complex(tok.strip()) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"bad coefficient list {text!r}: {exc}") from None


def config_from_file(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            sections = parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    m = sections.get("map", {})
    o = sections.get("observable", {})
    r = sections.get("run", {})
    if "kind" not in m:
        raise ConfigError("config needs [map] kind")
    try:
        return RunConfig(
            map_kind=m["kind"],
            beta=float(m["beta"]) if "beta" in m else None,
            obs_kind=o.get("kind", "cos_wave"),
            omega=float(o["omega"]) if "omega" in o else 0.2,
            coefficients=_parse_coefficients(o.get("coefficients", "")),
            cutoff=float(o.get("cutoff", 0.0)),
            x0=float(r.get("x0", 0.65)),
            n_max=int(float(r.get("n_max", 10**7))),
            window_lo=float(r.get("window_lo", 0.9)),
            window_hi=float(r.get("window_hi", 1.0)),
            checkpoints=int(r.get("checkpoints", 2000)),
            seed=int(r.get("seed", 0)),
            scale_mode=r.get("scale_mode", "absolute"),
            ensemble=int(r.get("ensemble", 1)),
            sampler=r.get("sampler", "uniform:-1,1"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def _resolve_config(args) -> RunConfig:
    if bool(args.preset) == bool(args.config):
        raise ConfigError("give exactly one of --preset or --config")
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}; have {sorted(PRESETS)}")
        cfg, full_n = PRESETS[args.preset]
        if getattr(args, "full_scale", False):
            cfg = replace(cfg, n_max=full_n)
    else:
        cfg = config_from_file(args.config)
    if args.n_max is not None:
        cfg = replace(cfg, n_max=int(args.n_max))
    if args.seed is not None:
        cfg = replace(cfg, seed=int(args.seed))
    return cfg


# ----------------------------------------------------------------------
# CSV emission


def _write_csv(path, metadata, header, rows, trailer=()):
    lines = [f"# {k} = {v}" for k, v in metadata]
    lines.append(header)
    lines.extend(rows)
    lines.extend(f"# {t}" for t in trailer)
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _format_rows(results, is_real, window_lo_n):
    rows = []
    for n, value in results:
        if n < window_lo_n:
            continue
        if is_real:
            rows.append(f"{n},{value.real!r}")
        else:
            rows.append(f"{n},{value.real!r},{value.imag!r}")
    return rows


# ----------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    system = cfg.build_system()
    obs = cfg.build_observable()
    schedule = cfg.build_schedule()
    start = cfg.start_point(system)
    meta = [("command", "simulate")] + cfg.metadata()
    header = "n,value" if obs.is_real else "n,re,im"
    lo_n = int(cfg.n_max * cfg.window_lo)
    try:
        results = run_orbit(system, obs, start, schedule)
    except OrbitAbort as abort:
        rows = _format_rows(abort.partial, obs.is_real, lo_n)
        _write_csv(args.out, meta, header, rows, (f"aborted_at_step = {abort.step}",))
        print(f"orbit aborted at step {abort.step}: {abort.cause}", file=sys.stderr)
        return 2
    _write_csv(args.out, meta, header, _format_rows(results, obs.is_real, lo_n))
    return 0


def _make_sampler(spec: str, system):
    kind, _, rest = spec.partition(":")
    if kind == "uniform":
        try:
            lo, hi = (float(tok) for tok in rest.split(","))
        except ValueError:
            raise ConfigError(f"bad sampler spec {spec!r}") from None
        return UniformIntervalSampler(lo, hi)
    if kind == "levels":
        try:
            base, span = (int(tok) for tok in rest.split(","))
        except ValueError:
            raise ConfigError(f"bad sampler spec {spec!r}") from None
        if not isinstance(system, AlphaFareyLine):
            raise ConfigError("levels sampler needs the alpha_farey_line map")
        from .birkhoff import level_offset_sampler

        return level_offset_sampler(system.seq, base, span)
    raise ConfigError(f"unknown sampler kind {kind!r}")


def cmd_ensemble(args) -> int:
    cfg = _resolve_config(args)
    system = cfg.build_system()
    obs = cfg.build_observable()
    sampler = _make_sampler(cfg.sampler, system)
    result = ensemble_averages(
        system, obs, sampler, cfg.n_max, cfg.ensemble, cfg.seed, threads=args.threads
    )
    meta = [("command", "ensemble")] + cfg.metadata()
    header = "sample,value" if obs.is_real else "sample,re,im"
    rows = []
    for i, v in enumerate(result.values):
        value = complex(v)
        if np.isnan(value.real):
            continue
        rows.append(
            f"{i},{value.real!r}" if obs.is_real else f"{i},{value.real!r},{value.imag!r}"
        )
    trailer = [f"failed_orbits = {len(result.failures)}"] if result.failures else []
    _write_csv(args.out, meta, header, rows, trailer)
    return 0


def cmd_arcsine(args) -> int:
    report = occupation_experiment(args.ensemble, args.n, args.seed)
    verdict = "PASS" if report.ks < args.tolerance else "FAIL"
    lines = [
        f"occupation-fraction law: KS distance to (2/pi) arcsin sqrt(t) = {report.ks:.5f}",
        f"ensemble = {report.ensemble}, n = {report.n}, seed = {report.seed}, "
        f"resampled poles = {report.resampled}",
        f"initial law: {report.initial_law}",
        f"rng: {RNG_NOTE}",
        f"ks < {args.tolerance}: {verdict}",
    ]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0 if verdict == "PASS" else 2


def cmd_levywalk(args) -> int:
    gammas = _parse_coefficients(args.gammas)
    if args.radial:
        lt = RadialLevyTower(args.beta)
    else:
        lt = LevyTower(args.beta, gammas=gammas)
    meta = [
        ("command", "levywalk"),
        ("globalobs", __version__),
        ("beta", repr(args.beta)),
        ("gammas", "radial" if args.radial else args.gammas),
        ("mode", args.mode),
        ("n_max", str(args.n)),
        ("seed", str(args.seed)),
        ("rng", RNG_NOTE),
        ("zeta_norm", repr(lt.zeta_norm)),
        ("cell_index_cap", "2**62 (deeper cells clamp and are counted as lumped)"),
    ]
    if args.mode == "trajectory":
        rng = np.random.default_rng(args.seed)
        start = (float(rng.random()), float(rng.random()))
        schedule = CheckpointSchedule.geometric(args.n)
        results = levy_trajectory(lt, start, schedule)
        meta.append(("start", f"{start[0]!r},{start[1]!r}"))
        _write_csv(args.out, meta, "n,re,im",
                   [f"{n},{v.real!r},{v.imag!r}" for n, v in results],
                   (f"lumped_cells = {lt.lumped}",) if lt.lumped else ())
        return 0
    values = levy_ensemble_averages(lt, args.ensemble, args.n, args.seed)
    meta.append(("ensemble", str(args.ensemble)))
    _write_csv(args.out, meta, "sample,re,im",
               [f"{i},{complex(v).real!r},{complex(v).imag!r}" for i, v in enumerate(values)],
               (f"lumped_cells = {lt.lumped}",) if lt.lumped else ())
    return 0


def cmd_luroth(args) -> int:
    seq = PartitionSequence(args.beta)
    if args.mode == "renewal":
        u = sum_level_masses(args.k_max, seq)
        meta = [
            ("command", "luroth renewal"),
            ("globalobs", __version__),
            ("beta", repr(args.beta)),
            ("k_max", str(args.k_max)),
            ("gamma_tail_ratio_at_k_max", repr(gamma_tail_ratio(args.k_max, seq, float(u[-1])))),
        ]
        _write_csv(args.out, meta, "k,value", [f"{k},{float(v)!r}" for k, v in enumerate(u)])
        return 0
    if args.mode == "digits":
        if args.x is None:
            raise ConfigError("digits mode needs --x")
        seq_digits = luroth_digits(args.x, seq, args.count)
        print(f"digits({args.x!r}, beta={args.beta}) = {seq_digits}")
        return 0
    # statistic mode
    below = 0
    worst = 0.0
    for s in range(args.streams):
        d = sample_digits(seq, np.random.default_rng(args.seed + s), args.count)
        stat = lemma_error_statistic(d, args.count, max(2, args.count // 10), args.beta)
        worst = max(worst, stat)
        below += stat < args.tolerance
    print(
        f"digit-tail statistic: {below}/{args.streams} streams below "
        f"{args.tolerance} (worst {worst:.3e}; {args.count} digits each, "
        f"window starts at {max(2, args.count // 10)})"
    )
    return 0


def cmd_verify(args) -> int:
    indices = None
    if args.criteria:
        try:
            indices = [int(tok) for tok in args.criteria.split(",") if tok.strip()]
        except ValueError:
            raise ConfigError(f"bad criteria list {args.criteria!r}") from None
        out_of_range = [i for i in indices if not (1 <= i <= len(checks.CRITERIA))]
        if out_of_range:
            raise ConfigError(
                f"no criteria {out_of_range}; have 1..{len(checks.CRITERIA)}"
            )
    results = checks.run_criteria(indices)
    for r in results:
        print(checks.format_result(r))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 0 if not failed else 2


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="globalobs",
        description="Birkhoff-average experiments for global observables "
        "on infinite-measure-preserving systems",
    )
    parser.add_argument("--version", action="version", version=f"globalobs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p):
        p.add_argument("--preset", help=f"one of {sorted(PRESETS)}")
        p.add_argument("--config", help="config file (key = value in [sections])")
        p.add_argument("--seed", type=int, default=None, help="override the seed")
        p.add_argument("--n-max", type=int, default=None, help="override n_max")
        p.add_argument("--out", default=None, help="output CSV path (default stdout)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--full-scale", action="store_true",
                       help="run the preset at the published window instead of desk scale")

    p = sub.add_parser("simulate", help="single-orbit averages at figure checkpoints")
    add_run_flags(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("ensemble", help="A_n samples over independent orbits")
    add_run_flags(p)
    p.set_defaults(fn=cmd_ensemble)

    p = sub.add_parser("arcsine", help="occupation-fraction law report")
    p.add_argument("--ensemble", type=int, default=5000)
    p.add_argument("--n", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--tolerance", type=float, default=0.05)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_arcsine)

    p = sub.add_parser("levywalk", help="walk-tower trajectory or ensemble CSV")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--gammas", default="-1,1", help="comma list of unit complex directions")
    p.add_argument("--radial", action="store_true", help="uniform-angle directions")
    p.add_argument("--mode", choices=("trajectory", "ensemble"), default="trajectory")
    p.add_argument("--n", type=int, default=10**5)
    p.add_argument("--ensemble", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_levywalk)

    p = sub.add_parser("luroth", help="digit and renewal reports")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--mode", choices=("renewal", "digits", "statistic"), default="renewal")
    p.add_argument("--k-max", type=int, default=1000)
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--count", type=int, default=40)
    p.add_argument("--streams", type=int, default=10)
    p.add_argument("--seed", type=int, default=1000)
    p.add_argument("--tolerance", type=float, default=1e-2)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_luroth)

    p = sub.add_parser("verify", help="run the acceptance battery (exit 0 iff all pass)")
    p.add_argument("--criteria", default=None, help="comma list of criterion numbers")
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
