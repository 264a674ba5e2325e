"""Batch driver: subcommands over the library, plain-text file formats.

Subcommands: simulate, check, induce, compare, markov. All output is CSV
or line-oriented text; exit codes are 0 (success), 2 (rejected input), and
3 (numerical invariant violation).

File formats, chosen to be bit-exact and trivially parseable anywhere:

* unitary file: first non-comment line ``dim N``; then N lines of N
  whitespace-separated ``re,im`` tokens; ``#`` starts a comment.
* config file: flat ``key = value`` lines with the keys of
  ``SimulationConfig``; command-line flags override file values.
* series CSV: header ``t,x,f_1,...,f_b,rho`` and one row per recorded
  (t, x); ``rho`` is the channel sum. Floats are written with 17
  significant digits so a round trip is exact.
"""

import argparse
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import complexlin, ensemble, kernels, lattice, node, oracle
from .errors import InputError, InvariantViolation
from .lattice import CollisionMode, TimeSeries

_BUILTINS = {
    "builtin:diffusion": node.builtin_diffusion_unitary,
    "builtin:violating": node.builtin_violating_unitary,
    "builtin:identity": lambda: np.eye(4, dtype=np.complex128),
}

_FLOAT_FMT = "%.17g"


# ---------------------------------------------------------------- unitary I/O

def _content_lines(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.readlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    lines = []
    for lineno, line in enumerate(raw, 1):
        text = line.split("#", 1)[0].strip()
        if text:
            lines.append((lineno, text))
    return lines


def load_unitary(source: str) -> np.ndarray:
    """Load a collision operator from ``builtin:<name>`` or a matrix file."""
    if source.startswith("builtin:"):
        try:
            return _BUILTINS[source]()
        except KeyError:
            raise InputError(
                f"unknown builtin {source!r}; choose from {sorted(_BUILTINS)}"
            ) from None
    lines = _content_lines(source)
    if not lines:
        raise InputError(f"{source}: empty matrix file")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or parts[0] != "dim":
        raise InputError(f"{source}:{lineno}: expected header 'dim N', got {header!r}")
    try:
        dim = int(parts[1])
    except ValueError:
        raise InputError(f"{source}:{lineno}: cannot parse dimension {parts[1]!r}") from None
    if dim < 2 or dim & (dim - 1):
        raise InputError(f"{source}:{lineno}: dimension must be a power of two >= 2, got {dim}")
    rows = lines[1:]
    if len(rows) != dim:
        raise InputError(f"{source}: expected {dim} matrix rows, found {len(rows)}")
    u = np.empty((dim, dim), dtype=np.complex128)
    for r, (lineno, text) in enumerate(rows):
        tokens = text.split()
        if len(tokens) != dim:
            raise InputError(
                f"{source}:{lineno}: row {r} has {len(tokens)} entries, expected {dim}"
            )
        for c, tok in enumerate(tokens):
            re_s, _, im_s = tok.partition(",")
            try:
                u[r, c] = complex(float(re_s), float(im_s) if im_s else 0.0)
            except ValueError:
                raise InputError(
                    f"{source}:{lineno}: row {r} entry {c}: cannot parse {tok!r}"
                ) from None
    residual = complexlin.unitarity_residual(u)
    if residual > node.DEFAULT_EPS:
        raise InputError(
            f"{source}: matrix is not unitary, residual {residual:.3g} "
            f"exceeds {node.DEFAULT_EPS:.0e}"
        )
    return u


# ----------------------------------------------------------------- series I/O

def write_series(series: TimeSeries, fh) -> int:
    """Write a run as CSV; returns the number of data rows."""
    b = series.channels
    header = "t,x," + ",".join(f"f_{i + 1}" for i in range(b)) + ",rho"
    fh.write(header + "\n")
    rows = 0
    for k, t in enumerate(series.times):
        frame = series.frames[k]
        for x in range(series.length):
            vals = [_FLOAT_FMT % v for v in frame[x]]
            vals.append(_FLOAT_FMT % frame[x].sum())
            fh.write(f"{int(t)},{x}," + ",".join(vals) + "\n")
            rows += 1
    return rows


def read_series(path) -> TimeSeries:
    """Parse a series CSV back into a TimeSeries."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if len(header) < 4 or header[:2] != ["t", "x"] or header[-1] != "rho":
            raise InputError(f"{path}: unrecognized series header {header!r}")
        b = len(header) - 3
        per_time: dict[int, list] = {}
        for line in fh:
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != b + 3:
                raise InputError(f"{path}: row has {len(cells)} cells, expected {b + 3}")
            t = int(cells[0])
            per_time.setdefault(t, []).append([float(v) for v in cells[2 : 2 + b]])
    if not per_time:
        raise InputError(f"{path}: no data rows")
    times = sorted(per_time)
    frames = np.asarray([per_time[t] for t in times], dtype=np.float64)
    return TimeSeries(np.asarray(times, dtype=np.int64), frames)


# -------------------------------------------------------------- configuration

@dataclass
class SimulationConfig:
    length: int = 64
    steps: int = 100
    record_every: int = 1
    mode: str = "pure"
    members: int = 1000
    seed: int = 0
    unitary: str = "builtin:diffusion"
    vmap: str | None = None
    init: str | None = None
    out: str | None = None

    _MODES = ("pure", "mixed", "ensemble", "classical")

    def validated(self):
        if self.length < 1:
            raise InputError(f"length must be >= 1, got {self.length}")
        if self.steps < 0:
            raise InputError(f"steps must be >= 0, got {self.steps}")
        if self.record_every < 1:
            raise InputError(f"record_every must be >= 1, got {self.record_every}")
        if self.mode not in self._MODES:
            raise InputError(f"mode must be one of {self._MODES}, got {self.mode!r}")
        return self


_INT_KEYS = {"length", "steps", "record_every", "members", "seed"}


def parse_config(path) -> dict:
    """Flat ``key = value`` file with the SimulationConfig keys."""
    known = {f.name for f in fields(SimulationConfig)}
    out = {}
    for lineno, text in _content_lines(path):
        key, eq, value = text.partition("=")
        if not eq:
            raise InputError(f"{path}:{lineno}: expected 'key = value', got {text!r}")
        key, value = key.strip(), value.strip()
        if key not in known:
            raise InputError(f"{path}:{lineno}: unknown key {key!r}")
        if key in _INT_KEYS:
            try:
                out[key] = int(value)
            except ValueError:
                raise InputError(f"{path}:{lineno}: {key} must be an integer") from None
        else:
            out[key] = value
    return out


def _resolve_config(args) -> SimulationConfig:
    values = parse_config(args.config) if getattr(args, "config", None) else {}
    for f in fields(SimulationConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    return SimulationConfig(**values).validated()


def _parse_values(text: str, b: int, what: str) -> np.ndarray:
    try:
        vals = np.asarray([float(v) for v in text.split(",") if v != ""])
    except ValueError:
        raise InputError(f"cannot parse {what} values {text!r}") from None
    if vals.size != b:
        raise InputError(f"{what} needs {b} channel values, got {vals.size}")
    if vals.min() < 0.0 or vals.max() > 1.0:
        raise InputError(f"{what} values must lie in [0, 1]")
    return vals


def parse_initial(spec: str | None, length: int, b: int) -> np.ndarray:
    """Initial-condition specs: uniform:<vals>, delta:<site>:<vals>,
    gaussian:<center>:<width>:<amps>, file:<path>.

    Defaults to a delta at the lattice center with all channels at 0.5.
    The gaussian is clamped to [0, 1] and deliberately not renormalized:
    occupations are probabilities, not densities.
    """
    if spec is None:
        spec = "delta:%d:%s" % (length // 2, ",".join(["0.5"] * b))
    kind, _, rest = spec.partition(":")
    if kind == "uniform":
        vals = _parse_values(rest, b, "uniform")
        return np.tile(vals, (length, 1))
    if kind == "delta":
        site_s, _, vals_s = rest.partition(":")
        try:
            site = int(site_s)
        except ValueError:
            raise InputError(f"delta site must be an integer, got {site_s!r}") from None
        if not 0 <= site < length:
            raise InputError(f"delta site {site} outside [0, {length})")
        f = np.zeros((length, b))
        f[site] = _parse_values(vals_s, b, "delta")
        return f
    if kind == "gaussian":
        center_s, _, rest2 = rest.partition(":")
        width_s, _, vals_s = rest2.partition(":")
        try:
            center, width = float(center_s), float(width_s)
        except ValueError:
            raise InputError(f"cannot parse gaussian center/width in {spec!r}") from None
        if width <= 0:
            raise InputError(f"gaussian width must be positive, got {width}")
        amps = _parse_values(vals_s, b, "gaussian amplitude")
        x = np.arange(length, dtype=np.float64)
        dx = (x - center + length / 2.0) % length - length / 2.0
        bump = np.exp(-(dx**2) / (2.0 * width**2))
        return np.clip(bump[:, None] * amps[None, :], 0.0, 1.0)
    if kind == "file":
        try:
            f = np.loadtxt(rest, delimiter=",", ndmin=2)
        except OSError as exc:
            raise InputError(f"cannot read initial condition {rest}: {exc}") from exc
        except ValueError as exc:
            raise InputError(f"cannot parse initial condition {rest}: {exc}") from exc
        if f.shape != (length, b):
            raise InputError(
                f"initial condition shape {f.shape} does not match (L={length}, b={b})"
            )
        return f
    raise InputError(f"unknown initial-condition kind {kind!r} in {spec!r}")


def _parse_vmap(spec: str | None, b: int) -> np.ndarray:
    if spec is None:
        return lattice.default_velocity_map(b)
    try:
        v = np.asarray([int(t) for t in spec.split(",") if t != ""], dtype=np.int64)
    except ValueError:
        raise InputError(f"cannot parse velocity map {spec!r}") from None
    if v.size != b:
        raise InputError(f"velocity map needs {b} displacements, got {v.size}")
    return v


# -------------------------------------------------------------------- fitting

def fit_diffusion_coefficient(series: TimeSeries, t_min: int, t_max: int):
    """Least-squares diffusion coefficient from the variance growth.

    Fits variance(t) over snapshots with t_min <= t <= t_max and returns
    (D, slope_stderr) with D = slope / 2 (Var = 2 D t convention).
    """
    if t_max <= t_min:
        raise InputError(f"need t_max > t_min, got [{t_min}, {t_max}]")
    sel = (series.times >= t_min) & (series.times <= t_max)
    if int(sel.sum()) < 3:
        raise InputError(
            f"fit window [{t_min}, {t_max}] holds {int(sel.sum())} snapshots, need >= 3"
        )
    t = series.times[sel].astype(np.float64)
    var = np.asarray(
        [
            lattice.profile_moments(lattice.density_profile(frame))[2]
            for frame in series.frames[sel]
        ]
    )
    design = np.column_stack([t, np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(design, var, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    resid = var - (slope * t + intercept)
    dof = t.size - 2
    t_spread = float(((t - t.mean()) ** 2).sum())
    stderr = float(np.sqrt((resid @ resid) / dof / t_spread)) if dof > 0 else 0.0
    return slope / 2.0, stderr


# ---------------------------------------------------------------- subcommands

def _run_from_config(cfg: SimulationConfig):
    u = load_unitary(cfg.unitary)
    b = u.shape[0].bit_length() - 1
    vmap = _parse_vmap(cfg.vmap, b)
    f0 = parse_initial(cfg.init, cfg.length, b)
    if cfg.mode == "classical":
        a = node.induced_stochastic(u)
        return oracle.lb_run(f0, a, vmap, cfg.steps, cfg.record_every)
    if cfg.mode == "pure":
        mode = CollisionMode.pure()
    elif cfg.mode == "mixed":
        mode = CollisionMode.mixed()
    else:
        mode = CollisionMode.ensemble(cfg.members, cfg.seed)
    return lattice.run(f0, u, vmap, mode, cfg.steps, cfg.record_every)


def cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    series = _run_from_config(cfg)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            rows = write_series(series, fh)
        print(f"wrote {rows} rows ({series.times.size} snapshots, "
              f"L={series.length}, b={series.channels}) to {cfg.out}")
    else:
        write_series(series, sys.stdout)
    if args.fit:
        t_min_s, _, t_max_s = args.fit.partition(",")
        try:
            t_min, t_max = int(t_min_s), int(t_max_s)
        except ValueError:
            raise InputError(f"--fit expects 'tmin,tmax', got {args.fit!r}") from None
        d, stderr = fit_diffusion_coefficient(series, t_min, t_max)
        dest = sys.stdout if cfg.out else sys.stderr
        print(f"D = {d:.9f} (slope stderr {stderr:.3e})", file=dest)
    return 0


def cmd_check(args) -> int:
    u = load_unitary(args.unitary)
    print(f"unitarity residual: {complexlin.unitarity_residual(u):.3e}")
    report = node.check_collision_constraint(u)
    status = "satisfied" if report.satisfied else "violated"
    print(f"constraint {status}, max_violation {report.max_violation:.1e}")
    for p, m, r, value in report.violations[:20]:
        print(f"  p={p} m={m} r={r} Re={value:.6g}")
    if len(report.violations) > 20:
        print(f"  ... {len(report.violations) - 20} more")
    return 0


def cmd_induce(args) -> int:
    u = load_unitary(args.unitary)
    a = node.induced_stochastic(u)
    for row in a:
        print(" ".join(_FLOAT_FMT % v for v in row))
    print("row sums: " + " ".join(_FLOAT_FMT % v for v in a.sum(axis=1)))
    print("column sums: " + " ".join(_FLOAT_FMT % v for v in a.sum(axis=0)))
    return 0


def cmd_compare(args) -> int:
    cfg = _resolve_config(args)
    if cfg.mode not in ("pure", "mixed"):
        raise InputError("compare supports modes 'pure' and 'mixed'")
    quantum = _run_from_config(cfg)
    u = load_unitary(cfg.unitary)
    b = u.shape[0].bit_length() - 1
    classical = oracle.lb_run(
        parse_initial(cfg.init, cfg.length, b),
        node.induced_stochastic(u),
        _parse_vmap(cfg.vmap, b),
        cfg.steps,
        cfg.record_every,
    )
    dev, (x, t) = oracle.compare_runs(quantum, classical)
    print(f"max deviation {dev:.3e} at site {x}, t={t}")
    return 0


def cmd_markov(args) -> int:
    u = load_unitary(args.unitary)
    a = node.induced_stochastic(u)
    dim = a.shape[0]
    tokens = []
    for _, text in _content_lines(args.p0):
        tokens.extend(text.replace(",", " ").split())
    try:
        p = np.asarray([float(t) for t in tokens])
    except ValueError:
        raise InputError(f"cannot parse distribution file {args.p0}") from None
    if p.size != dim:
        raise InputError(f"distribution has {p.size} entries, operator needs {dim}")
    if args.steps < 0:
        raise InputError(f"steps must be nonnegative, got {args.steps}")
    print("t," + ",".join(f"p_{s}" for s in range(dim)))
    print("0," + ",".join(_FLOAT_FMT % v for v in p))
    for t in range(1, args.steps + 1):
        p = oracle.markov_power_iterate(a, p, 1)
        print(f"{t}," + ",".join(_FLOAT_FMT % v for v in p))
    return 0


# --------------------------------------------------------------------- parser

def _add_sim_flags(sub):
    sub.add_argument("--config", help="flat key = value configuration file")
    sub.add_argument("--length", type=int, help="number of lattice sites")
    sub.add_argument("--steps", type=int, help="time steps to run")
    sub.add_argument("--record-every", dest="record_every", type=int,
                     help="snapshot interval (t=0 always recorded)")
    sub.add_argument("--mode", choices=SimulationConfig._MODES,
                     help="collision mode (classical = lattice-Boltzmann path)")
    sub.add_argument("--members", type=int, help="ensemble members per node")
    sub.add_argument("--seed", type=int, help="master seed for ensemble streams")
    sub.add_argument("--unitary",
                     help="matrix file or builtin:diffusion|violating|identity")
    sub.add_argument("--vmap", help="comma-separated per-channel displacements")
    sub.add_argument("--init", dest="init",
                     help="uniform:<vals> | delta:<site>:<vals> | "
                          "gaussian:<center>:<width>:<amps> | file:<path>")
    sub.add_argument("--out", help="output CSV path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlgas",
        description="Quantum lattice-gas simulator and analysis toolkit "
                    f"(kernel backend: {kernels.active_backend()})",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="run a lattice simulation, write CSV")
    _add_sim_flags(sim)
    sim.add_argument("--fit", help="fit D over 'tmin,tmax' and report it")
    sim.set_defaults(func=cmd_simulate)

    chk = subs.add_parser("check", help="collision-constraint and unitarity report")
    chk.add_argument("--unitary", required=True)
    chk.set_defaults(func=cmd_check)

    ind = subs.add_parser("induce", help="print |U|^2 with row/column sums")
    ind.add_argument("--unitary", required=True)
    ind.set_defaults(func=cmd_induce)

    cmp_ = subs.add_parser("compare", help="quantum vs classical max deviation")
    _add_sim_flags(cmp_)
    cmp_.set_defaults(func=cmd_compare)

    mkv = subs.add_parser("markov", help="iterate |U|^2 on a distribution")
    mkv.add_argument("--unitary", required=True)
    mkv.add_argument("--p0", required=True, help="initial distribution file")
    mkv.add_argument("--steps", type=int, default=1)
    mkv.set_defaults(func=cmd_markov)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
