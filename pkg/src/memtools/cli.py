"""Command-line driver: ``memtools run|gen|oracle <config>``.

Configs are flat ``key=value`` text, one pair per line, with dotted section
prefixes and ``#`` comments::

    seed=3
    output.dir=out/barcode
    data.source=barcode
    data.length=64
    data.mask=all
    operator.kind=blur1d
    operator.sigma=1.0
    operator.half_width=2
    regularizer.distribution=bernoulli
    regularizer.p=symbology
    regularizer.weight=0.05
    solver.name=bpg
    solver.max_iters=300

Exit codes: 0 success, 1 config parse error, 2 domain validation error,
3 solver failure (or failed oracle comparisons).
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

from . import expfam as ef
from .errors import ConfigError, DomainError, MemError, StepSizeError, Unsupported
from .linops import (DenseOperator, IdentityOperator, finite_difference_2d, gaussian_blur,
                     read_matrix, read_vector, write_vector)
from .models import FIDELITIES, Problem, Regularizer
from .oracle import derived_reports, write_reports
from .solvers import SolverOptions, bpg, chambolle_pock_nig_tv, fista

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_SOLVER = 0, 1, 2, 3
SYMBOLOGY_EPS = 1e-6

DEFAULTS = {
    "seed": "0",
    "output.dir": "memtools_out",
    "kernel": "auto",
    "data.source": "random",
    "data.length": "64",
    "data.mask": "none",
    "data.x_true": "",
    "data.low": "0.5",
    "data.high": "1.5",
    "data.noise": "0",
    "data.observation": "",
    "fidelity.family": "normal",
    "operator.kind": "identity",
    "operator.path": "",
    "operator.rows": "",
    "operator.cols": "",
    "operator.size": "",
    "operator.height": "",
    "operator.width": "",
    "operator.sigma": "1.0",
    "operator.half_width": "",
    "operator.boundary": "reflect",
    "regularizer.distribution": "none",
    "regularizer.weight": "1",
    "regularizer.composite": "none",
    "solver.name": "bpg",
    "solver.max_iters": "500",
    "solver.tol": "0",
    "solver.step": "auto",
    "solver.x0": "auto",
    "solver.trace_stride": "1",
    "solver.s": "",
    "solver.tau": "",
}
_PATH_KEYS = ("data.x_true", "data.observation", "operator.path", "solver.x0")


# ---------------------------------------------------------------- parsing

def parse_config(text, source="<config>"):
    """Parse ``key=value`` lines into a dict of strings."""
    out = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{no}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{no}: empty key")
        if key in out:
            raise ConfigError(f"{source}:{no}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    raw = parse_config(text, source=str(path))
    base = os.path.dirname(os.path.abspath(path))
    for key in _PATH_KEYS:
        v = raw.get(key, "")
        if v and not _is_number(v) and v != "auto" and not os.path.isabs(v):
            raw[key] = os.path.join(base, v)
    return raw


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def _prior_fields(name):
    cls = ef.FAMILIES[name]
    return [f.name for f in dataclasses.fields(cls) if f.init]


def resolve(raw):
    """Merge defaults and reject unknown keys."""
    cfg = dict(DEFAULTS)
    dist = raw.get("regularizer.distribution", DEFAULTS["regularizer.distribution"])
    allowed = set(DEFAULTS)
    if dist != "none":
        if dist not in ef.FAMILIES:
            raise ConfigError(f"regularizer.distribution must be 'none' or one of {sorted(ef.FAMILIES)}, got {dist!r}")
        allowed |= {f"regularizer.{f}" for f in _prior_fields(dist)}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    cfg.update(raw)
    return cfg


def _get(cfg, key, kind):
    text = cfg[key]
    try:
        if kind is int:
            v = float(text)
            if v != int(v):
                raise ValueError
            return int(v)
        return kind(text)
    except ValueError:
        raise ConfigError(f"{key} must be {'an integer' if kind is int else 'a number'}, got {text!r}") from None


def _opt(cfg, key, kind):
    return None if cfg[key] in ("", "auto") else _get(cfg, key, kind)


def _choice(cfg, key, choices):
    v = cfg[key]
    if v not in choices:
        raise ConfigError(f"{key} must be one of {', '.join(choices)}, got {v!r}")
    return v


def _parse_param(key, text):
    """Parse a scalar or a comma-separated vector; ``;`` separates matrix rows."""
    try:
        if ";" in text:
            return np.array([[float(v) for v in row.split(",")] for row in text.split(";")])
        if "," in text:
            return np.array([float(v) for v in text.split(",")])
        return float(text)
    except ValueError:
        raise ConfigError(f"{key} must be a number, vector (a,b,...) or matrix (a,b;c,d), got {text!r}") from None


# ---------------------------------------------------------------- generators

def parse_mask(text, length):
    """``all``, ``none`` or comma-separated index ranges like ``0-9,50-63``."""
    mask = np.zeros(length, dtype=bool)
    text = text.strip()
    if text == "all":
        mask[:] = True
        return mask
    if text in ("none", ""):
        return mask
    for part in text.split(","):
        lo, _, hi = part.strip().partition("-")
        try:
            lo_i = int(lo)
            hi_i = int(hi) if hi else lo_i
        except ValueError:
            raise ConfigError(f"data.mask entries must be indices or ranges a-b, got {part!r}") from None
        if not (0 <= lo_i <= hi_i < length):
            raise DomainError(f"data.mask range {part!r} must lie within 0..{length - 1}")
        mask[lo_i:hi_i + 1] = True
    return mask


def gen_barcode(length, mask, seed, eps=SYMBOLOGY_EPS):
    """Random binary signal and the matching Bernoulli parameter vector.

    Free pixels get ``p = 0.5``; masked pixels get ``eps`` or ``1 - eps``
    according to their known value.
    """
    if int(length) < 1:
        raise DomainError("barcode length must be at least 1")
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)).spawn(1)[0])
    x = (rng.random(int(length)) < 0.5).astype(float)
    mask = np.broadcast_to(np.asarray(mask, dtype=bool), x.shape)
    p = np.where(mask, np.where(x > 0.5, 1.0 - eps, eps), 0.5)
    return x, p


def gen_observation(family, A, x_true, noise, seed):
    """Synthetic observation of ``A x_true`` under the given noise model."""
    z = A.apply(np.asarray(x_true, dtype=float))
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)).spawn(2)[1])
    noise = float(noise)
    if not noise >= 0:
        raise DomainError("data.noise must be nonnegative")
    if family == "normal":
        return z + noise * rng.standard_normal(z.shape) if noise > 0 else z
    if np.any(z < 0) or np.any(~np.isfinite(z)):
        raise DomainError(f"{family} observations need nonnegative rates A x_true")
    if family == "poisson":
        return rng.poisson(np.maximum(z, 1e-8)).astype(float)
    if family == "gamma":
        if noise == 0:
            return z
        shape = 1.0 / noise**2
        return z * rng.gamma(shape, 1.0, z.shape) / shape
    raise ConfigError(f"fidelity.family must be one of {', '.join(FIDELITIES)}, got {family!r}")


# ---------------------------------------------------------------- assembly

@dataclasses.dataclass
class RunConfig:
    """Resolved configuration plus the arrays it describes."""

    values: dict
    A: object = None
    x_true: object = None
    y: object = None
    prior_p: object = None

    @property
    def out_dir(self):
        return self.values["output.dir"]

    def manifest(self):
        lines = [f"{k}={self.values[k]}" for k in sorted(self.values)]
        return "\n".join(lines) + "\n"


def _build_operator(cfg, length):
    kind = _choice(cfg, "operator.kind", ("identity", "dense", "random", "blur1d", "blur2d"))
    seed = _get(cfg, "seed", int)
    if kind == "identity":
        return IdentityOperator(_opt(cfg, "operator.size", int) or length)
    if kind == "dense":
        if not cfg["operator.path"]:
            raise ConfigError("operator.kind=dense needs operator.path")
        try:
            return DenseOperator(read_matrix(cfg["operator.path"]))
        except OSError as exc:
            raise ConfigError(f"cannot read operator.path: {exc}") from exc
    if kind == "random":
        m = _opt(cfg, "operator.rows", int)
        d = _opt(cfg, "operator.cols", int)
        if not m or not d or m < 1 or d < 1:
            raise DomainError("operator.kind=random needs positive operator.rows and operator.cols")
        rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(3)[2])
        return DenseOperator(rng.uniform(0.05, 1.0, (m, d)))
    hw = _opt(cfg, "operator.half_width", int)
    sigma = _get(cfg, "operator.sigma", float)
    boundary = _choice(cfg, "operator.boundary", ("reflect", "zero_pad"))
    if kind == "blur1d":
        return gaussian_blur(1, _opt(cfg, "operator.size", int) or length, sigma, boundary, hw)
    h, w = _opt(cfg, "operator.height", int), _opt(cfg, "operator.width", int)
    if not h or not w:
        raise DomainError("operator.kind=blur2d needs positive operator.height and operator.width")
    return gaussian_blur(2, (h, w), sigma, boundary, hw)


def _build_data(cfg):
    source = _choice(cfg, "data.source", ("barcode", "random", "file"))
    seed = _get(cfg, "seed", int)
    length = _get(cfg, "data.length", int)
    prior_p = None
    if source == "barcode":
        x_true, prior_p = gen_barcode(length, parse_mask(cfg["data.mask"], length), seed)
    A = _build_operator(cfg, length)
    if source == "random":
        lo, hi = _get(cfg, "data.low", float), _get(cfg, "data.high", float)
        if not lo <= hi:
            raise DomainError("data.low must not exceed data.high")
        rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
        x_true = rng.uniform(lo, hi, A.shape[1])
    elif source == "file":
        x_true = _read(cfg, "data.x_true") if cfg["data.x_true"] else None
    if x_true is not None and x_true.shape != (A.shape[1],):
        raise DomainError(f"x_true has length {x_true.size} but the operator has {A.shape[1]} columns")
    family = _choice(cfg, "fidelity.family", tuple(FIDELITIES))
    if cfg["data.observation"]:
        y = _read(cfg, "data.observation")
    elif x_true is None:
        raise ConfigError("data.source=file needs data.x_true or data.observation")
    else:
        y = gen_observation(family, A, x_true, _get(cfg, "data.noise", float), seed)
    return A, x_true, y, prior_p


def _read(cfg, key):
    try:
        return read_vector(cfg[key])
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read {key}: {exc}") from exc


def _build_prior(cfg, prior_p):
    name = cfg["regularizer.distribution"]
    if name == "none":
        return None
    params = {}
    for field in _prior_fields(name):
        key = f"regularizer.{field}"
        if key not in cfg:
            continue
        if cfg[key] == "symbology":
            if prior_p is None or (name, field) != ("bernoulli", "p"):
                raise ConfigError(f"{key}=symbology needs data.source=barcode and a bernoulli prior")
            params[field] = prior_p
        else:
            params[field] = _parse_param(key, cfg[key])
    if name == "multinomial" and "n" in params:
        params["n"] = int(params["n"]) if float(params["n"]).is_integer() else params["n"]
    try:
        return ef.FAMILIES[name](**params)
    except DomainError as exc:
        raise DomainError(f"regularizer.distribution={name}: {exc}") from exc


def build(raw):
    """Validate a raw config dict and assemble data.  Returns ``RunConfig``."""
    cfg = resolve(raw)
    _get(cfg, "seed", int)
    A, x_true, y, prior_p = _build_data(cfg)
    return RunConfig(cfg, A, x_true, y, prior_p)


def _x0(cfg, problem, y):
    text = cfg["solver.x0"]
    d = problem.dim
    if text != "auto":
        if _is_number(text):
            return np.full(d, float(text))
        return _read(cfg, "solver.x0")
    reg = problem.regularizer
    if problem.kernel.name != "energy":
        denom = float(np.sum(problem.fidelity.A.apply(np.ones(d))))
        scale = float(np.sum(y)) / denom if denom > 0 and np.sum(y) > 0 else 1.0
        return np.full(d, scale)
    if reg.active and not reg.composite and reg.prior.separable:
        return np.broadcast_to(np.asarray(reg.prior.mean(), dtype=float), (d,)).copy()
    return np.zeros(d)


def _solve(rc):
    cfg = rc.values
    name = _choice(cfg, "solver.name", ("bpg", "fista", "cp"))
    opts = SolverOptions(max_iters=_get(cfg, "solver.max_iters", int), step=_opt(cfg, "solver.step", float),
                         tol=_get(cfg, "solver.tol", float),
                         trace_stride=_get(cfg, "solver.trace_stride", int))
    weight = _get(cfg, "regularizer.weight", float)
    composite = _choice(cfg, "regularizer.composite", ("none", "tv"))
    prior = _build_prior(cfg, rc.prior_p)
    family = cfg["fidelity.family"]
    fid = FIDELITIES[family](rc.A, rc.y)
    shape = None
    if composite == "tv":
        h = getattr(rc.A, "height", None)
        if h is None:
            n = int(round(np.sqrt(rc.A.shape[1])))
            if n * n != rc.A.shape[1]:
                raise DomainError("regularizer.composite=tv needs a square image or a blur2d operator")
            shape = (n, n)
        else:
            shape = (rc.A.height, rc.A.width)

    if name == "cp":
        if family != "normal" or not isinstance(prior, ef.NIG) or composite != "tv":
            raise DomainError("solver.name=cp needs fidelity.family=normal, a nig prior and regularizer.composite=tv")
        if prior.separable or prior.dim != 2 or np.any(prior.mu != 0) or np.any(prior.beta != 0) \
                or prior.alpha != 1 or not np.allclose(prior.cov, np.eye(2)) or weight != 1:
            raise DomainError("solver.name=cp needs an isotropic 2-D nig prior (mu=0, beta=0, alpha=1, "
                              "cov=identity) with regularizer.weight=1")
        s, tau = _opt(cfg, "solver.s", float), _opt(cfg, "solver.tau", float)
        if s is None or tau is None:
            raise ConfigError("solver.name=cp needs solver.s and solver.tau")
        x0 = _x0(cfg, Problem(fid), rc.y) if cfg["solver.x0"] != "auto" else np.zeros(rc.A.shape[1])
        return chambolle_pock_nig_tv(rc.A, rc.y, float(prior.delta), s, tau, x0, opts, shape=shape), "energy"

    L = finite_difference_2d(*shape) if shape else None
    reg = Regularizer(prior, weight, L)
    problem = Problem(fid, reg, kernel=cfg["kernel"], smooth_regularizer=composite == "tv")
    x0 = _x0(cfg, problem, rc.y)
    solver = bpg if name == "bpg" else fista
    return solver(problem, x0, opts), problem.kernel.name


def _error_exit(kind, exc, code):
    print(f"memtools: {kind} error: {exc}", file=sys.stderr)
    return code


def run(raw):
    """Solve the configured problem and write its artifacts.  Returns an exit status."""
    try:
        rc = build(raw)
        # surface parameter problems before any iteration
        _build_prior(rc.values, rc.prior_p)
        FIDELITIES[rc.values["fidelity.family"]](rc.A, rc.y)
    except ConfigError as exc:
        return _error_exit("config", exc, EXIT_CONFIG)
    except (DomainError, Unsupported, StepSizeError) as exc:
        return _error_exit("domain", exc, EXIT_DOMAIN)
    try:
        with np.errstate(all="ignore"):
            trace, kernel = _solve(rc)
    except ConfigError as exc:
        return _error_exit("config", exc, EXIT_CONFIG)
    except (Unsupported, StepSizeError) as exc:
        return _error_exit("domain", exc, EXIT_DOMAIN)
    except (MemError, FloatingPointError, ArithmeticError) as exc:
        return _error_exit("solver", exc, EXIT_SOLVER)
    out = rc.out_dir
    os.makedirs(out, exist_ok=True)
    write_vector(os.path.join(out, "solution.txt"), trace.x)
    trace.to_csv(os.path.join(out, "trace.csv"))
    write_vector(os.path.join(out, "observation.txt"), rc.y)
    if rc.x_true is not None:
        write_vector(os.path.join(out, "x_true.txt"), rc.x_true)
    values = dict(rc.values)
    values["output.dir"] = os.path.abspath(out)
    if values["kernel"] == "auto" and values["solver.name"] != "cp":
        values["kernel"] = kernel
    with open(os.path.join(out, "manifest.txt"), "w") as fh:
        fh.write(f"# iterations={trace.iterations} stop={trace.reason} step={trace.step!r}\n")
        fh.write(RunConfig(values).manifest())
    print(f"{values['solver.name']}: {trace.iterations} iterations ({trace.reason}), "
          f"objective {trace.objective[-1]:.10g}; artifacts in {out}")
    return EXIT_OK


def gen(what, raw):
    try:
        cfg = resolve(raw)
        out = cfg["output.dir"]
        if what == "barcode":
            length = _get(cfg, "data.length", int)
            x, p = gen_barcode(length, parse_mask(cfg["data.mask"], length), _get(cfg, "seed", int))
            os.makedirs(out, exist_ok=True)
            write_vector(os.path.join(out, "x_true.txt"), x)
            write_vector(os.path.join(out, "prior_p.txt"), p)
        else:
            A, x_true, y, _ = _build_data(cfg)
            os.makedirs(out, exist_ok=True)
            write_vector(os.path.join(out, "observation.txt"), y)
            if x_true is not None:
                write_vector(os.path.join(out, "x_true.txt"), x_true)
    except ConfigError as exc:
        return _error_exit("config", exc, EXIT_CONFIG)
    except (DomainError, Unsupported) as exc:
        return _error_exit("domain", exc, EXIT_DOMAIN)
    print(f"wrote {what} data to {out}")
    return EXIT_OK


def oracle(raw):
    try:
        cfg = resolve(raw)
    except ConfigError as exc:
        return _error_exit("config", exc, EXIT_CONFIG)
    out = cfg["output.dir"]
    reports = derived_reports()
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "oracle_report.csv")
    write_reports(reports, path)
    failed = [r.quantity for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} oracle comparisons passed; report in {path}")
    for q in failed:
        print(f"FAIL {q}", file=sys.stderr)
    return EXIT_SOLVER if failed else EXIT_OK


def main(argv=None):
    parser = argparse.ArgumentParser(prog="memtools", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="solve the configured problem and write artifacts")
    p_gen = sub.add_parser("gen", help="generate synthetic data")
    p_gen.add_argument("what", choices=("barcode", "observation"))
    p_or = sub.add_parser("oracle", help="compare analytic values with brute-force oracles")
    for p in (p_run, p_gen, p_or):
        p.add_argument("config", help="key=value configuration file")
        p.add_argument("--output", help="override output.dir")
    args = parser.parse_args(argv)
    try:
        raw = load_config(args.config)
    except ConfigError as exc:
        return _error_exit("config", exc, EXIT_CONFIG)
    if args.output:
        raw["output.dir"] = args.output
    if args.command == "run":
        return run(raw)
    if args.command == "gen":
        return gen(args.what, raw)
    return oracle(raw)


if __name__ == "__main__":
    sys.exit(main())
