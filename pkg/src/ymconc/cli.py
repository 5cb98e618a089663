"""Command-line front end: ``ymconc <subcommand> [--config FILE] [flags]``.

Config files are plain ``key = value`` lines (``#`` starts a comment) using
the keys of :class:`RunConfig`; command-line flags override file values.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import concentration, moments, pairings, thermo
from .haar import RngStream
from .lattice import LatticeShape, config_to_dict, random_config
from .verify import DEFAULT_SEED, run_checks

HISTOGRAM_COLUMNS = ["bin_lo", "bin_hi", "count", "density", "gaussian_density"]
MOMENT_COLUMNS = ["l", "empirical", "stderr", "target_m_l", "N", "D", "L", "K", "seed",
                  "exact_t_moment", "allowance", "pass"]
PAIRING_COLUMNS = ["l", "D", "L", "K", "closed", "brute", "match"]
FREE_ENERGY_COLUMNS = ["lambda", "D", "L", "K", "N", "f_gaussian", "f_weak", "f_mc", "f_mc_stderr",
                       "f_reference", "warnings", "reference_branch", "gaussian_density", "weak_density",
                       "mc_density", "reference_density", "gaussian_matches_reference"]


@dataclass
class RunConfig:
    command: str = ""
    D: int = 2
    L: int = 3
    N: int = 4
    seed: int = DEFAULT_SEED
    samples: int = 10_000
    lmax: int = 4
    lambda_min: float = 1.0
    lambda_max: float = 8.0
    lambda_steps: int = 15
    bins: int = concentration.DEFAULT_BINS
    out: str = "-"
    format: str = "csv"
    workers: int = 0

    def validate(self):
        LatticeShape(self.D, self.L)
        if self.N < 1:
            raise ValueError("matrix size N must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.samples < 0:
            raise ValueError("samples must be non-negative")
        if self.command in ("histogram", "moments") and self.samples < 1:
            raise ValueError(f"{self.command} needs samples >= 1")
        if self.command == "histogram" and self.samples < 1000:
            raise ValueError("histogram reports a KS statistic and needs samples >= 1000")
        if self.command == "moments" and not 1 <= self.lmax <= 8:
            raise ValueError("lmax must lie in 1..8")
        if self.command == "pairings" and self.lmax < 0:
            raise ValueError("lmax must be non-negative")
        if not 0 < self.lambda_min <= self.lambda_max:
            raise ValueError("need 0 < lambda_min <= lambda_max")
        if self.lambda_steps < 1:
            raise ValueError("lambda_steps must be >= 1")
        if self.bins < 1:
            raise ValueError("bins must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.workers < 0:
            raise ValueError("workers must be >= 0 (0 = all cores)")

    @property
    def shape(self):
        return LatticeShape(self.D, self.L)

    def provenance(self):
        """Config echoed into output headers; excludes fields that cannot change results."""
        d = asdict(self)
        for k in ("out", "workers"):
            d.pop(k)
        return d


_CASTS = {"int": int, "float": float, "str": str}
_FIELD_TYPES = {f.name: _CASTS.get(f.type, f.type) for f in fields(RunConfig)}
# config files may also use the command-line spellings
_ALIASES = {"dim": "D", "extent": "L", "matrix_size": "N"}


def parse_config_text(text):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split(sep, 1))
        key = key.replace("-", "_")
        key = _ALIASES.get(key, key)
        if key not in _FIELD_TYPES or key == "command":
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _FIELD_TYPES[key](val)
    return values


# -- output -----------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(cfg, columns, rows, extra=None):
    header = cfg.provenance()
    if extra:
        header.update(extra)
    if cfg.format == "json":
        return json.dumps({"config": header, "columns": columns, "rows": rows}, indent=2) + "\n"
    buf = io.StringIO()
    for k, v in header.items():
        buf.write(f"# {k}={_fmt(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def emit(cfg, text):
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# -- commands -----------------------------------------------------------------------

def cmd_histogram(cfg):
    batch = concentration.sample_t(cfg.shape, cfg.N, cfg.samples, cfg.seed, cfg.workers or None)
    h = concentration.histogram(batch, bins=cfg.bins)
    centers = 0.5 * (h.edges[:-1] + h.edges[1:])
    gauss = concentration.gaussian_limit_density(centers, batch.K, batch.D)
    rows = [
        {"bin_lo": float(lo), "bin_hi": float(hi), "count": int(c), "density": float(d), "gaussian_density": float(g)}
        for lo, hi, c, d, g in zip(h.edges[:-1], h.edges[1:], h.counts, h.density, gauss)
    ]
    extra = {"ks_statistic": concentration.ks_statistic(batch), "outside": h.outside, "in_range": h.total}
    emit(cfg, render(cfg, HISTOGRAM_COLUMNS, rows, extra))
    return 0


def cmd_moments(cfg):
    shape = cfg.shape
    batch = concentration.sample_t(shape, cfg.N, cfg.samples, cfg.seed, cfg.workers or None)
    rows = []
    for rep in concentration.empirical_moments(batch, cfg.lmax):
        try:
            exact = float(moments.exact_moment_t(rep.l, shape, cfg.N) * cfg.N**rep.l)
        except ValueError:
            exact = None
        rows.append({
            "l": rep.l, "empirical": rep.value, "stderr": rep.error, "target_m_l": rep.target,
            "N": rep.N, "D": rep.D, "L": rep.L, "K": rep.K, "seed": cfg.seed,
            "exact_t_moment": exact,
            "allowance": concentration.moment_allowance(rep.l, rep.N, rep.K, rep.D),
            "pass": concentration.moment_passes(rep),
        })
    emit(cfg, render(cfg, MOMENT_COLUMNS, rows))
    return 0 if all(r["pass"] for r in rows) else 1


def cmd_pairings(cfg):
    shape = cfg.shape
    rows = []
    for l in range(cfg.lmax + 1):
        closed = pairings.count_pairings_closed(l, shape.K, shape.D)
        try:
            brute = pairings.count_pairings_bruteforce(l, shape)
        except ValueError:
            brute = None
        rows.append({"l": l, "D": shape.D, "L": shape.L, "K": shape.K, "closed": closed, "brute": brute,
                     "match": None if brute is None else closed == brute})
        print(f"l={l} closed={closed} brute={'n/a' if brute is None else brute} "
              f"match={_fmt(rows[-1]['match']) or 'n/a'}", file=sys.stderr)
    emit(cfg, render(cfg, PAIRING_COLUMNS, rows))
    return 0 if all(r["match"] is not False for r in rows) else 1


def cmd_free_energy(cfg):
    shape = cfg.shape
    grid = np.linspace(cfg.lambda_min, cfg.lambda_max, cfg.lambda_steps)
    reports = thermo.free_energy_sweep(grid, shape, cfg.N, cfg.samples, cfg.seed, cfg.workers or None)
    rows = []
    for r in reports:
        rows.append({
            "lambda": r.lam, "D": r.D, "L": r.L, "K": r.K, "N": r.N,
            "f_gaussian": r.f_gaussian, "f_weak": r.f_weak, "f_mc": r.f_mc, "f_mc_stderr": r.f_mc_stderr,
            "f_reference": r.f_reference, "warnings": "; ".join(r.warnings),
            "reference_branch": r.reference_branch,
            "gaussian_density": r.density(r.f_gaussian), "weak_density": r.density(r.f_weak),
            "mc_density": r.density(r.f_mc), "reference_density": r.density(r.f_reference),
            "gaussian_matches_reference": r.gaussian_matches_reference,
        })
    emit(cfg, render(cfg, FREE_ENERGY_COLUMNS, rows))
    return 0


def cmd_sample_config(cfg):
    conf = random_config(cfg.shape, cfg.N, RngStream(cfg.seed, 0))
    emit(cfg, json.dumps(config_to_dict(conf)) + "\n")
    return 0


def cmd_verify(cfg, checks=None):
    results = run_checks(checks, out=lambda line: print(line, flush=True))
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
        return 1
    print(f"all {len(results)} checks passed")
    return 0


COMMANDS = {
    "histogram": cmd_histogram,
    "moments": cmd_moments,
    "pairings": cmd_pairings,
    "free-energy": cmd_free_energy,
    "sample-config": cmd_sample_config,
    "verify": cmd_verify,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--dim", dest="D", type=int)
    common.add_argument("--extent", dest="L", type=int)
    common.add_argument("--matrix-size", dest="N", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--lmax", type=int)
    common.add_argument("--lambda-min", dest="lambda_min", type=float)
    common.add_argument("--lambda-max", dest="lambda_max", type=float)
    common.add_argument("--lambda-steps", dest="lambda_steps", type=int)
    common.add_argument("--bins", type=int)
    common.add_argument("--out")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--workers", type=int)

    parser = argparse.ArgumentParser(prog="ymconc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "verify":
            p.add_argument("--checks", nargs="*", help="check numbers to run (default: all)")
    return parser


def make_config(args):
    cfg = RunConfig(command=args.command)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            for k, v in parse_config_text(fh.read()).items():
                setattr(cfg, k, v)
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if f.name != "command" and v is not None:
            setattr(cfg, f.name, v)
    cfg.validate()
    return cfg


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
    except (OSError, ValueError) as exc:
        print(f"ymconc {args.command}: {exc}", file=sys.stderr)
        return 2
    if args.command == "verify":
        return cmd_verify(cfg, args.checks)
    try:
        return COMMANDS[args.command](cfg)
    except ValueError as exc:
        print(f"ymconc {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
