"""Command line interface: ``frobtrace <mode> [options]``.

Options may also come from a flat ``key = value`` file given with
``--config``; command-line flags override file values.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import MODES, ExperimentConfig, run
from .report import emit, to_json

# config-file keys and how to parse them
_KEYS = {
    "char": ("characteristic", int),
    "ext": ("ext_degree", int),
    "p": ("p", int),
    "d": ("degrees", lambda s: tuple(int(x) for x in s.replace(",", " ").split())),
    "genus": ("genus", int),
    "jk": ("jk", lambda s: tuple(_pair(x) for x in s.split())),
    "trunc": ("trunc", int),
    "workers": ("workers", int),
    "budget": ("budget", lambda s: int(float(s))),
    "samples": ("samples", int),
    "seed": ("seed", int),
    "n": ("n", int),
    "affine": ("affine", lambda s: s.strip().lower() in ("1", "true", "yes")),
    "out": ("out", str),
    "format": ("format", str),
}


def _pair(text: str) -> tuple[int, int]:
    j, k = text.split(",")
    return int(j), int(k)


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in _KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        name, parse = _KEYS[key]
        values[name] = parse(value)
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frobtrace",
        description="Traces of Frobenius for cyclic covers Y^p = F(X) over small finite fields.",
    )
    parser.add_argument("mode", choices=MODES, help="experiment to run")
    parser.add_argument("--config", type=Path, help="flat key = value file; flags override its values")
    parser.add_argument("--char", type=int, help="field characteristic (default 7)")
    parser.add_argument("--ext", type=int, help="extension degree, q = char^ext (default 1)")
    parser.add_argument("--p", type=int, help="cover degree p (default 3)")
    parser.add_argument("--d", type=int, action="append",
                        help="factor degree d_i; repeat for d_1, d_2, ... (default 4 2 for p=3)")
    parser.add_argument("--genus", type=int, help="genus (hyperelliptic and zeta-check modes)")
    parser.add_argument("--jk", type=_pair, action="append", help="moment order j,k; repeatable")
    parser.add_argument("--trunc", type=int, help="Euler product truncation degree (default 12)")
    parser.add_argument("--workers", type=int, help="worker processes (default 1)")
    parser.add_argument("--budget", type=float, help="max polynomial evaluations (default 1e8)")
    parser.add_argument("--samples", type=int, help="curves per family in zeta-check (default 20)")
    parser.add_argument("--seed", type=int, help="sampling seed (default 0)")
    parser.add_argument("--n", type=int, help="number of variables in rv-model (default q+1)")
    parser.add_argument("--affine", action="store_true", default=None,
                        help="affine sums over monic F_(d) instead of the closed family")
    parser.add_argument("--out", help="output directory; without it the JSON report goes to stdout")
    parser.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values = read_config_file(args.config) if args.config else {}
    flags = {
        "characteristic": args.char,
        "ext_degree": args.ext,
        "p": args.p,
        "degrees": tuple(args.d) if args.d else None,
        "genus": args.genus,
        "jk": tuple(args.jk) if args.jk else None,
        "trunc": args.trunc,
        "workers": args.workers,
        "budget": int(args.budget) if args.budget is not None else None,
        "samples": args.samples,
        "seed": args.seed,
        "n": args.n,
        "affine": args.affine,
        "out": args.out,
        "format": args.format,
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    return ExperimentConfig(mode=args.mode, **values)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        config.validate()
    except (ValueError, OSError) as exc:
        parser.error(str(exc))
    try:
        report = run(config)
    except (ValueError, OSError) as exc:
        print(f"frobtrace: error: {exc}", file=sys.stderr)
        return 2
    if config.out:
        for path in emit(report, config.out, config.format):
            print(path)
    else:
        sys.stdout.write(to_json(report))
    for failure in report.failures():
        print(f"FAILED: {failure['statement']}", file=sys.stderr)
    if not report.complete:
        print("report incomplete: budget exceeded", file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
