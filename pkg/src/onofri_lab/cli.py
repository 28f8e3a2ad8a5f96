"""Command-line entry point: ``onofri-lab <command> [options]``."""

from __future__ import annotations

import argparse
import sys

from .experiments import COMMANDS, RunConfig, run
from .quadrature import QuadratureConfig


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text: str) -> tuple:
    return tuple(int(float(x)) for x in text.split(",") if x.strip())


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# option name -> (parser, destination)
OPTIONS = {
    "n": (int, "n"),
    "n-list": (_ints, "n_list"),
    "seed": (int, "seed"),
    "abs-tol": (float, "abs_tol"),
    "rel-tol": (float, "rel_tol"),
    "max-subdivisions": (int, "max_subdivisions"),
    "infinite-transform": (str, "infinite_transform"),
    "r-list": (_floats, "r_list"),
    "k-list": (_ints, "k_list"),
    "K-list": (_ints, "K_list"),
    "lambda-list": (_floats, "lambda_list"),
    "samples": (int, "samples"),
    "descent": (_bool, "descent"),
    "descent-steps": (int, "descent_steps"),
    "final-gap-tol": (float, "final_gap_tol"),
    "profile": (str, "profile"),
    "out": (str, "out_dir"),
}
_QUAD_KEYS = ("abs_tol", "rel_tol", "max_subdivisions", "infinite_transform")


def read_config_file(path) -> dict:
    """Parse ``key=value`` lines; '#' starts a comment. Keys use flag names."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("_", "-")
            if key not in OPTIONS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            parse, dest = OPTIONS[key]
            out[dest] = parse(value)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="onofri-lab",
                                description="Numerical checks of the radial Onofri and "
                                            "Carleson-Chang inequalities.")
    p.add_argument("command", choices=sorted(COMMANDS) + sorted(c.replace("-", "_")
                                                                  for c in COMMANDS))
    for name, (parse, dest) in OPTIONS.items():
        p.add_argument(f"--{name}", dest=dest, type=parse, default=None)
    p.add_argument("--config", default=None, help="file of key=value lines overriding flags")
    p.add_argument("--quiet", action="store_true", help="print only the pass/fail line")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {dest: getattr(args, dest) for _, dest in OPTIONS.values()}
    if args.config:
        values.update(read_config_file(args.config))
    quad = {k: values.pop(k) for k in _QUAD_KEYS if values.get(k) is not None}
    for k in _QUAD_KEYS:
        values.pop(k, None)
    fields = {k: v for k, v in values.items() if v is not None}
    return RunConfig(command=args.command, quadrature=QuadratureConfig(**quad), **fields)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    report = run(cfg)
    if not args.quiet:
        print(report.to_json())
    status = "PASS" if report.passed else "FAIL"
    print(f"{report.command}: {status} ({len(report.cases)} cases, "
          f"{len(report.failed_cases())} failed, {report.wall_ms:.0f} ms)", file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
