"""``qubitrecon`` command line.

Exit codes: 0 ok, 1 parse error, 2 not CP, 3 inconsistent records,
4 degenerate records, 5 channel not unital. Payloads go to stdout,
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .core import AffineChannel
from .cp import EPS_CP, certify_cp
from .errors import DegenerateDataError, InconsistentDataError, NotUnitalError
from .io import ParseError, channel_to_dict, cloud_csv, dumps, parse_channel, parse_records
from .metrics import DEFAULT_SAMPLES, Measure, average_distance, capacity_mu, image_cloud, unital_capacity
from .reconstruct import ReconstructionOptions, estimate
from .search import RESTARTS

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_NOT_CP = 2
EXIT_INCONSISTENT = 3
EXIT_DEGENERATE = 4
EXIT_NOT_UNITAL = 5


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_check(args) -> int:
    ch = parse_channel(args.channel)
    cert = certify_cp(ch, args.tol)
    sys.stdout.write(dumps({"channel": channel_to_dict(ch), "certificate": cert.to_dict()}) + "\n")
    return EXIT_OK if cert.is_cp else EXIT_NOT_CP


def cmd_reconstruct(args) -> int:
    rf = parse_records(args.records)
    tol = args.tol if args.tol is not None else (rf.tolerance if rf.tolerance is not None else EPS_CP)
    opts = ReconstructionOptions(seed=args.seed, restarts=args.restarts, tol=tol, refine6=args.refine6)
    report = estimate(list(rf.records), opts)
    payload = report.to_dict()
    if rf.label is not None:
        payload = {"label": rf.label, **payload}
    if args.samples:
        d = average_distance(
            report.estimate, AffineChannel.total_contraction(), args.samples, Measure.parse(args.measure), args.seed
        )
        payload["distance_to_total_contraction"] = d.to_dict()
    if args.output:
        Path(args.output).write_text(dumps(channel_to_dict(report.estimate)) + "\n")
    sys.stdout.write(dumps(payload) + "\n")
    return EXIT_OK


def cmd_distance(args) -> int:
    a = parse_channel(args.channel_a)
    b = parse_channel(args.channel_b)
    d = average_distance(a, b, args.samples, Measure.parse(args.measure), args.seed)
    sys.stdout.write(dumps(d.to_dict()) + "\n")
    return EXIT_OK


def cmd_capacity(args) -> int:
    ch = parse_channel(args.channel)
    cap = unital_capacity(ch)
    sys.stdout.write(dumps({"mu": capacity_mu(ch), "capacity": cap}) + "\n")
    return EXIT_OK


def cmd_ellipsoid(args) -> int:
    if args.n < 1:
        raise ParseError("--n must be at least 1")
    ch = parse_channel(args.channel)
    _emit(cloud_csv(image_cloud(ch, args.n)), args.output)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the parse-error code, keeping 2 free for "not CP"."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qubitrecon", description="Qubit channel checks and reconstruction.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="certify complete positivity of a channel file")
    p.add_argument("channel")
    p.add_argument("--tol", type=float, default=EPS_CP, help="Choi eigenvalue tolerance")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reconstruct", help="estimate a channel from a record file")
    p.add_argument("records")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=RESTARTS)
    p.add_argument("--tol", type=float, default=None, help="CP tolerance (default: file metadata or 1e-9)")
    p.add_argument("--refine6", action="store_true", help="also run the unrestricted search and keep it if better")
    p.add_argument("--samples", type=int, default=0, help="if > 0, report the estimate's distance to I/2")
    p.add_argument("--measure", choices=("ball", "sphere"), default="ball")
    p.add_argument("--output", help="write the estimate as a channel file here")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("distance", help="Monte-Carlo average distance of two channels")
    p.add_argument("channel_a")
    p.add_argument("channel_b")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--measure", choices=("ball", "sphere"), default="ball")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("capacity", help="capacity of a unital channel")
    p.add_argument("channel")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("ellipsoid", help="CSV image of the Bloch sphere")
    p.add_argument("channel")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--output", help="write the CSV here instead of stdout")
    p.set_defaults(func=cmd_ellipsoid)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "distance" and args.samples < 1:
        parser.error("--samples must be at least 1")
    if args.command == "reconstruct" and args.samples < 0:
        parser.error("--samples must be non-negative")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InconsistentDataError as exc:
        print(f"inconsistent records: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except DegenerateDataError as exc:
        print(f"degenerate records: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except NotUnitalError as exc:
        print(f"not unital: {exc}", file=sys.stderr)
        return EXIT_NOT_UNITAL


if __name__ == "__main__":
    sys.exit(main())
