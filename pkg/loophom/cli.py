# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""loophom command line: analyze, verify, sample, spectrum and export."""

import argparse
import io
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import jsonschema

from . import __version__ as toolversion
from . import bisfile, experiments
from .error import LoopHomFileError, LoopHomParseError, TheoremViolation
from .filtration import persistence_spectrum
from .homology import boundary_matrices, homology
from .nerve import build_nerve
from .structures import BiSecondaryStructure

log = logging.getLogger()

COMMANDS = ["analyze", "verify", "sample", "spectrum", "export"]
FORMATS = ["json", "text", "complex", "loops"]

DEFAULT_SEED = 42
DEFAULT_N = 50
DEFAULT_COUNT = 1000
DEFAULT_MIN_GAP = 0
DEFAULT_JOBS = 1

EXIT_PARSE = 1
EXIT_THEOREM = 2
EXIT_IO = 3

COUNTEREXAMPLE = "counterexample.bis"
BARS_EXT = ".bars"


@dataclass(frozen=True)
class RunConfig:
    """Validated command line options."""

    command: str
    inputs: Tuple[str, ...] = ()
    random: Optional[int] = None
    n: int = DEFAULT_N
    count: int = DEFAULT_COUNT
    seed: int = DEFAULT_SEED
    min_gap: int = DEFAULT_MIN_GAP
    oracle: bool = False
    swapped_delta: bool = False
    fmt: Optional[str] = None
    output: Optional[str] = None
    jobs: int = DEFAULT_JOBS

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(
            command=args.command,
            inputs=tuple(args.input or ()),
            random=args.random,
            n=args.n,
            count=args.count,
            seed=args.seed,
            min_gap=args.min_gap,
            oracle=args.oracle,
            swapped_delta=args.swapped_delta,
            fmt=args.format,
            output=args.output,
            jobs=args.jobs,
        )


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {value}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {value}")
    return value


def _emit(text: str, output: Optional[str] = None) -> None:
    """Write `text` to the output file, or stdout when none is given."""
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)
        log.info("wrote %s", output)


def _single_input(cfg: RunConfig) -> BiSecondaryStructure:
    if len(cfg.inputs) != 1:
        raise LoopHomParseError(f"{cfg.command} needs exactly one --input file, got {len(cfg.inputs)}")
    return bisfile.read_pair(cfg.inputs[0])


def cmd_analyze(cfg: RunConfig) -> None:
    """
    Homology report of one pair.

    With --output the JSON report goes to the file and the summary line to
    stdout; otherwise --format json prints the report and text the summary.
    """
    pair = _single_input(cfg)
    nerve = build_nerve(pair)
    result = homology(boundary_matrices(nerve))
    report = bisfile.homology_report(nerve, result, persistence_spectrum(nerve))
    summary = f"n={pair.n} betti=({','.join(str(b) for b in result.betti)}) h2_rank={result.h2_rank}\n"
    if cfg.output is not None or cfg.fmt == "json":
        buf = io.StringIO()
        bisfile.dump_report(report, buf)
        _emit(buf.getvalue(), cfg.output)
    if cfg.output is not None or cfg.fmt != "json":
        sys.stdout.write(summary)


def _verify_sources(cfg: RunConfig) -> List[Path]:
    paths: List[Path] = []
    for item in cfg.inputs:
        path = Path(item)
        paths.extend(experiments.corpus_paths(path) if path.is_dir() else [path])
    if not paths and cfg.random is None:
        paths = experiments.corpus_paths()
    return paths


def cmd_verify(cfg: RunConfig) -> bool:
    """
    Lemma, delta-graph and theorem battery over files and/or random pairs.

    Returns True when every theorem-backed check passed. On failure the first
    counterexample is written as a .bis file next to --output (or to the
    working directory).
    """
    options = experiments.VerifyOptions(oracle=cfg.oracle, swapped=cfg.swapped_delta, certificates=True)
    paths = _verify_sources(cfg)
    lines: List[str] = []
    failures = []
    if paths:
        pairs = [bisfile.read_pair(path) for path in paths]
        summary = experiments.verify_pairs(pairs, cfg.seed, options, cfg.jobs)
        lines.append(f"# corpus ({len(paths)} files)")
        lines.extend(summary.lines())
        for record in summary.records:
            for loop_id, outcome in sorted(record.certificates.items()):
                kind = "tree" if outcome.exists else "components"
                items = " ".join("-".join(str(idx) for idx in item) for item in outcome.certificate) or "-"
                lines.append(f"delta {paths[record.index].name} t={loop_id} {kind}={items}")
        failures.append(summary.first_failure)
    if cfg.random is not None:
        options = experiments.VerifyOptions(oracle=cfg.oracle, swapped=cfg.swapped_delta)
        summary = experiments.verify_random(cfg.random, cfg.n, cfg.min_gap, cfg.seed, options, cfg.jobs)
        lines.append(f"# random count={cfg.random} n={cfg.n} min_gap={cfg.min_gap} seed={cfg.seed}")
        lines.extend(summary.lines())
        failures.append(summary.first_failure)

    _emit("\n".join(lines) + "\n", cfg.output)
    failure = next((record for record in failures if record is not None), None)
    if failure is None:
        return True
    target = Path(cfg.output).with_suffix(".counterexample.bis") if cfg.output else Path(COUNTEREXAMPLE)
    bisfile.write_pair(target, failure.pair)
    failed = sorted(name for name, ok in failure.checks.items() if not ok)
    log.error("checks %s failed; counterexample written to %s", ", ".join(failed), target)
    if failure.violation:
        log.error(failure.violation)
    return False


def cmd_sample(cfg: RunConfig) -> None:
    """rank(H2) histogram over uniform random pairs; JSON to --output, table to stdout."""
    histogram = experiments.sample_ranks(cfg.n, cfg.count, cfg.min_gap, cfg.seed, cfg.jobs)
    document = json.dumps(histogram.to_dict(), indent=4, sort_keys=True) + "\n"
    if cfg.output is not None:
        _emit(document, cfg.output)
    if cfg.output is None and cfg.fmt == "json":
        sys.stdout.write(document)
    else:
        sys.stdout.write(histogram.table() + "\n")


def cmd_spectrum(cfg: RunConfig) -> None:
    """
    Per-level Betti table and bars.

    With --output the bars go to a sibling .bars file, or to <output>.bars when
    the output itself ends in .bars.
    """
    nerve = build_nerve(_single_input(cfg))
    spectrum = persistence_spectrum(nerve)
    if cfg.fmt == "json":
        _emit(json.dumps(spectrum.to_dict(), indent=4, sort_keys=True) + "\n", cfg.output)
        return
    table = ["t b0 b1 b2 b3"]
    for t in sorted(spectrum.levels, reverse=True):
        table.append(" ".join(str(value) for value in (t,) + spectrum.levels[t]))
    bars = io.StringIO()
    bisfile.dump_bars(spectrum.bars, bars)
    if cfg.output is None:
        sys.stdout.write("\n".join(table) + "\n# bars\n" + bars.getvalue())
    else:
        output = Path(cfg.output)
        bars_path = output.with_suffix(BARS_EXT)
        if bars_path == output:
            bars_path = output.with_name(output.name + BARS_EXT)
        _emit("\n".join(table) + "\n", cfg.output)
        _emit(bars.getvalue(), str(bars_path))


def cmd_export(cfg: RunConfig) -> None:
    """The nerve as "complex" text (default) or as the loop table (--format loops)."""
    nerve = build_nerve(_single_input(cfg))
    buf = io.StringIO()
    if cfg.fmt == "loops":
        bisfile.dump_loops(nerve, buf)
    else:
        bisfile.dump_complex(nerve, buf)
    _emit(buf.getvalue(), cfg.output)


def main(arg_tuple: Optional[Tuple[str, ...]] = None) -> None:
    """entry-point for the loophom command line"""
    parser = argparse.ArgumentParser(
        description="Loop nerve homology of RNA bi-secondary structures.",
        prog="loophom",
        epilog="exit codes: 1 bad input, 2 theorem violation, failed check or usage error, 3 I/O failure",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", action="append", help="Pair file (.bis or .json); for verify also a directory.")
    parser.add_argument("--random", type=_positive, help="Verify this many uniform random pairs.")
    parser.add_argument("--n", type=_non_negative, default=DEFAULT_N, help="Sequence length of random pairs.")
    parser.add_argument("--count", type=_positive, default=DEFAULT_COUNT, help="Number of sampled pairs.")
    parser.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="Master seed of random pairs.")
    parser.add_argument("--min-gap", type=_non_negative, default=DEFAULT_MIN_GAP, help="Unpaired bases under arcs.")
    parser.add_argument("--oracle", action="store_true", help="Cross-check with brute-force oracles.")
    parser.add_argument("--swapped-delta", action="store_true", help="Also check delta graphs around S-loops.")
    parser.add_argument("--format", choices=FORMATS, help="Output format.")
    parser.add_argument("--output", help="Output file; stdout when omitted.")
    parser.add_argument("--jobs", type=_positive, default=DEFAULT_JOBS, help="Worker processes for verify/sample.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--version", action="version", version=f"%(prog)s {toolversion}")

    # allow pass-in arg_tuple for testing purposes
    args = parser.parse_args(arg_tuple)

    level_lut = {
        0: logging.WARNING,
        1: logging.INFO,
        2: logging.DEBUG,
    }
    logging.basicConfig(level=level_lut[min(args.verbose, 2)])
    cfg = RunConfig.from_args(args)

    handlers = {
        "analyze": cmd_analyze,
        "sample": cmd_sample,
        "spectrum": cmd_spectrum,
        "export": cmd_export,
    }
    try:
        if cfg.command == "verify":
            if not cmd_verify(cfg):
                sys.exit(EXIT_THEOREM)
        else:
            handlers[cfg.command](cfg)
    except (LoopHomParseError, jsonschema.exceptions.ValidationError) as err:
        log.error(f"{' '.join(cfg.inputs) or cfg.command}: {err}")
        sys.exit(EXIT_PARSE)
    except TheoremViolation as err:
        log.error(f"theorem violation: {err}")
        sys.exit(EXIT_THEOREM)
    except (LoopHomFileError, OSError) as err:
        log.error(f"{err}")
        sys.exit(EXIT_IO)


if __name__ == "__main__":
    main()
