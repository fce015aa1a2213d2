import argparse
import csv
import io
import logging
import os
import sys

from .career import read_trajectory_csv, trajectory, trajectory_to_csv, trajectory_to_json
from .constants import DEFAULT_BOOTSTRAP_REPS, DEFAULT_SEED, DEFAULT_WORK_THRESHOLD, SEED_ENV_VAR
from .corpus import IngestOptions, composer_works, corpus_to_json, load_corpus, validate
from .diagram import (
    Normalization,
    aggregate_point,
    fractions_to_csv,
    fractions_to_json,
    mode_fractions,
    points_to_csv,
    points_to_json,
    read_fractions_csv,
    read_points_csv,
    weighted_point,
    weights_from_distribution,
)
from .exceptions import ChromaticaError, RowError
from .keycalc import format_key
from .render import PlotKind, default_spec, render
from .stats import (
    Candidate,
    ClusterCut,
    Linkage,
    Metric,
    Scale,
    cluster,
    cluster_to_json,
    corpus_degrees,
    cvm_test,
    distribution,
    gof_to_json,
    histogram,
    histogram_to_csv,
    histogram_to_json,
    read_histogram_csv,
)
from .utils import atomic_write

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

NORMALIZATIONS = {"total": Normalization.TOTAL_COUNT, "permode": Normalization.PER_MODE_COUNT}
RENDER_KINDS = {
    "diagram": PlotKind.DIAGRAM_SCATTER,
    "fractions": PlotKind.FRACTION_SCATTER,
    "histogram": PlotKind.HISTOGRAM_PAIR,
    "trajectory": PlotKind.TRAJECTORY_PATH,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags, ours is 1
    def error(self, message):
        raise UsageError(message)


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        atomic_write(path, text)


def _emit(args, csv_text, json_text):
    wants_json = args.out is not None and args.out.lower().endswith(".json")
    _write(args.out, json_text() if wants_json else csv_text())


def _rows_to_csv(header, rows):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def _load(args):
    options = IngestOptions(strict=args.strict, extended_range=args.extended_range)
    return load_corpus(args.corpus, options)


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is None or env.strip() == "":
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV_VAR} must be an integer, not '{env}'") from None


def _svg(args, data, kind, labels=None):
    if args.svg is not None:
        atomic_write(args.svg, render(data, default_spec(kind), labels))


def _points(args, corpus):
    normalization = NORMALIZATIONS[args.normalization]
    if args.composer is not None:
        ids = [args.composer]
    else:
        ids = [c for c in corpus.composer_ids if composer_works(corpus, c)]
    if not args.weighted:
        return [aggregate_point(corpus, cid, normalization) for cid in ids]
    scale = Scale.PERCENTAGE if args.percentage else Scale.PROBABILITY
    weights = weights_from_distribution(distribution(histogram(corpus), scale))
    return [weighted_point(corpus, cid, weights, normalization, args.renormalize) for cid in ids]


def cmd_validate(args):
    corpus = _load(args)
    diagnostics = list(corpus.diagnostics) + validate(corpus, args.threshold)
    print(
        f"works={len(corpus.works)} composers={len(corpus.composers)} major={corpus.major_count} "
        f"minor={corpus.minor_count} diagnostics={len(diagnostics)}"
    )
    for d in diagnostics:
        print(f"{d.composer_id or '-'}: {d}")
    if args.out is not None:
        rows = [(d.kind, d.composer_id or "", d.catalog_id or "", d.line or "", d.message) for d in diagnostics]
        _emit(
            args,
            lambda: _rows_to_csv(("kind", "composer", "catalog_id", "line", "message"), rows),
            lambda: corpus_to_json(corpus),
        )
    return EXIT_OK


def cmd_degrees(args):
    corpus = _load(args)
    works = [w for w in corpus.works if args.composer is None or w.composer_id == args.composer]
    if args.composer is not None:
        corpus.composer(args.composer)
    rows = [(w.composer_id, w.catalog_id, format_key(w.key), w.degree) for w in works]
    _write(args.out, _rows_to_csv(("composer", "catalog_id", "key", "degree"), rows))
    return EXIT_OK


def cmd_histogram(args):
    corpus = _load(args)
    h = histogram(corpus, args.composer)
    _emit(args, lambda: histogram_to_csv(h), lambda: histogram_to_json(h))
    _svg(args, read_histogram_csv(histogram_to_csv(h)), PlotKind.HISTOGRAM_PAIR)
    return EXIT_OK


def cmd_fractions(args):
    corpus = _load(args)
    ids = [args.composer] if args.composer is not None else list(corpus.composer_ids)
    fractions = [mode_fractions(corpus, cid) for cid in ids]
    _emit(args, lambda: fractions_to_csv(fractions), lambda: fractions_to_json(fractions))
    _svg(args, read_fractions_csv(fractions_to_csv(fractions)), PlotKind.FRACTION_SCATTER)
    return EXIT_OK


def cmd_diagram(args):
    corpus = _load(args)
    points = _points(args, corpus)
    _emit(args, lambda: points_to_csv(points), lambda: points_to_json(points))
    # Render what a reader of the CSV would see, so `render` on that CSV gives the same bytes
    _svg(args, read_points_csv(points_to_csv(points)), PlotKind.DIAGRAM_SCATTER, corpus.labels())
    return EXIT_OK


def cmd_career(args):
    if args.composer is None:
        raise UsageError("career needs --composer")
    corpus = _load(args)
    t = trajectory(corpus, args.composer, NORMALIZATIONS[args.normalization], cumulative=not args.per_year)
    _emit(args, lambda: trajectory_to_csv(t), lambda: trajectory_to_json(t))
    _svg(args, read_trajectory_csv(trajectory_to_csv(t), t.normalization), PlotKind.TRAJECTORY_PATH)
    return EXIT_OK


def cmd_cluster(args):
    corpus = _load(args)
    points = _points(args, corpus)
    result = cluster(
        points,
        linkage=Linkage(args.linkage.capitalize()),
        cut=ClusterCut.parse(args.cut),
        metric=Metric(args.metric.capitalize()),
    )
    rows = sorted(result.assignments.items())
    _emit(args, lambda: _rows_to_csv(("composer", "cluster"), rows), lambda: cluster_to_json(result))
    _svg(args, read_points_csv(points_to_csv(points)), PlotKind.DIAGRAM_SCATTER, corpus.labels())
    return EXIT_OK


def cmd_gof(args):
    corpus = _load(args)
    result = cvm_test(
        corpus_degrees(corpus, args.composer),
        candidate=Candidate(args.candidate.capitalize()),
        bootstrap_reps=args.reps,
        seed=_seed(args),
    )
    _write(args.out, gof_to_json(result))
    return EXIT_OK


def cmd_render(args):
    if args.input is None or args.svg is None:
        raise UsageError("render needs --input and --svg")
    try:
        with open(args.input, "r", encoding="utf-8", newline="") as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise UsageError(f"cannot read '{args.input}': {e}") from e

    kind = RENDER_KINDS[args.kind]
    readers = {
        PlotKind.DIAGRAM_SCATTER: read_points_csv,
        PlotKind.FRACTION_SCATTER: read_fractions_csv,
        PlotKind.HISTOGRAM_PAIR: read_histogram_csv,
        PlotKind.TRAJECTORY_PATH: read_trajectory_csv,
    }
    # Index labels come from a corpus when one is given, else they are assigned alphabetically
    labels = _load(args).labels() if args.corpus is not None else None
    atomic_write(args.svg, render(readers[kind](text), default_spec(kind), labels))
    return EXIT_OK


COMMANDS = {
    "validate": (cmd_validate, "check a corpus against the inclusion rules"),
    "degrees": (cmd_degrees, "list the degree of every work"),
    "histogram": (cmd_histogram, "degree histogram and distribution P(k)"),
    "fractions": (cmd_fractions, "major/minor fractions per composer"),
    "diagram": (cmd_diagram, "composer points on the chromatic diagram"),
    "career": (cmd_career, "cumulative-mean trajectory of one composer"),
    "cluster": (cmd_cluster, "agglomerative clustering of composer points"),
    "gof": (cmd_gof, "Cramér-von Mises test of the degree distribution"),
    "render": (cmd_render, "draw a previously exported CSV as SVG"),
}


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--corpus", help="corpus CSV or normalized JSON cache")
    common.add_argument("--composer", help="restrict to one composer id")
    common.add_argument("--out", help="output path, .json selects JSON (default: CSV on stdout)")
    common.add_argument("--svg", help="also draw the result to this SVG file")
    common.add_argument("--weighted", action="store_true", help="weight degrees by the corpus distribution P(k)")
    common.add_argument("--renormalize", action="store_true", help="divide weighted sums by the applied weights")
    common.add_argument("--percentage", action="store_true", help="weights P(k) in percent, not probabilities")
    common.add_argument("--normalization", choices=sorted(NORMALIZATIONS), default="total")
    common.add_argument("--per-year", action="store_true", help="per-year instead of cumulative means")
    common.add_argument("--linkage", choices=["complete", "single", "average"], default="complete")
    common.add_argument("--cut", default="k=2", help="k=<clusters> or h=<height>")
    common.add_argument("--metric", choices=["planar", "torus"], default="planar")
    common.add_argument("--candidate", choices=["normal", "cauchy", "poisson"], default="normal")
    common.add_argument("--reps", type=int, default=DEFAULT_BOOTSTRAP_REPS, help="bootstrap replicates")
    common.add_argument("--seed", type=int, default=None, help=f"bootstrap seed (default: ${SEED_ENV_VAR} or 0)")
    common.add_argument("--threshold", type=int, default=DEFAULT_WORK_THRESHOLD, help="minimum works per composer")
    common.add_argument("--extended-range", action="store_true", help="admit double accidentals, degrees up to ±14")
    common.add_argument("--input", help="CSV written by another subcommand (render only)")
    common.add_argument("--kind", choices=sorted(RENDER_KINDS), default="diagram", help="plot kind (render only)")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    strictness = common.add_mutually_exclusive_group()
    strictness.add_argument("--strict", dest="strict", action="store_true", default=True, help="fail on bad rows")
    strictness.add_argument("--lenient", dest="strict", action="store_false", help="skip bad rows with a diagnostic")

    parser = _Parser(prog="chromatica", description="Key-signature statistics on the chromatic diagram.")
    sub = parser.add_subparsers(dest="command", metavar="<subcommand>")
    sub.required = True
    for name, (func, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(func=func)
    return parser


def run(argv):
    """
    Runs one subcommand.  Outputs go only to the paths given by flags (or stdout), inputs are never modified.

    :param argv: list of command line arguments, without the program name
    :return: exit status, 0 on success, 1 on usage or file errors, 2 on bad corpus rows in strict mode
    """
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"chromatica: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        if args.command != "render" and args.corpus is None:
            raise UsageError(f"{args.command} needs --corpus")
        return args.func(args)
    except RowError as e:
        print(f"chromatica: error: {args.corpus}:{e.line}: {e.cause}", file=sys.stderr)
        return EXIT_DATA
    except (UsageError, ChromaticaError) as e:
        print(f"chromatica: error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run(sys.argv[1:]))
