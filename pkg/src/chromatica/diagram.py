import csv
import enum
import io
import json
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import TORUS_PERIOD
from .corpus import composer_works
from .exceptions import EmptyCatalog, InvalidArgument, MissingWeight
from .keycalc import Mode
from .utils import format_number, read_export_csv

logger = logging.getLogger(__name__)


class Weighting(str, enum.Enum):
    UNWEIGHTED = "Unweighted"
    DISTRIBUTION_WEIGHTED = "DistributionWeighted"

    def __str__(self):
        return self.value


class Normalization(str, enum.Enum):
    TOTAL_COUNT = "TotalCount"
    PER_MODE_COUNT = "PerModeCount"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class DiagramPoint:
    x: float
    y: float
    composer_id: str
    weighting: Weighting = Weighting.UNWEIGHTED
    normalization: Normalization = Normalization.TOTAL_COUNT
    year_cutoff: Optional[int] = None

    @property
    def xy(self):
        return self.x, self.y


@dataclass(frozen=True)
class ModeFraction:
    major_fraction: float
    minor_fraction: float
    composer_id: str


@dataclass(frozen=True)
class TorusMetricConfig:
    period: int = TORUS_PERIOD

    def __post_init__(self):
        if self.period < 1:
            err_msg = f"Torus period must be at least 1, not {self.period}"
            logger.error(err_msg)
            raise InvalidArgument(err_msg)


def _nonempty_works(corpus, composer_id):
    works = composer_works(corpus, composer_id)
    if not works:
        err_msg = f"Composer '{composer_id}' has no works"
        logger.error(err_msg)
        raise EmptyCatalog(err_msg)
    return works


def _mode_arrays(works, values):
    # Split a per-work value array into its major and minor parts
    major = np.array([w.mode is Mode.MAJOR for w in works], dtype=bool)
    return values[major], values[~major]


def _divide(total, count):
    # An empty mode sits on its axis
    return total / count if count else 0.0


def aggregate_point(corpus, composer_id, normalization=Normalization.TOTAL_COUNT, year_cutoff=None):
    """
    Arithmetic mean of a composer's major and minor degrees as a point on the chromatic diagram.

    With TotalCount normalization both sums are divided by the composer's total number of works, so the six works
    of 1761 (C, C, C, G, F, F) give (-1/6, 0).  With PerModeCount each sum is divided by the number of works in its own
    mode and a mode without works gives 0.

    :param corpus: Corpus
    :param composer_id: composer id
    :param normalization: Normalization
    :param year_cutoff: recorded on the point, the caller is responsible for slicing
    :return: DiagramPoint
    """
    normalization = Normalization(normalization)
    works = _nonempty_works(corpus, composer_id)
    degrees = np.array([w.degree for w in works], dtype=np.int64)
    major, minor = _mode_arrays(works, degrees)

    if normalization is Normalization.TOTAL_COUNT:
        x = _divide(int(major.sum()), len(works))
        y = _divide(int(minor.sum()), len(works))
    else:
        x = _divide(int(major.sum()), major.size)
        y = _divide(int(minor.sum()), minor.size)

    logger.debug(f"Aggregate point for {composer_id}: ({x}, {y}) over {len(works)} works ({normalization})")
    return DiagramPoint(float(x), float(y), composer_id, Weighting.UNWEIGHTED, normalization, year_cutoff)


def weights_from_distribution(distribution):
    """
    Expands a degree distribution into weights for every (degree, mode) pair, both modes sharing the pooled value.

    :param distribution: DegreeDistribution (or a plain mapping of degree to weight)
    :return: dict of (degree, Mode) to weight
    """
    p = getattr(distribution, "p", distribution)
    return {(d, mode): float(v) for d, v in p.items() for mode in Mode}


def _weight(weights, d, mode):
    try:
        return weights[(d, mode)]
    except KeyError:
        err_msg = f"Weights have no entry for degree {d} ({mode.value})"
        logger.error(err_msg)
        raise MissingWeight(d, mode) from None


def weighted_point(corpus, composer_id, weights=None, normalization=Normalization.TOTAL_COUNT, renormalize=False):
    """
    Mean degree weighted by a distribution P over (degree, mode): x = Σ_major P(k) d(k) / T and likewise for y.  By
    default the sums are not divided by the total weight; renormalize=True divides by Σ P(k) over the composer's works
    instead of T (never the default).

    The default weights are probabilities, so the point is 1/100 of the one computed with P(k) in percent.  Pass
    weights built from Scale.PERCENTAGE to get the percentage scale.

    :param corpus: Corpus
    :param composer_id: composer id
    :param weights: mapping (degree, Mode) -> weight, defaults to the combined probability distribution of the corpus
    :param normalization: Normalization, TotalCount divides by T and PerModeCount by the mode's work count
    :param renormalize: divide by the applied weights instead of the work counts
    :return: DiagramPoint
    """
    normalization = Normalization(normalization)
    works = _nonempty_works(corpus, composer_id)
    if weights is None:
        from .stats import Scale, distribution, histogram

        weights = weights_from_distribution(distribution(histogram(corpus), Scale.PROBABILITY))

    degrees = np.array([w.degree for w in works], dtype=np.float64)
    p = np.array([_weight(weights, w.degree, w.mode) for w in works], dtype=np.float64)
    major_pd, minor_pd = _mode_arrays(works, p * degrees)
    major_p, minor_p = _mode_arrays(works, p)

    if renormalize and normalization is Normalization.TOTAL_COUNT:
        x_div = y_div = p.sum()
    elif renormalize:
        x_div, y_div = major_p.sum(), minor_p.sum()
    elif normalization is Normalization.TOTAL_COUNT:
        x_div = y_div = len(works)
    else:
        x_div, y_div = major_pd.size, minor_pd.size

    x = _divide(float(major_pd.sum()), x_div)
    y = _divide(float(minor_pd.sum()), y_div)
    return DiagramPoint(float(x), float(y), composer_id, Weighting.DISTRIBUTION_WEIGHTED, normalization)


def composer_points(corpus, normalization=Normalization.TOTAL_COUNT, weights=None, weighted=False):
    """
    One diagram point per composer with at least one work, in composer order.

    :param corpus: Corpus
    :param normalization: Normalization
    :param weights: weights for weighted points (implies weighted)
    :param weighted: use the corpus distribution as weights when no weights are given
    :return: list of DiagramPoint
    """
    ids = [cid for cid in corpus.composer_ids if composer_works(corpus, cid)]
    if weighted or weights is not None:
        if weights is None:
            from .stats import Scale, distribution, histogram

            weights = weights_from_distribution(distribution(histogram(corpus), Scale.PROBABILITY))
        return [weighted_point(corpus, cid, weights, normalization) for cid in ids]
    return [aggregate_point(corpus, cid, normalization) for cid in ids]


def mode_fractions(corpus, composer_id):
    """
    Share of a composer's works in major and in minor.  The minor share is the complement of the major share, so the
    two always sum to exactly one.

    :param corpus: Corpus
    :param composer_id: composer id
    :return: ModeFraction
    """
    works = _nonempty_works(corpus, composer_id)
    majors = sum(1 for w in works if w.mode is Mode.MAJOR)
    major_fraction = majors / len(works)
    return ModeFraction(major_fraction, 1.0 - major_fraction, composer_id)


def preference_ratio(f):
    """
    Major-to-minor preference, major_fraction / minor_fraction; infinite for a composer with no minor works.

    :param f: ModeFraction
    :return: float
    """
    if f.minor_fraction == 0:
        return math.inf
    return f.major_fraction / f.minor_fraction


def torus_distance(p, q, cfg=None):
    """
    Euclidean distance on the chromatic torus.  Each axis difference is reduced modulo the period and the shorter way
    round is taken, so degrees 7 and -5 (C# and Db) coincide.

    :param p: DiagramPoint or (x, y)
    :param q: DiagramPoint or (x, y)
    :param cfg: TorusMetricConfig
    :return: distance >= 0
    """
    cfg = cfg or TorusMetricConfig()
    a = np.asarray(getattr(p, "xy", p), dtype=np.float64)
    b = np.asarray(getattr(q, "xy", q), dtype=np.float64)
    delta = np.mod(np.fabs(a - b), cfg.period)
    m = np.minimum(delta, cfg.period - delta)
    return float(np.sqrt(np.sum(m * m)))


POINT_COLUMNS = ("composer", "x", "y", "weighting", "normalization")
FRACTION_COLUMNS = ("composer", "major_fraction", "minor_fraction", "ratio")


def points_to_csv(points):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(POINT_COLUMNS)
    for p in points:
        row = [p.composer_id, format_number(p.x), format_number(p.y)]
        writer.writerow(row + [p.weighting.value, p.normalization.value])
    return out.getvalue()


def points_to_json(points):
    doc = [
        {
            "composer": p.composer_id,
            "x": float(format_number(p.x)),
            "y": float(format_number(p.y)),
            "weighting": p.weighting.value,
            "normalization": p.normalization.value,
            "year_cutoff": p.year_cutoff,
        }
        for p in points
    ]
    return json.dumps(doc, indent=2) + "\n"


def read_points_csv(text):
    """
    Reads points written by points_to_csv.

    :param text: CSV text
    :return: list of DiagramPoint
    """

    def convert(row):
        cid, x, y, w, n = row
        return DiagramPoint(float(x), float(y), cid, Weighting(w), Normalization(n))

    return read_export_csv(text, POINT_COLUMNS, "Diagram point", convert)


def fractions_to_csv(fractions):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(FRACTION_COLUMNS)
    for f in fractions:
        writer.writerow(
            [
                f.composer_id,
                format_number(f.major_fraction),
                format_number(f.minor_fraction),
                format_number(preference_ratio(f)),
            ]
        )
    return out.getvalue()


def _json_ratio(r):
    # JSON has no infinity
    return float(format_number(r)) if math.isfinite(r) else "inf"


def fractions_to_json(fractions):
    doc = [
        {
            "composer": f.composer_id,
            "major_fraction": float(format_number(f.major_fraction)),
            "minor_fraction": float(format_number(f.minor_fraction)),
            "ratio": _json_ratio(preference_ratio(f)),
        }
        for f in fractions
    ]
    return json.dumps(doc, indent=2) + "\n"


def read_fractions_csv(text):
    """
    Reads fractions written by fractions_to_csv.  The minor share is recomputed as the complement of the major share.

    :param text: CSV text
    :return: list of ModeFraction
    """

    def convert(row):
        cid, major = row[0], float(row[1])
        return ModeFraction(major, 1.0 - major, cid)

    return read_export_csv(text, FRACTION_COLUMNS, "Mode fraction", convert)
