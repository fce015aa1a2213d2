import csv
import io
import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from .corpus import composer_works
from .diagram import Normalization
from .exceptions import ChromaticaIOError, NoDatedWorks, TooFewSamples
from .keycalc import Mode
from .utils import format_number, read_export_csv

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrajectorySample:
    year: int
    x: float
    y: float
    cumulative_count: int

    @property
    def point(self):
        return self.x, self.y


@dataclass(frozen=True)
class Trajectory:
    composer_id: str
    normalization: Normalization
    samples: tuple
    undated_count: int = 0
    cumulative: bool = True


def _divide(total, count):
    return int(total) / int(count) if count else 0.0


def trajectory(corpus, composer_id, normalization=Normalization.TOTAL_COUNT, cumulative=True):
    """
    Path of a composer through the chromatic diagram over their career.  There is one sample per year in which the
    composer dated at least one work, and each sample is the diagram point of every work dated up to and including
    that year.  Sums stay integral until the final division, so each sample is exactly what aggregate_point gives on
    the matching year slice.

    With cumulative=False each sample averages only that year's works, which fluctuates far more and is kept for
    comparison.

    :param corpus: Corpus
    :param composer_id: composer id
    :param normalization: Normalization
    :param cumulative: cumulative mean (default) or per-year mean
    :return: Trajectory
    """
    normalization = Normalization(normalization)
    works = composer_works(corpus, composer_id)
    dated = sorted((w for w in works if w.year is not None), key=lambda w: w.year)
    if not dated:
        err_msg = f"Composer '{composer_id}' has no dated works"
        logger.error(err_msg)
        raise NoDatedWorks(err_msg)

    undated = len(works) - len(dated)
    if undated:
        logger.warning(f"{undated} undated works of '{composer_id}' left out of the trajectory")

    years = np.array([w.year for w in dated], dtype=np.int64)
    degrees = np.array([w.degree for w in dated], dtype=np.int64)
    is_major = np.array([w.mode is Mode.MAJOR for w in dated], dtype=bool)

    # Running totals, read off at the last work of each year
    major_sum = np.cumsum(np.where(is_major, degrees, 0))
    minor_sum = np.cumsum(np.where(is_major, 0, degrees))
    major_n = np.cumsum(is_major)
    minor_n = np.cumsum(~is_major)
    distinct = np.unique(years)
    ends = np.searchsorted(years, distinct, side="right") - 1

    samples = []
    previous = -1
    for year, end in zip(distinct, ends):
        maj_s, min_s = major_sum[end], minor_sum[end]
        maj_n, min_n = major_n[end], minor_n[end]
        if not cumulative and previous >= 0:
            maj_s, min_s = maj_s - major_sum[previous], min_s - minor_sum[previous]
            maj_n, min_n = maj_n - major_n[previous], min_n - minor_n[previous]
        previous = end

        if normalization is Normalization.TOTAL_COUNT:
            x, y = _divide(maj_s, maj_n + min_n), _divide(min_s, maj_n + min_n)
        else:
            x, y = _divide(maj_s, maj_n), _divide(min_s, min_n)
        samples.append(TrajectorySample(int(year), x, y, int(end) + 1))

    logger.debug(f"Trajectory for {composer_id}: {len(samples)} years from {distinct[0]} to {distinct[-1]}")
    return Trajectory(composer_id, normalization, tuple(samples), undated, cumulative)


def trajectory_deltas(t):
    """
    Step between consecutive samples, attributed to the later year.

    :param t: Trajectory
    :return: list of (year, (dx, dy))
    """
    if len(t.samples) < 2:
        err_msg = f"Trajectory of '{t.composer_id}' has {len(t.samples)} samples, deltas need at least 2"
        logger.error(err_msg)
        raise TooFewSamples(err_msg)
    return [(b.year, (b.x - a.x, b.y - a.y)) for a, b in zip(t.samples, t.samples[1:])]


def largest_deltas(deltas, count=3):
    """
    The biggest steps of a trajectory, largest first (ties by year).

    :param deltas: output of trajectory_deltas
    :param count: how many to keep
    :return: list of (year, (dx, dy))
    """
    return sorted(deltas, key=lambda d: (-math.hypot(*d[1]), d[0]))[:count]


TRAJECTORY_COLUMNS = ("composer", "year", "x", "y", "cumulative_count")


def trajectory_to_csv(t):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRAJECTORY_COLUMNS)
    for s in t.samples:
        writer.writerow([t.composer_id, s.year, format_number(s.x), format_number(s.y), s.cumulative_count])
    return out.getvalue()


def trajectory_to_json(t):
    doc = {
        "composer": t.composer_id,
        "normalization": t.normalization.value,
        "cumulative": t.cumulative,
        "undated_count": t.undated_count,
        "samples": [
            {
                "year": s.year,
                "x": float(format_number(s.x)),
                "y": float(format_number(s.y)),
                "cumulative_count": s.cumulative_count,
            }
            for s in t.samples
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def read_trajectory_csv(text, normalization=Normalization.TOTAL_COUNT):
    """
    Reads a trajectory written by trajectory_to_csv.  The CSV holds a single composer.

    :param text: CSV text
    :param normalization: recorded on the result, the CSV does not carry it
    :return: Trajectory
    """

    def convert(row):
        return row[0], TrajectorySample(int(row[1]), float(row[2]), float(row[3]), int(row[4]))

    rows = read_export_csv(text, TRAJECTORY_COLUMNS, "Trajectory", convert)
    composers = {cid for cid, _ in rows}
    if len(composers) > 1:
        err_msg = f"Trajectory CSV mixes composers: {sorted(composers)}"
        logger.error(err_msg)
        raise ChromaticaIOError(err_msg)

    samples = tuple(s for _, s in rows)
    return Trajectory(rows[0][0] if rows else "", Normalization(normalization), samples)
