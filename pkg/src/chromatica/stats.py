import csv
import enum
import io
import itertools
import json
import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats as sps
from scipy.cluster.hierarchy import fcluster
from scipy.spatial.distance import pdist, squareform

from .constants import (
    DEFAULT_BOOTSTRAP_REPS,
    DEFAULT_SEED,
    MIN_BOOTSTRAP_REPS,
    MIN_GOF_SAMPLES,
    POISSON_SHIFT,
    PRACTICAL_DEGREE_LIMIT,
)
from .corpus import composer_works
from .diagram import TorusMetricConfig, torus_distance
from .exceptions import (
    DegenerateSamples,
    EmptyHistogram,
    EmptyMode,
    EmptyPointSet,
    InvalidArgument,
    InvalidCut,
    TooFewPoints,
    TooFewSamples,
)
from .keycalc import Mode
from .utils import format_number, read_export_csv

logger = logging.getLogger(__name__)


class Scale(str, enum.Enum):
    PROBABILITY = "Probability"
    PERCENTAGE = "Percentage"

    def __str__(self):
        return self.value


class Candidate(str, enum.Enum):
    NORMAL = "Normal"
    CAUCHY = "Cauchy"
    POISSON = "Poisson"

    def __str__(self):
        return self.value


class Linkage(str, enum.Enum):
    SINGLE = "Single"
    COMPLETE = "Complete"
    AVERAGE = "Average"

    def __str__(self):
        return self.value


class Metric(str, enum.Enum):
    PLANAR = "Planar"
    TORUS = "Torus"

    def __str__(self):
        return self.value


########################################################################################################################
# Histograms
########################################################################################################################
@dataclass(frozen=True)
class DegreeHistogram:
    """
    Work counts per degree for each mode.  The three tuples are aligned: major[i] and minor[i] count the works of
    degree degrees[i].
    """

    degrees: tuple
    major: tuple
    minor: tuple

    @property
    def counts(self):
        out = {}
        for d, ma, mi in zip(self.degrees, self.major, self.minor):
            out[(d, Mode.MAJOR)] = ma
            out[(d, Mode.MINOR)] = mi
        return out

    @property
    def combined(self):
        return {d: ma + mi for d, ma, mi in zip(self.degrees, self.major, self.minor)}

    @property
    def total(self):
        return sum(self.major) + sum(self.minor)

    def mode_counts(self, mode):
        return self.major if Mode(mode) is Mode.MAJOR else self.minor


def histogram(corpus, composer_id=None):
    """
    Exact counts per degree and mode over all works of the corpus (or of one composer).  The degree axis is [-7, 7]
    with empty bins kept; it only widens when an extended-range corpus holds degrees past ±7.

    :param corpus: Corpus
    :param composer_id: restrict to one composer
    :return: DegreeHistogram
    """
    works = corpus.works if composer_id is None else composer_works(corpus, composer_id)
    degrees = np.array([w.degree for w in works], dtype=np.int64)
    is_major = np.array([w.mode is Mode.MAJOR for w in works], dtype=bool)

    limit = max(PRACTICAL_DEGREE_LIMIT, int(np.abs(degrees).max()) if degrees.size else 0)
    axis = np.arange(-limit, limit + 1)
    major = np.bincount(degrees[is_major] + limit, minlength=axis.size)
    minor = np.bincount(degrees[~is_major] + limit, minlength=axis.size)

    return DegreeHistogram(
        tuple(int(d) for d in axis),
        tuple(int(c) for c in major),
        tuple(int(c) for c in minor),
    )


def mode_peak(h, mode):
    """
    Most frequent degree of one mode.  Ties go to the degree closest to zero, then to the negative one.

    :param h: DegreeHistogram
    :param mode: Mode
    :return: integer degree
    """
    counts = h.mode_counts(mode)
    best = max(counts, default=0)
    if best == 0:
        err_msg = f"Histogram has no {Mode(mode).value} works"
        logger.error(err_msg)
        raise EmptyMode(err_msg)
    return min((d for d, c in zip(h.degrees, counts) if c == best), key=lambda d: (abs(d), d))


def mode_peaks(h):
    """
    :param h: DegreeHistogram
    :return: (major peak degree, minor peak degree)
    """
    return mode_peak(h, Mode.MAJOR), mode_peak(h, Mode.MINOR)


@dataclass(frozen=True)
class DegreeDistribution:
    p: dict
    scale: Scale = Scale.PROBABILITY


def distribution(h, scale=Scale.PROBABILITY):
    """
    The pooled (major plus minor) degree distribution P(k), as probabilities or as percentages.

    :param h: DegreeHistogram
    :param scale: Scale
    :return: DegreeDistribution
    """
    scale = Scale(scale)
    total = h.total
    if total == 0:
        err_msg = "Cannot normalize an empty histogram"
        logger.error(err_msg)
        raise EmptyHistogram(err_msg)

    factor = 100.0 if scale is Scale.PERCENTAGE else 1.0
    p = {d: factor * c / total for d, c in h.combined.items()}
    return DegreeDistribution(p, scale)


HISTOGRAM_COLUMNS = ("degree", "major_count", "minor_count", "combined", "p")


def histogram_to_csv(h):
    p = distribution(h).p if h.total else {d: 0.0 for d in h.degrees}
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(HISTOGRAM_COLUMNS)
    for d, ma, mi in zip(h.degrees, h.major, h.minor):
        writer.writerow([d, ma, mi, ma + mi, format_number(p[d])])
    return out.getvalue()


def histogram_to_json(h):
    p = distribution(h).p if h.total else {d: 0.0 for d in h.degrees}
    doc = [
        {"degree": d, "major_count": ma, "minor_count": mi, "combined": ma + mi, "p": float(format_number(p[d]))}
        for d, ma, mi in zip(h.degrees, h.major, h.minor)
    ]
    return json.dumps(doc, indent=2) + "\n"


def read_histogram_csv(text):
    """
    Reads a histogram written by histogram_to_csv.

    :param text: CSV text
    :return: DegreeHistogram
    """
    rows = read_export_csv(text, HISTOGRAM_COLUMNS, "Histogram", lambda r: (int(r[0]), int(r[1]), int(r[2])))
    return DegreeHistogram(
        tuple(r[0] for r in rows),
        tuple(r[1] for r in rows),
        tuple(r[2] for r in rows),
    )


########################################################################################################################
# Goodness of fit
########################################################################################################################
@dataclass(frozen=True)
class GofResult:
    statistic: float
    p_value: float
    candidate: Candidate
    bootstrap_reps: int
    seed: int
    n: int
    params: dict = field(default_factory=dict)
    method: str = "ParametricBootstrap"


def corpus_degrees(corpus, composer_id=None):
    """
    Degrees of all works (or of one composer's works), the samples the goodness-of-fit test runs on.

    :param corpus: Corpus
    :param composer_id: restrict to one composer
    :return: numpy array of floats
    """
    works = corpus.works if composer_id is None else composer_works(corpus, composer_id)
    return np.array([w.degree for w in works], dtype=np.float64)


def cvm_statistic(samples, cdf):
    """
    Cramér-von Mises W² = 1/(12n) + Σ ((2i-1)/(2n) - F(x_(i)))², computed along the last axis.

    :param samples: array of samples, rows are independent sample sets
    :param cdf: callable mapping sorted samples to candidate CDF values (same shape)
    :return: statistic (array for 2-D input)
    """
    x = np.sort(np.asarray(samples, dtype=np.float64), axis=-1)
    n = x.shape[-1]
    k = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    return 1.0 / (12.0 * n) + np.sum((k - cdf(x)) ** 2, axis=-1)


def _fit(candidate, x):
    # Parameters per row of x, shaped to broadcast against it
    if candidate is Candidate.NORMAL:
        return {"loc": x.mean(axis=-1, keepdims=True), "scale": x.std(axis=-1, ddof=1, keepdims=True)}
    if candidate is Candidate.CAUCHY:
        q1, med, q3 = np.percentile(x, [25, 50, 75], axis=-1, keepdims=True)
        return {"loc": med, "scale": (q3 - q1) / 2.0}
    return {"mu": x.mean(axis=-1, keepdims=True)}


def _distribution(candidate):
    return {Candidate.NORMAL: sps.norm, Candidate.CAUCHY: sps.cauchy, Candidate.POISSON: sps.poisson}[candidate]


def _statistic(candidate, x):
    params = _fit(candidate, x)
    dist = _distribution(candidate)
    return cvm_statistic(x, lambda s: dist.cdf(s, **params)), params


def cvm_test(samples, candidate=Candidate.NORMAL, bootstrap_reps=DEFAULT_BOOTSTRAP_REPS, seed=DEFAULT_SEED):
    """
    Cramér-von Mises goodness-of-fit test against a candidate family whose parameters are fitted from the samples
    (Normal: mean and SD, Cauchy: median and half the interquartile range, Poisson: mean).  Poisson is fitted to the
    samples shifted by +7 so that degrees land on its non-negative support.

    Because the parameters are estimated, the p-value comes from a parametric bootstrap: replicate r draws n samples
    from the fitted candidate with generator seed `seed + r`, refits, and recomputes W².  The p-value is the share of
    replicates whose statistic reaches the observed one, so replicates can be produced in any order.

    :param samples: sequence of reals, at least 8
    :param candidate: Candidate
    :param bootstrap_reps: number of replicates, at least 100
    :param seed: non-negative base seed
    :return: GofResult
    """
    start_time = time.perf_counter()
    candidate = Candidate(candidate)
    x = np.asarray(samples, dtype=np.float64).ravel()

    if x.size < MIN_GOF_SAMPLES:
        err_msg = f"Goodness-of-fit test needs at least {MIN_GOF_SAMPLES} samples, got {x.size}"
        logger.error(err_msg)
        raise TooFewSamples(err_msg)
    if bootstrap_reps < MIN_BOOTSTRAP_REPS:
        err_msg = f"Goodness-of-fit test needs at least {MIN_BOOTSTRAP_REPS} bootstrap replicates, got {bootstrap_reps}"
        logger.error(err_msg)
        raise InvalidArgument(err_msg)
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        err_msg = f"Bootstrap seed must be a non-negative integer, not {seed!r}"
        logger.error(err_msg)
        raise InvalidArgument(err_msg)
    if not np.all(np.isfinite(x)):
        err_msg = "Samples must be finite"
        logger.error(err_msg)
        raise InvalidArgument(err_msg)
    if np.ptp(x) == 0:
        err_msg = f"All {x.size} samples are equal to {x[0]}"
        logger.error(err_msg)
        raise DegenerateSamples(err_msg)

    if candidate is Candidate.POISSON:
        x = x + POISSON_SHIFT
        if np.any(x < 0):
            err_msg = f"Poisson candidate needs samples of at least -{POISSON_SHIFT}"
            logger.error(err_msg)
            raise InvalidArgument(err_msg)

    stat, params = _statistic(candidate, x)
    if "scale" in params and not np.all(params["scale"] > 0):
        err_msg = f"Fitted {candidate.value} scale is zero, the samples are too concentrated to test"
        logger.error(err_msg)
        raise DegenerateSamples(err_msg)
    dist = _distribution(candidate)
    replicates = np.stack(
        [dist.rvs(size=x.size, random_state=np.random.default_rng(seed + r), **params) for r in range(bootstrap_reps)]
    ).astype(np.float64)
    boot, _ = _statistic(candidate, replicates.reshape(bootstrap_reps, x.size))
    exceed = int(np.count_nonzero(boot >= stat))

    result = GofResult(
        statistic=float(stat),
        p_value=exceed / bootstrap_reps,
        candidate=candidate,
        bootstrap_reps=int(bootstrap_reps),
        seed=int(seed),
        n=int(x.size),
        params={k: float(np.squeeze(v)) for k, v in params.items()},
    )
    logger.info(
        f"Cramér-von Mises test against {candidate.value} in {1e3*(time.perf_counter() - start_time):.3f} ms "
        f"(n={x.size}, W2={result.statistic:.6g}, p={result.p_value:.6g}, reps={bootstrap_reps}, seed={seed})"
    )
    return result


def gof_to_json(result):
    doc = {
        "candidate": result.candidate.value,
        "method": result.method,
        "statistic": float(format_number(result.statistic)),
        "p_value": float(format_number(result.p_value)),
        "n": result.n,
        "bootstrap_reps": result.bootstrap_reps,
        "seed": result.seed,
        "params": {k: float(format_number(v)) for k, v in result.params.items()},
    }
    if result.candidate is Candidate.POISSON:
        doc["shift"] = POISSON_SHIFT
    return json.dumps(doc, indent=2) + "\n"


########################################################################################################################
# Centroid and clusters
########################################################################################################################
def _coordinates(points):
    return np.array([getattr(p, "xy", p) for p in points], dtype=np.float64).reshape(-1, 2)


def centroid(points):
    """
    Planar mean of diagram points (no torus wrapping).

    :param points: DiagramPoints or (x, y) pairs
    :return: (x, y)
    """
    xy = _coordinates(points)
    if xy.shape[0] == 0:
        err_msg = "Centroid of an empty point set"
        logger.error(err_msg)
        raise EmptyPointSet(err_msg)
    c = xy.mean(axis=0)
    return float(c[0]), float(c[1])


_LINKAGE_REDUCE = {Linkage.SINGLE: np.min, Linkage.COMPLETE: np.max, Linkage.AVERAGE: np.mean}


def _agglomerate(dist, linkage):
    # Greedy merges on a square distance matrix whose rows are in composer-id order, returned as a scipy linkage
    # matrix.  Equal merge distances go to the pair whose lowest members come first.
    n = dist.shape[0]
    reduce = _LINKAGE_REDUCE[linkage]
    active = {i: [i] for i in range(n)}
    z = np.zeros((n - 1, 4), dtype=np.float64)
    for step in range(n - 1):
        candidates = []
        for a, b in itertools.combinations(sorted(active, key=lambda c: active[c][0]), 2):
            d = float(reduce(dist[np.ix_(active[a], active[b])]))
            candidates.append((d, active[a][0], active[b][0], a, b))
        best = min(c[0] for c in candidates)
        tied = [c for c in candidates if c[0] <= best + 1e-12 * max(1.0, best)]
        d, _, _, a, b = min(tied, key=lambda c: (c[1], c[2]))
        members = sorted(active.pop(a) + active.pop(b))
        active[n + step] = members
        z[step] = [min(a, b), max(a, b), d, len(members)]
    return z


def _cut_count(z, count):
    # Replays the first n - count merges in the order they were made, so tied heights split the same way
    n = z.shape[0] + 1
    members = {i: [i] for i in range(n)}
    for step in range(n - count):
        a, b = int(z[step, 0]), int(z[step, 1])
        members[n + step] = members.pop(a) + members.pop(b)
    raw = np.zeros(n, dtype=np.int64)
    for label, cluster_members in enumerate(members.values(), start=1):
        raw[cluster_members] = label
    return raw


@dataclass(frozen=True)
class ClusterCut:
    """
    Where to cut the dendrogram: into `count` clusters, or at merge height `height`.
    """

    count: Optional[int] = None
    height: Optional[float] = None

    def __post_init__(self):
        if (self.count is None) == (self.height is None):
            err_msg = "Cluster cut needs exactly one of a cluster count or a height"
            logger.error(err_msg)
            raise InvalidCut(err_msg)
        if self.count is not None and self.count < 1:
            err_msg = f"Cluster count must be at least 1, not {self.count}"
            logger.error(err_msg)
            raise InvalidCut(err_msg)
        if self.height is not None and not self.height >= 0:
            err_msg = f"Cut height must be non-negative, not {self.height}"
            logger.error(err_msg)
            raise InvalidCut(err_msg)

    @classmethod
    def parse(cls, text):
        """
        :param text: "k=<count>" or "h=<height>"
        :return: ClusterCut
        """
        kind, _, value = text.partition("=")
        try:
            if kind.strip() == "k":
                return cls(count=int(value))
            if kind.strip() == "h":
                return cls(height=float(value))
        except ValueError:
            pass
        err_msg = f"Cluster cut must look like k=<n> or h=<d>, not '{text}'"
        logger.error(err_msg)
        raise InvalidCut(err_msg)

    def __str__(self):
        return f"k={self.count}" if self.count is not None else f"h={format_number(self.height)}"


@dataclass(frozen=True)
class ClusterResult:
    assignments: dict
    linkage: Linkage
    cut: ClusterCut
    metric: Metric
    centroid: tuple
    heights: tuple = ()

    @property
    def clusters(self):
        out = {}
        for cid, label in self.assignments.items():
            out.setdefault(label, []).append(cid)
        return out


def cluster(points, linkage=Linkage.COMPLETE, cut=None, metric=Metric.PLANAR, torus=None):
    """
    Agglomerative hierarchical clustering of composer points.  Points are put in composer-id order first, so the
    result does not depend on input order, and clusters are labelled 1..k in order of their first composer id.  When
    several merges are equally close, the pair whose lowest composer ids come first is merged.  A count cut always
    gives exactly that many clusters, even with tied heights.

    :param points: DiagramPoints with distinct composer ids
    :param linkage: Linkage
    :param cut: ClusterCut, defaults to two clusters
    :param metric: Metric, Planar Euclidean or Torus
    :param torus: TorusMetricConfig for the Torus metric
    :return: ClusterResult
    """
    start_time = time.perf_counter()
    linkage = Linkage(linkage)
    metric = Metric(metric)
    cut = cut or ClusterCut(count=2)

    if len(points) < 2:
        err_msg = f"Clustering needs at least 2 points, got {len(points)}"
        logger.error(err_msg)
        raise TooFewPoints(err_msg)
    ids = [p.composer_id for p in points]
    if len(set(ids)) != len(ids):
        err_msg = "Clustered points must have distinct composer ids"
        logger.error(err_msg)
        raise InvalidArgument(err_msg)
    if cut.count is not None and cut.count > len(points):
        err_msg = f"Cannot cut {len(points)} points into {cut.count} clusters"
        logger.error(err_msg)
        raise InvalidCut(err_msg)

    ordered = sorted(points, key=lambda p: p.composer_id)
    xy = _coordinates(ordered)
    if metric is Metric.TORUS:
        cfg = torus or TorusMetricConfig()
        condensed = pdist(xy, lambda u, v: torus_distance(u, v, cfg))
    else:
        condensed = pdist(xy)

    z = _agglomerate(squareform(condensed), linkage)
    if cut.count is not None:
        raw = _cut_count(z, cut.count)
    else:
        raw = fcluster(z, cut.height, criterion="distance")

    # Relabel in order of first appearance
    relabel = {}
    for r in raw:
        relabel.setdefault(int(r), len(relabel) + 1)
    assignments = {p.composer_id: relabel[int(r)] for p, r in zip(ordered, raw)}

    result = ClusterResult(
        assignments=assignments,
        linkage=linkage,
        cut=cut,
        metric=metric,
        centroid=centroid(ordered),
        heights=tuple(float(h) for h in z[:, 2]),
    )
    logger.info(
        f"Clustered {len(points)} points in {1e3*(time.perf_counter() - start_time):.3f} ms "
        f"(linkage={linkage.value}, metric={metric.value}, cut={cut}, clusters={len(relabel)})"
    )
    return result


def cluster_to_json(result):
    doc = {
        "linkage": result.linkage.value,
        "metric": result.metric.value,
        "cut": str(result.cut),
        "centroid": [float(format_number(v)) for v in result.centroid],
        "heights": [float(format_number(h)) for h in result.heights],
        "assignments": {cid: label for cid, label in sorted(result.assignments.items())},
    }
    return json.dumps(doc, indent=2) + "\n"
