import csv
import datetime
import hashlib
import io
import json
import logging
import re
import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

from .constants import CSV_HEADER, DEFAULT_WORK_THRESHOLD, PRACTICAL_DEGREE_LIMIT, YEAR_MAX, YEAR_MIN
from .exceptions import (
    FileUnreadable,
    InvalidArgument,
    KeyNotationError,
    NoDatedWorks,
    RowError,
    SchemaMismatch,
    UnknownComposer,
)
from .keycalc import Key, Mode, degree, format_key, parse_key, raw_degree
from .utils import atomic_write

logger = logging.getLogger(__name__)

CACHE_FORMAT = "chromatica-corpus"
CACHE_VERSION = 1


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    composer_id: Optional[str] = None
    catalog_id: Optional[str] = None
    line: Optional[int] = None

    def __str__(self):
        where = f"line {self.line}: " if self.line is not None else ""
        return f"{self.kind}: {where}{self.message}"


@dataclass(frozen=True)
class Work:
    composer_id: str
    catalog_id: str
    key: Key
    title: Optional[str] = None
    year: Optional[int] = None

    def __post_init__(self):
        if not self.composer_id or not self.catalog_id:
            err_msg = f"Work needs a composer and a catalog id (got {self.composer_id!r}, {self.catalog_id!r})"
            logger.error(err_msg)
            raise InvalidArgument(err_msg)
        if self.year is not None and not YEAR_MIN <= self.year <= YEAR_MAX:
            err_msg = f"Year {self.year} of {self.catalog_id} is outside [{YEAR_MIN}, {YEAR_MAX}]"
            logger.error(err_msg)
            raise InvalidArgument(err_msg)

    @property
    def mode(self):
        return self.key.mode

    @property
    def degree(self):
        return raw_degree(self.key)


@dataclass(frozen=True)
class Composer:
    id: str
    display_name: str
    index: Optional[int] = None


@dataclass(frozen=True)
class Provenance:
    sha256: str
    source: Optional[str] = field(default=None, compare=False)
    ingested_at: Optional[datetime.datetime] = field(default=None, compare=False)


@dataclass(frozen=True)
class Corpus:
    """
    An immutable collection of works and the composers they belong to.  Equality compares content only, so two
    ingestions of the same bytes are equal whatever their file names and timestamps.
    """

    composers: tuple
    works: tuple
    provenance: Optional[Provenance] = None
    diagnostics: tuple = ()
    extended_range: bool = False

    def __post_init__(self):
        object.__setattr__(self, "composers", tuple(self.composers))
        object.__setattr__(self, "works", tuple(self.works))
        object.__setattr__(self, "diagnostics", tuple(self.diagnostics))

        ids = [c.id for c in self.composers]
        if len(set(ids)) != len(ids):
            err_msg = "Composer ids must be unique within a corpus"
            logger.error(err_msg)
            raise InvalidArgument(err_msg)
        known = set(ids)
        for w in self.works:
            if w.composer_id not in known:
                err_msg = f"Work {w.catalog_id} refers to unknown composer '{w.composer_id}'"
                logger.error(err_msg)
                raise UnknownComposer(err_msg)

    @property
    def composer_ids(self):
        return tuple(c.id for c in self.composers)

    @property
    def major_count(self):
        return sum(1 for w in self.works if w.mode is Mode.MAJOR)

    @property
    def minor_count(self):
        return sum(1 for w in self.works if w.mode is Mode.MINOR)

    def composer(self, composer_id):
        for c in self.composers:
            if c.id == composer_id:
                return c
        err_msg = f"Unknown composer '{composer_id}'"
        logger.error(err_msg)
        raise UnknownComposer(err_msg)

    def labels(self):
        """
        Index label of every composer, taken from the composer's index or assigned alphabetically when missing.

        :return: dict of composer id to label string
        """
        alphabetical = {cid: i for i, cid in enumerate(sorted(self.composer_ids), start=1)}
        return {c.id: str(c.index if c.index is not None else alphabetical[c.id]) for c in self.composers}


@dataclass(frozen=True)
class IngestOptions:
    strict: bool = True
    extended_range: bool = False


_YEAR_RANGE = re.compile(r"(\d{1,4})\s*[-–]\s*(\d{1,4})")
_YEAR = re.compile(r"\d{1,4}")


def _parse_year(text, line, catalog_id, composer_id, diagnostics):
    if text == "":
        return None

    m = _YEAR_RANGE.fullmatch(text)
    if m:
        year = int(m.group(1))
        diagnostics.append(
            Diagnostic(
                "YearRange",
                f"year '{text}' spans several years, using {year}",
                composer_id=composer_id,
                catalog_id=catalog_id,
                line=line,
            )
        )
        logger.warning(f"Line {line}: year '{text}' of {catalog_id} spans several years, using {year}")
    elif _YEAR.fullmatch(text):
        year = int(text)
    else:
        raise RowError(line, f"malformed year '{text}'")

    if not YEAR_MIN <= year <= YEAR_MAX:
        raise RowError(line, f"year {year} outside [{YEAR_MIN}, {YEAR_MAX}]")
    return year


def _parse_row(row, line, options, diagnostics):
    if len(row) != len(CSV_HEADER):
        raise RowError(line, f"expected {len(CSV_HEADER)} fields, found {len(row)}")

    composer_id, catalog_id, title, year_text, key_text = (c.strip() for c in row)
    if not composer_id:
        raise RowError(line, "empty composer")
    if not catalog_id:
        raise RowError(line, "empty catalog_id")

    row_diagnostics = []
    year = _parse_year(year_text, line, catalog_id, composer_id, row_diagnostics)
    try:
        key = parse_key(key_text, extended_range=options.extended_range)
        degree(key, extended_range=options.extended_range)
    except KeyNotationError as e:
        raise RowError(line, str(e)) from e

    diagnostics.extend(row_diagnostics)
    return Work(composer_id, catalog_id, key, title=title or None, year=year)


def _composers_for(works, known=None):
    # Alphabetical order, with explicit indices kept when the source had them
    known = known or {}
    ids = sorted({w.composer_id for w in works} | set(known))
    return tuple(known.get(cid, Composer(cid, cid)) for cid in ids)


def _read_source(path):
    try:
        with open(path, "rb") as f:
            data = f.read()
        text = data.decode("utf-8-sig")
    except (OSError, UnicodeDecodeError) as e:
        err_msg = f"Cannot read corpus file '{path}': {e}"
        logger.error(err_msg)
        raise FileUnreadable(err_msg) from e
    return text, hashlib.sha256(data).hexdigest()


def ingest_csv(path, options=None):
    """
    Reads a corpus CSV (header `composer,catalog_id,title,year,key`) into a validated Corpus.  In strict mode (the
    default) the first bad row raises RowError.  In lenient mode bad rows are skipped and recorded as SkippedRow
    diagnostics on the returned corpus.

    :param path: path to a UTF-8 CSV file, LF or CRLF line endings
    :param options: IngestOptions
    :return: Corpus
    """
    start_time = time.perf_counter()
    options = options or IngestOptions()

    logger.debug(f"Opening corpus file: {path}")
    text, digest = _read_source(path)

    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
        err_msg = f"Corpus file '{path}' must start with the header '{','.join(CSV_HEADER)}', found {header}"
        logger.error(err_msg)
        raise SchemaMismatch(err_msg)

    works = []
    diagnostics = []
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        line = reader.line_num
        try:
            works.append(_parse_row(row, line, options, diagnostics))
        except RowError as e:
            if options.strict:
                logger.error(f"{path}:{e}")
                raise
            msg = f"Skipping line {line} of '{path}': {e.cause}"
            logger.warning(msg)
            warnings.warn(msg)
            diagnostics.append(Diagnostic("SkippedRow", e.cause, line=line))

    corpus = Corpus(
        composers=_composers_for(works),
        works=works,
        provenance=Provenance(digest, source=str(path), ingested_at=datetime.datetime.now(datetime.timezone.utc)),
        diagnostics=diagnostics,
        extended_range=options.extended_range,
    )

    total_time = time.perf_counter() - start_time
    logger.info(
        f"Ingested corpus in {1e3*total_time:.3f} ms (works={len(corpus.works)}, composers={len(corpus.composers)}, "
        f"major={corpus.major_count}, minor={corpus.minor_count}, diagnostics={len(diagnostics)})"
    )
    return corpus


def _diagnostic_to_dict(d):
    return {
        "kind": d.kind,
        "message": d.message,
        "composer": d.composer_id,
        "catalog_id": d.catalog_id,
        "line": d.line,
    }


def corpus_to_json(corpus):
    """
    The normalized cache document: composers, works with keys in canonical notation, source digest and ingestion
    diagnostics.  Field order is fixed and the ingestion time is left out so equal corpora give equal bytes.

    :param corpus: Corpus
    :return: JSON text
    """
    doc = {
        "format": CACHE_FORMAT,
        "version": CACHE_VERSION,
        "provenance": {"sha256": corpus.provenance.sha256 if corpus.provenance else None},
        "extended_range": corpus.extended_range,
        "composers": [{"id": c.id, "display_name": c.display_name, "index": c.index} for c in corpus.composers],
        "works": [
            {
                "composer": w.composer_id,
                "catalog_id": w.catalog_id,
                "title": w.title,
                "year": w.year,
                "key": format_key(w.key),
            }
            for w in corpus.works
        ],
        "diagnostics": [_diagnostic_to_dict(d) for d in corpus.diagnostics],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def save_corpus_json(corpus, path):
    """
    Writes the normalized corpus cache.

    :param corpus: Corpus
    :param path: destination path
    :return: None
    """
    atomic_write(path, corpus_to_json(corpus))
    logger.info(f"Saved corpus cache to {path} (works={len(corpus.works)}, composers={len(corpus.composers)})")


def ingest_json(path, options=None):
    """
    Reads a normalized corpus cache back into a Corpus.  The corpus keeps the digest of the file the cache was made
    from, so it compares equal to the corpus the cache was written from.

    :param path: path to a cache written by save_corpus_json
    :param options: IngestOptions (extended_range is taken from the cache when it is set there)
    :return: Corpus
    """
    start_time = time.perf_counter()
    options = options or IngestOptions()
    text, digest = _read_source(path)

    try:
        doc = json.loads(text)
        if doc.get("format") != CACHE_FORMAT:
            raise KeyError("format")
        extended_range = bool(doc.get("extended_range", False)) or options.extended_range
        composers = {
            c["id"]: Composer(c["id"], c.get("display_name") or c["id"], c.get("index")) for c in doc["composers"]
        }
        works = []
        for i, w in enumerate(doc["works"]):
            try:
                key = parse_key(w["key"], extended_range=extended_range)
                works.append(Work(w["composer"], w["catalog_id"], key, title=w.get("title"), year=w.get("year")))
            except (KeyNotationError, ValueError) as e:
                raise RowError(i + 1, str(e)) from e
        diagnostics = [
            Diagnostic(d["kind"], d["message"], d.get("composer"), d.get("catalog_id"), d.get("line"))
            for d in doc.get("diagnostics", [])
        ]
        sha = doc.get("provenance", {}).get("sha256") or digest
    except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as e:
        err_msg = f"Corpus cache '{path}' does not match the cache schema: {e}"
        logger.error(err_msg)
        raise SchemaMismatch(err_msg) from e

    corpus = Corpus(
        composers=_composers_for(works, composers),
        works=works,
        provenance=Provenance(sha, source=str(path), ingested_at=datetime.datetime.now(datetime.timezone.utc)),
        diagnostics=diagnostics,
        extended_range=extended_range,
    )
    logger.info(
        f"Loaded corpus cache in {1e3*(time.perf_counter() - start_time):.3f} ms (works={len(corpus.works)}, "
        f"composers={len(corpus.composers)})"
    )
    return corpus


def load_corpus(path, options=None):
    """
    Loads either a corpus CSV or a normalized JSON cache, chosen by file suffix.

    :param path: file path
    :param options: IngestOptions
    :return: Corpus
    """
    if str(path).lower().endswith(".json"):
        return ingest_json(path, options)
    return ingest_csv(path, options)


def composer_works(corpus, composer_id):
    """
    Works of one composer in corpus order.

    :param corpus: Corpus
    :param composer_id: composer id
    :return: tuple of Work
    """
    corpus.composer(composer_id)
    return tuple(w for w in corpus.works if w.composer_id == composer_id)


def validate(corpus, threshold=DEFAULT_WORK_THRESHOLD):
    """
    Checks a corpus against the corpus inclusion rules and reports what it finds.  Nothing is removed: the
    diagnostics are advisory and analyses run on the corpus unchanged.

     * BelowWorkThreshold: composer with fewer than `threshold` works
     * MissingYear: undated work (left out of career trajectories only)
     * OutOfRange: work with a degree beyond ±7 (only possible in extended-range corpora)

    :param corpus: Corpus
    :param threshold: minimum catalogue size
    :return: list of Diagnostic
    """
    diagnostics = []
    for c in corpus.composers:
        n = sum(1 for w in corpus.works if w.composer_id == c.id)
        if n < threshold:
            diagnostics.append(
                Diagnostic("BelowWorkThreshold", f"{n} works, below the threshold of {threshold}", composer_id=c.id)
            )

    for w in corpus.works:
        if w.year is None:
            diagnostics.append(
                Diagnostic("MissingYear", "no year, excluded from career analysis", w.composer_id, w.catalog_id)
            )
        d = w.degree
        if abs(d) > PRACTICAL_DEGREE_LIMIT:
            diagnostics.append(
                Diagnostic(
                    "OutOfRange",
                    f"key {format_key(w.key)} has degree {d}, beyond ±{PRACTICAL_DEGREE_LIMIT}",
                    w.composer_id,
                    w.catalog_id,
                )
            )

    for d in diagnostics:
        logger.warning(f"{d.composer_id}: {d}")
    logger.info(f"Validated corpus (works={len(corpus.works)}, diagnostics={len(diagnostics)})")
    return diagnostics


def partition_by_mode(corpus, composer_id):
    """
    Splits a composer's works into major and minor, each in corpus order.

    :param corpus: Corpus
    :param composer_id: composer id
    :return: (tuple of major works, tuple of minor works)
    """
    works = composer_works(corpus, composer_id)
    major = tuple(w for w in works if w.mode is Mode.MAJOR)
    minor = tuple(w for w in works if w.mode is Mode.MINOR)
    return major, minor


def slice_by_year(corpus, composer_id, last_year):
    """
    Sub-corpus of one composer's works dated up to and including last_year.  Undated works are left out and counted
    in an Undated diagnostic on the returned corpus.

    :param corpus: Corpus
    :param composer_id: composer id
    :param last_year: last year included
    :return: Corpus with the single composer
    """
    works = composer_works(corpus, composer_id)
    dated = [w for w in works if w.year is not None]
    if not dated:
        err_msg = f"Composer '{composer_id}' has no dated works"
        logger.error(err_msg)
        raise NoDatedWorks(err_msg)

    diagnostics = []
    undated = len(works) - len(dated)
    if undated:
        diagnostics.append(
            Diagnostic("Undated", f"{undated} undated works excluded from the year slice", composer_id=composer_id)
        )

    return replace(
        corpus,
        composers=(corpus.composer(composer_id),),
        works=tuple(w for w in dated if w.year <= last_year),
        diagnostics=tuple(diagnostics),
    )
