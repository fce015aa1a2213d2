from importlib.resources import files
import csv
import io
import logging
import os
import tempfile

import numpy as np

from .constants import CSV_HEADER, SIGNIFICANT_DIGITS
from .exceptions import ChromaticaIOError

logger = logging.getLogger(__name__)


def get_example_corpus_filename():
    """
    Returns the path to a small example corpus (four composers, dated works) bundled with chromatica.
    Used for testing and running demos of library.

    :return: Path to the example file
    """
    return str(files("chromatica").joinpath("data/example_corpus.csv"))


def get_mozart_1761_filename():
    """
    Returns the path to the six works Mozart wrote in 1761 (three in C, one in G, two in F).

    :return: Path to the example file
    """
    return str(files("chromatica").joinpath("data/mozart_1761.csv"))


def get_degree_table_corpus_filename():
    """
    Returns the path to a corpus holding exactly one work in each of the 30 keys of the degree table.

    :return: Path to the example file
    """
    return str(files("chromatica").joinpath("data/degree_table_keys.csv"))


def is_corpus_csv(f):
    """
    Determines if a file starts with the corpus CSV header or not.

    :param f: filename or open text file
    :return: True/False whether the header matches
    """
    # If we were handed a string, then run this function on it with the file opened
    if isinstance(f, (str, os.PathLike)):
        try:
            with open(f, "r", encoding="utf-8-sig", newline="") as ff:
                return is_corpus_csv(ff)
        except (OSError, UnicodeDecodeError):
            return False

    f.seek(0)
    header = next(csv.reader(f), None)
    f.seek(0)
    return header is not None and tuple(h.strip() for h in header) == CSV_HEADER


def format_number(x, digits=SIGNIFICANT_DIGITS):
    """
    Fixed notation with a number of significant digits, trailing zeros trimmed and '.' as the decimal separator
    regardless of locale.  Negative zero prints as "0".

    >>> format_number(-1 / 6)
    '-0.166667'

    :param x: real number
    :param digits: significant digits
    :return: string
    """
    x = float(x)
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    if np.isnan(x):
        return "nan"
    s = np.format_float_positional(x + 0.0, precision=digits, unique=False, fractional=False, trim="-")
    return "0" if s == "-0" else s


def quantize(x, digits=SIGNIFICANT_DIGITS):
    """
    The value a reader of our text output would get back.

    :param x: real number
    :param digits: significant digits
    :return: float
    """
    return float(format_number(x, digits))


def atomic_write(path, text):
    """
    Writes text next to the target and renames it into place so readers never see a partial file.

    :param path: destination path
    :param text: file contents
    :return: None
    """
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".chromatica-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    logger.debug(f"Wrote {len(text)} characters to {path}")


def read_export_csv(text, columns, what, convert):
    """
    Reads CSV text written by one of our exporters.  The header must match exactly, blank lines are skipped and every
    other row goes through `convert`.

    :param text: CSV text
    :param columns: expected header
    :param what: name of the export, used in error messages
    :param convert: callable turning a list of fields into a value
    :return: list of converted rows
    """
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader, None)
    if header is None or tuple(header) != tuple(columns):
        err_msg = f"{what} CSV must start with the header '{','.join(columns)}', found {header}"
        logger.error(err_msg)
        raise ChromaticaIOError(err_msg)

    out = []
    for row in reader:
        if not row:
            continue
        try:
            if len(row) != len(columns):
                raise ValueError(f"expected {len(columns)} fields, found {len(row)}")
            out.append(convert(row))
        except (ValueError, TypeError) as e:
            err_msg = f"{what} CSV line {reader.line_num}: {e}"
            logger.error(err_msg)
            raise ChromaticaIOError(err_msg) from e
    return out
