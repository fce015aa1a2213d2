import enum
import logging
import re
from dataclasses import dataclass

from .constants import (
    EXTENDED_ACCIDENTAL_LIMIT,
    EXTENDED_DEGREE_LIMIT,
    FIFTHS,
    FIFTHS_PER_ACCIDENTAL,
    LETTERS,
    MINOR_OFFSET,
    PRACTICAL_ACCIDENTAL_LIMIT,
    PRACTICAL_DEGREE_LIMIT,
    TORUS_PERIOD,
)
from .exceptions import ExtendedRangeKey, MalformedKey

logger = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    MAJOR = "Major"
    MINOR = "Minor"

    def __str__(self):
        return self.value

    @property
    def other(self):
        return Mode.MINOR if self is Mode.MAJOR else Mode.MAJOR


@dataclass(frozen=True)
class Key:
    """
    A tonal key: diatonic letter, signed accidental count (sharps positive, flats negative) and mode.
    """

    letter: str
    accidental: int
    mode: Mode

    def __post_init__(self):
        if not isinstance(self.letter, str) or len(self.letter) != 1 or self.letter not in LETTERS:
            err_msg = f"Key letter must be one of {LETTERS}, not {self.letter!r}"
            logger.error(err_msg)
            raise MalformedKey(err_msg)
        if not isinstance(self.accidental, int) or isinstance(self.accidental, bool):
            err_msg = f"Key accidental must be an integer, not {type(self.accidental)}"
            logger.error(err_msg)
            raise MalformedKey(err_msg)
        if abs(self.accidental) > EXTENDED_ACCIDENTAL_LIMIT:
            err_msg = f"Accidental count {self.accidental} exceeds {EXTENDED_ACCIDENTAL_LIMIT}"
            logger.error(err_msg)
            raise ExtendedRangeKey(err_msg)
        object.__setattr__(self, "mode", Mode(self.mode))

    def __str__(self):
        return format_key(self)


# Mode words must be split from the body by whitespace or a hyphen ("Eb major", "f#-min")
_MODE_SUFFIX = re.compile(r"[\s-]+(major|maj|minor|min)$", re.IGNORECASE)
_MODE_WORDS = {"major": Mode.MAJOR, "maj": Mode.MAJOR, "minor": Mode.MINOR, "min": Mode.MINOR}
_SHARP_SIGNS = re.compile(r"[#♯s]{1,2}")
_FLAT_SIGNS = re.compile(r"[b♭]{1,2}")
_ACCIDENTAL_WORD = re.compile(r"[-\s]?(double[-\s]?)?(sharp|flat)", re.IGNORECASE)


def _parse_accidental(text, rest):
    if rest == "":
        return 0
    if _SHARP_SIGNS.fullmatch(rest):
        return len(rest)
    if _FLAT_SIGNS.fullmatch(rest):
        return -len(rest)
    m = _ACCIDENTAL_WORD.fullmatch(rest)
    if m:
        count = 2 if m.group(1) else 1
        return count if m.group(2).lower() == "sharp" else -count

    err_msg = f"Unrecognized accidental {rest!r} in key {text!r}"
    logger.error(err_msg)
    raise MalformedKey(err_msg)


def parse_key(text, extended_range=False):
    """
    Parses key notation into a Key.  Accepted form is a diatonic letter, an optional accidental ("#", "♯", "s",
    "-sharp" or "b", "♭", "-flat") and an optional mode word ("major", "maj", "minor", "min" in any case, separated by
    whitespace or a hyphen).  Without a mode word the case of the letter decides: uppercase is major and lowercase is
    minor.  A mode word always wins over the letter's case.

    >>> parse_key("e♭ Major")
    Key(letter='E', accidental=-1, mode=<Mode.MAJOR: 'Major'>)

    :param text: key notation string
    :param extended_range: allow double sharps/flats
    :return: the parsed Key
    """
    if not isinstance(text, str):
        err_msg = f"Key notation must be a string not '{type(text)}'"
        logger.error(err_msg)
        raise MalformedKey(err_msg)

    body = text.strip()
    if not body:
        err_msg = "Key notation is empty"
        logger.error(err_msg)
        raise MalformedKey(err_msg)

    # Split off the mode word if there is one
    mode = None
    m = _MODE_SUFFIX.search(body)
    if m and m.start() > 0:
        mode = _MODE_WORDS[m.group(1).lower()]
        body = body[: m.start()]

    letter = body[0]
    if letter.upper() not in LETTERS:
        err_msg = f"Unrecognized key letter {letter!r} in key {text!r}"
        logger.error(err_msg)
        raise MalformedKey(err_msg)

    accidental = _parse_accidental(text, body[1:])
    limit = EXTENDED_ACCIDENTAL_LIMIT if extended_range else PRACTICAL_ACCIDENTAL_LIMIT
    if abs(accidental) > limit:
        err_msg = f"Key {text!r} has a double accidental, which needs the extended range"
        logger.error(err_msg)
        raise ExtendedRangeKey(err_msg)

    if mode is None:
        mode = Mode.MAJOR if letter.isupper() else Mode.MINOR

    return Key(letter.upper(), accidental, mode)


def raw_degree(key):
    """
    Closed-form degree of a key on the circle of fifths, without any range check.

    :param key: Key
    :return: signed number of accidentals in the key signature
    """
    d = FIFTHS[key.letter] + FIFTHS_PER_ACCIDENTAL * key.accidental
    if key.mode is Mode.MINOR:
        d += MINOR_OFFSET
    return d


def degree(key, extended_range=False):
    """
    The degree of a key: number of sharps minus number of flats in its signature.  Keys beyond C#/Cb (degree ±7)
    are rejected unless extended_range is set, which admits degrees up to ±14.

    :param key: Key
    :param extended_range: admit double accidentals and degrees up to ±14
    :return: integer degree
    """
    if abs(key.accidental) > PRACTICAL_ACCIDENTAL_LIMIT and not extended_range:
        err_msg = f"Key {format_key(key)} has a double accidental, which needs the extended range"
        logger.error(err_msg)
        raise ExtendedRangeKey(err_msg)

    d = raw_degree(key)
    limit = EXTENDED_DEGREE_LIMIT if extended_range else PRACTICAL_DEGREE_LIMIT
    if abs(d) > limit:
        err_msg = f"Key {format_key(key)} has degree {d}, outside [-{limit}, {limit}]"
        logger.error(err_msg)
        raise ExtendedRangeKey(err_msg)
    return d


def format_key(key):
    """
    Canonical notation: uppercase letter for major, lowercase for minor, followed by "#" or "b" per accidental.

    :param key: Key
    :return: key notation string
    """
    letter = key.letter if key.mode is Mode.MAJOR else key.letter.lower()
    sign = "#" if key.accidental > 0 else "b"
    return letter + sign * abs(key.accidental)


def key_for_degree(d, mode):
    """
    The conventional spelling of the key with degree d in the given mode (F# rather than Gb at +6, Gb at -6).

    :param d: integer degree
    :param mode: Mode
    :return: Key
    """
    mode = Mode(mode)
    position = d - MINOR_OFFSET if mode is Mode.MINOR else d
    accidental = (position + 1) // FIFTHS_PER_ACCIDENTAL
    fifth = position - FIFTHS_PER_ACCIDENTAL * accidental
    letter = next(k for k, v in FIFTHS.items() if v == fifth)
    return Key(letter, accidental, mode)


def relative_key(key):
    """
    The relative major of a minor key or the relative minor of a major key.  Both share a signature.

    :param key: Key
    :return: Key
    """
    return key_for_degree(raw_degree(key), key.mode.other)


def enharmonic_class(d, period=TORUS_PERIOD):
    """
    Representative of d modulo the period in [-5, 6] for the default period of 12, so that C# (7) is identified with
    Db (-5).  Only used for torus geometry.

    :param d: integer degree
    :param period: length of the cycle of fifths
    :return: integer representative
    """
    lower = -((period - 1) // 2)
    return (d - lower) % period + lower


def all_keys(extended_range=False):
    """
    Every Key the parser accepts, in letter/accidental/mode order.

    :param extended_range: include double accidentals
    :return: list of Key
    """
    limit = EXTENDED_ACCIDENTAL_LIMIT if extended_range else PRACTICAL_ACCIDENTAL_LIMIT
    return [
        Key(letter, accidental, mode)
        for letter in LETTERS
        for accidental in range(-limit, limit + 1)
        for mode in Mode
    ]
