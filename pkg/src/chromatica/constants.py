# Define constants for the key-signature calculus
PRACTICAL_DEGREE_LIMIT = 7
EXTENDED_DEGREE_LIMIT = 14
PRACTICAL_ACCIDENTAL_LIMIT = 1
EXTENDED_ACCIDENTAL_LIMIT = 2

# The torus identifies degrees that differ by a whole cycle of fifths
TORUS_PERIOD = 12


# Position of each letter on the circle of fifths relative to C.  A minor key sits three fifths above the major key
# sharing its signature, hence the offset.
FIFTHS = {
    "F": -1,
    "C": 0,
    "G": 1,
    "D": 2,
    "A": 3,
    "E": 4,
    "B": 5,
}
MINOR_OFFSET = -3
FIFTHS_PER_ACCIDENTAL = 7
LETTERS = "ABCDEFG"


# The degree of every key in the practical range, written in canonical notation.  Major and minor keys in the same
# entry share a signature.
DEGREE_TABLE = {
    -7: ("Cb", "ab"),
    -6: ("Gb", "eb"),
    -5: ("Db", "bb"),
    -4: ("Ab", "f"),
    -3: ("Eb", "c"),
    -2: ("Bb", "g"),
    -1: ("F", "d"),
    0: ("C", "a"),
    1: ("G", "e"),
    2: ("D", "b"),
    3: ("A", "f#"),
    4: ("E", "c#"),
    5: ("B", "g#"),
    6: ("F#", "d#"),
    7: ("C#", "a#"),
}


# Corpus interchange
CSV_HEADER = ("composer", "catalog_id", "title", "year", "key")
YEAR_MIN = 1400
YEAR_MAX = 2100
DEFAULT_WORK_THRESHOLD = 50


# Statistics defaults
DEFAULT_BOOTSTRAP_REPS = 1000
DEFAULT_SEED = 0
MIN_GOF_SAMPLES = 8
MIN_BOOTSTRAP_REPS = 100
POISSON_SHIFT = 7


# Text output
SIGNIFICANT_DIGITS = 6
SEED_ENV_VAR = "CHROMATICA_SEED"

# Headline numbers of the full 33-composer study.  The underlying catalog was never published, so these are kept for
# reference and are not reproduced by any test.
REFERENCE_TOTAL_WORKS = 12331
REFERENCE_MAJOR_WORKS = 8488
REFERENCE_MINOR_WORKS = 3843
REFERENCE_CENTROID = (0.22, -0.31)
REFERENCE_MODE_PEAKS = (0, -2)
REFERENCE_COMPOSERS = (
    "Albinoni",
    "Bach",
    "BachCPE",
    "BachJC",
    "Beethoven",
    "Brahms",
    "Bruckner",
    "Buxtehude",
    "Chopin",
    "Clementi",
    "Donizetti",
    "Dvorak",
    "Faure",
    "Glazunov",
    "Handel",
    "Haydn",
    "Hummel",
    "Liszt",
    "Mendelssohn",
    "Mozart",
    "Pachelbel",
    "Paganini",
    "Pleyel",
    "Rachmaninoff",
    "Saintsaens",
    "Scarlatti",
    "Schubert",
    "Scriabin",
    "Shostakovich",
    "Smetana",
    "Tchaikovsky",
    "Telemann",
    "Vivaldi",
)
