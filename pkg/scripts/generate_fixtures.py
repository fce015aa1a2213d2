#  This file is part of chromatica and is released under the BSD 3-clause license

"""
This script is used to generate the (potentially invalid) corpus CSV files for testing out the library, along with the
bundled corpus holding one work in each key of the degree table and the golden SVG drawings.  Run it from the repository
root and check the diff of the goldens by hand before committing them.
"""

import csv
import io
import os

import chromatica


########################################################################################################################
# Helper functions
########################################################################################################################
def get_csv(rows, header=chromatica.CSV_HEADER, line_terminator="\n"):
    f = io.StringIO()
    w = csv.writer(f, lineterminator=line_terminator)
    w.writerow(header)
    w.writerows(rows)
    return f.getvalue()


########################################################################################################################
# Functions for generating test files
########################################################################################################################
def get_file_degree_table_keys():
    """
    One work per key in the practical range, major before minor, flattest degree first
    :return: file contents
    """
    rows = []
    for degree, (major, minor) in sorted(chromatica.DEGREE_TABLE.items()):
        rows.append(("table", f"T{degree}-major", "", 1800, major))
        rows.append(("table", f"T{degree}-minor", "", 1800, minor))
    return get_csv(rows)


def get_file_empty():
    """
    Header only
    :return: file contents
    """
    return get_csv([])


def get_file_bad_key():
    """
    Unreadable key name on the third line
    :return: file contents
    """
    rows = [("alpha", "A1", "First", 1700, "C"), ("alpha", "A2", "Second", 1701, "H")]
    rows.append(("alpha", "A3", "Third", 1702, "G"))
    return get_csv(rows)


def get_file_bad_year():
    """
    Unreadable year on the third line
    :return: file contents
    """
    return get_csv([("alpha", "A1", "First", 1700, "C"), ("alpha", "A2", "Second", "17x0", "G")])


def get_file_crlf():
    """
    Windows line endings
    :return: file contents
    """
    return get_csv([("alpha", "A1", "First", 1700, "C"), ("alpha", "A2", "Second", 1701, "g")], line_terminator="\r\n")


def get_file_wrong_header():
    """
    Misspelled catalog column
    :return: file contents
    """
    header = ("composer", "catalog", "title", "year", "key")
    return get_csv([("alpha", "A1", "First", 1700, "C")], header=header)


def get_file_extended():
    """
    A double sharp key, only readable with the extended range turned on
    :return: file contents
    """
    return get_csv([("alpha", "A1", "", 1800, "C"), ("alpha", "A2", "", 1801, "F##"), ("alpha", "A3", "", 1802, "G")])


def get_file_mixed():
    """
    Four major and three minor works
    :return: file contents
    """
    keys = ["C", "G", "D", "Bb", "a", "e", "g"]
    return get_csv([("mixed", f"M{i}", "", 1749 + i, k) for i, k in enumerate(keys, start=1)])


def get_file_career():
    """
    Two works in consecutive years
    :return: file contents
    """
    return get_csv([("solo", "S1", "", 1700, "D major"), ("solo", "S2", "", 1701, "g minor")])


def get_file_year_range():
    """
    A composition period given as a range of years
    :return: file contents
    """
    return get_csv(
        [
            ("bach", "BWV 1046", "Brandenburg Concerto No. 1", "1717-1723", "F"),
            ("bach", "BWV 1047", "Brandenburg Concerto No. 2", 1721, "F"),
        ]
    )


def get_golden_diagram():
    """
    Two composers on the default diagram
    :return: SVG text
    """
    pts = [chromatica.DiagramPoint(1.0, -1.0, "alpha"), chromatica.DiagramPoint(-2.0, 2.0, "beta")]
    return chromatica.render(pts, chromatica.default_spec(chromatica.PlotKind.DIAGRAM_SCATTER))


def get_golden_fractions():
    """
    Three composers on the mode fraction plot
    :return: SVG text
    """
    fractions = [
        chromatica.ModeFraction(0.75, 0.25, "alpha"),
        chromatica.ModeFraction(0.5, 0.5, "beta"),
        chromatica.ModeFraction(1.0, 0.0, "gamma"),
    ]
    return chromatica.render(fractions, chromatica.PlotKind.FRACTION_SCATTER)


def get_golden_histogram():
    """
    Histogram pair of four works in C, C, G and g
    :return: SVG text
    """
    works = [chromatica.Work("solo", f"W{i}", chromatica.parse_key(k), year=1700) for i, k in enumerate("CCGg")]
    corpus = chromatica.Corpus(composers=[chromatica.Composer("solo", "solo")], works=works)
    return chromatica.render(chromatica.histogram(corpus), chromatica.PlotKind.HISTOGRAM_PAIR)


def get_golden_trajectory(career_path):
    """
    Cumulative path of the two work career fixture
    :return: SVG text
    """
    t = chromatica.trajectory(chromatica.ingest_csv(career_path), "solo")
    return chromatica.render(t, chromatica.PlotKind.TRAJECTORY_PATH)


def write_file(path, text):
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


########################################################################################################################
# Script begins here
########################################################################################################################
data_files_path = "tests/data"
package_data_path = "src/chromatica/data"
golden_path = "tests/data/golden"
if __name__ == "__main__":
    write_file(os.path.join(package_data_path, "degree_table_keys.csv"), get_file_degree_table_keys())
    write_file(os.path.join(data_files_path, "empty.csv"), get_file_empty())
    write_file(os.path.join(data_files_path, "bad_key.csv"), get_file_bad_key())
    write_file(os.path.join(data_files_path, "bad_year.csv"), get_file_bad_year())
    write_file(os.path.join(data_files_path, "crlf.csv"), get_file_crlf())
    write_file(os.path.join(data_files_path, "wrong_header.csv"), get_file_wrong_header())
    write_file(os.path.join(data_files_path, "extended.csv"), get_file_extended())
    write_file(os.path.join(data_files_path, "mixed.csv"), get_file_mixed())
    write_file(os.path.join(data_files_path, "career.csv"), get_file_career())
    write_file(os.path.join(data_files_path, "year_range.csv"), get_file_year_range())
    write_file(os.path.join(golden_path, "diagram.svg"), get_golden_diagram())
    write_file(os.path.join(golden_path, "fractions.svg"), get_golden_fractions())
    write_file(os.path.join(golden_path, "histogram.svg"), get_golden_histogram())
    career = os.path.join(data_files_path, "career.csv")
    write_file(os.path.join(golden_path, "trajectory.svg"), get_golden_trajectory(career))
