"""CSV emission/parsing of sweep tables and the generated gnuplot script."""

from __future__ import annotations

import csv
import io
import math

HEADER = ["E", "k", "R_left", "R_right", "T_left", "T_right",
          "sum_left", "sum_right", "W1", "W2", "converged"]


def fmt(x) -> str:
    """12 significant digits; locale-independent."""
    if x is None:
        return ""
    return format(float(x), ".12g")


def _flag(value):
    if value is None:
        return ""
    return "true" if value else "false"


def table_rows(table):
    for row in table.rows:
        r = row.result
        if r is None:
            yield [fmt(row.E), fmt(row.k)] + [""] * 8 + [_flag(row.converged)]
            continue
        ep = r.endpoint
        yield [fmt(row.E), fmt(r.k), fmt(r.R_left), fmt(r.R_right), fmt(r.T_left), fmt(r.T_right),
               fmt(r.sum_left), fmt(r.sum_right), fmt(ep.W1), fmt(ep.W2), _flag(row.converged)]


def format_csv(table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    writer.writerows(table_rows(table))
    return buf.getvalue()


def write_csv(table, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(table))


def read_csv(path):
    """Parse an emitted CSV into dicts; empty cells become None (NaN for failed points)."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        out = []
        for cells in reader:
            rec = {}
            for name, cell in zip(HEADER, cells):
                if name == "converged":
                    rec[name] = {"true": True, "false": False}.get(cell)
                elif cell == "":
                    rec[name] = None if name == "W2" else math.nan
                else:
                    rec[name] = float(cell)
            out.append(rec)
        return out


PLOT_TEMPLATE = """\
# gnuplot script: {title}
# usage: gnuplot {script}
set datafile separator ','
set terminal pngcairo size 1500,450
set output '{png}'
set multiplot layout 1,3 title '{title}'
set xlabel 'E'
set key top right
set title '(a) R'
plot '{csv}' using 1:3 skip 1 with lines lw 3 lc rgb 'blue' title 'left', \\
     '{csv}' using 1:4 skip 1 with lines lw 1 lc rgb 'red' title 'right'
set title '(b) T'
plot '{csv}' using 1:5 skip 1 with lines lw 3 lc rgb 'blue' title 'left', \\
     '{csv}' using 1:6 skip 1 with lines lw 1 lc rgb 'red' title 'right'
set title '(c) R+T'
plot '{csv}' using 1:7 skip 1 with lines lw 3 lc rgb 'blue' title 'left', \\
     '{csv}' using 1:8 skip 1 with lines lw 1 lc rgb 'red' title 'right'
unset multiplot
"""


def plot_script(csv_name: str, png_name: str, title: str, script_name: str = "plot.gp") -> str:
    return PLOT_TEMPLATE.format(csv=csv_name, png=png_name, title=title.replace("'", ""),
                                script=script_name)
