"""
Tabular reports for census and Favard runs
This module turns result objects into pandas DataFrames and writes CSV and gnuplot-ready tables
"""

import logging
from typing import Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from cyclo_slv.exceptions import PreconditionError
from cyclo_slv.favard import FavardEstimate
from cyclo_slv.sums import CensusEntry

logger = logging.getLogger(__name__)

FAVARD_COLUMNS = ["n", "points", "nodes", "favard", "error_bound", "log_log_slope"]


def census_frame(entries: Iterable[CensusEntry]) -> pd.DataFrame:
    """
    Build a DataFrame with one row per enumerated vanishing sum

    Args:
        entries (Iterable[CensusEntry]): Output of ``census``

    Returns:
        pd.DataFrame: Columns weight, residues, minimal, template, lam_leung
    """
    rows = [
        {
            "weight": entry.sum.weight,
            "residues": " ".join(str(x) for x in entry.sum.residues()),
            "minimal": entry.minimal,
            "template": entry.label,
            "lam_leung": "+".join(str(p) for p in entry.representation),
        }
        for entry in entries
    ]
    df = pd.DataFrame(rows, columns=["weight", "residues", "minimal", "template", "lam_leung"])
    logger.info(f"Built census table with {len(df)} rows")
    return df


def generate_census_summary(df: pd.DataFrame) -> pd.DataFrame:
    """
    Count sums per weight and template

    Args:
        df (pd.DataFrame): Table from ``census_frame``

    Returns:
        pd.DataFrame: Columns weight, template, count, sorted by weight then template
    """
    if df.empty:
        return pd.DataFrame(columns=["weight", "template", "count"])
    summary = df.groupby(["weight", "template"]).size().reset_index(name="count")
    return summary.sort_values(["weight", "template"]).reset_index(drop=True)


def minimal_weights(df: pd.DataFrame) -> List[int]:
    """Weights at which at least one minimal sum occurs"""
    return sorted(int(w) for w in df.loc[df["minimal"], "weight"].unique())


def log_log_slopes(depths: Sequence[int], values: Sequence[float]) -> np.ndarray:
    """
    Slopes of log Fav(S_n) against log n between consecutive rows

    The first entry is NaN. These are descriptive only; no decay rate is fitted.
    """
    n = np.asarray(depths, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    slopes = np.full(len(n), np.nan)
    if len(n) > 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            slopes[1:] = np.diff(np.log(v)) / np.diff(np.log(n))
    return slopes


def favard_frame(estimates: Sequence[FavardEstimate]) -> pd.DataFrame:
    """
    Build the Favard decay table

    Args:
        estimates (Sequence[FavardEstimate]): One estimate per depth, in increasing n

    Returns:
        pd.DataFrame: Columns n, points, nodes, favard, error_bound, log_log_slope
    """
    df = pd.DataFrame([e.to_json() for e in estimates], columns=["n", "points", "nodes", "favard", "error_bound"])
    df["log_log_slope"] = log_log_slopes(df["n"].tolist(), df["favard"].tolist())
    return df[FAVARD_COLUMNS]


def is_nonincreasing(df: pd.DataFrame, column: str = "favard") -> bool:
    """True if the column never increases from one row to the next"""
    return bool((df[column].diff().dropna() <= 0).all())


def load_favard_table(results_file: str) -> pd.DataFrame:
    """
    Load a Favard table written by ``utils.filesystem.write_csv``

    Args:
        results_file (str): Path to CSV file

    Returns:
        pd.DataFrame: The table

    Raises:
        PreconditionError: the file cannot be read or lacks the expected columns
    """
    try:
        df = pd.read_csv(results_file)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise PreconditionError(f"cannot read Favard table {results_file}: {e}") from e
    missing = [c for c in FAVARD_COLUMNS if c not in df.columns]
    if missing:
        raise PreconditionError(f"{results_file} lacks columns {missing}")
    logger.info(f"Loaded {len(df)} Favard rows from {results_file}")
    return df


def _format_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return "NaN" if np.isnan(value) else repr(float(value))
    return str(value)


def gnuplot_columns(df: pd.DataFrame, columns: Optional[Sequence[str]] = None) -> str:
    """
    Whitespace-separated columns with a '#' header line, readable by gnuplot

    Args:
        df (pd.DataFrame): Table to render
        columns (Optional[Sequence[str]]): Columns to emit, all by default

    Returns:
        str: The rendered block, newline terminated
    """
    columns = list(columns) if columns is not None else list(df.columns)
    lines = ["# " + " ".join(columns)]
    for row in df[columns].itertuples(index=False):
        lines.append(" ".join(_format_cell(x) for x in row))
    return "\n".join(lines) + "\n"
