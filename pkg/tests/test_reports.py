import math

import pandas as pd
import pytest

from cyclo_slv.exceptions import PreconditionError
from cyclo_slv.favard import FavardEstimate
from cyclo_slv.reports import (
    FAVARD_COLUMNS,
    census_frame,
    favard_frame,
    generate_census_summary,
    gnuplot_columns,
    is_nonincreasing,
    load_favard_table,
    log_log_slopes,
    minimal_weights,
)
from cyclo_slv.sums import census
from utils.filesystem import write_csv


@pytest.fixture(scope="module")
def census_df():
    return census_frame(census(6, 4, n_jobs=1))


@pytest.fixture
def estimates():
    return [
        FavardEstimate(1, 64, 1.0, 1e-3, 4),
        FavardEstimate(2, 64, 0.5, 1e-3, 16),
        FavardEstimate(4, 64, 0.25, 1e-3, 256),
    ]


def test_census_frame(census_df):
    assert list(census_df.columns) == ["weight", "residues", "minimal", "template", "lam_leung"]
    assert census_df["weight"].tolist() == [2, 3, 4, 4]
    assert census_df["residues"].tolist() == ["0 3", "0 2 4", "0 1 3 4", "0 0 3 3"]
    assert census_df["template"].tolist() == ["R_2", "R_3", "non-minimal", "non-minimal"]
    assert minimal_weights(census_df) == [2, 3]


def test_census_summary(census_df):
    summary = generate_census_summary(census_df)
    assert summary.to_dict("records") == [
        {"weight": 2, "template": "R_2", "count": 1},
        {"weight": 3, "template": "R_3", "count": 1},
        {"weight": 4, "template": "non-minimal", "count": 2},
    ]
    empty = generate_census_summary(census_df.iloc[0:0])
    assert list(empty.columns) == ["weight", "template", "count"]


def test_log_log_slopes():
    slopes = log_log_slopes([1, 2, 4], [1.0, 0.5, 0.25])
    assert math.isnan(slopes[0])
    assert slopes[1:].tolist() == pytest.approx([-1.0, -1.0])
    assert math.isnan(log_log_slopes([3], [0.7])[0])


def test_favard_frame(estimates):
    df = favard_frame(estimates)
    assert list(df.columns) == FAVARD_COLUMNS
    assert df["points"].tolist() == [4, 16, 256]
    assert is_nonincreasing(df)
    assert not is_nonincreasing(df.iloc[::-1])


def test_favard_table_round_trip(estimates, tmp_path):
    path = str(tmp_path / "out" / "favard.csv")
    assert write_csv(favard_frame(estimates), path)
    loaded = load_favard_table(path)
    assert loaded["favard"].tolist() == [1.0, 0.5, 0.25]


def test_load_favard_table_errors(tmp_path):
    with pytest.raises(PreconditionError):
        load_favard_table(str(tmp_path / "missing.csv"))
    partial = tmp_path / "partial.csv"
    pd.DataFrame({"n": [1]}).to_csv(partial, index=False)
    with pytest.raises(PreconditionError):
        load_favard_table(str(partial))


def test_gnuplot_columns(estimates):
    df = favard_frame(estimates)
    text = gnuplot_columns(df, ["n", "favard"])
    assert text.splitlines() == ["# n favard", "1 1.0", "2 0.5", "4 0.25"]
    assert gnuplot_columns(df, ["log_log_slope"]).splitlines()[1] == "NaN"
    assert gnuplot_columns(df).startswith("# " + " ".join(FAVARD_COLUMNS))
