import pytest

from thc_threshold_bandit.harness.report import CSV_COLUMNS, emit_csv, render_markdown, rows_to_dataframe
from thc_threshold_bandit.harness.sweep import CellFailure, SweepRow

HEADER = "policy,n,delay,success_rate,mean_max_pending,mean_pending_ratio,reps\n"


@pytest.fixture
def rows():
    return [
        SweepRow(policy="EVT", n=200, delay="none", success_rate=0.97, mean_max_pending=0.0, mean_pending_ratio=0.0, reps=100),
        SweepRow(
            policy="AP_EVT",
            n=400,
            delay="max_pending(4)",
            success_rate=2 / 3,
            mean_max_pending=4.0,
            mean_pending_ratio=0.123456789,
            reps=3,
        ),
    ]


def test_empty_rows_give_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], path)
    assert path.read_text() == HEADER


def test_rows_are_sorted_with_six_significant_digits(tmp_path, rows):
    path = tmp_path / "nested" / "sweep.csv"
    emit_csv(rows, path)
    assert path.read_text().splitlines() == [
        HEADER.strip(),
        "AP_EVT,400,max_pending(4),0.666667,4,0.123457,3",
        "EVT,200,none,0.97,0,0,100",
    ]


def test_identical_rows_give_identical_bytes(tmp_path, rows):
    emit_csv(rows, tmp_path / "a.csv")
    emit_csv(list(reversed(rows)), tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_unwritable_path(tmp_path, rows):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="sweep.csv"):
        emit_csv(rows, blocker / "sweep.csv")


def test_dataframe_columns(rows):
    dataframe = rows_to_dataframe(rows)
    assert list(dataframe.columns) == CSV_COLUMNS
    assert dataframe["policy"].tolist() == ["AP_EVT", "EVT"]


def test_render_markdown(rows):
    table = render_markdown(rows)
    lines = table.splitlines()
    assert len(lines) == 4
    assert "success_rate" in lines[0]
    assert "max_pending(4)" in table
    assert "0.6667" in table


def test_render_markdown_other_records():
    table = render_markdown([CellFailure(policy="ATP", n=4, delay="none", reason="Budget n=4 must exceed 2K=4")])
    assert "reason" in table
    assert "Budget n=4 must exceed 2K=4" in table


def test_render_markdown_empty():
    assert render_markdown([]) == ""


def test_render_markdown_rejects_plain_objects():
    with pytest.raises(TypeError):
        render_markdown([{"policy": "ATP"}])
