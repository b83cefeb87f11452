import numpy as np
import pytest

from polcipher.services.experiments import ResultRecord, counted_record
from polcipher.services.results import (
    emit_csv,
    emit_plot,
    read_csv,
    read_jones_csv,
    write_jones_csv,
)
from polcipher.utils.exceptions import InvalidArgumentError, ResultWriteError


def _ber_records():
    return [
        counted_record("ber_sweep", "golden", 8, 0.0, None, "legit", 120, 1000),
        counted_record("ber_sweep", "golden", 8, 10.0, None, "legit", 3, 1000),
        counted_record("ber_sweep", "golden", 8, 0.0, None, "eve", 480, 1000),
        counted_record("ber_sweep", "golden", 8, 10.0, None, "eve", 505, 1000),
    ]


def test_csv_header_and_line_endings(tmp_path):
    records = [
        ResultRecord("q_vs_trace", "none", 8, None, 1.5, "none", aux=(("q", 3.25),)),
        ResultRecord("q_vs_trace", "none", 8, None, 0.5, "none"),
    ]
    path = emit_csv(records, tmp_path / "q.csv")
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    lines = raw.decode("utf-8").splitlines()
    assert lines[0] == "experiment,scheme,m,snr_db,parameter,role,errors,bits,ber,aux1_name,aux1"
    assert lines[1] == "q_vs_trace,none,8,,1.5,none,0,0,0,q,3.25"
    assert lines[2] == "q_vs_trace,none,8,,0.5,none,0,0,0,,"


def test_csv_round_trip_keeps_full_precision(tmp_path):
    records = _ber_records() + [
        ResultRecord("ber_sweep", "golden", 8, 1 / 3, 0.1, "legit", aux=(("x", np.pi),)),
    ]
    path = emit_csv(records, tmp_path / "out" / "ber.csv")
    assert read_csv(path) == records


def test_read_csv_rejects_foreign_file(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(InvalidArgumentError):
        read_csv(path)


def test_plot_is_written(tmp_path):
    path = emit_plot(_ber_records(), tmp_path / "ber.svg")
    assert path.exists()
    assert b"<svg" in path.read_bytes()


def test_plot_rejects_empty_and_mixed_input(tmp_path):
    with pytest.raises(InvalidArgumentError):
        emit_plot([], tmp_path / "empty.svg")
    mixed = _ber_records()[:1] + [
        ResultRecord("stokes_stats", "none", 8, 0.0, 1.0, "none"),
    ]
    with pytest.raises(InvalidArgumentError):
        emit_plot(mixed, tmp_path / "mixed.svg")


def test_jones_file_round_trip(tmp_path, jones_batch):
    path = write_jones_csv(jones_batch, tmp_path / "field.csv")
    np.testing.assert_array_equal(read_jones_csv(path), jones_batch)


def test_jones_file_must_have_header(tmp_path):
    path = tmp_path / "field.csv"
    path.write_text("1,0,0,0\n")
    with pytest.raises(InvalidArgumentError):
        read_jones_csv(path)


def test_empty_and_single_record_files(tmp_path):
    empty = emit_csv([], tmp_path / "empty.csv")
    assert empty.read_text() == "experiment,scheme,m,snr_db,parameter,role,errors,bits,ber\n"
    assert read_csv(empty) == []
    single = emit_csv(_ber_records()[:1], tmp_path / "single.csv")
    assert len(single.read_text().splitlines()) == 2
    assert read_csv(single) == _ber_records()[:1]


def test_plot_into_unwritable_location(tmp_path):
    blocker = tmp_path / "taken"
    blocker.write_text("")
    with pytest.raises(ResultWriteError):
        emit_plot(_ber_records(), blocker / "ber.svg")
