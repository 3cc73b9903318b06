"""File I/O for the single-block SDPA subset."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conic_alm.model import synth_known_solution
from conic_alm.sdpa import SdpaFormatError, sdpa_read, sdpa_write


def test_round_trip_bitwise(tmp_path):
    inst = synth_known_solution(n=4, m=5, rank_x=2, seed=11)
    p = inst.problem
    path = tmp_path / "p.dat-s"
    sdpa_write(p, path)
    q = sdpa_read(path)
    assert np.array_equal(p.C, q.C)
    assert np.array_equal(p.constraint_mats, q.constraint_mats)
    assert np.array_equal(p.b, q.b)


def test_hand_written_file_matches_toy_constructor(tmp_path, toy):
    text = '"2x2 instance with rank-one solutions\n' \
           "2\n1\n2\n" \
           "1 1\n" \
           "0 1 1 1 1\n" \
           "0 1 1 2 -1\n" \
           "0 1 2 2 1\n" \
           "1 1 1 1 1\n" \
           "2 1 2 2 1\n"
    path = tmp_path / "toy.dat-s"
    path.write_text(text)
    p = sdpa_read(path)
    assert_allclose(p.C, toy.problem.C)
    assert_allclose(p.constraint_mats, toy.problem.constraint_mats)
    assert_allclose(p.b, toy.problem.b)


def test_comment_lines_ignored(tmp_path):
    text = '"first comment\n*second comment\n1\n1\n1\n2\n0 1 1 1 3\n1 1 1 1 1\n'
    path = tmp_path / "c.dat-s"
    path.write_text(text)
    p = sdpa_read(path)
    assert p.n == 1
    assert p.C[0, 0] == 3.0


def test_bad_index_reports_line(tmp_path):
    text = "1\n1\n2\n1\n0 1 1 3 1.0\n"
    path = tmp_path / "bad.dat-s"
    path.write_text(text)
    with pytest.raises(SdpaFormatError, match="line 5"):
        sdpa_read(path)


def test_lower_triangle_rejected(tmp_path):
    text = "1\n1\n2\n1\n1 1 2 1 1.0\n"
    path = tmp_path / "low.dat-s"
    path.write_text(text)
    with pytest.raises(SdpaFormatError, match="upper triangle"):
        sdpa_read(path)


def test_multi_block_unsupported(tmp_path):
    text = "1\n2\n2 3\n1\n"
    path = tmp_path / "mb.dat-s"
    path.write_text(text)
    with pytest.raises(SdpaFormatError, match="unsupported"):
        sdpa_read(path)


def test_diagonal_block_unsupported(tmp_path):
    text = "1\n1\n-3\n1\n"
    path = tmp_path / "diag.dat-s"
    path.write_text(text)
    with pytest.raises(SdpaFormatError, match="positive integer"):
        sdpa_read(path)


def test_malformed_value_reports_line(tmp_path):
    text = "1\n1\n2\n1\n0 1 1 1 abc\n"
    path = tmp_path / "val.dat-s"
    path.write_text(text)
    with pytest.raises(SdpaFormatError, match="line 5"):
        sdpa_read(path)


def test_wrong_b_count(tmp_path):
    text = "2\n1\n2\n1\n"
    path = tmp_path / "b.dat-s"
    path.write_text(text)
    with pytest.raises(SdpaFormatError, match="expected 2 entries"):
        sdpa_read(path)


def test_truncated_file(tmp_path):
    path = tmp_path / "short.dat-s"
    path.write_text("2\n1\n")
    with pytest.raises(SdpaFormatError, match="too short"):
        sdpa_read(path)
