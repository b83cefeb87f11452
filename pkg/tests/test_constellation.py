import math

import numpy as np
import pytest

from polcipher.services.constellation import (
    ANTIPRISM_BIT_MAP,
    balanced_bit_map,
    bits_to_labels,
    build_constellation,
    constellation_from_points,
    constellation_path,
    demap,
    demap_labels,
    golden_spiral,
    half_turn_confusion,
    hamming_table,
    labelled_points,
    labelling_imbalance,
    labels_to_bits,
    load_points,
    map_bits,
    map_labels,
    min_pairwise_angle,
    save_points,
)
from polcipher.utils.exceptions import InvalidArgumentError


@pytest.mark.parametrize("m", [2, 4, 8])
def test_closed_form_constellations(m):
    c = build_constellation(m)
    assert c.size == m
    assert c.points.shape == (m, 3)
    np.testing.assert_allclose(np.linalg.norm(c.points, axis=1), 1.0, atol=1e-12)
    assert sorted(c.bit_map) == list(range(m))


def test_tetrahedron_angle():
    assert build_constellation(4).min_angle == pytest.approx(math.acos(-1.0 / 3.0), abs=1e-12)


def test_antiprism_edges_are_equal():
    points = build_constellation(8).points
    d = np.linalg.norm(points[:, None] - points[None], axis=-1)
    np.fill_diagonal(d, np.inf)
    nearest = d.min(axis=1)
    np.testing.assert_allclose(nearest, nearest[0], rtol=1e-12)
    # each vertex touches two square edges and two zig-zag edges
    assert np.all(np.sum(np.isclose(d, nearest[0], rtol=1e-9), axis=1) == 4)
    assert build_constellation(8).min_angle > math.radians(74.0)


def test_optimized_constellation_spreads_points():
    c = build_constellation(16)
    assert c.min_angle > math.radians(45.0)
    assert c.min_angle >= min_pairwise_angle(golden_spiral(16)) - 1e-12


def test_unsupported_size_is_rejected():
    with pytest.raises(InvalidArgumentError):
        build_constellation(6)


def test_label_bits_are_msb_first():
    assert bits_to_labels([1, 0, 1], 3) == 5
    np.testing.assert_array_equal(labels_to_bits(5, 3), [1, 0, 1])
    np.testing.assert_array_equal(labels_to_bits([0, 3], 2), [[0, 0], [1, 1]])


def test_bit_blocks_are_validated():
    with pytest.raises(InvalidArgumentError):
        bits_to_labels([1, 0], 3)
    with pytest.raises(InvalidArgumentError):
        bits_to_labels([1, 2, 0], 3)


@pytest.mark.parametrize("m", [2, 4, 8, 16])
def test_map_then_demap_recovers_every_label(m):
    c = build_constellation(m)
    labels = np.arange(m)
    s = map_labels(c, labels)
    np.testing.assert_allclose(s[:, 0], 1.0)
    np.testing.assert_array_equal(demap_labels(c, s), labels)
    bits = labels_to_bits(labels, c.bits_per_symbol)
    np.testing.assert_array_equal(demap(c, map_bits(c, bits)), bits)


def test_demap_is_scale_invariant():
    c = build_constellation(4)
    s = map_labels(c, [2]) * 3.5
    assert demap_labels(c, s)[0] == 2


def test_map_labels_out_of_range():
    with pytest.raises(InvalidArgumentError):
        map_labels(build_constellation(4), [4])


def test_save_and_load_points(tmp_path):
    points = build_constellation(8).points
    path = save_points(points, tmp_path / "sphere_8.txt")
    np.testing.assert_allclose(load_points(path), points, atol=1e-15)
    assert b"\r\n" not in path.read_bytes()


def test_load_points_rejects_malformed_file(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1 0\n")
    with pytest.raises(InvalidArgumentError):
        load_points(path)


def test_constellation_size_must_be_power_of_two():
    with pytest.raises(InvalidArgumentError):
        constellation_from_points(golden_spiral(3))


@pytest.mark.parametrize("m, min_degrees", [(16, 52.0), (32, 37.0)])
def test_baked_constellations(m, min_degrees):
    c = build_constellation(m)
    assert c.min_angle > math.radians(min_degrees)
    # files list points in label order
    assert c.bit_map == tuple(range(m))
    np.testing.assert_allclose(labelled_points(c), load_points(constellation_path(m)), atol=1e-15)


def test_antiprism_uses_balanced_labels():
    c = build_constellation(8)
    assert c.bit_map == ANTIPRISM_BIT_MAP
    confusion = half_turn_confusion(c.points)
    labels = np.argsort(c.bit_map)
    assert labelling_imbalance(confusion, labels) < labelling_imbalance(confusion, np.arange(8))


def test_balanced_bit_map_improves_on_identity():
    points = golden_spiral(16)
    bit_map = balanced_bit_map(points, axes=1024)
    assert sorted(bit_map) == list(range(16))
    confusion = half_turn_confusion(points, axes=1024)
    assert labelling_imbalance(confusion, np.argsort(bit_map)) <= \
        labelling_imbalance(confusion, np.arange(16)) + 1e-12


def test_half_turn_confusion_rows_are_distributions():
    confusion = half_turn_confusion(build_constellation(4).points, axes=512)
    np.testing.assert_allclose(confusion.sum(axis=1), 1.0)
    np.testing.assert_array_equal(hamming_table(2), [[0, 1, 1, 2], [1, 0, 2, 1],
                                                     [1, 2, 0, 1], [2, 1, 1, 0]])


# each input is equidistant from both poles
@pytest.mark.parametrize("s", [
    [1.0, 1.0, 0.0, 0.0],
    [2.0, 0.0, -2.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [1.0, -0.6, 0.8, 0.0],
])
def test_demap_tie_goes_to_lower_index(s):
    assert demap_labels(build_constellation(2), s) == 0


def test_load_points_skips_comments(tmp_path):
    points = build_constellation(4).points
    path = save_points(points, tmp_path / "sphere_4.txt", header="four points")
    lines = path.read_text().splitlines()
    assert lines[0] == "# four points"
    path.write_text("\n".join(lines[:1] + ["", "# spare"] + lines[1:]) + "\n")
    np.testing.assert_allclose(load_points(path), points, atol=1e-15)
