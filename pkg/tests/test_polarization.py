import math

import numpy as np
import pytest

from polcipher.services.polarization import (
    SphericalCoords,
    degree_of_polarization,
    jones_to_stokes,
    spherical_to_jones,
    stokes_to_jones,
)
from polcipher.utils.exceptions import InvalidArgumentError, PolarizationDomainError


def test_jones_to_stokes_reference_states():
    states = np.array([
        [1, 0],
        [0, 1],
        [1 / math.sqrt(2), 1 / math.sqrt(2)],
        [1 / math.sqrt(2), 1j / math.sqrt(2)],
    ])
    expected = np.array([
        [1, 1, 0, 0],
        [1, -1, 0, 0],
        [1, 0, 1, 0],
        [1, 0, 0, 1],
    ])
    np.testing.assert_allclose(jones_to_stokes(states), expected, atol=1e-15)


def test_stokes_is_fully_polarized(jones_batch):
    s = jones_to_stokes(jones_batch)
    np.testing.assert_allclose(np.linalg.norm(s[:, 1:], axis=1), s[:, 0], rtol=1e-12)


def test_stokes_to_jones_reproduces_stokes(jones_batch):
    s = jones_to_stokes(jones_batch)
    np.testing.assert_allclose(jones_to_stokes(stokes_to_jones(s)), s, atol=1e-12)


def test_stokes_to_jones_phase_convention():
    e = stokes_to_jones([2.0, 0.0, 0.0, 2.0])
    np.testing.assert_allclose(e, [np.exp(-0.25j * math.pi), np.exp(0.25j * math.pi)], atol=1e-15)


def test_stokes_to_jones_rejects_partial_polarization():
    with pytest.raises(PolarizationDomainError):
        stokes_to_jones([1.0, 0.5, 0.0, 0.0])


def test_stokes_to_jones_rejects_zero_energy():
    with pytest.raises(InvalidArgumentError):
        stokes_to_jones([0.0, 0.0, 0.0, 0.0])


def test_degree_of_polarization():
    assert degree_of_polarization([2.0, 1.0, 0.0, 0.0]) == pytest.approx(0.5)
    assert degree_of_polarization([1.0, 0.0, 0.0, 0.0]) == 0.0
    np.testing.assert_allclose(
        degree_of_polarization([[1.0, 0.0, 1.0, 0.0], [4.0, 0.0, 0.0, 1.0]]), [1.0, 0.25]
    )


def test_degree_of_polarization_above_one_is_rejected():
    with pytest.raises(PolarizationDomainError):
        degree_of_polarization([1.0, 2.0, 0.0, 0.0])


@pytest.mark.parametrize("coords, expected", [
    ((2.0, math.pi / 2, math.pi / 2), [2.0, 0.0, 0.0, 2.0]),
    ((1.0, math.pi / 2, math.pi), [1.0, 0.0, -1.0, 0.0]),
    ((1.0, 0.0, 0.0), [1.0, 1.0, 0.0, 0.0]),
    ((4.0, math.pi / 2, 0.0), [4.0, 0.0, 4.0, 0.0]),
])
def test_spherical_coordinates_map_onto_sphere(coords, expected):
    e = spherical_to_jones(SphericalCoords(*coords))
    np.testing.assert_allclose(jones_to_stokes(e), expected, atol=1e-12)


@pytest.mark.parametrize("energy, elevation, azimuth", [
    (-1.0, 0.0, 0.0),
    (1.0, math.pi, 0.0),
    (1.0, 0.0, 2 * math.pi),
    (math.nan, 0.0, 0.0),
])
def test_spherical_coordinates_validate_ranges(energy, elevation, azimuth):
    with pytest.raises(InvalidArgumentError):
        SphericalCoords(energy, elevation, azimuth)


def test_malformed_input_is_rejected():
    with pytest.raises(InvalidArgumentError):
        jones_to_stokes([1.0, 0.0, 0.0])
    with pytest.raises(InvalidArgumentError):
        jones_to_stokes([np.nan, 0.0])
