import math

import numpy as np
import pytest

from adrdesign import CpcSpec, TruncationSpec, apply_truncation, cpc_derive


REF = CpcSpec(acceptance_angle=math.radians(10.0), refractive_index=1.0,
              exit_diameter=1.5e-3)


def test_reference_cpc_gain_length_area():
    geo = cpc_derive(REF)
    assert geo.gain == pytest.approx(33.163437, rel=1e-6)
    assert geo.length == pytest.approx(2.874817e-2, rel=1e-6)
    assert geo.entrance_area == pytest.approx(0.586046e-4, rel=1e-6)
    assert geo.entrance_diameter > geo.exit_diameter


def test_30deg_closed_form():
    geo = cpc_derive(CpcSpec(math.pi / 6, 1.0, 1e-3))
    assert geo.gain == pytest.approx(4.0, rel=1e-12)
    assert geo.entrance_diameter == pytest.approx(2e-3, rel=1e-12)


@pytest.mark.parametrize("theta", [0.0, -0.1, math.radians(30.5), math.radians(45)])
def test_acceptance_angle_domain(theta):
    with pytest.raises(ValueError):
        CpcSpec(acceptance_angle=theta)


def test_gain_strictly_decreasing_in_theta():
    thetas = np.linspace(math.radians(1), math.radians(30), 120)
    gains = [cpc_derive(CpcSpec(t, 1.7, 1e-3)).gain for t in thetas]
    assert all(g1 > g2 for g1, g2 in zip(gains, gains[1:]))


def test_etendue_relation(rng):
    for _ in range(200):
        theta = rng.uniform(0.01, math.pi / 6)
        n = rng.uniform(1.0, 2.0)
        d2 = rng.uniform(1e-4, 5e-3)
        geo = cpc_derive(CpcSpec(theta, n, d2))
        assert geo.entrance_diameter * math.sin(theta) == pytest.approx(d2 * n, rel=1e-12)


def test_truncation_identity():
    geo = cpc_derive(REF)
    same = apply_truncation(geo, TruncationSpec(1.0, 1.0))
    assert same == geo


def test_truncation_scaling():
    geo = cpc_derive(REF)
    cut = apply_truncation(geo, TruncationSpec(0.6, 0.9))
    assert cut.length == pytest.approx(0.6 * geo.length, rel=1e-14)
    assert cut.gain == pytest.approx(0.9 * geo.gain, rel=1e-14)
    assert cut.entrance_area == pytest.approx(0.9 * geo.entrance_area, rel=1e-12)
    assert cut.exit_diameter == geo.exit_diameter
    assert cut.acceptance_angle == geo.acceptance_angle


def test_truncated_reference_values():
    # scaling the reference values: 2.87 cm -> 1.72 cm, 0.586 -> 0.527 cm^2
    cut = apply_truncation(cpc_derive(REF), TruncationSpec(0.6, 0.9))
    assert cut.length == pytest.approx(1.724890e-2, rel=1e-5)
    assert cut.entrance_area == pytest.approx(0.527441e-4, rel=1e-5)


def test_truncation_composes_multiplicatively():
    geo = cpc_derive(CpcSpec(math.radians(12), 1.7, 2e-3))
    once = apply_truncation(apply_truncation(geo, TruncationSpec(0.9, 0.97)),
                            TruncationSpec(0.7, 0.93))
    combined = apply_truncation(geo, TruncationSpec(0.9 * 0.7, 0.97 * 0.93))
    assert once.length == pytest.approx(combined.length, rel=1e-14)
    assert once.gain == pytest.approx(combined.gain, rel=1e-14)
    assert once.entrance_diameter == pytest.approx(combined.entrance_diameter, rel=1e-14)


def test_truncation_validity_range():
    with pytest.raises(ValueError):
        TruncationSpec(length_ratio=0.4)
    with pytest.raises(ValueError):
        TruncationSpec(length_ratio=0.6, gain_retention=0.0)
    with pytest.raises(ValueError):
        TruncationSpec(length_ratio=1.2)
