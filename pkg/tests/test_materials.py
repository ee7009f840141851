import math
from functools import reduce

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from waferpack.materials import (
    LayerStack,
    MaterialLayer,
    SiliconSubstrate,
    collapse_stack,
    effective_conductivity_pair,
    load_catalog,
    paper_bump_stack,
    solder_alloy_transform,
    thickness_fraction,
)

UM = 1e-6

sigmas = st.floats(1e4, 1e8)
fractions = st.floats(0.0, 1.0)
thicknesses = st.floats(0.01, 100.0).map(lambda t: t * UM)


def pairwise_fold(stack):
    """Oracle: collapse two layers at a time with the two-layer formula."""
    def merge(a, b):
        total = a.thickness + b.thickness
        sigma = effective_conductivity_pair(a.conductivity, b.conductivity, b.thickness / total)
        return MaterialLayer(f"{a.name}+{b.name}", sigma, total)
    return reduce(merge, stack.layers)


def series_resistance(stack):
    """Oracle: resistance of each layer summed one by one."""
    total = 0.0
    for layer in stack.layers:
        total += layer.thickness / (layer.conductivity * stack.cross_section_area)
    return total


@st.composite
def stacks(draw, min_layers=2, max_layers=6):
    n = draw(st.integers(min_layers, max_layers))
    layers = [MaterialLayer(f"m{i}", 10 ** draw(st.floats(4, 8)), draw(thicknesses))
              for i in range(n)]
    return LayerStack(tuple(layers), draw(st.floats(1e-10, 1e-6)))


class TestPair:
    def test_uniform_unchanged(self):
        assert effective_conductivity_pair(3e7, 3e7, 0.37) == pytest.approx(3e7, rel=1e-15)

    def test_x_zero_is_layer_a(self):
        assert effective_conductivity_pair(1e6, 4.1e7, 0.0) == 1e6
        assert effective_conductivity_pair(1e6, 4.1e7, 1.0) == pytest.approx(4.1e7, rel=1e-15)

    def test_against_series_resistance(self):
        # R = (1-x) L / (sa S) + x L / (sb S); sigma = L / (R S), evaluated exactly
        assert effective_conductivity_pair(1.0e6, 4.1e7, 0.25) == pytest.approx(
            1322580.6451612904, rel=1e-14)

    @pytest.mark.parametrize("args", [(0.0, 1e6, 0.5), (-1.0, 1e6, 0.5), (1e6, 1e6, -0.1),
                                      (1e6, 1e6, 1.5), (math.inf, 1e6, 0.5)])
    def test_domain_errors(self, args):
        with pytest.raises(ValueError):
            effective_conductivity_pair(*args)

    @given(sigmas, sigmas, fractions)
    def test_exchange_symmetry(self, a, b, x):
        assert effective_conductivity_pair(a, b, x) == pytest.approx(
            effective_conductivity_pair(b, a, 1 - x), rel=1e-12)

    @given(sigmas, sigmas, fractions)
    def test_reciprocal_form_and_bounds(self, a, b, x):
        s = effective_conductivity_pair(a, b, x)
        assert 1 / s == pytest.approx((1 - x) / a + x / b, rel=1e-12)
        assert min(a, b) * (1 - 1e-12) <= s <= max(a, b) * (1 + 1e-12)


class TestThicknessFraction:
    def test_ausn_au_stack(self):
        stack = LayerStack((MaterialLayer("AuSn", 6.1e6, 19 * UM),
                            MaterialLayer("Au", 4.1e7, 6.3 * UM)), 1e-9)
        x = thickness_fraction(stack, 1)
        assert x == pytest.approx(6.3 / 25.3, rel=1e-12)
        assert round(x, 2) == 0.25

    def test_single_layer(self):
        stack = LayerStack((MaterialLayer("Cu", 5.8e7, 3 * UM),), 1e-9)
        assert thickness_fraction(stack, 0) == 1.0

    def test_symmetric(self):
        stack = LayerStack((MaterialLayer("a", 1e6, 2 * UM), MaterialLayer("b", 1e7, 2 * UM)), 1e-9)
        assert thickness_fraction(stack, 0) == thickness_fraction(stack, 1) == 0.5

    def test_bad_index(self):
        stack = LayerStack((MaterialLayer("Cu", 5.8e7, 3 * UM),), 1e-9)
        with pytest.raises(IndexError):
            thickness_fraction(stack, 1)

    @given(stacks(1, 6))
    def test_fractions_sum_to_one(self, stack):
        total = math.fsum(thickness_fraction(stack, i) for i in range(len(stack.layers)))
        assert total == pytest.approx(1.0, rel=1e-12)


class TestCollapse:
    def test_paper_bump(self):
        stack = paper_bump_stack()
        eff = collapse_stack(stack)
        assert eff.thickness == pytest.approx(26.3 * UM, rel=1e-12)
        # 26.3 / (19/6.1e6 + 6.3/4.1e7 + 1/2.38e6), exact rational evaluation
        assert eff.conductivity == pytest.approx(7130113.754731431, rel=1e-12)
        assert eff.conductivity == pytest.approx(pairwise_fold(stack).conductivity, rel=1e-12)

    def test_identical_layers(self):
        stack = LayerStack(tuple(MaterialLayer("Au", 4.1e7, 2 * UM) for _ in range(3)), 1e-9)
        eff = collapse_stack(stack)
        assert eff.conductivity == pytest.approx(4.1e7, rel=1e-15)
        assert eff.thickness == pytest.approx(6 * UM)

    @given(stacks())
    def test_matches_pairwise_fold(self, stack):
        assert collapse_stack(stack).conductivity == pytest.approx(
            pairwise_fold(stack).conductivity, rel=1e-12)

    @given(stacks())
    def test_resistance_preserved(self, stack):
        eff = collapse_stack(stack)
        assert eff.thickness / (eff.conductivity * stack.cross_section_area) == pytest.approx(
            series_resistance(stack), rel=1e-12)

    @given(stacks(1, 6))
    def test_harmonic_bound(self, stack):
        sigma = collapse_stack(stack).conductivity
        values = [layer.conductivity for layer in stack.layers]
        assert min(values) <= sigma <= max(values)


class TestAlloy:
    def test_reference_values(self):
        ausn, au = solder_alloy_transform(15.3 * UM, 10 * UM)
        assert ausn == pytest.approx(19 * UM, rel=1e-12)
        assert au == pytest.approx(6.3 * UM, rel=1e-12)

    def test_no_solder(self):
        assert solder_alloy_transform(7 * UM, 0.0) == (0.0, 7 * UM)

    def test_extra_gold(self):
        ausn, au = solder_alloy_transform(18 * UM, 10 * UM)
        assert ausn == pytest.approx(19 * UM, rel=1e-12)
        assert au == pytest.approx(9 * UM, rel=1e-12)

    def test_not_enough_gold(self):
        with pytest.raises(ValueError, match="not enough Au"):
            solder_alloy_transform(5 * UM, 10 * UM)

    @given(st.floats(0, 50), st.floats(0, 50))
    def test_total_conserved(self, au_um, sn_um):
        au, sn = au_um * UM + 0.9 * sn_um * UM, sn_um * UM
        ausn, rest = solder_alloy_transform(au, sn)
        assert ausn + rest == pytest.approx(au + sn, rel=1e-15, abs=1e-21)
        assert rest >= 0


class TestTypes:
    def test_layer_invariants(self):
        with pytest.raises(ValueError):
            MaterialLayer("x", 0.0, 1e-6)
        with pytest.raises(ValueError):
            MaterialLayer("x", 1e6, -1e-6)
        with pytest.raises(ValueError):
            MaterialLayer("x", 1e6, math.nan)

    def test_empty_stack(self):
        with pytest.raises(ValueError):
            LayerStack((), 1e-9)

    def test_total_thickness(self):
        stack = paper_bump_stack()
        assert stack.total_thickness == math.fsum(layer.thickness for layer in stack.layers)

    def test_named_substrates(self):
        assert SiliconSubstrate.named("LRS").resistivity == 15.0
        assert SiliconSubstrate.named("HRS1k").resistivity == 1000.0
        assert SiliconSubstrate.named("HRS2k").conductivity == pytest.approx(0.05)
        with pytest.raises(ValueError):
            SiliconSubstrate.named("glass")
        with pytest.raises(ValueError):
            SiliconSubstrate(0.0)


class TestCatalog:
    def test_bundled(self):
        cat = load_catalog()
        assert {"Au", "Sn", "AuSn", "Ti", "Cu", "conductive_adhesive"} <= set(cat)
        assert all(entry.conductivity > 0 for entry in cat.values())

    def test_override(self, tmp_path):
        path = tmp_path / "cat.json"
        path.write_text('{"Au": {"conductivity_S_per_m": 4.5e7, "notes": "x"}}')
        cat = load_catalog(path, overrides={"Ti": 2e6})
        assert cat["Au"].conductivity == 4.5e7
        assert cat["Ti"].conductivity == 2e6

    def test_bad_entry(self, tmp_path):
        path = tmp_path / "cat.json"
        path.write_text('{"Au": {"sigma": 4.5e7}}')
        with pytest.raises(ValueError, match="conductivity_S_per_m"):
            load_catalog(path)

    def test_unknown_material(self):
        with pytest.raises(ValueError, match="not in catalog"):
            MaterialLayer.from_catalog("unobtainium", 1e-6)


def test_random_stack_arrays_match():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = rng.integers(2, 7)
        layers = tuple(MaterialLayer(str(i), 10 ** rng.uniform(4, 8), rng.uniform(0.1, 50) * UM)
                       for i in range(n))
        stack = LayerStack(layers, 1e-9)
        assert collapse_stack(stack).conductivity == pytest.approx(
            pairwise_fold(stack).conductivity, rel=1e-12)
