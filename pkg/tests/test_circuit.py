import cmath
import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import dblquad

from waferpack.circuit import (
    Line,
    Series,
    Shunt,
    adhesive_series_impedance,
    assemble,
    bump_series_impedance,
    cap_loading_admittance,
    cylinder_inductance,
    line_parameters,
    skin_depth,
    via_series_impedance,
    via_shunt_admittance,
)
from waferpack.geometry import BondingSpec, BumpGeometry, ViaGeometry, paper_default, reflow
from waferpack.materials import MaterialLayer, SiliconSubstrate, paper_bump_stack

UM = 1e-6
MU0 = 4e-7 * math.pi * 1.00000000055
EPS0 = 8.8541878128e-12
CU = MaterialLayer("Cu", 5.8e7, 250 * UM)
freqs = st.floats(1e8, 2e10)


def via(d=60, h=250, ox=2, ret=450):
    return ViaGeometry(d * UM, h * UM, ox * UM, ret * UM)


def ring_resistance(height, radius, sigma, f, n=200_000):
    """Oracle: sum conducting rings on a fine radial grid."""
    delta = 1 / math.sqrt(math.pi * f * MU0 * sigma)
    edges = np.linspace(0.0, radius, n + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    area = np.sum(2 * np.pi * mid * np.diff(edges) * (mid >= radius - delta))
    return height / (sigma * area)


def neumann_inductance(length, radius):
    """Oracle: partial self-inductance of a thin tube, Neumann double integral."""
    val, _ = dblquad(lambda z1, z2: 1 / math.hypot(z1 - z2, radius),
                     0, length, 0, length, epsabs=0, epsrel=1e-10)
    return MU0 / (4 * math.pi) * val


class TestViaSeries:
    def test_skin_depth_copper(self):
        # copper at 1 GHz is about 2.09 um
        assert skin_depth(5.8e7, 1e9) == pytest.approx(2.0898e-6, rel=1e-3)

    def test_dc_limit(self):
        v = via()
        z = via_series_impedance(v, CU, 1.0)
        assert z.real == pytest.approx(v.height / (5.8e7 * math.pi * v.conductor_radius**2),
                                       rel=1e-12)

    @pytest.mark.parametrize("f", [1e7, 1e8, 1e9, 1e10])
    def test_ring_oracle(self, f):
        v = via()
        got = via_series_impedance(v, CU, f).real
        assert got == pytest.approx(ring_resistance(v.height, v.conductor_radius, 5.8e7, f),
                                    rel=1e-3)

    def test_skin_saturation(self):
        # deep skin: R ~ h / (sigma * 2 pi r delta)
        v, f = via(), 1e11
        delta = skin_depth(5.8e7, f)
        approx = v.height / (5.8e7 * 2 * math.pi * v.conductor_radius * delta)
        assert via_series_impedance(v, CU, f).real == pytest.approx(approx, rel=0.02)

    @given(st.floats(1e6, 1e9), st.floats(1.01, 10))
    def test_resistance_non_decreasing(self, f, k):
        v = via()
        assert via_series_impedance(v, CU, f * k).real >= via_series_impedance(v, CU, f).real

    def test_inductance_long_wire(self):
        length, radius = 1e-3, 1e-6
        assert cylinder_inductance(length, 2 * radius) == pytest.approx(
            neumann_inductance(length, radius), rel=1e-3)

    def test_inductance_via_aspect(self):
        v = via()
        assert cylinder_inductance(v.height, 2 * v.conductor_radius) == pytest.approx(
            neumann_inductance(v.height, v.conductor_radius), rel=0.10)

    def test_inductance_clamped(self):
        assert cylinder_inductance(1e-6, 100e-6) == 0.0

    def test_reactance_linear_in_f(self):
        v = via()
        x = via_series_impedance(v, CU, np.array([1e9, 2e9])).imag
        assert x[1] == pytest.approx(2 * x[0], rel=1e-12)


def shunt_oracle(v, rho, eps_r, f):
    """Oracle: scalar impedance sum of oxide and silicon."""
    r = v.diameter / 2 - v.sidewall_oxide_thickness
    w = 2 * math.pi * f
    c_ox = 2 * math.pi * EPS0 * 3.9 * v.height / math.log((r + v.sidewall_oxide_thickness) / r)
    geo = 2 * math.pi * v.height / math.log(v.return_radius / (r + v.sidewall_oxide_thickness))
    y_si = (100 / rho) * geo + 1j * w * EPS0 * eps_r * geo
    return 1 / (1 / (1j * w * c_ox) + 1 / y_si)


class TestViaShunt:
    @pytest.mark.parametrize("rho", [15, 1000, 2000])
    @pytest.mark.parametrize("f", [1e8, 5e9, 1e10])
    def test_oracle(self, rho, f):
        v = via()
        got = complex(via_shunt_admittance(v, SiliconSubstrate(rho), f))
        want = shunt_oracle(v, rho, 11.9, f)
        assert cmath.isclose(got, want, rel_tol=1e-9)

    def test_lossless_limit_purely_capacitive(self):
        y = via_shunt_admittance(via(), SiliconSubstrate(1e30), np.array([1e9, 5e9]))
        assert np.all(np.abs(y.real) <= 1e-12 * np.abs(y.imag))

    def test_thicker_oxide_isolates(self):
        cap = SiliconSubstrate(15)
        thin = abs(via_shunt_admittance(via(ox=2), cap, 5e9))
        thick = abs(via_shunt_admittance(via(ox=4), cap, 5e9))
        assert thick < thin

    @given(freqs, st.floats(1, 1e5))
    def test_passive(self, f, rho):
        assert via_shunt_admittance(via(), SiliconSubstrate(rho), f).real >= 0


class TestBump:
    def test_paper_bump_resistance(self):
        bump = BumpGeometry.from_stack(30 * UM, paper_bump_stack())
        # (19/6.1e6 + 6.3/4.1e7 + 1/2.38e6) um / (pi (30 um)^2)
        assert bump_series_impedance(bump, 1e9).real == pytest.approx(
            0.0013045685594315402, rel=1e-12)

    def test_reflow_lowers_resistance(self):
        bump = BumpGeometry.from_stack(30 * UM, paper_bump_stack())
        assert bump_series_impedance(reflow(bump, 40 * UM), 1e9).real < \
            bump_series_impedance(bump, 1e9).real

    def test_adhesive_resistance(self):
        spec = BondingSpec.adhesive_layer(5 * UM)
        z = adhesive_series_impedance(spec, math.pi * (30 * UM) ** 2, np.array([1e9, 5e9]))
        assert np.allclose(z, 0.01768388256576615, rtol=1e-12, atol=0)

    @given(st.floats(0.1, 10))
    def test_adhesive_linear_in_thickness(self, t_um):
        area = 1e-9
        one = adhesive_series_impedance(BondingSpec.adhesive_layer(1e-6), area, 1e9).real
        many = adhesive_series_impedance(BondingSpec.adhesive_layer(t_um * UM), area, 1e9).real
        assert many == pytest.approx(one * t_um, rel=1e-12)

    def test_adhesive_needs_adhesive_mode(self):
        with pytest.raises(ValueError, match="adhesive"):
            adhesive_series_impedance(BondingSpec.none(), 1e-9, 1e9)


class TestCapLoading:
    cap = SiliconSubstrate(15)

    def test_far_cap_vanishes(self):
        y = cap_loading_admittance(1.0, self.cap, 100 * UM, 5e9)
        near = cap_loading_admittance(26.3 * UM, self.cap, 100 * UM, 5e9)
        assert abs(y) < 1e-4 * abs(near)

    def test_insulating_cap_is_lossless(self):
        y = cap_loading_admittance(26.3 * UM, SiliconSubstrate(1e30), 100 * UM, 5e9)
        assert abs(y.real) <= 1e-12 * abs(y.imag)

    def test_oracle(self):
        gap, width, f = 26.3 * UM, 100 * UM, 5e9
        w = 2 * math.pi * f
        y_gap = 1j * w * EPS0 * width / gap
        y_slab = (100 / 15 + 1j * w * EPS0 * 11.9) * width / 250e-6
        want = 1 / (1 / y_gap + 1 / y_slab)
        assert cmath.isclose(complex(cap_loading_admittance(gap, self.cap, width, f)), want,
                             rel_tol=1e-9)

    @pytest.mark.parametrize("f", [1e9, 5e9, 8e9])
    def test_low_resistivity_lossier(self, f):
        lrs = cap_loading_admittance(26.3 * UM, SiliconSubstrate(15), 100 * UM, f)
        hrs = cap_loading_admittance(26.3 * UM, SiliconSubstrate(2000), 100 * UM, f)
        assert lrs.real > hrs.real

    @given(freqs, st.floats(1e-2, 1e3), st.floats(1.01, 5))
    def test_loss_grows_with_conductivity_below_relaxation(self, f, sigma, k):
        gap, t = 26.3 * UM, 250e-6
        # composite relaxation: sigma_peak = w eps0 (eps_r + t / gap)
        peak = 2 * math.pi * f * EPS0 * (11.9 + t / gap)
        if sigma * k > peak:
            return
        lo = cap_loading_admittance(gap, SiliconSubstrate(100 / sigma), 100 * UM, f)
        hi = cap_loading_admittance(gap, SiliconSubstrate(100 / (sigma * k)), 100 * UM, f)
        assert hi.real > lo.real

    @given(freqs, st.floats(5, 200), st.floats(1.01, 4))
    def test_magnitude_falls_with_gap(self, f, gap_um, k):
        a = abs(cap_loading_admittance(gap_um * UM, self.cap, 100 * UM, f))
        b = abs(cap_loading_admittance(gap_um * k * UM, self.cap, 100 * UM, f))
        assert b < a

    def test_rejects_zero_gap(self):
        with pytest.raises(ValueError):
            cap_loading_admittance(0.0, self.cap, 100 * UM, 1e9)


class TestAssembly:
    def test_topology(self):
        chain = assemble(paper_default(), np.array([5e9]))
        assert [type(e) for e in chain] == [Series, Shunt, Line, Shunt, Series]
        assert np.array_equal(chain[0].z, chain[4].z)
        assert np.array_equal(chain[1].y, chain[3].y)

    def test_adhesive_adds_series_resistance(self):
        base = paper_default()
        glued = dataclasses.replace(base, bonding=BondingSpec.adhesive_layer(5 * UM))
        f = np.array([5e9])
        extra = assemble(glued, f)[0].z.real - assemble(base, f)[0].z.real
        assert extra[0] == pytest.approx(
            5 * UM / (1e5 * glued.contact_area()), rel=1e-9)

    @settings(max_examples=30)
    @given(freqs, st.floats(1, 1e4))
    def test_elements_passive(self, f, rho):
        base = paper_default()
        design = dataclasses.replace(base, cap=dataclasses.replace(base.cap, resistivity=rho))
        chain = assemble(design, np.array([f]))
        assert chain[0].z.real[0] >= 0
        assert chain[1].y.real[0] >= 0
        assert chain[2].gamma.real[0] >= 0

    def test_cap_raises_line_loss(self):
        d, f = paper_default(), np.array([5e9])
        _, g_cap = line_parameters(d, f)
        _, g_bare = line_parameters(d, f, capped=False)
        assert g_cap.real[0] > g_bare.real[0]

    def test_bare_line_impedance(self):
        d = paper_default()
        z0, _ = line_parameters(d, np.array([1e10]), capped=False)
        assert abs(z0[0]) == pytest.approx(50, rel=0.01)
