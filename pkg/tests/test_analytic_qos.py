import itertools
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ramac import metrics
from ramac.analytic_qos import (
    ChannelSplit,
    QosEquilibrium,
    QosParams,
    StarvationWarning,
    class_access_metrics,
    class_metrics,
    qos_closed_form_states,
    qos_transition_matrix,
    solve_equilibrium_qos,
    split_channels,
)
from ramac.analytic_single import SingleParams, single_metrics, solve_equilibrium
from ramac.errors import DegenerateLoadError, DomainError
from ramac.markov_core import stationary_distribution
from ramac.phy_channel import packet_error_probability

E_REF = packet_error_probability(1e-3, 500)

QOS_GRID = list(
    itertools.product(
        [0.1, 0.5, 0.9],  # a
        [0.1, 0.9],  # c1 = c2 variations
        [0.0, 0.3, 0.6],  # e
        [1, 4, 8],  # n
        [5, 50],  # N
        [0.25, 0.5, 0.75],  # l
        [1, 2, 4],  # m
    )
)


def qparams(**kw):
    base = dict(N=50, a=0.5, l=0.75, m=2.0, k_max=20, c1=0.75, c2=0.75, n=4, e=E_REF, L1=5, L2=5)
    base.update(kw)
    return QosParams(**base)


class TestSplit:
    def test_paper_point(self):
        assert split_channels(0.75, 2, 20) == ChannelSplit(17, 3)

    def test_symmetric(self):
        assert split_channels(0.5, 1, 20) == ChannelSplit(10, 10)

    def test_all_high(self):
        assert split_channels(1.0, 2, 20) == ChannelSplit(20, 0)

    def test_all_low(self):
        assert split_channels(0.0, 2, 20) == ChannelSplit(0, 20)

    @given(st.floats(0.0, 1.0), st.floats(0.1, 10.0), st.floats(0.0, 5.0), st.integers(2, 64))
    def test_monotone_in_m(self, l, m, dm, k_max):
        assert split_channels(l, m + dm, k_max).k1 >= split_channels(l, m, k_max).k1

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.1, 10.0), st.integers(2, 64))
    def test_monotone_in_l(self, l1, l2, m, k_max):
        lo, hi = sorted((l1, l2))
        assert split_channels(hi, m, k_max).k1 >= split_channels(lo, m, k_max).k1

    @given(st.floats(0.0, 1.0), st.floats(0.1, 10.0), st.integers(2, 64))
    def test_partition(self, l, m, k_max):
        s = split_channels(l, m, k_max)
        assert s.k1 + s.k2 == k_max and s.k1 >= 0 and s.k2 >= 0

    def test_invalid(self):
        with pytest.raises(DomainError):
            split_channels(0.5, 0.0, 20)
        with pytest.raises(DomainError):
            split_channels(0.5, 1.0, 1)


class TestParams:
    @pytest.mark.parametrize("field,value", [("k_max", 1), ("m", 0.0), ("l", 1.5), ("L1", 0), ("n", 0), ("c2", -1)])
    def test_invalid(self, field, value):
        with pytest.raises(DomainError):
            qparams(**{field: value})


class TestEquilibrium:
    @pytest.mark.parametrize("a,c,e,n,N,l,m", QOS_GRID)
    def test_invariants_and_numeric_match(self, a, c, e, n, N, l, m):
        p = qparams(a=a, c1=c, c2=1 - c, e=e, n=n, N=N, l=l, m=m)
        eq = solve_equilibrium_qos(p)
        v = eq.vector()
        assert v.sum() == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(eq.s_t1[1:], e * eq.s_t1[:-1], atol=1e-10, rtol=0)
        np.testing.assert_allclose(eq.s_t2[1:], e * eq.s_t2[:-1], atol=1e-10, rtol=0)
        assert eq.residual <= 1e-10
        numeric = stationary_distribution(qos_transition_matrix(p, eq.x1, eq.x2))
        np.testing.assert_allclose(numeric.probabilities, v, atol=1e-9, rtol=0)
        r1, r2 = class_metrics(eq)
        for r, k_i in ((r1, eq.split.k1), (r2, eq.split.k2)):
            assert r.net_acceptance <= r.acceptance + 1e-15
            assert 0.0 <= r.utilization <= 1.0
            assert r.throughput <= k_i

    @pytest.mark.parametrize("x1,x2", [(0.2, 0.9), (1.0, 0.0), (0.5, 0.5)])
    def test_denominator_identity(self, x1, x2):
        p = qparams(e=0.45, n=5)
        eq = qos_closed_form_states(p, split_channels(p.l, p.m, p.k_max), x1, x2)
        # D written out term by term
        terms = [1.0] + [eq.b1 * p.e**j for j in range(p.n)] + [p.a * p.l * (1 - x1)]
        terms += [eq.b2 * p.e**j for j in range(p.n)] + [p.a * (1 - p.l) * (1 - x2)]
        d = math.fsum(terms)
        assert eq.s_i == pytest.approx(1.0 / d, rel=1e-12)
        assert eq.vector().sum() == pytest.approx(1.0, abs=1e-12)

    def test_no_traffic(self):
        eq = solve_equilibrium_qos(qparams(a=0.0))
        assert eq.s_i == 1.0

    @pytest.mark.parametrize("a", [0.1, 0.4, 0.8, 1.0])
    @pytest.mark.parametrize("n,e", [(1, 0.0), (4, E_REF)])
    def test_reduces_to_single_class(self, a, n, e):
        qp = qparams(a=a, l=1.0, n=n, e=e, c1=0.6, L1=7)
        eq = solve_equilibrium_qos(qp)
        assert eq.split == ChannelSplit(20, 0)
        assert eq.s_c2 == 0.0 and np.all(eq.s_t2 == 0.0)
        sp = SingleParams(N=50, k=20, a=a, c=0.6, n=n, e=e, L=7)
        single = solve_equilibrium(sp)
        assert eq.x1 == pytest.approx(single.x, abs=1e-9)
        assert eq.n1a == pytest.approx(single.n_ave, abs=1e-9)
        np.testing.assert_allclose(eq.s_t1, single.s_t, atol=1e-9)
        assert eq.s_c1 == pytest.approx(single.s_c, abs=1e-9)
        r1, r2 = class_metrics(eq)
        rs = single_metrics(single)
        for name in metrics.MetricsReport.metric_names():
            assert getattr(r1, name) == pytest.approx(getattr(rs, name), abs=1e-9), name
        assert r2.degenerate and math.isnan(r2.acceptance)

    def test_starved_low_class_explicit_split(self):
        p = qparams(l=0.9)
        with pytest.warns(StarvationWarning):
            eq = solve_equilibrium_qos(p, ChannelSplit(20, 0))
        assert eq.starved == (False, True)
        assert eq.x2 == 0.0 and np.all(eq.s_t2 == 0.0) and eq.s_c2 > 0.0
        assert eq.vector().sum() == pytest.approx(1.0, abs=1e-12)
        r1, r2 = class_metrics(eq)
        assert r2.starved and r2.throughput == 0.0 and r2.acceptance == 0.0

    def test_starved_high_class_from_floor(self):
        p = qparams(l=0.01, m=1.0)
        split = split_channels(p.l, p.m, p.k_max)
        assert split == ChannelSplit(0, 20)
        with pytest.warns(StarvationWarning):
            eq = solve_equilibrium_qos(p)
        assert eq.starved == (True, False)
        numeric = stationary_distribution(qos_transition_matrix(p, eq.x1, eq.x2))
        np.testing.assert_allclose(numeric.probabilities, eq.vector(), atol=1e-9, rtol=0)

    def test_split_mismatch(self):
        with pytest.raises(DomainError):
            solve_equilibrium_qos(qparams(), ChannelSplit(5, 5))

    def test_explicit_split(self):
        eq = solve_equilibrium_qos(qparams(), ChannelSplit(10, 10))
        assert eq.split == ChannelSplit(10, 10)

    def test_bisection_fallback(self, monkeypatch):
        from ramac import _fixed_point

        orig = _fixed_point.damped_iteration
        monkeypatch.setattr(_fixed_point, "damped_iteration", lambda u, s, **kw: orig(u, s, max_iter=2))
        eq = solve_equilibrium_qos(qparams(a=0.6))
        assert eq.method == "bisection" and eq.residual <= 1e-10
        ref = solve_equilibrium_qos.__globals__["_active"](eq.params, eq.split, eq.n1a, eq.n2a)
        assert ref == pytest.approx((eq.n1a, eq.n2a), abs=1e-10)


class TestClassMetrics:
    def test_error_free(self):
        r1, r2 = class_metrics(solve_equilibrium_qos(qparams(e=0.0)))
        assert r1.retransmissions == r2.retransmissions == 0.0
        assert r1.efficiency == r2.efficiency == 1.0

    def test_delay_energy_values(self):
        assert metrics.access_delay(0.25) == 3.0
        assert metrics.access_energy_db(0.25) == pytest.approx(6.020599913279624, rel=1e-14)

    def test_acceptance_definitions(self):
        p = qparams(a=0.4)
        eq = solve_equilibrium_qos(p)
        th1, pa1, _, _ = class_access_metrics(eq, 1)
        th2, pa2, _, _ = class_access_metrics(eq, 2)
        assert pa1 == pytest.approx(min(p.N * eq.s_t1[0], 17) / (p.l * p.N * p.a))
        assert pa2 == pytest.approx(min(p.N * eq.s_t2[0], 3) / ((1 - p.l) * p.N * p.a))

    def test_degenerate_class(self):
        eq = solve_equilibrium_qos(qparams(l=1.0))
        with pytest.raises(DegenerateLoadError):
            class_access_metrics(eq, 2)
        class_access_metrics(eq, 1)

    def test_high_priority_wins(self):
        for a in np.arange(0.02, 1.0001, 0.02):
            r1, r2 = class_metrics(solve_equilibrium_qos(qparams(a=a)))
            assert r1.throughput >= r2.throughput

    def test_net_acceptance_converges(self):
        for L in (50, 80, 200):
            r1, r2 = class_metrics(solve_equilibrium_qos(qparams(a=0.5, L1=L, L2=L)))
            assert r1.net_acceptance == pytest.approx(r1.acceptance, abs=1e-6)
            assert r2.net_acceptance == pytest.approx(r2.acceptance, abs=1e-6)
