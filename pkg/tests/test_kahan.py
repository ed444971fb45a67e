"""The discrete map: step, inverse, Jacobian, orbits, reference flow."""

from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from kahan2d import (
    EvaluationOverflow,
    Mat2,
    NoConvergence,
    Point2,
    QuadraticField2,
    SingularStep,
    StepConfig,
    inverse_step,
    orbit,
    reference_flow,
    step,
    step_jacobian,
    step_jacobian_det,
)

# f(x, y) = (2xy, -(4x^2 + 2y^2))
CANONICAL = QuadraticField2.homogeneous(
    Mat2(0.0, 1.0, 1.0, 0.0), Mat2(-4.0, 0.0, 0.0, -2.0)
)

# rotation: xdot = y, ydot = -x
ROTATION = QuadraticField2(
    quad=(Mat2.zero(), Mat2.zero()), lin=Mat2(0.0, 1.0, -1.0, 0.0)
)

coords = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


class TestStep:
    def test_canonical_closed_form_value(self):
        # independent oracle: I - (h/2)J = [[0.9,-0.1],[0.4,1.2]], det = 1.12,
        # f(1,1) = (2,-6); Cramer gives p' = (1,1) + 0.1*(1.8, -6.2)/1.12
        m = np.array([[0.9, -0.1], [0.4, 1.2]])
        rhs = np.array([2.0, -6.0])
        delta = np.linalg.solve(m, rhs)
        expected = np.array([1.0, 1.0]) + 0.1 * delta
        assert expected[0] == pytest.approx(65.0 / 56.0, rel=1e-15)
        assert expected[1] == pytest.approx(25.0 / 56.0, rel=1e-15)

        got = step(CANONICAL, StepConfig(0.1), Point2(1.0, 1.0))
        assert got.x == pytest.approx(1.16071428571, abs=1e-11)
        assert got.y == pytest.approx(0.44642857143, abs=1e-11)
        assert got.x == pytest.approx(expected[0], rel=1e-14)
        assert got.y == pytest.approx(expected[1], rel=1e-14)

    def test_matches_rational_implicit_relation_step(self):
        fld = oracles.quartic_field(F(1), F(0), F(1), F(0), F(1))
        want = fld.implicit_step(F(1, 10), F(1), F(1))
        got = step(CANONICAL, StepConfig(0.1), Point2(1.0, 1.0))
        assert got.x == pytest.approx(float(want[0]), rel=1e-14)
        assert got.y == pytest.approx(float(want[1]), rel=1e-14)

    def test_zero_step_is_identity(self):
        p = Point2(1.3, -0.4)
        assert step(CANONICAL, StepConfig(0.0), p) == p

    def test_fixed_point_at_origin(self):
        p = Point2(0.0, 0.0)
        assert step(CANONICAL, StepConfig(0.1), p) == p

    def test_singular_step_raises(self):
        # choose h so that det(I - (h/2)J) = 0 at (1,1):
        # det = 1 + h y + h^2 (4x^2 - 2y^2) = 1 + h + 2h^2 ... needs roots;
        # easier: scale the field so the update matrix is exactly singular
        field = QuadraticField2(
            quad=(Mat2.zero(), Mat2.zero()), lin=Mat2(2.0, 0.0, 0.0, 2.0)
        )
        # I - (h/2) B = (1 - h) I, singular at h = 1
        with pytest.raises(SingularStep):
            step(field, StepConfig(1.0), Point2(1.0, 1.0))

    @given(coords, coords,
           st.floats(min_value=1e-3, max_value=0.2), st.booleans())
    @settings(max_examples=200)
    def test_implicit_relation_residual(self, x, y, h_mag, backwards):
        # the defining relation: (p'-p)/h = Qbar(p,p') + B(p+p')/2 + c.
        # |h| >= 1e-3: reconstructing the difference quotient from the rounded
        # endpoint loses ulp(p)/h, which swamps the bound at tiny h.
        h = -h_mag if backwards else h_mag
        p = Point2(x, y)
        try:
            p2 = step(CANONICAL, StepConfig(h), p)
        except SingularStep:
            return
        lhs = ((p2.x - p.x) / h, (p2.y - p.y) / h)
        rhs = CANONICAL.polarize(p, p2)
        res = math.hypot(lhs[0] - rhs[0], lhs[1] - rhs[1])
        scale = max(1.0, math.hypot(x, y), math.hypot(p2.x, p2.y)) ** 2
        assert res <= 1e-10 * scale

    def test_implicit_relation_residual_affine(self):
        field = QuadraticField2(
            quad=(Mat2(1.0, 0.5, 0.5, -1.0), Mat2(0.0, 1.0, 1.0, 2.0)),
            lin=Mat2(0.2, -0.3, 0.4, 0.1),
            const=(0.7, -0.2),
        )
        rng = np.random.default_rng(3)
        for _ in range(200):
            p = Point2(*rng.uniform(-2.0, 2.0, size=2))
            h = rng.uniform(-0.2, 0.2)
            if abs(h) < 1e-4:
                continue
            try:
                p2 = step(field, StepConfig(h), p)
            except SingularStep:
                continue
            lhs = ((p2.x - p.x) / h, (p2.y - p.y) / h)
            quad = field.polarize(p, p2)
            lin = field.lin.mv(((p.x + p2.x) / 2, (p.y + p2.y) / 2))
            rhs = (
                quad[0] + lin[0] + field.const[0],
                quad[1] + lin[1] + field.const[1],
            )
            res = math.hypot(lhs[0] - rhs[0], lhs[1] - rhs[1])
            scale = max(1.0, math.hypot(p.x, p.y), math.hypot(p2.x, p2.y)) ** 2
            assert res <= 1e-10 * scale


class TestInverseStep:
    def test_round_trip_canonical(self):
        p = Point2(1.0, 1.0)
        cfg = StepConfig(0.1)
        there = step(CANONICAL, cfg, p)
        back = inverse_step(CANONICAL, cfg, there)
        assert back.dist(p) <= 1e-12

    def test_inverse_recovers_frozen_target(self):
        # (65/56, 25/56) rounded to 11 digits is the forward image of (1, 1)
        cfg = StepConfig(0.1)
        back = inverse_step(CANONICAL, cfg, Point2(1.16071428571, 0.44642857143))
        assert back.dist(Point2(1.0, 1.0)) <= 1e-10

    def test_zero_step_identity(self):
        p = Point2(0.7, -0.3)
        assert inverse_step(CANONICAL, StepConfig(0.0), p) == p

    def test_time_symmetry_sampled(self, each_system):
        rng = np.random.default_rng(7)
        cfg = StepConfig(0.05)
        checked = 0
        while checked < 1000:
            p = Point2(rng.uniform(0.2, 2.0), rng.uniform(-2.0, 2.0))
            try:
                there = step(each_system.field, cfg, p)
                back = inverse_step(each_system.field, cfg, there)
            except SingularStep:
                continue
            # skip badly conditioned passes (near the map pole)
            if abs(math.hypot(there.x, there.y)) > 1e3:
                continue
            assert back.dist(p) <= 1e-10
            checked += 1


class TestStepJacobian:
    def test_identity_at_zero_step(self):
        j = step_jacobian(CANONICAL, StepConfig(0.0), Point2(1.0, 1.0))
        assert j == Mat2.identity()

    def test_matches_rational_oracle(self):
        fld = oracles.quartic_field(F(1), F(0), F(1), F(0), F(1))
        want = oracles.map_jacobian(fld, F(1, 10), F(1), F(1))
        got = step_jacobian(CANONICAL, StepConfig(0.1), Point2(1.0, 1.0))
        for g, w in zip(got.entries(), (want[0][0], want[0][1], want[1][0], want[1][1])):
            assert g == pytest.approx(float(w), rel=1e-13)

    @pytest.mark.parametrize("seed", [13, 37])
    def test_matches_central_differences(self, each_system, seed):
        rng = np.random.default_rng(seed)
        cfg = StepConfig(0.05)
        eps = 1e-6
        checked = 0
        while checked < 100:
            p = Point2(rng.uniform(0.2, 2.0), rng.uniform(-2.0, 2.0))
            try:
                j = step_jacobian(each_system.field, cfg, p)
                xp = step(each_system.field, cfg, Point2(p.x + eps, p.y))
                xm = step(each_system.field, cfg, Point2(p.x - eps, p.y))
                yp = step(each_system.field, cfg, Point2(p.x, p.y + eps))
                ym = step(each_system.field, cfg, Point2(p.x, p.y - eps))
            except SingularStep:
                continue
            fd = (
                (xp.x - xm.x) / (2 * eps),
                (yp.x - ym.x) / (2 * eps),
                (xp.y - xm.y) / (2 * eps),
                (yp.y - ym.y) / (2 * eps),
            )
            if max(abs(v) for v in fd) > 1e3:
                continue  # too close to a pole for the FD stencil itself
            for a, b in zip(j.entries(), fd):
                assert abs(a - b) <= 1e-6 * max(1.0, abs(a))
            checked += 1

    def test_determinant_equals_ratio_formula(self, each_system):
        # canonical det DPhi == det(I + (h/2)J(p')) / det(I - (h/2)J(p)) to
        # 4 ulp; the matrix-then-det route agrees up to summation-order slack
        rng = np.random.default_rng(19)
        cfg = StepConfig(0.05)
        checked = 0
        while checked < 200:
            p = Point2(rng.uniform(0.2, 2.0), rng.uniform(-2.0, 2.0))
            try:
                det_canonical = step_jacobian_det(each_system.field, cfg, p)
                dphi = step_jacobian(each_system.field, cfg, p)
                p2 = step(each_system.field, cfg, p)
            except SingularStep:
                continue
            jp = each_system.field.jacobian(p)
            jn = each_system.field.jacobian(p2)
            minus = Mat2(
                1 - 0.025 * jp.m11, -0.025 * jp.m12,
                -0.025 * jp.m21, 1 - 0.025 * jp.m22,
            )
            plus = Mat2(
                1 + 0.025 * jn.m11, 0.025 * jn.m12,
                0.025 * jn.m21, 1 + 0.025 * jn.m22,
            )
            ratio = plus.det() / minus.det()
            assert abs(det_canonical - ratio) <= 4 * math.ulp(
                max(abs(det_canonical), abs(ratio), 1.0)
            )
            got = dphi.det()
            assert abs(got - ratio) <= 64 * math.ulp(max(abs(got), abs(ratio), 1.0))
            checked += 1


class TestOrbit:
    def test_zero_steps_single_record(self):
        t = orbit(CANONICAL, StepConfig(0.1), Point2(1.0, 1.0), 0)
        assert len(t) == 1
        assert not t.terminated_early
        assert t.records[0].n == 0
        assert t.records[0].t == 0.0

    def test_reversed_orbit_returns(self):
        cfg = StepConfig(0.05)
        fwd = orbit(CANONICAL, cfg, Point2(1.0, 1.0), 100)
        assert not fwd.terminated_early
        back = orbit(CANONICAL, StepConfig(-0.05), fwd.endpoint, 100)
        assert not back.terminated_early
        assert back.endpoint.dist(Point2(1.0, 1.0)) <= 1e-9

    def test_invariant_columns_filled(self, quartic_sys):
        t = orbit(
            quartic_sys.field, StepConfig(0.05), Point2(1.0, 1.0), 50,
            system=quartic_sys,
        )
        assert all(r.H is not None and r.Htilde is not None for r in t.records)
        ref = t.records[0].Htilde
        for r in t.records:
            assert abs(r.Htilde - ref) <= 1e-10 * max(1.0, abs(ref))

    def test_columns_none_without_system(self):
        t = orbit(CANONICAL, StepConfig(0.05), Point2(1.0, 1.0), 3)
        assert all(r.H is None and r.Htilde is None for r in t.records)

    def test_times_step_by_h(self, quartic_sys):
        t = orbit(quartic_sys.field, StepConfig(0.25), Point2(1.0, 1.0), 8)
        for i, r in enumerate(t.records):
            assert r.n == i
            assert r.t == pytest.approx(0.25 * i, abs=1e-15)

    def test_early_termination_on_singularity(self):
        field = QuadraticField2(
            quad=(Mat2.zero(), Mat2.zero()), lin=Mat2(2.0, 0.0, 0.0, 2.0)
        )
        t = orbit(field, StepConfig(1.0), Point2(1.0, 1.0), 5)
        assert t.terminated_early
        assert "singular" in t.termination_reason
        assert len(t) == 1  # only the initial record

    def test_early_termination_on_overflow(self):
        # xdot = x^2 from a huge start: the first field evaluation overflows
        field = QuadraticField2(
            quad=(Mat2(1.0, 0.0, 0.0, 0.0), Mat2.zero())
        )
        t = orbit(field, StepConfig(0.1), Point2(1e190, 0.0), 10)
        assert t.terminated_early
        assert "overflow" in t.termination_reason
        assert len(t) == 1

    def test_negative_steps_rejected(self):
        with pytest.raises(ValueError):
            orbit(CANONICAL, StepConfig(0.1), Point2(1.0, 1.0), -1)


class TestReferenceFlow:
    def test_zero_horizon(self):
        p = Point2(0.3, 0.4)
        assert reference_flow(CANONICAL, p, 0.0, 1e-12) == p

    def test_rotation_quarter_turn(self):
        got = reference_flow(ROTATION, Point2(1.0, 0.0), math.pi / 2, 1e-12)
        assert got.dist(Point2(0.0, -1.0)) <= 1e-11

    def test_conserves_hamiltonian(self, each_system):
        # the sextic flow from (1,1) escapes in finite time; stay inside it
        tol = 1e-10
        T = 0.5 if each_system.family == "quartic" else 0.1
        p0 = Point2(1.0, 1.0)
        end = reference_flow(each_system.field, p0, T, tol)
        h0 = each_system.hamiltonian(p0)
        h1 = each_system.hamiltonian(end)
        assert abs(h1 - h0) <= 10 * tol * max(1.0, abs(h0))

    def test_rejects_bad_tolerance(self):
        with pytest.raises(ValueError):
            reference_flow(ROTATION, Point2(1.0, 0.0), 1.0, 0.0)

    def test_no_convergence_on_blowup(self):
        # xdot = x^2 from x=1 blows up at t=1; integrating to t=2 must fail
        field = QuadraticField2(
            quad=(Mat2(1.0, 0.0, 0.0, 0.0), Mat2.zero())
        )
        with pytest.raises((NoConvergence, EvaluationOverflow)):
            reference_flow(field, Point2(1.0, 0.0), 2.0, 1e-12)


class TestSecondOrderAccuracy:
    def test_family_convergence_order(self, each_system):
        p0 = Point2(1.0, 1.0)
        T = 0.5 if each_system.family == "quartic" else 0.1
        ref = reference_flow(each_system.field, p0, T, 1e-12)
        errs = []
        for h in (T / 64, T / 128, T / 256):
            p = p0
            cfg = StepConfig(h)
            for _ in range(round(T / h)):
                p = step(each_system.field, cfg, p)
            errs.append(p.dist(ref))
        for e0, e1 in zip(errs, errs[1:]):
            order = math.log2(e0 / e1)
            assert 1.8 <= order <= 2.2

    def test_rotation_is_midpoint_rule_order_two(self):
        # zero quadratic part: Kahan reduces to the midpoint rule
        p0 = Point2(1.0, 0.0)
        T = 1.0
        exact = Point2(math.cos(T), -math.sin(T))
        errs = []
        for h in (T / 64, T / 128, T / 256):
            p = p0
            cfg = StepConfig(h)
            for _ in range(round(T / h)):
                p = step(ROTATION, cfg, p)
            errs.append(p.dist(exact))
        for e0, e1 in zip(errs, errs[1:]):
            assert 1.9 <= math.log2(e0 / e1) <= 2.1

    def test_rotation_matches_cayley_form(self):
        # for linear fields the map is (I - hB/2)^{-1} (I + hB/2)
        h = 0.1
        cfg = StepConfig(h)
        p = Point2(0.6, -0.8)
        got = step(ROTATION, cfg, p)
        b = Mat2(0.0, 1.0, -1.0, 0.0)
        cay = Mat2(1 - h / 2 * b.m11, -h / 2 * b.m12, -h / 2 * b.m21,
                   1 - h / 2 * b.m22).inverse() @ Mat2(
            1 + h / 2 * b.m11, h / 2 * b.m12, h / 2 * b.m21, 1 + h / 2 * b.m22
        )
        want = cay.mv(p.as_tuple())
        assert got.x == pytest.approx(want[0], rel=1e-14)
        assert got.y == pytest.approx(want[1], rel=1e-14)
