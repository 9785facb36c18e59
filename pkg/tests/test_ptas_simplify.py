from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from setupsched.generate import GeneratorSpec, generate
from setupsched.model import Instance, Kind, Schedule, validate
from setupsched.ptas import (
    PtasParams,
    floor_log2,
    pow2,
    simplify,
    simplify_step1,
    simplify_step2,
    simplify_step3,
    undo_schedule,
)
from setupsched.ptas.simplify import round_size_up, round_speed_down

EPSILONS = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 5)]


class TestPtasParams:
    def test_derived_quantities(self):
        p = PtasParams(Fraction(1, 2), Fraction(1))
        assert (p.delta, p.gamma, p.t1) == (
            Fraction(1, 4),
            Fraction(1, 8),
            Fraction(243, 32),
        )

    def test_derived_quantities_third(self):
        p = PtasParams(Fraction(1, 3), Fraction(2))
        assert (p.delta, p.gamma, p.t1) == (
            Fraction(1, 9),
            Fraction(1, 27),
            Fraction(2048, 243),
        )

    @pytest.mark.parametrize("bad", [Fraction(2, 3), Fraction(1), Fraction(2), Fraction(3, 4)])
    def test_rejects_non_unit_fraction(self, bad):
        with pytest.raises(ValueError):
            PtasParams(bad, Fraction(1))

    @pytest.mark.parametrize("bad", [Fraction(0), Fraction(-1, 2)])
    def test_rejects_non_positive_eps(self, bad):
        with pytest.raises(ValueError):
            PtasParams(bad, Fraction(1))

    @pytest.mark.parametrize("bad_t", [Fraction(0), Fraction(-3)])
    def test_rejects_non_positive_bound(self, bad_t):
        with pytest.raises(ValueError):
            PtasParams(Fraction(1, 2), bad_t)


class TestFloorLog2:
    @pytest.mark.parametrize(
        "x,e",
        [
            (Fraction(1), 0),
            (Fraction(3, 2), 0),
            (Fraction(2), 1),
            (Fraction(3), 1),
            (Fraction(4), 2),
            (Fraction(5, 4), 0),
            (Fraction(1, 3), -2),
            (Fraction(1, 4), -2),
            (Fraction(7), 2),
            (Fraction(1, 8), -3),
            (Fraction(5), 2),
        ],
    )
    def test_spot_values(self, x, e):
        assert floor_log2(x) == e

    @given(st.fractions(min_value=Fraction(1, 10**6), max_value=Fraction(10**6)))
    def test_bracketing(self, x):
        e = floor_log2(x)
        assert pow2(e) <= x < pow2(e + 1)

    def test_pow2(self):
        assert pow2(0) == 1
        assert pow2(3) == 8
        assert pow2(-3) == Fraction(1, 8)


class TestStepOne:
    def test_drops_machines_below_eps_vmax_over_m(self):
        inst = Instance.uniform(
            [8, 1, 1, Fraction(9, 10)], setups=[1], jobs=[(0, 1)]
        )
        # cutoff is (1/2) * 8 / 4 = 1; only the 9/10 machine falls under it
        i1, kept = simplify_step1(inst, PtasParams(Fraction(1, 2), Fraction(4)))
        assert kept == (0, 1, 2)
        assert i1.speeds == (Fraction(8), Fraction(1), Fraction(1))

    def test_lifts_sizes_and_setups_to_floor(self):
        inst = Instance.uniform(
            [8, 1, 1, Fraction(9, 10)],
            setups=[Fraction(1, 3)],
            jobs=[(0, Fraction(1, 4)), (0, 2)],
        )
        i1, _ = simplify_step1(inst, PtasParams(Fraction(1, 2), Fraction(4)))
        # floor = (1/2) * 1 * 4 / (2 jobs + 1 class) = 2/3
        assert [j.size for j in i1.jobs] == [Fraction(2, 3), Fraction(2)]
        assert i1.classes[0].setup == Fraction(2, 3)

    @given(st.integers(0, 10**6), st.sampled_from(EPSILONS))
    @settings(max_examples=40, deadline=None)
    def test_keeps_at_least_the_fastest(self, seed, eps):
        spec = GeneratorSpec(kind=Kind.UNIFORM, n=4, m=4, num_classes=2)
        inst = generate(spec, seed)
        i1, kept = simplify_step1(inst, PtasParams(eps, Fraction(3)))
        assert kept
        vmax = max(inst.speeds)
        assert any(inst.speeds[i] == vmax for i in kept)
        for i in range(inst.m):
            assert (inst.speeds[i] >= eps * vmax / inst.m) == (i in kept)


class TestStepTwo:
    def test_folds_four_unit_jobs_into_one_placeholder(self):
        inst = Instance.identical(1, setups=[8], jobs=[(0, 1)] * 4)
        i2, fold = simplify_step2(inst, PtasParams(Fraction(1, 2), Fraction(1)))
        assert [(j.cls, j.size) for j in i2.jobs] == [(0, Fraction(4))]
        assert fold.removed == {0: (0, 1, 2, 3)}
        assert fold.kept == ()
        assert fold.placeholders == {0: (0,)}

    def test_boundary_size_folds(self):
        # exactly eps * s_k is still "tiny"
        inst = Instance.identical(1, setups=[8], jobs=[(0, 4)])
        _, fold = simplify_step2(inst, PtasParams(Fraction(1, 2), Fraction(1)))
        assert fold.removed == {0: (0,)}

    def test_just_above_threshold_stays(self):
        inst = Instance.identical(1, setups=[8], jobs=[(0, Fraction(33, 8))])
        i2, fold = simplify_step2(inst, PtasParams(Fraction(1, 2), Fraction(1)))
        assert fold.removed == {}
        assert [j.size for j in i2.jobs] == [Fraction(33, 8)]

    def test_kept_jobs_precede_placeholders(self):
        inst = Instance.identical(
            2,
            setups=[8, 2],
            jobs=[(0, 1), (0, 1), (0, 7), (1, Fraction(1, 2)), (1, 5)],
        )
        i2, fold = simplify_step2(inst, PtasParams(Fraction(1, 2), Fraction(1)))
        assert [(j.id, j.cls, j.size) for j in i2.jobs] == [
            (0, 0, Fraction(7)),
            (1, 1, Fraction(5)),
            (2, 0, Fraction(4)),
            (3, 1, Fraction(1)),
        ]
        assert fold.removed == {0: (0, 1), 1: (3,)}
        assert fold.kept == (2, 4)
        assert fold.placeholders == {0: (2,), 1: (3,)}

    @given(st.integers(0, 10**6), st.sampled_from(EPSILONS))
    @settings(max_examples=40, deadline=None)
    def test_volume_never_shrinks_and_grows_at_most_one_unit_per_class(self, seed, eps):
        spec = GeneratorSpec(kind=Kind.IDENTICAL, n=7, m=2, num_classes=3)
        inst = generate(spec, seed)
        params = PtasParams(eps, Fraction(5))
        i1, _ = simplify_step1(inst, params)
        i2, fold = simplify_step2(i1, params)
        for k, ids in fold.removed.items():
            unit = eps * i1.classes[k].setup
            total = sum(i1.jobs[j].size for j in ids)
            poured = unit * len(fold.placeholders[k])
            assert total <= poured < total + unit


class TestStepThree:
    @pytest.mark.parametrize(
        "t,r",
        [
            (Fraction(5), Fraction(6)),
            (Fraction(4), Fraction(4)),
            (Fraction(9, 8), Fraction(3, 2)),
            (Fraction(3), Fraction(3)),
            (Fraction(1), Fraction(1)),
            (Fraction(100), Fraction(128)),
            (Fraction(7, 3), Fraction(3)),
        ],
    )
    def test_round_size_up_spot_values(self, t, r):
        assert round_size_up(t, Fraction(1, 2)) == r

    def test_round_size_up_rejects_non_positive(self):
        with pytest.raises(ValueError):
            round_size_up(Fraction(0), Fraction(1, 2))

    @given(
        st.fractions(min_value=Fraction(1, 10**4), max_value=Fraction(10**4)),
        st.sampled_from(EPSILONS),
    )
    def test_round_size_up_tight_and_idempotent(self, t, eps):
        r = round_size_up(t, eps)
        assert t <= r < (1 + eps) * t
        assert round_size_up(r, eps) == r
        # grid membership: r = 2**e * (1 + k*eps) for integers e, k
        k = (r / pow2(floor_log2(r)) - 1) / eps
        assert k.denominator == 1

    def test_round_speed_down_spot_values(self):
        assert round_speed_down(Fraction(5), Fraction(2), Fraction(1, 2)) == Fraction(9, 2)
        assert round_speed_down(Fraction(7), Fraction(1), Fraction(1, 3)) == Fraction(4096, 729)

    def test_round_speed_down_rejects_below_minimum(self):
        with pytest.raises(ValueError):
            round_speed_down(Fraction(1), Fraction(2), Fraction(1, 2))

    @given(
        st.fractions(min_value=1, max_value=Fraction(10**4)),
        st.sampled_from(EPSILONS),
    )
    def test_round_speed_down_tight(self, v, eps):
        r = round_speed_down(v, Fraction(1), eps)
        assert r <= v < r * (1 + eps)
        k = Fraction(0)
        probe = r
        while probe > 1:
            probe /= 1 + eps
            k += 1
        assert probe == 1

    @given(st.integers(0, 10**6), st.sampled_from(EPSILONS))
    @settings(max_examples=30, deadline=None)
    def test_equal_speeds_see_only_size_rounding(self, seed, eps):
        spec = GeneratorSpec(kind=Kind.IDENTICAL, n=5, m=3, num_classes=2)
        inst = generate(spec, seed)
        params = PtasParams(eps, Fraction(3))
        i1, _ = simplify_step1(inst, params)
        i3 = simplify_step3(i1, params)
        assert i3.speeds == i1.speeds
        for before, after in zip(i1.jobs, i3.jobs):
            assert before.size <= after.size < (1 + eps) * before.size


class TestComposedSimplify:
    def test_concrete_pipeline(self):
        inst = Instance.uniform(
            [2, 3], setups=[1], jobs=[(0, 1), (0, Fraction(5, 2)), (0, Fraction(1, 16))]
        )
        i3, rec = simplify(inst, PtasParams(Fraction(1, 2), Fraction(2)))
        assert rec.scale == Fraction(1, 4)
        assert rec.t_scaled == Fraction(1, 2)
        assert rec.t1 == Fraction(243, 64)
        assert i3.speeds == (Fraction(2), Fraction(3))
        assert [j.size for j in i3.jobs] == [
            Fraction(1, 4),
            Fraction(3, 4),
            Fraction(1, 8),
        ]
        assert i3.classes[0].setup == Fraction(1, 4)
        assert rec.removed_machines == ()
        assert rec.t2 == Fraction(32805, 2048)
        assert rec.t3 == Fraction(98415, 4096)

    @given(st.integers(0, 10**6), st.sampled_from(EPSILONS[:3]))
    @settings(max_examples=40, deadline=None)
    def test_slowest_capacity_is_one_and_grids_are_fixed_points(self, seed, eps):
        spec = GeneratorSpec(kind=Kind.UNIFORM, n=6, m=3, num_classes=2)
        inst = generate(spec, seed)
        i3, rec = simplify(inst, PtasParams(eps, Fraction(7, 2)))
        assert min(i3.speeds) * rec.t_scaled == 1
        assert rec.t1 == (1 + eps) ** 5 * rec.t_scaled
        assert not validate(i3)
        for j in i3.jobs:
            assert round_size_up(j.size, eps) == j.size
        for c in i3.classes:
            assert round_size_up(c.setup, eps) == c.setup
        vmin = min(i3.speeds)
        for v in i3.speeds:
            assert round_speed_down(v, vmin, eps) == v


class TestUndoSchedule:
    def test_pours_folded_jobs_slot_by_slot(self):
        inst = Instance.identical(
            3, setups=[8], jobs=[(0, 3), (0, 3), (0, 3), (0, 3), (0, 10)]
        )
        i3, rec = simplify(inst, PtasParams(Fraction(1, 2), Fraction(1)))
        # survivor first, then three placeholders of size 4
        assert [(j.cls, j.size) for j in i3.jobs] == [
            (0, Fraction(12)),
            (0, Fraction(4)),
            (0, Fraction(4)),
            (0, Fraction(4)),
        ]
        undone = undo_schedule(rec, Schedule((0, 0, 1, 2)))
        # two size-3 jobs fill a placeholder's four units before moving on
        assert undone == Schedule((0, 0, 1, 1, 0))

    def test_trivial_undo_without_fold(self):
        inst = Instance.uniform([2, 3], setups=[1], jobs=[(0, 1), (0, Fraction(5, 2))])
        i3, rec = simplify(inst, PtasParams(Fraction(1, 2), Fraction(2)))
        assert rec.fold.removed == {}
        undone = undo_schedule(rec, Schedule((1, 0)))
        assert undone == Schedule((1, 0))

    @given(st.integers(0, 10**6), st.sampled_from(EPSILONS[:3]), st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_undo_covers_all_jobs_with_bounded_overpack(self, seed, eps, place_seed):
        import random

        spec = GeneratorSpec(kind=Kind.UNIFORM, n=7, m=3, num_classes=2)
        inst = generate(spec, seed)
        i3, rec = simplify(inst, PtasParams(eps, Fraction(4)))
        rng = random.Random(place_seed)
        sched3 = Schedule(tuple(rng.randrange(i3.m) for _ in range(i3.n)))
        undone = undo_schedule(rec, sched3)
        assert len(undone.assignment) == inst.n
        assert not validate(inst, undone)
        for new_id, orig_id in enumerate(rec.fold.kept):
            assert undone.assignment[orig_id] == rec.kept_machines[sched3.assignment[new_id]]
        for k, ids in rec.fold.removed.items():
            slots: dict[int, int] = {}
            for pid in rec.fold.placeholders[k]:
                host = rec.kept_machines[sched3.assignment[pid]]
                slots[host] = slots.get(host, 0) + 1
            unit = eps * rec.i1.classes[k].setup
            biggest = max(rec.i1.jobs[j].size for j in ids)
            poured: dict[int, Fraction] = {}
            for j in ids:
                host = undone.assignment[j]
                assert host in slots
                poured[host] = poured.get(host, Fraction(0)) + rec.i1.jobs[j].size
            # each placeholder overpacks by less than one job
            for host, total in poured.items():
                assert total < slots[host] * (unit + biggest)
