"""Tests for the canonical JSON instance format."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import pytest

from setupsched.errors import ParseError, ValidationError
from setupsched.hardness import bundled_pair
from setupsched.model import INF, Instance, Schedule
from setupsched.serialize import (
    parse_instance,
    parse_schedule,
    parse_setcover,
    write_instance,
    write_schedule,
    write_setcover,
)

from helpers import mixed_instance

FIXTURES = Path(__file__).parent.parent / "fixtures"

F = Fraction


class TestParseDefaults:
    def test_minimal_identical_file(self, tmp_path):
        """Ids and speeds may be omitted; count plus unit speeds is implied."""
        path = tmp_path / "min.json"
        path.write_text(
            '{"kind": "identical",\n'
            ' "machines": {"count": 2},\n'
            ' "classes": [{"setup": "1"}],\n'
            ' "jobs": [{"class": 0, "size": "3"}, {"class": 0, "size": 2}]}\n'
        )
        inst = parse_instance(path)
        assert inst == Instance.identical(2, setups=[1], jobs=[(0, 3), (0, 2)])

    def test_inf_token_becomes_sentinel(self, tmp_path):
        path = tmp_path / "u.json"
        path.write_text(
            '{"kind": "unrelated",\n'
            ' "machines": {"count": 2},\n'
            ' "classes": [{"setups": ["1", "inf"]}],\n'
            ' "jobs": [{"class": 0, "sizes": ["inf", "2"]}]}\n'
        )
        inst = parse_instance(path)
        assert inst.jobs[0].sizes[0] is INF
        assert inst.jobs[0].sizes[1] == 2
        assert inst.classes[0].setups[1] is INF

    def test_rational_strings(self, tmp_path):
        path = tmp_path / "q.json"
        path.write_text(
            '{"kind": "uniform",\n'
            ' "machines": {"speeds": ["3/2", 1]},\n'
            ' "classes": [{"setup": "1/2"}],\n'
            ' "jobs": [{"class": 0, "size": "27/10"}]}\n'
        )
        inst = parse_instance(path)
        assert inst.speeds == (F(3, 2), F(1))
        assert inst.jobs[0].size == F(27, 10)


class TestRoundTrip:
    @pytest.mark.parametrize(
        "fixture", ["u1.json", "unrelated_4x12.json"]
    )
    def test_bundled_instances_byte_identical(self, fixture, tmp_path):
        src = FIXTURES / fixture
        inst = parse_instance(src)
        out = tmp_path / fixture
        write_instance(inst, out)
        assert out.read_bytes() == src.read_bytes()

    @pytest.mark.parametrize("fixture", ["sc_yes.json", "sc_no.json"])
    def test_bundled_setcover_byte_identical(self, fixture, tmp_path):
        src = FIXTURES / fixture
        sc = parse_setcover(src)
        out = tmp_path / fixture
        write_setcover(sc, out)
        assert out.read_bytes() == src.read_bytes()

    @pytest.mark.parametrize("seed", range(24))
    def test_parse_inverts_write_all_kinds(self, seed, tmp_path):
        inst = mixed_instance(seed)
        path = tmp_path / "i.json"
        write_instance(inst, path)
        assert parse_instance(path) == inst

    def test_restricted_eligible_sets_survive(self, tmp_path):
        inst = Instance.restricted(
            3, setups=[1, 2], jobs=[(0, 2, [0, 2]), (1, 1, [1]), (0, 3, [0, 1, 2])]
        )
        path = tmp_path / "r.json"
        write_instance(inst, path)
        back = parse_instance(path)
        assert back == inst
        assert back.jobs[0].eligible == frozenset({0, 2})

    def test_canonical_key_order(self, tmp_path):
        path = tmp_path / "k.json"
        write_instance(mixed_instance(1), path)
        doc = json.loads(path.read_text())
        assert list(doc) == ["kind", "machines", "classes", "jobs"]


class TestScheduleFiles:
    def test_round_trip(self, tmp_path):
        inst = Instance.identical(2, setups=[0], jobs=[(0, 1), (0, 2), (0, 3)])
        sched = Schedule((1, 0, 1))
        path = tmp_path / "s.json"
        write_schedule(sched, path)
        assert path.read_text() == "[1, 0, 1]\n"
        assert parse_schedule(path, inst) == sched

    def test_length_mismatch(self, tmp_path):
        inst = Instance.identical(2, setups=[0], jobs=[(0, 1)])
        path = tmp_path / "s.json"
        path.write_text("[0, 1]\n")
        with pytest.raises(ParseError, match="expected 1"):
            parse_schedule(path, inst)

    def test_machine_out_of_range(self, tmp_path):
        inst = Instance.identical(2, setups=[0], jobs=[(0, 1)])
        path = tmp_path / "s.json"
        path.write_text("[5]\n")
        with pytest.raises(ParseError, match="bad machine id"):
            parse_schedule(path, inst)


class TestErrors:
    def write(self, tmp_path, text):
        path = tmp_path / "bad.json"
        path.write_text(text)
        return path

    def test_syntax_error_carries_line(self, tmp_path):
        path = self.write(tmp_path, '{\n "kind": "identical",\n oops\n}')
        with pytest.raises(ParseError) as exc:
            parse_instance(path)
        assert exc.value.line == 3

    def test_unknown_kind(self, tmp_path):
        path = self.write(
            tmp_path, '{"kind": "weird", "machines": {"count": 1}, "classes": [], "jobs": []}'
        )
        with pytest.raises(ParseError) as exc:
            parse_instance(path)
        assert exc.value.field == "kind"

    def test_missing_field_names_it(self, tmp_path):
        path = self.write(tmp_path, '{"kind": "identical", "machines": {"count": 1}}')
        with pytest.raises(ParseError) as exc:
            parse_instance(path)
        assert exc.value.field == "classes"

    def test_float_rejected(self, tmp_path):
        path = self.write(
            tmp_path,
            '{"kind": "identical", "machines": {"count": 1},'
            ' "classes": [{"setup": 0.5}], "jobs": []}',
        )
        with pytest.raises(ParseError) as exc:
            parse_instance(path)
        assert exc.value.field == "classes[0].setup"

    def test_zero_denominator(self, tmp_path):
        path = self.write(
            tmp_path,
            '{"kind": "identical", "machines": {"count": 1},'
            ' "classes": [{"setup": "1/0"}], "jobs": []}',
        )
        with pytest.raises(ParseError, match="bad rational"):
            parse_instance(path)

    def test_inf_rejected_outside_unrelated(self, tmp_path):
        path = self.write(
            tmp_path,
            '{"kind": "identical", "machines": {"count": 1},'
            ' "classes": [{"setup": "1"}], "jobs": [{"class": 0, "size": "inf"}]}',
        )
        with pytest.raises(ParseError) as exc:
            parse_instance(path)
        assert exc.value.field == "jobs[0].size"

    def test_class_out_of_range(self, tmp_path):
        path = self.write(
            tmp_path,
            '{"kind": "identical", "machines": {"count": 1},'
            ' "classes": [], "jobs": [{"class": 0, "size": "1"}]}',
        )
        with pytest.raises(ParseError) as exc:
            parse_instance(path)
        assert exc.value.field == "jobs[0].class"

    def test_id_position_mismatch(self, tmp_path):
        path = self.write(
            tmp_path,
            '{"kind": "identical", "machines": {"count": 1},'
            ' "classes": [{"id": 1, "setup": "1"}], "jobs": []}',
        )
        with pytest.raises(ParseError) as exc:
            parse_instance(path)
        assert exc.value.field == "classes[0].id"

    def test_sizes_length_mismatch(self, tmp_path):
        path = self.write(
            tmp_path,
            '{"kind": "unrelated", "machines": {"count": 2},'
            ' "classes": [{"setups": ["1", "1"]}],'
            ' "jobs": [{"class": 0, "sizes": ["1"]}]}',
        )
        with pytest.raises(ParseError) as exc:
            parse_instance(path)
        assert exc.value.field == "jobs[0].sizes"

    def test_validation_error_surfaces_violations(self, tmp_path):
        path = self.write(
            tmp_path,
            '{"kind": "uniform", "machines": {"speeds": ["0", "1"]},'
            ' "classes": [], "jobs": []}',
        )
        with pytest.raises(ValidationError, match="NonPositiveSpeed"):
            parse_instance(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError, match="cannot read"):
            parse_instance(tmp_path / "nope.json")


class TestSetCover:
    def test_bundled_pair_round_trip(self, tmp_path):
        yes, no = bundled_pair()
        for name, sc in [("y.json", yes), ("n.json", no)]:
            path = tmp_path / name
            write_setcover(sc, path)
            assert parse_setcover(path) == sc

    def test_wrong_kind_rejected(self, tmp_path):
        path = tmp_path / "x.json"
        write_instance(Instance.identical(1, setups=[0], jobs=[]), path)
        with pytest.raises(ParseError) as exc:
            parse_setcover(path)
        assert exc.value.field == "kind"

    def test_uncovered_element_rejected(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text(
            '{"kind": "setcover", "universe": 3, "sets": [[1, 2]],'
            ' "target": 1, "alpha": 1}'
        )
        with pytest.raises(ValidationError, match="belong to no set"):
            parse_setcover(path)
