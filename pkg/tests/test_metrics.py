import math

import pytest

from hopscotch.engine import SessionLog, make_header
from hopscotch.metrics import SCORE_NAMES, compute, format_table, grade


def build_log(records):
    log = SessionLog(make_header())
    for r in records:
        log.append(r)
    return log


def press_and_sound(t, pad, sound_id=None, gain=0.5, pitch=None):
    return [
        {"kind": "press", "t": t, "pad": pad},
        {
            "kind": "sound",
            "t": t,
            "pad": pad,
            "soundId": sound_id or f"animal/{pad}",
            "gain": gain,
            "pitch": pitch,
        },
    ]


class TestGrade:
    @pytest.mark.parametrize(
        "score,expected",
        [
            (0.95, "A"), (0.90, "A"),
            (0.85, "B"), (0.80, "B"),
            (0.75, "C"), (0.70, "C"),
            (0.65, "D"), (0.60, "D"),
            (0.59, "E"), (0.30, "E"), (0.0, "E"), (1.0, "A"),
        ],
    )
    def test_bands(self, score, expected):
        assert grade(score) == expected

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            grade(1.1)
        with pytest.raises(ValueError):
            grade(-0.01)

    def test_monotone(self):
        order = {"E": 0, "D": 1, "C": 2, "B": 3, "A": 4}
        grades = [order[grade(i / 100)] for i in range(101)]
        assert grades == sorted(grades)


class TestCompute:
    def test_empty_log(self):
        report = compute(build_log([]))
        assert all(report.scores[n] == 0.0 for n in SCORE_NAMES)
        assert all(report.grades[n] == "E" for n in SCORE_NAMES)

    def test_single_press_no_rhythm(self):
        report = compute(build_log(press_and_sound(100, 1)))
        assert report.scores["rhythm_variety"] == 0.0

    def test_uniform_train_zero_entropy(self):
        records = []
        for i in range(10):
            records += press_and_sound(i * 500, 1)
        report = compute(build_log(records))
        assert report.scores["rhythm_variety"] == 0.0

    def test_two_interval_classes(self):
        # IOIs alternate 500/1000 -> two equally occupied bins -> entropy 1.
        records = []
        t = 0
        for i in range(9):
            records += press_and_sound(t, 1)
            t += 500 if i % 2 == 0 else 1000
        report = compute(build_log(records))
        assert report.scores["rhythm_variety"] == pytest.approx(1.0)

    def test_all_twelve_pads_full_pitch_sensation(self):
        records = []
        for pad in range(1, 13):
            records += press_and_sound(pad * 1000, pad)
        report = compute(build_log(records))
        assert report.scores["pitch_sensation"] == pytest.approx(1.0)

    def test_pitch_classes_for_generative(self):
        records = []
        for i, pitch in enumerate([48, 49, 51, 60, 61]):  # pcs {0,1,3} -> 3 distinct
            records += press_and_sound(i * 1000, 1, sound_id="gen/1", pitch=pitch)
        report = compute(build_log(records))
        assert report.scores["pitch_sensation"] == pytest.approx(3 / 12)

    def test_sound_response_counts_unanswered(self):
        records = press_and_sound(0, 1)
        records.append({"kind": "press", "t": 1000, "pad": 2})  # no command
        report = compute(build_log(records))
        assert report.scores["sound_response"] == pytest.approx(0.5)

    def test_constant_gain_no_dynamic_variance(self):
        records = []
        for i in range(5):
            records += press_and_sound(i * 1000, 1, gain=0.5)
        assert compute(build_log(records)).scores["dynamic_variance"] == 0.0

    def test_gain_spread_raises_dynamic_variance(self):
        records = []
        for i, g in enumerate([0.1, 0.9] * 4):
            records += press_and_sound(i * 1000, 1, gain=g)
        report = compute(build_log(records))
        assert report.scores["dynamic_variance"] == pytest.approx(0.8)

    def test_timbre_change_all_same(self):
        records = []
        for i in range(5):
            records += press_and_sound(i * 1000, 3)
        assert compute(build_log(records)).scores["timbre_change"] == 0.0

    def test_timbre_change_counts_switches(self):
        records = press_and_sound(0, 1)
        records.append({"kind": "mode", "t": 500, "mode": "generative"})
        records += press_and_sound(1000, 1, sound_id="gen/1", pitch=48)
        report = compute(build_log(records))
        # one mode switch + one consecutive id change over (2-1) commands
        assert report.scores["timbre_change"] == 1.0

    def test_redundant_mode_records_do_not_count(self):
        records = press_and_sound(0, 1)
        records.append({"kind": "mode", "t": 500, "mode": "cartoon"})
        records += press_and_sound(1000, 1)
        assert compute(build_log(records)).scores["timbre_change"] == 0.0

    def test_replay_stability(self):
        records = []
        for i in range(6):
            records += press_and_sound(i * 700, (i % 3) + 1)
        log = build_log(records)
        assert compute(log).to_dict() == compute(log).to_dict()

    def test_scores_in_range_and_grades_match(self):
        records = []
        for i in range(8):
            records += press_and_sound(i * 333, (i % 5) + 1, gain=0.1 * i)
        report = compute(build_log(records))
        for name in SCORE_NAMES:
            assert 0.0 <= report.scores[name] <= 1.0
            assert report.grades[name] == grade(report.scores[name])

    def test_adding_new_pad_never_decreases_pitch_sensation(self):
        records = []
        for i in range(4):
            records += press_and_sound(i * 1000, 1)
        before = compute(build_log(records)).scores["pitch_sensation"]
        records += press_and_sound(5000, 2)
        after = compute(build_log(records)).scores["pitch_sensation"]
        assert after >= before


def test_format_table_marks_grades():
    records = []
    for pad in range(1, 13):
        records += press_and_sound(pad * 1000, pad)
    report = compute(build_log(records))
    table = format_table(report)
    assert "Rhythm Variety" in table
    for letter in "ABCDE":
        assert f"  {letter} " in table
