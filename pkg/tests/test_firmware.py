import pytest

from hopscotch.firmware import (
    CHANNELS,
    DebounceConfig,
    JumpScript,
    ScriptError,
    Simulator,
    button_pressed,
    run_script,
)
from hopscotch.osc import parse_trigger_address


def script_of(*actions):
    return JumpScript.from_dict({"actions": list(actions)})


def contact(t, pad, dur):
    return {"t_ms": t, "kind": "contact", "pad": pad, "duration_ms": dur}


class TestDebounce:
    def test_short_contact_rejected(self):
        assert button_pressed(5) == 0

    def test_threshold_boundary(self):
        # Default: 100 iterations of 0.1 ms; count must exceed, not meet.
        assert button_pressed(10.0) == 0
        assert button_pressed(10.1) == 1

    def test_long_contact_accepted(self):
        assert button_pressed(20) == 1

    def test_no_contact(self):
        assert button_pressed(0) == 0

    def test_custom_config(self):
        cfg = DebounceConfig(threshold_iterations=10, iteration_period_ms=1.0)
        assert button_pressed(10, cfg) == 0
        assert button_pressed(11, cfg) == 1

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            DebounceConfig(threshold_iterations=0)
        with pytest.raises(ValueError):
            DebounceConfig(iteration_period_ms=0)


class TestScriptValidation:
    def test_unknown_kind(self):
        with pytest.raises(ScriptError, match=r"actions\[0\]"):
            script_of({"t_ms": 0, "kind": "jump"})

    def test_bad_pad(self):
        with pytest.raises(ScriptError, match="pad"):
            script_of(contact(0, 13, 20))

    def test_out_of_order(self):
        with pytest.raises(ScriptError, match="non-decreasing"):
            script_of(contact(100, 1, 20), contact(50, 2, 20))

    def test_overlapping_contacts_same_pad(self):
        with pytest.raises(ScriptError, match="overlapping"):
            script_of(contact(0, 1, 100), contact(50, 1, 20))

    def test_overlap_allowed_across_pads(self):
        script_of(contact(0, 1, 100), contact(50, 2, 100))

    def test_sensor_range(self):
        with pytest.raises(ScriptError, match="0..1023"):
            script_of({"t_ms": 0, "kind": "sensor", "channel": "slider", "value": 1024})

    def test_unknown_channel(self):
        with pytest.raises(ScriptError, match="channel"):
            script_of({"t_ms": 0, "kind": "sensor", "channel": "gyro", "value": 1})


class TestPollStep:
    def test_idle_frame_shape(self):
        sim = Simulator(script_of())
        msgs = sim.poll_step(50)
        assert len(msgs) == 18
        assert [m.address for m in msgs[:6]] == list(CHANNELS.values())
        assert [m.address for m in msgs[6:]] == [f"/trigger{i}" for i in range(1, 13)]
        assert all(m.args == (0,) for m in msgs)

    def test_trigger_fires_once(self):
        sim = Simulator(script_of(contact(10, 3, 20)))
        first = {m.address: m.args[0] for m in sim.poll_step(50)}
        second = {m.address: m.args[0] for m in sim.poll_step(100)}
        assert first["/trigger3"] == 1
        assert second["/trigger3"] == 0

    def test_sensor_pass_through(self):
        sim = Simulator(
            script_of({"t_ms": 0, "kind": "sensor", "channel": "slider", "value": 512})
        )
        msgs = {m.address: m.args[0] for m in sim.poll_step(50)}
        assert msgs["/Slider_data"] == 512


class TestRunScript:
    def test_empty_script_two_polls(self):
        stream = run_script(script_of(), duration_ms=100)
        assert len(stream) == 36
        assert {t for t, _ in stream} == {50, 100}

    def test_single_qualifying_contact(self):
        stream = run_script(script_of(contact(0, 1, 20)))
        hits = [
            (t, m)
            for t, m in stream
            if m.address == "/trigger1" and m.args[0] == 1
        ]
        assert len(hits) == 1

    def test_sub_threshold_contact_never_triggers(self):
        stream = run_script(script_of(contact(0, 5, 8)))
        assert all(
            m.args[0] == 0 for _, m in stream if parse_trigger_address(m.address)
        )

    def test_determinism(self):
        script = script_of(
            contact(0, 1, 20),
            {"t_ms": 60, "kind": "sensor", "channel": "piezo", "value": 700},
            contact(120, 9, 30),
        )
        assert run_script(script) == run_script(script)

    def test_timestamps_are_poll_multiples(self):
        stream = run_script(script_of(contact(0, 2, 33), contact(400, 2, 33)))
        assert all(t % 50 == 0 for t, _ in stream)

    def test_held_contact_reported_after_release(self):
        # Contact spans several polls; report lands on the poll at/after release.
        stream = run_script(script_of(contact(10, 4, 170)))
        hits = [t for t, m in stream if m.address == "/trigger4" and m.args[0] == 1]
        assert hits == [200]

    def test_sensor_values_in_adc_range(self):
        stream = run_script(
            script_of({"t_ms": 0, "kind": "sensor", "channel": "fsr", "value": 1023})
        )
        assert all(0 <= m.args[0] <= 1023 for _, m in stream)
