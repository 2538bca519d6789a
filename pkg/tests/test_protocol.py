import json
from pathlib import Path

import pytest

from glovelink import protocol
from glovelink.protocol import (MESSAGE_TYPES, PROTOCOL_VERSION, ProtocolError,
                                ack, error_msg, event_msg, gesture_override,
                                hand_input, hello, parse, robot_state, serialize,
                                set_config)

CORPUS = Path(__file__).parent / "data" / "protocol_corpus.ndjson"


class TestGoldenCorpus:
    def test_every_line_round_trips(self):
        lines = CORPUS.read_text().splitlines()
        assert len(lines) >= 10
        for line in lines:
            assert serialize(parse(line)) == line

    def test_corpus_covers_all_types(self):
        seen = {json.loads(line)["type"] for line in CORPUS.read_text().splitlines()}
        assert seen == MESSAGE_TYPES


class TestParse:
    def test_rejects_bad_json(self):
        with pytest.raises(ProtocolError) as ei:
            parse("{nope")
        assert ei.value.code == "bad_json"

    def test_rejects_non_object(self):
        with pytest.raises(ProtocolError) as ei:
            parse("[1,2,3]")
        assert ei.value.code == "bad_frame"

    def test_rejects_wrong_version(self):
        with pytest.raises(ProtocolError) as ei:
            parse(json.dumps({"type": "hello", "v": 99}))
        assert ei.value.code == "bad_version"

    def test_rejects_missing_version(self):
        with pytest.raises(ProtocolError):
            parse(json.dumps({"type": "hello"}))

    def test_rejects_unknown_type(self):
        with pytest.raises(ProtocolError) as ei:
            parse(json.dumps({"type": "teleport", "v": 1}))
        assert ei.value.code == "unknown_type"

    def test_rejects_missing_required_field(self):
        msg = hand_input(0.0, [0, 0, 0], [1, 0, 0, 0], 0.1)
        del msg["finger_dist"]
        with pytest.raises(ProtocolError) as ei:
            parse(serialize(msg))
        assert ei.value.code == "missing_field"

    def test_rejects_bad_vector_lengths(self):
        msg = hand_input(0.0, [0, 0, 0], [1, 0, 0, 0], 0.1)
        msg["pos"] = [0, 0]
        with pytest.raises(ProtocolError) as ei:
            parse(serialize(msg))
        assert ei.value.code == "bad_field"

    def test_rejects_bad_landmark_count(self):
        msg = hand_input(0.0, [0, 0, 0], [1, 0, 0, 0], 0.1,
                         landmarks=[[0, 0, 0]] * 20)
        with pytest.raises(ProtocolError):
            parse(serialize(msg))

    def test_rejects_unknown_config_key(self):
        with pytest.raises(ProtocolError) as ei:
            parse(json.dumps({"type": "set_config", "v": 1, "speed": 2}))
        assert ei.value.code == "bad_field"


class TestBuilders:
    @pytest.mark.parametrize("msg", [
        hello(), hello("observer"),
        hand_input(0.1, [1, 2, 3], [1, 0, 0, 0], 0.05),
        hand_input(0.1, [1, 2, 3], [1, 0, 0, 0], 0.05,
                   landmarks=[[0, 0, 0]] * 21),
        gesture_override(4), gesture_override(1, t=0.5),
        robot_state(1.0, [0, 0, 0], [1, 0, 0, 0], 0.2, False, True, False, True),
        event_msg(0.0, "tracking_on"),
        set_config(eta=0.1), ack(of="set_config"), error_msg("oops", "detail"),
    ])
    def test_builders_produce_valid_frames(self, msg):
        assert parse(serialize(msg)) == msg
        assert msg["v"] == PROTOCOL_VERSION

    def test_set_config_rejects_unknown_key(self):
        with pytest.raises(ValueError):
            set_config(velocity=9)

    def test_serialization_is_canonical(self):
        a = {"v": 1, "type": "hello", "role": "operator"}
        b = {"role": "operator", "type": "hello", "v": 1}
        assert serialize(a) == serialize(b)
        assert " " not in serialize(a)
