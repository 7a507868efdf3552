from fractions import Fraction

import pytest

from equivgerbe.calibration import calibrate
from equivgerbe.conventions import CALIBRATED, Conventions


def test_text_round_trip(tmp_path):
    path = tmp_path / "conv.txt"
    CALIBRATED.save(path)
    assert Conventions.load(path) == CALIBRATED
    assert "c_omega = 1/2" in path.read_text()


def test_flipped_changes_only_one_key():
    for key in Conventions.sign_keys():
        other = CALIBRATED.flipped(key)
        diff = [k for k in CALIBRATED.__dataclass_fields__ if getattr(other, k) != getattr(CALIBRATED, k)]
        assert diff == [key]
    with pytest.raises(ValueError):
        CALIBRATED.flipped("c_omega")


@pytest.mark.parametrize("text", ["nonsense", "chi_sign = 2", "frame_bracket_sign = -1"])
def test_malformed_records(text):
    with pytest.raises(ValueError):
        Conventions.from_text(text)


def test_calibration_reproduces_frozen_record():
    found = calibrate()
    assert found == CALIBRATED
    assert found.c_omega == Fraction(1, 2)
    assert calibrate(seed=0) == found  # repeated calibration gives an identical record


def test_recalibration_after_deleting_record(tmp_path):
    from equivgerbe.harness import load_conventions
    path = tmp_path / "conv.txt"
    first = load_conventions(path)
    text = path.read_text()
    path.unlink()
    assert load_conventions(path) == first
    assert path.read_text() == text
