import numpy as np
import pytest

from roadsense.errors import DataError
from roadsense.fileio import (DriveLogRecord, read_drive_log, read_pnm, read_sensor_csv, write_drive_log, write_pnm,
                              write_sensor_csv)


@pytest.mark.parametrize("shape", [(5, 7), (5, 7, 1), (4, 3, 3)])
def test_pnm_round_trip(tmp_path, rng, shape):
    img = np.round(rng.random(shape) * 255) / 255
    path = tmp_path / "x.pnm"
    write_pnm(path, img)
    back = read_pnm(path)
    assert back.shape == (shape if len(shape) == 3 else shape + (1,))
    np.testing.assert_array_equal(back.reshape(img.shape), img)


def test_pnm_header_bytes(tmp_path):
    write_pnm(tmp_path / "a.pgm", np.zeros((2, 3)))
    assert (tmp_path / "a.pgm").read_bytes() == b"P5\n3 2\n255\n" + bytes(6)


def test_pnm_comments_and_errors(tmp_path):
    p = tmp_path / "c.pgm"
    p.write_bytes(b"P5\n# made by hand\n2 1\n# depth\n255\n\x00\xff")
    np.testing.assert_array_equal(read_pnm(p)[:, :, 0], [[0.0, 1.0]])
    p.write_bytes(b"P5\n2 1\n255\n\x00")
    with pytest.raises(DataError, match="truncated"):
        read_pnm(p)
    p.write_bytes(b"P2\n2 1\n255\n0 1")
    with pytest.raises(DataError):
        read_pnm(p)


def test_sensor_csv_round_trip(tmp_path, rng):
    stream = rng.normal(size=50)
    write_sensor_csv(tmp_path / "s.csv", stream, 100.0, label="gravel")
    ts, az, labels = read_sensor_csv(tmp_path / "s.csv")
    np.testing.assert_array_equal(az, stream)
    assert ts[1] == pytest.approx(0.01)
    assert labels == ["gravel"] * 50


def test_sensor_csv_malformed_row(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("timestamp_s,accel_z\n0.0,1.0\n0.01,abc\n")
    with pytest.raises(DataError, match=":3:"):
        read_sensor_csv(p)


def _record(t, **kw):
    base = dict(timestamp_s=t, accel_z=0.5, image=None, wind_speed=1, humidity=2, light_level=3,
                temperature=4, rain_sensor=5)
    base.update(kw)
    return DriveLogRecord(**base)


def test_drive_log_round_trip(tmp_path):
    records = [_record(0.0, image="a.pgm"), _record(0.01)]
    write_drive_log(tmp_path / "d.csv", records)
    back = read_drive_log(tmp_path / "d.csv")
    assert [r.image for r in back] == ["a.pgm", None]
    assert back[1].timestamp_s == 0.01 and back[1].line == 3


def test_drive_log_rejects_non_monotone(tmp_path):
    write_drive_log(tmp_path / "d.csv", [_record(0.0), _record(0.0)])
    with pytest.raises(DataError, match=":3:.*increasing"):
        read_drive_log(tmp_path / "d.csv")


def test_drive_log_missing_column(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("timestamp_s,accel_z\n0,1\n")
    with pytest.raises(DataError, match="missing"):
        read_drive_log(p)


def test_empty_drive_log(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("")
    assert read_drive_log(p) == []
