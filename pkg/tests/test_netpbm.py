import numpy as np
import pytest

from combipyramid.netpbm import NetpbmError, load_image, save_pgm, save_ppm


def test_minimal_ascii_pgm(tmp_path):
    p = tmp_path / "one.pgm"
    p.write_bytes(b"P2\n1 1\n255\n17\n")
    img = load_image(str(p))
    assert img.shape == (1, 1, 1)
    assert img[0, 0, 0] == 17


def test_ascii_ppm_with_comments(tmp_path):
    p = tmp_path / "c.ppm"
    p.write_bytes(b"P3\n# a comment\n2 1\n# another\n255\n1 2 3  4 5 6\n")
    img = load_image(str(p))
    assert img.shape == (1, 2, 3)
    assert img[0, 1].tolist() == [4, 5, 6]


def test_binary_round_trips(tmp_path):
    rgb = np.arange(24, dtype=np.uint8).reshape(2, 4, 3)
    pp = tmp_path / "x.ppm"
    save_ppm(str(pp), rgb)
    assert (load_image(str(pp)) == rgb).all()
    gray = np.arange(8, dtype=np.uint8).reshape(2, 4)
    pg = tmp_path / "x.pgm"
    save_pgm(str(pg), gray)
    assert (load_image(str(pg))[:, :, 0] == gray).all()


def test_maxval_normalization(tmp_path):
    p = tmp_path / "m.pgm"
    p.write_bytes(b"P2\n2 1\n100\n0 100\n")
    img = load_image(str(p))
    assert img[0, 0, 0] == 0 and img[0, 1, 0] == 255
    # 16-bit binary payload, big endian
    p2 = tmp_path / "wide.pgm"
    payload = np.array([0, 65535], dtype=">u2").tobytes()
    p2.write_bytes(b"P5\n2 1\n65535\n" + payload)
    img2 = load_image(str(p2))
    assert img2[0, 0, 0] == 0 and img2[0, 1, 0] == 255


def test_truncated_binary_payload_reports_offset(tmp_path):
    p = tmp_path / "t.pgm"
    data = b"P5\n2 2\n255\n\x01\x02"
    p.write_bytes(data)
    with pytest.raises(NetpbmError) as err:
        load_image(str(p))
    assert "truncated" in str(err.value)
    assert err.value.offset == len(data)


def test_truncated_ascii_payload(tmp_path):
    p = tmp_path / "t2.pgm"
    p.write_bytes(b"P2\n2 2\n255\n1 2 3\n")
    with pytest.raises(NetpbmError, match="truncated"):
        load_image(str(p))


def test_bad_magic_and_header(tmp_path):
    p = tmp_path / "bad.pbm"
    p.write_bytes(b"P7\n1 1\n255\n0\n")
    with pytest.raises(NetpbmError, match="magic"):
        load_image(str(p))
    p.write_bytes(b"P2\n0 1\n255\n")
    with pytest.raises(NetpbmError, match="dimensions"):
        load_image(str(p))
    p.write_bytes(b"P2\n1 x\n255\n0\n")
    with pytest.raises(NetpbmError, match="token"):
        load_image(str(p))


def test_sample_above_maxval_rejected(tmp_path):
    p = tmp_path / "over.pgm"
    p.write_bytes(b"P2\n1 1\n9\n10\n")
    with pytest.raises(NetpbmError, match="exceeds"):
        load_image(str(p))
