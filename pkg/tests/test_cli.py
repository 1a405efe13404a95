import json

import numpy as np
import pytest

from combipyramid.cli import main
from combipyramid.netpbm import load_image, save_ppm

from conftest import arrow_sign_raster, flag_sign_raster


@pytest.fixture
def sign_ppm(tmp_path):
    path = tmp_path / "sign.ppm"
    save_ppm(str(path), arrow_sign_raster(24))
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def test_build_writes_pyramid_and_logs_regions(tmp_path, sign_ppm, capsys):
    out = tmp_path / "sign.pyr"
    code, text = run(capsys, "build", "--input", sign_ppm, "--threshold", "1", "--out", out)
    assert code == 0
    info = json.loads(text)
    assert info["regions"] == 3
    assert out.exists()


def test_build_is_byte_deterministic(tmp_path, sign_ppm, capsys):
    a, b = tmp_path / "a.pyr", tmp_path / "b.pyr"
    run(capsys, "build", "--input", sign_ppm, "--threshold", "1", "--out", a)
    run(capsys, "build", "--input", sign_ppm, "--threshold", "1", "--out", b)
    assert a.read_bytes() == b.read_bytes()


def built(tmp_path, sign_ppm, capsys):
    out = tmp_path / "sign.pyr"
    run(capsys, "build", "--input", sign_ppm, "--threshold", "1", "--out", out)
    return out


def test_query_contains_and_report(tmp_path, sign_ppm, capsys):
    pyr_path = built(tmp_path, sign_ppm, capsys)
    code, text = run(capsys, "query", "--pyr", pyr_path, "--level", "top", "--report")
    assert code == 0
    report = json.loads(text)
    assert len(report["contains"]) == 3  # ring>bg, ring>arrow, bg>arrow
    (a, b) = report["contains"][0]
    code, text = run(capsys, "query", "--pyr", pyr_path, "--contains", a, b)
    assert code == 0 and json.loads(text)["contains"] is True
    code, text = run(capsys, "query", "--pyr", pyr_path, "--contains", b, a)
    assert code == 0 and json.loads(text)["contains"] is False
    code, text = run(capsys, "query", "--pyr", pyr_path, "--inside", b, a)
    assert code == 0 and json.loads(text)["inside"] is True


def test_query_meets_each_emits_freeman_chains(tmp_path, sign_ppm, capsys):
    pyr_path = built(tmp_path, sign_ppm, capsys)
    code, text = run(capsys, "query", "--pyr", pyr_path, "--report")
    pair = json.loads(text)["meets"][0]
    code, text = run(capsys, "query", "--pyr", pyr_path, "--meets-each", pair["a"], pair["b"])
    assert code == 0
    out = json.loads(text)
    assert out["meets_exists"] is True
    assert len(out["meets_each"]) == pair["segments"]
    chain = out["meets_each"][0]
    assert ":" in chain["freeman"]
    assert chain["cracks"]
    assert all(rec["move"] in (0, 1, 2, 3) for rec in chain["cracks"])


def test_export_dot_and_labels(tmp_path, sign_ppm, capsys):
    pyr_path = built(tmp_path, sign_ppm, capsys)
    map_dot = tmp_path / "map.dot"
    rag_dot = tmp_path / "rag.dot"
    labels = tmp_path / "labels.pgm"
    code, _ = run(
        capsys, "export", "--pyr", pyr_path,
        "--map-dot", map_dot, "--rag-dot", rag_dot, "--labels", labels,
    )
    assert code == 0
    assert map_dot.read_text().startswith("graph")
    assert "doublecircle" in rag_dot.read_text()
    img = load_image(str(labels))
    assert img.shape == (24, 24, 1)
    assert len(np.unique(img)) == 3
    assert (tmp_path / "labels.pgm.json").exists()


def test_roadsign_mask(tmp_path, sign_ppm, capsys):
    mask_path = tmp_path / "mask.pgm"
    code, text = run(
        capsys, "roadsign", "--input", sign_ppm, "--threshold", "1",
        "--background-color", "0,0,200", "--symbol-color", "255,255,255",
        "--out", mask_path,
    )
    assert code == 0
    info = json.loads(text)
    mask = load_image(str(mask_path))[:, :, 0]
    img = arrow_sign_raster(24)
    arrow = (img[4:-4, 4:-4] == 255).all(axis=2)
    assert (mask[4:-4, 4:-4] > 0).sum() == arrow.sum() == info["symbol_pixels"]


def test_roadsign_flag_fails_cleanly(tmp_path, capsys):
    flag = tmp_path / "flag.ppm"
    save_ppm(str(flag), flag_sign_raster(24))
    code, _ = run(capsys, "roadsign", "--input", flag, "--threshold", "1",
                  "--out", tmp_path / "m.pgm")
    assert code == 1


def test_validate_intact_pyramid(tmp_path, sign_ppm, capsys):
    pyr_path = built(tmp_path, sign_ppm, capsys)
    code, text = run(capsys, "validate", "--pyr", pyr_path)
    assert code == 0
    assert json.loads(text)["ok"] is True


def test_validate_rejects_corrupt_file(tmp_path, sign_ppm, capsys):
    pyr_path = built(tmp_path, sign_ppm, capsys)
    data = json.loads(pyr_path.read_text())
    data["kernels"][0] = data["kernels"][0][:-2]  # drop darts from a kernel
    bad = tmp_path / "bad.pyr"
    bad.write_text(json.dumps(data))
    code, _ = run(capsys, "validate", "--pyr", bad)
    assert code == 1


def test_query_level_zero_and_composed_of(tmp_path, sign_ppm, capsys):
    pyr_path = built(tmp_path, sign_ppm, capsys)
    code, text = run(capsys, "query", "--pyr", pyr_path, "--level", "0", "--report")
    assert code == 0
    report = json.loads(text)
    assert report["level"] == 0
    assert report["contains"] == []  # single pixels enclose nothing
    code, text = run(capsys, "query", "--pyr", pyr_path, "--report")
    parent = json.loads(text)["composed_of"][0]["parent"]
    code, text = run(capsys, "query", "--pyr", pyr_path, "--composed-of", parent)
    assert code == 0
    assert json.loads(text)["composed_of"]


def test_missing_file_is_a_clean_error(tmp_path, capsys):
    code = main(["query", "--pyr", str(tmp_path / "nope.pyr"), "--report"])
    assert code == 1
