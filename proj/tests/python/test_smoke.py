import json
import math
import os

import numpy as np
import pytest

import bsemitoric as bs


def test_version_and_systems():
    assert bs.__version__ == "0.1.0"
    for name in bs.SYSTEMS:
        assert bs.System(name).name == name


def test_evaluation_example():
    rev = bs.System("bcsorev")
    L, H = rev.eval_F("cyl", [0.0, 0.5, 1.0, 0.0])
    assert L == pytest.approx(1.1931471805599454, abs=1e-14)
    assert H == pytest.approx(0.4330127018922193, abs=1e-14)
    assert rev.eval_dF("cyl", [0.0, 0.5, 1.0, 0.0]).shape == (2, 4)
    assert rev.omega("cyl", [0.0, 0.0, 1.0, 0.0]).shape == (4, 4)
    assert rev.z_value("cyl", [0.0, 0.0, 1.0, 0.0]) == 0.0


def test_errors_carry_kind():
    with pytest.raises(bs.Error) as info:
        bs.System("cam1", R1=3.0, R2=2.0)
    assert info.value.kind == "BadParams"
    with pytest.raises(bs.Error) as info:
        bs.System("bcso").eval_F("cyl", [0.0, 0.0, 1.0, 0.0])
    assert info.value.kind == "OnSingularHypersurface"
    with pytest.raises(bs.Error) as info:
        bs.to_chart("bcso", "cart+", [0.0, 0.0, 0.0, 0.0], "cyl")
    assert info.value.kind == "OutOfOverlap"


def test_chart_transition():
    x = bs.to_chart("bcso", "cyl", [0.0, 0.5, 0.3, -0.7], "cart+")
    assert x[0] == pytest.approx(math.sqrt(0.75))
    assert x[2:] == [0.3, -0.7]


def test_broken_bracket_magnitude():
    s = bs.System("cambroken", t=0.5)
    b = s.poisson_bracket("cyl/cyl", [1.0, 0.5, 0.0, 0.3])
    closed = 0.5 * (0.5 - 1.0) * math.sqrt(0.75 * 0.91) * math.sin(1.0)
    assert abs(abs(b) - abs(closed)) < 1e-12


def test_classify_bcso():
    report = bs.classify(bs.System("bcso"))
    assert len(report["fixed_points"]) == 2
    for fp in report["fixed_points"]:
        assert fp["type"] == "focus-focus"
        for re, im in fp["spectrum"]:
            assert abs(abs(re) - 1.0) < 1e-9 and abs(abs(im) - 1.0) < 1e-9


def test_tsweep_and_critical_couplings():
    tm, tp = bs.t_critical(1.0, 2.0)
    assert tm == pytest.approx(0.25547916179456587, abs=1e-14)
    assert tp == pytest.approx(0.9209914264407283, abs=1e-14)
    sweep = bs.tsweep("cam3", steps=11)
    assert {tr["pole"] for tr in sweep["transitions"]} == {"p--"}
    for tr in sweep["transitions"]:
        assert min(abs(tr["t"] - tm), abs(tr["t"] - tp)) < 1e-5


def test_verify_reports():
    assert bs.verify(bs.System("cam2"), points=100)["passed"] is True
    assert bs.verify(bs.System("cambroken"), points=100)["passed"] is False


def test_sample_image_and_coverage():
    img = bs.sample_image(bs.System("bcso"), 20000, seed=3)
    assert img["L"].shape == (20000,)
    again = bs.sample_image(bs.System("bcso"), 20000, seed=3)
    assert np.array_equal(img["L"], again["L"]) and np.array_equal(img["H"], again["H"])
    cov = bs.coverage(img)
    assert cov["cells_total"] == 900
    assert 0 < cov["cells_hit"] <= 900
    assert sum(img["counts"]) == int((~img["clamped"]).sum())


def test_reversed_boundary_and_locus():
    L, H = bs.reversed_boundary(0.5)
    assert L == pytest.approx(2.1931471805599454, abs=1e-14)
    assert H == pytest.approx(0.75, abs=1e-14)
    locus = bs.scan_rank1(bs.System("bcsorev"), resolution=32)
    assert locus["components"] == 4
    assert set(locus["family"].tolist()) == {1, 2, 3, 4}


def test_preimage():
    chart, coords = bs.probe_preimage(bs.System("bcso"), -1.0, 2.0)
    L, H = bs.System("bcso").eval_F(chart, coords)
    assert abs(L + 1.0) < 1e-9 and abs(H - 2.0) < 1e-9


def test_flow():
    s = bs.System("bcsorev")
    traj = bs.integrate(s, "cyl", [0.0, 0.5, 1.0, 0.0], which="L", t_max=math.pi)
    assert traj["status"] == "completed"
    end = traj["coords"][-1]
    assert end[2] == pytest.approx(-1.0, abs=1e-9)
    assert max(traj["max_drift"]) < 1e-8
    assert bs.period_check(s, "cyl", [0.3, 0.4, 0.5, 0.6]) < 1e-6


def test_cli_roundtrip(tmp_path):
    code, out, err = bs.run(["classify", "--system", "cso", "--no-grid-scan", "--out", str(tmp_path)])
    assert code == 0, err
    assert json.loads(out)["system"] == "cso"
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    entry = manifest["entries"]["classify_cso"]
    for name in entry["files"].values():
        assert (tmp_path / name).exists()
    code, _, err = bs.run(["classify"])
    assert code == 2 and err
