import json
import math

import numpy as np
import pytest

from bergkf import cli, lab
from bergkf.kernels import reinhardt_moment


# ---------------------------------------------------------------- parsing


@pytest.mark.parametrize(
    "text, want",
    [("1", 1), ("-2.5", -2.5), ("0.3+0.2i", 0.3 + 0.2j), ("1-i", 1 - 1j), ("i", 1j), ("-i", -1j), ("2j", 2j), ("1e-3+4e-1i", 1e-3 + 0.4j)],
)
def test_parse_complex(text, want):
    assert lab.parse_complex(text) == want


def test_parse_vector_separators():
    v = lab.parse_vector("1, 0.3+0.2i; -i")
    np.testing.assert_array_equal(v, [1, 0.3 + 0.2j, -1j])


def test_config_from_text_comments_and_types():
    cfg = lab.ExperimentConfig.from_text(
        """
        # boundary sweep
        domain = ellipsoid   # trailing comment
        p = 1, 2
        point = 0.7071067811865476, 0.8408964152537145
        vector = 1, 0.3+0.2i
        quantities = a d
        delta0 = 0.02
        kappa = 0.5
        m = 3
        N = auto
        check_monotone = no
        """
    )
    assert cfg.domain == "ellipsoid" and cfg.n == 2 and cfg.p == (1.0, 2.0)
    assert cfg.N is None and cfg.m == 3 and not cfg.check_monotone
    assert cfg.quantities == ("a", "d")
    np.testing.assert_allclose(cfg.vector, [1, 0.3 + 0.2j])
    assert cfg.schedule == pytest.approx([0.02, 0.01, 0.005])


def test_config_defaults_depend_on_domain():
    assert lab.ExperimentConfig(domain="ball").schedule[0] == 0.1
    assert len(lab.ExperimentConfig(domain="ball").schedule) == 8
    assert lab.ExperimentConfig(domain="ellipsoid").schedule[0] == 0.04


@pytest.mark.parametrize(
    "text",
    ["colour = red", "domain = torus", "no equals sign", "kappa = 1.5", "domain = ball\nn = 2\npoint = 1,0,0"],
)
def test_config_rejects_bad_input(text):
    with pytest.raises(ValueError):
        lab.ExperimentConfig.from_text(text)


def test_config_to_dict_is_json_serializable():
    cfg = lab.ExperimentConfig(domain="ball", n=2, vector="1, 1i")
    d = json.loads(json.dumps(cfg.to_dict()))
    assert d["vector"] == ["1.0", "0.0+1.0i"]


# ---------------------------------------------------------------- extrapolation


@pytest.mark.parametrize("order", [1.0, 0.5, 2.0])
def test_richardson_is_exact_for_the_assumed_model(order):
    L, c, d, k = 3.25, -1.7, 0.01, 0.5
    f = lambda t: L + c * t**order
    assert lab.richardson(f(d), f(k * d), k, order) == pytest.approx(L, rel=1e-13)


def test_rel_err_zero_target_falls_back_to_absolute():
    assert lab.rel_err(1e-3, 0.0) == 1e-3
    assert lab.rel_err(-2.0, -4.0) == 0.5


# ---------------------------------------------------------------- oracles


@pytest.mark.parametrize("n", [1, 2, 3])
def test_ball_oracle_report_passes(n):
    rep = lab.run_ball_oracle(n)
    assert rep.passed, rep.summary()
    assert set(rep.max_rel_errors) == {"g", "beta", "R", "Ric"}


def test_ball_oracle_rejects_large_dimension():
    with pytest.raises(ValueError):
        lab.run_ball_oracle(4)


def test_sample_ball_points_radius():
    pts = lab.sample_ball_points(3, 200, 0.8, np.random.default_rng(1))
    assert np.all(np.linalg.norm(pts, axis=1) <= 0.8 + 1e-15)


def test_polydisc_oracle_passes():
    assert lab.run_polydisc_oracle(2).passed


# ---------------------------------------------------------------- boundary sweep on the ball


def _ball_closed_forms(n, d, XN, XH):
    # exact values of the six quantities at (0, .., 1 - d) with the nearest-point distance d
    c = (n + 1) ** n * (n + 2) ** n
    s = (n + 1) * (n + 2)
    return {
        "a": c / (2 - d) ** (n + 1),
        "b": math.sqrt(s) * XN / (2 - d),
        "c": math.sqrt(s / (2 - d)) * XH,
        "d": c * math.pi**n / math.factorial(n),
        "e": -2.0 / s,
        "f": -1.0 / (n + 2),
    }


@pytest.fixture(scope="module")
def ball_sweep():
    cfg = lab.ExperimentConfig(domain="ball", n=2, point="0, 1", vector="0.5, 2", delta0=0.02, kappa=0.5, m=3, workers=1)
    return lab.run_asymptotics(cfg)


def test_ball_sweep_matches_finite_delta_closed_forms(ball_sweep):
    for r in ball_sweep.rows:
        want = _ball_closed_forms(2, r.delta, 2.0, 0.5)
        for q, v in r.values.items():
            assert v == pytest.approx(want[q], rel=1e-9), (q, r.delta)


def test_ball_sweep_targets_and_extrapolation(ball_sweep):
    want = _ball_closed_forms(2, 0.0, 2.0, 0.5)
    for q in lab.ASYMPTOTIC_QUANTITIES:
        assert ball_sweep.targets[q] == pytest.approx(want[q], rel=1e-12)
    last = ball_sweep.rows[-1]
    assert last.extrap_errors["a"] < last.rel_errors["a"]
    assert ball_sweep.rows[0].extrapolated == {}


def test_ball_sweep_distance_and_schedule(ball_sweep):
    assert [r.delta for r in ball_sweep.rows] == pytest.approx([0.02, 0.01, 0.005], rel=1e-12)
    assert all(r.trusted and r.N is None for r in ball_sweep.rows)


def test_report_write_csv_and_sidecar(ball_sweep, tmp_path):
    path = ball_sweep.write(tmp_path / "sub" / "sweep.csv")
    lines = path.read_text().splitlines()
    assert lines[0].startswith("j,delta,eta,N,trusted,a,a_target")
    assert len(lines) == 1 + len(ball_sweep.rows)
    first_a = float(lines[1].split(",")[5])
    assert first_a == ball_sweep.rows[0].values["a"]  # 17 significant digits round-trip
    meta = json.loads((tmp_path / "sub" / "sweep.csv.json").read_text())
    assert meta["passed"] == ball_sweep.passed
    assert meta["error_model"]["a"] == "delta"
    assert meta["config"]["domain"] == "ball"


def test_report_output_is_deterministic(ball_sweep, tmp_path):
    cfg = lab.ExperimentConfig(domain="ball", n=2, point="0, 1", vector="0.5, 2", delta0=0.02, kappa=0.5, m=3, workers=3)
    other = lab.run_asymptotics(cfg)
    a = ball_sweep.write(tmp_path / "a.csv").read_text()
    b = other.write(tmp_path / "b.csv").read_text()
    assert a == b


def test_asymptotics_requires_boundary_point():
    cfg = lab.ExperimentConfig(domain="ball", n=2, point="0, 0.9", m=2)
    with pytest.raises(ValueError):
        lab.run_asymptotics(cfg)


# ---------------------------------------------------------------- scaling sweep


def test_ball_scaling_kernel_follows_exact_delta_law():
    cfg = lab.ExperimentConfig(domain="ball", n=2, vector="0, 1", quantities=("K", "g", "beta", "R", "Ric"), delta0=0.1, m=3, workers=1)
    rep = lab.run_scaling(cfg)
    assert rep.targets["K"] == pytest.approx(1 / (4 * math.pi**2), rel=1e-12)
    assert rep.targets["beta"] == pytest.approx(72 * math.pi**2, rel=1e-12)
    for r in rep.rows:
        assert r.values["K"] == pytest.approx(rep.targets["K"] * (1 - r.delta / 2) ** -3, rel=1e-9)
        assert r.values["g"] == pytest.approx(rep.targets["g"] * (1 - r.delta / 2) ** -3, rel=1e-9)
        for q in ("beta", "R", "Ric"):
            assert r.values[q] == pytest.approx(rep.targets[q], rel=1e-9)
    for res in rep.metadata["residuals"]:
        assert res["S_zeta_minus_bstar"] < 1e-12
        assert res["foot_minus_p0"] < 1e-12


# ---------------------------------------------------------------- moments


def test_moments_match_quadrature():
    rows, ok = lab.run_moments((1.0, 2.0), max_degree=3)
    assert ok
    assert len(rows) == 10


@pytest.mark.parametrize("alpha", [(0, 0), (1, 0), (2, 1), (0, 3)])
def test_ball_moments_closed_form(alpha):
    want = math.pi**2 * math.factorial(alpha[0]) * math.factorial(alpha[1]) / math.factorial(sum(alpha) + 2)
    assert reinhardt_moment((1.0, 1.0), alpha) == pytest.approx(want, rel=1e-13)


def test_write_moments(tmp_path):
    rows, _ = lab.run_moments((1.0,), max_degree=2)
    text = lab.write_moments(tmp_path / "m.csv", rows).read_text().splitlines()
    assert text[0] == "alpha1,c,c_quad,rel_err"
    assert float(text[2].split(",")[1]) == pytest.approx(math.pi / 2, rel=1e-15)


# ---------------------------------------------------------------- point evaluation and CLI


def test_evaluate_point_ball():
    out = lab.evaluate_point(lab.provider_for("ball", 2), [0.1, 0.2j], [1, 0])
    assert out["Ric_kf"] == pytest.approx(-0.25, rel=1e-10)
    assert out["R_b"] == pytest.approx(-2 / 3, rel=1e-10)
    assert out["beta_kf"] == pytest.approx(72 * math.pi**2, rel=1e-10)


def test_cli_ball_oracle_exit_code(capsys):
    assert cli.main(["ball-oracle", "--n", "1", "--count", "5"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_cli_eval(capsys):
    assert cli.main(["eval", "--domain", "ball", "--point", "0.1, 0.2i"]) == 0
    assert "Ric_kf" in capsys.readouterr().out
    assert cli.main(["eval", "--domain", "ball", "--point", "1, 1"]) == 2


def test_cli_moments(tmp_path, capsys):
    out = tmp_path / "m.csv"
    assert cli.main(["moments", "--p", "1", "2", "--N", "2", "--output", str(out)]) == 0
    assert out.exists()


def test_cli_asymptotics_exit_codes(tmp_path):
    good = tmp_path / "good.conf"
    good.write_text("domain = ball\nn = 2\npoint = 0, 1\nvector = 1, 1\ndelta0 = 1e-3\nkappa = 0.5\nm = 2\n")
    out = tmp_path / "out.csv"
    assert cli.main(["asymptotics", "--config", str(good), "--output", str(out)]) == 0
    assert out.exists() and (tmp_path / "out.csv.json").exists()
    # a coarse schedule misses the 1e-6 extrapolation bound
    bad = tmp_path / "bad.conf"
    bad.write_text("domain = ball\nn = 2\npoint = 0, 1\nvector = 1, 1\ndelta0 = 0.1\nm = 2\n")
    assert cli.main(["asymptotics", "--config", str(bad)]) == 1
    # beyond the nearest-point uniqueness radius
    far = tmp_path / "far.conf"
    far.write_text("domain = ball\nn = 2\npoint = 0, 1\ndelta0 = 0.3\nm = 2\n")
    assert cli.main(["asymptotics", "--config", str(far)]) == 2
    assert cli.main(["asymptotics", "--config", str(tmp_path / "missing.conf")]) == 2


def test_cli_requires_subcommand():
    with pytest.raises(SystemExit):
        cli.main([])
