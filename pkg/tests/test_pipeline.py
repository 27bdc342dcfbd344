"""
Tests for configuration loading and the file-based pipeline stages.
"""

import pytest

from kreweras import config
from kreweras.certify import THETA_PREMISES, TRANSCENDENCE_PREMISES
from kreweras.errors import ConfigError, StageError
from kreweras.local import power_series_solutions
from kreweras.models import CheckStatus, GuessConfig, PipelineConfig
from kreweras.ore import T, OreOp
from kreweras.pipeline import Pipeline, load_pipeline_config, parse_config_text, run_pipeline
from kreweras.textio import operator_from_text, read_artifact, series_from_text


def test_parse_config_text():
    text = "# orders\ntheta_order = 80\n\nguess.max_degree=12\n"
    assert parse_config_text(text) == {"theta_order": "80", "guess.max_degree": "12"}


def test_parse_config_text_rejects_bare_words():
    with pytest.raises(ConfigError) as excinfo:
        parse_config_text("theta_order=80\nverbose\n")
    assert "line 2" in str(excinfo.value)


def test_load_config_layers(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("theta_order=90\nguess.max_degree=12\nmax_order=3\nx_points=2,3,5\nprime=101\n")
    cfg = load_pipeline_config(str(path), {"theta_order": 100, "closedform_order": None})
    assert cfg.theta_order == 100
    assert cfg.closedform_order == config.CLOSEDFORM_ORDER
    assert cfg.guess.max_degree == 12
    assert cfg.guess.max_order == 3
    assert cfg.guess.x_points == (2, 3, 5)
    assert cfg.guess.reserve == config.THETA_RESERVE
    assert cfg.prime == cfg.guess.prime == 101


def test_load_config_errors(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("colour=blue\n")
    with pytest.raises(ConfigError):
        load_pipeline_config(str(path))
    with pytest.raises(ConfigError):
        load_pipeline_config(None, {"prime": 45009})
    with pytest.raises(ConfigError):
        load_pipeline_config(None, {"reserve": 3})


def small_pipeline(tmp_path, **kw):
    values = dict(enumerate_order=6, theta_order=60, closedform_order=30,
                  guess=GuessConfig(max_order=1, max_degree=2), output_dir=str(tmp_path))
    values.update(kw)
    return Pipeline(PipelineConfig(**values))


def test_pipeline_validates_orders(tmp_path):
    with pytest.raises(ConfigError):
        small_pipeline(tmp_path, closedform_order=70)


def test_enumerate_and_kernel_stages(tmp_path):
    pipe = small_pipeline(tmp_path)
    pipe.enumerate_stage()
    pipe.kernel_check()
    Q = series_from_text(read_artifact(tmp_path / "Q.txt"))
    assert Q.prec == 7
    assert Q.ring.names == ("a", "b", "c", "x", "y")
    for name in ("kernel-kreweras.txt", "kernel-reverse-kreweras.txt"):
        residual = series_from_text(read_artifact(tmp_path / name))
        assert residual.is_zero
    assert set(pipe.hashes) == {"Q.txt", "Q00.txt", "kernel-kreweras.txt", "kernel-reverse-kreweras.txt"}


def test_closedform_orders_follow_the_operator(tmp_path):
    # order 1 and r = 1 leave 20 checked coefficients only from order 22 on
    geometric = OreOp.from_coeffs([-1, 1 - T])
    with pytest.raises(ConfigError) as excinfo:
        small_pipeline(tmp_path, closedform_order=21).check_closedform_orders(geometric)
    assert str(excinfo.value).startswith("closedform-covers-margin")
    sols = small_pipeline(tmp_path, closedform_order=22).check_closedform_orders(geometric)
    assert sols.r == 1


def test_failing_stage_names_itself(tmp_path):
    pipe = small_pipeline(tmp_path)
    with pytest.raises(StageError) as excinfo:
        pipe.guess()
    assert excinfo.value.stage == "guess-ode"
    assert "guess-ode --series" in excinfo.value.replay


@pytest.mark.slow
def test_theta_and_guess_stages(tmp_path):
    pipe = small_pipeline(tmp_path)
    pipe.theta()
    record = pipe.guess()
    theta = series_from_text(read_artifact(tmp_path / "theta.txt"))
    assert theta.prec == 60
    assert record.name == "lg-guess"
    assert not record.holds
    assert not (tmp_path / "L_g.txt").exists()


@pytest.mark.slow
def test_full_run(tmp_path):
    cfg = load_pipeline_config(None, {"output_dir": str(tmp_path)})
    cert = run_pipeline(cfg, modular=False)
    assert cert.verdict.holds
    assert cert.verdict.conditional_on == ["lc-annihilates-theta", "h-order-minimal"]
    for name in THETA_PREMISES + TRANSCENDENCE_PREMISES:
        record = cert.check(name)
        assert record.holds
        expected = CheckStatus.EMPIRICAL if name in ("lc-annihilates-theta", "h-order-minimal") else CheckStatus.PROVEN
        assert record.status == expected
    assert (tmp_path / "certificate.json").exists()

    L_C = operator_from_text(read_artifact(tmp_path / "L_C.txt"))
    assert L_C.order == 7
    sols = power_series_solutions(L_C, L_C.order + 2)
    assert cert.check("solution-space").orders["r"] == sols.r
    assert cert.check("theta-equals-c").orders["r"] == sols.r
    assert cert.check("lc-annihilates-theta").orders["margin"] >= cfg.margin

    guess = cert.check("lg-guess")
    assert guess.holds
    assert guess.orders == {"order": 4, "degree": 12, "reserve_passed": 20}
