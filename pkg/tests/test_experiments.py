import math

import numpy as np
import pytest

from polcipher.services.encipherment import Scheme
from polcipher.services.experiments import (
    ExperimentConfig,
    ExperimentKind,
    ResultRecord,
    clopper_pearson,
    counted_record,
    load_config_file,
    resolve_config,
    run_experiment,
)
from polcipher.utils.exceptions import ExperimentConfigError, InvalidArgumentError


def _ber_config(**kwargs) -> ExperimentConfig:
    base = dict(kind=ExperimentKind.BER_SWEEP, scheme=Scheme.GOLDEN, m=4,
                snr_db_range=(30.0, 30.0, 1.0), trials=3, block_bits=16, seed=11)
    base.update(kwargs)
    return ExperimentConfig(**base)


def test_clopper_pearson_edges():
    low, high = clopper_pearson(0, 100)
    assert low == 0.0
    assert high == pytest.approx(1.0 - 0.025 ** (1 / 100), rel=1e-9)
    low, high = clopper_pearson(100, 100)
    assert low == pytest.approx(0.025 ** (1 / 100), rel=1e-9)
    assert high == 1.0
    low, high = clopper_pearson(10, 100)
    assert low < 0.1 < high


def test_counted_record_fills_ber_and_interval():
    r = counted_record("ber_sweep", "golden", 4, 10.0, None, "legit", 5, 200)
    assert r.ber == 0.025
    names = [name for name, _ in r.aux]
    assert names[:2] == ["ci_low", "ci_high"]


def test_record_counts_are_validated():
    with pytest.raises(InvalidArgumentError):
        ResultRecord("ber_sweep", "golden", 4, 0.0, None, "legit", errors=5, bits=4)


def test_snr_and_theta_grids():
    cfg = _ber_config(snr_db_range=(0.0, 20.0, 5.0))
    np.testing.assert_allclose(cfg.snr_points(), [0, 5, 10, 15, 20])
    rot = ExperimentConfig(kind=ExperimentKind.ROTATION_SWEEP, scheme=Scheme.ROTATION,
                           theta_range=(0.0, 2 * math.pi, 4))
    np.testing.assert_allclose(rot.theta_points(), [0, math.pi / 2, math.pi, 1.5 * math.pi])


def test_default_xi_grids():
    cross = ExperimentConfig(kind=ExperimentKind.IMPERFECTION_SWEEP, impairment="cross_pol")
    assert cross.xi_points()[0] == 0
    assert cross.xi_points()[-1] == pytest.approx(0.9)
    unbalanced = ExperimentConfig(kind=ExperimentKind.IMPERFECTION_SWEEP, impairment="unbalanced")
    assert unbalanced.xi_points()[0] == 1
    assert unbalanced.xi_points()[-1] == pytest.approx(0.1)


@pytest.mark.parametrize("kwargs", [
    dict(kind=ExperimentKind.ROTATION_SWEEP, scheme=Scheme.GOLDEN),
    dict(kind=ExperimentKind.BER_SWEEP, m=6),
    dict(kind=ExperimentKind.BER_SWEEP, snr_db_range=(10.0, 0.0, 1.0)),
    dict(kind=ExperimentKind.BER_SWEEP, theta=1.0),
    dict(kind=ExperimentKind.IMPERFECTION_SWEEP),
    dict(kind=ExperimentKind.BER_SWEEP, impairment="cross_pol"),
    dict(kind="spiral_sweep"),
])
def test_invalid_configurations(kwargs):
    with pytest.raises(ExperimentConfigError):
        ExperimentConfig(**kwargs)


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("# sweep\nm = 16\nsnr_start = 5  # dB\ntrials = 7\n")
    values = load_config_file(path)
    cfg = resolve_config(ExperimentKind.BER_SWEEP, values, {"m": 4, "trials": None})
    assert cfg.m == 4
    assert cfg.trials == 7
    assert cfg.snr_db_range[0] == 5.0


def test_lone_snr_start_gives_single_point():
    cfg = resolve_config(ExperimentKind.BER_SWEEP, {}, {"snr_start": 25.0})
    np.testing.assert_allclose(cfg.snr_points(), [25.0])


def test_unknown_config_key(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("colour = blue\n")
    with pytest.raises(ExperimentConfigError):
        load_config_file(path)
    with pytest.raises(ExperimentConfigError):
        resolve_config(ExperimentKind.BER_SWEEP, {"trials": "many"})


def test_xi_grid_from_flags():
    cfg = resolve_config(ExperimentKind.IMPERFECTION_SWEEP, {},
                         {"impairment": "cross_pol", "xi_re": 0.4, "xi_im": 0.2, "xi_steps": 3})
    np.testing.assert_allclose(cfg.xi_points(), [0.0, 0.2 + 0.1j, 0.4 + 0.2j])


def test_ber_sweep_roles_and_counts():
    records = run_experiment(_ber_config(), workers=1)
    assert [(r.scheme, r.role) for r in records] == [
        ("golden", "legit"), ("golden", "eve"), ("none", "legit"),
    ]
    assert all(r.bits == 3 * 16 for r in records)
    legit, eve, baseline = records
    assert legit.errors == 0
    assert baseline.errors == 0
    assert eve.errors > 0


def test_ber_sweep_pads_partial_symbols():
    records = run_experiment(_ber_config(m=8, block_bits=10, baseline=False), workers=1)
    assert [r.bits for r in records] == [30, 30]


def test_sweep_is_independent_of_worker_count():
    cfg = _ber_config(snr_db_range=(0.0, 5.0, 5.0), eve_wrong=True)
    assert run_experiment(cfg, workers=1) == run_experiment(cfg, workers=2)


def test_imperfection_sweep_reports_degradation():
    cfg = ExperimentConfig(kind=ExperimentKind.IMPERFECTION_SWEEP, impairment="cross_pol",
                           xi_grid=(0.0, 0.5), m=4, snr_db_range=(15.0, 15.0, 1.0),
                           trials=2, block_bits=16, seed=3)
    records = run_experiment(cfg, workers=1)
    legit = [r for r in records if r.role == "legit"]
    assert [r.parameter for r in legit] == [0.0, 0.5]
    ideal, impaired = (dict(r.aux)["degradation_db"] for r in legit)
    assert ideal == pytest.approx(0.0, abs=1e-12)
    assert impaired > 0.0


def test_q_vs_trace_respects_bounds():
    cfg = ExperimentConfig(kind=ExperimentKind.Q_VS_TRACE, scheme=Scheme.NONE, samples=30, seed=2)
    records = run_experiment(cfg, workers=1)
    assert len(records) == 30
    for r in records:
        aux = dict(r.aux)
        assert aux["q_lower"] - 1e-9 <= aux["q"] <= aux["q_upper"] + 1e-9


def test_q_vs_theta_for_rotations():
    cfg = ExperimentConfig(kind=ExperimentKind.Q_VS_TRACE, scheme=Scheme.ROTATION,
                           theta_range=(0.0, 2 * math.pi, 4), samples=2000, seed=2)
    records = run_experiment(cfg, workers=1)
    qs = [dict(r.aux)["q"] for r in records]
    np.testing.assert_allclose(qs, [0.0, 16 * math.pi / 3, 32 * math.pi / 3, 16 * math.pi / 3],
                               atol=1e-9)
    assert all("q_mc" in dict(r.aux) for r in records)


def test_stokes_stats_records():
    cfg = ExperimentConfig(kind=ExperimentKind.STOKES_STATS, snr_db_range=(0.0, 10.0, 10.0),
                           samples=5000, seed=4)
    records = run_experiment(cfg, workers=1)
    assert [r.snr_db for r in records] == [0.0, 10.0]
    aux = dict(records[0].aux)
    assert aux["pred_var2"] == pytest.approx(2.0)
    assert aux["var2"] == pytest.approx(2.0, rel=0.15)


def test_snr_transform_records():
    cfg = ExperimentConfig(kind=ExperimentKind.SNR_TRANSFORM, snr_db_range=(10.0, 10.0, 1.0),
                           samples=20000, seed=4)
    aux = dict(run_experiment(cfg, workers=1)[0].aux)
    assert aux["snr0"] == pytest.approx(10.0 / 1.15)
    assert aux["mc_snr0"] == pytest.approx(aux["snr0"], rel=0.1)


def test_noiseless_point_separates_receivers():
    cfg = _ber_config(m=8, snr_db_range=(math.inf, math.inf, 1.0), trials=4, block_bits=63)
    legit, eve, baseline = run_experiment(cfg, workers=1)
    assert legit.snr_db == math.inf
    assert legit.ber == 0.0
    assert baseline.ber == 0.0
    assert eve.ber > 0.0


def test_golden_eavesdropper_ber_is_flat_across_snr():
    cfg = _ber_config(m=8, snr_db_range=(0.0, 20.0, 10.0), trials=1500, block_bits=120,
                      baseline=False, seed=21)
    eve = [r.ber for r in run_experiment(cfg, workers=1) if r.role == "eve"]
    assert len(eve) == 3
    for ber in eve:
        assert abs(ber - 0.5) < 0.02


def test_rotation_sweep_plateau_and_identity_point():
    cfg = ExperimentConfig(kind=ExperimentKind.ROTATION_SWEEP, scheme=Scheme.ROTATION, m=8,
                           snr_db_range=(15.0, 15.0, 1.0), theta_range=(0.0, 2 * math.pi, 8),
                           trials=400, block_bits=120, seed=22)
    records = run_experiment(cfg, workers=1)
    eve = {r.parameter: r.ber for r in records if r.role == "eve"}
    baseline = next(r.ber for r in records if r.scheme == "none")

    # theta = 0 is the identity rotation
    assert eve[0.0] == pytest.approx(baseline, abs=2e-3)
    plateau = [ber for t, ber in eve.items() if math.pi / 2 - 1e-9 <= t <= 1.5 * math.pi + 1e-9]
    at_pi = eve[min(eve, key=lambda t: abs(t - math.pi))]
    assert len(plateau) == 5
    assert at_pi > 0.4
    for ber in plateau:
        assert ber == pytest.approx(at_pi, rel=0.05)
    low = eve[min(eve, key=lambda t: abs(t - math.pi / 2))]
    high = eve[min(eve, key=lambda t: abs(t - 1.5 * math.pi))]
    assert abs(low - high) < 0.03


def test_fixed_theta_drives_rotation_sweep():
    cfg = ExperimentConfig(kind=ExperimentKind.ROTATION_SWEEP, scheme=Scheme.ROTATION, theta=1.0)
    np.testing.assert_allclose(cfg.theta_points(), [1.0])
    with pytest.raises(ExperimentConfigError):
        ExperimentConfig(kind=ExperimentKind.ROTATION_SWEEP, scheme=Scheme.ROTATION, theta=1.0,
                         theta_range=(0.0, math.pi, 2))


def test_stokes_stats_at_noiseless_point():
    cfg = ExperimentConfig(kind=ExperimentKind.STOKES_STATS,
                           snr_db_range=(math.inf, math.inf, 1.0), samples=100, seed=4)
    record, = run_experiment(cfg, workers=1)
    aux = dict(record.aux)
    assert record.parameter == math.inf
    assert aux["pred_var0"] == 0.0
    assert aux["var0"] == pytest.approx(0.0, abs=1e-20)


def test_snr_transform_rejects_noiseless_point():
    with pytest.raises(ExperimentConfigError):
        ExperimentConfig(kind=ExperimentKind.SNR_TRANSFORM, snr_db_range=(math.inf, math.inf, 1.0))
