import pytest

from gpsing.common.flow_logger import FlowLogger


def test_records_accepted_steps_and_rejections():
    flow_logger = FlowLogger()
    flow_logger.log_iteration(1.0, 0.5, 1e-2)
    flow_logger.log_rejection()
    flow_logger.log_iteration(0.8, 0.25, 1e-3)
    stats = flow_logger.get_stats()
    assert stats["iterations"] == 2
    assert stats["rejections"] == 1
    assert stats["energies"] == [1.0, 0.8]
    assert stats["final_energy"] == 0.8
    assert stats["min_step_size"] == 0.25
    assert stats["residuals"] == [1e-2, 1e-3]
    assert stats["max_energy_increase"] < 0


def test_max_energy_increase_detects_rise():
    flow_logger = FlowLogger()
    for energy in (-2.0, -2.5, -2.4):
        flow_logger.log_iteration(energy, 1.0)
    assert flow_logger.max_energy_increase() == pytest.approx(0.1 / 2.5)


def test_reset_clears_history():
    flow_logger = FlowLogger()
    flow_logger.log_iteration(1.0, 0.1)
    assert flow_logger.get_stats()["residuals"] == []
    flow_logger.reset()
    assert flow_logger.get_stats()["iterations"] == 0
    assert flow_logger.get_stats()["final_energy"] is None
