import pytest

from ffcontour.bench import BenchRow, run_scene, scaling_probe
from ffcontour.config import Config


def test_run_scene_small():
    row = run_scene("simple", Config(bench_patches=12), width=200, height=150)
    assert isinstance(row, BenchRow)
    assert row.initial_points == 12 and row.final_points > 12 and row.components == 1
    assert row.time_ms > 0
    with pytest.raises(ValueError):
        run_scene("medium")


@pytest.mark.slow
def test_scaling_is_linear():
    r = scaling_probe(1000)
    assert 1.6 <= r.op_ratio <= 2.6
    assert 1.6 <= r.time_ratio <= 2.6
