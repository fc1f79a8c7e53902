import pathlib
import runpy

import pytest

DEMOS = sorted((pathlib.Path(__file__).parent.parent / "demos").glob("*.py"))


@pytest.mark.parametrize("path", DEMOS, ids=[p.stem for p in DEMOS])
def test_demo_runs(path, capsys):
    runpy.run_path(str(path), run_name="__main__")
    assert capsys.readouterr().out.strip()


def test_demo_config_parses():
    from gdsplit.cli import load_config

    cfg = load_config(DEMOS[0].parent / "custom_experiment.yaml")
    assert cfg.name == "steep-g" and cfg.seed == 3
