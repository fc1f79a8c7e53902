"""Config-driven batch front-end: ``gdsplit <subcommand> --config run.yaml``."""

from .config import ANALYSES, ExperimentConfig, load_config, parse_config_text
from .output import PlotTable, emit_plot_data
from .presets import PRESETS, load_preset
from .runner import RunReport, run

__all__ = ["ANALYSES", "ExperimentConfig", "PRESETS", "PlotTable", "RunReport", "emit_plot_data",
           "load_config", "load_preset", "parse_config_text", "run"]
