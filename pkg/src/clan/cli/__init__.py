"""Command-line interface, INI configuration and canned studies."""

from clan.cli.config import ExperimentConfig, TransportConfig, load_config, parse_config, render_config

__all__ = ["ExperimentConfig", "TransportConfig", "load_config", "parse_config", "render_config"]
