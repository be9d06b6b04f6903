"""arbvol entrypoint -- wires config, plugins and the command line together.

Usage:
    python main.py <subcommand> [options]
    python main.py --config /path/to/config.yaml phase-diagram --family subset ...
"""

from __future__ import annotations

import logging
import sys

from core.config import AppConfig
from core.registry import PluginRegistry
from detect.engine import SimplexDetector
from detect.oracle import HullOracleDetector


def setup_logging(level: str) -> None:
    """Configure logging for the application."""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
    )
    # Quiet down noisy libraries
    logging.getLogger("matplotlib").setLevel(logging.WARNING)


def load_plugins(config: AppConfig, registry: PluginRegistry) -> None:
    """Register every discovered measure family plus the two detectors."""
    logger = logging.getLogger("arbvol.plugins")

    from cli.scanner import list_all_plugins

    for plugin in list_all_plugins():
        if plugin.category != "measure_family" or not plugin.auto_enable:
            continue
        try:
            registry.register("measure_family", plugin.load_class()())
            logger.debug("Loaded measure family: %s", plugin.name)
        except Exception as e:
            logger.error("Failed to load measure family %s: %s", plugin.name, e)

    registry.register("detector", SimplexDetector(config.detector))
    registry.register("detector", HullOracleDetector())


def build_registry(config: AppConfig | None = None) -> PluginRegistry:
    """A registry loaded with all plugins, using default settings when no config is given."""
    registry = PluginRegistry()
    load_plugins(config or AppConfig(), registry)
    return registry


def main() -> None:
    from cli.main import main as cli_main

    sys.exit(cli_main())


if __name__ == "__main__":
    main()
