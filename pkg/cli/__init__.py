"""CLI -- argument parsing, subcommands and plugin discovery."""
