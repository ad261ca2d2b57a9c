"""Shared exception types, mapped to CLI exit codes in cycmono.cli."""


class CapacityError(Exception):
    """A requested computation exceeds a configured capacity limit."""


class ConfigError(Exception):
    """An experiment configuration is malformed or inconsistent."""
