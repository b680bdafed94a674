"""
CLI Module - Command Line Interface Tools

Provides command-line tools for sampling, solving, training and evaluating transport flows.
"""

from .otflow_cli import cli, main

__all__ = [
    "cli",
    "main",
]
