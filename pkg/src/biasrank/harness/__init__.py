"""Generators, brute-force oracles, checks, the acceptance suite and the CLI."""

from .checks import CheckReport
from .suite import verify_suite

__all__ = ["CheckReport", "verify_suite"]
