"""Absent Votes - decide whether missing top-truncated ballots can elect a candidate."""

__version__ = "0.1.0"
