"""Tests for absent-votes."""
