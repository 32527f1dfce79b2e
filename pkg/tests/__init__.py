"""Tests for coarse_toolkit."""
