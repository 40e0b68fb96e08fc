"""Tests for additive score recovery."""
