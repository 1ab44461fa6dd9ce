"""Tests for gmt-lab."""
