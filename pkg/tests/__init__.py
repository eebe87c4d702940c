"""Tests for nwn."""
