"""Tests for the tracehound project."""
