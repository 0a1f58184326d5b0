"""Bundled scene files."""
