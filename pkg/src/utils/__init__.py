"""Shared utilities: config loading, logging, seeded random streams."""
