"""Telemetry: per-epoch event streaming and training callbacks."""
