"""Sweeps, command execution and output."""
