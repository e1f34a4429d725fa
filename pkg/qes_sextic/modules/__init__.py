"""Numerical modules."""
