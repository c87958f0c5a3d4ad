"""Attitude and full-state tracking control: errors, feedback, desired attitude and certificates."""
