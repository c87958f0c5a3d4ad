"""Simulation runs, Monte-Carlo sweeps, monitoring, certification and plots."""
