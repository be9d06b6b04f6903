"""Simulator -- Monte Carlo sweeps over (parameter, n) grids and their metrics."""
