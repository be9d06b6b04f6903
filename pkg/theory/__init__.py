"""Analytic critical lines -- saddle-point systems for the arbitrage transition."""
