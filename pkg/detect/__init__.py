"""Arbitrage detection -- zero vs infinite arbitrage volume per market instance."""
