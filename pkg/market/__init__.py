"""Random one-period markets: payoffs, local measures, prices, excess returns."""
