"""Two-zone Bradford curves: Simon-Yule steady state, Monte Carlo, fitting, forecasting."""

__version__ = "0.1.0"
