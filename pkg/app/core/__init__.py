"""Model, mean-field, stochastic and closed-form analysis."""
