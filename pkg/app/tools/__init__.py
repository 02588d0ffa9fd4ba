"""Experiments built on the core: ensembles, sweeps, convergence, engine comparison."""
