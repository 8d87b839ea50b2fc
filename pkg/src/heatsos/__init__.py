"""Prover and verifier for heat-flow entropy-derivative inequalities.

The pipeline builds exact differential-form targets, generates integral and
log-concavity constraints, reduces everything to quadratic forms over a
monomial basis, solves a semidefinite feasibility problem, and emits exact
sum-of-squares certificates that an independent expansion check can confirm.
"""

__version__ = "0.1.0"
