class NumericalError(RuntimeError):
    """A numeric invariant failed: residues, non-convergence, unnormalised output.

    Distinct from ``ValueError``, which signals bad user input.
    """
