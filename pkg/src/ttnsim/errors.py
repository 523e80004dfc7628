"""Failure modes that callers are expected to handle explicitly."""


class FactorizationError(RuntimeError):
    """A matrix factorization (SVD/QR) did not converge.

    Carries enough context (node/site) to locate the offending tensor.
    """


class MemoryCapExceeded(RuntimeError):
    """A gate application would push the state past the configured entry cap."""
