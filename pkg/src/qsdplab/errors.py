"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An input breaks a documented precondition or type invariant."""


class DomainError(ContractViolation):
    """A scalar function was evaluated outside its domain."""


class IllConditionedThreshold(ContractViolation):
    """A spectral cut point lies too close to an eigenvalue."""


class SeedExhaustion(RuntimeError):
    """A seeded sampler ran out of retry budget."""
