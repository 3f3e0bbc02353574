class CompressionDomainError(ValueError):
    """Input outside an operator's domain (non-finite values, s_k <= 0, oversized norm field)."""


class DecodeError(ValueError):
    """Payload that does not parse under the operator that is supposed to have produced it."""
