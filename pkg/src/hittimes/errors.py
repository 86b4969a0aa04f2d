"""Error taxonomy shared across the package.

Two failure modes matter to callers (and map to distinct CLI exit codes):
payloads that are structurally malformed, and payloads that parse but break a
domain invariant.
"""


class SchemaError(ValueError):
    """Input does not have the expected JSON/argument shape."""


class InvariantError(ValueError):
    """Input is well-formed but violates a domain invariant.

    The message always carries a concrete witness (the offending value or
    location).
    """
