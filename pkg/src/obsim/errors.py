"""Exception types shared across the package."""


class ConfigurationError(Exception):
    """A scenario, topology or traffic parameter is invalid.  The message
    names the offending key or value."""


class ProtocolInvariantError(RuntimeError):
    """Signalling state violated an invariant that the architecture
    guarantees by construction; indicates a simulator bug, not a valid
    simulation outcome."""
