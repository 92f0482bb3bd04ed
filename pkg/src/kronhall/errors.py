class BoundError(Exception):
    """A computation exceeded a configured size bound."""


class SpecializeError(Exception):
    """A rational function cannot be specialized at the requested point."""
