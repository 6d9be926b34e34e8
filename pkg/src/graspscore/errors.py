"""Exception types shared across the package."""


class GraspScoreError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(GraspScoreError):
    """A mesh or config file is missing, unreadable, or malformed."""


class SchemaError(GraspScoreError):
    """A label or prediction file violates the column schema.

    Carries the 1-based line number of the offending row.
    """

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyMesh(GraspScoreError):
    """No usable faces remain after parsing and degenerate-face removal."""


class KTooLarge(GraspScoreError):
    """A k-NN query asked for more neighbors than the index holds."""


class InvalidFrame(GraspScoreError):
    """A scoring operation received a contact frame marked invalid."""


class DegenerateContacts(GraspScoreError):
    """The two contact points coincide, so the contact line is undefined."""


class UnknownObjectId(GraspScoreError):
    """A prediction or scene references an object id with no loaded mesh."""


class ConfigError(GraspScoreError):
    """A config file contains an unknown key or an unparseable value."""
