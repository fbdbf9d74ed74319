"""Exception hierarchy for the entity-linking package."""


class EntityLinkError(ValueError):
    """Base class for every error raised by this package."""


# ingestion
class MalformedRecord(EntityLinkError):
    def __init__(self, line, reason=""):
        self.line = line
        super().__init__(f"malformed record at line {line}" + (f": {reason}" if reason else ""))


class DuplicateId(EntityLinkError):
    def __init__(self, entity_id):
        self.entity_id = entity_id
        super().__init__(f"duplicate entity id {entity_id!r}")


class EmptyName(EntityLinkError):
    def __init__(self, entity_id):
        self.entity_id = entity_id
        super().__init__(f"entity {entity_id!r} has an empty name")


class EmptyMentionText(EntityLinkError):
    def __init__(self, line):
        self.line = line
        super().__init__(f"mention at line {line} has empty text")


class VersionMismatch(EntityLinkError):
    pass


# string metrics
class BothEmpty(EntityLinkError):
    def __init__(self):
        super().__init__("both strings are empty")


# word vectors
class BadHeader(EntityLinkError):
    pass


class DimMismatch(EntityLinkError):
    def __init__(self, line, expected, got):
        self.line = line
        super().__init__(f"line {line}: expected {expected} values, got {got}")


class DuplicateToken(EntityLinkError):
    def __init__(self, token):
        self.token = token
        super().__init__(f"duplicate token {token!r}")


class NonFiniteValue(EntityLinkError):
    def __init__(self, line):
        self.line = line
        super().__init__(f"line {line}: non-finite value")


class MissingVector(EntityLinkError, KeyError):
    def __init__(self, key):
        self.key = key
        EntityLinkError.__init__(self, f"no precomputed vector for key {key!r}")

    def __str__(self):
        return self.args[0]


# numerics
class ShapeMismatch(EntityLinkError):
    pass


class GraphNotRecorded(EntityLinkError):
    pass


class NonFiniteUpdate(EntityLinkError):
    pass


class EmptyWord(EntityLinkError):
    pass


# training data
class NoEligibleEntities(EntityLinkError):
    pass


class NoPositives(EntityLinkError):
    pass


class SingleClassDataset(EntityLinkError):
    pass


class TooSmall(EntityLinkError):
    pass


# metrics
class EmptyInput(EntityLinkError):
    pass


class SingleClass(EntityLinkError):
    pass
