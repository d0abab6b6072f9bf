"""Exception and warning types used across the package."""


class BlockEmbedError(Exception):
    """Base class for all package-specific errors."""


class PreconditionError(BlockEmbedError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateRank(BlockEmbedError):
    """The numerical rank of a probability matrix is below its declared rank."""


class DegenerateModel(BlockEmbedError):
    """Two blocks of a model are indistinguishable (zero latent-row gap)."""


class ConvergenceFailure(BlockEmbedError):
    """An iterative matrix decomposition failed to converge."""


class IsolatedNode(BlockEmbedError):
    """A degree-zero node makes the normalized Laplacian undefined."""


class TooLarge(BlockEmbedError):
    """An exhaustive computation would exceed its enumeration guard."""


class EmptyBlock(BlockEmbedError):
    """A block received no nodes, leaving an estimator row undefined."""


class SingletonBlock(BlockEmbedError):
    """A block holds a single node, zeroing a within-block denominator."""


class ParseError(BlockEmbedError):
    """A text input file has a malformed line."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class OutOfRange(BlockEmbedError):
    """A node id falls outside the declared node range."""


class SelfLoop(BlockEmbedError):
    """An edge list contains a self-loop, which graphs here never carry."""


class MissingNode(BlockEmbedError):
    """A label file does not cover every node."""


class DuplicateNode(BlockEmbedError):
    """A label file assigns the same node twice."""


class DegenerateWarning(UserWarning):
    """A quantity was returned by convention because its formula is 0/0."""
