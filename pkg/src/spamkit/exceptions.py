"""Exception hierarchy shared by the library and the command line."""


class SpamError(Exception):
    """Base class for every error raised by spamkit."""


class InvalidArgumentError(SpamError, ValueError):
    """An argument violates a documented precondition."""


class DataValidationError(InvalidArgumentError):
    """Tabulated input (nodes, values, index sets) is inconsistent."""


class ResourceLimitError(SpamError):
    """A grid or basis would exceed the configured size cap."""


class NumericFailureError(SpamError, ArithmeticError):
    """An iterative numerical routine failed to converge."""


class EvaluationError(SpamError):
    """The user-supplied evaluator raised at a quadrature node.

    The offending node is kept in :attr:`node`; the original exception is
    chained as ``__cause__``.
    """

    def __init__(self, node, message=None):
        self.node = node
        super().__init__(message or f"evaluator failed at node {node!r}")
