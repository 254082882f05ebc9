class InvalidInputError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


class NumericFailure(RuntimeError):
    """Raised when an iterative solver fails to converge."""


class CertificationFailure(AssertionError):
    """Raised when one or more planes fail statistical LDP certification.

    Attributes:
        results: every per-plane result, in plane order.
        failed: the subset of ``results`` that did not pass.
    """

    def __init__(self, results, failed):
        self.results = list(results)
        self.failed = list(failed)
        names = ", ".join(f"{r.channel}/b{r.bit}" for r in self.failed)
        super().__init__(f"{len(self.failed)} plane(s) failed certification: {names}")
