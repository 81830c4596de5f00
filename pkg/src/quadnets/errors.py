"""Exception hierarchy shared by all stages.

Each exception carries the CLI exit code it maps to and a short stage tag so
that reports can say where a pipeline stopped.
"""


class QuadnetsError(Exception):
    exit_code = 5
    stage = "internal"

    def __init__(self, message="", stage=None):
        super().__init__(message)
        if stage is not None:
            self.stage = stage


class InputError(QuadnetsError):
    """Malformed input file or invalid parameters."""

    exit_code = 2
    stage = "input"


class DegenerateInput(QuadnetsError):
    """Input is valid but degenerate for the requested computation."""

    exit_code = 3
    stage = "degenerate"


class IdenticallySingular(DegenerateInput):
    stage = "spectral"


class SingularInput(DegenerateInput):
    stage = "spectral"


class GenericityFailure(DegenerateInput):
    stage = "topology"


class DegenerateRow(DegenerateInput):
    stage = "dixon"


class NoSolution(DegenerateInput):
    stage = "dixon"


class NonUniqueSolution(DegenerateInput):
    stage = "dixon"


class DegenerateSystem(DegenerateInput):
    stage = "oracle"


class SuspectedSingularity(DegenerateInput):
    stage = "oracle"


class SearchExhausted(QuadnetsError):
    exit_code = 4
    stage = "constructions"


class InvariantViolation(QuadnetsError):
    """An asserted mathematical identity failed; indicates a bug upstream."""

    exit_code = 5


class NonzeroRemainder(InvariantViolation):
    stage = "dixon"


class NonClosure(QuadnetsError):
    exit_code = 5
    stage = "oracle"


class SampleOnCurve(QuadnetsError):
    stage = "index"


class SeedSaturationWarning(UserWarning):
    """Oracle seeding may have missed components or points."""
