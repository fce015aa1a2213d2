class ChromaticaError(Exception):
    pass


class ChromaticaIOError(ChromaticaError):
    pass


class KeyNotationError(ChromaticaError, ValueError):
    pass


class MalformedKey(KeyNotationError):
    pass


class ExtendedRangeKey(KeyNotationError):
    pass


class FileUnreadable(ChromaticaIOError):
    pass


class SchemaMismatch(ChromaticaIOError):
    pass


class RowError(ChromaticaError):
    def __init__(self, line, cause):
        self.line = line
        self.cause = cause
        super().__init__(f"line {line}: {cause}")


class UnknownComposer(ChromaticaError, LookupError):
    pass


class EmptyCatalog(ChromaticaError):
    pass


class NoDatedWorks(ChromaticaError):
    pass


class MissingWeight(ChromaticaError, LookupError):
    def __init__(self, degree, mode):
        self.degree = degree
        self.mode = mode
        super().__init__(f"no weight for degree {degree} ({getattr(mode, 'value', mode)})")


class EmptyMode(ChromaticaError):
    pass


class EmptyHistogram(ChromaticaError):
    pass


class EmptyPointSet(ChromaticaError):
    pass


class TooFewSamples(ChromaticaError):
    pass


class DegenerateSamples(ChromaticaError):
    pass


class TooFewPoints(ChromaticaError):
    pass


class InvalidCut(ChromaticaError, ValueError):
    pass


class MismatchedSpec(ChromaticaError, TypeError):
    pass


class InvalidArgument(ChromaticaError, ValueError):
    pass
