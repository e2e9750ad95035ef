"""Exception hierarchy shared by all travelscout modules."""


class TravelscoutError(Exception):
    """Base class for every error raised by this package."""


# --- manifest / corpus ---

class MalformedLine(TravelscoutError):
    def __init__(self, line_no, detail=""):
        self.line_no = line_no
        super().__init__(f"malformed manifest line {line_no}: {detail}")


class MissingField(TravelscoutError):
    def __init__(self, name, line_no):
        self.name = name
        self.line_no = line_no
        super().__init__(f"missing field {name!r} on line {line_no}")


class DuplicateId(TravelscoutError):
    def __init__(self, doc_id, line_no=None):
        self.doc_id = doc_id
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"duplicate document id {doc_id!r}{where}")


class InsufficientCandidates(TravelscoutError):
    def __init__(self, requested, available):
        self.requested = requested
        self.available = available
        super().__init__(f"requested {requested} candidates, only {available} available")


class UnknownDocId(TravelscoutError):
    def __init__(self, doc_id):
        self.doc_id = doc_id
        super().__init__(f"unknown document id {doc_id!r}")


class ConflictingVerdicts(TravelscoutError):
    def __init__(self, doc_id):
        self.doc_id = doc_id
        super().__init__(f"conflicting confirm/reject verdicts for {doc_id!r}")


# --- textprep ---

class EmptyCorpus(TravelscoutError):
    pass


# --- models ---

class SingleClassInput(TravelscoutError):
    pass


class NegativeFeature(TravelscoutError):
    pass


class DivergenceDetected(TravelscoutError):
    pass


class DimensionMismatch(TravelscoutError):
    def __init__(self, expected, got):
        super().__init__(f"expected vector dim {expected}, got {got}")


class ProfileMismatch(TravelscoutError):
    pass


class VersionMismatch(TravelscoutError):
    pass


class ChecksumMismatch(TravelscoutError):
    pass


# --- evaluation ---

class LengthMismatch(TravelscoutError):
    pass


class TooFewExamples(TravelscoutError):
    def __init__(self, label, k):
        super().__init__(f"class {label!r} has fewer than k={k} members")


class SizeTooLarge(TravelscoutError):
    def __init__(self, size):
        super().__init__(f"sample size {size} leaves no test remainder")


# --- discovery ---

class FingerprintMismatch(TravelscoutError):
    pass


# --- cli / service ---

class ConfigError(TravelscoutError):
    pass


class MissingArtifact(TravelscoutError):
    def __init__(self, stage):
        self.stage = stage
        super().__init__(f"required artifact from stage {stage!r} not found; run it first")


class NoQueueForCentury(TravelscoutError):
    def __init__(self, century):
        super().__init__(f"no review queue loaded for century {century}")
