"""Exception types shared across the package."""


class AttrasrError(Exception):
    """Base class for all errors raised by attrasr."""


class InventoryError(AttrasrError):
    """Bad category, value, or knowledge-source specification."""


class LexiconError(AttrasrError):
    """Malformed lexicon data or unknown syllable."""


class FormatError(AttrasrError):
    """Malformed posterior, ARPA, corpus, or report file."""


class DecodeFailure(AttrasrError):
    """No complete hypothesis survived the beam for an utterance."""

    def __init__(self, utterance_id, message=""):
        self.utterance_id = utterance_id
        super().__init__(message or f"decode failed for utterance {utterance_id!r}")
