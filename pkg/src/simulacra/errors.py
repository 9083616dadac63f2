"""Exception hierarchy shared across the engine."""


class SimulacraError(Exception):
    """Base class for all errors raised by this package."""


class DesignValidationError(SimulacraError):
    """A community design or domain object violates an invariant."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class OversizedDesignError(SimulacraError):
    """Goal/rules/persona text too long to ever fit the prompt budget."""


class BudgetExhaustedError(SimulacraError):
    """Even the most recent utterance alone exceeds the character budget."""


class EmptyGenerationError(SimulacraError):
    """The backend produced an empty (or whitespace/markup-only) completion."""


class PostGenerationFailedError(SimulacraError):
    """Empty generations persisted through all resample attempts."""


class BackendUnavailableError(SimulacraError):
    """Transport kept failing after the configured number of retries."""


class BackendConfigError(SimulacraError):
    """The backend rejected the request (HTTP 4xx); retrying won't help."""


class ExpansionStalledError(SimulacraError):
    """Persona expansion could not reach the target roster size.

    Carries the partial roster so callers can inspect or keep it.
    """

    def __init__(self, message, partial_roster):
        super().__init__(message)
        self.partial_roster = list(partial_roster)


class NoCandidateError(SimulacraError):
    """No persona is eligible to author the next reply."""


class ThreadGenerationError(SimulacraError):
    """A thread failed mid-generation; carries the partial thread."""

    def __init__(self, message, partial_utterances, cause=None):
        super().__init__(message)
        self.partial_utterances = list(partial_utterances)
        self.__cause__ = cause


class InvalidSpecError(SimulacraError):
    """A WhatIf/Multiverse spec does not apply to the targeted thread."""


class NotFoundError(SimulacraError):
    """Unknown design / universe / thread identifier."""


class IntegrityError(SimulacraError):
    """A stored document is corrupt or unreadable; message names the path."""
