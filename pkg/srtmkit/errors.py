# srtmkit/errors.py
"""Exception hierarchy shared by every module.

Two families: UsageProblem covers malformed input text (exit code 2 on the
command line), DomainError covers everything that goes wrong while computing
(exit code 3).
"""


class SrtmError(Exception):
    """Root of all toolkit errors."""


class UsageProblem(SrtmError):
    pass


class DomainError(SrtmError):
    pass


# --- input text ---

class BadLiteral(UsageProblem):
    pass


class OutOfCarrier(UsageProblem):
    pass


class FormulaSyntaxError(UsageProblem):
    pass


class UnknownSymbol(UsageProblem):
    pass


class ArityMismatch(UsageProblem):
    pass


class FormatError(UsageProblem):
    """Machine, word, structure or signature text that does not follow its format."""


# --- computation ---

class MixedSemirings(DomainError):
    pass


class LetterNotInInputAlphabet(DomainError):
    pass


class NotApplicable(DomainError):
    pass


class BudgetExceeded(DomainError):
    def __init__(self, budget, path=()):
        self.budget = budget
        self.path = tuple(path)
        super().__init__(
            f"computation path reached the step budget {budget} without halting"
        )


class TooLarge(DomainError):
    pass


class SignatureMismatch(DomainError):
    pass


class InvalidMachine(DomainError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        summary = "; ".join(f"{d.code.value}: {d.message}" for d in self.diagnostics)
        super().__init__(f"machine is not well formed ({summary})")


class UnresolvedSurrogate(DomainError):
    pass


class UnknownNamedSurrogate(DomainError):
    pass


class UnsupportedConstruct(DomainError):
    pass


class NotWESO(DomainError):
    pass


class OracleTransitionsPresent(DomainError):
    pass


class BoundTooSmall(DomainError):
    pass


class ArityTooSmall(DomainError):
    pass


class AlphabetMismatch(DomainError):
    pass
