"""Exception hierarchy shared by the engines and the CLI."""


class QCurvatureError(Exception):
    """Base class for all library errors."""


class ParseError(QCurvatureError, SyntaxError):
    """Malformed expression; ``position`` is the 0-based offset of the offending token."""

    def __init__(self, message, text="", position=0):
        self.position = position
        self.text_input = text
        pointer = ""
        if text:
            pointer = "\n  " + text + "\n  " + " " * position + "^"
        super().__init__(f"{message} at position {position}{pointer}")


class DivisionByZero(QCurvatureError, ZeroDivisionError):
    pass


class SingularMatrix(QCurvatureError):
    pass


class BadReduction(QCurvatureError):
    """A denominator vanishes modulo the cyclotomic polynomial of a place."""

    def __init__(self, n, witness):
        self.n = n
        self.witness = witness
        super().__init__(f"bad reduction at n={n}: {witness} vanishes mod Phi_{n}")


class BadPlace(QCurvatureError):
    def __init__(self, n, witness):
        self.n = n
        self.witness = witness
        super().__init__(f"place n={n} is bad: {witness}")


class NoGoodPlaces(QCurvatureError):
    pass


class FactorizationOutOfRange(QCurvatureError):
    def __init__(self, poly, degree):
        self.poly = poly
        self.degree = degree
        super().__init__(
            f"cannot certify irreducibility of degree-{degree} factor {poly}"
        )


class NotSpecializable(QCurvatureError):
    def __init__(self, entry, reason):
        self.entry = entry
        super().__init__(f"entry {entry} does not specialize at q=1: {reason}")


class BadSpecialization(QCurvatureError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"bad specialization: {witness}")


class NearZero(QCurvatureError):
    """A divisor ball contains zero."""

    def __init__(self, ball, what="denominator"):
        self.ball = ball
        super().__init__(f"{what} ball {ball} contains 0")


class Resonant(QCurvatureError):
    def __init__(self, k, l, m):
        self.k, self.l, self.m = k, l, m
        super().__init__(f"resonance: q^{k}*c_{m} = c_{l}")


class NotRegularSingular(QCurvatureError):
    pass


class TruncationDominates(QCurvatureError):
    def __init__(self, bound, tol):
        self.bound = bound
        self.tol = tol
        super().__init__(f"series truncation bound {float(bound):.3g} exceeds tol {float(tol):.3g}")
