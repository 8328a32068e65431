"""Exception hierarchy shared by all modules."""


class WanderingError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(WanderingError):
    pass


class NotPSD(WanderingError):
    pass


class NotContraction(WanderingError):
    pass


class NotCoisometry(WanderingError):
    pass


class DepthTooSmall(WanderingError):
    pass


class TruncationOverflow(WanderingError):
    """A word was applied to a vector whose support sits too close to the truncation depth."""


class UNotWandering(WanderingError):
    pass


class YNotWandering(WanderingError):
    pass


class NotMultiAnalytic(WanderingError):
    pass


class SingularResolvent(WanderingError):
    pass


class InconsistentLifting(WanderingError):
    pass


class NoVacuum(WanderingError):
    pass


class ParseError(WanderingError):
    pass


class ValidationError(WanderingError):
    pass
