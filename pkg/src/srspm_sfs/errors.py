"""Exception hierarchy shared by all modules."""


class SFSError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class DomainError(SFSError, ValueError):
    """A parameter lies outside its admissible range."""

    exit_code = 3


class ArchitectureSingular(DomainError):
    """gamma_f and gamma_m make the manipulator singular at every pose."""

    exit_code = 4


class DegenerateLeg(SFSError):
    """A leg has (numerically) zero length, so its unit vector is undefined."""

    exit_code = 5


class IllConditioned(SFSError):
    """The coefficient-extraction system is too badly conditioned to trust."""

    exit_code = 6


class CenterOnSurface(SFSError):
    """The sphere centre already lies on the singularity surface."""

    exit_code = 7


class NoRealContact(SFSError):
    """No real point of the surface exists (confirmed by the grid oracle)."""

    exit_code = 8


class SolverIncomplete(SFSError):
    """The algebraic solver found no contact although the surface has real points."""

    exit_code = 9


class OracleInconclusive(SFSError):
    """The grid oracle found no surface point inside its largest search box."""

    exit_code = 10


class SweepFailed(SFSError):
    """One or more workspace samples could not be solved."""

    exit_code = 11

    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)


class ConfigError(SFSError):
    """A run configuration file is malformed."""

    exit_code = 12
