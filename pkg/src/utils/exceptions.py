"""Error hierarchy shared by the library and the command line front end."""


class K3FibrationError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class LatticeInputError(K3FibrationError):
    """Malformed or unsuitable input lattice, file or preset."""

    exit_code = 3

    def __init__(self, message: str, path: str = None, line: int = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class ConfigurationError(K3FibrationError):
    exit_code = 3


class EnumerationCapExceeded(K3FibrationError):
    """A backtracking search visited more candidates than the configured cap."""

    exit_code = 4

    def __init__(self, what: str, cap: int):
        self.cap = cap
        super().__init__(f"{what}: enumeration cap of {cap} candidates exceeded; raise enumeration_cap to continue")


class GenusWalkIncomplete(K3FibrationError):
    """The neighbor walk stopped short of the analytic mass."""

    exit_code = 2

    def __init__(self, found, expected, classes: int):
        self.found = found
        self.expected = expected
        self.classes = classes
        super().__init__(
            f"genus walk incomplete; try additional primes "
            f"(mass {found} of {expected} after {classes} classes)"
        )


class InvariantViolation(K3FibrationError):
    """An internal cross-check failed."""

    exit_code = 1
