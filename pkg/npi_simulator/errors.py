class NpiError(Exception):
    """Base class for every failure raised by the simulator"""


class DomainError(NpiError, ValueError):
    pass


class ConfigurationError(NpiError, ValueError):
    pass


class ConfigValidationError(ConfigurationError):
    """Carries every diagnostic found while validating a config document."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__(
            f"{len(self.errors)} validation error(s): " + "; ".join(self.errors)
        )


class CheckpointError(NpiError):
    pass


class CheckpointFormatError(CheckpointError):
    pass


class CheckpointVersionError(CheckpointError):
    pass


class SpecMismatchError(CheckpointError):
    pass


class SingularConfigurationError(NpiError):
    pass


class IntegrationError(NpiError):
    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class InsufficientSamplingError(NpiError):
    pass


class InsufficientDataError(NpiError):
    pass


class AlignmentError(NpiError):
    pass


class ContractError(NpiError):
    pass


class StepSizeError(NpiError):
    pass


class BranchError(NpiError):
    def __init__(self, branch_id: int, cause: Exception):
        super().__init__(f"Branch {branch_id} failed: {cause}")
        self.branch_id = branch_id
        self.cause = cause


class RunTerminatedError(NpiError):
    pass


class IncompatibleRunsError(NpiError):
    pass
