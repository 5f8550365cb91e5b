# errors.py


class ModFleetError(Exception):
    """
    Base class for all errors raised by the fleet-mix toolkit.
    """

    pass


class InvalidArgumentError(ModFleetError, ValueError):
    pass


class DisconnectedGraphError(ModFleetError):
    """
    A metric or route query was made on a graph that is not connected.
    """

    pass


class UnsupportedSizeError(ModFleetError):
    """
    Exhaustive route search was requested on a network above the node cap.
    """

    pass


class TaskCapExceededError(ModFleetError):
    pass


class RepairFailureError(ModFleetError):
    """
    The repair loop did not reach a feasible fleet mix within its round cap.
    """

    def __init__(self, message: str, rounds: int):
        super().__init__(message)
        self.rounds = rounds


class EmptyArchiveError(ModFleetError):
    pass
