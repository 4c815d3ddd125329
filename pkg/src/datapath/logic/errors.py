class ResourceLimit(RuntimeError):
    pass


class UnassignedVariable(KeyError):
    pass


class PositionOutOfRange(IndexError):
    pass
