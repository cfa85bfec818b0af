import typing as tp


class StacklabError(ValueError):
    '''
    Base class for every domain error raised by stacklab.
    '''


class InvalidGroup(StacklabError):
    pass


class NotAnAction(StacklabError):
    def __init__(self, msg: str, element: tp.Any = None, point: tp.Any = None):
        super().__init__(msg)
        self.element = element
        self.point = point


class UnknownObject(StacklabError):
    def __init__(self, obj: tp.Any):
        super().__init__(f"unknown object {obj!r}")
        self.obj = obj


class MismatchedBase(StacklabError):
    pass


class NotEquivariant(StacklabError):
    def __init__(self, msg: str, element: tp.Any = None, point: tp.Any = None):
        super().__init__(msg)
        self.element = element
        self.point = point


class SizeCapExceeded(StacklabError):
    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what} would have {size} elements, cap is {cap}")
        self.size = size
        self.cap = cap


class IsomorphismSearchLimit(StacklabError):
    pass


class GogSyntaxError(StacklabError):
    def __init__(self, msg: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


class NonInjectiveInclusion(StacklabError):
    def __init__(self, edge: str, vertex: str, kernel: tp.List[int]):
        super().__init__(
            f"inclusion of edge {edge} into {vertex} has nontrivial kernel "
            f"{kernel}")
        self.edge = edge
        self.vertex = vertex
        self.kernel = kernel


class UnknownGroupRef(StacklabError):
    def __init__(self, name: str, line: int = 0):
        where = f" (line {line})" if line else ""
        super().__init__(f"unknown group {name!r}{where}")
        self.name = name
        self.line = line


class DisconnectedGraph(StacklabError):
    pass


class MalformedWord(StacklabError):
    pass


class BallTooLarge(SizeCapExceeded):
    pass


class InvalidAction(StacklabError):
    def __init__(self, msg: str, relation: tp.Optional[str] = None):
        super().__init__(msg)
        self.relation = relation


class CapExceeded(StacklabError):
    pass


class DocumentSyntaxError(StacklabError):
    def __init__(self, msg: str, offset: int, line: int, column: int):
        super().__init__(
            f"{msg} at offset {offset} (line {line}, column {column})")
        self.offset = offset
        self.line = line
        self.column = column


class SchemaError(StacklabError):
    def __init__(self, msg: str, location: str):
        super().__init__(f"{location}: {msg}")
        self.location = location


class ValidationError(StacklabError):
    def __init__(self, msg: str, report: tp.Any = None):
        super().__init__(msg)
        self.report = report


class UnsupportedKind(StacklabError):
    pass
