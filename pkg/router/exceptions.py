class ScenarioParseError(ValueError):
    """Ошибка разбора файла сценария."""


class ScenarioValidationError(ValueError):
    """Ошибка валидации сценария."""

    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        super().__init__('; '.join(self.diagnostics))


class UnknownNodeError(ValueError):
    """Ошибка обращения к несуществующему узлу."""


class ChannelError(ValueError):
    """Ошибка построения канала."""


class NoLineOfSightError(ChannelError):
    """Ошибка запроса канала для пары узлов без прямой видимости."""


class InvalidPathError(ValueError):
    """Ошибка невалидного маршрута отражений."""


class DimensionMismatchError(ValueError):
    """Ошибка несоответствия размерностей решения и маршрута."""


class MissingAmplificationError(ValueError):
    """Ошибка отсутствующего коэффициента усиления активной IRS."""


class NoRouteError(ValueError):
    """Ошибка отсутствия допустимого маршрута."""


class InstanceTooLargeError(ValueError):
    """Ошибка слишком большого сценария для полного перебора."""


class NotAcyclicError(ValueError):
    """Ошибка графа маршрутизации с циклом."""


class InvalidSweepError(ValueError):
    """Ошибка параметров sweep."""


class DegenerateLinkError(ValueError):
    """Ошибка запроса связи узла с самим собой."""
