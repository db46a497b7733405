import math

from router.constants import FLOAT_FORMAT, PATH_SEPARATOR
from router.exceptions import InvalidSweepError


def db_to_linear(value_db: float) -> float:
    """Переводит величину из дБ в линейное отношение."""
    return 10.0 ** (value_db / 10.0)


def dbm_to_watts(value_dbm: float) -> float:
    """Переводит мощность из дБм в ватты."""
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def linear_to_db(value: float) -> float:
    """Переводит линейное отношение в дБ."""
    return 10.0 * math.log10(value)


def watts_to_dbm(value_w: float) -> float:
    """Переводит мощность из ватт в дБм."""
    return 10.0 * math.log10(value_w) + 30.0


def format_float(value: float | None) -> str:
    """
    Форматирует число для csv: 12 значащих цифр в научной нотации.
    Пустое значение превращается в пустую строку.
    """
    if value is None:
        return ''
    return FLOAT_FORMAT.format(value)


def path_to_string(nodes) -> str:
    """Строковое представление последовательности узлов: '0-3-5-11'."""
    return PATH_SEPARATOR.join(str(node) for node in nodes)


def parse_values(text: str) -> list[float]:
    """Разбирает список значений sweep вида '1,2,3'."""
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError as error:
        raise InvalidSweepError(f'Некорректный список значений: {error}')
