import functools
import json
import logging
import sys
import time
from datetime import datetime as dt

from router.constants import DATE_FORMAT, TIME_FORMAT
from router.exceptions import (ChannelError, DegenerateLinkError,
                               InstanceTooLargeError,
                               InvalidPathError, InvalidSweepError,
                               NoRouteError, ScenarioParseError,
                               ScenarioValidationError, UnknownNodeError)
from router.logging_config import setup_logging

setup_logging()

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_NO_ROUTE = 2


def time_of_script(func):
    """Универсальный декоратор для логирования выполнения команды."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start_ts = time.time()
        date_str = dt.now().strftime(DATE_FORMAT)
        try:
            result = func(*args, **kwargs)
            status = 'SUCCESS' if not result else 'FAILED'
            error_type = error_message = failure = None
        except Exception as e:
            status = 'ERROR'
            error_type, error_message = type(e).__name__, str(e)
            result = None
            failure = e

        exec_time_sec = round(time.time() - start_ts, 3)
        log_record = {
            'DATE': date_str,
            'TIME': dt.now().strftime(TIME_FORMAT),
            'STATUS': status,
            'FUNCTION_NAME': func.__name__,
            'EXIT_CODE': result,
            'EXECUTION_TIME': exec_time_sec,
            'ERROR_TYPE': error_type,
            'ERROR_MESSAGE': error_message,
            'ENDLOGGING': 1
        }

        logging.info(json.dumps(log_record, ensure_ascii=False))

        if failure is not None:
            raise failure

        return result

    return wrapper


def time_of_function(func):
    """
    Декоратор для измерения времени выполнения функции.

    Замеряет время выполнения декорируемой функции и логирует результат
    в секундах. Время округляется до 3 знаков после запятой.

    Args:
        func (callable): Декорируемая функция, время выполнения которой
        нужно измерить.

    Returns:
        callable: Обёрнутая функция с добавленной функциональностью
        замера времени.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.time()
        result = func(*args, **kwargs)
        execution_time = round(time.time() - start_time, 3)
        logging.info(
            'Функция %s завершила работу. Время выполнения - %s сек.',
            func.__name__,
            execution_time
        )
        return result
    return wrapper


def exit_on_error(func):
    """
    Декоратор для команд CLI, переводящий исключения в коды возврата.

    Ошибки разбора и валидации входных данных, а также отказ полного
    перебора на большом сценарии дают код 1, отсутствие допустимого
    маршрута - код 2. Диагностика печатается в stderr и пишется в лог.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ScenarioValidationError as error:
            for diagnostic in error.diagnostics:
                print(f'error: {diagnostic}', file=sys.stderr)
            logging.error(
                'Сценарий не прошел валидацию в %s: %s',
                func.__name__,
                error
            )
            return EXIT_INVALID_INPUT
        except (
            ScenarioParseError,
            UnknownNodeError,
            ChannelError,
            DegenerateLinkError,
            InvalidPathError,
            InvalidSweepError,
            InstanceTooLargeError,
            OSError
        ) as error:
            print(f'error: {error}', file=sys.stderr)
            logging.error(
                'Ошибка входных данных в %s: %s', func.__name__, error
            )
            return EXIT_INVALID_INPUT
        except NoRouteError as error:
            print(f'no route: {error}', file=sys.stderr)
            logging.error(
                'Нет допустимого маршрута в %s: %s', func.__name__, error
            )
            return EXIT_NO_ROUTE
    return wrapper
