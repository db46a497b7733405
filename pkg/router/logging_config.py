import logging
import os
from datetime import datetime as dt
from logging.handlers import RotatingFileHandler

from router.constants import (LOG_BACKUP_COUNT, LOG_LEVEL, LOG_MAX_BYTES,
                              LOGS_FOLDER)

SUMMARY = 25

logging.addLevelName(SUMMARY, 'SUMMARY')


class RouterLogger(logging.Logger):
    """Логгер с уровнем SUMMARY для итоговых строк расчета."""

    def summary(self, message, *args, **kws):
        if self.isEnabledFor(SUMMARY):
            self._log(SUMMARY, message, args, **kws, stacklevel=2)


logging.setLoggerClass(RouterLogger)


def log_file_path(moment: dt | None = None) -> str:
    """Файл лога запуска в LOGS_FOLDER, по папке на каждый день."""
    moment = moment or dt.now()
    log_dir = os.path.abspath(
        os.path.join(
            os.path.dirname(__file__),
            '..',
            LOGS_FOLDER,
            moment.strftime('%Y-%m-%d')
        )
    )
    return os.path.join(
        log_dir, f'irs_router_{moment.strftime("%Y%m%d%H%M")}.log'
    )


def setup_logging():
    """
    Настройка логирования маршрутизатора.

    Пишет в файл log_file_path() с ротацией по LOG_MAX_BYTES и
    LOG_BACKUP_COUNT бэкапами, уровень берется из LOG_LEVEL.
    Итоговые строки (выбранный маршрут, вердикт, завершение sweep)
    пишутся уровнем SUMMARY, детали построения графов - DEBUG.
    Если у корневого логгера уже есть обработчики, ничего не делает.
    """
    if logging.getLogger().handlers:
        return
    log_filepath = log_file_path()
    os.makedirs(os.path.dirname(log_filepath), exist_ok=True)

    handler = RotatingFileHandler(
        log_filepath,
        maxBytes=LOG_MAX_BYTES,
        backupCount=LOG_BACKUP_COUNT,
        encoding='utf-8'
    )

    logging.basicConfig(
        level=LOG_LEVEL,
        format=(
            '%(asctime)s, '
            '%(filename)s, '
            '%(funcName)s, '
            '%(levelname)s, '
            '%(message)s, '
            '%(name)s'
        ),
        handlers=[handler]
    )
