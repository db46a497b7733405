import csv
import logging
from pathlib import Path

from router.exceptions import ScenarioParseError
from router.logging_config import setup_logging

setup_logging()


class FileMixin:
    """
    Миксин для работы с файловой системой.
    Содержит универсальные методы:
    - _read_text - Читает текстовый файл целиком.
    - _make_dir - Создает директорию и возвращает путь до нее.
    - _save_csv - Сохраняет строки в csv-файл с фиксированным форматом.
    """

    def _read_text(self, file_path: str | Path) -> str:
        """Защищенный метод, возвращает содержимое текстового файла."""
        path = Path(file_path)
        if not path.is_file():
            logging.error('Файл %s не существует', path)
            raise ScenarioParseError(f'Файл {path} не найден')
        logging.debug('Чтение файла: %s', path)
        return path.read_text(encoding='utf-8')

    def _make_dir(self, folder_name: str | Path) -> Path:
        """Защищенный метод, создает директорию."""
        try:
            folder_path = Path(folder_name)
            logging.debug('Путь к директории: %s', folder_path)
            folder_path.mkdir(parents=True, exist_ok=True)
            return folder_path
        except Exception as error:
            logging.error('Не удалось создать директорию по причине %s', error)
            raise

    def _save_csv(
        self,
        file_path: str | Path,
        header: tuple[str, ...],
        rows: list[tuple]
    ) -> Path:
        """
        Защищенный метод, сохраняет строки в csv-файл.

        Заголовок записывается всегда, строки - в переданном порядке,
        окончание строк - '\\n', чтобы файл был побайтно воспроизводим.
        """
        path = Path(file_path)
        self._make_dir(path.parent)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)
        logging.info('Сохранено %s строк в %s', len(rows), path)
        return path
