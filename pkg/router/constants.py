import os

from dotenv import load_dotenv

load_dotenv()


LOGS_FOLDER = os.getenv('LOGS_FOLDER', 'logs')
"""Константа стокового названия директории с логами."""

LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO').upper()
"""Уровень логирования маршрутизатора (DEBUG для деталей графов)."""

LOG_MAX_BYTES = int(os.getenv('LOG_MAX_BYTES', 50000000))
"""Размер файла лога, после которого начинается ротация."""

LOG_BACKUP_COUNT = 3
"""Количество хранимых бэкапов файла лога."""

RESULTS_FOLDER = os.getenv('RESULTS_FOLDER', 'results')
"""Константа стокового названия директории с csv-результатами."""

SCENARIOS_FOLDER = os.getenv('SCENARIOS_FOLDER', 'scenarios')
"""Константа стокового названия директории со сценариями."""

MAX_WORKERS = int(os.getenv('MAX_WORKERS', 5))
"""Количество одновременно запущенных потоков при расчете sweep."""

RANDOM_SEED = int(os.getenv('RANDOM_SEED', 20230517))
"""Зерно генератора для случайных фаз и случайной маршрутизации."""

ORACLE_MAX_IRS = 12
"""Максимальное число IRS, для которого разрешен полный перебор путей."""

K_BEST_LIMIT = 32
"""Предел k для перебора k лучших подпутей при их пересечении."""

DECISION_RTOL = 1e-12
"""Относительный допуск на границе неравенства выбора активной IRS."""

FLOAT_FORMAT = '{:.11e}'
"""Формат вещественных чисел в csv (12 значащих цифр)."""

DATE_FORMAT = '%Y-%m-%d'
"""Формат даты по умолчанию."""

TIME_FORMAT = '%H:%M:%S'
"""Формат времени по умолчанию."""

PATH_SEPARATOR = '-'
"""Разделитель узлов в строковом представлении маршрута."""

ROUTE_CSV_HEADER = ('hop', 'from', 'to', 'distance_m', 'weight')
"""Колонки csv с описанием переходов маршрута."""

RATE_CSV_HEADER = (
    'mode',
    'path',
    'f_ba',
    'f_au',
    'f_bu',
    'eta2',
    'snr_act',
    'snr_pas',
    'rate_act',
    'rate_pas',
    'selected'
)
"""Колонки csv с отчетом о скорости (RateReport)."""

SWEEP_CSV_HEADER = (
    'value',
    'rate_act',
    'rate_pas',
    'selected',
    'path',
    'status'
)
"""Колонки csv с результатами sweep."""

CHANNEL_CSV_HEADER = ('row', 'col', 're', 'im')
"""Колонки csv с отладочным дампом матрицы канала."""

STATUS_OK = 'ok'
"""Статус строки sweep без ошибок."""

STATUS_NO_HYBRID = 'no_hybrid_route'
"""Статус строки sweep без маршрута через активную IRS."""

STATUS_NO_PASSIVE = 'no_passive_route'
"""Статус строки sweep без пассивного маршрута."""

MODE_PASSIVE = 'passive'
"""Маршрут только через пассивные IRS."""

MODE_HYBRID = 'hybrid'
"""Маршрут через активную IRS."""

MODE_AUTO = 'auto'
"""Оба маршрута и выбор между ними."""

STRATEGY_OPTIMAL = 'optimal'
"""Оптимальная маршрутизация по кратчайшим путям."""

STRATEGY_MYOPIC = 'myopic'
"""Жадный выбор ребра минимального веса на каждом шаге."""

STRATEGY_RANDOM = 'random'
"""Случайное блуждание по графу маршрутизации."""
