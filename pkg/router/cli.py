import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from router.analysis import (RateReport, build_rate_report, rate_report_row,
                             verdict)
from router.beamforming import RoutePath
from router.channel import dump_channel_csv
from router.constants import (MAX_WORKERS, MODE_AUTO, MODE_HYBRID,
                              MODE_PASSIVE, RANDOM_SEED, RATE_CSV_HEADER,
                              RESULTS_FOLDER, ROUTE_CSV_HEADER,
                              SCENARIOS_FOLDER, STATUS_NO_HYBRID,
                              STATUS_NO_PASSIVE, STATUS_OK, STRATEGY_MYOPIC,
                              STRATEGY_OPTIMAL, STRATEGY_RANDOM,
                              SWEEP_CSV_HEADER)
from router.decorators import (EXIT_INVALID_INPUT, EXIT_OK, exit_on_error,
                               time_of_function)
from router.exceptions import InvalidSweepError, NoRouteError
from router.logging_config import setup_logging
from router.mixins import FileMixin
from router.routing import (edge_weight, exhaustive_route_oracle,
                            route_active_to_user, route_bs_to_active,
                            route_hybrid, route_myopic, route_passive_only,
                            route_random)
from router.scenario import (Scenario, distance, load_scenario,
                             validate_document)
from router.utils import (dbm_to_watts, format_float, parse_values,
                          path_to_string)

setup_logging()
logger = logging.getLogger(__name__)

SWEEP_VARIABLES = ('pf', 'n', 'm')
"""Параметры, по которым возможен sweep."""


def resolve_scenario_path(file_path: str | Path) -> Path:
    """
    Путь к файлу сценария.

    Относительный путь, которого нет от текущей директории, ищется
    в SCENARIOS_FOLDER.
    """
    path = Path(file_path)
    if path.is_absolute() or path.exists():
        return path
    candidate = Path(SCENARIOS_FOLDER) / path
    return candidate if candidate.exists() else path


def default_sweep_output(variable: str) -> Path:
    return Path(RESULTS_FOLDER) / f'sweep_{variable}.csv'


class ScenarioReader(FileMixin):
    """Читает файл сценария и отдает проверенный Scenario."""

    def __init__(self, file_path: str | Path) -> None:
        self.file_path = resolve_scenario_path(file_path)

    def text(self) -> str:
        return self._read_text(self.file_path)

    def load(self) -> Scenario:
        scenario = load_scenario(self.text())
        logging.info('Сценарий %s загружен', self.file_path)
        return scenario

    def diagnostics(self) -> list[str]:
        return validate_document(self.text())


def find_route(scenario: Scenario, mode: str, strategy: str,
               rng: np.random.Generator | None = None) -> RoutePath:
    """Маршрут в заданном режиме выбранной стратегией."""
    if strategy == STRATEGY_OPTIMAL:
        if mode == MODE_HYBRID:
            return route_hybrid(scenario)
        return route_passive_only(scenario)
    if strategy == STRATEGY_MYOPIC:
        return route_myopic(scenario, mode)
    if strategy == STRATEGY_RANDOM:
        if rng is None:
            rng = np.random.default_rng(RANDOM_SEED)
        return route_random(scenario, mode, rng)
    raise ValueError(f'Неизвестная стратегия: {strategy}')


def _try_route(scenario: Scenario, mode: str, strategy: str,
               rng: np.random.Generator | None = None) -> RoutePath | None:
    try:
        return find_route(scenario, mode, strategy, rng)
    except NoRouteError as error:
        logging.warning('Маршрут %s не найден: %s', mode, error)
        return None


def hop_rows(scenario: Scenario, path: RoutePath) -> list[tuple]:
    """Строки таблицы переходов: номер, откуда, куда, длина, вес."""
    full = path.full_nodes(scenario)
    rows = []
    for hop, (first, second) in enumerate(zip(full, full[1:]), start=1):
        link = distance(scenario, first, second)
        weight = edge_weight(
            link, scenario.passive_elements, scenario.reference_gain
        )
        rows.append(
            (hop, first, second, format_float(link), format_float(weight))
        )
    return rows


class RouteReporter(FileMixin):
    """Печатает отчет о маршруте и сохраняет таблицы в csv."""

    def __init__(self, scenario: Scenario, report: RateReport,
                 mode: str, stream=None) -> None:
        self.scenario = scenario
        self.report = report
        self.mode = mode
        self.stream = stream or sys.stdout

    def _print(self, line: str) -> None:
        print(line, file=self.stream)

    def _print_path(self, title: str, path: RoutePath) -> None:
        self._print(
            f'{title}: {path_to_string(path.full_nodes(self.scenario))}'
        )
        for hop, first, second, link, weight in hop_rows(
            self.scenario, path
        ):
            self._print(
                f'  hop {hop}: {first} -> {second}, '
                f'd={link} m, W={weight}'
            )

    def print_report(self) -> None:
        report = self.report
        self._print(f'mode: {self.mode}')
        if report.hybrid_path is not None:
            self._print_path('hybrid route', report.hybrid_path)
            self._print(
                f'  f_ba={format_float(report.f_ba)} '
                f'f_au={format_float(report.f_au)} '
                f'eta2={format_float(report.eta2)}'
            )
            self._print(
                f'  snr_act={format_float(report.snr_act)} '
                f'rate_act={format_float(report.rate_act)} bps/Hz'
            )
        elif self.mode != MODE_PASSIVE:
            self._print('hybrid route: none')
        if report.passive_path is not None:
            self._print_path('passive route', report.passive_path)
            self._print(
                f'  f_bu={format_float(report.f_bu)} '
                f'snr_pas={format_float(report.snr_pas)} '
                f'rate_pas={format_float(report.rate_pas)} bps/Hz'
            )
        elif self.mode != MODE_HYBRID:
            self._print('passive route: none')
        if self.mode == MODE_AUTO:
            self._print(f'verdict: {verdict(report)}')

    def save_hops(self, file_path: str | Path) -> Path:
        return self._save_csv(
            file_path,
            ROUTE_CSV_HEADER,
            hop_rows(self.scenario, self.report.chosen_path)
        )

    def save_rate(self, file_path: str | Path) -> Path:
        return self._save_csv(
            file_path,
            RATE_CSV_HEADER,
            [rate_report_row(self.scenario, self.report, self.mode)]
        )


@dataclass(frozen=True)
class SweepSpec:
    """Описание sweep: параметр, значения, файл сценария и файл csv."""

    variable: str
    values: tuple[float, ...]
    scenario_path: Path
    output_path: Path

    def validate(self) -> None:
        if self.variable not in SWEEP_VARIABLES:
            raise InvalidSweepError(
                f'Неизвестный параметр sweep: {self.variable}'
            )
        if not self.values:
            raise InvalidSweepError('Список значений sweep пуст')
        if any(
            later <= earlier
            for earlier, later in zip(self.values, self.values[1:])
        ):
            raise InvalidSweepError(
                f'Значения sweep должны строго возрастать: {self.values}'
            )
        if self.variable in ('n', 'm') and any(
            value != int(value) or value < 1 for value in self.values
        ):
            raise InvalidSweepError(
                f'Для {self.variable} нужны целые значения >= 1'
            )


def _hybrid_is_fixed(scenario: Scenario) -> bool:
    """
    Гибридный маршрут не зависит от P_F и N.

    Так бывает, пока подпути BS -> ℓ и ℓ -> U не пересекаются: иначе
    пара подпутей выбирается по ОСШ, а оно зависит от P_F и N.
    """
    try:
        prefix = route_bs_to_active(scenario)
        suffix = route_active_to_user(scenario)
    except NoRouteError:
        return True
    return not set(prefix.inner) & set(suffix.inner)


class SweepRunner(FileMixin):
    """
    Считает строку csv на каждое значение sweep.

    Пассивный маршрут для P_F и N строится один раз, гибридный тоже,
    если его подпути не пересекаются. Для M графы перестраиваются на
    каждом значении. Точки считаются параллельно, строки записываются
    в порядке значений.
    """

    def __init__(self, spec: SweepSpec, scenario: Scenario,
                 max_workers: int = MAX_WORKERS) -> None:
        spec.validate()
        self.spec = spec
        self.scenario = scenario
        self.max_workers = max_workers
        self._passive_per_point = spec.variable == 'm'
        self._hybrid_per_point = (
            self._passive_per_point or not _hybrid_is_fixed(scenario)
        )
        self._hybrid = self._passive = None
        if not self._hybrid_per_point:
            self._hybrid = _try_route(scenario, MODE_HYBRID, STRATEGY_OPTIMAL)
        elif not self._passive_per_point:
            logger.info(
                'Подпути пересекаются, гибридный маршрут строится '
                'на каждом значении'
            )
        if not self._passive_per_point:
            self._passive = _try_route(
                scenario, MODE_PASSIVE, STRATEGY_OPTIMAL
            )

    def _routes(self, scenario: Scenario) -> tuple:
        hybrid_path = self._hybrid
        if self._hybrid_per_point:
            hybrid_path = _try_route(scenario, MODE_HYBRID, STRATEGY_OPTIMAL)
        passive_path = self._passive
        if self._passive_per_point:
            passive_path = _try_route(
                scenario, MODE_PASSIVE, STRATEGY_OPTIMAL
            )
        return hybrid_path, passive_path

    def _point_scenario(self, value: float) -> Scenario:
        if self.spec.variable == 'pf':
            return self.scenario.with_amp_power(dbm_to_watts(value))
        if self.spec.variable == 'n':
            return self.scenario.with_active_elements(int(value))
        return self.scenario.with_passive_elements(int(value))

    def _format_value(self, value: float) -> str:
        if self.spec.variable == 'pf':
            return format_float(value)
        return str(int(value))

    def _evaluate(self, value: float) -> tuple:
        scenario = self._point_scenario(value)
        hybrid_path, passive_path = self._routes(scenario)
        if hybrid_path is None:
            status = STATUS_NO_HYBRID
        elif passive_path is None:
            status = STATUS_NO_PASSIVE
        else:
            status = STATUS_OK
        if hybrid_path is None and passive_path is None:
            return (self._format_value(value), '', '', '', '', status)
        report = build_rate_report(scenario, hybrid_path, passive_path)
        return (
            self._format_value(value),
            format_float(report.rate_act),
            format_float(report.rate_pas),
            verdict(report),
            path_to_string(report.chosen_path.full_nodes(scenario)),
            status
        )

    @time_of_function
    def run(self) -> Path:
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            rows = list(executor.map(self._evaluate, self.spec.values))
        path = self._save_csv(self.spec.output_path, SWEEP_CSV_HEADER, rows)
        logger.summary(
            'Sweep по %s: %s точек сохранено в %s',
            self.spec.variable,
            len(rows),
            path
        )
        return path


@exit_on_error
def cmd_validate(args) -> int:
    diagnostics = ScenarioReader(args.file).diagnostics()
    if not diagnostics:
        print('OK')
        return EXIT_OK
    for diagnostic in diagnostics:
        print(f'error: {diagnostic}')
    logging.error('Сценарий %s невалиден: %s', args.file, diagnostics)
    return EXIT_INVALID_INPUT


@exit_on_error
def cmd_route(args) -> int:
    scenario = ScenarioReader(args.file).load()
    rng = np.random.default_rng(args.seed)
    hybrid_path = passive_path = None
    if args.mode == MODE_HYBRID:
        hybrid_path = find_route(scenario, MODE_HYBRID, args.strategy, rng)
    elif args.mode == MODE_PASSIVE:
        passive_path = find_route(scenario, MODE_PASSIVE, args.strategy, rng)
    else:
        hybrid_path = _try_route(scenario, MODE_HYBRID, args.strategy, rng)
        passive_path = _try_route(scenario, MODE_PASSIVE, args.strategy, rng)
    report = build_rate_report(scenario, hybrid_path, passive_path)
    reporter = RouteReporter(scenario, report, args.mode)
    reporter.print_report()
    if args.csv:
        reporter.save_hops(args.csv)
    if args.rate_csv:
        reporter.save_rate(args.rate_csv)
    logger.summary(
        'Маршрут %s (%s): %s, выбор: %s',
        args.mode,
        args.strategy,
        report.chosen_path.nodes,
        verdict(report)
    )
    return EXIT_OK


@exit_on_error
def cmd_sweep(args) -> int:
    spec = SweepSpec(
        args.var,
        tuple(parse_values(args.values)),
        Path(args.file),
        Path(args.out) if args.out else default_sweep_output(args.var)
    )
    spec.validate()
    scenario = ScenarioReader(spec.scenario_path).load()
    SweepRunner(spec, scenario, args.workers).run()
    return EXIT_OK


@exit_on_error
def cmd_oracle(args) -> int:
    scenario = ScenarioReader(args.file).load()
    found = False
    for mode in (MODE_HYBRID, MODE_PASSIVE):
        try:
            path = exhaustive_route_oracle(scenario, mode, args.monotone)
        except NoRouteError:
            print(f'{mode}: none')
            continue
        found = True
        if mode == MODE_HYBRID:
            report = build_rate_report(scenario, path, None)
            rate = report.rate_act
        else:
            report = build_rate_report(scenario, None, path)
            rate = report.rate_pas
        print(
            f'{mode}: {path_to_string(path.full_nodes(scenario))} '
            f'rate={format_float(rate)} bps/Hz'
        )
    if not found:
        raise NoRouteError('Перебор не нашел ни одного маршрута')
    return EXIT_OK


@exit_on_error
def cmd_channel(args) -> int:
    scenario = ScenarioReader(args.file).load()
    dump_channel_csv(scenario, args.i, args.j, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='router',
        description='Маршрутизация через цепочки активных и пассивных IRS'
    )
    commands = parser.add_subparsers(dest='command', required=True)

    validate = commands.add_parser('validate', help='проверить сценарий')
    validate.add_argument('file')
    validate.set_defaults(handler=cmd_validate)

    route = commands.add_parser('route', help='построить маршрут')
    route.add_argument('file')
    route.add_argument(
        '--mode',
        choices=(MODE_PASSIVE, MODE_HYBRID, MODE_AUTO),
        default=MODE_AUTO
    )
    route.add_argument(
        '--strategy',
        choices=(STRATEGY_OPTIMAL, STRATEGY_MYOPIC, STRATEGY_RANDOM),
        default=STRATEGY_OPTIMAL
    )
    route.add_argument('--seed', type=int, default=RANDOM_SEED)
    route.add_argument('--csv', help='csv с таблицей переходов')
    route.add_argument('--rate-csv', help='csv со строкой отчета')
    route.set_defaults(handler=cmd_route)

    sweep = commands.add_parser('sweep', help='sweep по P_F, N или M')
    sweep.add_argument('file')
    sweep.add_argument('--var', choices=SWEEP_VARIABLES, required=True)
    sweep.add_argument(
        '--values',
        required=True,
        help='значения через запятую (дБм для pf)'
    )
    sweep.add_argument(
        '--out',
        help=f'csv с результатами, по умолчанию {RESULTS_FOLDER}/sweep_*.csv'
    )
    sweep.add_argument('--workers', type=int, default=MAX_WORKERS)
    sweep.set_defaults(handler=cmd_sweep)

    oracle = commands.add_parser('oracle', help='полный перебор маршрутов')
    oracle.add_argument('file')
    oracle.add_argument('--monotone', action='store_true')
    oracle.set_defaults(handler=cmd_oracle)

    channel = commands.add_parser('channel', help='выгрузить H_{i,j}')
    channel.add_argument('file')
    channel.add_argument('i', type=int)
    channel.add_argument('j', type=int)
    channel.set_defaults(handler=cmd_channel)
    return parser
