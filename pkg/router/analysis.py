import logging
import math
from dataclasses import dataclass

from router.beamforming import RoutePath
from router.constants import DECISION_RTOL
from router.exceptions import InvalidPathError, NoRouteError
from router.logging_config import setup_logging
from router.scenario import Scenario, distance
from router.utils import format_float, path_to_string

setup_logging()
logger = logging.getLogger(__name__)


def chain_gain(scenario: Scenario, sequence) -> float:
    """
    Произведение Π β/d² по переходам последовательности узлов,
    умноженное на M² за каждую внутреннюю пассивную IRS.
    """
    gain = 1.0
    for first, second in zip(sequence, sequence[1:]):
        link = distance(scenario, first, second)
        gain *= scenario.reference_gain / link ** 2
    inner = len(sequence) - 2
    return gain * float(scenario.passive_elements) ** (2 * inner)


def _require_hybrid(path: RoutePath) -> None:
    if not path.is_hybrid:
        raise InvalidPathError('Ожидался маршрут с активной IRS')


def f_ba_closed(scenario: Scenario, path: RoutePath) -> float:
    """Поэлементный коэффициент мощности каскада BS -> активная IRS."""
    _require_hybrid(path)
    active = path.nodes[path.active_index]
    sequence = (scenario.bs_id, *path.prefix, active)
    return scenario.bs_antennas * chain_gain(scenario, sequence)


def f_au_closed(scenario: Scenario, path: RoutePath) -> float:
    """
    Поэлементный коэффициент мощности каскада активная IRS -> пользователь.

    Если активная IRS последняя в маршруте, это β/d² последнего перехода.
    """
    _require_hybrid(path)
    active = path.nodes[path.active_index]
    sequence = (active, *path.suffix, scenario.user_id)
    return chain_gain(scenario, sequence)


def f_bu_closed(scenario: Scenario, path: RoutePath) -> float:
    if path.is_hybrid:
        raise InvalidPathError('Ожидался чисто пассивный маршрут')
    if not path.nodes:
        raise InvalidPathError('Маршрут должен содержать хотя бы одну IRS')
    sequence = path.full_nodes(scenario)
    return scenario.bs_antennas * chain_gain(scenario, sequence)


def eta_closed(scenario: Scenario, f_ba: float) -> float:
    """Квадрат коэффициента усиления η² = P_F / (N(P_B f_BA + σ_F²))."""
    return scenario.amp_power / (
        scenario.active_elements
        * (scenario.tx_power * f_ba + scenario.noise_amp)
    )


def active_snr(tx_power: float, elements: float, f_ba: float, f_au: float,
               noise_user: float, noise_amp: float,
               amp_power: float) -> float:
    return tx_power * elements * f_au * f_ba / (
        f_au * noise_amp
        + noise_user * (tx_power * f_ba + noise_amp) / amp_power
    )


def snr_active_closed(scenario: Scenario, f_ba: float, f_au: float) -> float:
    return active_snr(
        scenario.tx_power,
        scenario.active_elements,
        f_ba,
        f_au,
        scenario.noise_user,
        scenario.noise_amp,
        scenario.amp_power
    )


def snr_passive_closed(scenario: Scenario, f_bu: float) -> float:
    return scenario.tx_power * f_bu / scenario.noise_user


def achievable_rate(snr: float) -> float:
    """Достижимая скорость log2(1 + γ), бит/с/Гц."""
    return math.log2(1 + snr)


def _require_positive(**values) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ValueError(f'Параметр {name} должен быть > 0: {value}')


def should_select_active(elements: float, noise_amp: float, noise_user: float,
                         tx_power: float, amp_power: float, f_ba: float,
                         f_au: float, f_bu: float) -> bool:
    """
    Решение о включении активной IRS в маршрут.

    Активная IRS выбирается, если
    N/σ_F² >= f̃/(f_BA σ²) + P_B f̃/(P_F f_AU σ_F²) + f̃/(P_F f_BA f_AU),
    что равносильно γ_act >= γ_pas. Равенство считается в пользу
    активной IRS с относительным допуском DECISION_RTOL.
    """
    _require_positive(
        elements=elements,
        noise_amp=noise_amp,
        noise_user=noise_user,
        tx_power=tx_power,
        amp_power=amp_power,
        f_ba=f_ba,
        f_au=f_au,
        f_bu=f_bu
    )
    left = elements / noise_amp
    right = (
        f_bu / (f_ba * noise_user)
        + tx_power * f_bu / (amp_power * f_au * noise_amp)
        + f_bu / (amp_power * f_ba * f_au)
    )
    return left >= right * (1 - DECISION_RTOL)


def min_amplification_power(elements: float, f_ba: float, f_au: float,
                            f_bu: float, noise_user: float, noise_amp: float,
                            tx_power: float) -> float | None:
    """Порог P_F, с которого выгодна активная IRS; None - порога нет."""
    _require_positive(
        elements=elements,
        f_ba=f_ba,
        f_au=f_au,
        f_bu=f_bu,
        noise_user=noise_user,
        noise_amp=noise_amp,
        tx_power=tx_power
    )
    margin = elements * f_ba * noise_user - f_bu * noise_amp
    if margin <= 0:
        return None
    return (
        f_bu * noise_user * (tx_power * f_ba + noise_amp) / (f_au * margin)
    )


def active_elements_threshold(amp_power: float, f_ba: float, f_au: float,
                              f_bu: float, noise_user: float,
                              noise_amp: float, tx_power: float) -> float:
    """Вещественный порог числа элементов активной IRS."""
    _require_positive(
        amp_power=amp_power,
        f_ba=f_ba,
        f_au=f_au,
        f_bu=f_bu,
        noise_user=noise_user,
        noise_amp=noise_amp,
        tx_power=tx_power
    )
    return (
        f_bu * noise_amp / (f_ba * noise_user)
        + tx_power * f_bu / (amp_power * f_au)
        + f_bu * noise_amp / (amp_power * f_ba * f_au)
    )


def min_active_elements(amp_power: float, f_ba: float, f_au: float,
                        f_bu: float, noise_user: float, noise_amp: float,
                        tx_power: float) -> int:
    """Наименьшее целое N, при котором активная IRS выгодна."""
    threshold = active_elements_threshold(
        amp_power, f_ba, f_au, f_bu, noise_user, noise_amp, tx_power
    )
    return max(1, math.ceil(threshold * (1 - DECISION_RTOL)))


@dataclass(frozen=True)
class RateReport:
    """
    Сводка по маршрутам: коэффициенты мощности, ОСШ, скорости и выбор.

    Поля маршрута, который не удалось построить, равны None.
    """

    hybrid_path: RoutePath | None
    passive_path: RoutePath | None
    f_ba: float | None
    f_au: float | None
    f_bu: float | None
    eta2: float | None
    snr_act: float | None
    snr_pas: float | None
    rate_act: float | None
    rate_pas: float | None
    select_active: bool

    @property
    def chosen_path(self) -> RoutePath:
        return self.hybrid_path if self.select_active else self.passive_path


def build_rate_report(scenario: Scenario, hybrid_path: RoutePath | None,
                      passive_path: RoutePath | None) -> RateReport:
    """
    Считает коэффициенты, ОСШ и скорости для найденных маршрутов.

    Если есть оба маршрута, выбор делается по правилу should_select_active,
    иначе выбирается единственный доступный.
    """
    if hybrid_path is None and passive_path is None:
        raise NoRouteError('Нет ни гибридного, ни пассивного маршрута')
    f_ba = f_au = eta2 = snr_act = rate_act = None
    f_bu = snr_pas = rate_pas = None
    if hybrid_path is not None:
        f_ba = f_ba_closed(scenario, hybrid_path)
        f_au = f_au_closed(scenario, hybrid_path)
        eta2 = eta_closed(scenario, f_ba)
        snr_act = snr_active_closed(scenario, f_ba, f_au)
        rate_act = achievable_rate(snr_act)
    if passive_path is not None:
        f_bu = f_bu_closed(scenario, passive_path)
        snr_pas = snr_passive_closed(scenario, f_bu)
        rate_pas = achievable_rate(snr_pas)
    if hybrid_path is None:
        select_active = False
    elif passive_path is None:
        select_active = True
    else:
        select_active = should_select_active(
            scenario.active_elements,
            scenario.noise_amp,
            scenario.noise_user,
            scenario.tx_power,
            scenario.amp_power,
            f_ba,
            f_au,
            f_bu
        )
    logger.info(
        'R_act=%s, R_pas=%s, выбрана активная IRS: %s',
        rate_act,
        rate_pas,
        select_active
    )
    return RateReport(
        hybrid_path,
        passive_path,
        f_ba,
        f_au,
        f_bu,
        eta2,
        snr_act,
        snr_pas,
        rate_act,
        rate_pas,
        select_active
    )


def verdict(report: RateReport) -> str:
    return 'active' if report.select_active else 'passive'


def rate_report_row(scenario: Scenario, report: RateReport,
                    mode: str) -> list[str]:
    """Строка csv отчета в порядке колонок RATE_CSV_HEADER."""
    chosen = report.chosen_path
    return [
        mode,
        path_to_string(chosen.full_nodes(scenario)),
        format_float(report.f_ba),
        format_float(report.f_au),
        format_float(report.f_bu),
        format_float(report.eta2),
        format_float(report.snr_act),
        format_float(report.snr_pas),
        format_float(report.rate_act),
        format_float(report.rate_pas),
        verdict(report)
    ]
