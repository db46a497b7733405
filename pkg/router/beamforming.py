import logging
from dataclasses import dataclass

import numpy as np

from router.channel import channel_matrix, receive_steering, transmit_steering
from router.exceptions import (DimensionMismatchError, InvalidPathError,
                               MissingAmplificationError)
from router.logging_config import setup_logging
from router.scenario import NodeKind, Scenario

setup_logging()
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RoutePath:
    """
    Маршрут отражений Ω = (a_1, ..., a_K) между BS и пользователем.

    active_index - позиция активной IRS в nodes (0-based, μ(ℓ) - 1);
    None для чисто пассивного маршрута.
    """

    nodes: tuple[int, ...]
    active_index: int | None = None

    @classmethod
    def from_nodes(cls, scenario: Scenario, nodes) -> 'RoutePath':
        """Строит маршрут, находя позицию активной IRS самостоятельно."""
        nodes = tuple(int(node) for node in nodes)
        active_id = scenario.active_id
        active_index = nodes.index(active_id) if active_id in nodes else None
        return cls(nodes, active_index)

    @property
    def is_hybrid(self) -> bool:
        return self.active_index is not None

    @property
    def prefix(self) -> tuple[int, ...]:
        """Пассивные IRS между BS и активной IRS."""
        if not self.is_hybrid:
            raise InvalidPathError('У пассивного маршрута нет активной IRS')
        return self.nodes[:self.active_index]

    @property
    def suffix(self) -> tuple[int, ...]:
        """Пассивные IRS между активной IRS и пользователем."""
        if not self.is_hybrid:
            raise InvalidPathError('У пассивного маршрута нет активной IRS')
        return self.nodes[self.active_index + 1:]

    @property
    def hop_count(self) -> int:
        return len(self.nodes) + 1

    def full_nodes(self, scenario: Scenario) -> tuple[int, ...]:
        return (scenario.bs_id, *self.nodes, scenario.user_id)

    def validate(self, scenario: Scenario) -> None:
        """Проверяет ограничения на маршрут; InvalidPathError при нарушении."""
        if not self.nodes:
            raise InvalidPathError('Маршрут должен содержать хотя бы одну IRS')
        if len(set(self.nodes)) != len(self.nodes):
            raise InvalidPathError(f'IRS повторяются в маршруте {self.nodes}')
        irs_ids = set(scenario.irs_ids)
        for node in self.nodes:
            if node not in irs_ids:
                raise InvalidPathError(f'Узел {node} не является IRS')
        active = [
            index for index, node in enumerate(self.nodes)
            if scenario.node(node).kind is NodeKind.ACTIVE_IRS
        ]
        expected = active[0] if active else None
        if self.active_index != expected:
            raise InvalidPathError(
                f'active_index={self.active_index}, '
                f'а активная IRS стоит на позиции {expected}'
            )
        full = self.full_nodes(scenario)
        for first, second in zip(full, full[1:]):
            if not scenario.has_los(first, second):
                raise InvalidPathError(
                    f'Нет прямой видимости на переходе {first} -> {second}'
                )


@dataclass(frozen=True, eq=False)
class BeamformingSolution:
    """Фазы IRS по порядку маршрута, прекодер BS и коэффициент усиления η."""

    phases: tuple[np.ndarray, ...]
    precoder: np.ndarray
    amplification: float | None = None


def optimal_phases(scenario: Scenario, previous: int, node: int,
                   following: int) -> np.ndarray:
    """Фазы, совмещающие a_r входящей связи с a_t исходящей связи."""
    incoming = receive_steering(scenario, previous, node)
    outgoing = transmit_steering(scenario, node, following)
    return np.mod(np.angle(outgoing) - np.angle(incoming), 2 * np.pi)


def mrt_precoder(scenario: Scenario, first_hop: int) -> np.ndarray:
    steering = transmit_steering(scenario, scenario.bs_id, first_hop)
    return steering / np.linalg.norm(steering)


def cascade(scenario: Scenario, sequence, phases: dict) -> np.ndarray:
    """
    Каскад H_{n-1,n}·Ψ·...·Ψ·H_{0,1} по последовательности узлов.

    Фазы применяются во всех внутренних узлах последовательности.
    Результат имеет размер (U_последний, U_первый).
    """
    result = channel_matrix(scenario, sequence[0], sequence[1])
    for index in range(1, len(sequence) - 1):
        node = sequence[index]
        reflection = np.exp(1j * phases[node])
        result = channel_matrix(
            scenario, node, sequence[index + 1]
        ) @ (reflection[:, np.newaxis] * result)
    return result


def _phase_map(scenario: Scenario, path: RoutePath,
               solution: BeamformingSolution) -> dict:
    if len(solution.phases) != len(path.nodes):
        raise DimensionMismatchError(
            f'Фаз {len(solution.phases)}, IRS в маршруте {len(path.nodes)}'
        )
    for node, phases in zip(path.nodes, solution.phases):
        expected = scenario.node(node).element_count
        if np.shape(phases) != (expected,):
            raise DimensionMismatchError(
                f'IRS {node}: фаз {np.shape(phases)}, элементов {expected}'
            )
    if np.shape(solution.precoder) != (scenario.bs_antennas,):
        raise DimensionMismatchError(
            f'Прекодер {np.shape(solution.precoder)}, '
            f'антенн BS {scenario.bs_antennas}'
        )
    return dict(zip(path.nodes, solution.phases))


def _hybrid_parts(scenario: Scenario, path: RoutePath,
                  solution: BeamformingSolution):
    if not path.is_hybrid:
        raise InvalidPathError('Ожидался маршрут с активной IRS')
    phases = _phase_map(scenario, path, solution)
    active = path.nodes[path.active_index]
    to_active = cascade(
        scenario, (scenario.bs_id, *path.prefix, active), phases
    )
    from_active = cascade(
        scenario, (active, *path.suffix, scenario.user_id), phases
    )
    reflection = np.exp(1j * phases[active])
    return to_active @ solution.precoder, reflection, from_active[0]


def tight_amplification(scenario: Scenario, path: RoutePath,
                        phases, precoder) -> float:
    """η, при котором ограничение мощности усиления выполняется точно."""
    draft = BeamformingSolution(tuple(phases), precoder, 1.0)
    signal, noise = amplification_power_terms(scenario, path, draft)
    return float(np.sqrt(scenario.amp_power / (signal + noise)))


def optimal_beamforming(scenario: Scenario,
                        path: RoutePath) -> BeamformingSolution:
    """
    Оптимальные фазы IRS, MRT-прекодер BS и коэффициент усиления.

    Для каждой IRS фазы равны ∠a_t(исходящая) - ∠a_r(входящая)
    по модулю 2π, прекодер - нормированный a_t BS в сторону a_1.
    Для гибридного маршрута η выбирается так, что мощность усиления
    равна P_F.
    """
    path.validate(scenario)
    full = path.full_nodes(scenario)
    phases = tuple(
        optimal_phases(scenario, full[index - 1], full[index], full[index + 1])
        for index in range(1, len(full) - 1)
    )
    precoder = mrt_precoder(scenario, path.nodes[0])
    amplification = None
    if path.is_hybrid:
        amplification = tight_amplification(scenario, path, phases, precoder)
    return BeamformingSolution(phases, precoder, amplification)


def solution_for_phases(scenario: Scenario, path: RoutePath, phases,
                        precoder=None) -> BeamformingSolution:
    """Решение с заданными фазами; прекодер по умолчанию MRT, η точный."""
    path.validate(scenario)
    phases = tuple(np.asarray(vector, dtype=float) for vector in phases)
    if precoder is None:
        precoder = mrt_precoder(scenario, path.nodes[0])
    precoder = np.asarray(precoder, dtype=complex)
    amplification = None
    if path.is_hybrid:
        amplification = tight_amplification(scenario, path, phases, precoder)
    return BeamformingSolution(phases, precoder, amplification)


def random_solution(scenario: Scenario, path: RoutePath,
                    rng: np.random.Generator) -> BeamformingSolution:
    """Случайные фазы и случайный прекодер единичной нормы."""
    phases = [
        rng.uniform(0, 2 * np.pi, scenario.node(node).element_count)
        for node in path.nodes
    ]
    precoder = (
        rng.standard_normal(scenario.bs_antennas)
        + 1j * rng.standard_normal(scenario.bs_antennas)
    )
    precoder /= np.linalg.norm(precoder)
    return solution_for_phases(scenario, path, phases, precoder)


def snr_passive_bruteforce(scenario: Scenario, path: RoutePath,
                           solution: BeamformingSolution) -> float:
    """γ_pas = P_B·|g̃^H w|² / σ² через явное произведение матриц."""
    if path.is_hybrid:
        raise InvalidPathError('Ожидался чисто пассивный маршрут')
    phases = _phase_map(scenario, path, solution)
    equivalent = cascade(scenario, path.full_nodes(scenario), phases)[0]
    received = abs(equivalent @ solution.precoder) ** 2
    return float(scenario.tx_power * received / scenario.noise_user)


def snr_active_bruteforce(scenario: Scenario, path: RoutePath,
                          solution: BeamformingSolution) -> float:
    """
    γ_act по явным матричным произведениям каскадов BS -> ℓ и ℓ -> U.

    Шум усиления проходит через η·g^H·Φ, тепловой шум пользователя
    добавляется как σ².
    """
    if not path.is_hybrid:
        raise InvalidPathError('Ожидался маршрут с активной IRS')
    if solution.amplification is None:
        raise MissingAmplificationError(
            'Для гибридного маршрута нужен коэффициент усиления'
        )
    incident, reflection, outgoing = _hybrid_parts(scenario, path, solution)
    eta = solution.amplification
    signal = abs(eta * (outgoing * reflection) @ incident) ** 2
    amp_noise = eta ** 2 * np.linalg.norm(outgoing * reflection) ** 2
    return float(
        scenario.tx_power * signal
        / (amp_noise * scenario.noise_amp + scenario.noise_user)
    )


def amplification_power_terms(scenario: Scenario, path: RoutePath,
                              solution: BeamformingSolution):
    """Вклад сигнала и шума в мощность усиления активной IRS."""
    if not path.is_hybrid:
        raise InvalidPathError('У пассивного маршрута нет усиления')
    if solution.amplification is None:
        raise MissingAmplificationError(
            'Для гибридного маршрута нужен коэффициент усиления'
        )
    incident, reflection, _ = _hybrid_parts(scenario, path, solution)
    gain = solution.amplification ** 2
    signal = gain * scenario.tx_power * np.linalg.norm(
        reflection * incident
    ) ** 2
    noise = gain * scenario.noise_amp * np.linalg.norm(reflection) ** 2
    return float(signal), float(noise)


def amplification_power_used(scenario: Scenario, path: RoutePath,
                             solution: BeamformingSolution) -> float:
    signal, noise = amplification_power_terms(scenario, path, solution)
    return signal + noise
