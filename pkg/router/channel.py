"""Синтез LoS-каналов по геометрии сценария."""
import csv
import logging

import numpy as np

from router.constants import CHANNEL_CSV_HEADER
from router.exceptions import ChannelError, NoLineOfSightError
from router.logging_config import setup_logging
from router.scenario import NodeKind, Scenario, distance, link_angles
from router.utils import format_float

setup_logging()
logger = logging.getLogger(__name__)


def steering_u(slope: float, count: int) -> np.ndarray:
    """Вектор [1, e^{-jπζ}, ..., e^{-j(U-1)πζ}] длины count."""
    if count < 1:
        raise ChannelError(f'Число элементов должно быть >= 1: {count}')
    return np.exp(-1j * np.pi * slope * np.arange(count))


def ura_steering(azimuth: float, elevation: float, dims: tuple[int, int],
                 spacing: float, wavelength: float) -> np.ndarray:
    """
    Отклик прямоугольной решетки (U1 x U2).

    Горизонтальный множитель (по sinθcosϑ) меняется медленнее всего:
    вектор равен kron(u(ζ1, U1), u(ζ2, U2)).
    """
    if min(dims) < 1:
        raise ChannelError(f'Некорректные размеры решетки: {dims}')
    ratio = 2 * spacing / wavelength
    horizontal = steering_u(
        ratio * np.sin(elevation) * np.cos(azimuth), dims[0]
    )
    vertical = steering_u(ratio * np.cos(elevation), dims[1])
    return np.kron(horizontal, vertical)


def ula_steering(angle: float, count: int, spacing: float,
                 wavelength: float) -> np.ndarray:
    return steering_u(2 * spacing / wavelength * np.cos(angle), count)


def link_gain(link_distance: float, reference_gain: float,
              wavelength: float) -> complex:
    """Комплексный коэффициент LoS-связи (√β / d)·e^{-j2πd/λ}."""
    if link_distance <= 0:
        raise ChannelError(f'Длина связи должна быть > 0: {link_distance}')
    phase = -2 * np.pi * link_distance / wavelength
    magnitude = np.sqrt(reference_gain) / link_distance
    return complex(magnitude * np.exp(1j * phase))


def bs_axis_angle(scenario: Scenario, j: int) -> float:
    """Угол между осью решетки BS (ось x) и направлением на узел j."""
    delta = scenario.position(j) - scenario.position(scenario.bs_id)
    cosine = delta[0] / np.linalg.norm(delta)
    return float(np.arccos(np.clip(cosine, -1.0, 1.0)))


def transmit_steering(scenario: Scenario, i: int, j: int) -> np.ndarray:
    """Вектор a_t узла i для исходящей связи i -> j."""
    node = scenario.node(i)
    if node.kind is NodeKind.BS:
        return ula_steering(
            bs_axis_angle(scenario, j),
            node.element_count,
            scenario.element_spacing,
            scenario.wavelength
        )
    if node.kind is NodeKind.USER:
        raise ChannelError('Пользователь не может быть передатчиком')
    azimuth, elevation = link_angles(scenario, i, j)
    return ura_steering(
        azimuth,
        elevation,
        node.dims,
        scenario.element_spacing,
        scenario.wavelength
    )


def receive_steering(scenario: Scenario, i: int, j: int) -> np.ndarray:
    """Вектор a_r узла j для входящей связи i -> j."""
    node = scenario.node(j)
    if node.kind is NodeKind.USER:
        return np.ones(1, dtype=complex)
    if node.kind is NodeKind.BS:
        raise ChannelError('BS не может быть приемником')
    azimuth, elevation = link_angles(scenario, j, i)
    return ura_steering(
        azimuth,
        elevation,
        node.dims,
        scenario.element_spacing,
        scenario.wavelength
    )


def channel_matrix(scenario: Scenario, i: int, j: int) -> np.ndarray:
    """
    Матрица канала H_{i,j} = h_{i,j}·a_r·a_t^H размера (U_j, U_i).

    Для связи в пользователя матрица вырождается в строку h^H_{i,J+1}.
    """
    if not scenario.has_los(i, j):
        raise NoLineOfSightError(f'Нет прямой видимости между {i} и {j}')
    gain = link_gain(
        distance(scenario, i, j),
        scenario.reference_gain,
        scenario.wavelength
    )
    transmit = transmit_steering(scenario, i, j)
    receive = receive_steering(scenario, i, j)
    return gain * np.outer(receive, transmit.conj())


def dump_channel_csv(scenario: Scenario, i: int, j: int, stream) -> int:
    """Пишет H_{i,j} в поток как csv (row, col, re, im); число строк."""
    matrix = channel_matrix(scenario, i, j)
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(CHANNEL_CSV_HEADER)
    for (row, col), value in np.ndenumerate(matrix):
        writer.writerow(
            (row, col, format_float(value.real), format_float(value.imag))
        )
    logger.info('Выгружен канал %s -> %s: %s', i, j, matrix.shape)
    return matrix.size
