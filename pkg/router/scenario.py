import json
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from router.exceptions import (DegenerateLinkError, ScenarioParseError,
                               ScenarioValidationError, UnknownNodeError)
from router.logging_config import setup_logging
from router.rf_config import config
from router.utils import db_to_linear, dbm_to_watts, linear_to_db, watts_to_dbm

setup_logging()
logger = logging.getLogger(__name__)


class NodeKind(str, Enum):
    """Тип узла сети."""

    BS = 'bs'
    PASSIVE_IRS = 'passive_irs'
    ACTIVE_IRS = 'active_irs'
    USER = 'user'


ARRAY_KEYS = {
    NodeKind.BS: ('T',),
    NodeKind.PASSIVE_IRS: ('M1', 'M2'),
    NodeKind.ACTIVE_IRS: ('N1', 'N2'),
    NodeKind.USER: (),
}
"""Ключи описания антенной решетки для каждого типа узла."""

TOTAL_KEYS = {NodeKind.PASSIVE_IRS: 'M', NodeKind.ACTIVE_IRS: 'N'}
"""Ключ общего числа элементов (только для квадратных решеток)."""


@dataclass(frozen=True)
class NodeSpec:
    """
    Узел сети: BS, пассивная IRS, активная IRS или пользователь.

    dims - размеры решетки: (T, 1) для линейной решетки BS,
    (M1, M2) / (N1, N2) для прямоугольных решеток IRS и (1, 1)
    для пользователя. Число элементов всегда вычисляется из dims.
    """

    id: int
    kind: NodeKind
    position: tuple[float, float, float]
    dims: tuple[int, int]

    @property
    def element_count(self) -> int:
        return self.dims[0] * self.dims[1]

    @property
    def is_irs(self) -> bool:
        return self.kind in (NodeKind.PASSIVE_IRS, NodeKind.ACTIVE_IRS)


@dataclass(frozen=True)
class Scenario:
    """
    Неизменяемое описание сети.

    Все мощности и отношения хранятся в линейных единицах (Вт, разы),
    дБ/дБм допускаются только в файле сценария. Отношение прямой
    видимости хранится как множество неупорядоченных пар (i < j).
    """

    nodes: tuple[NodeSpec, ...]
    los: frozenset[tuple[int, int]]
    wavelength: float
    element_spacing: float
    reference_gain: float
    noise_user: float
    noise_amp: float
    tx_power: float
    amp_power: float

    def __post_init__(self):
        diagnostics = scenario_diagnostics(self)
        if diagnostics:
            logger.error('Сценарий невалиден: %s', diagnostics)
            raise ScenarioValidationError(diagnostics)

    @property
    def bs_id(self) -> int:
        return 0

    @property
    def user_id(self) -> int:
        return len(self.nodes) - 1

    @property
    def irs_ids(self) -> tuple[int, ...]:
        return tuple(node.id for node in self.nodes if node.is_irs)

    @property
    def active_id(self) -> int:
        return next(
            node.id for node in self.nodes
            if node.kind is NodeKind.ACTIVE_IRS
        )

    @property
    def passive_ids(self) -> tuple[int, ...]:
        return tuple(
            node.id for node in self.nodes
            if node.kind is NodeKind.PASSIVE_IRS
        )

    @property
    def bs_antennas(self) -> int:
        return self.nodes[0].element_count

    @property
    def active_elements(self) -> int:
        return self.node(self.active_id).element_count

    @property
    def passive_dims(self) -> tuple[int, int]:
        """Общая решетка пассивных IRS; (1, 1), если их нет."""
        for node in self.nodes:
            if node.kind is NodeKind.PASSIVE_IRS:
                return node.dims
        return (1, 1)

    @property
    def passive_elements(self) -> int:
        dims = self.passive_dims
        return dims[0] * dims[1]

    def node(self, node_id: int) -> NodeSpec:
        if not isinstance(node_id, (int, np.integer)) or not (
            0 <= node_id < len(self.nodes)
        ):
            raise UnknownNodeError(f'Узел {node_id} отсутствует в сценарии')
        return self.nodes[node_id]

    def position(self, node_id: int) -> np.ndarray:
        return np.asarray(self.node(node_id).position, dtype=float)

    def has_los(self, i: int, j: int) -> bool:
        self.node(i)
        self.node(j)
        return (min(i, j), max(i, j)) in self.los

    def los_matrix(self) -> np.ndarray:
        """Симметричная матрица s_{i,j} с нулевой диагональю."""
        size = len(self.nodes)
        matrix = np.zeros((size, size), dtype=bool)
        for i, j in self.los:
            matrix[i, j] = matrix[j, i] = True
        return matrix

    def with_amp_power(self, amp_power: float) -> 'Scenario':
        return replace(self, amp_power=amp_power)

    def with_active_elements(self, count: int) -> 'Scenario':
        return self._with_dims(NodeKind.ACTIVE_IRS, factorize_elements(count))

    def with_passive_elements(self, count: int) -> 'Scenario':
        return self._with_dims(
            NodeKind.PASSIVE_IRS, factorize_elements(count)
        )

    def _with_dims(self, kind: NodeKind, dims: tuple[int, int]) -> 'Scenario':
        nodes = tuple(
            replace(node, dims=dims) if node.kind is kind else node
            for node in self.nodes
        )
        return replace(self, nodes=nodes)


def factorize_elements(count: int) -> tuple[int, int]:
    """
    Раскладывает число элементов в прямоугольную решетку (U1, U2).

    U2 - наибольший делитель count, не превосходящий √count, так что
    квадраты дают квадратную решетку, а простые числа - линейную.
    """
    if count < 1 or int(count) != count:
        raise ScenarioValidationError(
            [f'invalid_element_count: {count} не является целым >= 1']
        )
    count = int(count)
    side = math.isqrt(count)
    while count % side:
        side -= 1
    return (count // side, side)


def scenario_diagnostics(scenario: Scenario) -> list[str]:
    """Возвращает список нарушений инвариантов сценария."""
    diagnostics = []
    nodes = scenario.nodes
    if len(nodes) < 3:
        diagnostics.append(
            'too_few_nodes: нужны как минимум BS, одна IRS и пользователь'
        )
        return diagnostics

    for index, node in enumerate(nodes):
        if node.id != index:
            diagnostics.append(
                f'bad_node_ids: ожидался id {index}, найден {node.id}'
            )
            return diagnostics

    counts = {kind: 0 for kind in NodeKind}
    for node in nodes:
        counts[node.kind] += 1
    if counts[NodeKind.BS] != 1:
        diagnostics.append(
            f'bs_count: узлов BS {counts[NodeKind.BS]}, требуется 1'
        )
    elif nodes[0].kind is not NodeKind.BS:
        diagnostics.append('bs_id: BS должна иметь id 0')
    if counts[NodeKind.USER] != 1:
        diagnostics.append(
            f'user_count: пользователей {counts[NodeKind.USER]}, требуется 1'
        )
    elif nodes[-1].kind is not NodeKind.USER:
        diagnostics.append(
            f'user_id: пользователь должен иметь id {len(nodes) - 1}'
        )
    if counts[NodeKind.ACTIVE_IRS] != 1:
        diagnostics.append(
            'active_irs_count: активных IRS '
            f'{counts[NodeKind.ACTIVE_IRS]}, требуется 1'
        )

    for node in nodes:
        if len(node.dims) != 2 or min(node.dims) < 1:
            diagnostics.append(
                f'bad_array: узел {node.id} имеет решетку {node.dims}'
            )
        elif node.kind is NodeKind.BS and node.dims[1] != 1:
            diagnostics.append('bad_array: BS должна быть линейной (T, 1)')
        elif node.kind is NodeKind.USER and node.dims != (1, 1):
            diagnostics.append('bad_array: у пользователя одна антенна')
        if len(node.position) != 3 or not all(
            math.isfinite(value) for value in node.position
        ):
            diagnostics.append(
                f'bad_position: узел {node.id} имеет позицию {node.position}'
            )

    passive_dims = {
        node.dims for node in nodes if node.kind is NodeKind.PASSIVE_IRS
    }
    if len(passive_dims) > 1:
        diagnostics.append(
            'passive_dims_mismatch: пассивные IRS имеют разные решетки '
            f'{sorted(passive_dims)}'
        )

    for i, j in sorted(scenario.los):
        if not (0 <= i < len(nodes) and 0 <= j < len(nodes)):
            diagnostics.append(f'los_unknown_node: пара ({i}, {j})')
        elif i >= j:
            diagnostics.append(
                f'los_not_normalized: пара ({i}, {j}) '
                '(самосвязь или неупорядоченная пара)'
            )

    for name in (
        'wavelength',
        'element_spacing',
        'reference_gain',
        'noise_user',
        'noise_amp',
        'tx_power',
        'amp_power'
    ):
        value = getattr(scenario, name)
        if not math.isfinite(value) or value <= 0:
            diagnostics.append(f'non_positive: {name} = {value}')

    for first in range(len(nodes)):
        for second in range(first + 1, len(nodes)):
            if tuple(nodes[first].position) == tuple(nodes[second].position):
                diagnostics.append(
                    f'coincident_positions: узлы {first} и {second} '
                    f'в точке {nodes[first].position}'
                )
    return diagnostics


def _decode(text: str) -> dict:
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, TypeError) as error:
        raise ScenarioParseError(f'parse_error: {error}')
    if not isinstance(data, dict):
        raise ScenarioParseError('parse_error: ожидался json-объект')
    return data


def _number(container: dict, key: str, default=None) -> float:
    value = container.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioParseError(
            f'parse_error: поле {key} должно быть числом, получено {value!r}'
        )
    return float(value)


def _integer(container: dict, key: str) -> int:
    value = container.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioParseError(
            f'parse_error: поле {key} должно быть целым, получено {value!r}'
        )
    return value


def _parse_rf(rf: dict) -> dict:
    """Переводит раздел rf в линейные единицы, подставляя умолчания."""
    if not isinstance(rf, dict):
        raise ScenarioParseError('parse_error: раздел rf должен быть объектом')
    wavelength = _number(rf, 'lambda_m', config['lambda_m'])
    if 'beta_db' in rf:
        reference_gain = db_to_linear(_number(rf, 'beta_db'))
    elif config['beta_db'] is not None:
        reference_gain = db_to_linear(config['beta_db'])
    else:
        reference_gain = (wavelength / (4 * math.pi)) ** 2
    return {
        'wavelength': wavelength,
        'element_spacing': _number(rf, 'd_I_m', wavelength / 2),
        'reference_gain': reference_gain,
        'noise_user': dbm_to_watts(
            _number(rf, 'sigma2_dbm', config['sigma2_dbm'])
        ),
        'noise_amp': dbm_to_watts(
            _number(rf, 'sigmaF2_dbm', config['sigmaF2_dbm'])
        ),
        'tx_power': dbm_to_watts(_number(rf, 'PB_dbm', config['PB_dbm'])),
        'amp_power': dbm_to_watts(_number(rf, 'PF_dbm', config['PF_dbm'])),
    }


def _parse_dims(kind: NodeKind, array: dict, node_id: int,
                diagnostics: list[str]) -> tuple[int, int]:
    if not isinstance(array, dict):
        raise ScenarioParseError(
            f'parse_error: array узла {node_id} должен быть объектом'
        )
    if kind is NodeKind.USER:
        return (1, 1)
    if kind is NodeKind.BS:
        return (_integer(array, 'T'), 1)
    first, second = ARRAY_KEYS[kind]
    if first in array or second in array:
        return (_integer(array, first), _integer(array, second))
    total_key = TOTAL_KEYS[kind]
    total = _integer(array, total_key)
    side = math.isqrt(total) if total > 0 else 0
    if side * side != total or total < 1:
        diagnostics.append(
            f'unresolved_factorization: узел {node_id}, {total_key}={total} '
            f'не является полным квадратом, укажите {first} и {second}'
        )
        return (max(total, 1), 1)
    return (side, side)


def _parse_nodes(raw_nodes, diagnostics: list[str]) -> tuple[NodeSpec, ...]:
    if not isinstance(raw_nodes, list):
        raise ScenarioParseError('parse_error: nodes должен быть массивом')
    nodes = []
    for raw in raw_nodes:
        if not isinstance(raw, dict):
            raise ScenarioParseError('parse_error: узел должен быть объектом')
        node_id = _integer(raw, 'id')
        try:
            kind = NodeKind(raw.get('kind'))
        except ValueError:
            raise ScenarioParseError(
                f'parse_error: неизвестный тип узла {raw.get("kind")!r}'
            )
        position = raw.get('pos')
        if not isinstance(position, list) or len(position) != 3:
            raise ScenarioParseError(
                f'parse_error: pos узла {node_id} должен содержать 3 числа'
            )
        coordinates = tuple(
            _number({'pos': value}, 'pos') for value in position
        )
        dims = _parse_dims(kind, raw.get('array', {}), node_id, diagnostics)
        nodes.append(NodeSpec(node_id, kind, coordinates, dims))

    seen = {}
    for node in nodes:
        if node.id in seen:
            diagnostics.append(f'duplicate_id: id {node.id} повторяется')
        seen[node.id] = node
    nodes.sort(key=lambda node: node.id)
    return tuple(nodes)


def _parse_los(data: dict, size: int, diagnostics: list[str]) -> frozenset:
    pairs = set()
    if 'los_matrix' in data:
        matrix = data['los_matrix']
        if not isinstance(matrix, list) or len(matrix) != size or any(
            not isinstance(row, list) or len(row) != size for row in matrix
        ):
            raise ScenarioParseError(
                f'parse_error: los_matrix должна быть {size}x{size}'
            )
        for i in range(size):
            if matrix[i][i]:
                diagnostics.append(f'los_self_loop: s[{i}][{i}] != 0')
            for j in range(i + 1, size):
                if bool(matrix[i][j]) != bool(matrix[j][i]):
                    diagnostics.append(
                        f'asymmetric_los: s[{i}][{j}] != s[{j}][{i}]'
                    )
                if matrix[i][j] and matrix[j][i]:
                    pairs.add((i, j))
    raw_pairs = data.get('los', [])
    if not isinstance(raw_pairs, list):
        raise ScenarioParseError('parse_error: los должен быть массивом пар')
    for pair in raw_pairs:
        if (
            not isinstance(pair, list) or len(pair) != 2
            or not all(isinstance(item, int) for item in pair)
        ):
            raise ScenarioParseError(
                f'parse_error: элемент los {pair!r} не является парой id'
            )
        i, j = pair
        if i == j:
            diagnostics.append(f'los_self_loop: пара [{i}, {j}]')
            continue
        if not (0 <= i < size and 0 <= j < size):
            diagnostics.append(f'los_unknown_node: пара [{i}, {j}]')
            continue
        pairs.add((min(i, j), max(i, j)))
    return frozenset(pairs)


def _build(data: dict) -> tuple[Scenario | None, list[str]]:
    diagnostics: list[str] = []
    rf = _parse_rf(data.get('rf', {}))
    if 'nodes' not in data:
        raise ScenarioParseError('parse_error: отсутствует раздел nodes')
    nodes = _parse_nodes(data['nodes'], diagnostics)
    los = _parse_los(data, len(nodes), diagnostics)
    if diagnostics:
        return None, diagnostics
    try:
        return Scenario(nodes=nodes, los=los, **rf), []
    except ScenarioValidationError as error:
        return None, error.diagnostics


def load_scenario(text: str) -> Scenario:
    """
    Загружает и валидирует сценарий из текста в формате json.

    Величины в дБ/дБм переводятся в линейные единицы. Отсутствующие
    RF-параметры берутся из rf_config, d_I по умолчанию равен λ/2.
    """
    data = _decode(text)
    scenario, diagnostics = _build(data)
    if diagnostics:
        logger.error('Сценарий не прошел валидацию: %s', diagnostics)
        raise ScenarioValidationError(diagnostics)
    logger.info(
        'Загружен сценарий: %s IRS, %s пар прямой видимости',
        len(scenario.irs_ids),
        len(scenario.los)
    )
    return scenario


def validate_document(text: str) -> list[str]:
    """Возвращает все найденные нарушения без выбрасывания исключений."""
    try:
        _, diagnostics = _build(_decode(text))
    except ScenarioParseError as error:
        return [str(error)]
    return diagnostics


def serialize_scenario(scenario: Scenario) -> str:
    """Сериализует сценарий обратно в json (с дБ/дБм на границе)."""
    nodes = []
    for node in scenario.nodes:
        if node.kind is NodeKind.BS:
            array = {'T': node.dims[0]}
        elif node.kind is NodeKind.USER:
            array = {}
        else:
            first, second = ARRAY_KEYS[node.kind]
            array = {first: node.dims[0], second: node.dims[1]}
        nodes.append({
            'id': node.id,
            'kind': node.kind.value,
            'pos': list(node.position),
            'array': array
        })
    document = {
        'rf': {
            'lambda_m': scenario.wavelength,
            'd_I_m': scenario.element_spacing,
            'beta_db': linear_to_db(scenario.reference_gain),
            'sigma2_dbm': watts_to_dbm(scenario.noise_user),
            'sigmaF2_dbm': watts_to_dbm(scenario.noise_amp),
            'PB_dbm': watts_to_dbm(scenario.tx_power),
            'PF_dbm': watts_to_dbm(scenario.amp_power),
        },
        'nodes': nodes,
        'los': [list(pair) for pair in sorted(scenario.los)]
    }
    return json.dumps(document, indent=2)


def distance(scenario: Scenario, i: int, j: int) -> float:
    """Евклидово расстояние d_{i,j} между узлами, м."""
    if i == j:
        raise DegenerateLinkError(f'Расстояние узла {i} до себя не определено')
    return float(np.linalg.norm(scenario.position(j) - scenario.position(i)))


def link_angles(scenario: Scenario, i: int, j: int) -> tuple[float, float]:
    """
    Азимут и угол места направления от узла i к узлу j.

    Угол места θ отсчитывается от оси +z и лежит в [0, π],
    азимут ϑ - в плоскости x-y от оси +x, в пределах (-π, π].
    Это углы выхода (AoD) связи i -> j в узле i; угол прихода (AoA)
    в узле j равен link_angles(scenario, j, i).
    """
    if i == j:
        raise DegenerateLinkError(f'Направление узла {i} на себя не задано')
    delta = scenario.position(j) - scenario.position(i)
    norm = np.linalg.norm(delta)
    elevation = float(np.arccos(np.clip(delta[2] / norm, -1.0, 1.0)))
    azimuth = float(np.arctan2(delta[1], delta[0]))
    if azimuth <= -math.pi:
        azimuth = math.pi
    return azimuth, elevation
