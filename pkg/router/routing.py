import logging
import math
from dataclasses import dataclass
from itertools import product

import networkx as nx
import numpy as np

from router.analysis import (f_au_closed, f_ba_closed, f_bu_closed,
                             snr_active_closed, snr_passive_closed)
from router.beamforming import RoutePath
from router.constants import (K_BEST_LIMIT, MODE_HYBRID, MODE_PASSIVE,
                              ORACLE_MAX_IRS)
from router.decorators import time_of_function
from router.exceptions import (InstanceTooLargeError, NoRouteError,
                               NotAcyclicError, UnknownNodeError)
from router.logging_config import setup_logging
from router.scenario import Scenario, distance

setup_logging()
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RoutingGraph:
    """
    Ориентированный взвешенный граф подзадачи маршрутизации.

    Ребра хранят атрибуты weight (ln(d/(M√β))) и distance.
    anchor - узел, расстояние до которого должно строго расти вдоль ребер
    (кроме ребер в сток).
    """

    graph: nx.DiGraph
    source: int
    sink: int
    anchor: int


@dataclass(frozen=True)
class PathResult:
    """Путь от источника до стока (с концами) и его суммарный вес."""

    nodes: tuple[int, ...]
    cost: float

    @property
    def inner(self) -> tuple[int, ...]:
        return self.nodes[1:-1]

    @property
    def hops(self) -> int:
        return len(self.nodes) - 1

    def sort_key(self):
        return (self.cost, self.hops, self.nodes)


def edge_weight(link_distance: float, elements: float,
                reference_gain: float) -> float:
    """Вес ребра ln(d / (M√β)); отрицателен при d < M√β."""
    if link_distance <= 0 or elements <= 0 or reference_gain <= 0:
        raise ValueError(
            'Расстояние, число элементов и β должны быть > 0: '
            f'{link_distance}, {elements}, {reference_gain}'
        )
    return math.log(link_distance / (elements * math.sqrt(reference_gain)))


def build_subgraph(scenario: Scenario, source: int, sink: int,
                   allowed) -> RoutingGraph:
    """
    Граф подзадачи source -> sink через разрешенные IRS.

    Ребро (i, j) есть, если между узлами прямая видимость и либо j - сток,
    либо j дальше от source, чем i. Из стока ребер нет, в источник тоже.
    """
    vertices = [source]
    vertices += sorted(set(allowed) - {source, sink})
    vertices.append(sink)
    anchor_distance = {
        node: 0.0 if node == source else distance(scenario, source, node)
        for node in vertices
    }
    graph = nx.DiGraph()
    graph.add_nodes_from(vertices)
    for first in vertices:
        if first == sink:
            continue
        for second in vertices:
            if second in (first, source):
                continue
            if not scenario.has_los(first, second):
                continue
            if (
                second != sink
                and anchor_distance[second] <= anchor_distance[first]
            ):
                continue
            link = distance(scenario, first, second)
            graph.add_edge(
                first,
                second,
                distance=link,
                weight=edge_weight(
                    link,
                    scenario.passive_elements,
                    scenario.reference_gain
                )
            )
    logger.debug(
        'Граф %s -> %s: %s вершин, %s ребер',
        source,
        sink,
        graph.number_of_nodes(),
        graph.number_of_edges()
    )
    return RoutingGraph(graph, source, sink, source)


def path_cost(graph: nx.DiGraph, nodes) -> float:
    """Сумма весов ребер вдоль пути в порядке прохождения."""
    cost = 0.0
    for first, second in zip(nodes, nodes[1:]):
        cost += graph[first][second]['weight']
    return cost


def shortest_simple_path(graph: nx.DiGraph, source: int,
                         target: int) -> PathResult | None:
    """
    Кратчайший путь в ациклическом графе с весами любого знака.

    Одна релаксация в топологическом порядке. При равных весах
    выбирается путь с меньшим числом переходов, затем лексикографически
    меньший. Возвращает None, если target недостижим.
    """
    if source not in graph or target not in graph:
        raise UnknownNodeError(f'Узлов {source} или {target} нет в графе')
    if not nx.is_directed_acyclic_graph(graph):
        raise NotAcyclicError('Граф маршрутизации содержит цикл')
    labels = {source: (0.0, 0, (source,))}
    for node in nx.lexicographical_topological_sort(graph):
        if node not in labels:
            continue
        cost, hops, nodes = labels[node]
        for following, attributes in graph[node].items():
            candidate = (
                cost + attributes['weight'],
                hops + 1,
                nodes + (following,)
            )
            if following not in labels or candidate < labels[following]:
                labels[following] = candidate
    if target not in labels:
        return None
    cost, _, nodes = labels[target]
    return PathResult(nodes, cost)


def k_shortest_simple_paths(graph: nx.DiGraph, source: int, target: int,
                            count: int) -> list[PathResult]:
    """
    До count кратчайших простых путей по алгоритму Йена.

    Ответвления ищутся той же релаксацией в топологическом порядке,
    поэтому отрицательные веса допустимы.
    """
    first = shortest_simple_path(graph, source, target)
    if first is None or count < 1:
        return []
    found = [first]
    candidates = {}
    while len(found) < count:
        last = found[-1].nodes
        for index in range(len(last) - 1):
            spur = last[index]
            root = last[:index + 1]
            pruned = graph.copy()
            for path in found:
                if path.nodes[:index + 1] == root and pruned.has_edge(
                    spur, path.nodes[index + 1]
                ):
                    pruned.remove_edge(spur, path.nodes[index + 1])
            pruned.remove_nodes_from(root[:-1])
            spur_path = shortest_simple_path(pruned, spur, target)
            if spur_path is None:
                continue
            nodes = root[:-1] + spur_path.nodes
            if nodes not in candidates and all(
                path.nodes != nodes for path in found
            ):
                candidates[nodes] = PathResult(nodes, path_cost(graph, nodes))
        if not candidates:
            break
        best = min(candidates.values(), key=PathResult.sort_key)
        del candidates[best.nodes]
        found.append(best)
    return found


def _solve(routing_graph: RoutingGraph, label: str) -> PathResult:
    result = shortest_simple_path(
        routing_graph.graph, routing_graph.source, routing_graph.sink
    )
    if result is None:
        logger.error('Нет пути для подзадачи %s', label)
        raise NoRouteError(
            f'{label}: узел {routing_graph.sink} недостижим '
            f'из {routing_graph.source}'
        )
    return result


def bs_to_active_graph(scenario: Scenario) -> RoutingGraph:
    return build_subgraph(
        scenario, scenario.bs_id, scenario.active_id, scenario.passive_ids
    )


def active_to_user_graph(scenario: Scenario) -> RoutingGraph:
    return build_subgraph(
        scenario, scenario.active_id, scenario.user_id, scenario.passive_ids
    )


def passive_graph(scenario: Scenario) -> RoutingGraph:
    """Граф BS -> пользователь без активной IRS и без прямого ребра."""
    routing_graph = build_subgraph(
        scenario, scenario.bs_id, scenario.user_id, scenario.passive_ids
    )
    if routing_graph.graph.has_edge(scenario.bs_id, scenario.user_id):
        routing_graph.graph.remove_edge(scenario.bs_id, scenario.user_id)
    return routing_graph


def _warn_direct_link(scenario: Scenario) -> None:
    if scenario.has_los(scenario.bs_id, scenario.user_id):
        logger.warning(
            'Есть прямая видимость BS -> пользователь; прямая связь '
            'не рассматривается'
        )


def route_bs_to_active(scenario: Scenario) -> PathResult:
    """Оптимальный подпуть BS -> активная IRS (максимум f_BA)."""
    return _solve(bs_to_active_graph(scenario), 'BS -> активная IRS')


def route_active_to_user(scenario: Scenario) -> PathResult:
    """Оптимальный подпуть активная IRS -> пользователь (максимум f_AU)."""
    return _solve(active_to_user_graph(scenario), 'активная IRS -> U')


@time_of_function
def route_passive_only(scenario: Scenario) -> RoutePath:
    """Оптимальный маршрут только через пассивные IRS (максимум f̃_BU)."""
    _warn_direct_link(scenario)
    result = _solve(passive_graph(scenario), 'пассивный маршрут')
    path = RoutePath(result.inner)
    path.validate(scenario)
    logger.info('Пассивный маршрут: %s, вес %s', result.nodes, result.cost)
    return path


def _join(scenario: Scenario, prefix: PathResult,
          suffix: PathResult) -> RoutePath:
    nodes = prefix.inner + (scenario.active_id,) + suffix.inner
    return RoutePath(nodes, len(prefix.inner))


def _hybrid_key(scenario: Scenario, path: RoutePath):
    snr = snr_active_closed(
        scenario, f_ba_closed(scenario, path), f_au_closed(scenario, path)
    )
    return (-snr, path.hop_count, path.nodes)


def _pair_bound(scenario: Scenario, prefix: PathResult,
                suffix: PathResult) -> float:
    """ОСШ пары подпутей без учета их пересечения."""
    return -_hybrid_key(scenario, _join(scenario, prefix, suffix))[0]


def _disjoint_fallback(scenario: Scenario) -> RoutePath:
    """
    Совместный выбор пересекающихся подпутей по k лучшим путям.

    k удваивается, пока не найдена непересекающаяся пара, которую не
    могут превзойти (k+1)-е кандидаты каждой стороны.
    """
    to_active = bs_to_active_graph(scenario)
    to_user = active_to_user_graph(scenario)
    best = None
    count = 2
    while count <= K_BEST_LIMIT:
        prefixes = k_shortest_simple_paths(
            to_active.graph, to_active.source, to_active.sink, count + 1
        )
        suffixes = k_shortest_simple_paths(
            to_user.graph, to_user.source, to_user.sink, count + 1
        )
        best = None
        for prefix, suffix in product(prefixes[:count], suffixes[:count]):
            if set(prefix.inner) & set(suffix.inner):
                continue
            path = _join(scenario, prefix, suffix)
            if best is None or _hybrid_key(scenario, path) < _hybrid_key(
                scenario, best
            ):
                best = path
        if best is not None:
            value = -_hybrid_key(scenario, best)[0]
            bounds = [-np.inf]
            if len(prefixes) > count:
                bounds.append(
                    _pair_bound(scenario, prefixes[count], suffixes[0])
                )
            if len(suffixes) > count:
                bounds.append(
                    _pair_bound(scenario, prefixes[0], suffixes[count])
                )
            if value >= max(bounds):
                logger.info('Пересечение разрешено при k=%s', count)
                return best
        if len(prefixes) <= count and len(suffixes) <= count:
            break
        count *= 2
    logger.warning(
        'k лучших путей не дали гарантированного решения, перебор'
    )
    try:
        return exhaustive_route_oracle(scenario, MODE_HYBRID, monotone=True)
    except InstanceTooLargeError:
        if best is None:
            raise NoRouteError(
                'Не найдена пара непересекающихся подпутей'
            )
        logger.warning('Возвращена лучшая найденная пара без гарантии')
        return best


@time_of_function
def route_hybrid(scenario: Scenario) -> RoutePath:
    """
    Оптимальный маршрут через активную IRS.

    Подпути BS -> ℓ и ℓ -> U решаются независимо и склеиваются;
    если они делят пассивную IRS, применяется совместный выбор.
    """
    _warn_direct_link(scenario)
    prefix = route_bs_to_active(scenario)
    suffix = route_active_to_user(scenario)
    shared = set(prefix.inner) & set(suffix.inner)
    if shared:
        logger.warning('Подпути пересекаются по IRS %s', sorted(shared))
        path = _disjoint_fallback(scenario)
    else:
        path = _join(scenario, prefix, suffix)
    path.validate(scenario)
    logger.info('Гибридный маршрут: %s', path.nodes)
    return path


def _require_mode(mode: str) -> None:
    if mode not in (MODE_PASSIVE, MODE_HYBRID):
        raise ValueError(f'Неизвестный режим маршрутизации: {mode}')


def _passive_key(scenario: Scenario, path: RoutePath):
    snr = snr_passive_closed(scenario, f_bu_closed(scenario, path))
    return (-snr, path.hop_count, path.nodes)


def _unrestricted_candidates(scenario: Scenario, mode: str):
    graph = nx.Graph()
    graph.add_nodes_from(range(len(scenario.nodes)))
    graph.add_edges_from(scenario.los)
    if graph.has_edge(scenario.bs_id, scenario.user_id):
        graph.remove_edge(scenario.bs_id, scenario.user_id)
    if mode == MODE_PASSIVE:
        graph.remove_node(scenario.active_id)
    for nodes in nx.all_simple_paths(graph, scenario.bs_id, scenario.user_id):
        path = RoutePath.from_nodes(scenario, nodes[1:-1])
        if mode == MODE_HYBRID and not path.is_hybrid:
            continue
        yield path


def _monotone_candidates(scenario: Scenario, mode: str):
    if mode == MODE_PASSIVE:
        routing_graph = passive_graph(scenario)
        for nodes in nx.all_simple_paths(
            routing_graph.graph, routing_graph.source, routing_graph.sink
        ):
            yield RoutePath(tuple(nodes[1:-1]))
        return
    to_active = bs_to_active_graph(scenario)
    to_user = active_to_user_graph(scenario)
    prefixes = list(nx.all_simple_paths(
        to_active.graph, to_active.source, to_active.sink
    ))
    suffixes = list(nx.all_simple_paths(
        to_user.graph, to_user.source, to_user.sink
    ))
    for prefix, suffix in product(prefixes, suffixes):
        if set(prefix[1:-1]) & set(suffix[1:-1]):
            continue
        nodes = tuple(prefix[1:-1]) + (scenario.active_id,)
        yield RoutePath(nodes + tuple(suffix[1:-1]), len(prefix) - 2)


@time_of_function
def exhaustive_route_oracle(scenario: Scenario, mode: str,
                            monotone: bool = False) -> RoutePath:
    """
    Полный перебор маршрутов с максимизацией ОСШ.

    По умолчанию перебираются все простые пути по графу прямой
    видимости; при monotone=True - только пути, допустимые в графах
    маршрутизации. Ограничен сценариями не более чем с ORACLE_MAX_IRS IRS.
    """
    _require_mode(mode)
    if len(scenario.irs_ids) > ORACLE_MAX_IRS:
        raise InstanceTooLargeError(
            f'Перебор ограничен {ORACLE_MAX_IRS} IRS, '
            f'в сценарии {len(scenario.irs_ids)}'
        )
    if monotone:
        candidates = _monotone_candidates(scenario, mode)
    else:
        candidates = _unrestricted_candidates(scenario, mode)
    key = _hybrid_key if mode == MODE_HYBRID else _passive_key
    best = None
    best_key = None
    for path in candidates:
        current = key(scenario, path)
        if best is None or current < best_key:
            best, best_key = path, current
    if best is None:
        raise NoRouteError(f'Перебор не нашел маршрута в режиме {mode}')
    return best


def _viable_successors(graph: nx.DiGraph, node: int, sink: int) -> list:
    return sorted(
        following for following in graph.successors(node)
        if following == sink or nx.has_path(graph, following, sink)
    )


def _walk(routing_graph: RoutingGraph, choose) -> tuple[int, ...]:
    graph = routing_graph.graph
    node = routing_graph.source
    nodes = [node]
    while node != routing_graph.sink:
        options = _viable_successors(graph, node, routing_graph.sink)
        if not options:
            raise NoRouteError(
                f'Узел {routing_graph.sink} недостижим из {node}'
            )
        node = choose(graph, node, options)
        nodes.append(node)
    return tuple(nodes)


def _benchmark_route(scenario: Scenario, mode: str, choose) -> RoutePath:
    _require_mode(mode)
    if mode == MODE_PASSIVE:
        nodes = _walk(passive_graph(scenario), choose)
        path = RoutePath(nodes[1:-1])
    else:
        prefix = _walk(bs_to_active_graph(scenario), choose)
        to_user = active_to_user_graph(scenario)
        to_user.graph.remove_nodes_from(prefix[1:-1])
        suffix = _walk(to_user, choose)
        path = RoutePath(prefix[1:] + suffix[1:-1], len(prefix) - 2)
    path.validate(scenario)
    return path


def route_myopic(scenario: Scenario, mode: str) -> RoutePath:
    """Жадный маршрут: на каждом шаге ребро минимального веса."""
    def choose(graph, node, options):
        return min(options, key=lambda other: graph[node][other]['weight'])

    return _benchmark_route(scenario, mode, choose)


def route_random(scenario: Scenario, mode: str,
                 rng: np.random.Generator) -> RoutePath:
    """Случайный маршрут по тем же графам (воспроизводим при том же rng)."""
    def choose(graph, node, options):
        return options[rng.integers(len(options))]

    return _benchmark_route(scenario, mode, choose)
