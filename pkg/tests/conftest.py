import copy
import json
import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(
    os.path.join(os.path.dirname(__file__), '..')))

from router.beamforming import RoutePath  # noqa: E402
from router.constants import RANDOM_SEED  # noqa: E402
from router.scenario import (NodeKind, NodeSpec, Scenario,  # noqa: E402
                             load_scenario)
from router.utils import db_to_linear, dbm_to_watts  # noqa: E402

SCENARIOS_DIR = Path(__file__).resolve().parent.parent / 'scenarios'

BASE_DOCUMENT = {
    'rf': {
        'lambda_m': 0.06,
        'beta_db': -46,
        'sigma2_dbm': -80,
        'sigmaF2_dbm': -70,
        'PB_dbm': 30,
        'PF_dbm': 10
    },
    'nodes': [
        {'id': 0, 'kind': 'bs', 'pos': [0, 0, 0], 'array': {'T': 4}},
        {
            'id': 1,
            'kind': 'passive_irs',
            'pos': [10, 5, 0],
            'array': {'M1': 20, 'M2': 20}
        },
        {
            'id': 2,
            'kind': 'active_irs',
            'pos': [10, -5, 0],
            'array': {'N1': 10, 'N2': 10}
        },
        {'id': 3, 'kind': 'user', 'pos': [20, 0, 0]}
    ],
    'los': [[0, 1], [1, 3], [0, 2], [2, 3]]
}


@pytest.fixture
def base_document():
    """Фикстура с минимальным валидным документом сценария."""
    return copy.deepcopy(BASE_DOCUMENT)


@pytest.fixture
def to_text():
    """Фикстура, сериализующая документ в json."""
    return json.dumps


@pytest.fixture
def regression_path():
    return SCENARIOS_DIR / 'regression.json'


@pytest.fixture
def regression_scenario(regression_path):
    """Фикстура с регрессионной топологией."""
    return load_scenario(regression_path.read_text(encoding='utf-8'))


@pytest.fixture
def single_irs_path():
    return SCENARIOS_DIR / 'single_irs.json'


@pytest.fixture
def single_irs_scenario(single_irs_path):
    """Фикстура со сценарием из одной пассивной и одной активной IRS."""
    return load_scenario(single_irs_path.read_text(encoding='utf-8'))


@pytest.fixture
def rng():
    """Фикстура с воспроизводимым генератором случайных чисел."""
    return np.random.default_rng(RANDOM_SEED)


def build_random_scenario(rng, irs_count, los_probability=1.0,
                          sides=(2, 3, 4), max_antennas=4):
    """Случайный сценарий без прямой видимости BS -> пользователь."""
    user_id = irs_count + 1
    positions = rng.uniform(
        [0.0, -20.0, 0.0], [60.0, 20.0, 10.0], size=(irs_count + 2, 3)
    )
    active_id = int(rng.integers(1, irs_count + 1))
    passive_dims = (int(rng.choice(sides)), int(rng.choice(sides)))
    active_dims = (int(rng.choice(sides)), int(rng.choice(sides)))
    nodes = [
        NodeSpec(
            0,
            NodeKind.BS,
            tuple(positions[0]),
            (int(rng.integers(1, max_antennas + 1)), 1)
        )
    ]
    for node_id in range(1, irs_count + 1):
        if node_id == active_id:
            kind, dims = NodeKind.ACTIVE_IRS, active_dims
        else:
            kind, dims = NodeKind.PASSIVE_IRS, passive_dims
        nodes.append(NodeSpec(node_id, kind, tuple(positions[node_id]), dims))
    nodes.append(
        NodeSpec(user_id, NodeKind.USER, tuple(positions[user_id]), (1, 1))
    )
    los = frozenset(
        (first, second)
        for first in range(user_id + 1)
        for second in range(first + 1, user_id + 1)
        if (first, second) != (0, user_id)
        and rng.random() < los_probability
    )
    return Scenario(
        nodes=tuple(nodes),
        los=los,
        wavelength=0.06,
        element_spacing=0.03,
        reference_gain=db_to_linear(-46),
        noise_user=dbm_to_watts(-80),
        noise_amp=dbm_to_watts(-70),
        tx_power=dbm_to_watts(30),
        amp_power=dbm_to_watts(float(rng.uniform(-10, 20)))
    )


def build_random_path(rng, scenario, hybrid, max_length=4):
    """Случайный маршрут по сценарию с полной прямой видимостью."""
    passives = list(scenario.passive_ids)
    if hybrid:
        length = int(rng.integers(0, min(max_length - 1, len(passives)) + 1))
        chosen = [int(node) for node in rng.permutation(passives)[:length]]
        chosen.insert(int(rng.integers(0, length + 1)), scenario.active_id)
    else:
        length = int(rng.integers(1, min(max_length, len(passives)) + 1))
        chosen = [int(node) for node in rng.permutation(passives)[:length]]
    return RoutePath.from_nodes(scenario, chosen)


@pytest.fixture
def scenario_factory():
    """Фикстура-фабрика случайных сценариев."""
    return build_random_scenario


@pytest.fixture
def path_factory():
    """Фикстура-фабрика случайных маршрутов."""
    return build_random_path
