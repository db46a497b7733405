import math
from dataclasses import replace
from unittest.mock import patch

import numpy as np
import pytest

from router.exceptions import (DegenerateLinkError, ScenarioParseError,
                               ScenarioValidationError, UnknownNodeError)
from router.scenario import (NodeKind, distance, factorize_elements,
                             link_angles, load_scenario, serialize_scenario,
                             validate_document)


def test_load_regression_scenario(regression_scenario):
    """Тест загрузки регрессионного сценария."""
    scenario = regression_scenario
    assert scenario.bs_id == 0
    assert scenario.user_id == 5
    assert scenario.active_id == 2
    assert scenario.passive_ids == (1, 3, 4)
    assert scenario.passive_dims == (40, 30)
    assert scenario.passive_elements == 1200
    assert scenario.active_elements == 400
    assert scenario.bs_antennas == 4


def test_load_converts_db_units(regression_scenario):
    """Тест перевода дБ и дБм в линейные единицы."""
    assert regression_scenario.reference_gain == pytest.approx(10 ** -4.6)
    assert regression_scenario.reference_gain == pytest.approx(2.512e-5,
                                                               rel=1e-3)
    assert regression_scenario.noise_user == pytest.approx(1e-11)
    assert regression_scenario.noise_amp == pytest.approx(1e-10)
    assert regression_scenario.tx_power == pytest.approx(1.0)
    assert regression_scenario.amp_power == pytest.approx(1e-3)


def test_element_spacing_defaults_to_half_wavelength(base_document, to_text):
    """Тест значения d_I по умолчанию."""
    scenario = load_scenario(to_text(base_document))
    assert scenario.element_spacing == pytest.approx(0.03)


def test_element_spacing_from_file(base_document, to_text):
    """Тест явного d_I в файле."""
    base_document['rf']['d_I_m'] = 0.025
    scenario = load_scenario(to_text(base_document))
    assert scenario.element_spacing == pytest.approx(0.025)


def test_reference_gain_derived_from_wavelength(base_document, to_text):
    """Тест вычисления β = (λ/4π)², если β не задан."""
    del base_document['rf']['beta_db']
    with patch.dict('router.scenario.config', {'beta_db': None}):
        scenario = load_scenario(to_text(base_document))
    expected = (0.06 / (4 * math.pi)) ** 2
    assert scenario.reference_gain == pytest.approx(expected)
    assert 10 * math.log10(expected) == pytest.approx(-46.4, abs=0.1)


def test_missing_rf_values_taken_from_config(base_document, to_text):
    """Тест подстановки RF-параметров по умолчанию."""
    del base_document['rf']['sigma2_dbm']
    with patch.dict('router.scenario.config', {'sigma2_dbm': -90}):
        scenario = load_scenario(to_text(base_document))
    assert scenario.noise_user == pytest.approx(1e-12)


def test_square_total_is_factorized(base_document, to_text):
    """Тест раскладки полного квадрата M в квадратную решетку."""
    base_document['nodes'][1]['array'] = {'M': 400}
    base_document['nodes'][2]['array'] = {'N': 36}
    scenario = load_scenario(to_text(base_document))
    assert scenario.passive_dims == (20, 20)
    assert scenario.node(2).dims == (6, 6)


def test_non_square_total_requires_explicit_dims(base_document, to_text):
    """Тест диагностики для M, не являющегося полным квадратом."""
    base_document['nodes'][1]['array'] = {'M': 12}
    with pytest.raises(ScenarioValidationError) as error:
        load_scenario(to_text(base_document))
    assert any(
        'unresolved_factorization' in item
        for item in error.value.diagnostics
    )


def test_duplicate_bs_is_rejected(base_document, to_text):
    """Тест диагностики второй BS."""
    base_document['nodes'][1] = {
        'id': 1, 'kind': 'bs', 'pos': [10, 5, 0], 'array': {'T': 2}
    }
    diagnostics = validate_document(to_text(base_document))
    assert any(item.startswith('bs_count') for item in diagnostics)


def test_duplicate_user_is_rejected(base_document, to_text):
    """Тест диагностики второго пользователя."""
    base_document['nodes'][1] = {'id': 1, 'kind': 'user', 'pos': [10, 5, 0]}
    diagnostics = validate_document(to_text(base_document))
    assert any(item.startswith('user_count') for item in diagnostics)


def test_missing_active_irs_is_rejected(base_document, to_text):
    """Тест диагностики сценария без активной IRS."""
    base_document['nodes'][2]['kind'] = 'passive_irs'
    base_document['nodes'][2]['array'] = {'M1': 20, 'M2': 20}
    diagnostics = validate_document(to_text(base_document))
    assert any(item.startswith('active_irs_count') for item in diagnostics)


def test_passive_dims_must_match(base_document, to_text):
    """Тест диагностики пассивных IRS с разными решетками."""
    base_document['nodes'].insert(3, {
        'id': 3,
        'kind': 'passive_irs',
        'pos': [15, 8, 0],
        'array': {'M1': 10, 'M2': 10}
    })
    base_document['nodes'][4]['id'] = 4
    base_document['los'] = [[0, 1], [1, 4], [0, 2], [2, 4], [1, 3]]
    diagnostics = validate_document(to_text(base_document))
    assert any(item.startswith('passive_dims_mismatch')
               for item in diagnostics)


def test_asymmetric_los_matrix_is_rejected(base_document, to_text):
    """Тест диагностики несимметричной матрицы прямой видимости."""
    del base_document['los']
    base_document['los_matrix'] = [
        [0, 1, 1, 0],
        [0, 0, 0, 1],
        [1, 0, 0, 1],
        [0, 1, 1, 0]
    ]
    diagnostics = validate_document(to_text(base_document))
    assert diagnostics == ['asymmetric_los: s[0][1] != s[1][0]']


def test_los_matrix_self_loop_is_rejected(base_document, to_text):
    """Тест диагностики ненулевой диагонали матрицы прямой видимости."""
    del base_document['los']
    base_document['los_matrix'] = [
        [0, 1, 1, 0],
        [1, 1, 0, 1],
        [1, 0, 0, 1],
        [0, 1, 1, 0]
    ]
    diagnostics = validate_document(to_text(base_document))
    assert any(item.startswith('los_self_loop') for item in diagnostics)


def test_symmetric_los_matrix_is_accepted(base_document, to_text):
    """Тест загрузки корректной матрицы прямой видимости."""
    pairs = base_document.pop('los')
    base_document['los_matrix'] = [[0] * 4 for _ in range(4)]
    for first, second in pairs:
        base_document['los_matrix'][first][second] = 1
        base_document['los_matrix'][second][first] = 1
    scenario = load_scenario(to_text(base_document))
    assert scenario.los == frozenset({(0, 1), (1, 3), (0, 2), (2, 3)})


def test_coincident_positions_are_rejected(base_document, to_text):
    """Тест диагностики совпадающих координат."""
    base_document['nodes'][2]['pos'] = [10, 5, 0]
    diagnostics = validate_document(to_text(base_document))
    assert any(item.startswith('coincident_positions')
               for item in diagnostics)


def test_all_diagnostics_are_collected(base_document, to_text):
    """Тест сбора всех нарушений сразу."""
    base_document['nodes'][2]['pos'] = [10, 5, 0]
    base_document['rf']['lambda_m'] = -1
    diagnostics = validate_document(to_text(base_document))
    assert len(diagnostics) >= 2
    with pytest.raises(ScenarioValidationError) as error:
        load_scenario(to_text(base_document))
    assert error.value.diagnostics == diagnostics


def test_valid_document_has_no_diagnostics(base_document, to_text):
    """Тест валидного документа."""
    assert validate_document(to_text(base_document)) == []


def test_malformed_json_is_parse_error():
    """Тест синтаксически некорректного файла."""
    with pytest.raises(ScenarioParseError):
        load_scenario('{"rf": ')
    assert validate_document('{"rf": ')[0].startswith('parse_error')


def test_unknown_node_kind_is_parse_error(base_document, to_text):
    """Тест неизвестного типа узла."""
    base_document['nodes'][1]['kind'] = 'relay'
    with pytest.raises(ScenarioParseError):
        load_scenario(to_text(base_document))


def test_self_loop_pair_is_rejected(base_document, to_text):
    """Тест пары прямой видимости узла с самим собой."""
    base_document['los'].append([1, 1])
    diagnostics = validate_document(to_text(base_document))
    assert any(item.startswith('los_self_loop') for item in diagnostics)


def test_direct_construction_is_validated(single_irs_scenario):
    """Тест проверки инвариантов при прямом создании сценария."""
    with pytest.raises(ScenarioValidationError):
        replace(single_irs_scenario, tx_power=0.0)
    with pytest.raises(ScenarioValidationError):
        replace(single_irs_scenario, los=frozenset({(1, 1)}))


def test_serialize_round_trip(regression_scenario):
    """Тест обратимости сериализации сценария."""
    restored = load_scenario(serialize_scenario(regression_scenario))
    assert restored.nodes == regression_scenario.nodes
    assert restored.los == regression_scenario.los
    for name in (
        'wavelength',
        'element_spacing',
        'reference_gain',
        'noise_user',
        'noise_amp',
        'tx_power',
        'amp_power'
    ):
        assert getattr(restored, name) == pytest.approx(
            getattr(regression_scenario, name), rel=1e-12
        )


def test_serialize_round_trip_random(scenario_factory, rng):
    """Тест обратимости сериализации случайных сценариев."""
    for _ in range(20):
        scenario = scenario_factory(rng, 5, los_probability=0.5)
        restored = load_scenario(serialize_scenario(scenario))
        assert restored.nodes == scenario.nodes
        assert restored.los == scenario.los
        assert restored.amp_power == pytest.approx(scenario.amp_power)


@pytest.mark.parametrize('count, expected', [
    (400, (20, 20)),
    (1200, (40, 30)),
    (12, (4, 3)),
    (7, (7, 1)),
    (1, (1, 1))
])
def test_factorize_elements(count, expected):
    """Тест раскладки числа элементов в решетку."""
    assert factorize_elements(count) == expected


def test_factorize_rejects_zero():
    """Тест раскладки нулевого числа элементов."""
    with pytest.raises(ScenarioValidationError):
        factorize_elements(0)


def test_with_methods_return_copies(regression_scenario):
    """Тест неизменяемых копий сценария."""
    changed = regression_scenario.with_passive_elements(400)
    assert changed.passive_dims == (20, 20)
    assert regression_scenario.passive_dims == (40, 30)
    assert all(
        changed.node(node).dims == (20, 20) for node in changed.passive_ids
    )
    assert regression_scenario.with_active_elements(
        100
    ).active_elements == 100
    assert regression_scenario.with_amp_power(2.0).amp_power == 2.0


def test_los_matrix_is_symmetric(regression_scenario):
    """Тест симметрии матрицы прямой видимости."""
    matrix = regression_scenario.los_matrix()
    assert (matrix == matrix.T).all()
    assert not matrix.diagonal().any()
    assert regression_scenario.has_los(5, 3)
    assert not regression_scenario.has_los(0, 5)


def test_irs_ids_exclude_bs_and_user(regression_scenario):
    """Тест списка IRS без BS и пользователя."""
    assert regression_scenario.irs_ids == (1, 2, 3, 4)
    assert regression_scenario.active_id in regression_scenario.irs_ids


def test_distance_three_four_five(base_document, to_text):
    """Тест расстояния на египетском треугольнике."""
    base_document['nodes'][1]['pos'] = [3, 4, 0]
    scenario = load_scenario(to_text(base_document))
    assert distance(scenario, 0, 1) == pytest.approx(5.0)
    assert distance(scenario, 1, 0) == pytest.approx(5.0)


def test_distance_matches_coordinates(scenario_factory, rng):
    """Тест расстояния против пересчета по координатам."""
    scenario = scenario_factory(rng, 6)
    for first in range(len(scenario.nodes)):
        for second in range(len(scenario.nodes)):
            if first == second:
                continue
            delta = [
                a - b for a, b in zip(
                    scenario.node(first).position,
                    scenario.node(second).position
                )
            ]
            expected = math.sqrt(sum(value ** 2 for value in delta))
            assert distance(scenario, first, second) == pytest.approx(
                expected
            )
            assert distance(scenario, first, second) == distance(
                scenario, second, first
            )


def test_distance_errors(single_irs_scenario):
    """Тест ошибок при запросе расстояния."""
    with pytest.raises(UnknownNodeError):
        distance(single_irs_scenario, 0, 10)
    with pytest.raises(DegenerateLinkError):
        distance(single_irs_scenario, 1, 1)


def test_link_angles_axis_aligned(base_document, to_text):
    """Тест углов для направлений вдоль осей."""
    base_document['nodes'][1]['pos'] = [0, 0, 1]
    base_document['nodes'][2]['pos'] = [1, 0, 0]
    scenario = load_scenario(to_text(base_document))
    azimuth, elevation = link_angles(scenario, 0, 1)
    assert elevation == pytest.approx(0.0)
    assert azimuth == pytest.approx(0.0)
    azimuth, elevation = link_angles(scenario, 0, 2)
    assert elevation == pytest.approx(math.pi / 2)
    assert azimuth == pytest.approx(0.0)


def test_link_angles_antipodal(scenario_factory, rng):
    """Тест противоположности углов выхода и прихода."""
    scenario = scenario_factory(rng, 6)
    for first in range(len(scenario.nodes)):
        for second in range(first + 1, len(scenario.nodes)):
            azimuth_t, elevation_t = link_angles(scenario, first, second)
            azimuth_r, elevation_r = link_angles(scenario, second, first)
            assert elevation_r == pytest.approx(math.pi - elevation_t)
            assert np.exp(1j * azimuth_r) == pytest.approx(
                -np.exp(1j * azimuth_t)
            )
            assert -math.pi < azimuth_t <= math.pi


def test_node_kinds(single_irs_scenario):
    """Тест типов узлов сценария."""
    kinds = [node.kind for node in single_irs_scenario.nodes]
    assert kinds == [
        NodeKind.BS,
        NodeKind.PASSIVE_IRS,
        NodeKind.ACTIVE_IRS,
        NodeKind.USER
    ]
