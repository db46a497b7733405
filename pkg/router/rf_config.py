import os

from dotenv import load_dotenv

load_dotenv()

"""
Радиочастотные параметры по умолчанию.

Используются, если файл сценария не содержит соответствующего ключа в
разделе `rf`. Значения загружаются из переменных окружения:
- IRS_LAMBDA_M (длина волны, м)
- IRS_BETA_DB (опорное усиление канала на 1 м, дБ)
- IRS_SIGMA2_DBM (шум на приемнике пользователя, дБм)
- IRS_SIGMAF2_DBM (шум усиления активной IRS, дБм)
- IRS_PB_DBM (мощность передатчика BS, дБм)
- IRS_PF_DBM (мощность усиления активной IRS, дБм)

Если IRS_BETA_DB не задана, β вычисляется из длины волны как (λ/4π)².
Шаг элементов d_I по умолчанию равен λ/2.

Пример переменных окружения:
IRS_LAMBDA_M=0.06
IRS_BETA_DB=-46
IRS_PF_DBM=10
"""
config = {
    'lambda_m': float(os.getenv('IRS_LAMBDA_M', 0.06)),
    'beta_db': (
        float(os.getenv('IRS_BETA_DB'))
        if os.getenv('IRS_BETA_DB') is not None else None
    ),
    'sigma2_dbm': float(os.getenv('IRS_SIGMA2_DBM', -80.0)),
    'sigmaF2_dbm': float(os.getenv('IRS_SIGMAF2_DBM', -70.0)),
    'PB_dbm': float(os.getenv('IRS_PB_DBM', 30.0)),
    'PF_dbm': float(os.getenv('IRS_PF_DBM', 10.0)),
}
"""Словарь RF-параметров по умолчанию."""
