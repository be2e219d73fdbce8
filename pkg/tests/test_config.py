import dataclasses

import pytest
from hypothesis import given, strategies as st

from edgelab.config import (
    CharacteristicsConfig, CouplingConfig, NullRateConfig, RigidityConfig, SeparableConfig, UniversalityConfig, dump,
    load, load_file,
)

ALL = [NullRateConfig, UniversalityConfig, RigidityConfig, CouplingConfig, CharacteristicsConfig, SeparableConfig]


@pytest.mark.parametrize("cls", ALL)
def test_defaults_round_trip(cls):
    cfg = cls()
    assert load(cls, dump(cfg)) == cfg


@given(st.floats(min_value=1e-3, max_value=1.0), st.lists(st.integers(2, 5000), min_size=1, max_size=6),
       st.integers(0, 2**31))
def test_round_trip_is_lossless(xi, ns, seed):
    cfg = NullRateConfig(xi=xi, ns=tuple(ns), seed=seed)
    assert load(NullRateConfig, dump(cfg)) == cfg


def test_wrong_kind_and_fields():
    with pytest.raises(ValueError, match="expected"):
        load(SeparableConfig, dump(NullRateConfig()))
    with pytest.raises(ValueError, match="bogus"):
        load(NullRateConfig, '{"bogus": 1}')


def test_frozen_and_missing_file(tmp_path):
    with pytest.raises(dataclasses.FrozenInstanceError):
        NullRateConfig().xi = 0.5
    with pytest.raises(FileNotFoundError, match="absent.json"):
        load_file(NullRateConfig, tmp_path / "absent.json")
    path = tmp_path / "c.json"
    path.write_text(dump(CouplingConfig(runs=3)))
    assert load_file(CouplingConfig, path).runs == 3
