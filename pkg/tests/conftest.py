import os

import pytest

from gastrans import network

SCENARIO_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..",
                            "scenarios")


def load_scenario(name: str) -> network.ScenarioConfig:
    with open(os.path.join(SCENARIO_DIR, name), "r", encoding="utf-8") as fh:
        return network.parse_scenario(fh.read())


@pytest.fixture(scope="session")
def single_cfg() -> network.ScenarioConfig:
    return load_scenario("single_pipeline.toml")


@pytest.fixture(scope="session")
def six_cfg() -> network.ScenarioConfig:
    return load_scenario("six_node.toml")
