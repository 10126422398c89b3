import pytest

from pedgraph.config import PipelineConfig
from pedgraph.synth import CityParams, evaluate_pipeline, generate_city


@pytest.fixture(scope="session")
def noiseless_city():
    return generate_city(CityParams(blocks_x=5, blocks_y=5, noise_sigma=0.0, seed=0))


@pytest.fixture(scope="session")
def noiseless_build(noiseless_city):
    scorecard, result = evaluate_pipeline(noiseless_city)
    return scorecard, result


@pytest.fixture(scope="session")
def plane_city():
    return generate_city(
        CityParams(blocks_x=5, blocks_y=5, elevation_model="plane", plane_slope=0.03, seed=1)
    )


@pytest.fixture(scope="session")
def plane_build(plane_city):
    scorecard, result = evaluate_pipeline(plane_city)
    return scorecard, result


@pytest.fixture(scope="session")
def default_config():
    return PipelineConfig()
