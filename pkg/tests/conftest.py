import numpy as np
import pytest

from mecrelay._core import available_backends
from mecrelay.config import RunConfig
from mecrelay.model import ChannelSet, RadioParams, Scenario, TaskSpec, validate

# sigma = -174 dBm/Hz, I_b = -150 dBm/Hz, combined (frozen reference value)
FLOOR_PSD = 1.0039810717055350e-18


@pytest.fixture(scope="session")
def radio() -> RadioParams:
    return RunConfig().radio_params()


@pytest.fixture(params=sorted(available_backends()))
def backend(request):
    """Run a test against every importable kernel backend."""
    return available_backends()[request.param]


@pytest.fixture(scope="session")
def compiled_available() -> bool:
    return "compiled" in available_backends()


def make_scenario(radio: RadioParams, gains, data_bits=1.25e6,
                  cycles_per_bit=1750.0, deadline=0.6, server_speed=40e9,
                  g_self=1e-11, g_cross=None) -> Scenario:
    gains = tuple(gains)
    if len(gains) == 3:
        channels = ChannelSet.three_hop(
            *gains, self_interference_gain=g_self,
            cross_interference_gain=g_cross if g_cross is not None else gains[2] * 0.3)
    elif len(gains) == 2:
        channels = ChannelSet.two_hop(*gains)
    else:
        channels = ChannelSet.single_hop(gains[0])
    task = TaskSpec(data_bits, cycles_per_bit, deadline, server_speed)
    return validate(radio, task, channels)


def random_scenarios(radio: RadioParams, n: int, seed: int, nhops: int = 3,
                     gain_range=(-10.5, -8.5), deadline_range=(0.15, 1.0)):
    """Seeded stream of validated scenarios in the evaluation regime."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        gains = 10 ** rng.uniform(*gain_range, size=nhops)
        data = rng.uniform(0.5e6, 2e6)
        cycles = rng.uniform(1500, 2000)
        deadline = rng.uniform(*deadline_range)
        g_cross = 10 ** rng.uniform(-12, -10)
        task = TaskSpec(data, cycles, deadline, 40e9)
        if task.compute_delay() >= deadline:
            continue
        out.append(make_scenario(radio, gains, data, cycles, deadline,
                                 g_cross=g_cross))
    return out
