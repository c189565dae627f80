import pytest

import adrcsim as a


@pytest.fixture(scope="session")
def bench():
    """Lazily run and cache the built-in scenarios (each ~2 s of wall time)."""
    cache: dict[str, tuple] = {}

    def get(name: str):
        if name not in cache:
            cache[name] = a.run_scenario(a.get_scenario(name))
        return cache[name]

    return get


@pytest.fixture(scope="session")
def observer_rig():
    """Open-loop motor (constant 6 V) with an ESO watching, per observer kind."""
    cache: dict[str, tuple] = {}

    def get(kind: str):
        if kind not in cache:
            cache[kind] = a.run_observer_rig(
                a.PlantParams.nominal(),
                a.ObserverSpec(kind=kind),
                voltage=lambda t: 6.0,
                grid=a.TimeGrid(0.0, 10.0, 1e-4),
            )
        return cache[kind]

    return get
