import pytest


class ScriptedRng:
    """Deterministic stand-in for the slot-choice RNG stream."""

    def __init__(self, values):
        self.values = list(values)

    def integers(self, n):
        if not self.values:
            return 0
        return self.values.pop(0) % n


@pytest.fixture
def scripted_rng():
    return ScriptedRng
