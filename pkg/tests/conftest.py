import numpy as np
import pytest

from epvaudit.cohort import reconstruct_anchor_cohort
from epvaudit.scale import Assessment, ItemResponse, builtin_scale


@pytest.fixture(scope="session")
def epv():
    return builtin_scale("epv")


@pytest.fixture(scope="session")
def epv_r():
    return builtin_scale("epv-r")


@pytest.fixture(scope="session")
def anchors_dist():
    return reconstruct_anchor_cohort()


def make_assessment(points_by_id: dict, case_id: str = "t") -> Assessment:
    """points_by_id maps item id -> points or None; ids 1..20 filled with 0
    when absent."""
    responses = tuple(
        ItemResponse(i, points_by_id.get(i, 0)) for i in range(1, 21)
    )
    return Assessment(case_id=case_id, responses=responses)


def random_assessment(rng: np.random.Generator, scale) -> Assessment:
    """Uniformly random points per item with an independent 25% missing
    chance, re-rolled if everything came out missing."""
    while True:
        responses = []
        any_answered = False
        for item in scale.items:
            if rng.random() < 0.25:
                responses.append(ItemResponse(item.id, None))
            else:
                responses.append(
                    ItemResponse(item.id, int(rng.integers(0, item.max_points + 1)))
                )
                any_answered = True
        if any_answered:
            return Assessment(case_id="r", responses=tuple(responses))
