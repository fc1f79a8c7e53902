import numpy as np
import pytest
from hypothesis import settings

from gdsplit import CAT_MATRIX, build_rotation, build_toral, example_3_1, splitting_from_terms
from gdsplit.systems import ProductSystem

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

E12 = ([("factor", "g"), ("stable", "h")], [("unstable", "h")])
E2 = ([("stable", "h")], [("factor", "g"), ("unstable", "h")])
E1 = ([("factor", "g")], [("stable", "h"), ("unstable", "h")])


@pytest.fixture(scope="session")
def ex31():
    return example_3_1()


@pytest.fixture(scope="session")
def ex31_splittings(ex31):
    return {name: splitting_from_terms(ex31, *terms, label=name)
            for name, terms in (("E12_F3", E12), ("E2_F13", E2), ("E1_F23", E1))}


@pytest.fixture(scope="session")
def cat():
    return ProductSystem([("h", build_toral(CAT_MATRIX))])


@pytest.fixture(scope="session")
def cat_split(cat):
    return splitting_from_terms(cat, [("stable", "h")], [("unstable", "h")])


@pytest.fixture(scope="session")
def rot2():
    return ProductSystem([("r", build_rotation([(np.sqrt(5) - 1) / 2, np.sqrt(2) - 1], "known-minimal"))])


@pytest.fixture(scope="session")
def rot2_split(rot2):
    return splitting_from_terms(rot2, [("axis", "r", 0)], [("axis", "r", 1)])
