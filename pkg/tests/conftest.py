"""Shared expensive fixtures: tessellation data reused across test modules.

Tracing every coperiodic ray of a region takes seconds; the co-landing
structures, face decompositions, and face portraits are immutable, so
one session-wide copy serves all consumers.
"""

import pytest

from cubicrays.tessellation import build_faces, colanding_pairs, face_portrait


@pytest.fixture(scope="session")
def col_e1_q2():
    return colanding_pairs("E1", 2)


@pytest.fixture(scope="session")
def col_e2b_q2():
    return colanding_pairs("E2B", 2)


@pytest.fixture(scope="session")
def col_e2d_q2():
    return colanding_pairs("E2D", 2)


@pytest.fixture(scope="session")
def tess_e1_q2(col_e1_q2):
    return build_faces("E1", 2, colanding=col_e1_q2)


@pytest.fixture(scope="session")
def tess_e2b_q2(col_e2b_q2, col_e2d_q2):
    return build_faces("E2B", 2, colanding=col_e2b_q2, sibling=col_e2d_q2)


@pytest.fixture(scope="session")
def tess_e2d_q2(col_e2d_q2, col_e2b_q2):
    return build_faces("E2D", 2, colanding=col_e2d_q2, sibling=col_e2b_q2)


@pytest.fixture(scope="session")
def portraits_e1_q2(tess_e1_q2):
    return {f.index: face_portrait(tess_e1_q2, f) for f in tess_e1_q2.faces}


@pytest.fixture(scope="session")
def portraits_e2b_q2(tess_e2b_q2):
    return {f.index: face_portrait(tess_e2b_q2, f) for f in tess_e2b_q2.faces}


@pytest.fixture(scope="session")
def col_e1_q3():
    return colanding_pairs("E1", 3)


@pytest.fixture(scope="session")
def col_e2b_q3():
    return colanding_pairs("E2B", 3)


@pytest.fixture(scope="session")
def col_e2d_q3():
    return colanding_pairs("E2D", 3)
