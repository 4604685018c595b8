import pytest

from qcanon.cartan import parse_quiver_dict


@pytest.fixture
def a1_d3():
    return parse_quiver_dict({"vertices": ["1"], "edges": [],
                              "highest_weight": {"1": 3}})


@pytest.fixture
def a1_d2():
    return parse_quiver_dict({"vertices": ["1"], "edges": [],
                              "highest_weight": {"1": 2}})


@pytest.fixture
def a2_fund():
    return parse_quiver_dict({"vertices": ["1", "2"], "edges": [["1", "2"]],
                              "highest_weight": {"1": 1, "2": 0}})


@pytest.fixture
def a2_adjoint():
    return parse_quiver_dict({"vertices": ["1", "2"], "edges": [["1", "2"]],
                              "highest_weight": {"1": 1, "2": 1}})


@pytest.fixture
def kronecker():
    return parse_quiver_dict({"vertices": ["1", "2"],
                              "edges": [["1", "2"], ["1", "2"]],
                              "highest_weight": {"1": 1, "2": 0}})
