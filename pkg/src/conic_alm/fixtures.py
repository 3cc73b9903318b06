"""Builtin problem instances used by the demos, tests, and command line.

``example-d1`` is a 2x2 SDP with a certified rank-one solution on each side,
zero optimal value, and quadratic (but provably not sharp) growth of its
penalized dual function; it exercises nearly every check in the package.

The ``maxcut-g*-20`` fixtures are 20-vertex unit-weight random graphs, frozen
here as edge lists, standing in for the first 20x20 principal submatrices of
the classic Gset max-cut graphs (fetching those over the network is out of
scope; only convergence behavior is asserted on them, never optimal values).

``svm-random`` and ``lasso-random`` are seeded random instances at the usual
benchmark dimensions (100 samples, 10 features, unit regularization).
"""

import numpy as np

from .model import (KnownSolutionInstance, SdpProblem, lasso_instance,
                    maxcut_instance, svm_instance, synth_known_solution)

# Frozen unit-weight edge lists (upper triangle, 0-based) for the three
# 20-vertex max-cut fixtures.
_GRAPH_EDGES = {
    "maxcut-g1-20": [
        (0, 13), (1, 2), (2, 14), (2, 17), (3, 18), (3, 19), (4, 7), (5, 9),
        (5, 16), (6, 14), (8, 15), (10, 14), (11, 17), (12, 14),
    ],
    "maxcut-g2-20": [
        (0, 5), (1, 4), (1, 10), (2, 5), (3, 7), (3, 18), (4, 6), (4, 12),
        (5, 11), (5, 17), (7, 13), (8, 14), (8, 16), (9, 15), (15, 19),
    ],
    "maxcut-g3-20": [
        (0, 17), (0, 18), (1, 3), (1, 8), (1, 9), (2, 6), (2, 7), (2, 10),
        (4, 12), (5, 15), (6, 13), (7, 16), (10, 17), (11, 12), (14, 19),
        (16, 17),
    ],
}

SVM_SEED = 2024
LASSO_SEED = 2025


def toy_rank1_instance():
    """The 2x2 certified instance behind the ``example-d1`` builtin.

    Data: C = [[1, -1], [-1, 1]], the two constraints pin the diagonal of X
    to (1, 1). The unique solutions are X* = [[1, 1], [1, 1]], y* = 0,
    Z* = C, with optimal value 0 and rank(X*) + rank(Z*) = 2.
    """
    C = np.array([[1.0, -1.0], [-1.0, 1.0]])
    mats = np.zeros((2, 2, 2))
    mats[0, 0, 0] = 1.0
    mats[1, 1, 1] = 1.0
    b = np.array([1.0, 1.0])
    problem = SdpProblem(C=C, constraint_mats=mats, b=b, name="example-d1")
    x_star = np.array([[1.0, 1.0], [1.0, 1.0]])
    return KnownSolutionInstance(problem=problem, x_star=x_star,
                                 y_star=np.zeros(2), z_star=C.copy(), p_star=0.0)


def fixture_graph(name):
    """Weight matrix of one of the frozen 20-vertex graphs."""
    edges = _GRAPH_EDGES[name]
    W = np.zeros((20, 20))
    for i, j in edges:
        W[i, j] = 1.0
        W[j, i] = 1.0
    return W


def maxcut_fixture(name):
    return maxcut_instance(fixture_graph(name), name=name)


def svm_fixture(m=100, d=10, lam=1.0, seed=SVM_SEED):
    """Seeded random linear-SVM instance (labels balanced by a fair coin)."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, d))
    labels = rng.choice([-1.0, 1.0], size=m)
    return svm_instance(A, labels, lam, name=f"svm-random-{m}x{d}")


def lasso_fixture(m=100, d=10, lam=1.0, seed=LASSO_SEED):
    """Seeded random lasso instance with a planted sparse signal."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, d))
    x_true = np.zeros(d)
    x_true[: max(1, d // 3)] = rng.standard_normal(max(1, d // 3))
    b = A @ x_true + 0.1 * rng.standard_normal(m)
    return lasso_instance(A, b, lam, name=f"lasso-random-{m}x{d}")


# Grid registries used by the verification CLI; "fig-d1" is the square
# [-1, 1]^2 region on which the toy instance's penalized dual grows with
# constant at least 0.3.
GRIDS = {
    "fig-d1": np.linspace(-1.0, 1.0, 41),
}

SDP_BUILTINS = ("example-d1", "maxcut-g1-20", "maxcut-g2-20", "maxcut-g3-20", "synth")
INEQ_BUILTINS = ("svm-random", "lasso-random")


def load_builtin(name, n=5, m=6, rank_x=2, seed=0):
    """Instantiate a builtin by registry name.

    Returns a KnownSolutionInstance for ``example-d1`` and ``synth``, an
    SdpProblem for the max-cut fixtures, and an IneqProblem for the rest.
    """
    if name == "example-d1":
        return toy_rank1_instance()
    if name == "synth":
        return synth_known_solution(n=n, m=m, rank_x=rank_x, seed=seed)
    if name in _GRAPH_EDGES:
        return maxcut_fixture(name)
    if name == "svm-random":
        return svm_fixture(seed=seed if seed else SVM_SEED)
    if name == "lasso-random":
        return lasso_fixture(seed=seed if seed else LASSO_SEED)
    raise KeyError(f"unknown builtin instance {name!r}")
