import numpy as np
import pytest

from poolscale.core_data import LossCell, LossMatrix, ModelMeta


def make_matrix(loss_rows, params, families=None, token_counts=None):
    """Build a LossMatrix from a dense loss array plus per-model params/families.

    loss_rows: (n_models, n_texts) array-like of summed losses.
    token_counts: scalar or same-shape array; defaults to 10 everywhere.
    """
    loss_rows = np.asarray(loss_rows, dtype=float)
    n_models, n_texts = loss_rows.shape
    if families is None:
        families = ["fam"] * n_models
    if token_counts is None:
        token_counts = np.full((n_models, n_texts), 10, dtype=int)
    elif np.isscalar(token_counts):
        token_counts = np.full((n_models, n_texts), int(token_counts), dtype=int)
    else:
        token_counts = np.asarray(token_counts, dtype=int)

    models = [ModelMeta(f"m{i}", families[i], float(params[i])) for i in range(n_models)]
    texts = [f"t{j}" for j in range(n_texts)]
    cells = {
        (f"m{i}", f"t{j}"): LossCell(float(loss_rows[i, j]), int(token_counts[i, j]))
        for i in range(n_models)
        for j in range(n_texts)
    }
    return LossMatrix(models, texts, cells)


def random_matrix(rng, n_models=None, n_texts=None, max_models=10, max_texts=50):
    n_models = n_models or int(rng.integers(2, max_models + 1))
    n_texts = n_texts or int(rng.integers(2, max_texts + 1))
    loss = rng.uniform(0.5, 30.0, size=(n_models, n_texts))
    params = rng.uniform(0.1, 80.0, size=n_models)
    counts = rng.integers(1, 200, size=(n_models, n_texts))
    families = [f"f{int(x)}" for x in rng.integers(0, 3, size=n_models)]
    return make_matrix(loss, params, families, counts)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
