'''
Module for testing the learners, prediction and model files.

Created on 19-10-2026
@author: Harry New

'''
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import entropy as scipy_entropy

from app.core.errors import AbsenceError, DivergenceError, EmptyDatasetError, EncodingError, HyperparamError
from app.learners import (
    fit, hyperparams_from_candidate, load_model, predict, predict_batch, save_model,
)
from app.learners.c45 import (
    C45Hyperparams, TreeNode, best_split, c45_prune, estimated_errors, grow_tree, pessimistic_errors,
)
from app.learners.decision_table import loo_accuracy
from app.learners.forest import ForestModel
from app.learners.kde_nb import bandwidth
from app.learners.network import MlpHyperparams, init_state, loss_and_gradients, mlp_backprop_step
from app.models import FeatureSet, LabeledDataset, LEARNER_KINDS
from app.tests.utils.utils import FAST_HYPERPARAMS, make_feature_set, random_feature_set

# - - - - - - - - - - - - - - - - - - -
# SHARED CONTRACT TESTS.

@pytest.mark.parametrize("kind", LEARNER_KINDS)
def test_noiseless_single_feature(kind: str, noiseless: FeatureSet):
    """
    Test every learner fits a noiseless single-feature set perfectly.

    Args:
        kind (str): Learner kind.
        noiseless (FeatureSet): Label equals the only feature.
    """
    # Train.
    model = fit(kind, noiseless, FAST_HYPERPARAMS.get(kind), 1)

    # Check training accuracy.
    assert np.array_equal(predict_batch(model, noiseless), noiseless.y)


@pytest.mark.parametrize("kind", LEARNER_KINDS)
def test_single_class(kind: str):
    """
    Test a learner trained on one class predicts that class everywhere.

    Args:
        kind (str): Learner kind.
    """
    # Everyone present.
    rng = np.random.default_rng(2)
    features = random_feature_set(rng, 40)
    features = features.model_copy(update={"y": np.zeros(40, dtype=np.int64)})

    # Train and predict.
    model = fit(kind, features, FAST_HYPERPARAMS.get(kind), 3)
    assert predict_batch(model, random_feature_set(rng, 20)).tolist() == [0] * 20


@pytest.mark.parametrize("kind", LEARNER_KINDS)
def test_empty_dataset(kind: str):
    """
    Test training on zero rows raises instead of returning a constant model.

    Args:
        kind (str): Learner kind.
    """
    features = random_feature_set(np.random.default_rng(3), 10).subset(np.array([], dtype=np.int64))
    assert len(features) == 0
    with pytest.raises(EmptyDatasetError):
        fit(kind, features, FAST_HYPERPARAMS.get(kind))


@pytest.mark.parametrize("kind", LEARNER_KINDS)
def test_save_load_model(kind: str, tmp_path: Path):
    """
    Test a saved model loads back with identical predictions.

    Args:
        kind (str): Learner kind.
        tmp_path (Path): Temporary directory.
    """
    # Train.
    rng = np.random.default_rng(4)
    features = random_feature_set(rng, 80)
    hyperparams = {**FAST_HYPERPARAMS.get(kind, {})}
    if kind in ("mlp", "deep_nn"):
        hyperparams["epochs"] = 20
    model = fit(kind, features, hyperparams, 5)

    # Save and load.
    path = save_model(model, tmp_path / f"{kind}.json")
    loaded = load_model(path)
    assert type(loaded) is type(model)

    # Same predictions.
    test = random_feature_set(rng, 50)
    assert np.array_equal(predict_batch(loaded, test), predict_batch(model, test))


def test_load_model_errors(tmp_path: Path):
    """
    Test unreadable or unsupported model files raise.

    Args:
        tmp_path (Path): Temporary directory.
    """
    # Missing file.
    with pytest.raises(AbsenceError):
        load_model(tmp_path / "missing.json")

    # Unsupported version.
    path = tmp_path / "model.json"
    path.write_text('{"format_version": 99, "kind": "c45", "model": {}}')
    with pytest.raises(AbsenceError):
        load_model(path)


@pytest.mark.parametrize("kind", ["c45", "random_forest", "decision_table"])
def test_fit_deterministic(kind: str):
    """
    Test training twice with one seed gives the same model.

    Args:
        kind (str): Learner kind.
    """
    features = random_feature_set(np.random.default_rng(6), 60)
    first = fit(kind, features, FAST_HYPERPARAMS.get(kind), 8)
    second = fit(kind, features, FAST_HYPERPARAMS.get(kind), 8)
    assert first == second


def test_forest_workers():
    """
    Test the forest does not depend on the number of workers.
    """
    features = random_feature_set(np.random.default_rng(7), 60)
    serial = fit("random_forest", features, {"tree_count": 8}, 3, workers=1)
    parallel = fit("random_forest", features, {"tree_count": 8}, 3, workers=4)
    assert serial == parallel


def test_predict_row(synth_dataset: LabeledDataset):
    """
    Test single-row prediction matches batch prediction.

    Args:
        synth_dataset (LabeledDataset): Two weeks of labeled windows.
    """
    # Train.
    model = fit("c45", synth_dataset)
    batch = predict_batch(model, synth_dataset)

    # Predict rows.
    for index, (row, _, _) in enumerate(synth_dataset.rows()):
        if index == 50:
            break
        assert predict(model, row) == batch[index]
        assert predict(model, row.model_dump()) == batch[index]


def test_predict_onehot(synth_dataset: LabeledDataset):
    """
    Test one-hot weekday models encode rows the same way.

    Args:
        synth_dataset (LabeledDataset): Two weeks of labeled windows.
    """
    # Train on one-hot weekdays.
    model = fit("decision_table", synth_dataset, weekday_encoding="onehot")
    assert "weekday_0" in model.feature_names
    batch = predict_batch(model, synth_dataset, weekday_encoding="onehot")

    # First row.
    row, _, _ = next(synth_dataset.rows())
    assert predict(model, row) == batch[0]


def test_encoding_errors(synth_dataset: LabeledDataset):
    """
    Test invalid rows and wrong shapes raise encoding errors.

    Args:
        synth_dataset (LabeledDataset): Two weeks of labeled windows.
    """
    model = fit("c45", synth_dataset)
    row = {"tv": 2, "kettle": 0, "oven": 0, "microwave": 0, "time_slot": 3, "weekday": 1, "day": 8, "month": 1}

    # Appliance state outside {0, 1}.
    with pytest.raises(EncodingError):
        predict(model, row)

    # Time slot past the end of the day.
    with pytest.raises(EncodingError):
        predict(model, {**row, "tv": 0, "time_slot": 48})

    # Wrong number of columns.
    with pytest.raises(EncodingError):
        predict_batch(model, np.zeros((3, 5), dtype=np.int64))

    # Batch rows outside the column ranges.
    X = synth_dataset.features("ordinal").X.copy()
    for column, value in ((0, 2), (5, 7), (6, 0), (7, 13), (4, -1)):
        bad = X.copy()
        bad[3, column] = value
        with pytest.raises(EncodingError, match="Row 3"):
            predict_batch(model, bad)

# - - - - - - - - - - - - - - - - - - -
# HYPERPARAMETER TESTS.

def test_hyperparams_from_candidate():
    """
    Test network candidates expand into layer sizes and invalid values raise.
    """
    # Layers and width.
    hp = hyperparams_from_candidate("mlp", {"hidden_layers": 3, "layer_width": 8, "learning_rate": 0.01})
    assert hp.layer_sizes == [8, 8, 8]
    assert hp.learning_rate == 0.01

    # Unknown key.
    with pytest.raises(HyperparamError):
        hyperparams_from_candidate("c45", {"depth_limit": 3})

    # Out of range.
    with pytest.raises(HyperparamError):
        hyperparams_from_candidate("c45", {"pruning_confidence": 0.9})
    with pytest.raises(HyperparamError):
        hyperparams_from_candidate("mlp", {"hidden_layers": 11, "layer_width": 4})
    assert len(hyperparams_from_candidate("deep_nn", {"hidden_layers": 32, "layer_width": 4}).layer_sizes) == 32
    with pytest.raises(HyperparamError):
        hyperparams_from_candidate("deep_nn", {"hidden_layers": 33, "layer_width": 4})

    # Unknown learner.
    with pytest.raises(HyperparamError):
        hyperparams_from_candidate("svm", {})

# - - - - - - - - - - - - - - - - - - -
# C4.5 TESTS.

def _brute_force_gain(X: np.ndarray, y: np.ndarray, min_leaf: int) -> float | None:
    def information(labels):
        return scipy_entropy(np.bincount(labels, minlength=2), base=2) if len(labels) else 0.0

    best = None
    for feature in range(X.shape[1]):
        values = np.unique(X[:, feature])
        for low, high in zip(values[:-1], values[1:]):
            mask = X[:, feature] <= (low + high) / 2
            if mask.sum() < min_leaf or (~mask).sum() < min_leaf:
                continue
            gain = information(y) - (mask.sum() * information(y[mask]) + (~mask).sum() * information(y[~mask])) / len(y)
            best = gain if best is None else max(best, gain)
    return best


def test_best_split_brute_force():
    """
    Test the chosen numeric split has the highest gain over random datasets.
    """
    rng = np.random.default_rng(10)
    for _ in range(50):
        # Random dataset.
        rows = int(rng.integers(5, 40))
        X = rng.integers(0, 5, size=(rows, 3))
        y = rng.integers(0, 2, size=rows)
        min_leaf = int(rng.integers(1, 4))

        # Compare with exhaustive search.
        expected = _brute_force_gain(X, y, min_leaf)
        split = best_split(X, y, [True] * 3, min_leaf=min_leaf)
        if expected is None:
            assert split is None
        else:
            assert split is not None
            assert np.isclose(split.gain, expected, atol=1e-9)


def test_c45_xor():
    """
    Test zero-gain splits let the tree learn XOR.
    """
    # XOR of two binary features.
    X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]] * 3)
    y = X[:, 0] ^ X[:, 1]
    features = make_feature_set(X, y)

    # Train unpruned.
    model = fit("c45", features, {"min_leaf": 1, "prune": False})
    assert np.array_equal(predict_batch(model, features), y)
    assert model.root.depth() == 2

    # Without zero-gain splits the root stays a leaf.
    root = grow_tree(X, y, [False, False], C45Hyperparams(min_leaf=1, zero_gain_splits=False))
    assert root.is_leaf


def test_c45_unseen_value():
    """
    Test a value unseen at an equality split takes the node majority.
    """
    # Three values seen, classes tied at the root.
    X = np.array([0, 0, 1, 1, 1, 1, 2, 2])
    y = np.array([0, 0, 1, 1, 1, 1, 0, 0])
    model = fit("c45", make_feature_set(X, y), {"prune": False})

    # Value 3 never seen; the tied root goes to present.
    assert predict_batch(model, np.array([[3]])).tolist() == [0]
    assert predict_batch(model, np.array([[1]])).tolist() == [1]


def test_pessimistic_errors():
    """
    Test the upper confidence bound of a leaf with 2 errors in 10 rows.
    """
    assert np.isclose(2 + pessimistic_errors(10, 2, 0.25), 3.5186, atol=1e-3)
    assert pessimistic_errors(0, 0) == 0.0
    # No errors still adds a bound.
    assert pessimistic_errors(10, 0) > 0


def test_c45_prune_keeps_subtree():
    """
    Test a split whose estimated errors beat the majority leaf survives pruning.
    """
    # [6, 4] split into [4, 1] and [2, 3].
    node = TreeNode(
        counts=[6, 4], feature=0, split="threshold", threshold=0.5,
        children=[TreeNode(counts=[4, 1]), TreeNode(counts=[2, 3])],
    )

    # Leaf 4 + 1.5598 against subtree (1 + 1.2503) + (2 + 1.2220).
    assert np.isclose(4 + pessimistic_errors(10, 4, 0.25), 5.5598, atol=1e-3)
    assert np.isclose(estimated_errors(node, 0.25), 5.4723, atol=1e-3)

    # Subtree kept.
    assert c45_prune(node, 0.25) == node


def test_c45_prune_noisy_split():
    """
    Test a noisy single split on 20 rows collapses to its majority leaf.
    """
    # Feature 0 puts [7, 4] on one side and [4, 5] on the other.
    X = np.array([0] * 11 + [1] * 9)
    y = np.array([0] * 7 + [1] * 4 + [0] * 4 + [1] * 5)
    features = make_feature_set(X, y)

    # Grown tree splits once and the sides disagree.
    grown = fit("c45", features, {"min_leaf": 1, "prune": False})
    assert grown.root.node_count() == 3
    assert [child.counts for child in grown.root.children] == [[7, 4], [4, 5]]
    assert [child.prediction for child in grown.root.children] == [0, 1]

    # Leaf [11, 9]: 9 + 2.0006. Subtree: (4 + 1.6183) + (4 + 1.4871).
    leaf_estimate = 9 + pessimistic_errors(20, 9, 0.25)
    subtree_estimate = estimated_errors(grown.root, 0.25)
    assert np.isclose(leaf_estimate, 11.0006, atol=1e-3)
    assert np.isclose(subtree_estimate, 11.1054, atol=1e-3)
    assert leaf_estimate <= subtree_estimate

    # Pruned tree is the majority leaf.
    pruned = fit("c45", features, {"min_leaf": 1, "pruning_confidence": 0.25})
    assert pruned.root.is_leaf
    assert pruned.root.counts == [11, 9]
    assert predict_batch(pruned, features).tolist() == [0] * 20


def test_c45_prune_same_prediction():
    """
    Test a subtree whose leaves all predict one class collapses, and a pure leaf stays.
    """
    node = TreeNode(
        counts=[9, 1], feature=0, split="threshold", threshold=0.5,
        children=[TreeNode(counts=[5, 0]), TreeNode(counts=[4, 1])],
    )
    pruned = c45_prune(node, 0.25)
    assert pruned.is_leaf
    assert pruned.counts == [9, 1]

    leaf = TreeNode(counts=[5, 0])
    assert c45_prune(leaf, 0.25) == leaf


def _assert_pruned_from(original: TreeNode, pruned: TreeNode) -> None:
    assert pruned.counts == original.counts
    if pruned.is_leaf:
        return
    assert (pruned.feature, pruned.split, pruned.threshold, pruned.values) == (
        original.feature, original.split, original.threshold, original.values
    )
    for before, after in zip(original.children, pruned.children, strict=True):
        _assert_pruned_from(before, after)


@pytest.mark.parametrize("seed", range(10))
def test_c45_prune_node_count(seed: int):
    """
    Test pruning never grows a tree and keeps every subtree it does not replace.

    Args:
        seed (int): Dataset seed.
    """
    # Fully grown tree on noisy rows.
    features = random_feature_set(np.random.default_rng(seed), 120)
    root = grow_tree(features.X, features.y, features.numeric, C45Hyperparams(min_leaf=1))

    # Prune.
    pruned = c45_prune(root, 0.25)
    assert pruned.node_count() <= root.node_count()
    _assert_pruned_from(root, pruned)

# - - - - - - - - - - - - - - - - - - -
# RANDOM FOREST TESTS.

def _stump_forest(predictions: list[int]) -> ForestModel:
    # One leaf per member, voting its class for every row.
    trees = [TreeNode(counts=[1 - label, label]) for label in predictions]
    return ForestModel(hyperparams={}, seed=0, feature_names=["f0"], numeric=[False], trees=trees)


@pytest.mark.parametrize(("votes", "expected"), [
    ([1, 1, 0], 1),
    ([0, 0, 1], 0),
    ([1, 1, 0, 0], 0),
    ([1, 1, 1, 0], 1),
    ([1], 1),
])
def test_forest_majority_vote(votes: list[int], expected: int):
    """
    Test the forest outputs the class most members vote for, ties to present.

    Args:
        votes (list[int]): Member predictions.
        expected (int): Forest prediction.
    """
    model = _stump_forest(votes)
    assert predict_batch(model, np.array([[0], [1]])).tolist() == [expected] * 2


def test_forest_single_tree_matches_c45():
    """
    Test one unbagged tree over every feature predicts exactly like C4.5.
    """
    rng = np.random.default_rng(15)
    features = random_feature_set(rng, 150)
    test = random_feature_set(rng, 200)

    # Same tree settings, no bootstrap, all 8 features at every split.
    tree = fit("c45", features, {"min_leaf": 2, "prune": True, "pruning_confidence": 0.25}, 3)
    forest = fit("random_forest", features, {
        "tree_count": 1, "bootstrap": False, "feature_subset_size": 8,
        "min_leaf": 2, "prune": True, "pruning_confidence": 0.25,
    }, 3)

    # Identical tree and predictions.
    assert forest.trees[0] == tree.root
    assert np.array_equal(predict_batch(forest, test), predict_batch(tree, test))

# - - - - - - - - - - - - - - - - - - -
# DECISION TABLE TESTS.

def test_decision_table_weekday():
    """
    Test the table keys on the weekday when it alone explains the label.
    """
    # Two weeks, absent on week days, tv alternating.
    weekday = np.tile(np.arange(7), 2)
    tv = np.array([1, 0] * 7)
    y = (weekday < 5).astype(np.int64)
    features = make_feature_set(np.column_stack([tv, weekday]), y, ["tv", "weekday"], [False, True])

    # Train.
    model = fit("decision_table", features)
    assert model.selected == [1]
    assert loo_accuracy(features.X, y, (1,)) == 1.0
    assert loo_accuracy(features.X, y, (0,)) < 1.0
    assert np.array_equal(predict_batch(model, features), y)


def test_decision_table_unseen_key():
    """
    Test a key not in the table takes the training majority.
    """
    features = make_feature_set([0, 0, 0, 1, 1], [1, 1, 1, 0, 0])
    model = fit("decision_table", features)
    assert model.default_class == 1
    assert predict_batch(model, np.array([[7]])).tolist() == [1]

# - - - - - - - - - - - - - - - - - - -
# KDE NAIVE BAYES TESTS.

def test_kde_nb_proba():
    """
    Test posteriors are probabilities summing to one.
    """
    rng = np.random.default_rng(12)
    model = fit("kde_nb", random_feature_set(rng, 100))
    proba = model.predict_proba(random_feature_set(rng, 30).X)
    assert proba.shape == (30, 2)
    assert np.allclose(proba.sum(axis=1), 1.0)
    assert (proba >= 0).all() and (proba <= 1).all()


def test_bandwidth():
    """
    Test the rule-of-thumb bandwidths.
    """
    values = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    assert np.isclose(bandwidth(values, "scott"), 1.06 * np.std(values, ddof=1) * 5 ** (-1 / 5))
    assert np.isclose(bandwidth(values, "scott", 2.0), 2 * bandwidth(values, "scott"))
    # Constant column keeps a positive bandwidth.
    assert bandwidth(np.ones(10)) > 0


def test_kde_nb_xor():
    """
    Test KDE naive Bayes scores about chance on XOR, whose marginals carry no signal.
    """
    # Balanced truth table.
    X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]] * 25)
    y = X[:, 0] ^ X[:, 1]
    features = make_feature_set(X, y)

    # Every row gets the prior.
    model = fit("kde_nb", features)
    assert np.allclose(model.predict_proba(features.X), 0.5)
    accuracy = float(np.mean(predict_batch(model, features) == y))
    assert abs(accuracy - 0.5) <= 0.05

# - - - - - - - - - - - - - - - - - - -
# NETWORK TESTS.

def test_network_gradients():
    """
    Test backpropagation against central differences on a 2-2-1 network at 10 random points.
    """
    rng = np.random.default_rng(13)
    step = 1e-6
    for _ in range(10):
        # Network and batch.
        state = init_state([2], 2, rng)
        weights = [w + rng.normal(0, 0.5, w.shape) for w in state.weights]
        biases = [b + rng.normal(0, 0.5, b.shape) for b in state.biases]
        X = rng.normal(size=(8, 2))
        y = rng.integers(0, 2, 8)

        # Analytic gradients.
        _, grad_w, grad_b = loss_and_gradients(weights, biases, X, y, l2=0.1)

        # Numeric gradients.
        for params, grads in ((weights, grad_w), (biases, grad_b)):
            for param, grad in zip(params, grads):
                for index in np.ndindex(param.shape):
                    original = param[index]
                    param[index] = original + step
                    up, _, _ = loss_and_gradients(weights, biases, X, y, l2=0.1)
                    param[index] = original - step
                    down, _, _ = loss_and_gradients(weights, biases, X, y, l2=0.1)
                    param[index] = original
                    numeric = (up - down) / (2 * step)
                    assert abs(numeric - grad[index]) <= 1e-4 * max(1.0, abs(numeric))


def test_zero_learning_rate():
    """
    Test a step with learning rate 0 leaves the weights unchanged.
    """
    rng = np.random.default_rng(14)
    state = init_state([3], 2, rng)
    hp = MlpHyperparams(layer_sizes=[3], learning_rate=0.0)

    # Step.
    updated, loss = mlp_backprop_step(state, rng.normal(size=(6, 2)), np.array([0, 1, 0, 1, 1, 0]), hp)
    assert np.isfinite(loss)
    assert updated.step == 1
    for before, after in zip(state.weights + state.biases, updated.weights + updated.biases):
        assert np.array_equal(before, after)


def test_divergence():
    """
    Test a non-finite loss raises a divergence error.
    """
    rng = np.random.default_rng(15)
    state = init_state([3], 2, rng)
    X = np.array([[np.nan, 1.0], [0.0, 1.0]])
    with pytest.raises(DivergenceError):
        mlp_backprop_step(state, X, np.array([0, 1]), MlpHyperparams(layer_sizes=[3]))
