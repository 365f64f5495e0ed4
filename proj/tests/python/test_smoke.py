import pytest

import _medsensor as ms


@pytest.fixture(scope="module")
def store(tmp_path_factory):
    root = str(tmp_path_factory.mktemp("store"))
    entries = ms.gen_store(root, participants=3, sessions=1, gestures=3, seed=7)
    assert entries >= 3 * 2 * 3  # positives for every participant/style/session
    return root


@pytest.fixture(scope="module")
def dataset(store):
    return ms.prepare_store(store, window=500, seed=3)


def test_prepare_counts(dataset):
    assert dataset.timesteps == 500
    assert len(dataset) == 2 * 3 * 2 * 3  # positives + 1:1 negatives
    labels = [dataset.label(i) for i in range(len(dataset))]
    assert labels.count(1) == labels.count(0) == 18
    assert len(dataset.values(0)) == 1500
    assert dataset.participant(0).startswith("p")
    assert dataset.style(0) in ("protocol", "natural")


def test_exp1_runs_and_is_deterministic(dataset):
    kwargs = dict(hidden_sizes=[8], epochs=20, seed=11, jobs=2)
    a = ms.run_experiment(1, dataset, **kwargs)
    b = ms.run_experiment(1, dataset, **kwargs)
    assert a["experiment"] == "EXP1"
    assert not a["any_failed"]
    assert len(a["rows"]) == 1
    assert a["detail_csv"] == b["detail_csv"]
    assert "Average" in a["table"]


def test_exp3_shape(dataset):
    r = ms.run_experiment(3, dataset, hidden_sizes=[8], epochs=15, seed=12)
    assert len(r["rows"]) == 3  # one fold per participant
    for row in r["rows"]:
        assert row["test_size"] > 0
    assert "Train Size" in r["table"]


def test_accuracy():
    assert ms.accuracy([1, 0, 1, 0], [1, 0, 1, 0]) == 1.0
    assert ms.accuracy([1, 0, 1, 0], [1, 0, 0, 0]) == 0.75
