import numpy as np
import pytest

from binflip.dataset import build_bins, compute_feature_stats, load_csv
from binflip.model import LogisticModel, train_logistic
from binflip.synth import credit_dataset

TOY_CSV = "a,b,y\n-1,-1,0\n-1,1,0\n1,-1,1\n1,1,1\n"

# one feature, mean 0 and std 1 exactly, separable
TOY_1F_CSV = "x,y\n-1,0\n-1,0\n1,1\n1,1\n"


@pytest.fixture(scope="session")
def toy_dataset():
    return load_csv(TOY_CSV.encode())


@pytest.fixture(scope="session")
def toy_1f_dataset():
    return load_csv(TOY_1F_CSV.encode())


@pytest.fixture(scope="session")
def unit_model():
    """sigmoid(x) on a single raw feature: weight 1, no shift, no scale."""
    return LogisticModel(
        weights=np.array([1.0]),
        intercept=0.0,
        means=np.array([0.0]),
        stds=np.array([1.0]),
        feature_names=("x",),
    )


@pytest.fixture(scope="session")
def credit():
    return credit_dataset()


@pytest.fixture(scope="session")
def credit_model(credit):
    return train_logistic(credit)


@pytest.fixture(scope="session")
def credit_stats(credit):
    return compute_feature_stats(credit)


@pytest.fixture(scope="session")
def credit_grid(credit_stats):
    return build_bins(credit_stats, 10)
