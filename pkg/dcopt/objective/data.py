"""Datasets for the logistic regression experiments: libsvm input, splitting and synthesis"""
import io
import os
import typing as ty
from dataclasses import dataclass

import numpy as np
from sklearn.datasets import load_svmlight_file

import dcopt
from dcopt.exceptions import DimensionMismatch, EmptyDataset, ParseError

export, __all__ = dcopt.exporter()
__all__ += ['PARTITION_SCHEMES']

PARTITION_SCHEMES = ('contiguous', 'round_robin')


@export
@dataclass(eq=False)
class Dataset:
    """Feature matrix (n x d) with labels in {-1, +1}"""
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.float64)
        if self.features.ndim != 2 or self.labels.shape != (self.features.shape[0],):
            raise DimensionMismatch(
                f'Features {self.features.shape} and labels {self.labels.shape} do not match')
        if not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise ValueError('Labels should be -1 or +1')
        if not np.all(np.isfinite(self.features)):
            raise ValueError('Features should be finite')

    def __len__(self):
        return self.features.shape[0]

    def __repr__(self):
        return f'Dataset(n={self.n}, d={self.d})'

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def take(self, rows) -> 'Dataset':
        return Dataset(self.features[rows], self.labels[rows])


def _sample_lines(path: str) -> ty.List[int]:
    """1-based numbers of the lines of a libsvm file that hold a sample"""
    with open(path, 'rb') as f:
        return [number for number, line in enumerate(f, start=1)
                if line.split(b'#', 1)[0].strip()]


def _offending_line(path: str, n_features: ty.Optional[int]) -> ty.Optional[int]:
    """First line that load_svmlight_file rejects on its own"""
    with open(path, 'rb') as f:
        for number, line in enumerate(f, start=1):
            try:
                load_svmlight_file(io.BytesIO(line), n_features=n_features, zero_based=False)
            except ValueError:
                return number
    return None


def _label_map(raw_labels: np.ndarray, path: str) -> ty.Dict[float, float]:
    classes = []
    for sample, label in enumerate(raw_labels):
        if label not in classes:
            classes.append(label)
            if len(classes) > 2:
                raise ParseError(f'More than two classes: {sorted(classes)}',
                                 _sample_lines(path)[sample])
    if set(classes) <= {-1.0, 1.0}:
        return {c: c for c in classes}
    if set(classes) <= {0.0, 1.0}:
        dcopt.utils.log.info('Remapping labels {0, 1} to {-1, +1}')
        return {0.0: -1.0, 1.0: 1.0}
    if len(classes) == 2:
        low, high = sorted(classes)
        dcopt.utils.log.info(f'Remapping labels {low} -> -1 and {high} -> +1')
        return {low: -1.0, high: 1.0}
    raise ParseError(f'Cannot map single class {classes[0]} to -1/+1', _sample_lines(path)[0])


@export
def read_libsvm(path: str, d_hint: ty.Optional[int] = None) -> Dataset:
    """
    Read a libsvm sparse text file into a dense Dataset

    :param path: file with lines "label idx:val idx:val ...", 1-based indices
    :param d_hint: number of features, if not given the largest index is used
    :return: Dataset with labels mapped to -1/+1
    :raises ParseError: with the number of the first malformed line
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    try:
        features, raw_labels = load_svmlight_file(path, n_features=d_hint, zero_based=False)
    except ValueError as e:
        raise ParseError(str(e), _offending_line(path, d_hint)) from e
    if features.shape[0] == 0:
        raise EmptyDataset(f'No samples in {path}')

    mapping = _label_map(raw_labels, path)
    labels = np.array([mapping[label] for label in raw_labels])
    dcopt.utils.log.debug(f'Read {features.shape[0]} samples with {features.shape[1]} '
                          f'features from {path}')
    return Dataset(features.toarray(), labels)


@export
def partition_sizes(n: int, m: int) -> ty.List[int]:
    """Split n rows over m agents as evenly as possible, the first agents get the remainder"""
    base, remainder = divmod(n, m)
    return [base + (i < remainder) for i in range(m)]


@export
def partition(data: Dataset,
              m: int,
              scheme: str = 'contiguous',
              seed: ty.Optional[int] = None,
              ) -> ty.List[Dataset]:
    """
    Distribute the samples of data over m agents

    :param scheme: contiguous blocks or round_robin (row j goes to agent j mod m)
    :param seed: if given, the rows are shuffled with this seed first
    """
    if scheme not in PARTITION_SCHEMES:
        raise ValueError(f'Unknown scheme {scheme}, choose from {PARTITION_SCHEMES}')
    if m < 1:
        raise ValueError(f'Need at least one agent, got {m}')
    if data.n < m:
        raise EmptyDataset(f'Cannot give each of {m} agents a sample out of {data.n}')
    order = np.arange(data.n)
    if seed is not None:
        order = np.random.default_rng(seed).permutation(data.n)
    if scheme == 'round_robin':
        return [data.take(order[i::m]) for i in range(m)]
    bounds = np.cumsum([0] + partition_sizes(data.n, m))
    return [data.take(order[start:stop]) for start, stop in zip(bounds[:-1], bounds[1:])]


@export
def synth_logistic(m: int,
                   n_per_agent: int,
                   d: int,
                   seed: int,
                   flip_fraction: float = 0.1,
                   density: float = 0.1,
                   ) -> ty.List[Dataset]:
    """
    Synthetic sparse logistic regression data

    Features are i.i.d. N(0, 1) / sqrt(d), labels are the sign of a sparse
    ground-truth hyperplane with a fraction of the labels flipped.
    """
    if min(m, n_per_agent, d) < 1:
        raise ValueError(f'Sizes should be positive, got m={m}, n={n_per_agent}, d={d}')
    rng = np.random.default_rng(seed)
    truth = np.zeros(d)
    support = rng.choice(d, size=max(1, int(round(density * d))), replace=False)
    truth[support] = rng.standard_normal(len(support))

    features = rng.standard_normal((m * n_per_agent, d)) / np.sqrt(d)
    labels = np.where(features @ truth >= 0, 1.0, -1.0)
    flip = rng.random(m * n_per_agent) < flip_fraction
    labels[flip] *= -1
    data = Dataset(features, labels)
    return partition(data, m, 'contiguous')
