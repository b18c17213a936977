"""
Network graphs and gossip matrices.

A gossip matrix is built from the graph Laplacian as W = I - L / lambda_1(L)
with unit edge weights, which makes W symmetric, PSD, doubly stochastic and
contractive on the disagreement subspace for every connected graph.
"""
import typing as ty
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
import scipy.linalg

import dcopt
from dcopt.exceptions import ConnectivityFailure, DimensionMismatch, SpectralFailure

export, __all__ = dcopt.exporter()
__all__ += ['BUILTIN_KINDS']
log = dcopt.utils.log

BUILTIN_KINDS = ('ring', 'path', 'complete', 'star')
MAX_ER_ATTEMPTS = 1000
SPECTRAL_TOL = 1e-12

# Tolerances of the gossip validator
SYMMETRY_TOL = 1e-12
ROW_SUM_TOL = 1e-10
EIGENVALUE_TOL = 1e-10
SPARSITY_TOL = 1e-12


@export
@dataclass(frozen=True)
class Graph:
    """
    Undirected simple graph on agents 0..m-1

    :param m: number of agents
    :param edges: unordered pairs (i, j), stored as i < j
    """
    m: int
    edges: ty.FrozenSet[ty.Tuple[int, int]]

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f'Need a positive number of agents, got {self.m}')
        edges = list(self.edges)
        normalized = set()
        for edge in edges:
            i, j = (int(e) for e in edge)
            if i == j:
                raise ValueError(f'Self-loop on agent {i} is not allowed')
            if not (0 <= i < self.m and 0 <= j < self.m):
                raise ValueError(f'Edge {edge} out of range for m={self.m}')
            normalized.add((min(i, j), max(i, j)))
        if len(normalized) != len(edges):
            raise ValueError('Duplicate edges are not allowed')
        object.__setattr__(self, 'm', int(self.m))
        object.__setattr__(self, 'edges', frozenset(normalized))
        if not self.is_connected():
            raise ConnectivityFailure(f'Graph on {self.m} agents is not connected')

    def __repr__(self):
        return f'Graph(m={self.m}, n_edges={self.n_edges})'

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.m))
        g.add_edges_from(self.edges)
        return g

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> 'Graph':
        nodes = sorted(g.nodes)
        if nodes != list(range(len(nodes))):
            g = nx.convert_node_labels_to_integers(g, ordering='sorted')
        return cls(m=g.number_of_nodes(), edges=frozenset(g.edges))

    def is_connected(self) -> bool:
        if self.m == 1:
            return True
        return nx.is_connected(self.to_networkx())

    def neighbors(self, agent: int) -> ty.List[int]:
        return sorted(j if i == agent else i
                      for i, j in self.edges if agent in (i, j))


def _derived_seed(seed: int, attempt: int) -> int:
    """Deterministic seed chain: attempt 0 uses the seed itself"""
    if attempt == 0:
        return int(seed)
    return int(np.random.SeedSequence([int(seed), attempt]).generate_state(1)[0])


@export
def generate_er_graph(m: int, p: float, seed: int,
                      max_attempts: int = MAX_ER_ATTEMPTS) -> Graph:
    """
    Draw a connected Erdos-Renyi graph G(m, p)

    Disconnected draws are discarded and redrawn with the next seed of a
    deterministic seed chain.

    :param m: number of agents, at least 2
    :param p: probability that a pair of agents is connected, in (0, 1]
    :param seed: seed of the first draw
    :param max_attempts: number of draws before giving up
    :return: connected Graph
    """
    if m < 2:
        raise ValueError(f'Need at least two agents, got m={m}')
    if not 0 < p <= 1:
        raise ValueError(f'Edge probability should be in (0, 1], got {p}')
    for attempt in range(max_attempts):
        g = nx.gnp_random_graph(m, p, seed=_derived_seed(seed, attempt))
        if nx.is_connected(g):
            if attempt:
                log.debug(f'ER(m={m}, p={p}) connected after {attempt + 1} draws')
            return Graph.from_networkx(g)
    log.error(f'No connected ER(m={m}, p={p}) graph in {max_attempts} draws')
    raise ConnectivityFailure(
        f'Could not draw a connected graph with m={m} and p={p} in '
        f'{max_attempts} attempts, p is probably too small')


@export
def builtin_graph(kind: str, m: int) -> Graph:
    """Deterministic topologies: ring, path, complete or star (agent 0 is the hub)"""
    if m < 2:
        raise ValueError(f'Need at least two agents, got m={m}')
    if kind == 'ring':
        g = nx.cycle_graph(m)
    elif kind == 'path':
        g = nx.path_graph(m)
    elif kind == 'complete':
        g = nx.complete_graph(m)
    elif kind == 'star':
        g = nx.star_graph(m - 1)
    else:
        raise ValueError(f'Unknown graph kind {kind}, choose from {BUILTIN_KINDS}')
    return Graph.from_networkx(g)


@export
def laplacian(g: Graph) -> np.ndarray:
    """Unit-weight Laplacian D - A of the graph"""
    lap = nx.laplacian_matrix(g.to_networkx(), nodelist=range(g.m))
    return np.asarray(lap.toarray(), dtype=np.float64)


def symmetric_spectrum(a: np.ndarray, tol: float = SPECTRAL_TOL) -> np.ndarray:
    """
    Eigenvalues (ascending) of a symmetric matrix, checked by their residual

    :raises SpectralFailure: if the solver fails or the eigenpairs do not
        satisfy ||A v - lambda v|| within tol (scaled by the spectral radius)
    """
    a = np.asarray(a, dtype=np.float64)
    try:
        values, vectors = scipy.linalg.eigh(a)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as e:
        raise SpectralFailure(f'Eigendecomposition failed: {e}') from e
    scale = max(1.0, float(np.max(np.abs(values))))
    residual = float(np.max(np.abs(a @ vectors - vectors * values)))
    if residual > tol * scale * max(1, a.shape[0]):
        raise SpectralFailure(
            f'Eigenpair residual {residual:.3g} exceeds tolerance {tol:.1g}')
    return values


@export
@dataclass(frozen=True, eq=False)
class GossipMatrix:
    """
    Mixing matrix together with the spectral quantities FastMix needs

    :param w: m x m mixing matrix
    :param lambda2: second largest eigenvalue of w, clipped to [0, 1]
    :param gap: spectral gap 1 - lambda2
    :param eta_w: FastMix momentum 1 / (1 + sqrt(1 - lambda2^2))
    """
    w: np.ndarray = field(repr=False)
    lambda2: float
    gap: float
    eta_w: float
    laplacian_lambda1: ty.Optional[float] = None
    graph: ty.Optional[Graph] = field(default=None, repr=False, compare=False)

    @property
    def m(self) -> int:
        return self.w.shape[0]

    @classmethod
    def from_matrix(cls, w: np.ndarray, graph: ty.Optional[Graph] = None,
                    laplacian_lambda1: ty.Optional[float] = None) -> 'GossipMatrix':
        """Wrap an arbitrary symmetric mixing matrix (no validation)"""
        w = np.array(w, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DimensionMismatch(f'Gossip matrix should be square, got {w.shape}')
        w.setflags(write=False)
        if w.shape[0] == 1:
            lambda2 = 0.0
        else:
            spectrum = symmetric_spectrum(0.5 * (w + w.T))
            lambda2 = float(np.clip(spectrum[-2], 0.0, 1.0))
        return cls(w=w,
                   lambda2=lambda2,
                   gap=1.0 - lambda2,
                   eta_w=fast_mix_momentum(lambda2),
                   laplacian_lambda1=laplacian_lambda1,
                   graph=graph,
                   )

    def spectral_summary(self) -> dict:
        return dict(m=self.m,
                    lambda2=self.lambda2,
                    gap=self.gap,
                    eta_w=self.eta_w,
                    laplacian_lambda1=self.laplacian_lambda1,
                    n_edges=None if self.graph is None else self.graph.n_edges,
                    )


@export
def fast_mix_momentum(lambda2: float) -> float:
    """eta_w = 1 / (1 + sqrt(1 - lambda2^2)), in [1/2, 1) for lambda2 in [0, 1)"""
    return 1.0 / (1.0 + np.sqrt(max(0.0, 1.0 - lambda2 ** 2)))


@export
def gossip_matrix(g: Graph) -> GossipMatrix:
    """
    W = I - L / lambda_1(L) for a connected graph

    :raises SpectralFailure: if the spectrum is inaccurate or the resulting
        matrix violates any of the gossip assumptions
    """
    lap = laplacian(g)
    lambda1 = float(symmetric_spectrum(lap)[-1])
    if lambda1 <= 0:
        raise SpectralFailure(f'Largest Laplacian eigenvalue is {lambda1}')
    w = np.eye(g.m) - lap / lambda1
    gossip = GossipMatrix.from_matrix(w, graph=g, laplacian_lambda1=lambda1)
    report = validate_gossip(gossip.w, edges=g.edges)
    if not report.passed:
        raise SpectralFailure(f'Gossip matrix violates {report.failed}')
    return gossip


@export
def exact_averaging(m: int) -> GossipMatrix:
    """W = 11^T / m, which averages in a single multiplication"""
    return GossipMatrix.from_matrix(np.full((m, m), 1.0 / m),
                                    graph=builtin_graph('complete', m) if m > 1 else None)


@export
@dataclass(frozen=True)
class ClauseResult:
    name: str
    passed: bool
    residual: float
    tolerance: float


@export
@dataclass(frozen=True)
class ValidationReport:
    """Outcome of each clause of the gossip-matrix assumptions"""
    clauses: ty.Tuple[ClauseResult, ...]
    lambda2: float = float('nan')

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    @property
    def failed(self) -> ty.List[str]:
        return [c.name for c in self.clauses if not c.passed]

    def __getitem__(self, name) -> ClauseResult:
        for clause in self.clauses:
            if clause.name == name:
                return clause
        raise KeyError(name)

    def to_dict(self) -> dict:
        return dict(passed=self.passed,
                    lambda2=self.lambda2,
                    clauses=[dict(name=c.name,
                                  passed=c.passed,
                                  residual=c.residual,
                                  tolerance=c.tolerance)
                             for c in self.clauses])


@export
def validate_gossip(w: np.ndarray,
                    edges: ty.Optional[ty.Iterable[ty.Tuple[int, int]]] = None,
                    ) -> ValidationReport:
    """
    Check a mixing matrix against the gossip assumptions

    Checked clauses are finiteness, symmetry, unit row sums, positive
    semi-definiteness, eigenvalues in [0, 1], second largest eigenvalue
    below one (null(I - W) = span(1)) and, if edges are given, the sparsity
    pattern. Failures end up in the report, only a failing eigensolver
    raises (SpectralFailure).

    :param w: square matrix
    :param edges: optional edges the off-diagonal support must be within
    :return: ValidationReport
    """
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DimensionMismatch(f'Gossip matrix should be square, got {w.shape}')
    m = w.shape[0]
    clauses = []

    finite = bool(np.all(np.isfinite(w)))
    clauses.append(ClauseResult('finite', finite, 0.0 if finite else float('inf'), 0.0))
    if not finite:
        for name in ('symmetric', 'row_sums', 'psd', 'eigenvalue_range',
                     'lambda2_below_one'):
            clauses.append(ClauseResult(name, False, float('nan'), float('nan')))
        return ValidationReport(clauses=tuple(clauses))

    asym = float(np.max(np.abs(w - w.T)))
    clauses.append(ClauseResult('symmetric', asym <= SYMMETRY_TOL, asym, SYMMETRY_TOL))

    row_res = float(np.max(np.abs(w.sum(axis=1) - 1)))
    clauses.append(ClauseResult('row_sums', row_res <= ROW_SUM_TOL, row_res, ROW_SUM_TOL))

    spectrum = symmetric_spectrum(0.5 * (w + w.T))
    smallest, largest = float(spectrum[0]), float(spectrum[-1])
    clauses.append(ClauseResult('psd', smallest >= -EIGENVALUE_TOL,
                                max(0.0, -smallest), EIGENVALUE_TOL))
    range_res = max(0.0, -smallest, largest - 1)
    clauses.append(ClauseResult('eigenvalue_range', range_res <= EIGENVALUE_TOL,
                                range_res, EIGENVALUE_TOL))

    lambda2 = float(spectrum[-2]) if m > 1 else 0.0
    clauses.append(ClauseResult('lambda2_below_one', lambda2 < 1 - EIGENVALUE_TOL,
                                lambda2, 1 - EIGENVALUE_TOL))

    if edges is not None:
        allowed = np.eye(m, dtype=bool)
        for i, j in edges:
            allowed[i, j] = allowed[j, i] = True
        outside = float(np.max(np.abs(np.where(allowed, 0.0, w)), initial=0.0))
        clauses.append(ClauseResult('sparsity', outside <= SPARSITY_TOL,
                                    outside, SPARSITY_TOL))
    return ValidationReport(clauses=tuple(clauses), lambda2=lambda2)
