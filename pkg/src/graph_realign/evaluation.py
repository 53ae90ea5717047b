"""Centrality-weighted success/error rates, attribute posteriors, breach
checks and the per-node perturbation measure.

Rates are computed over the auxiliary nodes that have a true image
(``V_mapped``). Each node is weighted by the smaller of its degree in the
auxiliary graph and the degree of its true image in the target, so
isolated or near-isolated nodes barely count.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping as TMapping

import numpy as np

from .graph import DirectedGraph
from .propagation import Mapping

BOTTOM = None  # "no image" / "no value"
UNDEFINED = None
PUB, PRIV = "pub", "priv"


class ProbabilisticMapping:
    """Per auxiliary node, a distribution over target nodes and BOTTOM.

    Rows that are omitted map to BOTTOM with probability 1. A row whose
    listed probabilities sum to less than one leaves the remainder on
    BOTTOM only if ``fill_bottom`` is set; otherwise it must sum to one.
    """

    def __init__(self, rows: TMapping[int, TMapping[int | None, float]], fill_bottom: bool = False):
        self.rows: dict[int, dict[int | None, float]] = {}
        for a, row in rows.items():
            row = {k: p for k, p in row.items() if p != 0}
            if any(p < 0 or p > 1 for p in row.values()):
                raise ValueError(f"row {a}: probabilities must lie in [0, 1]")
            total = sum(row.values())
            if fill_bottom and total < 1:
                row[BOTTOM] = row.get(BOTTOM, 0) + (1 - total)
                total = 1
            if abs(total - 1) > 1e-9:
                raise ValueError(f"row {a} sums to {float(total)}, expected 1")
            self.rows[int(a)] = row

    @classmethod
    def from_mapping(cls, mu: Mapping | dict) -> "ProbabilisticMapping":
        pairs = mu.pairs if isinstance(mu, Mapping) else mu
        return cls({a: {s: 1} for a, s in pairs.items()})

    def row(self, aux: int) -> dict[int | None, float]:
        return self.rows.get(aux, {BOTTOM: 1})

    def prob(self, aux: int, san: int | None) -> float:
        return self.row(aux).get(san, 0)

    def sample(self, rng: np.random.Generator) -> dict[int, int]:
        """Draw each row independently; BOTTOM draws are left out.

        The result need not be injective.
        """
        out = {}
        for a, row in self.rows.items():
            keys = list(row)
            p = np.array([float(row[k]) for k in keys])
            k = keys[int(rng.choice(len(keys), p=p / p.sum()))]
            if k is not BOTTOM:
                out[a] = k
        return out


@dataclass
class CentralityWeights:
    nu: np.ndarray

    def __getitem__(self, v):
        return self.nu[v]


def degree_centrality(g: DirectedGraph) -> CentralityWeights:
    """In-degree plus out-degree per node."""
    return CentralityWeights(g.degrees().astype(np.int64))


def _as_prob(mu) -> ProbabilisticMapping:
    if isinstance(mu, ProbabilisticMapping):
        return mu
    return ProbabilisticMapping.from_mapping(mu)


def success_error_rates(mu, ground_truth: Mapping | dict, nu_aux: CentralityWeights,
                        nu_san: CentralityWeights, exact: bool = False):
    """Centrality-weighted ``(success, error)`` of a mapping.

    ``mu`` may be a deterministic Mapping/dict or a ProbabilisticMapping;
    for the latter the expectation over sampled mappings is computed in
    closed form. With ``exact`` the result is a pair of Fractions.
    """
    gt = ground_truth.pairs if isinstance(ground_truth, Mapping) else dict(ground_truth)
    if not gt:
        raise ValueError("success rate undefined: ground truth is empty")
    pm = _as_prob(mu)
    hit = miss = total = 0
    for v, true in gt.items():
        w = min(int(nu_aux[v]), int(nu_san[true]))
        row = pm.row(v)
        p_hit = row.get(true, 0)
        p_bottom = row.get(BOTTOM, 0)
        hit += p_hit * w
        miss += (1 - p_hit - p_bottom) * w
        total += w
    if total == 0:
        raise ValueError("success rate undefined: all mapped nodes have zero weight")
    if exact:
        return Fraction(hit) / total, Fraction(miss) / total
    return float(hit / total), float(miss / total)


def success_error_rates_sampled(mu_tilde: ProbabilisticMapping, ground_truth, nu_aux, nu_san,
                                n_samples: int, rng: np.random.Generator):
    """Monte-Carlo estimate of :func:`success_error_rates` by sampling mappings."""
    acc = np.zeros(2)
    for _ in range(n_samples):
        acc += success_error_rates(mu_tilde.sample(rng), ground_truth, nu_aux, nu_san)
    return tuple(acc / n_samples)


def spurious_count(mu: Mapping | dict, ground_truth: Mapping | dict) -> int:
    """Mapped auxiliary nodes whose true image is BOTTOM (outside V_mapped)."""
    pairs = mu.pairs if isinstance(mu, Mapping) else mu
    gt = ground_truth.pairs if isinstance(ground_truth, Mapping) else ground_truth
    return sum(1 for a in pairs if a not in gt)


def count_outcomes(mu: Mapping | dict, ground_truth: Mapping | dict) -> tuple[int, int]:
    """(correct, wrong) pair counts; wrong includes spurious mappings."""
    pairs = mu.pairs if isinstance(mu, Mapping) else mu
    gt = ground_truth.pairs if isinstance(ground_truth, Mapping) else ground_truth
    correct = sum(1 for a, s in pairs.items() if gt.get(a) == s)
    return correct, len(pairs) - correct


# --- attribute posteriors ----------------------------------------------------

@dataclass
class AttributeTable:
    """Released attribute values on target nodes/edges plus attacker prior.

    ``node_values[X][v]`` is the value of node attribute X on target node
    v; ``edge_values[Y][(u, v)]`` likewise for edges. Missing entries are
    BOTTOM. ``prior[(X, aux_node)]`` is the attacker's prior distribution
    over values of X for that auxiliary node.
    """

    node_values: dict[str, dict[int, Hashable]] = field(default_factory=dict)
    edge_values: dict[str, dict[tuple[int, int], Hashable]] = field(default_factory=dict)
    policy: dict[str, str] = field(default_factory=dict)
    delta: float = 0.5
    prior: dict[tuple, dict[Hashable, float]] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.delta <= 1:
            raise ValueError("delta must lie in [0, 1]")
        for key, row in self.prior.items():
            if abs(sum(row.values()) - 1) > 1e-9:
                raise ValueError(f"prior {key} does not sum to 1")
        for attr, label in self.policy.items():
            if label not in (PUB, PRIV):
                raise ValueError(f"policy for {attr} must be 'pub' or 'priv'")


def _normalize(mass: dict) -> dict | None:
    total = sum(mass.values())
    if total == 0:
        return UNDEFINED
    return {x: m / total for x, m in mass.items()}


def adversary_posterior(mu_tilde, attrs: AttributeTable, attribute: str, aux_node: int):
    """Distribution over values of ``attribute`` induced by ``mu_tilde``.

    Mass on target nodes whose value is BOTTOM is dropped before
    normalizing; returns UNDEFINED when nothing is left.
    """
    values = attrs.node_values.get(attribute, {})
    mass: dict = {}
    for v, p in _as_prob(mu_tilde).row(aux_node).items():
        if v is BOTTOM or p == 0:
            continue
        x = values.get(v, BOTTOM)
        if x is not BOTTOM:
            mass[x] = mass.get(x, 0) + p
    return _normalize(mass)


def edge_posterior(mu_tilde, attrs: AttributeTable, edge_attribute: str, u_aux: int, v_aux: int):
    """Edge-attribute analogue of :func:`adversary_posterior` using the
    product of the two endpoint rows."""
    values = attrs.edge_values.get(edge_attribute, {})
    pm = _as_prob(mu_tilde)
    mass: dict = {}
    for u, pu in pm.row(u_aux).items():
        if u is BOTTOM or pu == 0:
            continue
        for v, pv in pm.row(v_aux).items():
            if v is BOTTOM or pv == 0:
                continue
            y = values.get((u, v), BOTTOM)
            if y is not BOTTOM:
                mass[y] = mass.get(y, 0) + pu * pv
    return _normalize(mass)


def breach_check(prior: dict, posterior: dict | None, true_value, delta: float, policy_label: str) -> bool:
    if policy_label not in (PUB, PRIV):
        raise ValueError("policy_label must be 'pub' or 'priv'")
    if policy_label == PUB or posterior is UNDEFINED:
        return False
    return posterior.get(true_value, 0) - prior.get(true_value, 0) > delta


# --- perturbation ------------------------------------------------------------

def _pair_codes(g: DirectedGraph) -> np.ndarray:
    s, d = g.edge_arrays()
    return s * max(g.n, 1) + d


def _undirected_counts(codes: np.ndarray, n: int) -> np.ndarray:
    """Per node, the number of distinct partners over a set of directed codes."""
    n1 = max(n, 1)
    s, d = codes // n1, codes % n1
    und = np.unique(np.minimum(s, d) * n1 + np.maximum(s, d))
    a, b = und // n1, und % n1
    return np.bincount(a, minlength=n) + np.bincount(b, minlength=n)


def perturbation_measure(e_original: DirectedGraph, e_san: DirectedGraph, nu: CentralityWeights,
                         exact: bool = False):
    """Centrality-weighted mean over nodes of a per-node Jaccard score.

    For node u the score is the number of partners v joined to u by an
    edge kept unchanged (same direction) in both graphs, over the number
    of partners joined by any edge in either graph. Nodes with no
    partners in either graph are skipped.
    """
    if e_original.n != e_san.n:
        raise ValueError("both graphs must be on the same node set")
    n = e_original.n
    a, b = _pair_codes(e_original), _pair_codes(e_san)
    kept = _undirected_counts(np.intersect1d(a, b, assume_unique=True), n)
    union = _undirected_counts(np.union1d(a, b), n)
    live = np.flatnonzero(union > 0)
    w = np.asarray(nu.nu)
    if exact:
        num = sum((Fraction(int(w[u]) * int(kept[u]), int(union[u])) for u in live), Fraction(0))
        den = sum(int(w[u]) for u in live)
    else:
        num = float(np.sum(w[live] * kept[live] / union[live]))
        den = float(np.sum(w[live]))
    if den == 0:
        raise ValueError("perturbation measure undefined: no weighted node has an edge")
    return num / den


# --- report ------------------------------------------------------------------

@dataclass
class EvaluationReport:
    success_rate: float
    error_rate: float
    unidentified_rate: float
    perturbation_measure: float | None = None
    n_correct: int = 0
    n_wrong: int = 0
    n_spurious: int = 0
    breach_flags: dict[int, bool] = field(default_factory=dict)

    def summary(self) -> dict:
        d = asdict(self)
        flags = d.pop("breach_flags")
        d["n_breach_checked"] = len(flags)
        d["n_breached"] = sum(flags.values())
        return d


def synthetic_attributes(n_san: int, alphabet: int, rng: np.random.Generator, name: str = "label",
                         delta: float = 0.5, policy: str = PRIV) -> AttributeTable:
    """One uniformly assigned discrete label per target node, uniform prior."""
    vals = rng.integers(0, alphabet, size=n_san)
    return AttributeTable(node_values={name: dict(enumerate(vals.tolist()))},
                          policy={name: policy}, delta=delta)


def evaluate(g_aux: DirectedGraph, g_san: DirectedGraph, ground_truth: Mapping, mu: Mapping,
             attrs: AttributeTable | None = None, attribute: str = "label", alphabet: int | None = None) -> EvaluationReport:
    """Full report for a deterministic mapping.

    The perturbation measure compares the two views of the shared nodes:
    the auxiliary edges among ground-truth nodes, translated into target
    ids, against the target edges among their images, weighted by target
    degree.
    """
    nu_aux, nu_san = degree_centrality(g_aux), degree_centrality(g_san)
    pm = ProbabilisticMapping.from_mapping(mu)
    success, error = success_error_rates(pm, ground_truth, nu_aux, nu_san)
    correct, wrong = count_outcomes(mu, ground_truth)
    gt = ground_truth.pairs

    s, d = g_aux.edge_arrays()
    gt_arr = np.full(g_aux.n, -1, dtype=np.int64)
    if gt:
        gt_arr[np.fromiter(gt.keys(), np.int64)] = np.fromiter(gt.values(), np.int64)
    m = (gt_arr[s] >= 0) & (gt_arr[d] >= 0)
    on_image = np.zeros(g_san.n, dtype=bool)
    on_image[gt_arr[gt_arr >= 0]] = True
    ss, sd = g_san.edge_arrays()
    k = on_image[ss] & on_image[sd]
    try:
        pert = perturbation_measure(DirectedGraph(g_san.n, gt_arr[s[m]], gt_arr[d[m]]),
                                    DirectedGraph(g_san.n, ss[k], sd[k]), nu_san)
    except ValueError:
        pert = None

    flags = {}
    if attrs is not None:
        values = attrs.node_values.get(attribute, {})
        label = attrs.policy.get(attribute, PRIV)
        for v, true_img in gt.items():
            true_value = values.get(true_img, BOTTOM)
            if true_value is BOTTOM:
                continue
            prior = attrs.prior.get((attribute, v))
            if prior is None and alphabet:
                prior = {x: 1 / alphabet for x in range(alphabet)}
            post = adversary_posterior(pm, attrs, attribute, v)
            flags[v] = breach_check(prior or {}, post, true_value, attrs.delta, label)
    return EvaluationReport(success, error, 1.0 - success - error, pert, correct, wrong,
                            spurious_count(mu, ground_truth), flags)
