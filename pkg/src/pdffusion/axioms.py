"""Randomized numerical checks of the pooling axioms.

Each axiom is an identity that a fused pdf either satisfies or does not.
The harness draws random opinion profiles (Gaussian mixtures on a fixed
grid), random grid events and random bounded likelihoods, evaluates the
identity, and reports the largest residual seen. A report that finds no
violation is evidence, not proof: blank entries of the expected matrix
should be read as "no violation found", never as "satisfied".
"""

from __future__ import annotations

import dataclasses
import enum
import math

import numpy as np

from . import grid as gridmod
from .errors import UnsupportedAxiomError
from .grid import GridDensity, OpinionProfile, event_probability
from .pooling import ChiKind, PoolingKind, PoolingSpec, bayes_update, pool

DEFAULT_TOL = 1e-6
DEFAULT_TRIALS = 100

# harness domains: checks are grid-resolution statements, not user data
GRID_1D = ((-5.0,), (5.0,), (512,))
GRID_2D = ((-5.0, -5.0), (5.0, 5.0), (65, 65))

PROBE_PAIRS = 8
_TINY = 1e-300


class Axiom(enum.Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"
    A5 = "A5"
    A6 = "A6"
    A7 = "A7"
    A8 = "A8"
    A9 = "A9"
    A10 = "A10"
    A11 = "A11"
    A12 = "A12"


class AxiomStatus(enum.Enum):
    SATISFIED = "satisfied"
    NOT_ESTABLISHED = "violated-or-unknown"
    NOT_APPLICABLE = "n.a."
    EQUAL_WEIGHTS_ONLY = "equal-weights-only"


@dataclasses.dataclass(frozen=True)
class AxiomCounterexample:
    """Locator for the worst violating trial of a failed check."""

    trial: int
    seed: int
    detail: str


@dataclasses.dataclass(frozen=True)
class AxiomCheckReport:
    axiom: Axiom
    pooling: PoolingSpec
    trials: int
    max_violation: float
    passed: bool
    counterexample: AxiomCounterexample | None

    def __post_init__(self):
        if self.passed == (self.counterexample is not None):
            raise ValueError("counterexample must be present exactly when the check failed")


# expected pass/fail matrix, one row per pooling kind, columns A1..A12;
# 's' satisfied, '.' not established, 'n' not applicable, '*' equal weights only
_MATRIX_ROWS = {
    PoolingKind.LINEAR: "*ssssss.....",
    PoolingKind.GENERALIZED_LINEAR: "*...s.s.....",
    PoolingKind.LOG_LINEAR: "*ns..ss.ss.s",
    PoolingKind.GENERALIZED_LOG_LINEAR: "*n....s.ss.s",
    PoolingKind.HOLDER: "*ns..ss.....",
    PoolingKind.INVERSE_LINEAR: "*ns..ss.....",
    PoolingKind.MULTIPLICATIVE: "sn....s.s.ss",
    PoolingKind.GENERALIZED_MULTIPLICATIVE: "*n....s.s..s",
    PoolingKind.DICTATORSHIP: ".sssssssss.s",
    PoolingKind.DOGMATIC: "s...s.s....s",
}

_STATUS_CODES = {
    "s": AxiomStatus.SATISFIED,
    ".": AxiomStatus.NOT_ESTABLISHED,
    "n": AxiomStatus.NOT_APPLICABLE,
    "*": AxiomStatus.EQUAL_WEIGHTS_ONLY,
}


def expected_matrix() -> dict[tuple[PoolingKind, Axiom], AxiomStatus]:
    """The expected status of every (pooling kind, axiom) pair.

    Transform-space pooling is excluded: its behaviour follows the pool it
    reproduces (identity: linear, log: log-linear, reciprocal:
    inverse-linear, power: Holder).
    """
    out = {}
    for kind, row in _MATRIX_ROWS.items():
        for axiom, code in zip(Axiom, row):
            out[(kind, axiom)] = _STATUS_CODES[code]
    return out


def _template(spec3):
    lower, upper, shape = spec3
    return GridDensity(lower, upper, shape, np.ones(shape))


_T1 = _template(GRID_1D)
_T2 = _template(GRID_2D)

# axioms about independence or factorization need a 2-D state space
_TWO_DIM_AXIOMS = (Axiom.A8, Axiom.A9)

_ZERO_EVENT_UNSAFE = frozenset(
    {
        PoolingKind.LOG_LINEAR,
        PoolingKind.GENERALIZED_LOG_LINEAR,
        PoolingKind.HOLDER,
        PoolingKind.INVERSE_LINEAR,
        PoolingKind.MULTIPLICATIVE,
        PoolingKind.GENERALIZED_MULTIPLICATIVE,
    }
)


def _zero_events_unsupported(spec: PoolingSpec) -> bool:
    if spec.kind in _ZERO_EVENT_UNSAFE:
        return True
    if spec.kind is PoolingKind.CHI_TRANSFORM:
        return spec.chi is not None and spec.chi.needs_positive
    return False


def _agent_count(spec: PoolingSpec) -> int:
    if spec.weights is not None:
        return len(np.asarray(spec.weights).ravel())
    if spec.kind is PoolingKind.DICTATORSHIP:
        return max(2, int(spec.dictator))
    return 3


def _l1(template: GridDensity, a: GridDensity, b: GridDensity) -> float:
    return float(np.sum(template.quad_weights * np.abs(a.values - b.values)))


def _mixture_on_axis(rng, x: np.ndarray) -> np.ndarray:
    """Unnormalized 1-3 component Gaussian mixture, strictly positive on x."""
    n = int(rng.integers(1, 4))
    comp_w = rng.dirichlet(np.ones(n))
    span = x[-1] - x[0]
    means = rng.uniform(x[0] + 0.2 * span, x[-1] - 0.2 * span, size=n)
    sds = rng.uniform(0.3, 1.5, size=n)
    vals = np.zeros_like(x)
    for cw, m, s in zip(comp_w, means, sds):
        vals += cw * np.exp(-0.5 * ((x - m) / s) ** 2) / (s * math.sqrt(2.0 * math.pi))
    return vals


def _random_density(rng, template: GridDensity, broad: bool = False) -> GridDensity:
    if template.dims == 1:
        vals = _mixture_on_axis(rng, template.axes[0])
        if broad:
            # flatten toward a wide single bump so negative exponents stay tame
            x = template.axes[0]
            s = rng.uniform(1.0, 1.5)
            m = rng.uniform(-2.0, 2.0)
            vals = np.exp(-0.5 * ((x - m) / s) ** 2)
    else:
        x1, x2 = template.axes
        if broad:
            s1, s2 = rng.uniform(1.0, 1.5, size=2)
            m1, m2 = rng.uniform(-2.0, 2.0, size=2)
            f = np.exp(-0.5 * ((x1 - m1) / s1) ** 2)
            g = np.exp(-0.5 * ((x2 - m2) / s2) ** 2)
        else:
            f = _mixture_on_axis(rng, x1)
            g = _mixture_on_axis(rng, x2)
        vals = np.outer(f, g)
    return gridmod.normalize(template.with_values(vals))


def _random_profile(rng, K: int, template: GridDensity) -> OpinionProfile:
    return OpinionProfile(tuple(_random_density(rng, template) for _ in range(K)))


def _random_xi0(rng, template: GridDensity) -> np.ndarray:
    """Bounded, strictly positive calibration function on the grid."""

    def axis_part(x):
        c = rng.uniform(-3.0, 3.0)
        s = rng.uniform(0.8, 2.0)
        return 0.3 + rng.uniform(0.5, 1.5) * np.exp(-0.5 * ((x - c) / s) ** 2)

    if template.dims == 1:
        return axis_part(template.axes[0])
    return np.outer(axis_part(template.axes[0]), axis_part(template.axes[1]))


def _with_companions(spec: PoolingSpec, rng, template: GridDensity) -> PoolingSpec:
    """Fill in the side inputs a kind needs, drawn on the harness grid.

    The caller's spec fixes kind, weights, alpha, dictator and chi; the
    fixed density q0 and the calibration function xi0 are scenario data and
    are redrawn per trial (product-form on 2-D grids, so factorization
    claims are about the agents, not the companion).
    """
    updates = {}
    if spec.kind in (
        PoolingKind.GENERALIZED_LINEAR,
        PoolingKind.MULTIPLICATIVE,
        PoolingKind.DOGMATIC,
    ):
        updates["q0"] = _random_density(rng, template)
    elif spec.kind is PoolingKind.GENERALIZED_MULTIPLICATIVE:
        updates["q0"] = _random_density(rng, template, broad=True)
    elif spec.kind is PoolingKind.GENERALIZED_LOG_LINEAR:
        updates["xi0"] = _random_xi0(rng, template)
    if not updates:
        return spec
    return dataclasses.replace(spec, **updates)


def _random_cells_1d(rng, ncells: int, max_total: int = 128) -> np.ndarray:
    mask = np.zeros(ncells, dtype=bool)
    pieces = int(rng.integers(1, 3))
    for _ in range(pieces):
        length = int(rng.integers(8, 1 + max_total // pieces))
        start = int(rng.integers(0, ncells - length + 1))
        mask[start : start + length] = True
    return mask


def _nodes_of_cells_1d(mask: np.ndarray) -> np.ndarray:
    nodes = np.zeros(mask.size + 1, dtype=bool)
    nodes[:-1] |= mask
    nodes[1:] |= mask
    return nodes


def _disjoint_cell_pair(rng, ncells: int) -> tuple[np.ndarray, np.ndarray]:
    for _ in range(200):
        a = _random_cells_1d(rng, ncells, max_total=64)
        b = _random_cells_1d(rng, ncells, max_total=64)
        if not np.any(_nodes_of_cells_1d(a) & _nodes_of_cells_1d(b)):
            return a, b
    raise RuntimeError("could not draw disjoint events")


def _masses(profile: OpinionProfile, cells: np.ndarray) -> np.ndarray:
    return np.array([event_probability(q, cells) for q in profile.densities])


def _scaled_to_mass(
    template: GridDensity, cand: GridDensity, cells: np.ndarray, nodes, target: float
):
    """Two-level node scaling: event mass becomes ``target``, total stays one.

    ``target`` must not exceed the candidate's current event mass; scaling
    down inside the event and up outside keeps every value positive.
    """
    w = template.quad_weights
    a = target / event_probability(cand, cells)
    covered = float(np.sum(w[nodes] * cand.values[nodes]))
    b = (1.0 - a * covered) / (1.0 - covered)
    vals = cand.values.copy()
    vals[nodes] *= a
    vals[~nodes] *= b
    return gridmod.normalize(template.with_values(vals))


def _matched_mass_pair(
    rng, template: GridDensity, cells: np.ndarray, K: int
) -> tuple[OpinionProfile, OpinionProfile]:
    """Two profiles of distinct shapes with identical per-agent event masses.

    Each agent's pair is built from two independent draws downscaled to a
    common event mass, so the construction never needs a retry.
    """
    nodes = _nodes_of_cells_1d(cells)
    first, second = [], []
    for _ in range(K):
        one = _random_density(rng, template)
        two = _random_density(rng, template)
        target = 0.5 * min(event_probability(one, cells), event_probability(two, cells))
        first.append(_scaled_to_mass(template, one, cells, nodes, target))
        second.append(_scaled_to_mass(template, two, cells, nodes, target))
    return OpinionProfile(tuple(first)), OpinionProfile(tuple(second))


def _equalized_two_events(
    rng, template: GridDensity, cells_a: np.ndarray, cells_b: np.ndarray, K: int
) -> OpinionProfile:
    """A profile giving every agent identical mass on two disjoint events."""
    nodes_a = _nodes_of_cells_1d(cells_a)
    nodes_b = _nodes_of_cells_1d(cells_b)
    rest = ~(nodes_a | nodes_b)
    w = template.quad_weights
    members = []
    for _ in range(K):
        cand = _random_density(rng, template)
        ma = event_probability(cand, cells_a)
        mb = event_probability(cand, cells_b)
        target = 0.5 * min(ma, mb)
        a = target / ma
        c = target / mb
        ja = float(np.sum(w[nodes_a] * cand.values[nodes_a]))
        jb = float(np.sum(w[nodes_b] * cand.values[nodes_b]))
        b = (1.0 - a * ja - c * jb) / (1.0 - ja - jb)
        vals = cand.values.copy()
        vals[nodes_a] *= a
        vals[nodes_b] *= c
        vals[rest] *= b
        members.append(gridmod.normalize(template.with_values(vals)))
    return OpinionProfile(tuple(members))


def _random_likelihood(rng, x: np.ndarray) -> np.ndarray:
    """Bounded positive likelihood: a plateau step or a Gaussian bump."""
    if rng.random() < 0.5:
        ell = np.full_like(x, rng.uniform(0.2, 0.6))
        lo, hi = np.sort(rng.uniform(x[0], x[-1], size=2))
        ell[(x >= lo) & (x <= hi)] += rng.uniform(0.5, 2.0)
    else:
        c = rng.uniform(-3.0, 3.0)
        s = rng.uniform(0.5, 2.0)
        ell = 0.3 + rng.uniform(0.5, 2.0) * np.exp(-0.5 * ((x - c) / s) ** 2)
    return ell


def _rel_diff(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), _TINY)


def _ratio_spread(ratios: np.ndarray) -> float:
    med = float(np.median(ratios))
    if med == 0.0:
        return float(np.max(np.abs(ratios)))
    return float(np.max(np.abs(ratios / med - 1.0)))


# ---------------------------------------------------------------------------
# per-axiom trial functions; each returns (violation, detail)


def _trial_symmetry(spec, rng, template, K):
    profile = _random_profile(rng, K, template)
    s = _with_companions(spec, rng, template)
    order = rng.permutation(K)
    while K > 1 and np.array_equal(order, np.arange(K)):
        order = rng.permutation(K)
    v = _l1(template, pool(s, profile), pool(s, profile.permuted(order)))
    return v, f"agent order {tuple(int(i) for i in order)} moved the pool by L1 {v:.3g}"


def _trial_zero_preservation(spec, rng, template, K):
    cells = _random_cells_1d(rng, template.shape[0] - 1)
    nodes = _nodes_of_cells_1d(cells)
    members = []
    for _ in range(K):
        cand = _random_density(rng, template)
        vals = cand.values.copy()
        vals[nodes] = 0.0
        members.append(gridmod.normalize(template.with_values(vals)))
    profile = OpinionProfile(tuple(members))
    s = _with_companions(spec, rng, template)
    v = abs(event_probability(pool(s, profile), cells))
    return v, f"all-agents-null event of {int(cells.sum())} cells got fused mass {v:.3g}"


def _trial_unanimity(spec, rng, template, K):
    q = _random_density(rng, template)
    profile = OpinionProfile((q,) * K)
    s = _with_companions(spec, rng, template)
    v = _l1(template, pool(s, profile), q)
    return v, f"unanimous profile fused L1 {v:.3g} away from the shared pdf"


def _event_function_residual(spec, rng, template, K, cross_events: bool):
    s = _with_companions(spec, rng, template)
    cells = _random_cells_1d(rng, template.shape[0] - 1)
    profile = _random_profile(rng, K, template)
    fused_mass = event_probability(pool(s, profile), cells)
    parts = []

    # constructive anchors where the combining function is known in closed form
    agent_masses = _masses(profile, cells)
    if spec.kind is PoolingKind.LINEAR:
        parts.append(abs(fused_mass - float(np.dot(spec.weights, agent_masses))))
    elif spec.kind is PoolingKind.DICTATORSHIP:
        parts.append(abs(fused_mass - agent_masses[spec.dictator - 1]))
    elif not cross_events and spec.kind is PoolingKind.GENERALIZED_LINEAR:
        anchor = spec.w0 * event_probability(s.q0, cells) + float(
            np.dot(spec.weights, agent_masses)
        )
        parts.append(abs(fused_mass - anchor))
    elif not cross_events and spec.kind is PoolingKind.DOGMATIC:
        parts.append(abs(fused_mass - event_probability(s.q0, cells)))

    # same event, two engineered profiles with identical per-agent masses
    left, right = _matched_mass_pair(rng, template, cells, K)
    parts.append(
        abs(
            event_probability(pool(s, left), cells)
            - event_probability(pool(s, right), cells)
        )
    )

    if cross_events:
        cells_a, cells_b = _disjoint_cell_pair(rng, template.shape[0] - 1)
        both = _equalized_two_events(rng, template, cells_a, cells_b, K)
        fused = pool(s, both)
        parts.append(
            abs(event_probability(fused, cells_a) - event_probability(fused, cells_b))
        )

    v = max(parts)
    kind = "event/profile pairs" if cross_events else "matched-mass profiles"
    return v, f"fused event mass drifted {v:.3g} across {kind}"


def _trial_strong_setwise(spec, rng, template, K):
    return _event_function_residual(spec, rng, template, K, cross_events=True)


def _trial_weak_setwise(spec, rng, template, K):
    return _event_function_residual(spec, rng, template, K, cross_events=False)


def _pick_probes(rng, n: int, count: int) -> np.ndarray:
    lo = int(0.1 * n)
    hi = int(0.9 * n)
    return rng.choice(np.arange(lo, hi), size=count, replace=False)


def _trial_local_values(spec, rng, template, K):
    """Equal agent values at two states should give equal fused values."""
    s = _with_companions(spec, rng, template)
    x = template.axes[0]
    for _ in range(40):
        probes = _pick_probes(rng, template.shape[0], 2 * PROBE_PAIRS)
        src, dst = probes[:PROBE_PAIRS], probes[PROBE_PAIRS:]
        c_bump = rng.uniform(-2.0, 2.0)
        s_bump = rng.uniform(1.5, 3.0)
        bump = np.exp(-0.5 * ((x - c_bump) / s_bump) ** 2)
        bump[probes] = 0.0
        members = []
        for q in _random_profile(rng, K, template).densities:
            vals = q.values.copy()
            vals[dst] = vals[src]
            w = template.quad_weights
            deficit = 1.0 - float(np.sum(w * vals))
            denom = float(np.sum(w * vals * bump))
            if abs(denom) < 1e-9:
                members = None
                break
            scale = deficit / denom
            if abs(scale) * float(bump.max()) >= 0.9:
                members = None
                break
            members.append(gridmod.normalize(template.with_values(vals * (1.0 + scale * bump))))
        if members is not None:
            break
    if members is None:
        return 0.0, "no admissible probe construction"
    fused = pool(s, OpinionProfile(tuple(members))).values
    v = max(_rel_diff(float(fused[a]), float(fused[b])) for a, b in zip(src, dst))
    return v, f"fused values differ by {v:.3g} at states where all agents agree"


def _trial_local_values_two_profiles(spec, rng, template, K):
    """Profiles agreeing at probe states should fuse proportionally there."""
    s = _with_companions(spec, rng, template)
    x = template.axes[0]
    base = _random_profile(rng, K, template)
    w = template.quad_weights
    for _ in range(40):
        probes = _pick_probes(rng, template.shape[0], PROBE_PAIRS)
        c1, c2 = rng.uniform(-3.0, 3.0, size=2)
        s1, s2 = rng.uniform(0.8, 2.0, size=2)
        b1 = np.exp(-0.5 * ((x - c1) / s1) ** 2)
        b2 = np.exp(-0.5 * ((x - c2) / s2) ** 2)
        b1[probes] = 0.0
        b2[probes] = 0.0
        amp = 0.25
        members = []
        while amp > 1e-3:
            members = []
            for q in base.densities:
                denom = float(np.sum(w * q.values * b2))
                if abs(denom) < 1e-9:
                    members = None
                    break
                t = -amp * float(np.sum(w * q.values * b1)) / denom
                mod = 1.0 + amp * b1 + t * b2
                if mod.min() <= 0.1:
                    members = None
                    break
                members.append(gridmod.normalize(template.with_values(q.values * mod)))
            if members is not None:
                break
            amp *= 0.5
        if members:
            break
    if not members:
        return 0.0, "no admissible modulation found"
    fused_base = pool(s, base).values[probes]
    fused_mod = pool(s, OpinionProfile(tuple(members))).values[probes]
    v = _ratio_spread(fused_mod / fused_base)
    return v, f"probe-state fused ratio varies by {v:.3g} across profiles"


def _axis_interval(rng, ncells: int) -> np.ndarray:
    length = int(rng.integers(4, max(5, ncells // 3)))
    start = int(rng.integers(0, ncells - length + 1))
    mask = np.zeros(ncells, dtype=bool)
    mask[start : start + length] = True
    return mask


def _trial_independence(spec, rng, template, K):
    s = _with_companions(spec, rng, template)
    profile = _random_profile(rng, K, template)
    n1, n2 = template.shape
    ia = _axis_interval(rng, n1 - 1)
    ib = _axis_interval(rng, n2 - 1)
    full1 = np.ones(n1 - 1, dtype=bool)
    full2 = np.ones(n2 - 1, dtype=bool)
    fused = pool(s, profile)
    pa = event_probability(fused, np.outer(ia, full2))
    pb = event_probability(fused, np.outer(full1, ib))
    pab = event_probability(fused, np.outer(ia, ib))
    v = abs(pab - pa * pb)
    return v, f"axis events: P(AB)={pab:.4g} vs P(A)P(B)={pa * pb:.4g}"


def _trial_factorization(spec, rng, template, K):
    s = _with_companions(spec, rng, template)
    profile = _random_profile(rng, K, template)
    fused = pool(s, profile)
    n1, n2 = template.shape
    w1 = np.full(n1, float(template.spacing[0]))
    w1[[0, -1]] *= 0.5
    w2 = np.full(n2, float(template.spacing[1]))
    w2[[0, -1]] *= 0.5
    marg1 = fused.values @ w2
    marg2 = w1 @ fused.values
    v = float(np.sum(template.quad_weights * np.abs(fused.values - np.outer(marg1, marg2))))
    return v, f"fused pdf is L1 {v:.3g} from the product of its marginals"


def _updated(profile: OpinionProfile, ells) -> OpinionProfile:
    return OpinionProfile(tuple(bayes_update(q, e) for q, e in zip(profile.densities, ells)))


def _trial_common_update(spec, rng, template, K):
    s = _with_companions(spec, rng, template)
    profile = _random_profile(rng, K, template)
    ell = _random_likelihood(rng, template.axes[0])
    after = pool(s, _updated(profile, [ell] * K))
    before = bayes_update(pool(s, profile), ell)
    v = _l1(template, after, before)
    return v, f"update-then-pool vs pool-then-update differ by L1 {v:.3g}"


def _trial_single_agent_update(spec, rng, template, K):
    s = _with_companions(spec, rng, template)
    profile = _random_profile(rng, K, template)
    ell = _random_likelihood(rng, template.axes[0])
    j = int(rng.integers(K))
    ells = [np.ones(template.shape[0]) for _ in range(K)]
    ells[j] = ell
    after = pool(s, _updated(profile, ells))
    before = bayes_update(pool(s, profile), ell)
    v = _l1(template, after, before)
    return v, f"agent {j + 1} update propagated with L1 error {v:.3g}"


_FUSED_LIKELIHOOD_KINDS = (
    PoolingKind.LOG_LINEAR,
    PoolingKind.GENERALIZED_LOG_LINEAR,
    PoolingKind.MULTIPLICATIVE,
    PoolingKind.GENERALIZED_MULTIPLICATIVE,
    PoolingKind.DICTATORSHIP,
    PoolingKind.DOGMATIC,
)


def _combined_likelihood(spec: PoolingSpec, ells) -> np.ndarray:
    kind = spec.kind
    if kind in (PoolingKind.LOG_LINEAR, PoolingKind.GENERALIZED_LOG_LINEAR):
        return np.prod([e ** w for e, w in zip(ells, spec.weights)], axis=0)
    if kind is PoolingKind.MULTIPLICATIVE:
        return np.prod(ells, axis=0)
    if kind is PoolingKind.GENERALIZED_MULTIPLICATIVE:
        return np.prod([e ** w for e, w in zip(ells, spec.weights)], axis=0)
    if kind is PoolingKind.DICTATORSHIP:
        return np.asarray(ells[spec.dictator - 1])
    if kind is PoolingKind.DOGMATIC:
        return np.ones_like(np.asarray(ells[0]))
    raise ValueError(f"no closed-form combined likelihood for {kind!r}")


def _trial_fused_likelihood(spec, rng, template, K):
    s = _with_companions(spec, rng, template)
    profile = _random_profile(rng, K, template)
    ells = [_random_likelihood(rng, template.axes[0]) for _ in range(K)]
    after = pool(s, _updated(profile, ells))
    if spec.kind in _FUSED_LIKELIHOOD_KINDS:
        before = bayes_update(pool(s, profile), _combined_likelihood(spec, ells))
        v = _l1(template, after, before)
        return v, f"closed-form fused likelihood misses by L1 {v:.3g}"
    # no closed form: the implied fused likelihood must not depend on the profile
    other = _random_profile(rng, K, template)
    after2 = pool(s, _updated(other, ells))
    n = template.shape[0]
    sl = slice(int(0.05 * n), int(0.95 * n))
    h1 = after.values[sl] / pool(s, profile).values[sl]
    h2 = after2.values[sl] / pool(s, other).values[sl]
    v = _ratio_spread(h1 / h2)
    return v, f"implied fused likelihood varies by {v:.3g} between profiles"


_TRIALS = {
    Axiom.A1: _trial_symmetry,
    Axiom.A2: _trial_zero_preservation,
    Axiom.A3: _trial_unanimity,
    Axiom.A4: _trial_strong_setwise,
    Axiom.A5: _trial_weak_setwise,
    Axiom.A6: _trial_local_values,
    Axiom.A7: _trial_local_values_two_profiles,
    Axiom.A8: _trial_independence,
    Axiom.A9: _trial_factorization,
    Axiom.A10: _trial_common_update,
    Axiom.A11: _trial_single_agent_update,
    Axiom.A12: _trial_fused_likelihood,
}


def check_axiom(
    spec: PoolingSpec,
    axiom: Axiom | str,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> AxiomCheckReport:
    """Run randomized trials of one axiom's identity against one pooling rule.

    Parameters
    ----------
    spec : PoolingSpec
        The rule under test. Its q0/xi0 companions, when the kind takes
        them, are redrawn on the harness grid each trial.
    axiom : Axiom or str
        Which identity to evaluate.
    trials : int
        Number of independent random scenarios.
    seed : int
        Seed for the scenario stream; identical inputs give identical
        reports.
    tol : float
        Largest residual still counted as agreement. Probabilities are
        compared absolutely, densities in L1, fused-value ratios
        relatively.

    Raises
    ------
    UnsupportedAxiomError
        For zero-probability-event checks against rules that require a
        strictly positive profile.
    """
    axiom = Axiom(axiom) if not isinstance(axiom, Axiom) else axiom
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if axiom is Axiom.A2 and _zero_events_unsupported(spec):
        raise UnsupportedAxiomError(
            f"{spec.kind.value} pooling requires a strictly positive profile; "
            "zero-probability events cannot arise"
        )
    template = _T2 if axiom in _TWO_DIM_AXIOMS else _T1
    K = _agent_count(spec)
    fn = _TRIALS[axiom]
    rng = np.random.default_rng(seed)
    worst = (0.0, 0, "no violation found")
    for i in range(trials):
        violation, detail = fn(spec, rng, template, K)
        if violation > worst[0]:
            worst = (violation, i, detail)
    passed = worst[0] <= tol
    counterexample = None
    if not passed:
        counterexample = AxiomCounterexample(trial=worst[1], seed=seed, detail=worst[2])
    return AxiomCheckReport(
        axiom=axiom,
        pooling=spec,
        trials=trials,
        max_violation=worst[0],
        passed=passed,
        counterexample=counterexample,
    )
