"""Seeded random-line disaster simulator.

Lines are drawn uniformly with respect to ``d(rho) d(theta)`` among those
meeting the area of interest, by rejection from ``[0, h_max] x [-pi, pi)``;
the destroyed side is a fair coin. Draws come in fixed-size blocks and block
``j`` is generated from its own stream keyed by ``(seed, j)``, so line ``k`` is
a pure function of ``(seed, k)`` and estimates do not depend on how blocks are
spread over worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .geometry import (
    ConvexRegion,
    DirectedLine,
    convex_hull,
    hull_perimeter,
    recentered,
    support_from_table,
    support_table,
    vertices_of,
)
from .network import (
    CONTAIN_TOL,
    Arrangement,
    NetworkError,
    NetworkModel,
    Scenario,
    is_connected_after,
    validate,
    validate_scenario,
)

BLOCK = 1 << 16


class LineBatch(NamedTuple):
    rho: np.ndarray
    theta: np.ndarray
    far: np.ndarray  # True: destroyed side is {p.n >= rho}

    def __len__(self):
        return len(self.rho)

    def line(self, k: int) -> DirectedLine:
        return DirectedLine(float(self.rho[k]), float(self.theta[k]), "far" if self.far[k] else "near")


@dataclass(frozen=True, eq=False)
class LineSampler:
    omega: ConvexRegion
    seed: int
    # test hook: rho = h_max * u**rho_power; anything but 1 biases the sampler
    rho_power: float = 1.0

    def __post_init__(self):
        if not self.omega.contains_origin():
            raise ValueError("sampler needs omega recentered around the origin")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2**64):
            raise ValueError("seed must be an integer in [0, 2**64)")

    @property
    def h_max(self) -> float:
        return self.omega.h_max

    def block(self, j: int) -> LineBatch:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(self.seed), int(j)])))
        rho_parts, theta_parts = [], []
        got = 0
        while got < BLOCK:
            theta = rng.uniform(-math.pi, math.pi, BLOCK)
            rho = self.h_max * rng.random(BLOCK) ** self.rho_power
            keep = rho <= self.omega.support(theta)
            rho_parts.append(rho[keep])
            theta_parts.append(theta[keep])
            got += int(keep.sum())
        far = rng.random(BLOCK) < 0.5
        return LineBatch(np.concatenate(rho_parts)[:BLOCK], np.concatenate(theta_parts)[:BLOCK], far)

    def batches(self, n: int, start_block: int = 0) -> Iterator[LineBatch]:
        """The first ``n`` lines, one block at a time."""
        j = start_block
        left = n
        while left > 0:
            b = self.block(j)
            if left < BLOCK:
                b = LineBatch(b.rho[:left], b.theta[:left], b.far[:left])
            yield b
            left -= len(b)
            j += 1

    def line(self, k: int) -> DirectedLine:
        return self.block(k // BLOCK).line(k % BLOCK)


def sample_disaster(sampler: LineSampler, k: int = 0) -> DirectedLine:
    """Draw number ``k`` of the sampler's stream."""
    return sampler.line(k)


@dataclass(frozen=True)
class Estimate:
    p_hat: float
    n: int
    seed: int
    count: int = 0

    @property
    def stderr(self) -> float:
        return math.sqrt(self.p_hat * (1.0 - self.p_hat) / self.n)


# ---------------------------------------------------------------- vectorized model


def _flip(theta: np.ndarray) -> np.ndarray:
    t = theta + math.pi
    return np.where(t >= math.pi, t - 2 * math.pi, t)


class _Hulls:
    """Support tables of a list of vertex sets, evaluated over line batches."""

    def __init__(self, vertex_sets: Sequence[np.ndarray]):
        self.tables = [support_table(convex_hull(v).vertices) for v in vertex_sets]

    def meets(self, batch: LineBatch) -> np.ndarray:
        """(m, k) bool: does the closed disaster half-plane meet set k."""
        out = np.empty((len(batch), len(self.tables)), dtype=bool)
        back = _flip(batch.theta)
        for k, tab in enumerate(self.tables):
            hi = support_from_table(tab, batch.theta)
            lo = -support_from_table(tab, back)
            out[:, k] = np.where(batch.far, hi >= batch.rho, lo <= batch.rho)
        return out

    def crossed(self, batch: LineBatch) -> np.ndarray:
        """(m, k) bool: does the line itself meet set k."""
        out = np.empty((len(batch), len(self.tables)), dtype=bool)
        back = _flip(batch.theta)
        for k, tab in enumerate(self.tables):
            hi = support_from_table(tab, batch.theta)
            lo = -support_from_table(tab, back)
            out[:, k] = (lo <= batch.rho) & (batch.rho <= hi)
        return out


class CompiledNetwork:
    """A recentered network ready for batch evaluation."""

    def __init__(self, network: NetworkModel):
        omega, (dx, dy) = recentered(network.omega)
        self.offset = (dx, dy)
        self.network = network.translated(dx, dy) if (dx or dy) else network
        self.omega = self.network.omega
        self.link_ids = list(self.network.link_ids)
        self.hulls = _Hulls([lk.geometry.vertices for lk in self.network.links])
        self._cache: dict[bytes, bool] = {}

    def vulnerable_mask(self, arrangement: Arrangement, disaster_level: int = 1) -> np.ndarray:
        return np.array([arrangement.vulnerable(lk, disaster_level) for lk in self.network.links])

    def meets(self, batch: LineBatch) -> np.ndarray:
        return self.hulls.meets(batch)

    def disconnected(self, destroyed: np.ndarray) -> np.ndarray:
        """Per-row s-t disconnection for an (m, L) destroyed-link matrix."""
        packed = np.packbits(destroyed, axis=1)
        uniq, inverse = np.unique(packed, axis=0, return_inverse=True)
        verdict = np.empty(len(uniq), dtype=bool)
        for u, row in enumerate(uniq):
            key = row.tobytes()
            hit = self._cache.get(key)
            if hit is None:
                bits = np.unpackbits(row)[: len(self.link_ids)].astype(bool)
                gone = [lid for lid, b in zip(self.link_ids, bits) if b]
                hit = not is_connected_after(self.network, gone)
                self._cache[key] = hit
            verdict[u] = hit
        return verdict[inverse.reshape(-1)]


def _require_scenario(scenario: Scenario):
    diags = validate_scenario(scenario)
    if diags:
        raise NetworkError("invalid scenario", diags)


def disconnections(scenario: Scenario, batch: LineBatch, compiled: CompiledNetwork | None = None) -> np.ndarray:
    """Boolean disconnection verdict for every line of ``batch`` (recentered frame)."""
    cn = compiled or CompiledNetwork(scenario.network)
    vuln = cn.vulnerable_mask(scenario.arrangement, scenario.disaster_level)
    return cn.disconnected(cn.meets(batch) & vuln)


_WORKER: dict = {}


def _init_worker(scenario, seed, rho_power):
    _WORKER["scenario"] = scenario
    _WORKER["compiled"] = CompiledNetwork(scenario.network)
    _WORKER["sampler"] = LineSampler(_WORKER["compiled"].omega, seed, rho_power)


def _count_block(job) -> int:
    j, count = job
    sampler = _WORKER["sampler"]
    b = sampler.block(j)
    if count < BLOCK:
        b = LineBatch(b.rho[:count], b.theta[:count], b.far[:count])
    return int(disconnections(_WORKER["scenario"], b, _WORKER["compiled"]).sum())


def estimate_disconnect(scenario: Scenario, n: int, seed: int, workers: int = 1, rho_power: float = 1.0) -> Estimate:
    """Monte Carlo probability that s and t are disconnected."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _require_scenario(scenario)
    jobs = [(j, min(BLOCK, n - j * BLOCK)) for j in range(math.ceil(n / BLOCK))]
    if workers <= 1:
        _init_worker(scenario, seed, rho_power)
        counts = [_count_block(job) for job in jobs]
    else:
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(scenario, seed, rho_power)) as ex:
            counts = list(ex.map(_count_block, jobs))
    total = sum(counts)
    return Estimate(total / n, n, seed, total)


# ---------------------------------------------------------------- self tests


@dataclass(frozen=True)
class SelfTestReport:
    target: float
    estimate: Estimate
    label: str = ""

    @property
    def abs_diff(self) -> float:
        return abs(self.estimate.p_hat - self.target)

    @property
    def gate(self) -> float:
        return 4.0 * self.estimate.stderr

    @property
    def passed(self) -> bool:
        return self.abs_diff <= self.gate


def sampler_self_test(omega: ConvexRegion, C, n: int, seed: int, rho_power: float = 1.0, label: str = "") -> SelfTestReport:
    """Compare the hit rate of ``cv C`` with ``perimeter(cv C) / perimeter(omega)``."""
    v = vertices_of(C)
    if len(v) == 0 or not np.all(omega.contains(v, CONTAIN_TOL)):
        raise ValueError("test set must be non-empty and inside omega")
    om, (dx, dy) = recentered(omega)
    hulls = _Hulls([v + (dx, dy)])
    sampler = LineSampler(om, seed, rho_power)
    hits = sum(int(hulls.crossed(b)[:, 0].sum()) for b in sampler.batches(n))
    return SelfTestReport(hull_perimeter([v]) / omega.perimeter, Estimate(hits / n, n, seed, hits), label)


# ---------------------------------------------------------------- replays


def _same_frame(a: NetworkModel, b: NetworkModel) -> bool:
    ca, cb = a.omega.centroid, b.omega.centroid
    return (
        math.isclose(a.omega.perimeter, b.omega.perimeter, rel_tol=1e-12)
        and math.dist(ca, cb) <= 1e-12
        and math.dist(a.nodes[a.s], b.nodes[b.s]) <= 1e-9
        and math.dist(a.nodes[a.t], b.nodes[b.t]) <= 1e-9
    )


def per_sample_equivalence(net_a: NetworkModel, net_b: NetworkModel, n: int, seed: int) -> int:
    """Replay one line stream on both networks (weakest arrangement) and count
    the lines on which their disconnection verdicts differ."""
    if not _same_frame(net_a, net_b):
        raise ValueError("networks must share omega, s and t")
    for net in (net_a, net_b):
        diags = validate(net)
        if diags:
            raise NetworkError("invalid network", diags)
    ca, cb = CompiledNetwork(net_a), CompiledNetwork(net_b)
    sampler = LineSampler(ca.omega, seed)
    mismatches = 0
    for b in sampler.batches(n):
        da = ca.disconnected(ca.meets(b))
        db = cb.disconnected(cb.meets(b))
        mismatches += int((da != db).sum())
    return mismatches


@dataclass(frozen=True)
class DominanceRow:
    arrangement: Arrangement
    disaster_level: int
    p_hat: float
    p_weakest: float
    containment_violations: int
    n: int

    @property
    def dominated(self) -> bool:
        return self.containment_violations == 0 and self.p_hat <= self.p_weakest


def arrangement_dominance_test(
    base: Scenario,
    arrangements: Sequence[Arrangement | tuple[Arrangement, int]],
    n: int,
    seed: int,
) -> list[DominanceRow]:
    """Replay one line stream under each arrangement and under the weakest one.

    Items of ``arrangements`` may be ``(arrangement, disaster_level)`` pairs.
    """
    _require_scenario(base)
    cn = CompiledNetwork(base.network)
    sampler = LineSampler(cn.omega, seed)
    items = [a if isinstance(a, tuple) else (a, base.disaster_level) for a in arrangements]
    masks = [cn.vulnerable_mask(a, lvl) for a, lvl in items]
    weak_hits = 0
    hits = [0] * len(items)
    violations = [0] * len(items)
    for b in sampler.batches(n):
        meets = cn.meets(b)
        weak_hits += int(cn.disconnected(meets).sum())
        for k, mask in enumerate(masks):
            destroyed = meets & mask
            violations[k] += int((destroyed & ~meets).any(axis=1).sum())
            hits[k] += int(cn.disconnected(destroyed).sum())
    return [
        DominanceRow(a, lvl, hits[k] / n, weak_hits / n, violations[k], n) for k, (a, lvl) in enumerate(items)
    ]
