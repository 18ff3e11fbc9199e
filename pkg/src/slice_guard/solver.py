"""Exact placement search.

Three entry points share one decision order: procedures in canonical order, and
within a procedure its VNF types in order of first traversal. A decision maps
one (procedure, type) pair to an instance; chi never needs branching because
the flow rule fixes it once both endpoints of a virtual step are placed.

* :func:`solve` -- depth-first branch and bound, anytime, deterministic.
* :func:`greedy_warmstart` -- one pass over the decisions, used as the first incumbent.
* :func:`solve_bruteforce` -- exhaustive oracle for tiny instances; it scores every
  candidate through :mod:`slice_guard.evaluate` and shares no search code.

Ties between placements whose objectives agree within ``TIE_TOL`` are broken by
the decision encoding: per decision, (instance index in first-use order,
position of the hosting node). Depth-first order enumerates exactly that
lexicographic order, so both exact solvers return the same placement.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

from .evaluate import STABILITY_EPSILON, TOL, check_placement, derive_quantities
from .model import Placement, Scenario, SecurityToggles, SliceGuardError, Weights, validate_scenario

TIE_TOL = 1e-9
INF = math.inf


class Infeasible(SliceGuardError):
    pass


class TimeoutNoIncumbent(SliceGuardError):
    pass


class SpaceTooLarge(SliceGuardError):
    pass


class InvalidScenario(SliceGuardError):
    def __init__(self, violations):
        super().__init__(f"{len(violations)} scenario violation(s): {violations[:3]}")
        self.violations = violations


@dataclass(frozen=True)
class SolverConfig:
    time_limit: float = 3 * 3600.0
    node_limit: int | None = None
    toggles: SecurityToggles | None = None
    weights: Weights | None = None
    epsilon: float = STABILITY_EPSILON
    bound: str = "default"  # "default", "none" (no pruning) or "inflated" (inadmissible, test hook)
    warm_start: bool = True
    space_cap: int = 10**7
    node_order: str = "declaration"

    def __post_init__(self):
        if not self.time_limit > 0:
            raise ValueError("time_limit must be positive")
        if self.bound not in ("default", "none", "inflated"):
            raise ValueError(f"unknown bound mode {self.bound!r}")
        if self.node_order != "declaration":
            raise ValueError("only declaration order is supported")

    def apply(self, scenario: Scenario) -> Scenario:
        changes = {}
        if self.toggles is not None:
            changes["toggles"] = self.toggles
        if self.weights is not None:
            changes["weights"] = self.weights
        return scenario.replace(**changes) if changes else scenario


@dataclass
class SolveReport:
    best_placement: Placement | None
    objective: float
    proven_optimal: bool
    nodes_explored: int
    wall_time: float
    incumbent_history: list = field(default_factory=list)
    solver: str = "bnb"
    encoding: tuple = ()

    @property
    def status(self) -> str:
        return "optimal" if self.proven_optimal else "feasible"


class _Stop(Exception):
    pass


class _Problem:
    """Flat, index-based view of a scenario for the incremental search."""

    def __init__(self, scenario: Scenario, epsilon: float):
        self.scenario = scenario
        self.epsilon = epsilon
        self.toggles = scenario.toggles
        self.weights = scenario.weights
        if self.weights.capacity < 0 or self.weights.delay < 0:
            raise ValueError("objective weights must be non-negative")
        topo = scenario.topology
        self.nodes = list(topo.node_ids)
        self.node_pos = {n: k for k, n in enumerate(self.nodes)}
        self.cap = [topo.capacity[n] for n in self.nodes]
        N = len(self.nodes)
        self.link = [[None] * N for _ in range(N)]
        for (a, b), l in topo.link_map.items():
            self.link[self.node_pos[a]][self.node_pos[b]] = (l.delay, l.bandwidth)
        self.sym = [[self._swappable(a, b) for b in range(N)] for a in range(N)]

        self.types = [v.id for v in scenario.catalog]
        tpos = {t: k for k, t in enumerate(self.types)}
        cat = scenario.catalog
        self.base = [v.base_capacity for v in cat]
        self.mu = [v.per_unit_capacity for v in cat]
        self.omega = [v.service_rate for v in cat]
        self.zmax = [v.max_capacity for v in cat]
        self.ztmax = [v.max_traffic_capacity for v in cat]
        self.budget = [v.instance_budget for v in cat]
        self.pseudo = [v.is_pseudo for v in cat]

        self.procs = list(scenario.procedures)
        # per decision: (proc, type, traverses, rate, traffic, served, exposes)
        self.dec = []
        self.hops = []      # per decision: [(earlier decision, this is source, count)]
        self.prev = []      # per decision: decision of the preceding hop, or None
        self.last_of = []   # per decision: True when it completes its procedure
        self.proc_decs = []
        for q, p in enumerate(self.procs):
            vs = scenario.structures[p.key]
            first = len(self.dec)
            where = {}
            for t in vs.type_order:
                ti = tpos[t]
                trav = vs.traverse_count[t]
                lam = p.packet_rate
                where[t] = len(self.dec)
                self.dec.append((q, ti, trav, lam, lam * self.mu[ti] * trav, lam * self.mu[ti],
                                 p.external and t == vs.first_vnf))
                self.hops.append([])
                j = vs.sequence.index(t)
                self.prev.append(where[vs.sequence[j - 1]] if j > 0 else None)
                self.last_of.append(False)
            self.last_of[-1] = True
            for (a, b), c in vs.step_counts.items():
                ka, kb = where[a], where[b]
                if ka > kb:
                    self.hops[ka].append((kb, True, c))
                else:
                    self.hops[kb].append((ka, False, c))
            self.proc_decs.append(list(range(first, len(self.dec))))
        K = len(self.dec)
        self.K = K

        T = len(self.types)
        self.rem_traffic = [0.0] * (K + 1)
        self.rem_delay = [0.0] * (K + 1)
        self.rem_count = [[0] * (K + 1) for _ in range(T)]
        self.rem_traf_t = [[0.0] * (K + 1) for _ in range(T)]
        self.rem_served_t = [[0.0] * (K + 1) for _ in range(T)]
        for k in range(K - 1, -1, -1):
            q, ti, trav, lam, traffic, served, _ = self.dec[k]
            self.rem_traffic[k] = self.rem_traffic[k + 1] + traffic
            d = 0.0
            if not self.pseudo[ti] and lam < self.omega[ti]:
                d = trav * (1.0 / self.omega[ti] + 1.0 / (self.omega[ti] - lam))
            self.rem_delay[k] = self.rem_delay[k + 1] + d
            for t in range(T):
                self.rem_count[t][k] = self.rem_count[t][k + 1]
                self.rem_traf_t[t][k] = self.rem_traf_t[t][k + 1]
                self.rem_served_t[t][k] = self.rem_served_t[t][k + 1]
            self.rem_count[ti][k] += 1
            self.rem_traf_t[ti][k] += traffic
            self.rem_served_t[ti][k] += served
        self.rem_types = [
            [t for t in range(T) if self.rem_count[t][k] > 0] for k in range(K + 1)
        ]
        self.total_cap = sum(self.cap)

    def _swappable(self, a, b):
        """True when exchanging nodes a and b is an automorphism of the substrate."""
        if a == b or self.cap[a] != self.cap[b]:
            return False
        if self.link[a][b] != self.link[b][a]:
            return False
        for m in range(len(self.nodes)):
            if m in (a, b):
                continue
            if self.link[a][m] != self.link[b][m] or self.link[m][a] != self.link[m][b]:
                return False
        return True


class SearchState:
    """Partial assignment with incrementally maintained loads, capacities and bound terms."""

    def __init__(self, problem: _Problem):
        P = self.P = problem
        T, N = len(P.types), len(P.nodes)
        self.inst_node = [[] for _ in range(T)]
        self.load = [[] for _ in range(T)]
        self.traffic = [[] for _ in range(T)]
        self.served = [[] for _ in range(T)]
        self.travsum = [[] for _ in range(T)]
        self.slice_cnt = [[] for _ in range(T)]
        self.exposed = [[] for _ in range(T)]
        self.nonext = [[] for _ in range(T)]
        self.node_used = [0.0] * N
        self.node_count = [0] * N
        self.link_used = [[0.0] * N for _ in range(N)]
        self.dec_inst = [None] * P.K
        self.dec_node = [None] * P.K
        self.cap_committed = 0.0
        self.delay_sum = 0.0
        self.prop_sum = 0.0
        self._undo = []

    @classmethod
    def for_scenario(cls, scenario: Scenario, epsilon: float = STABILITY_EPSILON) -> "SearchState":
        return cls(_Problem(scenario, epsilon))

    @property
    def depth(self) -> int:
        return len(self._undo)

    def _delay(self, ti, load):
        w = self.P.omega[ti]
        return 1.0 / w + 1.0 / (w - load)

    def compatible(self, k, i, n, is_new) -> bool:
        P = self.P
        q, ti, trav, lam, traffic, served, exposes = P.dec[k]
        base = P.base[ti]
        cur_traffic = 0.0 if is_new else self.traffic[ti][i]
        if base + cur_traffic + traffic > P.zmax[ti] + TOL:
            return False
        if self.node_used[n] + traffic + (base if is_new else 0.0) > P.cap[n] + TOL:
            return False
        if P.toggles.max_traffic:
            cur = 0.0 if is_new else self.served[ti][i]
            if cur + served > P.ztmax[ti] + TOL:
                return False
        if not P.pseudo[ti]:
            cur = 0.0 if is_new else self.load[ti][i]
            if cur + lam >= P.omega[ti] - P.epsilon:
                return False
        if P.toggles.exposure:
            proc = P.procs[q]
            if is_new:
                ex, sl, nonext = (), (), 0
            else:
                ex, sl, nonext = self.exposed[ti][i], self.slice_cnt[ti][i], self.nonext[ti][i]
            exp_slices = set(ex)
            if exposes:
                exp_slices.add(proc.slice)
            if exp_slices:
                if len(exp_slices) > 1:
                    return False
                if not set(sl) | {proc.slice} <= exp_slices:
                    return False
                if nonext + (0 if proc.external else 1):
                    return False
        extra = None
        for other, is_src, c in P.hops[k]:
            m = self.dec_node[other]
            if m == n:
                continue
            a, b = (n, m) if is_src else (m, n)
            link = P.link[a][b]
            if link is None:
                return False
            if extra is None:
                extra = {}
            extra[(a, b)] = extra.get((a, b), 0.0) + lam * c
            if self.link_used[a][b] + extra[(a, b)] > link[1] + TOL:
                return False
        return True

    def candidates(self, k, symmetry: bool = True) -> list:
        """Compatible targets for decision k: existing instances by index, then new ones by node."""
        P = self.P
        ti = P.dec[k][1]
        out = []
        nodes = self.inst_node[ti]
        for i, n in enumerate(nodes):
            if self.compatible(k, i, n, False):
                out.append((i, n, False))
        if len(nodes) < P.budget[ti]:
            i = len(nodes)
            for n in range(len(P.nodes)):
                if symmetry and self.node_count[n] == 0 and any(
                    self.node_count[a] == 0 and P.sym[a][n] for a in range(n)
                ):
                    continue
                if self.compatible(k, i, n, True):
                    out.append((i, n, True))
        return out

    def push(self, k, i, n, is_new):
        """Apply decision k without checks; the caller filters through compatible()."""
        P = self.P
        q, ti, trav, lam, traffic, served, exposes = P.dec[k]
        proc = P.procs[q]
        if k != self.depth:
            raise ValueError(f"decision {k} applied at depth {self.depth}")
        saved = (self.cap_committed, self.delay_sum, self.prop_sum)
        if is_new:
            self.inst_node[ti].append(n)
            self.load[ti].append(0.0)
            self.traffic[ti].append(0.0)
            self.served[ti].append(0.0)
            self.travsum[ti].append(0)
            self.slice_cnt[ti].append({})
            self.exposed[ti].append({})
            self.nonext[ti].append(0)
            self.node_count[n] += 1
        old = (self.load[ti][i], self.traffic[ti][i], self.served[ti][i], self.travsum[ti][i],
               self.node_used[n])
        delta = traffic + (P.base[ti] if is_new else 0.0)
        self.node_used[n] += delta
        self.cap_committed += delta
        if not P.pseudo[ti]:
            ld, ts = self.load[ti][i], self.travsum[ti][i]
            before = ts * self._delay(ti, ld) if ts else 0.0
            self.delay_sum += (ts + trav) * self._delay(ti, ld + lam) - before
        self.load[ti][i] += lam
        self.traffic[ti][i] += traffic
        self.served[ti][i] += served
        self.travsum[ti][i] += trav
        sc = self.slice_cnt[ti][i]
        sc[proc.slice] = sc.get(proc.slice, 0) + 1
        if exposes:
            ex = self.exposed[ti][i]
            ex[proc.slice] = ex.get(proc.slice, 0) + 1
        if not proc.external:
            self.nonext[ti][i] += 1
        links = []
        for other, is_src, c in P.hops[k]:
            m = self.dec_node[other]
            if m == n:
                continue
            a, b = (n, m) if is_src else (m, n)
            links.append((a, b, self.link_used[a][b]))
            self.link_used[a][b] += lam * c
            self.prop_sum += P.link[a][b][0] * c
        self.dec_inst[k] = (ti, i)
        self.dec_node[k] = n
        self._undo.append((k, ti, i, n, is_new, old, saved, links))

    def pop(self):
        P = self.P
        k, ti, i, n, is_new, old, saved, links = self._undo.pop()
        q, _, _, _, _, _, exposes = P.dec[k]
        proc = P.procs[q]
        for a, b, used in reversed(links):
            self.link_used[a][b] = used
        self.load[ti][i], self.traffic[ti][i], self.served[ti][i], self.travsum[ti][i], \
            self.node_used[n] = old
        self.cap_committed, self.delay_sum, self.prop_sum = saved
        sc = self.slice_cnt[ti][i]
        sc[proc.slice] -= 1
        if not sc[proc.slice]:
            del sc[proc.slice]
        if exposes:
            ex = self.exposed[ti][i]
            ex[proc.slice] -= 1
            if not ex[proc.slice]:
                del ex[proc.slice]
        if not proc.external:
            self.nonext[ti][i] -= 1
        if is_new:
            for arr in (self.inst_node, self.load, self.traffic, self.served, self.travsum,
                        self.slice_cnt, self.exposed, self.nonext):
                arr[ti].pop()
            self.node_count[n] -= 1
        self.dec_inst[k] = None
        self.dec_node[k] = None

    def procedure_delay(self, q) -> float:
        """Delay of procedure q at the current loads; a lower bound until the search completes."""
        P = self.P
        total = 0.0
        for k in P.proc_decs[q]:
            if self.dec_inst[k] is None:
                continue
            ti, i = self.dec_inst[k]
            if not P.pseudo[ti]:
                total += P.dec[k][2] * self._delay(ti, self.load[ti][i])
            n = self.dec_node[k]
            for other, is_src, c in P.hops[k]:
                m = self.dec_node[other]
                if m != n:
                    a, b = (n, m) if is_src else (m, n)
                    total += P.link[a][b][0] * c
        return total

    def bound(self) -> float:
        """Admissible lower bound on the objective of any completion of this partial assignment."""
        P = self.P
        k = self.depth
        cap, node_used, pseudo = P.cap, self.node_used, P.pseudo
        limit_on = P.toggles.max_traffic
        new_base = 0.0
        for ti in P.rem_types[k]:
            nodes = self.inst_node[ti]
            existing = len(nodes)
            if pseudo[ti]:
                if not existing and P.budget[ti] < 1:
                    return INF
                continue
            need = 0 if existing else 1
            base = P.base[ti]
            cap_t = P.zmax[ti] - base
            # an instance can only grow as far as its host node still has room
            spare = 0.0
            if existing:
                per_node = {}
                for x, n in zip(self.traffic[ti], nodes):
                    if cap_t > x:
                        per_node[n] = per_node.get(n, 0.0) + cap_t - x
                for n, s in per_node.items():
                    free = cap[n] - node_used[n]
                    if free > 0:
                        spare += s if s < free else free
            rest = P.rem_traf_t[ti][k] - spare
            if rest > TOL:
                if cap_t <= TOL:
                    return INF
                need = max(need, math.ceil(rest / cap_t - 1e-9))
            if limit_on:
                lim = P.ztmax[ti]
                spare = 0.0
                for x in self.served[ti]:
                    if lim > x:
                        spare += lim - x
                rest = P.rem_served_t[ti][k] - spare
                if rest > TOL:
                    if lim <= TOL:
                        return INF
                    need = max(need, math.ceil(rest / lim - 1e-9))
            if existing + need > P.budget[ti]:
                return INF
            new_base += base * need
        total = self.cap_committed + P.rem_traffic[k] + new_base
        if total > P.total_cap + TOL:
            return INF
        w = P.weights
        return w.capacity * total + w.delay * (self.delay_sum + self.prop_sum + P.rem_delay[k])

    def violated(self) -> bool:
        """Full consistency scan; used when partial assignments are built by hand."""
        P = self.P
        for n in range(len(P.nodes)):
            if self.node_used[n] > P.cap[n] + TOL:
                return True
        for ti in range(len(P.types)):
            for i in range(len(self.inst_node[ti])):
                if P.base[ti] + self.traffic[ti][i] > P.zmax[ti] + TOL:
                    return True
                if P.toggles.max_traffic and self.served[ti][i] > P.ztmax[ti] + TOL:
                    return True
                if not P.pseudo[ti] and self.load[ti][i] >= P.omega[ti] - P.epsilon:
                    return True
        N = len(P.nodes)
        for a in range(N):
            for b in range(N):
                if self.link_used[a][b] > 0 and (
                        P.link[a][b] is None or self.link_used[a][b] > P.link[a][b][1] + TOL):
                    return True
        return False

    def encoding(self) -> tuple:
        return tuple((self.dec_inst[k][1], self.dec_node[k]) for k in range(self.depth))

    def to_placement(self) -> Placement:
        P = self.P
        instances = {}
        for ti, nodes in enumerate(self.inst_node):
            for i, n in enumerate(nodes):
                instances[(P.types[ti], i)] = P.nodes[n]
        assignment = {}
        for k in range(self.depth):
            q, ti = P.dec[k][0], P.dec[k][1]
            proc = P.procs[q]
            assignment[(proc.slice, proc.id, P.types[ti])] = self.dec_inst[k][1]
        return Placement.from_assignment(P.scenario, instances, assignment)


def lower_bound(state: SearchState) -> float:
    """Bound for a partial assignment; +inf when it already violates a constraint."""
    if state.violated():
        return INF
    return state.bound()


def _certify(placement: Placement, epsilon: float) -> float:
    report = check_placement(placement, epsilon=epsilon)
    if not report.ok:
        raise AssertionError(f"search produced an infeasible placement: {report.violations[:3]}")
    return derive_quantities(placement, epsilon=epsilon).objective


def _prepare(scenario: Scenario, config: SolverConfig) -> Scenario:
    scenario = config.apply(scenario)
    problems = validate_scenario(scenario)
    if problems:
        raise InvalidScenario(problems)
    return scenario


def _prefer(order, state, k):
    for cand in order:
        state.push(k, *cand)
        P = state.P
        q = P.dec[k][0]
        if P.last_of[k] and state.procedure_delay(q) > P.procs[q].max_delay:
            state.pop()
            continue
        return True
    return False


def _greedy(state: SearchState) -> bool:
    P = state.P
    for k in range(P.K):
        cands = state.candidates(k, symmetry=False)
        ti = P.dec[k][1]
        prev = state.dec_node[P.prev[k]] if P.prev[k] is not None else None
        existing = [c for c in cands if not c[2]]
        new = [c for c in cands if c[2]]
        if P.pseudo[ti]:
            order = [c for c in existing if c[1] == prev] + [c for c in new if c[1] == prev]
            order += [c for c in existing if c not in order] + [c for c in new if c not in order]
        else:
            order = list(existing)
            order += [c for c in new if c[1] == prev]
            order += sorted((c for c in new if c[1] != prev),
                            key=lambda c: (state.node_used[c[1]], c[1]))
        if not _prefer(order, state, k):
            return False
    return True


def greedy_warmstart(scenario: Scenario, config: SolverConfig | None = None) -> Placement | None:
    """Single pass: reuse the lowest-index compatible instance, else open one near the chain.

    A new instance goes to the node of the procedure's previous hop when it
    fits, otherwise to the least-loaded node. UE/RAN pseudo entities prefer an
    instance on the previous hop's node. Returns None on a dead end.
    """
    config = config or SolverConfig()
    scenario = _prepare(scenario, config)
    state = SearchState.for_scenario(scenario, config.epsilon)
    if not _greedy(state):
        return None
    placement = state.to_placement()
    if not check_placement(placement, epsilon=config.epsilon).ok:
        return None
    return placement


def solve(scenario: Scenario, config: SolverConfig | None = None) -> SolveReport:
    """Depth-first branch and bound with a greedy warm start.

    Raises Infeasible when the search space is exhausted without a feasible
    placement and TimeoutNoIncumbent when a limit stops the search first.
    """
    config = config or SolverConfig()
    scenario = _prepare(scenario, config)
    t0 = time.monotonic()
    deadline = t0 + config.time_limit
    state = SearchState.for_scenario(scenario, config.epsilon)
    P = state.P
    w = P.weights

    best = {"obj": INF, "placement": None, "enc": (), "warm": False}
    history = []
    nodes = 0

    def record(obj):
        if not history or obj < history[-1][1] - TIE_TOL * max(1.0, abs(obj)):
            history.append((time.monotonic() - t0, obj))

    if config.warm_start:
        gstate = SearchState(P)
        if _greedy(gstate):
            placement = gstate.to_placement()
            if check_placement(placement, epsilon=config.epsilon).ok:
                obj = derive_quantities(placement, epsilon=config.epsilon).objective
                best.update(obj=obj, placement=placement, enc=gstate.encoding(), warm=True)
                record(obj)

    def tol():
        obj = best["obj"]
        return TIE_TOL * max(1.0, abs(obj)) if obj < INF else 0.0

    def pruned(lb):
        if config.bound == "none":
            return False
        if config.bound == "inflated":
            lb += 1.0
        if lb >= best["obj"] - tol():
            return not (best["warm"] and lb <= best["obj"] + tol())
        return False

    def leaf():
        total = 0.0
        for q, proc in enumerate(P.procs):
            d = state.procedure_delay(q)
            if d > proc.max_delay:
                return
            total += d
        fast = w.capacity * state.cap_committed + w.delay * total
        if fast >= best["obj"] + tol() or (fast >= best["obj"] - tol() and not best["warm"]):
            return
        placement = state.to_placement()
        obj = _certify(placement, config.epsilon)
        if obj < best["obj"] - tol() or (best["warm"] and obj <= best["obj"] + tol()):
            best.update(obj=obj, placement=placement, enc=state.encoding(), warm=False)
            record(obj)

    def dfs(k):
        nonlocal nodes
        nodes += 1
        if config.node_limit is not None and nodes > config.node_limit:
            raise _Stop
        if nodes % 256 == 0 and time.monotonic() > deadline:
            raise _Stop
        if k == P.K:
            leaf()
            return
        for cand in state.candidates(k):
            state.push(k, *cand)
            q = P.dec[k][0]
            if not (P.last_of[k] and state.procedure_delay(q) > P.procs[q].max_delay):
                if not pruned(state.bound()):
                    dfs(k + 1)
            state.pop()

    stopped = False
    try:
        dfs(0)
    except _Stop:
        stopped = True
        while state.depth:
            state.pop()
    wall = time.monotonic() - t0
    if best["placement"] is None:
        if stopped:
            raise TimeoutNoIncumbent(f"no feasible placement after {nodes} nodes")
        raise Infeasible("search exhausted without a feasible placement")
    return SolveReport(
        best_placement=best["placement"],
        objective=best["obj"],
        proven_optimal=not stopped,
        nodes_explored=min(nodes, config.node_limit) if config.node_limit is not None else nodes,
        wall_time=wall,
        incumbent_history=history,
        solver="bnb",
        encoding=best["enc"],
    )


def _growth_strings(length, limit):
    """Restricted growth strings: canonical instance labelings in first-use order."""
    if length == 0:
        yield ()
        return

    def rec(prefix, top):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        for x in range(min(top + 2, limit)):
            prefix.append(x)
            yield from rec(prefix, max(top, x))
            prefix.pop()

    yield from rec([], -1)


def _stirling2(n, k):
    return sum((-1) ** j * math.comb(k, j) * (k - j) ** n for j in range(k + 1)) // math.factorial(k)


def bruteforce_space_size(scenario: Scenario) -> int:
    """Number of canonical (labeling, node choice) candidates the oracle would enumerate."""
    counts = {}
    for p in scenario.procedures:
        for t in scenario.structures[p.key].type_order:
            counts[t] = counts.get(t, 0) + 1
    N = len(scenario.topology.nodes)
    size = 1
    for t, c in counts.items():
        b = scenario.types[t].instance_budget if t in scenario.types else 0
        size *= sum(_stirling2(c, m) * N ** m for m in range(1, min(b, c) + 1))
    return size


def solve_bruteforce(scenario: Scenario, config: SolverConfig | None = None) -> SolveReport:
    """Enumerate every canonical placement, score it with the evaluator and keep the best."""
    config = config or SolverConfig()
    scenario = _prepare(scenario, config)
    size = bruteforce_space_size(scenario)
    if size > config.space_cap:
        raise SpaceTooLarge(f"{size} candidates exceed the cap of {config.space_cap}")
    t0 = time.monotonic()

    decisions = [(p, t) for p in scenario.procedures for t in scenario.structures[p.key].type_order]
    by_type: dict = {}
    for k, (p, t) in enumerate(decisions):
        by_type.setdefault(t, []).append(k)
    type_list = list(by_type)
    nodes = list(scenario.topology.node_ids)
    labelings = [
        list(_growth_strings(len(by_type[t]), scenario.types[t].instance_budget)) for t in type_list
    ]

    best_obj, best_enc, best_placement = INF, None, None
    explored = 0
    for combo in itertools.product(*labelings):
        label = [0] * len(decisions)
        used = []
        for t, lab in zip(type_list, combo):
            for k, x in zip(by_type[t], lab):
                label[k] = x
            used.extend((t, x) for x in range(max(lab) + 1))
        for where in itertools.product(range(len(nodes)), repeat=len(used)):
            explored += 1
            instances = {inst: nodes[w] for inst, w in zip(used, where)}
            assignment = {(p.slice, p.id, t): label[k] for k, (p, t) in enumerate(decisions)}
            placement = Placement.from_assignment(scenario, instances, assignment)
            if not check_placement(placement, epsilon=config.epsilon).ok:
                continue
            obj = derive_quantities(placement, epsilon=config.epsilon).objective
            pos = dict(zip(used, where))
            enc = tuple((label[k], pos[(t, label[k])]) for k, (p, t) in enumerate(decisions))
            tol = TIE_TOL * max(1.0, abs(best_obj) if best_obj < INF else 1.0)
            if obj < best_obj - tol or (abs(obj - best_obj) <= tol and enc < best_enc):
                best_obj, best_enc, best_placement = obj, enc, placement
    if best_placement is None:
        raise Infeasible("no feasible placement exists")
    return SolveReport(
        best_placement=best_placement,
        objective=best_obj,
        proven_optimal=True,
        nodes_explored=explored,
        wall_time=time.monotonic() - t0,
        incumbent_history=[(time.monotonic() - t0, best_obj)],
        solver="bruteforce",
        encoding=best_enc,
    )
