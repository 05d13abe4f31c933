"""Property checks for critical-set diagnosability and observability.

Every property reduces to an emptiness or inclusion test between the fixed
points computed in :mod:`fsmdiag.fixpoint`.  When a property holds, a scan
over the step indices (b, f, g, l) of the underlying recursions yields
parameter tuples (transient tau, delay delta, horizon T, uncertainties
gamma1/gamma2) for which it provably holds; these are upper bounds, not
minima.  When it fails, the smallest violating state pair is reported.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .errors import PreconditionError, UsageError
from .fixpoint import b_series, compute_pi, f_series, gamma_series, lambda_series, s_series
from .model import Fsm, build_restricted, validate
from .relations import PairRelation, product_relation, same_block


class PropertyKind(str, enum.Enum):
    PARAMETRIC = "parametric"
    DIAG = "diag"
    EVENTUAL = "eventual"
    CRITICAL = "critical"
    EVENTUAL_OBS = "eventual-obs"
    CRITICAL_OBS = "critical-obs"
    INITIAL_OBS = "initial-obs"
    EXACT_STEP = "exact-step"


@dataclass(frozen=True)
class DiagParams:
    """Transient, delay, detection horizon and uncertainty bounds.

    ``horizon`` is 0 when only the first crossing must be detected and None
    when every crossing must be (unbounded horizon).
    """

    tau: int
    delta: int
    horizon: Optional[int]
    gamma1: int
    gamma2: int

    def __post_init__(self):
        if min(self.tau, self.delta, self.gamma1, self.gamma2) < 0:
            raise UsageError("parameters must be nonnegative")
        if self.gamma2 > self.delta:
            raise UsageError("gamma2 must not exceed delta")

    @property
    def gamma(self):
        return max(self.gamma1, self.gamma2)


@dataclass(frozen=True)
class DiagVerdict:
    property: PropertyKind
    holds: bool
    params: Optional[DiagParams] = None
    witness: Optional[tuple] = None        # ((i, j), relation description)
    frontier: Optional[tuple] = None       # minimal (b, f, g, l) tuples
    bfgl: Optional[tuple] = None           # headline (b, f, g, l)


class Analysis:
    """Memoized fixed-point computations for one machine.

    All heavy series are computed lazily and at most once; the object is
    immutable from the caller's perspective and safe to share.
    """

    def __init__(self, m: Fsm):
        report = validate(m, "analysis")
        if not report.ok:
            raise PreconditionError(
                "machine fails analysis assumptions: "
                + "; ".join(v.message for v in report.entries if v.severity == "error"))
        self.m = m

    @cached_property
    def pi(self):
        return compute_pi(self.m)

    @cached_property
    def restricted(self):
        return build_restricted(self.m)

    @cached_property
    def s(self):
        return s_series(self.m)

    @cached_property
    def s_tilde(self):
        return s_series(self.restricted)

    @cached_property
    def f(self):
        return f_series(self.m)

    @cached_property
    def b(self):
        """Backward series seeded with the joint-reachability fixed point."""
        return b_series(self.m, self.s.fixed_point)

    @cached_property
    def b_tilde(self):
        """Backward series of the restricted machine, seeded with its own
        joint-reachability fixed point."""
        return b_series(self.restricted, self.s_tilde.fixed_point)

    @cached_property
    def lam(self):
        return lambda_series(self.m, self.s.fixed_point)

    @cached_property
    def gam(self):
        return gamma_series(self.m, self.s.fixed_point)

    @cached_property
    def block(self):
        """Pairs on the same side of the critical set."""
        return same_block(self.m.states, self.m.critical)


def _witness(rel: PairRelation, name: str):
    return (rel.pairs()[0], name)


def _pareto_min(tuples):
    out = []
    for t in tuples:
        if any(all(o[i] <= t[i] for i in range(len(t))) for o in out):
            continue
        out = [o for o in out if not all(t[i] <= o[i] for i in range(len(t)))]
        out.append(t)
    return tuple(sorted(out))


def _headline(frontier, make_params):
    best = min(frontier, key=lambda t: _rank(make_params(t)))
    return best, make_params(best)


def _rank(p: DiagParams):
    return (p.tau, p.delta, p.gamma1 + p.gamma2)


def check_parametric(m: Fsm, analysis: Optional[Analysis] = None) -> DiagVerdict:
    """Detection of the first crossing after a transient, with any delay."""
    a = analysis or Analysis(m)
    bad = a.b_tilde.fixed_point & a.lam.fixed_point
    if bad:
        return DiagVerdict(PropertyKind.PARAMETRIC, False,
                           witness=_witness(bad, "backward-reachable and forward-maskable"))
    sats = []
    for b in range(1, a.b_tilde.convergence_step + 1):
        bb = a.b_tilde.at(b)
        for f in range(1, a.f.convergence_step + 1):
            lhs = bb & a.f.at(f)
            for l in range(1, a.lam.convergence_step + 1):
                if not (lhs & a.lam.at(l)):
                    sats.append((b, f, 1, l))
                    break
    frontier = _pareto_min(sats)

    def mk(t):
        b, f, _, l = t
        return DiagParams(b - 1, max(f, l) - 1, 0, l - 1, l - 1)

    best, params = _headline(frontier, mk)
    return DiagVerdict(PropertyKind.PARAMETRIC, True, params=params,
                       frontier=frontier, bfgl=best)


def check_diag(m: Fsm, analysis: Optional[Analysis] = None) -> DiagVerdict:
    """Detection of the first crossing, with no transient allowance."""
    a = analysis or Analysis(m)
    bad = a.s_tilde.fixed_point & a.lam.fixed_point
    if bad:
        return DiagVerdict(PropertyKind.DIAG, False,
                           witness=_witness(bad, "jointly reachable and forward-maskable"))
    sats = []
    st = a.s_tilde.fixed_point
    for f in range(1, a.f.convergence_step + 1):
        lhs = st & a.f.at(f)
        for l in range(1, a.lam.convergence_step + 1):
            if not (lhs & a.lam.at(l)):
                sats.append((1, f, 1, l))
                break
    frontier = _pareto_min(sats)

    def mk(t):
        _, f, _, l = t
        return DiagParams(0, max(f, l) - 1, 0, l - 1, l - 1)

    best, params = _headline(frontier, mk)
    return DiagVerdict(PropertyKind.DIAG, True, params=params,
                       frontier=frontier, bfgl=best)


def check_eventual(m: Fsm, analysis: Optional[Analysis] = None) -> DiagVerdict:
    """Detection of every crossing occurring after a finite transient."""
    a = analysis or Analysis(m)
    bad = a.gam.fixed_point & a.lam.fixed_point
    if bad:
        return DiagVerdict(PropertyKind.EVENTUAL, False,
                           witness=_witness(bad, "backward-maskable and forward-maskable"))
    sats = []
    for b in range(1, a.b.convergence_step + 1):
        bb = a.b.at(b)
        for f in range(1, a.f.convergence_step + 1):
            lhs = bb & a.f.at(f)
            for g in range(1, a.gam.convergence_step + 1):
                gg = a.gam.at(g)
                for l in range(1, a.lam.convergence_step + 1):
                    if not (lhs & gg & a.lam.at(l)):
                        sats.append((b, f, g, l))
                        break
    frontier = _pareto_min(sats)

    def mk(t):
        b, f, g, l = t
        return DiagParams(max(b, g) - 1, max(f, l) - 1, None, g - 1, l - 1)

    # headline parameters are taken at the converged backward/forward indices,
    # minimizing only the uncertainty indices; smaller b or f would shrink the
    # claimed transient below what the detection argument supports
    b_star = a.b.convergence_step
    f_star = a.f.convergence_step
    lhs = a.b.fixed_point & a.f.fixed_point
    best = min(((b_star, f_star, g, l)
                for g in range(1, a.gam.convergence_step + 1)
                for l in range(1, a.lam.convergence_step + 1)
                if not (lhs & a.gam.at(g) & a.lam.at(l))),
               key=lambda t: _rank(mk(t)))
    return DiagVerdict(PropertyKind.EVENTUAL, True, params=mk(best),
                       frontier=frontier, bfgl=best)


def check_critical(m: Fsm, analysis: Optional[Analysis] = None) -> DiagVerdict:
    """Detection of every crossing with no transient allowance: the
    conjunction of the first-crossing and eventual properties."""
    a = analysis or Analysis(m)
    dg = check_diag(m, a)
    if not dg.holds:
        return DiagVerdict(PropertyKind.CRITICAL, False, witness=dg.witness)
    ev = check_eventual(m, a)
    if not ev.holds:
        return DiagVerdict(PropertyKind.CRITICAL, False, witness=ev.witness)
    tau_e, d_e, g1_e = ev.params.tau, ev.params.delta, ev.params.gamma1
    delta = max(tau_e, d_e, dg.params.delta)
    params = DiagParams(0, delta, None, max(tau_e, g1_e), delta)
    return DiagVerdict(PropertyKind.CRITICAL, True, params=params,
                       frontier=ev.frontier, bfgl=ev.bfgl)


def check_eventual_obs(m: Fsm, analysis: Optional[Analysis] = None) -> DiagVerdict:
    """Zero-delay detection of crossings after a transient."""
    a = analysis or Analysis(m)
    bad = a.b.fixed_point - a.block
    if bad:
        return DiagVerdict(PropertyKind.EVENTUAL_OBS, False,
                           witness=_witness(bad, "backward-indistinguishable mixed pair"))
    lam1 = a.lam.at(1)
    for b in range(1, a.b.convergence_step + 1):
        for g in range(1, a.gam.convergence_step + 1):
            if not (a.b.at(b) & a.pi & a.gam.at(g) & lam1):
                params = DiagParams(max(b, g) - 1, 0, None, g - 1, 0)
                return DiagVerdict(PropertyKind.EVENTUAL_OBS, True, params=params,
                                   bfgl=(b, 1, g, 1))
    raise AssertionError("inclusion must hold at the fixed points")


def check_exact_step(m: Fsm, analysis: Optional[Analysis] = None) -> DiagVerdict:
    """Eventual detection that pins down the exact crossing step."""
    a = analysis or Analysis(m)
    for b in range(1, a.b.convergence_step + 1):
        for f in range(1, a.f.convergence_step + 1):
            if (a.b.at(b) & a.f.at(f)).issubset(a.block):
                params = DiagParams(b - 1, f - 1, None, 0, 0)
                return DiagVerdict(PropertyKind.EXACT_STEP, True, params=params,
                                   bfgl=(b, f, 1, 1))
    bad = (a.b.fixed_point & a.f.fixed_point) - a.block
    return DiagVerdict(PropertyKind.EXACT_STEP, False,
                       witness=_witness(bad, "persistent mixed pair"))


def check_initial_obs(m: Fsm, analysis: Optional[Analysis] = None) -> DiagVerdict:
    """Exact decision about the critical set from the first observation."""
    a = analysis or Analysis(m)
    if not a.m.critical <= a.m.initial:
        raise UsageError("initial-state observability requires the critical "
                         "set to consist of initial states")
    init_sq = product_relation(a.m.states, a.m.initial, a.m.initial)
    bad = (init_sq & a.f.fixed_point) - a.block
    if bad:
        return DiagVerdict(PropertyKind.INITIAL_OBS, False,
                           witness=_witness(bad, "forward-indistinguishable initial mixed pair"))
    for f in range(1, a.f.convergence_step + 1):
        if (init_sq & a.f.at(f)).issubset(a.block):
            params = DiagParams(0, f - 1, 0, 0, 0)
            return DiagVerdict(PropertyKind.INITIAL_OBS, True, params=params,
                               bfgl=(1, f, 1, 1))
    raise AssertionError("inclusion must hold at the fixed point")


def check_critical_obs(m: Fsm, analysis: Optional[Analysis] = None) -> DiagVerdict:
    """Zero-delay, zero-transient decision at every step."""
    a = analysis or Analysis(m)
    bad = a.s.fixed_point - a.block
    if bad:
        return DiagVerdict(PropertyKind.CRITICAL_OBS, False,
                           witness=_witness(bad, "jointly reachable mixed pair"))
    params = DiagParams(0, 0, None, 0, 0)
    return DiagVerdict(PropertyKind.CRITICAL_OBS, True, params=params, bfgl=(1, 1, 1, 1))


_CHECKS = {
    PropertyKind.PARAMETRIC: check_parametric,
    PropertyKind.DIAG: check_diag,
    PropertyKind.EVENTUAL: check_eventual,
    PropertyKind.CRITICAL: check_critical,
    PropertyKind.EVENTUAL_OBS: check_eventual_obs,
    PropertyKind.CRITICAL_OBS: check_critical_obs,
    PropertyKind.INITIAL_OBS: check_initial_obs,
    PropertyKind.EXACT_STEP: check_exact_step,
}


def check(m: Fsm, prop: PropertyKind, analysis: Optional[Analysis] = None) -> DiagVerdict:
    try:
        fn = _CHECKS[PropertyKind(prop)]
    except ValueError:
        raise UsageError("unknown property %r" % (prop,)) from None
    return fn(m, analysis)


def parameter_frontier(m: Fsm, prop: PropertyKind,
                       analysis: Optional[Analysis] = None):
    """Componentwise-minimal (b, f, g, l) tuples for which the property's
    inclusion condition holds.  Only defined when the property holds."""
    prop = PropertyKind(prop)
    if prop not in (PropertyKind.PARAMETRIC, PropertyKind.DIAG,
                    PropertyKind.EVENTUAL, PropertyKind.CRITICAL):
        raise UsageError("no parameter frontier for property %s" % prop.value)
    verdict = check(m, prop, analysis)
    if not verdict.holds:
        raise UsageError("property %s does not hold" % prop.value)
    return list(verdict.frontier)
