"""Dot-level device description compiled to logical Hamiltonians.

A device is a set of double-dot qubits (DQDs) with tunneling terms and
inter-dot Coulomb links, each driven by a scalar time schedule.  Units:
hbar = 1, energies in a reference tunneling amplitude w, times in 1/w.

Dot numbering follows the hardware layout: DQD k owns dots (2k+1, 2k+2),
and logical |1>_k means the excess electron sits in the odd dot.  A Coulomb
link between dots of two different DQDs therefore compiles to a product of
logical projectors: odd dots map to P1, even dots to P0.

The tunneling term of a DQD with amplitude w and phase p compiles to
``-w * (exp(-ip)|1><0| + exp(+ip)|0><1|)`` on that qubit, so evolving
logical |0> under it yields ``cos(wt)|0> + i sin(wt) exp(-ip)|1>``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DeviceError
from .hilbert import P0, P1

SCHEDULE_KINDS = ("constant", "linear_ramp", "smooth_ramp", "sudden_step", "tangent_ramp")

HERMITICITY_TOL = 1e-14


@dataclass(frozen=True)
class Schedule:
    """Scalar function of time.

    Every kind holds v_start for t <= t_start and v_end for t >= t_end and is
    continuous except ``sudden_step``, which is right-continuous at t_start
    (value(t_start) == v_end).  ``smooth_ramp`` uses the cubic smoothstep
    3x^2 - 2x^3, which has zero slope at both endpoints.  ``tangent_ramp``
    is a gap-adapted profile for sweeping a two-level avoided crossing
    [[0, -J], [-J, v]]: it follows dv/dt proportional to gap^3 so that the
    sweep spends its time where the instantaneous gap (min 2J at v=0) is
    smallest; ``gap_scale`` holds J.
    """

    kind: str
    v_start: float
    v_end: float
    t_start: float = 0.0
    t_end: float = 0.0
    gap_scale: float | None = None

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise DeviceError(f"unknown schedule kind {self.kind!r}")
        if self.t_start > self.t_end:
            raise DeviceError("schedule has t_start > t_end")
        if self.kind == "tangent_ramp" and not (self.gap_scale and self.gap_scale > 0):
            raise DeviceError("tangent_ramp requires a positive gap_scale")

    @classmethod
    def constant(cls, value: float) -> "Schedule":
        return cls("constant", value, value)

    @classmethod
    def linear(cls, v_start, v_end, t_start, t_end) -> "Schedule":
        return cls("linear_ramp", v_start, v_end, t_start, t_end)

    @classmethod
    def smooth(cls, v_start, v_end, t_start, t_end) -> "Schedule":
        return cls("smooth_ramp", v_start, v_end, t_start, t_end)

    @classmethod
    def step(cls, v_start, v_end, t_switch) -> "Schedule":
        return cls("sudden_step", v_start, v_end, t_switch, t_switch)

    @classmethod
    def tangent(cls, v_start, v_end, t_start, t_end, gap_scale) -> "Schedule":
        return cls("tangent_ramp", v_start, v_end, t_start, t_end, gap_scale)

    def value(self, t):
        """Evaluate at a scalar or array time."""
        return schedule_value(self, t)

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant" or self.v_start == self.v_end

    def max_abs(self) -> float:
        return max(abs(self.v_start), abs(self.v_end))

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "v_start": self.v_start, "v_end": self.v_end,
             "t_start": self.t_start, "t_end": self.t_end}
        if self.gap_scale is not None:
            d["gap_scale"] = self.gap_scale
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Schedule":
        return cls(d["kind"], d["v_start"], d["v_end"],
                   d.get("t_start", 0.0), d.get("t_end", 0.0), d.get("gap_scale"))


def schedule_value(s: Schedule, t):
    """Value(s) of a schedule at time(s) t (vectorized)."""
    t = np.asarray(t, dtype=float)
    if s.kind == "constant":
        out = np.full_like(t, s.v_start)
        return out if out.ndim else float(out)
    if s.kind == "sudden_step":
        out = np.where(t < s.t_start, s.v_start, s.v_end)
        return out if out.ndim else float(out)
    span = s.t_end - s.t_start
    x = np.clip((t - s.t_start) / span, 0.0, 1.0) if span > 0 else np.where(t < s.t_start, 0.0, 1.0)
    if s.kind == "linear_ramp":
        y = x
    elif s.kind == "smooth_ramp":
        y = 3 * x**2 - 2 * x**3
    else:  # tangent_ramp
        delta = s.v_end - s.v_start
        j = s.gap_scale
        if delta == 0:
            y = np.zeros_like(x)
        else:
            hyp = np.hypot(delta, 2 * j)
            kappa = abs(delta) / hyp
            # 1 - (kappa x)^2 = (2j/hyp)^2 + kappa^2 (1-x)(1+x), cancellation-free
            denom = np.sqrt((2 * j / hyp) ** 2 + kappa**2 * (1.0 - x) * (1.0 + x))
            y = 2 * j * kappa * x / denom / abs(delta)
    out = s.v_start + (s.v_end - s.v_start) * y
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class TunnelTerm:
    """Intra-DQD tunneling with a static phase (vector-potential induced).

    ``offset`` is the common on-site energy of the two dots; with exactly one
    electron per DQD it only shifts the spectrum by a constant.
    """

    dqd: int
    amplitude: Schedule
    phase: float = 0.0
    offset: float = 0.0


@dataclass(frozen=True)
class CoulombLink:
    """Coulomb repulsion between two dots of different DQDs."""

    dot_i: int
    dot_j: int
    strength: Schedule


@dataclass(frozen=True)
class DeviceGraph:
    dqds: tuple
    tunnel_terms: tuple = ()
    coulomb_links: tuple = ()

    def __init__(self, dqds, tunnel_terms=(), coulomb_links=()):
        object.__setattr__(self, "dqds", tuple(dqds))
        object.__setattr__(self, "tunnel_terms", tuple(tunnel_terms))
        object.__setattr__(self, "coulomb_links", tuple(coulomb_links))

    @property
    def n_qubits(self) -> int:
        return len(self.dqds)


def dot_qubit(dot: int) -> int:
    """DQD index owning a (1-based) dot label."""
    if dot < 1:
        raise DeviceError(f"dot labels are 1-based, got {dot}")
    return (dot - 1) // 2


def dot_is_odd(dot: int) -> bool:
    return dot % 2 == 1


def validate(g: DeviceGraph) -> list:
    """Check structural invariants; an empty list means the graph is valid."""
    errors = []
    qubits = set(g.dqds)
    if sorted(qubits) != list(range(len(g.dqds))):
        errors.append(f"dqds must be 0..N-1 without gaps, got {g.dqds}")
    seen_tunnel = set()
    for term in g.tunnel_terms:
        if term.dqd not in qubits:
            errors.append(f"tunneling on nonexistent DQD {term.dqd}")
        if term.dqd in seen_tunnel:
            errors.append(f"multiple tunneling terms on DQD {term.dqd}")
        seen_tunnel.add(term.dqd)
        if min(term.amplitude.v_start, term.amplitude.v_end) < 0:
            errors.append(f"negative tunneling amplitude on DQD {term.dqd}")
    n_dots = 2 * len(g.dqds)
    for link in g.coulomb_links:
        for dot in (link.dot_i, link.dot_j):
            if dot < 1 or dot > n_dots:
                errors.append(f"link references nonexistent dot {dot}")
        if link.dot_i >= 1 and link.dot_j >= 1 and max(link.dot_i, link.dot_j) <= n_dots:
            if dot_qubit(link.dot_i) == dot_qubit(link.dot_j):
                errors.append(f"link ({link.dot_i},{link.dot_j}) joins dots of one DQD")
        if min(link.strength.v_start, link.strength.v_end) < 0:
            errors.append(f"negative Coulomb strength on link ({link.dot_i},{link.dot_j})")
    return errors


def dqd_pair_links(qubit_a: int, qubit_b: int, strength: Schedule) -> tuple:
    """The crossed link pair penalizing disagreeing logical values.

    Links the odd dot of each DQD to the even dot of the other, which
    compiles to strength * (P1 P0 + P0 P1) on the qubit pair: the diagonal
    is {0, U, U, 0} over logical (a,b) in {00, 01, 10, 11}.
    """
    return (
        CoulombLink(2 * qubit_a + 1, 2 * qubit_b + 2, strength),
        CoulombLink(2 * qubit_a + 2, 2 * qubit_b + 1, strength),
    )


def compile_coulomb(link: CoulombLink, t: float):
    """Logical form of a Coulomb link at time t.

    Returns ``((qa, qb), D)`` where D = U(t) * (proj_i x proj_j) is the
    4x4 diagonal on qubits (qa, qb), little-endian with qa as bit 0.
    An odd dot's occupation operator maps to P1, an even dot's to P0.
    """
    qa, qb = dot_qubit(link.dot_i), dot_qubit(link.dot_j)
    if qa == qb:
        raise DeviceError(f"link ({link.dot_i},{link.dot_j}) joins dots of one DQD")
    proj_a = P1 if dot_is_odd(link.dot_i) else P0
    proj_b = P1 if dot_is_odd(link.dot_j) else P0
    u = schedule_value(link.strength, t)
    # little-endian kron: second factor acts on the low bit (qa)
    return (qa, qb), u * np.kron(proj_b, proj_a)


def _tunnel_matrix(phase: float) -> np.ndarray:
    return -np.array([[0.0, np.exp(1j * phase)],
                      [np.exp(-1j * phase), 0.0]], dtype=complex)


def _embed_single(op: np.ndarray, qubit: int, n: int) -> np.ndarray:
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    mask = 1 << qubit
    idx = np.arange(dim)
    low = idx[(idx & mask) == 0]
    high = low | mask
    out[low, low] += op[0, 0]
    out[low, high] += op[0, 1]
    out[high, low] += op[1, 0]
    out[high, high] += op[1, 1]
    return out


def _disagree_diag(qa: int, qb: int, n: int) -> np.ndarray:
    idx = np.arange(2**n)
    return (((idx >> qa) & 1) != ((idx >> qb) & 1)).astype(float)


def _link_diag(link: CoulombLink, n: int) -> np.ndarray:
    """Unit-strength diagonal of one compiled link over the full register."""
    qa, qb = dot_qubit(link.dot_i), dot_qubit(link.dot_j)
    want_a = 1 if dot_is_odd(link.dot_i) else 0
    want_b = 1 if dot_is_odd(link.dot_j) else 0
    idx = np.arange(2**n)
    return ((((idx >> qa) & 1) == want_a) & (((idx >> qb) & 1) == want_b)).astype(float)


def hamiltonian_terms(g: DeviceGraph):
    """Split H(t) = H0 + sum_j f_j(t) B_j with constant schedules folded into H0.

    Returns ``(H0, [(schedule, B_j), ...])``; used by the propagators to
    assemble many time samples at once.
    """
    errs = validate(g)
    if errs:
        raise DeviceError("; ".join(errs))
    n = g.n_qubits
    dim = 2**n
    H0 = np.zeros((dim, dim), dtype=complex)
    terms = []
    for term in g.tunnel_terms:
        B = _embed_single(_tunnel_matrix(term.phase), term.dqd, n)
        if term.amplitude.is_constant:
            H0 += term.amplitude.v_start * B
        else:
            terms.append((term.amplitude, B))
        if term.offset:
            H0 += term.offset * np.eye(dim)
    for link in g.coulomb_links:
        B = np.diag(_link_diag(link, n)).astype(complex)
        if link.strength.is_constant:
            H0 += link.strength.v_start * B
        else:
            terms.append((link.strength, B))
    return H0, terms


def hamiltonian_at(g: DeviceGraph, t: float) -> np.ndarray:
    """Full 2^N x 2^N Hamiltonian of the device at time t (Hermitian)."""
    H0, terms = hamiltonian_terms(g)
    H = H0.copy()
    for sched, B in terms:
        H += schedule_value(sched, t) * B
    assert np.max(np.abs(H - H.conj().T)) < HERMITICITY_TOL
    return H


def energy_scale(g: DeviceGraph) -> float:
    """Coarse upper bound on ||H(t)||, used to pick integration steps."""
    scale = 0.0
    for term in g.tunnel_terms:
        scale += term.amplitude.max_abs() + abs(term.offset)
    for link in g.coulomb_links:
        scale += link.strength.max_abs() / 2.0  # two links share one qubit pair
    return max(scale, 1e-12)


def graph_to_json(g: DeviceGraph) -> str:
    doc = {
        "dqds": list(g.dqds),
        "tunnel_terms": [
            {"dqd": t.dqd, "amplitude": t.amplitude.to_dict(),
             "phase": t.phase, "offset": t.offset}
            for t in g.tunnel_terms
        ],
        "coulomb_links": [
            {"dot_i": l.dot_i, "dot_j": l.dot_j, "strength": l.strength.to_dict()}
            for l in g.coulomb_links
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def graph_from_json(doc: str) -> DeviceGraph:
    d = json.loads(doc)
    return DeviceGraph(
        dqds=d["dqds"],
        tunnel_terms=[
            TunnelTerm(t["dqd"], Schedule.from_dict(t["amplitude"]),
                       t.get("phase", 0.0), t.get("offset", 0.0))
            for t in d.get("tunnel_terms", [])
        ],
        coulomb_links=[
            CoulombLink(l["dot_i"], l["dot_j"], Schedule.from_dict(l["strength"]))
            for l in d.get("coulomb_links", [])
        ],
    )
