"""The teleportation pipeline over double-dot charge qubits.

Stages (qubit 0 is the encoder, qubit 1 Alice's support, the last qubit is
Bob; any qubits in between belong to a longer support chain):

1. encode   -- free tunneling evolution of |0>, cut off at time t_bar;
2. entangle -- slow growth of the inter-pair Coulomb repulsion takes the
   support pair from its separable ground state to a near-Bell state;
3. couple   -- slow growth of the encoder-support repulsion maps
   (a|0> + b|1>) x (|00>+|11>)/sqrt(2) onto a|000> + b|111>;
4. bell     -- encoder and support-1 tunneling on, everything else frozen:
   the aligned two-qubit block rotates at the second-order rate 2w^2/U;
5. measure  -- after a quarter rotation Alice measures the encoder charge
   and Bob fixes his qubit with diag(1, -i) (outcome 0) or diag(1, +i).

Every stage exists in ``full`` mode (numerical propagation of the device
Hamiltonian) and ``effective`` mode (the closed-form two-level algebra the
full dynamics approaches when w << U).

Phase conventions: a device tunneling phase p produces the evolution
amplitude exp(-ip) on logical |1> (see :mod:`.device`), while the encoder is
specified by the phase family cos(wt)|0> + i exp(2i phi) sin(wt)|1>.  The
encoder device therefore carries tunneling phase -2*phi; eigenvector checks
against the single-DQD Hamiltonian use the device phase directly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import device as dev
from . import evolve
from .errors import ConfigError, DimensionError
from .hilbert import (
    ID2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    StateVector,
    _unsafe_state,
    fidelity,
    fix_phase,
    measure_qubit,
    partial_trace,
    tensor_product,
)

# Adiabaticity budget of the gap-adapted coupling ramp: the sweep rate is
# eps * gap^3 / J, so the default duration is 1/(4 J eps) = 4/J.
EPS_ADIABATIC = 1.0 / 16.0

# Auto-derived ramps beyond this duration (in 1/w) are refused; they occur
# when the support crossing gap is so small (long chains at large U) that a
# faithful sweep is out of simulation reach.
MAX_AUTO_RAMP = 5.0e4

# Bob's local corrections, keyed by Alice's measured bit.
CORRECTIONS = {
    0: np.diag([1.0, -1.0j]).astype(complex),
    1: np.diag([1.0, 1.0j]).astype(complex),
}


@dataclass(frozen=True)
class InputQubit:
    """Normalized single-qubit amplitudes (alpha, beta)."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise DimensionError(f"|alpha|^2 + |beta|^2 = {norm} != 1")

    def state(self) -> StateVector:
        return StateVector(np.array([self.alpha, self.beta], dtype=complex))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "InputQubit":
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        return cls(v[0], v[1])


@dataclass
class ProtocolParams:
    """All protocol knobs.

    Durations left as None are derived from the spectral structure:
    ``T_ent = 2 U_max / w^2`` and ``T_couple = 4/J`` where 2J is the
    avoided-crossing gap of the support register at the start of the
    coupling ramp (J = 2 w^2/U_max for a single support pair).  Both
    reduce to 200/w at the reference point U_max = Uprime_max = 100 w.

    ``Uprime_max`` (the encoder-support plateau) tracks U_max unless set,
    so a sweep of U_max moves the whole repulsion family.  ``bell_U`` is
    the repulsion that stays on between encoder and support during the
    timed rotation stage and sets its rate 2 w^2 / bell_U; it defaults to
    Uprime_max.
    """

    w: float = 1.0
    phi: float = 0.0
    U_max: float = 100.0
    Uprime_max: float | None = None
    T_ent: float | None = None
    T_couple: float | None = None
    bell_U: float | None = None
    wait_angle: float = np.pi / 4
    mode: str = "full"
    seed: int = 7
    integrator: evolve.PropagatorConfig = field(default_factory=evolve.PropagatorConfig)

    def __post_init__(self):
        if self.w <= 0:
            raise DimensionError("w must be positive")
        if self.U_max < 0 or (self.Uprime_max is not None and self.Uprime_max < 0):
            raise DimensionError("Coulomb strengths must be nonnegative")
        if self.mode not in ("full", "effective"):
            raise DimensionError(f"mode must be 'full' or 'effective', got {self.mode!r}")
        if self.U_max > 0 and self.w / self.U_max > 0.1:
            warnings.warn(
                f"w/U_max = {self.w / self.U_max:.3f} > 0.1: the two-level "
                "reduction degrades in this regime",
                stacklevel=2,
            )

    def resolved_Uprime(self) -> float:
        return self.U_max if self.Uprime_max is None else self.Uprime_max

    def resolved_bell_U(self) -> float:
        return self.resolved_Uprime() if self.bell_U is None else self.bell_U

    def resolved_T_ent(self) -> float:
        if self.T_ent is not None:
            return self.T_ent
        return max(2.0 * self.U_max / self.w**2, 10.0 / self.w)

    def resolved_T_couple(self, support_gap: float) -> float:
        if self.T_couple is not None:
            return self.T_couple
        t = 1.0 / (4.0 * (support_gap / 2.0) * EPS_ADIABATIC)
        if t > MAX_AUTO_RAMP / self.w:
            raise ConfigError(
                f"faithful coupling needs a ramp of {t:.3g}/w (crossing gap "
                f"{support_gap:.3g}); lower U_max, shorten the chain, or set "
                "T_couple explicitly to run it anyway"
            )
        return t


# --------------------------------------------------------------------------
# stage devices


def encode_graph(w: float, phi: float) -> dev.DeviceGraph:
    """Single-DQD encoder device realizing the +2*phi amplitude family."""
    return dev.DeviceGraph(
        dqds=(0,),
        tunnel_terms=(dev.TunnelTerm(0, dev.Schedule.constant(w), phase=-2.0 * phi),),
    )


def entangler_graph(params: ProtocolParams) -> dev.DeviceGraph:
    """Support pair with a smooth repulsion ramp 0 -> U_max over T_ent."""
    T = params.resolved_T_ent()
    ramp = dev.Schedule.smooth(0.0, params.U_max, 0.0, T)
    return dev.DeviceGraph(
        dqds=(0, 1),
        tunnel_terms=(
            dev.TunnelTerm(0, dev.Schedule.constant(params.w)),
            dev.TunnelTerm(1, dev.Schedule.constant(params.w)),
        ),
        coulomb_links=dev.dqd_pair_links(0, 1, ramp),
    )


def support_graph(params: ProtocolParams, n_support: int) -> dev.DeviceGraph:
    """Support register (pair or chain) at its repulsion plateau."""
    links = []
    for k in range(n_support - 1):
        links += dev.dqd_pair_links(k, k + 1, dev.Schedule.constant(params.U_max))
    return dev.DeviceGraph(
        dqds=tuple(range(n_support)),
        tunnel_terms=tuple(
            dev.TunnelTerm(k, dev.Schedule.constant(params.w)) for k in range(n_support)
        ),
        coulomb_links=tuple(links),
    )


def support_crossing_gap(params: ProtocolParams, n_support: int) -> float:
    """Splitting of the two lowest support levels at the coupling start.

    This is the avoided-crossing gap the coupling ramp has to negotiate:
    2J = 4w^2/U_max for a single pair, and it shrinks quickly (order
    w(w/U)^(n-1)) for longer chains.
    """
    H = dev.hamiltonian_at(support_graph(params, n_support), 0.0)
    evals = np.linalg.eigvalsh(H)
    return float(evals[1] - evals[0])


def coupler_graph(params: ProtocolParams, n_support: int,
                  t_couple: float, gap: float) -> dev.DeviceGraph:
    """Encoder (frozen) + support register, with the encoder-support link ramp.

    The encoder-support repulsion follows a gap-adapted tangent profile so
    the ramp is slow exactly where the support's aligned doublet rotates.
    """
    n = n_support + 1
    links = []
    for k in range(1, n - 1):
        links += dev.dqd_pair_links(k, k + 1, dev.Schedule.constant(params.U_max))
    ramp = dev.Schedule.tangent(0.0, params.resolved_Uprime(), 0.0, t_couple, gap_scale=gap / 2.0)
    links += dev.dqd_pair_links(0, 1, ramp)
    return dev.DeviceGraph(
        dqds=tuple(range(n)),
        tunnel_terms=tuple(
            dev.TunnelTerm(k, dev.Schedule.constant(params.w)) for k in range(1, n)
        ),
        coulomb_links=tuple(links),
    )


def bell_stage_graph(params: ProtocolParams, n_qubits: int) -> dev.DeviceGraph:
    """Rotation-stage device: tunneling on qubits 0 and 1 plus their link.

    Bob and any intermediate chain qubits carry no terms at all -- their
    dynamics is frozen by construction.
    """
    return dev.DeviceGraph(
        dqds=tuple(range(n_qubits)),
        tunnel_terms=(
            dev.TunnelTerm(0, dev.Schedule.constant(params.w)),
            dev.TunnelTerm(1, dev.Schedule.constant(params.w)),
        ),
        coulomb_links=dev.dqd_pair_links(0, 1, dev.Schedule.constant(params.resolved_bell_U())),
    )


# --------------------------------------------------------------------------
# stage operations


@dataclass(frozen=True)
class EncodeResult:
    t_bar: float
    state: StateVector
    achieved: InputQubit


def encode_qubit(target: InputQubit, w: float, phi: float = 0.0) -> EncodeResult:
    """Free evolution of |0> cut off at t_bar = arccos(|alpha|)/w.

    Only the magnitude of the target is programmable; the relative phase of
    the achieved qubit is fixed to i*exp(2i phi).  The achieved amplitudes
    are returned and downstream fidelity checks score against them.
    """
    mag = abs(target.alpha)
    if mag > 1.0 + 1e-12:
        raise DimensionError(f"|alpha| = {mag} > 1")
    t_bar = float(np.arccos(min(mag, 1.0)) / w)
    H = dev.hamiltonian_at(encode_graph(w, phi), 0.0)
    state = evolve.evolve_static(StateVector.computational(1, 0), H, t_bar)
    achieved = InputQubit(state.amps[0], state.amps[1])
    return EncodeResult(t_bar, state, achieved)


def cross_to_aligned_ratio(U: float, w: float) -> float:
    """Ground-state amplitude ratio (cross configurations over aligned ones).

    Equals (sqrt(U^2 + 16 w^2) - U)/(4 w), evaluated in the equivalent
    cancellation-free form 4w/(sqrt(U^2 + 16 w^2) + U).
    """
    if w <= 0:
        raise DimensionError("w must be positive")
    return 4.0 * w / (np.hypot(U, 4.0 * w) + U)


def entangled_pair_reference(U: float, w: float) -> StateVector:
    """Exact two-qubit ground state at repulsion plateau U.

    Aligned amplitudes 1 and cross amplitudes r = (sqrt(U^2+16w^2)-U)/(4w),
    normalized; the cross sign is positive, matching direct diagonalization.
    """
    r = cross_to_aligned_ratio(U, w)
    amps = np.array([1.0, r, r, 1.0], dtype=complex)
    return StateVector(amps / np.linalg.norm(amps))


def bell_target(n_qubits: int = 2) -> StateVector:
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return StateVector(amps)


def make_entangled_pair(params: ProtocolParams):
    """Support-pair preparation; returns (state, ramp diagnostics or None)."""
    if params.mode == "effective":
        return entangled_pair_reference(params.U_max, params.w), None
    g = entangler_graph(params)
    start = evolve.ground_state(dev.hamiltonian_at(g, 0.0)).state
    return evolve.adiabatic_ramp(start, g, 0.0, params.resolved_T_ent(), params.integrator)


def ghz_encoded(alpha: complex, beta: complex, n_qubits: int) -> StateVector:
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[0] = alpha
    amps[-1] = beta
    return StateVector(amps)


def couple_unknown(unknown: StateVector, support: StateVector,
                   params: ProtocolParams) -> StateVector:
    """Attach the encoder qubit to the support register.

    Full mode ramps the encoder-support repulsion with the gap-adapted
    profile; effective mode returns alpha|0...0> + beta|1...1> exactly.
    """
    if unknown.n_qubits != 1:
        raise DimensionError("unknown state must be a single qubit")
    if support.n_qubits < 2:
        raise DimensionError("support register needs at least two qubits")
    n = 1 + support.n_qubits
    if params.mode == "effective":
        return ghz_encoded(unknown.amps[0], unknown.amps[1], n)
    gap = support_crossing_gap(params, support.n_qubits)
    t_couple = params.resolved_T_couple(gap)
    g = coupler_graph(params, support.n_qubits, t_couple, gap)
    start = tensor_product(unknown, support)
    return evolve.evolve_scheduled(start, g, 0.0, t_couple, params.integrator)


def effective_rabi(w: float, U: float) -> float:
    """Second-order rotation rate 2 w^2 / U of the aligned doublet."""
    if w == 0:
        return 0.0
    if U <= 0:
        raise DimensionError("effective rate needs U > 0")
    return 2.0 * w**2 / U


def _aligned_indices(n: int):
    idx = np.arange(2**n)
    aligned = ((idx ^ (idx >> 1)) & 1) == 0  # bit0 == bit1
    i00 = idx[aligned & ((idx & 1) == 0)]
    return i00, i00 | 0b11


def bell_evolution(state: StateVector, params: ProtocolParams, t: float) -> StateVector:
    """Timed rotation of the (q0, q1) aligned block; all other qubits frozen.

    Full mode evolves the static rotation-stage device exactly; effective
    mode applies cos(wt)*I + i sin(wt)*(flip q0, q1) on the aligned block
    with the rate from :func:`effective_rabi`.
    """
    n = state.n_qubits
    if n < 2:
        raise DimensionError("rotation stage needs at least qubits 0 and 1")
    if params.mode == "effective":
        om = effective_rabi(params.w, params.resolved_bell_U())
        i00, i11 = _aligned_indices(n)
        amps = state.amps.copy()
        c, s = np.cos(om * t), np.sin(om * t)
        a00, a11 = amps[i00].copy(), amps[i11].copy()
        amps[i00] = c * a00 + 1j * s * a11
        amps[i11] = c * a11 + 1j * s * a00
        return _unsafe_state(amps)
    H = dev.hamiltonian_at(bell_stage_graph(params, n), 0.0)
    return evolve.evolve_static(state, H, t)


@dataclass(frozen=True)
class BranchResult:
    outcome: int
    probability: float
    bob_state_raw: StateVector
    bob_state_corrected: StateVector
    fidelity: float


@dataclass
class TeleportResult:
    outcome: int
    p0: float
    p1: float
    bob_state_raw: StateVector
    bob_state_corrected: StateVector
    fidelity_to_input: float
    branches: tuple
    step_log: dict


def _logical_pair(rho_matrix: np.ndarray) -> StateVector:
    """Two-dimensional logical readout of a (near-)pure trailing register.

    Takes the dominant eigenvector and keeps its weight on the code pair
    {|0...0>, |1...1>}; for a single trailing qubit this is just the
    dominant eigenvector itself.
    """
    _, vecs = np.linalg.eigh(rho_matrix)
    v = vecs[:, -1]
    pair = np.array([v[0], v[-1]], dtype=complex)
    norm = np.linalg.norm(pair)
    if norm < 1e-12:
        return _unsafe_state(np.array([1.0, 0.0], dtype=complex))
    return _unsafe_state(fix_phase(pair / norm))


def alice_measure_and_correct(state: StateVector, params: ProtocolParams,
                              achieved: InputQubit) -> TeleportResult:
    """Measure the encoder charge, apply Bob's conditional phase, and score.

    Works for any register length: Alice keeps qubits 0 and 1, everything
    from qubit 2 on is the receiving register.  Its target is the achieved
    amplitudes written on the {|0...0>, |1...1>} pair, which for the
    three-DQD protocol is literally Bob's qubit.  Both branches are always
    evaluated; ``outcome`` follows a seeded draw.
    """
    n = state.n_qubits
    if n < 3:
        raise DimensionError("need encoder, support and at least one receiving qubit")
    trailing = list(range(2, n))
    nt = len(trailing)
    target = ghz_encoded(achieved.alpha, achieved.beta, nt)

    meas = measure_qubit(state, 0, rng=np.random.default_rng(params.seed))
    branches = []
    for outcome in (0, 1):
        prob = (meas.p0, meas.p1)[outcome]
        if prob < 1e-12:
            # an empty branch can only occur for degenerate inputs
            branches.append(None)
            continue
        rho = partial_trace(meas.branch(outcome), trailing).matrix
        raw = _logical_pair(rho)
        corr = np.array(
            [CORRECTIONS[outcome][1, 1] if (i >> (nt - 1)) & 1 else 1.0
             for i in range(2**nt)]
        )
        rho_corr = (corr[:, None] * rho) * corr.conj()[None, :]
        corrected = _logical_pair(rho_corr)
        fid = float(np.real(target.amps.conj() @ rho_corr @ target.amps))
        branches.append(BranchResult(outcome, float(prob), raw, corrected, fid))

    picked = branches[meas.outcome]
    if picked is None:  # sampled branch can never be the empty one
        picked = branches[1 - meas.outcome]
    return TeleportResult(
        outcome=picked.outcome,
        p0=meas.p0,
        p1=meas.p1,
        bob_state_raw=picked.bob_state_raw,
        bob_state_corrected=picked.bob_state_corrected,
        fidelity_to_input=picked.fidelity,
        branches=tuple(b for b in branches if b is not None),
        step_log={"measure": {"p0": meas.p0, "p1": meas.p1}},
    )


def teleport_end_to_end(target: InputQubit, params: ProtocolParams) -> TeleportResult:
    """Run encode -> entangle -> couple -> rotate -> measure-and-correct.

    The step log records each stage's fidelity against its effective-mode
    reference, the entangling ramp diagnostics, and the stage norms.
    """
    enc = encode_qubit(target, params.w, params.phi)
    log = {
        "encode": {"t_bar": enc.t_bar,
                   "achieved": (enc.achieved.alpha, enc.achieved.beta)},
    }

    pair, ramp_diag = make_entangled_pair(params)
    pair_entry = {
        "bell_overlap_sq": fidelity(pair, bell_target(2)),
        "reference_overlap_sq": fidelity(pair, entangled_pair_reference(params.U_max, params.w)),
        "norm": float(np.linalg.norm(pair.amps)),
    }
    if ramp_diag is not None:
        pair_entry["min_gap"] = ramp_diag.min_gap
        pair_entry["ground_overlap_sq"] = ramp_diag.final_ground_overlap_sq
    log["entangle"] = pair_entry

    coupled = couple_unknown(enc.state, pair, params)
    ghz_ref = ghz_encoded(enc.achieved.alpha, enc.achieved.beta, coupled.n_qubits)
    log["couple"] = {
        "target_overlap_sq": fidelity(coupled, ghz_ref),
        "norm": float(np.linalg.norm(coupled.amps)),
    }

    om = effective_rabi(params.w, params.resolved_bell_U())
    t_wait = params.wait_angle / om
    post = bell_evolution(coupled, params, t_wait)
    eff_post = bell_evolution(ghz_ref, replace(params, mode="effective"), t_wait)
    log["bell"] = {
        "t_wait": t_wait,
        "effective_overlap_sq": fidelity(post, eff_post),
        "norm": float(np.linalg.norm(post.amps)),
    }

    result = alice_measure_and_correct(post, params, enc.achieved)
    log["measure"] = result.step_log["measure"]
    result.step_log = log
    return result


# --------------------------------------------------------------------------
# reference identity: the textbook four-branch decomposition


BELL_BASIS = {
    "phi+": np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2),
    "phi-": np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2),
    "psi+": np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2),
    "psi-": np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2),
}

PAULIS = {"I": ID2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


@dataclass(frozen=True)
class BellBranch:
    name: str
    probability: float
    corrections: tuple
    best_fidelity: float


@dataclass(frozen=True)
class BellDecompositionReport:
    branches: dict
    ok: bool


def bell_decomposition_check(target: InputQubit, tol: float = 1e-10) -> BellDecompositionReport:
    """Verify the four-branch measurement identity on (unknown x shared pair).

    Builds (a|0>+b|1>) x (|01>+|10>)/sqrt(2), projects the first two qubits
    onto each Bell state and reports which single-qubit Pauli restores the
    input on the third qubit (up to a global phase).  For generic inputs the
    mapping is phi+ -> X, phi- -> Y, psi+ -> I, psi- -> Z; the psi- branch
    carries the Z correction that standard bookkeeping sometimes mislabels.
    """
    shared = StateVector(np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2))
    psi = tensor_product(target.state(), shared)
    arr = psi.amps.reshape(2, 2, 2)  # axes [q2, q1, q0]

    branches = {}
    ok = True
    for name, bell in BELL_BASIS.items():
        bell_arr = bell.reshape(2, 2)  # axes [q1, q0]
        # cond[x] = <bell|_{q0,q1} psi>, leaving the B amplitude on x
        cond = np.einsum("bxy,xy->b", arr, bell_arr.conj())
        prob = float(np.vdot(cond, cond).real)
        found = []
        best = 0.0
        if prob > 1e-14:
            cond_n = cond / np.sqrt(prob)
            for pname, P in PAULIS.items():
                f = abs(np.vdot(target.state().amps, P @ cond_n)) ** 2
                best = max(best, f)
                if f >= 1.0 - tol:
                    found.append(pname)
        branches[name] = BellBranch(name, prob, tuple(found), best)
        ok = ok and bool(found)
    return BellDecompositionReport(branches, ok)
