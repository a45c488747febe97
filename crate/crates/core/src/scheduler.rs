//! Per-slot scheduling layer: network state, expected immediate reward,
//! greedy action selection, episode simulation, and an exact enumeration
//! oracle for small instances.
//!
//! Each slot the transmitter picks one action — a coded packet from some
//! generator, or an uncoded packet for the baseline schemes — and every user
//! independently receives it with probability `1 - p_i`. Feedback is perfect
//! and instantaneous, so policies see the realized network state of the
//! previous slot. Throughput is the sum of final decodable prefixes divided
//! by `K * T` (packets per user per slot).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

use crate::baselines;
use crate::channel::Point2D;
use crate::coding::{
    decodable_prefix, encode, generic_prefix_mixed, CodedPacket, Generator, StatusMatrix,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::scenario::Scenario;
use crate::seed::SeedTree;

/// Largest `K * T` product accepted by [`enumerate_exact`].
pub const ENUMERATE_CELL_LIMIT: usize = 20;

/// One transmission: a coded packet from a generator, or an original packet
/// sent uncoded (modeled as a unit coefficient vector).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Coded(u8),
    Plain(u8),
}

/// How receptions are tracked during simulation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReceptionModel {
    /// Rank bookkeeping on generator indices only (almost-sure behavior for
    /// a large field); the planner always uses this model.
    #[default]
    Generic,
    /// Explicit GF(2^8) coefficients with Gaussian elimination.
    Elimination,
}

/// Reception record of one user.
#[derive(Clone, Debug)]
pub struct UserRecord {
    /// Generator indices of received coded packets, in slot order.
    gens: Vec<u8>,
    /// Indices of original packets received uncoded.
    plain: BTreeSet<u8>,
    /// Coefficient-level record, kept under the elimination model.
    matrix: Option<StatusMatrix>,
}

impl UserRecord {
    fn new(layers: u8, slots: usize, model: ReceptionModel) -> Self {
        UserRecord {
            gens: Vec::new(),
            plain: BTreeSet::new(),
            matrix: match model {
                ReceptionModel::Generic => None,
                ReceptionModel::Elimination => Some(StatusMatrix::new(layers as usize, slots)),
            },
        }
    }

    /// Decodable prefix under this record's model.
    pub fn prefix(&self) -> usize {
        match &self.matrix {
            Some(m) => decodable_prefix(m),
            None => generic_prefix_mixed(&self.plain, &self.gens),
        }
    }

    /// Prefix under the generic planning model, regardless of how receptions
    /// are tracked.
    pub fn planning_prefix(&self) -> usize {
        generic_prefix_mixed(&self.plain, &self.gens)
    }

    /// Planning prefix if `action` were additionally received.
    pub fn planning_prefix_with(&self, action: Action) -> usize {
        match action {
            Action::Coded(l) => {
                let mut gens = self.gens.clone();
                gens.push(l);
                generic_prefix_mixed(&self.plain, &gens)
            }
            Action::Plain(j) => {
                let mut plain = self.plain.clone();
                plain.insert(j);
                generic_prefix_mixed(&plain, &self.gens)
            }
        }
    }

    /// Whether the user holds original packet `j` (received uncoded).
    pub fn holds_plain(&self, j: u8) -> bool {
        self.plain.contains(&j)
    }

    pub fn received_gens(&self) -> &[u8] {
        &self.gens
    }
}

/// Union of all users' reception records at the current slot.
#[derive(Clone, Debug)]
pub struct NetworkState {
    users: Vec<UserRecord>,
    slot: usize,
    layers: u8,
    slots: usize,
}

impl NetworkState {
    pub fn new(k: usize, layers: u8, slots: usize, model: ReceptionModel) -> Self {
        NetworkState {
            users: (0..k).map(|_| UserRecord::new(layers, slots, model)).collect(),
            slot: 0,
            layers,
            slots,
        }
    }

    pub fn users(&self) -> &[UserRecord] {
        &self.users
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn layers(&self) -> u8 {
        self.layers
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    /// Record that `user` received `action` in `slot`. Coded actions under
    /// the elimination model carry the broadcast packet's coefficients.
    pub fn apply_reception(
        &mut self,
        user: usize,
        slot: usize,
        action: Action,
        packet: Option<&CodedPacket>,
    ) {
        let record = &mut self.users[user];
        match action {
            Action::Coded(l) => {
                record.gens.push(l);
                if let Some(m) = &mut record.matrix {
                    m.record(packet.expect("elimination model requires the coded packet"));
                }
            }
            Action::Plain(j) => {
                record.plain.insert(j);
                if let Some(m) = &mut record.matrix {
                    m.record_plain(slot, j);
                }
            }
        }
    }

    fn advance_slot(&mut self) {
        self.slot += 1;
    }
}

/// Expected immediate reward of `action`: the sum over users of the success
/// probability times the prefix improvement, with the loss branch worth zero.
/// Planning always runs on the generic model.
pub fn expected_reward(state: &NetworkState, pers: &[f64], action: Action) -> f64 {
    debug_assert_eq!(pers.len(), state.users.len());
    let mut total = 0.0;
    for (record, &p) in state.users.iter().zip(pers) {
        if p >= 1.0 {
            continue;
        }
        let before = record.planning_prefix();
        let after = record.planning_prefix_with(action);
        total += (1.0 - p) * (after - before) as f64;
    }
    total
}

/// Greedy slot action: the generator maximizing [`expected_reward`], ties
/// broken toward the smallest index.
pub fn gst_select(state: &NetworkState, pers: &[f64]) -> Action {
    let mut best = Action::Coded(1);
    let mut best_reward = f64::NEG_INFINITY;
    for l in 1..=state.layers {
        let action = Action::Coded(l);
        let reward = expected_reward(state, pers, action);
        if reward > best_reward {
            best = action;
            best_reward = reward;
        }
    }
    best
}

/// Slot-by-slot transmission policy of a scheme.
#[derive(Clone, Debug)]
pub enum PolicyState {
    /// Greedy scheduling on live feedback (the adaptive RNC scheme).
    Gst,
    /// Traditional RNC: always code over the whole block.
    Rnc,
    /// Multicast ARQ: retransmit the lowest packet not yet held by everyone.
    Arq,
    /// Round-robin: cycle the original packets regardless of feedback.
    Rrs,
    /// Replay a fixed schedule (exactly `T` actions).
    Fixed(Vec<Action>),
}

impl PolicyState {
    pub fn for_scheme(scheme: baselines::SchemeKind) -> PolicyState {
        match scheme {
            baselines::SchemeKind::Uarnc | baselines::SchemeKind::UarncFixed => PolicyState::Gst,
            baselines::SchemeKind::Rnc => PolicyState::Rnc,
            baselines::SchemeKind::Arq => PolicyState::Arq,
            baselines::SchemeKind::Rrs => PolicyState::Rrs,
        }
    }

    pub fn select(&mut self, state: &NetworkState, pers: &[f64]) -> Action {
        match self {
            PolicyState::Gst => gst_select(state, pers),
            PolicyState::Rnc => baselines::rnc_action(state),
            PolicyState::Arq => baselines::arq_action(state),
            PolicyState::Rrs => baselines::rrs_action(state),
            PolicyState::Fixed(actions) => {
                assert_eq!(actions.len(), state.slots, "fixed schedule must cover all slots");
                actions[state.slot]
            }
        }
    }
}

/// A forced K x T loss pattern (true = lost).
#[derive(Clone, Debug)]
pub struct ErasurePattern {
    k: usize,
    slots: usize,
    lost: Vec<bool>,
}

impl ErasurePattern {
    pub fn new(k: usize, slots: usize) -> Self {
        ErasurePattern { k, slots, lost: vec![false; k * slots] }
    }

    pub fn from_fn(k: usize, slots: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut p = ErasurePattern::new(k, slots);
        for user in 0..k {
            for t in 0..slots {
                p.set(user, t, f(user, t));
            }
        }
        p
    }

    pub fn set(&mut self, user: usize, slot: usize, lost: bool) {
        self.lost[user * self.slots + slot] = lost;
    }

    pub fn lost(&self, user: usize, slot: usize) -> bool {
        self.lost[user * self.slots + slot]
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Where per-user per-slot losses come from.
pub enum ErasureSource<'a> {
    /// Independent Bernoulli draws with the user's PER.
    Bernoulli(&'a mut ChaCha8Rng),
    /// A forced pattern (worked examples, exact enumeration).
    Forced(&'a ErasurePattern),
}

impl ErasureSource<'_> {
    fn lost(&mut self, user: usize, slot: usize, p: f64) -> bool {
        match self {
            ErasureSource::Bernoulli(rng) => rng.random::<f64>() < p,
            ErasureSource::Forced(pattern) => pattern.lost(user, slot),
        }
    }
}

/// Outcome of one simulated episode.
#[derive(Clone, Debug)]
pub struct EpisodeResult {
    pub per_user_prefix: Vec<usize>,
    /// Sum of final prefixes divided by `K * T`.
    pub throughput: f64,
    pub realized_actions: Vec<Action>,
    /// `erasure_log[user][slot]` is true when the packet was lost.
    pub erasure_log: Vec<Vec<bool>>,
}

/// Static parameters of one episode.
#[derive(Clone, Copy, Debug)]
pub struct EpisodeParams<'a> {
    pub pers: &'a [f64],
    pub layers: u8,
    pub slots: usize,
    pub model: ReceptionModel,
}

/// Run one episode: `T` slots of select-transmit-receive with perfect
/// feedback. `coeff_rng` is consumed only under the elimination model, so
/// erasure draws are identical across models for the same streams.
pub fn simulate_episode(
    params: &EpisodeParams,
    policy: &mut PolicyState,
    mut erasures: ErasureSource,
    coeff_rng: &mut ChaCha8Rng,
) -> EpisodeResult {
    let k = params.pers.len();
    let mut state = NetworkState::new(k, params.layers, params.slots, params.model);
    let mut realized = Vec::with_capacity(params.slots);
    let mut log = vec![vec![false; params.slots]; k];
    for t in 0..params.slots {
        let action = policy.select(&state, params.pers);
        let packet = match (params.model, action) {
            (ReceptionModel::Elimination, Action::Coded(l)) => {
                let gen = Generator::new(l, params.layers).expect("policy produced a valid generator");
                Some(encode(gen, t, coeff_rng))
            }
            _ => None,
        };
        for user in 0..k {
            let lost = erasures.lost(user, t, params.pers[user]);
            log[user][t] = lost;
            if !lost {
                state.apply_reception(user, t, action, packet.as_ref());
            }
        }
        state.advance_slot();
        realized.push(action);
    }
    let per_user_prefix: Vec<usize> = state.users.iter().map(UserRecord::prefix).collect();
    let total: usize = per_user_prefix.iter().sum();
    EpisodeResult {
        per_user_prefix,
        throughput: total as f64 / (k as f64 * params.slots as f64),
        realized_actions: realized,
        erasure_log: log,
    }
}

/// Episode for a scenario with the transmitter at `q`, using labeled
/// substreams of `seed` ("erasure" and "coeffs") for all randomness.
pub fn run_episode(
    scenario: &Scenario,
    q: Point2D,
    scheme: baselines::SchemeKind,
    seed: &SeedTree,
) -> Result<EpisodeResult> {
    let pers = scenario.user_pers(&q)?;
    let mut policy = PolicyState::for_scheme(scheme);
    let mut erasure_rng = seed.child("erasure", 0).rng();
    let mut coeff_rng = seed.child("coeffs", 0).rng();
    let params = EpisodeParams {
        pers: &pers,
        layers: scenario.layers,
        slots: scenario.slots,
        model: scenario.reception,
    };
    Ok(simulate_episode(
        &params,
        &mut policy,
        ErasureSource::Bernoulli(&mut erasure_rng),
        &mut coeff_rng,
    ))
}

/// Exact expected throughput of a scheme by summing over every erasure
/// pattern, replaying the scheme deterministically (generic model) on each.
/// Limited to `K * T <= 20` cells.
pub fn enumerate_exact(
    pers: &[f64],
    layers: u8,
    slots: usize,
    scheme: baselines::SchemeKind,
) -> Result<f64> {
    let k = pers.len();
    let cells = k * slots;
    if cells > ENUMERATE_CELL_LIMIT {
        return Err(Error::InstanceTooLarge { cells, limit: ENUMERATE_CELL_LIMIT });
    }
    let patterns = 1usize << cells;
    let total = exec::sum_indexed(patterns, 4096, |bits| {
        let mut prob = 1.0;
        let pattern = ErasurePattern::from_fn(k, slots, |user, t| bits >> (user * slots + t) & 1 == 1);
        for user in 0..k {
            for t in 0..slots {
                prob *= if pattern.lost(user, t) { pers[user] } else { 1.0 - pers[user] };
            }
        }
        if prob == 0.0 {
            return 0.0;
        }
        let mut policy = PolicyState::for_scheme(scheme);
        let params =
            EpisodeParams { pers, layers, slots, model: ReceptionModel::Generic };
        let mut dummy = ChaCha8Rng::seed_from_u64(0);
        let result =
            simulate_episode(&params, &mut policy, ErasureSource::Forced(&pattern), &mut dummy);
        prob * result.throughput
    });
    Ok(total)
}

/// [`enumerate_exact`] with the PERs taken from scenario geometry.
pub fn enumerate_exact_at(
    scenario: &Scenario,
    q: Point2D,
    scheme: baselines::SchemeKind,
) -> Result<f64> {
    let pers = scenario.user_pers(&q)?;
    enumerate_exact(&pers, scenario.layers, scenario.slots, scheme)
}
