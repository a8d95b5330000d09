//! Deterministic discrete-event network and clock: message scheduling with
//! delays, transient partitions, and clone bindings that let two node
//! endpoints share one sealer identity.
//!
//! All randomness flows from one seeded generator and events are totally
//! ordered by `(fire_ms, priority, seq)`, so identical `(scenario, seed)`
//! pairs produce bit-identical outcomes. Partition edges carry priority 0 so
//! that a window opens or heals before anything else scheduled for the same
//! instant; every other event keeps creation order.
//!
//! Cross-group messages during a partition window are dropped rather than
//! queued; when a window ends every endpoint broadcasts its view, which is
//! the post-heal synchronization the deliver rules resolve.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, BTreeMap};
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aura::{self, AuraConfig, AuraSealerState};
use crate::chain::{clique_total_weight, ChainView, SealerId, Transaction};
use crate::clique::{self, CliqueConfig, CliqueSealerState, SealTiming};

/// The attacker checks the owner of the current turn every 10 ms; triggered
/// partition edges are aligned to this grid.
pub const POLL_GRANULARITY_MS: u64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protocol {
    Aura,
    Clique,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelayModel {
    pub base_delay_ms: u64,
    pub jitter_ms: u64,
}

impl Default for DelayModel {
    fn default() -> DelayModel {
        DelayModel {
            base_delay_ms: 50,
            jitter_ms: 10,
        }
    }
}

/// A simulated node. Distinct endpoints may carry the same [`SealerId`]
/// (clones); endpoints without a sealer are passive observers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeEndpoint {
    pub endpoint_id: usize,
    pub sealer: Option<SealerId>,
}

/// Two endpoints sharing one key pair. At a partition window start the
/// primary's database is copied over the secondary's so both clones hold
/// identical views, then each seals for its own group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloneBinding {
    pub sealer: SealerId,
    pub primary: usize,
    pub secondary: usize,
}

/// When an endpoint is willing to seal, relative to the partition window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SealPolicy {
    pub seal_pre_window: bool,
    /// Max blocks sealed while a window is active; `None` is unlimited.
    pub window_budget: Option<u32>,
    pub seal_post_window: bool,
    /// Seal out-of-order without the random delay while a window is active.
    pub zero_oo_delay: bool,
}

impl SealPolicy {
    pub fn honest() -> SealPolicy {
        SealPolicy {
            seal_pre_window: true,
            window_budget: None,
            seal_post_window: true,
            zero_oo_delay: false,
        }
    }

    pub fn silent() -> SealPolicy {
        SealPolicy {
            seal_pre_window: false,
            window_budget: Some(0),
            seal_post_window: false,
            zero_oo_delay: false,
        }
    }
}

/// When a partition window opens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StartRule {
    AtMs(u64),
    /// First 10 ms poll at/after the attacker's turn comes up on the watched
    /// endpoint: for Aura the first own-turn step boundary at/after
    /// `warmup_index` steps; for Clique the first moment the watched head
    /// makes `head.number + 1` the attacker's in-order number with
    /// `head.number >= warmup_index`.
    AttackerTurn {
        watch_endpoint: usize,
        attacker: SealerId,
        warmup_index: u64,
    },
}

/// When a partition window closes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndRule {
    AfterMs(u64),
    /// Heal once the watched endpoint's branch gained this much weight since
    /// the window opened, or at `cap_ms` after the start, whichever first.
    WeightGain {
        watch_endpoint: usize,
        target: u64,
        cap_ms: u64,
    },
}

/// Time-windowed grouping of endpoints controlling message deliverability.
/// Group 0 is the attacker group by convention, group 1 the victim group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionWindow {
    pub start: StartRule,
    pub end: EndRule,
    pub groups: [Vec<usize>; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InjectAt {
    WindowStart,
    AtMs(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TxInjection {
    pub tx: Transaction,
    pub to_endpoint: usize,
    pub at: InjectAt,
}

/// Per-sealer scripted timing for deterministic replays.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedTiming {
    pub in_order_lag_ms: BTreeMap<u32, u64>,
    pub oo_delay_ms: BTreeMap<u32, u64>,
}

impl ScriptedTiming {
    pub fn is_empty(&self) -> bool {
        self.in_order_lag_ms.is_empty() && self.oo_delay_ms.is_empty()
    }
}

/// A fully resolved single-run scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub protocol: Protocol,
    pub n: u32,
    pub step_duration_ms: u64,
    pub block_period_ms: u64,
    pub delay: DelayModel,
    pub endpoints: Vec<NodeEndpoint>,
    pub policies: Vec<SealPolicy>,
    pub clones: Vec<CloneBinding>,
    pub window: Option<PartitionWindow>,
    pub injections: Vec<TxInjection>,
    pub scripted: ScriptedTiming,
    /// No event fires after this instant; timers are not scheduled past it.
    pub horizon_ms: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("scenario invalid: {0}")]
    Invalid(String),
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |msg: String| Err(ScenarioError::Invalid(msg));
        if self.n == 0 {
            return fail("n must be at least 1".into());
        }
        if self.horizon_ms == 0 {
            return fail("horizon_ms must be positive".into());
        }
        if self.step_duration_ms == 0 || self.block_period_ms == 0 {
            return fail("step/period durations must be positive".into());
        }
        if self.policies.len() != self.endpoints.len() {
            return fail("one seal policy per endpoint required".into());
        }
        for (i, ep) in self.endpoints.iter().enumerate() {
            if ep.endpoint_id != i {
                return fail(format!("endpoint ids must be dense, found {} at {i}", ep.endpoint_id));
            }
            if let Some(s) = ep.sealer {
                if s.0 >= self.n {
                    return fail(format!("endpoint {i} carries unknown sealer {s}"));
                }
            }
        }
        for clone in &self.clones {
            let valid = |e: usize| {
                self.endpoints
                    .get(e)
                    .is_some_and(|ep| ep.sealer == Some(clone.sealer))
            };
            if clone.primary == clone.secondary || !valid(clone.primary) || !valid(clone.secondary) {
                return fail(format!("clone binding for {} is inconsistent", clone.sealer));
            }
        }
        if let Some(window) = &self.window {
            let mut seen = vec![false; self.endpoints.len()];
            for (g, group) in window.groups.iter().enumerate() {
                if group.is_empty() {
                    return fail(format!("partition group {g} is empty"));
                }
                for &e in group {
                    if e >= self.endpoints.len() {
                        return fail(format!("partition group {g} references endpoint {e}"));
                    }
                    if seen[e] {
                        return fail(format!("endpoint {e} appears in both groups"));
                    }
                    seen[e] = true;
                }
            }
            if seen.iter().any(|s| !s) {
                return fail("partition groups must cover all endpoints".into());
            }
            for clone in &self.clones {
                let side = |e: usize| window.groups[0].contains(&e);
                if side(clone.primary) == side(clone.secondary) {
                    return fail(format!(
                        "clone endpoints for {} must sit in opposite groups",
                        clone.sealer
                    ));
                }
            }
            if let EndRule::AfterMs(0) = window.end {
                return fail("zero-length partition window".into());
            }
            match window.start {
                StartRule::AtMs(t) if t >= self.horizon_ms => {
                    return fail("partition starts past the horizon".into());
                }
                StartRule::AttackerTurn { watch_endpoint, attacker, .. } => {
                    let ok = self
                        .endpoints
                        .get(watch_endpoint)
                        .is_some_and(|ep| ep.sealer == Some(attacker));
                    if !ok {
                        return fail("window trigger must watch an attacker endpoint".into());
                    }
                }
                _ => {}
            }
        }
        for inj in &self.injections {
            if inj.to_endpoint >= self.endpoints.len() {
                return fail(format!("injection targets unknown endpoint {}", inj.to_endpoint));
            }
            if matches!(inj.at, InjectAt::WindowStart) && self.window.is_none() {
                return fail("window-start injection without a partition window".into());
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum EventKind {
    Timer {
        endpoint: usize,
    },
    Deliver {
        from: usize,
        to: usize,
        view: Arc<ChainView>,
    },
    InjectTx {
        to: usize,
        tx: Transaction,
        gossip: bool,
    },
    PartitionEdge {
        start: bool,
    },
}

#[derive(Clone, Debug)]
struct Event {
    fire_ms: u64,
    priority: u8,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Event) -> bool {
        (self.fire_ms, self.priority, self.seq) == (other.fire_ms, other.priority, other.seq)
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Event) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    fn cmp(&self, other: &Event) -> std::cmp::Ordering {
        (self.fire_ms, self.priority, self.seq).cmp(&(other.fire_ms, other.priority, other.seq))
    }
}

#[derive(Clone, Debug)]
enum Engine {
    Aura(AuraSealerState),
    Clique(CliqueSealerState),
}

#[derive(Clone, Debug)]
struct Endpoint {
    sealer: Option<SealerId>,
    engine: Engine,
    pool: Vec<Transaction>,
    sealed_in_window: u32,
}

impl Endpoint {
    fn view(&self) -> &ChainView {
        match &self.engine {
            Engine::Aura(s) => &s.view,
            Engine::Clique(s) => &s.view,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Pre,
    Active,
    Post,
}

/// Views of each partition group captured at the heal instant, before the
/// post-heal broadcast exchange.
#[derive(Clone, Debug)]
pub struct WindowReport {
    pub start_ms: u64,
    pub end_ms: u64,
    /// `(endpoint_id, view)` pairs; index 0 is the attacker group.
    pub group_views: [Vec<(usize, ChainView)>; 2],
}

#[derive(Clone, Debug)]
pub struct SimReport {
    pub final_views: Vec<ChainView>,
    pub window: Option<WindowReport>,
    pub trace: Option<String>,
    pub events: u64,
    pub dropped_cross_group: u64,
}

/// Runs the scenario to completion. Identical `(scenario, seed)` pairs
/// produce identical reports.
pub fn run_scenario(
    scenario: &Scenario,
    seed: u64,
    want_trace: bool,
) -> Result<SimReport, ScenarioError> {
    scenario.validate()?;
    let mut sim = Sim::new(scenario, seed, want_trace);
    sim.init();
    sim.run();
    Ok(sim.into_report())
}

struct Sim<'s> {
    sc: &'s Scenario,
    clique_cfg: CliqueConfig,
    endpoints: Vec<Endpoint>,
    group_of: Vec<Option<u8>>,
    queue: BinaryHeap<Reverse<Event>>,
    seq: u64,
    clock: u64,
    rng: ChaCha8Rng,
    phase: Phase,
    start_scheduled: bool,
    end_scheduled: bool,
    window_start_ms: u64,
    weight_at_start: u64,
    window_report: Option<WindowReport>,
    trace: Option<String>,
    events: u64,
    dropped_cross_group: u64,
}

impl<'s> Sim<'s> {
    fn new(sc: &'s Scenario, seed: u64, want_trace: bool) -> Sim<'s> {
        let aura_cfg = AuraConfig {
            n: sc.n,
            step_duration_ms: sc.step_duration_ms,
        };
        let clique_cfg = CliqueConfig::new(sc.n, sc.block_period_ms);
        let endpoints = sc
            .endpoints
            .iter()
            .map(|ep| Endpoint {
                sealer: ep.sealer,
                engine: match sc.protocol {
                    Protocol::Aura => Engine::Aura(AuraSealerState::new(
                        ep.sealer.unwrap_or(SealerId(u32::MAX)),
                        aura_cfg,
                    )),
                    Protocol::Clique => Engine::Clique(CliqueSealerState::new(
                        ep.sealer.unwrap_or(SealerId(u32::MAX)),
                        clique_cfg,
                    )),
                },
                pool: Vec::new(),
                sealed_in_window: 0,
            })
            .collect();
        Sim {
            sc,
            clique_cfg,
            endpoints,
            group_of: vec![None; sc.endpoints.len()],
            queue: BinaryHeap::new(),
            seq: 0,
            clock: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            phase: Phase::Pre,
            start_scheduled: false,
            end_scheduled: false,
            window_start_ms: 0,
            weight_at_start: 0,
            window_report: None,
            trace: if want_trace { Some(String::new()) } else { None },
            events: 0,
            dropped_cross_group: 0,
        }
    }

    fn push(&mut self, fire_ms: u64, priority: u8, kind: EventKind) {
        if fire_ms >= self.sc.horizon_ms {
            return;
        }
        let seq = self.seq;
        self.seq += 1;
        self.queue.push(Reverse(Event {
            fire_ms,
            priority,
            seq,
            kind,
        }));
    }

    fn trace_line(&mut self, line: String) {
        if let Some(trace) = &mut self.trace {
            let _ = writeln!(trace, "{line}");
        }
    }

    fn init(&mut self) {
        // static partition edges first so they precede same-instant timers
        if let Some(window) = &self.sc.window {
            if let StartRule::AtMs(t) = window.start {
                self.push(t, 0, EventKind::PartitionEdge { start: true });
                self.start_scheduled = true;
                if let EndRule::AfterMs(d) = window.end {
                    self.push(t + d, 0, EventKind::PartitionEdge { start: false });
                    self.end_scheduled = true;
                }
            } else if let (StartRule::AttackerTurn { attacker, warmup_index, .. }, Protocol::Aura) =
                (window.start, self.sc.protocol)
            {
                // Aura turns are clock-driven, so the trigger is static:
                // the first step at/after warmup owned by the attacker.
                let n = u64::from(self.sc.n);
                let base = warmup_index.max(1);
                let offset = (u64::from(attacker.0) + n - base % n) % n;
                let step = base + offset;
                self.push(
                    step * self.sc.step_duration_ms,
                    0,
                    EventKind::PartitionEdge { start: true },
                );
                self.start_scheduled = true;
            }
        }
        for inj in &self.sc.injections {
            if let InjectAt::AtMs(t) = inj.at {
                self.push(
                    t,
                    1,
                    EventKind::InjectTx {
                        to: inj.to_endpoint,
                        tx: inj.tx,
                        gossip: true,
                    },
                );
            }
        }
        match self.sc.protocol {
            Protocol::Aura => {
                for e in 0..self.endpoints.len() {
                    if let Some(id) = self.endpoints[e].sealer {
                        if self.always_silent(e) {
                            continue;
                        }
                        let first = if id.0 == 0 { u64::from(self.sc.n) } else { u64::from(id.0) };
                        self.push(
                            first * self.sc.step_duration_ms,
                            1,
                            EventKind::Timer { endpoint: e },
                        );
                    }
                }
            }
            Protocol::Clique => {
                for e in 0..self.endpoints.len() {
                    self.ensure_clique_scheduled(e);
                }
            }
        }
    }

    fn run(&mut self) {
        while let Some(Reverse(event)) = self.queue.pop() {
            if event.fire_ms >= self.sc.horizon_ms {
                break;
            }
            debug_assert!(event.fire_ms >= self.clock, "clock must be monotonic");
            self.clock = event.fire_ms;
            self.events += 1;
            match event.kind {
                EventKind::Timer { endpoint } => self.on_timer(endpoint),
                EventKind::Deliver { from, to, view } => self.on_deliver(from, to, &view),
                EventKind::InjectTx { to, tx, gossip } => self.on_inject(to, tx, gossip),
                EventKind::PartitionEdge { start } => self.on_partition_edge(start),
            }
        }
        if self.phase == Phase::Active {
            // horizon hit while partitioned; snapshot so callers still see
            // the per-branch state
            self.snapshot_window(self.clock);
            self.phase = Phase::Post;
        }
    }

    fn always_silent(&self, e: usize) -> bool {
        let p = self.sc.policies[e];
        !p.seal_pre_window && !p.seal_post_window && p.window_budget == Some(0)
    }

    fn allowed_to_seal(&self, e: usize) -> bool {
        let p = self.sc.policies[e];
        match self.phase {
            Phase::Pre => p.seal_pre_window,
            Phase::Post => p.seal_post_window,
            Phase::Active => match p.window_budget {
                Some(budget) => self.endpoints[e].sealed_in_window < budget,
                None => true,
            },
        }
    }

    fn seal_timing(&self, e: usize) -> SealTiming {
        let mut timing = SealTiming::default();
        if let Some(id) = self.endpoints[e].sealer {
            if let Some(&lag) = self.sc.scripted.in_order_lag_ms.get(&id.0) {
                timing.in_order_lag_ms = lag;
            }
            if let Some(&d) = self.sc.scripted.oo_delay_ms.get(&id.0) {
                timing.oo_delay_ms = Some(d);
            }
        }
        if self.phase == Phase::Active && self.sc.policies[e].zero_oo_delay {
            timing.oo_delay_ms = Some(0);
        }
        timing
    }

    fn reachable(&self, from: usize, to: usize) -> bool {
        if self.phase != Phase::Active {
            return true;
        }
        match (self.group_of[from], self.group_of[to]) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    fn next_poll(&self) -> u64 {
        (self.clock / POLL_GRANULARITY_MS + 1) * POLL_GRANULARITY_MS
    }

    fn broadcast(&mut self, from: usize) {
        let view = Arc::new(self.endpoints[from].view().clone());
        let head = view.head_id();
        let mut receivers = 0u32;
        for to in 0..self.endpoints.len() {
            if to == from || !self.reachable(from, to) {
                continue;
            }
            let jitter = if self.sc.delay.jitter_ms == 0 {
                0
            } else {
                self.rng.gen_range(0..=self.sc.delay.jitter_ms)
            };
            let at = self.clock + self.sc.delay.base_delay_ms + jitter;
            self.push(
                at,
                1,
                EventKind::Deliver {
                    from,
                    to,
                    view: Arc::clone(&view),
                },
            );
            receivers += 1;
        }
        let clock = self.clock;
        self.trace_line(format!(
            "t={clock} broadcast from={from} head={head} receivers={receivers}"
        ));
    }

    fn on_timer(&mut self, e: usize) {
        match self.sc.protocol {
            Protocol::Aura => self.on_aura_timer(e),
            Protocol::Clique => self.on_clique_timer(e),
        }
    }

    fn on_aura_timer(&mut self, e: usize) {
        let n = u64::from(self.sc.n);
        let next = self.clock + n * self.sc.step_duration_ms;
        self.push(next, 1, EventKind::Timer { endpoint: e });

        if !self.allowed_to_seal(e) {
            return;
        }
        let pool = self.endpoints[e].pool.clone();
        let clock = self.clock;
        let sealed = match &mut self.endpoints[e].engine {
            Engine::Aura(state) => aura::propose_aura(state, clock, &pool),
            Engine::Clique(_) => unreachable!("aura timer on clique engine"),
        };
        if let Some(block) = sealed {
            if self.phase == Phase::Active {
                self.endpoints[e].sealed_in_window += 1;
            }
            self.trace_line(format!(
                "t={clock} seal endpoint={e} id={} step={} txs={}",
                block.id,
                block.slot.index(),
                block.txs.len()
            ));
            self.broadcast(e);
            self.after_head_change(e);
        }
    }

    fn on_clique_timer(&mut self, e: usize) {
        let clock = self.clock;
        let fire_now = match &self.endpoints[e].engine {
            Engine::Clique(state) => state
                .pending_seal
                .is_some_and(|p| p.fire_ms == clock),
            Engine::Aura(_) => unreachable!("clique timer on aura engine"),
        };
        if !fire_now {
            return;
        }
        if !self.allowed_to_seal(e) {
            if let Engine::Clique(state) = &mut self.endpoints[e].engine {
                state.pending_seal = None;
            }
            return;
        }
        let pool = self.endpoints[e].pool.clone();
        let sealed = match &mut self.endpoints[e].engine {
            Engine::Clique(state) => clique::fire_seal(state, clock, &pool),
            Engine::Aura(_) => unreachable!(),
        };
        if let Some(block) = sealed {
            if self.phase == Phase::Active {
                self.endpoints[e].sealed_in_window += 1;
            }
            self.trace_line(format!(
                "t={clock} seal endpoint={e} id={} number={} weight={} txs={}",
                block.id,
                block.slot.index(),
                block.slot.weight().unwrap_or(0),
                block.txs.len()
            ));
            self.broadcast(e);
            self.after_head_change(e);
        }
        self.ensure_clique_scheduled(e);
    }

    fn ensure_clique_scheduled(&mut self, e: usize) {
        if self.endpoints[e].sealer.is_none() || !self.allowed_to_seal(e) {
            return;
        }
        let timing = self.seal_timing(e);
        let clock = self.clock;
        let pending = match &mut self.endpoints[e].engine {
            Engine::Clique(state) => {
                if state.pending_seal.is_some() {
                    return;
                }
                let pending = clique::schedule_seal(state, clock, &mut self.rng, timing);
                state.pending_seal = pending;
                pending
            }
            Engine::Aura(_) => return,
        };
        if let Some(p) = pending {
            self.push(p.fire_ms, 1, EventKind::Timer { endpoint: e });
        }
    }

    fn on_deliver(&mut self, from: usize, to: usize, view: &ChainView) {
        if !self.reachable(from, to) {
            self.dropped_cross_group += 1;
            let clock = self.clock;
            self.trace_line(format!("t={clock} drop from={from} to={to} (partitioned)"));
            return;
        }
        let valid = match self.sc.protocol {
            Protocol::Aura => aura::validate_aura_view(view, self.sc.n),
            Protocol::Clique => clique::validate_clique_view(view, &self.clique_cfg),
        };
        let clock = self.clock;
        if !valid {
            self.trace_line(format!("t={clock} reject to={to} head={}", view.head_id()));
            return;
        }
        let adopted = match &mut self.endpoints[to].engine {
            Engine::Aura(state) => aura::on_deliver_aura(state, view),
            Engine::Clique(state) => {
                let mut adopted = clique::on_deliver_clique(state, view);
                // Equal-weight sibling heads are the one tie a real client
                // resolves at block import; deeper equal-weight forks never
                // trigger a reorg. Without a shared preference a group whose
                // two eligible sealers raced each other can wedge on twin
                // heads for the rest of the partition. Block ids are content
                // hashes, so preferring the smaller id is an unbiased choice
                // every endpoint agrees on.
                if !adopted
                    && Self::sibling_tie(&state.view, view)
                    && view.head_id() < state.view.head_id()
                {
                    state.view.adopt(view);
                    if let Some(pending) = state.pending_seal {
                        if state.view.head().slot.index() + 1 != pending.target_number {
                            state.pending_seal = None;
                        }
                    }
                    adopted = true;
                }
                adopted
            }
        };
        self.trace_line(format!(
            "t={clock} deliver from={from} to={to} head={} adopted={adopted}",
            view.head_id()
        ));
        if adopted {
            if self.sc.protocol == Protocol::Clique {
                self.ensure_clique_scheduled(to);
            }
            self.after_head_change(to);
        }
    }

    fn on_inject(&mut self, to: usize, tx: Transaction, gossip: bool) {
        if !self.endpoints[to].pool.contains(&tx) {
            self.endpoints[to].pool.push(tx);
        }
        let clock = self.clock;
        self.trace_line(format!("t={clock} inject to={to} {tx} gossip={gossip}"));
        if gossip {
            for peer in 0..self.endpoints.len() {
                if peer == to || !self.reachable(to, peer) {
                    continue;
                }
                let jitter = if self.sc.delay.jitter_ms == 0 {
                    0
                } else {
                    self.rng.gen_range(0..=self.sc.delay.jitter_ms)
                };
                let at = self.clock + self.sc.delay.base_delay_ms + jitter;
                self.push(
                    at,
                    1,
                    EventKind::InjectTx {
                        to: peer,
                        tx,
                        gossip: false,
                    },
                );
            }
        }
    }

    fn sibling_tie(local: &ChainView, incoming: &ChainView) -> bool {
        let l = local.head();
        let i = incoming.head();
        clique_total_weight(local) == clique_total_weight(incoming)
            && l.id != i.id
            && l.slot.index() == i.slot.index()
            && l.parent == i.parent
    }

    /// Trigger and heal conditions watched on an endpoint's head.
    fn after_head_change(&mut self, e: usize) {
        let Some(window) = &self.sc.window else { return };
        match (self.phase, window.start, window.end) {
            (
                Phase::Pre,
                StartRule::AttackerTurn {
                    watch_endpoint,
                    attacker,
                    warmup_index,
                },
                _,
            ) if self.sc.protocol == Protocol::Clique
                && e == watch_endpoint
                && !self.start_scheduled =>
            {
                let head = self.endpoints[e].view().head().slot.index();
                if head >= warmup_index && clique::in_order(head + 1, attacker, self.sc.n) {
                    let at = self.next_poll();
                    self.push(at, 0, EventKind::PartitionEdge { start: true });
                    self.start_scheduled = true;
                }
            }
            (
                Phase::Active,
                _,
                EndRule::WeightGain {
                    watch_endpoint,
                    target,
                    ..
                },
            ) if e == watch_endpoint && !self.end_scheduled => {
                let gain =
                    clique_total_weight(self.endpoints[e].view()).saturating_sub(self.weight_at_start);
                if gain >= target {
                    let at = self.next_poll();
                    self.push(at, 0, EventKind::PartitionEdge { start: false });
                    self.end_scheduled = true;
                }
            }
            _ => {}
        }
    }

    fn on_partition_edge(&mut self, start: bool) {
        if start {
            self.open_window();
        } else {
            self.close_window();
        }
    }

    fn open_window(&mut self) {
        if self.phase != Phase::Pre {
            return;
        }
        let Some(window) = &self.sc.window else { return };
        // a triggered start re-verifies its condition; the head may have
        // moved during the poll alignment
        if let StartRule::AttackerTurn {
            watch_endpoint,
            attacker,
            warmup_index,
        } = window.start
        {
            if self.sc.protocol == Protocol::Clique {
                let head = self.endpoints[watch_endpoint].view().head().slot.index();
                if head < warmup_index || !clique::in_order(head + 1, attacker, self.sc.n) {
                    self.start_scheduled = false;
                    return;
                }
            }
        }
        self.phase = Phase::Active;
        self.window_start_ms = self.clock;
        for (g, group) in window.groups.iter().enumerate() {
            for &e in group {
                self.group_of[e] = Some(g as u8);
            }
        }
        for clone in &self.sc.clones {
            self.activate_clone(clone);
        }
        match window.end {
            EndRule::AfterMs(d) => {
                self.push(self.clock + d, 0, EventKind::PartitionEdge { start: false });
                self.end_scheduled = true;
            }
            EndRule::WeightGain {
                watch_endpoint,
                cap_ms,
                ..
            } => {
                self.weight_at_start = clique_total_weight(self.endpoints[watch_endpoint].view());
                self.push(
                    self.clock + cap_ms,
                    0,
                    EventKind::PartitionEdge { start: false },
                );
            }
        }
        let clock = self.clock;
        self.trace_line(format!("t={clock} partition-start"));
        let injections: Vec<TxInjection> = self
            .sc
            .injections
            .iter()
            .filter(|inj| matches!(inj.at, InjectAt::WindowStart))
            .copied()
            .collect();
        for inj in injections {
            self.on_inject(inj.to_endpoint, inj.tx, true);
        }
        if self.sc.protocol == Protocol::Clique {
            for e in 0..self.endpoints.len() {
                self.ensure_clique_scheduled(e);
            }
        }
    }

    /// Copies the primary clone's database over the secondary's, the
    /// synchronization the attacker performs at the start of the partition.
    fn activate_clone(&mut self, clone: &CloneBinding) {
        let view = self.endpoints[clone.primary].view().clone();
        let pool = self.endpoints[clone.primary].pool.clone();
        let secondary = &mut self.endpoints[clone.secondary];
        match &mut secondary.engine {
            Engine::Aura(state) => state.view = view,
            Engine::Clique(state) => {
                state.view = view;
                state.pending_seal = None;
            }
        }
        secondary.pool = pool;
        let clock = self.clock;
        self.trace_line(format!(
            "t={clock} clone-activate sealer={} primary={} secondary={}",
            clone.sealer, clone.primary, clone.secondary
        ));
    }

    fn snapshot_window(&mut self, end_ms: u64) {
        let Some(window) = &self.sc.window else { return };
        let group_views = [0, 1].map(|g| {
            window.groups[g]
                .iter()
                .map(|&e| (e, self.endpoints[e].view().clone()))
                .collect::<Vec<_>>()
        });
        self.window_report = Some(WindowReport {
            start_ms: self.window_start_ms,
            end_ms,
            group_views,
        });
    }

    fn close_window(&mut self) {
        if self.phase != Phase::Active {
            return;
        }
        let clock = self.clock;
        self.snapshot_window(clock);
        self.phase = Phase::Post;
        self.group_of.iter_mut().for_each(|g| *g = None);
        self.trace_line(format!("t={clock} partition-end"));
        for e in 0..self.endpoints.len() {
            self.broadcast(e);
        }
        if self.sc.protocol == Protocol::Clique {
            for e in 0..self.endpoints.len() {
                self.ensure_clique_scheduled(e);
            }
        }
    }

    fn into_report(self) -> SimReport {
        SimReport {
            final_views: self.endpoints.iter().map(|e| e.view().clone()).collect(),
            window: self.window_report,
            trace: self.trace,
            events: self.events,
            dropped_cross_group: self.dropped_cross_group,
        }
    }
}

/// Builds the endpoint list for `n` sealers plus one clone endpoint per
/// binding request, returning endpoints and bindings. Endpoint `i < n`
/// carries sealer `i`; clone endpoints follow in request order.
pub fn endpoints_with_clones(n: u32, cloned: &[SealerId]) -> (Vec<NodeEndpoint>, Vec<CloneBinding>) {
    let mut endpoints: Vec<NodeEndpoint> = (0..n as usize)
        .map(|i| NodeEndpoint {
            endpoint_id: i,
            sealer: Some(SealerId(i as u32)),
        })
        .collect();
    let mut clones = Vec::new();
    for (k, &sealer) in cloned.iter().enumerate() {
        let endpoint_id = n as usize + k;
        endpoints.push(NodeEndpoint {
            endpoint_id,
            sealer: Some(sealer),
        });
        clones.push(CloneBinding {
            sealer,
            primary: sealer.0 as usize,
            secondary: endpoint_id,
        });
    }
    (endpoints, clones)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::DecisionRule;

    fn honest_aura(n: u32, step_ms: u64, horizon_ms: u64) -> Scenario {
        let (endpoints, clones) = endpoints_with_clones(n, &[]);
        let policies = vec![SealPolicy::honest(); endpoints.len()];
        Scenario {
            protocol: Protocol::Aura,
            n,
            step_duration_ms: step_ms,
            block_period_ms: 5000,
            delay: DelayModel::default(),
            endpoints,
            policies,
            clones,
            window: None,
            injections: Vec::new(),
            scripted: ScriptedTiming::default(),
            horizon_ms,
        }
    }

    fn honest_clique(n: u32, period_ms: u64, horizon_ms: u64) -> Scenario {
        let mut sc = honest_aura(n, 3000, horizon_ms);
        sc.protocol = Protocol::Clique;
        sc.block_period_ms = period_ms;
        sc
    }

    #[test]
    fn honest_aura_one_block_per_step() {
        let sc = honest_aura(3, 1000, 10_000);
        let report = run_scenario(&sc, 1, false).unwrap();
        for view in &report.final_views {
            // ten second horizon: genesis plus steps 1..=9, one block each
            let branch = view.canonical_branch().unwrap();
            let steps: Vec<u64> = branch.iter().map(|b| b.slot.index()).collect();
            assert_eq!(steps, (0..=9).collect::<Vec<u64>>());
        }
        let heads: Vec<_> = report.final_views.iter().map(|v| v.head_id()).collect();
        assert!(heads.windows(2).all(|w| w[0] == w[1]), "nodes diverged");
    }

    #[test]
    fn honest_clique_in_order_chain() {
        let sc = honest_clique(5, 1000, 10_000);
        let report = run_scenario(&sc, 3, false).unwrap();
        let view = &report.final_views[0];
        let branch = view.canonical_branch().unwrap();
        assert!(branch.len() >= 8);
        for block in branch.iter().skip(1) {
            assert_eq!(block.slot.weight(), Some(2), "out-of-order block on honest chain");
        }
        let heads: Vec<_> = report.final_views.iter().map(|v| v.head_id()).collect();
        assert!(heads.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn identical_seeds_identical_reports() {
        let sc = honest_clique(9, 5000, 60_000);
        let a = run_scenario(&sc, 9, true).unwrap();
        let b = run_scenario(&sc, 9, true).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.final_views, b.final_views);
        let c = run_scenario(&sc, 10, true).unwrap();
        assert_ne!(a.trace, c.trace);
    }

    #[test]
    fn broadcast_respects_partition_groups() {
        let (endpoints, clones) = endpoints_with_clones(9, &[SealerId(1)]);
        let mut policies = vec![SealPolicy::honest(); endpoints.len()];
        policies[9] = SealPolicy {
            seal_pre_window: false,
            window_budget: Some(1),
            seal_post_window: false,
            zero_oo_delay: false,
        };
        let sc = Scenario {
            protocol: Protocol::Aura,
            n: 9,
            step_duration_ms: 1000,
            block_period_ms: 5000,
            delay: DelayModel::default(),
            endpoints,
            policies,
            clones,
            window: Some(PartitionWindow {
                start: StartRule::AtMs(5_000),
                end: EndRule::AfterMs(10_000),
                groups: [vec![1, 2, 3, 4, 5], vec![0, 6, 7, 8, 9]],
            }),
            injections: Vec::new(),
            scripted: ScriptedTiming::default(),
            horizon_ms: 30_000,
        };
        let report = run_scenario(&sc, 5, true).unwrap();
        let trace = report.trace.unwrap();
        let window = report.window.unwrap();
        assert_eq!(window.start_ms, 5_000);
        assert_eq!(window.end_ms, 15_000);
        // no deliver line may connect the two groups inside the window
        let attacker_group = [1usize, 2, 3, 4, 5];
        for line in trace.lines() {
            if !line.contains(" deliver ") {
                continue;
            }
            let t: u64 = line
                .split(' ')
                .next()
                .unwrap()
                .trim_start_matches("t=")
                .parse()
                .unwrap();
            if !(5_000..15_000).contains(&t) {
                continue;
            }
            let field = |name: &str| -> usize {
                line.split(' ')
                    .find(|f| f.starts_with(name))
                    .unwrap()
                    .split('=')
                    .nth(1)
                    .unwrap()
                    .parse()
                    .unwrap()
            };
            let from = field("from=");
            let to = field("to=");
            assert_eq!(
                attacker_group.contains(&from),
                attacker_group.contains(&to),
                "cross-group deliver inside window: {line}"
            );
        }
    }

    #[test]
    fn scenario_validation_catches_inconsistencies() {
        let mut sc = honest_aura(9, 1000, 10_000);
        sc.window = Some(PartitionWindow {
            start: StartRule::AtMs(1_000),
            end: EndRule::AfterMs(0),
            groups: [vec![0, 1, 2, 3], vec![4, 5, 6, 7, 8]],
        });
        assert!(matches!(sc.validate(), Err(ScenarioError::Invalid(_))));

        let mut sc = honest_aura(9, 1000, 10_000);
        sc.window = Some(PartitionWindow {
            start: StartRule::AtMs(1_000),
            end: EndRule::AfterMs(5_000),
            groups: [vec![0, 1, 2, 3], vec![3, 4, 5, 6, 7, 8]],
        });
        assert!(matches!(sc.validate(), Err(ScenarioError::Invalid(_))));
        let _ = DecisionRule::AuraMajority;
    }

    #[test]
    fn post_heal_views_converge() {
        let (endpoints, clones) = endpoints_with_clones(9, &[]);
        let policies = vec![SealPolicy::honest(); endpoints.len()];
        let sc = Scenario {
            protocol: Protocol::Aura,
            n: 9,
            step_duration_ms: 1000,
            block_period_ms: 5000,
            delay: DelayModel::default(),
            endpoints,
            policies,
            clones,
            window: Some(PartitionWindow {
                start: StartRule::AtMs(3_000),
                end: EndRule::AfterMs(9_000),
                groups: [vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8]],
            }),
            injections: Vec::new(),
            scripted: ScriptedTiming::default(),
            horizon_ms: 25_000,
        };
        let report = run_scenario(&sc, 11, false).unwrap();
        let heads: Vec<_> = report.final_views.iter().map(|v| v.head_id()).collect();
        assert!(heads.windows(2).all(|w| w[0] == w[1]), "no convergence after heal");
    }
}
