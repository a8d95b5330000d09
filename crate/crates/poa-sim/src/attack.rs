//! Plans and executes the key-cloning attack: group assignment, partition
//! timing, conflicting-transaction injection, and the three-condition
//! double-spend verdict.
//!
//! A plan clones each attacker identity onto a second endpoint, splits the
//! honest sealers across the two partition groups, and opens the partition
//! at the attacker's turn. The verdict is the conjunction of exactly three
//! conditions: the victim-side transaction committed before the heal, the
//! attacker group's partition blocks ended up canonical everywhere, and the
//! victim-side transaction is gone from the final chain.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{
    clique_majority, clique_total_weight, is_decided, BlockId, ChainView, DecisionRule, SealerId,
    Transaction,
};
use crate::sim::{
    self, CloneBinding, DelayModel, EndRule, InjectAt, NodeEndpoint, PartitionWindow, Protocol,
    Scenario, ScriptedTiming, SealPolicy, SimReport, StartRule, TxInjection, WindowReport,
};

/// The two conflicting transactions: `tx1` goes to the victim group, `tx2`
/// to the attacker group. Same sender, same nonce, different recipients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictingTxPair {
    pub tx1: Transaction,
    pub tx2: Transaction,
}

impl ConflictingTxPair {
    pub fn standard() -> ConflictingTxPair {
        let pair = ConflictingTxPair {
            tx1: Transaction {
                sender: 1000,
                recipient: 1001,
                amount: 1_000_000,
                nonce: 0,
            },
            tx2: Transaction {
                sender: 1000,
                recipient: 1002,
                amount: 1_000_000,
                nonce: 0,
            },
        };
        debug_assert!(pair.tx1.conflicts_with(&pair.tx2));
        pair
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttackStyle {
    Aura,
    CliqueOrderAware,
    CliqueBlind,
}

/// Group assignments, clone bindings, partition timing, and the conflicting
/// transaction pair for one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackPlan {
    pub style: AttackStyle,
    pub n: u32,
    /// Cloned identities; the first is the primary attacker whose turn
    /// triggers the partition.
    pub attackers: Vec<SealerId>,
    /// Endpoint ids per group: `[attacker group, victim group]`.
    pub groups: [Vec<usize>; 2],
    pub endpoints: Vec<NodeEndpoint>,
    pub clones: Vec<CloneBinding>,
    /// Chain index (Aura steps sealed / Clique blocks) before the trigger arms.
    pub warmup_index: u64,
    pub end: PlannedEnd,
    pub txs: ConflictingTxPair,
    pub clique_division: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlannedEnd {
    /// Fixed window: `partition_steps` Aura steps or a Clique duration.
    AfterMs(u64),
    /// Blind attack: heal once the attacker branch gained this weight.
    WeightGain { target: u64, cap_ms: u64 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error(
        "n = {n} is even: one attacker cannot give both groups a majority, \
         two cloned attackers are required"
    )]
    EvenNeedsTwoAttackers { n: u32 },
    #[error("consecutive division k = {k} outside [2, {max}]")]
    BadDivision { k: u32, max: u64 },
    #[error("partition must last at least one step")]
    EmptyPartition,
    #[error("n = {n} too small for a cloning attack")]
    TooSmall { n: u32 },
    #[error("attacker ids must be distinct sealers below n")]
    BadAttackers,
}

/// Per-run record of the attack outcome. `double_spend` is exactly the
/// conjunction of the three recorded condition flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub tx1_committed_in_partition: bool,
    pub tx2_committed_in_partition: bool,
    pub attacker_branch_adopted: bool,
    pub tx1_in_final_chain: bool,
    pub double_spend: bool,
    pub victim_blocks: u64,
    pub attacker_blocks: u64,
    pub victim_weight_gain: u64,
    pub attacker_weight_gain: u64,
    pub final_head: BlockId,
    pub converged: bool,
    pub window_start_ms: u64,
    pub window_end_ms: u64,
}

/// Everything besides the plan needed to materialize a runnable scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackParams {
    pub step_duration_ms: u64,
    pub block_period_ms: u64,
    pub delay: DelayModel,
    pub tail_ms: u64,
    pub scripted: ScriptedTiming,
}

impl AttackParams {
    pub fn aura(step_duration_ms: u64) -> AttackParams {
        AttackParams {
            step_duration_ms,
            block_period_ms: 5000,
            delay: DelayModel::default(),
            tail_ms: 6 * step_duration_ms,
            scripted: ScriptedTiming::default(),
        }
    }

    pub fn clique(block_period_ms: u64) -> AttackParams {
        AttackParams {
            step_duration_ms: 3000,
            block_period_ms,
            delay: DelayModel::default(),
            tail_ms: 4 * block_period_ms,
            scripted: ScriptedTiming::default(),
        }
    }
}

fn split_honest(
    n: u32,
    attackers: &[SealerId],
    placement_seed: u64,
) -> (Vec<u32>, Vec<u32>) {
    let mut honest: Vec<u32> = (0..n).filter(|i| !attackers.iter().any(|a| a.0 == *i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(placement_seed);
    honest.shuffle(&mut rng);
    // the attacker group takes the larger half when the honest count is odd
    let attacker_share = honest.len().div_ceil(2);
    let attacker_side = honest[..attacker_share].to_vec();
    let victim_side = honest[attacker_share..].to_vec();
    (attacker_side, victim_side)
}

fn assemble(
    style: AttackStyle,
    n: u32,
    attackers: Vec<SealerId>,
    attacker_honest: Vec<u32>,
    victim_honest: Vec<u32>,
    warmup_index: u64,
    end: PlannedEnd,
    clique_division: Option<u32>,
) -> AttackPlan {
    let (endpoints, clones) = sim::endpoints_with_clones(n, &attackers);
    let mut attacker_group: Vec<usize> = attackers.iter().map(|a| a.0 as usize).collect();
    attacker_group.extend(attacker_honest.iter().map(|&i| i as usize));
    let mut victim_group: Vec<usize> = (0..attackers.len()).map(|k| n as usize + k).collect();
    victim_group.extend(victim_honest.iter().map(|&i| i as usize));
    attacker_group.sort_unstable();
    victim_group.sort_unstable();
    AttackPlan {
        style,
        n,
        attackers,
        groups: [attacker_group, victim_group],
        endpoints,
        clones,
        warmup_index,
        end,
        txs: ConflictingTxPair::standard(),
        clique_division,
    }
}

fn check_attackers(n: u32, attackers: &[SealerId]) -> Result<(), PlanError> {
    if n < 3 {
        return Err(PlanError::TooSmall { n });
    }
    let mut seen = std::collections::BTreeSet::new();
    for a in attackers {
        if a.0 >= n || !seen.insert(a.0) {
            return Err(PlanError::BadAttackers);
        }
    }
    if attackers.is_empty() {
        return Err(PlanError::BadAttackers);
    }
    Ok(())
}

/// Plans the Aura attack: random balanced split of the honest sealers, one
/// clone per group, partition opening at the attacker's turn and lasting
/// `partition_steps` steps. The attacker seals every own turn on its side
/// and exactly once on the victim side.
pub fn plan_aura_attack(
    n: u32,
    step_duration_ms: u64,
    partition_steps: u64,
    placement_seed: u64,
) -> Result<AttackPlan, PlanError> {
    plan_aura_attack_with(
        n,
        step_duration_ms,
        partition_steps,
        &[SealerId(1)],
        placement_seed,
    )
}

/// Multi-attacker variant: every listed identity is cloned into both
/// groups. Even `n` requires two attackers to give both groups a majority.
pub fn plan_aura_attack_with(
    n: u32,
    step_duration_ms: u64,
    partition_steps: u64,
    attackers: &[SealerId],
    placement_seed: u64,
) -> Result<AttackPlan, PlanError> {
    check_attackers(n, attackers)?;
    if partition_steps == 0 {
        return Err(PlanError::EmptyPartition);
    }
    if n % 2 == 0 && attackers.len() < 2 {
        return Err(PlanError::EvenNeedsTwoAttackers { n });
    }
    let (attacker_honest, victim_honest) = split_honest(n, attackers, placement_seed);
    Ok(assemble(
        AttackStyle::Aura,
        n,
        attackers.to_vec(),
        attacker_honest,
        victim_honest,
        u64::from(n),
        PlannedEnd::AfterMs(partition_steps * step_duration_ms),
        None,
    ))
}

/// The four canonical 9-sealer divisions, keyed by the number of
/// consecutive next-in-order sealers placed attacker-side. Sealer ids are
/// 0-based (`number mod 9`), the attacker is sealer 1.
fn canonical_division_9(k: u32) -> Option<(Vec<u32>, Vec<u32>)> {
    let (attacker, victim) = match k {
        5 => (vec![2, 3, 4, 5], vec![6, 7, 8, 0]),
        4 => (vec![2, 3, 4, 6], vec![5, 7, 8, 0]),
        3 => (vec![2, 3, 6, 7], vec![4, 5, 8, 0]),
        2 => (vec![2, 4, 6, 8], vec![3, 5, 7, 0]),
        _ => return None,
    };
    Some((attacker, victim))
}

/// Plans the order-aware Clique attack: the partition opens right before
/// the attacker's in-order turn and the attacker group contains the next
/// `k` consecutive in-order sealers (the attacker included).
pub fn plan_clique_attack(
    n: u32,
    consecutive_k: u32,
    duration_ms: u64,
    placement_seed: u64,
) -> Result<AttackPlan, PlanError> {
    let attacker = SealerId(1);
    check_attackers(n, &[attacker])?;
    if n % 2 == 0 {
        return Err(PlanError::EvenNeedsTwoAttackers { n });
    }
    let max = clique_majority(n);
    if consecutive_k < 2 || u64::from(consecutive_k) > max {
        return Err(PlanError::BadDivision {
            k: consecutive_k,
            max,
        });
    }
    if duration_ms == 0 {
        return Err(PlanError::EmptyPartition);
    }
    let (attacker_honest, victim_honest) = if n == 9 {
        canonical_division_9(consecutive_k).expect("k validated above")
    } else {
        // generalized split: the k-1 successors of the attacker go to the
        // attacker group, the remainder alternate starting victim-side
        let per_side = (n as usize - 1) / 2;
        let successors: Vec<u32> = (1..n).map(|j| (1 + j) % n).collect();
        let run: Vec<u32> = successors[..(consecutive_k as usize - 1)].to_vec();
        let rest = &successors[(consecutive_k as usize - 1)..];
        let mut attacker_honest = run;
        let mut victim_honest = Vec::new();
        for (i, &id) in rest.iter().enumerate() {
            if i % 2 == 1 && attacker_honest.len() < per_side {
                attacker_honest.push(id);
            } else {
                victim_honest.push(id);
            }
        }
        while attacker_honest.len() < per_side {
            attacker_honest.push(victim_honest.pop().expect("enough honest sealers"));
        }
        (attacker_honest, victim_honest)
    };
    let _ = placement_seed; // canonical divisions are fixed by k
    Ok(assemble(
        AttackStyle::CliqueOrderAware,
        n,
        vec![attacker],
        attacker_honest,
        victim_honest,
        u64::from(n),
        PlannedEnd::AfterMs(duration_ms),
        Some(consecutive_k),
    ))
}

/// Plans the topology-blind Clique attack: random balanced split, one
/// attacker seal on the victim side capping that branch's gain at
/// `2 * sealer_limit`, and a partition held until the attacker branch
/// gained `2 * sealer_limit + 1`.
pub fn plan_clique_blind_attack(
    n: u32,
    block_period_ms: u64,
    placement_seed: u64,
) -> Result<AttackPlan, PlanError> {
    let attacker = SealerId(1);
    check_attackers(n, &[attacker])?;
    if n % 2 == 0 {
        return Err(PlanError::EvenNeedsTwoAttackers { n });
    }
    let (attacker_honest, victim_honest) = split_honest(n, &[attacker], placement_seed);
    Ok(plan_clique_blind_with(
        n,
        block_period_ms,
        attacker_honest,
        victim_honest,
    ))
}

/// Blind plan with explicit honest placement, used to pin best and worst
/// case sealer orders.
pub fn plan_clique_blind_with(
    n: u32,
    block_period_ms: u64,
    attacker_honest: Vec<u32>,
    victim_honest: Vec<u32>,
) -> AttackPlan {
    let target = 2 * clique_majority(n) + 1;
    // worst case needs roughly 2*target blocks of period each; triple it
    let cap_ms = 3 * target * block_period_ms;
    assemble(
        AttackStyle::CliqueBlind,
        n,
        vec![SealerId(1)],
        attacker_honest,
        victim_honest,
        u64::from(n),
        PlannedEnd::WeightGain { target, cap_ms },
        None,
    )
}

/// Materializes the plan into a runnable scenario.
pub fn attack_scenario(plan: &AttackPlan, params: &AttackParams) -> Scenario {
    let protocol = match plan.style {
        AttackStyle::Aura => Protocol::Aura,
        AttackStyle::CliqueOrderAware | AttackStyle::CliqueBlind => Protocol::Clique,
    };
    let primary = plan.attackers[0];
    let watch_endpoint = primary.0 as usize;
    let n = u64::from(plan.n);

    let mut policies = vec![SealPolicy::honest(); plan.endpoints.len()];
    for (k, attacker) in plan.attackers.iter().enumerate() {
        let primary_endpoint = attacker.0 as usize;
        let secondary_endpoint = plan.n as usize + k;
        let (primary_budget, zero_oo) = match plan.style {
            AttackStyle::Aura => (None, false),
            AttackStyle::CliqueOrderAware => (Some(1), false),
            AttackStyle::CliqueBlind => (None, true),
        };
        policies[primary_endpoint] = SealPolicy {
            seal_pre_window: true,
            window_budget: primary_budget,
            seal_post_window: false,
            zero_oo_delay: zero_oo,
        };
        policies[secondary_endpoint] = SealPolicy {
            seal_pre_window: false,
            window_budget: Some(1),
            seal_post_window: false,
            zero_oo_delay: zero_oo,
        };
    }

    let start = StartRule::AttackerTurn {
        watch_endpoint,
        attacker: primary,
        warmup_index: plan.warmup_index,
    };
    let end = match plan.end {
        PlannedEnd::AfterMs(d) => EndRule::AfterMs(d),
        PlannedEnd::WeightGain { target, cap_ms } => EndRule::WeightGain {
            watch_endpoint,
            target,
            cap_ms,
        },
    };

    // generous horizon: warmup, trigger alignment, window, then the tail
    let expected_start = match protocol {
        Protocol::Aura => (plan.warmup_index + n) * params.step_duration_ms,
        Protocol::Clique => (plan.warmup_index + n + 1) * params.block_period_ms,
    };
    let window_ms = match plan.end {
        PlannedEnd::AfterMs(d) => d,
        PlannedEnd::WeightGain { cap_ms, .. } => cap_ms,
    };
    let horizon_ms = expected_start + window_ms + params.tail_ms;

    let secondary_of_primary = plan.n as usize;
    let injections = vec![
        TxInjection {
            tx: plan.txs.tx1,
            to_endpoint: secondary_of_primary,
            at: InjectAt::WindowStart,
        },
        TxInjection {
            tx: plan.txs.tx2,
            to_endpoint: watch_endpoint,
            at: InjectAt::WindowStart,
        },
    ];

    Scenario {
        protocol,
        n: plan.n,
        step_duration_ms: params.step_duration_ms,
        block_period_ms: params.block_period_ms,
        delay: params.delay,
        endpoints: plan.endpoints.clone(),
        policies,
        clones: plan.clones.clone(),
        window: Some(PartitionWindow {
            start,
            end,
            groups: plan.groups.clone(),
        }),
        injections,
        scripted: params.scripted.clone(),
        horizon_ms,
    }
}

fn protocol_best<'v>(
    protocol: Protocol,
    views: impl Iterator<Item = &'v ChainView>,
) -> Option<&'v ChainView> {
    match protocol {
        Protocol::Aura => views.max_by_key(|v| crate::chain::aura_score(v)),
        // between equal-weight branches the taller one carries the group's
        // full block production, which is what branch statistics report
        Protocol::Clique => views.max_by_key(|v| (clique_total_weight(v), v.height())),
    }
}

fn partition_blocks(view: &ChainView, start_ms: u64) -> Vec<BlockId> {
    view.canonical_branch()
        .map(|branch| {
            branch
                .iter()
                .filter(|b| b.parent.is_some() && b.timestamp_ms >= start_ms)
                .map(|b| b.id)
                .collect()
        })
        .unwrap_or_default()
}

fn partition_weight(view: &ChainView, start_ms: u64) -> u64 {
    view.canonical_branch()
        .map(|branch| {
            branch
                .iter()
                .filter(|b| b.parent.is_some() && b.timestamp_ms >= start_ms)
                .map(|b| b.slot.weight().unwrap_or(0))
                .sum()
        })
        .unwrap_or(0)
}

fn committed_in_views(
    views: &[(usize, ChainView)],
    tx: &Transaction,
    rule: DecisionRule,
    n: u32,
) -> bool {
    views.iter().any(|(_, view)| {
        view.tx_block(tx)
            .map(|b| is_decided(view, b, rule, n).unwrap_or(false))
            .unwrap_or(false)
    })
}

/// Evaluates exactly the three success conditions over a finished run:
/// victim-side commit before the heal, attacker partition blocks canonical
/// on every honest endpoint afterwards, and the victim-side transaction
/// absent from the final chain.
pub fn evaluate_double_spend(
    report: &SimReport,
    plan: &AttackPlan,
    rule: DecisionRule,
    protocol: Protocol,
) -> RunOutcome {
    let honest_endpoints: Vec<usize> = plan
        .endpoints
        .iter()
        .filter(|ep| {
            ep.sealer
                .map(|s| !plan.attackers.contains(&s))
                .unwrap_or(true)
        })
        .map(|ep| ep.endpoint_id)
        .collect();

    let final_views: Vec<&ChainView> = honest_endpoints
        .iter()
        .map(|&e| &report.final_views[e])
        .collect();
    let converged = final_views
        .windows(2)
        .all(|w| w[0].head_id() == w[1].head_id());
    let final_best =
        protocol_best(protocol, final_views.iter().copied()).expect("at least one honest endpoint");

    let Some(window) = &report.window else {
        return RunOutcome {
            tx1_committed_in_partition: false,
            tx2_committed_in_partition: false,
            attacker_branch_adopted: false,
            tx1_in_final_chain: final_views.iter().any(|v| v.contains_tx(&plan.txs.tx1)),
            double_spend: false,
            victim_blocks: 0,
            attacker_blocks: 0,
            victim_weight_gain: 0,
            attacker_weight_gain: 0,
            final_head: final_best.head_id(),
            converged,
            window_start_ms: 0,
            window_end_ms: 0,
        };
    };

    let tx1_committed = committed_in_views(&window.group_views[1], &plan.txs.tx1, rule, plan.n);
    let tx2_committed = committed_in_views(&window.group_views[0], &plan.txs.tx2, rule, plan.n);

    let attacker_best = protocol_best(protocol, window.group_views[0].iter().map(|(_, v)| v))
        .expect("attacker group is never empty");
    let victim_best = protocol_best(protocol, window.group_views[1].iter().map(|(_, v)| v))
        .expect("victim group is never empty");

    let attacker_ids = partition_blocks(attacker_best, window.start_ms);
    let victim_ids = partition_blocks(victim_best, window.start_ms);

    let adopted = !honest_endpoints.is_empty()
        && honest_endpoints.iter().all(|&e| {
            let view = &report.final_views[e];
            attacker_ids.iter().all(|id| view.get(*id).is_some())
        });

    let tx1_in_final = final_views.iter().any(|v| v.contains_tx(&plan.txs.tx1));
    let double_spend = tx1_committed && adopted && !tx1_in_final;

    RunOutcome {
        tx1_committed_in_partition: tx1_committed,
        tx2_committed_in_partition: tx2_committed,
        attacker_branch_adopted: adopted,
        tx1_in_final_chain: tx1_in_final,
        double_spend,
        victim_blocks: victim_ids.len() as u64,
        attacker_blocks: attacker_ids.len() as u64,
        victim_weight_gain: partition_weight(victim_best, window.start_ms),
        attacker_weight_gain: partition_weight(attacker_best, window.start_ms),
        final_head: final_best.head_id(),
        converged,
        window_start_ms: window.start_ms,
        window_end_ms: window.end_ms,
    }
}

/// Runs one attack scenario end to end and evaluates the verdict.
pub fn run_attack(
    plan: &AttackPlan,
    params: &AttackParams,
    rule: DecisionRule,
    seed: u64,
) -> RunOutcome {
    run_attack_full(plan, params, rule, seed, false).0
}

pub fn run_attack_full(
    plan: &AttackPlan,
    params: &AttackParams,
    rule: DecisionRule,
    seed: u64,
    want_trace: bool,
) -> (RunOutcome, SimReport) {
    let scenario = attack_scenario(plan, params);
    let report = sim::run_scenario(&scenario, seed, want_trace)
        .expect("planned scenarios always validate");
    let outcome = evaluate_double_spend(&report, plan, rule, scenario.protocol);
    (outcome, report)
}

/// Convenience accessor for tests: the heal-time snapshot of a run.
pub fn window_of(report: &SimReport) -> &WindowReport {
    report.window.as_ref().expect("attack runs open a window")
}
