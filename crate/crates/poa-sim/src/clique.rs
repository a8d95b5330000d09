//! Per-sealer Clique state machine: sign-recently gating, in-order and
//! out-of-order sealing with weights, and weight-based view adoption.
//!
//! The sealer whose index equals `number mod n` seals in-order with weight 2
//! and no extra delay; everyone else may seal the same number out-of-order
//! with weight 1 after a random delay in `[0, 500 * majority]` ms. A sealer
//! must let `sealer_limit - 1` blocks pass between two of its own seals.
//!
//! Block timestamps are the scheduled earliest times
//! (`max(clock, parent_timestamp + block_period)`), not the actual seal
//! instants, so out-of-order delays do not push later blocks back. This is
//! how geth stamps headers and the partition-duration behavior depends on it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{clique_majority, clique_total_weight, Block, ChainView, SealerId, Slot, Transaction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueConfig {
    pub n: u32,
    pub block_period_ms: u64,
    /// λ: window of consecutive blocks within which a sealer signs at most once.
    pub sealer_limit: u64,
    pub majority: u64,
}

impl CliqueConfig {
    pub fn new(n: u32, block_period_ms: u64) -> CliqueConfig {
        let majority = clique_majority(n);
        CliqueConfig {
            n,
            block_period_ms,
            sealer_limit: majority,
            majority,
        }
    }
}

/// A scheduled seal for the next block number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PendingSeal {
    pub target_number: u64,
    pub fire_ms: u64,
    pub weight: u8,
    /// Timestamp the block will carry: `max(clock at scheduling, parent + period)`.
    pub nominal_ts_ms: u64,
}

#[derive(Clone, Debug)]
pub struct CliqueSealerState {
    pub id: SealerId,
    pub view: ChainView,
    pub config: CliqueConfig,
    pub pending_seal: Option<PendingSeal>,
}

impl CliqueSealerState {
    pub fn new(id: SealerId, config: CliqueConfig) -> CliqueSealerState {
        CliqueSealerState {
            id,
            view: ChainView::new_clique(),
            config,
            pending_seal: None,
        }
    }
}

/// Scripted timing used by replay scenarios and attacker policies; the
/// default draws the out-of-order delay uniformly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SealTiming {
    /// Extra lag before an in-order seal fires (a deliberately slow sealer).
    pub in_order_lag_ms: u64,
    /// Fixed out-of-order delay overriding the random draw.
    pub oo_delay_ms: Option<u64>,
}

/// Whether `id` sealed any of the last `limit - 1` canonical blocks, i.e.
/// whether it must keep waiting before sealing `head.number + 1`.
pub fn signed_recently(view: &ChainView, id: SealerId, limit: u64) -> bool {
    let candidate = view.head().slot.index() + 1;
    let lower = candidate.saturating_sub(limit - 1).max(1);
    let mut block = view.head();
    loop {
        let number = block.slot.index();
        if number < lower {
            return false;
        }
        if block.sealer == Some(id) {
            return true;
        }
        match block.parent.and_then(|p| view.get(p)) {
            Some(parent) => block = parent,
            None => return false,
        }
    }
}

/// Whether `next_number mod n` selects this sealer for in-order sealing.
pub fn in_order(next_number: u64, id: SealerId, n: u32) -> bool {
    next_number % u64::from(n) == u64::from(id.0)
}

/// Upper bound of the out-of-order random delay: `500 * majority` ms.
pub fn oo_delay_bound_ms(config: &CliqueConfig) -> u64 {
    500 * config.majority
}

/// Schedules the next seal, or returns `None` while the sealer-limit gate
/// holds. In-order seals fire at `max(clock, parent_ts + period)` with
/// weight 2; out-of-order seals add a uniformly drawn delay and weigh 1.
pub fn schedule_seal<R: Rng>(
    state: &CliqueSealerState,
    clock_ms: u64,
    rng: &mut R,
    timing: SealTiming,
) -> Option<PendingSeal> {
    if signed_recently(&state.view, state.id, state.config.sealer_limit) {
        return None;
    }
    let head = state.view.head();
    let target_number = head.slot.index() + 1;
    let earliest_ms = clock_ms.max(head.timestamp_ms + state.config.block_period_ms);
    if in_order(target_number, state.id, state.config.n) {
        Some(PendingSeal {
            target_number,
            fire_ms: earliest_ms + timing.in_order_lag_ms,
            weight: 2,
            nominal_ts_ms: earliest_ms,
        })
    } else {
        let delay = timing
            .oo_delay_ms
            .unwrap_or_else(|| rng.gen_range(0..=oo_delay_bound_ms(&state.config)));
        Some(PendingSeal {
            target_number,
            fire_ms: earliest_ms + delay,
            weight: 1,
            nominal_ts_ms: earliest_ms,
        })
    }
}

/// Emits the pending block if its slot is still open, extending the local
/// view; a competing block that arrived first cancels the seal. Either way
/// the pending seal is consumed.
pub fn fire_seal(
    state: &mut CliqueSealerState,
    clock_ms: u64,
    pending_txs: &[Transaction],
) -> Option<Block> {
    let pending = state.pending_seal.take()?;
    debug_assert!(clock_ms >= pending.fire_ms);
    if state.view.head().slot.index() + 1 != pending.target_number {
        return None;
    }
    let txs = crate::aura::filter_valid_txs(&state.view, pending_txs);
    let block = Block::seal(
        state.view.head_id(),
        state.id,
        Slot::Numbered {
            number: pending.target_number,
            weight: pending.weight,
        },
        pending.nominal_ts_ms,
        txs,
    );
    state
        .view
        .append(block.clone())
        .expect("own seal extends own head");
    Some(block)
}

/// Adopts `incoming` iff it is strictly heavier; equal weights keep the
/// local view. A pending seal whose slot is occupied in the adopted view is
/// cancelled.
pub fn on_deliver_clique(state: &mut CliqueSealerState, incoming: &ChainView) -> bool {
    if clique_total_weight(incoming) > clique_total_weight(&state.view) {
        state.view.adopt(incoming);
        if let Some(pending) = state.pending_seal {
            if state.view.head().slot.index() + 1 != pending.target_number {
                state.pending_seal = None;
            }
        }
        true
    } else {
        false
    }
}

/// Validation gate for delivered views: linear numbering, weights matching
/// in-order-ness, sealer-limit spacing, and block-period timestamps.
pub fn validate_clique_view(view: &ChainView, config: &CliqueConfig) -> bool {
    let branch = match view.canonical_branch() {
        Ok(branch) => branch,
        Err(_) => return false,
    };
    let mut recent: Vec<(u64, SealerId)> = Vec::new();
    let mut prev: Option<&Block> = None;
    for block in branch {
        let (number, weight) = match block.slot {
            Slot::Numbered { number, weight } => (number, weight),
            Slot::Step(_) => return false,
        };
        match block.sealer {
            None => {
                if block.parent.is_some() || number != 0 || weight != 0 {
                    return false;
                }
            }
            Some(sealer) => {
                if sealer.0 >= config.n {
                    return false;
                }
                let prev_block = match prev {
                    Some(p) => p,
                    None => return false,
                };
                if number != prev_block.slot.index() + 1 {
                    return false;
                }
                if block.timestamp_ms < prev_block.timestamp_ms + config.block_period_ms {
                    return false;
                }
                let expected = if in_order(number, sealer, config.n) { 2 } else { 1 };
                if weight != expected {
                    return false;
                }
                let lower = number.saturating_sub(config.sealer_limit - 1);
                if recent
                    .iter()
                    .any(|&(m, s)| s == sealer && m >= lower && m < number)
                {
                    return false;
                }
                recent.push((number, sealer));
                if recent.len() as u64 > config.sealer_limit {
                    recent.remove(0);
                }
            }
        }
        prev = Some(block);
    }
    true
}
