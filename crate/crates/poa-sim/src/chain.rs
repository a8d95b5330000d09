//! Block and chain data model shared by both protocols, plus fork-choice
//! scoring and block-finality predicates.
//!
//! A [`ChainView`] is one node's local graph of blocks together with the head
//! it currently considers canonical. Aura views are scored by height with the
//! head step as a density tiebreaker; Clique views are compared by the total
//! weight of the canonical branch.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identity of a permissioned sealer, dense in `[0, n)`.
///
/// Two simulated node endpoints may share one `SealerId` (a clone pair);
/// equality is by index, never by endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SealerId(pub u32);

impl fmt::Display for SealerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// A coin transfer. Two transactions conflict iff they share sender and
/// nonce but differ in recipient or amount.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transaction {
    pub sender: u32,
    pub recipient: u32,
    pub amount: u64,
    pub nonce: u64,
}

impl Transaction {
    pub fn conflicts_with(&self, other: &Transaction) -> bool {
        self.sender == other.sender
            && self.nonce == other.nonce
            && (self.recipient != other.recipient || self.amount != other.amount)
    }
}

impl fmt::Display for Transaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tx({},{},{},{})",
            self.sender, self.nonce, self.recipient, self.amount
        )
    }
}

/// Content hash identifying a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlockId(pub u64);

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

/// Protocol-specific slot data: Aura blocks carry a step, Clique blocks a
/// number and a weight (2 in-order, 1 out-of-order, 0 for genesis).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    Step(u64),
    Numbered { number: u64, weight: u8 },
}

impl Slot {
    pub fn step(&self) -> Option<u64> {
        match self {
            Slot::Step(s) => Some(*s),
            Slot::Numbered { .. } => None,
        }
    }

    pub fn number(&self) -> Option<u64> {
        match self {
            Slot::Step(_) => None,
            Slot::Numbered { number, .. } => Some(*number),
        }
    }

    pub fn weight(&self) -> Option<u64> {
        match self {
            Slot::Step(_) => None,
            Slot::Numbered { weight, .. } => Some(u64::from(*weight)),
        }
    }

    /// Chain index of the block regardless of protocol.
    pub fn index(&self) -> u64 {
        match self {
            Slot::Step(s) => *s,
            Slot::Numbered { number, .. } => *number,
        }
    }
}

/// A sealed chain element. `sealer` is `None` only for genesis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub id: BlockId,
    pub parent: Option<BlockId>,
    pub sealer: Option<SealerId>,
    pub slot: Slot,
    pub timestamp_ms: u64,
    pub txs: Vec<Transaction>,
}

impl Block {
    /// Builds a block and derives its content id from all other fields.
    pub fn seal(
        parent: BlockId,
        sealer: SealerId,
        slot: Slot,
        timestamp_ms: u64,
        txs: Vec<Transaction>,
    ) -> Block {
        let mut block = Block {
            id: BlockId(0),
            parent: Some(parent),
            sealer: Some(sealer),
            slot,
            timestamp_ms,
            txs,
        };
        block.id = block.content_hash();
        block
    }

    fn genesis(slot: Slot) -> Block {
        let mut block = Block {
            id: BlockId(0),
            parent: None,
            sealer: None,
            slot,
            timestamp_ms: 0,
            txs: Vec::new(),
        };
        block.id = block.content_hash();
        block
    }

    /// 64-bit FNV-1a over the block contents. Stable across runs and
    /// platforms, which the golden-file replay tests rely on.
    fn content_hash(&self) -> BlockId {
        let mut h = Fnv1a::new();
        h.write_u64(self.parent.map_or(u64::MAX, |p| p.0));
        h.write_u64(self.sealer.map_or(u64::MAX, |s| u64::from(s.0)));
        match self.slot {
            Slot::Step(s) => {
                h.write_u64(0);
                h.write_u64(s);
                h.write_u64(0);
            }
            Slot::Numbered { number, weight } => {
                h.write_u64(1);
                h.write_u64(number);
                h.write_u64(u64::from(weight));
            }
        }
        h.write_u64(self.timestamp_ms);
        h.write_u64(self.txs.len() as u64);
        for tx in &self.txs {
            h.write_u64(u64::from(tx.sender));
            h.write_u64(u64::from(tx.recipient));
            h.write_u64(tx.amount);
            h.write_u64(tx.nonce);
        }
        BlockId(h.finish())
    }

    /// One line of the canonical structured-text dump.
    pub fn dump_line(&self) -> String {
        let parent = self
            .parent
            .map_or_else(|| "-".to_string(), |p| p.to_string());
        let sealer = self
            .sealer
            .map_or_else(|| "-".to_string(), |s| s.to_string());
        let (kind, weight) = match self.slot {
            Slot::Step(s) => (format!("step:{s}"), "-".to_string()),
            Slot::Numbered { number, weight } => (format!("num:{number}"), format!("w{weight}")),
        };
        let txs = self
            .txs
            .iter()
            .map(Transaction::to_string)
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{} {} {} {} {} t{} [{}]",
            self.id, parent, sealer, kind, weight, self.timestamp_ms, txs
        )
    }
}

struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Fnv1a {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    fn write_u64(&mut self, v: u64) {
        for byte in v.to_le_bytes() {
            self.0 ^= u64::from(byte);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Which finality predicate [`is_decided`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecisionRule {
    /// Strictly more than half the sealers signed since the block.
    AuraMajority,
    /// Two consecutive rounds of `n` steps each contain a majority of blocks.
    AuraRounds,
    /// At least `floor(n/2) + 1` distinct sealers signed since the block.
    CliqueMajority,
    /// At least `threshold` distinct sealers signed since the block.
    Threshold { threshold: u32 },
}

/// Aura fork-choice score.
///
/// Stands in for the unbounded integer `UINT128_MAX * height - head_step`:
/// since `head_step` never reaches the multiplier, ordering by
/// `(height, Reverse(head_step))` is identical. A taller chain always wins;
/// at equal height the chain whose head uses fewer slots (denser) wins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AuraScore {
    pub height: u64,
    head_step_desc: Reverse<u64>,
}

impl AuraScore {
    pub fn new(height: u64, head_step: u64) -> AuraScore {
        AuraScore {
            height,
            head_step_desc: Reverse(head_step),
        }
    }

    pub fn head_step(&self) -> u64 {
        self.head_step_desc.0
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("head {0} is not reachable from genesis")]
    UnreachableHead(BlockId),
    #[error("block {0} not found in view")]
    UnknownBlock(BlockId),
    #[error("block {0} is not on the canonical branch")]
    OffBranch(BlockId),
    #[error("block {child} does not extend head {head}")]
    NotExtendingHead { child: BlockId, head: BlockId },
    #[error("missing parent {0}")]
    MissingParent(BlockId),
}

/// A node's local set of blocks plus its selected canonical head.
///
/// The canonical branch is the head-to-genesis path. Height and branch
/// weight are cached so fork choice is O(1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainView {
    blocks: BTreeMap<BlockId, Block>,
    genesis: BlockId,
    head: BlockId,
    height: u64,
    branch_weight: u64,
}

impl ChainView {
    /// Fresh view holding only the genesis block for the given slot kind.
    pub fn new(genesis_slot: Slot) -> ChainView {
        let genesis = Block::genesis(genesis_slot);
        let id = genesis.id;
        let mut blocks = BTreeMap::new();
        blocks.insert(id, genesis);
        ChainView {
            blocks,
            genesis: id,
            head: id,
            height: 0,
            branch_weight: 0,
        }
    }

    pub fn new_aura() -> ChainView {
        ChainView::new(Slot::Step(0))
    }

    pub fn new_clique() -> ChainView {
        ChainView::new(Slot::Numbered {
            number: 0,
            weight: 0,
        })
    }

    pub fn genesis_id(&self) -> BlockId {
        self.genesis
    }

    pub fn head_id(&self) -> BlockId {
        self.head
    }

    pub fn head(&self) -> &Block {
        &self.blocks[&self.head]
    }

    pub fn get(&self, id: BlockId) -> Option<&Block> {
        self.blocks.get(&id)
    }

    /// Canonical branch length minus one.
    pub fn height(&self) -> u64 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Appends a block on top of the current head and moves the head to it.
    pub fn append(&mut self, block: Block) -> Result<(), ChainError> {
        if block.parent != Some(self.head) {
            return Err(ChainError::NotExtendingHead {
                child: block.id,
                head: self.head,
            });
        }
        self.head = block.id;
        self.height += 1;
        self.branch_weight += block.slot.weight().unwrap_or(0);
        self.blocks.insert(block.id, block);
        Ok(())
    }

    /// Replaces this view wholesale with `other` (fork-choice adoption).
    pub fn adopt(&mut self, other: &ChainView) {
        *self = other.clone();
    }

    /// Genesis-to-head path.
    pub fn canonical_branch(&self) -> Result<Vec<&Block>, ChainError> {
        let mut branch = Vec::with_capacity(self.blocks.len());
        let mut cursor = self.head;
        loop {
            let block = self
                .blocks
                .get(&cursor)
                .ok_or(ChainError::UnreachableHead(self.head))?;
            branch.push(block);
            match block.parent {
                Some(parent) => {
                    if branch.len() > self.blocks.len() {
                        return Err(ChainError::UnreachableHead(self.head));
                    }
                    cursor = parent;
                }
                None => break,
            }
        }
        if branch.last().map(|b| b.id) != Some(self.genesis) {
            return Err(ChainError::UnreachableHead(self.head));
        }
        branch.reverse();
        Ok(branch)
    }

    /// Walks head-to-`from` (inclusive) without allocating the full branch.
    fn branch_suffix(&self, from: BlockId) -> Result<Vec<&Block>, ChainError> {
        if !self.blocks.contains_key(&from) {
            return Err(ChainError::UnknownBlock(from));
        }
        let mut suffix = Vec::new();
        let mut cursor = self.head;
        loop {
            let block = self
                .blocks
                .get(&cursor)
                .ok_or(ChainError::UnreachableHead(self.head))?;
            suffix.push(block);
            if cursor == from {
                return Ok(suffix);
            }
            match block.parent {
                Some(parent) => cursor = parent,
                None => return Err(ChainError::OffBranch(from)),
            }
        }
    }

    /// Canonical structured-text dump, one block per line in branch order.
    pub fn dump(&self) -> String {
        match self.canonical_branch() {
            Ok(branch) => branch
                .iter()
                .map(|b| b.dump_line())
                .collect::<Vec<_>>()
                .join("\n"),
            Err(e) => format!("<malformed view: {e}>"),
        }
    }

    /// Whether the transaction appears anywhere on the canonical branch.
    pub fn contains_tx(&self, tx: &Transaction) -> bool {
        self.canonical_branch()
            .map(|branch| branch.iter().any(|b| b.txs.contains(tx)))
            .unwrap_or(false)
    }

    /// Block on the canonical branch carrying the transaction, if any.
    pub fn tx_block(&self, tx: &Transaction) -> Option<BlockId> {
        self.canonical_branch()
            .ok()?
            .iter()
            .find(|b| b.txs.contains(tx))
            .map(|b| b.id)
    }

    pub(crate) fn cached_branch_weight(&self) -> u64 {
        self.branch_weight
    }
}

/// Aura fork-choice score of a view: height first, then denser head step.
pub fn aura_score(view: &ChainView) -> AuraScore {
    AuraScore::new(view.height(), view.head().slot.step().unwrap_or(0))
}

/// Sum of block weights along the canonical branch (genesis weighs 0).
pub fn clique_total_weight(view: &ChainView) -> u64 {
    view.cached_branch_weight()
}

/// Sealers of `b` and all its canonical descendants.
pub fn distinct_sealers_since(
    view: &ChainView,
    b: BlockId,
) -> Result<BTreeSet<SealerId>, ChainError> {
    let suffix = view.branch_suffix(b)?;
    Ok(suffix.iter().filter_map(|block| block.sealer).collect())
}

/// Finality predicate for block `b` in `view` under `rule`, with `n` sealers.
///
/// Genesis is trivially final.
pub fn is_decided(
    view: &ChainView,
    b: BlockId,
    rule: DecisionRule,
    n: u32,
) -> Result<bool, ChainError> {
    if b == view.genesis_id() {
        // still validate that b is known
        view.branch_suffix(b)?;
        return Ok(true);
    }
    match rule {
        DecisionRule::AuraMajority => {
            let sealers = distinct_sealers_since(view, b)?;
            Ok(sealers.len() as u64 * 2 > u64::from(n))
        }
        DecisionRule::CliqueMajority => {
            let sealers = distinct_sealers_since(view, b)?;
            Ok(sealers.len() as u64 >= clique_majority(n))
        }
        DecisionRule::Threshold { threshold } => {
            let sealers = distinct_sealers_since(view, b)?;
            Ok(sealers.len() as u64 >= u64::from(threshold))
        }
        DecisionRule::AuraRounds => {
            let suffix = view.branch_suffix(b)?;
            let b_step = suffix
                .last()
                .and_then(|block| block.slot.step())
                .ok_or(ChainError::OffBranch(b))?;
            let len = u64::from(n);
            let mut round1 = 0u64;
            let mut round2 = 0u64;
            for block in &suffix {
                if let Some(step) = block.slot.step() {
                    if step > b_step && step <= b_step + len {
                        round1 += 1;
                    } else if step > b_step + len && step <= b_step + 2 * len {
                        round2 += 1;
                    }
                }
            }
            Ok(round1 * 2 > len && round2 * 2 > len)
        }
    }
}

/// `floor(n/2) + 1`, the smallest majority of `n` sealers.
pub fn clique_majority(n: u32) -> u64 {
    u64::from(n) / 2 + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aura_chain(steps_and_sealers: &[(u64, u32)]) -> ChainView {
        let mut view = ChainView::new_aura();
        for &(step, sealer) in steps_and_sealers {
            let block = Block::seal(
                view.head_id(),
                SealerId(sealer),
                Slot::Step(step),
                step * 1000,
                vec![],
            );
            view.append(block).unwrap();
        }
        view
    }

    fn clique_chain(blocks: &[(u64, u32, u8)]) -> ChainView {
        let mut view = ChainView::new_clique();
        for &(number, sealer, weight) in blocks {
            let block = Block::seal(
                view.head_id(),
                SealerId(sealer),
                Slot::Numbered { number, weight },
                number * 5000,
                vec![],
            );
            view.append(block).unwrap();
        }
        view
    }

    #[test]
    fn genesis_only_branch() {
        let view = ChainView::new_aura();
        let branch = view.canonical_branch().unwrap();
        assert_eq!(branch.len(), 1);
        assert_eq!(branch[0].id, view.genesis_id());
        assert_eq!(branch[0].parent, None);
        assert_eq!(branch[0].slot.index(), 0);
    }

    #[test]
    fn branch_follows_insertion_order() {
        let view = aura_chain(&[(1, 1), (2, 1), (3, 1)]);
        let branch = view.canonical_branch().unwrap();
        assert_eq!(branch.len(), 4);
        let steps: Vec<u64> = branch.iter().filter_map(|b| b.slot.step()).collect();
        assert_eq!(steps, vec![0, 1, 2, 3]);
        assert_eq!(view.height(), 3);
    }

    #[test]
    fn genesis_score_is_zero() {
        let view = ChainView::new_aura();
        assert_eq!(aura_score(&view), AuraScore::new(0, 0));
    }

    #[test]
    fn denser_chain_outscores_sparser_at_equal_height() {
        let dense = aura_chain(&[(1, 1), (3, 3), (5, 5), (7, 7), (8, 8), (9, 0), (10, 1)]);
        let mut sparse_steps = vec![(1, 1), (3, 3), (5, 5), (7, 7), (8, 8), (9, 0)];
        sparse_steps.push((12, 3));
        let sparse = aura_chain(&sparse_steps);
        assert_eq!(dense.height(), sparse.height());
        assert!(aura_score(&dense) > aura_score(&sparse));
    }

    #[test]
    fn taller_chain_wins_regardless_of_steps() {
        let tall: Vec<(u64, u32)> = (1..=11).map(|s| (s + 19, (s % 9) as u32)).collect();
        let tall = aura_chain(&tall); // height 11, head step 30
        let short: Vec<(u64, u32)> = (1..=10).map(|s| (s, (s % 9) as u32)).collect();
        let short = aura_chain(&short); // height 10, head step 10
        assert_eq!(tall.head().slot.step(), Some(30));
        assert_eq!(short.head().slot.step(), Some(10));
        assert!(aura_score(&tall) > aura_score(&short));
    }

    #[test]
    fn clique_weight_sums_branch() {
        let view = ChainView::new_clique();
        assert_eq!(clique_total_weight(&view), 0);

        // the two partition segments worked through for the in-order attack:
        // 3 in-order + 2 out-of-order gains 8, 1 in-order + 4 out-of-order gains 6
        let left = clique_chain(&[(1, 1, 2), (2, 3, 1), (3, 2, 1), (4, 4, 2), (5, 5, 2)]);
        assert_eq!(clique_total_weight(&left), 8);
        let right = clique_chain(&[(1, 1, 2), (2, 6, 1), (3, 7, 1), (4, 8, 1), (5, 0, 1)]);
        assert_eq!(clique_total_weight(&right), 6);
    }

    #[test]
    fn weight_is_additive_in_tip() {
        let mut view = ChainView::new_clique();
        for number in 1..=6u64 {
            let before = clique_total_weight(&view);
            let weight = if number % 2 == 0 { 1 } else { 2 };
            let block = Block::seal(
                view.head_id(),
                SealerId((number % 9) as u32),
                Slot::Numbered { number, weight },
                number * 5000,
                vec![],
            );
            view.append(block).unwrap();
            assert_eq!(clique_total_weight(&view), before + u64::from(weight));
        }
    }

    #[test]
    fn sealers_since_head_is_singleton() {
        let view = aura_chain(&[(1, 1), (2, 2), (3, 3)]);
        let sealers = distinct_sealers_since(&view, view.head_id()).unwrap();
        assert_eq!(sealers.len(), 1);
        assert!(sealers.contains(&SealerId(3)));
    }

    #[test]
    fn sealers_since_counts_duplicates_once() {
        // sealer 2 sealed twice since b: 4 blocks since b, 3 distinct sealers
        let view = aura_chain(&[(1, 1), (2, 2), (3, 3), (11, 2), (13, 4)]);
        let b = view.canonical_branch().unwrap()[1].id;
        let sealers = distinct_sealers_since(&view, b).unwrap();
        assert_eq!(sealers.len(), 5 - 1);
    }

    #[test]
    fn sealers_since_off_branch_errors() {
        let view = aura_chain(&[(1, 1)]);
        let stray = Block::seal(BlockId(42), SealerId(0), Slot::Step(9), 9000, vec![]);
        assert_eq!(
            distinct_sealers_since(&view, stray.id),
            Err(ChainError::UnknownBlock(stray.id))
        );
    }

    #[test]
    fn aura_majority_needs_strictly_more_than_half() {
        // 5 distinct sealers since b with n=9: 10 > 9
        let view = aura_chain(&[(1, 1), (2, 2), (3, 3), (4, 4), (5, 5)]);
        let b = view.canonical_branch().unwrap()[1].id;
        assert!(is_decided(&view, b, DecisionRule::AuraMajority, 9).unwrap());
        // 4 distinct: 8 > 9 fails
        let b4 = view.canonical_branch().unwrap()[2].id;
        assert!(!is_decided(&view, b4, DecisionRule::AuraMajority, 9).unwrap());
    }

    #[test]
    fn clique_majority_decides_at_floor_half_plus_one() {
        let view = clique_chain(&[(1, 1, 2), (2, 2, 2), (3, 3, 2), (4, 4, 2), (5, 5, 2)]);
        let b = view.canonical_branch().unwrap()[1].id;
        assert!(is_decided(&view, b, DecisionRule::CliqueMajority, 9).unwrap());
        let b4 = view.canonical_branch().unwrap()[2].id;
        assert!(!is_decided(&view, b4, DecisionRule::CliqueMajority, 9).unwrap());
    }

    #[test]
    fn threshold_unreachable_in_small_partition() {
        // only 5 distinct sealers ever available: V=7 never satisfied
        let view = aura_chain(&[(1, 1), (2, 2), (3, 3), (4, 4), (5, 5), (10, 1), (11, 2)]);
        let b = view.canonical_branch().unwrap()[1].id;
        assert!(!is_decided(&view, b, DecisionRule::Threshold { threshold: 7 }, 9).unwrap());
        assert!(is_decided(&view, b, DecisionRule::Threshold { threshold: 5 }, 9).unwrap());
    }

    #[test]
    fn aura_rounds_needs_majority_in_both_windows() {
        // b at step 10, n=9: rounds (10,19] and (19,28]
        let mut blocks = vec![(10, 1)];
        for s in 11..=19u64 {
            blocks.push((s, (s % 9) as u32));
        }
        for s in 20..=28u64 {
            blocks.push((s, (s % 9) as u32));
        }
        let view = aura_chain(&blocks);
        let b = view.canonical_branch().unwrap()[1].id;
        assert!(is_decided(&view, b, DecisionRule::AuraRounds, 9).unwrap());

        // only 4 blocks in the second round: 8 > 9 fails
        let mut sparse = vec![(10, 1)];
        for s in 11..=19u64 {
            sparse.push((s, (s % 9) as u32));
        }
        for s in 20..=23u64 {
            sparse.push((s, (s % 9) as u32));
        }
        let view = aura_chain(&sparse);
        let b = view.canonical_branch().unwrap()[1].id;
        assert!(!is_decided(&view, b, DecisionRule::AuraRounds, 9).unwrap());
    }

    #[test]
    fn genesis_is_trivially_final() {
        let view = ChainView::new_clique();
        for rule in [
            DecisionRule::AuraMajority,
            DecisionRule::CliqueMajority,
            DecisionRule::Threshold { threshold: 9 },
        ] {
            assert!(is_decided(&view, view.genesis_id(), rule, 9).unwrap());
        }
    }

    #[test]
    fn dump_is_stable_and_line_per_block() {
        let view = clique_chain(&[(1, 1, 2), (2, 6, 1)]);
        let dump = view.dump();
        assert_eq!(dump.lines().count(), 3);
        assert_eq!(dump, view.clone().dump());
        assert!(dump.lines().nth(1).unwrap().contains("num:1"));
        assert!(dump.lines().nth(1).unwrap().contains("w2"));
    }

    #[test]
    fn conflicting_transactions() {
        let tx1 = Transaction {
            sender: 0,
            recipient: 1,
            amount: 100,
            nonce: 0,
        };
        let tx2 = Transaction {
            sender: 0,
            recipient: 2,
            amount: 100,
            nonce: 0,
        };
        let tx3 = Transaction {
            sender: 0,
            recipient: 1,
            amount: 100,
            nonce: 1,
        };
        assert!(tx1.conflicts_with(&tx2));
        assert!(!tx1.conflicts_with(&tx3));
        assert!(!tx1.conflicts_with(&tx1));
    }
}
