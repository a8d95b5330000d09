//! Temporary distribution probe (deleted before release).

use poa_sim::attack::{plan_clique_attack, run_attack, AttackParams};
use poa_sim::chain::DecisionRule;
use std::collections::BTreeMap;

#[test]
#[ignore]
fn probe_k3_weights() {
    for k in [2u32, 3] {
        let mut hist: BTreeMap<(u64, u64, u64, u64, bool, bool), u32> = BTreeMap::new();
        let runs = 200;
        for run in 0..runs {
            let plan = plan_clique_attack(9, k, 28_000, run).unwrap();
            let params = AttackParams::clique(5000);
            let out = run_attack(&plan, &params, DecisionRule::CliqueMajority, 123_000 + run);
            *hist
                .entry((
                    out.attacker_weight_gain,
                    out.victim_weight_gain,
                    out.attacker_blocks,
                    out.victim_blocks,
                    out.tx1_committed_in_partition,
                    out.double_spend,
                ))
                .or_insert(0) += 1;
        }
        println!("k={k} (wa, wv, ba, bv, committed, success) -> count");
        for (key, count) in hist {
            println!("  {key:?} -> {count}");
        }
    }
}
