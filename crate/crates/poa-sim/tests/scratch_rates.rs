//! Temporary probe of sweep-point rates (deleted before release).

use poa_sim::attack::{
    plan_aura_attack, plan_clique_attack, run_attack, AttackParams,
};
use poa_sim::chain::DecisionRule;

#[test]
#[ignore]
fn probe_aura_steps() {
    for steps in [8u64, 9, 10, 11, 12] {
        let mut wins = 0;
        let mut committed = 0;
        let mut diffs = std::collections::BTreeMap::new();
        let runs = 200;
        for run in 0..runs {
            let plan = plan_aura_attack(9, 3000, steps, 1_000 + run).unwrap();
            let params = AttackParams::aura(3000);
            let out = run_attack(&plan, &params, DecisionRule::AuraMajority, 50_000 + run);
            if out.double_spend {
                wins += 1;
                *diffs
                    .entry(out.attacker_blocks as i64 - out.victim_blocks as i64)
                    .or_insert(0) += 1;
            }
            if out.tx1_committed_in_partition {
                committed += 1;
            }
        }
        println!(
            "aura steps={steps}: success {}/{runs}, committed {committed}, win diffs {diffs:?}",
            wins
        );
    }
}

#[test]
#[ignore]
fn probe_clique_durations() {
    for k in [2u32, 3, 4, 5] {
        for duration in [24_800u64, 26_000, 27_000, 28_000] {
            let mut wins = 0;
            let mut committed = 0;
            let mut blocks = 0u64;
            let mut wa = 0u64;
            let mut wv = 0u64;
            let runs = 100;
            for run in 0..runs {
                let plan = plan_clique_attack(9, k, duration, run).unwrap();
                let params = AttackParams::clique(5000);
                let out = run_attack(&plan, &params, DecisionRule::CliqueMajority, 90_000 + run);
                if out.double_spend {
                    wins += 1;
                }
                if out.tx1_committed_in_partition {
                    committed += 1;
                }
                blocks += out.victim_blocks;
                wa += out.attacker_weight_gain;
                wv += out.victim_weight_gain;
            }
            println!(
                "clique k={k} d={duration}: success {wins}/{runs} committed {committed} mean_vic_blocks {:.2} mean_wa {:.1} mean_wv {:.1}",
                blocks as f64 / runs as f64,
                wa as f64 / runs as f64,
                wv as f64 / runs as f64,
            );
        }
    }
}
