//! Temporary probe of countermeasure and boundary behavior (deleted before release).

use poa_sim::attack::{
    plan_aura_attack_with, plan_clique_blind_with, run_attack, AttackParams,
};
use poa_sim::chain::{DecisionRule, SealerId};

#[test]
#[ignore]
fn probe_threshold_boundaries() {
    // six boundary points: t in {1,2} x V in {5,6,7}
    for (t, attackers) in [
        (1u32, vec![SealerId(1)]),
        (2u32, vec![SealerId(1), SealerId(5)]),
    ] {
        for v in [5u32, 6, 7] {
            let mut spends = 0;
            let mut commits = 0;
            let runs = 50;
            for run in 0..runs {
                let plan = plan_aura_attack_with(9, 3000, 10, &attackers, run).unwrap();
                let params = AttackParams::aura(3000);
                let out = run_attack(
                    &plan,
                    &params,
                    DecisionRule::Threshold { threshold: v },
                    4_000 + run,
                );
                if out.double_spend {
                    spends += 1;
                }
                if out.tx1_committed_in_partition || out.tx2_committed_in_partition {
                    commits += 1;
                }
            }
            println!("t={t} V={v}: double_spends {spends}/{runs}, any_commit {commits}");
        }
    }
}

#[test]
#[ignore]
fn probe_blind_attack() {
    // worst case: the four successors of the attacker (ids 2,3,4,5) victim side
    let worst = plan_clique_blind_with(9, 5000, vec![6, 7, 8, 0], vec![2, 3, 4, 5]);
    // best case: successors attacker side
    let best = plan_clique_blind_with(9, 5000, vec![2, 3, 4, 5], vec![6, 7, 8, 0]);
    let params = AttackParams::clique(5000);
    for (name, plan) in [("worst", worst), ("best", best)] {
        let mut ok = 0;
        let mut dur = 0u64;
        for seed in 0..20u64 {
            let out = run_attack(&plan, &params, DecisionRule::CliqueMajority, seed);
            if out.double_spend {
                ok += 1;
            }
            dur += out.window_end_ms - out.window_start_ms;
            if seed == 0 {
                println!(
                    "{name}: wa={} wv={} ba={} bv={} committed={} success={}",
                    out.attacker_weight_gain,
                    out.victim_weight_gain,
                    out.attacker_blocks,
                    out.victim_blocks,
                    out.tx1_committed_in_partition,
                    out.double_spend
                );
            }
        }
        println!("{name}: success {ok}/20, mean duration {} ms", dur / 20);
    }
}
