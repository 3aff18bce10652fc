use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use peernom::assignment::{build_assignment, check_sp_structure};
use peernom::mechanism::{nominate_with_draws, select, NominationDraws, Nominations, WeightScheme};
use peernom::noise::{sample_profile, PopulationMix};
use peernom::types::{validate_assignment, ApprovalProfile, PoolValues};
use peernom::{Assignment, GroundTruth, Params, RankingProfile, WeightVector};

struct Instance {
    p: Params,
    a: Assignment,
    profile: RankingProfile,
    draws: NominationDraws,
}

fn instance(n: usize, m: usize, k: usize, share: f64, seed: u64) -> Instance {
    let p = Params::new(n, k, m, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gt = GroundTruth::random(n, &mut rng);
    let d = PopulationMix::new(share, 0.5, 1.5).unwrap().dispersions(n, &mut rng);
    let a = build_assignment(&p, &mut rng).unwrap();
    let profile = sample_profile(&gt, &a, &d, &mut rng).unwrap();
    let draws = NominationDraws::sample(n, &mut rng);
    Instance { p, a, profile, draws }
}

fn schemes() -> Vec<WeightScheme> {
    let mut s = WeightScheme::all_default();
    s.push(WeightScheme::Distance { gamma: 3.0 });
    s.push(WeightScheme::MajorityErrors { delta: 0.7 });
    s.push(WeightScheme::Step { t1: 0.0, t2: 0.3, scale: peernom::mechanism::StepScale::NominationQuota });
    s
}

fn sizes() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..=4, 2usize..=6).prop_flat_map(|(m, mult)| {
        let n = 4 * m * mult;
        (Just(n), Just(m), 1..n)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn assignments_are_regular_and_sp_safe(half in 2usize..60, m in 1usize..8, seed: u64) {
        let n = 2 * half;
        prop_assume!(4 * m <= n);
        let p = Params::new(n, 1, m, 0.0).unwrap();
        let a = build_assignment(&p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(validate_assignment(&a, &p).is_empty());
        prop_assert!(check_sp_structure(&a));
        for (i, j) in a.arcs() {
            prop_assert!(!a.contains_arc(j, i));
        }
    }

    #[test]
    fn weights_lie_in_unit_interval((n, m, k) in sizes(), share in 0.0f64..=1.0, seed: u64) {
        let inst = instance(n, m, k, share, seed);
        let noms = nominate_with_draws(&inst.profile, &inst.p, &inst.draws).unwrap();
        for s in schemes() {
            let w = s.weights(noms.approvals(), &inst.a, &inst.p).unwrap();
            prop_assert_eq!(w.len(), n);
            prop_assert!(w.as_slice().iter().all(|x| (0.0..=1.0).contains(x)), "{} {:?}", s, w);
        }
    }

    /// An agent's own ranking never moves the weight of any of its reviewers.
    #[test]
    fn weights_of_own_reviewers_ignore_own_report((n, m, k) in sizes(), seed: u64, agent_pick: usize, perm_seed: u64) {
        let inst = instance(n, m, k, 0.5, seed);
        let j = agent_pick % n;
        let mut alt = inst.profile.ranking(j).to_vec();
        alt.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
        let deviated = inst.profile.with_ranking(j, alt).unwrap();
        let before = nominate_with_draws(&inst.profile, &inst.p, &inst.draws).unwrap();
        let after = nominate_with_draws(&deviated, &inst.p, &inst.draws).unwrap();
        for s in schemes() {
            let w0 = s.weights(before.approvals(), &inst.a, &inst.p).unwrap();
            let w1 = s.weights(after.approvals(), &inst.a, &inst.p).unwrap();
            for &i in inst.a.reviewers(j) {
                prop_assert_eq!(w0[i], w1[i], "scheme {} reviewer {} of {}", s, i, j);
            }
        }
    }

    /// With weights fixed from outside, an extra realized nomination never
    /// unselects the agent that receives it.
    #[test]
    fn extra_support_keeps_agent_selected((n, m, k) in sizes(), seed: u64, weight_seed: u64, pick: usize) {
        let inst = instance(n, m, k, 0.5, seed);
        let noms = nominate_with_draws(&inst.profile, &inst.p, &inst.draws).unwrap();
        let mut wr = ChaCha8Rng::seed_from_u64(weight_seed);
        let w = WeightVector::new((0..n).map(|_| wr.gen::<f64>()).collect()).unwrap();
        let base = select(&inst.a, &noms, &w).unwrap();

        let arcs: Vec<(usize, usize)> = inst.a.arcs().filter(|&(i, j)| !noms.realized().get(i, j).unwrap()).collect();
        prop_assume!(!arcs.is_empty());
        let (ri, rj) = arcs[pick % arcs.len()];
        let entries: Vec<Vec<(usize, bool)>> = (0..n)
            .map(|i| noms.realized().pool(i).iter().map(|&(j, v)| (j, v || (i, j) == (ri, rj))).collect())
            .collect();
        let approvals = ApprovalProfile::new(
            PoolValues::from_entries((0..n).map(|i| noms.approvals().pool(i).to_vec()).collect()),
            noms.approvals().alpha(),
        );
        let boosted = select(&inst.a, &Nominations::new(approvals, PoolValues::from_entries(entries)), &w).unwrap();
        if base.contains(rj) {
            prop_assert!(boosted.contains(rj));
        }
        for x in 0..n {
            if x != rj {
                prop_assert_eq!(base.contains(x), boosted.contains(x));
            }
        }
    }
}
