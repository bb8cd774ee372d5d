use std::collections::BTreeSet;
use std::sync::atomic::AtomicBool;

use mshot_core::solver::random::{random_program, RandomSpec};
use mshot_core::solver::{brute_force_models, model_cost, solve, SolverConfig};
use mshot_core::{compare_costs, AtomId, CostVector, EnumMode, GroundLiteral, SolveStatus, SolverProgram};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn program(seed: u64, spec: &RandomSpec) -> SolverProgram {
    random_program(&mut ChaCha8Rng::seed_from_u64(seed), spec)
}

fn enumerate(p: &SolverProgram, seed: u64) -> (SolveStatus, Vec<BTreeSet<AtomId>>) {
    let mut out = Vec::new();
    let config = SolverConfig { seed, restarts: true };
    let r = solve(p, EnumMode::All, None, &config, &AtomicBool::new(false), &mut |m| {
        out.push(m.atoms.iter().copied().collect());
        true
    });
    (r.status, out)
}

fn optimum(p: &SolverProgram) -> (Option<CostVector>, Option<BTreeSet<AtomId>>) {
    let mut last = None;
    let r = solve(p, EnumMode::First, None, &SolverConfig::default(), &AtomicBool::new(false), &mut |m| {
        last = Some(m.atoms.iter().copied().collect());
        true
    });
    (r.optimum, last)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn enumeration_matches_brute_force(seed in any::<u64>()) {
        let spec = RandomSpec { external_ratio: 0.2, ..RandomSpec::default() };
        let p = program(seed, &spec);
        let expected = brute_force_models(&p).unwrap();
        let (status, models) = enumerate(&p, seed);
        let found: BTreeSet<_> = models.iter().cloned().collect();
        prop_assert_eq!(found.len(), models.len(), "duplicate models");
        prop_assert_eq!(&found, &expected);
        prop_assert_eq!(status == SolveStatus::Unsat, expected.is_empty());
    }

    #[test]
    fn optimum_matches_brute_force(seed in any::<u64>()) {
        let spec = RandomSpec { objective_levels: 2, ..RandomSpec::default() };
        let p = program(seed, &spec);
        let expected = brute_force_models(&p).unwrap();
        let best = expected.iter().map(|m| model_cost(&p, m)).min_by(compare_costs);
        let (opt, last) = optimum(&p);
        match best {
            None => prop_assert!(opt.is_none()),
            Some(best) => {
                let opt = opt.expect("optimum reported");
                prop_assert_eq!(compare_costs(&opt, &best), std::cmp::Ordering::Equal);
                let last = last.unwrap();
                prop_assert!(expected.contains(&last));
                prop_assert_eq!(compare_costs(&model_cost(&p, &last), &best), std::cmp::Ordering::Equal);
            }
        }
    }

    #[test]
    fn assumptions_select_models(seed in any::<u64>(), pick in any::<prop::sample::Index>(), value: bool) {
        let mut p = program(seed, &RandomSpec::default());
        let all = brute_force_models(&p).unwrap();
        let atom = AtomId::new(pick.index(p.num_atoms) as u32 + 1);
        p.assumptions.push(GroundLiteral { atom, positive: value });
        let expected: BTreeSet<_> = all.into_iter().filter(|m| m.contains(&atom) == value).collect();
        let found: BTreeSet<_> = enumerate(&p, seed).1.into_iter().collect();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn resolving_is_stable(seed in any::<u64>()) {
        let p = program(seed, &RandomSpec::default());
        let a: BTreeSet<_> = enumerate(&p, 1).1.into_iter().collect();
        let b: BTreeSet<_> = enumerate(&p, 2).1.into_iter().collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn limit_and_set_modes(seed in any::<u64>(), limit in 1usize..4) {
        let p = program(seed, &RandomSpec::default());
        let all = brute_force_models(&p).unwrap();
        let config = SolverConfig::default();
        let cancel = AtomicBool::new(false);
        let mut n = 0;
        solve(&p, EnumMode::All, Some(limit), &config, &cancel, &mut |_| { n += 1; true });
        prop_assert_eq!(n, limit.min(all.len()));
        for mode in [EnumMode::Intersection, EnumMode::Union] {
            let mut got = Vec::new();
            let r = solve(&p, mode, None, &config, &cancel, &mut |m| { got.push(m.shown.clone()); true });
            if all.is_empty() {
                prop_assert_eq!(r.status, SolveStatus::Unsat);
                continue;
            }
            let mut sets = all.iter();
            let first = sets.next().unwrap().clone();
            let expected: BTreeSet<AtomId> = sets.fold(first, |acc, m| match mode {
                EnumMode::Intersection => acc.intersection(m).copied().collect(),
                _ => acc.union(m).copied().collect(),
            });
            let last: BTreeSet<AtomId> = got.last().unwrap().iter().copied().collect();
            prop_assert_eq!(last, expected);
        }
    }
}
