//! Workloads shared by the benchmarks.

use mshot_core::solver::random::{random_program, RandomSpec};
use mshot_core::{Engine, GroundAtom, SolveOptions, SolveStatus, SolverProgram, Term};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TOH_ENCODING: &str = include_str!("../../../programs/toh_encoding.lp");

/// Towers of Hanoi instance with `disks` disks, all starting on peg `a`.
pub fn toh_instance(disks: u32) -> String {
    format!("peg(a). peg(b). peg(c). disk(1..{disks}). init_on(1..{disks},a). goal_on(1..{disks},c).")
}

/// Runs the incremental loop until the goal is reachable; returns the horizon.
pub fn toh_horizon(disks: u32) -> i64 {
    let mut e = Engine::new();
    e.load(&toh_instance(disks)).unwrap();
    e.load(TOH_ENCODING).unwrap();
    e.ground("base", vec![]).unwrap();
    for step in 1.. {
        e.ground("cumulative", vec![Term::Integer(step)]).unwrap();
        let query = GroundAtom::new("query", vec![Term::Integer(step)]);
        e.assign_external(&query, true).unwrap();
        if e.solve(SolveOptions::default(), |_| false).unwrap().status == SolveStatus::Sat {
            return step;
        }
        e.release_external(&query).unwrap();
    }
    unreachable!()
}

/// Grounds `horizon` cumulative steps without solving.
pub fn toh_ground(disks: u32, horizon: i64) -> Engine {
    let mut e = Engine::new();
    e.load(&toh_instance(disks)).unwrap();
    e.load(TOH_ENCODING).unwrap();
    e.ground("base", vec![]).unwrap();
    for step in 1..=horizon {
        e.ground("cumulative", vec![Term::Integer(step)]).unwrap();
    }
    e.flush().unwrap();
    e
}

/// `pigeons` pigeons into `holes` holes, one hole each.
pub fn pigeonhole(pigeons: u32, holes: u32) -> String {
    format!("p(1..{pigeons}). h(1..{holes}). 1 {{ at(P,H) : h(H) }} 1 :- p(P). :- at(P,H), at(Q,H), P < Q.")
}

pub fn random_programs(count: u64, spec: &RandomSpec) -> Vec<SolverProgram> {
    (0..count).map(|i| random_program(&mut ChaCha8Rng::seed_from_u64(i), spec)).collect()
}
