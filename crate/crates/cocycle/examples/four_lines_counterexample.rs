//! Four lines in general position in Z^3 give a subgroup family whose
//! degree-1 cohomology is free of rank one. The harness extracts a
//! generating cocycle and certifies that no 0-cochain has it as a
//! coboundary — a congruence-style system that passes every local
//! consistency check yet has no solution.

use cocycle::lattice::{counterexample_h1, generic_lines};
use num_traits::Zero;

fn main() {
    let instance = generic_lines(3, 4, None).unwrap();
    for (i, line) in instance.lines().iter().enumerate() {
        println!("L{} = span {:?}", i + 1, line.generators().col(0));
    }

    let report = counterexample_h1(&instance).unwrap();
    println!("H^1 = {} (free rank {})", report.h1, report.h1.free_rank);

    let rank = report.family.ambient().ambient_rank();
    println!("unsolvable cocycle, nonzero components:");
    for pair in [(0usize, 1usize), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
        let t = vec![pair.0, pair.1];
        let v = report.cocycle.value(&t, rank);
        if !v.iter().all(Zero::is_zero) {
            println!("  a(L{}, L{}) = {v:?}", pair.0 + 1, pair.1 + 1);
        }
    }

    // Independent lines keep H^1 trivial; the fourth line is what closes
    // the loop that the class measures.
    let three = generic_lines(3, 3, None).unwrap();
    let complex = cocycle::cochain::FamilyComplex::with_max_degree(
        three.family(),
        cocycle::cochain::TupleMode::Increasing,
        2,
    );
    println!("three lines only: H^1 = {}", complex.cohomology(1).unwrap());

    // The construction is generic: random seeds give other witnesses.
    let seeded = generic_lines(3, 4, Some(41)).unwrap();
    let seeded_report = counterexample_h1(&seeded).unwrap();
    println!("seed 41: H^1 = {}", seeded_report.h1);
}
