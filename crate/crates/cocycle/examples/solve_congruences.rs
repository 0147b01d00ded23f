//! Decide and solve a system `x_j - x_i ≡ a_ij (mod gcd(i, j))`.
//!
//! Data on strictly increasing tuples is read in the alternating sense,
//! so `a(j, i) = -a(i, j)` is implied and only one triangle needs to be
//! written down.

use cocycle::solver::{check_cocycle, solve, verify, CongruenceInstance};
use num_bigint::BigInt;
use std::collections::BTreeMap;

fn main() {
    // x_6 - x_4 odd, x_9 - x_6 ≡ 2 (mod 3), x_9 - x_4 unconstrained.
    let mut a = BTreeMap::new();
    a.insert(vec![4, 6], BigInt::from(1));
    a.insert(vec![6, 9], BigInt::from(2));
    let inst = CongruenceInstance::new([4, 6, 9], 1, a).unwrap();

    let report = check_cocycle(&inst);
    println!("cocycle: {}", report.ok);

    let sol = solve(&inst).unwrap();
    println!("modulus: {}", sol.modulus);
    for (t, v) in &sol.x {
        println!("  x({}) = {v}", t[0]);
    }
    assert!(verify(&inst, &sol).ok);

    // A constraint along a repeated index is a constraint on zero, so
    // `x_2 - x_2 ≡ 1 (mod 2)` can never hold; the checker names the
    // offending tuple.
    let mut bad = BTreeMap::new();
    bad.insert(vec![2, 2], BigInt::from(1));
    let inst = CongruenceInstance::new([2], 1, bad).unwrap();
    let report = check_cocycle(&inst);
    println!("solvable: {}", report.ok);
    for w in &report.violations {
        println!(
            "  tuple {:?}: alternating sum ≡ {} (mod {})",
            w.tuple, w.residue, w.modulus
        );
    }
}
