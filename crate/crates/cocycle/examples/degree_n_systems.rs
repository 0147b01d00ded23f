//! Degree-n systems assign unknowns to n-tuples of indices and constrain
//! alternating sums over (n+1)-tuples: `Σ_j (-1)^j x(t \ j) ≡ a(t)
//! (mod gcd t)`. Planting draws a random witness and publishes its
//! coboundary, which the solver must then reproduce up to a coboundary.

use cocycle::solver::{check_cocycle, plant, solve, verify, CongruenceInstance, SolverError};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    for degree in 1..=3 {
        let (inst, _witness) = plant([6, 10, 15, 12], degree, &mut rng);
        assert!(check_cocycle(&inst).ok);
        let sol = solve(&inst).unwrap();
        assert!(verify(&inst, &sol).ok);
        println!(
            "degree {degree}: solved over lcm = {}, {} unknowns",
            sol.modulus,
            sol.x.len()
        );
    }

    // The cocycle condition is not a formality: bump one value of a
    // planted degree-2 system (the indices share the factor 2, so every
    // tuple's modulus is even) and the solver refuses, handing back the
    // witnessing tuple.
    let (inst, _) = plant([6, 10, 12], 2, &mut rng);
    let mut data: BTreeMap<Vec<i64>, BigInt> = inst
        .tuples(3)
        .into_iter()
        .filter_map(|t| {
            let v = inst.value(&t);
            (!v.is_zero()).then_some((t, v))
        })
        .collect();
    *data.entry(vec![10, 6, 12]).or_default() += 1;
    let bad = CongruenceInstance::new([6, 10, 12], 2, data).unwrap();
    match solve(&bad) {
        Err(SolverError::CocycleViolation(ws)) => {
            println!("perturbed data rejected, first witness: {:?}", ws[0].tuple)
        }
        other => panic!("expected a cocycle violation, got {other:?}"),
    }
}
