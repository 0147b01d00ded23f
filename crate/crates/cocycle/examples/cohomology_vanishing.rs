//! Solvability of a gcd congruence system is exactness of a cochain
//! complex built from the subgroups `(i) ⊆ Z`: the value of a tuple lives
//! in `Z/(A_{i_0} + … + A_{i_n})`. For such families the positive-degree
//! cohomology vanishes, which is why the cocycle condition is the only
//! obstruction.

use cocycle::cochain::{FamilyComplex, SubgroupFamily, TupleMode};
use itertools::Itertools;

fn main() {
    for indices in [2i64, 3, 4, 6, 9, 10, 12].into_iter().combinations(3) {
        let family = SubgroupFamily::gcd_family(&indices);
        let complex = FamilyComplex::with_max_degree(family, TupleMode::Increasing, 3);
        let h1 = complex.cohomology(1).unwrap();
        let h2 = complex.cohomology(2).unwrap();
        assert!(h1.is_trivial() && h2.is_trivial());
        println!("I = {indices:?}: H^1 = {h1}, H^2 = {h2}");
    }

    // Vanishing is a property of the family, not of the formalism: four
    // generic lines in Z^3 produce a nontrivial class in degree 1.
    let lines = cocycle::lattice::generic_lines(3, 4, None).unwrap();
    let complex = FamilyComplex::with_max_degree(lines.family(), TupleMode::Increasing, 2);
    println!("four generic lines: H^1 = {}", complex.cohomology(1).unwrap());
}
