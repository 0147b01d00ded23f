//! The local-to-global toolkit: p-adic valuations and p-parts of
//! integers, p-primary components of finite abelian groups, exactness of
//! localization on products, and the one-prime solving step that the
//! global solver stitches together with the Chinese remainder theorem.

use cocycle::abgroup::{localization_kernel, p_primary, product_localization_check, FPGroup};
use cocycle::solver::{local_solve, saturate, vp, LocalInstance};
use num_bigint::BigInt;
use std::collections::BTreeMap;

fn main() {
    for (m, p) in [(360, 2), (360, 3), (360, 5), (7, 2)] {
        println!("vp({m}, {p}) = {}, p-part = {}", vp(m, p), saturate(m, p));
    }

    // Z/360 splits into its primary components; the 2-part is Z/8.
    let g = FPGroup::cyclic(360);
    for p in [2i64, 3, 5] {
        let part = p_primary(&g, &BigInt::from(p));
        println!("{p}-primary part of Z/360: {}", part.invariants());
    }

    // Inverting p kills exactly the elements of order prime to p, and
    // does so componentwise on finite products.
    let groups = vec![FPGroup::cyclic(12), FPGroup::cyclic(9), FPGroup::cyclic(10)];
    assert!(product_localization_check(&groups, &BigInt::from(3)));
    println!("localization at 3 is componentwise exact on Z/12 x Z/9 x Z/10");

    // Localizing at p kills exactly the elements of order coprime to p:
    // in Z/12 at p = 3, [3] has order 4 and dies, [4] has order 3 and
    // survives.
    let z12 = FPGroup::cyclic(12);
    let three = z12.element_from_i64(&[3]);
    let four = z12.element_from_i64(&[4]);
    println!(
        "in Z/12 at p = 3: [3] dies: {}, [4] survives: {}",
        localization_kernel(&z12, &three, &BigInt::from(3)),
        !localization_kernel(&z12, &four, &BigInt::from(3))
    );

    // One prime at a time the congruence system becomes triangular: sort
    // the labels by valuation and each unknown is determined by the ones
    // before it. Degree 1 is literally a prefix sum.
    let mut data = BTreeMap::new();
    data.insert(vec![1, 2], BigInt::from(1));
    data.insert(vec![2, 3], BigInt::from(3));
    let li = LocalInstance {
        p: 2,
        degree: 1,
        valuations: vec![1, 2, 3],
        data,
    };
    let x = local_solve(&li).unwrap();
    for (t, v) in &x {
        println!("x({:?}) = {v} (mod 2^3)", t[0]);
    }
}
