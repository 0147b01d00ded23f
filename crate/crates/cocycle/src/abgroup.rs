//! Finitely generated abelian groups presented as Z^g modulo the column
//! lattice of a relation matrix, with subgroup arithmetic (sum,
//! intersection, quotient, membership, canonical residues) and p-primary
//! localization. Groups are value objects; ambient compatibility is
//! structural (same rank, same canonical relation lattice).

use crate::intlin::{self, column_basis, ColumnBasis, IntMatrix};
use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fmt;

/// `Z^ambient_rank / columns(relations)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FPGroup {
    ambient_rank: usize,
    relations: IntMatrix,
}

/// Canonical isomorphism type: `Z^free_rank + Z/d_1 + ... + Z/d_k` with
/// `d_1 | d_2 | ... | d_k`, all `d_i > 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupInvariants {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl GroupInvariants {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().product::<BigInt>().max(BigInt::one()))
    }
}

impl fmt::Display for GroupInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl FPGroup {
    pub fn new(ambient_rank: usize, relations: IntMatrix) -> Self {
        assert_eq!(
            relations.rows(),
            ambient_rank,
            "relation columns must live in Z^{ambient_rank}"
        );
        FPGroup { ambient_rank, relations }
    }

    pub fn free(rank: usize) -> Self {
        FPGroup::new(rank, IntMatrix::zero(rank, 0))
    }

    pub fn cyclic<T: Into<BigInt>>(n: T) -> Self {
        FPGroup::new(1, IntMatrix::from_rows(vec![vec![n.into()]]))
    }

    pub fn from_invariants(free_rank: usize, torsion: &[BigInt]) -> Self {
        let g = free_rank + torsion.len();
        let mut rel = IntMatrix::zero(g, torsion.len());
        for (j, d) in torsion.iter().enumerate() {
            rel.set(j, j, d.clone());
        }
        FPGroup::new(g, rel)
    }

    pub fn direct_sum(&self, other: &FPGroup) -> FPGroup {
        let g = self.ambient_rank + other.ambient_rank;
        let mut rel = IntMatrix::zero(g, self.relations.cols() + other.relations.cols());
        for i in 0..self.ambient_rank {
            for j in 0..self.relations.cols() {
                rel.set(i, j, self.relations.get(i, j).clone());
            }
        }
        for i in 0..other.ambient_rank {
            for j in 0..other.relations.cols() {
                rel.set(
                    self.ambient_rank + i,
                    self.relations.cols() + j,
                    other.relations.get(i, j).clone(),
                );
            }
        }
        FPGroup::new(g, rel)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Same ambient rank and same relation lattice.
    pub fn compatible(&self, other: &FPGroup) -> bool {
        self.ambient_rank == other.ambient_rank
            && intlin::column_hnf(&self.relations) == intlin::column_hnf(&other.relations)
    }

    pub fn invariants(&self) -> GroupInvariants {
        let res = intlin::snf(&self.relations);
        let diag = res.diagonal();
        let rank = diag.iter().filter(|d| !d.is_zero()).count();
        GroupInvariants {
            free_rank: self.ambient_rank - rank,
            torsion: diag
                .into_iter()
                .filter(|d| !d.is_zero() && !d.is_one())
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.invariants().free_rank == 0
    }

    pub fn order(&self) -> Option<BigInt> {
        self.invariants().order()
    }

    pub fn element(&self, coords: Vec<BigInt>) -> GroupElement {
        assert_eq!(coords.len(), self.ambient_rank, "coordinate length mismatch");
        GroupElement { ambient: self.clone(), coords }
    }

    pub fn element_from_i64(&self, coords: &[i64]) -> GroupElement {
        self.element(coords.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(&self) -> GroupElement {
        self.element(vec![BigInt::zero(); self.ambient_rank])
    }

    pub fn elements_eq(&self, a: &GroupElement, b: &GroupElement) -> bool {
        assert!(self.compatible(&a.ambient) && self.compatible(&b.ambient));
        let diff: Vec<BigInt> = a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect();
        column_basis(&self.relations).contains(&diff)
    }

    /// Order of `e` in the group, `None` when infinite. Splitting along the
    /// Smith form U·R·V = S, the class of x has coordinates U·x in
    /// `⊕ Z/s_i ⊕ Z^{g-rank}`, so the order is `lcm_i s_i/gcd(s_i, (Ux)_i)`
    /// provided the free coordinates vanish.
    pub fn element_order(&self, e: &GroupElement) -> Option<BigInt> {
        assert!(self.compatible(&e.ambient), "ambient mismatch");
        let res = intlin::snf(&self.relations);
        let y = res.u.mul_vec(&e.coords);
        let rank = res.rank();
        if y[rank..].iter().any(|c| !c.is_zero()) {
            return None;
        }
        let mut ord = BigInt::one();
        for i in 0..rank {
            let s = res.s.get(i, i);
            ord = ord.lcm(&(s / s.gcd(&y[i])));
        }
        Some(ord)
    }

    pub fn subgroup(&self, generators: IntMatrix) -> Subgroup {
        assert_eq!(
            generators.rows(),
            self.ambient_rank,
            "generator columns must live in the ambient"
        );
        Subgroup { ambient: self.clone(), generators }
    }

    pub fn subgroup_from_i64(&self, cols: &[&[i64]]) -> Subgroup {
        let cols_big: Vec<Vec<BigInt>> = cols
            .iter()
            .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        self.subgroup(IntMatrix::from_cols(self.ambient_rank, &cols_big))
    }

    pub fn zero_subgroup(&self) -> Subgroup {
        self.subgroup(IntMatrix::zero(self.ambient_rank, 0))
    }

    pub fn full_subgroup(&self) -> Subgroup {
        self.subgroup(IntMatrix::identity(self.ambient_rank))
    }

    /// All elements as canonical coordinate vectors, or `None` when the
    /// group is infinite. The canonical representatives form a box over the
    /// pivot entries of the relation lattice basis.
    pub fn enumerate_elements(&self) -> Option<Vec<Vec<BigInt>>> {
        let cb = column_basis(&self.relations);
        if cb.rank() < self.ambient_rank {
            return None;
        }
        // Full rank forces pivots = 0..g, so the box is over the diagonal.
        let ranges: Vec<Vec<BigInt>> = (0..self.ambient_rank)
            .map(|k| {
                let d = cb.basis.get(k, k);
                let mut v = Vec::new();
                let mut x = BigInt::zero();
                while &x < d {
                    v.push(x.clone());
                    x += 1;
                }
                v
            })
            .collect();
        Some(
            ranges
                .into_iter()
                .multi_cartesian_product()
                .collect::<Vec<_>>(),
        )
    }
}

/// Element of an `FPGroup`, carried as ambient coordinates; two coordinate
/// vectors represent the same element iff their difference lies in the
/// relation lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub ambient: FPGroup,
    pub coords: Vec<BigInt>,
}

/// Subgroup of the ambient group, generated by the images of the given
/// columns (the relation lattice is implicitly contained).
#[derive(Clone, Debug)]
pub struct Subgroup {
    ambient: FPGroup,
    generators: IntMatrix,
}

impl Subgroup {
    pub fn ambient(&self) -> &FPGroup {
        &self.ambient
    }

    pub fn generators(&self) -> &IntMatrix {
        &self.generators
    }

    /// Generators and relations together: the full preimage lattice in Z^g.
    /// Membership and canonical residues are taken against this.
    pub fn reduction_basis(&self) -> ColumnBasis {
        column_basis(&self.generators.hstack(self.ambient.relations()))
    }

    /// Canonical form of the preimage lattice; equal subgroups have equal keys.
    pub fn key(&self) -> IntMatrix {
        self.reduction_basis().basis
    }

    pub fn sum(&self, other: &Subgroup) -> Subgroup {
        assert!(self.ambient.compatible(&other.ambient), "ambient mismatch");
        Subgroup {
            ambient: self.ambient.clone(),
            generators: self.generators.hstack(&other.generators),
        }
    }

    /// Meet of the two subgroups. A kernel vector of `[G1 | -G2 | R]` splits
    /// as (x1, x2, r) with G1·x1 = G2·x2 - R·r, so the G1·x1 span all common
    /// elements modulo the relation lattice.
    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        assert!(self.ambient.compatible(&other.ambient), "ambient mismatch");
        let c1 = self.generators.cols();
        let mut neg = other.generators.clone();
        for i in 0..neg.rows() {
            for j in 0..neg.cols() {
                let v = -neg.get(i, j);
                neg.set(i, j, v);
            }
        }
        let stacked = self
            .generators
            .hstack(&neg)
            .hstack(self.ambient.relations());
        let ker = intlin::kernel_basis(&stacked);
        let x1 = ker.row_slice(0, c1);
        Subgroup {
            ambient: self.ambient.clone(),
            generators: self.generators.mul(&x1),
        }
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        assert!(self.ambient.compatible(&e.ambient), "ambient mismatch");
        self.reduction_basis().contains(&e.coords)
    }

    /// Canonical representative of `e` modulo this subgroup (and the
    /// relations); idempotent, and `e - reduce(e)` lies in the subgroup.
    pub fn reduce(&self, e: &GroupElement) -> GroupElement {
        assert!(self.ambient.compatible(&e.ambient), "ambient mismatch");
        GroupElement {
            ambient: e.ambient.clone(),
            coords: self.reduction_basis().reduce(&e.coords),
        }
    }

    pub fn subset_of(&self, other: &Subgroup) -> bool {
        assert!(self.ambient.compatible(&other.ambient), "ambient mismatch");
        let cb = other.reduction_basis();
        (0..self.generators.cols()).all(|j| cb.contains(&self.generators.col(j)))
    }

    pub fn equals(&self, other: &Subgroup) -> bool {
        self.key() == other.key()
    }

    /// `ambient / self`: adjoin the generators as relations.
    pub fn quotient(&self) -> FPGroup {
        FPGroup::new(
            self.ambient.ambient_rank(),
            self.ambient.relations().hstack(&self.generators),
        )
    }
}

/// p-part of a finite group: p-primary components of each invariant factor.
pub fn p_primary(g: &FPGroup, p: &BigInt) -> FPGroup {
    let inv = g.invariants();
    assert_eq!(inv.free_rank, 0, "p_primary requires a finite group");
    let parts: Vec<BigInt> = inv
        .torsion
        .iter()
        .map(|d| {
            let mut d = d.clone();
            let mut part = BigInt::one();
            while (&d % p).is_zero() {
                d /= p;
                part *= p;
            }
            part
        })
        .filter(|part| !part.is_one())
        .collect();
    FPGroup::from_invariants(0, &parts)
}

/// Localizing a finite product at p factor by factor gives the same group
/// as localizing the product: checks that the p-parts agree canonically.
pub fn product_localization_check(groups: &[FPGroup], p: &BigInt) -> bool {
    let product = groups
        .iter()
        .fold(FPGroup::free(0), |acc, g| acc.direct_sum(g));
    let lhs = p_primary(&product, p).invariants();
    let rhs = groups
        .iter()
        .fold(FPGroup::free(0), |acc, g| acc.direct_sum(&p_primary(g, p)))
        .invariants();
    lhs == rhs
}

/// Whether `e` maps to zero under localization at p, i.e. has finite order
/// coprime to p.
pub fn localization_kernel(g: &FPGroup, e: &GroupElement, p: &BigInt) -> bool {
    match g.element_order(e) {
        Some(ord) => ord.gcd(p).is_one(),
        None => false,
    }
}
