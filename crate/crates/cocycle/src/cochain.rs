//! The cochain complex of a family of subgroups `(A_i)` of an abelian
//! group A: terms are products over index tuples of `A/(A_{i_0}+...+A_{i_n})`,
//! the coboundary is the alternating sum of face deletions. Both the full
//! product over all tuples and the subcomplex of strictly increasing tuples
//! are supported; refinement maps between families induce cochain maps, and
//! two refinement maps are linked by an explicit homotopy.

use crate::abgroup::{FPGroup, GroupInvariants, Subgroup};
use crate::homology::{self, Subquotient};
use crate::intlin::{ColumnBasis, IntMatrix};
use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

pub const DEFAULT_MAX_DEGREE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleMode {
    /// All `(n+1)`-tuples with repetition, in index order.
    Full,
    /// Strictly increasing `(n+1)`-tuples only.
    Increasing,
}

#[derive(Debug, Error)]
pub enum CochainError {
    #[error("degree {degree} exceeds the complex bound {max}")]
    DegreeOverflow { degree: usize, max: usize },
}

/// Finite ordered family of subgroups of a common ambient group. Labels
/// name the indices for input/output; positions in the vector define the
/// index order used for increasing tuples.
#[derive(Clone, Debug)]
pub struct SubgroupFamily {
    ambient: FPGroup,
    labels: Vec<i64>,
    members: Vec<Subgroup>,
}

impl SubgroupFamily {
    pub fn new(ambient: FPGroup, labels: Vec<i64>, members: Vec<Subgroup>) -> Self {
        assert_eq!(labels.len(), members.len(), "label/member mismatch");
        assert!(
            labels.iter().duplicates().next().is_none(),
            "index labels must be distinct"
        );
        for m in &members {
            assert!(m.ambient().compatible(&ambient), "ambient mismatch");
        }
        SubgroupFamily { ambient, labels, members }
    }

    /// The family `(iZ)_{i in I}` inside Z whose congruences are
    /// `x_j - x_i = a_ij (mod gcd(i,j))`.
    pub fn gcd_family(indices: &[i64]) -> Self {
        assert!(indices.iter().all(|&i| i > 0), "indices must be positive");
        let z = FPGroup::free(1);
        let members = indices
            .iter()
            .map(|&i| z.subgroup_from_i64(&[&[i]]))
            .collect();
        SubgroupFamily::new(z, indices.to_vec(), members)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ambient(&self) -> &FPGroup {
        &self.ambient
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn member(&self, pos: usize) -> &Subgroup {
        &self.members[pos]
    }

    pub fn position_of(&self, label: i64) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Same labels, same subgroups (as lattices).
    pub fn same_family(&self, other: &SubgroupFamily) -> bool {
        self.ambient.compatible(&other.ambient)
            && self.labels == other.labels
            && self
                .members
                .iter()
                .zip(&other.members)
                .all(|(a, b)| a.equals(b))
    }
}

/// Cochain of fixed degree: a sparse map from position tuples to ambient
/// coordinate vectors (missing tuples are zero). Values are representatives;
/// each tuple's value is read modulo that tuple's subgroup sum.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FamilyCochain {
    pub degree: usize,
    pub values: BTreeMap<Vec<usize>, Vec<BigInt>>,
}

impl FamilyCochain {
    pub fn zero(degree: usize) -> Self {
        FamilyCochain { degree, values: BTreeMap::new() }
    }

    pub fn set(&mut self, tuple: Vec<usize>, value: Vec<BigInt>) {
        assert_eq!(tuple.len(), self.degree + 1, "tuple arity mismatch");
        self.values.insert(tuple, value);
    }

    pub fn value(&self, tuple: &[usize], ambient_rank: usize) -> Vec<BigInt> {
        self.values
            .get(tuple)
            .cloned()
            .unwrap_or_else(|| vec![BigInt::zero(); ambient_rank])
    }
}

/// One violated cocycle condition: the tuple (as labels) and the canonical
/// nonzero residue of the alternating sum there.
#[derive(Clone, Debug)]
pub struct Violation {
    pub tuple: Vec<i64>,
    pub residue: Vec<BigInt>,
}

pub struct CocycleCheck {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

pub struct FamilyComplex {
    family: SubgroupFamily,
    mode: TupleMode,
    max_degree: usize,
}

impl FamilyComplex {
    pub fn new(family: SubgroupFamily, mode: TupleMode) -> Self {
        FamilyComplex { family, mode, max_degree: DEFAULT_MAX_DEGREE }
    }

    pub fn with_max_degree(family: SubgroupFamily, mode: TupleMode, max_degree: usize) -> Self {
        FamilyComplex { family, mode, max_degree }
    }

    pub fn family(&self) -> &SubgroupFamily {
        &self.family
    }

    pub fn mode(&self) -> TupleMode {
        self.mode
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn check_degree(&self, degree: usize) -> Result<(), CochainError> {
        if degree > self.max_degree {
            return Err(CochainError::DegreeOverflow { degree, max: self.max_degree });
        }
        Ok(())
    }

    /// Admissible `(n+1)`-tuples of positions for degree `n`, in
    /// lexicographic order.
    pub fn tuples(&self, degree: usize) -> Vec<Vec<usize>> {
        let k = self.family.len();
        match self.mode {
            TupleMode::Full => (0..degree + 1)
                .map(|_| 0..k)
                .multi_cartesian_product()
                .collect(),
            TupleMode::Increasing => (0..k).combinations(degree + 1).collect(),
        }
    }

    pub fn labels_of(&self, tuple: &[usize]) -> Vec<i64> {
        tuple.iter().map(|&p| self.family.labels[p]).collect()
    }

    /// `A_{i_0} + ... + A_{i_n}` for the tuple.
    pub fn tuple_subgroup(&self, tuple: &[usize]) -> Subgroup {
        let mut s = self.family.member(tuple[0]).clone();
        for &p in &tuple[1..] {
            s = s.sum(self.family.member(p));
        }
        s
    }

    /// Reduction lattice of the tuple: subgroup sum plus ambient relations.
    pub fn tuple_basis(&self, tuple: &[usize]) -> ColumnBasis {
        self.tuple_subgroup(tuple).reduction_basis()
    }

    /// `(df)(i_0..i_{n+1}) = sum_j (-1)^j f(i_0..î_j..i_{n+1})`, canonically
    /// reduced per tuple.
    pub fn coboundary(&self, f: &FamilyCochain) -> Result<FamilyCochain, CochainError> {
        let n = f.degree + 1;
        self.check_degree(n)?;
        let g = self.family.ambient.ambient_rank();
        let mut out = FamilyCochain::zero(n);
        for t in self.tuples(n) {
            let mut acc = vec![BigInt::zero(); g];
            for j in 0..t.len() {
                let mut face = t.clone();
                face.remove(j);
                let v = f.value(&face, g);
                for (a, x) in acc.iter_mut().zip(&v) {
                    if j % 2 == 0 {
                        *a += x;
                    } else {
                        *a -= x;
                    }
                }
            }
            let reduced = self.tuple_basis(&t).reduce(&acc);
            if !reduced.iter().all(Zero::is_zero) {
                out.set(t, reduced);
            }
        }
        Ok(out)
    }

    /// Tests `da = 0` tuple-wise, reporting every violated tuple. The check
    /// runs at the cochain's own degree regardless of the complex bound.
    pub fn is_cocycle(&self, a: &FamilyCochain) -> CocycleCheck {
        let g = self.family.ambient.ambient_rank();
        let mut violations = Vec::new();
        for t in self.tuples(a.degree + 1) {
            let mut acc = vec![BigInt::zero(); g];
            for j in 0..t.len() {
                let mut face = t.clone();
                face.remove(j);
                let v = a.value(&face, g);
                for (x, y) in acc.iter_mut().zip(&v) {
                    if j % 2 == 0 {
                        *x += y;
                    } else {
                        *x -= y;
                    }
                }
            }
            let residue = self.tuple_basis(&t).reduce(&acc);
            if !residue.iter().all(Zero::is_zero) {
                violations.push(Violation { tuple: self.labels_of(&t), residue });
            }
        }
        CocycleCheck { ok: violations.is_empty(), violations }
    }

    /// Canonical per-tuple residues of `f`.
    pub fn reduce_cochain(&self, f: &FamilyCochain) -> FamilyCochain {
        let g = self.family.ambient.ambient_rank();
        let mut out = FamilyCochain::zero(f.degree);
        for t in self.tuples(f.degree) {
            let reduced = self.tuple_basis(&t).reduce(&f.value(&t, g));
            if !reduced.iter().all(Zero::is_zero) {
                out.set(t, reduced);
            }
        }
        out
    }

    /// Equality as cochains: every admissible tuple's values agree modulo
    /// the tuple's subgroup sum.
    pub fn cochains_equal(&self, f: &FamilyCochain, h: &FamilyCochain) -> bool {
        assert_eq!(f.degree, h.degree, "degree mismatch");
        let g = self.family.ambient.ambient_rank();
        self.tuples(f.degree).into_iter().all(|t| {
            let diff: Vec<BigInt> = f
                .value(&t, g)
                .iter()
                .zip(h.value(&t, g))
                .map(|(a, b)| a - b)
                .collect();
            self.tuple_basis(&t).contains(&diff)
        })
    }

    /// Block-diagonal relation matrix of term n over the free cover
    /// `Z^{g * #tuples}`, one canonical lattice block per tuple.
    pub(crate) fn term_relations(&self, degree: usize) -> IntMatrix {
        let g = self.family.ambient.ambient_rank();
        let tuples = self.tuples(degree);
        let blocks: Vec<IntMatrix> = tuples.iter().map(|t| self.tuple_basis(t).basis).collect();
        let total_cols: usize = blocks.iter().map(|b| b.cols()).sum();
        let mut rel = IntMatrix::zero(g * tuples.len(), total_cols);
        let mut col0 = 0;
        for (bi, b) in blocks.iter().enumerate() {
            for i in 0..g {
                for j in 0..b.cols() {
                    rel.set(bi * g + i, col0 + j, b.get(i, j).clone());
                }
            }
            col0 += b.cols();
        }
        rel
    }

    /// Free lift of `d : term(degree) -> term(degree+1)`; face deletion is
    /// coordinate-preserving, so blocks are signed identities.
    pub(crate) fn lift_matrix(&self, degree: usize) -> IntMatrix {
        let g = self.family.ambient.ambient_rank();
        let src = self.tuples(degree);
        let dst = self.tuples(degree + 1);
        let src_index: BTreeMap<&[usize], usize> =
            src.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
        let mut d = IntMatrix::zero(g * dst.len(), g * src.len());
        for (ti, t) in dst.iter().enumerate() {
            for j in 0..t.len() {
                let mut face = t.clone();
                face.remove(j);
                let Some(&si) = src_index.get(face.as_slice()) else {
                    continue;
                };
                let sign = if j % 2 == 0 { 1 } else { -1 };
                // Build-corruption probe: flipping one face sign breaks
                // d∘d = 0 and must be caught by the self test.
                #[cfg(feature = "corrupt-d")]
                let sign = if j == 1 { 1 } else { sign };
                for i in 0..g {
                    let v = d.get(ti * g + i, si * g + i) + BigInt::from(sign);
                    d.set(ti * g + i, si * g + i, v);
                }
            }
        }
        d
    }

    /// Kernel-mod-image presentation of `H^n = ker d^n / im d^{n-1}`
    /// (`H^0 = ker d^0`, no augmentation).
    pub fn cohomology_presentation(&self, degree: usize) -> Result<Subquotient, CochainError> {
        self.check_degree(degree + 1)?;
        let d_n = self.lift_matrix(degree);
        let rel_n = self.term_relations(degree);
        let rel_next = self.term_relations(degree + 1);
        let d_prev = if degree > 0 {
            Some(self.lift_matrix(degree - 1))
        } else {
            None
        };
        Ok(homology::kernel_mod_image(
            &d_n,
            &rel_n,
            &rel_next,
            d_prev.as_ref(),
        ))
    }

    pub fn cohomology(&self, degree: usize) -> Result<GroupInvariants, CochainError> {
        Ok(self.cohomology_presentation(degree)?.invariants())
    }
}

/// The complexes over all tuples and over increasing tuples compute the
/// same cohomology; checked per degree by comparing canonical invariants.
pub fn increasing_vs_full_check(family: &SubgroupFamily, degree: usize) -> bool {
    let full = FamilyComplex::new(family.clone(), TupleMode::Full);
    let incr = FamilyComplex::new(family.clone(), TupleMode::Increasing);
    match (full.cohomology(degree), incr.cohomology(degree)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

#[derive(Debug, Error)]
pub enum RefinementError {
    #[error("A_{{tau({j})}} is not contained in B_{{{j}}} (labels tau={tau_label}, j={j_label})")]
    Containment { j: usize, j_label: i64, tau_label: i64 },
    #[error("refinement maps must connect the same two families")]
    FamilyMismatch,
}

/// `tau : J -> I` with `A_{tau j} ⊆ B_j`; induces the cochain map
/// `C(I) -> C(J)`, `(tau f)(j_0..j_n) = f(tau j_0, ..., tau j_n)`.
/// Cochain-level operations work in full tuple mode, where every image
/// tuple is admissible.
#[derive(Clone, Debug)]
pub struct RefinementMap {
    source: SubgroupFamily,
    target: SubgroupFamily,
    tau: Vec<usize>,
}

impl RefinementMap {
    /// `tau[j]` is the source position assigned to target position `j`.
    pub fn new(
        source: SubgroupFamily,
        target: SubgroupFamily,
        tau: Vec<usize>,
    ) -> Result<Self, RefinementError> {
        assert_eq!(tau.len(), target.len(), "tau must be total on the target");
        for (j, &i) in tau.iter().enumerate() {
            if !source.member(i).subset_of(target.member(j)) {
                return Err(RefinementError::Containment {
                    j,
                    j_label: target.labels()[j],
                    tau_label: source.labels()[i],
                });
            }
        }
        Ok(RefinementMap { source, target, tau })
    }

    pub fn source(&self) -> &SubgroupFamily {
        &self.source
    }

    pub fn target(&self) -> &SubgroupFamily {
        &self.target
    }

    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    pub fn same_endpoints(&self, other: &RefinementMap) -> bool {
        self.source.same_family(&other.source) && self.target.same_family(&other.target)
    }

    /// `(tau f)(j_0..j_n) = f(tau j_0..tau j_n)` over all target tuples.
    pub fn induced(&self, f: &FamilyCochain) -> FamilyCochain {
        let g = self.source.ambient().ambient_rank();
        let k = self.target.len();
        let mut out = FamilyCochain::zero(f.degree);
        for t in (0..f.degree + 1).map(|_| 0..k).multi_cartesian_product() {
            let pulled: Vec<usize> = t.iter().map(|&j| self.tau[j]).collect();
            let v = f.value(&pulled, g);
            if !v.iter().all(Zero::is_zero) {
                out.set(t, v);
            }
        }
        out
    }
}

/// The homotopy linking two refinement maps with the same endpoints:
/// `(hf)(j_0..j_{n-1}) = sum_k (-1)^k f(tau j_0..tau j_k, sigma j_k..sigma j_{n-1})`,
/// which satisfies `dh + hd = sigma - tau` on full-mode complexes.
pub fn refinement_homotopy(
    tau: &RefinementMap,
    sigma: &RefinementMap,
    f: &FamilyCochain,
) -> FamilyCochain {
    assert!(tau.same_endpoints(sigma), "family mismatch");
    let n = f.degree;
    let g = tau.source.ambient().ambient_rank();
    let k = tau.target.len();
    let mut out = FamilyCochain::zero(n.saturating_sub(1));
    if n == 0 {
        return out;
    }
    for t in (0..n).map(|_| 0..k).multi_cartesian_product() {
        let mut acc = vec![BigInt::zero(); g];
        for split in 0..n {
            let mut pulled = Vec::with_capacity(n + 1);
            for &j in &t[..=split] {
                pulled.push(tau.tau[j]);
            }
            for &j in &t[split..] {
                pulled.push(sigma.tau[j]);
            }
            let v = f.value(&pulled, g);
            for (a, x) in acc.iter_mut().zip(&v) {
                if split % 2 == 0 {
                    *a += x;
                } else {
                    *a -= x;
                }
            }
        }
        if !acc.iter().all(Zero::is_zero) {
            out.set(t, acc);
        }
    }
    out
}

/// Verifies `d(hf) + h(df) = sigma f - tau f` tuple-wise on the target's
/// full complex. `f` must have degree >= 1 so that `hf` is defined.
pub fn refinement_homotopy_check(
    tau: &RefinementMap,
    sigma: &RefinementMap,
    f: &FamilyCochain,
) -> bool {
    let target_complex = FamilyComplex::with_max_degree(
        tau.target.clone(),
        TupleMode::Full,
        f.degree + 1,
    );
    let source_complex = FamilyComplex::with_max_degree(
        tau.source.clone(),
        TupleMode::Full,
        f.degree + 1,
    );
    let hf = refinement_homotopy(tau, sigma, f);
    let dhf = target_complex.coboundary(&hf).expect("degree within bound");
    let df = source_complex.coboundary(f).expect("degree within bound");
    let hdf = refinement_homotopy(tau, sigma, &df);
    let g = tau.source.ambient().ambient_rank();
    target_complex.tuples(f.degree).into_iter().all(|t| {
        let lhs_rhs_diff: Vec<BigInt> = (0..g)
            .map(|i| {
                let dh = &dhf.value(&t, g)[i];
                let hd = &hdf.value(&t, g)[i];
                let pulled_sigma: Vec<usize> = t.iter().map(|&j| sigma.tau[j]).collect();
                let pulled_tau: Vec<usize> = t.iter().map(|&j| tau.tau[j]).collect();
                let sf = &f.value(&pulled_sigma, g)[i];
                let tf = &f.value(&pulled_tau, g)[i];
                dh + hd - (sf - tf)
            })
            .collect();
        target_complex.tuple_basis(&t).contains(&lhs_rhs_diff)
    })
}

/// The tautological family of a family `(A_i)`: one index per distinct
/// subgroup, with `pi` the natural surjection and `iota` a section.
/// Returns `(pi, iota)`; both are refinement maps and the two complexes
/// are homotopy equivalent.
pub fn tautological_refinement(family: &SubgroupFamily) -> (RefinementMap, RefinementMap) {
    let mut reps: Vec<usize> = Vec::new(); // positions of first occurrences
    let mut class_of: Vec<usize> = Vec::with_capacity(family.len());
    for pos in 0..family.len() {
        let found = reps
            .iter()
            .position(|&r| family.member(r).equals(family.member(pos)));
        match found {
            Some(c) => class_of.push(c),
            None => {
                reps.push(pos);
                class_of.push(reps.len() - 1);
            }
        }
    }
    let taut = SubgroupFamily::new(
        family.ambient().clone(),
        reps.iter().map(|&r| family.labels()[r]).collect(),
        reps.iter().map(|&r| family.member(r).clone()).collect(),
    );
    // pi : taut-indexed target = original family refined by taut classes.
    // As maps of families: pi goes from (B_j) = taut to (A_i) = family with
    // tau(i) = class representative; iota goes the other way.
    let pi = RefinementMap::new(taut.clone(), family.clone(), class_of)
        .expect("A_{class(i)} equals A_i");
    let iota = RefinementMap::new(family.clone(), taut, reps)
        .expect("A_{rep(j)} equals B_j");
    (pi, iota)
}
