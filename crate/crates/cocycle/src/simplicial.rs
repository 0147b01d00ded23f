//! Singular simplices of a finite simplicial complex, the augmented chain
//! complex, the ordering endomorphism phi, the acyclic carrier Phi(s) with
//! its cone contraction, and the inductively built homotopy h from phi to 0
//! kept in carrier form. Cochains with coefficient systems, the transfer of
//! carrier operators, the projector onto alternating cochains, and the
//! quasi-isomorphism between the full and alternating complexes.
//!
//! Convention: `induced(s, f)` maps `value(s∘f)` to `value(s)`, and
//! `(dc)(s) = sum_i (-1)^i induced(s, f_i)(c(s∘f_i))`; with this reading
//! the congruence complex of a subgroup family is the special case where K
//! is the full simplex on the index set.

use crate::abgroup::{FPGroup, GroupInvariants};
use crate::cochain::SubgroupFamily;
use crate::homology;
use crate::intlin::{column_basis, IntMatrix};
use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Finite simplicial complex on vertices `0..vertex_count`; the simplex set
/// is closed downward by construction.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    vertex_count: usize,
    simplices: BTreeSet<Vec<usize>>,
}

impl SimplicialComplex {
    /// Builds the downward closure of the given faces (sorted vertex sets).
    pub fn new(vertex_count: usize, faces: &[Vec<usize>]) -> Self {
        let mut simplices = BTreeSet::new();
        for face in faces {
            let mut sorted: Vec<usize> = face.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert!(!sorted.is_empty(), "simplices are nonempty");
            assert!(
                sorted.iter().all(|&v| v < vertex_count),
                "vertex out of range"
            );
            for k in 1..=sorted.len() {
                for sub in sorted.iter().copied().combinations(k) {
                    simplices.insert(sub);
                }
            }
        }
        SimplicialComplex { vertex_count, simplices }
    }

    /// The full simplex on `k` vertices.
    pub fn full(k: usize) -> Self {
        SimplicialComplex::new(k, &[(0..k).collect()])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn is_simplex(&self, sorted_set: &[usize]) -> bool {
        self.simplices.contains(sorted_set)
    }

    /// All singular n-simplices: maps `{0..n} -> vertices` whose image is a
    /// simplex, in lexicographic order.
    pub fn singular_simplices(&self, n: usize) -> Vec<SingularSimplex> {
        (0..n + 1)
            .map(|_| 0..self.vertex_count)
            .multi_cartesian_product()
            .filter(|verts| {
                let mut image: Vec<usize> = verts.clone();
                image.sort_unstable();
                image.dedup();
                self.is_simplex(&image)
            })
            .map(|verts| SingularSimplex { verts })
            .collect()
    }
}

/// A singular simplex: `verts[i]` is the image of vertex `i` of the
/// standard simplex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SingularSimplex {
    pub verts: Vec<usize>,
}

impl SingularSimplex {
    pub fn degree(&self) -> usize {
        self.verts.len() - 1
    }

    pub fn is_injective(&self) -> bool {
        self.verts.iter().duplicates().next().is_none()
    }

    pub fn is_sorted(&self) -> bool {
        self.verts.windows(2).all(|w| w[0] <= w[1])
    }

    /// `s ∘ f_i`: delete entry `i`.
    pub fn face(&self, i: usize) -> SingularSimplex {
        let mut verts = self.verts.clone();
        verts.remove(i);
        SingularSimplex { verts }
    }

    /// `s ∘ f` for an abstract simplex map `f`.
    pub fn compose(&self, f: &SimplexMap) -> SingularSimplex {
        SingularSimplex {
            verts: f.map.iter().map(|&i| self.verts[i]).collect(),
        }
    }

    /// Whether every vertex of `t` is in the image of `self`, i.e. `t` is
    /// of the form `self ∘ f`.
    pub fn carries(&self, t: &SingularSimplex) -> bool {
        t.verts.iter().all(|v| self.verts.contains(v))
    }
}

/// A map `Δ_k -> Δ_n` given by its values; the codomain is implied by use.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SimplexMap {
    pub map: Vec<usize>,
}

impl SimplexMap {
    pub fn identity(n: usize) -> Self {
        SimplexMap { map: (0..n + 1).collect() }
    }

    /// The increasing injection `Δ_{n-1} -> Δ_n` missing `i`.
    pub fn face_map(n: usize, i: usize) -> Self {
        SimplexMap {
            map: (0..n + 1).filter(|&j| j != i).collect(),
        }
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &SimplexMap) -> SimplexMap {
        SimplexMap {
            map: g.map.iter().map(|&i| self.map[i]).collect(),
        }
    }

    /// Prepend vertex 0: the cone map `Δ_{k+1} -> Δ_n` used by the carrier
    /// contraction.
    pub fn cone(&self) -> SimplexMap {
        let mut map = Vec::with_capacity(self.map.len() + 1);
        map.push(0);
        map.extend_from_slice(&self.map);
        SimplexMap { map }
    }
}

/// Finitely supported integer combination of singular simplices of one
/// degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularChain {
    pub degree: usize,
    pub terms: BTreeMap<SingularSimplex, BigInt>,
}

impl SingularChain {
    pub fn zero(degree: usize) -> Self {
        SingularChain { degree, terms: BTreeMap::new() }
    }

    pub fn generator(s: SingularSimplex) -> Self {
        let degree = s.degree();
        let mut terms = BTreeMap::new();
        terms.insert(s, BigInt::one());
        SingularChain { degree, terms }
    }

    pub fn add_term(&mut self, s: SingularSimplex, coeff: BigInt) {
        assert_eq!(s.degree(), self.degree, "degree mismatch");
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(s) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &SingularChain) -> SingularChain {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(s.clone(), c.clone());
        }
        out
    }

    pub fn negate(&self) -> SingularChain {
        SingularChain {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(s, c)| (s.clone(), -c))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `∂s = sum_i (-1)^i s∘f_i`, extended linearly. Degree must be >= 1.
    pub fn boundary(&self) -> SingularChain {
        assert!(self.degree >= 1, "no boundary in degree 0");
        let mut out = SingularChain::zero(self.degree - 1);
        for (s, c) in &self.terms {
            for i in 0..=self.degree {
                let sign = if i % 2 == 0 { c.clone() } else { -c };
                out.add_term(s.face(i), sign);
            }
        }
        out
    }

    /// `ε : C_0 -> Z`, the sum of coefficients.
    pub fn augmentation(&self) -> BigInt {
        assert_eq!(self.degree, 0, "augmentation lives in degree 0");
        self.terms.values().sum()
    }
}

/// The ordering endomorphism: noninjective simplices are fixed; an
/// injective s maps to `s - sign(σ)·(s∘σ)` where `σ` sorts the vertices.
/// Sorted injective simplices map to 0.
pub fn phi(s: &SingularSimplex) -> SingularChain {
    let mut out = SingularChain::zero(s.degree());
    for (f, lambda) in phi_carrier_terms(s) {
        out.add_term(s.compose(&f), lambda);
    }
    out
}

/// phi in carrier form: pairs `(f, λ)` with `phi(s) = Σ λ · s∘f`.
fn phi_carrier_terms(s: &SingularSimplex) -> Vec<(SimplexMap, BigInt)> {
    let n = s.degree();
    if !s.is_injective() {
        return vec![(SimplexMap::identity(n), BigInt::one())];
    }
    if s.is_sorted() {
        return Vec::new(); // σ = id, the two terms cancel
    }
    let mut order: Vec<usize> = (0..n + 1).collect();
    order.sort_by_key(|&i| s.verts[i]);
    let sign = permutation_sign(&order);
    vec![
        (SimplexMap::identity(n), BigInt::one()),
        (SimplexMap { map: order }, BigInt::from(-sign)),
    ]
}

fn permutation_sign(perm: &[usize]) -> i64 {
    let mut sign = 1i64;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// The cone-on-first-vertex contraction of the acyclic carrier `Φ(s)`:
/// `t = s∘f ↦ (s0, t0, ..., tn)`. Every term of `c` must be carried by `s`.
/// In the augmented complex (with `h_{-1}(1) = (s0)`) this satisfies
/// `∂κ + κ∂ = id`; concretely `∂κ(c) + κ(∂c) = c` in degrees >= 1 and
/// `∂κ(c) = c - ε(c)·(s0)` in degree 0.
pub fn carrier_contraction(s: &SingularSimplex, c: &SingularChain) -> SingularChain {
    let mut out = SingularChain::zero(c.degree + 1);
    for (t, coeff) in &c.terms {
        assert!(s.carries(t), "term not carried by s");
        let mut verts = Vec::with_capacity(t.verts.len() + 1);
        verts.push(s.verts[0]);
        verts.extend_from_slice(&t.verts);
        out.add_term(SingularSimplex { verts }, coeff.clone());
    }
    out
}

/// A chain operator `C_p -> C_q` recorded in carrier form: per singular
/// p-simplex s, the pairs `(f : Δ_q -> Δ_p, λ)` with `ψ(s) = Σ λ · s∘f`.
#[derive(Clone, Debug)]
pub struct CarrierOp {
    pub target_degree: usize,
    pub terms: BTreeMap<SingularSimplex, Vec<(SimplexMap, BigInt)>>,
}

impl CarrierOp {
    pub fn new(target_degree: usize) -> Self {
        CarrierOp { target_degree, terms: BTreeMap::new() }
    }

    pub fn apply(&self, s: &SingularSimplex) -> SingularChain {
        let mut out = SingularChain::zero(self.target_degree);
        for (f, lambda) in self.terms.get(s).map(Vec::as_slice).unwrap_or(&[]) {
            out.add_term(s.compose(f), lambda.clone());
        }
        out
    }
}

/// phi of a whole degree in carrier form.
pub fn phi_carrier(k: &SimplicialComplex, degree: usize) -> CarrierOp {
    let mut op = CarrierOp::new(degree);
    for s in k.singular_simplices(degree) {
        let ts = phi_carrier_terms(&s);
        op.terms.insert(s, ts);
    }
    op
}

/// The homotopy from phi to 0, built degree by degree:
/// `h_0 = 0` and `h_k(s) = κ_s((φ_k - h_{k-1}∂_k)(s))`, kept in carrier
/// form so it can be transferred to cochains. `tables[k]` covers `S_k(K)`.
pub struct Homotopy {
    pub tables: Vec<CarrierOp>,
}

pub fn build_h(k: &SimplicialComplex, max_degree: usize) -> Homotopy {
    let mut tables: Vec<CarrierOp> = Vec::with_capacity(max_degree + 1);
    // h_0 = 0.
    let mut t0 = CarrierOp::new(1);
    for s in k.singular_simplices(0) {
        t0.terms.insert(s, Vec::new());
    }
    tables.push(t0);
    for deg in 1..=max_degree {
        let mut table = CarrierOp::new(deg + 1);
        for s in k.singular_simplices(deg) {
            // Accumulate (φ - h∂)(s) as maps Δ_deg -> Δ_deg.
            let mut acc: BTreeMap<SimplexMap, BigInt> = BTreeMap::new();
            for (f, lambda) in phi_carrier_terms(&s) {
                *acc.entry(f).or_insert_with(BigInt::zero) += lambda;
            }
            for i in 0..=deg {
                let fi = SimplexMap::face_map(deg, i);
                let face = s.face(i);
                let prev = tables[deg - 1]
                    .terms
                    .get(&face)
                    .expect("face must be tabulated");
                for (g, mu) in prev {
                    let composed = fi.compose(g);
                    let signed = if i % 2 == 0 { -mu } else { mu.clone() };
                    *acc.entry(composed).or_insert_with(BigInt::zero) += signed;
                }
            }
            // Cone each map and drop cancelled terms.
            let terms: Vec<(SimplexMap, BigInt)> = acc
                .into_iter()
                .filter(|(_, lambda)| !lambda.is_zero())
                .map(|(f, lambda)| (f.cone(), lambda))
                .collect();
            table.terms.insert(s, terms);
        }
        tables.push(table);
    }
    Homotopy { tables }
}

/// Coefficient system: a finitely presented group per singular simplex and
/// a homomorphism `value(s∘f) -> value(s)` per map, given on ambient
/// coordinates. Functoriality (`induced` respects identity and
/// composition) is the caller's obligation; the provided systems satisfy
/// it on the nose.
pub trait CoefficientSystem {
    fn value(&self, s: &SingularSimplex) -> FPGroup;
    fn induced(&self, s: &SingularSimplex, f: &SimplexMap) -> IntMatrix;
}

/// The same group everywhere; all induced maps are the identity.
pub struct ConstantSystem {
    pub group: FPGroup,
}

impl CoefficientSystem for ConstantSystem {
    fn value(&self, _s: &SingularSimplex) -> FPGroup {
        self.group.clone()
    }

    fn induced(&self, _s: &SingularSimplex, _f: &SimplexMap) -> IntMatrix {
        IntMatrix::identity(self.group.ambient_rank())
    }
}

/// `s ↦ A/(A_{s_0} + ... + A_{s_n})` for a subgroup family indexed by the
/// vertices; induced maps are the natural projections, the identity on
/// ambient representatives. Over the full simplex on the index set this is
/// exactly the congruence complex of the family.
pub struct CongruenceSystem {
    pub family: SubgroupFamily,
}

impl CoefficientSystem for CongruenceSystem {
    fn value(&self, s: &SingularSimplex) -> FPGroup {
        let mut sum = self.family.member(s.verts[0]).clone();
        for &v in &s.verts[1..] {
            sum = sum.sum(self.family.member(v));
        }
        sum.quotient()
    }

    fn induced(&self, _s: &SingularSimplex, _f: &SimplexMap) -> IntMatrix {
        IntMatrix::identity(self.family.ambient().ambient_rank())
    }
}

/// Cochain with values in a coefficient system: for each singular simplex
/// of the degree, coordinates in `value(s)`'s ambient (missing keys are
/// zero). Values are representatives; equality is modulo each `value(s)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SysCochain {
    pub degree: usize,
    pub values: BTreeMap<SingularSimplex, Vec<BigInt>>,
}

impl SysCochain {
    pub fn zero(degree: usize) -> Self {
        SysCochain { degree, values: BTreeMap::new() }
    }

    pub fn set(&mut self, s: SingularSimplex, v: Vec<BigInt>) {
        assert_eq!(s.degree(), self.degree, "degree mismatch");
        self.values.insert(s, v);
    }

    pub fn value(&self, s: &SingularSimplex, rank: usize) -> Vec<BigInt> {
        self.values
            .get(s)
            .cloned()
            .unwrap_or_else(|| vec![BigInt::zero(); rank])
    }
}

/// `(dc)(s) = sum_i (-1)^i induced(s, f_i)(c(s∘f_i))`, canonically reduced
/// in each `value(s)`.
pub fn sys_coboundary<V: CoefficientSystem>(
    k: &SimplicialComplex,
    v: &V,
    c: &SysCochain,
) -> SysCochain {
    let n = c.degree + 1;
    let mut out = SysCochain::zero(n);
    for s in k.singular_simplices(n) {
        let target = v.value(&s);
        let mut acc = vec![BigInt::zero(); target.ambient_rank()];
        for i in 0..=n {
            let fi = SimplexMap::face_map(n, i);
            let face = s.face(i);
            let m = v.induced(&s, &fi);
            let cv = c.value(&face, m.cols());
            let mapped = m.mul_vec(&cv);
            for (a, x) in acc.iter_mut().zip(&mapped) {
                if i % 2 == 0 {
                    *a += x;
                } else {
                    *a -= x;
                }
            }
        }
        let reduced = column_basis(target.relations()).reduce(&acc);
        if !reduced.iter().all(Zero::is_zero) {
            out.set(s, reduced);
        }
    }
    out
}

/// Transfer of a carrier operator `ψ : C_p -> C_q` to cochains:
/// `(ψ'c)(s) = Σ_f λ_{s,f} · induced(s, f)(c(s∘f))` for `s` of degree p,
/// taking degree-q cochains to degree-p cochains.
pub fn transfer<V: CoefficientSystem>(
    v: &V,
    op: &CarrierOp,
    c: &SysCochain,
    source_degree: usize,
) -> SysCochain {
    let mut out = SysCochain::zero(source_degree);
    for (s, terms) in &op.terms {
        if s.degree() != source_degree {
            continue;
        }
        let rank = v.value(s).ambient_rank();
        let mut acc = vec![BigInt::zero(); rank];
        for (f, lambda) in terms {
            let m = v.induced(s, f);
            let cv = c.value(&s.compose(f), m.cols());
            let mapped = m.mul_vec(&cv);
            for (a, x) in acc.iter_mut().zip(&mapped) {
                *a += lambda * x;
            }
        }
        if !acc.iter().all(Zero::is_zero) {
            out.set(s.clone(), acc);
        }
    }
    out
}

/// `(1 - φ')c`: the projector onto alternating cochains.
pub fn alternating_project<V: CoefficientSystem>(
    k: &SimplicialComplex,
    v: &V,
    c: &SysCochain,
) -> SysCochain {
    let phi_op = phi_carrier(k, c.degree);
    let pc = transfer(v, &phi_op, c, c.degree);
    let mut out = SysCochain::zero(c.degree);
    for s in k.singular_simplices(c.degree) {
        let rank = v.value(&s).ambient_rank();
        let diff: Vec<BigInt> = c
            .value(&s, rank)
            .iter()
            .zip(pc.value(&s, rank))
            .map(|(a, b)| a - b)
            .collect();
        if !diff.iter().all(Zero::is_zero) {
            out.set(s, diff);
        }
    }
    out
}

/// Equality modulo each `value(s)`.
pub fn sys_cochains_equal<V: CoefficientSystem>(
    k: &SimplicialComplex,
    v: &V,
    a: &SysCochain,
    b: &SysCochain,
) -> bool {
    assert_eq!(a.degree, b.degree, "degree mismatch");
    k.singular_simplices(a.degree).into_iter().all(|s| {
        let val = v.value(&s);
        let rank = val.ambient_rank();
        let diff: Vec<BigInt> = a
            .value(&s, rank)
            .iter()
            .zip(b.value(&s, rank))
            .map(|(x, y)| x - y)
            .collect();
        column_basis(val.relations()).contains(&diff)
    })
}

// Shared scaffolding for the two cochain-complex flavors: `select` picks
// which simplices of each degree carry the complex.
fn cohomology_with<V: CoefficientSystem>(
    k: &SimplicialComplex,
    v: &V,
    n: usize,
    select: impl Fn(&SingularSimplex) -> bool,
) -> GroupInvariants {
    let simplices = |deg: usize| -> Vec<SingularSimplex> {
        k.singular_simplices(deg)
            .into_iter()
            .filter(&select)
            .collect()
    };
    let layer = |deg: usize| -> (Vec<SingularSimplex>, Vec<usize>, Vec<FPGroup>) {
        let ss = simplices(deg);
        let groups: Vec<FPGroup> = ss.iter().map(|s| v.value(s)).collect();
        let mut offsets = Vec::with_capacity(ss.len() + 1);
        let mut total = 0;
        for g in &groups {
            offsets.push(total);
            total += g.ambient_rank();
        }
        offsets.push(total);
        (ss, offsets, groups)
    };
    let relations = |offsets: &[usize], groups: &[FPGroup]| -> IntMatrix {
        let total = *offsets.last().unwrap();
        let blocks: Vec<IntMatrix> = groups
            .iter()
            .map(|g| column_basis(g.relations()).basis)
            .collect();
        let cols: usize = blocks.iter().map(|b| b.cols()).sum();
        let mut rel = IntMatrix::zero(total, cols);
        let mut c0 = 0;
        for (bi, b) in blocks.iter().enumerate() {
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    rel.set(offsets[bi] + i, c0 + j, b.get(i, j).clone());
                }
            }
            c0 += b.cols();
        }
        rel
    };
    let (src, src_off, src_groups) = layer(n);
    let (dst, dst_off, dst_groups) = layer(n + 1);
    let src_index: BTreeMap<&SingularSimplex, usize> =
        src.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let lift = |dst: &[SingularSimplex], dst_off: &[usize], deg: usize| -> IntMatrix {
        let mut d = IntMatrix::zero(*dst_off.last().unwrap(), *src_off.last().unwrap());
        for (ti, t) in dst.iter().enumerate() {
            for i in 0..=deg {
                let fi = SimplexMap::face_map(deg, i);
                let face = t.face(i);
                let Some(&si) = src_index.get(&face) else { continue };
                let m = v.induced(t, &fi);
                for r in 0..m.rows() {
                    for c in 0..m.cols() {
                        let cur = d.get(dst_off[ti] + r, src_off[si] + c)
                            + if i % 2 == 0 {
                                m.get(r, c).clone()
                            } else {
                                -m.get(r, c)
                            };
                        d.set(dst_off[ti] + r, src_off[si] + c, cur);
                    }
                }
            }
        }
        d
    };
    let d_n = lift(&dst, &dst_off, n + 1);
    let rel_n = relations(&src_off, &src_groups);
    let rel_next = relations(&dst_off, &dst_groups);
    let d_prev = if n > 0 {
        let (prev, prev_off, _prev_groups) = layer(n - 1);
        let prev_index: BTreeMap<&SingularSimplex, usize> =
            prev.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut d = IntMatrix::zero(*src_off.last().unwrap(), *prev_off.last().unwrap());
        for (ti, t) in src.iter().enumerate() {
            for i in 0..=n {
                let fi = SimplexMap::face_map(n, i);
                let face = t.face(i);
                let Some(&si) = prev_index.get(&face) else { continue };
                let m = v.induced(t, &fi);
                for r in 0..m.rows() {
                    for c in 0..m.cols() {
                        let cur = d.get(src_off[ti] + r, prev_off[si] + c)
                            + if i % 2 == 0 {
                                m.get(r, c).clone()
                            } else {
                                -m.get(r, c)
                            };
                        d.set(src_off[ti] + r, prev_off[si] + c, cur);
                    }
                }
            }
        }
        Some(d)
    } else {
        None
    };
    homology::cohomology_invariants(&d_n, &rel_n, &rel_next, d_prev.as_ref())
}

/// H^n of the full cochain complex `C^*(K, V)`.
pub fn cohomology_full<V: CoefficientSystem>(
    k: &SimplicialComplex,
    v: &V,
    n: usize,
) -> GroupInvariants {
    cohomology_with(k, v, n, |_| true)
}

/// H^n of the alternating subcomplex `C'^*(K, V)`: an alternating cochain
/// is determined by its values on sorted injective simplices, and face
/// maps preserve those, so the subcomplex is computed on that basis.
pub fn cohomology_alternating<V: CoefficientSystem>(
    k: &SimplicialComplex,
    v: &V,
    n: usize,
) -> GroupInvariants {
    cohomology_with(k, v, n, |s| s.is_injective() && s.is_sorted())
}

/// The inclusion `C'^*(K,V) ⊆ C^*(K,V)` is a quasi-isomorphism: checks the
/// invariants agree in degree n.
pub fn quasi_iso_check<V: CoefficientSystem>(k: &SimplicialComplex, v: &V, n: usize) -> bool {
    cohomology_full(k, v, n) == cohomology_alternating(k, v, n)
}
