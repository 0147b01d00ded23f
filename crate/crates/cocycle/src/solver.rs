//! End-to-end constructive solver for systems
//! `sum_j (-1)^j x(t minus j) ≡ a(t) (mod gcd t)` over (n+1)-tuples t from
//! a finite index set: cocycle checking over all tuples, alternating
//! reduction via the transferred simplicial homotopy, per-prime local
//! solving by induction on the first entry, CRT recombination, and an
//! independent verifier and brute-force oracle.
//!
//! Degree 0 (a single unknown, `x ≡ a(i) mod i`) is an extension of the
//! degree ≥ 1 theory and is solved directly by CRT.

use crate::cochain::SubgroupFamily;
use crate::intlin::{crt, Congruence};
use crate::simplicial::{
    build_h, sys_coboundary, transfer, CongruenceSystem, SimplicialComplex, SingularSimplex,
    SysCochain,
};
use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Largest e with `p^e | m`.
pub fn vp(m: i64, p: i64) -> u32 {
    assert!(m >= 1 && p >= 2, "vp wants m >= 1 and a prime p");
    let mut m = m;
    let mut e = 0;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    e
}

/// The p-part `p^{vp(m,p)}` of m; idempotent under repetition.
pub fn saturate(m: i64, p: i64) -> i64 {
    p.pow(vp(m, p))
}

fn tuple_gcd(t: &[i64]) -> i64 {
    t.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Sorted copy and the sign of the sorting permutation; `None` on a
/// repeated entry.
fn signed_sorted<T: Ord + Copy>(t: &[T]) -> Option<(Vec<T>, i64)> {
    let mut v = t.to_vec();
    let mut sign = 1i64;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j] < v[j - 1] {
            v.swap(j, j - 1);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

/// One failed congruence: the canonical nonzero residue of the alternating
/// sum modulo the tuple's gcd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleViolation {
    pub tuple: Vec<i64>,
    pub modulus: BigInt,
    pub residue: BigInt,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub ok: bool,
    pub violations: Vec<TupleViolation>,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid instance: {0}")]
    BadInstance(String),
    #[error("the data fails the cocycle condition at {} tuple(s)", .0.len())]
    CocycleViolation(Vec<TupleViolation>),
    #[error("brute-force search space of about 10^{0} points exceeds the budget")]
    SearchSpaceTooLarge(u32),
}

/// A system of congruences: data `a` on (n+1)-tuples over `indices`,
/// sparse with default 0, each congruence taken mod the gcd of its tuple.
/// If every supplied key is strictly increasing the data is read as the
/// alternating extension (0 on repeats, sign under permutations);
/// otherwise keys mean exactly what they say.
#[derive(Clone, Debug)]
pub struct CongruenceInstance {
    indices: Vec<i64>, // sorted, distinct
    degree: usize,
    data: BTreeMap<Vec<i64>, BigInt>,
    alternating_input: bool,
}

impl CongruenceInstance {
    pub fn new(
        indices: impl IntoIterator<Item = i64>,
        degree: usize,
        data: BTreeMap<Vec<i64>, BigInt>,
    ) -> Result<Self, SolverError> {
        let set: BTreeSet<i64> = indices.into_iter().collect();
        if set.is_empty() {
            return Err(SolverError::BadInstance("empty index set".into()));
        }
        if let Some(&bad) = set.iter().find(|&&i| i < 1) {
            return Err(SolverError::BadInstance(format!(
                "index {bad} is not positive"
            )));
        }
        for t in data.keys() {
            if t.len() != degree + 1 {
                return Err(SolverError::BadInstance(format!(
                    "tuple {t:?} does not have {} entries",
                    degree + 1
                )));
            }
            if let Some(&bad) = t.iter().find(|&&i| !set.contains(&i)) {
                return Err(SolverError::BadInstance(format!(
                    "tuple {t:?} uses {bad}, which is outside the index set"
                )));
            }
        }
        let alternating_input = !data.is_empty()
            && data.keys().all(|t| t.windows(2).all(|w| w[0] < w[1]))
            && degree + 1 >= 2;
        Ok(CongruenceInstance {
            indices: set.into_iter().collect(),
            degree,
            data,
            alternating_input,
        })
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn data(&self) -> &BTreeMap<Vec<i64>, BigInt> {
        &self.data
    }

    pub fn alternating_input(&self) -> bool {
        self.alternating_input
    }

    /// `a(t)`, resolving sparse defaults and the alternating reading.
    pub fn value(&self, t: &[i64]) -> BigInt {
        if !self.alternating_input {
            return self.data.get(t).cloned().unwrap_or_else(BigInt::zero);
        }
        match signed_sorted(t) {
            None => BigInt::zero(),
            Some((sorted, sign)) => {
                sign * self.data.get(&sorted).cloned().unwrap_or_else(BigInt::zero)
            }
        }
    }

    /// `M = lcm(I)`.
    pub fn lcm(&self) -> BigInt {
        self.indices
            .iter()
            .fold(BigInt::one(), |m, &i| m.lcm(&BigInt::from(i)))
    }

    /// The primes dividing `lcm(I)`.
    pub fn primes(&self) -> Vec<i64> {
        let mut ps = BTreeSet::new();
        for &i in &self.indices {
            let mut m = i;
            let mut d = 2;
            while d * d <= m {
                if m % d == 0 {
                    ps.insert(d);
                    while m % d == 0 {
                        m /= d;
                    }
                }
                d += 1;
            }
            if m > 1 {
                ps.insert(m);
            }
        }
        ps.into_iter().collect()
    }

    /// All tuples of the given arity over the index set, repetition allowed.
    pub fn tuples(&self, arity: usize) -> Vec<Vec<i64>> {
        if arity == 0 {
            return vec![Vec::new()];
        }
        (0..arity)
            .map(|_| self.indices.iter().copied())
            .multi_cartesian_product()
            .collect()
    }

    fn increasing_tuples(&self, arity: usize) -> Vec<Vec<i64>> {
        self.indices.iter().copied().combinations(arity).collect()
    }
}

/// A solution: `x` on all n-tuples over the index set, values canonical
/// in `[0, M)` with `M = lcm(I)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub x: BTreeMap<Vec<i64>, BigInt>,
    pub modulus: BigInt,
}

impl Solution {
    pub fn value(&self, t: &[i64]) -> BigInt {
        self.x.get(t).cloned().unwrap_or_else(BigInt::zero)
    }
}

/// Checks `sum_j (-1)^j a(t minus j) ≡ 0 (mod gcd t)` over all
/// (n+2)-tuples with repetition.
pub fn check_cocycle(inst: &CongruenceInstance) -> CheckReport {
    let mut violations = Vec::new();
    for t in inst.tuples(inst.degree + 2) {
        let g = BigInt::from(tuple_gcd(&t));
        let mut sum = BigInt::zero();
        for j in 0..t.len() {
            let mut sub = t.clone();
            sub.remove(j);
            let v = inst.value(&sub);
            if j % 2 == 0 {
                sum += v;
            } else {
                sum -= v;
            }
        }
        let residue = sum.mod_floor(&g);
        if !residue.is_zero() {
            violations.push(TupleViolation { tuple: t, modulus: g, residue });
        }
    }
    CheckReport { ok: violations.is_empty(), violations }
}

// The instance as a cochain over the full simplex on the index positions,
// with the gcd coefficient system.
fn instance_cochain(inst: &CongruenceInstance) -> (SimplicialComplex, CongruenceSystem, SysCochain) {
    let k = SimplicialComplex::full(inst.indices.len());
    let v = CongruenceSystem {
        family: SubgroupFamily::gcd_family(&inst.indices),
    };
    let mut a = SysCochain::zero(inst.degree);
    for t in inst.tuples(inst.degree + 1) {
        let val = inst.value(&t);
        if !val.is_zero() {
            let verts = t
                .iter()
                .map(|i| inst.indices.binary_search(i).unwrap())
                .collect();
            a.set(SingularSimplex { verts }, vec![val]);
        }
    }
    (k, v, a)
}

/// Subtracts a coboundary to make the data alternating: returns the
/// reduced data `a_alt` on strictly increasing (n+1)-tuples (canonical mod
/// each tuple's gcd) and the correction `c` on n-tuples with
/// `a - dc ≡ a_alt`'s alternating extension. The correction is the
/// transferred homotopy `h'` applied to `a`; for n = 1 it is zero.
#[allow(clippy::type_complexity)]
pub fn alternating_reduce(
    inst: &CongruenceInstance,
) -> Result<(BTreeMap<Vec<i64>, BigInt>, BTreeMap<Vec<i64>, BigInt>), SolverError> {
    let report = check_cocycle(inst);
    if !report.ok {
        return Err(SolverError::CocycleViolation(report.violations));
    }
    let n = inst.degree;
    assert!(n >= 1, "degree 0 has nothing to reduce");
    let (k, v, a) = instance_cochain(inst);
    let h = build_h(&k, n - 1);
    let c_sys = transfer(&v, &h.tables[n - 1], &a, n - 1);
    let dc = sys_coboundary(&k, &v, &c_sys);
    let label = |verts: &[usize]| -> Vec<i64> { verts.iter().map(|&p| inst.indices[p]).collect() };
    let mut a_alt = BTreeMap::new();
    for t in inst.increasing_tuples(n + 1) {
        let verts: Vec<usize> = t
            .iter()
            .map(|i| inst.indices.binary_search(i).unwrap())
            .collect();
        let s = SingularSimplex { verts };
        let g = BigInt::from(tuple_gcd(&t));
        let diff = inst.value(&t) - dc.value(&s, 1)[0].clone();
        let residue = diff.mod_floor(&g);
        if !residue.is_zero() {
            a_alt.insert(t, residue);
        }
    }
    let mut c = BTreeMap::new();
    for (s, val) in &c_sys.values {
        if !val[0].is_zero() {
            c.insert(label(&s.verts), val[0].clone());
        }
    }
    Ok((a_alt, c))
}

/// A localized system at a prime p: indices relabeled `1..=N` in ascending
/// order of valuation (ties by natural order), data on strictly increasing
/// tuples, the congruence for a tuple taken mod `p^{v(first entry)}` —
/// the moduli form a decreasing ideal chain.
#[derive(Clone, Debug)]
pub struct LocalInstance {
    pub p: i64,
    pub degree: usize,
    pub valuations: Vec<u32>,
    pub data: BTreeMap<Vec<usize>, BigInt>,
}

impl LocalInstance {
    /// Localizes alternating data on increasing global tuples at p: global
    /// indices are relabeled by ascending valuation and the data is
    /// transported with permutation signs.
    pub fn build(
        indices: &[i64],
        degree: usize,
        a_alt: &BTreeMap<Vec<i64>, BigInt>,
        p: i64,
    ) -> LocalInstance {
        let mut order: Vec<i64> = indices.to_vec();
        order.sort_by_key(|&i| (vp(i, p), i));
        let valuations: Vec<u32> = order.iter().map(|&i| vp(i, p)).collect();
        let n = order.len();
        let mut data = BTreeMap::new();
        for labels in (1..=n).combinations(degree + 1) {
            let global: Vec<i64> = labels.iter().map(|&k| order[k - 1]).collect();
            let (sorted, sign) = signed_sorted(&global).expect("distinct indices");
            let val = a_alt.get(&sorted).cloned().unwrap_or_else(BigInt::zero) * sign;
            let modulus = BigInt::from(p).pow(valuations[labels[0] - 1]);
            let residue = val.mod_floor(&modulus);
            if !residue.is_zero() {
                data.insert(labels, residue);
            }
        }
        LocalInstance { p, degree, valuations, data }
    }

    fn modulus_of(&self, first: usize) -> BigInt {
        BigInt::from(self.p).pow(self.valuations[first - 1])
    }

    fn value(&self, t: &[usize]) -> BigInt {
        self.data.get(t).cloned().unwrap_or_else(BigInt::zero)
    }

    fn increasing(&self, arity: usize) -> Vec<Vec<usize>> {
        (1..=self.valuations.len()).combinations(arity).collect()
    }
}

/// Solves the local system by induction on the first entry:
/// `x(1, i_2, ..., i_n) := 0`, and for `i_1 > 1`, with `i_0 := i_1 - 1`,
/// `x(i_1..i_n) := -sum_{j>=1} (-1)^j x(i_0, .., without j, .., i_n)
///                 + a(i_0, i_1, .., i_n)`.
/// Returns x on all strictly increasing n-tuples of local labels, reduced
/// mod `p^{max valuation}`.
pub fn local_solve(li: &LocalInstance) -> Result<BTreeMap<Vec<usize>, BigInt>, SolverError> {
    let n = li.degree;
    assert!(n >= 1, "the local induction starts at degree 1");
    // Cocycle pre-check over increasing (n+2)-tuples.
    let mut violations = Vec::new();
    for t in li.increasing(n + 2) {
        let mut sum = BigInt::zero();
        for j in 0..t.len() {
            let mut sub = t.clone();
            sub.remove(j);
            let v = li.value(&sub);
            if j % 2 == 0 {
                sum += v;
            } else {
                sum -= v;
            }
        }
        let modulus = li.modulus_of(t[0]);
        let residue = sum.mod_floor(&modulus);
        if !residue.is_zero() {
            violations.push(TupleViolation {
                tuple: t.iter().map(|&k| k as i64).collect(),
                modulus,
                residue,
            });
        }
    }
    if !violations.is_empty() {
        return Err(SolverError::CocycleViolation(violations));
    }
    let cap = BigInt::from(li.p).pow(*li.valuations.iter().max().unwrap_or(&0));
    let mut x: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
    // Tuples arrive in lexicographic order, hence by ascending first
    // entry; the recursion only looks at tuples with a smaller first entry.
    for t in li.increasing(n) {
        if t[0] == 1 {
            x.insert(t, BigInt::zero());
            continue;
        }
        let i0 = t[0] - 1;
        let mut full = Vec::with_capacity(n + 1);
        full.push(i0);
        full.extend_from_slice(&t);
        let mut val = li.value(&full);
        for j in 1..=n {
            let mut sub = full.clone();
            sub.remove(j);
            let prev = x.get(&sub).expect("smaller first entry already done");
            if j % 2 == 0 {
                val -= prev;
            } else {
                val += prev;
            }
        }
        x.insert(t, val.mod_floor(&cap));
    }
    Ok(x)
}

/// The full pipeline: cocycle check, alternating reduction, per-prime
/// local solve, CRT, alternating extension plus correction, verification.
pub fn solve(inst: &CongruenceInstance) -> Result<Solution, SolverError> {
    let report = check_cocycle(inst);
    if !report.ok {
        return Err(SolverError::CocycleViolation(report.violations));
    }
    let modulus = inst.lcm();
    let n = inst.degree;
    let sol = if n == 0 {
        // One unknown; x ≡ a(i) mod i is exactly a CRT problem.
        let congruences: Vec<Congruence> = inst
            .indices
            .iter()
            .map(|&i| Congruence::new(inst.value(&[i]), BigInt::from(i)))
            .collect();
        let folded = crt(&congruences).expect("cocycle check is pairwise compatibility");
        let mut x = BTreeMap::new();
        x.insert(Vec::new(), folded.residue);
        Solution { x, modulus }
    } else {
        let (a_alt, c) = alternating_reduce(inst)?;
        // Per-prime local solutions, transported back to global labels.
        let primes = inst.primes();
        let mut per_prime: Vec<(BigInt, BTreeMap<Vec<i64>, BigInt>)> = Vec::new();
        for &p in &primes {
            let li = LocalInstance::build(&inst.indices, n, &a_alt, p);
            let x_loc = local_solve(&li).expect("localization of a cocycle is a cocycle");
            let mut order: Vec<i64> = inst.indices.clone();
            order.sort_by_key(|&i| (vp(i, p), i));
            let label_of = |i: i64| order.iter().position(|&j| j == i).unwrap() + 1;
            let e_p = inst.indices.iter().map(|&i| vp(i, p)).max().unwrap();
            let cap = BigInt::from(p).pow(e_p);
            let mut x_p = BTreeMap::new();
            for u in inst.increasing_tuples(n) {
                let labels: Vec<usize> = u.iter().map(|&i| label_of(i)).collect();
                let (sorted, sign) = signed_sorted(&labels).expect("distinct labels");
                let val = x_loc.get(&sorted).expect("local solve covers all tuples") * sign;
                x_p.insert(u, val.mod_floor(&cap));
            }
            per_prime.push((cap, x_p));
        }
        // CRT per increasing tuple, then extend alternatingly and add the
        // correction on every n-tuple.
        let mut x_inc: BTreeMap<Vec<i64>, BigInt> = BTreeMap::new();
        for u in inst.increasing_tuples(n) {
            let congruences: Vec<Congruence> = per_prime
                .iter()
                .map(|(cap, x_p)| Congruence::new(x_p[&u].clone(), cap.clone()))
                .collect();
            let folded = crt(&congruences).expect("prime-power moduli are coprime");
            x_inc.insert(u, folded.residue);
        }
        let mut x = BTreeMap::new();
        for t in inst.tuples(n) {
            let alt = match signed_sorted(&t) {
                None => BigInt::zero(),
                Some((sorted, sign)) => x_inc[&sorted].clone() * sign,
            };
            let val = alt + c.get(&t).cloned().unwrap_or_else(BigInt::zero);
            x.insert(t, val.mod_floor(&modulus));
        }
        Solution { x, modulus }
    };
    let check = verify(inst, &sol);
    assert!(
        check.ok,
        "internal verification failed at {:?}",
        check.violations.first()
    );
    Ok(sol)
}

/// Exact check of every congruence of the instance, over all (n+1)-tuples
/// with repetition. Missing x entries read as 0.
pub fn verify(inst: &CongruenceInstance, sol: &Solution) -> CheckReport {
    let mut violations = Vec::new();
    for t in inst.tuples(inst.degree + 1) {
        let g = BigInt::from(tuple_gcd(&t));
        let mut sum = -inst.value(&t);
        for j in 0..t.len() {
            let mut sub = t.clone();
            sub.remove(j);
            let v = sol.value(&sub);
            if j % 2 == 0 {
                sum += v;
            } else {
                sum -= v;
            }
        }
        let residue = sum.mod_floor(&g);
        if !residue.is_zero() {
            violations.push(TupleViolation { tuple: t, modulus: g, residue });
        }
    }
    CheckReport { ok: violations.is_empty(), violations }
}

/// Exhaustive scan over `[0, M)^unknowns` (backtracking on the congruences
/// that are already fully determined). Independent of the pipeline; budget
/// `M^unknowns <= 10^6`.
pub fn brute_force_solve(inst: &CongruenceInstance) -> Result<Option<Solution>, SolverError> {
    brute_force_solve_with_budget(inst, 1_000_000f64)
}

/// `brute_force_solve` with an explicit bound on the number of candidate
/// assignments tried.
pub fn brute_force_solve_with_budget(
    inst: &CongruenceInstance,
    budget: f64,
) -> Result<Option<Solution>, SolverError> {
    let modulus = inst.lcm();
    let unknowns = inst.tuples(inst.degree);
    let m_f = modulus.to_f64().unwrap_or(f64::INFINITY);
    if m_f.powi(unknowns.len() as i32) > budget {
        let digits = (unknowns.len() as f64 * m_f.log10()).ceil() as u32;
        return Err(SolverError::SearchSpaceTooLarge(digits));
    }
    let m = modulus.to_u64().expect("within budget");
    let index_of: BTreeMap<&Vec<i64>, usize> =
        unknowns.iter().enumerate().map(|(i, u)| (u, i)).collect();
    // For each congruence, the unknowns involved and the latest one; a
    // congruence is checked as soon as its last unknown gets a value.
    struct Cong {
        subs: Vec<(usize, bool)>, // (unknown index, positive sign)
        rhs: BigInt,
        modulus: BigInt,
    }
    let mut by_last: Vec<Vec<Cong>> = (0..unknowns.len()).map(|_| Vec::new()).collect();
    for t in inst.tuples(inst.degree + 1) {
        let g = BigInt::from(tuple_gcd(&t));
        // A modulus-1 congruence always holds; skip it.
        if g.is_one() {
            continue;
        }
        let mut subs = Vec::with_capacity(t.len());
        for j in 0..t.len() {
            let mut sub = t.clone();
            sub.remove(j);
            subs.push((index_of[&sub], j % 2 == 0));
        }
        let last = subs.iter().map(|&(i, _)| i).max().unwrap();
        by_last[last].push(Cong { subs, rhs: inst.value(&t), modulus: g });
    }
    let mut assign = vec![0u64; unknowns.len()];
    let mut level = 0usize;
    let check_level = |assign: &[u64], level: usize| -> bool {
        by_last[level].iter().all(|c| {
            let mut sum = -c.rhs.clone();
            for &(i, pos) in &c.subs {
                if pos {
                    sum += assign[i];
                } else {
                    sum -= assign[i];
                }
            }
            sum.mod_floor(&c.modulus).is_zero()
        })
    };
    loop {
        if check_level(&assign, level) {
            if level + 1 == unknowns.len() {
                let x = unknowns
                    .iter()
                    .cloned()
                    .zip(assign.iter().map(|&v| BigInt::from(v)))
                    .collect();
                return Ok(Some(Solution { x, modulus }));
            }
            level += 1;
            assign[level] = 0;
            continue;
        }
        // Advance the current level; on overflow backtrack.
        loop {
            assign[level] += 1;
            if assign[level] < m {
                break;
            }
            if level == 0 {
                return Ok(None);
            }
            assign[level] = 0;
            level -= 1;
        }
    }
}

/// A random solvable instance: plants x* on all n-tuples, sets
/// `a := d(x*)` reduced mod each tuple's gcd, and returns the instance
/// with its witness.
pub fn plant(
    indices: impl IntoIterator<Item = i64>,
    degree: usize,
    rng: &mut impl Rng,
) -> (CongruenceInstance, Solution) {
    let set: BTreeSet<i64> = indices.into_iter().collect();
    let proto = CongruenceInstance::new(set.iter().copied(), degree, BTreeMap::new())
        .expect("valid index set");
    let modulus = proto.lcm();
    let mut x = BTreeMap::new();
    for t in proto.tuples(degree) {
        let v = BigInt::from(rng.gen_range(0..1_000_000_000i64)).mod_floor(&modulus);
        x.insert(t, v);
    }
    let witness = Solution { x, modulus };
    let mut data = BTreeMap::new();
    for t in proto.tuples(degree + 1) {
        let g = BigInt::from(tuple_gcd(&t));
        let mut sum = BigInt::zero();
        for j in 0..t.len() {
            let mut sub = t.clone();
            sub.remove(j);
            let v = witness.value(&sub);
            if j % 2 == 0 {
                sum += v;
            } else {
                sum -= v;
            }
        }
        let residue = sum.mod_floor(&g);
        if !residue.is_zero() {
            data.insert(t, residue);
        }
    }
    let inst = CongruenceInstance::new(set.iter().copied(), degree, data)
        .expect("planted data is valid");
    (inst, witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn inst(indices: &[i64], degree: usize, data: &[(&[i64], i64)]) -> CongruenceInstance {
        let map = data
            .iter()
            .map(|(t, v)| (t.to_vec(), bi(*v)))
            .collect();
        CongruenceInstance::new(indices.iter().copied(), degree, map).unwrap()
    }

    #[test]
    fn vp_and_saturate() {
        assert_eq!(vp(12, 2), 2);
        assert_eq!(vp(12, 5), 0);
        assert_eq!(vp(8, 2), 3);
        assert_eq!(saturate(12, 2), 4);
        assert_eq!(saturate(12, 5), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let m = rng.gen_range(1..100_000i64);
            for p in [2, 3, 5, 7, 11] {
                assert_eq!(saturate(saturate(m, p), p), saturate(m, p));
            }
        }
    }

    #[test]
    fn zero_data_is_a_cocycle() {
        let i = inst(&[2, 3, 4], 1, &[]);
        assert!(check_cocycle(&i).ok);
    }

    #[test]
    fn diagonal_violation_is_caught() {
        let i = inst(&[2], 1, &[(&[2, 2], 1)]);
        let report = check_cocycle(&i);
        assert!(!report.ok);
        assert_eq!(report.violations[0].tuple, vec![2, 2, 2]);
        assert_eq!(report.violations[0].modulus, bi(2));
    }

    #[test]
    fn planted_data_is_a_cocycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let count = rng.gen_range(1..=5usize);
            let indices: BTreeSet<i64> = (0..count).map(|_| rng.gen_range(1..=60i64)).collect();
            let n = rng.gen_range(1..=3usize);
            let (i, _) = plant(indices, n, &mut rng);
            assert!(check_cocycle(&i).ok);
        }
    }

    // Alternating law checker used by the reduction tests: a - dc must
    // vanish mod gcd on noninjective tuples and flip sign mod gcd under
    // transpositions.
    fn assert_alternating(i: &CongruenceInstance, c: &BTreeMap<Vec<i64>, BigInt>) {
        let n = i.degree();
        let dc = |t: &[i64]| -> BigInt {
            let mut sum = BigInt::zero();
            for j in 0..t.len() {
                let mut sub = t.to_vec();
                sub.remove(j);
                let v = c.get(&sub).cloned().unwrap_or_else(BigInt::zero);
                if j % 2 == 0 {
                    sum += v;
                } else {
                    sum -= v;
                }
            }
            sum
        };
        for t in i.tuples(n + 1) {
            let g = bi(tuple_gcd(&t));
            let alt = i.value(&t) - dc(&t);
            match signed_sorted(&t) {
                None => assert!(alt.mod_floor(&g).is_zero(), "repeat at {t:?}"),
                Some((sorted, sign)) => {
                    let alt_sorted = i.value(&sorted) - dc(&sorted);
                    let expect = alt_sorted * sign;
                    assert!(
                        (alt - expect).mod_floor(&g).is_zero(),
                        "sign law fails at {t:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn reduce_of_alternating_input_keeps_it_alternating() {
        // Increasing-tuple input is read by sign extension; postconditions
        // hold (indeed with c = 0 in degree 1).
        let i = inst(&[4, 6, 9], 1, &[(&[4, 6], 1), (&[4, 9], 1), (&[6, 9], 0)]);
        assert!(i.alternating_input());
        let (a_alt, c) = alternating_reduce(&i).unwrap();
        assert!(c.is_empty(), "degree 1 correction is h_0 = 0");
        assert_eq!(a_alt.get(&vec![4, 6]), Some(&bi(1)));
        assert_alternating(&i, &c);
    }

    #[test]
    fn reduce_kills_the_diagonal() {
        let i = inst(
            &[2, 4],
            1,
            &[(&[2, 2], 2), (&[2, 4], 1), (&[4, 2], -1), (&[4, 4], 0)],
        );
        let (a_alt, c) = alternating_reduce(&i).unwrap();
        assert_alternating(&i, &c);
        // (2,2) reduces to 0 mod 2 and disappears; (2,4) survives.
        assert_eq!(a_alt.get(&vec![2, 4]), Some(&bi(1)));
        assert_eq!(a_alt.len(), 1);
    }

    #[test]
    fn reduce_makes_planted_degree_two_data_alternating() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let (i, _) = plant([2i64, 4, 6], 2, &mut rng);
            let (_, c) = alternating_reduce(&i).unwrap();
            assert_alternating(&i, &c);
        }
    }

    #[test]
    fn local_solve_zero_data() {
        let li = LocalInstance {
            p: 2,
            degree: 1,
            valuations: vec![0, 1, 2],
            data: BTreeMap::new(),
        };
        let x = local_solve(&li).unwrap();
        assert!(x.values().all(Zero::is_zero));
    }

    #[test]
    fn local_solve_is_prefix_sums_in_degree_one() {
        // Plant x*, set a := dx*, solve, and compare the defining
        // congruences; the construction itself is x(k) = sum a(m, m+1).
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let valuations = vec![0u32, 1, 1, 3];
        let p = 3i64;
        let planted: Vec<BigInt> = (0..4).map(|_| bi(rng.gen_range(0..81))).collect();
        let mut data = BTreeMap::new();
        for pair in (1..=4usize).combinations(2) {
            let modulus = BigInt::from(p).pow(valuations[pair[0] - 1]);
            let diff = (&planted[pair[1] - 1] - &planted[pair[0] - 1]).mod_floor(&modulus);
            if !diff.is_zero() {
                data.insert(pair, diff);
            }
        }
        let li = LocalInstance { p, degree: 1, valuations, data };
        let x = local_solve(&li).unwrap();
        // dx ≡ a on every increasing pair.
        for pair in (1..=4usize).combinations(2) {
            let modulus = li.modulus_of(pair[0]);
            let got = (&x[&vec![pair[1]]] - &x[&vec![pair[0]]] - li.value(&pair))
                .mod_floor(&modulus);
            assert!(got.is_zero(), "pair {pair:?}");
        }
        // Prefix-sum shape.
        assert!(x[&vec![1]].is_zero());
        for k in 2..=4usize {
            let step = (&x[&vec![k]] - &x[&vec![k - 1]] - li.value(&[k - 1, k]))
                .mod_floor(&li.modulus_of(k - 1));
            assert!(step.is_zero());
        }
    }

    #[test]
    fn local_solve_degree_two_planted() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..10 {
            let p = 2i64;
            let valuations = vec![0u32, 1, 2, 2];
            let mut x_star = BTreeMap::new();
            for t in (1..=4usize).combinations(2) {
                x_star.insert(t, bi(rng.gen_range(0..16)));
            }
            let mut data = BTreeMap::new();
            for t in (1..=4usize).combinations(3) {
                let mut sum = BigInt::zero();
                for j in 0..3 {
                    let mut sub = t.clone();
                    sub.remove(j);
                    let v = &x_star[&sub];
                    if j % 2 == 0 {
                        sum += v;
                    } else {
                        sum -= v;
                    }
                }
                let modulus = BigInt::from(p).pow(valuations[t[0] - 1]);
                let residue = sum.mod_floor(&modulus);
                if !residue.is_zero() {
                    data.insert(t, residue);
                }
            }
            let li = LocalInstance { p, degree: 2, valuations, data };
            let x = local_solve(&li).unwrap();
            for t in (1..=4usize).combinations(3) {
                let mut sum = -li.value(&t);
                for j in 0..3 {
                    let mut sub = t.clone();
                    sub.remove(j);
                    let v = &x[&sub];
                    if j % 2 == 0 {
                        sum += v;
                    } else {
                        sum -= v;
                    }
                }
                assert!(sum.mod_floor(&li.modulus_of(t[0])).is_zero(), "{t:?}");
            }
        }
    }

    #[test]
    fn local_solve_rejects_non_cocycles() {
        // a(1,2) forced nonzero mod p^0 = 1 is impossible; use labels with
        // valuation on the diagonal instead: v = (1,1,1), a chosen so the
        // alternating sum over (1,2,3) is 1 mod 2.
        let mut data = BTreeMap::new();
        data.insert(vec![1, 2], bi(1));
        let li = LocalInstance {
            p: 2,
            degree: 1,
            valuations: vec![1, 1, 1],
            data,
        };
        assert!(matches!(
            local_solve(&li),
            Err(SolverError::CocycleViolation(_))
        ));
    }

    #[test]
    fn solve_zero_data() {
        let i = inst(&[4, 6], 1, &[]);
        let sol = solve(&i).unwrap();
        assert!(sol.x.values().all(Zero::is_zero));
        assert_eq!(sol.modulus, bi(12));
    }

    #[test]
    fn solve_the_frozen_pair() {
        // Planted from x(4)=1, x(6)=2: a(4,6) = 1.
        let i = inst(&[4, 6], 1, &[(&[4, 6], 1), (&[6, 4], -1)]);
        let sol = solve(&i).unwrap();
        assert!(verify(&i, &sol).ok);
        // x(6) - x(4) must be odd.
        let diff = (sol.value(&[6]) - sol.value(&[4])).mod_floor(&bi(2));
        assert_eq!(diff, bi(1));
    }

    #[test]
    fn solve_reports_violations() {
        let i = inst(&[2], 1, &[(&[2, 2], 1)]);
        match solve(&i) {
            Err(SolverError::CocycleViolation(v)) => {
                assert_eq!(v[0].tuple, vec![2, 2, 2]);
            }
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    #[test]
    fn solve_degree_zero_by_crt() {
        // x ≡ 1 mod 2, x ≡ 2 mod 3 -> x = 5 mod 6.
        let i = inst(&[2, 3], 0, &[(&[2], 1), (&[3], 2)]);
        let sol = solve(&i).unwrap();
        assert_eq!(sol.value(&[]), bi(5));
        // Incompatible residues violate the 2-tuple condition.
        let j = inst(&[2, 4], 0, &[(&[2], 1), (&[4], 2)]);
        assert!(matches!(solve(&j), Err(SolverError::CocycleViolation(_))));
    }

    #[test]
    fn verify_catches_perturbations() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let (i, _) = plant([2i64, 4, 6], 1, &mut rng);
        let mut sol = solve(&i).unwrap();
        // Perturb one unknown with an incident gcd > 1 by 1.
        let key = vec![4i64];
        let old = sol.x[&key].clone();
        sol.x.insert(key, (old + 1u8).mod_floor(&sol.modulus));
        let report = verify(&i, &sol);
        assert!(!report.ok);
        assert!(!report.violations.is_empty());
    }

    #[test]
    fn brute_force_agrees_on_small_instances() {
        // Coprime pair: everything that passes the self-pairs is solvable.
        let i = inst(&[2, 3], 1, &[(&[2, 3], 1), (&[3, 2], 1)]);
        assert!(check_cocycle(&i).ok);
        let b = brute_force_solve(&i).unwrap().expect("solvable");
        assert!(verify(&i, &b).ok);
        // Planted instance on {2,4}: both paths solve and verify.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let (j, _) = plant([2i64, 4], 1, &mut rng);
        let s = solve(&j).unwrap();
        assert!(verify(&j, &s).ok);
        let b = brute_force_solve(&j).unwrap().expect("solvable");
        assert!(verify(&j, &b).ok);
        // The diagonal violation is unsolvable by scan too.
        let k = inst(&[2], 1, &[(&[2, 2], 1)]);
        assert_eq!(brute_force_solve(&k).unwrap(), None);
    }

    #[test]
    fn brute_force_budget_is_enforced() {
        let i = inst(&[8, 9, 5, 7, 11, 13], 2, &[]);
        assert!(matches!(
            brute_force_solve(&i),
            Err(SolverError::SearchSpaceTooLarge(_))
        ));
    }

    #[test]
    fn soundness_on_random_planted_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..15 {
            let count = rng.gen_range(1..=4usize);
            let indices: BTreeSet<i64> = (0..count).map(|_| rng.gen_range(1..=60i64)).collect();
            let n = rng.gen_range(1..=2usize);
            let (i, _) = plant(indices, n, &mut rng);
            let sol = solve(&i).unwrap();
            assert!(verify(&i, &sol).ok);
        }
    }

    #[test]
    fn completeness_matches_brute_force_and_check() {
        // Random sparse data (not planted): solve succeeds iff brute force
        // finds a solution iff the cocycle check passes.
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let mut solvable = 0;
        let mut unsolvable = 0;
        for _ in 0..40 {
            let indices: Vec<i64> = vec![2, 4];
            let proto = CongruenceInstance::new(indices.iter().copied(), 1, BTreeMap::new())
                .unwrap();
            let mut data = BTreeMap::new();
            for t in proto.tuples(2) {
                let g = tuple_gcd(&t);
                let v = rng.gen_range(0..g.max(1));
                if v != 0 {
                    data.insert(t, bi(v));
                }
            }
            let i = CongruenceInstance::new(indices.iter().copied(), 1, data).unwrap();
            let checked = check_cocycle(&i).ok;
            let brute = brute_force_solve(&i).unwrap();
            let solved = solve(&i);
            assert_eq!(checked, brute.is_some());
            assert_eq!(checked, solved.is_ok());
            if checked {
                solvable += 1;
                assert!(verify(&i, &solved.unwrap()).ok);
            } else {
                unsolvable += 1;
            }
        }
        assert!(solvable > 0 && unsolvable > 0, "both outcomes exercised");
    }

    #[test]
    fn localization_consistency() {
        // The final solution reduced mod p^{E_p} solves the p-local system.
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let (i, _) = plant([2i64, 4, 6, 9], 1, &mut rng);
        let sol = solve(&i).unwrap();
        let (a_alt, c) = alternating_reduce(&i).unwrap();
        for p in i.primes() {
            let li = LocalInstance::build(i.indices(), 1, &a_alt, p);
            let mut order: Vec<i64> = i.indices().to_vec();
            order.sort_by_key(|&x| (vp(x, p), x));
            // x minus the correction, transported to local labels, must
            // satisfy every local congruence.
            let x_loc = |k: usize| -> BigInt {
                let g = order[k - 1];
                sol.value(&[g]) - c.get(&vec![g]).cloned().unwrap_or_else(BigInt::zero)
            };
            for pair in (1..=order.len()).combinations(2) {
                let modulus = BigInt::from(p).pow(li.valuations[pair[0] - 1]);
                let diff = (x_loc(pair[1]) - x_loc(pair[0]) - li.value(&pair))
                    .mod_floor(&modulus);
                assert!(diff.is_zero(), "prime {p}, pair {pair:?}");
            }
        }
    }

    #[test]
    fn index_one_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..10 {
            let indices: BTreeSet<i64> = (0..3).map(|_| rng.gen_range(2..=30i64)).collect();
            let proto = CongruenceInstance::new(indices.iter().copied(), 1, BTreeMap::new())
                .unwrap();
            let mut data = BTreeMap::new();
            for t in proto.tuples(2) {
                let g = tuple_gcd(&t);
                let v = rng.gen_range(0..g.max(1));
                if v != 0 {
                    data.insert(t, bi(v));
                }
            }
            let base = CongruenceInstance::new(indices.iter().copied(), 1, data.clone()).unwrap();
            let mut wider = indices.clone();
            wider.insert(1);
            let extended = CongruenceInstance::new(wider, 1, data).unwrap();
            assert_eq!(check_cocycle(&base).ok, check_cocycle(&extended).ok);
            assert_eq!(solve(&base).is_ok(), solve(&extended).is_ok());
        }
    }

    #[test]
    fn solving_is_deterministic_under_input_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let (i, _) = plant([6i64, 10, 15], 1, &mut rng);
        let reversed = CongruenceInstance::new(
            i.indices().iter().rev().copied(),
            1,
            i.data().clone(),
        )
        .unwrap();
        assert_eq!(solve(&i).unwrap(), solve(&reversed).unwrap());
    }

    #[test]
    fn check_agrees_with_the_cochain_complex() {
        // The cocycle condition here is the family complex's, over the
        // full tuple set.
        use crate::cochain::{FamilyComplex, FamilyCochain, TupleMode};
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..10 {
            let indices: Vec<i64> = vec![2, 4, 6];
            let proto =
                CongruenceInstance::new(indices.iter().copied(), 1, BTreeMap::new()).unwrap();
            let mut data = BTreeMap::new();
            for t in proto.tuples(2) {
                let v = rng.gen_range(-4..=4i64);
                if v != 0 {
                    data.insert(t, bi(v));
                }
            }
            let i = CongruenceInstance::new(indices.iter().copied(), 1, data).unwrap();
            let complex = FamilyComplex::new(SubgroupFamily::gcd_family(&indices), TupleMode::Full);
            let mut a = FamilyCochain::zero(1);
            for t in i.tuples(2) {
                let positions: Vec<usize> = t
                    .iter()
                    .map(|x| indices.iter().position(|y| y == x).unwrap())
                    .collect();
                a.set(positions, vec![i.value(&t)]);
            }
            assert_eq!(check_cocycle(&i).ok, complex.is_cocycle(&a).ok);
        }
    }
}
