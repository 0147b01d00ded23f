//! Cohomology of complexes of finitely presented abelian groups. Terms are
//! `Z^f / L` for a relation lattice L, differentials are given by free
//! lifts; kernels and images are lattices in the free cover, and the
//! subquotient is read off by re-expressing the image in a basis of the
//! kernel lattice.

use crate::abgroup::{FPGroup, GroupInvariants};
use crate::intlin::{self, IntMatrix};
use num_bigint::BigInt;

/// `span(columns of basis) / span(columns of rel)` presented on the basis:
/// `rel` holds the image columns rewritten in `basis` coordinates.
pub struct Subquotient {
    pub basis: IntMatrix,
    pub rel: IntMatrix,
}

impl Subquotient {
    pub fn invariants(&self) -> GroupInvariants {
        FPGroup::new(self.basis.cols(), self.rel.clone()).invariants()
    }

    /// Ambient coordinates of the class `basis * v`.
    pub fn lift(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.basis.mul_vec(v)
    }
}

/// Kernel-mod-image of one stretch `T_prev -> T_n -> T_next` where
/// `T_n = Z^f / span(rel_n)` etc., `d_n` and `d_prev` are free lifts, and
/// the complex is exact as lifted data: `d_n * d_prev == 0` and each lift
/// maps relation lattices into relation lattices.
///
/// The kernel of the induced map on quotients is the projection to the
/// first `f` coordinates of `ker [d_n | rel_next]`; the image lattice is
/// spanned by `[d_prev | rel_n]`. Passing `d_prev = None` computes plain
/// `ker d_n / relations` (degree zero, no augmentation).
pub fn kernel_mod_image(
    d_n: &IntMatrix,
    rel_n: &IntMatrix,
    rel_next: &IntMatrix,
    d_prev: Option<&IntMatrix>,
) -> Subquotient {
    let f = d_n.cols();
    assert_eq!(rel_n.rows(), f, "relation/domain mismatch");
    assert_eq!(rel_next.rows(), d_n.rows(), "relation/codomain mismatch");
    let ker = intlin::kernel_basis(&d_n.hstack(rel_next));
    let k_gens = ker.row_slice(0, f);
    let basis = intlin::column_hnf(&k_gens);
    let b_gens = match d_prev {
        Some(dp) => {
            assert_eq!(dp.rows(), f, "lift/domain mismatch");
            dp.hstack(rel_n)
        }
        None => rel_n.clone(),
    };
    let mut w_cols = Vec::with_capacity(b_gens.cols());
    for j in 0..b_gens.cols() {
        let col = b_gens.col(j);
        let w = intlin::solve_linear(&basis, &col)
            .expect("image lattice must lie inside the kernel lattice");
        w_cols.push(w);
    }
    Subquotient {
        rel: IntMatrix::from_cols(basis.cols(), &w_cols),
        basis,
    }
}

pub fn cohomology_invariants(
    d_n: &IntMatrix,
    rel_n: &IntMatrix,
    rel_next: &IntMatrix,
    d_prev: Option<&IntMatrix>,
) -> GroupInvariants {
    kernel_mod_image(d_n, rel_n, rel_next, d_prev).invariants()
}
