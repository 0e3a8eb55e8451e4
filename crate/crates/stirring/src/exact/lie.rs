//! gl(N) generators in the symmetric representation of weight `nu`, plus the
//! exponentials used by the duality matrix and the similarity transforms.
//!
//! Matrices act on the single-site space enumerated by [`StateSpace`]'s
//! lexicographic site order. Conventions: `E_AB |n> = n_B |n + d_A - d_B>`
//! for `A != B`, and `E_AA` is diagonal with entry `n_A`. Species indices
//! here are 0-based with the hole at `N - 1`.

use crate::error::Result;
use crate::exact::space::StateSpace;
use crate::exact::sparse::SparseOperator;
use crate::ratio::{self, Ratio};

/// All `E_AB` matrices for one `(nu, N)` pair.
#[derive(Debug, Clone)]
pub struct LieBasis {
    pub capacity: u32,
    pub n_species: usize,
    site: StateSpace,
    e: Vec<SparseOperator<Ratio>>,
}

impl LieBasis {
    pub fn new(capacity: u32, n_species: usize) -> Result<Self> {
        let site = StateSpace::new(1, capacity, n_species)?;
        let m = site.site_dim();
        let mut e = Vec::with_capacity(n_species * n_species);
        for a in 0..n_species {
            for b in 0..n_species {
                let mut triplets = Vec::new();
                for j in 0..m {
                    let state = site.site_state(j);
                    if a == b {
                        if state[a] > 0 {
                            triplets.push((j, j, ratio::int(state[a] as i64)));
                        }
                    } else if state[b] > 0 {
                        let mut next = state.to_vec();
                        next[a] += 1;
                        next[b] -= 1;
                        let i = site.site_state_rank(&next);
                        triplets.push((i, j, ratio::int(state[b] as i64)));
                    }
                }
                e.push(SparseOperator::from_triplets(m, m, triplets));
            }
        }
        Ok(LieBasis {
            capacity,
            n_species,
            site,
            e,
        })
    }

    /// Single-site matrix dimension `M_nu`.
    pub fn dim(&self) -> usize {
        self.site.site_dim()
    }

    /// `E_AB` with 0-based indices (`N - 1` is the hole).
    pub fn e(&self, a: usize, b: usize) -> &SparseOperator<Ratio> {
        &self.e[a * self.n_species + b]
    }

    /// Quadratic Casimir `C = sum_AB E_AB E_BA` (acts as `nu(nu + N) I`).
    pub fn casimir(&self) -> SparseOperator<Ratio> {
        let m = self.dim();
        let mut acc = SparseOperator::zero(m, m);
        for a in 0..self.n_species {
            for b in 0..self.n_species {
                acc = acc.add(&self.e(a, b).matmul(self.e(b, a)));
            }
        }
        acc
    }

    /// Casimir eigenvalue `nu (nu + N)`.
    pub fn casimir_eigenvalue(&self) -> Ratio {
        ratio::int(self.capacity as i64 * (self.capacity as i64 + self.n_species as i64))
    }

    /// `sum_a E_aN`: lowers one hole into each species in turn (nilpotent).
    pub fn raise_sum(&self) -> SparseOperator<Ratio> {
        let m = self.dim();
        let mut acc = SparseOperator::zero(m, m);
        let hole = self.n_species - 1;
        for a in 0..self.n_species - 1 {
            acc = acc.add(self.e(a, hole));
        }
        acc
    }

    /// `sum_a E_Na`: turns one particle of each species into a hole.
    pub fn lower_sum(&self) -> SparseOperator<Ratio> {
        let m = self.dim();
        let mut acc = SparseOperator::zero(m, m);
        let hole = self.n_species - 1;
        for a in 0..self.n_species - 1 {
            acc = acc.add(self.e(hole, a));
        }
        acc
    }

    /// Diagonal reversibility matrix `R` with entries `prod_A n_A! / nu!`.
    pub fn r_diagonal(&self) -> SparseOperator<Ratio> {
        let m = self.dim();
        let nu_fact = ratio::factorial(self.capacity);
        let triplets = (0..m)
            .map(|j| {
                let state = self.site.site_state(j);
                let mut num = num::BigInt::from(1u32);
                for &c in state {
                    num *= ratio::factorial(c);
                }
                (j, j, Ratio::new(num, nu_fact.clone()))
            })
            .collect();
        SparseOperator::from_triplets(m, m, triplets)
    }

    /// Inverse of [`LieBasis::r_diagonal`].
    pub fn r_diagonal_inv(&self) -> SparseOperator<Ratio> {
        let r = self.r_diagonal();
        let triplets = r
            .iter()
            .map(|(i, j, v)| (i, j, Ratio::new(v.denom().clone(), v.numer().clone())))
            .collect();
        SparseOperator::from_triplets(r.n_rows(), r.n_cols(), triplets)
    }
}

/// Exact exponential of a nilpotent matrix (errors are impossible for the
/// raising/lowering sums used here; panics if the series fails to terminate).
pub fn exp_nilpotent(op: &SparseOperator<Ratio>) -> SparseOperator<Ratio> {
    let n = op.n_rows();
    let mut result = SparseOperator::identity(n);
    let mut power = SparseOperator::identity(n);
    for k in 1..=n + 1 {
        power = power.matmul(op);
        if power.is_zero() {
            return result;
        }
        let coeff = Ratio::new(1.into(), ratio::factorial(k as u32));
        result = result.add(&power.scale(&coeff));
    }
    panic!("matrix is not nilpotent within dimension bound");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::int;

    #[test]
    fn fundamental_representation_is_elementary() {
        // nu = 1: E_AB have a single unit entry, (e_AB)_CD = d_AC d_BD.
        let basis = LieBasis::new(1, 3).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let e = basis.e(a, b);
                // Site states for nu=1 in lex order are (0,0,1),(0,1,0),(1,0,0):
                // rank of the state with a particle in slot s is 2 - s.
                assert_eq!(e.nnz(), 1);
                assert_eq!(e.get(2 - a, 2 - b), int(1));
            }
        }
    }

    #[test]
    fn weight_two_diagonal() {
        let basis = LieBasis::new(2, 2).unwrap();
        // States in lex order: (0,2), (1,1), (2,0); E_11 counts species 1.
        let e11 = basis.e(0, 0);
        assert_eq!(e11.get(0, 0), int(0));
        assert_eq!(e11.get(1, 1), int(1));
        assert_eq!(e11.get(2, 2), int(2));
    }

    #[test]
    fn commutators_hold_exactly() {
        // [E_AB, E_CD] = E_AD d_CB - E_CB d_AD for nu <= 3, N <= 4.
        for nu in 1..=3u32 {
            for n in 2..=4usize
            {
                let basis = LieBasis::new(nu, n).unwrap();
                let m = basis.dim();
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            for d in 0..n {
                                let lhs = basis
                                    .e(a, b)
                                    .matmul(basis.e(c, d))
                                    .sub(&basis.e(c, d).matmul(basis.e(a, b)));
                                let mut rhs = SparseOperator::zero(m, m);
                                if c == b {
                                    rhs = rhs.add(basis.e(a, d));
                                }
                                if a == d {
                                    rhs = rhs.sub(basis.e(c, b));
                                }
                                assert!(lhs.sub(&rhs).is_zero(), "nu={nu} N={n} [{a}{b},{c}{d}]");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn casimir_is_central_scalar() {
        for (nu, n, expect) in [(1u32, 2usize, 3i64), (2, 3, 10), (2, 2, 8), (3, 4, 21)] {
            let basis = LieBasis::new(nu, n).unwrap();
            let c = basis.casimir();
            let id = SparseOperator::identity(basis.dim());
            assert!(c.sub(&id.scale(&int(expect))).is_zero(), "nu={nu} N={n}");
            for a in 0..n {
                for b in 0..n {
                    let comm = c.matmul(basis.e(a, b)).sub(&basis.e(a, b).matmul(&c));
                    assert!(comm.is_zero());
                }
            }
        }
    }

    #[test]
    fn transposition_through_r() {
        // E_BA^T = R E_AB R^{-1}.
        for (nu, n) in [(1u32, 3usize), (2, 3), (3, 2)] {
            let basis = LieBasis::new(nu, n).unwrap();
            let r = basis.r_diagonal();
            let r_inv = basis.r_diagonal_inv();
            for a in 0..n {
                for b in 0..n {
                    let lhs = basis.e(b, a).transpose();
                    let rhs = r.matmul(basis.e(a, b)).matmul(&r_inv);
                    assert!(lhs.sub(&rhs).is_zero(), "nu={nu} N={n} E_{a}{b}");
                }
            }
        }
    }

    #[test]
    fn hadamard_conjugation_identity() {
        // exp(-sum_a E_aN) E_CD exp(sum_a E_aN) =
        //   E_CD - d_CN sum_a E_aD + (1 - d_DN) E_CN - d_CN (1 - d_DN) sum_b E_bN
        for nu in 1..=2u32 {
            for n in 2..=4usize {
                let basis = LieBasis::new(nu, n).unwrap();
                let m = basis.dim();
                let hole = n - 1;
                let e_sum = basis.raise_sum();
                let pos = exp_nilpotent(&e_sum);
                let neg = exp_nilpotent(&e_sum.scale(&int(-1)));
                for c in 0..n {
                    for d in 0..n {
                        let lhs = neg.matmul(basis.e(c, d)).matmul(&pos);
                        let mut rhs = basis.e(c, d).clone();
                        if c == hole {
                            for a in 0..n - 1 {
                                rhs = rhs.sub(basis.e(a, d));
                            }
                        }
                        if d != hole {
                            rhs = rhs.add(basis.e(c, hole));
                        }
                        if c == hole && d != hole {
                            let mut sum = SparseOperator::zero(m, m);
                            for b in 0..n - 1 {
                                sum = sum.add(basis.e(b, hole));
                            }
                            rhs = rhs.sub(&sum);
                        }
                        assert!(lhs.sub(&rhs).is_zero(), "nu={nu} N={n} C={c} D={d}");
                    }
                }
            }
        }
    }

    #[test]
    fn exponentials_are_inverse_pairs() {
        let basis = LieBasis::new(2, 3).unwrap();
        let e = basis.raise_sum();
        let id = SparseOperator::identity(basis.dim());
        let prod = exp_nilpotent(&e).matmul(&exp_nilpotent(&e.scale(&int(-1))));
        assert!(prod.sub(&id).is_zero());
    }
}
