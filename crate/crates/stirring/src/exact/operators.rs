//! Assembly of generators, Hamiltonians, the duality matrix, similarity
//! transforms, and stationary distributions on enumerated state spaces.
//!
//! The Hamiltonian route goes through the gl(N) matrices: the edge term is
//! `sum_AB (E_AB^x E_BA^y - E_BB^x E_AA^y)` and the site term is
//! `sum_AB alpha_A (E_AB^x - E_BB^x)`, summed with conductances and
//! couplings. The Markov generator is its transpose. An independent route
//! builds the generator from enumerated moves; tests hold the two equal.

use crate::dualsim::{self, DualConfiguration};
use crate::error::{Error, Result};
use crate::exact::lie::{exp_nilpotent, LieBasis};
use crate::exact::solve;
use crate::exact::space::{DualSpace, StateSpace};
use crate::exact::sparse::SparseOperator;
use crate::generator::enumerate_moves_exact;
use crate::lattice::{CorrelationQuery, ProcessSpec};
use crate::ratio::{self, Ratio, Scalar};

/// Kronecker product (row-major pairing: index `i1 * dim2 + i2`).
pub fn kron<T: Scalar>(a: &SparseOperator<T>, b: &SparseOperator<T>) -> SparseOperator<T> {
    let mut triplets = Vec::with_capacity(a.nnz() * b.nnz());
    for (ra, ca, va) in a.iter() {
        for (rb, cb, vb) in b.iter() {
            triplets.push((ra * b.n_rows() + rb, ca * b.n_cols() + cb, va.mul(vb)));
        }
    }
    SparseOperator::from_triplets(a.n_rows() * b.n_rows(), a.n_cols() * b.n_cols(), triplets)
}

/// Embeds a one-site operator at vertex `x` into the full space.
pub fn embed_one(
    local: &SparseOperator<Ratio>,
    x: usize,
    space: &StateSpace,
) -> SparseOperator<Ratio> {
    let mut triplets = Vec::new();
    for idx in 0..space.dim {
        let ranks = space.site_ranks(idx);
        for (r, v) in local_column(local, ranks[x]) {
            triplets.push((space.index_with(&ranks, &[(x, r)]), idx, v));
        }
    }
    SparseOperator::from_triplets(space.dim, space.dim, triplets)
}

/// Embeds a two-site operator (acting on `x` then `y`, row-major local
/// indexing) into the full space.
pub fn embed_two(
    local: &SparseOperator<Ratio>,
    x: usize,
    y: usize,
    space: &StateSpace,
) -> SparseOperator<Ratio> {
    let m = space.site_dim();
    let mut triplets = Vec::new();
    for idx in 0..space.dim {
        let ranks = space.site_ranks(idx);
        let col_local = ranks[x] * m + ranks[y];
        for (r, v) in local_column(local, col_local) {
            let (rx, ry) = (r / m, r % m);
            triplets.push((space.index_with(&ranks, &[(x, rx), (y, ry)]), idx, v));
        }
    }
    SparseOperator::from_triplets(space.dim, space.dim, triplets)
}

fn local_column(local: &SparseOperator<Ratio>, col: usize) -> Vec<(usize, Ratio)> {
    // Column extraction via transpose would be wasteful in a loop; the local
    // matrices are tiny so a scan is fine.
    local
        .iter()
        .filter(|(_, c, _)| *c == col)
        .map(|(r, _, v)| (r, v.clone()))
        .collect()
}

/// Two-site edge Hamiltonian `sum_AB (E_AB ox E_BA - E_BB ox E_AA)`.
pub fn edge_hamiltonian(basis: &LieBasis) -> SparseOperator<Ratio> {
    let m = basis.dim();
    let mut acc = SparseOperator::zero(m * m, m * m);
    for a in 0..basis.n_species {
        for b in 0..basis.n_species {
            acc = acc.add(&kron(basis.e(a, b), basis.e(b, a)));
            acc = acc.sub(&kron(basis.e(b, b), basis.e(a, a)));
        }
    }
    acc
}

/// One-site reservoir Hamiltonian `sum_AB alpha_A (E_AB - E_BB)`.
pub fn site_hamiltonian(basis: &LieBasis, alpha: &[Ratio]) -> SparseOperator<Ratio> {
    let m = basis.dim();
    let mut acc = SparseOperator::zero(m, m);
    for a in 0..basis.n_species {
        if alpha[a].is_zero() {
            continue;
        }
        for b in 0..basis.n_species {
            let term = basis.e(a, b).sub(basis.e(b, b)).scale(&alpha[a]);
            acc = acc.add(&term);
        }
    }
    acc
}

/// Full stochastic Hamiltonian `H = sum_edges omega H_xy + sum_r gamma H_x`.
/// Columns sum to zero; `H = L^T`.
pub fn build_hamiltonian(spec: &ProcessSpec, space: &StateSpace) -> Result<SparseOperator<Ratio>> {
    let basis = LieBasis::new(spec.capacity, spec.n_species)?;
    let edge_h = edge_hamiltonian(&basis);
    let mut acc = SparseOperator::zero(space.dim, space.dim);
    for (x, y, w) in &spec.graph.edges {
        if w.is_zero() {
            continue;
        }
        acc = acc.add(&embed_two(&edge_h, *x, *y, space).scale(w));
    }
    for r in &spec.reservoirs {
        if r.gamma.is_zero() {
            continue;
        }
        let site_h = site_hamiltonian(&basis, &r.alpha);
        acc = acc.add(&embed_one(&site_h, r.vertex, space).scale(&r.gamma));
    }
    acc.check_nnz(crate::exact::sparse::DEFAULT_NNZ_CAP)?;
    Ok(acc)
}

/// Markov generator `L = H^T` (entry `(n, n')` is the rate `n -> n'`).
pub fn build_generator(spec: &ProcessSpec, space: &StateSpace) -> Result<SparseOperator<Ratio>> {
    Ok(build_hamiltonian(spec, space)?.transpose())
}

/// Generator assembled directly from enumerated moves; an independent route
/// used to cross-check [`build_generator`].
pub fn generator_from_moves(spec: &ProcessSpec, space: &StateSpace) -> SparseOperator<Ratio> {
    let mut triplets = Vec::new();
    for idx in 0..space.dim {
        let config = space.config(idx);
        let mut diag = Ratio::zero();
        for (next, rate) in enumerate_moves_exact(spec, &config) {
            diag = &diag - &rate;
            triplets.push((idx, space.index(&next), rate));
        }
        if !diag.is_zero() {
            triplets.push((idx, idx, diag));
        }
    }
    SparseOperator::from_triplets(space.dim, space.dim, triplets)
}

/// Exact stationary distribution of an irreducible generator: the unique
/// normalized solution of `L^T pi = 0`, all entries positive.
pub fn stationary_rational(gen: &SparseOperator<Ratio>) -> Result<Vec<Ratio>> {
    check_irreducible(gen)?;
    let n = gen.n_rows();
    let lt = gen.transpose();
    // Balance equations with one row replaced by the normalization.
    let mut triplets: Vec<(usize, usize, Ratio)> = lt
        .iter()
        .filter(|(r, _, _)| *r != 0)
        .map(|(r, c, v)| (r, c, v.clone()))
        .collect();
    for c in 0..n {
        triplets.push((0, c, Ratio::one()));
    }
    let a = SparseOperator::from_triplets(n, n, triplets);
    let mut b = vec![Ratio::zero(); n];
    b[0] = Ratio::one();
    let pi = solve::solve_rational(&a, &b)?;
    if pi.iter().any(|p| !num::Signed::is_positive(p)) {
        return Err(Error::Singular(
            "stationary solve produced non-positive entries".into(),
        ));
    }
    debug_assert!(lt.apply(&pi).iter().all(|v| v.is_zero()));
    Ok(pi)
}

/// Float-mode stationary vector by inverse power iteration on `L^T`.
pub fn stationary_f64(gen: &SparseOperator<f64>) -> Result<Vec<f64>> {
    check_irreducible(gen)?;
    let v = solve::null_vector_f64(&gen.transpose())?;
    let total: f64 = v.iter().sum();
    if total == 0.0 {
        return Err(Error::Singular("null vector sums to zero".into()));
    }
    Ok(v.into_iter().map(|x| x / total).collect())
}

fn check_irreducible<T: Scalar>(gen: &SparseOperator<T>) -> Result<()> {
    let classes = solve::closed_classes(gen);
    let whole = classes.len() == 1 && classes[0].len() == gen.n_rows();
    if whole {
        return Ok(());
    }
    let summary: Vec<String> = classes
        .iter()
        .map(|c| {
            let head: Vec<String> = c.iter().take(4).map(|s| s.to_string()).collect();
            format!("[{}{}]", head.join(","), if c.len() > 4 { ",..." } else { "" })
        })
        .collect();
    Err(Error::Reducible(summary.join(" ")))
}

/// Expectation of `prod_k n_{a_k}^{x_k}` under a distribution on the space.
pub fn moment<T: Scalar>(
    space: &StateSpace,
    dist: &[T],
    query: &CorrelationQuery,
) -> T {
    let mut acc = T::zero();
    for (idx, weight) in dist.iter().enumerate() {
        if weight.is_zero() {
            continue;
        }
        let config = space.config(idx);
        let mut prod = 1u64;
        for (x, a) in query.sites.iter().zip(&query.species) {
            prod *= config.get(*x as usize - 1, *a as usize - 1) as u64;
        }
        if prod == 0 {
            continue;
        }
        acc = acc.add(&weight.mul(&T::from_ratio(&ratio::int(prod as i64))));
    }
    acc
}

// ---------------------------------------------------------------------------
// Duality matrix and intertwining
// ---------------------------------------------------------------------------

/// Duality matrix on `space x dual`: `D(n, xi)` from the scalar duality
/// function, extra-site factors included.
pub fn build_duality_matrix(
    spec: &ProcessSpec,
    space: &StateSpace,
    dual: &DualSpace,
) -> SparseOperator<Ratio> {
    let mut triplets = Vec::new();
    for col in 0..dual.dim() {
        let (bulk_idx, extra) = dual.state(col);
        let xi = DualConfiguration {
            bulk: dual.bulk.config(bulk_idx),
            extra: dualsim::extra_from_flat(spec, extra),
        };
        for row in 0..space.dim {
            let n = space.config(row);
            let v = dualsim::duality_value(spec, &n, &xi);
            if !v.is_zero() {
                triplets.push((row, col, v));
            }
        }
    }
    SparseOperator::from_triplets(space.dim, dual.dim(), triplets)
}

/// Dual generator on the truncated sector, from enumerated dual moves. The
/// sector `bulk + absorbed <= cap` is closed under the dual dynamics, so
/// every row is complete.
pub fn build_dual_generator(spec: &ProcessSpec, dual: &DualSpace) -> SparseOperator<Ratio> {
    let mut triplets = Vec::new();
    for idx in 0..dual.dim() {
        let (bulk_idx, extra) = dual.state(idx);
        let xi = DualConfiguration {
            bulk: dual.bulk.config(bulk_idx),
            extra: dualsim::extra_from_flat(spec, extra),
        };
        let mut diag = Ratio::zero();
        for (next, rate) in dualsim::enumerate_dual_moves_exact(spec, &xi) {
            let bulk_next = dual.bulk.index(&next.bulk);
            let flat = dualsim::extra_to_flat(&next.extra);
            let col = dual
                .index(bulk_next, &flat)
                .expect("dual sector is closed under dual moves");
            diag = &diag - &rate;
            triplets.push((idx, col, rate));
        }
        if !diag.is_zero() {
            triplets.push((idx, idx, diag));
        }
    }
    SparseOperator::from_triplets(dual.dim(), dual.dim(), triplets)
}

/// Largest absolute entry of `L D - D Ltilde^T` on the dual sector with at
/// most `cap` particles. Exactly zero certifies the duality intertwining.
pub fn intertwining_residual(spec: &ProcessSpec, cap: u32) -> Result<Ratio> {
    let space = StateSpace::for_spec(spec)?;
    let dual = DualSpace::new(spec, cap)?;
    let gen = build_generator(spec, &space)?;
    let d = build_duality_matrix(spec, &space, &dual);
    let dual_gen = build_dual_generator(spec, &dual);
    let lhs = gen.matmul(&d);
    let rhs = d.matmul(&dual_gen.transpose());
    let residual = lhs.sub(&rhs);
    let mut max = Ratio::zero();
    for (_, _, v) in residual.iter() {
        let a = num::Signed::abs(v);
        if a > max {
            max = a;
        }
    }
    Ok(max)
}

// ---------------------------------------------------------------------------
// Similarity transforms
// ---------------------------------------------------------------------------

/// Product over sites of a one-site invertible map.
fn product_over_sites(site: &SparseOperator<Ratio>, space: &StateSpace) -> SparseOperator<Ratio> {
    let mut acc = SparseOperator::identity(space.dim);
    for x in 0..space.n_sites {
        acc = acc.matmul(&embed_one(site, x, space));
    }
    acc
}

/// `S1 = prod_x exp(sum_a E_Na^x)` and its inverse.
pub fn build_s1(
    spec: &ProcessSpec,
    space: &StateSpace,
) -> Result<(SparseOperator<Ratio>, SparseOperator<Ratio>)> {
    let basis = LieBasis::new(spec.capacity, spec.n_species)?;
    let gen = basis.lower_sum();
    let fwd = exp_nilpotent(&gen);
    let inv = exp_nilpotent(&gen.scale(&ratio::int(-1)));
    Ok((
        product_over_sites(&fwd, space),
        product_over_sites(&inv, space),
    ))
}

/// `S2 = prod_x exp(-sum_a beta_a E_aN^x)` for a two-reservoir chain, with
/// its inverse. Uses the right-boundary rates.
pub fn build_s2(
    spec: &ProcessSpec,
    space: &StateSpace,
) -> Result<(SparseOperator<Ratio>, SparseOperator<Ratio>)> {
    let (_, right) = spec
        .chain_boundaries()
        .ok_or_else(|| Error::Unsupported("S2 is defined for two-reservoir chains".into()))?;
    let beta = right.alpha.clone();
    let basis = LieBasis::new(spec.capacity, spec.n_species)?;
    let m = basis.dim();
    let hole = spec.n_species - 1;
    let mut gen = SparseOperator::zero(m, m);
    for a in 0..spec.n_species - 1 {
        gen = gen.add(&basis.e(a, hole).scale(&beta[a]));
    }
    let fwd = exp_nilpotent(&gen.scale(&ratio::int(-1)));
    let inv = exp_nilpotent(&gen);
    Ok((
        product_over_sites(&fwd, space),
        product_over_sites(&inv, space),
    ))
}

/// Conjugation `S H S^{-1}`.
pub fn transform(
    h: &SparseOperator<Ratio>,
    s: &SparseOperator<Ratio>,
    s_inv: &SparseOperator<Ratio>,
) -> SparseOperator<Ratio> {
    s.matmul(h).matmul(s_inv)
}
