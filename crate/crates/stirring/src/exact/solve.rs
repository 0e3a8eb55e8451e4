//! Linear solvers backing the exact machinery.
//!
//! Rational systems are solved by dense Gaussian elimination with full
//! pivoting when small. Larger systems (stationary vectors on a few thousand
//! states) go through Dixon p-adic lifting: one LU factorization modulo a
//! 62-bit prime, O(size of answer) lifting passes, rational reconstruction,
//! and a final exact verification against the original rational system.
//! Float mode uses partial-pivot LU and inverse power iteration.

use num::bigint::Sign;
use num::integer::Roots;
use num::{BigInt, Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::sparse::SparseOperator;
use crate::ratio::Ratio;

/// Above this dimension rational systems switch from dense Gaussian
/// elimination to Dixon lifting.
const DENSE_RATIONAL_LIMIT: usize = 96;

/// Solves `a x = b` exactly.
pub fn solve_rational(a: &SparseOperator<Ratio>, b: &[Ratio]) -> Result<Vec<Ratio>> {
    assert_eq!(a.n_rows(), a.n_cols(), "square system required");
    assert_eq!(a.n_rows(), b.len());
    if a.n_rows() <= DENSE_RATIONAL_LIMIT {
        return lu_solve_rational(a.to_dense(), b.to_vec());
    }
    match dixon_solve(a, b) {
        Ok(x) => Ok(x),
        Err(Error::Singular(m)) => Err(Error::Singular(m)),
        // Lifting failure without a singularity certificate: fall back.
        Err(_) => lu_solve_rational(a.to_dense(), b.to_vec()),
    }
}

/// Dense Gaussian elimination with full pivoting over the rationals.
pub fn lu_solve_rational(mut a: Vec<Vec<Ratio>>, mut b: Vec<Ratio>) -> Result<Vec<Ratio>> {
    let n = a.len();
    let mut col_of = (0..n).collect::<Vec<_>>();
    for k in 0..n {
        // Full pivot: any nonzero entry in the remaining block, preferring
        // small representations to slow entry growth.
        let mut pivot: Option<(usize, usize)> = None;
        let mut best = usize::MAX;
        for i in k..n {
            for j in k..n {
                if !a[i][j].is_zero() {
                    let size = a[i][j].numer().bits() as usize + a[i][j].denom().bits() as usize;
                    if size < best {
                        best = size;
                        pivot = Some((i, j));
                    }
                }
            }
        }
        let (pi, pj) = pivot.ok_or_else(|| {
            Error::Singular(format!("rank deficiency at elimination step {k}"))
        })?;
        a.swap(k, pi);
        b.swap(k, pi);
        if pj != k {
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            col_of.swap(k, pj);
        }
        let inv = a[k][k].recip();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] * &inv;
            for j in k..n {
                let sub = &factor * &a[k][j];
                a[i][j] -= sub;
            }
            let sub = &factor * &b[k];
            b[i] -= sub;
        }
    }
    let mut x = vec![Ratio::zero(); n];
    for k in (0..n).rev() {
        let mut acc = b[k].clone();
        for j in k + 1..n {
            acc -= &a[k][j] * &x[j];
        }
        x[k] = acc / &a[k][k];
    }
    // Undo column permutation.
    let mut out = vec![Ratio::zero(); n];
    for (k, &c) in col_of.iter().enumerate() {
        out[c] = x[k].clone();
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Dixon p-adic lifting
// ---------------------------------------------------------------------------

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn primes_below(mut start: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if is_prime(start) {
            out.push(start);
        }
        start -= 1;
    }
    out
}

/// Dense LU factorization modulo a prime, partial pivoting.
struct ModLu {
    p: u64,
    n: usize,
    data: Vec<u64>,
    perm: Vec<usize>,
    pivot_inv: Vec<u64>,
}

impl ModLu {
    fn factor(mut data: Vec<u64>, n: usize, p: u64) -> Option<Self> {
        let mut perm = Vec::with_capacity(n);
        let mut pivot_inv = vec![0u64; n];
        for k in 0..n {
            let pivot_row = (k..n).find(|&i| data[i * n + k] != 0)?;
            if pivot_row != k {
                for j in 0..n {
                    data.swap(k * n + j, pivot_row * n + j);
                }
            }
            perm.push(pivot_row);
            let inv = invmod(data[k * n + k], p);
            pivot_inv[k] = inv;
            for i in k + 1..n {
                let f = mulmod(data[i * n + k], inv, p);
                data[i * n + k] = f;
                if f != 0 {
                    for j in k + 1..n {
                        let sub = mulmod(f, data[k * n + j], p);
                        let cur = data[i * n + j];
                        data[i * n + j] = if cur >= sub { cur - sub } else { cur + p - sub };
                    }
                }
            }
        }
        Some(ModLu {
            p,
            n,
            data,
            perm,
            pivot_inv,
        })
    }

    fn solve(&self, rhs: &[u64]) -> Vec<u64> {
        let (n, p) = (self.n, self.p);
        let mut b = rhs.to_vec();
        for (k, &pr) in self.perm.iter().enumerate() {
            b.swap(k, pr);
        }
        for i in 0..n {
            let mut acc = b[i];
            for j in 0..i {
                let sub = mulmod(self.data[i * n + j], b[j], p);
                acc = if acc >= sub { acc - sub } else { acc + p - sub };
            }
            b[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..n {
                let sub = mulmod(self.data[i * n + j], b[j], p);
                acc = if acc >= sub { acc - sub } else { acc + p - sub };
            }
            b[i] = mulmod(acc, self.pivot_inv[i], p);
        }
        b
    }
}

fn bigint_mod_u64(x: &BigInt, p: &BigInt) -> u64 {
    use num::ToPrimitive;
    x.mod_floor(p).to_u64().unwrap()
}

/// Rational reconstruction of `u (mod m)`: finds `n/d` with
/// `|n|, d <= sqrt(m/2)` and `n = u d (mod m)`.
fn rational_reconstruct(u: &BigInt, m: &BigInt) -> Option<Ratio> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.magnitude() > bound.magnitude() {
        return None;
    }
    let (num, den) = if t1.sign() == Sign::Minus {
        (-r1, -t1)
    } else {
        (r1, t1)
    };
    if den.is_zero() {
        return None;
    }
    Some(Ratio::new(num, den))
}

/// Exact solve by p-adic lifting. Errors with `Singular` only if the matrix
/// looks singular modulo several primes (the caller re-checks exactly).
pub fn dixon_solve(a: &SparseOperator<Ratio>, b: &[Ratio]) -> Result<Vec<Ratio>> {
    let n = a.n_rows();
    // Clear denominators: common multiple over all entries.
    let mut scale = BigInt::one();
    for (_, _, v) in a.iter() {
        scale = scale.lcm(v.denom());
    }
    for v in b {
        scale = scale.lcm(v.denom());
    }
    let int_of = |v: &Ratio| -> BigInt { v.numer() * (&scale / v.denom()) };
    let rows: Vec<Vec<(usize, BigInt)>> = (0..n)
        .map(|r| a.row(r).map(|(c, v)| (c, int_of(v))).collect())
        .collect();
    let b_int: Vec<BigInt> = b.iter().map(int_of).collect();

    let mut lu = None;
    let mut chosen_p = 0u64;
    for p in primes_below((1u64 << 62) - 1, 5) {
        let p_big = BigInt::from(p);
        let mut dense = vec![0u64; n * n];
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row {
                dense[r * n + c] = bigint_mod_u64(v, &p_big);
            }
        }
        if let Some(f) = ModLu::factor(dense, n, p) {
            lu = Some(f);
            chosen_p = p;
            break;
        }
    }
    let lu = lu.ok_or_else(|| Error::Singular("matrix singular modulo five primes".into()))?;
    let p_big = BigInt::from(chosen_p);

    // Worst-case digit count from a Hadamard-style bound, plus slack.
    let max_bits = rows
        .iter()
        .flatten()
        .map(|(_, v)| v.bits())
        .chain(b_int.iter().map(|v| v.bits()))
        .max()
        .unwrap_or(1);
    let max_steps = (2 * (n as u64) * (max_bits + 64) / 61 + 16) as usize;

    let mut digits: Vec<Vec<u64>> = Vec::new();
    let mut residual = b_int;
    for step in 0..max_steps {
        let rk: Vec<u64> = residual.iter().map(|v| bigint_mod_u64(v, &p_big)).collect();
        let y = lu.solve(&rk);
        digits.push(y.clone());
        for (r, row) in rows.iter().enumerate() {
            let mut acc = residual[r].clone();
            for (c, v) in row {
                acc -= v * BigInt::from(y[*c]);
            }
            debug_assert!((&acc % &p_big).is_zero());
            residual[r] = acc / &p_big;
        }
        let done = residual.iter().all(|v| v.is_zero());
        if done || (step >= 4 && step % 4 == 0) {
            if let Some(x) = try_reconstruct(&digits, &p_big, a, b) {
                return Ok(x);
            }
            if done {
                // Exact integer solution of the scaled system.
                let modulus = p_big.pow(digits.len() as u32);
                let half = &modulus / 2u32;
                let x: Vec<Ratio> = assemble(&digits, &p_big)
                    .into_iter()
                    .map(|v| {
                        let v = if v > half { v - &modulus } else { v };
                        Ratio::from_integer(v)
                    })
                    .collect();
                if verify(a, &x, b) {
                    return Ok(x);
                }
            }
        }
    }
    Err(Error::TooLarge(
        "p-adic lifting did not converge within the digit budget".into(),
    ))
}

/// Horner assembly of the p-adic digit vectors into integers mod p^k.
fn assemble(digits: &[Vec<u64>], p: &BigInt) -> Vec<BigInt> {
    let n = digits[0].len();
    let mut out = vec![BigInt::zero(); n];
    for layer in digits.iter().rev() {
        for (acc, &d) in out.iter_mut().zip(layer) {
            *acc = &*acc * p + BigInt::from(d);
        }
    }
    out
}

fn try_reconstruct(
    digits: &[Vec<u64>],
    p: &BigInt,
    a: &SparseOperator<Ratio>,
    b: &[Ratio],
) -> Option<Vec<Ratio>> {
    let modulus = p.pow(digits.len() as u32);
    let assembled = assemble(digits, p);
    let mut x = Vec::with_capacity(assembled.len());
    for v in &assembled {
        x.push(rational_reconstruct(v, &modulus)?);
    }
    if verify(a, &x, b) {
        Some(x)
    } else {
        None
    }
}

fn verify(a: &SparseOperator<Ratio>, x: &[Ratio], b: &[Ratio]) -> bool {
    a.apply(x) == b
}

// ---------------------------------------------------------------------------
// Float solvers
// ---------------------------------------------------------------------------

/// Dense partial-pivot LU over doubles.
pub struct LuF64 {
    n: usize,
    data: Vec<f64>,
    perm: Vec<usize>,
}

impl LuF64 {
    /// Factors `a`; exact zero pivots are replaced by a tiny multiple of the
    /// matrix scale so that singular matrices can still drive inverse
    /// iteration toward the null space.
    pub fn factor(a: &SparseOperator<f64>) -> Self {
        let n = a.n_rows();
        let mut data = vec![0.0; n * n];
        for (r, c, v) in a.iter() {
            data[r * n + c] = *v;
        }
        let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let mut perm = Vec::with_capacity(n);
        for k in 0..n {
            let pivot_row = (k..n)
                .max_by(|&i, &j| {
                    data[i * n + k]
                        .abs()
                        .total_cmp(&data[j * n + k].abs())
                })
                .unwrap();
            if pivot_row != k {
                for j in 0..n {
                    data.swap(k * n + j, pivot_row * n + j);
                }
            }
            perm.push(pivot_row);
            if data[k * n + k] == 0.0 {
                data[k * n + k] = scale * 1e-300;
            }
            let inv = 1.0 / data[k * n + k];
            for i in k + 1..n {
                let f = data[i * n + k] * inv;
                data[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        data[i * n + j] -= f * data[k * n + j];
                    }
                }
            }
        }
        LuF64 { n, data, perm }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut b = rhs.to_vec();
        for (k, &pr) in self.perm.iter().enumerate() {
            b.swap(k, pr);
        }
        for i in 0..n {
            for j in 0..i {
                b[i] -= self.data[i * n + j] * b[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                b[i] -= self.data[i * n + j] * b[j];
            }
            b[i] /= self.data[i * n + i];
        }
        b
    }
}

/// Null vector by inverse power iteration with shift zero: factor once,
/// repeatedly solve and normalize until `||A v||_inf <= 1e-14 * scale`
/// (at most 10^4 iterations).
pub fn null_vector_f64(a: &SparseOperator<f64>) -> Result<Vec<f64>> {
    let n = a.n_rows();
    let lu = LuF64::factor(a);
    let scale = a.max_abs().max(1.0);
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..10_000 {
        let w = lu.solve(&v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Singular("inverse iteration diverged".into()));
        }
        v = w.into_iter().map(|x| x / norm).collect();
        let residual = a
            .apply(&v)
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()));
        if residual <= 1e-14 * scale {
            return Ok(v);
        }
    }
    Err(Error::Singular(
        "inverse iteration did not converge in 10^4 iterations".into(),
    ))
}

/// Dense matrix exponential by scaling and squaring with a Taylor series.
pub fn expm_f64(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let norm = a
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let factor = 1.0 / 2f64.powi(s as i32);
    let scaled: Vec<Vec<f64>> = a
        .iter()
        .map(|row| row.iter().map(|v| v * factor).collect())
        .collect();
    // Taylor with running term until it stops contributing.
    let mut result = identity_dense(n);
    let mut term = identity_dense(n);
    for k in 1..200 {
        term = dense_mul(&term, &scaled);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        let mut biggest = 0.0f64;
        for (ri, row) in term.iter().enumerate() {
            for (ci, v) in row.iter().enumerate() {
                result[ri][ci] += v;
                biggest = biggest.max(v.abs());
            }
        }
        if biggest < 1e-19 {
            break;
        }
    }
    for _ in 0..s {
        result = dense_mul(&result, &result);
    }
    result
}

fn identity_dense(n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn dense_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Strongly connected components (irreducibility checks)
// ---------------------------------------------------------------------------

/// Kosaraju SCC over the off-diagonal sparsity pattern of a generator.
/// Returns the components; a component is *closed* if no arc leaves it.
pub fn closed_classes<T: crate::ratio::Scalar>(a: &SparseOperator<T>) -> Vec<Vec<usize>> {
    let n = a.n_rows();
    let mut fwd = vec![Vec::new(); n];
    let mut rev = vec![Vec::new(); n];
    for (r, c, _) in a.iter() {
        if r != c {
            fwd[r].push(c);
            rev[c].push(r);
        }
    }
    // First pass: order by finish time.
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        seen[start] = true;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < fwd[v].len() {
                let next = fwd[v][*i];
                *i += 1;
                if !seen[next] {
                    seen[next] = true;
                    stack.push((next, 0));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }
    // Second pass on the reverse graph.
    let mut comp = vec![usize::MAX; n];
    let mut n_comp = 0;
    for &start in order.iter().rev() {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = n_comp;
        while let Some(v) = stack.pop() {
            for &w in &rev[v] {
                if comp[w] == usize::MAX {
                    comp[w] = n_comp;
                    stack.push(w);
                }
            }
        }
        n_comp += 1;
    }
    let mut members = vec![Vec::new(); n_comp];
    for (v, &c) in comp.iter().enumerate() {
        members[c].push(v);
    }
    let mut closed = vec![true; n_comp];
    for (r, vs) in fwd.iter().enumerate() {
        for &c in vs {
            if comp[r] != comp[c] {
                closed[comp[r]] = false;
            }
        }
    }
    members
        .into_iter()
        .zip(closed)
        .filter_map(|(m, cl)| cl.then_some(m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{frac, int};

    #[test]
    fn rational_lu_solves_small_system() {
        // [[2, 1], [1, 3]] x = [5, 10] -> x = (1, 3).
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        let b = vec![int(5), int(10)];
        let x = lu_solve_rational(a, b).unwrap();
        assert_eq!(x, vec![int(1), int(3)]);
    }

    #[test]
    fn rational_lu_detects_singularity() {
        let a = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert!(matches!(
            lu_solve_rational(a, vec![int(1), int(2)]),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn dixon_agrees_with_dense_on_random_system() {
        use rand::Rng;
        let mut rng = crate::generator::trial_rng(5, 0);
        let n = 40;
        let mut triplets = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if rng.gen::<f64>() < 0.2 || r == c {
                    let num = rng.gen_range(-9i64..10);
                    let den = rng.gen_range(1i64..5);
                    triplets.push((r, c, frac(num, den) + if r == c { int(10) } else { int(0) }));
                }
            }
        }
        let a = SparseOperator::from_triplets(n, n, triplets);
        let b: Vec<Ratio> = (0..n).map(|i| frac(i as i64 % 7 - 3, 2)).collect();
        let dense = lu_solve_rational(a.to_dense(), b.clone()).unwrap();
        let lifted = dixon_solve(&a, &b).unwrap();
        assert_eq!(dense, lifted);
    }

    #[test]
    fn reconstruction_finds_small_fractions() {
        // 1/3 mod 10007: u = inverse(3)*1.
        let m = BigInt::from(10007);
        let u = BigInt::from(3336); // 3*3336 = 10008 = 1 mod 10007
        let r = rational_reconstruct(&u, &m).unwrap();
        assert_eq!(r, frac(1, 3));
    }

    #[test]
    fn float_null_vector_of_simple_generator() {
        // Two-state chain: L = [[-1, 1], [2, -2]] has stationary (2/3, 1/3).
        let lt = SparseOperator::from_triplets(
            2,
            2,
            vec![(0, 0, -1.0), (1, 0, 1.0), (0, 1, 2.0), (1, 1, -2.0)],
        );
        let v = null_vector_f64(&lt).unwrap();
        let total: f64 = v.iter().sum();
        let pi: Vec<f64> = v.iter().map(|x| x / total).collect();
        assert!((pi[0] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn expm_of_diagonal() {
        let a = vec![vec![1.0, 0.0], vec![0.0, -1.0]];
        let e = expm_f64(&a);
        assert!((e[0][0] - 1f64.exp()).abs() < 1e-12);
        assert!((e[1][1] - (-1f64).exp()).abs() < 1e-12);
        assert!(e[0][1].abs() < 1e-15);
    }

    #[test]
    fn closed_classes_found() {
        // 0 -> 1 -> 2 -> 1: the {1,2} class is closed, 0 is not.
        let a = SparseOperator::from_triplets(
            3,
            3,
            vec![(0, 1, int(1)), (1, 2, int(1)), (2, 1, int(1))],
        );
        let classes = closed_classes(&a);
        assert_eq!(classes.len(), 1);
        let mut c = classes[0].clone();
        c.sort_unstable();
        assert_eq!(c, vec![1, 2]);
    }
}
