//! Closed-form steady state of the two-reservoir chain at unit occupancy:
//! absorption probabilities, m-point correlations, the three ground-state
//! vectors of the transformed Hamiltonians, the steady-state mass function,
//! and the single-species (N = 2) resummed forms.
//!
//! Everything here is exact rational arithmetic. Boundary rates must be
//! normalized (`sum alpha = sum beta = 1`); [`normalize_rates`] is provided
//! for callers that accept unnormalized input, since rescaling boundary
//! rates changes the steady state and must be an explicit choice.

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::CorrelationQuery;
use crate::ratio::{self, Ratio};

/// Rescales a rate vector to total 1; the flag reports whether anything
/// changed.
pub fn normalize_rates(rates: &[Ratio]) -> (Vec<Ratio>, bool) {
    let total = ratio::sum(rates);
    if total.is_one() {
        (rates.to_vec(), false)
    } else {
        (rates.iter().map(|r| r / &total).collect(), true)
    }
}

fn check_normalized(alpha: &[Ratio], beta: &[Ratio]) -> Result<()> {
    if !ratio::sum(alpha).is_one() || !ratio::sum(beta).is_one() {
        return Err(Error::InvalidSpec(
            "boundary rates must be normalized to total 1 (see normalize_rates)".into(),
        ));
    }
    Ok(())
}

/// `(L + 1 - sum c)! / (L + 1)!`.
pub fn f_coeff(c: &[u8], l: u32) -> Ratio {
    let s: u32 = c.iter().map(|&v| v as u32).sum();
    assert!(s <= l + 1);
    Ratio::new(ratio::factorial(l + 1 - s), ratio::factorial(l + 1))
}

/// `(L + 2 - x_j - sum_{k >= j} c_k)^{c_j}` for the 0-based index `j`.
pub fn g_coeff(j: usize, sites: &[u32], c: &[u8], l: u32) -> Ratio {
    if c[j] == 0 {
        return Ratio::one();
    }
    let tail: i64 = c[j..].iter().map(|&v| v as i64).sum();
    ratio::int(l as i64 + 2 - sites[j] as i64 - tail)
}

/// Absorption probability that dual particle `k` ends left (`t_k = 1`) or
/// right (`t_k = 0`), in closed form:
/// `P(t) = sum_{c >= t} f(c) prod_j (-1)^{c_j - t_j} g_j`.
pub fn absorption_prob_closed(sites: &[u32], t: &[u8], l: u32) -> Ratio {
    assert_eq!(sites.len(), t.len());
    assert!(sites.windows(2).all(|w| w[0] < w[1]));
    assert!(sites.iter().all(|&x| 1 <= x && x <= l));
    let m = t.len();
    let mut acc = Ratio::zero();
    // Enumerate c >= t componentwise over {0,1}^m.
    let free: Vec<usize> = (0..m).filter(|&j| t[j] == 0).collect();
    for mask in 0..(1u32 << free.len()) {
        let mut c = t.to_vec();
        for (bit, &j) in free.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                c[j] = 1;
            }
        }
        let mut term = f_coeff(&c, l);
        let mut sign_flips = 0u32;
        for j in 0..m {
            sign_flips += (c[j] - t[j]) as u32;
            term *= g_coeff(j, sites, &c, l);
        }
        if sign_flips % 2 == 1 {
            term = -term;
        }
        acc += term;
    }
    acc
}

/// m-point steady-state correlation
/// `E[prod_k 1{Y_{x_k} = a_k}] = sum_t prod_k alpha^{t_k} beta^{1-t_k} P(t)`.
pub fn correlation_closed(
    query: &CorrelationQuery,
    alpha: &[Ratio],
    beta: &[Ratio],
    l: u32,
) -> Result<Ratio> {
    check_normalized(alpha, beta)?;
    let m = query.order();
    let mut acc = Ratio::zero();
    for mask in 0..(1u32 << m) {
        let t: Vec<u8> = (0..m).map(|k| (mask >> k & 1) as u8).collect();
        let mut term = absorption_prob_closed(&query.sites, &t, l);
        if term.is_zero() {
            continue;
        }
        for (k, &a) in query.species.iter().enumerate() {
            let a = a as usize - 1;
            term *= if t[k] == 1 { &alpha[a] } else { &beta[a] };
        }
        acc += term;
    }
    Ok(acc)
}

fn is_hole(tau_x: u32, n_species: usize) -> bool {
    tau_x as usize == n_species
}

/// Ground state of the fully transformed Hamiltonian:
/// `psi2(tau) = [prod_x (alpha_{tau_x} - beta_{tau_x})^{1 - hole}
///              (1 + #holes from x on)] / (L + 1)!`.
pub fn psi2(tau: &[u32], alpha: &[Ratio], beta: &[Ratio]) -> Result<Ratio> {
    check_normalized(alpha, beta)?;
    let n_species = alpha.len();
    let l = tau.len();
    let mut value = Ratio::new(1.into(), ratio::factorial(l as u32 + 1));
    let mut holes_from = 0i64;
    let mut site_factors = vec![Ratio::one(); l];
    for x in (0..l).rev() {
        if is_hole(tau[x], n_species) {
            holes_from += 1;
            site_factors[x] = ratio::int(1 + holes_from);
        } else {
            let a = tau[x] as usize - 1;
            site_factors[x] = (&alpha[a] - &beta[a]) * ratio::int(1 + holes_from);
        }
    }
    for f in site_factors {
        value *= f;
    }
    Ok(value)
}

/// Ground state of the half-transformed Hamiltonian, whose entries are the
/// steady-state marginals: nested sum over `c_x in {hole(x), 1}` of
/// `prod_x (1 + sum_{j>=x} c_j) (alpha-beta)^{1-c_x} beta^{c_x - hole(x)}`,
/// divided by `(L+1)!`.
pub fn psi1(tau: &[u32], alpha: &[Ratio], beta: &[Ratio]) -> Result<Ratio> {
    check_normalized(alpha, beta)?;
    let n_species = alpha.len();
    let l = tau.len();
    let occupied: Vec<usize> = (0..l).filter(|&x| !is_hole(tau[x], n_species)).collect();
    let mut acc = Ratio::zero();
    for mask in 0..(1u64 << occupied.len()) {
        let mut c = vec![1u8; l];
        for (bit, &x) in occupied.iter().enumerate() {
            c[x] = (mask >> bit & 1) as u8;
        }
        let mut term = Ratio::new(1.into(), ratio::factorial(l as u32 + 1));
        let mut tail: i64 = c.iter().map(|&v| v as i64).sum();
        for x in 0..l {
            term *= ratio::int(1 + tail);
            tail -= c[x] as i64;
            if !is_hole(tau[x], n_species) {
                let a = tau[x] as usize - 1;
                if c[x] == 0 {
                    term *= &alpha[a] - &beta[a];
                } else {
                    term *= &beta[a];
                }
            }
        }
        acc += term;
    }
    Ok(acc)
}

/// Steady-state probability mass of a configuration, by inclusion-exclusion
/// over the empty sites filled with every species, with correlations from
/// [`correlation_closed`].
pub fn psi(tau: &[u32], alpha: &[Ratio], beta: &[Ratio]) -> Result<Ratio> {
    check_normalized(alpha, beta)?;
    let n_species = alpha.len();
    let l = tau.len() as u32;
    let occupied: Vec<(u32, u32)> = (0..tau.len())
        .filter(|&x| !is_hole(tau[x], n_species))
        .map(|x| (x as u32 + 1, tau[x]))
        .collect();
    let empty: Vec<u32> = (0..tau.len())
        .filter(|&x| is_hole(tau[x], n_species))
        .map(|x| x as u32 + 1)
        .collect();
    let mut acc = Ratio::zero();
    for mask in 0..(1u64 << empty.len()) {
        let filled: Vec<u32> = empty
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask >> bit & 1 == 1)
            .map(|(_, &x)| x)
            .collect();
        let sign = if filled.len() % 2 == 1 { -1 } else { 1 };
        // Sum over species assignments on the filled sites.
        let assignments = (n_species - 1).pow(filled.len() as u32) as u64;
        for code in 0..assignments.max(1) {
            if filled.is_empty() && code > 0 {
                break;
            }
            let mut merged: Vec<(u32, u32)> = occupied.clone();
            let mut rem = code;
            for &x in &filled {
                let b = (rem % (n_species as u64 - 1)) as u32 + 1;
                rem /= n_species as u64 - 1;
                merged.push((x, b));
            }
            merged.sort_unstable();
            let term = if merged.is_empty() {
                Ratio::one()
            } else {
                let query = CorrelationQuery::new(
                    merged.iter().map(|(x, _)| *x).collect(),
                    merged.iter().map(|(_, b)| *b).collect(),
                )?;
                correlation_closed(&query, alpha, beta, l)?
            };
            acc += term * ratio::int(sign);
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Single-species (N = 2) resummed forms
// ---------------------------------------------------------------------------
//
// The printed resummations carry two typos relative to their own derivation
// from the general-N formulas: the hole-count exponent on beta must be the
// number of *unselected particles* (not L - q), and the NESS form's inner
// sum runs over the particles of the filled configuration. Both corrections
// are forced by exact agreement with the general-N operations at N = 2,
// which the tests pin down.

/// `E[prod 1{Y_{x_k} = 1}]` for N = 2:
/// `sum_q (alpha - beta)^q beta^{m-q} sum_{l_1<...<l_q} prod_k
///  (L + 1 - x_{l_k} - q + k) / (L + 2 - k)`.
pub fn ssep_correlation(sites: &[u32], alpha1: &Ratio, beta1: &Ratio, l: u32) -> Ratio {
    let m = sites.len();
    let diff = alpha1 - beta1;
    let mut acc = Ratio::zero();
    for mask in 0..(1u32 << m) {
        let chosen: Vec<u32> = (0..m).filter(|k| mask >> k & 1 == 1).map(|k| sites[k]).collect();
        let q = chosen.len();
        let mut term = Ratio::one();
        for _ in 0..q {
            term *= &diff;
        }
        for _ in 0..m - q {
            term *= beta1;
        }
        for (k, &x) in chosen.iter().enumerate() {
            let k1 = k as i64 + 1;
            term *= Ratio::new(
                (l as i64 + 1 - x as i64 - q as i64 + k1).into(),
                (l as i64 + 2 - k1).into(),
            );
        }
        acc += term;
    }
    acc
}

fn particle_positions(tau: &[u32]) -> Vec<u32> {
    tau.iter()
        .enumerate()
        .filter(|(_, &t)| t == 1)
        .map(|(x, _)| x as u32 + 1)
        .collect()
}

/// N = 2 ground state of the fully transformed Hamiltonian.
pub fn ssep_psi2(tau: &[u32], alpha1: &Ratio, beta1: &Ratio) -> Ratio {
    let l = tau.len() as i64;
    let positions = particle_positions(tau);
    let q = positions.len();
    let diff = alpha1 - beta1;
    let mut value = Ratio::one();
    for _ in 0..q {
        value *= &diff;
    }
    for (k, &x) in positions.iter().enumerate() {
        let k1 = k as i64 + 1;
        value *= Ratio::new(
            (1 + l - x as i64 - q as i64 + k1).into(),
            (2 + l - k1).into(),
        );
    }
    value
}

/// N = 2 marginal vector: the correlation over the particle positions.
pub fn ssep_psi1(tau: &[u32], alpha1: &Ratio, beta1: &Ratio) -> Ratio {
    let l = tau.len() as u32;
    let positions = particle_positions(tau);
    if positions.is_empty() {
        return Ratio::one();
    }
    ssep_correlation(&positions, alpha1, beta1, l)
}

/// N = 2 steady-state mass function, by inclusion-exclusion over holes.
pub fn ssep_psi(tau: &[u32], alpha1: &Ratio, beta1: &Ratio) -> Ratio {
    let holes: Vec<usize> = (0..tau.len()).filter(|&x| tau[x] == 2).collect();
    let mut acc = Ratio::zero();
    for mask in 0..(1u64 << holes.len()) {
        let mut filled = tau.to_vec();
        let mut sign = 1i64;
        for (bit, &x) in holes.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                filled[x] = 1;
                sign = -sign;
            }
        }
        acc += ssep_psi1(&filled, alpha1, beta1) * ratio::int(sign);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{frac, int};

    fn alpha3() -> Vec<Ratio> {
        vec![frac(1, 2), frac(1, 4), frac(1, 4)]
    }

    fn beta3() -> Vec<Ratio> {
        vec![frac(1, 10), frac(3, 10), frac(3, 5)]
    }

    #[test]
    fn f_coefficient_values() {
        assert_eq!(f_coeff(&[0, 0], 5), int(1));
        assert_eq!(f_coeff(&[1, 1], 3), frac(1, 12));
        for l in 1..=6u32 {
            assert_eq!(f_coeff(&[1], l), frac(1, l as i64 + 1));
        }
    }

    #[test]
    fn g_coefficient_values() {
        // c_j = 0: empty power.
        assert_eq!(g_coeff(0, &[2], &[0], 5), int(1));
        // L = 3, single site x = 1, c = 1: L + 2 - 1 - 1 = 3.
        assert_eq!(g_coeff(0, &[1], &[1], 3), int(3));
        // L = 3, sites (1,3), c = (1,1), j = 1: L + 2 - 1 - 2 = 2.
        assert_eq!(g_coeff(0, &[1, 3], &[1, 1], 3), int(2));
    }

    #[test]
    fn one_point_absorption_is_gambler_ruin() {
        for l in 1..=6u32 {
            for x in 1..=l {
                let left = absorption_prob_closed(&[x], &[1], l);
                assert_eq!(left, frac((l + 1 - x) as i64, (l + 1) as i64));
                let right = absorption_prob_closed(&[x], &[0], l);
                assert_eq!(&left + &right, int(1));
            }
        }
    }

    #[test]
    fn two_point_absorption_table() {
        // The four closed expressions for m = 2.
        for l in 2..=6i64 {
            for x1 in 1..l {
                for x2 in (x1 + 1)..=l {
                    let p = |t1: u8, t2: u8| absorption_prob_closed(&[x1 as u32, x2 as u32], &[t1, t2], l as u32);
                    let den = l * (l + 1);
                    assert_eq!(p(0, 0), frac(x1 * (x2 - 1), den));
                    assert_eq!(p(0, 1), frac(x1 * (l + 1 - x2), den));
                    assert_eq!(p(1, 0), frac(x2 * (l + 1 - x1), den));
                    assert_eq!(p(1, 1), frac((l - x1) * (l + 1 - x2), den));
                }
            }
        }
        // Spec'd instance: L = 2, x = (1,2), P(1,1) = 1/6.
        assert_eq!(absorption_prob_closed(&[1, 2], &[1, 1], 2), frac(1, 6));
    }

    #[test]
    fn three_point_absorption_table() {
        // The eight closed expressions for m = 3.
        for l in 3..=6i64 {
            for x1 in 1..=(l - 2) {
                for x2 in (x1 + 1)..=(l - 1) {
                    for x3 in (x2 + 1)..=l {
                        let p = |t: [u8; 3]| {
                            absorption_prob_closed(&[x1 as u32, x2 as u32, x3 as u32], &t, l as u32)
                        };
                        let den = l * (l * l - 1);
                        assert_eq!(p([0, 0, 0]), frac(x1 * (x2 - 1) * (x3 - 2), den));
                        assert_eq!(p([0, 1, 1]), frac(x1 * (l - x2) * (l - x3 + 1), den));
                        assert_eq!(
                            p([0, 1, 0]),
                            frac(x1 * (l * (1 - x3) + x2 * (x3 - 2) + 1), den)
                        );
                        assert_eq!(p([0, 0, 1]), frac(x1 * (x2 - 1) * (l - x3 + 1), den));
                        assert_eq!(
                            p([1, 1, 0]),
                            frac((l - 1) * x2 * (x3 - 1) - x1 * (x2 - 1) * (x3 - 2), den)
                        );
                        assert_eq!(
                            p([1, 0, 1]),
                            frac((l - x3 + 1) * (x2 * (l - x1 - 1) + x1), den)
                        );
                        assert_eq!(
                            p([1, 0, 0]),
                            frac(x2 * (x3 - 1) * (l - 1) - x1 * (x2 - 1) * (x3 - 2), den)
                        );
                        assert_eq!(
                            p([1, 1, 1]),
                            frac((l - x1 - 1) * (l - x2) * (l - x3 + 1), den)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn absorption_probabilities_are_coherent() {
        // Sum to one and lie in [0,1] for all L <= 6, m <= 3 placements.
        for l in 1..=6u32 {
            for m in 1..=3usize {
                if (l as usize) < m {
                    continue;
                }
                let mut sites = vec![0u32; m];
                coherent_rec(&mut sites, 0, 1, l, m);
            }
        }
    }

    fn coherent_rec(sites: &mut Vec<u32>, k: usize, from: u32, l: u32, m: usize) {
        if k == m {
            let mut total = Ratio::zero();
            for mask in 0..(1u32 << m) {
                let t: Vec<u8> = (0..m).map(|j| (mask >> j & 1) as u8).collect();
                let p = absorption_prob_closed(sites, &t, l);
                assert!(!p.is_negative() && p <= int(1), "P out of range at {sites:?} {t:?}");
                total += p;
            }
            assert_eq!(total, int(1), "sum != 1 at L={l} sites {sites:?}");
            return;
        }
        for x in from..=(l - (m - k - 1) as u32) {
            sites[k] = x;
            coherent_rec(sites, k + 1, x + 1, l, m);
        }
    }

    #[test]
    fn one_point_correlation_closed_form() {
        // L = 3, x = 2, alpha_a = 1/2, beta_a = 1/10 -> 3/10.
        let q = CorrelationQuery::new(vec![2], vec![1]).unwrap();
        let c = correlation_closed(&q, &alpha3(), &beta3(), 3).unwrap();
        assert_eq!(c, frac(3, 10));
        // General form ((L+1-x) alpha + x beta) / (L+1).
        for l in 1..=5u32 {
            for x in 1..=l {
                let q = CorrelationQuery::new(vec![x], vec![2]).unwrap();
                let c = correlation_closed(&q, &alpha3(), &beta3(), l).unwrap();
                let expect = (frac((l + 1 - x) as i64, 1) * frac(1, 4)
                    + frac(x as i64, 1) * frac(3, 10))
                    / int((l + 1) as i64);
                assert_eq!(c, expect);
            }
        }
    }

    #[test]
    fn two_point_connected_correlation() {
        // Connected part: -x1 (L - x2 + 1) (a1 - b1)(a2 - b2) / (L (L+1)^2).
        let (alpha, beta) = (alpha3(), beta3());
        for l in 2..=5i64 {
            for x1 in 1..l {
                for x2 in (x1 + 1)..=l {
                    for (a1, a2) in [(1u32, 1u32), (1, 2), (2, 1)] {
                        let q2 =
                            CorrelationQuery::new(vec![x1 as u32, x2 as u32], vec![a1, a2]).unwrap();
                        let joint = correlation_closed(&q2, &alpha, &beta, l as u32).unwrap();
                        let q_a = CorrelationQuery::new(vec![x1 as u32], vec![a1]).unwrap();
                        let q_b = CorrelationQuery::new(vec![x2 as u32], vec![a2]).unwrap();
                        let prod = correlation_closed(&q_a, &alpha, &beta, l as u32).unwrap()
                            * correlation_closed(&q_b, &alpha, &beta, l as u32).unwrap();
                        let da = &alpha[a1 as usize - 1] - &beta[a1 as usize - 1];
                        let db = &alpha[a2 as usize - 1] - &beta[a2 as usize - 1];
                        let expect = -frac(x1 * (l - x2 + 1), l * (l + 1) * (l + 1)) * da * db;
                        assert_eq!(joint - prod, expect);
                    }
                }
            }
        }
    }

    #[test]
    fn three_point_connected_correlation() {
        let (alpha, beta) = (alpha3(), beta3());
        let l = 5i64;
        for (x1, x2, x3) in [(1i64, 2, 3), (1, 3, 5), (2, 3, 4)] {
            let species = [1u32, 2, 1];
            let xs = [x1 as u32, x2 as u32, x3 as u32];
            let corr = |sites: &[u32], sp: &[u32]| {
                let q = CorrelationQuery::new(sites.to_vec(), sp.to_vec()).unwrap();
                correlation_closed(&q, &alpha, &beta, l as u32).unwrap()
            };
            // Expand E[(I1 - r1)(I2 - r2)(I3 - r3)] into joint moments.
            let r: Vec<Ratio> = (0..3).map(|k| corr(&[xs[k]], &[species[k]])).collect();
            let c123 = corr(&xs, &species);
            let c12 = corr(&xs[0..2], &species[0..2]);
            let c13 = corr(&[xs[0], xs[2]], &[species[0], species[2]]);
            let c23 = corr(&xs[1..3], &species[1..3]);
            let connected = c123 - &c12 * &r[2] - &c13 * &r[1] - &c23 * &r[0]
                + &r[0] * &r[1] * &r[2] * int(2);
            let d: Vec<Ratio> = (0..3)
                .map(|k| {
                    &alpha[species[k] as usize - 1] - &beta[species[k] as usize - 1]
                })
                .collect();
            let expect = -frac(
                2 * x1 * (l + 1 - 2 * x2) * (l + 1 - x3),
                (l + 1).pow(3) * (l - 1) * l,
            ) * &d[0]
                * &d[1]
                * &d[2];
            assert_eq!(connected, expect);
        }
    }

    #[test]
    fn equilibrium_correlation_is_product() {
        let alpha = alpha3();
        let q = CorrelationQuery::new(vec![1, 2, 4], vec![1, 2, 1]).unwrap();
        let c = correlation_closed(&q, &alpha, &alpha, 5).unwrap();
        assert_eq!(c, frac(1, 2) * frac(1, 4) * frac(1, 2));
    }

    #[test]
    fn psi2_values_on_short_chains() {
        let (alpha, beta) = (alpha3(), beta3());
        // L = 1: hole -> 1, particle a -> (alpha_a - beta_a) / 2.
        assert_eq!(psi2(&[3], &alpha, &beta).unwrap(), int(1));
        assert_eq!(
            psi2(&[1], &alpha, &beta).unwrap(),
            (frac(1, 2) - frac(1, 10)) / int(2)
        );
        // Equilibrium: any configuration with a particle vanishes.
        assert_eq!(psi2(&[1, 3], &alpha, &alpha).unwrap(), int(0));
    }

    #[test]
    fn psi1_is_marginal_vector() {
        let (alpha, beta) = (alpha3(), beta3());
        // Normalization entry.
        assert_eq!(psi1(&[3, 3, 3], &alpha, &beta).unwrap(), int(1));
        // Single-particle entry equals the one-point correlation.
        for l in 1..=4usize {
            for x in 0..l {
                for a in 1..=2u32 {
                    let mut tau = vec![3u32; l];
                    tau[x] = a;
                    let q = CorrelationQuery::new(vec![x as u32 + 1], vec![a]).unwrap();
                    assert_eq!(
                        psi1(&tau, &alpha, &beta).unwrap(),
                        correlation_closed(&q, &alpha, &beta, l as u32).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn psi_expands_like_the_worked_example() {
        // L = 2: mu(1,1), mu(1,N), mu(N,N) in terms of correlations.
        let (alpha, beta) = (alpha3(), beta3());
        let corr = |sites: Vec<u32>, sp: Vec<u32>| {
            correlation_closed(&CorrelationQuery::new(sites, sp).unwrap(), &alpha, &beta, 2)
                .unwrap()
        };
        assert_eq!(psi(&[1, 1], &alpha, &beta).unwrap(), corr(vec![1, 2], vec![1, 1]));
        let mu_1n = corr(vec![1], vec![1])
            - corr(vec![1, 2], vec![1, 1])
            - corr(vec![1, 2], vec![1, 2]);
        assert_eq!(psi(&[1, 3], &alpha, &beta).unwrap(), mu_1n);
        let mut mu_nn = int(1);
        for a in 1..=2u32 {
            mu_nn -= corr(vec![1], vec![a]);
            mu_nn -= corr(vec![2], vec![a]);
        }
        for a1 in 1..=2u32 {
            for a2 in 1..=2u32 {
                mu_nn += corr(vec![1, 2], vec![a1, a2]);
            }
        }
        assert_eq!(psi(&[3, 3], &alpha, &beta).unwrap(), mu_nn);
    }

    #[test]
    fn psi_is_a_probability_mass_function() {
        let (alpha, beta) = (alpha3(), beta3());
        for l in 1..=3usize {
            let mut total = Ratio::zero();
            let count = 3usize.pow(l as u32);
            for code in 0..count {
                let mut tau = Vec::with_capacity(l);
                let mut c = code;
                for _ in 0..l {
                    tau.push((c % 3) as u32 + 1);
                    c /= 3;
                }
                let p = psi(&tau, &alpha, &beta).unwrap();
                assert!(!p.is_negative(), "psi({tau:?}) < 0");
                total += p;
            }
            assert_eq!(total, int(1), "L={l}");
        }
    }

    #[test]
    fn psi_at_equilibrium_is_product_measure() {
        let alpha = alpha3();
        for tau in [[1u32, 2], [1, 3], [3, 3], [2, 2]] {
            let expect = tau
                .iter()
                .map(|&t| alpha[t as usize - 1].clone())
                .fold(Ratio::one(), |acc, v| acc * v);
            assert_eq!(psi(&tau, &alpha, &alpha).unwrap(), expect);
        }
    }

    #[test]
    fn gamma_product_identity() {
        // (L + 1 - q)! / (L + 1)! = prod_{k=1}^{q} 1 / (L + 2 - k).
        for l in 1..=7u32 {
            for q in 0..=l {
                let c = vec![1u8; q as usize];
                let lhs = f_coeff(&c, l);
                let mut rhs = Ratio::one();
                for k in 1..=q as i64 {
                    rhs *= frac(1, l as i64 + 2 - k);
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn ssep_forms_match_general_n_at_two_species() {
        let alpha = vec![frac(2, 5), frac(3, 5)];
        let beta = vec![frac(4, 5), frac(1, 5)];
        for l in 1..=5u32 {
            // Correlations for every m <= 3 site placement.
            for m in 1..=3usize {
                if (l as usize) < m {
                    continue;
                }
                let mut sites = vec![0u32; m];
                ssep_match_rec(&mut sites, 0, 1, l, m, &alpha, &beta);
            }
            // psi2 / psi1 / psi over all configurations.
            for code in 0..2usize.pow(l) {
                let mut tau = Vec::with_capacity(l as usize);
                let mut c = code;
                for _ in 0..l {
                    tau.push((c % 2) as u32 + 1);
                    c /= 2;
                }
                assert_eq!(
                    ssep_psi2(&tau, &alpha[0], &beta[0]),
                    psi2(&tau, &alpha, &beta).unwrap()
                );
                assert_eq!(
                    ssep_psi1(&tau, &alpha[0], &beta[0]),
                    psi1(&tau, &alpha, &beta).unwrap()
                );
                assert_eq!(
                    ssep_psi(&tau, &alpha[0], &beta[0]),
                    psi(&tau, &alpha, &beta).unwrap()
                );
            }
        }
    }

    fn ssep_match_rec(
        sites: &mut Vec<u32>,
        k: usize,
        from: u32,
        l: u32,
        m: usize,
        alpha: &[Ratio],
        beta: &[Ratio],
    ) {
        if k == m {
            let q = CorrelationQuery::new(sites.clone(), vec![1; m]).unwrap();
            assert_eq!(
                ssep_correlation(sites, &alpha[0], &beta[0], l),
                correlation_closed(&q, alpha, beta, l).unwrap()
            );
            return;
        }
        for x in from..=(l - (m - k - 1) as u32) {
            sites[k] = x;
            ssep_match_rec(sites, k + 1, x + 1, l, m, alpha, beta);
        }
    }
}
