//! The dual process on the enlarged graph: stirring in the bulk plus
//! absorbing extra-sites, the duality function, absorption probabilities
//! (Monte Carlo and exact), and steady-state correlations via absorption.
//!
//! Each active reservoir owns one extra-site. A dual particle of species `a`
//! at a coupled vertex is absorbed at rate `gamma * |alpha|`, leaving a hole
//! behind and raising the extra-site tally for `a`. Edge dynamics on the
//! dual bulk is the plain stirring dynamics.

use std::collections::HashMap;

use num::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::solve;
use crate::exact::sparse::SparseOperator;
use crate::generator::{mean_stderr, simulate_to_time, trial_rng};
use crate::lattice::{Configuration, CorrelationQuery, ProcessSpec};
use crate::ratio::{self, Ratio};

/// Dual state: a bulk configuration plus per-reservoir absorbed tallies
/// (one `N-1` vector per active reservoir, in `spec.active_reservoirs()`
/// order).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualConfiguration {
    pub bulk: Configuration,
    pub extra: Vec<Vec<u32>>,
}

impl DualConfiguration {
    /// Dual configuration with the given bulk and empty extra-sites.
    pub fn new(spec: &ProcessSpec, bulk: Configuration) -> Self {
        let n_extra = spec.active_reservoirs().len();
        DualConfiguration {
            bulk,
            extra: vec![vec![0; spec.n_species - 1]; n_extra],
        }
    }

    /// One dual particle of species `a_k` (1-based) at each queried site.
    pub fn from_query(spec: &ProcessSpec, query: &CorrelationQuery) -> Result<Self> {
        query.validate_for(spec)?;
        let mut bulk = Configuration::empty(spec);
        for (&site, &species) in query.sites.iter().zip(&query.species) {
            let (x, a) = (site as usize - 1, species as usize - 1);
            bulk.set(x, a, bulk.get(x, a) + 1);
            let hole = spec.n_species - 1;
            bulk.set(x, hole, bulk.get(x, hole) - 1);
        }
        Ok(DualConfiguration::new(spec, bulk))
    }

    /// Dual particles still in the bulk.
    pub fn bulk_particles(&self) -> u32 {
        (0..self.bulk.n_vertices())
            .map(|x| self.bulk.particles_at(x))
            .sum()
    }

    /// Bulk plus absorbed count for one species (conserved by the dynamics).
    pub fn species_total(&self, a: usize) -> u32 {
        self.bulk.species_total(a) + self.extra.iter().map(|e| e[a]).sum::<u32>()
    }
}

/// Flattened extra tallies (reservoir-major), the dual-space key order.
pub fn extra_to_flat(extra: &[Vec<u32>]) -> Vec<u32> {
    extra.concat()
}

/// Inverse of [`extra_to_flat`].
pub fn extra_from_flat(spec: &ProcessSpec, flat: &[u32]) -> Vec<Vec<u32>> {
    flat.chunks(spec.n_species - 1).map(|c| c.to_vec()).collect()
}

/// Where dual particles ended up, per reservoir extra-site and species.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbsorptionOutcome {
    pub tallies: Vec<Vec<u32>>,
}

impl AbsorptionOutcome {
    /// For two-reservoir chains: (left, right) per-species counts.
    pub fn sides(&self, spec: &ProcessSpec) -> Option<(&[u32], &[u32])> {
        spec.chain?;
        Some((&self.tallies[0], &self.tallies[1]))
    }
}

/// The duality function
/// `D(n, xi) = prod_x [(nu - sum_a xi_a^x)! / nu!] prod_a n_a!/(n_a - xi_a)!`
/// times `prod (rho_a^r)^{absorbed}`; zero whenever some `xi_a^x > n_a^x`.
pub fn duality_value(spec: &ProcessSpec, n: &Configuration, xi: &DualConfiguration) -> Ratio {
    debug_assert!(n.respects(spec) && xi.bulk.respects(spec));
    let nu_fact = ratio::factorial(spec.capacity);
    let mut value = Ratio::one();
    for x in 0..spec.graph.n_vertices {
        let dual_site = xi.bulk.site(x);
        let dual_particles: u32 = dual_site[..spec.n_species - 1].iter().sum();
        value *= Ratio::new(ratio::factorial(spec.capacity - dual_particles), nu_fact.clone());
        for a in 0..spec.n_species - 1 {
            let (na, xa) = (n.get(x, a), dual_site[a]);
            if xa > na {
                return Ratio::zero();
            }
            // Falling factorial n_a! / (n_a - xi_a)!.
            for k in 0..xa {
                value *= ratio::int((na - k) as i64);
            }
        }
    }
    for (slot, &r) in spec.active_reservoirs().iter().enumerate() {
        let rho = spec.reservoirs[r].densities();
        for a in 0..spec.n_species - 1 {
            for _ in 0..xi.extra[slot][a] {
                value *= &rho[a];
            }
        }
    }
    value
}

/// Double-precision duality value for Monte Carlo estimators.
pub fn duality_value_f64(spec: &ProcessSpec, n: &Configuration, xi: &DualConfiguration) -> f64 {
    ratio::to_f64(&duality_value(spec, n, xi))
}

/// All dual moves with exact rational rates: stirring on the bulk plus one
/// absorption channel per reservoir and species.
pub fn enumerate_dual_moves_exact(
    spec: &ProcessSpec,
    xi: &DualConfiguration,
) -> Vec<(DualConfiguration, Ratio)> {
    let n = spec.n_species;
    let hole = n - 1;
    let mut out = Vec::new();
    for (x, y, w) in &spec.graph.edges {
        if !w.is_positive() {
            continue;
        }
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let weight = xi.bulk.get(*x, a) * xi.bulk.get(*y, b);
                if weight > 0 {
                    let mut next = xi.clone();
                    next.bulk.set(*x, a, next.bulk.get(*x, a) - 1);
                    next.bulk.set(*x, b, next.bulk.get(*x, b) + 1);
                    next.bulk.set(*y, a, next.bulk.get(*y, a) + 1);
                    next.bulk.set(*y, b, next.bulk.get(*y, b) - 1);
                    out.push((next, w * ratio::int(weight as i64)));
                }
            }
        }
    }
    for (slot, &r) in spec.active_reservoirs().iter().enumerate() {
        let res = &spec.reservoirs[r];
        let strength = &res.gamma * res.alpha_total();
        for a in 0..n - 1 {
            let count = xi.bulk.get(res.vertex, a);
            if count > 0 {
                let mut next = xi.clone();
                next.bulk.set(res.vertex, a, count - 1);
                next.bulk.set(res.vertex, hole, next.bulk.get(res.vertex, hole) + 1);
                next.extra[slot][a] += 1;
                out.push((next, &strength * ratio::int(count as i64)));
            }
        }
    }
    out
}

/// One jump of the dual chain; `None` when frozen.
fn dual_step(
    spec: &ProcessSpec,
    xi: &DualConfiguration,
    rng: &mut impl Rng,
) -> Option<(f64, DualConfiguration)> {
    let moves = enumerate_dual_moves_exact(spec, xi);
    if moves.is_empty() {
        return None;
    }
    let rates: Vec<f64> = moves.iter().map(|(_, r)| ratio::to_f64(r)).collect();
    let total: f64 = rates.iter().sum();
    let holding = -(1.0 - rng.gen::<f64>()).ln() / total;
    let mut target = rng.gen::<f64>() * total;
    for (i, rate) in rates.iter().enumerate() {
        if target < *rate {
            return Some((holding, moves[i].0.clone()));
        }
        target -= rate;
    }
    Some((holding, moves.last().unwrap().0.clone()))
}

/// Simulates the dual process to time `t`.
pub fn simulate_dual_to_time(
    spec: &ProcessSpec,
    xi0: &DualConfiguration,
    t: f64,
    rng: &mut impl Rng,
) -> DualConfiguration {
    let mut xi = xi0.clone();
    let mut time = 0.0;
    while time < t {
        match dual_step(spec, &xi, rng) {
            Some((holding, next)) => {
                time += holding;
                if time > t {
                    break;
                }
                xi = next;
            }
            None => break,
        }
    }
    xi
}

/// Runs the dual dynamics until the bulk is empty of particles and returns
/// where everything was absorbed.
pub fn simulate_to_absorption(
    spec: &ProcessSpec,
    xi0: &DualConfiguration,
    rng: &mut impl Rng,
) -> Result<AbsorptionOutcome> {
    if xi0.bulk_particles() > 0 && spec.active_reservoirs().is_empty() {
        return Err(Error::NoAbsorption("no coupled vertex".into()));
    }
    let mut xi = xi0.clone();
    while xi.bulk_particles() > 0 {
        match dual_step(spec, &xi, rng) {
            Some((_, next)) => xi = next,
            None => return Err(Error::NoAbsorption("dual process froze".into())),
        }
    }
    Ok(AbsorptionOutcome { tallies: xi.extra })
}

/// Default cap on the enumerated dual state space.
pub const DEFAULT_STATE_CAP: usize = 10_000_000;

/// Exact distribution of absorption outcomes from `xi0`, by enumerating the
/// reachable dual states (BFS) and solving the embedded jump chain's
/// first-step equations with sparse rational elimination.
pub fn absorption_probabilities_exact(
    spec: &ProcessSpec,
    xi0: &DualConfiguration,
    state_cap: usize,
) -> Result<Vec<(AbsorptionOutcome, Ratio)>> {
    if xi0.bulk_particles() > 0 && spec.active_reservoirs().is_empty() {
        return Err(Error::NoAbsorption("no coupled vertex".into()));
    }
    // BFS over reachable dual states.
    let mut index: HashMap<DualConfiguration, usize> = HashMap::new();
    let mut states: Vec<DualConfiguration> = vec![xi0.clone()];
    index.insert(xi0.clone(), 0);
    let mut moves: Vec<Vec<(usize, Ratio)>> = Vec::new();
    let mut frontier = 0usize;
    while frontier < states.len() {
        let xi = states[frontier].clone();
        let mut outgoing = Vec::new();
        if xi.bulk_particles() > 0 {
            for (next, rate) in enumerate_dual_moves_exact(spec, &xi) {
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    states.push(next);
                    states.len() - 1
                });
                outgoing.push((id, rate));
            }
            if outgoing.is_empty() {
                return Err(Error::NoAbsorption(format!(
                    "state {frontier} has particles but no moves"
                )));
            }
        }
        moves.push(outgoing);
        if states.len() > state_cap {
            return Err(Error::TooLarge(format!(
                "dual state enumeration exceeded {state_cap} states"
            )));
        }
        frontier += 1;
    }
    // Split transient / absorbing, with the jump-chain matrix on transients.
    let absorbing: Vec<usize> = (0..states.len())
        .filter(|&i| states[i].bulk_particles() == 0)
        .collect();
    if states[0].bulk_particles() == 0 {
        return Ok(vec![(
            AbsorptionOutcome {
                tallies: xi0.extra.clone(),
            },
            Ratio::one(),
        )]);
    }
    let transient: Vec<usize> = (0..states.len())
        .filter(|&i| states[i].bulk_particles() > 0)
        .collect();
    let transient_rank: HashMap<usize, usize> =
        transient.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let nt = transient.len();
    // (I - P)^T y = e_start, then outcome weights are y^T R.
    let mut triplets = Vec::new();
    for (k, &i) in transient.iter().enumerate() {
        triplets.push((k, k, Ratio::one()));
        let exit: Ratio = ratio::sum(&moves[i].iter().map(|(_, r)| r.clone()).collect::<Vec<_>>());
        for (j, rate) in &moves[i] {
            if let Some(&kj) = transient_rank.get(j) {
                // Transposed entry: column k, row kj.
                triplets.push((kj, k, -(rate / &exit)));
            }
        }
    }
    let a = SparseOperator::from_triplets(nt, nt, triplets);
    let mut b = vec![Ratio::zero(); nt];
    b[transient_rank[&0]] = Ratio::one();
    let y = solve::solve_rational(&a, &b).map_err(|e| match e {
        Error::Singular(_) => {
            Error::NoAbsorption("recurrent class never reaches absorption".into())
        }
        other => other,
    })?;
    let mut dist: HashMap<Vec<u32>, Ratio> = HashMap::new();
    for (k, &i) in transient.iter().enumerate() {
        if y[k].is_zero() {
            continue;
        }
        let exit: Ratio = ratio::sum(&moves[i].iter().map(|(_, r)| r.clone()).collect::<Vec<_>>());
        for (j, rate) in &moves[i] {
            if states[*j].bulk_particles() == 0 {
                let key = extra_to_flat(&states[*j].extra);
                let p = &y[k] * &(rate / &exit);
                *dist.entry(key).or_insert_with(Ratio::zero) += p;
            }
        }
    }
    let _ = absorbing;
    let mut out: Vec<(AbsorptionOutcome, Ratio)> = dist
        .into_iter()
        .map(|(flat, p)| {
            (
                AbsorptionOutcome {
                    tallies: extra_from_flat(spec, &flat),
                },
                p,
            )
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    debug_assert!({
        let total = ratio::sum(&out.iter().map(|(_, p)| p.clone()).collect::<Vec<_>>());
        total.is_one()
    });
    Ok(out)
}

/// Steady-state correlation via absorption: the limit of `E[D(n(t), xi0)]`,
/// i.e. `E[prod_k n_{a_k}^{x_k}] / nu^m`, evaluated as the expectation of
/// `prod (rho_a^r)^{absorbed}` under the exact absorption distribution.
pub fn correlation_via_absorption(spec: &ProcessSpec, query: &CorrelationQuery) -> Result<Ratio> {
    let xi0 = DualConfiguration::from_query(spec, query)?;
    let dist = absorption_probabilities_exact(spec, &xi0, DEFAULT_STATE_CAP)?;
    let densities: Vec<Vec<Ratio>> = spec
        .active_reservoirs()
        .iter()
        .map(|&r| spec.reservoirs[r].densities())
        .collect();
    let mut acc = Ratio::zero();
    for (outcome, prob) in dist {
        let mut term = prob;
        for (slot, tallies) in outcome.tallies.iter().enumerate() {
            for (a, &count) in tallies.iter().enumerate() {
                for _ in 0..count {
                    term *= &densities[slot][a];
                }
            }
        }
        acc += term;
    }
    Ok(acc)
}

/// Two-sided Monte Carlo duality check: compares `E_n[D(n(t), xi)]` with
/// `E_xi[D(n, xi(t))]` and reports the standardized difference.
#[derive(Debug, Clone, Copy)]
pub struct DualityCheck {
    pub forward_mean: f64,
    pub forward_se: f64,
    pub dual_mean: f64,
    pub dual_se: f64,
    pub z_score: f64,
}

pub fn mc_duality_check(
    spec: &ProcessSpec,
    n0: &Configuration,
    xi0: &DualConfiguration,
    t: f64,
    trials: u64,
    seed: u64,
) -> DualityCheck {
    let forward: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let n_t = simulate_to_time(spec, n0, t, &mut rng);
            duality_value_f64(spec, &n_t, xi0)
        })
        .collect();
    let dual: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed.wrapping_add(0x9e3779b97f4a7c15), trial);
            let xi_t = simulate_dual_to_time(spec, xi0, t, &mut rng);
            duality_value_f64(spec, n0, &xi_t)
        })
        .collect();
    let (forward_mean, forward_se) = mean_stderr(&forward);
    let (dual_mean, dual_se) = mean_stderr(&dual);
    let pooled = (forward_se.powi(2) + dual_se.powi(2)).sqrt();
    let z_score = if pooled == 0.0 {
        if forward_mean == dual_mean {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (forward_mean - dual_mean) / pooled
    };
    DualityCheck {
        forward_mean,
        forward_se,
        dual_mean,
        dual_se,
        z_score,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{frac, int};

    fn chain3() -> ProcessSpec {
        ProcessSpec::chain(
            3,
            1,
            3,
            vec![frac(1, 2), frac(1, 4), frac(1, 4)],
            vec![frac(1, 10), frac(3, 10), frac(3, 5)],
        )
        .unwrap()
    }

    #[test]
    fn duality_value_basics() {
        let spec = chain3();
        let n = Configuration::from_tau(&[1, 3, 2], 3);
        // Empty dual: D = 1.
        let empty = DualConfiguration::new(&spec, Configuration::empty(&spec));
        assert_eq!(duality_value(&spec, &n, &empty), int(1));
        // One dual particle where n has one: (nu-1)!/nu! * n_a = 1 at nu=1.
        let q = CorrelationQuery::new(vec![1], vec![1]).unwrap();
        let xi = DualConfiguration::from_query(&spec, &q).unwrap();
        assert_eq!(duality_value(&spec, &n, &xi), int(1));
        // Dual particle of a species the configuration lacks: 0.
        let q = CorrelationQuery::new(vec![2], vec![1]).unwrap();
        let xi = DualConfiguration::from_query(&spec, &q).unwrap();
        assert_eq!(duality_value(&spec, &n, &xi), int(0));
    }

    #[test]
    fn single_particle_value_is_density() {
        // nu >= 1: one dual particle of species a at x gives n_a^x / nu.
        let spec = ProcessSpec::chain(
            2,
            3,
            3,
            vec![int(1), int(2), int(3)],
            vec![int(2), int(2), int(2)],
        )
        .unwrap();
        let mut n = Configuration::empty(&spec);
        n.set(0, 0, 2);
        n.set(0, 2, 1);
        let q = CorrelationQuery::new(vec![1], vec![1]).unwrap();
        let xi = DualConfiguration::from_query(&spec, &q).unwrap();
        assert_eq!(duality_value(&spec, &n, &xi), frac(2, 3));
    }

    #[test]
    fn chain_duality_value_matches_product_form() {
        // nu = 1 chain: D = prod alpha_a^{xi_a^0} * indicators * prod beta_a^{xi_a^{L+1}}
        // with normalized boundary rates.
        let spec = chain3();
        let n = Configuration::from_tau(&[1, 2, 3], 3);
        let mut xi = DualConfiguration::new(&spec, Configuration::empty(&spec));
        xi.extra[0][0] = 2; // two species-1 on the left extra-site
        xi.extra[1][1] = 1; // one species-2 on the right
        let expect = frac(1, 2) * frac(1, 2) * frac(3, 10);
        assert_eq!(duality_value(&spec, &n, &xi), expect);
    }

    #[test]
    fn dual_moves_hand_enumerated() {
        let spec = chain3();
        // One dual particle of species 2 at site 1 (vertex 0).
        let q = CorrelationQuery::new(vec![1], vec![2]).unwrap();
        let xi = DualConfiguration::from_query(&spec, &q).unwrap();
        let moves = enumerate_dual_moves_exact(&spec, &xi);
        // One edge hop to vertex 1 (rate 1) and one absorption (rate |alpha| = 1).
        assert_eq!(moves.len(), 2);
        let total: Ratio = ratio::sum(&moves.iter().map(|(_, r)| r.clone()).collect::<Vec<_>>());
        assert_eq!(total, int(2));
        assert!(moves.iter().any(|(next, _)| next.extra[0][1] == 1));
    }

    #[test]
    fn frozen_dual_when_bulk_is_empty() {
        let spec = chain3();
        let xi = DualConfiguration::new(&spec, Configuration::empty(&spec));
        assert!(enumerate_dual_moves_exact(&spec, &xi).is_empty());
        let outcome =
            simulate_to_absorption(&spec, &xi, &mut trial_rng(1, 0)).unwrap();
        assert_eq!(outcome.tallies, vec![vec![0, 0], vec![0, 0]]);
    }

    #[test]
    fn adjacent_dual_particles_swap_at_rate_one() {
        let spec = chain3();
        let q = CorrelationQuery::new(vec![1, 2], vec![1, 2]).unwrap();
        let xi = DualConfiguration::from_query(&spec, &q).unwrap();
        let moves = enumerate_dual_moves_exact(&spec, &xi);
        let swap = moves
            .iter()
            .filter(|(next, _)| {
                next.bulk.get(0, 1) == 1 && next.bulk.get(1, 0) == 1
            })
            .collect::<Vec<_>>();
        assert_eq!(swap.len(), 1);
        assert_eq!(swap[0].1, int(1));
    }

    #[test]
    fn species_totals_conserved_along_dual_runs() {
        let spec = chain3();
        let q = CorrelationQuery::new(vec![1, 3], vec![1, 2]).unwrap();
        let mut xi = DualConfiguration::from_query(&spec, &q).unwrap();
        let mut rng = trial_rng(3, 1);
        let totals: Vec<u32> = (0..2).map(|a| xi.species_total(a)).collect();
        let mut last_bulk = xi.bulk_particles();
        for _ in 0..200 {
            match dual_step(&spec, &xi, &mut rng) {
                Some((_, next)) => xi = next,
                None => break,
            }
            for a in 0..2 {
                assert_eq!(xi.species_total(a), totals[a]);
            }
            // Bulk count never increases.
            assert!(xi.bulk_particles() <= last_bulk);
            last_bulk = xi.bulk_particles();
        }
    }

    #[test]
    fn single_site_race_between_reservoirs() {
        // L = 1 chain with |alpha| != |beta|: left absorption probability is
        // |alpha| / (|alpha| + |beta|). 1e5 trials, 4 standard errors.
        let spec = ProcessSpec::chain(
            1,
            1,
            2,
            vec![int(2), int(1)],    // |alpha| = 3
            vec![frac(1, 2), frac(1, 2)], // |beta| = 1
        )
        .unwrap();
        let q = CorrelationQuery::new(vec![1], vec![1]).unwrap();
        let xi0 = DualConfiguration::from_query(&spec, &q).unwrap();
        let p_expect = 0.75;
        let trials = 100_000u64;
        let lefts: Vec<f64> = (0..trials)
            .map(|trial| {
                let mut rng = trial_rng(21, trial);
                let outcome = simulate_to_absorption(&spec, &xi0, &mut rng).unwrap();
                outcome.tallies[0][0] as f64
            })
            .collect();
        let (mean, se) = mean_stderr(&lefts);
        assert!((mean - p_expect).abs() < 4.0 * se, "mean {mean} se {se}");
        // And the exact solver nails it.
        let dist = absorption_probabilities_exact(&spec, &xi0, 1000).unwrap();
        let p_left: Ratio = dist
            .iter()
            .filter(|(o, _)| o.tallies[0][0] == 1)
            .map(|(_, p)| p.clone())
            .fold(Ratio::zero(), |acc, p| acc + p);
        assert_eq!(p_left, frac(3, 4));
    }

    #[test]
    fn gambler_ruin_absorption_on_integrable_chain() {
        // L = 3 chain, single dual particle at site 1: left absorption 3/4.
        let spec = chain3();
        let q = CorrelationQuery::new(vec![1], vec![1]).unwrap();
        let xi0 = DualConfiguration::from_query(&spec, &q).unwrap();
        let dist = absorption_probabilities_exact(&spec, &xi0, 10_000).unwrap();
        let total: Ratio = ratio::sum(&dist.iter().map(|(_, p)| p.clone()).collect::<Vec<_>>());
        assert_eq!(total, int(1));
        let p_left: Ratio = dist
            .iter()
            .filter(|(o, _)| o.tallies[0][0] == 1)
            .map(|(_, p)| p.clone())
            .fold(Ratio::zero(), |acc, p| acc + p);
        assert_eq!(p_left, frac(3, 4));
        // Monte Carlo agrees within 4 standard errors.
        let trials = 100_000u64;
        let lefts: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(99, trial);
                let o = simulate_to_absorption(&spec, &xi0, &mut rng).unwrap();
                o.tallies[0][0] as f64
            })
            .collect();
        let (mean, se) = mean_stderr(&lefts);
        assert!((mean - 0.75).abs() < 4.0 * se);
    }

    #[test]
    fn equilibrium_correlation_collapses_to_product() {
        // alpha = beta: absorption probabilities sum against equal densities,
        // so the correlation is the plain product of alphas.
        let alpha = vec![frac(1, 2), frac(1, 4), frac(1, 4)];
        let spec = ProcessSpec::chain(3, 1, 3, alpha.clone(), alpha).unwrap();
        let q = CorrelationQuery::new(vec![1, 3], vec![1, 2]).unwrap();
        let c = correlation_via_absorption(&spec, &q).unwrap();
        assert_eq!(c, frac(1, 2) * frac(1, 4));
    }

    #[test]
    fn duality_check_at_time_zero_is_exact() {
        let spec = chain3();
        let n = Configuration::from_tau(&[1, 3, 3], 3);
        let q = CorrelationQuery::new(vec![1], vec![1]).unwrap();
        let xi = DualConfiguration::from_query(&spec, &q).unwrap();
        let check = mc_duality_check(&spec, &n, &xi, 0.0, 200, 5);
        assert_eq!(check.forward_mean, check.dual_mean);
        assert_eq!(check.z_score, 0.0);
    }
}
