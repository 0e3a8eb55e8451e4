//! Enumeration of finite state spaces.
//!
//! Full configurations are indexed lexicographically in (vertex, occupation
//! vector): vertex 0 is the most significant digit and single-site occupancy
//! vectors are ordered lexicographically ascending. This order is frozen so
//! matrices are reproducible across runs.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice::{Configuration, ProcessSpec};

/// Dimension of the single-site space: `(N + nu - 1)! / (nu! (N-1)!)`.
pub fn site_dimension(capacity: u32, n_species: usize) -> usize {
    // Product form of the binomial keeps everything in u128.
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for k in 0..(n_species as u128 - 1) {
        num *= capacity as u128 + 1 + k;
        den *= 1 + k;
    }
    (num / den) as usize
}

fn enumerate_site_states(capacity: u32, n_species: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n_species);
    fn rec(prefix: &mut Vec<u32>, left: u32, slots: usize, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in 0..=left {
            prefix.push(v);
            rec(prefix, left - v, slots - 1, out);
            prefix.pop();
        }
    }
    rec(&mut prefix, capacity, n_species, &mut out);
    out
}

/// Bijection between configurations and dense indices `0..dim`.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub n_sites: usize,
    pub capacity: u32,
    pub n_species: usize,
    site_states: Vec<Vec<u32>>,
    site_rank: HashMap<Vec<u32>, usize>,
    pub dim: usize,
}

impl StateSpace {
    pub fn new(n_sites: usize, capacity: u32, n_species: usize) -> Result<Self> {
        let site_states = enumerate_site_states(capacity, n_species);
        let m = site_states.len();
        debug_assert_eq!(m, site_dimension(capacity, n_species));
        let dim = m
            .checked_pow(n_sites as u32)
            .filter(|&d| d <= 100_000_000)
            .ok_or_else(|| {
                Error::TooLarge(format!("state space {m}^{n_sites} exceeds the cap"))
            })?;
        let site_rank = site_states
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        Ok(StateSpace {
            n_sites,
            capacity,
            n_species,
            site_states,
            site_rank,
            dim,
        })
    }

    pub fn for_spec(spec: &ProcessSpec) -> Result<Self> {
        StateSpace::new(spec.graph.n_vertices, spec.capacity, spec.n_species)
    }

    /// Number of single-site occupancy vectors.
    pub fn site_dim(&self) -> usize {
        self.site_states.len()
    }

    pub fn site_state(&self, rank: usize) -> &[u32] {
        &self.site_states[rank]
    }

    pub fn site_state_rank(&self, state: &[u32]) -> usize {
        self.site_rank[state]
    }

    /// Dense index of a configuration (vertex 0 most significant).
    pub fn index(&self, config: &Configuration) -> usize {
        debug_assert_eq!(config.n_vertices(), self.n_sites);
        let m = self.site_dim();
        let mut idx = 0usize;
        for x in 0..self.n_sites {
            idx = idx * m + self.site_rank[config.site(x)];
        }
        idx
    }

    /// Configuration at a dense index.
    pub fn config(&self, mut idx: usize) -> Configuration {
        let m = self.site_dim();
        let mut ranks = vec![0usize; self.n_sites];
        for x in (0..self.n_sites).rev() {
            ranks[x] = idx % m;
            idx /= m;
        }
        let mut counts = Vec::with_capacity(self.n_sites * self.n_species);
        for r in ranks {
            counts.extend_from_slice(&self.site_states[r]);
        }
        Configuration::new(counts, self.n_species)
    }

    /// Per-site ranks of an index without building the configuration.
    pub fn site_ranks(&self, mut idx: usize) -> Vec<usize> {
        let m = self.site_dim();
        let mut ranks = vec![0usize; self.n_sites];
        for x in (0..self.n_sites).rev() {
            ranks[x] = idx % m;
            idx /= m;
        }
        ranks
    }

    /// Index with the site ranks replaced at the given vertices.
    pub fn index_with(&self, base_ranks: &[usize], replace: &[(usize, usize)]) -> usize {
        let m = self.site_dim();
        let mut idx = 0usize;
        for (x, &rank) in base_ranks.iter().enumerate() {
            let r = replace
                .iter()
                .find(|(v, _)| *v == x)
                .map(|(_, nr)| *nr)
                .unwrap_or(rank);
            idx = idx * m + r;
        }
        idx
    }

    /// Particles (non-holes) in the configuration at `idx`.
    pub fn particle_count(&self, idx: usize) -> u32 {
        self.site_ranks(idx)
            .iter()
            .map(|&r| self.site_states[r][..self.n_species - 1].iter().sum::<u32>())
            .sum()
    }
}

/// Dual state space: bulk configurations paired with per-reservoir absorbed
/// tallies, truncated to `bulk + absorbed <= cap` dual particles in total.
///
/// The dual dynamics conserves the per-species total (bulk plus extra), so
/// this sector is closed and the truncation is exact for initial conditions
/// with at most `cap` dual particles.
#[derive(Debug, Clone)]
pub struct DualSpace {
    pub bulk: StateSpace,
    /// Indices into `spec.reservoirs` of the active reservoirs, in order;
    /// extra tallies are flattened as `reservoir_slot * (N-1) + species`.
    pub reservoir_slots: Vec<usize>,
    pub cap: u32,
    states: Vec<(usize, Vec<u32>)>,
    rank: HashMap<(usize, Vec<u32>), usize>,
}

impl DualSpace {
    pub fn new(spec: &ProcessSpec, cap: u32) -> Result<Self> {
        let bulk = StateSpace::for_spec(spec)?;
        let reservoir_slots = spec.active_reservoirs();
        let width = reservoir_slots.len() * (spec.n_species - 1);
        let mut states = Vec::new();
        for b in 0..bulk.dim {
            let particles = bulk.particle_count(b);
            if particles > cap {
                continue;
            }
            let budget = cap - particles;
            let mut extras = Vec::new();
            enumerate_bounded(width, budget, &mut Vec::with_capacity(width), &mut extras);
            for e in extras {
                states.push((b, e));
            }
        }
        if states.len() > 50_000_000 {
            return Err(Error::TooLarge(format!(
                "dual sector has {} states",
                states.len()
            )));
        }
        let rank = states
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        Ok(DualSpace {
            bulk,
            reservoir_slots,
            cap,
            states,
            rank,
        })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, idx: usize) -> (usize, &[u32]) {
        let (b, e) = &self.states[idx];
        (*b, e)
    }

    pub fn index(&self, bulk_idx: usize, extra: &[u32]) -> Option<usize> {
        self.rank.get(&(bulk_idx, extra.to_vec())).copied()
    }

    /// Flat slot of reservoir `slot` and species `a` in the extra vector.
    pub fn extra_slot(&self, reservoir_slot: usize, species: usize) -> usize {
        reservoir_slot * (self.bulk.n_species - 1) + species
    }

    /// Total dual particles (bulk + absorbed) in a state.
    pub fn total_particles(&self, idx: usize) -> u32 {
        let (b, e) = self.state(idx);
        self.bulk.particle_count(b) + e.iter().sum::<u32>()
    }
}

/// All nonnegative vectors of the given width with sum at most `budget`,
/// lexicographically ascending.
fn enumerate_bounded(width: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if width == 0 {
        out.push(prefix.clone());
        return;
    }
    for v in 0..=budget {
        prefix.push(v);
        enumerate_bounded(width - 1, budget - v, prefix, out);
        prefix.pop();
    }
}
