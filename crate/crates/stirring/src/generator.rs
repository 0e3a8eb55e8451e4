//! The forward process: transition enumeration and an event-driven
//! continuous-time Monte Carlo engine.
//!
//! Moves come in two kinds. On an edge `(x, y)` one unit of `A` at `x` swaps
//! with one unit of `B` at `y` at rate `omega_xy * n_A^x * n_B^y`; at a
//! coupled vertex a unit of `B` is replaced by `A` at rate
//! `gamma * alpha_A * n_B^x`. Moves with `A = B` leave the configuration
//! unchanged and are omitted throughout.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Configuration, ProcessSpec};
use crate::ratio::{self, Ratio};

/// A single enabled transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// One unit of species `a` at `x` trades places with one unit of `b` at `y`.
    EdgeSwap { x: usize, y: usize, a: usize, b: usize },
    /// One unit of `old` at `x` is replaced by `new`.
    SiteReplace { x: usize, new: usize, old: usize },
}

/// A move together with its rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatedMove {
    pub mv: Move,
    pub rate: f64,
}

/// Applies a move in place. Panics if the move is not enabled.
pub fn apply_move(config: &mut Configuration, mv: Move) {
    match mv {
        Move::EdgeSwap { x, y, a, b } => {
            assert!(config.get(x, a) > 0 && config.get(y, b) > 0, "move not enabled");
            config.set(x, a, config.get(x, a) - 1);
            config.set(x, b, config.get(x, b) + 1);
            config.set(y, a, config.get(y, a) + 1);
            config.set(y, b, config.get(y, b) - 1);
        }
        Move::SiteReplace { x, new, old } => {
            assert!(config.get(x, old) > 0, "move not enabled");
            config.set(x, old, config.get(x, old) - 1);
            config.set(x, new, config.get(x, new) + 1);
        }
    }
}

/// Exact rational rate of a move in `config`.
pub fn move_rate_exact(spec: &ProcessSpec, config: &Configuration, mv: Move) -> Ratio {
    match mv {
        Move::EdgeSwap { x, y, a, b } => {
            let omega = spec
                .graph
                .edges
                .iter()
                .filter(|(u, v, _)| (*u == x && *v == y) || (*u == y && *v == x))
                .map(|(_, _, w)| w.clone())
                .fold(num::Zero::zero(), |acc: Ratio, w| acc + w);
            omega * ratio::int((config.get(x, a) * config.get(y, b)) as i64)
        }
        Move::SiteReplace { x, new, old } => {
            let rates = spec.effective_site_rates(x);
            &rates[new] * ratio::int(config.get(x, old) as i64)
        }
    }
}

/// Every move with positive rate out of `config` (rates as doubles).
pub fn enumerate_moves(spec: &ProcessSpec, config: &Configuration) -> Vec<RatedMove> {
    let n = spec.n_species;
    let mut out = Vec::new();
    for (x, y, w) in &spec.graph.edges {
        let omega = ratio::to_f64(w);
        if omega <= 0.0 {
            continue;
        }
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let weight = config.get(*x, a) as f64 * config.get(*y, b) as f64;
                if weight > 0.0 {
                    out.push(RatedMove {
                        mv: Move::EdgeSwap { x: *x, y: *y, a, b },
                        rate: omega * weight,
                    });
                }
            }
        }
    }
    for x in spec.coupled_vertices() {
        let rates: Vec<f64> = spec
            .effective_site_rates(x)
            .iter()
            .map(ratio::to_f64)
            .collect();
        for new in 0..n {
            for old in 0..n {
                if new == old {
                    continue;
                }
                let rate = rates[new] * config.get(x, old) as f64;
                if rate > 0.0 {
                    out.push(RatedMove {
                        mv: Move::SiteReplace { x, new, old },
                        rate,
                    });
                }
            }
        }
    }
    out
}

/// Moves with exact rational rates, for generator assembly and exact checks.
pub fn enumerate_moves_exact(
    spec: &ProcessSpec,
    config: &Configuration,
) -> Vec<(Configuration, Ratio)> {
    let n = spec.n_species;
    let mut out = Vec::new();
    let mut emit = |mv: Move, rate: Ratio| {
        let mut next = config.clone();
        apply_move(&mut next, mv);
        out.push((next, rate));
    };
    for (x, y, w) in &spec.graph.edges {
        if !num::Signed::is_positive(w) {
            continue;
        }
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let weight = config.get(*x, a) * config.get(*y, b);
                if weight > 0 {
                    emit(
                        Move::EdgeSwap { x: *x, y: *y, a, b },
                        w * ratio::int(weight as i64),
                    );
                }
            }
        }
    }
    for x in spec.coupled_vertices() {
        let rates = spec.effective_site_rates(x);
        for new in 0..n {
            for old in 0..n {
                if new == old {
                    continue;
                }
                if config.get(x, old) > 0 && num::Signed::is_positive(&rates[new]) {
                    emit(
                        Move::SiteReplace { x, new, old },
                        &rates[new] * ratio::int(config.get(x, old) as i64),
                    );
                }
            }
        }
    }
    out
}

/// Sum of all enabled move rates; zero only for frozen configurations.
pub fn total_exit_rate(spec: &ProcessSpec, config: &Configuration) -> f64 {
    enumerate_moves(spec, config).iter().map(|m| m.rate).sum()
}

/// One recorded trajectory of the jump chain.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub initial: Configuration,
    /// Absolute event times with the move fired at each; strictly increasing.
    pub events: Vec<(f64, Move)>,
    pub final_config: Configuration,
}

impl Trajectory {
    /// Replays the moves from the initial configuration and checks the
    /// invariants (increasing times, exclusion, final state).
    pub fn replay(&self, spec: &ProcessSpec) -> Result<Configuration> {
        let mut config = self.initial.clone();
        let mut last = 0.0;
        for (t, mv) in &self.events {
            if *t <= last {
                return Err(Error::InvalidSpec("trajectory times not increasing".into()));
            }
            last = *t;
            apply_move(&mut config, *mv);
            if !config.respects(spec) {
                return Err(Error::InvalidSpec("trajectory breaks exclusion".into()));
            }
        }
        if config != self.final_config {
            return Err(Error::InvalidSpec("trajectory final state mismatch".into()));
        }
        Ok(config)
    }
}

/// How often the event loop rebuilds all rates from scratch to bound
/// floating-point drift from incremental updates.
const FULL_REBUILD_PERIOD: u64 = 1 << 16;

/// Event-driven simulator holding its own mutable state and rate cache.
///
/// Rates are recomputed locally (only units touching the moved vertices)
/// after each event, with a full rebuild every [`FULL_REBUILD_PERIOD`] steps.
pub struct Simulator<'s> {
    spec: &'s ProcessSpec,
    pub config: Configuration,
    pub time: f64,
    edge_omega: Vec<f64>,
    edge_rate: Vec<f64>,
    coupled: Vec<usize>,
    site_alpha: Vec<Vec<f64>>,
    site_rate: Vec<f64>,
    vertex_edges: Vec<Vec<usize>>,
    vertex_site: Vec<Option<usize>>,
    total: f64,
    steps: u64,
}

impl<'s> Simulator<'s> {
    pub fn new(spec: &'s ProcessSpec, config: Configuration) -> Self {
        assert!(config.respects(spec), "initial configuration breaks exclusion");
        let coupled = spec.coupled_vertices();
        let site_alpha: Vec<Vec<f64>> = coupled
            .iter()
            .map(|&x| spec.effective_site_rates(x).iter().map(ratio::to_f64).collect())
            .collect();
        let mut vertex_edges = vec![Vec::new(); spec.graph.n_vertices];
        for (i, (x, y, _)) in spec.graph.edges.iter().enumerate() {
            vertex_edges[*x].push(i);
            vertex_edges[*y].push(i);
        }
        let mut vertex_site = vec![None; spec.graph.n_vertices];
        for (i, &x) in coupled.iter().enumerate() {
            vertex_site[x] = Some(i);
        }
        let mut sim = Simulator {
            spec,
            config,
            time: 0.0,
            edge_omega: spec.graph.edges.iter().map(|(_, _, w)| ratio::to_f64(w)).collect(),
            edge_rate: vec![0.0; spec.graph.edges.len()],
            coupled,
            site_alpha,
            site_rate: Vec::new(),
            vertex_edges,
            vertex_site,
            total: 0.0,
            steps: 0,
        };
        sim.site_rate = vec![0.0; sim.coupled.len()];
        sim.rebuild_rates();
        sim
    }

    /// Total exit rate of an edge: `omega * (nu^2 - sum_A n_A^x n_A^y)`.
    fn edge_exit(&self, i: usize) -> f64 {
        let (x, y, _) = self.spec.graph.edges[i];
        let nu = self.spec.capacity as f64;
        let mut same = 0.0;
        for a in 0..self.spec.n_species {
            same += self.config.get(x, a) as f64 * self.config.get(y, a) as f64;
        }
        self.edge_omega[i] * (nu * nu - same)
    }

    /// Total exit rate of a coupled site: `|alpha| nu - sum_A alpha_A n_A^x`.
    fn site_exit(&self, i: usize) -> f64 {
        let x = self.coupled[i];
        let alpha = &self.site_alpha[i];
        let nu = self.spec.capacity as f64;
        let total: f64 = alpha.iter().sum();
        let mut same = 0.0;
        for a in 0..self.spec.n_species {
            same += alpha[a] * self.config.get(x, a) as f64;
        }
        total * nu - same
    }

    fn rebuild_rates(&mut self) {
        for i in 0..self.edge_rate.len() {
            self.edge_rate[i] = self.edge_exit(i);
        }
        for i in 0..self.site_rate.len() {
            self.site_rate[i] = self.site_exit(i);
        }
        self.total = self.edge_rate.iter().sum::<f64>() + self.site_rate.iter().sum::<f64>();
    }

    fn refresh_vertex(&mut self, x: usize) {
        for &i in &self.vertex_edges[x].clone() {
            self.total += -self.edge_rate[i] + self.edge_exit(i);
            self.edge_rate[i] = self.edge_exit(i);
        }
        if let Some(i) = self.vertex_site[x] {
            self.total += -self.site_rate[i] + self.site_exit(i);
            self.site_rate[i] = self.site_exit(i);
        }
    }

    pub fn total_rate(&self) -> f64 {
        self.total
    }

    fn draw_holding(&self, rng: &mut impl Rng) -> f64 {
        -(1.0 - rng.gen::<f64>()).ln() / self.total
    }

    /// Fires one event: samples the exponential holding time and a move with
    /// probability proportional to its rate. Errors with [`Error::Frozen`]
    /// when nothing is enabled.
    pub fn step(&mut self, rng: &mut impl Rng) -> Result<(f64, Move)> {
        if self.total <= 0.0 {
            return Err(Error::Frozen);
        }
        let holding = self.draw_holding(rng);
        let mv = self.fire(rng)?;
        self.time += holding;
        Ok((holding, mv))
    }

    /// Chooses and applies one move without advancing the clock.
    fn fire(&mut self, rng: &mut impl Rng) -> Result<Move> {
        let mut target = rng.gen::<f64>() * self.total;
        let mut chosen: Option<Move> = None;
        'outer: {
            for i in 0..self.edge_rate.len() {
                if target < self.edge_rate[i] {
                    chosen = Some(self.pick_edge_move(i, target));
                    break 'outer;
                }
                target -= self.edge_rate[i];
            }
            for i in 0..self.site_rate.len() {
                if target < self.site_rate[i] {
                    chosen = Some(self.pick_site_move(i, target));
                    break 'outer;
                }
                target -= self.site_rate[i];
            }
            // Rounding pushed us past the end; take the last enabled move.
            let moves = enumerate_moves(self.spec, &self.config);
            chosen = moves.last().map(|m| m.mv);
        }
        let mv = chosen.ok_or(Error::Frozen)?;
        apply_move(&mut self.config, mv);
        match mv {
            Move::EdgeSwap { x, y, .. } => {
                self.refresh_vertex(x);
                self.refresh_vertex(y);
            }
            Move::SiteReplace { x, .. } => self.refresh_vertex(x),
        }
        self.steps += 1;
        if self.steps % FULL_REBUILD_PERIOD == 0 {
            self.rebuild_rates();
        }
        Ok(mv)
    }

    fn pick_edge_move(&self, i: usize, mut target: f64) -> Move {
        let (x, y, _) = self.spec.graph.edges[i];
        let omega = self.edge_omega[i];
        let n = self.spec.n_species;
        let mut last = None;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let rate = omega * self.config.get(x, a) as f64 * self.config.get(y, b) as f64;
                if rate <= 0.0 {
                    continue;
                }
                last = Some(Move::EdgeSwap { x, y, a, b });
                if target < rate {
                    return last.unwrap();
                }
                target -= rate;
            }
        }
        last.expect("edge with positive rate has an enabled move")
    }

    fn pick_site_move(&self, i: usize, mut target: f64) -> Move {
        let x = self.coupled[i];
        let alpha = &self.site_alpha[i];
        let n = self.spec.n_species;
        let mut last = None;
        for new in 0..n {
            for old in 0..n {
                if new == old {
                    continue;
                }
                let rate = alpha[new] * self.config.get(x, old) as f64;
                if rate <= 0.0 {
                    continue;
                }
                last = Some(Move::SiteReplace { x, new, old });
                if target < rate {
                    return last.unwrap();
                }
                target -= rate;
            }
        }
        last.expect("site with positive rate has an enabled move")
    }

    /// Runs until `self.time >= t`, leaving the state at the configuration
    /// holding at time `t`. Frozen states simply wait out the clock.
    pub fn run_until(&mut self, t: f64, rng: &mut impl Rng) {
        while self.time < t {
            if self.total <= 0.0 {
                break;
            }
            let holding = self.draw_holding(rng);
            if self.time + holding > t {
                break;
            }
            self.time += holding;
            if self.fire(rng).is_err() {
                break;
            }
        }
        self.time = t.max(self.time);
    }
}

/// RNG stream for one trial: a fixed 64-bit seed with one ChaCha stream per
/// trial, so trials are independent and reproducible in any execution order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Simulates from `init` to time `t` and returns the configuration.
pub fn simulate_to_time(
    spec: &ProcessSpec,
    init: &Configuration,
    t: f64,
    rng: &mut impl Rng,
) -> Configuration {
    let mut sim = Simulator::new(spec, init.clone());
    sim.run_until(t, rng);
    sim.config
}

/// Simulates to time `t` recording every event.
pub fn record_trajectory(
    spec: &ProcessSpec,
    init: &Configuration,
    t: f64,
    rng: &mut impl Rng,
) -> Trajectory {
    let mut sim = Simulator::new(spec, init.clone());
    let mut events = Vec::new();
    while sim.time < t && sim.total_rate() > 0.0 {
        match sim.step(rng) {
            Ok((_, mv)) if sim.time <= t => events.push((sim.time, mv)),
            _ => break,
        }
    }
    // The last step may have overshot t; rebuild the state from the kept
    // events so that final_config is the configuration holding at time t.
    let mut final_config = init.clone();
    for (_, mv) in &events {
        apply_move(&mut final_config, *mv);
    }
    Trajectory {
        initial: init.clone(),
        events,
        final_config,
    }
}

/// Monte Carlo estimate of `E_init[f(n(t))]` over independent trials.
///
/// Returns `(mean, standard error)`. Trials run in parallel; each owns its
/// RNG stream and the reduction order is fixed, so results are reproducible.
pub fn estimate_expectation<F>(
    spec: &ProcessSpec,
    init: &Configuration,
    observable: F,
    t: f64,
    trials: u64,
    seed: u64,
) -> (f64, f64)
where
    F: Fn(&Configuration) -> f64 + Sync,
{
    assert!(trials >= 1);
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let end = simulate_to_time(spec, init, t, &mut rng);
            observable(&end)
        })
        .collect();
    mean_stderr(&values)
}

/// Sample mean and standard error of a batch of values.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
