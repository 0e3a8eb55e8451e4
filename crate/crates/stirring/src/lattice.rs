//! Model instances: graphs, reservoirs, occupancy configurations, reversible
//! product measures, and the JSON spec-file format.
//!
//! # Indexing conventions
//!
//! * Vertices are dense ids `0..n_vertices`. The chain constructor maps
//!   physical sites `1..=L` to ids `0..L-1`; user-facing site numbers
//!   (queries, CLI, JSON) stay 1-based and are converted at this boundary.
//! * Species are stored 0-based: index `a` in `0..N-1` is species `a + 1`
//!   of the usual 1-based convention, and index `N - 1` is the hole slot.
//!   User-facing species labels are 1-based with `N` = holes.

use std::collections::HashMap;

use num::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ratio::{self, Ratio};

/// Undirected finite graph with per-edge conductances.
#[derive(Debug, Clone)]
pub struct Graph {
    pub n_vertices: usize,
    /// Unordered vertex pairs with conductance `omega >= 0`.
    pub edges: Vec<(usize, usize, Ratio)>,
}

impl Graph {
    /// Nearest-neighbour chain on `l` vertices with unit conductances.
    pub fn chain(l: usize) -> Self {
        let edges = (0..l.saturating_sub(1))
            .map(|x| (x, x + 1, Ratio::one()))
            .collect();
        Graph {
            n_vertices: l,
            edges,
        }
    }

    /// Star with a centre vertex `0` and `leaves` outer vertices.
    pub fn star(leaves: usize) -> Self {
        let edges = (1..=leaves).map(|x| (0, x, Ratio::one())).collect();
        Graph {
            n_vertices: leaves + 1,
            edges,
        }
    }

    /// Vertices adjacent to `x` through positive-conductance edges.
    pub fn neighbors(&self, x: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (u, v, w) in &self.edges {
            if w.is_positive() {
                if *u == x {
                    out.push(*v);
                } else if *v == x {
                    out.push(*u);
                }
            }
        }
        out
    }

    fn connected(&self) -> bool {
        if self.n_vertices == 0 {
            return false;
        }
        let mut seen = vec![false; self.n_vertices];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for y in self.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// One reservoir: a coupling strength and a full rate vector
/// `alpha = (alpha_1, ..., alpha_N)` (last entry drives removals).
///
/// A vertex may carry several reservoirs; the chain with `L = 1` has both
/// boundary reservoirs on its single site. Each reservoir owns one absorbing
/// extra-site in the dual process.
#[derive(Debug, Clone)]
pub struct Reservoir {
    pub vertex: usize,
    pub gamma: Ratio,
    pub alpha: Vec<Ratio>,
}

impl Reservoir {
    /// Total rate `|alpha|`.
    pub fn alpha_total(&self) -> Ratio {
        ratio::sum(&self.alpha)
    }

    /// Reservoir densities `rho_A = alpha_A / |alpha|`.
    pub fn densities(&self) -> Vec<Ratio> {
        let tot = self.alpha_total();
        self.alpha.iter().map(|a| a / &tot).collect()
    }
}

/// Marker carried by chain-shaped specs (sites `1..=len` left to right).
#[derive(Debug, Clone, Copy)]
pub struct ChainInfo {
    pub len: usize,
}

/// A full model instance.
#[derive(Debug, Clone)]
pub struct ProcessSpec {
    pub graph: Graph,
    /// Number of slots per species vector, `N >= 2` (slot `N` holds holes).
    pub n_species: usize,
    /// Maximal occupancy `nu >= 1`.
    pub capacity: u32,
    pub reservoirs: Vec<Reservoir>,
    pub chain: Option<ChainInfo>,
}

/// How the reservoir parameters sit relative to reversibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReversibilityClass {
    /// Identical effective rate vectors on every coupled vertex.
    Homogeneous,
    /// Proportional rate vectors (equal densities, different strengths).
    Generalized,
    /// Distinct densities somewhere: a current flows.
    None,
}

/// Per-vertex occupation vectors, flattened vertex-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    counts: Vec<u32>,
    n_species: usize,
}

impl Configuration {
    pub fn new(counts: Vec<u32>, n_species: usize) -> Self {
        assert!(n_species >= 2 && counts.len() % n_species == 0);
        Configuration { counts, n_species }
    }

    /// All `nu` slots of every vertex filled with holes.
    pub fn empty(spec: &ProcessSpec) -> Self {
        let mut counts = vec![0u32; spec.graph.n_vertices * spec.n_species];
        for x in 0..spec.graph.n_vertices {
            counts[x * spec.n_species + spec.n_species - 1] = spec.capacity;
        }
        Configuration {
            counts,
            n_species: spec.n_species,
        }
    }

    /// Every slot of every vertex filled with species `a` (0-based).
    pub fn full(spec: &ProcessSpec, a: usize) -> Self {
        let mut counts = vec![0u32; spec.graph.n_vertices * spec.n_species];
        for x in 0..spec.graph.n_vertices {
            counts[x * spec.n_species + a] = spec.capacity;
        }
        Configuration {
            counts,
            n_species: spec.n_species,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.counts.len() / self.n_species
    }

    pub fn n_species(&self) -> usize {
        self.n_species
    }

    /// Occupation `n_a^x` (0-based species index).
    #[inline]
    pub fn get(&self, x: usize, a: usize) -> u32 {
        self.counts[x * self.n_species + a]
    }

    #[inline]
    pub fn set(&mut self, x: usize, a: usize, v: u32) {
        self.counts[x * self.n_species + a] = v;
    }

    /// Occupation vector of one vertex.
    pub fn site(&self, x: usize) -> &[u32] {
        &self.counts[x * self.n_species..(x + 1) * self.n_species]
    }

    /// Particles (non-holes) at vertex `x`.
    pub fn particles_at(&self, x: usize) -> u32 {
        self.site(x)[..self.n_species - 1].iter().sum()
    }

    /// Total count of species `a` over the graph.
    pub fn species_total(&self, a: usize) -> u32 {
        (0..self.n_vertices()).map(|x| self.get(x, a)).sum()
    }

    /// Checks the exclusion constraint at every vertex.
    pub fn respects(&self, spec: &ProcessSpec) -> bool {
        self.n_species == spec.n_species
            && self.n_vertices() == spec.graph.n_vertices
            && (0..self.n_vertices())
                .all(|x| self.site(x).iter().sum::<u32>() == spec.capacity)
    }

    /// For unit occupancy, the per-site type labels `tau_x` (1-based, `N` = hole).
    pub fn to_tau(&self) -> Option<Vec<u32>> {
        let mut tau = Vec::with_capacity(self.n_vertices());
        for x in 0..self.n_vertices() {
            let site = self.site(x);
            if site.iter().sum::<u32>() != 1 {
                return None;
            }
            let a = site.iter().position(|&c| c == 1).unwrap();
            tau.push(a as u32 + 1);
        }
        Some(tau)
    }

    /// Inverse of [`Configuration::to_tau`].
    pub fn from_tau(tau: &[u32], n_species: usize) -> Self {
        let mut counts = vec![0u32; tau.len() * n_species];
        for (x, &t) in tau.iter().enumerate() {
            assert!((1..=n_species as u32).contains(&t));
            counts[x * n_species + (t as usize - 1)] = 1;
        }
        Configuration { counts, n_species }
    }
}

/// An m-point observable: strictly increasing 1-based sites with 1-based
/// species labels in `1..=N-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationQuery {
    pub sites: Vec<u32>,
    pub species: Vec<u32>,
}

impl CorrelationQuery {
    pub fn new(sites: Vec<u32>, species: Vec<u32>) -> Result<Self> {
        if sites.len() != species.len() || sites.is_empty() {
            return Err(Error::InvalidSpec(
                "query needs equally many sites and species".into(),
            ));
        }
        if !sites.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Unsupported(
                "query sites must be strictly increasing (repeated sites unsupported)".into(),
            ));
        }
        Ok(CorrelationQuery { sites, species })
    }

    pub fn order(&self) -> usize {
        self.sites.len()
    }

    pub fn validate_for(&self, spec: &ProcessSpec) -> Result<()> {
        let l = spec.graph.n_vertices as u32;
        for &x in &self.sites {
            if x == 0 || x > l {
                return Err(Error::InvalidSpec(format!("site {x} outside 1..={l}")));
            }
        }
        for &a in &self.species {
            if a == 0 || a as usize >= spec.n_species {
                return Err(Error::InvalidSpec(format!(
                    "species {a} outside 1..={}",
                    spec.n_species - 1
                )));
            }
        }
        Ok(())
    }
}

/// One invariant violation found by [`ProcessSpec::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl ProcessSpec {
    /// Two-reservoir chain: sites `1..=l`, unit conductances, couplings at
    /// both ends. For `l = 1` both reservoirs sit on the single site.
    pub fn chain(
        l: usize,
        capacity: u32,
        n_species: usize,
        alpha: Vec<Ratio>,
        beta: Vec<Ratio>,
    ) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidSpec("chain length must be >= 1".into()));
        }
        let spec = ProcessSpec {
            graph: Graph::chain(l),
            n_species,
            capacity,
            reservoirs: vec![
                Reservoir {
                    vertex: 0,
                    gamma: Ratio::one(),
                    alpha,
                },
                Reservoir {
                    vertex: l - 1,
                    gamma: Ratio::one(),
                    alpha: beta,
                },
            ],
            chain: Some(ChainInfo { len: l }),
        };
        let violations = spec.validate();
        if violations.is_empty() {
            Ok(spec)
        } else {
            Err(Error::InvalidSpec(
                violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            ))
        }
    }

    /// Left and right reservoir parameters of a chain spec.
    pub fn chain_boundaries(&self) -> Option<(&Reservoir, &Reservoir)> {
        self.chain?;
        Some((&self.reservoirs[0], &self.reservoirs[1]))
    }

    /// Effective site rate vector `sum_r gamma_r alpha^r` at vertex `x`.
    pub fn effective_site_rates(&self, x: usize) -> Vec<Ratio> {
        let mut rates = vec![Ratio::zero(); self.n_species];
        for r in &self.reservoirs {
            if r.vertex == x && r.gamma.is_positive() {
                for (acc, a) in rates.iter_mut().zip(&r.alpha) {
                    *acc += &r.gamma * a;
                }
            }
        }
        rates
    }

    /// Vertices carrying at least one active reservoir, ascending.
    pub fn coupled_vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self
            .reservoirs
            .iter()
            .filter(|r| r.gamma.is_positive())
            .map(|r| r.vertex)
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Indices into `reservoirs` of the active ones, in declaration order.
    pub fn active_reservoirs(&self) -> Vec<usize> {
        (0..self.reservoirs.len())
            .filter(|&r| self.reservoirs[r].gamma.is_positive())
            .collect()
    }

    /// Returns every invariant violation; an empty list means the spec is
    /// valid. Violations are data, not failures.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |location: &str, message: String| {
            out.push(Violation {
                location: location.to_string(),
                message,
            })
        };
        if self.n_species < 2 {
            push("spec", format!("N = {} but N >= 2 required", self.n_species));
        }
        if self.capacity == 0 {
            push("spec", "nu = 0: nothing can move".into());
        }
        if self.graph.n_vertices == 0 {
            push("graph", "empty vertex set".into());
        }
        for (i, (x, y, w)) in self.graph.edges.iter().enumerate() {
            if x == y {
                push(&format!("edge {i}"), format!("self-loop at vertex {x}"));
            }
            if *x >= self.graph.n_vertices || *y >= self.graph.n_vertices {
                push(&format!("edge {i}"), format!("endpoint out of range ({x},{y})"));
            }
            if w.is_negative() {
                push(&format!("edge {i}"), "negative conductance".into());
            }
        }
        if self.graph.n_vertices > 0 && !self.graph.connected() {
            push("graph", "graph not connected".into());
        }
        for (i, r) in self.reservoirs.iter().enumerate() {
            if r.vertex >= self.graph.n_vertices {
                push(&format!("reservoir {i}"), format!("vertex {} out of range", r.vertex));
                continue;
            }
            if r.gamma.is_negative() {
                push(&format!("reservoir {i}"), "negative coupling".into());
            }
            if r.gamma.is_positive() {
                if r.alpha.len() != self.n_species {
                    push(
                        &format!("reservoir {i} (vertex {})", r.vertex),
                        format!("alpha has {} entries, expected {}", r.alpha.len(), self.n_species),
                    );
                    continue;
                }
                for (a, val) in r.alpha.iter().enumerate() {
                    if !val.is_positive() {
                        push(
                            &format!("reservoir {i} (vertex {})", r.vertex),
                            format!("alpha for species {} must be positive", a + 1),
                        );
                    }
                }
            }
        }
        out
    }

    /// Classifies the reservoir parameters per the reversibility conditions:
    /// identical effective rate vectors give `Homogeneous`; the generalized
    /// condition `alpha_A^x (|alpha^y| - alpha_A^y) = alpha_A^y (|alpha^x| -
    /// alpha_A^x)` (equivalently, proportional vectors) gives `Generalized`.
    ///
    /// Comparisons are exact on the stored rationals, with a relative 1e-12
    /// fallback so parameters that arrived through binary floats still
    /// classify.
    pub fn reversibility_class(&self) -> ReversibilityClass {
        let coupled = self.coupled_vertices();
        if coupled.len() <= 1 {
            return ReversibilityClass::Homogeneous;
        }
        let rates: Vec<Vec<Ratio>> = coupled
            .iter()
            .map(|&x| self.effective_site_rates(x))
            .collect();
        let base = &rates[0];
        if rates[1..]
            .iter()
            .all(|r| r.iter().zip(base).all(|(u, v)| approx_eq(u, v)))
        {
            return ReversibilityClass::Homogeneous;
        }
        // The generalized condition: cross terms cancel, so it reduces to
        // alpha_A^x |alpha^y| = alpha_A^y |alpha^x| for each species A.
        let totals: Vec<Ratio> = rates.iter().map(|r| ratio::sum(r)).collect();
        for i in 1..rates.len() {
            for a in 0..self.n_species {
                let lhs = &rates[0][a] * &totals[i];
                let rhs = &rates[i][a] * &totals[0];
                if !approx_eq(&lhs, &rhs) {
                    return ReversibilityClass::None;
                }
            }
        }
        ReversibilityClass::Generalized
    }

    /// Common reservoir densities in the homogeneous/generalized classes.
    pub fn common_densities(&self) -> Result<Vec<Ratio>> {
        let coupled = self.coupled_vertices();
        let x = *coupled.first().ok_or_else(|| {
            Error::InvalidSpec("no coupled vertex: equilibrium density undefined".into())
        })?;
        let rates = self.effective_site_rates(x);
        let tot = ratio::sum(&rates);
        Ok(rates.into_iter().map(|r| r / &tot).collect())
    }

    /// Weight of `config` under the reversible product-multinomial measure.
    ///
    /// Rejects specs outside the homogeneous/generalized classes.
    pub fn reversible_weight(&self, config: &Configuration) -> Result<Ratio> {
        if self.reversibility_class() == ReversibilityClass::None {
            return Err(Error::Unsupported(
                "spec is not reversible: no product measure available".into(),
            ));
        }
        let rho = self.common_densities()?;
        let mut w = Ratio::one();
        for x in 0..self.graph.n_vertices {
            let site = config.site(x);
            w *= Ratio::from_integer(ratio::multinomial(self.capacity, site));
            for (a, &n) in site.iter().enumerate() {
                for _ in 0..n {
                    w *= &rho[a];
                }
            }
        }
        Ok(w)
    }
}

fn approx_eq(u: &Ratio, v: &Ratio) -> bool {
    if u == v {
        return true;
    }
    let diff = ratio::to_f64(&(u - v)).abs();
    let scale = ratio::to_f64(u).abs().max(ratio::to_f64(v).abs());
    scale > 0.0 && diff <= 1e-12 * scale
}

// ---------------------------------------------------------------------------
// JSON spec files
// ---------------------------------------------------------------------------
//
// General form:
//   { "graph": { "vertices": 3,
//                "edges": [[0, 1, 1], [1, 2, "1/2"]],
//                "gamma": {"0": 1, "2": 1} },
//     "N": 3, "nu": 1,
//     "alpha": {"0": [...N rationals...], "2": [...]} }
// Vertex ids are 0-based; `alpha` arrays list species 1..N-1 then the hole
// rate. Chain shorthand:
//   { "L": 3, "nu": 1, "N": 3, "alpha": [...], "beta": [...] }
// Numbers may be JSON numbers (parsed as exact decimals) or "p/q" strings.
// Unknown keys are rejected.

/// Parses a spec file in either the general or the chain form.
pub fn spec_from_json(text: &str) -> Result<ProcessSpec> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
    let obj = as_object(&value, "spec")?;
    if obj.contains_key("graph") {
        parse_general(obj)
    } else if obj.contains_key("L") {
        parse_chain(obj)
    } else {
        Err(Error::Parse(
            "spec must have either a \"graph\" block or chain keys {L, nu, N, alpha, beta}".into(),
        ))
    }
}

/// Serializes a spec back to the general JSON form (rationals as strings).
pub fn spec_to_json(spec: &ProcessSpec) -> Value {
    let edges: Vec<Value> = spec
        .graph
        .edges
        .iter()
        .map(|(x, y, w)| {
            Value::Array(vec![
                Value::from(*x),
                Value::from(*y),
                Value::String(ratio::render(w)),
            ])
        })
        .collect();
    let mut gamma = serde_json::Map::new();
    let mut alpha = serde_json::Map::new();
    for r in &spec.reservoirs {
        // One reservoir per vertex in the general file format; merged rates
        // are re-split by the chain shorthand only.
        gamma.insert(r.vertex.to_string(), Value::String(ratio::render(&r.gamma)));
        alpha.insert(
            r.vertex.to_string(),
            Value::Array(r.alpha.iter().map(|a| Value::String(ratio::render(a))).collect()),
        );
    }
    serde_json::json!({
        "graph": {
            "vertices": spec.graph.n_vertices,
            "edges": edges,
            "gamma": Value::Object(gamma),
        },
        "N": spec.n_species,
        "nu": spec.capacity,
        "alpha": Value::Object(alpha),
    })
}

fn as_object<'v>(
    value: &'v Value,
    what: &str,
) -> Result<&'v serde_json::Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::Parse(format!("{what} must be a JSON object")))
}

fn reject_unknown(obj: &serde_json::Map<String, Value>, allowed: &[&str], ctx: &str) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Parse(format!("unknown key {key:?} in {ctx}")));
        }
    }
    Ok(())
}

fn number_from_value(v: &Value, ctx: &str) -> Result<Ratio> {
    match v {
        // With arbitrary-precision JSON numbers the literal digits survive,
        // so 0.3 parses to exactly 3/10.
        Value::Number(n) => ratio::parse(&n.to_string()),
        Value::String(s) => ratio::parse(s),
        _ => Err(Error::Parse(format!("{ctx}: expected a number or \"p/q\" string"))),
    }
}

fn usize_from_value(v: &Value, ctx: &str) -> Result<usize> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| Error::Parse(format!("{ctx}: expected a nonnegative integer")))
}

fn rate_vector(v: &Value, n: usize, ctx: &str) -> Result<Vec<Ratio>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{ctx}: expected an array of {n} rates")))?;
    if arr.len() != n {
        return Err(Error::Parse(format!("{ctx}: expected {n} rates, got {}", arr.len())));
    }
    arr.iter().map(|x| number_from_value(x, ctx)).collect()
}

fn parse_general(obj: &serde_json::Map<String, Value>) -> Result<ProcessSpec> {
    reject_unknown(obj, &["graph", "N", "nu", "alpha"], "spec")?;
    let graph_obj = as_object(obj.get("graph").unwrap(), "graph")?;
    reject_unknown(graph_obj, &["vertices", "edges", "gamma"], "graph")?;
    let n_vertices = usize_from_value(
        graph_obj.get("vertices").ok_or_else(|| Error::Parse("graph.vertices missing".into()))?,
        "graph.vertices",
    )?;
    let mut edges = Vec::new();
    if let Some(e) = graph_obj.get("edges") {
        let arr = e
            .as_array()
            .ok_or_else(|| Error::Parse("graph.edges must be an array".into()))?;
        for (i, edge) in arr.iter().enumerate() {
            let t = edge
                .as_array()
                .filter(|t| t.len() == 3)
                .ok_or_else(|| Error::Parse(format!("edge {i} must be [x, y, omega]")))?;
            edges.push((
                usize_from_value(&t[0], "edge endpoint")?,
                usize_from_value(&t[1], "edge endpoint")?,
                number_from_value(&t[2], "edge conductance")?,
            ));
        }
    }
    let n_species = usize_from_value(
        obj.get("N").ok_or_else(|| Error::Parse("key N missing".into()))?,
        "N",
    )?;
    let capacity = usize_from_value(
        obj.get("nu").ok_or_else(|| Error::Parse("key nu missing".into()))?,
        "nu",
    )? as u32;

    let mut gamma_map: HashMap<usize, Ratio> = HashMap::new();
    if let Some(g) = graph_obj.get("gamma") {
        for (k, v) in as_object(g, "graph.gamma")? {
            let x: usize = k
                .parse()
                .map_err(|_| Error::Parse(format!("gamma key {k:?} is not a vertex id")))?;
            gamma_map.insert(x, number_from_value(v, "gamma")?);
        }
    }
    let mut alpha_map: HashMap<usize, Vec<Ratio>> = HashMap::new();
    if let Some(a) = obj.get("alpha") {
        for (k, v) in as_object(a, "alpha")? {
            let x: usize = k
                .parse()
                .map_err(|_| Error::Parse(format!("alpha key {k:?} is not a vertex id")))?;
            alpha_map.insert(x, rate_vector(v, n_species, "alpha")?);
        }
    }
    let mut reservoirs = Vec::new();
    let mut vertices: Vec<usize> = gamma_map.keys().copied().collect();
    vertices.sort_unstable();
    for x in vertices {
        let gamma = gamma_map.remove(&x).unwrap();
        let alpha = alpha_map.remove(&x).unwrap_or_default();
        reservoirs.push(Reservoir { vertex: x, gamma, alpha });
    }
    if let Some(x) = alpha_map.keys().next() {
        return Err(Error::Parse(format!("alpha given for vertex {x} without gamma")));
    }
    Ok(ProcessSpec {
        graph: Graph { n_vertices, edges },
        n_species,
        capacity,
        reservoirs,
        chain: None,
    })
}

fn parse_chain(obj: &serde_json::Map<String, Value>) -> Result<ProcessSpec> {
    reject_unknown(obj, &["L", "nu", "N", "alpha", "beta"], "chain spec")?;
    let l = usize_from_value(obj.get("L").unwrap(), "L")?;
    let n_species = usize_from_value(
        obj.get("N").ok_or_else(|| Error::Parse("key N missing".into()))?,
        "N",
    )?;
    let capacity = usize_from_value(
        obj.get("nu").ok_or_else(|| Error::Parse("key nu missing".into()))?,
        "nu",
    )? as u32;
    let alpha = rate_vector(
        obj.get("alpha").ok_or_else(|| Error::Parse("key alpha missing".into()))?,
        n_species,
        "alpha",
    )?;
    let beta = rate_vector(
        obj.get("beta").ok_or_else(|| Error::Parse("key beta missing".into()))?,
        n_species,
        "beta",
    )?;
    ProcessSpec::chain(l, capacity, n_species, alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{frac, int};

    fn norm3() -> (Vec<Ratio>, Vec<Ratio>) {
        (
            vec![frac(1, 2), frac(1, 4), frac(1, 4)],
            vec![frac(1, 10), frac(3, 10), frac(3, 5)],
        )
    }

    #[test]
    fn valid_chain_has_no_violations() {
        let (a, b) = norm3();
        let spec = ProcessSpec::chain(3, 1, 3, a, b).unwrap();
        assert!(spec.validate().is_empty());
        assert_eq!(spec.coupled_vertices(), vec![0, 2]);
    }

    #[test]
    fn zero_alpha_on_coupled_vertex_is_flagged() {
        let spec = ProcessSpec {
            graph: Graph::chain(2),
            n_species: 2,
            capacity: 1,
            reservoirs: vec![Reservoir {
                vertex: 0,
                gamma: int(1),
                alpha: vec![int(0), int(1)],
            }],
            chain: None,
        };
        let violations = spec.validate();
        assert_eq!(violations.len(), 1);
        assert!(violations[0].location.contains("vertex 0"));
        assert!(violations[0].message.contains("species 1"));
    }

    #[test]
    fn disconnected_graph_is_flagged() {
        let spec = ProcessSpec {
            graph: Graph {
                n_vertices: 3,
                edges: vec![(0, 1, int(1))],
            },
            n_species: 2,
            capacity: 1,
            reservoirs: vec![],
            chain: None,
        };
        assert!(spec
            .validate()
            .iter()
            .any(|v| v.message.contains("not connected")));
    }

    #[test]
    fn nu_zero_rejected() {
        let spec = ProcessSpec {
            graph: Graph::chain(1),
            n_species: 2,
            capacity: 0,
            reservoirs: vec![],
            chain: None,
        };
        assert!(spec.validate().iter().any(|v| v.message.contains("nu = 0")));
    }

    #[test]
    fn reversibility_classes() {
        // Identical parameters everywhere: homogeneous.
        let spec =
            ProcessSpec::chain(2, 1, 2, vec![frac(3, 10), frac(7, 10)], vec![frac(3, 10), frac(7, 10)])
                .unwrap();
        assert_eq!(spec.reversibility_class(), ReversibilityClass::Homogeneous);

        // alpha = (1,1), beta = (2,2): proportional, generalized.
        let spec =
            ProcessSpec::chain(2, 1, 2, vec![int(1), int(1)], vec![int(2), int(2)]).unwrap();
        assert_eq!(spec.reversibility_class(), ReversibilityClass::Generalized);

        // Opposed densities: none.
        let spec = ProcessSpec::chain(
            2,
            1,
            2,
            vec![frac(9, 10), frac(1, 10)],
            vec![frac(1, 10), frac(9, 10)],
        )
        .unwrap();
        assert_eq!(spec.reversibility_class(), ReversibilityClass::None);
    }

    #[test]
    fn reversible_weight_matches_multinomial() {
        // Single site, nu = 1: weight of "one particle" is rho_1 = p.
        let spec =
            ProcessSpec::chain(1, 1, 2, vec![frac(3, 10), frac(7, 10)], vec![frac(3, 10), frac(7, 10)])
                .unwrap();
        let one = Configuration::new(vec![1, 0], 2);
        // Two reservoirs on the single site have equal densities; effective
        // rates double but rho stays (3/10, 7/10).
        assert_eq!(spec.reversible_weight(&one).unwrap(), frac(3, 10));

        // nu = 2, N = 2, single site, rho = (1/2, 1/2), n = (1,1): 2 * 1/4.
        let spec =
            ProcessSpec::chain(1, 2, 2, vec![int(1), int(1)], vec![int(1), int(1)]).unwrap();
        let mixed = Configuration::new(vec![1, 1], 2);
        assert_eq!(spec.reversible_weight(&mixed).unwrap(), frac(1, 2));
    }

    #[test]
    fn weight_rejected_off_class() {
        let spec = ProcessSpec::chain(
            2,
            1,
            2,
            vec![frac(9, 10), frac(1, 10)],
            vec![frac(1, 10), frac(9, 10)],
        )
        .unwrap();
        assert!(spec.reversible_weight(&Configuration::empty(&spec)).is_err());
    }

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let text = r#"{ "L": 3, "nu": 1, "N": 3,
                        "alpha": [0.5, 0.25, 0.25], "beta": ["1/10", "3/10", "3/5"] }"#;
        let spec = spec_from_json(text).unwrap();
        assert_eq!(spec.graph.n_vertices, 3);
        assert_eq!(spec.reservoirs[0].alpha[0], frac(1, 2));
        assert_eq!(spec.reservoirs[1].alpha[2], frac(3, 5));

        let general = spec_to_json(&spec).to_string();
        let spec2 = spec_from_json(&general).unwrap();
        assert_eq!(spec2.graph.n_vertices, 3);
        assert_eq!(spec2.reservoirs.len(), 2);

        assert!(spec_from_json(r#"{ "L": 2, "nu": 1, "N": 2, "alpha": [1,1], "beta": [1,1], "extra": 0 }"#).is_err());
    }

    #[test]
    fn decimal_json_numbers_are_exact() {
        let text = r#"{ "L": 1, "nu": 1, "N": 2, "alpha": [0.3, 0.7], "beta": [0.3, 0.7] }"#;
        let spec = spec_from_json(text).unwrap();
        assert_eq!(spec.reservoirs[0].alpha[0], frac(3, 10));
    }

    #[test]
    fn query_constraints() {
        assert!(CorrelationQuery::new(vec![1, 3], vec![1, 2]).is_ok());
        assert!(CorrelationQuery::new(vec![3, 1], vec![1, 2]).is_err());
        assert!(CorrelationQuery::new(vec![2, 2], vec![1, 1]).is_err());
    }
}
