//! Exhaustive ground-state enumeration and periodic ground-state counting.
//!
//! Search spaces are indexed by base-`q` integers (first position most
//! significant) and split into contiguous ranges, one per worker. Partial
//! results merge in range order, so every count and every reported list is
//! independent of the worker count.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::ops::Range;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::periodic_subgroups::{CosetLabel, SubgroupSpec};
use crate::spin_config::{
    energy_of_total, interior_ball_family, is_ground_state, kronecker_u, CouplingSign, ModelParams,
    SpinConfiguration,
};
use crate::tree_group::volume;

pub const DEFAULT_BUDGET: u128 = 100_000_000;
const DEFAULT_STORED_MINIMIZERS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    /// Largest search space (number of states) a run may enumerate.
    pub budget: u128,
    pub workers: usize,
    /// Minimizers kept verbatim; the count is always exact.
    pub max_stored_minimizers: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            workers: 1,
            max_stored_minimizers: DEFAULT_STORED_MINIMIZERS,
        }
    }
}

impl CensusOptions {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusMode {
    Exhaustive,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusParameters {
    pub k: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    pub q: u32,
    #[serde(
        rename = "J",
        skip_serializing_if = "Option::is_none",
        serialize_with = "opt_display"
    )]
    pub j: Option<BigRational>,
    pub sign: CouplingSign,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub a_sets: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator_vectors: Option<Vec<CosetLabel>>,
    #[serde(serialize_with = "display")]
    pub budget: u128,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusResult {
    pub mode: CensusMode,
    pub parameters: CensusParameters,
    #[serde(serialize_with = "display")]
    pub state_count: u128,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "opt_display"
    )]
    pub min_energy: Option<BigRational>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "opt_display"
    )]
    pub minimizer_count: Option<u128>,
    /// Configurations meeting every ball target (exhaustive mode).
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "opt_display"
    )]
    pub ground_state_count: Option<u128>,
    /// Minimizers as spin vectors over `V_n` in canonical vertex order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub minimizers: Vec<Vec<u32>>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub minimizers_truncated: bool,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "opt_display"
    )]
    pub periodic_count: Option<u128>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "opt_display"
    )]
    pub constraint_graph_count: Option<u128>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "opt_display"
    )]
    pub formula_count: Option<u128>,
    /// `periodic_count / formula_count`, when the formula is nonzero.
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "opt_display"
    )]
    pub formula_ratio: Option<BigRational>,
    /// Distinct restrictions of counted colorings to the unit ball at the root.
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "opt_display"
    )]
    pub restriction_count: Option<u128>,
    /// Cross-check name -> outcome. Formula checks are prefixed `formula_`.
    pub agreement: BTreeMap<String, bool>,
    pub wall_time_ms: u128,
}

impl CensusResult {
    /// Internal cross-checks (everything not compared against a closed form).
    pub fn oracles_agree(&self) -> bool {
        self.agreement
            .iter()
            .filter(|(k, _)| !k.starts_with("formula_"))
            .all(|(_, &v)| v)
    }

    pub fn formula_agrees(&self) -> bool {
        self.agreement
            .iter()
            .filter(|(k, _)| k.starts_with("formula_"))
            .all(|(_, &v)| v)
    }

    /// Serialized form with the timing field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time_ms: 0,
            ..self.clone()
        }
    }
}

fn display<T: std::fmt::Display, S: Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn opt_display<T: std::fmt::Display, S: Serializer>(
    v: &Option<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

/// `q^len`, or `None` on overflow.
fn state_space(q: u32, len: usize) -> Option<u128> {
    (q as u128).checked_pow(u32::try_from(len).ok()?)
}

fn check_budget(required: Option<u128>, q: u32, len: usize, budget: u128) -> Result<u64> {
    match required {
        Some(n) if n <= budget && n <= u64::MAX as u128 => Ok(n as u64),
        Some(n) => Err(Error::BudgetExceeded {
            required: n.to_string(),
            budget,
        }),
        None => Err(Error::BudgetExceeded {
            required: format!("{q}^{len}"),
            budget,
        }),
    }
}

/// Splits `0..total` into `parts` contiguous ranges (some may be empty).
pub fn partition(total: u64, parts: usize) -> Vec<Range<u64>> {
    let parts = parts.max(1) as u64;
    let base = total / parts;
    let extra = total % parts;
    let mut start = 0;
    (0..parts)
        .map(|i| {
            let len = base + u64::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

fn run_partitioned<T, F>(total: u64, workers: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync,
{
    let ranges = partition(total, workers);
    if ranges.len() == 1 {
        return vec![work(ranges[0].clone())];
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|r| {
                let work = &work;
                scope.spawn(move || work(r))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("census worker panicked"))
            .collect()
    })
}

/// Base-`q` digits of `index` as spins `1..=q`, first position most significant.
fn decode(mut index: u64, q: u32, len: usize) -> Vec<u32> {
    let mut spins = vec![1u32; len];
    for slot in spins.iter_mut().rev() {
        *slot = (index % q as u64) as u32 + 1;
        index /= q as u64;
    }
    spins
}

/// Advances to the next configuration in enumeration order.
fn increment(spins: &mut [u32], q: u32) {
    for slot in spins.iter_mut().rev() {
        if *slot < q {
            *slot += 1;
            return;
        }
        *slot = 1;
    }
}

/// U of the spins at `indices`; the bitmask path covers `q <= 64`.
fn u_at(spins: &[u32], indices: &[usize], q: u32) -> usize {
    if q <= 64 {
        let mut mask = 0u64;
        for &i in indices {
            mask |= 1 << (spins[i] - 1);
        }
        indices.len() - mask.count_ones() as usize
    } else {
        let vals: Vec<u32> = indices.iter().map(|&i| spins[i]).collect();
        kronecker_u(&vals, q).expect("spins in range")
    }
}

struct ExhaustiveChunk {
    best: Option<usize>,
    best_count: u128,
    ground_at_best: u128,
    ground_total: u128,
    stored: Vec<Vec<u32>>,
}

fn better(sign: CouplingSign, candidate: usize, incumbent: usize) -> bool {
    match sign {
        CouplingSign::Positive => candidate > incumbent,
        CouplingSign::Negative => candidate < incumbent,
    }
}

/// Enumerates every configuration on `V_n` and returns the exact minimum of
/// the Hamiltonian together with its minimizers.
///
/// The minimizer set is cross-checked against the per-ball ground-state
/// condition, and stored minimizers are re-verified with [`is_ground_state`].
pub fn exhaustive_min_energy(
    params: &ModelParams,
    n: usize,
    options: &CensusOptions,
) -> Result<CensusResult> {
    let started = Instant::now();
    let family = interior_ball_family(n, params);
    if family.volume_too_small {
        return Err(Error::InvalidParams(format!(
            "volume radius {n} is smaller than ball radius {}",
            params.r_prime()
        )));
    }
    let vertices = volume(n, params.tree());
    let q = params.q();
    let total = check_budget(
        state_space(q, vertices.len()),
        q,
        vertices.len(),
        options.budget,
    )?;
    let sign = params.sign();
    let balls: Vec<Vec<usize>> = family
        .balls
        .iter()
        .map(|b| {
            b.vertices
                .iter()
                .map(|w| vertices.index_of(w).expect("ball inside volume"))
                .collect()
        })
        .collect();
    let targets: Vec<usize> = balls.iter().map(|b| sign.target(b.len(), q)).collect();
    let cap = options.max_stored_minimizers;

    let chunks = run_partitioned(total, options.workers, |range| {
        let mut chunk = ExhaustiveChunk {
            best: None,
            best_count: 0,
            ground_at_best: 0,
            ground_total: 0,
            stored: Vec::new(),
        };
        if range.is_empty() {
            return chunk;
        }
        let mut spins = decode(range.start, q, vertices.len());
        for _ in range {
            let mut total_u = 0;
            let mut ground = true;
            for (ball, &target) in balls.iter().zip(&targets) {
                let u = u_at(&spins, ball, q);
                total_u += u;
                ground &= u == target;
            }
            if ground {
                chunk.ground_total += 1;
            }
            let keep = match chunk.best {
                None => true,
                Some(b) if b == total_u => true,
                Some(b) if better(sign, total_u, b) => {
                    chunk.best_count = 0;
                    chunk.ground_at_best = 0;
                    chunk.stored.clear();
                    true
                }
                Some(_) => false,
            };
            if !keep {
                increment(&mut spins, q);
                continue;
            }
            chunk.best = Some(total_u);
            chunk.best_count += 1;
            chunk.ground_at_best += u128::from(ground);
            if chunk.stored.len() < cap {
                chunk.stored.push(spins.clone());
            }
            increment(&mut spins, q);
        }
        chunk
    });

    let mut best: Option<usize> = None;
    let mut best_count = 0u128;
    let mut ground_at_best = 0u128;
    let mut ground_total = 0u128;
    let mut stored: Vec<Vec<u32>> = Vec::new();
    let mut truncated = false;
    for c in chunks {
        ground_total += c.ground_total;
        let Some(cb) = c.best else { continue };
        match best {
            Some(b) if b == cb => {}
            Some(b) if !better(sign, cb, b) => continue,
            _ => {
                best = Some(cb);
                best_count = 0;
                ground_at_best = 0;
                stored.clear();
                truncated = false;
            }
        }
        best_count += c.best_count;
        ground_at_best += c.ground_at_best;
        for s in c.stored {
            if stored.len() < cap {
                stored.push(s);
            } else {
                truncated = true;
            }
        }
    }
    truncated |= (stored.len() as u128) < best_count;

    let best = best.expect("nonempty search space");
    let mut agreement = BTreeMap::new();
    agreement.insert(
        "minimizers_equal_ground_states".to_string(),
        best_count == ground_at_best && ground_at_best == ground_total,
    );
    let mut checker_ok = true;
    for s in &stored {
        let config = SpinConfiguration::from_spins(&vertices, s)?;
        checker_ok &= is_ground_state(&config, params, n)?.pass == (ground_total > 0);
    }
    agreement.insert("checker_confirms_minimizers".to_string(), checker_ok);

    Ok(CensusResult {
        mode: CensusMode::Exhaustive,
        parameters: CensusParameters {
            k: params.k(),
            r: Some(params.r()),
            q,
            j: Some(params.j().clone()),
            sign,
            n: Some(n),
            m: None,
            a_sets: None,
            generator_vectors: None,
            budget: options.budget,
            workers: options.workers,
        },
        state_count: total as u128,
        min_energy: Some(energy_of_total(params.j(), best)),
        minimizer_count: Some(best_count),
        ground_state_count: Some(ground_total),
        minimizers: stored,
        minimizers_truncated: truncated,
        periodic_count: None,
        constraint_graph_count: None,
        formula_count: None,
        formula_ratio: None,
        restriction_count: None,
        agreement,
        wall_time_ms: started.elapsed().as_millis(),
    })
}

fn require_census_spec(spec: &SubgroupSpec, q: u32, sign: CouplingSign) -> Result<()> {
    spec.require_valid()?;
    if !spec.is_full_index() {
        return Err(Error::InvalidSpec(format!(
            "generator vectors span only {} of {} dimensions",
            spec.rank(),
            spec.m()
        )));
    }
    if q < 2 {
        return Err(Error::InvalidParams("spin count q must be >= 2".into()));
    }
    if sign == CouplingSign::Negative && (q as u64) < spec.k() as u64 + 2 {
        return Err(Error::Unsupported(format!(
            "J < 0 census needs q >= k + 2 = {}, got q = {q}",
            spec.k() as u64 + 2
        )));
    }
    if spec.m() > 24 {
        return Err(Error::Unsupported(format!(
            "periodic census needs m <= 24, got {}",
            spec.m()
        )));
    }
    Ok(())
}

/// Label sets `{g, g ^ v_1, ..., g ^ v_{k+1}}` for every label `g`.
fn coset_balls(spec: &SubgroupSpec) -> Vec<Vec<usize>> {
    (0..spec.label_count())
        .map(|g| {
            std::iter::once(g)
                .chain(spec.generator_vectors().iter().map(|v| g ^ v.bits()))
                .map(|l| l as usize)
                .collect()
        })
        .collect()
}

struct PeriodicChunk {
    count: u128,
    restrictions: HashSet<Vec<u32>>,
}

/// Counts `F`-periodic ground states for unit balls by enumerating all
/// `q^(2^m)` coset colorings, and compares against an independent
/// constraint-graph count and the closed-form count.
pub fn count_periodic_ground_states(
    spec: &SubgroupSpec,
    q: u32,
    sign: CouplingSign,
    options: &CensusOptions,
) -> Result<CensusResult> {
    let started = Instant::now();
    require_census_spec(spec, q, sign)?;
    let labels = spec.label_count() as usize;
    let total = check_budget(state_space(q, labels), q, labels, options.budget)?;
    let balls = coset_balls(spec);
    let target = sign.target(spec.k() as usize + 2, q);
    let root_ball = &balls[0];

    let chunks = run_partitioned(total, options.workers, |range| {
        let mut chunk = PeriodicChunk {
            count: 0,
            restrictions: HashSet::new(),
        };
        if range.is_empty() {
            return chunk;
        }
        let mut colors = decode(range.start, q, labels);
        for _ in range {
            if balls.iter().all(|b| u_at(&colors, b, q) == target) {
                chunk.count += 1;
                chunk
                    .restrictions
                    .insert(root_ball.iter().map(|&l| colors[l]).collect());
            }
            increment(&mut colors, q);
        }
        chunk
    });

    let mut count = 0u128;
    let mut restrictions: HashSet<Vec<u32>> = HashSet::new();
    for c in chunks {
        count += c.count;
        restrictions.extend(c.restrictions);
    }

    let (graph_count, formula) = match sign {
        CouplingSign::Negative => (
            count_by_constraint_graph(spec, q)?,
            theorem2_formula(q, spec.k())?,
        ),
        CouplingSign::Positive => (count_constant_on_components(spec, q)?, q as u128),
    };
    let restriction_count = restrictions.len() as u128;
    let mut agreement = BTreeMap::new();
    agreement.insert(
        "enumeration_equals_constraint_graph".to_string(),
        count == graph_count,
    );
    agreement.insert("formula_count".to_string(), count == formula);
    agreement.insert(
        "formula_restrictions".to_string(),
        restriction_count == formula,
    );

    Ok(CensusResult {
        mode: CensusMode::Periodic,
        parameters: CensusParameters {
            k: spec.k(),
            r: Some(2),
            q,
            j: None,
            sign,
            n: None,
            m: Some(spec.m()),
            a_sets: Some(spec.a_sets().to_vec()),
            generator_vectors: Some(spec.generator_vectors().to_vec()),
            budget: options.budget,
            workers: options.workers,
        },
        state_count: total as u128,
        min_energy: None,
        minimizer_count: None,
        ground_state_count: None,
        minimizers: Vec::new(),
        minimizers_truncated: false,
        periodic_count: Some(count),
        constraint_graph_count: Some(graph_count),
        formula_count: Some(formula),
        formula_ratio: (formula != 0)
            .then(|| BigRational::new(BigInt::from(count), BigInt::from(formula))),
        restriction_count: Some(restriction_count),
        agreement,
        wall_time_ms: started.elapsed().as_millis(),
    })
}

/// `D = {v_j} ∪ {v_i ^ v_j : i != j}`: label differences that occur inside
/// a single unit ball.
pub fn cooccurrence_differences(spec: &SubgroupSpec) -> BTreeSet<CosetLabel> {
    let v = spec.generator_vectors();
    let mut out: BTreeSet<CosetLabel> = v.iter().copied().collect();
    for (i, a) in v.iter().enumerate() {
        for b in &v[i + 1..] {
            out.insert(a.xor(*b));
        }
    }
    out
}

/// Number of proper `q`-colorings of a graph given by adjacency lists.
pub fn count_proper_colorings(adjacency: &[Vec<usize>], q: u32) -> Result<u128> {
    fn go(v: usize, adjacency: &[Vec<usize>], q: u32, colors: &mut [u32]) -> Result<u128> {
        if v == adjacency.len() {
            return Ok(1);
        }
        let mut total = 0u128;
        for c in 1..=q {
            if adjacency[v].iter().any(|&u| u < v && colors[u] == c) {
                continue;
            }
            colors[v] = c;
            total = total
                .checked_add(go(v + 1, adjacency, q, colors)?)
                .ok_or(Error::Overflow("proper coloring count"))?;
        }
        colors[v] = 0;
        Ok(total)
    }
    go(0, adjacency, q, &mut vec![0; adjacency.len()])
}

/// Graph on labels with an edge `p -- p ^ d` for each `d` in `differences`.
pub fn label_graph(m: u32, differences: &BTreeSet<CosetLabel>) -> Vec<Vec<usize>> {
    let n = 1usize << m;
    (0..n)
        .map(|p| {
            let mut adj: Vec<usize> = differences
                .iter()
                .map(|d| p ^ d.bits() as usize)
                .filter(|&u| u != p)
                .collect();
            adj.sort_unstable();
            adj.dedup();
            adj
        })
        .collect()
}

/// Counts `J < 0` periodic ground states as proper colorings of the
/// co-occurrence graph.
pub fn count_by_constraint_graph(spec: &SubgroupSpec, q: u32) -> Result<u128> {
    require_census_spec(spec, q, CouplingSign::Negative)?;
    count_proper_colorings(&label_graph(spec.m(), &cooccurrence_differences(spec)), q)
}

/// `J > 0` counterpart: colorings constant on each connected component of
/// the graph `p -- p ^ v_j`, i.e. `q^components`.
fn count_constant_on_components(spec: &SubgroupSpec, q: u32) -> Result<u128> {
    let n = spec.label_count() as usize;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for p in 0..n {
        for v in spec.generator_vectors() {
            let a = find(&mut parent, p);
            let b = find(&mut parent, p ^ v.bits() as usize);
            parent[a] = b;
        }
    }
    let components = (0..n).filter(|&p| find(&mut parent, p) == p).count();
    state_space(q, components).ok_or(Error::Overflow("component coloring count"))
}

/// `C(q, k+2) * (k+2)!`, i.e. the falling factorial `q (q-1) ... (q-k-1)`.
pub fn theorem2_formula(q: u32, k: u32) -> Result<u128> {
    let ball = k as u64 + 2;
    if ball > q as u64 {
        return Ok(0);
    }
    (0..ball).try_fold(1u128, |acc, i| {
        acc.checked_mul((q as u64 - i) as u128)
            .ok_or(Error::Overflow("closed-form count"))
    })
}
