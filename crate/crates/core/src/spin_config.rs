//! Spin configurations on finite volumes, the generalized Kronecker
//! symbol, the ball-family Hamiltonian and the ground-state checker.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree_group::{ball, volume, TreeParams, VertexSet, Word};

/// Sign of the coupling `J`; the only part of `J` that decides ground states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingSign {
    /// `J > 0`: balls want as many repeated spins as possible.
    Positive,
    /// `J < 0`: balls want as many distinct spins as possible.
    Negative,
}

impl CouplingSign {
    pub fn of(j: &BigRational) -> Result<Self> {
        if j.is_zero() {
            Err(Error::InvalidParams("coupling J must be nonzero".into()))
        } else if j.is_positive() {
            Ok(Self::Positive)
        } else {
            Ok(Self::Negative)
        }
    }

    /// Per-ball target value of U: the one minimizing `-J * U`.
    pub fn target(self, ball_size: usize, q: u32) -> usize {
        let (u_min, u_max) = u_extremes(ball_size, q);
        match self {
            Self::Positive => u_max,
            Self::Negative => u_min,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelParams {
    tree: TreeParams,
    r: u32,
    q: u32,
    j: BigRational,
}

impl ModelParams {
    pub fn new(k: u32, r: u32, q: u32, j: BigRational) -> Result<Self> {
        let tree = TreeParams::new(k)?;
        if r == 0 {
            return Err(Error::InvalidParams(
                "interaction range r must be >= 1".into(),
            ));
        }
        if q < 2 {
            return Err(Error::InvalidParams("spin count q must be >= 2".into()));
        }
        CouplingSign::of(&j)?;
        Ok(Self { tree, r, q, j })
    }

    pub fn tree(&self) -> TreeParams {
        self.tree
    }

    pub fn k(&self) -> u32 {
        self.tree.k()
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn j(&self) -> &BigRational {
        &self.j
    }

    pub fn sign(&self) -> CouplingSign {
        CouplingSign::of(&self.j).expect("validated nonzero")
    }

    /// Ball radius `r' = floor((r + 1) / 2)`.
    pub fn r_prime(&self) -> usize {
        self.r.div_ceil(2) as usize
    }
}

/// `|A|` minus the number of distinct spins on `A`.
pub fn kronecker_u(spins: &[u32], q: u32) -> Result<usize> {
    if spins.is_empty() {
        return Err(Error::EmptySpins);
    }
    let mut seen = spins.to_vec();
    for &s in &seen {
        if s == 0 || s > q {
            return Err(Error::InvalidSpin { spin: s, q });
        }
    }
    seen.sort_unstable();
    seen.dedup();
    Ok(spins.len() - seen.len())
}

/// Range of U over all configurations of a ball with `ball_size` vertices.
pub fn u_extremes(ball_size: usize, q: u32) -> (usize, usize) {
    let q = q as usize;
    (ball_size - ball_size.min(q), ball_size.saturating_sub(1))
}

/// Spin assignment on a finite set of vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConfiguration {
    tree: TreeParams,
    values: BTreeMap<Word, u32>,
}

impl SpinConfiguration {
    pub fn new(tree: TreeParams, values: BTreeMap<Word, u32>) -> Result<Self> {
        for (w, &s) in &values {
            if w.k() != tree.k() {
                return Err(Error::ParamMismatch {
                    left: tree.k(),
                    right: w.k(),
                });
            }
            if s == 0 {
                return Err(Error::InvalidSpin { spin: s, q: 0 });
            }
        }
        Ok(Self { tree, values })
    }

    /// Pairs `support[i]` with `spins[i]`.
    pub fn from_spins(support: &VertexSet, spins: &[u32]) -> Result<Self> {
        if support.len() != spins.len() {
            return Err(Error::InvalidParams(format!(
                "{} vertices but {} spins",
                support.len(),
                spins.len()
            )));
        }
        let tree = match support.iter().next() {
            Some(w) => w.params(),
            None => return Err(Error::InvalidParams("empty support".into())),
        };
        Self::new(
            tree,
            support.iter().cloned().zip(spins.iter().copied()).collect(),
        )
    }

    pub fn constant(support: &VertexSet, spin: u32) -> Result<Self> {
        Self::from_spins(support, &vec![spin; support.len()])
    }

    pub fn tree(&self) -> TreeParams {
        self.tree
    }

    pub fn get(&self, w: &Word) -> Option<u32> {
        self.values.get(w).copied()
    }

    pub fn set(&mut self, w: Word, spin: u32) -> Result<()> {
        if w.k() != self.tree.k() {
            return Err(Error::ParamMismatch {
                left: self.tree.k(),
                right: w.k(),
            });
        }
        if spin == 0 {
            return Err(Error::InvalidSpin { spin, q: 0 });
        }
        self.values.insert(w, spin);
        Ok(())
    }

    pub fn support(&self) -> VertexSet {
        self.values.keys().cloned().collect()
    }

    pub fn values(&self) -> &BTreeMap<Word, u32> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn spins_on(&self, vertices: &VertexSet) -> Result<Vec<u32>> {
        vertices
            .iter()
            .map(|w| {
                self.get(w)
                    .ok_or_else(|| Error::MissingVertex(w.to_string()))
            })
            .collect()
    }

    fn require_volume(&self, n: usize) -> Result<()> {
        if let Some(missing) = volume(n, self.tree)
            .iter()
            .find(|w| !self.values.contains_key(w))
        {
            return Err(Error::MissingVertex(missing.to_string()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ball {
    pub center: Word,
    pub vertices: VertexSet,
}

/// Balls of radius `r'` lying wholly inside `V_n`, in canonical center order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallFamily {
    pub balls: Vec<Ball>,
    /// Set when `n < r'`, so no ball fits.
    pub volume_too_small: bool,
}

pub fn interior_ball_family(n: usize, params: &ModelParams) -> BallFamily {
    let rp = params.r_prime();
    if n < rp {
        return BallFamily {
            balls: Vec::new(),
            volume_too_small: true,
        };
    }
    let balls = volume(n - rp, params.tree())
        .into_vec()
        .into_iter()
        .map(|center| {
            let vertices = ball(&center, rp);
            Ball { center, vertices }
        })
        .collect();
    BallFamily {
        balls,
        volume_too_small: false,
    }
}

/// Sum of U over the interior balls of `V_n`.
pub fn total_u(config: &SpinConfiguration, params: &ModelParams, n: usize) -> Result<usize> {
    config.require_volume(n)?;
    let mut total = 0usize;
    for b in interior_ball_family(n, params).balls {
        total += kronecker_u(&config.spins_on(&b.vertices)?, params.q())?;
    }
    Ok(total)
}

/// Energy `-J * sum_b U(sigma_b)` over the interior balls of `V_n`.
pub fn hamiltonian(
    config: &SpinConfiguration,
    params: &ModelParams,
    n: usize,
) -> Result<BigRational> {
    let total = total_u(config, params, n)?;
    Ok(energy_of_total(params.j(), total))
}

pub(crate) fn energy_of_total(j: &BigRational, total_u: usize) -> BigRational {
    -j.clone() * BigRational::from_integer(BigInt::from(total_u))
}

/// Change in energy when `vertex` is set to `new_spin`, computed from the
/// balls containing `vertex` only.
pub fn energy_delta(
    config: &SpinConfiguration,
    vertex: &Word,
    new_spin: u32,
    params: &ModelParams,
    n: usize,
) -> Result<BigRational> {
    config.require_volume(n)?;
    if vertex.len() > n {
        return Err(Error::InvalidParams(format!(
            "vertex {vertex} lies outside V_{n}"
        )));
    }
    let rp = params.r_prime();
    if n < rp {
        return Ok(BigRational::zero());
    }
    let mut delta: i64 = 0;
    for center in ball(vertex, rp).iter().filter(|c| c.len() <= n - rp) {
        let vertices = ball(center, rp);
        let old = config.spins_on(&vertices)?;
        let new: Vec<u32> = vertices
            .iter()
            .zip(&old)
            .map(|(w, &s)| if w == vertex { new_spin } else { s })
            .collect();
        delta += kronecker_u(&new, params.q())? as i64 - kronecker_u(&old, params.q())? as i64;
    }
    Ok(-params.j().clone() * BigRational::from_integer(BigInt::from(delta)))
}

/// Per-ball certificate entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallReport {
    pub center: Word,
    pub vertices: VertexSet,
    pub u_value: usize,
    pub target: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroundStateReport {
    pub pass: bool,
    /// Failing balls first, each group in canonical center order.
    pub reports: Vec<BallReport>,
}

impl GroundStateReport {
    pub fn first_failure(&self) -> Option<&BallReport> {
        self.reports.first().filter(|r| !r.pass)
    }
}

/// Checks that every interior ball of `V_n` attains its extremal U.
pub fn is_ground_state(
    config: &SpinConfiguration,
    params: &ModelParams,
    n: usize,
) -> Result<GroundStateReport> {
    GroundStateChecker::new(params, n)?.check(config)
}

/// Ground-state checker with the interior ball family of `V_n` built once,
/// for checking many configurations on the same volume.
#[derive(Debug, Clone)]
pub struct GroundStateChecker {
    q: u32,
    sign: CouplingSign,
    volume: VertexSet,
    balls: Vec<Ball>,
    ball_indices: Vec<Vec<usize>>,
}

impl GroundStateChecker {
    pub fn new(params: &ModelParams, n: usize) -> Result<Self> {
        let family = interior_ball_family(n, params);
        if family.volume_too_small {
            return Err(Error::InvalidParams(format!(
                "volume radius {n} is smaller than ball radius {}",
                params.r_prime()
            )));
        }
        let volume = volume(n, params.tree());
        let ball_indices = family
            .balls
            .iter()
            .map(|b| {
                b.vertices
                    .iter()
                    .map(|w| volume.index_of(w).expect("ball inside volume"))
                    .collect()
            })
            .collect();
        Ok(Self {
            q: params.q(),
            sign: params.sign(),
            volume,
            balls: family.balls,
            ball_indices,
        })
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    /// The vertices of `V_n` in canonical order, the order expected by
    /// [`GroundStateChecker::ball_u_values`].
    pub fn volume(&self) -> &VertexSet {
        &self.volume
    }

    /// U on each interior ball, for spins listed in canonical volume order.
    pub fn ball_u_values(&self, spins: &[u32]) -> Result<Vec<usize>> {
        if spins.len() != self.volume.len() {
            return Err(Error::InvalidParams(format!(
                "expected {} spins, got {}",
                self.volume.len(),
                spins.len()
            )));
        }
        let mut buf = Vec::new();
        self.ball_indices
            .iter()
            .map(|idx| {
                buf.clear();
                buf.extend(idx.iter().map(|&i| spins[i]));
                kronecker_u(&buf, self.q)
            })
            .collect()
    }

    /// Per-ball targets, aligned with [`GroundStateChecker::balls`].
    pub fn targets(&self) -> Vec<usize> {
        self.balls
            .iter()
            .map(|b| self.sign.target(b.vertices.len(), self.q))
            .collect()
    }

    fn require_volume(&self, config: &SpinConfiguration) -> Result<()> {
        match self.volume.iter().find(|w| !config.values.contains_key(w)) {
            Some(missing) => Err(Error::MissingVertex(missing.to_string())),
            None => Ok(()),
        }
    }

    /// True when every interior ball hits its target; stops at the first miss.
    pub fn passes(&self, config: &SpinConfiguration) -> Result<bool> {
        self.require_volume(config)?;
        for b in &self.balls {
            let u_value = kronecker_u(&config.spins_on(&b.vertices)?, self.q)?;
            if u_value != self.sign.target(b.vertices.len(), self.q) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn check(&self, config: &SpinConfiguration) -> Result<GroundStateReport> {
        self.require_volume(config)?;
        let mut failing = Vec::new();
        let mut passing = Vec::new();
        for b in &self.balls {
            let u_value = kronecker_u(&config.spins_on(&b.vertices)?, self.q)?;
            let target = self.sign.target(b.vertices.len(), self.q);
            let report = BallReport {
                center: b.center.clone(),
                vertices: b.vertices.clone(),
                u_value,
                target,
                pass: u_value == target,
            };
            if report.pass {
                passing.push(report);
            } else {
                failing.push(report);
            }
        }
        let pass = failing.is_empty();
        failing.extend(passing);
        Ok(GroundStateReport {
            pass,
            reports: failing,
        })
    }
}
