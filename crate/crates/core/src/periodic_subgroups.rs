//! Finite-index parity subgroups of the tree group and the periodic
//! configurations they induce.
//!
//! A family `A_1..A_m` of generator subsets defines the homomorphism
//! `x -> (sum_{j in A_i} count_j(x) mod 2)_i` into `m`-bit labels. Its kernel
//! `F` is normal (the map factors through the abelianization), and a
//! configuration is `F`-periodic iff it is a function of the label.
//! Equivalently, generator `a_j` maps to the vector `v_j` with bit `i` set iff
//! `j` is in `A_i`, and a word maps to the XOR of its letters' vectors.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spin_config::SpinConfiguration;
use crate::tree_group::{volume, TreeParams, Word};

/// Largest supported number of parity constraints.
pub const MAX_M: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// A map `{1..m} -> {even, odd}`, printed as e.g. `"oee"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParityPattern(Vec<Parity>);

impl ParityPattern {
    pub fn letters(&self) -> &[Parity] {
        &self.0
    }

    pub fn odd_count(&self) -> usize {
        self.0.iter().filter(|&&p| p == Parity::Odd).count()
    }

    pub fn is_odd_at(&self, i: usize) -> bool {
        self.0[i] == Parity::Odd
    }
}

impl fmt::Display for ParityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            f.write_str(match p {
                Parity::Even => "e",
                Parity::Odd => "o",
            })?;
        }
        Ok(())
    }
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 || m > MAX_M {
        Err(Error::InvalidParams(format!(
            "m must be in 1..={MAX_M}, got {m}"
        )))
    } else {
        Ok(())
    }
}

/// Odd-position sets of size `c` out of `m`, in lexicographic order.
fn combinations(
    m: usize,
    c: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == c {
        out.push(current.clone());
        return;
    }
    for i in start..m {
        if m - i < c - current.len() {
            break;
        }
        current.push(i);
        combinations(m, c, i + 1, current, out);
        current.pop();
    }
}

/// The `2^(m-1)` patterns with more even than odd letters, plus one member
/// of each complementary balanced pair when `m` is even (the one odd at the
/// first position).
///
/// Order: all-even first, then by number of odd letters, then by the
/// sorted list of odd positions.
pub fn build_alpha_patterns(m: u32) -> Result<Vec<ParityPattern>> {
    check_m(m)?;
    let m = m as usize;
    let mut out = Vec::with_capacity(1 << (m - 1));
    for c in 0..=m / 2 {
        if 2 * c > m {
            break;
        }
        let mut sets = Vec::new();
        combinations(m, c, 0, &mut Vec::with_capacity(c), &mut sets);
        for odd in sets {
            if 2 * c == m && odd.first() != Some(&0) {
                continue;
            }
            let mut letters = vec![Parity::Even; m];
            for i in odd {
                letters[i] = Parity::Odd;
            }
            out.push(ParityPattern(letters));
        }
    }
    Ok(out)
}

/// An `m`-bit coset label. Bit for `A_1` is the most significant and comes
/// first in the textual form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CosetLabel {
    m: u32,
    bits: u64,
}

impl CosetLabel {
    pub fn new(m: u32, bits: u64) -> Result<Self> {
        check_m(m)?;
        if bits >> m != 0 {
            return Err(Error::InvalidParams(format!(
                "label {bits} does not fit in {m} bits"
            )));
        }
        Ok(Self { m, bits })
    }

    pub fn zero(m: u32) -> Self {
        Self { m, bits: 0 }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Integer value; labels enumerate as `0..2^m`.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Bit for `A_i`, `i` 1-based.
    pub fn bit(&self, i: u32) -> bool {
        (self.bits >> (self.m - i)) & 1 == 1
    }

    pub fn xor(self, other: CosetLabel) -> CosetLabel {
        debug_assert_eq!(self.m, other.m);
        CosetLabel {
            m: self.m,
            bits: self.bits ^ other.bits,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let m = u32::try_from(text.len())
            .map_err(|_| Error::Parse(format!("label too long: {text:?}")))?;
        if m == 0 || !text.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Parse(format!("bad coset label {text:?}")));
        }
        let bits = u64::from_str_radix(text, 2).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(m, bits)
    }
}

impl fmt::Display for CosetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.m as usize)
    }
}

impl Serialize for CosetLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The family `A_1..A_m` and the derived generator vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupSpec {
    m: u32,
    tree: TreeParams,
    a_sets: Vec<Vec<u32>>,
    vectors: Vec<CosetLabel>,
}

impl SubgroupSpec {
    /// Well-formed but not necessarily valid spec from explicit A-sets.
    pub fn from_a_sets(k: u32, m: u32, a_sets: Vec<Vec<u32>>) -> Result<Self> {
        let tree = TreeParams::new(k)?;
        check_m(m)?;
        if a_sets.len() != m as usize {
            return Err(Error::InvalidSpec(format!(
                "expected {m} A-sets, got {}",
                a_sets.len()
            )));
        }
        let mut sets = Vec::with_capacity(a_sets.len());
        let mut vectors = vec![0u64; tree.generators() as usize];
        for (i, mut set) in a_sets.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            for &j in &set {
                tree.check_generator(j)?;
                vectors[(j - 1) as usize] |= 1 << (m as usize - 1 - i);
            }
            sets.push(set);
        }
        Ok(Self {
            m,
            tree,
            a_sets: sets,
            vectors: vectors
                .into_iter()
                .map(|bits| CosetLabel { m, bits })
                .collect(),
        })
    }

    /// Well-formed spec from the generator vectors `v_1..v_{k+1}`.
    pub fn from_vectors(k: u32, m: u32, vectors: &[CosetLabel]) -> Result<Self> {
        let tree = TreeParams::new(k)?;
        check_m(m)?;
        if vectors.len() != tree.generators() as usize {
            return Err(Error::InvalidSpec(format!(
                "expected {} generator vectors, got {}",
                tree.generators(),
                vectors.len()
            )));
        }
        if let Some(v) = vectors.iter().find(|v| v.m != m) {
            return Err(Error::InvalidSpec(format!(
                "vector {v} is not {m} bits wide"
            )));
        }
        let a_sets = (1..=m)
            .map(|i| {
                vectors
                    .iter()
                    .zip(1u32..)
                    .filter(|(v, _)| v.bit(i))
                    .map(|(_, j)| j)
                    .collect()
            })
            .collect();
        Self::from_a_sets(k, m, a_sets)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.tree.k()
    }

    pub fn tree(&self) -> TreeParams {
        self.tree
    }

    pub fn a_sets(&self) -> &[Vec<u32>] {
        &self.a_sets
    }

    /// `v_1..v_{k+1}`.
    pub fn generator_vectors(&self) -> &[CosetLabel] {
        &self.vectors
    }

    pub fn label_count(&self) -> u64 {
        1u64 << self.m
    }

    /// Generator vectors are pairwise distinct and nonzero.
    pub fn is_valid(&self) -> bool {
        let mut bits: Vec<u64> = self.vectors.iter().map(|v| v.bits).collect();
        if bits.contains(&0) {
            return false;
        }
        bits.sort_unstable();
        bits.windows(2).all(|w| w[0] != w[1])
    }

    /// Dimension of the span of the generator vectors over GF(2).
    pub fn rank(&self) -> u32 {
        let mut basis: Vec<u64> = Vec::new();
        for v in &self.vectors {
            let mut x = v.bits;
            for &b in &basis {
                x = x.min(x ^ b);
            }
            if x != 0 {
                basis.push(x);
                basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        basis.len() as u32
    }

    /// The vectors span all `m` bits, so `F` has index exactly `2^m`.
    pub fn is_full_index(&self) -> bool {
        self.rank() == self.m
    }

    /// Returns `self` if valid, else an `InvalidSpec` error.
    pub fn require_valid(&self) -> Result<&Self> {
        if self.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidSpec(format!(
                "generator vectors [{}] are not distinct and nonzero",
                self.vectors
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )))
        }
    }
}

/// Literal A-set construction, defined for `k = 2^(m-1) - 1`:
/// `A_i = {j <= k : alpha_j is odd at i} ∪ {k+1}`, with `alpha_j` the
/// `j`-th non-trivial pattern of [`build_alpha_patterns`].
pub fn build_a_sets(k: u32, m: u32) -> Result<SubgroupSpec> {
    check_m(m)?;
    if m > 31 || k as u64 != (1u64 << (m - 1)) - 1 || k == 0 {
        return Err(Error::Regime { k, m });
    }
    let patterns = build_alpha_patterns(m)?;
    let a_sets = (0..m as usize)
        .map(|i| {
            patterns[1..]
                .iter()
                .zip(1u32..)
                .filter(|(p, _)| p.is_odd_at(i))
                .map(|(_, j)| j)
                .chain(std::iter::once(k + 1))
                .collect()
        })
        .collect();
    SubgroupSpec::from_a_sets(k, m, a_sets)
}

/// Valid spec for any `k` with `k + 1 <= 2^m - 1`.
///
/// Without explicit vectors, `v_j` is the binary encoding of `j` for
/// `j <= k` and `v_{k+1}` is all-ones (or the next free vector).
pub fn generalize_a_sets(k: u32, m: u32, vectors: Option<&[CosetLabel]>) -> Result<SubgroupSpec> {
    let tree = TreeParams::new(k)?;
    check_m(m)?;
    let available = (1u64 << m) - 1;
    let generators = tree.generators() as u64;
    if generators > available {
        return Err(Error::Pigeonhole {
            generators,
            m,
            available,
        });
    }
    let spec = match vectors {
        Some(v) => SubgroupSpec::from_vectors(k, m, v)?,
        None => {
            let mut bits: Vec<u64> = (1..=k as u64).collect();
            let last = if available > k as u64 {
                available
            } else {
                (1..=available)
                    .find(|b| !bits.contains(b))
                    .expect("pigeonhole checked")
            };
            bits.push(last);
            let v: Vec<CosetLabel> = bits
                .into_iter()
                .map(|bits| CosetLabel { m, bits })
                .collect();
            SubgroupSpec::from_vectors(k, m, &v)?
        }
    };
    spec.require_valid()?;
    Ok(spec)
}

/// Coset label of `x`: XOR of the generator vectors of its letters.
pub fn parity_vector(x: &Word, spec: &SubgroupSpec) -> Result<CosetLabel> {
    if x.k() != spec.k() {
        return Err(Error::ParamMismatch {
            left: spec.k(),
            right: x.k(),
        });
    }
    Ok(x.letters()
        .iter()
        .fold(CosetLabel::zero(spec.m), |acc, &j| {
            acc.xor(spec.vectors[(j - 1) as usize])
        }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaReport {
    pub pass: bool,
    /// First center (canonical order) whose unit ball repeats a label.
    pub witness: Option<Word>,
    pub centers_checked: usize,
}

/// Checks over every `x` in `V_radius` that `x, x a_1, ..., x a_{k+1}` carry
/// pairwise distinct labels.
pub fn gamma_check(spec: &SubgroupSpec, region_radius: usize) -> GammaReport {
    let mut checked = 0;
    for x in volume(region_radius, spec.tree).iter() {
        checked += 1;
        let mut labels: Vec<u64> = std::iter::once(x.clone())
            .chain(x.neighbors())
            .map(|y| parity_vector(&y, spec).expect("same tree").bits)
            .collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return GammaReport {
                pass: false,
                witness: Some(x.clone()),
                centers_checked: checked,
            };
        }
    }
    GammaReport {
        pass: true,
        witness: None,
        centers_checked: checked,
    }
}

/// Spin per coset label, indexed by the label's integer value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetColoring {
    m: u32,
    colors: Vec<u32>,
}

impl CosetColoring {
    pub fn new(m: u32, colors: Vec<u32>) -> Result<Self> {
        check_m(m)?;
        if m > 24 {
            return Err(Error::Unsupported(format!(
                "explicit colorings need m <= 24, got {m}"
            )));
        }
        if colors.len() as u64 != 1u64 << m {
            return Err(Error::InvalidParams(format!(
                "coloring must cover all {} labels, got {}",
                1u64 << m,
                colors.len()
            )));
        }
        if let Some(&s) = colors.iter().find(|&&s| s == 0) {
            return Err(Error::InvalidSpin { spin: s, q: 0 });
        }
        Ok(Self { m, colors })
    }

    pub fn constant(m: u32, spin: u32) -> Result<Self> {
        check_m(m)?;
        Self::new(m, vec![spin; 1usize << m.min(24)])
    }

    /// Spin `label + 1` on every label.
    pub fn injective(m: u32) -> Result<Self> {
        check_m(m)?;
        Self::new(m, (1..=1u32 << m.min(24)).collect())
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color(&self, label: CosetLabel) -> u32 {
        self.colors[label.bits as usize]
    }

    pub fn check_q(&self, q: u32) -> Result<()> {
        match self.colors.iter().find(|&&s| s > q) {
            Some(&spin) => Err(Error::InvalidSpin { spin, q }),
            None => Ok(()),
        }
    }
}

/// `sigma(x) = coloring(label(x))` on `V_n`.
pub fn periodic_config(
    coloring: &CosetColoring,
    spec: &SubgroupSpec,
    n: usize,
    q: u32,
) -> Result<SpinConfiguration> {
    if coloring.m != spec.m {
        return Err(Error::InvalidParams(format!(
            "coloring has m={} but spec has m={}",
            coloring.m, spec.m
        )));
    }
    coloring.check_q(q)?;
    let values = volume(n, spec.tree)
        .into_vec()
        .into_iter()
        .map(|x| {
            let spin = coloring.color(parity_vector(&x, spec).expect("same tree"));
            (x, spin)
        })
        .collect();
    SpinConfiguration::new(spec.tree, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_group::reduce;

    fn names(patterns: &[ParityPattern]) -> Vec<String> {
        patterns.iter().map(|p| p.to_string()).collect()
    }

    fn label(s: &str) -> CosetLabel {
        CosetLabel::parse(s).unwrap()
    }

    fn vector_names(spec: &SubgroupSpec) -> Vec<String> {
        spec.generator_vectors()
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    #[test]
    fn alpha_patterns_small_m() {
        assert_eq!(names(&build_alpha_patterns(1).unwrap()), ["e"]);
        assert_eq!(names(&build_alpha_patterns(2).unwrap()), ["ee", "oe"]);
        assert_eq!(
            names(&build_alpha_patterns(3).unwrap()),
            ["eee", "oee", "eoe", "eeo"]
        );
        assert_eq!(
            names(&build_alpha_patterns(4).unwrap()),
            ["eeee", "oeee", "eoee", "eeoe", "eeeo", "ooee", "oeoe", "oeeo"]
        );
        assert!(build_alpha_patterns(0).is_err());
    }

    #[test]
    fn alpha_patterns_count_and_halving() {
        for m in 1..=10u32 {
            let pats = build_alpha_patterns(m).unwrap();
            assert_eq!(pats.len(), 1 << (m - 1));
            // no pattern together with its complement
            let set: std::collections::HashSet<String> = names(&pats).into_iter().collect();
            for p in &pats {
                let flipped: String = p
                    .to_string()
                    .chars()
                    .map(|c| if c == 'e' { 'o' } else { 'e' })
                    .collect();
                assert!(!set.contains(&flipped));
            }
        }
    }

    #[test]
    fn a_sets_k3_m3() {
        let spec = build_a_sets(3, 3).unwrap();
        assert_eq!(spec.a_sets(), &[vec![1, 4], vec![2, 4], vec![3, 4]]);
        assert_eq!(vector_names(&spec), ["100", "010", "001", "111"]);
        assert!(spec.is_valid() && spec.is_full_index());
    }

    #[test]
    fn a_sets_k1_m2() {
        let spec = build_a_sets(1, 2).unwrap();
        assert_eq!(spec.a_sets(), &[vec![1, 2], vec![2]]);
        assert_eq!(vector_names(&spec), ["10", "11"]);
        assert!(spec.is_valid());
    }

    #[test]
    fn a_sets_regime() {
        assert_eq!(build_a_sets(2, 3), Err(Error::Regime { k: 2, m: 3 }));
        assert!(build_a_sets(0, 1).is_err());
        assert!(build_a_sets(7, 4).is_ok());
    }

    #[test]
    fn literal_last_vector_is_all_ones() {
        for m in 2..=6 {
            let k = (1u32 << (m - 1)) - 1;
            let spec = build_a_sets(k, m).unwrap();
            assert!(spec.is_valid());
            assert_eq!(spec.generator_vectors()[k as usize].bits(), (1 << m) - 1);
        }
    }

    #[test]
    fn generalize_round_trip() {
        let v = [label("100"), label("010"), label("001"), label("111")];
        assert_eq!(
            generalize_a_sets(3, 3, Some(&v)).unwrap(),
            build_a_sets(3, 3).unwrap()
        );
    }

    #[test]
    fn generalize_fills_all_nonzero() {
        let spec = generalize_a_sets(6, 3, None).unwrap();
        let mut bits: Vec<u64> = spec.generator_vectors().iter().map(|v| v.bits()).collect();
        bits.sort_unstable();
        assert_eq!(bits, (1..=7).collect::<Vec<_>>());
        assert_eq!(
            generalize_a_sets(7, 3, None),
            Err(Error::Pigeonhole {
                generators: 8,
                m: 3,
                available: 7
            })
        );
    }

    #[test]
    fn generalize_rejects_invalid_vectors() {
        let v = [label("100"), label("100"), label("001"), label("111")];
        assert!(matches!(
            generalize_a_sets(3, 3, Some(&v)),
            Err(Error::InvalidSpec(_))
        ));
        let v = [label("100"), label("010")];
        assert!(generalize_a_sets(3, 3, Some(&v)).is_err());
    }

    #[test]
    fn parity_vector_examples() {
        let spec = build_a_sets(3, 3).unwrap();
        let t = spec.tree();
        assert!(parity_vector(&t.identity(), &spec).unwrap().is_zero());
        assert_eq!(
            parity_vector(&reduce(&[4], t).unwrap(), &spec).unwrap(),
            label("111")
        );
        assert_eq!(
            parity_vector(&reduce(&[1, 2], t).unwrap(), &spec).unwrap(),
            label("110")
        );
    }

    #[test]
    fn gamma_examples() {
        let spec = build_a_sets(3, 3).unwrap();
        let report = gamma_check(&spec, 4);
        assert!(report.pass);
        assert_eq!(report.centers_checked, 161);

        let dup = SubgroupSpec::from_vectors(
            3,
            3,
            &[label("100"), label("100"), label("001"), label("111")],
        )
        .unwrap();
        let report = gamma_check(&dup, 2);
        assert!(!report.pass);
        assert!(report.witness.unwrap().is_identity());

        // 2^m < k + 2
        let crowded =
            SubgroupSpec::from_vectors(3, 2, &[label("01"), label("10"), label("11"), label("11")])
                .unwrap();
        assert!(!gamma_check(&crowded, 1).pass);
    }

    #[test]
    fn rank_detects_deficient_span() {
        let spec =
            SubgroupSpec::from_vectors(2, 3, &[label("100"), label("010"), label("110")]).unwrap();
        assert!(spec.is_valid());
        assert_eq!(spec.rank(), 2);
        assert!(!spec.is_full_index());
    }

    #[test]
    fn label_text() {
        assert_eq!(label("110").bits(), 6);
        assert_eq!(CosetLabel::new(3, 1).unwrap().to_string(), "001");
        assert!(label("110").bit(1) && !label("110").bit(3));
        assert!(CosetLabel::parse("12").is_err());
        assert!(CosetLabel::new(2, 4).is_err());
    }

    #[test]
    fn periodic_examples() {
        let spec = build_a_sets(3, 3).unwrap();
        let c = periodic_config(&CosetColoring::constant(3, 2).unwrap(), &spec, 2, 3).unwrap();
        assert!(c.values().values().all(|&s| s == 2));
        assert_eq!(
            periodic_config(&CosetColoring::injective(3).unwrap(), &spec, 1, 7),
            Err(Error::InvalidSpin { spin: 8, q: 7 })
        );
    }

    #[test]
    fn coloring_validation() {
        assert!(CosetColoring::new(2, vec![1, 2, 3]).is_err());
        assert!(CosetColoring::new(2, vec![1, 2, 0, 1]).is_err());
    }
}
