//! Vertices of the Cayley tree of order `k` as reduced words in the free
//! product of `k + 1` copies of the two-element group.
//!
//! The identity word is the root. Two vertices are adjacent iff their
//! distance is 1, so edges are never stored.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Tree order: every vertex has `k + 1` neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeParams {
    k: u32,
}

impl TreeParams {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParams("tree order k must be >= 1".into()));
        }
        // keeps k + 1 representable and letters in u32
        if k == u32::MAX {
            return Err(Error::InvalidParams("tree order k too large".into()));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of generators, `k + 1`.
    pub fn generators(&self) -> u32 {
        self.k + 1
    }

    pub fn check_generator(&self, index: u32) -> Result<()> {
        if index == 0 || index > self.generators() {
            Err(Error::InvalidGenerator {
                index,
                max: self.generators(),
            })
        } else {
            Ok(())
        }
    }

    pub fn identity(&self) -> Word {
        Word {
            k: self.k,
            letters: Vec::new(),
        }
    }

    /// The single-letter word `a_index`.
    pub fn generator(&self, index: u32) -> Result<Word> {
        self.check_generator(index)?;
        Ok(Word {
            k: self.k,
            letters: vec![index],
        })
    }
}

/// A reduced word: no two adjacent letters are equal. Letters are 1-based
/// generator indices.
///
/// Words order canonically by length, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    k: u32,
    letters: Vec<u32>,
}

/// Deletes adjacent equal pairs until none remain.
pub fn reduce(letters: &[u32], params: TreeParams) -> Result<Word> {
    let mut out: Vec<u32> = Vec::with_capacity(letters.len());
    for &l in letters {
        params.check_generator(l)?;
        if out.last() == Some(&l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Ok(Word {
        k: params.k,
        letters: out,
    })
}

impl Word {
    pub fn params(&self) -> TreeParams {
        TreeParams { k: self.k }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Each generator is an involution, so the inverse is the reversed word.
    pub fn inverse(&self) -> Word {
        Word {
            k: self.k,
            letters: self.letters.iter().rev().copied().collect(),
        }
    }

    fn same_tree(&self, other: &Word) -> Result<()> {
        if self.k != other.k {
            Err(Error::ParamMismatch {
                left: self.k,
                right: other.k,
            })
        } else {
            Ok(())
        }
    }

    pub fn multiply(&self, other: &Word) -> Result<Word> {
        self.same_tree(other)?;
        // Both sides are reduced, so cancellation only happens at the seam.
        let mut cut = 0;
        let left = &self.letters;
        let right = &other.letters;
        while cut < left.len() && cut < right.len() && left[left.len() - 1 - cut] == right[cut] {
            cut += 1;
        }
        let mut letters = Vec::with_capacity(left.len() + right.len() - 2 * cut);
        letters.extend_from_slice(&left[..left.len() - cut]);
        letters.extend_from_slice(&right[cut..]);
        Ok(Word { k: self.k, letters })
    }

    /// Right multiplication by a single generator: the neighbour `x a_j`.
    pub fn times_generator(&self, index: u32) -> Result<Word> {
        self.params().check_generator(index)?;
        let mut letters = self.letters.clone();
        if letters.last() == Some(&index) {
            letters.pop();
        } else {
            letters.push(index);
        }
        Ok(Word { k: self.k, letters })
    }

    /// Tree distance: length of `x^{-1} y`.
    pub fn distance(&self, other: &Word) -> Result<usize> {
        self.same_tree(other)?;
        let common = self
            .letters
            .iter()
            .zip(&other.letters)
            .take_while(|(a, b)| a == b)
            .count();
        Ok(self.letters.len() + other.letters.len() - 2 * common)
    }

    /// Number of occurrences of generator `j` in the word.
    pub fn letter_count(&self, j: u32) -> Result<usize> {
        self.params().check_generator(j)?;
        Ok(self.letters.iter().filter(|&&l| l == j).count())
    }

    /// The `k + 1` neighbours `x a_1, ..., x a_{k+1}`.
    pub fn neighbors(&self) -> Vec<Word> {
        (1..=self.k + 1)
            .map(|j| self.times_generator(j).expect("generator index in range"))
            .collect()
    }

    /// Neighbour one step closer to the root, `None` for the identity.
    pub fn parent(&self) -> Option<Word> {
        if self.letters.is_empty() {
            None
        } else {
            Some(Word {
                k: self.k,
                letters: self.letters[..self.letters.len() - 1].to_vec(),
            })
        }
    }

    /// Parses the textual form: `"e"` or whitespace-separated 1-based indices.
    /// The result is reduced.
    pub fn parse(text: &str, params: TreeParams) -> Result<Word> {
        let text = text.trim();
        if text == "e" || text.is_empty() {
            return Ok(params.identity());
        }
        let letters = text
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u32>().map_err(|_| {
                    Error::Parse(format!("bad generator index {tok:?} in word {text:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        reduce(&letters, params)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
            .then_with(|| self.k.cmp(&other.k))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Duplicate-free set of words in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize)]
#[serde(transparent)]
pub struct VertexSet {
    members: Vec<Word>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Word> {
        self.members.iter()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.members.binary_search(w).is_ok()
    }

    /// Position of `w` in canonical order.
    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.members.binary_search(w).ok()
    }

    pub fn as_slice(&self) -> &[Word] {
        &self.members
    }

    pub fn into_vec(self) -> Vec<Word> {
        self.members
    }
}

impl FromIterator<Word> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Word>>(iter: I) -> Self {
        let mut members: Vec<Word> = iter.into_iter().collect();
        members.sort();
        members.dedup();
        Self { members }
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a Word;
    type IntoIter = std::slice::Iter<'a, Word>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

fn extend_reduced(
    prefix: &mut Vec<u32>,
    depth: usize,
    generators: u32,
    k: u32,
    out: &mut Vec<Word>,
) {
    if depth == 0 {
        out.push(Word {
            k,
            letters: prefix.clone(),
        });
        return;
    }
    for l in 1..=generators {
        if prefix.last() == Some(&l) {
            continue;
        }
        prefix.push(l);
        extend_reduced(prefix, depth - 1, generators, k, out);
        prefix.pop();
    }
}

/// All reduced words of length exactly `n`, i.e. the sphere around the root.
pub fn sphere(n: usize, params: TreeParams) -> VertexSet {
    let mut out = Vec::new();
    extend_reduced(
        &mut Vec::with_capacity(n),
        n,
        params.generators(),
        params.k,
        &mut out,
    );
    // generated in lexicographic order already
    VertexSet { members: out }
}

/// All words within distance `radius` of `center`.
pub fn ball(center: &Word, radius: usize) -> VertexSet {
    let params = center.params();
    (0..=radius)
        .flat_map(|len| sphere(len, params).into_vec())
        .map(|w| center.multiply(&w).expect("same tree"))
        .collect()
}

/// `V_n`: the ball of radius `n` around the root.
pub fn volume(n: usize, params: TreeParams) -> VertexSet {
    ball(&params.identity(), n)
}

/// Closed-form `|ball(x, radius)|`.
pub fn ball_size(radius: usize, params: TreeParams) -> Option<u128> {
    let k = params.k as u128;
    if k == 1 {
        return (radius as u128).checked_mul(2)?.checked_add(1);
    }
    let kr = k.checked_pow(u32::try_from(radius).ok()?)?;
    Some(1 + (k + 1).checked_mul(kr - 1)? / (k - 1))
}
