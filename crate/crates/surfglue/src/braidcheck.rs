//! Braid words and Dehornoy handle reduction.
//!
//! Used to screen braid-box decorations: a D_2 disk whose 4-braid box is the
//! trivial braid bounds a split subtangle and cannot be incompressible.

use std::fmt;

use thiserror::Error;

use crate::catalog::Catalog;
use crate::gluer::PlacedPiece;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraidError {
    #[error("a braid needs at least two strands, got {0}")]
    TooFewStrands(u32),
    #[error("generator {gen} out of range for {strands} strands")]
    GeneratorOutOfRange { gen: i64, strands: u32 },
    #[error("cannot parse braid letter {0:?}")]
    Parse(String),
    #[error("handle reduction exceeded {ceiling} steps; this is a bug")]
    IterationCeiling { ceiling: u64 },
    #[error("{kind} carries {have} braid decorations but needs {need}")]
    IncompleteDecoration { kind: String, have: usize, need: u32 },
}

/// A word in the Artin generators. Letter `i` is σ_i, letter `-i` its inverse.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: u32,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: u32, letters: Vec<i32>) -> Result<Self, BraidError> {
        if strands < 2 {
            return Err(BraidError::TooFewStrands(strands));
        }
        for &l in &letters {
            if l == 0 || l.unsigned_abs() >= strands {
                return Err(BraidError::GeneratorOutOfRange { gen: l as i64, strands });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn identity(strands: u32) -> Result<Self, BraidError> {
        BraidWord::new(strands, Vec::new())
    }

    /// Whitespace separated signed integers, e.g. `"1 -2 1"`.
    pub fn parse(strands: u32, text: &str) -> Result<Self, BraidError> {
        let letters = text
            .split_whitespace()
            .map(|t| t.parse::<i32>().map_err(|_| BraidError::Parse(t.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        BraidWord::new(strands, letters)
    }

    pub fn strands(&self) -> u32 {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        assert_eq!(self.strands, other.strands, "strand counts differ");
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord { strands: self.strands, letters }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B{}[{}]", self.strands, self)
    }
}

/// Delimits `σ_i^e … σ_i^{-e}`; the interior avoids σ_i and σ_{i-1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Handle {
    pub start: usize,
    pub end: usize,
}

fn cancel_into(out: &mut Vec<i32>, l: i32) {
    if out.last() == Some(&-l) {
        out.pop();
    } else {
        out.push(l);
    }
}

pub fn free_reduce(w: &BraidWord) -> BraidWord {
    let mut out = Vec::with_capacity(w.letters.len());
    for &l in &w.letters {
        cancel_into(&mut out, l);
    }
    BraidWord { strands: w.strands, letters: out }
}

/// Image in the symmetric group: `result[k-1]` is where strand `k` goes,
/// composing letters right to left like functions.
pub fn permutation(w: &BraidWord) -> Vec<u32> {
    (1..=w.strands)
        .map(|mut x| {
            for &l in w.letters.iter().rev() {
                let i = l.unsigned_abs();
                if x == i {
                    x = i + 1;
                } else if x == i + 1 {
                    x = i;
                }
            }
            x
        })
        .collect()
}

/// The handle with the leftmost right end. Nothing nests inside it, so its
/// σ_{i+1} letters all carry one sign.
pub fn find_handle(letters: &[i32]) -> Option<Handle> {
    for end in 1..letters.len() {
        let x = letters[end];
        let i = x.abs();
        for start in (0..end).rev() {
            let y = letters[start];
            if y == -x {
                return Some(Handle { start, end });
            }
            if y == x || y.abs() == i - 1 {
                break;
            }
        }
    }
    None
}

fn reduce_handle(letters: &[i32], h: Handle) -> Vec<i32> {
    let e = letters[h.start].signum();
    let i = letters[h.start].abs();
    let mut out = Vec::with_capacity(letters.len() + 2 * (h.end - h.start));
    for &l in &letters[..h.start] {
        out.push(l);
    }
    for &l in &letters[h.start + 1..h.end] {
        if l.abs() == i + 1 {
            let d = l.signum();
            out.push(-e * (i + 1));
            out.push(d * i);
            out.push(e * (i + 1));
        } else {
            out.push(l);
        }
    }
    out.extend_from_slice(&letters[h.end + 1..]);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    /// Handle-free, freely reduced word equivalent to the input.
    pub word: BraidWord,
    pub steps: u64,
}

fn step_ceiling(w: &BraidWord) -> u64 {
    let n = w.letters.len() as u64 + 1;
    4096 * n * n * n * w.strands as u64
}

/// Iterated leftmost handle reduction down to a handle-free word.
pub fn handle_reduce(w: &BraidWord) -> Result<Reduction, BraidError> {
    let ceiling = step_ceiling(w);
    let mut letters = free_reduce(w).letters;
    let mut steps = 0u64;
    while let Some(h) = find_handle(&letters) {
        steps += 1;
        if steps > ceiling {
            return Err(BraidError::IterationCeiling { ceiling });
        }
        let next = reduce_handle(&letters, h);
        letters.clear();
        for l in next {
            cancel_into(&mut letters, l);
        }
    }
    Ok(Reduction { word: BraidWord { strands: w.strands, letters }, steps })
}

pub fn try_is_trivial(w: &BraidWord) -> Result<bool, BraidError> {
    if permutation(w).iter().enumerate().any(|(k, &img)| img != k as u32 + 1) {
        return Ok(false);
    }
    // a handle-free nonempty word is σ-positive or σ-negative, never trivial
    Ok(handle_reduce(w)?.word.is_empty())
}

pub fn is_trivial(w: &BraidWord) -> bool {
    try_is_trivial(w).expect("handle reduction terminates")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Screen {
    /// Braid box nontrivial: the necessary condition holds (no proof of incompressibility).
    Screened,
    /// Trivial box: the subtangle splits and a gradient disk exists.
    Flagged,
    /// No box criterion is known for this kind.
    Unverifiable,
}

impl Screen {
    pub fn as_str(&self) -> &'static str {
        match self {
            Screen::Screened => "screened",
            Screen::Flagged => "flagged",
            Screen::Unverifiable => "unverifiable",
        }
    }
}

pub fn screen_gradient_disk(cat: &Catalog, p: &PlacedPiece) -> Result<Screen, BraidError> {
    let need = cat.lookup_kind(&p.kind).map(|k| k.braid_slots).unwrap_or(0);
    if p.braid_decorations.len() < need as usize {
        return Err(BraidError::IncompleteDecoration {
            kind: p.kind.clone(),
            have: p.braid_decorations.len(),
            need,
        });
    }
    if p.kind != "D_2" {
        return Ok(Screen::Unverifiable);
    }
    Ok(if try_is_trivial(&p.braid_decorations[0])? { Screen::Flagged } else { Screen::Screened })
}
