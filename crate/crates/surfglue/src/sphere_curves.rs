//! Essential curves on the 2n-punctured level sphere.
//!
//! A curve is stored as the set of punctures on its side away from the
//! basepoint (the last puncture, label `2n`). Disjoint curves then have
//! nested or disjoint insides, so compatibility is a pair of bit tests.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("puncture label {label} is outside 1..={max}")]
    LabelOutOfRange { label: u32, max: u32 },
    #[error("a curve must have punctures on both sides")]
    Degenerate,
    #[error("curve {0} is not essential")]
    Inessential(Curve),
    #[error("curves {0} and {1} intersect")]
    Incompatible(Curve, Curve),
    #[error("sphere must carry between 1 and 8 strings, got {0}")]
    BadStringCount(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MarkedSphere {
    n_strings: u8,
}

impl MarkedSphere {
    pub fn new(n_strings: u32) -> Result<Self, CurveError> {
        if n_strings == 0 || n_strings > 8 {
            return Err(CurveError::BadStringCount(n_strings));
        }
        Ok(MarkedSphere { n_strings: n_strings as u8 })
    }

    /// The sphere of a 3-bridge decomposition: six punctures, basepoint 6.
    pub fn three_bridge() -> Self {
        MarkedSphere { n_strings: 3 }
    }

    pub fn n_strings(&self) -> u32 {
        self.n_strings as u32
    }

    pub fn n_punctures(&self) -> u32 {
        2 * self.n_strings as u32
    }

    pub fn basepoint(&self) -> u32 {
        self.n_punctures()
    }

    /// String owning puncture `label` (both 1-based).
    pub fn string_of(&self, label: u32) -> u32 {
        label.div_ceil(2)
    }

    fn full_mask(&self) -> u16 {
        ((1u32 << self.n_punctures()) - 1) as u16
    }

    /// Every essential curve on this sphere, in canonical order.
    pub fn all_curves(&self) -> Vec<Curve> {
        let free = self.n_punctures() - 1;
        let mut out: Vec<Curve> = (1u16..(1u16 << free))
            .map(|inside| Curve { inside })
            .filter(|c| c.is_essential(self))
            .collect();
        out.sort();
        out
    }
}

/// A curve, identified by the punctures it bounds away from the basepoint.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Curve {
    inside: u16,
}

impl Curve {
    /// The curve bounding exactly `labels` on one side. If the basepoint is
    /// among them the curve is recorded by the complementary side.
    pub fn bounding(sphere: &MarkedSphere, labels: &[u32]) -> Result<Curve, CurveError> {
        let max = sphere.n_punctures();
        let mut mask = 0u16;
        for &l in labels {
            if l == 0 || l > max {
                return Err(CurveError::LabelOutOfRange { label: l, max });
            }
            mask |= 1 << (l - 1);
        }
        Curve::from_mask(sphere, mask)
    }

    fn from_mask(sphere: &MarkedSphere, mask: u16) -> Result<Curve, CurveError> {
        let full = sphere.full_mask();
        if mask == 0 || mask == full {
            return Err(CurveError::Degenerate);
        }
        let base = 1u16 << (sphere.basepoint() - 1);
        let inside = if mask & base != 0 { full & !mask } else { mask };
        Ok(Curve { inside })
    }

    /// Like [`Curve::bounding`] but also insists on essentiality.
    pub fn essential(sphere: &MarkedSphere, labels: &[u32]) -> Result<Curve, CurveError> {
        let c = Curve::bounding(sphere, labels)?;
        if !c.is_essential(sphere) {
            return Err(CurveError::Inessential(c));
        }
        Ok(c)
    }

    pub fn mask(&self) -> u16 {
        self.inside
    }

    pub fn size(&self) -> u32 {
        self.inside.count_ones()
    }

    pub fn labels(&self) -> Vec<u32> {
        (0..16).filter(|b| self.inside & (1 << b) != 0).map(|b| b + 1).collect()
    }

    pub fn contains(&self, label: u32) -> bool {
        (1..=16).contains(&label) && self.inside & (1 << (label - 1)) != 0
    }

    pub fn is_essential(&self, sphere: &MarkedSphere) -> bool {
        let k = self.size();
        let base = 1u16 << (sphere.basepoint() - 1);
        self.inside & base == 0
            && self.inside & !sphere.full_mask() == 0
            && k >= 2
            && sphere.n_punctures() - k >= 2
    }

    /// Strictly nested inside `other` (as sets away from the basepoint).
    pub fn nested_in(&self, other: &Curve) -> bool {
        self.inside != other.inside && self.inside & other.inside == self.inside
    }

    /// Equal, nested, or disjoint: the curves can be drawn without crossing.
    pub fn compatible(&self, other: &Curve) -> bool {
        let meet = self.inside & other.inside;
        meet == 0 || meet == self.inside || meet == other.inside
    }
}

impl Ord for Curve {
    fn cmp(&self, other: &Self) -> Ordering {
        // size first, then the sorted label lists compared lexicographically;
        // for equal sizes that is the order of the bit-reversed masks
        self.size()
            .cmp(&other.size())
            .then_with(|| other.inside.reverse_bits().cmp(&self.inside.reverse_bits()))
    }
}

impl PartialOrd for Curve {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels().iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A multiset of pairwise disjoint essential curves, kept sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CurveSystem {
    curves: Vec<Curve>,
}

impl CurveSystem {
    pub fn new(curves: Vec<Curve>) -> Result<Self, CurveError> {
        for (i, a) in curves.iter().enumerate() {
            for b in &curves[i + 1..] {
                if !a.compatible(b) {
                    return Err(CurveError::Incompatible(*a, *b));
                }
            }
        }
        Ok(Self::new_unchecked(curves))
    }

    pub(crate) fn new_unchecked(mut curves: Vec<Curve>) -> Self {
        curves.sort();
        CurveSystem { curves }
    }

    /// Parse from the catalog encoding: a list of label lists.
    pub fn from_labels(sphere: &MarkedSphere, lists: &[Vec<u32>]) -> Result<Self, CurveError> {
        let curves = lists
            .iter()
            .map(|l| Curve::essential(sphere, l))
            .collect::<Result<Vec<_>, _>>()?;
        CurveSystem::new(curves)
    }

    pub fn to_labels(&self) -> Vec<Vec<u32>> {
        self.curves.iter().map(Curve::labels).collect()
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        self.curves
            .iter()
            .enumerate()
            .all(|(i, a)| self.curves[i + 1..].iter().all(|b| a.compatible(b)))
    }

    /// Union of two systems, if the result is still a system.
    pub fn merged(&self, other: &CurveSystem) -> Option<CurveSystem> {
        let ok = self.curves.iter().all(|a| other.curves.iter().all(|b| a.compatible(b)));
        ok.then(|| {
            let mut all = self.curves.clone();
            all.extend_from_slice(&other.curves);
            CurveSystem::new_unchecked(all)
        })
    }
}

impl fmt::Display for CurveSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.curves.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl fmt::Debug for CurveSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Sort a list of curves into canonical order, rejecting crossing pairs.
pub fn canonicalize(curves: &[Curve]) -> Result<CurveSystem, CurveError> {
    CurveSystem::new(curves.to_vec())
}

pub fn systems_match(a: &CurveSystem, b: &CurveSystem) -> bool {
    a.curves == b.curves
}

/// Relabelling of punctures induced by permuting strings and flipping their ends.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TangleSymmetry {
    /// `string_permutation[i]` is the image of string `i` (0-based).
    string_permutation: Vec<u8>,
    endpoint_swaps: Vec<bool>,
}

impl TangleSymmetry {
    pub fn new(string_permutation: Vec<u8>, endpoint_swaps: Vec<bool>) -> Option<Self> {
        let n = string_permutation.len();
        let mut seen = vec![false; n];
        for &p in &string_permutation {
            if p as usize >= n || std::mem::replace(&mut seen[p as usize], true) {
                return None;
            }
        }
        (endpoint_swaps.len() == n).then_some(TangleSymmetry { string_permutation, endpoint_swaps })
    }

    pub fn identity(n: usize) -> Self {
        TangleSymmetry {
            string_permutation: (0..n as u8).collect(),
            endpoint_swaps: vec![false; n],
        }
    }

    pub fn string_permutation(&self) -> &[u8] {
        &self.string_permutation
    }

    pub fn endpoint_swaps(&self) -> &[bool] {
        &self.endpoint_swaps
    }

    /// Image of a puncture label. String `i` lands on string `perm[i]`,
    /// with its two ends exchanged when `swaps[i]` is set.
    pub fn apply_label(&self, label: u32) -> u32 {
        let i = ((label - 1) / 2) as usize;
        let end = (label - 1) % 2;
        let j = self.string_permutation[i] as u32;
        let end = if self.endpoint_swaps[i] { 1 - end } else { end };
        2 * j + end + 1
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &TangleSymmetry) -> TangleSymmetry {
        let n = self.string_permutation.len();
        let mut perm = vec![0u8; n];
        let mut swaps = vec![false; n];
        for i in 0..n {
            let mid = other.string_permutation[i] as usize;
            perm[i] = self.string_permutation[mid];
            swaps[i] = other.endpoint_swaps[i] ^ self.endpoint_swaps[mid];
        }
        TangleSymmetry { string_permutation: perm, endpoint_swaps: swaps }
    }

    pub fn apply_curve(&self, sphere: &MarkedSphere, c: &Curve) -> Curve {
        let mut mask = 0u16;
        for l in c.labels() {
            mask |= 1 << (self.apply_label(l) - 1);
        }
        Curve::from_mask(sphere, mask).expect("symmetry preserves nondegenerate curves")
    }

    /// Whether the image of `c` had to be re-encoded by its complement.
    pub fn flips(&self, sphere: &MarkedSphere, c: &Curve) -> bool {
        c.labels().iter().any(|&l| self.apply_label(l) == sphere.basepoint())
    }

    pub fn apply_system(&self, sphere: &MarkedSphere, sys: &CurveSystem) -> CurveSystem {
        CurveSystem::new_unchecked(sys.curves.iter().map(|c| self.apply_curve(sphere, c)).collect())
    }
}

/// All `n!·2ⁿ` symmetries, identity first.
pub fn symmetry_group(sphere: &MarkedSphere) -> Vec<TangleSymmetry> {
    let n = sphere.n_strings() as usize;
    let mut perms: Vec<Vec<u8>> = Vec::new();
    permutations(&mut (0..n as u8).collect::<Vec<_>>(), 0, &mut perms);
    perms.sort();
    let mut out = Vec::with_capacity(perms.len() << n);
    for p in &perms {
        for bits in 0..(1u32 << n) {
            let swaps = (0..n).map(|i| bits & (1 << i) != 0).collect();
            out.push(TangleSymmetry { string_permutation: p.clone(), endpoint_swaps: swaps });
        }
    }
    out
}

fn permutations(items: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

pub fn apply_symmetry(sphere: &MarkedSphere, g: &TangleSymmetry, sys: &CurveSystem) -> CurveSystem {
    g.apply_system(sphere, sys)
}

pub fn symmetry_orbit(sphere: &MarkedSphere, sys: &CurveSystem) -> BTreeSet<CurveSystem> {
    symmetry_group(sphere).iter().map(|g| g.apply_system(sphere, sys)).collect()
}

/// One representative (the least element) of every orbit of `b`-curve systems.
pub fn system_orbit_representatives(sphere: &MarkedSphere, b: usize) -> Vec<CurveSystem> {
    let curves = sphere.all_curves();
    let mut reps = BTreeSet::new();
    let mut stack: Vec<Curve> = Vec::new();
    fn walk(
        sphere: &MarkedSphere,
        curves: &[Curve],
        start: usize,
        b: usize,
        stack: &mut Vec<Curve>,
        reps: &mut BTreeSet<CurveSystem>,
    ) {
        if stack.len() == b {
            let sys = CurveSystem::new_unchecked(stack.clone());
            let least = symmetry_orbit(sphere, &sys).into_iter().next().unwrap();
            reps.insert(least);
            return;
        }
        for i in start..curves.len() {
            if stack.iter().all(|c| c.compatible(&curves[i])) {
                stack.push(curves[i]);
                walk(sphere, curves, i, b, stack, reps);
                stack.pop();
            }
        }
    }
    walk(sphere, &curves, 0, b, &mut stack, &mut reps);
    reps.into_iter().collect()
}
