//! Gluing two tangle sides along the level sphere.
//!
//! Each side is a multiset of pieces; each piece puts a symmetry image of one
//! of its kind's templates on the sphere. Two sides can be glued when their
//! combined curve systems agree. Parallel copies of one curve are told apart
//! by their level, counted outward from the side away from the basepoint, and
//! a side's pieces have to be stacked consistently (see [`arrangement_ok`]).
//! Gluing joins the piece that owns a (curve, level) slot on one side to the
//! piece that owns the same slot on the other.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::catalog::{Catalog, CatalogError, KindId, Label, Reason, Shape};
use crate::braidcheck::BraidWord;
use crate::coexistence::{can_coexist_ids, multiset_admissible_ids};
use crate::sphere_curves::{symmetry_group, Curve, CurveSystem, MarkedSphere, TangleSymmetry};

#[derive(Debug, Error)]
pub enum GluerError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("identification leaves circle {0} unmatched")]
    IncompleteIdentification(Curve),
    #[error("the glued surface is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("{0} is accepted but has no normalization entry")]
    UnlabeledAcceptance(String),
    #[error("{0} is not in the normalization table")]
    NotNormalized(String),
    #[error("bounds must be positive")]
    BadBounds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedPiece {
    pub kind: String,
    pub side: u8,
    pub boundary: CurveSystem,
    pub braid_decorations: Vec<BraidWord>,
}

/// One identified circle: the copy of `curve` at `level` belongs to piece
/// `piece1` of side 1 and to piece `piece2` of side 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Glue {
    pub curve: Curve,
    pub level: usize,
    pub piece1: usize,
    pub piece2: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub side1: Vec<PlacedPiece>,
    pub side2: Vec<PlacedPiece>,
    pub identification: Vec<Glue>,
}

impl Configuration {
    pub fn swapped(&self) -> Configuration {
        let flip = |p: &PlacedPiece| PlacedPiece { side: 3 - p.side, ..p.clone() };
        Configuration {
            side1: self.side2.iter().map(flip).collect(),
            side2: self.side1.iter().map(flip).collect(),
            identification: self
                .identification
                .iter()
                .map(|g| Glue { piece1: g.piece2, piece2: g.piece1, ..*g })
                .collect(),
        }
    }

    /// Move the whole picture by `g`. Curves that get re-encoded by their
    /// complement see their parallel copies in reverse order.
    pub fn apply_symmetry(&self, sphere: &MarkedSphere, g: &TangleSymmetry) -> Configuration {
        let mv = |p: &PlacedPiece| PlacedPiece {
            boundary: g.apply_system(sphere, &p.boundary),
            ..p.clone()
        };
        let copies = |c: Curve| self.identification.iter().filter(|x| x.curve == c).count();
        let mut identification: Vec<Glue> = self
            .identification
            .iter()
            .map(|x| {
                let level = if g.flips(sphere, &x.curve) { copies(x.curve) - 1 - x.level } else { x.level };
                Glue { curve: g.apply_curve(sphere, &x.curve), level, ..*x }
            })
            .collect();
        identification.sort();
        Configuration {
            side1: self.side1.iter().map(mv).collect(),
            side2: self.side2.iter().map(mv).collect(),
            identification,
        }
    }

    pub fn kinds(&self) -> (Vec<&str>, Vec<&str>) {
        (
            self.side1.iter().map(|p| p.kind.as_str()).collect(),
            self.side2.iter().map(|p| p.kind.as_str()).collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfaceClass {
    pub genus: u32,
    pub punctures: u32,
}

impl SurfaceClass {
    pub fn euler(&self) -> i64 {
        2 - 2 * self.genus as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictRecord {
    pub status: Status,
    pub label: Option<Label>,
    pub reason: Option<Reason>,
    pub citation: Option<String>,
}

impl VerdictRecord {
    fn accepted(label: Label) -> Self {
        VerdictRecord { status: Status::Accepted, label: Some(label), reason: None, citation: None }
    }

    fn rejected(reason: Reason, citation: String) -> Self {
        VerdictRecord { status: Status::Rejected, label: None, reason: Some(reason), citation: Some(citation) }
    }

    pub fn is_accepted(&self) -> bool {
        self.status == Status::Accepted
    }
}

impl fmt::Display for VerdictRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.status, self.label, self.reason) {
            (Status::Accepted, Some(l), _) => write!(f, "accepted: {l}"),
            (Status::Rejected, _, Some(r)) => write!(f, "rejected: {r}"),
            _ => write!(f, "{:?}", self),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_pieces_per_side: usize,
    pub max_total_circles: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_pieces_per_side: 4, max_total_circles: 8 }
    }
}

/// Undirected multigraph: one vertex per piece, one edge per glued circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingGraph {
    /// (side, index within side, kind name)
    pub vertices: Vec<(u8, usize, String)>,
    /// vertex indices and the shared curve
    pub edges: Vec<(usize, usize, Curve)>,
}

impl GluingGraph {
    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.vertices.len());
        for &(a, b, _) in &self.edges {
            uf.union(a, b);
        }
        uf.count()
    }

    pub fn is_connected(&self) -> bool {
        self.components() == 1
    }

    pub fn to_dot(&self, name: &str) -> String {
        let vname = |i: usize| {
            let (side, idx, kind) = &self.vertices[i];
            format!("{kind}#{idx}@{side}")
        };
        let mut s = format!("graph \"{name}\" {{\n");
        for i in 0..self.vertices.len() {
            s.push_str(&format!("  \"{}\";\n", vname(i)));
        }
        for &(a, b, c) in &self.edges {
            s.push_str(&format!("  \"{}\" -- \"{}\" [label=\"{}\"];\n", vname(a), vname(b), c));
        }
        s.push_str("}\n");
        s
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

// ---- arrangements ----------------------------------------------------------

/// The circles of one side in canonical slot order: each distinct curve
/// with its multiplicity, smallest curve first.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Slots {
    /// distinct curves with the pieces carrying them (repeats allowed)
    groups: Vec<(Curve, Vec<usize>)>,
}

impl Slots {
    fn of(pieces: &[&CurveSystem]) -> Slots {
        let mut all: Vec<(Curve, usize)> = pieces
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.curves().iter().map(move |&c| (c, i)))
            .collect();
        all.sort();
        let mut groups: Vec<(Curve, Vec<usize>)> = Vec::new();
        for (c, i) in all {
            match groups.last_mut() {
                Some((last, owners)) if *last == c => owners.push(i),
                _ => groups.push((c, vec![i])),
            }
        }
        Slots { groups }
    }

    /// Flattened (curve, level) list matching the arrangement vectors.
    fn keys(&self) -> Vec<(Curve, usize)> {
        self.groups
            .iter()
            .flat_map(|(c, owners)| (0..owners.len()).map(move |lvl| (*c, lvl)))
            .collect()
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Slot `s` lies inside slot `t` when `t` separates it from the basepoint.
fn slot_inside(s: (Curve, usize), t: (Curve, usize)) -> bool {
    if s.0 == t.0 {
        s.1 < t.1
    } else {
        s.0.nested_in(&t.0)
    }
}

/// Stacking rule for one side: seen from any other piece `b`, the circles
/// of a piece `a` are all enclosed by `b` an even number of times or all an
/// odd number of times. A piece sits in one complementary region of every
/// other piece, so its boundary circles cannot be split between regions.
pub(crate) fn arrangement_ok(keys: &[(Curve, usize)], owner: &[usize], n_pieces: usize) -> bool {
    for a in 0..n_pieces {
        for b in 0..n_pieces {
            if a == b {
                continue;
            }
            let mut parity: Option<bool> = None;
            for (s, &oa) in owner.iter().enumerate() {
                if oa != a {
                    continue;
                }
                let odd = owner
                    .iter()
                    .enumerate()
                    .filter(|&(t, &ob)| ob == b && slot_inside(keys[s], keys[t]))
                    .count()
                    % 2
                    == 1;
                match parity {
                    None => parity = Some(odd),
                    Some(p) if p != odd => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

/// All consistent ways to stack the pieces on one side, as owner vectors
/// aligned with `Slots::keys`.
fn arrangements(slots: &Slots, n_pieces: usize) -> Vec<Vec<usize>> {
    let keys = slots.keys();
    let mut orders: Vec<Vec<usize>> = slots
        .groups
        .iter()
        .map(|(_, owners)| {
            let mut o = owners.clone();
            o.sort_unstable();
            o
        })
        .collect();
    let mut out = Vec::new();
    loop {
        let owner: Vec<usize> = orders.iter().flatten().copied().collect();
        if arrangement_ok(&keys, &owner, n_pieces) {
            out.push(owner);
        }
        // odometer over the per-curve permutations
        let mut g = 0;
        loop {
            if g == orders.len() {
                return out;
            }
            if next_permutation(&mut orders[g]) {
                break;
            }
            orders[g].sort_unstable();
            g += 1;
        }
    }
}

fn connected(n1: usize, n2: usize, a1: &[usize], a2: &[usize]) -> bool {
    let mut uf = UnionFind::new(n1 + n2);
    for (x, y) in a1.iter().zip(a2) {
        uf.union(*x, n1 + *y);
    }
    uf.count() == 1
}

// ---- the engine ------------------------------------------------------------

/// Result of the placement search for a pair of kind lists.
#[derive(Debug, Clone)]
pub enum Matching {
    /// Some gluing is connected; the first one found.
    Connected(Configuration),
    /// Boundaries can be matched, but every gluing falls apart; the first match.
    Disconnected(Configuration),
    NoMatch,
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Accepted { label: Option<Label>, witness: Configuration },
    Rejected { reason: Reason, citation: String },
}

#[derive(Debug, Clone)]
pub struct AcceptedShape {
    pub shape: Shape,
    pub label: Option<Label>,
    pub witness: Configuration,
}

#[derive(Debug, Clone)]
pub struct RejectedShape {
    pub shape: Shape,
    pub reason: Reason,
    pub citation: String,
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub target: SurfaceClass,
    pub accepted: Vec<AcceptedShape>,
    pub rejected: Vec<RejectedShape>,
}

pub struct Gluer<'c> {
    cat: &'c Catalog,
    /// every symmetry image of every template, per kind
    placements: Vec<Vec<CurveSystem>>,
    /// indices into `placements` of the templates themselves
    templates: Vec<Vec<usize>>,
}

impl<'c> Gluer<'c> {
    pub fn new(cat: &'c Catalog) -> Gluer<'c> {
        let sphere = *cat.sphere();
        let group = symmetry_group(&sphere);
        let mut placements = Vec::new();
        let mut templates = Vec::new();
        for k in cat.kinds() {
            let mut pl: Vec<CurveSystem> = Vec::new();
            for t in &k.boundary_patterns {
                for g in &group {
                    let img = g.apply_system(&sphere, t);
                    if !pl.contains(&img) {
                        pl.push(img);
                    }
                }
            }
            pl.sort();
            let tp = k
                .boundary_patterns
                .iter()
                .map(|t| pl.iter().position(|p| p == t).expect("template is in its own orbit"))
                .collect();
            placements.push(pl);
            templates.push(tp);
        }
        Gluer { cat, placements, templates }
    }

    pub fn catalog(&self) -> &'c Catalog {
        self.cat
    }

    pub fn placements(&self, kind: KindId) -> &[CurveSystem] {
        &self.placements[kind]
    }

    fn circles(&self, side: &[KindId]) -> u32 {
        side.iter().map(|&k| self.cat.kind(k).boundary_count).sum()
    }

    fn punctures(&self, side: &[KindId]) -> u32 {
        side.iter().map(|&k| self.cat.kind(k).knot_punctures).sum()
    }

    fn euler(&self, side: &[KindId]) -> i64 {
        side.iter().map(|&k| self.cat.kind(k).euler_char()).sum()
    }

    /// Side 1 placements with the first piece pinned to a template: any
    /// gluing can be moved there by a global symmetry.
    fn side1_choices(&self, kinds: &[KindId]) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut chosen = Vec::with_capacity(kinds.len());
        let mut curves: Vec<Curve> = Vec::new();
        self.walk_side1(kinds, &mut chosen, &mut curves, &mut out);
        out
    }

    fn walk_side1(
        &self,
        kinds: &[KindId],
        chosen: &mut Vec<usize>,
        curves: &mut Vec<Curve>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = chosen.len();
        if i == kinds.len() {
            out.push(chosen.clone());
            return;
        }
        let k = kinds[i];
        let candidates: Vec<usize> = if i == 0 {
            self.templates[k].clone()
        } else {
            // equal neighbours (past the pinned one) in nondecreasing order
            let from = if i >= 2 && kinds[i - 1] == k { chosen[i - 1] } else { 0 };
            (from..self.placements[k].len()).collect()
        };
        for idx in candidates {
            let p = &self.placements[k][idx];
            if p.curves().iter().all(|c| curves.iter().all(|d| c.compatible(d))) {
                let mark = curves.len();
                curves.extend_from_slice(p.curves());
                chosen.push(idx);
                self.walk_side1(kinds, chosen, curves, out);
                chosen.pop();
                curves.truncate(mark);
            }
        }
    }

    /// Ways to cut the curve multiset `need` into placements of `kinds`.
    fn side2_choices(&self, kinds: &[KindId], need: &mut Vec<(Curve, usize)>) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut chosen = Vec::with_capacity(kinds.len());
        self.walk_side2(kinds, need, &mut chosen, &mut out);
        out
    }

    fn walk_side2(
        &self,
        kinds: &[KindId],
        need: &mut Vec<(Curve, usize)>,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = chosen.len();
        if i == kinds.len() {
            if need.iter().all(|&(_, n)| n == 0) {
                out.push(chosen.clone());
            }
            return;
        }
        let k = kinds[i];
        let from = if i >= 1 && kinds[i - 1] == k { chosen[i - 1] } else { 0 };
        'placement: for idx in from..self.placements[k].len() {
            let p = &self.placements[k][idx];
            let mut took = Vec::with_capacity(p.len());
            for c in p.curves() {
                match need.iter_mut().find(|(d, n)| d == c && *n > 0) {
                    Some(slot) => {
                        slot.1 -= 1;
                        took.push(*c);
                    }
                    None => {
                        for t in took {
                            need.iter_mut().find(|(d, _)| *d == t).unwrap().1 += 1;
                        }
                        continue 'placement;
                    }
                }
            }
            chosen.push(idx);
            self.walk_side2(kinds, need, chosen, out);
            chosen.pop();
            for t in took {
                need.iter_mut().find(|(d, _)| *d == t).unwrap().1 += 1;
            }
        }
    }

    fn build(
        &self,
        (s1, s2): (&[KindId], &[KindId]),
        (p1, p2): (&[usize], &[usize]),
        keys: &[(Curve, usize)],
        (a1, a2): (&[usize], &[usize]),
    ) -> Configuration {
        let side = |kinds: &[KindId], pl: &[usize], n: u8| -> Vec<PlacedPiece> {
            kinds
                .iter()
                .zip(pl)
                .map(|(&k, &idx)| PlacedPiece {
                    kind: self.cat.kind(k).name.clone(),
                    side: n,
                    boundary: self.placements[k][idx].clone(),
                    braid_decorations: Vec::new(),
                })
                .collect()
        };
        Configuration {
            side1: side(s1, p1, 1),
            side2: side(s2, p2, 2),
            identification: keys
                .iter()
                .zip(a1.iter().zip(a2))
                .map(|(&(curve, level), (&x, &y))| Glue { curve, level, piece1: x, piece2: y })
                .collect(),
        }
    }

    /// Exhaustive placement search. Deterministic: the first witness in
    /// search order is returned.
    pub fn search(&self, s1: &[KindId], s2: &[KindId]) -> Matching {
        if s1.is_empty() || s2.is_empty() || self.circles(s1) != self.circles(s2) {
            return Matching::NoMatch;
        }
        let mut first_match: Option<Configuration> = None;
        for p1 in self.side1_choices(s1) {
            let sys1: Vec<&CurveSystem> =
                s1.iter().zip(&p1).map(|(&k, &i)| &self.placements[k][i]).collect();
            let slots1 = Slots::of(&sys1);
            let mut need: Vec<(Curve, usize)> =
                slots1.groups.iter().map(|(c, o)| (*c, o.len())).collect();
            let choices2 = self.side2_choices(s2, &mut need);
            if choices2.is_empty() {
                continue;
            }
            let arr1 = arrangements(&slots1, s1.len());
            if arr1.is_empty() {
                continue;
            }
            let keys = slots1.keys();
            for p2 in choices2 {
                let sys2: Vec<&CurveSystem> =
                    s2.iter().zip(&p2).map(|(&k, &i)| &self.placements[k][i]).collect();
                let slots2 = Slots::of(&sys2);
                let arr2 = arrangements(&slots2, s2.len());
                if arr2.is_empty() {
                    continue;
                }
                for a1 in &arr1 {
                    for a2 in &arr2 {
                        if connected(s1.len(), s2.len(), a1, a2) {
                            return Matching::Connected(self.build((s1, s2), (&p1, &p2), &keys, (a1, a2)));
                        }
                    }
                }
                if first_match.is_none() {
                    first_match = Some(self.build((s1, s2), (&p1, &p2), &keys, (&arr1[0], &arr2[0])));
                }
            }
        }
        match first_match {
            Some(c) => Matching::Disconnected(c),
            None => Matching::NoMatch,
        }
    }

    /// One identification of the two sides' boundaries, if any exists.
    pub fn boundaries_match(&self, s1: &[KindId], s2: &[KindId]) -> Option<Configuration> {
        match self.search(s1, s2) {
            Matching::Connected(c) | Matching::Disconnected(c) => Some(c),
            Matching::NoMatch => None,
        }
    }

    /// Run every filter on a kind-level shape, in the fixed order.
    pub fn evaluate(&self, s1: &[KindId], s2: &[KindId], target: SurfaceClass) -> Outcome {
        let total = self.punctures(s1) + self.punctures(s2);
        if total != target.punctures {
            return Outcome::Rejected {
                reason: Reason::WrongPunctures,
                citation: format!("pieces meet the knot {total} times, target needs {}", target.punctures),
            };
        }
        for side in [s1, s2] {
            if !multiset_admissible_ids(self.cat, side) {
                let (x, y) = first_clash(self.cat, side);
                return Outcome::Rejected {
                    reason: Reason::Coexistence,
                    citation: format!(
                        "{} and {} cannot lie in one trivial tangle",
                        self.cat.kind(x).name,
                        self.cat.kind(y).name
                    ),
                };
            }
        }
        let witness = match self.search(s1, s2) {
            Matching::NoMatch => {
                return Outcome::Rejected {
                    reason: Reason::BoundaryMismatch,
                    citation: "no placement makes the two sides' boundary systems coincide".into(),
                }
            }
            Matching::Disconnected(_) => {
                return Outcome::Rejected {
                    reason: Reason::Disconnected,
                    citation: "every identification of the boundaries leaves several components".into(),
                }
            }
            Matching::Connected(c) => c,
        };
        let chi = self.euler(s1) + self.euler(s2);
        if chi != target.euler() {
            return Outcome::Rejected {
                reason: Reason::WrongEuler,
                citation: format!("total Euler characteristic {chi}, genus {} needs {}", target.genus, target.euler()),
            };
        }
        let shape = Shape::new(s1.to_vec(), s2.to_vec());
        if let Some(rule) = self.cat.exclusion_for(&shape) {
            return Outcome::Rejected { reason: rule.reason, citation: rule.citation.clone() };
        }
        Outcome::Accepted { label: self.cat.normalize(&shape), witness }
    }

    /// Verdict for a kind-level shape.
    pub fn check_shape(
        &self,
        s1: &[KindId],
        s2: &[KindId],
        target: SurfaceClass,
    ) -> Result<(VerdictRecord, Option<Configuration>), GluerError> {
        match self.evaluate(s1, s2, target) {
            Outcome::Rejected { reason, citation } => Ok((VerdictRecord::rejected(reason, citation), None)),
            Outcome::Accepted { label: Some(l), witness } => Ok((VerdictRecord::accepted(l), Some(witness))),
            Outcome::Accepted { label: None, .. } => Err(GluerError::UnlabeledAcceptance(
                Shape::new(s1.to_vec(), s2.to_vec()).display(self.cat),
            )),
        }
    }

    pub fn check_names(
        &self,
        s1: &[&str],
        s2: &[&str],
        target: SurfaceClass,
    ) -> Result<VerdictRecord, GluerError> {
        let ids = |s: &[&str]| s.iter().map(|n| self.cat.id(n)).collect::<Result<Vec<_>, _>>();
        Ok(self.check_shape(&ids(s1)?, &ids(s2)?, target)?.0)
    }

    // ---- concrete configurations --------------------------------------------

    fn kind_ids(&self, c: &Configuration) -> Result<(Vec<KindId>, Vec<KindId>), GluerError> {
        let ids = |side: &[PlacedPiece]| {
            side.iter().map(|p| self.cat.id(&p.kind)).collect::<Result<Vec<_>, _>>()
        };
        Ok((ids(&c.side1)?, ids(&c.side2)?))
    }

    pub fn total_euler(&self, c: &Configuration) -> Result<i64, GluerError> {
        let (a, b) = self.kind_ids(c)?;
        Ok(self.euler(&a) + self.euler(&b))
    }

    pub fn total_punctures(&self, c: &Configuration) -> Result<u32, GluerError> {
        let (a, b) = self.kind_ids(c)?;
        Ok(self.punctures(&a) + self.punctures(&b))
    }

    /// Checks every structural invariant of a configuration: placements are
    /// images of templates, each side is a curve system, the identification
    /// is a bijection of slots and both sides are stacked consistently.
    pub fn validate(&self, c: &Configuration) -> Result<(), GluerError> {
        let bad = |m: String| Err(GluerError::InvalidConfiguration(m));
        if c.side1.is_empty() || c.side2.is_empty() {
            return bad("both sides need at least one piece".into());
        }
        let (ids1, ids2) = self.kind_ids(c)?;
        for (side, ids) in [(&c.side1, &ids1), (&c.side2, &ids2)] {
            for (p, &k) in side.iter().zip(ids.iter()) {
                if !self.placements[k].contains(&p.boundary) {
                    return bad(format!("{} is not a placement of {}", p.boundary, p.kind));
                }
            }
            let mut all = CurveSystem::default();
            for p in side.iter() {
                all = match all.merged(&p.boundary) {
                    Some(s) => s,
                    None => return bad("boundary circles on one side cross".into()),
                };
            }
        }
        let sys1: Vec<&CurveSystem> = c.side1.iter().map(|p| &p.boundary).collect();
        let sys2: Vec<&CurveSystem> = c.side2.iter().map(|p| &p.boundary).collect();
        let (slots1, slots2) = (Slots::of(&sys1), Slots::of(&sys2));
        let keys = slots1.keys();
        if keys != slots2.keys() {
            return bad("the two sides carry different curve systems".into());
        }
        let mut owners1 = vec![usize::MAX; keys.len()];
        let mut owners2 = vec![usize::MAX; keys.len()];
        for g in &c.identification {
            let Some(pos) = keys.iter().position(|k| *k == (g.curve, g.level)) else {
                return bad(format!("no circle {} at level {}", g.curve, g.level));
            };
            if owners1[pos] != usize::MAX {
                return bad(format!("circle {} level {} identified twice", g.curve, g.level));
            }
            owners1[pos] = g.piece1;
            owners2[pos] = g.piece2;
        }
        if let Some(pos) = owners1.iter().position(|&o| o == usize::MAX) {
            return Err(GluerError::IncompleteIdentification(keys[pos].0));
        }
        for (slots, owners, n) in [(&slots1, &owners1, c.side1.len()), (&slots2, &owners2, c.side2.len())] {
            let mut at = 0;
            for (_, expected) in &slots.groups {
                let mut got = owners[at..at + expected.len()].to_vec();
                got.sort_unstable();
                let mut want = expected.clone();
                want.sort_unstable();
                if got != want {
                    return bad("identification assigns a circle to a piece that does not carry it".into());
                }
                at += expected.len();
            }
            if !arrangement_ok(&keys, owners, n) {
                return bad("pieces on one side are stacked inconsistently".into());
            }
        }
        Ok(())
    }

    pub fn gluing_graph(&self, c: &Configuration) -> Result<GluingGraph, GluerError> {
        let n1 = c.side1.len();
        let circles1: usize = c.side1.iter().map(|p| p.boundary.len()).sum();
        let circles2: usize = c.side2.iter().map(|p| p.boundary.len()).sum();
        if c.identification.len() != circles1 || circles1 != circles2 {
            let have: Vec<Curve> = c.identification.iter().map(|g| g.curve).collect();
            let missing = c
                .side1
                .iter()
                .chain(&c.side2)
                .flat_map(|p| p.boundary.curves().iter().copied())
                .find(|x| !have.contains(x))
                .or_else(|| have.first().copied());
            return Err(match missing {
                Some(m) => GluerError::IncompleteIdentification(m),
                None => GluerError::InvalidConfiguration("no circles to glue".into()),
            });
        }
        let vertices = c
            .side1
            .iter()
            .enumerate()
            .map(|(i, p)| (1u8, i, p.kind.clone()))
            .chain(c.side2.iter().enumerate().map(|(i, p)| (2u8, i, p.kind.clone())))
            .collect();
        let edges = c.identification.iter().map(|g| (g.piece1, n1 + g.piece2, g.curve)).collect();
        Ok(GluingGraph { vertices, edges })
    }

    pub fn closed_genus(&self, c: &Configuration) -> Result<u32, GluerError> {
        let graph = self.gluing_graph(c)?;
        let components = graph.components();
        if components != 1 {
            return Err(GluerError::Disconnected { components });
        }
        let chi = self.total_euler(c)?;
        assert!(chi % 2 == 0 && chi <= 2, "closed connected surface with euler characteristic {chi}");
        Ok(((2 - chi) / 2) as u32)
    }

    pub fn apply_exclusions(&self, c: &Configuration) -> Result<Option<(Reason, String)>, GluerError> {
        let (a, b) = self.kind_ids(c)?;
        Ok(self
            .cat
            .exclusion_for(&Shape::new(a, b))
            .map(|r| (r.reason, r.citation.clone())))
    }

    /// Verdict for one concrete gluing.
    pub fn check(&self, c: &Configuration, target: SurfaceClass) -> Result<VerdictRecord, GluerError> {
        self.validate(c)?;
        let (a, b) = self.kind_ids(c)?;
        let punct = self.punctures(&a) + self.punctures(&b);
        if punct != target.punctures {
            return Ok(VerdictRecord::rejected(
                Reason::WrongPunctures,
                format!("pieces meet the knot {punct} times, target needs {}", target.punctures),
            ));
        }
        for side in [&a, &b] {
            if !multiset_admissible_ids(self.cat, side) {
                let (x, y) = first_clash(self.cat, side);
                return Ok(VerdictRecord::rejected(
                    Reason::Coexistence,
                    format!(
                        "{} and {} cannot lie in one trivial tangle",
                        self.cat.kind(x).name,
                        self.cat.kind(y).name
                    ),
                ));
            }
        }
        if !self.gluing_graph(c)?.is_connected() {
            return Ok(VerdictRecord::rejected(
                Reason::Disconnected,
                "this identification leaves several components".into(),
            ));
        }
        let chi = self.total_euler(c)?;
        if chi != target.euler() {
            return Ok(VerdictRecord::rejected(
                Reason::WrongEuler,
                format!("total Euler characteristic {chi}, genus {} needs {}", target.genus, target.euler()),
            ));
        }
        if let Some((reason, cite)) = self.apply_exclusions(c)? {
            return Ok(VerdictRecord::rejected(reason, cite));
        }
        let shape = Shape::new(a, b);
        match self.cat.normalize(&shape) {
            Some(l) => Ok(VerdictRecord::accepted(l)),
            None => Err(GluerError::UnlabeledAcceptance(shape.display(self.cat))),
        }
    }

    pub fn normalize(&self, shape: &Shape) -> Result<Label, GluerError> {
        self.cat
            .normalize(shape)
            .ok_or_else(|| GluerError::NotNormalized(shape.display(self.cat)))
    }

    /// Coexistence-admissible sides within the bounds, in canonical order.
    pub fn admissible_sides(&self, bounds: Bounds) -> Vec<Vec<KindId>> {
        let n = self.cat.kinds().len();
        let mut out = Vec::new();
        let mut cur: Vec<KindId> = Vec::new();
        fn walk(
            g: &Gluer<'_>,
            n: usize,
            bounds: Bounds,
            start: usize,
            circles: u32,
            cur: &mut Vec<KindId>,
            out: &mut Vec<Vec<KindId>>,
        ) {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            if cur.len() == bounds.max_pieces_per_side {
                return;
            }
            for k in start..n {
                let c = circles + g.cat.kind(k).boundary_count;
                if c > bounds.max_total_circles {
                    continue;
                }
                if cur.iter().all(|&x| can_coexist_ids(g.cat, x, k)) {
                    cur.push(k);
                    walk(g, n, bounds, k, c, cur, out);
                    cur.pop();
                }
            }
        }
        walk(self, n, bounds, 0, 0, &mut cur, &mut out);
        out.sort();
        out
    }

    /// Candidate shapes: pairs of admissible sides whose puncture and Euler
    /// totals already fit the target. Anything else fails on arithmetic alone.
    pub fn candidates(&self, target: SurfaceClass, bounds: Bounds) -> Vec<Shape> {
        let sides = self.admissible_sides(bounds);
        let mut out = Vec::new();
        for (i, a) in sides.iter().enumerate() {
            for b in &sides[i..] {
                if self.punctures(a) + self.punctures(b) == target.punctures
                    && self.euler(a) + self.euler(b) == target.euler()
                {
                    out.push(Shape::new(a.clone(), b.clone()));
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn enumerate(&self, target: SurfaceClass, bounds: Bounds) -> Result<Enumeration, GluerError> {
        if bounds.max_pieces_per_side == 0 || bounds.max_total_circles == 0 {
            return Err(GluerError::BadBounds);
        }
        let cands = self.candidates(target, bounds);
        let outcomes: Vec<(Shape, Outcome)> = cands
            .into_par_iter()
            .map(|s| {
                let o = self.evaluate(&s.a, &s.b, target);
                (s, o)
            })
            .collect();
        let mut accepted = Vec::new();
        let mut rejected = Vec::new();
        for (shape, o) in outcomes {
            match o {
                Outcome::Accepted { label, witness } => {
                    let total = self.total_euler(&witness)?;
                    assert_eq!(total, target.euler(), "accepted shape with wrong Euler total");
                    accepted.push(AcceptedShape { shape, label, witness })
                }
                Outcome::Rejected { reason, citation } => rejected.push(RejectedShape { shape, reason, citation }),
            }
        }
        accepted.sort_by(|x, y| (x.label, &x.shape).cmp(&(y.label, &y.shape)));
        Ok(Enumeration { target, accepted, rejected })
    }
}

fn first_clash(cat: &Catalog, side: &[KindId]) -> (KindId, KindId) {
    for (i, &x) in side.iter().enumerate() {
        for &y in &side[i + 1..] {
            if !can_coexist_ids(cat, x, y) {
                return (x, y);
            }
        }
    }
    unreachable!("called on an admissible side")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> (&'static Catalog, Gluer<'static>) {
        let cat: &'static Catalog = Box::leak(Box::new(Catalog::builtin()));
        (cat, Gluer::new(cat))
    }

    fn ids(cat: &Catalog, s: &[&str]) -> Vec<KindId> {
        s.iter().map(|n| cat.id(n).unwrap()).collect()
    }

    const I: SurfaceClass = SurfaceClass { genus: 2, punctures: 0 };
    const II: SurfaceClass = SurfaceClass { genus: 1, punctures: 2 };
    const III: SurfaceClass = SurfaceClass { genus: 0, punctures: 4 };

    #[test]
    fn euler_and_puncture_totals() {
        let (cat, gl) = g();
        let c = gl.boundaries_match(&ids(cat, &["T_0"]), &ids(cat, &["T_0"])).unwrap();
        assert_eq!(gl.total_euler(&c).unwrap(), -2);
        let c = gl.boundaries_match(&ids(cat, &["D_2"]), &ids(cat, &["T_0"])).unwrap();
        assert_eq!(gl.total_euler(&c).unwrap(), 0);
        let c = gl.boundaries_match(&ids(cat, &["D_1"]), &ids(cat, &["D_3"])).unwrap();
        assert_eq!(gl.total_euler(&c).unwrap(), 2);
        let c = gl.boundaries_match(&ids(cat, &["A_1"]), &ids(cat, &["A_1"])).unwrap();
        assert_eq!(gl.total_punctures(&c).unwrap(), 2);
        let c = gl.boundaries_match(&ids(cat, &["D_1", "D_2"]), &ids(cat, &["A_1"])).unwrap();
        assert_eq!(gl.total_punctures(&c).unwrap(), 4);
    }

    #[test]
    fn graph_sizes() {
        let (cat, gl) = g();
        let c = gl.boundaries_match(&ids(cat, &["T_0"]), &ids(cat, &["T_0"])).unwrap();
        let gr = gl.gluing_graph(&c).unwrap();
        assert_eq!((gr.vertices.len(), gr.edges.len()), (2, 1));
        let s = ids(cat, &["T_0", "A_0"]);
        let c = gl.boundaries_match(&s, &s).unwrap();
        let gr = gl.gluing_graph(&c).unwrap();
        assert_eq!((gr.vertices.len(), gr.edges.len()), (4, 3));
    }

    #[test]
    fn genus_examples() {
        let (cat, gl) = g();
        for (a, b, genus) in [("T_0", "T_0", 2), ("D_2", "D_2", 0), ("A_1", "A_1", 1)] {
            let c = gl.boundaries_match(&ids(cat, &[a]), &ids(cat, &[b])).unwrap();
            assert_eq!(gl.closed_genus(&c).unwrap(), genus, "{a}|{b}");
        }
    }

    #[test]
    fn three_tori_pieces_never_connect() {
        let (cat, gl) = g();
        let s = ids(cat, &["T_0", "A_0", "A_0"]);
        assert!(matches!(gl.search(&s, &s), Matching::Disconnected(_)));
    }

    #[test]
    fn mismatch_examples() {
        let (cat, gl) = g();
        assert!(gl.boundaries_match(&ids(cat, &["Q_01"]), &ids(cat, &["A_0", "A_0"])).is_none());
        assert!(gl.boundaries_match(&ids(cat, &["A_22"]), &ids(cat, &["A_0"])).is_none());
    }

    #[test]
    fn exclusion_examples() {
        let (cat, gl) = g();
        let s = ids(cat, &["P_0", "A_0"]);
        let c = gl.boundaries_match(&s, &s).unwrap();
        let (reason, _) = gl.apply_exclusions(&c).unwrap().unwrap();
        assert_eq!(reason, Reason::ExcludedCompressible);
        for k in ["T_0", "D_2"] {
            let s = ids(cat, &[k]);
            let c = gl.boundaries_match(&s, &s).unwrap();
            assert!(gl.apply_exclusions(&c).unwrap().is_none());
        }
    }

    #[test]
    fn check_examples() {
        let (_, gl) = g();
        let v = gl.check_names(&["P_0"], &["P_0"], I).unwrap();
        assert_eq!((v.status, v.label), (Status::Accepted, Some(Label::Ib)));
        let v = gl.check_names(&["D_1", "D_1"], &["U_02"], II).unwrap();
        assert_eq!(v.reason, Some(Reason::BoundaryMismatch));
        let v = gl.check_names(&["D_1"], &["D_3"], III).unwrap();
        assert_eq!(v.label, Some(Label::IIIa));
        let v = gl.check_names(&["T_0"], &["T_0"], II).unwrap();
        assert_eq!(v.reason, Some(Reason::WrongPunctures));
        let v = gl.check_names(&["A_0", "U_02"], &["T_0", "T_0"], I).unwrap();
        assert_eq!(v.reason, Some(Reason::Coexistence));
    }

    #[test]
    fn normalization_examples() {
        let (cat, gl) = g();
        let lab = |a: &[&str], b: &[&str]| gl.normalize(&cat.shape_from_names(a, b).unwrap());
        assert_eq!(lab(&["A_23"], &["A_0"]).unwrap(), Label::IIa);
        assert_eq!(lab(&["A_21"], &["A_0"]).unwrap(), Label::IIb);
        assert_eq!(lab(&["A_0"], &["D_2", "T_0"]).unwrap(), Label::IIc);
        assert!(matches!(lab(&["D_0"], &["D_0"]), Err(GluerError::NotNormalized(_))));
    }

    #[test]
    fn witnesses_validate_and_check_consistently() {
        let (_, gl) = g();
        let e = gl.enumerate(I, Bounds::default()).unwrap();
        for a in &e.accepted {
            gl.validate(&a.witness).unwrap();
            let v = gl.check(&a.witness, I).unwrap();
            assert_eq!(v.label, a.label);
            let v = gl.check(&a.witness.swapped(), I).unwrap();
            assert_eq!(v.label, a.label);
        }
    }

    #[test]
    fn validation_catches_broken_identifications() {
        let (cat, gl) = g();
        let s = ids(cat, &["T_0", "A_0"]);
        let c = gl.boundaries_match(&s, &s).unwrap();
        let mut short = c.clone();
        short.identification.pop();
        assert!(matches!(gl.validate(&short), Err(GluerError::IncompleteIdentification(_))));
        assert!(matches!(gl.gluing_graph(&short), Err(GluerError::IncompleteIdentification(_))));
        let mut wrong = c.clone();
        wrong.identification[0].piece1 = 1 - wrong.identification[0].piece1;
        assert!(gl.validate(&wrong).is_err());
    }

    #[test]
    fn arrangement_rule_on_nested_annuli() {
        // two annuli on {12},{123}: interleaving them splits one annulus
        // across the other's regions
        let sp = MarkedSphere::three_bridge();
        let a = Curve::bounding(&sp, &[1, 2]).unwrap();
        let b = Curve::bounding(&sp, &[1, 2, 3]).unwrap();
        let keys = vec![(a, 0), (a, 1), (b, 0), (b, 1)];
        assert!(arrangement_ok(&keys, &[0, 1, 1, 0], 2));
        assert!(!arrangement_ok(&keys, &[0, 1, 0, 1], 2));
    }
}
