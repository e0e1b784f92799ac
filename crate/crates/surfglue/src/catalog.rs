//! Piece kinds and the rule tables that drive the gluer.
//!
//! Everything here is data. The built-in catalog is a JSON document compiled
//! into the binary; user catalogs use the same schema and go through the same
//! validation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sphere_curves::{CurveError, CurveSystem, MarkedSphere};

pub const DEFAULT_CATALOG_JSON: &str = include_str!("../data/default_catalog.json");

pub type KindId = usize;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid kind {kind}: {message}")]
    Validation { kind: String, message: String },
    #[error("invalid rule table entry: {0}")]
    Rule(String),
    #[error("unknown kind {name}; valid kinds are {valid}")]
    NotFound { name: String, valid: String },
}

/// Classification labels attached to surviving shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "I-a")]
    Ia,
    #[serde(rename = "I-b")]
    Ib,
    #[serde(rename = "I-c")]
    Ic,
    #[serde(rename = "II-a")]
    IIa,
    #[serde(rename = "II-b")]
    IIb,
    #[serde(rename = "II-c")]
    IIc,
    #[serde(rename = "III-a")]
    IIIa,
    #[serde(rename = "III-b")]
    IIIb,
}

impl Label {
    pub const ALL: [Label; 8] = [
        Label::Ia,
        Label::Ib,
        Label::Ic,
        Label::IIa,
        Label::IIb,
        Label::IIc,
        Label::IIIa,
        Label::IIIb,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Ia => "I-a",
            Label::Ib => "I-b",
            Label::Ic => "I-c",
            Label::IIa => "II-a",
            Label::IIb => "II-b",
            Label::IIc => "II-c",
            Label::IIIa => "III-a",
            Label::IIIb => "III-b",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Label::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown label {s:?}"))
    }
}

/// Machine-readable rejection reasons, in the order the checks run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    WrongPunctures,
    Coexistence,
    BoundaryMismatch,
    Disconnected,
    WrongEuler,
    ExcludedCompressible,
}

impl Reason {
    pub const ALL: [Reason; 6] = [
        Reason::WrongPunctures,
        Reason::Coexistence,
        Reason::BoundaryMismatch,
        Reason::Disconnected,
        Reason::WrongEuler,
        Reason::ExcludedCompressible,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Reason::WrongPunctures => "wrong_punctures",
            Reason::Coexistence => "coexistence",
            Reason::BoundaryMismatch => "boundary_mismatch",
            Reason::Disconnected => "disconnected",
            Reason::WrongEuler => "wrong_euler",
            Reason::ExcludedCompressible => "excluded_compressible",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Reason {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Reason::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown reason {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceKind {
    pub name: String,
    pub genus: u32,
    pub boundary_count: u32,
    pub knot_punctures: u32,
    pub boundary_patterns: Vec<CurveSystem>,
    pub parent: Option<String>,
    pub braid_slots: u32,
}

impl PieceKind {
    pub fn euler_char(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.boundary_count as i64
    }
}

/// Two kind multisets, one per side, stored by catalog index with the
/// smaller side first. Equality ignores which side was which.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    pub a: Vec<KindId>,
    pub b: Vec<KindId>,
}

impl Shape {
    pub fn new(mut a: Vec<KindId>, mut b: Vec<KindId>) -> Shape {
        a.sort_unstable();
        b.sort_unstable();
        if b < a {
            std::mem::swap(&mut a, &mut b);
        }
        Shape { a, b }
    }

    pub fn names(&self, cat: &Catalog) -> (Vec<String>, Vec<String>) {
        let n = |side: &[KindId]| side.iter().map(|&k| cat.kind(k).name.clone()).collect();
        (n(&self.a), n(&self.b))
    }

    pub fn display(&self, cat: &Catalog) -> String {
        let (a, b) = self.names(cat);
        format!("{{{}}}|{{{}}}", a.join(","), b.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusionRule {
    pub shape: Shape,
    pub reason: Reason,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationEntry {
    pub shape: Shape,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTables {
    /// Pairs in document order; lookups go through `Catalog::pair_set`.
    pub coexist_pairs: Vec<(String, String)>,
    pub self_coexist: BTreeMap<String, bool>,
    pub exclusions: Vec<ExclusionRule>,
    pub normalization: Vec<NormalizationEntry>,
}

// ---- document schema -------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CatalogDoc {
    #[serde(default = "three", skip_serializing_if = "is_three")]
    pub strings: u32,
    pub kinds: Vec<KindDoc>,
    pub coexist_pairs: Vec<[String; 2]>,
    #[serde(default)]
    pub self_coexist: BTreeMap<String, bool>,
    #[serde(default)]
    pub exclusions: Vec<ExclusionDoc>,
    #[serde(default)]
    pub normalization: Vec<NormalizationDoc>,
}

fn three() -> u32 {
    3
}

fn is_three(n: &u32) -> bool {
    *n == 3
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct KindDoc {
    pub name: String,
    pub genus: u32,
    pub boundary: u32,
    pub punctures: u32,
    pub patterns: Vec<Vec<Vec<u32>>>,
    pub parent: Option<String>,
    pub braid_slots: u32,
    /// Optional declared Euler characteristic, checked against genus and boundary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExclusionDoc {
    pub side_a: Vec<String>,
    pub side_b: Vec<String>,
    pub reason: String,
    pub cite: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NormalizationDoc {
    pub side_a: Vec<String>,
    pub side_b: Vec<String>,
    pub label: Label,
}

// ---- the catalog -----------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Catalog {
    sphere: MarkedSphere,
    kinds: Vec<PieceKind>,
    by_name: HashMap<String, KindId>,
    pair_set: BTreeSet<(KindId, KindId)>,
    rules: RuleTables,
}

impl Catalog {
    pub fn builtin() -> Catalog {
        Catalog::from_json(DEFAULT_CATALOG_JSON).expect("built-in catalog is valid")
    }

    pub fn from_json(text: &str) -> Result<Catalog, CatalogError> {
        let doc: CatalogDoc = serde_json::from_str(text).map_err(|e| CatalogError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Catalog::from_doc(doc)
    }

    pub fn from_doc(doc: CatalogDoc) -> Result<Catalog, CatalogError> {
        let sphere = MarkedSphere::new(doc.strings)
            .map_err(|e| CatalogError::Rule(format!("strings: {e}")))?;
        let mut kinds = Vec::with_capacity(doc.kinds.len());
        let mut by_name = HashMap::new();
        for kd in &doc.kinds {
            let bad = |message: String| CatalogError::Validation { kind: kd.name.clone(), message };
            if by_name.insert(kd.name.clone(), kinds.len()).is_some() {
                return Err(bad("duplicate name".into()));
            }
            if kd.boundary == 0 {
                return Err(bad("boundary count must be positive".into()));
            }
            let chi = 2 - 2 * kd.genus as i64 - kd.boundary as i64;
            if let Some(e) = kd.euler {
                if e != chi {
                    return Err(bad(format!(
                        "declared euler characteristic {e} but genus {} and boundary {} give {chi}",
                        kd.genus, kd.boundary
                    )));
                }
            }
            if kd.patterns.is_empty() {
                return Err(bad("no boundary patterns".into()));
            }
            let mut patterns = Vec::new();
            for p in &kd.patterns {
                if p.len() != kd.boundary as usize {
                    return Err(bad(format!(
                        "pattern {p:?} has {} curves, expected {}",
                        p.len(),
                        kd.boundary
                    )));
                }
                let sys = CurveSystem::from_labels(&sphere, p)
                    .map_err(|e: CurveError| bad(format!("pattern {p:?}: {e}")))?;
                if !patterns.contains(&sys) {
                    patterns.push(sys);
                }
            }
            kinds.push(PieceKind {
                name: kd.name.clone(),
                genus: kd.genus,
                boundary_count: kd.boundary,
                knot_punctures: kd.punctures,
                boundary_patterns: patterns,
                parent: kd.parent.clone(),
                braid_slots: kd.braid_slots,
            });
        }

        for k in &kinds {
            let bad = |message: String| CatalogError::Validation { kind: k.name.clone(), message };
            if let Some(p) = &k.parent {
                if !by_name.contains_key(p) {
                    return Err(bad(format!("parent {p} is not a kind")));
                }
                if k.name == "D_0" || k.name == "D_1" {
                    return Err(bad("root kinds D_0 and D_1 cannot have a parent".into()));
                }
            }
            // walk up; a cycle revisits a name within kinds.len() steps
            let mut cur = k.parent.clone();
            let mut steps = 0;
            while let Some(p) = cur {
                steps += 1;
                if p == k.name || steps > kinds.len() {
                    return Err(bad("parent relation has a cycle".into()));
                }
                cur = kinds[by_name[&p]].parent.clone();
            }
        }

        let lookup = |name: &str| -> Result<KindId, CatalogError> {
            by_name.get(name).copied().ok_or_else(|| {
                CatalogError::Rule(format!("{name} is not a kind in this catalog"))
            })
        };

        let mut pair_set = BTreeSet::new();
        let mut pairs = Vec::new();
        for [x, y] in &doc.coexist_pairs {
            let (i, j) = (lookup(x)?, lookup(y)?);
            if i == j {
                return Err(CatalogError::Rule(format!(
                    "coexist pair [{x}, {y}] repeats a name; use self_coexist"
                )));
            }
            if !pair_set.insert((i.min(j), i.max(j))) {
                return Err(CatalogError::Rule(format!("coexist pair [{x}, {y}] listed twice")));
            }
            pairs.push((x.clone(), y.clone()));
        }
        for name in doc.self_coexist.keys() {
            lookup(name)?;
        }

        let side = |names: &[String]| -> Result<Vec<KindId>, CatalogError> {
            if names.is_empty() {
                return Err(CatalogError::Rule("empty side in rule table".into()));
            }
            names.iter().map(|n| lookup(n)).collect()
        };

        let mut exclusions = Vec::new();
        for ex in &doc.exclusions {
            let shape = Shape::new(side(&ex.side_a)?, side(&ex.side_b)?);
            let reason: Reason = ex.reason.parse().map_err(CatalogError::Rule)?;
            if matches!(reason, Reason::WrongPunctures | Reason::Coexistence | Reason::WrongEuler) {
                return Err(CatalogError::Rule(format!(
                    "exclusion reason {reason} is decided by arithmetic, not by a rule"
                )));
            }
            // a rule that no gluing could ever reach is almost certainly a typo
            let circles = |s: &[KindId]| s.iter().map(|&k| kinds[k].boundary_count).sum::<u32>();
            let chi: i64 = shape.a.iter().chain(&shape.b).map(|&k| kinds[k].euler_char()).sum();
            if circles(&shape.a) != circles(&shape.b) || chi % 2 != 0 || chi > 2 {
                return Err(CatalogError::Rule(format!(
                    "exclusion {:?}|{:?} matches no closed surface",
                    ex.side_a, ex.side_b
                )));
            }
            exclusions.push(ExclusionRule { shape, reason, citation: ex.cite.clone() });
        }

        let mut normalization: Vec<NormalizationEntry> = Vec::new();
        for nd in &doc.normalization {
            let shape = Shape::new(side(&nd.side_a)?, side(&nd.side_b)?);
            if normalization.iter().any(|e| e.shape == shape) {
                return Err(CatalogError::Rule(format!(
                    "normalization lists {:?}|{:?} twice",
                    nd.side_a, nd.side_b
                )));
            }
            normalization.push(NormalizationEntry { shape, label: nd.label });
        }

        Ok(Catalog {
            sphere,
            kinds,
            by_name,
            pair_set,
            rules: RuleTables {
                coexist_pairs: pairs,
                self_coexist: doc.self_coexist.clone(),
                exclusions,
                normalization,
            },
        })
    }

    pub fn to_doc(&self) -> CatalogDoc {
        let names = |side: &[KindId]| side.iter().map(|&k| self.kinds[k].name.clone()).collect();
        CatalogDoc {
            strings: self.sphere.n_strings(),
            kinds: self
                .kinds
                .iter()
                .map(|k| KindDoc {
                    name: k.name.clone(),
                    genus: k.genus,
                    boundary: k.boundary_count,
                    punctures: k.knot_punctures,
                    patterns: k.boundary_patterns.iter().map(|p| p.to_labels()).collect(),
                    parent: k.parent.clone(),
                    braid_slots: k.braid_slots,
                    euler: None,
                })
                .collect(),
            coexist_pairs: self
                .rules
                .coexist_pairs
                .iter()
                .map(|(x, y)| [x.clone(), y.clone()])
                .collect(),
            self_coexist: self.rules.self_coexist.clone(),
            exclusions: self
                .rules
                .exclusions
                .iter()
                .map(|r| ExclusionDoc {
                    side_a: names(&r.shape.a),
                    side_b: names(&r.shape.b),
                    reason: r.reason.as_str().to_string(),
                    cite: r.citation.clone(),
                })
                .collect(),
            normalization: self
                .rules
                .normalization
                .iter()
                .map(|e| NormalizationDoc {
                    side_a: names(&e.shape.a),
                    side_b: names(&e.shape.b),
                    label: e.label,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("catalog serializes")
    }

    pub fn sphere(&self) -> &MarkedSphere {
        &self.sphere
    }

    pub fn kinds(&self) -> &[PieceKind] {
        &self.kinds
    }

    pub fn kind(&self, id: KindId) -> &PieceKind {
        &self.kinds[id]
    }

    pub fn id(&self, name: &str) -> Result<KindId, CatalogError> {
        self.by_name.get(name).copied().ok_or_else(|| CatalogError::NotFound {
            name: name.to_string(),
            valid: self.kinds.iter().map(|k| k.name.as_str()).collect::<Vec<_>>().join(", "),
        })
    }

    pub fn lookup_kind(&self, name: &str) -> Result<&PieceKind, CatalogError> {
        self.id(name).map(|i| &self.kinds[i])
    }

    pub fn euler_char(&self, name: &str) -> Result<i64, CatalogError> {
        self.lookup_kind(name).map(PieceKind::euler_char)
    }

    pub fn parent(&self, name: &str) -> Result<Option<&PieceKind>, CatalogError> {
        let k = self.lookup_kind(name)?;
        Ok(k.parent.as_ref().map(|p| &self.kinds[self.by_name[p]]))
    }

    pub fn boundary_patterns(&self, name: &str) -> Result<&[CurveSystem], CatalogError> {
        self.lookup_kind(name).map(|k| k.boundary_patterns.as_slice())
    }

    pub fn rules(&self) -> &RuleTables {
        &self.rules
    }

    pub(crate) fn pair_listed(&self, a: KindId, b: KindId) -> bool {
        self.pair_set.contains(&(a.min(b), a.max(b)))
    }

    pub(crate) fn self_coexists(&self, a: KindId) -> bool {
        self.rules.self_coexist.get(&self.kinds[a].name).copied().unwrap_or(true)
    }

    /// Parse a comma separated list of kind names, as used on the command line.
    pub fn parse_side(&self, list: &str) -> Result<Vec<KindId>, CatalogError> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| self.id(s))
            .collect()
    }

    pub fn shape_from_names(&self, a: &[&str], b: &[&str]) -> Result<Shape, CatalogError> {
        let ids = |s: &[&str]| s.iter().map(|n| self.id(n)).collect::<Result<Vec<_>, _>>();
        Ok(Shape::new(ids(a)?, ids(b)?))
    }

    pub fn normalize(&self, shape: &Shape) -> Option<Label> {
        self.rules.normalization.iter().find(|e| &e.shape == shape).map(|e| e.label)
    }

    pub fn exclusion_for(&self, shape: &Shape) -> Option<&ExclusionRule> {
        self.rules.exclusions.iter().find(|r| &r.shape == shape)
    }
}
