//! Which kinds may sit together in one tangle.
//!
//! The relation is a lookup table; multisets are admitted pairwise.

use crate::catalog::{Catalog, CatalogError, KindId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoexistQuery {
    pub left: String,
    pub right: String,
}

pub fn can_coexist_ids(cat: &Catalog, x: KindId, y: KindId) -> bool {
    if x == y {
        cat.self_coexists(x)
    } else {
        cat.pair_listed(x, y)
    }
}

pub fn can_coexist(cat: &Catalog, x: &str, y: &str) -> Result<bool, CatalogError> {
    Ok(can_coexist_ids(cat, cat.id(x)?, cat.id(y)?))
}

impl CoexistQuery {
    pub fn answer(&self, cat: &Catalog) -> Result<bool, CatalogError> {
        can_coexist(cat, &self.left, &self.right)
    }
}

/// Every unordered pair drawn from `pieces` coexists, same-kind pairs included.
pub fn multiset_admissible_ids(cat: &Catalog, pieces: &[KindId]) -> bool {
    pieces
        .iter()
        .enumerate()
        .all(|(i, &x)| pieces[i + 1..].iter().all(|&y| can_coexist_ids(cat, x, y)))
}

pub fn multiset_admissible(cat: &Catalog, pieces: &[&str]) -> Result<bool, CatalogError> {
    let ids = pieces.iter().map(|p| cat.id(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(multiset_admissible_ids(cat, &ids))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let cat = Catalog::builtin();
        assert!(!can_coexist(&cat, "A_0", "U_02").unwrap());
        assert!(can_coexist(&cat, "D_1", "D_2").unwrap());
        assert!(!can_coexist(&cat, "Q_01", "A_0").unwrap());
        assert!(can_coexist(&cat, "A_0", "A_0").unwrap());
        assert!(can_coexist(&cat, "T_0", "X").is_err());
    }

    #[test]
    fn multisets() {
        let cat = Catalog::builtin();
        assert!(multiset_admissible(&cat, &["T_0", "P_0", "A_0"]).unwrap());
        assert!(!multiset_admissible(&cat, &["U_02", "A_0"]).unwrap());
        assert!(multiset_admissible(&cat, &[]).unwrap());
    }

    #[test]
    fn symmetric_over_all_pairs() {
        let cat = Catalog::builtin();
        let n = cat.kinds().len();
        let mut listed = 0;
        for x in 0..n {
            for y in 0..n {
                assert_eq!(can_coexist_ids(&cat, x, y), can_coexist_ids(&cat, y, x));
                if x < y && can_coexist_ids(&cat, x, y) {
                    listed += 1;
                }
            }
        }
        assert_eq!(listed, 39);
    }

    #[test]
    fn parents_coexist_with_children() {
        let cat = Catalog::builtin();
        for k in cat.kinds() {
            if let Some(p) = &k.parent {
                assert!(can_coexist(&cat, &k.name, p).unwrap(), "{} / {p}", k.name);
            }
        }
    }
}
