//! Mining maximal independence atoms from a relation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde_json::json;

use crate::model::{AttrId, AttrSet, Dependency, RelId};
use crate::semantics::{Database, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MiningConfig {
    /// Largest total number of attribute occurrences in a mined IA.
    pub max_arity: usize,
    /// Also report constant columns as `A⊥A`.
    pub include_overlapping: bool,
    /// Report `|r[AB]| / (|r[A]|·|r[B]|)` for every pair of columns.
    pub ratios: bool,
}

impl Default for MiningConfig {
    fn default() -> Self {
        Self { max_arity: usize::MAX, include_overlapping: false, ratios: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MiningResult {
    pub rel: RelId,
    pub maximal_ias: Vec<Dependency>,
    pub columns: usize,
    pub rows: usize,
    pub max_arity_found: usize,
    pub ratios: Option<BTreeMap<(AttrId, AttrId), f64>>,
}

impl MiningResult {
    pub fn ia_count(&self) -> usize {
        self.maximal_ias.len()
    }

    pub fn to_dsl(&self, db: &Database) -> String {
        self.maximal_ias.iter().map(|d| format!("{}\n", d.show(&db.schema))).collect()
    }

    pub fn to_json(&self, db: &Database) -> serde_json::Value {
        let s = &db.schema;
        json!({
            "relation": s.rel_name(self.rel),
            "columns": self.columns,
            "rows": self.rows,
            "iaCount": self.ia_count(),
            "maxArity": self.max_arity_found,
            "ias": self.maximal_ias.iter().map(|d| d.show(s).to_string()).collect::<Vec<_>>(),
            "ratios": self.ratios.as_ref().map(|m| {
                m.iter().map(|(&(a, b), r)| json!([s.attr_name(a), s.attr_name(b), r])).collect::<Vec<_>>()
            }),
        })
    }
}

/// Distinct-projection counts, memoized by column mask.
struct Counter<'a> {
    rows: Vec<&'a [Value]>,
    memo: HashMap<u64, usize>,
}

impl<'a> Counter<'a> {
    fn new(db: &'a Database, rel: RelId) -> Self {
        Self { rows: db.relations[rel].iter().map(Vec::as_slice).collect(), memo: HashMap::new() }
    }

    fn count(&mut self, mask: u64) -> usize {
        if let Some(&c) = self.memo.get(&mask) {
            return c;
        }
        let cols: Vec<usize> = (0..64).filter(|i| mask >> i & 1 == 1).collect();
        let set: HashSet<Vec<Value>> = self.rows.iter().map(|t| cols.iter().map(|&i| t[i]).collect()).collect();
        self.memo.insert(mask, set.len());
        set.len()
    }

    fn independent(&mut self, x: u64, y: u64) -> bool {
        self.count(x | y) == self.count(x) * self.count(y)
    }
}

fn canon(x: u64, y: u64) -> (u64, u64) {
    // Orient by the smallest column, so `(x, y)` and `(y, x)` meet.
    if x.trailing_zeros() <= y.trailing_zeros() {
        (x, y)
    } else {
        (y, x)
    }
}

/// Maximal satisfied IAs with disjoint non-empty sides, by level-wise search over total arity.
pub fn mine_ias(db: &Database, rel: RelId, cfg: &MiningConfig) -> MiningResult {
    let attrs = db.schema.attrs_of(rel).to_vec();
    let n = attrs.len();
    assert!(n <= 64, "at most 64 columns");
    let mut counter = Counter::new(db, rel);
    let bound = cfg.max_arity.min(n);
    let mut satisfied: HashSet<(u64, u64)> = HashSet::new();
    let mut level: BTreeSet<(u64, u64)> = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if bound >= 2 && counter.independent(1 << i, 1 << j) {
                level.insert((1 << i, 1 << j));
            }
        }
    }
    let mut maximal = Vec::new();
    while !level.is_empty() {
        satisfied.extend(level.iter().copied());
        let mut next = BTreeSet::new();
        for &(x, y) in &level {
            let mut extended = false;
            if (x | y).count_ones() as usize >= bound {
                maximal.push((x, y));
                continue;
            }
            for a in 0..n {
                let bit = 1u64 << a;
                if (x | y) & bit != 0 {
                    continue;
                }
                for cand in [canon(x | bit, y), canon(x, y | bit)] {
                    if next.contains(&cand) {
                        extended = true;
                        continue;
                    }
                    if subs(cand).all(|s| satisfied.contains(&s)) && counter.independent(cand.0, cand.1) {
                        next.insert(cand);
                        extended = true;
                    }
                }
            }
            if !extended {
                maximal.push((x, y));
            }
        }
        level = next;
    }
    let to_set = |m: u64| -> AttrSet { (0..n).filter(|i| m >> i & 1 == 1).map(|i| attrs[i]).collect() };
    let max_arity_found = maximal.iter().map(|&(x, y)| (x | y).count_ones() as usize).max().unwrap_or(0);
    let mut ias: Vec<Dependency> = maximal.into_iter().map(|(x, y)| Dependency::ia(rel, to_set(x), to_set(y))).collect();
    if cfg.include_overlapping {
        for i in 0..n {
            if counter.count(1 << i) <= 1 {
                ias.push(Dependency::ca(rel, attrs[i]));
            }
        }
    }
    ias.sort_by_key(|d| match d {
        Dependency::Ia { left, right, .. } => (left.to_vec(), right.to_vec()),
        _ => unreachable!(),
    });
    let ratios = cfg.ratios.then(|| {
        let mut m = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let r = counter.count(1 << i | 1 << j) as f64 / (counter.count(1 << i) * counter.count(1 << j)) as f64;
                m.insert((attrs[i], attrs[j]), r);
            }
        }
        m
    });
    MiningResult { rel, maximal_ias: ias, columns: n, rows: counter.rows.len(), max_arity_found, ratios }
}

/// The IAs one attribute smaller that keep both sides non-empty.
fn subs((x, y): (u64, u64)) -> impl Iterator<Item = (u64, u64)> {
    let drop = |m: u64| (0..64).filter(move |i| m >> i & 1 == 1).map(move |i| m & !(1u64 << i));
    let left = (x.count_ones() > 1).then(|| drop(x).map(move |x2| canon(x2, y))).into_iter().flatten();
    let right = (y.count_ones() > 1).then(|| drop(y).map(move |y2| canon(x, y2))).into_iter().flatten();
    left.chain(right)
}

/// `|r[XY]| / (|r[X]|·|r[Y]|)` for disjoint non-empty `X`, `Y`; 1 exactly when `X⊥Y` holds.
pub fn independence_ratio(db: &Database, rel: RelId, x: &AttrSet, y: &AttrSet) -> f64 {
    let mut counter = Counter::new(db, rel);
    let mask = |s: &AttrSet| s.iter().fold(0u64, |m, a| m | 1 << db.schema.position(a));
    let (mx, my) = (mask(x), mask(y));
    let denom = counter.count(mx) * counter.count(my);
    if denom == 0 {
        return 1.0;
    }
    counter.count(mx | my) as f64 / denom as f64
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::DatabaseSchema;
    use crate::semantics::satisfies;

    fn table(cols: &[&str], rows: &[&[Value]]) -> Database {
        let schema = Arc::new(DatabaseSchema::single("R", cols));
        Database::from_rows(schema, vec![rows.iter().map(|r| r.to_vec()).collect()])
    }

    #[test]
    fn product_and_diagonal() {
        let db = table(&["A", "B"], &[&[0, 1], &[0, 2], &[3, 1], &[3, 2]]);
        let r = mine_ias(&db, 0, &MiningConfig::default());
        assert_eq!(r.maximal_ias, vec![Dependency::ia(0, AttrSet::singleton(0), AttrSet::singleton(1))]);
        assert_eq!(independence_ratio(&db, 0, &AttrSet::singleton(0), &AttrSet::singleton(1)), 1.0);
        let db = table(&["A", "B"], &[&[0, 0], &[1, 1]]);
        assert!(mine_ias(&db, 0, &MiningConfig::default()).maximal_ias.is_empty());
        assert_eq!(independence_ratio(&db, 0, &AttrSet::singleton(0), &AttrSet::singleton(1)), 0.5);
    }

    #[test]
    fn three_way_product() {
        let mut rows = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..3 {
                    rows.push(vec![a, b, c, a ^ b]);
                }
            }
        }
        let db = Database::from_rows(Arc::new(DatabaseSchema::single("R", &["A", "B", "C", "D"])), vec![rows]);
        let r = mine_ias(&db, 0, &MiningConfig::default());
        let shown: Vec<String> = r.maximal_ias.iter().map(|d| d.show(&db.schema).to_string()).collect();
        assert!(r.maximal_ias.iter().all(|d| satisfies(&db, d)));
        // D = A xor B: pairwise independent, but C is independent of all three together.
        assert!(shown.iter().any(|s| s.ends_with("A B D _|_ C")), "{shown:?}");
        assert_eq!(r.max_arity_found, 4);
        let capped = mine_ias(&db, 0, &MiningConfig { max_arity: 2, ..Default::default() });
        assert_eq!(capped.max_arity_found, 2);
    }
}
