//! Armstrong relations for UFD+IA and (finite) UFD+UIND+IA, Armstrong databases for IND+IA,
//! and a verifier that compares a database against a decision engine.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde_json::json;

use crate::chase::{imply_ind_ia, TUPLE_LIMIT};
use crate::error::{Error, Result};
use crate::model::{AttrId, AttrSet, DatabaseSchema, Dependency, DependencySet, Mode, RelId};
use crate::polyengine::{build_star_closure, sole_relation, StarClosure};
use crate::semantics::{satisfies, Database, Tuple, Value};
use crate::verdict::{Refutation, Verdict};

/// Non-constant attributes beyond this make the IA enumeration too large.
pub const ENUMERATION_LIMIT: usize = 10;
pub const DEFAULT_ROW_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArmstrongClass {
    UfdIa,
    /// UFD+UIND+IA under finite implication.
    StarFinite,
    IndIa,
}

impl ArmstrongClass {
    fn name(self) -> &'static str {
        match self {
            ArmstrongClass::UfdIa => "UFD+IA",
            ArmstrongClass::StarFinite => "UFD+UIND+IA (finite)",
            ArmstrongClass::IndIa => "IND+IA",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArmstrongViolation {
    pub dep: Dependency,
    /// Whether the engine says `Σ` implies it.
    pub expected: bool,
    /// Whether the database satisfies it.
    pub actual: bool,
}

/// Level sizes used by the finite UFD+UIND+IA construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccCardinalityPlan {
    /// Level per attribute; constants sit at level 0.
    pub levels: BTreeMap<AttrId, usize>,
    pub n: Vec<usize>,
    pub m: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ArmstrongReport {
    pub database: Database,
    pub checked_space: String,
    pub candidates: usize,
    pub violations: Vec<ArmstrongViolation>,
    /// Candidates the engine could not decide.
    pub undecided: Vec<Dependency>,
    pub plan: Option<SccCardinalityPlan>,
}

impl ArmstrongReport {
    pub fn is_armstrong(&self) -> bool {
        self.violations.is_empty() && self.undecided.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let schema = &self.database.schema;
        json!({
            "armstrong": self.is_armstrong(),
            "checked_space": self.checked_space,
            "candidates": self.candidates,
            "tuples": self.database.total_tuples(),
            "violations": self.violations.iter().map(|v| json!({
                "dependency": v.dep.show(schema).to_string(),
                "implied": v.expected,
                "satisfied": v.actual,
            })).collect::<Vec<_>>(),
            "undecided": self.undecided.iter().map(|d| d.show(schema).to_string()).collect::<Vec<_>>(),
            "plan": self.plan.as_ref().map(|p| json!({
                "levels": p.levels.iter().map(|(&a, &l)| (schema.attr_name(a).to_string(), l)).collect::<BTreeMap<_, _>>(),
                "N": p.n,
                "M": p.m,
            })),
        })
    }
}

fn subsets(items: &[AttrId], max: usize) -> Vec<AttrSet> {
    let mut out = Vec::new();
    for m in 1u64..1 << items.len() {
        if m.count_ones() as usize <= max {
            out.push(items.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &a)| a).collect());
        }
    }
    out
}

fn permutations(items: &[AttrId], k: usize) -> Vec<Vec<AttrId>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &a) in items.iter().enumerate() {
        let rest: Vec<AttrId> = items.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &b)| b).collect();
        for mut p in permutations(&rest, k - 1) {
            p.insert(0, a);
            out.push(p);
        }
    }
    out
}

fn ia_candidates(rel: RelId, attrs: &[AttrId], bound: usize) -> Vec<Dependency> {
    let sides = subsets(attrs, bound);
    let mut out = Vec::new();
    for (i, x) in sides.iter().enumerate() {
        for y in &sides[i..] {
            out.push(Dependency::ia(rel, x.clone(), y.clone()));
        }
    }
    out
}

/// Every candidate dependency of the class whose sides have at most `bound` attributes.
pub fn candidates(schema: &DatabaseSchema, class: ArmstrongClass, bound: usize) -> Vec<Dependency> {
    let mut out = Vec::new();
    for r in 0..schema.relations().len() {
        let attrs = schema.attrs_of(r);
        out.extend(ia_candidates(r, attrs, bound));
        match class {
            ArmstrongClass::UfdIa | ArmstrongClass::StarFinite => {
                for &b in attrs {
                    out.push(Dependency::fd(r, AttrSet::new(), AttrSet::singleton(b)));
                    for &a in attrs.iter().filter(|&&a| a != b) {
                        out.push(Dependency::fd(r, AttrSet::singleton(a), AttrSet::singleton(b)));
                        if class == ArmstrongClass::StarFinite {
                            out.push(Dependency::ind(r, vec![a], r, vec![b]));
                        }
                    }
                }
            }
            ArmstrongClass::IndIa => {
                for lhs in subsets(attrs, bound) {
                    for s in 0..schema.relations().len() {
                        for rhs in permutations(schema.attrs_of(s), lhs.len()) {
                            let lhs = lhs.to_vec();
                            if r != s || lhs != rhs {
                                out.push(Dependency::ind(r, lhs, s, rhs));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Compares satisfaction in `db` with the engine's verdict for every candidate and every member of `Σ`.
pub fn verify_armstrong(db: &Database, set: &DependencySet, class: ArmstrongClass, bound: usize) -> Result<ArmstrongReport> {
    let mut cands = candidates(&set.schema, class, bound);
    for d in &set.deps {
        if !cands.contains(d) {
            cands.push(d.clone());
        }
    }
    let star = match class {
        ArmstrongClass::UfdIa | ArmstrongClass::StarFinite => Some(build_star_closure(set, Mode::Finite)?),
        ArmstrongClass::IndIa => None,
    };
    let mut violations = Vec::new();
    let mut undecided = Vec::new();
    for d in &cands {
        let v = match &star {
            Some(sc) => sc.decide(d)?,
            None => imply_ind_ia(set, d)?,
        };
        let Some(expected) = v.decided() else {
            undecided.push(d.clone());
            continue;
        };
        let actual = satisfies(db, d);
        if expected != actual {
            violations.push(ArmstrongViolation { dep: d.clone(), expected, actual });
        }
    }
    Ok(ArmstrongReport {
        database: db.clone(),
        checked_space: format!("{} dependencies with sides of at most {bound} attributes", class.name()),
        candidates: cands.len(),
        violations,
        undecided,
        plan: None,
    })
}

fn require_ufd(set: &DependencySet, inds: bool) -> Result<RelId> {
    let rel = sole_relation(set, None)?;
    for d in &set.deps {
        match d {
            Dependency::Ind { .. } if !inds => return Err(Error::NotFdIa),
            Dependency::Ind { lhs, .. } if lhs.len() > 1 => return Err(Error::NotUnary),
            Dependency::Fd { lhs, .. } if lhs.len() > 1 => return Err(Error::NotUnary),
            _ => {}
        }
    }
    Ok(rel)
}

pub fn armstrong_ufd_ia(set: &DependencySet) -> Result<ArmstrongReport> {
    require_ufd(set, false)?;
    let sc = build_star_closure(set, Mode::Finite)?;
    let db = ufd_ia_relation(&sc)?;
    let n = set.schema.attrs_of(sc.rel).len();
    verify_armstrong(&db, set, ArmstrongClass::UfdIa, n)
}

pub fn armstrong_star_finite(set: &DependencySet) -> Result<ArmstrongReport> {
    require_ufd(set, true)?;
    let sc = build_star_closure(set, Mode::Finite)?;
    let (db, plan) = star_finite_relation(&sc)?;
    let n = set.schema.attrs_of(sc.rel).len();
    let mut report = verify_armstrong(&db, set, ArmstrongClass::StarFinite, n)?;
    report.plan = Some(plan);
    Ok(report)
}

/// The finite Armstrong relation for a closed UFD+UIND+IA set; without INDs the smaller UFD+IA one.
pub(crate) fn star_relation(set: &DependencySet, sigma: &Dependency, sc: &StarClosure) -> Result<Database> {
    if sigma.is_ind() || set.inds().next().is_some() {
        Ok(star_finite_relation(sc)?.0)
    } else {
        ufd_ia_relation(sc)
    }
}

fn project(t: &[Value], pos: &[usize]) -> Vec<Value> {
    pos.iter().map(|&p| t[p]).collect()
}

/// Rows over the relation of `sc`, padded with a zero tuple in every other relation.
fn into_database(sc: &StarClosure, schema: &std::sync::Arc<DatabaseSchema>, rows: impl IntoIterator<Item = Tuple>) -> Database {
    let mut db = Database::new(schema.clone());
    db.relations[sc.rel].extend(rows);
    for r in 0..schema.relations().len() {
        if r != sc.rel {
            db.relations[r].insert(vec![0; schema.attrs_of(r).len()]);
        }
    }
    db
}

/// Seed tuples, an IA chase with one fixed fill value, and folding by `A⁺`; constants are 0.
fn ufd_ia_relation(sc: &StarClosure) -> Result<Database> {
    let schema = sc.schema();
    let attrs = &sc.graph.attrs;
    let rest: Vec<AttrId> = sc.non_constants().to_vec();
    let n = rest.len();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooManyAttributes(n, ENUMERATION_LIMIT));
    }
    let local: HashMap<AttrId, usize> = rest.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let plus: Vec<Vec<usize>> = rest
        .iter()
        .map(|&a| sc.plus(a).iter().filter_map(|b| local.get(&b).copied()).collect())
        .collect();
    let ias = implied_ias(sc, &rest)?;
    let mut r: BTreeSet<Tuple> = BTreeSet::new();
    r.insert(vec![0; n]);
    r.insert(vec![1; n]);
    for (i, p) in plus.iter().enumerate() {
        let mut t = vec![i as Value + 2; n];
        for &j in p {
            t[j] = 0;
        }
        r.insert(t);
    }
    let fill = n as Value + 2;
    loop {
        let mut added = false;
        for (x, y) in &ias {
            let present: HashSet<(Vec<Value>, Vec<Value>)> = r.iter().map(|t| (project(t, x), project(t, y))).collect();
            let xs: BTreeSet<Vec<Value>> = r.iter().map(|t| project(t, x)).collect();
            let ys: BTreeSet<Vec<Value>> = r.iter().map(|t| project(t, y)).collect();
            for xv in &xs {
                for yv in &ys {
                    if present.contains(&(xv.clone(), yv.clone())) {
                        continue;
                    }
                    let mut t = vec![fill; n];
                    for (&p, &v) in x.iter().zip(xv).chain(y.iter().zip(yv)) {
                        t[p] = v;
                    }
                    r.insert(t);
                    added = true;
                }
            }
            if r.len() > TUPLE_LIMIT {
                return Err(Error::BudgetExceeded(r.len()));
            }
        }
        if !added {
            break;
        }
    }
    let mut names: Vec<BTreeMap<Vec<Value>, Value>> = vec![BTreeMap::new(); n];
    for t in &r {
        for (i, p) in plus.iter().enumerate() {
            names[i].insert(project(t, p), 0);
        }
    }
    for col in &mut names {
        for (k, v) in col.values_mut().enumerate() {
            *v = k as Value + 1;
        }
    }
    let rows = r.iter().map(|t| {
        attrs
            .iter()
            .map(|a| match local.get(a) {
                Some(&i) => names[i][&project(t, &plus[i])],
                None => 0,
            })
            .collect::<Tuple>()
    });
    Ok(into_database(sc, &schema, rows))
}

/// All IAs over the given attributes implied by the closure, as local position lists.
fn implied_ias(sc: &StarClosure, rest: &[AttrId]) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let n = rest.len();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let (mut x, mut y, mut c) = (0u32, 0u32, code);
        for i in 0..n {
            match c % 3 {
                1 => x |= 1 << i,
                2 => y |= 1 << i,
                _ => {}
            }
            c /= 3;
        }
        if x != 0 && y != 0 && (x & x.wrapping_neg()) < (y & y.wrapping_neg()) {
            pairs.push((x, y));
        }
    }
    pairs.sort_by_key(|&(x, y)| (x | y).count_ones());
    let mut known: HashMap<(u32, u32), bool> = HashMap::new();
    let to_set = |m: u32| (0..n).filter(|i| m >> i & 1 == 1).map(|i| rest[i]).collect::<AttrSet>();
    let norm = |x: u32, y: u32| if (x & x.wrapping_neg()) < (y & y.wrapping_neg()) { (x, y) } else { (y, x) };
    let mut out = Vec::new();
    for (x, y) in pairs {
        let mut below_fails = false;
        for i in 0..n {
            let bit = 1 << i;
            for (a, b) in [(x & !bit, y), (x, y & !bit)] {
                if (a != x || b != y) && a != 0 && b != 0 && known.get(&norm(a, b)) == Some(&false) {
                    below_fails = true;
                }
            }
        }
        let implied = !below_fails && sc.ia(&to_set(x), &to_set(y))?.implied();
        known.insert((x, y), implied);
        if implied {
            let bits = |m: u32| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<usize>>();
            out.push((bits(x), bits(y)));
        }
    }
    Ok(out)
}

/// Renames every column to `1..=k` preserving order; columns of one red clique share the
/// representative's renaming.
fn rename(rows: &BTreeSet<Tuple>, rep: &[usize]) -> BTreeSet<Tuple> {
    let w = rep.len();
    let mut maps: Vec<BTreeMap<Value, Value>> = vec![BTreeMap::new(); w];
    for t in rows {
        for c in 0..w {
            maps[c].insert(t[c], 0);
        }
    }
    for m in &mut maps {
        for (k, v) in m.values_mut().enumerate() {
            *v = k as Value + 1;
        }
    }
    rows.iter().map(|t| (0..w).map(|c| maps[rep[c]][&t[rep[c]]]).collect()).collect()
}

/// Level-by-level lifting and folding, then the inclusion-killing renaming.
fn star_finite_relation(sc: &StarClosure) -> Result<(Database, SccCardinalityPlan)> {
    let schema = sc.schema();
    let attrs = &sc.graph.attrs;
    let w = attrs.len();
    let comp = sc.graph.scc.clone().unwrap_or_else(|| sc.graph.components());
    let constant: Vec<bool> = attrs.iter().map(|&a| sc.z.contains(a)).collect();
    let mut comps: Vec<usize> = (0..w).filter(|&i| !constant[i]).map(|i| comp[i]).collect();
    comps.sort_unstable();
    comps.dedup();
    let level: Vec<usize> =
        (0..w).map(|i| if constant[i] { 0 } else { comps.binary_search(&comp[i]).unwrap() + 1 }).collect();
    let top = comps.len();
    let red_rep: Vec<usize> = (0..w).map(|i| (0..w).find(|&j| sc.red_local(i, j) && sc.red_local(j, i)).unwrap()).collect();
    let black_rep: Vec<usize> =
        (0..w).map(|i| (0..w).find(|&j| sc.black_local(i, j) && sc.black_local(j, i)).unwrap()).collect();
    let mut cliques: Vec<usize> = black_rep.clone();
    cliques.sort_by_key(|&r| (level[r], r));
    cliques.dedup();
    let scc2: HashMap<usize, usize> = cliques.iter().enumerate().map(|(k, &r)| (r, k + 1)).collect();
    let m: Vec<usize> = (0..=top).map(|i| cliques.iter().filter(|&&r| level[r] <= i).count()).collect();
    let plus: Vec<Vec<usize>> = attrs.iter().map(|&a| sc.plus(a).iter().map(|b| schema.position(b)).collect()).collect();

    let base = ufd_ia_relation(sc)?;
    let mut rows = rename(&base.relations[sc.rel], &red_rep);
    let mut n = vec![1usize; top + 1];
    for i in 1..=top {
        let size = |c: usize, rows: &BTreeSet<Tuple>| rows.iter().map(|t| t[c]).max().unwrap_or(0) as usize;
        let here: Vec<usize> = {
            let mut v: Vec<usize> = (0..w).filter(|&c| level[c] == i).map(|c| red_rep[c]).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let widest = here.iter().map(|&c| size(c, &rows)).max().unwrap_or(0);
        n[i] = widest.max(n[i - 1] + m[i]);
        let mut lifted: BTreeSet<Tuple> = BTreeSet::new();
        for t in &rows {
            let mut partial = vec![t.clone()];
            for &k in &here {
                let top_val = size(k, &rows) as Value;
                if t[k] != top_val {
                    continue;
                }
                let mut next = Vec::new();
                for u in &partial {
                    for v in top_val..=n[i] as Value {
                        let mut u = u.clone();
                        for c in (0..w).filter(|&c| red_rep[c] == k) {
                            u[c] = v;
                        }
                        next.push(u);
                    }
                }
                partial = next;
            }
            lifted.extend(partial);
            if lifted.len() > TUPLE_LIMIT {
                return Err(Error::BudgetExceeded(lifted.len()));
            }
        }
        let mut ids: HashMap<Vec<Value>, Value> = HashMap::new();
        let folded: BTreeSet<Tuple> = lifted
            .iter()
            .map(|t| {
                (0..w)
                    .map(|c| {
                        let key = project(t, &plus[c]);
                        let next = ids.len() as Value;
                        *ids.entry(key).or_insert(next)
                    })
                    .collect()
            })
            .collect();
        rows = rename(&folded, &red_rep);
    }
    let big = n[top] as Value;
    let rows: BTreeSet<Tuple> = rows
        .iter()
        .map(|t| {
            let mut u = t.clone();
            for a in 0..w {
                if constant[a] {
                    u[a] = big + scc2[&black_rep[a]] as Value;
                    continue;
                }
                let below = n[level[a] - 1] as Value;
                for b in (0..w).filter(|&b| sc.black_local(a, b)) {
                    let k = scc2[&black_rep[b]] as Value;
                    if t[a] == below + k {
                        u[a] = big + k;
                    }
                }
            }
            u
        })
        .collect();
    let plan = SccCardinalityPlan { levels: attrs.iter().enumerate().map(|(i, &a)| (a, level[i])).collect(), n, m };
    Ok((into_database(sc, &schema, rows), plan))
}

/// Product of one counterexample per non-implied candidate, skipping candidates the running
/// product already falsifies.
pub fn armstrong_ind_ia(set: &DependencySet, bound: usize, row_cap: usize) -> Result<ArmstrongReport> {
    if set.fds().next().is_some() {
        return Err(Error::NotIndIa);
    }
    let schema = set.schema.clone();
    let mut product = Database::new(schema.clone());
    for r in 0..schema.relations().len() {
        product.relations[r].insert(vec![0; schema.attrs_of(r).len()]);
    }
    for d in candidates(&schema, ArmstrongClass::IndIa, bound) {
        if !satisfies(&product, &d) {
            continue;
        }
        let witness = match imply_ind_ia(set, &d)? {
            Verdict::Implied(_) => continue,
            Verdict::NotImplied(Refutation::Database(w)) => w,
            _ => return Err(Error::UnsupportedQuery(format!("no counterexample was built for {}", d.show(&schema)))),
        };
        product = multiply(&product, &witness, row_cap)?;
    }
    verify_armstrong(&product, set, ArmstrongClass::IndIa, bound)
}

fn multiply(a: &Database, b: &Database, cap: usize) -> Result<Database> {
    let rows: usize = a.relations.iter().zip(&b.relations).map(|(x, y)| x.len() * y.len()).sum();
    if rows > cap {
        return Err(Error::CombinatorialBlowup(rows, cap));
    }
    let mut ids: HashMap<(Value, Value), Value> = HashMap::new();
    let mut out = Database::new(a.schema.clone());
    for (r, (x, y)) in a.relations.iter().zip(&b.relations).enumerate() {
        for s in x {
            for t in y {
                let u = s
                    .iter()
                    .zip(t)
                    .map(|(&p, &q)| {
                        let next = ids.len() as Value;
                        *ids.entry((p, q)).or_insert(next)
                    })
                    .collect();
                out.relations[r].insert(u);
            }
        }
    }
    Ok(out)
}
