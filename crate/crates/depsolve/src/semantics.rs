//! Databases, satisfaction, the division theorem and the brute-force oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{AttrId, AttrSet, DatabaseSchema, Dependency, DependencySet, RelId};
use crate::parser::Table;

pub type Value = u32;
pub type Tuple = Vec<Value>;

/// One finite relation per schema relation; tuples follow declared attribute order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Database {
    pub schema: Arc<DatabaseSchema>,
    pub relations: Vec<BTreeSet<Tuple>>,
    /// Display names for values; values without a name print as numbers.
    pub symbols: Vec<String>,
}

impl Database {
    pub fn new(schema: Arc<DatabaseSchema>) -> Self {
        let n = schema.relations().len();
        Self { schema, relations: vec![BTreeSet::new(); n], symbols: Vec::new() }
    }

    pub fn from_rows(schema: Arc<DatabaseSchema>, rows: Vec<Vec<Tuple>>) -> Self {
        let mut d = Self::new(schema);
        for (r, ts) in rows.into_iter().enumerate() {
            d.relations[r].extend(ts);
        }
        d
    }

    /// Interns string tables; each table's columns must name its relation's attributes.
    pub fn from_tables(schema: Arc<DatabaseSchema>, tables: &[Table]) -> Result<Self> {
        let mut d = Self::new(schema.clone());
        let mut ids: HashMap<String, Value> = HashMap::new();
        for t in tables {
            let rel = schema
                .relation_by_name(&t.name)
                .ok_or_else(|| Error::Malformed(format!("no relation named `{}`", t.name)))?;
            let mut perm = Vec::new();
            for &a in schema.attrs_of(rel) {
                let name = schema.attr_name(a);
                let col = t
                    .columns
                    .iter()
                    .position(|c| c == name)
                    .ok_or_else(|| Error::Malformed(format!("table `{}` lacks column `{name}`", t.name)))?;
                perm.push(col);
            }
            for row in &t.rows {
                let tuple = perm
                    .iter()
                    .map(|&c| {
                        let next = ids.len() as Value;
                        *ids.entry(row[c].clone()).or_insert_with(|| {
                            d.symbols.push(row[c].clone());
                            next
                        })
                    })
                    .collect();
                d.relations[rel].insert(tuple);
            }
        }
        for (r, rel) in d.relations.iter().enumerate() {
            if rel.is_empty() {
                return Err(Error::EmptyRelation(schema.rel_name(r).to_string()));
            }
        }
        Ok(d)
    }

    /// Single-relation database from a table, with the table's columns as schema.
    pub fn from_table(table: &Table) -> Result<Self> {
        let schema = DatabaseSchema::single(&table.name, &table.columns.iter().map(String::as_str).collect::<Vec<_>>());
        Self::from_tables(Arc::new(schema), std::slice::from_ref(table))
    }

    pub fn relation(&self, r: RelId) -> &BTreeSet<Tuple> {
        &self.relations[r]
    }

    pub fn is_nonempty(&self) -> bool {
        self.relations.iter().all(|r| !r.is_empty())
    }

    pub fn total_tuples(&self) -> usize {
        self.relations.iter().map(BTreeSet::len).sum()
    }

    pub fn value_name(&self, v: Value) -> String {
        self.symbols.get(v as usize).cloned().unwrap_or_else(|| v.to_string())
    }

    pub fn positions(&self, attrs: impl IntoIterator<Item = AttrId>) -> Vec<usize> {
        attrs.into_iter().map(|a| self.schema.position(a)).collect()
    }

    pub fn to_csv(&self, r: RelId) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = self.schema.attrs_of(r).iter().map(|&a| self.schema.attr_name(a)).collect();
        w.write_record(&header).expect("in-memory write");
        for t in &self.relations[r] {
            w.write_record(t.iter().map(|&v| self.value_name(v))).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }

    /// Distinct values of one attribute.
    pub fn column(&self, a: AttrId) -> BTreeSet<Value> {
        let (r, p) = (self.schema.relation_of(a), self.schema.position(a));
        self.relations[r].iter().map(|t| t[p]).collect()
    }
}

impl fmt::Display for Database {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, rel) in self.relations.iter().enumerate() {
            let names: Vec<_> = self.schema.attrs_of(r).iter().map(|&a| self.schema.attr_name(a)).collect();
            writeln!(f, "{}({})", self.schema.rel_name(r), names.join(","))?;
            for t in rel {
                let vals: Vec<_> = t.iter().map(|&v| self.value_name(v)).collect();
                writeln!(f, "  ({})", vals.join(","))?;
            }
        }
        Ok(())
    }
}

fn project(t: &[Value], pos: &[usize]) -> Tuple {
    pos.iter().map(|&p| t[p]).collect()
}

/// Tuples demonstrating that a dependency fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub tuples: Vec<(RelId, Tuple)>,
}

pub fn satisfies(d: &Database, sigma: &Dependency) -> bool {
    violation(d, sigma).is_none()
}

pub fn violation(d: &Database, sigma: &Dependency) -> Option<Violation> {
    match sigma {
        Dependency::Fd { rel, lhs, rhs } => {
            let (x, y) = (d.positions(lhs), d.positions(rhs));
            let mut seen: HashMap<Tuple, &Tuple> = HashMap::new();
            for t in &d.relations[*rel] {
                match seen.get(&project(t, &x)) {
                    Some(s) if project(s, &y) != project(t, &y) => {
                        return Some(Violation { tuples: vec![(*rel, (*s).clone()), (*rel, t.clone())] })
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(project(t, &x), t);
                    }
                }
            }
            None
        }
        Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs } => {
            let (x, y) = (d.positions(lhs.iter().copied()), d.positions(rhs.iter().copied()));
            let target: HashSet<Tuple> = d.relations[*rhs_rel].iter().map(|t| project(t, &y)).collect();
            d.relations[*lhs_rel]
                .iter()
                .find(|t| !target.contains(&project(t, &x)))
                .map(|t| Violation { tuples: vec![(*lhs_rel, t.clone())] })
        }
        Dependency::Ia { rel, left, right } => {
            let (x, y) = (d.positions(left), d.positions(right));
            let r = &d.relations[*rel];
            let pairs: HashSet<(Tuple, Tuple)> = r.iter().map(|t| (project(t, &x), project(t, &y))).collect();
            let mut xs: BTreeMap<Tuple, &Tuple> = BTreeMap::new();
            let mut ys: BTreeMap<Tuple, &Tuple> = BTreeMap::new();
            for t in r {
                xs.entry(project(t, &x)).or_insert(t);
                ys.entry(project(t, &y)).or_insert(t);
            }
            // Pairs are a subset of xs × ys, so equal sizes mean every combination occurs.
            if pairs.len() == xs.len() * ys.len() {
                return None;
            }
            for (px, t) in &xs {
                for (py, u) in &ys {
                    if !pairs.contains(&(px.clone(), py.clone())) {
                        return Some(Violation { tuples: vec![(*rel, (*t).clone()), (*rel, (*u).clone())] });
                    }
                }
            }
            unreachable!("fewer pairs than combinations")
        }
    }
}

/// The quantifier definition of an IA, evaluated literally.
pub fn satisfies_ia_raw(d: &Database, rel: RelId, left: &AttrSet, right: &AttrSet) -> bool {
    let (x, y) = (d.positions(left), d.positions(right));
    let r = &d.relations[rel];
    r.iter().all(|t| {
        r.iter()
            .all(|u| r.iter().any(|w| project(w, &x) == project(t, &x) && project(w, &y) == project(u, &y)))
    })
}

pub fn satisfies_all(d: &Database, set: &DependencySet) -> bool {
    set.deps.iter().all(|s| satisfies(d, s))
}

/// `π_XY ÷ π_Y = π_X`, with division computed as `π_X − π_X((π_X × π_Y) − π_XY)`.
pub fn division_equals_projection(d: &Database, rel: RelId, x: &AttrSet, y: &AttrSet) -> bool {
    let (xp, yp) = (d.positions(x), d.positions(y));
    let r = &d.relations[rel];
    let px: BTreeSet<Tuple> = r.iter().map(|t| project(t, &xp)).collect();
    let py: BTreeSet<Tuple> = r.iter().map(|t| project(t, &yp)).collect();
    let pxy: BTreeSet<(Tuple, Tuple)> = r.iter().map(|t| (project(t, &xp), project(t, &yp))).collect();
    let missing: BTreeSet<Tuple> = px
        .iter()
        .flat_map(|a| py.iter().map(move |b| (a.clone(), b.clone())))
        .filter(|p| !pxy.contains(p))
        .map(|(a, _)| a)
        .collect();
    let quotient: BTreeSet<Tuple> = px.difference(&missing).cloned().collect();
    quotient == px
}

#[derive(Clone, Copy, Debug)]
pub struct OracleBounds {
    pub max_tuples: usize,
    pub domain_size: usize,
    pub time_budget: Duration,
}

impl OracleBounds {
    pub fn new(max_tuples: usize, domain_size: usize) -> Self {
        Self { max_tuples, domain_size, time_budget: Duration::from_secs(30) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    NotImplied(Database),
    NoCounterexampleFound,
}

#[derive(Clone, Debug)]
enum Compiled {
    Fd { rel: RelId, x: Vec<usize>, y: Vec<usize> },
    Ind { from: RelId, x: Vec<usize>, to: RelId, y: Vec<usize> },
    Ia { rel: RelId, x: Vec<usize>, y: Vec<usize> },
}

fn compile(schema: &DatabaseSchema, d: &Dependency) -> Compiled {
    let pos = |it: &mut dyn Iterator<Item = AttrId>| it.map(|a| schema.position(a)).collect::<Vec<_>>();
    match d {
        Dependency::Fd { rel, lhs, rhs } => Compiled::Fd { rel: *rel, x: pos(&mut lhs.iter()), y: pos(&mut rhs.iter()) },
        Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs } => Compiled::Ind {
            from: *lhs_rel,
            x: pos(&mut lhs.iter().copied()),
            to: *rhs_rel,
            y: pos(&mut rhs.iter().copied()),
        },
        Dependency::Ia { rel, left, right } => Compiled::Ia { rel: *rel, x: pos(&mut left.iter()), y: pos(&mut right.iter()) },
    }
}

fn agree(a: &[Value], pa: &[usize], b: &[Value], pb: &[usize]) -> bool {
    pa.iter().zip(pb).all(|(&i, &j)| a[i] == b[j])
}

/// Positions a new tuple must take, `None` where free.
type Template = Vec<Option<Value>>;

struct Search<'a> {
    arity: Vec<usize>,
    sigma_fds: Vec<Compiled>,
    sigma_rest: Vec<Compiled>,
    query: &'a Compiled,
    /// Tuples that must stay unmatched, per query kind.
    seed: Vec<Tuple>,
    domain: usize,
    nodes: usize,
    deadline: Instant,
    rels: Vec<Vec<Tuple>>,
    used: Value,
}

enum Step {
    Done,
    Dead,
    Fix(RelId, Template),
}

impl Search<'_> {
    fn total(&self) -> usize {
        self.rels.iter().map(Vec::len).sum()
    }

    fn fd_ok(&self, rel: RelId, u: &[Value]) -> bool {
        self.sigma_fds.iter().all(|c| match c {
            Compiled::Fd { rel: r, x, y } if *r == rel => {
                self.rels[rel].iter().all(|t| !agree(t, x, u, x) || agree(t, y, u, y))
            }
            _ => true,
        })
    }

    /// Does every completion of `tpl` repair the query or clash with an FD?
    fn always_kills(&self, rel: RelId, tpl: &Template) -> bool {
        let fixed = |ps: &[usize], t: &[Value], qs: &[usize]| ps.iter().zip(qs).all(|(&p, &q)| tpl[p] == Some(t[q]));
        let kills = match self.query {
            Compiled::Fd { .. } => false,
            Compiled::Ia { rel: r, x, y } => *r == rel && fixed(x, &self.seed[0], x) && fixed(y, &self.seed[1], y),
            Compiled::Ind { x, to, y, .. } => *to == rel && fixed(y, &self.seed[0], x),
        };
        kills
            || self.sigma_fds.iter().any(|c| match c {
                Compiled::Fd { rel: r, x, y } if *r == rel => self.rels[rel].iter().any(|t| {
                    fixed(x, t, x) && y.iter().any(|&p| matches!(tpl[p], Some(v) if v != t[p]))
                }),
                _ => false,
            })
    }

    /// Would adding `u` to `rel` repair the query violation carried by the seed?
    fn kills_query(&self, rel: RelId, u: &[Value]) -> bool {
        match self.query {
            Compiled::Fd { .. } => false,
            Compiled::Ia { rel: r, x, y } => *r == rel && agree(u, x, &self.seed[0], x) && agree(u, y, &self.seed[1], y),
            Compiled::Ind { x, to, y, .. } => *to == rel && agree(u, y, &self.seed[0], x),
        }
    }

    fn next_step(&self) -> Step {
        // Fewest free positions first; an obligation whose every completion repairs the query
        // ends the branch.
        let mut best: Option<(usize, RelId, Template)> = None;
        let mut dead = false;
        let mut consider = |rel: RelId, tpl: Template| {
            let free = tpl.iter().filter(|v| v.is_none()).count();
            let rank = free;
            dead |= self.always_kills(rel, &tpl);
            if best.as_ref().map_or(true, |b| rank < b.0) {
                best = Some((rank, rel, tpl));
            }
        };
        for (r, ts) in self.rels.iter().enumerate() {
            if ts.is_empty() {
                consider(r, vec![None; self.arity[r]]);
            }
        }
        for c in &self.sigma_rest {
            match c {
                Compiled::Ind { from, x, to, y } => {
                    for t in &self.rels[*from] {
                        if !self.rels[*to].iter().any(|u| agree(t, x, u, y)) {
                            let mut tpl = vec![None; self.arity[*to]];
                            for (&i, &j) in x.iter().zip(y) {
                                tpl[j] = Some(t[i]);
                            }
                            consider(*to, tpl);
                        }
                    }
                }
                Compiled::Ia { rel, x, y } => {
                    let ts = &self.rels[*rel];
                    for t in ts {
                        for u in ts {
                            if ts.iter().any(|w| agree(w, x, t, x) && agree(w, y, u, y)) {
                                continue;
                            }
                            let mut tpl = vec![None; self.arity[*rel]];
                            for &i in x {
                                tpl[i] = Some(t[i]);
                            }
                            for &j in y {
                                if matches!(tpl[j], Some(v) if v != u[j]) {
                                    return Step::Dead;
                                }
                                tpl[j] = Some(u[j]);
                            }
                            consider(*rel, tpl);
                        }
                    }
                }
                Compiled::Fd { .. } => {}
            }
        }
        if dead {
            return Step::Dead;
        }
        match best {
            None => Step::Done,
            Some((_, r, t)) => Step::Fix(r, t),
        }
    }


    fn dfs(&mut self, limit: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes % 1024 == 0 && Instant::now() > self.deadline {
            return Err(Error::BudgetExceeded(self.nodes));
        }
        let (rel, tpl) = match self.next_step() {
            Step::Done => return Ok(true),
            Step::Dead => return Ok(false),
            Step::Fix(r, t) => (r, t),
        };
        if self.total() >= limit {
            return Ok(false);
        }
        let mut out = Vec::new();
        fill(&tpl, 0, self.used, self.domain, &mut Vec::new(), &mut out);
        for (u, used) in out {
            if self.rels[rel].contains(&u) || !self.fd_ok(rel, &u) || self.kills_query(rel, &u) {
                continue;
            }
            let saved = self.used;
            self.used = used;
            self.rels[rel].push(u);
            if self.dfs(limit)? {
                return Ok(true);
            }
            self.rels[rel].pop();
            self.used = saved;
        }
        Ok(false)
    }
}

/// Completions of a template; free positions draw from used values plus fresh ones in order.
fn fill(tpl: &Template, i: usize, used: Value, domain: usize, cur: &mut Tuple, out: &mut Vec<(Tuple, Value)>) {
    if i == tpl.len() {
        out.push((cur.clone(), used));
        return;
    }
    match tpl[i] {
        Some(v) => {
            cur.push(v);
            fill(tpl, i + 1, used, domain, cur, out);
            cur.pop();
        }
        None => {
            let top = (used as usize + 1).min(domain) as Value;
            for v in 0..top {
                cur.push(v);
                fill(tpl, i + 1, used.max(v + 1), domain, cur, out);
                cur.pop();
            }
        }
    }
}

/// Exhaustive search for a finite database satisfying `Σ` and refuting `σ`.
///
/// Starting from tuples that refute `σ`, the search repeatedly picks an unmet
/// inclusion or independence obligation and branches over every tuple that could
/// discharge it. Values outside the ones already used are interchangeable, so
/// fresh values are introduced in increasing order only.
pub fn find_counterexample(set: &DependencySet, sigma: &Dependency, b: OracleBounds) -> Result<OracleOutcome> {
    let schema = set.schema.clone();
    let arity: Vec<usize> = schema.relations().iter().map(|r| r.attrs.len()).collect();
    let (fds, rest): (Vec<_>, Vec<_>) = set.deps.iter().map(|d| compile(&schema, d)).partition(|c| matches!(c, Compiled::Fd { .. }));
    let query = compile(&schema, sigma);
    let deadline = Instant::now() + b.time_budget;
    let mut nodes = 0;
    for limit in 1..=b.max_tuples {
        let seeds = query_seeds(&query, &arity, b.domain_size);
        for (rel, seed, used) in seeds {
            if seed.len() > limit {
                continue;
            }
            let mut s = Search {
                arity: arity.clone(),
                sigma_fds: fds.clone(),
                sigma_rest: rest.clone(),
                query: &query,
                seed: seed.clone(),
                domain: b.domain_size,
                nodes,
                deadline,
                rels: vec![Vec::new(); arity.len()],
                used,
            };
            let mut ok = true;
            for t in &seed {
                if s.rels[rel].contains(t) || !s.fd_ok(rel, t) {
                    ok = false;
                    break;
                }
                s.rels[rel].push(t.clone());
            }
            // The seed itself must not already repair the query.
            if ok && seed.iter().any(|t| s.kills_query(rel, t)) {
                ok = false;
            }
            if ok && s.dfs(limit)? {
                let d = Database::from_rows(schema.clone(), s.rels.clone());
                debug_assert!(satisfies_all(&d, set) && !satisfies(&d, sigma));
                if !satisfies_all(&d, set) || satisfies(&d, sigma) {
                    return Err(Error::Malformed("oracle produced an invalid counterexample".into()));
                }
                return Ok(OracleOutcome::NotImplied(d));
            }
            nodes = s.nodes;
        }
    }
    Ok(OracleOutcome::NoCounterexampleFound)
}

/// Canonical tuples violating the query, with the relation they live in.
fn query_seeds(q: &Compiled, arity: &[usize], domain: usize) -> Vec<(RelId, Vec<Tuple>, Value)> {
    let mut out = Vec::new();
    let rel = match q {
        Compiled::Fd { rel, .. } | Compiled::Ia { rel, .. } => *rel,
        Compiled::Ind { from, .. } => *from,
    };
    let mut firsts = Vec::new();
    fill(&vec![None; arity[rel]], 0, 0, domain, &mut Vec::new(), &mut firsts);
    for (t0, used0) in firsts {
        match q {
            Compiled::Ind { .. } => out.push((rel, vec![t0], used0)),
            Compiled::Fd { x, y, .. } | Compiled::Ia { x, y, .. } => {
                let mut tpl: Template = vec![None; arity[rel]];
                if let Compiled::Fd { .. } = q {
                    for &i in x {
                        tpl[i] = Some(t0[i]);
                    }
                }
                let mut seconds = Vec::new();
                fill(&tpl, 0, used0, domain, &mut Vec::new(), &mut seconds);
                for (t1, used) in seconds {
                    let keep = match q {
                        Compiled::Fd { .. } => !agree(&t0, y, &t1, y),
                        _ => !agree(&t0, x, &t1, x) && !agree(&t0, y, &t1, y),
                    };
                    if keep {
                        out.push((rel, vec![t0.clone(), t1], used));
                    }
                }
            }
        }
    }
    out
}

/// Random databases repaired by the chase until they satisfy `Σ`.
pub fn generate_models(set: &DependencySet, count: usize, b: OracleBounds, seed: u64) -> Result<Vec<Database>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut failures = 0;
    while out.len() < count {
        match repair(set, random_db(&set.schema, b, &mut rng), &mut rng, 10_000) {
            Some(d) => out.push(d),
            None => {
                failures += 1;
                if failures > 10 * count.max(1) {
                    return Err(Error::BudgetExceeded(failures));
                }
            }
        }
    }
    Ok(out)
}

pub fn random_db(schema: &Arc<DatabaseSchema>, b: OracleBounds, rng: &mut impl Rng) -> Database {
    let mut d = Database::new(schema.clone());
    let dom = b.domain_size.max(1) as Value;
    for r in 0..schema.relations().len() {
        let n = rng.gen_range(1..=b.max_tuples.max(1));
        for _ in 0..n {
            let t = (0..schema.attrs_of(r).len()).map(|_| rng.gen_range(0..dom)).collect();
            d.relations[r].insert(t);
        }
    }
    d
}

/// Chase-style repair: FDs and constancy merge values, INDs and IAs add tuples.
pub fn repair(set: &DependencySet, mut d: Database, rng: &mut impl Rng, budget: usize) -> Option<Database> {
    let compiled: Vec<Compiled> = set.deps.iter().map(|x| compile(&set.schema, x)).collect();
    for _ in 0..budget {
        let mut changed = false;
        for c in &compiled {
            if let Some(rw) = egd_step(&d, c) {
                substitute(&mut d, rw.0, rw.1);
                changed = true;
                break;
            }
        }
        if changed {
            continue;
        }
        let mut order: Vec<usize> = (0..compiled.len()).collect();
        order.shuffle(rng);
        for i in order {
            if let Some((rel, t)) = tgd_step(&d, &compiled[i], rng) {
                d.relations[rel].insert(t);
                changed = true;
                break;
            }
        }
        if !changed {
            return Some(d);
        }
    }
    None
}

fn substitute(d: &mut Database, from: Value, to: Value) {
    for r in d.relations.iter_mut() {
        *r = std::mem::take(r)
            .into_iter()
            .map(|t| t.into_iter().map(|v| if v == from { to } else { v }).collect())
            .collect();
    }
}

fn egd_step(d: &Database, c: &Compiled) -> Option<(Value, Value)> {
    match c {
        Compiled::Fd { rel, x, y } => {
            let mut seen: BTreeMap<Tuple, &Tuple> = BTreeMap::new();
            for t in &d.relations[*rel] {
                if let Some(s) = seen.get(&project(t, x)) {
                    if let Some(&p) = y.iter().find(|&&p| s[p] != t[p]) {
                        return Some((t[p].max(s[p]), t[p].min(s[p])));
                    }
                } else {
                    seen.insert(project(t, x), t);
                }
            }
            None
        }
        Compiled::Ia { rel, x, y } => {
            let overlap: Vec<usize> = x.iter().filter(|p| y.contains(p)).copied().collect();
            let first = d.relations[*rel].iter().next()?;
            d.relations[*rel]
                .iter()
                .flat_map(|t| overlap.iter().map(move |&p| (t[p], first[p])))
                .find(|(a, b)| a != b)
                .map(|(a, b)| (a.max(b), a.min(b)))
        }
        Compiled::Ind { .. } => None,
    }
}

fn tgd_step(d: &Database, c: &Compiled, rng: &mut impl Rng) -> Option<(RelId, Tuple)> {
    match c {
        Compiled::Ind { from, x, to, y } => {
            let targets: HashSet<Tuple> = d.relations[*to].iter().map(|u| project(u, y)).collect();
            let t = d.relations[*from].iter().find(|t| !targets.contains(&project(t, x)))?;
            let base: Vec<&Tuple> = d.relations[*to].iter().collect();
            let mut u = match base.choose(rng) {
                Some(b) => (*b).clone(),
                None => vec![x.first().map_or(0, |&i| t[i]); d.schema.attrs_of(*to).len()],
            };
            for (&i, &j) in x.iter().zip(y) {
                u[j] = t[i];
            }
            Some((*to, u))
        }
        Compiled::Ia { rel, x, y } => {
            let r = &d.relations[*rel];
            let pairs: HashSet<(Tuple, Tuple)> = r.iter().map(|t| (project(t, x), project(t, y))).collect();
            for t in r {
                for u in r {
                    if !pairs.contains(&(project(t, x), project(u, y))) {
                        let mut w = if rng.gen_bool(0.5) { t.clone() } else { u.clone() };
                        for &p in x {
                            w[p] = t[p];
                        }
                        for &p in y {
                            w[p] = u[p];
                        }
                        return Some((*rel, w));
                    }
                }
            }
            None
        }
        Compiled::Fd { .. } => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_spec;

    fn rel_ab(rows: &[[Value; 2]]) -> Database {
        let schema = Arc::new(DatabaseSchema::single("R", &["A", "B"]));
        Database::from_rows(schema, vec![rows.iter().map(|r| r.to_vec()).collect()])
    }

    #[test]
    fn product_satisfies_independence() {
        let d = rel_ab(&[[0, 1], [0, 2], [1, 1], [1, 2]]);
        assert!(satisfies(&d, &Dependency::ia(0, [0], [1])));
    }

    #[test]
    fn diagonal_refutes_independence_but_not_fd() {
        let d = rel_ab(&[[0, 0], [1, 1]]);
        let v = violation(&d, &Dependency::ia(0, [0], [1])).unwrap();
        assert_eq!(v.tuples, vec![(0, vec![0, 0]), (0, vec![1, 1])]);
        assert!(satisfies(&d, &Dependency::fd(0, [0], [1])));
        assert!(!division_equals_projection(&d, 0, &[0].into(), &[1].into()));
        assert!(division_equals_projection(&d, 0, &AttrSet::new(), &[1].into()));
    }

    #[test]
    fn overlapping_atoms_follow_the_quantifier_definition() {
        let d = rel_ab(&[[0, 0], [1, 0]]);
        let (l, r): (AttrSet, AttrSet) = ([0].into(), [0, 1].into());
        assert_eq!(satisfies(&d, &Dependency::ia(0, l.clone(), r.clone())), satisfies_ia_raw(&d, 0, &l, &r));
        assert!(!satisfies(&d, &Dependency::ca(0, 0)));
        assert!(satisfies(&d, &Dependency::ca(0, 1)));
    }

    #[test]
    fn oracle_finds_two_tuple_fd_counterexample() {
        let s = parse_spec("schema R(A,B)").unwrap();
        let out = find_counterexample(&s, &Dependency::fd(0, [0], [1]), OracleBounds::new(2, 2)).unwrap();
        let OracleOutcome::NotImplied(d) = out else { panic!("expected a counterexample") };
        assert_eq!(d.relations[0], BTreeSet::from([vec![0, 0], vec![0, 1]]));
    }

    #[test]
    fn oracle_respects_symmetry() {
        let s = parse_spec("schema R(A,B)\nia R: A _|_ B").unwrap();
        let out = find_counterexample(&s, &Dependency::ia(0, [1], [0]), OracleBounds::new(5, 4)).unwrap();
        assert_eq!(out, OracleOutcome::NoCounterexampleFound);
    }

    #[test]
    fn oracle_handles_inclusions_across_relations() {
        let s = parse_spec("schema R(A,B)\nschema S(E,F)\nind R[A] <= S[E]\nind R[B] <= S[F]").unwrap();
        let q = Dependency::ind(0, vec![0, 1], 1, vec![2, 3]);
        assert!(matches!(find_counterexample(&s, &q, OracleBounds::new(4, 3)).unwrap(), OracleOutcome::NotImplied(_)));
        let s = parse_spec("schema R(A,B)\nschema S(E,F)\nind R[A] <= S[E]\nind R[B] <= S[F]\nia S: E _|_ F").unwrap();
        assert_eq!(find_counterexample(&s, &q, OracleBounds::new(5, 4)).unwrap(), OracleOutcome::NoCounterexampleFound);
    }

    #[test]
    fn repaired_models_satisfy_their_set() {
        let s = parse_spec("schema R(A,B,C)\nschema S(E)\nia R: A _|_ B\nind R[C] <= S[E]\nfd R: A -> C\nia S: E _|_ E").unwrap();
        for d in generate_models(&s, 20, OracleBounds::new(4, 3), 7).unwrap() {
            assert!(satisfies_all(&d, &s));
            assert!(d.is_nonempty());
        }
    }
}
