//! Chase engines for INDs and IAs, constancy reduction, H-graph search and the
//! graphical chase for FDs with IAs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use serde_json::json;

use crate::error::{Error, Result};
use crate::model::{decompose_ia_query, is_trivial, restrict, AttrId, AttrSet, Dependency, DependencySet, RelId};
use crate::polyengine::fd_closure;
use crate::semantics::{satisfies, satisfies_all, Database, Tuple, Value};
use crate::verdict::{Evidence, Verdict};

pub const TUPLE_LIMIT: usize = 500_000;
pub const VERTEX_BUDGET: usize = 10_000;
pub const HGRAPH_CAP: usize = 1_000_000;

fn require_ind_ia(set: &DependencySet, sigma: Option<&Dependency>) -> Result<()> {
    if set.deps.iter().chain(sigma).any(Dependency::is_fd) {
        return Err(Error::NotIndIa);
    }
    Ok(())
}

/// Constant attributes and the unary inclusion graph that decides UIND and CA queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstancyClosure {
    pub constants: AttrSet,
    /// `A ↦ {B : A⊆B}` over projections, plus `B⊆A` whenever `B` is constant.
    succ: BTreeMap<AttrId, BTreeSet<AttrId>>,
}

impl ConstancyClosure {
    pub fn is_constant(&self, a: AttrId) -> bool {
        self.constants.contains(a)
    }

    pub fn reachable(&self, a: AttrId) -> AttrSet {
        let mut seen = AttrSet::singleton(a);
        let mut stack = vec![a];
        while let Some(x) = stack.pop() {
            for &y in self.succ.get(&x).into_iter().flatten() {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Does `Σ ⊢ A⊆B`?
    pub fn includes(&self, a: AttrId, b: AttrId) -> bool {
        a == b || self.reachable(a).contains(b)
    }

    /// Non-reflexive derivable UINDs, materialized.
    pub fn uinds(&self) -> Vec<(AttrId, AttrId)> {
        let mut out = Vec::new();
        for &a in self.succ.keys() {
            out.extend(self.reachable(a).iter().filter(|&b| b != a).map(|b| (a, b)));
        }
        out
    }

    /// Classes of mutually included constants.
    pub fn classes(&self) -> Vec<AttrSet> {
        let mut done = AttrSet::new();
        let mut out = Vec::new();
        for a in self.constants.iter() {
            if done.contains(a) {
                continue;
            }
            let class: AttrSet = self.reachable(a).iter().filter(|&b| self.includes(b, a)).collect();
            done.extend(class.iter());
            out.push(class);
        }
        out
    }
}

pub fn uind_ca_closure(set: &DependencySet) -> Result<ConstancyClosure> {
    require_ind_ia(set, None)?;
    let mut succ: BTreeMap<AttrId, BTreeSet<AttrId>> = BTreeMap::new();
    let mut pred: BTreeMap<AttrId, BTreeSet<AttrId>> = BTreeMap::new();
    let mut constants = AttrSet::new();
    for d in &set.deps {
        match d {
            Dependency::Ind { lhs, rhs, .. } => {
                for (&a, &b) in lhs.iter().zip(rhs) {
                    succ.entry(a).or_default().insert(b);
                    pred.entry(b).or_default().insert(a);
                }
            }
            Dependency::Ia { left, right, .. } => constants.extend(left.intersection(right).iter()),
            Dependency::Fd { .. } => unreachable!(),
        }
    }
    let mut stack = constants.to_vec();
    while let Some(b) = stack.pop() {
        for &a in pred.get(&b).into_iter().flatten() {
            if constants.insert(a) {
                stack.push(a);
            }
        }
    }
    for (a, bs) in pred.iter().filter(|(b, _)| constants.contains(**b)).map(|(b, a)| (*b, a.clone())) {
        succ.entry(a).or_default().extend(bs);
    }
    Ok(ConstancyClosure { constants, succ })
}

#[derive(Clone, Debug)]
pub enum Reduction {
    /// `Σ₀` and `σ₀` for an IA query.
    Ia { sigma0: DependencySet, query: Dependency },
    /// `Σ₁` for an IND query.
    Ind { sigma1: DependencySet },
}

pub fn reduce_ca(set: &DependencySet, sigma: &Dependency) -> Result<Reduction> {
    require_ind_ia(set, Some(sigma))?;
    let cl = uind_ca_closure(set)?;
    Ok(match sigma {
        Dependency::Ia { .. } => {
            let (sigma0, query) = reduce_for_ia(set, &cl, sigma);
            Reduction::Ia { sigma0, query }
        }
        _ => Reduction::Ind { sigma1: reduce_for_ind(set, &cl) },
    })
}

fn non_constants(set: &DependencySet, cl: &ConstancyClosure) -> AttrSet {
    (0..set.schema.num_attrs()).filter(|&a| !cl.is_constant(a)).collect()
}

fn reduce_for_ia(set: &DependencySet, cl: &ConstancyClosure, sigma: &Dependency) -> (DependencySet, Dependency) {
    let keep = non_constants(set, cl);
    let deps = set
        .deps
        .iter()
        .map(|d| restrict(d, &keep))
        .filter(|d| !matches!(d, Dependency::Ind { lhs, .. } if lhs.is_empty()))
        .collect();
    (set.with(deps), restrict(sigma, &keep))
}

fn reduce_for_ind(set: &DependencySet, cl: &ConstancyClosure) -> DependencySet {
    let keep = non_constants(set, cl);
    let schema = &set.schema;
    let mut deps = Vec::new();
    for d in &set.deps {
        match d {
            Dependency::Ia { .. } => deps.push(restrict(d, &keep)),
            d => deps.push(d.clone()),
        }
    }
    for r in 0..schema.relations().len() {
        let consts: Vec<AttrId> = schema.attrs_of(r).iter().copied().filter(|&a| cl.is_constant(a)).collect();
        let rest: AttrSet = schema.attrs_of(r).iter().copied().filter(|&a| !cl.is_constant(a)).collect();
        for j in 1..consts.len() {
            deps.push(Dependency::ia(r, consts[..j].iter().copied().collect::<AttrSet>(), AttrSet::singleton(consts[j])));
        }
        if !consts.is_empty() && !rest.is_empty() {
            deps.push(Dependency::ia(r, consts.iter().copied().collect::<AttrSet>(), rest));
        }
    }
    for b in cl.constants.iter() {
        for a in 0..schema.num_attrs() {
            if a != b && cl.includes(a, b) {
                let d = Dependency::ind(schema.relation_of(b), vec![b], schema.relation_of(a), vec![a]);
                if !deps.contains(&d) {
                    deps.push(d);
                }
            }
        }
    }
    set.with(deps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChaseRule {
    Ind,
    Ia,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChaseStep {
    pub rule: ChaseRule,
    /// Index into the trace's dependency list.
    pub dep: usize,
    pub relation: RelId,
    pub tuple: Tuple,
}

/// A replayable record of one chase run.
#[derive(Clone, Debug)]
pub struct ChaseTrace {
    pub deps: DependencySet,
    pub goal: Dependency,
    pub initial: Database,
    pub steps: Vec<ChaseStep>,
}

impl ChaseTrace {
    /// Re-applies every step, checking each is a legal chase step; returns the final database.
    pub fn replay(&self) -> Option<Database> {
        let mut db = self.initial.clone();
        for s in &self.steps {
            let dep = self.deps.deps.get(s.dep)?;
            let ok = match (s.rule, dep) {
                (ChaseRule::Ind, Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs }) => {
                    let (lp, rp) = (db.positions(lhs.iter().copied()), db.positions(rhs.iter().copied()));
                    let key = project(&s.tuple, &rp);
                    *rhs_rel == s.relation && db.relations[*lhs_rel].iter().any(|t| project(t, &lp) == key)
                }
                (ChaseRule::Ia, Dependency::Ia { rel, left, right }) => {
                    let (xp, yp) = (db.positions(left.iter()), db.positions(right.iter()));
                    let (x, y) = (project(&s.tuple, &xp), project(&s.tuple, &yp));
                    let r = &db.relations[*rel];
                    *rel == s.relation && r.iter().any(|t| project(t, &xp) == x) && r.iter().any(|t| project(t, &yp) == y)
                }
                _ => false,
            };
            if !ok || !db.relations[s.relation].insert(s.tuple.clone()) {
                return None;
            }
        }
        Some(db)
    }

    pub fn render(&self) -> String {
        let schema = &self.deps.schema;
        let mut out = format!("goal: {}\ninitial:\n{}", self.goal.show(schema), self.initial);
        for (i, s) in self.steps.iter().enumerate() {
            let rule = match s.rule {
                ChaseRule::Ind => "(i)",
                ChaseRule::Ia => "(ii)",
            };
            let vals: Vec<String> = s.tuple.iter().map(Value::to_string).collect();
            let _ = writeln!(
                out,
                "{:>4}. {rule} {:<32} adds {}({})",
                i + 1,
                self.deps.deps[s.dep].show(schema).to_string(),
                schema.rel_name(s.relation),
                vals.join(",")
            );
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let schema = &self.deps.schema;
        let rels = |d: &Database| {
            (0..schema.relations().len())
                .map(|r| json!({"relation": schema.rel_name(r), "tuples": d.relations[r].iter().collect::<Vec<_>>()}))
                .collect::<Vec<_>>()
        };
        json!({
            "goal": self.goal.show(schema).to_string(),
            "dependencies": self.deps.deps.iter().map(|d| d.show(schema).to_string()).collect::<Vec<_>>(),
            "initial": rels(&self.initial),
            "steps": self.steps.iter().map(|s| json!({
                "rule": match s.rule { ChaseRule::Ind => "ind", ChaseRule::Ia => "ia" },
                "dependency": s.dep,
                "relation": schema.rel_name(s.relation),
                "tuple": s.tuple,
            })).collect::<Vec<_>>(),
        })
    }
}

fn project(t: &[Value], pos: &[usize]) -> Vec<Value> {
    pos.iter().map(|&p| t[p]).collect()
}

fn width(db: &Database, r: RelId) -> usize {
    db.schema.attrs_of(r).len()
}

fn require_disjoint(set: &DependencySet) -> Result<()> {
    for d in &set.deps {
        match d {
            Dependency::Ia { left, right, .. } if !left.is_disjoint(right) => {
                return Err(Error::Malformed(format!("{} is not constancy-free", d.show(&set.schema))))
            }
            Dependency::Fd { .. } => return Err(Error::NotIndIa),
            _ => {}
        }
    }
    Ok(())
}

/// Saturates under IND steps (i) and IA steps (ii), filling unconstrained positions with 0.
fn saturate(set: &DependencySet, db: &mut Database, steps: &mut Vec<ChaseStep>, limit: usize) -> Result<()> {
    loop {
        let mut changed = false;
        loop {
            let mut round = false;
            for (i, d) in set.deps.iter().enumerate() {
                if let Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs } = d {
                    let (lp, rp) = (db.positions(lhs.iter().copied()), db.positions(rhs.iter().copied()));
                    let mut have: HashSet<Vec<Value>> = db.relations[*rhs_rel].iter().map(|t| project(t, &rp)).collect();
                    let mut new = Vec::new();
                    for t in &db.relations[*lhs_rel] {
                        let k = project(t, &lp);
                        if !have.contains(&k) {
                            let mut u = vec![0; width(db, *rhs_rel)];
                            for (&p, &v) in rp.iter().zip(&k) {
                                u[p] = v;
                            }
                            have.insert(k);
                            new.push(u);
                        }
                    }
                    for u in new {
                        db.relations[*rhs_rel].insert(u.clone());
                        steps.push(ChaseStep { rule: ChaseRule::Ind, dep: i, relation: *rhs_rel, tuple: u });
                        round = true;
                    }
                }
            }
            if db.total_tuples() > limit {
                return Err(Error::BudgetExceeded(db.total_tuples()));
            }
            if !round {
                break;
            }
            changed = true;
        }
        for (i, d) in set.deps.iter().enumerate() {
            if let Dependency::Ia { rel, left, right } = d {
                if left.is_empty() || right.is_empty() {
                    continue;
                }
                let (xp, yp) = (db.positions(left.iter()), db.positions(right.iter()));
                let r = &db.relations[*rel];
                let pairs: HashSet<(Vec<Value>, Vec<Value>)> = r.iter().map(|t| (project(t, &xp), project(t, &yp))).collect();
                let xs: BTreeSet<Vec<Value>> = r.iter().map(|t| project(t, &xp)).collect();
                let ys: BTreeSet<Vec<Value>> = r.iter().map(|t| project(t, &yp)).collect();
                if pairs.len() == xs.len() * ys.len() {
                    continue;
                }
                let w = width(db, *rel);
                let mut new = Vec::new();
                for x in &xs {
                    for y in &ys {
                        if !pairs.contains(&(x.clone(), y.clone())) {
                            let mut u = vec![0; w];
                            for (&p, &v) in xp.iter().zip(x).chain(yp.iter().zip(y)) {
                                u[p] = v;
                            }
                            new.push(u);
                        }
                    }
                }
                if db.total_tuples() + new.len() > limit {
                    return Err(Error::BudgetExceeded(db.total_tuples() + new.len()));
                }
                for u in new {
                    db.relations[*rel].insert(u.clone());
                    steps.push(ChaseStep { rule: ChaseRule::Ia, dep: i, relation: *rel, tuple: u });
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

/// Accepts a witness only if it really satisfies `Σ` and violates `σ`.
fn checked(set: &DependencySet, sigma: &Dependency, db: Database) -> Verdict {
    if db.is_nonempty() && satisfies_all(&db, set) && !satisfies(&db, sigma) {
        Verdict::refuted_by(db)
    } else {
        Verdict::Unknown("counterexample failed its self-check".into())
    }
}

/// Decides a disjoint IA over a constancy-free IND+IA set.
pub fn chase_dia(set: &DependencySet, sigma: &Dependency) -> Result<Verdict> {
    chase_dia_limited(set, sigma, TUPLE_LIMIT)
}

pub fn chase_dia_limited(set: &DependencySet, sigma: &Dependency, limit: usize) -> Result<Verdict> {
    require_disjoint(set)?;
    let Dependency::Ia { rel, left, right } = sigma else {
        return Err(Error::UnsupportedQuery("expected an independence atom".into()));
    };
    if !left.is_disjoint(right) {
        return Err(Error::UnsupportedQuery("query sides overlap".into()));
    }
    if left.is_empty() || right.is_empty() {
        return Ok(Verdict::Implied(Evidence::Reason("trivial independence".into())));
    }
    let mut db = Database::new(set.schema.clone());
    for r in 0..set.schema.relations().len() {
        if r != *rel {
            let w = width(&db, r);
            db.relations[r].insert(vec![0; w]);
        }
    }
    let order: Vec<AttrId> = left.iter().chain(right.iter()).collect();
    let w = width(&db, *rel);
    let (mut s, mut s2, mut goal) = (vec![0; w], vec![0; w], vec![0; w]);
    for (i, &a) in order.iter().enumerate() {
        let p = set.schema.position(a);
        let v = i as Value + 1;
        if i < left.len() {
            s[p] = v;
        } else {
            s2[p] = v;
        }
        goal[p] = v;
    }
    db.relations[*rel].insert(s);
    db.relations[*rel].insert(s2);
    let initial = db.clone();
    let mut steps = Vec::new();
    saturate(set, &mut db, &mut steps, limit)?;
    let gp = db.positions(order.iter().copied());
    let target = project(&goal, &gp);
    if db.relations[*rel].iter().any(|t| project(t, &gp) == target) {
        let trace = ChaseTrace { deps: set.clone(), goal: sigma.clone(), initial, steps };
        return Ok(Verdict::Implied(Evidence::Chase(Box::new(trace))));
    }
    Ok(checked(set, sigma, db))
}

/// Decides an IND over a constancy-free IND+IA set.
pub fn chase_ind(set: &DependencySet, sigma: &Dependency) -> Result<Verdict> {
    require_disjoint(set)?;
    let (v, db) = chase_ind_core(set, sigma, &[], TUPLE_LIMIT)?;
    Ok(match (v, db) {
        (Some(v), _) => v,
        (None, db) => checked(set, sigma, db),
    })
}

/// Runs the IND chase; `None` carries the zero-completed final database.
fn chase_ind_core(set: &DependencySet, sigma: &Dependency, classes: &[AttrSet], limit: usize) -> Result<(Option<Verdict>, Database)> {
    let Dependency::Ind { lhs_rel, .. } = sigma else {
        return Err(Error::UnsupportedQuery("expected an inclusion dependency".into()));
    };
    let schema = &set.schema;
    let mut db = Database::new(schema.clone());
    let attrs = schema.attrs_of(*lhs_rel);
    let mut s = vec![0; attrs.len()];
    for (i, &a) in attrs.iter().enumerate() {
        let rep = classes.iter().find(|c| c.contains(a)).and_then(|c| c.iter().find(|&b| schema.relation_of(b) == *lhs_rel));
        s[i] = rep.map_or(i, |b| schema.position(b)) as Value + 1;
    }
    db.relations[*lhs_rel].insert(s);
    let initial = db.clone();
    let mut steps = Vec::new();
    saturate(set, &mut db, &mut steps, limit)?;
    if satisfies(&db, sigma) {
        let trace = ChaseTrace { deps: set.clone(), goal: sigma.clone(), initial, steps };
        return Ok((Some(Verdict::Implied(Evidence::Chase(Box::new(trace)))), db));
    }
    for r in 0..schema.relations().len() {
        if db.relations[r].is_empty() {
            let w = width(&db, r);
            db.relations[r].insert(vec![0; w]);
        }
    }
    saturate(set, &mut db, &mut Vec::new(), limit)?;
    Ok((None, db))
}

/// Complete decision procedure for IND+IA; finite and unrestricted implication coincide.
pub fn imply_ind_ia(set: &DependencySet, sigma: &Dependency) -> Result<Verdict> {
    imply_ind_ia_limited(set, sigma, TUPLE_LIMIT)
}

pub fn imply_ind_ia_limited(set: &DependencySet, sigma: &Dependency, limit: usize) -> Result<Verdict> {
    require_ind_ia(set, Some(sigma))?;
    sigma.check(&set.schema)?;
    let cl = uind_ca_closure(set)?;
    match sigma {
        Dependency::Ia { rel, .. } => {
            let (dia, cas) = decompose_ia_query(sigma).expect("IA query");
            for ca in &cas {
                let a = ca.attrs().first().expect("CA attribute");
                if !cl.is_constant(a) {
                    return Ok(constancy_witness(set, &cl, sigma, *rel));
                }
            }
            let (sigma0, query) = reduce_for_ia(set, &cl, &dia);
            if is_trivial(&query) {
                return Ok(Verdict::Implied(Evidence::Reason(format!(
                    "{} is trivial once the constant attributes {} are removed",
                    dia.show(&set.schema),
                    set.schema.names(&cl.constants).join(" ")
                ))));
            }
            match chase_dia_limited(&sigma0, &query, limit)? {
                Verdict::NotImplied(crate::verdict::Refutation::Database(db)) => {
                    Ok(checked(set, sigma, absorb_constants(set, &cl, *db)))
                }
                v => Ok(v),
            }
        }
        Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs } => {
            if lhs_rel == rhs_rel && lhs == rhs {
                return Ok(Verdict::Implied(Evidence::Reason("reflexivity".into())));
            }
            let sigma1 = reduce_for_ind(set, &cl);
            let classes = cl.classes();
            let (v, db) = chase_ind_core(&sigma1, sigma, &classes, limit)?;
            if let Some(v) = v {
                return Ok(v);
            }
            Ok(checked(set, sigma, collapse_constants(set, &cl, sigma, &classes, db)))
        }
        Dependency::Fd { .. } => Err(Error::NotIndIa),
    }
}

/// `{0,1}` on every mentioned non-constant attribute, in all combinations; 0 elsewhere.
fn constancy_witness(set: &DependencySet, cl: &ConstancyClosure, sigma: &Dependency, _rel: RelId) -> Verdict {
    let schema = &set.schema;
    let mentioned = set.mentioned(Some(sigma));
    let mut db = Database::new(schema.clone());
    for r in 0..schema.relations().len() {
        let free: Vec<usize> = schema
            .attrs_of(r)
            .iter()
            .filter(|&&a| mentioned.contains(a) && !cl.is_constant(a))
            .map(|&a| schema.position(a))
            .collect();
        if free.len() > 20 {
            return Verdict::Unknown(format!("constancy counterexample needs 2^{} tuples", free.len()));
        }
        for m in 0..1u32 << free.len() {
            let mut t = vec![0; schema.attrs_of(r).len()];
            for (i, &p) in free.iter().enumerate() {
                t[p] = m >> i & 1;
            }
            db.relations[r].insert(t);
        }
    }
    checked(set, sigma, db)
}

/// Turns a model of `Σ₀` into a model of `Σ`: constants take a fresh value `Z`, and every
/// attribute that receives constants through an IND gets all `Z`-variants.
fn absorb_constants(set: &DependencySet, cl: &ConstancyClosure, db: Database) -> Database {
    let schema = &set.schema;
    let z = db.relations.iter().flatten().flatten().copied().max().unwrap_or(0) + 1;
    let mut absorbing = AttrSet::new();
    for c in cl.constants.iter() {
        absorbing.extend(cl.reachable(c).iter().filter(|&a| !cl.is_constant(a)));
    }
    let mut out = Database::new(schema.clone());
    for r in 0..schema.relations().len() {
        let consts: Vec<usize> = schema.attrs_of(r).iter().filter(|&&a| cl.is_constant(a)).map(|&a| schema.position(a)).collect();
        let abs: Vec<usize> = schema.attrs_of(r).iter().filter(|&&a| absorbing.contains(a)).map(|&a| schema.position(a)).collect();
        for t in &db.relations[r] {
            for m in 0..1u32 << abs.len() {
                let mut u = t.clone();
                for &p in &consts {
                    u[p] = z;
                }
                for (i, &p) in abs.iter().enumerate() {
                    if m >> i & 1 == 1 {
                        u[p] = z;
                    }
                }
                out.relations[r].insert(u);
            }
        }
    }
    out
}

/// Projects constants of a `Σ₁`-model onto one consistent tuple `t₀`.
fn collapse_constants(set: &DependencySet, cl: &ConstancyClosure, sigma: &Dependency, classes: &[AttrSet], db: Database) -> Database {
    let schema = &set.schema;
    let Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs } = sigma else { return db };
    // Constants copy a violating tuple, so the violation survives the collapse.
    let pos = |xs: &[AttrId]| xs.iter().map(|&a| schema.position(a)).collect::<Vec<_>>();
    let (lp, rp) = (pos(lhs), pos(rhs));
    let image: HashSet<Vec<Value>> = db.relations[*rhs_rel].iter().map(|t| rp.iter().map(|&p| t[p]).collect()).collect();
    let s = db.relations[*lhs_rel]
        .iter()
        .find(|t| !image.contains(&lp.iter().map(|&p| t[p]).collect::<Vec<_>>()))
        .or_else(|| db.relations[*lhs_rel].first())
        .cloned();
    let mut t0: HashMap<AttrId, Value> = HashMap::new();
    for class in classes {
        let from_s = class.iter().find(|&b| schema.relation_of(b) == *lhs_rel).and_then(|b| s.as_ref().map(|s| s[schema.position(b)]));
        let v = from_s.unwrap_or_else(|| class.iter().filter_map(|a| db.column(a).into_iter().next()).min().unwrap_or(0));
        for a in class.iter() {
            t0.insert(a, v);
        }
    }
    let mut out = Database::new(schema.clone());
    for r in 0..schema.relations().len() {
        for t in &db.relations[r] {
            let mut u = t.clone();
            for &a in schema.attrs_of(r) {
                if cl.is_constant(a) {
                    u[schema.position(a)] = t0[&a];
                }
            }
            out.relations[r].insert(u);
        }
    }
    out
}

/// One member `R[Ā]⊆R′[B̄]` of an H-graph node, as target relation and sorted `(A,B)` pairs.
type Tau = (RelId, Vec<(AttrId, AttrId)>);
type HNode = Vec<Tau>;

fn hnode(mut taus: Vec<Tau>) -> HNode {
    for t in &mut taus {
        t.1.sort_unstable();
    }
    taus.sort();
    taus
}

fn neighbours(set: &DependencySet, node: &HNode) -> Vec<HNode> {
    let mut out = Vec::new();
    let schema = &set.schema;
    for (i, (rel, pairs)) in node.iter().enumerate() {
        let rest = || node.iter().enumerate().filter(move |(j, _)| *j != i).map(|(_, t)| t.clone());
        // Split: partitions containing the first pair on one side.
        let n = pairs.len();
        for m in 1..(1u32 << n) - 1 {
            if m & 1 == 0 {
                continue;
            }
            let (a, b): (Vec<_>, Vec<_>) = pairs.iter().enumerate().partition(|(k, _)| m >> k & 1 == 1);
            let mut taus: Vec<Tau> = rest().collect();
            taus.push((*rel, a.into_iter().map(|(_, p)| *p).collect()));
            taus.push((*rel, b.into_iter().map(|(_, p)| *p).collect()));
            out.push(hnode(taus));
        }
        // Step along an IND whose source covers the targets.
        for d in &set.deps {
            let Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs } = d else { continue };
            if lhs_rel != rel {
                continue;
            }
            let moved: Option<Vec<(AttrId, AttrId)>> =
                pairs.iter().map(|&(a, v)| lhs.iter().position(|&c| c == v).map(|p| (a, rhs[p]))).collect();
            if let Some(moved) = moved {
                let mut taus: Vec<Tau> = rest().collect();
                taus.push((*rhs_rel, moved));
                out.push(hnode(taus));
            }
        }
        // Merge through an IA covering both targets.
        for (j, (rel2, pairs2)) in node.iter().enumerate().skip(i + 1) {
            if rel != rel2 {
                continue;
            }
            let v0: AttrSet = pairs.iter().map(|p| p.1).collect();
            let v1: AttrSet = pairs2.iter().map(|p| p.1).collect();
            let covered = set.deps.iter().any(|d| match d {
                Dependency::Ia { rel: r, left, right } if r == rel => {
                    (v0.is_subset(left) && v1.is_subset(right)) || (v1.is_subset(left) && v0.is_subset(right))
                }
                _ => false,
            });
            if covered {
                let mut taus: Vec<Tau> = node.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, t)| t.clone()).collect();
                taus.push((*rel, pairs.iter().chain(pairs2).copied().collect()));
                out.push(hnode(taus));
            }
        }
    }
    let _ = schema;
    out
}

/// Reachability from the start node to the end node of `H_{Σ,σ}`, by lazy breadth-first search.
pub fn h_graph_reachable(set: &DependencySet, sigma: &Dependency) -> Result<bool> {
    h_graph_reachable_capped(set, sigma, HGRAPH_CAP)
}

pub fn h_graph_reachable_capped(set: &DependencySet, sigma: &Dependency, cap: usize) -> Result<bool> {
    require_disjoint(set)?;
    let (start, end) = match sigma {
        Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs } => (
            hnode(vec![(*lhs_rel, lhs.iter().map(|&a| (a, a)).collect())]),
            hnode(vec![(*rhs_rel, lhs.iter().copied().zip(rhs.iter().copied()).collect())]),
        ),
        Dependency::Ia { rel, left, right } if left.is_disjoint(right) => {
            if left.is_empty() || right.is_empty() {
                return Ok(true);
            }
            (
                hnode(vec![(*rel, left.iter().map(|a| (a, a)).collect()), (*rel, right.iter().map(|a| (a, a)).collect())]),
                hnode(vec![(*rel, left.union(right).iter().map(|a| (a, a)).collect())]),
            )
        }
        _ => return Err(Error::UnsupportedQuery("expected an IND or a disjoint IA".into())),
    };
    let mut seen: HashSet<HNode> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        if n == end {
            return Ok(true);
        }
        for m in neighbours(set, &n) {
            if seen.insert(m.clone()) {
                if seen.len() > cap {
                    return Err(Error::BudgetExceeded(seen.len()));
                }
                queue.push_back(m);
            }
        }
    }
    Ok(false)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let n = self.0[c];
            self.0[c] = r;
            c = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.0[hi] = lo;
        true
    }

    fn push(&mut self) {
        let n = self.0.len();
        self.0.push(n);
    }
}

/// Vertices with one union-find per attribute; `u` and `v` are `X`-connected when they share a
/// class in every attribute of `X`.
struct Graph {
    attrs: Vec<AttrId>,
    uf: Vec<UnionFind>,
    vertices: usize,
}

impl Graph {
    fn new(attrs: Vec<AttrId>) -> Self {
        let uf = attrs.iter().map(|_| UnionFind(Vec::new())).collect();
        Self { attrs, uf, vertices: 0 }
    }

    fn add_vertex(&mut self) -> usize {
        for u in &mut self.uf {
            u.push();
        }
        self.vertices += 1;
        self.vertices - 1
    }

    fn idx(&self, a: AttrId) -> usize {
        self.attrs.iter().position(|&b| b == a).expect("relation attribute")
    }

    fn key(&mut self, v: usize, x: &AttrSet) -> Vec<usize> {
        x.iter().map(|a| self.idx(a)).collect::<Vec<_>>().into_iter().map(|i| self.uf[i].find(v)).collect()
    }

    fn join(&mut self, u: usize, v: usize, x: &AttrSet) -> bool {
        let mut changed = false;
        for a in x.iter() {
            let i = self.idx(a);
            changed |= self.uf[i].union(u, v);
        }
        changed
    }

    fn connected(&mut self, u: usize, v: usize, x: &AttrSet) -> bool {
        self.key(u, x) == self.key(v, x)
    }

    fn to_database(&mut self, set: &DependencySet, rel: RelId) -> Database {
        let mut db = Database::new(set.schema.clone());
        for v in 0..self.vertices {
            let t = (0..self.attrs.len()).map(|i| self.uf[i].find(v) as Value).collect();
            db.relations[rel].insert(t);
        }
        db
    }
}

fn require_fd_ia(set: &DependencySet, sigma: &Dependency) -> Result<RelId> {
    if set.deps.iter().chain(Some(sigma)).any(Dependency::is_ind) {
        return Err(Error::NotFdIa);
    }
    let rels: BTreeSet<RelId> = set.deps.iter().chain(Some(sigma)).flat_map(Dependency::relations).collect();
    if rels.len() > 1 || set.schema.relations().len() > 1 {
        return Err(Error::NotUniRelational);
    }
    Ok(rels.into_iter().next().unwrap_or(0))
}

/// Unrestricted FD+IA implication by the graphical chase; may not terminate, so it is budgeted.
pub fn graph_chase_fd_ia(set: &DependencySet, sigma: &Dependency, budget: usize) -> Result<Verdict> {
    let rel = require_fd_ia(set, sigma)?;
    let schema = &set.schema;
    let mut g = Graph::new(schema.attrs_of(rel).to_vec());
    let (v0, v1) = (g.add_vertex(), g.add_vertex());
    let mut fds: Vec<(AttrSet, AttrSet)> = set
        .deps
        .iter()
        .filter_map(|d| match d {
            Dependency::Fd { lhs, rhs, .. } => Some((lhs.clone(), rhs.clone())),
            _ => None,
        })
        .collect();
    let ias: Vec<(AttrSet, AttrSet)> = set
        .deps
        .iter()
        .filter_map(|d| match d {
            Dependency::Ia { left, right, .. } if !left.is_empty() && !right.is_empty() => Some((left.clone(), right.clone())),
            _ => None,
        })
        .collect();
    for (l, r) in &ias {
        for a in l.intersection(r).iter() {
            fds.push((AttrSet::new(), AttrSet::singleton(a)));
        }
    }
    let seed = match sigma {
        Dependency::Fd { lhs, .. } => lhs.clone(),
        Dependency::Ia { .. } => AttrSet::new(),
        Dependency::Ind { .. } => return Err(Error::NotFdIa),
    };
    let label = fd_closure(&fds, &seed);
    g.join(v0, v1, &label);
    let reached = |g: &mut Graph| match sigma {
        Dependency::Fd { rhs, .. } => g.connected(v0, v1, rhs),
        Dependency::Ia { left, right, .. } => (0..g.vertices).any(|w| g.connected(w, v0, left) && g.connected(w, v1, right)),
        Dependency::Ind { .. } => unreachable!(),
    };
    complete(&mut g, &fds);
    let mut rounds = 0;
    loop {
        if reached(&mut g) {
            return Ok(Verdict::Implied(Evidence::Reason(format!(
                "graph chase connects the query vertices after {rounds} rounds with {} vertices",
                g.vertices
            ))));
        }
        // Rule (1) on a batch of missing combinations, oldest vertex pairs first. New vertices
        // only join classes rooted at older vertices, so keys stay valid until rule (2) runs.
        let batch = (g.vertices / 4).max(1);
        let mut added = false;
        for (x, y) in &ias {
            for (u, v) in missing_pairs(&mut g, x, y, batch) {
                if g.vertices >= budget {
                    return Ok(Verdict::Unknown(format!(
                        "graph chase exceeded {budget} vertices after {rounds} rounds"
                    )));
                }
                let w = g.add_vertex();
                g.join(u, w, x);
                g.join(v, w, y);
                added = true;
            }
        }
        complete(&mut g, &fds);
        if !added {
            let db = g.to_database(set, rel);
            return Ok(checked(set, sigma, db));
        }
        rounds += 1;
    }
}

/// Up to `limit` pairs `(u, v)` of class representatives with no vertex `X`-connected to `u` and
/// `Y`-connected to `v`, ordered by `(max(u, v), u, v)`.
fn missing_pairs(g: &mut Graph, x: &AttrSet, y: &AttrSet, limit: usize) -> Vec<(usize, usize)> {
    let mut xs: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut ys: HashMap<Vec<usize>, usize> = HashMap::new();
    let (mut xr, mut yr) = (Vec::new(), Vec::new());
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    for w in 0..g.vertices {
        let n = xs.len();
        let i = *xs.entry(g.key(w, x)).or_insert_with(|| {
            xr.push(w);
            n
        });
        let n = ys.len();
        let j = *ys.entry(g.key(w, y)).or_insert_with(|| {
            yr.push(w);
            n
        });
        seen.insert((i, j));
    }
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while out.len() < limit && (i < xr.len() || j < yr.len()) {
        let m = xr.get(i).copied().unwrap_or(usize::MAX).min(yr.get(j).copied().unwrap_or(usize::MAX));
        if yr.get(j) == Some(&m) {
            for (a, &u) in xr.iter().enumerate().take_while(|&(_, &u)| u < m) {
                if out.len() < limit && !seen.contains(&(a, j)) {
                    out.push((u, m));
                }
            }
        }
        if xr.get(i) == Some(&m) {
            for (b, &v) in yr.iter().enumerate().take_while(|&(_, &v)| v <= m) {
                if out.len() < limit && !seen.contains(&(i, b)) {
                    out.push((m, v));
                }
            }
            i += 1;
        }
        if yr.get(j) == Some(&m) {
            j += 1;
        }
    }
    out
}

/// Rule (2): joins `V`-classes of vertices that are `U`-connected, for every `U→V`, to a fixpoint.
fn complete(g: &mut Graph, fds: &[(AttrSet, AttrSet)]) {
    loop {
        let mut round = false;
        for (u, v) in fds {
            let mut groups: HashMap<Vec<usize>, usize> = HashMap::new();
            for w in 0..g.vertices {
                let k = g.key(w, u);
                match groups.get(&k) {
                    Some(&first) => round |= g.join(first, w, v),
                    None => {
                        groups.insert(k, w);
                    }
                }
            }
        }
        if !round {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_dependency, parse_spec};
    use crate::semantics::{find_counterexample, OracleBounds, OracleOutcome};

    fn setup(spec: &str, q: &str) -> (DependencySet, Dependency) {
        let set = parse_spec(spec).unwrap();
        let d = parse_dependency(q, &set.schema).unwrap();
        (set, d)
    }

    const HEART: &str = "schema Disorder(d_id, p_id2, t_id2)\nschema Heart(p_id, t_id)\nia Heart: p_id _|_ t_id\nind Disorder[p_id2] <= Heart[p_id]\nind Disorder[t_id2] <= Heart[t_id]";

    #[test]
    fn concatenation_by_chase_and_h_graph() {
        let (set, q) = setup(HEART, "ind Disorder[p_id2,t_id2] <= Heart[p_id,t_id]");
        let v = imply_ind_ia(&set, &q).unwrap();
        let Verdict::Implied(Evidence::Chase(t)) = &v else { panic!("{v:?}") };
        assert!(t.replay().is_some());
        assert!(h_graph_reachable(&set, &q).unwrap());
        let no_ia = set.with(set.deps[1..].to_vec());
        assert!(imply_ind_ia(&no_ia, &q).unwrap().not_implied());
        assert!(!h_graph_reachable(&no_ia, &q).unwrap());
    }

    #[test]
    fn constancy_closure_examples() {
        let set = parse_spec("schema R(A,X,Y)\nia R: A X _|_ A Y").unwrap();
        assert!(uind_ca_closure(&set).unwrap().constants.contains(0));
        let set = parse_spec("schema R(C)\nschema S(D)\nind R[C] <= S[D]\nia S: D _|_ D").unwrap();
        let cl = uind_ca_closure(&set).unwrap();
        assert_eq!(cl.constants, AttrSet::from([0, 1]));
        assert!(cl.uinds().contains(&(1, 0)));
        let set = parse_spec("schema R(A)\nschema S(B)\nind R[A] <= S[B]").unwrap();
        assert!(uind_ca_closure(&set).unwrap().constants.is_empty());
    }

    #[test]
    fn reduction_removes_constants() {
        let (set, q) = setup("schema R(A,B)\nia R: A _|_ A\nia R: A _|_ B", "ia R: B _|_ A");
        let Reduction::Ia { sigma0, query } = reduce_ca(&set, &q).unwrap() else { panic!() };
        assert_eq!(query, Dependency::ia(0, [1], []));
        assert!(sigma0.deps.contains(&Dependency::ia(0, [], [1])));
        assert!(imply_ind_ia(&set, &q).unwrap().implied());
    }

    #[test]
    fn chase_examples() {
        let (set, q) = setup("schema R(A,B,C)\nia R: A _|_ B C", "ia R: A _|_ B");
        assert!(chase_dia(&set, &q).unwrap().implied());
        let (set, q) = setup("schema R(A,B)", "ia R: A _|_ B");
        let v = chase_dia(&set, &q).unwrap();
        assert_eq!(v.witness().unwrap().total_tuples(), 2);
        let (set, q) = setup("schema R(X,U,Y,V)\nia R: X U _|_ Y V\nia R: X _|_ U\nia R: Y _|_ V", "ia R: X Y _|_ U V");
        assert!(chase_dia(&set, &q).unwrap().implied());
        let (set, q) = setup("schema R(A)", "ind R[A] <= R[A]");
        assert!(chase_ind(&set, &q).unwrap().implied());
    }

    #[test]
    fn constancy_queries() {
        let (set, q) = setup("schema R(A)\nschema S(B)\nind R[A] <= S[B]\nia S: B _|_ B", "ia R: A _|_ A");
        assert!(imply_ind_ia(&set, &q).unwrap().implied());
        let (set, q) = setup("schema R(A,B)\nia R: A _|_ B", "ia R: A _|_ A");
        let v = imply_ind_ia(&set, &q).unwrap();
        assert_eq!(v.witness().unwrap().total_tuples(), 4);
    }

    #[test]
    fn constants_feeding_inds_keep_witnesses_valid() {
        let (set, q) = setup(
            "schema R(A,B,C)\nschema S(D,E)\nia R: A _|_ A\nind R[A,B] <= S[D,E]\nia S: D _|_ E\nia R: B _|_ C",
            "ind S[D,E] <= R[A,B]",
        );
        let v = imply_ind_ia(&set, &q).unwrap();
        let o = find_counterexample(&set, &q, OracleBounds::new(4, 3)).unwrap();
        assert_eq!(v.implied(), matches!(o, OracleOutcome::NoCounterexampleFound), "{v:?}");
        let q = parse_dependency("ia S: D _|_ E", &set.schema).unwrap();
        assert!(imply_ind_ia(&set, &q).unwrap().implied());
        let q = parse_dependency("ia R: B _|_ A C", &set.schema).unwrap();
        assert!(imply_ind_ia(&set, &q).unwrap().implied());
    }

    #[test]
    fn graph_chase_section_seven_example() {
        let (set, q) = setup(
            "schema R(A,B,C,D,E,X)\nia R: B _|_ C D\nia R: D _|_ A E\nia R: B C _|_ A D E\nfd R: A B -> X\nfd R: C D E -> X",
            "fd R: A -> X",
        );
        assert!(graph_chase_fd_ia(&set, &q, 50).unwrap().implied());
        let (set, q) = setup("schema R(X,Y)", "fd R: X Y -> Y");
        assert!(graph_chase_fd_ia(&set, &q, 10).unwrap().implied());
        let (set, q) = setup("schema R(A,B,C)\nia R: A _|_ B\nfd R: A -> C", "fd R: B -> C");
        assert!(graph_chase_fd_ia(&set, &q, 100).unwrap().witness().is_some());
    }
}
