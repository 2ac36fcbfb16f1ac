//! Polynomial engines: attribute closure, the FD+IA preprocessing pass, the red/black graph
//! for unary FDs, unary INDs and IAs, and the singlevalued span.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde_json::json;

use crate::armstrong;
use crate::chase::chase_dia;
use crate::error::{Error, Result};
use crate::model::{AttrId, AttrSet, DatabaseSchema, Dependency, DependencySet, Mode, RelId};
use crate::semantics::{satisfies, satisfies_all};
use crate::verdict::{Evidence, Refutation, Verdict};

/// Relations with more attributes than this get a certificate instead of a counterexample.
pub const WITNESS_ATTRS: usize = 8;

/// `{A : Σ ⊨ X→A}` by counting unsatisfied left-hand-side attributes.
pub fn fd_closure(fds: &[(AttrSet, AttrSet)], x: &AttrSet) -> AttrSet {
    let mut missing: Vec<usize> = fds.iter().map(|(l, _)| l.len()).collect();
    let mut waiting: HashMap<AttrId, Vec<usize>> = HashMap::new();
    for (i, (l, _)) in fds.iter().enumerate() {
        for a in l {
            waiting.entry(a).or_default().push(i);
        }
    }
    let mut out = x.clone();
    let mut queue: Vec<AttrId> = x.to_vec();
    for (i, (_, r)) in fds.iter().enumerate() {
        if missing[i] == 0 {
            queue.extend(r.iter().filter(|&b| out.insert(b)));
        }
    }
    while let Some(a) = queue.pop() {
        for &i in waiting.get(&a).into_iter().flatten() {
            missing[i] -= 1;
            if missing[i] == 0 {
                for b in &fds[i].1 {
                    if out.insert(b) {
                        queue.push(b);
                    }
                }
            }
        }
    }
    out
}

fn fd_pairs(set: &DependencySet) -> Vec<(AttrSet, AttrSet)> {
    set.fds()
        .filter_map(|d| match d {
            Dependency::Fd { lhs, rhs, .. } => Some((lhs.clone(), rhs.clone())),
            _ => None,
        })
        .collect()
}

/// The single relation that `Σ` (and `σ`) speak about.
pub(crate) fn sole_relation(set: &DependencySet, sigma: Option<&Dependency>) -> Result<RelId> {
    let rels: BTreeSet<RelId> = set.deps.iter().chain(sigma).flat_map(Dependency::relations).collect();
    match rels.len() {
        0 => Ok(0),
        1 => Ok(rels.into_iter().next().unwrap()),
        _ => Err(Error::NotUniRelational),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgOneResult {
    pub z: AttrSet,
    /// `Xᵢ⊥Yᵢ`, one per input IA and in input order.
    pub ia_star: Vec<Dependency>,
    /// `Σ_FD ∪ {∅→Z}`.
    pub fd_star: Vec<Dependency>,
}

impl AlgOneResult {
    pub fn to_json(&self, schema: &DatabaseSchema) -> serde_json::Value {
        let sides = |d: &Dependency| match d {
            Dependency::Ia { left, right, .. } => json!([schema.names(left), schema.names(right)]),
            _ => json!(null),
        };
        json!({
            "Z": schema.names(&self.z),
            "iaStar": self.ia_star.iter().map(sides).collect::<Vec<_>>(),
            "fdStar": self.fd_star.iter().map(|d| d.show(schema).to_string()).collect::<Vec<_>>(),
        })
    }
}

pub fn algorithm1(set: &DependencySet) -> Result<AlgOneResult> {
    if set.inds().next().is_some() {
        return Err(Error::NotFdIa);
    }
    let rel = sole_relation(set, None)?;
    let fds = fd_pairs(set);
    let mut sides: Vec<(AttrSet, AttrSet)> = set
        .ias()
        .filter_map(|d| match d {
            Dependency::Ia { left, right, .. } => Some((left.clone(), right.clone())),
            _ => None,
        })
        .collect();
    let mut v = AttrSet::new();
    loop {
        let z = v.clone();
        for (x, y) in &mut sides {
            *x = fd_closure(&fds, &x.union(&v));
            *y = fd_closure(&fds, &y.union(&v));
            v.extend(x.intersection(y).iter());
        }
        if z == v {
            break;
        }
    }
    let mut fd_star: Vec<Dependency> = set.fds().cloned().collect();
    if !v.is_empty() {
        fd_star.push(Dependency::fd(rel, AttrSet::new(), v.clone()));
    }
    let ia_star = sides.into_iter().map(|(x, y)| Dependency::ia(rel, x, y)).collect();
    Ok(AlgOneResult { z: v, ia_star, fd_star })
}

/// Dense bit rows for reachability.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize) -> bool {
        let was = self.get(i);
        self.0[i / 64] |= 1 << (i % 64);
        !was
    }
}

/// Nodes are the positions of one relation; `red[a]` holds `b` for `A→B`, `black[a]` holds `b`
/// for `B⊆A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    pub attrs: Vec<AttrId>,
    pub red: Vec<BTreeSet<usize>>,
    pub black: Vec<BTreeSet<usize>>,
    /// Component number per node, descendants numbered lower; finite mode only.
    pub scc: Option<Vec<usize>>,
}

impl ColoredGraph {
    fn len(&self) -> usize {
        self.attrs.len()
    }

    fn reach(&self, from: usize, red: bool, black: bool) -> Bits {
        let mut seen = Bits::new(self.len());
        seen.set(from);
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            let r = self.red[x].iter().filter(|_| red);
            let b = self.black[x].iter().filter(|_| black);
            for &y in r.chain(b) {
                if seen.set(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Strongly connected components of the uncoloured graph, in reverse topological order.
    pub fn components(&self) -> Vec<usize> {
        struct Tarjan<'a> {
            g: &'a ColoredGraph,
            index: Vec<Option<usize>>,
            low: Vec<usize>,
            on: Vec<bool>,
            stack: Vec<usize>,
            next: usize,
            comp: Vec<usize>,
            ncomp: usize,
        }
        impl Tarjan<'_> {
            fn visit(&mut self, v: usize) {
                self.index[v] = Some(self.next);
                self.low[v] = self.next;
                self.next += 1;
                self.stack.push(v);
                self.on[v] = true;
                let succ: Vec<usize> = self.g.red[v].iter().chain(&self.g.black[v]).copied().collect();
                for w in succ {
                    match self.index[w] {
                        None => {
                            self.visit(w);
                            self.low[v] = self.low[v].min(self.low[w]);
                        }
                        Some(i) if self.on[w] => self.low[v] = self.low[v].min(i),
                        _ => {}
                    }
                }
                if Some(self.low[v]) == self.index[v] {
                    while let Some(w) = self.stack.pop() {
                        self.on[w] = false;
                        self.comp[w] = self.ncomp;
                        if w == v {
                            break;
                        }
                    }
                    self.ncomp += 1;
                }
            }
        }
        let n = self.len();
        let mut t = Tarjan {
            g: self,
            index: vec![None; n],
            low: vec![0; n],
            on: vec![false; n],
            stack: Vec::new(),
            next: 0,
            comp: vec![0; n],
            ncomp: 0,
        };
        for v in 0..n {
            if t.index[v].is_none() {
                t.visit(v);
            }
        }
        t.comp
    }

    fn symmetrize(&mut self, keep: impl Fn(usize, usize) -> bool) {
        for edges in [&mut self.red, &mut self.black] {
            let mut add = Vec::new();
            for (a, bs) in edges.iter().enumerate() {
                add.extend(bs.iter().filter(|&&b| keep(a, b)).map(|&b| (b, a)));
            }
            for (b, a) in add {
                edges[b].insert(a);
            }
        }
    }
}

/// The closed red/black graph with `Z` and `Σ_IA*`, answering queries by reachability.
#[derive(Clone, Debug)]
pub struct StarClosure {
    pub rel: RelId,
    pub mode: Mode,
    pub graph: ColoredGraph,
    pub z: AttrSet,
    /// `(Xᵢ, Yᵢ)`; the constancy atom `Z⊥Z` is implicit.
    pub ia_star: Vec<(AttrSet, AttrSet)>,
    /// Number of passes over the IA and `Z` steps that changed something.
    pub passes: usize,
    schema: std::sync::Arc<DatabaseSchema>,
    red_reach: Vec<Bits>,
    black_reach: Vec<Bits>,
}

fn require_star(set: &DependencySet, sigma: Option<&Dependency>) -> Result<RelId> {
    let rel = sole_relation(set, sigma)?;
    for d in set.deps.iter().chain(sigma) {
        let unary = match d {
            Dependency::Fd { lhs, .. } => lhs.len() <= 1,
            Dependency::Ind { lhs, .. } => lhs.len() <= 1,
            Dependency::Ia { .. } => true,
        };
        if !unary {
            return Err(Error::NotUnary);
        }
    }
    Ok(rel)
}

pub fn build_star_closure(set: &DependencySet, mode: Mode) -> Result<StarClosure> {
    star_closure_for(set, None, mode)
}

fn star_closure_for(set: &DependencySet, sigma: Option<&Dependency>, mode: Mode) -> Result<StarClosure> {
    let rel = require_star(set, sigma)?;
    let schema = &set.schema;
    let attrs = schema.attrs_of(rel).to_vec();
    let n = attrs.len();
    let pos = |a: AttrId| schema.position(a);
    let mut g = ColoredGraph { attrs: attrs.clone(), red: vec![BTreeSet::new(); n], black: vec![BTreeSet::new(); n], scc: None };
    let mut z0 = Bits::new(n);
    let mut ias = Vec::new();
    for d in &set.deps {
        match d {
            Dependency::Fd { lhs, rhs, .. } => match lhs.first() {
                Some(a) => g.red[pos(a)].extend(rhs.iter().map(pos)),
                None => rhs.iter().for_each(|b| {
                    z0.set(pos(b));
                }),
            },
            Dependency::Ind { lhs, rhs, .. } => {
                if let (Some(&a), Some(&b)) = (lhs.first(), rhs.first()) {
                    g.black[pos(b)].insert(pos(a));
                }
            }
            Dependency::Ia { left, right, .. } => {
                ias.push((left.iter().map(pos).collect::<Vec<_>>(), right.iter().map(pos).collect::<Vec<_>>()))
            }
        }
    }
    if mode == Mode::Finite {
        let comp = g.components();
        g.symmetrize(|a, b| comp[a] == comp[b]);
    }
    let mut z = z0;
    let mut sides: Vec<(Bits, Bits)> = Vec::new();
    let mut passes = 0;
    loop {
        let before = z.clone();
        sides.clear();
        for (u, v) in &ias {
            let close = |seed: &[usize]| {
                let mut acc = Bits::new(n);
                for &a in seed {
                    for (w, bits) in g.reach(a, true, false).0.iter().enumerate() {
                        acc.0[w] |= bits;
                    }
                }
                acc
            };
            let (x, y) = (close(u), close(v));
            for i in 0..n {
                if x.get(i) && y.get(i) {
                    z.set(i);
                }
            }
            sides.push((x, y));
        }
        let mut stack: Vec<usize> = (0..n).filter(|&i| z.get(i)).collect();
        while let Some(a) = stack.pop() {
            for &b in g.red[a].iter().chain(&g.black[a]) {
                if z.set(b) {
                    stack.push(b);
                }
            }
        }
        let zz = z.clone();
        g.symmetrize(|a, b| zz.get(a) && zz.get(b));
        if z == before {
            break;
        }
        passes += 1;
    }
    if mode == Mode::Finite {
        g.scc = Some(g.components());
    }
    let to_set = |b: &Bits| (0..n).filter(|&i| b.get(i)).map(|i| attrs[i]).collect::<AttrSet>();
    let red_reach = (0..n).map(|a| g.reach(a, true, false)).collect();
    let black_reach = (0..n).map(|a| g.reach(a, false, true)).collect();
    Ok(StarClosure {
        rel,
        mode,
        z: to_set(&z),
        ia_star: sides.iter().map(|(x, y)| (to_set(x), to_set(y))).collect(),
        graph: g,
        passes,
        schema: set.schema.clone(),
        red_reach,
        black_reach,
    })
}

impl StarClosure {
    fn pos(&self, a: AttrId) -> usize {
        self.schema.position(a)
    }

    /// `Σ* ∋ A→B`.
    pub fn fd(&self, a: Option<AttrId>, b: AttrId) -> bool {
        self.z.contains(b) || a.is_some_and(|a| a == b || self.red_reach[self.pos(a)].get(self.pos(b)))
    }

    /// `Σ* ∋ A⊆B`.
    pub fn uind(&self, a: AttrId, b: AttrId) -> bool {
        a == b || self.black_reach[self.pos(b)].get(self.pos(a))
    }

    /// `A⁺`: everything `A` determines, constants included.
    pub fn plus(&self, a: AttrId) -> AttrSet {
        let p = self.pos(a);
        self.graph.attrs.iter().copied().filter(|&b| self.z.contains(b) || self.red_reach[p].get(self.pos(b))).collect()
    }

    pub fn schema(&self) -> std::sync::Arc<DatabaseSchema> {
        self.schema.clone()
    }

    pub(crate) fn red_local(&self, i: usize, j: usize) -> bool {
        self.red_reach[i].get(j)
    }

    pub(crate) fn black_local(&self, i: usize, j: usize) -> bool {
        self.black_reach[i].get(j)
    }

    pub fn non_constants(&self) -> AttrSet {
        self.graph.attrs.iter().copied().filter(|&a| !self.z.contains(a)).collect()
    }

    /// `Σ_IA*↾R′` as a dependency set over the original schema, `R′ = R\Z`.
    pub fn restricted_ias(&self) -> DependencySet {
        let deps = self
            .ia_star
            .iter()
            .map(|(x, y)| Dependency::ia(self.rel, x.difference(&self.z), y.difference(&self.z)))
            .filter(|d| matches!(d, Dependency::Ia { left, right, .. } if !left.is_empty() && !right.is_empty()))
            .collect();
        DependencySet { schema: self.schema.clone(), deps }
    }

    /// Decides `X⊥Y` by removing constants and chasing the restricted atoms.
    pub fn ia(&self, x: &AttrSet, y: &AttrSet) -> Result<Verdict> {
        let (x2, y2) = (x.difference(&self.z), y.difference(&self.z));
        if !x2.is_disjoint(&y2) {
            let a = x2.intersection(&y2).first().unwrap();
            return Ok(Verdict::NotImplied(Refutation::Certificate(format!(
                "{} is not constant",
                self.schema.attr_name(a)
            ))));
        }
        if x2.is_empty() || y2.is_empty() {
            return Ok(Verdict::Implied(Evidence::Reason(format!(
                "trivial once the constants {{{}}} are removed",
                self.schema.names(&self.z).join(" ")
            ))));
        }
        chase_dia(&self.restricted_ias(), &Dependency::ia(self.rel, x2, y2))
    }

    /// Membership in `Σ*`, with evidence when implied.
    pub fn decide(&self, sigma: &Dependency) -> Result<Verdict> {
        let schema = &self.schema;
        let no = || Ok(Verdict::NotImplied(Refutation::Certificate(format!("{} is not in the closure", sigma.show(schema)))));
        match sigma {
            Dependency::Fd { lhs, rhs, .. } => {
                if lhs.len() > 1 {
                    return Err(Error::NotUnary);
                }
                let a = lhs.first();
                if !rhs.iter().all(|b| self.fd(a, b)) {
                    return no();
                }
                let why: Vec<String> = rhs
                    .iter()
                    .map(|b| match a {
                        _ if self.z.contains(b) => format!("{} is constant", schema.attr_name(b)),
                        Some(a) => self.path(a, b, true).join(" -> "),
                        None => unreachable!(),
                    })
                    .collect();
                Ok(Verdict::Implied(Evidence::Reason(why.join("; "))))
            }
            Dependency::Ind { lhs, rhs, .. } => {
                if lhs.len() > 1 {
                    return Err(Error::NotUnary);
                }
                let (Some(&a), Some(&b)) = (lhs.first(), rhs.first()) else {
                    return Ok(Verdict::Implied(Evidence::Reason("empty inclusion".into())));
                };
                if !self.uind(a, b) {
                    return no();
                }
                Ok(Verdict::Implied(Evidence::Reason(format!("black path {}", self.path(b, a, false).join(" -> ")))))
            }
            Dependency::Ia { left, right, .. } => self.ia(left, right),
        }
    }

    fn path(&self, from: AttrId, to: AttrId, red: bool) -> Vec<String> {
        let (s, t) = (self.pos(from), self.pos(to));
        let mut parent: Vec<Option<usize>> = vec![None; self.graph.len()];
        let mut queue = VecDeque::from([s]);
        parent[s] = Some(s);
        while let Some(x) = queue.pop_front() {
            let edges = if red { &self.graph.red[x] } else { &self.graph.black[x] };
            for &y in edges {
                if parent[y].is_none() {
                    parent[y] = Some(x);
                    queue.push_back(y);
                }
            }
        }
        let mut out = vec![t];
        let mut c = t;
        while c != s {
            match parent[c] {
                Some(p) => {
                    c = p;
                    out.push(c);
                }
                None => break,
            }
        }
        out.iter().rev().map(|&i| self.schema.attr_name(self.graph.attrs[i]).to_string()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let schema = &self.schema;
        let name = |i: usize| schema.attr_name(self.graph.attrs[i]).to_string();
        let edges = |adj: &[BTreeSet<usize>]| {
            adj.iter()
                .enumerate()
                .flat_map(|(a, bs)| bs.iter().filter(move |&&b| b != a).map(move |&b| (a, b)))
                .map(|(a, b)| json!([name(a), name(b)]))
                .collect::<Vec<_>>()
        };
        json!({
            "mode": self.mode.to_string(),
            "relation": schema.rel_name(self.rel),
            "Z": schema.names(&self.z),
            "iaStar": self.ia_star.iter().map(|(x, y)| json!([schema.names(x), schema.names(y)])).collect::<Vec<_>>(),
            "red": edges(&self.graph.red),
            "black": edges(&self.graph.black),
            "scc": self.graph.scc.as_ref().map(|c| {
                (0..c.len()).map(|i| json!([name(i), c[i]])).collect::<Vec<_>>()
            }),
        })
    }
}

/// Implication for unary FDs, unary INDs and IAs over one relation, in either mode.
pub fn imply_star(set: &DependencySet, sigma: &Dependency, mode: Mode) -> Result<Verdict> {
    sigma.check(&set.schema)?;
    let sc = star_closure_for(set, Some(sigma), mode)?;
    let v = sc.decide(sigma)?;
    if !v.not_implied() {
        return Ok(v);
    }
    Ok(refute_star(set, sigma, &sc, mode))
}

/// A finite counterexample from the Armstrong constructions, when the relation is small enough.
fn refute_star(set: &DependencySet, sigma: &Dependency, sc: &StarClosure, mode: Mode) -> Verdict {
    let cert = |why: String| Verdict::NotImplied(Refutation::Certificate(why));
    if sc.graph.len() > WITNESS_ATTRS {
        return cert(format!("{} is outside the closure", sigma.show(&set.schema)));
    }
    let fin = match mode {
        Mode::Finite => sc.clone(),
        Mode::Unrestricted => match build_star_closure(set, Mode::Finite) {
            Ok(f) => f,
            Err(e) => return Verdict::Unknown(e.to_string()),
        },
    };
    if mode == Mode::Unrestricted && fin.decide(sigma).map(|v| v.implied()).unwrap_or(false) {
        return cert(format!(
            "{} holds in every finite model (cycle rules) but not in all models",
            sigma.show(&set.schema)
        ));
    }
    match armstrong::star_relation(set, sigma, &fin) {
        Ok(db) if satisfies_all(&db, set) && !satisfies(&db, sigma) => Verdict::refuted_by(db),
        Ok(_) => Verdict::Unknown("Armstrong relation failed its self-check".into()),
        Err(e) => cert(format!("{} is outside the closure ({e})", sigma.show(&set.schema))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanResult {
    /// The singlevalued span: attributes forced constant.
    pub y: AttrSet,
    /// `Σ″`: the input UINDs plus `A⊆B` for each `B⊆A` whose superset side is in `Y`.
    pub extended_uinds: Vec<Dependency>,
    /// `Δ″`: a constancy atom for each attribute of `Y`.
    pub extended_cas: Vec<Dependency>,
}

/// Unary projections of the INDs of `Σ`, as `(lhs, rhs)` attribute pairs.
fn uind_pairs(set: &DependencySet) -> Vec<(AttrId, AttrId)> {
    let mut out = Vec::new();
    for d in set.inds() {
        if let Dependency::Ind { lhs, rhs, .. } = d {
            out.extend(lhs.iter().copied().zip(rhs.iter().copied()));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Constancy seeds (overlaps of IAs, `∅→A`) closed backwards along inclusions.
pub fn singlevalued_span(set: &DependencySet) -> SpanResult {
    let schema = &set.schema;
    let mut y = AttrSet::new();
    for d in &set.deps {
        match d {
            Dependency::Ia { left, right, .. } => y.extend(left.intersection(right).iter()),
            Dependency::Fd { lhs, rhs, .. } if lhs.is_empty() => y.extend(rhs.iter()),
            _ => {}
        }
    }
    let pairs = uind_pairs(set);
    let mut into: HashMap<AttrId, Vec<AttrId>> = HashMap::new();
    for &(a, b) in &pairs {
        into.entry(b).or_default().push(a);
    }
    let mut stack = y.to_vec();
    while let Some(b) = stack.pop() {
        for &a in into.get(&b).into_iter().flatten() {
            if y.insert(a) {
                stack.push(a);
            }
        }
    }
    let mut extended_uinds: Vec<Dependency> = pairs
        .iter()
        .map(|&(a, b)| Dependency::ind(schema.relation_of(a), vec![a], schema.relation_of(b), vec![b]))
        .collect();
    for &(b, a) in &pairs {
        if y.contains(a) {
            let d = Dependency::ind(schema.relation_of(a), vec![a], schema.relation_of(b), vec![b]);
            if !extended_uinds.contains(&d) {
                extended_uinds.push(d);
            }
        }
    }
    let extended_cas = y.iter().map(|a| Dependency::ca(schema.relation_of(a), a)).collect();
    SpanResult { y, extended_uinds, extended_cas }
}

/// Linear-time decision of a UIND or CA query over IND+IA.
pub fn uind_ca_implies(set: &DependencySet, sigma: &Dependency) -> Result<bool> {
    if set.fds().next().is_some() {
        return Err(Error::NotIndIa);
    }
    sigma.check(&set.schema)?;
    let span = singlevalued_span(set);
    match sigma {
        Dependency::Ia { left, right, .. } if left == right && left.len() == 1 => Ok(span.y.contains(left.first().unwrap())),
        Dependency::Ind { lhs, rhs, .. } if lhs.len() == 1 => {
            let (a, b) = (lhs[0], rhs[0]);
            let mut succ: HashMap<AttrId, Vec<AttrId>> = HashMap::new();
            for d in &span.extended_uinds {
                if let Dependency::Ind { lhs, rhs, .. } = d {
                    succ.entry(lhs[0]).or_default().push(rhs[0]);
                }
            }
            let mut seen = AttrSet::singleton(a);
            let mut stack = vec![a];
            while let Some(x) = stack.pop() {
                if x == b {
                    return Ok(true);
                }
                for &w in succ.get(&x).into_iter().flatten() {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            Ok(false)
        }
        Dependency::Ind { lhs, .. } if lhs.is_empty() => Ok(true),
        _ => Err(Error::UnsupportedQuery("expected a unary inclusion or a constancy atom".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_dependency, parse_spec};

    fn setup(spec: &str, q: &str) -> (DependencySet, Dependency) {
        let set = parse_spec(spec).unwrap();
        let d = parse_dependency(q, &set.schema).unwrap();
        (set, d)
    }

    #[test]
    fn closure_examples() {
        let s = |v: &[AttrId]| v.iter().copied().collect::<AttrSet>();
        let fds = vec![(s(&[0]), s(&[1])), (s(&[1]), s(&[2]))];
        assert_eq!(fd_closure(&fds, &s(&[0])), s(&[0, 1, 2]));
        assert_eq!(fd_closure(&[], &s(&[0, 1])), s(&[0, 1]));
        assert_eq!(fd_closure(&[(s(&[0, 1]), s(&[2]))], &s(&[0])), s(&[0]));
        assert_eq!(fd_closure(&[(AttrSet::new(), s(&[2]))], &AttrSet::new()), s(&[2]));
    }

    #[test]
    fn algorithm1_examples() {
        let set = parse_spec("schema R(A,B,C)\nia R: A _|_ B\nfd R: A -> C\nfd R: B -> C").unwrap();
        let r = algorithm1(&set).unwrap();
        assert_eq!(r.z, AttrSet::singleton(2));
        assert_eq!(r.ia_star, vec![Dependency::ia(0, [0, 2], [1, 2])]);
        assert_eq!(r.to_json(&set.schema)["iaStar"], json!([[["A", "C"], ["B", "C"]]]));
        let set = parse_spec("schema R(A,B)\nia R: A _|_ A").unwrap();
        assert_eq!(algorithm1(&set).unwrap().z, AttrSet::singleton(0));
    }

    #[test]
    fn cycle_separates_modes() {
        let set = parse_spec("schema R(A,B)\nfd R: A -> B\nind R[A] <= R[B]").unwrap();
        for q in ["ind R[B] <= R[A]", "fd R: B -> A"] {
            let q = parse_dependency(q, &set.schema).unwrap();
            assert!(imply_star(&set, &q, Mode::Finite).unwrap().implied());
            let v = imply_star(&set, &q, Mode::Unrestricted).unwrap();
            assert!(matches!(v, Verdict::NotImplied(Refutation::Certificate(_))), "{v:?}");
        }
        let un = build_star_closure(&set, Mode::Unrestricted).unwrap();
        assert!(un.graph.red[0].contains(&1) && un.graph.black[1].contains(&0));
        assert!(un.graph.red[1].is_empty() && un.graph.black[0].is_empty());
    }

    #[test]
    fn star_queries() {
        let (set, q) = setup("schema R(A,B,C)\nfd R: A -> B\nia R: B _|_ C", "ia R: A _|_ C");
        for m in [Mode::Finite, Mode::Unrestricted] {
            let v = imply_star(&set, &q, m).unwrap();
            assert!(v.witness().is_some(), "{v:?}");
        }
        let (set, q) = setup("schema R(X,Y,A,B)\nia R: X _|_ Y A\nfd R: A -> B", "ia R: X _|_ Y A B");
        assert!(imply_star(&set, &q, Mode::Finite).unwrap().implied());
        let (set, q) = setup("schema R(A,B)\nfd R: -> A", "fd R: B -> A");
        assert!(imply_star(&set, &q, Mode::Finite).unwrap().implied());
        assert!(build_star_closure(&set, Mode::Finite).unwrap().z.contains(0));
    }

    #[test]
    fn span_examples() {
        let set = parse_spec("schema R(A,B)\nia R: A _|_ A\nind R[B] <= R[A]").unwrap();
        assert_eq!(singlevalued_span(&set).y, AttrSet::from([0, 1]));
        let set = parse_spec("schema R(A,B)\nia R: A _|_ A\nind R[A] <= R[B]").unwrap();
        let span = singlevalued_span(&set);
        assert_eq!(span.y, AttrSet::singleton(0));
        assert_eq!(span.extended_uinds.len(), 1);
        let set = parse_spec("schema R(A,B)\nind R[A] <= R[B]").unwrap();
        assert!(singlevalued_span(&set).y.is_empty());
    }

    #[test]
    fn uind_ca_examples() {
        let (set, q) = setup("schema R(C)\nschema S(D)\nind R[C] <= S[D]\nia S: D _|_ D", "ind S[D] <= R[C]");
        assert!(uind_ca_implies(&set, &q).unwrap());
        assert!(uind_ca_implies(&set, &parse_dependency("ia R: C _|_ C", &set.schema).unwrap()).unwrap());
        let (set, q) = setup("schema R(A)\nschema S(B)\nind R[A] <= S[B]", "ind S[B] <= R[A]");
        assert!(!uind_ca_implies(&set, &q).unwrap());
    }
}
