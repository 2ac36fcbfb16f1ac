//! Inference rules, bounded derivation search and deduction checking.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AttrId, AttrSet, DatabaseSchema, Dependency, DependencySet, RelId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    I1,
    I2,
    I3,
    I4,
    I5,
    F1,
    F2,
    F3,
    FI1,
    FI2,
    U1,
    U2,
    U3,
    UI1,
    UI2,
    UI3,
    UI4,
    UI5,
    /// Reverses an alternating cycle of `n` unary FDs and `n` unary INDs.
    Cycle(usize),
}

impl Rule {
    pub const TABLE: [Rule; 18] = [
        Rule::I1,
        Rule::I2,
        Rule::I3,
        Rule::I4,
        Rule::I5,
        Rule::F1,
        Rule::F2,
        Rule::F3,
        Rule::FI1,
        Rule::FI2,
        Rule::U1,
        Rule::U2,
        Rule::U3,
        Rule::UI1,
        Rule::UI2,
        Rule::UI3,
        Rule::UI4,
        Rule::UI5,
    ];

    pub fn arity(self) -> usize {
        match self {
            Rule::I1 | Rule::F1 | Rule::U1 => 0,
            Rule::I2 | Rule::I3 | Rule::F3 | Rule::U3 => 1,
            Rule::I4 | Rule::I5 | Rule::F2 | Rule::FI1 | Rule::FI2 | Rule::U2 | Rule::UI3 | Rule::UI4 => 2,
            Rule::UI1 | Rule::UI2 => 3,
            Rule::UI5 => 4,
            Rule::Cycle(n) => 2 * n,
        }
    }

    pub fn name(self) -> String {
        let s = match self {
            Rule::I1 => "trivial independence",
            Rule::I2 => "symmetry",
            Rule::I3 => "decomposition",
            Rule::I4 => "exchange",
            Rule::I5 => "weak composition",
            Rule::F1 => "reflexivity",
            Rule::F2 => "transitivity",
            Rule::F3 => "augmentation",
            Rule::FI1 => "constancy",
            Rule::FI2 => "composition",
            Rule::U1 => "reflexivity",
            Rule::U2 => "transitivity",
            Rule::U3 => "projection and permutation",
            Rule::UI1 => "concatenation",
            Rule::UI2 => "transfer",
            Rule::UI3 => "symmetry",
            Rule::UI4 => "constancy",
            Rule::UI5 => "equality",
            Rule::Cycle(_) => "cycle",
        };
        format!("{self} {s}")
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Cycle(n) => write!(f, "C{n}"),
            r => write!(f, "{r:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleSystem {
    pub name: String,
    pub rules: BTreeSet<Rule>,
    /// Includes every cycle rule `Cn`.
    pub cycles: bool,
}

impl RuleSystem {
    pub fn custom(name: &str, rules: &[Rule]) -> Self {
        Self { name: name.to_string(), rules: rules.iter().copied().collect(), cycles: false }
    }

    /// IAs alone.
    pub fn i() -> Self {
        Self::custom("I", &[Rule::I1, Rule::I2, Rule::I3, Rule::I4, Rule::I5])
    }

    /// FDs and IAs.
    pub fn a() -> Self {
        let mut s = Self::i();
        s.name = "A".into();
        s.rules.extend([Rule::F1, Rule::F2, Rule::F3, Rule::FI1, Rule::FI2]);
        s
    }

    /// `A` without weak composition and augmentation.
    pub fn a_star() -> Self {
        let mut s = Self::a();
        s.name = "A*".into();
        s.rules.remove(&Rule::I5);
        s.rules.remove(&Rule::F3);
        s
    }

    pub fn b() -> Self {
        Self::custom("B", &[Rule::U1, Rule::U2, Rule::U3])
    }

    pub fn c() -> Self {
        Self::custom("C", &[Rule::UI1, Rule::UI2, Rule::UI3, Rule::UI4, Rule::UI5])
    }

    /// IND+IA: `I ∪ B ∪ C`.
    pub fn ind_ia() -> Self {
        let mut s = Self::i();
        s.name = "I+B+C".into();
        s.rules.extend(Self::b().rules);
        s.rules.extend(Self::c().rules);
        s
    }

    pub fn star_unrestricted() -> Self {
        let mut s = Self::a_star();
        s.name = "A*+U1+U2+UI3+UI4".into();
        s.rules.extend([Rule::U1, Rule::U2, Rule::UI3, Rule::UI4]);
        s
    }

    pub fn star_finite() -> Self {
        let mut s = Self::a_star();
        s.name = "A*+U1+U2+Cn".into();
        s.rules.extend([Rule::U1, Rule::U2]);
        s.cycles = true;
        s
    }

    pub fn has(&self, r: Rule) -> bool {
        match r {
            Rule::Cycle(_) => self.cycles,
            r => self.rules.contains(&r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Justification {
    Hypothesis,
    Rule { rule: Rule, premises: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeductionStep {
    pub dep: Dependency,
    pub just: Justification,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Deduction {
    pub steps: Vec<DeductionStep>,
}

impl Deduction {
    /// Steps that apply a rule, as opposed to restating a hypothesis.
    pub fn rule_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.just != Justification::Hypothesis).count()
    }

    pub fn conclusion(&self) -> Option<&Dependency> {
        self.steps.last().map(|s| &s.dep)
    }

    pub fn render(&self, schema: &DatabaseSchema) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            let why = match &s.just {
                Justification::Hypothesis => "hypothesis".to_string(),
                Justification::Rule { rule, premises } if premises.is_empty() => rule.name(),
                Justification::Rule { rule, premises } => {
                    let p: Vec<String> = premises.iter().map(|p| (p + 1).to_string()).collect();
                    format!("{} from {}", rule.name(), p.join(", "))
                }
            };
            out.push_str(&format!("{:>3}. {:<40} [{why}]\n", i + 1, s.dep.show(schema).to_string()));
        }
        out
    }
}

/// Choices a rule leaves open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instantiation {
    None,
    /// I1: `∅⊥X`; I3: the retained right side; F3: the augmenting set.
    Attrs(RelId, AttrSet),
    /// F1: `X→Y` with `Y⊆X`.
    Pair(RelId, AttrSet, AttrSet),
    /// U1: `R[X]⊆R[X]`.
    Seq(RelId, Vec<AttrId>),
    /// U3: selected positions, in order.
    Positions(Vec<usize>),
    /// UI5: which occurrences of the replaced attribute change.
    Occurrences(Vec<usize>),
    /// Cycle rules: which reversed edge to conclude.
    Member(usize),
}

fn mismatch(r: Rule) -> Error {
    Error::SchemaMismatch(r.to_string())
}

fn ia_parts(d: &Dependency) -> Option<(RelId, &AttrSet, &AttrSet)> {
    match d {
        Dependency::Ia { rel, left, right } => Some((*rel, left, right)),
        _ => None,
    }
}

fn fd_parts(d: &Dependency) -> Option<(RelId, &AttrSet, &AttrSet)> {
    match d {
        Dependency::Fd { rel, lhs, rhs } => Some((*rel, lhs, rhs)),
        _ => None,
    }
}

type IndParts<'a> = (RelId, &'a [AttrId], RelId, &'a [AttrId]);

fn ind_parts(d: &Dependency) -> Option<IndParts<'_>> {
    match d {
        Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs } => Some((*lhs_rel, lhs, *rhs_rel, rhs)),
        _ => None,
    }
}

fn set_of(v: &[AttrId]) -> AttrSet {
    v.iter().copied().collect()
}

fn distinct(v: &[AttrId]) -> bool {
    v.iter().collect::<BTreeSet<_>>().len() == v.len()
}

fn single(s: &AttrSet) -> Option<AttrId> {
    (s.len() == 1).then(|| s.first().unwrap())
}

/// The edges of an alternating cycle: `(A1,…,A2n)` from `A1→A2, A2⊇A3, …, A2n⊇A1`.
fn cycle_nodes(n: usize, premises: &[Dependency]) -> Option<Vec<AttrId>> {
    if n == 0 || premises.len() != 2 * n {
        return None;
    }
    let mut nodes = Vec::with_capacity(2 * n);
    for i in 0..n {
        let (_, l, r) = fd_parts(&premises[2 * i])?;
        nodes.push(single(l)?);
        nodes.push(single(r)?);
    }
    for i in 0..n {
        let (_, sub, _, sup) = ind_parts(&premises[2 * i + 1])?;
        if sub.len() != 1 || sup[0] != nodes[2 * i + 1] || sub[0] != nodes[(2 * i + 2) % (2 * n)] {
            return None;
        }
    }
    Some(nodes)
}

fn cycle_conclusions(schema_rel: RelId, rel_of: impl Fn(AttrId) -> RelId, nodes: &[AttrId]) -> Vec<Dependency> {
    let m = nodes.len();
    let mut out = Vec::with_capacity(m);
    for i in (0..m).step_by(2) {
        let (a, b, c) = (nodes[i], nodes[i + 1], nodes[(i + 2) % m]);
        out.push(Dependency::fd(schema_rel, [b], [a]));
        out.push(Dependency::ind(rel_of(b), vec![b], rel_of(c), vec![c]));
    }
    out
}

/// Occurrence-wise replacement of `a` by `b`; `None` if a sequence would repeat.
fn replace(dep: &Dependency, a: AttrId, b: AttrId, occ: &[usize]) -> Option<Dependency> {
    let swap_set = |s: &AttrSet, hit: bool| {
        if hit {
            let mut t = s.clone();
            t.remove(a);
            t.insert(b);
            t
        } else {
            s.clone()
        }
    };
    let mut idx = 0;
    let mut next = |present: bool| {
        if !present {
            return false;
        }
        let hit = occ.contains(&idx);
        idx += 1;
        hit
    };
    Some(match dep {
        Dependency::Fd { rel, lhs, rhs } => {
            let (h1, h2) = (next(lhs.contains(a)), next(rhs.contains(a)));
            Dependency::Fd { rel: *rel, lhs: swap_set(lhs, h1), rhs: swap_set(rhs, h2) }
        }
        Dependency::Ia { rel, left, right } => {
            let (h1, h2) = (next(left.contains(a)), next(right.contains(a)));
            Dependency::Ia { rel: *rel, left: swap_set(left, h1), right: swap_set(right, h2) }
        }
        Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs } => {
            let mut sw = |v: &[AttrId]| -> Option<Vec<AttrId>> {
                let out: Vec<AttrId> = v.iter().map(|&x| if x == a && next(true) { b } else { x }).collect();
                distinct(&out).then_some(out)
            };
            let l = sw(lhs)?;
            let r = sw(rhs)?;
            Dependency::Ind { lhs_rel: *lhs_rel, lhs: l, rhs_rel: *rhs_rel, rhs: r }
        }
    })
}

fn occurrences(dep: &Dependency, a: AttrId) -> usize {
    match dep {
        Dependency::Fd { lhs, rhs, .. } | Dependency::Ia { left: lhs, right: rhs, .. } => {
            lhs.contains(a) as usize + rhs.contains(a) as usize
        }
        Dependency::Ind { lhs, rhs, .. } => lhs.iter().chain(rhs).filter(|&&x| x == a).count(),
    }
}

/// UI5 premises `R[A]⊆R′[C], R[B]⊆R′[C], R′:C⊥C`, yielding `(A, B)`.
fn equality_pair(p: &[Dependency]) -> Option<(AttrId, AttrId)> {
    let (l1, a, r1, c1) = ind_parts(&p[0])?;
    let (l2, b, r2, c2) = ind_parts(&p[1])?;
    let (r3, x, y) = ia_parts(&p[2])?;
    let ok = a.len() == 1 && b.len() == 1 && l1 == l2 && r1 == r2 && r2 == r3 && c1 == c2 && c1.len() == 1;
    (ok && single(x) == Some(c1[0]) && single(y) == Some(c1[0])).then(|| (a[0], b[0]))
}

/// Conclusion of a rule for the given premises and instantiation.
pub fn apply_rule(schema: &DatabaseSchema, rule: Rule, premises: &[Dependency], inst: &Instantiation) -> Result<Dependency> {
    let err = || mismatch(rule);
    if premises.len() != rule.arity() {
        return Err(err());
    }
    let p = premises;
    let out = match (rule, inst) {
        (Rule::I1, Instantiation::Attrs(rel, x)) => Dependency::ia(*rel, AttrSet::new(), x.clone()),
        (Rule::I2, _) => {
            let (r, x, y) = ia_parts(&p[0]).ok_or_else(err)?;
            Dependency::ia(r, y.clone(), x.clone())
        }
        (Rule::I3, Instantiation::Attrs(_, keep)) => {
            let (r, x, w) = ia_parts(&p[0]).ok_or_else(err)?;
            if !keep.is_subset(w) {
                return Err(err());
            }
            Dependency::ia(r, x.clone(), keep.clone())
        }
        (Rule::I4, _) => {
            let (r, x, y) = ia_parts(&p[0]).ok_or_else(err)?;
            let (r2, xy, z) = ia_parts(&p[1]).ok_or_else(err)?;
            if r != r2 || *xy != x.union(y) {
                return Err(err());
            }
            Dependency::ia(r, x.clone(), y.union(z))
        }
        (Rule::I5, _) => {
            let (r, x, y) = ia_parts(&p[0]).ok_or_else(err)?;
            let (r2, z, z2) = ia_parts(&p[1]).ok_or_else(err)?;
            if r != r2 || z != z2 {
                return Err(err());
            }
            Dependency::ia(r, x.clone(), y.union(z))
        }
        (Rule::F1, Instantiation::Pair(rel, x, y)) if y.is_subset(x) => Dependency::fd(*rel, x.clone(), y.clone()),
        (Rule::F2, _) => {
            let (r, x, y) = fd_parts(&p[0]).ok_or_else(err)?;
            let (r2, y2, z) = fd_parts(&p[1]).ok_or_else(err)?;
            if r != r2 || y != y2 {
                return Err(err());
            }
            Dependency::fd(r, x.clone(), z.clone())
        }
        (Rule::F3, Instantiation::Attrs(_, z)) => {
            let (r, x, y) = fd_parts(&p[0]).ok_or_else(err)?;
            Dependency::fd(r, x.union(z), y.union(z))
        }
        (Rule::FI1, _) => {
            let (r, x, y) = ia_parts(&p[0]).ok_or_else(err)?;
            let (r2, x2, y2) = fd_parts(&p[1]).ok_or_else(err)?;
            if r != r2 || x != x2 || y != y2 {
                return Err(err());
            }
            Dependency::fd(r, AttrSet::new(), y.clone())
        }
        (Rule::FI2, _) => {
            let (r, x, w) = ia_parts(&p[0]).ok_or_else(err)?;
            let (r2, z, v) = fd_parts(&p[1]).ok_or_else(err)?;
            if r != r2 || !z.is_subset(w) {
                return Err(err());
            }
            Dependency::ia(r, x.clone(), w.union(v))
        }
        (Rule::U1, Instantiation::Seq(rel, x)) if distinct(x) => Dependency::ind(*rel, x.clone(), *rel, x.clone()),
        (Rule::U2, _) => {
            let (a, x, b, y) = ind_parts(&p[0]).ok_or_else(err)?;
            let (b2, y2, c, z) = ind_parts(&p[1]).ok_or_else(err)?;
            if b != b2 || y != y2 {
                return Err(err());
            }
            Dependency::ind(a, x.to_vec(), c, z.to_vec())
        }
        (Rule::U3, Instantiation::Positions(pos)) => {
            let (a, x, b, y) = ind_parts(&p[0]).ok_or_else(err)?;
            if pos.is_empty() || pos.iter().any(|&i| i >= x.len()) || pos.iter().collect::<BTreeSet<_>>().len() != pos.len() {
                return Err(err());
            }
            Dependency::ind(a, pos.iter().map(|&i| x[i]).collect(), b, pos.iter().map(|&i| y[i]).collect())
        }
        (Rule::UI1, _) => {
            let (r, x, r2, z) = ind_parts(&p[0]).ok_or_else(err)?;
            let (s, y, s2, w) = ind_parts(&p[1]).ok_or_else(err)?;
            let (t, zs, ws) = ia_parts(&p[2]).ok_or_else(err)?;
            let xy: Vec<AttrId> = x.iter().chain(y).copied().collect();
            let zw: Vec<AttrId> = z.iter().chain(w).copied().collect();
            if r != s || r2 != s2 || r2 != t || set_of(z) != *zs || set_of(w) != *ws || !distinct(&xy) || !distinct(&zw) {
                return Err(err());
            }
            Dependency::ind(r, xy, r2, zw)
        }
        (Rule::UI2, _) => {
            let (r, xy, r2, zw) = ind_parts(&p[0]).ok_or_else(err)?;
            if p[1] != Dependency::ind(r2, zw.to_vec(), r, xy.to_vec()) {
                return Err(err());
            }
            let (t, zs, ws) = ia_parts(&p[2]).ok_or_else(err)?;
            let k = zs.len();
            if t != r2 || k > zw.len() || set_of(&zw[..k]) != *zs || set_of(&zw[k..]) != *ws {
                return Err(err());
            }
            Dependency::ia(r, set_of(&xy[..k]), set_of(&xy[k..]))
        }
        (Rule::UI3, _) | (Rule::UI4, _) => {
            let (r, x, r2, y) = ind_parts(&p[0]).ok_or_else(err)?;
            let (t, a, b) = ia_parts(&p[1]).ok_or_else(err)?;
            if t != r2 || *a != set_of(y) || *b != set_of(y) {
                return Err(err());
            }
            if rule == Rule::UI3 {
                Dependency::ind(r2, y.to_vec(), r, x.to_vec())
            } else {
                Dependency::ia(r, set_of(x), set_of(x))
            }
        }
        (Rule::UI5, Instantiation::Occurrences(occ)) => {
            let (a, b) = equality_pair(p).ok_or_else(err)?;
            replace(&p[3], a, b, occ).ok_or_else(err)?
        }
        (Rule::Cycle(n), Instantiation::Member(i)) => {
            let nodes = cycle_nodes(n, p).ok_or_else(err)?;
            let (rel, _, _) = fd_parts(&p[0]).ok_or_else(err)?;
            cycle_conclusions(rel, |a| schema.relation_of(a), &nodes).get(*i).cloned().ok_or_else(err)?
        }
        _ => return Err(err()),
    };
    out.check(schema).map_err(|_| err())?;
    Ok(out)
}

/// Does `concl` follow from `premises` by one application of `rule`?
pub fn admits(schema: &DatabaseSchema, rule: Rule, premises: &[Dependency], concl: &Dependency) -> bool {
    if premises.len() != rule.arity() || concl.check(schema).is_err() {
        return false;
    }
    let via = |inst: Instantiation| apply_rule(schema, rule, premises, &inst).ok().as_ref() == Some(concl);
    match rule {
        Rule::I1 => matches!(ia_parts(concl), Some((r, x, y)) if x.is_empty() && via(Instantiation::Attrs(r, y.clone()))),
        Rule::I3 => matches!(ia_parts(concl), Some((r, _, y)) if via(Instantiation::Attrs(r, y.clone()))),
        Rule::F1 => matches!(fd_parts(concl), Some((r, x, y)) if via(Instantiation::Pair(r, x.clone(), y.clone()))),
        Rule::F3 => {
            let (Some((r, x, y)), Some((r2, l, rr))) = (fd_parts(&premises[0]), fd_parts(concl)) else { return false };
            r == r2 && x.is_subset(l) && y.is_subset(rr) && l.difference(x).is_subset(rr) && rr.difference(y).is_subset(l)
        }
        Rule::U1 => matches!(ind_parts(concl), Some((r, x, _, _)) if via(Instantiation::Seq(r, x.to_vec()))),
        Rule::U3 => {
            let (Some((_, x, _, _)), Some((_, x2, _, _))) = (ind_parts(&premises[0]), ind_parts(concl)) else { return false };
            let pos: Option<Vec<usize>> = x2.iter().map(|a| x.iter().position(|b| b == a)).collect();
            pos.is_some_and(|pos| via(Instantiation::Positions(pos)))
        }
        Rule::UI5 => {
            let Some((a, _)) = equality_pair(premises) else { return false };
            let k = occurrences(&premises[3], a);
            (0..1usize << k).any(|m| via(Instantiation::Occurrences((0..k).filter(|i| m >> i & 1 == 1).collect())))
        }
        Rule::Cycle(n) => (0..2 * n).any(|i| via(Instantiation::Member(i))),
        _ => via(Instantiation::None),
    }
}

/// Checks every step against `Σ` or its rule.
pub fn verify_deduction(set: &DependencySet, d: &Deduction) -> bool {
    d.steps.iter().enumerate().all(|(i, s)| match &s.just {
        Justification::Hypothesis => set.deps.contains(&s.dep),
        Justification::Rule { rule, premises } => {
            premises.iter().all(|&p| p < i)
                && admits(&set.schema, *rule, &premises.iter().map(|&p| d.steps[p].dep.clone()).collect::<Vec<_>>(), &s.dep)
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    Derived(Deduction),
    NotDerivable { facts: usize },
    Unknown { facts: usize, reason: String },
}

const MAX_LOCAL: usize = 10;

/// Saturation state; attributes are renumbered per relation so sets become bit masks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Fact {
    Fd(u8, u32, u32),
    Ia(u8, u32, u32),
    Ind(u8, Vec<u8>, u8, Vec<u8>),
}

struct Saturator<'a> {
    schema: &'a DatabaseSchema,
    sys: &'a RuleSystem,
    locals: Vec<Vec<AttrId>>,
    width: Vec<usize>,
    max_ind: usize,
    facts: Vec<Fact>,
    just: Vec<(Option<Rule>, Vec<u32>)>,
    fd_tab: Vec<Vec<u32>>,
    ia_tab: Vec<Vec<u32>>,
    fd_by_lhs: Vec<Vec<Vec<u32>>>,
    fd_by_rhs: Vec<Vec<Vec<u32>>>,
    ia_by_left: Vec<Vec<Vec<u32>>>,
    ia_by_right: Vec<Vec<Vec<u32>>>,
    ia_by_union: Vec<Vec<Vec<u32>>>,
    cas: Vec<Vec<u32>>,
    ias: Vec<Vec<u32>>,
    ind_tab: HashMap<Fact, u32>,
    ind_by_lhs: HashMap<(u8, Vec<u8>), Vec<u32>>,
    ind_by_rhs: HashMap<(u8, Vec<u8>), Vec<u32>>,
    ind_by_rhs_set: HashMap<(u8, u32), Vec<u32>>,
    inds: Vec<u32>,
    goal: Option<Fact>,
    budget: usize,
    exhausted: bool,
    found: Option<u32>,
}

const NONE: u32 = u32::MAX;

fn mask_of(seq: &[u8]) -> u32 {
    seq.iter().fold(0, |m, &i| m | 1 << i)
}

fn submasks(m: u32) -> impl Iterator<Item = u32> {
    let mut s = Some(m);
    std::iter::from_fn(move || {
        let cur = s?;
        s = if cur == 0 { None } else { Some((cur - 1) & m) };
        Some(cur)
    })
}

impl<'a> Saturator<'a> {
    fn new(set: &'a DependencySet, sigma: &Dependency, sys: &'a RuleSystem, budget: usize) -> Result<Self> {
        let schema = &*set.schema;
        let mentioned = set.mentioned(Some(sigma));
        let nrel = schema.relations().len();
        let mut locals = vec![Vec::new(); nrel];
        for a in mentioned.iter() {
            locals[schema.relation_of(a)].push(a);
        }
        if let Some(l) = locals.iter().find(|l| l.len() > MAX_LOCAL) {
            return Err(Error::TooManyAttributes(l.len(), MAX_LOCAL));
        }
        let width: Vec<usize> = locals.iter().map(Vec::len).collect();
        let max_ind = set.deps.iter().chain(Some(sigma)).filter(|d| d.is_ind()).map(Dependency::arity).max().unwrap_or(0);
        let tab = |w: usize| vec![NONE; 1 << (2 * w)];
        let lists = |w: usize| vec![Vec::new(); 1 << w];
        Ok(Self {
            schema,
            sys,
            max_ind,
            fd_tab: width.iter().map(|&w| tab(w)).collect(),
            ia_tab: width.iter().map(|&w| tab(w)).collect(),
            fd_by_lhs: width.iter().map(|&w| lists(w)).collect(),
            fd_by_rhs: width.iter().map(|&w| lists(w)).collect(),
            ia_by_left: width.iter().map(|&w| lists(w)).collect(),
            ia_by_right: width.iter().map(|&w| lists(w)).collect(),
            ia_by_union: width.iter().map(|&w| lists(w)).collect(),
            cas: vec![Vec::new(); nrel],
            ias: vec![Vec::new(); nrel],
            locals,
            width,
            facts: Vec::new(),
            just: Vec::new(),
            ind_tab: HashMap::new(),
            ind_by_lhs: HashMap::new(),
            ind_by_rhs: HashMap::new(),
            ind_by_rhs_set: HashMap::new(),
            inds: Vec::new(),
            goal: None,
            budget,
            exhausted: false,
            found: None,
        })
    }

    fn local(&self, a: AttrId) -> u8 {
        let r = self.schema.relation_of(a);
        self.locals[r].iter().position(|&b| b == a).expect("mentioned attribute") as u8
    }

    fn mask(&self, s: &AttrSet) -> u32 {
        s.iter().fold(0, |m, a| m | 1 << self.local(a))
    }

    fn to_fact(&self, d: &Dependency) -> Fact {
        match d {
            Dependency::Fd { rel, lhs, rhs } => Fact::Fd(*rel as u8, self.mask(lhs), self.mask(rhs)),
            Dependency::Ia { rel, left, right } => Fact::Ia(*rel as u8, self.mask(left), self.mask(right)),
            Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs } => Fact::Ind(
                *lhs_rel as u8,
                lhs.iter().map(|&a| self.local(a)).collect(),
                *rhs_rel as u8,
                rhs.iter().map(|&a| self.local(a)).collect(),
            ),
        }
    }

    fn unmask(&self, rel: u8, m: u32) -> AttrSet {
        (0..self.width[rel as usize]).filter(|i| m >> i & 1 == 1).map(|i| self.locals[rel as usize][i]).collect()
    }

    fn to_dep(&self, f: &Fact) -> Dependency {
        match f {
            Fact::Fd(r, l, x) => Dependency::fd(*r as usize, self.unmask(*r, *l), self.unmask(*r, *x)),
            Fact::Ia(r, l, x) => Dependency::ia(*r as usize, self.unmask(*r, *l), self.unmask(*r, *x)),
            Fact::Ind(a, x, b, y) => Dependency::ind(
                *a as usize,
                x.iter().map(|&i| self.locals[*a as usize][i as usize]).collect(),
                *b as usize,
                y.iter().map(|&i| self.locals[*b as usize][i as usize]).collect(),
            ),
        }
    }

    fn lookup(&self, f: &Fact) -> u32 {
        match f {
            Fact::Fd(r, l, x) => self.fd_tab[*r as usize][((*l as usize) << self.width[*r as usize]) | *x as usize],
            Fact::Ia(r, l, x) => self.ia_tab[*r as usize][((*l as usize) << self.width[*r as usize]) | *x as usize],
            Fact::Ind(..) => self.ind_tab.get(f).copied().unwrap_or(NONE),
        }
    }

    /// Is the fact present and already joined (id at most `cur`)?
    fn seen(&self, f: &Fact, cur: u32) -> Option<u32> {
        let id = self.lookup(f);
        (id != NONE && id <= cur).then_some(id)
    }

    fn add(&mut self, f: Fact, rule: Option<Rule>, premises: Vec<u32>) {
        let degenerate = match &f {
            Fact::Fd(_, l, x) | Fact::Ia(_, l, x) => *l == 0 && *x == 0,
            Fact::Ind(_, x, _, _) => x.is_empty() || x.len() > self.max_ind.max(1),
        };
        if degenerate || self.lookup(&f) != NONE || self.exhausted {
            return;
        }
        if self.facts.len() >= self.budget {
            self.exhausted = true;
            return;
        }
        let id = self.facts.len() as u32;
        match &f {
            Fact::Fd(r, l, x) => {
                let (r, w) = (*r as usize, self.width[*r as usize]);
                self.fd_tab[r][((*l as usize) << w) | *x as usize] = id;
                self.fd_by_lhs[r][*l as usize].push(id);
                self.fd_by_rhs[r][*x as usize].push(id);
            }
            Fact::Ia(r, l, x) => {
                let (r, w) = (*r as usize, self.width[*r as usize]);
                self.ia_tab[r][((*l as usize) << w) | *x as usize] = id;
                self.ia_by_left[r][*l as usize].push(id);
                self.ia_by_right[r][*x as usize].push(id);
                self.ia_by_union[r][(*l | *x) as usize].push(id);
                self.ias[r].push(id);
                if l == x {
                    self.cas[r].push(id);
                }
            }
            Fact::Ind(a, x, b, y) => {
                self.ind_tab.insert(f.clone(), id);
                self.ind_by_lhs.entry((*a, x.clone())).or_default().push(id);
                self.ind_by_rhs.entry((*b, y.clone())).or_default().push(id);
                self.ind_by_rhs_set.entry((*b, mask_of(y))).or_default().push(id);
                self.inds.push(id);
            }
        }
        if self.goal.as_ref() == Some(&f) {
            self.found = Some(id);
        }
        self.facts.push(f);
        self.just.push((rule, premises));
    }

    fn seed(&mut self, set: &DependencySet) {
        for d in &set.deps {
            let f = self.to_fact(d);
            self.add(f, None, vec![]);
        }
        for r in 0..self.locals.len() {
            let full = (1u32 << self.width[r]) - 1;
            let r8 = r as u8;
            if self.sys.has(Rule::I1) {
                for x in 1..=full {
                    self.add(Fact::Ia(r8, 0, x), Some(Rule::I1), vec![]);
                }
            }
            if self.sys.has(Rule::F1) {
                for x in 0..=full {
                    for y in submasks(x) {
                        self.add(Fact::Fd(r8, x, y), Some(Rule::F1), vec![]);
                    }
                }
            }
            if self.sys.has(Rule::U1) {
                let mut seqs = Vec::new();
                sequences(self.width[r] as u8, self.max_ind.max(1), &mut Vec::new(), &mut seqs);
                for s in seqs {
                    self.add(Fact::Ind(r8, s.clone(), r8, s), Some(Rule::U1), vec![]);
                }
            }
        }
    }

    fn step(&mut self, cur: u32) {
        let f = self.facts[cur as usize].clone();
        let sys = self.sys;
        match f {
            Fact::Ia(r, x, y) => {
                let (ru, w) = (r as usize, self.width[r as usize]);
                if sys.has(Rule::I2) {
                    self.add(Fact::Ia(r, y, x), Some(Rule::I2), vec![cur]);
                }
                if sys.has(Rule::I3) {
                    for y2 in submasks(y).skip(1) {
                        self.add(Fact::Ia(r, x, y2), Some(Rule::I3), vec![cur]);
                    }
                }
                if sys.has(Rule::I4) {
                    for g in self.ia_by_left[ru][(x | y) as usize].clone() {
                        if g <= cur {
                            let Fact::Ia(_, _, z) = self.facts[g as usize] else { unreachable!() };
                            self.add(Fact::Ia(r, x, y | z), Some(Rule::I4), vec![cur, g]);
                        }
                    }
                    for g in self.ia_by_union[ru][x as usize].clone() {
                        if g <= cur {
                            let Fact::Ia(_, gx, gy) = self.facts[g as usize] else { unreachable!() };
                            self.add(Fact::Ia(r, gx, gy | y), Some(Rule::I4), vec![g, cur]);
                        }
                    }
                }
                if sys.has(Rule::I5) {
                    for g in self.cas[ru].clone() {
                        if g <= cur {
                            let Fact::Ia(_, z, _) = self.facts[g as usize] else { unreachable!() };
                            self.add(Fact::Ia(r, x, y | z), Some(Rule::I5), vec![cur, g]);
                        }
                    }
                    if x == y {
                        for g in self.ias[ru].clone() {
                            if g <= cur {
                                let Fact::Ia(_, gx, gy) = self.facts[g as usize] else { unreachable!() };
                                self.add(Fact::Ia(r, gx, gy | x), Some(Rule::I5), vec![g, cur]);
                            }
                        }
                    }
                }
                if sys.has(Rule::FI1) {
                    if let Some(g) = self.seen(&Fact::Fd(r, x, y), cur) {
                        self.add(Fact::Fd(r, 0, y), Some(Rule::FI1), vec![cur, g]);
                    }
                }
                if sys.has(Rule::FI2) {
                    for z in submasks(y) {
                        for g in self.fd_by_lhs[ru][z as usize].clone() {
                            if g <= cur {
                                let Fact::Fd(_, _, v) = self.facts[g as usize] else { unreachable!() };
                                self.add(Fact::Ia(r, x, y | v), Some(Rule::FI2), vec![cur, g]);
                            }
                        }
                    }
                }
                if x == y && (sys.has(Rule::UI3) || sys.has(Rule::UI4)) {
                    for g in self.ind_by_rhs_set.get(&(r, x)).cloned().unwrap_or_default() {
                        if g <= cur {
                            self.constancy(g, cur);
                        }
                    }
                }
                if sys.has(Rule::UI1) && x & y == 0 {
                    for g1 in self.ind_by_rhs_set.get(&(r, x)).cloned().unwrap_or_default() {
                        for g2 in self.ind_by_rhs_set.get(&(r, y)).cloned().unwrap_or_default() {
                            if g1 <= cur && g2 <= cur {
                                self.concatenate(g1, g2, cur);
                            }
                        }
                    }
                }
                if sys.has(Rule::UI2) && x & y == 0 && x != 0 && y != 0 {
                    for g in self.ind_by_rhs_set.get(&(r, x | y)).cloned().unwrap_or_default() {
                        if g <= cur {
                            self.transfer(g, cur);
                        }
                    }
                }
                let _ = w;
            }
            Fact::Fd(r, x, y) => {
                let (ru, w) = (r as usize, self.width[r as usize]);
                if sys.has(Rule::F2) {
                    for g in self.fd_by_lhs[ru][y as usize].clone() {
                        if g <= cur {
                            let Fact::Fd(_, _, z) = self.facts[g as usize] else { unreachable!() };
                            self.add(Fact::Fd(r, x, z), Some(Rule::F2), vec![cur, g]);
                        }
                    }
                    for g in self.fd_by_rhs[ru][x as usize].clone() {
                        if g <= cur {
                            let Fact::Fd(_, gx, _) = self.facts[g as usize] else { unreachable!() };
                            self.add(Fact::Fd(r, gx, y), Some(Rule::F2), vec![g, cur]);
                        }
                    }
                }
                if sys.has(Rule::F3) {
                    let full = (1u32 << w) - 1;
                    for z in submasks(full) {
                        self.add(Fact::Fd(r, x | z, y | z), Some(Rule::F3), vec![cur]);
                    }
                }
                if sys.has(Rule::FI1) {
                    if let Some(g) = self.seen(&Fact::Ia(r, x, y), cur) {
                        self.add(Fact::Fd(r, 0, y), Some(Rule::FI1), vec![g, cur]);
                    }
                }
                if sys.has(Rule::FI2) {
                    let full = (1u32 << w) - 1;
                    for extra in submasks(full & !x) {
                        for g in self.ia_by_right[ru][(x | extra) as usize].clone() {
                            if g <= cur {
                                let Fact::Ia(_, gx, gw) = self.facts[g as usize] else { unreachable!() };
                                self.add(Fact::Ia(r, gx, gw | y), Some(Rule::FI2), vec![g, cur]);
                            }
                        }
                    }
                }
            }
            Fact::Ind(a, ref x, b, ref y) => {
                let (x, y) = (x.clone(), y.clone());
                if sys.has(Rule::U2) {
                    for g in self.ind_by_lhs.get(&(b, y.clone())).cloned().unwrap_or_default() {
                        if g <= cur {
                            let Fact::Ind(_, _, c, z) = self.facts[g as usize].clone() else { unreachable!() };
                            self.add(Fact::Ind(a, x.clone(), c, z), Some(Rule::U2), vec![cur, g]);
                        }
                    }
                    for g in self.ind_by_rhs.get(&(a, x.clone())).cloned().unwrap_or_default() {
                        if g <= cur {
                            let Fact::Ind(c, z, _, _) = self.facts[g as usize].clone() else { unreachable!() };
                            self.add(Fact::Ind(c, z, b, y.clone()), Some(Rule::U2), vec![g, cur]);
                        }
                    }
                }
                if sys.has(Rule::U3) {
                    let mut sels = Vec::new();
                    sequences(x.len() as u8, x.len(), &mut Vec::new(), &mut sels);
                    for s in sels {
                        let nx = s.iter().map(|&i| x[i as usize]).collect();
                        let ny = s.iter().map(|&i| y[i as usize]).collect();
                        self.add(Fact::Ind(a, nx, b, ny), Some(Rule::U3), vec![cur]);
                    }
                }
                if sys.has(Rule::UI3) || sys.has(Rule::UI4) {
                    let ym = mask_of(&y);
                    if self.seen(&Fact::Ia(b, ym, ym), cur).is_some() {
                        let ca = self.lookup(&Fact::Ia(b, ym, ym));
                        self.constancy(cur, ca);
                    }
                }
                if sys.has(Rule::UI1) {
                    let others: Vec<u32> = self.inds.iter().copied().filter(|&g| g <= cur).collect();
                    for g in others {
                        let Fact::Ind(a2, _, b2, y2) = &self.facts[g as usize] else { unreachable!() };
                        if *a2 != a || *b2 != b {
                            continue;
                        }
                        let (ym, y2m) = (mask_of(&y), mask_of(y2));
                        if let Some(ia) = self.seen(&Fact::Ia(b, ym, y2m), cur) {
                            self.concatenate(cur, g, ia);
                        }
                        if let Some(ia) = self.seen(&Fact::Ia(b, y2m, ym), cur) {
                            self.concatenate(g, cur, ia);
                        }
                    }
                }
                if sys.has(Rule::UI2) {
                    let rev = Fact::Ind(b, y.clone(), a, x.clone());
                    if let Some(g) = self.seen(&rev, cur) {
                        for k in 1..y.len() {
                            let (zm, wm) = (mask_of(&y[..k]), mask_of(&y[k..]));
                            if self.seen(&Fact::Ia(b, zm, wm), cur).is_some() {
                                self.transfer(cur, self.lookup(&Fact::Ia(b, zm, wm)));
                            }
                            let (zm, wm) = (mask_of(&x[..k]), mask_of(&x[k..]));
                            if self.seen(&Fact::Ia(a, zm, wm), cur).is_some() {
                                self.transfer(g, self.lookup(&Fact::Ia(a, zm, wm)));
                            }
                        }
                    }
                }
            }
        }
    }

    fn constancy(&mut self, ind: u32, ca: u32) {
        let Fact::Ind(a, x, b, y) = self.facts[ind as usize].clone() else { return };
        if self.sys.has(Rule::UI3) {
            self.add(Fact::Ind(b, y, a, x.clone()), Some(Rule::UI3), vec![ind, ca]);
        }
        if self.sys.has(Rule::UI4) {
            let m = mask_of(&x);
            self.add(Fact::Ia(a, m, m), Some(Rule::UI4), vec![ind, ca]);
        }
    }

    fn concatenate(&mut self, g1: u32, g2: u32, ia: u32) {
        let (Fact::Ind(a, x, b, z), Fact::Ind(a2, y, b2, w)) = (&self.facts[g1 as usize], &self.facts[g2 as usize]) else { return };
        let Fact::Ia(_, zm, wm) = self.facts[ia as usize] else { return };
        if a != a2 || b != b2 || mask_of(z) != zm || mask_of(w) != wm || zm & wm != 0 || mask_of(x) & mask_of(y) != 0 {
            return;
        }
        if x.len() + y.len() > self.max_ind {
            return;
        }
        let f = Fact::Ind(*a, x.iter().chain(y).copied().collect(), *b, z.iter().chain(w).copied().collect());
        self.add(f, Some(Rule::UI1), vec![g1, g2, ia]);
    }

    /// UI2 with `g` as `R[XY]⊆R′[ZW]`.
    fn transfer(&mut self, g: u32, ia: u32) {
        let Fact::Ind(a, xy, b, zw) = self.facts[g as usize].clone() else { return };
        let Fact::Ia(_, zm, wm) = self.facts[ia as usize] else { return };
        let rev = self.lookup(&Fact::Ind(b, zw.clone(), a, xy.clone()));
        if rev == NONE {
            return;
        }
        let k = zm.count_ones() as usize;
        if k == 0 || k >= zw.len() || mask_of(&zw[..k]) != zm || mask_of(&zw[k..]) != wm {
            return;
        }
        self.add(Fact::Ia(a, mask_of(&xy[..k]), mask_of(&xy[k..])), Some(Rule::UI2), vec![g, rev, ia]);
    }

    /// Cycle and equality rules, applied to the saturated set.
    fn global_pass(&mut self) {
        if self.sys.cycles {
            self.cycle_pass();
        }
        if self.sys.has(Rule::UI5) {
            self.equality_pass();
        }
    }

    fn cycle_pass(&mut self) {
        // Nodes are attributes; red a→b for a→b, black a→b for b⊆a.
        let mut red: HashMap<AttrId, Vec<(AttrId, u32)>> = HashMap::new();
        let mut black: HashMap<AttrId, Vec<(AttrId, u32)>> = HashMap::new();
        let mut edges = Vec::new();
        for (id, f) in self.facts.iter().enumerate() {
            match f {
                Fact::Fd(r, l, x) if l.count_ones() == 1 && x.count_ones() == 1 && l != x => {
                    let (a, b) = (self.locals[*r as usize][l.trailing_zeros() as usize], self.locals[*r as usize][x.trailing_zeros() as usize]);
                    red.entry(a).or_default().push((b, id as u32));
                    edges.push((true, a, b, id as u32));
                }
                Fact::Ind(r, x, s, y) if x.len() == 1 && (r, x) != (s, y) => {
                    let (sub, sup) = (self.locals[*r as usize][x[0] as usize], self.locals[*s as usize][y[0] as usize]);
                    black.entry(sup).or_default().push((sub, id as u32));
                    edges.push((false, sup, sub, id as u32));
                }
                _ => {}
            }
        }
        let limit = 2 * self.locals.iter().map(Vec::len).sum::<usize>();
        for (is_red, u, v, id) in edges {
            let reversed = if is_red {
                let r = self.schema.relation_of(u);
                self.to_fact(&Dependency::fd(r, [v], [u]))
            } else {
                self.to_fact(&Dependency::ind(self.schema.relation_of(u), vec![u], self.schema.relation_of(v), vec![v]))
            };
            if self.lookup(&reversed) != NONE {
                continue;
            }
            // Breadth-first over (node, colour of next edge) back to u.
            let start = (v, !is_red);
            let target = (u, is_red);
            let mut parent: HashMap<(AttrId, bool), ((AttrId, bool), u32)> = HashMap::new();
            let mut q = VecDeque::from([(start, 0usize)]);
            let mut reached = start == target;
            while let Some((s, depth)) = q.pop_front() {
                if reached || depth + 1 >= limit {
                    break;
                }
                let out = if s.1 { red.get(&s.0) } else { black.get(&s.0) };
                for &(n, e) in out.into_iter().flatten() {
                    let next = (n, !s.1);
                    if next == start || parent.contains_key(&next) {
                        continue;
                    }
                    parent.insert(next, (s, e));
                    if next == target {
                        reached = true;
                        break;
                    }
                    q.push_back((next, depth + 1));
                }
            }
            if !reached {
                continue;
            }
            let mut path = vec![id];
            let mut s = target;
            let mut tail = Vec::new();
            while s != start {
                let (p, e) = parent[&s];
                tail.push(e);
                s = p;
            }
            tail.reverse();
            path.extend(tail);
            // Rotate so the cycle starts with a red edge.
            if !is_red {
                path.rotate_left(1);
            }
            let deps: Vec<Dependency> = path.iter().map(|&e| self.to_dep(&self.facts[e as usize])).collect();
            let n = path.len() / 2;
            let Some(nodes) = cycle_nodes(n, &deps) else { continue };
            let Some((rel, _, _)) = fd_parts(&deps[0]) else { continue };
            for c in cycle_conclusions(rel, |a| self.schema.relation_of(a), &nodes) {
                let f = self.to_fact(&c);
                self.add(f, Some(Rule::Cycle(n)), path.clone());
            }
        }
    }

    fn equality_pass(&mut self) {
        let mut triples = Vec::new();
        for r in 0..self.cas.len() {
            for &ca in &self.cas[r] {
                let Fact::Ia(_, c, _) = self.facts[ca as usize] else { continue };
                if c.count_ones() != 1 {
                    continue;
                }
                let into: Vec<u32> = self
                    .ind_by_rhs
                    .get(&(r as u8, vec![c.trailing_zeros() as u8]))
                    .cloned()
                    .unwrap_or_default();
                for &i in &into {
                    for &j in &into {
                        if i != j && self.facts[i as usize].clone().ind_lhs_rel() == self.facts[j as usize].clone().ind_lhs_rel() {
                            triples.push((i, j, ca));
                        }
                    }
                }
            }
        }
        for (i, j, ca) in triples {
            let p: Vec<Dependency> = [i, j, ca].iter().map(|&k| self.to_dep(&self.facts[k as usize])).collect();
            let Some((a, b)) = equality_pair(&[p[0].clone(), p[1].clone(), p[2].clone(), p[2].clone()]) else { continue };
            let n = self.facts.len();
            for s in 0..n {
                let dep = self.to_dep(&self.facts[s]);
                let k = occurrences(&dep, a);
                for m in 1..1usize << k {
                    let occ: Vec<usize> = (0..k).filter(|t| m >> t & 1 == 1).collect();
                    if let Some(out) = replace(&dep, a, b, &occ) {
                        let f = self.to_fact(&out);
                        self.add(f, Some(Rule::UI5), vec![i, j, ca, s as u32]);
                    }
                }
            }
        }
    }

    fn deduction(&self, goal: u32) -> Deduction {
        let mut need = BTreeSet::new();
        let mut stack = vec![goal];
        while let Some(g) = stack.pop() {
            if need.insert(g) {
                stack.extend(self.just[g as usize].1.iter().copied());
            }
        }
        let order: Vec<u32> = need.into_iter().collect();
        let pos: HashMap<u32, usize> = order.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let steps = order
            .iter()
            .map(|&g| {
                let (rule, prem) = &self.just[g as usize];
                DeductionStep {
                    dep: self.to_dep(&self.facts[g as usize]),
                    just: match rule {
                        None => Justification::Hypothesis,
                        Some(r) => Justification::Rule { rule: *r, premises: prem.iter().map(|p| pos[p]).collect() },
                    },
                }
            })
            .collect();
        Deduction { steps }
    }
}

impl Fact {
    fn ind_lhs_rel(self) -> Option<u8> {
        match self {
            Fact::Ind(a, ..) => Some(a),
            _ => None,
        }
    }
}

/// Ordered selections of distinct indices below `n`, of length 1 to `k`.
fn sequences(n: u8, k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if !cur.is_empty() {
        out.push(cur.clone());
    }
    if cur.len() == k {
        return;
    }
    for i in 0..n {
        if !cur.contains(&i) {
            cur.push(i);
            sequences(n, k, cur, out);
            cur.pop();
        }
    }
}

/// Forward-chaining saturation over the dependencies on the attributes of `Σ∪{σ}`.
pub fn derive(set: &DependencySet, sigma: &Dependency, sys: &RuleSystem, budget: usize) -> Derivation {
    if let Err(e) = sigma.check(&set.schema) {
        return Derivation::Unknown { facts: 0, reason: e.to_string() };
    }
    let mut s = match Saturator::new(set, sigma, sys, budget) {
        Ok(s) => s,
        Err(e) => return Derivation::Unknown { facts: 0, reason: e.to_string() },
    };
    s.goal = Some(s.to_fact(sigma));
    s.seed(set);
    let mut cur = 0u32;
    loop {
        while (cur as usize) < s.facts.len() && s.found.is_none() && !s.exhausted {
            s.step(cur);
            cur += 1;
        }
        if s.found.is_some() || s.exhausted {
            break;
        }
        let before = s.facts.len();
        s.global_pass();
        if s.facts.len() == before {
            break;
        }
    }
    match s.found {
        Some(g) => Derivation::Derived(s.deduction(g)),
        None if s.exhausted => Derivation::Unknown { facts: s.facts.len(), reason: format!("fact budget of {budget} exhausted") },
        None => Derivation::NotDerivable { facts: s.facts.len() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_dependency, parse_spec};

    fn q(set: &DependencySet, s: &str) -> Dependency {
        parse_dependency(s, &set.schema).unwrap()
    }

    #[test]
    fn trivial_independence_in_one_step() {
        let set = parse_spec("schema R(X,Y)").unwrap();
        let Derivation::Derived(d) = derive(&set, &q(&set, "ia R: _|_ X"), &RuleSystem::i(), 10_000) else { panic!() };
        assert_eq!(d.steps.len(), 1);
        assert!(verify_deduction(&set, &d));
    }

    #[test]
    fn concatenation_instance() {
        let set = parse_spec(
            "schema Disorder(d_id, p_id2, t_id2)\nschema Heart(p_id, t_id)\nia Heart: p_id _|_ t_id\nind Disorder[p_id2] <= Heart[p_id]\nind Disorder[t_id2] <= Heart[t_id]",
        )
        .unwrap();
        let prem = vec![set.deps[1].clone(), set.deps[2].clone(), set.deps[0].clone()];
        let out = apply_rule(&set.schema, Rule::UI1, &prem, &Instantiation::None).unwrap();
        assert_eq!(out, q(&set, "ind Disorder[p_id2,t_id2] <= Heart[p_id,t_id]"));
    }

    #[test]
    fn composition_and_cycle_shapes() {
        let set = parse_spec("schema R(X,Y,Z,V,A,B)").unwrap();
        let out = apply_rule(&set.schema, Rule::FI2, &[q(&set, "ia R: X _|_ Y Z"), q(&set, "fd R: Z -> V")], &Instantiation::None).unwrap();
        assert_eq!(out, q(&set, "ia R: X _|_ Y Z V"));
        let prem = [q(&set, "fd R: A -> B"), q(&set, "ind R[A] <= R[B]")];
        let concl: Vec<_> = (0..2).map(|i| apply_rule(&set.schema, Rule::Cycle(1), &prem, &Instantiation::Member(i)).unwrap()).collect();
        assert_eq!(concl, vec![q(&set, "fd R: B -> A"), q(&set, "ind R[B] <= R[A]")]);
        assert!(apply_rule(&set.schema, Rule::I4, &[q(&set, "ia R: X _|_ Y"), q(&set, "ia R: X _|_ Z")], &Instantiation::None).is_err());
    }

    #[test]
    fn verifier_rejects_forward_references() {
        let set = parse_spec("schema R(A,B)\nia R: A _|_ B").unwrap();
        let d = Deduction {
            steps: vec![
                DeductionStep { dep: q(&set, "ia R: B _|_ A"), just: Justification::Rule { rule: Rule::I2, premises: vec![1] } },
                DeductionStep { dep: q(&set, "ia R: A _|_ B"), just: Justification::Hypothesis },
            ],
        };
        assert!(!verify_deduction(&set, &d));
        let mut ok = d.clone();
        ok.steps.swap(0, 1);
        ok.steps[1].just = Justification::Rule { rule: Rule::I2, premises: vec![0] };
        assert!(verify_deduction(&set, &ok));
    }

    #[test]
    fn finite_cycle_is_derived_only_with_cycle_rules() {
        let set = parse_spec("schema R(A,B)\nfd R: A -> B\nind R[A] <= R[B]").unwrap();
        let sigma = q(&set, "ind R[B] <= R[A]");
        let Derivation::Derived(d) = derive(&set, &sigma, &RuleSystem::star_finite(), 100_000) else { panic!() };
        assert!(verify_deduction(&set, &d));
        assert!(matches!(derive(&set, &sigma, &RuleSystem::star_unrestricted(), 100_000), Derivation::NotDerivable { .. }));
    }
}
