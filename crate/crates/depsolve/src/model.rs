//! Schemata, dependencies and the structural operations every engine shares.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

pub type AttrId = usize;
pub type RelId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Attribute {
    pub name: String,
    pub relation: RelId,
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationSchema {
    pub name: String,
    pub attrs: Vec<AttrId>,
}

/// Relation schemata with pairwise disjoint attribute names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DatabaseSchema {
    relations: Vec<RelationSchema>,
    attributes: Vec<Attribute>,
    #[serde(skip)]
    by_name: BTreeMap<String, AttrId>,
}

impl DatabaseSchema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(name: &str, attrs: &[&str]) -> Self {
        let mut s = Self::new();
        s.add_relation(name, attrs).expect("valid single relation");
        s
    }

    pub fn add_relation<S: AsRef<str>>(&mut self, name: &str, attrs: &[S]) -> Result<RelId> {
        if name.is_empty() {
            return Err(Error::Malformed("empty relation name".into()));
        }
        if self.relation_by_name(name).is_some() {
            return Err(Error::DuplicateRelation(name.to_string()));
        }
        let rel = self.relations.len();
        let mut ids = Vec::with_capacity(attrs.len());
        for (position, a) in attrs.iter().enumerate() {
            let a = a.as_ref();
            if a.is_empty() {
                return Err(Error::Malformed("empty attribute name".into()));
            }
            if self.by_name.contains_key(a) {
                return Err(Error::DuplicateAttribute(a.to_string()));
            }
            let id = self.attributes.len();
            self.attributes.push(Attribute { name: a.to_string(), relation: rel, position });
            self.by_name.insert(a.to_string(), id);
            ids.push(id);
        }
        self.relations.push(RelationSchema { name: name.to_string(), attrs: ids });
        Ok(rel)
    }

    /// Appends a fresh attribute to an existing relation.
    pub fn extend_relation(&mut self, rel: RelId, name: &str) -> Result<AttrId> {
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateAttribute(name.to_string()));
        }
        let id = self.attributes.len();
        let position = self.relations[rel].attrs.len();
        self.attributes.push(Attribute { name: name.to_string(), relation: rel, position });
        self.by_name.insert(name.to_string(), id);
        self.relations[rel].attrs.push(id);
        Ok(id)
    }

    pub fn relations(&self) -> &[RelationSchema] {
        &self.relations
    }

    pub fn relation(&self, r: RelId) -> &RelationSchema {
        &self.relations[r]
    }

    pub fn relation_by_name(&self, name: &str) -> Option<RelId> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn rel_name(&self, r: RelId) -> &str {
        &self.relations[r].name
    }

    pub fn num_attrs(&self) -> usize {
        self.attributes.len()
    }

    pub fn attr(&self, a: AttrId) -> &Attribute {
        &self.attributes[a]
    }

    pub fn attr_by_name(&self, name: &str) -> Option<AttrId> {
        self.by_name.get(name).copied()
    }

    pub fn attr_name(&self, a: AttrId) -> &str {
        &self.attributes[a].name
    }

    pub fn relation_of(&self, a: AttrId) -> RelId {
        self.attributes[a].relation
    }

    pub fn position(&self, a: AttrId) -> usize {
        self.attributes[a].position
    }

    pub fn attrs_of(&self, r: RelId) -> &[AttrId] {
        &self.relations[r].attrs
    }

    pub fn attr_set(&self, r: RelId) -> AttrSet {
        self.relations[r].attrs.iter().copied().collect()
    }

    pub fn fresh_name(&self, stem: &str) -> String {
        (1..)
            .map(|i| format!("{stem}{i}"))
            .find(|n| !self.by_name.contains_key(n))
            .expect("unbounded name supply")
    }

    pub fn names(&self, attrs: &AttrSet) -> Vec<String> {
        attrs.iter().map(|a| self.attr_name(a).to_string()).collect()
    }
}

/// Finite attribute set in ascending id order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AttrSet(BTreeSet<AttrId>);

impl AttrSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(a: AttrId) -> Self {
        Self(BTreeSet::from([a]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, a: AttrId) -> bool {
        self.0.contains(&a)
    }

    pub fn insert(&mut self, a: AttrId) -> bool {
        self.0.insert(a)
    }

    pub fn remove(&mut self, a: AttrId) -> bool {
        self.0.remove(&a)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = AttrId> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<AttrId> {
        self.0.first().copied()
    }

    pub fn union(&self, o: &AttrSet) -> AttrSet {
        Self(self.0.union(&o.0).copied().collect())
    }

    pub fn intersection(&self, o: &AttrSet) -> AttrSet {
        Self(self.0.intersection(&o.0).copied().collect())
    }

    pub fn difference(&self, o: &AttrSet) -> AttrSet {
        Self(self.0.difference(&o.0).copied().collect())
    }

    pub fn is_subset(&self, o: &AttrSet) -> bool {
        self.0.is_subset(&o.0)
    }

    pub fn is_disjoint(&self, o: &AttrSet) -> bool {
        self.0.is_disjoint(&o.0)
    }

    pub fn extend<I: IntoIterator<Item = AttrId>>(&mut self, it: I) {
        self.0.extend(it)
    }

    pub fn to_vec(&self) -> Vec<AttrId> {
        self.iter().collect()
    }
}

impl FromIterator<AttrId> for AttrSet {
    fn from_iter<I: IntoIterator<Item = AttrId>>(it: I) -> Self {
        Self(it.into_iter().collect())
    }
}

impl<const N: usize> From<[AttrId; N]> for AttrSet {
    fn from(a: [AttrId; N]) -> Self {
        a.into_iter().collect()
    }
}

impl<'a> IntoIterator for &'a AttrSet {
    type Item = AttrId;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, AttrId>>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Finite,
    Unrestricted,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Finite => "finite",
            Mode::Unrestricted => "unrestricted",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dependency {
    Fd { rel: RelId, lhs: AttrSet, rhs: AttrSet },
    Ind { lhs_rel: RelId, lhs: Vec<AttrId>, rhs_rel: RelId, rhs: Vec<AttrId> },
    Ia { rel: RelId, left: AttrSet, right: AttrSet },
}

impl Dependency {
    pub fn fd(rel: RelId, lhs: impl Into<AttrSet>, rhs: impl Into<AttrSet>) -> Self {
        Dependency::Fd { rel, lhs: lhs.into(), rhs: rhs.into() }
    }

    pub fn ia(rel: RelId, left: impl Into<AttrSet>, right: impl Into<AttrSet>) -> Self {
        Dependency::Ia { rel, left: left.into(), right: right.into() }
    }

    pub fn ind(lhs_rel: RelId, lhs: Vec<AttrId>, rhs_rel: RelId, rhs: Vec<AttrId>) -> Self {
        Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs }
    }

    pub fn ca(rel: RelId, a: AttrId) -> Self {
        Dependency::ia(rel, AttrSet::singleton(a), AttrSet::singleton(a))
    }

    pub fn is_fd(&self) -> bool {
        matches!(self, Dependency::Fd { .. })
    }

    pub fn is_ind(&self) -> bool {
        matches!(self, Dependency::Ind { .. })
    }

    pub fn is_ia(&self) -> bool {
        matches!(self, Dependency::Ia { .. })
    }

    /// `X⊥X` or `∅→A`.
    pub fn is_ca(&self) -> bool {
        match self {
            Dependency::Ia { left, right, .. } => !left.is_empty() && left == right,
            Dependency::Fd { lhs, rhs, .. } => lhs.is_empty() && rhs.len() == 1,
            Dependency::Ind { .. } => false,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Dependency::Fd { lhs, rhs, .. } => lhs.len().max(rhs.len()),
            Dependency::Ind { lhs, .. } => lhs.len(),
            Dependency::Ia { left, right, .. } => left.len().max(right.len()),
        }
    }

    pub fn relations(&self) -> Vec<RelId> {
        match self {
            Dependency::Fd { rel, .. } | Dependency::Ia { rel, .. } => vec![*rel],
            Dependency::Ind { lhs_rel, rhs_rel, .. } => vec![*lhs_rel, *rhs_rel],
        }
    }

    pub fn attrs(&self) -> AttrSet {
        match self {
            Dependency::Fd { lhs, rhs, .. } => lhs.union(rhs),
            Dependency::Ia { left, right, .. } => left.union(right),
            Dependency::Ind { lhs, rhs, .. } => lhs.iter().chain(rhs).copied().collect(),
        }
    }

    pub fn check(&self, schema: &DatabaseSchema) -> Result<()> {
        let in_rel = |r: RelId, a: AttrId| {
            r < schema.relations().len() && a < schema.num_attrs() && schema.relation_of(a) == r
        };
        match self {
            Dependency::Fd { rel, lhs, rhs } | Dependency::Ia { rel, left: lhs, right: rhs } => {
                if *rel >= schema.relations().len() {
                    return Err(Error::Malformed(format!("unknown relation #{rel}")));
                }
                if let Some(a) = lhs.iter().chain(rhs.iter()).find(|&a| !in_rel(*rel, a)) {
                    return Err(Error::Malformed(format!(
                        "attribute #{a} is not in {}",
                        schema.rel_name(*rel)
                    )));
                }
            }
            Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs } => {
                if lhs.len() != rhs.len() {
                    return Err(Error::Malformed("inclusion sides differ in length".into()));
                }
                for (r, seq) in [(lhs_rel, lhs), (rhs_rel, rhs)] {
                    if let Some(a) = seq.iter().find(|&&a| !in_rel(*r, a)) {
                        return Err(Error::Malformed(format!("attribute #{a} is misplaced")));
                    }
                    let distinct: BTreeSet<_> = seq.iter().collect();
                    if distinct.len() != seq.len() {
                        return Err(Error::Malformed("repeated attribute in inclusion".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// IA with its sides in lexicographic order.
    pub fn canonical(&self) -> Dependency {
        match self {
            Dependency::Ia { rel, left, right } if right < left => {
                Dependency::Ia { rel: *rel, left: right.clone(), right: left.clone() }
            }
            d => d.clone(),
        }
    }

    pub fn show<'a>(&'a self, schema: &'a DatabaseSchema) -> Shown<'a> {
        Shown { dep: self, schema }
    }
}

/// Restriction of a dependency to an attribute set.
pub fn restrict(dep: &Dependency, attrs: &AttrSet) -> Dependency {
    match dep {
        Dependency::Fd { rel, lhs, rhs } => {
            Dependency::Fd { rel: *rel, lhs: lhs.intersection(attrs), rhs: rhs.intersection(attrs) }
        }
        Dependency::Ia { rel, left, right } => Dependency::Ia {
            rel: *rel,
            left: left.intersection(attrs),
            right: right.intersection(attrs),
        },
        Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs } => {
            let (l, r): (Vec<_>, Vec<_>) = lhs
                .iter()
                .zip(rhs)
                .filter(|(a, b)| attrs.contains(**a) && attrs.contains(**b))
                .map(|(a, b)| (*a, *b))
                .unzip();
            Dependency::Ind { lhs_rel: *lhs_rel, lhs: l, rhs_rel: *rhs_rel, rhs: r }
        }
    }
}

/// Splits `X⊥Y` into `(X\Y)⊥(Y\X)` and the constancy atoms of the overlap.
pub fn decompose_ia_query(sigma: &Dependency) -> Option<(Dependency, Vec<Dependency>)> {
    let Dependency::Ia { rel, left, right } = sigma else { return None };
    let dia = Dependency::Ia { rel: *rel, left: left.difference(right), right: right.difference(left) };
    let cas = left.intersection(right).iter().map(|a| Dependency::ca(*rel, a)).collect();
    Some((dia, cas))
}

/// Is the dependency satisfied by every relation (no information content)?
pub fn is_trivial(dep: &Dependency) -> bool {
    match dep {
        Dependency::Fd { lhs, rhs, .. } => rhs.is_subset(lhs),
        Dependency::Ia { left, right, .. } => left.is_empty() || right.is_empty(),
        Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs } => lhs_rel == rhs_rel && lhs == rhs,
    }
}

pub struct Shown<'a> {
    dep: &'a Dependency,
    schema: &'a DatabaseSchema,
}

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.schema;
        let list = |set: &AttrSet| s.names(set).join(" ");
        let seq = |v: &[AttrId]| v.iter().map(|&a| s.attr_name(a)).collect::<Vec<_>>().join(",");
        match self.dep {
            Dependency::Fd { rel, lhs, rhs } => {
                write!(f, "fd {}: ", s.rel_name(*rel))?;
                if !lhs.is_empty() {
                    write!(f, "{} ", list(lhs))?;
                }
                write!(f, "->")?;
                if !rhs.is_empty() {
                    write!(f, " {}", list(rhs))?;
                }
                Ok(())
            }
            Dependency::Ia { rel, left, right } => {
                write!(f, "ia {}: ", s.rel_name(*rel))?;
                if !left.is_empty() {
                    write!(f, "{} ", list(left))?;
                }
                write!(f, "_|_")?;
                if !right.is_empty() {
                    write!(f, " {}", list(right))?;
                }
                Ok(())
            }
            Dependency::Ind { lhs_rel, lhs, rhs_rel, rhs } => write!(
                f,
                "ind {}[{}] <= {}[{}]",
                s.rel_name(*lhs_rel),
                seq(lhs),
                s.rel_name(*rhs_rel),
                seq(rhs)
            ),
        }
    }
}

/// A finite set of dependencies over one schema.
#[derive(Clone, Debug)]
pub struct DependencySet {
    pub schema: Arc<DatabaseSchema>,
    pub deps: Vec<Dependency>,
}

impl DependencySet {
    pub fn new(schema: Arc<DatabaseSchema>, deps: Vec<Dependency>) -> Result<Self> {
        for d in &deps {
            d.check(&schema)?;
        }
        Ok(Self { schema, deps })
    }

    pub fn empty(schema: Arc<DatabaseSchema>) -> Self {
        Self { schema, deps: Vec::new() }
    }

    pub fn with(&self, deps: Vec<Dependency>) -> Self {
        Self { schema: self.schema.clone(), deps }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Dependency> {
        self.deps.iter()
    }

    pub fn fds(&self) -> impl Iterator<Item = &Dependency> {
        self.deps.iter().filter(|d| d.is_fd())
    }

    pub fn inds(&self) -> impl Iterator<Item = &Dependency> {
        self.deps.iter().filter(|d| d.is_ind())
    }

    pub fn ias(&self) -> impl Iterator<Item = &Dependency> {
        self.deps.iter().filter(|d| d.is_ia())
    }

    /// Splits every `X⊥X` with `|X|>1` into single-attribute constancy atoms.
    pub fn normalized(&self) -> Self {
        let mut out = Vec::new();
        for d in &self.deps {
            match d {
                Dependency::Ia { rel, left, right } if left == right && left.len() > 1 => {
                    out.extend(left.iter().map(|a| Dependency::ca(*rel, a)));
                }
                d => out.push(d.clone()),
            }
        }
        self.with(out)
    }

    /// Attributes mentioned by the set and the query.
    pub fn mentioned(&self, sigma: Option<&Dependency>) -> AttrSet {
        let mut s = AttrSet::new();
        for d in self.deps.iter().chain(sigma) {
            s.extend(d.attrs().iter());
        }
        s
    }
}

impl fmt::Display for DependencySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.schema.relations() {
            let names: Vec<_> = r.attrs.iter().map(|&a| self.schema.attr_name(a)).collect();
            writeln!(f, "schema {}({})", r.name, names.join(","))?;
        }
        for d in &self.deps {
            writeln!(f, "{}", d.show(&self.schema))?;
        }
        Ok(())
    }
}

/// Which dependency classes occur, and how wide they are.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassProfile {
    pub has_fd: bool,
    pub has_ind: bool,
    pub has_ia: bool,
    pub max_fd_arity: usize,
    pub max_ind_arity: usize,
    pub max_ia_arity: usize,
    pub all_fds_unary: bool,
    /// Every FD has at most one attribute on its left.
    pub all_fd_lhs_unary: bool,
    pub all_inds_unary: bool,
    pub multi_relational: bool,
}

impl ClassProfile {
    pub fn of<'a, I: IntoIterator<Item = &'a Dependency>>(deps: I) -> Self {
        let mut p = ClassProfile { all_fds_unary: true, all_fd_lhs_unary: true, all_inds_unary: true, ..Default::default() };
        let mut rels = BTreeSet::new();
        for d in deps {
            rels.extend(d.relations());
            let k = d.arity();
            match d {
                Dependency::Fd { lhs, .. } => {
                    p.has_fd = true;
                    p.all_fd_lhs_unary &= lhs.len() <= 1;
                    p.max_fd_arity = p.max_fd_arity.max(k);
                    p.all_fds_unary &= k <= 1;
                }
                Dependency::Ind { .. } => {
                    p.has_ind = true;
                    p.max_ind_arity = p.max_ind_arity.max(k);
                    p.all_inds_unary &= k <= 1;
                }
                Dependency::Ia { .. } => {
                    p.has_ia = true;
                    p.max_ia_arity = p.max_ia_arity.max(k);
                }
            }
        }
        p.multi_relational = rels.len() > 1;
        p
    }

    pub fn is_ind_ia(&self) -> bool {
        !self.has_fd
    }

    pub fn is_fd_ia(&self) -> bool {
        !self.has_ind && !self.multi_relational
    }

    pub fn is_ufd_uind_ia(&self) -> bool {
        self.all_fds_unary && self.all_inds_unary && !self.multi_relational
    }

    pub fn is_ufd_ia(&self) -> bool {
        self.is_fd_ia() && self.all_fds_unary
    }
}

/// Profile of `Σ∪{σ}`.
pub fn classify(set: &DependencySet, sigma: &Dependency) -> Result<ClassProfile> {
    sigma.check(&set.schema)?;
    Ok(ClassProfile::of(set.deps.iter().chain(std::iter::once(sigma))))
}

/// Replaces every IA `X⊥Y` by `{A⊥B, X→A, A→X, Y→B, B→Y}` with fresh `A`, `B`.
pub fn unarize_ias(set: &DependencySet, sigma: &Dependency) -> Result<(DependencySet, Dependency)> {
    if set.deps.iter().chain(std::iter::once(sigma)).any(|d| d.is_ind()) {
        return Err(Error::NotFdIa);
    }
    let mut schema = (*set.schema).clone();
    let mut deps = Vec::new();
    let wrap = |schema: &mut DatabaseSchema, rel, left: &AttrSet, right: &AttrSet, out: &mut Vec<_>| {
        let name = schema.fresh_name("F");
        let a = schema.extend_relation(rel, &name)?;
        let name = schema.fresh_name("F");
        let b = schema.extend_relation(rel, &name)?;
        let (a, b) = (AttrSet::singleton(a), AttrSet::singleton(b));
        out.push(Dependency::fd(rel, left.clone(), a.clone()));
        out.push(Dependency::fd(rel, a.clone(), left.clone()));
        out.push(Dependency::fd(rel, right.clone(), b.clone()));
        out.push(Dependency::fd(rel, b.clone(), right.clone()));
        Ok::<_, Error>((a, b))
    };
    for d in &set.deps {
        match d {
            Dependency::Ia { rel, left, right } => {
                let (a, b) = wrap(&mut schema, *rel, left, right, &mut deps)?;
                deps.push(Dependency::Ia { rel: *rel, left: a, right: b });
            }
            d => deps.push(d.clone()),
        }
    }
    let sigma2 = match sigma {
        Dependency::Ia { rel, left, right } => {
            let (a, b) = wrap(&mut schema, *rel, left, right, &mut deps)?;
            Dependency::Ia { rel: *rel, left: a, right: b }
        }
        d => d.clone(),
    };
    Ok((DependencySet { schema: Arc::new(schema), deps }, sigma2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abcd() -> DatabaseSchema {
        DatabaseSchema::single("R", &["A", "B", "C", "D"])
    }

    #[test]
    fn restriction_is_componentwise() {
        let s = abcd();
        let d = Dependency::fd(0, [0, 1], [2, 3]);
        assert_eq!(restrict(&d, &[0, 2].into()), Dependency::fd(0, [0], [2]));
        let ia = Dependency::ia(0, [0, 1], [0, 2]);
        assert_eq!(restrict(&ia, &[1, 2].into()), Dependency::ia(0, [1], [2]));
        assert_eq!(d.show(&s).to_string(), "fd R: A B -> C D");
    }

    #[test]
    fn ind_restriction_keeps_matching_positions() {
        let mut s = DatabaseSchema::new();
        s.add_relation("R", &["A", "B"]).unwrap();
        s.add_relation("S", &["E", "F"]).unwrap();
        let d = Dependency::ind(0, vec![0, 1], 1, vec![2, 3]);
        assert_eq!(restrict(&d, &[0, 2].into()), Dependency::ind(0, vec![0], 1, vec![2]));
    }

    #[test]
    fn decomposition_of_overlapping_atoms() {
        let (dia, cas) = decompose_ia_query(&Dependency::ia(0, [0, 1], [1, 2])).unwrap();
        assert_eq!(dia, Dependency::ia(0, [0], [2]));
        assert_eq!(cas, vec![Dependency::ca(0, 1)]);
        let (dia, cas) = decompose_ia_query(&Dependency::ia(0, [0, 1], [0, 1])).unwrap();
        assert_eq!(dia, Dependency::ia(0, AttrSet::new(), AttrSet::new()));
        assert_eq!(cas.len(), 2);
    }

    #[test]
    fn schema_rejects_shared_names() {
        let mut s = DatabaseSchema::new();
        s.add_relation("R", &["A"]).unwrap();
        assert_eq!(s.add_relation("S", &["A"]), Err(Error::DuplicateAttribute("A".into())));
        assert_eq!(s.add_relation("R", &["B"]), Err(Error::DuplicateRelation("R".into())));
    }

    #[test]
    fn profile_reports_arity() {
        let p = ClassProfile::of(&[Dependency::fd(0, [0, 1], [2]), Dependency::ia(0, [0], [1])]);
        assert!(p.has_fd && p.has_ia && !p.has_ind);
        assert_eq!(p.max_fd_arity, 2);
        assert!(!p.all_fds_unary);
    }

    #[test]
    fn unarize_wraps_each_atom() {
        let set = DependencySet::new(Arc::new(abcd()), vec![Dependency::ia(0, [0, 1], [2])]).unwrap();
        let (s2, q) = unarize_ias(&set, &Dependency::fd(0, [0], [1])).unwrap();
        assert_eq!(s2.deps.len(), 5);
        assert_eq!(s2.schema.num_attrs(), 6);
        assert_eq!(q, Dependency::fd(0, [0], [1]));
        assert_eq!(s2.deps[4].show(&s2.schema).to_string(), "ia R: F1 _|_ F2");
    }
}
