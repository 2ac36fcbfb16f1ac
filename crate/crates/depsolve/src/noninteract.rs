//! Syntactic non-interaction criteria between IAs and FDs or INDs, and the class-separate
//! decisions they license.

use serde_json::json;

use crate::chase::{chase_dia, graph_chase_fd_ia};
use crate::error::{Error, Result};
use crate::model::{AttrSet, DatabaseSchema, Dependency, DependencySet, Mode};
use crate::polyengine::{algorithm1, fd_closure, sole_relation, AlgOneResult};
use crate::semantics::{satisfies, satisfies_all, Database, Value};
use crate::verdict::{Evidence, Refutation, Verdict};

/// Vertex budget when the graph chase is only asked for a finite witness.
const FALLBACK_BUDGET: usize = 100;

/// `X⊥Y` splits `U→V` when both `(X\Y)∩U` and `(Y\X)∩U` are non-empty, and splits `Z⊆W` when
/// both `X∩W` and `Y∩W` are.
pub fn splits(ia: &Dependency, target: &Dependency) -> bool {
    let Dependency::Ia { left: x, right: y, .. } = ia else { return false };
    match target {
        Dependency::Fd { lhs: u, .. } => {
            !x.difference(y).intersection(u).is_empty() && !y.difference(x).intersection(u).is_empty()
        }
        Dependency::Ind { rhs, .. } => {
            let w: AttrSet = rhs.iter().copied().collect();
            !x.intersection(&w).is_empty() && !y.intersection(&w).is_empty()
        }
        Dependency::Ia { .. } => false,
    }
}

/// `X⊥Y` intersects `U→V` when `XY∩U` is non-empty, and `Z⊆W` when `XY∩W` is.
pub fn intersects(ia: &Dependency, target: &Dependency) -> bool {
    let Dependency::Ia { left: x, right: y, .. } = ia else { return false };
    let xy = x.union(y);
    match target {
        Dependency::Fd { lhs: u, .. } => !xy.intersection(u).is_empty(),
        Dependency::Ind { rhs, .. } => rhs.iter().any(|&a| xy.contains(a)),
        Dependency::Ia { .. } => false,
    }
}

#[derive(Clone, Debug)]
pub struct NonInteractionReport {
    pub mode: Mode,
    pub guaranteed: bool,
    /// Offending `(IA, FD or IND)` pairs.
    pub witnesses: Vec<(Dependency, Dependency)>,
    /// `Σ_FD*` and `Σ_IA*` for FD+IA in unrestricted mode.
    pub transformed: Option<AlgOneResult>,
}

impl NonInteractionReport {
    pub fn to_json(&self, schema: &DatabaseSchema) -> serde_json::Value {
        json!({
            "mode": self.mode.to_string(),
            "guaranteed": self.guaranteed,
            "witnesses": self.witnesses.iter().map(|(a, b)| json!([a.show(schema).to_string(), b.show(schema).to_string()])).collect::<Vec<_>>(),
            "transformed": self.transformed.as_ref().map(|t| t.to_json(schema)),
        })
    }
}

fn offending(ias: &[Dependency], others: &[Dependency], test: fn(&Dependency, &Dependency) -> bool) -> Vec<(Dependency, Dependency)> {
    let mut out = Vec::new();
    for ia in ias {
        for d in others {
            if test(ia, d) {
                out.push((ia.clone(), d.clone()));
            }
        }
    }
    out
}

/// No IA splits any IND: then INDs and IAs do not interact in either mode.
pub fn noninteract_ind_ia(set: &DependencySet) -> Result<NonInteractionReport> {
    if set.fds().next().is_some() {
        return Err(Error::NotIndIa);
    }
    let ias: Vec<Dependency> = set.ias().cloned().collect();
    let inds: Vec<Dependency> = set.inds().cloned().collect();
    let witnesses = offending(&ias, &inds, splits);
    Ok(NonInteractionReport { mode: Mode::Finite, guaranteed: witnesses.is_empty(), witnesses, transformed: None })
}

/// Unrestricted: no IA of `Σ_IA*` splits an FD of `Σ_FD*`. Finite: no IA of `Σ_IA` intersects
/// an FD of `Σ_FD`. A negative answer only means the criterion is not met.
pub fn noninteract_fd_ia(set: &DependencySet, mode: Mode) -> Result<NonInteractionReport> {
    if set.inds().next().is_some() {
        return Err(Error::NotFdIa);
    }
    sole_relation(set, None)?;
    let alg = algorithm1(set)?;
    let witnesses = match mode {
        Mode::Unrestricted => offending(&alg.ia_star, &alg.fd_star, splits),
        Mode::Finite => {
            let ias: Vec<Dependency> = set.ias().cloned().collect();
            let fds: Vec<Dependency> = set.fds().cloned().collect();
            offending(&ias, &fds, intersects)
        }
    };
    Ok(NonInteractionReport { mode, guaranteed: witnesses.is_empty(), witnesses, transformed: Some(alg) })
}

/// Decides `σ` with the FD and IA engines separately, given a guaranteed report for `set`.
pub fn imply_separately(set: &DependencySet, sigma: &Dependency, report: &NonInteractionReport) -> Result<Verdict> {
    if !report.guaranteed {
        return Err(Error::UnsupportedClass("the non-interaction criterion is not met".into()));
    }
    let rel = sole_relation(set, Some(sigma))?;
    let (fds, ias): (Vec<Dependency>, Vec<Dependency>) = match (&report.transformed, report.mode) {
        (Some(t), Mode::Unrestricted) => (t.fd_star.clone(), t.ia_star.clone()),
        _ => (set.fds().cloned().collect(), set.ias().cloned().collect()),
    };
    let pairs: Vec<(AttrSet, AttrSet)> = fds
        .iter()
        .filter_map(|d| match d {
            Dependency::Fd { lhs, rhs, .. } => Some((lhs.clone(), rhs.clone())),
            _ => None,
        })
        .collect();
    let mut constants = fd_closure(&pairs, &AttrSet::new());
    for d in &ias {
        if let Dependency::Ia { left, right, .. } = d {
            constants.extend(left.intersection(right).iter());
        }
    }
    let schema = &set.schema;
    match sigma {
        Dependency::Fd { lhs, rhs, .. } => {
            let cl = fd_closure(&pairs, lhs);
            match rhs.iter().find(|&b| !cl.contains(b) && !constants.contains(b)) {
                None => Ok(Verdict::Implied(Evidence::Reason(format!(
                    "{} follows from the FDs and the constants {{{}}}",
                    sigma.show(schema),
                    schema.names(&constants).join(" ")
                )))),
                Some(_) => Ok(refute(set, sigma, &cl.union(&constants), &constants, None)),
            }
        }
        Dependency::Ia { left, right, .. } => {
            let (x, y) = (left.difference(&constants), right.difference(&constants));
            if !x.is_disjoint(&y) {
                return Ok(refute(set, sigma, &constants, &constants, None));
            }
            if x.is_empty() || y.is_empty() {
                return Ok(Verdict::Implied(Evidence::Reason("trivial once constants are removed".into())));
            }
            let restricted: Vec<Dependency> = ias
                .iter()
                .filter_map(|d| match d {
                    Dependency::Ia { left, right, .. } => {
                        let (l, r) = (left.difference(&constants), right.difference(&constants));
                        (!l.is_empty() && !r.is_empty()).then(|| Dependency::ia(rel, l, r))
                    }
                    _ => None,
                })
                .collect();
            let only = set.with(restricted);
            match chase_dia(&only, &Dependency::ia(rel, x, y))? {
                Verdict::NotImplied(Refutation::Database(db)) => Ok(refute(set, sigma, &constants, &constants, Some(*db))),
                v => Ok(v),
            }
        }
        Dependency::Ind { .. } => Err(Error::NotFdIa),
    }
}

/// The finite construction from the non-interaction proof: `zero` attributes are 0, attributes
/// of the IAs vary as in `base` (or over `{0,1}`), every other attribute is a fresh key.
fn refute(set: &DependencySet, sigma: &Dependency, zero: &AttrSet, constants: &AttrSet, base: Option<Database>) -> Verdict {
    let schema = &set.schema;
    let rel = sigma.relations()[0];
    let attrs = schema.attrs_of(rel);
    let mut in_ias = AttrSet::new();
    for d in set.ias() {
        in_ias.extend(d.attrs().iter());
    }
    in_ias = in_ias.difference(zero);
    let rows: Vec<Vec<Value>> = match &base {
        Some(db) => db.relations[rel].iter().cloned().collect(),
        None => {
            let vary: Vec<usize> = attrs.iter().filter(|&&a| in_ias.contains(a)).map(|&a| schema.position(a)).collect();
            if vary.len() > 16 {
                return Verdict::NotImplied(Refutation::Certificate("neither class implies the query".into()));
            }
            (0..(1u32 << vary.len()).max(2))
                .map(|m| {
                    let mut t = vec![0; attrs.len()];
                    for (i, &p) in vary.iter().enumerate() {
                        t[p] = m >> i & 1;
                    }
                    t
                })
                .collect()
        }
    };
    let mut db = Database::new(schema.clone());
    for (k, t) in rows.iter().enumerate() {
        let u: Vec<Value> = attrs
            .iter()
            .map(|&a| {
                let p = schema.position(a);
                if zero.contains(a) || constants.contains(a) {
                    0
                } else if in_ias.contains(a) {
                    t[p]
                } else {
                    k as Value + 2
                }
            })
            .collect();
        db.relations[rel].insert(u);
    }
    for r in 0..schema.relations().len() {
        if r != rel {
            db.relations[r].insert(vec![0; schema.attrs_of(r).len()]);
        }
    }
    if satisfies_all(&db, set) && !satisfies(&db, sigma) {
        return Verdict::refuted_by(db);
    }
    match graph_chase_fd_ia(set, sigma, FALLBACK_BUDGET) {
        Ok(v @ Verdict::NotImplied(Refutation::Database(_))) => v,
        _ => Verdict::NotImplied(Refutation::Certificate(format!(
            "neither the FDs nor the IAs imply {}",
            sigma.show(schema)
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_dependency, parse_spec};

    fn deps(spec: &str) -> DependencySet {
        parse_spec(spec).unwrap()
    }

    #[test]
    fn split_and_intersect_examples() {
        let s = deps("schema R(A,B,C,D)\nia R: A _|_ B\nfd R: A B -> C\nfd R: A -> C\nind R[C,D] <= R[A,B]\nfd R: A C -> D\nfd R: C -> D\nia R: A _|_ A");
        let (ab, aa) = (&s.deps[0], &s.deps[6]);
        assert!(splits(ab, &s.deps[1]));
        assert!(!splits(ab, &s.deps[2]));
        assert!(splits(ab, &s.deps[3]));
        assert!(intersects(ab, &s.deps[4]));
        assert!(!intersects(ab, &s.deps[5]));
        assert!(intersects(aa, &s.deps[2]));
    }

    #[test]
    fn reports() {
        let s = deps("schema R(A,B)\nschema S(E)\nind R[A] <= S[E]\nia R: A _|_ B");
        assert!(noninteract_ind_ia(&s).unwrap().guaranteed);
        let s = deps("schema R(A,B,C,D)\nind R[C,D] <= R[A,B]\nia R: A _|_ B");
        assert_eq!(noninteract_ind_ia(&s).unwrap().witnesses.len(), 1);
        let s = deps("schema R(A,B,C,D)\nfd R: C -> D\nia R: A _|_ B");
        assert!(noninteract_fd_ia(&s, Mode::Finite).unwrap().guaranteed);
        let s = deps("schema R(A,B,C,D)\nia R: A _|_ B\nia R: C _|_ D\nfd R: B C -> A D\nfd R: A D -> B C");
        assert!(!noninteract_fd_ia(&s, Mode::Finite).unwrap().guaranteed);
        let s = deps("schema R(A,B,C,D,E,X)\nia R: B _|_ C D\nia R: D _|_ A E\nia R: B C _|_ A D E\nfd R: A B -> X\nfd R: C D E -> X");
        let r = noninteract_fd_ia(&s, Mode::Unrestricted).unwrap();
        assert!(!r.guaranteed);
        assert!(r.witnesses.iter().any(|(ia, fd)| ia == &s.deps[2] && fd == &s.deps[3]));
    }

    #[test]
    fn separate_decisions() {
        let s = deps("schema R(A,B,C,D)\nfd R: C -> D\nia R: A _|_ B");
        let rep = noninteract_fd_ia(&s, Mode::Finite).unwrap();
        for (q, implied) in [("fd R: C -> D", true), ("fd R: A -> B", false), ("ia R: A _|_ B", true), ("ia R: A _|_ C", false)] {
            let q = parse_dependency(q, &s.schema).unwrap();
            let v = imply_separately(&s, &q, &rep).unwrap();
            assert_eq!(v.implied(), implied, "{v:?}");
            assert!(v.implied() || v.witness().is_some());
        }
    }
}
