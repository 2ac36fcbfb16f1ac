//! Routes an implication query to an engine by the class of `Σ∪{σ}`.

use std::fmt;
use std::str::FromStr;

use crate::axioms::{derive, verify_deduction, Deduction, Derivation, RuleSystem};
use crate::chase::{graph_chase_fd_ia, h_graph_reachable_capped, imply_ind_ia, HGRAPH_CAP, VERTEX_BUDGET};
use crate::error::{Error, Result};
use crate::model::{classify, AttrSet, ClassProfile, Dependency, DependencySet, Mode};
use crate::noninteract::{imply_separately, noninteract_fd_ia};
use crate::polyengine::{fd_closure, imply_star};
use crate::semantics::{satisfies, satisfies_all, Database};
use crate::verdict::{Evidence, Refutation, Verdict};

pub const DERIVE_BUDGET: usize = 200_000;

pub const FD_IND_WALL: &str = "implication of FDs together with INDs is undecidable, finite and unrestricted alike";
pub const FD_IA_FINITE_WALL: &str =
    "finite implication of FDs together with IAs has no finite axiomatization and its decidability is open; \
     the non-intersection criterion does not hold here";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    Auto,
    Chase,
    HGraph,
    Star,
    GraphChase,
    Derive,
    /// Attribute closure for FDs alone.
    Closure,
    /// FD and IA engines run separately under a non-interaction guarantee.
    Separate,
    /// No engine applies.
    None,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Auto => "auto",
            Engine::Chase => "chase",
            Engine::HGraph => "hgraph",
            Engine::Star => "star",
            Engine::GraphChase => "graphchase",
            Engine::Derive => "derive",
            Engine::Closure => "closure",
            Engine::Separate => "separate",
            Engine::None => "none",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Engine::Auto,
            "chase" => Engine::Chase,
            "hgraph" => Engine::HGraph,
            "star" => Engine::Star,
            "graphchase" => Engine::GraphChase,
            "derive" => Engine::Derive,
            _ => return Err(Error::UnsupportedQuery(format!("unknown engine `{s}`"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub engine: Engine,
    /// Vertex budget for the graph chase, node cap for the H-graph, fact budget for derive.
    pub budget: Option<usize>,
}

impl Default for Options {
    fn default() -> Self {
        Self { engine: Engine::Auto, budget: None }
    }
}

#[derive(Clone, Debug)]
pub struct Answer {
    pub verdict: Verdict,
    pub engine: Engine,
    pub mode: Mode,
}

/// Decides whether `set` implies `sigma` in `mode`.
pub fn imply(set: &DependencySet, sigma: &Dependency, mode: Mode, opts: &Options) -> Result<Answer> {
    let profile = classify(set, sigma)?;
    let (engine, verdict) = match opts.engine {
        Engine::Auto => auto(set, sigma, mode, &profile, opts.budget)?,
        e => (e, forced(e, set, sigma, mode, &profile, opts.budget)?),
    };
    Ok(Answer { verdict, engine, mode })
}

fn auto(set: &DependencySet, sigma: &Dependency, mode: Mode, p: &ClassProfile, budget: Option<usize>) -> Result<(Engine, Verdict)> {
    if p.is_ind_ia() {
        return Ok((Engine::Chase, imply_ind_ia(set, sigma)?));
    }
    if !p.has_ind {
        // Without inclusions, dependencies on other relations cannot interact with `σ`.
        let rel = sigma.relations()[0];
        let local = set.with(set.iter().filter(|d| d.relations() == [rel]).cloned().collect());
        let (e, v) = fd_ia(&local, sigma, mode, p, budget)?;
        return Ok((e, widen(v, set)));
    }
    if star_class(set, sigma) {
        return Ok((Engine::Star, imply_star(set, sigma, mode)?));
    }
    // A decidable part of Σ that implies σ settles the question; failing that, nothing does.
    if sigma.is_fd() {
        let rel = sigma.relations()[0];
        let local = set.with(set.iter().filter(|d| !d.is_ind() && d.relations() == [rel]).cloned().collect());
        let (e, v) = fd_ia(&local, sigma, mode, &classify(&local, sigma)?, budget)?;
        if v.implied() {
            return Ok((e, v));
        }
    } else {
        let part = set.with(set.iter().filter(|d| !d.is_fd()).cloned().collect());
        let v = imply_ind_ia(&part, sigma)?;
        if v.implied() {
            return Ok((Engine::Chase, v));
        }
    }
    Ok((Engine::None, Verdict::Unsupported(FD_IND_WALL.into())))
}

fn fd_ia(set: &DependencySet, sigma: &Dependency, mode: Mode, p: &ClassProfile, budget: Option<usize>) -> Result<(Engine, Verdict)> {
    if !p.has_ia {
        return Ok((Engine::Closure, fd_only(set, sigma)));
    }
    if star_class(set, sigma) {
        return Ok((Engine::Star, imply_star(set, sigma, mode)?));
    }
    let report = noninteract_fd_ia(set, mode)?;
    if report.guaranteed {
        return Ok((Engine::Separate, imply_separately(set, sigma, &report)?));
    }
    match mode {
        Mode::Unrestricted => Ok((Engine::GraphChase, graph_chase_fd_ia(set, sigma, budget.unwrap_or(VERTEX_BUDGET))?)),
        Mode::Finite => Ok((Engine::None, Verdict::Unsupported(FD_IA_FINITE_WALL.into()))),
    }
}

/// Uni-relational with unary FD left-hand sides and unary INDs.
fn star_class(set: &DependencySet, sigma: &Dependency) -> bool {
    let mut rels = Vec::new();
    for d in set.iter().chain(std::iter::once(sigma)) {
        rels.extend(d.relations());
        let ok = match d {
            Dependency::Fd { lhs, .. } => lhs.len() <= 1,
            Dependency::Ind { lhs, .. } => lhs.len() <= 1,
            Dependency::Ia { .. } => true,
        };
        if !ok {
            return false;
        }
    }
    rels.sort_unstable();
    rels.dedup();
    rels.len() == 1
}

/// Gives empty relations of a witness one tuple of zeros when that keeps it a witness.
fn widen(v: Verdict, set: &DependencySet) -> Verdict {
    let Verdict::NotImplied(Refutation::Database(db)) = &v else { return v };
    if satisfies_all(db, set) {
        return v;
    }
    let mut db = (**db).clone();
    for r in 0..db.relations.len() {
        if db.relations[r].is_empty() {
            db.relations[r].insert(vec![0; db.schema.attrs_of(r).len()]);
        }
    }
    if satisfies_all(&db, set) {
        Verdict::refuted_by(db)
    } else {
        Verdict::NotImplied(Refutation::Certificate("the witness for the query's relation does not extend".into()))
    }
}

/// FDs alone: attribute closure, refuted by the usual two-tuple relation.
fn fd_only(set: &DependencySet, sigma: &Dependency) -> Verdict {
    let Dependency::Fd { rel, lhs, rhs } = sigma else {
        return match sigma {
            Dependency::Ia { left, right, .. } if left.is_empty() || right.is_empty() => {
                Verdict::Implied(Evidence::Reason("an IA with an empty side always holds".into()))
            }
            _ => Verdict::Unsupported("only FD queries are meaningful against FDs alone".into()),
        };
    };
    let pairs: Vec<(AttrSet, AttrSet)> = set
        .fds()
        .filter_map(|d| match d {
            Dependency::Fd { lhs, rhs, .. } => Some((lhs.clone(), rhs.clone())),
            _ => None,
        })
        .collect();
    let cl = fd_closure(&pairs, lhs);
    let schema = &set.schema;
    if rhs.is_subset(&cl) {
        return Verdict::Implied(Evidence::Reason(format!("closure of {{{}}} is {{{}}}", schema.names(lhs).join(" "), schema.names(&cl).join(" "))));
    }
    let attrs = schema.attrs_of(*rel);
    let mut db = Database::new(set.schema.clone());
    db.relations[*rel].insert(vec![0; attrs.len()]);
    db.relations[*rel].insert(attrs.iter().map(|&a| u32::from(!cl.contains(a))).collect());
    debug_assert!(satisfies_all(&db, set) && !satisfies(&db, sigma));
    Verdict::refuted_by(db)
}

fn forced(e: Engine, set: &DependencySet, sigma: &Dependency, mode: Mode, p: &ClassProfile, budget: Option<usize>) -> Result<Verdict> {
    match e {
        Engine::Chase => {
            if p.has_fd {
                return Err(Error::NotIndIa);
            }
            imply_ind_ia(set, sigma)
        }
        Engine::HGraph => {
            if p.has_fd {
                return Err(Error::NotIndIa);
            }
            let reached = h_graph_reachable_capped(set, sigma, budget.unwrap_or(HGRAPH_CAP))?;
            Ok(if reached {
                Verdict::Implied(Evidence::Reason("the end node of the H-graph is reachable".into()))
            } else {
                Verdict::NotImplied(Refutation::Certificate("the end node of the H-graph is unreachable".into()))
            })
        }
        Engine::Star => imply_star(set, sigma, mode),
        Engine::GraphChase => {
            if mode == Mode::Finite {
                return Err(Error::UnsupportedQuery("the graph chase decides unrestricted implication only".into()));
            }
            graph_chase_fd_ia(set, sigma, budget.unwrap_or(VERTEX_BUDGET))
        }
        Engine::Derive => {
            let Some((sys, complete)) = rule_system(p, mode) else {
                return Ok(Verdict::Unsupported(FD_IND_WALL.into()));
            };
            Ok(match derive(set, sigma, &sys, budget.unwrap_or(DERIVE_BUDGET)) {
                Derivation::Derived(d) => Verdict::Implied(Evidence::Deduction(d)),
                Derivation::NotDerivable { facts } if complete => Verdict::NotImplied(Refutation::Certificate(format!(
                    "saturation under {} stops at {facts} facts without the query",
                    sys.name
                ))),
                Derivation::NotDerivable { facts } => Verdict::Unknown(format!(
                    "not derivable in {} ({facts} facts), which is incomplete for this class",
                    sys.name
                )),
                Derivation::Unknown { reason, .. } => Verdict::Unknown(reason),
            })
        }
        Engine::Auto | Engine::Closure | Engine::Separate | Engine::None => unreachable!("not selectable"),
    }
}

/// Rule budget for turning a chase proof into a deduction under `--explain`.
pub const EXPLAIN_BUDGET: usize = 20_000;

/// A verified deduction of `sigma` from the IND and IA part of `set`, if one is found cheaply.
pub fn deduce(set: &DependencySet, sigma: &Dependency) -> Option<Deduction> {
    if sigma.is_fd() {
        return None;
    }
    let part = set.with(set.iter().filter(|d| !d.is_fd()).cloned().collect());
    match derive(&part, sigma, &RuleSystem::ind_ia(), EXPLAIN_BUDGET) {
        Derivation::Derived(d) if verify_deduction(&part, &d) => Some(d),
        _ => None,
    }
}

/// The rule system for a class and whether it is complete there.
pub fn rule_system(p: &ClassProfile, mode: Mode) -> Option<(RuleSystem, bool)> {
    Some(match (p.has_fd, p.has_ind, p.has_ia) {
        (false, false, _) => (RuleSystem::i(), true),
        (false, true, _) => (RuleSystem::ind_ia(), true),
        (true, false, false) => (RuleSystem::a(), true),
        _ if !p.multi_relational && p.all_fd_lhs_unary && p.all_inds_unary => match mode {
            Mode::Finite => (RuleSystem::star_finite(), true),
            Mode::Unrestricted => (RuleSystem::star_unrestricted(), true),
        },
        (true, false, true) => (RuleSystem::a(), false),
        _ => return None,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_dependency, parse_spec};

    fn ask(spec: &str, q: &str, mode: Mode) -> Answer {
        let s = parse_spec(spec).unwrap();
        let q = parse_dependency(q, &s.schema).unwrap();
        imply(&s, &q, mode, &Options::default()).unwrap()
    }

    #[test]
    fn routes() {
        let fd_ia = "schema R(A,B,C,D)\nia R: A _|_ B\nia R: C _|_ D\nfd R: B C -> A D\nfd R: A D -> B C";
        let a = ask(fd_ia, "fd R: A B -> C D", Mode::Finite);
        assert_eq!((a.engine, a.verdict.exit_code()), (Engine::None, 3));
        let a = ask(fd_ia, "fd R: A B -> C D", Mode::Unrestricted);
        assert_eq!(a.verdict.exit_code(), 1);

        let cyc = "schema R(A,B)\nfd R: A -> B\nind R[A] <= R[B]";
        for q in ["ind R[B] <= R[A]", "fd R: B -> A"] {
            let f = ask(cyc, q, Mode::Finite);
            assert_eq!((f.engine, f.verdict.implied()), (Engine::Star, true));
            assert!(ask(cyc, q, Mode::Unrestricted).verdict.not_implied());
        }

        let a = ask("schema R(A,B)\nschema S(E)\nia R: A _|_ B\nind R[A] <= S[E]", "ind S[E] <= R[A]", Mode::Finite);
        assert_eq!(a.engine, Engine::Chase);
        assert!(a.verdict.not_implied());

        let a = ask("schema R(A,B,C)\nfd R: A B -> C\nfd R: C -> A", "fd R: B C -> A", Mode::Finite);
        assert_eq!((a.engine, a.verdict.implied()), (Engine::Closure, true));
        let a = ask("schema R(A,B,C)\nfd R: A B -> C", "fd R: A -> C", Mode::Finite);
        assert!(a.verdict.witness().is_some());

        let a = ask("schema R(A,B,C)\nschema S(D,E)\nfd R: A B -> C\nind S[D] <= R[A]", "fd R: A -> C", Mode::Finite);
        assert_eq!(a.verdict.exit_code(), 3);
    }

    #[test]
    fn other_relations_are_ignored_without_inds() {
        let a = ask("schema R(A,B,C)\nschema S(D,E)\nfd R: A B -> C\nia S: D _|_ E\nfd S: D -> E", "fd R: A -> C", Mode::Finite);
        let db = a.verdict.witness().expect("witness");
        assert!(db.relations.iter().all(|r| !r.is_empty()));
    }

    #[test]
    fn derive_engine() {
        let s = parse_spec("schema R(A,B,C)\nia R: A _|_ B C").unwrap();
        let opts = Options { engine: Engine::Derive, budget: None };
        let q = parse_dependency("ia R: B _|_ A", &s.schema).unwrap();
        assert!(imply(&s, &q, Mode::Finite, &opts).unwrap().verdict.implied());
        let q = parse_dependency("ia R: B _|_ C", &s.schema).unwrap();
        assert!(imply(&s, &q, Mode::Finite, &opts).unwrap().verdict.not_implied());
    }
}
