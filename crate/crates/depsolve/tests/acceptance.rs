//! The ten acceptance criteria, one PASS/FAIL line each.

mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use depsolve::armstrong::{armstrong_ind_ia, armstrong_star_finite, armstrong_ufd_ia, DEFAULT_ROW_CAP};
use depsolve::axioms::{apply_rule, derive, verify_deduction, Derivation, Rule, RuleSystem};
use depsolve::chase::{graph_chase_fd_ia, h_graph_reachable, imply_ind_ia};
use depsolve::engine::{imply, Options};
use depsolve::model::{AttrId, AttrSet, DatabaseSchema, Dependency, DependencySet, Mode};
use depsolve::noninteract::{imply_separately, noninteract_fd_ia};
use depsolve::parser::{load_csv, parse_dependency, parse_spec, CsvOptions};
use depsolve::polyengine::imply_star;
use depsolve::profiler::{mine_ias, MiningConfig};
use depsolve::semantics::{
    division_equals_projection, find_counterexample, generate_models, satisfies, satisfies_all, Database, OracleBounds, OracleOutcome,
};
use depsolve::verdict::Verdict;
use rand::Rng;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn spec(name: &str) -> DependencySet {
    parse_spec(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn q(set: &DependencySet, s: &str) -> Dependency {
    parse_dependency(s, &set.schema).unwrap()
}

fn auto(set: &DependencySet, sigma: &Dependency, mode: Mode) -> Verdict {
    imply(set, sigma, mode, &Options::default()).unwrap().verdict
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn oracle(time: u64, tuples: usize, values: usize) -> OracleBounds {
    OracleBounds { time_budget: Duration::from_secs(time), ..OracleBounds::new(tuples, values) }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let core = spec("clinic_core.dsl");
    let s12 = q(&core, "ind Disorder[d_pid, d_tid] <= Heart[h_pid, h_tid]");
    check(imply_ind_ia(&core, &s12).unwrap().implied(), || "(a) chase".into())?;
    check(h_graph_reachable(&core, &s12).unwrap(), || "(a) H-graph".into())?;

    let split = spec("split_fds.dsl");
    let ax = q(&split, "fd R: A -> X");
    check(graph_chase_fd_ia(&split, &ax, 50).unwrap().implied(), || "(b) graph chase within 50 vertices".into())?;
    let d = derive(&split, &ax, &RuleSystem::a(), 5_000_000);
    check(matches!(d, Derivation::NotDerivable { .. }), || format!("(b) derive: {d:?}"))?;

    let gap = spec("keys_gap.dsl");
    let abcd = q(&gap, "fd R: A B -> C D");
    check(auto(&gap, &abcd, Mode::Unrestricted).not_implied(), || "(c) unrestricted".into())?;
    check(matches!(auto(&gap, &abcd, Mode::Finite), Verdict::Unsupported(_)), || "(c) finite".into())?;
    let o = find_counterexample(&gap, &abcd, oracle(60, 6, 4)).unwrap();
    check(o == OracleOutcome::NoCounterexampleFound, || "(c) oracle found a counterexample".into())?;

    let cyc = spec("unary_cycle.dsl");
    for s in ["ind R[B] <= R[A]", "fd R: B -> A"] {
        let s = q(&cyc, s);
        check(auto(&cyc, &s, Mode::Finite).implied(), || "(d) finite".into())?;
        check(auto(&cyc, &s, Mode::Unrestricted).not_implied(), || "(d) unrestricted".into())?;
    }

    let s2 = spec("cyclic_keys_2.dsl");
    let key = q(&s2, "fd R: A1 B1 -> A1 B1 A2 B2");
    check(matches!(auto(&s2, &key, Mode::Finite), Verdict::Unsupported(_)), || "(e) finite".into())?;
    check(auto(&s2, &key, Mode::Unrestricted).not_implied(), || "(e) unrestricted".into())?;

    let took = start.elapsed();
    check(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("(a)-(e) exact in {took:.2?}"))
}

/// Finite-mode verdicts of the dispatcher against the bounded oracle.
fn criterion_2() -> Outcome {
    let mut tally = [0usize; 3];
    let classes: [(&str, fn(&mut Rng8) -> (DependencySet, Dependency)); 3] = [
        ("IND+IA", |r| ind_ia(r, true)),
        ("UFD+UIND+IA", |r| {
            let n = r.gen_range(2..=5);
            star(r, n, true, true)
        }),
        ("UFD+IA", |r| {
            let n = r.gen_range(2..=5);
            star(r, n, true, false)
        }),
    ];
    let mut unchecked = 0;
    for (k, (name, make)) in classes.iter().enumerate() {
        let mut rng = rng(200 + k as u64);
        for i in 0..500 {
            let (set, sigma) = make(&mut rng);
            match auto(&set, &sigma, Mode::Finite) {
                Verdict::Implied(_) => match find_counterexample(&set, &sigma, oracle(20, 5, 4)) {
                    Ok(OracleOutcome::NotImplied(db)) => {
                        return Err(format!("{name} #{i}: {} refuted by\n{db}\nfrom {set}", sigma.show(&set.schema)))
                    }
                    Ok(OracleOutcome::NoCounterexampleFound) => {}
                    Err(_) => unchecked += 1,
                },
                v @ Verdict::NotImplied(_) => {
                    let Some(db) = v.witness() else {
                        return Err(format!("{name} #{i}: no witness database for {}", sigma.show(&set.schema)));
                    };
                    check(satisfies_all(db, &set) && !satisfies(db, &sigma), || format!("{name} #{i}: bad witness"))?;
                }
                v => return Err(format!("{name} #{i}: {v}")),
            }
            tally[k] += 1;
        }
    }
    check(unchecked == 0, || format!("{unchecked} oracle runs exceeded their time budget"))?;
    Ok(format!("{}/{}/{} instances, no refutation", tally[0], tally[1], tally[2]))
}

fn criterion_3() -> Outcome {
    let mut rng = rng(300);
    let mut n = 0;
    while n < 200 {
        let (set, sigma) = ind_ia(&mut rng, false);
        let a = imply_ind_ia(&set, &sigma).unwrap().implied();
        let b = h_graph_reachable(&set, &sigma).unwrap();
        check(a == b, || format!("chase {a} vs H-graph {b} on {} from {set}", sigma.show(&set.schema)))?;
        n += 1;
    }
    for mode in [Mode::Finite, Mode::Unrestricted] {
        for _ in 0..200 {
            let k = rng.gen_range(2..=4);
            let (set, sigma) = star(&mut rng, k, false, true);
            let a = imply_star(&set, &sigma, mode).unwrap().implied();
            let b = imply_ind_ia(&set, &sigma).unwrap().implied();
            check(a == b, || format!("{mode}: star {a} vs chase {b} on {} from {set}", sigma.show(&set.schema)))?;
        }
    }
    let mut unknown = 0;
    for (mode, sys) in [(Mode::Finite, RuleSystem::star_finite()), (Mode::Unrestricted, RuleSystem::star_unrestricted())] {
        for _ in 0..100 {
            let k = rng.gen_range(2..=5);
            let (set, sigma) = star(&mut rng, k, true, true);
            let a = imply_star(&set, &sigma, mode).unwrap().implied();
            let b = match derive(&set, &sigma, &sys, 2_000_000) {
                Derivation::Derived(d) => {
                    check(verify_deduction(&set, &d), || "unverifiable deduction".into())?;
                    true
                }
                Derivation::NotDerivable { .. } => false,
                Derivation::Unknown { .. } => {
                    unknown += 1;
                    continue;
                }
            };
            check(a == b, || format!("{mode}: star {a} vs derive {b} on {} from {set}", sigma.show(&set.schema)))?;
        }
    }
    check(unknown == 0, || format!("{unknown} derivations ran out of budget"))?;
    Ok("200 chase/H-graph, 2x200 star/chase, 2x100 star/derive agree".into())
}

fn criterion_4() -> Outcome {
    let mut rules: Vec<Rule> = Rule::TABLE.to_vec();
    rules.extend([Rule::Cycle(1), Rule::Cycle(2), Rule::Cycle(3)]);
    let mut rng = rng(400);
    let mut models = 0;
    for &rule in &rules {
        let mut done = 0;
        let mut tries = 0;
        while done < 100 {
            tries += 1;
            check(tries < 10_000, || format!("{rule}: cannot instantiate"))?;
            let (schema, premises, inst) = rule_instance(&mut rng, rule);
            let Ok(concl) = apply_rule(&schema, rule, &premises, &inst) else { continue };
            let set = DependencySet::new(schema, premises).unwrap();
            let Ok(ms) = generate_models(&set, 5, OracleBounds::new(4, 3), rng.gen()) else { continue };
            for m in &ms {
                check(satisfies_all(m, &set), || "generator returned a non-model".into())?;
                check(satisfies(m, &concl), || format!("{rule}: {} fails in\n{m}from {set}", concl.show(&set.schema)))?;
            }
            models += ms.len();
            done += 1;
        }
    }
    // UI3 needs the referencing relation to be non-empty.
    let set = parse_spec("schema R(A)\nschema S(B)\nind R[A] <= S[B]\nia S: B _|_ B").unwrap();
    let concl = apply_rule(&set.schema, Rule::UI3, &set.deps, &depsolve::axioms::Instantiation::None).unwrap();
    let mut empty = Database::new(set.schema.clone());
    empty.relations[1].insert(vec![0]);
    check(satisfies_all(&empty, &set) && !satisfies(&empty, &concl), || "UI3 with an empty relation".into())?;
    let ms = generate_models(&set, 20, OracleBounds::new(3, 3), 7).unwrap();
    check(ms.iter().all(|m| m.is_nonempty() && satisfies(m, &concl)), || "UI3 on non-empty models".into())?;
    Ok(format!("{} rules x 100 instantiations, {models} models, UI3 fails only with an empty relation", rules.len()))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(500);
    for i in 0..100 {
        let k = rng.gen_range(2..=5);
        let (set, _) = star(&mut rng, k, true, false);
        let r = armstrong_ufd_ia(&set).map_err(|e| format!("UFD+IA #{i}: {e}"))?;
        check(r.is_armstrong(), || format!("UFD+IA #{i}: {:?} on {set}", r.violations))?;
    }
    for i in 0..100 {
        let k = rng.gen_range(2..=4);
        let (set, _) = star(&mut rng, k, true, true);
        let r = armstrong_star_finite(&set).map_err(|e| format!("star #{i}: {e}"))?;
        check(r.is_armstrong(), || format!("star #{i}: {:?} on {set}", r.violations))?;
    }
    for i in 0..100 {
        let schema = if rng.gen_bool(0.5) { uni(3) } else { two(2, 1) };
        let mut deps = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            deps.push(ind(&mut rng, &schema, 2));
        }
        for _ in 0..rng.gen_range(0..=2) {
            deps.push(ia(&mut rng, &schema, 0, true));
        }
        let set = common::set(&schema, deps);
        let r = armstrong_ind_ia(&set, 2, DEFAULT_ROW_CAP).map_err(|e| format!("IND+IA #{i}: {e} on {set}"))?;
        check(r.is_armstrong(), || format!("IND+IA #{i}: {:?} on {set}", r.violations))?;
    }
    let took = start.elapsed();
    check(took < Duration::from_secs(120), || format!("took {took:?}"))?;
    Ok(format!("3x100 Armstrong constructions exact in {took:.2?}"))
}

fn disjoint_pairs(attrs: &[AttrId]) -> Vec<(AttrSet, AttrSet)> {
    let n = attrs.len();
    let mut out = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let (mut x, mut y, mut c) = (AttrSet::new(), AttrSet::new(), code);
        for &a in attrs {
            match c % 3 {
                1 => {
                    x.insert(a);
                }
                2 => {
                    y.insert(a);
                }
                _ => {}
            }
            c /= 3;
        }
        if !x.is_empty() && !y.is_empty() {
            out.push((x, y));
        }
    }
    out
}

fn criterion_6() -> Outcome {
    let mut rng = rng(600);
    let mut checks = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=4);
        let schema = uni(n);
        let mut db = Database::new(schema.clone());
        let dom = rng.gen_range(1..=3);
        for _ in 0..rng.gen_range(1..=20) {
            db.relations[0].insert((0..n).map(|_| rng.gen_range(0..dom)).collect());
        }
        for (x, y) in disjoint_pairs(schema.attrs_of(0)) {
            let a = division_equals_projection(&db, 0, &x, &y);
            let b = satisfies(&db, &Dependency::ia(0, x, y));
            check(a == b, || format!("division {a} vs IA {b} on\n{db}"))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} (relation, X, Y) checks agree"))
}

fn criterion_7() -> Outcome {
    let set = parse_spec("schema R(X,U,Y,V)\nia R: X U _|_ Y V\nia R: X _|_ U\nia R: Y _|_ V").unwrap();
    let sigma = q(&set, "ia R: X Y _|_ U V");
    let sys = RuleSystem::custom("I2 I3 I4", &[Rule::I2, Rule::I3, Rule::I4]);
    let Derivation::Derived(d) = derive(&set, &sigma, &sys, 1_000_000) else { return Err("not derived".into()) };
    check(verify_deduction(&set, &d), || "deduction does not verify".into())?;
    check(d.rule_steps() <= 9, || format!("{} rule steps", d.rule_steps()))?;
    Ok(format!("derived in {} rule steps", d.rule_steps()))
}

fn criterion_8() -> Outcome {
    let mut rng = rng(800);
    let (mut guaranteed, mut compared, mut unknown) = (0, 0, 0);
    while guaranteed < 50 {
        let k = rng.gen_range(3..=5);
        let (set, _) = fd_ia(&mut rng, k);
        let report = noninteract_fd_ia(&set, Mode::Unrestricted).unwrap();
        if !report.guaranteed {
            continue;
        }
        guaranteed += 1;
        for sigma in [fd(&mut rng, &set.schema, 2), ia(&mut rng, &set.schema, 0, false)] {
            let a = imply_separately(&set, &sigma, &report).unwrap();
            match graph_chase_fd_ia(&set, &sigma, 10_000).unwrap().decided() {
                Some(b) => {
                    check(a.implied() == b, || format!("separate {a} vs graph chase {b} on {} from {set}", sigma.show(&set.schema)))?;
                    compared += 1;
                }
                None => unknown += 1,
            }
        }
    }
    let mut finite = 0;
    while finite < 50 {
        let k = rng.gen_range(3..=4);
        let (set, _) = fd_ia(&mut rng, k);
        if !noninteract_fd_ia(&set, Mode::Finite).unwrap().guaranteed {
            continue;
        }
        finite += 1;
        for sigma in [fd(&mut rng, &set.schema, 2), ia(&mut rng, &set.schema, 0, false)] {
            let unrestricted = auto(&set, &sigma, Mode::Unrestricted);
            let fin = match find_counterexample(&set, &sigma, oracle(30, 5, 4)).unwrap() {
                OracleOutcome::NotImplied(_) => false,
                OracleOutcome::NoCounterexampleFound => true,
            };
            check(unrestricted.decided() == Some(fin), || {
                format!("unrestricted {unrestricted} vs bounded finite {fin} on {} from {set}", sigma.show(&set.schema))
            })?;
        }
    }
    check(unknown == 0, || format!("{unknown} graph chases exhausted their budget"))?;
    Ok(format!("{compared} unrestricted comparisons, 100 finite comparisons"))
}

fn criterion_9() -> Outcome {
    let mut rng = rng(900);
    let schema = uni_named(200);
    let attrs = schema.attrs_of(0).to_vec();
    let pick = |rng: &mut Rng8| attrs[rng.gen_range(0..attrs.len())];
    let mut deps = Vec::new();
    for _ in 0..500 {
        deps.push(Dependency::fd(0, [pick(&mut rng)], [pick(&mut rng)]));
        deps.push(Dependency::ind(0, vec![pick(&mut rng)], 0, vec![pick(&mut rng)]));
    }
    for _ in 0..50 {
        let x: AttrSet = (0..3).map(|_| pick(&mut rng)).collect();
        let y: AttrSet = (0..3).map(|_| pick(&mut rng)).filter(|a| !x.contains(*a)).collect();
        deps.push(Dependency::ia(0, x, y));
    }
    let set = DependencySet::new(schema.clone(), deps).unwrap();
    let mut slowest = Duration::ZERO;
    for i in 0..40 {
        let sigma = if i % 2 == 0 {
            Dependency::fd(0, [pick(&mut rng)], [pick(&mut rng)])
        } else {
            Dependency::ind(0, vec![pick(&mut rng)], 0, vec![pick(&mut rng)])
        };
        for mode in [Mode::Finite, Mode::Unrestricted] {
            let t = Instant::now();
            check(imply_star(&set, &sigma, mode).unwrap().decided().is_some(), || "undecided".into())?;
            slowest = slowest.max(t.elapsed());
        }
    }
    check(slowest < Duration::from_secs(1), || format!("slowest star query {slowest:?}"))?;

    let schema = two(5, 5);
    let mut deps = Vec::new();
    for _ in 0..4 {
        deps.push(ind(&mut rng, &schema, 2));
    }
    for r in 0..2 {
        deps.push(ia(&mut rng, &schema, r, false));
    }
    let set = DependencySet::new(schema.clone(), deps).unwrap();
    let queries = all_small_queries(&schema);
    let t = Instant::now();
    for sigma in &queries {
        check(imply_ind_ia(&set, sigma).unwrap().decided().is_some(), || "undecided".into())?;
    }
    let chase = t.elapsed();
    check(chase < Duration::from_secs(10), || format!("{} chase queries took {chase:?}", queries.len()))?;
    Ok(format!("slowest star query {slowest:.2?}; {} IND+IA queries in {chase:.2?}", queries.len()))
}

fn uni_named(n: usize) -> Arc<DatabaseSchema> {
    let names: Vec<String> = (0..n).map(|i| format!("A{i}")).collect();
    let mut s = DatabaseSchema::new();
    s.add_relation("R", &names).unwrap();
    Arc::new(s)
}

/// Every IND and IA with sides of at most two attributes.
fn all_small_queries(schema: &DatabaseSchema) -> Vec<Dependency> {
    let rels = schema.relations().len();
    let mut out = Vec::new();
    let seqs = |r: usize| {
        let a = schema.attrs_of(r);
        let mut v: Vec<Vec<AttrId>> = a.iter().map(|&x| vec![x]).collect();
        for &x in a {
            for &y in a {
                if x != y {
                    v.push(vec![x, y]);
                }
            }
        }
        v
    };
    for r in 0..rels {
        for s in 0..rels {
            for x in seqs(r) {
                for y in seqs(s).into_iter().filter(|y| y.len() == x.len()) {
                    out.push(Dependency::ind(r, x.clone(), s, y));
                }
            }
        }
        let sides: BTreeSet<AttrSet> = seqs(r).into_iter().map(|v| v.into_iter().collect()).collect();
        for x in &sides {
            for y in &sides {
                out.push(Dependency::ia(r, x.clone(), y.clone()));
            }
        }
    }
    out
}

/// Satisfied disjoint IAs by exhaustive enumeration, reduced to the maximal ones.
fn brute_force_maximal(db: &Database) -> BTreeSet<(AttrSet, AttrSet)> {
    let canon = |x: AttrSet, y: AttrSet| if x.to_vec() <= y.to_vec() { (x, y) } else { (y, x) };
    let held: Vec<(AttrSet, AttrSet)> = disjoint_pairs(db.schema.attrs_of(0))
        .into_iter()
        .filter(|(x, y)| satisfies(db, &Dependency::ia(0, x.clone(), y.clone())))
        .collect();
    let dominated = |x: &AttrSet, y: &AttrSet| {
        held.iter().any(|(v, w)| v.len() + w.len() > x.len() + y.len() && ((x.is_subset(v) && y.is_subset(w)) || (x.is_subset(w) && y.is_subset(v))))
    };
    held.iter().filter(|(x, y)| !dominated(x, y)).map(|(x, y)| canon(x.clone(), y.clone())).collect()
}

fn criterion_10() -> Outcome {
    let mut seen = Vec::new();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut files: Vec<PathBuf> =
        std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|e| e == "csv")).collect();
    files.sort();
    for path in files {
        let db = Database::from_table(&load_csv(&path, &CsvOptions::default()).unwrap()).unwrap();
        if db.schema.attrs_of(0).len() > 6 {
            continue;
        }
        let mined: BTreeSet<(AttrSet, AttrSet)> = mine_ias(&db, 0, &MiningConfig::default())
            .maximal_ias
            .into_iter()
            .map(|d| match d {
                Dependency::Ia { left, right, .. } if left.to_vec() <= right.to_vec() => (left, right),
                Dependency::Ia { left, right, .. } => (right, left),
                _ => unreachable!(),
            })
            .collect();
        let expected = brute_force_maximal(&db);
        check(mined == expected, || format!("{}: mined {} vs {} by enumeration", path.display(), mined.len(), expected.len()))?;
        seen.push(format!("{}:{}", path.file_stem().unwrap().to_string_lossy(), mined.len()));
    }
    check(!seen.is_empty(), || "no CSV fixtures".into())?;
    Ok(seen.join(" "))
}

fn main() {
    type Criterion = (usize, &'static str, fn() -> Outcome);
    let timed: [Criterion; 2] = [(1, "fixture suite", criterion_1), (9, "performance smoke", criterion_9)];
    let rest: [Criterion; 8] = [
        (2, "oracle soundness", criterion_2),
        (3, "cross-engine equivalence", criterion_3),
        (4, "axiom soundness", criterion_4),
        (5, "Armstrong exactness", criterion_5),
        (6, "division theorem", criterion_6),
        (7, "exchange lemma derivation", criterion_7),
        (8, "non-interaction payoff", criterion_8),
        (10, "profiler oracle equivalence", criterion_10),
    ];
    let mut results: Vec<(usize, &str, Outcome)> = timed.iter().map(|&(n, name, f)| (n, name, f())).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = rest.iter().map(|&(n, name, f)| (n, name, s.spawn(f))).collect();
        for (n, name, h) in handles {
            let out = h.join().unwrap_or_else(|p| {
                Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
            });
            results.push((n, name, out));
        }
    });
    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (n, name, out) in &results {
        match out {
            Ok(detail) => println!("criterion {n:>2} {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} {name}: FAIL ({why})");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
