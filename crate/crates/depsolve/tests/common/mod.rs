//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use depsolve::axioms::{Instantiation, Rule};
use depsolve::model::{AttrId, AttrSet, DatabaseSchema, Dependency, DependencySet, RelId};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const NAMES: [&str; 12] = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L"];

pub fn uni(n: usize) -> Arc<DatabaseSchema> {
    Arc::new(DatabaseSchema::single("R", &NAMES[..n]))
}

/// `R` and, when `s > 0`, `S` with the next `s` attribute names.
pub fn two(r: usize, s: usize) -> Arc<DatabaseSchema> {
    let mut schema = DatabaseSchema::new();
    schema.add_relation("R", &NAMES[..r]).unwrap();
    if s > 0 {
        schema.add_relation("S", &NAMES[r..r + s]).unwrap();
    }
    Arc::new(schema)
}

/// A subset of `attrs` with between `lo` and `hi` members.
pub fn subset(rng: &mut Rng8, attrs: &[AttrId], lo: usize, hi: usize) -> AttrSet {
    let k = rng.gen_range(lo..=hi.min(attrs.len()));
    attrs.choose_multiple(rng, k).copied().collect()
}

pub fn seq(rng: &mut Rng8, attrs: &[AttrId], k: usize) -> Vec<AttrId> {
    attrs.choose_multiple(rng, k).copied().collect()
}

pub fn attrs(schema: &DatabaseSchema, r: RelId) -> Vec<AttrId> {
    schema.attrs_of(r).to_vec()
}

/// An IA with non-empty sides; disjoint unless `overlap`.
pub fn ia(rng: &mut Rng8, schema: &DatabaseSchema, r: RelId, overlap: bool) -> Dependency {
    let a = attrs(schema, r);
    if overlap && rng.gen_bool(0.2) {
        let x = subset(rng, &a, 1, 2);
        return Dependency::ia(r, x.clone(), x);
    }
    if overlap {
        return Dependency::ia(r, subset(rng, &a, 1, 2), subset(rng, &a, 1, 2));
    }
    let mut shuffled = a.clone();
    shuffled.shuffle(rng);
    let k = rng.gen_range(1..a.len());
    let x: AttrSet = shuffled[..k].iter().copied().collect();
    let rest = &shuffled[k..];
    let k = rng.gen_range(1..=rest.len());
    let y: AttrSet = rest.choose_multiple(rng, k).copied().collect();
    Dependency::ia(r, subset_nonempty(rng, &x), y)
}

fn subset_nonempty(rng: &mut Rng8, s: &AttrSet) -> AttrSet {
    let v = s.to_vec();
    subset(rng, &v, 1, v.len())
}

pub fn ind(rng: &mut Rng8, schema: &DatabaseSchema, max_arity: usize) -> Dependency {
    let n = schema.relations().len();
    let (r, s) = (rng.gen_range(0..n), rng.gen_range(0..n));
    let (ar, as_) = (attrs(schema, r), attrs(schema, s));
    let k = rng.gen_range(1..=max_arity.min(ar.len()).min(as_.len()));
    Dependency::ind(r, seq(rng, &ar, k), s, seq(rng, &as_, k))
}

pub fn ufd(rng: &mut Rng8, schema: &DatabaseSchema) -> Dependency {
    let a = attrs(schema, 0);
    Dependency::fd(0, [*a.choose(rng).unwrap()], [*a.choose(rng).unwrap()])
}

pub fn uind(rng: &mut Rng8, schema: &DatabaseSchema) -> Dependency {
    let a = attrs(schema, 0);
    Dependency::ind(0, vec![*a.choose(rng).unwrap()], 0, vec![*a.choose(rng).unwrap()])
}

pub fn fd(rng: &mut Rng8, schema: &DatabaseSchema, lhs_max: usize) -> Dependency {
    let a = attrs(schema, 0);
    Dependency::fd(0, subset(rng, &a, 1, lhs_max), subset(rng, &a, 1, 2))
}

pub fn set(schema: &Arc<DatabaseSchema>, deps: Vec<Dependency>) -> DependencySet {
    DependencySet::new(schema.clone(), deps).unwrap()
}

/// IND+IA over at most two relations and four attributes.
pub fn ind_ia(rng: &mut Rng8, overlap: bool) -> (DependencySet, Dependency) {
    let r = rng.gen_range(2..=3);
    let schema = two(r, 4 - r);
    let mut deps = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        deps.push(ind(rng, &schema, 2));
    }
    for _ in 0..rng.gen_range(0..=2) {
        let rel = rng.gen_range(0..schema.relations().len());
        if schema.attrs_of(rel).len() > 1 || overlap {
            deps.push(ia(rng, &schema, rel, overlap));
        }
    }
    let q = if rng.gen_bool(0.5) {
        ind(rng, &schema, 2)
    } else {
        let rel = rng.gen_range(0..schema.relations().len());
        if schema.attrs_of(rel).len() > 1 || overlap {
            ia(rng, &schema, rel, overlap)
        } else {
            ind(rng, &schema, 2)
        }
    };
    (set(&schema, deps), q)
}

/// Unary FDs, unary INDs (when `uinds`) and IAs over one relation of `n` attributes.
pub fn star(rng: &mut Rng8, n: usize, fds: bool, uinds: bool) -> (DependencySet, Dependency) {
    let schema = uni(n);
    let mut deps = Vec::new();
    if fds {
        for _ in 0..rng.gen_range(0..=3) {
            deps.push(ufd(rng, &schema));
        }
    }
    if uinds {
        for _ in 0..rng.gen_range(0..=3) {
            deps.push(uind(rng, &schema));
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        deps.push(ia(rng, &schema, 0, true));
    }
    let q = match rng.gen_range(0..3) {
        0 if fds => ufd(rng, &schema),
        1 if uinds => uind(rng, &schema),
        _ => ia(rng, &schema, 0, true),
    };
    (set(&schema, deps), q)
}

/// FDs with left-hand sides of up to two attributes, and IAs, over `n` attributes.
pub fn fd_ia(rng: &mut Rng8, n: usize) -> (DependencySet, Dependency) {
    let schema = uni(n);
    let mut deps = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        deps.push(fd(rng, &schema, 2));
    }
    for _ in 0..rng.gen_range(1..=2) {
        deps.push(ia(rng, &schema, 0, false));
    }
    let q = if rng.gen_bool(0.5) { fd(rng, &schema, 2) } else { ia(rng, &schema, 0, false) };
    (set(&schema, deps), q)
}

/// Premises and an instantiation that `rule` accepts, over `R(A..D)` and `S(E..H)`.
pub fn rule_instance(rng: &mut Rng8, rule: Rule) -> (Arc<DatabaseSchema>, Vec<Dependency>, Instantiation) {
    let schema = two(4, 4);
    let r = attrs(&schema, 0);
    let s = attrs(&schema, 1);
    let dis = |rng: &mut Rng8| -> (AttrSet, AttrSet) {
        let mut v = r.clone();
        v.shuffle(rng);
        let k = rng.gen_range(1..v.len());
        let x: AttrSet = v[..k].iter().copied().collect();
        let y: AttrSet = v[k..].iter().copied().take(rng.gen_range(1..=v.len() - k)).collect();
        (x, y)
    };
    let out = match rule {
        Rule::I1 => (vec![], Instantiation::Attrs(0, subset(rng, &r, 0, 4))),
        Rule::I2 => {
            let (x, y) = dis(rng);
            (vec![Dependency::ia(0, x, y)], Instantiation::None)
        }
        Rule::I3 => {
            let (x, y) = dis(rng);
            let keep = subset(rng, &y.to_vec(), 0, y.len());
            (vec![Dependency::ia(0, x, y)], Instantiation::Attrs(0, keep))
        }
        Rule::I4 => {
            let mut v = r.clone();
            v.shuffle(rng);
            let (x, y, z) = (AttrSet::singleton(v[0]), subset(rng, &v[1..2], 1, 1), subset(rng, &v[2..], 1, 2));
            (vec![Dependency::ia(0, x.clone(), y.clone()), Dependency::ia(0, x.union(&y), z)], Instantiation::None)
        }
        Rule::I5 => {
            let (x, y) = dis(rng);
            let z = subset(rng, &r, 1, 2);
            (vec![Dependency::ia(0, x, y), Dependency::ia(0, z.clone(), z)], Instantiation::None)
        }
        Rule::F1 => {
            let x = subset(rng, &r, 0, 4);
            let y = subset(rng, &x.to_vec(), 0, x.len());
            (vec![], Instantiation::Pair(0, x, y))
        }
        Rule::F2 => {
            let (x, y, z) = (subset(rng, &r, 0, 2), subset(rng, &r, 1, 2), subset(rng, &r, 1, 2));
            (vec![Dependency::fd(0, x, y.clone()), Dependency::fd(0, y, z)], Instantiation::None)
        }
        Rule::F3 => (vec![Dependency::fd(0, subset(rng, &r, 0, 2), subset(rng, &r, 1, 2))], Instantiation::Attrs(0, subset(rng, &r, 0, 2))),
        Rule::FI1 => {
            let (x, y) = dis(rng);
            (vec![Dependency::ia(0, x.clone(), y.clone()), Dependency::fd(0, x, y)], Instantiation::None)
        }
        Rule::FI2 => {
            let (x, w) = dis(rng);
            let z = subset(rng, &w.to_vec(), 0, w.len());
            (vec![Dependency::ia(0, x, w), Dependency::fd(0, z, subset(rng, &r, 1, 2))], Instantiation::None)
        }
        Rule::U1 => {
            let k = rng.gen_range(1..=3);
            (vec![], Instantiation::Seq(0, seq(rng, &r, k)))
        }
        Rule::U2 => {
            let k = rng.gen_range(1..=2);
            let (x, y, z) = (seq(rng, &r, k), seq(rng, &s, k), seq(rng, &r, k));
            (vec![Dependency::ind(0, x, 1, y.clone()), Dependency::ind(1, y, 0, z)], Instantiation::None)
        }
        Rule::U3 => {
            let k = rng.gen_range(1..=3);
            let mut pos: Vec<usize> = (0..k).collect();
            pos.shuffle(rng);
            pos.truncate(rng.gen_range(1..=k));
            (vec![Dependency::ind(0, seq(rng, &r, k), 1, seq(rng, &s, k))], Instantiation::Positions(pos))
        }
        Rule::UI1 => {
            let k = rng.gen_range(1..=2);
            let mut rv = r.clone();
            rv.shuffle(rng);
            let mut sv = s.clone();
            sv.shuffle(rng);
            let (x, y) = (rv[..k].to_vec(), rv[k..k + 1].to_vec());
            let (z, w) = (sv[..k].to_vec(), sv[k..k + 1].to_vec());
            let ia = Dependency::ia(1, z.iter().copied().collect::<AttrSet>(), w.iter().copied().collect::<AttrSet>());
            (vec![Dependency::ind(0, x, 1, z), Dependency::ind(0, y, 1, w), ia], Instantiation::None)
        }
        Rule::UI2 => {
            let n = rng.gen_range(2..=3);
            let k = rng.gen_range(1..n);
            let (xy, zw) = (seq(rng, &r, n), seq(rng, &s, n));
            let ia = Dependency::ia(1, zw[..k].iter().copied().collect::<AttrSet>(), zw[k..].iter().copied().collect::<AttrSet>());
            (vec![Dependency::ind(0, xy.clone(), 1, zw.clone()), Dependency::ind(1, zw, 0, xy), ia], Instantiation::None)
        }
        Rule::UI3 | Rule::UI4 => {
            let k = rng.gen_range(1..=2);
            let (x, y) = (seq(rng, &r, k), seq(rng, &s, k));
            let ys: AttrSet = y.iter().copied().collect();
            (vec![Dependency::ind(0, x, 1, y), Dependency::ia(1, ys.clone(), ys)], Instantiation::None)
        }
        Rule::UI5 => {
            let mut rv = r.clone();
            rv.shuffle(rng);
            let (a, b) = (rv[0], rv[1]);
            let c = *s.choose(rng).unwrap();
            let target = match rng.gen_range(0..3) {
                0 => Dependency::fd(0, [a], subset(rng, &rv[2..], 1, 2)),
                1 => Dependency::ia(0, [a], subset(rng, &rv[2..], 1, 2)),
                _ => Dependency::ind(0, vec![a, rv[2]], 1, seq(rng, &s, 2)),
            };
            (
                vec![Dependency::ind(0, vec![a], 1, vec![c]), Dependency::ind(0, vec![b], 1, vec![c]), Dependency::ca(1, c), target],
                Instantiation::Occurrences(vec![0]),
            )
        }
        Rule::Cycle(n) => {
            let nodes: Vec<AttrId> = (0..2 * n).map(|_| *r.choose(rng).unwrap()).collect();
            let mut p = Vec::new();
            for i in 0..n {
                p.push(Dependency::fd(0, [nodes[2 * i]], [nodes[2 * i + 1]]));
                p.push(Dependency::ind(0, vec![nodes[(2 * i + 2) % (2 * n)]], 0, vec![nodes[2 * i + 1]]));
            }
            (p, Instantiation::Member(rng.gen_range(0..2 * n)))
        }
    };
    (schema, out.0, out.1)
}
