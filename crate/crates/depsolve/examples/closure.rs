//! The closures behind the polynomial engines.

use depsolve::chase::uind_ca_closure;
use depsolve::parser::parse_spec;
use depsolve::polyengine::{algorithm1, build_star_closure, fd_closure};
use depsolve::{AttrSet, Mode};

fn main() {
    let set = parse_spec("schema R(A, B, C, D)\nfd R: A -> B\nfd R: B C -> D").unwrap();
    let fds: Vec<(AttrSet, AttrSet)> = set
        .fds()
        .filter_map(|d| match d {
            depsolve::Dependency::Fd { lhs, rhs, .. } => Some((lhs.clone(), rhs.clone())),
            _ => None,
        })
        .collect();
    let x: AttrSet = [0, 2].into_iter().collect();
    println!("{{A C}}+ = {}", set.schema.names(&fd_closure(&fds, &x)).join(" "));

    // Algorithm 1 moves the attributes both IA sides determine into a constant set Z.
    let set = parse_spec("schema R(A, B, C)\nia R: A _|_ B\nfd R: A -> C\nfd R: B -> C").unwrap();
    println!("{}", serde_json::to_string_pretty(&algorithm1(&set).unwrap().to_json(&set.schema)).unwrap());

    let set = parse_spec("schema R(C)\nschema S(D)\nind R[C] <= S[D]\nia S: D _|_ D").unwrap();
    let cl = uind_ca_closure(&set).unwrap();
    println!("constants: {}", set.schema.names(&cl.constants).join(" "));

    let set = parse_spec("schema R(A, B, C)\nfd R: A -> B\nind R[A] <= R[B]\nia R: A _|_ C").unwrap();
    for mode in [Mode::Finite, Mode::Unrestricted] {
        let sc = build_star_closure(&set, mode).unwrap();
        println!("{mode}: {}", sc.to_json());
    }
}
