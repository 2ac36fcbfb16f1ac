//! Non-interaction: when FDs and IAs can be reasoned about separately.

use depsolve::noninteract::{imply_separately, noninteract_fd_ia, noninteract_ind_ia};
use depsolve::parser::{parse_dependency, parse_spec};
use depsolve::Mode;

fn main() {
    let set = parse_spec("schema R(A, B, C, D)\nfd R: A -> B\nia R: C _|_ D").unwrap();
    for mode in [Mode::Finite, Mode::Unrestricted] {
        let report = noninteract_fd_ia(&set, mode).unwrap();
        println!("{mode}: guaranteed {}", report.guaranteed);
        let sigma = parse_dependency("ia R: C _|_ D A", &set.schema).unwrap();
        println!("  {} -> {}", sigma.show(&set.schema), imply_separately(&set, &sigma, &report).unwrap());
    }

    let set = parse_spec("schema R(A, B, C, D)\nia R: A _|_ B\nia R: C _|_ D\nfd R: B C -> A D\nfd R: A D -> B C").unwrap();
    let report = noninteract_fd_ia(&set, Mode::Finite).unwrap();
    println!("{}", serde_json::to_string_pretty(&report.to_json(&set.schema)).unwrap());

    let set = parse_spec("schema R(A, B)\nschema S(C, D)\nind R[A, B] <= S[C, D]\nia S: C _|_ D").unwrap();
    println!("IND+IA: guaranteed {}", noninteract_ind_ia(&set).unwrap().guaranteed);
}
