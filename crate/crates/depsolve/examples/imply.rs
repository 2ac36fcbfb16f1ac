//! Deciding implication with the automatic engine, in both modes.

use depsolve::engine::{imply, Options};
use depsolve::parser::{parse_dependency, parse_spec};
use depsolve::Mode;

fn main() {
    let set = parse_spec(
        "schema Heart(h_pid, h_pname, h_tid)
         schema Disorder(d_pid, d_tid, confirmed)
         ia Heart: h_pid _|_ h_tid
         ind Disorder[d_pid] <= Heart[h_pid]
         ind Disorder[d_tid] <= Heart[h_tid]",
    )
    .expect("spec parses");
    let sigma = parse_dependency("ind Disorder[d_pid, d_tid] <= Heart[h_pid, h_tid]", &set.schema).unwrap();
    let a = imply(&set, &sigma, Mode::Finite, &Options::default()).unwrap();
    println!("{}: {} via {}", sigma.show(&set.schema), a.verdict, a.engine);

    // A unary FD cycle through an IND: finite and unrestricted implication part ways.
    let set = parse_spec("schema R(A, B)\nfd R: A -> B\nind R[A] <= R[B]").unwrap();
    let sigma = parse_dependency("fd R: B -> A", &set.schema).unwrap();
    for mode in [Mode::Finite, Mode::Unrestricted] {
        let a = imply(&set, &sigma, mode, &Options::default()).unwrap();
        println!("{mode}: {} via {}", a.verdict, a.engine);
        if let Some(db) = a.verdict.witness() {
            println!("{db}");
        }
    }
}
