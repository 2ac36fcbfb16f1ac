//! The chase engines: IND+IA chase, H-graph search and the graphical chase for FD+IA.

use depsolve::chase::{graph_chase_fd_ia, h_graph_reachable, imply_ind_ia};
use depsolve::parser::{parse_dependency, parse_spec};
use depsolve::verdict::{Evidence, Verdict};

fn main() {
    let set = parse_spec(
        "schema Heart(h_pid, h_tid)
         schema Disorder(d_pid, d_tid)
         ia Heart: h_pid _|_ h_tid
         ind Disorder[d_pid] <= Heart[h_pid]
         ind Disorder[d_tid] <= Heart[h_tid]",
    )
    .unwrap();
    let sigma = parse_dependency("ind Disorder[d_pid, d_tid] <= Heart[h_pid, h_tid]", &set.schema).unwrap();
    if let Verdict::Implied(Evidence::Chase(trace)) = imply_ind_ia(&set, &sigma).unwrap() {
        print!("{}", trace.render());
    }
    println!("H-graph reaches the end node: {}", h_graph_reachable(&set, &sigma).unwrap());

    let set = parse_spec(
        "schema R(A, B, C, D, E, X)
         ia R: B _|_ C D
         ia R: D _|_ A E
         ia R: B C _|_ A D E
         fd R: A B -> X
         fd R: C D E -> X",
    )
    .unwrap();
    let sigma = parse_dependency("fd R: A -> X", &set.schema).unwrap();
    println!("{}", graph_chase_fd_ia(&set, &sigma, 50).unwrap());
}
