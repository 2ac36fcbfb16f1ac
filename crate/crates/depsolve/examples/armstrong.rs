//! Armstrong relations: one instance that satisfies exactly the implied dependencies.

use depsolve::armstrong::{armstrong_ind_ia, armstrong_star_finite, armstrong_ufd_ia, DEFAULT_ROW_CAP};
use depsolve::parser::parse_spec;

fn main() {
    let set = parse_spec("schema R(A, B, C)\nfd R: A -> B\nia R: A _|_ C").unwrap();
    let r = armstrong_ufd_ia(&set).unwrap();
    println!("UFD+IA, {} candidates, exact: {}\n{}", r.candidates, r.is_armstrong(), r.database);

    let set = parse_spec("schema R(A, B)\nfd R: A -> B\nind R[A] <= R[B]").unwrap();
    let r = armstrong_star_finite(&set).unwrap();
    println!("UFD+UIND+IA, exact: {}\n{}", r.is_armstrong(), r.database);
    if let Some(plan) = &r.plan {
        println!("{plan:?}");
    }

    let set = parse_spec("schema R(A, B)\nschema S(C, D)\nind R[A] <= S[C]\nia S: C _|_ D").unwrap();
    let r = armstrong_ind_ia(&set, 2, DEFAULT_ROW_CAP).unwrap();
    println!("IND+IA, exact: {}\n{}", r.is_armstrong(), r.database);
}
