//! Rule-level proofs: forward-chaining derivation and verification.

use depsolve::axioms::{derive, verify_deduction, Derivation, Rule, RuleSystem};
use depsolve::parser::{parse_dependency, parse_spec};

fn main() {
    let set = parse_spec("schema R(X, U, Y, V)\nia R: X U _|_ Y V\nia R: X _|_ U\nia R: Y _|_ V").unwrap();
    let sigma = parse_dependency("ia R: X Y _|_ U V", &set.schema).unwrap();
    let sys = RuleSystem::custom("I2 I3 I4", &[Rule::I2, Rule::I3, Rule::I4]);
    match derive(&set, &sigma, &sys, 1_000_000) {
        Derivation::Derived(d) => {
            print!("{}", d.render(&set.schema));
            println!("verified: {}", verify_deduction(&set, &d));
        }
        other => println!("{other:?}"),
    }

    let set = parse_spec("schema R(A, B)\nfd R: A -> B\nind R[A] <= R[B]").unwrap();
    let sigma = parse_dependency("ind R[B] <= R[A]", &set.schema).unwrap();
    for sys in [RuleSystem::star_finite(), RuleSystem::star_unrestricted()] {
        let out = match derive(&set, &sigma, &sys, 100_000) {
            Derivation::Derived(d) => d.render(&set.schema),
            other => format!("{other:?}\n"),
        };
        print!("{}:\n{out}", sys.name);
    }
}
