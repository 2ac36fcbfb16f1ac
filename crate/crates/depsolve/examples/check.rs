//! Checking CSV data against declared dependencies.

use depsolve::parser::{parse_spec, read_csv, CsvOptions};
use depsolve::semantics::{violation, Database};

const DATA: &str = "p_id,t_id
p1,t1
p1,t2
p2,t1
";

fn main() {
    let set = parse_spec("schema Heart(p_id, t_id)\nia Heart: p_id _|_ t_id\nfd Heart: p_id -> t_id").unwrap();
    let table = read_csv(DATA.as_bytes(), "Heart", &CsvOptions::default()).unwrap();
    let db = Database::from_tables(set.schema.clone(), &[table]).unwrap();
    for d in set.iter() {
        match violation(&db, d) {
            None => println!("ok       {}", d.show(&set.schema)),
            Some(v) => println!("violated {} by {:?}", d.show(&set.schema), v.tuples),
        }
    }
}
