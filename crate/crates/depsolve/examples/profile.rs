//! Mining maximal IAs from a table.

use depsolve::parser::{read_csv, CsvOptions};
use depsolve::profiler::{independence_ratio, mine_ias, MiningConfig};
use depsolve::semantics::Database;
use depsolve::AttrSet;

const DATA: &str = "colour,size,shape,batch
red,S,round,1
red,S,square,1
red,L,round,1
red,L,square,1
blue,S,round,1
blue,S,square,1
blue,L,round,1
blue,L,square,2
";

fn main() {
    let table = read_csv(DATA.as_bytes(), "product", &CsvOptions::default()).unwrap();
    let db = Database::from_table(&table).unwrap();
    let cfg = MiningConfig { ratios: true, ..MiningConfig::default() };
    let found = mine_ias(&db, 0, &cfg);
    print!("{}", found.to_dsl(&db));
    println!("{} maximal IAs, largest arity {}", found.ia_count(), found.max_arity_found);
    let (x, y) = (AttrSet::singleton(0), AttrSet::singleton(3));
    println!("colour vs batch: {:.3}", independence_ratio(&db, 0, &x, &y));
}
