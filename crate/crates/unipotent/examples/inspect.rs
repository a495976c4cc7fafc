use std::time::Instant;
use unipotent::quadratic::*;

fn main() {
    for d in [9, 10] {
        let t0 = Instant::now();
        let rep = build_rep(d).unwrap();
        println!("d={} build: {:?}, nnz last gen = {}", d, t0.elapsed(), rep.gens[d-1].nnz());
        let t = Instant::now(); verify_relations(&rep).unwrap(); println!("  relations: {:?}", t.elapsed());
        let t = Instant::now(); let r = rank_and_basis(&rep).unwrap(); println!("  rank {}: {:?}", r.rank, t.elapsed());
        let t = Instant::now(); nilpotency_check(&rep).unwrap(); println!("  nilpotency: {:?}", t.elapsed());
        let t = Instant::now(); class2_check(&rep).unwrap(); println!("  class2: {:?}", t.elapsed());
    }
}
