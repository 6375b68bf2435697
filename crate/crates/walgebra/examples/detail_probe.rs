use walgebra::current::{build_currents, verify_quadratic, TailReading};
use walgebra::structfn::AlgebraSpec;
use walgebra::vertex::System;

fn main() {
    let spec = AlgebraSpec::twisted(2);
    let order = walgebra::current::required_order(8);
    let sys = System::new(&spec, order).expect("lemma");
    let currents = build_currents(&sys, 4, order).expect("fusion");
    let out = verify_quadratic(&sys, &currents, 2, 2, order, TailReading::RangeProduct).unwrap();
    let mut sing = 0;
    let mut lhs_odd = 0;
    let mut rhs_unmatched = 0;
    for m in &out.delta_mismatches {
        if m.starts_with("unresolved singular") { sing += 1; }
        else if m.starts_with("lhs delta") { lhs_odd += 1; }
        else if m.starts_with("rhs delta") { rhs_unmatched += 1; }
    }
    println!("mismatch breakdown: singular={} lhs-only={} rhs-only={} other={}",
        sing, lhs_odd, rhs_unmatched, out.delta_mismatches.len() - sing - lhs_odd - rhs_unmatched);
    for m in out.delta_mismatches.iter().filter(|m| m.starts_with("unresolved")).take(3) {
        println!("SING: {}", &m[..m.len().min(300)]);
    }
    for m in out.delta_mismatches.iter().filter(|m| m.starts_with("rhs delta")).take(3) {
        println!("RHSONLY: {}", &m[..m.len().min(300)]);
    }
}
