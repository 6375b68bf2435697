use std::time::Instant;
use walgebra::current::{build_currents, current_table, verify_duality, verify_quadratic, TailReading};
use walgebra::structfn::AlgebraSpec;
use walgebra::vertex::System;

fn main() {
    let spec = AlgebraSpec::twisted(1);
    let order = walgebra::current::required_order(3 * 1); // up to T_1 x T_3
    println!("order = {}", order);
    let t = Instant::now();
    let sys = System::new(&spec, order).expect("lemma");
    println!("system: {:?}", t.elapsed());
    let t = Instant::now();
    let currents = build_currents(&sys, 4, order).expect("fusion chain");
    println!("currents through T_4: {:?}", t.elapsed());
    for (d, c) in currents.iter().enumerate() {
        println!("T_{}: {} terms", d, c.terms.len());
        for (coeff, factors) in current_table(&sys, c) {
            println!("   [{}]  {}", factors, coeff);
        }
    }
    for i in [0usize, 1] {
        match verify_duality(&sys, &currents, i) {
            Ok(()) => println!("duality i={}: OK", i),
            Err(w) => println!("duality i={}: FAIL: {}", i, w),
        }
    }
    let t = Instant::now();
    for tail in [TailReading::FixedPower, TailReading::RangeProduct] {
        match verify_quadratic(&sys, &currents, 1, 1, order, tail) {
            Ok(out) => println!(
                "quadratic (1,1) tail {:?}: pass={} purity_fail={} mismatches={:?} poles={:?}",
                tail, out.pass(), out.purity_failures.len(), out.delta_mismatches, out.matched_poles
            ),
            Err(e) => println!("quadratic (1,1) tail {:?}: ERROR {}", tail, e),
        }
    }
    println!("quadratic: {:?}", t.elapsed());
}
