use std::time::Instant;
use walgebra::current::build_currents;
use walgebra::fock::{check_e_relations, check_k_relations, cross_check_ope};
use walgebra::structfn::AlgebraSpec;
use walgebra::vertex::System;

fn main() {
    let spec = AlgebraSpec::twisted(1);
    let t = Instant::now();
    for line in check_e_relations(&spec, 2, 2, 5) {
        println!("[{}] {} {:?}", if line.passed() { "PASS" } else { "FAIL" }, line.name, line.witness);
    }
    println!("e-relations window 5: {:?}", t.elapsed());
    let t = Instant::now();
    for line in check_k_relations(&spec, 2, 2, 5) {
        println!("[{}] {} {:?}", if line.passed() { "PASS" } else { "FAIL" }, line.name, line.witness);
    }
    println!("k-relations window 5: {:?}", t.elapsed());

    // OPE oracle on twisted N=1 T_1 x T_1
    let t = Instant::now();
    let order = 40;
    let sys = System::new(&spec, order).expect("lemma");
    let currents = build_currents(&sys, 2, order).expect("fusion");
    let line = cross_check_ope(&sys, &currents[1], &currents[1], 2, 3).expect("oracle");
    println!("[{}] {} {:?}", if line.passed() { "PASS" } else { "FAIL" }, line.name, line.witness);
    println!("ope oracle: {:?}", t.elapsed());
}
