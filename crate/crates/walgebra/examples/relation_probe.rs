use std::time::Instant;
use walgebra::current::{build_currents, verify_quadratic, verify_duality, TailReading};
use walgebra::structfn::AlgebraSpec;
use walgebra::vertex::System;

fn run_corner(name: &str, spec: AlgebraSpec, pairs: &[(usize, usize)]) {
    let maxdeg = pairs.iter().map(|(i, j)| i + j).max().unwrap();
    let maxprod = pairs.iter().map(|(i, j)| (i * j).max((maxdeg - 1) * 1)).max().unwrap();
    let order = walgebra::current::required_order(maxprod.max(maxdeg));
    let t = Instant::now();
    let sys = System::new(&spec, order).expect("lemma");
    let currents = match build_currents(&sys, maxdeg + 1, order) {
        Ok(c) => c,
        Err(e) => { println!("{}: fusion error: {}", name, e); return; }
    };
    for (d, c) in currents.iter().enumerate() {
        println!("{}: T_{} has {} terms", name, d, c.terms.len());
    }
    for &(i, j) in pairs {
        match verify_quadratic(&sys, &currents, i, j, order, TailReading::RangeProduct) {
            Ok(out) => println!(
                "{}: ({},{}) pass={} purity={} mism={} poles={:?}",
                name, i, j, out.pass(), out.purity_failures.len(),
                out.delta_mismatches.len(), out.matched_poles
            ),
            Err(e) => println!("{}: ({},{}) ERROR {}", name, i, j, e),
        }
    }
    println!("{}: total {:?}", name, t.elapsed());
}

fn main() {
    run_corner("corner(0,2,0)", AlgebraSpec::corner(0, 2, 0), &[(1, 1)]);
    run_corner("corner(1,1,1)", AlgebraSpec::corner(1, 1, 1), &[(1, 1)]);

    // twisted N=2: duality + relation (1,2) tails carry nontrivial currents
    let spec = AlgebraSpec::twisted(2);
    let order = walgebra::current::required_order(6);
    let t = Instant::now();
    let sys = System::new(&spec, order).expect("lemma");
    let currents = build_currents(&sys, 5, order).expect("fusion");
    for (d, c) in currents.iter().enumerate() {
        println!("twisted2: T_{} has {} terms", d, c.terms.len());
    }
    for i in [0usize, 1, 2] {
        match verify_duality(&sys, &currents, i) {
            Ok(()) => println!("twisted2 duality i={}: OK", i),
            Err(w) => println!("twisted2 duality i={}: FAIL {}", i, w),
        }
    }
    for (i, j) in [(1usize, 2usize)] {
        for tail in [TailReading::FixedPower, TailReading::RangeProduct] {
            match verify_quadratic(&sys, &currents, i, j, order, tail) {
                Ok(out) => println!(
                    "twisted2 ({},{}) tail {:?}: pass={} purity={} mismatches={}",
                    i, j, tail, out.pass(), out.purity_failures.len(),
                    out.delta_mismatches.len()
                ),
                Err(e) => println!("twisted2 ({},{}) {:?}: ERROR {}", i, j, tail, e),
            }
        }
    }
    println!("twisted2 total: {:?}", t.elapsed());
}
