//! Multivariate Laurent polynomials with big-rational coefficients.
//!
//! Every symbolic value in the workbench lives in the fraction field of
//! these polynomials. The variable slots are fixed at [`NVARS`]; which
//! slots are in use (and their print names) is decided by the algebra
//! under study, not here.
//!
//! Invariants:
//! - no term has a zero coefficient
//! - exponents may be negative (Laurent)

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// Number of variable slots available to any polynomial.
///
/// Slots 0..=3 hold the parameter basis of the active algebra, slots 4..=6
/// hold spectral parameters u_1..u_3 (used by the Fock oracle).
pub const NVARS: usize = 7;

/// Exponent vector; unused slots stay 0.
pub type Exps = [i32; NVARS];

/// Arbitrary-precision rational scalar.
pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn exps_zero() -> Exps {
    [0; NVARS]
}

pub fn exps_add(a: &Exps, b: &Exps) -> Exps {
    let mut r = *a;
    for (ri, bi) in r.iter_mut().zip(b.iter()) {
        *ri += *bi;
    }
    r
}

pub fn exps_neg(a: &Exps) -> Exps {
    let mut r = *a;
    for ri in r.iter_mut() {
        *ri = -*ri;
    }
    r
}

pub fn exps_mul(a: &Exps, k: i32) -> Exps {
    let mut r = *a;
    for ri in r.iter_mut() {
        *ri *= k;
    }
    r
}

/// Sparse multivariate Laurent polynomial.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    pub terms: BTreeMap<Exps, Rat>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Rat::one(), exps_zero())
    }

    pub fn monomial(coeff: Rat, exps: Exps) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exps, coeff);
        }
        MPoly { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::monomial(rat_int(n), exps_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&exps_zero())
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    /// True if the polynomial is a single term.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, exps: Exps, coeff: &Rat) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(coeff.clone());
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(*e, c);
        }
        r
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(*e, &(-c.clone()));
        }
        r
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        if self.is_zero() || other.is_zero() {
            return MPoly::zero();
        }
        let mut r = MPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                r.add_term(exps_add(ea, eb), &(ca * cb));
            }
        }
        r
    }

    pub fn scale(&self, k: &Rat) -> MPoly {
        if k.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    pub fn mul_monomial(&self, coeff: &Rat, exps: &Exps) -> MPoly {
        if coeff.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (exps_add(e, exps), c * coeff))
                .collect(),
        }
    }

    pub fn pow(&self, mut n: u32) -> MPoly {
        let mut base = self.clone();
        let mut acc = MPoly::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Per-variable minimum exponent over all terms.
    pub fn min_exps(&self) -> Exps {
        let mut m = exps_zero();
        let mut first = true;
        for e in self.terms.keys() {
            if first {
                m = *e;
                first = false;
            } else {
                for i in 0..NVARS {
                    m[i] = m[i].min(e[i]);
                }
            }
        }
        m
    }

    /// Rational content: gcd of numerators over lcm of denominators, signed
    /// so that the lex-leading coefficient of `self / content()` is positive.
    pub fn content(&self) -> Rat {
        if self.is_zero() {
            return Rat::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num::Integer::gcd(&num_gcd, c.numer());
            den_lcm = num::Integer::lcm(&den_lcm, c.denom());
        }
        let mut content = Rat::new(num_gcd, den_lcm);
        // terms is a BTreeMap: the last key is lex-leading
        let lead = self.terms.iter().next_back().unwrap().1;
        if lead.is_negative() {
            content = -content;
        }
        content
    }

    /// Split into a primitive polynomial and the monomial factor removed:
    /// `self = primitive * coeff * x^exps` with primitive having content 1
    /// and min exponent 0 in every variable.
    pub fn primitive_parts(&self) -> (MPoly, Rat, Exps) {
        if self.is_zero() {
            return (MPoly::zero(), Rat::one(), exps_zero());
        }
        let shift = self.min_exps();
        let content = self.content();
        let inv = content.recip();
        let prim = MPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (exps_add(e, &exps_neg(&shift)), c * &inv))
                .collect(),
        };
        (prim, content, shift)
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &MPoly) -> Option<MPoly> {
        assert!(!other.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(MPoly::zero());
        }
        // Shift both to ordinary polynomials so lex long division terminates.
        let sa = self.min_exps();
        let sb = other.min_exps();
        let a = self.mul_monomial(&Rat::one(), &exps_neg(&sa));
        let b = other.mul_monomial(&Rat::one(), &exps_neg(&sb));
        let (blead_e, blead_c) = b.terms.iter().next_back().map(|(e, c)| (*e, c.clone()))?;
        let mut rem = a;
        let mut quo = MPoly::zero();
        while !rem.is_zero() {
            let (rlead_e, rlead_c) = {
                let (e, c) = rem.terms.iter().next_back().unwrap();
                (*e, c.clone())
            };
            let mut qe = exps_zero();
            for i in 0..NVARS {
                let d = rlead_e[i] - blead_e[i];
                if d < 0 {
                    return None;
                }
                qe[i] = d;
            }
            let qc = rlead_c / &blead_c;
            quo.add_term(qe, &qc);
            let piece = b.mul_monomial(&qc, &qe);
            rem = rem.sub(&piece);
        }
        let shift = exps_add(&sa, &exps_neg(&sb));
        Some(quo.mul_monomial(&Rat::one(), &shift))
    }

    /// Substitute rational values for the variables.
    pub fn eval_rat(&self, vals: &[Rat; NVARS]) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..NVARS {
                match e[i].cmp(&0) {
                    std::cmp::Ordering::Equal => {}
                    std::cmp::Ordering::Greater => {
                        t *= num::pow::pow(vals[i].clone(), e[i] as usize)
                    }
                    std::cmp::Ordering::Less => {
                        t *= num::pow::pow(vals[i].clone(), (-e[i]) as usize).recip()
                    }
                }
            }
            acc += t;
        }
        acc
    }

    pub fn display<'a>(&'a self, names: &'a [&'a str]) -> MPolyDisplay<'a> {
        MPolyDisplay { poly: self, names }
    }
}

pub struct MPolyDisplay<'a> {
    poly: &'a MPoly,
    names: &'a [&'a str],
}

impl fmt::Display for MPolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.poly.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let trivial_exps = e.iter().all(|&k| k == 0);
            if !mag.is_one() || trivial_exps {
                write!(f, "{}", mag)?;
                if !trivial_exps {
                    write!(f, "*")?;
                }
            }
            let mut first_var = true;
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !first_var {
                    write!(f, "*")?;
                }
                first_var = false;
                let name = self.names.get(i).copied().unwrap_or("?");
                if k == 1 {
                    write!(f, "{}", name)?;
                } else {
                    write!(f, "{}^{}", name, k)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        static NAMES: [&str; NVARS] = ["x0", "x1", "x2", "x3", "x4", "x5", "x6"];
        write!(f, "{}", self.display(&NAMES))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xv(i: usize, k: i32) -> Exps {
        let mut e = exps_zero();
        e[i] = k;
        e
    }

    #[test]
    fn mul_and_div_roundtrip() {
        // (1 - v^2)(1 + v) and divide back out
        let a = MPoly::one().sub(&MPoly::monomial(Rat::one(), xv(0, 2)));
        let b = MPoly::one().add(&MPoly::monomial(Rat::one(), xv(0, 1)));
        let p = a.mul(&b);
        assert_eq!(p.div_exact(&a).unwrap(), b);
        assert_eq!(p.div_exact(&b).unwrap(), a);
    }

    #[test]
    fn div_exact_detects_nondivisor() {
        let a = MPoly::one().sub(&MPoly::monomial(Rat::one(), xv(0, 1)));
        let b = MPoly::one().add(&MPoly::monomial(Rat::one(), xv(1, 1)));
        assert!(a.div_exact(&b).is_none());
    }

    #[test]
    fn laurent_division() {
        // v^-2(1 - v^2) divisible by (1 - v^2)
        let a = MPoly::one().sub(&MPoly::monomial(Rat::one(), xv(0, 2)));
        let la = a.mul_monomial(&Rat::one(), &xv(0, -2));
        let q = la.div_exact(&a).unwrap();
        assert_eq!(q, MPoly::monomial(Rat::one(), xv(0, -2)));
    }

    #[test]
    fn primitive_normalization() {
        // -6 v^-1 + 4 v : lex-leading term is 4v, so content 2, shift v^-1
        let p = MPoly::monomial(rat_int(-6), xv(0, -1)).add(&MPoly::monomial(rat_int(4), xv(0, 1)));
        let (prim, content, shift) = p.primitive_parts();
        assert_eq!(shift, xv(0, -1));
        assert_eq!(content, rat_int(2));
        let expect = MPoly::monomial(rat_int(2), xv(0, 2)).sub(&MPoly::from_int(3));
        assert_eq!(prim, expect);
        assert_eq!(prim.content(), Rat::one());
    }
}
