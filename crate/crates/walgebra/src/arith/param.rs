//! Elements of the generic parameter field.
//!
//! A [`ParamElem`] is a fraction of Laurent polynomials. The denominator is
//! kept as a multiset of primitive factors (plus a rational/monomial scale
//! folded into the numerator), because the denominators that arise in
//! practice are products of binomials like `1 - q^m` and keeping them
//! factored makes addition cheap and cancellation a matter of trial exact
//! division.
//!
//! Invariants:
//! - denominator factors are primitive (content 1, min exponent 0, positive
//!   lex-leading coefficient) and never constant
//! - a zero element has an empty factor list
//! - after construction no denominator factor divides the numerator
//!
//! Equality is decided by cross-multiplication, which is exact; two elements
//! built along different routes compare equal iff they are the same rational
//! function.

use std::fmt;

use super::mpoly::{exps_neg, exps_zero, rat_int, Exps, MPoly, Rat, NVARS};
use num::{One, Signed, Zero};

/// Signed monomial `coeff * x^exps`, the currency of arguments and shifts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mono {
    pub coeff: Rat,
    pub exps: Exps,
}

impl Mono {
    pub fn one() -> Self {
        Mono { coeff: Rat::one(), exps: exps_zero() }
    }

    pub fn new(coeff: Rat, exps: Exps) -> Self {
        assert!(!coeff.is_zero(), "monomial with zero coefficient");
        Mono { coeff, exps }
    }

    pub fn var(i: usize, k: i32) -> Self {
        let mut e = exps_zero();
        e[i] = k;
        Mono { coeff: Rat::one(), exps: e }
    }

    pub fn is_one(&self) -> bool {
        self.coeff.is_one() && self.exps == exps_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.coeff.is_positive()
    }

    pub fn inv(&self) -> Mono {
        Mono { coeff: self.coeff.recip(), exps: exps_neg(&self.exps) }
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono {
            coeff: &self.coeff * &other.coeff,
            exps: super::mpoly::exps_add(&self.exps, &other.exps),
        }
    }

    /// Integer power, negative allowed.
    pub fn pow(&self, n: i32) -> Mono {
        let mag = n.unsigned_abs();
        let base = if n < 0 { self.inv() } else { self.clone() };
        let mut acc = Mono::one();
        for _ in 0..mag {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn to_poly(&self) -> MPoly {
        MPoly::monomial(self.coeff.clone(), self.exps)
    }

    pub fn to_param(&self) -> ParamElem {
        ParamElem::from_poly(self.to_poly())
    }
}

/// Element of the parameter field, `num / prod(factors)`.
#[derive(Clone)]
pub struct ParamElem {
    num: MPoly,
    den: Vec<(MPoly, u32)>,
}

impl ParamElem {
    pub fn zero() -> Self {
        ParamElem { num: MPoly::zero(), den: Vec::new() }
    }

    pub fn one() -> Self {
        ParamElem { num: MPoly::one(), den: Vec::new() }
    }

    pub fn from_int(n: i64) -> Self {
        ParamElem { num: MPoly::from_int(n), den: Vec::new() }
    }

    pub fn from_rat(r: Rat) -> Self {
        ParamElem { num: MPoly::monomial(r, exps_zero()), den: Vec::new() }
    }

    pub fn from_poly(num: MPoly) -> Self {
        ParamElem { num, den: Vec::new() }
    }

    pub fn monomial(coeff: Rat, exps: Exps) -> Self {
        Self::from_poly(MPoly::monomial(coeff, exps))
    }

    pub fn var(i: usize, k: i32) -> Self {
        Mono::var(i, k).to_param()
    }

    /// Build `num / den` from raw polynomials.
    pub fn fraction(num: MPoly, den: MPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = ParamElem { num, den: Vec::new() };
        r.push_den_factor(den, 1);
        r.reduce();
        r
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.is_one()
    }

    pub fn numerator(&self) -> &MPoly {
        &self.num
    }

    /// The denominator, expanded.
    pub fn denominator(&self) -> MPoly {
        let mut d = MPoly::one();
        for (f, m) in &self.den {
            d = d.mul(&f.pow(*m));
        }
        d
    }

    /// Recognize the element as a signed monomial.
    pub fn as_mono(&self) -> Option<Mono> {
        if !self.den.is_empty() || !self.num.is_monomial() {
            return None;
        }
        let (e, c) = self.num.terms.iter().next().unwrap();
        Some(Mono { coeff: c.clone(), exps: *e })
    }

    fn push_den_factor(&mut self, f: MPoly, mult: u32) {
        if mult == 0 {
            return;
        }
        let (prim, content, shift) = f.pow(mult).primitive_parts();
        // fold content & monomial into the numerator
        self.num = self
            .num
            .mul_monomial(&content.recip(), &exps_neg(&shift));
        if prim.is_one() {
            return;
        }
        // prim may itself be a power of an existing factor; we do not try to
        // factor it further, only to merge identical polynomials
        for (g, m) in &mut self.den {
            if *g == prim {
                *m += 1;
                return;
            }
        }
        self.den.push((prim, 1));
    }

    /// Cancel denominator factors that exactly divide the numerator.
    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let mut i = 0;
        while i < self.den.len() {
            let mut cancelled = false;
            while self.den[i].1 > 0 {
                match self.num.div_exact(&self.den[i].0) {
                    Some(q) => {
                        self.num = q;
                        self.den[i].1 -= 1;
                        cancelled = true;
                        if self.num.is_monomial() {
                            break;
                        }
                    }
                    None => break,
                }
            }
            let _ = cancelled;
            if self.den[i].1 == 0 {
                self.den.swap_remove(i);
            } else {
                i += 1;
            }
        }
        self.den.sort_by(|a, b| a.0.terms.cmp(&b.0.terms));
    }

    pub fn neg(&self) -> ParamElem {
        ParamElem { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn add(&self, other: &ParamElem) -> ParamElem {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // common denominator: per-factor max multiplicity
        let mut den: Vec<(MPoly, u32)> = self.den.clone();
        for (g, m) in &other.den {
            match den.iter_mut().find(|(f, _)| f == g) {
                Some((_, dm)) => *dm = (*dm).max(*m),
                None => den.push((g.clone(), *m)),
            }
        }
        let mut na = self.num.clone();
        let mut nb = other.num.clone();
        for (f, m) in &den {
            let ma = self.den.iter().find(|(g, _)| g == f).map(|(_, k)| *k).unwrap_or(0);
            let mb = other.den.iter().find(|(g, _)| g == f).map(|(_, k)| *k).unwrap_or(0);
            if *m > ma {
                na = na.mul(&f.pow(*m - ma));
            }
            if *m > mb {
                nb = nb.mul(&f.pow(*m - mb));
            }
        }
        let mut r = ParamElem { num: na.add(&nb), den };
        r.reduce();
        r
    }

    pub fn sub(&self, other: &ParamElem) -> ParamElem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ParamElem) -> ParamElem {
        if self.is_zero() || other.is_zero() {
            return ParamElem::zero();
        }
        let mut r = ParamElem {
            num: self.num.mul(&other.num),
            den: self.den.clone(),
        };
        for (g, m) in &other.den {
            match r.den.iter_mut().find(|(f, _)| f == g) {
                Some((_, dm)) => *dm += *m,
                None => r.den.push((g.clone(), *m)),
            }
        }
        r.reduce();
        r
    }

    pub fn mul_mono(&self, m: &Mono) -> ParamElem {
        ParamElem {
            num: self.num.mul_monomial(&m.coeff, &m.exps),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> ParamElem {
        assert!(!self.is_zero(), "inverting zero");
        let mut num = MPoly::one();
        for (f, m) in &self.den {
            num = num.mul(&f.pow(*m));
        }
        let mut r = ParamElem { num, den: Vec::new() };
        r.push_den_factor(self.num.clone(), 1);
        r.reduce();
        r
    }

    pub fn div(&self, other: &ParamElem) -> ParamElem {
        self.mul(&other.inv())
    }

    pub fn pow(&self, n: i32) -> ParamElem {
        let base = if n < 0 { self.inv() } else { self.clone() };
        let mut acc = ParamElem::one();
        let mut k = n.unsigned_abs();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    pub fn eq(&self, other: &ParamElem) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        let lhs = self.num.mul(&other.denominator());
        let rhs = other.num.mul(&self.denominator());
        lhs == rhs
    }

    /// Substitute rational values; `None` if a denominator factor vanishes.
    pub fn eval_rat(&self, vals: &[Rat; NVARS]) -> Option<Rat> {
        let mut acc = self.num.eval_rat(vals);
        for (f, m) in &self.den {
            let v = f.eval_rat(vals);
            if v.is_zero() {
                return None;
            }
            for _ in 0..*m {
                acc /= v.clone();
            }
        }
        Some(acc)
    }

    pub fn display<'a>(&'a self, names: &'a [&'a str]) -> ParamDisplay<'a> {
        ParamDisplay { elem: self, names }
    }
}

impl PartialEq for ParamElem {
    fn eq(&self, other: &Self) -> bool {
        ParamElem::eq(self, other)
    }
}

impl Eq for ParamElem {}

pub struct ParamDisplay<'a> {
    elem: &'a ParamElem,
    names: &'a [&'a str],
}

impl fmt::Display for ParamDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elem.den.is_empty() {
            return write!(f, "{}", self.elem.num.display(self.names));
        }
        write!(f, "({})", self.elem.num.display(self.names))?;
        write!(f, " / (")?;
        let mut first = true;
        for (g, m) in &self.elem.den {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *m == 1 {
                write!(f, "({})", g.display(self.names))?;
            } else {
                write!(f, "({})^{}", g.display(self.names), m)?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Debug for ParamElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        static NAMES: [&str; NVARS] = ["x0", "x1", "x2", "x3", "x4", "x5", "x6"];
        write!(f, "{}", self.display(&NAMES))
    }
}

/// Convenience: 1 - m for a monomial m, as a polynomial.
pub fn one_minus(m: &Mono) -> MPoly {
    MPoly::one().sub(&m.to_poly())
}

pub fn param_int(n: i64) -> ParamElem {
    ParamElem::from_int(n)
}

pub fn param_rat_frac(p: i64, q: i64) -> ParamElem {
    ParamElem::from_rat(Rat::new(p.into(), q.into()))
}

pub fn rat_from(n: i64) -> Rat {
    rat_int(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(k: i32) -> ParamElem {
        ParamElem::var(0, k)
    }

    #[test]
    fn fraction_cancels() {
        // (1 - v^2) / (1 - v) = 1 + v
        let num = MPoly::one().sub(&Mono::var(0, 2).to_poly());
        let den = MPoly::one().sub(&Mono::var(0, 1).to_poly());
        let e = ParamElem::fraction(num, den);
        let expect = ParamElem::one().add(&v(1));
        assert!(e.eq(&expect));
        assert!(e.as_mono().is_none());
    }

    #[test]
    fn add_with_common_factors() {
        // 1/(1-v) + v/(1-v) = (1+v... actually (1+v)/(1-v); then minus itself = 0
        let den = MPoly::one().sub(&Mono::var(0, 1).to_poly());
        let a = ParamElem::fraction(MPoly::one(), den.clone());
        let b = ParamElem::fraction(Mono::var(0, 1).to_poly(), den.clone());
        let s = a.add(&b);
        let expect = ParamElem::fraction(
            MPoly::one().add(&Mono::var(0, 1).to_poly()),
            den,
        );
        assert!(s.eq(&expect));
        assert!(s.sub(&expect).is_zero());
    }

    #[test]
    fn inverse_roundtrip() {
        let den = MPoly::one().sub(&Mono::var(1, 3).to_poly());
        let a = ParamElem::fraction(
            MPoly::from_int(2).add(&Mono::var(0, 1).to_poly()),
            den,
        );
        assert!(a.mul(&a.inv()).is_one());
    }

    #[test]
    fn monomial_recognition() {
        let m = Mono::new(Rat::new((-3).into(), 2.into()), {
            let mut e = exps_zero();
            e[0] = 2;
            e[1] = -1;
            e
        });
        let p = m.to_param();
        assert_eq!(p.as_mono().unwrap(), m);
        assert_eq!(p.mul(&p.inv()).as_mono().unwrap(), Mono::one());
    }
}
