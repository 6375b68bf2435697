//! One-variable rational functions over the parameter field.
//!
//! A [`RatFn`] is `num(w) / prod_k (1 - rho_k w)^{m_k}` with the numerator a
//! Laurent polynomial in `w` and every `rho_k` a signed parameter monomial.
//! This is the closed form recovered from contraction series and the carrier
//! of the `d`-function products; the factored denominator is what makes
//! fusion-point evaluation and delta extraction exact.
//!
//! Pole bookkeeping convention: the factor list stores `rho` of `(1 - rho w)`;
//! partial fractions and delta terms are reported at the pole *location*
//! `rho^{-1}` so they line up with `delta(w / location)`.

use std::collections::BTreeMap;
use std::fmt;

use super::mpoly::NVARS;
use super::param::{Mono, ParamElem};
use super::series::{LSeries, ORDER_EXACT};
use crate::error::WError;

/// Extra matched orders demanded beyond the numerator degree when
/// reconstructing a rational function from a series.
pub const RECONSTRUCT_GUARD: i64 = 4;

pub type WPoly = BTreeMap<i64, ParamElem>;

fn wpoly_add_term(p: &mut WPoly, n: i64, c: &ParamElem) {
    if c.is_zero() {
        return;
    }
    let cur = p.get(&n).cloned().unwrap_or_else(ParamElem::zero);
    let sum = cur.add(c);
    if sum.is_zero() {
        p.remove(&n);
    } else {
        p.insert(n, sum);
    }
}

fn wpoly_mul(a: &WPoly, b: &WPoly) -> WPoly {
    let mut r = WPoly::new();
    for (na, ca) in a {
        for (nb, cb) in b {
            wpoly_add_term(&mut r, na + nb, &ca.mul(cb));
        }
    }
    r
}

/// Multiply by (1 - rho w).
fn wpoly_mul_linfactor(p: &WPoly, rho: &Mono) -> WPoly {
    let mut r = p.clone();
    for (n, c) in p {
        wpoly_add_term(&mut r, n + 1, &c.mul_mono(rho).neg());
    }
    r
}

/// Exact division by (1 - rho w); `None` if it does not divide.
fn wpoly_div_linfactor(p: &WPoly, rho: &Mono) -> Option<WPoly> {
    if p.is_empty() {
        return Some(WPoly::new());
    }
    // p = q (1 - rho w): p_n = q_n - rho q_{n-1}, so q_n = p_n + rho q_{n-1}
    let lo = *p.keys().next().unwrap();
    let hi = *p.keys().next_back().unwrap();
    let mut q = WPoly::new();
    let mut prev = ParamElem::zero();
    for n in lo..hi {
        let pn = p.get(&n).cloned().unwrap_or_else(ParamElem::zero);
        let qn = pn.add(&prev.mul_mono(rho));
        if !qn.is_zero() {
            q.insert(n, qn.clone());
        }
        prev = qn;
    }
    // remainder: p_hi + rho q_{hi-1} must vanish
    let phi = p.get(&hi).cloned().unwrap_or_else(ParamElem::zero);
    if phi.add(&prev.mul_mono(rho)).is_zero() {
        Some(q)
    } else {
        None
    }
}

fn wpoly_eval(p: &WPoly, at: &Mono) -> ParamElem {
    let mut acc = ParamElem::zero();
    for (n, c) in p {
        let f = at.pow(i32::try_from(*n).expect("exponent fits i32"));
        acc = acc.add(&c.mul_mono(&f));
    }
    acc
}

/// Which region a series expansion is taken in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Region {
    /// `|w|` small: every `1/(1 - w/L)` expands in non-negative powers.
    Inside,
    /// `|w|` large: expansion in negative powers.
    Outside,
}

#[derive(Clone)]
pub struct RatFn {
    num: WPoly,
    poles: Vec<(Mono, u32)>,
}

impl RatFn {
    pub fn zero() -> Self {
        RatFn { num: WPoly::new(), poles: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(ParamElem::one())
    }

    pub fn constant(c: ParamElem) -> Self {
        let mut num = WPoly::new();
        if !c.is_zero() {
            num.insert(0, c);
        }
        RatFn { num, poles: Vec::new() }
    }

    pub fn from_poly(num: WPoly) -> Self {
        RatFn { num, poles: Vec::new() }
    }

    /// Build `num / prod (1 - rho w)` and cancel common factors.
    pub fn new(num: WPoly, poles: Vec<(Mono, u32)>) -> Self {
        let mut r = RatFn { num, poles };
        r.reduce();
        r
    }

    /// Numerator as a Laurent polynomial in `w`.
    pub fn numerator(&self) -> &WPoly {
        &self.num
    }

    /// Denominator factors `(rho, multiplicity)` meaning `(1 - rho w)^mult`.
    pub fn pole_factors(&self) -> &[(Mono, u32)] {
        &self.poles
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn num_degree(&self) -> Option<(i64, i64)> {
        if self.num.is_empty() {
            None
        } else {
            Some((
                *self.num.keys().next().unwrap(),
                *self.num.keys().next_back().unwrap(),
            ))
        }
    }

    fn reduce(&mut self) {
        if self.num.is_empty() {
            self.poles.clear();
            return;
        }
        let mut i = 0;
        while i < self.poles.len() {
            while self.poles[i].1 > 0 {
                match wpoly_div_linfactor(&self.num, &self.poles[i].0) {
                    Some(q) => {
                        self.num = q;
                        self.poles[i].1 -= 1;
                    }
                    None => break,
                }
            }
            if self.poles[i].1 == 0 {
                self.poles.swap_remove(i);
            } else {
                i += 1;
            }
        }
        self.poles.sort_by(|a, b| (&a.0.exps, &a.0.coeff).cmp(&(&b.0.exps, &b.0.coeff)));
    }

    fn push_pole(&mut self, rho: &Mono, mult: u32) {
        match self.poles.iter_mut().find(|(g, _)| g == rho) {
            Some((_, m)) => *m += mult,
            None => self.poles.push((rho.clone(), mult)),
        }
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            num: self.num.iter().map(|(n, c)| (*n, c.neg())).collect(),
            poles: self.poles.clone(),
        }
    }

    pub fn scale(&self, k: &ParamElem) -> RatFn {
        if k.is_zero() {
            return RatFn::zero();
        }
        RatFn {
            num: self.num.iter().map(|(n, c)| (*n, c.mul(k))).collect(),
            poles: self.poles.clone(),
        }
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        let mut r = RatFn {
            num: wpoly_mul(&self.num, &other.num),
            poles: self.poles.clone(),
        };
        for (rho, m) in &other.poles {
            r.push_pole(rho, *m);
        }
        r.reduce();
        r
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        // common denominator by max multiplicity
        let mut poles = self.poles.clone();
        for (rho, m) in &other.poles {
            match poles.iter_mut().find(|(g, _)| g == rho) {
                Some((_, pm)) => *pm = (*pm).max(*m),
                None => poles.push((rho.clone(), *m)),
            }
        }
        let mut na = self.num.clone();
        let mut nb = other.num.clone();
        for (rho, m) in &poles {
            let ma = self.poles.iter().find(|(g, _)| g == rho).map(|(_, k)| *k).unwrap_or(0);
            let mb = other.poles.iter().find(|(g, _)| g == rho).map(|(_, k)| *k).unwrap_or(0);
            for _ in ma..*m {
                na = wpoly_mul_linfactor(&na, rho);
            }
            for _ in mb..*m {
                nb = wpoly_mul_linfactor(&nb, rho);
            }
        }
        for (n, c) in nb {
            wpoly_add_term(&mut na, n, &c);
        }
        RatFn::new(na, poles)
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.add(&other.neg())
    }

    /// Multiply by the linear factor (1 - rho w) (cancels a pole if present).
    pub fn mul_linfactor(&self, rho: &Mono) -> RatFn {
        let mut r = self.clone();
        if let Some((_, m)) = r.poles.iter_mut().find(|(g, _)| g == rho) {
            *m -= 1;
            if *m == 0 {
                r.poles.retain(|(_, k)| *k > 0);
            }
        } else {
            r.num = wpoly_mul_linfactor(&r.num, rho);
        }
        r
    }

    /// Substitute `w -> rho0 * w`.
    pub fn scale_arg(&self, rho0: &Mono) -> RatFn {
        let num = self
            .num
            .iter()
            .map(|(n, c)| {
                let f = rho0.pow(i32::try_from(*n).expect("exponent fits i32"));
                (*n, c.mul_mono(&f))
            })
            .collect();
        let poles = self
            .poles
            .iter()
            .map(|(rho, m)| (rho.mul(rho0), *m))
            .collect();
        RatFn { num, poles }
    }

    /// Substitute `w -> 1/w`, keeping the factored shape:
    /// `(1 - rho/w) = -rho w^{-1} (1 - rho^{-1} w)`.
    pub fn invert_var(&self) -> RatFn {
        let mut num: WPoly = self.num.iter().map(|(n, c)| (-n, c.clone())).collect();
        let mut poles = Vec::with_capacity(self.poles.len());
        for (rho, m) in &self.poles {
            // divide numerator by (-rho)^m w^{-m}
            let factor = rho.inv().pow(m_i32(*m)).mul(&Mono::new(
                num::pow::pow(-num::BigRational::from_integer(1.into()), *m as usize),
                super::mpoly::exps_zero(),
            ));
            num = num
                .iter()
                .map(|(n, c)| (*n + *m as i64, c.mul_mono(&factor)))
                .collect();
            poles.push((rho.inv(), *m));
        }
        RatFn::new(num, poles)
    }

    /// Laurent data at `w = loc`: the coefficients of `1/(1 - w/loc)^k`
    /// for `k = 1..=p` (index k-1) and the value of the regular part there.
    pub fn laurent_at(&self, loc: &Mono) -> (Vec<ParamElem>, ParamElem) {
        let rho = loc.inv();
        let p = self
            .poles
            .iter()
            .find(|(g, _)| *g == rho)
            .map(|(_, m)| *m)
            .unwrap_or(0);
        if p == 0 {
            return (Vec::new(), self.eval(loc).expect("no pole at this point"));
        }
        // R = G(w)/(1 - rho w)^p with G regular at loc
        let mut g = RatFn {
            num: self.num.clone(),
            poles: self
                .poles
                .iter()
                .filter(|(r, _)| *r != rho)
                .cloned()
                .collect(),
        };
        let mut sing = vec![ParamElem::zero(); p as usize];
        for k in 0..p {
            let gk = g.eval(loc).expect("iterated quotient regular at the point");
            // coefficient of 1/(1 - rho w)^{p-k}
            sing[(p - 1 - k) as usize] = gk.clone();
            // g := (g - gk)/(1 - rho w)
            let mut shifted = g.sub(&RatFn::constant(gk));
            shifted = RatFn {
                num: wpoly_div_linfactor(&shifted.num, &rho)
                    .expect("numerator vanishes at the point"),
                poles: shifted.poles.clone(),
            };
            g = shifted;
        }
        let regular = g.eval(loc).expect("regular part evaluates");
        (sing, regular)
    }

    /// Evaluate at `w = at`; error if `at` hits a pole.
    pub fn eval(&self, at: &Mono) -> Result<ParamElem, WError> {
        let mut acc = wpoly_eval(&self.num, at);
        for (rho, m) in &self.poles {
            let prod = rho.mul(at);
            if prod.is_one() {
                return Err(WError::EvalAtPole);
            }
            let factor = ParamElem::one().sub(&prod.to_param());
            for _ in 0..*m {
                acc = acc.div(&factor);
            }
        }
        Ok(acc)
    }

    /// Partial fractions: `R = poly + sum_k r_k / (1 - w/L_k)` with the pole
    /// locations `L_k = rho_k^{-1}`. All poles must be simple and distinct.
    pub fn partial_fractions(&self) -> Result<(WPoly, Vec<(Mono, ParamElem)>), WError> {
        for (_, m) in &self.poles {
            if *m > 1 {
                return Err(WError::RepeatedPole);
            }
        }
        for i in 0..self.poles.len() {
            for j in (i + 1)..self.poles.len() {
                if self.poles[i].0 == self.poles[j].0 {
                    return Err(WError::RepeatedPole);
                }
            }
        }
        let mut terms = Vec::with_capacity(self.poles.len());
        for (k, (rho_k, _)) in self.poles.iter().enumerate() {
            let loc = rho_k.inv();
            let mut r = wpoly_eval(&self.num, &loc);
            for (j, (rho_j, _)) in self.poles.iter().enumerate() {
                if j == k {
                    continue;
                }
                // 1 - L_k/L_j = 1 - rho_j * L_k
                let f = ParamElem::one().sub(&rho_j.mul(&loc).to_param());
                r = r.div(&f);
            }
            terms.push((loc, r));
        }
        // polynomial part by exact subtraction
        let mut rest = self.num.clone();
        for (k, (loc, r)) in terms.iter().enumerate() {
            // r * prod_{j != k} (1 - w/L_j)
            let mut piece = WPoly::new();
            piece.insert(0, r.clone());
            for (j, (rho_j, _)) in self.poles.iter().enumerate() {
                if j == k {
                    continue;
                }
                piece = wpoly_mul_linfactor(&piece, rho_j);
            }
            let _ = loc;
            for (n, c) in piece {
                wpoly_add_term(&mut rest, n, &c.neg());
            }
        }
        let mut poly = rest;
        for (rho, _) in &self.poles {
            poly = wpoly_div_linfactor(&poly, rho)
                .expect("partial fraction remainder must divide the denominator");
        }
        Ok((poly, terms))
    }

    /// Series expansion of the chosen region, with coefficients for
    /// exponents in `lo..hi`.
    pub fn expand(&self, region: Region, lo: i64, hi: i64) -> Result<LSeries, WError> {
        let (poly, terms) = self.partial_fractions()?;
        let mut s = LSeries::zero("w", hi);
        for (n, c) in &poly {
            s.add_coeff(*n, c);
        }
        for (loc, r) in &terms {
            match region {
                Region::Inside => {
                    // sum_{n >= 0} r (w/L)^n
                    for n in lo.max(0)..hi {
                        let f = loc.pow(-i32::try_from(n).unwrap());
                        s.add_coeff(n, &r.mul_mono(&f));
                    }
                }
                Region::Outside => {
                    // -sum_{n <= -1} r (w/L)^n
                    for n in lo..hi.min(0) {
                        let f = loc.pow(-i32::try_from(n).unwrap());
                        s.add_coeff(n, &r.mul_mono(&f).neg());
                    }
                }
            }
        }
        Ok(s)
    }

    /// Delta-term content of the two-region difference: for each simple pole,
    /// inside-expansion minus outside-expansion contributes
    /// `residue_coeff * delta(w / L)`.
    pub fn delta_terms(&self) -> Result<Vec<(Mono, ParamElem)>, WError> {
        Ok(self.partial_fractions()?.1)
    }

    pub fn eq(&self, other: &RatFn) -> bool {
        // reduced + monic linear factors make the representation canonical
        if self.poles.len() != other.poles.len() {
            return false;
        }
        for ((ra, ma), (rb, mb)) in self.poles.iter().zip(other.poles.iter()) {
            if ma != mb || ra != rb {
                return false;
            }
        }
        if self.num.len() != other.num.len() {
            return false;
        }
        self.num
            .iter()
            .zip(other.num.iter())
            .all(|((na, ca), (nb, cb))| na == nb && ca.eq(cb))
    }

    pub fn display<'a>(&'a self, names: &'a [&'a str]) -> RatFnDisplay<'a> {
        RatFnDisplay { ratfn: self, names }
    }
}

fn m_i32(m: u32) -> i32 {
    i32::try_from(m).expect("multiplicity fits i32")
}

/// Recover a rational function from a truncated series given candidate pole
/// monomials `rho` (factors `1 - rho w`) and a numerator degree bound.
///
/// The series must stay valid for at least [`RECONSTRUCT_GUARD`] orders past
/// the numerator bound once the candidate factors are multiplied in; all of
/// those orders must vanish or the series is not of the claimed form.
pub fn ratfn_reconstruct(
    series: &LSeries,
    candidates: &[Mono],
    max_num_degree: i64,
) -> Result<RatFn, WError> {
    let mut s = series.clone();
    for rho in candidates {
        let mut lin = LSeries::one(&series.var, ORDER_EXACT);
        lin.set_coeff(1, rho.to_param().neg());
        s = s.mul(&lin);
    }
    let needed = max_num_degree + RECONSTRUCT_GUARD + 1;
    if s.order() < needed {
        return Err(WError::NoReconstruction {
            detail: format!(
                "series order {} insufficient for degree bound {} plus guard",
                s.order(),
                max_num_degree
            ),
        });
    }
    let mut num = WPoly::new();
    for (n, c) in s.iter() {
        if n <= max_num_degree {
            num.insert(n, c.clone());
        } else if !c.is_zero() {
            return Err(WError::NoReconstruction {
                detail: format!("nonzero coefficient at order {} past degree bound {}", n, max_num_degree),
            });
        }
    }
    Ok(RatFn::new(
        num,
        candidates.iter().map(|rho| (rho.clone(), 1)).collect(),
    ))
}

pub struct RatFnDisplay<'a> {
    ratfn: &'a RatFn,
    names: &'a [&'a str],
}

impl fmt::Display for RatFnDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        let mut first = true;
        for (n, c) in &self.ratfn.num {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})w^{}", c.display(self.names), n)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, "]")?;
        for (rho, m) in &self.ratfn.poles {
            write!(
                f,
                " / (1 - ({}{}{})w)^{}",
                rho.coeff,
                if rho.exps == super::mpoly::exps_zero() { "" } else { "*" },
                MonoExpsDisplay { exps: &rho.exps, names: self.names },
                m
            )?;
        }
        Ok(())
    }
}

struct MonoExpsDisplay<'a> {
    exps: &'a super::mpoly::Exps,
    names: &'a [&'a str],
}

impl fmt::Display for MonoExpsDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &k) in self.exps.iter().enumerate() {
            if k == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            let name = self.names.get(i).copied().unwrap_or("?");
            if k == 1 {
                write!(f, "{}", name)?;
            } else {
                write!(f, "{}^{}", name, k)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        static NAMES: [&str; NVARS] = ["x0", "x1", "x2", "x3", "x4", "x5", "x6"];
        write!(f, "{}", self.display(&NAMES))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::mpoly::exps_zero;

    fn mono_var(i: usize, k: i32) -> Mono {
        Mono::var(i, k)
    }

    #[test]
    fn reconstruct_geometric() {
        // 1/(1 - x^2 w) with x = var0^2 say; use rho = var0^2
        let rho = mono_var(0, 2);
        let mut s = LSeries::zero("w", 12);
        for n in 0..12 {
            s.set_coeff(n, rho.pow(n as i32).to_param());
        }
        let r = ratfn_reconstruct(&s, &[rho.clone()], 2).unwrap();
        assert!(r.numerator().len() == 1 && r.numerator().get(&0).unwrap().is_one());
        assert_eq!(r.pole_factors(), &[(rho, 1)]);
    }

    #[test]
    fn reconstruct_rejects_exp() {
        // exp(w) is not rational: tail coefficients survive
        let mut log = std::collections::BTreeMap::new();
        log.insert(1, ParamElem::one());
        let s = LSeries::exp_from_log("w", &log, 12);
        let err = ratfn_reconstruct(&s, &[mono_var(0, 1)], 3);
        assert!(err.is_err());
    }

    #[test]
    fn partial_fraction_single_pole() {
        // 1/(1 - w/L) with L = var0: factor rho = var0^{-1}
        let rho = mono_var(0, -1);
        let mut num = WPoly::new();
        num.insert(0, ParamElem::one());
        let r = RatFn::new(num, vec![(rho, 1)]);
        let (poly, terms) = r.partial_fractions().unwrap();
        assert!(poly.is_empty());
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0, mono_var(0, 1));
        assert!(terms[0].1.is_one());
    }

    #[test]
    fn partial_fraction_poly_part() {
        // (1 - rho w)(stuff): a pure polynomial has no pole terms
        let mut num = WPoly::new();
        num.insert(-1, ParamElem::one());
        num.insert(2, ParamElem::from_int(3));
        let r = RatFn::from_poly(num.clone());
        let (poly, terms) = r.partial_fractions().unwrap();
        assert!(terms.is_empty());
        assert_eq!(poly, num);
    }

    #[test]
    fn two_region_difference_is_delta() {
        // R = 1/(1 - rho w): inside minus outside = delta at L = rho^{-1},
        // coefficient 1: check coefficient-wise on |n| <= 6
        let rho = mono_var(0, 3);
        let mut num = WPoly::new();
        num.insert(0, ParamElem::one());
        let r = RatFn::new(num, vec![(rho.clone(), 1)]);
        let inside = r.expand(Region::Inside, -7, 7).unwrap();
        let outside = r.expand(Region::Outside, -7, 7).unwrap();
        let diff = inside.sub(&outside);
        let loc = rho.inv();
        for n in -6..6 {
            // delta(w/L) = sum (w/L)^n -> coefficient of w^n is L^{-n}
            let expect = loc.pow(-n).to_param();
            assert!(diff.coeff(n as i64).eq(&expect), "mode {}", n);
        }
    }

    #[test]
    fn invert_var_roundtrip() {
        let rho = mono_var(0, 2);
        let mut num = WPoly::new();
        num.insert(0, ParamElem::one());
        num.insert(1, ParamElem::from_int(5));
        let r = RatFn::new(num, vec![(rho, 1), (mono_var(1, -1), 1)]);
        let twice = r.invert_var().invert_var();
        assert!(r.eq(&twice));
        let _ = exps_zero();
    }
}

/// Fully factored rational function `prod (1 - zeta w) / prod (1 - rho w)`,
/// the shape of every closed contraction form. Keeping the zero list makes
/// the log-side coefficients available without any series work.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FactoredRat {
    pub zeros: Vec<Mono>,
    pub poles: Vec<Mono>,
}

impl FactoredRat {
    pub fn one() -> Self {
        FactoredRat { zeros: Vec::new(), poles: Vec::new() }
    }

    pub fn new(zeros: Vec<Mono>, poles: Vec<Mono>) -> Self {
        let mut r = FactoredRat { zeros, poles };
        r.cancel();
        r
    }

    fn cancel(&mut self) {
        let mut i = 0;
        while i < self.zeros.len() {
            if let Some(j) = self.poles.iter().position(|p| *p == self.zeros[i]) {
                self.poles.remove(j);
                self.zeros.remove(i);
            } else {
                i += 1;
            }
        }
    }

    pub fn mul(&self, other: &FactoredRat) -> FactoredRat {
        let mut zeros = self.zeros.clone();
        zeros.extend(other.zeros.iter().cloned());
        let mut poles = self.poles.clone();
        poles.extend(other.poles.iter().cloned());
        FactoredRat::new(zeros, poles)
    }

    pub fn inv(&self) -> FactoredRat {
        FactoredRat { zeros: self.poles.clone(), poles: self.zeros.clone() }
    }

    pub fn scale_arg(&self, rho: &Mono) -> FactoredRat {
        FactoredRat {
            zeros: self.zeros.iter().map(|z| z.mul(rho)).collect(),
            poles: self.poles.iter().map(|p| p.mul(rho)).collect(),
        }
    }

    pub fn to_ratfn(&self) -> RatFn {
        let mut num = WPoly::new();
        num.insert(0, ParamElem::one());
        let mut r = RatFn::from_poly(num);
        for z in &self.zeros {
            r = r.mul_linfactor(z);
        }
        r.mul(&RatFn::new(
            {
                let mut one = WPoly::new();
                one.insert(0, ParamElem::one());
                one
            },
            self.poles.iter().map(|p| (p.clone(), 1)).collect(),
        ))
    }

    /// Log coefficients: `m`-th is `(1/m)(sum rho^m - sum zeta^m)`.
    pub fn log(&self, order: i64) -> crate::arith::series::LogSeries {
        let mut l = crate::arith::series::LogSeries::zero(order);
        for m in 1..order {
            let mut acc = ParamElem::zero();
            for p in &self.poles {
                acc = acc.add(&p.pow(m as i32).to_param());
            }
            for z in &self.zeros {
                acc = acc.sub(&z.pow(m as i32).to_param());
            }
            let c = acc.mul(&ParamElem::from_rat(super::mpoly::Rat::new(
                1.into(),
                m.into(),
            )));
            l.set_coeff(m, c);
        }
        l
    }

    pub fn eval(&self, at: &Mono) -> Result<ParamElem, WError> {
        self.to_ratfn().eval(at)
    }
}

/// Recover a rational function from *log* coefficients: add back the
/// candidate pole content, exponentiate (coefficients are now small), and
/// demand the numerator terminate at the degree bound with guard to spare.
pub fn reconstruct_from_log(
    log: &crate::arith::series::LogSeries,
    candidates: &[Mono],
    max_num_degree: i64,
) -> Result<RatFn, WError> {
    let needed = max_num_degree + RECONSTRUCT_GUARD + 1;
    if log.order() < needed {
        return Err(WError::NoReconstruction {
            detail: format!(
                "log order {} insufficient for degree bound {} plus guard",
                log.order(),
                max_num_degree
            ),
        });
    }
    // log num = log R + sum_rho log(1 - rho w) = log R - sum_rho rho^m/m
    let mut num_log = crate::arith::series::LogSeries::zero(needed);
    for m in 1..needed {
        let mut acc = log.coeff(m).clone();
        let minv = ParamElem::from_rat(super::mpoly::Rat::new(1.into(), m.into()));
        for rho in candidates {
            acc = acc.sub(&rho.pow(m as i32).to_param().mul(&minv));
        }
        num_log.set_coeff(m, acc);
    }
    let num_series = num_log.exp();
    let mut num = WPoly::new();
    for (n, c) in num_series.iter() {
        if n <= max_num_degree {
            num.insert(n, c.clone());
        } else if !c.is_zero() {
            return Err(WError::NoReconstruction {
                detail: format!(
                    "nonzero numerator coefficient at order {} past degree bound {}",
                    n, max_num_degree
                ),
            });
        }
    }
    Ok(RatFn::new(
        num,
        candidates.iter().map(|rho| (rho.clone(), 1)).collect(),
    ))
}
