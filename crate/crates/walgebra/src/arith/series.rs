//! Truncated Laurent series in one formal variable over the parameter field.
//!
//! Coefficients are exact for exponents strictly below `order`; nothing is
//! ever claimed at or beyond it. Products propagate the correct (possibly
//! smaller) valid order.

use std::collections::BTreeMap;
use std::fmt;

use super::mpoly::NVARS;
use super::param::{Mono, ParamElem};

/// Valid order used for series that are exactly known (e.g. polynomials).
pub const ORDER_EXACT: i64 = i64::MAX / 4;

#[derive(Clone)]
pub struct LSeries {
    pub var: String,
    coeffs: BTreeMap<i64, ParamElem>,
    order: i64,
}

impl LSeries {
    pub fn zero(var: &str, order: i64) -> Self {
        LSeries { var: var.into(), coeffs: BTreeMap::new(), order }
    }

    pub fn one(var: &str, order: i64) -> Self {
        let mut s = Self::zero(var, order);
        s.set_coeff(0, ParamElem::one());
        s
    }

    pub fn monomial(var: &str, c: ParamElem, n: i64, order: i64) -> Self {
        let mut s = Self::zero(var, order);
        s.set_coeff(n, c);
        s
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Coefficient of the n-th power; panics if n is beyond the valid order.
    pub fn coeff(&self, n: i64) -> ParamElem {
        assert!(n < self.order, "coefficient {} beyond valid order {}", n, self.order);
        self.coeffs.get(&n).cloned().unwrap_or_else(ParamElem::zero)
    }

    pub fn set_coeff(&mut self, n: i64, c: ParamElem) {
        if n >= self.order {
            return;
        }
        if c.is_zero() {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, c);
        }
    }

    pub fn add_coeff(&mut self, n: i64, c: &ParamElem) {
        if n >= self.order || c.is_zero() {
            return;
        }
        let cur = self.coeffs.get(&n).cloned().unwrap_or_else(ParamElem::zero);
        self.set_coeff(n, cur.add(c));
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &ParamElem)> {
        self.coeffs.iter().map(|(n, c)| (*n, c))
    }

    pub fn truncate(&self, order: i64) -> LSeries {
        let mut s = LSeries::zero(&self.var, order.min(self.order));
        for (n, c) in &self.coeffs {
            if *n < s.order {
                s.coeffs.insert(*n, c.clone());
            }
        }
        s
    }

    pub fn add(&self, other: &LSeries) -> LSeries {
        debug_assert_eq!(self.var, other.var);
        let mut s = LSeries::zero(&self.var, self.order.min(other.order));
        for (n, c) in &self.coeffs {
            s.add_coeff(*n, c);
        }
        for (n, c) in &other.coeffs {
            s.add_coeff(*n, c);
        }
        s
    }

    pub fn neg(&self) -> LSeries {
        LSeries {
            var: self.var.clone(),
            coeffs: self.coeffs.iter().map(|(n, c)| (*n, c.neg())).collect(),
            order: self.order,
        }
    }

    pub fn sub(&self, other: &LSeries) -> LSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &ParamElem) -> LSeries {
        if k.is_zero() {
            return LSeries::zero(&self.var, ORDER_EXACT);
        }
        let mut s = LSeries::zero(&self.var, self.order);
        for (n, c) in &self.coeffs {
            s.set_coeff(*n, c.mul(k));
        }
        s
    }

    /// Valid order of a product, by the valuation rule.
    fn product_order(&self, other: &LSeries) -> i64 {
        let va = self.min_exp();
        let vb = other.min_exp();
        match (va, vb) {
            (None, _) | (_, None) => ORDER_EXACT, // zero series: product exactly 0
            (Some(va), Some(vb)) => {
                let oa = self.order.saturating_add(vb);
                let ob = other.order.saturating_add(va);
                oa.min(ob)
            }
        }
    }

    pub fn mul(&self, other: &LSeries) -> LSeries {
        debug_assert_eq!(self.var, other.var);
        let order = self.product_order(other);
        let mut s = LSeries::zero(&self.var, order);
        for (na, ca) in &self.coeffs {
            for (nb, cb) in &other.coeffs {
                let n = na + nb;
                if n < order {
                    s.add_coeff(n, &ca.mul(cb));
                }
            }
        }
        s
    }

    /// Substitute `z -> rho * z`: the n-th coefficient picks up `rho^n`.
    pub fn scale_arg(&self, rho: &Mono) -> LSeries {
        let mut s = LSeries::zero(&self.var, self.order);
        for (n, c) in &self.coeffs {
            let f = rho.pow(i32::try_from(*n).expect("exponent fits i32"));
            s.set_coeff(*n, c.mul_mono(&f));
        }
        s
    }

    /// Exponential of a series with positive valuation, given by its
    /// log-coefficients for 1 <= m < order. Classic recurrence
    /// `n b_n = sum k c_k b_{n-k}`, entirely in exact arithmetic.
    pub fn exp_from_log(
        var: &str,
        logcoeffs: &BTreeMap<i64, ParamElem>,
        order: i64,
    ) -> LSeries {
        assert!(order >= 1);
        assert!(logcoeffs.keys().all(|&m| m >= 1), "log coefficients must start at order 1");
        let mut b: Vec<ParamElem> = Vec::with_capacity(order as usize);
        b.push(ParamElem::one());
        for n in 1..order {
            let mut acc = ParamElem::zero();
            for (k, c) in logcoeffs.range(1..=n) {
                let term = c.mul(&b[(n - k) as usize]);
                acc = acc.add(&term.mul(&ParamElem::from_int(*k)));
            }
            b.push(acc.mul(&ParamElem::from_rat(super::mpoly::Rat::new(
                1.into(),
                n.into(),
            ))));
        }
        let mut s = LSeries::zero(var, order);
        for (n, c) in b.into_iter().enumerate() {
            s.set_coeff(n as i64, c);
        }
        s
    }

    pub fn display<'a>(&'a self, names: &'a [&'a str]) -> SeriesDisplay<'a> {
        SeriesDisplay { series: self, names }
    }
}

pub struct SeriesDisplay<'a> {
    series: &'a LSeries,
    names: &'a [&'a str],
}

impl fmt::Display for SeriesDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in &self.series.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{}]*{}^{}", c.display(self.names), self.series.var, n)?;
        }
        if first {
            write!(f, "0")?;
        }
        if self.series.order < ORDER_EXACT {
            write!(f, " + O({}^{})", self.series.var, self.series.order)?;
        }
        Ok(())
    }
}

impl fmt::Debug for LSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        static NAMES: [&str; NVARS] = ["x0", "x1", "x2", "x3", "x4", "x5", "x6"];
        write!(f, "{}", self.display(&NAMES))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::param::param_rat_frac;

    #[test]
    fn exp_of_zero_is_one() {
        let s = LSeries::exp_from_log("z", &BTreeMap::new(), 6);
        assert!(s.coeff(0).is_one());
        for n in 1..6 {
            assert!(s.coeff(n).is_zero());
        }
    }

    #[test]
    fn exp_single_log_coefficient() {
        // c_1 = 1 -> 1 + z + z^2/2 + z^3/6
        let mut log = BTreeMap::new();
        log.insert(1, ParamElem::one());
        let s = LSeries::exp_from_log("z", &log, 4);
        assert!(s.coeff(0).is_one());
        assert!(s.coeff(1).is_one());
        assert!(s.coeff(2).eq(&param_rat_frac(1, 2)));
        assert!(s.coeff(3).eq(&param_rat_frac(1, 6)));
    }

    #[test]
    fn product_order_rule() {
        // min exponents -1 and 2 add up
        let mut a = LSeries::zero("z", 4); // coefficients known below 4
        a.set_coeff(-1, ParamElem::one());
        let mut b = LSeries::zero("z", 7);
        b.set_coeff(2, ParamElem::one());
        let p = a.mul(&b);
        assert_eq!(p.min_exp(), Some(1));
        // order = min(4 + 2, 7 + (-1)) = 6
        assert_eq!(p.order(), 6);
    }

    #[test]
    fn geometric_times_complement() {
        // (sum z^n) * (1 - z) = 1
        let mut geo = LSeries::zero("z", 10);
        for n in 0..10 {
            geo.set_coeff(n, ParamElem::one());
        }
        let mut lin = LSeries::one("z", ORDER_EXACT);
        lin.set_coeff(1, ParamElem::from_int(-1));
        let p = geo.mul(&lin);
        assert!(p.coeff(0).is_one());
        for n in 1..p.order() {
            assert!(p.coeff(n).is_zero());
        }
    }
}

/// Log-side representation of a series with constant term 1: the
/// coefficients `c_m` of `log S = sum_{m>=1} c_m w^m`, exact for `1 <= m < order`.
///
/// Products of such series are coefficient sums, argument scaling is a
/// monomial multiply per mode, and the exponential is only taken once the
/// coefficients have collapsed to something small.
#[derive(Clone, Debug)]
pub struct LogSeries {
    coeffs: Vec<ParamElem>,
}

impl LogSeries {
    pub fn zero(order: i64) -> Self {
        assert!(order >= 1);
        LogSeries { coeffs: vec![ParamElem::zero(); (order - 1) as usize] }
    }

    pub fn order(&self) -> i64 {
        self.coeffs.len() as i64 + 1
    }

    pub fn coeff(&self, m: i64) -> &ParamElem {
        assert!(m >= 1 && m < self.order(), "log coefficient {} out of range", m);
        &self.coeffs[(m - 1) as usize]
    }

    pub fn set_coeff(&mut self, m: i64, c: ParamElem) {
        self.coeffs[(m - 1) as usize] = c;
    }

    pub fn add(&self, other: &LogSeries) -> LogSeries {
        let order = self.order().min(other.order());
        let mut r = LogSeries::zero(order);
        for m in 1..order {
            r.set_coeff(m, self.coeff(m).add(other.coeff(m)));
        }
        r
    }

    pub fn neg(&self) -> LogSeries {
        LogSeries { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn sub(&self, other: &LogSeries) -> LogSeries {
        self.add(&other.neg())
    }

    pub fn truncate(&self, order: i64) -> LogSeries {
        let mut r = LogSeries::zero(order.min(self.order()));
        for m in 1..r.order() {
            r.set_coeff(m, self.coeff(m).clone());
        }
        r
    }

    /// `w -> rho w`: the m-th log coefficient picks up `rho^m`.
    pub fn scale_arg(&self, rho: &Mono) -> LogSeries {
        let mut r = LogSeries::zero(self.order());
        for m in 1..self.order() {
            let f = rho.pow(m as i32);
            r.set_coeff(m, self.coeff(m).mul_mono(&f));
        }
        r
    }

    /// Exponentiate to a series with constant term 1.
    pub fn exp(&self) -> LSeries {
        let mut log = std::collections::BTreeMap::new();
        for m in 1..self.order() {
            let c = self.coeff(m);
            if !c.is_zero() {
                log.insert(m, c.clone());
            }
        }
        LSeries::exp_from_log("w", &log, self.order())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}
