//! Algebra specifications and the scalar structure functions.
//!
//! Every "power of x" in the construction is a linear form in a small set of
//! formal exponents; [`XPow`] is the single authority for resolving such a
//! form to a monomial in the active symbol basis:
//!
//! - twisted basis `{v, u}` with `v = x^(1/2)`, `u = x^r`
//! - corner basis `{t, p1, p2, a}` with `t = x`, `p_c = x^(lambda_c)`
//!   (`p3` eliminated through `lambda_1+lambda_2+lambda_3 = 0`), `a = x^alpha`
//!
//! Spectral parameters `u_1..u_3` occupy the remaining variable slots; the
//! main pipeline never touches them (they are bookkept on vertex operators),
//! only the Fock oracle evaluates them symbolically.

use std::collections::BTreeMap;

use crate::arith::mpoly::{exps_zero, Exps, Rat};
use crate::arith::{LSeries, LogSeries, Mono, ParamElem, RatFn};
use crate::error::WError;
use num::{One, Zero};

/// Variable slot assignments.
pub const SLOT_U1: usize = 4;

/// Linear form `c0 + c1*r + c2*lam2 + c3*lam3 + c4*alpha` in the exponent of x.
/// In the corner basis `c1` multiplies `lambda_1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct XPow(pub [Rat; 5]);

impl XPow {
    pub fn zero() -> Self {
        XPow(std::array::from_fn(|_| Rat::zero()))
    }

    pub fn int(n: i64) -> Self {
        let mut x = Self::zero();
        x.0[0] = Rat::from_integer(n.into());
        x
    }

    /// n/2 as the constant part.
    pub fn half(n: i64) -> Self {
        let mut x = Self::zero();
        x.0[0] = Rat::new(n.into(), 2.into());
        x
    }

    /// `k * r` (twisted deformation exponent).
    pub fn r_mult(k: i64) -> Self {
        let mut x = Self::zero();
        x.0[1] = Rat::from_integer(k.into());
        x
    }

    /// `k * lambda_c` (corner exponents), c in 1..=3.
    pub fn lam(c: u8, k: i64) -> Self {
        let mut x = Self::zero();
        x.0[c as usize] = Rat::from_integer(k.into());
        x
    }

    /// `k * alpha` (corner dressing exponent).
    pub fn alpha(k: i64) -> Self {
        let mut x = Self::zero();
        x.0[4] = Rat::from_integer(k.into());
        x
    }

    pub fn add(&self, o: &XPow) -> XPow {
        XPow(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }

    pub fn sub(&self, o: &XPow) -> XPow {
        XPow(std::array::from_fn(|i| &self.0[i] - &o.0[i]))
    }

    pub fn neg(&self) -> XPow {
        XPow(std::array::from_fn(|i| -self.0[i].clone()))
    }

    pub fn scale_int(&self, k: i64) -> XPow {
        let f = Rat::from_integer(k.into());
        XPow(std::array::from_fn(|i| &self.0[i] * &f))
    }
}

/// Which of the two constructions is being verified.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AlgebraSpec {
    /// Twisted algebra of rank N.
    Twisted { n: usize },
    /// Corner algebra with slot counts per color and the chosen color word.
    Corner { l: [usize; 3], colors: Vec<u8> },
}

impl AlgebraSpec {
    pub fn twisted(n: usize) -> Self {
        assert!(n >= 1, "twisted rank must be at least 1");
        AlgebraSpec::Twisted { n }
    }

    /// Canonical color word: all 1s, then 2s, then 3s.
    pub fn corner(l1: usize, l2: usize, l3: usize) -> Self {
        let mut colors = Vec::new();
        for (c, cnt) in [(1u8, l1), (2, l2), (3, l3)] {
            colors.extend(std::iter::repeat(c).take(cnt));
        }
        Self::corner_with_colors([l1, l2, l3], colors).expect("canonical word is valid")
    }

    pub fn corner_with_colors(l: [usize; 3], colors: Vec<u8>) -> Result<Self, WError> {
        if l[0] + l[1] + l[2] == 0 {
            return Err(WError::Config("corner algebra needs L1+L2+L3 >= 1".into()));
        }
        if colors.len() != l[0] + l[1] + l[2] {
            return Err(WError::Config(format!(
                "color word length {} does not match L1+L2+L3 = {}",
                colors.len(),
                l[0] + l[1] + l[2]
            )));
        }
        for c in 1..=3u8 {
            let cnt = colors.iter().filter(|&&x| x == c).count();
            if cnt != l[(c - 1) as usize] {
                return Err(WError::Config(format!(
                    "color word has {} letters of color {}, expected {}",
                    cnt,
                    c,
                    l[(c - 1) as usize]
                )));
            }
        }
        Ok(AlgebraSpec::Corner { l, colors })
    }

    pub fn is_twisted(&self) -> bool {
        matches!(self, AlgebraSpec::Twisted { .. })
    }

    pub fn var_names(&self) -> [&'static str; crate::arith::NVARS] {
        match self {
            AlgebraSpec::Twisted { .. } => ["v", "u", "_", "_", "u1", "u2", "u3"],
            AlgebraSpec::Corner { .. } => ["t", "p1", "p2", "a", "u1", "u2", "u3"],
        }
    }

    /// Resolve `x^pow` to a monomial in the active basis.
    pub fn x_pow(&self, pow: &XPow) -> Result<Mono, WError> {
        let mut exps: Exps = exps_zero();
        match self {
            AlgebraSpec::Twisted { .. } => {
                for i in 2..5 {
                    if !pow.0[i].is_zero() {
                        return Err(WError::UnresolvableExponent(format!("{:?}", pow)));
                    }
                }
                let vexp = &pow.0[0] * Rat::from_integer(2.into());
                if !vexp.is_integer() || !pow.0[1].is_integer() {
                    return Err(WError::UnresolvableExponent(format!("{:?}", pow)));
                }
                exps[0] = rat_to_i32(&vexp)?;
                exps[1] = rat_to_i32(&pow.0[1])?;
            }
            AlgebraSpec::Corner { .. } => {
                for c in pow.0.iter() {
                    if !c.is_integer() {
                        return Err(WError::UnresolvableExponent(format!("{:?}", pow)));
                    }
                }
                // lambda_3 = -lambda_1 - lambda_2: x^{c3 lam3} = p1^{-c3} p2^{-c3}
                exps[0] = rat_to_i32(&pow.0[0])?;
                exps[1] = rat_to_i32(&(&pow.0[1] - &pow.0[3]))?;
                exps[2] = rat_to_i32(&(&pow.0[2] - &pow.0[3]))?;
                exps[3] = rat_to_i32(&pow.0[4])?;
            }
        }
        Ok(Mono::new(Rat::one(), exps))
    }

    /// `x^pow - x^(-pow)` — the building block of every q-integer ratio.
    pub fn xdiff(&self, pow: &XPow) -> ParamElem {
        let m = self.x_pow(pow).expect("exponent resolvable");
        m.to_param().sub(&m.inv().to_param())
    }

    /// q-integer `[pow]_x`.
    pub fn qint(&self, pow: &XPow) -> ParamElem {
        self.xdiff(pow).div(&self.xdiff(&XPow::int(1)))
    }

    /// `q_c` as a monomial.
    pub fn q_c(&self, c: u8) -> Mono {
        let pow = match self {
            AlgebraSpec::Twisted { .. } => match c {
                1 => XPow::r_mult(2),
                2 => XPow::int(-2),
                3 => XPow::int(2).sub(&XPow::r_mult(2)),
                _ => unreachable!(),
            },
            AlgebraSpec::Corner { .. } => XPow::lam(c, 2),
        };
        self.x_pow(&pow).unwrap()
    }

    /// `s_c = q_c^(1/2)` as a monomial.
    pub fn s_c(&self, c: u8) -> Mono {
        let pow = match self {
            AlgebraSpec::Twisted { .. } => match c {
                1 => XPow::r_mult(1),
                2 => XPow::int(-1),
                3 => XPow::int(1).sub(&XPow::r_mult(1)),
                _ => unreachable!(),
            },
            AlgebraSpec::Corner { .. } => XPow::lam(c, 1),
        };
        self.x_pow(&pow).unwrap()
    }

    /// `kappa_r = prod_c (1 - q_c^r)` for a nonzero integer r.
    pub fn kappa(&self, r: i32) -> ParamElem {
        assert!(r != 0, "kappa_0 vanishes identically");
        let mut acc = ParamElem::one();
        for c in 1..=3u8 {
            let q = self.q_c(c).pow(r);
            acc = acc.mul(&ParamElem::one().sub(&q.to_param()));
        }
        acc
    }

    /// Vertex-operator normalization `b_c = -(s_c - s_c^{-1})/kappa_1`.
    pub fn b_c(&self, c: u8) -> ParamElem {
        let s = self.s_c(c);
        s.to_param()
            .sub(&s.inv().to_param())
            .neg()
            .div(&self.kappa(1))
    }

    /// Boundary normalization `k_c^B = (1+s_c)(s_d - s_b)/kappa_1`,
    /// `(c,d,b)` a cyclic permutation of `(1,2,3)`.
    pub fn k_c_boundary(&self, c: u8) -> ParamElem {
        let (d, b) = match c {
            1 => (2, 3),
            2 => (3, 1),
            3 => (1, 2),
            _ => unreachable!(),
        };
        let sc = self.s_c(c).to_param();
        let sd = self.s_c(d).to_param();
        let sb = self.s_c(b).to_param();
        ParamElem::one()
            .add(&sc)
            .mul(&sd.sub(&sb))
            .div(&self.kappa(1))
    }

    /// The unit shift monomial: `x` for the twisted algebra, `x^(lambda_2)`
    /// for the corner one. Argument shifts in current monomials are integer
    /// multiples of this.
    pub fn shift_unit(&self, k: i32) -> Mono {
        match self {
            AlgebraSpec::Twisted { .. } => self.x_pow(&XPow::int(k as i64)).unwrap(),
            AlgebraSpec::Corner { .. } => self.x_pow(&XPow::lam(2, k as i64)).unwrap(),
        }
    }

    /// Log coefficients of the structure function attached to a pair of
    /// current degrees: `f_{i,j}` (twisted) or `g_{i,j}` (corner). Degree 0
    /// contributes no contractions, so the function is taken to be 1.
    pub fn pair_log(&self, i: usize, j: usize, order: i64) -> LogSeries {
        let lo = i.min(j) as i64;
        let hi = i.max(j) as i64;
        let mut log = LogSeries::zero(order);
        if lo == 0 {
            return log;
        }
        match self {
            AlgebraSpec::Twisted { n } => {
                let n = *n as i64;
                for m in 1..order {
                    // -(1/m) xd((r-1)m) xd(rm) xd(lo*m)
                    //      * (xd((n+1-hi)m) - xd((n-hi)m))
                    //      / (xd(m) (xd((n+1)m) - xd(nm)))
                    let xd = |p: XPow| self.xdiff(&p.scale_int(m));
                    let numer = xd(XPow::r_mult(1).sub(&XPow::int(1)))
                        .mul(&xd(XPow::r_mult(1)))
                        .mul(&xd(XPow::int(lo)))
                        .mul(&xd(XPow::int(n + 1 - hi)).sub(&xd(XPow::int(n - hi))));
                    let denom = xd(XPow::int(1)).mul(&xd(XPow::int(n + 1)).sub(&xd(XPow::int(n))));
                    let c = numer
                        .div(&denom)
                        .mul(&ParamElem::from_rat(Rat::new((-1).into(), m.into())));
                    log.set_coeff(m, c);
                }
            }
            AlgebraSpec::Corner { .. } => {
                for m in 1..order {
                    let xd = |p: XPow| self.xdiff(&p.scale_int(m));
                    let numer = xd(XPow::lam(1, 1))
                        .mul(&xd(XPow::lam(3, 1)))
                        .mul(&xd(XPow::lam(2, lo)))
                        .mul(&xd(XPow::alpha(1).sub(&XPow::lam(2, hi))));
                    let denom = xd(XPow::lam(2, 1)).mul(&xd(XPow::alpha(1)));
                    let c = numer
                        .div(&denom)
                        .mul(&ParamElem::from_rat(Rat::new(1.into(), m.into())));
                    log.set_coeff(m, c);
                }
            }
        }
        log
    }

    /// The structure-function series itself (exp of [`Self::pair_log`]).
    pub fn pair_series(&self, i: usize, j: usize, order: i64) -> LSeries {
        if i.min(j) == 0 {
            return LSeries::one("w", crate::arith::ORDER_EXACT);
        }
        self.pair_log(i, j, order).exp()
    }

    /// The rational function `d(z)` (twisted) / `d_lambda(z)` (corner).
    pub fn d_fn(&self) -> RatFn {
        let (zeros, poles) = match self {
            AlgebraSpec::Twisted { .. } => (
                [
                    XPow::r_mult(2).sub(&XPow::int(1)),
                    XPow::int(1).sub(&XPow::r_mult(2)),
                ],
                [XPow::int(1), XPow::int(-1)],
            ),
            AlgebraSpec::Corner { .. } => (
                [
                    XPow::lam(1, 1).sub(&XPow::lam(3, 1)),
                    XPow::lam(3, 1).sub(&XPow::lam(1, 1)),
                ],
                [XPow::lam(2, 1), XPow::lam(2, -1)],
            ),
        };
        self.zeros_poles_ratfn(&zeros, &poles)
    }

    /// Corner diagonal contraction `gamma_c(z)`; identically 1 for c = 2.
    pub fn gamma_fn(&self, c: u8) -> RatFn {
        assert!(!self.is_twisted(), "gamma is a corner structure function");
        self.zeros_poles_ratfn(
            &[XPow::lam(c, 2), XPow::lam(c, -2)],
            &[XPow::lam(2, 2), XPow::lam(2, -2)],
        )
    }

    fn zeros_poles_ratfn(&self, zeros: &[XPow], poles: &[XPow]) -> RatFn {
        let mut num = crate::arith::WPoly::new();
        num.insert(0, ParamElem::one());
        let mut r = RatFn::from_poly(num);
        for z in zeros {
            r = r.mul_linfactor(&self.x_pow(z).unwrap());
        }
        let pole_list: Vec<(Mono, u32)> = poles
            .iter()
            .map(|p| (self.x_pow(p).unwrap(), 1))
            .collect();
        r.mul(&RatFn::new(
            {
                let mut one = crate::arith::WPoly::new();
                one.insert(0, ParamElem::one());
                one
            },
            pole_list,
        ))
    }

    /// Fusion constant `c(x,r)` (twisted) / `c_lambda` (corner).
    pub fn c_const(&self) -> ParamElem {
        match self {
            AlgebraSpec::Twisted { .. } => {
                // [r]_x [r-1]_x (x - x^{-1}) = xd(r) xd(r-1) / xd(1)
                self.xdiff(&XPow::r_mult(1))
                    .mul(&self.xdiff(&XPow::r_mult(1).sub(&XPow::int(1))))
                    .div(&self.xdiff(&XPow::int(1)))
            }
            AlgebraSpec::Corner { .. } => self
                .xdiff(&XPow::lam(1, 1))
                .mul(&self.xdiff(&XPow::lam(3, 1)))
                .div(&self.xdiff(&XPow::lam(2, 1))),
        }
    }

    /// Power-series expansion of `prod_c (1 - q_c^{-1} w)/(1 - q_c w)`.
    pub fn g_ratio_series(&self, order: i64) -> LSeries {
        let mut log = BTreeMap::new();
        for m in 1..order {
            let mut c = ParamElem::zero();
            for col in 1..=3u8 {
                let q = self.q_c(col).pow(m as i32);
                c = c.add(&q.to_param()).sub(&q.inv().to_param());
            }
            log.insert(m, c.mul(&ParamElem::from_rat(Rat::new(1.into(), m.into()))));
        }
        LSeries::exp_from_log("w", &log, order)
    }

    /// Number of Fock slots in the module.
    pub fn n_slots(&self) -> usize {
        match self {
            AlgebraSpec::Twisted { n } => n + 1,
            AlgebraSpec::Corner { colors, .. } => colors.len(),
        }
    }

    /// Number of current indices (terms of the basic current).
    pub fn n_indices(&self) -> usize {
        match self {
            AlgebraSpec::Twisted { n } => 2 * n + 1,
            AlgebraSpec::Corner { colors, .. } => colors.len(),
        }
    }

    /// Human label of an index rank: `1..N, 0, bN..b1` (twisted) or `1..L`.
    pub fn idx_label(&self, rank: usize) -> String {
        match self {
            AlgebraSpec::Twisted { n } => {
                let n = *n;
                if rank < n {
                    format!("{}", rank + 1)
                } else if rank == n {
                    "0".to_string()
                } else {
                    format!("b{}", 2 * n + 1 - rank)
                }
            }
            AlgebraSpec::Corner { .. } => format!("{}", rank + 1),
        }
    }
}

fn rat_to_i32(r: &Rat) -> Result<i32, WError> {
    if !r.is_integer() {
        return Err(WError::UnresolvableExponent(format!("{}", r)));
    }
    i32::try_from(r.to_integer())
        .map_err(|_| WError::UnresolvableExponent(format!("{}", r)))
}

/// General q-integer `[n]_q` for an explicit field element q.
pub fn qint_generic(q: &ParamElem, n: i64) -> ParamElem {
    let qn = q.pow(i32::try_from(n).expect("q-integer order fits i32"));
    qn.sub(&qn.inv()).div(&q.sub(&q.inv()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::param::param_int;

    #[test]
    fn qint_small_values() {
        let spec = AlgebraSpec::twisted(1);
        assert!(spec.qint(&XPow::int(1)).is_one());
        assert!(spec.qint(&XPow::int(0)).is_zero());
        // [3]_x = x^2 + 1 + x^-2 (x = v^2)
        let expect = ParamElem::var(0, 4)
            .add(&ParamElem::one())
            .add(&ParamElem::var(0, -4));
        assert!(spec.qint(&XPow::int(3)).eq(&expect));
    }

    #[test]
    fn qint_generic_matches() {
        let spec = AlgebraSpec::twisted(1);
        let x = spec.x_pow(&XPow::int(1)).unwrap().to_param();
        for n in 1..5 {
            assert!(qint_generic(&x, n).eq(&spec.qint(&XPow::int(n))));
        }
    }

    #[test]
    fn kappa_antisymmetry() {
        // kappa_{-r} = -kappa_r, by q1 q2 q3 = 1
        for spec in [AlgebraSpec::twisted(2), AlgebraSpec::corner(1, 1, 1)] {
            for r in 1..=10 {
                assert!(spec.kappa(-r).eq(&spec.kappa(r).neg()), "r = {}", r);
            }
        }
    }

    #[test]
    fn kappa_corner_explicit() {
        // kappa_1 = (1-p1^2)(1-p2^2)(1-p1^-2 p2^-2)
        let spec = AlgebraSpec::corner(0, 2, 0);
        let f = |i: usize, k: i32| ParamElem::one().sub(&ParamElem::var(i, k));
        let expect = f(1, 2).mul(&f(2, 2)).mul(
            &ParamElem::one().sub(&Mono::var(1, -2).mul(&Mono::var(2, -2)).to_param()),
        );
        assert!(spec.kappa(1).eq(&expect));
    }

    #[test]
    fn q_product_is_one() {
        for spec in [AlgebraSpec::twisted(1), AlgebraSpec::corner(0, 2, 1)] {
            let prod = spec.q_c(1).mul(&spec.q_c(2)).mul(&spec.q_c(3));
            assert!(prod.is_one());
        }
    }

    #[test]
    fn pair_series_symmetric_and_normalized() {
        for spec in [AlgebraSpec::twisted(1), AlgebraSpec::twisted(2), AlgebraSpec::corner(1, 1, 1)] {
            for i in 1..=4usize {
                for j in i..=4usize {
                    let a = spec.pair_series(i, j, 5);
                    let b = spec.pair_series(j, i, 5);
                    assert!(a.coeff(0).is_one());
                    for m in 0..5 {
                        assert!(a.coeff(m).eq(&b.coeff(m)));
                    }
                }
            }
        }
    }

    #[test]
    fn f11_order_one_coefficient_twisted() {
        // independent evaluation of the displayed exponent at m = 1, N = 1
        let spec = AlgebraSpec::twisted(1);
        let s = spec.pair_series(1, 1, 3);
        let xd = |p: XPow| spec.xdiff(&p);
        let expect = xd(XPow::r_mult(1).sub(&XPow::int(1)))
            .mul(&xd(XPow::r_mult(1)))
            .mul(&xd(XPow::int(1)))
            .mul(&xd(XPow::int(1)).sub(&xd(XPow::int(0))))
            .div(&xd(XPow::int(1)).mul(&xd(XPow::int(2)).sub(&xd(XPow::int(1)))))
            .neg();
        assert!(s.coeff(1).eq(&expect));
    }

    #[test]
    fn g11_order_one_coefficient() {
        let spec = AlgebraSpec::corner(0, 2, 0);
        let s = spec.pair_series(1, 1, 3);
        let xd = |p: XPow| spec.xdiff(&p);
        let expect = xd(XPow::lam(1, 1))
            .mul(&xd(XPow::lam(3, 1)))
            .mul(&xd(XPow::lam(2, 1)))
            .mul(&xd(XPow::alpha(1).sub(&XPow::lam(2, 1))))
            .div(&xd(XPow::lam(2, 1)).mul(&xd(XPow::alpha(1))));
        assert!(s.coeff(1).eq(&expect));
    }

    #[test]
    fn d_fn_normalization() {
        for spec in [AlgebraSpec::twisted(1), AlgebraSpec::corner(0, 2, 1)] {
            // all factors of d tend to 1 at w = 0, so the expansion starts at 1
            let d = spec.d_fn();
            let s = d.expand(crate::arith::Region::Inside, 0, 3).unwrap();
            assert!(s.coeff(0).is_one());
        }
    }

    #[test]
    fn gamma2_is_one() {
        let spec = AlgebraSpec::corner(1, 1, 1);
        let g = spec.gamma_fn(2);
        assert!(g.eq(&RatFn::one()));
    }

    #[test]
    fn c_const_symmetric_under_lam1_lam3_swap() {
        // swapping p1 <-> p3 means (e1, e3) -> exponent remap; verify the
        // closed form is invariant by direct recomputation with swapped roles
        let spec = AlgebraSpec::corner(1, 1, 1);
        let swapped = spec
            .xdiff(&XPow::lam(3, 1))
            .mul(&spec.xdiff(&XPow::lam(1, 1)))
            .div(&spec.xdiff(&XPow::lam(2, 1)));
        assert!(spec.c_const().eq(&swapped));
    }

    #[test]
    fn g_ratio_order_one() {
        let spec = AlgebraSpec::corner(0, 2, 0);
        let s = spec.g_ratio_series(4);
        let mut expect = ParamElem::zero();
        for c in 1..=3u8 {
            let q = spec.q_c(c);
            expect = expect.add(&q.to_param()).sub(&q.inv().to_param());
        }
        assert!(s.coeff(0).is_one());
        assert!(s.coeff(1).eq(&expect));
        // region-swap product: G(w) * G-with-q->q^{-1}(w) = 1
        let mut log_inv = BTreeMap::new();
        for m in 1..4 {
            let mut c = ParamElem::zero();
            for col in 1..=3u8 {
                let q = spec.q_c(col).pow(m as i32);
                c = c.add(&q.inv().to_param()).sub(&q.to_param());
            }
            log_inv.insert(m, c.mul(&ParamElem::from_rat(Rat::new(1.into(), m.into()))));
        }
        let s_inv = LSeries::exp_from_log("w", &log_inv, 4);
        let prod = s.mul(&s_inv);
        assert!(prod.coeff(0).is_one());
        for m in 1..prod.order() {
            assert!(prod.coeff(m).is_zero());
        }
        let _ = param_int(0);
    }
}
