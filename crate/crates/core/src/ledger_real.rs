//! High-precision reals for the constant ledger. Values default to 50
//! significant decimal digits (ECBOUND_PRECISION overrides) so that the
//! amplifying constants and the astronomically large bound values survive
//! exponentiation; f64 mirrors are kept for quick comparisons.

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use crate::error::{Error, Result};

pub const DEFAULT_DIGITS: usize = 50;

/// Shared precision context; not Sync, build one per computation.
pub struct RealCtx {
    bits: usize,
    digits: usize,
    rm: RoundingMode,
    cc: RefCell<Consts>,
}

#[derive(Debug, Clone)]
pub struct Real(BigFloat);

impl RealCtx {
    pub fn new(digits: usize) -> Self {
        let digits = digits.clamp(15, 10_000);
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 32;
        RealCtx {
            bits,
            digits,
            rm: RoundingMode::ToEven,
            cc: RefCell::new(Consts::new().expect("constants cache")),
        }
    }

    /// Honors the ECBOUND_PRECISION environment variable (decimal digits).
    pub fn from_env() -> Self {
        let digits = std::env::var("ECBOUND_PRECISION")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or(DEFAULT_DIGITS);
        RealCtx::new(digits)
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn from_f64(&self, x: f64) -> Real {
        Real(BigFloat::from_f64(x, self.bits))
    }

    pub fn from_u64(&self, x: u64) -> Real {
        Real(BigFloat::from_u64(x, self.bits))
    }

    pub fn from_bigint(&self, n: &num_bigint::BigInt) -> Real {
        self.parse(&n.to_string()).expect("integer literal")
    }

    pub fn parse(&self, s: &str) -> Result<Real> {
        let mut cc = self.cc.borrow_mut();
        let v = BigFloat::parse(s, Radix::Dec, self.bits, self.rm, &mut cc);
        if v.is_nan() {
            return Err(Error::Domain(format!("unparseable real literal {s:?}")));
        }
        Ok(Real(v))
    }

    pub fn e(&self) -> Real {
        self.from_f64(1.0).exp(self)
    }

    pub fn add(&self, a: &Real, b: &Real) -> Real {
        Real(a.0.add(&b.0, self.bits, self.rm))
    }

    pub fn sub(&self, a: &Real, b: &Real) -> Real {
        Real(a.0.sub(&b.0, self.bits, self.rm))
    }

    pub fn mul(&self, a: &Real, b: &Real) -> Real {
        Real(a.0.mul(&b.0, self.bits, self.rm))
    }

    pub fn div(&self, a: &Real, b: &Real) -> Real {
        Real(a.0.div(&b.0, self.bits, self.rm))
    }
}

impl Real {
    pub fn ln(&self, ctx: &RealCtx) -> Real {
        let mut cc = ctx.cc.borrow_mut();
        Real(self.0.ln(ctx.bits, ctx.rm, &mut cc))
    }

    pub fn exp(&self, ctx: &RealCtx) -> Real {
        let mut cc = ctx.cc.borrow_mut();
        Real(self.0.exp(ctx.bits, ctx.rm, &mut cc))
    }

    pub fn pow(&self, e: &Real, ctx: &RealCtx) -> Real {
        let mut cc = ctx.cc.borrow_mut();
        Real(self.0.pow(&e.0, ctx.bits, ctx.rm, &mut cc))
    }

    pub fn sqrt(&self, ctx: &RealCtx) -> Real {
        Real(self.0.sqrt(ctx.bits, ctx.rm))
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    /// Decimal string at the context precision (scientific form).
    pub fn to_decimal_string(&self) -> String {
        format!("{}", self.0)
    }

    pub fn to_f64(&self) -> f64 {
        // astro-float exposes no direct conversion; the decimal string is
        // exact enough for an f64 round trip
        self.to_decimal_string().parse::<f64>().unwrap_or(f64::NAN)
    }

    pub fn abs_diff(&self, other: &Real, ctx: &RealCtx) -> Real {
        let d = ctx.sub(self, other);
        Real(d.0.abs())
    }

    pub fn lt(&self, other: &Real) -> bool {
        matches!(self.0.cmp(&other.0), Some(c) if c < 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifty_digit_arithmetic() {
        let ctx = RealCtx::new(50);
        let x = ctx.from_u64(864);
        let l = x.ln(&ctx);
        // c1 tilde over Q: ln(864)/e + 4 = 6.48744...
        let c1t = ctx.add(&ctx.div(&l, &ctx.e()), &ctx.from_u64(4));
        let s = c1t.to_decimal_string();
        assert!(s.starts_with("6.4874436"), "{s}");
        assert!((c1t.to_f64() - 6.487443611627678).abs() < 1e-12);
    }

    #[test]
    fn huge_exponents_survive() {
        let ctx = RealCtx::new(50);
        // e^(23450) is far beyond f64 range but fine here
        let v = ctx.from_u64(23450).exp(&ctx);
        assert!(v.is_finite());
        let ln_back = v.ln(&ctx);
        assert!((ln_back.to_f64() - 23450.0).abs() < 1e-6);
        assert!(v.to_decimal_string().contains("e+10184"));
    }

    #[test]
    fn parse_round_trip() {
        let ctx = RealCtx::new(50);
        let v = ctx.parse("1.2345678901234567890123456789e-7").unwrap();
        let s = v.to_decimal_string();
        let w = ctx.parse(&s).unwrap();
        let diff = v.abs_diff(&w, &ctx);
        assert!(diff.lt(&ctx.parse("1e-50").unwrap()));
    }
}
