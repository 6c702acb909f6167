//! The Mordell–Weil rank bounding chain: Selmer-style bound over the full
//! torsion field, Rosen's class-group inequality, the ramified-prime count,
//! Gauss genus theory as a cross-check, and the assembled bound
//! r <= c18 + c19 * omega(D).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::arithmetic::{factor, ln_big, omega, FactorBudget};
use crate::curve::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::local::GlobalInvariants;

/// Number-field inputs to every constant formula. Over Q these are
/// (d, s, |disc|, clrank) = (1, 0, 1, 0) with zeta_ell present iff ell = 2.
#[derive(Debug, Clone, Serialize)]
pub struct FieldParams {
    pub d: u32,
    pub s: u32,
    pub abs_disc: BigInt,
    pub ell: u32,
    pub cl_rank: u32,
    /// rank Cl_{k'}[ell] when known exactly (e.g. 0 for Q(sqrt(-3))).
    pub cl_rank_kprime: Option<u32>,
    pub contains_zeta_ell: bool,
    /// Configured stand-in for the effective cyclotomic class-number
    /// constant; only consulted when no exact k' class data is supplied.
    pub c14: Option<f64>,
}

impl FieldParams {
    pub fn rationals(ell: u32) -> Self {
        FieldParams {
            d: 1,
            s: 0,
            abs_disc: BigInt::one(),
            ell,
            cl_rank: 0,
            // Q(zeta_ell) has class number 1 for every prime ell <= 19
            cl_rank_kprime: if ell != 2 && ell <= 19 { Some(0) } else { None },
            contains_zeta_ell: ell == 2,
            c14: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Domain("field degree must be positive".into()));
        }
        if 2 * self.s > self.d {
            return Err(Error::Domain(format!(
                "complex embedding count s = {} exceeds d/2 = {}",
                self.s,
                self.d as f64 / 2.0
            )));
        }
        if !crate::arithmetic::is_prime(&BigInt::from(self.ell)) {
            return Err(Error::Domain(format!("ell = {} is not prime", self.ell)));
        }
        Ok(())
    }

    /// Minkowski constant m_k = (d!/d^d) (4/pi)^s sqrt(|disc|).
    pub fn minkowski_constant(&self) -> f64 {
        let mut fact = 1.0f64;
        for i in 2..=(self.d as u64) {
            fact *= i as f64;
        }
        let dd = (self.d as f64).powi(self.d as i32);
        let sqrt_disc = (ln_big(&self.abs_disc) / 2.0).exp();
        fact / dd * (4.0 / std::f64::consts::PI).powi(self.s as i32) * sqrt_disc
    }
}

/// Which branch of the assembled bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RankBranch {
    /// k' = k: the field already contains the ell-th roots of unity.
    CyclotomicInField,
    /// k' = k(zeta_ell) strictly larger.
    CyclotomicExtension,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankBoundBreakdown {
    pub omega_d: u64,
    /// Lemma-level bound on the ramified-prime count t_{K_ell/k}.
    pub t_bound: u64,
    /// Class-group term entering c18 (rank Cl_k[ell] or c17).
    pub cl_term: f64,
    pub branch: RankBranch,
    pub c18: f64,
    pub c19: u64,
    pub r_max: f64,
}

/// t_{K_ell/k} <= d + omega(ell * N(D)): finite part by the
/// Neron–Ogg–Shafarevich converse, infinite part by the embedding count.
pub fn ramified_prime_bound(
    invariants: &GlobalInvariants,
    ell: u32,
    field: &FieldParams,
    budget: &FactorBudget,
) -> Result<u64> {
    let n = BigInt::from(ell) * &invariants.disc_norm;
    Ok(field.d as u64 + omega(&n, budget)? as u64)
}

/// Rosen: rank Cl_K[ell] <= ell (rank Cl_k[ell] + max(0, t - 1)).
pub fn rosen_bound(ell: u32, cl_rank_base: u64, t: u64) -> u64 {
    ell as u64 * (cl_rank_base + t.saturating_sub(1))
}

/// Gauss genus theory for imaginary quadratic Q(sqrt(m)), m < 0 squarefree:
/// the 2-rank of the class group is t - 1 with t the number of distinct
/// primes dividing the field discriminant.
pub fn quadratic_two_rank(m: &BigInt, budget: &FactorBudget) -> Result<u64> {
    if !m.is_negative() {
        return Err(Error::Unsupported(
            "real quadratic genus theory is out of scope; need m < 0".into(),
        ));
    }
    let f = factor(m, budget)?;
    if f.factors.iter().any(|(_, e)| *e > 1) {
        return Err(Error::Unsupported(format!("{m} is not squarefree")));
    }
    // field discriminant: m when m = 1 mod 4, else 4m
    let disc = if m.mod_floor(&BigInt::from(4)).is_one() {
        m.clone()
    } else {
        BigInt::from(4) * m
    };
    let t = omega(&disc, budget)? as u64;
    Ok(t - 1)
}

/// c17(k): the ell-rank envelope for Cl_{k'}; exact class data wins over
/// the configured envelope constant.
pub fn clprime_bound(field: &FieldParams) -> Result<f64> {
    if field.contains_zeta_ell {
        return Err(Error::Precondition(
            "k' = k; the class term is rank Cl_k[ell], not c17".into(),
        ));
    }
    if field.ell < 3 {
        return Err(Error::Precondition("c17 needs ell >= 3".into()));
    }
    if let Some(r) = field.cl_rank_kprime {
        return Ok(r as f64);
    }
    let c14 = field.c14.ok_or_else(|| {
        Error::Config(
            "no exact rank Cl_{k'}[ell] supplied and no c14 configured".into(),
        )
    })?;
    let ell = field.ell as f64;
    let d = field.d as f64;
    let inner = c14.ln() + (ell * d / 2.0) * ell.ln() + (ell / 2.0) * ln_big(&field.abs_disc);
    Ok(inner / ell.ln())
}

/// The pure branch formulas of the assembled bound, usable without the
/// torsion hypothesis (fixture cross-checks).
pub fn assemble_rank_bound(field: &FieldParams, omega_d: u64, t_bound: u64) -> Result<RankBoundBreakdown> {
    field.validate()?;
    let ell = field.ell as f64;
    let d = field.d as f64;
    if field.contains_zeta_ell {
        let cl = field.cl_rank as f64;
        let c18 = 2.0 * ell * (4.0 * d + cl);
        let c19 = 4 * field.ell as u64;
        Ok(RankBoundBreakdown {
            omega_d,
            t_bound,
            cl_term: cl,
            branch: RankBranch::CyclotomicInField,
            c18,
            c19,
            r_max: c18 + c19 as f64 * omega_d as f64,
        })
    } else {
        let c17 = clprime_bound(field)?;
        let c18 = 2.0 * ell * (4.0 * (ell - 1.0) * d + c17);
        let c19 = 4 * field.ell as u64 * (field.ell as u64 - 1);
        Ok(RankBoundBreakdown {
            omega_d,
            t_bound,
            cl_term: c17,
            branch: RankBranch::CyclotomicExtension,
            c18,
            c19,
            r_max: c18 + c19 as f64 * omega_d as f64,
        })
    }
}

/// Assembled rank bound for a curve satisfying the ell-torsion hypothesis.
pub fn rank_upper_bound(
    e: &WeierstrassCurve,
    ell: u32,
    field: &FieldParams,
    budget: &FactorBudget,
) -> Result<RankBoundBreakdown> {
    let (has, _) = crate::torsion::has_rational_ell_torsion(e, ell, budget)?;
    if !has {
        return Err(Error::Domain(format!(
            "curve has no rational point of exact order {ell}; the rank bound does not apply"
        )));
    }
    let inv = crate::local::global_invariants(e, budget)?;
    let omega_d = inv.bad_primes.len() as u64;
    let t_bound = ramified_prime_bound(&inv, ell, field, budget)?;
    assemble_rank_bound(field, omega_d, t_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::global_invariants;

    fn curve(a: i64, b: i64, c: i64) -> WeierstrassCurve {
        WeierstrassCurve::from_i64(a, b, c).unwrap()
    }

    fn budget() -> FactorBudget {
        FactorBudget::default()
    }

    #[test]
    fn ramified_bound_examples() {
        let b = budget();
        let q2 = FieldParams::rationals(2);
        let inv = global_invariants(&curve(0, -1, 0), &b).unwrap();
        assert_eq!(ramified_prime_bound(&inv, 2, &q2, &b).unwrap(), 2);
        let inv = global_invariants(&curve(0, 0, 1), &b).unwrap();
        assert_eq!(ramified_prime_bound(&inv, 3, &q2, &b).unwrap(), 3);
        // everywhere-good synthetic: N(D) = 1
        let synthetic = GlobalInvariants {
            disc_norm: BigInt::one(),
            conductor_norm: BigInt::one(),
            szpiro_ratio: 1.0,
            bad_primes: vec![],
            locals: vec![],
        };
        assert_eq!(ramified_prime_bound(&synthetic, 2, &q2, &b).unwrap(), 2);
    }

    #[test]
    fn rosen_examples() {
        assert_eq!(rosen_bound(2, 0, 3), 4);
        assert_eq!(rosen_bound(2, 0, 0), 0);
        assert_eq!(rosen_bound(3, 1, 2), 6);
    }

    #[test]
    fn genus_theory_examples() {
        let b = budget();
        assert_eq!(quadratic_two_rank(&BigInt::from(-5), &b).unwrap(), 1);
        assert_eq!(quadratic_two_rank(&BigInt::from(-1), &b).unwrap(), 0);
        assert_eq!(quadratic_two_rank(&BigInt::from(-21), &b).unwrap(), 2);
        assert!(quadratic_two_rank(&BigInt::from(5), &b).is_err());
        assert!(quadratic_two_rank(&BigInt::from(-12), &b).is_err());
    }

    #[test]
    fn clprime_examples() {
        // exact path: Q(sqrt(-3)) has class number 1
        let q3 = FieldParams::rationals(3);
        assert_eq!(clprime_bound(&q3).unwrap(), 0.0);
        // formula path
        let f = FieldParams {
            cl_rank_kprime: None,
            c14: Some(1.0),
            ..FieldParams::rationals(3)
        };
        assert!((clprime_bound(&f).unwrap() - 1.5).abs() < 1e-12);
        // bypassed when zeta_ell is already in the field
        assert!(clprime_bound(&FieldParams::rationals(2)).is_err());
        // nothing supplied
        let f = FieldParams {
            cl_rank_kprime: None,
            c14: None,
            ..FieldParams::rationals(3)
        };
        assert!(matches!(clprime_bound(&f), Err(Error::Config(_))));
    }

    #[test]
    fn rank_bound_examples() {
        let b = budget();
        // Q, ell = 2, omega_D = 1 -> 2*2*(2*1 + 4*1 + 0) = 24
        let r = rank_upper_bound(&curve(0, -1, 0), 2, &FieldParams::rationals(2), &b).unwrap();
        assert_eq!(r.omega_d, 1);
        assert_eq!(r.r_max, 24.0);
        assert_eq!(r.c18 + (r.c19 * r.omega_d) as f64, r.r_max);
        // good-reduction formula variant
        let r = assemble_rank_bound(&FieldParams::rationals(2), 0, 2).unwrap();
        assert_eq!(r.r_max, 16.0);
        // Q, ell = 3, omega_D = 2, c17 = 0 -> 2*3*(2*2*(2+2)) = 96
        let r = assemble_rank_bound(&FieldParams::rationals(3), 2, 0).unwrap();
        assert_eq!(r.r_max, 96.0);
        assert_eq!(r.branch, RankBranch::CyclotomicExtension);
        // hypothesis gate
        assert!(rank_upper_bound(&curve(0, -16, 16), 2, &FieldParams::rationals(2), &b).is_err());
    }

    #[test]
    fn rank_bound_monotone() {
        let q2 = FieldParams::rationals(2);
        let mut last = 0.0;
        for omega in 0..6 {
            let r = assemble_rank_bound(&q2, omega, 0).unwrap();
            assert!(r.r_max >= last);
            last = r.r_max;
        }
        for clrank in 0..4u32 {
            let f = FieldParams {
                cl_rank: clrank,
                ..FieldParams::rationals(2)
            };
            let r = assemble_rank_bound(&f, 1, 0).unwrap();
            assert!(r.r_max >= last || clrank == 0);
            last = r.r_max;
        }
    }

    #[test]
    fn genus_rank_below_rosen_with_exact_ramification() {
        let b = budget();
        // imaginary quadratic fields: 2-rank = t - 1 <= rosen with the exact
        // ramified count (finite primes of disc + the ramified real place)
        for m in [-1i64, -2, -3, -5, -6, -7, -10, -11, -13, -14, -15, -17, -19, -21, -22, -23, -26, -29, -30, -31] {
            let mb = BigInt::from(m);
            let rank2 = quadratic_two_rank(&mb, &b).unwrap();
            let disc = if mb.mod_floor(&BigInt::from(4)).is_one() {
                mb.clone()
            } else {
                BigInt::from(4) * &mb
            };
            let t_exact = omega(&disc, &b).unwrap() as u64 + 1;
            assert!(
                rank2 <= rosen_bound(2, 0, t_exact),
                "m = {m}: {rank2} vs rosen"
            );
        }
    }

    #[test]
    fn field_params_validation() {
        assert!(FieldParams::rationals(2).validate().is_ok());
        let bad = FieldParams {
            s: 1,
            ..FieldParams::rationals(2)
        };
        assert!(bad.validate().is_err());
        let bad = FieldParams {
            ell: 6,
            ..FieldParams::rationals(2)
        };
        assert!(bad.validate().is_err());
        assert!((FieldParams::rationals(2).minkowski_constant() - 1.0).abs() < 1e-12);
    }
}
