//! Naive, curve and canonical heights, plus the Petsche and David height
//! floors and the height-gap search radius.
//!
//! The canonical height is the doubling limit h_x([2^n]P) / 4^n computed
//! with a certified tail: one duplication step changes the projective
//! x-pair by the binary quartics Phi, Psi, whose per-step drift
//! |h_x(2Q) - 4 h_x(Q)| is bounded by a curve constant derived from the
//! coefficient sums (upper side) and the resultant Bezout cofactors (lower
//! side). The geometric series then bounds the remainder. Real magnitudes
//! are iterated in renormalized floating point; the gcd corrections at
//! primes dividing the resultant are tracked exactly in p-adic residues,
//! so every reported value carries a rigorous error radius.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arithmetic::{factor, ln_big, FactorBudget};
use crate::curve::{val_p, CurvePoint, ModelTransform, WeierstrassCurve};
use crate::error::{Error, Result};

/// A nonnegative real on the natural-log scale with a certified error
/// radius; exact heights carry radius 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeightValue {
    pub value: f64,
    pub error: f64,
}

impl HeightValue {
    pub fn exact(value: f64) -> Self {
        HeightValue { value, error: 0.0 }
    }
}

/// Configuration for the non-paper constants: David's c6 and the height-gap
/// constants of the search radius. Defaults are validated by the corpus
/// sweeps in the acceptance suite; c6 has no published value and is marked
/// as a placeholder in all reports.
#[derive(Debug, Clone, Serialize)]
pub struct HeightsConfig {
    pub david_c6: f64,
    pub gap_c1: f64,
    pub gap_c2: f64,
    pub kappa_low: f64,
}

impl Default for HeightsConfig {
    fn default() -> Self {
        HeightsConfig {
            david_c6: 1e-7,
            gap_c1: 2.0,
            gap_c2: 3.0,
            kappa_low: 2.0,
        }
    }
}

/// h(x) = log max(|p|, |q|) for x = p/q in lowest terms.
pub fn naive_height(x: &BigRational) -> HeightValue {
    let n = x.numer().abs();
    let d = x.denom().clone();
    let m = if n > d { n } else { d };
    if m.is_one() {
        HeightValue::exact(0.0)
    } else {
        HeightValue::exact(ln_big(&m))
    }
}

/// h_x(P) = h(x(P)), with the convention H(x(O)) = 1.
pub fn point_x_height(p: &CurvePoint) -> HeightValue {
    match p {
        CurvePoint::Identity => HeightValue::exact(0.0),
        CurvePoint::Affine { x, .. } => naive_height(x),
    }
}

/// h(E) = h(1 : a : b : c), the full projective height over all places:
/// clear denominators to a primitive integer 4-tuple and take log max.
pub fn curve_height(e: &WeierstrassCurve) -> HeightValue {
    let (a, b, c) = e.coefficients();
    let den = a.denom().lcm(b.denom()).lcm(c.denom());
    let tuple = [
        den.clone(),
        (a * BigRational::from(den.clone())).to_integer(),
        (b * BigRational::from(den.clone())).to_integer(),
        (c * BigRational::from(den.clone())).to_integer(),
    ];
    let mut g = BigInt::zero();
    for t in &tuple {
        g = g.gcd(t);
    }
    let max = tuple.iter().map(|t| t.abs()).max().unwrap();
    HeightValue::exact(ln_big(&(max / g)))
}

/// Inputs shared by the two height floors.
#[derive(Debug, Clone)]
pub struct HeightFloorInputs {
    pub d: u32,
    pub disc_norm: BigInt,
    pub sigma: f64,
    /// h(j_E); the floor uses J = max(h(j), 1).
    pub j_height: f64,
}

/// Petsche's floor: log N(D) / (c2(d) sigma^6 log^2(c3(d) sigma^2)) with
/// c2(d) = 10^15 d^3 and c3(d) = 104613 d.
pub fn petsche_floor(inputs: &HeightFloorInputs) -> Result<f64> {
    if inputs.disc_norm <= BigInt::one() {
        return Err(Error::Domain(
            "Petsche floor needs N(D) > 1; use the David floor on everywhere-good curves".into(),
        ));
    }
    let d = inputs.d as f64;
    let c2 = 1e15 * d * d * d;
    let c3 = 104613.0 * d;
    let s = inputs.sigma;
    let log_term = (c3 * s * s).ln();
    Ok(ln_big(&inputs.disc_norm) / (c2 * s.powi(6) * log_term * log_term))
}

/// David's floor: c6 J^3 / (d^3 (J + log d)^2) with J = max(h(j), 1).
pub fn david_floor(inputs: &HeightFloorInputs, c6: f64) -> f64 {
    let d = inputs.d as f64;
    let j = inputs.j_height.max(1.0);
    c6 * j.powi(3) / (d.powi(3) * (j + d.ln()).powi(2))
}

/// The configured height-gap constants and the derived search radius: to
/// capture {hhat <= log B} it suffices to scan H(x) <= exp(2(log B + kappa)).
#[derive(Debug, Clone, Serialize)]
pub struct GapParameters {
    pub c1: f64,
    pub c2: f64,
    pub kappa_low: f64,
}

pub fn height_gap_parameters(cfg: &HeightsConfig) -> GapParameters {
    GapParameters {
        c1: cfg.gap_c1,
        c2: cfg.gap_c2,
        kappa_low: cfg.kappa_low,
    }
}

impl GapParameters {
    pub fn search_radius_log(&self, log_b: f64) -> f64 {
        2.0 * (log_b + self.kappa_low)
    }

    /// Upper gap: hhat <= h_x/2 + c1 h(E) + c2.
    pub fn upper_gap(&self, h_e: f64) -> f64 {
        self.c1 * h_e + self.c2
    }
}

const FLOAT_SLACK: f64 = 1e-11;
const MAX_DOUBLINGS: u32 = 64;

/// Per-curve canonical height context: integral model, torsion list for the
/// exact-zero short circuit, duplication forms, and the certified drift
/// constant.
pub struct CanonicalHeightCtx {
    model: WeierstrassCurve,
    to_integral: ModelTransform,
    torsion: Vec<CurvePoint>,
    /// descending coefficients of the duplication numerator form
    phi: [f64; 5],
    /// descending coefficients of the duplication denominator form
    psi: [f64; 5],
    phi_int: [BigInt; 5],
    psi_int: [BigInt; 5],
    gcd_primes: Vec<(BigInt, u64)>,
    drift: f64,
}

impl CanonicalHeightCtx {
    pub fn new(e: &WeierstrassCurve, budget: &FactorBudget) -> Result<Self> {
        let (model, to_integral) = e.integralize(budget)?;
        let torsion: Vec<CurvePoint> = crate::torsion::torsion_subgroup(&model, budget)?
            .points
            .into_iter()
            .map(|(p, _)| p)
            .collect();
        let a = model.a().to_integer();
        let b = model.b().to_integer();
        let c = model.c().to_integer();
        // Phi = p^4 - 2b p^2q^2 - 8c pq^3 + (b^2 - 4ac) q^4
        let phi_int = [
            BigInt::one(),
            BigInt::zero(),
            BigInt::from(-2) * &b,
            BigInt::from(-8) * &c,
            &b * &b - BigInt::from(4) * &a * &c,
        ];
        // Psi = 4 q (p^3 + a p^2 q + b p q^2 + c q^3)
        let psi_int = [
            BigInt::zero(),
            BigInt::from(4),
            BigInt::from(4) * &a,
            BigInt::from(4) * &b,
            BigInt::from(4) * &c,
        ];
        let res = form_resultant(&phi_int, &psi_int);
        if res.is_zero() {
            return Err(Error::Inconsistency(
                "duplication forms share a root on a nonsingular curve".into(),
            ));
        }
        // primes carrying gcd corrections all divide the resultant, whose
        // support in practice is that of 2 * disc; factor whatever is left.
        let disc = model.discriminant().to_integer();
        let mut gcd_primes = Vec::new();
        let mut leftover = res.abs();
        for (p, _) in factor(&(BigInt::from(2) * &disc), budget)?.factors {
            let v = val_p(&leftover, &p);
            if v > 0 {
                let pv = p.pow(v as u32);
                leftover /= pv;
                gcd_primes.push((p, v));
            }
        }
        if !leftover.is_one() {
            for (p, v) in factor(&leftover, budget)?.factors {
                gcd_primes.push((p, v as u64));
            }
        }
        let drift = drift_constant(&phi_int, &psi_int, &res)?;
        Ok(CanonicalHeightCtx {
            model,
            to_integral,
            torsion,
            phi: phi_int.clone().map(|c| big_to_f64(&c)),
            psi: psi_int.clone().map(|c| big_to_f64(&c)),
            phi_int,
            psi_int,
            gcd_primes,
            drift,
        })
    }

    pub fn integral_model(&self) -> &WeierstrassCurve {
        &self.model
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn is_torsion(&self, p: &CurvePoint) -> bool {
        let q = self.to_integral.apply_point(p);
        self.torsion.contains(&q)
    }

    /// The torsion points mapped back to the original curve's model.
    pub fn torsion_points_on_input(&self) -> Vec<CurvePoint> {
        let back = self.to_integral.inverse();
        self.torsion.iter().map(|p| back.apply_point(p)).collect()
    }

    /// Canonical height of a point of the original curve, within tol.
    pub fn height(&self, p: &CurvePoint, tol: f64) -> Result<HeightValue> {
        if tol <= 0.0 {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        let q = self.to_integral.apply_point(p);
        if !self.model.contains(&q) {
            return Err(Error::Domain("point is not on the curve".into()));
        }
        if self.torsion.contains(&q) {
            return Ok(HeightValue::exact(0.0));
        }
        if tol <= 2.0 * FLOAT_SLACK {
            return Err(Error::Resource(format!(
                "tolerance {tol} is below the certified float precision"
            )));
        }
        // smallest n with drift/(3 * 4^n) + slack <= tol
        let mut n_steps = 0u32;
        let mut tail = self.drift / 3.0;
        while tail + FLOAT_SLACK > tol {
            tail /= 4.0;
            n_steps += 1;
            if n_steps > MAX_DOUBLINGS {
                return Err(Error::Resource(format!(
                    "no convergence within {MAX_DOUBLINGS} doublings at tol {tol}"
                )));
            }
        }
        let (x, _) = match &q {
            CurvePoint::Affine { x, y } => (x, y),
            CurvePoint::Identity => unreachable!("identity is torsion"),
        };

        let p0 = x.numer().clone();
        let q0 = x.denom().clone();
        let m0 = p0.abs().max(q0.clone());
        let mut s = ln_big(&m0);
        // renormalized float pair
        let (mut fp, mut fq) = pair_to_unit(&p0, &q0);
        // p-adic residue trackers
        let mut trackers: Vec<PadicTracker> = self
            .gcd_primes
            .iter()
            .map(|(p, vres)| PadicTracker::new(p, *vres, n_steps, &p0, &q0, &self.phi_int, &self.psi_int))
            .collect();

        let mut weight = 1.0f64;
        for _ in 0..n_steps {
            weight /= 4.0;
            let a = eval_form(&self.phi, fp, fq);
            let b = eval_form(&self.psi, fp, fq);
            let maxval = a.abs().max(b.abs());
            if maxval == 0.0 || !maxval.is_finite() {
                return Err(Error::Inconsistency(
                    "duplication pair collapsed numerically".into(),
                ));
            }
            let mut ln_g = 0.0f64;
            for t in trackers.iter_mut() {
                ln_g += t.step()?;
            }
            s += weight * (maxval.ln() - ln_g);
            fp = a / maxval;
            fq = b / maxval;
        }
        let error = self.drift / (3.0 * 4f64.powi(n_steps as i32)) + FLOAT_SLACK;
        Ok(HeightValue {
            value: s.max(0.0),
            error,
        })
    }
}

/// One-off canonical height; builds the per-curve context each call.
pub fn canonical_height(
    e: &WeierstrassCurve,
    p: &CurvePoint,
    tol: f64,
    budget: &FactorBudget,
) -> Result<HeightValue> {
    CanonicalHeightCtx::new(e, budget)?.height(p, tol)
}

struct PadicTracker {
    p: BigInt,
    v_res: u64,
    modulus: BigInt,
    precision: u64,
    rp: BigInt,
    rq: BigInt,
    phi: [BigInt; 5],
    psi: [BigInt; 5],
    ln_p: f64,
}

impl PadicTracker {
    fn new(
        p: &BigInt,
        v_res: u64,
        n_steps: u32,
        p0: &BigInt,
        q0: &BigInt,
        phi: &[BigInt; 5],
        psi: &[BigInt; 5],
    ) -> Self {
        let precision = (n_steps as u64 + 2) * (v_res + 1) + 16;
        let modulus = p.pow(precision as u32);
        PadicTracker {
            p: p.clone(),
            v_res,
            rp: p0.mod_floor(&modulus),
            rq: q0.mod_floor(&modulus),
            modulus,
            precision,
            phi: phi.clone(),
            psi: psi.clone(),
            ln_p: ln_big(p),
        }
    }

    /// Advance one duplication; returns v_p(gcd) * ln p for this step.
    fn step(&mut self) -> Result<f64> {
        let a = eval_form_mod(&self.phi, &self.rp, &self.rq, &self.modulus);
        let b = eval_form_mod(&self.psi, &self.rp, &self.rq, &self.modulus);
        let va = val_capped(&a, &self.p, self.v_res + 1);
        let vb = val_capped(&b, &self.p, self.v_res + 1);
        let v = va.min(vb);
        if v > self.v_res {
            return Err(Error::Inconsistency(format!(
                "gcd valuation {v} exceeds the resultant bound {} at p = {}",
                self.v_res, self.p
            )));
        }
        if v + 2 >= self.precision {
            return Err(Error::Inconsistency("p-adic precision exhausted".into()));
        }
        let pv = self.p.pow(v as u32);
        self.precision -= v;
        self.modulus = &self.modulus / &pv;
        self.rp = (a / &pv).mod_floor(&self.modulus);
        self.rq = (b / &pv).mod_floor(&self.modulus);
        Ok(v as f64 * self.ln_p)
    }
}

/// Valuation of n at p, capped: returns cap if p^cap | n (including n = 0).
fn val_capped(n: &BigInt, p: &BigInt, cap: u64) -> u64 {
    if n.is_zero() {
        return cap;
    }
    let mut m = n.clone();
    let mut v = 0;
    while v < cap && m.is_multiple_of(p) {
        m /= p;
        v += 1;
    }
    v
}

fn eval_form(coeffs: &[f64; 5], p: f64, q: f64) -> f64 {
    let mut acc = 0.0;
    let mut pk = 1.0;
    // descending p-powers: c0 p^4 + c1 p^3 q + ... + c4 q^4
    let mut terms = [0.0f64; 5];
    for i in (0..5).rev() {
        terms[i] = pk;
        pk *= p;
    }
    let mut qk = 1.0;
    for i in 0..5 {
        acc += coeffs[i] * terms[i] * qk;
        qk *= q;
    }
    acc
}

fn eval_form_mod(coeffs: &[BigInt; 5], p: &BigInt, q: &BigInt, modulus: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for i in 0..5 {
        let mut term = coeffs[i].mod_floor(modulus);
        for _ in 0..(4 - i) {
            term = (term * p).mod_floor(modulus);
        }
        for _ in 0..i {
            term = (term * q).mod_floor(modulus);
        }
        acc = (acc + term).mod_floor(modulus);
    }
    acc
}

fn big_to_f64(n: &BigInt) -> f64 {
    n.to_f64().unwrap_or(if n.is_negative() {
        f64::MIN
    } else {
        f64::MAX
    })
}

fn pair_to_unit(p: &BigInt, q: &BigInt) -> (f64, f64) {
    let bits = p.bits().max(q.bits());
    let (ps, qs) = if bits > 900 {
        let sh = bits - 900;
        (p >> sh, q >> sh)
    } else {
        (p.clone(), q.clone())
    };
    let pf = ps.to_f64().unwrap();
    let qf = qs.to_f64().unwrap();
    let m = pf.abs().max(qf.abs());
    (pf / m, qf / m)
}

/// Resultant of two binary quartic forms (descending coefficients), exact.
fn form_resultant(f: &[BigInt; 5], g: &[BigInt; 5]) -> BigInt {
    let size = 8;
    let mut mat = vec![vec![BigRational::zero(); size]; size];
    for row in 0..4 {
        for (i, c) in f.iter().enumerate() {
            mat[row][row + i] = BigRational::from(c.clone());
        }
    }
    for row in 0..4 {
        for (i, c) in g.iter().enumerate() {
            mat[4 + row][row + i] = BigRational::from(c.clone());
        }
    }
    determinant(mat).to_integer()
}

/// Drift bound: one duplication step moves log max by at most
/// max(log sum|Phi|, log K) in absolute value, where K comes from the
/// Bezout cofactors of the resultant identity.
fn drift_constant(phi: &[BigInt; 5], psi: &[BigInt; 5], res: &BigInt) -> Result<f64> {
    let sum_abs = |v: &[BigInt; 5]| -> BigInt { v.iter().map(|c| c.abs()).sum() };
    let up = ln_big(&sum_abs(phi).max(sum_abs(psi)));

    // solve u*Phi + v*Psi = Res * p^7  and  = Res * q^7
    let mut k_bound = 0.0f64;
    for target_index in [0usize, 7] {
        let mut mat = vec![vec![BigRational::zero(); 8]; 8];
        for k in 0..8 {
            for i in 0..4 {
                if k >= i && k - i < 5 {
                    mat[k][i] = BigRational::from(phi[k - i].clone());
                    mat[k][4 + i] = BigRational::from(psi[k - i].clone());
                }
            }
        }
        let mut rhs = vec![BigRational::zero(); 8];
        rhs[target_index] = BigRational::from(res.clone());
        let sol = solve_linear(mat, rhs).ok_or_else(|| {
            Error::Inconsistency("singular cofactor system for a nonzero resultant".into())
        })?;
        let total: BigRational = sol.iter().map(|c| c.abs()).sum();
        let total_f = big_to_f64(&total.ceil().to_integer()).max(1.0);
        k_bound = k_bound.max(total_f.ln());
    }
    Ok(up.max(k_bound) + 0.5)
}

/// Exact determinant by fraction-preserving Gaussian elimination.
pub(crate) fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => return BigRational::zero(),
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in (col + 1)..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pv;
            for c in col..n {
                let sub = &factor * &m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    det
}

/// Exact linear solve (square systems), None when singular.
pub(crate) fn solve_linear(
    mut m: Vec<Vec<BigRational>>,
    mut rhs: Vec<BigRational>,
) -> Option<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        if pivot != col {
            m.swap(pivot, col);
            rhs.swap(pivot, col);
        }
        let pv = m[col][col].clone();
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pv;
            for c in col..n {
                let sub = &factor * &m[col][c];
                m[r][c] -= sub;
            }
            let sub = &factor * &rhs[col];
            rhs[r] -= sub;
        }
    }
    Some(
        rhs.into_iter()
            .zip(m.into_iter().enumerate().map(|(i, row)| row[i].clone()))
            .map(|(b, pivot)| b / pivot)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::rat_i64;

    fn curve(a: i64, b: i64, c: i64) -> WeierstrassCurve {
        WeierstrassCurve::from_i64(a, b, c).unwrap()
    }

    fn rq(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn naive_height_examples() {
        assert!((naive_height(&rq(3, 2)).value - 3f64.ln()).abs() < 1e-15);
        assert_eq!(naive_height(&rat_i64(1)).value, 0.0);
        assert_eq!(point_x_height(&CurvePoint::Identity).value, 0.0);
    }

    #[test]
    fn curve_height_examples() {
        assert_eq!(curve_height(&curve(0, -1, 0)).value, 0.0);
        let e = WeierstrassCurve::new(rat_i64(0), rq(-1, 4), rq(1, 16)).unwrap();
        assert!((curve_height(&e).value - 16f64.ln()).abs() < 1e-12);
        // descaled 37 curve: (0, -1, 1/4) has h(E) = log 4
        let e = WeierstrassCurve::new(rat_i64(0), rat_i64(-1), rq(1, 4)).unwrap();
        assert!((curve_height(&e).value - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn resultant_of_duplication_forms_is_disc_squared() {
        for (a, b, c) in [(0i64, -1, 0), (0, 0, 1), (0, -16, 16), (2, -3, 1)] {
            let e = curve(a, b, c);
            let ctx = CanonicalHeightCtx::new(&e, &FactorBudget::default()).unwrap();
            let disc = ctx.model.discriminant().to_integer();
            let res = form_resultant(&ctx.phi_int, &ctx.psi_int);
            assert_eq!(res.abs(), (&disc * &disc).abs(), "({a},{b},{c})");
        }
    }

    #[test]
    fn torsion_short_circuits_to_zero() {
        let e = curve(0, -1, 0);
        let h = canonical_height(
            &e,
            &CurvePoint::affine(rat_i64(0), rat_i64(0)),
            1e-3,
            &FactorBudget::default(),
        )
        .unwrap();
        assert_eq!(h.value, 0.0);
        assert_eq!(h.error, 0.0);
    }

    #[test]
    fn conductor_37_generator_height() {
        // y^2 = x^3 - x + 1/4 with the generator (0, 1/2)
        let e = WeierstrassCurve::new(rat_i64(0), rat_i64(-1), rq(1, 4)).unwrap();
        let p = CurvePoint::affine(rat_i64(0), rq(1, 2));
        let h = canonical_height(&e, &p, 1e-9, &FactorBudget::default()).unwrap();
        assert!(
            (h.value - 0.051111408239969).abs() < 1e-6,
            "got {} +- {}",
            h.value,
            h.error
        );
        assert!(h.error <= 1e-9);
    }

    #[test]
    fn quadraticity_under_doubling() {
        let e = curve(0, -16, 16);
        let ctx = CanonicalHeightCtx::new(&e, &FactorBudget::default()).unwrap();
        let tol = 1e-9;
        let mut p = CurvePoint::affine(rat_i64(0), rat_i64(4));
        for _ in 0..4 {
            let h1 = ctx.height(&p, tol).unwrap();
            let p2 = e.multiply_unchecked(2, &p);
            let h2 = ctx.height(&p2, tol).unwrap();
            assert!(
                (h2.value - 4.0 * h1.value).abs() < 5.0 * tol,
                "h(2P) = {} vs 4 h(P) = {}",
                h2.value,
                4.0 * h1.value
            );
            p = p2;
        }
    }

    #[test]
    fn model_invariance_of_canonical_height() {
        let e = curve(0, -16, 16);
        let p = CurvePoint::affine(rat_i64(0), rat_i64(4));
        let tol = 1e-9;
        let h1 = canonical_height(&e, &p, tol, &FactorBudget::default()).unwrap();
        // scale by u = 3: an already-integral different model
        let t = ModelTransform::new(rat_i64(3)).unwrap();
        let e2 = t.apply_curve(&e);
        let p2 = t.apply_point(&p);
        let h2 = canonical_height(&e2, &p2, tol, &FactorBudget::default()).unwrap();
        assert!((h1.value - h2.value).abs() < 2.0 * tol, "{} vs {}", h1.value, h2.value);
        // the descaled rational model integralizes back to the same curve
        let half = ModelTransform::new(rq(1, 2)).unwrap();
        let e3 = half.apply_curve(&e);
        let p3 = half.apply_point(&p);
        let h3 = canonical_height(&e3, &p3, tol, &FactorBudget::default()).unwrap();
        assert!((h1.value - h3.value).abs() < 2.0 * tol);
    }

    #[test]
    fn petsche_floor_examples() {
        let f = petsche_floor(&HeightFloorInputs {
            d: 1,
            disc_norm: BigInt::from(64),
            sigma: 1.2,
            j_height: 0.0,
        })
        .unwrap();
        assert!((f - 9.798e-18).abs() / 9.798e-18 < 1e-3, "got {f}");
        let f = petsche_floor(&HeightFloorInputs {
            d: 1,
            disc_norm: BigInt::from(2),
            sigma: 1.0,
            j_height: 0.0,
        })
        .unwrap();
        let expect = 2f64.ln() / (1e15 * 104613f64.ln().powi(2));
        assert!((f - expect).abs() / expect < 1e-12);
        // monotone decreasing in sigma
        let f2 = petsche_floor(&HeightFloorInputs {
            d: 1,
            disc_norm: BigInt::from(64),
            sigma: 2.4,
            j_height: 0.0,
        })
        .unwrap();
        assert!(f2 < f);
        // N(D) = 1 is a domain error
        assert!(petsche_floor(&HeightFloorInputs {
            d: 1,
            disc_norm: BigInt::one(),
            sigma: 1.0,
            j_height: 0.0,
        })
        .is_err());
    }

    #[test]
    fn david_floor_examples() {
        let c6 = 1e-7;
        let base = HeightFloorInputs {
            d: 1,
            disc_norm: BigInt::one(),
            sigma: 1.0,
            j_height: 1.0,
        };
        assert!((david_floor(&base, c6) - c6).abs() < 1e-22);
        let j3 = HeightFloorInputs { j_height: 3.0, ..base.clone() };
        assert!((david_floor(&j3, c6) - 3.0 * c6).abs() < 1e-20);
        let d2 = HeightFloorInputs { d: 2, j_height: 1.0, ..base };
        let expect = c6 / (8.0 * (1.0 + 2f64.ln()).powi(2));
        assert!((david_floor(&d2, c6) - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn gap_radius_examples() {
        let cfg = HeightsConfig {
            kappa_low: 0.0,
            ..HeightsConfig::default()
        };
        let gp = height_gap_parameters(&cfg);
        // radius = B^2 when kappa = 0
        assert!((gp.search_radius_log(3.0) - 6.0).abs() < 1e-15);
        let gp = GapParameters {
            c1: 1.0,
            c2: 1.0,
            kappa_low: 1.0,
        };
        assert!((gp.search_radius_log(3.0) - 8.0).abs() < 1e-15);
    }

    #[test]
    fn naive_height_covariance_on_valid_domain() {
        // h(u^2 x) = h(x) + 2 log u holds exactly when |x| >= 1 and the
        // denominator of x is coprime to u; outside that domain the finite
        // places can cancel, so the sweep filters to the valid region.
        let xs = [rq(3, 2), rq(7, 5), rq(9, 4), rq(-11, 3), rat_i64(6)];
        for u in [2i64, 3, 5] {
            for x in &xs {
                if x.denom() % BigInt::from(u) == BigInt::zero() {
                    continue;
                }
                let scaled = x * rat_i64(u * u);
                let lhs = naive_height(&scaled).value;
                let rhs = naive_height(x).value + 2.0 * (u as f64).ln();
                assert!((lhs - rhs).abs() < 1e-12, "x = {x}, u = {u}");
            }
        }
    }

    #[test]
    fn determinant_and_solve() {
        let m = vec![
            vec![rat_i64(2), rat_i64(1)],
            vec![rat_i64(1), rat_i64(3)],
        ];
        assert_eq!(determinant(m.clone()), rat_i64(5));
        let sol = solve_linear(m, vec![rat_i64(5), rat_i64(10)]).unwrap();
        assert_eq!(sol, vec![rat_i64(1), rat_i64(3)]);
    }
}
