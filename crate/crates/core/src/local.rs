//! Tate's algorithm at each bad prime of an integral model, the global
//! minimal discriminant / conductor / Szpiro ratio, and point counts of
//! good reductions.
//!
//! The local algorithm runs on the long Weierstrass form internally: short
//! integral models over Z need not be locally minimal (the descaled
//! conductor-37 curve needs a1/a3 terms to reach its minimal model).
//! For p >= 5 the Kodaira type follows from the translation-invariant pair
//! (v(c4), v(Delta)) with a u = p descale loop; for p in {2, 3} the full
//! step algorithm with explicit translations is used. Conductor exponents
//! come out of Ogg's formula via the component counts baked into each step.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arithmetic::{factor, ln_big, FactorBudget};
use crate::curve::{val_p, WeierstrassCurve};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum KodairaType {
    I0,
    In(u64),
    II,
    III,
    IV,
    I0Star,
    InStar(u64),
    IVStar,
    IIIStar,
    IIStar,
}

impl std::fmt::Display for KodairaType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KodairaType::I0 => write!(f, "I0"),
            KodairaType::In(n) => write!(f, "I{n}"),
            KodairaType::II => write!(f, "II"),
            KodairaType::III => write!(f, "III"),
            KodairaType::IV => write!(f, "IV"),
            KodairaType::I0Star => write!(f, "I0*"),
            KodairaType::InStar(n) => write!(f, "I{n}*"),
            KodairaType::IVStar => write!(f, "IV*"),
            KodairaType::IIIStar => write!(f, "III*"),
            KodairaType::IIStar => write!(f, "II*"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReductionKind {
    Good,
    Multiplicative,
    Additive,
}

/// Per-prime output of Tate's algorithm.
#[derive(Debug, Clone, Serialize)]
pub struct LocalReductionData {
    pub prime: BigInt,
    pub kodaira: KodairaType,
    pub v_disc_min: u64,
    pub conductor_exp: u64,
    pub kind: ReductionKind,
}

/// Global invariants assembled from the local data.
#[derive(Debug, Clone, Serialize)]
pub struct GlobalInvariants {
    pub disc_norm: BigInt,
    pub conductor_norm: BigInt,
    pub szpiro_ratio: f64,
    pub bad_primes: Vec<BigInt>,
    pub locals: Vec<LocalReductionData>,
}

/// Long Weierstrass model [a1, a2, a3, a4, a6] over Z.
#[derive(Debug, Clone, PartialEq, Eq)]
struct LongModel {
    a1: BigInt,
    a2: BigInt,
    a3: BigInt,
    a4: BigInt,
    a6: BigInt,
}

impl LongModel {
    fn from_short(e: &WeierstrassCurve) -> Result<Self> {
        if !e.is_integral() {
            return Err(Error::Precondition(
                "Tate's algorithm needs integral coefficients".into(),
            ));
        }
        Ok(LongModel {
            a1: BigInt::zero(),
            a2: e.a().to_integer(),
            a3: BigInt::zero(),
            a4: e.b().to_integer(),
            a6: e.c().to_integer(),
        })
    }

    fn b2(&self) -> BigInt {
        &self.a1 * &self.a1 + 4 * &self.a2
    }

    fn b4(&self) -> BigInt {
        2 * &self.a4 + &self.a1 * &self.a3
    }

    fn b6(&self) -> BigInt {
        &self.a3 * &self.a3 + 4 * &self.a6
    }

    fn b8(&self) -> BigInt {
        &self.a1 * &self.a1 * &self.a6 + 4 * &self.a2 * &self.a6
            - &self.a1 * &self.a3 * &self.a4
            + &self.a2 * &self.a3 * &self.a3
            - &self.a4 * &self.a4
    }

    fn c4(&self) -> BigInt {
        let b2 = self.b2();
        &b2 * &b2 - 24 * self.b4()
    }

    fn disc(&self) -> BigInt {
        let b2 = self.b2();
        let b4 = self.b4();
        let b6 = self.b6();
        let b8 = self.b8();
        -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * b2 * b4 * b6
    }

    /// x -> x + r, y -> y + s x + t.
    fn translate(&self, r: &BigInt, s: &BigInt, t: &BigInt) -> LongModel {
        let a1 = &self.a1 + 2 * s;
        let a2 = &self.a2 - s * &self.a1 + 3 * r - s * s;
        let a3 = &self.a3 + r * &self.a1 + 2 * t;
        let a4 = &self.a4 - s * &self.a3 + 2 * r * &self.a2 - (t + r * s) * &self.a1 + 3 * r * r
            - 2 * s * t;
        let a6 = &self.a6 + r * &self.a4 + r * r * &self.a2 + r * r * r
            - t * &self.a3
            - t * t
            - r * t * &self.a1;
        LongModel { a1, a2, a3, a4, a6 }
    }

    /// u = p descale; caller guarantees the divisibilities.
    fn descale(&self, p: &BigInt) -> LongModel {
        let p2 = p * p;
        let p3 = &p2 * p;
        let p4 = &p2 * &p2;
        let p6 = &p3 * &p3;
        LongModel {
            a1: &self.a1 / p,
            a2: &self.a2 / &p2,
            a3: &self.a3 / &p3,
            a4: &self.a4 / &p4,
            a6: &self.a6 / &p6,
        }
    }
}

fn vp(n: &BigInt, p: &BigInt) -> u64 {
    if n.is_zero() {
        u64::MAX / 4 // effectively infinite
    } else {
        val_p(&n.abs(), p)
    }
}

/// Run Tate's algorithm for the curve at prime p.
pub fn tate_local(e: &WeierstrassCurve, p: &BigInt) -> Result<LocalReductionData> {
    let model = LongModel::from_short(e)?;
    if *p < BigInt::from(2) {
        return Err(Error::Precondition(format!("{p} is not a prime")));
    }
    let (kodaira, v_min, f) = if *p >= BigInt::from(5) {
        tate_large_prime(&model, p)?
    } else {
        tate_small_prime(&model, p)?
    };
    let kind = match f {
        0 => ReductionKind::Good,
        1 => ReductionKind::Multiplicative,
        _ => ReductionKind::Additive,
    };
    Ok(LocalReductionData {
        prime: p.clone(),
        kodaira,
        v_disc_min: v_min,
        conductor_exp: f,
        kind,
    })
}

/// p >= 5: type from (v(c4), v(Delta)) after stripping 12th powers.
fn tate_large_prime(model: &LongModel, p: &BigInt) -> Result<(KodairaType, u64, u64)> {
    let mut k = vp(&model.disc(), p);
    let mut j = vp(&model.c4(), p);
    while k >= 12 && j >= 4 {
        k -= 12;
        j = j.saturating_sub(4);
        // j was v(c4) - 4 only if finite; c4 = 0 stays "infinite"
        if model.c4().is_zero() {
            j = u64::MAX / 4;
        }
    }
    if k == 0 {
        return Ok((KodairaType::I0, 0, 0));
    }
    if j == 0 {
        return Ok((KodairaType::In(k), k, 1));
    }
    let ty = match k {
        2 => KodairaType::II,
        3 => KodairaType::III,
        4 => KodairaType::IV,
        6 => KodairaType::I0Star,
        8 if j >= 3 => KodairaType::IVStar,
        9 if j == 3 => KodairaType::IIIStar,
        10 if j >= 4 => KodairaType::IIStar,
        n if n >= 7 && j == 2 => KodairaType::InStar(n - 6),
        _ => {
            return Err(Error::Inconsistency(format!(
                "unexpected valuation pair v(c4) = {j}, v(disc) = {k} at p = {p}"
            )))
        }
    };
    Ok((ty, k, 2))
}

/// p in {2, 3}: the stepwise algorithm with explicit translations.
fn tate_small_prime(start: &LongModel, p: &BigInt) -> Result<(KodairaType, u64, u64)> {
    let pu = p.to_u64().unwrap();
    let mut m = start.clone();
    loop {
        let n = vp(&m.disc(), p);
        if n == 0 {
            return Ok((KodairaType::I0, 0, 0));
        }
        m = move_singular_point(&m, pu)?;
        if vp(&m.b2(), p) == 0 {
            return Ok((KodairaType::In(n), n, 1));
        }
        if vp(&m.a6, p) < 2 {
            return Ok((KodairaType::II, n, n));
        }
        if vp(&m.b8(), p) < 3 {
            return Ok((KodairaType::III, n, n - 1));
        }
        if vp(&m.b6(), p) < 3 {
            return Ok((KodairaType::IV, n, n - 2));
        }
        m = normalize_for_star(&m, pu)?;
        // P(T) = T^3 + (a2/p) T^2 + (a4/p^2) T + (a6/p^3) over F_p
        let p2 = p * p;
        let p3 = &p2 * p;
        let c2 = (&m.a2 / p).mod_floor(p).to_u64().unwrap();
        let c1 = (&m.a4 / &p2).mod_floor(p).to_u64().unwrap();
        let c0 = (&m.a6 / &p3).mod_floor(p).to_u64().unwrap();
        match cubic_root_structure(c2, c1, c0, pu) {
            CubicRoots::Distinct => {
                return Ok((KodairaType::I0Star, n, n - 4));
            }
            CubicRoots::Double(root) => {
                // shift the double root to T = 0
                m = m.translate(&(p * BigInt::from(root)), &BigInt::zero(), &BigInt::zero());
                let nn = instar_loop(&mut m, p)?;
                return Ok((KodairaType::InStar(nn), n, n - 4 - nn));
            }
            CubicRoots::Triple(root) => {
                m = m.translate(&(p * BigInt::from(root)), &BigInt::zero(), &BigInt::zero());
                let p4 = &p2 * &p2;
                let b = (&m.a3 / &p2).mod_floor(p).to_u64().unwrap();
                let c = (-(&m.a6) / &p4).mod_floor(p).to_u64().unwrap();
                match quad_double_root(1, b, c, pu) {
                    None => return Ok((KodairaType::IVStar, n, n - 6)),
                    Some(root) => {
                        m = m.translate(&BigInt::zero(), &BigInt::zero(), &(&p2 * BigInt::from(root)));
                    }
                }
                if vp(&m.a4, p) < 4 {
                    return Ok((KodairaType::IIIStar, n, n - 7));
                }
                if vp(&m.a6, p) < 6 {
                    return Ok((KodairaType::IIStar, n, n - 8));
                }
                m = m.descale(p);
                // non-minimal: go around again
            }
        }
    }
}

/// Step-7 subloop: returns n of I_n*. The model enters with the double root
/// at T = 0, i.e. v(a2) = 1, v(a3) >= 2, v(a4) >= 3, v(a6) >= 4.
fn instar_loop(m: &mut LongModel, p: &BigInt) -> Result<u64> {
    let pu = p.to_u64().unwrap();
    let a2u = (&m.a2 / p).mod_floor(p).to_u64().unwrap();
    let mut k: u64 = 2;
    loop {
        let pk = p.pow(k as u32);
        let p2k = p.pow(2 * k as u32);
        // Y^2 + (a3/p^k) Y - (a6/p^2k)
        let b = (&m.a3 / &pk).mod_floor(p).to_u64().unwrap();
        let c = (-(&m.a6) / &p2k).mod_floor(p).to_u64().unwrap();
        match quad_double_root(1, b, c, pu) {
            None => return Ok(2 * k - 3),
            Some(root) => {
                *m = m.translate(&BigInt::zero(), &BigInt::zero(), &(&pk * BigInt::from(root)));
            }
        }
        // (a2/p) X^2 + (a4/p^{k+1}) X + (a6/p^{2k+1})
        let pk1 = p.pow(k as u32 + 1);
        let p2k1 = p.pow(2 * k as u32 + 1);
        let bx = (&m.a4 / &pk1).mod_floor(p).to_u64().unwrap();
        let cx = (&m.a6 / &p2k1).mod_floor(p).to_u64().unwrap();
        match quad_double_root(a2u, bx, cx, pu) {
            None => return Ok(2 * k - 2),
            Some(root) => {
                *m = m.translate(&(&pk * BigInt::from(root)), &BigInt::zero(), &BigInt::zero());
            }
        }
        k += 1;
        if k > 200 {
            return Err(Error::Inconsistency("runaway I_n* loop".into()));
        }
    }
}

/// Translate so the unique singular point of the reduction sits at (0,0).
fn move_singular_point(m: &LongModel, p: u64) -> Result<LongModel> {
    let pb = BigInt::from(p);
    let a1 = m.a1.mod_floor(&pb).to_u64().unwrap();
    let a2 = m.a2.mod_floor(&pb).to_u64().unwrap();
    let a3 = m.a3.mod_floor(&pb).to_u64().unwrap();
    let a4 = m.a4.mod_floor(&pb).to_u64().unwrap();
    let a6 = m.a6.mod_floor(&pb).to_u64().unwrap();
    for r in 0..p {
        for t in 0..p {
            // on curve: t^2 + a1 r t + a3 t = r^3 + a2 r^2 + a4 r + a6
            let lhs = (t * t + a1 * r * t + a3 * t) % p;
            let rhs = (((r * r % p) * r) % p + a2 * r % p * r % p + a4 * r % p + a6) % p;
            if lhs != rhs {
                continue;
            }
            // d/dx: a1 t = 3 r^2 + 2 a2 r + a4
            let dx_l = (a1 * t) % p;
            let dx_r = (3 * r % p * r % p + 2 * a2 % p * r % p + a4) % p;
            if dx_l != dx_r {
                continue;
            }
            // d/dy: 2 t + a1 r + a3 = 0
            if (2 * t + a1 * r + a3) % p != 0 {
                continue;
            }
            return Ok(m.translate(&BigInt::from(r), &BigInt::zero(), &BigInt::from(t)));
        }
    }
    Err(Error::Inconsistency(format!(
        "no singular point mod {p} though v(disc) > 0"
    )))
}

/// Find (s, t) making v(a1) >= 1, v(a2) >= 1, v(a3) >= 2, v(a4) >= 2,
/// v(a6) >= 3; guaranteed reachable at this stage of the algorithm.
fn normalize_for_star(m: &LongModel, p: u64) -> Result<LongModel> {
    let pb = BigInt::from(p);
    for s in 0..p {
        for t in 0..p * p * p {
            let cand = m.translate(&BigInt::zero(), &BigInt::from(s), &BigInt::from(t));
            if vp(&cand.a1, &pb) >= 1
                && vp(&cand.a2, &pb) >= 1
                && vp(&cand.a3, &pb) >= 2
                && vp(&cand.a4, &pb) >= 2
                && vp(&cand.a6, &pb) >= 3
            {
                return Ok(cand);
            }
        }
    }
    Err(Error::Inconsistency(format!(
        "normalization before step 6 failed at p = {p}"
    )))
}

enum CubicRoots {
    Distinct,
    Double(u64),
    Triple(u64),
}

/// Root structure of T^3 + c2 T^2 + c1 T + c0 over F_p, p small.
fn cubic_root_structure(c2: u64, c1: u64, c0: u64, p: u64) -> CubicRoots {
    let eval = |t: u64| -> u64 { (((t * t % p * t) % p) + c2 * t % p * t % p + c1 * t % p + c0) % p };
    let deriv = |t: u64| -> u64 { (3 * t % p * t % p + 2 * c2 % p * t % p + c1) % p };
    let mut repeated: Option<u64> = None;
    for t in 0..p {
        if eval(t) == 0 && deriv(t) == 0 {
            repeated = Some(t);
            break;
        }
    }
    match repeated {
        None => CubicRoots::Distinct,
        Some(t) => {
            // triple iff the cubic is (T - t)^3, i.e. coefficientwise
            // c2 = -3t, c1 = 3t^2, c0 = -t^3 mod p
            let t3 = 3 * t % p;
            let is_triple = c2 % p == (p - t3) % p
                && c1 % p == t3 * t % p
                && c0 % p == (p - pow_mod(t, 3, p)) % p;
            if is_triple {
                CubicRoots::Triple(t)
            } else {
                CubicRoots::Double(t)
            }
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// For alpha X^2 + beta X + gamma with alpha a unit mod p: None when the
/// roots are distinct (in the algebraic closure), otherwise the double root.
fn quad_double_root(alpha: u64, beta: u64, gamma: u64, p: u64) -> Option<u64> {
    debug_assert!(alpha % p != 0);
    if p == 2 {
        if beta % 2 != 0 {
            return None; // separable
        }
        // X^2 = gamma/alpha; squares are the identity mod 2
        return Some(gamma * alpha % 2);
    }
    let disc = ((beta * beta) % p + p * p - (4 * alpha % p) * gamma % p) % p;
    if disc % p != 0 {
        return None;
    }
    // root = -beta / (2 alpha)
    let inv = pow_mod(2 * alpha % p, p - 2, p);
    Some((p - beta % p) % p * inv % p)
}

/// Minimal discriminant, conductor, Szpiro ratio. The curve is integralized
/// internally; the invariants are model-independent.
pub fn global_invariants(e: &WeierstrassCurve, budget: &FactorBudget) -> Result<GlobalInvariants> {
    let (ei, _) = e.integralize(budget)?;
    let disc = LongModel::from_short(&ei)?.disc();
    let mut locals = Vec::new();
    let mut disc_norm = BigInt::one();
    let mut cond_norm = BigInt::one();
    let mut bad = Vec::new();
    for (p, _) in factor(&disc, budget)?.factors {
        let local = tate_local(&ei, &p)?;
        if local.conductor_exp > 0 {
            bad.push(p.clone());
        }
        disc_norm *= p.pow(local.v_disc_min as u32);
        cond_norm *= p.pow(local.conductor_exp as u32);
        locals.push(local);
    }
    let szpiro = if cond_norm.is_one() {
        1.0
    } else {
        ln_big(&disc_norm) / ln_big(&cond_norm)
    };
    Ok(GlobalInvariants {
        disc_norm,
        conductor_norm: cond_norm,
        szpiro_ratio: szpiro,
        bad_primes: bad,
        locals,
    })
}

/// |E~(F_p)| by exhaustive count, identity included. Requires the given
/// model to be nonsingular mod p.
pub fn reduced_point_count(e: &WeierstrassCurve, p: u64) -> Result<u64> {
    if !e.is_integral() {
        return Err(Error::Precondition("need an integral model".into()));
    }
    let pb = BigInt::from(p);
    let disc = e.discriminant().to_integer();
    if disc.is_multiple_of(&pb) {
        return Err(Error::Precondition(format!(
            "model is singular mod {p}; minimalize first"
        )));
    }
    let a = e.a().to_integer().mod_floor(&pb).to_u64().unwrap();
    let b = e.b().to_integer().mod_floor(&pb).to_u64().unwrap();
    let c = e.c().to_integer().mod_floor(&pb).to_u64().unwrap();
    // sqrt-count table: t[r] = #{y : y^2 = r}
    let mut table = vec![0u8; p as usize];
    for y in 0..p {
        table[(y * y % p) as usize] += 1;
    }
    let mut count = 1u64; // identity
    for x in 0..p {
        let fx = (((x * x % p * x) % p) + a * x % p * x % p + b * x % p + c) % p;
        count += table[fx as usize] as u64;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::rat_i64;
    use num_rational::BigRational;

    fn curve(a: i64, b: i64, c: i64) -> WeierstrassCurve {
        WeierstrassCurve::from_i64(a, b, c).unwrap()
    }

    #[test]
    fn long_model_disc_matches_short_formula() {
        for (a, b, c) in [(0i64, -1, 0), (0, 0, 1), (0, -16, 16), (3, -7, 2)] {
            let e = curve(a, b, c);
            let lm = LongModel::from_short(&e).unwrap();
            assert_eq!(BigRational::from(lm.disc()), e.discriminant());
        }
    }

    #[test]
    fn tate_32a_at_two() {
        // y^2 = x^3 - x: additive type III at 2, f = 5, v(disc_min) = 6
        let d = tate_local(&curve(0, -1, 0), &BigInt::from(2)).unwrap();
        assert_eq!(d.kodaira, KodairaType::III);
        assert_eq!(d.v_disc_min, 6);
        assert_eq!(d.conductor_exp, 5);
        assert_eq!(d.kind, ReductionKind::Additive);
    }

    #[test]
    fn tate_descaled_37_at_two() {
        // y^2 = x^3 - 16x + 16 is non-minimal at 2; minimal model has disc 37
        let d = tate_local(&curve(0, -16, 16), &BigInt::from(2)).unwrap();
        assert_eq!(d.kodaira, KodairaType::I0);
        assert_eq!(d.v_disc_min, 0);
        assert_eq!(d.conductor_exp, 0);
        let d = tate_local(&curve(0, -16, 16), &BigInt::from(37)).unwrap();
        assert_eq!(d.kodaira, KodairaType::In(1));
        assert_eq!(d.conductor_exp, 1);
    }

    #[test]
    fn tate_36a_local_data() {
        let e = curve(0, 0, 1);
        let d2 = tate_local(&e, &BigInt::from(2)).unwrap();
        assert_eq!((d2.kodaira.clone(), d2.v_disc_min, d2.conductor_exp), (KodairaType::IV, 4, 2));
        let d3 = tate_local(&e, &BigInt::from(3)).unwrap();
        assert_eq!((d3.kodaira.clone(), d3.v_disc_min, d3.conductor_exp), (KodairaType::III, 3, 2));
        let d5 = tate_local(&e, &BigInt::from(5)).unwrap();
        assert_eq!(d5.conductor_exp, 0);
        assert_eq!(d5.kind, ReductionKind::Good);
    }

    #[test]
    fn global_invariants_fixtures() {
        let budget = FactorBudget::default();
        let g = global_invariants(&curve(0, -1, 0), &budget).unwrap();
        assert_eq!(g.disc_norm, BigInt::from(64));
        assert_eq!(g.conductor_norm, BigInt::from(32));
        assert!((g.szpiro_ratio - 1.2).abs() < 1e-12);

        let g = global_invariants(&curve(0, -16, 16), &budget).unwrap();
        assert_eq!(g.disc_norm, BigInt::from(37));
        assert_eq!(g.conductor_norm, BigInt::from(37));
        assert!((g.szpiro_ratio - 1.0).abs() < 1e-12);

        let g = global_invariants(&curve(0, 0, 1), &budget).unwrap();
        assert_eq!(g.disc_norm, BigInt::from(432));
        assert_eq!(g.conductor_norm, BigInt::from(36));
    }

    #[test]
    fn tate_instar_and_multiplicative_mix() {
        // y^2 = x^3 - x^2 - 4x + 4: disc = 2304 = 2^8 3^2, conductor 24,
        // I1* at 2 (f = 3) and I2 at 3 (f = 1)
        let e = curve(-1, -4, 4);
        let d2 = tate_local(&e, &BigInt::from(2)).unwrap();
        assert_eq!(
            (d2.kodaira.clone(), d2.v_disc_min, d2.conductor_exp),
            (KodairaType::InStar(1), 8, 3)
        );
        let d3 = tate_local(&e, &BigInt::from(3)).unwrap();
        assert_eq!(
            (d3.kodaira.clone(), d3.v_disc_min, d3.conductor_exp),
            (KodairaType::In(2), 2, 1)
        );
        let budget = FactorBudget::default();
        let g = global_invariants(&e, &budget).unwrap();
        assert_eq!(g.disc_norm, BigInt::from(2304));
        assert_eq!(g.conductor_norm, BigInt::from(24));
    }

    #[test]
    fn tate_descales_to_odd_a1_model() {
        // the short model of the conductor-15 curve y^2 + xy + y = x^3 + x^2
        // is (5, 8, 16) with disc -2^12 * 15; the minimal model needs the
        // long form, so the 2-adic chain must descale all the way down
        let e = curve(5, 8, 16);
        assert_eq!(e.discriminant(), crate::curve::rat_i64(-61440));
        let d2 = tate_local(&e, &BigInt::from(2)).unwrap();
        assert_eq!((d2.v_disc_min, d2.conductor_exp), (0, 0));
        let budget = FactorBudget::default();
        let g = global_invariants(&e, &budget).unwrap();
        assert_eq!(g.disc_norm, BigInt::from(15));
        assert_eq!(g.conductor_norm, BigInt::from(15));
    }

    #[test]
    fn global_invariants_handle_rational_models() {
        // descaled 37 curve: (0, -1, 1/4)
        let budget = FactorBudget::default();
        let e = WeierstrassCurve::new(
            rat_i64(0),
            rat_i64(-1),
            BigRational::new(BigInt::from(1), BigInt::from(4)),
        )
        .unwrap();
        let g = global_invariants(&e, &budget).unwrap();
        assert_eq!(g.disc_norm, BigInt::from(37));
        assert_eq!(g.conductor_norm, BigInt::from(37));
    }

    #[test]
    fn tate_invariant_under_scaling() {
        let budget = FactorBudget::default();
        for (a, b, c) in [(0i64, -1, 0), (0, 0, 1), (1, -2, 1), (0, -4, 4)] {
            let e = curve(a, b, c);
            let base = global_invariants(&e, &budget).unwrap();
            for u in [2i64, 3, 6] {
                let t = crate::curve::ModelTransform::new(rat_i64(u)).unwrap();
                let scaled = t.apply_curve(&e);
                let g = global_invariants(&scaled, &budget).unwrap();
                assert_eq!(g.disc_norm, base.disc_norm, "u = {u} on ({a},{b},{c})");
                assert_eq!(g.conductor_norm, base.conductor_norm);
            }
        }
    }

    #[test]
    fn reduced_counts() {
        assert_eq!(reduced_point_count(&curve(0, 0, 1), 5).unwrap(), 6);
        assert_eq!(reduced_point_count(&curve(0, -1, 0), 5).unwrap(), 8);
        // singular model rejected
        assert!(reduced_point_count(&curve(0, -1, 0), 2).is_err());
    }

    #[test]
    fn reduced_counts_hasse_window() {
        for (a, b, c) in [(0i64, -1, 0), (0, 0, 1), (2, 3, 1), (1, -7, 3)] {
            let e = curve(a, b, c);
            let disc = e.discriminant().to_integer();
            for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 97] {
                if disc.is_multiple_of(&BigInt::from(p)) {
                    continue;
                }
                let n = reduced_point_count(&e, p).unwrap() as f64;
                let pf = p as f64;
                assert!((n - (pf + 1.0)).abs() <= 2.0 * pf.sqrt(), "p={p} n={n}");
                assert!(n <= 2.0 * pf + 1.0);
            }
        }
    }

    #[test]
    fn conductor_divides_disc_and_same_support() {
        let budget = FactorBudget::default();
        for (a, b, c) in [(0i64, -1, 0), (0, 0, 1), (0, -16, 16), (1, 1, 1), (2, -3, 1)] {
            let g = global_invariants(&curve(a, b, c), &budget).unwrap();
            assert!(g.disc_norm.is_multiple_of(&g.conductor_norm));
            // same support: omega(N(D)) = omega(N(F))
            let omega_disc = crate::arithmetic::factor(&g.disc_norm, &budget)
                .unwrap()
                .omega() as usize;
            assert_eq!(omega_disc, g.bad_primes.len());
            assert!(g.szpiro_ratio >= 1.0 - 1e-12);
            for l in &g.locals {
                assert!(l.v_disc_min >= l.conductor_exp);
                assert_eq!(l.conductor_exp == 0, l.kind == ReductionKind::Good);
                assert_eq!(l.conductor_exp == 1, l.kind == ReductionKind::Multiplicative);
            }
        }
    }
}
