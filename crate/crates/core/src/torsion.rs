//! Division polynomials, the exact torsion subgroup over Q, the
//! prime-order-torsion hypothesis test, the two-prime torsion bound, and
//! the 2-/3-torsion field degree analysis.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arithmetic::{factor, is_perfect_square, two_primes_not_dividing, FactorBudget};
use crate::curve::{rat_i64, CurvePoint, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::local::reduced_point_count;

/// Dense univariate polynomial over Q, ascending coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(pub Vec<BigRational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn constant(c: BigRational) -> Self {
        if c.is_zero() {
            Poly(vec![])
        } else {
            Poly(vec![c])
        }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly(coeffs.iter().map(|&c| rat_i64(c)).collect()).normalized()
    }

    fn normalized(mut self) -> Self {
        while self.0.last().map_or(false, |c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).normalized()
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in other.0.iter().enumerate() {
            out[i] -= b;
        }
        Poly(out).normalized()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in other.0.iter().enumerate() {
            out[i] += b;
        }
        Poly(out).normalized()
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        Poly(self.0.iter().map(|a| a * c).collect()).normalized()
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(BigRational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Primitive integer form: clears denominators and content.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let mut lcm = BigInt::one();
        for c in &self.0 {
            lcm = lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|c| (c * BigRational::from(lcm.clone())).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if g.is_zero() || g.is_one() {
            ints
        } else {
            ints.into_iter().map(|c| c / &g).collect()
        }
    }
}

/// psi_n data: for odd n the polynomial is psi_n itself; for even n it is
/// psi_n^2 / 4 = F * (psi_n / 2y)^2, so in both cases the roots are exactly
/// the x-coordinates of the nontrivial points killed by n.
#[derive(Debug, Clone)]
pub struct DivisionPolynomial {
    pub index: u32,
    pub poly: Poly,
}

impl DivisionPolynomial {
    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }
}

/// x-parts P_n of the division polynomials: psi_n = P_n for odd n and
/// psi_n = 2y * P_n for even n, with y^2 always replaced by F(x).
fn division_x_parts(e: &WeierstrassCurve, n: u32) -> Vec<Poly> {
    let (a, b, c) = e.coefficients();
    let b2 = rat_i64(4) * &a;
    let b4 = rat_i64(2) * &b;
    let b6 = rat_i64(4) * &c;
    let b8 = rat_i64(4) * &a * &c - &b * &b;
    let f = Poly(vec![c.clone(), b.clone(), a.clone(), BigRational::one()]);
    let f2_16 = f.mul(&f).scale(&rat_i64(16));

    let psi3 = Poly(vec![
        b8.clone(),
        rat_i64(3) * &b6,
        rat_i64(3) * &b4,
        b2.clone(),
        rat_i64(3),
    ]);
    let g4 = Poly(vec![
        &b4 * &b8 - &b6 * &b6,
        &b2 * &b8 - &b4 * &b6,
        rat_i64(10) * &b8,
        rat_i64(10) * &b6,
        rat_i64(5) * &b4,
        b2.clone(),
        rat_i64(2),
    ]);

    let mut parts: Vec<Poly> = Vec::with_capacity(n as usize + 3);
    parts.push(Poly::zero()); // P_0
    parts.push(Poly::constant(BigRational::one())); // P_1
    parts.push(Poly::constant(BigRational::one())); // P_2 ( = psi_2 / 2y )
    parts.push(psi3);
    parts.push(g4);
    for k in 5..=(n as usize).max(4) {
        let p = if k % 2 == 1 {
            let m = (k - 1) / 2;
            let t1 = parts[m + 2].mul(&parts[m].pow(3));
            let t2 = parts[m - 1].mul(&parts[m + 1].pow(3));
            if m % 2 == 0 {
                t1.mul(&f2_16).sub(&t2)
            } else {
                t1.sub(&t2.mul(&f2_16))
            }
        } else {
            let m = k / 2;
            let inner = parts[m + 2]
                .mul(&parts[m - 1].pow(2))
                .sub(&parts[m - 2].mul(&parts[m + 1].pow(2)));
            parts[m].mul(&inner)
        };
        parts.push(p);
    }
    parts
}

/// The n-th division polynomial in x-form (see `DivisionPolynomial`).
pub fn division_polynomial(e: &WeierstrassCurve, n: u32) -> Result<DivisionPolynomial> {
    if n < 2 {
        return Err(Error::Domain("division polynomial needs n >= 2".into()));
    }
    let parts = division_x_parts(e, n);
    let poly = if n % 2 == 1 {
        parts[n as usize].clone()
    } else {
        // psi_n^2 / 4 = F * g_n^2
        let (a, b, c) = e.coefficients();
        let f = Poly(vec![c, b, a, BigRational::one()]);
        f.mul(&parts[n as usize].pow(2))
    };
    Ok(DivisionPolynomial { index: n, poly })
}

/// Group structure of the rational torsion subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupStructure {
    Trivial,
    Cyclic(u64),
    /// Z/2 x Z/m with m even.
    Product(u64, u64),
}

#[derive(Debug, Clone)]
pub struct TorsionGroup {
    pub order: u64,
    pub structure: GroupStructure,
    pub generators: Vec<CurvePoint>,
    /// Every torsion point with its exact order, identity included.
    pub points: Vec<(CurvePoint, u64)>,
}

impl TorsionGroup {
    pub fn point_of_exact_order(&self, n: u64) -> Option<&CurvePoint> {
        self.points
            .iter()
            .filter(|(_, o)| *o == n)
            .min_by_key(|(p, _)| point_sort_key(p))
            .map(|(p, _)| p)
    }
}

/// Exact torsion subgroup: candidate orders from the gcd of reduced point
/// counts at good primes, candidate points from the integral-coordinate
/// criterion (torsion points on an integral model have integral x, y and
/// y^2 divides Res(F, duplication numerator)), orders verified by explicit
/// multiplication.
pub fn torsion_subgroup(e: &WeierstrassCurve, budget: &FactorBudget) -> Result<TorsionGroup> {
    let (ei, t) = e.integralize(budget)?;
    let disc = ei.discriminant().to_integer();

    // gcd of counts at a few good primes
    let mut bound: Option<u64> = None;
    let mut used = 0;
    let mut p = 2u64;
    while used < 4 && p < 1000 {
        if !disc.is_multiple_of(&BigInt::from(p)) {
            let count = reduced_point_count(&ei, p)?;
            bound = Some(match bound {
                None => count,
                Some(g) => g.gcd(&count),
            });
            used += 1;
        }
        p = next_prime(p);
    }
    let n_bound = bound.unwrap_or(0);
    if n_bound == 0 {
        return Err(Error::Inconsistency("no good primes below 1000".into()));
    }

    let mut points: Vec<(CurvePoint, u64)> = vec![(CurvePoint::Identity, 1)];
    if n_bound > 1 {
        let order_candidates: Vec<u64> = {
            let f = factor(&BigInt::from(n_bound), budget)?;
            let mut d: Vec<u64> = f.divisors().iter().filter_map(|d| d.to_u64()).collect();
            d.sort_unstable();
            d
        };
        for cand in torsion_candidate_points(&ei, budget)? {
            if !ei.contains(&cand) {
                continue;
            }
            // exact order is the least divisor of the gcd bound killing it
            let mut order = None;
            for &m in order_candidates.iter().skip(1) {
                if ei.multiply_unchecked(m as i64, &cand).is_identity() {
                    order = Some(m);
                    break;
                }
            }
            if let Some(o) = order {
                points.push((cand, o));
            }
        }
    }

    let order = points.len() as u64;
    let max_order = points.iter().map(|(_, o)| *o).max().unwrap_or(1);
    let two_torsion = points.iter().filter(|(_, o)| *o == 2).count();
    let structure = if order == 1 {
        GroupStructure::Trivial
    } else if order == max_order {
        GroupStructure::Cyclic(order)
    } else if two_torsion == 3 && order == 2 * max_order {
        GroupStructure::Product(2, max_order)
    } else {
        return Err(Error::Inconsistency(format!(
            "torsion points do not assemble into a group: order {order}, max {max_order}"
        )));
    };

    // generators on the integral model, then mapped back to the input model
    let back = t.inverse();
    let mut generators = Vec::new();
    if let Some((g, _)) = points
        .iter()
        .filter(|(_, o)| *o == max_order)
        .min_by_key(|(p, _)| point_sort_key(p))
    {
        if max_order > 1 {
            generators.push(g.clone());
        }
    }
    if let GroupStructure::Product(_, _) = structure {
        let g0 = generators[0].clone();
        let half = ei.multiply_unchecked(max_order as i64 / 2, &g0);
        if let Some((g, _)) = points
            .iter()
            .filter(|(p, o)| *o == 2 && *p != half)
            .min_by_key(|(p, _)| point_sort_key(p))
        {
            generators.push(g.clone());
        }
    }
    let generators = generators.iter().map(|g| back.apply_point(g)).collect();
    let points = points
        .into_iter()
        .map(|(p, o)| (back.apply_point(&p), o))
        .collect();

    Ok(TorsionGroup {
        order,
        structure,
        generators,
        points,
    })
}

fn point_sort_key(p: &CurvePoint) -> (BigRational, BigRational, BigRational, bool) {
    match p {
        CurvePoint::Identity => (
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
            false,
        ),
        CurvePoint::Affine { x, y } => (x.abs(), x.clone(), y.abs(), y.is_negative()),
    }
}

fn next_prime(p: u64) -> u64 {
    let mut q = p + 1;
    loop {
        if crate::arithmetic::is_prime(&BigInt::from(q)) {
            return q;
        }
        q += 1;
    }
}

/// Candidate torsion points on an integral model: y = 0 with integral roots
/// of F, or y^2 dividing Res(F, phi) with phi the duplication numerator.
fn torsion_candidate_points(e: &WeierstrassCurve, budget: &FactorBudget) -> Result<Vec<CurvePoint>> {
    let (a, b, c) = e.coefficients();
    let (ai, bi, ci) = (a.to_integer(), b.to_integer(), c.to_integer());
    let mut out = Vec::new();

    // 2-torsion: integer roots of F
    for x in integer_roots_monic_cubic(&ai, &bi, &(ci.clone())) {
        out.push(CurvePoint::affine(
            BigRational::from(x),
            BigRational::zero(),
        ));
    }

    // Res(F, phi) with phi = x^4 - 2b x^2 - 8c x + (b^2 - 4ac)
    let f = vec![ci.clone(), bi.clone(), ai.clone(), BigInt::one()];
    let phi = vec![
        &bi * &bi - BigInt::from(4) * &ai * &ci,
        BigInt::from(-8) * &ci,
        BigInt::from(-2) * &bi,
        BigInt::zero(),
        BigInt::one(),
    ];
    let res = resultant_integer(&f, &phi);
    if res.is_zero() {
        return Err(Error::Inconsistency(
            "vanishing torsion resultant on a nonsingular curve".into(),
        ));
    }
    for y in factor(&res, budget)?.square_divisors() {
        let y2 = &y * &y;
        let shifted_c = &ci - &y2;
        for x in integer_roots_monic_cubic(&ai, &bi, &shifted_c) {
            out.push(CurvePoint::affine(
                BigRational::from(x.clone()),
                BigRational::from(y.clone()),
            ));
            out.push(CurvePoint::affine(BigRational::from(x), BigRational::from(-&y)));
        }
    }
    out.sort_by_key(point_sort_key);
    out.dedup();
    Ok(out)
}

/// Integer roots of x^3 + a x^2 + b x + c, by rounding the real roots and
/// verifying exactly.
fn integer_roots_monic_cubic(a: &BigInt, b: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let af = big_to_f64(a);
    let bf = big_to_f64(b);
    let cf = big_to_f64(c);
    let eval_exact = |x: &BigInt| -> BigInt { ((x + a) * x + b) * x + c };
    let mut out = Vec::new();
    for r in real_roots_cubic(af, bf, cf) {
        let base = r.round() as i64;
        for dx in -2i64..=2 {
            let cand = BigInt::from(base + dx);
            if eval_exact(&cand).is_zero() && !out.contains(&cand) {
                out.push(cand);
            }
        }
    }
    out.sort();
    out
}

fn big_to_f64(n: &BigInt) -> f64 {
    n.to_f64().unwrap_or(if n.is_negative() {
        f64::MIN
    } else {
        f64::MAX
    })
}

/// Real roots of x^3 + a x^2 + b x + c (approximate, for bracketing only).
fn real_roots_cubic(a: f64, b: f64, c: f64) -> Vec<f64> {
    let eval = |x: f64| ((x + a) * x + b) * x + c;
    let bound = 1.0 + a.abs().max(b.abs()).max(c.abs());
    // critical points of the cubic
    let mut cuts = vec![-bound];
    let disc = 4.0 * a * a - 12.0 * b;
    if disc > 0.0 {
        let s = disc.sqrt();
        let mut t1 = (-2.0 * a - s) / 6.0;
        let mut t2 = (-2.0 * a + s) / 6.0;
        if t1 > t2 {
            std::mem::swap(&mut t1, &mut t2);
        }
        if t1 > -bound && t1 < bound {
            cuts.push(t1);
        }
        if t2 > -bound && t2 < bound {
            cuts.push(t2);
        }
    }
    cuts.push(bound);
    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (eval(lo), eval(hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo * fhi > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = eval(mid);
            if fm == 0.0 {
                break;
            }
            if flo * fm < 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots
}

/// Univariate resultant over Z by fraction-free Gaussian elimination on the
/// Sylvester matrix. Coefficients ascending.
pub(crate) fn resultant_integer(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    let mut mat = vec![vec![BigRational::zero(); size]; size];
    for row in 0..n {
        for (i, coeff) in f.iter().enumerate() {
            mat[row][row + (m - i)] = BigRational::from(coeff.clone());
        }
    }
    for row in 0..m {
        for (i, coeff) in g.iter().enumerate() {
            mat[n + row][row + (n - i)] = BigRational::from(coeff.clone());
        }
    }
    crate::heights::determinant(mat).to_integer()
}

/// Hypothesis test of the main theorems: does E have a rational point of
/// exact order ell? Returns the witness with smallest |x|.
pub fn has_rational_ell_torsion(
    e: &WeierstrassCurve,
    ell: u32,
    budget: &FactorBudget,
) -> Result<(bool, Option<CurvePoint>)> {
    if !crate::arithmetic::is_prime(&BigInt::from(ell)) {
        return Err(Error::Domain(format!("ell = {ell} is not prime")));
    }
    let tors = torsion_subgroup(e, budget)?;
    match tors.point_of_exact_order(ell as u64) {
        Some(p) => Ok((true, Some(p.clone()))),
        None => Ok((false, None)),
    }
}

/// Two-prime torsion bound (2p+1)(2q+1) plus the c10 (log B)^{2d} envelope.
#[derive(Debug, Clone)]
pub struct TorsionCardinalityBound {
    pub pair: (u64, u64),
    pub product_bound: BigInt,
    pub envelope: f64,
}

pub fn torsion_cardinality_bound(
    e: &WeierstrassCurve,
    log_b: f64,
    budget: &FactorBudget,
) -> Result<TorsionCardinalityBound> {
    let h_e = crate::heights::curve_height(e).value;
    if log_b < h_e.max(std::f64::consts::E) {
        return Err(Error::Domain(format!(
            "need log B >= max(h(E), e) = {}, got {log_b}",
            h_e.max(std::f64::consts::E)
        )));
    }
    let (ei, _) = e.integralize(budget)?;
    let disc = ei.discriminant().to_integer().abs();
    let (p, q) = two_primes_not_dividing(&disc)?;
    let product = BigInt::from(2 * p + 1) * BigInt::from(2 * q + 1);
    // c10 = (2 c8 c1 + 1/e)^2 over Q, c11-style envelope c10 (log B)^2
    let c1 = crate::pipeline::c1_of_field(&crate::rank::FieldParams::rationals(2));
    let c10 = (2.0 * crate::arithmetic::PRIME_PAIR_C * c1 + (-1.0f64).exp()).powi(2);
    let envelope = c10 * log_b * log_b;
    Ok(TorsionCardinalityBound {
        pair: (p, q),
        product_bound: product,
        envelope,
    })
}

/// Unique (x0, A1, A2) with F(x) = (x - x0)^3 + (A1 x + A2)^2 and
/// y0 = A1 x0 + A2, given a rational point of exact order 3.
pub fn three_torsion_decomposition(
    e: &WeierstrassCurve,
    p3: &CurvePoint,
) -> Result<(BigRational, BigRational, BigRational)> {
    let (x0, y0) = match p3 {
        CurvePoint::Affine { x, y } => (x.clone(), y.clone()),
        CurvePoint::Identity => {
            return Err(Error::Inconsistency("identity is not of order 3".into()))
        }
    };
    if !e.contains(p3) {
        return Err(Error::Domain("point is not on the curve".into()));
    }
    // order 3 iff 2 P = -P and P != O
    let doubled = e.multiply_unchecked(2, p3);
    if doubled != e.negate_unchecked(p3) {
        return Err(Error::Inconsistency("point is not of exact order 3".into()));
    }
    let (a, b, c) = e.coefficients();
    // coefficient match: A1^2 = a + 3 x0, 2 A1 A2 = b - 3 x0^2, A2^2 = c + x0^3
    let a1_sq = &a + rat_i64(3) * &x0;
    let a1 = rational_sqrt(&a1_sq).ok_or_else(|| {
        Error::Inconsistency("a + 3 x0 is not a rational square".into())
    })?;
    let (a1, a2) = if a1.is_zero() {
        (BigRational::zero(), y0.clone())
    } else {
        let a2 = (&b - rat_i64(3) * &x0 * &x0) / (rat_i64(2) * &a1);
        if &a1 * &x0 + &a2 == y0 {
            (a1, a2)
        } else {
            (-a1.clone(), -a2)
        }
    };
    if &a1 * &x0 + &a2 != y0 {
        return Err(Error::Inconsistency(
            "no sign choice satisfies y0 = A1 x0 + A2".into(),
        ));
    }
    // exact expansion check
    let lin = Poly(vec![a2.clone(), a1.clone()]);
    let shift = Poly(vec![-x0.clone(), BigRational::one()]);
    let expanded = shift.pow(3).add(&lin.mul(&lin));
    let f_poly = Poly(vec![c, b, a, BigRational::one()]);
    if expanded != f_poly {
        return Err(Error::Inconsistency(
            "decomposition identity failed exact expansion".into(),
        ));
    }
    Ok((x0, a1, a2))
}

/// sqrt of a nonnegative rational when it is an exact square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = is_perfect_square(q.numer())?;
    let d = is_perfect_square(q.denom())?;
    Some(BigRational::new(n, d))
}

/// The cubic factor Psi of psi_3 = (x - x0) Psi from the 3-torsion family.
pub fn three_torsion_cubic(
    x0: &BigRational,
    a1: &BigRational,
    a2: &BigRational,
) -> Poly {
    let a1sq4 = rat_i64(4) * a1 * a1;
    let a1a2_12 = rat_i64(12) * a1 * a2;
    Poly(vec![
        &a1sq4 * x0 * x0 + &a1a2_12 * x0 - rat_i64(3) * x0 * x0 * x0 + rat_i64(12) * a2 * a2,
        &a1sq4 * x0 + a1a2_12 + rat_i64(9) * x0 * x0,
        &a1sq4 - rat_i64(9) * x0,
        rat_i64(3),
    ])
    .normalized()
}

/// Field degree data of K_ell = Q(E[ell]) over k' (k' = Q for ell = 2,
/// Q(sqrt(-3)) for ell = 3).
#[derive(Debug, Clone)]
pub struct TorsionFieldInfo {
    pub ell: u32,
    /// [K_ell : k'], always 1 or ell.
    pub degree: u32,
    pub base_field: String,
    pub witness: String,
}

/// The degree dichotomy: for ell = 2 factor F = (x - x0) F1 and test
/// disc(F1) for squareness; for ell = 3 the cubic Psi lies in a quadratic
/// field only if it has a rational root, so a rational-root test decides.
pub fn torsion_field_degree(
    e: &WeierstrassCurve,
    ell: u32,
    budget: &FactorBudget,
) -> Result<TorsionFieldInfo> {
    if ell != 2 && ell != 3 {
        return Err(Error::Unsupported(format!(
            "torsion field degree is only computed for ell in {{2, 3}}, got {ell}"
        )));
    }
    let (has, witness) = has_rational_ell_torsion(e, ell, budget)?;
    if !has {
        return Err(Error::Precondition(format!(
            "curve has no rational {ell}-torsion point"
        )));
    }
    let w = witness.unwrap();
    if ell == 2 {
        let x0 = w.x().unwrap().clone();
        let (a, b, _) = e.coefficients();
        // F = (x - x0)(x^2 + p x + q), p = a + x0, q = b + x0(a + x0)
        let p = &a + &x0;
        let q = &b + &x0 * &p;
        let disc = &p * &p - rat_i64(4) * &q;
        if rational_sqrt(&disc).is_some() {
            Ok(TorsionFieldInfo {
                ell: 2,
                degree: 1,
                base_field: "Q".into(),
                witness: format!("disc(F1) = {disc} is a rational square"),
            })
        } else {
            let m = squarefree_part(&disc, budget)?;
            Ok(TorsionFieldInfo {
                ell: 2,
                degree: 2,
                base_field: "Q".into(),
                witness: format!("K2 = Q(sqrt({m})), disc(F1) = {disc}"),
            })
        }
    } else {
        let (x0, a1, a2) = three_torsion_decomposition(e, &w)?;
        let psi = three_torsion_cubic(&x0, &a1, &a2);
        let has_root = rational_root_exists(&psi, budget)?;
        if has_root {
            Ok(TorsionFieldInfo {
                ell: 3,
                degree: 1,
                base_field: "Q(sqrt(-3))".into(),
                witness: "Psi has a rational root".into(),
            })
        } else {
            Ok(TorsionFieldInfo {
                ell: 3,
                degree: 3,
                base_field: "Q(sqrt(-3))".into(),
                witness: "Psi is irreducible over Q (no rational root)".into(),
            })
        }
    }
}

/// Squarefree part of a nonzero rational, as a signed integer: the unique
/// squarefree m with q = m * (square).
pub fn squarefree_part(q: &BigRational, budget: &FactorBudget) -> Result<BigInt> {
    if q.is_zero() {
        return Err(Error::Domain("squarefree part of zero".into()));
    }
    // q = n/d; squarefree part of n*d (same class modulo squares)
    let nd = q.numer() * q.denom();
    let f = factor(&nd, budget)?;
    let mut m = BigInt::one();
    for (p, e) in &f.factors {
        if e % 2 == 1 {
            m *= p;
        }
    }
    if f.negative {
        m = -m;
    }
    Ok(m)
}

/// Does a polynomial with rational coefficients have a rational root?
fn rational_root_exists(p: &Poly, budget: &FactorBudget) -> Result<bool> {
    let ints = p.primitive_integer();
    if ints.is_empty() {
        return Ok(true);
    }
    // strip zero roots
    let mut ints = ints;
    while ints.first().map_or(false, |c| c.is_zero()) {
        ints.remove(0);
        if ints.len() <= 1 {
            return Ok(true);
        }
    }
    if ints.len() == 1 {
        return Ok(false);
    }
    let c0 = ints.first().unwrap().clone();
    let cn = ints.last().unwrap().clone();
    let eval = |x: &BigRational| -> BigRational {
        let mut acc = BigRational::zero();
        for c in ints.iter().rev() {
            acc = acc * x + BigRational::from(c.clone());
        }
        acc
    };
    for num in factor(&c0, budget)?.divisors() {
        for den in factor(&cn, budget)?.divisors() {
            for sign in [1i64, -1] {
                let cand = BigRational::new(&num * BigInt::from(sign), den.clone());
                if eval(&cand).is_zero() {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(a: i64, b: i64, c: i64) -> WeierstrassCurve {
        WeierstrassCurve::from_i64(a, b, c).unwrap()
    }

    fn budget() -> FactorBudget {
        FactorBudget::default()
    }

    #[test]
    fn psi3_closed_forms() {
        let d = division_polynomial(&curve(0, -1, 0), 3).unwrap();
        assert_eq!(d.poly, Poly::from_i64(&[-1, 0, -6, 0, 3]));
        let d = division_polynomial(&curve(0, 0, 1), 3).unwrap();
        assert_eq!(d.poly, Poly::from_i64(&[0, 12, 0, 0, 3]));
    }

    #[test]
    fn psi2_is_f() {
        let d = division_polynomial(&curve(0, 0, 1), 2).unwrap();
        assert_eq!(d.poly, Poly::from_i64(&[1, 0, 0, 1]));
        // roots over Q: x = -1 only
        assert!(d.poly.eval(&rat_i64(-1)).is_zero());
    }

    #[test]
    fn psi_degrees_follow_the_square_law() {
        let e = curve(1, -2, 3);
        for n in [3u32, 5, 7, 9] {
            let d = division_polynomial(&e, n).unwrap();
            assert_eq!(d.degree(), ((n * n - 1) / 2) as usize, "n = {n}");
        }
    }

    #[test]
    fn psi_roots_vanish_on_small_torsion() {
        // (2,3) has order 6 on y^2 = x^3 + 1; 2*(2,3) = (0,1) has order 3
        let e = curve(0, 0, 1);
        let psi3 = division_polynomial(&e, 3).unwrap();
        assert!(psi3.poly.eval(&rat_i64(0)).is_zero());
        let psi6 = division_polynomial(&e, 6).unwrap();
        assert!(psi6.poly.eval(&rat_i64(2)).is_zero());
    }

    #[test]
    fn torsion_of_32a_is_klein_four() {
        let t = torsion_subgroup(&curve(0, -1, 0), &budget()).unwrap();
        assert_eq!(t.order, 4);
        assert_eq!(t.structure, GroupStructure::Product(2, 2));
    }

    #[test]
    fn torsion_of_36a_is_z6() {
        let t = torsion_subgroup(&curve(0, 0, 1), &budget()).unwrap();
        assert_eq!(t.order, 6);
        assert_eq!(t.structure, GroupStructure::Cyclic(6));
        let g = &t.generators[0];
        let e = curve(0, 0, 1);
        let twice = e.multiply_unchecked(2, g);
        // 2*(2,3) = (0,1) up to sign of the chosen generator
        assert_eq!(twice.x().unwrap(), &rat_i64(0));
        assert!(t.point_of_exact_order(6).is_some());
        assert!(t
            .points
            .iter()
            .any(|(p, o)| *o == 6 && p.x().unwrap() == &rat_i64(2)));
    }

    #[test]
    fn torsion_of_37a_is_trivial() {
        let t = torsion_subgroup(&curve(0, -16, 16), &budget()).unwrap();
        assert_eq!(t.order, 1);
        assert_eq!(t.structure, GroupStructure::Trivial);
    }

    #[test]
    fn torsion_with_order_three_and_four() {
        // y^2 = x^3 + 4: Z/3 generated by (0, 2)
        let t = torsion_subgroup(&curve(0, 0, 4), &budget()).unwrap();
        assert_eq!(t.order, 3);
        // y^2 = x^3 + 4x: Z/4 generated by (2, 4)
        let t = torsion_subgroup(&curve(0, 4, 0), &budget()).unwrap();
        assert_eq!(t.order, 4);
        assert_eq!(t.structure, GroupStructure::Cyclic(4));
    }

    #[test]
    fn ell_torsion_hypothesis_examples() {
        let b = budget();
        let (has, w) = has_rational_ell_torsion(&curve(0, -1, 0), 2, &b).unwrap();
        assert!(has);
        assert_eq!(w.unwrap(), CurvePoint::affine(rat_i64(0), rat_i64(0)));
        let (has, w) = has_rational_ell_torsion(&curve(0, 0, 1), 3, &b).unwrap();
        assert!(has);
        assert_eq!(w.unwrap(), CurvePoint::affine(rat_i64(0), rat_i64(1)));
        let (has, _) = has_rational_ell_torsion(&curve(0, -1, 0), 5, &b).unwrap();
        assert!(!has);
        assert!(has_rational_ell_torsion(&curve(0, -1, 0), 4, &b).is_err());
    }

    #[test]
    fn cardinality_bound_examples() {
        let b = budget();
        let t = torsion_cardinality_bound(&curve(0, -1, 0), 10.0, &b).unwrap();
        assert_eq!(t.pair, (3, 5));
        assert_eq!(t.product_bound, BigInt::from(77));
        // actual torsion 4 <= 77
        assert!(BigInt::from(4) <= t.product_bound);
        let t = torsion_cardinality_bound(&curve(0, 0, 1), 10.0, &b).unwrap();
        assert_eq!(t.pair, (5, 7));
        assert_eq!(t.product_bound, BigInt::from(165));
        // precondition gate
        assert!(torsion_cardinality_bound(&curve(0, -1, 0), 2.0, &b).is_err());
    }

    #[test]
    fn three_torsion_decomposition_examples() {
        let e = curve(0, 0, 1);
        let p3 = CurvePoint::affine(rat_i64(0), rat_i64(1));
        let (x0, a1, a2) = three_torsion_decomposition(&e, &p3).unwrap();
        assert_eq!((x0.clone(), a1.clone(), a2.clone()), (rat_i64(0), rat_i64(0), rat_i64(1)));
        // Psi = 3x^3 + 12, and psi_3 = x * Psi
        let psi = three_torsion_cubic(&x0, &a1, &a2);
        assert_eq!(psi, Poly::from_i64(&[12, 0, 0, 3]));
        let psi3 = division_polynomial(&e, 3).unwrap().poly;
        assert_eq!(Poly::from_i64(&[0, 1]).mul(&psi), psi3);
        // y0 = A1 x0 + A2
        assert_eq!(&a1 * &x0 + &a2, rat_i64(1));
        // non order-3 input rejected
        let bad = CurvePoint::affine(rat_i64(2), rat_i64(3));
        assert!(three_torsion_decomposition(&e, &bad).is_err());
    }

    #[test]
    fn field_degree_examples() {
        let b = budget();
        let info = torsion_field_degree(&curve(0, -1, 0), 2, &b).unwrap();
        assert_eq!(info.degree, 1);
        let info = torsion_field_degree(&curve(0, 1, 0), 2, &b).unwrap();
        assert_eq!(info.degree, 2);
        assert!(info.witness.contains("sqrt(-1)"));
        let info = torsion_field_degree(&curve(0, 0, 1), 3, &b).unwrap();
        assert_eq!(info.degree, 3);
        assert!(torsion_field_degree(&curve(0, -1, 0), 5, &b).is_err());
    }

    #[test]
    fn torsion_order_divides_good_counts() {
        let b = budget();
        for (a, bb, c) in [(0i64, -1, 0), (0, 0, 1), (0, 0, 4), (0, 4, 0)] {
            let e = curve(a, bb, c);
            let t = torsion_subgroup(&e, &b).unwrap();
            let disc = e.discriminant().to_integer();
            for p in [5u64, 7, 11, 13, 17, 19, 23] {
                if disc.is_multiple_of(&BigInt::from(p)) || (2 * t.order).is_multiple_of(p) {
                    continue;
                }
                let n = reduced_point_count(&e, p).unwrap();
                assert_eq!(n % t.order, 0, "order {} vs count {n} at p={p}", t.order);
            }
        }
    }

    #[test]
    fn squarefree_parts() {
        let b = budget();
        assert_eq!(squarefree_part(&rat_i64(-4), &b).unwrap(), BigInt::from(-1));
        assert_eq!(squarefree_part(&rat_i64(12), &b).unwrap(), BigInt::from(3));
        assert_eq!(
            squarefree_part(&BigRational::new(BigInt::from(-3), BigInt::from(4)), &b).unwrap(),
            BigInt::from(-3)
        );
    }
}
