//! Empirical sweeps of the inequality lemmas, the independent oracles used
//! by the acceptance suite (exact doubling, finite-field brute force), and
//! the fixture corpus.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arithmetic::{sieve_primes, FactorBudget, ROBIN_C};
use crate::curve::{ceil_max_inequality, rat_i64, CurvePoint, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::heights::point_x_height;
use crate::pipeline::{covering_count, f_bound_check, polylog_to_exponent};

#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    pub name: String,
    pub cases: u64,
    pub violations: u64,
    pub detail: String,
}

impl SweepOutcome {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

/// Ball-covering sweep: random lattices of rank <= 3, packing radius from
/// the shortest vector, then count(B(0,R)) <= (1 + 2R/rho)^r.
pub fn sweep_ball_covering(n_lattices: u32, seed: u64) -> SweepOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    let mut violations = 0;
    let mut detail = String::new();
    for _ in 0..n_lattices {
        let r = rng.gen_range(1..=3usize);
        // random basis with a reasonable condition number
        let basis: Vec<Vec<f64>> = loop {
            let b: Vec<Vec<f64>> = (0..r)
                .map(|_| (0..r).map(|_| rng.gen_range(-5.0f64..5.0)).collect())
                .collect();
            if det(&b).abs() > 0.5 {
                break b;
            }
        };
        let inv = invert(&basis);
        let norm = |coeffs: &[i64]| -> f64 {
            (0..r)
                .map(|j| {
                    let v: f64 = (0..r).map(|i| coeffs[i] as f64 * basis[i][j]).sum();
                    v * v
                })
                .sum::<f64>()
                .sqrt()
        };
        // shortest vector within a provably sufficient coefficient box
        let mut lambda1 = f64::INFINITY;
        for coeffs in coeff_box(r, 8) {
            if coeffs.iter().all(|&c| c == 0) {
                continue;
            }
            lambda1 = lambda1.min(norm(&coeffs));
        }
        // any shorter vector would have coefficients within lambda1 * |B^-1| rows
        let row_bound = inv
            .iter()
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        let m = (lambda1 * row_bound).ceil() as i64 + 1;
        if m > 8 {
            for coeffs in coeff_box(r, m) {
                if coeffs.iter().all(|&c| c == 0) {
                    continue;
                }
                lambda1 = lambda1.min(norm(&coeffs));
            }
        }
        let rho = lambda1 * 0.99;
        let radius = rng.gen_range(0.5 * lambda1..6.0 * lambda1);
        let mr = (radius * row_bound).ceil() as i64 + 1;
        let mut count = 0u64;
        for coeffs in coeff_box(r, mr) {
            if norm(&coeffs) <= radius {
                count += 1;
            }
        }
        cases += 1;
        let cover = covering_count(radius, rho, r as u32).unwrap_or(u64::MAX);
        if count > cover {
            violations += 1;
            detail = format!("rank {r}: count {count} > cover {cover}");
        }
    }
    SweepOutcome {
        name: "ball_covering".into(),
        cases,
        violations,
        detail,
    }
}

fn coeff_box(rank: usize, m: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..rank {
        let mut next = Vec::new();
        for prefix in &out {
            for v in -m..=m {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => unreachable!(),
    }
}

fn invert(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let d = det(m);
    match n {
        1 => vec![vec![1.0 / m[0][0]]],
        2 => vec![
            vec![m[1][1] / d, -m[0][1] / d],
            vec![-m[1][0] / d, m[0][0] / d],
        ],
        3 => {
            let mut out = vec![vec![0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    let (a, b, c, e) = (
                        m[(j + 1) % 3][(i + 1) % 3],
                        m[(j + 1) % 3][(i + 2) % 3],
                        m[(j + 2) % 3][(i + 1) % 3],
                        m[(j + 2) % 3][(i + 2) % 3],
                    );
                    out[i][j] = (a * e - b * c) / d;
                }
            }
            out
        }
        _ => unreachable!(),
    }
}

/// Exhaustive ceiling-inequality sweep over alpha in [-6,6]^2, n in {2,4,6}^2.
pub fn sweep_ceil_max() -> SweepOutcome {
    let mut cases = 0;
    let mut violations = 0;
    for a1 in -6..=6i64 {
        for a2 in -6..=6i64 {
            for n1 in [2u64, 4, 6] {
                for n2 in [2u64, 4, 6] {
                    cases += 1;
                    let (lhs, rhs) = ceil_max_inequality(&[a1, a2], &[n1, n2]).unwrap();
                    if lhs > rhs {
                        violations += 1;
                    }
                }
            }
        }
    }
    SweepOutcome {
        name: "ceil_max_inequality".into(),
        cases,
        violations,
        detail: String::new(),
    }
}

/// Polylog-to-exponent sweep: C1 (log B)^C2 <= B^(C3/log log B) in log
/// space, over the C1 >= 1 regime the chain actually uses.
pub fn sweep_polylog(points: u32, seed: u64) -> SweepOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    let mut violations = 0;
    let e = std::f64::consts::E;
    for _ in 0..points {
        let c1: f64 = 10f64.powf(rng.gen_range(0.0..3.0));
        let c2: f64 = rng.gen_range(0.0..10.0);
        let c3 = polylog_to_exponent(c1, c2).unwrap();
        for log_b in [e, 3.0, 5.0, 10.0, 50.0, 1e4] {
            cases += 1;
            let lhs = c1.ln() + c2 * log_b.ln().ln();
            let rhs = c3 * log_b / log_b.ln();
            if lhs > rhs + 1e-9 {
                violations += 1;
            }
        }
    }
    SweepOutcome {
        name: "polylog_to_exponent".into(),
        cases,
        violations,
        detail: String::new(),
    }
}

/// f(x) <= (16/e^2) log B / log log B sweep.
pub fn sweep_f_bound(points: u32, seed: u64) -> SweepOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = std::f64::consts::E;
    let mut cases = 0;
    let mut violations = 0;
    for _ in 0..points {
        let log_b: f64 = 10f64.powf(rng.gen_range(0.44..8.0));
        let x: f64 = rng.gen_range(e..(2.0 * log_b).max(e + 1.0));
        let (f, envelope) = f_bound_check(x, log_b).unwrap();
        cases += 1;
        if f > envelope + 1e-9 {
            violations += 1;
        }
    }
    SweepOutcome {
        name: "f_envelope".into(),
        cases,
        violations,
        detail: String::new(),
    }
}

/// Rosser–Schoenfeld sweep: pi(x) > x / log x for 17 <= x <= limit.
pub fn sweep_rosser(limit: u64) -> SweepOutcome {
    let primes = sieve_primes(limit);
    let mut is_prime_at = vec![false; limit as usize + 1];
    for &p in &primes {
        is_prime_at[p as usize] = true;
    }
    let mut cases = 0;
    let mut violations = 0;
    let mut pi = 0u64;
    for x in 2..=limit {
        if is_prime_at[x as usize] {
            pi += 1;
        }
        if x >= 17 {
            cases += 1;
            if (pi as f64) <= (x as f64) / (x as f64).ln() {
                violations += 1;
            }
        }
    }
    SweepOutcome {
        name: "rosser_pi_lower".into(),
        cases,
        violations,
        detail: String::new(),
    }
}

/// Robin sweep: omega(n) <= 1.3841 log n / log log n for 3 <= n <= limit.
pub fn sweep_robin(limit: u64) -> SweepOutcome {
    let n = limit as usize;
    let mut omega = vec![0u8; n + 1];
    for p in 2..=n {
        if omega[p] == 0 {
            let mut j = p;
            while j <= n {
                omega[j] += 1;
                j += p;
            }
        }
    }
    let mut cases = 0;
    let mut violations = 0;
    for k in 3..=n {
        cases += 1;
        let bound = ROBIN_C * (k as f64).ln() / (k as f64).ln().ln();
        if omega[k] as f64 > bound {
            violations += 1;
        }
    }
    SweepOutcome {
        name: "robin_omega_upper".into(),
        cases,
        violations,
        detail: String::new(),
    }
}

/// Division-polynomial oracle: F_p roots of psi_3 match the x-coordinates
/// of order-3 points found by brute force over F_p.
pub fn sweep_division_poly_oracle(samples: u32, seed: u64) -> SweepOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes: Vec<u64> = sieve_primes(101).into_iter().filter(|&p| p > 3).collect();
    let mut cases = 0;
    let mut violations = 0;
    let mut detail = String::new();
    while cases < samples as u64 {
        let a = rng.gen_range(-5i64..=5);
        let b = rng.gen_range(-5i64..=5);
        let c = rng.gen_range(-5i64..=5);
        let e = match WeierstrassCurve::from_i64(a, b, c) {
            Ok(e) => e,
            Err(_) => continue,
        };
        let p = primes[rng.gen_range(0..primes.len())];
        let disc = e.discriminant().to_integer();
        if (BigInt::from(6) * &disc % BigInt::from(p)).is_zero() {
            continue;
        }
        cases += 1;
        let psi_roots = fp_division_poly_roots(&e, 3, p).unwrap();
        let brute = fp_order3_x_coords(&e, p);
        if psi_roots != brute {
            violations += 1;
            detail = format!("({a},{b},{c}) mod {p}: psi {psi_roots:?} vs brute {brute:?}");
        }
    }
    SweepOutcome {
        name: "division_poly_oracle".into(),
        cases,
        violations,
        detail,
    }
}

pub fn run_all(seed: u64) -> Vec<SweepOutcome> {
    vec![
        sweep_ball_covering(100, seed),
        sweep_ceil_max(),
        sweep_polylog(1000, seed ^ 1),
        sweep_f_bound(100, seed ^ 2),
        sweep_rosser(100_000),
        sweep_robin(1_000_000),
        sweep_division_poly_oracle(50, seed ^ 3),
    ]
}

/// Exact doubling oracle: h_x([2^n] P) / 4^n by repeated exact duplication.
/// Independent of the certified float path (pure rational group law).
pub fn doubling_oracle(e: &WeierstrassCurve, p: &CurvePoint, n_steps: u32) -> Result<f64> {
    if n_steps > 14 {
        return Err(Error::Resource(
            "exact doubling oracle is capped at 14 steps".into(),
        ));
    }
    let mut q = p.clone();
    for _ in 0..n_steps {
        if q.is_identity() {
            return Ok(0.0);
        }
        q = e.add_unchecked(&q, &q);
    }
    Ok(point_x_height(&q).value / 4f64.powi(n_steps as i32))
}

/// x-coordinates (as residues) of the order-3 points above x in F_p, by
/// brute-force group enumeration over F_p on the curve and on its
/// quadratic twist. The twist matters: a root x0 of psi_3 mod p carries an
/// order-3 point with y in F_{p^2} whenever F(x0) is a non-residue, and
/// those points form the twist's F_p-group.
pub fn fp_order3_x_coords(e: &WeierstrassCurve, p: u64) -> Vec<u64> {
    let a = modp(e.a(), p);
    let b = modp(e.b(), p);
    let c = modp(e.c(), p);
    let mut out = fp_order3_direct(a, b, c, p);
    // smallest quadratic non-residue
    let mut sq = vec![false; p as usize];
    for y in 0..p {
        sq[((y * y) % p) as usize] = true;
    }
    let d = (2..p).find(|&d| !sq[d as usize]).unwrap_or(p - 1);
    // twist model y^2 = x^3 + ad x^2 + bd^2 x + cd^3, points at X = d x
    let (ad, bd, cd) = (a * d % p, b * d % p * d % p, c * d % p * d % p * d % p);
    let dinv = pow_mod(d, p - 2, p);
    for x_twist in fp_order3_direct(ad, bd, cd, p) {
        out.push(x_twist * dinv % p);
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn fp_order3_direct(a: u64, b: u64, c: u64, p: u64) -> Vec<u64> {
    let fx = |x: u64| -> u64 {
        (((x * x % p * x) % p) + a * x % p * x % p + b * x % p + c) % p
    };
    let mut sq = vec![None::<u64>; p as usize];
    for y in 0..p {
        sq[((y * y) % p) as usize] = Some(y);
    }
    let mut out = Vec::new();
    for x in 0..p {
        if let Some(y) = sq[fx(x) as usize] {
            if y == 0 {
                continue; // 2-torsion
            }
            if let Some((x2, y2)) = fp_double_raw(a, b, p, x, y) {
                if x2 == x && (y2 + y) % p == 0 {
                    out.push(x);
                }
            }
        }
    }
    out
}

fn fp_double_raw(a: u64, b: u64, p: u64, x: u64, y: u64) -> Option<(u64, u64)> {
    if y == 0 {
        return None;
    }
    // lambda = (3x^2 + 2ax + b) / 2y
    let num = (3 * x % p * x % p + 2 * a % p * x % p + b) % p;
    let den = 2 * y % p;
    let lam = num * pow_mod(den, p - 2, p) % p;
    let x2 = (lam * lam % p + p - a % p + 2 * p - 2 * x % p) % p;
    let y2 = (lam * ((x + p - x2) % p) % p + p - y) % p;
    Some((x2, y2))
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

fn modp(x: &BigRational, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let num = num_integer::Integer::mod_floor(x.numer(), &pb).to_u64().unwrap();
    let den = num_integer::Integer::mod_floor(x.denom(), &pb).to_u64().unwrap();
    num * pow_mod(den, p - 2, p) % p
}

/// F_p roots of the n-th division polynomial (x-form).
pub fn fp_division_poly_roots(e: &WeierstrassCurve, n: u32, p: u64) -> Result<Vec<u64>> {
    let d = crate::torsion::division_polynomial(e, n)?;
    let coeffs: Vec<u64> = d
        .poly
        .0
        .iter()
        .map(|c| modp(c, p))
        .collect();
    let mut out = Vec::new();
    for x in 0..p {
        let mut acc = 0u64;
        for c in coeffs.iter().rev() {
            acc = (acc * x + c) % p;
        }
        if acc == 0 {
            out.push(x);
        }
    }
    Ok(out)
}

/// One corpus entry: a curve, the prime whose torsion hypothesis it
/// satisfies (None for the trivial-torsion rank-1 fixture), and the known
/// Mordell–Weil rank when the fixture has one.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub label: String,
    pub curve: WeierstrassCurve,
    pub ell: Option<u32>,
    pub known_rank: Option<u32>,
}

/// The fixture corpus: the named curves plus randomized small-coefficient
/// members of the 2- and 3-torsion families, all with h(E) <= e so every
/// B >= e^e is admissible.
pub fn acceptance_corpus(seed: u64) -> Vec<CorpusEntry> {
    let budget = FactorBudget::default();
    let mut out = vec![
        CorpusEntry {
            label: "32a (y^2 = x^3 - x)".into(),
            curve: WeierstrassCurve::from_i64(0, -1, 0).unwrap(),
            ell: Some(2),
            known_rank: Some(0),
        },
        CorpusEntry {
            label: "36a (y^2 = x^3 + 1)".into(),
            curve: WeierstrassCurve::from_i64(0, 0, 1).unwrap(),
            ell: Some(3),
            known_rank: Some(0),
        },
        CorpusEntry {
            label: "37a descaled (y^2 = x^3 - x + 1/4)".into(),
            curve: WeierstrassCurve::new(
                rat_i64(0),
                rat_i64(-1),
                BigRational::new(BigInt::from(1), BigInt::from(4)),
            )
            .unwrap(),
            ell: None,
            known_rank: Some(1),
        },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e_cutoff = std::f64::consts::E;
    // 2-torsion family y^2 = x^3 + a x^2 + b x with (0,0) of order 2
    while out.iter().filter(|c| c.ell == Some(2)).count() < 11 {
        let a = rng.gen_range(-3i64..=3);
        let b = rng.gen_range(-8i64..=8);
        if b == 0 {
            continue;
        }
        if let Ok(curve) = WeierstrassCurve::from_i64(a, b, 0) {
            if crate::heights::curve_height(&curve).value > e_cutoff {
                continue;
            }
            if out.iter().any(|c| c.curve == curve) {
                continue;
            }
            out.push(CorpusEntry {
                label: format!("2-torsion family ({a},{b},0)"),
                curve,
                ell: Some(2),
                known_rank: None,
            });
        }
    }
    // 3-torsion family y^2 = x^3 + (A1 x + A2)^2 with (0, A2) of order 3
    while out.len() < 22 {
        let a1 = rng.gen_range(-2i64..=2);
        let a2 = rng.gen_range(1i64..=3);
        let (a, b, c) = (a1 * a1, 2 * a1 * a2, a2 * a2);
        if let Ok(curve) = WeierstrassCurve::from_i64(a, b, c) {
            if crate::heights::curve_height(&curve).value > e_cutoff {
                continue;
            }
            if out.iter().any(|cc| cc.curve == curve) {
                continue;
            }
            let p3 = CurvePoint::affine(rat_i64(0), rat_i64(a2));
            let ok = matches!(
                crate::torsion::has_rational_ell_torsion(&curve, 3, &budget),
                Ok((true, _))
            ) && curve.contains(&p3);
            if !ok {
                continue;
            }
            out.push(CorpusEntry {
                label: format!("3-torsion family ({a},{b},{c})"),
                curve,
                ell: Some(3),
                known_rank: None,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweeps_are_clean() {
        // smaller sizes here; the acceptance suite runs the full sweeps
        assert!(sweep_ball_covering(20, 7).pass());
        assert!(sweep_ceil_max().pass());
        assert!(sweep_polylog(100, 7).pass());
        assert!(sweep_f_bound(50, 7).pass());
        assert!(sweep_rosser(10_000).pass());
        assert!(sweep_robin(100_000).pass());
        assert!(sweep_division_poly_oracle(10, 7).pass());
    }

    #[test]
    fn doubling_oracle_matches_certified_height() {
        let e = WeierstrassCurve::new(
            rat_i64(0),
            rat_i64(-1),
            BigRational::new(BigInt::from(1), BigInt::from(4)),
        )
        .unwrap();
        let p = CurvePoint::affine(rat_i64(0), BigRational::new(BigInt::from(1), BigInt::from(2)));
        let oracle = doubling_oracle(&e, &p, 10).unwrap();
        assert!((oracle - 0.051111408239969).abs() < 2e-5, "oracle {oracle}");
        let h = crate::heights::canonical_height(&e, &p, 1e-9, &FactorBudget::default()).unwrap();
        assert!((h.value - oracle).abs() < 2e-5);
    }

    #[test]
    fn corpus_is_well_formed() {
        let corpus = acceptance_corpus(42);
        assert!(corpus.len() >= 20);
        let budget = FactorBudget::default();
        for entry in &corpus {
            if let Some(ell) = entry.ell {
                let (has, _) =
                    crate::torsion::has_rational_ell_torsion(&entry.curve, ell, &budget).unwrap();
                assert!(has, "{}", entry.label);
            }
            assert!(crate::heights::curve_height(&entry.curve).value <= std::f64::consts::E);
        }
    }
}
