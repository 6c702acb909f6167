//! Exact integer arithmetic: factorization, prime counting and the two
//! elementary prime facts everything downstream leans on (Robin's bound on
//! the number of distinct prime factors, Rosser–Schoenfeld's lower bound
//! on pi(x), and the resulting small-prime-pair existence).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Robin's constant: omega(n) <= 1.3841 log n / log log n for n >= 3.
pub const ROBIN_C: f64 = 1.3841;

/// Prime-pair search constant: two primes not dividing N exist below 6.2 log N
/// once N >= 16.
pub const PRIME_PAIR_C: f64 = 6.2;

/// Effort caps for factoring and sieving.
#[derive(Debug, Clone)]
pub struct FactorBudget {
    /// Trial division bound.
    pub trial_limit: u64,
    /// Pollard rho iterations per attempt.
    pub rho_iterations: u64,
    /// Rho attempts with distinct increments before giving up.
    pub rho_attempts: u32,
    /// Largest sieve size prime_pi will allocate.
    pub sieve_limit: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_limit: 1_000_000,
            rho_iterations: 2_000_000,
            rho_attempts: 24,
            sieve_limit: 100_000_000,
        }
    }
}

impl FactorBudget {
    /// Scale the iteration budgets by `factor` (CLI --budget-factor).
    pub fn scaled(factor: f64) -> Self {
        let base = FactorBudget::default();
        FactorBudget {
            trial_limit: base.trial_limit,
            rho_iterations: ((base.rho_iterations as f64) * factor) as u64,
            rho_attempts: base.rho_attempts,
            sieve_limit: ((base.sieve_limit as f64) * factor) as u64,
        }
    }
}

/// Signed factorization: `value = sign * prod(prime^exp)`.
///
/// Primes are strictly increasing and exponents positive; `1` and `-1`
/// factor into the empty product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub negative: bool,
    pub factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    pub fn value(&self) -> BigInt {
        let mut v = BigInt::one();
        for (p, e) in &self.factors {
            v *= p.pow(*e);
        }
        if self.negative {
            -v
        } else {
            v
        }
    }

    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    /// All positive divisors, unordered. Caller beware of blowup.
    pub fn divisors(&self) -> Vec<BigInt> {
        let mut divs = vec![BigInt::one()];
        for (p, e) in &self.factors {
            let mut next = Vec::with_capacity(divs.len() * (*e as usize + 1));
            for d in &divs {
                let mut pk = BigInt::one();
                for _ in 0..=*e {
                    next.push(d * &pk);
                    pk *= p;
                }
            }
            divs = next;
        }
        divs
    }

    /// Positive d with d^2 dividing the value.
    pub fn square_divisors(&self) -> Vec<BigInt> {
        let halved = Factorization {
            negative: false,
            factors: self
                .factors
                .iter()
                .filter(|(_, e)| *e >= 2)
                .map(|(p, e)| (p.clone(), e / 2))
                .collect(),
        };
        halved.divisors()
    }
}

/// Deterministic Miller–Rabin with the 12-prime base set, valid below
/// 3.317e24; beyond that range the same bases are used as a strong
/// probabilistic test (factoring budgets stop us long before it matters).
pub fn is_prime(n: &BigInt) -> bool {
    if n.sign() == num_bigint::Sign::Minus {
        return false;
    }
    if let Some(m) = n.to_u64() {
        return is_prime_u64(m);
    }
    let two = BigInt::from(2);
    if n.is_even() {
        return false;
    }
    let n1 = n - BigInt::one();
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'base: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigInt::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'base: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = modpow_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn modpow_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod_u64(acc, b, m);
        }
        b = mulmod_u64(b, b, m);
        e >>= 1;
    }
    acc
}

/// Factor a nonzero integer into primes.
///
/// Trial division up to the budgeted limit, then Brent-cycle Pollard rho on
/// whatever composite survives. Exceeding the rho budget is a resource
/// error, not a wrong answer.
pub fn factor(n: &BigInt, budget: &FactorBudget) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::Domain("factor(0) is undefined".into()));
    }
    let negative = n.is_negative();
    let mut m = n.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();

    let push = |factors: &mut Vec<(BigInt, u32)>, p: BigInt, e: u32| {
        factors.push((p, e));
    };

    // trial stage
    let mut d = 2u64;
    while d <= budget.trial_limit {
        let db = BigInt::from(d);
        if (&db * &db) > m {
            break;
        }
        if m.is_multiple_of(&db) {
            let mut e = 0u32;
            while m.is_multiple_of(&db) {
                m /= &db;
                e += 1;
            }
            push(&mut factors, db, e);
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if m.is_one() {
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        return Ok(Factorization { negative, factors });
    }
    if is_prime(&m) {
        push(&mut factors, m, 1);
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        return Ok(Factorization { negative, factors });
    }

    // rho stage on the remaining composite
    let mut stack = vec![m];
    let mut found: Vec<BigInt> = Vec::new();
    while let Some(c) = stack.pop() {
        if is_prime(&c) {
            found.push(c);
            continue;
        }
        let f = pollard_rho(&c, budget)?;
        stack.push(&c / &f);
        stack.push(f);
    }
    found.sort();
    let mut i = 0;
    while i < found.len() {
        let mut j = i;
        while j < found.len() && found[j] == found[i] {
            j += 1;
        }
        push(&mut factors, found[i].clone(), (j - i) as u32);
        i = j;
    }
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Factorization { negative, factors })
}

fn pollard_rho(n: &BigInt, budget: &FactorBudget) -> Result<BigInt> {
    // n is odd, composite, and has no factor below the trial limit here.
    let one = BigInt::one();
    for attempt in 1..=budget.rho_attempts {
        let c = BigInt::from(attempt);
        let mut x = BigInt::from(2u32);
        let mut y = x.clone();
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut iters = 0u64;
        let mut r = 1u64;
        'outer: while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &c) % n;
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                let ys = y.clone();
                let chunk = 128.min(r - k);
                for _ in 0..chunk {
                    y = (&y * &y + &c) % n;
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (&q * &diff) % n;
                    iters += 1;
                    if iters > budget.rho_iterations {
                        break 'outer;
                    }
                }
                g = q.gcd(n);
                k += chunk;
                if g == *n {
                    // backtrack
                    let mut yb = ys;
                    loop {
                        yb = (&yb * &yb + &c) % n;
                        let diff = if x > yb { &x - &yb } else { &yb - &x };
                        g = diff.gcd(n);
                        if !g.is_one() {
                            break;
                        }
                    }
                    break;
                }
            }
            r *= 2;
        }
        if !g.is_one() && g != *n {
            return Ok(g);
        }
        let _ = one;
    }
    Err(Error::Resource(format!(
        "pollard rho gave up on {n} after {} attempts",
        budget.rho_attempts
    )))
}

/// Number of distinct prime divisors of n (omega). omega(+-1) = 0.
pub fn omega(n: &BigInt, budget: &FactorBudget) -> Result<u32> {
    if n.is_zero() {
        return Err(Error::Domain("omega(0) is undefined".into()));
    }
    if n.abs().is_one() {
        return Ok(0);
    }
    Ok(factor(n, budget)?.omega())
}

/// Primes up to `limit` inclusive, by sieve.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Exact count of primes <= x.
pub fn prime_pi(x: f64, budget: &FactorBudget) -> Result<u64> {
    if x < 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("prime_pi needs finite x >= 0, got {x}")));
    }
    let limit = x.floor() as u64;
    if limit > budget.sieve_limit {
        return Err(Error::Resource(format!(
            "prime_pi({x}) exceeds sieve budget {}",
            budget.sieve_limit
        )));
    }
    Ok(sieve_primes(limit).len() as u64)
}

/// The two smallest distinct primes p, q with p, q not dividing N.
/// Requires N >= 16; both primes land below 6.2 log N.
pub fn two_primes_not_dividing(n: &BigInt) -> Result<(u64, u64)> {
    if *n < BigInt::from(16) {
        return Err(Error::Precondition(format!(
            "two_primes_not_dividing needs N >= 16, got {n}"
        )));
    }
    let bound = PRIME_PAIR_C * ln_big(n);
    let primes = sieve_primes(bound.floor() as u64);
    let mut picked = Vec::with_capacity(2);
    for p in primes {
        if !n.is_multiple_of(&BigInt::from(p)) {
            picked.push(p);
            if picked.len() == 2 {
                return Ok((picked[0], picked[1]));
            }
        }
    }
    // Unreachable for N >= 16 by the prime-pair lemma.
    Err(Error::Inconsistency(format!(
        "no prime pair below {bound} for N = {n}"
    )))
}

/// Natural log of |n| for nonzero n, accurate to ~1e-15 relative.
pub fn ln_big(n: &BigInt) -> f64 {
    let m = n.abs();
    if m.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = m.bits();
    if bits <= 63 {
        return (m.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 63;
    let top = (&m >> shift).to_u64().unwrap();
    (top as f64).ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Exact integer square root test.
pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    // cheap residue filters before the exact root
    if let Some(v) = n.to_u64() {
        if !SQ_MOD_256[(v & 255) as usize] {
            return None;
        }
    } else {
        let v = (n & BigInt::from(255u32)).to_u64().unwrap();
        if !SQ_MOD_256[v as usize] {
            return None;
        }
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

static SQ_MOD_256: [bool; 256] = {
    let mut t = [false; 256];
    let mut i = 0u32;
    while i < 256 {
        t[((i * i) & 255) as usize] = true;
        i += 1;
    }
    t
};

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fz(n: i64) -> Factorization {
        factor(&BigInt::from(n), &FactorBudget::default()).unwrap()
    }

    #[test]
    fn factor_360() {
        let f = fz(360);
        assert!(!f.negative);
        assert_eq!(
            f.factors,
            vec![
                (BigInt::from(2), 3),
                (BigInt::from(3), 2),
                (BigInt::from(5), 1)
            ]
        );
    }

    #[test]
    fn factor_minus_one_is_empty_with_sign() {
        let f = fz(-1);
        assert!(f.negative);
        assert!(f.factors.is_empty());
        assert_eq!(f.value(), BigInt::from(-1));
    }

    #[test]
    fn factor_151552() {
        // trial-division oracle: 151552 = 2^12 * 37
        let mut n = 151552u64;
        let mut e2 = 0;
        while n % 2 == 0 {
            n /= 2;
            e2 += 1;
        }
        assert_eq!((e2, n), (12, 37));
        let f = fz(151552);
        assert_eq!(f.factors, vec![(BigInt::from(2), 12), (BigInt::from(37), 1)]);
    }

    #[test]
    fn factor_zero_is_domain_error() {
        assert!(matches!(
            factor(&BigInt::zero(), &FactorBudget::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn omega_basics() {
        let b = FactorBudget::default();
        assert_eq!(omega(&BigInt::from(30), &b).unwrap(), 3);
        assert_eq!(omega(&BigInt::from(1), &b).unwrap(), 0);
        assert_eq!(omega(&BigInt::from(64), &b).unwrap(), 1);
        // Robin bound at n = 64: 1.3841 * log 64 / log log 64 ~ 4.04 >= 1
        let n = 64f64;
        let robin = ROBIN_C * n.ln() / n.ln().ln();
        assert!(robin > 4.0 && robin < 4.1);
        assert!(1.0 <= robin);
    }

    #[test]
    fn prime_pi_examples() {
        let b = FactorBudget::default();
        assert_eq!(prime_pi(17.0, &b).unwrap(), 7);
        assert_eq!(prime_pi(1.5, &b).unwrap(), 0);
        assert_eq!(prime_pi(100.0, &b).unwrap(), 25);
    }

    #[test]
    fn prime_pi_budget() {
        let b = FactorBudget {
            sieve_limit: 10,
            ..FactorBudget::default()
        };
        assert!(matches!(prime_pi(1e6, &b), Err(Error::Resource(_))));
    }

    #[test]
    fn two_primes_examples() {
        assert_eq!(two_primes_not_dividing(&BigInt::from(16)).unwrap(), (3, 5));
        assert_eq!(two_primes_not_dividing(&BigInt::from(30)).unwrap(), (7, 11));
        assert_eq!(
            two_primes_not_dividing(&BigInt::from(30030)).unwrap(),
            (17, 19)
        );
        assert!(two_primes_not_dividing(&BigInt::from(15)).is_err());
    }

    #[test]
    fn is_prime_small() {
        let primes: Vec<u64> = (0..100).filter(|&n| is_prime(&BigInt::from(n))).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]
        );
    }

    #[test]
    fn ln_big_matches_f64() {
        for n in [2u64, 97, 151552, 1 << 40] {
            let l = ln_big(&BigInt::from(n));
            assert!((l - (n as f64).ln()).abs() < 1e-12);
        }
        let huge = BigInt::from(10u32).pow(40);
        assert!((ln_big(&huge) - 40.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn square_divisors_of_144() {
        let f = fz(144);
        let mut d = f.square_divisors();
        d.sort();
        assert_eq!(
            d,
            vec![1, 2, 3, 4, 6, 12]
                .into_iter()
                .map(BigInt::from)
                .collect::<Vec<_>>()
        );
    }

    proptest! {
        #[test]
        fn factor_roundtrip(n in 1i64..1_000_000_000_000i64, neg in proptest::bool::ANY) {
            let v = BigInt::from(if neg { -n } else { n });
            let f = factor(&v, &FactorBudget::default()).unwrap();
            prop_assert_eq!(f.value(), v.clone());
            for (p, e) in &f.factors {
                prop_assert!(is_prime(p));
                prop_assert!(*e >= 1);
            }
            for w in f.factors.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
        }

        #[test]
        fn two_primes_postconditions(n in 16u64..10_000_000u64) {
            let nb = BigInt::from(n);
            let (p, q) = two_primes_not_dividing(&nb).unwrap();
            prop_assert!(p != q);
            prop_assert!(is_prime(&BigInt::from(p)) && is_prime(&BigInt::from(q)));
            prop_assert!(n % p != 0 && n % q != 0);
            let bound = PRIME_PAIR_C * (n as f64).ln();
            prop_assert!((p as f64) <= bound && (q as f64) <= bound);
        }
    }
}
