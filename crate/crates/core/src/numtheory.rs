//! Integer arithmetic: factorization, gcd/lcm, totient, valuations, divisors.
//!
//! Inputs are `u64`; anything that can outgrow its inputs (an lcm, a power,
//! a fiber count) is returned as [`BigUint`].

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive};

use crate::error::{Error, Result};

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredNat {
    value: BigUint,
    factors: BTreeMap<u64, u32>,
}

impl FactoredNat {
    pub fn one() -> Self {
        FactoredNat { value: BigUint::one(), factors: BTreeMap::new() }
    }

    /// Builds the number `∏ p^e`. Every key must be prime and every exponent
    /// at least one.
    pub fn from_factors(factors: BTreeMap<u64, u32>) -> Result<Self> {
        let mut value = BigUint::one();
        for (&p, &e) in &factors {
            if !is_prime(p) {
                return Err(Error::usage(format!("{p} is not prime")));
            }
            if e == 0 {
                return Err(Error::usage(format!("zero exponent for prime {p}")));
            }
            value *= BigUint::from(p).pow(e);
        }
        Ok(FactoredNat { value, factors })
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// The value as `u64`, when it fits.
    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    pub fn factors(&self) -> &BTreeMap<u64, u32> {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.keys().copied()
    }

    /// Exponent of `p` in this number; zero when `p` does not divide it.
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Least common multiple, taken exponent-wise.
    pub fn lcm(&self, other: &FactoredNat) -> FactoredNat {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            let slot = factors.entry(p).or_insert(0);
            *slot = (*slot).max(e);
        }
        let value = factors.iter().fold(BigUint::one(), |acc, (&p, &e)| acc * BigUint::from(p).pow(e));
        FactoredNat { value, factors }
    }

    /// Number of divisors, `∏ (e + 1)`.
    pub fn divisor_count(&self) -> BigUint {
        self.factors.values().fold(BigUint::one(), |acc, &e| acc * (e + 1))
    }
}

/// Pluggable factorization backend.
pub trait Factorizer {
    /// Prime factorization of `n ≥ 2` as a `prime → exponent` map.
    fn factor(&self, n: u64) -> BTreeMap<u64, u32>;
}

/// Trial division up to `bound`, then a Miller–Rabin check of the cofactor.
/// A composite cofactor (only possible above `bound²`) is split with
/// Pollard–Brent.
#[derive(Debug, Clone, Copy)]
pub struct TrialDivision {
    pub bound: u64,
}

impl Default for TrialDivision {
    fn default() -> Self {
        TrialDivision { bound: 1_000_000 }
    }
}

impl Factorizer for TrialDivision {
    fn factor(&self, mut n: u64) -> BTreeMap<u64, u32> {
        let mut out = BTreeMap::new();
        for p in [2u64, 3] {
            while n.is_multiple_of(p) {
                *out.entry(p).or_insert(0) += 1;
                n /= p;
            }
        }
        // 6k ± 1 wheel
        let mut d = 5u64;
        while d <= self.bound && d.saturating_mul(d) <= n {
            for c in [d, d + 2] {
                while n.is_multiple_of(c) {
                    *out.entry(c).or_insert(0) += 1;
                    n /= c;
                }
            }
            d += 6;
        }
        if n > 1 {
            let mut stack = vec![n];
            while let Some(m) = stack.pop() {
                if is_prime(m) {
                    *out.entry(m).or_insert(0) += 1;
                } else {
                    let f = pollard_brent(m);
                    stack.push(f);
                    stack.push(m / f);
                }
            }
        }
        out
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all of `u64`; the first twelve prime
/// bases suffice below 3.3·10²⁴.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A nontrivial factor of the odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| ((mul_mod(x, x, n) as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut power = 1u64;
        let mut lam = 1u64;
        while g == 1 {
            if power == lam {
                x = y;
                power <<= 1;
                lam = 0;
            }
            y = f(y);
            lam += 1;
            g = gcd(x.abs_diff(y), n);
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Least common multiple of a nonempty list of positive integers.
pub fn lcm_all(ns: &[u64]) -> Result<BigUint> {
    if ns.is_empty() {
        return Err(Error::usage("lcm of an empty list"));
    }
    let mut acc = BigUint::one();
    for &n in ns {
        if n == 0 {
            return Err(Error::usage("moduli must be positive"));
        }
        let n = BigUint::from(n);
        let g = acc.gcd(&n);
        acc = acc / g * n;
    }
    Ok(acc)
}

/// Factorizes `n ≥ 1` with the default backend.
pub fn factorize(n: u64) -> Result<FactoredNat> {
    factorize_with(&TrialDivision::default(), n)
}

pub fn factorize_with<F: Factorizer + ?Sized>(backend: &F, n: u64) -> Result<FactoredNat> {
    match n {
        0 => Err(Error::usage("cannot factorize 0")),
        1 => Ok(FactoredNat::one()),
        _ => Ok(FactoredNat { value: BigUint::from(n), factors: backend.factor(n) }),
    }
}

/// Factorization of `lcm(ns)`, assembled from the factorizations of the entries.
pub fn factorize_lcm(ns: &[u64]) -> Result<FactoredNat> {
    if ns.is_empty() {
        return Err(Error::usage("lcm of an empty list"));
    }
    let mut acc = FactoredNat::one();
    for &n in ns {
        acc = acc.lcm(&factorize(n)?);
    }
    Ok(acc)
}

/// The `p`-adic valuation of `n`.
pub fn ord_p(n: u64, p: u64) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::usage(format!("ord_p needs a prime, got {p}")));
    }
    if n == 0 {
        return Err(Error::usage("ord_p(0) is infinite"));
    }
    let mut n = n;
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    Ok(e)
}

/// Euler's totient, computed from the factorization.
pub fn euler_phi(n: u64) -> Result<u64> {
    Ok(phi_of_factors(factorize(n)?.factors()))
}

fn phi_of_factors(factors: &BTreeMap<u64, u32>) -> u64 {
    factors.iter().map(|(&p, &e)| p.pow(e - 1) * (p - 1)).product()
}

/// All divisors of `n`, ascending.
pub fn divisors(n: &FactoredNat) -> Vec<BigUint> {
    let mut out = vec![BigUint::one()];
    for (&p, &e) in n.factors() {
        let p = BigUint::from(p);
        let len = out.len();
        let mut pk = BigUint::one();
        for _ in 0..e {
            pk *= &p;
            for i in 0..len {
                let d = &out[i] * &pk;
                out.push(d);
            }
        }
    }
    out.sort();
    out
}

/// Divisors of a `u64` paired with their totients, in no particular order.
pub(crate) fn divisors_with_phi(n: &FactoredNat) -> Vec<(u64, u64)> {
    let mut out = vec![(1u64, 1u64)];
    for (&p, &e) in n.factors() {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            let phi_pk = pk / p * (p - 1);
            for i in 0..len {
                let (d, phi) = out[i];
                out.push((d * pk, phi * phi_pk));
            }
        }
    }
    out
}

/// `#{ l ∈ [1, p^top] : ord_p(l) = mu }`.
pub fn valuation_fiber_count(p: u64, top: u32, mu: u32) -> Result<BigUint> {
    if mu > top {
        return Err(Error::usage(format!("valuation {mu} exceeds the range exponent {top}")));
    }
    if !is_prime(p) {
        return Err(Error::usage(format!("{p} is not prime")));
    }
    if mu == top {
        return Ok(BigUint::one());
    }
    let p = BigUint::from(p);
    let hi = p.clone().pow(top - mu);
    let lo = p.pow(top - mu - 1);
    Ok(hi - lo)
}

/// `Σ_{d | n, d | m} φ(d)`, which always equals `gcd(n, m)`.
///
/// The common divisors are found by filtering the divisors of `n` against
/// `m`, without computing the gcd.
pub fn gcd_divisor_sum(n: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::usage("arguments must be positive"));
    }
    let fact = factorize(n)?;
    Ok(divisors_with_phi(&fact).into_iter().filter(|&(d, _)| m.is_multiple_of(d)).map(|(_, phi)| phi).sum())
}
