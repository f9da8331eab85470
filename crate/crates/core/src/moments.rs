//! `E[X(A)^w]` by brute force, by the per-prime Euler product, and by the
//! element-order census, plus the differential check that runs them side by
//! side.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::abgroup::{self, AbelianGroup, PPrimaryProfile};
use crate::error::{Error, Result};
use crate::numtheory;

/// Moment exponent: an exact nonnegative integer, or a complex number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Integer(u32),
    Complex(Complex64),
}

impl Exponent {
    pub fn as_complex(&self) -> Complex64 {
        match *self {
            Exponent::Integer(w) => Complex64::new(w as f64, 0.0),
            Exponent::Complex(z) => z,
        }
    }
}

/// Grammar accepted by [`Exponent::from_str`], quoted in error messages.
pub const EXPONENT_GRAMMAR: &str =
    "a nonnegative integer (e.g. 2) or a complex number a+bi with decimal a, b (e.g. 0.5+0.25i, 1.5, -2i)";

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Ok(w) = t.parse::<u32>() {
            return Ok(Exponent::Integer(w));
        }
        parse_complex(t)
            .map(Exponent::Complex)
            .ok_or_else(|| Error::usage(format!("cannot parse exponent {s:?}; expected {EXPONENT_GRAMMAR}")))
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` with decimal (optionally exponent) parts.
pub fn parse_complex(t: &str) -> Option<Complex64> {
    let t = t.trim();
    if t.is_empty() {
        return None;
    }
    let finite = |x: f64| x.is_finite().then_some(x);
    let Some(body) = t.strip_suffix('i') else {
        return finite(t.parse().ok()?).map(|re| Complex64::new(re, 0.0));
    };
    // split before the last sign that is not leading and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse().ok()?,
    };
    Some(Complex64::new(finite(re.parse().ok()?)?, finite(im)?))
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Integer(w) => write!(f, "{w}"),
            Exponent::Complex(z) => {
                let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                write!(f, "{}{}{}i", z.re, sign, z.im.abs())
            }
        }
    }
}

/// A moment value: exact for integer exponents, binary64 complex otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentValue {
    Exact(BigRational),
    Approx(Complex64),
}

impl MomentValue {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            MomentValue::Exact(q) => Complex64::new(rational_to_f64(q), 0.0),
            MomentValue::Approx(z) => *z,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            MomentValue::Exact(q) => Some(q),
            MomentValue::Approx(_) => None,
        }
    }
}

/// `num/den` in lowest terms, denominator always written.
pub fn render_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Inverse of [`render_rational`]; a bare integer is accepted as well.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.trim().parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// One `(moduli, w)` query.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentQuery {
    pub moduli: Vec<u64>,
    pub w: Exponent,
}

impl MomentQuery {
    pub fn new(moduli: Vec<u64>, w: Exponent) -> Result<Self> {
        check_moduli(&moduli)?;
        Ok(MomentQuery { moduli, w })
    }
}

fn check_moduli(moduli: &[u64]) -> Result<()> {
    if moduli.is_empty() {
        return Err(Error::usage("moduli list is empty"));
    }
    if moduli.contains(&0) {
        return Err(Error::usage("moduli must be positive"));
    }
    Ok(())
}

fn sample_space(moduli: &[u64], cap: u64) -> Result<u64> {
    check_moduli(moduli)?;
    let lcm = numtheory::lcm_all(moduli)?;
    match lcm.to_u64() {
        Some(l) if l <= cap => Ok(l),
        _ => Err(Error::Resource { what: "sample-space enumeration", size: lcm.to_string(), cap }),
    }
}

/// Walks `l = 1, …, L` keeping `gcd(l, n_j)` via residue tables.
struct GcdWalk {
    tables: Vec<Vec<u64>>,
    residues: Vec<usize>,
}

impl GcdWalk {
    fn new(moduli: &[u64]) -> Self {
        let tables: Vec<Vec<u64>> =
            moduli.iter().filter(|&&n| n > 1).map(|&n| (0..n).map(|r| numtheory::gcd(r, n)).collect()).collect();
        let residues = vec![0; tables.len()];
        GcdWalk { tables, residues }
    }

    /// Advances to the next `l` and returns the per-modulus gcds.
    fn step(&mut self) -> impl Iterator<Item = u64> + '_ {
        for (r, t) in self.residues.iter_mut().zip(&self.tables) {
            *r += 1;
            if *r == t.len() {
                *r = 0;
            }
        }
        self.residues.iter().zip(&self.tables).map(|(&r, t)| t[r])
    }
}

/// Exact running sum that stays in `u128` until it overflows.
#[derive(Default)]
struct ExactSum {
    small: u128,
    big: BigUint,
}

impl ExactSum {
    fn add_small(&mut self, x: u128) {
        match self.small.checked_add(x) {
            Some(v) => self.small = v,
            None => {
                self.big += self.small;
                self.small = x;
            }
        }
    }

    fn add_big(&mut self, x: BigUint) {
        self.big += x;
    }

    fn total(self) -> BigUint {
        self.big + self.small
    }
}

/// `(1/L) Σ_{l=1}^{L} ∏_j gcd(l, n_j)^w`, exact.
pub fn brute_moment_exact(moduli: &[u64], w: u32, cap: u64) -> Result<BigRational> {
    let lcm = sample_space(moduli, cap)?;
    let mut walk = GcdWalk::new(moduli);
    let mut sum = ExactSum::default();
    for _ in 0..lcm {
        let mut x: Option<u128> = Some(1);
        let mut wide: Option<BigUint> = None;
        for g in walk.step() {
            match x {
                Some(v) => match v.checked_mul(g as u128) {
                    Some(v) => x = Some(v),
                    None => {
                        wide = Some(BigUint::from(v) * g);
                        x = None;
                    }
                },
                None => *wide.as_mut().unwrap() *= g,
            }
        }
        match x.and_then(|v| v.checked_pow(w)) {
            Some(term) => sum.add_small(term),
            None => {
                let base = wide.unwrap_or_else(|| BigUint::from(x.unwrap()));
                sum.add_big(base.pow(w));
            }
        }
    }
    Ok(BigRational::new(BigInt::from(sum.total()), BigInt::from(lcm)))
}

/// Neumaier-compensated complex accumulator.
#[derive(Default)]
struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    fn add(&mut self, x: Complex64) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.comp.im);
    }

    fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, x: f64, comp: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

/// The same average for complex `w`, with `gcd^w = exp(w · ln gcd)`.
///
/// Terms are added in ascending `l`, so the result is reproducible bit for bit.
pub fn brute_moment_complex(moduli: &[u64], w: Complex64, cap: u64) -> Result<Complex64> {
    let lcm = sample_space(moduli, cap)?;
    let mut walk = GcdWalk::new(moduli);
    let mut sum = CompensatedSum::default();
    for _ in 0..lcm {
        let ln_x: f64 = walk.step().map(|g| (g as f64).ln()).sum();
        sum.add((w * ln_x).exp());
    }
    Ok(sum.total() / lcm as f64)
}

fn ppow(p: u64, e: u64) -> BigUint {
    BigUint::from(p).pow(e)
}

/// Per-prime factor `E[X_p^w]`:
///
/// `p^{(ν_0+…+ν_k)w − ν_k} + (1 − 1/p) Σ_{j<k} Σ_{μ=ν_j}^{ν_{j+1}−1} p^{(ν_0+…+ν_j)w + (k−j)μw − μ}`.
///
/// For `μ ∈ [ν_j, ν_{j+1})` exactly the `k − j` largest valuations exceed
/// `μ`, so `X_p = p^{ν_1+…+ν_j+(k−j)μ}` on that valuation fiber.
pub fn local_factor_exact(profile: &PPrimaryProfile, w: u32) -> BigRational {
    let p = profile.p();
    let nus = profile.nus();
    let k = profile.k();
    let top = nus[k] as u64;
    let w = w as u64;
    // everything over p^{ν_k}
    let total: u64 = nus.iter().map(|&v| v as u64).sum();
    let mut numer = ppow(p, total * w);
    let mut inner = BigUint::zero();
    let mut prefix = 0u64;
    for j in 0..k {
        prefix += nus[j] as u64;
        for mu in nus[j] as u64..nus[j + 1] as u64 {
            inner += ppow(p, prefix * w + (k - j) as u64 * mu * w + top - mu - 1);
        }
    }
    numer += inner * (p - 1);
    BigRational::new(BigInt::from(numer), BigInt::from(ppow(p, top)))
}

/// [`local_factor_exact`] with each inner μ-sum summed as a geometric series
/// of ratio `p^{(k−j)w − 1}`.
pub fn local_factor_geometric(profile: &PPrimaryProfile, w: u32) -> BigRational {
    let p = BigInt::from(profile.p());
    let nus = profile.nus();
    let k = profile.k();
    let w = w as i64;
    let pq = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(p.clone().pow(e as u64))
        } else {
            BigRational::new(BigInt::one(), p.clone().pow((-e) as u64))
        }
    };
    let total: i64 = nus.iter().map(|&v| v as i64).sum();
    let first = pq(total * w - nus[k] as i64);
    let mut sum = BigRational::zero();
    let mut prefix = 0i64;
    for j in 0..k {
        prefix += nus[j] as i64;
        let (lo, hi) = (nus[j] as i64, nus[j + 1] as i64);
        if lo == hi {
            continue;
        }
        let ratio_exp = (k - j) as i64 * w - 1;
        let geom = if ratio_exp == 0 {
            BigRational::from_integer(BigInt::from(hi - lo))
        } else {
            (pq(ratio_exp * hi) - pq(ratio_exp * lo)) / (pq(ratio_exp) - BigRational::one())
        };
        sum += pq(prefix * w) * geom;
    }
    let one_minus = BigRational::one() - pq(-1);
    first + one_minus * sum
}

/// Complex-exponent version of [`local_factor_exact`].
pub fn local_factor_complex(profile: &PPrimaryProfile, w: Complex64) -> Complex64 {
    let ln_p = (profile.p() as f64).ln();
    let pz = |z: Complex64| (z * ln_p).exp();
    let nus = profile.nus();
    let k = profile.k();
    let top = nus[k] as f64;
    let total: f64 = nus.iter().map(|&v| v as f64).sum();
    let mut inner = Complex64::zero();
    let mut prefix = 0.0;
    for j in 0..k {
        prefix += nus[j] as f64;
        for mu in nus[j]..nus[j + 1] {
            let mu = mu as f64;
            inner += pz(w * (prefix + (k - j) as f64 * mu) - mu);
        }
    }
    pz(w * total - top) + inner * (1.0 - 1.0 / profile.p() as f64)
}

pub fn local_factor(profile: &PPrimaryProfile, w: &Exponent) -> MomentValue {
    match *w {
        Exponent::Integer(w) => MomentValue::Exact(local_factor_exact(profile, w)),
        Exponent::Complex(z) => MomentValue::Approx(local_factor_complex(profile, z)),
    }
}

/// Signature of an exact local-factor evaluator, so alternative (or
/// deliberately broken) implementations can be plugged into [`Verifier`].
pub type ExactLocalFactor = fn(&PPrimaryProfile, u32) -> BigRational;

pub fn euler_product_exact_with(moduli: &[u64], w: u32, local: ExactLocalFactor) -> Result<BigRational> {
    let group = AbelianGroup::new(moduli)?;
    Ok(group.profiles().map(|prof| local(prof, w)).fold(BigRational::one(), |acc, f| acc * f))
}

pub fn euler_product_exact(moduli: &[u64], w: u32) -> Result<BigRational> {
    euler_product_exact_with(moduli, w, local_factor_exact)
}

pub fn euler_product_complex(moduli: &[u64], w: Complex64) -> Result<Complex64> {
    let group = AbelianGroup::new(moduli)?;
    Ok(group.profiles().map(|prof| local_factor_complex(prof, w)).fold(Complex64::one(), |acc, f| acc * f))
}

/// `∏_{p | lcm} E[X_p^w]`; the empty product (all moduli 1) is 1.
pub fn euler_product_moment(moduli: &[u64], w: &Exponent) -> Result<MomentValue> {
    match *w {
        Exponent::Integer(w) => euler_product_exact(moduli, w).map(MomentValue::Exact),
        Exponent::Complex(z) => euler_product_complex(moduli, z).map(MomentValue::Approx),
    }
}

/// Local factors `(p, E[X_p^w])` for every prime dividing the lcm.
pub fn local_factor_table(moduli: &[u64], w: &Exponent) -> Result<Vec<(u64, MomentValue)>> {
    let group = AbelianGroup::new(moduli)?;
    Ok(group.profiles().map(|prof| (prof.p(), local_factor(prof, w))).collect())
}

/// `E[X(A)^w] = μ(A^w)` from the element-order census. `w = 0` returns 1.
pub fn census_moment(moduli: &[u64], w: u32) -> Result<BigRational> {
    Ok(abgroup::mu(&AbelianGroup::new(moduli)?, w))
}

/// `Σ_{d | n} φ(d)/d`, which equals `(1/n) Σ_{k=1}^{n} gcd(n, k)`.
pub fn connes_average(n: u64) -> Result<BigRational> {
    let fact = numtheory::factorize(n)?;
    let mut sum = BigRational::zero();
    for (d, phi) in numtheory::divisors_with_phi(&fact) {
        sum += BigRational::new(BigInt::from(phi), BigInt::from(d));
    }
    Ok(sum)
}

/// `∏_{p | n} (1 + (1 − 1/p) ord_p(n))`.
pub fn valuation_product(n: u64) -> Result<BigRational> {
    let fact = numtheory::factorize(n)?;
    let mut acc = BigRational::one();
    for (&p, &e) in fact.factors() {
        let p = BigInt::from(p);
        acc *= BigRational::new(&p + (&p - 1u32) * e, p);
    }
    Ok(acc)
}

/// Outcome of running every applicable route on one query.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub query: MomentQuery,
    pub brute: MomentValue,
    pub euler_product: MomentValue,
    /// Integer exponents only.
    pub census: Option<BigRational>,
    /// Single modulus with `w = 1` only.
    pub connes: Option<BigRational>,
    pub agree: bool,
    /// Complex exponents only.
    pub max_abs_diff: Option<f64>,
}

impl MomentReport {
    /// The defining (brute-force) value.
    pub fn value(&self) -> &MomentValue {
        &self.brute
    }

    /// `(route name, value)` for every route that ran.
    pub fn routes(&self) -> Vec<(&'static str, MomentValue)> {
        let mut out = vec![("brute", self.brute.clone()), ("euler_product", self.euler_product.clone())];
        if let Some(c) = &self.census {
            out.push(("census", MomentValue::Exact(c.clone())));
        }
        if let Some(c) = &self.connes {
            out.push(("connes", MomentValue::Exact(c.clone())));
        }
        out
    }
}

/// Differential runner over all routes.
#[derive(Debug, Clone, Copy)]
pub struct Verifier {
    pub cap: u64,
    /// Complex-path agreement threshold, relative to `max(1, |brute|)`.
    pub tolerance: f64,
    pub local_factor: ExactLocalFactor,
}

impl Default for Verifier {
    fn default() -> Self {
        Verifier { cap: crate::DEFAULT_ENUMERATION_CAP, tolerance: 1e-9, local_factor: local_factor_exact }
    }
}

impl Verifier {
    pub fn verify(&self, query: &MomentQuery) -> Result<MomentReport> {
        let moduli = &query.moduli;
        match query.w {
            Exponent::Integer(w) => {
                let brute = brute_moment_exact(moduli, w, self.cap)?;
                let euler = euler_product_exact_with(moduli, w, self.local_factor)?;
                let census = census_moment(moduli, w)?;
                let connes = match (moduli.as_slice(), w) {
                    ([n], 1) => Some(connes_average(*n)?),
                    _ => None,
                };
                let agree = brute == euler && brute == census && connes.as_ref().is_none_or(|c| *c == brute);
                Ok(MomentReport {
                    query: query.clone(),
                    brute: MomentValue::Exact(brute),
                    euler_product: MomentValue::Exact(euler),
                    census: Some(census),
                    connes,
                    agree,
                    max_abs_diff: None,
                })
            }
            Exponent::Complex(z) => {
                let brute = brute_moment_complex(moduli, z, self.cap)?;
                let euler = euler_product_complex(moduli, z)?;
                let diff = (brute - euler).norm();
                let agree = diff <= self.tolerance * brute.norm().max(1.0);
                Ok(MomentReport {
                    query: query.clone(),
                    brute: MomentValue::Approx(brute),
                    euler_product: MomentValue::Approx(euler),
                    census: None,
                    connes: None,
                    agree,
                    max_abs_diff: Some(diff),
                })
            }
        }
    }
}

/// [`Verifier::verify`] with default settings.
pub fn verify_query(query: &MomentQuery) -> Result<MomentReport> {
    Verifier::default().verify(query)
}
