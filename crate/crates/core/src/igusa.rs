//! The Igusa-type zeta function `ζ^I(s, A) = Σ_{m≥1} |Hom(A, ℤ/m)| m^{-s}` for
//! `A = ℤ^r × ∏ ℤ/n_j`.
//!
//! Three evaluations are provided in the half-plane `ℜ(s) > r + 1`: the
//! truncated Dirichlet series with a rigorous tail bound, an Euler product
//! against `ζ(s − r)`, and a finite sum of Hurwitz zetas over one period of
//! `gcd(l, n_1)⋯gcd(l, n_k)`. The simple pole at `s = r + 1` has residue
//! `E[X(A_tors)]`, which [`residue_at_pole`] recovers by Richardson
//! extrapolation on the Hurwitz form.
//!
//! Everything here is binary64; functions report error budgets instead of
//! claiming exactness.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::abgroup::AbelianGroup;
use crate::error::{Error, Result};
use crate::moments;
use crate::numtheory;

/// `|Hom(ℤ^r × ∏ ℤ/n_j, ℤ/m)| = m^r ∏ gcd(m, n_j)`.
pub fn hom_count(r: u32, moduli: &[u64], m: u64) -> Result<BigUint> {
    if m == 0 {
        return Err(Error::usage("m must be positive"));
    }
    let torsion: BigUint = moduli.iter().map(|&n| BigUint::from(numtheory::gcd(m, n))).product();
    Ok(BigUint::from(m).pow(r) * torsion)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IgusaQuery {
    /// Free rank.
    pub r: u32,
    /// Torsion moduli; empty means `A = ℤ^r`.
    pub moduli: Vec<u64>,
    pub s: Complex64,
    /// Number of Dirichlet-series terms.
    pub truncation: u64,
}

/// Partial sum with a bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// All three evaluations of one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaComparison {
    pub series: Complex64,
    pub euler_product: Complex64,
    pub hurwitz_sum: Complex64,
    pub tail_bound: f64,
    pub tolerance: f64,
    pub agree: bool,
}

impl ZetaComparison {
    pub fn max_series_gap(&self) -> f64 {
        (self.series - self.euler_product).norm().max((self.series - self.hurwitz_sum).norm())
    }

    pub fn closed_form_gap(&self) -> f64 {
        (self.euler_product - self.hurwitz_sum).norm()
    }
}

fn check_moduli(moduli: &[u64]) -> Result<()> {
    if moduli.contains(&0) {
        return Err(Error::usage("moduli must be positive"));
    }
    Ok(())
}

fn check_half_plane(r: u32, s: Complex64) -> Result<()> {
    if !(s.re > r as f64 + 1.0) {
        return Err(Error::domain(format!("Re(s) = {} must exceed r + 1 = {}", s.re, r + 1)));
    }
    Ok(())
}

fn torsion_order(moduli: &[u64]) -> f64 {
    moduli.iter().map(|&n| n as f64).product()
}

/// Neumaier-compensated complex sum.
#[derive(Default)]
struct Compensated {
    sum: Complex64,
    comp: Complex64,
}

impl Compensated {
    fn add(&mut self, x: Complex64) {
        fn step(sum: &mut f64, comp: &mut f64, x: f64) {
            let t = *sum + x;
            if sum.abs() >= x.abs() {
                *comp += (*sum - t) + x;
            } else {
                *comp += (x - t) + *sum;
            }
            *sum = t;
        }
        step(&mut self.sum.re, &mut self.comp.re, x.re);
        step(&mut self.sum.im, &mut self.comp.im, x.im);
    }

    fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// `x^{-s}` for real `x > 0`.
fn real_pow_neg(x: f64, s: Complex64) -> Complex64 {
    (-s * x.ln()).exp()
}

/// `Σ_{m=1}^{M} |Hom(A, ℤ/m)| m^{-s}` and the bound
/// `|A_tors| · M^{r+1−ℜ(s)} / (ℜ(s) − r − 1)` on the rest.
pub fn series_partial(query: &IgusaQuery) -> Result<SeriesValue> {
    check_moduli(&query.moduli)?;
    check_half_plane(query.r, query.s)?;
    if query.truncation == 0 {
        return Err(Error::usage("truncation must be positive"));
    }
    let shift = query.s - query.r as f64;
    let moduli: Vec<u64> = query.moduli.iter().copied().filter(|&n| n > 1).collect();
    let mut sum = Compensated::default();
    for m in 1..=query.truncation {
        let x: f64 = moduli.iter().map(|&n| numtheory::gcd(m, n) as f64).product();
        sum.add(real_pow_neg(m as f64, shift) * x);
    }
    let excess = query.s.re - query.r as f64 - 1.0;
    let tail_bound = torsion_order(&query.moduli) * (query.truncation as f64).powf(-excess) / excess;
    Ok(SeriesValue { value: sum.total(), tail_bound })
}

const BERNOULLI_2K: [f64; 7] =
    [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0];

/// Euler–Maclaurin terms kept after the direct sum (through `B_12`).
const EM_ORDER: usize = 6;
const EM_DIRECT_TERMS: u64 = 20;

/// Hurwitz zeta `ζ(s, q) = Σ_{m≥0} (m + q)^{-s}` for `ℜ(s) > 1`, `0 < q ≤ 1`,
/// together with a bound on the truncation error.
///
/// Direct summation of the first `N` terms (at least 20) followed by
/// Euler–Maclaurin corrections through `B_12`. The returned bound is the
/// Backlund estimate `|s + 13| / (ℜ(s) + 13)` times the first omitted term;
/// `N` is doubled until that bound drops below `1e-15`.
pub fn hurwitz_zeta_with_bound(s: Complex64, q: f64) -> Result<(Complex64, f64)> {
    if !(s.re > 1.0) {
        return Err(Error::domain(format!("Hurwitz zeta needs Re(s) > 1, got {s}")));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::domain(format!("Hurwitz zeta needs 0 < q <= 1, got {q}")));
    }
    let mut n = EM_DIRECT_TERMS.max(s.norm().ceil() as u64);
    loop {
        let (value, bound) = hurwitz_em(s, q, n);
        if bound <= 1e-15 || n >= 1 << 16 {
            return Ok((value, bound));
        }
        n *= 2;
    }
}

fn hurwitz_em(s: Complex64, q: f64, n: u64) -> (Complex64, f64) {
    let mut head = Compensated::default();
    // largest terms last keeps the small ones from being absorbed
    for m in (0..n).rev() {
        head.add(real_pow_neg(m as f64 + q, s));
    }
    let a = n as f64 + q;
    let a_pow = real_pow_neg(a, s);
    let mut tail = a_pow * a / (s - 1.0) + a_pow * 0.5;
    // rising factorial s(s+1)⋯(s+2j−2) / (2j)! · a^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut a_term = a_pow / a;
    for j in 0..EM_ORDER {
        tail += rising * (BERNOULLI_2K[j] / fact) * a_term;
        let next = 2 * j as u32 + 1;
        rising *= (s + next as f64) * (s + (next + 1) as f64);
        fact *= ((next + 2) * (next + 3)) as f64;
        a_term /= a * a;
    }
    let next_term = (rising * (BERNOULLI_2K[EM_ORDER] / fact) * a_term).norm();
    let order = 2.0 * EM_ORDER as f64 + 1.0;
    let bound = next_term * (s + order).norm() / (s.re + order);
    (head.total() + tail, bound)
}

pub fn hurwitz_zeta(s: Complex64, q: f64) -> Result<Complex64> {
    hurwitz_zeta_with_bound(s, q).map(|(v, _)| v)
}

/// Riemann zeta for `ℜ(s) > 1`.
pub fn riemann_zeta(s: Complex64) -> Result<Complex64> {
    hurwitz_zeta(s, 1.0)
}

/// `ζ(s − r) · ∏_{p | lcm} B_p(s)` with `x = p^{r−s}` and
///
/// `B_p = p^{ν_1+…+ν_k} x^{ν_k} + (1 − x) Σ_{j<k} p^{ν_0+…+ν_j} Σ_{μ=ν_j}^{ν_{j+1}−1} p^{(k−j)μ} x^μ`,
///
/// i.e. `(1 − x)` times the local Euler factor `Σ_e x^e p^{Σ_i min(e, ν_i)}`.
pub fn zeta_euler_product(r: u32, moduli: &[u64], s: Complex64) -> Result<Complex64> {
    check_moduli(moduli)?;
    check_half_plane(r, s)?;
    let shift = s - r as f64;
    let mut acc = riemann_zeta(shift)?;
    if moduli.is_empty() {
        return Ok(acc);
    }
    let group = AbelianGroup::new(moduli)?;
    for prof in group.profiles() {
        let ln_p = (prof.p() as f64).ln();
        // p^{a} x^{b} = exp((a − b(s − r)) ln p)
        let term = |a: f64, b: f64| ((-shift * b + a) * ln_p).exp();
        let nus = prof.nus();
        let k = prof.k();
        let total: f64 = nus.iter().map(|&v| v as f64).sum();
        let mut inner = Complex64::zero();
        let mut prefix = 0.0;
        for j in 0..k {
            prefix += nus[j] as f64;
            for mu in nus[j]..nus[j + 1] {
                let mu = mu as f64;
                inner += term(prefix + (k - j) as f64 * mu, mu);
            }
        }
        let x = term(0.0, 1.0);
        acc *= term(total, nus[k] as f64) + (Complex64::one() - x) * inner;
    }
    Ok(acc)
}

/// `lcm^{r−s} Σ_{l=1}^{lcm} gcd(l, n_1)⋯gcd(l, n_k) · ζ(s − r, l / lcm)`.
pub fn zeta_hurwitz_sum(r: u32, moduli: &[u64], s: Complex64) -> Result<Complex64> {
    check_moduli(moduli)?;
    check_half_plane(r, s)?;
    let lcm = period(moduli)?;
    let shift = s - r as f64;
    let mut sum = Compensated::default();
    for l in 1..=lcm {
        let x: f64 = moduli.iter().map(|&n| numtheory::gcd(l, n) as f64).product();
        sum.add(hurwitz_zeta(shift, l as f64 / lcm as f64)? * x);
    }
    Ok(sum.total() * real_pow_neg(lcm as f64, shift))
}

fn period(moduli: &[u64]) -> Result<u64> {
    if moduli.is_empty() {
        return Ok(1);
    }
    let cap = crate::DEFAULT_ENUMERATION_CAP;
    let lcm = numtheory::lcm_all(moduli)?;
    match lcm.to_u64() {
        Some(l) if l <= cap => Ok(l),
        _ => Err(Error::Resource { what: "Hurwitz period sum", size: lcm.to_string(), cap }),
    }
}

/// Evaluates `query` all three ways. `agree` holds when every pairwise gap is
/// within `tail_bound + tolerance`.
pub fn compare(query: &IgusaQuery, tolerance: f64) -> Result<ZetaComparison> {
    let series = series_partial(query)?;
    let euler_product = zeta_euler_product(query.r, &query.moduli, query.s)?;
    let hurwitz_sum = zeta_hurwitz_sum(query.r, &query.moduli, query.s)?;
    let budget = series.tail_bound + tolerance;
    let mut cmp = ZetaComparison {
        series: series.value,
        euler_product,
        hurwitz_sum,
        tail_bound: series.tail_bound,
        tolerance,
        agree: false,
    };
    cmp.agree = cmp.max_series_gap() <= budget && cmp.closed_form_gap() <= budget;
    Ok(cmp)
}

/// Offsets `ε` at which `ε · ζ^I(r + 1 + ε)` is sampled.
pub const RESIDUE_EPSILONS: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueEstimate {
    /// Twice-extrapolated value.
    pub estimate: f64,
    pub epsilons: Vec<f64>,
    /// `ε · ℜ ζ^I(r + 1 + ε)` for each `ε`.
    pub samples: Vec<f64>,
    /// First Richardson level, one per neighbouring pair of samples.
    pub richardson: Vec<f64>,
    /// `E[X(A_tors)]`, exact.
    pub target: BigRational,
    pub relative_error: f64,
}

/// Residue of `ζ^I(s, ℤ^r × ∏ ℤ/n_j)` at `s = r + 1`.
///
/// Near the pole `ε ζ^I(r + 1 + ε) = Res + c_1 ε + c_2 ε² + …`. Samples at
/// `ε = 10⁻², 10⁻³, 10⁻⁴` are combined as `(10 f(ε) − f(10ε)) / 9` to cancel
/// `c_1`, and the two results as `(100 R_2 − R_1) / 99` to cancel `c_2`.
pub fn residue_at_pole(r: u32, moduli: &[u64]) -> Result<ResidueEstimate> {
    check_moduli(moduli)?;
    let torsion = if moduli.is_empty() { vec![1] } else { moduli.to_vec() };
    let samples = RESIDUE_EPSILONS
        .iter()
        .map(|&eps| {
            let s = Complex64::new(r as f64 + 1.0 + eps, 0.0);
            zeta_hurwitz_sum(r, &torsion, s).map(|z| eps * z.re)
        })
        .collect::<Result<Vec<f64>>>()?;
    let richardson: Vec<f64> = samples.windows(2).map(|f| (10.0 * f[1] - f[0]) / 9.0).collect();
    let estimate = (100.0 * richardson[1] - richardson[0]) / 99.0;
    let target = moments::euler_product_exact(&torsion, 1)?;
    let exact = moments::rational_to_f64(&target);
    Ok(ResidueEstimate {
        estimate,
        epsilons: RESIDUE_EPSILONS.to_vec(),
        samples,
        richardson,
        target,
        relative_error: ((estimate - exact) / exact).abs(),
    })
}
