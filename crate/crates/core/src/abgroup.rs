//! Finite abelian groups `∏ ℤ/n_j`, their p-primary profiles and element-order
//! censuses.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow};

use crate::error::{Error, Result};
use crate::numtheory::{self, FactoredNat};

/// Valuation data of one prime `p` across all moduli.
///
/// `nus` holds `0 = ν_0 ≤ ν_1 ≤ … ≤ ν_k`, one entry per modulus after the
/// leading zero, so moduli prime to `p` show up as zeros. `mults[i - 1]` is the
/// number of moduli with valuation exactly `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PPrimaryProfile {
    p: u64,
    nus: Vec<u32>,
    mults: Vec<u32>,
}

impl PPrimaryProfile {
    /// Builds the profile from the valuations `ord_p(n_j)`, in any order. At
    /// least one valuation must be positive.
    pub fn from_valuations(p: u64, valuations: impl IntoIterator<Item = u32>) -> Result<Self> {
        if !numtheory::is_prime(p) {
            return Err(Error::usage(format!("{p} is not prime")));
        }
        let mut nus: Vec<u32> = std::iter::once(0).chain(valuations).collect();
        nus.sort_unstable();
        let h = *nus.last().unwrap();
        if h == 0 {
            return Err(Error::usage(format!("{p} divides none of the moduli")));
        }
        let mut mults = vec![0u32; h as usize];
        for &v in &nus[1..] {
            if v > 0 {
                mults[v as usize - 1] += 1;
            }
        }
        Ok(PPrimaryProfile { p, nus, mults })
    }

    pub fn from_moduli(p: u64, moduli: &[u64]) -> Result<Self> {
        let vals = moduli.iter().map(|&n| numtheory::ord_p(n, p)).collect::<Result<Vec<_>>>()?;
        Self::from_valuations(p, vals)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `ν_0, …, ν_k`, including the leading zero.
    pub fn nus(&self) -> &[u32] {
        &self.nus
    }

    /// Number of moduli `k`.
    pub fn k(&self) -> usize {
        self.nus.len() - 1
    }

    /// Largest valuation `h_p = ν_k`.
    pub fn h(&self) -> u32 {
        self.mults.len() as u32
    }

    /// `m_{p,i}` for `1 ≤ i ≤ h`; zero outside that range.
    pub fn mult(&self, i: u32) -> u32 {
        if i == 0 {
            return 0;
        }
        self.mults.get(i as usize - 1).copied().unwrap_or(0)
    }

    pub fn mults(&self) -> &[u32] {
        &self.mults
    }

    fn check_level(&self, l: u32, lowest: u32) -> Result<()> {
        if l < lowest || l > self.h() {
            return Err(Error::usage(format!("level {l} outside [{lowest}, {}] for p = {}", self.h(), self.p)));
        }
        Ok(())
    }

    /// `Σ_{i<l} i·w·m_i + l·Σ_{i≥l} w·m_i`, the exponent of `#{ g : p^l g = 0 }`
    /// in the `w`-fold power of the p-part.
    fn annihilated_exponent(&self, l: u32, multiplier: u32) -> u64 {
        let w = multiplier as u64;
        let below: u64 = (1..l).map(|i| i as u64 * self.mult(i) as u64).sum();
        let above: u64 = (l..=self.h()).map(|i| self.mult(i) as u64).sum();
        w * (below + l as u64 * above)
    }
}

/// `A = ∏ ℤ/n_j` with derived order, exponent and p-primary profiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    moduli: Vec<u64>,
    order: BigUint,
    exponent: FactoredNat,
    profiles: BTreeMap<u64, PPrimaryProfile>,
}

impl AbelianGroup {
    /// The group `ℤ/n_1 × ⋯ × ℤ/n_k`. Entries equal to 1 are allowed; the
    /// trivial group is `[1]`.
    pub fn new(moduli: &[u64]) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::usage("a group needs at least one modulus; use [1] for the trivial group"));
        }
        if moduli.contains(&0) {
            return Err(Error::usage("moduli must be positive"));
        }
        let order = moduli.iter().map(|&n| BigUint::from(n)).product();
        let exponent = numtheory::factorize_lcm(moduli)?;
        let profiles = exponent
            .primes()
            .map(|p| PPrimaryProfile::from_moduli(p, moduli).map(|prof| (p, prof)))
            .collect::<Result<_>>()?;
        Ok(AbelianGroup { moduli: moduli.to_vec(), order, exponent, profiles })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// `lcm(n_1, …, n_k)` with its factorization.
    pub fn exponent(&self) -> &FactoredNat {
        &self.exponent
    }

    pub fn profiles(&self) -> impl Iterator<Item = &PPrimaryProfile> {
        self.profiles.values()
    }

    pub fn profile(&self, p: u64) -> Option<&PPrimaryProfile> {
        self.profiles.get(&p)
    }

    /// The isomorphic group written as cyclic groups of prime-power order.
    pub fn primary_moduli(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for prof in self.profiles() {
            for &v in &prof.nus()[1..] {
                if v > 0 {
                    out.push(prof.p().pow(v));
                }
            }
        }
        if out.is_empty() {
            out.push(1);
        }
        out
    }
}

pub fn build_group(moduli: &[u64]) -> Result<AbelianGroup> {
    AbelianGroup::new(moduli)
}

/// `#{ g ∈ P^w : p^l g = 0 }` where `P` is the p-part described by `profile`.
pub fn count_annihilated(profile: &PPrimaryProfile, l: u32, multiplier: u32) -> Result<BigUint> {
    profile.check_level(l, 0)?;
    let e = profile.annihilated_exponent(l, multiplier);
    Ok(BigUint::from(profile.p()).pow(e))
}

/// `#{ g ∈ P^w : |g| = p^l }`, as the difference of two annihilator counts.
pub fn count_order_exact(profile: &PPrimaryProfile, l: u32, multiplier: u32) -> Result<BigUint> {
    profile.check_level(l, 1)?;
    Ok(count_annihilated(profile, l, multiplier)? - count_annihilated(profile, l - 1, multiplier)?)
}

/// Same count as [`count_order_exact`] in factored form
/// `(p^{w Σ_{i≥l} m_i} − 1) · p^{w (Σ_{i<l} i m_i + (l−1) Σ_{i≥l} m_i)}`.
pub fn count_order_exact_factored(profile: &PPrimaryProfile, l: u32, multiplier: u32) -> Result<BigUint> {
    profile.check_level(l, 1)?;
    let w = multiplier as u64;
    let p = BigUint::from(profile.p());
    let above: u64 = (l..=profile.h()).map(|i| profile.mult(i) as u64).sum();
    let below: u64 = (1..l).map(|i| i as u64 * profile.mult(i) as u64).sum();
    let head = p.clone().pow(w * above) - BigUint::one();
    Ok(head * p.pow(w * (below + (l as u64 - 1) * above)))
}

/// `μ(P^w) = 1 + Σ_{l=1}^{h} #{|g| = p^l} / p^l` for a single p-part.
pub fn mu_local(profile: &PPrimaryProfile, multiplier: u32) -> BigRational {
    let p = BigUint::from(profile.p());
    let h = profile.h();
    let denom = p.clone().pow(h);
    let mut numer = denom.clone();
    for l in 1..=h {
        let count = count_order_exact(profile, l, multiplier).expect("level in range");
        numer += count * p.clone().pow(h - l);
    }
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// `μ(A^w) = Σ_{a ∈ A^w} 1/|a|`, computed prime by prime from the census.
///
/// `multiplier = 0` gives the empty census and returns 1.
pub fn mu(group: &AbelianGroup, multiplier: u32) -> BigRational {
    group.profiles().map(|prof| mu_local(prof, multiplier)).fold(BigRational::one(), |acc, f| acc * f)
}

/// `Σ_{a ∈ A} 1/|a|` by visiting every element of `A`.
pub fn mu_bruteforce(moduli: &[u64], cap: u64) -> Result<BigRational> {
    let group = AbelianGroup::new(moduli)?;
    if group.order() > &BigUint::from(cap) {
        return Err(Error::Resource { what: "element enumeration", size: group.order().to_string(), cap });
    }
    // order of each coordinate value: n / gcd(a, n)
    let tables: Vec<Vec<u64>> = moduli.iter().map(|&n| (0..n).map(|a| n / numtheory::gcd(a, n)).collect()).collect();

    let mut by_order: HashMap<u64, u64> = HashMap::new();
    let mut digits = vec![0usize; moduli.len()];
    let mut prefix = vec![1u64; moduli.len() + 1];
    loop {
        for j in 0..moduli.len() {
            prefix[j + 1] = prefix[j].lcm(&tables[j][digits[j]]);
        }
        // innermost coordinate runs without rebuilding the prefix
        let last = moduli.len() - 1;
        let base = prefix[last];
        for &ord in &tables[last] {
            *by_order.entry(base.lcm(&ord)).or_insert(0) += 1;
        }
        let mut j = last;
        loop {
            if j == 0 {
                return Ok(sum_reciprocals(&by_order, &group));
            }
            j -= 1;
            digits[j] += 1;
            if digits[j] < tables[j].len() {
                break;
            }
            digits[j] = 0;
        }
    }
}

fn sum_reciprocals(by_order: &HashMap<u64, u64>, group: &AbelianGroup) -> BigRational {
    let e = group.exponent().to_u64().expect("exponent bounded by the cap");
    let numer: BigUint = by_order.iter().map(|(&ord, &count)| BigUint::from(count) * (e / ord)).sum();
    BigRational::new(BigInt::from(numer), BigInt::from(e))
}

/// Rational `num/den`, for tests and callers that build expectations by hand.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const CAP: u64 = crate::DEFAULT_ENUMERATION_CAP;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    /// Element-order histogram of `∏ ℤ/n_j` by direct enumeration with
    /// per-element order search. Independent of the tables used above.
    fn enumerate_orders(moduli: &[u64]) -> Vec<u64> {
        let order: u64 = moduli.iter().product();
        let mut out = Vec::with_capacity(order as usize);
        for idx in 0..order {
            let mut rest = idx;
            let elem: Vec<u64> = moduli
                .iter()
                .map(|&n| {
                    let a = rest % n;
                    rest /= n;
                    a
                })
                .collect();
            let mut t = 1u64;
            while !elem.iter().zip(moduli).all(|(&a, &n)| (a * t).is_multiple_of(n)) {
                t += 1;
            }
            out.push(t);
        }
        out
    }

    #[test]
    fn build_group_examples() {
        let g = build_group(&[6, 4]).unwrap();
        assert_eq!(g.profile(2).unwrap().nus(), &[0, 1, 2]);
        assert_eq!(g.profile(3).unwrap().nus(), &[0, 0, 1]);
        assert_eq!(g.order(), &big(24));
        assert_eq!(g.exponent().value(), &big(12));

        let t = build_group(&[1]).unwrap();
        assert_eq!(t.order(), &big(1));
        assert!(t.exponent().is_one());
        assert_eq!(t.profiles().count(), 0);

        let c = build_group(&[12]).unwrap();
        let p2 = c.profile(2).unwrap();
        assert_eq!((p2.h(), p2.mult(2), p2.mult(1)), (2, 1, 0));
        let p3 = c.profile(3).unwrap();
        assert_eq!((p3.h(), p3.mult(1)), (1, 1));

        assert!(build_group(&[]).is_err());
        assert!(build_group(&[4, 0]).is_err());
    }

    #[test]
    fn profile_invariants_hold() {
        let g = build_group(&[8, 1, 12, 18, 5]).unwrap();
        for prof in g.profiles() {
            let nus = prof.nus();
            assert_eq!(nus[0], 0);
            assert!(nus.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(*nus.last().unwrap(), prof.h());
            assert!(prof.mult(prof.h()) >= 1);
            let positive = nus[1..].iter().filter(|&&v| v > 0).count() as u32;
            assert_eq!(prof.mults().iter().sum::<u32>(), positive);
        }
        let primes: Vec<u64> = g.profiles().map(|p| p.p()).collect();
        assert_eq!(primes, vec![2, 3, 5]);
    }

    #[test]
    fn census_examples() {
        // ℤ/4 × ℤ/2
        let orders = enumerate_orders(&[4, 2]);
        let annihilated_by_2 = orders.iter().filter(|&&t| 2 % t == 0).count() as u64;
        let order_2 = orders.iter().filter(|&&t| t == 2).count() as u64;
        let order_4 = orders.iter().filter(|&&t| t == 4).count() as u64;
        assert_eq!((annihilated_by_2, order_2, order_4), (4, 3, 4));

        let prof = build_group(&[4, 2]).unwrap().profile(2).unwrap().clone();
        assert_eq!(count_annihilated(&prof, 1, 1).unwrap(), big(annihilated_by_2));
        assert_eq!(count_annihilated(&prof, 0, 7).unwrap(), big(1));
        assert_eq!(count_order_exact(&prof, 1, 1).unwrap(), big(order_2));
        assert_eq!(count_order_exact(&prof, 2, 1).unwrap(), big(order_4));

        // (ℤ/4)²
        let orders = enumerate_orders(&[4, 4]);
        assert_eq!(orders.iter().filter(|&&t| 4 % t == 0).count(), 16);
        assert_eq!(orders.iter().filter(|&&t| t == 4).count(), 12);
        let prof = build_group(&[4]).unwrap().profile(2).unwrap().clone();
        assert_eq!(count_annihilated(&prof, 2, 2).unwrap(), big(16));
        assert_eq!(count_order_exact(&prof, 2, 2).unwrap(), big(12));

        assert!(count_annihilated(&prof, 3, 1).is_err());
        assert!(count_order_exact(&prof, 0, 1).is_err());
    }

    #[test]
    fn census_matches_enumeration_for_powers() {
        for moduli in [vec![8u64, 2, 4], vec![9, 3], vec![2, 2, 2], vec![25, 5]] {
            for w in 1..=2u32 {
                let powered: Vec<u64> = (0..w).flat_map(|_| moduli.iter().copied()).collect();
                let orders = enumerate_orders(&powered);
                let g = build_group(&moduli).unwrap();
                let prof = g.profiles().next().unwrap();
                let p = prof.p();
                for l in 1..=prof.h() {
                    let expect = orders.iter().filter(|&&t| t == p.pow(l)).count() as u64;
                    assert_eq!(count_order_exact(prof, l, w).unwrap(), big(expect), "{moduli:?} w={w} l={l}");
                }
            }
        }
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu(&build_group(&[1]).unwrap(), 1), ratio(1, 1));
        assert_eq!(mu(&build_group(&[12]).unwrap(), 1), ratio(10, 3));
        assert_eq!(mu(&build_group(&[6, 4]).unwrap(), 1), ratio(35, 6));

        let direct: BigRational = enumerate_orders(&[4, 2]).iter().map(|&t| ratio(1, t as i64)).sum();
        assert_eq!(direct, ratio(7, 2));
        assert_eq!(mu(&build_group(&[4, 2]).unwrap(), 1), direct);
    }

    #[test]
    fn mu_bruteforce_examples() {
        assert_eq!(mu_bruteforce(&[12], CAP).unwrap(), ratio(10, 3));
        assert_eq!(mu_bruteforce(&[1], CAP).unwrap(), ratio(1, 1));
        assert_eq!(mu_bruteforce(&[4, 2], CAP).unwrap(), ratio(7, 2));
        assert_eq!(mu_bruteforce(&[1, 1, 4, 1, 2], CAP).unwrap(), ratio(7, 2));
    }

    #[test]
    fn mu_bruteforce_respects_cap() {
        let err = mu_bruteforce(&[1000, 1000], 999_999).unwrap_err();
        match err {
            Error::Resource { cap, .. } => assert_eq!(cap, 999_999),
            other => panic!("unexpected {other:?}"),
        }
        assert!(mu_bruteforce(&[1000, 1000], 1_000_000).is_ok());
    }

    #[test]
    fn multiplier_zero_is_trivial() {
        assert_eq!(mu(&build_group(&[12, 18]).unwrap(), 0), ratio(1, 1));
    }

    #[test]
    fn primary_moduli_are_isomorphic() {
        let g = build_group(&[6, 4]).unwrap();
        let mut pm = g.primary_moduli();
        pm.sort();
        assert_eq!(pm, vec![2, 3, 4]);
        assert_eq!(build_group(&[1, 1]).unwrap().primary_moduli(), vec![1]);
    }

    fn small_moduli() -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(1u64..=40, 1..=4).prop_filter("order ≤ 5000", |ms| ms.iter().product::<u64>() <= 5000)
    }

    proptest! {
        #[test]
        fn census_is_complete(moduli in prop::collection::vec(1u64..=200, 1..=5), w in 1u32..=3) {
            let g = build_group(&moduli).unwrap();
            for prof in g.profiles() {
                let total: BigUint = (1..=prof.h()).map(|l| count_order_exact(prof, l, w).unwrap()).sum::<BigUint>() + 1u32;
                prop_assert_eq!(total, count_annihilated(prof, prof.h(), w).unwrap());
                for l in 1..=prof.h() {
                    prop_assert_eq!(count_order_exact(prof, l, w).unwrap(), count_order_exact_factored(prof, l, w).unwrap());
                }
            }
        }

        #[test]
        fn mu_matches_bruteforce(moduli in small_moduli()) {
            prop_assert_eq!(mu(&build_group(&moduli).unwrap(), 1), mu_bruteforce(&moduli, CAP).unwrap());
        }

        #[test]
        fn power_group_law(moduli in prop::collection::vec(1u64..=12, 1..=3), w in 2u32..=3) {
            let order: u64 = moduli.iter().product();
            prop_assume!(order.pow(w) <= 1_000_000);
            let powered: Vec<u64> = (0..w).flat_map(|_| moduli.iter().copied()).collect();
            prop_assert_eq!(mu(&build_group(&moduli).unwrap(), w), mu_bruteforce(&powered, CAP).unwrap());
        }

        #[test]
        fn coprime_multiplicativity(a in prop::collection::vec(1u64..=500, 1..=3), b in prop::collection::vec(1u64..=500, 1..=3)) {
            let ga = build_group(&a).unwrap();
            let gb = build_group(&b).unwrap();
            prop_assume!(ga.order().gcd(gb.order()) == BigUint::one());
            let ab: Vec<u64> = a.iter().chain(&b).copied().collect();
            prop_assert_eq!(mu(&build_group(&ab).unwrap(), 1), mu(&ga, 1) * mu(&gb, 1));
        }

        #[test]
        fn isomorphism_invariance(moduli in small_moduli(), seed in any::<u64>()) {
            let g = build_group(&moduli).unwrap();
            let mut shuffled = moduli.clone();
            let len = shuffled.len();
            shuffled.rotate_left((seed as usize) % len);
            shuffled.reverse();
            let expect = mu(&g, 1);
            prop_assert_eq!(&mu(&build_group(&shuffled).unwrap(), 1), &expect);
            let primary = g.primary_moduli();
            prop_assert_eq!(&mu(&build_group(&primary).unwrap(), 1), &expect);
            prop_assert_eq!(&mu_bruteforce(&primary, CAP).unwrap(), &expect);
        }
    }
}
