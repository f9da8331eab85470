//! Seeded differential fuzzing of the moment routes.
//!
//! Instance `i` draws from its own ChaCha8 stream (`seed`, stream `i`), so the
//! report does not depend on the worker count or scheduling order.

use gcdmoment_core::abgroup::PPrimaryProfile;
use gcdmoment_core::moments::{self, Exponent, Verifier};
use gcdmoment_core::{numtheory, BigRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::commands::moment_report_with;
use crate::report::{FuzzInstanceJson, FuzzJson, MomentJson};
use crate::{GlobalOpts, WORKERS_ENV};

/// Draws instance `index`: 1 to 4 moduli in 1..=60 and `w` in 0..=3,
/// redrawn while the lcm exceeds `cap`.
pub fn draw(seed: u64, index: u64, cap: u64) -> (Vec<u64>, u32) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let k = rng.gen_range(1..=4);
        let moduli: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=60)).collect();
        let w = rng.gen_range(0..=3);
        let fits = numtheory::lcm_all(&moduli).ok().and_then(|l| u64::try_from(l).ok()).is_some_and(|l| l <= cap);
        if fits {
            return (moduli, w);
        }
    }
}

/// Local factor with a spurious extra term at the top valuation.
fn faulty_local_factor(profile: &PPrimaryProfile, w: u32) -> BigRational {
    let good = moments::local_factor_exact(profile, w);
    let p = BigRational::from_integer(profile.p().into());
    let nu_k = *profile.nus().last().expect("profile has a leading zero") as i32;
    let one = BigRational::from_integer(1.into());
    good + (&one - p.recip()) * p.pow(nu_k * (w as i32 - 1))
}

fn workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn run(g: &GlobalOpts, count: u64, inject_fault: bool) -> anyhow::Result<FuzzJson> {
    let mut verifier = Verifier { cap: g.cap, tolerance: g.tolerance, ..Verifier::default() };
    if inject_fault {
        verifier.local_factor = faulty_local_factor;
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers()).build()?;
    let seed = g.seed;
    let cap = g.cap;
    let results: Vec<anyhow::Result<(FuzzInstanceJson, MomentJson)>> = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|index| {
                let (moduli, w) = draw(seed, index, cap);
                let report = moment_report_with(&verifier, &moduli, Exponent::Integer(w))?;
                Ok((FuzzInstanceJson { index, moduli, w, agree: report.agree }, report))
            })
            .collect()
    });
    let mut instances = Vec::with_capacity(results.len());
    let mut first_counterexample = None;
    for r in results {
        let (inst, report) = r?;
        if !inst.agree && first_counterexample.is_none() {
            first_counterexample = Some(report);
        }
        instances.push(inst);
    }
    let passed = instances.iter().filter(|i| i.agree).count() as u64;
    Ok(FuzzJson { seed, count, passed, failed: count - passed, first_counterexample, instances, generated_at: None })
}
