//! Wall-time comparison of the exact routes over a ladder of lcm values.

use std::time::Instant;

use gcdmoment_core::abgroup::{self, AbelianGroup};
use gcdmoment_core::moments;
use gcdmoment_core::BigRational;

use crate::report::{BenchJson, BenchRow};
use crate::GlobalOpts;

type Route<'a> = (&'static str, Box<dyn Fn() -> anyhow::Result<BigRational> + 'a>);

/// Highly composite lcm values; each rung is benchmarked as a single modulus.
pub const LADDER: [u64; 6] = [1, 12, 360, 5040, 55440, 720720];

fn time_min<F: FnMut() -> anyhow::Result<BigRational>>(reps: u32, mut f: F) -> anyhow::Result<(u64, BigRational)> {
    let mut best = u64::MAX;
    let mut value = None;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let v = f()?;
        best = best.min(start.elapsed().as_nanos() as u64);
        value = Some(v);
    }
    Ok((best, value.expect("at least one repetition")))
}

pub fn run(g: &GlobalOpts, w: u32, max_lcm: u64, reps: u32) -> anyhow::Result<BenchJson> {
    let mut rows = Vec::new();
    for &lcm in LADDER.iter().filter(|&&l| l <= max_lcm) {
        let moduli = [lcm];
        let routes: [Route; 3] = [
            ("brute", Box::new(|| Ok(moments::brute_moment_exact(&moduli, w, g.cap)?))),
            ("euler_product", Box::new(|| Ok(moments::euler_product_exact(&moduli, w)?))),
            ("census", Box::new(|| Ok(abgroup::mu(&AbelianGroup::new(&moduli)?, w)))),
        ];
        for (route, f) in routes {
            let (nanos, value) = time_min(reps, f)?;
            rows.push(BenchRow { lcm, route: route.to_string(), nanos, value: moments::render_rational(&value) });
        }
    }
    Ok(BenchJson { w, rows })
}
