//! Subcommand implementations.

use std::time::{SystemTime, UNIX_EPOCH};

use gcdmoment_core::abgroup::{self, AbelianGroup};
use gcdmoment_core::igusa::{self, IgusaQuery};
use gcdmoment_core::moments::{self, Exponent, MomentQuery, MomentValue, Verifier};
use gcdmoment_core::numtheory;
use gcdmoment_core::{BigRational, Complex64};

use crate::report::*;
use crate::{bench, fuzz, Cli, Command, GlobalOpts, Outcome, EXIT_DISAGREE, EXIT_OK};

pub fn dispatch(cli: &Cli) -> anyhow::Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Moment { moduli, w } => {
            let mut report = moment_report(g, &moduli.0, *w)?;
            report.generated_at = timestamp(g);
            Ok(finish(g, &report, report.agree))
        }
        Command::Mu { moduli, multiplier } => {
            let mut report = mu_report(g, &moduli.0, *multiplier)?;
            report.generated_at = timestamp(g);
            Ok(finish(g, &report, report.agree))
        }
        Command::Verify { range } => {
            let mut report = verify_report(g, *range)?;
            report.generated_at = timestamp(g);
            Ok(finish(g, &report, report.agree))
        }
        Command::Fuzz { count, inject_fault } => {
            let mut report = fuzz::run(g, *count, *inject_fault)?;
            report.generated_at = timestamp(g);
            Ok(finish(g, &report, report.failed == 0))
        }
        Command::Zeta { rank, moduli, s, truncation } => {
            let mut report = zeta_report(g, *rank, &moduli.0, *s, *truncation)?;
            report.generated_at = timestamp(g);
            Ok(finish(g, &report, report.agree))
        }
        Command::Residue { rank, moduli, residue_tolerance } => {
            let mut report = residue_report(*rank, &moduli.0, *residue_tolerance)?;
            report.generated_at = timestamp(g);
            Ok(finish(g, &report, report.agree))
        }
        Command::Bench { w, max_lcm, reps } => {
            let report = bench::run(g, *w, *max_lcm, *reps)?;
            Ok(finish(g, &report, true))
        }
    }
}

fn finish<R: Render>(g: &GlobalOpts, report: &R, agree: bool) -> Outcome {
    Outcome { rendered: report.render(g.format), code: if agree { EXIT_OK } else { EXIT_DISAGREE } }
}

fn timestamp(g: &GlobalOpts) -> Option<u64> {
    if g.no_timestamp {
        return None;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
}

pub fn moment_report(g: &GlobalOpts, moduli: &[u64], w: Exponent) -> anyhow::Result<MomentJson> {
    let verifier = Verifier { cap: g.cap, tolerance: g.tolerance, ..Verifier::default() };
    moment_report_with(&verifier, moduli, w)
}

pub fn moment_report_with(verifier: &Verifier, moduli: &[u64], w: Exponent) -> anyhow::Result<MomentJson> {
    let query = MomentQuery::new(moduli.to_vec(), w)?;
    let report = verifier.verify(&query)?;
    let local = match &query.w {
        Exponent::Integer(w) => {
            let group = AbelianGroup::new(moduli)?;
            group.profiles().map(|p| (p.p(), MomentValue::Exact((verifier.local_factor)(p, *w)))).collect()
        }
        w => moments::local_factor_table(moduli, w)?,
    };
    Ok(MomentJson::new(&report, &local))
}

/// Moduli of the `w`-fold direct product `A^w`.
pub fn power_group(moduli: &[u64], w: u32) -> Vec<u64> {
    let out: Vec<u64> = moduli.iter().copied().cycle().take(moduli.len() * w as usize).collect();
    if out.is_empty() {
        vec![1]
    } else {
        out
    }
}

pub fn mu_report(g: &GlobalOpts, moduli: &[u64], multiplier: u32) -> anyhow::Result<MuJson> {
    let group = AbelianGroup::new(moduli)?;
    let census = abgroup::mu(&group, multiplier);
    let powered = power_group(moduli, multiplier);
    let (bruteforce, skipped) = match abgroup::mu_bruteforce(&powered, g.cap) {
        Ok(b) => (Some(b), None),
        Err(gcdmoment_core::Error::Resource { size, cap, .. }) => {
            (None, Some(format!("|A^w| = {size} exceeds the enumeration cap {cap}")))
        }
        Err(e) => return Err(e.into()),
    };
    let agree = bruteforce.as_ref().is_none_or(|b| *b == census);
    Ok(MuJson {
        query: MuQueryJson { moduli: moduli.to_vec(), multiplier },
        value: ValueJson::exact(&census),
        results: MuResults { census: ValueJson::exact(&census), bruteforce: bruteforce.as_ref().map(ValueJson::exact) },
        agree,
        diagnostics: MuDiagnostics {
            order: group.order().to_string(),
            exponent: group.exponent().value().to_string(),
            bruteforce_skipped: skipped,
        },
        generated_at: None,
    })
}

pub fn zeta_report(g: &GlobalOpts, r: u32, moduli: &[u64], s: Complex64, truncation: u64) -> anyhow::Result<ZetaJson> {
    let query = IgusaQuery { r, moduli: moduli.to_vec(), s, truncation };
    let cmp = igusa::compare(&query, g.tolerance)?;
    Ok(ZetaJson {
        query: ZetaQueryJson { r, moduli: moduli.to_vec(), s: s.into(), truncation },
        results: ZetaResults {
            series: cmp.series.into(),
            euler_product: cmp.euler_product.into(),
            hurwitz_sum: cmp.hurwitz_sum.into(),
        },
        agree: cmp.agree,
        diagnostics: ZetaDiagnostics {
            tail_bound: cmp.tail_bound,
            tolerance: cmp.tolerance,
            max_series_gap: cmp.max_series_gap(),
            closed_form_gap: cmp.closed_form_gap(),
        },
        generated_at: None,
    })
}

pub fn residue_report(r: u32, moduli: &[u64], tolerance: f64) -> anyhow::Result<ResidueJson> {
    let est = igusa::residue_at_pole(r, moduli)?;
    Ok(ResidueJson {
        r,
        moduli: moduli.to_vec(),
        estimate: est.estimate,
        target: moments::render_rational(&est.target),
        relative_error: est.relative_error,
        tolerance,
        agree: est.relative_error <= tolerance,
        epsilons: est.epsilons,
        samples: est.samples,
        richardson: est.richardson,
        generated_at: None,
    })
}

fn check(name: &str, pass: bool, detail: String) -> CheckJson {
    CheckJson { name: name.to_string(), pass, detail }
}

fn golden_moment(g: &GlobalOpts, name: &str, moduli: &[u64], w: u32, want: &BigRational) -> anyhow::Result<CheckJson> {
    let report = moment_report(g, moduli, Exponent::Integer(w))?;
    let got = report.value.render();
    let pass = report.agree && report.value == ValueJson::exact(want);
    Ok(check(name, pass, format!("got {got}, want {}", moments::render_rational(want))))
}

/// Golden values plus exhaustive identities up to `range`.
pub fn verify_report(g: &GlobalOpts, range: u64) -> anyhow::Result<VerifyJson> {
    let q = abgroup::ratio;
    let mut checks = vec![
        golden_moment(g, "single modulus 12", &[12], 1, &q(10, 3))?,
        golden_moment(g, "moduli 6,4", &[6, 4], 1, &q(35, 6))?,
        golden_moment(g, "second moment of modulus 12", &[12], 2, &q(121, 6))?,
    ];

    let table = moments::local_factor_table(&[6, 4], &Exponent::Integer(1))?;
    let want = [(2, q(7, 2)), (3, q(5, 3))];
    let pass = table.len() == want.len()
        && table.iter().zip(&want).all(|((p, v), (wp, wv))| p == wp && v.as_exact() == Some(wv));
    let rendered: Vec<String> = table.iter().map(|(p, v)| format!("p={p}: {}", ValueJson::from(v).render())).collect();
    checks.push(check("local factors of 6,4", pass, rendered.join(", ")));

    let mut bad = None;
    for n in 1..=range {
        let connes = moments::connes_average(n)?;
        let euler = moments::euler_product_exact(&[n], 1)?;
        let brute = moments::brute_moment_exact(&[n], 1, g.cap)?;
        if connes != euler || euler != brute {
            bad = Some(n);
            break;
        }
    }
    checks.push(check(
        "divisor average equals E[X] for every n",
        bad.is_none(),
        match bad {
            None => format!("n = 1..={range}"),
            Some(n) => format!("mismatch at n = {n}"),
        },
    ));

    let pair_range = range.min(300);
    let mut bad = None;
    'outer: for n in 1..=pair_range {
        for m in 1..=pair_range {
            if numtheory::gcd_divisor_sum(n, m)? != numtheory::gcd(n, m) {
                bad = Some((n, m));
                break 'outer;
            }
        }
    }
    checks.push(check(
        "totient sum over common divisors equals gcd",
        bad.is_none(),
        match bad {
            None => format!("n, m = 1..={pair_range}"),
            Some((n, m)) => format!("mismatch at n = {n}, m = {m}"),
        },
    ));

    let mut bad = None;
    for moduli in [[4u64, 2], [6, 4], [8, 12], [9, 3]] {
        let group = AbelianGroup::new(&moduli)?;
        for w in 1..=3 {
            let census = abgroup::mu(&group, w);
            if abgroup::mu_bruteforce(&power_group(&moduli, w), g.cap)? != census {
                bad = Some((moduli, w));
            }
        }
    }
    checks.push(check(
        "order census matches enumeration",
        bad.is_none(),
        match bad {
            None => "four groups, w = 1..=3".to_string(),
            Some((m, w)) => format!("mismatch for {m:?}, w = {w}"),
        },
    ));

    let zeta = zeta_report(g, 0, &[12], Complex64::new(3.0, 0.0), 100_000)?;
    checks.push(check(
        "zeta routes agree for 12 at s = 3",
        zeta.agree,
        format!(
            "series gap {:e}, closed-form gap {:e}",
            zeta.diagnostics.max_series_gap, zeta.diagnostics.closed_form_gap
        ),
    ));

    let residue = residue_report(0, &[12], 1e-5)?;
    checks.push(check(
        "residue at the pole for 12",
        residue.agree,
        format!("estimate {} vs {}, rel. error {:e}", residue.estimate, residue.target, residue.relative_error),
    ));

    let agree = checks.iter().all(|c| c.pass);
    Ok(VerifyJson { checks, agree, generated_at: None })
}
