//! Machine-readable report types and their json/csv/text renderings.
//!
//! Exact values are always strings `"num/den"`; complex values are
//! `{"re": …, "im": …}` with shortest round-trip decimals.

use std::fmt::Write as _;

use gcdmoment_core::moments::{self, MomentReport, MomentValue};
use gcdmoment_core::{BigRational, Complex64};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueJson {
    Exact(String),
    Complex(ComplexJson),
}

impl ValueJson {
    pub fn exact(q: &BigRational) -> Self {
        ValueJson::Exact(moments::render_rational(q))
    }

    pub fn render(&self) -> String {
        match self {
            ValueJson::Exact(s) => s.clone(),
            ValueJson::Complex(z) => render_complex(z.re, z.im),
        }
    }
}

impl From<&MomentValue> for ValueJson {
    fn from(v: &MomentValue) -> Self {
        match v {
            MomentValue::Exact(q) => ValueJson::exact(q),
            MomentValue::Approx(z) => ValueJson::Complex((*z).into()),
        }
    }
}

pub fn render_complex(re: f64, im: f64) -> String {
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!("{re}{sign}{}i", im.abs())
}

/// Something the CLI can print in any [`Format`].
pub trait Render: Serialize {
    fn csv(&self) -> String;
    fn text(&self) -> String;

    fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json(),
            Format::Csv => self.csv(),
            Format::Text => self.text(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryJson {
    pub moduli: Vec<u64>,
    pub w: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentResults {
    pub brute: ValueJson,
    pub euler_product: ValueJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub census: Option<ValueJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connes: Option<ValueJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalFactorJson {
    pub p: u64,
    pub value: ValueJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentDiagnostics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_abs_diff: Option<f64>,
    pub local_factors: Vec<LocalFactorJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentJson {
    pub query: QueryJson,
    pub value: ValueJson,
    pub results: MomentResults,
    pub agree: bool,
    pub diagnostics: MomentDiagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

impl MomentJson {
    pub fn new(report: &MomentReport, local_factors: &[(u64, MomentValue)]) -> Self {
        let exact = |q: &Option<BigRational>| q.as_ref().map(ValueJson::exact);
        MomentJson {
            query: QueryJson { moduli: report.query.moduli.clone(), w: report.query.w.to_string() },
            value: report.value().into(),
            results: MomentResults {
                brute: (&report.brute).into(),
                euler_product: (&report.euler_product).into(),
                census: exact(&report.census),
                connes: exact(&report.connes),
            },
            agree: report.agree,
            diagnostics: MomentDiagnostics {
                max_abs_diff: report.max_abs_diff,
                local_factors: local_factors.iter().map(|(p, v)| LocalFactorJson { p: *p, value: v.into() }).collect(),
            },
            generated_at: None,
        }
    }

    fn route_rows(&self) -> Vec<(&'static str, &ValueJson)> {
        let r = &self.results;
        let mut rows = vec![("brute", &r.brute), ("euler_product", &r.euler_product)];
        rows.extend(r.census.as_ref().map(|v| ("census", v)));
        rows.extend(r.connes.as_ref().map(|v| ("connes", v)));
        rows
    }
}

impl Render for MomentJson {
    fn csv(&self) -> String {
        let mut out = String::from("route,value\n");
        for (route, v) in self.route_rows() {
            let _ = writeln!(out, "{route},{}", v.render());
        }
        out
    }

    fn text(&self) -> String {
        let mut out = format!("E[X^{}] for moduli {:?}\n", self.query.w, self.query.moduli);
        for (route, v) in self.route_rows() {
            let _ = writeln!(out, "  {route:<14} {}", v.render());
        }
        for lf in &self.diagnostics.local_factors {
            let _ = writeln!(out, "  local p={:<8} {}", lf.p, lf.value.render());
        }
        if let Some(d) = self.diagnostics.max_abs_diff {
            let _ = writeln!(out, "  max |diff|     {d:e}");
        }
        let _ = writeln!(out, "agree: {}", self.agree);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuQueryJson {
    pub moduli: Vec<u64>,
    pub multiplier: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuResults {
    pub census: ValueJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bruteforce: Option<ValueJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuJson {
    pub query: MuQueryJson,
    pub value: ValueJson,
    pub results: MuResults,
    pub agree: bool,
    pub diagnostics: MuDiagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuDiagnostics {
    pub order: String,
    pub exponent: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bruteforce_skipped: Option<String>,
}

impl Render for MuJson {
    fn csv(&self) -> String {
        let mut out = String::from("route,value\n");
        let _ = writeln!(out, "census,{}", self.results.census.render());
        if let Some(b) = &self.results.bruteforce {
            let _ = writeln!(out, "bruteforce,{}", b.render());
        }
        out
    }

    fn text(&self) -> String {
        let mut out = format!(
            "mu(A^{}) for moduli {:?} (|A| = {}, exponent {})\n",
            self.query.multiplier, self.query.moduli, self.diagnostics.order, self.diagnostics.exponent
        );
        let _ = writeln!(out, "  census         {}", self.results.census.render());
        match (&self.results.bruteforce, &self.diagnostics.bruteforce_skipped) {
            (Some(b), _) => {
                let _ = writeln!(out, "  bruteforce     {}", b.render());
            }
            (None, Some(why)) => {
                let _ = writeln!(out, "  bruteforce     skipped: {why}");
            }
            _ => {}
        }
        let _ = writeln!(out, "agree: {}", self.agree);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzInstanceJson {
    pub index: u64,
    pub moduli: Vec<u64>,
    pub w: u32,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzJson {
    pub seed: u64,
    pub count: u64,
    pub passed: u64,
    pub failed: u64,
    pub first_counterexample: Option<MomentJson>,
    pub instances: Vec<FuzzInstanceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

impl Render for FuzzJson {
    fn csv(&self) -> String {
        let mut out = String::from("index,moduli,w,agree\n");
        for i in &self.instances {
            let moduli: Vec<String> = i.moduli.iter().map(u64::to_string).collect();
            let _ = writeln!(out, "{},{},{},{}", i.index, moduli.join(" "), i.w, i.agree);
        }
        out
    }

    fn text(&self) -> String {
        let mut out = format!("fuzz seed={} count={}: {}/{} agree\n", self.seed, self.count, self.passed, self.count);
        if let Some(c) = &self.first_counterexample {
            out.push_str("first counterexample:\n");
            out.push_str(&c.text());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckJson {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyJson {
    pub checks: Vec<CheckJson>,
    pub agree: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

impl Render for VerifyJson {
    fn csv(&self) -> String {
        let mut out = String::from("check,pass,detail\n");
        for c in &self.checks {
            let _ = writeln!(out, "{},{},\"{}\"", c.name, c.pass, c.detail.replace('"', "'"));
        }
        out
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaQueryJson {
    pub r: u32,
    pub moduli: Vec<u64>,
    pub s: ComplexJson,
    pub truncation: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaResults {
    pub series: ComplexJson,
    pub euler_product: ComplexJson,
    pub hurwitz_sum: ComplexJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaDiagnostics {
    pub tail_bound: f64,
    pub tolerance: f64,
    pub max_series_gap: f64,
    pub closed_form_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaJson {
    pub query: ZetaQueryJson,
    pub results: ZetaResults,
    pub agree: bool,
    pub diagnostics: ZetaDiagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

impl Render for ZetaJson {
    fn csv(&self) -> String {
        let r = &self.results;
        let mut out = String::from("route,re,im\n");
        for (name, z) in [("series", &r.series), ("euler_product", &r.euler_product), ("hurwitz_sum", &r.hurwitz_sum)] {
            let _ = writeln!(out, "{name},{},{}", z.re, z.im);
        }
        out
    }

    fn text(&self) -> String {
        let q = &self.query;
        let r = &self.results;
        let d = &self.diagnostics;
        let mut out = format!(
            "zeta^I(s = {}) for Z^{} x {:?}, {} series terms\n",
            render_complex(q.s.re, q.s.im),
            q.r,
            q.moduli,
            q.truncation
        );
        for (name, z) in [("series", &r.series), ("euler_product", &r.euler_product), ("hurwitz_sum", &r.hurwitz_sum)] {
            let _ = writeln!(out, "  {name:<14} {}", render_complex(z.re, z.im));
        }
        let _ = writeln!(out, "  tail bound     {:e}", d.tail_bound);
        let _ = writeln!(out, "  series gap     {:e}", d.max_series_gap);
        let _ = writeln!(out, "  closed gap     {:e}", d.closed_form_gap);
        let _ = writeln!(out, "agree: {}", self.agree);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueJson {
    pub r: u32,
    pub moduli: Vec<u64>,
    pub estimate: f64,
    pub target: String,
    pub relative_error: f64,
    pub tolerance: f64,
    pub agree: bool,
    pub epsilons: Vec<f64>,
    pub samples: Vec<f64>,
    pub richardson: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

impl Render for ResidueJson {
    fn csv(&self) -> String {
        let mut out = String::from("epsilon,sample\n");
        for (e, s) in self.epsilons.iter().zip(&self.samples) {
            let _ = writeln!(out, "{e},{s}");
        }
        out
    }

    fn text(&self) -> String {
        let mut out = format!("residue at s = {} for Z^{} x {:?}\n", self.r + 1, self.r, self.moduli);
        for (e, s) in self.epsilons.iter().zip(&self.samples) {
            let _ = writeln!(out, "  eps={e:<8e} eps*zeta = {s}");
        }
        for (i, r) in self.richardson.iter().enumerate() {
            let _ = writeln!(out, "  richardson[{i}]  {r}");
        }
        let _ = writeln!(out, "  estimate       {}", self.estimate);
        let _ = writeln!(out, "  target         {}", self.target);
        let _ = writeln!(out, "  rel. error     {:e}", self.relative_error);
        let _ = writeln!(out, "agree: {}", self.agree);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub lcm: u64,
    pub route: String,
    pub nanos: u64,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchJson {
    pub w: u32,
    pub rows: Vec<BenchRow>,
}

impl Render for BenchJson {
    fn csv(&self) -> String {
        let mut out = String::from("lcm,route,nanos\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.lcm, r.route, r.nanos);
        }
        out
    }

    fn text(&self) -> String {
        let mut out = format!("{:>10} {:>14} {:>14}\n", "lcm", "route", "nanos");
        for r in &self.rows {
            let _ = writeln!(out, "{:>10} {:>14} {:>14}", r.lcm, r.route, r.nanos);
        }
        out
    }
}
