//! Parameter grid sweeps.

use std::path::Path;

use anyhow::Result;
use lorenz_acim::scalar::format_rational;
use lorenz_acim::{
    classify, equivalence_check, minimal_period, rotation_interval_estimate, with_map, AnyMap,
    Error, MapParams, Rational, Scalar,
};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{write_json, write_table};
use crate::{Format, InputError};

const FIELDS: [&str; 4] = ["classify", "equivalence", "kappa", "rho"];

/// A fully parsed scan request.
#[derive(Debug)]
pub struct ScanSpec {
    a: Vec<Rational>,
    /// `None` locks b to a.
    b: Option<Vec<Rational>>,
    c: Vec<Rational>,
    fields: Vec<&'static str>,
    exact: bool,
    rho_steps: usize,
}

/// `lo:hi:step` (inclusive of `hi`) or a single value.
fn parse_range(name: &str, spec: &str) -> Result<Vec<Rational>> {
    let bad = |why: &str| InputError(format!("--{name} {spec:?}: {why}"));
    let parse = |s: &str| Rational::parse_str(s).map_err(|e| bad(&e.to_string()));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![parse(v)?]),
        [lo, hi, step] => {
            let (lo, hi, step) = (parse(lo)?, parse(hi)?, parse(step)?);
            if step <= Rational::zero() {
                return Err(bad("step must be positive").into());
            }
            let count = ((hi.clone() - lo.clone()) / step.clone()).floor();
            if count < Rational::zero() {
                return Ok(Vec::new());
            }
            let count = count
                .to_integer()
                .to_usize()
                .filter(|n| *n < 10_000_000)
                .ok_or_else(|| bad("too many grid points"))?;
            Ok((0..=count)
                .map(|i| lo.clone() + step.clone() * Rational::from_integer(i.into()))
                .collect())
        }
        _ => Err(bad("expected lo:hi:step or a single value").into()),
    }
}

impl ScanSpec {
    pub fn parse(
        a: &str,
        b: Option<&str>,
        c: &str,
        fields: &str,
        exact: bool,
        rho_steps: usize,
    ) -> Result<Self> {
        let mut wanted = Vec::new();
        for f in fields.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            let known = FIELDS.iter().find(|k| **k == f).ok_or_else(|| {
                InputError(format!(
                    "unknown field {f:?}; expected one of {}",
                    FIELDS.join(", ")
                ))
            })?;
            if !wanted.contains(known) {
                wanted.push(*known);
            }
        }
        wanted.sort_by_key(|f| FIELDS.iter().position(|k| k == f));
        let exact = exact
            || [Some(a), b, Some(c)]
                .iter()
                .flatten()
                .any(|s| s.contains('/'));
        Ok(Self {
            a: parse_range("a", a)?,
            b: b.map(|b| parse_range("b", b)).transpose()?,
            c: parse_range("c", c)?,
            fields: wanted,
            exact,
            rho_steps,
        })
    }

    fn points(&self) -> Vec<(Rational, Rational, Rational)> {
        let mut out = Vec::new();
        for a in &self.a {
            let bs = self
                .b
                .as_ref()
                .map_or_else(|| vec![a.clone()], Clone::clone);
            for b in bs {
                for c in &self.c {
                    out.push((a.clone(), b.clone(), c.clone()));
                }
            }
        }
        out
    }

    fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["a", "b", "c", "status"];
        for f in &self.fields {
            h.extend_from_slice(match *f {
                "classify" => &["class"][..],
                "equivalence" => &["equivalent"],
                "kappa" => &["kappa"],
                _ => &["rho_lo", "rho_hi"],
            });
        }
        h
    }
}

/// One grid point; empty strings mark analyses that were skipped or failed.
#[derive(Debug, Default, Serialize)]
struct Row {
    a: String,
    b: String,
    c: String,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equivalent: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_hi: Option<f64>,
}

impl Row {
    fn cells(&self, spec: &ScanSpec) -> Vec<String> {
        let text = |x: &Option<String>| x.clone().unwrap_or_default();
        let num = |x: &Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let mut out = vec![
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.status.clone(),
        ];
        for f in &spec.fields {
            match *f {
                "classify" => out.push(text(&self.class)),
                "equivalence" => out.push(text(&self.equivalent)),
                "kappa" => out.push(text(&self.kappa)),
                _ => out.extend([num(&self.rho_lo), num(&self.rho_hi)]),
            }
        }
        out
    }
}

fn analyse<T: Scalar>(p: &MapParams<T>, spec: &ScanSpec, row: &mut Row) {
    let mut first_error: Option<&'static str> = None;
    let mut note = |e: Error| {
        first_error.get_or_insert(e.name());
    };
    let want = |f: &str| spec.fields.contains(&f);
    if want("classify") {
        match classify(p) {
            Ok(r) => row.class = Some(r.class.name().into()),
            Err(e) => note(e),
        }
    }
    if want("equivalence") {
        match equivalence_check(p) {
            Ok(v) => row.equivalent = Some(v.name().into()),
            Err(e) => note(e),
        }
    }
    if want("kappa") && p.boundary_sum() > T::one() {
        match minimal_period(p, lorenz_acim::periodic::DEFAULT_MAX_DEPTH) {
            Ok(k) => row.kappa = Some(k.to_string()),
            Err(e) => note(e),
        }
    }
    if want("rho") {
        match rotation_interval_estimate(p, spec.rho_steps) {
            Ok(r) => {
                row.rho_lo = Some(r.lo);
                row.rho_hi = Some(r.hi);
            }
            Err(e) => note(e),
        }
    }
    row.status = match first_error {
        None => "ok".into(),
        Some(name) => format!("error:{name}"),
    };
}

fn evaluate(spec: &ScanSpec, (a, b, c): &(Rational, Rational, Rational)) -> Row {
    let map = if spec.exact {
        MapParams::new(a.clone(), b.clone(), c.clone()).map(AnyMap::Exact)
    } else {
        let f = |x: &Rational| x.to_f64().unwrap_or(f64::NAN);
        MapParams::new(f(a), f(b), f(c)).map(AnyMap::Float)
    };
    let show = |x: &Rational| {
        if spec.exact {
            format_rational(x)
        } else {
            x.to_f64().unwrap_or(f64::NAN).to_string()
        }
    };
    let mut row = Row {
        a: show(a),
        b: show(b),
        c: show(c),
        ..Row::default()
    };
    match map {
        Ok(map) => with_map!(&map, p => analyse(p, spec, &mut row)),
        Err(_) => row.status = "invalid".into(),
    }
    row
}

pub fn run(spec: &ScanSpec, jobs: Option<usize>, format: Format, out: Option<&Path>) -> Result<()> {
    let points = spec.points();
    let compute = || -> Vec<Row> { points.par_iter().map(|pt| evaluate(spec, pt)).collect() };
    let rows = match jobs {
        Some(0) => return Err(InputError("--jobs must be at least 1".into()).into()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(compute),
        None => compute(),
    };
    match format {
        Format::Json => write_json(out, &rows),
        Format::Csv => {
            let cells: Vec<Vec<String>> = rows.iter().map(|r| r.cells(spec)).collect();
            write_table(out, &spec.header(), &cells)
        }
    }
}
