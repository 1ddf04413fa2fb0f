//! Subcommand implementations.

use std::path::Path;

use anyhow::Result;
use lorenz_acim::density::{
    birkhoff_average, markov_density, markov_density_n, markov_map, markov_n_map, parry_density,
    renormalized_density, ulam_matrix, ulam_stationary, StepDensity, DEFAULT_MAX_ITER,
};
use lorenz_acim::io::write_density_csv;
use lorenz_acim::rotation::is_homeomorphism;
use lorenz_acim::scalar::{approx_eq, powi};
use lorenz_acim::{
    classify, equivalence_check, minimal_period, rotation_interval_estimate, rotation_number_homeo,
    with_map, AcimClass, AnyMap, CriticalPolicy, EquivalenceVerdict, Error, MapParams, Scalar,
    SidedPoint,
};
use serde_json::json;

use crate::output::{show, sink, write_json, write_table};
use crate::{Cli, Command, Format, Method, SideArg};

pub fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    let out = g.out.as_deref();
    let parse = |a: &str, b: &str, c: &str| AnyMap::parse(a, b, c, g.exact);
    match &cli.command {
        Command::Classify { a, b, c } => {
            with_map!(&parse(a, b, c)?, p => cmd_classify(p, g.format, out))
        }
        Command::Density {
            a,
            b,
            c,
            method,
            cells,
            terms,
        } => {
            let opts = DensityOpts {
                method: *method,
                cells: *cells,
                terms: *terms,
                tol: g.tol,
            };
            with_map!(&parse(a, b, c)?, p => cmd_density(p, &opts, g.format, out))
        }
        Command::Scan {
            a,
            b,
            c,
            fields,
            jobs,
            rho_steps,
        } => {
            let spec =
                crate::scan::ScanSpec::parse(a, b.as_deref(), c, fields, g.exact, *rho_steps)?;
            crate::scan::run(&spec, *jobs, g.format, out)
        }
        Command::Orbit {
            a,
            b,
            c,
            x,
            n,
            side,
            critical,
        } => {
            with_map!(&parse(a, b, c)?, p => cmd_orbit(p, x, *n, *side, *critical, g.format, out))
        }
        Command::Rotation { a, b, c, n } => {
            with_map!(&parse(a, b, c)?, p => cmd_rotation(p, *n, g.format, out))
        }
        Command::Equivalence { a, b, c } => {
            with_map!(&parse(a, b, c)?, p => cmd_equivalence(p, g.format, out))
        }
    }
}

/// `min((a/b)⁴, (b/a)⁴)`, exact when the map is.
fn density_bounds<T: Scalar>(p: &MapParams<T>) -> (T, T) {
    let r4 = powi(&(p.a().clone() / p.b().clone()), 4);
    let lo = if r4 > T::one() { T::one() / r4 } else { r4 };
    let hi = T::one() / lo.clone();
    (lo, hi)
}

fn cmd_classify<T: Scalar>(p: &MapParams<T>, format: Format, out: Option<&Path>) -> Result<()> {
    let report = classify(p)?;
    if format == Format::Json {
        return write_json(out, &report);
    }
    let (power, r_lo, r_hi) = match &report.class {
        AcimClass::PeriodicIdentity { n } => (n.to_string(), String::new(), String::new()),
        AcimClass::UniqueEquivalentBounded { .. } => {
            let (lo, hi) = density_bounds(p);
            (String::new(), show(&lo), show(&hi))
        }
        _ => (String::new(), String::new(), String::new()),
    };
    write_table(
        out,
        &["class", "boundary_sum", "identity_power", "r_lo", "r_hi"],
        &[vec![
            report.class.name().into(),
            show(&p.boundary_sum()),
            power,
            r_lo,
            r_hi,
        ]],
    )
}

pub struct DensityOpts {
    pub method: Method,
    pub cells: usize,
    pub terms: usize,
    pub tol: f64,
}

/// A density in the map's own backend, or in `f64` for Ulam estimates.
enum Computed<T: Scalar> {
    Native(StepDensity<T>),
    Float(StepDensity<f64>),
}

fn ulam<T: Scalar>(p: &MapParams<T>, opts: &DensityOpts) -> Result<Computed<T>> {
    let u = ulam_matrix(p, opts.cells)?;
    Ok(Computed::Float(ulam_stationary(
        &u,
        opts.tol,
        DEFAULT_MAX_ITER,
    )?))
}

fn parry<T: Scalar>(p: &MapParams<T>, opts: &DensityOpts) -> Result<Computed<T>> {
    if !approx_eq(p.a(), p.b()) {
        return Err(Error::PreconditionViolation(format!(
            "the series density needs a = b, got a = {}, b = {}",
            p.a(),
            p.b()
        ))
        .into());
    }
    Ok(Computed::Native(
        parry_density(p.a(), p.c(), opts.terms)?.density,
    ))
}

/// The closed-form Markov density when `p` is one of the recognised maps.
fn markov_match<T: Scalar>(p: &MapParams<T>) -> Result<Option<StepDensity<T>>> {
    let same = |m: &MapParams<T>| {
        approx_eq(m.a(), p.a()) && approx_eq(m.b(), p.b()) && approx_eq(m.c(), p.c())
    };
    if p.a().is_one() {
        let n = p.b().to_f64_lossy().round();
        if (2.0..=1e6).contains(&n) {
            let n = n as usize;
            if same(&markov_n_map::<T>(n)?) {
                return Ok(Some(markov_density_n(n)?));
            }
        }
    }
    if p.a() > &T::one() {
        for k in 1..=64 {
            match markov_map(p.a(), k) {
                Ok(m) if same(&m) => return Ok(Some(markov_density(p.a(), k)?)),
                _ => {}
            }
        }
    }
    Ok(None)
}

fn markov<T: Scalar>(p: &MapParams<T>) -> Result<Computed<T>> {
    markov_match(p)?.map(Computed::Native).ok_or_else(|| {
        Error::NotApplicable("map belongs to no closed-form Markov family".into()).into()
    })
}

fn renorm<T: Scalar>(p: &MapParams<T>) -> Result<Computed<T>> {
    Ok(Computed::Native(renormalized_density(p)?.density))
}

fn auto<T: Scalar>(p: &MapParams<T>, opts: &DensityOpts) -> Result<(&'static str, Computed<T>)> {
    let class = classify(p).map(|r| r.class);
    match class {
        Ok(AcimClass::NoAcim) => {
            return Err(Error::NotApplicable(
                "no absolutely continuous invariant measure exists".into(),
            )
            .into())
        }
        Ok(AcimClass::PeriodicIdentity { n }) => {
            let n = usize::try_from(n)
                .map_err(|_| Error::InvalidParams(format!("period {n} too large")))?;
            let avg = birkhoff_average(p, &StepDensity::constant(T::one()), n)?;
            return Ok(("birkhoff", Computed::Native(avg)));
        }
        _ => {}
    }
    if let Some(g) = markov_match(p)? {
        return Ok(("markov", Computed::Native(g)));
    }
    if matches!(class, Ok(AcimClass::UniqueBoundedVariation))
        && matches!(
            equivalence_check(p),
            Ok(EquivalenceVerdict::NotEquivalent { .. })
        )
    {
        if let Ok(g) = renorm(p) {
            return Ok(("renorm", g));
        }
    }
    if approx_eq(p.a(), p.b()) && p.a() > &T::one() {
        if let Ok(g) = parry(p, opts) {
            return Ok(("parry", g));
        }
    }
    Ok(("ulam", ulam(p, opts)?))
}

fn cmd_density<T: Scalar>(
    p: &MapParams<T>,
    opts: &DensityOpts,
    format: Format,
    out: Option<&Path>,
) -> Result<()> {
    let (method, density) = match opts.method {
        Method::Ulam => ("ulam", ulam(p, opts)?),
        Method::Parry => ("parry", parry(p, opts)?),
        Method::Markov => ("markov", markov(p)?),
        Method::Renorm => ("renorm", renorm(p)?),
        Method::Auto => auto(p, opts)?,
    };
    match (format, density) {
        (Format::Csv, Computed::Native(d)) => write_density_csv(sink(out)?, &d)?,
        (Format::Csv, Computed::Float(d)) => write_density_csv(sink(out)?, &d)?,
        (Format::Json, Computed::Native(d)) => {
            write_json(out, &json!({ "method": method, "density": d }))?
        }
        (Format::Json, Computed::Float(d)) => {
            write_json(out, &json!({ "method": method, "density": d }))?
        }
    }
    Ok(())
}

fn cmd_orbit<T: Scalar>(
    p: &MapParams<T>,
    x: &str,
    n: usize,
    side: Option<SideArg>,
    critical: Option<SideArg>,
    format: Format,
    out: Option<&Path>,
) -> Result<()> {
    let x = T::parse_str(x)?;
    let start = match side {
        None => SidedPoint::plain(x),
        Some(SideArg::Left) => SidedPoint::left(x),
        Some(SideArg::Right) => SidedPoint::right(x),
    };
    let policy = match critical {
        None => CriticalPolicy::Stop,
        Some(SideArg::Left) => CriticalPolicy::ContinueLeft,
        Some(SideArg::Right) => CriticalPolicy::ContinueRight,
    };
    let trace = p.iterate(start, n, policy)?;
    let side_of = |k: usize| trace.points[k].side.label();
    if format == Format::Json {
        let rows: Vec<_> = (0..trace.points.len())
            .map(|k| json!({ "step": k, "point": trace.points[k].x.repr(), "side": side_of(k), "m_k": trace.visit_counts[k] }))
            .collect();
        write_json(out, &rows)?;
    } else {
        let rows: Vec<Vec<String>> = (0..trace.points.len())
            .map(|k| {
                vec![
                    k.to_string(),
                    show(&trace.points[k].x),
                    side_of(k).into(),
                    trace.visit_counts[k].to_string(),
                ]
            })
            .collect();
        write_table(out, &["step", "point", "side", "m_k"], &rows)?;
    }
    match trace.critical_hit {
        Some(index) if policy == CriticalPolicy::Stop => Err(Error::CriticalHit { index }.into()),
        _ => Ok(()),
    }
}

fn cmd_rotation<T: Scalar>(
    p: &MapParams<T>,
    n: usize,
    format: Format,
    out: Option<&Path>,
) -> Result<()> {
    let est = rotation_interval_estimate(p, n)?;
    let closed = if is_homeomorphism(p) {
        Some(rotation_number_homeo(p)?)
    } else {
        None
    };
    if format == Format::Json {
        return write_json(out, &json!({ "estimate": est, "rotation_number": closed }));
    }
    let (rho, rho_exact) = match &closed {
        Some(r) => (
            r.value.to_string(),
            r.exact
                .as_ref()
                .map(lorenz_acim::scalar::format_rational)
                .unwrap_or_default(),
        ),
        None => (String::new(), String::new()),
    };
    write_table(
        out,
        &["n", "lo", "hi", "error_bound", "rho", "rho_exact"],
        &[vec![
            est.n.to_string(),
            est.lo.to_string(),
            est.hi.to_string(),
            est.error_bound.to_string(),
            rho,
            rho_exact,
        ]],
    )
}

fn cmd_equivalence<T: Scalar>(p: &MapParams<T>, format: Format, out: Option<&Path>) -> Result<()> {
    let verdict = equivalence_check(p)?;
    let kappa = if p.boundary_sum() > T::one() {
        Some(minimal_period(p, lorenz_acim::periodic::DEFAULT_MAX_DEPTH)?)
    } else {
        None
    };
    if format == Format::Json {
        let mut value = serde_json::to_value(&verdict)?;
        value["kappa"] = serde_json::to_value(kappa)?;
        return write_json(out, &value);
    }
    let (reason, gaps) = match &verdict {
        EquivalenceVerdict::Equivalent { reason } => (
            serde_json::to_value(reason)?
                .as_str()
                .unwrap_or("")
                .to_string(),
            String::new(),
        ),
        EquivalenceVerdict::NotEquivalent { gaps } => (
            String::new(),
            gaps.iter()
                .map(|(lo, hi)| format!("{}:{}", show(lo), show(hi)))
                .collect::<Vec<_>>()
                .join(";"),
        ),
        EquivalenceVerdict::NotApplicable { reason } => (reason.clone(), String::new()),
    };
    write_table(
        out,
        &["verdict", "reason", "kappa", "gaps"],
        &[vec![
            verdict.name().into(),
            reason,
            kappa.map(|k| k.to_string()).unwrap_or_default(),
            gaps,
        ]],
    )
}
