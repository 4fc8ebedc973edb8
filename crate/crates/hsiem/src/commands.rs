use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use hsiem_core::derham::{build_complex, verify_exactness};
use hsiem_core::hardy::MoebiusParams;
use hsiem_core::linalg::Spectrum;
use hsiem_core::segment::reference::{normwise_relative_error, oracle_forms, OracleOptions};
use hsiem_core::segment::{assemble, octant_segment, FormKind, FormOptions, Permittivity, PrismSegment};
use hsiem_core::solvers::{
    convergence_point, dtn_1d, leading_hankel_root, resonances_slab, resonances_sphere_mode_with, slab_reference, solve_scattering_1d,
    spherical_hankel_roots, ConvergenceCase, ConvergenceTable, Exterior, Interval1DProblem, ModeProblem, ResonanceOptions, SlabConfig,
};

use crate::args::*;
use crate::output::{num, say, write_csv};
use crate::CliError;

type Res<T> = Result<T, CliError>;

/// Runs one subcommand. `Ok(false)` means a check did not pass.
pub fn execute(cmd: &Command) -> Res<bool> {
    match cmd {
        Command::Dtn(a) => dtn(a),
        Command::Scatter1d(a) => scatter1d(a),
        Command::Resonances(a) => resonances(a),
        Command::SequenceCheck(a) => sequence_check(a),
        Command::FormsCheck(a) => forms_check(a),
        Command::Convergence(a) => convergence(a),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Status lines go to stderr when the CSV itself goes to stdout.
fn note(out: &Output, msg: &str) -> Res<()> {
    if out.out.is_some() {
        say(msg)
    } else {
        eprintln!("{msg}");
        Ok(())
    }
}

fn with_timing(out: &Output, header: &[&'static str]) -> Vec<&'static str> {
    let mut h = header.to_vec();
    if out.timing {
        h.push("runtime_s");
    }
    h
}

fn timed<T>(f: impl FnOnce() -> Res<T>) -> Res<(T, f64)> {
    let t = Instant::now();
    let v = f()?;
    Ok((v, t.elapsed().as_secs_f64()))
}

fn push_time(out: &Output, row: &mut Vec<String>, secs: f64) {
    if out.timing {
        row.push(num(secs));
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn dtn(a: &DtnArgs) -> Res<bool> {
    if a.n_min > a.n_max {
        return Err(usage("--n-min exceeds --n-max"));
    }
    if !(a.kappa.re > 0.0) {
        return Err(usage("kappa needs a positive real part"));
    }
    let exact = -Complex64::i() * a.kappa;
    let rows: Vec<(usize, Complex64, f64)> = (a.n_min..=a.n_max)
        .into_par_iter()
        .map(|n| timed(|| Ok(dtn_1d(a.kappa, a.kappa0, n)?)).map(|(d, t)| (n, d, t)))
        .collect::<Res<_>>()?;
    let errs: Vec<f64> = rows.iter().map(|r| (r.1 - exact).norm()).collect();
    let csv: Vec<Vec<String>> = rows
        .iter()
        .zip(&errs)
        .map(|(&(n, d, t), &e)| {
            let mut r = vec![n.to_string(), num(d.re), num(d.im), num(e)];
            push_time(&a.output, &mut r, t);
            r
        })
        .collect();
    write_csv(a.output.out.as_deref(), &with_timing(&a.output, &["N", "dtn_re", "dtn_im", "abs_error"]), &csv)?;
    let mono = errs.windows(2).all(|w| w[1] <= w[0]);
    note(&a.output, &format!("dtn: {} rows, last abs_error {}, non-increasing: {}", rows.len(), num(*errs.last().unwrap()), yes(mono)))?;
    Ok(true)
}

fn scatter1d(a: &Scatter1dArgs) -> Res<bool> {
    let ns: Vec<Option<usize>> = if a.exact_dtn {
        vec![None]
    } else if a.sweep {
        (0..=a.n).map(Some).collect()
    } else {
        vec![Some(a.n)]
    };
    let rows = ns
        .into_par_iter()
        .map(|n| {
            let exterior = match n {
                Some(n) => Exterior::Hardy { kappa0: a.kappa0, n },
                None => Exterior::ExactDtn,
            };
            let pb = Interval1DProblem::new(a.a, a.elements, a.order, a.kappa, exterior);
            timed(|| Ok(solve_scattering_1d(&pb)?)).map(|(r, t)| (n, r, t))
        })
        .collect::<Res<Vec<_>>>()?;
    let csv: Vec<Vec<String>> = rows
        .iter()
        .map(|(n, r, t)| {
            let mut row = vec![
                n.map_or_else(|| "exact".to_string(), |n| n.to_string()),
                num(r.l2_error),
                num(r.h1_error),
                num(r.hardy_tail),
                num(r.trace.re),
                num(r.trace.im),
            ];
            push_time(&a.output, &mut row, *t);
            row
        })
        .collect();
    write_csv(
        a.output.out.as_deref(),
        &with_timing(&a.output, &["N", "l2_error", "h1_error", "hardy_tail", "trace_re", "trace_im"]),
        &csv,
    )?;
    Ok(true)
}

#[derive(Serialize)]
struct ResonanceJson {
    case: &'static str,
    kappa0: [f64; 2],
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<usize>,
    shift: [f64; 2],
    tol: f64,
    tail_threshold: f64,
    all_converged: bool,
    resonances: Vec<ResonanceEntry>,
}

#[derive(Serialize)]
struct ResonanceEntry {
    index: usize,
    kappa: [f64; 2],
    kappa_sq: [f64; 2],
    residual: f64,
    converged: bool,
    multiplicity: usize,
    reference: [f64; 2],
    rel_error: f64,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn nearest(refs: &[Complex64], k: Complex64) -> Complex64 {
    *refs.iter().min_by(|a, b| (*a - k).norm().total_cmp(&(*b - k).norm())).expect("non-empty references")
}

fn resonances(a: &ResonanceArgs) -> Res<bool> {
    if !(a.tol > 0.0) || !(a.tail_threshold > 0.0 && a.tail_threshold <= 1.0) {
        return Err(usage("--tol must be positive and --tail-threshold in (0, 1]"));
    }
    let opts = ResonanceOptions { tol: a.tol, tail_threshold: a.tail_threshold, ..ResonanceOptions::default() };
    let (spectrum, refs, json): (Spectrum, Vec<Complex64>, ResonanceJson) = match a.case {
        ResonanceCase::Slab => {
            if !(a.eps > 1.0) {
                return Err(usage("--eps must exceed 1"));
            }
            let count = a.count.unwrap_or(2);
            let mut cfg = SlabConfig::new(a.eps, a.kappa0.unwrap_or(Complex64::new(2.0, 0.0)), a.n.unwrap_or(20), a.order, count);
            cfg.elements = a.elements;
            cfg.options = opts.clone();
            if let Some(t) = a.target {
                cfg.shift = t * t;
            }
            let sp = resonances_slab(&cfg)?;
            let refs: Vec<Complex64> = (1..=count + 8).map(|m| slab_reference(a.eps, m)).collect();
            let json = ResonanceJson {
                case: "slab",
                kappa0: pair(cfg.kappa0),
                n: cfg.n,
                eps: Some(a.eps),
                mode: None,
                order: Some(a.order),
                shift: pair(cfg.shift),
                tol: a.tol,
                tail_threshold: a.tail_threshold,
                all_converged: false,
                resonances: Vec::new(),
            };
            (sp, refs, json)
        }
        ResonanceCase::Sphere => {
            if a.mode == 0 {
                return Err(usage("--mode 0 has no resonances"));
            }
            let mode = ModeProblem { degree: a.mode, kappa0: a.kappa0.unwrap_or(Complex64::new(5.0, -1.0)), n: a.n.unwrap_or(15) };
            let target = match a.target {
                Some(t) => t,
                None => leading_hankel_root(a.mode)?,
            };
            let sp = resonances_sphere_mode_with(&mode, target * target, a.count.unwrap_or(1), &opts)?;
            let json = ResonanceJson {
                case: "sphere",
                kappa0: pair(mode.kappa0),
                n: mode.n,
                eps: None,
                mode: Some(a.mode),
                order: None,
                shift: pair(target * target),
                tol: a.tol,
                tail_threshold: a.tail_threshold,
                all_converged: false,
                resonances: Vec::new(),
            };
            (sp, spherical_hankel_roots(a.mode)?, json)
        }
    };
    let entries: Vec<ResonanceEntry> = spectrum
        .pairs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let r = nearest(&refs, p.kappa);
            ResonanceEntry {
                index: i,
                kappa: pair(p.kappa),
                kappa_sq: pair(p.kappa_sq),
                residual: p.residual,
                converged: p.converged,
                multiplicity: p.multiplicity,
                reference: pair(r),
                rel_error: (p.kappa - r).norm() / r.norm(),
            }
        })
        .collect();
    let ok = !entries.is_empty() && spectrum.all_converged();
    if let Some(path) = a.output.out.as_deref() {
        let rows: Vec<Vec<String>> = entries
            .iter()
            .map(|e| {
                vec![
                    e.index.to_string(),
                    num(e.kappa[0]),
                    num(e.kappa[1]),
                    num(e.residual),
                    num(e.reference[0]),
                    num(e.reference[1]),
                    num(e.rel_error),
                ]
            })
            .collect();
        write_csv(Some(path), &["index", "kappa_re", "kappa_im", "residual", "ref_re", "ref_im", "rel_error"], &rows)?;
    }
    let json = ResonanceJson { all_converged: ok, resonances: entries, ..json };
    say(&serde_json::to_string_pretty(&json).map_err(|e| CliError::Io(e.to_string()))?)?;
    Ok(ok)
}

fn sequence_check(a: &SequenceArgs) -> Res<bool> {
    if a.p == 0 {
        return Err(usage("--p must be at least 1"));
    }
    let params = MoebiusParams::new(a.kappa0)?;
    let ps: Vec<usize> = match a.p_max {
        Some(m) => (1..=m).collect(),
        None => vec![a.p],
    };
    let ns: Vec<usize> = match a.n_max {
        Some(m) => (0..=m).collect(),
        None => vec![a.n],
    };
    let cases: Vec<(usize, usize)> = ps.iter().flat_map(|&p| ns.iter().map(move |&n| (p, n))).collect();
    let reports = cases
        .par_iter()
        .map(|&(p, n)| {
            timed(|| {
                let c = build_complex(p, n, &params)?;
                Ok(verify_exactness(&c, a.tol)?)
            })
        })
        .collect::<Res<Vec<_>>>()?;
    let mut all = true;
    let mut rows = Vec::new();
    for (&(p, n), (r, t)) in cases.iter().zip(&reports) {
        let [w, v, q, x] = r.dims;
        let alt = w as i64 - v as i64 + q as i64 - x as i64;
        let pass = r.passed && alt == 0;
        all &= pass;
        say(&format!(
            "p={p} N={n} dims {w}/{v}/{q}/{x} ranks {}/{}/{} |curl grad|={} |div curl|={} alternating sum {alt} {}",
            r.ranks[0],
            r.ranks[1],
            r.ranks[2],
            num(r.composition_norms[0]),
            num(r.composition_norms[1]),
            if pass { "PASS" } else { "FAIL" }
        ))?;
        let mut row = vec![
            p.to_string(),
            n.to_string(),
            w.to_string(),
            v.to_string(),
            q.to_string(),
            x.to_string(),
            num(r.composition_norms[0]),
            num(r.composition_norms[1]),
            pass.to_string(),
        ];
        push_time(&a.output, &mut row, *t);
        rows.push(row);
    }
    if let Some(path) = a.output.out.as_deref() {
        let header = with_timing(&a.output, &["p", "N", "dimW", "dimV", "dimQ", "dimX", "comp1_norm", "comp2_norm", "pass"]);
        write_csv(Some(path), &header, &rows)?;
    }
    Ok(all)
}

fn geometry(g: Geometry, p: usize) -> PrismSegment {
    match g {
        Geometry::Octant => octant_segment(p),
        Geometry::Skewed => PrismSegment::with_order(
            [[1.0, 0.1, 0.2], [0.2, 1.3, -0.1], [0.1, 0.3, 0.9]],
            [0.05, -0.1, 0.02],
            Permittivity::Constant(Complex64::new(1.0, 0.0)),
            p,
        ),
    }
}

fn forms_check(a: &FormsArgs) -> Res<bool> {
    if a.p == 0 {
        return Err(usage("--p must be at least 1"));
    }
    let params = MoebiusParams::new(a.kappa0)?;
    if !(a.kappa0.im > 0.0) {
        return Err(usage("the radial oracle needs Im kappa0 > 0"));
    }
    let kinds: Vec<FormKind> = match a.kind {
        KindArg::H1 => vec![FormKind::H1],
        KindArg::Hcurl => vec![FormKind::Hcurl],
        KindArg::Hdiv => vec![FormKind::Hdiv],
        KindArg::All => vec![FormKind::H1, FormKind::Hcurl, FormKind::Hdiv],
    };
    let seg = geometry(a.geometry, a.p);
    let results = kinds
        .par_iter()
        .map(|&k| {
            timed(|| {
                let f = assemble(k, &seg, a.p, a.n, &params, &FormOptions::default())?;
                let (m, s) = oracle_forms(k, &seg, a.p, a.n, &params, &OracleOptions::default())?;
                Ok((f, m, s))
            })
        })
        .collect::<Res<Vec<_>>>()?;
    let mut all = true;
    let mut rows = Vec::new();
    for (k, ((f, m, s), t)) in kinds.iter().zip(&results) {
        let em = normwise_relative_error(&f.mass, m);
        let es = normwise_relative_error(&f.stiffness, s);
        let sm = f.mass.symmetry_defect() / f.mass.max_abs().max(f64::MIN_POSITIVE);
        let ss = f.stiffness.symmetry_defect() / f.stiffness.max_abs().max(f64::MIN_POSITIVE);
        let pass = em <= a.tol && es <= a.tol && sm <= 1e-12 && ss <= 1e-12;
        all &= pass;
        let name = match k {
            FormKind::H1 => "h1",
            FormKind::Hcurl => "hcurl",
            FormKind::Hdiv => "hdiv",
        };
        say(&format!(
            "{name} p={} N={} mass error {} stiffness error {} symmetry {}/{} {}",
            a.p,
            a.n,
            num(em),
            num(es),
            num(sm),
            num(ss),
            if pass { "PASS" } else { "FAIL" }
        ))?;
        let mut row = vec![name.to_string(), a.p.to_string(), a.n.to_string(), num(em), num(es), num(sm), num(ss), pass.to_string()];
        push_time(&a.output, &mut row, *t);
        rows.push(row);
    }
    if let Some(path) = a.output.out.as_deref() {
        let header =
            with_timing(&a.output, &["kind", "p", "N", "mass_error", "stiffness_error", "mass_symmetry", "stiffness_symmetry", "pass"]);
        write_csv(Some(path), &header, &rows)?;
    }
    Ok(all)
}

fn convergence(a: &ConvergenceArgs) -> Res<bool> {
    let k0 = |default: Complex64| a.kappa0.unwrap_or(default);
    let case = match a.case {
        ConvergenceCaseArg::Dtn => {
            if !(a.kappa.re > 0.0) {
                return Err(usage("kappa needs a positive real part"));
            }
            ConvergenceCase::Dtn { kappa: a.kappa, kappa0: k0(Complex64::new(1.0, 0.0)), n_min: a.n_min, n_max: a.n_max }
        }
        ConvergenceCaseArg::Slab => ConvergenceCase::Slab {
            eps: a.eps,
            kappa0: k0(Complex64::new(2.0, 0.0)),
            order: a.order,
            elements: a.elements,
            m: a.m,
            n_min: a.n_min,
            n_max: a.n_max,
        },
        ConvergenceCaseArg::SlabOrder => ConvergenceCase::SlabOrder {
            eps: a.eps,
            kappa0: k0(Complex64::new(2.0, 0.0)),
            n: a.n,
            elements: a.elements,
            m: a.m,
            order_min: a.order_min,
            order_max: a.order_max,
        },
        ConvergenceCaseArg::Sphere => {
            ConvergenceCase::Sphere { degree: a.mode, kappa0: k0(Complex64::new(5.0, -1.0)), n_min: a.n_min, n_max: a.n_max }
        }
    };
    let params = case.parameters();
    if params.is_empty() {
        return Err(usage("empty sweep range"));
    }
    if matches!(a.case, ConvergenceCaseArg::Slab | ConvergenceCaseArg::SlabOrder) && (!(a.eps > 1.0) || a.m == 0) {
        return Err(usage("the slab needs --eps > 1 and --m >= 1"));
    }
    if a.case == ConvergenceCaseArg::SlabOrder && a.order_min == 0 {
        return Err(usage("--order-min must be at least 1"));
    }
    if a.case == ConvergenceCaseArg::Sphere && a.mode == 0 {
        return Err(usage("--mode 0 has no resonances"));
    }
    let points = params.par_iter().map(|&p| timed(|| Ok(convergence_point(&case, p)?))).collect::<Res<Vec<_>>>()?;
    let times: Vec<f64> = points.iter().map(|(_, t)| *t).collect();
    let table = ConvergenceTable::from_rows(points.into_iter().map(|(r, _)| r).collect());
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .zip(&times)
        .map(|(r, &t)| {
            let mut row =
                vec![r.parameter.to_string(), num(r.value.re), num(r.value.im), num(r.reference.re), num(r.reference.im), num(r.error)];
            push_time(&a.output, &mut row, t);
            row
        })
        .collect();
    let header = with_timing(&a.output, &["parameter", "value_re", "value_im", "ref_re", "ref_im", "error"]);
    write_csv(a.output.out.as_deref(), &header, &rows)?;
    note(
        &a.output,
        &format!(
            "convergence {}: {} rows, last error {}, non-increasing: {}",
            case.name(),
            table.rows.len(),
            num(table.last_error().unwrap_or(f64::NAN)),
            yes(table.monotone)
        ),
    )?;
    Ok(true)
}
