use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use hti_core::sweep::errors_for_risk;
use hti_core::{
    evaluate, gain_study, lugosi_vp_crossover, optimize_mprime, parse_grid, run_sweep, BoundQuery,
    ErrorSpec, GainGrid, GainOptions, GrowthModel, GrowthSpec, LogProb, Method, MethodSpec,
    MprimeScan, SweepSpec, Vary,
};

use crate::args::{
    BoundArgs, CrossoverArgs, ErrorArgs, GrowthArgs, OptimizeArgs, StudyArgs, SweepArgs,
};
use crate::{CliError, CliResult};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn io_error(path: Option<&Path>, e: impl std::fmt::Display) -> CliError {
    match path {
        Some(p) => CliError::Io(format!("{}: {e}", p.display())),
        None => CliError::Io(e.to_string()),
    }
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn parse_method(tag: &str) -> CliResult<Method> {
    tag.parse().map_err(usage)
}

fn error_count(m: u64, e: &ErrorArgs) -> CliResult<u64> {
    match (e.errors, e.risk) {
        (Some(k), _) => Ok(k),
        (None, Some(r)) => {
            let (k, warning) = errors_for_risk(m, r)?;
            if let Some(w) = warning {
                warn(&w);
            }
            Ok(k)
        }
        (None, None) => Err(usage("one of --errors or --risk is required")),
    }
}

fn growth_model(g: &GrowthArgs) -> CliResult<GrowthModel> {
    match (g.d, g.class_size) {
        (Some(d), _) => Ok(GrowthModel::sauer_shelah(d)?),
        (None, Some(n)) => Ok(GrowthModel::constant(n)?),
        (None, None) => Err(usage("one of --d or --class-size is required")),
    }
}

fn parse_range(spec: &str) -> CliResult<(u64, u64)> {
    let bad = || usage(format!("--range '{spec}': expected lo:hi with integers"));
    let (lo, hi) = spec.split_once(':').ok_or_else(bad)?;
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

/// CSV writer on a file, or on stdout when no path is given.
fn csv_writer(path: Option<&Path>) -> CliResult<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p).map_err(|e| io_error(Some(p), e))?),
        None => Box::new(io::stdout().lock()),
    };
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink))
}

fn write_rows<I, R>(path: Option<&Path>, header: &[String], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv_writer(path)?;
    let err = |e: csv::Error| io_error(path, e);
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row).map_err(err)?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

fn optional(x: Option<u64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn bound(a: &BoundArgs) -> CliResult<()> {
    let method = parse_method(&a.method)?;
    let k = error_count(a.m, &a.error)?;
    let growth = growth_model(&a.growth)?;
    let log_delta = LogProb::confidence(a.delta)?;
    let query = BoundQuery::with_log_delta(k, a.m, 1, log_delta, growth)?;

    let mprime = if a.auto_mprime && method.uses_mprime() {
        let target = a.target_errors.unwrap_or(k);
        let scan = MprimeScan::new(method, target, a.m, log_delta, growth)?
            .catoni_multiples(method == Method::Catoni);
        optimize_mprime(&scan)?.mprime_best
    } else {
        a.mprime.unwrap_or(4 * a.m)
    };
    let r = evaluate(method, &query.with_mprime(mprime)?)?;
    println!(
        "method={} m={} errors={k} value={} vacuous={} valid={} mprime={}",
        r.method,
        a.m,
        r.value,
        r.vacuous,
        r.valid,
        optional(r.mprime_used)
    );
    Ok(())
}

pub fn sweep(a: &SweepArgs) -> CliResult<()> {
    let vary: Vary = a.vary.parse()?;
    let grid = parse_grid(&a.grid, vary != Vary::Risk)?;
    let errors = match (a.errors, a.risk) {
        (_, Some(r)) => ErrorSpec::Risk(r),
        (Some(k), None) => ErrorSpec::Count(k),
        (None, None) => ErrorSpec::Count(0),
    };
    let growth = match (a.d, a.class_size, vary) {
        (Some(d), _, _) => GrowthSpec::VcDim(d),
        (None, Some(n), _) => GrowthSpec::ClassSize(n),
        (None, None, Vary::D) => GrowthSpec::VcDim(1),
        (None, None, _) => return Err(usage("one of --d or --class-size is required")),
    };
    let methods = a
        .methods
        .split(',')
        .map(|s| s.trim().parse::<MethodSpec>())
        .collect::<Result<Vec<_>, _>>()?;
    if methods.is_empty() {
        return Err(usage("--methods is empty"));
    }
    let spec = SweepSpec {
        vary,
        grid,
        m: a.m,
        errors,
        growth,
        delta: a.delta,
        methods,
    };
    let table = run_sweep(&spec)?;
    for w in &table.warnings {
        warn(w);
    }
    write_rows(a.output.as_deref(), &table.header, table.rows)
}

pub fn optimize(a: &OptimizeArgs) -> CliResult<()> {
    let method = parse_method(&a.method)?;
    let k = error_count(a.m, &a.error)?;
    let growth = growth_model(&a.growth)?;
    let log_delta = LogProb::confidence(a.delta)?;
    let mut scan = MprimeScan::new(method, k, a.m, log_delta, growth)?
        .step(a.step)
        .refine(a.refine)
        .catoni_multiples(method == Method::Catoni && !a.catoni_any)
        .trace(a.trace.is_some());
    if let Some(range) = &a.range {
        let (lo, hi) = parse_range(range)?;
        scan = scan.range(lo, hi);
    }
    let r = optimize_mprime(&scan)?;
    println!(
        "method={method} m={} errors={k} mprime_best={} epsilon_best={} evaluations={}",
        a.m, r.mprime_best, r.epsilon_best, r.evaluations
    );
    if let (Some(path), Some(trace)) = (&a.trace, r.trace) {
        let header = ["mprime".to_string(), "value".to_string()];
        let rows = trace
            .into_iter()
            .map(|(mp, v)| [mp.to_string(), v.to_string()]);
        write_rows(Some(path), &header, rows)?;
    }
    Ok(())
}

fn study_grid(a: &StudyArgs) -> CliResult<GainGrid> {
    let mut grid = GainGrid::default();
    if let Some(spec) = &a.grid {
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, values) = part
                .split_once('=')
                .ok_or_else(|| usage(format!("--grid entry '{part}': expected key=values")))?;
            let ints = |v: &str| -> CliResult<Vec<u64>> {
                Ok(parse_grid(v, true)?.into_iter().map(|x| x as u64).collect())
            };
            match key.trim() {
                "m" => grid.sample_sizes = ints(values)?,
                "d" => grid.vc_dims = ints(values)?,
                "risk" => grid.risks = parse_grid(values, false)?,
                "delta" => grid.deltas = parse_grid(values, false)?,
                other => {
                    return Err(usage(format!(
                        "--grid key '{other}' (expected m, risk, d or delta)"
                    )))
                }
            }
        }
    }
    if a.k0_only {
        grid.risks = vec![0.0];
    }
    Ok(grid)
}

pub fn study(a: &StudyArgs) -> CliResult<()> {
    let grid = study_grid(a)?;
    for &m in &grid.sample_sizes {
        for &r in &grid.risks {
            if let Some(w) = errors_for_risk(m, r)?.1 {
                warn(&w);
            }
        }
    }
    let opts = GainOptions {
        method: parse_method(&a.method)?,
        range_factor: a.range_factor,
        step: a.step,
        refine: a.refine,
        range: a.range.as_deref().map(parse_range).transpose()?,
    };
    let report = gain_study(&grid, &opts)?;

    let header: Vec<String> = [
        "m",
        "risk",
        "errors",
        "d",
        "delta",
        "mprime_best",
        "epsilon_best",
        "epsilon_baseline",
        "gain",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows = report.rows.iter().map(|r| {
        [
            r.m.to_string(),
            r.risk.to_string(),
            r.errors.to_string(),
            r.vc_dim.to_string(),
            r.delta.to_string(),
            r.mprime_best.to_string(),
            r.epsilon_best.to_string(),
            r.epsilon_baseline.to_string(),
            r.gain.to_string(),
        ]
    });
    write_rows(a.output.as_deref(), &header, rows)?;
    for (name, s) in [("overall", report.overall), ("k=0", report.realizable)] {
        println!(
            "# {name}: combinations={} mean_gain={} std_gain={}",
            s.count, s.mean, s.std
        );
    }
    Ok(())
}

pub fn crossover(a: &CrossoverArgs) -> CliResult<()> {
    if a.d == 0 {
        return Err(usage("--d must be at least 1"));
    }
    let c = lugosi_vp_crossover(a.d);
    println!("constant={}", c.constant);
    println!("log10_ratio={}", c.log10_ratio);
    println!("log10_ratio_2e={}", c.log10_ratio_tight);
    println!(
        "check_576_times_2_plus_ln2={}",
        576.0 * (2.0 + std::f64::consts::LN_2)
    );
    Ok(())
}
