use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use xstable::diagnostics::{default_tolerance, diagnose_pair};
use xstable::format::number;
use xstable::lattice::{chi_from_v, d_from_v, round_trip_residuals};
use xstable::mc::{ecdf_check, probe_points, simulate_max_linear};
use xstable::model::exponent_table;
use xstable::subset::pair_complement;
use xstable::verify::{run_suite, Suite, Table, VerifyOptions};
use xstable::{EvaluationPoint, ExponentModel, Grid, IndexSet, ModelSpec};

use crate::report::{CliError, RunReport};

type CmdResult = Result<bool, CliError>;

fn load_model(path: &Path, report: &mut RunReport) -> Result<ModelSpec, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    report.set_digest(hex::encode(Sha256::digest(&bytes)));
    report.param("model", path);
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Usage(format!("{} is not UTF-8", path.display())))?;
    ModelSpec::from_json(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn parse_coords(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("not a number: {s:?}")))
        })
        .collect()
}

fn parse_point(text: &str, dim: usize) -> Result<EvaluationPoint, CliError> {
    let coords = parse_coords(text)?;
    if coords.len() != dim {
        return Err(CliError::Usage(format!(
            "point has {} coordinates, model has {dim}",
            coords.len()
        )));
    }
    EvaluationPoint::new(coords).map_err(CliError::usage)
}

fn parse_grid(spec: Option<&str>, point: Option<&str>, dim: usize) -> Result<Grid, CliError> {
    if let Some(p) = point {
        return Ok(Grid::single(parse_point(p, dim)?));
    }
    match spec.unwrap_or("default") {
        "default" => Grid::default_for(dim).map_err(CliError::usage),
        s => {
            if let Some(levels) = s.strip_prefix("tensor:") {
                let levels = parse_coords(levels)?;
                Grid::tensor(&levels, dim).map_err(CliError::usage)
            } else if let Some(p) = s.strip_prefix("point:") {
                Ok(Grid::single(parse_point(p, dim)?))
            } else {
                Err(CliError::Usage(format!(
                    "unknown grid {s:?}; expected default, tensor:l1,l2,... or point:x1,...,xd"
                )))
            }
        }
    }
}

/// Opens `dir/name`, or stdout without `--out`.
fn sink(out: Option<&Path>, name: &str, report: &mut RunReport) -> Result<Box<dyn Write>, CliError> {
    match out {
        Some(dir) => {
            let path = dir.join(name);
            let file = fs::File::create(&path)
                .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?;
            report.output(path);
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Runtime(format!("write failed: {e}"))
}

pub fn lattice(model: &Path, point: &str, out: Option<&Path>, report: &mut RunReport) -> CmdResult {
    let spec = load_model(model, report)?;
    let x = parse_point(point, spec.dim())?;
    report.param("point", x.as_slice());
    let v = exponent_table(&spec.model, &x).map_err(CliError::runtime)?;
    let d = d_from_v(&v).map_err(CliError::runtime)?;
    let chi = chi_from_v(&v).map_err(CliError::runtime)?;
    let residuals = round_trip_residuals(&v).map_err(CliError::runtime)?;
    let mut w = sink(out, "lattice.csv", report)?;
    writeln!(w, "subset,V,d,chi").map_err(io_err)?;
    for (s, vv) in v.entries() {
        writeln!(
            w,
            "{},{},{},{}",
            spec.format_set(s),
            number(vv),
            number(d.get(s)),
            number(chi.get(s))
        )
        .map_err(io_err)?;
    }
    writeln!(
        w,
        "roundtrip_residual,{},{},{}",
        number(residuals[0]),
        number(residuals[1]),
        number(residuals[2])
    )
    .map_err(io_err)?;
    w.flush().map_err(io_err)?;
    let negative: Vec<Value> = d
        .negativity_violations()
        .into_iter()
        .map(|(s, val)| json!({"subset": spec.format_set(s), "d": val}))
        .collect();
    if !negative.is_empty() {
        log::warn!("{} negative Möbius coefficients: not a valid exponent function", negative.len());
    }
    report.summary(
        true,
        json!({
            "subsets": v.len(),
            "roundtrip_residuals": {"v_d_v": residuals[0], "d_chi_d": residuals[1], "v_chi_v": residuals[2]},
            "negative_d": negative,
        }),
    );
    Ok(true)
}

pub struct DiagRequest<'a> {
    pub sets: &'a [String],
    pub all_pairs: bool,
    pub grid: Option<&'a str>,
    pub point: Option<&'a str>,
    pub tol: Option<f64>,
}

fn parse_pairs(spec: &ModelSpec, req: &DiagRequest<'_>) -> Result<Vec<(IndexSet, IndexSet)>, CliError> {
    let ground = spec.model.ground();
    let pairs: Vec<(IndexSet, IndexSet)> = if req.all_pairs {
        (0..spec.dim())
            .flat_map(|i| (i + 1..spec.dim()).map(move |j| (i, j)))
            .map(|(i, j)| (IndexSet::singleton(i), IndexSet::singleton(j)))
            .collect()
    } else {
        req.sets
            .iter()
            .map(|s| {
                let parts: Vec<&str> = s.split(';').collect();
                if parts.len() != 2 {
                    return Err(CliError::Usage(format!("--sets expects \"A;B\", got {s:?}")));
                }
                let a = spec.parse_set(parts[0]).map_err(CliError::usage)?;
                let b = spec.parse_set(parts[1]).map_err(CliError::usage)?;
                Ok((a, b))
            })
            .collect::<Result<_, _>>()?
    };
    for &(a, b) in &pairs {
        pair_complement(ground, a, b).map_err(|e| {
            CliError::Usage(format!(
                "invalid pair {};{}: {e}",
                spec.format_set(a),
                spec.format_set(b)
            ))
        })?;
    }
    Ok(pairs)
}

pub fn diag(model: &Path, req: &DiagRequest<'_>, out: Option<&Path>, report: &mut RunReport) -> CmdResult {
    let spec = load_model(model, report)?;
    let dim = spec.dim();
    let grid = parse_grid(req.grid, req.point, dim)?;
    let pairs = parse_pairs(&spec, req)?;
    let tol = req.tol.unwrap_or_else(|| default_tolerance(dim));
    if !(tol >= 0.0) {
        return Err(CliError::Usage(format!("--tol must be nonnegative, got {tol}")));
    }
    report.param("grid", req.point.map(|p| format!("point:{p}")).unwrap_or_else(|| req.grid.unwrap_or("default").to_string()));
    report.param("grid_size", grid.len());
    report.param("tol", tol);
    let mut w = sink(out, "diag.csv", report)?;
    writeln!(
        w,
        "A,B,C,grid_size,sup_d,sup_chi,independent,ci_status,ci_possible,exact_certificate"
    )
    .map_err(io_err)?;
    let mut rows = Vec::new();
    for (a, b) in pairs {
        let p = diagnose_pair(&spec.model, a, b, &grid, tol).map_err(CliError::runtime)?;
        let certificate = match p.exact_independence {
            Some(true) => "independent",
            Some(false) => "dependent",
            None => "none",
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            spec.format_set(a),
            spec.format_set(b),
            spec.format_set(p.c),
            p.grid_size,
            number(p.sup_d),
            number(p.sup_chi),
            p.independent,
            p.ci_status.name(),
            p.ci_possible,
            certificate
        )
        .map_err(io_err)?;
        rows.push(json!({
            "A": spec.format_set(a),
            "B": spec.format_set(b),
            "C": spec.format_set(p.c),
            "sup_d": p.sup_d,
            "argmax_d": p.argmax_d.as_slice(),
            "sup_chi": p.sup_chi,
            "argmax_chi": p.argmax_chi.as_slice(),
            "independent": p.independent,
            "ci_status": p.ci_status.name(),
            "ci_possible": p.ci_possible,
            "smooth_density": p.smooth_density,
            "exact_certificate": certificate,
        }));
    }
    w.flush().map_err(io_err)?;
    report.summary(
        true,
        json!({
            "pairs": rows,
            "note": "a zero grid supremum means independent on the tested grid; only the atom certificate of discrete measures is exact, and d = 0 is a necessary condition for conditional independence, never a proof of it",
        }),
    );
    Ok(true)
}

fn write_table(dir: &Path, suite: Suite, t: &Table, report: &mut RunReport) -> Result<(), CliError> {
    let path: PathBuf = dir.join(format!("{}_{}.csv", suite.name(), t.name));
    let mut w = BufWriter::new(
        fs::File::create(&path)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?,
    );
    writeln!(w, "{}", t.columns.join(",")).map_err(io_err)?;
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(|&v| number(v)).collect();
        writeln!(w, "{}", cells.join(",")).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    report.output(path);
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn verify(
    suite: &str,
    model: Option<&Path>,
    seed: u64,
    n: usize,
    out: Option<&Path>,
    report: &mut RunReport,
) -> CmdResult {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse().map_err(CliError::usage)?]
    };
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let spec = model.map(|m| load_model(m, report)).transpose()?;
    report.param("suite", suite);
    report.param("seed", seed);
    report.param("n", n);
    let opts = VerifyOptions { seed, samples: n };
    let dyn_model = spec.as_ref().map(|s| &s.model as &dyn ExponentModel);
    let mut all_passed = true;
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    for s in suites {
        let r = run_suite(s, dyn_model, &opts).map_err(CliError::runtime)?;
        for c in &r.criteria {
            println!("{c}");
            lines.push((s, c.clone()));
        }
        all_passed &= r.passed();
        if let Some(dir) = out {
            for t in &r.tables {
                write_table(dir, s, t, report)?;
            }
        }
        reports.push(r);
    }
    if let Some(dir) = out {
        let mut w = sink(Some(dir), "verify.csv", report)?;
        writeln!(w, "suite,criterion,outcome,measured,relation,bound,elapsed_ms").map_err(io_err)?;
        for (s, c) in &lines {
            writeln!(
                w,
                "{},{},{},{},{},{},{:.1}",
                s.name(),
                csv_field(&c.id),
                serde_json::to_value(c.outcome).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                number(c.measured),
                c.relation.symbol(),
                number(c.bound),
                c.elapsed_ms
            )
            .map_err(io_err)?;
        }
        w.flush().map_err(io_err)?;
    }
    report.summary(all_passed, serde_json::to_value(&reports).map_err(CliError::runtime)?);
    Ok(all_passed)
}

pub fn simulate(model: &Path, n: usize, seed: u64, out: Option<&Path>, report: &mut RunReport) -> CmdResult {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let spec = load_model(model, report)?;
    report.param("n", n);
    report.param("seed", seed);
    let measure = spec
        .model
        .spectral_measure()
        .ok_or_else(|| CliError::Usage(format!("no sampler for this model kind ({})", spec.kind.name())))?;
    let batch = simulate_max_linear(measure, n, seed).map_err(CliError::runtime)?;
    let probes = ecdf_check(&batch, measure, &probe_points(spec.dim())).map_err(CliError::runtime)?;

    let mut csv = Vec::new();
    batch.write_csv(&spec.labels, &mut csv).map_err(io_err)?;
    let digest = hex::encode(Sha256::digest(&csv));
    let mut w = sink(out, "samples.csv", report)?;
    w.write_all(&csv).map_err(io_err)?;
    w.flush().map_err(io_err)?;
    drop(w);

    let within = probes.iter().filter(|p| p.within_3se).count();
    let rows: Vec<Value> = probes
        .iter()
        .map(|p| json!({"point": p.point.as_slice(), "ecdf": p.ecdf, "exact": p.exact, "se": p.se, "within_3se": p.within_3se}))
        .collect();
    if let Some(dir) = out {
        let mut w = sink(Some(dir), "ecdf.csv", report)?;
        writeln!(w, "{},ecdf,exact,se,within_3se", spec.labels.join(",")).map_err(io_err)?;
        for p in &probes {
            let coords: Vec<String> = p.point.as_slice().iter().map(|&v| number(v)).collect();
            writeln!(
                w,
                "{},{},{},{},{}",
                coords.join(","),
                number(p.ecdf),
                number(p.exact),
                number(p.se),
                p.within_3se
            )
            .map_err(io_err)?;
        }
        w.flush().map_err(io_err)?;
    }
    let passed = within >= 9;
    report.summary(
        passed,
        json!({
            "samples_sha256": digest,
            "model_id": batch.model_id(),
            "probes_within_3se": within,
            "probes": rows,
        }),
    );
    Ok(passed)
}
