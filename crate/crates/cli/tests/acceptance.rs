//! Acceptance run: nine criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout; the
//! process exits nonzero when any criterion fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use xstable::diagnostics::{chi_pair, d_pair};
use xstable::lattice::d_from_v;
use xstable::model::exponent_table;
use xstable::subset::IndexSet;
use xstable::verify::{run_suite, Criterion, Outcome, Suite, VerifyOptions};
use xstable::{EvaluationPoint, ModelSpec};

const SEED: u64 = 20_261_014;
const BIN: &str = env!("CARGO_BIN_EXE_xstable");

struct Verdict {
    passed: bool,
    lines: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict {
            passed: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {what}", if ok { "ok" } else { "BAD" }));
    }
}

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

/// Pulls the named criteria out of a suite run; a missing or skipped
/// criterion counts as a failure.
fn suite_criteria(suite: Suite, ids: &[&str]) -> Verdict {
    let mut v = Verdict::new();
    let mut opts = VerifyOptions::new(SEED);
    opts.samples = 200_000;
    match run_suite(suite, None, &opts) {
        Ok(report) => {
            for id in ids {
                match report.criteria.iter().find(|c: &&Criterion| c.id == *id) {
                    Some(c) => v.check(c.outcome == Outcome::Pass, c.to_string()),
                    None => v.check(false, format!("{id}: missing from {suite} report")),
                }
            }
        }
        Err(e) => v.check(false, format!("{suite} suite aborted: {e}")),
    }
    v
}

fn example_values() -> Verdict {
    let mut v = suite_criteria(Suite::Lemmas, &["lemmas.example_values", "lemmas.example_no_density"]);
    // the same four values from the checked-in CLI fixture
    let text = std::fs::read_to_string(manifest("tests/fixtures/max_linear_triple.json")).unwrap();
    let spec = ModelSpec::from_json(&text).unwrap();
    let m = &spec.model;
    let (a, b) = (spec.parse_set("1").unwrap(), spec.parse_set("5").unwrap());
    let one = EvaluationPoint::constant(3, 1.0).unwrap();
    let shifted = EvaluationPoint::new(vec![0.5, 2.0, 1.0]).unwrap();
    let d1 = d_from_v(&exponent_table(m, &one).unwrap()).unwrap().get(IndexSet::singleton(0));
    let checks = [
        ("d_{1},{5}(1,1,1)", d_pair(m, a, b, &one).unwrap(), 0.0),
        ("d_{1},{5}(0.5,2,1)", d_pair(m, a, b, &shifted).unwrap(), 1.0 / 12.0),
        ("chi_{1},{5}(0.5,1)", chi_pair(m, a, b, &shifted).unwrap(), 1.0 / 3.0),
        ("d_{1}(1,1,1)", d1, 0.5),
    ];
    for (name, got, want) in checks {
        let err = (got - want).abs();
        v.check(err <= 1e-12, format!("fixture {name} = {got:.17} (|err| {err:.1e} <= 1e-12)"));
    }
    v
}

fn golden(args: &[&str], out_file: &str, golden: &str, v: &mut Verdict) {
    let dir = tempfile::tempdir().unwrap();
    let mut full = vec!["--out", dir.path().to_str().unwrap()];
    full.extend_from_slice(args);
    let o = Command::new(BIN).args(&full).output().unwrap();
    let got = std::fs::read(dir.path().join(out_file)).unwrap_or_default();
    let want = std::fs::read(manifest(&format!("tests/golden/{golden}"))).unwrap();
    v.check(
        o.status.code() == Some(0) && got == want,
        format!("{golden}: byte-identical ({} bytes)", want.len()),
    );
}

fn cli_contract() -> Verdict {
    let mut v = Verdict::new();
    let model = manifest("tests/fixtures/max_linear_triple.json");
    let m = model.to_str().unwrap();
    golden(&["lattice", "--model", m, "--point", "1,1,1"], "lattice.csv", "lattice_triple_111.csv", &mut v);
    golden(
        &["diag", "--model", m, "--sets", "1;5", "--point", "0.5,2,1"],
        "diag.csv",
        "diag_triple_point.csv",
        &mut v,
    );
    golden(
        &["diag", "--model", m, "--sets", "1;5", "--sets", "1;4", "--sets", "4;5", "--sets", "1;4+5"],
        "diag.csv",
        "diag_triple_grid.csv",
        &mut v,
    );
    let exit = |args: &[&str]| Command::new(BIN).args(args).output().unwrap().status.code();
    let cases: [(&[&str], i32); 5] = [
        (&["lattice", "--model", m, "--point", "1,1,1"], 0),
        (&["verify", "--suite", "simulate", "--seed", "1", "--n", "5"], 1),
        (&["diag", "--model", m, "--sets", "1;1+5"], 2),
        (&["verify", "--suite", "bogus", "--seed", "1"], 2),
        (&["lattice", "--model", "/nonexistent.json", "--point", "1"], 2),
    ];
    for (args, want) in cases {
        let got = exit(args);
        v.check(got == Some(want), format!("exit {got:?} (want {want}) for {}", args[0]));
    }
    v
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict>)> = vec![
        ("1 mobius round trips", Box::new(|| suite_criteria(Suite::Mobius, &["mobius.round_trip", "mobius.runtime"]))),
        (
            "2 atom sums vs inclusion-exclusion",
            Box::new(|| suite_criteria(Suite::Lemmas, &["lemmas.atom_sums", "lemmas.pair_sums", "lemmas.runtime"])),
        ),
        ("3 max-linear example values", Box::new(example_values)),
        (
            "4 logistic sweep",
            Box::new(|| {
                suite_criteria(
                    Suite::Theorem,
                    &[
                        "theorem.sup_chi",
                        "theorem.sup_d",
                        "theorem.ci_ruled_out",
                        "theorem.independent_limit",
                        "theorem.runtime",
                    ],
                )
            }),
        ),
        (
            "5 growth probe",
            Box::new(|| {
                suite_criteria(
                    Suite::Theorem,
                    &["theorem.growth_rate", "theorem.growth_fit", "theorem.growth_polynomial"],
                )
            }),
        ),
        (
            "6 density",
            Box::new(|| {
                suite_criteria(
                    Suite::Density,
                    &["density.partition_vs_fd", "density.quadrature", "density.homogeneity"],
                )
            }),
        ),
        (
            "7 pairwise to joint independence",
            Box::new(|| suite_criteria(Suite::Theorem, &["theorem.block_chi", "theorem.block_factorization"])),
        ),
        (
            "8 simulation",
            Box::new(|| suite_criteria(Suite::Simulate, &["simulate.ecdf", "simulate.chi", "simulate.runtime"])),
        ),
        ("9 CLI goldens and exit codes", Box::new(cli_contract)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let v = run();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        println!("{} criterion {name} ({ms:.0} ms)", if v.passed { "PASS" } else { "FAIL" });
        for line in &v.lines {
            println!("    {line}");
        }
        failed += usize::from(!v.passed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
