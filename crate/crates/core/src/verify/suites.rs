use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::fixtures::{
    block_product_logistic, block_product_measure, max_linear_pair, max_linear_triple,
    product_blocks, random_measures, random_points,
};
use super::{Criterion, Relation, Table, VerifyOptions};
use crate::density::{
    default_t_grid, density, growth_probe, mixed_central_difference, mixed_partial_v,
    partition_sum_w, DerivativeMethod,
};
use crate::diagnostics::{
    chi_pair, chi_pair_from_lattice, d_pair, d_pair_from_lattice, default_tolerance,
    diagnose_pair, multiway_verdict, CiStatus,
};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::lattice::{chi_from_v, d_from_v, round_trip_residuals};
use crate::mc::{
    ecdf_check, empirical_chi, mc_spectral_integrals, probe_points, simulate_max_linear,
    AtomResampler, Estimate,
};
use crate::model::{exponent_table, DiscreteSpectralMeasure, ExponentModel, LogisticModel};
use crate::point::EvaluationPoint;
use crate::quadrature::graded_unit_rule;
use crate::subset::{disjoint_pairs, submasks, subsets_of_dim, IndexSet};

type SuiteOutput = (Vec<Criterion>, Vec<Table>);

const POINTS_PER_MODEL: usize = 20;
const POINT_RANGE: (f64, f64) = (0.25, 4.0);

fn point_rng(seed: u64, salt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(salt);
    rng
}

fn seconds(start: Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    if got == want {
        0.0
    } else {
        (got - want).abs() / want.abs()
    }
}

fn set(v: &[usize]) -> IndexSet {
    v.iter().copied().collect()
}

pub fn mobius_suite(model: Option<&dyn ExponentModel>, opts: &VerifyOptions) -> Result<SuiteOutput> {
    let mut out = Vec::new();
    let start = Instant::now();
    let measures = random_measures(opts.seed)?;
    let mut worst = [0.0f64; 3];
    let mut negative = 0usize;
    let mut chi_below_d = 0usize;
    for (k, m) in measures.iter().enumerate() {
        let mut rng = point_rng(opts.seed, k as u64);
        for x in random_points(m.dim(), POINTS_PER_MODEL, POINT_RANGE.0, POINT_RANGE.1, &mut rng) {
            let v = exponent_table(m, &x)?;
            let r = round_trip_residuals(&v)?;
            for i in 0..3 {
                worst[i] = worst[i].max(r[i]);
            }
            let d = d_from_v(&v)?;
            let chi = chi_from_v(&v)?;
            negative += d.negativity_violations().len() + chi.negativity_violations().len();
            let tol = d.zero_tolerance().max(chi.zero_tolerance());
            chi_below_d += d
                .entries()
                .iter()
                .filter(|(s, dv)| chi.get(*s) < dv - tol)
                .count();
        }
    }
    let all = worst.iter().copied().fold(0.0, f64::max);
    out.push(
        Criterion::check(
            "mobius.round_trip",
            "V->d->V, d->chi->d, V->chi->V on 50 random discrete models x 20 points",
            all,
            Relation::AtMost,
            1e-10,
        )
        .with_detail(format!(
            "V->d->V {:.2e}, d->chi->d {:.2e}, V->chi->V {:.2e}",
            worst[0], worst[1], worst[2]
        ))
        .timed(start),
    );
    out.push(Criterion::check(
        "mobius.nonnegative",
        "entries of d and chi below the zero tolerance",
        negative as f64,
        Relation::AtMost,
        0.0,
    ));
    out.push(Criterion::check(
        "mobius.chi_dominates_d",
        "entries with chi_A < d_A",
        chi_below_d as f64,
        Relation::AtMost,
        0.0,
    ));
    out.push(Criterion::check(
        "mobius.runtime",
        "fixture sweep wall time in seconds",
        seconds(start),
        Relation::AtMost,
        5.0,
    ));
    if let Some(model) = model {
        let start = Instant::now();
        let mut rng = point_rng(opts.seed, u64::MAX);
        let (mut worst, mut scale, mut negative) = (0.0f64, 1.0f64, 0usize);
        for x in random_points(model.dim(), POINTS_PER_MODEL, POINT_RANGE.0, POINT_RANGE.1, &mut rng) {
            let v = exponent_table(model, &x)?;
            scale = scale.max(v.max_abs());
            worst = worst.max(round_trip_residuals(&v)?.into_iter().fold(0.0, f64::max));
            negative += d_from_v(&v)?.negativity_violations().len();
        }
        out.push(
            Criterion::check(
                "mobius.model_round_trip",
                "round-trip residual of the supplied model relative to its table scale",
                worst / scale,
                Relation::AtMost,
                1e-10,
            )
            .timed(start),
        );
        out.push(Criterion::check(
            "mobius.model_nonnegative",
            "negative Möbius coefficients of the supplied model",
            negative as f64,
            Relation::AtMost,
            0.0,
        ));
    }
    Ok((out, Vec::new()))
}

/// `max |atom tables − inclusion–exclusion|` over 20 points, singletons
/// and pairs included.
fn atom_residuals(m: &DiscreteSpectralMeasure, rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let pairs = disjoint_pairs(m.ground());
    let (mut r1, mut r2) = (0.0f64, 0.0f64);
    for x in random_points(m.dim(), POINTS_PER_MODEL, POINT_RANGE.0, POINT_RANGE.1, rng) {
        let v = exponent_table(m, &x)?;
        let d = d_from_v(&v)?;
        let chi = chi_from_v(&v)?;
        let (d1, chi1) = m.atom_tables(&x)?;
        r1 = r1.max(d1.max_abs_diff(&d)?).max(chi1.max_abs_diff(&chi)?);
        for &(a, b) in &pairs {
            let (d2, chi2) = m.atom_pair(a, b, &x)?;
            for lattice in [d_pair_from_lattice(&d, a, b)?, d_pair(m, a, b, &x)?] {
                r2 = r2.max((d2 - lattice).abs());
            }
            for lattice in [chi_pair_from_lattice(&d, a, b)?, chi_pair(m, a, b, &x)?] {
                r2 = r2.max((chi2 - lattice).abs());
            }
        }
    }
    Ok((r1, r2))
}

pub fn lemmas_suite(model: Option<&dyn ExponentModel>, opts: &VerifyOptions) -> Result<SuiteOutput> {
    let mut out = Vec::new();
    let start = Instant::now();
    let (mut r1, mut r2) = (0.0f64, 0.0f64);
    for (k, m) in random_measures(opts.seed)?.iter().enumerate() {
        let (a, b) = atom_residuals(m, &mut point_rng(opts.seed, k as u64))?;
        r1 = r1.max(a);
        r2 = r2.max(b);
    }
    out.push(
        Criterion::check(
            "lemmas.atom_sums",
            "atom sums vs inclusion-exclusion for every d_A and chi_A",
            r1,
            Relation::AtMost,
            1e-12,
        )
        .timed(start),
    );
    out.push(
        Criterion::check(
            "lemmas.pair_sums",
            "atom sums vs lattice sums and V combinations for every disjoint pair",
            r2,
            Relation::AtMost,
            1e-12,
        )
        .timed(start),
    );
    out.push(Criterion::check(
        "lemmas.runtime",
        "fixture sweep wall time in seconds",
        seconds(start),
        Relation::AtMost,
        10.0,
    ));

    let start = Instant::now();
    let triple = max_linear_triple();
    let (a, b) = (set(&[0]), set(&[2]));
    let one = EvaluationPoint::constant(3, 1.0)?;
    let shifted = EvaluationPoint::new(vec![0.5, 2.0, 1.0])?;
    let (d_one_atoms, _) = triple.atom_pair(a, b, &one)?;
    let (d_shift_atoms, chi_shift_atoms) = triple.atom_pair(a, b, &shifted)?;
    let (d1_atoms, _) = triple.atom_tables(&one)?;
    let d1_lattice = d_from_v(&exponent_table(&triple, &one)?)?;
    let checks = [
        (d_one_atoms, 0.0),
        (d_pair(&triple, a, b, &one)?, 0.0),
        (d_shift_atoms, 1.0 / 12.0),
        (d_pair(&triple, a, b, &shifted)?, 1.0 / 12.0),
        (chi_shift_atoms, 1.0 / 3.0),
        (chi_pair(&triple, a, b, &shifted)?, 1.0 / 3.0),
        (d1_atoms.get(set(&[0])), 0.5),
        (d1_lattice.get(set(&[0])), 0.5),
        (max_linear_pair().exponent(IndexSet::from_bits(3), &EvaluationPoint::constant(2, 1.0)?)?, 5.0 / 3.0),
    ];
    let worst = checks.iter().map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    out.push(
        Criterion::check(
            "lemmas.example_values",
            "d_{1,5}(1,1,1)=0, d_{1,5}(0.5,2,1)=1/12, chi_{1,5}(0.5,1)=1/3, d_{1}(1,1,1)=1/2",
            worst,
            Relation::AtMost,
            1e-12,
        )
        .timed(start),
    );
    let diag = diagnose_pair(&triple, a, b, &Grid::single(shifted), default_tolerance(3))?;
    out.push(
        Criterion::check(
            "lemmas.example_no_density",
            "X1, X5 given X4: d > 0 while CI holds, reported as inapplicable without a density",
            flag(diag.ci_status == CiStatus::Inapplicable && diag.ci_possible && !diag.independent),
            Relation::AtLeast,
            1.0,
        )
        .with_detail(format!("status {}", diag.ci_status.name())),
    );

    if let Some(model) = model {
        match model.spectral_measure() {
            Some(m) => {
                let start = Instant::now();
                let (a, b) = atom_residuals(m, &mut point_rng(opts.seed, u64::MAX))?;
                let scale = 1.0 + m.exponent_unchecked(m.ground(), &vec![POINT_RANGE.0; m.dim()]);
                out.push(
                    Criterion::check(
                        "lemmas.model",
                        "supplied measure: atom sums vs inclusion-exclusion, relative to 1 + V(0.25)",
                        a.max(b) / scale,
                        Relation::AtMost,
                        1e-12,
                    )
                    .timed(start),
                );
            }
            None => out.push(Criterion::skipped(
                "lemmas.model",
                "atom sums of the supplied model",
                "model has no discrete spectral measure",
            )),
        }
    }
    Ok((out, Vec::new()))
}

pub fn theorem_suite(model: Option<&dyn ExponentModel>, opts: &VerifyOptions) -> Result<SuiteOutput> {
    let mut out = Vec::new();
    let start = Instant::now();
    let mut rows = Vec::new();
    let (mut min_chi, mut min_d) = (f64::INFINITY, f64::INFINITY);
    let mut not_ruled_out = 0usize;
    let mut rate_err = 0.0f64;
    for alpha in [0.3, 0.5, 0.7, 0.9] {
        for dim in [3, 4] {
            let m = LogisticModel::new(dim, alpha)?;
            let grid = Grid::default_for(dim)?;
            let tol = default_tolerance(dim);
            let pairs = disjoint_pairs(m.ground());
            let (mut row_chi, mut row_d) = (f64::INFINITY, f64::INFINITY);
            for &(a, b) in &pairs {
                let p = diagnose_pair(&m, a, b, &grid, tol)?;
                row_chi = row_chi.min(p.sup_chi);
                row_d = row_d.min(p.sup_d);
                not_ruled_out += (p.ci_status != CiStatus::RuledOut) as usize;
            }
            min_chi = min_chi.min(row_chi);
            min_d = min_d.min(row_d);
            let x = EvaluationPoint::constant(dim, 1.0)?;
            let (a, b) = (set(&[0]), set(&[1]));
            let probe = growth_probe(&m, a, b, &x, &default_t_grid(), tol)?;
            let d = d_pair(&m, a, b, &x)?;
            rate_err = rate_err.max(rel_err(probe.rate, d));
            rows.push(vec![
                alpha,
                dim as f64,
                pairs.len() as f64,
                row_chi,
                row_d,
                d,
                probe.rate,
                probe.rate_r2,
                probe.poly_slope,
            ]);
        }
    }
    out.push(
        Criterion::check(
            "theorem.sup_chi",
            "min over logistic models and disjoint pairs of sup chi on the default grid",
            min_chi,
            Relation::Above,
            0.01,
        )
        .timed(start),
    );
    out.push(Criterion::check(
        "theorem.sup_d",
        "min over logistic models and disjoint pairs of sup d on the default grid",
        min_d,
        Relation::Above,
        1e-4,
    ));
    out.push(Criterion::check(
        "theorem.ci_ruled_out",
        "dependent smooth pairs whose conditional independence is not ruled out",
        not_ruled_out as f64,
        Relation::AtMost,
        0.0,
    ));
    out.push(Criterion::check(
        "theorem.rates_match_d",
        "relative gap between the fitted growth rate and d_{A,B}(1) over all alphas",
        rate_err,
        Relation::AtMost,
        1e-6,
    ));

    let mut worst_indep = 0.0f64;
    for dim in [3, 4] {
        let m = LogisticModel::new(dim, 1.0)?;
        let grid = Grid::default_for(dim)?;
        for (a, b) in disjoint_pairs(m.ground()) {
            let p = diagnose_pair(&m, a, b, &grid, default_tolerance(dim))?;
            worst_indep = worst_indep.max(p.sup_chi).max(p.sup_d);
        }
    }
    out.push(Criterion::check(
        "theorem.independent_limit",
        "alpha = 1: max of sup chi and sup d over all pairs",
        worst_indep,
        Relation::AtMost,
        1e-10,
    ));
    out.push(Criterion::check(
        "theorem.runtime",
        "logistic sweep wall time in seconds",
        seconds(start),
        Relation::AtMost,
        60.0,
    ));

    let start = Instant::now();
    let m = LogisticModel::new(3, 0.5)?;
    let (a, b) = (set(&[0]), set(&[1]));
    let x = EvaluationPoint::constant(3, 1.0)?;
    let probe = growth_probe(&m, a, b, &x, &default_t_grid(), default_tolerance(3))?;
    let d = d_pair(&m, a, b, &x)?;
    out.push(
        Criterion::check(
            "theorem.growth_rate",
            "alpha 0.5, |I| = 3: relative gap between the exponential rate of L(t) and d_{A,B}(x)",
            rel_err(probe.rate, d),
            Relation::AtMost,
            1e-3,
        )
        .timed(start),
    );
    out.push(Criterion::check(
        "theorem.growth_fit",
        "R^2 of the linear fit of log L(t) against t",
        probe.rate_r2,
        Relation::AtLeast,
        0.999,
    ));
    out.push(
        Criterion::check(
            "theorem.growth_polynomial",
            "|log-log slope of R(t)|, bounded by |I| + 2",
            probe.poly_slope.abs(),
            Relation::AtMost,
            5.0,
        )
        .with_detail(format!(
            "exponential {}, CI impossible {}",
            probe.exponential, probe.ci_impossible
        )),
    );
    let growth_rows = probe
        .t
        .iter()
        .zip(probe.log_l.iter().zip(&probe.log_r))
        .map(|(&t, (&l, &r))| vec![t, l, r])
        .collect();

    let start = Instant::now();
    let blocks = product_blocks();
    let grid = Grid::from_points(random_points(6, 100, POINT_RANGE.0, POINT_RANGE.1, &mut point_rng(opts.seed, 7)))?;
    let (mut cross, mut residual) = (0.0f64, 0.0f64);
    let mut joint = true;
    let discrete = block_product_measure(opts.seed)?;
    let logistic = block_product_logistic()?;
    let models: [&dyn ExponentModel; 2] = [&discrete, &logistic];
    for m in models {
        let r = multiway_verdict(m, &blocks, &grid, 1e-12)?;
        for p in &r.pairs {
            cross = cross.max(p.sup_chi);
        }
        residual = residual.max(r.joint_residual.unwrap_or(f64::INFINITY));
        joint &= r.jointly_independent;
    }
    out.push(
        Criterion::check(
            "theorem.block_chi",
            "three-block product models: max cross-block chi on 100 points",
            cross,
            Relation::AtMost,
            1e-12,
        )
        .timed(start),
    );
    out.push(
        Criterion::check(
            "theorem.block_factorization",
            "max |V - sum_i V^{A_i}| on 100 points",
            residual,
            Relation::AtMost,
            1e-12,
        )
        .with_detail(format!("jointly independent {joint}")),
    );

    if let Some(model) = model {
        if model.smooth_density() {
            let start = Instant::now();
            let grid = Grid::default_for(model.dim())?;
            let tol = default_tolerance(model.dim());
            let pairs = if model.dim() <= 6 {
                disjoint_pairs(model.ground())
            } else {
                (0..model.dim())
                    .flat_map(|i| (0..model.dim()).filter(move |&j| j != i).map(move |j| (i, j)))
                    .map(|(i, j)| (IndexSet::singleton(i), IndexSet::singleton(j)))
                    .collect()
            };
            let mut mismatched = 0usize;
            for (a, b) in pairs {
                let p = diagnose_pair(model, a, b, &grid, tol)?;
                mismatched += ((p.sup_chi > tol) != (p.sup_d > tol)) as usize;
            }
            out.push(
                Criterion::check(
                    "theorem.model_zero_equivalence",
                    "supplied smooth model: pairs where exactly one of sup d, sup chi exceeds tol",
                    mismatched as f64,
                    Relation::AtMost,
                    0.0,
                )
                .timed(start),
            );
        } else {
            out.push(Criterion::skipped(
                "theorem.model_zero_equivalence",
                "verdicts of the supplied model",
                "non-smooth model: conditional independence is not determined by d",
            ));
        }
    }
    let tables = vec![
        Table {
            name: "logistic_rates".into(),
            columns: [
                "alpha", "dim", "pairs", "min_sup_chi", "min_sup_d", "d_pair_at_one", "rate",
                "rate_r2", "poly_slope",
            ]
            .map(String::from)
            .to_vec(),
            rows,
        },
        Table {
            name: "growth_probe".into(),
            columns: ["t", "log_L", "log_R"].map(String::from).to_vec(),
            rows: growth_rows,
        },
    ];
    Ok((out, tables))
}

struct DensityResiduals {
    fd: f64,
    homogeneity: f64,
    homogeneity_fd: f64,
    quadrature: f64,
    min_density: f64,
}

fn interior_grid(dim: usize) -> Result<Grid> {
    Grid::tensor(&[0.5, 1.0, 2.0], dim)
}

/// `∫∫` of the density of `(X_0, X_1)` in `u = exp(−1/x)` coordinates.
fn bivariate_mass<M: ExponentModel + ?Sized>(model: &M) -> Result<f64> {
    let rule = graded_unit_rule(30, 8);
    let pair = set(&[0, 1]);
    let mut x = vec![1.0; model.dim()];
    let mut total = 0.0;
    for ni in &rule {
        for nj in &rule {
            x[0] = ni.frechet_point();
            x[1] = nj.frechet_point();
            let p = EvaluationPoint::new(x.clone())?;
            total += ni.weight * nj.weight * ni.jacobian() * nj.jacobian() * density(model, pair, &p)?;
        }
    }
    Ok(total)
}

fn density_residuals<M: ExponentModel + ?Sized>(model: &M) -> Result<DensityResiduals> {
    let dim = model.dim();
    let ground = model.ground();
    let grid = interior_grid(dim)?;
    let mut fd = 0.0f64;
    let mut homogeneity = 0.0f64;
    let mut homogeneity_fd = 0.0f64;
    let mut min_density = f64::INFINITY;
    let t = 3.0;
    let small: Vec<IndexSet> = subsets_of_dim(dim)?.into_iter().filter(|s| s.len() <= 3).collect();
    for x in grid.points() {
        let v = model.exponent(ground, x)?;
        for &b in &small {
            let w = partition_sum_w(model, ground, b, x, DerivativeMethod::ExactIfAvailable)?.value;
            let exact = w * (-v).exp();
            let numeric = mixed_central_difference(
                |p| (-model.exponent_unchecked(ground, p)).exp(),
                x.as_slice(),
                b,
            )?;
            fd = fd.max(rel_err(numeric, exact));
        }
        min_density = min_density.min(density(model, ground, x)?);
        let xt = x.scaled(t)?;
        for a in subsets_of_dim(dim)? {
            for b in submasks(a).filter(|b| !b.is_empty() && b.len() <= 3) {
                let scale = t.powi(b.len() as i32 + 1);
                let at_x = mixed_partial_v(model, a, b, x, DerivativeMethod::ExactIfAvailable)?;
                let at_tx = mixed_partial_v(model, a, b, &xt, DerivativeMethod::ExactIfAvailable)?;
                homogeneity = homogeneity.max(rel_err(scale * at_tx, at_x));
                // relative steps make the stencil scale with x, so this only sees rounding
                let at_x = mixed_partial_v(model, a, b, x, DerivativeMethod::FiniteDifference)?;
                let at_tx = mixed_partial_v(model, a, b, &xt, DerivativeMethod::FiniteDifference)?;
                homogeneity_fd = homogeneity_fd.max(rel_err(scale * at_tx, at_x));
            }
        }
    }
    let quadrature = if dim >= 2 {
        (bivariate_mass(model)? - 1.0).abs()
    } else {
        0.0
    };
    Ok(DensityResiduals {
        fd,
        homogeneity,
        homogeneity_fd,
        quadrature,
        min_density,
    })
}

pub fn density_suite(model: Option<&dyn ExponentModel>, _opts: &VerifyOptions) -> Result<SuiteOutput> {
    let fixtures: Vec<LogisticModel>;
    let (targets, names): (Vec<&dyn ExponentModel>, Vec<String>) = match model {
        Some(m) if !m.smooth_density() => {
            return Ok((
                vec![Criterion::skipped(
                    "density",
                    "density identities",
                    "non-smooth model: the density suite needs a positive continuous density",
                )],
                Vec::new(),
            ));
        }
        Some(m) if m.dim() > 6 => {
            return Ok((
                vec![Criterion::skipped(
                    "density",
                    "density identities",
                    "finite differences are limited to six variables",
                )],
                Vec::new(),
            ));
        }
        Some(m) => (vec![m], vec!["model".to_string()]),
        None => {
            fixtures = [(0.5, 2), (0.5, 3), (0.8, 2), (0.8, 3)]
                .iter()
                .map(|&(a, d)| LogisticModel::new(d, a))
                .collect::<Result<_>>()?;
            (
                fixtures.iter().map(|m| m as &dyn ExponentModel).collect(),
                fixtures
                    .iter()
                    .map(|m| format!("logistic(alpha={}, dim={})", m.alpha(), m.dim()))
                    .collect(),
            )
        }
    };
    let mut rows = Vec::new();
    let (mut fd, mut hom, mut quad, mut pos) = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
    let start = Instant::now();
    for t in &targets {
        let r = density_residuals(*t)?;
        fd = fd.max(r.fd);
        hom = hom.max(r.homogeneity);
        quad = quad.max(r.quadrature);
        pos = pos.min(r.min_density);
        rows.push(vec![
            t.dim() as f64,
            r.fd,
            r.homogeneity,
            r.homogeneity_fd,
            r.quadrature,
            r.min_density,
        ]);
    }
    let detail = names.join(", ");
    let out = vec![
        Criterion::check(
            "density.partition_vs_fd",
            "relative gap between W exp(-V) and finite differences of exp(-V) on the 3^|I| grid",
            fd,
            Relation::AtMost,
            1e-4,
        )
        .with_detail(detail.clone())
        .timed(start),
        Criterion::check(
            "density.quadrature",
            "|integral of the bivariate density - 1|",
            quad,
            Relation::AtMost,
            1e-3,
        ),
        Criterion::check(
            "density.homogeneity",
            "relative residual of t^{|B|+1} V^A_B(t x) = V^A_B(x), t = 3, |B| <= 3",
            hom,
            Relation::AtMost,
            1e-5,
        ),
        Criterion::check(
            "density.positive",
            "minimum density on the grid",
            pos,
            Relation::Above,
            0.0,
        ),
    ];
    let tables = vec![Table {
        name: "density_residuals".into(),
        columns: ["dim", "fd", "homogeneity", "homogeneity_fd", "quadrature", "min_density"]
            .map(String::from)
            .to_vec(),
        rows,
    }];
    Ok((out, tables))
}

fn z_score(e: &Estimate, exact: f64) -> f64 {
    let gap = (e.value - exact).abs();
    if e.se > 0.0 {
        gap / e.se
    } else if gap <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

pub fn simulate_suite(model: Option<&dyn ExponentModel>, opts: &VerifyOptions) -> Result<SuiteOutput> {
    let fixture;
    let measure = match model {
        Some(m) => match m.spectral_measure() {
            Some(s) => s,
            None => {
                return Ok((
                    vec![Criterion::skipped(
                        "simulate",
                        "simulation checks",
                        "no sampler for this model kind",
                    )],
                    Vec::new(),
                ))
            }
        },
        None => {
            fixture = max_linear_pair();
            &fixture
        }
    };
    let mut out = Vec::new();
    let start = Instant::now();
    let batch = simulate_max_linear(measure, opts.samples, opts.seed)?;
    let probes = ecdf_check(&batch, measure, &probe_points(measure.dim()))?;
    let within = probes.iter().filter(|p| p.within_3se).count();
    out.push(
        Criterion::check(
            "simulate.ecdf",
            "probe points with |ECDF - exp(-V)| <= 3 SE (of 10)",
            within as f64,
            Relation::AtLeast,
            9.0,
        )
        .timed(start),
    );
    if measure.dim() >= 2 {
        let (a, b) = (IndexSet::singleton(0), IndexSet::singleton(1));
        let x = EvaluationPoint::constant(measure.dim(), 1.0)?;
        let exact = chi_pair(measure, a, b, &x)?;
        let chi = match empirical_chi(&batch, a, b, &x) {
            Ok(est) => Criterion::check(
                "simulate.chi",
                "|chi_hat - chi| / SE at x = 1 for the first two components",
                z_score(&est, exact),
                Relation::AtMost,
                3.0,
            )
            .with_detail(format!(
                "chi_hat {:.6} (SE {:.2e}), exact {:.6}",
                est.value, est.se, exact
            )),
            // too few draws to take logs: an honest failure, not an abort
            Err(Error::ProbeOutsideSampleRange(why)) => Criterion::check(
                "simulate.chi",
                "|chi_hat - chi| / SE at x = 1 for the first two components",
                f64::INFINITY,
                Relation::AtMost,
                3.0,
            )
            .with_detail(why),
            Err(e) => return Err(e),
        };
        out.push(chi);
        let desc = "max |MC - exact| / SE for d_A, chi_A, d_{A,B}, chi_{A,B} with atom resampling";
        let sampler = AtomResampler::new(measure);
        match mc_spectral_integrals(&sampler, a, Some(b), &x, opts.samples, opts.seed) {
            Ok(est) => {
                let (d1, chi1) = measure.atom_tables(&x)?;
                let (d2, chi2) = measure.atom_pair(a, b, &x)?;
                let worst = [
                    z_score(&est.d_a, d1.get(a)),
                    z_score(&est.chi_a, chi1.get(a)),
                    z_score(&est.d_ab.expect("pair requested"), d2),
                    z_score(&est.chi_ab.expect("pair requested"), chi2),
                ]
                .into_iter()
                .fold(0.0, f64::max);
                out.push(Criterion::check(
                    "simulate.spectral_integrals",
                    desc,
                    worst,
                    Relation::AtMost,
                    3.0,
                ));
            }
            Err(Error::SamplerValidation(why)) => out.push(
                Criterion::check("simulate.spectral_integrals", desc, f64::INFINITY, Relation::AtMost, 3.0)
                    .with_detail(why),
            ),
            Err(e) => return Err(e),
        }
    }
    out.push(Criterion::check(
        "simulate.runtime",
        "simulation and estimation wall time in seconds",
        seconds(start),
        Relation::AtMost,
        30.0,
    ));
    let dim = measure.dim();
    let mut columns: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
    columns.extend(["ecdf", "exact", "se"].map(String::from));
    let rows = probes
        .iter()
        .map(|p| {
            let mut r = p.point.as_slice().to_vec();
            r.extend([p.ecdf, p.exact, p.se]);
            r
        })
        .collect();
    Ok((
        out,
        vec![Table {
            name: "ecdf_probes".into(),
            columns,
            rows,
        }],
    ))
}
