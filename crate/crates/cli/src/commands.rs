use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uniqlab_core::numeric::{linspace, spearman};
use uniqlab_core::pairs::{beurling_bounds, conjugate};
use uniqlab_core::products::TailMode;
use uniqlab_core::uniqueness::{lattice_in_radius, scan_radius};
use uniqlab_core::*;

use crate::config::*;
use crate::table::{format_float, Provenance, ResultTable};
use crate::CliError;

/// Validates the config and runs the named experiment.
pub fn run(config: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let params = config.resolve()?;
    let prov = Provenance::for_config(config, &params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match &params {
        Params::Classify(p) => classify(p, prov),
        Params::Product(p) => product(p, prov, &mut rng),
        Params::Slope(p) => slope(p, prov),
        Params::Indicator(p) => indicator(p, prov),
        Params::Jensen(p) => jensen(p, prov),
        Params::Interpolate(p) => interpolate(p, prov, &mut rng),
        Params::Scan(p) => scan(p, prov),
        Params::Hardy(p) => hardy(p, prov),
        Params::Transfer(p) => transfer(p, prov),
        Params::Morgan(p) => morgan(p, prov),
        Params::Identities(p) => identities(p, prov, &mut rng),
    }
}

fn classify(p: &ClassifyParams, prov: Provenance) -> Result<ResultTable, CliError> {
    let q = conjugate(p.p)?;
    let lambda = make_power_lattice(p.p, p.alpha, p.j_max, 0.0)?;
    let mu = make_power_lattice(q, p.beta, p.j_max, 0.0)?;
    let est_l = density_functional(&lambda, p.p, p.tail_start())?;
    let est_m = density_functional(&mu, q, p.tail_start())?;
    let spec = PairSpec::with_exponents(lambda, mu, p.p, q, 1.0, 1.0, 0.0)?;
    let v = pairs::classify_pair_with_margin(&spec, &est_l, &est_m, p.margin)?;
    let kind = match v.kind {
        CriticalityKind::Supercritical => "supercritical",
        CriticalityKind::Subcritical => "subcritical",
        CriticalityKind::Indeterminate => "indeterminate",
    };
    let mut t = ResultTable::new(
        &[
            "p",
            "q",
            "alpha_upper",
            "alpha_lower",
            "beta_upper",
            "beta_lower",
            "product",
            "verdict",
        ],
        prov,
    );
    t.push(vec![
        p.p.into(),
        q.into(),
        est_l.upper().into(),
        est_l.lower().into(),
        est_m.upper().into(),
        est_m.lower().into(),
        v.product_value.into(),
        kind.into(),
    ]);
    Ok(t)
}

fn product(
    p: &ProductParams,
    prov: Provenance,
    rng: &mut ChaCha8Rng,
) -> Result<ResultTable, CliError> {
    let (zeros, spacing) = match &p.zeros {
        ZerosParam::Arithmetic { spacing, count } => {
            (ZeroSet::arithmetic(*spacing, *count)?, Some(*spacing))
        }
        ZerosParam::Explicit { gammas } => (ZeroSet::new(gammas.clone(), None)?, None),
    };
    let mode = match p.mode {
        TailModeParam::Truncated => TailMode::Truncated,
        TailModeParam::Compensated => TailMode::Compensated,
    };
    let model = ProductModel::new(zeros, p.n_trunc.unwrap_or(p.zero_count()), mode)?;
    let points: Vec<Complex64> = match &p.points {
        Some(pts) => pts
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect(),
        None => (0..p.n_random)
            .map(|_| {
                let r = p.radius * rng.random::<f64>().sqrt();
                Complex64::from_polar(r, rng.random_range(0.0..2.0 * PI))
            })
            .collect(),
    };
    let mut t = ResultTable::new(
        &[
            "re",
            "im",
            "value_re",
            "value_im",
            "log_abs_err_bound",
            "certified",
            "closed_form_rel_err",
        ],
        prov,
    );
    t.set("r_max", model.r_max());
    let mut worst: f64 = 0.0;
    for z in points {
        let v = product_eval(&model, z)?;
        // arithmetic zeros {s·n} give sin(πz/s)/(πz/s)
        let rel = spacing.map(|s| {
            let w = z * PI / s;
            let exact = if w.norm() == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                w.sin() / w
            };
            (v.value - exact).norm() / exact.norm()
        });
        if let Some(r) = rel {
            worst = worst.max(r);
        }
        t.push(vec![
            z.re.into(),
            z.im.into(),
            v.value.re.into(),
            v.value.im.into(),
            v.log_abs_err_bound.into(),
            v.certified.into(),
            rel.into(),
        ]);
    }
    if spacing.is_some() {
        t.set("max_rel_err", worst);
    }
    Ok(t)
}

fn slope(p: &SlopeParams, prov: Provenance) -> Result<ResultTable, CliError> {
    let r_grid = linspace(p.r_min, p.r_max, p.n_r);
    let mut t = ResultTable::new(
        &[
            "delta",
            "theta",
            "slope",
            "target",
            "rel_dev",
            "log_coefficient",
            "plain_slope",
        ],
        prov,
    );
    let mut worst: f64 = 0.0;
    for &delta in &p.deltas {
        let count = (p.zero_extent * delta).ceil() as usize;
        let zeros = ZeroSet::arithmetic(1.0 / delta, count)?;
        let model = ProductModel::new(zeros, count, TailMode::Compensated)?;
        for &theta in &p.thetas {
            let f = asymptotic_slope_fit(&model, theta, &r_grid)?;
            worst = worst.max(f.rel_dev);
            t.push(vec![
                delta.into(),
                theta.into(),
                f.slope.into(),
                f.target.into(),
                f.rel_dev.into(),
                f.log_coefficient.into(),
                f.plain_slope.into(),
            ]);
        }
    }
    t.set("max_rel_dev", worst);
    Ok(t)
}

fn indicator(p: &IndicatorParams, prov: Provenance) -> Result<ResultTable, CliError> {
    let f: BuiltinFunction = p.function.parse()?;
    let thetas: Vec<f64> = (0..p.n_theta)
        .map(|i| 2.0 * PI * i as f64 / p.n_theta as f64)
        .collect();
    let r_grid = linspace(p.r_min, p.r_max, p.n_r);
    let rep = indicator_estimate(&f, p.rho, &thetas, &r_grid)?;
    let q = conjugate(p.p)?;
    let margins = kappa_estimate_bound_check(&rep, p.p, q, p.kappa_hat)?;
    let mut t = ResultTable::new(&["theta", "h", "fit_residual", "bound", "margin"], prov);
    for (i, m) in margins.iter().enumerate() {
        t.push(vec![
            m.theta.into(),
            m.h.into(),
            rep.fit_residuals[i].into(),
            m.bound.into(),
            m.margin.into(),
        ]);
    }
    t.set("function", f.to_string());
    t.set("rho", p.rho);
    t.set("h_zero", rep.h_zero);
    t.set("h_pi", rep.h_pi);
    t.set("kappa", rep.kappa);
    t.set(
        "min_margin",
        margins
            .iter()
            .map(|m| m.margin)
            .fold(f64::INFINITY, f64::min),
    );
    Ok(t)
}

fn jensen(p: &JensenParams, prov: Provenance) -> Result<ResultTable, CliError> {
    let x_grid = linspace(p.x_min, p.x_max, p.n_x);
    let mut t = ResultTable::new(
        &[
            "b",
            "d",
            "a",
            "delta",
            "phi",
            "empirical_rate",
            "bound",
            "margin",
            "pass",
            "counting_slack",
            "growth_excess",
        ],
        prov,
    );
    for c in &p.cases {
        let f = BuiltinFunction::SineDecay { b: c.b, d: c.d };
        // zeros k/(2b) out past the grid
        let count = ((p.x_max + 10.0) * 2.0 * c.b).ceil() as usize;
        let gamma = ZeroSet::arithmetic(0.5 / c.b, count)?;
        let setup = products::JensenSetup::new(c.a, c.delta, c.phi);
        let r = jensen_decay_check(&f, &gamma, setup, &x_grid)?;
        t.push(vec![
            c.b.into(),
            c.d.into(),
            c.a.into(),
            c.delta.into(),
            c.phi.into(),
            r.empirical_rate.into(),
            r.bound.into(),
            r.margin.into(),
            r.pass.into(),
            r.counting_slack.into(),
            r.growth_excess.into(),
        ]);
    }
    Ok(t)
}

fn interpolate(
    p: &InterpolateParams,
    prov: Provenance,
    rng: &mut ChaCha8Rng,
) -> Result<ResultTable, CliError> {
    let nodes: Vec<f64> = (1..=p.node_count)
        .map(|j| p.node_spacing * j as f64)
        .collect();
    let sel = select_uniform_subsequence(&nodes, p.l, p.m, p.h, p.start_n)?;
    if sel.len() < p.n_terms {
        return Err(CliError::Validation {
            command: "interpolate".into(),
            message: format!(
                "selection has {} nodes, fewer than n_terms = {}",
                sel.len(),
                p.n_terms
            ),
        });
    }
    let draw = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..p.n_terms)
            .map(|_| match p.data {
                DataKind::Random => Complex64::new(rng.random_range(-1.0..=1.0), 0.0),
                DataKind::Ones => Complex64::new(1.0, 0.0),
            })
            .collect()
    };
    let base = InterpolantModel::build(sel, draw(rng), p.k, p.n_terms)?;
    let fit = derivative_lower_bound_fit(&base);
    let mut t = ResultTable::new(
        &[
            "vector", "node", "eta_re", "eta_im", "g_re", "g_im", "residual",
        ],
        prov,
    );
    let mut worst: f64 = 0.0;
    for v in 0..p.n_vectors {
        let model = if v == 0 {
            base.clone()
        } else {
            base.with_data(draw(rng))?
        };
        let rep = verify_interpolation(&model, p.n_check, p.tol);
        worst = worst.max(rep.max_residual);
        for row in rep.rows {
            t.push(vec![
                v.into(),
                row.node.into(),
                row.eta.re.into(),
                row.eta.im.into(),
                row.g_value.re.into(),
                row.g_value.im.into(),
                row.residual.into(),
            ]);
        }
    }
    t.set("K", base.k());
    t.set("k0_fit", fit.k0_fit);
    t.set("c_fit", fit.c_fit);
    t.set("n0_fit", base.n0_fit());
    t.set("derivative_violations", fit.violations);
    t.set("series_tail_ratio", base.series_tail_ratio());
    t.set("max_residual", worst);
    t.set("pass", worst <= p.tol);
    Ok(t)
}

fn scan(p: &ScanParams, prov: Provenance) -> Result<ResultTable, CliError> {
    let grid = p.grid();
    let a_max = grid.iter().copied().fold(0.0, f64::max);
    let r = match p.r {
        Some(r) => r,
        None => scan_radius(p.p, a_max, p.n)?,
    };
    let res = uniqueness_scan(p.p, &grid, p.n, r)?;
    let mut t = ResultTable::new(
        &["alpha", "sigma_min", "N", "R", "rows_lambda", "rows_mu"],
        prov,
    );
    for i in 0..res.grid.len() {
        t.push(vec![
            res.grid[i].into(),
            res.sigma_min[i].into(),
            res.n.into(),
            res.r.into(),
            res.rows_lambda[i].into(),
            res.rows_mu[i].into(),
        ]);
    }
    t.set("spearman", spearman(&res.grid, &res.sigma_min));
    t.set(
        "any_insufficient_rows",
        res.insufficient_rows.iter().any(|b| *b),
    );
    Ok(t)
}

fn hardy(p: &HardyParams, prov: Provenance) -> Result<ResultTable, CliError> {
    let basis = HermiteBasis::new(p.m_max + 1)?;
    let lattice = lattice_in_radius(2.0, p.alpha, p.r)?;
    let mut t = ResultTable::new(
        &["m", "N", "fit_exponent", "bounded", "expected_bounded"],
        prov,
    );
    let mut agree = true;
    for m in 0..=p.m_max {
        for n in 0..=p.n_max {
            let g = hardy_growth_test(&basis, m, n, &lattice)?;
            agree &= g.bounded == (m <= n);
            t.push(vec![
                m.into(),
                n.into(),
                g.fit_exponent.into(),
                g.bounded.into(),
                (m <= n).into(),
            ]);
        }
    }
    t.set("verdicts_match_degree", agree);
    Ok(t)
}

fn transfer(p: &TransferParams, prov: Provenance) -> Result<ResultTable, CliError> {
    let q = conjugate(p.p)?;
    let lambda = lattice_in_radius(p.p, p.alpha, p.r)?;
    let mu = lattice_in_radius(q, p.beta, p.r)?;
    let grid = linspace(-p.grid_half_width, p.grid_half_width, p.n_grid);
    let runs: Vec<(String, Vec<f64>, f64)> = match &p.coeffs {
        Some(c) => vec![("coeffs".into(), c.clone(), p.k.unwrap_or(0.0))],
        None => p
            .hermite_indices
            .iter()
            .map(|&n| {
                let mut c = vec![0.0; n + 1];
                c[n] = 1.0;
                (format!("h_{n}"), c, p.k.unwrap_or(n as f64))
            })
            .collect(),
    };
    let mut t = ResultTable::new(
        &[
            "function",
            "K",
            "sup_lambda",
            "sup_mu",
            "sup_real",
            "sup_freq",
            "K_tilde",
            "exponent_real",
            "exponent_freq",
        ],
        prov,
    );
    for (label, coeffs, k) in runs {
        let pair = PairSpec::with_exponents(lambda.clone(), mu.clone(), p.p, q, p.a, p.b, k)?;
        let r = decay_transfer_experiment(&coeffs, &pair, &grid, &grid)?;
        t.push(vec![
            label.into(),
            k.into(),
            r.sup_lambda.into(),
            r.sup_mu.into(),
            r.sup_real.into(),
            r.sup_freq.into(),
            r.weights.k_tilde.into(),
            r.exponent_real.into(),
            r.exponent_freq.into(),
        ]);
    }
    Ok(t)
}

fn morgan(p: &MorganParams, prov: Provenance) -> Result<ResultTable, CliError> {
    let q = match p.q {
        Some(q) => q,
        None => conjugate(p.p)?,
    };
    let threshold = morgan_threshold(p.p, q)?;
    let mut t = ResultTable::new(&["p", "q", "r", "threshold"], prov);
    t.push(vec![
        p.p.into(),
        q.into(),
        p.p.min(q).into(),
        threshold.into(),
    ]);
    Ok(t)
}

fn identities(
    p: &IdentitiesParams,
    prov: Provenance,
    rng: &mut ChaCha8Rng,
) -> Result<ResultTable, CliError> {
    let mut t = ResultTable::new(&["check", "cases", "worst", "pass"], prov);
    let row = |t: &mut ResultTable, name: &str, cases: usize, worst: f64, pass: bool| {
        t.push(vec![name.into(), cases.into(), worst.into(), pass.into()]);
    };

    for &pe in &p.trig_ps {
        let upper = PI / (2.0 * pe);
        // interior points of (0, π/(2p))
        let grid: Vec<f64> = (1..=p.n_theta)
            .map(|i| upper * i as f64 / (p.n_theta + 1) as f64)
            .collect();
        let rows = trig_inequality_check(pe, &grid)?;
        let min = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
        row(
            &mut t,
            &format!("trig_margin_p={}", format_float(pe)),
            rows.len(),
            min,
            min > 0.0,
        );
    }

    let mut worst: f64 = 0.0;
    for _ in 0..p.n_eta {
        let pe = rng.random_range(1.1..6.0);
        let alpha = rng.random_range(0.01..2.0);
        let kappa = rng.random_range(0.01..2.0);
        worst = worst.max(eta_substitution_check(alpha, kappa, pe, conjugate(pe)?)?);
    }
    row(&mut t, "eta_substitution", p.n_eta, worst, worst <= 1e-12);

    let mut failures = 0usize;
    for _ in 0..p.n_algebra {
        let pe = rng.random_range(1.1..6.0);
        let alpha = rng.random_range(0.01..2.0);
        let beta = rng.random_range(0.01..2.0);
        if !criticality_algebra_check(alpha, beta, pe, conjugate(pe)?)?.equivalent {
            failures += 1;
        }
    }
    row(
        &mut t,
        "criticality_algebra",
        p.n_algebra,
        failures as f64,
        failures == 0,
    );

    let mut worst: f64 = 0.0;
    for _ in 0..p.n_beurling {
        let a = rng.random_range(0.1..10.0);
        let b = rng.random_range(0.1..10.0);
        let pe = rng.random_range(1.1..6.0);
        let q = conjugate(pe)?;
        let (bl, bm) = beurling_bounds(a, b, pe, q);
        worst = worst.max((bl.powf(1.0 / pe) * bm.powf(1.0 / q) - 0.5).abs());
    }
    row(
        &mut t,
        "beurling_bound_product",
        p.n_beurling,
        worst,
        worst <= 1e-12,
    );
    let all = t
        .column("pass")
        .is_some_and(|c| c.iter().all(|v| v.as_bool() == Some(true)));
    t.set("all_pass", all);
    Ok(t)
}
