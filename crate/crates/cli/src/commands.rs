//! One function per subcommand. Each writes its artifacts into `out` and
//! returns the report status, which decides the exit code.

use std::path::{Path, PathBuf};
use std::thread;

use flatsol_core::grid::{first_eigenpair, second_eigenpair, solve_dirichlet};
use flatsol_core::maxprinciple::{boundary_quotients, check_hypotheses, verify_flatness_nd, verify_positivity, HypothesisReport};
use flatsol_core::parabolic::{find_positivity_time, project_out_first_mode, verify_decay_estimate, ParabolicForcing, ParabolicProblem};
use flatsol_core::semilinear::{solve_bracketed, SemilinearProblem};
use flatsol_core::solver1d::{check_conditions, classify, find_critical_parameter, solve_exact, Classification, ConditionReport, Functional, Shape};
use flatsol_core::{families, Mesh, PiecewiseForcing, ScalarField, Verdict, Weight};

use crate::config::{Initial, RunConfig, Tolerances};
use crate::error::{is_verdict, CliError};
use crate::report::{nums, write_csv, write_file, Cell, Report, Section, Status};
use crate::svg::{self, Panel, Series};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub files: Vec<PathBuf>,
}

type Result<T> = std::result::Result<T, CliError>;

fn finish(report: &Report, out: &Path, stem: &str, mut files: Vec<PathBuf>) -> Result<Outcome> {
    files.extend(report.write(out, stem)?);
    Ok(Outcome { status: report.status, files })
}

fn shape_intervals(shape: &Shape) -> Vec<f64> {
    match shape {
        Shape::DeadCore(v) | Shape::SignChanging(v) => v.iter().flat_map(|(a, b)| [*a, *b]).collect(),
        _ => Vec::new(),
    }
}

fn put_classification(s: &mut Section, c: &Classification) {
    s.put("shape", c.shape.name())
        .put("intervals", crate::report::Value::Nums(shape_intervals(&c.shape)))
        .put("min_value", c.min_value)
        .put("slope_left", c.boundary_slopes.0)
        .put("slope_right", c.boundary_slopes.1)
        .put("slopes_exact", c.slopes_exact);
}

/// Conditions, or the reason they do not apply to this forcing.
fn put_conditions(s: &mut Section, rep: &std::result::Result<ConditionReport, flatsol_core::Error>) -> bool {
    match rep {
        Ok(r) => {
            s.put("applicable", true)
                .put("r0", r.r0)
                .put("balance", r.balance.as_str())
                .put("decay", r.decay.as_str())
                .put("flatness", r.flatness.map_or("not-evaluated", Verdict::as_str))
                .put("weighted_positivity", r.weighted_positivity.as_str())
                .put("boundary_derivative", r.boundary_derivative);
            for w in &r.witnesses {
                s.put(&format!("witness_{}_location", w.condition), w.location);
                s.put(&format!("witness_{}_margin", w.condition), w.margin);
            }
            r.balance == Verdict::Fails || r.decay == Verdict::Fails
        }
        Err(e) => {
            s.put("applicable", false).put("reason", e.to_string());
            false
        }
    }
}

fn forcing_points(f: &PiecewiseForcing, n: usize) -> Vec<(f64, f64)> {
    let (lo, hi) = f.domain();
    let mut pts = Vec::new();
    for p in f.pieces() {
        // sample each piece separately so jumps stay vertical
        let k = ((n as f64) * (p.hi() - p.lo()) / (hi - lo)).ceil().max(2.0) as usize;
        for j in 0..=k {
            let x = p.lo() + (p.hi() - p.lo()) * j as f64 / k as f64;
            let y = p.eval(x);
            pts.push((x, if y.is_finite() { y } else { f64::NAN }));
        }
    }
    pts
}

pub fn solve1d(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let f = cfg.forcing()?;
    let sol = solve_exact(&f)?;
    let samples = sol.sample(cfg.tol.samples)?;
    let csv = out.join("u.csv");
    let rows: Vec<Vec<Cell>> = (0..samples.x.len()).map(|i| nums(&[samples.x[i], samples.u[i], samples.du[i]])).collect();
    write_csv(&csv, &["x", "u", "du"], &rows)?;
    let class = classify(&f, cfg.tol.classify_nodes)?;
    let mut report = Report::new("solve1d", cfg.render());
    let (lo, hi) = f.domain();
    let s = report.section("forcing");
    s.put("lo", lo).put("hi", hi).put("total_mass", f.total_mass().ok()).put("absolute_mass", f.absolute_mass().ok());
    if let Ok(w) = f.weighted_integral(Weight::FirstEigenfunction, lo, hi) {
        s.put("first_mode_moment", w);
    }
    put_classification(report.section("solution"), &class);
    let fails = put_conditions(report.section("conditions"), &check_conditions(&f, cfg.r0, cfg.tol.probes));
    if fails {
        report.fail();
    }
    let svg_path = out.join("figure.svg");
    let u_pts: Vec<(f64, f64)> = samples.x.iter().zip(&samples.u).map(|(x, u)| (*x, *u)).collect();
    let panels = [
        Panel::new("forcing", "x", "f").with(Series::new("f", forcing_points(&f, cfg.tol.samples))),
        Panel::new(&format!("solution ({})", class.shape.name()), "x", "u").with(Series::new("u", u_pts)),
    ];
    write_file(&svg_path, &svg::render(&panels, 2))?;
    finish(&report, out, "conditions", vec![csv, svg_path])
}

fn put_hypotheses(s: &mut Section, r: &HypothesisReport) {
    s.put("rho", r.rho)
        .put("c_star", r.c_star)
        .put("big_c_star", r.big_c_star)
        .put("c_hat", r.c_hat)
        .put("positive_weighted", r.positive_weighted)
        .put("negative_weighted", r.negative_weighted)
        .put("c_plus", r.c_plus)
        .put("h1", r.h1.as_str())
        .put("alpha", r.alpha)
        .put("lambda1", r.lambda1)
        .put("epsilon", r.epsilon)
        .put("big_m", r.big_m)
        .put("k", r.k)
        .put("h2", r.h2.map_or("not-evaluated", Verdict::as_str));
    for w in &r.witnesses {
        s.put(&format!("witness_{}_node", w.condition), w.node);
        s.put(&format!("witness_{}_margin", w.condition), w.margin);
    }
}

fn hypotheses_fail(r: &HypothesisReport) -> bool {
    r.h1 != Verdict::Holds || r.h2 != Some(Verdict::Holds)
}

fn nd_setup(cfg: &RunConfig) -> Result<(Mesh, flatsol_core::maxprinciple::NdForcing, flatsol_core::maxprinciple::CompactSet, f64)> {
    let mesh = cfg.mesh()?;
    let nd = cfg.nd_forcing(&mesh)?;
    let compact = cfg.compact.ok_or_else(|| CliError::Usage("this command needs a 'compact' block".into()))?;
    let rho = cfg.rho.ok_or_else(|| CliError::Usage("this command needs 'rho'".into()))?;
    let k = compact.build(&mesh)?;
    Ok((mesh, nd, k, rho))
}

pub fn check(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let mut report = Report::new("check", cfg.render());
    if cfg.compact.is_some() {
        let (mesh, nd, k, rho) = nd_setup(cfg)?;
        let phi = first_eigenpair(&mesh)?;
        let rep = check_hypotheses(&nd, &mesh, &k, rho, cfg.alpha, &phi)?;
        put_hypotheses(report.section("hypotheses"), &rep);
        if hypotheses_fail(&rep) {
            report.fail();
        }
    } else {
        let f = cfg.forcing()?;
        let rep = check_conditions(&f, cfg.r0, cfg.tol.probes)?;
        if put_conditions(report.section("conditions"), &Ok(rep)) {
            report.fail();
        }
    }
    finish(&report, out, "check", Vec::new())
}

fn coord_header(mesh: &Mesh) -> Vec<&'static str> {
    match mesh {
        Mesh::Interval { .. } => vec!["x"],
        Mesh::RadialDisk { .. } => vec!["r"],
        Mesh::Rectangle { .. } => vec!["x", "y"],
    }
}

fn coords(mesh: &Mesh, i: usize) -> Vec<f64> {
    let c = mesh.coord(i);
    match mesh {
        Mesh::Rectangle { .. } => vec![c[0], c[1]],
        _ => vec![c[0]],
    }
}

fn field_rows(mesh: &Mesh, fields: &[&ScalarField]) -> Vec<Vec<Cell>> {
    (0..mesh.node_count())
        .map(|i| {
            let mut row = coords(mesh, i);
            row.extend(fields.iter().map(|f| f.get(i)));
            nums(&row)
        })
        .collect()
}

fn write_fields(path: &Path, mesh: &Mesh, names: &[&str], fields: &[&ScalarField]) -> Result<()> {
    let mut header = coord_header(mesh);
    header.extend_from_slice(names);
    write_csv(path, &header, &field_rows(mesh, fields))
}

/// Profile for plotting; the middle row `y = ly/2` on rectangles.
fn profile(field: &ScalarField) -> Vec<(f64, f64)> {
    let mesh = field.mesh();
    match *mesh {
        Mesh::Rectangle { nx, ny, .. } => (0..=nx).map(|ix| {
            let i = mesh.index2(ix, ny / 2);
            (mesh.coord(i)[0], field.get(i))
        }).collect(),
        _ => (0..mesh.node_count()).map(|i| (mesh.coord(i)[0], field.get(i))).collect(),
    }
}

fn put_mesh(s: &mut Section, mesh: &Mesh) {
    s.put("nodes", mesh.node_count()).put("h", mesh.h()).put("dim", mesh.dim() as usize);
}

pub fn solve_nd(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let mesh = cfg.mesh()?;
    let nd = cfg.nd_forcing(&mesh)?;
    let rhs = nd.sampled(&mesh)?;
    let u = solve_dirichlet(&rhs)?;
    let phi = first_eigenpair(&mesh)?;
    let mut report = Report::new("solve-nd", cfg.render());
    put_mesh(report.section("mesh"), &mesh);
    let (min_u, min_node) = u.min_interior();
    let (integral, abs_integral) = nd.integrals(&mesh)?;
    let (quotient, flux) = boundary_quotients(&u);
    report
        .section("solution")
        .put("min_interior", min_u)
        .put("min_node", min_node)
        .put("max", u.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max))
        .put("forcing_integral", integral)
        .put("forcing_abs_integral", abs_integral)
        .put("max_boundary_quotient", quotient)
        .put("boundary_flux", flux)
        .put("lambda1", phi.value);
    let csv = out.join("field.csv");
    write_fields(&csv, &mesh, &["f", "u"], &[&rhs, &u])?;
    let svg_path = out.join("field.svg");
    let panels = [
        Panel::new("forcing", coord_header(&mesh)[0], "f").with(Series::new("f", profile(&rhs))),
        Panel::new("discrete solution", coord_header(&mesh)[0], "u").with(Series::new("u", profile(&u))),
    ];
    write_file(&svg_path, &svg::render(&panels, 2))?;
    finish(&report, out, "solve-nd", vec![csv, svg_path])
}

pub fn certify(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let (mesh, nd, k, rho) = nd_setup(cfg)?;
    let mut report = Report::new("certify", cfg.render());
    put_mesh(report.section("mesh"), &mesh);
    let cert = match verify_positivity(&nd, &mesh, &k, rho, cfg.alpha) {
        Ok(c) => c,
        Err(e) if is_verdict(&e) => {
            let phi = first_eigenpair(&mesh)?;
            let rep = check_hypotheses(&nd, &mesh, &k, rho, cfg.alpha, &phi)?;
            put_hypotheses(report.section("hypotheses"), &rep);
            report.section("certificate").put("verdict", "fails").put("reason", e.to_string());
            report.fail();
            return finish(&report, out, "certificate", Vec::new());
        }
        Err(e) => return Err(e.into()),
    };
    put_hypotheses(report.section("hypotheses"), &cert.report);
    report
        .section("certificate")
        .put("verdict", "holds")
        .put("min_u", cert.min_u)
        .put("min_gap", cert.min_gap)
        .put("gap_node", cert.gap_node)
        .put("tolerance", cert.tolerance)
        .put("subsolution_max_defect", cert.subsolution.max_defect)
        .put("subsolution_slack", cert.subsolution.slack);
    let flat = verify_flatness_nd(&cert, &nd, &mesh)?;
    report
        .section("flatness")
        .put("verdict", flat.verdict.as_str())
        .put("integral", flat.integral)
        .put("abs_integral", flat.abs_integral)
        .put("max_boundary_quotient", flat.max_boundary_quotient)
        .put("boundary_flux", flat.boundary_flux);
    let gap = cert.u.zip_map(&cert.subsolution.minorant, |a, b| a - b)?;
    let csv = out.join("certificate.csv");
    write_fields(&csv, &mesh, &["u", "w", "minorant", "gap"], &[&cert.u, &cert.subsolution.w, &cert.subsolution.minorant, &gap])?;
    let svg_path = out.join("certificate.svg");
    let panel = Panel::new("solution above the minorant", coord_header(&mesh)[0], "value")
        .with(Series::new("u", profile(&cert.u)))
        .with(Series::new("minorant", profile(&cert.subsolution.minorant)).dashed());
    write_file(&svg_path, &svg::render(&[panel], 1))?;
    finish(&report, out, "certificate", vec![csv, svg_path])
}

pub fn semilinear(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let mesh = cfg.mesh()?;
    let m = cfg.nd_forcing(&mesh)?.sampled(&mesh)?;
    let p = SemilinearProblem::new(m.clone(), cfg.semilinear.lambda, cfg.semilinear.alpha)?;
    let sol = solve_bracketed(&p)?;
    let mut report = Report::new("semilinear", cfg.render());
    put_mesh(report.section("mesh"), &mesh);
    let (min_u, _) = sol.u.min_interior();
    report
        .section("solution")
        .put("lambda", p.lambda())
        .put("lambda1", p.lambda1())
        .put("alpha", p.alpha())
        .put("residual", sol.residual)
        .put("iterations", sol.iterations)
        .put("monotone", sol.monotone)
        .put("sup_constant", sol.sup_constant)
        .put("min_interior", min_u)
        .put("sup_norm", sol.u.sup_norm());
    let csv = out.join("semilinear.csv");
    write_fields(&csv, &mesh, &["m", "u", "sub", "sup"], &[&m, &sol.u, &sol.sub, &sol.sup])?;
    let svg_path = out.join("semilinear.svg");
    let panel = Panel::new("bracketed solution", coord_header(&mesh)[0], "u")
        .with(Series::new("u", profile(&sol.u)))
        .with(Series::new("subsolution", profile(&sol.sub)).dashed())
        .with(Series::new("supersolution", profile(&sol.sup)).dashed());
    write_file(&svg_path, &svg::render(&[panel], 1))?;
    finish(&report, out, "semilinear", vec![csv, svg_path])
}

pub fn parabolic(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let mesh = cfg.mesh()?;
    let g = cfg.nd_forcing(&mesh)?.sampled(&mesh)?;
    let pc = &cfg.parabolic;
    let phi1 = first_eigenpair(&mesh)?;
    let u0 = match pc.initial {
        Initial::Zero => ScalarField::zeros(mesh),
        Initial::Phi1 => phi1.field.clone(),
        Initial::Phi2 => second_eigenpair(&mesh, &phi1)?.field,
    };
    let problem = ParabolicProblem::new(u0.clone(), ParabolicForcing::Stationary(g), pc.dt, pc.theta, pc.horizon)?;
    let trace = find_positivity_time(&problem)?;
    let mut report = Report::new("parabolic", cfg.render());
    put_mesh(report.section("mesh"), &mesh);
    let s = report.section("positivity");
    s.put("steps", problem.steps())
        .put("preserves_order", problem.preserves_order())
        .put("stationary_min", trace.stationary_min)
        .put("hypothesis_warning", trace.hypothesis_warning)
        .put("initial_projection", trace.initial_projection)
        .put("t0", trace.t0)
        .put("final_min", *trace.min_interior.last().unwrap_or(&f64::NAN));
    if let Some(fit) = trace.decay_fit {
        s.put("approach_rate", fit.rate).put("approach_fit_residual", fit.fit_residual);
    }
    s.put("lambda1", phi1.value);
    let mut fails = trace.t0.is_none() && !trace.hypothesis_warning;
    let (u0_hat, removed) = project_out_first_mode(&u0, &phi1)?;
    let d = report.section("decay");
    if pc.decay_horizon > 0.0 && u0_hat.l2_norm() > 1e-8 * u0.l2_norm().max(f64::MIN_POSITIVE) {
        let est = verify_decay_estimate(&mesh, &u0_hat, pc.dt, pc.theta, pc.decay_horizon, cfg.tol.decay_rate)?;
        d.put("evaluated", true)
            .put("removed_first_mode", removed)
            .put("rate", est.fit.rate)
            .put("lambda2", est.lambda2)
            .put("relative_error", est.fit.rate / est.lambda2 - 1.0)
            .put("fit_residual", est.fit.fit_residual)
            .put("bound_constant", est.bound_constant)
            .put("bound_ok", est.bound_ok);
        fails |= !est.bound_ok;
    } else {
        d.put("evaluated", false).put("reason", "initial datum has no component orthogonal to the first mode");
    }
    if fails {
        report.fail();
    }
    let csv = out.join("trace.csv");
    let rows: Vec<Vec<Cell>> = (0..trace.times.len()).map(|i| nums(&[trace.times[i], trace.min_interior[i], trace.sup_ratio[i]])).collect();
    write_csv(&csv, &["t", "min_u", "sup_ratio"], &rows)?;
    let svg_path = out.join("trace.svg");
    let stride = (trace.times.len() / 800).max(1);
    let thin = |ys: &[f64], f: fn(f64) -> f64| -> Vec<(f64, f64)> { trace.times.iter().zip(ys).step_by(stride).map(|(t, y)| (*t, f(*y))).collect() };
    let panels = [
        Panel::new("interior minimum", "t", "min u").with(Series::new("min u", thin(&trace.min_interior, |y| y))),
        Panel::new("distance to steady state", "t", "log sup |u - v|/phi1").with(Series::new("ratio", thin(&trace.sup_ratio, |y| if y > 0.0 { y.ln() } else { f64::NAN }))),
    ];
    write_file(&svg_path, &svg::render(&panels, 2))?;
    finish(&report, out, "parabolic", vec![csv, svg_path])
}

/// Runs `job` on every item in its own thread; results keep the input order.
fn fan_out<T: Sync, R: Send>(items: &[T], job: impl Fn(&T) -> R + Sync) -> Vec<R> {
    thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|it| s.spawn(|| job(it))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn tol_text(tol: &Tolerances) -> String {
    let mut s = String::from("tol {\n");
    for (k, v) in tol.pairs() {
        s.push_str(&format!("    {k} = {v}\n"));
    }
    s.push_str("}\n");
    s
}

struct Case {
    label: String,
    forcing: PiecewiseForcing,
}

struct Solved {
    class: Classification,
    conditions: std::result::Result<ConditionReport, flatsol_core::Error>,
    x: Vec<f64>,
    u: Vec<f64>,
    du: Vec<f64>,
}

fn solve_case(c: &Case, tol: &Tolerances) -> Result<Solved> {
    let s = solve_exact(&c.forcing)?.sample(tol.samples)?;
    Ok(Solved {
        class: classify(&c.forcing, tol.classify_nodes)?,
        conditions: check_conditions(&c.forcing, None, tol.probes),
        x: s.x,
        u: s.u,
        du: s.du,
    })
}

pub fn figure1(tol: &Tolerances, out: &Path) -> Result<Outcome> {
    let cases: Vec<Case> = [1.0, 1.8, 2.0, 2.2].iter().map(|&a| Ok(Case { label: format!("a={a}"), forcing: families::plateau(a)? })).collect::<Result<_>>()?;
    let solved = fan_out(&cases, |c| solve_case(c, tol)).into_iter().collect::<Result<Vec<_>>>()?;
    let mut report = Report::new("reproduce figure1", format!("family = plateau\na = 1 1.8 2 2.2\n{}", tol_text(tol)));
    let mut rows = Vec::new();
    let mut panels = Vec::new();
    for (c, s) in cases.iter().zip(&solved) {
        let sec = report.section(&c.label);
        put_classification(sec, &s.class);
        put_conditions(sec, &s.conditions);
        let a = c.forcing.domain().1;
        for i in 0..s.x.len() {
            rows.push(nums(&[a, s.x[i], s.u[i], s.du[i]]));
        }
        let pts = s.x.iter().zip(&s.u).map(|(x, u)| (*x, *u)).collect();
        panels.push(Panel::new(&format!("{} ({})", c.label, s.class.shape.name()), "x", "u").with(Series::new("u", pts)));
    }
    let csv = out.join("figure1.csv");
    write_csv(&csv, &["a", "x", "u", "du"], &rows)?;
    let svg_path = out.join("figure1.svg");
    write_file(&svg_path, &svg::render(&panels, 2))?;
    finish(&report, out, "figure1", vec![csv, svg_path])
}

pub fn figure2(tol: &Tolerances, out: &Path) -> Result<Outcome> {
    let a_star = find_critical_parameter(families::reversed_plateau, Functional::ValueAt(0.0), 0.0, (3.0, 4.0), tol.critical)?;
    let cases = vec![
        Case { label: "a=4".into(), forcing: families::reversed_plateau(4.0)? },
        Case { label: "a=a*".into(), forcing: families::reversed_plateau(a_star)? },
        Case { label: "dead-band b=0.5".into(), forcing: families::dead_band(a_star, 0.5)? },
    ];
    let solved = fan_out(&cases, |c| solve_case(c, tol)).into_iter().collect::<Result<Vec<_>>>()?;
    let sweep: Vec<f64> = (0..=160).map(|k| 1.0 + 4.0 * k as f64 / 160.0).collect();
    let centre = fan_out(&sweep, |&a| -> Result<f64> { Ok(solve_exact(&families::reversed_plateau(a)?)?.value(0.0)?) }).into_iter().collect::<Result<Vec<_>>>()?;
    let mut report = Report::new("reproduce figure2", format!("family = reversed-plateau, dead-band\nbracket = 3 4\nb = 0.5\n{}", tol_text(tol)));
    report.section("critical").put("a_star", a_star).put("u0_at_a_star", solve_exact(&cases[1].forcing)?.value(0.0)?);
    let mut rows = Vec::new();
    let mut panels = Vec::new();
    for (c, s) in cases.iter().zip(&solved) {
        let sec = report.section(&c.label);
        put_classification(sec, &s.class);
        for i in 0..s.x.len() {
            rows.push(vec![Cell::from(c.label.as_str()), s.x[i].into(), s.u[i].into(), s.du[i].into()]);
        }
        let pts = s.x.iter().zip(&s.u).map(|(x, u)| (*x, *u)).collect();
        panels.push(Panel::new(&format!("{} ({})", c.label, s.class.shape.name()), "x", "u").with(Series::new("u", pts)));
    }
    let centre_panel = Panel::new("centre value against a", "a", "u(0)")
        .with(Series::new("u(0)", sweep.iter().zip(&centre).map(|(a, u)| (*a, *u)).collect()))
        .mark(a_star, 0.0, &format!("a* = {a_star:.4}"));
    panels.insert(1, centre_panel);
    let csv = out.join("figure2.csv");
    write_csv(&csv, &["case", "x", "u", "du"], &rows)?;
    let centre_csv = out.join("figure2_centre.csv");
    let crow: Vec<Vec<Cell>> = sweep.iter().zip(&centre).map(|(a, u)| nums(&[*a, *u])).collect();
    write_csv(&centre_csv, &["a", "u0"], &crow)?;
    let svg_path = out.join("figure2.svg");
    write_file(&svg_path, &svg::render(&panels, 2))?;
    finish(&report, out, "figure2", vec![csv, centre_csv, svg_path])
}

pub fn table_conditions(tol: &Tolerances, out: &Path) -> Result<Outcome> {
    let mut cases = Vec::new();
    for a in [1.0, 1.5, 1.8, 2.0, 2.2, 3.0] {
        cases.push(Case { label: format!("plateau a={a}"), forcing: families::plateau(a)? });
    }
    cases.push(Case { label: "power-law beta=0.5".into(), forcing: families::power_law(1.0, 0.5, 1.0, 0.1, 0.5)? });
    cases.push(Case { label: "power-law beta=1.5".into(), forcing: families::power_law(1.0, 0.9, 1.0, 0.01, 1.5)? });
    let solved = fan_out(&cases, |c| solve_case(c, tol)).into_iter().collect::<Result<Vec<_>>>()?;
    let mut report = Report::new("reproduce table-conditions", tol_text(tol));
    let mut rows = Vec::new();
    for (c, s) in cases.iter().zip(&solved) {
        let sec = report.section(&c.label);
        put_conditions(sec, &s.conditions);
        put_classification(sec, &s.class);
        let (r0, bal, dec, flat, wp, bd) = match &s.conditions {
            Ok(r) => (
                r.r0,
                r.balance.as_str(),
                r.decay.as_str(),
                r.flatness.map_or("not-evaluated", Verdict::as_str),
                r.weighted_positivity.as_str(),
                r.boundary_derivative.unwrap_or(f64::NAN),
            ),
            Err(_) => (f64::NAN, "n/a", "n/a", "n/a", "n/a", f64::NAN),
        };
        rows.push(vec![
            Cell::from(c.label.as_str()),
            r0.into(),
            bal.into(),
            dec.into(),
            flat.into(),
            wp.into(),
            bd.into(),
            s.class.shape.name().into(),
            s.class.min_value.into(),
        ]);
    }
    let csv = out.join("table_conditions.csv");
    write_csv(&csv, &["case", "r0", "balance", "decay", "flatness", "weighted_positivity", "boundary_derivative", "shape", "min_u"], &rows)?;
    finish(&report, out, "table_conditions", vec![csv])
}
