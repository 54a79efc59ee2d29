use std::f64::consts::PI;

use flatsol_core::grid::{first_eigenpair, sample_forcing, second_eigenpair, solve_dirichlet};
use flatsol_core::maxprinciple::{verify_positivity, CompactSet, CompactShape, NdForcing};
use flatsol_core::parabolic::{evolve, fit_decay, ParabolicForcing, ParabolicProblem};
use flatsol_core::semilinear::{exact_weight, solve_bracketed, SemilinearProblem};
use flatsol_core::solver1d::solve_exact;
use flatsol_core::{Mesh, PiecewiseForcing, ScalarField};

mod common;

fn order(e: &[f64]) -> f64 {
    (e[e.len() - 2] / e[e.len() - 1]).log2()
}

// cell averages make the three-point scheme nodally exact in one dimension
#[test]
fn interval_differences_are_nodally_exact_for_cell_averages() {
    let f = PiecewiseForcing::piecewise_constant(&[-1.0, -0.5, 0.25, 1.0], &[-0.3, 1.0, -0.7]).unwrap();
    let exact = solve_exact(&f).unwrap();
    for n in [64, 128, 256] {
        let mesh = Mesh::interval(-1.0, 1.0, n).unwrap();
        let u = solve_dirichlet(&sample_forcing(&mesh, &f).unwrap()).unwrap();
        let e = (0..=n).fold(0.0_f64, |m, i| m.max((u.get(i) - exact.value(mesh.coord(i)[0]).unwrap()).abs()));
        assert!(e < 1e-12, "n = {n}: {e:e}");
    }
}

#[test]
fn interval_point_samples_converge_at_second_order() {
    let f = PiecewiseForcing::new((-1.0, 1.0), vec![flatsol_core::ForcingPiece::polynomial(-1.0, 1.0, vec![0.2, 0.0, 0.0, 1.0]).unwrap()]).unwrap();
    let exact = solve_exact(&f).unwrap();
    let mut errs = Vec::new();
    for n in [64, 128, 256] {
        let mesh = Mesh::interval(-1.0, 1.0, n).unwrap();
        let g = ScalarField::from_fn(mesh, |p| f.eval(p[0]).unwrap()).with_dirichlet();
        let u = solve_dirichlet(&g).unwrap();
        errs.push((0..=n).fold(0.0_f64, |m, i| m.max((u.get(i) - exact.value(mesh.coord(i)[0]).unwrap()).abs())));
    }
    assert!(order(&errs) >= 1.9, "{errs:?}");
}

#[test]
fn radial_differences_converge_to_the_exact_profile() {
    let (fp, g, a) = (1.0, 0.4, 0.5);
    let f = PiecewiseForcing::piecewise_constant(&[0.0, a, 1.0], &[fp, -g]).unwrap();
    // u(r) = ∫_r^1 (1/s) ∫_0^s t f(t) dt ds in two dimensions
    let outer = |r: f64| (fp + g) * a * a / 2.0 * (1.0 / r).ln() - g * (1.0 - r * r) / 4.0;
    let exact = |r: f64| if r >= a { outer(r) } else { outer(a) + fp * (a * a - r * r) / 4.0 };
    let mut errs = Vec::new();
    for n in [64, 128, 256] {
        let mesh = Mesh::radial_disk(n, 1.0, 2).unwrap();
        let u = solve_dirichlet(&sample_forcing(&mesh, &f).unwrap()).unwrap();
        errs.push((0..=n).fold(0.0_f64, |m, i| m.max((u.get(i) - exact(mesh.coord(i)[0])).abs())));
    }
    assert!(order(&errs) >= 1.9, "{errs:?}");
}

#[test]
fn rectangle_sine_mode_converges() {
    let mut errs = Vec::new();
    for n in [16, 32, 64] {
        let mesh = Mesh::rectangle(n, n, 1.0, 1.0).unwrap();
        let f = ScalarField::from_fn(mesh, |p| (PI * p[0]).sin() * (PI * p[1]).sin()).with_dirichlet();
        let u = solve_dirichlet(&f).unwrap();
        errs.push((0..mesh.node_count()).fold(0.0_f64, |m, i| m.max((u.get(i) - f.get(i) / (2.0 * PI * PI)).abs())));
    }
    assert!(order(&errs) >= 1.9, "{errs:?}");
}

#[test]
fn interval_certificate_agrees_with_the_exact_solver() {
    let f = PiecewiseForcing::piecewise_constant(&[-1.0, -0.625, 0.625, 1.0], &[-0.02, 1.0, -0.02]).unwrap();
    let exact = solve_exact(&f).unwrap();
    let nd = NdForcing::Profile(f);
    for n in [128, 256, 512] {
        let mesh = Mesh::interval(-1.0, 1.0, n).unwrap();
        let k = CompactSet::new(&mesh, CompactShape::Segment { lo: -0.5, hi: 0.5 }).unwrap();
        let cert = verify_positivity(&nd, &mesh, &k, 0.0625, Some(2.5)).unwrap();
        assert!(cert.min_u > 0.0);
        let e = (0..=n).fold(0.0_f64, |m, i| m.max((cert.u.get(i) - exact.value(mesh.coord(i)[0]).unwrap()).abs()));
        assert!(e < 1e-12, "n = {n}: {e:e}");
    }
}

#[test]
fn classical_semilinear_matches_newton() {
    let mesh = Mesh::interval(-1.0, 1.0, 128).unwrap();
    let m = ScalarField::from_fn(mesh, |_| 1.0);
    let p = SemilinearProblem::new(m.clone(), 0.0, 0.5).unwrap();
    let sol = solve_bracketed(&p).unwrap();
    let oracle = common::newton_oracle(&mesh, m.values(), 0.0, 0.5);
    let gap = (0..=128).fold(0.0_f64, |a, i| a.max((sol.u.get(i) - oracle[i]).abs()));
    assert!(gap < 1e-8, "{gap:e}");
    assert!(sol.monotone);
}

#[test]
fn exact_weight_tends_to_its_continuum_formula() {
    let (lambda, alpha) = (0.3, 0.6);
    // U = (1 - x²)/2 for m ≡ 1
    let x: f64 = 0.5;
    let big_u = 0.5 * (1.0 - x * x);
    let continuum = 1.0 - alpha * x * x / ((1.0 - alpha) * big_u) - lambda * (1.0 - alpha) * big_u;
    let mut errs = Vec::new();
    for n in [64, 128, 256] {
        let mesh = Mesh::interval(-1.0, 1.0, n).unwrap();
        let p = SemilinearProblem::new(ScalarField::from_fn(mesh, |_| 1.0), lambda, alpha).unwrap();
        let (m_hat, _) = exact_weight(&p).unwrap();
        errs.push((m_hat.get(3 * n / 4) - continuum).abs());
    }
    assert!(order(&errs) >= 1.9, "{errs:?}");
}

#[test]
fn modes_decay_independently() {
    let mesh = Mesh::interval(-1.0, 1.0, 128).unwrap();
    let p1 = first_eigenpair(&mesh).unwrap();
    let p2 = second_eigenpair(&mesh, &p1).unwrap();
    let u0 = p1.field.zip_map(&p2.field, |a, b| a + b).unwrap();
    let dt = 1e-3;
    let p = ParabolicProblem::new(u0, ParabolicForcing::zero(mesh), dt, 0.5, 0.3).unwrap();
    let gain = |l: f64| (1.0 - 0.5 * dt * l) / (1.0 + 0.5 * dt * l);
    let mut k = 0;
    let mut worst: f64 = 0.0;
    evolve(&p, |_, u| {
        let c1 = u.inner(&p1.field) / p1.field.inner(&p1.field);
        let c2 = u.inner(&p2.field) / p2.field.inner(&p2.field);
        worst = worst.max((c1 - gain(p1.value).powi(k)).abs()).max((c2 - gain(p2.value).powi(k)).abs());
        k += 1;
    })
    .unwrap();
    assert!(worst < 1e-8, "{worst:e}");
}

#[test]
fn steady_state_is_approached_at_the_principal_rate() {
    let mesh = Mesh::interval(-1.0, 1.0, 128).unwrap();
    let g = ScalarField::from_fn(mesh, |_| 1.0);
    let v = solve_dirichlet(&g).unwrap();
    let lambda1 = first_eigenpair(&mesh).unwrap().value;
    let p = ParabolicProblem::new(ScalarField::zeros(mesh), ParabolicForcing::Stationary(g), 1e-3, 0.5, 3.0).unwrap();
    let (mut t, mut e) = (Vec::new(), Vec::new());
    evolve(&p, |s, u| {
        t.push(s);
        e.push(u.zip_map(&v, |a, b| a - b).unwrap().sup_norm());
    })
    .unwrap();
    let fit = fit_decay(&t, &e, 1.5).unwrap();
    assert!((fit.rate / lambda1 - 1.0).abs() < 1e-2, "{} vs {lambda1}", fit.rate);
}

#[test]
fn stationary_plus_homogeneous_flow_is_a_subsolution() {
    let mesh = Mesh::interval(-1.0, 1.0, 64).unwrap();
    let g = sample_forcing(&mesh, &flatsol_core::families::plateau_unit(1.8).unwrap()).unwrap();
    let v = solve_dirichlet(&g).unwrap();
    let u0 = ScalarField::from_fn(mesh, |p| (PI * p[0]).sin()).with_dirichlet();
    let bump = ScalarField::from_fn(mesh, |p| 1.0 + p[0] * p[0]);
    let floor = g.clone();
    let varying = ParabolicForcing::Varying { floor, f: Box::new(move |i, t| g.get(i) + (-t).exp() * bump.get(i)) };
    let (dt, horizon) = (1e-3, 0.5);
    let pu = ParabolicProblem::new(u0.clone(), varying, dt, 1.0, horizon).unwrap();
    let w0 = u0.zip_map(&v, |a, b| a - b).unwrap();
    let pw = ParabolicProblem::new(w0, ParabolicForcing::zero(mesh), dt, 1.0, horizon).unwrap();
    let mut ws = Vec::new();
    evolve(&pw, |_, w| ws.push(w.clone())).unwrap();
    let mut k = 0;
    let mut worst: f64 = 0.0;
    evolve(&pu, |_, u| {
        for i in 0..=64 {
            worst = worst.max(v.get(i) + ws[k].get(i) - u.get(i));
        }
        k += 1;
    })
    .unwrap();
    assert!(worst <= 1e-12, "{worst:e}");
}
