use flatsol_core::grid::{sample_forcing, solve_dirichlet};
use flatsol_core::parabolic::{evolve, ParabolicForcing, ParabolicProblem};
use flatsol_core::semilinear::{solve_bracketed, SemilinearProblem};
use flatsol_core::solver1d::{green_function, solve_exact, HalfProfile};
use flatsol_core::{ForcingPiece, Mesh, PiecewiseForcing, ScalarField};
use proptest::prelude::*;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    s * h / 3.0
}

fn poly_forcing() -> impl Strategy<Value = PiecewiseForcing> {
    (
        prop::collection::vec(0.05f64..1.0, 1..5),
        prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 1..4), 4),
        -2.0f64..2.0,
    )
        .prop_map(|(widths, coeffs, lo)| {
            let mut x = lo;
            let pieces = widths
                .iter()
                .zip(coeffs.iter().cycle())
                .map(|(w, c)| {
                    let p = ForcingPiece::polynomial(x, x + w, c.clone()).unwrap();
                    x += w;
                    p
                })
                .collect();
            PiecewiseForcing::new((lo, x), pieces).unwrap()
        })
}

/// Symmetric, positive on `(-r0, r0)`, negative outside.
fn structured() -> impl Strategy<Value = PiecewiseForcing> {
    (0.5f64..3.0, 0.15f64..0.85, 0.1f64..3.0, prop::collection::vec(0.05f64..3.0, 1..4), prop::collection::vec(0.1f64..1.0, 3))
        .prop_map(|(big_r, frac, fp, neg, cuts)| {
            let r0 = big_r * frac;
            let k = neg.len();
            let mut inner: Vec<f64> = cuts[..k - 1].iter().map(|c| r0 + c * (big_r - r0)).collect();
            inner.sort_by(f64::total_cmp);
            inner.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            let kn = inner.len() + 1;
            let mut outer = vec![r0];
            outer.extend(&inner);
            outer.push(big_r);
            let neg: Vec<f64> = neg[..kn].iter().map(|v| -v).collect();
            let mut breaks: Vec<f64> = outer.iter().rev().map(|x| -x).collect();
            breaks.extend(&outer);
            let mut all: Vec<f64> = neg.iter().rev().copied().collect();
            all.push(fp);
            all.extend(&neg);
            PiecewiseForcing::piecewise_constant(&breaks, &all).unwrap()
        })
}

fn any_mesh() -> impl Strategy<Value = Mesh> {
    prop_oneof![
        (16usize..80).prop_map(|n| Mesh::interval(-1.0, 1.0, n).unwrap()),
        (16usize..40, 16usize..40).prop_map(|(a, b)| Mesh::rectangle(a, b, 1.0, 1.3).unwrap()),
        (16usize..80, 1u32..4).prop_map(|(n, d)| Mesh::radial_disk(n, 1.0, d).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integration_is_additive(f in poly_forcing(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let (lo, hi) = f.domain();
        let (a, c) = (lo, hi);
        let b = lo + (hi - lo) * s.min(t).max(1e-3);
        let whole = f.integrate(a, c).unwrap();
        let parts = f.integrate(a, b).unwrap() + f.integrate(b, c).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-12 * (1.0 + f.absolute_mass().unwrap()));
    }

    #[test]
    fn moments_match_simpson(f in poly_forcing(), c in -3.0f64..3.0, k in 0u32..3) {
        let (lo, hi) = f.domain();
        let exact = f.moment(lo, hi, c, k).unwrap();
        let mut quad = 0.0;
        for p in f.pieces() {
            quad += simpson(|y| (y - c).powi(k as i32) * p.eval(y), p.lo(), p.hi(), 400);
        }
        prop_assert!((exact - quad).abs() <= 1e-9 * (1.0 + quad.abs()), "{} vs {}", exact, quad);
    }

    #[test]
    fn singular_moments_match_simpson_away_from_the_pole(coeff in 0.1f64..2.0, beta in 0.1f64..1.9, c in -1.0f64..1.0, k in 0u32..3) {
        let piece = ForcingPiece::power_singularity(0.0, 1.0, coeff, beta, 1.0).unwrap();
        let b = 0.9;
        let exact = piece.moment(0.0, b, c, k).unwrap();
        let quad = simpson(|y| (y - c).powi(k as i32) * piece.eval(y), 0.0, b, 2000);
        prop_assert!((exact - quad).abs() <= 1e-8 * (1.0 + quad.abs()));
    }

    #[test]
    fn green_function_is_symmetric_and_nonnegative(x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let g = green_function(x, y, -1.0, 1.0).unwrap();
        prop_assert!(g >= 0.0);
        prop_assert!((g - green_function(y, x, -1.0, 1.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn lower_bound_formula_is_the_solution_outside_r0(f in structured(), t in 0.01f64..0.99) {
        let prof = HalfProfile::new(&f, None).unwrap();
        let r = prof.r0() + t * (prof.big_r() - prof.r0());
        let d = prof.decay_function(r).unwrap();
        let u = solve_exact(&f).unwrap().value(prof.centre() + r).unwrap();
        let scale = prof.positive_mass() * prof.big_r();
        prop_assert!((d - u).abs() <= 1e-12 * scale, "D = {}, u = {}", d, u);
    }

    #[test]
    fn discrete_operator_is_inverse_positive(mesh in any_mesh(), seed in any::<u64>()) {
        let n = mesh.node_count();
        let vals: Vec<f64> = (0..n).map(|i| ((i as u64).wrapping_mul(seed | 1) % 997) as f64 / 997.0).collect();
        let f = ScalarField::new(mesh, vals).unwrap();
        let u = solve_dirichlet(&f).unwrap();
        prop_assert!(u.values().iter().all(|v| *v >= -1e-13));
    }

    #[test]
    fn discrete_comparison(mesh in any_mesh(), seed in any::<u64>()) {
        let n = mesh.node_count();
        let g: Vec<f64> = (0..n).map(|i| (((i as u64) ^ seed).wrapping_mul(2654435761) % 1000) as f64 / 500.0 - 1.0).collect();
        let f: Vec<f64> = g.iter().enumerate().map(|(i, v)| v + ((i * 7 + 3) % 5) as f64 * 0.1).collect();
        let u = solve_dirichlet(&ScalarField::new(mesh, f).unwrap()).unwrap();
        let v = solve_dirichlet(&ScalarField::new(mesh, g).unwrap()).unwrap();
        let scale = u.sup_norm().max(v.sup_norm()).max(1.0);
        prop_assert!((0..n).all(|i| u.get(i) >= v.get(i) - 1e-12 * scale));
    }

    #[test]
    fn heat_energy_does_not_grow(n in 16usize..64, theta in 0.5f64..1.0, seed in any::<u64>()) {
        let mesh = Mesh::interval(-1.0, 1.0, n).unwrap();
        let vals: Vec<f64> = (0..=n).map(|i| (((i as u64) ^ seed) % 101) as f64 / 50.0 - 1.0).collect();
        let u0 = ScalarField::new(mesh, vals).unwrap();
        let p = ParabolicProblem::new(u0, ParabolicForcing::zero(mesh), 2e-3, theta, 0.1).unwrap();
        let mut last = f64::INFINITY;
        let mut grew = false;
        evolve(&p, |_, u| {
            let e = u.l2_norm();
            if e > last * (1.0 + 1e-12) {
                grew = true;
            }
            last = e;
        }).unwrap();
        prop_assert!(!grew);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn semilinear_iterates_stay_bracketed(n in 24usize..64, alpha in 0.2f64..0.9, lambda_frac in 0.0f64..0.8, level in 0.2f64..2.0) {
        let mesh = Mesh::interval(-1.0, 1.0, n).unwrap();
        let m = sample_forcing(&mesh, &flatsol_core::families::plateau_unit(1.6).unwrap()).unwrap().scaled(level);
        let lambda1 = flatsol_core::grid::first_eigenpair(&mesh).unwrap().value;
        let p = SemilinearProblem::new(m, lambda_frac * lambda1, alpha).unwrap();
        let sol = solve_bracketed(&p).unwrap();
        let scale = (p.weight().sup_norm() + p.lambda()) * sol.u.sup_norm();
        prop_assert!(sol.residual < 1e-10 * scale, "residual {:e}", sol.residual);
        let h = mesh.h();
        for i in mesh.interior() {
            prop_assert!(sol.u.get(i) >= sol.sub.get(i) - 10.0 * h * h * sol.sup.sup_norm());
            prop_assert!(sol.u.get(i) <= sol.sup.get(i) + 10.0 * h * h * sol.sup.sup_norm());
        }
    }
}
