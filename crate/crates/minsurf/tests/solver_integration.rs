//! Cross-module solver behavior: flow monotonicity, trace minimality decay,
//! boundary fixity, and a 3D smoke run.

use minsurf::calculus::{divergence_residual, second_fundamental_form, volume};
use minsurf::grid::{BoundaryData, GridDomain};
use minsurf::preset::Preset;
use minsurf::solve::{harmonic_extension, mcf_solve, mcf_step, newton_solve, SolveConfig};

fn newton_cfg(tol: f64) -> SolveConfig {
    SolveConfig {
        tol,
        continuation_steps: 1,
        ..Default::default()
    }
}

#[test]
fn flow_step_decreases_volume_of_bump() {
    let d = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
    let zero_bd = BoundaryData::zero(d.clone(), 1).unwrap();
    let bump = Preset::Bump { m: 1, amp: 0.3 }
        .sample(&d)
        .unwrap()
        .with_boundary(&zero_bd)
        .unwrap();
    let v0 = volume(&bump);
    let dt = d.min_spacing().powi(2) / 8.0;
    let stepped = mcf_step(&bump, dt).unwrap();
    let v1 = volume(&stepped);
    // The flow is volume gradient descent: first-order decrease dominates
    // the O(dt²) remainder.
    assert!(v1 <= v0 + 1e-12, "volume rose: {v0} -> {v1}");
    assert!(v0 - v1 > 1e-8, "no visible decrease: {v0} -> {v1}");
}

#[test]
fn scherk_step_displacement_scales_with_residual() {
    // The preset samples an exact solution, so one flow step moves the
    // field by at most dt times the O(h²) discretization velocity.
    for res in [9usize, 17] {
        let d = GridDomain::cube(2, -1.0, 1.0, res).unwrap();
        let f = Preset::Scherk.sample(&d).unwrap();
        let dt = d.min_spacing().powi(2) / 8.0;
        let stepped = mcf_step(&f, dt).unwrap();
        let h2 = d.max_spacing().powi(2);
        assert!(
            f.sup_distance(&stepped) <= dt * 2.0 * h2,
            "res {res}: displacement {} vs dt·h² {}",
            f.sup_distance(&stepped),
            dt * h2
        );
    }
}

#[test]
fn minimality_trace_decays_on_solved_scherk() {
    let mut sups = Vec::new();
    for res in [9usize, 17, 33] {
        let d = GridDomain::cube(2, -1.0, 1.0, res).unwrap();
        let f = Preset::Scherk.sample(&d).unwrap();
        let (sol, report) = newton_solve(&f, &f.boundary_trace(), &newton_cfg(1e-10)).unwrap();
        assert!(report.converged);
        let mut sup = 0.0f64;
        for (flat, _) in d.interior_nodes() {
            let h = second_fundamental_form(&sol, flat).unwrap();
            for a in 0..1 {
                sup = sup.max(h.trace(a).abs());
            }
        }
        sups.push(sup);
    }
    // O(h) or better per halving.
    assert!(sups[1] <= 0.6 * sups[0], "{sups:?}");
    assert!(sups[2] <= 0.6 * sups[1], "{sups:?}");
}

#[test]
fn mcf_keeps_boundary_bitwise() {
    let d = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
    let f = Preset::HolomorphicQuadratic { c: 0.2 }
        .sample(&d)
        .unwrap()
        .scaled(0.5);
    let bd = f.boundary_trace();
    let cfg = SolveConfig {
        tol: 1e-6,
        max_iter: 500,
        ..Default::default()
    };
    let (sol, _) = mcf_solve(&f, &bd, &cfg).unwrap();
    assert_eq!(sol.boundary_mismatch(&bd), None);
}

#[test]
fn three_dimensional_solve_smoke() {
    // n = 3, m = 2: linear boundary with an interior perturbation relaxes
    // back to the linear map.
    let d = GridDomain::cube(3, -1.0, 1.0, 7).unwrap();
    let lin = Preset::Linear {
        n: 3,
        m: 2,
        matrix: vec![0.2, -0.1, 0.15, 0.05, 0.2, -0.25],
        offset: vec![0.0, 0.1],
    }
    .sample(&d)
    .unwrap();
    let bd = lin.boundary_trace();
    let init = harmonic_extension(&bd).unwrap();
    assert!(
        init.sup_distance(&lin) < 1e-9,
        "harmonic extension of linear trace is linear"
    );

    let mut perturbed = lin.clone();
    for (flat, mi) in d.interior_nodes() {
        let x = d.coords(&mi);
        let bump = 0.2 * (1.0 - x[0] * x[0]) * (1.0 - x[1] * x[1]) * (1.0 - x[2] * x[2]);
        perturbed.set_value(flat, 0, perturbed.value(flat, 0) + bump);
    }
    let (sol, report) = newton_solve(&perturbed, &bd, &newton_cfg(1e-9)).unwrap();
    assert!(report.converged);
    assert!(sol.sup_distance(&lin) < 1e-7, "{}", sol.sup_distance(&lin));
    let r = divergence_residual(&sol).unwrap();
    assert!(r.sup_div < 1e-9);
}

#[test]
fn continuation_solves_large_boundary_data() {
    // Steep holomorphic data where a cold Newton start needs the ramp.
    let d = GridDomain::cube(2, -1.0, 1.0, 17).unwrap();
    let f = Preset::HolomorphicQuadratic { c: 0.34 }.sample(&d).unwrap();
    let bd = f.boundary_trace();
    let init = harmonic_extension(&bd).unwrap();
    let cfg = SolveConfig {
        tol: 1e-9,
        continuation_steps: 4,
        ..Default::default()
    };
    let (sol, report) = newton_solve(&init, &bd, &cfg).unwrap();
    assert!(report.converged);
    let r = divergence_residual(&sol).unwrap();
    assert!(r.sup_div < 1e-9);
}

#[test]
fn flow_divergence_reports_offending_node() {
    use minsurf::SolveError;
    let d = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
    let f = Preset::Trig {
        m: 1,
        amp: 0.5,
        freq: 2.0,
    }
    .sample(&d)
    .unwrap();
    // An absurd time step overflows the update; the error names a node.
    match mcf_step(&f, f64::MAX) {
        Err(SolveError::Diverged { node }) => {
            assert!(node < d.node_count());
        }
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn gradient_bound_fit_across_scaled_family() {
    // Nonnegative scalar Dirichlet family: s-scaled shifted data, solved
    // per instance; the fitted bound constants stay uniformly bounded.
    use minsurf::audit::gradient_bound_report;
    let d = GridDomain::cube(2, -1.0, 1.0, 17).unwrap();
    let base = Preset::Scherk.sample(&d).unwrap();
    let mut fits = Vec::new();
    for k in 1..=5 {
        let s = 0.2 * k as f64;
        // s·(Scherk + 0.7) stays positive on the closed box.
        let shifted = minsurf::VectorField::from_values(
            d.clone(),
            1,
            base.values().iter().map(|v| s * (v + 0.7)).collect(),
        )
        .unwrap();
        let bd = shifted.boundary_trace();
        let init = harmonic_extension(&bd).unwrap();
        let (sol, report) = newton_solve(&init, &bd, &newton_cfg(1e-9)).unwrap();
        assert!(report.converged);
        // The scalar equation obeys the maximum principle, so the solution
        // stays within the boundary range and the precondition holds.
        let fit = gradient_bound_report(&sol).unwrap();
        assert!(fit.c1.is_finite() && fit.c2.is_finite());
        for r in &fit.rows {
            assert!(r.df_norm <= fit.c1 * (fit.c2 * r.f_norm / r.dist).exp() * (1.0 + 1e-12));
        }
        fits.push((fit.c1, fit.c2));
    }
    for (c1, c2) in &fits {
        assert!(
            *c1 <= 5.0 && *c2 <= 10.0,
            "unexpectedly large fit: {fits:?}"
        );
    }
}
