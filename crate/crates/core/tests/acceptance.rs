use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use pcond::dnmap::{dn_homogeneity_check, weak_dn, DnEvaluator};
use pcond::domain::{
    build_rect_mesh, build_rect_mesh_at, BoundaryTrace, Conductivity, ConductivityField, Mesh2D, Point, SolverConfig,
};
use pcond::enclosure::{
    classify_inclusion, reconstruct_hull, reconstruct_hull_with, uniform_directions, Classification, Enclosure,
    SupportBound, SupportEstimate,
};
use pcond::identities::{monotonicity_check, rellich_check};
use pcond::oned::{dn_map_1d, recover_invariant, solve_1d, DirichletPair, PiecewiseConductivity1D, RecoveredInvariant};
use pcond::solver::{energy, solve, ForwardProblem};
use pcond::wolff::{exact_period, integrate_wave, integrate_wave_with, WaveOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Direct writes bypass the test harness capture, so every line appears in
// the log whether the criterion passes or not.
fn report(id: u32, name: &str, pass: bool, elapsed: Duration, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {id:>2} [{verdict}] {name} ({:.2}s): {detail}\n", elapsed.as_secs_f64());
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {id} failed: {detail}");
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn norm(x: Point) -> f64 {
    x[0].hypot(x[1])
}

fn random_pieces(r: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let n = r.random_range(1..=10);
    let mut cuts: Vec<f64> = (0..n - 1).map(|_| r.random_range(0.0..1.0)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut bp = vec![0.0];
    bp.extend(cuts.into_iter().filter(|&c| c > 1e-6 && c < 1.0 - 1e-6));
    bp.push(1.0);
    let values = (0..bp.len() - 1).map(|_| r.random_range(0.1..10.0)).collect();
    (bp, values)
}

fn closed_form_weight(bp: &[f64], values: &[Option<f64>], p: f64) -> f64 {
    bp.windows(2)
        .zip(values)
        .map(|(w, v)| v.map_or(0.0, |s| (w[1] - w[0]) * s.powf(1.0 / (1.0 - p))))
        .sum()
}

#[test]
fn criterion_01_oned_exactness() {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (bp, values) = random_pieces(&mut r);
        let sigma =
            PiecewiseConductivity1D::new(bp.clone(), values.iter().map(|&v| Conductivity::Finite(v)).collect()).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let expected = closed_form_weight(&bp, &values.iter().map(|&v| Some(v)).collect::<Vec<_>>(), p);
            match recover_invariant(|bc| dn_map_1d(&sigma, p, bc), p).unwrap() {
                RecoveredInvariant::Integral(v) => worst = worst.max(rel(v, expected)),
                RecoveredInvariant::ZeroInclusion => worst = f64::INFINITY,
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        "1D invariant recovery",
        worst <= 1e-10 && elapsed < Duration::from_secs(1),
        elapsed,
        format!("150 cases, worst relative error {worst:.2e} (limit 1e-10), runtime limit 1 s"),
    );
}

#[test]
fn criterion_02_oned_degenerate() {
    let start = Instant::now();
    let mut r = rng(2);
    let mut zero_ok = true;
    for k in 0..20 {
        let p = [1.5, 2.0, 3.0, 4.0][k % 4];
        let sigma = PiecewiseConductivity1D::new(
            vec![0.0, 0.3, 0.45, 1.0],
            vec![Conductivity::Finite(r.random_range(0.1..10.0)), Conductivity::Zero, Conductivity::Finite(1.0)],
        )
        .unwrap();
        let bc = DirichletPair::new(r.random_range(-5.0..5.0), r.random_range(-5.0..5.0));
        let dn = dn_map_1d(&sigma, p, bc).unwrap();
        zero_ok &= dn.left == 0.0 && dn.right == 0.0;
        zero_ok &= recover_invariant(|bc| dn_map_1d(&sigma, p, bc), p).unwrap() == RecoveredInvariant::ZeroInclusion;
    }

    let bp = vec![0.0, 0.2, 0.5, 0.7, 1.0];
    let finite = [2.0, 0.5, 3.0, 1.5];
    let mut shrink_err: f64 = 0.0;
    let mut spread: f64 = 0.0;
    for p in [1.5, 2.0, 3.0] {
        let with_inf = PiecewiseConductivity1D::new(
            bp.clone(),
            vec![
                Conductivity::Finite(finite[0]),
                Conductivity::Infinite,
                Conductivity::Finite(finite[2]),
                Conductivity::Finite(finite[3]),
            ],
        )
        .unwrap();
        let all_finite =
            PiecewiseConductivity1D::new(bp.clone(), finite.iter().map(|&v| Conductivity::Finite(v)).collect()).unwrap();
        let removed = (bp[2] - bp[1]) * finite[1].powf(1.0 / (1.0 - p));
        shrink_err = shrink_err.max((all_finite.total_weight(p) - with_inf.total_weight(p) - removed).abs());
        let expected = closed_form_weight(&bp, &[Some(finite[0]), None, Some(finite[2]), Some(finite[3])], p);
        shrink_err = shrink_err.max(rel(with_inf.total_weight(p), expected));
        let u = solve_1d(&with_inf, p, DirichletPair::new(-1.0, 2.0)).unwrap();
        let inside: Vec<f64> = (0..=20).map(|k| u.value(0.2 + 0.3 * k as f64 / 20.0)).collect();
        spread = spread.max(inside.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - inside.iter().fold(f64::INFINITY, |a, &b| a.min(b)));
    }
    report(
        2,
        "1D degenerate pieces",
        zero_ok && shrink_err <= 1e-12 && spread == 0.0,
        start.elapsed(),
        format!("D0 maps 20/20 pairs to (0,0): {zero_ok}; D∞ weight deviation {shrink_err:.2e}; u spread on D∞ {spread:.1e}"),
    );
}

#[test]
fn criterion_03_wolff_waves() {
    let start = Instant::now();
    let w2 = integrate_wave(2.0, 0.0, 1.0).unwrap();
    let sine_err = w2.samples().map(|(s, w, _)| (w - s.sin()).abs()).fold(0.0, f64::max);
    let period2_err = (w2.period() - 2.0 * PI).abs();
    let mut pass = sine_err <= 1e-8 && period2_err <= 1e-8;
    let mut detail = format!("p=2 sine error {sine_err:.1e}, period error {period2_err:.1e}");
    for p in [1.5, 3.0, 4.0] {
        let w = integrate_wave(p, 0.0, 1.0).unwrap();
        let alt = integrate_wave_with(p, 0.0, 1.0, WaveOptions::cross_check()).unwrap();
        let agree = (w.period() - alt.period()).abs();
        let (min_r2, _) = w.radius_sq_bounds();
        let exact = (w.period() - exact_period(p).unwrap()).abs();
        pass &= w.return_error() <= 1e-8 && w.mean_integral().abs() <= 1e-8 && min_r2 >= 1e-6 && agree <= 1e-8;
        detail += &format!(
            "; p={p}: return {:.1e}, mean {:.1e}, min r² {min_r2:.3}, integrators differ {agree:.1e}, vs πp/(p-1) {exact:.1e}",
            w.return_error(),
            w.mean_integral().abs()
        );
    }
    let elapsed = start.elapsed();
    report(3, "Wolff periodic waves", pass && elapsed < Duration::from_secs(10), elapsed, detail);
}

fn smooth_field(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> impl Fn(Point) -> f64 {
    let (a, b): (f64, f64) = (r.random_range(0.5..3.0), r.random_range(0.5..3.0));
    let (phi, psi): (f64, f64) = (r.random_range(0.0..PI), r.random_range(0.0..PI));
    let c: f64 = r.random_range(0.0..1.0);
    move |x: Point| {
        let s = 0.5 + 0.25 * (a * x[0] + phi).sin() + 0.25 * (b * x[1] + psi).cos() * c;
        lo + (hi - lo) * s.clamp(0.0, 1.0)
    }
}

fn smooth_data(r: &mut ChaCha8Rng) -> impl Fn(Point) -> f64 {
    let k: [f64; 4] = std::array::from_fn(|_| r.random_range(-3.0..3.0));
    move |x: Point| (k[0] * x[0] + k[1] * x[1]).sin() + 0.5 * (k[2] * x[0] - k[3] * x[1]).cos() + k[0] * x[1]
}

#[test]
fn criterion_04_forward_solver() {
    let start = Instant::now();
    let mesh = build_rect_mesh(32, 32, 1.0, 1.0).unwrap();
    let unit = ConductivityField::uniform(&mesh, 1.0).unwrap();
    let affine = |x: Point| 0.3 + x[0] - 0.5 * x[1];
    let f = BoundaryTrace::from_fn(&mesh, affine).unwrap();
    let mut affine_err: f64 = 0.0;
    for p in [1.5, 2.0, 3.0, 4.0] {
        let (u, _) = solve(&mesh, &unit, &f, &SolverConfig::new(p).unwrap()).unwrap();
        for (v, x) in u.vertex_values.iter().zip(mesh.vertices()) {
            affine_err = affine_err.max((v - affine(*x)).abs());
        }
    }

    let p = 3.0;
    let mut errors = Vec::new();
    for n in [16, 32, 64] {
        let mesh = build_rect_mesh_at([1.0, 1.0], n, n, 1.0, 1.0).unwrap();
        let sigma = ConductivityField::uniform(&mesh, 1.0).unwrap();
        let f = BoundaryTrace::from_fn(&mesh, |x| norm(x).sqrt()).unwrap();
        let (u, _) = solve(&mesh, &sigma, &f, &SolverConfig::new(p).unwrap()).unwrap();
        let mut err = 0.0;
        for (g, geo) in u.gradients.iter().zip(mesh.geometry()) {
            let c = geo.centroid;
            let r = norm(c);
            let exact = [0.5 * c[0] / r.powf(1.5), 0.5 * c[1] / r.powf(1.5)];
            err += geo.area * norm([g[0] - exact[0], g[1] - exact[1]]).powf(p);
        }
        errors.push(err.powf(1.0 / p));
    }
    let rates: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();

    let mut r = rng(4);
    let coarse = build_rect_mesh(16, 16, 1.0, 1.0).unwrap();
    let mut max_violation: f64 = 0.0;
    for k in 0..20 {
        let p = [1.5, 2.0, 3.0, 4.0][k % 4];
        let s = smooth_field(&mut r, 0.2, 5.0);
        let sigma = ConductivityField::from_fn(&coarse, |c| Conductivity::Finite(s(c))).unwrap();
        let f = BoundaryTrace::from_fn(&coarse, smooth_data(&mut r)).unwrap();
        let (lo, hi) = f.values().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let (u, _) = solve(&coarse, &sigma, &f, &SolverConfig::new(p).unwrap()).unwrap();
        for &v in &u.vertex_values {
            max_violation = max_violation.max(lo - v).max(v - hi);
        }
    }
    let elapsed = start.elapsed();
    report(
        4,
        "forward solver",
        affine_err <= 1e-10
            && rates.iter().all(|&r| r >= 0.9)
            && max_violation <= 1e-10
            && elapsed < Duration::from_secs(120),
        elapsed,
        format!(
            "affine error {affine_err:.1e}; radial p=3 energy-norm errors {}, rates {rates:.3?} (≥0.9); \
             maximum principle worst excess {max_violation:.1e} over 20 fields",
            sci(&errors)
        ),
    );
}

fn block(half: f64) -> impl Fn(Point) -> bool {
    move |c| c[0].abs() < half && c[1].abs() < half
}

#[test]
fn criterion_05_degenerate_regions() {
    let start = Instant::now();
    let mesh = build_rect_mesh_at([-0.5, -0.5], 32, 32, 1.0, 1.0).unwrap();
    let data = |x: Point| x[0] + 0.3 * x[1] * x[1];
    let f = BoundaryTrace::from_fn(&mesh, data).unwrap();
    let cfg = SolverConfig::new(3.0).unwrap();

    let inf = ConductivityField::uniform(&mesh, 1.0).unwrap().with_region(&mesh, block(0.2), Conductivity::Infinite).unwrap();
    let problem = ForwardProblem::new(&mesh, &inf, cfg).unwrap();
    let (u, _) = problem.solve(&f).unwrap();
    let mut spread: f64 = 0.0;
    for comp in problem.dofs().components() {
        let vals: Vec<f64> = comp.iter().map(|&v| u.vertex_values[v]).collect();
        spread = spread.max(vals.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - vals.iter().fold(f64::INFINITY, |a, &b| a.min(b)));
    }
    let flux = problem.dinf_fluxes(&u.vertex_values).iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    let flux_limit = 10.0 * cfg.tol_residual;

    let zero = ConductivityField::uniform(&mesh, 1.0).unwrap().with_region(&mesh, block(0.2), Conductivity::Zero).unwrap();
    let problem = ForwardProblem::new(&mesh, &zero, cfg).unwrap();
    let (u, _) = problem.solve(&f).unwrap();
    let mut r = rng(5);
    let dead: Vec<usize> = (0..mesh.num_vertices()).filter(|&v| problem.dofs().is_dead(v)).collect();
    let mut junk = u.vertex_values.clone();
    for &v in &dead {
        junk[v] = r.random_range(-100.0..100.0);
    }
    let energy_shift = (energy(&mesh, &zero, 3.0, &junk) - u.energy).abs();
    let (u2, _) = problem.solve_from(&f, Some(&junk)).unwrap();
    let exterior_diff = (0..mesh.num_vertices())
        .filter(|&v| !problem.dofs().is_dead(v))
        .map(|v| (u.vertex_values[v] - u2.vertex_values[v]).abs())
        .fold(0.0, f64::max);
    let diff_limit = 10.0 * cfg.tol_residual;

    report(
        5,
        "degenerate regions",
        spread == 0.0 && flux <= flux_limit && !dead.is_empty() && energy_shift == 0.0 && exterior_diff <= diff_limit,
        start.elapsed(),
        format!(
            "D∞ spread {spread:.1e}, net flux {flux:.1e} (limit {flux_limit:.0e}); {} D0-interior vertices, \
             energy change {energy_shift:.1e}, exterior change {exterior_diff:.1e} (limit {diff_limit:.0e})",
            dead.len()
        ),
    );
}

#[test]
fn criterion_06_dn_structure() {
    let start = Instant::now();
    let mesh = build_rect_mesh(16, 16, 1.0, 1.0).unwrap();
    let mut r = rng(6);
    let s = smooth_field(&mut r, 0.5, 3.0);
    let sigma = ConductivityField::from_fn(&mesh, |c| Conductivity::Finite(s(c))).unwrap();
    let f = BoundaryTrace::from_fn(&mesh, smooth_data(&mut r)).unwrap();
    let g = BoundaryTrace::from_fn(&mesh, smooth_data(&mut r)).unwrap();

    let mut energy_err: f64 = 0.0;
    let mut homog_err: f64 = 0.0;
    let mut homog_limit = f64::INFINITY;
    for p in [1.5, 2.0, 3.0, 4.0] {
        let cfg = SolverConfig::new(p).unwrap();
        let w = weak_dn(&mesh, &sigma, &f, &f, &cfg).unwrap();
        energy_err = energy_err.max(rel(w.value, w.solve_report.final_energy));
        let eval = DnEvaluator::new(&mesh, &sigma, cfg).unwrap();
        homog_limit = homog_limit.min(10.0 * cfg.tol_residual);
        for t in [-2.0, 0.5, 3.0] {
            homog_err = homog_err.max(dn_homogeneity_check(&eval, &f, &g, t, 0.0).unwrap().deviation);
        }
    }
    let cfg = SolverConfig::new(2.0).unwrap();
    let a = weak_dn(&mesh, &sigma, &f, &g, &cfg).unwrap().value;
    let b = weak_dn(&mesh, &sigma, &g, &f, &cfg).unwrap().value;
    let sym = rel(a, b);
    report(
        6,
        "DN map structure",
        energy_err <= 1e-10 && homog_err <= homog_limit && sym <= 1e-10,
        start.elapsed(),
        format!(
            "energy identity {energy_err:.1e}; homogeneity {homog_err:.1e} (limit {homog_limit:.0e}); p=2 symmetry {sym:.1e}"
        ),
    );
}

#[test]
fn criterion_07_monotonicity() {
    let start = Instant::now();
    let mesh = build_rect_mesh(16, 16, 1.0, 1.0).unwrap();
    let mut r = rng(7);
    let mut holds = 0;
    let mut worst = f64::INFINITY;
    for k in 0..30 {
        let p = [1.5, 2.0, 3.0][k % 3];
        let s0 = smooth_field(&mut r, 0.3, 3.0);
        let bump = smooth_field(&mut r, 0.0, 2.0);
        let sigma0 = ConductivityField::from_fn(&mesh, |c| Conductivity::Finite(s0(c))).unwrap();
        let sigma1 = ConductivityField::from_fn(&mesh, |c| Conductivity::Finite(s0(c) * (1.0 + bump(c)))).unwrap();
        let f = BoundaryTrace::from_fn(&mesh, smooth_data(&mut r)).unwrap();
        let rep = monotonicity_check(&mesh, &sigma0, &sigma1, &f, &SolverConfig::new(p).unwrap()).unwrap();
        holds += rep.holds as usize;
        worst = worst.min((rep.margins.0.min(rep.margins.1)) / rep.upper.abs().max(1e-300));
    }
    let m = build_rect_mesh(8, 8, 1.0, 1.0).unwrap();
    let one = ConductivityField::uniform(&m, 1.0).unwrap();
    let two = ConductivityField::uniform(&m, 2.0).unwrap();
    let f = BoundaryTrace::from_fn(&m, |x| x[0]).unwrap();
    let c = monotonicity_check(&m, &one, &two, &f, &SolverConfig::new(2.0).unwrap()).unwrap();
    let example_err = (c.lower - 0.5).abs().max((c.middle - 1.0).abs()).max((c.upper - 1.0).abs());
    report(
        7,
        "monotonicity sandwich",
        holds == 30 && example_err <= 1e-8,
        start.elapsed(),
        format!(
            "{holds}/30 random pairs hold, smallest relative margin {worst:.2e}; constant example ({:.6}, {:.6}, {:.6}), error {example_err:.1e}",
            c.lower, c.middle, c.upper
        ),
    );
}

#[test]
fn criterion_08_rellich() {
    let start = Instant::now();
    let mut residuals = Vec::new();
    let mut lhs = Vec::new();
    for n in [16, 32, 64] {
        let mesh = build_rect_mesh(n, n, 1.0, 1.0).unwrap();
        let s: Vec<f64> = mesh.vertices().iter().map(|x| 1.0 + x[0]).collect();
        let f = BoundaryTrace::from_fn(&mesh, |x| (1.0 + x[0]).ln()).unwrap();
        let rep = rellich_check(&mesh, &s, &f, [1.0, 0.0], &SolverConfig::new(2.0).unwrap()).unwrap();
        residuals.push(rep.residual);
        lhs.push(rep.lhs);
    }
    let decreasing = residuals.windows(2).all(|w| w[1] < w[0]);
    let lhs_err = (lhs[2] - 0.5).abs();
    report(
        8,
        "Rellich identity",
        decreasing && residuals[2] <= 2e-2 && lhs_err <= 2e-2,
        start.elapsed(),
        format!("residuals {} at h = 1/16, 1/32, 1/64; lhs {:.5} (error {lhs_err:.1e})", sci(&residuals), lhs[2]),
    );
}

fn sweep(sigma_of: impl Fn(&Mesh2D) -> ConductivityField, p: f64, taus: &[f64]) -> (Vec<SupportEstimate>, Classification) {
    let mesh = build_rect_mesh_at([-0.5, -0.5], 64, 64, 1.0, 1.0).unwrap();
    let sigma = sigma_of(&mesh);
    let wave = integrate_wave(p, 0.0, 1.0).unwrap();
    let enc = Enclosure::new(&mesh, &sigma, wave, SolverConfig::new(p).unwrap()).unwrap();
    let est = enc.support_estimates(&uniform_directions(16), taus).unwrap();
    let samples: Vec<_> = est.iter().flat_map(|e| e.samples.iter().copied()).collect();
    (est, classify_inclusion(&samples))
}

fn disk(value: Conductivity) -> impl Fn(&Mesh2D) -> ConductivityField {
    move |mesh| {
        ConductivityField::uniform(mesh, 1.0)
            .unwrap()
            .with_region(mesh, |c| norm(c) < 0.25, value)
            .unwrap()
    }
}

const TAUS: [f64; 4] = [4.0, 6.0, 8.0, 10.0];

#[test]
fn criterion_09_enclosure_disk() {
    let start = Instant::now();
    let truth = |rho: Point| 0.25 * norm(rho);
    let mut pass = true;
    let mut detail = Vec::new();
    for (value, expected) in [(2.0, Classification::Conducting), (0.5, Classification::Insulating)] {
        let (est, class) = sweep(disk(Conductivity::Finite(value)), 2.0, &TAUS);
        let conclusive: Vec<f64> = est.iter().filter_map(|e| e.h_est).collect();
        let worst = conclusive.iter().map(|h| (h - 0.25).abs()).fold(0.0, f64::max);
        let hausdorff = reconstruct_hull(&est).map(|h| h.hausdorff_to(truth, 720)).unwrap_or(f64::INFINITY);
        pass &= worst <= 0.05 && hausdorff <= 0.08 && class == expected && !conclusive.is_empty();
        detail.push(format!(
            "σ_D={value}: {}/16 conclusive, worst |h−0.25| {worst:.4}, Hausdorff {hausdorff:.4}, {class}",
            conclusive.len()
        ));
    }
    let elapsed = start.elapsed();
    report(9, "disk enclosure", pass && elapsed < Duration::from_secs(600), elapsed, detail.join("; "));
}

#[test]
fn criterion_10_degenerate_containment() {
    let start = Instant::now();
    let truth = |rho: Point| 0.15 * (rho[0].abs() + rho[1].abs());
    let mut pass = true;
    let mut detail = Vec::new();
    for value in [Conductivity::Infinite, Conductivity::Zero] {
        let (est, class) = sweep(
            |mesh| ConductivityField::uniform(mesh, 1.0).unwrap().with_region(mesh, block(0.15), value).unwrap(),
            2.0,
            &TAUS,
        );
        let outer = reconstruct_hull_with(&est, SupportBound::Outer).map(|h| h.containment_margin(truth, 720));
        let central = reconstruct_hull_with(&est, SupportBound::Central).map(|h| h.containment_margin(truth, 720));
        let margin = *outer.as_ref().unwrap_or(&f64::NEG_INFINITY);
        pass &= margin >= -0.02;
        detail.push(format!(
            "σ_D={}: outer-hull margin {margin:.4}, central-hull margin {:.4}, {class}",
            if value.is_zero() { "0" } else { "∞" },
            central.unwrap_or(f64::NEG_INFINITY)
        ));
    }
    report(10, "degenerate containment", pass, start.elapsed(), detail.join("; "));
}

#[test]
fn criterion_11_scaling_identity() {
    let start = Instant::now();
    let mesh = build_rect_mesh_at([-0.5, -0.5], 64, 64, 1.0, 1.0).unwrap();
    let sigma = disk(Conductivity::Finite(2.0))(&mesh);
    let wave = integrate_wave(2.0, 0.0, 1.0).unwrap();
    let enc = Enclosure::new(&mesh, &sigma, wave, SolverConfig::new(2.0).unwrap()).unwrap();
    let mut r = rng(11);
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for _ in 0..10 {
        let a: f64 = r.random_range(0.0..2.0 * PI);
        let t = r.random_range(-0.4..0.6);
        let t0 = r.random_range(-0.4..0.6);
        let tau = r.random_range(1.0..8.0);
        let rep = enc.scaling_identity_check([a.cos(), a.sin()], t, t0, tau).unwrap();
        if rep.skipped {
            skipped += 1;
        } else {
            worst = worst.max(rep.relative_error);
        }
    }
    report(
        11,
        "scaling identity",
        skipped == 0 && worst <= 1e-6,
        start.elapsed(),
        format!("10 random (t, t0, τ ≤ 8), worst relative error {worst:.2e}, {skipped} below noise floor"),
    );
}
