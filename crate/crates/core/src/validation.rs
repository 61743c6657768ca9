//! Programmatic acceptance checks: each criterion runs its stated grid at
//! its stated tolerance and reports one pass/fail outcome with measured
//! residuals. The `acceptance` integration test target and the CLI
//! `validate` command both drive this module.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::algebra::Matrix2C;
use crate::defects::{defect_density, defect_density_finite_force, QuenchRate};
use crate::evolution::{
    evolve_coupled_pair, evolve_trajectory, metric_via_propagator, min_window_scale, EvolveError,
    IntegratorConfig, TOL_CONSERVATION,
};
use crate::model::{EpTimes, ModeParams};
use crate::observables::{asymptotic_readout, asymptotic_sigma_z, ExpectationMethod};

const GAMMA: f64 = 1.0;
const WINDOW_SCALE: f64 = 80.0;

/// Growth exponents up to which the coupled `(psi, rho)` matrix
/// representation can hold the conserved pairing in f64 (error floor
/// `eps * exp(4 Lambda)`).
const PAIR_ROUTE_EXPONENT_LIMIT: f64 = 2.0;

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl CriterionOutcome {
    fn new(name: &'static str, passed: bool, details: String) -> Self {
        Self { name, passed, details }
    }
}

fn mode(k: f64, gamma: f64, force: f64) -> ModeParams {
    ModeParams::new(k, gamma, force).expect("valid mode parameters")
}

/// Window scale actually used for a mode: the requested scale, enlarged to
/// the smallest start point the asymptotic initial condition accepts.
fn legal_scale(p: &ModeParams, requested: f64) -> f64 {
    requested.max(min_window_scale(p))
}

fn run_config(p: &ModeParams, requested_scale: f64, samples: usize) -> IntegratorConfig {
    let mut cfg = IntegratorConfig::for_window(p, legal_scale(p, requested_scale));
    cfg.sample_count = samples;
    cfg
}

/// Simulated asymptotic spin expectation against the closed formula over
/// the acceptance grid, both methods. The coalescence momentum `k = gamma`
/// is checked separately against the analytic limit branch at 5e-3.
pub fn criterion_asymptotic_formula() -> CriterionOutcome {
    let mut worst: f64 = 0.0;
    let mut lines = String::new();
    let mut passed = true;
    for scale in [2.5, 25.0] {
        let force = GAMMA * GAMMA / scale;
        for k_rel in [0.2, 0.5, 1.1, 1.5, 2.0] {
            let p = mode(k_rel * GAMMA, GAMMA, force);
            let cfg = run_config(&p, WINDOW_SCALE, 33);
            let traj = match evolve_trajectory(&p, &cfg) {
                Ok(t) => t,
                Err(e) => {
                    return CriterionOutcome::new(
                        "asymptotic-formula-agreement",
                        false,
                        format!("evolution failed at k/g={k_rel}, g^2/F={scale}: {e}"),
                    )
                }
            };
            for method in ExpectationMethod::BOTH {
                let formula = asymptotic_sigma_z(&p, method).unwrap().value;
                let (sim, _) = asymptotic_readout(&traj, method).unwrap();
                let diff = (sim - formula).abs();
                worst = worst.max(diff);
                if diff > 1e-3 {
                    passed = false;
                    lines.push_str(&format!(
                        " FAIL k/g={k_rel} g^2/F={scale} {}: |{sim:.6} - {formula:.6}| = {diff:.2e};",
                        method.label()
                    ));
                }
            }
        }
        // limit branch at the coalescence momentum
        let p = mode(GAMMA, GAMMA, force);
        let cfg = run_config(&p, WINDOW_SCALE, 33);
        let traj = evolve_trajectory(&p, &cfg).expect("coalescence-mode evolution");
        let limit = (force - PI * GAMMA * GAMMA) / (force + PI * GAMMA * GAMMA);
        let (sim, _) = asymptotic_readout(&traj, ExpectationMethod::Metric).unwrap();
        let diff = (sim - limit).abs();
        if diff > 5e-3 {
            passed = false;
            lines.push_str(&format!(" FAIL limit branch at g^2/F={scale}: {diff:.2e};"));
        }
    }
    CriterionOutcome::new(
        "asymptotic-formula-agreement",
        passed,
        format!("worst |simulated - formula| = {worst:.2e} (tol 1e-3){lines}"),
    )
}

/// Hermitian Landau-Zener limit: `gamma = 0` endpoint matches
/// `2 exp(-2 pi delta0) - 1` to 1e-4 and the two pipelines agree to 1e-6.
pub fn criterion_hermitian_lz_limit() -> CriterionOutcome {
    let force = 1.0;
    let mut worst_formula: f64 = 0.0;
    let mut worst_cross: f64 = 0.0;
    for k2f in [0.1, 0.5, 1.0] {
        let p = mode((k2f * force).sqrt(), 0.0, force);
        let cfg = run_config(&p, WINDOW_SCALE, 33);
        let traj = evolve_trajectory(&p, &cfg).expect("LZ evolution");
        let expect = 2.0 * (-2.0 * PI * p.delta()).exp() - 1.0;
        let (m, _) = asymptotic_readout(&traj, ExpectationMethod::Metric).unwrap();
        let (n, _) = asymptotic_readout(&traj, ExpectationMethod::Norm).unwrap();
        worst_formula = worst_formula.max((m - expect).abs()).max((n - expect).abs());
        worst_cross = worst_cross.max((m - n).abs());
    }
    let passed = worst_formula <= 1e-4 && worst_cross <= 1e-6;
    CriterionOutcome::new(
        "hermitian-landau-zener-limit",
        passed,
        format!(
            "worst |simulated - 2e^(-2 pi d0) + 1| = {worst_formula:.2e} (tol 1e-4), \
             metric/norm cross = {worst_cross:.2e} (tol 1e-6)"
        ),
    )
}

/// Defect-freezing densities at the momentum cutoff pi: the broken-mode
/// contribution is `gamma/(3 pi)` for the metric and zero for the norm;
/// symmetric modes give `gamma/pi - 1`. The finite-rate version at
/// `gamma^2/F = 400` must sit within 2e-2 of each.
pub fn criterion_defect_freezing() -> CriterionOutcome {
    let k_max = PI;
    let mut lines = String::new();
    let mut passed = true;
    let mut check = |label: &str, got: f64, expect: f64, tol: f64| {
        let diff = (got - expect).abs();
        if diff > tol {
            passed = false;
            lines.push_str(&format!(" FAIL {label}: |{got:.8} - {expect:.8}| = {diff:.2e};"));
        } else {
            lines.push_str(&format!(" {label}: {diff:.2e};"));
        }
    };

    let adiab_metric = defect_density(GAMMA, QuenchRate::Adiabatic, ExpectationMethod::Metric, k_max);
    let adiab_norm = defect_density(GAMMA, QuenchRate::Adiabatic, ExpectationMethod::Norm, k_max);
    match (&adiab_metric, &adiab_norm) {
        (Ok(m), Ok(n)) => {
            check("metric broken", m.sigma_ptb, GAMMA / (3.0 * PI), 1e-6);
            check("norm broken", n.sigma_ptb, 0.0, 1e-8);
            check("symmetric", m.sigma_pts, GAMMA / PI - 1.0, 1e-6);

            let force = GAMMA * GAMMA / 400.0;
            let fm = defect_density_finite_force(GAMMA, force, ExpectationMethod::Metric, k_max);
            let fnorm = defect_density_finite_force(GAMMA, force, ExpectationMethod::Norm, k_max);
            match (fm, fnorm) {
                (Ok(fm), Ok(fnorm)) => {
                    check("finite-rate metric broken", fm.sigma_ptb, m.sigma_ptb, 2e-2);
                    check("finite-rate norm broken", fnorm.sigma_ptb, 0.0, 2e-2);
                    check("finite-rate symmetric", fm.sigma_pts, m.sigma_pts, 2e-2);
                }
                _ => {
                    passed = false;
                    lines.push_str(" FAIL finite-rate quadrature errored;");
                }
            }
        }
        _ => {
            passed = false;
            lines.push_str(" FAIL adiabatic quadrature errored;");
        }
    }
    CriterionOutcome::new("defect-freezing-densities", passed, lines)
}

/// Momentum-parity structure of the end-point expectations.
pub fn criterion_parity_structure() -> CriterionOutcome {
    let force = GAMMA * GAMMA / 2.5;
    let ks = [0.2, 0.5, 1.1, 2.0];
    let grid: Vec<f64> = ks.iter().flat_map(|k| [*k, -*k]).collect();
    let p0 = mode(0.0, GAMMA, force);
    let cfg = run_config(&p0, WINDOW_SCALE, 33);
    let rows = match crate::observables::parity_report(GAMMA, force, &grid, &cfg) {
        Ok(r) => r,
        Err(e) => {
            return CriterionOutcome::new(
                "momentum-parity-structure",
                false,
                format!("parity report failed: {e}"),
            )
        }
    };
    let mut passed = true;
    let mut lines = String::new();
    let mut worst_metric: f64 = 0.0;
    for row in &rows {
        worst_metric = worst_metric.max(row.metric_sz_even_residual).max(row.metric_sx_odd_residual);
        if row.metric_sz_even_residual > 1e-6 || row.metric_sx_odd_residual > 1e-6 {
            passed = false;
            lines.push_str(&format!(
                " FAIL metric parity at k={}: sz {:.2e}, sx {:.2e};",
                row.k, row.metric_sz_even_residual, row.metric_sx_odd_residual
            ));
        }
    }
    let k02 = rows
        .iter()
        .find(|r| (r.k - 0.2).abs() < 1e-12)
        .expect("k = 0.2 gamma row present");
    if k02.norm_sz_even_residual <= 1e-2 {
        passed = false;
        lines.push_str(&format!(
            " FAIL norm asymmetry not demonstrated: {:.2e} <= 1e-2;",
            k02.norm_sz_even_residual
        ));
    }

    // slow-quench odd law for the norm method
    let force_adiab = GAMMA * GAMMA / 400.0;
    let mut worst_law: f64 = 0.0;
    for k in [0.5, -0.5] {
        let p = mode(k, GAMMA, force_adiab);
        let cfg = run_config(&p, WINDOW_SCALE, 33);
        match evolve_trajectory(&p, &cfg) {
            Ok(traj) => {
                let (v, _) = asymptotic_readout(&traj, ExpectationMethod::Norm).unwrap();
                worst_law = worst_law.max((v - k / GAMMA).abs());
            }
            Err(e) => {
                passed = false;
                lines.push_str(&format!(" FAIL adiabatic-law run k={k}: {e};"));
            }
        }
    }
    if worst_law > 2e-2 {
        passed = false;
        lines.push_str(&format!(" FAIL norm adiabatic law residual {worst_law:.2e} > 2e-2;"));
    }
    CriterionOutcome::new(
        "momentum-parity-structure",
        passed,
        format!(
            "worst metric parity residual {worst_metric:.2e} (tol 1e-6), norm asymmetry at \
             k=0.2g {:.2e} (> 1e-2 required), norm adiabatic-law residual {worst_law:.2e} \
             (tol 2e-2){lines}",
            k02.norm_sz_even_residual
        ),
    )
}

/// Exact freeze of the norm-normalized state at the coalescence momentum,
/// against the moving metric state.
pub fn criterion_critical_freeze() -> CriterionOutcome {
    let force = GAMMA * GAMMA / 2.5;
    let p = mode(GAMMA, GAMMA, force);
    let cfg = run_config(&p, WINDOW_SCALE, 801);
    let traj = match evolve_trajectory(&p, &cfg) {
        Ok(t) => t,
        Err(e) => {
            return CriterionOutcome::new(
                "critical-momentum-freeze",
                false,
                format!("evolution failed: {e}"),
            )
        }
    };
    let mut worst_pole: f64 = 0.0;
    for s in &traj.samples {
        let b = s.bloch_norm;
        worst_pole = worst_pole
            .max(b[0].abs())
            .max(b[1].abs())
            .max((b[2] - 1.0).abs());
    }
    let limit = (force - PI * GAMMA * GAMMA) / (force + PI * GAMMA * GAMMA);
    let z_end = traj.last().sigma_z_metric;
    let metric_diff = (z_end - limit).abs();
    let passed = worst_pole <= 1e-9 && metric_diff <= 5e-3;
    CriterionOutcome::new(
        "critical-momentum-freeze",
        passed,
        format!(
            "norm state off north pole by {worst_pole:.2e} (tol 1e-9), metric end-point z vs \
             limit {metric_diff:.2e} (tol 5e-3)"
        ),
    )
}

/// Framework invariants over the full parameter grid.
pub fn criterion_framework_invariants() -> CriterionOutcome {
    let mut passed = true;
    let mut lines = String::new();
    let mut worst_pairing: f64 = 0.0;
    let mut worst_herm: f64 = 0.0;
    let mut worst_cross: f64 = 0.0;
    let mut worst_parity: f64 = 0.0;
    let mut deep_cells = 0usize;

    for scale in [0.5, 2.5, 25.0, 400.0] {
        let force = GAMMA * GAMMA / scale;
        for k_rel in [0.0, 0.2, 0.5, 1.0, 1.1, 2.0] {
            let p = mode(k_rel * GAMMA, GAMMA, force);
            let mut cfg = run_config(&p, WINDOW_SCALE, 201);
            // The pairing check is 1e-7 over up to ~1e7 steps; drift scales
            // like (steps * rel_tol), so the invariant runs go tight.
            cfg.rel_tol = 1e-13;
            cfg.abs_tol = 1e-13;

            // Primary (propagator) route: mapped-state norm, Hermiticity of
            // h where the metric frame is representable.
            let traj = match evolve_trajectory(&p, &cfg) {
                Ok(t) => t,
                Err(e) => {
                    passed = false;
                    lines.push_str(&format!(" FAIL evolve k/g={k_rel} g2F={scale}: {e};"));
                    continue;
                }
            };
            for s in &traj.samples {
                worst_pairing = worst_pairing.max((s.big_psi.norm() - 1.0).abs());
                if let Some(frame) = &s.metric_frame {
                    worst_herm = worst_herm.max(frame.herm_residual);
                }
            }

            // Mapped-Hamiltonian momentum parity on matched samples, and
            // the mapped-state relation Psi_{-k} = sz Psi_k (z component
            // even, transverse components odd).
            let flipped = mode(-k_rel * GAMMA, GAMMA, force);
            if let Ok(ftraj) = evolve_trajectory(&flipped, &cfg) {
                let sz = Matrix2C::pauli_z();
                for (a, b) in traj.samples.iter().zip(ftraj.samples.iter()) {
                    if let (Some(fa), Some(fb)) = (&a.metric_frame, &b.metric_frame) {
                        let resid = (sz * fa.h_map * sz - fb.h_map).max_abs()
                            / fa.h_map.max_abs().max(1.0);
                        worst_parity = worst_parity.max(resid);
                    }
                    let (ba, bb) = (a.bloch_metric, b.bloch_metric);
                    let state_parity = (ba[0] + bb[0])
                        .abs()
                        .max((ba[1] + bb[1]).abs())
                        .max((ba[2] - bb[2]).abs());
                    worst_parity = worst_parity.max(state_parity);
                }
            }

            // Coupled-pair route where the matrix representation is valid:
            // conserved pairing and propagator cross-check.
            if p.growth_exponent() <= PAIR_ROUTE_EXPONENT_LIMIT {
                match (evolve_coupled_pair(&p, &cfg), metric_via_propagator(&p, &cfg)) {
                    (Ok(pair), Ok(prop)) => {
                        for (ps, qs) in pair.iter().zip(prop.iter()) {
                            worst_pairing = worst_pairing.max(ps.pairing_residual);
                            // align gauges: rho_true = e^{-2G} rho_pair = e^{L} rho_prop
                            let factor = (-2.0 * ps.log_gauge - qs.log_scale).exp();
                            let diff = (ps.rho.scale_re(factor) - qs.rho).max_abs()
                                / qs.rho.max_abs().max(1.0);
                            worst_cross = worst_cross.max(diff);
                        }
                    }
                    (Err(e), _) => {
                        passed = false;
                        lines.push_str(&format!(
                            " FAIL coupled route k/g={k_rel} g2F={scale}: {e};"
                        ));
                    }
                    (_, Err(e)) => {
                        passed = false;
                        lines.push_str(&format!(
                            " FAIL propagator route k/g={k_rel} g2F={scale}: {e};"
                        ));
                    }
                }
            } else {
                // Beyond the f64 representability of the pair route the
                // coupled integration must refuse rather than emit garbage.
                deep_cells += 1;
                match evolve_coupled_pair(&p, &cfg) {
                    Err(
                        EvolveError::ConservationViolation { .. }
                        | EvolveError::MetricBreakdown { .. }
                        | EvolveError::StepSizeUnderflow { .. },
                    ) => {}
                    Err(e) => {
                        passed = false;
                        lines.push_str(&format!(
                            " FAIL unexpected coupled-route error k/g={k_rel} g2F={scale}: {e};"
                        ));
                    }
                    Ok(samples) => {
                        // acceptable only if it actually held the invariant
                        let worst = samples
                            .iter()
                            .map(|s| s.pairing_residual)
                            .fold(0.0f64, f64::max);
                        if worst > TOL_CONSERVATION {
                            passed = false;
                            lines.push_str(&format!(
                                " FAIL coupled route silently violated pairing at k/g={k_rel} \
                                 g2F={scale}: {worst:.2e};"
                            ));
                        }
                    }
                }
            }
        }
    }

    // Hermitian-limit degeneracy: trivial metric, h = H. The coupled route
    // holds rho = 1 identically here (the derivative vanishes at every
    // stage), so this is a machine-precision statement.
    let ph = mode(0.5, 0.0, 0.4);
    let mut cfg = run_config(&ph, WINDOW_SCALE, 201);
    cfg.rel_tol = 1e-13;
    cfg.abs_tol = 1e-13;
    match evolve_coupled_pair(&ph, &cfg) {
        Ok(samples) => {
            let mut worst: f64 = 0.0;
            for s in &samples {
                worst = worst.max((s.rho - Matrix2C::identity()).max_abs());
                if let Some(frame) = crate::evolution::MetricFrame::build(&ph, s.t, &s.rho) {
                    let h = ph.hamiltonian(s.t);
                    worst = worst
                        .max((frame.eta - Matrix2C::identity()).max_abs())
                        .max((frame.h_map - h).max_abs() / h.max_abs().max(1.0));
                }
            }
            if worst > 1e-10 {
                passed = false;
                lines.push_str(&format!(" FAIL Hermitian-limit degeneracy: {worst:.2e};"));
            }
        }
        Err(e) => {
            passed = false;
            lines.push_str(&format!(" FAIL Hermitian-limit run: {e};"));
        }
    }

    // Sylvester-derivative vs centered finite differences: second-order
    // convergence under step halving (ratio of errors at 2h vs h near 4).
    // The metric oscillates at the level-splitting frequency, slowest near
    // t = 0, so the stencils sit in the central band at fine spacing.
    let pfd = mode(1.5 * GAMMA, GAMMA, GAMMA * GAMMA / 2.5);
    let cfg = run_config(&pfd, WINDOW_SCALE, 3201);
    match evolve_trajectory(&pfd, &cfg) {
        Ok(traj) => {
            let dt = traj.samples[1].t - traj.samples[0].t;
            let mut err_h = 0.0;
            let mut err_2h = 0.0;
            let n = traj.samples.len();
            for i in (n * 48 / 100..n * 52 / 100).step_by(7) {
                let center = &traj.samples[i];
                let frame = match &center.metric_frame {
                    Some(f) => f,
                    None => continue,
                };
                let unwound = |j: usize| -> Option<Matrix2C> {
                    let s = &traj.samples[j];
                    let f = s.metric_frame.as_ref()?;
                    let factor = (0.5 * (s.log_gauge_rho - center.log_gauge_rho)).exp();
                    Some(f.eta.scale_re(factor))
                };
                if let (Some(m1), Some(p1), Some(m2), Some(p2)) =
                    (unwound(i - 1), unwound(i + 1), unwound(i - 2), unwound(i + 2))
                {
                    let fd1 = (p1 - m1).scale_re(1.0 / (2.0 * dt));
                    let fd2 = (p2 - m2).scale_re(1.0 / (4.0 * dt));
                    err_h += (fd1 - frame.eta_dot).max_abs();
                    err_2h += (fd2 - frame.eta_dot).max_abs();
                }
            }
            let ratio = err_2h / err_h.max(f64::MIN_POSITIVE);
            if !(2.5..=6.5).contains(&ratio) {
                passed = false;
                lines.push_str(&format!(
                    " FAIL Sylvester finite-difference order (ratio {ratio:.2}, expected ~4);"
                ));
            } else {
                lines.push_str(&format!(" fd-order ratio {ratio:.2};"));
            }
        }
        Err(e) => {
            passed = false;
            lines.push_str(&format!(" FAIL finite-difference run: {e};"));
        }
    }

    if worst_pairing > TOL_CONSERVATION {
        passed = false;
        lines.push_str(&format!(" FAIL pairing residual {worst_pairing:.2e} > 1e-7;"));
    }
    if worst_herm > 1e-6 {
        passed = false;
        lines.push_str(&format!(" FAIL h Hermiticity residual {worst_herm:.2e} > 1e-6;"));
    }
    if worst_cross > 1e-6 {
        passed = false;
        lines.push_str(&format!(" FAIL route cross-check {worst_cross:.2e} > 1e-6;"));
    }
    if worst_parity > 1e-6 {
        passed = false;
        lines.push_str(&format!(" FAIL mapped parity residual {worst_parity:.2e} > 1e-6;"));
    }
    CriterionOutcome::new(
        "framework-invariants",
        passed,
        format!(
            "pairing {worst_pairing:.2e} (tol 1e-7), h Hermiticity {worst_herm:.2e} (tol 1e-6), \
             route cross-check {worst_cross:.2e} (tol 1e-6), mapped parity {worst_parity:.2e} \
             (tol 1e-6); {deep_cells} deep cells verified in factored form{lines}"
        ),
    )
}

/// Exceptional-point structure of the instantaneous spectrum.
pub fn criterion_exceptional_points() -> CriterionOutcome {
    let force = GAMMA * GAMMA / 2.5;
    let mut passed = true;
    let mut lines = String::new();
    let mut worst_root: f64 = 0.0;
    let mut worst_root_sq: f64 = 0.0;
    for k_rel in [0.0, 0.2, 0.5, 1.0, 1.1, 2.0] {
        let p = mode(k_rel * GAMMA, GAMMA, force);
        let eps = p.ep_times();
        for t in eps.as_array().into_iter().flatten() {
            let (e, _) = p.instantaneous_eigenvalues(t);
            worst_root = worst_root.max(e.norm());
            worst_root_sq = worst_root_sq.max(p.eigenvalue_squared(t).abs());
        }
        // imaginary parts live exactly on the open inter-crossing interval
        let t_end = WINDOW_SCALE / force.sqrt();
        let inside = |t: f64| -> bool {
            match eps {
                EpTimes::Pair(a, b) => t > a && t < b,
                _ => false,
            }
        };
        for i in 0..=2000 {
            let t = -t_end + 2.0 * t_end * i as f64 / 2000.0;
            let (e, _) = p.instantaneous_eigenvalues(t);
            let has_im = e.im != 0.0;
            if has_im != inside(t) {
                passed = false;
                lines.push_str(&format!(
                    " FAIL imaginary-part support at k/g={k_rel}, t={t}: im={} inside={};",
                    e.im,
                    inside(t)
                ));
                break;
            }
            if has_im && e.re != 0.0 {
                passed = false;
                lines.push_str(&format!(" FAIL mixed real/imaginary eigenvalue at t={t};"));
                break;
            }
        }
    }
    // At a crossing the eigenvalue is a double root: |E| scales as the
    // square root of the E^2 residual, so the representable statement is on
    // E^2 (one ulp of t moves E^2 by ~1e-16 but E by ~1e-8).
    if worst_root_sq > 1e-12 {
        passed = false;
        lines.push_str(&format!(
            " FAIL squared eigenvalue at crossing times {worst_root_sq:.2e} > 1e-12;"
        ));
    }
    if worst_root > 1e-6 {
        passed = false;
        lines.push_str(&format!(" FAIL eigenvalue at crossing times {worst_root:.2e} > 1e-6;"));
    }
    CriterionOutcome::new(
        "exceptional-point-structure",
        passed,
        format!(
            "worst squared eigenvalue at crossing times {worst_root_sq:.2e} (tol 1e-12, \
             |E| = {worst_root:.2e}){lines}"
        ),
    )
}

/// Runs the full acceptance suite in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    let mut out = Vec::new();
    out.push(criterion_asymptotic_formula());
    out.push(criterion_hermitian_lz_limit());
    out.push(criterion_defect_freezing());
    out.push(criterion_parity_structure());
    out.push(criterion_critical_freeze());
    out.push(criterion_framework_invariants());
    out.push(criterion_exceptional_points());
    out
}

/// Names of all criteria, in suite order.
pub fn criterion_names() -> [&'static str; 7] {
    [
        "asymptotic-formula-agreement",
        "hermitian-landau-zener-limit",
        "defect-freezing-densities",
        "momentum-parity-structure",
        "critical-momentum-freeze",
        "framework-invariants",
        "exceptional-point-structure",
    ]
}

/// Runs a single criterion by name.
pub fn run_by_name(name: &str) -> Option<CriterionOutcome> {
    match name {
        "asymptotic-formula-agreement" => Some(criterion_asymptotic_formula()),
        "hermitian-landau-zener-limit" => Some(criterion_hermitian_lz_limit()),
        "defect-freezing-densities" => Some(criterion_defect_freezing()),
        "momentum-parity-structure" => Some(criterion_parity_structure()),
        "critical-momentum-freeze" => Some(criterion_critical_freeze()),
        "framework-invariants" => Some(criterion_framework_invariants()),
        "exceptional-point-structure" => Some(criterion_exceptional_points()),
        _ => None,
    }
}
