//! Scenario orchestration: resolve a config into a modal system, run the
//! requested experiment, and write deterministic CSV artifacts plus an
//! audit manifest that can be re-fed as a scenario config.

use crate::basis::{mode_index, ModalBasis};
use crate::config::{Boundary, Experiment, ImpedanceSpec, ScenarioConfig};
use crate::coupling::{coupled_pairs, coupling_analytic_ss, coupling_quadrature, CouplingMatrix};
use crate::dynamics::{
    self, assemble, frf, impulse_initial_state, reconstruct_field, unit_energy_magnitude,
    ModalState, ModalSystem, Trajectory,
};
use crate::params::{
    coupling_ratio, dimensionless_from_physical, derive_physical, DimensionlessParams,
    PhysicalParams,
};
use crate::quadrature::GaussLegendre;
use crate::tuning::{
    char_roots_p, damping_sweep, optimal_impedance_clamped, optimal_inductance_ss,
    optimal_resistance_ss, transfer_time, ModalCoefficients, RootSet,
};
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Environment variable that, when set, re-roots every output directory.
pub const OUT_ROOT_ENV: &str = "PIEZONET_OUT_ROOT";

/// Applies the environment output-root override.
pub fn resolve_out_dir(dir: &Path) -> PathBuf {
    match std::env::var_os(OUT_ROOT_ENV) {
        Some(root) if !root.is_empty() => PathBuf::from(root).join(dir),
        _ => dir.to_path_buf(),
    }
}

/// Shortest round-trip decimal rendering used in every artifact.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// A scenario resolved into numbers: physical parameters with the impedance
/// filled in, the dimensionless system, and the tuned pair's coefficients.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub physical: PhysicalParams,
    pub dimensionless: DimensionlessParams,
    pub mech_basis: ModalBasis,
    pub elec_basis: ModalBasis,
    pub system: ModalSystem,
    /// Stiffening ratios c_h (clamped boundaries only).
    pub stiffening: Option<Vec<f64>>,
    /// Optimal impedance of the tuning target, whether or not it was used.
    pub optimal_inductance: f64,
    pub optimal_resistance: f64,
    pub tuned: ModalCoefficients,
    pub tuned_roots: RootSet,
    pub warnings: Vec<String>,
}

/// Resolves a parsed config into bases, coupling, and the modal system.
pub fn resolve(cfg: &ScenarioConfig) -> Result<ResolvedScenario> {
    let quad = GaussLegendre::new(cfg.quad_order);
    let n = cfg.mode_count;
    let elec_basis = ModalBasis::membrane(n);
    let (mech_basis, coupling, stiffening) = match cfg.boundary {
        Boundary::SimplySupported => {
            let basis = ModalBasis::simply_supported(n);
            (basis, coupling_analytic_ss(n), None)
        }
        Boundary::Clamped => {
            let basis = ModalBasis::clamped(n, &quad)?;
            let coupling = coupling_quadrature(&basis, &elec_basis, n, &quad)?;
            let stiffening: Vec<f64> = basis
                .modes
                .iter()
                .map(|m| {
                    let idx = m.index;
                    let s = (idx.i * idx.i + idx.j * idx.j) as f64;
                    m.eigenvalue / (std::f64::consts::PI.powi(4) * s * s)
                })
                .collect();
            (basis, coupling, Some(stiffening))
        }
    };

    // optimal impedance of the tuning target
    let target = mode_index(cfg.tuning_mode);
    let mut physical = cfg.physical.clone();
    // the formulas don't involve the net impedance; a placeholder keeps the
    // parameter set valid while the optimum is computed
    physical.net_inductance = 1.0;
    physical.net_resistance = 0.0;
    let (optimal_inductance, optimal_resistance) = match (&cfg.boundary, &stiffening) {
        (Boundary::SimplySupported, _) => (
            optimal_inductance_ss(target, &physical)?,
            optimal_resistance_ss(&physical)?,
        ),
        (Boundary::Clamped, Some(c)) => {
            optimal_impedance_clamped(target, &physical, c[cfg.tuning_mode - 1])?
        }
        (Boundary::Clamped, None) => unreachable!(),
    };
    physical.net_inductance = match cfg.inductance {
        ImpedanceSpec::Optimal => optimal_inductance,
        ImpedanceSpec::Value(v) => v,
    };
    physical.net_resistance = match cfg.resistance {
        ImpedanceSpec::Optimal => optimal_resistance,
        ImpedanceSpec::Value(v) => v,
    };
    physical.validate()?;
    let warnings = physical.warnings();
    let dimensionless = dimensionless_from_physical(&physical)?;
    let system = assemble(
        &dimensionless,
        mech_basis.eigenvalues(),
        elec_basis.eigenvalues(),
        coupling,
    )?;
    let tuned = system.modal_coefficients(cfg.tuning_mode - 1)?;
    let tuned_roots = char_roots_p(&tuned)?;
    Ok(ResolvedScenario {
        physical,
        dimensionless,
        mech_basis,
        elec_basis,
        system,
        stiffening,
        optimal_inductance,
        optimal_resistance,
        tuned,
        tuned_roots,
        warnings,
    })
}

impl ResolvedScenario {
    /// Default horizon of a damped study: five decay constants of the tuned
    /// pair's slowest root.
    pub fn decay_horizon(&self) -> Result<f64> {
        let slowest = self.tuned_roots.max_real();
        if slowest >= -1e-14 {
            return Err(Error::invalid(
                "damped study needs a dissipative network (positive net_resistance)",
            ));
        }
        Ok(5.0 / slowest.abs())
    }

    /// Default horizon of an undamped beat study: ten beat periods of the
    /// tuned pair.
    pub fn beat_horizon(&self) -> Result<f64> {
        let beat = dynamics::BeatSolution::new(
            self.tuned.mech_stiffness,
            self.tuned.elec_stiffness,
            self.tuned.coupling,
            1.0,
        )?;
        if !beat.beat_period().is_finite() {
            return Err(Error::invalid(
                "beat study needs a coupled pair (nonzero gamma and C_hh)",
            ));
        }
        Ok(10.0 * beat.beat_period())
    }
}

/// Everything a scenario run produced.
#[derive(Debug)]
pub struct ScenarioOutcome {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Runs a scenario end to end. All artifacts are rendered in memory first;
/// nothing is written if any stage fails.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let resolved = resolve(cfg)?;
    let mut artifacts: Vec<(String, String)> = Vec::new();

    let mut t_end_used = None;
    match cfg.experiment {
        Experiment::Beat => {
            let t_end = match cfg.t_end {
                Some(t) => t,
                None => resolved.beat_horizon()?,
            };
            t_end_used = Some(t_end);
            let mut init = ModalState::zero(cfg.mode_count);
            init.displacement[cfg.tuning_mode - 1] = 1.0;
            let traj = dynamics::integrate(
                &resolved.system,
                &init,
                t_end,
                cfg.rel_tol,
                cfg.samples,
            )?;
            artifacts.push(("trajectory.csv".into(), trajectory_csv(&traj)));
        }
        Experiment::DampedDecay => {
            let t_end = match cfg.t_end {
                Some(t) => t,
                None => resolved.decay_horizon()?,
            };
            t_end_used = Some(t_end);
            let mut init = ModalState::zero(cfg.mode_count);
            init.displacement[cfg.tuning_mode - 1] = 1.0;
            let traj = dynamics::integrate(
                &resolved.system,
                &init,
                t_end,
                cfg.rel_tol,
                cfg.samples,
            )?;
            artifacts.push(("trajectory.csv".into(), trajectory_csv(&traj)));
        }
        Experiment::Frf => {
            let freqs: Vec<f64> = resolved
                .system
                .mech_eigenvalues
                .iter()
                .map(|l| (resolved.system.alpha * l).sqrt())
                .chain(
                    resolved
                        .system
                        .elec_eigenvalues
                        .iter()
                        .map(|n| (resolved.system.beta * n).sqrt()),
                )
                .collect();
            let lo = cfg
                .frf_min
                .unwrap_or_else(|| 0.5 * freqs.iter().copied().fold(f64::INFINITY, f64::min));
            let hi = cfg
                .frf_max
                .unwrap_or_else(|| 1.2 * freqs.iter().copied().fold(0.0, f64::max));
            let grid: Vec<f64> = (0..cfg.frf_points)
                .map(|i| lo + (hi - lo) * i as f64 / (cfg.frf_points - 1) as f64)
                .collect();
            let curves = frf(&resolved.system, &grid)?;
            let mut out = String::from("omega,mech_norm,elec_norm,coupling_norm\n");
            for i in 0..grid.len() {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_f64(curves.omega[i]),
                    fmt_f64(curves.mech[i]),
                    fmt_f64(curves.elec[i]),
                    fmt_f64(curves.coupling[i])
                );
            }
            artifacts.push(("frf.csv".into(), out));
        }
        Experiment::Impulse { point } => {
            let t_end = match cfg.t_end {
                Some(t) => t,
                None => resolved.decay_horizon()?,
            };
            t_end_used = Some(t_end);
            let magnitude = unit_energy_magnitude(point, &resolved.mech_basis, cfg.mode_count)?;
            let init =
                impulse_initial_state(point, &resolved.mech_basis, cfg.mode_count, magnitude)?;
            let traj = dynamics::integrate(
                &resolved.system,
                &init,
                t_end,
                cfg.rel_tol,
                cfg.samples,
            )?;
            for s in 0..cfg.snapshots {
                let frac = s as f64 / (cfg.snapshots.max(2) - 1) as f64;
                let sample = ((traj.times.len() - 1) as f64 * frac).round() as usize;
                let field = reconstruct_field(
                    &traj.states[sample],
                    &resolved.mech_basis,
                    &resolved.elec_basis,
                    cfg.field_grid,
                )?;
                let mut out = String::from("x1,x2,w,phi_field\n");
                let g = field.coords.len();
                for (r, &x1) in field.coords.iter().enumerate() {
                    for (c, &x2) in field.coords.iter().enumerate() {
                        let _ = writeln!(
                            out,
                            "{},{},{},{}",
                            fmt_f64(x1),
                            fmt_f64(x2),
                            fmt_f64(field.deflection[r * g + c]),
                            fmt_f64(field.estate[r * g + c])
                        );
                    }
                }
                artifacts.push((format!("fields_{s:02}.csv"), out));
            }
            artifacts.push(("trajectory.csv".into(), trajectory_csv(&traj)));
        }
    }

    artifacts.push(("manifest.txt".into(), manifest(cfg, &resolved, t_end_used)));

    // everything succeeded: flush to disk
    let out_dir = resolve_out_dir(&cfg.out_dir());
    std::fs::create_dir_all(&out_dir)?;
    let mut files = Vec::new();
    for (name, content) in artifacts {
        let path = out_dir.join(name);
        std::fs::write(&path, content)?;
        files.push(path);
    }
    Ok(ScenarioOutcome {
        out_dir,
        files,
        warnings: resolved.warnings,
    })
}

fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.states.first().map(|s| s.n()).unwrap_or(0);
    let mut header = String::from("t");
    for prefix in ["v", "vdot", "phi", "phidot"] {
        for h in 1..=n {
            let _ = write!(header, ",{prefix}_{h}");
        }
    }
    header.push_str(",mech_elastic,mech_kinetic,elec_inductive,elec_capacitive,total\n");
    let mut out = header;
    for i in 0..traj.times.len() {
        let s = &traj.states[i];
        let e = &traj.energies[i];
        let _ = write!(out, "{}", fmt_f64(traj.times[i]));
        for block in [&s.displacement, &s.velocity, &s.estate, &s.estate_rate] {
            for v in block.iter() {
                let _ = write!(out, ",{}", fmt_f64(*v));
            }
        }
        let _ = writeln!(
            out,
            ",{},{},{},{},{}",
            fmt_f64(e.mech_elastic),
            fmt_f64(e.mech_kinetic),
            fmt_f64(e.elec_inductive),
            fmt_f64(e.elec_capacitive),
            fmt_f64(e.total)
        );
    }
    out
}

/// Audit manifest: a re-feedable scenario config followed by derived
/// quantities as comments.
fn manifest(cfg: &ScenarioConfig, r: &ResolvedScenario, t_end: Option<f64>) -> String {
    let mut out = String::from("# piezonet scenario manifest; re-feedable as a scenario config\n");
    let p = &r.physical;
    let _ = writeln!(out, "name = {}", cfg.name);
    let _ = writeln!(out, "boundary = {}", cfg.boundary.as_str());
    let _ = writeln!(out, "experiment = {}", cfg.experiment.kind());
    if let Experiment::Impulse { point } = cfg.experiment {
        let _ = writeln!(out, "impulse_point = {} {}", fmt_f64(point.0), fmt_f64(point.1));
    }
    let _ = writeln!(out, "mode_count = {}", cfg.mode_count);
    let _ = writeln!(out, "tuning_mode = {}", cfg.tuning_mode);
    let _ = writeln!(out, "inductance = {}", fmt_f64(p.net_inductance));
    let _ = writeln!(out, "resistance = {}", fmt_f64(p.net_resistance));
    let _ = writeln!(out, "samples = {}", cfg.samples);
    let _ = writeln!(out, "quad_order = {}", cfg.quad_order);
    let _ = writeln!(out, "rel_tol = {}", fmt_f64(cfg.rel_tol));
    if let Some(t) = t_end {
        let _ = writeln!(out, "t_end = {}", fmt_f64(t));
    }
    let _ = writeln!(out, "frf_points = {}", cfg.frf_points);
    if let Some(v) = cfg.frf_min {
        let _ = writeln!(out, "frf_min = {}", fmt_f64(v));
    }
    if let Some(v) = cfg.frf_max {
        let _ = writeln!(out, "frf_max = {}", fmt_f64(v));
    }
    let _ = writeln!(out, "field_grid = {}", cfg.field_grid);
    let _ = writeln!(out, "snapshots = {}", cfg.snapshots);
    let _ = writeln!(out, "out_dir = {}", cfg.out_parent.display());
    let _ = writeln!(out, "side_length = {}", fmt_f64(p.side_length));
    let _ = writeln!(out, "half_thickness = {}", fmt_f64(p.half_thickness));
    let _ = writeln!(out, "mass_density = {}", fmt_f64(p.mass_density));
    let _ = writeln!(out, "young_modulus = {}", fmt_f64(p.young_modulus));
    let _ = writeln!(out, "poisson_ratio = {}", fmt_f64(p.poisson_ratio));
    let _ = writeln!(out, "actuator_count = {}", p.actuator_count);
    let _ = writeln!(out, "piezo_coupling = {}", fmt_f64(p.piezo_coupling));
    let _ = writeln!(out, "piezo_capacitance = {}", fmt_f64(p.piezo_capacitance));
    let _ = writeln!(out, "ground_capacitance = {}", fmt_f64(p.ground_capacitance));

    let _ = writeln!(out, "# ---- derived (informational) ----");
    let _ = writeln!(out, "# alpha = {}", fmt_f64(r.dimensionless.alpha));
    let _ = writeln!(out, "# beta = {}", fmt_f64(r.dimensionless.beta));
    let _ = writeln!(out, "# gamma = {}", fmt_f64(r.dimensionless.gamma));
    let _ = writeln!(out, "# delta = {}", fmt_f64(r.dimensionless.delta));
    let _ = writeln!(out, "# optimal_inductance = {}", fmt_f64(r.optimal_inductance));
    let _ = writeln!(out, "# optimal_resistance = {}", fmt_f64(r.optimal_resistance));
    for h in 0..cfg.mode_count {
        if let Ok(m) = r.system.modal_coefficients(h) {
            let _ = writeln!(
                out,
                "# mode_{} a = {} b = {} c = {} d = {}",
                h + 1,
                fmt_f64(m.mech_stiffness),
                fmt_f64(m.elec_stiffness),
                fmt_f64(m.coupling),
                fmt_f64(m.damping)
            );
        }
    }
    out
}

/// One row of the tuning report.
#[derive(Debug, Clone)]
pub struct TuneRow {
    pub k: usize,
    pub i: u32,
    pub j: u32,
    /// Mechanical operator eigenvalue (Rayleigh estimate when clamped).
    pub lambda: f64,
    /// Electrical operator eigenvalue.
    pub nu: f64,
    /// Diagonal coupling entry.
    pub c_hh: f64,
    /// Stiffening ratio; None for simply supported rows.
    pub stiffening: Option<f64>,
    pub optimal_inductance: f64,
    pub optimal_resistance: f64,
    /// Transfer time at this pair's coupling ratio.
    pub transfer_time: f64,
}

/// Per-mode tuning table: eigenvalues, coupling, optimal impedance, transfer
/// time. `physical` may carry placeholder net impedance; only geometry,
/// material and capacitance enter.
pub fn tune_report(
    physical: &PhysicalParams,
    boundary: Boundary,
    mode_count: usize,
    quad_order: usize,
) -> Result<Vec<TuneRow>> {
    if mode_count == 0 {
        return Ok(Vec::new());
    }
    let quad = GaussLegendre::new(quad_order);
    let mut p = physical.clone();
    p.net_inductance = 1.0;
    p.net_resistance = 0.0;
    p.validate()?;
    let gamma = dimensionless_from_physical(&p)?.gamma;
    let alpha = dimensionless_from_physical(&p)?.alpha;
    let elec = ModalBasis::membrane(mode_count);
    let (mech, coupling, stiffening) = match boundary {
        Boundary::SimplySupported => (
            ModalBasis::simply_supported(mode_count),
            coupling_analytic_ss(mode_count),
            None,
        ),
        Boundary::Clamped => {
            let basis = ModalBasis::clamped(mode_count, &quad)?;
            let coupling = coupling_quadrature(&basis, &elec, mode_count, &quad)?;
            let stiff: Vec<f64> = basis
                .modes
                .iter()
                .map(|m| {
                    let s = (m.index.i * m.index.i + m.index.j * m.index.j) as f64;
                    m.eigenvalue / (std::f64::consts::PI.powi(4) * s * s)
                })
                .collect();
            (basis, coupling, Some(stiff))
        }
    };
    let mut rows = Vec::with_capacity(mode_count);
    for h in 0..mode_count {
        let idx = mech.modes[h].index;
        let (l_opt, r_opt, stiff) = match (&boundary, &stiffening) {
            (Boundary::SimplySupported, _) => (
                optimal_inductance_ss(idx, &p)?,
                optimal_resistance_ss(&p)?,
                None,
            ),
            (Boundary::Clamped, Some(c)) => {
                let (l, r) = optimal_impedance_clamped(idx, &p, c[h])?;
                (l, r, Some(c[h]))
            }
            (Boundary::Clamped, None) => unreachable!(),
        };
        let a = alpha * mech.modes[h].eigenvalue;
        let c_hh = coupling.get(h, h);
        let k = coupling_ratio(a, gamma * c_hh)?;
        rows.push(TuneRow {
            k: idx.k,
            i: idx.i,
            j: idx.j,
            lambda: mech.modes[h].eigenvalue,
            nu: elec.modes[h].eigenvalue,
            c_hh,
            stiffening: stiff,
            optimal_inductance: l_opt,
            optimal_resistance: r_opt,
            transfer_time: transfer_time(k.min(1.0).max(f64::MIN_POSITIVE))?,
        });
    }
    Ok(rows)
}

/// Renders the tuning table as CSV.
pub fn tune_csv(rows: &[TuneRow]) -> String {
    let mut out =
        String::from("mode,i,j,lambda,nu,c_hh,stiffening,optimal_inductance,optimal_resistance,transfer_time\n");
    for r in rows {
        let stiff = r.stiffening.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.k,
            r.i,
            r.j,
            fmt_f64(r.lambda),
            fmt_f64(r.nu),
            fmt_f64(r.c_hh),
            stiff,
            fmt_f64(r.optimal_inductance),
            fmt_f64(r.optimal_resistance),
            fmt_f64(r.transfer_time)
        );
    }
    out
}

/// Dense matrix CSV with 1-based row/column labels.
pub fn matrix_csv(c: &CouplingMatrix) -> String {
    let n = c.n();
    let mut out = String::from("mech\\elec");
    for k in 1..=n {
        let _ = write!(out, ",{k}");
    }
    out.push('\n');
    for h in 0..n {
        let _ = write!(out, "{}", h + 1);
        for k in 0..n {
            let _ = write!(out, ",{}", fmt_f64(c.get(h, k)));
        }
        out.push('\n');
    }
    out
}

/// Human-readable listing of the coupled pairs under the criterion.
pub fn coupling_report(c: &CouplingMatrix, tol: f64) -> String {
    let mut out = format!(
        "coupling report: {:?} x {:?}, {} modes, tolerance {}\n",
        c.mech_kind,
        c.elec_kind,
        c.n(),
        fmt_f64(tol)
    );
    let pairs = coupled_pairs(c, tol);
    let _ = writeln!(out, "coupled pairs (mechanical -> electrical): {}", pairs.len());
    for (h, k) in pairs {
        let _ = writeln!(out, "  m_{} -> e_{}  C = {}", h + 1, k + 1, fmt_f64(c.get(h, k)));
    }
    out
}

/// Mode-shape sample CSV: x1, x2, value on a uniform grid.
pub fn mode_shape_csv(basis: &ModalBasis, mode: usize, grid_n: usize) -> Result<String> {
    if mode >= basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "basis holds {} modes, requested index {mode}",
            basis.len()
        )));
    }
    if grid_n < 2 {
        return Err(Error::invalid("grid needs at least 2 points per axis"));
    }
    let shape = &basis.modes[mode].shape;
    let mut out = String::from("x1,x2,value\n");
    for r in 0..grid_n {
        let x1 = r as f64 / (grid_n - 1) as f64;
        for c in 0..grid_n {
            let x2 = c as f64 / (grid_n - 1) as f64;
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt_f64(x1),
                fmt_f64(x2),
                fmt_f64(shape.eval(x1, x2))
            );
        }
    }
    Ok(out)
}

/// Root-locus CSV over a damping grid, normalized by the coupling strength.
pub fn root_locus_csv(a: f64, b: f64, c: f64, d_grid: &[f64]) -> Result<String> {
    let sweep = damping_sweep(a, b, c, d_grid)?;
    let mut out = String::from("d_over_c,branch,re,im,coupling_weight\n");
    let c_scale = if c == 0.0 { 1.0 } else { c.abs() };
    for (step, &d) in sweep.damping.iter().enumerate() {
        for branch in 0..4 {
            let root = sweep.roots[step][branch];
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(d / c_scale),
                branch,
                fmt_f64(root.re),
                fmt_f64(root.im),
                fmt_f64(sweep.coupling_weights[step][branch])
            );
        }
    }
    Ok(out)
}

/// Convenience used by the CLI `modes`/`coupling`/`tune` subcommands to pick
/// the matching bases and coupling matrix.
pub fn build_bases(
    boundary: Boundary,
    mode_count: usize,
    quad_order: usize,
) -> Result<(ModalBasis, ModalBasis, CouplingMatrix)> {
    let quad = GaussLegendre::new(quad_order);
    let elec = ModalBasis::membrane(mode_count);
    match boundary {
        Boundary::SimplySupported => {
            let mech = ModalBasis::simply_supported(mode_count);
            let c = coupling_analytic_ss(mode_count);
            Ok((mech, elec, c))
        }
        Boundary::Clamped => {
            let mech = ModalBasis::clamped(mode_count, &quad)?;
            let c = coupling_quadrature(&mech, &elec, mode_count, &quad)?;
            Ok((mech, elec, c))
        }
    }
}

/// Derived-parameter sanity numbers surfaced by several subcommands.
pub fn summary_line(p: &PhysicalParams) -> Result<String> {
    let d = derive_physical(p)?;
    Ok(format!(
        "bending stiffness {} N m, total mass {} kg, char pulsation {} rad/s",
        fmt_f64(d.bending_stiffness),
        fmt_f64(d.total_mass),
        fmt_f64(d.char_pulsation)
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_scenario;
    use std::path::PathBuf;

    fn sandbox_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("piezonet-test-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn beat_scenario_writes_deterministic_artifacts() {
        let dir = sandbox_dir("beat");
        let cfg_text = format!(
            "name = beat1\nexperiment = beat\nresistance = 0\nsamples = 200\nout_dir = {}\n",
            dir.display()
        );
        let cfg = parse_scenario(&cfg_text).unwrap();
        let first = run_scenario(&cfg).unwrap();
        let traj1 = std::fs::read(first.out_dir.join("trajectory.csv")).unwrap();
        let man1 = std::fs::read(first.out_dir.join("manifest.txt")).unwrap();
        let second = run_scenario(&cfg).unwrap();
        let traj2 = std::fs::read(second.out_dir.join("trajectory.csv")).unwrap();
        let man2 = std::fs::read(second.out_dir.join("manifest.txt")).unwrap();
        assert_eq!(traj1, traj2, "trajectory bytes must be reproducible");
        assert_eq!(man1, man2);
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn manifest_round_trip_reproduces_the_run() {
        let dir = sandbox_dir("roundtrip");
        let cfg = parse_scenario(&format!(
            "name = rt\nexperiment = beat\nsamples = 150\nout_dir = {}\n",
            dir.display()
        ))
        .unwrap();
        let first = run_scenario(&cfg).unwrap();
        let manifest = std::fs::read_to_string(first.out_dir.join("manifest.txt")).unwrap();
        let traj1 = std::fs::read(first.out_dir.join("trajectory.csv")).unwrap();
        // re-feed the manifest, pointing at a sibling directory
        let manifest = manifest.replace("name = rt", "name = rt2");
        let cfg2 = parse_scenario(&manifest).unwrap();
        assert_eq!(cfg2.inductance, ImpedanceSpec::Value(cfg_resolved_l(&cfg)));
        let second = run_scenario(&cfg2).unwrap();
        let traj2 = std::fs::read(second.out_dir.join("trajectory.csv")).unwrap();
        assert_eq!(traj1, traj2, "manifest round trip must be byte-identical");
        let _ = std::fs::remove_dir_all(&dir);
    }

    fn cfg_resolved_l(cfg: &ScenarioConfig) -> f64 {
        resolve(cfg).unwrap().physical.net_inductance
    }

    #[test]
    fn tune_report_rows() {
        let p = PhysicalParams::default();
        let rows = tune_report(&p, Boundary::SimplySupported, 4, 16).unwrap();
        assert_eq!(rows.len(), 4);
        // resistance is mode independent for simply supported plates
        for w in rows.windows(2) {
            assert_eq!(w[0].optimal_resistance, w[1].optimal_resistance);
        }
        assert!(rows.iter().all(|r| r.stiffening.is_none()));
        let empty = tune_report(&p, Boundary::SimplySupported, 0, 16).unwrap();
        assert!(empty.is_empty());
        let clamped = tune_report(&p, Boundary::Clamped, 2, 32).unwrap();
        let c1 = clamped[0].stiffening.unwrap();
        assert!((c1 - 3.35).abs() < 0.05);
    }

    #[test]
    fn frf_scenario_writes_curves() {
        let dir = sandbox_dir("frf");
        let cfg = parse_scenario(&format!(
            "name = f1\nexperiment = frf\nfrf_points = 64\nout_dir = {}\n",
            dir.display()
        ))
        .unwrap();
        let out = run_scenario(&cfg).unwrap();
        let text = std::fs::read_to_string(out.out_dir.join("frf.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "omega,mech_norm,elec_norm,coupling_norm");
        assert_eq!(lines.len(), 65);
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn impulse_scenario_writes_fields() {
        let dir = sandbox_dir("imp");
        let cfg = parse_scenario(&format!(
            "name = i1\nexperiment = impulse\nimpulse_point = 0.6 0.55\nboundary = clamped\n\
             samples = 300\nsnapshots = 3\nfield_grid = 5\nquad_order = 24\nt_end = 50\nout_dir = {}\n",
            dir.display()
        ))
        .unwrap();
        let out = run_scenario(&cfg).unwrap();
        for s in 0..3 {
            assert!(out.out_dir.join(format!("fields_{s:02}.csv")).exists());
        }
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn mode_shape_and_matrix_exports() {
        let (mech, _, c) = build_bases(Boundary::SimplySupported, 2, 8).unwrap();
        let csv = mode_shape_csv(&mech, 0, 3).unwrap();
        assert_eq!(csv.lines().count(), 10);
        let m = matrix_csv(&c);
        assert!(m.starts_with("mech\\elec,1,2\n"));
        let report = coupling_report(&c, 1e-6);
        assert!(report.contains("m_1 -> e_1"));
        assert!(!report.contains("m_1 -> e_2"));
    }

    #[test]
    fn root_locus_export_has_four_branches() {
        let grid: Vec<f64> = (1..=20).map(|i| i as f64 * 0.01).collect();
        let csv = root_locus_csv(1.0, 1.0, 0.05, &grid).unwrap();
        assert_eq!(csv.lines().count(), 1 + 4 * 20);
    }
}
