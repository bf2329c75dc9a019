//! Coupled modal dynamics: assembly of the first-order system, time
//! integration with energy bookkeeping, the closed-form undamped beat
//! solution, frequency-response functions, and impulse studies with field
//! reconstruction.

use crate::basis::ModalBasis;
use crate::coupling::CouplingMatrix;
use crate::ode::{integrate_adaptive, IntegratorStats};
use crate::params::DimensionlessParams;
use crate::tuning::ModalCoefficients;
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Assembled dimensionless modal system of n coupled mode pairs:
///
/// v_h'' + alpha lambda_h v_h - gamma sum_k C[h][k] phi_k' = 0
/// phi_h'' + beta nu_h phi_h + delta phi_h'
///         + gamma sum_k C[k][h] (delta v_k + v_k') = 0
#[derive(Debug, Clone)]
pub struct ModalSystem {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub mech_eigenvalues: Vec<f64>,
    pub elec_eigenvalues: Vec<f64>,
    pub coupling: CouplingMatrix,
}

/// Builds a [`ModalSystem`], checking dimensional consistency.
pub fn assemble(
    params: &DimensionlessParams,
    mech_eigenvalues: Vec<f64>,
    elec_eigenvalues: Vec<f64>,
    coupling: CouplingMatrix,
) -> Result<ModalSystem> {
    let n = coupling.n();
    if mech_eigenvalues.len() != n || elec_eigenvalues.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "coupling matrix is {n}x{n} but {} mechanical and {} electrical eigenvalues supplied",
            mech_eigenvalues.len(),
            elec_eigenvalues.len()
        )));
    }
    if mech_eigenvalues.iter().chain(&elec_eigenvalues).any(|l| !(*l > 0.0)) {
        return Err(Error::invalid("eigenvalues must be positive and finite"));
    }
    Ok(ModalSystem {
        alpha: params.alpha,
        beta: params.beta,
        gamma: params.gamma,
        delta: params.delta,
        mech_eigenvalues,
        elec_eigenvalues,
        coupling,
    })
}

impl ModalSystem {
    pub fn n(&self) -> usize {
        self.mech_eigenvalues.len()
    }

    /// Coefficients of the h-th (0-based) mode pair taken in isolation.
    pub fn modal_coefficients(&self, h: usize) -> Result<ModalCoefficients> {
        ModalCoefficients::new(
            self.alpha * self.mech_eigenvalues[h],
            self.beta * self.elec_eigenvalues[h],
            self.gamma * self.coupling.get(h, h),
            self.delta,
        )
    }

    /// Right-hand side over the flat state [v, v', phi, phi'].
    pub fn rhs(&self, state: &[f64], out: &mut [f64]) {
        let n = self.n();
        debug_assert_eq!(state.len(), 4 * n);
        let (v, rest) = state.split_at(n);
        let (vdot, rest) = rest.split_at(n);
        let (phi, phidot) = rest.split_at(n);
        for h in 0..n {
            out[h] = vdot[h];
            let mut coupling_in = 0.0;
            for k in 0..n {
                coupling_in += self.coupling.get(h, k) * phidot[k];
            }
            out[n + h] = -self.alpha * self.mech_eigenvalues[h] * v[h] + self.gamma * coupling_in;
            out[2 * n + h] = phidot[h];
            let mut coupling_back = 0.0;
            for k in 0..n {
                coupling_back += self.coupling.get(k, h) * (self.delta * v[k] + vdot[k]);
            }
            out[3 * n + h] = -self.beta * self.elec_eigenvalues[h] * phi[h]
                - self.delta * phidot[h]
                - self.gamma * coupling_back;
        }
    }

    /// Dense 4n x 4n state matrix, for spectral cross-checks.
    pub fn system_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(4 * n, 4 * n);
        for h in 0..n {
            m[(h, n + h)] = 1.0;
            m[(n + h, h)] = -self.alpha * self.mech_eigenvalues[h];
            for k in 0..n {
                m[(n + h, 3 * n + k)] = self.gamma * self.coupling.get(h, k);
            }
            m[(2 * n + h, 3 * n + h)] = 1.0;
            m[(3 * n + h, 2 * n + h)] = -self.beta * self.elec_eigenvalues[h];
            m[(3 * n + h, 3 * n + h)] = -self.delta;
            for k in 0..n {
                m[(3 * n + h, k)] = -self.gamma * self.delta * self.coupling.get(k, h);
                m[(3 * n + h, n + k)] = -self.gamma * self.coupling.get(k, h);
            }
        }
        m
    }

    /// Instantaneous dissipated power along the trajectory; the energy
    /// balance is E(0) - E(t) = ∫ dissipation dt.
    pub fn dissipation_rate(&self, state: &ModalState) -> f64 {
        let n = self.n();
        let mut total = 0.0;
        for h in 0..n {
            let mut resistive_coupling = 0.0;
            for k in 0..n {
                resistive_coupling += self.coupling.get(k, h) * state.displacement[k];
            }
            total += state.estate_rate[h]
                * (state.estate_rate[h] + self.gamma * resistive_coupling);
        }
        self.delta * total
    }
}

/// Modal state: displacement/velocity Fourier coefficients of the deflection
/// and of the e-state field.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalState {
    pub displacement: Vec<f64>,
    pub velocity: Vec<f64>,
    pub estate: Vec<f64>,
    pub estate_rate: Vec<f64>,
}

impl ModalState {
    pub fn zero(n: usize) -> Self {
        ModalState {
            displacement: vec![0.0; n],
            velocity: vec![0.0; n],
            estate: vec![0.0; n],
            estate_rate: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.displacement.len()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(4 * self.n());
        out.extend_from_slice(&self.displacement);
        out.extend_from_slice(&self.velocity);
        out.extend_from_slice(&self.estate);
        out.extend_from_slice(&self.estate_rate);
        out
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        let n = flat.len() / 4;
        ModalState {
            displacement: flat[..n].to_vec(),
            velocity: flat[n..2 * n].to_vec(),
            estate: flat[2 * n..3 * n].to_vec(),
            estate_rate: flat[3 * n..].to_vec(),
        }
    }

    fn is_consistent(&self) -> bool {
        let n = self.n();
        self.velocity.len() == n
            && self.estate.len() == n
            && self.estate_rate.len() == n
            && self
                .displacement
                .iter()
                .chain(&self.velocity)
                .chain(&self.estate)
                .chain(&self.estate_rate)
                .all(|x| x.is_finite())
    }
}

/// The four quadratic energy forms of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub mech_elastic: f64,
    pub mech_kinetic: f64,
    pub elec_inductive: f64,
    pub elec_capacitive: f64,
    pub total: f64,
}

/// Evaluates the energy split of a state.
pub fn energies(state: &ModalState, sys: &ModalSystem) -> EnergyBreakdown {
    let n = sys.n();
    debug_assert_eq!(state.n(), n);
    let mut mech_elastic = 0.0;
    let mut mech_kinetic = 0.0;
    let mut elec_inductive = 0.0;
    let mut elec_capacitive = 0.0;
    for h in 0..n {
        mech_elastic += sys.alpha * sys.mech_eigenvalues[h] * state.displacement[h].powi(2);
        mech_kinetic += state.velocity[h].powi(2);
        elec_inductive += sys.beta * sys.elec_eigenvalues[h] * state.estate[h].powi(2);
        elec_capacitive += state.estate_rate[h].powi(2);
    }
    let (mech_elastic, mech_kinetic, elec_inductive, elec_capacitive) = (
        0.5 * mech_elastic,
        0.5 * mech_kinetic,
        0.5 * elec_inductive,
        0.5 * elec_capacitive,
    );
    EnergyBreakdown {
        mech_elastic,
        mech_kinetic,
        elec_inductive,
        elec_capacitive,
        total: mech_elastic + mech_kinetic + elec_inductive + elec_capacitive,
    }
}

/// Mechanical energy held by a single mode pair.
pub fn mode_mechanical_energy(state: &ModalState, sys: &ModalSystem, h: usize) -> f64 {
    0.5 * (sys.alpha * sys.mech_eigenvalues[h] * state.displacement[h].powi(2)
        + state.velocity[h].powi(2))
}

/// A sampled time history with energy bookkeeping.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ModalState>,
    pub energies: Vec<EnergyBreakdown>,
    pub stats: IntegratorStats,
    pub rel_tol: f64,
}

/// Integrates the modal system from `init` to `t_end`, sampling the solution
/// at `samples` evenly spaced times (including both endpoints).
pub fn integrate(
    sys: &ModalSystem,
    init: &ModalState,
    t_end: f64,
    rel_tol: f64,
    samples: usize,
) -> Result<Trajectory> {
    if !(1e-12..=1e-3).contains(&rel_tol) {
        return Err(Error::invalid(format!(
            "relative tolerance must lie in [1e-12, 1e-3], got {rel_tol}"
        )));
    }
    if init.n() != sys.n() || !init.is_consistent() {
        return Err(Error::DimensionMismatch(
            "initial state does not match the system dimension".into(),
        ));
    }
    if samples < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let times: Vec<f64> = (0..samples)
        .map(|i| t_end * i as f64 / (samples - 1) as f64)
        .collect();
    let mut states: Vec<ModalState> = Vec::with_capacity(samples);
    let flat0 = init.to_flat();
    let abs_tol = rel_tol * 1e-3;
    let stats = integrate_adaptive(
        |_t, y, dy| sys.rhs(y, dy),
        0.0,
        &flat0,
        t_end,
        rel_tol,
        abs_tol,
        &times,
        |_, _, y| states.push(ModalState::from_flat(y)),
    )?;
    let energy: Vec<EnergyBreakdown> = states.iter().map(|s| energies(s, sys)).collect();
    Ok(Trajectory {
        times,
        states,
        energies: energy,
        stats,
        rel_tol,
    })
}

/// Closed-form solution of one undamped mode pair starting from a purely
/// mechanical displacement v0: a two-frequency beat.
#[derive(Debug, Clone, Copy)]
pub struct BeatSolution {
    /// Lower and upper pulsations of the hybridized pair.
    pub omega1: f64,
    pub omega2: f64,
    /// Displacement amplitudes of the two components (sum = v0).
    pub v1: f64,
    pub v2: f64,
    /// E-state amplitudes consistent with the coupled equations.
    pub phi1: f64,
    pub phi2: f64,
}

impl BeatSolution {
    pub fn new(a: f64, b: f64, c: f64, v0: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::invalid(format!(
                "stiffnesses must be positive, got A = {a}, B = {b}"
            )));
        }
        if c == 0.0 {
            // uncoupled: a pure mechanical cosine, no e-state response
            return Ok(BeatSolution {
                omega1: a.sqrt(),
                omega2: b.sqrt(),
                v1: v0,
                v2: 0.0,
                phi1: 0.0,
                phi2: 0.0,
            });
        }
        let sum = c * c + a + b;
        let disc = (sum * sum - 4.0 * a * b).sqrt();
        let omega1 = (0.5 * (sum - disc)).sqrt();
        let omega2 = (0.5 * (sum + disc)).sqrt();
        let asym = (c * c - a + b) / disc;
        let v1 = 0.5 * v0 * (1.0 + asym);
        let v2 = 0.5 * v0 * (1.0 - asym);
        // e-state amplitudes solving v'' + A v - C phi' = 0 component-wise
        let phi1 = (a - omega1 * omega1) * v1 / (c * omega1);
        let phi2 = (a - omega2 * omega2) * v2 / (c * omega2);
        Ok(BeatSolution {
            omega1,
            omega2,
            v1,
            v2,
            phi1,
            phi2,
        })
    }

    pub fn displacement(&self, t: f64) -> f64 {
        self.v1 * (self.omega1 * t).cos() + self.v2 * (self.omega2 * t).cos()
    }

    pub fn estate(&self, t: f64) -> f64 {
        self.phi1 * (self.omega1 * t).sin() + self.phi2 * (self.omega2 * t).sin()
    }

    /// Period of the slow amplitude modulation, 2 pi / |omega2 - omega1|.
    pub fn beat_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.omega2 - self.omega1).abs()
    }
}

/// Samples the closed-form solution on a time grid.
pub fn closed_form_undamped(
    a: f64,
    b: f64,
    c: f64,
    v0: f64,
    t_grid: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let beat = BeatSolution::new(a, b, c, v0)?;
    Ok((
        t_grid.iter().map(|&t| beat.displacement(t)).collect(),
        t_grid.iter().map(|&t| beat.estate(t)).collect(),
    ))
}

/// Envelopes of the beat's maxima and minima, valid for weak coupling.
#[derive(Debug, Clone)]
pub struct Envelopes {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    /// False when C^2 is not small against A and the envelope picture is
    /// only indicative.
    pub weak_coupling: bool,
}

/// Low-frequency envelopes of the modulated displacement.
pub fn envelopes(a: f64, b: f64, c: f64, v0: f64, t_grid: &[f64]) -> Result<Envelopes> {
    let beat = BeatSolution::new(a, b, c, v0)?;
    let half_gap = 0.5 * (beat.omega1 - beat.omega2);
    let upper = t_grid
        .iter()
        .map(|&t| (beat.v1 + beat.v2) * (half_gap * t).cos())
        .collect();
    let lower = t_grid
        .iter()
        .map(|&t| (beat.v1 - beat.v2) * (half_gap * t).sin())
        .collect();
    Ok(Envelopes {
        upper,
        lower,
        weak_coupling: c * c < 0.1 * a,
    })
}

/// Frequency-response curves: Frobenius norms of the mechanical, electrical
/// and coupling blocks of the full transfer map.
#[derive(Debug, Clone)]
pub struct FrfCurves {
    pub omega: Vec<f64>,
    pub mech: Vec<f64>,
    pub elec: Vec<f64>,
    pub coupling: Vec<f64>,
}

/// Full 2n x 2n harmonic transfer map at forcing pulsation `omega`: the
/// inverse of the dynamic stiffness of the coupled system, mapping
/// generalized modal forces (mechanical block first) to (v, phi) responses.
pub fn transfer_matrix(sys: &ModalSystem, omega: f64) -> Result<DMatrix<Complex64>> {
    let n = sys.n();
    let mut m = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    let iw = Complex64::new(0.0, omega);
    for h in 0..n {
        m[(h, h)] = Complex64::new(sys.alpha * sys.mech_eigenvalues[h] - omega * omega, 0.0);
        m[(n + h, n + h)] = Complex64::new(
            sys.beta * sys.elec_eigenvalues[h] - omega * omega,
            omega * sys.delta,
        );
        for k in 0..n {
            m[(h, n + k)] -= iw * sys.gamma * sys.coupling.get(h, k);
            m[(n + h, k)] +=
                (Complex64::new(sys.delta, 0.0) + iw) * sys.gamma * sys.coupling.get(k, h);
        }
    }
    m.try_inverse().ok_or_else(|| {
        Error::numerical(format!(
            "singular harmonic system at forcing pulsation {omega} (undamped resonance)"
        ))
    })
}

/// Sweeps the transfer map over a pulsation grid.
pub fn frf(sys: &ModalSystem, omega_grid: &[f64]) -> Result<FrfCurves> {
    let n = sys.n();
    let mut curves = FrfCurves {
        omega: omega_grid.to_vec(),
        mech: Vec::with_capacity(omega_grid.len()),
        elec: Vec::with_capacity(omega_grid.len()),
        coupling: Vec::with_capacity(omega_grid.len()),
    };
    for &omega in omega_grid {
        let t = transfer_matrix(sys, omega)?;
        let block_norm = |r0: usize, c0: usize| {
            let mut s = 0.0;
            for r in 0..n {
                for c in 0..n {
                    s += t[(r0 + r, c0 + c)].norm_sqr();
                }
            }
            s.sqrt()
        };
        curves.mech.push(block_norm(0, 0));
        curves.elec.push(block_norm(n, n));
        curves.coupling.push(block_norm(n, 0));
    }
    Ok(curves)
}

/// Modal state excited by a point velocity impulse: v' projections equal the
/// basis values at the impact point, everything else zero.
pub fn impulse_initial_state(
    point: (f64, f64),
    basis: &ModalBasis,
    n: usize,
    magnitude: f64,
) -> Result<ModalState> {
    let (x1, x2) = point;
    if !(x1 > 0.0 && x1 < 1.0 && x2 > 0.0 && x2 < 1.0) {
        return Err(Error::invalid(format!(
            "impulse point ({x1}, {x2}) must lie in the open unit square; \
             boundary points excite nothing"
        )));
    }
    if basis.len() < n {
        return Err(Error::DimensionMismatch(format!(
            "basis holds {} modes, {n} requested",
            basis.len()
        )));
    }
    let mut state = ModalState::zero(n);
    for (h, mode) in basis.modes.iter().take(n).enumerate() {
        state.velocity[h] = magnitude * mode.shape.eval(x1, x2);
    }
    if state.velocity.iter().all(|v| v.abs() < 1e-14) {
        return Err(Error::invalid(format!(
            "degenerate impulse: every retained mode vanishes at ({x1}, {x2})"
        )));
    }
    Ok(state)
}

/// Magnitude that normalizes the impulse so the initial total energy is 1.
pub fn unit_energy_magnitude(point: (f64, f64), basis: &ModalBasis, n: usize) -> Result<f64> {
    let raw = impulse_initial_state(point, basis, n, 1.0)?;
    let sum_sq: f64 = raw.velocity.iter().map(|v| v * v).sum();
    Ok((2.0 / sum_sq).sqrt())
}

/// A field snapshot sampled on a uniform grid over the unit square.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    /// Grid coordinates along each axis.
    pub coords: Vec<f64>,
    /// Deflection w(x1, x2), row-major over (x1, x2).
    pub deflection: Vec<f64>,
    /// E-state field phi(x1, x2), same layout.
    pub estate: Vec<f64>,
}

/// Reconstructs the physical fields of a modal state: superposition of the
/// basis shapes weighted by the modal coefficients.
pub fn reconstruct_field(
    state: &ModalState,
    mech: &ModalBasis,
    elec: &ModalBasis,
    grid_n: usize,
) -> Result<FieldGrid> {
    let n = state.n();
    if mech.len() < n || elec.len() < n {
        return Err(Error::DimensionMismatch(format!(
            "bases hold {} (mech) / {} (elec) modes, state has {n}",
            mech.len(),
            elec.len()
        )));
    }
    if grid_n < 2 {
        return Err(Error::invalid("field grid needs at least 2 points per axis"));
    }
    let coords: Vec<f64> = (0..grid_n)
        .map(|i| i as f64 / (grid_n - 1) as f64)
        .collect();
    let mut deflection = vec![0.0; grid_n * grid_n];
    let mut estate = vec![0.0; grid_n * grid_n];
    for (r, &x1) in coords.iter().enumerate() {
        for (c, &x2) in coords.iter().enumerate() {
            let mut w = 0.0;
            let mut p = 0.0;
            for h in 0..n {
                w += state.displacement[h] * mech.modes[h].shape.eval(x1, x2);
                p += state.estate[h] * elec.modes[h].shape.eval(x1, x2);
            }
            deflection[r * grid_n + c] = w;
            estate[r * grid_n + c] = p;
        }
    }
    Ok(FieldGrid {
        coords,
        deflection,
        estate,
    })
}
