//! Physical parameters of the plate/actuator/network assembly and the
//! dimensionless numbers derived from them.
//!
//! All dimensional bookkeeping lives here; every other module consumes
//! dimensionless quantities only.

use crate::{Error, Result};
use std::f64::consts::PI;

/// Coupling ratios below this are flagged as weak coupling.
pub const WEAK_COUPLING_THRESHOLD: f64 = 0.05;

/// Physical description of the square plate, its actuator grid and the
/// interconnecting network. SI units throughout.
///
/// The plate occupies `side_length × side_length × [-h, h]`, i.e.
/// `half_thickness` is half of the total plate thickness.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Plate side ℓ (m).
    pub side_length: f64,
    /// Plate half-thickness h (m); total thickness is 2h.
    pub half_thickness: f64,
    /// Mass density ρ (kg·m⁻³).
    pub mass_density: f64,
    /// Young modulus (Pa).
    pub young_modulus: f64,
    /// Poisson ratio (dimensionless, in [0, 0.5)).
    pub poisson_ratio: f64,
    /// Number of actuators; must be a perfect square (uniform grid).
    pub actuator_count: u32,
    /// Piezoelectric coupling g_me (N·V⁻¹).
    pub piezo_coupling: f64,
    /// Piezoelectric capacitance k_ee (F).
    pub piezo_capacitance: f64,
    /// Grounded capacitance k_C (F).
    pub ground_capacitance: f64,
    /// Net-inductance of each network branch (H).
    pub net_inductance: f64,
    /// Net-resistance of each network branch (Ω); zero means a lossless net.
    pub net_resistance: f64,
}

impl Default for PhysicalParams {
    /// Benchmark configuration: a 1 m × 1 m × 2 mm aluminum plate carrying a
    /// 7 × 7 grid of PZT actuators. Used by the CLI whenever a key is not
    /// overridden. The net impedance defaults are placeholders meant to be
    /// replaced by the optimal values or explicit overrides.
    fn default() -> Self {
        PhysicalParams {
            side_length: 1.0,
            half_thickness: 1.0e-3,
            mass_density: 2700.0,
            young_modulus: 70.0e9,
            poisson_ratio: 0.3,
            actuator_count: 49,
            piezo_coupling: 28.0e-5,
            piezo_capacitance: 0.6e-6,
            ground_capacitance: 1.0e-6,
            net_inductance: 1.0,
            net_resistance: 0.0,
        }
    }
}

impl PhysicalParams {
    /// Checks the hard invariants. Soft conditions are reported by
    /// [`PhysicalParams::warnings`] instead.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("side_length", self.side_length),
            ("half_thickness", self.half_thickness),
            ("mass_density", self.mass_density),
            ("young_modulus", self.young_modulus),
            ("piezo_coupling", self.piezo_coupling),
            ("piezo_capacitance", self.piezo_capacitance),
            ("ground_capacitance", self.ground_capacitance),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::invalid(format!(
                    "{name} must be strictly positive, got {value}"
                )));
            }
        }
        if self.net_inductance == 0.0 {
            return Err(Error::ResistiveOnlyNetwork);
        }
        if !(self.net_inductance > 0.0) || !self.net_inductance.is_finite() {
            return Err(Error::invalid(format!(
                "net_inductance must be strictly positive, got {}",
                self.net_inductance
            )));
        }
        if !(self.net_resistance >= 0.0) || !self.net_resistance.is_finite() {
            return Err(Error::invalid(format!(
                "net_resistance must be non-negative, got {}",
                self.net_resistance
            )));
        }
        if !(0.0..0.5).contains(&self.poisson_ratio) {
            return Err(Error::invalid(format!(
                "poisson_ratio must lie in [0, 0.5), got {}",
                self.poisson_ratio
            )));
        }
        if self.actuator_count == 0 || !is_perfect_square(self.actuator_count) {
            return Err(Error::invalid(format!(
                "actuator_count must be a positive perfect square, got {}",
                self.actuator_count
            )));
        }
        Ok(())
    }

    /// Soft-condition diagnostics: modelling assumptions that hold only
    /// approximately for the given numbers.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let thinness = 2.0 * self.half_thickness / self.side_length;
        if thinness >= 0.1 {
            out.push(format!(
                "thin-plate assumption stretched: 2h/l = {thinness:.3} (expected < 0.1)"
            ));
        }
        out
    }
}

fn is_perfect_square(n: u32) -> bool {
    let r = (n as f64).sqrt().round() as u32;
    r * r == n
}

/// Quantities derived from [`PhysicalParams`], still dimensional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedPhysical {
    /// Bending stiffness D_P = (2h³/3)(2μ + λ) (N·m), Lamé moduli from
    /// the standard isotropic conversion of (E, ν).
    pub bending_stiffness: f64,
    /// Total plate mass M_P = 2ρℓ²h (kg).
    pub total_mass: f64,
    /// Capacitance per unit area C_N = (k_ee + k_C)/d² (F·m⁻²).
    pub area_capacitance: f64,
    /// Influence area of one actuator d² = ℓ²/N_A (m²).
    pub cell_area: f64,
    /// Characteristic pulsation ω = (π/ℓ)√(D_P/M_P) (rad·s⁻¹); the first
    /// simply supported mechanical mode then has dimensionless pulsation 2π.
    pub char_pulsation: f64,
    /// Characteristic e-state V̄ = √(M_P/C_N). Carried as a bookkeeping
    /// constant only; it cancels out of the dimensionless system.
    pub char_estate: f64,
}

/// Computes the derived dimensional quantities.
pub fn derive_physical(p: &PhysicalParams) -> Result<DerivedPhysical> {
    p.validate()?;
    let e = p.young_modulus;
    let nu = p.poisson_ratio;
    let lame_lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    let lame_mu = e / (2.0 * (1.0 + nu));
    let inertia = 2.0 * p.half_thickness.powi(3) / 3.0;
    let bending_stiffness = inertia * (2.0 * lame_mu + lame_lambda);
    let total_mass = 2.0 * p.mass_density * p.side_length.powi(2) * p.half_thickness;
    let cell_area = p.side_length.powi(2) / p.actuator_count as f64;
    let area_capacitance = (p.piezo_capacitance + p.ground_capacitance) / cell_area;
    let char_pulsation = PI / p.side_length * (bending_stiffness / total_mass).sqrt();
    let char_estate = (total_mass / area_capacitance).sqrt();
    Ok(DerivedPhysical {
        bending_stiffness,
        total_mass,
        area_capacitance,
        cell_area,
        char_pulsation,
        char_estate,
    })
}

/// The four dimensionless numbers governing the coupled plate/network system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    /// Mechanical stiffness scale; equals 1/π² for every valid parameter set
    /// by the choice of the characteristic pulsation.
    pub alpha: f64,
    /// Electric stiffness scale 1/(L_N C_N ℓ² ω²).
    pub beta: f64,
    /// Electro-mechanical coupling (g_me/(ℓω))·√(1/(M_P C_N)).
    pub gamma: f64,
    /// Dissipation R_N/(L_N ω).
    pub delta: f64,
}

/// Maps a physical description to the four dimensionless numbers.
pub fn dimensionless_from_physical(p: &PhysicalParams) -> Result<DimensionlessParams> {
    let d = derive_physical(p)?;
    let ell = p.side_length;
    let omega = d.char_pulsation;
    let alpha = d.bending_stiffness / (d.total_mass * ell * ell * omega * omega);
    let beta = 1.0 / (p.net_inductance * d.area_capacitance * ell * ell * omega * omega);
    let gamma =
        p.piezo_coupling / (ell * omega) * (1.0 / (d.total_mass * d.area_capacitance)).sqrt();
    let delta = p.net_resistance / (p.net_inductance * omega);
    Ok(DimensionlessParams {
        alpha,
        beta,
        gamma,
        delta,
    })
}

/// Coupling ratio k = C²/A of a modal pair with stiffness `a` and coupling
/// `c`. Small k means slow energy exchange.
pub fn coupling_ratio(a: f64, c: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::invalid(format!(
            "modal stiffness must be positive, got {a}"
        )));
    }
    Ok(c * c / a)
}

/// Coupling ratio in its physical form g_me²/(D_P C_N). Equal to the modal
/// k = C²/A of any simply supported mode pair.
pub fn coupling_ratio_physical(p: &PhysicalParams) -> Result<f64> {
    let d = derive_physical(p)?;
    Ok(p.piezo_coupling * p.piezo_coupling / (d.bending_stiffness * d.area_capacitance))
}

/// True when the coupling ratio is too small for effective damping.
pub fn is_weak_coupling(k: f64) -> bool {
    k < WEAK_COUPLING_THRESHOLD
}

/// Derived-parameters report as a flat JSON object, one key per quantity.
pub fn derived_report(p: &PhysicalParams) -> Result<String> {
    let d = derive_physical(p)?;
    let dl = dimensionless_from_physical(p)?;
    let k = coupling_ratio_physical(p)?;
    let fields: &[(&str, f64)] = &[
        ("side_length", p.side_length),
        ("half_thickness", p.half_thickness),
        ("mass_density", p.mass_density),
        ("young_modulus", p.young_modulus),
        ("poisson_ratio", p.poisson_ratio),
        ("actuator_count", p.actuator_count as f64),
        ("piezo_coupling", p.piezo_coupling),
        ("piezo_capacitance", p.piezo_capacitance),
        ("ground_capacitance", p.ground_capacitance),
        ("net_inductance", p.net_inductance),
        ("net_resistance", p.net_resistance),
        ("bending_stiffness", d.bending_stiffness),
        ("total_mass", d.total_mass),
        ("area_capacitance", d.area_capacitance),
        ("cell_area", d.cell_area),
        ("char_pulsation", d.char_pulsation),
        ("char_estate", d.char_estate),
        ("alpha", dl.alpha),
        ("beta", dl.beta),
        ("gamma", dl.gamma),
        ("delta", dl.delta),
        ("coupling_ratio", k),
    ];
    let mut out = String::from("{\n");
    for (i, (name, value)) in fields.iter().enumerate() {
        let sep = if i + 1 == fields.len() { "" } else { "," };
        out.push_str(&format!("  \"{name}\": {value}{sep}\n"));
    }
    out.push_str("}\n");
    Ok(out)
}
