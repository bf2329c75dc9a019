//! Optimal net-impedance determination: self-resonance band, transfer time,
//! optimal inductance/resistance, and root-locus analysis of the coupled
//! pair's characteristic polynomials.

use crate::basis::ModeIndex;
use crate::params::{derive_physical, PhysicalParams};
use crate::{Error, Result};
use nalgebra::Matrix4;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Dimensionless coefficients of one coupled mechanical/electrical mode pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalCoefficients {
    /// Modal mechanical stiffness (alpha * lambda_h), positive.
    pub mech_stiffness: f64,
    /// Modal electrical stiffness (beta * nu_h), positive.
    pub elec_stiffness: f64,
    /// Modal coupling (gamma * C_hh); negative for the physical sign of the
    /// diagonal coupling. All root formulas depend on it through its square.
    pub coupling: f64,
    /// Dissipation (delta), non-negative.
    pub damping: f64,
}

impl ModalCoefficients {
    pub fn new(
        mech_stiffness: f64,
        elec_stiffness: f64,
        coupling: f64,
        damping: f64,
    ) -> Result<Self> {
        if !(mech_stiffness > 0.0) || !(elec_stiffness > 0.0) {
            return Err(Error::invalid(format!(
                "modal stiffnesses must be positive, got A = {mech_stiffness}, B = {elec_stiffness}"
            )));
        }
        if !(damping >= 0.0) {
            return Err(Error::invalid(format!(
                "modal damping must be non-negative, got {damping}"
            )));
        }
        if !coupling.is_finite() {
            return Err(Error::invalid("modal coupling must be finite"));
        }
        Ok(ModalCoefficients {
            mech_stiffness,
            elec_stiffness,
            coupling,
            damping,
        })
    }

    fn abcd(&self) -> (f64, f64, f64, f64) {
        (
            self.mech_stiffness,
            self.elec_stiffness,
            self.coupling,
            self.damping,
        )
    }
}

/// Electric-stiffness interval (B1, B2) producing self-resonance with a
/// mechanical mode of stiffness `a` under coupling `c`.
pub fn self_resonance_band(a: f64, c: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::invalid(format!(
            "mechanical stiffness must be positive, got {a}"
        )));
    }
    let b1 = a - c * c;
    if b1 <= 0.0 {
        return Err(Error::invalid(format!(
            "coupling too strong for a valid self-resonance band: A - C^2 = {b1}"
        )));
    }
    Ok((b1, a + c * c))
}

/// Dimensionless time, in periods of the coupled mode, to convert the
/// mechanical modal energy into electrical form at resonance. Depends only
/// on the coupling ratio k = C^2/A.
pub fn transfer_time(k: f64) -> Result<f64> {
    if !(k > 0.0 && k <= 1.0) {
        return Err(Error::invalid(format!(
            "coupling ratio must lie in (0, 1], got {k}"
        )));
    }
    Ok(1.0 / (2.0 * ((1.0 + k.sqrt()).sqrt() - (1.0 - k.sqrt()).sqrt())))
}

/// Optimal net-inductance coupling the h-th simply supported mode pair:
/// 1 / ((i^2+j^2) (k_ee + k_C) N_A omega^2).
pub fn optimal_inductance_ss(h: ModeIndex, p: &PhysicalParams) -> Result<f64> {
    let d = derive_physical(p)?;
    let s = (h.i * h.i + h.j * h.j) as f64;
    let cap = p.piezo_capacitance + p.ground_capacitance;
    let omega2 = d.char_pulsation * d.char_pulsation;
    Ok(1.0 / (s * cap * p.actuator_count as f64 * omega2))
}

/// Optimal net-resistance for the simply supported plate; independent of the
/// mode number.
pub fn optimal_resistance_ss(p: &PhysicalParams) -> Result<f64> {
    let d = derive_physical(p)?;
    let cap = p.piezo_capacitance + p.ground_capacitance;
    let na = p.actuator_count as f64;
    let omega2 = d.char_pulsation * d.char_pulsation;
    Ok(2.0 * PI * PI * p.piezo_coupling / (cap * na.powf(1.5) * omega2)
        * (1.0 / (d.total_mass * cap)).sqrt())
}

/// Optimal (inductance, resistance) for a clamped-plate mode pair, given the
/// mode's stiffening ratio c_h. Reduces to the simply supported values
/// divided by c_h.
pub fn optimal_impedance_clamped(
    h: ModeIndex,
    p: &PhysicalParams,
    stiffening: f64,
) -> Result<(f64, f64)> {
    if !(stiffening > 0.0) {
        return Err(Error::invalid(format!(
            "stiffening ratio must be positive, got {stiffening}"
        )));
    }
    let d = derive_physical(p)?;
    let s = (h.i * h.i + h.j * h.j) as f64;
    let l = d.total_mass
        / (stiffening * s * d.area_capacitance * PI * PI * d.bending_stiffness);
    let r = 2.0 * p.piezo_coupling
        / (stiffening * d.area_capacitance * p.side_length * d.bending_stiffness)
        * (d.total_mass / d.area_capacitance).sqrt();
    Ok((l, r))
}

/// Four roots of a characteristic quartic, split into the conjugate pair that
/// continues the purely mechanical oscillator as the coupling goes to zero
/// and the pair continuing the electrical one.
#[derive(Debug, Clone, Copy)]
pub struct RootSet {
    pub mechanical: [Complex64; 2],
    pub electrical: [Complex64; 2],
}

impl RootSet {
    pub fn all(&self) -> [Complex64; 4] {
        [
            self.mechanical[0],
            self.mechanical[1],
            self.electrical[0],
            self.electrical[1],
        ]
    }

    /// Largest real part across all four roots.
    pub fn max_real(&self) -> f64 {
        self.all().iter().map(|s| s.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Monic quartic solver: roots of s^4 + a3 s^3 + a2 s^2 + a1 s + a0 via the
/// companion matrix, polished by complex Newton steps. Errors if the polished
/// residual exceeds 1e-9 relative to the coefficient scale.
fn quartic_roots(a3: f64, a2: f64, a1: f64, a0: f64) -> Result<[Complex64; 4]> {
    let companion = Matrix4::new(
        0.0, 0.0, 0.0, -a0, //
        1.0, 0.0, 0.0, -a1, //
        0.0, 1.0, 0.0, -a2, //
        0.0, 0.0, 1.0, -a3,
    );
    let eig = companion.complex_eigenvalues();
    let poly = |s: Complex64| (((s + a3) * s + a2) * s + a1) * s + a0;
    let dpoly = |s: Complex64| ((4.0 * s + 3.0 * a3) * s + 2.0 * a2) * s + a1;
    let scale = [1.0, a3.abs(), a2.abs(), a1.abs(), a0.abs()]
        .into_iter()
        .fold(1.0f64, f64::max);
    let mut roots = [Complex64::default(); 4];
    for (i, r) in eig.iter().enumerate() {
        let mut s = *r;
        for _ in 0..4 {
            let d = dpoly(s);
            if d.norm() < 1e-300 {
                break;
            }
            let step = poly(s) / d;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            s -= step;
        }
        if poly(s).norm() > 1e-9 * scale {
            return Err(Error::numerical(format!(
                "quartic solver residual {:.3e} at root {s} exceeds tolerance",
                poly(s).norm()
            )));
        }
        roots[i] = s;
    }
    Ok(roots)
}

/// Splits four quartic roots into two branches by proximity to the uncoupled
/// targets: the mechanical pair continues ±i√A, the electrical pair the roots
/// of s^2 + D s + B.
fn pair_by_uncoupled_limit(roots: [Complex64; 4], a: f64, b: f64, d: f64) -> RootSet {
    let mech_target = [
        Complex64::new(0.0, a.sqrt()),
        Complex64::new(0.0, -a.sqrt()),
    ];
    let disc = d * d - 4.0 * b;
    let elec_target = if disc >= 0.0 {
        [
            Complex64::new((-d + disc.sqrt()) / 2.0, 0.0),
            Complex64::new((-d - disc.sqrt()) / 2.0, 0.0),
        ]
    } else {
        [
            Complex64::new(-d / 2.0, (-disc).sqrt() / 2.0),
            Complex64::new(-d / 2.0, -(-disc).sqrt() / 2.0),
        ]
    };
    // choose the 2+2 split minimizing summed distance to the targets
    let idx = [0usize, 1, 2, 3];
    let splits = [
        ([idx[0], idx[1]], [idx[2], idx[3]]),
        ([idx[0], idx[2]], [idx[1], idx[3]]),
        ([idx[0], idx[3]], [idx[1], idx[2]]),
    ];
    let pair_cost = |pair: [usize; 2], target: [Complex64; 2]| {
        let direct = (roots[pair[0]] - target[0]).norm() + (roots[pair[1]] - target[1]).norm();
        let crossed = (roots[pair[0]] - target[1]).norm() + (roots[pair[1]] - target[0]).norm();
        direct.min(crossed)
    };
    let mut best = (f64::INFINITY, splits[0]);
    for split in splits {
        let cost = pair_cost(split.0, mech_target) + pair_cost(split.1, elec_target);
        if cost < best.0 {
            best = (cost, split);
        }
    }
    let ((m, e), _) = (best.1, ());
    RootSet {
        mechanical: [roots[m[0]], roots[m[1]]],
        electrical: [roots[e[0]], roots[e[1]]],
    }
}

/// Roots of the coupled pair's characteristic polynomial
/// s^4 + D s^3 + (A + B + C^2) s^2 + D (A + C^2) s + A B.
pub fn char_roots_p(m: &ModalCoefficients) -> Result<RootSet> {
    let (a, b, c, d) = m.abcd();
    let roots = quartic_roots(d, a + b + c * c, d * (a + c * c), a * b)?;
    Ok(pair_by_uncoupled_limit(roots, a, b, d))
}

/// Roots of the bounding polynomial s^2 C^2 + (s^2 + A)(s^2 + s D + A),
/// i.e. the characteristic polynomial with the electric stiffness locked to
/// the mechanical one and the dissipative coupling term dropped.
pub fn char_roots_q(a: f64, c: f64, d: f64) -> Result<RootSet> {
    if !(a > 0.0) {
        return Err(Error::invalid(format!(
            "mechanical stiffness must be positive, got {a}"
        )));
    }
    let roots = quartic_roots(d, 2.0 * a + c * c, a * d, a * a)?;
    Ok(pair_by_uncoupled_limit(roots, a, a, d))
}

/// Root locus of the characteristic polynomial along a damping grid.
#[derive(Debug, Clone)]
pub struct DampingSweep {
    /// The damping grid (copy of the input).
    pub damping: Vec<f64>,
    /// Tracked root trajectories: `roots[step][branch]`. Branch identity is
    /// kept by minimal-displacement matching between consecutive steps.
    pub roots: Vec<[Complex64; 4]>,
    /// Electro-mechanical energy balance of each root's eigenvector in
    /// [0, 1]; 1 means equal mechanical and electrical content.
    pub coupling_weights: Vec<[f64; 4]>,
    /// Index of the mechanical branch in the tracked arrays.
    pub mech_branch: usize,
    /// Damping value maximizing the mechanical-branch decay rate.
    pub optimal_damping: f64,
}

/// Sweeps the characteristic roots over a sorted positive damping grid,
/// tracking branches by continuity.
///
/// Branch labels come from the smallest-damping point (mechanical = the
/// branch whose pulsation is log-closest to √A); when that is ambiguous, as
/// at exact resonance B = A, the branch whose pulsation survives at the
/// large-damping end is labelled mechanical.
pub fn damping_sweep(a: f64, b: f64, c: f64, damping_grid: &[f64]) -> Result<DampingSweep> {
    if damping_grid.is_empty() {
        return Err(Error::invalid("empty damping grid"));
    }
    if damping_grid.windows(2).any(|w| w[0] >= w[1]) || damping_grid[0] < 0.0 {
        return Err(Error::invalid(
            "damping grid must be non-negative, strictly increasing",
        ));
    }
    let mut tracked: Vec<[Complex64; 4]> = Vec::with_capacity(damping_grid.len());
    let mut weights: Vec<[f64; 4]> = Vec::with_capacity(damping_grid.len());
    for (step, &d) in damping_grid.iter().enumerate() {
        let m = ModalCoefficients::new(a, b, c, d)?;
        let set = char_roots_p(&m)?;
        let new = set.all();
        let ordered = match tracked.last() {
            None => new,
            Some(prev) => {
                let (perm, ambiguous) = best_assignment(prev, &new);
                if ambiguous {
                    return Err(Error::numerical(format!(
                        "branch tracking failed: root collision near damping = {d} (step {step})"
                    )));
                }
                [new[perm[0]], new[perm[1]], new[perm[2]], new[perm[3]]]
            }
        };
        let mut w = [0.0; 4];
        for (i, s) in ordered.iter().enumerate() {
            w[i] = coupling_weight(*s, a, b, c);
        }
        tracked.push(ordered);
        weights.push(w);
    }

    let mech_branch = label_mechanical_branch(&tracked, a);
    let mut optimal_damping = damping_grid[0];
    let mut best = f64::NEG_INFINITY;
    for (step, roots) in tracked.iter().enumerate() {
        let decay = -roots[mech_branch].re;
        if decay > best {
            best = decay;
            optimal_damping = damping_grid[step];
        }
    }
    Ok(DampingSweep {
        damping: damping_grid.to_vec(),
        roots: tracked,
        coupling_weights: weights,
        mech_branch,
        optimal_damping,
    })
}

/// Minimal-total-displacement assignment of 4 new roots to 4 previous ones.
/// Returns the permutation and whether the optimum was ambiguous (two
/// pairings within 1e-12 of each other while roots coincide).
fn best_assignment(prev: &[Complex64; 4], new: &[Complex64; 4]) -> ([usize; 4], bool) {
    const PERMS: [[usize; 4]; 24] = [
        [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
        [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
        [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
        [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
    ];
    let mut best = f64::INFINITY;
    let mut second = f64::INFINITY;
    let mut arg = PERMS[0];
    for perm in PERMS {
        let cost: f64 = (0..4).map(|i| (prev[i] - new[perm[i]]).norm()).sum();
        if cost < best {
            second = best;
            best = cost;
            arg = perm;
        } else if cost < second {
            second = cost;
        }
    }
    // ambiguity only matters when distinct roots have actually merged
    let scale = new.iter().map(|s| s.norm()).fold(1.0f64, f64::max);
    let merged = (0..4).any(|i| {
        (i + 1..4).any(|j| (new[i] - new[j]).norm() < 1e-12 * scale && i != j)
    });
    (arg, merged && (second - best).abs() < 1e-12 * scale)
}

fn label_mechanical_branch(tracked: &[[Complex64; 4]], a: f64) -> usize {
    let sqrt_a = a.sqrt();
    let first = &tracked[0];
    let last = tracked.last().unwrap();
    // log-distance of each starting pulsation from sqrt(A); conjugate twins
    // share it, upper-half-plane members win by sign
    let dist = |s: Complex64| {
        if s.im.abs() < 1e-300 {
            f64::INFINITY
        } else {
            (s.im.abs() / sqrt_a).ln().abs()
        }
    };
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&p, &q| dist(first[p]).total_cmp(&dist(first[q])));
    let closest = order[0];
    let runner_up = order
        .iter()
        .copied()
        .find(|&i| (first[i] - first[closest]).norm() > 1e-9 && (first[i] - first[closest].conj()).norm() > 1e-9)
        .unwrap_or(order[1]);
    let tie = (dist(first[closest]) - dist(first[runner_up])).abs() < 1e-9;
    if !tie {
        return if first[closest].im >= 0.0 || first[closest].im.abs() < 1e-300 {
            closest
        } else {
            // prefer the upper-half-plane twin for reporting
            (0..4)
                .find(|&i| (first[i] - first[closest].conj()).norm() < 1e-12 * (1.0 + first[i].norm()))
                .unwrap_or(closest)
        };
    }
    // resonant tie: the electrical pulsation collapses at large damping, the
    // mechanical one survives near sqrt(A)
    (0..4).max_by(|&p, &q| last[p].im.total_cmp(&last[q].im)).unwrap()
}

/// Electro-mechanical energy balance of the eigenvector attached to root `s`:
/// min(Em, Ee)/max(Em, Ee) with state (v, v', phi, phi') = (Cs, Cs^2, s^2+A,
/// s(s^2+A)).
fn coupling_weight(s: Complex64, a: f64, b: f64, c: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let v = c * s;
    let vdot = c * s * s;
    let phi = s * s + a;
    let phidot = s * phi;
    let em = 0.5 * (a * v.norm_sqr() + vdot.norm_sqr());
    let ee = 0.5 * (b * phi.norm_sqr() + phidot.norm_sqr());
    if em.max(ee) < 1e-300 {
        return 0.0;
    }
    em.min(ee) / em.max(ee)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::mode_index;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // frozen 40-digit anchors for the aluminum benchmark
    const L_OPT_1: f64 = 55.545192823501496;
    const L_OPT_2: f64 = 22.218077129400598;
    const R_OPT: f64 = 29.840722605750920;
    const C_1: f64 = 3.3462909868187682;
    const L_OPT_1_CLAMPED: f64 = 16.599032493676488;
    const R_OPT_1_CLAMPED: f64 = 8.9175516185816579;
    const TTR_AT_001: f64 = 4.9937303655516634;
    const ALPHA_1: f64 = 0.95124921972503929;
    const ALPHA_2: f64 = 1.0512492197250393;

    #[test]
    fn band_examples() {
        let (b1, b2) = self_resonance_band(1.0, 0.1).unwrap();
        assert_relative_eq!(b1, 0.99, max_relative = 1e-15);
        assert_relative_eq!(b2, 1.01, max_relative = 1e-15);
        let (b1, b2) = self_resonance_band(2.5, 0.0).unwrap();
        assert_eq!((b1, b2), (2.5, 2.5));
        assert!(self_resonance_band(1.0, 1.1).is_err());
        assert!(self_resonance_band(0.0, 0.1).is_err());
    }

    #[test]
    fn transfer_time_values() {
        assert_relative_eq!(
            transfer_time(1.0).unwrap(),
            1.0 / (2.0 * 2.0f64.sqrt()),
            max_relative = 1e-15
        );
        assert_relative_eq!(transfer_time(0.01).unwrap(), TTR_AT_001, max_relative = 1e-14);
        assert!(transfer_time(0.0).is_err());
        assert!(transfer_time(1.5).is_err());
    }

    #[test]
    fn transfer_time_is_decreasing() {
        let mut prev = f64::INFINITY;
        for n in 1..=100 {
            let k = n as f64 / 100.0;
            let t = transfer_time(k).unwrap();
            assert!(t < prev, "T_tr not decreasing at k = {k}");
            prev = t;
        }
    }

    #[test]
    fn inductance_mode_scaling() {
        let p = PhysicalParams::default();
        let l1 = optimal_inductance_ss(mode_index(1), &p).unwrap();
        let l2 = optimal_inductance_ss(mode_index(2), &p).unwrap();
        assert_relative_eq!(l2 / l1, 2.0 / 5.0, max_relative = 1e-14);
        assert_relative_eq!(l1, L_OPT_1, max_relative = 1e-12);
        assert_relative_eq!(l2, L_OPT_2, max_relative = 1e-12);
    }

    #[test]
    fn inductance_actuator_scaling() {
        let p = PhysicalParams::default();
        let denser = PhysicalParams {
            actuator_count: 4 * p.actuator_count,
            ..p.clone()
        };
        let l = optimal_inductance_ss(mode_index(1), &p).unwrap();
        let ld = optimal_inductance_ss(mode_index(1), &denser).unwrap();
        assert_relative_eq!(ld / l, 0.25, max_relative = 1e-14);
    }

    #[test]
    fn resistance_value_and_scalings() {
        let p = PhysicalParams::default();
        let r = optimal_resistance_ss(&p).unwrap();
        assert_relative_eq!(r, R_OPT, max_relative = 1e-12);
        let denser = PhysicalParams {
            actuator_count: 4 * p.actuator_count,
            ..p.clone()
        };
        let rd = optimal_resistance_ss(&denser).unwrap();
        assert_relative_eq!(rd / r, 0.125, max_relative = 1e-13);
        let uncoupled = PhysicalParams {
            piezo_coupling: 1e-300,
            ..p.clone()
        };
        assert!(optimal_resistance_ss(&uncoupled).unwrap() < 1e-290);
    }

    #[test]
    fn clamped_impedance_is_ss_over_stiffening() {
        let p = PhysicalParams::default();
        let (l, r) = optimal_impedance_clamped(mode_index(1), &p, C_1).unwrap();
        assert_relative_eq!(l, L_OPT_1_CLAMPED, max_relative = 1e-12);
        assert_relative_eq!(r, R_OPT_1_CLAMPED, max_relative = 1e-12);
        assert_relative_eq!(l, L_OPT_1 / C_1, max_relative = 1e-12);
        assert_relative_eq!(r, R_OPT / C_1, max_relative = 1e-12);
        // unit stiffening recovers the simply supported resistance
        let (_, r1) = optimal_impedance_clamped(mode_index(1), &p, 1.0).unwrap();
        assert_relative_eq!(r1, R_OPT, max_relative = 1e-12);
        // R* c_h is mode-independent
        let stiff = [C_1, 2.2327177292620875, 1.9005382938480314];
        let mut products = Vec::new();
        for (k, c) in stiff.iter().enumerate() {
            let (_, rk) = optimal_impedance_clamped(mode_index(k + 1), &p, *c).unwrap();
            products.push(rk * c);
        }
        for w in products.windows(2) {
            assert_relative_eq!(w[0], w[1], max_relative = 1e-12);
        }
    }

    #[test]
    fn decoupled_roots_are_the_two_oscillators() {
        let m = ModalCoefficients::new(2.0, 3.0, 0.0, 0.0).unwrap();
        let set = char_roots_p(&m).unwrap();
        let mut ims: Vec<f64> = set.mechanical.iter().map(|s| s.im).collect();
        ims.sort_by(f64::total_cmp);
        assert_relative_eq!(ims[1], 2.0f64.sqrt(), max_relative = 1e-12);
        let mut ime: Vec<f64> = set.electrical.iter().map(|s| s.im).collect();
        ime.sort_by(f64::total_cmp);
        assert_relative_eq!(ime[1], 3.0f64.sqrt(), max_relative = 1e-12);
        for s in set.all() {
            assert!(s.re.abs() < 1e-12);
        }
    }

    #[test]
    fn resonant_undamped_roots_match_beat_frequencies() {
        let m = ModalCoefficients::new(1.0, 1.0, 0.1, 0.0).unwrap();
        let set = char_roots_p(&m).unwrap();
        let mut ims: Vec<f64> = set.all().iter().map(|s| s.im).filter(|im| *im > 0.0).collect();
        ims.sort_by(f64::total_cmp);
        assert_relative_eq!(ims[0], ALPHA_1, max_relative = 1e-12);
        assert_relative_eq!(ims[1], ALPHA_2, max_relative = 1e-12);
    }

    #[test]
    fn root_residuals_meet_contract() {
        let m = ModalCoefficients::new(1.0, 1.0, 0.1, 0.05).unwrap();
        let set = char_roots_p(&m).unwrap();
        let (a, b, c, d) = m.abcd();
        for s in set.all() {
            let p = (((s + d) * s + (a + b + c * c)) * s + d * (a + c * c)) * s + a * b;
            assert!(p.norm() < 1e-9, "residual {}", p.norm());
        }
    }

    #[test]
    fn large_damping_uncouples() {
        // D/C -> infinity: mechanical pulsation -> sqrt(A), electrical -> 0
        let m = ModalCoefficients::new(4.0, 1.0, 0.05, 500.0).unwrap();
        let set = char_roots_p(&m).unwrap();
        let mech_im = set.mechanical.iter().map(|s| s.im.abs()).fold(0.0, f64::max);
        assert_relative_eq!(mech_im, 2.0, max_relative = 1e-4);
        let elec_im = set.electrical.iter().map(|s| s.im.abs()).fold(0.0, f64::max);
        assert!(elec_im < 1e-6);
    }

    #[test]
    fn roots_depend_on_coupling_squared_only() {
        let plus = char_roots_p(&ModalCoefficients::new(1.3, 0.9, 0.2, 0.1).unwrap()).unwrap();
        let minus = char_roots_p(&ModalCoefficients::new(1.3, 0.9, -0.2, 0.1).unwrap()).unwrap();
        for (a, b) in plus.all().iter().zip(minus.all()) {
            assert_eq!(*a, b);
        }
    }

    #[test]
    fn q_decoupled_is_double_pair() {
        let set = char_roots_q(4.0, 0.0, 0.0).unwrap();
        for s in set.all() {
            assert!(s.re.abs() < 1e-10);
            assert_relative_eq!(s.im.abs(), 2.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn q_critical_damping_is_a_double_root_at_half_coupling() {
        // At D = 2C the bounding polynomial factors as (s^2 + C s + A)^2:
        // a double conjugate pair with real part exactly -C/2.
        for (a, c) in [(1.0, 0.05), (4.0, 0.3)] {
            let set = char_roots_q(a, c, 2.0 * c).unwrap();
            for s in set.all() {
                assert_relative_eq!(s.re, -c / 2.0, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn containment_of_q_real_parts_in_p_interval() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
        for _ in 0..1000 {
            let a = rng.random_range(0.1..10.0);
            let d = rng.random_range(0.01..5.0);
            let c = rng.random_range(0.01..1.0);
            let p = char_roots_p(&ModalCoefficients::new(a, a, c, d).unwrap()).unwrap();
            let q = char_roots_q(a, c, d).unwrap();
            let pre: Vec<f64> = p.all().iter().map(|s| s.re).collect();
            let (lo, hi) = (
                pre.iter().copied().fold(f64::INFINITY, f64::min),
                pre.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            );
            for s in q.all() {
                assert!(
                    s.re >= lo - 1e-9 && s.re <= hi + 1e-9,
                    "A={a} C={c} D={d}: Q real part {} outside [{lo}, {hi}]",
                    s.re
                );
            }
        }
    }

    #[test]
    fn sweep_uncoupled_mechanics_stay_undamped() {
        let grid: Vec<f64> = (1..=50).map(|i| i as f64 * 0.01).collect();
        let sweep = damping_sweep(1.0, 1.2, 0.0, &grid).unwrap();
        for roots in &sweep.roots {
            assert!(roots[sweep.mech_branch].re.abs() < 1e-10);
        }
    }

    #[test]
    fn sweep_optimum_near_twice_coupling() {
        for (a, c) in [(1.0, 0.01), (1.0, 0.05), (4.0, 0.1)] {
            let grid: Vec<f64> = (1..=3000).map(|i| i as f64 * (6.0 * c) / 3000.0).collect();
            let sweep = damping_sweep(a, a, c, &grid).unwrap();
            let ratio = sweep.optimal_damping / (2.0 * c);
            assert!(
                (ratio - 1.0).abs() < 0.1,
                "A={a} C={c}: D_opt/2C = {ratio}"
            );
        }
    }

    #[test]
    fn sweep_damping_declines_past_optimum() {
        let c = 0.05;
        let grid: Vec<f64> = (1..=2000).map(|i| i as f64 * (20.0 * c) / 2000.0).collect();
        let sweep = damping_sweep(1.0, 1.0, c, &grid).unwrap();
        let decay: Vec<f64> = sweep
            .roots
            .iter()
            .map(|r| -r[sweep.mech_branch].re)
            .collect();
        let peak = decay.iter().copied().fold(0.0, f64::max);
        assert!(*decay.last().unwrap() < 0.2 * peak);
        // weights: near resonance the low-damping roots are strongly hybrid
        assert!(sweep.coupling_weights[0][sweep.mech_branch] > 0.5);
    }

    #[test]
    fn sweep_rejects_bad_grid() {
        assert!(damping_sweep(1.0, 1.0, 0.1, &[]).is_err());
        assert!(damping_sweep(1.0, 1.0, 0.1, &[0.2, 0.1]).is_err());
    }

    proptest! {
        // Hurwitz stability: every root of P strictly in the left half plane
        // for positive stiffnesses and damping with nonzero coupling.
        #[test]
        fn roots_always_stable(
            a in 0.1f64..10.0,
            b in 0.1f64..10.0,
            c in 0.01f64..1.0,
            d in 0.01f64..5.0,
            flip in proptest::bool::ANY,
        ) {
            let c = if flip { -c } else { c };
            let m = ModalCoefficients::new(a, b, c, d).unwrap();
            let set = char_roots_p(&m).unwrap();
            prop_assert!(set.max_real() < 0.0);
        }
    }
}
