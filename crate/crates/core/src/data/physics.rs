//! Kinematics of individual jet constituents.

use super::{DataError, RawParticle, NUM_FEATURES};

/// Rest masses in GeV, keyed by the absolute PDG id.
const MASS_TABLE: &[(i32, f64)] = &[
    (22, 0.0),                 // photon
    (11, 0.000_510_998_950),   // e±
    (13, 0.105_658_375_5),     // μ±
    (111, 0.134_976_8),        // π⁰
    (211, 0.139_570_39),       // π±
    (130, 0.497_611),          // K_L
    (310, 0.497_611),          // K_S
    (321, 0.493_677),          // K±
    (2112, 0.939_565_420_52),  // n, n̄
    (2212, 0.938_272_088_16),  // p, p̄
];

/// Rest mass for a PDG particle id. Antiparticles share the mass of the
/// particle.
pub fn particle_mass(pdg_id: i32) -> Result<f64, DataError> {
    let key = pdg_id.checked_abs().ok_or(DataError::UnknownPdgId(pdg_id))?;
    MASS_TABLE
        .iter()
        .find(|(id, _)| *id == key)
        .map(|(_, m)| *m)
        .ok_or(DataError::UnknownPdgId(pdg_id))
}

/// `(pT, y, φ, m_T, E, p_x, p_y, p_z)` for a particle of mass `mass`.
pub fn kinematics(pt: f64, y: f64, phi: f64, mass: f64) -> [f64; NUM_FEATURES] {
    let mt = mass.hypot(pt);
    [pt, y, phi, mt, mt * y.cosh(), pt * phi.cos(), pt * phi.sin(), mt * y.sinh()]
}

/// Unscaled node features of one particle, with the mass looked up from its
/// PDG id.
pub fn engineer_features(p: &RawParticle) -> Result<[f64; NUM_FEATURES], DataError> {
    Ok(kinematics(p.pt, p.y, p.phi, particle_mass(p.pdg_id)?))
}

/// Maps an angle into `(−π, π]`.
pub fn wrap_angle(phi: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut w = phi.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}

/// Euclidean separation of two `(φ, y)` points. With `wrap_phi` the azimuthal
/// difference is first mapped into `(−π, π]`.
pub fn delta_r(a: [f64; 2], b: [f64; 2], wrap_phi: bool) -> f64 {
    let mut dphi = a[0] - b[0];
    if wrap_phi {
        dphi = wrap_angle(dphi);
    }
    dphi.hypot(a[1] - b[1])
}
