//! Closed-form half-return maps for the strip systems, their composition
//! into the Poincaré map on Im z = -1, fixed points, and a numeric return
//! map computed by the piecewise integrator as an independent oracle.

use crate::field::{CatalogTag, HolomorphicField};
use crate::geometry::{BoundaryId, PartitionConfig};
use crate::system::{flow, PiecewiseSystem, StopCondition, SystemError, Zone};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoincareError {
    #[error("central field is not one of the supported normal forms (odd powers only)")]
    UnsupportedField,
    #[error("the central orbit through x = {0} does not cross the strip")]
    NoTransit(f64),
    #[error(transparent)]
    Flow(#[from] SystemError),
}

/// Parameters of the strip systems: upper zone `(a+ib)(z - i + x1)`,
/// lower zone `(c+id)(z + i - x0)`, and one of the catalog central fields.
#[derive(Debug, Clone)]
pub struct StripReturnParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub x0: f64,
    pub x1: f64,
    pub central: HolomorphicField,
}

impl StripReturnParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64, x0: f64, x1: f64, central: HolomorphicField) -> Self {
        assert!(a < 0.0 && c < 0.0 && b > 0.0 && d > 0.0, "need a, c < 0 and b, d > 0");
        StripReturnParams { a, b, c, d, x0, x1, central }
    }

    /// The paper's running example: a = c = -1, b = d = 1.
    pub fn contracting(x0: f64, x1: f64, central: HolomorphicField) -> Self {
        Self::new(-1.0, 1.0, -1.0, 1.0, x0, x1, central)
    }

    pub fn upper_field(&self) -> HolomorphicField {
        HolomorphicField::from_catalog(CatalogTag::LinearCenter {
            lambda: Complex64::new(self.a, self.b),
            center: Complex64::new(-self.x1, 1.0),
        })
    }

    pub fn lower_field(&self) -> HolomorphicField {
        HolomorphicField::from_catalog(CatalogTag::LinearCenter {
            lambda: Complex64::new(self.c, self.d),
            center: Complex64::new(self.x0, -1.0),
        })
    }

    pub fn system(&self) -> PiecewiseSystem {
        PiecewiseSystem::new(
            PartitionConfig::strip(),
            self.upper_field(),
            self.central.clone(),
            self.lower_field(),
        )
    }
}

/// Exit x-coordinate on Im z = -1 after the half-turn in the lower zone:
/// entry s - i maps to -(s - x0) e^{c pi/d} + x0.
pub fn half_return_lower(params: &StripReturnParams, s: f64) -> f64 {
    -(s - params.x0) * (params.c * PI / params.d).exp() + params.x0
}

/// Exit x-coordinate on Im z = 1 after the half-turn in the upper zone
/// around -x1 + i: entry u + i maps to -(u + x1) e^{a pi/b} - x1.
pub fn half_return_upper(params: &StripReturnParams, u: f64) -> f64 {
    -(u + params.x1) * (params.a * PI / params.b).exp() - params.x1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitDirection {
    Up,
    Down,
}

/// Central-zone transit: by the x-axis symmetry of the catalog central
/// fields (or H(x,1) = H(x,-1) for iz²/(1+z)) the orbit through (x, ∓1)
/// reaches (x, ±1); the x-coordinate is the identity.
///
/// Even powers are rejected: the symmetry argument needs n odd.
pub fn central_transit(
    central: &HolomorphicField,
    x: f64,
    direction: TransitDirection,
) -> Result<f64, PoincareError> {
    match &central.catalog_tag {
        Some(CatalogTag::LinearCenter { lambda, center })
            if lambda.re == 0.0 && center.norm() == 0.0 => {}
        Some(CatalogTag::Monomial { coeff, n }) if coeff.re == 0.0 => {
            if n % 2 == 0 {
                return Err(PoincareError::UnsupportedField);
            }
        }
        Some(CatalogTag::InversePower { coeff, n }) if coeff.re == 0.0 => {
            if n % 2 == 0 {
                return Err(PoincareError::UnsupportedField);
            }
        }
        Some(CatalogTag::RationalNormal { coeff, n: 2, .. }) if coeff.re == 0.0 => {}
        _ => return Err(PoincareError::UnsupportedField),
    }
    if !transit_exists(central, x, direction) {
        return Err(PoincareError::NoTransit(x));
    }
    Ok(x)
}

/// Numeric check that the central orbit through (x, ∓1) actually reaches
/// the other line (level curves can fold back before crossing the strip).
pub fn transit_exists(central: &HolomorphicField, x: f64, direction: TransitDirection) -> bool {
    let sys = PiecewiseSystem::new(
        PartitionConfig::strip(),
        central.clone(),
        central.clone(),
        central.clone(),
    );
    let (y0, target) = match direction {
        TransitDirection::Up => (-1.0, BoundaryId::First),
        TransitDirection::Down => (1.0, BoundaryId::Second),
    };
    let z0 = Complex64::new(x, y0);
    // a transit is one crossing of the opposite line
    match flow(&sys, z0, StopCondition::MaxCrossings(1)) {
        Ok((traj, _)) => traj
            .events
            .first()
            .map(|e| e.boundary == target && (e.z.re - x).abs() < 1e-5)
            .unwrap_or(false),
        Err(_) => false,
    }
}

/// The affine strip Poincaré map on Im z = -1:
/// `Π(s) = ((s - x0) e^{c π/d} - x0 - x1) e^{a π/b} - x1`.
pub fn poincare_map(params: &StripReturnParams, s: f64) -> f64 {
    let ec = (params.c * PI / params.d).exp();
    let ea = (params.a * PI / params.b).exp();
    ((s - params.x0) * ec - params.x0 - params.x1) * ea - params.x1
}

/// Slope of the affine Poincaré map: `e^{c π/d + a π/b}`.
pub fn poincare_slope(params: &StripReturnParams) -> f64 {
    (params.c * PI / params.d + params.a * PI / params.b).exp()
}

/// The unique fixed point of the Poincaré map:
/// `s* = (-x0 e^{cπ/d + aπ/b} - (x0 + x1) e^{aπ/b} - x1)/(1 - e^{cπ/d + aπ/b})`.
pub fn poincare_fixed_point(params: &StripReturnParams) -> f64 {
    let ea = (params.a * PI / params.b).exp();
    let eca = (params.c * PI / params.d).exp() * ea;
    (-params.x0 * eca - (params.x0 + params.x1) * ea - params.x1) / (1.0 - eca)
}

/// Checks that the fixed-point cycle's two central transits exist.
pub fn fixed_point_admissible(params: &StripReturnParams) -> bool {
    let s = poincare_fixed_point(params);
    let up_x = half_return_lower(params, s);
    transit_exists(&params.central, up_x, TransitDirection::Up)
        && transit_exists(&params.central, s, TransitDirection::Down)
}

/// Full-trajectory return map on Im z = -1 via the piecewise integrator:
/// the x-coordinate of the fourth boundary crossing from (s, -1).
pub fn numeric_poincare(system: &PiecewiseSystem, s: f64) -> Result<f64, PoincareError> {
    let z0 = Complex64::new(s, -1.0);
    let (traj, _) = flow(system, z0, StopCondition::MaxCrossings(4))?;
    let last = traj.events.last().ok_or(PoincareError::NoTransit(s))?;
    if last.boundary != BoundaryId::Second || last.to_zone != Zone::Minus {
        return Err(PoincareError::NoTransit(s));
    }
    Ok(last.z.re)
}
