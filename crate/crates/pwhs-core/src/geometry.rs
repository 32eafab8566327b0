//! Discontinuity geometries (parallel strip, tangent circles), zone
//! classification, and Möbius transformations including the pushforward of
//! rational vector fields.

use crate::field::{poly_mul, HolomorphicField};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("Möbius map is degenerate: |ad - bc| below tolerance")]
    DegenerateMap,
}

/// Image of a point under a Möbius map; the pole maps to infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MoebiusImage {
    Finite(Complex64),
    Infinity,
}

impl MoebiusImage {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            MoebiusImage::Finite(z) => Some(z),
            MoebiusImage::Infinity => None,
        }
    }
}

/// `S(z) = (az + b)/(cz + d)` with `ad - bc != 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MoebiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, GeometryError> {
        let m = MoebiusMap { a, b, c, d };
        if !m.is_nondegenerate() {
            return Err(GeometryError::DegenerateMap);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        MoebiusMap {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    /// `w = -2i/(z-1)`: maps |z|=1 to Im w = 1 and |z-2|=1 to Im w = -1.
    pub fn external_to_strip() -> Self {
        MoebiusMap {
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(0.0, -2.0),
            c: Complex64::new(1.0, 0.0),
            d: Complex64::new(-1.0, 0.0),
        }
    }

    /// `w = -2iz/(z-1)`: maps |z-2/3|=1/3 to Im w = 1 and |z|=1 to Im w = -1.
    pub fn internal_to_strip() -> Self {
        MoebiusMap {
            a: Complex64::new(0.0, -2.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(1.0, 0.0),
            d: Complex64::new(-1.0, 0.0),
        }
    }

    /// `w = (z-2i)/z`: carries the strip onto the externally tangent circles.
    pub fn strip_to_external() -> Self {
        Self::external_to_strip().inverse()
    }

    /// `w = z/(z+2i)`: carries the strip onto the internally tangent circles.
    pub fn strip_to_internal() -> Self {
        Self::internal_to_strip().inverse()
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_nondegenerate(&self) -> bool {
        let scale = self
            .a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm());
        self.determinant().norm() > 1e-12 * scale * scale
    }

    pub fn apply(&self, z: Complex64) -> MoebiusImage {
        let den = self.c * z + self.d;
        let scale = (self.c.norm() * z.norm() + self.d.norm()).max(f64::MIN_POSITIVE);
        if den.norm() <= 1e-14 * scale {
            return MoebiusImage::Infinity;
        }
        MoebiusImage::Finite((self.a * z + self.b) / den)
    }

    /// Standard inverse `(dw - b)/(-cw + a)`.
    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        MoebiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// Derivative `S'(z) = (ad - bc)/(cz + d)^2`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.c * z + self.d;
        self.determinant() / (den * den)
    }
}

/// Free-function form of [`MoebiusMap::apply`].
pub fn moebius_apply(m: &MoebiusMap, z: Complex64) -> MoebiusImage {
    m.apply(z)
}

/// Free-function form of [`MoebiusMap::inverse`].
pub fn moebius_inverse(m: &MoebiusMap) -> MoebiusMap {
    m.inverse()
}

/// Transform `ż = f(z)` by `w = m(z)`:
/// `ẇ = -(cw - a)^2/(bc - ad) · f((b - dw)/(cw - a))`, returned as a
/// cleared rational field in `w`.
pub fn pushforward_field(m: &MoebiusMap, f: &HolomorphicField) -> Result<HolomorphicField, GeometryError> {
    if !m.is_nondegenerate() {
        return Err(GeometryError::DegenerateMap);
    }
    // z = (b - dw)/(cw - a) = p(w)/q(w)
    let p = [m.b, -m.d];
    let q = [-m.a, m.c];
    let deg = f.numerator.len().max(f.denominator.len()) - 1;

    // powers p^k q^{deg-k}
    let mut pk: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0)]];
    let mut qk: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0)]];
    for k in 1..=deg {
        pk.push(poly_mul(&pk[k - 1], &p));
        qk.push(poly_mul(&qk[k - 1], &q));
    }

    let compose = |coeffs: &[Complex64]| -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (k, &ck) in coeffs.iter().enumerate() {
            let term = poly_mul(&pk[k], &qk[deg - k]);
            for (i, &t) in term.iter().enumerate() {
                acc[i] += ck * t;
            }
        }
        acc
    };

    let num_comp = compose(&f.numerator);
    let den_comp = compose(&f.denominator);

    // prefactor: -(cw - a)^2/(bc - ad) = q(w)^2 / (ad - bc)
    let det = m.determinant();
    let q2 = poly_mul(&q, &q);
    let numerator: Vec<Complex64> = poly_mul(&q2, &num_comp).iter().map(|&c| c / det).collect();
    Ok(HolomorphicField::from_rational(numerator, den_comp))
}

/// Which of the two boundary curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryId {
    /// Plus/Central interface (Im z = 1, or the circle bounding the Plus zone).
    First,
    /// Central/Minus interface (Im z = -1, or the circle bounding the Minus zone).
    Second,
}

/// Zone labels of the three-zone partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZoneTag {
    Plus,
    Central,
    Minus,
    Boundary(BoundaryId),
    /// The circles' common point z = 1 (circle kinds only).
    Tangency,
}

/// Interior zone key (usable in maps, unlike the full [`ZoneTag`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZoneKey {
    Plus,
    Central,
    Minus,
}

impl ZoneKey {
    pub fn tag(self) -> ZoneTag {
        match self {
            ZoneKey::Plus => ZoneTag::Plus,
            ZoneKey::Central => ZoneTag::Central,
            ZoneKey::Minus => ZoneTag::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartitionKind {
    ParallelStrip,
    ExternalCircles,
    InternalCircles,
}

/// One of the paper's three discontinuity geometries.
///
/// ParallelStrip: Im z = ±1. ExternalCircles: |z|=1 and |z-2|=1.
/// InternalCircles: |z-2/3|=1/3 and |z|=1. The circle pairs are tangent
/// at z = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionConfig {
    pub kind: PartitionKind,
}

impl PartitionConfig {
    pub fn strip() -> Self {
        PartitionConfig { kind: PartitionKind::ParallelStrip }
    }
    pub fn external_circles() -> Self {
        PartitionConfig { kind: PartitionKind::ExternalCircles }
    }
    pub fn internal_circles() -> Self {
        PartitionConfig { kind: PartitionKind::InternalCircles }
    }

    /// Circle center and radius for a circle-kind boundary.
    pub fn circle(&self, id: BoundaryId) -> Option<(Complex64, f64)> {
        match (self.kind, id) {
            (PartitionKind::ExternalCircles, BoundaryId::First) => {
                Some((Complex64::new(0.0, 0.0), 1.0))
            }
            (PartitionKind::ExternalCircles, BoundaryId::Second) => {
                Some((Complex64::new(2.0, 0.0), 1.0))
            }
            (PartitionKind::InternalCircles, BoundaryId::First) => {
                Some((Complex64::new(2.0 / 3.0, 0.0), 1.0 / 3.0))
            }
            (PartitionKind::InternalCircles, BoundaryId::Second) => {
                Some((Complex64::new(0.0, 0.0), 1.0))
            }
            (PartitionKind::ParallelStrip, _) => None,
        }
    }

    /// Signed boundary function: zero exactly on the boundary.
    ///
    /// Strip: `Im z ∓ 1`; circles: `|z - center| - radius`.
    pub fn boundary_event(&self, id: BoundaryId, z: Complex64) -> f64 {
        match (self.kind, id) {
            (PartitionKind::ParallelStrip, BoundaryId::First) => z.im - 1.0,
            (PartitionKind::ParallelStrip, BoundaryId::Second) => z.im + 1.0,
            _ => {
                let (center, radius) = self.circle(id).unwrap();
                (z - center).norm() - radius
            }
        }
    }

    /// The zone on the `g > 0` side of a boundary.
    pub fn positive_side(&self, id: BoundaryId) -> ZoneTag {
        match (self.kind, id) {
            (PartitionKind::ParallelStrip, BoundaryId::First) => ZoneTag::Plus,
            (PartitionKind::ParallelStrip, BoundaryId::Second) => ZoneTag::Central,
            (_, BoundaryId::First) => ZoneTag::Central,
            (_, BoundaryId::Second) => match self.kind {
                PartitionKind::ExternalCircles => ZoneTag::Central,
                _ => ZoneTag::Minus,
            },
        }
    }

    /// The zone on the `g < 0` side of a boundary.
    pub fn negative_side(&self, id: BoundaryId) -> ZoneTag {
        match self.positive_side(id) {
            ZoneTag::Plus => ZoneTag::Central,
            ZoneTag::Minus => ZoneTag::Central,
            _ => match id {
                BoundaryId::First => ZoneTag::Plus,
                BoundaryId::Second => ZoneTag::Minus,
            },
        }
    }

    /// Classify a point into a zone; points within `tol` of a boundary get
    /// a Boundary tag, and circle kinds report Tangency near z = 1.
    pub fn classify(&self, z: Complex64, tol: f64) -> ZoneTag {
        if self.kind != PartitionKind::ParallelStrip
            && (z - Complex64::new(1.0, 0.0)).norm() <= tol
        {
            return ZoneTag::Tangency;
        }
        let g1 = self.boundary_event(BoundaryId::First, z);
        let g2 = self.boundary_event(BoundaryId::Second, z);
        if g1.abs() <= tol {
            return ZoneTag::Boundary(BoundaryId::First);
        }
        if g2.abs() <= tol {
            return ZoneTag::Boundary(BoundaryId::Second);
        }
        match self.kind {
            PartitionKind::ParallelStrip => {
                if g1 > 0.0 {
                    ZoneTag::Plus
                } else if g2 < 0.0 {
                    ZoneTag::Minus
                } else {
                    ZoneTag::Central
                }
            }
            PartitionKind::ExternalCircles => {
                if g1 < 0.0 {
                    ZoneTag::Plus
                } else if g2 < 0.0 {
                    ZoneTag::Minus
                } else {
                    ZoneTag::Central
                }
            }
            PartitionKind::InternalCircles => {
                if g1 < 0.0 {
                    ZoneTag::Plus
                } else if g2 > 0.0 {
                    ZoneTag::Minus
                } else {
                    ZoneTag::Central
                }
            }
        }
    }
}

/// Free-function form of [`PartitionConfig::classify`].
pub fn classify(config: &PartitionConfig, z: Complex64, tol: f64) -> ZoneTag {
    config.classify(z, tol)
}

/// Free-function form of [`PartitionConfig::boundary_event`].
pub fn boundary_event_function(
    config: &PartitionConfig,
    id: BoundaryId,
) -> impl Fn(Complex64) -> f64 + '_ {
    move |z| config.boundary_event(id, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CatalogTag;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn apply_canonical_maps() {
        // w = -2i/(z-1) sends -1 to i (on Im w = 1)
        let m = MoebiusMap::external_to_strip();
        let w = m.apply(c(-1.0, 0.0)).finite().unwrap();
        assert_relative_eq!(w.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(w.im, 1.0, epsilon = 1e-15);
        // tangency point goes to infinity
        assert_eq!(m.apply(c(1.0, 0.0)), MoebiusImage::Infinity);
        // identity
        let id = MoebiusMap::identity();
        assert_eq!(id.apply(c(0.3, 0.7)).finite().unwrap(), c(0.3, 0.7));
        // w = -2iz/(z-1) fixes the origin
        let m = MoebiusMap::internal_to_strip();
        assert_eq!(m.apply(c(0.0, 0.0)).finite().unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn inverse_round_trip() {
        let m = MoebiusMap::external_to_strip();
        let inv = m.inverse();
        let z = inv.apply(c(0.0, 1.0)).finite().unwrap();
        assert_relative_eq!(z.re, -1.0, epsilon = 1e-14);
        assert_relative_eq!(z.im, 0.0, epsilon = 1e-14);
        assert_eq!(MoebiusMap::identity().inverse().apply(c(2.0, 3.0)).finite().unwrap(), c(2.0, 3.0));
    }

    #[test]
    fn boundary_image_property() {
        // -2i/(z-1): |z|=1 -> Im w = 1, |z-2|=1 -> Im w = -1
        let m = MoebiusMap::external_to_strip();
        for k in 1..200 {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 201.0;
            let z = Complex64::from_polar(1.0, t);
            if (z - c(1.0, 0.0)).norm() < 1e-3 {
                continue;
            }
            let w = m.apply(z).finite().unwrap();
            assert_relative_eq!(w.im, 1.0, epsilon = 1e-10);
            let z2 = c(2.0, 0.0) + Complex64::from_polar(1.0, t);
            if (z2 - c(1.0, 0.0)).norm() < 1e-3 {
                continue;
            }
            let w2 = m.apply(z2).finite().unwrap();
            assert_relative_eq!(w2.im, -1.0, epsilon = 1e-10);
        }
        // -2iz/(z-1): |z-2/3|=1/3 -> Im w = 1, |z|=1 -> Im w = -1
        let m = MoebiusMap::internal_to_strip();
        for k in 1..200 {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 201.0;
            let z = c(2.0 / 3.0, 0.0) + Complex64::from_polar(1.0 / 3.0, t);
            if (z - c(1.0, 0.0)).norm() < 1e-3 {
                continue;
            }
            let w = m.apply(z).finite().unwrap();
            assert_relative_eq!(w.im, 1.0, epsilon = 1e-10);
            let z2 = Complex64::from_polar(1.0, t);
            if (z2 - c(1.0, 0.0)).norm() < 1e-3 {
                continue;
            }
            let w2 = m.apply(z2).finite().unwrap();
            assert_relative_eq!(w2.im, -1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn pushforward_iz_matches_corollary() {
        // w = (z-2i)/z applied to ż = iz gives ẇ = -i(w-1)
        let m = MoebiusMap::strip_to_external();
        let f = HolomorphicField::iz();
        let g = pushforward_field(&m, &f).unwrap();
        for k in 0..10 {
            let w = Complex64::from_polar(0.4 + 0.2 * k as f64, 0.77 * k as f64);
            let expect = -Complex64::i() * (w - 1.0);
            let v = g.eval(w).unwrap();
            assert_relative_eq!(v.re, expect.re, epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(v.im, expect.im, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn pushforward_identity_keeps_field() {
        let f = HolomorphicField::from_catalog(CatalogTag::RationalNormal {
            coeff: c(0.0, 1.0),
            n: 2,
            c: c(1.0, 0.0),
        });
        let g = pushforward_field(&MoebiusMap::identity(), &f).unwrap();
        for k in 0..6 {
            let z = Complex64::from_polar(0.5 + 0.4 * k as f64, 1.1 * k as f64);
            let a = f.eval(z).unwrap();
            let b = g.eval(z).unwrap();
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(a.im, b.im, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn pushforward_chain_rule_oracle() {
        // |pushforward(w) - m'(m^{-1}(w)) f(m^{-1}(w))| small at random points
        let m = MoebiusMap::new(c(1.0, 0.5), c(-0.3, 0.2), c(0.1, -0.4), c(0.9, 0.0)).unwrap();
        let f = HolomorphicField::from_catalog(CatalogTag::Monomial { coeff: c(0.0, 1.0), n: 3 });
        let g = pushforward_field(&m, &f).unwrap();
        let inv = m.inverse();
        for k in 0..20 {
            let w = Complex64::from_polar(0.3 + 0.17 * k as f64, 0.63 * k as f64 + 0.2);
            let z = match inv.apply(w) {
                MoebiusImage::Finite(z) => z,
                MoebiusImage::Infinity => continue,
            };
            let expect = m.derivative(z) * f.eval(z).unwrap();
            let got = g.eval(w).unwrap();
            assert!((got - expect).norm() <= 1e-10 * (1.0 + expect.norm()));
        }
    }

    #[test]
    fn pushforward_functoriality() {
        let m1 = MoebiusMap::external_to_strip();
        let m2 = MoebiusMap::new(c(1.0, 0.0), c(0.0, -2.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let f = HolomorphicField::iz();
        let direct = pushforward_field(&m2.compose(&m1), &f).unwrap();
        let step = pushforward_field(&m2, &pushforward_field(&m1, &f).unwrap()).unwrap();
        for k in 0..20 {
            let w = Complex64::from_polar(0.5 + 0.23 * k as f64, 0.41 * k as f64);
            let (Ok(a), Ok(b)) = (direct.eval(w), step.eval(w)) else { continue };
            assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn classify_examples() {
        let tol = 1e-9;
        assert_eq!(PartitionConfig::strip().classify(c(0.0, 2.0), tol), ZoneTag::Plus);
        assert_eq!(
            PartitionConfig::external_circles().classify(c(0.5, 0.0), tol),
            ZoneTag::Plus
        );
        assert_eq!(
            PartitionConfig::internal_circles().classify(c(-2.0, 0.0), tol),
            ZoneTag::Minus
        );
        assert_eq!(PartitionConfig::strip().classify(c(4.0, 0.0), tol), ZoneTag::Central);
        assert_eq!(
            PartitionConfig::strip().classify(c(3.0, 1.0), tol),
            ZoneTag::Boundary(BoundaryId::First)
        );
        assert_eq!(
            PartitionConfig::external_circles().classify(c(1.0, 0.0), tol),
            ZoneTag::Tangency
        );
        assert_eq!(
            PartitionConfig::internal_circles().classify(c(0.2, 0.0), tol),
            ZoneTag::Central
        );
    }

    #[test]
    fn boundary_event_examples() {
        let strip = PartitionConfig::strip();
        assert_relative_eq!(strip.boundary_event(BoundaryId::First, c(3.0, 2.0)), 1.0);
        let ext = PartitionConfig::external_circles();
        assert_relative_eq!(ext.boundary_event(BoundaryId::First, c(2.0, 0.0)), 1.0);
        let int = PartitionConfig::internal_circles();
        assert_relative_eq!(
            int.boundary_event(BoundaryId::First, c(2.0 / 3.0, 0.0)),
            -1.0 / 3.0
        );
    }

    #[test]
    fn zone_dictionary_under_canonical_maps() {
        // strip -> external via (z-2i)/z and strip -> internal via z/(z+2i)
        // preserve zone tags; circle -> strip maps likewise.
        let strip = PartitionConfig::strip();
        let ext = PartitionConfig::external_circles();
        let int = PartitionConfig::internal_circles();
        let to_ext = MoebiusMap::strip_to_external();
        let to_int = MoebiusMap::strip_to_internal();
        let mut n = 0u32;
        for i in 0..25 {
            for j in 0..20 {
                let z = c(-5.0 + 0.41 * i as f64, -5.0 + 0.5 * j as f64);
                let tag = strip.classify(z, 1e-9);
                if !matches!(tag, ZoneTag::Plus | ZoneTag::Central | ZoneTag::Minus) {
                    continue;
                }
                if let MoebiusImage::Finite(w) = to_ext.apply(z) {
                    let wt = ext.classify(w, 1e-9);
                    if matches!(wt, ZoneTag::Plus | ZoneTag::Central | ZoneTag::Minus) {
                        assert_eq!(wt, tag, "external image mismatch at {z}");
                        n += 1;
                    }
                }
                if let MoebiusImage::Finite(w) = to_int.apply(z) {
                    let wt = int.classify(w, 1e-9);
                    if matches!(wt, ZoneTag::Plus | ZoneTag::Central | ZoneTag::Minus) {
                        assert_eq!(wt, tag, "internal image mismatch at {z}");
                        n += 1;
                    }
                }
            }
        }
        assert!(n > 500);
    }
}
