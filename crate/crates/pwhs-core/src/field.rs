//! Holomorphic vector fields as rational functions, the normal-form catalog,
//! closed-form linear-center flows, and first integrals (level functions).

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

/// Relative tolerance below which a denominator value counts as a pole hit.
pub const POLE_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("denominator vanishes at {0} (pole within tolerance)")]
    PoleEvaluation(Complex64),
    #[error("no closed-form level function for this field")]
    UnsupportedField,
    #[error("point {0} lies in the level function's excluded set")]
    ExclusionPoint(Complex64),
}

/// Evaluate a polynomial with ascending complex coefficients by Horner.
pub fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Magnitude scale of a polynomial evaluation, for relative pole checks.
fn poly_scale(coeffs: &[Complex64], z: Complex64) -> f64 {
    let az = z.norm();
    let mut p = 1.0;
    let mut acc = 0.0;
    for &c in coeffs {
        acc += c.norm() * p;
        p *= az;
    }
    acc
}

/// Derivative coefficients of a polynomial.
pub fn poly_derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

/// Product of two coefficient lists.
pub fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// All complex roots of a polynomial by Durand–Kerner iteration.
///
/// Adequate for the small degrees (≤ 8) appearing in perturbation
/// denominators; used for pole-distance checks, not for solving.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while let Some(last) = c.last() {
        if last.norm() < 1e-300 && c.len() > 1 {
            c.pop();
        } else {
            break;
        }
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return vec![];
    }
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|&x| x / lead).collect();
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.4 + 0.9 * (k as f64 + 1.0), 2.0 * PI * k as f64 / n as f64 + 0.7))
        .collect();
    for _ in 0..200 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let zi = roots[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, &zj) in roots.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            let step = poly_eval(&monic, zi) / denom;
            roots[i] = zi - step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-13 {
            break;
        }
    }
    roots
}

/// Normal-form catalog entries with closed-form flows / first integrals.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogTag {
    /// f(z) = value
    Constant { value: Complex64 },
    /// f(z) = lambda (z - center)
    LinearCenter { lambda: Complex64, center: Complex64 },
    /// f(z) = coeff z^n
    Monomial { coeff: Complex64, n: u32 },
    /// f(z) = coeff z^n / (1 + c z^{n-1}), n >= 2
    RationalNormal { coeff: Complex64, n: u32, c: Complex64 },
    /// f(z) = coeff / z^n
    InversePower { coeff: Complex64, n: u32 },
    /// f(z) = 1 / p(z), ascending coefficients
    ReciprocalPoly { p: Vec<Complex64> },
}

/// A holomorphic (rational) vector field `ż = num(z)/den(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolomorphicField {
    pub numerator: Vec<Complex64>,
    pub denominator: Vec<Complex64>,
    pub catalog_tag: Option<CatalogTag>,
}

impl HolomorphicField {
    pub fn from_rational(numerator: Vec<Complex64>, denominator: Vec<Complex64>) -> Self {
        assert!(
            denominator.iter().any(|c| c.norm() > 0.0),
            "denominator must not be the zero polynomial"
        );
        HolomorphicField { numerator, denominator, catalog_tag: None }
    }

    pub fn from_catalog(tag: CatalogTag) -> Self {
        let one = vec![Complex64::new(1.0, 0.0)];
        let (num, den) = match &tag {
            CatalogTag::Constant { value } => (vec![*value], one),
            CatalogTag::LinearCenter { lambda, center } => {
                (vec![-lambda * center, *lambda], one)
            }
            CatalogTag::Monomial { coeff, n } => {
                let mut num = vec![Complex64::new(0.0, 0.0); *n as usize + 1];
                num[*n as usize] = *coeff;
                (num, one)
            }
            CatalogTag::RationalNormal { coeff, n, c } => {
                assert!(*n >= 2, "RationalNormal requires n >= 2");
                let mut num = vec![Complex64::new(0.0, 0.0); *n as usize + 1];
                num[*n as usize] = *coeff;
                let mut den = vec![Complex64::new(0.0, 0.0); *n as usize];
                den[0] = Complex64::new(1.0, 0.0);
                den[*n as usize - 1] = *c;
                (num, den)
            }
            CatalogTag::InversePower { coeff, n } => {
                let mut den = vec![Complex64::new(0.0, 0.0); *n as usize + 1];
                den[*n as usize] = Complex64::new(1.0, 0.0);
                (vec![*coeff], den)
            }
            CatalogTag::ReciprocalPoly { p } => (one, p.clone()),
        };
        HolomorphicField { numerator: num, denominator: den, catalog_tag: Some(tag) }
    }

    /// The paper's linear center `ż = iz`.
    pub fn iz() -> Self {
        Self::from_catalog(CatalogTag::LinearCenter {
            lambda: Complex64::new(0.0, 1.0),
            center: Complex64::new(0.0, 0.0),
        })
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, FieldError> {
        let den = poly_eval(&self.denominator, z);
        let scale = poly_scale(&self.denominator, z).max(f64::MIN_POSITIVE);
        if den.norm() <= POLE_TOL * scale {
            return Err(FieldError::PoleEvaluation(z));
        }
        Ok(poly_eval(&self.numerator, z) / den)
    }

    /// `|den(z)|` relative to its magnitude scale; small values flag a pole approach.
    pub fn denominator_margin(&self, z: Complex64) -> f64 {
        let den = poly_eval(&self.denominator, z).norm();
        let scale = poly_scale(&self.denominator, z).max(f64::MIN_POSITIVE);
        den / scale
    }

    /// Poles (denominator roots), ignoring those cancelled by the numerator.
    pub fn poles(&self) -> Vec<Complex64> {
        if self.denominator.len() <= 1 {
            return vec![];
        }
        poly_roots(&self.denominator)
            .into_iter()
            .filter(|&r| {
                let num_scale: f64 = self.numerator.iter().map(|c| c.norm()).sum::<f64>().max(1e-300);
                poly_eval(&self.numerator, r).norm() > 1e-9 * num_scale
            })
            .collect()
    }
}

/// Evaluate the field at a point (free-function form of [`HolomorphicField::eval`]).
pub fn eval_field(field: &HolomorphicField, z: Complex64) -> Result<Complex64, FieldError> {
    field.eval(z)
}

/// Exact flow of `ż = lambda (z - center)`: `(z0 - center) e^{lambda t} + center`.
pub fn linear_flow(lambda: Complex64, center: Complex64, z0: Complex64, t: f64) -> Complex64 {
    (z0 - center) * (lambda * t).exp() + center
}

/// Antiderivative specification for `G` with `G' = 1/f`.
///
/// `H = -Im G` is the level function; the decomposition keeps logarithm
/// terms explicit so exclusions and branch behaviour stay visible.
#[derive(Debug, Clone)]
enum GForm {
    /// G(z) = P(z), polynomial with ascending coefficients.
    Polynomial(Vec<Complex64>),
    /// G(z) = P(z) + sum of k_i Log(z - a_i), P polynomial.
    WithLogs { poly: Vec<Complex64>, logs: Vec<(Complex64, Complex64)> },
    /// G(z) = P(1/z) (polynomial in 1/z, constant term first) + k Log z.
    LaurentWithLog { inv_poly: Vec<Complex64>, log_k: Complex64 },
}

/// A first integral `H(x, y)` of a zone field, constant along its orbits.
#[derive(Clone)]
pub struct LevelFunction {
    h: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    grad: Option<Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>>,
    pub domain_exclusions: Vec<Complex64>,
    /// Base points of logarithm/argument terms; H jumps across a cut from
    /// each such point when the log coefficient has nonzero real part.
    pub branch_points: Vec<Complex64>,
}

impl std::fmt::Debug for LevelFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LevelFunction")
            .field("domain_exclusions", &self.domain_exclusions)
            .field("has_closed_gradient", &self.grad.is_some())
            .finish()
    }
}

impl LevelFunction {
    /// Wrap an arbitrary closed-form H (gradient falls back to central differences).
    pub fn from_fn<F>(h: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        LevelFunction { h: Arc::new(h), grad: None, domain_exclusions: vec![], branch_points: vec![] }
    }

    /// Wrap a closed-form H together with its closed-form gradient.
    pub fn with_gradient<F, G>(h: F, grad: G) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
    {
        LevelFunction {
            h: Arc::new(h),
            grad: Some(Arc::new(grad)),
            domain_exclusions: vec![],
            branch_points: vec![],
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.h)(x, y)
    }

    pub fn eval_at(&self, z: Complex64) -> f64 {
        (self.h)(z.re, z.im)
    }

    fn excluded(&self, p: Complex64) -> bool {
        self.domain_exclusions.iter().any(|&e| (p - e).norm() < 1e-12)
    }

    /// Gradient (H_x, H_y): closed form when available, else central
    /// differences with step 1e-6 (1 + |p|).
    pub fn gradient(&self, p: Complex64) -> Result<(f64, f64), FieldError> {
        if self.excluded(p) {
            return Err(FieldError::ExclusionPoint(p));
        }
        if let Some(g) = &self.grad {
            return Ok(g(p.re, p.im));
        }
        let step = 1e-6 * (1.0 + p.norm());
        let hx = ((self.h)(p.re + step, p.im) - (self.h)(p.re - step, p.im)) / (2.0 * step);
        let hy = ((self.h)(p.re, p.im + step) - (self.h)(p.re, p.im - step)) / (2.0 * step);
        Ok((hx, hy))
    }
}

/// Free-function form of [`LevelFunction::gradient`].
pub fn level_gradient(level: &LevelFunction, p: Complex64) -> Result<(f64, f64), FieldError> {
    level.gradient(p)
}

fn eval_g(form: &GForm, z: Complex64) -> Complex64 {
    match form {
        GForm::Polynomial(p) => poly_eval(p, z),
        GForm::WithLogs { poly, logs } => {
            let mut acc = poly_eval(poly, z);
            for &(k, a) in logs {
                acc += k * (z - a).ln();
            }
            acc
        }
        GForm::LaurentWithLog { inv_poly, log_k } => {
            poly_eval(inv_poly, 1.0 / z) + log_k * z.ln()
        }
    }
}

fn level_from_g(form: GForm, exclusions: Vec<Complex64>, branch_points: Vec<Complex64>, field: HolomorphicField) -> LevelFunction {
    let form2 = form.clone();
    let h = move |x: f64, y: f64| -> f64 { -eval_g(&form2, Complex64::new(x, y)).im };
    // H = -Im G  =>  (H_x, H_y) = (-Im G', -Re G') with G' = 1/f.
    let grad = move |x: f64, y: f64| -> (f64, f64) {
        let z = Complex64::new(x, y);
        let num = poly_eval(&field.numerator, z);
        let den = poly_eval(&field.denominator, z);
        let gp = den / num;
        (-gp.im, -gp.re)
    };
    LevelFunction {
        h: Arc::new(h),
        grad: Some(Arc::new(grad)),
        domain_exclusions: exclusions,
        branch_points,
    }
}

/// Closed-form level function `H = -Im G`, `G' = 1/f`, for the catalog.
///
/// Reciprocal-polynomial fields integrate termwise; the remaining normal
/// forms use their closed antiderivatives. Fields outside the catalog with
/// a non-polynomial reciprocal are rejected.
pub fn level_function(field: &HolomorphicField) -> Result<LevelFunction, FieldError> {
    let zero = Complex64::new(0.0, 0.0);
    match &field.catalog_tag {
        Some(CatalogTag::Constant { value }) => {
            if value.norm() == 0.0 {
                return Err(FieldError::UnsupportedField);
            }
            let p = vec![zero, 1.0 / value];
            Ok(level_from_g(GForm::Polynomial(p), vec![], vec![], field.clone()))
        }
        Some(CatalogTag::LinearCenter { lambda, center }) => {
            if lambda.norm() == 0.0 {
                return Err(FieldError::UnsupportedField);
            }
            let k = 1.0 / lambda;
            Ok(level_from_g(
                GForm::WithLogs { poly: vec![], logs: vec![(k, *center)] },
                vec![*center],
                if k.re.abs() > 1e-15 { vec![*center] } else { vec![] },
                field.clone(),
            ))
        }
        Some(CatalogTag::Monomial { coeff, n }) => {
            if coeff.norm() == 0.0 {
                return Err(FieldError::UnsupportedField);
            }
            if *n == 0 {
                return level_function(&HolomorphicField::from_catalog(CatalogTag::Constant {
                    value: *coeff,
                }));
            }
            if *n == 1 {
                return level_function(&HolomorphicField::from_catalog(CatalogTag::LinearCenter {
                    lambda: *coeff,
                    center: zero,
                }));
            }
            // G = z^{1-n} / (coeff (1-n))
            let m = 1.0 - *n as f64;
            let mut inv = vec![zero; *n as usize];
            inv[*n as usize - 1] = 1.0 / (coeff * m);
            Ok(level_from_g(
                GForm::LaurentWithLog { inv_poly: inv, log_k: zero },
                vec![zero],
                vec![],
                field.clone(),
            ))
        }
        Some(CatalogTag::RationalNormal { coeff, n, c }) => {
            // 1/f = (z^{-n} + c z^{-1}) / coeff
            let m = 1.0 - *n as f64;
            let mut inv = vec![zero; *n as usize];
            inv[*n as usize - 1] = 1.0 / (coeff * m);
            let log_k = c / coeff;
            Ok(level_from_g(
                GForm::LaurentWithLog { inv_poly: inv, log_k },
                vec![zero],
                if log_k.re.abs() > 1e-15 { vec![zero] } else { vec![] },
                field.clone(),
            ))
        }
        Some(CatalogTag::InversePower { coeff, n }) => {
            // G = z^{n+1} / (coeff (n+1))
            let mut p = vec![zero; *n as usize + 2];
            p[*n as usize + 1] = 1.0 / (coeff * (*n as f64 + 1.0));
            Ok(level_from_g(GForm::Polynomial(p), vec![], vec![], field.clone()))
        }
        Some(CatalogTag::ReciprocalPoly { p }) => {
            let mut anti = vec![zero; p.len() + 1];
            for (k, &c) in p.iter().enumerate() {
                anti[k + 1] = c / (k as f64 + 1.0);
            }
            Ok(level_from_g(GForm::Polynomial(anti), vec![], vec![], field.clone()))
        }
        None => {
            // Untagged field: supported when 1/f is a polynomial.
            if field.numerator.len() == 1 && field.numerator[0].norm() > 0.0 {
                let k = field.numerator[0];
                let p: Vec<Complex64> = field.denominator.iter().map(|&c| c / k).collect();
                return level_function(&HolomorphicField::from_catalog(CatalogTag::ReciprocalPoly {
                    p,
                }));
            }
            Err(FieldError::UnsupportedField)
        }
    }
}
