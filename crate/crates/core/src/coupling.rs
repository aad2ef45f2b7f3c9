//! U(2) coupling matrices `U = e^{iη}[[m0+i m3, m2+i m1], [-m2+i m1, m0-i m3]]`,
//! the named one-parameter families and their symmetry classes.

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::real::{r, wrap_positive, Cx, Real};
use serde::{Deserialize, Serialize};

/// Default tolerance for symmetry and permeability tests.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// A point of U(2) with `η ∈ [0, π)` and `|m| = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CouplingSpec<T>", bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct Coupling<T> {
    pub eta: T,
    pub m: [T; 4],
}

/// Either raw parameters or a named family, as accepted on input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CouplingSpec<T> {
    Raw {
        eta: T,
        m: [T; 4],
    },
    Family {
        family: Family,
        theta: T,
        #[serde(default)]
        m2: Option<T>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    D,
    #[serde(rename = "BDI")]
    Bdi,
    #[serde(rename = "AIII")]
    Aiii,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "D" => Ok(Family::D),
            "BDI" => Ok(Family::Bdi),
            "AIII" => Ok(Family::Aiii),
            other => Err(Error::InvalidInput(format!("unknown family {other:?}"))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::D => "D",
            Family::Bdi => "BDI",
            Family::Aiii => "AIII",
        })
    }
}

impl<T: Real> TryFrom<CouplingSpec<T>> for Coupling<T> {
    type Error = Error;
    fn try_from(spec: CouplingSpec<T>) -> Result<Self> {
        match spec {
            CouplingSpec::Raw { eta, m } => make_coupling(eta, m),
            CouplingSpec::Family { family, theta, m2 } => from_family(family, theta, m2.unwrap_or_else(T::zero)),
        }
    }
}

/// Builds a family member after checking `θ ∈ [-π, π)` and `|m2| ≤ 1`.
pub fn from_family<T: Real>(family: Family, theta: T, m2: T) -> Result<Coupling<T>> {
    if !theta.is_finite() || theta < -T::PI() || theta >= T::PI() {
        return Err(Error::InvalidInput("theta out of range".into()));
    }
    match family {
        Family::D => Ok(family_d(theta)),
        Family::Bdi => Ok(family_bdi(theta)),
        Family::Aiii => family_aiii(theta, m2),
    }
}

/// Validates and canonicalizes `(η, m)`.
pub fn make_coupling<T: Real>(eta: T, m: [T; 4]) -> Result<Coupling<T>> {
    if !eta.is_finite() || m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite coupling parameter".into()));
    }
    let norm = m.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
    if norm == T::zero() {
        return Err(Error::InvalidInput("zero-norm m".into()));
    }
    if (norm - T::one()).abs() > r::<T>(1e-9).max(T::epsilon() * r(64.0)) {
        return Err(Error::InvalidInput(format!("|m| = {norm} is not 1")));
    }
    let mut m = m.map(|x| x / norm);
    let two_pi = T::PI() + T::PI();
    let mut eta = wrap_positive(eta, two_pi);
    if eta >= T::PI() {
        eta = eta - T::PI();
        m = m.map(|x| -x);
    }
    if eta >= T::PI() || eta < T::zero() {
        eta = T::zero();
    }
    Ok(Coupling { eta, m })
}

impl<T: Real> Coupling<T> {
    pub fn m0(&self) -> T {
        self.m[0]
    }
    pub fn m1(&self) -> T {
        self.m[1]
    }
    pub fn m2(&self) -> T {
        self.m[2]
    }
    pub fn m3(&self) -> T {
        self.m[3]
    }

    pub fn matrix(&self) -> Mat2<T> {
        coupling_matrix(self)
    }

    /// `√(m1² + m2²)`, the amplitude of the k-dependent part of the spectral function.
    pub fn hopping(&self) -> T {
        self.m[1].hypot(self.m[2])
    }

    /// Extracts `(η, m)` from a unitary matrix via `det U = e^{2iη}`.
    pub fn from_matrix(u: &Mat2<T>) -> Result<Self> {
        let det = u.det();
        if (det.norm() - T::one()).abs() > r(1e-8) {
            return Err(Error::InvalidInput("matrix is not unitary".into()));
        }
        let eta = det.arg() / r(2.0);
        let v = u.scale(Cx::from_polar(T::one(), -eta));
        let m = [v.a[0][0].re, v.a[0][1].im, v.a[0][1].re, v.a[0][0].im];
        make_coupling(eta, m)
    }

    /// Equality of the underlying matrices, so `(η, m)` and `(η+π, -m)` compare equal.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.matrix().dist(&other.matrix()) <= tol
    }
}

pub fn coupling_matrix<T: Real>(c: &Coupling<T>) -> Mat2<T> {
    let [m0, m1, m2, m3] = c.m;
    let ph = Cx::from_polar(T::one(), c.eta);
    Mat2::new(Cx::new(m0, m3), Cx::new(m2, m1), Cx::new(-m2, m1), Cx::new(m0, -m3)).scale(ph)
}

/// `U_C(θ) = [[i cos θ, sin θ], [-sin θ, -i cos θ]]`.
pub fn family_d<T: Real>(theta: T) -> Coupling<T> {
    let (s, c) = theta.sin_cos();
    Coupling { eta: T::zero(), m: [T::zero(), T::zero(), s, c] }
}

/// `U_CS(θ)`: `η = π/2`, `m = (cos θ, sin θ, 0, 0)`.
pub fn family_bdi<T: Real>(theta: T) -> Coupling<T> {
    let (s, c) = theta.sin_cos();
    Coupling { eta: T::FRAC_PI_2(), m: [c, s, T::zero(), T::zero()] }
}

/// `U_S(θ, m2)`: `η = π/2`, `m = (r cos θ, r sin θ, m2, 0)` with `r = √(1 - m2²)`.
pub fn family_aiii<T: Real>(theta: T, m2: T) -> Result<Coupling<T>> {
    if !m2.is_finite() || m2.abs() > T::one() {
        return Err(Error::InvalidInput("m2 out of range [-1, 1]".into()));
    }
    let rad = (T::one() - m2 * m2).max(T::zero()).sqrt();
    let (s, c) = theta.sin_cos();
    Ok(Coupling { eta: T::FRAC_PI_2(), m: [rad * c, rad * s, m2, T::zero()] })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassLabel {
    A,
    AI,
    AIII,
    D,
    BDI,
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryClass {
    pub label: ClassLabel,
    #[serde(rename = "hasT")]
    pub has_t: bool,
    #[serde(rename = "hasC")]
    pub has_c: bool,
    #[serde(rename = "hasS")]
    pub has_s: bool,
}

impl SymmetryClass {
    fn from_flags(has_t: bool, has_c: bool, has_s: bool) -> Self {
        let label = match (has_t, has_c, has_s) {
            (true, true, true) => ClassLabel::BDI,
            (_, true, false) => ClassLabel::D,
            (_, false, true) => ClassLabel::AIII,
            (true, false, false) => ClassLabel::AI,
            (false, false, false) => ClassLabel::A,
            // C and S without T cannot occur for these couplings.
            (false, true, true) => ClassLabel::BDI,
        };
        Self { label, has_t, has_c, has_s }
    }
}

pub fn classify_symmetry<T: Real>(c: &Coupling<T>) -> SymmetryClass {
    classify_symmetry_tol(c, r(SYMMETRY_TOL))
}

pub fn classify_symmetry_tol<T: Real>(c: &Coupling<T>, tol: T) -> SymmetryClass {
    let z = |x: T| x.abs() <= tol;
    let [m0, m1, m2, m3] = c.m;
    let eta0 = z(c.eta) || z(T::PI() - c.eta);
    let eta_half = z(c.eta - T::FRAC_PI_2());
    let has_t = z(m2);
    let has_c = (eta0 && z(m0) && z(m1)) || (eta_half && z(m2) && z(m3));
    let has_s = (eta0 && z(m0) && z(m1) && z(m2)) || (eta_half && z(m3));
    SymmetryClass::from_flags(has_t, has_c, has_s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Permeability {
    Permeable,
    Impermeable,
}

pub fn permeability<T: Real>(c: &Coupling<T>) -> Permeability {
    permeability_tol(c, r(SYMMETRY_TOL))
}

pub fn permeability_tol<T: Real>(c: &Coupling<T>, tol: T) -> Permeability {
    if c.m[1].abs() <= tol && c.m[2].abs() <= tol {
        Permeability::Impermeable
    } else {
        Permeability::Permeable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: &Mat2<f64>, b: &Mat2<f64>) -> bool {
        a.dist(b) < 1e-12
    }

    fn i() -> Cx<f64> {
        Cx::new(0.0, 1.0)
    }

    #[test]
    fn make_coupling_examples() {
        let c = make_coupling(0.0, [1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(close(&c.matrix(), &Mat2::identity()));
        let c = make_coupling(FRAC_PI_2, [0.0, -1.0, 0.0, 0.0]).unwrap();
        assert!(close(&c.matrix(), &Mat2::sigma_x()));
        let c = make_coupling(1.5 * PI, [1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((c.eta - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(c.m, [-1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn make_coupling_rejects() {
        assert!(make_coupling(0.0, [0.0; 4]).is_err());
        assert!(make_coupling(f64::NAN, [1.0, 0.0, 0.0, 0.0]).is_err());
        assert!(make_coupling(0.0, [2.0, 0.0, 0.0, 0.0]).is_err());
        let c = make_coupling(0.0, [1.0 + 5e-10, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(c.m[0], 1.0);
    }

    #[test]
    fn matrix_examples() {
        let c = make_coupling(0.0, [0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(close(&c.matrix(), &Mat2::sigma_z().scale(i())));
        let t = PI / 3.0;
        let ucs = Mat2::new(i() * t.cos(), Cx::new(-t.sin(), 0.0), Cx::new(-t.sin(), 0.0), i() * t.cos());
        assert!(close(&family_bdi(t).matrix(), &ucs));
    }

    #[test]
    fn family_examples() {
        assert!(close(&family_d(0.0).matrix(), &Mat2::sigma_z().scale(i())));
        assert!(close(&family_d(-PI).matrix(), &Mat2::sigma_z().scale(-i())));
        assert!(close(&family_d(FRAC_PI_2).matrix(), &Mat2::from_real(0.0, 1.0, -1.0, 0.0)));
        let upp0 = make_coupling(FRAC_PI_2, [0.0, -1.0, 0.0, 0.0]).unwrap();
        let upp_pi = make_coupling(FRAC_PI_2, [0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(family_bdi(FRAC_PI_2).approx_eq(&upp_pi, 1e-12));
        assert!(family_bdi(-FRAC_PI_2).approx_eq(&upp0, 1e-12));
        assert!(close(&family_bdi(0.0).matrix(), &Mat2::identity().scale(i())));
        for th in [-2.0, 0.0, 1.1] {
            assert!(close(&family_aiii(th, 1.0).unwrap().matrix(), &-Mat2::sigma_y()));
            assert!(close(&family_aiii(th, -1.0).unwrap().matrix(), &Mat2::sigma_y()));
        }
        assert!(close(&family_aiii(0.4, 0.0).unwrap().matrix(), &family_bdi(0.4).matrix()));
        let u = family_aiii(FRAC_PI_2, 0.3).unwrap().matrix();
        assert!(u.a[0][0].norm() < 1e-15 && u.a[1][1].norm() < 1e-15);
        assert!(family_aiii(0.0, 1.5).is_err());
        assert!(from_family(Family::Bdi, 7.0, 0.0).is_err());
    }

    #[test]
    fn classification_examples() {
        let d = classify_symmetry(&family_d(PI / 3.0));
        assert_eq!((d.label, d.has_t, d.has_c, d.has_s), (ClassLabel::D, false, true, false));
        assert_eq!(classify_symmetry(&family_bdi(0.3)).label, ClassLabel::BDI);
        let a = classify_symmetry(&family_aiii(0.3, 0.5).unwrap());
        assert_eq!((a.label, a.has_t, a.has_c, a.has_s), (ClassLabel::AIII, false, false, true));
        assert_eq!(classify_symmetry(&family_d(0.0)).label, ClassLabel::BDI);
        assert_eq!(classify_symmetry(&family_d(-PI)).label, ClassLabel::BDI);
        let generic = make_coupling(0.3, [0.5, 0.5, 0.5, 0.5]).unwrap();
        assert_eq!(classify_symmetry(&generic).label, ClassLabel::A);
        let ai = make_coupling(0.3, [0.6, 0.0, 0.0, 0.8]).unwrap();
        assert_eq!(classify_symmetry(&ai).label, ClassLabel::AI);
    }

    #[test]
    fn permeability_examples() {
        assert_eq!(permeability(&family_d(0.0)), Permeability::Impermeable);
        assert_eq!(permeability(&family_bdi(FRAC_PI_2)), Permeability::Permeable);
        let chiral =
            Mat2::new(Cx::from_polar(1.0, 0.4), Cx::new(0.0, 0.0), Cx::new(0.0, 0.0), Cx::from_polar(1.0, -1.3));
        let c = Coupling::from_matrix(&chiral).unwrap();
        assert!(c.approx_eq(&Coupling::from_matrix(&chiral).unwrap(), 0.0));
        assert!(close(&c.matrix(), &chiral));
        assert_eq!(permeability(&c), Permeability::Impermeable);
    }

    #[test]
    fn json_forms() {
        let c: Coupling<f64> = serde_json::from_str(r#"{"eta": 0.5, "m": [1, 0, 0, 0]}"#).unwrap();
        assert_eq!(c.eta, 0.5);
        let c: Coupling<f64> = serde_json::from_str(r#"{"family": "AIII", "theta": 0.3, "m2": 0.5}"#).unwrap();
        assert!(c.approx_eq(&family_aiii(0.3, 0.5).unwrap(), 1e-15));
        let c: Coupling<f64> = serde_json::from_str(r#"{"family": "D", "theta": 0.3}"#).unwrap();
        assert!(c.approx_eq(&family_d(0.3), 1e-15));
        assert!(serde_json::from_str::<Coupling<f64>>(r#"{"eta": 0, "m": [0,0,0,0]}"#).is_err());
        let back: Coupling<f64> = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn single_precision() {
        let c = family_bdi(0.3f32);
        let u = c.matrix();
        assert!((u * u.adjoint()).dist(&Mat2::identity()) < 1e-6);
        assert_eq!(classify_symmetry_tol(&c, 1e-6).label, ClassLabel::BDI);
    }

    fn unit4() -> impl Strategy<Value = [f64; 4]> {
        prop::array::uniform4(-1.0f64..1.0)
            .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
            .prop_map(|v| {
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.map(|x| x / n)
            })
    }

    proptest! {
        #[test]
        fn unitary(eta in -10.0f64..10.0, m in unit4()) {
            let u = make_coupling(eta, m).unwrap().matrix();
            prop_assert!((u * u.adjoint()).dist(&Mat2::identity()) < 1e-12);
        }

        #[test]
        fn canonical_range(eta in -10.0f64..10.0, m in unit4()) {
            let c = make_coupling(eta, m).unwrap();
            prop_assert!(c.eta >= 0.0 && c.eta < PI);
            let raw = Mat2::new(
                Cx::new(m[0], m[3]), Cx::new(m[2], m[1]),
                Cx::new(-m[2], m[1]), Cx::new(m[0], -m[3]),
            ).scale(Cx::from_polar(1.0, eta));
            prop_assert!(c.matrix().dist(&raw) < 1e-12);
        }

        #[test]
        fn matrix_round_trip(eta in 0.0f64..PI, m in unit4()) {
            let c = make_coupling(eta, m).unwrap();
            let back = Coupling::from_matrix(&c.matrix()).unwrap();
            prop_assert!(back.approx_eq(&c, 1e-12));
        }

        #[test]
        fn aiii_embeds_bdi(theta in -PI..PI) {
            let a = family_aiii(theta, 0.0).unwrap();
            prop_assert!(a.matrix().dist(&family_bdi(theta).matrix()) < 1e-15);
        }

        #[test]
        fn d_family_flags(theta in -PI..PI) {
            let s = classify_symmetry(&family_d(theta));
            prop_assert!(s.has_c);
            let special = theta.sin().abs() <= 1e-10;
            prop_assert_eq!(s.has_s, special);
        }
    }
}
