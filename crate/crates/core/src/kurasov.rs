//! Correspondence between couplings and δ-potential strengths `g`, and the
//! interaction matrix `D_U` entering the transfer matrix.

use crate::coupling::{make_coupling, permeability, Coupling, Permeability};
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::real::{r, Cx, Real};
use serde::{Deserialize, Serialize};

/// Tolerance for the singular test and for branch dispatch.
pub const BRANCH_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Strengths<T> {
    Finite { g: [T; 4] },
    Singular { singular: bool },
}

impl<T: Real> Strengths<T> {
    pub fn finite(&self) -> Option<[T; 4]> {
        match *self {
            Strengths::Finite { g } => Some(g),
            Strengths::Singular { .. } => None,
        }
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, Strengths::Singular { .. })
    }
}

/// `Δ = 4 - g0² + g1² + g2² + g3²`.
pub fn delta<T: Real>(g: &[T; 4]) -> T {
    r::<T>(4.0) - g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]
}

/// `g = 2/(sin η - m1) · (cos η, m2, m3, -m0)`, or `Singular` when `sin η = m1`.
pub fn coupling_to_strengths<T: Real>(c: &Coupling<T>) -> Strengths<T> {
    let den = c.eta.sin() - c.m[1];
    if den.abs() <= r(BRANCH_TOL) {
        return Strengths::Singular { singular: true };
    }
    let f = r::<T>(2.0) / den;
    Strengths::Finite { g: [f * c.eta.cos(), f * c.m[2], f * c.m[3], -f * c.m[0]] }
}

/// Inverse of [`coupling_to_strengths`] on finite strengths.
pub fn strengths_to_coupling<T: Real>(g: [T; 4]) -> Result<Coupling<T>> {
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("strengths must be finite".into()));
    }
    let tol: T = r(BRANCH_TOL);
    let four: T = r(4.0);
    let [g0, g1, g2, g3] = g;
    let dl = delta(&g);
    let (eta, m) = if g0.abs() > tol && dl.abs() > tol {
        let eta = (dl / (four * g0)).atan();
        let eta = if eta < T::zero() { eta + T::PI() } else { eta };
        let s = dl.signum() / (r::<T>(16.0) * g0 * g0 + dl * dl).sqrt();
        (eta, [-four * g3 * s, (dl - r(8.0)) * s, four * g1 * s, four * g2 * s])
    } else if g0.abs() <= tol && dl >= four - tol {
        let ss = g1 * g1 + g2 * g2 + g3 * g3;
        let den = four + ss;
        (T::FRAC_PI_2(), [-four * g3 / den, (ss - four) / den, four * g1 / den, four * g2 / den])
    } else if dl.abs() <= tol && g0 * g0 >= four - tol {
        (T::zero(), [-g3 / g0, r::<T>(-2.0) / g0, g1 / g0, g2 / g0])
    } else {
        return Err(Error::NumericalDegeneracy);
    };
    let norm = m.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
    make_coupling(eta, m.map(|x| x / norm))
}

/// `V_g = [[g0+g3, g1-i g2], [g1+i g2, g0-g3]]`.
pub fn delta_matrix<T: Real>(g: [T; 4]) -> Mat2<T> {
    let [g0, g1, g2, g3] = g;
    Mat2::new(Cx::new(g0 + g3, T::zero()), Cx::new(g1, -g2), Cx::new(g1, g2), Cx::new(g0 - g3, T::zero()))
}

/// `D_U = 1/(m1 - i m2) · [[-sin η - m3, i(cos η + m0)], [i(cos η - m0), -sin η + m3]]`.
pub fn interaction_matrix<T: Real>(c: &Coupling<T>) -> Result<Mat2<T>> {
    if permeability(c) == Permeability::Impermeable {
        return Err(Error::ImpermeableCoupling);
    }
    let [m0, m1, m2, m3] = c.m;
    let (s, co) = c.eta.sin_cos();
    let pre = Cx::new(m1, -m2).inv();
    Ok(Mat2::new(
        Cx::new(-s - m3, T::zero()),
        Cx::new(T::zero(), co + m0),
        Cx::new(T::zero(), co - m0),
        Cx::new(-s + m3, T::zero()),
    )
    .scale(pre))
}

/// `Λ = (1/√2)[[1, 1], [1, -1]]`.
pub fn lambda<T: Real>() -> Mat2<T> {
    let h = T::FRAC_1_SQRT_2();
    Mat2::from_real(h, h, h, -h)
}

/// Cayley transform `(V - i)(V + i)^{-1}`.
pub fn cayley<T: Real>(v: &Mat2<T>) -> Option<Mat2<T>> {
    let i = Mat2::identity().scale(Cx::<T>::i());
    Some((*v - i) * (*v + i).inverse()?)
}

/// Inverse Cayley transform `i(1 - U)^{-1}(1 + U)`.
pub fn inverse_cayley<T: Real>(u: &Mat2<T>) -> Option<Mat2<T>> {
    let id = Mat2::identity();
    Some(((id - *u).inverse()? * (id + *u)).scale(Cx::<T>::i()))
}

/// `D_U` evaluated through the Cayley chain `-C(σx Λ C⁻¹(-σx U) Λ)`.
pub fn interaction_matrix_cayley<T: Real>(c: &Coupling<T>) -> Option<Mat2<T>> {
    let sx = Mat2::sigma_x();
    let l = lambda();
    let inner = inverse_cayley(&(-(sx * c.matrix())))?;
    Some(-cayley(&(sx * l * inner * l))?)
}

/// `(2iσx - V_g)^{-1}(2iσx + V_g)`, the interaction matrix in the strength picture.
pub fn interaction_matrix_strengths<T: Real>(g: [T; 4]) -> Option<Mat2<T>> {
    let v = delta_matrix(g);
    let a = Mat2::sigma_x().scale(Cx::new(T::zero(), r(2.0)));
    Some((a - v).inverse()? * (a + v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{family_bdi, family_d};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn upp0() -> Coupling<f64> {
        make_coupling(FRAC_PI_2, [0.0, -1.0, 0.0, 0.0]).unwrap()
    }

    fn upp_pi() -> Coupling<f64> {
        make_coupling(FRAC_PI_2, [0.0, 1.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn forward_examples() {
        let g = coupling_to_strengths(&upp0()).finite().unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-15));
        assert!(coupling_to_strengths(&upp_pi()).is_singular());
        assert!(coupling_to_strengths(&family_d(0.0)).is_singular());
    }

    #[test]
    fn inverse_examples() {
        let c = strengths_to_coupling([0.0; 4]).unwrap();
        assert!(c.approx_eq(&upp0(), 1e-15));
        let c = strengths_to_coupling([2.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(c.eta, 0.0);
        assert_eq!(c.m, [0.0, -1.0, 0.0, 0.0]);
        let c = strengths_to_coupling([0.0, 1.5, 0.0, 0.0]).unwrap();
        let expect = (1.5f64 * 1.5 - 4.0) / (1.5 * 1.5 + 4.0);
        assert!((c.m[1] - expect).abs() < 1e-15);
    }

    #[test]
    fn interaction_examples() {
        assert!(interaction_matrix(&upp0()).unwrap().dist(&Mat2::identity()) < 1e-15);
        assert!(interaction_matrix(&upp_pi()).unwrap().dist(&-Mat2::identity()) < 1e-15);
        assert_eq!(interaction_matrix(&family_d(0.0)), Err(Error::ImpermeableCoupling));
        let d = interaction_matrix(&family_bdi(0.7f64)).unwrap();
        assert!((d.det().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn delta_matrix_examples() {
        assert_eq!(delta_matrix([1.0, 0.0, 0.0, 0.0]), Mat2::identity());
        assert_eq!(delta_matrix([0.0, 0.0, 0.0, 1.0]), Mat2::sigma_z());
    }

    #[test]
    fn impermeable_strengths_map_to_impermeable_couplings() {
        // g1 = 0 and g0² - g2² - g3² = -4
        for (g0, g2) in [(0.0, 0.5), (1.0, 1.0), (3.0, -0.5)] {
            let g3 = (g0 * g0 - g2 * g2 + 4.0f64).sqrt();
            let c = strengths_to_coupling([g0, 0.0, g2, g3]).unwrap();
            assert!(c.m[1].abs() < 1e-12 && c.m[2].abs() < 1e-12, "{c:?}");
        }
    }

    fn coupling() -> impl Strategy<Value = Coupling<f64>> {
        (0.0..PI, prop::array::uniform4(-1.0f64..1.0))
            .prop_filter("nonzero", |(_, v)| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
            .prop_map(|(eta, v)| {
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                make_coupling(eta, v.map(|x| x / n)).unwrap()
            })
    }

    proptest! {
        #[test]
        fn round_trip_from_coupling(c in coupling()) {
            prop_assume!((c.eta.sin() - c.m[1]).abs() > 1e-3);
            let g = coupling_to_strengths(&c).finite().unwrap();
            let back = strengths_to_coupling(g).unwrap();
            prop_assert!((back.eta - c.eta).abs() < 1e-9);
            for j in 0..4 {
                prop_assert!((back.m[j] - c.m[j]).abs() < 1e-9);
            }
        }

        #[test]
        fn round_trip_from_strengths(g in prop::array::uniform4(-5.0f64..5.0)) {
            let c = strengths_to_coupling(g).unwrap();
            let back = coupling_to_strengths(&c).finite().unwrap();
            for j in 0..4 {
                prop_assert!((back[j] - g[j]).abs() < 1e-9 * (1.0 + g[j].abs()));
            }
        }

        #[test]
        fn cayley_consistency(c in coupling()) {
            prop_assume!((c.eta.sin() - c.m[1]).abs() > 1e-3);
            let g = coupling_to_strengths(&c).finite().unwrap();
            let l = lambda();
            let lhs = (l * delta_matrix(g) * l).scale(Cx::new(-0.5, 0.0));
            let ut = -(Mat2::sigma_x() * c.matrix());
            let id = Mat2::identity();
            let rhs = ((id + ut) * (id - ut).inverse().unwrap()).scale(Cx::<f64>::i());
            prop_assert!(lhs.dist(&rhs) < 1e-9 * (1.0 + lhs.max_abs()));
        }

        #[test]
        fn interaction_matrix_forms_agree(c in coupling()) {
            prop_assume!(c.m[1].hypot(c.m[2]) > 1e-2);
            prop_assume!((c.eta.sin() - c.m[1]).abs() > 1e-3);
            let d = interaction_matrix(&c).unwrap();
            let chain = interaction_matrix_cayley(&c).unwrap();
            prop_assert!(d.dist(&chain) < 1e-10 * (1.0 + d.max_abs()));
            let g = coupling_to_strengths(&c).finite().unwrap();
            let dg = interaction_matrix_strengths(g).unwrap();
            prop_assert!(d.dist(&dg) < 1e-9 * (1.0 + d.max_abs()));
            let expect = Cx::new(c.m[1], c.m[2]) / Cx::new(c.m[1], -c.m[2]);
            prop_assert!((d.det() - expect).norm() < 1e-12);
        }
    }
}
