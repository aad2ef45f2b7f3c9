//! Eigenspinors of the fiber Hamiltonian and overlaps between neighbouring
//! momenta in the periodic (Zak) gauge `u_k(x) = e^{-ikx} Ψ_k(x)`.
//!
//! On the cell `(-1/2, 1/2)` with the interaction at `x = 0`,
//!
//! ```text
//! Ψ(x) = ξ+ e^{iqx}          + ξ- e^{-iqx}           (x < 0)
//! Ψ(x) = ξ+ e^{i[q(x-1)+k]}  + ξ- e^{-i[q(x-1)-k]}   (x > 0)
//! ```
//!
//! with `ξ± = c± (1, ±q/(ε+m))`.

use crate::coupling::Coupling;
use crate::error::{Error, Result};
use crate::linalg::{inner, Mat2};
use crate::real::{csinc, r, Cx, Real};
use crate::spectral::wavenumber;
use serde::{Deserialize, Serialize};

/// `|ε ∓ m|` below which the plane-wave basis degenerates.
pub const BAND_EDGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct BlochState<T> {
    pub coupling: Coupling<T>,
    pub mass: T,
    pub k: T,
    pub eps: T,
    pub q: Cx<T>,
    pub c_plus: Cx<T>,
    pub c_minus: Cx<T>,
    pub xi_plus: [Cx<T>; 2],
    pub xi_minus: [Cx<T>; 2],
}

/// `q/(ε + m)`.
fn ratio<T: Real>(q: Cx<T>, eps: T, m: T) -> Cx<T> {
    q / (eps + m)
}

/// Analytic coefficients from the first row of the coupling system.
pub fn coefficients<T: Real>(c: &Coupling<T>, k: T, eps: T, m: T) -> (Cx<T>, Cx<T>) {
    let q = wavenumber(eps, m);
    let rq = ratio(q, eps, m);
    let one = Cx::new(T::one(), T::zero());
    let i = Cx::<T>::i();
    let hop = Cx::new(c.m[2], c.m[1]);
    let diag = Cx::from_polar(T::one(), c.eta) * Cx::new(c.m[0], c.m[3]);
    let phase = |sgn: T| (i * (Cx::new(k + c.eta, T::zero()) + q * sgn)).exp();
    let cp = (one + rq) * (one - phase(T::one()) * hop) - (one - rq) * diag;
    let cm = -(one - rq) * (one - phase(-T::one()) * hop) + (one + rq) * diag;
    (cp, cm)
}

/// Boundary values `Ψ±(0)` of the two basis solutions, as the columns of `A_{k,±}`.
fn boundary_matrices<T: Real>(k: T, eps: T, m: T) -> (Mat2<T>, Mat2<T>) {
    let q = wavenumber(eps, m);
    let rq = ratio(q, eps, m);
    let i = Cx::<T>::i();
    let ek = Cx::from_polar(T::one(), k);
    // (φ, χ) at 0- and 0+ for the + and - solutions.
    let plus_l = (Cx::new(T::one(), T::zero()), rq);
    let minus_l = (Cx::new(T::one(), T::zero()), -rq);
    let plus_r = ((-i * q).exp() * ek, rq * (-i * q).exp() * ek);
    let minus_r = ((i * q).exp() * ek, -rq * (i * q).exp() * ek);
    let h = Cx::new(T::FRAC_1_SQRT_2(), T::zero());
    let col = |l: (Cx<T>, Cx<T>), rr: (Cx<T>, Cx<T>), s: T| [(l.0 + l.1 * s) * h, (rr.0 - rr.1 * s) * h];
    let build = |s: T| {
        let a = col(plus_l, plus_r, s);
        let b = col(minus_l, minus_r, s);
        Mat2::new(a[0], b[0], a[1], b[1])
    };
    (build(T::one()), build(-T::one()))
}

/// `M_{U,k}(ε) = A_{k,-} - U A_{k,+}`, whose kernel holds `(c+, c-)`.
pub fn coupling_system<T: Real>(c: &Coupling<T>, k: T, eps: T, m: T) -> Mat2<T> {
    let (ap, am) = boundary_matrices(k, eps, m);
    am - c.matrix() * ap
}

/// Builds the eigenspinor at a root `eps` of the spectral function.
pub fn bloch_state<T: Real>(c: &Coupling<T>, k: T, eps: T, m: T) -> Result<BlochState<T>> {
    let edge: T = r(BAND_EDGE_TOL);
    if (eps - m).abs() <= edge * (T::one() + m) || (eps + m).abs() <= edge * (T::one() + m) {
        return Err(Error::BandEdge(eps.as_f64()));
    }
    let q = wavenumber(eps, m);
    let rq = ratio(q, eps, m);
    let (mut cp, mut cm) = coefficients(c, k, eps, m);
    let tiny: T = r(1e-20);
    if cp.norm_sqr() + cm.norm_sqr() < tiny {
        let sys = coupling_system(c, k, eps, m);
        cp = sys.a[1][1];
        cm = -sys.a[1][0];
        if cp.norm_sqr() + cm.norm_sqr() < tiny {
            return Err(Error::GaugeSingular { k: k.as_f64(), eps: eps.as_f64() });
        }
    }
    Ok(BlochState {
        coupling: *c,
        mass: m,
        k,
        eps,
        q,
        c_plus: cp,
        c_minus: cm,
        xi_plus: [cp, cp * rq],
        xi_minus: [cm, -cm * rq],
    })
}

impl<T: Real> BlochState<T> {
    /// `Ψ(x)`, extended beyond the cell by `Ψ(x + 1) = e^{ik} Ψ(x)`.
    pub fn psi(&self, x: T) -> [Cx<T>; 2] {
        let shift = (x + r(0.5)).floor();
        let y = x - shift;
        let y = if y >= r(0.5) { y - T::one() } else { y };
        let n = (x - y).round();
        let i = Cx::<T>::i();
        let (ep, em) = if y < T::zero() {
            ((i * self.q * y).exp(), (-i * self.q * y).exp())
        } else {
            let ek = Cx::new(T::zero(), self.k);
            ((i * self.q * (y - T::one()) + ek).exp(), (-i * self.q * (y - T::one()) + ek).exp())
        };
        let bloch = Cx::from_polar(T::one(), self.k * n);
        [(self.xi_plus[0] * ep + self.xi_minus[0] * em) * bloch, (self.xi_plus[1] * ep + self.xi_minus[1] * em) * bloch]
    }

    /// Periodic part `u(x) = e^{-ikx} Ψ(x)`.
    pub fn u(&self, x: T) -> [Cx<T>; 2] {
        let ph = Cx::from_polar(T::one(), -self.k * x);
        let p = self.psi(x);
        [p[0] * ph, p[1] * ph]
    }

    /// Boundary values `Ψ±(0) = (φ(0-) ± χ(0-), φ(0+) ∓ χ(0+))/√2`.
    pub fn boundary_values(&self) -> ([Cx<T>; 2], [Cx<T>; 2]) {
        let l = self.limit(false);
        let rr = self.limit(true);
        let h = T::FRAC_1_SQRT_2();
        ([(l[0] + l[1]) * h, (rr[0] - rr[1]) * h], [(l[0] - l[1]) * h, (rr[0] + rr[1]) * h])
    }

    fn limit(&self, right: bool) -> [Cx<T>; 2] {
        let ek = Cx::from_polar(T::one(), self.k);
        if right {
            let i = Cx::<T>::i();
            let (ep, em) = ((-i * self.q).exp() * ek, (i * self.q).exp() * ek);
            [self.xi_plus[0] * ep + self.xi_minus[0] * em, self.xi_plus[1] * ep + self.xi_minus[1] * em]
        } else {
            [self.xi_plus[0] + self.xi_minus[0], self.xi_plus[1] + self.xi_minus[1]]
        }
    }

    /// `‖Ψ‖²` over the unit cell.
    pub fn norm_sqr(&self) -> T {
        overlap(self, self).value.re
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overlap<T> {
    pub value: Cx<T>,
    pub contributions: [Cx<T>; 4],
}

/// `∫ u1† u2 dx` over the unit cell in closed form.
///
/// Each of the four plane-wave pairs contributes `A e^{-iα/2} sinc(α/2)` with
/// `α = ±q2 ∓ q̄1 - Δk`.
pub fn overlap<T: Real>(s1: &BlochState<T>, s2: &BlochState<T>) -> Overlap<T> {
    let dk = Cx::new(s2.k - s1.k, T::zero());
    let q1 = s1.q.conj();
    let q2 = s2.q;
    let terms = [
        (inner(s1.xi_plus, s2.xi_plus), q2 - q1 - dk),
        (inner(s1.xi_minus, s2.xi_plus), q2 + q1 - dk),
        (inner(s1.xi_plus, s2.xi_minus), -q2 - q1 - dk),
        (inner(s1.xi_minus, s2.xi_minus), -q2 + q1 - dk),
    ];
    let half = Cx::new(r::<T>(0.5), T::zero());
    let contributions = terms.map(|(a, al)| {
        let h = al * half;
        a * (-Cx::<T>::i() * h).exp() * csinc(h)
    });
    let value = contributions.iter().fold(Cx::new(T::zero(), T::zero()), |s, &z| s + z);
    Overlap { value, contributions }
}

/// [`overlap`] for consecutive points of an `M`-point Wilson loop.
pub fn zak_gauge_overlap<T: Real>(s1: &BlochState<T>, s2: &BlochState<T>, loop_size: usize) -> Result<Overlap<T>> {
    if s1.coupling != s2.coupling || s1.mass != s2.mass {
        return Err(Error::InvalidInput("states belong to different Hamiltonians".into()));
    }
    let expected = (T::PI() + T::PI()) / T::from_usize(loop_size).unwrap();
    let found = s2.k - s1.k;
    if (found - expected).abs() > r(1e-9) {
        return Err(Error::MomentumMismatch { expected: expected.as_f64(), found: found.as_f64() });
    }
    Ok(overlap(s1, s2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{family_aiii, family_bdi, family_d, make_coupling};
    use crate::spectral::{roots_at_k, spectral_value};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn simpson(f: impl Fn(f64) -> Cx<f64>, a: f64, b: f64, n: usize) -> Cx<f64> {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += f(a + h * i as f64) * w;
        }
        s * (h / 3.0)
    }

    fn quad(s1: &BlochState<f64>, s2: &BlochState<f64>) -> Cx<f64> {
        let f = |x: f64| inner(s1.u(x), s2.u(x));
        simpson(f, -0.5, -1e-300, 5000) + simpson(f, 1e-300, 0.5, 5000)
    }

    fn state(c: &Coupling<f64>, k: f64, idx: usize) -> BlochState<f64> {
        let roots = roots_at_k(c, k, 1.0, (0.0, 12.0), 3000).unwrap();
        bloch_state(c, k, roots[idx], 1.0).unwrap()
    }

    /// `-iσ_y ∂_x Ψ + m σ_z Ψ` in the (φ, χ) component convention.
    fn dirac_residual(s: &BlochState<f64>) -> f64 {
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for j in 1..40 {
            let x = -0.5 + j as f64 / 40.0;
            if x.abs() < 2e-3 {
                continue;
            }
            let p = s.psi(x);
            let (pp, pm) = (s.psi(x + h), s.psi(x - h));
            let d = [(pp[0] - pm[0]) / (2.0 * h), (pp[1] - pm[1]) / (2.0 * h)];
            let i = Cx::<f64>::i();
            let top = -i * d[1] + p[0] * s.mass;
            let bot = -i * d[0] - p[1] * s.mass;
            let n = p[0].norm() + p[1].norm();
            worst = worst.max(((top - p[0] * s.eps).norm() + (bot - p[1] * s.eps).norm()) / n);
        }
        worst
    }

    #[test]
    fn free_crossing_is_gauge_singular() {
        let c = family_bdi(FRAC_PI_2);
        let e = (PI * PI + 1.0).sqrt();
        assert!(spectral_value(&c, 0.0, e, 1.0).abs() < 1e-12);
        assert!(matches!(bloch_state(&c, 0.0, e, 1.0), Err(Error::GaugeSingular { .. })));
        let e = (0.25 + 1.0f64).sqrt();
        let s = bloch_state(&c, 0.5, e, 1.0).unwrap();
        assert!((s.q.re - 0.5).abs() < 1e-12);
        assert!(s.c_plus.norm() + s.c_minus.norm() > 1e-3);
    }

    #[test]
    fn impermeable_coefficients_do_not_depend_on_k() {
        let c = family_d(0.0);
        let e = (PI * PI + 1.0).sqrt();
        let a = coefficients(&c, 0.1, e, 1.0);
        let b = coefficients(&c, 2.3, e, 1.0);
        assert!((a.0 - b.0).norm() < 1e-14 && (a.1 - b.1).norm() < 1e-14);
    }

    #[test]
    fn eigen_equation_and_boundary_conditions() {
        for c in [family_bdi(0.3), family_d(0.7), family_aiii(0.4, 0.5).unwrap()] {
            for k in [-2.0, 0.4, 3.0] {
                let s = state(&c, k, 0);
                assert!(dirac_residual(&s) < 1e-7);
                let (plus, minus) = s.boundary_values();
                let up = c.matrix().apply(plus);
                let scale = plus[0].norm() + plus[1].norm();
                assert!((minus[0] - up[0]).norm() < 1e-9 * scale);
                assert!((minus[1] - up[1]).norm() < 1e-9 * scale);
                let (a, b) = (s.psi(0.5), s.psi(-0.5));
                let ek = Cx::from_polar(1.0, k);
                assert!((a[0] - b[0] * ek).norm() < 1e-9 * scale);
                assert!((a[1] - b[1] * ek).norm() < 1e-9 * scale);
                let sys = coupling_system(&c, k, s.eps, 1.0);
                let v = sys.apply([s.c_plus, s.c_minus]);
                assert!(v[0].norm() + v[1].norm() < 1e-9 * (s.c_plus.norm() + s.c_minus.norm()));
            }
        }
    }

    #[test]
    fn overlap_examples() {
        let c = family_bdi(0.3);
        let s = state(&c, 0.7, 0);
        let o = overlap(&s, &s);
        assert!(o.value.im.abs() < 1e-12 * o.value.re && o.value.re > 0.0);
        assert!((o.value - quad(&s, &s)).norm() < 1e-7 * o.value.re);
        let t = state(&c, 0.7, 1);
        let cross = overlap(&s, &t).value.norm();
        assert!(cross < 1e-9 * (s.norm_sqr() * t.norm_sqr()).sqrt());
        let dk = 2.0 * PI / 256.0;
        let n = state(&c, 0.7 + dk, 0);
        let o = zak_gauge_overlap(&s, &n, 256).unwrap();
        let rel = o.value.norm() / (s.norm_sqr() * n.norm_sqr()).sqrt();
        assert!(rel > 1.0 - 1e-3 && rel <= 1.0 + 1e-12);
        assert!(matches!(zak_gauge_overlap(&s, &n, 128), Err(Error::MomentumMismatch { .. })));
    }

    #[test]
    fn band_edge_rejected() {
        assert!(matches!(bloch_state(&family_bdi(0.3), 0.0, 1.0, 1.0), Err(Error::BandEdge(_))));
    }

    #[test]
    fn flat_band_state_inside_mass_gap() {
        // Impermeable coupling with a flat band at an energy inside (-m, m).
        let c = make_coupling(0.0, [0.0, 0.0, 0.0, 1.0]).unwrap();
        let s = bloch_state(&c, 0.3, 0.0, 1.0).unwrap();
        assert!(s.q.im > 0.0);
        let t = bloch_state(&c, 0.3 + 0.05, 0.0, 1.0).unwrap();
        assert!((overlap(&s, &t).value - quad(&s, &t)).norm() < 1e-7 * s.norm_sqr());
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
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn overlap_matches_quadrature(c in coupling(), k in -PI..PI, dk in -0.3f64..0.3, idx in 0usize..3) {
            let r1 = roots_at_k(&c, k, 1.0, (-8.0, 8.0), 2000).unwrap();
            let r2 = roots_at_k(&c, k + dk, 1.0, (-8.0, 8.0), 2000).unwrap();
            prop_assume!(r1.len() > idx && r2.len() > idx);
            let s1 = bloch_state(&c, k, r1[idx], 1.0);
            let s2 = bloch_state(&c, k + dk, r2[idx], 1.0);
            prop_assume!(s1.is_ok() && s2.is_ok());
            let (s1, s2) = (s1.unwrap(), s2.unwrap());
            let scale = (s1.norm_sqr() * s2.norm_sqr()).sqrt();
            let o = overlap(&s1, &s2);
            prop_assert!((o.value - quad(&s1, &s2)).norm() < 1e-7 * scale);
            let sum = o.contributions.iter().fold(Cx::new(0.0, 0.0), |a, &b| a + b);
            prop_assert_eq!(sum, o.value);
        }
    }
}
