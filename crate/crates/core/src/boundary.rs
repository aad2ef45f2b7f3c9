//! Half-infinite chain cut at `d ∈ [0, 1)` with the chiral boundary
//! condition of angle `α`: transfer matrices, the boundary spectral function,
//! edge states and the bulk-boundary comparison.

use crate::coupling::{from_family, Coupling, Family};
use crate::error::{Error, Result};
use crate::kurasov::interaction_matrix;
use crate::linalg::{norm2, Mat2};
use crate::real::{cos_sqrt, r, sinc_sqrt, Cx, Real};
use crate::spectral::{band_table, gaps_of, in_band, Gap};
use crate::zak::{translate_phase, zak_phase, DEFAULT_LOOP};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default number of scan points per gap.
pub const DEFAULT_GAP_SCAN: usize = 2000;
/// Acceptance threshold on `|𝓕|`.
pub const EDGE_RESIDUAL: f64 = 1e-8;
/// States closer than this to a gap edge are flagged and not counted.
pub const EDGE_MARGIN: f64 = 1e-6;

/// `P(ε, d) = cos(qd) I + i d sinc(qd) Q(ε)` with `Q = [[0, ε+m], [ε-m, 0]]`.
pub fn propagator<T: Real>(eps: T, m: T, d: T) -> Mat2<T> {
    let s = (eps * eps - m * m) * d * d;
    let (co, sc) = (cos_sqrt(s), d * sinc_sqrt(s));
    Mat2::new(
        Cx::new(co, T::zero()),
        Cx::new(T::zero(), sc * (eps + m)),
        Cx::new(T::zero(), sc * (eps - m)),
        Cx::new(co, T::zero()),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix<T> {
    pub t: Mat2<T>,
    pub eps: T,
    pub d: T,
}

/// `T = P(ε, d) D_U P(ε, 1-d)`, mapping `Ψ((n+d)+)` to `Ψ((n+d+1)+)`.
pub fn transfer_matrix<T: Real>(c: &Coupling<T>, eps: T, m: T, d: T) -> Result<TransferMatrix<T>> {
    let du = interaction_matrix(c)?;
    let t = propagator(eps, m, d) * du * propagator(eps, m, T::one() - d);
    Ok(TransferMatrix { t, eps, d })
}

/// `|tr T| ≤ 2` in closed form; independent of `d`.
pub fn band_condition<T: Real>(c: &Coupling<T>, eps: T, m: T) -> bool {
    in_band(c, eps, m)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSplit<T> {
    pub lambda_minus: Cx<T>,
    pub lambda_plus: Cx<T>,
    /// Right eigenvector of `λ-` (decaying direction).
    pub v_minus: [Cx<T>; 2],
    /// Left eigenvector of `λ+`, unit norm, first nonzero entry real positive.
    pub w_plus: [Cx<T>; 2],
}

/// Picks the larger of two candidate vectors spanning the same line.
fn larger<T: Real>(a: [Cx<T>; 2], b: [Cx<T>; 2]) -> [Cx<T>; 2] {
    if norm2(a) >= norm2(b) {
        a
    } else {
        b
    }
}

/// Eigenvalues ordered by modulus with the decaying right and growing left eigenvectors.
pub fn split_eigenpairs<T: Real>(tm: &TransferMatrix<T>) -> Result<EigenSplit<T>> {
    let t = &tm.t;
    let tr = t.trace();
    let det = t.det();
    let disc = (tr * tr - det * r::<T>(4.0)).sqrt();
    let half = Cx::new(r::<T>(0.5), T::zero());
    let (l1, l2) = ((tr + disc) * half, (tr - disc) * half);
    let (lp, lm) = if l1.norm() >= l2.norm() { (l1, l2) } else { (l2, l1) };
    if lp.norm() - lm.norm() <= r::<T>(1e-9) * lp.norm() {
        return Err(Error::Unimodular(tm.eps.as_f64()));
    }
    let [[a, b], [c, d]] = t.a;
    let v = larger([b, lm - a], [lm - d, c]);
    let w = larger([c, lp - a], [d - lp, -b]);
    let nv = norm2(v);
    let nw = norm2(w);
    let v = v.map(|z| z / nv);
    let w = w.map(|z| z / nw);
    let lead = if w[0].norm() > r::<T>(1e-14) { w[0] } else { w[1] };
    let ph = Cx::from_polar(T::one(), -lead.arg());
    Ok(EigenSplit { lambda_minus: lm, lambda_plus: lp, v_minus: v, w_plus: w.map(|z| z * ph) })
}

/// Boundary vector `(-i cos(α/2), sin(α/2))` of the chiral edge condition.
pub fn boundary_vector<T: Real>(alpha: T) -> [Cx<T>; 2] {
    let h = alpha / r(2.0);
    [Cx::new(T::zero(), -h.cos()), Cx::new(h.sin(), T::zero())]
}

/// `𝓕(ε, d, α) = w+ · (-i cos(α/2), sin(α/2))`, together with `|λ-|`.
pub fn boundary_spectral_value<T: Real>(c: &Coupling<T>, eps: T, m: T, d: T, alpha: T) -> Result<(Cx<T>, T)> {
    let split = split_eigenpairs(&transfer_matrix(c, eps, m, d)?)?;
    let b = boundary_vector(alpha);
    Ok((split.w_plus[0] * b[0] + split.w_plus[1] * b[1], split.lambda_minus.norm()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeState<T> {
    pub eps: T,
    pub gap_id: usize,
    /// `|λ-|` at the state's energy.
    pub decay_rate: T,
    pub residual: T,
    /// Within [`EDGE_MARGIN`] of a gap edge; excluded from counts.
    pub boundary_touching: bool,
}

fn golden_min<T: Real>(f: impl Fn(T) -> T, mut a: T, mut b: T, tol: T) -> T {
    let g = r::<T>(0.6180339887498949);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        x1
    } else {
        x2
    }
}

/// Edge states with energy inside the open gap `(lo, hi)`.
pub fn edge_states<T: Real>(
    c: &Coupling<T>,
    m: T,
    d: T,
    alpha: T,
    gap: (T, T),
    scan: usize,
) -> Result<Vec<EdgeState<T>>> {
    edge_states_in(c, m, d, alpha, gap, 0, scan)
}

fn edge_states_in<T: Real>(
    c: &Coupling<T>,
    m: T,
    d: T,
    alpha: T,
    gap: (T, T),
    gap_id: usize,
    scan: usize,
) -> Result<Vec<EdgeState<T>>> {
    interaction_matrix(c)?;
    let (lo, hi) = gap;
    if !(hi > lo) || scan < 3 {
        return Ok(vec![]);
    }
    let big = T::max_value();
    let f = |e: T| match boundary_spectral_value(c, e, m, d, alpha) {
        Ok((v, _)) => v.norm(),
        Err(_) => big,
    };
    let n = scan;
    let step = (hi - lo) / T::from_usize(n + 1).unwrap();
    let xs: Vec<T> = (1..=n).map(|j| lo + step * T::from_usize(j).unwrap()).collect();
    let vs: Vec<T> = xs.iter().map(|&x| f(x)).collect();
    let tol = r::<T>(1e-13) * (T::one() + hi.abs().max(lo.abs()));
    let margin: T = r(EDGE_MARGIN);
    let mut out: Vec<EdgeState<T>> = Vec::new();
    for j in 0..n {
        let left = if j == 0 { big } else { vs[j - 1] };
        let right = if j + 1 == n { big } else { vs[j + 1] };
        if !(vs[j] <= left && vs[j] < right) {
            continue;
        }
        let a = if j == 0 { lo } else { xs[j - 1] };
        let b = if j + 1 == n { hi } else { xs[j + 1] };
        let x = golden_min(f, a, b, tol);
        let Ok((val, decay)) = boundary_spectral_value(c, x, m, d, alpha) else { continue };
        if val.norm() < r(EDGE_RESIDUAL) && decay < T::one() - r(EDGE_RESIDUAL) {
            if out.iter().any(|s| (s.eps - x).abs() < r(1e-7)) {
                continue;
            }
            let touching = x - lo < margin || hi - x < margin;
            out.push(EdgeState {
                eps: x,
                gap_id,
                decay_rate: decay,
                residual: val.norm(),
                boundary_touching: touching,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapEdges<T> {
    pub gap: Gap<T>,
    pub states: Vec<EdgeState<T>>,
    /// Number of counted (not boundary-touching) states.
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpectrum<T> {
    pub d: T,
    pub alpha: T,
    pub gaps: Vec<GapEdges<T>>,
}

/// Edge states in every gap between bands `-n_max..=n_max`.
pub fn edge_spectrum<T: Real>(
    c: &Coupling<T>,
    m: T,
    d: T,
    alpha: T,
    n_max: u32,
    scan: usize,
) -> Result<EdgeSpectrum<T>> {
    interaction_matrix(c)?;
    let table = band_table(c, m, n_max + 1)?;
    let lim = n_max as i32;
    let gaps: Vec<Gap<T>> =
        gaps_of(&table).into_iter().filter(|g| g.below_band >= -lim && g.above_band <= lim).collect();
    let gaps = gaps
        .into_par_iter()
        .enumerate()
        .map(|(id, gap)| {
            let states = edge_states_in(c, m, d, alpha, (gap.lo, gap.hi), id, scan)?;
            let count = states.iter().filter(|s| !s.boundary_touching).count();
            Ok(GapEdges { gap, states, count })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EdgeSpectrum { d, alpha, gaps })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCounts {
    #[serde(rename = "N_b")]
    pub n_b: usize,
    #[serde(rename = "N_a")]
    pub n_a: usize,
}

/// Edge states below and above band `n`.
///
/// Adjacent mode counts the gap directly below and directly above; cumulative
/// mode sums every gap between bands `-(|n|+1)` and `|n|+1` on each side.
pub fn edge_counts<T: Real>(c: &Coupling<T>, m: T, d: T, alpha: T, n: i32, cumulative: bool) -> Result<EdgeCounts> {
    let spec = edge_spectrum(c, m, d, alpha, n.unsigned_abs() + 1, DEFAULT_GAP_SCAN)?;
    counts_from_spectrum(&spec, n, cumulative)
}

pub fn counts_from_spectrum<T: Real>(spec: &EdgeSpectrum<T>, n: i32, cumulative: bool) -> Result<EdgeCounts> {
    let below = spec.gaps.iter().find(|g| g.gap.above_band == n).ok_or(Error::GapUnresolved(n))?;
    let above = spec.gaps.iter().find(|g| g.gap.below_band == n).ok_or(Error::GapUnresolved(n))?;
    if !cumulative {
        return Ok(EdgeCounts { n_b: below.count, n_a: above.count });
    }
    let n_b = spec.gaps.iter().filter(|g| g.gap.hi <= below.gap.hi).map(|g| g.count).sum();
    let n_a = spec.gaps.iter().filter(|g| g.gap.lo >= above.gap.lo).map(|g| g.count).sum();
    Ok(EdgeCounts { n_b, n_a })
}

/// `s = (-1)^{n+1} sign(n) sign(α) sign(|θ| - π/2)`; zero when any factor vanishes.
pub fn bbc_sign<T: Real>(n: i32, theta: T, alpha: T) -> i32 {
    let sg = |x: T| {
        if x > T::zero() {
            1
        } else if x < T::zero() {
            -1
        } else {
            0
        }
    };
    let parity = if n.rem_euclid(2) == 1 { 1 } else { -1 };
    parity * n.signum() * sg(alpha) * sg(theta.abs() - T::FRAC_PI_2())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BbcRecord<T> {
    pub family: Family,
    pub theta: T,
    pub m2: T,
    pub band: i32,
    pub d: T,
    pub alpha: T,
    pub zak: T,
    pub translated_zak: T,
    #[serde(rename = "N_b")]
    pub n_b: usize,
    #[serde(rename = "N_a")]
    pub n_a: usize,
    pub sign: i32,
    pub verdict: Verdict,
    /// `|N_b - N_a| = Z̃/π` ignoring the sign.
    pub holds_up_to_sign: bool,
    /// Some edge state touched a gap edge and was left out of the counts.
    pub boundary_touching: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BbcOptions<T> {
    pub m_loop: usize,
    pub scan: usize,
    pub cumulative: bool,
    /// Tolerance on `Z̃/π`.
    pub tol: T,
}

impl<T: Real> Default for BbcOptions<T> {
    fn default() -> Self {
        Self { m_loop: DEFAULT_LOOP, scan: DEFAULT_GAP_SCAN, cumulative: false, tol: r(2e-2 / std::f64::consts::PI) }
    }
}

/// Compares `Z̃(d)/π` with `s (N_b - N_a)` for a family member.
#[allow(clippy::too_many_arguments)]
pub fn bbc_verdict<T: Real>(
    family: Family,
    theta: T,
    m2: T,
    m: T,
    n: i32,
    d: T,
    alpha: T,
    opts: &BbcOptions<T>,
) -> Result<BbcRecord<T>> {
    let c = from_family(family, theta, m2)?;
    let z = zak_phase(&c, m, n, opts.m_loop)?;
    let spec = edge_spectrum(&c, m, d, alpha, n.unsigned_abs() + 1, opts.scan)?;
    let counts = counts_from_spectrum(&spec, n, opts.cumulative)?;
    let zt = translate_phase(z.phase, d);
    let two = r::<T>(2.0);
    let mut ratio = zt / T::PI();
    if ratio > two - opts.tol {
        ratio = ratio - two;
    }
    let sign = bbc_sign(n, theta, alpha);
    let diff = counts.n_b as i32 - counts.n_a as i32;
    let close = |target: i32| (ratio - T::from_i32(target).unwrap()).abs() <= opts.tol;
    let verdict = if sign == 0 {
        Verdict::Degenerate
    } else if close(sign * diff) {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    let boundary_touching = spec.gaps.iter().flat_map(|g| &g.states).any(|s| s.boundary_touching);
    Ok(BbcRecord {
        family,
        theta,
        m2,
        band: n,
        d,
        alpha,
        zak: z.phase,
        translated_zak: zt,
        n_b: counts.n_b,
        n_a: counts.n_a,
        sign,
        verdict,
        holds_up_to_sign: close(diff.abs()),
        boundary_touching,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSweepRow<T> {
    pub theta: T,
    pub m2: T,
    pub d: T,
    pub alpha: T,
    /// Gap between bands `below_band` and `above_band`.
    pub below_band: i32,
    pub above_band: i32,
    pub count: Option<usize>,
    pub flags: Vec<String>,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSweepPoint<T> {
    pub theta: T,
    pub m2: T,
    pub d: T,
    pub alpha: T,
}

/// Edge-state counts per grid point for the gaps named by `gaps`, each a
/// `(below_band, above_band)` pair. Rows follow grid order, then gap order.
pub fn edge_sweep<T: Real>(
    family: Family,
    grid: &[EdgeSweepPoint<T>],
    m: T,
    gaps: &[(i32, i32)],
    scan: usize,
) -> Vec<EdgeSweepRow<T>> {
    let n_max = gaps.iter().map(|&(a, b)| a.abs().max(b.abs())).max().unwrap_or(1) as u32;
    grid.par_iter()
        .map(|p| {
            let res = from_family(family, p.theta, p.m2).and_then(|c| edge_spectrum(&c, m, p.d, p.alpha, n_max, scan));
            gaps.iter()
                .map(|&(below, above)| {
                    let mut row = EdgeSweepRow {
                        theta: p.theta,
                        m2: p.m2,
                        d: p.d,
                        alpha: p.alpha,
                        below_band: below,
                        above_band: above,
                        count: None,
                        flags: vec![],
                        error: None,
                    };
                    match &res {
                        Ok(spec) => {
                            match spec.gaps.iter().find(|g| g.gap.below_band == below && g.gap.above_band == above) {
                                Some(g) => {
                                    row.count = Some(g.count);
                                    if g.states.iter().any(|s| s.boundary_touching) {
                                        row.flags.push("boundary_touching".into());
                                    }
                                }
                                None => row.error = Some(Error::GapUnresolved(above).to_string()),
                            }
                        }
                        Err(e) => row.error = Some(e.to_string()),
                    }
                    row
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}
