//! Bulk spectral function, band structures, gaps and zero modes.
//!
//! At quasi-momentum `k` the energies are the zeros of
//! `F(ε) = m1 cos k + m2 sin k + g(ε)` with
//! `g(ε) = cos(q) sin η + sinc(q)(ε cos η - m m0)` and `q² = ε² - m²`.
//! Only `q²` enters, so everything is evaluated through real functions of `s = q²`.

use crate::coupling::{permeability, Coupling, Permeability, SymmetryClass};
use crate::error::{Error, Result};
use crate::real::{cos_sqrt, dsinc_sqrt, r, sinc_sqrt, wrap_angle, Cx, Real};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Tolerance on `|g| - √(m1² + m2²)` deciding band membership.
pub const BAND_TOL: f64 = 1e-12;
/// `|F|` below which an extremum without sign change is a double root.
pub const EVEN_ROOT_TOL: f64 = 1e-12;
/// Default number of ε samples per k column.
pub const DEFAULT_EPS_SCAN: usize = 4000;

/// `q = √(ε² - m²)`, purely imaginary inside the mass gap.
pub fn wavenumber<T: Real>(eps: T, m: T) -> Cx<T> {
    let s = eps * eps - m * m;
    if s >= T::zero() {
        Cx::new(s.sqrt(), T::zero())
    } else {
        Cx::new(T::zero(), (-s).sqrt())
    }
}

/// The k-independent part `g(ε)` of the spectral function.
pub fn gap_function<T: Real>(c: &Coupling<T>, eps: T, m: T) -> T {
    let s = eps * eps - m * m;
    let (sn, cs) = c.eta.sin_cos();
    cos_sqrt(s) * sn + sinc_sqrt(s) * (eps * cs - m * c.m[0])
}

/// `dF/dε`, which equals `g'(ε)` since the k terms are constant in ε.
pub fn spectral_derivative<T: Real>(c: &Coupling<T>, eps: T, m: T) -> T {
    let s = eps * eps - m * m;
    let (sn, cs) = c.eta.sin_cos();
    let two = r::<T>(2.0);
    two * eps * (-sinc_sqrt(s) / two * sn + dsinc_sqrt(s) * (eps * cs - m * c.m[0])) + sinc_sqrt(s) * cs
}

/// `F_{U,k}(ε)`.
pub fn spectral_value<T: Real>(c: &Coupling<T>, k: T, eps: T, m: T) -> T {
    c.m[1] * k.cos() + c.m[2] * k.sin() + gap_function(c, eps, m)
}

/// `det(B_k(ε) - U) = a² - b² + det U - a tr U + b tr(U σ_k)`.
///
/// `a` and `b` are written with `sinc q` in place of `sin q / q`, so the
/// expression is regular at `ε = ±m`.
pub fn spectral_value_matrix_form<T: Real>(c: &Coupling<T>, k: T, eps: T, m: T) -> Cx<T> {
    let s = eps * eps - m * m;
    let (sc, co) = (sinc_sqrt(s), cos_sqrt(s));
    let den = Cx::new(eps * sc, -co);
    let a = Cx::new(m * sc, T::zero()) / den;
    let b = Cx::new(T::zero(), -T::one()) / den;
    let u = c.matrix();
    let tr_us = u.a[0][1] * Cx::from_polar(T::one(), k) + u.a[1][0] * Cx::from_polar(T::one(), -k);
    a * a - b * b + u.det() - a * u.trace() + b * tr_us
}

/// Closed-form band condition `|g(ε)| ≤ √(m1² + m2²)`.
pub fn in_band<T: Real>(c: &Coupling<T>, eps: T, m: T) -> bool {
    band_excess(c, eps, m) <= T::zero()
}

fn band_tol<T: Real>() -> T {
    r::<T>(BAND_TOL).max(T::epsilon() * r(64.0))
}

fn band_excess<T: Real>(c: &Coupling<T>, eps: T, m: T) -> T {
    gap_function(c, eps, m).abs() - c.hopping() - band_tol::<T>()
}

/// Bisection on a bracketed sign change, run to machine resolution.
pub(crate) fn bisect<T: Real>(f: impl Fn(T) -> T, mut a: T, mut b: T) -> T {
    let mut fa = f(a);
    if fa == T::zero() {
        return a;
    }
    for _ in 0..200 {
        let mid = (a + b) / r(2.0);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return mid;
        }
        if (fm < T::zero()) == (fa < T::zero()) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    (a + b) / r(2.0)
}

/// Roots of `f` in `[lo, hi]` from a uniform scan, double roots repeated.
///
/// Cells without a sign change are inspected for an interior extremum of `f`
/// (a sign change of `df`); an extremum with `|f| ≤ even_tol` is a double root
/// and is also returned in the second list.
pub(crate) fn scan_roots<T: Real>(
    f: impl Fn(T) -> T,
    df: impl Fn(T) -> T,
    lo: T,
    hi: T,
    n: usize,
    even_tol: T,
) -> Result<(Vec<T>, Vec<T>)> {
    let step = (hi - lo) / T::from_usize(n - 1).unwrap();
    let xs: Vec<T> = (0..n).map(|i| if i + 1 == n { hi } else { lo + step * T::from_usize(i).unwrap() }).collect();
    let fs: Vec<T> = xs.iter().map(|&x| f(x)).collect();
    if let Some(i) = fs.iter().position(|v| !v.is_finite()) {
        return Err(Error::DegenerateBracketing(xs[i].as_f64()));
    }
    let mut roots = Vec::new();
    let mut touching = Vec::new();
    let mut dprev = df(xs[0]);
    for i in 0..n - 1 {
        let (a, b, fa, fb) = (xs[i], xs[i + 1], fs[i], fs[i + 1]);
        let dnext = df(b);
        if fa == T::zero() {
            roots.push(a);
        } else if fb != T::zero() && (fa < T::zero()) != (fb < T::zero()) {
            roots.push(bisect(&f, a, b));
        } else if fb != T::zero() && (dprev < T::zero()) != (dnext < T::zero()) {
            let x = bisect(&df, a, b);
            let fx = f(x);
            if (fx < T::zero()) != (fa < T::zero()) && fx != T::zero() {
                roots.push(bisect(&f, a, x));
                roots.push(bisect(&f, x, b));
            } else if fx.abs() <= even_tol * (T::one() + x.abs()) {
                roots.push(x);
                roots.push(x);
                touching.push(x);
            }
        }
        dprev = dnext;
    }
    if fs[n - 1] == T::zero() {
        roots.push(xs[n - 1]);
    }
    Ok((roots, touching))
}

/// Energies at a single `k` within `window`, double roots repeated.
pub fn roots_at_k<T: Real>(c: &Coupling<T>, k: T, m: T, window: (T, T), eps_scan: usize) -> Result<Vec<T>> {
    Ok(roots_at_k_detailed(c, k, m, window, eps_scan)?.0)
}

fn roots_at_k_detailed<T: Real>(
    c: &Coupling<T>,
    k: T,
    m: T,
    window: (T, T),
    eps_scan: usize,
) -> Result<(Vec<T>, Vec<T>)> {
    scan_roots(
        |e| spectral_value(c, k, e, m),
        |e| spectral_derivative(c, e, m),
        window.0,
        window.1,
        eps_scan,
        r(EVEN_ROOT_TOL),
    )
}

/// Maximal ε intervals inside `window` satisfying the band condition.
///
/// For impermeable couplings the bands are flat and each interval is a single
/// point `[ε, ε]`.
pub fn band_intervals<T: Real>(c: &Coupling<T>, m: T, window: (T, T), scan: usize) -> Result<Vec<(T, T)>> {
    let (lo, hi) = window;
    if permeability(c) == Permeability::Impermeable {
        let (roots, _) = roots_at_k_detailed(c, T::zero(), m, window, scan)?;
        let mut out: Vec<(T, T)> = Vec::new();
        for x in roots {
            if out.last().is_none_or(|&(_, p)| x > p) {
                out.push((x, x));
            }
        }
        return Ok(out);
    }
    let h = |e: T| band_excess(c, e, m);
    let step = (hi - lo) / T::from_usize(scan - 1).unwrap();
    let mut out = Vec::new();
    let mut prev_e = lo;
    let mut prev_in = h(lo) <= T::zero();
    let mut start = if prev_in { Some(lo) } else { None };
    for i in 1..scan {
        let e = if i + 1 == scan { hi } else { lo + step * T::from_usize(i).unwrap() };
        let now_in = h(e) <= T::zero();
        if now_in != prev_in {
            let edge = bisect(h, prev_e, e);
            if now_in {
                start = Some(edge);
            } else if let Some(s) = start.take() {
                out.push((s, edge));
            }
        }
        prev_e = e;
        prev_in = now_in;
    }
    if let Some(s) = start {
        out.push((s, hi));
    }
    Ok(out)
}

/// `(-(n_max + 1)π - m, (n_max + 1)π + m)`.
pub fn default_window<T: Real>(n_max: u32, m: T) -> (T, T) {
    let w = T::from_u32(n_max + 1).unwrap() * T::PI() + m;
    (-w, w)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap<T> {
    pub lo: T,
    pub hi: T,
    pub below_band: i32,
    pub above_band: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandStructure<T> {
    pub mass: T,
    pub k_grid: Vec<T>,
    /// Band label to energies over `k_grid`. Only bands with a root at every k are kept.
    pub bands: BTreeMap<i32, Vec<T>>,
    pub gaps: Vec<Gap<T>>,
    /// `(k, ε)` points where two bands touch (double roots).
    pub touching: Vec<(T, T)>,
}

impl<T: Real> BandStructure<T> {
    /// Rows `k,n,eps` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        use crate::real::fmt17;
        let mut s = String::from("k,n,eps\n");
        for (n, vals) in &self.bands {
            for (k, e) in self.k_grid.iter().zip(vals) {
                s.push_str(&format!("{},{},{}\n", fmt17(k.as_f64()), n, fmt17(e.as_f64())));
            }
        }
        s
    }

    pub fn gap_between(&self, below: i32, above: i32) -> Option<&Gap<T>> {
        self.gaps.iter().find(|g| g.below_band == below && g.above_band == above)
    }

    pub fn gap_below(&self, n: i32) -> Option<&Gap<T>> {
        self.gaps.iter().find(|g| g.above_band == n)
    }

    pub fn gap_above(&self, n: i32) -> Option<&Gap<T>> {
        self.gaps.iter().find(|g| g.below_band == n)
    }
}

/// Labels a sorted root list around the reference interval `[r_lo, r_hi]`.
///
/// Roots inside the reference interval are centred on 0 (an odd count
/// includes `n = 0`); the rest count outward.
fn label_roots<T: Real>(roots: &[T], r_lo: T, r_hi: T, slack: T) -> Vec<(i32, T)> {
    let below: Vec<T> = roots.iter().copied().filter(|&x| x < r_lo - slack).collect();
    let inside: Vec<T> = roots.iter().copied().filter(|&x| x >= r_lo - slack && x <= r_hi + slack).collect();
    let above: Vec<T> = roots.iter().copied().filter(|&x| x > r_hi + slack).collect();
    let c = inside.len() as i32;
    let base = if c % 2 == 1 { (c - 1) / 2 } else { c / 2 };
    let mut out = Vec::with_capacity(roots.len());
    for (j, &x) in below.iter().rev().enumerate() {
        out.push((-base - 1 - j as i32, x));
    }
    for (j, &x) in inside.iter().enumerate() {
        let j = j as i32;
        let n = if c % 2 == 0 && j >= base { j - base + 1 } else { j - base };
        out.push((n, x));
    }
    for (j, &x) in above.iter().enumerate() {
        out.push((base + 1 + j as i32, x));
    }
    out.sort_by_key(|a| a.0);
    out
}

/// Reference interval: the band interval containing `ε = 0`, or the point 0
/// when zero lies in a gap.
fn reference<T: Real>(intervals: &[(T, T)], slack: T) -> (T, T) {
    intervals
        .iter()
        .copied()
        .find(|&(a, b)| a - slack <= T::zero() && T::zero() <= b + slack)
        .unwrap_or((T::zero(), T::zero()))
}

/// Labels of each band interval, as `(lowest, highest)`, from per-interval branch counts.
fn interval_labels<T: Real>(intervals: &[(T, T)], counts: &[usize], reference: (T, T), slack: T) -> Vec<(i32, i32)> {
    let mut labels = vec![(0, 0); intervals.len()];
    let centre = intervals.iter().position(|&(a, b)| {
        (a - reference.0).abs() <= slack
            && (b - reference.1).abs() <= slack
            && a - slack <= T::zero()
            && T::zero() <= b + slack
    });
    let (base, first_above, last_below) = match centre {
        Some(ci) => {
            let c = counts[ci] as i32;
            let base = if c % 2 == 1 { (c - 1) / 2 } else { c / 2 };
            labels[ci] = if c == 0 { (0, 0) } else { (-base, base) };
            (base, ci + 1, ci as isize - 1)
        }
        None => {
            let first = intervals.iter().position(|&(a, _)| a > T::zero()).unwrap_or(intervals.len());
            (0, first, first as isize - 1)
        }
    };
    let mut next = base + 1;
    for i in first_above..intervals.len() {
        let c = counts[i].max(1) as i32;
        labels[i] = (next, next + c - 1);
        next += c;
    }
    let mut next = -base - 1;
    let mut i = last_below;
    while i >= 0 {
        let c = counts[i as usize].max(1) as i32;
        labels[i as usize] = (next - c + 1, next);
        next -= c;
        i -= 1;
    }
    labels
}

/// Energy bands of `c` over a uniform grid of `k_count` momenta in `[-π, π)`.
pub fn band_structure<T: Real>(
    c: &Coupling<T>,
    m: T,
    k_count: usize,
    eps_window: (T, T),
    eps_scan: usize,
) -> Result<BandStructure<T>> {
    let (lo, hi) = eps_window;
    if !(m > T::zero()) {
        return Err(Error::InvalidInput("mass must be positive".into()));
    }
    if k_count < 2 {
        return Err(Error::InvalidInput("k_count must be at least 2".into()));
    }
    if !(lo < T::zero() && hi > T::zero()) {
        return Err(Error::InvalidInput("energy window must contain 0".into()));
    }
    if eps_scan < 100 {
        return Err(Error::InvalidInput("eps_scan must be at least 100".into()));
    }
    let two_pi = T::PI() + T::PI();
    let k_grid: Vec<T> =
        (0..k_count).map(|i| -T::PI() + two_pi * T::from_usize(i).unwrap() / T::from_usize(k_count).unwrap()).collect();
    let columns: Vec<(Vec<T>, Vec<T>)> =
        k_grid.par_iter().map(|&k| roots_at_k_detailed(c, k, m, eps_window, eps_scan)).collect::<Result<_>>()?;

    let slack: T = r(1e-8);
    let intervals = band_intervals(c, m, eps_window, eps_scan.max(2000))?;
    let refr = reference(&intervals, slack);

    let mut bands: BTreeMap<i32, Vec<Option<T>>> = BTreeMap::new();
    for (ki, (roots, _)) in columns.iter().enumerate() {
        for (n, e) in label_roots(roots, refr.0, refr.1, slack) {
            bands.entry(n).or_insert_with(|| vec![None; k_count])[ki] = Some(e);
        }
    }
    let bands: BTreeMap<i32, Vec<T>> =
        bands.into_iter().filter_map(|(n, v)| v.into_iter().collect::<Option<Vec<T>>>().map(|v| (n, v))).collect();
    if bands.len() < 2 {
        return Err(Error::WindowTooSmall);
    }

    // Branch count per interval: most frequent root count over the k grid.
    let counts: Vec<usize> = intervals
        .iter()
        .map(|&(a, b)| {
            let mut hist = BTreeMap::new();
            for (roots, _) in &columns {
                let cnt = roots.iter().filter(|&&x| x >= a - slack && x <= b + slack).count();
                *hist.entry(cnt).or_insert(0usize) += 1;
            }
            hist.into_iter().max_by_key(|&(cnt, f)| (f, cnt)).map_or(0, |(cnt, _)| cnt)
        })
        .collect();
    let labels = interval_labels(&intervals, &counts, refr, slack);
    let mut gaps = Vec::new();
    for i in 0..intervals.len().saturating_sub(1) {
        let (glo, ghi) = (intervals[i].1, intervals[i + 1].0);
        if ghi > glo {
            gaps.push(Gap { lo: glo, hi: ghi, below_band: labels[i].1, above_band: labels[i + 1].0 });
        }
    }
    if intervals.is_empty() {
        return Err(Error::WindowTooSmall);
    }
    let touching = k_grid.iter().zip(&columns).flat_map(|(&k, (_, t))| t.iter().map(move |&e| (k, e))).collect();
    Ok(BandStructure { mass: m, k_grid, bands, gaps, touching })
}

/// A band interval with the labels of the bands it holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelledInterval<T> {
    pub lo: T,
    pub hi: T,
    pub labels: (i32, i32),
    /// Number of bands sharing the interval (touching bands).
    pub branches: usize,
}

/// Band intervals inside `default_window(n_max, m)` with their labels.
///
/// Branch counts are read off one generic momentum. The first and last
/// entries may be clipped by the window.
pub fn band_table<T: Real>(c: &Coupling<T>, m: T, n_max: u32) -> Result<Vec<LabelledInterval<T>>> {
    let window = default_window(n_max, m);
    let scan = DEFAULT_EPS_SCAN.max(400 * (n_max as usize + 2));
    let slack: T = r(1e-8);
    let intervals = band_intervals(c, m, window, scan)?;
    let refr = reference(&intervals, slack);
    let probe = r::<T>(0.6180339887);
    let roots = roots_at_k(c, probe, m, window, scan)?;
    let counts: Vec<usize> =
        intervals.iter().map(|&(a, b)| roots.iter().filter(|&&x| x >= a - slack && x <= b + slack).count()).collect();
    let labels = interval_labels(&intervals, &counts, refr, slack);
    Ok(intervals
        .iter()
        .zip(labels)
        .zip(counts)
        .map(|((&(lo, hi), labels), branches)| LabelledInterval { lo, hi, labels, branches })
        .collect())
}

/// Gaps between consecutive entries of a [`band_table`].
pub fn gaps_of<T: Real>(table: &[LabelledInterval<T>]) -> Vec<Gap<T>> {
    table
        .windows(2)
        .filter(|w| w[1].lo > w[0].hi)
        .map(|w| Gap { lo: w[0].hi, hi: w[1].lo, below_band: w[0].labels.1, above_band: w[1].labels.0 })
        .collect()
}

/// Energy of band `n` at momentum `k`, found by bisection inside the band's
/// isolated interval.
pub struct BandTracker<T> {
    coupling: Coupling<T>,
    mass: T,
    lo: T,
    hi: T,
    flat: bool,
}

impl<T: Real> BandTracker<T> {
    /// Locates band `n`; fails unless it forms an isolated band interval.
    pub fn new(c: &Coupling<T>, m: T, n: i32) -> Result<Self> {
        let table = band_table(c, m, n.unsigned_abs() + 1)?;
        let i = table.iter().position(|b| b.labels.0 <= n && n <= b.labels.1).ok_or(Error::BandMissing(n))?;
        let b = &table[i];
        if b.branches != 1 || i == 0 || i + 1 == table.len() {
            return Err(Error::BandNotIsolated(n));
        }
        let flat = permeability(c) == Permeability::Impermeable;
        Ok(Self { coupling: *c, mass: m, lo: b.lo, hi: b.hi, flat })
    }

    pub fn interval(&self) -> (T, T) {
        (self.lo, self.hi)
    }

    pub fn energy(&self, k: T) -> T {
        if self.flat {
            return self.lo;
        }
        let f = |e| spectral_value(&self.coupling, k, e, self.mass);
        let pad = (self.hi - self.lo) * r(1e-9) + r(1e-12);
        let (a, b) = (self.lo - pad, self.hi + pad);
        if (f(a) < T::zero()) == (f(b) < T::zero()) {
            // Root on an interval end to within rounding.
            return if f(a).abs() < f(b).abs() { self.lo } else { self.hi };
        }
        bisect(f, a, b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroModeReport<T> {
    pub count: u8,
    pub momenta: Vec<T>,
    #[serde(rename = "G_value")]
    pub g_value: T,
    /// Impermeable coupling with `F(0) ≡ 0`: a flat band at zero energy.
    pub flat_zero_band: bool,
}

/// Zero-energy states: solutions of `m1 cos k + m2 sin k = -G` with
/// `G = cosh(m) sin η - m0 sinh(m)`.
pub fn zero_modes<T: Real>(c: &Coupling<T>, m: T) -> ZeroModeReport<T> {
    zero_modes_tol(c, m, r(1e-10))
}

pub fn zero_modes_tol<T: Real>(c: &Coupling<T>, m: T, tol: T) -> ZeroModeReport<T> {
    let g = m.cosh() * c.eta.sin() - c.m[0] * m.sinh();
    let rr = c.hopping();
    if permeability(c) == Permeability::Impermeable {
        return ZeroModeReport { count: 0, momenta: vec![], g_value: g, flat_zero_band: g.abs() <= tol };
    }
    let phi = c.m[2].atan2(c.m[1]);
    let (count, momenta) = if g.abs() > rr + tol {
        (0, vec![])
    } else if (g.abs() - rr).abs() <= tol {
        let k = if g < T::zero() { phi } else { phi + T::PI() };
        (1, vec![wrap_angle(k)])
    } else {
        let a = (-g / rr).acos();
        let mut ks = vec![wrap_angle(phi - a), wrap_angle(phi + a)];
        ks.sort_by(|x, y| x.partial_cmp(y).unwrap());
        (2, ks)
    };
    ZeroModeReport { count, momenta, g_value: g, flat_zero_band: false }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport<T> {
    /// Max of `|ε_n(k) - ε_n(-k)|`.
    pub time_reversal: Option<T>,
    /// Max of `|ε_n(k) + ε_{-n}(-k)|`.
    pub charge_conjugation: Option<T>,
    /// Max of `|ε_n(k) + ε_{-n}(k)|`.
    pub chiral: Option<T>,
    pub expected: SymmetryClass,
    /// Every relation implied by `expected` holds within tolerance.
    pub consistent: bool,
}

/// Measures the three spectral relations and checks those implied by `sym`.
pub fn check_spectral_symmetries<T: Real>(bands: &BandStructure<T>, sym: &SymmetryClass) -> Result<SymmetryReport<T>> {
    check_spectral_symmetries_tol(bands, sym, r(1e-8))
}

pub fn check_spectral_symmetries_tol<T: Real>(
    bands: &BandStructure<T>,
    sym: &SymmetryClass,
    tol: T,
) -> Result<SymmetryReport<T>> {
    let ks = &bands.k_grid;
    let grid_tol: T = r(1e-9);
    let mirror: Vec<usize> = ks
        .iter()
        .map(|&k| {
            let target = wrap_angle(-k);
            ks.iter().position(|&x| (wrap_angle(x - target)).abs() <= grid_tol).ok_or(Error::GridNotSymmetric)
        })
        .collect::<Result<_>>()?;
    let max_dev = |pair: &dyn Fn(i32) -> Option<i32>, flip_k: bool, sign: T| -> Option<T> {
        let mut worst: Option<T> = None;
        for (&n, vals) in &bands.bands {
            let Some(other) = pair(n).and_then(|p| bands.bands.get(&p)) else { continue };
            for (i, &e) in vals.iter().enumerate() {
                let j = if flip_k { mirror[i] } else { i };
                let d = (e - sign * other[j]).abs();
                worst = Some(worst.map_or(d, |w: T| w.max(d)));
            }
        }
        worst
    };
    let time_reversal = max_dev(&|n| Some(n), true, T::one());
    let charge_conjugation = max_dev(&|n| Some(-n), true, -T::one());
    let chiral = max_dev(&|n| Some(-n), false, -T::one());
    let ok = |flag: bool, v: Option<T>| !flag || v.is_none_or(|d| d <= tol);
    let consistent = ok(sym.has_t, time_reversal) && ok(sym.has_c, charge_conjugation) && ok(sym.has_s, chiral);
    Ok(SymmetryReport { time_reversal, charge_conjugation, chiral, expected: *sym, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{classify_symmetry, family_aiii, family_bdi, family_d, make_coupling};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn wavenumber_examples() {
        assert_eq!(wavenumber(1.0, 1.0), Cx::new(0.0, 0.0));
        assert_eq!(wavenumber(0.0, 1.0), Cx::new(0.0, 1.0));
        assert!((wavenumber(2.0, 1.0).re - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spectral_value_examples() {
        let d0 = family_d(0.0f64);
        for k in [-3.0, 0.0, 1.0] {
            assert!(spectral_value(&d0, k, 0.0, 1.0).abs() < 1e-15);
        }
        let e = (PI * PI + 1.0).sqrt();
        assert!(spectral_value(&d0, 0.3, e, 1.0).abs() < 1e-15);
        let free = family_bdi(FRAC_PI_2);
        for (k, e) in [(0.3f64, 1.7f64), (2.0, 0.4), (-1.0, 5.0)] {
            let q = wavenumber(e, 1.0);
            let expect = k.cos() + q.cos().re;
            assert!((spectral_value(&free, k, e, 1.0) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_form_examples() {
        let free = family_bdi(FRAC_PI_2);
        let q = 0.75 * PI;
        let e = (q * q + 1.0).sqrt();
        assert!(spectral_value(&free, PI / 4.0, e, 1.0).abs() < 1e-12);
        assert!(spectral_value_matrix_form(&free, PI / 4.0, e, 1.0).norm() < 1e-12);
        assert!(spectral_value_matrix_form(&free, 0.2, 1.0, 1.0).is_finite());
    }

    #[test]
    fn flat_band_spectrum() {
        let bs = band_structure(&family_d(0.0), 1.0, 16, default_window(5, 1.0), 4000).unwrap();
        for n in 1..=5 {
            let exact = ((n * n) as f64 * PI * PI + 1.0).sqrt();
            for &e in &bs.bands[&{ n }] {
                assert!((e - exact).abs() < 1e-9);
            }
            for &e in &bs.bands[&-n] {
                assert!((e + exact).abs() < 1e-9);
            }
        }
        assert!(bs.bands[&0].iter().all(|e| e.abs() < 1e-9));
    }

    #[test]
    fn bdi_bands_and_gaps() {
        let bs = band_structure(&family_bdi(0.3), 1.0, 201, (-8.0, 8.0), 4000).unwrap();
        assert_eq!(bs.bands.keys().copied().collect::<Vec<_>>(), vec![-2, -1, 1, 2]);
        let central = bs.gap_between(-1, 1).unwrap();
        assert!(central.lo < 0.0 && central.hi > 0.0);
        assert!(bs.gap_between(1, 2).is_some() && bs.gap_above(2).is_some());
        for g in &bs.gaps {
            for vals in bs.bands.values() {
                assert!(vals.iter().all(|&e| e <= g.lo + 1e-9 || e >= g.hi - 1e-9));
            }
        }
    }

    #[test]
    fn class_d_has_central_band() {
        let bs = band_structure(&family_d(PI / 4.0), 1.0, 64, (-8.0, 8.0), 4000).unwrap();
        assert!(bs.bands.contains_key(&0));
        assert!(bs.gap_between(0, 1).is_some() && bs.gap_between(-1, 0).is_some());
    }

    #[test]
    fn free_dirac_touching() {
        let bs = band_structure(&family_bdi(-FRAC_PI_2), 1.0, 20, (-10.0, 10.0), 2000).unwrap();
        assert!(!bs.touching.is_empty());
        assert_eq!(bs.gaps.len(), 1);
        assert!((bs.gaps[0].lo + 1.0).abs() < 1e-9 && (bs.gaps[0].hi - 1.0).abs() < 1e-9);
    }

    #[test]
    fn window_too_small() {
        let e = band_structure(&family_bdi(0.3), 1.0, 8, (-0.1, 0.1), 200).unwrap_err();
        assert_eq!(e, Error::WindowTooSmall);
    }

    #[test]
    fn zero_mode_examples() {
        assert_eq!(zero_modes(&family_bdi(0.0), 1.0).count, 0);
        let tm = 1f64.tanh().acos();
        let z = zero_modes(&family_bdi(tm), 1.0);
        assert_eq!(z.count, 1);
        assert!((z.momenta[0] + PI).abs() < 1e-12);
        let z = zero_modes(&family_bdi(-tm), 1.0);
        assert_eq!(z.count, 1);
        let z = zero_modes(&family_d(0.0), 1.0);
        assert!(z.flat_zero_band);
        // On the gap-closing locus of the AIII family.
        let m2: f64 = 0.3;
        let th = (1f64.tanh() / (1.0 - m2 * m2).sqrt()).acos();
        assert!(zero_modes(&family_aiii(th, m2).unwrap(), 1.0).count >= 1);
    }

    #[test]
    fn symmetry_relations() {
        let sym = |c: &Coupling<f64>| classify_symmetry(c);
        let c = family_bdi(0.4);
        let bs = band_structure(&c, 1.0, 40, (-8.0, 8.0), 4000).unwrap();
        let rep = check_spectral_symmetries(&bs, &sym(&c)).unwrap();
        assert!(rep.consistent);
        let c = family_aiii(0.4, 0.3).unwrap();
        let bs = band_structure(&c, 1.0, 40, (-8.0, 8.0), 4000).unwrap();
        let rep = check_spectral_symmetries(&bs, &sym(&c)).unwrap();
        assert!(rep.consistent && rep.chiral.unwrap() < 1e-8);
        assert!(rep.time_reversal.unwrap() > 1e-3);
        let c = family_d(0.7);
        let bs = band_structure(&c, 1.0, 40, (-8.0, 8.0), 4000).unwrap();
        let rep = check_spectral_symmetries(&bs, &sym(&c)).unwrap();
        assert!(rep.consistent && rep.charge_conjugation.unwrap() < 1e-8);
        let mut bad = bs.clone();
        bad.k_grid[1] += 0.01;
        assert_eq!(check_spectral_symmetries(&bad, &sym(&c)), Err(Error::GridNotSymmetric));
    }

    #[test]
    fn tracker_matches_scan() {
        let c = family_bdi(0.3);
        let t = BandTracker::new(&c, 1.0, 2).unwrap();
        for k in [-PI, -1.0, 0.0, 2.5] {
            let roots = roots_at_k(&c, k, 1.0, (0.0, 8.0), 4000).unwrap();
            assert!((t.energy(k) - roots[1]).abs() < 1e-10);
        }
        assert_eq!(BandTracker::new(&family_bdi(FRAC_PI_2), 1.0, 1).err(), Some(Error::BandNotIsolated(1)));
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
        fn class_d_specialisation(theta in -PI..PI, k in -PI..PI, e in -6.0f64..6.0) {
            let f = spectral_value(&family_d(theta), k, e, 1.0);
            let expect = theta.sin() * k.sin() + e * sinc_sqrt(e * e - 1.0);
            prop_assert!((f - expect).abs() < 1e-12);
        }

        #[test]
        fn forms_share_zeros(c in coupling(), k in -PI..PI) {
            let roots = roots_at_k(&c, k, 1.0, (-6.0, 6.0), 1000).unwrap();
            for e in roots {
                prop_assert!(spectral_value_matrix_form(&c, k, e, 1.0).norm() < 1e-8);
            }
        }

        #[test]
        fn derivative_matches_difference(c in coupling(), e in -6.0f64..6.0) {
            let h = 1e-6;
            let fd = (gap_function(&c, e + h, 1.0) - gap_function(&c, e - h, 1.0)) / (2.0 * h);
            prop_assert!((spectral_derivative(&c, e, 1.0) - fd).abs() < 1e-6);
        }

        #[test]
        fn roots_satisfy_band_condition(c in coupling(), k in -PI..PI) {
            for e in roots_at_k(&c, k, 1.0, (-6.0, 6.0), 1000).unwrap() {
                prop_assert!(gap_function(&c, e, 1.0).abs() <= c.hopping() + 1e-9);
            }
        }

        #[test]
        fn zero_modes_match_definition(c in coupling()) {
            let z = zero_modes(&c, 1.0);
            for &k in &z.momenta {
                prop_assert!(spectral_value(&c, k, 0.0, 1.0).abs() < 1e-9);
                prop_assert!((-PI..PI).contains(&k));
            }
        }
    }
}
