//! Zak phases from the discretized Wilson loop
//! `Z = -Σ arg S_i`, with `S_i` the overlap of neighbouring periodic parts
//! on `k_i = -π + 2πi/M`.

use crate::bloch::{bloch_state, overlap, BlochState};
use crate::coupling::{from_family, permeability, Coupling, Family, Permeability};
use crate::error::{Error, Result};
use crate::real::{r, wrap_angle, wrap_positive, Cx, Real};
use crate::spectral::BandTracker;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_LOOP: usize = 2048;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZakResult<T> {
    /// Phase in `[0, 2π)`.
    pub phase: T,
    #[serde(rename = "M")]
    pub m_loop: usize,
    pub band: i32,
    /// Circular distance between the phases from the `M` and `M/2` loops.
    pub convergence: T,
    /// The band is flat (impermeable coupling).
    pub flat_band: bool,
    /// The grid was shifted by half a step after a gauge failure.
    pub shifted_grid: bool,
}

/// Circular distance on `[0, 2π)`.
pub fn phase_distance<T: Real>(a: T, b: T) -> T {
    wrap_angle(a - b).abs()
}

fn loop_states<T: Real>(
    c: &Coupling<T>,
    m: T,
    tracker: &BandTracker<T>,
    m_loop: usize,
    offset: T,
) -> Result<Vec<BlochState<T>>> {
    let two_pi = T::PI() + T::PI();
    let mf = T::from_usize(m_loop).unwrap();
    (0..=m_loop)
        .into_par_iter()
        .map(|i| {
            let k = -T::PI() + two_pi * T::from_usize(i).unwrap() / mf + offset;
            bloch_state(c, k, tracker.energy(k), m)
        })
        .collect()
}

/// `-Σ arg(e^{iΔk s} S_i)` over consecutive states taken every `stride` points.
fn wilson_phase<T: Real>(states: &[BlochState<T>], stride: usize, cell_shift: T) -> Result<T> {
    let mut total = T::zero();
    let mut i = 0;
    while i + stride < states.len() {
        let (a, b) = (&states[i], &states[i + stride]);
        let s = overlap(a, b).value;
        let scale = (a.norm_sqr() * b.norm_sqr()).sqrt();
        if !(s.norm() > r::<T>(1e-10) * scale) {
            return Err(Error::GaugeSingular { k: a.k.as_f64(), eps: a.eps.as_f64() });
        }
        let s = s * Cx::from_polar(T::one(), (b.k - a.k) * cell_shift);
        total = total - s.arg();
        i += stride;
    }
    Ok(wrap_positive(total, T::PI() + T::PI()))
}

/// Zak phase of band `n` for the unit cell cut at `d` (`d = 1/2` is the
/// symmetric cell), with the cell shift `1/2 - d` applied to the states.
pub fn zak_phase_cell<T: Real>(c: &Coupling<T>, m: T, band: i32, m_loop: usize, d: T) -> Result<ZakResult<T>> {
    if m_loop < 2 || m_loop % 2 == 1 {
        return Err(Error::InvalidInput("loop size must be even".into()));
    }
    let tracker = BandTracker::new(c, m, band)?;
    let shift = r::<T>(0.5) - d;
    let attempt = |offset: T| -> Result<(T, T)> {
        let states = loop_states(c, m, &tracker, m_loop, offset)?;
        let full = wilson_phase(&states, 1, shift)?;
        let half = wilson_phase(&states, 2, shift)?;
        Ok((full, phase_distance(full, half)))
    };
    let (result, shifted) = match attempt(T::zero()) {
        Ok(v) => (v, false),
        Err(Error::GaugeSingular { .. }) | Err(Error::BandEdge(_)) => {
            (attempt(T::PI() / T::from_usize(m_loop).unwrap())?, true)
        }
        Err(e) => return Err(e),
    };
    Ok(ZakResult {
        phase: result.0,
        m_loop,
        band,
        convergence: result.1,
        flat_band: permeability(c) == Permeability::Impermeable,
        shifted_grid: shifted,
    })
}

/// Zak phase of band `n` on an `M`-point loop.
pub fn zak_phase<T: Real>(c: &Coupling<T>, m: T, band: i32, m_loop: usize) -> Result<ZakResult<T>> {
    zak_phase_cell(c, m, band, m_loop, r(0.5))
}

/// `Z̃(d) = Z - π(1 - 2d)` reduced to `[0, 2π)`.
pub fn translated_zak<T: Real>(z: &ZakResult<T>, d: T) -> T {
    translate_phase(z.phase, d)
}

pub fn translate_phase<T: Real>(phase: T, d: T) -> T {
    wrap_positive(phase - T::PI() * (T::one() - d - d), T::PI() + T::PI())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint<T> {
    pub theta: T,
    #[serde(default)]
    pub m2: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZakRow<T> {
    pub theta: T,
    pub m2: T,
    pub band: i32,
    pub phase: Option<T>,
    /// Phase shifted by multiples of 2π for continuity along the grid.
    pub phase_unwrapped: Option<T>,
    pub convergence: Option<T>,
    pub flags: Vec<String>,
    pub error: Option<String>,
}

/// Parameters of the gap-closing loci of a family, for flagging sweep rows.
pub fn near_gap_closing<T: Real>(family: Family, p: ParamPoint<T>, m: T, margin: T) -> bool {
    let th = p.theta.abs();
    match family {
        Family::D => false,
        Family::Bdi | Family::Aiii => {
            if (th - T::FRAC_PI_2()).abs() < margin {
                return true;
            }
            let rad = (T::one() - p.m2 * p.m2).max(T::zero()).sqrt();
            if rad == T::zero() {
                return false;
            }
            let x = m.tanh() / rad;
            x <= T::one() && (th - x.acos()).abs() < margin
        }
    }
}

/// Zak phases over a parameter grid; rows are ordered by grid index, then band.
pub fn zak_sweep<T: Real>(
    family: Family,
    grid: &[ParamPoint<T>],
    m: T,
    bands: &[i32],
    m_loop: usize,
    margin: T,
) -> Vec<ZakRow<T>> {
    let jobs: Vec<(ParamPoint<T>, i32)> = grid.iter().flat_map(|&p| bands.iter().map(move |&b| (p, b))).collect();
    let mut rows: Vec<ZakRow<T>> = jobs
        .par_iter()
        .map(|&(p, band)| {
            let mut flags = Vec::new();
            if near_gap_closing(family, p, m, margin) {
                flags.push("near_gap_closing".to_string());
            }
            let res = from_family(family, p.theta, p.m2).and_then(|c| zak_phase(&c, m, band, m_loop));
            match res {
                Ok(z) => {
                    if z.flat_band {
                        flags.push("flat_band".into());
                    }
                    if z.shifted_grid {
                        flags.push("shifted_grid".into());
                    }
                    ZakRow {
                        theta: p.theta,
                        m2: p.m2,
                        band,
                        phase: Some(z.phase),
                        phase_unwrapped: None,
                        convergence: Some(z.convergence),
                        flags,
                        error: None,
                    }
                }
                Err(e) => ZakRow {
                    theta: p.theta,
                    m2: p.m2,
                    band,
                    phase: None,
                    phase_unwrapped: None,
                    convergence: None,
                    flags,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    for &band in bands {
        let mut prev: Option<T> = None;
        for row in rows.iter_mut().filter(|r| r.band == band) {
            if let Some(p) = row.phase {
                let u = match prev {
                    Some(q) => q + wrap_angle(p - q),
                    None => p,
                };
                row.phase_unwrapped = Some(u);
                prev = Some(u);
            }
        }
    }
    rows
}
