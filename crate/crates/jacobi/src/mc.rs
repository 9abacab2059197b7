//! Monte Carlo estimates of `(1/m) E tr(J^n)` from Brownian motion on `U(d)`.
//!
//! `U` is advanced by unitary factors approximating `exp(i sqrt(dt) H)`,
//! with `H` drawn from the Gaussian unitary ensemble normalized to unit
//! entry variance, so the Itô drift `-(d/2) U dt` is carried by the
//! exponential. The factor is the diagonal Padé approximant, which is
//! unitary for skew-Hermitian arguments.
//! Physical time is `t * time_scale`, with `time_scale = 1/d` by default.

use std::time::{Duration, Instant};

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub type C64 = Complex<f64>;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum McError {
    #[error("need 1 <= m <= p <= d, got d={d}, m={m}, p={p}")]
    Dimensions { d: usize, m: usize, p: usize },
    #[error("steps, samples and streams must be positive")]
    Counts,
    #[error("need t >= 0 and time_scale > 0, got t={t}, time_scale={time_scale}")]
    Time { t: f64, time_scale: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCConfig {
    pub d: usize,
    pub m: usize,
    pub p: usize,
    pub t: f64,
    pub steps: usize,
    pub samples: usize,
    pub seed: u64,
    pub streams: usize,
    pub time_scale: f64,
}

impl MCConfig {
    /// Defaults: 400 steps, 10^4 samples, seed 0, 8 streams, time scale `1/d`.
    pub fn new(d: usize, m: usize, p: usize, t: f64) -> Self {
        Self { d, m, p, t, steps: 400, samples: 10_000, seed: 0, streams: 8, time_scale: 1.0 / d.max(1) as f64 }
    }

    pub fn validate(&self) -> Result<(), McError> {
        if self.m == 0 || self.m > self.p || self.p > self.d {
            return Err(McError::Dimensions { d: self.d, m: self.m, p: self.p });
        }
        if self.steps == 0 || self.samples == 0 || self.streams == 0 {
            return Err(McError::Counts);
        }
        if self.t.is_nan() || self.t < 0.0 || self.time_scale.is_nan() || self.time_scale <= 0.0 {
            return Err(McError::Time { t: self.t, time_scale: self.time_scale });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub n: u32,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MCResult {
    pub moments: Vec<MomentEstimate>,
    pub samples_used: usize,
    pub wall_time: Duration,
}

/// Hermitian matrix with independent `N(0,1)` diagonal and complex
/// off-diagonal entries of unit total variance.
pub fn gue<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let mut h = DMatrix::<C64>::zeros(d, d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        h[(i, i)] = C64::new(rng.sample(StandardNormal), 0.0);
        for j in i + 1..d {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = C64::new(re * s, im * s);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

/// `exp(i a H)` for Hermitian `H`, through its eigendecomposition.
pub fn unitary_exp(h: DMatrix<C64>, a: f64) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(h);
    let mut scaled = eig.eigenvectors.clone();
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = C64::from_polar(1.0, a * lambda);
        for v in scaled.column_mut(k).iter_mut() {
            *v *= phase;
        }
    }
    scaled * eig.eigenvectors.adjoint()
}

/// `[2/2]` Padé approximant of `exp(i a H)`. For Hermitian `H` the
/// denominator is the adjoint of the numerator, so the result is unitary up
/// to rounding; it agrees with the exponential to `O(a^5)`.
pub fn unitary_pade(h: &DMatrix<C64>, a: f64) -> DMatrix<C64> {
    let d = h.nrows();
    let mut v = DMatrix::<C64>::identity(d, d);
    pade_step(h, a, &mut v);
    v
}

/// `v <- R v` with `R` the `[2/2]` Padé factor of `exp(i a H)`, solving
/// with the denominator instead of forming `R`.
fn pade_step(h: &DMatrix<C64>, a: f64, v: &mut DMatrix<C64>) {
    let d = h.nrows();
    let x = h * C64::new(0.0, a);
    let x2 = &x * &x;
    let mut den = DMatrix::<C64>::identity(d, d) + &x2 * C64::new(1.0 / 12.0, 0.0);
    let num_v = &*v + &x * (&*v * C64::new(0.5, 0.0)) + &x2 * (&*v * C64::new(1.0 / 12.0, 0.0));
    den -= x * C64::new(0.5, 0.0);
    *v = den.lu().solve(&num_v).expect("Padé denominator of a skew-Hermitian matrix is invertible");
}

/// The first `k` columns of a unitary Brownian motion at time `t_eff`:
/// each step multiplies on the left, so the remaining columns never
/// influence these.
pub fn simulate_columns<R: Rng + ?Sized>(d: usize, k: usize, t_eff: f64, steps: usize, rng: &mut R) -> DMatrix<C64> {
    let mut v = DMatrix::<C64>::identity(d, k);
    if t_eff == 0.0 || steps == 0 {
        return v;
    }
    let a = (t_eff / steps as f64).sqrt();
    for _ in 0..steps {
        pade_step(&gue(d, rng), a, &mut v);
    }
    v
}

/// Unitary Brownian motion at time `t_eff` after `steps` steps.
pub fn simulate_unitary_bm<R: Rng + ?Sized>(d: usize, t_eff: f64, steps: usize, rng: &mut R) -> DMatrix<C64> {
    simulate_columns(d, d, t_eff, steps, rng)
}

/// `J = Y Y*` for the upper-left `m x p` block `Y` of `u`.
pub fn corner_radial_part(u: &DMatrix<C64>, m: usize, p: usize) -> DMatrix<C64> {
    let y = u.view((0, 0), (m, p));
    y * y.adjoint()
}

/// `tr(J^n) / m` for `n = 1..=n_max`.
pub fn normalized_traces(j: &DMatrix<C64>, n_max: u32) -> Vec<f64> {
    let m = j.nrows() as f64;
    let mut power = j.clone();
    let mut out = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        if n > 1 {
            power = &power * j;
        }
        out.push(power.trace().re / m);
    }
    out
}

#[derive(Clone, Debug)]
struct Partial {
    count: usize,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

fn run_stream(cfg: &MCConfig, n_max: u32, stream: usize, count: usize) -> Partial {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream as u64);
    let mut part = Partial { count, sum: vec![0.0; n_max as usize], sum_sq: vec![0.0; n_max as usize] };
    let t_eff = cfg.t * cfg.time_scale;
    for _ in 0..count {
        let cols = simulate_columns(cfg.d, cfg.p, t_eff, cfg.steps, &mut rng);
        let traces = normalized_traces(&corner_radial_part(&cols, cfg.m, cfg.p), n_max);
        for (k, x) in traces.into_iter().enumerate() {
            part.sum[k] += x;
            part.sum_sq[k] += x * x;
        }
    }
    part
}

/// Means and standard errors of `tr(J^n)/m`, `n = 1..=n_max`.
///
/// Samples are dealt to `streams` independent ChaCha streams; each stream
/// keeps its own sums, and the sums are merged in stream order, so the
/// result does not depend on the thread count.
pub fn estimate_moments(cfg: &MCConfig, n_max: u32) -> Result<MCResult, McError> {
    cfg.validate()?;
    let start = Instant::now();
    let base = cfg.samples / cfg.streams;
    let extra = cfg.samples % cfg.streams;
    let partials: Vec<Partial> = (0..cfg.streams)
        .into_par_iter()
        .map(|s| run_stream(cfg, n_max, s, base + usize::from(s < extra)))
        .collect();

    let total = cfg.samples as f64;
    let mut moments = Vec::with_capacity(n_max as usize);
    for k in 0..n_max as usize {
        let sum: f64 = partials.iter().map(|p| p.sum[k]).sum();
        let sum_sq: f64 = partials.iter().map(|p| p.sum_sq[k]).sum();
        let mean = sum / total;
        let var = if cfg.samples > 1 { ((sum_sq - total * mean * mean) / (total - 1.0)).max(0.0) } else { 0.0 };
        moments.push(MomentEstimate { n: k as u32 + 1, mean, stderr: (var / total).sqrt() });
    }
    let samples_used = partials.iter().map(|p| p.count).sum();
    Ok(MCResult { moments, samples_used, wall_time: start.elapsed() })
}
