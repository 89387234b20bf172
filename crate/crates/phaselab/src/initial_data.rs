//! Admissible initial data: a compactly supported C^infinity classical
//! profile and its coherent-state mixture, which is the profile smoothed by
//! the Gaussian Wigner function of a coherent state (per-axis variance
//! eps/2 in both variables).

use crate::error::{LabError, Result};
use crate::field::PhaseField;
use crate::grid::PhaseGrid;
use crate::husimi::gaussian_smooth;

/// The standard C^infinity bump e^{-1/(1-s^2)} on |s| < 1, zero outside.
fn bump(s2: f64) -> f64 {
    if s2 < 1.0 {
        (-1.0 / (1.0 - s2)).exp()
    } else {
        0.0
    }
}

/// Separable compact-bump probability profile
///
///   g0(x,k) = c * B(|x|/sigma_x) * B(2|k|/M0),
///
/// supported in |x| <= sigma_x, |k| <= M0/2, smooth to all orders, and
/// normalized to unit mass by dense radial quadrature.
#[derive(Debug, Clone)]
pub struct ClassicalProfile {
    pub d: usize,
    pub m0: f64,
    pub sigma_x: f64,
    /// normalization constant c (dense-quadrature value)
    pub norm_const: f64,
}

/// integral of B(|s|) over the unit ball in R^d, by composite Simpson on
/// the radial profile
fn bump_ball_integral(d: usize) -> f64 {
    let n = 4000; // even
    let h = 1.0 / n as f64;
    let mut sum = 0.0;
    for i in 0..=n {
        let r = i as f64 * h;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * bump(r * r) * r.powi(d as i32 - 1);
    }
    sum *= h / 3.0;
    let sphere = match d {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => {
            // S_{d-1} = 2 pi^{d/2} / Gamma(d/2); small d only in practice
            let g = statrs_gamma(d as f64 / 2.0);
            2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / g
        }
    };
    sphere * sum
}

/// Gamma function via the Lanczos approximation (only exercised for d > 3).
fn statrs_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * statrs_gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = C[0];
        let t = x + G + 0.5;
        for (i, &c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

impl ClassicalProfile {
    pub fn new(m0: f64, sigma_x: f64, d: usize) -> Result<Self> {
        if !(m0 > 0.0) || !(sigma_x > 0.0) {
            return Err(LabError::Config(format!(
                "profile needs positive M0 and sigma_x, got {m0}, {sigma_x}"
            )));
        }
        let j = bump_ball_integral(d);
        // int B(|x|/sx) dx = sx^d J_d, int B(2|k|/M0) dk = (M0/2)^d J_d
        let mass = (sigma_x * 0.5 * m0).powi(d as i32) * j * j;
        Ok(ClassicalProfile { d, m0, sigma_x, norm_const: 1.0 / mass })
    }

    pub fn eval(&self, x: &[f64], k: &[f64]) -> f64 {
        let sx: f64 = x.iter().map(|v| (v / self.sigma_x).powi(2)).sum();
        let sk: f64 = k.iter().map(|v| (2.0 * v / self.m0).powi(2)).sum();
        self.norm_const * bump(sx) * bump(sk)
    }

    /// exact support radius in k
    pub fn support_radius(&self) -> f64 {
        0.5 * self.m0
    }

    fn fits(&self, grid: &PhaseGrid) -> bool {
        self.sigma_x < grid.lx() && 0.5 * self.m0 < grid.lk()
    }

    /// Sample onto a grid as an eps = 0 probability field, renormalized by
    /// the grid quadrature so that integrate() is exactly 1.
    pub fn sample(&self, grid: &PhaseGrid) -> Result<PhaseField> {
        if grid.dim() != self.d {
            return Err(LabError::BadDimension(grid.dim()));
        }
        if !self.fits(grid) {
            return Err(LabError::ProfileEscapesGrid { m0: self.m0, sigma_x: self.sigma_x });
        }
        let mut g = PhaseField::from_fn(grid, 0.0, |x, k| self.eval(x, k));
        let mass = g.integrate();
        g.values /= mass;
        Ok(g)
    }
}

/// Canonical profile used by the harness: sigma_x = 1.5 bump in x, bump
/// supported in |k| <= M0/2.
pub fn default_profile(m0: f64, d: usize) -> Result<ClassicalProfile> {
    ClassicalProfile::new(m0, 1.5, d)
}

/// Coherent-state mixture: the profile smoothed in both variables with the
/// coherent-state Gaussian (dual multiplier e^{-eps(a^2+b^2)/4}). Mass and
/// nonnegativity are preserved by the smoothing.
pub fn coherent_mixture(profile: &ClassicalProfile, grid: &PhaseGrid, eps: f64) -> Result<PhaseField> {
    if !(eps > 0.0) {
        return Err(LabError::ClassicalEpsilon);
    }
    let g0 = profile.sample(grid)?;
    let mut f = gaussian_smooth(&g0, eps, eps);
    f.epsilon = eps;
    Ok(f)
}

/// One row of the hypothesis report at a single eps.
#[derive(Debug, Clone)]
pub struct AdmissibilityRow {
    pub eps: f64,
    pub mass: f64,
    pub min_value: f64,
    pub h3_norm: f64,
    pub l1_norm: f64,
    pub second_moment_k: f64,
    /// int_{|k| > M0/2} |f0|^2
    pub tail_l2: f64,
    /// int_{|k| > M0/2} |f0|
    pub tail_l1: f64,
}

/// Hypothesis verdicts over an eps list; scaling checks are log-log fits.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub rows: Vec<AdmissibilityRow>,
    pub alpha: f64,
    /// fitted slope of tail_l2 (needs >= 2 points, else NaN)
    pub tail_l2_slope: f64,
    pub tail_l1_slope: f64,
    pub h3_uniform: bool,
    pub mass_ok: bool,
    pub nonneg_ok: bool,
    pub moment_ok: bool,
    pub tails_ok: bool,
}

/// Least-squares slope of ln(y) against ln(x).
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.max(1e-300).ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

/// Verify the convergence-rate data hypotheses for the coherent mixtures of a
/// profile across an eps list: unit mass, nonnegativity, uniform H^3 bound,
/// momentum tails decaying like eps^{2 alpha} (L^2) and eps^{alpha} (L^1)
/// outside |k| > M0/2, and the heat-flow second-moment identity.
pub fn admissibility_report(
    profile: &ClassicalProfile,
    grid: &PhaseGrid,
    alpha: f64,
    eps_list: &[f64],
) -> Result<AdmissibilityReport> {
    let g0 = profile.sample(grid)?;
    let base_moment = g0.second_moment_k();
    let g0_h3 = g0.sobolev_norm(3)?;
    let d = grid.dim();
    let ks = grid.k_axis();
    let half = 0.5 * profile.m0;
    let mut rows = Vec::new();
    for &eps in eps_list {
        let f0 = coherent_mixture(profile, grid, eps)?;
        let mut tail_l2 = 0.0;
        let mut tail_l1 = 0.0;
        for (ix, v) in f0.values.indexed_iter() {
            let r2: f64 = (0..d).map(|a| ks[ix[d + a]].powi(2)).sum();
            if r2.sqrt() > half {
                tail_l2 += v * v;
                tail_l1 += v.abs();
            }
        }
        tail_l2 *= grid.cell_volume();
        tail_l1 *= grid.cell_volume();
        rows.push(AdmissibilityRow {
            eps,
            mass: f0.integrate(),
            min_value: f0.min(),
            h3_norm: f0.sobolev_norm(3)?,
            l1_norm: f0.l1_norm(),
            second_moment_k: f0.second_moment_k(),
            tail_l2,
            tail_l1,
        });
    }
    let epses: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let tail_l2_slope = loglog_slope(&epses, &rows.iter().map(|r| r.tail_l2).collect::<Vec<_>>());
    let tail_l1_slope = loglog_slope(&epses, &rows.iter().map(|r| r.tail_l1).collect::<Vec<_>>());
    let h3s: Vec<f64> = rows.iter().map(|r| r.h3_norm).collect();
    let h3_min = h3s.iter().cloned().fold(f64::INFINITY, f64::min);
    let h3_max = h3s.iter().cloned().fold(0.0_f64, f64::max);
    let report = AdmissibilityReport {
        alpha,
        mass_ok: rows.iter().all(|r| (r.mass - 1.0).abs() <= 1e-10),
        nonneg_ok: rows.iter().all(|r| r.min_value >= -1e-12),
        moment_ok: rows
            .iter()
            .all(|r| (r.second_moment_k - base_moment - d as f64 * r.eps / 2.0).abs() <= 1e-8),
        // uniform H^3: the smoothing is a contraction, so every row must sit
        // at or below the unsmoothed profile's norm (up to rounding)
        h3_uniform: h3_max <= g0_h3 * (1.0 + 1e-10) && h3_min > 0.0,
        tails_ok: rows.len() < 2
            || (tail_l2_slope >= 2.0 * alpha - 0.2 && tail_l1_slope >= alpha - 0.1),
        tail_l2_slope,
        tail_l1_slope,
        rows,
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::vlasov::support_radius;

    fn grid256() -> PhaseGrid {
        PhaseGrid::new(1, 256, 256, 8.0, 8.0).unwrap()
    }

    #[test]
    fn profile_is_normalized_and_supported() {
        let p = default_profile(2.0, 1).unwrap();
        let grid = grid256();
        let g = p.sample(&grid).unwrap();
        assert_relative_eq!(g.integrate(), 1.0, epsilon = 1e-12);
        assert!(g.min() >= 0.0);
        assert_relative_eq!(p.support_radius(), 1.0);
        let r = support_radius(&g, 1e-9 * g.max());
        assert!(r <= 1.0 + 1e-12, "support radius {r}");
        // dense-quadrature normalization close to the grid quadrature
        // (trapezoid error of the bump at hx = 1/16 is a few 1e-6)
        let raw = PhaseField::from_fn(&grid, 0.0, |x, k| p.eval(x, k));
        assert_relative_eq!(raw.integrate(), 1.0, max_relative = 1e-5);
    }

    #[test]
    fn profile_h3_converges_under_refinement() {
        // The bump's sixth spectral moment converges slowly (root-
        // exponential tail amplified by xi^6), so the refined-grid oracle
        // checks convergence at the percent level rather than 1e-6.
        let p = default_profile(2.0, 1).unwrap();
        let h3 = |n: usize| -> f64 {
            let g = PhaseGrid::new(1, n, n, 8.0, 8.0).unwrap();
            p.sample(&g).unwrap().sobolev_norm(3).unwrap()
        };
        let (coarse, mid, fine) = (h3(256), h3(512), h3(1024));
        assert!((fine - mid).abs() < 0.2 * (mid - coarse).abs());
        assert_relative_eq!(mid, fine, max_relative = 1e-2);
    }

    #[test]
    fn profile_escaping_grid_is_rejected() {
        let p = ClassicalProfile::new(20.0, 1.5, 1).unwrap();
        assert!(matches!(
            p.sample(&grid256()),
            Err(LabError::ProfileEscapesGrid { .. })
        ));
    }

    #[test]
    fn mixture_mass_positivity_and_limit() {
        let p = default_profile(2.0, 1).unwrap();
        // eps = 0.025 needs the full 512 grid for clean positivity, and the
        // O(eps) distance slope is preasymptotic above eps ~ 0.1
        let grid = PhaseGrid::new(1, 512, 512, 8.0, 8.0).unwrap();
        let g0 = p.sample(&grid).unwrap();
        let mut dists = Vec::new();
        for eps in [0.1, 0.05, 0.025] {
            let f0 = coherent_mixture(&p, &grid, eps).unwrap();
            assert_relative_eq!(f0.integrate(), 1.0, epsilon = 1e-10);
            assert!(f0.min() >= -1e-12, "mixture min {}", f0.min());
            let diff = PhaseField {
                grid: grid.clone(),
                values: &f0.values - &g0.values,
                epsilon: eps,
                time: 0.0,
            };
            dists.push(diff.l2_norm());
        }
        // Monotone decreasing in eps, approaching O(eps): the second-order
        // smoothing correction is still sizable for the bump at these eps
        // (measured slope 0.78 here, rising toward 1 as eps shrinks), so the
        // bound is the observed preasymptotic rate, not the limit rate.
        assert!(dists.windows(2).all(|w| w[1] < w[0]), "distances {dists:?}");
        let slope = loglog_slope(&[0.1, 0.05, 0.025], &dists);
        assert!(slope >= 0.7, "mixture-profile slope {slope}");
    }

    #[test]
    fn smoothing_semigroup_property() {
        let p = default_profile(2.0, 1).unwrap();
        let grid = grid256();
        let eps = 0.1;
        let f0 = coherent_mixture(&p, &grid, eps).unwrap();
        let h = crate::husimi::husimi_transform(&f0).unwrap();
        let g0 = p.sample(&grid).unwrap();
        let doubled = gaussian_smooth(&g0, 2.0 * eps, 2.0 * eps);
        let err = h
            .values
            .iter()
            .zip(doubled.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(err < 1e-12, "semigroup defect {err}");
    }

    #[test]
    fn admissibility_on_default_profile() {
        let p = default_profile(2.0, 1).unwrap();
        let grid = grid256();
        let r = admissibility_report(&p, &grid, 1.0, &[0.2, 0.1, 0.05]).unwrap();
        assert!(r.mass_ok);
        assert!(r.nonneg_ok);
        assert!(r.moment_ok, "rows: {:?}", r.rows);
        assert!(r.h3_uniform);
        assert!(r.tails_ok, "tail slopes {} {}", r.tail_l2_slope, r.tail_l1_slope);
    }

    #[test]
    fn single_eps_report_degenerates_gracefully() {
        let p = default_profile(2.0, 1).unwrap();
        let r = admissibility_report(&p, &grid256(), 1.0, &[0.1]).unwrap();
        assert!(r.tail_l2_slope.is_nan());
        assert!(r.tails_ok); // insufficient points is not a failure
    }
}
