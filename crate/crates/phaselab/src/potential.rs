//! Pair interaction potentials with closed-form Fourier transforms, their
//! moment certificates, and the self-consistent mean-field convolution.

use crate::error::{LabError, Result};
use crate::grid::{dual_axis, PhaseGrid};
use crate::spectral;
use ndarray::ArrayD;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Spherically symmetric interaction phi(x) = A exp(-|x|^2 / (2 sigma^2)).
///
/// The Gaussian family satisfies every regularity assumption the solvers
/// rely on (H^1 membership and finite Fourier moments up to order four) with
/// closed forms, so its certificates are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    amplitude: f64,
    sigma: f64,
}

impl Potential {
    pub fn gaussian(amplitude: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(LabError::BadSigma(sigma));
        }
        Ok(Potential { amplitude, sigma })
    }

    pub fn zero() -> Self {
        Potential { amplitude: 0.0, sigma: 1.0 }
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        self.amplitude * (-r2 / (2.0 * self.sigma * self.sigma)).exp()
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let s2 = self.sigma * self.sigma;
        let v = self.eval(x);
        x.iter().map(|&xi| -xi / s2 * v).collect()
    }

    /// phi_hat(S) = A (2 pi)^{d/2} sigma^d exp(-sigma^2 |S|^2 / 2).
    pub fn fourier(&self, s: &[f64]) -> f64 {
        let r2: f64 = s.iter().map(|v| v * v).sum();
        let d = s.len() as i32;
        self.amplitude
            * (2.0 * PI).powf(d as f64 / 2.0)
            * self.sigma.powi(d)
            * (-self.sigma * self.sigma * r2 / 2.0).exp()
    }

    /// Sup norm of the force, max_x |grad phi| = |A| e^{-1/2} / sigma.
    pub fn grad_sup_norm(&self) -> f64 {
        self.amplitude.abs() / self.sigma * (-0.5f64).exp()
    }

    /// Closed-form Fourier moment M_n = int |phi_hat(S)| |S|^n dS over R^d.
    pub fn moment(&self, n: usize, d: usize) -> Result<f64> {
        if n > 4 {
            return Err(LabError::MomentOrder(n));
        }
        if d < 1 {
            return Err(LabError::BadDimension(d));
        }
        if self.amplitude == 0.0 {
            return Ok(0.0);
        }
        // M_n = |A| (2 pi)^{d/2} sigma^d * S_{d-1} * int_0^inf r^{n+d-1} e^{-sigma^2 r^2/2} dr,
        // with int_0^inf r^m e^{-c r^2} dr = Gamma((m+1)/2) / (2 c^{(m+1)/2}).
        let c = self.sigma * self.sigma / 2.0;
        let m = (n + d - 1) as f64;
        let radial = gamma_half((n + d) as u32) / (2.0 * c.powf((m + 1.0) / 2.0));
        Ok(self.amplitude.abs()
            * (2.0 * PI).powf(d as f64 / 2.0)
            * self.sigma.powi(d as i32)
            * sphere_area(d)
            * radial)
    }

    /// Numerically integrated moment, for cross-checking the closed form.
    pub fn moment_certificate(&self, n: usize, d: usize) -> Result<f64> {
        if n > 4 {
            return Err(LabError::MomentOrder(n));
        }
        if self.amplitude == 0.0 {
            return Ok(0.0);
        }
        // Radial quadrature out to where the Gaussian tail is below 1e-300.
        let rmax = 40.0 / self.sigma;
        let steps = 200_000usize;
        let h = rmax / steps as f64;
        let c = self.sigma * self.sigma / 2.0;
        let pref = self.amplitude.abs()
            * (2.0 * PI).powf(d as f64 / 2.0)
            * self.sigma.powi(d as i32)
            * sphere_area(d);
        // Simpson's rule on r^{n+d-1} e^{-c r^2}.
        let f = |r: f64| r.powi((n + d - 1) as i32) * (-c * r * r).exp();
        let mut sum = f(0.0) + f(rmax);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(i as f64 * h);
        }
        Ok(pref * sum * h / 3.0)
    }
}

/// Surface area of the unit sphere S^{d-1} in R^d.
fn sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half(d as u32)
}

/// Gamma(n/2) for positive integer n.
fn gamma_half(n: u32) -> f64 {
    match n {
        1 => PI.sqrt(),
        2 => 1.0,
        n => (n as f64 / 2.0 - 1.0) * gamma_half(n - 2),
    }
}

/// Self-consistent mean field V = phi * rho and its gradient, evaluated
/// spectrally on the position grid: V_hat = phi_hat(S) rho_hat(S).
#[derive(Debug, Clone)]
pub struct MeanField {
    pub v: ArrayD<f64>,
    pub grad: Vec<ArrayD<f64>>,
    /// Spectrum of V on the FFT-ordered dual grid (kept for kick multipliers).
    pub v_hat: ArrayD<Complex64>,
}

impl MeanField {
    pub fn zero(grid: &PhaseGrid) -> Self {
        let d = grid.dim();
        let shape: Vec<usize> = vec![grid.nx(); d];
        MeanField {
            v: ArrayD::zeros(ndarray::IxDyn(&shape)),
            grad: vec![ArrayD::zeros(ndarray::IxDyn(&shape)); d],
            v_hat: ArrayD::zeros(ndarray::IxDyn(&shape)),
        }
    }
}

/// Compute V = phi * rho and its gradient for a spatial density `rho` of
/// shape [nx; d].
pub fn hartree_field(rho: &ArrayD<f64>, grid: &PhaseGrid, phi: &Potential) -> Result<MeanField> {
    let d = grid.dim();
    if rho.shape() != vec![grid.nx(); d].as_slice() {
        return Err(LabError::GridMismatch);
    }
    let mut rho_hat = spectral::to_complex(rho);
    spectral::ft_axes(&mut rho_hat, 0..d, grid.hx());
    let freqs = dual_axis(grid.nx(), grid.hx());

    let mut s = vec![0.0; d];
    let mut v_hat = rho_hat.clone();
    for (ix, c) in v_hat.indexed_iter_mut() {
        for a in 0..d {
            s[a] = freqs[ix[a]];
        }
        *c *= phi.fourier(&s);
    }

    let mut v_spec = v_hat.clone();
    spectral::ift_axes(&mut v_spec, 0..d, grid.hx());
    let (v, _) = spectral::real_part(&v_spec);

    let mut grad = Vec::with_capacity(d);
    for a in 0..d {
        let mut g_hat = v_hat.clone();
        for (ix, c) in g_hat.indexed_iter_mut() {
            *c *= Complex64::new(0.0, freqs[ix[a]]);
        }
        spectral::ift_axes(&mut g_hat, 0..d, grid.hx());
        let (g, _) = spectral::real_part(&g_hat);
        grad.push(g);
    }

    Ok(MeanField { v, grad, v_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::IxDyn;

    #[test]
    fn zero_amplitude_kills_everything() {
        let p = Potential::gaussian(0.0, 1.0).unwrap();
        assert_eq!(p.eval(&[0.3]), 0.0);
        for n in 0..=4 {
            assert_eq!(p.moment(n, 1).unwrap(), 0.0);
            assert_eq!(p.moment_certificate(n, 1).unwrap(), 0.0);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Potential::gaussian(1.0, 0.0).is_err());
        assert!(Potential::gaussian(1.0, -2.0).is_err());
        let p = Potential::gaussian(1.0, 1.0).unwrap();
        assert!(p.moment(5, 1).is_err());
    }

    #[test]
    fn grad_sup_norm_matches_dense_sampling() {
        let p = Potential::gaussian(1.0, 1.0).unwrap();
        let analytic = p.grad_sup_norm();
        assert!((analytic - (-0.5f64).exp()).abs() < 1e-15);
        let mut best = 0.0f64;
        for i in 0..200_000 {
            let x = -6.0 + 12.0 * i as f64 / 200_000.0;
            best = best.max(p.grad(&[x])[0].abs());
        }
        assert!((best - analytic).abs() < 1e-8);
    }

    #[test]
    fn moments_match_quadrature() {
        // M_0 = 2 pi and M_1 = 2 sqrt(2 pi) for A=1, sigma=1, d=1.
        let p = Potential::gaussian(1.0, 1.0).unwrap();
        assert!((p.moment(0, 1).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!((p.moment(1, 1).unwrap() - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-12);
        for d in 1..=2 {
            for n in 0..=4 {
                let closed = p.moment(n, d).unwrap();
                let quad = p.moment_certificate(n, d).unwrap();
                assert!(
                    (closed - quad).abs() / closed < 1e-8,
                    "n={n} d={d}: closed={closed} quad={quad}"
                );
                assert!(closed.is_finite());
            }
        }
    }

    #[test]
    fn hartree_of_point_mass_recovers_phi() {
        let grid = PhaseGrid::new(1, 128, 8, 8.0, 1.0).unwrap();
        let phi = Potential::gaussian(0.7, 0.9).unwrap();
        let xs = grid.x_axis();
        let i0 = 40;
        let mass = 1.3;
        let mut rho = ArrayD::zeros(IxDyn(&[grid.nx()]));
        rho[[i0]] = mass / grid.hx();
        let mf = hartree_field(&rho, &grid, &phi).unwrap();
        // Direct real-space convolution oracle at a handful of points.
        for probe in [0usize, 23, 64, 100] {
            let expect = mass * phi.eval(&[xs[probe] - xs[i0]]);
            assert!(
                (mf.v[[probe]] - expect).abs() < 1e-10,
                "probe {probe}: {} vs {expect}",
                mf.v[[probe]]
            );
        }
    }

    #[test]
    fn hartree_zero_density_and_linearity() {
        let grid = PhaseGrid::new(1, 64, 8, 6.0, 1.0).unwrap();
        let phi = Potential::gaussian(1.0, 1.0).unwrap();
        let zero = ArrayD::zeros(IxDyn(&[grid.nx()]));
        let mf = hartree_field(&zero, &grid, &phi).unwrap();
        assert!(mf.v.iter().all(|v| v.abs() < 1e-15));

        let xs = grid.x_axis();
        let r1 = ArrayD::from_shape_fn(IxDyn(&[grid.nx()]), |ix| (-(xs[ix[0]]).powi(2)).exp());
        let r2 =
            ArrayD::from_shape_fn(IxDyn(&[grid.nx()]), |ix| (-(xs[ix[0]] - 1.0).powi(2)).exp());
        let combo = &r1 * 2.0 + &r2 * (-0.5);
        let v_combo = hartree_field(&combo, &grid, &phi).unwrap().v;
        let v1 = hartree_field(&r1, &grid, &phi).unwrap().v;
        let v2 = hartree_field(&r2, &grid, &phi).unwrap().v;
        for i in 0..grid.nx() {
            assert!((v_combo[[i]] - (2.0 * v1[[i]] - 0.5 * v2[[i]])).abs() < 1e-12);
        }
    }

    #[test]
    fn even_density_gives_even_v_odd_force() {
        let grid = PhaseGrid::new(1, 64, 8, 6.0, 1.0).unwrap();
        let phi = Potential::gaussian(1.0, 1.2).unwrap();
        let xs = grid.x_axis();
        let rho = ArrayD::from_shape_fn(IxDyn(&[grid.nx()]), |ix| {
            (-(xs[ix[0]]).powi(2) / 0.5).exp() + (-(xs[ix[0]]).powi(2) * 2.0).exp()
        });
        let mf = hartree_field(&rho, &grid, &phi).unwrap();
        // Mirror index of i is n-i (x=0 sits at index n/2).
        let n = grid.nx();
        for i in 1..n {
            assert!((mf.v[[i]] - mf.v[[n - i]]).abs() < 1e-12);
            assert!((mf.grad[0][[i]] + mf.grad[0][[n - i]]).abs() < 1e-12);
        }
    }

    #[test]
    fn v_hat_l1_bounded_by_m0_for_probability_rho() {
        let grid = PhaseGrid::new(1, 128, 8, 8.0, 1.0).unwrap();
        let phi = Potential::gaussian(1.0, 1.0).unwrap();
        let xs = grid.x_axis();
        let mut rho =
            ArrayD::from_shape_fn(IxDyn(&[grid.nx()]), |ix| (-(xs[ix[0]]).powi(2)).exp());
        let mass: f64 = rho.sum() * grid.hx();
        rho.mapv_inplace(|v| v / mass);
        let mf = hartree_field(&rho, &grid, &phi).unwrap();
        // ||V_hat||_L1 <= M_0 when rho is a probability density.
        let dss = 2.0 * PI / (grid.nx() as f64 * grid.hx());
        let l1: f64 = mf.v_hat.iter().map(|c| c.norm()).sum::<f64>() * dss;
        assert!(l1 <= phi.moment(0, 1).unwrap() + 1e-10);
    }
}
