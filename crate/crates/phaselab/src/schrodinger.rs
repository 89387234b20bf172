//! Schrodinger-picture oracle: an independent split-step Hartree solver for
//! small orbital ensembles, the Wigner transform of an ensemble, and the
//! Hilbert-Schmidt bridge ||A||_HS = (2 pi eps)^{d/2} ||f||_L2. Exists to
//! cross-validate the phase-space solver against the wavefunction picture.

use crate::error::{LabError, Result};
use crate::field::PhaseField;
use crate::grid::{dual_axis, PhaseGrid};
use crate::potential::{hartree_field, Potential};
use crate::spectral;
use crate::wigner::decompose;
use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

/// Mixed state as a convex combination of unit-norm orbitals on the x-grid.
#[derive(Debug, Clone)]
pub struct OrbitalEnsemble {
    pub grid: PhaseGrid,
    pub eps: f64,
    pub orbitals: Vec<ArrayD<Complex64>>,
    pub weights: Vec<f64>,
    pub time: f64,
}

/// L2 norm of an orbital under the grid quadrature.
fn orbital_norm(u: &ArrayD<Complex64>, grid: &PhaseGrid) -> f64 {
    let d = grid.dim();
    let w = grid.hx().powi(d as i32);
    (u.iter().map(|c| c.norm_sqr()).sum::<f64>() * w).sqrt()
}

impl OrbitalEnsemble {
    pub fn new(
        grid: PhaseGrid,
        eps: f64,
        orbitals: Vec<ArrayD<Complex64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(LabError::ClassicalEpsilon);
        }
        if orbitals.is_empty() || orbitals.len() != weights.len() {
            return Err(LabError::EnsembleMismatch(format!(
                "{} orbitals vs {} weights",
                orbitals.len(),
                weights.len()
            )));
        }
        let wsum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0) || (wsum - 1.0).abs() > 1e-10 {
            return Err(LabError::EnsembleMismatch(format!("weight sum {wsum}")));
        }
        for u in &orbitals {
            if u.shape() != vec![grid.nx(); grid.dim()].as_slice() {
                return Err(LabError::EnsembleMismatch("orbital shape".into()));
            }
            let n = orbital_norm(u, &grid);
            if (n - 1.0).abs() > 1e-10 {
                return Err(LabError::EnsembleMismatch(format!("orbital norm {n}")));
            }
        }
        Ok(OrbitalEnsemble { grid, eps, orbitals, weights, time: 0.0 })
    }

    /// Sample a complex closure on the x-grid and normalize it.
    pub fn orbital_from_fn<F>(grid: &PhaseGrid, f: F) -> ArrayD<Complex64>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let d = grid.dim();
        let xs = grid.x_axis();
        let mut u = ArrayD::zeros(IxDyn(&vec![grid.nx(); d]));
        let mut xv = vec![0.0; d];
        for (ix, v) in u.indexed_iter_mut() {
            for a in 0..d {
                xv[a] = xs[ix[a]];
            }
            *v = f(&xv);
        }
        let n = orbital_norm(&u, grid);
        u.mapv_inplace(|c| c / n);
        u
    }

    /// Coherent state centered at (x0, k0): Gaussian of width sqrt(eps)
    /// with plane-wave phase k0 . x / eps.
    pub fn coherent_orbital(grid: &PhaseGrid, eps: f64, x0: &[f64], k0: &[f64]) -> ArrayD<Complex64> {
        let x0 = x0.to_vec();
        let k0 = k0.to_vec();
        Self::orbital_from_fn(grid, |x| {
            let r2: f64 = x.iter().zip(&x0).map(|(a, b)| (a - b).powi(2)).sum();
            let phase: f64 = x.iter().zip(&k0).map(|(a, b)| a * b).sum::<f64>() / eps;
            Complex64::from_polar((-r2 / (2.0 * eps)).exp(), phase)
        })
    }

    /// First excited harmonic-oscillator state along the first axis:
    /// x_0 times the ground Gaussian. Its Wigner function is negative at
    /// the origin.
    pub fn excited_orbital(grid: &PhaseGrid, eps: f64) -> ArrayD<Complex64> {
        Self::orbital_from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|a| a * a).sum();
            Complex64::new(x[0] * (-r2 / (2.0 * eps)).exp(), 0.0)
        })
    }

    /// rho(x) = sum_m lambda_m |u_m(x)|^2
    pub fn rho(&self) -> ArrayD<f64> {
        let mut rho = ArrayD::zeros(IxDyn(&vec![self.grid.nx(); self.grid.dim()]));
        for (u, &w) in self.orbitals.iter().zip(&self.weights) {
            for (r, c) in rho.iter_mut().zip(u.iter()) {
                *r += w * c.norm_sqr();
            }
        }
        rho
    }
}

/// One Strang step of the Hartree equation i eps u_t = -(eps^2/2) lap u + V u:
/// half potential phase, full kinetic phase, half potential phase, with
/// V = phi * rho recomputed from the shared density before each phase.
pub fn nls_step(ens: &mut OrbitalEnsemble, phi: &Potential, dt: f64) -> Result<()> {
    let d = ens.grid.dim();
    let eps = ens.eps;
    let half_phase = |ens: &mut OrbitalEnsemble, phi: &Potential| -> Result<()> {
        if phi.is_zero() {
            return Ok(());
        }
        let mf = hartree_field(&ens.rho(), &ens.grid, phi)?;
        for u in &mut ens.orbitals {
            for (c, &v) in u.iter_mut().zip(mf.v.iter()) {
                *c *= Complex64::from_polar(1.0, -0.5 * dt / eps * v);
            }
        }
        Ok(())
    };
    half_phase(ens, phi)?;
    let xi = dual_axis(ens.grid.nx(), ens.grid.hx());
    for u in &mut ens.orbitals {
        spectral::ft_axes(u, 0..d, ens.grid.hx());
        for (ix, c) in u.indexed_iter_mut() {
            let xi2: f64 = (0..d).map(|a| xi[ix[a]].powi(2)).sum();
            *c *= Complex64::from_polar(1.0, -dt * eps * xi2 / 2.0);
        }
        spectral::ift_axes(u, 0..d, ens.grid.hx());
    }
    half_phase(ens, phi)?;
    ens.time += dt;
    for u in &ens.orbitals {
        if u.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(LabError::NanDetected(ens.time));
        }
    }
    Ok(())
}

/// Total Hartree energy of the ensemble:
/// sum_m lambda_m <u_m, -(eps^2/2) lap u_m> + (1/2) int rho (phi * rho).
pub fn ensemble_energy(ens: &OrbitalEnsemble, phi: &Potential) -> f64 {
    let d = ens.grid.dim();
    let xi = dual_axis(ens.grid.nx(), ens.grid.hx());
    // Parseval: int |grad u|^2 = sum |xi|^2 |u_hat|^2 / (n h)^d with the
    // continuous-normalized transform
    let parseval = 1.0 / (ens.grid.nx() as f64 * ens.grid.hx()).powi(d as i32);
    let mut kinetic = 0.0;
    for (u, &w) in ens.orbitals.iter().zip(&ens.weights) {
        let mut uh = u.clone();
        spectral::ft_axes(&mut uh, 0..d, ens.grid.hx());
        let mut g2 = 0.0;
        for (ix, c) in uh.indexed_iter() {
            let xi2: f64 = (0..d).map(|a| xi[ix[a]].powi(2)).sum();
            g2 += xi2 * c.norm_sqr();
        }
        kinetic += w * 0.5 * ens.eps * ens.eps * g2 * parseval;
    }
    if phi.is_zero() {
        return kinetic;
    }
    let rho = ens.rho();
    let mf = hartree_field(&rho, &ens.grid, phi).expect("rho lives on the ensemble grid");
    let hxd = ens.grid.hx().powi(d as i32);
    let pot: f64 = rho.iter().zip(mf.v.iter()).map(|(r, v)| r * v).sum::<f64>() * hxd;
    kinetic + 0.5 * pot
}

/// Wigner transform of the ensemble on the shared phase grid:
///
///   f(x,k) = (2 pi)^{-d} sum_m lambda_m int e^{iyk}
///            conj(u_m)(x + eps y/2) u_m(x - eps y/2) dy,
///
/// with the shifted orbitals evaluated by exact trigonometric interpolation
/// and the y-integral carried out by the dual-grid inverse transform.
pub fn wigner_of_ensemble(ens: &OrbitalEnsemble) -> Result<PhaseField> {
    let grid = &ens.grid;
    let d = grid.dim();
    let nx_total = grid.nx().pow(d as u32);
    let nk_total = grid.nk().pow(d as u32);
    let xi = dual_axis(grid.nx(), grid.hx());
    let y = dual_axis(grid.nk(), grid.hk());
    let mut corr = ndarray::Array2::<Complex64>::zeros((nx_total, nk_total));
    let mut shift = vec![0.0; d];
    for (u, &w) in ens.orbitals.iter().zip(&ens.weights) {
        let mut u_hat = u.clone();
        spectral::ft_axes(&mut u_hat, 0..d, grid.hx());
        for j in 0..nk_total {
            let jk = decompose(j, d, grid.nk());
            for a in 0..d {
                shift[a] = 0.5 * ens.eps * y[jk[a]];
            }
            // u(x + s) has spectrum u_hat(xi) e^{i xi . s}
            let shifted = |sgn: f64| -> ArrayD<Complex64> {
                let mut s = u_hat.clone();
                for (ix, c) in s.indexed_iter_mut() {
                    let mut ph = 0.0;
                    for a in 0..d {
                        ph += xi[ix[a]] * sgn * shift[a];
                    }
                    *c *= Complex64::from_polar(1.0, ph);
                }
                spectral::ift_axes(&mut s, 0..d, grid.hx());
                s
            };
            let plus = shifted(1.0);
            let minus = shifted(-1.0);
            for (i, (p, m)) in plus.iter().zip(minus.iter()).enumerate() {
                corr[(i, j)] += w * p.conj() * m;
            }
        }
    }
    let mut full = corr.into_shape(IxDyn(&grid.shape())).unwrap().into_dyn();
    spectral::ift_axes(&mut full, d..2 * d, grid.hk());
    let (values, _) = spectral::real_part(&full);
    Ok(PhaseField { grid: grid.clone(), values, epsilon: ens.eps, time: ens.time })
}

/// The Hilbert-Schmidt bridge: returns (||A||_HS, ||f||_L2, ratio) with
/// ratio = ||A||_HS / ((2 pi eps)^{d/2} ||f||_L2), which the transform
/// identity pins at 1.
pub fn hs_bridge(ens: &OrbitalEnsemble) -> Result<(f64, f64, f64)> {
    let d = ens.grid.dim();
    let w = ens.grid.hx().powi(d as i32);
    let m = ens.orbitals.len();
    let mut hs2 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let inner: Complex64 = ens.orbitals[a]
                .iter()
                .zip(ens.orbitals[b].iter())
                .map(|(p, q)| p.conj() * q)
                .sum::<Complex64>()
                * w;
            hs2 += ens.weights[a] * ens.weights[b] * inner.norm_sqr();
        }
    }
    let hs = hs2.sqrt();
    let l2 = wigner_of_ensemble(ens)?.l2_norm();
    let bridge = (2.0 * std::f64::consts::PI * ens.eps).powf(d as f64 / 2.0);
    Ok((hs, l2, hs / (bridge * l2)))
}

/// Evolve the ensemble by nls_step and the field by the phase-space solver,
/// both to time T with the same dt; return the relative L2 discrepancy of
/// the two pictures at T. Precondition: f0 is the Wigner transform of ens0.
pub fn oracle_compare(
    ens0: &OrbitalEnsemble,
    f0: &PhaseField,
    phi: &Potential,
    t_end: f64,
    dt: f64,
) -> Result<f64> {
    let w0 = wigner_of_ensemble(ens0)?;
    let gap = {
        let diff = PhaseField {
            grid: f0.grid.clone(),
            values: &w0.values - &f0.values,
            epsilon: f0.epsilon,
            time: 0.0,
        };
        diff.l2_norm() / w0.l2_norm()
    };
    if gap > 1e-10 {
        return Err(LabError::EnsembleMismatch(format!(
            "f0 is not the Wigner transform of ens0 (relative gap {gap:.3e})"
        )));
    }
    let mut ens = ens0.clone();
    let mut run = crate::wigner::WignerRun::new(f0.clone(), phi.clone(), dt)?;
    let steps = (t_end / dt).round() as usize;
    for _ in 0..steps {
        nls_step(&mut ens, phi, dt)?;
        run.step()?;
    }
    let w = wigner_of_ensemble(&ens)?;
    let diff = PhaseField {
        grid: f0.grid.clone(),
        values: &w.values - &run.state.values,
        epsilon: f0.epsilon,
        time: run.state.time,
    };
    Ok(diff.l2_norm() / run.state.l2_norm())
}
