//! Husimi transform and the error terms of the smoothed Wigner equation.
//!
//! The transform is Gaussian smoothing in both phase-space variables with
//! width sqrt(eps/2) per axis; on the dual grid it is the diagonal
//! multiplier e^{-eps(|p|^2+|q|^2)/4}, which makes positivity, moment and
//! contraction identities cheap to verify. E1 and E2 are the two error
//! terms by which the smoothed field fails to satisfy its own nonlinear
//! equation; E2 is assembled from its exact double-Fourier representation
//! to avoid cancellation at small eps.

use crate::error::{LabError, Result};
use crate::field::PhaseField;
use crate::grid::dual_axis;
use crate::potential::Potential;
use crate::spectral;
use crate::wigner::{decompose, density};
use ndarray::IxDyn;
use crate::vlasov::support_radius;
use num_complex::Complex64;

/// Gaussian smoothing as a dual multiplier e^{-(tx |p|^2 + tk |q|^2)/4}.
/// tx or tk equal to zero leaves the corresponding variables untouched.
pub fn gaussian_smooth(f: &PhaseField, tx: f64, tk: f64) -> PhaseField {
    let d = f.grid.dim();
    let mut a = spectral::to_complex(&f.values);
    spectral::ft_axes(&mut a, 0..d, f.grid.hx());
    spectral::ft_axes(&mut a, d..2 * d, f.grid.hk());
    let p = dual_axis(f.grid.nx(), f.grid.hx());
    let q = dual_axis(f.grid.nk(), f.grid.hk());
    for (ix, c) in a.indexed_iter_mut() {
        let mut e = 0.0;
        for axis in 0..d {
            e += tx * p[ix[axis]].powi(2) + tk * q[ix[d + axis]].powi(2);
        }
        *c *= (-0.25 * e).exp();
    }
    spectral::ift_axes(&mut a, d..2 * d, f.grid.hk());
    spectral::ift_axes(&mut a, 0..d, f.grid.hx());
    let (values, _) = spectral::real_part(&a);
    PhaseField { grid: f.grid.clone(), values, epsilon: f.epsilon, time: f.time }
}

/// The Husimi transform: smoothing with parameter eps in both variables.
pub fn husimi_transform(f: &PhaseField) -> Result<PhaseField> {
    if !(f.epsilon > 0.0) {
        return Err(LabError::ClassicalEpsilon);
    }
    Ok(gaussian_smooth(f, f.epsilon, f.epsilon))
}

/// Minimum grid value; for the Husimi transform of a genuine mixed state
/// this should not dip below -1e-12 times the maximum.
pub fn positivity_defect(f: &PhaseField) -> f64 {
    f.values.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// k-second moments before and after smoothing; the difference is exactly
/// d * eps / 2 for a probability field (heat-flow moment identity).
pub fn second_moment_shift(f: &PhaseField) -> Result<(f64, f64)> {
    let smoothed = husimi_transform(f)?;
    Ok((f.second_moment_k(), smoothed.second_moment_k()))
}

/// E1 = -(eps/2) d_x . d_k f~, evaluated spectrally: the dual symbol of the
/// mixed divergence is -(p . q), so E1-hat = (eps/2)(p . q) f~-hat.
pub fn error_e1(f_husimi: &PhaseField) -> Result<PhaseField> {
    let eps = f_husimi.epsilon;
    if !(eps > 0.0) {
        return Err(LabError::ClassicalEpsilon);
    }
    let d = f_husimi.grid.dim();
    let mut a = spectral::to_complex(&f_husimi.values);
    spectral::ft_axes(&mut a, 0..d, f_husimi.grid.hx());
    spectral::ft_axes(&mut a, d..2 * d, f_husimi.grid.hk());
    let p = dual_axis(f_husimi.grid.nx(), f_husimi.grid.hx());
    let q = dual_axis(f_husimi.grid.nk(), f_husimi.grid.hk());
    for (ix, c) in a.indexed_iter_mut() {
        let mut pq = 0.0;
        for axis in 0..d {
            pq += p[ix[axis]] * q[ix[d + axis]];
        }
        *c *= 0.5 * eps * pq;
    }
    spectral::ift_axes(&mut a, d..2 * d, f_husimi.grid.hk());
    spectral::ift_axes(&mut a, 0..d, f_husimi.grid.hx());
    let (values, _) = spectral::real_part(&a);
    Ok(PhaseField {
        grid: f_husimi.grid.clone(),
        values,
        epsilon: eps,
        time: f_husimi.time,
    })
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// E2 assembled from its exact double-Fourier representation: on the dual
/// grid,
///
///   E2-hat(p,q) = -(DS^d/(2pi)^d) sum_S phihat(S) rhohat(S) sinc(eps S.q/2)
///                 (S.q) fhat(p-S, q) e^{-eps q^2/4}
///                 [e^{-eps p^2/4} - e^{-eps((p-S)^2 + S^2)/4}],
///
/// where the bracket is the cancellation-free rearrangement of
/// e^{-eps p^2/4} [1 - e^{-eps S^2/2} e^{eps p.S/2}]. The lambda-average of
/// the translation phase e^{i eps lambda S.q} is the sinc factor. Terms with
/// p - S outside the dual box are dropped (their Fourier weight is below
/// grid resolution), and S is pruned where phihat * rhohat is negligible.
pub fn error_e2(f: &PhaseField, phi: &Potential) -> Result<PhaseField> {
    let eps = f.epsilon;
    if !(eps > 0.0) {
        return Err(LabError::ClassicalEpsilon);
    }
    if phi.is_zero() {
        return Ok(PhaseField::zeros(&f.grid, eps));
    }
    let grid = &f.grid;
    let d = grid.dim();
    let nx = grid.nx();
    let nk = grid.nk();
    let nxd = nx.pow(d as u32);
    let nkd = nk.pow(d as u32);

    // rho-hat on the x-dual grid
    let rho = density(f);
    let mut rho_hat = spectral::to_complex(&rho);
    spectral::ft_axes(&mut rho_hat, 0..d, grid.hx());

    // full phase-space transform of f
    let mut f_hat = spectral::to_complex(&f.values);
    spectral::ft_axes(&mut f_hat, 0..d, grid.hx());
    spectral::ft_axes(&mut f_hat, d..2 * d, grid.hk());
    let f_hat = f_hat.into_shape((nxd, nkd)).unwrap();

    let p_axis = dual_axis(nx, grid.hx());
    let q_axis = dual_axis(nk, grid.hk());

    // signed index vectors, |p|^2 and coordinates for every flat dual index
    let signed = |j: usize, n: usize| -> isize {
        if j < n / 2 {
            j as isize
        } else {
            j as isize - n as isize
        }
    };
    let p_vecs: Vec<Vec<f64>> = (0..nxd)
        .map(|flat| decompose(flat, d, nx).iter().map(|&j| p_axis[j]).collect())
        .collect();
    let p_signed: Vec<Vec<isize>> = (0..nxd)
        .map(|flat| decompose(flat, d, nx).iter().map(|&j| signed(j, nx)).collect())
        .collect();
    let p_sq: Vec<f64> = p_vecs.iter().map(|v| v.iter().map(|x| x * x).sum()).collect();
    let q_vecs: Vec<Vec<f64>> = (0..nkd)
        .map(|flat| decompose(flat, d, nk).iter().map(|&j| q_axis[j]).collect())
        .collect();
    let q_sq: Vec<f64> = q_vecs.iter().map(|v| v.iter().map(|x| x * x).sum()).collect();

    // prune the S-sum where the potential weight is negligible
    let rho_flat = rho_hat.view().into_shape(nxd).unwrap();
    let mut coef: Vec<(usize, Complex64)> = Vec::new();
    let mut max_w: f64 = 0.0;
    for s in 0..nxd {
        let w = phi.fourier(&p_vecs[s]) * rho_flat[s];
        max_w = max_w.max(w.norm());
        coef.push((s, w));
    }
    let cutoff = 1e-18 * max_w;
    coef.retain(|(_, w)| w.norm() > cutoff);

    let ds_over_2pi = 1.0 / (nx as f64 * grid.hx()).powi(d as i32);
    let mut e2_hat = ndarray::Array2::<Complex64>::zeros((nxd, nkd));
    let mut w2 = vec![0.0; nkd];
    for &(s, w) in &coef {
        let sv = &p_vecs[s];
        let ssq = p_sq[s];
        let scoef = w * (-ds_over_2pi);
        for q in 0..nkd {
            let sq: f64 = (0..d).map(|a| sv[a] * q_vecs[q][a]).sum();
            w2[q] = sinc(0.5 * eps * sq) * sq * (-0.25 * eps * q_sq[q]).exp();
        }
        'p_loop: for p in 0..nxd {
            // index of p - S, skipping aliased terms
            let mut pm = 0usize;
            for a in 0..d {
                let v = p_signed[p][a] - p_signed[s][a];
                if v < -(nx as isize) / 2 || v >= nx as isize / 2 {
                    continue 'p_loop;
                }
                pm = pm * nx + v.rem_euclid(nx as isize) as usize;
            }
            let pms = p_sq[pm];
            let bracket =
                (-0.25 * eps * p_sq[p]).exp() - (-0.25 * eps * (pms + ssq)).exp();
            if bracket == 0.0 {
                continue;
            }
            let base = scoef * bracket;
            for q in 0..nkd {
                if w2[q] != 0.0 {
                    e2_hat[(p, q)] += base * w2[q] * f_hat[(pm, q)];
                }
            }
        }
    }

    let mut out = e2_hat
        .into_shape(IxDyn(&grid.shape()))
        .unwrap()
        .into_dyn();
    spectral::ift_axes(&mut out, d..2 * d, grid.hk());
    spectral::ift_axes(&mut out, 0..d, grid.hx());
    let (values, _) = spectral::real_part(&out);
    Ok(PhaseField { grid: grid.clone(), values, epsilon: eps, time: f.time })
}

/// C^infinity cutoff profile: 1 for s <= 0, 0 for s >= 1, bump-quotient
/// smoothstep in between.
fn smooth_step_down(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let h = |u: f64| (-1.0 / u).exp();
        h(1.0 - s) / (h(1.0 - s) + h(s))
    }
}

/// chi_{M0}(|k|): 1 on |k| <= M0/2, 0 on |k| >= M0.
pub fn chi_cutoff(k: &[f64], m0: f64) -> f64 {
    let r = k.iter().map(|x| x * x).sum::<f64>().sqrt();
    smooth_step_down(2.0 * r / m0 - 1.0)
}

/// Classical seed built from a quantum datum per the cutoff-and-renormalize
/// recipe: g0 = chi_{M0} f~0 / int(chi_{M0} f~0).
#[derive(Debug, Clone)]
pub struct SeedReport {
    pub g0: PhaseField,
    /// N = 1 / int(chi f~0)
    pub normalization: f64,
    pub gap: f64,
    /// || f0 - g0 ||_L2 on the shared grid
    pub l2_distance: f64,
    pub h3_norm: f64,
    pub support_radius: f64,
    pub l1_norm: f64,
}

pub fn classical_seed(f0: &PhaseField, m0: f64) -> Result<SeedReport> {
    if !(m0 > 0.0) || m0 >= f0.grid.lk() {
        return Err(LabError::Config(format!("M0 = {m0} outside the k-domain")));
    }
    let smoothed = husimi_transform(f0)?;
    let d = f0.grid.dim();
    let ks = f0.grid.k_axis();
    let mut g = smoothed.values.clone();
    let mut kv = vec![0.0; d];
    for (ix, v) in g.indexed_iter_mut() {
        for a in 0..d {
            kv[a] = ks[ix[d + a]];
        }
        *v *= chi_cutoff(&kv, m0);
    }
    let mut g0 = PhaseField { grid: f0.grid.clone(), values: g, epsilon: 0.0, time: f0.time };
    let norm = g0.integrate();
    if norm <= 0.0 {
        return Err(LabError::DegenerateSeed(norm));
    }
    let n = 1.0 / norm;
    g0.values *= n;
    let diff = PhaseField {
        grid: f0.grid.clone(),
        values: &f0.values - &g0.values,
        epsilon: 0.0,
        time: f0.time,
    };
    let gmax = g0.max();
    let radius = support_radius(&g0, 1e-9 * gmax);
    Ok(SeedReport {
        normalization: n,
        gap: (1.0 - n).abs(),
        l2_distance: diff.l2_norm(),
        h3_norm: g0.sobolev_norm(3)?,
        support_radius: radius,
        l1_norm: f0.l1_norm(),
        g0,
    })
}
