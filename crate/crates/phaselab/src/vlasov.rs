//! Vlasov solver: the exact classical (eps = 0) counterpart of the Wigner
//! dynamics, run with the same split-step spectral machinery so that L2
//! distances between the two pictures are measured on a shared grid.
//! Also houses the momentum-support diagnostics and the residual r1 that
//! compares the quantum and classical force generators, plus a weighted
//! particle-cloud oracle for cross-validating the grid solver.

use crate::error::{LabError, Result};
use crate::field::PhaseField;
use crate::grid::{dual_axis, PhaseGrid};
use crate::potential::{hartree_field, MeanField, Potential};
use crate::wigner::{self, apply_free_transport, apply_t_eps, apply_t_zero, decompose, density};
use ndarray::{Array2, ArrayD, IxDyn};
use num_complex::Complex64;

/// Exact momentum shift k -> k - dt * d_x V(x) per x-column, applied as the
/// unimodular multiplier exp{i dt y . d_x V(x)} in the k-dual.
pub fn classical_kick(g: &PhaseField, mf: &MeanField, dt: f64) -> Result<PhaseField> {
    let d = g.grid.dim();
    let nx_total = g.grid.nx().pow(d as u32);
    let nk_total = g.grid.nk().pow(d as u32);
    let y = dual_axis(g.grid.nk(), g.grid.hk());
    let mut table = Array2::zeros((nx_total, nk_total));
    for a in 0..d {
        let grad = mf.grad[a].view().into_shape(nx_total).unwrap();
        for ((i, j), t) in table.indexed_iter_mut() {
            let jk = decompose(j, d, g.grid.nk());
            *t += grad[i] * y[jk[a]];
        }
    }
    wigner::kick_with_table(g, &table, move |p| Complex64::from_polar(1.0, dt * p))
}

/// A Vlasov run: Strang splitting kick(dt/2) . transport(dt) . kick(dt/2)
/// with the self-consistent field recomputed before each kick. `m0` is the
/// initial momentum-support radius used for the growth bound M(t).
#[derive(Debug, Clone)]
pub struct VlasovRun {
    pub state: PhaseField,
    pub phi: Potential,
    pub dt: f64,
    pub m0: f64,
}

impl VlasovRun {
    pub fn new(state: PhaseField, phi: Potential, dt: f64, m0: f64) -> Result<Self> {
        if !(dt != 0.0 && dt.is_finite()) {
            return Err(LabError::Config(format!("bad dt {dt}")));
        }
        Ok(VlasovRun { state, phi, dt, m0 })
    }

    pub fn step(&mut self) -> Result<()> {
        let dt = self.dt;
        if !self.phi.is_zero() {
            let mf = hartree_field(&density(&self.state), &self.state.grid, &self.phi)?;
            self.state = classical_kick(&self.state, &mf, 0.5 * dt)?;
        }
        self.state = apply_free_transport(&self.state, dt);
        if !self.phi.is_zero() {
            let mf = hartree_field(&density(&self.state), &self.state.grid, &self.phi)?;
            self.state = classical_kick(&self.state, &mf, 0.5 * dt)?;
        }
        self.state.time += dt;
        if !self.state.is_finite() {
            return Err(LabError::NanDetected(self.state.time));
        }
        Ok(())
    }

    pub fn run_until(&mut self, t: f64) -> Result<()> {
        let steps = ((t - self.state.time) / self.dt).round() as usize;
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }

    pub fn support_bound(&self, t: f64) -> f64 {
        support_bound(t, self.m0, &self.phi)
    }
}

pub fn vlasov_step(run: &mut VlasovRun) -> Result<()> {
    run.step()
}

/// Largest |k| over grid points where |g| exceeds the threshold
/// (default: 1e-9 * max |g|; pass that value explicitly).
pub fn support_radius(g: &PhaseField, threshold: f64) -> f64 {
    let d = g.grid.dim();
    let ks = g.grid.k_axis();
    let mut radius: f64 = 0.0;
    for (ix, v) in g.values.indexed_iter() {
        if v.abs() > threshold {
            let r2: f64 = (0..d).map(|a| ks[ix[d + a]].powi(2)).sum();
            radius = radius.max(r2.sqrt());
        }
    }
    radius
}

/// Momentum-support growth bound M(t) = M0 + ||d_x phi||_inf * t.
pub fn support_bound(t: f64, m0: f64, phi: &Potential) -> f64 {
    m0 + phi.grad_sup_norm() * t
}

/// r1 = || (T_eps^{f~} - T_0^{f~}) g ||_L2 with the mean field built from
/// the Husimi density rho^{f~}.
pub fn residual_r1(g: &PhaseField, f_husimi: &PhaseField, phi: &Potential, eps: f64) -> Result<f64> {
    if phi.is_zero() {
        return Ok(0.0);
    }
    let mf = hartree_field(&density(f_husimi), &g.grid, phi)?;
    let te = apply_t_eps(g, &mf, eps)?;
    let t0 = apply_t_zero(g, &mf);
    let diff = PhaseField {
        grid: g.grid.clone(),
        values: &te.values - &t0.values,
        epsilon: g.epsilon,
        time: g.time,
    };
    Ok(diff.l2_norm())
}

/// Weighted particle cloud sampled from a phase-space density.
#[derive(Debug, Clone)]
pub struct ParticleCloud {
    pub d: usize,
    /// Flattened positions, particle-major: [x_0^(0)..x_{d-1}^(0), x_0^(1), ...].
    pub x: Vec<f64>,
    pub k: Vec<f64>,
    pub w: Vec<f64>,
}

impl ParticleCloud {
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Cloud-in-cell deposition of the spatial density onto the x-grid,
    /// with periodic wrapping.
    pub fn deposit_density(&self, grid: &PhaseGrid) -> ArrayD<f64> {
        let d = self.d;
        let shape = vec![grid.nx(); d];
        let mut rho = ArrayD::zeros(IxDyn(&shape));
        let inv_vol = 1.0 / grid.hx().powi(d as i32);
        let mut lo = vec![0usize; d];
        let mut frac = vec![0.0; d];
        for p in 0..self.len() {
            for a in 0..d {
                let s = (self.x[p * d + a] + grid.lx()) / grid.hx();
                let base = s.floor();
                frac[a] = s - base;
                lo[a] = (base.rem_euclid(grid.nx() as f64)) as usize % grid.nx();
            }
            let wp = self.w[p] * inv_vol;
            // 2^d corner weights
            for corner in 0..(1usize << d) {
                let mut ix = vec![0usize; d];
                let mut cw = wp;
                for a in 0..d {
                    if corner >> a & 1 == 1 {
                        ix[a] = (lo[a] + 1) % grid.nx();
                        cw *= frac[a];
                    } else {
                        ix[a] = lo[a];
                        cw *= 1.0 - frac[a];
                    }
                }
                rho[IxDyn(&ix)] += cw;
            }
        }
        rho
    }

    /// Kinetic plus Hartree potential energy of the cloud, the potential
    /// term evaluated from the deposited density.
    pub fn energy(&self, grid: &PhaseGrid, phi: &Potential) -> f64 {
        let d = self.d;
        let kinetic: f64 = (0..self.len())
            .map(|p| {
                let k2: f64 = (0..d).map(|a| self.k[p * d + a].powi(2)).sum();
                0.5 * k2 * self.w[p]
            })
            .sum();
        if phi.is_zero() {
            return kinetic;
        }
        let rho = self.deposit_density(grid);
        let mf = hartree_field(&rho, grid, phi).expect("deposited density matches grid");
        let hxd = grid.hx().powi(d as i32);
        let pot: f64 = rho.iter().zip(mf.v.iter()).map(|(r, v)| r * v).sum::<f64>() * hxd;
        kinetic + 0.5 * pot
    }

    /// Exact energy of the particle system itself: kinetic plus the pairwise
    /// interaction (1/2) sum w_p w_q phi(x_p - x_q). O(N^2); diagnostics only.
    pub fn energy_pairwise(&self, phi: &Potential) -> f64 {
        let d = self.d;
        let n = self.len();
        let kinetic: f64 = (0..n)
            .map(|p| {
                let k2: f64 = (0..d).map(|a| self.k[p * d + a].powi(2)).sum();
                0.5 * k2 * self.w[p]
            })
            .sum();
        if phi.is_zero() {
            return kinetic;
        }
        let mut pot = 0.0;
        let mut dx = vec![0.0; d];
        for p in 0..n {
            for q in 0..n {
                for a in 0..d {
                    dx[a] = self.x[p * d + a] - self.x[q * d + a];
                }
                pot += self.w[p] * self.w[q] * phi.eval(&dx);
            }
        }
        kinetic + 0.5 * pot
    }

    /// Full phase-space CIC deposition for L2 comparison against the grid
    /// solver (periodic in x, clamped drop for k outside the box).
    pub fn deposit_phase(&self, grid: &PhaseGrid, time: f64) -> PhaseField {
        let d = self.d;
        let mut f = PhaseField::zeros(grid, 0.0);
        f.time = time;
        let inv_vol = 1.0 / grid.cell_volume();
        let mut lo = vec![0usize; 2 * d];
        let mut frac = vec![0.0; 2 * d];
        'particles: for p in 0..self.len() {
            for a in 0..d {
                let s = (self.x[p * d + a] + grid.lx()) / grid.hx();
                let base = s.floor();
                frac[a] = s - base;
                lo[a] = (base.rem_euclid(grid.nx() as f64)) as usize % grid.nx();
            }
            for a in 0..d {
                let s = (self.k[p * d + a] + grid.lk()) / grid.hk();
                let base = s.floor();
                if base < 0.0 || base >= (grid.nk() - 1) as f64 {
                    continue 'particles;
                }
                frac[d + a] = s - base;
                lo[d + a] = base as usize;
            }
            let wp = self.w[p] * inv_vol;
            for corner in 0..(1usize << (2 * d)) {
                let mut ix = vec![0usize; 2 * d];
                let mut cw = wp;
                for a in 0..2 * d {
                    if corner >> a & 1 == 1 {
                        ix[a] = if a < d { (lo[a] + 1) % grid.nx() } else { lo[a] + 1 };
                        cw *= frac[a];
                    } else {
                        ix[a] = lo[a];
                        cw *= 1.0 - frac[a];
                    }
                }
                f.values[IxDyn(&ix)] += cw;
            }
        }
        f
    }
}

/// Multilinear interpolation of an x-grid field at a point (periodic).
fn interp_x(field: &ArrayD<f64>, grid: &PhaseGrid, x: &[f64]) -> f64 {
    let d = grid.dim();
    let mut lo = vec![0usize; d];
    let mut frac = vec![0.0; d];
    for a in 0..d {
        let s = (x[a] + grid.lx()) / grid.hx();
        let base = s.floor();
        frac[a] = s - base;
        lo[a] = (base.rem_euclid(grid.nx() as f64)) as usize % grid.nx();
    }
    let mut out = 0.0;
    for corner in 0..(1usize << d) {
        let mut ix = vec![0usize; d];
        let mut cw = 1.0;
        for a in 0..d {
            if corner >> a & 1 == 1 {
                ix[a] = (lo[a] + 1) % grid.nx();
                cw *= frac[a];
            } else {
                ix[a] = lo[a];
                cw *= 1.0 - frac[a];
            }
        }
        out += cw * field[IxDyn(&ix)];
    }
    out
}

/// Deterministic stratified sampling of g0: one particle per subcell of a
/// uniform m^(2d) lattice over the phase box, weighted by g0 at the subcell
/// center times the subcell volume. Particles with negligible weight are
/// dropped.
fn sample_cloud(g0: &PhaseField, n_particles: usize) -> Result<ParticleCloud> {
    if n_particles < 1000 {
        return Err(LabError::TooFewParticles(n_particles));
    }
    let grid = &g0.grid;
    let d = grid.dim();
    let m = (n_particles as f64).powf(1.0 / (2.0 * d as f64)).round() as usize;
    let hx = 2.0 * grid.lx() / m as f64;
    let hk = 2.0 * grid.lk() / m as f64;
    let vol = (hx * hk).powi(d as i32);
    let gmax = g0.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let cutoff = 1e-12 * gmax;
    let mut cloud = ParticleCloud { d, x: Vec::new(), k: Vec::new(), w: Vec::new() };
    let total = m.pow(2 * d as u32);
    let mut xv = vec![0.0; d];
    let mut kv = vec![0.0; d];
    for flat in 0..total {
        let ix = decompose(flat, 2 * d, m);
        for a in 0..d {
            xv[a] = -grid.lx() + (ix[a] as f64 + 0.5) * hx;
            kv[a] = -grid.lk() + (ix[d + a] as f64 + 0.5) * hk;
        }
        // interpolate g0 at the center (bilinear over the full phase grid)
        let w = interp_phase(g0, &xv, &kv) * vol;
        if w.abs() > cutoff {
            cloud.x.extend_from_slice(&xv);
            cloud.k.extend_from_slice(&kv);
            cloud.w.push(w);
        }
    }
    Ok(cloud)
}

/// Multilinear interpolation on the full phase grid (periodic in x,
/// clamped to zero outside the k-box).
fn interp_phase(g: &PhaseField, x: &[f64], k: &[f64]) -> f64 {
    let grid = &g.grid;
    let d = grid.dim();
    let mut lo = vec![0usize; 2 * d];
    let mut frac = vec![0.0; 2 * d];
    for a in 0..d {
        let s = (x[a] + grid.lx()) / grid.hx();
        let base = s.floor();
        frac[a] = s - base;
        lo[a] = (base.rem_euclid(grid.nx() as f64)) as usize % grid.nx();
    }
    for a in 0..d {
        let s = (k[a] + grid.lk()) / grid.hk();
        let base = s.floor();
        if base < 0.0 || base >= (grid.nk() - 1) as f64 {
            return 0.0;
        }
        frac[d + a] = s - base;
        lo[d + a] = base as usize;
    }
    let mut out = 0.0;
    for corner in 0..(1usize << (2 * d)) {
        let mut ix = vec![0usize; 2 * d];
        let mut cw = 1.0;
        for a in 0..2 * d {
            if corner >> a & 1 == 1 {
                ix[a] = if a < d { (lo[a] + 1) % grid.nx() } else { lo[a] + 1 };
                cw *= frac[a];
            } else {
                ix[a] = lo[a];
                cw *= 1.0 - frac[a];
            }
        }
        out += cw * g.values[IxDyn(&ix)];
    }
    out
}

/// One RK4 push of the whole cloud under a force field frozen for the step:
/// xdot = k, kdot = -grad V(x), with the force looked up by interpolation.
fn rk4_push(cloud: &mut ParticleCloud, grid: &PhaseGrid, grad: &[ArrayD<f64>], dt: f64) {
    let d = cloud.d;
    let force = |x: &[f64], out: &mut [f64]| {
        for a in 0..d {
            out[a] = -interp_x(&grad[a], grid, x);
        }
    };
    let n = cloud.len();
    let mut f1 = vec![0.0; d];
    let mut f2 = vec![0.0; d];
    let mut f3 = vec![0.0; d];
    let mut f4 = vec![0.0; d];
    let mut xt = vec![0.0; d];
    for p in 0..n {
        let x0 = &cloud.x[p * d..(p + 1) * d].to_vec();
        let k0 = &cloud.k[p * d..(p + 1) * d].to_vec();
        force(x0, &mut f1);
        for a in 0..d {
            xt[a] = x0[a] + 0.5 * dt * k0[a];
        }
        force(&xt, &mut f2);
        for a in 0..d {
            xt[a] = x0[a] + 0.5 * dt * (k0[a] + 0.5 * dt * f1[a]);
        }
        force(&xt, &mut f3);
        for a in 0..d {
            xt[a] = x0[a] + dt * (k0[a] + 0.5 * dt * f2[a]);
        }
        force(&xt, &mut f4);
        for a in 0..d {
            cloud.x[p * d + a] = x0[a]
                + dt * k0[a]
                + dt * dt / 6.0 * (f1[a] + f2[a] + f3[a]);
            cloud.k[p * d + a] =
                k0[a] + dt / 6.0 * (f1[a] + 2.0 * f2[a] + 2.0 * f3[a] + f4[a]);
            // wrap x back into the periodic box
            let l = grid.lx();
            let mut xa = cloud.x[p * d + a];
            xa = (xa + l).rem_euclid(2.0 * l) - l;
            cloud.x[p * d + a] = xa;
        }
    }
}

/// Forward-integrated characteristics oracle: samples g0 into a weighted
/// cloud and pushes it with RK4 under the self-consistent force recomputed
/// from the deposited density at the start of each step. For grid-solver
/// cross-validation only.
pub fn characteristics_oracle(
    g0: &PhaseField,
    phi: &Potential,
    t: f64,
    dt: f64,
    n_particles: usize,
) -> Result<ParticleCloud> {
    let mut cloud = sample_cloud(g0, n_particles)?;
    let steps = (t / dt).round().max(0.0) as usize;
    let grid = &g0.grid;
    let zero_grad: Vec<ArrayD<f64>> =
        (0..grid.dim()).map(|_| ArrayD::zeros(IxDyn(&vec![grid.nx(); grid.dim()]))).collect();
    for _ in 0..steps {
        if phi.is_zero() {
            rk4_push(&mut cloud, grid, &zero_grad, dt);
        } else {
            let rho = cloud.deposit_density(grid);
            let mf = hartree_field(&rho, grid, phi)?;
            rk4_push(&mut cloud, grid, &mf.grad, dt);
        }
    }
    Ok(cloud)
}
