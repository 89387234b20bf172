//! Uniform periodic tensor grids on the truncated phase space
//! [-lx, lx)^d x [-lk, lk)^d, together with their DFT-dual axes.

use crate::error::{LabError, Result};

/// Phase-space grid. Position axes carry `nx` points each, momentum axes
/// `nk` points each; both counts are powers of two so every axis is an
/// exact FFT length.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    d: usize,
    nx: usize,
    nk: usize,
    lx: f64,
    lk: f64,
}

impl PhaseGrid {
    pub fn new(d: usize, nx: usize, nk: usize, lx: f64, lk: f64) -> Result<Self> {
        if d < 1 {
            return Err(LabError::BadDimension(d));
        }
        let pow2 = |n: usize| n >= 8 && n.is_power_of_two();
        if !pow2(nx) || !pow2(nk) {
            return Err(LabError::BadGridSize { nx, nk });
        }
        if !(lx > 0.0) || !(lk > 0.0) {
            return Err(LabError::BadExtent { lx, lk });
        }
        Ok(PhaseGrid { d, nx, nk, lx, lk })
    }

    pub fn dim(&self) -> usize {
        self.d
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn nk(&self) -> usize {
        self.nk
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn lk(&self) -> f64 {
        self.lk
    }
    pub fn hx(&self) -> f64 {
        2.0 * self.lx / self.nx as f64
    }
    pub fn hk(&self) -> f64 {
        2.0 * self.lk / self.nk as f64
    }

    /// Quadrature weight of one phase-space cell, hx^d * hk^d.
    pub fn cell_volume(&self) -> f64 {
        self.hx().powi(self.d as i32) * self.hk().powi(self.d as i32)
    }

    /// Field shape: d position axes followed by d momentum axes
    /// (momentum fastest-varying in row-major order).
    pub fn shape(&self) -> Vec<usize> {
        let mut s = vec![self.nx; self.d];
        s.extend(std::iter::repeat(self.nk).take(self.d));
        s
    }

    pub fn len(&self) -> usize {
        self.nx.pow(self.d as u32) * self.nk.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_axis(&self) -> Vec<f64> {
        let h = self.hx();
        (0..self.nx).map(|i| -self.lx + i as f64 * h).collect()
    }

    pub fn k_axis(&self) -> Vec<f64> {
        let h = self.hk();
        (0..self.nk).map(|i| -self.lk + i as f64 * h).collect()
    }

    /// DFT-dual of the position axis, FFT-ordered: xi_j = pi * j / lx with
    /// j = 0..nx/2-1, -nx/2..-1.
    pub fn xi_axis(&self) -> Vec<f64> {
        dual_axis(self.nx, self.hx())
    }

    /// DFT-dual of the momentum axis, FFT-ordered: y_j = pi * j / lk.
    pub fn y_axis(&self) -> Vec<f64> {
        dual_axis(self.nk, self.hk())
    }
}

/// FFT-ordered dual axis of a uniform axis with `n` points and the given
/// spacing: frequencies 2*pi*j/(n*spacing) with signed index j.
pub fn dual_axis(n: usize, spacing: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / (n as f64 * spacing);
    (0..n)
        .map(|j| {
            let js = if j < n / 2 { j as isize } else { j as isize - n as isize };
            base * js as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacings_match_spec_examples() {
        let g = PhaseGrid::new(1, 8, 8, 1.0, 1.0).unwrap();
        assert_eq!(g.hx(), 0.25);
        assert_eq!(g.hk(), 0.25);

        let g = PhaseGrid::new(1, 256, 256, 8.0, 8.0).unwrap();
        assert_eq!(g.hx(), 0.0625);
        assert_eq!(g.hk(), 0.0625);

        let g = PhaseGrid::new(2, 64, 64, 4.0, 4.0).unwrap();
        assert_eq!(g.shape(), vec![64, 64, 64, 64]);
    }

    #[test]
    fn quadrature_weight_consistency() {
        let g = PhaseGrid::new(1, 64, 128, 3.0, 5.0).unwrap();
        // hx*nx = 2lx and hk*nk = 2lk, so hx*hk*nx*nk is the box area.
        let box_area = 4.0 * g.lx() * g.lk();
        assert!((g.hx() * g.hk() * g.nx() as f64 * g.nk() as f64 - box_area).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PhaseGrid::new(1, 12, 8, 1.0, 1.0).is_err());
        assert!(PhaseGrid::new(1, 4, 8, 1.0, 1.0).is_err());
        assert!(PhaseGrid::new(1, 8, 8, -1.0, 1.0).is_err());
        assert!(PhaseGrid::new(0, 8, 8, 1.0, 1.0).is_err());
    }

    #[test]
    fn dual_axes_are_standard_dft_frequencies() {
        let g = PhaseGrid::new(1, 8, 8, 2.0, 2.0).unwrap();
        let xi = g.xi_axis();
        let base = std::f64::consts::PI / 2.0;
        assert!((xi[0] - 0.0).abs() < 1e-15);
        assert!((xi[1] - base).abs() < 1e-15);
        assert!((xi[4] - (-4.0 * base)).abs() < 1e-15);
        assert!((xi[7] - (-base)).abs() < 1e-15);
    }
}
