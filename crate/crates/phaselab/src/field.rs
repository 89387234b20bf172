//! Real scalar fields on a [`PhaseGrid`]: quadrature, norms, and the binary
//! field format.

use crate::error::{LabError, Result};
use crate::grid::{dual_axis, PhaseGrid};
use crate::spectral;
use ndarray::{ArrayD, IxDyn};
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"WVF1";
pub const VERSION: u32 = 1;

/// Real field sampled on a phase-space grid. `epsilon == 0` encodes a
/// classical (Vlasov) field.
#[derive(Debug, Clone)]
pub struct PhaseField {
    pub grid: PhaseGrid,
    pub values: ArrayD<f64>,
    pub epsilon: f64,
    pub time: f64,
}

impl PhaseField {
    pub fn zeros(grid: &PhaseGrid, epsilon: f64) -> Self {
        PhaseField {
            grid: grid.clone(),
            values: ArrayD::zeros(IxDyn(&grid.shape())),
            epsilon,
            time: 0.0,
        }
    }

    /// Sample a closure of (x, k) coordinate vectors onto the grid.
    pub fn from_fn<F>(grid: &PhaseGrid, epsilon: f64, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64,
    {
        let d = grid.dim();
        let xs = grid.x_axis();
        let ks = grid.k_axis();
        let mut values = ArrayD::zeros(IxDyn(&grid.shape()));
        let mut xv = vec![0.0; d];
        let mut kv = vec![0.0; d];
        for (ix, v) in values.indexed_iter_mut() {
            for a in 0..d {
                xv[a] = xs[ix[a]];
                kv[a] = ks[ix[d + a]];
            }
            *v = f(&xv, &kv);
        }
        PhaseField { grid: grid.clone(), values, epsilon, time: 0.0 }
    }

    /// Rectangle-rule integral (spectrally accurate on periodic data).
    pub fn integrate(&self) -> f64 {
        self.values.sum() * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Sum of L2 norms of all spectral derivatives of order <= m
    /// (the H^m norm in the convention || . || = sum_{|a|<=m} ||d^a . ||).
    pub fn sobolev_norm(&self, m: usize) -> Result<f64> {
        if m > 3 {
            return Err(LabError::SobolevOrder(m));
        }
        if m == 0 {
            return Ok(self.l2_norm());
        }
        let d = self.grid.dim();
        let naxes = 2 * d;
        let mut spec = spectral::to_complex(&self.values);
        spectral::ft_axes(&mut spec, 0..d, self.grid.hx());
        spectral::ft_axes(&mut spec, d..naxes, self.grid.hk());

        let mut axes_freq: Vec<Vec<f64>> = Vec::with_capacity(naxes);
        for _ in 0..d {
            axes_freq.push(dual_axis(self.grid.nx(), self.grid.hx()));
        }
        for _ in 0..d {
            axes_freq.push(dual_axis(self.grid.nk(), self.grid.hk()));
        }
        // Parseval factor: product over axes of dw/(2 pi) = 1/(n*h).
        let mut norm_factor = 1.0;
        norm_factor /= (self.grid.nx() as f64 * self.grid.hx()).powi(d as i32);
        norm_factor /= (self.grid.nk() as f64 * self.grid.hk()).powi(d as i32);

        let mut total = 0.0;
        for alpha in multi_indices(naxes, m) {
            let mut sum = 0.0;
            for (ix, c) in spec.indexed_iter() {
                let mut w = 1.0;
                for a in 0..naxes {
                    if alpha[a] > 0 {
                        w *= axes_freq[a][ix[a]].powi(alpha[a] as i32);
                    }
                }
                sum += w * w * c.norm_sqr();
            }
            total += (sum * norm_factor).sqrt();
        }
        Ok(total)
    }

    /// Second moment of |k|: integral of |k|^2 f dx dk.
    pub fn second_moment_k(&self) -> f64 {
        let d = self.grid.dim();
        let ks = self.grid.k_axis();
        let mut sum = 0.0;
        for (ix, v) in self.values.indexed_iter() {
            let mut k2 = 0.0;
            for a in 0..d {
                let k = ks[ix[d + a]];
                k2 += k * k;
            }
            sum += k2 * v;
        }
        sum * self.grid.cell_volume()
    }

    /// Fraction of |f| mass living in the outer 10% shell of the box, a
    /// diagnostic for truncation-of-support violations.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let d = self.grid.dim();
        let xs = self.grid.x_axis();
        let ks = self.grid.k_axis();
        let bx = 0.9 * self.grid.lx();
        let bk = 0.9 * self.grid.lk();
        let mut outer = 0.0;
        let mut total = 0.0;
        for (ix, v) in self.values.indexed_iter() {
            let a = v.abs();
            total += a;
            let mut shell = false;
            for ax in 0..d {
                if xs[ix[ax]].abs() > bx || ks[ix[d + ax]].abs() > bk {
                    shell = true;
                    break;
                }
            }
            if shell {
                outer += a;
            }
        }
        if total > 0.0 {
            outer / total
        } else {
            0.0
        }
    }

    pub fn dump<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.grid.dim() as u32).to_le_bytes())?;
        w.write_all(&(self.grid.nx() as u64).to_le_bytes())?;
        w.write_all(&(self.grid.nk() as u64).to_le_bytes())?;
        for v in [self.grid.lx(), self.grid.lk(), self.epsilon, self.time] {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in self.values.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<PhaseField> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(LabError::Format(format!("bad magic {magic:?}")));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(LabError::Format(format!("unknown version {version}")));
        }
        let d = read_u32(&mut r)? as usize;
        let nx = read_u64(&mut r)? as usize;
        let nk = read_u64(&mut r)? as usize;
        let lx = read_f64(&mut r)?;
        let lk = read_f64(&mut r)?;
        let epsilon = read_f64(&mut r)?;
        let time = read_f64(&mut r)?;
        let grid = PhaseGrid::new(d, nx, nk, lx, lk)?;
        let len = grid.len();
        let mut payload = vec![0u8; len * 8];
        r.read_exact(&mut payload).map_err(|e| {
            LabError::Format(format!("payload shorter than {} values: {e}", len))
        })?;
        let mut tail = [0u8; 1];
        if r.read(&mut tail)? != 0 {
            return Err(LabError::Format("trailing bytes after payload".into()));
        }
        let values: Vec<f64> = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let values = ArrayD::from_shape_vec(IxDyn(&grid.shape()), values)
            .map_err(|e| LabError::Format(e.to_string()))?;
        Ok(PhaseField { grid, values, epsilon, time })
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}
fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}
fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// All multi-indices over `naxes` axes with 1 <= |alpha| <= m, plus the zero
/// index (order-zero term) first.
fn multi_indices(naxes: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; naxes]];
    let mut stack = vec![(vec![0usize; naxes], 0usize, 0usize)];
    while let Some((cur, axis, used)) = stack.pop() {
        if axis == naxes {
            if used > 0 {
                out.push(cur);
            }
            continue;
        }
        for add in 0..=(m - used) {
            let mut next = cur.clone();
            next[axis] = add;
            stack.push((next, axis + 1, used + add));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1() -> PhaseGrid {
        PhaseGrid::new(1, 64, 64, 6.0, 6.0).unwrap()
    }

    #[test]
    fn integrate_constant_and_zero() {
        let g = PhaseGrid::new(1, 8, 8, 1.0, 1.0).unwrap();
        let zero = PhaseField::zeros(&g, 0.1);
        assert_eq!(zero.integrate(), 0.0);
        let one = PhaseField::from_fn(&g, 0.1, |_, _| 1.0);
        assert!((one.integrate() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn integrate_is_linear() {
        let g = grid1();
        let f = PhaseField::from_fn(&g, 0.1, |x, k| (-x[0].powi(2) - k[0].powi(2)).exp());
        let h = PhaseField::from_fn(&g, 0.1, |x, k| (x[0] * 0.3 + k[0]).sin());
        let mut comb = f.clone();
        comb.values = &f.values * 2.5 + &h.values * (-1.25);
        assert!(
            (comb.integrate() - (2.5 * f.integrate() - 1.25 * h.integrate())).abs() < 1e-12
        );
    }

    #[test]
    fn gaussian_norms_match_closed_forms() {
        // f = exp(-(x^2+k^2)/2): ||f||_2^2 = pi, ||dx f||_2^2 = pi/2, etc.
        let g = PhaseGrid::new(1, 128, 128, 8.0, 8.0).unwrap();
        let f = PhaseField::from_fn(&g, 0.1, |x, k| (-(x[0] * x[0] + k[0] * k[0]) / 2.0).exp());
        let pi = std::f64::consts::PI;
        assert!((f.l2_norm() - pi.sqrt()).abs() < 1e-8);

        // H^1 = ||f|| + ||fx|| + ||fk|| = sqrt(pi) + 2 sqrt(pi/2).
        let h1 = f.sobolev_norm(1).unwrap();
        let expect = pi.sqrt() + 2.0 * (pi / 2.0).sqrt();
        assert!((h1 - expect).abs() < 1e-8, "h1={h1} expect={expect}");

        // ||dx^2 f||^2 = 3 pi / 4, ||dx dk f||^2 = pi/4.
        let h2 = f.sobolev_norm(2).unwrap();
        let expect2 = expect + 2.0 * (3.0 * pi / 4.0).sqrt() + (pi / 4.0).sqrt();
        assert!((h2 - expect2).abs() < 1e-8, "h2={h2} expect={expect2}");
    }

    #[test]
    fn sobolev_nesting_and_rejection() {
        let g = grid1();
        let f = PhaseField::from_fn(&g, 0.1, |x, k| {
            (std::f64::consts::PI * x[0] / 6.0).sin() * (-k[0] * k[0]).exp()
        });
        let l2 = f.sobolev_norm(0).unwrap();
        assert!((l2 - f.l2_norm()).abs() < 1e-13);
        assert!(f.sobolev_norm(1).unwrap() >= l2);
        assert!(f.sobolev_norm(4).is_err());
        let zero = PhaseField::zeros(&g, 0.1);
        for m in 0..=3 {
            assert_eq!(zero.sobolev_norm(m).unwrap(), 0.0);
        }
    }

    #[test]
    fn parseval_identity() {
        let g = grid1();
        let f = PhaseField::from_fn(&g, 0.2, |x, k| {
            (-(x[0] * x[0] + 2.0 * k[0] * k[0]) / 2.0).exp() * (1.0 + 0.3 * x[0])
        });
        let mut spec = crate::spectral::to_complex(&f.values);
        crate::spectral::ft_axes(&mut spec, 0..1, g.hx());
        crate::spectral::ft_axes(&mut spec, 1..2, g.hk());
        let norm_factor =
            1.0 / ((g.nx() as f64 * g.hx()) * (g.nk() as f64 * g.hk()));
        let spec_l2 = (spec.iter().map(|c| c.norm_sqr()).sum::<f64>() * norm_factor).sqrt();
        assert!((spec_l2 - f.l2_norm()).abs() / f.l2_norm() < 1e-12);
    }

    #[test]
    fn io_round_trip_bit_exact() {
        let g = PhaseGrid::new(1, 16, 16, 2.0, 3.0).unwrap();
        let mut f = PhaseField::from_fn(&g, 0.05, |x, k| x[0] * 7.13 + k[0].cos());
        f.time = 1.5;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.wvf");
        f.dump(&path).unwrap();
        let back = PhaseField::load(&path).unwrap();
        assert_eq!(back.grid, f.grid);
        assert_eq!(back.epsilon.to_bits(), f.epsilon.to_bits());
        assert_eq!(back.time.to_bits(), f.time.to_bits());
        for (a, b) in back.values.iter().zip(f.values.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn io_rejects_corruption() {
        let g = PhaseGrid::new(1, 16, 16, 2.0, 3.0).unwrap();
        let f = PhaseField::zeros(&g, 0.1);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.wvf");
        f.dump(&path).unwrap();

        // Corrupt the magic.
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        let bad = dir.path().join("bad_magic.wvf");
        std::fs::write(&bad, &bytes).unwrap();
        assert!(matches!(PhaseField::load(&bad), Err(LabError::Format(_))));

        // Truncate the payload.
        let good = std::fs::read(&path).unwrap();
        let trunc = dir.path().join("trunc.wvf");
        std::fs::write(&trunc, &good[..good.len() - 16]).unwrap();
        assert!(matches!(PhaseField::load(&trunc), Err(LabError::Format(_))));

        // Header claims d=2 but payload is for d=1: length error.
        let mut lied = good.clone();
        lied[8..12].copy_from_slice(&2u32.to_le_bytes());
        let liar = dir.path().join("lied.wvf");
        std::fs::write(&liar, &lied).unwrap();
        assert!(matches!(PhaseField::load(&liar), Err(LabError::Format(_))));
    }
}
