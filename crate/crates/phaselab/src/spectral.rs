//! Axis-wise discrete Fourier transforms normalized as continuous Fourier
//! transforms, so the analytic phase-space formulas apply verbatim on the
//! grid.
//!
//! Convention: F(w_j) = sum_m f(s_m) exp(-i s_m w_j) * h for samples on a
//! symmetric axis s_m = -L + m*h (L = n*h/2), with the inverse carrying the
//! 1/(2*pi) factor. On such an axis this reduces to a plain FFT with an
//! alternating sign twiddle.

use ndarray::{ArrayD, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, dir))
}

/// Forward continuous-normalized transform along `axis`; the axis is assumed
/// to hold samples on a symmetric grid with the given spacing. Output is in
/// FFT (signed-frequency) order.
pub fn ft_axis(data: &mut ArrayD<Complex64>, axis: usize, spacing: f64) {
    let n = data.shape()[axis];
    let fft = plan(n, FftDirection::Forward);
    let mut buf = vec![Complex64::default(); n];
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for mut lane in data.lanes_mut(Axis(axis)) {
        for (b, v) in buf.iter_mut().zip(lane.iter()) {
            *b = *v;
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (j, (v, b)) in lane.iter_mut().zip(buf.iter()).enumerate() {
            let sign = if j % 2 == 0 { spacing } else { -spacing };
            *v = b * sign;
        }
    }
}

/// Inverse of [`ft_axis`].
pub fn ift_axis(data: &mut ArrayD<Complex64>, axis: usize, spacing: f64) {
    let n = data.shape()[axis];
    let fft = plan(n, FftDirection::Inverse);
    let mut buf = vec![Complex64::default(); n];
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let norm = 1.0 / (spacing * n as f64);
    for mut lane in data.lanes_mut(Axis(axis)) {
        for (j, (b, v)) in buf.iter_mut().zip(lane.iter()).enumerate() {
            *b = if j % 2 == 0 { *v } else { -*v };
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (v, b) in lane.iter_mut().zip(buf.iter()) {
            *v = b * norm;
        }
    }
}

/// Forward transform along a contiguous range of axes sharing one spacing.
pub fn ft_axes(data: &mut ArrayD<Complex64>, axes: std::ops::Range<usize>, spacing: f64) {
    for a in axes {
        ft_axis(data, a, spacing);
    }
}

pub fn ift_axes(data: &mut ArrayD<Complex64>, axes: std::ops::Range<usize>, spacing: f64) {
    for a in axes {
        ift_axis(data, a, spacing);
    }
}

pub fn to_complex(values: &ArrayD<f64>) -> ArrayD<Complex64> {
    values.mapv(|v| Complex64::new(v, 0.0))
}

/// Real part, together with the largest imaginary residue left behind by the
/// transform round trip (useful as a realness diagnostic).
pub fn real_part(data: &ArrayD<Complex64>) -> (ArrayD<f64>, f64) {
    let mut max_im = 0.0f64;
    let re = data.mapv(|c| {
        max_im = max_im.max(c.im.abs());
        c.re
    });
    (re, max_im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::IxDyn;

    #[test]
    fn round_trip_is_identity() {
        let n = 32;
        let h = 0.17;
        let mut a = ArrayD::from_shape_fn(IxDyn(&[n]), |ix| {
            let s = -0.5 * n as f64 * h + ix[0] as f64 * h;
            Complex64::new((-s * s).exp(), 0.3 * s)
        });
        let orig = a.clone();
        ft_axis(&mut a, 0, h);
        ift_axis(&mut a, 0, h);
        for (u, v) in a.iter().zip(orig.iter()) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        // FT of exp(-s^2/2) is sqrt(2 pi) exp(-w^2/2).
        let n = 128;
        let l = 10.0;
        let h = 2.0 * l / n as f64;
        let mut a = ArrayD::from_shape_fn(IxDyn(&[n]), |ix| {
            let s = -l + ix[0] as f64 * h;
            Complex64::new((-0.5 * s * s).exp(), 0.0)
        });
        ft_axis(&mut a, 0, h);
        let w = crate::grid::dual_axis(n, h);
        let c = (2.0 * std::f64::consts::PI).sqrt();
        for j in 0..n {
            let expect = c * (-0.5 * w[j] * w[j]).exp();
            assert!(
                (a[[j]].re - expect).abs() < 1e-10 && a[[j]].im.abs() < 1e-10,
                "j={j}: got {}, want {expect}",
                a[[j]]
            );
        }
    }
}
