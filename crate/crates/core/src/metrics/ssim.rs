use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

/// Side of the uniform SSIM window.
pub const SSIM_WINDOW: usize = 7;

const K1: f64 = 0.01;
const K2: f64 = 0.03;

/// Summed-area table with a zero border row and column.
struct Integral<T> {
    stride: usize,
    sums: Vec<T>,
}

impl<T: Real> Integral<T> {
    fn new(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let stride = n + 1;
        let mut sums = vec![T::zero(); stride * stride];
        for i in 0..n {
            let mut row = T::zero();
            for j in 0..n {
                row = row + f(i, j);
                sums[(i + 1) * stride + j + 1] = sums[i * stride + j + 1] + row;
            }
        }
        Self { stride, sums }
    }

    /// Sum over the `w`×`w` block whose top-left corner is (i, j).
    fn block(&self, i: usize, j: usize, w: usize) -> T {
        let s = self.stride;
        self.sums[(i + w) * s + j + w] - self.sums[i * s + j + w] - self.sums[(i + w) * s + j]
            + self.sums[i * s + j]
    }
}

/// Mean SSIM over all fully-contained 7×7 windows (stride 1, uniform
/// weights, sample variances), with dynamic range 1. Matrices smaller than
/// the window are compared in a single window covering them entirely.
pub fn ssim_matrix<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<T> {
    if a.rows() != b.rows() || a.cols() != b.cols() || !a.is_square() {
        return Err(Error::Shape(format!(
            "SSIM needs two equal square matrices, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let n = a.rows();
    if n < 2 {
        return Err(Error::Domain("SSIM needs at least a 2x2 matrix".into()));
    }
    let w = SSIM_WINDOW.min(n);
    let c1 = T::lit(K1 * K1);
    let c2 = T::lit(K2 * K2);

    let sx = Integral::new(n, |i, j| a.get(i, j));
    let sy = Integral::new(n, |i, j| b.get(i, j));
    let sxx = Integral::new(n, |i, j| a.get(i, j) * a.get(i, j));
    let syy = Integral::new(n, |i, j| b.get(i, j) * b.get(i, j));
    let sxy = Integral::new(n, |i, j| a.get(i, j) * b.get(i, j));

    let count = T::from_count(w * w);
    let dof = T::from_count(w * w - 1);
    let positions = n - w + 1;
    let mut total = T::zero();
    for i in 0..positions {
        for j in 0..positions {
            let (x, y) = (sx.block(i, j, w), sy.block(i, j, w));
            let mx = x / count;
            let my = y / count;
            let vx = (sxx.block(i, j, w) - x * mx) / dof;
            let vy = (syy.block(i, j, w) - y * my) / dof;
            let cov = (sxy.block(i, j, w) - x * my) / dof;
            let num = (T::lit(2.0) * mx * my + c1) * (T::lit(2.0) * cov + c2);
            let den = (mx * mx + my * my + c1) * (vx + vy + c2);
            total = total + num / den;
        }
    }
    Ok(total / T::from_count(positions * positions))
}
