//! Two-dimensional complex FFT on p×p row-major grids.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// In-place 2-D DFT of a `p×p` row-major grid, unnormalized.
pub(crate) fn fft2d(data: &mut [Complex64], p: usize, direction: FftDirection) {
    assert_eq!(data.len(), p * p);
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft(p, direction);
    fft.process(data);
    transpose(data, p);
    fft.process(data);
    transpose(data, p);
}

fn transpose(data: &mut [Complex64], p: usize) {
    for i in 0..p {
        for j in (i + 1)..p {
            data.swap(i * p + j, j * p + i);
        }
    }
}
