//! Unnormalized 3-D complex FFT on an `n³` cube stored with x₁ fastest.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Direction of a transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Planned forward/inverse 1-D transforms reused along every axis.
#[derive(Clone)]
pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn plan(&self, dir: Direction) -> &Arc<dyn Fft<f64>> {
        match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        }
    }

    /// In-place transform along all three axes. No normalization is applied.
    pub fn transform(&self, data: &mut [Complex64], dir: Direction) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "buffer is not n^3");
        let plan = self.plan(dir);
        let slab = n * n;

        // x1: contiguous rows, x2: transpose each slab to rows and back.
        data.par_chunks_mut(slab).for_each(|s| {
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            plan.process_with_scratch(s, &mut scratch);
            transpose_square(s, n);
            plan.process_with_scratch(s, &mut scratch);
            transpose_square(s, n);
        });

        // x3: out-of-place transpose (n x n²) -> (n² x n).
        let mut buf = vec![Complex64::default(); data.len()];
        buf.par_chunks_mut(n * n)
            .enumerate()
            .for_each(|(block, out)| {
                // rows j in [block*n, block*n + n) of the transposed matrix
                for local in 0..n {
                    let j = block * n + local;
                    for i3 in 0..n {
                        out[local * n + i3] = data[i3 * slab + j];
                    }
                }
            });
        buf.par_chunks_mut(slab).for_each(|s| {
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            plan.process_with_scratch(s, &mut scratch);
        });
        data.par_chunks_mut(slab).enumerate().for_each(|(i3, s)| {
            for (j, x) in s.iter_mut().enumerate() {
                *x = buf[j * n + i3];
            }
        });
    }
}

fn transpose_square(s: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            s.swap(i * n + j, j * n + i);
        }
    }
}
