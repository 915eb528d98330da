//! One-dimensional complex FFT plans for arbitrary lengths, backed by
//! `rustfft`. Transforms are unnormalized in both directions.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Kernel `exp(-2 pi i k n / N)`.
    Forward,
    /// Kernel `exp(+2 pi i k n / N)`.
    Inverse,
}

/// Precomputed transform of a fixed length and direction.
#[derive(Clone)]
pub struct FftPlan {
    direction: Direction,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FftPlan")
            .field("len", &self.len())
            .field("direction", &self.direction)
            .finish()
    }
}

impl FftPlan {
    pub fn new(len: usize, direction: Direction) -> Self {
        assert!(len > 0, "FFT length must be positive");
        let fft_direction = match direction {
            Direction::Forward => FftDirection::Forward,
            Direction::Inverse => FftDirection::Inverse,
        };
        FftPlan {
            direction,
            fft: FftPlanner::new().plan_fft(len, fft_direction),
        }
    }

    pub fn len(&self) -> usize {
        self.fft.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Transforms every consecutive `len`-long chunk of `buf` in place.
    /// `scratch` is resized as needed.
    pub fn process(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        assert_eq!(buf.len() % self.len(), 0, "buffer is not a whole number of transforms");
        scratch.resize(self.fft.get_inplace_scratch_len(), Complex64::new(0.0, 0.0));
        self.fft.process_with_scratch(buf, scratch);
    }
}
