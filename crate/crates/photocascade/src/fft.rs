//! Thin wrapper around rustfft with a thread-local plan cache.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// In-place forward DFT, `X_k = sum_j x_j exp(-2 pi i j k / n)`.
pub fn forward(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// In-place unnormalized inverse DFT; divide by `n` to invert `forward`.
pub fn inverse(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}
