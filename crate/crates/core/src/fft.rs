//! FFT helpers built on rustfft: padded forward transforms and linear
//! convolution of real sequences.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Smallest size of the form `{1, 3, 5, 7, 9, 15} * 2^k` at or above `n`.
/// These factor into the radixes rustfft executes fastest.
pub(crate) fn good_fft_size(n: usize) -> usize {
    debug_assert!(n > 0);
    let mut best = usize::MAX;
    for &odd in &[1usize, 3, 5, 7, 9, 15] {
        let mut size = odd;
        while size < n {
            size *= 2;
        }
        best = best.min(size);
    }
    best
}

/// Forward DFT of `values` zero-padded to `pad_to` points.
pub(crate) fn dft_forward_padded(values: &[f64], pad_to: usize) -> Vec<Complex<f64>> {
    debug_assert!(pad_to >= values.len());
    let mut buf = vec![Complex::new(0.0, 0.0); pad_to];
    for (slot, &v) in buf.iter_mut().zip(values) {
        slot.re = v;
    }
    FftPlanner::new().plan_fft_forward(pad_to).process(&mut buf);
    buf
}

/// In-place forward DFT, used by the circulant embedding sampler.
pub(crate) fn fft_forward_inplace(buf: &mut [Complex<f64>]) {
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

/// Full linear convolution `a * b` (length `a.len() + b.len() - 1`).
///
/// Both inputs ride through a single complex transform: `a` in the real
/// lane, `b` in the imaginary lane, with the two spectra separated by the
/// conjugate-symmetry split before pointwise multiplication.
pub(crate) fn fft_convolve_full(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert!(!a.is_empty() && !b.is_empty());
    let out_len = a.len() + b.len() - 1;
    let size = good_fft_size(out_len);

    let mut packed = vec![Complex::new(0.0, 0.0); size];
    for (slot, &x) in packed.iter_mut().zip(a) {
        slot.re = x;
    }
    for (slot, &x) in packed.iter_mut().zip(b) {
        slot.im = x;
    }

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut packed);

    let mut product = vec![Complex::new(0.0, 0.0); size];
    for (k, slot) in product.iter_mut().enumerate() {
        let mirror = if k == 0 { 0 } else { size - k };
        let zk = packed[k];
        let zm = packed[mirror].conj();
        let ak = 0.5 * (zk + zm);
        let bk = Complex::new(0.0, -0.5) * (zk - zm);
        *slot = ak * bk;
    }

    planner.plan_fft_inverse(size).process(&mut product);
    let scale = 1.0 / size as f64;
    product[..out_len].iter().map(|c| c.re * scale).collect()
}
