//! Composite Gauss-Legendre quadrature for spectral integrals on `(0, b]`.
//!
//! Every integrand in this crate is smooth away from the origin but may
//! carry an integrable power or logarithmic singularity at `lambda = 0`.
//! Panels that shrink geometrically toward the origin make the integrand
//! analytic on each panel after rescaling, so a fixed-order rule converges
//! to near machine precision without adaptive machinery.

/// Positive abscissae of the 16-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_7,
    0.755_404_408_355_003_0,
    0.865_631_202_387_831_7,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];

/// Weights paired with `GL_NODES`.
const GL_WEIGHTS: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_73,
    0.124_628_971_255_533_87,
    0.095_158_511_682_492_79,
    0.062_253_523_938_647_89,
    0.027_152_459_411_754_095,
];

/// 16-point Gauss-Legendre approximation of the integral of `f` over `[a, b]`.
pub(crate) fn integrate_panel(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
        let dx = half * x;
        acc += w * (f(mid - dx) + f(mid + dx));
    }
    acc * half
}

/// Integral of `f` over `(0, b]` with `panels` geometric panels.
///
/// Panel `j` spans `[b / 2^{j+1}, b / 2^j]`; the closing panel `[0, b / 2^panels]`
/// is handled by the same rule, whose nodes stay strictly interior, so `f` is
/// never evaluated at the origin itself.
pub(crate) fn integrate_to_origin(
    mut f: impl FnMut(f64) -> f64,
    b: f64,
    panels: usize,
) -> f64 {
    debug_assert!(b > 0.0 && panels > 0);
    let mut acc = 0.0;
    let mut hi = b;
    for _ in 0..panels {
        let lo = 0.5 * hi;
        acc += integrate_panel(&mut f, lo, hi);
        hi = lo;
    }
    acc + integrate_panel(&mut f, 0.0, hi)
}

/// Nodes and weights of the same composite rule as [`integrate_to_origin`],
/// for callers that tabulate integrand pieces once and reuse them across
/// many evaluations.
pub(crate) fn nodes_to_origin(b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    debug_assert!(b > 0.0 && panels > 0);
    let mut nodes = Vec::with_capacity(16 * (panels + 1));
    let mut weights = Vec::with_capacity(16 * (panels + 1));
    let mut push_panel = |a: f64, b: f64| {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (&x, &w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
            let dx = half * x;
            nodes.push(mid - dx);
            weights.push(w * half);
            nodes.push(mid + dx);
            weights.push(w * half);
        }
    };
    let mut hi = b;
    for _ in 0..panels {
        let lo = 0.5 * hi;
        push_panel(lo, hi);
        hi = lo;
    }
    push_panel(0.0, hi);
    (nodes, weights)
}
