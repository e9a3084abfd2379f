//! One-dimensional minimization along geodesics.
//!
//! Everything here operates on scalar slices `t ↦ h(t)` that are convex (or
//! at least unimodal) because the functions we minimize are convex along
//! geodesics in a CAT(0) space. Golden-section search therefore converges to
//! the global minimizer of the slice without derivatives.

/// Inverse golden ratio, (√5 − 1) / 2.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Options for the scalar search routines.
#[derive(Clone, Copy, Debug)]
pub struct LineSearch {
    /// Final bracket width; the returned abscissa is the bracket midpoint.
    pub tol: f64,
    /// Hard cap on golden-section iterations.
    pub max_iter: usize,
}

impl Default for LineSearch {
    fn default() -> Self {
        LineSearch {
            tol: 1e-12,
            max_iter: 200,
        }
    }
}

impl LineSearch {
    pub fn with_tol(tol: f64) -> Self {
        LineSearch {
            tol,
            ..Self::default()
        }
    }

    /// Golden-section minimization of `h` on `[lo, hi]`, followed by a
    /// parabolic-vertex polish.
    ///
    /// Comparison-based search alone cannot place a smooth minimum better
    /// than ≈ √ε·scale (the function differences drown in rounding), so two
    /// three-point parabola fits at decreasing spacing recover the missing
    /// digits; on kinks and plateaus the fits are rejected and the golden
    /// bracket stands. Ties break toward the smaller abscissa.
    pub fn golden_min<F: FnMut(f64) -> f64>(&self, mut h: F, lo: f64, hi: f64) -> (f64, f64) {
        debug_assert!(lo <= hi);
        let mut a = lo;
        let mut b = hi;
        if b - a > self.tol {
            let mut x1 = b - INV_PHI * (b - a);
            let mut x2 = a + INV_PHI * (b - a);
            let mut f1 = h(x1);
            let mut f2 = h(x2);
            for _ in 0..self.max_iter {
                if b - a <= self.tol.max(1e-9 * (hi - lo)) {
                    break;
                }
                if f1 <= f2 {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - INV_PHI * (b - a);
                    f1 = h(x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + INV_PHI * (b - a);
                    f2 = h(x2);
                }
            }
        }
        let mut t = 0.5 * (a + b);
        let mut v = h(t);
        let span = hi - lo;
        for step in [1e-3 * span, 1e-5 * span] {
            if span <= 2.5 * step {
                break;
            }
            let mid = t.clamp(lo + step, hi - step);
            let (tm, tp) = (mid - step, mid + step);
            let (fm, f0, fp) = (h(tm), h(mid), h(tp));
            // Vertex of the interpolating parabola; skip when the curvature
            // signal is lost in noise or the slice is not locally convex.
            let denom = fm - 2.0 * f0 + fp;
            if denom <= 0.0 || denom.is_nan() {
                continue;
            }
            let vertex = (mid + 0.5 * step * (fm - fp) / denom).clamp(lo, hi);
            let fv = h(vertex);
            if fv <= v {
                t = vertex;
                v = fv;
            }
        }
        (t, v)
    }

    /// Minimize `h` over `[lo, hi]` where either end may be infinite.
    ///
    /// Both ends finite reduces to [`LineSearch::golden_min`]. An infinite
    /// end is replaced by doubling expansion from `±initial_step` until the
    /// edge value starts rising, which brackets the minimizer of a convex
    /// slice. `t = 0` must be feasible; the result never exceeds `h(0)`.
    pub fn golden_min_within<F: FnMut(f64) -> f64>(
        &self,
        mut h: F,
        lo: f64,
        hi: f64,
        initial_step: f64,
    ) -> (f64, f64) {
        let f0 = h(0.0);
        let step = initial_step.max(self.tol);
        let mut a = if lo.is_finite() { lo } else { -step };
        let mut b = if hi.is_finite() { hi } else { step };
        if !hi.is_finite() {
            let mut prev = h(b);
            for _ in 0..200 {
                let next_b = b * 2.0;
                let next = h(next_b);
                if next >= prev && prev >= f0 {
                    break;
                }
                b = next_b;
                prev = next;
            }
            b *= 2.0;
        }
        if !lo.is_finite() {
            let mut prev = h(a);
            for _ in 0..200 {
                let next_a = a * 2.0;
                let next = h(next_a);
                if next >= prev && prev >= f0 {
                    break;
                }
                a = next_a;
                prev = next;
            }
            a *= 2.0;
        }
        let (t, v) = self.golden_min(&mut h, a, b);
        if v <= f0 {
            (t, v)
        } else {
            (0.0, f0)
        }
    }
}
