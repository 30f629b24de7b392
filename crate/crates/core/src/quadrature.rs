//! Numerical integration and 1-D maximization kernels.

use crate::error::{Error, Result};

/// Gauss–Laguerre rule for `∫_0^∞ e^{-x} f(x) dx`.
#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLaguerre {
    /// Builds the `n`-point rule with the Golub–Welsch method: nodes are the
    /// eigenvalues of the Jacobi matrix of the Laguerre recurrence and weights
    /// are the squared first components of its eigenvectors.
    pub fn new(n: usize) -> Result<Self> {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut diag: Vec<f64> = (0..n).map(|k| (2 * k + 1) as f64).collect();
        let mut off: Vec<f64> = (1..=n)
            .map(|k| if k < n { k as f64 } else { 0.0 })
            .collect();
        let mut first = vec![0.0; n];
        first[0] = 1.0;
        tridiagonal_ql(&mut diag, &mut off, &mut first)?;

        let mut pairs: Vec<(f64, f64)> = diag
            .into_iter()
            .zip(first)
            .map(|(x, v)| (x, v * v))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule to `f`; the `e^{-x}` weight is implicit.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Result of a node-doubling Gauss–Laguerre run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreEstimate {
    pub value: f64,
    pub nodes: usize,
    pub relative_change: f64,
}

/// Integrates `∫_0^∞ e^{-x} f(x) dx`, doubling the node count from 8 until two
/// successive estimates agree to `rel_tol` or `max_nodes` is reached.
pub fn laguerre_doubling<F: Fn(f64) -> f64>(
    f: F,
    rel_tol: f64,
    max_nodes: usize,
) -> Result<LaguerreEstimate> {
    let mut n = 8;
    let mut prev = GaussLaguerre::new(n)?.integrate(&f);
    loop {
        n *= 2;
        if n > max_nodes {
            return Err(Error::Quadrature {
                achieved: f64::NAN,
                requested: rel_tol,
            });
        }
        let next = GaussLaguerre::new(n)?.integrate(&f);
        let change = if next == 0.0 {
            (next - prev).abs()
        } else {
            ((next - prev) / next).abs()
        };
        if change < rel_tol {
            return Ok(LaguerreEstimate {
                value: next,
                nodes: n,
                relative_change: change,
            });
        }
        if n * 2 > max_nodes {
            return Err(Error::Quadrature {
                achieved: change,
                requested: rel_tol,
            });
        }
        prev = next;
    }
}

/// Implicit QL on a symmetric tridiagonal matrix. `diag` is overwritten with
/// the eigenvalues, `off[i]` couples `i` and `i+1` (last entry ignored), and
/// `first` tracks the first row of the eigenvector matrix.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64], first: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n == 1 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::NonConvergence {
                    method: "tridiagonal QL",
                    iterations,
                    residual: off[l].abs(),
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let z = first[i + 1];
                first[i + 1] = s * first[i] + c * z;
                first[i] = c * first[i] - s * z;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod_segment<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK[..7].iter().enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub segments: usize,
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// Subdivides the segment with the largest error estimate until the total
/// error is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Integral> {
    const MAX_SEGMENTS: usize = 4000;
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            segments: 0,
        });
    }
    let mut segments = vec![kronrod_segment(&f, a, b)];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Integral {
                value,
                error,
                segments: segments.len(),
            });
        }
        if segments.len() >= MAX_SEGMENTS {
            let achieved = if value != 0.0 {
                error / value.abs()
            } else {
                error
            };
            return Err(Error::Quadrature {
                achieved,
                requested: rel_tol,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("segment list is never empty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        segments.push(kronrod_segment(&f, seg.a, mid));
        segments.push(kronrod_segment(&f, mid, seg.b));
    }
}

/// Adaptive integration over `[a, ∞)` through `x = a + scale·t/(1-t)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Integral> {
    let mapped = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - t;
        let x = a + scale * t / one_minus;
        f(x) * scale / (one_minus * one_minus)
    };
    integrate_adaptive(mapped, 0.0, 1.0, rel_tol, abs_tol)
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(x, f(x))` once the bracket is narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_integrates_monomials_exactly() {
        // ∫ e^{-x} x^k = k!, exact for k ≤ 2n-1
        let rule = GaussLaguerre::new(10).unwrap();
        let mut fact = 1.0;
        for k in 0..19 {
            if k > 0 {
                fact *= k as f64;
            }
            let got = rule.integrate(|x| x.powi(k));
            assert!(
                ((got - fact) / fact).abs() < 1e-10,
                "k={k}: {got} vs {fact}"
            );
        }
    }

    #[test]
    fn laguerre_weights_sum_to_one() {
        for n in [1, 2, 8, 64, 256] {
            let rule = GaussLaguerre::new(n).unwrap();
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "n={n}: {s}");
        }
    }

    #[test]
    fn laguerre_two_point_nodes() {
        // roots of L_2 = (x² - 4x + 2)/2
        let rule = GaussLaguerre::new(2).unwrap();
        assert!((rule.nodes()[0] - (2.0 - 2f64.sqrt())).abs() < 1e-14);
        assert!((rule.nodes()[1] - (2.0 + 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn doubling_converges_on_smooth_oscillation() {
        // ∫ e^{-x} cos(x/2) dx = 1/(1 + 1/4)
        let est = laguerre_doubling(|x| (0.5 * x).cos(), 1e-10, 1024).unwrap();
        assert!((est.value - 0.8).abs() < 1e-10);
    }

    #[test]
    fn doubling_reports_nonconvergence() {
        let err = laguerre_doubling(|x| (50.0 * x).cos(), 1e-12, 32).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let v = integrate_adaptive(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10, 0.0).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!(((v.value - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn semi_infinite_gaussian() {
        let v = integrate_semi_infinite(|x| (-x * x).exp(), 0.0, 1.0, 1e-11, 0.0).unwrap();
        let exact = std::f64::consts::PI.sqrt() / 2.0;
        assert!(((v.value - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) = golden_section_max(|x| -(x - 1.3) * (x - 1.3) + 2.0, 0.0, 5.0, 1e-9);
        assert!((x - 1.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-12);
    }
}
