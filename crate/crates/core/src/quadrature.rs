//! One-dimensional quadrature primitives.
//!
//! Gauss–Legendre rules (used for sphere grids and radial pieces), an
//! adaptive Gauss–Kronrod 7/15 integrator (profile integrals, line integrals,
//! cutoff functions) and Chebyshev–Lobatto rules with barycentric
//! interpolation (radial shell discretization of the scattering kernels).

use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Value of an adaptive integration together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

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

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over [a, b] to an
/// absolute tolerance. Reversed limits give the negated integral.
///
/// The returned error estimate is the sum of the local |K15 - G7|
/// differences; it is usually pessimistic by several orders of magnitude for
/// smooth integrands.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> QuadratureResult {
    if a == b {
        return QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        };
    }
    if a > b {
        let r = integrate(f, b, a, abs_tol);
        return QuadratureResult { value: -r.value, ..r };
    }
    const MAX_SEGMENTS: usize = 4000;
    let min_width = (b - a) * 1e-13;
    let (v, e) = gk15(&f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total_error = e;
    // Segments too narrow to split are retired here.
    let mut retired_value = 0.0;
    let mut retired_error = 0.0;
    while total_error + retired_error > abs_tol && heap.len() < MAX_SEGMENTS {
        let Some(seg) = heap.pop() else { break };
        total_error -= seg.error;
        if seg.b - seg.a < min_width {
            retired_value += seg.value;
            retired_error += seg.error;
            continue;
        }
        let mid = 0.5 * (seg.a + seg.b);
        let (v1, e1) = gk15(&f, seg.a, mid);
        let (v2, e2) = gk15(&f, mid, seg.b);
        evaluations += 30;
        total_error += e1 + e2;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed the drift of the running error total.
    let value = heap.iter().map(|s| s.value).sum::<f64>() + retired_value;
    let error = heap.iter().map(|s| s.error).sum::<f64>() + retired_error;
    QuadratureResult {
        value,
        abs_error_estimate: error.max(0.0),
        evaluations,
    }
}

/// Chebyshev–Lobatto nodes on [a, b] (ascending) with Clenshaw–Curtis weights.
#[derive(Debug, Clone)]
pub struct ChebyshevRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    a: f64,
    b: f64,
    bary: Vec<f64>,
}

impl ChebyshevRule {
    pub fn new(n: usize, a: f64, b: f64) -> Self {
        assert!(n >= 2, "Chebyshev rule needs at least two nodes");
        let intervals = n - 1;
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let theta: Vec<f64> = (0..n).map(|j| PI * j as f64 / intervals as f64).collect();
        // Reference nodes cos(theta_j) run from 1 down to -1; store ascending.
        let mut w_ref = vec![0.0; n];
        let nn = intervals as f64;
        if intervals.is_multiple_of(2) {
            w_ref[0] = 1.0 / (nn * nn - 1.0);
            w_ref[intervals] = w_ref[0];
            for j in 1..intervals {
                let mut v = 1.0;
                for k in 1..intervals / 2 {
                    let kf = k as f64;
                    v -= 2.0 * (2.0 * kf * theta[j]).cos() / (4.0 * kf * kf - 1.0);
                }
                v -= (nn * theta[j]).cos() / (nn * nn - 1.0);
                w_ref[j] = 2.0 * v / nn;
            }
        } else {
            w_ref[0] = 1.0 / (nn * nn);
            w_ref[intervals] = w_ref[0];
            for j in 1..intervals {
                let mut v = 1.0;
                for k in 1..=(intervals - 1) / 2 {
                    let kf = k as f64;
                    v -= 2.0 * (2.0 * kf * theta[j]).cos() / (4.0 * kf * kf - 1.0);
                }
                w_ref[j] = 2.0 * v / nn;
            }
        }
        let nodes: Vec<f64> = (0..n).map(|j| mid - half * theta[j].cos()).collect();
        let weights: Vec<f64> = w_ref.iter().map(|w| w * half).collect();
        let bary: Vec<f64> = (0..n)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == intervals {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        Self {
            nodes,
            weights,
            a,
            b,
            bary,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Row of the barycentric interpolation matrix at `t`: the interpolant of
    /// nodal values `v` at `t` is `sum_j row[j] * v[j]`.
    pub fn interpolation_row(&self, t: f64) -> Vec<f64> {
        let n = self.nodes.len();
        let mut row = vec![0.0; n];
        for (j, &x) in self.nodes.iter().enumerate() {
            if (t - x).abs() < 1e-15 * (1.0 + x.abs()) {
                row[j] = 1.0;
                return row;
            }
        }
        let mut denom = 0.0;
        for ((r, &b), &x) in row.iter_mut().zip(&self.bary).zip(&self.nodes) {
            *r = b / (t - x);
            denom += *r;
        }
        for r in &mut row {
            *r /= denom;
        }
        row
    }
}
