//! Spherical Bessel functions and fully normalized associated Legendre
//! functions.

use std::f64::consts::PI;

/// j_l(z) for l = 0..=max_degree, z > 0, by Miller's downward recurrence.
pub fn spherical_j(max_degree: usize, z: f64) -> Vec<f64> {
    let n = max_degree + 1;
    let start = max_degree + z.ceil() as usize + 32;
    let mut out = vec![0.0; n.max(2)];
    let (mut upper, mut current) = (0.0_f64, 1e-300_f64);
    for l in (0..=start).rev() {
        // current holds the unnormalized j_l
        if l < out.len() {
            out[l] = current;
        }
        if l == 0 {
            break;
        }
        let lower = (2 * l + 1) as f64 / z * current - upper;
        upper = current;
        current = lower;
        if current.abs() > 1e200 {
            upper *= 1e-200;
            current *= 1e-200;
            for v in out.iter_mut() {
                *v *= 1e-200;
            }
        }
    }
    let (s, c) = z.sin_cos();
    let j0 = s / z;
    let j1 = if z < 1e-3 {
        z / 3.0 * (1.0 - z * z / 10.0)
    } else {
        (s / z - c) / z
    };
    // normalize against whichever exact value is better conditioned
    let scale = if j0.abs() >= j1.abs() { j0 / out[0] } else { j1 / out[1] };
    out.truncate(n);
    out.iter_mut().for_each(|v| *v *= scale);
    out
}

/// y_l(z) for l = 0..=max_degree, z > 0, by upward recurrence.
pub fn spherical_y(max_degree: usize, z: f64) -> Vec<f64> {
    let (s, c) = z.sin_cos();
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(-c / z);
    if max_degree >= 1 {
        out.push(-c / (z * z) - s / z);
    }
    for l in 1..max_degree {
        let next = (2 * l + 1) as f64 / z * out[l] - out[l - 1];
        out.push(next);
    }
    out
}

/// Table of P̄_l^m(t) for 0 ≤ m ≤ l ≤ max_degree, normalized so that
/// P̄_l^m(cos φ) e^{imα} is orthonormal on the unit sphere (no Condon–Shortley
/// phase).
#[derive(Debug, Clone)]
pub struct LegendreTable {
    max_degree: usize,
    values: Vec<f64>,
}

impl LegendreTable {
    pub fn new(max_degree: usize, t: f64) -> Self {
        let n = max_degree + 1;
        let mut values = vec![0.0; n * (n + 1) / 2];
        let s = (1.0 - t * t).max(0.0).sqrt();
        let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
        let mut diag = 1.0 / (4.0 * PI).sqrt();
        for m in 0..n {
            if m > 0 {
                diag *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
            }
            values[idx(m, m)] = diag;
            if m + 1 < n {
                values[idx(m + 1, m)] = ((2 * m + 3) as f64).sqrt() * t * diag;
            }
            for l in m + 2..n {
                let a = |l: usize| (((4 * l * l - 1) as f64) / ((l * l - m * m) as f64)).sqrt();
                values[idx(l, m)] = a(l) * (t * values[idx(l - 1, m)] - values[idx(l - 2, m)] / a(l - 1));
            }
        }
        Self { max_degree, values }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// P̄_l^m(t) for m ≤ l.
    pub fn get(&self, l: usize, m: usize) -> f64 {
        debug_assert!(m <= l && l <= self.max_degree);
        self.values[l * (l + 1) / 2 + m]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;

    // scipy.special.spherical_jn / spherical_yn reference values
    const REFERENCE: [(usize, f64, f64, f64); 8] = [
        (0, 0.5, 0.958851077208406, -1.7551651237807455),
        (1, 0.5, 0.1625370306360667, -4.469181324769897),
        (5, 1.3, 0.0003346104779958896, -215.34024040198418),
        (10, 2.0, 6.825300864974743e-08, -355414.72008543834),
        (20, 1.0, 7.537795722236969e-26, -3.2395922185789846e+23),
        (3, 7.5, -0.06171328507405975, 0.12704667901360378),
        (30, 1.0, 5.5668312669813776e-43, -2.9464285474967833e+40),
        (1, 0.001, 0.0003333333000000017, -1000000.499999875),
    ];

    #[test]
    fn bessel_values_match_reference() {
        for (l, z, jv, yv) in REFERENCE {
            let j = spherical_j(l + 3, z)[l];
            let y = spherical_y(l + 3, z)[l];
            assert!((j - jv).abs() <= 1e-13 * jv.abs(), "j_{l}({z}) = {j} vs {jv}");
            assert!((y - yv).abs() <= 1e-13 * yv.abs(), "y_{l}({z}) = {y} vs {yv}");
        }
    }

    #[test]
    fn bessel_wronskian() {
        // j_l y_{l-1} - j_{l-1} y_l = 1/z²
        for z in [0.3, 1.0, 2.5, 9.0] {
            let j = spherical_j(25, z);
            let y = spherical_y(25, z);
            for l in 1..=25 {
                let w = j[l] * y[l - 1] - j[l - 1] * y[l];
                assert!((w * z * z - 1.0).abs() < 1e-11, "l={l} z={z}");
            }
        }
    }

    #[test]
    fn legendre_orthonormality() {
        let max = 12;
        let (t, w) = gauss_legendre(20);
        let tables: Vec<_> = t.iter().map(|&x| LegendreTable::new(max, x)).collect();
        for m in 0..=max {
            for l1 in m..=max {
                for l2 in m..=max {
                    let dot: f64 = tables
                        .iter()
                        .zip(&w)
                        .map(|(tb, wi)| wi * tb.get(l1, m) * tb.get(l2, m))
                        .sum();
                    let expected = if l1 == l2 { 1.0 / (2.0 * PI) } else { 0.0 };
                    assert!((dot - expected).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn legendre_low_degree_closed_forms() {
        let t: f64 = 0.3;
        let tb = LegendreTable::new(2, t);
        let c = 1.0 / (4.0 * PI).sqrt();
        assert!((tb.get(0, 0) - c).abs() < 1e-15);
        assert!((tb.get(1, 0) - c * 3f64.sqrt() * t).abs() < 1e-15);
        assert!((tb.get(1, 1) - c * (1.5f64).sqrt() * (1.0 - t * t).sqrt()).abs() < 1e-15);
        assert!((tb.get(2, 0) - c * 5f64.sqrt() * (1.5 * t * t - 0.5)).abs() < 1e-15);
    }
}
