//! Differential and total cross-sections of the three-dimensional problem.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Direction, SphereGrid};
use crate::smatrix::{BornOrder, EnergyShell, KernelEvaluator};

/// λ^{-2} / (4π²) · |s|² for a kernel value s.
pub fn sigma_from_kernel(s: Complex64, shell: &EnergyShell) -> f64 {
    s.norm_sqr() / (shell.lambda() * shell.lambda() * 4.0 * PI * PI)
}

/// Differential cross-section for scattering from ω₀ into ω ≠ ω₀.
pub fn sigma_diff(evaluator: &KernelEvaluator, omega: &Direction, omega0: &Direction, born: BornOrder) -> Result<f64> {
    if (omega.vector() - omega0.vector()).norm() <= 1e-14 {
        return Err(Error::Coincident);
    }
    let mut s = evaluator.s1(omega, omega0);
    if born == BornOrder::One {
        s += evaluator.s2_born(omega, omega0);
    }
    Ok(sigma_from_kernel(s, evaluator.shell()))
}

/// Σ_diff over every grid direction for one incoming direction.
#[derive(Debug, Clone)]
pub struct CrossSectionTable {
    pub omega0: Direction,
    pub rows: Vec<(Direction, f64)>,
    pub sigma_tot: f64,
    /// Number of polar rings of the grid the table was computed on.
    pub grid_level: usize,
}

/// Tabulate Σ_diff on the grid (the forward direction included) and its
/// quadrature Σ_tot.
pub fn cross_section_table(
    evaluator: &KernelEvaluator,
    grid: &SphereGrid,
    omega0: &Direction,
    born: BornOrder,
) -> CrossSectionTable {
    let column = evaluator.grid_column(grid, omega0, born == BornOrder::One);
    let rows: Vec<(Direction, f64)> = grid
        .nodes()
        .iter()
        .zip(&column)
        .map(|(d, &s)| (*d, sigma_from_kernel(s, evaluator.shell())))
        .collect();
    let sigma_tot = rows.iter().zip(grid.weights()).map(|((_, v), w)| v * w).sum();
    CrossSectionTable {
        omega0: *omega0,
        rows,
        sigma_tot,
        grid_level: grid.n_polar(),
    }
}

/// Σ_tot(ω₀) by grid quadrature.
pub fn sigma_tot(evaluator: &KernelEvaluator, omega0: &Direction, grid: &SphereGrid, born: BornOrder) -> f64 {
    cross_section_table(evaluator, grid, omega0, born).sigma_tot
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_grid;
    use crate::potential::PotentialConfig;
    use crate::profile::ProfileFunction;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn evaluator(amplitude: f64) -> KernelEvaluator {
        let profile = if amplitude == 0.0 {
            ProfileFunction::Zero
        } else {
            ProfileFunction::bump(amplitude, FRAC_PI_2, FRAC_PI_4).unwrap()
        };
        let cfg = PotentialConfig::new(profile, 1.0).unwrap();
        KernelEvaluator::new(&cfg, EnergyShell::new(1.0).unwrap()).unwrap()
    }

    #[test]
    fn unit_kernel_normalization() {
        let shell = EnergyShell::new(1.0).unwrap();
        let v = sigma_from_kernel(Complex64::new(0.6, 0.8), &shell);
        assert!((v - 1.0 / (4.0 * PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn coincident_directions_are_rejected() {
        let ev = evaluator(0.5);
        let d = Direction::from_angles(1.0, 2.0);
        assert_eq!(sigma_diff(&ev, &d, &d, BornOrder::One), Err(Error::Coincident));
    }

    #[test]
    fn zero_field_does_not_scatter() {
        let ev = evaluator(0.0);
        let grid = build_grid(8, 16).unwrap();
        let table = cross_section_table(&ev, &grid, &Direction::from_angles(0.7, 0.0), BornOrder::One);
        assert!(table.sigma_tot < 1e-12);
        assert!(table.rows.iter().all(|(_, v)| *v < 1e-14));
    }

    #[test]
    fn table_matches_pointwise_values_and_rotation() {
        let ev = evaluator(0.5);
        let grid = build_grid(6, 12).unwrap();
        let omega0 = Direction::from_angles(0.8, 0.3);
        let table = cross_section_table(&ev, &grid, &omega0, BornOrder::One);
        let weighted: f64 = table.rows.iter().zip(grid.weights()).map(|((_, v), w)| v * w).sum();
        assert!((weighted - table.sigma_tot).abs() <= 1e-12 * table.sigma_tot);
        for &k in &[0, 13, 40, 71] {
            let (d, v) = table.rows[k];
            let direct = sigma_diff(&ev, &d, &omega0, BornOrder::One).unwrap();
            assert!((direct - v).abs() <= 1e-9 * v.max(1e-6), "{k}: {direct} {v}");
            let rot = |x: &Direction| Direction::from_angles(x.colatitude(), x.azimuth() + 1.1);
            let rotated = sigma_diff(&ev, &rot(&d), &rot(&omega0), BornOrder::One).unwrap();
            assert!((rotated - direct).abs() <= 1e-9 * direct.max(1e-6));
        }
        assert!(table.rows.iter().all(|(_, v)| *v >= 0.0));
    }
}
