use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::eikonal::{essential_arc, theta, Sign};
use crate::geometry::{build_grid, Vec3};
use crate::quadrature::gauss_legendre_on;
use crate::special::{spherical_j, LegendreTable};
use crate::symbols::Symbols;

// ∫_1^2 r² η′(r)² dr for R = 1, frozen from an independent QUADPACK
// evaluation (absolute accuracy about 1e-9).
const SLOPE_ENERGY: f64 = 3.076820316515229;

fn potential(amplitude: f64) -> PotentialConfig {
    let profile = if amplitude == 0.0 {
        ProfileFunction::Zero
    } else {
        ProfileFunction::bump(amplitude, FRAC_PI_2, FRAC_PI_4).unwrap()
    };
    PotentialConfig::new(profile, 1.0).unwrap()
}

fn evaluator(amplitude: f64) -> KernelEvaluator {
    KernelEvaluator::new(&potential(amplitude), EnergyShell::new(1.0).unwrap()).unwrap()
}

fn random_direction(rng: &mut ChaCha8Rng) -> Direction {
    Direction::from_angles(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI))
}

#[test]
fn green_function_examples() {
    let shell = EnergyShell::new(1.0).unwrap();
    let x = Vec3::new(1.0, 2.0, 0.0);
    let y = Vec3::new(1.0, 2.0, 1.0);
    let g = free_resolvent_kernel(&x, &y, &shell).unwrap();
    assert!((g - Complex64::from_polar(1.0, 1.0) / (4.0 * PI)).norm() < 1e-16);
    assert_eq!(g, free_resolvent_kernel(&y, &x, &shell).unwrap());
    let far = free_resolvent_kernel(&x, &(x * 101.0), &shell).unwrap();
    assert!((far.norm() * 4.0 * PI * 100.0 * x.norm() - 1.0).abs() < 1e-12);
    assert_eq!(free_resolvent_kernel(&x, &x, &shell), Err(Error::Coincident));
    assert!(EnergyShell::new(0.0).is_err());
}

#[test]
fn zero_field_diagonal_of_first_kernel() {
    let ev = evaluator(0.0);
    let d = Direction::from_angles(0.4, 1.0);
    let expected = Complex64::new(0.0, -SLOPE_ENERGY / (2.0 * PI));
    assert!((ev.s1(&d, &d) - expected).norm() < 5e-9);
}

#[test]
fn first_kernel_matches_brute_force_shell_quadrature() {
    let k = 1.0;
    let symbols = Symbols::new(potential(0.5), k).unwrap();
    let ev = evaluator(0.5);
    let sphere = build_grid(24, 48).unwrap();
    let (rs, rw) = gauss_legendre_on(64, 1.0, 2.0);
    for (u, v) in [
        (Direction::from_angles(0.3, 0.0), Direction::from_angles(2.1, 1.0)),
        (Direction::from_angles(1.2, 0.4), Direction::from_angles(1.2, 0.4)),
    ] {
        let (xi, xi_in) = (u.vector() * k, v.vector() * k);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&r, &wr) in rs.iter().zip(&rw) {
            for (d, &wa) in sphere.nodes().iter().zip(sphere.weights()) {
                let x = d.vector() * r;
                let j = symbols.symbol_j(&x, &xi, Sign::Plus).unwrap().value;
                let t = symbols.symbol_t(&x, &xi_in, Sign::Minus).unwrap().value;
                let wave = Complex64::from_polar(1.0, (xi_in - xi).dot(&x));
                acc += wave * j.conj() * t * (wr * wa * r * r);
            }
        }
        let brute = acc * Complex64::new(0.0, -k / (8.0 * PI * PI));
        assert!((brute - ev.s1(&u, &v)).norm() < 1e-10, "{brute} vs {}", ev.s1(&u, &v));
    }
}

#[test]
fn zero_field_resolvent_reproduces_the_compact_solution() {
    // Without field the outgoing solution is (η - 1) e^{ik⟨ω′, x⟩}, whose
    // coefficients are (η(r) - 1) 4π iˡ j_l(kr) conj(Y_lm(ω′)).
    let ev = evaluator(0.0);
    let omega = Direction::from_angles(1.1, 0.7);
    let u = ev.resolve(&ev.harmonics(&omega));
    let table = LegendreTable::new(12, omega.colatitude().cos());
    let eta = crate::symbols::CutoffEta::new(1.0).unwrap();
    let radial = crate::quadrature::ChebyshevRule::new(ev.resolution().radial_nodes, 1.0, 2.0);
    let mut worst = 0.0_f64;
    for (i, &r) in radial.nodes.iter().enumerate() {
        let jl = spherical_j(12, r);
        for (l, &jl_r) in jl.iter().enumerate() {
            for m in -(l as i64)..=(l as i64) {
                let y = Complex64::from_polar(table.get(l, m.unsigned_abs() as usize), -(m as f64) * omega.azimuth());
                let exact = Complex64::new(0.0, 1.0).powu(l as u32)
                    * y
                    * (4.0 * PI * jl_r * (eta.eval(&Vec3::new(r, 0.0, 0.0)) - 1.0));
                worst = worst.max((u.coefficient(i, l, m) - exact).norm());
            }
        }
    }
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn zero_field_kernels_cancel() {
    let ev = evaluator(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let (u, v) = (random_direction(&mut rng), random_direction(&mut rng));
        let sum = ev.s1(&u, &v) + ev.s2_born(&u, &v);
        assert!(sum.norm() < 1e-6);
        assert!(ev.s1(&u, &v).norm() > 1e-3);
    }
}

#[test]
fn kernels_are_axially_symmetric() {
    let ev = evaluator(0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..4 {
        let (u, v) = (random_direction(&mut rng), random_direction(&mut rng));
        let turn = rng.random_range(0.0..2.0 * PI);
        let rot = |d: &Direction| Direction::from_angles(d.colatitude(), d.azimuth() + turn);
        assert!((ev.s2_born(&u, &v) - ev.s2_born(&rot(&u), &rot(&v))).norm() < 1e-8);
        assert!((ev.s1(&u, &v) - ev.s1(&rot(&u), &rot(&v))).norm() < 1e-12);
    }
}

#[test]
fn second_kernel_modulus_is_pair_symmetric() {
    let ev = evaluator(0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..4 {
        let (u, v) = (random_direction(&mut rng), random_direction(&mut rng));
        assert!((ev.s2_born(&u, &v).norm() - ev.s2_born(&v, &u).norm()).abs() < 1e-8);
    }
}

#[test]
fn grid_fill_agrees_with_pointwise_kernels() {
    let ev = evaluator(0.5);
    let grid = build_grid(4, 8).unwrap();
    let parts = assemble_parts(&ev, &grid, BornOrder::One);
    let s2 = parts.s2.as_ref().unwrap();
    for (i, j) in [(0, 0), (3, 17), (20, 9), (31, 30)] {
        let (u, v) = (grid.nodes()[i], grid.nodes()[j]);
        assert!((parts.s1.kernel()[(i, j)] - ev.s1(&u, &v)).norm() < 1e-13);
        assert!((s2.kernel()[(i, j)] - ev.s2_born(&u, &v)).norm() < 1e-9);
    }
    let omega0 = grid.nodes()[11];
    let column = ev.grid_column(&grid, &omega0, true);
    let total = parts.total();
    for (i, value) in column.iter().enumerate() {
        assert!((value - total.kernel()[(i, 11)]).norm() < 1e-9);
    }
}

#[test]
fn w_matrix_properties() {
    let grid = build_grid(6, 12).unwrap();
    let zero = w_matrix(&ProfileFunction::Zero, &grid);
    assert_eq!(zero.operator_matrix(), DMatrix::identity(grid.len(), grid.len()));
    let p = ProfileFunction::bump_with_flux(FRAC_PI_2, FRAC_PI_2, FRAC_PI_4).unwrap();
    let w = w_matrix(&p, &grid);
    for (d, v) in grid.nodes().iter().zip(w.multiplier().unwrap().iter()) {
        let th = theta(&p, d.vector()).unwrap();
        assert!(th.abs() <= FRAC_PI_2 + 1e-12);
        assert!((v - Complex64::from_polar(1.0, th)).norm() < 1e-15);
    }
    let rep = spectrum(&w, essential_arc(p.flux()).unwrap()).unwrap();
    assert_eq!(rep.fraction_within(0.0), 1.0);
    assert!(rep.unitarity_defect < 1e-14);
    assert!(w.hs_norm().is_err());
}

#[test]
fn zero_field_assembly_is_the_identity() {
    let ev = evaluator(0.0);
    let grid = build_grid(6, 12).unwrap();
    let parts = assemble_parts(&ev, &grid, BornOrder::One);
    let total = parts.total();
    assert!(total.max_deviation_from_identity() < 1e-6);
    assert!(total.hs_norm().unwrap() < 1e-6);
    let rep = spectrum(&total, essential_arc(0.0).unwrap()).unwrap();
    assert!(rep.eigenvalues.iter().all(|z| (z - 1.0).norm() < 1e-6));
    assert_eq!(rep.eigenvalues.len(), grid.len());

    // dropping S₂ leaves exactly the discretized S₁
    let first_only = assemble_parts(&ev, &grid, BornOrder::Zero).total();
    let dev = first_only.max_deviation_from_identity();
    let s1_max = parts.s1.operator_matrix().iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(dev > 1e-3);
    assert!((dev - s1_max).abs() < 1e-14);
}

#[test]
fn hs_norm_of_zero_kernel_and_kind_errors() {
    let grid = build_grid(2, 4).unwrap();
    let ev = evaluator(0.0);
    let parts = assemble_parts(&ev, &grid, BornOrder::Zero);
    assert!(parts.s2.is_none());
    let zero = KernelMatrix {
        grid: grid.clone(),
        kind: KernelKind::S1,
        multiplier: None,
        kernel: DMatrix::zeros(8, 8),
    };
    assert_eq!(zero.hs_norm().unwrap(), 0.0);
    assert!(spectrum(&zero, essential_arc(0.0).unwrap()).is_err());
    assert_eq!(BornOrder::try_from(1).unwrap(), BornOrder::One);
    assert!(BornOrder::try_from(2).is_err());
}

#[test]
fn resolution_check_reports_budget_failures() {
    let cfg = potential(0.5);
    let shell = EnergyShell::new(1.0).unwrap();
    let res = ShellResolution::standard(&shell, 1.0);
    assert!(check_resolution(&cfg, shell, res, 1e-6).unwrap() < 1e-6);
    let coarse = ShellResolution {
        radial_nodes: 10,
        segment_nodes: 6,
        max_degree: 4,
        polar_nodes: 6,
        azimuth_nodes: 10,
    };
    assert!(matches!(
        check_resolution(&cfg, shell, coarse, 1e-9),
        Err(Error::QuadratureBudget { .. })
    ));
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn first_kernel_modulus_ignores_the_field(c1 in 0.0..PI, a1 in 0.0..TAU, c2 in 0.0..PI, a2 in 0.0..TAU,
                                                  amp in 0.05..2.0f64) {
            let (u, v) = (Direction::from_angles(c1, a1), Direction::from_angles(c2, a2));
            let free = evaluator(0.0).s1(&u, &v);
            let field = evaluator(amp).s1(&u, &v);
            prop_assert!((free.norm() - field.norm()).abs() < 1e-13);
        }
    }
}
