//! The discretized scattering matrix S = 𝒲 + S₁ + S₂ on a product sphere
//! grid, its Hilbert–Schmidt norms, and its spectrum.

mod kernel;

pub use kernel::{free_resolvent_kernel, EnergyShell, Harmonics, KernelEvaluator, ShellResolution};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::eikonal::{w_function, SpectralArc};
use crate::error::{Error, Result};
use crate::geometry::{Direction, SphereGrid};
use crate::potential::PotentialConfig;
use crate::profile::ProfileFunction;

/// What a [`KernelMatrix`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// Multiplication by w(ω).
    WDiag,
    S1,
    S2,
    /// 𝒲 + S₁ (+ S₂ at first Born order).
    Total,
}

/// Whether S₂ is kept (first Born approximation) or dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BornOrder {
    Zero,
    #[default]
    One,
}

impl TryFrom<u8> for BornOrder {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Self::Zero),
            1 => Ok(Self::One),
            _ => Err(crate::error::domain("born_order", v as f64, "{0, 1}")),
        }
    }
}

impl From<BornOrder> for u8 {
    fn from(b: BornOrder) -> u8 {
        match b {
            BornOrder::Zero => 0,
            BornOrder::One => 1,
        }
    }
}

/// A discretized operator on L²(𝕊²): an optional multiplication part plus an
/// integral kernel sampled at grid node pairs.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    grid: SphereGrid,
    kind: KernelKind,
    multiplier: Option<DVector<Complex64>>,
    kernel: DMatrix<Complex64>,
}

impl KernelMatrix {
    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn multiplier(&self) -> Option<&DVector<Complex64>> {
        self.multiplier.as_ref()
    }

    /// Kernel values s(ω_i, ω_j), without quadrature weights.
    pub fn kernel(&self) -> &DMatrix<Complex64> {
        &self.kernel
    }

    /// Nyström matrix diag(w) + s(ω_i, ω_j) W_j acting on grid samples.
    pub fn operator_matrix(&self) -> DMatrix<Complex64> {
        let w = self.grid.weights();
        let mut m = DMatrix::from_fn(self.kernel.nrows(), self.kernel.ncols(), |i, j| {
            self.kernel[(i, j)] * w[j]
        });
        if let Some(d) = &self.multiplier {
            for (i, v) in d.iter().enumerate() {
                m[(i, i)] += v;
            }
        }
        m
    }

    /// The similar matrix diag(w) + W^{1/2} s W^{1/2}, unitary exactly when
    /// the discretized operator is unitary in the weighted inner product.
    pub fn symmetrized(&self) -> DMatrix<Complex64> {
        let root: Vec<f64> = self.grid.weights().iter().map(|w| w.sqrt()).collect();
        let mut m = DMatrix::from_fn(self.kernel.nrows(), self.kernel.ncols(), |i, j| {
            self.kernel[(i, j)] * (root[i] * root[j])
        });
        if let Some(d) = &self.multiplier {
            for (i, v) in d.iter().enumerate() {
                m[(i, i)] += v;
            }
        }
        m
    }

    /// √(Σ W_i W_j |s_ij|²) of the integral part; for a total matrix this is
    /// the norm of S - 𝒲.
    pub fn hs_norm(&self) -> Result<f64> {
        if self.kind == KernelKind::WDiag {
            return Err(Error::KernelKind("multiplication operators have no kernel".into()));
        }
        let w = self.grid.weights();
        let sum: f64 = self
            .kernel
            .column_iter()
            .enumerate()
            .map(|(j, col)| {
                col.iter()
                    .enumerate()
                    .map(|(i, v)| w[i] * w[j] * v.norm_sqr())
                    .sum::<f64>()
            })
            .sum();
        Ok(sum.sqrt())
    }

    /// max |σ² - 1| over the singular values σ of the symmetrized matrix,
    /// i.e. the spectral norm of M*M - I.
    pub fn unitarity_defect(&self) -> f64 {
        defect_of(&self.symmetrized())
    }

    /// Largest |entry| of the Nyström matrix minus the identity.
    pub fn max_deviation_from_identity(&self) -> f64 {
        let mut m = self.operator_matrix();
        for i in 0..m.nrows() {
            m[(i, i)] -= 1.0;
        }
        m.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// diag(w(ω_i)) over the grid.
pub fn w_matrix(profile: &ProfileFunction, grid: &SphereGrid) -> KernelMatrix {
    let n = grid.len();
    KernelMatrix {
        grid: grid.clone(),
        kind: KernelKind::WDiag,
        multiplier: Some(DVector::from_iterator(
            n,
            grid.nodes().iter().map(|d| w_function(profile, d)),
        )),
        kernel: DMatrix::zeros(n, n),
    }
}

/// The pieces of the discretized scattering matrix.
#[derive(Debug, Clone)]
pub struct ScatteringParts {
    pub w: KernelMatrix,
    pub s1: KernelMatrix,
    pub s2: Option<KernelMatrix>,
}

impl ScatteringParts {
    pub fn born_order(&self) -> BornOrder {
        if self.s2.is_some() {
            BornOrder::One
        } else {
            BornOrder::Zero
        }
    }

    /// 𝒲 + S₁ (+ S₂).
    pub fn total(&self) -> KernelMatrix {
        let mut kernel = self.s1.kernel.clone();
        if let Some(s2) = &self.s2 {
            kernel += &s2.kernel;
        }
        KernelMatrix {
            grid: self.w.grid.clone(),
            kind: KernelKind::Total,
            multiplier: self.w.multiplier.clone(),
            kernel,
        }
    }
}

/// Assemble all pieces with an existing evaluator.
pub fn assemble_parts(evaluator: &KernelEvaluator, grid: &SphereGrid, born: BornOrder) -> ScatteringParts {
    let (s1, s2) = evaluator.grid_kernels(grid, born == BornOrder::One);
    let wrap = |kind, kernel| KernelMatrix {
        grid: grid.clone(),
        kind,
        multiplier: None,
        kernel,
    };
    ScatteringParts {
        w: w_matrix(evaluator.profile(), grid),
        s1: wrap(KernelKind::S1, s1),
        s2: s2.map(|k| wrap(KernelKind::S2, k)),
    }
}

/// The total discretized scattering matrix at default shell resolution.
pub fn assemble(
    potential: &PotentialConfig,
    grid: &SphereGrid,
    shell: EnergyShell,
    born: BornOrder,
) -> Result<KernelMatrix> {
    let evaluator = KernelEvaluator::new(potential, shell)?;
    Ok(assemble_parts(&evaluator, grid, born).total())
}

/// Largest change of s₁ + s₂ over a fixed set of direction pairs between
/// the given resolution and its refinement. Fails with a quadrature-budget
/// error when the change exceeds `tol`.
pub fn check_resolution(
    potential: &PotentialConfig,
    shell: EnergyShell,
    resolution: ShellResolution,
    tol: f64,
) -> Result<f64> {
    let base = KernelEvaluator::with_resolution(potential, shell, resolution)?;
    let fine = KernelEvaluator::with_resolution(potential, shell, resolution.refined())?;
    let pairs = [
        ((0.3, 0.0), (2.1, 1.0)),
        ((1.2, 0.4), (1.2, 0.4)),
        ((2.8, 5.0), (0.9, 2.5)),
        ((1.57, 3.0), (0.05, 0.0)),
    ];
    let change = pairs
        .iter()
        .map(|&((c1, a1), (c2, a2))| {
            let (u, v) = (Direction::from_angles(c1, a1), Direction::from_angles(c2, a2));
            let s = |e: &KernelEvaluator| e.s1(&u, &v) + e.s2_born(&u, &v);
            (s(&base) - s(&fine)).norm()
        })
        .fold(0.0, f64::max);
    if change > tol {
        return Err(Error::QuadratureBudget {
            requested: tol,
            achieved: change,
        });
    }
    Ok(change)
}

/// Eigenvalues of a discretized scattering matrix and their position
/// relative to the essential-spectrum arc.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    pub distances: Vec<f64>,
    pub arc: SpectralArc,
    /// Spectral norm of M*M - I for the symmetrized matrix M.
    pub unitarity_defect: f64,
}

impl SpectrumReport {
    /// Share of eigenvalues within `delta` of the arc.
    pub fn fraction_within(&self, delta: f64) -> f64 {
        if self.distances.is_empty() {
            return 1.0;
        }
        let reach = delta + 8.0 * f64::EPSILON;
        self.distances.iter().filter(|&&d| d <= reach).count() as f64 / self.distances.len() as f64
    }
}

/// Dense eigendecomposition of a total or multiplication matrix.
pub fn spectrum(kmat: &KernelMatrix, arc: SpectralArc) -> Result<SpectrumReport> {
    if !matches!(kmat.kind, KernelKind::Total | KernelKind::WDiag) {
        return Err(Error::KernelKind(format!("{:?} is not a scattering matrix", kmat.kind)));
    }
    let m = kmat.symmetrized();
    let mut eigenvalues: Vec<Complex64> = if kmat.kind == KernelKind::WDiag {
        m.diagonal().iter().copied().collect()
    } else {
        // QR iteration stalls on tight clusters around 1; shift them to 0
        let n = m.nrows();
        let shift = m.trace() / n as f64;
        let shifted = &m - DMatrix::identity(n, n) * shift;
        [1e-14, 1e-12]
            .iter()
            .find_map(|&eps| nalgebra::linalg::Schur::try_new(shifted.clone(), eps, 10_000)?.eigenvalues())
            .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?
            .iter()
            .map(|z| z + shift)
            .collect()
    };
    eigenvalues.sort_by(|a, b| a.arg().total_cmp(&b.arg()).then(a.norm().total_cmp(&b.norm())));
    let distances = eigenvalues.iter().map(|&z| arc.distance(z)).collect();
    let unitarity_defect = defect_of(&m);
    Ok(SpectrumReport {
        eigenvalues,
        distances,
        arc,
        unitarity_defect,
    })
}

fn defect_of(m: &DMatrix<Complex64>) -> f64 {
    m.singular_values()
        .iter()
        .map(|s| (s * s - 1.0).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests;
