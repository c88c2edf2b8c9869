//! Data-generating processes: AR(1) noise with structured innovation
//! covariance plus a deterministic piecewise mean on leading coordinates.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cov::CovMatrix;
use crate::error::{LrcError, Result};
use crate::matrix::Matrix;
use crate::panel::TimeSeriesPanel;
use crate::scalar::Scalar;

pub const DEFAULT_PHI: f64 = 0.5;
pub const DEFAULT_BURN_IN: usize = 200;
pub const DEFAULT_MEAN_COORDS: usize = 20;
pub const TRIDIAGONAL_A: f64 = 0.5;
pub const TOEPLITZ_RHO: f64 = 0.7;
pub const PERMUTED_BLOCK_RHO: f64 = 0.5;

const NOISE_STREAM: u64 = 0;
const PERMUTATION_STREAM: u64 = 1;

/// Cross-sectional structure of the innovation covariance `Σ_ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossSection {
    /// `Σ_11 = 1`, `Σ_ii = 1 + a²`, first off-diagonal `a`.
    Tridiagonal { a: f64 },
    /// `Σ_ij = ρ^{|i−j|}`.
    Toeplitz { rho: f64 },
    /// `Π diag(B, …, B) Πᵀ` with `B = [[1, ρ], [ρ, 1]]` and a random permutation `Π`.
    PermutedBlock { rho: f64 },
}

impl CrossSection {
    pub fn model_one() -> Self {
        CrossSection::Tridiagonal { a: TRIDIAGONAL_A }
    }

    pub fn model_two() -> Self {
        CrossSection::Toeplitz { rho: TOEPLITZ_RHO }
    }

    pub fn model_three() -> Self {
        CrossSection::PermutedBlock {
            rho: PERMUTED_BLOCK_RHO,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimModel {
    pub structure: CrossSection,
    pub n: usize,
    pub p: usize,
    /// AR(1) coefficient.
    pub phi: f64,
    pub burn_in: usize,
    /// Number of leading coordinates that carry the mean path.
    pub mean_coords: usize,
    pub seed: u64,
}

impl SimModel {
    /// `φ = 0.5`, burn-in 200, mean on the first `min(20, p)` coordinates.
    pub fn new(structure: CrossSection, n: usize, p: usize, seed: u64) -> Self {
        Self {
            structure,
            n,
            p,
            phi: DEFAULT_PHI,
            burn_in: DEFAULT_BURN_IN,
            mean_coords: DEFAULT_MEAN_COORDS.min(p),
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.p < 1 {
            return Err(LrcError::Config(format!(
                "model needs n ≥ 2 and p ≥ 1; got n = {}, p = {}",
                self.n, self.p
            )));
        }
        if self.phi.is_nan() || self.phi.abs() >= 1.0 {
            return Err(LrcError::Config(format!(
                "|phi| must be below 1, got {}",
                self.phi
            )));
        }
        if self.mean_coords > self.p {
            return Err(LrcError::Config(format!(
                "mean_coords = {} exceeds p = {}",
                self.mean_coords, self.p
            )));
        }
        match self.structure {
            CrossSection::Tridiagonal { a } if !a.is_finite() => Err(LrcError::Config(
                "tridiagonal parameter must be finite".into(),
            )),
            CrossSection::Toeplitz { rho } | CrossSection::PermutedBlock { rho }
                if rho.is_nan() || rho.abs() >= 1.0 =>
            {
                Err(LrcError::Config(format!(
                    "|rho| must be below 1, got {rho}"
                )))
            }
            CrossSection::PermutedBlock { .. } if !self.p.is_multiple_of(2) => Err(
                LrcError::Config(format!("permuted block model needs even p, got {}", self.p)),
            ),
            _ => Ok(()),
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Innovation covariance of the model.
pub fn make_sigma_eps<T: Scalar>(model: &SimModel) -> Result<CovMatrix<T>> {
    model.validate()?;
    let p = model.p;
    let m = match model.structure {
        CrossSection::Tridiagonal { a } => Matrix::from_fn(p, p, |i, j| match i.abs_diff(j) {
            0 if i == 0 => T::one(),
            0 => T::lit(1.0 + a * a),
            1 => T::lit(a),
            _ => T::zero(),
        }),
        CrossSection::Toeplitz { rho } => {
            Matrix::from_fn(p, p, |i, j| T::lit(rho.powi(i.abs_diff(j) as i32)))
        }
        CrossSection::PermutedBlock { rho } => {
            let mut perm: Vec<usize> = (0..p).collect();
            perm.shuffle(&mut model.rng(PERMUTATION_STREAM));
            let mut m = Matrix::identity(p);
            for pair in perm.chunks_exact(2) {
                m[(pair[0], pair[1])] = T::lit(rho);
                m[(pair[1], pair[0])] = T::lit(rho);
            }
            m
        }
    };
    CovMatrix::new(m)
}

/// Long-run covariance of the AR(1) noise, `Σ_ε / (1 − φ)²`.
pub fn target_lrc<T: Scalar>(sigma_eps: &CovMatrix<T>, phi: f64) -> Result<CovMatrix<T>> {
    if phi.is_nan() || phi.abs() >= 1.0 {
        return Err(LrcError::Config(format!(
            "|phi| must be below 1, got {phi}"
        )));
    }
    let scale = T::one() / T::lit((1.0 - phi) * (1.0 - phi));
    Ok(sigma_eps.scaled(scale))
}

/// `μ(t) = e^t + 1(t > 0.3) + 2·1(t > 0.6) + 4·1(t > 0.8)`.
pub fn mean_function(t: f64) -> f64 {
    let step = |c: f64, h: f64| if t > c { h } else { 0.0 };
    t.exp() + step(0.3, 1.0) + step(0.6, 2.0) + step(0.8, 4.0)
}

/// Mean matrix with `μ(i/n)` in the first `mean_coords` columns of row `i − 1`.
pub fn mean_path<T: Scalar>(n: usize, p: usize, mean_coords: usize) -> Result<Matrix<T>> {
    if mean_coords > p {
        return Err(LrcError::Config(format!(
            "mean_coords = {mean_coords} exceeds p = {p}"
        )));
    }
    Ok(Matrix::from_fn(n, p, |i, j| {
        if j < mean_coords {
            T::lit(mean_function((i + 1) as f64 / n as f64))
        } else {
            T::zero()
        }
    }))
}

/// Lower-triangular factor `L` with `L Lᵀ = Σ`; retries once with `1e-12·I`
/// added when the matrix is not numerically positive definite.
pub fn cholesky_lower<T: Scalar>(sigma: &Matrix<T>) -> Result<Matrix<T>> {
    match try_cholesky(sigma) {
        Some(l) => Ok(l),
        None => {
            let mut jittered = sigma.clone();
            for i in 0..sigma.rows() {
                jittered[(i, i)] += T::lit(1e-12);
            }
            try_cholesky(&jittered).ok_or_else(|| {
                LrcError::numerical("innovation covariance is not positive definite")
            })
        }
    }
}

fn try_cholesky<T: Scalar>(a: &Matrix<T>) -> Option<Matrix<T>> {
    let p = a.rows();
    let mut l = Matrix::zeros(p, p);
    for i in 0..p {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s.is_nan() || s <= T::zero() {
                    return None;
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Some(l)
}

/// One simulated panel: `x = mu + z`.
#[derive(Debug, Clone)]
pub struct SimData<T> {
    pub x: TimeSeriesPanel<T>,
    pub mu: Matrix<T>,
    pub z: Matrix<T>,
}

/// Runs `Z_t = φ Z_{t−1} + ε_t` from `Z_0 = 0` for `burn_in + n` steps, keeps
/// the last `n`, and adds the mean path. Deterministic in `model.seed`.
pub fn gen_series<T: Scalar>(model: &SimModel) -> Result<SimData<T>> {
    model.validate()?;
    let sigma: CovMatrix<T> = make_sigma_eps(model)?;
    let factor = cholesky_lower(sigma.values())?;
    gen_series_with_factor(model, &factor)
}

/// [`gen_series`] with a precomputed Cholesky factor of `Σ_ε`.
pub fn gen_series_with_factor<T: Scalar>(
    model: &SimModel,
    factor: &Matrix<T>,
) -> Result<SimData<T>> {
    model.validate()?;
    let (n, p) = (model.n, model.p);
    if factor.rows() != p || factor.cols() != p {
        return Err(LrcError::Dimension {
            expected: format!("{p}x{p} factor"),
            got: format!("{}x{}", factor.rows(), factor.cols()),
        });
    }
    // sparse rows of the factor; the banded and block models are mostly zeros
    let sparse: Vec<Vec<(usize, T)>> = (0..p)
        .map(|i| {
            factor.row(i)[..=i]
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != T::zero())
                .map(|(j, &v)| (j, v))
                .collect()
        })
        .collect();

    let mut rng = model.rng(NOISE_STREAM);
    let phi = T::lit(model.phi);
    let mut state = vec![T::zero(); p];
    let mut draws = vec![T::zero(); p];
    let mut z = Matrix::zeros(n, p);
    for step in 0..model.burn_in + n {
        for g in draws.iter_mut() {
            let v: f64 = StandardNormal.sample(&mut rng);
            *g = T::lit(v);
        }
        for (i, row) in sparse.iter().enumerate() {
            let eps: T = row.iter().map(|&(j, l)| l * draws[j]).sum();
            state[i] = phi * state[i] + eps;
        }
        if step >= model.burn_in {
            z.row_mut(step - model.burn_in).copy_from_slice(&state);
        }
    }
    let mu = mean_path(n, p, model.mean_coords)?;
    let x = TimeSeriesPanel::new(mu.add(&z)?)?;
    Ok(SimData { x, mu, z })
}
