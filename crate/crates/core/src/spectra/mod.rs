//! Spectra of Gram matrices and the Marchenko-Pastur reference law.

mod quad;

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::combinatorics::narayana;
use crate::ensemble::GramMatrix;
use crate::error::{bail, Error, Result};

pub use quad::integrate;

/// Eigenvalues in [-NEGATIVE_CLAMP, 0) are clamped to 0; anything lower is an error.
pub const NEGATIVE_CLAMP: f64 = 1e-10;

/// Absolute tolerance of the Marchenko-Pastur cdf quadrature.
pub const CDF_TOLERANCE: f64 = 1e-10;

/// Sorted eigenvalues of a normalized Gram matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSample {
    eigenvalues: Vec<f64>,
    n: usize,
    seed: Option<u64>,
    clamped: usize,
}

impl SpectralSample {
    /// Builds a sample from raw eigenvalues of a p x p Gram matrix formed
    /// from length-n rows. Values slightly below zero are clamped.
    pub fn new(mut eigenvalues: Vec<f64>, n: usize, seed: Option<u64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            bail!(Usage, "spectral sample needs at least one eigenvalue");
        }
        if let Some(bad) = eigenvalues.iter().find(|v| !v.is_finite()) {
            bail!(Numerical, "non-finite eigenvalue {bad}");
        }
        let mut clamped = 0;
        for v in eigenvalues.iter_mut() {
            if *v < -NEGATIVE_CLAMP {
                bail!(
                    Numerical,
                    "eigenvalue {v} below -1e-10 violates positive semidefiniteness"
                );
            }
            if *v < 0.0 {
                *v = 0.0;
                clamped += 1;
            }
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(SpectralSample {
            eigenvalues,
            n,
            seed,
            clamped,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn row_length(&self) -> usize {
        self.n
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.len() as f64 / self.n as f64
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Number of slightly negative eigenvalues that were set to zero.
    pub fn clamped(&self) -> usize {
        self.clamped
    }

    /// Empirical spectral distribution (1/p) #{i : lambda_i <= z}.
    pub fn esd(&self, z: f64) -> f64 {
        self.eigenvalues.partition_point(|&v| v <= z) as f64 / self.len() as f64
    }
}

/// Full spectrum of a Gram matrix with a Hermitian eigensolver.
pub fn eigenvalues(g: &GramMatrix, seed: Option<u64>) -> Result<SpectralSample> {
    let p = g.dim();
    let max_iter = 1000 * p.max(10);
    let values: Vec<f64> = match g.real_entries() {
        Some(entries) => {
            let m = DMatrix::from_row_slice(p, p, entries);
            SymmetricEigen::try_new(m, f64::EPSILON, max_iter)
                .ok_or_else(|| not_converged(g, seed))?
                .eigenvalues
                .iter()
                .copied()
                .collect()
        }
        None => {
            let m = DMatrix::<Complex64>::from_row_slice(p, p, &g.complex_entries());
            SymmetricEigen::try_new(m, f64::EPSILON, max_iter)
                .ok_or_else(|| not_converged(g, seed))?
                .eigenvalues
                .iter()
                .copied()
                .collect()
        }
    };
    let sample = SpectralSample::new(values, g.row_length(), seed)?;
    let sum: f64 = sample.eigenvalues.iter().sum();
    if (sum - g.trace()).abs() > 1e-8 * p as f64 {
        bail!(
            Numerical,
            "eigenvalue sum {sum} disagrees with trace {} (seed {seed:?})",
            g.trace()
        );
    }
    Ok(sample)
}

fn not_converged(g: &GramMatrix, seed: Option<u64>) -> Error {
    Error::Numerical(format!(
        "eigensolver did not converge on {0}x{0} Gram matrix (n = {1}, seed {seed:?})",
        g.dim(),
        g.row_length()
    ))
}

/// Marchenko-Pastur law with ratio y in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MpLaw {
    y: f64,
    a: f64,
    b: f64,
}

impl MpLaw {
    pub fn new(y: f64) -> Result<Self> {
        if !(y > 0.0 && y < 1.0) {
            bail!(Domain, "Marchenko-Pastur ratio must lie in (0, 1), got {y}");
        }
        let s = y.sqrt();
        Ok(MpLaw {
            y,
            a: (1.0 - s).powi(2),
            b: (1.0 + s).powi(2),
        })
    }

    pub fn ratio(&self) -> f64 {
        self.y
    }

    /// Support [a, b].
    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn pdf(&self, z: f64) -> f64 {
        if z <= self.a || z >= self.b {
            return 0.0;
        }
        ((self.b - z) * (z - self.a)).sqrt() / (2.0 * PI * z * self.y)
    }

    // With z = (1 + y) - 2 sqrt(y) cos(theta), theta in [0, pi], the
    // measure pdf(z) dz becomes (2 / pi) sin^2(theta) / z(theta) dtheta,
    // which is smooth up to both ends of the support.
    fn z_of(&self, theta: f64) -> f64 {
        (1.0 + self.y) - 2.0 * self.y.sqrt() * theta.cos()
    }

    fn density_theta(&self, theta: f64) -> f64 {
        let s = theta.sin();
        2.0 / PI * s * s / self.z_of(theta)
    }

    fn theta_of(&self, z: f64) -> f64 {
        (((1.0 + self.y) - z) / (2.0 * self.y.sqrt())).clamp(-1.0, 1.0).acos()
    }

    /// Distribution function, by adaptive quadrature of the density.
    pub fn cdf(&self, z: f64) -> Result<f64> {
        if z <= self.a {
            return Ok(0.0);
        }
        if z >= self.b {
            return Ok(1.0);
        }
        let v = integrate(|t| self.density_theta(t), 0.0, self.theta_of(z), CDF_TOLERANCE, 0.0)?;
        Ok(v.clamp(0.0, 1.0))
    }

    /// E f(X) for X ~ MP(y), by adaptive quadrature.
    pub fn expectation<F: Fn(f64) -> f64>(&self, f: F, abs_tol: f64, rel_tol: f64) -> Result<f64> {
        integrate(|t| f(self.z_of(t)) * self.density_theta(t), 0.0, PI, abs_tol, rel_tol)
    }
}

/// l-th moment of MP(y): sum_{i<l} y^i / (i + 1) C(l, i) C(l - 1, i), evaluated
/// exactly with y read as the rational value of its binary representation.
pub fn mp_moment(y: f64, l: u32) -> f64 {
    to_f64(&mp_moment_exact(y, l))
}

pub(crate) fn mp_moment_exact(y: f64, l: u32) -> BigRational {
    if l == 0 {
        return BigRational::one();
    }
    let y = BigRational::from_float(y).expect("finite ratio");
    let mut acc = BigRational::zero();
    let mut pow = BigRational::one();
    for i in 0..l as u64 {
        // C(l, i) C(l - 1, i) / (i + 1) is the Narayana number N(l, i + 1)
        let coeff = BigInt::from(narayana(l as u64, i + 1));
        acc += &pow * BigRational::from_integer(coeff);
        pow *= &y;
    }
    acc
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// sup_z |ESD(z) - F(z)| for a continuous distribution function F,
/// evaluated at the jump points of the ESD.
pub fn sup_distance_with<F: Fn(f64) -> Result<f64>>(sample: &SpectralSample, cdf: F) -> Result<f64> {
    let p = sample.len() as f64;
    let mut sup = 0.0f64;
    for (i, &lambda) in sample.eigenvalues().iter().enumerate() {
        let f = cdf(lambda)?;
        let below = i as f64 / p;
        let above = (i + 1) as f64 / p;
        sup = sup.max((f - below).abs()).max((f - above).abs());
    }
    Ok(sup)
}

pub fn sup_distance(sample: &SpectralSample, law: &MpLaw) -> Result<f64> {
    sup_distance_with(sample, |z| law.cdf(z))
}

/// The bound 800 / (sqrt(y) (1 - y)) * log log n / log n.
pub fn theorem_bound(n: u64, y: f64) -> Result<f64> {
    if n < 16 {
        bail!(Domain, "bound needs n >= 16, got {n}");
    }
    if !(y > 0.0 && y < 1.0) {
        bail!(Domain, "y must lie in (0, 1), got {y}");
    }
    let ln = (n as f64).ln();
    Ok(800.0 / (y.sqrt() * (1.0 - y)) * ln.ln() / ln)
}

/// Rows (z, esd, mp_cdf) on an even grid covering both the law's support
/// and the sample, as CSV with a header line.
pub fn esd_table(sample: &SpectralSample, law: &MpLaw, points: usize) -> Result<String> {
    let (a, b) = law.support();
    let lo = a.min(sample.eigenvalues()[0]);
    let hi = b.max(*sample.eigenvalues().last().unwrap());
    let mut out = String::from("z,esd,mp_cdf\n");
    for i in 0..points {
        let z = lo + (hi - lo) * i as f64 / (points.max(2) - 1) as f64;
        let _ = writeln!(out, "{},{},{}", z, sample.esd(z), law.cdf(z)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(v: &[f64]) -> SpectralSample {
        SpectralSample::new(v.to_vec(), 10, None).unwrap()
    }

    #[test]
    fn eigenvalues_of_simple_grams() {
        let id = GramMatrix::from_real(3, 4, vec![1., 0., 0., 0., 1., 0., 0., 0., 1.]).unwrap();
        let s = eigenvalues(&id, None).unwrap();
        for v in s.eigenvalues() {
            assert!((v - 1.0).abs() < 1e-14);
        }
        let ones = GramMatrix::from_real(2, 3, vec![1.0; 4]).unwrap();
        let s = eigenvalues(&ones, None).unwrap();
        assert!(s.eigenvalues()[0].abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn complex_eigenvalues() {
        let i = Complex64::new(0.0, 0.5);
        let one = Complex64::new(1.0, 0.0);
        let g = GramMatrix::from_complex(2, 4, vec![one, i, -i, one]).unwrap();
        let s = eigenvalues(&g, None).unwrap();
        assert!((s.eigenvalues()[0] - 0.5).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn clamping() {
        let s = SpectralSample::new(vec![1.0, -5e-11, 1.0], 4, None).unwrap();
        assert_eq!(s.clamped(), 1);
        assert_eq!(s.eigenvalues(), &[0.0, 1.0, 1.0]);
        assert!(SpectralSample::new(vec![-1e-9, 1.0], 4, None).is_err());
    }

    #[test]
    fn esd_steps() {
        let s = sample(&[0.0, 2.0]);
        assert_eq!(s.esd(-1.0), 0.0);
        assert_eq!(s.esd(0.0), 0.5);
        assert_eq!(s.esd(1.0), 0.5);
        assert_eq!(s.esd(2.0), 1.0);
        assert_eq!(s.esd(1e300), 1.0);
    }

    #[test]
    fn mp_support_and_endpoints() {
        let law = MpLaw::new(0.25).unwrap();
        assert_eq!(law.support(), (0.25, 2.25));
        assert_eq!(law.cdf(0.25).unwrap(), 0.0);
        assert_eq!(law.cdf(2.25).unwrap(), 1.0);
        assert_eq!(law.pdf(0.1), 0.0);
        assert_eq!(law.pdf(3.0), 0.0);
        assert!(MpLaw::new(0.0).is_err());
        assert!(MpLaw::new(1.0).is_err());
    }

    #[test]
    fn mp_cdf_is_monotone_and_reaches_one() {
        let law = MpLaw::new(0.5).unwrap();
        let (a, b) = law.support();
        let mut prev = 0.0;
        for i in 0..=200 {
            let z = a + (b - a) * i as f64 / 200.0;
            let f = law.cdf(z).unwrap();
            assert!(f >= prev);
            prev = f;
        }
        let just_below = law.cdf(b - 1e-12).unwrap();
        assert!((just_below - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mp_cdf_matches_density_in_z() {
        // independent route: quadrature of the density itself in z
        let law = MpLaw::new(0.3).unwrap();
        let (a, _) = law.support();
        for z in [0.5, 1.0, 1.7, 2.5] {
            let direct = integrate(|x| law.pdf(x), a, z, 1e-11, 0.0).unwrap();
            assert!((direct - law.cdf(z).unwrap()).abs() < 1e-8, "z={z}");
        }
    }

    #[test]
    fn mp_moment_examples() {
        assert_eq!(mp_moment(0.37, 0), 1.0);
        assert_eq!(mp_moment(0.37, 1), 1.0);
        assert_eq!(mp_moment(0.5, 2), 1.5);
        assert_eq!(mp_moment(0.5, 3), 2.75);
        let law = MpLaw::new(0.5).unwrap();
        let m1 = law.expectation(|z| z, 1e-12, 1e-14).unwrap();
        assert!((m1 - 1.0).abs() < 1e-10);
        let m3 = law.expectation(|z| z.powi(3), 1e-12, 1e-14).unwrap();
        assert!((m3 - 2.75).abs() < 1e-10);
    }

    #[test]
    fn sup_distance_cases() {
        let law = MpLaw::new(0.5).unwrap();
        let s = sample(&[1.0]);
        let f = law.cdf(1.0).unwrap();
        assert_eq!(sup_distance(&s, &law).unwrap(), f.max(1.0 - f));
        let uniform = |z: f64| Ok((z - 0.5).clamp(0.0, 1.0));
        assert_eq!(sup_distance_with(&s, uniform).unwrap(), 0.5);
    }

    #[test]
    fn sup_distance_of_quantile_sample() {
        // midpoint quantiles of MP itself: p = 10^4
        let law = MpLaw::new(0.5).unwrap();
        let (a, b) = law.support();
        let p = 10_000;
        let values: Vec<f64> = (0..p)
            .map(|i| {
                let target = (i as f64 + 0.5) / p as f64;
                let (mut lo, mut hi) = (a, b);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if law.cdf(mid).unwrap() < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        let s = SpectralSample::new(values, 20_000, None).unwrap();
        let d = sup_distance(&s, &law).unwrap();
        assert!(d < 0.02, "{d}");
        assert!((d - 0.5 / p as f64).abs() < 1e-6);
    }

    #[test]
    fn sup_distance_invariant_under_duplication() {
        let law = MpLaw::new(0.4).unwrap();
        let base = [0.3, 0.8, 1.1, 1.9];
        let doubled: Vec<f64> = base.iter().flat_map(|&v| [v, v]).collect();
        let d1 = sup_distance(&sample(&base), &law).unwrap();
        let d2 = sup_distance(&sample(&doubled), &law).unwrap();
        assert!((d1 - d2).abs() < 1e-15);
    }

    #[test]
    fn theorem_bound_values() {
        let v = theorem_bound(1 << 20, 0.5).unwrap();
        let ln = (1u64 << 20) as f64;
        let expect = 800.0 / (0.5f64.sqrt() * 0.5) * ln.ln().ln() / ln.ln();
        assert!((v - expect).abs() < 1e-9);
        assert!((v - 429.147).abs() < 1e-3, "{v}");
        assert!(theorem_bound(15, 0.5).is_err());
        assert!(theorem_bound(100, 1.0).is_err());
        let mut prev = f64::INFINITY;
        for n in [16u64, 100, 1000, 1 << 20, 1 << 40] {
            let v = theorem_bound(n, 0.3).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(theorem_bound(1000, 1e-12).unwrap() > 1e6);
    }
}
