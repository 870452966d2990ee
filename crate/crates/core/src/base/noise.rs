//! Inverse-CDF noise samplers used by the perturbed-leader policies.
//!
//! Every sampler takes its uniform draws explicitly so a single draw maps to
//! a single sample; the `*_rng` helpers pull those draws from an [`Rng`].

use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

fn check_unit(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::param("u", format!("uniform draw {u} outside (0, 1)")))
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} is not a positive finite real")))
    }
}

/// Laplace(b) sample from one uniform draw: `-b sign(u - 1/2) ln(1 - 2|u - 1/2|)`.
pub fn sample_laplace(scale: f64, u: f64) -> Result<f64> {
    check_positive("scale", scale)?;
    check_unit(u)?;
    Ok(laplace_unchecked(scale, u))
}

#[inline]
pub(crate) fn laplace_unchecked(scale: f64, u: f64) -> f64 {
    let c = u - 0.5;
    if c == 0.0 {
        return 0.0;
    }
    -scale * c.signum() * (1.0 - 2.0 * c.abs()).ln()
}

/// Gumbel sample with location 0 and scale `1/eta`; CDF `exp(-exp(-eta z))`.
pub fn sample_gumbel(eta: f64, u: f64) -> Result<f64> {
    check_positive("eta", eta)?;
    check_unit(u)?;
    Ok(-(-u.ln()).ln() / eta)
}

/// Analytic Laplace CDF, used by goodness-of-fit checks.
pub fn laplace_cdf(scale: f64, x: f64) -> f64 {
    if x < 0.0 {
        0.5 * (x / scale).exp()
    } else {
        1.0 - 0.5 * (-x / scale).exp()
    }
}

pub fn gumbel_cdf(eta: f64, z: f64) -> f64 {
    (-(-eta * z).exp()).exp()
}

/// Vector with density proportional to `exp(-eta |x|_2 / beta)`.
///
/// `normals` (length `d`) fix the direction, `uniforms` (length `d`) fix the
/// magnitude, which is Gamma(shape d, scale beta/eta) realized as a sum of `d`
/// exponentials.
pub fn gamma_vector_from_draws(
    eta: f64,
    beta: f64,
    normals: &[f64],
    uniforms: &[f64],
) -> Result<Vec<f64>> {
    check_positive("eta", eta)?;
    check_positive("beta", beta)?;
    let d = normals.len();
    if d == 0 {
        return Err(Error::param("d", "dimension must be at least 1"));
    }
    if uniforms.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: uniforms.len(),
        });
    }
    for &u in uniforms {
        check_unit(u)?;
    }
    let norm = normals.iter().map(|z| z * z).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::param("normals", "direction draw has zero or non-finite norm"));
    }
    let scale = beta / eta;
    let magnitude = -scale * uniforms.iter().map(|u| u.ln()).sum::<f64>();
    Ok(normals.iter().map(|z| z / norm * magnitude).collect())
}

/// Draw from an open-interval uniform.
#[inline]
pub fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

pub fn laplace_vector<R: Rng + ?Sized>(scale: f64, d: usize, rng: &mut R) -> Vec<f64> {
    (0..d)
        .map(|_| laplace_unchecked(scale, open_uniform(rng)))
        .collect()
}

pub fn fill_laplace<R: Rng + ?Sized>(scale: f64, out: &mut [f64], rng: &mut R) {
    for x in out {
        *x = laplace_unchecked(scale, open_uniform(rng));
    }
}

pub fn sample_gamma_vector<R: Rng + ?Sized>(
    d: usize,
    eta: f64,
    beta: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::param("d", "dimension must be at least 1"));
    }
    let mut normals = vec![0.0; d];
    // a zero-norm direction has probability zero, but redraw rather than fail
    loop {
        for z in normals.iter_mut() {
            *z = rng.sample(StandardNormal);
        }
        if normals.iter().any(|z| *z != 0.0) {
            break;
        }
    }
    let uniforms: Vec<f64> = (0..d).map(|_| open_uniform(rng)).collect();
    gamma_vector_from_draws(eta, beta, &normals, &uniforms)
}
