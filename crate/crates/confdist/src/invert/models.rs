//! Ready-made structural models Y = G(theta, U) for the inversion engines.

use std::f64::consts::PI;

use super::GenerativeModel;
use crate::statkit::special::norm_quantile;
use crate::statkit::stats::{mean, median};

/// Location-normal model in full form: y_i = theta + z_i with z iid standard
/// normal. Summary and estimator are both the sample mean.
pub fn normal_location(n: usize, theta_space: (f64, f64)) -> GenerativeModel {
    GenerativeModel::new(
        "normal-location",
        n,
        theta_space,
        |theta, u, out| out.extend(u.iter().map(|&z| theta + z)),
        "iid standard normal",
        move |stream, out| out.extend((0..n).map(|_| norm_quantile(stream.uniform()))),
        |y| mean(y),
        |y| mean(y),
    )
}

/// Location-normal model reduced through its sufficient statistic: the dataset
/// is the single value ybar = theta + ubar with ubar ~ N(0, 1/n). The argmin
/// equation is exactly solvable in theta, so fiducial inversion accepts every
/// attempt with zero residual.
pub fn normal_location_reduced(n: usize, theta_space: (f64, f64)) -> GenerativeModel {
    let root_n = (n as f64).sqrt();
    GenerativeModel::new(
        "normal-location (mean form)",
        n,
        theta_space,
        |theta, u, out| out.push(theta + u[0]),
        "mean of n iid standard normals",
        move |stream, out| out.push(norm_quantile(stream.uniform()) / root_n),
        |y| y[0],
        |y| y[0],
    )
}

/// Scalar summary reported by the Cauchy location model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CauchySummary {
    /// Sample mean: distributed Cauchy(theta, 1) at every n, so inversion
    /// through it reproduces the heavy-tailed law exactly.
    Mean,
    /// Sample median: asymptotically N(theta, pi^2 / (4n)).
    Median,
}

/// Cauchy(theta, 1) location model: y_i = theta + w_i with w iid standard
/// Cauchy. Summary and estimator follow the requested statistic.
pub fn cauchy_location(
    n: usize,
    theta_space: (f64, f64),
    summary: CauchySummary,
) -> GenerativeModel {
    let stat = move |y: &[f64]| match summary {
        CauchySummary::Mean => mean(y),
        CauchySummary::Median => median(y),
    };
    let label = match summary {
        CauchySummary::Mean => "cauchy-location (mean summary)",
        CauchySummary::Median => "cauchy-location (median summary)",
    };
    GenerativeModel::new(
        label,
        n,
        theta_space,
        |theta, u, out| out.extend(u.iter().map(|&w| theta + w)),
        "iid standard Cauchy",
        move |stream, out| out.extend((0..n).map(|_| (PI * (stream.uniform() - 0.5)).tan())),
        stat,
        stat,
    )
}
