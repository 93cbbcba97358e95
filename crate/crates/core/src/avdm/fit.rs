//! Least-squares fit of the decoding coefficients against ground truth.
//!
//! The model `omega = a * lambda^b * g` with `g = (1 + C) / (2 C) * sqrt(R)`
//! is linear in log space, `ln(omega / g) = ln a + b ln lambda`, which gives
//! the initial estimate. A damped Gauss-Newton refinement then minimises the
//! squared residual in the original units, accepting only steps that lower
//! the objective.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::avdm::decode::contrast_factor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSample {
    pub omega_true: f64,
    pub lambda: f64,
    pub c_hat: f64,
    pub r: f64,
}

impl FitSample {
    fn gain(&self) -> f64 {
        contrast_factor(self.c_hat) * self.r.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub a_hat: f64,
    pub b_hat: f64,
    /// Log-space initialiser.
    pub a_init: f64,
    pub b_init: f64,
    pub objective_init: f64,
    pub objective: f64,
    /// Objective after each accepted refinement step, starting with the initialiser.
    pub history: Vec<f64>,
    pub residuals: Vec<f64>,
}

fn objective(samples: &[FitSample], a: f64, b: f64) -> f64 {
    samples
        .iter()
        .map(|s| {
            let e = s.omega_true - a * s.lambda.powf(b) * s.gain();
            e * e
        })
        .sum()
}

pub fn fit_params(samples: &[FitSample]) -> Result<FitResult> {
    if samples.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    if let Some(s) = samples.iter().find(|s| {
        !(s.r > 0.0 && s.omega_true > 0.0 && s.lambda > 0.0 && s.c_hat > 0.0)
    }) {
        return Err(Error::DegenerateFit(format!(
            "all of r, omega, lambda, c must be positive; offending sample {s:?}"
        )));
    }

    let xs: Vec<f64> = samples.iter().map(|s| s.lambda.ln()).collect();
    let ys: Vec<f64> = samples
        .iter()
        .map(|s| s.omega_true.ln() - s.gain().ln())
        .collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let spread = xs.iter().fold(0.0f64, |m, x| m.max((x - mx).abs()));
    if spread < 1e-9 {
        return Err(Error::DegenerateFit(
            "all lambda values are equal, the exponent b is unidentifiable".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b_init = sxy / sxx;
    let a_init = (my - b_init * mx).exp();

    let (mut a, mut b) = (a_init, b_init);
    let mut obj = objective(samples, a, b);
    let objective_init = obj;
    let mut history = vec![obj];
    let mut mu = 1e-3;
    for _ in 0..500 {
        // Normal equations of the residual Jacobian.
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (s, &lx) in samples.iter().zip(&xs) {
            let m = s.lambda.powf(b) * s.gain();
            let e = s.omega_true - a * m;
            let da = -m;
            let db = -a * m * lx;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * e;
            gb += db * e;
        }
        let mut accepted = false;
        while mu < 1e12 {
            let (haa, hbb) = (jaa * (1.0 + mu), jbb * (1.0 + mu));
            let det = haa * hbb - jab * jab;
            if det.abs() < f64::MIN_POSITIVE {
                mu *= 10.0;
                continue;
            }
            let step_a = -(hbb * ga - jab * gb) / det;
            let step_b = -(haa * gb - jab * ga) / det;
            let trial = objective(samples, a + step_a, b + step_b);
            if trial < obj {
                a += step_a;
                b += step_b;
                let improvement = obj - trial;
                obj = trial;
                history.push(obj);
                mu = (mu / 10.0).max(1e-12);
                accepted = improvement > obj * 1e-15 && improvement > 0.0;
                break;
            }
            mu *= 10.0;
        }
        if !accepted {
            break;
        }
    }

    let residuals = samples
        .iter()
        .map(|s| s.omega_true - a * s.lambda.powf(b) * s.gain())
        .collect();
    Ok(FitResult {
        a_hat: a,
        b_hat: b,
        a_init,
        b_init,
        objective_init,
        objective: obj,
        history,
        residuals,
    })
}

/// Per-sample residual report.
pub fn write_residual_csv(
    samples: &[FitSample],
    fit: &FitResult,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("index,omega_true,lambda,c_hat,r,omega_fit,residual\n");
    for (i, (s, e)) in samples.iter().zip(&fit.residuals).enumerate() {
        out.push_str(&format!(
            "{i},{},{},{},{},{},{}\n",
            s.omega_true,
            s.lambda,
            s.c_hat,
            s.r,
            s.omega_true - e,
            e
        ));
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| Error::io(path, e))
}
