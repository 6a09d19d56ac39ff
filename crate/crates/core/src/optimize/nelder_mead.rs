use serde::Serialize;

use crate::error::{Error, Result};

/// Nelder–Mead coefficients and stopping rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Initial simplex edge as a fraction of each bound width.
    pub init_scale: f64,
    pub restarts: usize,
    pub max_evals: usize,
    /// Stop once the simplex diameter falls below this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            init_scale: 0.1,
            restarts: 5,
            max_evals: 2000,
            tol: 1e-10,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.reflection > 0.0) {
            return bad("reflection coefficient must be positive");
        }
        if !(self.expansion > 1.0 && self.expansion > self.reflection) {
            return bad("expansion coefficient must exceed 1 and the reflection coefficient");
        }
        if !(self.contraction > 0.0 && self.contraction < 1.0) {
            return bad("contraction coefficient must lie in (0, 1)");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink coefficient must lie in (0, 1)");
        }
        if !(self.init_scale > 0.0) {
            return bad("initial simplex scale must be positive");
        }
        if self.restarts < 3 {
            return bad("at least 3 restarts are required");
        }
        if self.max_evals == 0 {
            return bad("evaluation budget must be positive");
        }
        Ok(())
    }
}

/// Result of one Nelder–Mead run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

/// Minimize `f` from `x0` with initial edges `steps`. The returned value is
/// never worse than `f(x0)`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    steps: &[f64],
    cfg: &OptimizerConfig,
) -> Minimum {
    let d = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for j in 0..d {
        let mut x = x0.to_vec();
        x[j] += steps[j];
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    if d == 0 {
        return Minimum {
            x: Vec::new(),
            value: v0,
            evals,
        };
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| {
        s.sort_by(|a, b| a.1.total_cmp(&b.1));
    };
    let lerp = |c: &[f64], x: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(x).map(|(ci, xi)| ci + t * (xi - ci)).collect()
    };
    while evals < cfg.max_evals {
        order(&mut simplex);
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < cfg.tol {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|j| simplex[..d].iter().map(|(x, _)| x[j]).sum::<f64>() / d as f64)
            .collect();
        let (worst, fw) = simplex[d].clone();
        let fbest = simplex[0].1;
        let fsecond = simplex[d - 1].1;
        let xr = lerp(&centroid, &worst, -cfg.reflection);
        let fr = eval(&xr, &mut evals);
        if fr < fbest {
            let xe = lerp(&centroid, &worst, -cfg.expansion);
            let fe = eval(&xe, &mut evals);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < fsecond {
            simplex[d] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < fw {
            let xc = lerp(&centroid, &xr, cfg.contraction);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = lerp(&centroid, &worst, cfg.contraction);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < fw.min(fr) {
            simplex[d] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for item in simplex.iter_mut().skip(1) {
            let x = lerp(&best, &item.0, cfg.shrink);
            let v = eval(&x, &mut evals);
            *item = (x, v);
        }
    }
    order(&mut simplex);
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, evals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let cfg = OptimizerConfig {
            max_evals: 5000,
            tol: 1e-12,
            ..Default::default()
        };
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(f, &[-1.2, 1.0], &[0.1, 0.1], &cfg);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{:?}", m.x);
    }

    #[test]
    fn never_worse_than_start_and_avoids_infinite_region() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::INFINITY } else { (x[0] - 0.3).powi(2) };
        let m = nelder_mead(f, &[0.0], &[0.05], &OptimizerConfig::default());
        assert!((m.x[0] - 0.3).abs() < 1e-5);
        let flat = nelder_mead(|_| 1.0, &[0.2, 0.2], &[0.1, 0.1], &OptimizerConfig::default());
        assert_eq!(flat.value, 1.0);
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        let bad = OptimizerConfig {
            restarts: 2,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig {
            contraction: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
