//! Derivative-free searches used by calibration and design optimization.

use serde::{Deserialize, Serialize};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarMinimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol` or after `max_iter` shrinks.
/// Both endpoints are evaluated as well so a boundary minimum is returned exactly.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> ScalarMinimum
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evaluations = 2;
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
    }
    let mut best = if fc <= fd {
        ScalarMinimum {
            x: c,
            value: fc,
            evaluations,
        }
    } else {
        ScalarMinimum {
            x: d,
            value: fd,
            evaluations,
        }
    };
    for end in [lo, hi] {
        let v = f(end);
        best.evaluations += 1;
        if v < best.value {
            best.x = end;
            best.value = v;
        }
    }
    best
}

/// Simplex coefficients and stopping rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NelderMeadSettings {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Initial simplex edge, in normalized (unit-box) coordinates.
    pub initial_step: f64,
    /// Stop when every vertex is within this distance (normalized, max-norm) of the best.
    pub diameter_tol: f64,
    pub max_evaluations: usize,
    /// Fresh simplices started from the incumbent after convergence.
    pub restarts: usize,
}

impl Default for NelderMeadSettings {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.1,
            diameter_tol: 1e-6,
            max_evaluations: 500,
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub restarts_used: usize,
}

fn project(x: &mut [f64]) {
    for v in x {
        *v = v.clamp(0.0, 1.0);
    }
}

/// Nelder–Mead over the unit box; every trial point is clamped into `[0, 1]^d`.
pub fn nelder_mead_unit_box<F>(
    mut f: F,
    start: &[f64],
    settings: &NelderMeadSettings,
) -> SimplexMinimum
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    let mut x0 = start.to_vec();
    project(&mut x0);
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    if dim == 0 {
        let value = eval(&x0, &mut evaluations);
        return SimplexMinimum {
            x: x0,
            value,
            evaluations,
            converged: true,
            restarts_used: 0,
        };
    }

    let mut best_x = x0.clone();
    let mut best_v = eval(&x0, &mut evaluations);
    let mut converged = false;
    let mut restarts_used = 0;
    let mut step = settings.initial_step;

    for round in 0..=settings.restarts {
        if evaluations >= settings.max_evaluations {
            break;
        }
        if round > 0 {
            restarts_used += 1;
        }
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        simplex.push((best_x.clone(), best_v));
        for i in 0..dim {
            let mut v = best_x.clone();
            v[i] = if v[i] + step <= 1.0 {
                v[i] + step
            } else {
                v[i] - step
            };
            let fv = eval(&v, &mut evaluations);
            simplex.push((v, fv));
        }

        converged = false;
        while evaluations < settings.max_evaluations {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let diameter = simplex[1..]
                .iter()
                .map(|(v, _)| {
                    v.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if diameter < settings.diameter_tol {
                converged = true;
                break;
            }

            let worst = simplex[dim].clone();
            let centroid: Vec<f64> = (0..dim)
                .map(|j| simplex[..dim].iter().map(|(v, _)| v[j]).sum::<f64>() / dim as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                let mut p: Vec<f64> = centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect();
                project(&mut p);
                p
            };

            let xr = along(settings.reflection);
            let fr = eval(&xr, &mut evaluations);
            if fr < simplex[0].1 {
                let xe = along(settings.reflection * settings.expansion);
                let fe = eval(&xe, &mut evaluations);
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst.1 {
                let xc = along(settings.reflection * settings.contraction);
                let fc = eval(&xc, &mut evaluations);
                (xc, fc)
            } else {
                let xc = along(-settings.contraction);
                let fc = eval(&xc, &mut evaluations);
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[dim] = (xc, fc);
                continue;
            }
            let anchor = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let mut p: Vec<f64> = anchor
                    .iter()
                    .zip(&vertex.0)
                    .map(|(a, v)| a + settings.shrink * (v - a))
                    .collect();
                project(&mut p);
                let fp = eval(&p, &mut evaluations);
                *vertex = (p, fp);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let improved = simplex[0].1 < best_v;
        if simplex[0].1 <= best_v {
            best_x = simplex[0].0.clone();
            best_v = simplex[0].1;
        }
        if round > 0 && !improved {
            break;
        }
        step = (step * 0.5).max(settings.diameter_tol * 10.0);
    }

    SimplexMinimum {
        x: best_x,
        value: best_v,
        evaluations,
        converged,
        restarts_used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let m = golden_section(|x| (x - 0.37).powi(2), 0.0, 1.0, 1e-10, 200);
        assert!((m.x - 0.37).abs() < 1e-8);
    }

    #[test]
    fn golden_returns_boundary() {
        let m = golden_section(|x| -x, 0.0, 1.0, 1e-10, 200);
        assert_eq!(m.x, 1.0);
    }

    #[test]
    fn simplex_quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + 2.0 * (x[1] - 0.8).powi(2);
        let m = nelder_mead_unit_box(f, &[0.5, 0.5], &NelderMeadSettings::default());
        assert!((m.x[0] - 0.3).abs() < 1e-5, "{:?}", m);
        assert!((m.x[1] - 0.8).abs() < 1e-5, "{:?}", m);
        assert!(m.evaluations <= 500);
    }

    #[test]
    fn simplex_respects_box() {
        let f = |x: &[f64]| -(x[0] + x[1]);
        let m = nelder_mead_unit_box(f, &[0.2, 0.9], &NelderMeadSettings::default());
        assert!(m.x.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!((m.value + 2.0).abs() < 1e-6, "{:?}", m);
    }

    #[test]
    fn simplex_never_worse_than_start() {
        let f = |x: &[f64]| (10.0 * x[0]).sin() + (7.0 * x[1]).cos();
        let start = [0.41, 0.77];
        let m = nelder_mead_unit_box(f, &start, &NelderMeadSettings::default());
        assert!(m.value <= f(&start));
    }

    #[test]
    fn zero_dimensional_is_single_evaluation() {
        let m = nelder_mead_unit_box(|_| 3.0, &[], &NelderMeadSettings::default());
        assert_eq!((m.value, m.evaluations), (3.0, 1));
    }
}
