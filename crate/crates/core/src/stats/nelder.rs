//! Derivative-free simplex minimizer used by the Johnson Su and SHASH
//! maximum-likelihood fits.

/// Result of one simplex run.
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    /// True when the simplex diameter fell below `x_tol`.
    pub converged: bool,
}

/// Nelder-Mead with standard coefficients (reflect 1, expand 2, contract
/// 0.5, shrink 0.5). Vertices evaluating to non-finite values are treated as
/// +inf, which keeps the simplex inside the feasible region.
pub fn minimize(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    x_tol: f64,
    max_iters: usize,
) -> SimplexOutcome {
    let dim = x0.len();
    let guard = |v: f64| if v.is_finite() { v } else { f64::INFINITY };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| guard(f(v))).collect();

    let mut converged = false;
    for _ in 0..max_iters {
        // Order vertices best to worst.
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        let diameter = simplex
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < x_tol {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for (i, v) in simplex.iter().enumerate() {
            if i == worst {
                continue;
            }
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }

        let blend = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
        };

        // Reflection.
        let reflected = blend(&centroid, &simplex[worst], -1.0);
        let f_r = guard(f(&reflected));
        if f_r < values[best] {
            // Expansion.
            let expanded = blend(&centroid, &simplex[worst], -2.0);
            let f_e = guard(f(&expanded));
            if f_e < f_r {
                simplex[worst] = expanded;
                values[worst] = f_e;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_r;
            }
        } else if f_r < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_r;
        } else {
            // Contraction, outside or inside of the worst vertex.
            let contracted = if f_r < values[worst] {
                blend(&centroid, &simplex[worst], -0.5)
            } else {
                blend(&centroid, &simplex[worst], 0.5)
            };
            let f_c = guard(f(&contracted));
            if f_c < values[worst].min(f_r) {
                simplex[worst] = contracted;
                values[worst] = f_c;
            } else {
                // Shrink toward the best vertex.
                let anchor = simplex[best].clone();
                for (i, v) in simplex.iter_mut().enumerate() {
                    if i == best {
                        continue;
                    }
                    *v = blend(&anchor, v, 0.5);
                    values[i] = guard(f(v));
                }
            }
        }
    }

    let best = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap();
    SimplexOutcome {
        x: simplex[best].clone(),
        value: values[best],
        converged,
    }
}
