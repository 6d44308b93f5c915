//! Derivative-free local descent (Nelder-Mead with restarts).

pub(crate) struct LocalMin {
    pub x: Vec<f64>,
    pub f: f64,
}

/// Nelder-Mead from `x0` with initial steps `step`, restarted from the best vertex until a
/// round stops improving. `max_iter` bounds the iterations of each round.
pub(crate) fn minimize(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    step: &[f64],
    max_iter: usize,
    rounds: usize,
) -> LocalMin {
    let mut best = LocalMin {
        x: x0.to_vec(),
        f: f(x0),
    };
    let mut scale = 1.0;
    for _ in 0..rounds.max(1) {
        let steps: Vec<f64> = step.iter().map(|s| s * scale).collect();
        let next = round(f, &best.x, best.f, &steps, max_iter);
        let gain = best.f - next.f;
        let improved = next.f < best.f;
        if improved {
            best = next;
        }
        if !(gain > 1e-15 * (1.0 + best.f.abs())) {
            if scale < 1e-4 {
                break;
            }
            // a stalled round gets a smaller simplex before giving up
            scale *= 0.1;
        }
    }
    best
}

fn round(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], f0: f64, step: &[f64], max_iter: usize) -> LocalMin {
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    let mut vals = vec![f0];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step[i];
        vals.push(f(&x));
        pts.push(x);
    }
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&k| pts[k].clone()).collect();
        vals = order.iter().map(|&k| vals[k]).collect();
        let spread = vals[n] - vals[0];
        if spread.is_finite() && spread <= 1e-16 * (1.0 + vals[0].abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|i| pts[..n].iter().map(|p| p[i]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(1.0);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(2.0);
            let fe = f(&xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let xc = along(0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for k in 1..=n {
                    let shrunk: Vec<f64> = pts[0]
                        .iter()
                        .zip(&pts[k])
                        .map(|(b, p)| b + 0.5 * (p - b))
                        .collect();
                    vals[k] = f(&shrunk);
                    pts[k] = shrunk;
                }
            }
        }
    }
    let k = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    LocalMin {
        x: pts[k].clone(),
        f: vals[k],
    }
}

/// Golden-section search for the minimum of a unimodal function on [a, b].
pub(crate) fn golden_section(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let fa = f(a);
    let fb = f(b);
    [(c, fc), (d, fd), (a, fa), (b, fb)]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap_or((a, fa))
}
