//! Nelder–Mead downhill simplex with dimension-adaptive coefficients
//! (Gao & Han, 2012).

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_evals: usize,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// ... and every vertex is within this of the best one.
    pub x_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_evals: 4000,
            f_tol: 1e-13,
            x_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

/// Minimises `f` starting from a simplex of `start` plus `step` along each axis.
pub fn minimize<F>(f: F, start: &[f64], step: f64, opts: &SimplexOptions) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    if n == 0 {
        return SimplexResult {
            point: Vec::new(),
            value: f(start),
            evals: 1,
        };
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut verts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    verts.push(start.to_vec());
    for k in 0..n {
        let mut v = start.to_vec();
        v[k] += if v[k] != 0.0 { step.copysign(v[k]) } else { step };
        verts.push(v);
    }
    let mut vals: Vec<f64> = verts.iter().map(|v| eval(v)).collect();

    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
    };

    loop {
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        verts = idx.iter().map(|&i| verts[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();

        let spread_f = vals[n] - vals[0];
        let spread_x = verts[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&verts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (spread_f <= opts.f_tol && spread_x <= opts.x_tol) || evals.get() >= opts.max_evals {
            break;
        }

        let mut centroid = vec![0.0; n];
        for v in &verts[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / nf;
            }
        }
        let worst = verts[n].clone();

        let reflected = lerp(&centroid, &worst, -alpha);
        let fr = eval(&reflected);
        if fr < vals[0] {
            let expanded = lerp(&centroid, &worst, -alpha * gamma);
            let fe = eval(&expanded);
            if fe < fr {
                verts[n] = expanded;
                vals[n] = fe;
            } else {
                verts[n] = reflected;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            verts[n] = reflected;
            vals[n] = fr;
            continue;
        }
        let (contracted, fc) = if fr < vals[n] {
            let c = lerp(&centroid, &worst, -alpha * rho);
            let fc = eval(&c);
            (c, fc)
        } else {
            let c = lerp(&centroid, &worst, rho);
            let fc = eval(&c);
            (c, fc)
        };
        if fc < fr.min(vals[n]) {
            verts[n] = contracted;
            vals[n] = fc;
            continue;
        }
        // shrink towards the best vertex
        let best = verts[0].clone();
        for k in 1..=n {
            verts[k] = lerp(&best, &verts[k], sigma);
            vals[k] = eval(&verts[k]);
        }
    }

    SimplexResult {
        point: verts.swap_remove(0),
        value: vals[0],
        evals: evals.get(),
    }
}
