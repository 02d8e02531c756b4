//! Numerical quadrature: globally adaptive Gauss-Kronrod (the workhorse for
//! the bath-response integrals), adaptive Simpson (kept as an independent
//! scheme for cross-checks), and generalized Gauss-Laguerre rules used to
//! discretize the Ohmic spectral density into a finite set of modes.

use crate::error::{Error, Result};
use crate::C64;

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights. Standard QUADPACK values.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &mut impl FnMut(f64) -> C64, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = C64::new(0.0, 0.0);
    let mut gauss = C64::new(0.0, 0.0);
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let (fp, fm) = if x == 0.0 {
            let v = f(c);
            (v, C64::new(0.0, 0.0))
        } else {
            (f(c + h * x), f(c - h * x))
        };
        let pair = fp + fm;
        kronrod += pair * wk;
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    kronrod *= h;
    gauss *= h;
    (kronrod, (kronrod - gauss).norm())
}

pub struct QuadResult {
    pub value: C64,
    pub abs_error: f64,
    pub panels: usize,
}

/// Globally adaptive Gauss-Kronrod integration of a complex-valued integrand
/// over [a, b]. Bisects the worst panel until the summed error estimate is
/// below `rel_tol * |value|` (or `abs_floor` for values near zero).
pub fn adaptive_gauss_kronrod(
    mut f: impl FnMut(f64) -> C64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
) -> Result<QuadResult> {
    const MAX_PANELS: usize = 4096;
    let (v0, e0) = gk15(&mut f, a, b);
    let mut panels: Vec<(f64, f64, C64, f64)> = vec![(a, b, v0, e0)];
    loop {
        let value: C64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        let target = (rel_tol * value.norm()).max(abs_floor);
        if err <= target {
            return Ok(QuadResult {
                value,
                abs_error: err,
                panels: panels.len(),
            });
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::Quadrature {
                requested: rel_tol,
                achieved: err / value.norm().max(abs_floor),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (pa, pb, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (pa + pb);
        let (v1, e1) = gk15(&mut f, pa, mid);
        let (v2, e2) = gk15(&mut f, mid, pb);
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
}

/// Adaptive Simpson integration; an independent scheme used to cross-check
/// the Gauss-Kronrod results.
pub fn adaptive_simpson(
    f: &impl Fn(f64) -> C64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> C64 {
    fn simpson(fa: C64, fm: C64, fb: C64, h: f64) -> C64 {
        (fa + fm * 4.0 + fb) * (h / 6.0)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> C64,
        a: f64,
        b: f64,
        fa: C64,
        fm: C64,
        fb: C64,
        whole: C64,
        tol: f64,
        depth: usize,
    ) -> C64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

/// Nodes and weights of the n-point generalized Gauss-Laguerre rule for the
/// weight x^alpha e^{-x} on [0, inf), alpha a small nonnegative integer.
/// Computed by Golub-Welsch from the Jacobi matrix of the recurrence.
pub fn gauss_laguerre(n: usize, alpha: u32) -> Result<Vec<(f64, f64)>> {
    if n == 0 || n > 64 {
        return Err(Error::InvalidParameter {
            name: "gauss_laguerre",
            reason: format!("need 1 <= n <= 64, got {n}"),
        });
    }
    let af = alpha as f64;
    let mut jac = vec![0.0f64; n * n];
    for k in 0..n {
        jac[k * n + k] = 2.0 * k as f64 + af + 1.0;
        if k + 1 < n {
            let off = ((k + 1) as f64 * ((k + 1) as f64 + af)).sqrt();
            jac[k * n + k + 1] = off;
            jac[(k + 1) * n + k] = off;
        }
    }
    let (nodes, vecs) = crate::linalg::sym_eig_f64(&jac, n)?;
    // mu0 = Gamma(alpha + 1) = alpha!
    let mu0: f64 = (1..=alpha).map(|k| k as f64).product::<f64>().max(1.0);
    let out = nodes
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let v0 = vecs[j]; // first component of eigenvector j
            (x, mu0 * v0 * v0)
        })
        .collect();
    Ok(out)
}

/// coth(x) for x > 0, stable for both small and large arguments.
pub fn coth(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 1e-5 {
        1.0 / x + x / 3.0 - x * x * x / 45.0
    } else if x > 20.0 {
        1.0
    } else {
        let e = (2.0 * x).exp();
        (e + 1.0) / (e - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_integrates_oscillatory_decay() {
        // int_0^inf e^{-x} cos(5x) dx = 1 / 26
        let r = adaptive_gauss_kronrod(
            |x| C64::new((-x).exp() * (5.0 * x).cos(), 0.0),
            0.0,
            60.0,
            1e-12,
            1e-300,
        )
        .unwrap();
        assert!((r.value.re - 1.0 / 26.0).abs() < 1e-12);
    }

    #[test]
    fn gk_complex_integrand() {
        // int_0^1 e^{i pi x} dx = (e^{i pi} - 1)/(i pi) = 2i / pi
        let r = adaptive_gauss_kronrod(
            |x| (C64::new(0.0, std::f64::consts::PI * x)).exp(),
            0.0,
            1.0,
            1e-13,
            1e-300,
        )
        .unwrap();
        assert!((r.value - C64::new(0.0, 2.0 / std::f64::consts::PI)).norm() < 1e-13);
    }

    #[test]
    fn simpson_agrees_with_gk() {
        let f = |x: f64| C64::new((x * x).sin(), (0.3 * x).cos());
        let gk = adaptive_gauss_kronrod(f, 0.0, 4.0, 1e-11, 1e-300).unwrap();
        let simp = adaptive_simpson(&f, 0.0, 4.0, 1e-12, 40);
        assert!((gk.value - simp).norm() < 1e-9);
    }

    #[test]
    fn laguerre_alpha1_integrates_polynomials() {
        // int_0^inf x e^{-x} x^k dx = (k + 1)!
        let rule = gauss_laguerre(4, 1).unwrap();
        for k in 0..=5usize {
            let got: f64 = rule.iter().map(|&(x, w)| w * x.powi(k as i32)).sum();
            let want: f64 = (1..=(k + 1)).map(|m| m as f64).product();
            assert!(
                (got - want).abs() < 1e-9 * want,
                "k={k}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn coth_limits() {
        assert!((coth(1e-8) - 1e8).abs() / 1e8 < 1e-9);
        assert!((coth(50.0) - 1.0).abs() < 1e-15);
        assert!((coth(1.0) - (2.0f64.exp() + 1.0) / (2.0f64.exp() - 1.0)).abs() < 1e-15);
    }
}
