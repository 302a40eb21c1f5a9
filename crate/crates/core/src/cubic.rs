//! Roots of the depressed complex cubic z^3 + p z + q.

use num_complex::Complex64;

/// All three roots of z^3 + p z + q = 0, polished by Newton steps.
///
/// Uses Cardano's formula with the square-root branch chosen to avoid
/// cancellation in the dominant cube. The returned roots satisfy
/// |z^3 + p z + q| <= 1e-10 (1 + |z|^3) and sum to zero.
pub fn cubic_roots(p: Complex64, q: Complex64) -> [Complex64; 3] {
    let omega = Complex64::new(-0.5, 0.75f64.sqrt()); // primitive cube root of unity

    let roots = if q.norm() == 0.0 {
        // z (z^2 + p) = 0
        let s = (-p).sqrt();
        [Complex64::new(0.0, 0.0), s, -s]
    } else if p.norm() == 0.0 {
        let r = (-q).powf(1.0 / 3.0);
        [r, omega * r, omega * omega * r]
    } else {
        let d = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
        let s = d.sqrt();
        // Pick the sign that maximises |u^3| so v = -p/(3u) is well conditioned.
        let c1 = -q / 2.0 + s;
        let c2 = -q / 2.0 - s;
        let u3 = if c1.norm() >= c2.norm() { c1 } else { c2 };
        let u = u3.powf(1.0 / 3.0);
        let v = -p / (3.0 * u);
        [
            u + v,
            omega * u + omega * omega * v,
            omega * omega * u + omega * v,
        ]
    };

    roots.map(|z0| {
        let mut z = z0;
        for _ in 0..3 {
            let f = z * z * z + p * z + q;
            let df = 3.0 * z * z + p;
            if df.norm() > 1e-300 {
                let step = f / df;
                if step.norm() < 1.0 + z.norm() {
                    z -= step;
                }
            }
        }
        z
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(p: Complex64, q: Complex64, z: Complex64) -> f64 {
        (z * z * z + p * z + q).norm() / (1.0 + z.norm().powi(3))
    }

    #[test]
    fn cube_roots_of_unity() {
        let roots = cubic_roots(Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0));
        for r in roots {
            assert!((r.norm() - 1.0).abs() < 1e-12);
            assert!(residual(Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0), r) < 1e-12);
        }
    }

    #[test]
    fn zero_one_minus_one() {
        let p = Complex64::new(-1.0, 0.0);
        let q = Complex64::new(0.0, 0.0);
        let mut roots = cubic_roots(p, q).to_vec();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(roots[1].norm() < 1e-12);
        assert!((roots[2] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(128))]
        #[test]
        fn residuals_stay_small(
            pre in -1e4f64..1e4, pim in -1e4f64..1e4,
            qre in -1e5f64..1e5, qim in -1e5f64..1e5,
        ) {
            let p = Complex64::new(pre, pim);
            let q = Complex64::new(qre, qim);
            let roots = cubic_roots(p, q);
            let scale = roots.iter().map(|r| r.norm()).fold(1.0f64, f64::max);
            let sum: Complex64 = roots.iter().sum();
            proptest::prop_assert!(sum.norm() <= 1e-9 * scale);
            for r in roots {
                proptest::prop_assert!(residual(p, q, r) < 1e-10);
            }
        }
    }

    #[test]
    fn vieta_and_residual_on_complex_coefficients() {
        let cases = [
            (Complex64::new(0.0, 772.83), Complex64::new(27290.2, -27290.2)),
            (Complex64::new(3.0, -2.0), Complex64::new(-1.0, 5.0)),
            (Complex64::new(-14.5, 0.2), Complex64::new(0.3, 0.0)),
        ];
        for (p, q) in cases {
            let roots = cubic_roots(p, q);
            let sum: Complex64 = roots.iter().sum();
            let prod: Complex64 = roots.iter().product();
            let scale = roots.iter().map(|r| r.norm()).fold(1.0f64, f64::max);
            assert!(sum.norm() <= 1e-9 * scale, "sum {sum} for p={p} q={q}");
            assert!(
                (prod + q).norm() <= 1e-9 * q.norm().max(scale.powi(3)),
                "prod {prod} vs -q {q}"
            );
            for r in roots {
                assert!(residual(p, q, r) < 1e-10, "residual at {r}");
            }
        }
    }
}
