use nalgebra::{Complex, DMatrix};

/// Margin kept inside the unit circle when a root sits on it.
const BOUNDARY_SHRINK: f64 = 0.99;

/// Roots of `zᵖ − a₁zᵖ⁻¹ − … − aₚ`, i.e. the eigenvalues of the companion
/// matrix of the recursion `x_t = Σ aᵢ x_{t−i}`. The recursion is stable
/// iff all of them lie strictly inside the unit circle.
pub fn companion_roots(a: &[f64]) -> Vec<Complex<f64>> {
    let p = a.len();
    if p == 0 {
        return Vec::new();
    }
    let m = DMatrix::from_fn(p, p, |i, j| {
        if i == 0 {
            a[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    m.complex_eigenvalues().iter().copied().collect()
}

pub fn is_stable(a: &[f64]) -> bool {
    companion_roots(a).iter().all(|z| z.norm() < 1.0 - 1e-9)
}

/// Coefficients `a` with `Π(z − λᵢ) = zᵖ − a₁zᵖ⁻¹ − … − aₚ`.
fn from_roots(roots: &[Complex<f64>]) -> Vec<f64> {
    let mut poly = vec![Complex::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex::new(0.0, 0.0); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        poly = next;
    }
    poly[1..].iter().map(|c| -c.re).collect()
}

/// Reflect roots outside the unit circle to `1/λ̄` and pull roots on it
/// slightly inside. Returns the new coefficients and whether anything
/// changed.
pub fn project_stable(a: &[f64]) -> (Vec<f64>, bool) {
    let roots = companion_roots(a);
    if roots.iter().all(|z| z.norm() < 1.0 - 1e-9) {
        return (a.to_vec(), false);
    }
    let fixed: Vec<Complex<f64>> = roots
        .iter()
        .map(|z| {
            let m = z.norm();
            if (m - 1.0).abs() <= 1e-9 {
                z * BOUNDARY_SHRINK
            } else if m > 1.0 {
                z / (m * m)
            } else {
                *z
            }
        })
        .collect();
    (from_roots(&fixed), true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ar1_roots() {
        let r = companion_roots(&[0.7]);
        assert!((r[0].re - 0.7).abs() < 1e-12);
        assert!(is_stable(&[0.6, -0.3]));
        assert!(!is_stable(&[1.2]));
        assert!(!is_stable(&[0.5, 0.6]));
    }

    #[test]
    fn round_trip_through_roots() {
        let a = [0.6, -0.3, 0.1];
        let back = from_roots(&companion_roots(&a));
        for (x, y) in a.iter().zip(&back) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn reflection() {
        let (a, changed) = project_stable(&[2.0]);
        assert!(changed);
        assert!((a[0] - 0.5).abs() < 1e-12);
        let (a, changed) = project_stable(&[1.0]);
        assert!(changed);
        assert!((a[0] - 0.99).abs() < 1e-12);
        let (a, changed) = project_stable(&[0.5, 0.6]);
        assert!(changed && is_stable(&a));
        let (a, changed) = project_stable(&[0.6, -0.3]);
        assert!(!changed);
        assert_eq!(a, vec![0.6, -0.3]);
    }
}
