use std::f64::consts::PI;

use prolate::entropy::{entropy_report, BallFunction};
use prolate::modular::{instance_report, StandardSubspace};
use prolate::prolate1d::{assemble_prolate_matrix, concentration_values, prolate_eigenpairs};

/// Composite Simpson rule on `[-1, 1]` with `m` (even) intervals.
fn simpson(m: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = 2.0 / m as f64;
    let mut s = f(-1.0) + f(1.0);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(-1.0 + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn gaussian_entropies_match_brute_force_quadrature() {
    let r = entropy_report(&BallFunction::gaussian(1, 0.5).unwrap()).unwrap();
    let f = |x: f64| (-0.5 * x * x).exp();
    let df = |x: f64| -x * f(x);
    let m = 10_000;
    let born = PI * simpson(m, |x| f(x) * f(x));
    let parabolic = PI * simpson(m, |x| (1.0 - x * x) * f(x) * f(x));
    let legendre = PI * simpson(m, |x| (1.0 - x * x) * df(x) * df(x));
    let prolate = PI * simpson(m, |x| (1.0 - x * x) * df(x) * df(x) + x * x * f(x) * f(x));
    for (got, want) in [(r.born, born), (r.parabolic, parabolic), (r.legendre, legendre), (r.prolate, prolate)] {
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}

#[test]
fn small_bandwidth_expansion() {
    // α_n(c) = n(n+1) + c²⟨P̃_n, x²P̃_n⟩ + O(c⁴), ⟨x²⟩_n = (2n²+2n−1)/((2n−1)(2n+3))
    let c: f64 = 0.01;
    let spec = prolate_eigenpairs(&assemble_prolate_matrix(c, 32).unwrap(), 8).unwrap();
    for n in 0..8 {
        let nf = n as f64;
        let x2 = (2.0 * nf * nf + 2.0 * nf - 1.0) / ((2.0 * nf - 1.0) * (2.0 * nf + 3.0));
        let expected = nf * (nf + 1.0) + c * c * x2;
        assert!((spec.eigenvalues[n] - expected).abs() < 10.0 * c.powi(4), "n={n}");
    }
}

#[test]
fn eigenfunction_k_has_k_nodes() {
    for c in [0.5, 2.0, 6.0] {
        let spec = prolate_eigenpairs(&assemble_prolate_matrix(c, 64).unwrap(), 12).unwrap();
        for k in 0..12 {
            let samples: Vec<f64> = (1..4000).map(|i| spec.eval(k, -1.0 + i as f64 / 2000.0)).collect();
            let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let signs: Vec<bool> = samples
                .iter()
                .filter(|v| v.abs() > 1e-9 * scale)
                .map(|&v| v > 0.0)
                .collect();
            let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
            assert_eq!(changes, k, "c={c} k={k}");
        }
    }
}

#[test]
fn basis_doubling_is_converged() {
    let a = prolate_eigenpairs(&assemble_prolate_matrix(1.0, 32).unwrap(), 10).unwrap();
    let b = prolate_eigenpairs(&assemble_prolate_matrix(1.0, 64).unwrap(), 10).unwrap();
    for k in 0..10 {
        assert!((a.eigenvalues[k] - b.eigenvalues[k]).abs() < 1e-10);
    }
}

#[test]
fn lower_prolate_entropy_means_higher_concentration() {
    let spec = prolate_eigenpairs(&assemble_prolate_matrix(1.0, 64).unwrap(), 22).unwrap();
    let lambda = concentration_values(&spec, 22);
    let mut rows = Vec::new();
    for k in (0..22).filter(|&k| spec.parity[k] == 0) {
        let coeffs = spec.coefficients.column(k).iter().copied().collect();
        let r = entropy_report(&BallFunction::legendre_series(coeffs).unwrap()).unwrap();
        // ψ_k is a unit eigenvector of −W, so its prolate entropy is π α_k
        assert!((r.prolate - PI * spec.eigenvalues[k]).abs() < 1e-9 * (1.0 + r.prolate));
        rows.push((r.prolate, lambda[k]));
    }
    assert_eq!(rows.len(), 11);
    for w in rows.windows(2) {
        assert!(w[1].0 > w[0].0 && w[1].1 < w[0].1, "{w:?}");
    }
}

#[test]
fn odd_dimension_is_standard_with_a_unit_eigenspace() {
    let h = StandardSubspace::random(5, 42).unwrap();
    assert!(h.condition.is_finite() && h.condition > 1.0);
    // an odd number of complex dimensions always leaves Δ = 1 on a line
    assert!(!h.factorial);
    let r = instance_report(5, 42, 200).unwrap();
    assert_eq!(r.factorial_dim, 4);
    assert!(r.passes());
}
