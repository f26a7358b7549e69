use bifidelity::fem::StructuredMesh;
use bifidelity::uncertainty::{build_kl, build_kl_grid, CovarianceSpec};

#[test]
fn separable_expansion_matches_dense_eigensolve_on_desk_grid() {
    let mesh = StructuredMesh::<f64>::unit(60, 20).unwrap();
    let spec = CovarianceSpec::new(2.0, 3.0, 3.0).unwrap();
    let dense = build_kl(&spec, &mesh.centroids(), 100).unwrap();
    let grid = build_kl_grid(&spec, 60, 20, 1.0, 100).unwrap();
    assert!((dense.captured_fraction() - grid.captured_fraction()).abs() < 1e-10);
    for (a, b) in dense.values.iter().zip(&grid.values) {
        assert!((a - b).abs() < 1e-9 * dense.values[0], "{a} vs {b}");
    }
    // Modes are unique up to sign where eigenvalues are simple.
    for k in 0..5 {
        let d: f64 = dense.modes[k].iter().zip(&grid.modes[k]).map(|(a, b)| a * b).sum();
        assert!((d.abs() - 1.0).abs() < 1e-8, "mode {k}: overlap {d}");
    }
    let total: f64 = dense.pointwise_variance().iter().sum::<f64>() / 1200.0;
    assert!(total < 4.0);
    assert!((dense.total_variance - 4.0 * 1200.0).abs() < 1e-9);
}
