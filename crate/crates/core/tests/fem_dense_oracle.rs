use bifidelity::fem::{assemble_and_solve, element_stiffness, FilterKernel, LoadCase, StructuredMesh};
use nalgebra::{DMatrix, DVector};

fn mbb(mesh: &StructuredMesh<f64>) -> LoadCase<f64> {
    let mut fixed: Vec<usize> = (0..=mesh.nely).map(|iy| 2 * mesh.node(0, iy)).collect();
    fixed.push(2 * mesh.node(mesh.nelx, 0) + 1);
    let mut force = vec![0.0; mesh.n_dofs()];
    force[2 * mesh.node(0, mesh.nely) + 1] = -1.0;
    LoadCase { force, fixed }
}

/// Assembles the full matrix independently and solves with nalgebra's LU.
fn dense_compliance(mesh: &StructuredMesh<f64>, rho: &[f64], load: &LoadCase<f64>) -> f64 {
    let k0 = element_stiffness(0.3).unwrap();
    let n = mesh.n_dofs();
    let mut k = DMatrix::<f64>::zeros(n, n);
    for e in 0..mesh.n_elements() {
        let dofs = mesh.element_dofs(e);
        let m = rho[e].powi(3);
        for a in 0..8 {
            for b in 0..8 {
                k[(dofs[a], dofs[b])] += m * k0[a][b];
            }
        }
    }
    let free: Vec<usize> = (0..n).filter(|d| !load.fixed.contains(d)).collect();
    let kf = DMatrix::from_fn(free.len(), free.len(), |i, j| k[(free[i], free[j])]);
    let ff = DVector::from_iterator(free.len(), free.iter().map(|&d| load.force[d]));
    let u = kf.lu().solve(&ff).expect("nonsingular");
    ff.dot(&u)
}

#[test]
fn banded_solve_matches_dense_lu_on_mbb_beam() {
    let mesh = StructuredMesh::unit(60, 20).unwrap();
    let kernel = FilterKernel::with_widths(&mesh, 1.5);
    let theta: Vec<f64> = (0..mesh.n_elements())
        .map(|e| {
            let (x, y): (f64, f64) = mesh.centroid(e);
            0.3 + 0.6 * (0.5 + 0.5 * (x / 7.0).sin() * (y / 5.0).cos())
        })
        .collect();
    let rho = kernel.apply(&theta).unwrap();
    let load = mbb(&mesh);
    let k0 = element_stiffness(0.3).unwrap();
    let banded = assemble_and_solve(&mesh, &k0, &rho, None, &load, 3.0).unwrap();
    let dense = dense_compliance(&mesh, &rho, &load);
    assert!(
        (banded.compliance - dense).abs() <= 1e-8 * dense,
        "banded {} dense {dense}",
        banded.compliance
    );
}
