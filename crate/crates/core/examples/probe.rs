use hawking_lab_core::ambient::*;
use hawking_lab_core::profile::*;
use hawking_lab_core::grid::*;
use hawking_lab_core::surface::*;
use hawking_lab_core::spectral::*;
use hawking_lab_core::linalg::*;

fn main() {
    let params = ProfileParams::from_a(0.6_f64).unwrap();
    let prof = integrate_profile(params, 3.0, 1e-3).unwrap();
    let amb = AmbientMetric::model(prof);
    let grid = HemisphereGrid::new(129, 1).unwrap();
    let geom = slice_surface(&amb, &grid, 0.0).compute_geometry().unwrap();
    let op = assemble_jacobi(&geom).unwrap();
    let (s, _) = op.reduced_symmetric();
    let n = s.n_rows;
    let shift = 1.77749;
    let mut sh = s.clone();
    for i in 0..n { *sh.at_mut(i,i) -= shift; }

    // naive gauss elimination with partial pivoting, in-place on a copy, solve same rhs
    let rng = hawking_lab_core::rng::CounterRng::new(1);
    let b: Vec<f64> = (0..n).map(|i| rng.range(i as u64, -1.0, 1.0)).collect();

    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| sh.at(i,j)).collect()).collect();
    let mut x = b.clone();
    for k in 0..n {
        let mut p = k;
        for i in k+1..n { if a[i][k].abs() > a[p][k].abs() { p = i; } }
        a.swap(k, p); x.swap(k, p);
        for i in k+1..n {
            let m = a[i][k] / a[k][k];
            for j in k..n { let v = a[k][j]; a[i][j] -= m * v; }
            x[i] -= m * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut acc = x[k];
        for j in k+1..n { acc -= a[k][j] * x[j]; }
        x[k] = acc / a[k][k];
    }
    let ax = sh.matvec(&x);
    let nb = b.iter().map(|v| v*v).sum::<f64>().sqrt();
    let r: f64 = ax.iter().zip(&b).map(|(p,q)| (p-q).powi(2)).sum::<f64>().sqrt();
    println!("naive gauss relative residual: {:.3e}", r / nb);

    let lu = lu_factor(sh.clone()).unwrap();
    let x2 = lu.solve(&b);
    let ax2 = sh.matvec(&x2);
    let r2: f64 = ax2.iter().zip(&b).map(|(p,q)| (p-q).powi(2)).sum::<f64>().sqrt();
    println!("lu_factor    relative residual: {:.3e}", r2 / nb);
    let dmax: f64 = x.iter().zip(&x2).map(|(p,q)| (p-q).abs()).fold(0.0, f64::max);
    println!("solution max diff: {:.3e}", dmax);
}
