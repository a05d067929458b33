//! Stability (Jacobi) operator L = Delta + Ric(N,N) + |A|^2 with the Robin
//! boundary condition dphi/dnu = Pi(N,N) phi, its quadratic form, and the
//! lowest eigenpair of L phi + lambda phi = 0.
//!
//! Discretization: compact flux stiffness on cell faces plus the quadrature
//! mass matrix, so the operator is exactly symmetric in the surface
//! quadrature inner product. The pole carries no quadrature mass; its nodes
//! are eliminated by the (exact) Schur complement, which simply drops the
//! polar faces, and the eigenfunction's pole value is reconstructed from
//! the pointwise regularity stencil.

use crate::error::{Error, Result};
use crate::linalg::{smallest_eigenpair_sym, DMat, EigenOptions};
use crate::scalar::{fl, half, two, Scalar};
use crate::surface::SurfaceGeometry;

#[derive(Debug, Clone)]
pub struct JacobiOperator<T> {
    pub n_theta: usize,
    pub n_phi: usize,
    h_theta: T,
    w_phi: T,
    /// Potential q = Ric(N,N) + |A|^2 per node.
    pub q: Vec<T>,
    /// Robin coefficient Pi(N,N) per boundary node.
    pub robin: Vec<T>,
    /// Reduced stiffness (gradient - potential - Robin), symmetric.
    kmat: DMat<T>,
    /// Reduced quadrature mass diagonal.
    wdiag: Vec<T>,
    /// Full-grid quadrature weights.
    wq_full: Vec<T>,
    /// Map full node -> reduced index (pole row excluded).
    reduced_of: Vec<Option<usize>>,
    full_of: Vec<usize>,
    /// Polar faces (pole node, neighbor node, coefficient) kept for the
    /// quadratic form on given fields.
    pole_faces: Vec<(usize, usize, T)>,
    /// Face coefficients for the pointwise axisymmetric application.
    face_c: Vec<T>,
    sqrt_eg: Vec<T>,
    e_pole: T,
}

/// Lowest eigenpair of L phi + lambda phi = 0.
#[derive(Debug, Clone)]
pub struct SpectrumResult<T> {
    pub lambda1: T,
    /// Eigenfunction on the full grid, quadrature-normalized.
    pub phi1: Vec<T>,
    /// Algebraic residual of the reduced symmetric eigensystem.
    pub residual: T,
    /// Strong Neumann/Robin residual at the boundary (one-sided stencil).
    pub bc_residual: T,
    pub iterations: usize,
}

/// Assemble the discrete stability operator of an admissible surface.
pub fn assemble_jacobi<T: Scalar>(geom: &SurfaceGeometry<T>) -> Result<JacobiOperator<T>> {
    let nt = geom.n_theta;
    let np = geom.n_phi;
    let h = geom.h_theta;
    let hp = geom.w_phi_weight;

    let nn = nt * np;
    let mut reduced_of = vec![None; nn];
    let mut full_of = Vec::with_capacity(nn - np);
    for j in 1..nt {
        for k in 0..np {
            let i = geom.idx(j, k);
            reduced_of[i] = Some(full_of.len());
            full_of.push(i);
        }
    }
    let nr = full_of.len();
    let mut kmat = DMat::zeros(nr, nr);
    let mut pole_faces = Vec::new();
    let mut face_c = vec![T::zero(); nt];

    if np == 1 {
        // theta faces j+1/2 with coefficient sqrt(G/E), 2 pi folded in.
        let c_node: Vec<T> = (0..nt)
            .map(|j| (geom.g_ind[j] / geom.e_ind[j]).sqrt())
            .collect();
        for j in 0..nt - 1 {
            let c_face = half(c_node[j] + c_node[j + 1]) * hp / h;
            face_c[j] = c_face;
            let a = geom.idx(j, 0);
            let b = geom.idx(j + 1, 0);
            if j == 0 {
                pole_faces.push((a, b, c_face));
                continue;
            }
            let (ra, rb) = (reduced_of[a].unwrap(), reduced_of[b].unwrap());
            *kmat.at_mut(ra, ra) += c_face;
            *kmat.at_mut(rb, rb) += c_face;
            *kmat.at_mut(ra, rb) -= c_face;
            *kmat.at_mut(rb, ra) -= c_face;
        }
    } else {
        // theta faces (j+1/2, k): coefficient (G/det) sqrt(det) = G/sqrt(det).
        for j in 0..nt - 1 {
            for k in 0..np {
                let a = geom.idx(j, k);
                let b = geom.idx(j + 1, k);
                let coef_at = |i: usize| geom.g_ind[i] / geom.sqrt_det[i];
                // The pole row is 0/0; the face sits at theta = h/2, so use
                // the inner-row value there.
                let ca = if j == 0 { coef_at(b) } else { coef_at(a) };
                let c_face = half(ca + coef_at(b)) * hp / h;
                if j == 0 {
                    pole_faces.push((a, b, c_face));
                    continue;
                }
                let (ra, rb) = (reduced_of[a].unwrap(), reduced_of[b].unwrap());
                *kmat.at_mut(ra, ra) += c_face;
                *kmat.at_mut(rb, rb) += c_face;
                *kmat.at_mut(ra, rb) -= c_face;
                *kmat.at_mut(rb, ra) -= c_face;
            }
        }
        // phi faces (j, k+1/2): coefficient E/sqrt(det); half cell at the
        // equator row.
        for j in 1..nt {
            let cell = if j == nt - 1 { half(h) } else { h };
            for k in 0..np {
                let a = geom.idx(j, k);
                let b = geom.idx(j, (k + 1) % np);
                let coef = |i: usize| geom.e_ind[i] / geom.sqrt_det[i];
                let c_face = half(coef(a) + coef(b)) * cell / hp;
                let (ra, rb) = (reduced_of[a].unwrap(), reduced_of[b].unwrap());
                *kmat.at_mut(ra, ra) += c_face;
                *kmat.at_mut(rb, rb) += c_face;
                *kmat.at_mut(ra, rb) -= c_face;
                *kmat.at_mut(rb, ra) -= c_face;
            }
        }
        // Cross terms from h^{theta phi} = -F/det, centered-in-phi on both
        // rows of each theta face; the polar cell is skipped (integrand
        // vanishes like theta^2 there).
        for j in 1..nt - 1 {
            for k in 0..np {
                let a = geom.idx(j, k);
                let b = geom.idx(j + 1, k);
                let cx_at = |i: usize| -geom.f_ind[i] / geom.sqrt_det[i];
                let cx = half(cx_at(a) + cx_at(b)) * h * hp;
                if cx == T::zero() {
                    continue;
                }
                let quarter = fl::<T>(0.25);
                let (ra, rb) = (reduced_of[a].unwrap(), reduced_of[b].unwrap());
                for row in [j, j + 1] {
                    for (kk, sgn) in [((k + 1) % np, T::one()), ((k + np - 1) % np, -T::one())] {
                        let p = geom.idx(row, kk);
                        let rp = reduced_of[p].unwrap();
                        let c = cx * quarter * sgn / (h * hp);
                        *kmat.at_mut(rb, rp) += c;
                        *kmat.at_mut(ra, rp) -= c;
                        *kmat.at_mut(rp, rb) += c;
                        *kmat.at_mut(rp, ra) -= c;
                    }
                }
            }
        }
    }

    // Potential and Robin terms.
    for (r, &i) in full_of.iter().enumerate() {
        *kmat.at_mut(r, r) -= geom.wq[i] * geom.q_jacobi[i];
    }
    let robin = geom.pi_nn_boundary.clone();
    for k in 0..np {
        let i = geom.idx(nt - 1, k);
        let r = reduced_of[i].unwrap();
        *kmat.at_mut(r, r) -= geom.w_boundary[k] * robin[k];
    }

    let wdiag: Vec<T> = full_of.iter().map(|&i| geom.wq[i]).collect();
    if wdiag.iter().any(|w| !(*w > T::zero())) {
        return Err(Error::DegenerateMetric(
            "non-positive quadrature weight off the pole".into(),
        ));
    }

    Ok(JacobiOperator {
        n_theta: nt,
        n_phi: np,
        h_theta: h,
        w_phi: hp,
        q: geom.q_jacobi.clone(),
        robin,
        kmat,
        wdiag,
        wq_full: geom.wq.clone(),
        reduced_of,
        full_of,
        pole_faces,
        face_c,
        sqrt_eg: geom.sqrt_det.clone(),
        e_pole: geom.e_ind[0],
    })
}

impl<T: Scalar> JacobiOperator<T> {
    #[inline]
    fn idx(&self, j: usize, k: usize) -> usize {
        j * self.n_phi + k
    }

    /// Max asymmetry of the assembled reduced operator.
    pub fn asymmetry(&self) -> T {
        self.kmat.asymmetry()
    }

    /// Quadratic form Q(phi, psi) = int grad phi . grad psi - int q phi psi
    /// - oint Pi phi psi on full-grid fields (polar faces included).
    pub fn q_form(&self, phi: &[T], psi: &[T]) -> T {
        let psi_r: Vec<T> = self.full_of.iter().map(|&i| psi[i]).collect();
        let kpsi = self.kmat.matvec(&psi_r);
        let mut acc = T::zero();
        for (r, &i) in self.full_of.iter().enumerate() {
            acc += phi[i] * kpsi[r];
        }
        for &(p, n, c) in &self.pole_faces {
            acc += c * (phi[n] - phi[p]) * (psi[n] - psi[p]);
        }
        acc
    }

    /// Quadrature inner product int phi psi dsigma.
    pub fn mass_form(&self, phi: &[T], psi: &[T]) -> T {
        phi.iter()
            .zip(psi)
            .zip(&self.wq_full)
            .map(|((a, b), w)| *a * *b * *w)
            .sum()
    }

    /// Rayleigh quotient in the convention L phi + lambda phi = 0.
    pub fn rayleigh(&self, phi: &[T]) -> T {
        self.q_form(phi, phi) / self.mass_form(phi, phi)
    }

    /// Pointwise application of L = Delta + q on an axisymmetric field:
    /// flux Laplacian with reflection ghosts, pole limit 2 phi''(0)/E0.
    /// This is the consistency route for PDE residual audits; the
    /// variational operator is the one with exact symmetry.
    pub fn apply_pointwise(&self, phi: &[T]) -> Result<Vec<T>> {
        if self.n_phi != 1 {
            return Err(Error::Precondition(
                "pointwise application implemented for the axisymmetric path".into(),
            ));
        }
        let n = self.n_theta;
        let h = self.h_theta;
        let hp = self.w_phi;
        let mut out = vec![T::zero(); n];
        for j in 0..n {
            if j == 0 {
                out[0] = fl::<T>(4.0) / (self.e_pole * h * h) * (phi[1] - phi[0])
                    + self.q[0] * phi[0];
                continue;
            }
            // face_c carries hp/h; the physical flux is c_mid (b - a)/h.
            let flux = |jf: usize, a: T, b: T| self.face_c[jf] * (b - a) / hp;
            let f_minus = flux(j - 1, phi[j - 1], phi[j]);
            let f_plus = if j < n - 1 {
                flux(j, phi[j], phi[j + 1])
            } else {
                // Even ghost at the equator mirrors the inner face.
                flux(n - 2, phi[n - 1], phi[n - 2])
            };
            out[j] = (f_plus - f_minus) / (h * self.sqrt_eg[j]) + self.q[j] * phi[j];
        }
        Ok(out)
    }

    /// Lowest eigenpair, optionally orthogonal to given full-grid fields
    /// (deflation in the quadrature inner product).
    pub fn lowest_eigenpair_deflated(&self, orth: &[Vec<T>]) -> Result<SpectrumResult<T>> {
        let nr = self.wdiag.len();
        let sqrt_w: Vec<T> = self.wdiag.iter().map(|w| w.sqrt()).collect();
        // S = W^{-1/2} K W^{-1/2}.
        let mut s = DMat::zeros(nr, nr);
        for i in 0..nr {
            for j in 0..nr {
                *s.at_mut(i, j) = self.kmat.at(i, j) / (sqrt_w[i] * sqrt_w[j]);
            }
        }
        let orth_s: Vec<Vec<T>> = orth
            .iter()
            .map(|v| {
                self.full_of
                    .iter()
                    .enumerate()
                    .map(|(r, &i)| v[i] * sqrt_w[r])
                    .collect()
            })
            .collect();
        // All-ones start in the original variables; under deflation, modulate
        // it deterministically so the projection cannot vanish.
        let start: Vec<T> = if orth.is_empty() {
            sqrt_w.clone()
        } else {
            sqrt_w
                .iter()
                .enumerate()
                .map(|(r, w)| *w * (T::one() + fl::<T>((r as f64 * 0.7).sin())))
                .collect()
        };
        let res = smallest_eigenpair_sym(
            &s,
            &orth_s,
            &EigenOptions {
                start,
                tol: fl::<T>(1e-12),
                max_iter: 500,
            },
        )?;

        let mut phi = vec![T::zero(); self.n_theta * self.n_phi];
        for (r, &i) in self.full_of.iter().enumerate() {
            phi[i] = res.vector[r] / sqrt_w[r];
        }
        let lambda = res.lambda;
        // Pole values from the pointwise regularity stencil.
        let h = self.h_theta;
        for k in 0..self.n_phi {
            let i0 = self.idx(0, k);
            let i1 = self.idx(1, k);
            let c = fl::<T>(4.0) / (self.e_pole * h * h);
            let denom = c - self.q[i0] - lambda;
            phi[i0] = if denom.abs() > fl::<T>(1e-12) {
                c * phi[i1] / denom
            } else {
                phi[i1]
            };
        }
        // Normalize and fix the sign: positive mean, else positive pole.
        let norm = self.mass_form(&phi, &phi).sqrt();
        for x in phi.iter_mut() {
            *x = *x / norm;
        }
        let mean: T = self
            .wq_full
            .iter()
            .zip(&phi)
            .map(|(w, p)| *w * *p)
            .sum();
        let sign_ref = if mean.abs() > fl::<T>(1e-9) { mean } else { phi[0] };
        if sign_ref < T::zero() {
            for x in phi.iter_mut() {
                *x = -*x;
            }
        }

        // Strong Robin residual via the one-sided boundary stencil.
        let mut bc_res = T::zero();
        for k in 0..self.n_phi {
            let v = |j: usize| phi[self.idx(j, k)];
            let n = self.n_theta;
            let dphi = (fl::<T>(25.0) * v(n - 1) - fl::<T>(48.0) * v(n - 2)
                + fl::<T>(36.0) * v(n - 3)
                - fl::<T>(16.0) * v(n - 4)
                + fl::<T>(3.0) * v(n - 5))
                / (fl::<T>(12.0) * h);
            let r = dphi - self.robin[k] * v(n - 1);
            bc_res = bc_res.max(r.abs());
        }

        Ok(SpectrumResult {
            lambda1: lambda,
            phi1: phi,
            residual: res.residual,
            bc_residual: bc_res,
            iterations: res.iterations,
        })
    }

    pub fn lowest_eigenpair(&self) -> Result<SpectrumResult<T>> {
        self.lowest_eigenpair_deflated(&[])
    }

    /// Variance of the potential (constant on model slices).
    pub fn q_variance(&self) -> T {
        let n = self.q.len() as f64;
        let mean: T = self.q.iter().copied().sum::<T>() / fl::<T>(n);
        self.q.iter().map(|q| (*q - mean) * (*q - mean)).sum::<T>() / fl::<T>(n)
    }

    /// Reassemble with the Robin field forced to exact zero (a no-op for
    /// totally geodesic boundaries; exposed as an audit).
    pub fn with_zero_robin(&self, geom: &SurfaceGeometry<T>) -> Result<JacobiOperator<T>> {
        let mut g2 = geom.clone();
        for x in g2.pi_nn_boundary.iter_mut() {
            *x = T::zero();
        }
        assemble_jacobi(&g2)
    }

    /// Reduced problem view for oracles: (S, sqrt of mass diagonal).
    pub fn reduced_symmetric(&self) -> (DMat<T>, Vec<T>) {
        let nr = self.wdiag.len();
        let sqrt_w: Vec<T> = self.wdiag.iter().map(|w| w.sqrt()).collect();
        let mut s = DMat::zeros(nr, nr);
        for i in 0..nr {
            for j in 0..nr {
                *s.at_mut(i, j) = self.kmat.at(i, j) / (sqrt_w[i] * sqrt_w[j]);
            }
        }
        (s, sqrt_w)
    }
}

/// Residuals of the identities holding at a strictly stable minimal
/// free-boundary disk of the model: |Sigma|(1 + lambda1) = 2 pi, A = 0,
/// R = 2, Ric(N,N) = -lambda1, K = 2 pi/|Sigma|, k_g = 0, and vanishing
/// boundary mean curvature.
#[derive(Debug, Clone)]
pub struct Prop31Report<T> {
    pub lambda1: T,
    pub area: T,
    pub area_identity_residual: T,
    pub max_a_norm2: T,
    pub ric_plus_lambda: T,
    pub k_minus_2pi_over_area: T,
    pub max_kg: T,
    pub max_h_partial_m: T,
    pub max_scal_minus_2: T,
}

pub fn prop31_audit<T: Scalar>(
    ambient: &crate::ambient::AmbientMetric<T>,
    n_theta: usize,
) -> Result<Prop31Report<T>> {
    let grid = crate::grid::HemisphereGrid::new(n_theta, 1)?;
    let surf = crate::surface::slice_surface(ambient, &grid, T::zero());
    let geom = surf.compute_geometry()?;
    let op = assemble_jacobi(&geom)?;
    let eig = op.lowest_eigenpair()?;
    let two_pi = two::<T>() * T::PI();

    let max_abs = |v: &[T]| v.iter().fold(T::zero(), |m: T, x: &T| m.max(x.abs()));
    let mut ric_lam = T::zero();
    let mut k_dev = T::zero();
    let mut scal_dev = T::zero();
    for j in 0..geom.n_nodes() {
        ric_lam = ric_lam.max((geom.ric_nn[j] + eig.lambda1).abs());
        k_dev = k_dev.max((geom.k_gauss[j] - two_pi / geom.area).abs());
        scal_dev = scal_dev.max((geom.scal_amb[j] - two::<T>()).abs());
    }

    Ok(Prop31Report {
        lambda1: eig.lambda1,
        area: geom.area,
        area_identity_residual: geom.area * (T::one() + eig.lambda1) - two_pi,
        max_a_norm2: max_abs(&geom.a_norm2),
        ric_plus_lambda: ric_lam,
        k_minus_2pi_over_area: k_dev,
        max_kg: max_abs(&geom.kg_boundary),
        max_h_partial_m: max_abs(&geom.h_partial_m),
        max_scal_minus_2: scal_dev,
    })
}
