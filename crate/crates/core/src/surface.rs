//! Discrete free-boundary surfaces as graphs s = w(theta, phi) over
//! hemisphere slices, with fundamental forms, curvatures, measures and
//! boundary geometry.
//!
//! Conventions: N is the unit normal with positive s-component, the second
//! fundamental form is A(U,V) = g(-grad_U N, V), H = tr A; slices of the
//! model with u' > 0 therefore have H = -2u'/u < 0.
//!
//! The free-boundary condition is the discrete homogeneous Neumann condition
//! dw/dth = 0 at the equator, realized by even-reflection ghosts; pole
//! regularity uses through-pole ghosts. The axisymmetric path (n_phi = 1)
//! handles every ambient; the full 2D path is supported over the warped
//! model only.

use crate::ambient::AmbientMetric;
use crate::error::{Error, Result};
use crate::grid::HemisphereGrid;
use crate::profile::upp;
use crate::scalar::{fl, half, two, Scalar};

/// A graph surface over a hemisphere grid.
#[derive(Debug)]
pub struct GraphSurface<'a, T: Scalar> {
    pub ambient: &'a AmbientMetric<T>,
    pub grid: &'a HemisphereGrid<T>,
    /// s-values per node, arc-length units; length n_theta * n_phi.
    pub w: Vec<T>,
}

/// The coordinate slice {s0} x S^2_+.
pub fn slice_surface<'a, T: Scalar>(
    ambient: &'a AmbientMetric<T>,
    grid: &'a HemisphereGrid<T>,
    s0: T,
) -> GraphSurface<'a, T> {
    GraphSurface {
        ambient,
        grid,
        w: vec![s0; grid.n_nodes()],
    }
}


/// Fourth-order one-sided derivative at the equator node (index n-1),
/// looking inward. For data even about the equator the leading error is
/// O(h^5), so smooth Neumann graphs register as admissible at ~1e-9.
#[inline]
fn one_sided_eq<T: Scalar>(v: impl Fn(usize) -> T, n: usize, h: T) -> T {
    (fl::<T>(25.0) * v(n - 1) - fl::<T>(48.0) * v(n - 2) + fl::<T>(36.0) * v(n - 3)
        - fl::<T>(16.0) * v(n - 4)
        + fl::<T>(3.0) * v(n - 5))
        / (fl::<T>(12.0) * h)
}

/// Discrete admissibility diagnostics.
#[derive(Debug, Clone)]
pub struct Admissibility<T> {
    /// Max |dw/dth| at the pole (centered, through-pole ghosts).
    pub pole_slope: T,
    /// Max |dw/dth| at the equator by one-sided second-order differences.
    pub equator_slope: T,
    /// Spread of w along the pole row (must represent a single point).
    pub pole_spread: T,
}

impl<'a, T: Scalar> GraphSurface<'a, T> {
    #[inline]
    fn wg(&self, j: isize, k: usize) -> T {
        let (jj, kk) = self.grid.theta_neighbor(j, k);
        self.w[self.grid.idx(jj, kk)]
    }

    #[inline]
    fn wp(&self, j: usize, k: isize) -> T {
        self.w[self.grid.idx(j, self.grid.phi_neighbor(k))]
    }

    pub fn admissibility(&self) -> Admissibility<T> {
        let g = self.grid;
        let h = g.h_theta;
        let n = g.n_theta;
        let mut pole_slope = T::zero();
        let mut equator_slope = T::zero();
        let mut pole_spread = T::zero();
        let w00 = self.w[g.idx(0, 0)];
        for k in 0..g.n_phi {
            let d_pole = (self.wg(1, k) - self.wg(-1, k)) / (two::<T>() * h);
            pole_slope = pole_slope.max(d_pole.abs());
            let one_sided = one_sided_eq(|jj| self.w[g.idx(jj, k)], n, h);
            equator_slope = equator_slope.max(one_sided.abs());
            pole_spread = pole_spread.max((self.w[g.idx(0, k)] - w00).abs());
        }
        Admissibility {
            pole_slope,
            equator_slope,
            pole_spread,
        }
    }

    pub fn is_admissible(&self, tol: T) -> bool {
        let a = self.admissibility();
        a.pole_slope <= tol && a.equator_slope <= tol && a.pole_spread <= tol
    }

    /// Contact angle between the surface normal and the boundary normal of
    /// dM at each equator node; pi/2 iff orthogonal (free boundary). Uses
    /// the honest one-sided boundary slope so inadmissible graphs report
    /// their actual angle.
    pub fn contact_angle(&self) -> Result<Vec<T>> {
        let g = self.grid;
        let h = g.h_theta;
        let mut out = Vec::with_capacity(g.n_phi);
        for k in 0..g.n_phi {
            let wt = one_sided_eq(|jj| self.w[g.idx(jj, k)], g.n_theta, h);
            let weq = self.w[g.idx(g.n_theta - 1, k)];
            let c = self.ambient.components(weq, T::FRAC_PI_2())?;
            let wp = if g.axisym() {
                T::zero()
            } else {
                (self.wp(g.n_theta - 1, k as isize + 1) - self.wp(g.n_theta - 1, k as isize - 1))
                    / (two::<T>() * g.w_phi)
            };
            let big_w = (T::one() + wt * wt / (c.a * c.a) + wp * wp / (c.b * c.b)).sqrt();
            let cosang = -wt / (big_w * c.a);
            out.push(cosang.min(T::one()).max(-T::one()).acos());
        }
        Ok(out)
    }

    pub fn compute_geometry(&self) -> Result<SurfaceGeometry<T>> {
        if self.grid.axisym() {
            compute_geometry_axisym(self)
        } else {
            if !self.ambient.is_model() {
                return Err(Error::Precondition(
                    "full 2D graphs are supported over the warped model only".into(),
                ));
            }
            compute_geometry_2d(self)
        }
    }

    /// CSV export (theta, phi, w).
    pub fn to_csv(&self) -> String {
        let g = self.grid;
        let mut th = Vec::new();
        let mut ph = Vec::new();
        let mut wv = Vec::new();
        for j in 0..g.n_theta {
            for k in 0..g.n_phi {
                th.push(g.thetas[j].to_f64().unwrap());
                ph.push(g.phis[k].to_f64().unwrap());
                wv.push(self.w[g.idx(j, k)].to_f64().unwrap());
            }
        }
        crate::report::csv_table(&["theta", "phi", "w"], &[&th, &ph, &wv], ",")
    }
}

/// All pointwise and integrated geometric data of a graph surface.
#[derive(Debug, Clone)]
pub struct SurfaceGeometry<T> {
    pub n_theta: usize,
    pub n_phi: usize,
    pub h_theta: T,
    pub w_phi_weight: T,
    pub thetas: Vec<T>,
    pub w: Vec<T>,

    /// Induced metric components per node.
    pub e_ind: Vec<T>,
    pub f_ind: Vec<T>,
    pub g_ind: Vec<T>,
    pub sqrt_det: Vec<T>,
    /// Graph tilt factor W = 1/g(N, ds).
    pub tilt: Vec<T>,
    /// Normal in the orthonormal ambient frame (e_s, e_th, e_phi).
    pub n_frame: Vec<[T; 3]>,

    /// Second fundamental form (coordinate components) and invariants.
    pub a_tt: Vec<T>,
    pub a_pp: Vec<T>,
    pub a_tp: Vec<T>,
    pub h_mean: Vec<T>,
    pub a_norm2: Vec<T>,
    /// Gauss curvature via the ambient Gauss equation (accurate route).
    pub k_gauss: Vec<T>,
    /// Gauss curvature from the induced metric alone (independent audit).
    /// On the 2D path the Brioschi evaluation loses accuracy near the pole
    /// (coordinate degeneracy amplifies stencil error like 1/theta^4), so
    /// audits there should stay away from a small polar cap; the
    /// axisymmetric path uses a pole-regular flux form instead.
    pub k_intrinsic: Vec<T>,

    /// Ambient curvature along the surface.
    pub ric_nn: Vec<T>,
    pub scal_amb: Vec<T>,
    pub omega_t: Vec<T>,
    pub omega_p: Vec<T>,
    /// Jacobi potential Ric(N,N) + |A|^2.
    pub q_jacobi: Vec<T>,

    /// Quadrature weight per node (Simpson x phi-weight x sqrt(det h)).
    pub wq: Vec<T>,

    /// Boundary data per equator node.
    pub kg_boundary: Vec<T>,
    pub contact_angle: Vec<T>,
    pub pi_nn_boundary: Vec<T>,
    pub h_partial_m: Vec<T>,
    /// Boundary length weight per equator node (sums to |dSigma|).
    pub w_boundary: Vec<T>,

    pub area: T,
    pub int_h2: T,
    pub boundary_length: T,
    pub chi: i32,
}

impl<T: Scalar> SurfaceGeometry<T> {
    #[inline]
    pub fn idx(&self, j: usize, k: usize) -> usize {
        j * self.n_phi + k
    }

    pub fn n_nodes(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn integral(&self, field: &[T]) -> T {
        field
            .iter()
            .zip(&self.wq)
            .map(|(f, w)| *f * *w)
            .sum()
    }

    pub fn boundary_integral(&self, field: &[T]) -> T {
        field
            .iter()
            .zip(&self.w_boundary)
            .map(|(f, w)| *f * *w)
            .sum()
    }

    pub fn mean(&self, field: &[T]) -> T {
        self.integral(field) / self.area
    }

    /// Umbilic defect |A|^2 - H^2/2 per node (zero exactly on slices).
    pub fn umbilic_defect(&self) -> Vec<T> {
        self.a_norm2
            .iter()
            .zip(&self.h_mean)
            .map(|(a2, h)| *a2 - half(*h * *h))
            .collect()
    }

    /// Gauss equation residual 2Ric(N,N) - R + 2K - H^2 + |A|^2 with the
    /// independently computed intrinsic K; nonzero only by discretization.
    pub fn gauss_equation_residual(&self) -> Vec<T> {
        (0..self.n_nodes())
            .map(|i| {
                two::<T>() * self.ric_nn[i] - self.scal_amb[i]
                    + two::<T>() * self.k_intrinsic[i]
                    - self.h_mean[i] * self.h_mean[i]
                    + self.a_norm2[i]
            })
            .collect()
    }

    /// Gauss-Bonnet residual: int K + oint k_g - 2 pi chi.
    pub fn gauss_bonnet_residual(&self, use_intrinsic: bool) -> T {
        let k = if use_intrinsic {
            &self.k_intrinsic
        } else {
            &self.k_gauss
        };
        self.integral(k) + self.boundary_integral(&self.kg_boundary)
            - two::<T>() * T::PI() * fl::<T>(self.chi as f64)
    }

    /// Totals JSON (area, integrals, boundary, audits).
    pub fn totals_json(&self) -> crate::report::Json {
        use crate::report::Json;
        let mut j = Json::obj();
        j.push("area", Json::num(self.area.to_f64().unwrap()));
        j.push("int_h2", Json::num(self.int_h2.to_f64().unwrap()));
        j.push(
            "boundary_length",
            Json::num(self.boundary_length.to_f64().unwrap()),
        );
        j.push("chi", Json::Int(self.chi as i64));
        j.push(
            "gauss_bonnet_residual_intrinsic",
            Json::num(self.gauss_bonnet_residual(true).to_f64().unwrap()),
        );
        j.push(
            "gauss_bonnet_residual_gauss",
            Json::num(self.gauss_bonnet_residual(false).to_f64().unwrap()),
        );
        j
    }

    /// CSV of per-node fields.
    pub fn fields_csv(&self) -> String {
        let n = self.n_nodes();
        let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(n); 8];
        for j in 0..self.n_theta {
            for k in 0..self.n_phi {
                let i = self.idx(j, k);
                cols[0].push(self.thetas[j].to_f64().unwrap());
                cols[1].push((self.w_phi_weight * fl::<T>(k as f64)).to_f64().unwrap());
                cols[2].push(self.w[i].to_f64().unwrap());
                cols[3].push(self.h_mean[i].to_f64().unwrap());
                cols[4].push(self.k_gauss[i].to_f64().unwrap());
                cols[5].push(self.a_norm2[i].to_f64().unwrap());
                cols[6].push(self.q_jacobi[i].to_f64().unwrap());
                cols[7].push(self.ric_nn[i].to_f64().unwrap());
            }
        }
        let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
        crate::report::csv_table(
            &["theta", "phi", "w", "H", "K", "A_norm2", "q", "ric_nn"],
            &refs,
            ",",
        )
    }
}

/// Lean per-node mean curvature of an axisymmetric graph, used by the CMC
/// Newton residual (shares the formulas of the full geometry pass).
pub fn mean_curvature_axisym<T: Scalar>(
    ambient: &AmbientMetric<T>,
    grid: &HemisphereGrid<T>,
    w: &[T],
) -> Result<Vec<T>> {
    debug_assert!(grid.axisym());
    let n = grid.n_theta;
    let h = grid.h_theta;
    let mut out = vec![T::zero(); n];
    for j in 0..n {
        let wm = if j == 0 { w[1] } else { w[j - 1] };
        let wp = if j == n - 1 { w[n - 2] } else { w[j + 1] };
        let wt = if j == 0 || j == n - 1 {
            T::zero()
        } else {
            (wp - wm) / (two::<T>() * h)
        };
        let wtt = (wp - two::<T>() * w[j] + wm) / (h * h);
        let c = ambient.components(w[j], grid.thetas[j])?;
        out[j] = if j == 0 {
            // Pole limit; regular ambients have B_s/B -> A_s/A there.
            two::<T>() * wtt / (c.a * c.a) - two::<T>() * c.a_s / c.a
        } else {
            let e = c.a * c.a + wt * wt;
            let big_w = e.sqrt() / c.a;
            let a_tt = (wtt - c.a * c.a_s
                - two::<T>() * (c.a_s / c.a) * wt * wt
                - (c.a_t / c.a) * wt)
                / big_w;
            let a_pp = (-c.b * c.b_s + wt * c.b * c.b_t / (c.a * c.a)) / big_w;
            a_tt / e + a_pp / (c.b * c.b)
        };
    }
    Ok(out)
}

fn compute_geometry_axisym<T: Scalar>(surf: &GraphSurface<'_, T>) -> Result<SurfaceGeometry<T>> {
    let grid = surf.grid;
    let amb = surf.ambient;
    let n = grid.n_theta;
    let h = grid.h_theta;
    let w = &surf.w;

    let mut geo = SurfaceGeometry {
        n_theta: n,
        n_phi: 1,
        h_theta: h,
        w_phi_weight: grid.w_phi,
        thetas: grid.thetas.clone(),
        w: w.clone(),
        e_ind: vec![T::zero(); n],
        f_ind: vec![T::zero(); n],
        g_ind: vec![T::zero(); n],
        sqrt_det: vec![T::zero(); n],
        tilt: vec![T::zero(); n],
        n_frame: vec![[T::zero(); 3]; n],
        a_tt: vec![T::zero(); n],
        a_pp: vec![T::zero(); n],
        a_tp: vec![T::zero(); n],
        h_mean: vec![T::zero(); n],
        a_norm2: vec![T::zero(); n],
        k_gauss: vec![T::zero(); n],
        k_intrinsic: vec![T::zero(); n],
        ric_nn: vec![T::zero(); n],
        scal_amb: vec![T::zero(); n],
        omega_t: vec![T::zero(); n],
        omega_p: vec![T::zero(); n],
        q_jacobi: vec![T::zero(); n],
        wq: vec![T::zero(); n],
        kg_boundary: vec![T::zero(); 1],
        contact_angle: vec![T::zero(); 1],
        pi_nn_boundary: vec![T::zero(); 1],
        h_partial_m: vec![T::zero(); 1],
        w_boundary: vec![T::zero(); 1],
        area: T::zero(),
        int_h2: T::zero(),
        boundary_length: T::zero(),
        chi: 1,
    };

    // B-values along the graph drive the intrinsic curvature.
    let mut b_line = vec![T::zero(); n];

    for j in 0..n {
        let wm = if j == 0 { w[1] } else { w[j - 1] };
        let wp = if j == n - 1 { w[n - 2] } else { w[j + 1] };
        let wt = if j == 0 || j == n - 1 {
            T::zero()
        } else {
            (wp - wm) / (two::<T>() * h)
        };
        let wtt = (wp - two::<T>() * w[j] + wm) / (h * h);

        let c = amb.components(w[j], grid.thetas[j])?;
        if !(c.a > T::zero()) {
            return Err(Error::DegenerateMetric(format!("A <= 0 at node {j}")));
        }
        let e = c.a * c.a + wt * wt;
        let g_met = c.b * c.b;
        let big_w = e.sqrt() / c.a;
        b_line[j] = c.b;

        geo.e_ind[j] = e;
        geo.g_ind[j] = g_met;
        geo.sqrt_det[j] = (e * g_met).max(T::zero()).sqrt();
        geo.tilt[j] = big_w;
        let n0 = T::one() / big_w;
        let n1 = -wt / (c.a * big_w);
        geo.n_frame[j] = [n0, n1, T::zero()];

        let (kappa_t, kappa_p, a_tt, a_pp) = if j == 0 {
            // Both principal curvatures coincide at the pole.
            let kap = wtt / (c.a * c.a) - c.a_s / c.a;
            (kap, kap, kap * e, kap * g_met)
        } else {
            let a_tt = (wtt - c.a * c.a_s
                - two::<T>() * (c.a_s / c.a) * wt * wt
                - (c.a_t / c.a) * wt)
                / big_w;
            let a_pp = (-c.b * c.b_s + wt * c.b * c.b_t / (c.a * c.a)) / big_w;
            (a_tt / e, a_pp / g_met, a_tt, a_pp)
        };
        geo.a_tt[j] = a_tt;
        geo.a_pp[j] = a_pp;
        geo.h_mean[j] = kappa_t + kappa_p;
        geo.a_norm2[j] = kappa_t * kappa_t + kappa_p * kappa_p;

        let sample = amb.curvature_at(w[j], grid.thetas[j], (n0, n1))?;
        geo.ric_nn[j] = sample.ric_nn;
        geo.scal_amb[j] = sample.scal;
        geo.omega_t[j] = sample.omega[0];
        geo.omega_p[j] = sample.omega[1];
        geo.q_jacobi[j] = sample.ric_nn + geo.a_norm2[j];
        geo.k_gauss[j] = half(sample.scal - two::<T>() * sample.ric_nn) + kappa_t * kappa_p;

        geo.wq[j] = grid.w_theta[j] * grid.w_phi * geo.sqrt_det[j];
    }

    // Intrinsic Gauss curvature: K = -(1/(sqrtE * b)) d/dth (b'/sqrtE),
    // flux form on half nodes, pole by the regular limit.
    let sqrt_e: Vec<T> = geo.e_ind.iter().map(|e| e.sqrt()).collect();
    let r_half = |jh: usize| -> T {
        // r at half node jh + 1/2; q ghost even at the equator.
        let qa = b_line[jh];
        let qb = if jh + 1 < n { b_line[jh + 1] } else { b_line[n - 2] };
        let ea = sqrt_e[jh];
        let eb = if jh + 1 < n { sqrt_e[jh + 1] } else { sqrt_e[n - 2] };
        (qb - qa) / (h * half(ea * ea + eb * eb).sqrt())
    };
    for j in 1..n {
        let rp = if j < n - 1 {
            r_half(j)
        } else {
            // Mirror face past the equator.
            -r_half(n - 2)
        };
        let rm = r_half(j - 1);
        geo.k_intrinsic[j] = -(rp - rm) / (h * sqrt_e[j] * b_line[j]);
    }
    {
        let c0 = amb.components(w[0], T::zero())?;
        let qprime = c0.b_t; // = A at the pole for regular ambients
        geo.k_intrinsic[0] = -(r_half(1) - r_half(0)) / (h * h * sqrt_e[0] * qprime);
    }

    // Boundary data at the equator.
    {
        let j = n - 1;
        let weq = w[j];
        let c = amb.components(weq, T::FRAC_PI_2())?;
        let wt_os = one_sided_eq(|jj| w[jj], n, h);
        let e_os = c.a * c.a + wt_os * wt_os;
        geo.kg_boundary[0] = (c.b_s * wt_os + c.b_t) / (c.b * e_os.sqrt());
        let big_w_os = e_os.sqrt() / c.a;
        let cosang = -wt_os / (big_w_os * c.a);
        geo.contact_angle[0] = cosang.min(T::one()).max(-T::one()).acos();
        // Pi(N,N) = (N^phi)^2 B B_t / A vanishes for in-plane normals.
        geo.pi_nn_boundary[0] = T::zero();
        geo.h_partial_m[0] = c.b_t / (c.a * c.b);
        geo.w_boundary[0] = two::<T>() * T::PI() * c.b;
        geo.boundary_length = geo.w_boundary[0];
    }

    geo.area = geo.wq.iter().copied().sum();
    geo.int_h2 = geo.integral(
        &geo.h_mean
            .iter()
            .map(|h| *h * *h)
            .collect::<Vec<_>>(),
    );
    if !geo.area.is_finite() || geo.area <= T::zero() {
        return Err(Error::DegenerateMetric("non-positive surface area".into()));
    }
    Ok(geo)
}

/// Field lookup with ghost parities: through-pole (with half-turn shift) and
/// equator reflection. Signs say how the field transforms under each.
fn field_ghost<T: Scalar>(
    f: &[T],
    grid: &HemisphereGrid<T>,
    j: isize,
    k: isize,
    pole_sign: T,
    eq_sign: T,
) -> T {
    let n = grid.n_theta as isize;
    let kk = grid.phi_neighbor(k);
    if j < 0 {
        let (jj, ks) = grid.theta_neighbor(j, kk);
        pole_sign * f[grid.idx(jj, ks)]
    } else if j >= n {
        let (jj, ks) = grid.theta_neighbor(j, kk);
        eq_sign * f[grid.idx(jj, ks)]
    } else {
        f[grid.idx(j as usize, kk)]
    }
}

fn compute_geometry_2d<T: Scalar>(surf: &GraphSurface<'_, T>) -> Result<SurfaceGeometry<T>> {
    let grid = surf.grid;
    let amb = surf.ambient;
    let profile = amb.profile().expect("2D path requires the model");
    let nt = grid.n_theta;
    let np = grid.n_phi;
    let h = grid.h_theta;
    let hp = grid.w_phi;
    let w = &surf.w;
    let nn = nt * np;

    let mut geo = SurfaceGeometry {
        n_theta: nt,
        n_phi: np,
        h_theta: h,
        w_phi_weight: hp,
        thetas: grid.thetas.clone(),
        w: w.clone(),
        e_ind: vec![T::zero(); nn],
        f_ind: vec![T::zero(); nn],
        g_ind: vec![T::zero(); nn],
        sqrt_det: vec![T::zero(); nn],
        tilt: vec![T::zero(); nn],
        n_frame: vec![[T::zero(); 3]; nn],
        a_tt: vec![T::zero(); nn],
        a_pp: vec![T::zero(); nn],
        a_tp: vec![T::zero(); nn],
        h_mean: vec![T::zero(); nn],
        a_norm2: vec![T::zero(); nn],
        k_gauss: vec![T::zero(); nn],
        k_intrinsic: vec![T::zero(); nn],
        ric_nn: vec![T::zero(); nn],
        scal_amb: vec![T::zero(); nn],
        omega_t: vec![T::zero(); nn],
        omega_p: vec![T::zero(); nn],
        q_jacobi: vec![T::zero(); nn],
        wq: vec![T::zero(); nn],
        kg_boundary: vec![T::zero(); np],
        contact_angle: vec![T::zero(); np],
        pi_nn_boundary: vec![T::zero(); np],
        h_partial_m: vec![T::zero(); np],
        w_boundary: vec![T::zero(); np],
        area: T::zero(),
        int_h2: T::zero(),
        boundary_length: T::zero(),
        chi: 1,
    };

    let wat = |j: isize, k: isize| field_ghost(w, grid, j, k, T::one(), T::one());

    // First pass: rows away from the pole.
    for j in 1..nt {
        let theta = grid.thetas[j];
        let (st, ct) = (theta.sin(), theta.cos());
        for k in 0..np {
            let i = grid.idx(j, k);
            let (jj, kk) = (j as isize, k as isize);
            let wt = (wat(jj + 1, kk) - wat(jj - 1, kk)) / (two::<T>() * h);
            let wp = (wat(jj, kk + 1) - wat(jj, kk - 1)) / (two::<T>() * hp);
            let wtt = (wat(jj + 1, kk) - two::<T>() * w[i] + wat(jj - 1, kk)) / (h * h);
            let wpp = (wat(jj, kk + 1) - two::<T>() * w[i] + wat(jj, kk - 1)) / (hp * hp);
            let wtp = (wat(jj + 1, kk + 1) - wat(jj + 1, kk - 1) - wat(jj - 1, kk + 1)
                + wat(jj - 1, kk - 1))
                / (fl::<T>(4.0) * h * hp);

            let (u, up_) = profile.eval(w[i])?;
            let u2 = upp(u, up_);
            let (a, a_s, b, b_s, b_t) = (u, up_, u * st, up_ * st, u * ct);

            let e = a * a + wt * wt;
            let f = wt * wp;
            let g_met = b * b + wp * wp;
            let det = e * g_met - f * f;
            if det <= T::zero() {
                return Err(Error::DegenerateMetric(format!(
                    "det h <= 0 at node ({j},{k})"
                )));
            }
            let big_w = (T::one() + wt * wt / (a * a) + wp * wp / (b * b)).sqrt();

            let a11 = (wtt - a * a_s - two::<T>() * (a_s / a) * wt * wt) / big_w;
            let a22 =
                (wpp - b * b_s + wt * b * b_t / (a * a) - two::<T>() * (b_s / b) * wp * wp)
                    / big_w;
            let a12 = (wtp - (a_s / a + b_s / b) * wt * wp - (b_t / b) * wp) / big_w;

            // Shape operator M = h^{-1} A.
            let inv_det = T::one() / det;
            let m11 = inv_det * (g_met * a11 - f * a12);
            let m12 = inv_det * (g_met * a12 - f * a22);
            let m21 = inv_det * (e * a12 - f * a11);
            let m22 = inv_det * (e * a22 - f * a12);
            let h_mean = m11 + m22;
            let a_norm2 = m11 * m11 + two::<T>() * m12 * m21 + m22 * m22;
            let det_shape = m11 * m22 - m12 * m21;

            // Model ambient curvature with a general unit normal.
            let p_sec = -two::<T>() * u2 / u;
            let r_sec = -u2 / u + (T::one() - up_ * up_) / (u * u);
            let n0 = T::one() / big_w;
            let ric_nn = p_sec * n0 * n0 + r_sec * (T::one() - n0 * n0);
            let scal = two::<T>() * (T::one() - up_ * up_) / (u * u) - fl::<T>(4.0) * u2 / u;

            geo.e_ind[i] = e;
            geo.f_ind[i] = f;
            geo.g_ind[i] = g_met;
            geo.sqrt_det[i] = det.sqrt();
            geo.tilt[i] = big_w;
            geo.n_frame[i] = [n0, -wt / (a * big_w), -wp / (b * big_w)];
            geo.a_tt[i] = a11;
            geo.a_pp[i] = a22;
            geo.a_tp[i] = a12;
            geo.h_mean[i] = h_mean;
            geo.a_norm2[i] = a_norm2;
            geo.ric_nn[i] = ric_nn;
            geo.scal_amb[i] = scal;
            geo.q_jacobi[i] = ric_nn + a_norm2;
            geo.k_gauss[i] = half(scal - two::<T>() * ric_nn) + det_shape;
            // omega(X) = Ric(X, N); the model's frame Ricci is diag(P, r, r),
            // so Ric(X, N) = (P - r) x0 n0 for tangent X orthogonal to N.
            {
                let n_vec = geo.n_frame[i];
                let mut t1 = [-n_vec[1], n_vec[0], T::zero()];
                let norm1 = (t1[0] * t1[0] + t1[1] * t1[1]).sqrt();
                if norm1 > fl::<T>(1e-14) {
                    for x in t1.iter_mut() {
                        *x = *x / norm1;
                    }
                } else {
                    t1 = [T::zero(), T::one(), T::zero()];
                }
                // Complete the frame: t2 = N x t1.
                let t2 = [
                    n_vec[1] * t1[2] - n_vec[2] * t1[1],
                    n_vec[2] * t1[0] - n_vec[0] * t1[2],
                    n_vec[0] * t1[1] - n_vec[1] * t1[0],
                ];
                let pr = p_sec - r_sec;
                geo.omega_t[i] = pr * t1[0] * n_vec[0];
                geo.omega_p[i] = pr * t2[0] * n_vec[0];
            }
            geo.wq[i] = grid.w_theta[j] * hp * geo.sqrt_det[i];
        }
    }

    // Pole row: single geometric point; quadratic extrapolation in theta for
    // the pointwise fields (quadrature weight there is zero).
    for k in 0..np {
        let i0 = grid.idx(0, k);
        let extrap = |f: &Vec<T>| -> T {
            fl::<T>(3.0) * f[grid.idx(1, k)] - fl::<T>(3.0) * f[grid.idx(2, k)]
                + f[grid.idx(3, k)]
        };
        geo.h_mean[i0] = extrap(&geo.h_mean);
        geo.a_norm2[i0] = extrap(&geo.a_norm2);
        geo.k_gauss[i0] = extrap(&geo.k_gauss);
        geo.ric_nn[i0] = extrap(&geo.ric_nn);
        geo.scal_amb[i0] = extrap(&geo.scal_amb);
        geo.q_jacobi[i0] = extrap(&geo.q_jacobi);
        let (u, _) = profile.eval(w[i0])?;
        geo.e_ind[i0] = u * u;
        geo.g_ind[i0] = T::zero();
        geo.sqrt_det[i0] = T::zero();
        geo.tilt[i0] = T::one();
        geo.n_frame[i0] = [T::one(), T::zero(), T::zero()];
        geo.wq[i0] = T::zero();
    }

    // Intrinsic K by the Brioschi formula on the induced metric fields.
    {
        let e = &geo.e_ind;
        let f = &geo.f_ind;
        let g = &geo.g_ind;
        let one = T::one();
        let e_at = |j: isize, k: isize| field_ghost(e, grid, j, k, one, one);
        let f_at = |j: isize, k: isize| field_ghost(f, grid, j, k, -one, -one);
        let g_at = |j: isize, k: isize| field_ghost(g, grid, j, k, one, one);
        for j in 1..nt {
            for k in 0..np {
                let (jj, kk) = (j as isize, k as isize);
                let i = grid.idx(j, k);
                let d_t = |fun: &dyn Fn(isize, isize) -> T| {
                    (fun(jj + 1, kk) - fun(jj - 1, kk)) / (two::<T>() * h)
                };
                let d_p = |fun: &dyn Fn(isize, isize) -> T| {
                    (fun(jj, kk + 1) - fun(jj, kk - 1)) / (two::<T>() * hp)
                };
                let d_tt = |fun: &dyn Fn(isize, isize) -> T| {
                    (fun(jj + 1, kk) - two::<T>() * fun(jj, kk) + fun(jj - 1, kk)) / (h * h)
                };
                let d_pp = |fun: &dyn Fn(isize, isize) -> T| {
                    (fun(jj, kk + 1) - two::<T>() * fun(jj, kk) + fun(jj, kk - 1)) / (hp * hp)
                };
                let d_tp = |fun: &dyn Fn(isize, isize) -> T| {
                    (fun(jj + 1, kk + 1) - fun(jj + 1, kk - 1) - fun(jj - 1, kk + 1)
                        + fun(jj - 1, kk - 1))
                        / (fl::<T>(4.0) * h * hp)
                };

                let (ev, fv, gv) = (e[i], f[i], g[i]);
                let e_t = d_t(&e_at);
                let e_p = d_p(&e_at);
                let e_pp = d_pp(&e_at);
                let f_t = d_t(&f_at);
                let f_p = d_p(&f_at);
                let f_tp = d_tp(&f_at);
                let g_t = d_t(&g_at);
                let g_p = d_p(&g_at);
                let g_tt = d_tt(&g_at);

                let m11 = -half(e_pp) + f_tp - half(g_tt);
                let det3 = |a: [[T; 3]; 3]| {
                    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
                };
                let m_a = det3([
                    [m11, half(e_t), f_t - half(e_p)],
                    [f_p - half(g_t), ev, fv],
                    [half(g_p), fv, gv],
                ]);
                let m_b = det3([
                    [T::zero(), half(e_p), half(g_t)],
                    [half(e_p), ev, fv],
                    [half(g_t), fv, gv],
                ]);
                let det = ev * gv - fv * fv;
                geo.k_intrinsic[i] = (m_a - m_b) / (det * det);
            }
        }
        for k in 0..np {
            let i0 = grid.idx(0, k);
            geo.k_intrinsic[i0] = fl::<T>(3.0) * geo.k_intrinsic[grid.idx(1, k)]
                - fl::<T>(3.0) * geo.k_intrinsic[grid.idx(2, k)]
                + geo.k_intrinsic[grid.idx(3, k)];
        }
    }

    // Boundary row: embedding-route geodesic curvature of the curve
    // phi -> (w(pi/2, phi), pi/2, phi) plus contact data.
    {
        let j = nt - 1;
        for k in 0..np {
            let i = grid.idx(j, k);
            let kk = k as isize;
            let weq = w[i];
            let (u, up_) = profile.eval(weq)?;
            let (a, b, b_s, b_t) = (u, u, up_, T::zero());
            let wp = (wat(j as isize, kk + 1) - wat(j as isize, kk - 1)) / (two::<T>() * hp);
            let wpp = (wat(j as isize, kk + 1) - two::<T>() * weq + wat(j as isize, kk - 1))
                / (hp * hp);
            let wt_os = one_sided_eq(|jj| w[grid.idx(jj, k)], nt, h);

            // Curve speed and in-surface outward conormal.
            let speed2 = wp * wp + b * b;
            // Acceleration of the curve + ambient Christoffel terms:
            // D = gamma'' + Gamma(gamma', gamma'), components (s, th, phi).
            let d_s = wpp - b * b_s;
            let d_t = -b * b_t / (a * a);
            let d_p = two::<T>() * (b_s / b) * wp;
            // Tangent plane basis at the boundary node.
            let f_th = [wt_os, T::one(), T::zero()];
            let f_ph = [wp, T::zero(), T::one()];
            // Metric contractions <X, Y> with diag(1, a^2, b^2).
            let dotm = |x: [T; 3], y: [T; 3]| {
                x[0] * y[0] + a * a * x[1] * y[1] + b * b * x[2] * y[2]
            };
            // Outward conormal: component of F_th orthogonal to F_ph.
            let coef = dotm(f_th, f_ph) / dotm(f_ph, f_ph);
            let mut nu = [
                f_th[0] - coef * f_ph[0],
                f_th[1] - coef * f_ph[1],
                f_th[2] - coef * f_ph[2],
            ];
            let nu_norm = dotm(nu, nu).sqrt();
            for x in nu.iter_mut() {
                *x = *x / nu_norm;
            }
            let dd = [d_s / speed2, d_t / speed2, d_p / speed2];
            geo.kg_boundary[k] = -dotm(dd, nu);

            let big_w = (T::one() + wt_os * wt_os / (a * a) + wp * wp / (b * b)).sqrt();
            let cosang = -wt_os / (big_w * a);
            geo.contact_angle[k] = cosang.min(T::one()).max(-T::one()).acos();
            let n_phi_comp = -wp / (b * b * big_w);
            geo.pi_nn_boundary[k] = n_phi_comp * n_phi_comp * b * b_t / a;
            geo.h_partial_m[k] = b_t / (a * b);
            geo.w_boundary[k] = hp * speed2.sqrt();
        }
        geo.boundary_length = geo.w_boundary.iter().copied().sum();
    }

    geo.area = geo.wq.iter().copied().sum();
    geo.int_h2 = geo.integral(
        &geo.h_mean
            .iter()
            .map(|h| *h * *h)
            .collect::<Vec<_>>(),
    );
    if !geo.area.is_finite() || geo.area <= T::zero() {
        return Err(Error::DegenerateMetric("non-positive surface area".into()));
    }
    Ok(geo)
}

/// Totals of the even reflection across the equator: a closed surface of
/// genus 0. Exact doubling of the quadrature by construction.
#[derive(Debug, Clone)]
pub struct DoubledTotals<T> {
    pub area: T,
    pub int_h2: T,
    pub chi: i32,
}

pub fn double_surface<T: Scalar>(
    geom: &SurfaceGeometry<T>,
    admissibility_tol: T,
    equator_slope: T,
) -> Result<DoubledTotals<T>> {
    if equator_slope.abs() > admissibility_tol {
        return Err(Error::Precondition(format!(
            "reflection would create a corner: boundary slope {equator_slope}"
        )));
    }
    Ok(DoubledTotals {
        area: two::<T>() * geom.area,
        int_h2: two::<T>() * geom.int_h2,
        chi: 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::AmbientMetric;
    use crate::profile::{integrate_profile, ProfileParams};

    fn model(a: f64) -> AmbientMetric<f64> {
        let params = ProfileParams::from_a(a).unwrap();
        AmbientMetric::model(integrate_profile(params, 3.0, 1e-3).unwrap())
    }

    #[test]
    fn slice_geometry_closed_forms() {
        let amb = model(0.6);
        let grid = HemisphereGrid::new(129, 1).unwrap();
        let s = slice_surface(&amb, &grid, 0.0);
        let geo = s.compute_geometry().unwrap();

        // Minimal slice: H = 0, K = 1/a^2, area = 2 pi a^2, k_g = 0.
        for j in 0..grid.n_theta {
            assert!(geo.h_mean[j].abs() < 1e-13, "H at {j} = {}", geo.h_mean[j]);
            assert!((geo.k_gauss[j] - 1.0 / 0.36).abs() < 1e-10);
            assert!(geo.a_norm2[j].abs() < 1e-13);
        }
        assert!((geo.k_gauss[5] - 2.7778).abs() < 1e-4);
        assert!((geo.area - 2.0 * std::f64::consts::PI * 0.36).abs() < 1e-8);
        assert!((geo.area - 2.26195).abs() < 1e-5);
        assert!(geo.kg_boundary[0].abs() < 1e-12);
        assert!((geo.contact_angle[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((geo.boundary_length - 2.0 * std::f64::consts::PI * 0.6).abs() < 1e-12);
    }

    #[test]
    fn nonminimal_slice_h_and_umbilicity() {
        let amb = model(0.6);
        let grid = HemisphereGrid::new(129, 1).unwrap();
        let s0 = 0.5;
        let s = slice_surface(&amb, &grid, s0);
        let geo = s.compute_geometry().unwrap();
        let prof = amb.profile().unwrap();
        let (u, up_) = prof.eval(s0).unwrap();
        let h_expect = -2.0 * up_ / u;
        assert!(h_expect < 0.0, "sign audit: u' > 0 must give H < 0");
        for j in 0..grid.n_theta {
            assert!((geo.h_mean[j] - h_expect).abs() < 1e-11);
            assert!((geo.k_gauss[j] - 1.0 / (u * u)).abs() < 1e-10);
            // Umbilic: A = (H/2) h.
            let defect = geo.a_norm2[j] - 0.5 * geo.h_mean[j] * geo.h_mean[j];
            assert!(defect.abs() < 1e-12);
        }
        assert!((geo.area - 2.0 * std::f64::consts::PI * u * u).abs() < 1e-8);
    }

    #[test]
    fn cylinder_slice() {
        let amb = model(1.0);
        let grid = HemisphereGrid::new(129, 1).unwrap();
        let geo = slice_surface(&amb, &grid, 0.7).compute_geometry().unwrap();
        assert!((geo.area - 2.0 * std::f64::consts::PI).abs() < 1e-8);
        for j in 0..grid.n_theta {
            assert!(geo.h_mean[j].abs() < 1e-12);
            assert!((geo.k_gauss[j] - 1.0).abs() < 1e-10);
        }
        assert!(geo.kg_boundary[0].abs() < 1e-12);
    }

    #[test]
    fn gauss_equation_and_bonnet_audits() {
        let amb = model(0.6);
        let grid = HemisphereGrid::new(129, 1).unwrap();
        // A Neumann-admissible non-slice graph.
        let mut s = slice_surface(&amb, &grid, 0.2);
        for j in 0..grid.n_theta {
            let th = grid.thetas[j];
            s.w[j] += 0.03 * (2.0 * th).cos();
        }
        assert!(s.is_admissible(1e-9));
        let geo = s.compute_geometry().unwrap();

        let res = geo.gauss_equation_residual();
        let max_res = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(max_res < 5e-3, "gauss residual {max_res}");

        let gb_i = geo.gauss_bonnet_residual(true);
        let gb_g = geo.gauss_bonnet_residual(false);
        assert!(gb_i.abs() < 5e-3, "GB intrinsic {gb_i}");
        assert!(gb_g.abs() < 1e-6, "GB gauss-route {gb_g}");

        // Umbilic defect strictly positive somewhere for non-slice graphs.
        let max_def = geo
            .umbilic_defect()
            .iter()
            .fold(0.0f64, |m, d| m.max(*d));
        assert!(max_def > 1e-8);
    }

    #[test]
    fn gauss_audits_converge_under_refinement() {
        let amb = model(0.6);
        let mut prev_ge = f64::INFINITY;
        let mut prev_gb = f64::INFINITY;
        for &n in &[33usize, 65, 129] {
            let grid = HemisphereGrid::new(n, 1).unwrap();
            let mut s = slice_surface(&amb, &grid, 0.2);
            for j in 0..grid.n_theta {
                s.w[j] += 0.03 * (2.0 * grid.thetas[j]).cos();
            }
            let geo = s.compute_geometry().unwrap();
            let ge = geo
                .gauss_equation_residual()
                .iter()
                .fold(0.0f64, |m, r| m.max(r.abs()));
            let gb = geo.gauss_bonnet_residual(true).abs();
            assert!(ge < prev_ge / 3.0, "no O(h^2) decay in gauss residual: {ge} vs {prev_ge}");
            assert!(gb < prev_gb / 3.0, "no decay in GB residual: {gb} vs {prev_gb}");
            prev_ge = ge;
            prev_gb = gb;
        }
    }

    #[test]
    fn contact_angle_diagnostic_mode() {
        let amb = model(0.6);
        let grid = HemisphereGrid::new(129, 1).unwrap();
        // Admissible graph: angle pi/2 within 1e-8.
        let mut s = slice_surface(&amb, &grid, 0.0);
        for j in 0..grid.n_theta {
            s.w[j] += 0.02 * (2.0 * grid.thetas[j]).cos();
        }
        let ang = s.contact_angle().unwrap()[0];
        assert!((ang - std::f64::consts::FRAC_PI_2).abs() < 1e-8);

        // Inadmissible graph with boundary slope 0.1: deviation matches the
        // first-order formula slope/(W*A) within 10%.
        let slope = 0.1;
        let mut s2 = slice_surface(&amb, &grid, 0.0);
        for j in 0..grid.n_theta {
            let th = grid.thetas[j];
            s2.w[j] += slope * (th - std::f64::consts::FRAC_PI_2).sin() + slope;
        }
        let a = s2.admissibility();
        assert!((a.equator_slope - slope).abs() < 1e-3);
        let ang2 = s2.contact_angle().unwrap()[0];
        let dev = ang2 - std::f64::consts::FRAC_PI_2;
        let w_eq = s2.w[grid.n_theta - 1];
        let u = amb.profile().unwrap().eval(w_eq).unwrap().0;
        let big_w = (1.0f64 + slope * slope / (u * u)).sqrt();
        let first_order = slope / (big_w * u);
        assert!(
            (dev - first_order).abs() < 0.1 * first_order.abs(),
            "deviation {dev} vs first-order {first_order}"
        );
    }

    #[test]
    fn two_dimensional_path_matches_axisym_on_slices() {
        let amb = model(0.6);
        let grid2 = HemisphereGrid::new(65, 16).unwrap();
        let geo2 = slice_surface(&amb, &grid2, 0.4).compute_geometry().unwrap();
        let grid1 = HemisphereGrid::new(65, 1).unwrap();
        let geo1 = slice_surface(&amb, &grid1, 0.4).compute_geometry().unwrap();
        assert!((geo1.area - geo2.area).abs() < 1e-10);
        assert!((geo1.int_h2 - geo2.int_h2).abs() < 1e-10);
        for j in 1..grid2.n_theta {
            for k in 0..16 {
                let i = grid2.idx(j, k);
                assert!((geo2.h_mean[i] - geo1.h_mean[j]).abs() < 1e-11);
                assert!((geo2.k_gauss[i] - geo1.k_gauss[j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn two_dimensional_nonaxisym_graph_audits() {
        let amb = model(0.6);
        let grid = HemisphereGrid::new(129, 64).unwrap();
        let mut s = slice_surface(&amb, &grid, 0.1);
        for j in 0..grid.n_theta {
            let th = grid.thetas[j];
            for k in 0..grid.n_phi {
                let ph = grid.phis[k];
                let f = th.sin().powi(2) * (2.0 * th).cos();
                s.w[grid.idx(j, k)] += 0.02 * f * (2.0 * ph).cos();
            }
        }
        assert!(s.is_admissible(1e-8));
        let geo = s.compute_geometry().unwrap();
        let res = geo.gauss_equation_residual();
        // Brioschi loses accuracy in the polar cap; audit outside it.
        let mut max_res = 0.0f64;
        for j in 0..grid.n_theta {
            if grid.thetas[j] < 0.2 {
                continue;
            }
            for k in 0..grid.n_phi {
                max_res = max_res.max(res[grid.idx(j, k)].abs());
            }
        }
        assert!(max_res < 3e-2, "gauss residual 2d {max_res}");
        assert!(geo.gauss_bonnet_residual(false).abs() < 1e-3);
        for k in 0..grid.n_phi {
            assert!((geo.contact_angle[k] - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
        }
    }

    #[test]
    fn doubling_totals() {
        let amb = model(0.6);
        let grid = HemisphereGrid::new(129, 1).unwrap();
        let s = slice_surface(&amb, &grid, 0.3);
        let geo = s.compute_geometry().unwrap();
        let adm = s.admissibility();
        let d = double_surface(&geo, 1e-8, adm.equator_slope).unwrap();
        assert_eq!(d.chi, 2);
        assert!((d.area - 2.0 * geo.area).abs() < 1e-14);
        assert!((d.int_h2 - 2.0 * geo.int_h2).abs() < 1e-14);
        let u = amb.profile().unwrap().eval(0.3).unwrap().0;
        assert!((d.area - 4.0 * std::f64::consts::PI * u * u).abs() < 1e-7);
    }
}
