use nalgebra::DVector;

use super::CubicBilinearProblem;
use crate::oracle::GroundTruth;
use crate::point::Point;

const INNER_TOL: f64 = 1e-8;
const INNER_CAP: usize = 100_000;

/// Ball radius `β` and the saddle point the balls are centered on.
#[derive(Debug, Clone)]
pub struct GapQuery {
    beta: f64,
    reference: Point,
}

impl GapQuery {
    /// `beta = 0` is accepted and collapses both balls to the reference point.
    ///
    /// # Panics
    /// If `beta` is negative or not finite.
    pub fn new(beta: f64, reference: Point) -> Self {
        assert!(beta >= 0.0 && beta.is_finite(), "gap radius must be finite and nonnegative (got {beta})");
        Self { beta, reference }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn reference(&self) -> &Point {
        &self.reference
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub gap: f64,
    /// `max_{‖y - y*‖ ≤ β} f(x̂, y)`, exact.
    pub max_over_y: f64,
    /// `min_{‖x - x*‖ ≤ β} f(x, ŷ)`, from projected gradient.
    pub min_over_x: f64,
    pub inner_iterations: usize,
    /// Norm of the projected-gradient mapping at the returned minimizer.
    pub achieved_tol: f64,
    /// False when the inner solver hit its iteration cap before `1e-8`.
    pub converged: bool,
}

/// Restricted primal-dual gap
/// `max_{y ∈ B_β(y*)} f(x̂, y) - min_{x ∈ B_β(x*)} f(x, ŷ)`.
///
/// The maximization is linear in `y` and solved in closed form. The
/// minimization is convex and solved by projected gradient descent with step
/// `1/L`, `L = ρ(‖x*‖ + β)` bounding the Hessian of `(ρ/6)‖x‖³` on the ball.
pub fn restricted_gap(problem: &CubicBilinearProblem, z_hat: &Point, query: &GapQuery) -> GapReport {
    let dims = crate::oracle::SaddleOracle::dims(problem);
    z_hat.check_dims(dims);
    query.reference.check_dims(dims);
    let rho = problem.rho();
    let a = problem.a();
    let b = problem.b();
    let beta = query.beta;
    let x_ref = query.reference.x().clone_owned();
    let y_ref = query.reference.y().clone_owned();
    let x_hat = z_hat.x().clone_owned();
    let y_hat = z_hat.y().clone_owned();

    let residual = a * &x_hat - b;
    let max_over_y = rho / 6.0 * x_hat.norm().powi(3) + y_ref.dot(&residual) + beta * residual.norm();

    let objective = |x: &DVector<f64>| rho / 6.0 * x.norm().powi(3) + y_hat.dot(&(a * x - b));
    let gradient = |x: &DVector<f64>| x * (0.5 * rho * x.norm()) + a.tr_mul(&y_hat);
    let project = |x: DVector<f64>| {
        let d = &x - &x_ref;
        let r = d.norm();
        if r <= beta {
            x
        } else {
            &x_ref + d * (beta / r)
        }
    };

    let lipschitz = rho * (x_ref.norm() + beta);
    let mut x = project(x_hat.clone());
    let mut iterations = 0;
    let mut achieved = 0.0;
    // ρ > 0 is a construction invariant, so β > 0 implies L > 0.
    if beta > 0.0 {
        achieved = f64::INFINITY;
        while iterations < INNER_CAP {
            let next = project(&x - gradient(&x) / lipschitz);
            achieved = lipschitz * (&next - &x).norm();
            x = next;
            iterations += 1;
            if achieved <= INNER_TOL {
                break;
            }
        }
    }
    let min_over_x = objective(&x);

    GapReport {
        gap: max_over_y - min_over_x,
        max_over_y,
        min_over_x,
        inner_iterations: iterations,
        achieved_tol: achieved,
        converged: achieved <= INNER_TOL,
    }
}

/// `β = 7‖z0 - z*‖`.
///
/// # Panics
/// If the problem has no known saddle point.
pub fn default_beta<P: GroundTruth + ?Sized>(problem: &P, z0: &Point) -> f64 {
    let z_star = problem.known_saddle().expect("default_beta requires a known saddle point");
    7.0 * z0.distance(&z_star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::SaddleOracle;
    use crate::problems::{initial_point, make_cubic_bilinear, BSource, ScalarToyProblem};
    use nalgebra::DMatrix;

    /// Grid search plus golden-section refinement of a 1-D function on [lo, hi].
    fn brute_force_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        let steps = 20_000;
        let h = (hi - lo) / steps as f64;
        let best = (0..=steps)
            .map(|i| lo + i as f64 * h)
            .min_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap();
        let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        f(0.5 * (a + b)).min(f(lo)).min(f(hi))
    }

    #[test]
    fn scalar_toy_gap_matches_brute_force() {
        let toy = ScalarToyProblem::new(2.0, 1.0, 1.0);
        let p = toy.as_cubic_bilinear().unwrap();
        let z_star = toy.known_saddle().unwrap();
        assert_eq!(z_star.data().as_slice(), &[1.0, -1.0]);
        let query = GapQuery::new(2.0, z_star.clone());
        let z_hat = Point::from_parts(&[0.0], &[0.0]);
        let report = restricted_gap(&p, &z_hat, &query);

        // y-part: max over y ∈ [-3, 1] of y·(0 - 1) is 3 at y = -3
        assert!((report.max_over_y - 3.0).abs() < 1e-14);
        let x_part = brute_force_min(|x| toy.value(&Point::from_parts(&[x], &[0.0])), -1.0, 3.0);
        let oracle_gap = 3.0 - x_part;
        assert!(report.converged);
        assert!((report.gap - oracle_gap).abs() < 1e-6, "{} vs {}", report.gap, oracle_gap);
    }

    #[test]
    fn gap_vanishes_at_saddle() {
        let p = make_cubic_bilinear(10, 10.0, DMatrix::identity(10, 10), BSource::Seed(5)).unwrap();
        let z0 = initial_point(&p, 1);
        let beta = default_beta(&p, &z0);
        let r = restricted_gap(&p, p.saddle(), &GapQuery::new(beta, p.saddle().clone()));
        assert!(r.gap >= -1e-9 && r.gap <= 1e-6, "{r:?}");
    }

    #[test]
    fn gap_dominates_feasibility_bound() {
        let p = make_cubic_bilinear(10, 10.0, DMatrix::identity(10, 10), BSource::Seed(5)).unwrap();
        let z_star = p.saddle().clone();
        for seed in 0..5 {
            let z0 = initial_point(&p, seed);
            let r = restricted_gap(&p, &z0, &GapQuery::new(default_beta(&p, &z0), z_star.clone()));
            let lower = p.value(&Point::from_parts(z0.x().as_slice(), z_star.y().as_slice()))
                - p.value(&Point::from_parts(z_star.x().as_slice(), z0.y().as_slice()));
            assert!(r.converged);
            assert!(r.gap >= lower - 1e-8, "{} < {}", r.gap, lower);
            assert!(r.gap >= 0.0);
        }
    }

    #[test]
    fn default_beta_scales_distance() {
        let toy = ScalarToyProblem::new(2.0, 1.0, 1.0);
        let z_star = toy.known_saddle().unwrap();
        assert_eq!(default_beta(&toy, &z_star), 0.0);
        let z0 = Point::from_parts(&[1.0], &[0.0]);
        assert!((default_beta(&toy, &z0) - 7.0).abs() < 1e-15);
    }

    #[test]
    fn zero_radius_evaluates_reference_points_only() {
        let toy = ScalarToyProblem::new(2.0, 1.0, 1.0);
        let p = toy.as_cubic_bilinear().unwrap();
        let z_star = toy.known_saddle().unwrap();
        let z_hat = Point::from_parts(&[0.5], &[0.25]);
        let r = restricted_gap(&p, &z_hat, &GapQuery::new(0.0, z_star.clone()));
        let expected = toy.value(&Point::from_parts(&[0.5], &[-1.0])) - toy.value(&Point::from_parts(&[1.0], &[0.25]));
        assert!((r.gap - expected).abs() < 1e-14);
    }
}
