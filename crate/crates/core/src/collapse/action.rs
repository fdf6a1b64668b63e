use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::CollapseError;
use crate::geom::interior_grid;

/// Generator field `V(x)` in chart coordinates.
pub type GeneratorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
/// `φ_θ(x)` together with its differential `dφ_θ` at `x`.
pub type FlowFn = Arc<dyn Fn(&[f64], f64) -> Result<(Vec<f64>, DMatrix<f64>), CollapseError> + Send + Sync>;
/// Distance from a point to the fixed set.
pub type FixedDistanceFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

const FLOW_STEPS_PER_TURN: usize = 512;
const PERIOD_TOLERANCE: f64 = 1e-6;

/// A smooth action of `S¹ = R / 2πZ`, written in one chart of a base metric.
///
/// `domain` is a fundamental coordinate box of that chart; flows return
/// points wrapped back into it along periodic axes.
#[derive(Clone)]
pub struct CircleAction {
    label: String,
    dim: usize,
    chart: usize,
    domain: (Vec<f64>, Vec<f64>),
    periods: Vec<Option<f64>>,
    generator: GeneratorFn,
    flow: FlowFn,
    fixed_distance: Option<FixedDistanceFn>,
}

impl fmt::Debug for CircleAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CircleAction")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("chart", &self.chart)
            .field("domain", &self.domain)
            .finish()
    }
}

impl CircleAction {
    /// Rotation `φ ↦ φ + θ` of the round sphere in its polar chart about the
    /// z-axis. Distance to the fixed poles is `min(θ, π - θ)` in polar angle.
    pub fn sphere_rotation() -> Self {
        Self {
            label: "sphere-rotation".into(),
            dim: 2,
            chart: 0,
            domain: (vec![0.0, 0.0], vec![PI, TAU]),
            periods: vec![None, Some(TAU)],
            generator: Arc::new(|_| vec![0.0, 1.0]),
            flow: Arc::new(|x, t| Ok((vec![x[0], (x[1] + t).rem_euclid(TAU)], DMatrix::identity(2, 2)))),
            fixed_distance: Some(Arc::new(|x| x[0].min(PI - x[0]))),
        }
    }

    /// Translation `x ↦ x + θ d` of the flat torus `R^n / ⊕ a_i Z`; `2π d`
    /// must be a lattice vector.
    pub fn torus_translation(sides: &[f64], direction: &[f64]) -> Result<Self, CollapseError> {
        let n = sides.len();
        if direction.len() != n || n == 0 {
            return Err(CollapseError::InvalidInput("direction and sides differ in length".into()));
        }
        if sides.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(CollapseError::InvalidInput("torus sides must be positive".into()));
        }
        if direction.iter().all(|d| *d == 0.0) {
            return Err(CollapseError::InvalidInput("translation direction is zero".into()));
        }
        let mut worst: f64 = 0.0;
        for (d, a) in direction.iter().zip(sides) {
            let turns = TAU * d / a;
            worst = worst.max((turns - turns.round()).abs() * a);
        }
        if worst > PERIOD_TOLERANCE {
            return Err(CollapseError::NotPeriodic { residual: worst });
        }
        let dir = direction.to_vec();
        let s = sides.to_vec();
        let d2 = dir.clone();
        Ok(Self {
            label: format!("torus-translation{direction:?}"),
            dim: n,
            chart: 0,
            domain: (vec![0.0; n], sides.to_vec()),
            periods: sides.iter().map(|a| Some(*a)).collect(),
            generator: Arc::new(move |_| d2.clone()),
            flow: Arc::new(move |x, t| {
                let y = x.iter().zip(&dir).zip(&s).map(|((xi, di), a)| (xi + t * di).rem_euclid(*a)).collect();
                Ok((y, DMatrix::identity(dir.len(), dir.len())))
            }),
            fixed_distance: None,
        })
    }

    /// An action known only through its generator. The flow is integrated
    /// with RK4 together with its variational equation; coordinates listed in
    /// `periods` are wrapped. The generator must be 2π-periodic on a grid of
    /// the domain, else [`CollapseError::NotPeriodic`].
    pub fn from_generator(
        chart: usize,
        domain: (Vec<f64>, Vec<f64>),
        periods: Vec<Option<f64>>,
        generator: GeneratorFn,
    ) -> Result<Self, CollapseError> {
        let dim = domain.0.len();
        if domain.1.len() != dim || periods.len() != dim || dim == 0 {
            return Err(CollapseError::InvalidInput("domain bounds and periods differ in length".into()));
        }
        let g = generator.clone();
        let p = periods.clone();
        let flow: FlowFn = Arc::new(move |x, t| integrate_flow(&g, &p, x, t));
        let action = Self {
            label: "generator".into(),
            dim,
            chart,
            domain: domain.clone(),
            periods: periods.clone(),
            generator,
            flow,
            fixed_distance: None,
        };
        let mut worst: f64 = 0.0;
        for x in interior_grid(&domain.0, &domain.1, 4, 0.1) {
            let (y, _) = action.flow(&x, TAU)?;
            for i in 0..dim {
                let mut d = y[i] - x[i];
                if let Some(per) = periods[i] {
                    d -= per * (d / per).round();
                }
                worst = worst.max(d.abs());
            }
        }
        if worst > PERIOD_TOLERANCE {
            return Err(CollapseError::NotPeriodic { residual: worst });
        }
        Ok(action)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Distance to the fixed set used by [`super::curvature_sweep`].
    pub fn with_fixed_distance(mut self, f: FixedDistanceFn) -> Self {
        self.fixed_distance = Some(f);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Chart of the base metric the action is written in.
    pub fn chart(&self) -> usize {
        self.chart
    }

    pub fn domain(&self) -> (&[f64], &[f64]) {
        (&self.domain.0, &self.domain.1)
    }

    /// Coordinate box of the chart: the domain widened by one period along
    /// periodic axes.
    pub fn chart_box(&self) -> (Vec<f64>, Vec<f64>) {
        let (mut lo, mut hi) = self.domain.clone();
        for (i, p) in self.periods.iter().enumerate() {
            if let Some(per) = p {
                lo[i] -= per;
                hi[i] += per;
            }
        }
        (lo, hi)
    }

    pub fn generator(&self, x: &[f64]) -> Vec<f64> {
        (self.generator)(x)
    }

    /// Jacobian `∂V^i/∂x^j` by central differences.
    pub fn generator_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        jacobian(&self.generator, x)
    }

    pub fn flow(&self, x: &[f64], theta: f64) -> Result<(Vec<f64>, DMatrix<f64>), CollapseError> {
        (self.flow)(x, theta)
    }

    pub fn is_fixed(&self, x: &[f64]) -> bool {
        self.generator(x).iter().all(|v| v.abs() < 1e-12)
    }

    /// Distance to the fixed set, `∞` for free actions without a declared
    /// distance function.
    pub fn fixed_distance(&self, x: &[f64]) -> f64 {
        match &self.fixed_distance {
            Some(f) => f(x),
            None if self.is_fixed(x) => 0.0,
            None => f64::INFINITY,
        }
    }
}

fn jacobian(generator: &GeneratorFn, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut out = DMatrix::zeros(n, n);
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = 1e-6 * (1.0 + x[j].abs());
        xp[j] = x[j] + h;
        let p = generator(&xp);
        xp[j] = x[j] - h;
        let m = generator(&xp);
        xp[j] = x[j];
        for i in 0..n {
            out[(i, j)] = (p[i] - m[i]) / (2.0 * h);
        }
    }
    out
}

fn integrate_flow(
    generator: &GeneratorFn,
    periods: &[Option<f64>],
    x: &[f64],
    t: f64,
) -> Result<(Vec<f64>, DMatrix<f64>), CollapseError> {
    let n = x.len();
    let steps = ((t.abs() / TAU) * FLOW_STEPS_PER_TURN as f64).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut y = x.to_vec();
    let mut jm = DMatrix::<f64>::identity(n, n);
    let rhs = |y: &[f64], j: &DMatrix<f64>| -> (Vec<f64>, DMatrix<f64>) { (generator(y), jacobian(generator, y) * j) };
    let shifted = |y: &[f64], k: &[f64], c: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + c * b).collect() };
    for _ in 0..steps {
        let (k1, j1) = rhs(&y, &jm);
        let (k2, j2) = rhs(&shifted(&y, &k1, h / 2.0), &(&jm + &j1 * (h / 2.0)));
        let (k3, j3) = rhs(&shifted(&y, &k2, h / 2.0), &(&jm + &j2 * (h / 2.0)));
        let (k4, j4) = rhs(&shifted(&y, &k3, h), &(&jm + &j3 * h));
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        jm += (j1 + j2 * 2.0 + j3 * 2.0 + j4) * (h / 6.0);
        if y.iter().any(|v| !v.is_finite()) || jm.iter().any(|v| !v.is_finite()) {
            return Err(CollapseError::OrbitIntegration(format!("flow of {x:?} diverged")));
        }
    }
    for (yi, p) in y.iter_mut().zip(periods) {
        if let Some(per) = p {
            *yi = yi.rem_euclid(*per);
        }
    }
    Ok((y, jm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_periodic_with_fixed_poles() {
        let a = CircleAction::sphere_rotation();
        let (y, _) = a.flow(&[1.0, 2.0], TAU).unwrap();
        assert!((y[1] - 2.0).abs() < 1e-12);
        assert_eq!(a.fixed_distance(&[0.3, 1.0]), 0.3);
    }

    #[test]
    fn torus_translation_needs_lattice_period() {
        assert!(CircleAction::torus_translation(&[TAU, 1.0], &[1.0, 0.0]).is_ok());
        assert!(matches!(
            CircleAction::torus_translation(&[1.0, 1.0], &[1.0, 0.0]),
            Err(CollapseError::NotPeriodic { .. })
        ));
    }

    #[test]
    fn generator_flow_matches_rotation() {
        let rot: GeneratorFn = Arc::new(|x| vec![-x[1], x[0]]);
        let a = CircleAction::from_generator(0, (vec![-1.0, -1.0], vec![1.0, 1.0]), vec![None, None], rot).unwrap();
        let (y, j) = a.flow(&[0.5, 0.0], PI / 2.0).unwrap();
        assert!((y[0]).abs() < 1e-9 && (y[1] - 0.5).abs() < 1e-9);
        assert!((j[(0, 1)] + 1.0).abs() < 1e-9);
        let spiral: GeneratorFn = Arc::new(|x| vec![-x[1] + 0.1 * x[0], x[0]]);
        assert!(matches!(
            CircleAction::from_generator(0, (vec![-1.0, -1.0], vec![1.0, 1.0]), vec![None, None], spiral),
            Err(CollapseError::NotPeriodic { .. })
        ));
    }
}
