//! Deck groups of constant-curvature surfaces, acting on the Poincaré disk.
//!
//! Group elements are kept in two forms: as SU(1,1) Möbius maps (for moving
//! points and tangent vectors inside the disk chart) and as SO(2,1) matrices
//! acting on the hyperboloid (for long words, where disk coordinates lose
//! precision near the boundary circle).

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Disk isometry `z -> (a z + b) / (conj(b) z + conj(a))` with `|a|^2 - |b|^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
}

impl Mobius {
    pub const IDENTITY: Mobius = Mobius { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) };

    pub fn rotation(angle: f64) -> Self {
        Self { a: Complex64::from_polar(1.0, angle / 2.0), b: Complex64::new(0.0, 0.0) }
    }

    /// Hyperbolic translation by `distance` along the real diameter.
    pub fn translation(distance: f64) -> Self {
        let h = distance / 2.0;
        Self { a: Complex64::new(h.cosh(), 0.0), b: Complex64::new(h.sinh(), 0.0) }
    }

    /// Converts a real 2x2 matrix acting on the upper half-plane into the disk
    /// model through the Cayley transform `z -> (z - i)/(z + i)`.
    pub fn from_half_plane(m: [[f64; 2]; 2]) -> Result<Self, GeometryError> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det <= 0.0 || !det.is_finite() {
            return Err(GeometryError::InvalidSpec(format!(
                "half-plane generator must have positive determinant, got {det}"
            )));
        }
        let s = det.sqrt();
        let (p, q, r, t) = (m[0][0] / s, m[0][1] / s, m[1][0] / s, m[1][1] / s);
        // C M C^{-1} with C = [[1, -i], [1, i]].
        let a = Complex64::new(p + t, q - r) / 2.0;
        let b = Complex64::new(p - t, -(q + r)) / 2.0;
        let g = Self { a, b };
        let norm = g.a.norm_sqr() - g.b.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(GeometryError::InvalidSpec("generator is not an isometry".into()));
        }
        Ok(g)
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.b.conj() * z + self.a.conj())
    }

    /// Complex derivative at `z`; tangent vectors transform by multiplication.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let d = self.b.conj() * z + self.a.conj();
        Complex64::new(1.0, 0.0) / (d * d)
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.a.conj(), b: -self.b }
    }

    pub fn compose(&self, other: &Mobius) -> Self {
        // [[a, b], [b*, a*]] * [[c, d], [d*, c*]]
        Self {
            a: self.a * other.a + self.b * other.b.conj(),
            b: self.a * other.b + self.b * other.a.conj(),
        }
    }

    /// Image of the disk center.
    pub fn origin_image(&self) -> Complex64 {
        self.b / self.a.conj()
    }

    /// Distance between the center and its image, from `cosh d = |a|^2 + |b|^2`.
    pub fn displacement(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr()).max(1.0).acosh()
    }

    pub fn to_lorentz(&self) -> Matrix3<f64> {
        let probes = [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.5)];
        let src = Matrix3::from_columns(&probes.map(hyperboloid));
        let dst = Matrix3::from_columns(&probes.map(|z| hyperboloid(self.apply(z))));
        dst * src.try_inverse().expect("probe points are independent")
    }
}

/// Hyperboloid lift `(cosh r, sinh r cos t, sinh r sin t)` of a disk point.
pub fn hyperboloid(z: Complex64) -> Vector3<f64> {
    let s = 1.0 - z.norm_sqr();
    Vector3::new((1.0 + z.norm_sqr()) / s, 2.0 * z.re / s, 2.0 * z.im / s)
}

pub fn from_hyperboloid(x: &Vector3<f64>) -> Complex64 {
    Complex64::new(x[1], x[2]) / (1.0 + x[0])
}

/// `cosh` of the hyperbolic distance between two hyperboloid points.
pub fn cosh_distance(x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
    (x[0] * y[0] - x[1] * y[1] - x[2] * y[2]).max(1.0)
}

pub fn disk_distance(z: Complex64, w: Complex64) -> f64 {
    let num = 2.0 * (z - w).norm_sqr();
    let den = (1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr());
    (1.0 + num / den).acosh()
}

/// A finitely generated deck group with the generator-Dirichlet region
/// `{z : d(z, 0) <= d(z, g 0) for all generators g}` as fundamental domain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeckGroup {
    /// Closed under inversion.
    generators: Vec<Mobius>,
    #[serde(skip)]
    lorentz: Vec<Matrix3<f64>>,
    /// (half displacement, direction) of each generator's bisector.
    bisectors: Vec<(f64, f64)>,
    circumradius: f64,
    inradius: f64,
    breakpoints: Vec<f64>,
    label: String,
    /// Elements moving the center by at most `2 R + 1`, identity excluded.
    #[serde(skip)]
    neighbourhood: Vec<Mobius>,
}

impl PartialEq for DeckGroup {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
    }
}

impl DeckGroup {
    /// Side pairings of the regular octagon with interior angles pi/4 (genus 2).
    pub fn genus2_octagon() -> Self {
        let inradius = (1.0 + std::f64::consts::SQRT_2).acosh();
        let base = Mobius::translation(2.0 * inradius);
        let gens = (0..8)
            .map(|k| {
                let r = Mobius::rotation(k as f64 * std::f64::consts::FRAC_PI_4);
                r.compose(&base).compose(&r.inverse())
            })
            .collect();
        Self::build(gens, "genus2-octagon").expect("octagon pairings are valid")
    }

    /// Builds a group from generators; inverses are added when missing.
    pub fn from_generators(generators: Vec<Mobius>) -> Result<Self, GeometryError> {
        Self::build(generators, "custom")
    }

    fn build(mut generators: Vec<Mobius>, label: &str) -> Result<Self, GeometryError> {
        if generators.is_empty() {
            return Err(GeometryError::InvalidSpec("deck group needs generators".into()));
        }
        let mut all = Vec::new();
        for g in generators.drain(..) {
            if g.displacement() < 1e-6 {
                return Err(GeometryError::InvalidSpec("generator fixes the disk center".into()));
            }
            for h in [g, g.inverse()] {
                if !all.iter().any(|k: &Mobius| (k.origin_image() - h.origin_image()).norm() < 1e-9) {
                    all.push(h);
                }
            }
        }
        let bisectors = all.iter().map(|g| (g.displacement() / 2.0, g.origin_image().arg())).collect();
        let lorentz = all.iter().map(Mobius::to_lorentz).collect();
        let mut group = Self {
            generators: all,
            lorentz,
            bisectors,
            circumradius: 0.0,
            inradius: 0.0,
            breakpoints: Vec::new(),
            label: label.to_string(),
            neighbourhood: Vec::new(),
        };
        group.inradius = group.bisectors.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
        group.scan_boundary()?;
        group.neighbourhood = group.elements_within(2.0 * group.circumradius + 1.0);
        Ok(group)
    }

    /// All non-identity elements `g` with `d(0, g 0) <= radius`, by breadth-first
    /// search over words in the generators.
    pub fn elements_within(&self, radius: f64) -> Vec<Mobius> {
        let limit = radius + self.circumradius + 1e-9;
        let mut seen = vec![Mobius::IDENTITY];
        let mut frontier = vec![Mobius::IDENTITY];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for g in &frontier {
                for s in &self.generators {
                    let h = g.compose(s);
                    if h.displacement() > limit {
                        continue;
                    }
                    let o = h.origin_image();
                    if seen.iter().any(|k| disk_distance(k.origin_image(), o) < 1e-6) {
                        continue;
                    }
                    seen.push(h);
                    next.push(h);
                }
            }
            frontier = next;
        }
        seen.into_iter().skip(1).filter(|g| g.displacement() <= radius).collect()
    }

    pub(crate) fn neighbourhood(&self) -> &[Mobius] {
        &self.neighbourhood
    }

    fn scan_boundary(&mut self) -> Result<(), GeometryError> {
        let samples = 4096;
        let tau = std::f64::consts::TAU;
        let mut rmax: f64 = 0.0;
        let mut prev = self.active_bisector(0.0);
        let mut breaks = Vec::new();
        for s in 1..=samples {
            let psi = tau * s as f64 / samples as f64;
            let (idx, r) = self.active_bisector(psi);
            if !r.is_finite() {
                return Err(GeometryError::InvalidSpec("fundamental region is not compact".into()));
            }
            rmax = rmax.max(r);
            if idx != prev.0 {
                // bisect the switch of the active side
                let (mut lo, mut hi) = (tau * (s - 1) as f64 / samples as f64, psi);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if self.active_bisector(mid).0 == prev.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let at = 0.5 * (lo + hi);
                rmax = rmax.max(self.boundary_distance(at));
                breaks.push(at);
            }
            prev = (idx, r);
        }
        self.circumradius = rmax;
        self.breakpoints = breaks;
        Ok(())
    }

    fn active_bisector(&self, psi: f64) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, &(half, dir)) in self.bisectors.iter().enumerate() {
            let c = (psi - dir).cos();
            let t = half.tanh();
            if c > t {
                let r = (t / c).atanh();
                if r < best.1 {
                    best = (i, r);
                }
            }
        }
        best
    }

    /// Hyperbolic distance from the center to the region boundary in direction `psi`.
    pub fn boundary_distance(&self, psi: f64) -> f64 {
        self.active_bisector(psi).1
    }

    /// Directions where the boundary switches sides (the region's vertices).
    pub fn vertex_directions(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn circumradius(&self) -> f64 {
        self.circumradius
    }

    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn generators(&self) -> &[Mobius] {
        &self.generators
    }

    pub(crate) fn lorentz_generators(&self) -> &[Matrix3<f64>] {
        &self.lorentz
    }

    pub fn contains(&self, z: Complex64) -> bool {
        if z.norm_sqr() >= 1.0 {
            return false;
        }
        let r = 2.0 * z.norm().atanh();
        r <= self.boundary_distance(z.arg()) + 1e-12
    }

    /// Moves `z` (with tangent `v`) into the fundamental region.
    pub fn reduce(&self, mut z: Complex64, mut v: Complex64) -> (Complex64, Complex64) {
        for _ in 0..64 {
            let d0 = disk_distance(z, Complex64::new(0.0, 0.0));
            let mut worst: Option<(usize, f64)> = None;
            for (i, g) in self.generators.iter().enumerate() {
                let excess = d0 - disk_distance(z, g.origin_image());
                if excess > 1e-12 && worst.map_or(true, |w| excess > w.1) {
                    worst = Some((i, excess));
                }
            }
            match worst {
                None => break,
                Some((i, _)) => {
                    let inv = self.generators[i].inverse();
                    v *= inv.derivative(z);
                    z = inv.apply(z);
                }
            }
        }
        (z, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octagon_geometry() {
        let g = DeckGroup::genus2_octagon();
        assert_eq!(g.generators().len(), 8);
        // cosh R = cot^2(pi/8) = 3 + 2 sqrt 2
        let r = (3.0 + 2.0 * std::f64::consts::SQRT_2).acosh();
        assert!((g.circumradius() - r).abs() < 1e-9, "{}", g.circumradius());
        assert_eq!(g.vertex_directions().len(), 8);
    }

    #[test]
    fn mobius_group_laws() {
        let g = Mobius::rotation(0.3).compose(&Mobius::translation(1.1));
        let z = Complex64::new(0.2, -0.4);
        let w = g.inverse().apply(g.apply(z));
        assert!((w - z).norm() < 1e-12);
        let l = g.to_lorentz();
        let x = l * hyperboloid(z);
        assert!((from_hyperboloid(&x) - g.apply(z)).norm() < 1e-12);
    }

    #[test]
    fn half_plane_conversion_keeps_isometry() {
        let g = Mobius::from_half_plane([[2.0, 0.0], [0.0, 0.5]]).unwrap();
        // dilation by 4 in the half-plane: translation length ln 4
        assert!((g.displacement() - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn reduce_lands_in_region() {
        let g = DeckGroup::genus2_octagon();
        let word = g.generators()[0].compose(&g.generators()[3]).compose(&g.generators()[5]);
        let z = word.apply(Complex64::new(0.1, 0.05));
        let (w, _) = g.reduce(z, Complex64::new(1.0, 0.0));
        assert!(g.contains(w));
        assert!((w - Complex64::new(0.1, 0.05)).norm() < 1e-9);
    }
}
