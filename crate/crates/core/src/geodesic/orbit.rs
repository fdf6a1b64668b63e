//! Arc counting on hyperbolic quotients through the deck-group orbit.
//!
//! In nonpositive curvature every deck element contributes exactly one
//! geodesic arc from `p` to `q`, so `n_T(p, q) = #{γ : d(p̃, γ q̃) <= T}`.
//! Elements are enumerated breadth-first over right multiplication by the
//! side pairings; a tile `γF` is only expanded when its center satisfies
//! `d(p̃, γ 0) <= T + R` (R the circumradius of F), which is enough for the
//! tiles meeting the closed ball `B(p̃, T)` to stay connected.

use std::collections::HashMap;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::geom::deck::{hyperboloid, DeckGroup};

fn minkowski(x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
    x[0] * y[0] - x[1] * y[1] - x[2] * y[2]
}

/// Visits every deck element `γ` with `d(p, γ q) <= t_max`, passing the
/// distance and the element's Lorentz matrix.
pub(crate) fn visit_orbit<F: FnMut(f64, &Matrix3<f64>)>(
    deck: &DeckGroup,
    p: Complex64,
    q: Complex64,
    t_max: f64,
    mut visit: F,
) {
    let pv = hyperboloid(p);
    let qv = hyperboloid(q);
    let count_cosh = t_max.cosh();
    let prune_cosh = (t_max + deck.circumradius()).cosh() * (1.0 + 1e-12);
    let gens = deck.lorentz_generators();

    let mut nodes: Vec<Matrix3<f64>> = vec![Matrix3::identity()];
    let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
    let key = |c: &Vector3<f64>| ((c[1]).floor() as i64, (c[2]).floor() as i64);
    buckets.entry(key(&Vector3::new(1.0, 0.0, 0.0))).or_default().push(0);
    let mut head = 0;
    while head < nodes.len() {
        let g = nodes[head];
        head += 1;
        let c = minkowski(&pv, &(g * qv));
        if c <= count_cosh {
            visit(c.max(1.0).acosh(), &g);
        }
        for s in gens {
            let h = g * s;
            let center = h.column(0).into_owned();
            if minkowski(&pv, &center) > prune_cosh {
                continue;
            }
            let (kx, ky) = key(&center);
            let tol = 1e-9 * (1.0 + center[0]);
            let mut dup = false;
            'scan: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = buckets.get(&(kx + dx, ky + dy)) {
                        for &i in list {
                            let o = nodes[i as usize].column(0);
                            if (o[1] - center[1]).abs() + (o[2] - center[2]).abs() <= tol {
                                dup = true;
                                break 'scan;
                            }
                        }
                    }
                }
            }
            if !dup {
                buckets.entry((kx, ky)).or_default().push(nodes.len() as u32);
                nodes.push(h);
            }
        }
    }
}

/// Sorted lengths of all geodesic arcs from `p` to `q` of length `<= t_max`
/// on the quotient of the unit-curvature disk by `deck`.
pub fn orbit_lengths(deck: &DeckGroup, p: Complex64, q: Complex64, t_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    visit_orbit(deck, p, q, t_max, |d, _| out.push(d));
    out.sort_by(f64::total_cmp);
    out
}

pub fn orbit_count(deck: &DeckGroup, p: Complex64, q: Complex64, t_max: f64) -> usize {
    let mut n = 0;
    visit_orbit(deck, p, q, t_max, |_, _| n += 1);
    n
}
