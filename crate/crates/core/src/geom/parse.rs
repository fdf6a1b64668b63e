//! Compact text specs for catalog metrics.
//!
//! ```text
//! sphere:r=1            round sphere of radius 1 (also `sphere:1`, `sphere`)
//! torus:1,2             flat torus with side lengths 1 and 2
//! hyperbolic:genus2-octagon
//! hyperbolic:2,0,0,0.5;1,1,0,1
//!                       deck generators as row-major real 2x2 half-plane matrices
//! product:(sphere:r=1)x(torus:1,1)
//! ```

use std::str::FromStr;

use super::deck::{DeckGroup, Mobius};
use super::{ChartedMetric, GeometryError};

impl FromStr for ChartedMetric {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (kind, args) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), a.trim()),
            None => (s, ""),
        };
        match kind {
            "sphere" => {
                let r = args.strip_prefix("r=").unwrap_or(args);
                let radius = if r.is_empty() { 1.0 } else { number(r)? };
                ChartedMetric::round_sphere(radius)
            }
            "torus" => {
                let sides = args.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
                ChartedMetric::flat_torus(sides)
            }
            "hyperbolic" => {
                if args == "genus2-octagon" || args == "genus2" {
                    return Ok(ChartedMetric::genus2_octagon());
                }
                let mut gens = Vec::new();
                for part in args.split(';').filter(|p| !p.trim().is_empty()) {
                    let v = part.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
                    if v.len() != 4 {
                        return Err(GeometryError::InvalidSpec(format!("generator needs 4 entries: {part}")));
                    }
                    gens.push(Mobius::from_half_plane([[v[0], v[1]], [v[2], v[3]]])?);
                }
                Ok(ChartedMetric::hyperbolic_quotient(DeckGroup::from_generators(gens)?))
            }
            "product" => {
                let (l, r) = split_product(args)?;
                Ok(ChartedMetric::product(l.parse()?, r.parse()?))
            }
            _ => Err(GeometryError::InvalidSpec(format!("unknown metric kind '{kind}'"))),
        }
    }
}

fn number(s: &str) -> Result<f64, GeometryError> {
    s.trim().parse::<f64>().map_err(|_| GeometryError::InvalidSpec(format!("not a number: '{s}'")))
}

fn split_product(args: &str) -> Result<(&str, &str), GeometryError> {
    let bad = || GeometryError::InvalidSpec(format!("product spec must be (A)x(B): '{args}'"));
    if !args.starts_with('(') {
        return Err(bad());
    }
    let mut depth = 0usize;
    for (i, c) in args.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth = depth.checked_sub(1).ok_or_else(bad)?;
                if depth == 0 {
                    let left = &args[1..i];
                    let rest = args[i + 1..].trim_start();
                    let rest = rest.strip_prefix('x').ok_or_else(bad)?.trim();
                    let right = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
                    return Ok((left, right));
                }
            }
            _ => {}
        }
    }
    Err(bad())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::CatalogTag;

    #[test]
    fn parses_catalog_specs() {
        let m: ChartedMetric = "sphere:r=2".parse().unwrap();
        assert_eq!(m.tag(), CatalogTag::RoundSphere { radius: 2.0 });
        let t: ChartedMetric = "torus:1,2".parse().unwrap();
        assert_eq!(t.dim(), 2);
        let p: ChartedMetric = "product:(sphere:r=1)x(product:(torus:1,1)x(sphere))".parse().unwrap();
        assert_eq!(p.dim(), 6);
        let h: ChartedMetric = "hyperbolic:genus2-octagon".parse().unwrap();
        assert_eq!(h.dim(), 2);
    }

    #[test]
    fn rejects_malformed_specs() {
        for bad in ["cube:1", "torus:1,x", "sphere:r=-1", "product:(sphere)", "hyperbolic:1,2,3"] {
            assert!(bad.parse::<ChartedMetric>().is_err(), "{bad}");
        }
    }
}
