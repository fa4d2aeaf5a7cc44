use thiserror::Error;

use super::{validate_hn, HnData, HnError};
use crate::rational::ExactRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("polygon must start at (0, 0)")]
    BadOrigin,
    #[error("x must increase strictly along the path (vertex {0})")]
    NotIncreasing(usize),
    #[error("upper path is not concave at vertex {0}")]
    NotConcave(usize),
    #[error("polygons end at different points: {:?} vs {:?}", .0.0, .0.1)]
    EndpointMismatch(Box<(Point, Point)>),
}

pub type Point = (ExactRational, ExactRational);

/// Upper boundary of an HN polygon, from `(0, 0)` to `(rank, degree)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

fn slope(a: &Point, b: &Point) -> ExactRational {
    (&b.1 - &a.1) / (&b.0 - &a.0)
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self, PolygonError> {
        match vertices.first() {
            Some((x, y)) if x.is_zero() && y.is_zero() => {}
            _ => return Err(PolygonError::BadOrigin),
        }
        if let Some(i) = vertices.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(PolygonError::NotIncreasing(i + 1));
        }
        if let Some(i) = vertices
            .windows(3)
            .position(|w| slope(&w[0], &w[1]) < slope(&w[1], &w[2]))
        {
            return Err(PolygonError::NotConcave(i + 1));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn endpoint(&self) -> &Point {
        self.vertices.last().expect("origin is always present")
    }

    /// Height of the upper path above `x`, for `0 <= x <= endpoint.x`.
    pub fn height_at(&self, x: &ExactRational) -> Option<ExactRational> {
        if self.vertices.len() == 1 {
            return x.is_zero().then(ExactRational::zero);
        }
        self.vertices.windows(2).find_map(|w| {
            let (a, b) = (&w[0], &w[1]);
            (a.0 <= *x && *x <= b.0).then(|| &a.1 + &(slope(a, b) * (x - &a.0)))
        })
    }
}

/// Vertices `(sum_{j<=i} r_j, sum_{j<=i} r_j * slope_j)`.
pub fn polygon_from_hn(data: &HnData) -> Result<ConvexPolygon, HnError> {
    validate_hn(data)?;
    let mut vertices = vec![(ExactRational::zero(), ExactRational::zero())];
    for q in &data.quotients {
        let (x, y) = vertices.last().expect("nonempty").clone();
        let rank = ExactRational::integer(q.rank);
        let rise = &rank * &q.slope;
        vertices.push((x + rank, y + rise));
    }
    Ok(ConvexPolygon::new(vertices)?)
}

/// Area enclosed by the upper path and the chord joining its endpoints.
pub fn polygon_area(poly: &ConvexPolygon) -> ExactRational {
    let v = poly.vertices();
    let n = v.len();
    let twice: ExactRational = (0..n)
        .map(|i| {
            let (a, b) = (&v[i], &v[(i + 1) % n]);
            &a.0 * &b.1 - &b.0 * &a.1
        })
        .sum();
    (twice / ExactRational::integer(2)).abs()
}

fn same_endpoints(outer: &ConvexPolygon, inner: &ConvexPolygon) -> Result<(), PolygonError> {
    if outer.endpoint() == inner.endpoint() {
        Ok(())
    } else {
        Err(PolygonError::EndpointMismatch(Box::new((
            outer.endpoint().clone(),
            inner.endpoint().clone(),
        ))))
    }
}

/// Whether every vertex of `inner` lies on or below the upper path of `outer`.
pub fn polygon_contains(outer: &ConvexPolygon, inner: &ConvexPolygon) -> Result<bool, PolygonError> {
    same_endpoints(outer, inner)?;
    Ok(inner.vertices().iter().all(|(x, y)| {
        outer
            .height_at(x)
            .is_some_and(|h| *y <= h)
    }))
}

/// Whether every vertex of `inner` is also a vertex of `outer`: the
/// filtration of the coarser level survives in the finer one.
pub fn polygon_retains_vertices(
    outer: &ConvexPolygon,
    inner: &ConvexPolygon,
) -> Result<bool, PolygonError> {
    same_endpoints(outer, inner)?;
    Ok(inner.vertices().iter().all(|v| outer.vertices().contains(v)))
}
