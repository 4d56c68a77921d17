//! Marching squares over a rectangular node grid, with polyline chaining.

use std::collections::HashMap;

use crate::scalar::Scalar;

/// Node values on an `(nx + 1) × (ny + 1)` lattice, row-major in `j` then `i`.
///
/// NaN marks nodes outside the domain; any cell touching one is skipped.
#[derive(Debug, Clone)]
pub struct NodeGrid<T> {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<T>,
}

impl<T: Scalar> NodeGrid<T> {
    pub fn from_fn(nx: usize, ny: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                values.push(f(i, j));
            }
        }
        Self { nx, ny, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[j * (self.nx + 1) + i]
    }
}

/// Identity of a lattice edge: horizontal edges start at `(i, j)` and go to
/// `(i+1, j)`, vertical ones go to `(i, j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeId {
    H(usize, usize),
    V(usize, usize),
}

/// One zero-crossing segment, endpoints in lattice coordinates.
#[derive(Debug, Clone, Copy)]
pub struct Segment<T> {
    pub from: (EdgeId, [T; 2]),
    pub to: (EdgeId, [T; 2]),
}

impl<T: Scalar> Segment<T> {
    pub fn midpoint(&self) -> [T; 2] {
        let h = T::lit(0.5);
        [h * (self.from.1[0] + self.to.1[0]), h * (self.from.1[1] + self.to.1[1])]
    }
}

fn crossing<T: Scalar>(grid: &NodeGrid<T>, edge: EdgeId) -> (EdgeId, [T; 2]) {
    let (i0, j0, i1, j1) = match edge {
        EdgeId::H(i, j) => (i, j, i + 1, j),
        EdgeId::V(i, j) => (i, j, i, j + 1),
    };
    let v0 = grid.at(i0, j0);
    let v1 = grid.at(i1, j1);
    let denom = v0 - v1;
    let t = if denom == T::zero() { T::lit(0.5) } else { (v0 / denom).max(T::zero()).min(T::one()) };
    let fi = |k: usize| T::from_usize(k).unwrap();
    let p = [fi(i0) + t * (fi(i1) - fi(i0)), fi(j0) + t * (fi(j1) - fi(j0))];
    (edge, p)
}

/// Zero-level segments of the grid field, with `value > 0` counted as inside.
pub fn march<T: Scalar>(grid: &NodeGrid<T>) -> Vec<Segment<T>> {
    let mut out = Vec::new();
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let v = [grid.at(i, j), grid.at(i + 1, j), grid.at(i + 1, j + 1), grid.at(i, j + 1)];
            if v.iter().any(|x| x.is_nan()) {
                continue;
            }
            let case = v.iter().enumerate().fold(0u8, |acc, (k, &x)| acc | (u8::from(x > T::zero()) << k));
            let bottom = EdgeId::H(i, j);
            let right = EdgeId::V(i + 1, j);
            let top = EdgeId::H(i, j + 1);
            let left = EdgeId::V(i, j);
            let mut emit = |a: EdgeId, b: EdgeId| out.push(Segment { from: crossing(grid, a), to: crossing(grid, b) });
            match case {
                0 | 15 => {}
                1 | 14 => emit(left, bottom),
                2 | 13 => emit(bottom, right),
                3 | 12 => emit(left, right),
                4 | 11 => emit(right, top),
                6 | 9 => emit(bottom, top),
                7 | 8 => emit(left, top),
                5 | 10 => {
                    // saddle: resolve with the cell-centre average
                    let centre_inside = (v[0] + v[1] + v[2] + v[3]) > T::zero();
                    let corner0_inside = case == 5;
                    if centre_inside == corner0_inside {
                        emit(left, top);
                        emit(bottom, right);
                    } else {
                        emit(left, bottom);
                        emit(right, top);
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    out
}

/// Joins segments that share lattice edges into maximal polylines.
///
/// Output order is deterministic for a given segment order.
pub fn chain<T: Scalar>(segments: &[Segment<T>]) -> Vec<Vec<[T; 2]>> {
    let mut by_edge: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (k, s) in segments.iter().enumerate() {
        by_edge.entry(s.from.0).or_default().push(k);
        by_edge.entry(s.to.0).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();

    let next = |edge: EdgeId, used: &[bool]| -> Option<usize> {
        by_edge.get(&edge)?.iter().copied().find(|&k| !used[k])
    };

    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let s = &segments[start];
        let mut forward = vec![s.from, s.to];
        // extend from the tail
        loop {
            let tail = forward.last().unwrap().0;
            let Some(k) = next(tail, &used) else { break };
            used[k] = true;
            let seg = &segments[k];
            forward.push(if seg.from.0 == tail { seg.to } else { seg.from });
        }
        // extend from the head
        let mut backward = Vec::new();
        let mut head = forward[0].0;
        while let Some(k) = next(head, &used) {
            used[k] = true;
            let seg = &segments[k];
            let p = if seg.from.0 == head { seg.to } else { seg.from };
            head = p.0;
            backward.push(p);
        }
        backward.reverse();
        backward.extend(forward);
        lines.push(backward.into_iter().map(|(_, p)| p).collect());
    }
    lines
}
