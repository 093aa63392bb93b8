//! Randomized incremental LP over a bounded box, generic in the scalar type.
//!
//! Constraints are processed in a random order; whenever the running optimum
//! violates the next constraint, the new optimum lies on that constraint's
//! hyperplane, so one variable is eliminated and the problem is solved
//! recursively over the constraints seen so far. Ties between optimal points
//! are broken by a list of objectives compared lexicographically.
//!
//! The remaining variables after an elimination are always original
//! coordinates, so their box bounds stay valid in every subproblem; the box
//! of an eliminated variable becomes two ordinary constraints.

use crate::scalar::Scalar;

/// Id of a constraint derived from the box of an eliminated variable.
pub(crate) const BOX_ROW: u32 = u32::MAX;

/// Flat row storage: `a[i*k..(i+1)*k] . x >= b[i]`.
pub(crate) struct Rows<S> {
    pub k: usize,
    pub a: Vec<S>,
    pub b: Vec<S>,
    pub id: Vec<u32>,
}

impl<S: Scalar> Rows<S> {
    pub fn with_capacity(k: usize, n: usize) -> Self {
        Rows {
            k,
            a: Vec::with_capacity(k * n),
            b: Vec::with_capacity(n),
            id: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, coeffs: impl IntoIterator<Item = S>, rhs: S, id: u32) {
        let before = self.a.len();
        self.a.extend(coeffs);
        debug_assert_eq!(self.a.len() - before, self.k);
        self.b.push(rhs);
        self.id.push(id);
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    fn row(&self, i: usize) -> &[S] {
        &self.a[i * self.k..(i + 1) * self.k]
    }

    /// Moves row `i` in front of rows `0..i`.
    fn move_to_front(&mut self, i: usize) {
        if i == 0 {
            return;
        }
        let k = self.k;
        self.a[..(i + 1) * k].rotate_right(k);
        self.b[..=i].rotate_right(1);
        self.id[..=i].rotate_right(1);
    }
}

pub(crate) enum Outcome<S> {
    Optimal { x: Vec<S>, basis: Vec<u32> },
    Infeasible { cert: Vec<u32> },
}

/// Lexicographic optimum over the box alone; separable per coordinate.
fn box_optimum<S: Scalar>(lo: &[S], hi: &[S], objs: &[Vec<S>]) -> Vec<S> {
    (0..lo.len())
        .map(|l| {
            let sign = objs
                .iter()
                .map(|o| &o[l])
                .find(|c| !negligible(*c));
            match sign {
                Some(c) if *c > S::zero() => hi[l].clone(),
                _ => lo[l].clone(),
            }
        })
        .collect()
}

fn negligible<S: Scalar>(x: &S) -> bool {
    if S::EXACT {
        *x == S::zero()
    } else {
        x.to_f64().abs() <= 1e-11
    }
}

fn satisfied<S: Scalar>(a: &[S], b: &S, x: &[S]) -> bool {
    let mut dot = S::zero();
    let mut mag = S::zero();
    for (ai, xi) in a.iter().zip(x) {
        let t = ai.clone() * xi.clone();
        mag = mag + t.abs();
        dot = dot + t;
    }
    let scale = if b.abs() > mag { b.abs() } else { mag };
    dot >= b.clone() - S::slack(&scale)
}

pub(crate) fn solve<S: Scalar>(lo: &[S], hi: &[S], objs: &[Vec<S>], rows: &mut Rows<S>) -> Outcome<S> {
    let k = lo.len();
    debug_assert_eq!(rows.k, k);
    let mut x = box_optimum(lo, hi, objs);
    let mut basis = Vec::new();
    for i in 0..rows.len() {
        if satisfied(rows.row(i), &rows.b[i], &x) {
            continue;
        }
        let id = rows.id[i];
        let row = rows.row(i);
        let pivot = (0..k).max_by(|&p, &q| {
            row[p]
                .abs()
                .partial_cmp(&row[q].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let pivot = match pivot {
            Some(j) if !negligible(&row[j]) => j,
            _ => {
                let cert = if id == BOX_ROW { vec![] } else { vec![id] };
                return Outcome::Infeasible { cert };
            }
        };

        // x_pivot = g0 + sum_l g[l] * y_l over the remaining coordinates.
        let aj = row[pivot].clone();
        let g0 = rows.b[i].clone() / aj.clone();
        let g: Vec<S> = (0..k)
            .filter(|&l| l != pivot)
            .map(|l| -(row[l].clone() / aj.clone()))
            .collect();

        let sub_lo: Vec<S> = (0..k).filter(|&l| l != pivot).map(|l| lo[l].clone()).collect();
        let sub_hi: Vec<S> = (0..k).filter(|&l| l != pivot).map(|l| hi[l].clone()).collect();
        let sub_objs: Vec<Vec<S>> = objs
            .iter()
            .map(|o| {
                let cj = o[pivot].clone();
                (0..k)
                    .filter(|&l| l != pivot)
                    .zip(&g)
                    .map(|(l, gl)| o[l].clone() + cj.clone() * gl.clone())
                    .collect()
            })
            .collect();

        let mut sub = Rows::with_capacity(k - 1, i + 2);
        sub.push(g.iter().cloned(), lo[pivot].clone() - g0.clone(), BOX_ROW);
        sub.push(g.iter().map(|gl| -gl.clone()), g0.clone() - hi[pivot].clone(), BOX_ROW);
        for r in 0..i {
            let rr = rows.row(r);
            let rj = rr[pivot].clone();
            sub.push(
                (0..k)
                    .filter(|&l| l != pivot)
                    .zip(&g)
                    .map(|(l, gl)| rr[l].clone() + rj.clone() * gl.clone()),
                rows.b[r].clone() - rj.clone() * g0.clone(),
                rows.id[r],
            );
        }

        match solve(&sub_lo, &sub_hi, &sub_objs, &mut sub) {
            Outcome::Infeasible { mut cert } => {
                if id != BOX_ROW {
                    cert.push(id);
                }
                return Outcome::Infeasible { cert };
            }
            Outcome::Optimal { x: y, basis: mut sub_basis } => {
                let xj = g.iter().zip(&y).fold(g0, |acc, (gl, yl)| acc + gl.clone() * yl.clone());
                let mut lifted = Vec::with_capacity(k);
                let mut rest = y.into_iter();
                for l in 0..k {
                    if l == pivot {
                        lifted.push(xj.clone());
                    } else {
                        lifted.push(rest.next().expect("dimension"));
                    }
                }
                x = lifted;
                if id != BOX_ROW {
                    sub_basis.push(id);
                }
                basis = sub_basis;
            }
        }
        rows.move_to_front(i);
    }
    Outcome::Optimal { x, basis }
}
