//! Smith normal form by elementary operations, pivoting on the smallest entry.

use crate::linalg::IntMatrix;

/// `A = U·S·V` with `U`, `V` unimodular and `S` diagonal, `d1 | d2 | …`.
/// The inverses of `U` and `V` are tracked alongside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SnfResult {
    /// Diagonal of `S` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s.get(i, i)).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|&&d| d != 0).count()
    }

    /// Basis of the integer kernel of `A`, as columns of `V⁻¹` past the rank.
    pub fn kernel_basis(&self) -> Vec<Vec<i64>> {
        (self.rank()..self.v_inv.cols()).map(|j| self.v_inv.column(j)).collect()
    }
}

struct Work {
    s: IntMatrix,
    p: IntMatrix,
    p_inv: IntMatrix,
    q: IntMatrix,
    q_inv: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for m in [&mut self.s, &mut self.p] {
            for c in 0..m.cols() {
                let (a, b) = (m.get(i, c), m.get(j, c));
                m.set(i, c, b);
                m.set(j, c, a);
            }
        }
        let m = &mut self.p_inv;
        for r in 0..m.rows() {
            let (a, b) = (m.get(r, i), m.get(r, j));
            m.set(r, i, b);
            m.set(r, j, a);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for m in [&mut self.s, &mut self.q] {
            for r in 0..m.rows() {
                let (a, b) = (m.get(r, i), m.get(r, j));
                m.set(r, i, b);
                m.set(r, j, a);
            }
        }
        let m = &mut self.q_inv;
        for c in 0..m.cols() {
            let (a, b) = (m.get(i, c), m.get(j, c));
            m.set(i, c, b);
            m.set(j, c, a);
        }
    }

    /// row_i += k·row_j
    fn add_row(&mut self, i: usize, j: usize, k: i64) {
        if k == 0 {
            return;
        }
        for m in [&mut self.s, &mut self.p] {
            for c in 0..m.cols() {
                m.set(i, c, m.get(i, c) + k * m.get(j, c));
            }
        }
        let m = &mut self.p_inv;
        for r in 0..m.rows() {
            m.set(r, j, m.get(r, j) - k * m.get(r, i));
        }
    }

    /// col_i += k·col_j
    fn add_col(&mut self, i: usize, j: usize, k: i64) {
        if k == 0 {
            return;
        }
        for m in [&mut self.s, &mut self.q] {
            for r in 0..m.rows() {
                m.set(r, i, m.get(r, i) + k * m.get(r, j));
            }
        }
        let m = &mut self.q_inv;
        for c in 0..m.cols() {
            m.set(j, c, m.get(j, c) - k * m.get(i, c));
        }
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.s, &mut self.p] {
            for c in 0..m.cols() {
                m.set(i, c, -m.get(i, c));
            }
        }
        let m = &mut self.p_inv;
        for r in 0..m.rows() {
            m.set(r, i, -m.get(r, i));
        }
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows(), a.cols());
    let mut w = Work {
        s: a.clone(),
        p: IntMatrix::identity(m),
        p_inv: IntMatrix::identity(m),
        q: IntMatrix::identity(n),
        q_inv: IntMatrix::identity(n),
    };
    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let v = w.s.get(i, j).abs();
                    if v != 0 && best.is_none_or(|(bi, bj)| v < w.s.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish(w);
            };
            w.swap_rows(t, bi);
            w.swap_cols(t, bj);
            let d = w.s.get(t, t);
            let mut dirty = false;
            for i in t + 1..m {
                let q = w.s.get(i, t).div_euclid(d);
                w.add_row(i, t, -q);
                dirty |= w.s.get(i, t) != 0;
            }
            for j in t + 1..n {
                let q = w.s.get(t, j).div_euclid(d);
                w.add_col(j, t, -q);
                dirty |= w.s.get(t, j) != 0;
            }
            if dirty {
                continue;
            }
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| w.s.get(i, j) % d != 0));
            if let Some(i) = offender {
                w.add_row(t, i, 1);
                continue;
            }
            if d < 0 {
                w.negate_row(t);
            }
            break;
        }
    }
    finish(w)
}

fn finish(w: Work) -> SnfResult {
    // P·A·Q = S, so A = P⁻¹·S·Q⁻¹
    SnfResult {
        u: w.p_inv,
        s: w.s,
        v: w.q_inv,
        u_inv: w.p,
        v_inv: w.q,
    }
}
