//! 3x3 integer matrices, column-vector convention.
//!
//! These are small and copied freely: group elements of SL(3,Z), Hecke coset
//! representatives, and modular symbols are all `Mat3`. Entries are i64 with
//! BigInt fallbacks where products could overflow (determinants of symbol
//! matrices stay well inside i64 at desk scale; the adjugate-based lattice
//! work in `hecke::lll` is exact rational).

use std::fmt;
use std::ops::Mul;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat3 {
    /// m[row][col]
    pub m: [[i64; 3]; 3],
}

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3 { m: [[1, 0, 0], [0, 1, 0], [0, 0, 1]] };

    pub fn new(m: [[i64; 3]; 3]) -> Self {
        Mat3 { m }
    }

    pub fn from_columns(c0: [i64; 3], c1: [i64; 3], c2: [i64; 3]) -> Self {
        let mut m = [[0; 3]; 3];
        for row in 0..3 {
            m[row][0] = c0[row];
            m[row][1] = c1[row];
            m[row][2] = c2[row];
        }
        Mat3 { m }
    }

    pub fn diag(a: i64, b: i64, c: i64) -> Self {
        Mat3 { m: [[a, 0, 0], [0, b, 0], [0, 0, c]] }
    }

    pub fn column(&self, j: usize) -> [i64; 3] {
        [self.m[0][j], self.m[1][j], self.m[2][j]]
    }

    pub fn set_column(&mut self, j: usize, c: [i64; 3]) {
        for row in 0..3 {
            self.m[row][j] = c[row];
        }
    }

    pub fn with_column(&self, j: usize, c: [i64; 3]) -> Self {
        let mut out = *self;
        out.set_column(j, c);
        out
    }

    pub fn swap_columns(&self, a: usize, b: usize) -> Self {
        let mut out = *self;
        for row in 0..3 {
            out.m[row].swap(a, b);
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                t[j][i] = self.m[i][j];
            }
        }
        Mat3 { m: t }
    }

    pub fn det(&self) -> i64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Adjugate: self * adj = det * I.
    pub fn adjugate(&self) -> Self {
        let m = &self.m;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
            m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
        };
        Mat3 {
            m: [
                [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
                [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
                [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
            ],
        }
    }

    pub fn apply(&self, v: [i64; 3]) -> [i64; 3] {
        let mut out = [0i64; 3];
        for (row, slot) in out.iter_mut().enumerate() {
            *slot = self.m[row][0] * v[0] + self.m[row][1] * v[1] + self.m[row][2] * v[2];
        }
        out
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.m.iter().flatten().map(|e| e.abs()).max().unwrap()
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut out = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0i64;
                for (k, row) in rhs.m.iter().enumerate() {
                    s += self.m[i][k] * row[j];
                }
                out[i][j] = s;
            }
        }
        Mat3 { m: out }
    }
}

impl fmt::Debug for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}; {:?}; {:?}]", self.m[0], self.m[1], self.m[2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_adjugate() {
        let a = Mat3::new([[2, 0, 1], [1, 3, 0], [0, 1, 4]]);
        let d = a.det();
        let prod = a * a.adjugate();
        assert_eq!(prod, Mat3::diag(d, d, d));
    }

    #[test]
    fn mul_identity() {
        let a = Mat3::new([[5, -2, 7], [0, 1, 9], [3, 3, 3]]);
        assert_eq!(a * Mat3::IDENTITY, a);
        assert_eq!(Mat3::IDENTITY * a, a);
    }

    #[test]
    fn column_swap_negates_det() {
        let a = Mat3::new([[2, 0, 1], [1, 3, 0], [0, 1, 4]]);
        assert_eq!(a.swap_columns(1, 2).det(), -a.det());
    }
}
