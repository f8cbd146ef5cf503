//! Integer matrices, Smith normal form, abelianization and direct limits of
//! abelianized endomorphisms.

use std::fmt;

use super::{FreeEndo, Presentation};
use crate::words::WeightMap;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntegerMatrix { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[i64]>::to_vec).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k · row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i64) {
        for j in 0..self.cols {
            let v = self.get(src, j);
            self.data[dst * self.cols + j] += k * v;
        }
    }

    /// col[dst] += k · col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i64) {
        for i in 0..self.rows {
            let v = self.get(i, src);
            self.data[i * self.cols + dst] += k * v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self.data[r * self.cols + j] *= -1;
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> i64 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> =
            self.to_rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        (sign * a[n - 1][n - 1]) as i64
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(i64::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// `diagonal = u · a · v` with `u`, `v` unimodular.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    /// Nonzero invariant factors, each dividing the next.
    pub fn invariant_factors(&self) -> Vec<i64> {
        let d = &self.diagonal;
        (0..d.rows.min(d.cols)).map(|i| d.get(i, i)).filter(|&x| x != 0).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form(a: &IntegerMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let pivot = (t..m)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| d.get(i, j) != 0)
                .min_by_key(|&(i, j)| d.get(i, j).abs());
            let Some((pi, pj)) = pivot else {
                return SmithForm { diagonal: d, u, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let p = d.get(t, t);
            let mut clean = true;
            for i in t + 1..m {
                let q = d.get(i, t) / p;
                if q != 0 {
                    d.add_row(i, t, -q);
                    u.add_row(i, t, -q);
                }
                clean &= d.get(i, t) == 0;
            }
            for j in t + 1..n {
                let q = d.get(t, j) / p;
                if q != 0 {
                    d.add_col(j, t, -q);
                    v.add_col(j, t, -q);
                }
                clean &= d.get(t, j) == 0;
            }
            if !clean {
                continue;
            }
            let bad_row = (t + 1..m).find(|&i| (t + 1..n).any(|j| d.get(i, j) % p != 0));
            match bad_row {
                Some(i) => {
                    d.add_row(t, i, 1);
                    u.add_row(t, i, 1);
                }
                None => break,
            }
        }
        if d.get(t, t) < 0 {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { diagonal: d, u, v }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Abelianization {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl fmt::Display for Abelianization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".to_string() } else { format!("Z^{}", self.free_rank) });
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Relator exponent matrix: rows are relators, columns generators.
pub fn relation_matrix(p: &Presentation) -> IntegerMatrix {
    let gens = p.alphabet().generators();
    let mut m = IntegerMatrix::zeros(p.relators().len(), gens.len());
    for (i, r) in p.relators().iter().enumerate() {
        for l in r.letters() {
            let j = p.alphabet().rank_of(l.gen).expect("relator over alphabet");
            m.data[i * gens.len() + j] += l.sign();
        }
    }
    m
}

pub fn abelianization(p: &Presentation) -> Abelianization {
    let snf = smith_normal_form(&relation_matrix(p));
    let factors = snf.invariant_factors();
    Abelianization {
        free_rank: p.alphabet().len() - factors.len(),
        torsion: factors.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect(),
    }
}

/// Column `j` is the exponent vector of the image of generator `j`.
pub fn abelianized_endo(e: &FreeEndo) -> IntegerMatrix {
    let gens = e.alphabet().generators();
    let n = gens.len();
    let mut m = IntegerMatrix::zeros(n, n);
    for (j, &g) in gens.iter().enumerate() {
        let img = e.image(g).expect("total endomorphism");
        for (i, &h) in gens.iter().enumerate() {
            let unit = WeightMap::new(e.alphabet(), gens.iter().map(|&x| (x, i64::from(x == h))))
                .expect("total weights");
            m.set(i, j, unit.exponent_sum(img).expect("image over alphabet"));
        }
    }
    m
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DirectLimit {
    pub stable_rank: usize,
    pub dilation: u64,
    /// Power of the matrix at which the rational image stopped shrinking.
    pub stabilized_at: usize,
    pub classification: String,
}

/// Direct limit `ℤⁿ → ℤⁿ → ⋯` of a square matrix `m`, restricted to the
/// eventual image where `m` acts invertibly over ℚ.
pub fn direct_limit(m: &IntegerMatrix) -> Result<DirectLimit, String> {
    if !m.is_square() {
        return Err(format!("direct limit needs a square matrix, got {}x{}", m.rows, m.cols));
    }
    let n = m.rows;
    let mut power = IntegerMatrix::identity(n);
    let mut rank = n;
    let mut k = 0;
    loop {
        let next = m.mul(&power);
        let next_rank = smith_normal_form(&next).rank();
        if next_rank == rank {
            break;
        }
        power = next;
        rank = next_rank;
        k += 1;
    }
    let basis = column_basis(&power);
    let r = basis.len();
    let mut restricted = IntegerMatrix::zeros(r, r);
    for (j, b) in basis.iter().enumerate() {
        let image: Vec<i64> = (0..n).map(|i| (0..n).map(|l| m.get(i, l) * b.vector[l]).sum()).collect();
        let coords = solve_in_basis(&basis, &image)
            .ok_or_else(|| "eventual image is not invariant (internal error)".to_string())?;
        for (i, c) in coords.into_iter().enumerate() {
            restricted.set(i, j, c);
        }
    }
    let dilation = restricted.determinant().unsigned_abs();
    let classification = if dilation == 1 {
        format!("free abelian of rank {r}")
    } else {
        format!("rank-{r} module with dilation {dilation} (not finitely generated)")
    };
    Ok(DirectLimit { stable_rank: r, dilation, stabilized_at: k, classification })
}

struct BasisVector {
    vector: Vec<i64>,
    pivot_row: usize,
}

/// Lattice basis of the integer column span, in column echelon form.
fn column_basis(a: &IntegerMatrix) -> Vec<BasisVector> {
    let mut b = a.clone();
    let mut pc = 0;
    let mut pivots = Vec::new();
    for row in 0..b.rows {
        if pc == b.cols {
            break;
        }
        for j in pc + 1..b.cols {
            while b.get(row, j) != 0 {
                let q = b.get(row, pc) / b.get(row, j);
                b.add_col(pc, j, -q);
                b.swap_cols(pc, j);
            }
        }
        if b.get(row, pc) != 0 {
            pivots.push(row);
            pc += 1;
        }
    }
    pivots
        .into_iter()
        .enumerate()
        .map(|(j, pivot_row)| BasisVector { vector: b.column(j), pivot_row })
        .collect()
}

fn solve_in_basis(basis: &[BasisVector], v: &[i64]) -> Option<Vec<i64>> {
    let mut coords: Vec<i64> = Vec::with_capacity(basis.len());
    for (j, bj) in basis.iter().enumerate() {
        let p = bj.pivot_row;
        let partial: i64 = (0..j).map(|l| basis[l].vector[p] * coords[l]).sum();
        let rem = v[p] - partial;
        let piv = bj.vector[p];
        if rem % piv != 0 {
            return None;
        }
        coords.push(rem / piv);
    }
    let ok = (0..v.len()).all(|i| basis.iter().zip(&coords).map(|(b, c)| b.vector[i] * c).sum::<i64>() == v[i]);
    ok.then_some(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{gs_endo, make_gs, make_prop1, parse, prop1_endo};

    #[test]
    fn prop1_abelianization() {
        let ab = abelianization(&make_prop1());
        assert_eq!(ab, Abelianization { free_rank: 2, torsion: vec![] });
        assert_eq!(
            relation_matrix(&make_prop1()).to_rows().iter().filter(|r| r.iter().all(|&x| x == 0)).count(),
            1
        );
    }

    #[test]
    fn cyclic_group() {
        let p = parse("gens: a\nrel: aaaa\n").unwrap().presentation;
        assert_eq!(abelianization(&p), Abelianization { free_rank: 0, torsion: vec![4] });
        assert_eq!(abelianization(&p).to_string(), "Z/4");
    }

    #[test]
    fn gs_abelianization() {
        for s in [3, 9] {
            assert_eq!(abelianization(&make_gs(s).unwrap()), Abelianization { free_rank: 2, torsion: vec![] });
        }
    }

    #[test]
    fn snf_small() {
        let a = IntegerMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.invariant_factors(), vec![2, 6, 12]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.diagonal);
    }

    #[test]
    fn prop1_direct_limit() {
        let m = abelianized_endo(&prop1_endo());
        assert_eq!(m, IntegerMatrix::from_rows(&[vec![0, 0], vec![1, 1]]));
        assert_eq!(m.mul(&m), m);
        let dl = direct_limit(&m).unwrap();
        assert_eq!((dl.stable_rank, dl.dilation), (1, 1));
        assert_eq!(dl.classification, "free abelian of rank 1");
    }

    #[test]
    fn identity_and_doubling_limits() {
        let dl = direct_limit(&IntegerMatrix::identity(2)).unwrap();
        assert_eq!((dl.stable_rank, dl.dilation), (2, 1));
        let dl = direct_limit(&IntegerMatrix::from_rows(&[vec![2]])).unwrap();
        assert_eq!((dl.stable_rank, dl.dilation), (1, 2));
        assert!(dl.classification.contains("not finitely generated"));
        assert!(direct_limit(&IntegerMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn nilpotent_limit_is_trivial() {
        let dl = direct_limit(&IntegerMatrix::from_rows(&[vec![0, 1], vec![0, 0]])).unwrap();
        assert_eq!((dl.stable_rank, dl.dilation, dl.stabilized_at), (0, 1, 2));
    }

    #[test]
    fn gs_endo_limit() {
        // b ↦ W(b,a) b W(a,b)⁻¹ abelianizes to 17a − 16b at s = 3
        let m = abelianized_endo(&gs_endo(3).unwrap());
        assert_eq!(m, IntegerMatrix::from_rows(&[vec![0, 17], vec![1, -16]]));
        assert_eq!(m.determinant(), -17);
        let dl = direct_limit(&m).unwrap();
        assert_eq!((dl.stable_rank, dl.dilation), (2, 17));
    }

    #[test]
    fn determinants() {
        assert_eq!(IntegerMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).determinant(), -1);
        assert_eq!(
            IntegerMatrix::from_rows(&[vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 2]]).determinant(),
            6
        );
    }
}
