//! Kasteleyn matrices, their Schur complements and edge probabilities.
//!
//! Rows are indexed by black vertices and columns by white vertices, both
//! in the graph's ordering, so `K⁻¹` is indexed `(white, black)`.

use crate::error::{Error, Result};
use crate::graphs::{DimerGraph, Flavor};
use crate::numerics::{ExactMatrix, Field, GaussianRational, Matrix, Orientation, Rational};
use crate::weights::Coord;
use num_traits::One;

#[derive(Clone, Debug)]
pub struct KasteleynMatrix {
    pub flavor: Flavor,
    pub blacks: Vec<Coord>,
    pub whites: Vec<Coord>,
    /// `matrix[(i, j)] = K(b(i+1), w(j+1))`.
    pub matrix: ExactMatrix,
}

fn phase(black: Coord, white: Coord) -> GaussianRational {
    match (white.0 - black.0, white.1 - black.1) {
        (1, -1) | (-1, 1) => GaussianRational::i(),
        _ => GaussianRational::real(Rational::one()),
    }
}

/// Edge weight times `1` or `i` depending on the edge direction.
pub fn kasteleyn_matrix(g: &DimerGraph) -> KasteleynMatrix {
    let n = g.size();
    let mut m = ExactMatrix::zeros(n, n);
    for e in &g.edges {
        let (r, c) = (g.black_index(e.black).unwrap(), g.white_index(e.white).unwrap());
        m[(r, c)] = &phase(e.black, e.white) * &GaussianRational::real(e.weight.clone());
    }
    KasteleynMatrix { flavor: g.flavor, blacks: g.blacks.clone(), whites: g.whites.clone(), matrix: m }
}

pub fn kasteleyn_aztec(g: &DimerGraph) -> Result<KasteleynMatrix> {
    match g.flavor {
        Flavor::Aztec { .. } => Ok(kasteleyn_matrix(g)),
        _ => Err(Error::Domain("expected an Aztec diamond graph".into())),
    }
}

pub fn kasteleyn_tower(g: &DimerGraph) -> Result<KasteleynMatrix> {
    match g.flavor {
        Flavor::Tower { .. } => Ok(kasteleyn_matrix(g)),
        _ => Err(Error::Domain("expected a tower Aztec diamond graph".into())),
    }
}

/// Stated sign `(-1)^⌊(n+1)/2⌋` of `det K` for the Aztec diamond.
pub fn stated_aztec_sign(n: usize) -> GaussianRational {
    GaussianRational::i_pow(2 * ((n as i64 + 1) / 2))
}

/// Sign `(-1)^n` found by exact computation.
pub fn observed_aztec_sign(n: usize) -> GaussianRational {
    GaussianRational::i_pow(2 * n as i64)
}

/// Stated sign `½(1+(-1)^p)(-1)^n + ½(1-(-1)^p)iⁿ` for the tower.
pub fn stated_tower_sign(n: usize, p: usize) -> GaussianRational {
    if p.is_multiple_of(2) {
        GaussianRational::i_pow(2 * n as i64)
    } else {
        GaussianRational::i_pow(n as i64)
    }
}

impl KasteleynMatrix {
    pub fn det(&self) -> Result<GaussianRational> {
        self.matrix.det()
    }

    /// `det K / |det K|`, one of `1, i, -1, -i`.
    pub fn det_sign(&self) -> Result<GaussianRational> {
        let d = self.det()?;
        d.unit_phase().ok_or_else(|| Error::Consistency(format!("determinant {d} is not a real or imaginary multiple of a unit")))
    }

    /// `|det K|`, the weighted number of dimer coverings.
    pub fn partition_function(&self) -> Result<Rational> {
        let d = self.det()?;
        let s = d.unit_phase().ok_or_else(|| Error::Consistency(format!("determinant {d} has no unit phase")))?;
        Ok((&d / &s).re)
    }

    pub fn inverse(&self) -> Result<ExactMatrix> {
        self.matrix.inverse()
    }

    pub fn entry(&self, black: Coord, white: Coord) -> Option<&GaussianRational> {
        let r = self.blacks.iter().position(|&v| v == black)?;
        let c = self.whites.iter().position(|&v| v == white)?;
        Some(self.matrix.get(r, c))
    }
}

/// `K = [[A, B], [C, D]]` split at the first `m` blacks and whites, with
/// `W̃ = A - B D⁻¹ C`.
#[derive(Clone, Debug)]
pub struct SchurBlocks {
    pub flavor: Flavor,
    pub split: usize,
    pub a: ExactMatrix,
    pub b: ExactMatrix,
    pub c: ExactMatrix,
    pub d: ExactMatrix,
    pub d_inv: ExactMatrix,
    pub tilde_w: ExactMatrix,
}

/// `D⁻¹` by substitution when `D` is triangular, else by peeling rows with
/// a single unknown.
fn invert_d(d: &ExactMatrix) -> Result<ExactMatrix> {
    for o in [Orientation::Lower, Orientation::Upper] {
        if d.is_triangular(o) {
            return d.triangular_inverse(o);
        }
    }
    let n = d.rows();
    // repeatedly pick a row with exactly one column not yet assigned
    let mut col_done = vec![false; n];
    let mut row_done = vec![false; n];
    let mut rows = Vec::with_capacity(n);
    let mut cols = Vec::with_capacity(n);
    for _ in 0..n {
        let pick = (0..n).filter(|&r| !row_done[r]).find_map(|r| {
            let open: Vec<usize> = (0..n).filter(|&c| !col_done[c] && !d.get(r, c).is_zero_value()).collect();
            (open.len() == 1).then(|| (r, open[0]))
        });
        let Some((r, c)) = pick else {
            return d.inverse();
        };
        row_done[r] = true;
        col_done[c] = true;
        rows.push(r);
        cols.push(c);
    }
    // rows[k] has nonzeros only in cols[0..=k]: lower triangular after permuting
    let p = d.permuted(&rows, &cols);
    let pinv = p.triangular_inverse(Orientation::Lower)?;
    let mut out = ExactMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(cols[i], rows[j])] = pinv.get(i, j).clone();
        }
    }
    Ok(out)
}

pub fn schur_blocks(k: &KasteleynMatrix) -> Result<SchurBlocks> {
    let m = k.flavor.split();
    let n = k.matrix.rows();
    let a = k.matrix.block(0, m, 0, m);
    let b = k.matrix.block(0, m, m, n);
    let c = k.matrix.block(m, n, 0, m);
    let d = k.matrix.block(m, n, m, n);
    let det_d = d.det()?;
    if det_d.norm_sqr() != Rational::one() {
        return Err(Error::Consistency(format!("|det D| = |{det_d}| is not 1")));
    }
    let d_inv = invert_d(&d)?;
    let tilde_w = a.sub(&b.mul(&d_inv)?.mul(&c)?)?;
    Ok(SchurBlocks { flavor: k.flavor, split: m, a, b, c, d, d_inv, tilde_w })
}

/// Assembles `K⁻¹` from `W̃⁻¹` and `D⁻¹`.
pub fn inverse_kasteleyn_via_blocks(s: &SchurBlocks) -> Result<ExactMatrix> {
    let wi = s.tilde_w.inverse()?;
    let bd = s.b.mul(&s.d_inv)?;
    let dc = s.d_inv.mul(&s.c)?;
    let top_right = wi.mul(&bd)?.neg();
    let bottom_left = dc.mul(&wi)?.neg();
    let bottom_right = s.d_inv.add(&dc.mul(&wi)?.mul(&bd)?)?;
    let (m, n) = (s.split, s.split + s.d.rows());
    let mut out = ExactMatrix::zeros(n, n);
    out.set_block(0, 0, &wi);
    out.set_block(0, m, &top_right);
    out.set_block(m, 0, &bottom_left);
    out.set_block(m, m, &bottom_right);
    Ok(out)
}

/// Stated Aztec relation `W̃(i,j) = i^{i+j-1} w_ij` (1-based `i`, `j`).
pub fn stated_aztec_tilde_w(w: &Matrix<Rational>) -> ExactMatrix {
    ExactMatrix::from_fn(w.rows(), w.cols(), |i, j| {
        &GaussianRational::i_pow((i + j + 1) as i64) * &GaussianRational::real(w.get(i, j).clone())
    })
}

/// Stated tower sign `i^{i+3j+1}(-1)^n` of `W̃(i,j)`.
pub fn stated_tower_tilde_w_sign(n: usize, i: usize, j: usize) -> GaussianRational {
    GaussianRational::i_pow((i + 3 * j + 1 + 2 * n) as i64)
}

/// Observed tower sign `(-1)^{n+1} i^{1+j-i}` of `W̃(i,j)`.
pub fn observed_tower_tilde_w_sign(n: usize, i: usize, j: usize) -> GaussianRational {
    GaussianRational::i_pow(3 + 2 * n as i64 + j as i64 - i as i64)
}

/// Joint probability that all `edges` (as `(black, white)`) are covered.
pub fn edge_probabilities(k: &KasteleynMatrix, kinv: &ExactMatrix, edges: &[(Coord, Coord)]) -> Result<Rational> {
    let mut idx = Vec::with_capacity(edges.len());
    for &(b, w) in edges {
        let (Some(r), Some(c)) = (k.blacks.iter().position(|&v| v == b), k.whites.iter().position(|&v| v == w)) else {
            return Err(Error::Domain(format!("{b:?}-{w:?} is not a pair of graph vertices")));
        };
        if k.matrix.get(r, c).is_zero_value() {
            return Err(Error::Domain(format!("{b:?}-{w:?} is not an edge")));
        }
        if idx.iter().any(|&(r2, c2)| r2 == r || c2 == c) {
            return Err(Error::Domain(format!("{b:?}-{w:?} shares a vertex with another edge")));
        }
        idx.push((r, c));
    }
    let l = ExactMatrix::from_fn(idx.len(), idx.len(), |i, j| {
        let (bi, wi) = idx[i];
        let wj = idx[j].1;
        k.matrix.get(bi, wi) * kinv.get(wj, bi)
    });
    let d = if idx.is_empty() { GaussianRational::real(Rational::one()) } else { l.det()? };
    if !d.is_real() {
        return Err(Error::Consistency(format!("edge probability {d} is not real")));
    }
    Ok(d.re)
}

/// Labels for export: blacks as row labels, whites as column labels.
pub fn labeled_json(m: &ExactMatrix, rows: &[Coord], cols: &[Coord]) -> serde_json::Value {
    serde_json::json!({
        "rows": rows,
        "cols": cols,
        "entries": m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

/// CSV with a header of column coordinates and one labeled row per line.
pub fn labeled_csv(m: &ExactMatrix, rows: &[Coord], cols: &[Coord]) -> String {
    let lab = |v: &Coord| format!("\"({},{})\"", v.0, v.1);
    let mut s = String::from("\"\"");
    for c in cols {
        s += ",";
        s += &lab(c);
    }
    s += "\n";
    for (r, row) in rows.iter().zip(m.to_rows()) {
        s += &lab(r);
        for x in row {
            s += ",";
            s += &x.to_string();
        }
        s += "\n";
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::build_aztec;
    use crate::weights::WeightField;

    #[test]
    fn size_one_matrix() {
        let g = build_aztec(1, &WeightField::uniform()).unwrap();
        let k = kasteleyn_aztec(&g).unwrap();
        let i = GaussianRational::i();
        let one = GaussianRational::real(Rational::one());
        assert_eq!(k.matrix.to_rows(), vec![vec![i.clone(), one.clone()], vec![one, i]]);
        assert_eq!(k.det().unwrap(), GaussianRational::real(Rational::from_integer((-2).into())));
    }
}
