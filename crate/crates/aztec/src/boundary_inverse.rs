//! Boundary entries of the inverse Kasteleyn matrix of the Aztec diamond by
//! shuffling down to size 1, and the full inverse from them.
//!
//! Each even face `(i, j)` carries edge labels `r = (r₁, r₂, r₃, r₄)` for
//! its NE, SE, SW and NW edges, and `Δ = r₁r₃ + r₂r₄`.

use crate::dynamics::{shuffle_step, ShuffleState};
use crate::error::{Error, Result};
use crate::graphs::build_aztec;
use crate::kasteleyn::{kasteleyn_aztec, schur_blocks, SchurBlocks};
use crate::numerics::{ExactMatrix, GaussianRational, Rational};
use crate::weights::{Coord, FaceField, WeightField};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

pub type EdgeLabels = BTreeMap<Coord, [Rational; 4]>;

/// `(1, 1, b_{i,j}, a_{i,j})` on the faces of the size-`n` diamond.
pub fn initial_labels(w: &WeightField, n: usize) -> Result<EdgeLabels> {
    if n == 0 {
        return Err(Error::Domain("size must be at least 1".into()));
    }
    w.require(0, n as i64 - 1, 0, n as i64 - 1)?;
    let mut out = EdgeLabels::new();
    for i in 0..n as i64 {
        for j in 0..n as i64 {
            out.insert((i, j), [Rational::one(), Rational::one(), w.b(i, j).clone(), w.a(i, j).clone()]);
        }
    }
    Ok(out)
}

pub fn delta(r: &[Rational; 4]) -> Rational {
    &r[0] * &r[2] + &r[1] * &r[3]
}

fn label(r: &EdgeLabels, i: i64, j: i64) -> Result<&[Rational; 4]> {
    r.get(&(i, j)).ok_or_else(|| Error::Extent(format!("no labels at face ({i}, {j})")))
}

/// Labels of the size `n-1` diamond after the square moves, contraction
/// and the unit shift.
pub fn shuffle_labels(r: &EdgeLabels, n: usize) -> Result<EdgeLabels> {
    let mut out = EdgeLabels::new();
    for p in 0..n as i64 - 1 {
        for q in 0..n as i64 - 1 {
            let part = |i: i64, j: i64, slot: usize| -> Result<Rational> {
                let x = label(r, i, j)?;
                Ok(&x[slot] / delta(x))
            };
            out.insert((p, q), [part(p + 1, q + 1, 0)?, part(p + 1, q, 1)?, part(p, q, 2)?, part(p, q + 1, 3)?]);
        }
    }
    Ok(out)
}

/// `F_{2i,j} = r₂r₄/(r₁r₃)` and
/// `F_{2i+1,j} = r₁(i,j)r₃(i+1,j+1)/(r₄(i+1,j)r₂(i,j+1))`.
pub fn faces_of_labels(r: &EdgeLabels, n: usize) -> Result<FaceField> {
    let mut values = BTreeMap::new();
    let n = n as i64;
    for i in 0..n {
        for j in 0..n {
            let x = label(r, i, j)?;
            values.insert((2 * i, j), &x[1] * &x[3] / (&x[0] * &x[2]));
        }
    }
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let v = &label(r, i, j)?[0] * &label(r, i + 1, j + 1)?[2] / (&label(r, i + 1, j)?[3] * &label(r, i, j + 1)?[1]);
            values.insert((2 * i + 1, j), v);
        }
    }
    Ok(FaceField::from_map(values))
}

/// One level of the recurrence.
#[derive(Clone, Debug)]
pub struct RecurrenceFrame {
    pub size: usize,
    pub labels: EdgeLabels,
    pub faces: FaceField,
    /// `(W_k)⁻¹` as exact Gaussian rationals (all real).
    pub w_inverse: ExactMatrix,
}

/// Frames from size `n` down to 1. The face field of every level is
/// checked against the shuffle of the level above.
pub fn recurrence_frames(w: &WeightField, n: usize) -> Result<Vec<RecurrenceFrame>> {
    let mut labels = vec![initial_labels(w, n)?];
    for k in (2..=n).rev() {
        let next = shuffle_labels(labels.last().unwrap(), k)?;
        labels.push(next);
    }
    let mut faces = Vec::with_capacity(n);
    for (idx, r) in labels.iter().enumerate() {
        faces.push(faces_of_labels(r, n - idx)?);
    }
    for idx in 1..faces.len() {
        // F^{(k-1)}_{m,j} = F̂_{m,j+1}
        let shuffled = shuffle_step(&ShuffleState::new(faces[idx - 1].clone()))?.faces.shifted(0, -1);
        let (count, bad) = faces[idx].compare(&shuffled);
        if let Some(c) = bad {
            return Err(Error::Consistency(format!("shuffled face {c:?} disagrees at size {}", n - idx)));
        }
        if count == 0 {
            return Err(Error::Consistency(format!("no shuffled faces to compare at size {}", n - idx)));
        }
    }
    // ratios R_k(i,j) = Z(G∖{w_i,b_j})/Z(G), from size 1 upward
    let mut ratios: Vec<BTreeMap<(usize, usize), Rational>> = Vec::new();
    for idx in (0..labels.len()).rev() {
        let k = n - idx;
        let r = &labels[idx];
        let prev = ratios.last();
        let mut out = BTreeMap::new();
        for i in 1..=k {
            for j in 1..=k {
                let mut s = Rational::zero();
                if let Some(prev) = prev {
                    let cj = label(r, 0, j as i64 - 1)?;
                    let di = label(r, i as i64 - 1, 0)?;
                    for kk in 0..2usize {
                        for l in 0..2usize {
                            let Some(rp) = prev.get(&(i.wrapping_sub(kk), j.wrapping_sub(l))) else {
                                continue;
                            };
                            let c = if l == 1 { &cj[0] } else { &cj[1] } / delta(cj);
                            let d = if kk == 1 { &di[0] } else { &di[3] } / delta(di);
                            s += c * d * rp;
                        }
                    }
                }
                if (i, j) == (1, 1) {
                    let x = label(r, 0, 0)?;
                    s += &x[0] / delta(x);
                }
                out.insert((i, j), s);
            }
        }
        ratios.push(out);
    }
    ratios.reverse();
    let mut frames = Vec::with_capacity(n);
    for (idx, (r, f)) in labels.into_iter().zip(faces).enumerate() {
        let k = n - idx;
        let rat = &ratios[idx];
        // (W_k)⁻¹(i,j) = (-1)^{i+j} R_k(i,j)
        let w_inverse = ExactMatrix::from_fn(k, k, |i, j| {
            let v = rat[&(i + 1, j + 1)].clone();
            GaussianRational::real(if (i + j) % 2 == 0 { v } else { -v })
        });
        frames.push(RecurrenceFrame { size: k, labels: r, faces: f, w_inverse });
    }
    Ok(frames)
}

/// `(W_n^Az)⁻¹` from the recurrence.
pub fn w_inverse_recurrence(w: &WeightField, n: usize) -> Result<ExactMatrix> {
    Ok(recurrence_frames(w, n)?.swap_remove(0).w_inverse)
}

/// `K⁻¹((2i-1,0),(0,2j-1)) = i^{1-i-j}(W_n)⁻¹(i,j)`, `1 ≤ i, j ≤ n`.
pub fn boundary_block(w_inv: &ExactMatrix) -> ExactMatrix {
    ExactMatrix::from_fn(w_inv.rows(), w_inv.cols(), |i, j| &GaussianRational::i_pow(-(i as i64) - j as i64 - 1) * w_inv.get(i, j))
}

/// `Z_k = ∏Δ · Z_{k-1}` for `k = 1..n`, with `Z_0 = 1`. Entry `k-1` is the
/// partition function of the size-`k` level under its own labels, so the
/// last entry is `Z_n` of the original weights.
pub fn partition_chain(w: &WeightField, n: usize) -> Result<Vec<Rational>> {
    let mut labels = vec![initial_labels(w, n)?];
    for k in (2..=n).rev() {
        let next = shuffle_labels(labels.last().unwrap(), k)?;
        labels.push(next);
    }
    let mut z = Rational::one();
    let mut out = Vec::with_capacity(n);
    for r in labels.iter().rev() {
        z *= r.values().map(delta).product::<Rational>();
        out.push(z.clone());
    }
    Ok(out)
}

/// Full `K⁻¹` from the Schur blocks and a given top-left block `W̃⁻¹`, with
/// no consistency check.
pub fn assemble_inverse(s: &SchurBlocks, tilde_w_inv: &ExactMatrix) -> Result<ExactMatrix> {
    let bd = s.b.mul(&s.d_inv)?;
    let dc = s.d_inv.mul(&s.c)?;
    let top_right = tilde_w_inv.mul(&bd)?.neg();
    let bottom_left = dc.mul(tilde_w_inv)?.neg();
    let bottom_right = s.d_inv.add(&dc.mul(tilde_w_inv)?.mul(&bd)?)?;
    let (m, total) = (s.split, s.split + s.d.rows());
    let mut out = ExactMatrix::zeros(total, total);
    out.set_block(0, 0, tilde_w_inv);
    out.set_block(0, m, &top_right);
    out.set_block(m, 0, &bottom_left);
    out.set_block(m, m, &bottom_right);
    Ok(out)
}

/// `K_n⁻¹` from `(W_n)⁻¹`, indexed `(white, black)` in the Aztec ordering.
pub fn propagate_full_inverse(w: &WeightField, n: usize, w_inv: &ExactMatrix) -> Result<ExactMatrix> {
    if w_inv.rows() != n || w_inv.cols() != n {
        return Err(Error::Dimension(format!("expected a {n}×{n} inverse, got {}×{}", w_inv.rows(), w_inv.cols())));
    }
    let k = kasteleyn_aztec(&build_aztec(n, w)?)?;
    let s = schur_blocks(&k)?;
    let tilde_inv = boundary_block(w_inv);
    if !s.tilde_w.mul(&tilde_inv)?.is_identity() {
        return Err(Error::Consistency("the given inverse does not match the weights".into()));
    }
    assemble_inverse(&s, &tilde_inv)
}
