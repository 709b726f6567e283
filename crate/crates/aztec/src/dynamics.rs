//! Square moves, the domino shuffle on face weights and the refactorization
//! maps on transition parameters.

use crate::error::{Error, Result};
use crate::numerics::Rational;
use crate::transitions::{diag_operator, phi_operator, psi_operator, WindowedOperator};
use crate::weights::{faces_from_weights, Coord, Extent, FaceField, WeightField};
use num_traits::One;
use serde::Serialize;
use std::collections::BTreeMap;

/// Square move on edge weights `(a, b, c, d)` read around the face:
/// returns `(c, d, a, b)/Δ` and `Δ = ac + bd`.
pub fn square_move_edges(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> ([Rational; 4], Rational) {
    let delta = a * c + b * d;
    ([c / &delta, d / &delta, a / &delta, b / &delta], delta)
}

/// Square move on face weights: the center becomes `1/F`, the neighbors
/// `(ne, se, sw, nw)` become `(ne(1+F), se/(1+1/F), sw(1+F), nw/(1+1/F))`.
pub fn square_move_local(f: &Rational, neighbors: &[Rational; 4]) -> (Rational, [Rational; 4]) {
    let one = Rational::one();
    let up = &one + f;
    let down = &one + f.recip();
    let [ne, se, sw, nw] = neighbors;
    (f.recip(), [ne * &up, se / &down, sw * &up, nw / &down])
}

/// The neighbor tuple seen from the moved face, which is turned a quarter.
pub fn quarter_turn(neighbors: &[Rational; 4]) -> [Rational; 4] {
    let [ne, se, sw, nw] = neighbors.clone();
    [se, sw, nw, ne]
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShuffleState {
    pub faces: FaceField,
    pub generation: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamState {
    pub w: WeightField,
    pub generation: usize,
}

impl ParamState {
    pub fn new(w: WeightField) -> Self {
        ParamState { w, generation: 0 }
    }

    pub fn faces(&self) -> ShuffleState {
        ShuffleState { faces: faces_from_weights(&self.w), generation: self.generation }
    }
}

impl ShuffleState {
    pub fn new(faces: FaceField) -> Self {
        ShuffleState { faces, generation: 0 }
    }
}

/// Applies `rule` at every face where all its inputs exist. Periodic
/// fields are updated over one period.
fn face_map(f: &FaceField, rule: impl Fn(&dyn Fn(i64, i64) -> Option<Rational>, i64, i64) -> Option<Rational>) -> Result<FaceField> {
    let get = |k: i64, j: i64| f.get(k, j).cloned();
    match f.periodic_dims() {
        Some((q, p)) => {
            let mut missing = None;
            let out = FaceField::periodic_from_fn(q, p, |k, j| {
                rule(&get, k, j).unwrap_or_else(|| {
                    missing = Some((k, j));
                    Rational::one()
                })
            });
            match missing {
                Some(c) => Err(Error::Consistency(format!("periodic face update undefined at {c:?}"))),
                None => Ok(out),
            }
        }
        None => {
            let keys: Vec<Coord> = f.keys().collect();
            let (Some(k_lo), Some(k_hi)) = (keys.iter().map(|c| c.0).min(), keys.iter().map(|c| c.0).max()) else {
                return Err(Error::Extent("empty face field".into()));
            };
            let j_lo = keys.iter().map(|c| c.1).min().unwrap();
            let j_hi = keys.iter().map(|c| c.1).max().unwrap();
            let mut values = BTreeMap::new();
            for k in k_lo - 1..=k_hi + 1 {
                for j in j_lo - 1..=j_hi + 1 {
                    if let Some(v) = rule(&get, k, j) {
                        values.insert((k, j), v);
                    }
                }
            }
            if values.is_empty() {
                return Err(Error::Extent("face window exhausted".into()));
            }
            Ok(FaceField::from_map(values))
        }
    }
}

fn plus_one(x: &Rational) -> Rational {
    x + Rational::one()
}

fn plus_inv(x: &Rational) -> Rational {
    x.recip() + Rational::one()
}

/// Domino shuffle: `F̂_{2i+1,j} = 1/F_{2i+2,j}` and
/// `F̂_{2i,j} = F_{2i+1,j-1}(1+F_{2i+2,j})/(1+1/F_{2i+2,j-1})·(1+F_{2i,j-1})/(1+1/F_{2i,j})`.
pub fn shuffle_step(s: &ShuffleState) -> Result<ShuffleState> {
    let faces = face_map(&s.faces, |f, k, j| {
        if k.rem_euclid(2) == 1 {
            Some(f(k + 1, j)?.recip())
        } else {
            let v =
                f(k + 1, j - 1)? * plus_one(&f(k + 2, j)?) / plus_inv(&f(k + 2, j - 1)?) * plus_one(&f(k, j - 1)?) / plus_inv(&f(k, j)?);
            Some(v)
        }
    })?;
    Ok(ShuffleState { faces, generation: s.generation + 1 })
}

/// Reverse shuffle: `F̌_{2i,j} = 1/F_{2i-1,j}` and
/// `F̌_{2i+1,j} = F_{2i,j+1}(1+F_{2i-1,j+1})/(1+1/F_{2i+1,j+1})·(1+F_{2i+1,j})/(1+1/F_{2i-1,j})`.
pub fn reverse_shuffle_step(s: &ShuffleState) -> Result<ShuffleState> {
    let faces = face_map(&s.faces, |f, k, j| {
        if k.rem_euclid(2) == 0 {
            Some(f(k - 1, j)?.recip())
        } else {
            let v =
                f(k - 1, j + 1)? * plus_one(&f(k - 2, j + 1)?) / plus_inv(&f(k, j + 1)?) * plus_one(&f(k, j)?) / plus_inv(&f(k - 2, j)?);
            Some(v)
        }
    })?;
    Ok(ShuffleState { faces, generation: s.generation + 1 })
}

/// Builds a field of the same kind as `w` on the given window, or over one
/// period when `w` is periodic.
fn remap(w: &WeightField, window: Option<(i64, i64, i64, i64)>, f: impl Fn(i64, i64) -> (Rational, Rational)) -> Result<WeightField> {
    match w.extent() {
        Extent::Periodic { q, p } => {
            let mut a = vec![Vec::with_capacity(p); q];
            let mut b = vec![Vec::with_capacity(p); q];
            for i in 0..q {
                for j in 0..p {
                    let (x, y) = f(i as i64, j as i64);
                    a[i].push(x);
                    b[i].push(y);
                }
            }
            WeightField::periodic(a, b)
        }
        Extent::Window { .. } => {
            let (i_lo, i_hi, j_lo, j_hi) = window.expect("window extent");
            if i_hi < i_lo || j_hi < j_lo {
                return Err(Error::Extent("weight window exhausted by the refactorization step".into()));
            }
            WeightField::window_from_fn(i_lo, i_hi, j_lo, j_hi, f)
        }
    }
}

/// `â_{i,j} = a_{i,j}(a_{i+1,j}+b_{i+1,j})/(a_{i,j}+b_{i,j})`,
/// `b̂_{i,j} = b_{i,j-1}(a_{i+1,j-1}+b_{i+1,j-1})/(a_{i,j-1}+b_{i,j-1})`.
/// A window `[i_lo, i_hi] × [j_lo, j_hi]` shrinks to `[i_lo, i_hi-1] × [j_lo+1, j_hi]`.
pub fn hat_weights(w: &WeightField) -> Result<WeightField> {
    let window = match w.extent() {
        Extent::Window { i_lo, i_hi, j_lo, j_hi } => Some((i_lo, i_hi - 1, j_lo + 1, j_hi)),
        Extent::Periodic { .. } => None,
    };
    let s = |i: i64, j: i64| w.a(i, j) + w.b(i, j);
    remap(w, window, |i, j| (w.a(i, j) * s(i + 1, j) / s(i, j), w.b(i, j - 1) * s(i + 1, j - 1) / s(i, j - 1)))
}

/// `ǎ_{i,j} = a_{i,j} r`, `b̌_{i,j} = b_{i,j+1} r` with
/// `r = (a_{i-1,j}+b_{i-1,j+1})/(a_{i,j}+b_{i,j+1})`. A window shrinks to
/// `[i_lo+1, i_hi] × [j_lo, j_hi-1]`.
pub fn check_weights(w: &WeightField) -> Result<WeightField> {
    let window = match w.extent() {
        Extent::Window { i_lo, i_hi, j_lo, j_hi } => Some((i_lo + 1, i_hi, j_lo, j_hi - 1)),
        Extent::Periodic { .. } => None,
    };
    remap(w, window, |i, j| {
        let r = (w.a(i - 1, j) + w.b(i - 1, j + 1)) / (w.a(i, j) + w.b(i, j + 1));
        (w.a(i, j) * &r, w.b(i, j + 1) * &r)
    })
}

pub fn hat_step(s: &ParamState) -> Result<ParamState> {
    Ok(ParamState { w: hat_weights(&s.w)?, generation: s.generation + 1 })
}

pub fn check_step(s: &ParamState) -> Result<ParamState> {
    Ok(ParamState { w: check_weights(&s.w)?, generation: s.generation + 1 })
}

/// Both sides of `Φ(a_i,b_i)Ψ = X_i Ψ Φ(â_i,b̂_i) X_{i+1}⁻¹` with
/// `X_i = D(a_i + b_i)`, on the window `[lo, hi]`.
pub fn hat_identity_sides(w: &WeightField, i: i64, lo: i64, hi: i64) -> Result<(WindowedOperator, WindowedOperator)> {
    let hat = hat_weights(w)?;
    let col = |f: &WeightField, c: i64| {
        let f = f.clone();
        move |j: i64| Some(f.get_a(c, j)? + f.get_b(c, j)?)
    };
    let left = phi_operator(|j| w.get_a(i, j).cloned(), |j| w.get_b(i, j).cloned(), lo, hi)?.mul(&psi_operator(lo, hi)?)?;
    let x_next = col(w, i + 1);
    let right = diag_operator(col(w, i), lo, hi)?
        .mul(&psi_operator(lo, hi)?)?
        .mul(&phi_operator(|j| hat.get_a(i, j).cloned(), |j| hat.get_b(i, j).cloned(), lo, hi)?)?
        .mul(&diag_operator(|j| x_next(j).map(|x| x.recip()), lo, hi)?)?;
    Ok((left, right))
}

/// Both sides of `Ψ Φ(a_i,b_i) = Y_{i-1}⁻¹ Φ(ǎ_i,b̌_i) Ψ Y_i` with
/// `Y_i = D(a_{i,k} + b_{i,k+1})`, on the window `[lo, hi]`.
pub fn check_identity_sides(w: &WeightField, i: i64, lo: i64, hi: i64) -> Result<(WindowedOperator, WindowedOperator)> {
    let check = check_weights(w)?;
    let y = |c: i64| {
        let w = w.clone();
        move |k: i64| Some(w.get_a(c, k)? + w.get_b(c, k + 1)?)
    };
    let y_prev = y(i - 1);
    let left = psi_operator(lo, hi)?.mul(&phi_operator(|j| w.get_a(i, j).cloned(), |j| w.get_b(i, j).cloned(), lo, hi)?)?;
    let right = diag_operator(|k| y_prev(k).map(|x| x.recip()), lo, hi)?
        .mul(&phi_operator(|j| check.get_a(i, j).cloned(), |j| check.get_b(i, j).cloned(), lo, hi)?)?
        .mul(&psi_operator(lo, hi)?)?
        .mul(&diag_operator(y(i), lo, hi)?)?;
    Ok((left, right))
}

/// Comparison of the two dynamics at one generation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenerationCheck {
    pub generation: usize,
    pub compared: usize,
    pub witness: Option<Coord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub generations: Vec<GenerationCheck>,
}

impl EquivalenceReport {
    pub fn all_equal(&self) -> bool {
        self.generations.iter().all(|g| g.witness.is_none() && g.compared > 0)
    }
}

/// Runs the shuffle on faces and the hat map on parameters side by side.
pub fn equivalence_report(w: &WeightField, steps: usize) -> Result<EquivalenceReport> {
    let mut params = ParamState::new(w.clone());
    let mut shuffle = params.faces();
    let mut generations = Vec::with_capacity(steps);
    for _ in 0..steps {
        params = hat_step(&params)?;
        shuffle = shuffle_step(&shuffle)?;
        let (compared, witness) = faces_from_weights(&params.w).compare(&shuffle.faces);
        generations.push(GenerationCheck { generation: params.generation, compared, witness });
    }
    Ok(EquivalenceReport { generations })
}

/// Smallest `t ≤ max` with `shuffleᵗ(F) = F`, for periodic fields.
pub fn orbit_period(f: &FaceField, max: usize) -> Result<Option<usize>> {
    if f.periodic_dims().is_none() {
        return Err(Error::Domain("orbit periods need a periodic face field".into()));
    }
    let mut s = ShuffleState::new(f.clone());
    for t in 1..=max {
        s = shuffle_step(&s)?;
        if s.faces == *f {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Face fields of an orbit as JSON, one entry per generation. With `face`
/// set, only that face's values are emitted.
pub fn orbit_json(orbit: &[ShuffleState], face: Option<Coord>) -> serde_json::Value {
    use crate::numerics::rational_to_string;
    let render = |f: &FaceField| -> serde_json::Value {
        match face {
            Some((k, j)) => f.get(k, j).map_or(serde_json::Value::Null, |v| rational_to_string(v).into()),
            None => f.values().iter().map(|(c, v)| serde_json::json!({ "k": c.0, "j": c.1, "value": rational_to_string(v) })).collect(),
        }
    };
    orbit.iter().map(|s| serde_json::json!({ "generation": s.generation, "faces": render(&s.faces) })).collect()
}
