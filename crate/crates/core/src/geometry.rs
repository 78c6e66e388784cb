//! Ordered bases of ℝ^d, their dual bases and lattices, and the
//! phase-split constructions used on ℝ^{2d}.
//!
//! A basis `E = {e_1, …, e_d}` is stored as the column matrix `T_E`, so that
//! `T_E · n = n_1 e_1 + ⋯ + n_d e_d`. The dual basis satisfies
//! `⟨e_j, e'_k⟩ = 2π δ_jk`, i.e. `T_{E'} = 2π (T_E^{-1})^t`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest condition number accepted for a basis matrix.
pub const MAX_CONDITION: f64 = 1e8;

/// An invertible ordered basis of ℝ^d.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderedBasis {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisDoc {
    dim: usize,
    columns: Vec<Vec<f64>>,
}

impl Serialize for OrderedBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BasisDoc {
            dim: self.dim(),
            columns: self.columns(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrderedBasis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = BasisDoc::deserialize(d)?;
        if doc.columns.len() != doc.dim {
            return Err(serde::de::Error::custom(format!(
                "expected {} columns, found {}",
                doc.dim,
                doc.columns.len()
            )));
        }
        OrderedBasis::from_columns(doc.columns).map_err(serde::de::Error::custom)
    }
}

impl OrderedBasis {
    /// Builds a basis from its column vectors `e_1, …, e_d`.
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let d = columns.len();
        if d == 0 {
            return Err(Error::InvalidParameter("basis must have at least one vector".into()));
        }
        if columns.iter().any(|c| c.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "every basis vector must have {d} entries"
            )));
        }
        let matrix = DMatrix::from_fn(d, d, |i, j| columns[j][i]);
        Self::from_matrix(matrix)
    }

    /// Builds a basis from the matrix `T_E` (columns are basis vectors).
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch("basis matrix must be square".into()));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularBasis("non-finite entry".into()));
        }
        let det = matrix.determinant();
        let scale: f64 = matrix.column_iter().map(|c| c.norm()).product();
        if scale == 0.0 || det.abs() <= 1e-12 * scale {
            return Err(Error::SingularBasis(format!("determinant {det:.3e}")));
        }
        let sv = matrix.clone().singular_values();
        let cond = sv.max() / sv.min();
        if !(cond < MAX_CONDITION) {
            return Err(Error::SingularBasis(format!("condition number {cond:.3e}")));
        }
        let inverse = matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::SingularBasis("matrix not invertible".into()))?;
        Ok(Self { matrix, inverse })
    }

    pub fn standard(d: usize) -> Self {
        Self::diagonal(&vec![1.0; d]).expect("identity is a valid basis")
    }

    /// Basis `{s_1 e_1, …, s_d e_d}` scaled from the standard one.
    pub fn diagonal(scales: &[f64]) -> Result<Self> {
        let d = scales.len();
        let m = DMatrix::from_fn(d, d, |i, j| if i == j { scales[i] } else { 0.0 });
        Self::from_matrix(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse_matrix(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.matrix.column(k).iter().copied().collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|k| self.column(k)).collect()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    /// Lebesgue volume of the cell κ(E) spanned by the basis.
    pub fn cell_volume(&self) -> f64 {
        self.determinant().abs()
    }

    /// `T_E · u`.
    pub fn to_point(&self, coords: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.matrix[(i, j)] * coords[j]).sum())
            .collect()
    }

    /// Lattice point `n_1 e_1 + ⋯ + n_d e_d`.
    pub fn lattice_point(&self, n: &[i64]) -> Vec<f64> {
        let u: Vec<f64> = n.iter().map(|&v| v as f64).collect();
        self.to_point(&u)
    }

    /// Coordinates `u` with `T_E · u = x`.
    pub fn to_coords(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.inverse[(i, j)] * x[j]).sum())
            .collect()
    }

    /// True when every basis vector is parallel to a coordinate axis, in order.
    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        let scale = self.matrix.amax();
        (0..d).all(|i| (0..d).all(|j| i == j || self.matrix[(i, j)].abs() <= 1e-14 * scale))
    }

    /// Diagonal entries; meaningful when [`is_diagonal`](Self::is_diagonal).
    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.matrix[(k, k)]).collect()
    }

    /// Entrywise relative comparison.
    pub fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let scale = self.matrix.amax().max(other.matrix.amax());
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .all(|(a, b)| (a - b).abs() <= rel * scale)
    }

    /// Largest deviation `max_{j,k} |⟨e_j, e'_k⟩ − 2π δ_jk|`.
    pub fn duality_defect(&self, dual: &Self) -> f64 {
        let g = self.matrix.transpose() * &dual.matrix;
        let d = self.dim();
        let mut worst = 0.0f64;
        for j in 0..d {
            for k in 0..d {
                let target = if j == k { 2.0 * PI } else { 0.0 };
                worst = worst.max((g[(j, k)] - target).abs());
            }
        }
        worst
    }

    pub fn is_standard(&self) -> bool {
        self.approx_eq(&Self::standard(self.dim()), 1e-15)
    }
}

/// The dual basis `E'` with `⟨e_j, e'_k⟩ = 2π δ_jk`.
pub fn dual_basis(basis: &OrderedBasis) -> OrderedBasis {
    let m = basis.inverse.transpose() * (2.0 * PI);
    OrderedBasis::from_matrix(m).expect("dual of a valid basis is valid")
}

/// The basis `E1 × E2` of ℝ^{2d}: first `d` vectors in `V1 = ℝ^d × 0`, last `d`
/// in `V2 = 0 × ℝ^d`.
pub fn product_basis(e1: &OrderedBasis, e2: &OrderedBasis) -> Result<OrderedBasis> {
    let d = e1.dim();
    if e2.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "product of bases of dimension {} and {}",
            d,
            e2.dim()
        )));
    }
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(e1.matrix());
    m.view_mut((d, d), (d, d)).copy_from(e2.matrix());
    OrderedBasis::from_matrix(m)
}

/// Swaps the two `d`-blocks of a basis of ℝ^{2d}: `e_{d+1}, …, e_{2d}, e_1, …, e_d`.
pub fn rotate_half(basis: &OrderedBasis) -> Result<OrderedBasis> {
    let n = basis.dim();
    if n % 2 != 0 {
        return Err(Error::DimensionMismatch(format!("rotate_half needs even dimension, got {n}")));
    }
    let d = n / 2;
    let cols = basis.columns();
    let rotated: Vec<Vec<f64>> = cols[d..].iter().chain(cols[..d].iter()).cloned().collect();
    OrderedBasis::from_columns(rotated)
}

/// Extracts the blocks `(π1(E0), π2(E∖E0))` when the columns selected by `mask`
/// lie in `V1` and the rest in `V2`.
fn split_blocks(basis: &OrderedBasis, mask: &[bool]) -> std::result::Result<(Vec<Vec<f64>>, Vec<Vec<f64>>), String> {
    let n = basis.dim();
    let d = n / 2;
    let scale = basis.matrix().amax();
    let tol = 1e-10 * scale;
    let mut first = Vec::new();
    let mut second = Vec::new();
    for (k, &sel) in mask.iter().enumerate() {
        let c = basis.column(k);
        if sel {
            if c[d..].iter().any(|v| v.abs() > tol) {
                return Err(format!("vector {} of E0 has a frequency component", k + 1));
            }
            first.push(c[..d].to_vec());
        } else {
            if c[..d].iter().any(|v| v.abs() > tol) {
                return Err(format!("vector {} of E∖E0 has a position component", k + 1));
            }
            second.push(c[d..].to_vec());
        }
    }
    Ok((first, second))
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}

/// Finds `perm` with `e2[perm[k]] = dual(e1)[k]` (relative tolerance `rel`).
///
/// Exhaustive for `d ≤ 4`; greedy nearest-vector matching above that.
pub fn permuted_dual(e1: &OrderedBasis, e2: &OrderedBasis, rel: f64) -> Option<Vec<usize>> {
    let d = e1.dim();
    if e2.dim() != d {
        return None;
    }
    let dual = dual_basis(e1);
    let scale = dual.matrix().amax().max(e2.matrix().amax());
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let dual_cols = dual.columns();
    let e2_cols = e2.columns();
    if d <= 4 {
        permutations(d).into_iter().find(|perm| {
            (0..d).all(|k| dist(&dual_cols[k], &e2_cols[perm[k]]) <= rel * scale)
        })
    } else {
        let mut used = vec![false; d];
        let mut perm = Vec::with_capacity(d);
        for target in &dual_cols {
            let (best, err) = (0..d)
                .filter(|&j| !used[j])
                .map(|j| (j, dist(target, &e2_cols[j])))
                .min_by(|a, b| a.1.total_cmp(&b.1))?;
            if err > rel * scale {
                return None;
            }
            used[best] = true;
            perm.push(best);
        }
        Some(perm)
    }
}

/// A basis of ℝ^{2d} recognised as phase split with respect to a subset `E0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSplitDescriptor {
    pub basis: OrderedBasis,
    /// Which of the `2d` vectors belong to `E0`, reported verbatim.
    pub mask: Vec<bool>,
    /// `π1(E0)` in inherited order.
    pub first: OrderedBasis,
    /// `π2(E∖E0)` in inherited order.
    pub second: OrderedBasis,
    /// `second[permutation[k]] = dual(first)[k]`.
    pub permutation: Vec<usize>,
    /// `E0` is made of the first `d` vectors.
    pub strongly: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhaseSplit {
    Accepted(PhaseSplitDescriptor),
    Rejected(String),
}

impl PhaseSplit {
    pub fn is_accepted(&self) -> bool {
        matches!(self, PhaseSplit::Accepted(_))
    }

    pub fn descriptor(&self) -> Option<&PhaseSplitDescriptor> {
        match self {
            PhaseSplit::Accepted(d) => Some(d),
            PhaseSplit::Rejected(_) => None,
        }
    }
}

/// Decides whether `basis` (of ℝ^{2d}) is phase split with respect to the
/// vectors selected by `mask`.
pub fn is_phase_split(basis: &OrderedBasis, mask: &[bool]) -> PhaseSplit {
    let n = basis.dim();
    if n % 2 != 0 {
        return PhaseSplit::Rejected(format!("dimension {n} is odd"));
    }
    if mask.len() != n {
        return PhaseSplit::Rejected(format!("mask has {} entries, expected {n}", mask.len()));
    }
    let d = n / 2;
    let selected = mask.iter().filter(|&&b| b).count();
    if selected != d {
        return PhaseSplit::Rejected(format!("mask selects {selected} vectors, expected {d}"));
    }
    let (first, second) = match split_blocks(basis, mask) {
        Ok(b) => b,
        Err(reason) => return PhaseSplit::Rejected(reason),
    };
    let (first, second) = match (OrderedBasis::from_columns(first), OrderedBasis::from_columns(second)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return PhaseSplit::Rejected("projected blocks do not span ℝ^d".into()),
    };
    match permuted_dual(&first, &second, 1e-10) {
        Some(permutation) => PhaseSplit::Accepted(PhaseSplitDescriptor {
            basis: basis.clone(),
            mask: mask.to_vec(),
            strongly: mask.iter().take(d).all(|&b| b),
            first,
            second,
            permutation,
        }),
        None => PhaseSplit::Rejected("projected blocks are not permuted dual bases".into()),
    }
}

/// How the points of a [`LatticePatch`] were selected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Closed box `[lo_i, hi_i]` in standard coordinates.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Closed ball in standard coordinates.
    Ball { center: Vec<f64>, radius: f64 },
}

impl Selection {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Selection::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| *a <= *v && *v <= *b),
            Selection::Ball { center, radius } => {
                let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                r2 <= radius * radius
            }
        }
    }
}

/// Finite set of lattice points of `Λ_E`, stored by integer coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticePatch {
    pub basis: OrderedBasis,
    pub points: Vec<Vec<i64>>,
    pub selection: Selection,
}

impl LatticePatch {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|n| self.basis.lattice_point(n)).collect()
    }
}

fn enumerate_box(lo: &[i64], hi: &[i64], mut visit: impl FnMut(&[i64])) {
    let d = lo.len();
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return;
    }
    let mut n = lo.to_vec();
    loop {
        visit(&n);
        let mut k = d;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if n[k] < hi[k] {
                n[k] += 1;
                for m in n.iter_mut().skip(k + 1).zip(lo.iter().skip(k + 1)) {
                    *m.0 = *m.1;
                }
                break;
            }
        }
    }
}

fn lattice_points_in(basis: &OrderedBasis, selection: Selection, corners_lo: &[f64], corners_hi: &[f64]) -> LatticePatch {
    let d = basis.dim();
    // Integer bounding box from the images of the region's corners.
    let mut nlo = vec![i64::MAX; d];
    let mut nhi = vec![i64::MIN; d];
    for mask in 0..(1usize << d) {
        let corner: Vec<f64> = (0..d)
            .map(|k| if mask >> k & 1 == 1 { corners_hi[k] } else { corners_lo[k] })
            .collect();
        let u = basis.to_coords(&corner);
        for k in 0..d {
            nlo[k] = nlo[k].min(u[k].floor() as i64 - 1);
            nhi[k] = nhi[k].max(u[k].ceil() as i64 + 1);
        }
    }
    let mut points = Vec::new();
    enumerate_box(&nlo, &nhi, |n| {
        if selection.contains(&basis.lattice_point(n)) {
            points.push(n.to_vec());
        }
    });
    LatticePatch {
        basis: basis.clone(),
        points,
        selection,
    }
}

/// All `n ∈ ℤ^d` with `T_E n` inside the closed box `[lo, hi]`.
pub fn lattice_points(basis: &OrderedBasis, lo: &[f64], hi: &[f64]) -> Result<LatticePatch> {
    let d = basis.dim();
    if lo.len() != d || hi.len() != d {
        return Err(Error::DimensionMismatch(format!("region must have {d} bounds")));
    }
    if lo.iter().chain(hi).any(|v| !v.is_finite()) {
        return Err(Error::UnboundedRegion(format!("box [{lo:?}, {hi:?}]")));
    }
    let selection = Selection::Box {
        lo: lo.to_vec(),
        hi: hi.to_vec(),
    };
    Ok(lattice_points_in(basis, selection, lo, hi))
}

/// All lattice points within distance `radius` of `center`.
pub fn lattice_points_ball(basis: &OrderedBasis, center: &[f64], radius: f64) -> Result<LatticePatch> {
    let d = basis.dim();
    if center.len() != d {
        return Err(Error::DimensionMismatch(format!("center must have {d} entries")));
    }
    if !radius.is_finite() || center.iter().any(|v| !v.is_finite()) {
        return Err(Error::UnboundedRegion(format!("ball of radius {radius}")));
    }
    let lo: Vec<f64> = center.iter().map(|c| c - radius).collect();
    let hi: Vec<f64> = center.iter().map(|c| c + radius).collect();
    let selection = Selection::Ball {
        center: center.to_vec(),
        radius,
    };
    Ok(lattice_points_in(basis, selection, &lo, &hi))
}

/// Coordinates of `x` in the basis `E`.
pub fn to_basis_coords(x: &[f64], basis: &OrderedBasis) -> Vec<f64> {
    basis.to_coords(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis2(a: f64, b: f64, c: f64, d: f64) -> OrderedBasis {
        OrderedBasis::from_columns(vec![vec![a, c], vec![b, d]]).unwrap()
    }

    #[test]
    fn dual_of_scalar_basis() {
        let e = OrderedBasis::diagonal(&[2.0]).unwrap();
        let dual = dual_basis(&e);
        assert!((dual.column(0)[0] - PI).abs() < 1e-15);
    }

    #[test]
    fn dual_of_standard_is_two_pi() {
        let dual = dual_basis(&OrderedBasis::standard(2));
        let expected = OrderedBasis::diagonal(&[2.0 * PI, 2.0 * PI]).unwrap();
        assert!(dual.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn dual_matches_inverse_transpose() {
        // Inverse of [[2,1],[0.5,3]] written out by hand: det = 5.5.
        let e = basis2(2.0, 1.0, 0.5, 3.0);
        let det = 2.0 * 3.0 - 1.0 * 0.5;
        let inv = [[3.0 / det, -1.0 / det], [-0.5 / det, 2.0 / det]];
        let dual = dual_basis(&e);
        for i in 0..2 {
            for j in 0..2 {
                let expected = 2.0 * PI * inv[j][i];
                assert!((dual.matrix()[(i, j)] - expected).abs() < 1e-12 * expected.abs().max(1.0));
            }
        }
        assert!(e.duality_defect(&dual) < 1e-12);
        assert!(dual_basis(&dual).approx_eq(&e, 1e-12));
    }

    #[test]
    fn singular_and_ill_conditioned_rejected() {
        assert!(matches!(
            OrderedBasis::from_columns(vec![vec![1.0, 2.0], vec![2.0, 4.0]]),
            Err(Error::SingularBasis(_))
        ));
        assert!(OrderedBasis::from_columns(vec![vec![1.0, 0.0], vec![1.0, 1e-9]]).is_err());
        assert!(OrderedBasis::diagonal(&[0.0]).is_err());
    }

    #[test]
    fn product_basis_examples() {
        let s = OrderedBasis::standard(1);
        assert!(product_basis(&s, &s).unwrap().approx_eq(&OrderedBasis::standard(2), 0.0));
        let p = product_basis(&OrderedBasis::diagonal(&[2.0]).unwrap(), &OrderedBasis::diagonal(&[PI]).unwrap()).unwrap();
        assert!(p.approx_eq(&OrderedBasis::diagonal(&[2.0, PI]).unwrap(), 0.0));
        assert!(product_basis(&s, &OrderedBasis::standard(2)).is_err());
    }

    #[test]
    fn dual_of_product_is_product_of_duals() {
        let e1 = basis2(1.0, 0.3, -0.2, 2.0);
        let e2 = basis2(0.7, 0.0, 0.4, 1.5);
        let lhs = dual_basis(&product_basis(&e1, &e2).unwrap());
        let rhs = product_basis(&dual_basis(&e1), &dual_basis(&e2)).unwrap();
        assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn phase_split_examples() {
        let e1 = basis2(1.0, 0.3, -0.2, 2.0);
        let e = product_basis(&e1, &dual_basis(&e1)).unwrap();
        let verdict = is_phase_split(&e, &[true, true, false, false]);
        let desc = verdict.descriptor().expect("accepted");
        assert!(desc.strongly);
        assert_eq!(desc.permutation, vec![0, 1]);

        let id = OrderedBasis::standard(4);
        assert!(!is_phase_split(&id, &[true, true, false, false]).is_accepted());

        let e = OrderedBasis::diagonal(&[1.0, 2.0 * PI]).unwrap();
        assert!(is_phase_split(&e, &[true, false]).is_accepted());
        // The same basis split the other way round puts 2π in V1.
        assert!(!is_phase_split(&e, &[false, true]).is_accepted());
    }

    #[test]
    fn phase_split_with_permuted_dual_and_non_contiguous_mask() {
        let e1 = basis2(1.0, 0.0, 0.0, 3.0);
        let dual = dual_basis(&e1);
        // Columns: (e1_1,0), (0,dual_2), (e1_2,0), (0,dual_1)
        let cols = vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, dual.column(1)[0], dual.column(1)[1]],
            vec![0.0, 3.0, 0.0, 0.0],
            vec![0.0, 0.0, dual.column(0)[0], dual.column(0)[1]],
        ];
        let e = OrderedBasis::from_columns(cols).unwrap();
        let verdict = is_phase_split(&e, &[true, false, true, false]);
        let desc = verdict.descriptor().expect("accepted");
        assert!(!desc.strongly);
        assert_eq!(desc.mask, vec![true, false, true, false]);
        assert_eq!(desc.permutation, vec![1, 0]);
    }

    #[test]
    fn rotate_half_examples() {
        let e = OrderedBasis::diagonal(&[3.0, 5.0]).unwrap();
        let r = rotate_half(&e).unwrap();
        assert_eq!(r.columns(), vec![vec![0.0, 5.0], vec![3.0, 0.0]]);
        assert!(rotate_half(&r).unwrap().approx_eq(&e, 0.0));
        assert!(rotate_half(&OrderedBasis::standard(3)).is_err());

        let e1 = OrderedBasis::diagonal(&[2.0]).unwrap();
        let e2 = OrderedBasis::diagonal(&[7.0]).unwrap();
        let r = rotate_half(&product_basis(&e1, &e2).unwrap()).unwrap();
        // First vector now lies in V2 and projects onto e2, second in V1 onto e1.
        assert_eq!(r.column(0), vec![0.0, 7.0]);
        assert_eq!(r.column(1), vec![2.0, 0.0]);
    }

    #[test]
    fn lattice_points_examples() {
        let s = OrderedBasis::standard(1);
        let p = lattice_points(&s, &[-1.5], &[1.5]).unwrap();
        assert_eq!(p.points, vec![vec![-1], vec![0], vec![1]]);
        let e = OrderedBasis::diagonal(&[2.0]).unwrap();
        let p = lattice_points(&e, &[-3.0], &[3.0]).unwrap();
        assert_eq!(p.points, vec![vec![-1], vec![0], vec![1]]);
        assert!(matches!(
            lattice_points(&s, &[f64::NEG_INFINITY], &[1.0]),
            Err(Error::UnboundedRegion(_))
        ));
    }

    #[test]
    fn lattice_points_match_brute_force_scan() {
        let e = basis2(1.3, 0.4, -0.6, 0.9);
        let lo = [-4.0, -3.0];
        let hi = [5.0, 2.5];
        let patch = lattice_points(&e, &lo, &hi).unwrap();
        let mut brute = Vec::new();
        for a in -40i64..=40 {
            for b in -40i64..=40 {
                let x = e.lattice_point(&[a, b]);
                if lo[0] <= x[0] && x[0] <= hi[0] && lo[1] <= x[1] && x[1] <= hi[1] {
                    brute.push(vec![a, b]);
                }
            }
        }
        assert_eq!(patch.points, brute);
        let mut uniq = patch.points.clone();
        uniq.dedup();
        assert_eq!(uniq.len(), patch.len());
    }

    #[test]
    fn lattice_points_symmetric_for_symmetric_region() {
        let e = basis2(1.0, 0.5, 0.0, 1.0);
        let patch = lattice_points(&e, &[-3.0, -2.0], &[3.0, 2.0]).unwrap();
        for n in &patch.points {
            let neg: Vec<i64> = n.iter().map(|v| -v).collect();
            assert!(patch.points.contains(&neg));
        }
        let ball = lattice_points_ball(&e, &[0.0, 0.0], 2.5).unwrap();
        assert!(ball.positions().iter().all(|x| x[0].hypot(x[1]) <= 2.5));
    }

    #[test]
    fn coordinates_round_trip() {
        let s = OrderedBasis::standard(2);
        assert_eq!(to_basis_coords(&[0.3, -1.0], &s), vec![0.3, -1.0]);
        let e = OrderedBasis::diagonal(&[2.0]).unwrap();
        assert_eq!(to_basis_coords(&[3.0], &e), vec![1.5]);
        let e = basis2(1.7, -0.3, 0.2, 0.8);
        let x = [0.123, -4.5];
        let back = e.to_point(&to_basis_coords(&x, &e));
        for (a, b) in back.iter().zip(x) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn cell_volume_matches_monte_carlo() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let e = basis2(
                rng.gen_range(0.5..2.0),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(0.5..2.0),
            );
            // Bounding box of the parallelogram.
            let corners = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]].map(|u| e.to_point(&u));
            let lo = [0, 1].map(|k| corners.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min));
            let hi = [0, 1].map(|k| corners.iter().map(|c| c[k]).fold(f64::NEG_INFINITY, f64::max));
            let n = 200_000;
            let mut inside = 0usize;
            for _ in 0..n {
                let x = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
                let u = e.to_coords(&x);
                if u.iter().all(|v| (0.0..1.0).contains(v)) {
                    inside += 1;
                }
            }
            let mc = inside as f64 / n as f64 * (hi[0] - lo[0]) * (hi[1] - lo[1]);
            assert!((mc / e.cell_volume() - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn basis_json_round_trip_and_unknown_keys() {
        let e = basis2(1.0, 2.0, 0.5, -1.0);
        let text = serde_json::to_string(&e).unwrap();
        assert_eq!(text, r#"{"dim":2,"columns":[[1.0,0.5],[2.0,-1.0]]}"#);
        let back: OrderedBasis = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<OrderedBasis>(r#"{"dim":1,"columns":[[1.0]],"x":1}"#).is_err());
        assert!(serde_json::from_str::<OrderedBasis>(r#"{"dim":2,"columns":[[1.0,0.0]]}"#).is_err());
    }
}
