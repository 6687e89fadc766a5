//! Finite-dimensional C*-Hopf algebras described by structure constants:
//! group algebra presets, duals, the Drinfeld double and its dual,
//! integrals, the R-matrix and Drinfeld element, central/cocommutative
//! projections, minimal central idempotents and irreducible
//! representations.
//!
//! Conventions. A `HopfData` holds dense tensors over a fixed basis
//! `x_0..x_{d-1}`:
//!
//! * `mult[(i·d+j)·d+k]` = coefficient of `x_k` in `x_i x_j`,
//! * `comult[(i·d+j)·d+k]` = coefficient of `x_j ⊗ x_k` in `Δ x_i`,
//! * `antipode[i·d+j]` = coefficient of `x_j` in `S x_i`,
//! * `star[i·d+j]`: `(Σ c_i x_i)† = Σ conj(c_i) star[i·d+j] x_j`.
//!
//! The dual algebra is always written over the dual basis with the
//! canonical coordinate pairing, so evaluation of a functional on an
//! element is the plain coordinate dot product (no conjugation).

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HopfError {
    #[error("Cayley table is not a group: {0}")]
    NotAGroup(String),
    #[error("spectrum too degenerate for a stable decomposition")]
    DegenerateSpectrum,
    #[error("no Haar integral found (residual {0:.3e})")]
    NoHaar(f64),
    #[error("unknown Hopf preset `{0}`")]
    UnknownPreset(String),
    #[error("bad dimensions in Hopf JSON")]
    BadJson,
}

/// Structure-constant description of a finite-dimensional C*-Hopf
/// algebra. Validated lazily via [`validate_hopf`].
#[derive(Debug, Clone)]
pub struct HopfData {
    pub dim: usize,
    pub mult: Vec<C>,
    pub unit: Vec<C>,
    pub comult: Vec<C>,
    pub counit: Vec<C>,
    pub antipode: Vec<C>,
    pub star: Vec<C>,
    /// Two-sided Haar integral, normalized by `ε(i) = 1`.
    pub haar: Vec<C>,
    /// The Haar integral of the dual, as a functional (values on `x_i`).
    pub haar_functional: Vec<C>,
    pub label: String,
}

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

pub fn max_abs(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn sub(a: &[C], b: &[C]) -> Vec<C> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

impl HopfData {
    pub fn zero_el(&self) -> Vec<C> {
        vec![ZERO; self.dim]
    }

    pub fn basis_el(&self, i: usize) -> Vec<C> {
        let mut v = self.zero_el();
        v[i] = ONE;
        v
    }

    #[inline]
    pub fn mult_c(&self, i: usize, j: usize, k: usize) -> C {
        self.mult[(i * self.dim + j) * self.dim + k]
    }

    #[inline]
    pub fn comult_c(&self, i: usize, j: usize, k: usize) -> C {
        self.comult[(i * self.dim + j) * self.dim + k]
    }

    pub fn mul(&self, a: &[C], b: &[C]) -> Vec<C> {
        let d = self.dim;
        let mut out = vec![ZERO; d];
        for i in 0..d {
            if a[i] == ZERO {
                continue;
            }
            for j in 0..d {
                if b[j] == ZERO {
                    continue;
                }
                let c = a[i] * b[j];
                for k in 0..d {
                    let m = self.mult_c(i, j, k);
                    if m != ZERO {
                        out[k] += c * m;
                    }
                }
            }
        }
        out
    }

    /// Coproduct as a dense `d²` vector, index `j·d + k`.
    pub fn delta(&self, a: &[C]) -> Vec<C> {
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            if a[i] == ZERO {
                continue;
            }
            for j in 0..d {
                for k in 0..d {
                    let c = self.comult_c(i, j, k);
                    if c != ZERO {
                        out[j * d + k] += a[i] * c;
                    }
                }
            }
        }
        out
    }

    /// Sparse coproduct rows: `Δ x_i = Σ coeff · x_j ⊗ x_k`.
    pub fn comult_rows(&self) -> Vec<Vec<(usize, usize, C)>> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                let mut row = Vec::new();
                for j in 0..d {
                    for k in 0..d {
                        let c = self.comult_c(i, j, k);
                        if c.norm() > 0.0 {
                            row.push((j, k, c));
                        }
                    }
                }
                row
            })
            .collect()
    }

    /// Iterated coproduct of a basis element into `n` legs, as a sparse
    /// list `(multi-index, coeff)`.
    pub fn iterated_comult_basis(&self, i: usize, n: usize) -> Vec<(Vec<usize>, C)> {
        if n == 1 {
            return vec![(vec![i], ONE)];
        }
        let rows = self.comult_rows();
        let mut acc: Vec<(Vec<usize>, C)> = vec![(vec![i], ONE)];
        for _ in 1..n {
            let mut next = Vec::new();
            for (idx, coeff) in &acc {
                let last = *idx.last().unwrap();
                for &(j, k, c) in &rows[last] {
                    let mut idx2 = idx[..idx.len() - 1].to_vec();
                    idx2.push(j);
                    idx2.push(k);
                    next.push((idx2, coeff * c));
                }
            }
            acc = next;
        }
        acc
    }

    pub fn counit_of(&self, a: &[C]) -> C {
        a.iter().zip(&self.counit).map(|(x, e)| x * e).sum()
    }

    pub fn apply_antipode(&self, a: &[C]) -> Vec<C> {
        let d = self.dim;
        let mut out = vec![ZERO; d];
        for i in 0..d {
            if a[i] == ZERO {
                continue;
            }
            for j in 0..d {
                out[j] += a[i] * self.antipode[i * d + j];
            }
        }
        out
    }

    /// Antilinear star: conjugates coordinates, then applies the tensor.
    pub fn apply_star(&self, a: &[C]) -> Vec<C> {
        let d = self.dim;
        let mut out = vec![ZERO; d];
        for i in 0..d {
            if a[i] == ZERO {
                continue;
            }
            for j in 0..d {
                out[j] += a[i].conj() * self.star[i * d + j];
            }
        }
        out
    }

    /// Haar state `ω(y) = ⟨ι, y⟩`.
    pub fn haar_state(&self, y: &[C]) -> C {
        y.iter().zip(&self.haar_functional).map(|(a, b)| a * b).sum()
    }

    /// Inner product `⟨x, y⟩ = ω(x† y)` of the GNS space of the Haar state.
    pub fn gns_inner(&self, x: &[C], y: &[C]) -> C {
        self.haar_state(&self.mul(&self.apply_star(x), y))
    }

    /// Left-multiplication matrix `L(a)` acting on coordinates.
    pub fn left_mult_matrix(&self, a: &[C]) -> DMatrix<C> {
        let d = self.dim;
        let mut m = DMatrix::zeros(d, d);
        for j in 0..d {
            let col = self.mul(a, &self.basis_el(j));
            for k in 0..d {
                m[(k, j)] = col[k];
            }
        }
        m
    }

    /// Right-multiplication matrix `R(a)`.
    pub fn right_mult_matrix(&self, a: &[C]) -> DMatrix<C> {
        let d = self.dim;
        let mut m = DMatrix::zeros(d, d);
        for j in 0..d {
            let col = self.mul(&self.basis_el(j), a);
            for k in 0..d {
                m[(k, j)] = col[k];
            }
        }
        m
    }

    /// Is the element cocommutative (`Δa = flip Δa`)?
    pub fn is_cocommutative(&self, a: &[C], tol: f64) -> bool {
        let d = self.dim;
        let del = self.delta(a);
        let mut worst: f64 = 0.0;
        for j in 0..d {
            for k in 0..d {
                worst = worst.max((del[j * d + k] - del[k * d + j]).norm());
            }
        }
        worst < tol
    }

    /// Is the element central?
    pub fn is_central(&self, a: &[C], tol: f64) -> bool {
        let d = self.dim;
        for i in 0..d {
            let b = self.basis_el(i);
            let r = sub(&self.mul(a, &b), &self.mul(&b, a));
            if max_abs(&r) >= tol {
                return false;
            }
        }
        true
    }
}

/// Serialized form with row-major complex pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HopfJson {
    pub dim: usize,
    pub mult: Vec<[f64; 2]>,
    pub comult: Vec<[f64; 2]>,
    pub unit: Vec<[f64; 2]>,
    pub counit: Vec<[f64; 2]>,
    pub antipode: Vec<[f64; 2]>,
    pub star: Vec<[f64; 2]>,
}

fn to_pairs(v: &[C]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(v: &[[f64; 2]]) -> Vec<C> {
    v.iter().map(|p| C::new(p[0], p[1])).collect()
}

impl HopfData {
    pub fn to_json(&self) -> HopfJson {
        HopfJson {
            dim: self.dim,
            mult: to_pairs(&self.mult),
            comult: to_pairs(&self.comult),
            unit: to_pairs(&self.unit),
            counit: to_pairs(&self.counit),
            antipode: to_pairs(&self.antipode),
            star: to_pairs(&self.star),
        }
    }

    pub fn from_json(j: &HopfJson, label: &str) -> Result<HopfData, HopfError> {
        let d = j.dim;
        if j.mult.len() != d * d * d
            || j.comult.len() != d * d * d
            || j.unit.len() != d
            || j.counit.len() != d
            || j.antipode.len() != d * d
            || j.star.len() != d * d
        {
            return Err(HopfError::BadJson);
        }
        let mut h = HopfData {
            dim: d,
            mult: from_pairs(&j.mult),
            unit: from_pairs(&j.unit),
            comult: from_pairs(&j.comult),
            counit: from_pairs(&j.counit),
            antipode: from_pairs(&j.antipode),
            star: from_pairs(&j.star),
            haar: vec![],
            haar_functional: vec![],
            label: label.to_string(),
        };
        h.haar = solve_haar(&h)?;
        h.haar_functional = solve_dual_haar(&h)?;
        Ok(h)
    }
}

/// Solve for the two-sided Haar integral: `x_k i = ε(x_k) i = i x_k`,
/// normalized by `ε(i) = 1`.
pub fn solve_haar(h: &HopfData) -> Result<Vec<C>, HopfError> {
    let d = h.dim;
    let mut rows: Vec<Vec<C>> = Vec::new();
    for k in 0..d {
        let l = h.left_mult_matrix(&h.basis_el(k));
        let r = h.right_mult_matrix(&h.basis_el(k));
        let e = h.counit[k];
        for row in 0..d {
            let mut lr = vec![ZERO; d];
            let mut rr = vec![ZERO; d];
            for col in 0..d {
                lr[col] = l[(row, col)] - if row == col { e } else { ZERO };
                rr[col] = r[(row, col)] - if row == col { e } else { ZERO };
            }
            rows.push(lr);
            rows.push(rr);
        }
    }
    let m = DMatrix::from_fn(rows.len(), d, |r, c| rows[r][c]);
    let svd = m.clone().svd(true, true);
    // smallest right singular vector spans the Haar line
    let vt = svd.v_t.as_ref().expect("svd vt");
    let sing = &svd.singular_values;
    let min_idx = (0..sing.len())
        .min_by(|&a, &b| sing[a].partial_cmp(&sing[b]).unwrap())
        .unwrap();
    if sing[min_idx] > 1e-8 {
        return Err(HopfError::NoHaar(sing[min_idx]));
    }
    let cand: Vec<C> = (0..d).map(|c| vt[(min_idx, c)].conj()).collect();
    let e = h.counit_of(&cand);
    if e.norm() < 1e-10 {
        return Err(HopfError::NoHaar(f64::INFINITY));
    }
    Ok(cand.iter().map(|z| z / e).collect())
}

/// The Haar integral of the dual, solved in dual coordinates:
/// `φ ι = φ(1) ι = ι φ` with `ι(1) = 1`.
pub fn solve_dual_haar(h: &HopfData) -> Result<Vec<C>, HopfError> {
    let dual = dual_hopf_raw(h);
    let mut d2 = dual;
    d2.haar = vec![];
    solve_haar(&d2)
}

/// Dual Hopf algebra on the dual basis (without integrals).
fn dual_hopf_raw(h: &HopfData) -> HopfData {
    let d = h.dim;
    let mut mult = vec![ZERO; d * d * d];
    let mut comult = vec![ZERO; d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                // (ξ_i ξ_j)(x_k) = (ξ_i ⊗ ξ_j)(Δ x_k)
                mult[(i * d + j) * d + k] = h.comult_c(k, i, j);
                // Δξ_i (x_j ⊗ x_k) = ξ_i(x_j x_k)
                comult[(i * d + j) * d + k] = h.mult_c(j, k, i);
            }
        }
    }
    let mut antipode = vec![ZERO; d * d];
    let mut star = vec![ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            antipode[i * d + j] = h.antipode[j * d + i];
            // ⟨ξ_i†, x_j⟩ = conj⟨ξ_i, S(x_j)†⟩
            let mut v = ZERO;
            for k in 0..d {
                v += h.antipode[j * d + k].conj() * h.star[k * d + i].conj();
            }
            star[i * d + j] = v.conj();
        }
    }
    HopfData {
        dim: d,
        mult,
        unit: h.counit.clone(),
        comult,
        counit: h.unit.clone(),
        antipode,
        star,
        haar: vec![],
        haar_functional: vec![],
        label: format!("{}^*", h.label),
    }
}

/// Dual Hopf algebra with integrals: the Haar integral of `H*` is the
/// Haar functional of `H` and vice versa.
pub fn dual_hopf(h: &HopfData) -> HopfData {
    let mut d = dual_hopf_raw(h);
    d.haar = h.haar_functional.clone();
    d.haar_functional = h.haar.clone();
    d
}

/// Group algebra `K[G]` from a Cayley table (`table[i][j]` = index of
/// `g_i g_j`). Validates the group axioms.
pub fn group_algebra(table: &[Vec<usize>], label: &str) -> Result<HopfData, HopfError> {
    let n = table.len();
    for row in table {
        if row.len() != n || row.iter().any(|&x| x >= n) {
            return Err(HopfError::NotAGroup("table shape".into()));
        }
    }
    // identity
    let e = (0..n)
        .find(|&c| (0..n).all(|i| table[c][i] == i && table[i][c] == i))
        .ok_or_else(|| HopfError::NotAGroup("no identity".into()))?;
    // inverses
    let mut inv = vec![usize::MAX; n];
    for i in 0..n {
        inv[i] = (0..n)
            .find(|&j| table[i][j] == e && table[j][i] == e)
            .ok_or_else(|| HopfError::NotAGroup(format!("no inverse for {i}")))?;
    }
    // associativity
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if table[table[i][j]][k] != table[i][table[j][k]] {
                    return Err(HopfError::NotAGroup(format!(
                        "associativity fails at ({i},{j},{k})"
                    )));
                }
            }
        }
    }
    let mut mult = vec![ZERO; n * n * n];
    let mut comult = vec![ZERO; n * n * n];
    let mut antipode = vec![ZERO; n * n];
    let mut star = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            mult[(i * n + j) * n + table[i][j]] = ONE;
        }
        comult[(i * n + i) * n + i] = ONE;
        antipode[i * n + inv[i]] = ONE;
        star[i * n + inv[i]] = ONE;
    }
    let mut unit = vec![ZERO; n];
    unit[e] = ONE;
    let counit = vec![ONE; n];
    let haar = vec![C::new(1.0 / n as f64, 0.0); n];
    let mut haar_functional = vec![ZERO; n];
    haar_functional[e] = ONE;
    Ok(HopfData {
        dim: n,
        mult,
        unit,
        comult,
        counit,
        antipode,
        star,
        haar,
        haar_functional,
        label: label.to_string(),
    })
}

/// Cyclic group `Z_n`.
pub fn cyclic_group(n: usize) -> HopfData {
    let table: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
    group_algebra(&table, &format!("z{n}")).expect("Z_n is a group")
}

/// Symmetric group S3 with elements enumerated as the lexicographic
/// permutations of (0,1,2).
pub fn s3_group() -> HopfData {
    let perms: Vec<[usize; 3]> = vec![
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let compose = |p: &[usize; 3], q: &[usize; 3]| -> [usize; 3] {
        // (p ∘ q)(x) = p(q(x))
        [p[q[0]], p[q[1]], p[q[2]]]
    };
    let table: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            perms
                .iter()
                .map(|q| {
                    let pq = compose(p, q);
                    perms.iter().position(|r| *r == pq).unwrap()
                })
                .collect()
        })
        .collect();
    group_algebra(&table, "s3").expect("S3 is a group")
}

/// Resolve a Hopf preset by name: `z2`, `z3`, `z4`, `s3`.
pub fn hopf_preset(name: &str) -> Result<HopfData, HopfError> {
    match name {
        "z2" => Ok(cyclic_group(2)),
        "z3" => Ok(cyclic_group(3)),
        "z4" => Ok(cyclic_group(4)),
        "s3" => Ok(s3_group()),
        other => Err(HopfError::UnknownPreset(other.to_string())),
    }
}

/// A validation report: named residuals, all of which should be tiny.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HopfReport {
    pub checks: Vec<(String, f64)>,
    pub max_residual: f64,
}

impl HopfReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual < tol
    }
}

/// Check every Hopf/C* axiom as a tensor identity and report residuals.
pub fn validate_hopf(h: &HopfData) -> HopfReport {
    let d = h.dim;
    let mut checks: Vec<(String, f64)> = Vec::new();
    let mut rec = |name: &str, r: f64| checks.push((name.to_string(), r));

    // associativity on basis triples
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let ij = h.mul(&h.basis_el(i), &h.basis_el(j));
            for k in 0..d {
                let l = h.mul(&ij, &h.basis_el(k));
                let jk = h.mul(&h.basis_el(j), &h.basis_el(k));
                let r = h.mul(&h.basis_el(i), &jk);
                worst = worst.max(max_abs(&sub(&l, &r)));
            }
        }
    }
    rec("associativity", worst);

    // unit
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let b = h.basis_el(i);
        worst = worst.max(max_abs(&sub(&h.mul(&h.unit, &b), &b)));
        worst = worst.max(max_abs(&sub(&h.mul(&b, &h.unit), &b)));
    }
    rec("unit", worst);

    // coassociativity: (Δ⊗id)Δ = (id⊗Δ)Δ on basis
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let l = h.iterated_comult_basis(i, 3);
        // recompute via the right split and compare as dense 3-tensors
        let mut dense_l = vec![ZERO; d * d * d];
        for (idx, c) in &l {
            dense_l[(idx[0] * d + idx[1]) * d + idx[2]] += *c;
        }
        // right split: Δ then comult on the *second* leg
        let rows = h.comult_rows();
        let mut dense_r = vec![ZERO; d * d * d];
        for &(j, k, c) in &rows[i] {
            for &(m, n, c2) in &rows[k] {
                dense_r[(j * d + m) * d + n] += c * c2;
            }
        }
        worst = worst.max(max_abs(&sub(&dense_l, &dense_r)));
    }
    rec("coassociativity", worst);

    // counit laws
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let rows = h.comult_rows();
        let mut left = vec![ZERO; d];
        let mut right = vec![ZERO; d];
        for &(j, k, c) in &rows[i] {
            left[k] += c * h.counit[j];
            right[j] += c * h.counit[k];
        }
        let b = h.basis_el(i);
        worst = worst.max(max_abs(&sub(&left, &b)));
        worst = worst.max(max_abs(&sub(&right, &b)));
    }
    rec("counit", worst);

    // bialgebra: Δ(x_i x_j) = Δx_i Δx_j, Δ1 = 1⊗1, ε multiplicative
    let rows = h.comult_rows();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let prod = h.mul(&h.basis_el(i), &h.basis_el(j));
            let lhs = h.delta(&prod);
            let mut rhs = vec![ZERO; d * d];
            for &(a, b, c1) in &rows[i] {
                for &(x, y, c2) in &rows[j] {
                    let co = c1 * c2;
                    for m in 0..d {
                        let f1 = h.mult_c(a, x, m);
                        if f1 == ZERO {
                            continue;
                        }
                        for n in 0..d {
                            let f2 = h.mult_c(b, y, n);
                            if f2 != ZERO {
                                rhs[m * d + n] += co * f1 * f2;
                            }
                        }
                    }
                }
            }
            worst = worst.max(max_abs(&sub(&lhs, &rhs)));
        }
    }
    let mut unit_unit = vec![ZERO; d * d];
    for a in 0..d {
        for b in 0..d {
            unit_unit[a * d + b] = h.unit[a] * h.unit[b];
        }
    }
    worst = worst.max(max_abs(&sub(&h.delta(&h.unit), &unit_unit)));
    rec("bialgebra", worst);

    // antipode law: m(S⊗id)Δ = unit·ε = m(id⊗S)Δ
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let mut l = vec![ZERO; d];
        let mut r = vec![ZERO; d];
        for &(j, k, c) in &rows[i] {
            let sj = h.apply_antipode(&h.basis_el(j));
            let sk = h.apply_antipode(&h.basis_el(k));
            let lt = h.mul(&sj, &h.basis_el(k));
            let rt = h.mul(&h.basis_el(j), &sk);
            for m in 0..d {
                l[m] += c * lt[m];
                r[m] += c * rt[m];
            }
        }
        let want: Vec<C> = h.unit.iter().map(|u| u * h.counit[i]).collect();
        worst = worst.max(max_abs(&sub(&l, &want)));
        worst = worst.max(max_abs(&sub(&r, &want)));
    }
    rec("antipode", worst);

    // involutivity S² = id
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let ss = h.apply_antipode(&h.apply_antipode(&h.basis_el(i)));
        worst = worst.max(max_abs(&sub(&ss, &h.basis_el(i))));
    }
    rec("antipode-involutive", worst);

    // star: antimultiplicative, comultiplicative, involutive, unit† = unit
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let lhs = h.apply_star(&h.mul(&h.basis_el(i), &h.basis_el(j)));
            let rhs = h.mul(&h.apply_star(&h.basis_el(j)), &h.apply_star(&h.basis_el(i)));
            worst = worst.max(max_abs(&sub(&lhs, &rhs)));
        }
        let st2 = h.apply_star(&h.apply_star(&h.basis_el(i)));
        worst = worst.max(max_abs(&sub(&st2, &h.basis_el(i))));
        // Δ(x†) = (Δx)†⊗†
        let lhs = h.delta(&h.apply_star(&h.basis_el(i)));
        let mut rhs = vec![ZERO; d * d];
        for &(j, k, c) in &rows[i] {
            let sj = h.apply_star(&h.basis_el(j));
            let sk = h.apply_star(&h.basis_el(k));
            for m in 0..d {
                for n in 0..d {
                    rhs[m * d + n] += c.conj() * sj[m] * sk[n];
                }
            }
        }
        worst = worst.max(max_abs(&sub(&lhs, &rhs)));
    }
    worst = worst.max(max_abs(&sub(&h.apply_star(&h.unit), &h.unit)));
    rec("star", worst);

    // Haar: ε(i) = 1, two-sided invariance, i† = i
    let mut worst: f64 = (h.counit_of(&h.haar) - ONE).norm();
    for k in 0..d {
        let b = h.basis_el(k);
        let want: Vec<C> = h.haar.iter().map(|z| z * h.counit[k]).collect();
        worst = worst.max(max_abs(&sub(&h.mul(&b, &h.haar), &want)));
        worst = worst.max(max_abs(&sub(&h.mul(&h.haar, &b), &want)));
    }
    worst = worst.max(max_abs(&sub(&h.apply_star(&h.haar), &h.haar)));
    rec("haar", worst);

    let max_residual = checks.iter().map(|c| c.1).fold(0.0, f64::max);
    HopfReport {
        checks,
        max_residual,
    }
}

/// A quasitriangular structure: the algebra plus its R-matrix and
/// Drinfeld element `u = S(R₂) R₁`.
#[derive(Debug, Clone)]
pub struct QuasiTriangular {
    pub hopf: HopfData,
    /// R ∈ H⊗H as a dense `d²` vector, index `i·d + j`.
    pub r_matrix: Vec<C>,
    pub drinfeld_u: Vec<C>,
}

/// Index into the double's basis `ξ_i ⊗ x_j`.
#[inline]
fn dd(i: usize, j: usize, d: usize) -> usize {
    i * d + j
}

/// The Drinfeld double `D(H)` on `H* ⊗ H` with its R-matrix.
pub fn drinfeld_double(h: &HopfData) -> QuasiTriangular {
    let d = h.dim;
    let n = d * d;
    let hd = dual_hopf(h);
    let mut mult = vec![ZERO; n * n * n];
    // (ξ_a ⊗ x_b)(ξ_c ⊗ x_e) = ξ_a ξ_c(2) ⊗ x_b(2) x_e ·
    //                           ⟨ξ_c(3), x_b(1)⟩ ⟨ξ_c(1), S⁻¹ x_b(3)⟩
    for a in 0..d {
        for b in 0..d {
            let b3 = h.iterated_comult_basis(b, 3);
            for c in 0..d {
                let c3 = hd.iterated_comult_basis(c, 3);
                for e in 0..d {
                    let row = (dd(a, b, d) * n + dd(c, e, d)) * n;
                    for (bi, cb) in &b3 {
                        for (ci, cc) in &c3 {
                            // ⟨ξ_{c3}, x_{b1}⟩ = δ
                            if ci[2] != bi[0] {
                                continue;
                            }
                            // ⟨ξ_{c1}, S x_{b3}⟩ (S⁻¹ = S)
                            let s = h.antipode[bi[2] * d + ci[0]];
                            if s == ZERO {
                                continue;
                            }
                            let coeff = cb * cc * s;
                            // ξ_a ξ_{c2} and x_{b2} x_e
                            for fi in 0..d {
                                let m1 = hd.mult_c(a, ci[1], fi);
                                if m1 == ZERO {
                                    continue;
                                }
                                for fj in 0..d {
                                    let m2 = h.mult_c(bi[1], e, fj);
                                    if m2 != ZERO {
                                        mult[row + dd(fi, fj, d)] += coeff * m1 * m2;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    // Δ_D(ξ_a ⊗ x_b) = (ξ_a(2) ⊗ x_b(1)) ⊗ (ξ_a(1) ⊗ x_b(2))
    let mut comult = vec![ZERO; n * n * n];
    let hrows = h.comult_rows();
    let drows = hd.comult_rows();
    for a in 0..d {
        for b in 0..d {
            let row = dd(a, b, d) * n * n;
            for &(a1, a2, ca) in &drows[a] {
                for &(b1, b2, cb) in &hrows[b] {
                    comult[row + dd(a2, b1, d) * n + dd(a1, b2, d)] += ca * cb;
                }
            }
        }
    }
    let mut unit = vec![ZERO; n];
    for a in 0..d {
        for b in 0..d {
            unit[dd(a, b, d)] = h.counit[a] * h.unit[b];
        }
    }
    let mut counit = vec![ZERO; n];
    for a in 0..d {
        for b in 0..d {
            counit[dd(a, b, d)] = h.unit[a] * h.counit[b];
        }
    }
    // S_D(φ ⊗ h) = S⁻¹(φ(2)) ⊗ S(h(2)) · ⟨φ(1), h(3)⟩ ⟨φ(3), S⁻¹(h(1))⟩
    let mut antipode = vec![ZERO; n * n];
    for a in 0..d {
        let a3 = hd.iterated_comult_basis(a, 3);
        for b in 0..d {
            let b3 = h.iterated_comult_basis(b, 3);
            let row = dd(a, b, d) * n;
            for (ai, ca) in &a3 {
                for (bi, cb) in &b3 {
                    if ai[0] != bi[2] {
                        continue;
                    }
                    let s = h.antipode[bi[0] * d + ai[2]];
                    if s == ZERO {
                        continue;
                    }
                    let coeff = ca * cb * s;
                    let sphi = hd.apply_antipode(&hd.basis_el(ai[1]));
                    let sh = h.apply_antipode(&h.basis_el(bi[1]));
                    for fi in 0..d {
                        if sphi[fi] == ZERO {
                            continue;
                        }
                        for fj in 0..d {
                            if sh[fj] != ZERO {
                                antipode[row + dd(fi, fj, d)] += coeff * sphi[fi] * sh[fj];
                            }
                        }
                    }
                }
            }
        }
    }
    // (ψ ⊗ g)† = ψ(2)† ⊗ g(2)† · conj⟨ψ(3), S(g(1))⟩ conj⟨ψ(1), g(3)⟩
    let mut star = vec![ZERO; n * n];
    for a in 0..d {
        let a3 = hd.iterated_comult_basis(a, 3);
        for b in 0..d {
            let b3 = h.iterated_comult_basis(b, 3);
            let row = dd(a, b, d) * n;
            for (ai, ca) in &a3 {
                for (bi, cb) in &b3 {
                    if ai[0] != bi[2] {
                        continue;
                    }
                    let s = h.antipode[bi[0] * d + ai[2]];
                    if s == ZERO {
                        continue;
                    }
                    let coeff = (ca * cb * s).conj();
                    let sphi = hd.apply_star(&hd.basis_el(ai[1]));
                    let sh = h.apply_star(&h.basis_el(bi[1]));
                    for fi in 0..d {
                        if sphi[fi] == ZERO {
                            continue;
                        }
                        for fj in 0..d {
                            if sh[fj] != ZERO {
                                star[row + dd(fi, fj, d)] += coeff * sphi[fi] * sh[fj];
                            }
                        }
                    }
                }
            }
        }
    }
    // Haar integral of the double: ι ⊗ i
    let mut haar = vec![ZERO; n];
    for a in 0..d {
        for b in 0..d {
            haar[dd(a, b, d)] = h.haar_functional[a] * h.haar[b];
        }
    }
    // Haar functional of the double: pairing with i ⊗ ι of the dual
    let mut haar_functional = vec![ZERO; n];
    for a in 0..d {
        for b in 0..d {
            haar_functional[dd(a, b, d)] = h.haar[a] * h.haar_functional[b];
        }
    }
    let hopf = HopfData {
        dim: n,
        mult,
        unit,
        comult,
        counit,
        antipode,
        star,
        haar,
        haar_functional,
        label: format!("D({})", h.label),
    };
    // R = Σ_i (ε ⊗ x_i) ⊗ (ξ_i ⊗ 1)
    let mut r_matrix = vec![ZERO; n * n];
    for i in 0..d {
        for a in 0..d {
            if h.counit[a] == ZERO {
                continue;
            }
            for e in 0..d {
                if h.unit[e] == ZERO {
                    continue;
                }
                r_matrix[dd(a, i, d) * n + dd(i, e, d)] += h.counit[a] * h.unit[e];
            }
        }
    }
    // u = S_D(R₂) R₁
    let mut u = vec![ZERO; n];
    for x in 0..n {
        for y in 0..n {
            let c = r_matrix[x * n + y];
            if c == ZERO {
                continue;
            }
            let sy = hopf.apply_antipode(&hopf.basis_el(y));
            let term = hopf.mul(&sy, &hopf.basis_el(x));
            for k in 0..n {
                u[k] += c * term[k];
            }
        }
    }
    QuasiTriangular {
        hopf,
        r_matrix,
        drinfeld_u: u,
    }
}

/// The dual of the double, `D(H)*` on `H ⊗ H*` (basis `x_i ⊗ ξ_j`).
/// The coordinate pairing with `D(H)` (basis `ξ_i ⊗ x_j`) is the
/// canonical one: `⟨x_a ⊗ ξ_b, ξ_c ⊗ x_e⟩ = δ_ac δ_be`.
pub fn dual_of_double_algebra(h: &HopfData) -> HopfData {
    let d = h.dim;
    let n = d * d;
    let hd = dual_hopf(h);
    let mut mult = vec![ZERO; n * n * n];
    // (x_a ⊗ ξ_b)(x_c ⊗ ξ_e) = x_c x_a ⊗ ξ_b ξ_e
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let row = (dd(a, b, d) * n + dd(c, e, d)) * n;
                    for fi in 0..d {
                        let m1 = h.mult_c(c, a, fi);
                        if m1 == ZERO {
                            continue;
                        }
                        for fj in 0..d {
                            let m2 = hd.mult_c(b, e, fj);
                            if m2 != ZERO {
                                mult[row + dd(fi, fj, d)] += m1 * m2;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut unit = vec![ZERO; n];
    for a in 0..d {
        for b in 0..d {
            unit[dd(a, b, d)] = h.unit[a] * h.counit[b];
        }
    }
    let mut counit = vec![ZERO; n];
    for a in 0..d {
        for b in 0..d {
            counit[dd(a, b, d)] = h.counit[a] * h.unit[b];
        }
    }
    // Δ_{D*}(x_a ⊗ ξ_b) = (x_a(1) ⊗ ξ_i ξ_b(1) ξ_j)
    //                   ⊗ (S⁻¹(x_j) x_a(2) x_i ⊗ ξ_b(2))
    let mut comult = vec![ZERO; n * n * n];
    let hrows = h.comult_rows();
    let drows = hd.comult_rows();
    for a in 0..d {
        for b in 0..d {
            let row = dd(a, b, d) * n * n;
            for &(a1, a2, ca) in &hrows[a] {
                for &(b1, b2, cb) in &drows[b] {
                    let coeff = ca * cb;
                    for i in 0..d {
                        for j in 0..d {
                            // first H* leg: ξ_i ξ_{b1} ξ_j
                            let t1 = hd.mul(
                                &hd.mul(&hd.basis_el(i), &hd.basis_el(b1)),
                                &hd.basis_el(j),
                            );
                            // second H leg: S(x_j) x_{a2} x_i
                            let t2 = h.mul(
                                &h.mul(&h.apply_antipode(&h.basis_el(j)), &h.basis_el(a2)),
                                &h.basis_el(i),
                            );
                            for fi in 0..d {
                                if t1[fi] == ZERO {
                                    continue;
                                }
                                for fj in 0..d {
                                    if t2[fj] == ZERO {
                                        continue;
                                    }
                                    comult[row + dd(a1, fi, d) * n + dd(fj, b2, d)] +=
                                        coeff * t1[fi] * t2[fj];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    // S_{D*}(x_a ⊗ ξ_b) = Σ_{i,j} x_j S⁻¹(x_a) S⁻¹(x_i) ⊗ ξ_i S*(ξ_b) ξ_j
    let mut antipode = vec![ZERO; n * n];
    for a in 0..d {
        for b in 0..d {
            let row = dd(a, b, d) * n;
            let sa = h.apply_antipode(&h.basis_el(a));
            let sb = hd.apply_antipode(&hd.basis_el(b));
            for i in 0..d {
                let si = h.apply_antipode(&h.basis_el(i));
                for j in 0..d {
                    let t2 = h.mul(&h.mul(&h.basis_el(j), &sa), &si);
                    let t1 = hd.mul(&hd.mul(&hd.basis_el(i), &sb), &hd.basis_el(j));
                    for fj in 0..d {
                        if t2[fj] == ZERO {
                            continue;
                        }
                        for fi in 0..d {
                            if t1[fi] != ZERO {
                                antipode[row + dd(fj, fi, d)] += t2[fj] * t1[fi];
                            }
                        }
                    }
                }
            }
        }
    }
    // star: (h ⊗ φ)† = h† ⊗ φ†
    let mut star = vec![ZERO; n * n];
    for a in 0..d {
        for b in 0..d {
            let row = dd(a, b, d) * n;
            let sa = h.apply_star(&h.basis_el(a));
            let sb = hd.apply_star(&hd.basis_el(b));
            for fi in 0..d {
                if sa[fi] == ZERO {
                    continue;
                }
                for fj in 0..d {
                    if sb[fj] != ZERO {
                        star[row + dd(fi, fj, d)] += sa[fi] * sb[fj];
                    }
                }
            }
        }
    }
    let mut haar = vec![ZERO; n];
    for a in 0..d {
        for b in 0..d {
            haar[dd(a, b, d)] = h.haar[a] * h.haar_functional[b];
        }
    }
    let mut haar_functional = vec![ZERO; n];
    for a in 0..d {
        for b in 0..d {
            haar_functional[dd(a, b, d)] = h.haar_functional[a] * h.haar[b];
        }
    }
    HopfData {
        dim: n,
        mult,
        unit,
        comult,
        counit,
        antipode,
        star,
        haar,
        haar_functional,
        label: format!("D({})*", h.label),
    }
}

/// The flip `D(H)* → D(H)`, `k ⊗ ψ ↦ ψ ⊗ k` in coordinates; it maps
/// cocommutative functionals onto central elements.
pub fn flip_to_double(d: usize, phi: &[C]) -> Vec<C> {
    let mut out = vec![ZERO; d * d];
    for a in 0..d {
        for b in 0..d {
            out[dd(b, a, d)] = phi[dd(a, b, d)];
        }
    }
    out
}

/// Inverse flip `D(H) → D(H)*`.
pub fn flip_from_double(d: usize, x: &[C]) -> Vec<C> {
    flip_to_double(d, x)
}

/// Central projection `P(X) = i_D(1) · X · S_D(i_D(2))` onto the center.
pub fn central_projection(dh: &HopfData, x: &[C]) -> Vec<C> {
    let n = dh.dim;
    let rows = dh.comult_rows();
    let mut out = vec![ZERO; n];
    for i in 0..n {
        if dh.haar[i] == ZERO {
            continue;
        }
        for &(j, k, c) in &rows[i] {
            let sk = dh.apply_antipode(&dh.basis_el(k));
            let t = dh.mul(&dh.mul(&dh.basis_el(j), x), &sk);
            for m in 0..n {
                out[m] += dh.haar[i] * c * t[m];
            }
        }
    }
    out
}

/// Cocommutative projection `P^T(Φ)(Z) = Φ(S_D(i_D(2)) Z i_D(1))` onto
/// the tracial functionals.
pub fn cocommutative_projection(dh: &HopfData, phi: &[C]) -> Vec<C> {
    let n = dh.dim;
    let rows = dh.comult_rows();
    let mut out = vec![ZERO; n];
    for z in 0..n {
        let mut val = ZERO;
        for i in 0..n {
            if dh.haar[i] == ZERO {
                continue;
            }
            for &(j, k, c) in &rows[i] {
                let sk = dh.apply_antipode(&dh.basis_el(k));
                let arg = dh.mul(&dh.mul(&sk, &dh.basis_el(z)), &dh.basis_el(j));
                let pairing: C = arg.iter().zip(phi).map(|(a, b)| a * b).sum();
                val += dh.haar[i] * c * pairing;
            }
        }
        out[z] = val;
    }
    out
}

/// One matrix block of a semisimple decomposition.
#[derive(Debug, Clone)]
pub struct CentralDecomposition {
    /// Minimal central idempotents, canonically ordered.
    pub idempotents: Vec<Vec<C>>,
    pub block_dims: Vec<usize>,
}

/// Whitening transform of the Haar-state Gram matrix: returns `W` with
/// `W G W† = 1`, so `W L(z) W⁻¹` is Hermitian for self-adjoint `z`.
fn gram_whitener(h: &HopfData) -> (DMatrix<C>, DMatrix<C>) {
    let d = h.dim;
    let g = DMatrix::from_fn(d, d, |i, j| h.gns_inner(&h.basis_el(i), &h.basis_el(j)));
    let chol = Cholesky::new(g).expect("Haar-state Gram matrix must be positive definite");
    let l = chol.l();
    let l_inv = l.clone().try_inverse().expect("Cholesky factor invertible");
    // w = l†, w_inv = (l†)⁻¹ = (l⁻¹)†
    (l.adjoint(), l_inv.adjoint())
}

/// Decompose a semisimple C*-algebra (given as HopfData viewed as an
/// algebra with star and Haar state) into minimal central idempotents by
/// diagonalizing a random self-adjoint central element.
pub fn central_decomposition(h: &HopfData, seed: u64) -> Result<CentralDecomposition, HopfError> {
    let d = h.dim;
    // center: nullspace of all commutators with the basis
    let mut rows: Vec<Vec<C>> = Vec::new();
    for k in 0..d {
        let l = h.left_mult_matrix(&h.basis_el(k));
        let r = h.right_mult_matrix(&h.basis_el(k));
        let delta = &l - &r;
        for row in 0..d {
            rows.push((0..d).map(|c| delta[(row, c)]).collect());
        }
    }
    let m = DMatrix::from_fn(rows.len(), d, |r, c| rows[r][c]);
    let svd = m.svd(true, true);
    let vt = svd.v_t.as_ref().expect("svd vt");
    let mut center_basis: Vec<Vec<C>> = Vec::new();
    for i in 0..svd.singular_values.len() {
        if svd.singular_values[i] < 1e-9 {
            center_basis.push((0..d).map(|c| vt[(i, c)].conj()).collect());
        }
    }
    // SVD lists singular values in descending order; tail rows beyond the
    // rank also span the nullspace when rows < d
    let rank = svd.singular_values.len();
    for i in rank..d {
        let mut v = vec![ZERO; d];
        if i < vt.nrows() {
            for c in 0..d {
                v[c] = vt[(i, c)].conj();
            }
            center_basis.push(v);
        }
    }
    let n_blocks = center_basis.len();
    if n_blocks == 0 {
        return Err(HopfError::DegenerateSpectrum);
    }
    let (w, w_inv) = gram_whitener(h);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..8 {
        // random self-adjoint central element
        let mut z = vec![ZERO; d];
        for cb in &center_basis {
            let c = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for i in 0..d {
                z[i] += c * cb[i];
            }
        }
        let zs = h.apply_star(&z);
        for i in 0..d {
            z[i] = (z[i] + zs[i]) * C::new(0.5, 0.0);
        }
        let lz = &w * h.left_mult_matrix(&z) * &w_inv;
        let herm = (&lz + lz.adjoint()) * C::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        // cluster eigenvalues
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut reps: Vec<f64> = Vec::new();
        for &v in &vals {
            if reps.last().map_or(true, |&r| (v - r).abs() > 1e-6) {
                reps.push(v);
            }
        }
        if reps.len() != n_blocks {
            continue; // degenerate draw, retry
        }
        // check cluster separation
        let min_gap = reps
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if min_gap < 1e-5 {
            continue;
        }
        // spectral projections -> idempotents e_r = P_r(1)
        let unit_co = DVector::from_fn(d, |i, _| h.unit[i]);
        let mut idempotents = Vec::new();
        let mut block_dims = Vec::new();
        for &rep in &reps {
            let mut proj: DMatrix<C> = DMatrix::zeros(d, d);
            for (idx, &val) in eig.eigenvalues.iter().enumerate() {
                if (val - rep).abs() <= 1e-6 {
                    let v = eig.eigenvectors.column(idx);
                    proj += &v * v.adjoint();
                }
            }
            // back to coordinate space
            let proj_coord = &w_inv * proj * &w;
            let e_co = &proj_coord * &unit_co;
            let e: Vec<C> = (0..d).map(|i| e_co[i]).collect();
            if !h.is_central(&e, 1e-7) {
                return Err(HopfError::DegenerateSpectrum);
            }
            // block dim from the trace of left multiplication
            let le = h.left_mult_matrix(&e);
            let tr: C = (0..d).map(|i| le[(i, i)]).sum();
            let dim2 = tr.re.round();
            let dr = (dim2.max(0.0)).sqrt().round() as usize;
            idempotents.push(e);
            block_dims.push(dr);
        }
        // canonical order: by block dim, then by rounded coordinates
        let mut order: Vec<usize> = (0..idempotents.len()).collect();
        let key = |e: &Vec<C>| -> Vec<(i64, i64)> {
            e.iter()
                .map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64))
                .collect()
        };
        order.sort_by(|&a, &b| {
            block_dims[a]
                .cmp(&block_dims[b])
                .then_with(|| key(&idempotents[a]).cmp(&key(&idempotents[b])))
        });
        let idempotents: Vec<Vec<C>> = order.iter().map(|&i| idempotents[i].clone()).collect();
        let block_dims: Vec<usize> = order.iter().map(|&i| block_dims[i]).collect();
        // sanity: orthogonal idempotents summing to 1
        let mut sum = vec![ZERO; d];
        for e in &idempotents {
            for i in 0..d {
                sum[i] += e[i];
            }
        }
        if max_abs(&sub(&sum, &h.unit)) > 1e-7 {
            return Err(HopfError::DegenerateSpectrum);
        }
        return Ok(CentralDecomposition {
            idempotents,
            block_dims,
        });
    }
    Err(HopfError::DegenerateSpectrum)
}

/// Irreducible star representations, one per central block.
#[derive(Debug, Clone)]
pub struct Irreps {
    pub decomposition: CentralDecomposition,
    /// reps[r][i·d + j] are the matrices `D_r(x_i)` stacked: for each
    /// basis element `x_k` a `d_r × d_r` complex matrix.
    pub matrices: Vec<Vec<DMatrix<C>>>,
}

impl Irreps {
    pub fn n_charges(&self) -> usize {
        self.matrices.len()
    }

    /// `D_r(X)` for an element in coordinates.
    pub fn rep(&self, r: usize, x: &[C]) -> DMatrix<C> {
        let dr = self.decomposition.block_dims[r];
        let mut m = DMatrix::zeros(dr, dr);
        for (k, &c) in x.iter().enumerate() {
            if c != ZERO {
                m += &self.matrices[r][k] * c;
            }
        }
        m
    }

    /// The matrix-element functional `D_r^{i,j}` as a dual vector
    /// (coordinates on the basis of the algebra).
    pub fn matrix_element(&self, r: usize, i: usize, j: usize) -> Vec<C> {
        self.matrices[r].iter().map(|m| m[(i, j)]).collect()
    }
}

/// Build irreducible unitary representations by cutting the left regular
/// representation with a minimal idempotent of each block and
/// orthonormalizing in the Haar-state inner product.
pub fn irreps(h: &HopfData, seed: u64) -> Result<Irreps, HopfError> {
    let decomposition = central_decomposition(h, seed)?;
    let d = h.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let mut matrices = Vec::new();
    for (r, e_r) in decomposition.idempotents.iter().enumerate() {
        let dr = decomposition.block_dims[r];
        // find a minimal idempotent q in the block
        let q = minimal_idempotent(h, e_r, dr, &mut rng)?;
        // V = A·q via the column space of right multiplication by q
        let rq = h.right_mult_matrix(&q);
        let mut basis: Vec<Vec<C>> = Vec::new();
        for col in 0..d {
            let v: Vec<C> = (0..d).map(|i| rq[(i, col)]).collect();
            // Gram-Schmidt in the Haar-state inner product
            let mut w = v;
            for b in &basis {
                let coef = h.gns_inner(b, &w);
                for i in 0..d {
                    w[i] -= coef * b[i];
                }
            }
            let nrm = h.gns_inner(&w, &w).re.sqrt();
            if nrm > 1e-8 {
                for x in &mut w {
                    *x /= C::new(nrm, 0.0);
                }
                basis.push(w);
            }
            if basis.len() == dr {
                break;
            }
        }
        if basis.len() != dr {
            return Err(HopfError::DegenerateSpectrum);
        }
        // D_r(x_k)[i][j] = ⟨v_i, x_k v_j⟩
        let mut mats = Vec::with_capacity(d);
        for k in 0..d {
            let mut m = DMatrix::zeros(dr, dr);
            for j in 0..dr {
                let xv = h.mul(&h.basis_el(k), &basis[j]);
                for i in 0..dr {
                    m[(i, j)] = h.gns_inner(&basis[i], &xv);
                }
            }
            mats.push(m);
        }
        matrices.push(mats);
    }
    Ok(Irreps {
        decomposition,
        matrices,
    })
}

/// A minimal idempotent inside the block of `e_r` (rank 1 in the block).
fn minimal_idempotent(
    h: &HopfData,
    e_r: &[C],
    dr: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<C>, HopfError> {
    let d = h.dim;
    if dr == 1 {
        return Ok(e_r.to_vec());
    }
    let (w, w_inv) = gram_whitener(h);
    for _attempt in 0..8 {
        let mut y: Vec<C> = (0..d)
            .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let ys = h.apply_star(&y);
        for i in 0..d {
            y[i] = (y[i] + ys[i]) * C::new(0.5, 0.0);
        }
        let b = h.mul(&h.mul(e_r, &y), e_r);
        let lb = &w * h.left_mult_matrix(&b) * &w_inv;
        let herm = (&lb + lb.adjoint()) * C::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        // pick the eigenvalue of largest magnitude; its spectral
        // projection should have trace d_r (a rank-1 idempotent of the
        // block acting in the regular representation)
        let mut best = 0usize;
        for i in 0..eig.eigenvalues.len() {
            if eig.eigenvalues[i].abs() > eig.eigenvalues[best].abs() {
                best = i;
            }
        }
        let lam = eig.eigenvalues[best];
        if lam.abs() < 1e-8 {
            continue;
        }
        let mut proj: DMatrix<C> = DMatrix::zeros(d, d);
        let mut mult = 0usize;
        for (idx, &val) in eig.eigenvalues.iter().enumerate() {
            if (val - lam).abs() <= 1e-6 * lam.abs().max(1.0) {
                let v = eig.eigenvectors.column(idx);
                proj += &v * v.adjoint();
                mult += 1;
            }
        }
        if mult != dr {
            continue;
        }
        let proj_coord = &w_inv * proj * &w;
        let unit_co = DVector::from_fn(d, |i, _| h.unit[i]);
        let q_co = &proj_coord * &unit_co;
        let q: Vec<C> = (0..d).map(|i| q_co[i]).collect();
        // verify idempotency and self-adjointness
        let qq = h.mul(&q, &q);
        if max_abs(&sub(&qq, &q)) < 1e-7 && max_abs(&sub(&h.apply_star(&q), &q)) < 1e-7 {
            return Ok(q);
        }
    }
    Err(HopfError::DegenerateSpectrum)
}
