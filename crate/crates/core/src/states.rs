//! Dense state vectors on `H^⊗E`, vacuum and partial-vacuum computation,
//! and the numerical experiments: homotopy invariance of ribbon-operator
//! actions, charge detection by enclosing loops, and irreducible
//! multiplets.
//!
//! States may live on a subset of the edges (the active set). Operators
//! acting as the identity outside the active set factor through such
//! states exactly, which keeps experiments on large complexes within
//! memory bounds: the active set is always the union of the supports of
//! every operator involved.

use crate::curves::OpCurve;
use crate::homotopy::{MovePlan, RegionCells};
use crate::hopf::{flip_from_double, HopfData};
use crate::model::{Model, ModelError, Op};
use crate::presentation::CellId;
use num_complex::Complex64 as C;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatesError {
    #[error("state would need {0} amplitudes, above the memory cap {1}")]
    MemoryCap(usize, usize),
    #[error("vacuum rank did not stabilize")]
    RankUnstable,
    #[error("plan is not proper throughout")]
    ImproperPlan,
    #[error("charge-detection hypothesis ({0}) violated")]
    HypothesisViolation(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A dense state over the active edges, little-endian mixed radix: the
/// label of `edges[k]` contributes `label · dim_h^k` to the index.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub dim_h: usize,
    /// Active edge ranks, ascending.
    pub edges: Vec<usize>,
    pub amps: Vec<C>,
}

impl StateVector {
    pub fn zeros(dim_h: usize, edges: &[usize]) -> StateVector {
        let len = dim_h.pow(edges.len() as u32);
        StateVector {
            dim_h,
            edges: edges.to_vec(),
            amps: vec![ZERO; len],
        }
    }

    pub fn zeros_like(other: &StateVector) -> StateVector {
        StateVector {
            dim_h: other.dim_h,
            edges: other.edges.clone(),
            amps: vec![ZERO; other.amps.len()],
        }
    }

    pub fn basis(dim_h: usize, edges: &[usize], index: usize) -> StateVector {
        let mut s = StateVector::zeros(dim_h, edges);
        s.amps[index] = ONE;
        s
    }

    pub fn random(dim_h: usize, edges: &[usize], rng: &mut impl Rng) -> StateVector {
        let mut s = StateVector::zeros(dim_h, edges);
        for a in s.amps.iter_mut() {
            *a = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let n = s.norm();
        s.scale(C::new(1.0 / n, 0.0));
        s
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Hermitian inner product, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> C {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn axpy(&mut self, c: C, other: &StateVector) {
        debug_assert_eq!(self.amps.len(), other.amps.len());
        for (x, y) in self.amps.iter_mut().zip(&other.amps) {
            *x += c * y;
        }
    }

    pub fn scale(&mut self, c: C) {
        for x in self.amps.iter_mut() {
            *x *= c;
        }
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Edges incident to a cell region: stars of its vertices, boundaries of
/// its faces, plus its own edge cells.
pub fn region_edges(model: &Model, cells: &[CellId]) -> Vec<usize> {
    let cx = &model.cx;
    let mut out = BTreeSet::new();
    for &id in cells {
        match id.dim {
            0 => {
                for &ei in &cx.cb[cx.cell_index(id)] {
                    out.insert(cx.cells[ei].id.rank);
                }
            }
            1 => {
                out.insert(id.rank);
            }
            _ => {
                for &ei in &cx.bd[cx.cell_index(id)] {
                    out.insert(cx.cells[ei].id.rank);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Edges touched by a curve.
pub fn curve_edges(model: &Model, curve: &OpCurve) -> Vec<usize> {
    let mut out = BTreeSet::new();
    for d in &curve.arrows {
        out.insert(model.cx.edge_of(d.base).rank);
    }
    out.into_iter().collect()
}

fn union_edges(sets: &[Vec<usize>]) -> Vec<usize> {
    let mut out = BTreeSet::new();
    for s in sets {
        out.extend(s.iter().copied());
    }
    out.into_iter().collect()
}

/// The projector factors of `Π_F`: all `A_v` for vertices of the region
/// and all `B_f` for its faces.
pub fn region_projectors(model: &Model, cells: &[CellId]) -> Vec<Op> {
    let mut ops = Vec::new();
    for &id in cells {
        match id.dim {
            0 => ops.push(model.vertex_projector(id)),
            2 => ops.push(model.face_projector(id)),
            _ => {}
        }
    }
    ops
}

/// Apply a sequence of operators (a product, rightmost first is
/// irrelevant here because projector factors commute).
pub fn apply_all(model: &Model, ops: &[Op], psi: &StateVector) -> Result<StateVector, StatesError> {
    let mut cur = psi.clone();
    for op in ops {
        cur = model.apply(op, &cur)?;
    }
    Ok(cur)
}

/// All cells of the complex, for full-vacuum projectors.
pub fn all_cells(model: &Model) -> Vec<CellId> {
    model.cx.cells.iter().map(|c| c.id).collect()
}

/// Result of a vacuum-basis computation.
pub struct VacuumBasis {
    pub vectors: Vec<StateVector>,
    pub region: Vec<CellId>,
    pub probes_used: usize,
}

/// Compute an orthonormal basis of the partial vacuum space `P(F)` by
/// projecting seeded random states and orthonormalizing with a
/// singular-value cutoff, growing the probe count until the rank is
/// stable twice in a row.
pub fn vacuum_basis(
    model: &Model,
    region: &[CellId],
    active_edges: Option<Vec<usize>>,
    seed: u64,
    mem_cap: usize,
) -> Result<VacuumBasis, StatesError> {
    let edges =
        active_edges.unwrap_or_else(|| (0..model.cx.dims[1]).collect::<Vec<usize>>());
    let len = model.dim_h().pow(edges.len() as u32);
    if len > mem_cap {
        return Err(StatesError::MemoryCap(len, mem_cap));
    }
    let projectors = region_projectors(model, region);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut projected: Vec<StateVector> = Vec::new();
    let mut last_rank = usize::MAX;
    let mut stable = 0;
    let cutoff = 1e-6;
    let mut rank_vectors: Vec<StateVector> = Vec::new();
    while stable < 2 {
        if projected.len() >= 96 {
            return Err(StatesError::RankUnstable);
        }
        for _ in 0..4 {
            let psi = StateVector::random(model.dim_h(), &edges, &mut rng);
            projected.push(apply_all(model, &projectors, &psi)?);
        }
        // orthonormalize with cutoff
        let mut basis: Vec<StateVector> = Vec::new();
        for v in &projected {
            let mut w = v.clone();
            for b in &basis {
                let c = b.inner(&w);
                w.axpy(-c, b);
            }
            // re-orthogonalize once against drift
            for b in &basis {
                let c = b.inner(&w);
                w.axpy(-c, b);
            }
            let n = w.norm();
            if n > cutoff {
                w.scale(C::new(1.0 / n, 0.0));
                basis.push(w);
            }
        }
        let rank = basis.len();
        if rank == last_rank {
            stable += 1;
        } else {
            stable = 0;
            last_rank = rank;
        }
        rank_vectors = basis;
    }
    Ok(VacuumBasis {
        vectors: rank_vectors,
        region: region.to_vec(),
        probes_used: projected.len(),
    })
}

/// Independent oracle for group algebras: the number of conjugation
/// classes of homomorphisms `π₁(Σ_genus) → G`, counted by brute force.
pub fn flat_field_count(h: &HopfData, genus: usize) -> Option<usize> {
    let table = as_group_table(h)?;
    let n = table.len();
    if genus == 0 {
        return Some(1);
    }
    // inverses
    let e = (0..n).find(|&c| (0..n).all(|i| table[c][i] == i))?;
    let inv: Vec<usize> = (0..n)
        .map(|i| (0..n).find(|&j| table[i][j] == e).unwrap())
        .collect();
    // enumerate 2g-tuples with Π [a_i, b_i] = e, count conjugation orbits
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    let total = n.pow((2 * genus) as u32);
    for code in 0..total {
        let mut tuple = Vec::with_capacity(2 * genus);
        let mut c = code;
        for _ in 0..2 * genus {
            tuple.push(c % n);
            c /= n;
        }
        let mut prod = e;
        for i in 0..genus {
            let (a, b) = (tuple[2 * i], tuple[2 * i + 1]);
            let comm = table[table[table[a][b]][inv[a]]][inv[b]];
            prod = table[prod][comm];
        }
        if prod == e {
            tuples.push(tuple);
        }
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut orbits = 0;
    for t in &tuples {
        if seen.contains(t) {
            continue;
        }
        orbits += 1;
        for g in 0..n {
            let conj: Vec<usize> = t
                .iter()
                .map(|&x| table[table[g][x]][inv[g]])
                .collect();
            seen.insert(conj);
        }
    }
    Some(orbits)
}

/// Recover a group's Cayley table from a group-algebra HopfData, if the
/// basis products are single basis elements.
pub fn as_group_table(h: &HopfData) -> Option<Vec<Vec<usize>>> {
    let n = h.dim;
    let mut table = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut hits = Vec::new();
            for k in 0..n {
                let c = h.mult_c(i, j, k);
                if c.norm() > 1e-12 {
                    hits.push((k, c));
                }
            }
            if hits.len() != 1 || (hits[0].1 - ONE).norm() > 1e-12 {
                return None;
            }
            table[i][j] = hits[0].0;
        }
    }
    Some(table)
}

/// Build a partial vacuum vector: project a seeded random state on the
/// active edges with the region's projectors and normalize.
pub fn partial_vacuum(
    model: &Model,
    region: &[CellId],
    active_edges: &[usize],
    seed: u64,
) -> Result<StateVector, StatesError> {
    let projectors = region_projectors(model, region);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..8 {
        let psi = StateVector::random(model.dim_h(), active_edges, &mut rng);
        let mut omega = apply_all(model, &projectors, &psi)?;
        let n = omega.norm();
        if n > 1e-8 {
            omega.scale(C::new(1.0 / n, 0.0));
            return Ok(omega);
        }
    }
    Err(StatesError::RankUnstable)
}

/// Residuals of the six partial-vacuum identities: holonomies of vertex
/// and face loops act as the counit, and κ/λ (and their inverses)
/// reduce to their root arrows. Evaluated for the entire coalgebra
/// basis of `D(H)*` at once; returns the maximal residual.
pub fn verify_prop91(model: &Model, arrows: &[usize], seed: u64) -> Result<f64, StatesError> {
    use crate::curves::{alpha, gamma, kappa, lambda};
    let mut worst: f64 = 0.0;
    for (case, &a) in arrows.iter().enumerate() {
        let vcell = model.cx.vertex_of(a);
        let fcell = model.cx.face_of(a);
        let al = alpha(&model.p, a);
        let ga = gamma(&model.p, a);
        let ka = kappa(&model.p, a);
        let la = lambda(&model.p, a);
        let root_k = OpCurve {
            source: ka.source,
            arrows: vec![crate::transform::DoubleArrow::new(model.p.t1(a), 0, false)],
        };
        let root_l = OpCurve {
            source: la.source,
            arrows: vec![crate::transform::DoubleArrow::new(model.p.t1(a), 2, true)],
        };
        // vertex-condition states and face-condition states
        let pairs: Vec<(OpCurve, Option<OpCurve>, CellId)> = vec![
            (al.clone(), None, vcell),
            (al.inverse(&model.p), None, vcell),
            (ga.clone(), None, fcell),
            (ga.inverse(&model.p), None, fcell),
            (ka.clone(), Some(root_k.clone()), vcell),
            (la.clone(), Some(root_l.clone()), fcell),
            (ka.inverse(&model.p), Some(root_k.inverse(&model.p)), vcell),
            (la.inverse(&model.p), Some(root_l.inverse(&model.p)), fcell),
        ];
        for (i, (curve, rhs, cond)) in pairs.iter().enumerate() {
            let rhs_curve = match rhs {
                Some(c) => c.clone(),
                None => OpCurve::trivial(curve.source),
            };
            let active = union_edges(&[
                curve_edges(model, curve),
                curve_edges(model, &rhs_curve),
                region_edges(model, &[*cond]),
            ]);
            let omega = partial_vacuum(
                model,
                &[*cond],
                &active,
                seed ^ ((case as u64) << 8) ^ i as u64,
            )?;
            let f1 = fold_of(model, curve)?;
            let f2 = fold_of(model, &rhs_curve)?;
            let res = model.fold_pair_residual(&f1, &f2, &omega)?;
            let r = res.iter().copied().fold(0.0, f64::max);
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

/// The opholonomy fold of a curve with an unspecified element (used for
/// whole-basis residuals).
fn fold_of(model: &Model, curve: &OpCurve) -> Result<crate::model::FoldOp, StatesError> {
    let n2 = model.double_dual.dim;
    let op = model.ophol(curve, &vec![ZERO; n2])?;
    match op {
        Op::Fold(f) => Ok(f),
        _ => unreachable!("ophol builds folds"),
    }
}

/// Homotopy-invariance experiment: both opholonomies act identically on
/// a partial vacuum over the plan's support. Returns the maximal
/// residual over all `Φ` (whole basis) for proper plans, or over the
/// cocommutative projection of the basis for free plans.
pub fn experiment_invariance(
    model: &Model,
    rho1: &OpCurve,
    rho2: &OpCurve,
    plan: &MovePlan,
    seed: u64,
) -> Result<f64, StatesError> {
    if !plan.proper_throughout {
        return Err(StatesError::ImproperPlan);
    }
    let active = union_edges(&[
        curve_edges(model, rho1),
        curve_edges(model, rho2),
        region_edges(model, &plan.support),
    ]);
    let omega = partial_vacuum(model, &plan.support, &active, seed)?;
    let f1 = fold_of(model, rho1)?;
    let f2 = fold_of(model, rho2)?;
    let res = model.fold_pair_residual(&f1, &f2, &omega)?;
    if !plan.free {
        Ok(res.iter().copied().fold(0.0, f64::max))
    } else {
        // free homotopy: restrict to cocommutative functionals by
        // applying the tracial projection to each basis functional and
        // measuring in that image
        let n2 = model.double_dual.dim;
        let mut worst: f64 = 0.0;
        for b in 0..n2 {
            let pt = crate::hopf::cocommutative_projection(
                &model.double.hopf,
                &model.double_dual.basis_el(b),
            );
            let o1 = model.apply(&model.ophol(rho1, &pt)?, &omega)?;
            let o2 = model.apply(&model.ophol(rho2, &pt)?, &omega)?;
            worst = worst.max(o1.distance(&o2));
        }
        Ok(worst)
    }
}

/// Contractibility experiment: a properly contractible closed ribbon
/// acts on a vacuum over its disk as the counit scalar.
pub fn experiment_contractible(
    model: &Model,
    ribbon: &OpCurve,
    support: &[CellId],
    seed: u64,
) -> Result<f64, StatesError> {
    let active = union_edges(&[curve_edges(model, ribbon), region_edges(model, support)]);
    let omega = partial_vacuum(model, support, &active, seed)?;
    let f1 = fold_of(model, ribbon)?;
    let f2 = fold_of(model, &OpCurve::trivial(ribbon.source))?;
    let res = model.fold_pair_residual(&f1, &f2, &omega)?;
    Ok(res.iter().copied().fold(0.0, f64::max))
}

/// Charge-detection experiment. `gamma` must be a properly contractible
/// closed proper left ribbon whose disk `L` contains both cells of
/// `rho`'s target site while the complement contains both cells of its
/// source site; `omega` is a partial vacuum over `L`.
///
/// Returns the overlap matrix `o[q][r]` of `Ophol_γ(Ψ_q)` against the
/// charge-`r` excitations (expected `δ_{q,r}`) and the maximal residual
/// of `Ophol_γ(Ψ_q) Λ_r = δ_{qr} Λ_r`.
pub struct ChargeReport {
    pub overlaps: Vec<Vec<C>>,
    pub residual: f64,
    pub n_charges: usize,
}

pub fn experiment_charge(
    model: &Model,
    gamma_loop: &OpCurve,
    rho: &OpCurve,
    disk: &RegionCells,
    seed: u64,
) -> Result<ChargeReport, StatesError> {
    use crate::hopf::irreps;
    // hypothesis (ii): disk contains both cells of the target site
    let t = rho.target(&model.p);
    let (tv, tf) = (model.cx.vertex_of(t), model.cx.face_of(t));
    if !disk.contains(tv) || !disk.contains(tf) {
        return Err(StatesError::HypothesisViolation("ii".into()));
    }
    // hypothesis (iii): complement contains both cells of the source site
    let s = rho.source;
    let (sv, sf) = (model.cx.vertex_of(s), model.cx.face_of(s));
    if disk.contains(sv) || disk.contains(sf) {
        return Err(StatesError::HypothesisViolation("iii".into()));
    }
    let support = disk.cell_ids();
    let active = union_edges(&[
        curve_edges(model, gamma_loop),
        curve_edges(model, rho),
        region_edges(model, &support),
    ]);
    let omega = partial_vacuum(model, &support, &active, seed)?;
    let ir = irreps(&model.double.hopf, seed ^ 0xc0ffee).map_err(|_| {
        StatesError::HypothesisViolation("irrep decomposition failed".into())
    })?;
    let nq = ir.n_charges();
    let d = model.hopf.dim;
    let mut lambdas: Vec<Vec<StateVector>> = Vec::new();
    for r in 0..nq {
        let dr = ir.decomposition.block_dims[r];
        let mut vecs = Vec::new();
        for i in 0..dr {
            for j in 0..dr {
                let phi = ir.matrix_element(r, i, j);
                let op = model.ophol(rho, &flip_from_double(d, &flip_from_double(d, &phi)))?;
                // matrix_element is already in D(H)* coordinates (the
                // dual basis of D(H) under the coordinate pairing)
                let _ = &op;
                let op = model.ophol(rho, &phi)?;
                vecs.push(model.apply(&op, &omega)?);
            }
        }
        lambdas.push(vecs);
    }
    let mut overlaps = vec![vec![ZERO; nq]; nq];
    let mut worst: f64 = 0.0;
    for q in 0..nq {
        let e_q = &ir.decomposition.idempotents[q];
        let psi_q = flip_from_double(d, e_q);
        let loop_op = model.ophol(gamma_loop, &psi_q)?;
        for r in 0..nq {
            for lam in &lambdas[r] {
                let out = model.apply(&loop_op, lam)?;
                let expect = if q == r { ONE } else { ZERO };
                let mut diff = out.clone();
                diff.axpy(-expect, lam);
                worst = worst.max(diff.norm() / lam.norm().max(1e-30));
                let denom = lam.norm_sqr().max(1e-30);
                overlaps[q][r] += lam.inner(&out) / C::new(denom, 0.0);
            }
            let count = lambdas[r].len() as f64;
            overlaps[q][r] /= C::new(count, 0.0);
        }
    }
    Ok(ChargeReport {
        overlaps,
        residual: worst,
        n_charges: nq,
    })
}

/// Multiplet experiment: the excitations `Λ_r^{i,j} = Ophol_ρ(D_r^{i,j})Ω`
/// over a full vacuum transform covariantly under the embedded double at
/// the endpoints and invisibly elsewhere. Returns the maximal residual
/// of the three covariance identities over all algebra basis elements.
pub fn multiplet_residual(
    model: &Model,
    rho: &OpCurve,
    r: usize,
    seed: u64,
    mem_cap: usize,
) -> Result<f64, StatesError> {
    use crate::hopf::irreps;
    let vb = vacuum_basis(model, &all_cells(model), None, seed, mem_cap)?;
    let omega = vb.vectors[0].clone();
    let ir = irreps(&model.double.hopf, seed ^ 0xfeed).map_err(|_| {
        StatesError::HypothesisViolation("irrep decomposition failed".into())
    })?;
    let dr = ir.decomposition.block_dims[r];
    let a = rho.source;
    let b = rho.target(&model.p);
    let mut lam = vec![vec![StateVector::zeros_like(&omega); dr]; dr];
    for i in 0..dr {
        for j in 0..dr {
            let phi = ir.matrix_element(r, i, j);
            let op = model.ophol(rho, &phi)?;
            lam[i][j] = model.apply(&op, &omega)?;
        }
    }
    let dh = model.double.hopf.clone();
    let n = dh.dim;
    let mut worst: f64 = 0.0;
    // a far-away arrow: site disjoint from both endpoints
    let far = (0..model.p.n_arrows()).find(|&c| {
        let cs = model.cx.site(c);
        let as_ = model.cx.site(a);
        let bs = model.cx.site(b);
        cs.vertex != as_.vertex
            && cs.vertex != bs.vertex
            && cs.face != as_.face
            && cs.face != bs.face
    });
    for k in 0..n {
        let x = dh.basis_el(k);
        // D_b(X) Λ^{i,k} = Σ_j Λ^{i,j} D_r(X)[j][k]
        let dx = ir.rep(r, &x);
        for i in 0..dr {
            for kk in 0..dr {
                let lhs = model.apply(&model.double_embed(b, &x), &lam[i][kk])?;
                let mut rhs = StateVector::zeros_like(&omega);
                for j in 0..dr {
                    rhs.axpy(dx[(j, kk)], &lam[i][j]);
                }
                worst = worst.max(lhs.distance(&rhs));
                // D_a(X) Λ^{i,k} = Σ_j D_r(S_D X)[i][j] Λ^{j,k}
                let sx = dh.apply_antipode(&x);
                let dsx = ir.rep(r, &sx);
                let lhs = model.apply(&model.double_embed(a, &x), &lam[i][kk])?;
                let mut rhs = StateVector::zeros_like(&omega);
                for j in 0..dr {
                    rhs.axpy(dsx[(i, j)], &lam[j][kk]);
                }
                worst = worst.max(lhs.distance(&rhs));
                // D_c(X) Λ = ε(X) Λ away from the endpoints
                if let Some(c) = far {
                    let lhs = model.apply(&model.double_embed(c, &x), &lam[i][kk])?;
                    let mut rhs = lam[i][kk].clone();
                    rhs.scale(dh.counit_of(&x));
                    worst = worst.max(lhs.distance(&rhs));
                }
            }
        }
    }
    Ok(worst)
}

use rand::SeedableRng;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::hopf_preset;
    use crate::presentation::{build_complex, genus, preset};

    fn model(complex: &str, hopf: &str) -> Model {
        let p = preset(complex).unwrap();
        let cx = build_complex(&p).unwrap();
        Model::new(p, cx, hopf_preset(hopf).unwrap())
    }

    #[test]
    fn state_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = StateVector::random(2, &[0, 1, 2], &mut rng);
        assert!((s.norm() - 1.0).abs() < 1e-12);
        let b = StateVector::basis(2, &[0, 1, 2], 5);
        assert_eq!(b.amps.len(), 8);
        assert_eq!(b.amps[5], ONE);
    }

    #[test]
    fn identity_and_single_edge_translation() {
        let m = model("torus-2x2", "z2");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let edges: Vec<usize> = (0..m.n_edges()).collect();
        let psi = StateVector::random(2, &edges, &mut rng);
        let out = m.apply(&Op::Identity, &psi).unwrap();
        assert!(out.distance(&psi) < 1e-12);
        // left multiplication by the nontrivial group element flips the
        // edge label of a basis state
        let g = m.hopf.basis_el(1);
        let a = m.edge_section(0);
        let op = m.op_p(a, &g);
        let basis0 = StateVector::basis(2, &edges, 0);
        let out = m.apply(&op, &basis0).unwrap();
        assert!((out.amps[1] - ONE).norm() < 1e-12);
        // norm preserved by group-like translations
        let out = m.apply(&op, &psi).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn vacuum_dimensions_small() {
        // cube sphere with Z2: one ground state
        let m = model("cube", "z2");
        let vb = vacuum_basis(&m, &all_cells(&m), None, 11, 1 << 24).unwrap();
        assert_eq!(vb.vectors.len(), 1);
        // torus-2x2 with Z2: four ground states
        let m = model("torus-2x2", "z2");
        let vb = vacuum_basis(&m, &all_cells(&m), None, 11, 1 << 24).unwrap();
        assert_eq!(vb.vectors.len(), 4);
        // flat-field oracle agrees
        let g = genus(&m.p).unwrap() as usize;
        assert_eq!(flat_field_count(&m.hopf, g), Some(4));
        let cube = model("cube", "z2");
        let g = genus(&cube.p).unwrap() as usize;
        assert_eq!(flat_field_count(&cube.hopf, g), Some(1));
    }

    #[test]
    fn vacuum_dimension_z3() {
        let m = model("torus-2x2", "z3");
        let vb = vacuum_basis(&m, &all_cells(&m), None, 13, 1 << 24).unwrap();
        assert_eq!(vb.vectors.len(), 9);
        assert_eq!(flat_field_count(&m.hopf, 1), Some(9));
    }

    #[test]
    fn s3_commuting_pairs_oracle() {
        let h = hopf_preset("s3").unwrap();
        assert_eq!(flat_field_count(&h, 1), Some(8));
    }

    #[test]
    fn hamiltonian_annihilates_vacuum() {
        let m = model("torus-2x2", "z2");
        let vb = vacuum_basis(&m, &all_cells(&m), None, 17, 1 << 24).unwrap();
        let ham = m.hamiltonian();
        for v in &vb.vectors {
            let hv = m.apply(&ham, v).unwrap();
            assert!(hv.norm() < 1e-9);
        }
        // positivity on random states
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let edges: Vec<usize> = (0..m.n_edges()).collect();
        for _ in 0..4 {
            let psi = StateVector::random(2, &edges, &mut rng);
            let e = psi.inner(&m.apply(&ham, &psi).unwrap()).re;
            assert!(e > -1e-9);
        }
    }

    #[test]
    fn projector_region_order_independent() {
        let m = model("torus-2x2", "z3");
        let cells = all_cells(&m);
        let ops = region_projectors(&m, &cells);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let edges: Vec<usize> = (0..m.n_edges()).collect();
        let psi = StateVector::random(3, &edges, &mut rng);
        let a = apply_all(&m, &ops, &psi).unwrap();
        let rev: Vec<Op> = ops.iter().rev().cloned().collect();
        let b = apply_all(&m, &rev, &psi).unwrap();
        assert!(a.distance(&b) < 1e-10);
        // idempotent and self-adjoint within tolerance
        let aa = apply_all(&m, &ops, &a).unwrap();
        assert!(aa.distance(&a) < 1e-10);
    }

    #[test]
    fn prop91_z2() {
        let m = model("torus-2x2", "z2");
        let res = verify_prop91(&m, &[0, 5], 31).unwrap();
        assert!(res < 1e-9, "residual {res}");
    }

    #[test]
    fn adjoint_compatibility_on_states() {
        // ⟨Mψ, φ⟩ = ⟨ψ, M†φ⟩ for a generator word
        let m = model("torus-2x2", "z3");
        let d = m.dim_h();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let h: Vec<C> = (0..d)
            .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let op = m.op_p(3, &h);
        let adj = m.adjoint(&op).unwrap();
        let edges: Vec<usize> = op.support(&m).into_iter().collect();
        let psi = StateVector::random(d, &edges, &mut rng);
        let phi = StateVector::random(d, &edges, &mut rng);
        let lhs = m.apply(&op, &psi).unwrap().inner(&phi);
        let rhs = psi.inner(&m.apply(&adj, &phi).unwrap());
        assert!((lhs - rhs).norm() < 1e-10);
    }
}
