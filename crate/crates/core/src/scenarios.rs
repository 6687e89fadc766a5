//! Deterministic experiment configurations: given a complex, search (in
//! a fixed order) for curves and regions realizing the standard
//! invariance and charge-detection setups. Used by the CLI and the
//! acceptance suite so that reports are reproducible.

use crate::curves::{classify_ribbon, decode, CodedCurve, Letter, OpCurve};
use crate::homotopy::{
    annulus_homotopy, connect_homotopy, contract_disk, two_sides, MovePlan, RegionCells, Side,
};
use crate::presentation::{ArrowPresentation, CellId, SurfaceComplex};
use std::collections::BTreeMap;

/// All words of the given length over the left alphabet {T0⁻¹, T2}.
pub fn left_words(len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * 2);
        for w in &out {
            for l in [Letter::T0Inv, Letter::T2] {
                let mut w2 = w.clone();
                w2.push(l);
                next.push(w2);
            }
        }
        out = next;
    }
    out
}

/// First parallel pair of distinct proper left ribbons with a valid
/// connect plan, by ascending base arrow and word order.
pub fn find_connect_pair(
    p: &ArrowPresentation,
    cx: &SurfaceComplex,
    max_len: usize,
) -> Option<(OpCurve, OpCurve, MovePlan)> {
    for a in 0..p.n_arrows() {
        let mut by_target: BTreeMap<usize, Vec<OpCurve>> = BTreeMap::new();
        for len in 1..=max_len {
            for w in left_words(len) {
                let c = decode(p, &CodedCurve::new(a, w));
                if classify_ribbon(p, &c).proper {
                    by_target.entry(c.target(p)).or_default().push(c);
                }
            }
        }
        for (_, group) in by_target {
            for i in 0..group.len() {
                for j in 0..group.len() {
                    if i == j {
                        continue;
                    }
                    if let Ok(plan) = connect_homotopy(p, cx, &group[i], &group[j]) {
                        if !plan.moves.is_empty() {
                            return Some((group[i].clone(), group[j].clone(), plan));
                        }
                    }
                }
            }
        }
    }
    None
}

/// First contractible closed proper left ribbon that is not a bare face
/// loop, together with its contraction plan.
pub fn find_contractible(
    p: &ArrowPresentation,
    cx: &SurfaceComplex,
    max_len: usize,
) -> Option<(OpCurve, MovePlan)> {
    // prefer rectangle-ish boundaries over bare face loops
    for a in 0..p.n_arrows() {
        for len in (4..=max_len).rev() {
            for w in left_words(len) {
                let c = decode(p, &CodedCurve::new(a, w));
                if !c.is_closed(p) || !classify_ribbon(p, &c).proper {
                    continue;
                }
                if let Ok(plan) = contract_disk(p, cx, &c, Side::Left) {
                    if plan.support.len() > 1 {
                        return Some((c, plan));
                    }
                }
            }
        }
    }
    // fall back to a face loop
    let c = crate::curves::gamma(p, 0);
    let plan = contract_disk(p, cx, &c, Side::Left).ok()?;
    Some((c, plan))
}

/// First pair of disjoint closed proper left ribbons bounding an
/// annulus, with the free plan.
pub fn find_annulus_pair(
    p: &ArrowPresentation,
    cx: &SurfaceComplex,
    max_len: usize,
) -> Option<(OpCurve, OpCurve, MovePlan)> {
    let mut closed: Vec<OpCurve> = Vec::new();
    for a in 0..p.n_arrows() {
        for len in 2..=max_len {
            for w in left_words(len) {
                let c = decode(p, &CodedCurve::new(a, w));
                if c.is_closed(p) && classify_ribbon(p, &c).proper {
                    closed.push(c);
                }
            }
        }
    }
    for c1 in &closed {
        let s1 = c1.visited_sites(p);
        for c2 in &closed {
            if c2.visited_sites(p).iter().any(|s| s1.contains(s)) {
                continue;
            }
            if let Ok(plan) = annulus_homotopy(p, cx, c1, c2) {
                return Some((c1.clone(), c2.clone(), plan));
            }
        }
    }
    None
}

/// Invariance scenario dispatch: `connect`, `contract` or `annulus`.
/// For `contract` the second ribbon is the trivial curve at the base.
pub fn invariance_scenario(
    p: &ArrowPresentation,
    cx: &SurfaceComplex,
    kind: &str,
) -> Option<(OpCurve, OpCurve, MovePlan)> {
    match kind {
        "connect" => find_connect_pair(p, cx, 6),
        "contract" => {
            let (c, plan) = find_contractible(p, cx, 8)?;
            let trivial = OpCurve::trivial(c.source);
            Some((c, trivial, plan))
        }
        "annulus" => find_annulus_pair(p, cx, 8),
        _ => None,
    }
}

/// Charge-detection scenario: a vertex-star disk `L = {v} ∪ Nb(v)`, its
/// boundary loop `γ` (closed proper left ribbon with `L` exactly on its
/// left), and an open proper left ribbon `ρ` from a site fully outside
/// `L` to a site of `v`.
pub fn charge_scenario(
    p: &ArrowPresentation,
    cx: &SurfaceComplex,
) -> Option<(OpCurve, OpCurve, RegionCells)> {
    for vr in 0..cx.dims[0] {
        let v = CellId { dim: 0, rank: vr };
        let vi = cx.cell_index(v);
        let mut want = RegionCells::default();
        want.verts.insert(vr);
        for &ei in &cx.cb[vi] {
            want.edges.insert(cx.cells[ei].id.rank);
            for &fi in &cx.cb[ei] {
                want.faces.insert(cx.cells[fi].id.rank);
            }
        }
        if want.euler() != 1 {
            continue;
        }
        // boundary loop: search closed proper left ribbons whose left
        // side is exactly the star disk
        let mut gamma_loop: Option<OpCurve> = None;
        'search: for a in 0..p.n_arrows() {
            for len in [8usize, 10, 12] {
                for w in left_words(len) {
                    let c = decode(p, &CodedCurve::new(a, w));
                    if !c.is_closed(p) || !classify_ribbon(p, &c).proper {
                        continue;
                    }
                    if let Ok((l, _)) = two_sides(p, cx, &c) {
                        if l == want {
                            gamma_loop = Some(c);
                            break 'search;
                        }
                    }
                }
            }
        }
        let gamma_loop = gamma_loop?;
        // hypothesis (i): the loop is properly contractible over L
        if contract_disk(p, cx, &gamma_loop, Side::Left).is_err() {
            continue;
        }
        // ρ: open proper left ribbon ending at a site of v, starting at
        // a site whose vertex and face are both outside L
        for len in 2..=5 {
            for a in 0..p.n_arrows() {
                let sv = cx.vertex_of(a);
                let sf = cx.face_of(a);
                if want.contains(sv) || want.contains(sf) {
                    continue;
                }
                for w in left_words(len) {
                    let c = decode(p, &CodedCurve::new(a, w));
                    if !classify_ribbon(p, &c).proper || c.is_closed(p) {
                        continue;
                    }
                    let t = c.target(p);
                    if cx.vertex_of(t) == v {
                        return Some((gamma_loop, c, want));
                    }
                }
            }
        }
    }
    None
}
