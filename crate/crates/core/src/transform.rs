//! Dual, mirror, double and dual-of-double presentations, plus
//! isomorphism checking between presentations.
//!
//! All transforms are pure functions producing freshly validated
//! presentations. The double and its dual live on the 4n-element arrow
//! set `{a_i^σ | a ∈ Arr, i ∈ {0,2}, σ ∈ {+,−}}`, packed into integers.

use crate::presentation::{compose, Arrow, ArrowPresentation};

/// An arrow of the double / dual-of-double: base arrow, kind (0 or 2) and
/// sign. Packed as `4a + 2·[kind=2] + [sign=−]`, a bijection with
/// `0..4n`. The packing is the wire encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DoubleArrow {
    pub base: Arrow,
    /// 0 or 2.
    pub kind: u8,
    /// `true` = the `+` arrow, `false` = the `−` arrow.
    pub plus: bool,
}

impl DoubleArrow {
    pub fn new(base: Arrow, kind: u8, plus: bool) -> Self {
        debug_assert!(kind == 0 || kind == 2);
        DoubleArrow { base, kind, plus }
    }

    pub fn pack(self) -> usize {
        4 * self.base + 2 * usize::from(self.kind == 2) + usize::from(!self.plus)
    }

    pub fn unpack(code: usize) -> Self {
        DoubleArrow {
            base: code / 4,
            kind: if (code / 2) % 2 == 1 { 2 } else { 0 },
            plus: code % 2 == 0,
        }
    }

    /// The opposite arrow `𝕋1 d = a_i^{−σ}`.
    pub fn opposite(self) -> Self {
        DoubleArrow {
            plus: !self.plus,
            ..self
        }
    }

    /// Same kind and sign on a different base arrow.
    pub fn with_base(self, base: Arrow) -> Self {
        DoubleArrow { base, ..self }
    }
}

impl std::fmt::Display for DoubleArrow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}_{}^{}",
            self.base,
            self.kind,
            if self.plus { "+" } else { "-" }
        )
    }
}

fn rebuild(
    p: &ArrowPresentation,
    t0: Vec<usize>,
    t2: Vec<usize>,
    suffix: &str,
) -> ArrowPresentation {
    let name = p.name().map(|n| format!("{n}{suffix}"));
    ArrowPresentation::new(t0.len(), t0, t2, name)
        .expect("transform of a valid presentation must be valid")
}

/// Dual presentation `⟨Arr, T0·T2·T0⁻¹, T0⟩`.
pub fn dual(p: &ArrowPresentation) -> ArrowPresentation {
    let n = p.n_arrows();
    let t0: Vec<usize> = (0..n).map(|a| p.t0(p.t2(p.t0_inv(a)))).collect();
    let t2: Vec<usize> = (0..n).map(|a| p.t0(a)).collect();
    rebuild(p, t0, t2, "~dual")
}

/// The alternative dual `⟨Arr, T2, T2⁻¹·T0·T2⟩`.
pub fn dual_alt(p: &ArrowPresentation) -> ArrowPresentation {
    let n = p.n_arrows();
    let t0: Vec<usize> = (0..n).map(|a| p.t2(a)).collect();
    let t2: Vec<usize> = (0..n).map(|a| p.t2_inv(p.t0(p.t2(a)))).collect();
    rebuild(p, t0, t2, "~dual-alt")
}

/// The non-local dual `⟨Arr, T2, T0⟩`.
pub fn dual_x(p: &ArrowPresentation) -> ArrowPresentation {
    let n = p.n_arrows();
    rebuild(
        p,
        (0..n).map(|a| p.t2(a)).collect(),
        (0..n).map(|a| p.t0(a)).collect(),
        "~dual-x",
    )
}

/// Mirror image `⟨Arr, T0⁻¹, T0·T2⁻¹·T0⁻¹⟩` (same complex, opposite
/// orientation).
pub fn mirror(p: &ArrowPresentation) -> ArrowPresentation {
    let n = p.n_arrows();
    let t0: Vec<usize> = (0..n).map(|a| p.t0_inv(a)).collect();
    let t2: Vec<usize> = (0..n).map(|a| p.t0(p.t2_inv(p.t0_inv(a)))).collect();
    rebuild(p, t0, t2, "~mirror")
}

/// The non-local mirror `⟨Arr, T0⁻¹, T2⁻¹⟩`.
pub fn mirror_x(p: &ArrowPresentation) -> ArrowPresentation {
    let n = p.n_arrows();
    rebuild(
        p,
        (0..n).map(|a| p.t0_inv(a)).collect(),
        (0..n).map(|a| p.t2_inv(a)).collect(),
        "~mirror-x",
    )
}

/// Presentation of the double `D(Σ)` on the packed 4n arrow set.
///
/// ```text
/// 𝕋0: a_0^+ ↦ (T0 a)_0^+   𝕋2: a_0^+ ↦ a_2^−
///     a_0^− ↦ (T1 a)_2^−        a_0^− ↦ (T0⁻¹ a)_0^+
///     a_2^+ ↦ (T2 a)_2^+        a_2^+ ↦ (T1 a)_0^−
///     a_2^− ↦ a_0^−             a_2^− ↦ (T2⁻¹ a)_2^+
/// ```
pub fn double(p: &ArrowPresentation) -> ArrowPresentation {
    let n = p.n_arrows();
    let mut t0 = vec![0usize; 4 * n];
    let mut t2 = vec![0usize; 4 * n];
    for code in 0..4 * n {
        let d = DoubleArrow::unpack(code);
        let a = d.base;
        t0[code] = match (d.kind, d.plus) {
            (0, true) => DoubleArrow::new(p.t0(a), 0, true),
            (0, false) => DoubleArrow::new(p.t1(a), 2, false),
            (2, true) => DoubleArrow::new(p.t2(a), 2, true),
            _ => DoubleArrow::new(a, 0, false),
        }
        .pack();
        t2[code] = match (d.kind, d.plus) {
            (0, true) => DoubleArrow::new(a, 2, false),
            (0, false) => DoubleArrow::new(p.t0_inv(a), 0, true),
            (2, true) => DoubleArrow::new(p.t1(a), 0, false),
            _ => DoubleArrow::new(p.t2_inv(a), 2, true),
        }
        .pack();
    }
    rebuild(p, t0, t2, "~double")
}

/// Presentation of the dual of the double `D(Σ)*` on the same packed
/// arrow set, computed directly from the transformation tables
///
/// ```text
/// 𝕋̃0: a_0^+ ↦ (T0⁻¹ a)_0^−   𝕋̃2: a_0^+ ↦ (T0 a)_0^+
///     a_0^− ↦ a_2^+               a_0^− ↦ (T1 a)_2^−
///     a_2^+ ↦ (T2⁻¹ a)_2^−        a_2^+ ↦ (T2 a)_2^+
///     a_2^− ↦ (T1 a)_0^+          a_2^− ↦ a_0^−
/// ```
pub fn dual_of_double(p: &ArrowPresentation) -> ArrowPresentation {
    let n = p.n_arrows();
    let mut t0 = vec![0usize; 4 * n];
    let mut t2 = vec![0usize; 4 * n];
    for code in 0..4 * n {
        let d = DoubleArrow::unpack(code);
        let a = d.base;
        t0[code] = match (d.kind, d.plus) {
            (0, true) => DoubleArrow::new(p.t0_inv(a), 0, false),
            (0, false) => DoubleArrow::new(a, 2, true),
            (2, true) => DoubleArrow::new(p.t2_inv(a), 2, false),
            _ => DoubleArrow::new(p.t1(a), 0, true),
        }
        .pack();
        t2[code] = match (d.kind, d.plus) {
            (0, true) => DoubleArrow::new(p.t0(a), 0, true),
            (0, false) => DoubleArrow::new(p.t1(a), 2, false),
            (2, true) => DoubleArrow::new(p.t2(a), 2, true),
            _ => DoubleArrow::new(a, 0, false),
        }
        .pack();
    }
    rebuild(p, t0, t2, "~dual-double")
}

/// A candidate isomorphism of presentations: the bijection `f` with
/// `f ∘ S_i = T_i ∘ f` for i = 0, 2.
#[derive(Debug, Clone)]
pub struct PresentationMap {
    pub source: ArrowPresentation,
    pub target: ArrowPresentation,
    pub f: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("map has {got} entries but source has {want} arrows")]
    SizeMismatch { got: usize, want: usize },
}

/// Check a candidate map: true iff `f` is a bijection intertwining both
/// permutations.
pub fn check_isomorphism(m: &PresentationMap) -> Result<bool, TransformError> {
    let n = m.source.n_arrows();
    if m.f.len() != n || m.target.n_arrows() != n {
        return Err(TransformError::SizeMismatch {
            got: m.f.len().max(m.target.n_arrows()),
            want: n,
        });
    }
    let mut seen = vec![false; n];
    for &x in &m.f {
        if x >= n || seen[x] {
            return Ok(false);
        }
        seen[x] = true;
    }
    for a in 0..n {
        if m.f[m.source.t0(a)] != m.target.t0(m.f[a]) {
            return Ok(false);
        }
        if m.f[m.source.t2(a)] != m.target.t2(m.f[a]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The natural isomorphism `δ_P : D(P~)~ → D(P)~`,
/// `a_0^σ ↦ (T1 a)_2^σ, a_2^σ ↦ a_0^σ` (the matrix form of the map; the
/// matrix is normative where prose and matrix could disagree).
pub fn delta_iso(p: &ArrowPresentation) -> PresentationMap {
    let n = p.n_arrows();
    let mut f = vec![0usize; 4 * n];
    for code in 0..4 * n {
        let d = DoubleArrow::unpack(code);
        f[code] = if d.kind == 0 {
            DoubleArrow::new(p.t1(d.base), 2, d.plus)
        } else {
            DoubleArrow::new(d.base, 0, d.plus)
        }
        .pack();
    }
    PresentationMap {
        source: dual_of_double(&dual(p)),
        target: dual_of_double(p),
        f,
    }
}

/// The natural isomorphism `μ_P : D(P^mir)~ → (D(P)~)^mir`,
/// `a_0^σ ↦ a_0^{−σ}, a_2^σ ↦ (T1 a)_2^{−σ}`.
pub fn mu_iso(p: &ArrowPresentation) -> PresentationMap {
    let n = p.n_arrows();
    let mut f = vec![0usize; 4 * n];
    for code in 0..4 * n {
        let d = DoubleArrow::unpack(code);
        f[code] = if d.kind == 0 {
            DoubleArrow::new(d.base, 0, !d.plus)
        } else {
            DoubleArrow::new(p.t1(d.base), 2, !d.plus)
        }
        .pack();
    }
    PresentationMap {
        source: dual_of_double(&mirror(p)),
        target: mirror(&dual_of_double(p)),
        f,
    }
}

/// The map given by applying `T_i` of `p` arrowwise, usable as a
/// candidate isomorphism between derived presentations on the same
/// arrow set.
pub fn t_map(
    p: &ArrowPresentation,
    i: u8,
    source: ArrowPresentation,
    target: ArrowPresentation,
) -> PresentationMap {
    let f = (0..source.n_arrows()).map(|a| p.t(i, a)).collect();
    PresentationMap { source, target, f }
}

/// Identity candidate map.
pub fn id_map(source: ArrowPresentation, target: ArrowPresentation) -> PresentationMap {
    let f = (0..source.n_arrows()).collect();
    PresentationMap { source, target, f }
}

/// Relabel a presentation along a bijection: the pushforward
/// `T_i' = f ∘ T_i ∘ f⁻¹`.
pub fn relabel(p: &ArrowPresentation, f: &[usize]) -> ArrowPresentation {
    let n = p.n_arrows();
    assert_eq!(f.len(), n);
    let mut f_inv = vec![0usize; n];
    for (i, &x) in f.iter().enumerate() {
        f_inv[x] = i;
    }
    let t0 = compose(f, &compose(p.t0_slice(), &f_inv));
    let t2 = compose(f, &compose(p.t2_slice(), &f_inv));
    ArrowPresentation::new(n, t0, t2, p.name().map(|s| format!("{s}~relabel")))
        .expect("relabeling preserves validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{build_complex, minimal_sphere, preset};

    fn all_presets() -> Vec<ArrowPresentation> {
        ["minimal-sphere", "cube", "torus-2x2", "torus-2x3", "torus-3x3"]
            .iter()
            .map(|n| preset(n).unwrap())
            .collect()
    }

    #[test]
    fn packing_is_bijective() {
        for code in 0..64 {
            assert_eq!(DoubleArrow::unpack(code).pack(), code);
        }
    }

    #[test]
    fn dual_counts() {
        let p = minimal_sphere().unwrap();
        let d = build_complex(&dual(&p)).unwrap();
        assert_eq!(d.dims, [2, 2, 2]);
        let c = preset("cube").unwrap();
        let dc = build_complex(&dual(&c)).unwrap();
        assert_eq!(dc.dims, [6, 12, 8]); // octahedron
    }

    #[test]
    fn lemma_isomorphism_chain() {
        for p in all_presets() {
            // xP --T0--> duP --T1--> iduP --T2--> xP
            let m1 = t_map(&p, 0, dual_x(&p), dual(&p));
            assert!(check_isomorphism(&m1).unwrap());
            let m2 = t_map(&p, 1, dual(&p), dual_alt(&p));
            assert!(check_isomorphism(&m2).unwrap());
            let m3 = t_map(&p, 2, dual_alt(&p), dual_x(&p));
            assert!(check_isomorphism(&m3).unwrap());
            // du(idu P) --id--> P and dudu P --T1--> P
            let m4 = id_map(dual(&dual_alt(&p)), p.clone());
            assert!(check_isomorphism(&m4).unwrap());
            let m5 = t_map(&p, 1, dual(&dual(&p)), p.clone());
            assert!(check_isomorphism(&m5).unwrap());
            // P^M --T0--> P^mir
            let m6 = t_map(&p, 0, mirror_x(&p), mirror(&p));
            assert!(check_isomorphism(&m6).unwrap());
        }
    }

    #[test]
    fn mirror_involutive_and_counts() {
        for p in all_presets() {
            let mm = mirror(&mirror(&p));
            // mirror² = conjugation-free identity on these formulas
            let m = id_map(mm.clone(), p.clone());
            assert!(
                check_isomorphism(&m).unwrap(),
                "mirror(mirror(p)) should equal p pointwise"
            );
            let c0 = build_complex(&p).unwrap().dims;
            let c1 = build_complex(&mirror(&p)).unwrap().dims;
            assert_eq!(c0, c1);
        }
    }

    #[test]
    fn double_properties() {
        for p in all_presets() {
            let d = double(&p);
            assert_eq!(d.n_arrows(), 4 * p.n_arrows());
            for code in 0..d.n_arrows() {
                // 𝕋1 flips the sign
                let da = DoubleArrow::unpack(code);
                assert_eq!(DoubleArrow::unpack(d.t1(code)), da.opposite());
                // 𝕋2⁴ = id (all faces are quadrangles)
                assert_eq!(d.orbit_len(2, code), 4);
                // 𝕋0⁴ fixes every a_i^−
                if !da.plus {
                    let mut x = code;
                    for _ in 0..4 {
                        x = d.t0(x);
                    }
                    assert_eq!(x, code);
                }
            }
            // face count of the double = site count = n_arrows
            let dc = build_complex(&d).unwrap();
            assert_eq!(dc.n_faces(), p.n_arrows());
        }
    }

    #[test]
    fn double_euler_preserved() {
        let p = preset("torus-2x2").unwrap();
        let dc = build_complex(&double(&p)).unwrap();
        assert_eq!(dc.euler_characteristic(), 0);
        assert_eq!(double(&p).n_arrows(), 64);
        let s = minimal_sphere().unwrap();
        assert_eq!(
            build_complex(&double(&s)).unwrap().euler_characteristic(),
            2
        );
    }

    #[test]
    fn dual_of_double_matches_dual_composed_with_double() {
        for p in all_presets() {
            let direct = dual_of_double(&p);
            let composed = dual(&double(&p));
            let m = id_map(composed, direct);
            assert!(check_isomorphism(&m).unwrap());
        }
    }

    #[test]
    fn dual_of_double_degrees_and_faces() {
        for p in all_presets() {
            let dd = dual_of_double(&p);
            // every vertex of D(Σ)* has degree 4
            for code in 0..dd.n_arrows() {
                assert_eq!(dd.orbit_len(0, code), 4);
            }
            let c = build_complex(&dd).unwrap();
            let sigma = build_complex(&p).unwrap();
            assert_eq!(
                c.n_faces(),
                sigma.n_vertices() + sigma.n_edges() + sigma.n_faces()
            );
        }
    }

    #[test]
    fn prop_natural_isomorphisms() {
        for p in all_presets() {
            assert!(check_isomorphism(&delta_iso(&p)).unwrap());
            assert!(check_isomorphism(&mu_iso(&p)).unwrap());
        }
    }

    #[test]
    fn t1_on_double_is_not_an_isomorphism() {
        let p = minimal_sphere().unwrap();
        let d = double(&p);
        let f = (0..d.n_arrows()).map(|c| d.t1(c)).collect();
        let m = PresentationMap {
            source: d.clone(),
            target: d.clone(),
            f,
        };
        assert!(!check_isomorphism(&m).unwrap());
    }

    #[test]
    fn transforms_commute_with_relabeling() {
        // applying a transform after an isomorphism equals applying the
        // mapped isomorphism after the transform
        let p = preset("torus-2x3").unwrap();
        let n = p.n_arrows();
        // a deterministic nontrivial relabeling
        let f: Vec<usize> = (0..n).map(|a| (a + 5) % n).collect();
        let q = relabel(&p, &f);
        for op in [dual, dual_alt, mirror] {
            let lhs = op(&q);
            let rhs = relabel(&op(&p), &f);
            let m = id_map(lhs, rhs);
            assert!(check_isomorphism(&m).unwrap());
        }
        // double: the induced relabeling on packed arrows
        let lift: Vec<usize> = (0..4 * n)
            .map(|c| {
                let d = DoubleArrow::unpack(c);
                d.with_base(f[d.base]).pack()
            })
            .collect();
        for op in [double, dual_of_double] {
            let lhs = op(&q);
            let rhs = relabel(&op(&p), &lift);
            let m = id_map(lhs, rhs);
            assert!(check_isomorphism(&m).unwrap());
        }
    }

    #[test]
    fn size_mismatch_detected() {
        let p = minimal_sphere().unwrap();
        let m = PresentationMap {
            source: p.clone(),
            target: double(&p),
            f: vec![0, 1, 2, 3],
        };
        assert!(matches!(
            check_isomorphism(&m),
            Err(TransformError::SizeMismatch { .. })
        ));
    }
}
