//! Arrow presentations and the oriented closed surface complexes they
//! generate.
//!
//! An arrow presentation is a finite arrow set together with two
//! permutations `t0` (rotation around the source vertex of an arrow) and
//! `t2` (rotation around the face an arrow bounds with compatible
//! orientation). Three axioms make such a pair encode an oriented closed
//! surface complex:
//!
//! * AP-1: every `T0`- and `T2`-orbit has at least 2 elements,
//! * AP-2: `T1 := T0∘T2` is an involution,
//! * AP-3: a `T0`-orbit and a `T2`-orbit intersect in at most one arrow.
//!
//! Orbits of `T0`, `T1`, `T2` are the vertices, edges and faces of the
//! complex; `T1` reverses arrow direction.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Index of an arrow, dense in `0..n_arrows`.
pub type Arrow = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PresentationError {
    #[error("t{which} is not a permutation of 0..{n}")]
    NotAPermutation { which: u8, n: usize },
    #[error("AP-1 violated: T{i}-orbit of arrow {arrow} is a singleton")]
    Ap1Violation { arrow: Arrow, i: u8 },
    #[error("AP-2 violated: (T0 T2)^2 moves arrow {arrow}")]
    Ap2Violation { arrow: Arrow },
    #[error("AP-3 violated: T0-orbit of {a} meets T2-orbit of {b} in more than one arrow")]
    Ap3Violation { a: Arrow, b: Arrow },
    #[error("complex axiom {axiom} violated (witness arrows {witness:?}): {detail}")]
    CscViolation {
        axiom: String,
        witness: Vec<Arrow>,
        detail: String,
    },
    #[error("presentation is not connected")]
    NotConnected,
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

/// One violation entry of a validation report, mirroring the JSON schema
/// `{"axiom": "AP-1" | .. | "CSC-k", "witness": [int]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Violation {
    pub axiom: String,
    pub witness: Vec<Arrow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

/// Permutation given as an index array: `map[i]` is the image of `i`.
fn is_permutation(map: &[usize]) -> bool {
    let n = map.len();
    let mut seen = vec![false; n];
    for &x in map {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

fn invert(map: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; map.len()];
    for (i, &x) in map.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// Compose index maps: `(f ∘ g)(x) = f(g(x))`.
pub(crate) fn compose(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&x| f[x]).collect()
}

/// A validated arrow presentation `⟨Arr, T0, T2⟩`.
///
/// Constructors run the full axiom check; every value of this type
/// satisfies AP-1..AP-3. All fields are immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowPresentation {
    n_arrows: usize,
    t0: Vec<usize>,
    t2: Vec<usize>,
    t1: Vec<usize>,
    t0_inv: Vec<usize>,
    t2_inv: Vec<usize>,
    name: Option<String>,
}

/// Serialized form: `{"name": str, "n_arrows": int, "t0": [int], "t2": [int]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n_arrows: usize,
    pub t0: Vec<usize>,
    pub t2: Vec<usize>,
}

impl ArrowPresentation {
    /// Validate and build a presentation. On failure returns the first
    /// error; use [`ArrowPresentation::validate_raw`] for the full list.
    pub fn new(
        n: usize,
        t0: Vec<usize>,
        t2: Vec<usize>,
        name: Option<String>,
    ) -> Result<Self, PresentationError> {
        let violations = Self::validate_raw(n, &t0, &t2);
        if let Some(v) = violations.first() {
            return Err(Self::violation_to_error(v, n));
        }
        let t1 = compose(&t0, &t2);
        let t0_inv = invert(&t0);
        let t2_inv = invert(&t2);
        Ok(ArrowPresentation {
            n_arrows: n,
            t0,
            t2,
            t1,
            t0_inv,
            t2_inv,
            name,
        })
    }

    fn violation_to_error(v: &Violation, n: usize) -> PresentationError {
        match v.axiom.as_str() {
            "perm-0" => PresentationError::NotAPermutation { which: 0, n },
            "perm-2" => PresentationError::NotAPermutation { which: 2, n },
            "AP-1" => PresentationError::Ap1Violation {
                arrow: v.witness[0],
                i: v.witness[1] as u8,
            },
            "AP-2" => PresentationError::Ap2Violation { arrow: v.witness[0] },
            _ => PresentationError::Ap3Violation {
                a: v.witness[0],
                b: v.witness[1],
            },
        }
    }

    /// Full axiom scan on raw data. Returns the list of violations with
    /// witness arrows; empty list means the data is a valid presentation.
    pub fn validate_raw(n: usize, t0: &[usize], t2: &[usize]) -> Vec<Violation> {
        let mut out = Vec::new();
        if t0.len() != n || !is_permutation(t0) {
            out.push(Violation {
                axiom: "perm-0".into(),
                witness: vec![],
            });
        }
        if t2.len() != n || !is_permutation(t2) {
            out.push(Violation {
                axiom: "perm-2".into(),
                witness: vec![],
            });
        }
        if !out.is_empty() {
            return out;
        }
        // AP-1: no fixed points of t0/t2 (orbit size >= 2).
        for a in 0..n {
            if t0[a] == a {
                out.push(Violation {
                    axiom: "AP-1".into(),
                    witness: vec![a, 0],
                });
            }
            if t2[a] == a {
                out.push(Violation {
                    axiom: "AP-1".into(),
                    witness: vec![a, 2],
                });
            }
        }
        // AP-2: (t0 t2)^2 = id.
        for a in 0..n {
            if t0[t2[t0[t2[a]]]] != a {
                out.push(Violation {
                    axiom: "AP-2".into(),
                    witness: vec![a],
                });
            }
        }
        // AP-3: |O0(a) ∩ O2(b)| <= 1. Arrows sharing a (vertex, face)
        // pair must be equal.
        let v_of = orbit_labels(n, t0);
        let f_of = orbit_labels(n, t2);
        let mut seen: std::collections::BTreeMap<(usize, usize), Arrow> =
            std::collections::BTreeMap::new();
        for a in 0..n {
            if let Some(&b) = seen.get(&(v_of[a], f_of[a])) {
                out.push(Violation {
                    axiom: "AP-3".into(),
                    witness: vec![b, a],
                });
            } else {
                seen.insert((v_of[a], f_of[a]), a);
            }
        }
        out
    }

    pub fn n_arrows(&self) -> usize {
        self.n_arrows
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn t0(&self, a: Arrow) -> Arrow {
        self.t0[a]
    }
    pub fn t1(&self, a: Arrow) -> Arrow {
        self.t1[a]
    }
    pub fn t2(&self, a: Arrow) -> Arrow {
        self.t2[a]
    }
    pub fn t0_inv(&self, a: Arrow) -> Arrow {
        self.t0_inv[a]
    }
    pub fn t2_inv(&self, a: Arrow) -> Arrow {
        self.t2_inv[a]
    }
    /// `T1` is its own inverse.
    pub fn t1_inv(&self, a: Arrow) -> Arrow {
        self.t1[a]
    }

    pub fn t0_slice(&self) -> &[usize] {
        &self.t0
    }
    pub fn t2_slice(&self) -> &[usize] {
        &self.t2
    }

    /// Apply `T_i` (i = 0, 1, 2).
    pub fn t(&self, i: u8, a: Arrow) -> Arrow {
        match i {
            0 => self.t0[a],
            1 => self.t1[a],
            _ => self.t2[a],
        }
    }

    /// Orbit of `a` under `T_i` in application order `(a, T_i a, T_i² a, …)`.
    pub fn orbit(&self, i: u8, a: Arrow) -> Vec<Arrow> {
        let mut out = vec![a];
        let mut b = self.t(i, a);
        while b != a {
            out.push(b);
            b = self.t(i, b);
        }
        out
    }

    /// Size of the `T_i`-orbit of `a`.
    pub fn orbit_len(&self, i: u8, a: Arrow) -> usize {
        self.orbit(i, a).len()
    }

    /// Serialize to the JSON schema.
    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            name: self.name.clone(),
            n_arrows: self.n_arrows,
            t0: self.t0.clone(),
            t2: self.t2.clone(),
        }
    }

    pub fn from_json(j: &ComplexJson) -> Result<Self, PresentationError> {
        ArrowPresentation::new(j.n_arrows, j.t0.clone(), j.t2.clone(), j.name.clone())
    }

    /// Block-diagonal union of two presentations (arrows of `other`
    /// shifted by `self.n_arrows`). The result is valid but disconnected.
    pub fn disjoint_union(&self, other: &ArrowPresentation) -> ArrowPresentation {
        let n = self.n_arrows + other.n_arrows;
        let mut t0 = self.t0.clone();
        let mut t2 = self.t2.clone();
        t0.extend(other.t0.iter().map(|&x| x + self.n_arrows));
        t2.extend(other.t2.iter().map(|&x| x + self.n_arrows));
        ArrowPresentation::new(n, t0, t2, None).expect("union of valid presentations is valid")
    }

    /// True iff the group generated by `T0`, `T2` acts transitively on the
    /// arrows; equivalently the site adjacency graph is connected.
    pub fn is_connected(&self) -> bool {
        if self.n_arrows == 0 {
            return true;
        }
        let mut seen = vec![false; self.n_arrows];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(a) = stack.pop() {
            for b in [self.t0[a], self.t2[a], self.t0_inv[a], self.t2_inv[a]] {
                if !seen[b] {
                    seen[b] = true;
                    count += 1;
                    stack.push(b);
                }
            }
        }
        count == self.n_arrows
    }
}

/// Label each arrow with the index of its `T_i`-orbit; orbits are ranked by
/// their minimal member so labels are deterministic.
fn orbit_labels(n: usize, t: &[usize]) -> Vec<usize> {
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for a in 0..n {
        if label[a] != usize::MAX {
            continue;
        }
        let mut b = a;
        loop {
            label[b] = next;
            b = t[b];
            if b == a {
                break;
            }
        }
        next += 1;
    }
    label
}

/// Identifier of a cell: dimension plus rank (orbits are ranked by their
/// minimal member arrow, so ids are stable across runs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellId {
    pub dim: u8,
    pub rank: usize,
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.dim {
            0 => 'v',
            1 => 'e',
            _ => 'f',
        };
        write!(f, "{}{}", c, self.rank)
    }
}

/// A cell of the complex: one `T_dim`-orbit of arrows.
#[derive(Debug, Clone)]
pub struct Cell {
    pub id: CellId,
    /// The orbit in `T_dim`-application order starting at the minimal arrow.
    pub members: Vec<Arrow>,
}

/// A vertex–face pair whose orbits intersect (necessarily in one arrow,
/// the witness). Sites are in bijection with arrows via `a ↦ s(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Site {
    pub vertex: CellId,
    pub face: CellId,
    pub witness: Arrow,
}

/// The oriented closed surface complex generated by a presentation:
/// cells, boundary/coboundary and the canonical cyclic neighborhood
/// orders on vertices and faces.
#[derive(Debug, Clone)]
pub struct SurfaceComplex {
    pub cells: Vec<Cell>,
    /// dims[d] = number of cells of dimension d.
    pub dims: [usize; 3],
    /// For each arrow, the rank of its vertex / edge / face orbit.
    vertex_of: Vec<usize>,
    edge_of: Vec<usize>,
    face_of: Vec<usize>,
    /// Boundary and coboundary, cell index -> sorted cell indices.
    pub bd: Vec<Vec<usize>>,
    pub cb: Vec<Vec<usize>>,
    /// Cyclic order [f_0, e_0, f_1, e_1, …] around each vertex, as global
    /// cell indices, starting from the minimal arrow of the vertex.
    pub vertex_orders: Vec<Vec<usize>>,
    /// Cyclic order [v_0, e_0, v_1, e_1, …] around each face.
    pub face_orders: Vec<Vec<usize>>,
}

impl SurfaceComplex {
    /// Global index of a cell in `cells` (vertices, then edges, then faces).
    pub fn cell_index(&self, id: CellId) -> usize {
        match id.dim {
            0 => id.rank,
            1 => self.dims[0] + id.rank,
            _ => self.dims[0] + self.dims[1] + id.rank,
        }
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        &self.cells[self.cell_index(id)]
    }

    pub fn vertex_of(&self, a: Arrow) -> CellId {
        CellId {
            dim: 0,
            rank: self.vertex_of[a],
        }
    }
    pub fn edge_of(&self, a: Arrow) -> CellId {
        CellId {
            dim: 1,
            rank: self.edge_of[a],
        }
    }
    pub fn face_of(&self, a: Arrow) -> CellId {
        CellId {
            dim: 2,
            rank: self.face_of[a],
        }
    }

    /// The cell of dimension `dim` containing arrow `a`.
    pub fn cell_of(&self, dim: u8, a: Arrow) -> CellId {
        match dim {
            0 => self.vertex_of(a),
            1 => self.edge_of(a),
            _ => self.face_of(a),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.dims[0]
    }
    pub fn n_edges(&self) -> usize {
        self.dims[1]
    }
    pub fn n_faces(&self) -> usize {
        self.dims[2]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims[0] as i64 - self.dims[1] as i64 + self.dims[2] as i64
    }

    /// Site of an arrow: `s(a) = ⟨O0(a), O2(a)⟩` with witness `a`.
    pub fn site(&self, a: Arrow) -> Site {
        Site {
            vertex: self.vertex_of(a),
            face: self.face_of(a),
            witness: a,
        }
    }

    /// All sites, listed by witness arrow.
    pub fn sites(&self) -> Vec<Site> {
        (0..self.vertex_of.len()).map(|a| self.site(a)).collect()
    }

    /// Look up the witness arrow of a vertex–face pair, if they intersect.
    pub fn site_lookup(&self, vertex: CellId, face: CellId) -> Option<Site> {
        debug_assert_eq!(vertex.dim, 0);
        debug_assert_eq!(face.dim, 2);
        self.cell(vertex)
            .members
            .iter()
            .copied()
            .find(|&a| self.face_of[a] == face.rank)
            .map(|a| self.site(a))
    }
}

/// Build the surface complex of a valid presentation and re-validate the
/// five complex axioms as a postcondition. An axiom failure here signals
/// a bug, not bad input, hence the dedicated error.
pub fn build_complex(p: &ArrowPresentation) -> Result<SurfaceComplex, PresentationError> {
    let n = p.n_arrows();
    let v_lab = orbit_labels(n, p.t0_slice());
    let e_lab = orbit_labels(n, &p.t1);
    let f_lab = orbit_labels(n, p.t2_slice());

    let mut cells = Vec::new();
    let mut dims = [0usize; 3];
    for (dim, lab, t) in [(0u8, &v_lab, 0u8), (1, &e_lab, 1), (2, &f_lab, 2)] {
        let count = lab.iter().copied().max().map_or(0, |m| m + 1);
        dims[dim as usize] = count;
        let mut min_member = vec![usize::MAX; count];
        for a in 0..n {
            min_member[lab[a]] = min_member[lab[a]].min(a);
        }
        for (rank, &m) in min_member.iter().enumerate() {
            cells.push(Cell {
                id: CellId { dim, rank },
                members: p.orbit(t, m),
            });
        }
    }

    let cx = |dim: u8, rank: usize| -> usize {
        match dim {
            0 => rank,
            1 => dims[0] + rank,
            _ => dims[0] + dims[1] + rank,
        }
    };

    let n_cells = cells.len();
    let mut bd: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_cells];
    let mut cb: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_cells];
    // Bd(x) for x of dim i is the set of orbits O_{i-1}(a), a ∈ x; the
    // boundary relation is exactly non-empty intersection of orbits.
    for a in 0..n {
        let v = cx(0, v_lab[a]);
        let e = cx(1, e_lab[a]);
        let f = cx(2, f_lab[a]);
        bd[e].insert(v);
        cb[v].insert(e);
        bd[f].insert(e);
        cb[e].insert(f);
    }
    let bd: Vec<Vec<usize>> = bd.into_iter().map(|s| s.into_iter().collect()).collect();
    let cb: Vec<Vec<usize>> = cb.into_iter().map(|s| s.into_iter().collect()).collect();

    // Canonical cyclic orders. Around a vertex O0(a):
    //   [O2(a), O1(T0 a), O2(T0 a), O1(T0² a), …, O2(T0^{m-1} a), O1(a)]
    // and around a face O2(a):
    //   [O0(a), O1(a), O0(T2 a), O1(T2 a), …, O0(T2^{n-1} a), O1(T2^{n-1} a)].
    let mut vertex_orders = Vec::with_capacity(dims[0]);
    for c in &cells[..dims[0]] {
        let a0 = c.members[0];
        let mut ord = Vec::with_capacity(2 * c.members.len());
        let mut a = a0;
        for _ in 0..c.members.len() {
            ord.push(cx(2, f_lab[a]));
            a = p.t0(a);
            ord.push(cx(1, e_lab[a]));
        }
        vertex_orders.push(ord);
    }
    let mut face_orders = Vec::with_capacity(dims[2]);
    for c in &cells[cx(2, 0)..] {
        let a0 = c.members[0];
        let mut ord = Vec::with_capacity(2 * c.members.len());
        let mut a = a0;
        for _ in 0..c.members.len() {
            ord.push(cx(0, v_lab[a]));
            ord.push(cx(1, e_lab[a]));
            a = p.t2(a);
        }
        face_orders.push(ord);
    }

    let complex = SurfaceComplex {
        cells,
        dims,
        vertex_of: v_lab,
        edge_of: e_lab,
        face_of: f_lab,
        bd,
        cb,
        vertex_orders,
        face_orders,
    };

    if let Some(v) = validate_csc(&complex).into_iter().next() {
        return Err(PresentationError::CscViolation {
            axiom: v.axiom,
            witness: v.witness,
            detail: "internal: presentation passed AP-1..3 but complex failed".into(),
        });
    }
    Ok(complex)
}

/// Check the five closed-surface-complex axioms plus orientation
/// compatibility on an already built complex. Returns violations; empty
/// means valid.
pub fn validate_csc(c: &SurfaceComplex) -> Vec<Violation> {
    let mut out = Vec::new();
    let idx0 = 0;
    let idx1 = c.dims[0];
    let idx2 = c.dims[0] + c.dims[1];

    // CSC-1: boundary drops dimension by exactly one.
    // CSC-2: bd and cb are transposes.
    for (i, b) in c.bd.iter().enumerate() {
        for &j in b {
            if c.cells[i].id.dim != c.cells[j].id.dim + 1 {
                out.push(Violation {
                    axiom: "CSC-1".into(),
                    witness: vec![c.cells[i].members[0], c.cells[j].members[0]],
                });
            }
            if !c.cb[j].contains(&i) {
                out.push(Violation {
                    axiom: "CSC-2".into(),
                    witness: vec![c.cells[i].members[0]],
                });
            }
        }
    }
    for (i, b) in c.cb.iter().enumerate() {
        for &j in b {
            if !c.bd[j].contains(&i) {
                out.push(Violation {
                    axiom: "CSC-2".into(),
                    witness: vec![c.cells[i].members[0]],
                });
            }
        }
    }
    // CSC-3: every edge has exactly 2 boundary vertices and 2 coboundary faces.
    for e in idx1..idx2 {
        if c.bd[e].len() != 2 || c.cb[e].len() != 2 {
            out.push(Violation {
                axiom: "CSC-3".into(),
                witness: vec![c.cells[e].members[0]],
            });
        }
    }
    // CSC-4 / CSC-5: the stored cyclic orders must enumerate pairwise
    // distinct cells and interlock (Cb(e_k) = {f_k, f_{k+1}} around a
    // vertex, Bd(e_k) = {v_k, v_{k+1}} around a face).
    for (vr, ord) in c.vertex_orders.iter().enumerate() {
        let v = idx0 + vr;
        let m = ord.len() / 2;
        let faces: Vec<usize> = (0..m).map(|k| ord[2 * k]).collect();
        let edges: Vec<usize> = (0..m).map(|k| ord[2 * k + 1]).collect();
        let distinct = faces.iter().collect::<BTreeSet<_>>().len() == m
            && edges.iter().collect::<BTreeSet<_>>().len() == m;
        let mut chained = true;
        for k in 0..m {
            // edge e_k sits between faces f_k and f_{k+1} in our layout
            // [f_0, e'_0, …]: e'_k = O1(T0^{k+1} a) couples f_k, f_{k+1}.
            let want: BTreeSet<usize> = [faces[k], faces[(k + 1) % m]].into_iter().collect();
            let got: BTreeSet<usize> = c.cb[edges[k]].iter().copied().collect();
            if want.len() == 2 && got != want {
                chained = false;
            }
        }
        if !distinct || !chained {
            out.push(Violation {
                axiom: "CSC-4".into(),
                witness: vec![c.cells[v].members[0]],
            });
        }
    }
    for (fr, ord) in c.face_orders.iter().enumerate() {
        let f = idx2 + fr;
        let m = ord.len() / 2;
        let verts: Vec<usize> = (0..m).map(|k| ord[2 * k]).collect();
        let edges: Vec<usize> = (0..m).map(|k| ord[2 * k + 1]).collect();
        let distinct = verts.iter().collect::<BTreeSet<_>>().len() == m
            && edges.iter().collect::<BTreeSet<_>>().len() == m;
        let mut chained = true;
        for k in 0..m {
            let want: BTreeSet<usize> = [verts[k], verts[(k + 1) % m]].into_iter().collect();
            let got: BTreeSet<usize> = c.bd[edges[k]].iter().copied().collect();
            if want.len() == 2 && got != want {
                chained = false;
            }
        }
        if !distinct || !chained {
            out.push(Violation {
                axiom: "CSC-5".into(),
                witness: vec![c.cells[f].members[0]],
            });
        }
    }
    // Orientation compatibility at every site: the predecessor/successor
    // edges of f in Nb(v) are the successor/predecessor edges of v in Nb(f).
    for a in 0..c.vertex_of.len() {
        let v = c.vertex_of[a];
        let f = c.face_of[a];
        let vord = &c.vertex_orders[v];
        let ford = &c.face_orders[f];
        let fi = c.cell_index(CellId { dim: 2, rank: f });
        let vi = c.cell_index(CellId { dim: 0, rank: v });
        let m = vord.len();
        // locate the occurrence of f in Nb(v) whose flanking edges contain O1(a)
        let mut ok = false;
        for k in (0..m).step_by(2) {
            if vord[k] != fi {
                continue;
            }
            let e_pred = vord[(k + m - 1) % m];
            let e_succ = vord[(k + 1) % m];
            for l in (0..ford.len()).step_by(2) {
                if ford[l] != vi {
                    continue;
                }
                let e2_pred = ford[(l + ford.len() - 1) % ford.len()];
                let e2_succ = ford[(l + 1) % ford.len()];
                if e2_pred == e_succ && e2_succ == e_pred {
                    ok = true;
                }
            }
        }
        if !ok {
            out.push(Violation {
                axiom: "CSC-ori".into(),
                witness: vec![a],
            });
        }
    }
    out
}

/// Euler characteristic χ = |Σ⁰| − |Σ¹| + |Σ²|.
pub fn euler_characteristic(p: &ArrowPresentation) -> Result<i64, PresentationError> {
    Ok(build_complex(p)?.euler_characteristic())
}

/// Genus of a connected presentation, `(2 - χ)/2`.
pub fn genus(p: &ArrowPresentation) -> Result<i64, PresentationError> {
    if !p.is_connected() {
        return Err(PresentationError::NotConnected);
    }
    let chi = euler_characteristic(p)?;
    debug_assert!(chi % 2 == 0, "odd Euler characteristic on a valid OCSC");
    Ok((2 - chi) / 2)
}

/// Build a presentation from oriented polygonal faces.
///
/// `faces` lists each face as a cyclic sequence of directed edges
/// `(u, v, tag)`; the tag distinguishes parallel edges. Every directed
/// edge must occur in exactly one face, and its reverse `(v, u, tag)` in
/// exactly one (other or same) face. `T2` is the successor within a face;
/// `T1` maps a directed edge to its reverse; `T0 = T1 ∘ T2⁻¹`.
pub fn from_oriented_faces(
    faces: &[Vec<(usize, usize, usize)>],
    name: &str,
) -> Result<ArrowPresentation, PresentationError> {
    let mut ids = std::collections::BTreeMap::new();
    for f in faces {
        for &de in f {
            let next = ids.len();
            if ids.insert(de, next).is_some() {
                panic!("directed edge {de:?} occurs twice");
            }
        }
    }
    let n = ids.len();
    let mut t2 = vec![usize::MAX; n];
    let mut t1 = vec![usize::MAX; n];
    for f in faces {
        for (k, &de) in f.iter().enumerate() {
            let succ = f[(k + 1) % f.len()];
            t2[ids[&de]] = ids[&succ];
            let rev = (de.1, de.0, de.2);
            t1[ids[&de]] = *ids
                .get(&rev)
                .unwrap_or_else(|| panic!("missing reverse of {de:?}"));
        }
    }
    let t2_inv = invert(&t2);
    let t0 = compose(&t1, &t2_inv);
    ArrowPresentation::new(n, t0, t2, Some(name.to_string()))
}

/// The named presets resolvable by the CLI.
pub fn preset_names() -> Vec<String> {
    let mut v = vec!["minimal-sphere".to_string(), "cube".to_string()];
    for n in 2..=5 {
        for m in 2..=5 {
            v.push(format!("torus-{n}x{m}"));
        }
    }
    v
}

/// Resolve a preset by name: `minimal-sphere`, `cube`, or `torus-NxM`.
pub fn preset(name: &str) -> Result<ArrowPresentation, PresentationError> {
    if name == "minimal-sphere" {
        return minimal_sphere();
    }
    if name == "cube" {
        return cube();
    }
    if let Some(rest) = name.strip_prefix("torus-") {
        if let Some((a, b)) = rest.split_once('x') {
            if let (Ok(n), Ok(m)) = (a.parse::<usize>(), b.parse::<usize>()) {
                if n >= 2 && m >= 2 {
                    return torus(n, m);
                }
            }
        }
    }
    Err(PresentationError::UnknownPreset(name.to_string()))
}

/// The 2-vertex, 2-edge, 2-face sphere on 4 arrows.
pub fn minimal_sphere() -> Result<ArrowPresentation, PresentationError> {
    ArrowPresentation::new(
        4,
        vec![2, 3, 0, 1],
        vec![3, 2, 1, 0],
        Some("minimal-sphere".into()),
    )
}

/// The cube: 8 vertices, 12 edges, 6 quadrangle faces.
pub fn cube() -> Result<ArrowPresentation, PresentationError> {
    let quads = [
        [0, 3, 2, 1],
        [4, 5, 6, 7],
        [0, 1, 5, 4],
        [1, 2, 6, 5],
        [2, 3, 7, 6],
        [3, 0, 4, 7],
    ];
    let faces: Vec<Vec<(usize, usize, usize)>> = quads
        .iter()
        .map(|q| (0..4).map(|k| (q[k], q[(k + 1) % 4], 0)).collect())
        .collect();
    from_oriented_faces(&faces, "cube")
}

/// Square lattice on the torus with `n × m` vertices (n, m ≥ 2 so that no
/// edge is a loop). Counts: n·m vertices, 2·n·m edges, n·m faces.
pub fn torus(n: usize, m: usize) -> Result<ArrowPresentation, PresentationError> {
    assert!(n >= 2 && m >= 2, "torus preset needs n, m >= 2");
    // Directed edges are tagged by (kind, i, j): kind 0 = horizontal from
    // (i,j) to (i+1,j), kind 1 = vertical from (i,j) to (i,j+1). The tag
    // keeps parallel edges distinct when n = 2 or m = 2.
    let vid = |i: usize, j: usize| (i % n) * m + (j % m);
    let mut faces = Vec::new();
    for i in 0..n {
        for j in 0..m {
            let h = |i: usize, j: usize| (vid(i, j), vid(i + 1, j), 2 * (vid(i, j)));
            let v = |i: usize, j: usize| (vid(i, j), vid(i, j + 1), 2 * (vid(i, j)) + 1);
            let rev = |(a, b, t): (usize, usize, usize)| (b, a, t);
            faces.push(vec![h(i, j), v(i + 1, j), rev(h(i, j + 1)), rev(v(i, j))]);
        }
    }
    from_oriented_faces(&faces, &format!("torus-{n}x{m}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_sphere_is_valid_with_expected_t1() {
        let p = minimal_sphere().unwrap();
        assert_eq!(p.n_arrows(), 4);
        let t1: Vec<usize> = (0..4).map(|a| p.t1(a)).collect();
        assert_eq!(t1, vec![1, 0, 3, 2]);
    }

    #[test]
    fn identity_permutations_violate_ap1() {
        let errs = ArrowPresentation::validate_raw(2, &[0, 1], &[0, 1]);
        assert!(errs.iter().all(|v| v.axiom == "AP-1"));
        assert!(!errs.is_empty());
        assert!(matches!(
            ArrowPresentation::new(2, vec![0, 1], vec![0, 1], None),
            Err(PresentationError::Ap1Violation { .. })
        ));
    }

    #[test]
    fn torus_2x2_counts() {
        let p = torus(2, 2).unwrap();
        assert_eq!(p.n_arrows(), 16);
        let c = build_complex(&p).unwrap();
        assert_eq!(c.dims, [4, 8, 4]);
        assert_eq!(c.euler_characteristic(), 0);
        assert_eq!(genus(&p).unwrap(), 1);
    }

    #[test]
    fn orbits_of_presets() {
        let p = minimal_sphere().unwrap();
        assert_eq!(p.orbit(0, 0), vec![0, 2]);
        // every T1-orbit has exactly two elements
        for a in 0..4 {
            assert_eq!(p.orbit(1, a).len(), 2);
            assert_ne!(p.t1(a), a);
        }
        let t = torus(2, 2).unwrap();
        for a in 0..t.n_arrows() {
            assert_eq!(t.orbit(2, a).len(), 4);
        }
    }

    #[test]
    fn lemma_inverse_identities() {
        for name in ["minimal-sphere", "cube", "torus-2x3", "torus-3x3"] {
            let p = preset(name).unwrap();
            for a in 0..p.n_arrows() {
                assert_eq!(p.t2_inv(a), p.t1(p.t0(a)));
                assert_eq!(p.t0_inv(a), p.t2(p.t1(a)));
                // orbit(i,a) ∩ orbit(j,a) = {a} for i < j
                for (i, j) in [(0u8, 1u8), (0, 2), (1, 2)] {
                    let oi: BTreeSet<_> = p.orbit(i, a).into_iter().collect();
                    let oj: BTreeSet<_> = p.orbit(j, a).into_iter().collect();
                    let inter: Vec<_> = oi.intersection(&oj).collect();
                    assert_eq!(inter, vec![&a]);
                }
            }
        }
    }

    #[test]
    fn cube_complex() {
        let p = cube().unwrap();
        assert_eq!(p.n_arrows(), 24);
        let c = build_complex(&p).unwrap();
        assert_eq!(c.dims, [8, 12, 6]);
        assert_eq!(c.euler_characteristic(), 2);
        assert_eq!(genus(&p).unwrap(), 0);
    }

    #[test]
    fn csc_axioms_and_arrow_count() {
        for name in ["minimal-sphere", "cube", "torus-2x2", "torus-3x4"] {
            let p = preset(name).unwrap();
            let c = build_complex(&p).unwrap();
            assert!(validate_csc(&c).is_empty());
            assert_eq!(p.n_arrows(), 2 * c.n_edges());
            let deg_sum: usize = c.cells[..c.dims[0]].iter().map(|v| v.members.len()).sum();
            assert_eq!(deg_sum, p.n_arrows());
            let bdy_sum: usize = c.cells[c.dims[0] + c.dims[1]..]
                .iter()
                .map(|f| f.members.len())
                .sum();
            assert_eq!(bdy_sum, p.n_arrows());
        }
    }

    #[test]
    fn site_edge_pair() {
        // Cb(v) ∩ Bd(f) = {O1(a), O1(T0 a)} for each site ⟨v, f⟩ = s(a).
        let p = preset("torus-3x3").unwrap();
        let c = build_complex(&p).unwrap();
        for a in 0..p.n_arrows() {
            let s = c.site(a);
            let cv: BTreeSet<usize> = c.cb[c.cell_index(s.vertex)].iter().copied().collect();
            let bf: BTreeSet<usize> = c.bd[c.cell_index(s.face)].iter().copied().collect();
            let inter: BTreeSet<usize> = cv.intersection(&bf).copied().collect();
            let want: BTreeSet<usize> = [
                c.cell_index(c.edge_of(a)),
                c.cell_index(c.edge_of(p.t0(a))),
            ]
            .into_iter()
            .collect();
            assert_eq!(inter, want);
        }
    }

    #[test]
    fn sites_are_bijective_with_arrows() {
        let p = preset("torus-2x2").unwrap();
        let c = build_complex(&p).unwrap();
        let sites = c.sites();
        assert_eq!(sites.len(), 16);
        for (a, s) in sites.iter().enumerate() {
            assert_eq!(s.witness, a);
            assert_eq!(s.vertex, c.vertex_of(a));
            assert_eq!(s.face, c.face_of(a));
            let looked = c.site_lookup(s.vertex, s.face).unwrap();
            assert_eq!(looked.witness, a);
        }
        let m = minimal_sphere().unwrap();
        assert_eq!(build_complex(&m).unwrap().sites().len(), 4);
    }

    #[test]
    fn connectivity() {
        let p = minimal_sphere().unwrap();
        assert!(p.is_connected());
        let u = p.disjoint_union(&p);
        assert!(!u.is_connected());
        assert!(matches!(genus(&u), Err(PresentationError::NotConnected)));
        assert_eq!(build_complex(&u).unwrap().euler_characteristic(), 4);
    }

    #[test]
    fn json_round_trip() {
        let p = preset("torus-2x3").unwrap();
        let j = serde_json::to_string(&p.to_json()).unwrap();
        let back: ComplexJson = serde_json::from_str(&j).unwrap();
        let q = ArrowPresentation::from_json(&back).unwrap();
        assert_eq!(p, q);
    }
}
