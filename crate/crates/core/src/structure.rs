//! The structure operators F, G, H on R^{4n}.
//!
//! Coordinates are split into four blocks of size `n`, indexed from zero:
//! B0 = [0, n), B1 = [n, 2n), B2 = [2n, 3n), B3 = [3n, 4n). Each operator maps
//! basis vector `e_a` to `±e_b` with `a` and `b` sharing their offset inside
//! their blocks:
//!
//! ```text
//! F: B0 -> +B1, B1 -> -B0, B2 -> +B3, B3 -> -B2
//! G: B0 -> +B2, B1 -> -B3, B2 -> -B0, B3 -> +B1
//! H: B0 -> +B3, B1 -> +B2, B2 -> -B1, B3 -> -B0
//! ```
//!
//! Operators are stored as signed permutations so the quaternion relations can
//! be checked in exact integer arithmetic.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Chart dimension: block size `n`, total dimension `4n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct ChartDim {
    n: usize,
}

impl ChartDim {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(ChartDim { n })
    }

    /// Block size.
    pub fn n(self) -> usize {
        self.n
    }

    /// Chart dimension `4n`.
    pub fn total(self) -> usize {
        4 * self.n
    }

    /// Index of entry `offset` inside block `block` (0..4).
    pub fn index(self, block: usize, offset: usize) -> usize {
        debug_assert!(block < 4 && offset < self.n);
        block * self.n + offset
    }
}

impl TryFrom<usize> for ChartDim {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        ChartDim::new(n)
    }
}

impl From<ChartDim> for usize {
    fn from(d: ChartDim) -> usize {
        d.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StructureKind {
    F,
    G,
    H,
}

impl StructureKind {
    pub const ALL: [StructureKind; 3] = [StructureKind::F, StructureKind::G, StructureKind::H];

    /// Block image `(target block, sign)` of each source block.
    fn block_action(self) -> [(usize, i8); 4] {
        match self {
            StructureKind::F => [(1, 1), (0, -1), (3, 1), (2, -1)],
            StructureKind::G => [(2, 1), (3, -1), (0, -1), (1, 1)],
            StructureKind::H => [(3, 1), (2, 1), (1, -1), (0, -1)],
        }
    }
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StructureKind::F => "F",
            StructureKind::G => "G",
            StructureKind::H => "H",
        };
        f.write_str(s)
    }
}

impl FromStr for StructureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "F" | "f" => Ok(StructureKind::F),
            "G" | "g" => Ok(StructureKind::G),
            "H" | "h" => Ok(StructureKind::H),
            other => Err(Error::InvalidArgument(format!(
                "unknown structure '{other}' (expected F, G or H)"
            ))),
        }
    }
}

/// A signed permutation of the coordinate axes: `e_a ↦ sign[a] · e_{target[a]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPerm {
    action: Vec<(usize, i8)>,
}

impl SignedPerm {
    /// Builds a signed permutation, rejecting non-bijective targets and signs
    /// other than ±1.
    pub fn new(action: Vec<(usize, i8)>) -> Result<Self> {
        let len = action.len();
        let mut seen = vec![false; len];
        for &(target, sign) in &action {
            if target >= len || seen[target] {
                return Err(Error::InvalidArgument(format!(
                    "signed permutation target {target} is out of range or repeated"
                )));
            }
            if sign != 1 && sign != -1 {
                return Err(Error::InvalidArgument(format!(
                    "signed permutation sign must be ±1, got {sign}"
                )));
            }
            seen[target] = true;
        }
        Ok(SignedPerm { action })
    }

    pub fn identity(len: usize) -> Self {
        SignedPerm {
            action: (0..len).map(|a| (a, 1)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.action.len()
    }

    pub fn is_empty(&self) -> bool {
        self.action.is_empty()
    }

    pub fn action(&self) -> &[(usize, i8)] {
        &self.action
    }

    /// Image of basis vector `e_a` as `(target, sign)`.
    pub fn image(&self, a: usize) -> (usize, i8) {
        self.action[a]
    }

    pub fn negated(&self) -> Self {
        SignedPerm {
            action: self.action.iter().map(|&(t, s)| (t, -s)).collect(),
        }
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.len()];
        self.action.iter().all(|&(t, s)| {
            let fresh = t < seen.len() && !seen[t] && (s == 1 || s == -1);
            if fresh {
                seen[t] = true;
            }
            fresh
        })
    }

    pub fn apply(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(self.len(), v.len())?;
        let mut out = DVector::zeros(v.len());
        for (a, &(t, s)) in self.action.iter().enumerate() {
            out[t] = f64::from(s) * v[a];
        }
        Ok(out)
    }

    /// Integer dense rendering, `M[target][a] = sign`.
    pub fn to_int_matrix(&self) -> Vec<Vec<i8>> {
        let n = self.len();
        let mut m = vec![vec![0i8; n]; n];
        for (a, &(t, s)) in self.action.iter().enumerate() {
            m[t][a] = s;
        }
        m
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (a, &(t, s)) in self.action.iter().enumerate() {
            m[(t, a)] = f64::from(s);
        }
        m
    }
}

/// One of F, G, H on a fixed chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureOperator {
    kind: StructureKind,
    dim: ChartDim,
    perm: SignedPerm,
}

impl StructureOperator {
    pub fn build(kind: StructureKind, dim: ChartDim) -> Self {
        let n = dim.n();
        let mut action = vec![(0usize, 1i8); dim.total()];
        for (block, &(target_block, sign)) in kind.block_action().iter().enumerate() {
            for i in 0..n {
                action[dim.index(block, i)] = (dim.index(target_block, i), sign);
            }
        }
        StructureOperator {
            kind,
            dim,
            perm: SignedPerm { action },
        }
    }

    /// Wraps an arbitrary signed permutation under a kind label. Used to
    /// feed deliberately corrupted operators to the relation checks.
    pub fn from_perm(kind: StructureKind, dim: ChartDim, perm: SignedPerm) -> Result<Self> {
        check_len(dim.total(), perm.len())?;
        Ok(StructureOperator { kind, dim, perm })
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn dim(&self) -> ChartDim {
        self.dim
    }

    pub fn perm(&self) -> &SignedPerm {
        &self.perm
    }

    pub fn apply(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        self.perm.apply(v)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.perm.to_dense()
    }
}

impl AsRef<SignedPerm> for StructureOperator {
    fn as_ref(&self) -> &SignedPerm {
        &self.perm
    }
}

impl AsRef<SignedPerm> for SignedPerm {
    fn as_ref(&self) -> &SignedPerm {
        self
    }
}

/// The composition `a ∘ b` (apply `b` first).
pub fn compose(a: impl AsRef<SignedPerm>, b: impl AsRef<SignedPerm>) -> Result<SignedPerm> {
    let (a, b) = (a.as_ref(), b.as_ref());
    check_len(a.len(), b.len())?;
    let action = b
        .action
        .iter()
        .map(|&(tb, sb)| {
            let (ta, sa) = a.action[tb];
            (ta, sa * sb)
        })
        .collect();
    Ok(SignedPerm { action })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub n: usize,
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Checks the quaternion relations on the canonical operators for `dim`.
pub fn verify_relations(dim: ChartDim) -> RelationReport {
    let [f, g, h] = StructureKind::ALL.map(|k| StructureOperator::build(k, dim));
    verify_operators(&f, &g, &h)
}

/// Checks the nine quaternion relations together with bijectivity,
/// antisymmetry and orthogonality of each operator.
pub fn verify_operators(f: &StructureOperator, g: &StructureOperator, h: &StructureOperator) -> RelationReport {
    let len = f.perm.len();
    let same_len = g.perm.len() == len && h.perm.len() == len;
    let minus_id = SignedPerm::identity(len).negated();
    let mut checks = Vec::new();

    let mut relation = |name: &str, a: &SignedPerm, b: &SignedPerm, expected: &SignedPerm| {
        let passed = same_len && compose(a, b).map(|c| &c == expected).unwrap_or(false);
        checks.push(RelationCheck {
            name: name.to_string(),
            passed,
        });
    };
    let (fp, gp, hp) = (&f.perm, &g.perm, &h.perm);
    relation("F^2 = -I", fp, fp, &minus_id);
    relation("G^2 = -I", gp, gp, &minus_id);
    relation("H^2 = -I", hp, hp, &minus_id);
    relation("GH = F", gp, hp, fp);
    relation("HG = -F", hp, gp, &fp.negated());
    relation("HF = G", hp, fp, gp);
    relation("FH = -G", fp, hp, &gp.negated());
    relation("FG = H", fp, gp, hp);
    relation("GF = -H", gp, fp, &hp.negated());

    for op in [f, g, h] {
        let m = op.perm.to_int_matrix();
        let size = m.len();
        let antisymmetric = (0..size).all(|r| (0..size).all(|c| m[r][c] + m[c][r] == 0));
        let orthogonal = (0..size).all(|r| {
            (0..size).all(|c| {
                let dot: i32 = (0..size).map(|k| i32::from(m[k][r]) * i32::from(m[k][c])).sum();
                dot == i32::from(r == c)
            })
        });
        checks.push(RelationCheck {
            name: format!("{} is a signed permutation", op.kind),
            passed: op.perm.is_bijection(),
        });
        checks.push(RelationCheck {
            name: format!("{} antisymmetric", op.kind),
            passed: antisymmetric,
        });
        checks.push(RelationCheck {
            name: format!("{} orthogonal", op.kind),
            passed: orthogonal,
        });
    }

    RelationReport { n: len / 4, checks }
}
