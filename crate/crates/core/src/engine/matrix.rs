//! Matrix formulation of one step.
//!
//! With `R`, `In` and `P` the reactions × entities incidence matrices of
//! reactants, inhibitors and products, and `t` the 0/1 state vector:
//!
//! ```text
//! t' = clip_positive( clip_enabled( (R - In) t ) · P )
//! ```
//!
//! where `clip_enabled` keeps row `i` iff its score reaches `|R_i|` and
//! `clip_positive` maps positive entries to 1. The context enters as the
//! element-wise max of state and context vectors. All arithmetic is on
//! integers.

use crate::error::DimensionError;
use crate::state::State;
use crate::system::ReactionSystem;

use super::Engine;

/// Largest system dimension accepted; keeps every accumulator far inside i64.
pub const MAX_DIMENSION: usize = 1 << 30;

/// Density below which [`KernelChoice::Auto`] picks the sparse kernel.
pub const DEFAULT_SPARSE_THRESHOLD: f64 = 0.25;

/// Dense step matrices, row-major with one row per reaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepMatrices {
    n_reactions: usize,
    n_entities: usize,
    rminus_in: Vec<i8>,
    products: Vec<u8>,
    thresholds: Vec<i64>,
}

impl StepMatrices {
    pub fn build(sys: &ReactionSystem) -> Self {
        let (m, n) = (sys.n_reactions(), sys.n_entities());
        assert!(
            m <= MAX_DIMENSION && n <= MAX_DIMENSION,
            "system of {m} reactions x {n} entities exceeds the supported matrix size"
        );
        let mut rminus_in = vec![0i8; m * n];
        let mut products = vec![0u8; m * n];
        let mut thresholds = Vec::with_capacity(m);
        for (i, r) in sys.reactions().iter().enumerate() {
            let row = i * n;
            for e in r.reactants() {
                rminus_in[row + e.index()] = 1;
            }
            for e in r.inhibitors() {
                rminus_in[row + e.index()] = -1;
            }
            for e in r.products() {
                products[row + e.index()] = 1;
            }
            thresholds.push(r.reactants().len() as i64);
        }
        StepMatrices {
            n_reactions: m,
            n_entities: n,
            rminus_in,
            products,
            thresholds,
        }
    }

    pub fn n_reactions(&self) -> usize {
        self.n_reactions
    }

    pub fn n_entities(&self) -> usize {
        self.n_entities
    }

    pub fn rminus_in_row(&self, i: usize) -> &[i8] {
        &self.rminus_in[i * self.n_entities..(i + 1) * self.n_entities]
    }

    pub fn products_row(&self, i: usize) -> &[u8] {
        &self.products[i * self.n_entities..(i + 1) * self.n_entities]
    }

    /// `(R - In)` as nested rows.
    pub fn rminus_in_rows(&self) -> Vec<Vec<i8>> {
        (0..self.n_reactions)
            .map(|i| self.rminus_in_row(i).to_vec())
            .collect()
    }

    pub fn products_rows(&self) -> Vec<Vec<u8>> {
        (0..self.n_reactions)
            .map(|i| self.products_row(i).to_vec())
            .collect()
    }

    /// `|R_i|` per reaction.
    pub fn thresholds(&self) -> &[i64] {
        &self.thresholds
    }

    /// Fraction of nonzero entries over both matrices.
    pub fn density(&self) -> f64 {
        let cells = 2 * self.n_reactions * self.n_entities;
        if cells == 0 {
            return 0.0;
        }
        let nnz = self.rminus_in.iter().filter(|&&x| x != 0).count()
            + self.products.iter().filter(|&&x| x != 0).count();
        nnz as f64 / cells as f64
    }
}

/// `out[i] = 1` iff `scores[i] >= thresholds[i]`.
pub fn clip_enabled(scores: &[i64], thresholds: &[i64]) -> Vec<u8> {
    assert_eq!(scores.len(), thresholds.len(), "length mismatch");
    scores
        .iter()
        .zip(thresholds)
        .map(|(s, th)| u8::from(s >= th))
        .collect()
}

/// `out[j] = 1` iff `x[j] > 0`.
pub fn clip_positive(x: &[i64]) -> Vec<u8> {
    x.iter().map(|&v| u8::from(v > 0)).collect()
}

/// Nonzeros of the step matrices in compressed-row form.
#[derive(Debug, Clone)]
struct SparseRows {
    rmi_offsets: Vec<usize>,
    rmi_cols: Vec<u32>,
    rmi_vals: Vec<i8>,
    prod_offsets: Vec<usize>,
    prod_cols: Vec<u32>,
}

impl SparseRows {
    fn from_dense(m: &StepMatrices) -> Self {
        let mut s = SparseRows {
            rmi_offsets: vec![0],
            rmi_cols: Vec::new(),
            rmi_vals: Vec::new(),
            prod_offsets: vec![0],
            prod_cols: Vec::new(),
        };
        for i in 0..m.n_reactions {
            for (j, &v) in m.rminus_in_row(i).iter().enumerate() {
                if v != 0 {
                    s.rmi_cols.push(j as u32);
                    s.rmi_vals.push(v);
                }
            }
            s.rmi_offsets.push(s.rmi_cols.len());
            for (j, &v) in m.products_row(i).iter().enumerate() {
                if v != 0 {
                    s.prod_cols.push(j as u32);
                }
            }
            s.prod_offsets.push(s.prod_cols.len());
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Dense,
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum KernelChoice {
    Dense,
    Sparse,
    /// Sparse when [`StepMatrices::density`] is below the threshold.
    #[default]
    Auto,
}

impl KernelChoice {
    pub fn resolve(self, m: &StepMatrices, sparse_threshold: f64) -> Kernel {
        match self {
            KernelChoice::Dense => Kernel::Dense,
            KernelChoice::Sparse => Kernel::Sparse,
            KernelChoice::Auto if m.density() < sparse_threshold => Kernel::Sparse,
            KernelChoice::Auto => Kernel::Dense,
        }
    }
}

impl std::str::FromStr for KernelChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dense" => Ok(KernelChoice::Dense),
            "sparse" => Ok(KernelChoice::Sparse),
            "auto" => Ok(KernelChoice::Auto),
            other => Err(format!("unknown matrix kernel `{other}` (expected dense, sparse or auto)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatrixEngine {
    m: StepMatrices,
    kernel: Kernel,
    sparse: Option<SparseRows>,
    t: Vec<i64>,
    scores: Vec<i64>,
    acc: Vec<i64>,
}

impl MatrixEngine {
    pub fn new(sys: &ReactionSystem, choice: KernelChoice) -> Self {
        Self::with_threshold(sys, choice, DEFAULT_SPARSE_THRESHOLD)
    }

    pub fn with_threshold(sys: &ReactionSystem, choice: KernelChoice, sparse_threshold: f64) -> Self {
        let m = StepMatrices::build(sys);
        let kernel = choice.resolve(&m, sparse_threshold);
        let sparse = (kernel == Kernel::Sparse).then(|| SparseRows::from_dense(&m));
        MatrixEngine {
            t: vec![0; m.n_entities],
            scores: vec![0; m.n_reactions],
            acc: vec![0; m.n_entities],
            m,
            kernel,
            sparse,
        }
    }

    pub fn matrices(&self) -> &StepMatrices {
        &self.m
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    /// `(R - In) · t` for a 0/1 vector `t`.
    pub fn scores(&self, t: &[i64]) -> Vec<i64> {
        let mut out = vec![0; self.m.n_reactions];
        self.scores_into(t, &mut out);
        out
    }

    fn scores_into(&self, t: &[i64], out: &mut [i64]) {
        match &self.sparse {
            Some(sp) => {
                for (i, o) in out.iter_mut().enumerate() {
                    let (lo, hi) = (sp.rmi_offsets[i], sp.rmi_offsets[i + 1]);
                    *o = sp.rmi_cols[lo..hi]
                        .iter()
                        .zip(&sp.rmi_vals[lo..hi])
                        .map(|(&j, &v)| i64::from(v) * t[j as usize])
                        .sum();
                }
            }
            None => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = self
                        .m
                        .rminus_in_row(i)
                        .iter()
                        .zip(t)
                        .map(|(&v, &x)| i64::from(v) * x)
                        .sum();
                }
            }
        }
    }

    /// `a · P` for a 0/1 reaction vector `a`, gathered over the rows with
    /// `a[i] = 1`.
    pub fn produce(&self, a: &[u8]) -> Vec<i64> {
        let mut out = vec![0; self.m.n_entities];
        self.produce_into(a.iter().map(|&x| x != 0), &mut out);
        out
    }

    fn produce_into<I: Iterator<Item = bool>>(&self, a: I, out: &mut [i64]) {
        out.iter_mut().for_each(|x| *x = 0);
        for (i, on) in a.enumerate() {
            if !on {
                continue;
            }
            match &self.sparse {
                Some(sp) => {
                    for &j in &sp.prod_cols[sp.prod_offsets[i]..sp.prod_offsets[i + 1]] {
                        out[j as usize] += 1;
                    }
                }
                None => {
                    for (o, &p) in out.iter_mut().zip(self.m.products_row(i)) {
                        *o += i64::from(p);
                    }
                }
            }
        }
    }
}

impl Engine for MatrixEngine {
    fn label(&self) -> &'static str {
        match self.kernel {
            Kernel::Dense => "matrix-dense",
            Kernel::Sparse => "matrix-sparse",
        }
    }

    fn n_entities(&self) -> usize {
        self.m.n_entities
    }

    fn step_into(&mut self, d: &State, c: &State, out: &mut State) -> Result<(), DimensionError> {
        let n = self.m.n_entities;
        DimensionError::check(n, d.len())?;
        DimensionError::check(n, c.len())?;
        DimensionError::check(n, out.len())?;

        let mut t = std::mem::take(&mut self.t);
        let mut scores = std::mem::take(&mut self.scores);
        let mut acc = std::mem::take(&mut self.acc);

        // max(d, c) element-wise
        for (j, x) in t.iter_mut().enumerate() {
            *x = i64::from(d.contains(j)).max(i64::from(c.contains(j)));
        }
        self.scores_into(&t, &mut scores);
        let thresholds = &self.m.thresholds;
        self.produce_into(scores.iter().zip(thresholds).map(|(s, th)| s >= th), &mut acc);
        out.clear();
        for (j, &v) in acc.iter().enumerate() {
            if v > 0 {
                out.insert(j);
            }
        }

        self.t = t;
        self.scores = scores;
        self.acc = acc;
        Ok(())
    }
}
