//! The covariant copying family: seventeen parameters, the output state in
//! block and tensor form, positivity conditions, and the optimal member.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::angular::{
    coupled_basis_matrix, tensor_coeffs, CoupledLabel, TensorCoefficients, TensorOpIndex,
};
use crate::error::{Error, Result};
use crate::linalg::{
    herm_eig, kron, kron_vec, partial_trace, unitarity_residual, ComplexMatrix, C64, ZERO,
};

const RANGE_SLACK: f64 = 1e-12;

/// Pure states `alpha|up up> + beta|down down>` up to local unitaries.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntanglementClass {
    alpha: f64,
}

impl EntanglementClass {
    /// `alpha` must lie in `[0, 1/sqrt 2]`.
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=FRAC_1_SQRT_2 + RANGE_SLACK).contains(&alpha) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        Ok(Self {
            alpha: alpha.min(FRAC_1_SQRT_2),
        })
    }

    /// Maps `alpha` in `[0, 1]` onto the canonical representative, using
    /// that `alpha` and `sqrt(1 - alpha^2)` label the same class.
    pub fn folded(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!("alpha = {alpha} is not in [0, 1]")));
        }
        Self::new(alpha.min((1.0 - alpha * alpha).sqrt()))
    }

    pub fn separable() -> Self {
        Self { alpha: 0.0 }
    }

    pub fn maximally_entangled() -> Self {
        Self {
            alpha: FRAC_1_SQRT_2,
        }
    }

    /// The class copied worst, `alpha = sqrt(1/2 - sqrt(15)/10)`.
    pub fn worst_copied() -> Self {
        Self {
            alpha: (0.5 - 15f64.sqrt() / 10.0).sqrt(),
        }
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    pub fn beta(self) -> f64 {
        (1.0 - self.alpha * self.alpha).sqrt()
    }

    /// `alpha^2 (1 - alpha^2)`.
    pub fn x(self) -> f64 {
        let a2 = self.alpha * self.alpha;
        a2 * (1.0 - a2)
    }

    /// `2 alpha^2 - 1`.
    pub fn s(self) -> f64 {
        2.0 * self.alpha * self.alpha - 1.0
    }

    /// `2 alpha beta`, the input concurrence.
    pub fn w(self) -> f64 {
        2.0 * self.alpha * self.beta()
    }

    /// Canonical representative on qubits (1,2).
    pub fn psi(self) -> [C64; 4] {
        [
            C64::new(self.alpha, 0.0),
            ZERO,
            ZERO,
            C64::new(self.beta(), 0.0),
        ]
    }
}

/// `(u1 (x) u2)(alpha|up up> + beta|down down>)`.
pub fn omega_state(
    class: EntanglementClass,
    u1: &ComplexMatrix,
    u2: &ComplexMatrix,
) -> Result<Vec<C64>> {
    for u in [u1, u2] {
        if u.rows() != 2 || u.cols() != 2 {
            return Err(Error::DimensionMismatch("expected 2x2 unitaries".into()));
        }
        let residual = unitarity_residual(u);
        if residual > 1e-12 {
            return Err(Error::NotUnitary { residual });
        }
    }
    Ok(kron(u1, u2).mul_vec(&class.psi()))
}

/// `|psi><psi| (x) 1/4` on qubits (1,2) (x) (3,4).
pub fn input_state(class: EntanglementClass) -> ComplexMatrix {
    let p = ComplexMatrix::projector(&class.psi());
    kron(&p, &ComplexMatrix::identity(4).scale_real(0.25))
}

/// Indices (1-based) of the parameters that must be real.
pub const REAL_PARAMS: [usize; 9] = [1, 2, 4, 5, 6, 8, 13, 14, 16];

/// The seventeen coefficients `A1..A17` of the covariant family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClonerParams {
    a: [C64; 17],
}

impl Default for ClonerParams {
    fn default() -> Self {
        Self { a: [ZERO; 17] }
    }
}

impl ClonerParams {
    pub fn zeros() -> Self {
        Self::default()
    }

    /// Every coefficient equal to one: the identity map on the input.
    pub fn identity_map() -> Self {
        Self {
            a: [C64::new(1.0, 0.0); 17],
        }
    }

    /// `A_i` with `i` in `1..=17`.
    pub fn get(&self, i: usize) -> C64 {
        assert!((1..=17).contains(&i), "parameter index {i} not in 1..=17");
        self.a[i - 1]
    }

    pub fn re(&self, i: usize) -> f64 {
        self.get(i).re
    }

    pub fn set(&mut self, i: usize, value: C64) -> &mut Self {
        assert!((1..=17).contains(&i), "parameter index {i} not in 1..=17");
        self.a[i - 1] = value;
        self
    }

    pub fn set_re(&mut self, i: usize, value: f64) -> &mut Self {
        self.set(i, C64::new(value, 0.0))
    }

    pub fn as_array(&self) -> &[C64; 17] {
        &self.a
    }

    /// `(9 A6 + 3 A8 + 3 A14 + A16) / 16`, the trace of the output.
    pub fn trace(&self) -> f64 {
        (9.0 * self.re(6) + 3.0 * self.re(8) + 3.0 * self.re(14) + self.re(16)) / 16.0
    }

    pub fn check_reality(&self) -> Result<()> {
        for i in REAL_PARAMS {
            let im = self.get(i).im;
            if im.abs() > 1e-14 {
                return Err(Error::Domain(format!(
                    "A{i} must be real, has imaginary part {im:e}"
                )));
            }
        }
        Ok(())
    }

    /// Reality and trace constraints.
    pub fn validate(&self) -> Result<()> {
        self.check_reality()?;
        let t = self.trace();
        if (t - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("output trace {t} differs from 1")));
        }
        Ok(())
    }

    /// Multiplier `alpha(j1,j3,j2,j4)_{KK'}` of the tensor expansion for a
    /// (1,3) label and a (2,4) label; zero where the family has no
    /// coefficient (the input expansion vanishes there).
    ///
    /// The conventional labelling gives two parameters the same label
    /// `alpha(1,1,1,0)_11`. A3 carries that label; A7 is the remaining
    /// coefficient `alpha(1,1,1,0)_01`, which is the assignment that makes
    /// the tensor expansion agree with the block form.
    pub fn multiplier(&self, i13: TensorOpIndex, i24: TensorOpIndex) -> C64 {
        let key = (i13.ja(), i13.jb(), i24.ja(), i24.jb(), i13.k(), i24.k());
        if let Some(n) = param_number(key) {
            return self.get(n);
        }
        let (j1, j3, j2, j4, k, kp) = key;
        match param_number((j3, j1, j4, j2, k, kp)) {
            Some(n) => self.get(n).conj(),
            None => ZERO,
        }
    }
}

fn param_number(key: (u8, u8, u8, u8, u8, u8)) -> Option<usize> {
    Some(match key {
        (1, 1, 1, 1, 1, 1) => 1,
        (1, 1, 1, 1, 1, 0) => 2,
        (1, 1, 1, 0, 1, 1) => 3,
        (1, 1, 0, 0, 1, 0) => 4,
        (1, 1, 1, 1, 0, 1) => 5,
        (1, 1, 1, 1, 0, 0) => 6,
        (1, 1, 1, 0, 0, 1) => 7,
        (1, 1, 0, 0, 0, 0) => 8,
        (1, 0, 1, 1, 1, 1) => 9,
        (1, 0, 1, 1, 1, 0) => 10,
        (1, 0, 1, 0, 1, 1) => 11,
        (1, 0, 0, 0, 1, 0) => 12,
        (0, 0, 1, 1, 0, 1) => 13,
        (0, 0, 1, 1, 0, 0) => 14,
        (0, 0, 1, 0, 0, 1) => 15,
        (0, 0, 0, 0, 0, 0) => 16,
        (1, 0, 0, 1, 1, 1) => 17,
        _ => return None,
    })
}

/// Output of a member of the family for one class.
#[derive(Debug, Clone)]
pub struct OutputState {
    /// 16x16 density operator in qubit order (1,2,3,4).
    pub rho: ComplexMatrix,
    pub class: EntanglementClass,
    pub params: ClonerParams,
}

impl OutputState {
    /// Reduced state of the first copy (qubits 1,2).
    pub fn first_copy(&self) -> ComplexMatrix {
        partial_trace(&self.rho, &[0, 1]).expect("16x16 output")
    }

    /// Reduced state of the second copy (qubits 3,4).
    pub fn second_copy(&self) -> ComplexMatrix {
        partial_trace(&self.rho, &[2, 3]).expect("16x16 output")
    }
}

fn label(j13: u8, m13: i8, j24: u8, m24: i8) -> CoupledLabel {
    CoupledLabel::new(j13, m13, j24, m24).expect("static label")
}

/// Coupled-basis labels of the five diagonal blocks.
pub fn block_bases() -> [Vec<CoupledLabel>; 5] {
    [
        vec![
            label(1, 1, 1, 1),
            label(1, 0, 1, 0),
            label(1, -1, 1, -1),
            label(1, 0, 0, 0),
            label(0, 0, 1, 0),
            label(0, 0, 0, 0),
        ],
        vec![
            label(1, 1, 1, 0),
            label(1, 0, 1, -1),
            label(1, 1, 0, 0),
            label(0, 0, 1, -1),
        ],
        vec![
            label(1, -1, 1, 0),
            label(1, 0, 1, 1),
            label(1, -1, 0, 0),
            label(0, 0, 1, 1),
        ],
        vec![label(1, 1, 1, -1)],
        vec![label(1, -1, 1, 1)],
    ]
}

type RawLabel = (u8, i8, u8, i8);

/// Row and column labels of the upper-triangle block entries.
const ENTRY_LABELS: [(RawLabel, RawLabel); 43] = [
    // M1
    ((1, 1, 1, 1), (1, 1, 1, 1)),
    ((1, 1, 1, 1), (1, 0, 1, 0)),
    ((1, 1, 1, 1), (1, -1, 1, -1)),
    ((1, 1, 1, 1), (1, 0, 0, 0)),
    ((1, 1, 1, 1), (0, 0, 1, 0)),
    ((1, 1, 1, 1), (0, 0, 0, 0)),
    ((1, 0, 1, 0), (1, 0, 1, 0)),
    ((1, 0, 1, 0), (1, -1, 1, -1)),
    ((1, 0, 1, 0), (1, 0, 0, 0)),
    ((1, 0, 1, 0), (0, 0, 1, 0)),
    ((1, 0, 1, 0), (0, 0, 0, 0)),
    ((1, -1, 1, -1), (1, -1, 1, -1)),
    ((1, -1, 1, -1), (1, 0, 0, 0)),
    ((1, -1, 1, -1), (0, 0, 1, 0)),
    ((1, -1, 1, -1), (0, 0, 0, 0)),
    ((1, 0, 0, 0), (1, 0, 0, 0)),
    ((1, 0, 0, 0), (0, 0, 1, 0)),
    ((1, 0, 0, 0), (0, 0, 0, 0)),
    ((0, 0, 1, 0), (0, 0, 1, 0)),
    ((0, 0, 1, 0), (0, 0, 0, 0)),
    ((0, 0, 0, 0), (0, 0, 0, 0)),
    // M2
    ((1, 1, 1, 0), (1, 1, 1, 0)),
    ((1, 1, 1, 0), (1, 0, 1, -1)),
    ((1, 1, 1, 0), (1, 1, 0, 0)),
    ((1, 1, 1, 0), (0, 0, 1, -1)),
    ((1, 0, 1, -1), (1, 0, 1, -1)),
    ((1, 0, 1, -1), (1, 1, 0, 0)),
    ((1, 0, 1, -1), (0, 0, 1, -1)),
    ((1, 1, 0, 0), (1, 1, 0, 0)),
    ((1, 1, 0, 0), (0, 0, 1, -1)),
    ((0, 0, 1, -1), (0, 0, 1, -1)),
    // M3
    ((1, -1, 1, 0), (1, -1, 1, 0)),
    ((1, -1, 1, 0), (1, 0, 1, 1)),
    ((1, -1, 1, 0), (1, -1, 0, 0)),
    ((1, -1, 1, 0), (0, 0, 1, 1)),
    ((1, 0, 1, 1), (1, 0, 1, 1)),
    ((1, 0, 1, 1), (1, -1, 0, 0)),
    ((1, 0, 1, 1), (0, 0, 1, 1)),
    ((1, -1, 0, 0), (1, -1, 0, 0)),
    ((1, -1, 0, 0), (0, 0, 1, 1)),
    ((0, 0, 1, 1), (0, 0, 1, 1)),
    // M4, M5
    ((1, 1, 1, -1), (1, 1, 1, -1)),
    ((1, -1, 1, 1), (1, -1, 1, 1)),
];

/// Values `<row| 16 rho_out |col>` in the order of `ENTRY_LABELS`.
fn entry_values(class: EntanglementClass, p: &ClonerParams) -> [C64; 43] {
    let s = class.s();
    let w = class.w();
    let a = |i: usize| p.get(i);
    let (a1, a2, a3, a4, a5, a6) = (a(1), a(2), a(3), a(4), a(5), a(6));
    let (a7, a8, a9, a10, a11, a12) = (a(7), a(8), a(9), a(10), a(11), a(12));
    let (a13, a14, a15, a16, a17) = (a(13), a(14), a(15), a(16), a(17));
    [
        // M1
        a1 + a6 + (a2 + a5) * s,
        a1 * w,
        ZERO,
        -a3 * w,
        -a9 * w,
        a11 * w,
        a6,
        a1 * w,
        a7 * s,
        a10 * s,
        a11,
        a1 + a6 - (a2 + a5) * s,
        a3 * w,
        a9 * w,
        a11 * w,
        a8,
        a17,
        a12 * s,
        a14,
        a15 * s,
        a16,
        // M2
        a6 + a2 * s,
        a1 * w,
        a3 + a7 * s,
        -a9 * w,
        a6 - a5 * s,
        a3 * w,
        a10 * s - a9,
        a8 + a4 * s,
        -a17 * w,
        a14 - a13 * s,
        // M3
        a6 - a2 * s,
        a1 * w,
        -a3 + a7 * s,
        a9 * w,
        a6 + a5 * s,
        -a3 * w,
        a9 + a10 * s,
        a8 - a4 * s,
        -a17 * w,
        a14 + a13 * s,
        // M4, M5
        a6 - a1 + (a2 - a5) * s,
        a6 - a1 - (a2 - a5) * s,
    ]
}

/// `(block, row, col)` of every entry of `ENTRY_LABELS`.
fn entry_layout() -> &'static [(usize, usize, usize)] {
    static LAYOUT: OnceLock<Vec<(usize, usize, usize)>> = OnceLock::new();
    LAYOUT.get_or_init(|| {
        let bases = block_bases();
        let locate = |(j13, m13, j24, m24): RawLabel| {
            let l = label(j13, m13, j24, m24);
            bases
                .iter()
                .enumerate()
                .find_map(|(b, basis)| basis.iter().position(|&x| x == l).map(|i| (b, i)))
                .expect("every coupled label lies in one block")
        };
        ENTRY_LABELS
            .iter()
            .map(|&(row, col)| {
                let (b, r) = locate(row);
                let (b2, c) = locate(col);
                assert_eq!(b, b2, "entry crosses blocks");
                (b, r, c)
            })
            .collect()
    })
}

/// The five blocks `M1..M5` (without the global 1/16).
#[derive(Debug, Clone)]
pub struct OutputBlocks {
    pub blocks: [ComplexMatrix; 5],
}

impl OutputBlocks {
    /// `rho_out` in the coupled basis ordered as [`coupled_labels`].
    pub fn coupled_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(16, 16);
        for (block, basis) in self.blocks.iter().zip(block_bases()) {
            for (r, lr) in basis.iter().enumerate() {
                for (c, lc) in basis.iter().enumerate() {
                    m[(lr.position(), lc.position())] = block[(r, c)] / 16.0;
                }
            }
        }
        m
    }

    /// `rho_out` in qubit order (1,2,3,4).
    pub fn rho(&self) -> ComplexMatrix {
        coupled_basis_matrix().sandwich(&self.coupled_matrix())
    }

    /// Smallest eigenvalue of `rho_out`, from the spectra of the blocks.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        self.blocks.iter().try_fold(f64::INFINITY, |acc, b| {
            Ok(acc.min(herm_eig(b)?.min() / 16.0))
        })
    }
}

pub fn output_blocks(class: EntanglementClass, params: &ClonerParams) -> OutputBlocks {
    let mut blocks = [6, 4, 4, 1, 1].map(|n| ComplexMatrix::zeros(n, n));
    for (&(b, r, c), value) in entry_layout().iter().zip(entry_values(class, params)) {
        blocks[b][(r, c)] = value;
        blocks[b][(c, r)] = value.conj();
    }
    OutputBlocks { blocks }
}

/// `rho_out = (1/16)(M1 + ... + M5)` mapped to qubit order.
pub fn assemble_blocks(class: EntanglementClass, params: &ClonerParams) -> Result<OutputState> {
    params.check_reality()?;
    Ok(OutputState {
        rho: output_blocks(class, params).rho(),
        class,
        params: *params,
    })
}

/// Expands the input in tensor operators, scales each term by its
/// family coefficient and re-synthesizes.
pub fn assemble_tensor(class: EntanglementClass, params: &ClonerParams) -> Result<OutputState> {
    params.check_reality()?;
    let coeffs: TensorCoefficients = tensor_coeffs(&input_state(class))?;
    let scaled = coeffs.map(|i13, i24, c| c * params.multiplier(i13, i24));
    Ok(OutputState {
        rho: scaled.synthesize(),
        class,
        params: *params,
    })
}

/// One positivity condition with its signed slack.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck {
    pub id: &'static str,
    pub satisfied: bool,
    pub margin: f64,
}

pub const INEQUALITY_SLACK: f64 = 1e-12;

/// Necessary conditions for a non-negative output: the single-parameter
/// bounds, two 2x2 witnesses, the 3x3 witness on
/// `{|1,1;1,1>, |1,-1;1,-1>, |1,0;1,0>}`, and, when `A1 = A6 != 0`, its
/// reduced form.
pub fn check_inequalities(class: EntanglementClass, params: &ClonerParams) -> Vec<InequalityCheck> {
    let s = class.s();
    let x = class.x();
    let r = |i: usize| params.re(i);
    let (a1, a6, a8, a14, a16) = (r(1), r(6), r(8), r(14), r(16));
    let sum25 = r(2) + r(5);

    let mut margins: Vec<(&'static str, f64)> = vec![
        ("pos1.a6_nonneg", a6),
        ("pos1.a8_nonneg", a8),
        ("pos1.a14_nonneg", a14),
        ("pos1.a16_nonneg", a16),
        ("pos1.a1_bound", a6 - a1.abs()),
        ("pos1.a4_bound", a8 - (s * r(4)).abs()),
        ("pos1.a13_bound", a14 - (s * r(13)).abs()),
        ("pos1.a2_bound", a6 - (s * r(2)).abs()),
        ("pos1.a5_bound", a6 - (s * r(5)).abs()),
        ("pos2.witness_a11", a16 * a6 - params.get(11).norm_sqr()),
        ("pos2.witness_a17", a14 * a8 - params.get(17).norm_sqr()),
        (
            "pos2.witness_three_state",
            (a1 + a6).powi(2) * a6 - 8.0 * x * a1 * a1 * (a1 + a6) - a6 * (s * sum25).powi(2),
        ),
    ];
    if (a1 - a6).abs() <= INEQUALITY_SLACK && a6 != 0.0 {
        let bound = (4.0 * a6 * a6 - 16.0 * x * a6 * a6).max(0.0).sqrt();
        margins.push(("pos3.equal_a1_a6", bound - (s * sum25).abs()));
    }
    margins
        .into_iter()
        .map(|(id, margin)| InequalityCheck {
            id,
            satisfied: margin >= -INEQUALITY_SLACK,
            margin,
        })
        .collect()
}

/// `<psi psi| rho_out |psi psi>`.
pub fn fidelity_direct(out: &OutputState) -> f64 {
    let psi = out.class.psi();
    let pp = kron_vec(&psi, &psi);
    out.rho.expectation(&pp, &pp).re
}

/// Closed-form fidelity of a family member.
pub fn fidelity_formula(class: EntanglementClass, params: &ClonerParams) -> f64 {
    let x = class.x();
    let s = class.s();
    let r = |i: usize| params.re(i);
    (r(1) * (1.0 + 2.0 * x)
        + s * s * (r(2) + r(5))
        + r(6) * (1.0 - x)
        + x * r(16)
        + 6.0 * x * r(11))
        / 16.0
}

/// `(F1', F2')`: overlap of each copy's reduced state with `|psi>`.
pub fn single_pair_fidelities(out: &OutputState) -> (f64, f64) {
    let psi = out.class.psi();
    let f1 = out.first_copy().expectation(&psi, &psi).re;
    let f2 = out.second_copy().expectation(&psi, &psi).re;
    (f1, f2)
}

fn v_of_x(x: f64) -> f64 {
    1.0 - 81.0 * x * x / (145.0 * x * x - 32.0 * x + 4.0)
}

fn f_max_of_x(x: f64) -> f64 {
    let v = v_of_x(x);
    2.0 / 9.0 * (1.0 - 4.0 * x) * (1.0 + v.sqrt()) + x * (1.0 + (1.0 - v).max(0.0).sqrt())
}

/// The auxiliary quantity `v` of the optimum.
pub fn optimal_v(class: EntanglementClass) -> f64 {
    v_of_x(class.x())
}

pub fn optimal_params(class: EntanglementClass) -> ClonerParams {
    let a6 = 8.0 / 9.0 * (1.0 + optimal_v(class).sqrt());
    let a16 = (16.0 - 9.0 * a6).max(0.0);
    let mut p = ClonerParams::zeros();
    p.set_re(1, a6)
        .set_re(2, a6)
        .set_re(5, a6)
        .set_re(6, a6)
        .set_re(16, a16)
        .set_re(11, (a6 * a16).sqrt());
    p
}

/// Maximal fidelity of covariant copying for the class.
pub fn f_max(class: EntanglementClass) -> f64 {
    f_max_of_x(class.x())
}

/// The same closed form for any `alpha` in `[0, 1]`; it depends on `alpha`
/// only through `alpha^2 (1 - alpha^2)`.
pub fn f_max_unfolded(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} is not in [0, 1]")));
    }
    let a2 = alpha * alpha;
    Ok(f_max_of_x(a2 * (1.0 - a2)))
}

/// Upper bound of the fidelity at fixed `A6 in [0, 16/9]`.
pub fn upper_bound_curve(class: EntanglementClass, a6: f64) -> Result<f64> {
    let rest = 16.0 - 9.0 * a6;
    if !(a6 >= 0.0 && rest >= -1e-12) {
        return Err(Error::Domain(format!("A6 = {a6} is outside [0, 16/9]")));
    }
    let x = class.x();
    Ok((a6 * (4.0 - 16.0 * x) + 16.0 * x + 6.0 * x * (a6 * rest.max(0.0)).sqrt()) / 16.0)
}

/// Result of the brute-force search.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub params: ClonerParams,
    pub fidelity: f64,
}

/// A point of the reduced search space.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    a6: f64,
    u1: f64,
    t: f64,
    a11: f64,
    fidelity: f64,
}

const FEASIBILITY_TOLERANCE: f64 = -1e-9;
const ZOOM_LEVELS: usize = 4;

struct Oracle {
    class: EntanglementClass,
}

impl Oracle {
    /// `A1 = u1 A6`, `A2 = A5 = S/2` with `(2 alpha^2 - 1) S = t`,
    /// `A16 = 16 - 9 A6`, all unscanned coefficients zero.
    fn params(&self, a6: f64, u1: f64, t: f64, a11: f64) -> ClonerParams {
        let s = self.class.s();
        let sum = if s.abs() < 1e-12 { 0.0 } else { t / s };
        let mut p = ClonerParams::zeros();
        p.set_re(6, a6)
            .set_re(1, u1 * a6)
            .set_re(2, sum / 2.0)
            .set_re(5, sum / 2.0)
            .set_re(16, (16.0 - 9.0 * a6).max(0.0))
            .set_re(11, a11);
        p
    }

    /// Minimum eigenvalue of `rho_out` over the selected blocks. `M1`
    /// (index 0) is the only block containing `A11`.
    fn min_eigenvalue(&self, p: &ClonerParams, blocks: std::ops::Range<usize>) -> f64 {
        let all = output_blocks(self.class, p);
        all.blocks[blocks]
            .iter()
            .map(|b| herm_eig(b).map_or(f64::NEG_INFINITY, |e| e.min() / 16.0))
            .fold(f64::INFINITY, f64::min)
    }

    fn m1_feasible(&self, a6: f64, u1: f64, t: f64, a11: f64) -> bool {
        self.min_eigenvalue(&self.params(a6, u1, t, a11), 0..1) >= FEASIBILITY_TOLERANCE
    }

    /// Largest feasible real `A11` for the other coordinates fixed. The
    /// feasible set is an interval symmetric about zero, and positivity of
    /// `M1` bounds it by `sqrt(A6 A16)`.
    fn max_a11(&self, a6: f64, u1: f64, t: f64) -> Option<f64> {
        if self.min_eigenvalue(&self.params(a6, u1, t, 0.0), 1..5) < FEASIBILITY_TOLERANCE
            || !self.m1_feasible(a6, u1, t, 0.0)
        {
            return None;
        }
        let cap = (a6 * (16.0 - 9.0 * a6)).max(0.0).sqrt() + 1e-6;
        if self.m1_feasible(a6, u1, t, cap) {
            return Some(cap);
        }
        let (mut lo, mut hi) = (0.0, cap);
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if self.m1_feasible(a6, u1, t, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }

    fn evaluate(&self, a6: f64, u1: f64, t: f64, best: f64) -> Option<Candidate> {
        let cap = (a6 * (16.0 - 9.0 * a6)).max(0.0).sqrt();
        let optimistic = fidelity_formula(self.class, &self.params(a6, u1, t, cap));
        if optimistic <= best {
            return None;
        }
        let a11 = self.max_a11(a6, u1, t)?;
        let fidelity = fidelity_formula(self.class, &self.params(a6, u1, t, a11));
        Some(Candidate {
            a6,
            u1,
            t,
            a11,
            fidelity,
        })
    }

    /// Grid search over `A6 x u1 x t`; the incumbent fidelity is shared
    /// between threads only to prune points that cannot beat it.
    fn scan(
        &self,
        a6s: &[f64],
        u1s: &[f64],
        ts_for: impl Fn(f64) -> Vec<f64> + Sync,
        seed_best: f64,
    ) -> Option<Candidate> {
        let shared = AtomicU64::new(seed_best.to_bits());
        // Larger u1 and larger s*t raise the fidelity; visiting them first
        // makes the pruning bound tight early.
        let mut u1_order = u1s.to_vec();
        u1_order.sort_by(|x, y| y.total_cmp(x));
        let s = self.class.s();
        a6s.par_iter()
            .filter_map(|&a6| {
                let mut ts = ts_for(a6);
                ts.sort_by(|x, y| (s * y).total_cmp(&(s * x)));
                let mut found: Option<Candidate> = None;
                for &u1 in &u1_order {
                    for &t in &ts {
                        let best = f64::from_bits(shared.load(Ordering::Relaxed));
                        let Some(c) = self.evaluate(a6, u1, t, best) else {
                            continue;
                        };
                        if found.is_none_or(|f| c.fidelity > f.fidelity) {
                            found = Some(c);
                        }
                        let mut current = shared.load(Ordering::Relaxed);
                        while c.fidelity > f64::from_bits(current) {
                            match shared.compare_exchange_weak(
                                current,
                                c.fidelity.to_bits(),
                                Ordering::Relaxed,
                                Ordering::Relaxed,
                            ) {
                                Ok(_) => break,
                                Err(actual) => current = actual,
                            }
                        }
                    }
                }
                found
            })
            .reduce_with(|a, b| {
                if b.fidelity > a.fidelity || (b.fidelity == a.fidelity && b.a6 < a.a6) {
                    b
                } else {
                    a
                }
            })
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 0 || hi <= lo {
        return vec![lo];
    }
    (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect()
}

/// Brute-force maximization of the closed-form fidelity over real
/// `(A1, A2 + A5, A6, A11)` with `A16 = 16 - 9 A6` and every other
/// coefficient zero, subject to numerical positivity of the assembled
/// state. A uniform grid with `resolution` steps per axis is followed by
/// local grids of shrinking width around the incumbent.
pub fn oracle_optimize(class: EntanglementClass, resolution: usize) -> Result<OracleResult> {
    if resolution < 20 {
        return Err(Error::Domain(format!(
            "grid resolution {resolution} is below 20"
        )));
    }
    let oracle = Oracle { class };
    let s_zero = class.s().abs() < 1e-12;
    let a6_max = 16.0 / 9.0;

    let t_grid = |a6: f64, lo: f64, hi: f64, n: usize| {
        if s_zero {
            vec![0.0]
        } else {
            let h = 2.0 * a6;
            grid(lo.max(-h), hi.min(h), n)
        }
    };

    let mut best = oracle
        .scan(
            &grid(0.0, a6_max, resolution),
            &grid(-1.0, 1.0, resolution),
            |a6| t_grid(a6, f64::NEG_INFINITY, f64::INFINITY, resolution),
            f64::NEG_INFINITY,
        )
        .ok_or_else(|| Error::Domain("no feasible grid point".into()))?;

    let mut step_a6 = a6_max / resolution as f64;
    let mut step_u1 = 2.0 / resolution as f64;
    let mut step_t = 4.0 * a6_max / resolution as f64;
    let local = 10;
    for _ in 0..ZOOM_LEVELS {
        let a6s = grid(
            (best.a6 - step_a6).max(0.0),
            (best.a6 + step_a6).min(a6_max),
            local,
        );
        let u1s = grid(
            (best.u1 - step_u1).max(-1.0),
            (best.u1 + step_u1).min(1.0),
            local,
        );
        let (t_lo, t_hi) = (best.t - step_t, best.t + step_t);
        let refined = oracle.scan(
            &a6s,
            &u1s,
            |a6| t_grid(a6, t_lo, t_hi, local),
            best.fidelity,
        );
        if let Some(c) = refined {
            best = c;
        }
        step_a6 /= 5.0;
        step_u1 /= 5.0;
        step_t /= 5.0;
    }
    Ok(OracleResult {
        params: oracle.params(best.a6, best.u1, best.t, best.a11),
        fidelity: best.fidelity,
    })
}
