//! Entanglement and correlation diagnostics of the copies.
//!
//! Entropies are in nats.

use crate::cloner::{
    assemble_blocks, f_max, optimal_params, single_pair_fidelities, ClonerParams, EntanglementClass,
};
use crate::error::{Error, Result};
use crate::linalg::{
    clamp_eigenvalue, herm_eig, kron, partial_trace, partial_transpose, pauli_y, psd_sqrt,
    qubit_count, ComplexMatrix, ZERO,
};

fn check_pair_density(rho: &ComplexMatrix) -> Result<()> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "expected a two-qubit state, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    rho.check_density()
}

/// Wootters concurrence. The `sqrt(lambda_i)` are the singular values of
/// `A = sqrt(rho) sqrt(rho~)`, since `A A^dagger = sqrt(rho) rho~ sqrt(rho)`
/// has the spectrum of `rho rho~`. They are read off the Hermitian matrix
/// `[[0, A], [A^dagger, 0]]`, whose eigenvalues are `+-sqrt(lambda_i)`; this
/// avoids square roots of tiny eigenvalues.
pub fn concurrence(rho: &ComplexMatrix) -> Result<f64> {
    check_pair_density(rho)?;
    let yy = kron(&pauli_y(), &pauli_y());
    let root = psd_sqrt(rho)?;
    let flipped_root = yy.matmul(&root.conj()).matmul(&yy);
    let a = root.matmul(&flipped_root);
    let a_dag = a.adjoint();
    let h = ComplexMatrix::from_fn(8, 8, |r, c| match (r < 4, c < 4) {
        (true, false) => a[(r, c - 4)],
        (false, true) => a_dag[(r - 4, c)],
        _ => ZERO,
    });
    let roots = &herm_eig(&h)?.values[..4];
    let c = roots[0] - roots[1] - roots[2] - roots[3];
    Ok(c.clamp(0.0, 1.0))
}

/// Von Neumann entropy `-sum lambda ln lambda`.
pub fn entropy(rho: &ComplexMatrix) -> Result<f64> {
    let eig = herm_eig(rho)?;
    let mut s = 0.0;
    for l in eig.values {
        let l = clamp_eigenvalue(l)?;
        if l > 0.0 {
            s -= l * l.ln();
        }
    }
    Ok(s)
}

/// Two disjoint, non-empty groups of zero-based qubit positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    a: Vec<usize>,
    b: Vec<usize>,
}

impl Bipartition {
    pub fn new(a: &[usize], b: &[usize]) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidSelection(
                "both groups must be non-empty".into(),
            ));
        }
        if a.iter().any(|q| b.contains(q)) {
            return Err(Error::InvalidSelection(format!("{a:?} and {b:?} overlap")));
        }
        Ok(Self {
            a: a.to_vec(),
            b: b.to_vec(),
        })
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }
}

/// `S(rho_a) + S(rho_b) - S(rho_ab)`, where `rho_ab` is the reduced state of
/// the union of both groups.
pub fn index_of_correlation(rho: &ComplexMatrix, split: &Bipartition) -> Result<f64> {
    let n = qubit_count(rho)?;
    let mut union: Vec<usize> = split.a.iter().chain(&split.b).copied().collect();
    union.sort_unstable();
    let joint = if union.len() == n {
        rho.clone()
    } else {
        partial_trace(rho, &union)?
    };
    let sa = entropy(&partial_trace(rho, &split.a)?)?;
    let sb = entropy(&partial_trace(rho, &split.b)?)?;
    Ok(sa + sb - entropy(&joint)?)
}

/// Sum of the magnitudes of the negative eigenvalues of the partial
/// transpose over the given qubits.
pub fn negativity_over(rho: &ComplexMatrix, transposed: &[usize]) -> Result<f64> {
    let pt = partial_transpose(rho, transposed)?;
    Ok(herm_eig(&pt)?
        .values
        .iter()
        .filter(|&&l| l < 0.0)
        .map(|l| -l)
        .sum())
}

/// Negativity of a four-qubit state across the split (1,2)|(3,4).
pub fn negativity(rho: &ComplexMatrix) -> Result<f64> {
    if rho.rows() != 16 || rho.cols() != 16 {
        return Err(Error::DimensionMismatch(format!(
            "expected a four-qubit state, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    negativity_over(rho, &[2, 3])
}

/// Closed-form curves of the optimal copier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub c_in: f64,
    pub i_in: f64,
    pub c12: f64,
    pub c13: f64,
}

fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

pub fn closed_form_curves(class: EntanglementClass, params: &ClonerParams) -> ClosedForm {
    let (a, b) = (class.alpha(), class.beta());
    let ab = a * b;
    let a6 = params.re(6);
    let a11 = params.re(11);
    ClosedForm {
        c_in: 2.0 * ab,
        i_in: -2.0 * (xlnx(a * a) + xlnx(b * b)),
        c12: ((4.0 * ab + 1.0) * (2.0 * a6 + a11) - 8.0).max(0.0) / 16.0,
        c13: ((3.0 * a6 - 4.0).abs() - 3.0 * a6 * ab).max(0.0) / 4.0,
    }
}

/// Feature located by [`find_threshold`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    /// Boundary between `f = 0` and `f > 0`.
    ZeroCrossing,
    Minimum,
    Maximum,
}

/// Values at or below this count as zero for [`ThresholdKind::ZeroCrossing`].
pub const ZERO_LEVEL: f64 = 1e-10;
/// Width of the final bracket.
pub const THRESHOLD_TOLERANCE: f64 = 1e-7;

/// Locates a feature of `curve` inside `bracket` by bisection (zero
/// crossings) or golden-section search (extrema).
pub fn find_threshold(
    curve: impl Fn(f64) -> f64,
    kind: ThresholdKind,
    bracket: (f64, f64),
) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::NotBracketed(format!("empty bracket [{lo}, {hi}]")));
    }
    match kind {
        ThresholdKind::ZeroCrossing => {
            let positive = |x: f64| curve(x) > ZERO_LEVEL;
            let at_lo = positive(lo);
            if at_lo == positive(hi) {
                return Err(Error::NotBracketed(format!(
                    "curve does not change between zero and positive on [{lo}, {hi}]"
                )));
            }
            while hi - lo > THRESHOLD_TOLERANCE {
                let mid = 0.5 * (lo + hi);
                if positive(mid) == at_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        }
        ThresholdKind::Minimum | ThresholdKind::Maximum => {
            let sign = if kind == ThresholdKind::Minimum {
                1.0
            } else {
                -1.0
            };
            let g = |x: f64| sign * curve(x);
            let (g_lo, g_hi) = (g(lo), g(hi));
            let ratio = (5f64.sqrt() - 1.0) / 2.0;
            let mut x1 = hi - ratio * (hi - lo);
            let mut x2 = lo + ratio * (hi - lo);
            let (mut g1, mut g2) = (g(x1), g(x2));
            while hi - lo > THRESHOLD_TOLERANCE {
                if g1 < g2 {
                    hi = x2;
                    x2 = x1;
                    g2 = g1;
                    x1 = hi - ratio * (hi - lo);
                    g1 = g(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    g1 = g2;
                    x2 = lo + ratio * (hi - lo);
                    g2 = g(x2);
                }
            }
            let x = 0.5 * (lo + hi);
            if g(x) >= g_lo.min(g_hi) {
                return Err(Error::NotBracketed(format!(
                    "no interior {kind:?} in [{}, {}]",
                    bracket.0, bracket.1
                )));
            }
            Ok(x)
        }
    }
}

/// All diagnostics of the optimal copier for one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureReport {
    pub alpha: f64,
    pub c_in: f64,
    pub c12: f64,
    pub c13: f64,
    pub i_in: f64,
    pub i12: f64,
    pub i13: f64,
    pub i_pair: f64,
    pub negativity: f64,
    pub f_max: f64,
    pub f1_prime: f64,
}

impl MeasureReport {
    pub fn for_class(class: EntanglementClass) -> Result<Self> {
        let rho_in = ComplexMatrix::projector(&class.psi());
        let out = assemble_blocks(class, &optimal_params(class))?;
        let rho = &out.rho;
        let split = |a: &[usize], b: &[usize]| Bipartition::new(a, b);
        Ok(Self {
            alpha: class.alpha(),
            c_in: concurrence(&rho_in)?,
            c12: concurrence(&partial_trace(rho, &[0, 1])?)?,
            c13: concurrence(&partial_trace(rho, &[0, 2])?)?,
            i_in: index_of_correlation(&rho_in, &split(&[0], &[1])?)?,
            i12: index_of_correlation(rho, &split(&[0], &[1])?)?,
            i13: index_of_correlation(rho, &split(&[0], &[2])?)?,
            i_pair: index_of_correlation(rho, &split(&[0, 1], &[2, 3])?)?,
            negativity: negativity(rho)?,
            f_max: f_max(class),
            f1_prime: single_pair_fidelities(&out).0,
        })
    }
}

/// Concurrence of the reduced state of `pair` (zero-based positions) of
/// the optimal output.
pub fn output_concurrence(class: EntanglementClass, pair: [usize; 2]) -> Result<f64> {
    let out = assemble_blocks(class, &optimal_params(class))?;
    concurrence(&partial_trace(&out.rho, &pair)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn bell() -> ComplexMatrix {
        let r = C64::new(FRAC_1_SQRT_2, 0.0);
        ComplexMatrix::projector(&[r, ZERO, ZERO, r])
    }

    fn alpha(a: f64) -> EntanglementClass {
        EntanglementClass::new(a).unwrap()
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence(&bell()).unwrap() - 1.0).abs() < 1e-12);
        let a = ComplexMatrix::projector(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let b = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(concurrence(&kron(&a, &b)).unwrap().abs() < 1e-12);
        for x in [0.0, 0.1, 0.3, 0.5, FRAC_1_SQRT_2] {
            let c = alpha(x);
            let rho = ComplexMatrix::projector(&c.psi());
            assert!((concurrence(&rho).unwrap() - c.w()).abs() < 1e-7);
        }
        assert!(concurrence(&ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert!(entropy(&bell()).unwrap().abs() < 1e-12);
        let mixed = ComplexMatrix::identity(4).scale_real(0.25);
        assert!((entropy(&mixed).unwrap() - 4f64.ln()).abs() < 1e-14);
        let c = alpha(0.4);
        let marginal = partial_trace(&ComplexMatrix::projector(&c.psi()), &[0]).unwrap();
        let (a2, b2) = (0.16f64, 0.84f64);
        let expected = -a2 * a2.ln() - b2 * b2.ln();
        assert!((entropy(&marginal).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn index_examples() {
        let split = Bipartition::new(&[0], &[1]).unwrap();
        let product = kron(
            &ComplexMatrix::projector(&[C64::new(0.6, 0.0), C64::new(0.8, 0.0)]),
            &ComplexMatrix::identity(2).scale_real(0.5),
        );
        assert!(index_of_correlation(&product, &split).unwrap().abs() < 1e-12);
        assert!((index_of_correlation(&bell(), &split).unwrap() - 2.0 * LN_2).abs() < 1e-12);
        let rho_in = ComplexMatrix::projector(&alpha(0.5).psi());
        let expected = -2.0 * (0.25 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
        assert!((index_of_correlation(&rho_in, &split).unwrap() - expected).abs() < 1e-12);
        assert!(Bipartition::new(&[0], &[0, 1]).is_err());
        assert!(Bipartition::new(&[], &[1]).is_err());
    }

    #[test]
    fn negativity_examples() {
        assert!((negativity_over(&bell(), &[1]).unwrap() - 0.5).abs() < 1e-12);
        let sep = kron(&bell(), &ComplexMatrix::identity(4).scale_real(0.25));
        assert!(negativity(&sep).unwrap().abs() < 1e-12);
        assert!(negativity(&bell()).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let c = EntanglementClass::maximally_entangled();
        let f = closed_form_curves(c, &optimal_params(c));
        assert!((f.c12 - 1.0 / 3.0).abs() < 1e-12);
        let c = EntanglementClass::separable();
        let f = closed_form_curves(c, &optimal_params(c));
        assert_eq!(f.c12, 0.0);
        assert!((f.c13 - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(f.i_in, 0.0);
        assert!((output_concurrence(c, [0, 2]).unwrap() - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn threshold_search() {
        let ramp = |x: f64| (x - 0.3).max(0.0);
        let t = find_threshold(ramp, ThresholdKind::ZeroCrossing, (0.0, 1.0)).unwrap();
        assert!((t - 0.3).abs() < 1e-6);
        let bowl = |x: f64| (x - 0.42).powi(2);
        let m = find_threshold(bowl, ThresholdKind::Minimum, (0.0, 1.0)).unwrap();
        assert!((m - 0.42).abs() < 1e-6);
        let cap = |x: f64| -(x - 0.1).powi(2);
        let m = find_threshold(cap, ThresholdKind::Maximum, (0.0, 1.0)).unwrap();
        assert!((m - 0.1).abs() < 1e-6);
        assert!(matches!(
            find_threshold(ramp, ThresholdKind::ZeroCrossing, (0.5, 1.0)),
            Err(Error::NotBracketed(_))
        ));
        assert!(matches!(
            find_threshold(bowl, ThresholdKind::Minimum, (0.5, 1.0)),
            Err(Error::NotBracketed(_))
        ));
    }

    #[test]
    fn report_bounds() {
        for a in [0.0, 0.2, 0.45, FRAC_1_SQRT_2] {
            let r = MeasureReport::for_class(alpha(a)).unwrap();
            for c in [r.c_in, r.c12, r.c13] {
                assert!((0.0..=1.0).contains(&c));
            }
            for i in [r.i_in, r.i12, r.i13, r.i_pair, r.negativity] {
                assert!(i >= -1e-12);
            }
        }
    }

    fn unitary(p: &[f64]) -> ComplexMatrix {
        let n = p
            .iter()
            .take(4)
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
            .max(1e-9);
        let [a, b, c, d] = [p[0] / n, p[1] / n, p[2] / n, p[3] / n];
        ComplexMatrix::from_vec(
            2,
            2,
            vec![
                C64::new(a, b),
                C64::new(c, d),
                C64::new(-c, d),
                C64::new(a, -b),
            ],
        )
        .unwrap()
    }

    fn random_density(seed: &[f64]) -> ComplexMatrix {
        let x = ComplexMatrix::from_fn(4, 4, |r, c| {
            C64::new(seed[2 * (4 * r + c)], seed[2 * (4 * r + c) + 1])
        });
        let m = x.adjoint().matmul(&x);
        let t = m.trace().re;
        m.scale_real(1.0 / t).hermitian_part()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn concurrence_is_local_unitary_invariant(
            seed in prop::collection::vec(-1.0f64..1.0, 32),
            u in prop::collection::vec(-1.0f64..1.0, 8),
        ) {
            let rho = random_density(&seed);
            prop_assume!(herm_eig(&rho).unwrap().min() > 1e-6);
            let w = kron(&unitary(&u), &unitary(&u[4..]));
            let moved = w.sandwich(&rho).hermitian_part();
            let c0 = concurrence(&rho).unwrap();
            let c1 = concurrence(&moved).unwrap();
            prop_assert!((c0 - c1).abs() < 1e-10);
        }

        #[test]
        fn index_is_non_negative(seed in prop::collection::vec(-1.0f64..1.0, 32)) {
            let rho = random_density(&seed);
            let i = index_of_correlation(&rho, &Bipartition::new(&[0], &[1]).unwrap()).unwrap();
            prop_assert!(i >= -1e-10);
        }
    }
}
