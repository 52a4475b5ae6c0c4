//! The optimal copier as a deterministic quantum operation: Kraus
//! operators, a unitary dilation on six qubits, covariance checks and the
//! Haar twirl.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::angular::{embed_pairs, singlet_projector, triplet_projector};
use crate::cloner::{optimal_params, EntanglementClass};
use crate::error::{Error, Result};
use crate::linalg::{
    complete_isometry, isometry_residual, kron, partial_trace, unitarity_residual, ComplexMatrix,
    C64, ONE,
};

/// A linear map from two-qubit operators (4x4) to four-qubit operators
/// (16x16).
pub trait QuantumMap: Sync {
    /// Applies the map without validating the input.
    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix;
}

impl<M: QuantumMap + ?Sized> QuantumMap for &M {
    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        (**self).apply(rho)
    }
}

/// `K = sqrt(A1) P_T (x) P_T + sqrt(A16) P_S (x) P_S` on pairs (1,3), (2,4).
pub fn k_operator(class: EntanglementClass) -> ComplexMatrix {
    let p = optimal_params(class);
    let pt = triplet_projector();
    let ps = singlet_projector();
    let triplets = embed_pairs(&pt, &pt).scale_real(p.re(1).max(0.0).sqrt());
    let singlets = embed_pairs(&ps, &ps).scale_real(p.re(16).max(0.0).sqrt());
    &triplets + &singlets
}

/// Kraus operators `K_ij = (K/2)|i>_3 |j>_4`, each 16x4.
#[derive(Debug, Clone)]
pub struct KrausSet {
    /// Ordered by `ij` = 00, 01, 10, 11.
    pub operators: [ComplexMatrix; 4],
    pub class: EntanglementClass,
}

pub fn kraus_set(class: EntanglementClass) -> KrausSet {
    let k = k_operator(class);
    let operators =
        std::array::from_fn(|ij| ComplexMatrix::from_fn(16, 4, |r, c| k[(r, 4 * c + ij)] * 0.5));
    KrausSet { operators, class }
}

impl KrausSet {
    /// `sum K^dagger K`.
    pub fn completeness(&self) -> ComplexMatrix {
        self.operators.iter().map(|k| k.adjoint().matmul(k)).sum()
    }

    /// `|| sum K^dagger K - 1 ||_F`.
    pub fn completeness_residual(&self) -> f64 {
        self.completeness().distance(&ComplexMatrix::identity(4))
    }
}

impl QuantumMap for KrausSet {
    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.operators.iter().map(|k| k.sandwich(rho)).sum()
    }
}

fn check_two_qubit_density(rho: &ComplexMatrix) -> Result<()> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "expected a 4x4 input state, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    rho.check_density()
}

/// `sum K rho K^dagger` for a validated two-qubit density operator.
pub fn apply_channel(ks: &KrausSet, rho_in: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_two_qubit_density(rho_in)?;
    Ok(ks.apply(rho_in))
}

/// Isometric extension on qubits 1..6 (ancillas 5, 6) and a unitary
/// completion acting on `|phi>_12 |0000>_3456`.
#[derive(Debug, Clone)]
pub struct Dilation {
    /// 64x4: `V|phi> = sum_ij (K_ij |phi>) (x) |i>_5 |j>_6`.
    pub isometry: ComplexMatrix,
    /// 64x64 with column `16 c` equal to column `c` of the isometry.
    pub unitary: ComplexMatrix,
}

pub fn dilation(class: EntanglementClass) -> Result<Dilation> {
    let ks = kraus_set(class);
    let isometry = ComplexMatrix::from_fn(64, 4, |r, c| ks.operators[r % 4][(r / 4, c)]);
    let completed = complete_isometry(&isometry)?;
    // Input columns go to the slots |c>_12 |0000>; the rest keep their order.
    let mut slots = vec![0usize; 64];
    let mut next = 4;
    for (col, slot) in slots.iter_mut().enumerate() {
        if col % 16 == 0 {
            *slot = col / 16;
        } else {
            *slot = next;
            next += 1;
        }
    }
    let unitary = ComplexMatrix::from_fn(64, 64, |r, c| completed[(r, slots[c])]);
    Ok(Dilation { isometry, unitary })
}

impl Dilation {
    pub fn isometry_residual(&self) -> f64 {
        isometry_residual(&self.isometry)
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.unitary)
    }

    /// Runs the unitary on `rho_in (x) |0000><0000|`, measures qubits 5 and
    /// 6 in the computational basis without recording the outcome, and
    /// discards them.
    pub fn measure_and_discard(&self, rho_in: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_two_qubit_density(rho_in)?;
        let mut full = ComplexMatrix::zeros(64, 64);
        for a in 0..4 {
            for b in 0..4 {
                full[(16 * a, 16 * b)] = rho_in[(a, b)];
            }
        }
        let evolved = self.unitary.sandwich(&full);
        let mut measured = ComplexMatrix::zeros(64, 64);
        for outcome in 0..4 {
            let projector = kron(
                &ComplexMatrix::identity(16),
                &ComplexMatrix::projector(&crate::linalg::basis_vector(4, outcome)),
            );
            measured = &measured + &projector.sandwich(&evolved);
        }
        partial_trace(&measured, &[0, 1, 2, 3])
    }
}

/// Kraus set and dilation of one class.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub kraus: KrausSet,
    pub dilation: Dilation,
}

pub fn realize(class: EntanglementClass) -> Result<ChannelRealization> {
    Ok(ChannelRealization {
        kraus: kraus_set(class),
        dilation: dilation(class)?,
    })
}

/// `u1 (x) u2 (x) u1 (x) u2` in qubit order (1,2,3,4).
pub fn copy_unitary(u1: &ComplexMatrix, u2: &ComplexMatrix) -> ComplexMatrix {
    let local = kron(u1, u2);
    kron(&local, &local)
}

/// `|| T(U rho U^dagger) - W T(rho) W^dagger ||_F` with `U = u1 (x) u2` and
/// `W` = [`copy_unitary`].
pub fn covariance_defect_of(
    map: &impl QuantumMap,
    rho_in: &ComplexMatrix,
    u1: &ComplexMatrix,
    u2: &ComplexMatrix,
) -> f64 {
    let u = kron(u1, u2);
    let lhs = map.apply(&u.sandwich(rho_in));
    let rhs = copy_unitary(u1, u2).sandwich(&map.apply(rho_in));
    lhs.distance(&rhs)
}

/// Covariance defect of the optimal channel on the canonical input.
pub fn covariance_defect(
    class: EntanglementClass,
    u1: &ComplexMatrix,
    u2: &ComplexMatrix,
) -> Result<f64> {
    for u in [u1, u2] {
        let residual = unitarity_residual(u);
        if u.rows() != 2 || u.cols() != 2 || residual > 1e-10 {
            return Err(Error::NotUnitary { residual });
        }
    }
    let rho = ComplexMatrix::projector(&class.psi());
    Ok(covariance_defect_of(&kraus_set(class), &rho, u1, u2))
}

/// Haar-random element of SU(2) from a uniform unit quaternion.
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        let [a, b, c, d] = q.map(|x| x / norm);
        return ComplexMatrix::from_vec(
            2,
            2,
            vec![
                C64::new(a, b),
                C64::new(c, d),
                C64::new(-c, d),
                C64::new(a, -b),
            ],
        )
        .expect("2x2");
    }
}

/// `n` pairs `(U1, U2)` from a ChaCha stream seeded with `seed`.
pub fn sample_pairs(n: usize, seed: u64) -> Vec<(ComplexMatrix, ComplexMatrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u1 = haar_su2(&mut rng);
            let u2 = haar_su2(&mut rng);
            (u1, u2)
        })
        .collect()
}

fn pairwise_sum(terms: &[ComplexMatrix]) -> ComplexMatrix {
    match terms {
        [] => panic!("pairwise sum of no terms"),
        [one] => one.clone(),
        _ => {
            let (l, r) = terms.split_at(terms.len() / 2);
            &pairwise_sum(l) + &pairwise_sum(r)
        }
    }
}

/// Group average `(1/n) sum W^dagger T(U rho U^dagger) W` over the given
/// samples. Terms are computed in parallel and combined by pairwise
/// summation in sample order, so the result does not depend on
/// scheduling.
pub fn twirl(
    map: &impl QuantumMap,
    samples: &[(ComplexMatrix, ComplexMatrix)],
    rho_in: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if samples.is_empty() {
        return Err(Error::Domain("twirl needs at least one sample".into()));
    }
    let terms: Vec<ComplexMatrix> = samples
        .par_iter()
        .map(|(u1, u2)| {
            let u = kron(u1, u2);
            let out = map.apply(&u.sandwich(rho_in));
            copy_unitary(u1, u2).adjoint().sandwich(&out)
        })
        .collect();
    Ok(pairwise_sum(&terms).scale_real(1.0 / samples.len() as f64))
}

/// [`twirl`] with `n` seeded Haar samples.
pub fn twirl_seeded(
    map: &impl QuantumMap,
    n: usize,
    seed: u64,
    rho_in: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    twirl(map, &sample_pairs(n, seed), rho_in)
}

/// A map averaged over a fixed sample of local unitaries.
pub struct Twirled<M> {
    pub inner: M,
    pub samples: Vec<(ComplexMatrix, ComplexMatrix)>,
}

impl<M: QuantumMap> QuantumMap for Twirled<M> {
    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        twirl(&self.inner, &self.samples, rho).expect("twirled map has samples")
    }
}

/// `rho -> Tr(rho) |up up up up><up up up up|`, a channel that is not
/// covariant.
pub struct FixedOutputMap;

impl QuantumMap for FixedOutputMap {
    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(16, 16);
        out[(0, 0)] = rho.trace();
        out
    }
}

/// Choi matrix `sum_ab |a><b| (x) T(|a><b|)` (64x64).
pub fn choi_matrix(map: &impl QuantumMap) -> ComplexMatrix {
    let mut choi = ComplexMatrix::zeros(64, 64);
    for a in 0..4 {
        for b in 0..4 {
            let mut e = ComplexMatrix::zeros(4, 4);
            e[(a, b)] = ONE;
            let out = map.apply(&e);
            for r in 0..16 {
                for c in 0..16 {
                    choi[(16 * a + r, 16 * b + c)] = out[(r, c)];
                }
            }
        }
    }
    choi
}

/// Largest singular value of a 2x2 matrix.
pub fn operator_norm_2x2(m: &ComplexMatrix) -> f64 {
    let g = m.adjoint().matmul(m);
    crate::linalg::herm_eig(&g).map_or(f64::NAN, |e| e.max().max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloner::{assemble_blocks, f_max, fidelity_direct, input_state};
    use crate::linalg::{herm_eig, pauli_y};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn alpha(a: f64) -> EntanglementClass {
        EntanglementClass::new(a).unwrap()
    }

    #[test]
    fn k_is_hermitian_with_projector_spectrum() {
        let c = EntanglementClass::separable();
        let k = k_operator(c);
        assert!(k.hermiticity_defect() < 1e-14);
        let eig = herm_eig(&k).unwrap();
        let a1 = optimal_params(c).re(1).sqrt();
        let count = |v: f64| eig.values.iter().filter(|l| (*l - v).abs() < 1e-12).count();
        assert_eq!(count(a1), 9);
        assert_eq!(count(0.0), 7); // A16 = 0 at alpha = 0
        let c = alpha(0.4);
        let eig = herm_eig(&k_operator(c)).unwrap();
        let p = optimal_params(c);
        let count = |v: f64| eig.values.iter().filter(|l| (*l - v).abs() < 1e-12).count();
        assert_eq!(count(p.re(1).sqrt()), 9);
        assert_eq!(count(p.re(16).sqrt()), 1);
        assert_eq!(count(0.0), 6);
    }

    #[test]
    fn pair_projector_ranks() {
        let rank = |m: &ComplexMatrix| m.trace().re.round() as usize;
        assert_eq!(rank(&triplet_projector()), 3);
        assert_eq!(rank(&singlet_projector()), 1);
    }

    #[test]
    fn completeness_and_output() {
        for a in [0.0, 0.3, FRAC_1_SQRT_2] {
            let c = alpha(a);
            let ks = kraus_set(c);
            assert!(ks.completeness_residual() < 1e-12);
            let rho = ComplexMatrix::projector(&c.psi());
            let out = apply_channel(&ks, &rho).unwrap();
            let blocks = assemble_blocks(c, &optimal_params(c)).unwrap();
            assert!(out.distance(&blocks.rho) < 1e-12);
            let k = k_operator(c);
            assert!(out.distance(&k.sandwich(&input_state(c))) < 1e-12);
            assert!((fidelity_direct(&blocks) - f_max(c)).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_rejects_invalid_input() {
        let ks = kraus_set(alpha(0.3));
        assert!(apply_channel(&ks, &ComplexMatrix::identity(4)).is_err());
        assert!(apply_channel(&ks, &ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn linearity() {
        let ks = kraus_set(alpha(0.2));
        let r1 = ComplexMatrix::projector(&alpha(0.5).psi());
        let r2 = ComplexMatrix::identity(4).scale_real(0.25);
        let mix = (&r1 + &r2).scale_real(0.5);
        let lhs = apply_channel(&ks, &mix).unwrap();
        let rhs = (&ks.apply(&r1) + &ks.apply(&r2)).scale_real(0.5);
        assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn dilation_structure() {
        let d = dilation(alpha(0.5)).unwrap();
        assert!(d.isometry_residual() < 1e-10);
        assert!(d.unitarity_residual() < 1e-10);
        for c in 0..4 {
            assert_eq!(d.unitary.col(16 * c), d.isometry.col(c));
        }
    }

    #[test]
    fn covariance_trivial_and_flip() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(covariance_defect(alpha(0.3), &id, &id).unwrap(), 0.0);
        // exp(-i pi sigma_y / 2) swaps up and down up to sign.
        let ry =
            &id.scale_real((PI / 2.0).cos()) - &pauli_y().scale(C64::new(0.0, (PI / 2.0).sin()));
        assert!(covariance_defect(alpha(0.3), &ry, &ry).unwrap() < 1e-10);
        let bad = ComplexMatrix::real_diagonal(&[1.0, 0.5]);
        assert!(covariance_defect(alpha(0.3), &bad, &id).is_err());
    }

    #[test]
    fn haar_samples_are_special_unitary() {
        for (u1, u2) in sample_pairs(50, 7) {
            for u in [u1, u2] {
                assert!(unitarity_residual(&u) < 1e-14);
                let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
                assert!((det - ONE).norm() < 1e-14);
            }
        }
        assert_eq!(sample_pairs(3, 11)[2].0, sample_pairs(3, 11)[2].0);
    }

    #[test]
    fn twirl_identity_sample_is_raw_output() {
        let ks = kraus_set(alpha(0.3));
        let rho = ComplexMatrix::projector(&alpha(0.3).psi());
        let id = ComplexMatrix::identity(2);
        let t = twirl(&ks, &[(id.clone(), id)], &rho).unwrap();
        assert!(t.distance(&ks.apply(&rho)) < 1e-15);
        assert!(twirl(&ks, &[], &rho).is_err());
    }

    #[test]
    fn twirl_is_deterministic() {
        let rho = ComplexMatrix::projector(&alpha(0.3).psi());
        let a = twirl_seeded(&FixedOutputMap, 300, 5, &rho).unwrap();
        let b = twirl_seeded(&FixedOutputMap, 300, 5, &rho).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn choi_of_optimal_channel_is_positive() {
        for a in [0.0, 0.3, FRAC_1_SQRT_2] {
            let choi = choi_matrix(&kraus_set(alpha(a)));
            assert!(herm_eig(&choi).unwrap().min() >= -1e-10);
            assert!((choi.trace().re - 4.0).abs() < 1e-12);
        }
    }
}
