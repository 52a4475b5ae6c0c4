//! The verification suite behind `entcopy verify`.

use std::collections::BTreeMap;

use entcopy::angular::{local_operators, Pair, TensorOpIndex};
use entcopy::channel::{
    apply_channel, choi_matrix, covariance_defect, dilation, kraus_set, sample_pairs, twirl,
    QuantumMap,
};
use entcopy::cloner::{
    assemble_blocks, assemble_tensor, check_inequalities, f_max, f_max_unfolded, fidelity_direct,
    fidelity_formula, optimal_params, EntanglementClass,
};
use entcopy::linalg::{herm_eig, partial_trace, ComplexMatrix, C64};
use entcopy::measures::{closed_form_curves, concurrence, index_of_correlation, Bipartition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::format::sig;
use crate::Result;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
const GRID_POINTS: usize = 11;
const HAAR_SAMPLES: usize = 100;
const TWIRL_SAMPLES: usize = 200;

/// A named quantity that passes when `margin >= -tolerance`. Residuals
/// enter with a negative sign, inequalities and eigenvalues as they are.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: String,
    pub margin: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.margin >= -self.tolerance
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<32} margin {:>14} tolerance {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            sig(self.margin, 6),
            sig(self.tolerance, 3)
        )
    }
}

/// Keeps the smallest margin seen for each id, in first-seen order.
#[derive(Default)]
struct Collector {
    order: Vec<String>,
    worst: BTreeMap<String, f64>,
}

impl Collector {
    fn margin(&mut self, id: &str, margin: f64) {
        match self.worst.get_mut(id) {
            Some(m) => *m = m.min(margin),
            None => {
                self.order.push(id.to_string());
                self.worst.insert(id.to_string(), margin);
            }
        }
    }

    fn residual(&mut self, id: &str, residual: f64) {
        self.margin(id, -residual);
    }

    fn finish(self, tolerance: f64) -> Vec<Check> {
        self.order
            .into_iter()
            .map(|id| Check {
                margin: self.worst[&id],
                id,
                tolerance,
            })
            .collect()
    }
}

fn grid() -> Vec<EntanglementClass> {
    (0..GRID_POINTS)
        .map(|i| {
            let a = std::f64::consts::FRAC_1_SQRT_2 * i as f64 / (GRID_POINTS - 1) as f64;
            EntanglementClass::new(a).expect("grid inside canonical range")
        })
        .collect()
}

fn random_density(rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let x = ComplexMatrix::from_fn(4, 4, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = x.adjoint().matmul(&x);
    let t = m.trace().re;
    m.scale_real(1.0 / t).hermitian_part()
}

fn linalg_checks(c: &mut Collector, rng: &mut ChaCha8Rng) -> Result<()> {
    for _ in 0..5 {
        let x = ComplexMatrix::from_fn(16, 16, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let h = x.hermitian_part();
        let eig = herm_eig(&h)?;
        c.residual(
            "linalg.eigen_reconstruction",
            eig.reconstruct_with(|l| l).distance(&h),
        );
    }
    Ok(())
}

fn angular_checks(c: &mut Collector) {
    let ops = local_operators();
    for (i, a) in ops.iter().enumerate() {
        for (j, b) in ops.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            c.residual("angular.tensor_orthonormality", (a.inner(b) - want).norm());
        }
    }
    for idx in TensorOpIndex::all(Pair::P13) {
        let t = entcopy::angular::tensor_op(idx);
        let adj = TensorOpIndex::new(Pair::P13, idx.jb(), idx.ja(), idx.k(), -idx.q())
            .expect("adjoint label is valid");
        let exponent = i32::from(idx.ja()) - i32::from(idx.jb()) + i32::from(idx.q());
        let sign = if exponent.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        let other = entcopy::angular::tensor_op(adj).local.scale_real(sign);
        c.residual(
            "angular.adjoint_relation",
            t.local.adjoint().distance(&other),
        );
    }
}

fn cloner_checks(c: &mut Collector) -> Result<()> {
    for class in grid() {
        let p = optimal_params(class);
        let blocks = assemble_blocks(class, &p)?;
        let tensor = assemble_tensor(class, &p)?;
        c.residual(
            "cloner.assembly_equivalence",
            blocks.rho.distance(&tensor.rho),
        );
        c.residual("cloner.trace", (blocks.rho.trace().re - 1.0).abs());
        c.residual(
            "cloner.fidelity_formula",
            (fidelity_formula(class, &p) - fidelity_direct(&blocks)).abs(),
        );
        c.residual(
            "cloner.f_max_consistency",
            (fidelity_direct(&blocks) - f_max(class)).abs(),
        );
        c.margin("cloner.positivity", herm_eig(&blocks.rho)?.min());
        c.residual(
            "cloner.marginal_symmetry",
            blocks.first_copy().distance(&blocks.second_copy()),
        );
        c.residual(
            "cloner.class_symmetry",
            (f_max(class) - f_max_unfolded(class.beta())?).abs(),
        );
        for check in check_inequalities(class, &p) {
            c.margin(check.id, check.margin);
        }
    }
    Ok(())
}

fn channel_checks(c: &mut Collector, rng: &mut ChaCha8Rng, seed: u64) -> Result<()> {
    let pairs = sample_pairs(HAAR_SAMPLES, seed);
    let twirl_pairs = sample_pairs(TWIRL_SAMPLES, seed.wrapping_add(1));
    for class in grid() {
        let ks = kraus_set(class);
        c.residual(
            "channel.completeness",
            ks.completeness().distance(&ComplexMatrix::identity(4)),
        );
        let d = dilation(class)?;
        c.residual("channel.isometry", d.isometry_residual());
        c.residual("channel.unitarity", d.unitarity_residual());
        let rho = random_density(rng);
        c.residual(
            "channel.dilation_equivalence",
            d.measure_and_discard(&rho)?
                .distance(&apply_channel(&ks, &rho)?),
        );
        let pure = ComplexMatrix::projector(&class.psi());
        let out = ks.apply(&pure);
        let blocks = assemble_blocks(class, &optimal_params(class))?;
        c.residual("channel.kraus_vs_blocks", out.distance(&blocks.rho));
        for (u1, u2) in &pairs {
            c.residual("channel.covariance", covariance_defect(class, u1, u2)?);
        }
        c.margin("channel.choi_psd", herm_eig(&choi_matrix(&ks))?.min());
        c.residual(
            "channel.twirl_fixed_point",
            twirl(&ks, &twirl_pairs, &pure)?.distance(&out),
        );
    }
    Ok(())
}

fn measures_checks(c: &mut Collector) -> Result<()> {
    for class in grid() {
        let p = optimal_params(class);
        let rho = assemble_blocks(class, &p)?.rho;
        let f = closed_form_curves(class, &p);
        let conc =
            |pair: [usize; 2]| -> Result<f64> { Ok(concurrence(&partial_trace(&rho, &pair)?)?) };
        c.residual("measures.c12_closed_form", (f.c12 - conc([0, 1])?).abs());
        c.residual("measures.c13_closed_form", (f.c13 - conc([0, 2])?).abs());
        c.residual(
            "measures.marginal_concurrence",
            (conc([0, 1])? - conc([2, 3])?).abs(),
        );
        for (a, b) in [(&[0][..], &[1][..]), (&[0], &[2]), (&[0, 1], &[2, 3])] {
            let split = Bipartition::new(a, b)?;
            c.margin(
                "measures.index_nonnegative",
                index_of_correlation(&rho, &split)?,
            );
        }
    }
    Ok(())
}

/// Runs every check. The seed drives the Haar samples and random inputs.
pub fn run_verify(tolerance: f64, seed: u64) -> Result<Vec<Check>> {
    let mut c = Collector::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    linalg_checks(&mut c, &mut rng)?;
    angular_checks(&mut c);
    cloner_checks(&mut c)?;
    channel_checks(&mut c, &mut rng, seed)?;
    measures_checks(&mut c)?;
    Ok(c.finish(tolerance))
}
