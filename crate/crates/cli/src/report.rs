//! Text reports for `entcopy params` and `entcopy channel`.

use std::fmt::Write;

use entcopy::channel::{
    apply_channel, covariance_defect, covariance_defect_of, dilation, kraus_set, sample_pairs,
    twirl_seeded, FixedOutputMap, QuantumMap, Twirled,
};
use entcopy::cloner::{check_inequalities, f_max, optimal_params, optimal_v, EntanglementClass};
use entcopy::linalg::{ComplexMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::format::{decimals12, sig};
use crate::Result;

fn complex(z: C64) -> String {
    if z.im == 0.0 {
        decimals12(z.re)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", decimals12(z.re), decimals12(z.im.abs()))
    }
}

/// Optimal parameters, `v`, `F_max` and the inequality margins.
pub fn params_report(class: EntanglementClass) -> String {
    let p = optimal_params(class);
    let mut s = String::new();
    writeln!(s, "alpha = {}", decimals12(class.alpha())).unwrap();
    for i in 1..=17 {
        writeln!(s, "A{i} = {}", complex(p.get(i))).unwrap();
    }
    writeln!(s, "v = {}", decimals12(optimal_v(class))).unwrap();
    writeln!(s, "F_max = {}", decimals12(f_max(class))).unwrap();
    writeln!(s, "inequality margins:").unwrap();
    for check in check_inequalities(class, &p) {
        writeln!(
            s,
            "  {:<28} {:>16}  {}",
            check.id,
            sig(check.margin, 6),
            if check.satisfied { "ok" } else { "violated" }
        )
        .unwrap();
    }
    s
}

/// Realization checks selectable on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelCheck {
    Kraus,
    Dilation,
    Covariance,
    Twirl,
}

impl std::str::FromStr for ChannelCheck {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "kraus" => Ok(Self::Kraus),
            "dilation" => Ok(Self::Dilation),
            "covariance" => Ok(Self::Covariance),
            "twirl" => Ok(Self::Twirl),
            other => Err(format!(
                "unknown check '{other}' (expected kraus, dilation, covariance or twirl)"
            )),
        }
    }
}

/// One residual against its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
}

impl Residual {
    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }
}

pub const KRAUS_THRESHOLD: f64 = 1e-12;
pub const DILATION_THRESHOLD: f64 = 1e-10;
pub const COVARIANCE_THRESHOLD: f64 = 1e-10;
pub const COVARIANCE_SAMPLES: usize = 100;
pub const TWIRL_SAMPLES: usize = 1000;
pub const DILATION_INPUTS: usize = 10;

fn random_density(rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let x = ComplexMatrix::from_fn(4, 4, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = x.adjoint().matmul(&x);
    let t = m.trace().re;
    m.scale_real(1.0 / t).hermitian_part()
}

pub fn run_channel(
    class: EntanglementClass,
    check: ChannelCheck,
    seed: u64,
) -> Result<Vec<Residual>> {
    let ks = kraus_set(class);
    let psi = ComplexMatrix::projector(&class.psi());
    Ok(match check {
        ChannelCheck::Kraus => {
            let out = apply_channel(&ks, &psi)?;
            vec![
                Residual {
                    name: "completeness",
                    value: ks.completeness().distance(&ComplexMatrix::identity(4)),
                    threshold: KRAUS_THRESHOLD,
                },
                Residual {
                    name: "trace",
                    value: (out.trace().re - 1.0).abs(),
                    threshold: KRAUS_THRESHOLD,
                },
            ]
        }
        ChannelCheck::Dilation => {
            let d = dilation(class)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut equivalence: f64 = 0.0;
            for _ in 0..DILATION_INPUTS {
                let rho = random_density(&mut rng);
                equivalence = equivalence.max(
                    d.measure_and_discard(&rho)?
                        .distance(&apply_channel(&ks, &rho)?),
                );
            }
            vec![
                Residual {
                    name: "isometry",
                    value: d.isometry_residual(),
                    threshold: DILATION_THRESHOLD,
                },
                Residual {
                    name: "unitarity",
                    value: d.unitarity_residual(),
                    threshold: DILATION_THRESHOLD,
                },
                Residual {
                    name: "equivalence",
                    value: equivalence,
                    threshold: DILATION_THRESHOLD,
                },
            ]
        }
        ChannelCheck::Covariance => {
            let mut worst: f64 = 0.0;
            for (u1, u2) in sample_pairs(COVARIANCE_SAMPLES, seed) {
                worst = worst.max(covariance_defect(class, &u1, &u2)?);
            }
            vec![Residual {
                name: "max_defect",
                value: worst,
                threshold: COVARIANCE_THRESHOLD,
            }]
        }
        ChannelCheck::Twirl => {
            let n = TWIRL_SAMPLES;
            let statistical = 5.0 / (n as f64).sqrt();
            let twirled = twirl_seeded(&ks, n, seed, &psi)?;
            let probes = sample_pairs(4, seed.wrapping_add(1));
            let fixed = Twirled {
                inner: FixedOutputMap,
                samples: sample_pairs(n, seed.wrapping_add(2)),
            };
            let defect = probes
                .iter()
                .map(|(u1, u2)| covariance_defect_of(&fixed, &psi, u1, u2))
                .fold(0.0, f64::max);
            vec![
                Residual {
                    name: "fixed_point",
                    value: twirled.distance(&ks.apply(&psi)),
                    threshold: statistical,
                },
                Residual {
                    name: "non_covariant_defect",
                    value: defect,
                    threshold: statistical,
                },
            ]
        }
    })
}

pub fn channel_report(residuals: &[Residual]) -> String {
    residuals
        .iter()
        .map(|r| {
            format!(
                "{} {:<22} {:>14} (threshold {})\n",
                if r.passed() { "PASS" } else { "FAIL" },
                r.name,
                sig(r.value, 6),
                sig(r.threshold, 3)
            )
        })
        .collect()
}
