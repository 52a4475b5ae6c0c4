//! Wigner 3j symbols against Clebsch-Gordan coefficients built by
//! repeatedly applying the total lowering operator.

use entcopy::angular::{wigner_3j, HalfInt};

/// Magnetic numbers of spin `j` (all doubled), from `j` down to `-j`.
fn ms(tj: i32) -> Vec<i32> {
    (0..=tj).map(|k| tj - 2 * k).collect()
}

/// `<j, m-1| J- |j, m>` with doubled arguments.
fn lower(tj: i32, tm: i32) -> f64 {
    let (j, m) = (tj as f64 / 2.0, tm as f64 / 2.0);
    ((j + m) * (j - m + 1.0)).sqrt()
}

/// Twice `J`, with the states `(twice M, coefficients)` from `M = J` down.
type Multiplet = (i32, Vec<(i32, Vec<f64>)>);

/// Coupled states `|J M>` in the product basis, Condon-Shortley
/// convention: the `M = J` state is orthogonal to all larger J and has a
/// positive coefficient at the largest `m1`; the rest follow by lowering.
fn clebsch_gordan(tj1: i32, tj2: i32) -> Vec<Multiplet> {
    let m1s = ms(tj1);
    let m2s = ms(tj2);
    let dim = m1s.len() * m2s.len();
    let idx = |a: usize, b: usize| a * m2s.len() + b;
    let total_m = |i: usize| m1s[i / m2s.len()] + m2s[i % m2s.len()];

    let apply_lower = |v: &[f64]| {
        let mut out = vec![0.0; dim];
        for (a, &m1) in m1s.iter().enumerate() {
            for (b, &m2) in m2s.iter().enumerate() {
                let c = v[idx(a, b)];
                if c == 0.0 {
                    continue;
                }
                if m1 > -tj1 {
                    out[idx(a + 1, b)] += c * lower(tj1, m1);
                }
                if m2 > -tj2 {
                    out[idx(a, b + 1)] += c * lower(tj2, m2);
                }
            }
        }
        out
    };

    let mut table: Vec<Multiplet> = Vec::new();
    let mut tjj = tj1 + tj2;
    while tjj >= (tj1 - tj2).abs() {
        // First product state with M = J that survives projection off the
        // larger-J states.
        let mut v = Vec::new();
        for start in (0..dim).filter(|&i| total_m(i) == tjj) {
            let mut w = vec![0.0; dim];
            w[start] = 1.0;
            for (_, states) in &table {
                let top = &states
                    .iter()
                    .find(|(m, _)| *m == tjj)
                    .expect("M = J present")
                    .1;
                let overlap: f64 = top.iter().zip(&w).map(|(a, b)| a * b).sum();
                for (x, t) in w.iter_mut().zip(top) {
                    *x -= overlap * t;
                }
            }
            if w.iter().map(|x| x * x).sum::<f64>() > 1e-6 {
                v = w;
                break;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let lead = (0..dim)
            .find(|&i| total_m(i) == tjj && v[i].abs() > 1e-9)
            .expect("a state with M = J");
        let sign = v[lead].signum();
        v.iter_mut().for_each(|x| *x *= sign / norm);

        let mut states = vec![(tjj, v.clone())];
        let mut tm = tjj;
        while tm > -tjj {
            let next = apply_lower(&v);
            let n = lower(tjj, tm);
            v = next.iter().map(|x| x / n).collect();
            tm -= 2;
            states.push((tm, v.clone()));
        }
        table.push((tjj, states));
        tjj -= 2;
    }
    table
}

#[test]
fn three_j_matches_lowering_construction() {
    let mut checked = 0;
    for tj1 in 0..=4 {
        for tj2 in 0..=4 {
            let m1s = ms(tj1);
            let m2s = ms(tj2);
            for (tjj, states) in clebsch_gordan(tj1, tj2) {
                for (tm, v) in states {
                    for (a, &m1) in m1s.iter().enumerate() {
                        for (b, &m2) in m2s.iter().enumerate() {
                            let cg = v[a * m2s.len() + b];
                            let w = wigner_3j(
                                HalfInt::from_twice(tj1),
                                HalfInt::from_twice(tj2),
                                HalfInt::from_twice(tjj),
                                HalfInt::from_twice(m1),
                                HalfInt::from_twice(m2),
                                HalfInt::from_twice(-tm),
                            )
                            .unwrap();
                            let phase = if ((tj1 - tj2 + tm) / 2).rem_euclid(2) == 0 {
                                1.0
                            } else {
                                -1.0
                            };
                            let expected = phase * f64::from(tjj + 1).sqrt() * w;
                            assert!(
                                (cg - expected).abs() < 1e-12,
                                "j1={tj1}/2 j2={tj2}/2 J={tjj}/2 m1={m1}/2 m2={m2}/2 M={tm}/2: \
                                 {cg} vs {expected}"
                            );
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn selection_rules_give_zero() {
    let h = HalfInt::from_twice;
    // m1 + m2 + m3 != 0
    assert_eq!(wigner_3j(h(2), h(2), h(2), h(2), h(0), h(0)).unwrap(), 0.0);
    // triangle violated
    assert_eq!(wigner_3j(h(1), h(1), h(4), h(1), h(-1), h(0)).unwrap(), 0.0);
    // odd J sum with all m = 0
    assert_eq!(wigner_3j(h(2), h(2), h(2), h(0), h(0), h(0)).unwrap(), 0.0);
    assert!(wigner_3j(h(1), h(2), h(2), h(0), h(0), h(0)).is_err());
}
