//! Wigner 3j symbols, coupled two-qubit bases and irreducible tensor
//! operators on the qubit pairs (1,3) and (2,4).
//!
//! Within a pair the first-named qubit is the more significant bit of the
//! local 4-dimensional index. Condon-Shortley phases throughout.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};

/// A non-negative or negative half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub const fn int(n: i32) -> Self {
        Self(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

fn factorial(n: i32) -> Option<u128> {
    (1..=u128::try_from(n).ok()?).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact non-negative rational `num / den`.
#[derive(Clone, Copy)]
struct Ratio {
    num: u128,
    den: u128,
}

impl Ratio {
    fn new(num: u128, den: u128) -> Self {
        let g = gcd(num, den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    fn mul(self, other: Self) -> Option<Self> {
        let a = Self::new(self.num, other.den);
        let b = Self::new(other.num, self.den);
        Some(Self::new(
            a.num.checked_mul(b.num)?,
            a.den.checked_mul(b.den)?,
        ))
    }
}

fn too_large() -> Error {
    Error::InvalidQuantumNumbers("quantum numbers too large for exact evaluation".into())
}

/// Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)` by the Racah formula, with the
/// alternating sum and the prefactor evaluated in exact integer arithmetic.
pub fn wigner_3j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<f64> {
    let js = [j1.0, j2.0, j3.0];
    let ms = [m1.0, m2.0, m3.0];
    for (&j, &m) in js.iter().zip(&ms) {
        if j < 0 {
            return Err(Error::InvalidQuantumNumbers(format!(
                "negative angular momentum {}",
                HalfInt(j)
            )));
        }
        if (j - m) % 2 != 0 {
            return Err(Error::InvalidQuantumNumbers(format!(
                "j = {} and m = {} differ by a half-integer",
                HalfInt(j),
                HalfInt(m)
            )));
        }
        if m.abs() > j {
            return Err(Error::InvalidQuantumNumbers(format!(
                "|m| = |{}| exceeds j = {}",
                HalfInt(m),
                HalfInt(j)
            )));
        }
    }
    if ms.iter().sum::<i32>() != 0 {
        return Ok(0.0);
    }
    let [a, b, c] = js;
    if (a + b + c) % 2 != 0 || c > a + b || c < (a - b).abs() {
        return Ok(0.0);
    }
    // All quantities below are integers once halved.
    let h = |x: i32| x / 2;
    let (j1, j2, j3) = (a, b, c);
    let (m1, m2, m3) = (ms[0], ms[1], ms[2]);

    let delta = Ratio::new(
        factorial(h(j1 + j2 - j3))
            .and_then(|x| x.checked_mul(factorial(h(j1 - j2 + j3))?))
            .and_then(|x| x.checked_mul(factorial(h(-j1 + j2 + j3))?))
            .ok_or_else(too_large)?,
        factorial(h(j1 + j2 + j3) + 1).ok_or_else(too_large)?,
    );
    let mut prod: u128 = 1;
    for x in [j1 + m1, j1 - m1, j2 + m2, j2 - m2, j3 + m3, j3 - m3] {
        prod = prod
            .checked_mul(factorial(h(x)).ok_or_else(too_large)?)
            .ok_or_else(too_large)?;
    }

    let k_min = 0.max(h(j2 - j3 - m1)).max(h(j1 - j3 + m2));
    let k_max = h(j1 + j2 - j3).min(h(j1 - m1)).min(h(j2 + m2));
    let mut denominators = Vec::new();
    for k in k_min..=k_max {
        let d = [
            k,
            h(j1 + j2 - j3) - k,
            h(j1 - m1) - k,
            h(j2 + m2) - k,
            h(j3 - j2 + m1) + k,
            h(j3 - j1 - m2) + k,
        ]
        .iter()
        .try_fold(1u128, |acc, &n| acc.checked_mul(factorial(n)?))
        .ok_or_else(too_large)?;
        denominators.push((k, d));
    }
    let lcm = denominators
        .iter()
        .try_fold(1u128, |acc, &(_, d)| (acc / gcd(acc, d)).checked_mul(d))
        .ok_or_else(too_large)?;
    let mut sum: i128 = 0;
    for &(k, d) in &denominators {
        let term = i128::try_from(lcm / d).map_err(|_| too_large())?;
        sum = if k % 2 == 0 {
            sum.checked_add(term)
        } else {
            sum.checked_sub(term)
        }
        .ok_or_else(too_large)?;
    }
    if sum == 0 {
        return Ok(0.0);
    }
    let s = Ratio::new(sum.unsigned_abs(), lcm);
    let squared = delta
        .mul(Ratio::new(prod, 1))
        .and_then(|x| x.mul(s))
        .and_then(|x| x.mul(s))
        .ok_or_else(too_large)?;
    let magnitude = (squared.num as f64 / squared.den as f64).sqrt();
    let phase = h(j1 - j2 - m3);
    let sign = if (phase % 2 == 0) == (sum > 0) {
        1.0
    } else {
        -1.0
    };
    Ok(sign * magnitude)
}

/// Integer-argument convenience wrapper.
pub fn wigner_3j_int(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> Result<f64> {
    wigner_3j(
        HalfInt::int(j1),
        HalfInt::int(j2),
        HalfInt::int(j3),
        HalfInt::int(m1),
        HalfInt::int(m2),
        HalfInt::int(m3),
    )
}

/// Designated qubit pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pair {
    /// Qubits 1 and 3 (first system qubit and its copy).
    P13,
    /// Qubits 2 and 4.
    P24,
}

impl Pair {
    /// Zero-based positions in the global order (1,2,3,4).
    pub fn positions(self) -> [usize; 2] {
        match self {
            Pair::P13 => [0, 2],
            Pair::P24 => [1, 3],
        }
    }
}

fn check_jm(j: u8, m: i8) -> Result<()> {
    if j > 1 || i32::from(m).abs() > i32::from(j) {
        return Err(Error::InvalidQuantumNumbers(format!(
            "(J, M) = ({j}, {m}) is not a two-qubit angular momentum"
        )));
    }
    Ok(())
}

/// `|J M>` of a qubit pair in the pair's product basis.
pub fn coupled_state(j: u8, m: i8) -> Result<[C64; 4]> {
    check_jm(j, m)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let c = |x: f64| C64::new(x, 0.0);
    Ok(match (j, m) {
        (1, 1) => [c(1.0), ZERO, ZERO, ZERO],
        (1, 0) => [ZERO, c(r), c(r), ZERO],
        (1, -1) => [ZERO, ZERO, ZERO, c(1.0)],
        _ => [ZERO, c(r), c(-r), ZERO],
    })
}

/// Label `|J M; J' M'> = |J M>_(1,3) (x) |J' M'>_(2,4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoupledLabel {
    pub j13: u8,
    pub m13: i8,
    pub j24: u8,
    pub m24: i8,
}

impl CoupledLabel {
    pub fn new(j13: u8, m13: i8, j24: u8, m24: i8) -> Result<Self> {
        check_jm(j13, m13)?;
        check_jm(j24, m24)?;
        Ok(Self { j13, m13, j24, m24 })
    }

    /// Position in [`coupled_labels`].
    pub fn position(self) -> usize {
        let key = |j: u8, m: i8| if j == 0 { 3 } else { (1 - m) as usize };
        4 * key(self.j13, self.m13) + key(self.j24, self.m24)
    }
}

impl fmt::Display for CoupledLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{};{},{}>", self.j13, self.m13, self.j24, self.m24)
    }
}

const PAIR_KEYS: [(u8, i8); 4] = [(1, 1), (1, 0), (1, -1), (0, 0)];

/// All sixteen coupled labels; the (1,3) label varies slowest, each pair
/// runs through `|1,1>, |1,0>, |1,-1>, |0,0>`.
pub fn coupled_labels() -> [CoupledLabel; 16] {
    std::array::from_fn(|i| {
        let (j13, m13) = PAIR_KEYS[i / 4];
        let (j24, m24) = PAIR_KEYS[i % 4];
        CoupledLabel { j13, m13, j24, m24 }
    })
}

/// Global index (qubit order 1,2,3,4) of local pair indices.
#[inline]
pub fn global_index(i13: usize, i24: usize) -> usize {
    ((i13 >> 1) << 3) | ((i24 >> 1) << 2) | ((i13 & 1) << 1) | (i24 & 1)
}

/// `a (x) b` with `a` on pair (1,3) and `b` on pair (2,4), reindexed to
/// qubit order (1,2,3,4).
pub fn embed_pair_vectors(a: &[C64; 4], b: &[C64; 4]) -> Vec<C64> {
    let mut v = vec![ZERO; 16];
    for (i, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            v[global_index(i, k)] = x * y;
        }
    }
    v
}

/// `A (x) B` with `A` on pair (1,3) and `B` on pair (2,4), reindexed to
/// qubit order (1,2,3,4).
pub fn embed_pairs(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.rows() == 4 && a.cols() == 4 && b.rows() == 4 && b.cols() == 4);
    let mut m = ComplexMatrix::zeros(16, 16);
    for ar in 0..4 {
        for ac in 0..4 {
            let x = a[(ar, ac)];
            if x == ZERO {
                continue;
            }
            for br in 0..4 {
                for bc in 0..4 {
                    m[(global_index(ar, br), global_index(ac, bc))] = x * b[(br, bc)];
                }
            }
        }
    }
    m
}

/// Operator acting as `local` on `pair` and as the identity on the other.
pub fn embed_on_pair(pair: Pair, local: &ComplexMatrix) -> ComplexMatrix {
    let id = ComplexMatrix::identity(4);
    match pair {
        Pair::P13 => embed_pairs(local, &id),
        Pair::P24 => embed_pairs(&id, local),
    }
}

pub fn coupled_to_product(label: CoupledLabel) -> Result<Vec<C64>> {
    let a = coupled_state(label.j13, label.m13)?;
    let b = coupled_state(label.j24, label.m24)?;
    Ok(embed_pair_vectors(&a, &b))
}

/// Unitary whose columns are the coupled basis vectors in label order.
pub fn coupled_basis_matrix() -> &'static ComplexMatrix {
    static BASIS: OnceLock<ComplexMatrix> = OnceLock::new();
    BASIS.get_or_init(|| {
        let cols: Vec<Vec<C64>> = coupled_labels()
            .into_iter()
            .map(|l| coupled_to_product(l).expect("canonical labels are valid"))
            .collect();
        ComplexMatrix::from_columns(&cols).expect("sixteen columns of length 16")
    })
}

/// Projector onto the triplet subspace of a pair (local 4x4).
pub fn triplet_projector() -> ComplexMatrix {
    [1, 0, -1]
        .into_iter()
        .map(|m| ComplexMatrix::projector(&coupled_state(1, m).unwrap()))
        .sum()
}

/// Projector onto the singlet of a pair (local 4x4).
pub fn singlet_projector() -> ComplexMatrix {
    ComplexMatrix::projector(&coupled_state(0, 0).unwrap())
}

/// Label `T^(pair)(J_a, J_b)_{K Q}` of an irreducible tensor operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorOpIndex {
    pair: Pair,
    ja: u8,
    jb: u8,
    k: u8,
    q: i8,
}

impl TensorOpIndex {
    pub fn new(pair: Pair, ja: u8, jb: u8, k: u8, q: i8) -> Result<Self> {
        if ja > 1 || jb > 1 {
            return Err(Error::InvalidQuantumNumbers(format!(
                "J_a = {ja}, J_b = {jb} must be 0 or 1"
            )));
        }
        if i32::from(q).abs() > i32::from(k) {
            return Err(Error::InvalidQuantumNumbers(format!(
                "|Q| = |{q}| exceeds K = {k}"
            )));
        }
        if k < ja.abs_diff(jb) || k > ja + jb {
            return Err(Error::TriangleRule(format!(
                "K = {k} not in [|{ja} - {jb}|, {ja} + {jb}]"
            )));
        }
        Ok(Self { pair, ja, jb, k, q })
    }

    pub fn pair(self) -> Pair {
        self.pair
    }
    pub fn ja(self) -> u8 {
        self.ja
    }
    pub fn jb(self) -> u8 {
        self.jb
    }
    pub fn k(self) -> u8 {
        self.k
    }
    pub fn q(self) -> i8 {
        self.q
    }

    /// The sixteen valid labels of a pair, in a fixed order.
    pub fn all(pair: Pair) -> Vec<Self> {
        let mut out = Vec::with_capacity(16);
        for (ja, jb) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
            for k in ja.abs_diff(jb)..=ja + jb {
                for q in -(k as i8)..=(k as i8) {
                    out.push(Self { pair, ja, jb, k, q });
                }
            }
        }
        out
    }

    /// Position of this label within [`TensorOpIndex::all`].
    pub fn position(self) -> usize {
        let block_start = match (self.ja, self.jb) {
            (0, 0) => 0,
            (0, 1) => 1,
            (1, 0) => 4,
            _ => 7,
        };
        let k_start = match (self.ja, self.jb, self.k) {
            (1, 1, 1) => 1,
            (1, 1, 2) => 4,
            _ => 0,
        };
        block_start + k_start + (i32::from(self.q) + i32::from(self.k)) as usize
    }

    /// Same label on the other pair.
    pub fn on(self, pair: Pair) -> Self {
        Self { pair, ..self }
    }
}

impl fmt::Display for TensorOpIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.pair {
            Pair::P13 => "13",
            Pair::P24 => "24",
        };
        write!(f, "T{p}({},{})_{},{}", self.ja, self.jb, self.k, self.q)
    }
}

/// An irreducible tensor operator on its pair and embedded in four qubits.
#[derive(Debug, Clone)]
pub struct TensorOp {
    pub index: TensorOpIndex,
    /// 4x4 operator in the pair's product basis.
    pub local: ComplexMatrix,
    /// 16x16 operator in qubit order (1,2,3,4), identity on the other pair.
    pub embedded: ComplexMatrix,
}

fn build_local(ja: u8, jb: u8, k: u8, q: i8) -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(4, 4);
    let (ja_i, jb_i, k_i, q_i) = (i32::from(ja), i32::from(jb), i32::from(k), i32::from(q));
    let norm = f64::from(2 * k_i + 1).sqrt();
    for ma in -ja_i..=ja_i {
        for mb in -jb_i..=jb_i {
            let w = wigner_3j_int(ja_i, jb_i, k_i, ma, -mb, -q_i).expect("valid quantum numbers");
            if w == 0.0 {
                continue;
            }
            let sign = if (ja_i - ma) % 2 == 0 { 1.0 } else { -1.0 };
            let ket = coupled_state(ja, ma as i8).unwrap();
            let bra = coupled_state(jb, mb as i8).unwrap();
            let term = ComplexMatrix::outer(&ket, &bra).scale_real(sign * norm * w);
            t = &t + &term;
        }
    }
    t
}

/// Local 4x4 operators in the order of [`TensorOpIndex::all`].
pub fn local_operators() -> &'static [ComplexMatrix] {
    static TABLE: OnceLock<Vec<ComplexMatrix>> = OnceLock::new();
    TABLE.get_or_init(|| {
        TensorOpIndex::all(Pair::P13)
            .into_iter()
            .map(|i| build_local(i.ja, i.jb, i.k, i.q))
            .collect()
    })
}

pub fn tensor_op(index: TensorOpIndex) -> TensorOp {
    let local = local_operators()[index.position()].clone();
    let embedded = embed_on_pair(index.pair, &local);
    TensorOp {
        index,
        local,
        embedded,
    }
}

/// Coefficients `<T^(1,3)dagger (x) T^(2,4)dagger> = Tr{(T^dagger (x) T^dagger) rho}`
/// over all 16 x 16 label pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorCoefficients {
    values: Vec<C64>,
}

impl TensorCoefficients {
    pub fn zeros() -> Self {
        Self {
            values: vec![ZERO; 256],
        }
    }

    fn check_pairs(i13: TensorOpIndex, i24: TensorOpIndex) -> Result<()> {
        if i13.pair != Pair::P13 || i24.pair != Pair::P24 {
            return Err(Error::InvalidSelection(format!(
                "expected a (1,3) label and a (2,4) label, got {i13} and {i24}"
            )));
        }
        Ok(())
    }

    pub fn get(&self, i13: TensorOpIndex, i24: TensorOpIndex) -> Result<C64> {
        Self::check_pairs(i13, i24)?;
        Ok(self.values[16 * i13.position() + i24.position()])
    }

    pub fn set(&mut self, i13: TensorOpIndex, i24: TensorOpIndex, value: C64) -> Result<()> {
        Self::check_pairs(i13, i24)?;
        self.values[16 * i13.position() + i24.position()] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (TensorOpIndex, TensorOpIndex, C64)> + '_ {
        let l13 = TensorOpIndex::all(Pair::P13);
        let l24 = TensorOpIndex::all(Pair::P24);
        self.values
            .iter()
            .enumerate()
            .map(move |(n, &c)| (l13[n / 16], l24[n % 16], c))
    }

    /// Applies `f(label13, label24, coefficient)` to every coefficient.
    pub fn map(&self, mut f: impl FnMut(TensorOpIndex, TensorOpIndex, C64) -> C64) -> Self {
        Self {
            values: self.iter().map(|(a, b, c)| f(a, b, c)).collect(),
        }
    }

    /// `sum c T^(1,3) (x) T^(2,4)`.
    pub fn synthesize(&self) -> ComplexMatrix {
        let ops = local_operators();
        // realigned[(ar, ac), (br, bc)] = sum_ij c_ij A_i[ar, ac] B_j[br, bc]
        let mut inner = vec![[ZERO; 16]; 16];
        for (i, row) in inner.iter_mut().enumerate() {
            for (j, b) in ops.iter().enumerate() {
                let c = self.values[16 * i + j];
                if c == ZERO {
                    continue;
                }
                for (slot, &x) in row.iter_mut().zip(b.as_slice()) {
                    *slot += c * x;
                }
            }
        }
        let mut m = ComplexMatrix::zeros(16, 16);
        for (a, row) in ops.iter().zip(&inner) {
            for (ai, &x) in a.as_slice().iter().enumerate() {
                if x == ZERO {
                    continue;
                }
                let (ar, ac) = (ai / 4, ai % 4);
                for (bi, &y) in row.iter().enumerate() {
                    let (br, bc) = (bi / 4, bi % 4);
                    m[(global_index(ar, br), global_index(ac, bc))] += x * y;
                }
            }
        }
        m
    }
}

pub fn tensor_coeffs(rho: &ComplexMatrix) -> Result<TensorCoefficients> {
    if rho.rows() != 16 || rho.cols() != 16 {
        return Err(Error::DimensionMismatch(format!(
            "expected a 16x16 operator, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let ops = local_operators();
    // realigned[(ar, ac)][(br, bc)] = rho[(ar, br), (ac, bc)]
    let mut realigned = [[ZERO; 16]; 16];
    for (ai, row) in realigned.iter_mut().enumerate() {
        let (ar, ac) = (ai / 4, ai % 4);
        for (bi, slot) in row.iter_mut().enumerate() {
            let (br, bc) = (bi / 4, bi % 4);
            *slot = rho[(global_index(ar, br), global_index(ac, bc))];
        }
    }
    let mut values = Vec::with_capacity(256);
    for a in ops {
        let mut partial = [ZERO; 16];
        for (x, row) in a.as_slice().iter().zip(&realigned) {
            if *x == ZERO {
                continue;
            }
            for (p, y) in partial.iter_mut().zip(row) {
                *p += x.conj() * y;
            }
        }
        for b in ops {
            values.push(
                b.as_slice()
                    .iter()
                    .zip(&partial)
                    .map(|(y, p)| y.conj() * p)
                    .sum(),
            );
        }
    }
    Ok(TensorCoefficients { values })
}
