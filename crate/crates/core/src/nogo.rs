//! Desk-scale versions of the no-go results: CHSH against the exhaustive
//! local-hidden-variable bound, the Peres-Mermin square, and the overlap gap
//! that rules out cloning non-orthogonal states.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::fsm::{self, format::MachineDoc, FsmError, Symbol, Trace};
use crate::quantum::{
    c, hermitian_deviation, identity, max_abs, overlap, pauli_x, pauli_y, pauli_z,
    DensityOperator, Matrix, QuantumError, StateVector, Tensor,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NogoError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Fsm(#[from] FsmError),
    #[error("CHSH needs a two-qubit state, got dimension {0}")]
    NotTwoQubit(usize),
    #[error("angle `{0}` is not finite")]
    NonFiniteAngle(&'static str),
}

pub type Result<T, E = NogoError> = std::result::Result<T, E>;

/// Spin observable along the x-z plane direction at `theta` from the z axis.
pub fn spin_along(theta: f64) -> Matrix {
    pauli_z().scale(theta.cos()) + pauli_x().scale(theta.sin())
}

/// `E(x, y) = tr(rho (n_x·σ ⊗ n_y·σ))`.
pub fn correlator(state: &DensityOperator, x: f64, y: f64) -> Result<f64> {
    if state.dim() != 4 {
        return Err(NogoError::NotTwoQubit(state.dim()));
    }
    Ok(state.expectation(&spin_along(x).tensor(&spin_along(y)))?.re)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshSetting {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
    pub state: DensityOperator,
}

impl ChshSetting {
    /// Singlet with the angles that reach the Tsirelson bound.
    pub fn tsirelson() -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        ChshSetting {
            a: 0.0,
            a_prime: FRAC_PI_2,
            b: FRAC_PI_4,
            b_prime: 3.0 * FRAC_PI_4,
            state: StateVector::singlet().projector(),
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a", self.a),
            ("a_prime", self.a_prime),
            ("b", self.b),
            ("b_prime", self.b_prime),
        ] {
            if !v.is_finite() {
                return Err(NogoError::NonFiniteAngle(name));
            }
        }
        if self.state.dim() != 4 {
            return Err(NogoError::NotTwoQubit(self.state.dim()));
        }
        Ok(())
    }

    fn pairs(&self) -> [(f64, f64, f64); 4] {
        [
            (self.a, self.b, 1.0),
            (self.a, self.b_prime, -1.0),
            (self.a_prime, self.b, 1.0),
            (self.a_prime, self.b_prime, 1.0),
        ]
    }
}

/// `S = E(a,b) - E(a,b') + E(a',b) + E(a',b')`, computed exactly.
pub fn chsh_value(setting: &ChshSetting) -> Result<f64> {
    setting.validate()?;
    setting
        .pairs()
        .iter()
        .map(|&(x, y, sign)| Ok(sign * correlator(&setting.state, x, y)?))
        .sum()
}

/// Finite-shot estimate of `S`: each correlator is estimated from `shots`
/// joint ±1 outcomes drawn from the Born distribution.
pub fn chsh_sampled<R: Rng + ?Sized>(setting: &ChshSetting, shots: usize, rng: &mut R) -> Result<f64> {
    setting.validate()?;
    let projectors = |theta: f64| {
        let n = spin_along(theta);
        [
            (identity(2) + &n).scale(0.5),
            (identity(2) - &n).scale(0.5),
        ]
    };
    let mut total = 0.0;
    for (x, y, sign) in setting.pairs() {
        let (px, py) = (projectors(x), projectors(y));
        let mut weights = Vec::with_capacity(4);
        for p in &px {
            for q in &py {
                weights.push(setting.state.expectation(&p.tensor(q))?.re.max(0.0));
            }
        }
        let dist = WeightedIndex::new(&weights).expect("Born weights are nonnegative, nonzero");
        let products = [1.0, -1.0, -1.0, 1.0];
        let sum: f64 = (0..shots).map(|_| products[dist.sample(rng)]).sum();
        total += sign * sum / shots.max(1) as f64;
    }
    Ok(total)
}

/// Deterministic local assignment of ±1 outcomes to the four settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LhvStrategy {
    pub a: i8,
    pub a_prime: i8,
    pub b: i8,
    pub b_prime: i8,
}

impl LhvStrategy {
    pub fn chsh(&self) -> i32 {
        let [a, ap, b, bp] = [self.a, self.a_prime, self.b, self.b_prime].map(i32::from);
        a * b - a * bp + ap * b + ap * bp
    }

    /// All 16 strategies, `a` varying slowest.
    pub fn all() -> Vec<LhvStrategy> {
        let pm = [1i8, -1];
        let mut out = Vec::with_capacity(16);
        for a in pm {
            for a_prime in pm {
                for b in pm {
                    for b_prime in pm {
                        out.push(LhvStrategy { a, a_prime, b, b_prime });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LhvBound {
    pub max_abs: i32,
    pub max: i32,
    pub min: i32,
    /// Strategies with `S = max`.
    pub achieving_max: usize,
    pub table: Vec<(LhvStrategy, i32)>,
}

/// Exhaustive CHSH values over every deterministic local strategy. Angles
/// play no role: a local strategy fixes outcomes, not directions.
pub fn lhv_chsh_bound() -> LhvBound {
    let table: Vec<(LhvStrategy, i32)> =
        LhvStrategy::all().into_iter().map(|s| (s, s.chsh())).collect();
    let max = table.iter().map(|t| t.1).max().expect("16 strategies");
    let min = table.iter().map(|t| t.1).min().expect("16 strategies");
    LhvBound {
        max_abs: max.abs().max(min.abs()),
        max,
        min,
        achieving_max: table.iter().filter(|t| t.1 == max).count(),
        table,
    }
}

/// The Peres-Mermin square of two-qubit Pauli products.
///
/// ```text
///   X⊗I   I⊗X   X⊗X
///   I⊗Z   Z⊗I   Z⊗Z
///   X⊗Z   Z⊗X   Y⊗Y
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct MerminSquare {
    pub cells: [[Matrix; 3]; 3],
}

impl MerminSquare {
    pub fn standard() -> Self {
        let (i, x, y, z) = (identity(2), pauli_x(), pauli_y(), pauli_z());
        MerminSquare {
            cells: [
                [x.tensor(&i), i.tensor(&x), x.tensor(&x)],
                [i.tensor(&z), z.tensor(&i), z.tensor(&z)],
                [x.tensor(&z), z.tensor(&x), y.tensor(&y)],
            ],
        }
    }

    fn row(&self, r: usize) -> [&Matrix; 3] {
        [&self.cells[r][0], &self.cells[r][1], &self.cells[r][2]]
    }

    fn column(&self, col: usize) -> [&Matrix; 3] {
        [&self.cells[0][col], &self.cells[1][col], &self.cells[2][col]]
    }
}

/// Sign of a product that should be `±I`, with its distance from that.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductSign {
    pub sign: i8,
    pub deviation: f64,
}

fn product_sign(ops: [&Matrix; 3]) -> ProductSign {
    let product = ops[0] * ops[1] * ops[2];
    let id = identity(product.nrows());
    let plus = max_abs(&(&product - &id));
    let minus = max_abs(&(&product + &id));
    if plus <= minus {
        ProductSign { sign: 1, deviation: plus }
    } else {
        ProductSign { sign: -1, deviation: minus }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KochenSpeckerReport {
    /// Largest deviation of any cell from Hermitian with `A² = I`.
    pub max_observable_deviation: f64,
    /// Largest commutator entry within any row or column.
    pub max_commutator: f64,
    pub row_products: [ProductSign; 3],
    pub column_products: [ProductSign; 3],
    pub assignments_checked: usize,
    /// Classical ±1 assignments to the nine cells reproducing every row and
    /// column product sign.
    pub satisfying_assignments: usize,
}

impl KochenSpeckerReport {
    pub fn max_product_deviation(&self) -> f64 {
        self.row_products
            .iter()
            .chain(&self.column_products)
            .map(|p| p.deviation)
            .fold(0.0, f64::max)
    }
}

pub fn kochen_specker_check() -> KochenSpeckerReport {
    let square = MerminSquare::standard();
    let id4 = identity(4);
    let max_observable_deviation = square
        .cells
        .iter()
        .flatten()
        .map(|m| hermitian_deviation(m).max(max_abs(&(m * m - &id4))))
        .fold(0.0, f64::max);

    let lines: Vec<[&Matrix; 3]> = (0..3)
        .map(|r| square.row(r))
        .chain((0..3).map(|col| square.column(col)))
        .collect();
    let mut max_commutator: f64 = 0.0;
    for line in &lines {
        for i in 0..3 {
            for j in i + 1..3 {
                let comm = line[i] * line[j] - line[j] * line[i];
                max_commutator = max_commutator.max(max_abs(&comm));
            }
        }
    }

    let row_products = [0, 1, 2].map(|r| product_sign(square.row(r)));
    let column_products = [0, 1, 2].map(|col| product_sign(square.column(col)));

    let total = 1usize << 9;
    let satisfying_assignments = (0..total)
        .filter(|&bits| {
            let v = |r: usize, col: usize| if bits >> (3 * r + col) & 1 == 0 { 1i8 } else { -1 };
            (0..3).all(|r| v(r, 0) * v(r, 1) * v(r, 2) == row_products[r].sign)
                && (0..3).all(|col| v(0, col) * v(1, col) * v(2, col) == column_products[col].sign)
        })
        .count();

    KochenSpeckerReport {
        max_observable_deviation,
        max_commutator,
        row_products,
        column_products,
        assignments_checked: total,
        satisfying_assignments,
    }
}

/// `|<psi|phi>| - |<psi|phi>|²`. A unitary `U(|s>|0>) = |s>|s>` would have to
/// satisfy `<psi|phi> = <psi|phi>²`, so a positive gap means no single unitary
/// clones both states.
pub fn no_cloning_gap(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    let o = overlap(psi, phi)?.norm();
    Ok(o - o * o)
}

/// `cos(t)|0> + sin(t)|1>`, whose overlap with `|0>` is `cos(t)`.
pub fn qubit_at(t: f64) -> StateVector {
    StateVector::from_complex(&[c(t.cos(), 0.0), c(t.sin(), 0.0)]).expect("unit vector")
}

/// Two machines that left the same record yet are not copies of each other,
/// with the future experiment that tells them apart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloneInferenceReport {
    pub record: Vec<Symbol>,
    pub machine_a: MachineDoc,
    pub machine_b: MachineDoc,
    pub record_identical: bool,
    pub distinguishable: bool,
    pub separating_words: Vec<String>,
    pub future_a: Vec<Vec<Symbol>>,
    pub future_b: Vec<Vec<Symbol>>,
}

pub fn clone_inference_report(trace: &Trace) -> Result<CloneInferenceReport> {
    let w = fsm::witness_moore(trace)?;
    let render = |m: &fsm::Machine| -> Result<Vec<Vec<Symbol>>> {
        Ok(w.separating
            .outcome(m)?
            .into_iter()
            .map(|run| run.into_iter().map(|o| m.outputs().symbol(o).clone()).collect())
            .collect())
    };
    Ok(CloneInferenceReport {
        record: trace.output_symbols(),
        record_identical: fsm::consistent(&w.machine_a, trace)?
            && fsm::consistent(&w.machine_b, trace)?,
        distinguishable: !fsm::equivalent(&w.machine_a, &w.machine_b)?,
        separating_words: w
            .separating
            .words()
            .iter()
            .map(|word| w.machine_a.inputs().render_word(word))
            .collect(),
        future_a: render(&w.machine_a)?,
        future_b: render(&w.machine_b)?,
        machine_a: MachineDoc::from(&w.machine_a),
        machine_b: MachineDoc::from(&w.machine_b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::Alphabet;
    use crate::quantum::random::random_unitary_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn with_angles(state: DensityOperator, [a, a_prime, b, b_prime]: [f64; 4]) -> ChshSetting {
        ChshSetting { a, a_prime, b, b_prime, state }
    }

    #[test]
    fn singlet_reaches_tsirelson() {
        let s = chsh_value(&ChshSetting::tsirelson()).unwrap();
        assert!((s + 2.0 * SQRT_2).abs() < 1e-9, "{s}");
    }

    #[test]
    fn singlet_zero_angles() {
        let s = chsh_value(&with_angles(StateVector::singlet().projector(), [0.0; 4])).unwrap();
        assert!((s + 2.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_value() {
        let zz = StateVector::basis(4, 0).projector();
        let s = chsh_value(&with_angles(zz, [0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4])).unwrap();
        assert!((s - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn chsh_rejects_wrong_dimension_and_bad_angles() {
        let r = chsh_value(&with_angles(DensityOperator::maximally_mixed(2), [0.0; 4]));
        assert_eq!(r, Err(NogoError::NotTwoQubit(2)));
        let r = chsh_value(&with_angles(
            DensityOperator::maximally_mixed(4),
            [f64::NAN, 0.0, 0.0, 0.0],
        ));
        assert_eq!(r, Err(NogoError::NonFiniteAngle("a")));
    }

    #[test]
    fn correlators_match_closed_forms() {
        let singlet = StateVector::singlet().projector();
        let zz = StateVector::basis(4, 0).projector();
        for i in 0..10 {
            for j in 0..10 {
                let (x, y) = (i as f64 * PI / 5.0, j as f64 * PI / 5.0 - 1.0);
                assert!((correlator(&singlet, x, y).unwrap() + (x - y).cos()).abs() < 1e-9);
                assert!((correlator(&zz, x, y).unwrap() - x.cos() * y.cos()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn tsirelson_respected_on_grid() {
        let singlet = StateVector::singlet().projector();
        let steps = 12;
        let grid: Vec<f64> = (0..steps).map(|k| k as f64 * 2.0 * PI / steps as f64).collect();
        let mut best: f64 = 0.0;
        for &a in &grid {
            for &ap in &grid {
                for &b in &grid {
                    for &bp in &grid {
                        let s = chsh_value(&with_angles(singlet.clone(), [a, ap, b, bp])).unwrap();
                        best = best.max(s.abs());
                    }
                }
            }
        }
        assert!(best <= 2.0 * SQRT_2 + 1e-9);
        assert!(best > 2.0);
    }

    #[test]
    fn lhv_bound_is_two() {
        let bound = lhv_chsh_bound();
        assert_eq!(bound.table.len(), 16);
        assert_eq!(bound.max_abs, 2);
        assert_eq!(bound.max, 2);
        assert_eq!(bound.min, -2);
        assert_eq!(bound.achieving_max, 8);
    }

    #[test]
    fn sampled_chsh_is_seeded_and_close() {
        let setting = ChshSetting::tsirelson();
        let a = chsh_sampled(&setting, 20_000, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = chsh_sampled(&setting, 20_000, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!((a + 2.0 * SQRT_2).abs() < 0.1, "{a}");
    }

    #[test]
    fn peres_mermin_square() {
        let r = kochen_specker_check();
        assert_eq!(r.row_products.map(|p| p.sign), [1, 1, 1]);
        assert_eq!(r.column_products.map(|p| p.sign), [1, 1, -1]);
        assert!(r.max_product_deviation() < 1e-12);
        assert!(r.max_commutator < 1e-12);
        assert!(r.max_observable_deviation < 1e-12);
        assert_eq!(r.assignments_checked, 512);
        assert_eq!(r.satisfying_assignments, 0);
    }

    #[test]
    fn cloning_gap_examples() {
        let zero = StateVector::basis(2, 0);
        let one = StateVector::basis(2, 1);
        assert_eq!(no_cloning_gap(&zero, &one).unwrap(), 0.0);
        assert_eq!(no_cloning_gap(&zero, &zero).unwrap(), 0.0);
        let phi = StateVector::from_real(&[0.6, 0.8]).unwrap();
        assert!((no_cloning_gap(&zero, &phi).unwrap() - 0.24).abs() < 1e-15);
        assert!(no_cloning_gap(&zero, &StateVector::basis(3, 0)).is_err());
    }

    #[test]
    fn cloning_gap_positive_for_generic_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let a = random_unitary_state(2, &mut rng);
            let b = random_unitary_state(2, &mut rng);
            assert!(no_cloning_gap(&a, &b).unwrap() > 0.0);
        }
    }

    #[test]
    fn clone_inference_on_binary_record() {
        let outs: Vec<Symbol> = vec![0.into(), 1.into()];
        let t = Trace::autonomous(Alphabet::of(&["0", "1"]), &outs).unwrap();
        let r = clone_inference_report(&t).unwrap();
        assert!(r.record_identical && r.distinguishable);
        assert_eq!(r.separating_words, vec!["aa".to_string()]);
        assert_eq!(r.future_a[0], vec![Symbol::from(0), 1.into(), 1.into()]);
        assert_eq!(r.future_b[0], vec![Symbol::from(0), 1.into(), 0.into()]);
    }

    #[test]
    fn clone_inference_constant_vs_delayed() {
        let outs: Vec<Symbol> = vec![3.into(), 3.into(), 3.into()];
        let t = Trace::autonomous(Alphabet::of(&["3", "7"]), &outs).unwrap();
        let r = clone_inference_report(&t).unwrap();
        assert_eq!(r.machine_a.states, 1);
        assert_eq!(r.machine_b.states, 4);
        assert_eq!(r.separating_words, vec!["aaa".to_string()]);
    }

    #[test]
    fn clone_inference_degenerate() {
        let t = Trace::autonomous(Alphabet::of(&["0"]), &[0.into()]).unwrap();
        assert!(matches!(
            clone_inference_report(&t),
            Err(NogoError::Fsm(FsmError::DegenerateOutputAlphabet(_)))
        ));
    }
}
