use nalgebra::{Complex, DMatrix, DVector, Schur};
use serde::{Deserialize, Serialize};

use super::{Frequency, LtiError};

pub(crate) type C64 = Complex<f64>;

/// Eigenvalue real parts must lie below this to count as stable.
const HURWITZ_TOL: f64 = 1e-9;
/// `|jw - lambda|` below this makes the resolvent singular.
const RESOLVENT_TOL: f64 = 1e-12;

/// `A` is kept diagonal when the realization allows it: generated subsystems
/// realize every transfer entry as its own first-order state, so their state
/// counts grow with the product of channel counts.
#[derive(Clone, Debug, PartialEq)]
pub enum StateMatrix {
    Dense(DMatrix<f64>),
    Diagonal(DVector<f64>),
}

impl StateMatrix {
    pub fn order(&self) -> usize {
        match self {
            StateMatrix::Dense(a) => a.nrows(),
            StateMatrix::Diagonal(d) => d.len(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            StateMatrix::Dense(a) => a.clone(),
            StateMatrix::Diagonal(d) => DMatrix::from_diagonal(d),
        }
    }

    pub fn is_hurwitz(&self) -> bool {
        match self {
            StateMatrix::Dense(a) => is_hurwitz(a),
            StateMatrix::Diagonal(d) => d.iter().all(|&x| x < -HURWITZ_TOL),
        }
    }
}

/// `G(s) = C (sI - A)^{-1} B + D`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "wire::System", into = "wire::System")]
pub struct StateSpaceSystem {
    a: StateMatrix,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
}

/// Value of a transfer matrix at one frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyResponse {
    pub frequency: Frequency,
    pub value: DMatrix<C64>,
}

impl StateSpaceSystem {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
    ) -> Result<Self, LtiError> {
        if !a.is_square() {
            return Err(LtiError::DimensionMismatch(format!(
                "A is {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        Self::checked(StateMatrix::Dense(a), b, c, d)
    }

    pub fn with_diagonal(
        a: DVector<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
    ) -> Result<Self, LtiError> {
        Self::checked(StateMatrix::Diagonal(a), b, c, d)
    }

    pub fn static_gain(d: DMatrix<f64>) -> Self {
        let (p, m) = d.shape();
        Self {
            a: StateMatrix::Diagonal(DVector::zeros(0)),
            b: DMatrix::zeros(0, m),
            c: DMatrix::zeros(p, 0),
            d,
        }
    }

    fn checked(
        a: StateMatrix,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
    ) -> Result<Self, LtiError> {
        let n = a.order();
        if b.nrows() != n || c.ncols() != n || c.nrows() != d.nrows() || b.ncols() != d.ncols() {
            return Err(LtiError::DimensionMismatch(format!(
                "A {n}x{n}, B {}x{}, C {}x{}, D {}x{}",
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols(),
                d.nrows(),
                d.ncols()
            )));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn states(&self) -> usize {
        self.a.order()
    }

    pub fn inputs(&self) -> usize {
        self.d.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.d.nrows()
    }

    pub fn a(&self) -> &StateMatrix {
        &self.a
    }

    pub fn a_dense(&self) -> DMatrix<f64> {
        self.a.to_dense()
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn is_stable(&self) -> bool {
        self.a.is_hurwitz()
    }

    /// The system `alpha * G`, obtained by scaling `C` and `D`.
    pub fn scale_output(&self, alpha: f64) -> Self {
        Self {
            a: self.a.clone(),
            b: self.b.clone(),
            c: &self.c * alpha,
            d: &self.d * alpha,
        }
    }

    pub fn freq_response(&self, w: Frequency) -> Result<FrequencyResponse, LtiError> {
        Ok(FrequencyResponse {
            frequency: w,
            value: self.response(w)?,
        })
    }

    /// `G(jw)` as a bare matrix.
    pub fn response(&self, w: Frequency) -> Result<DMatrix<C64>, LtiError> {
        let mut g = self.d.map(|x| C64::new(x, 0.0));
        let omega = match w {
            Frequency::Infinity => return Ok(g),
            Frequency::Finite(omega) => omega,
        };
        let s = C64::new(0.0, omega);
        match &self.a {
            StateMatrix::Diagonal(diag) => {
                for (k, &ak) in diag.iter().enumerate() {
                    let den = s - ak;
                    if den.norm() < RESOLVENT_TOL {
                        return Err(LtiError::SingularResolvent { omega });
                    }
                    let r = den.inv();
                    for j in 0..self.b.ncols() {
                        let bkj = self.b[(k, j)];
                        if bkj == 0.0 {
                            continue;
                        }
                        let rb = r * bkj;
                        for i in 0..self.c.nrows() {
                            let cik = self.c[(i, k)];
                            if cik != 0.0 {
                                g[(i, j)] += rb * cik;
                            }
                        }
                    }
                }
            }
            StateMatrix::Dense(a) => {
                let n = a.nrows();
                if n == 0 {
                    return Ok(g);
                }
                let m = DMatrix::from_fn(n, n, |i, j| {
                    let diag = if i == j { s } else { C64::new(0.0, 0.0) };
                    diag - a[(i, j)]
                });
                let scale = 1.0 + m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
                let lu = m.lu();
                let u = lu.u();
                if (0..n).any(|i| u[(i, i)].norm() < RESOLVENT_TOL * scale) {
                    return Err(LtiError::SingularResolvent { omega });
                }
                let b = self.b.map(|x| C64::new(x, 0.0));
                let x = lu.solve(&b).ok_or(LtiError::SingularResolvent { omega })?;
                let c = self.c.map(|x| C64::new(x, 0.0));
                g += c * x;
            }
        }
        Ok(g)
    }
}

/// True iff every eigenvalue of `a` has real part below `-1e-9`.
///
/// Eigenvalues come from a real Schur form with a bounded iteration count. If
/// the QR sweep does not converge, the transpose is tried; failing that the
/// answer is `false`, the conservative choice for a stability check.
pub fn is_hurwitz(a: &DMatrix<f64>) -> bool {
    assert!(a.is_square(), "is_hurwitz needs a square matrix");
    if a.nrows() == 0 {
        return true;
    }
    if a.iter().any(|x| !x.is_finite()) {
        return false;
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 10_000)
        .or_else(|| Schur::try_new(a.transpose(), f64::EPSILON, 10_000));
    match schur {
        Some(s) => s.complex_eigenvalues().iter().all(|z| z.re < -HURWITZ_TOL),
        None => false,
    }
}

/// `diag(G_1, ..., G_k)` with stacked states, inputs and outputs.
pub fn block_diag(systems: &[StateSpaceSystem]) -> Result<StateSpaceSystem, LtiError> {
    if systems.is_empty() {
        return Err(LtiError::Empty);
    }
    let n: usize = systems.iter().map(|s| s.states()).sum();
    let m: usize = systems.iter().map(|s| s.inputs()).sum();
    let p: usize = systems.iter().map(|s| s.outputs()).sum();
    let all_diag = systems
        .iter()
        .all(|s| matches!(s.a, StateMatrix::Diagonal(_)));

    let mut b = DMatrix::zeros(n, m);
    let mut c = DMatrix::zeros(p, n);
    let mut d = DMatrix::zeros(p, m);
    let mut a_dense = if all_diag {
        None
    } else {
        Some(DMatrix::zeros(n, n))
    };
    let mut a_diag = DVector::zeros(if all_diag { n } else { 0 });
    let (mut on, mut om, mut op) = (0, 0, 0);
    for s in systems {
        let (sn, sm, sp) = (s.states(), s.inputs(), s.outputs());
        match (&mut a_dense, &s.a) {
            (Some(ad), sa) => ad.view_mut((on, on), (sn, sn)).copy_from(&sa.to_dense()),
            (None, StateMatrix::Diagonal(v)) => a_diag.rows_mut(on, sn).copy_from(v),
            (None, StateMatrix::Dense(_)) => unreachable!(),
        }
        b.view_mut((on, om), (sn, sm)).copy_from(&s.b);
        c.view_mut((op, on), (sp, sn)).copy_from(&s.c);
        d.view_mut((op, om), (sp, sm)).copy_from(&s.d);
        on += sn;
        om += sm;
        op += sp;
    }
    let a = match a_dense {
        Some(ad) => StateMatrix::Dense(ad),
        None => StateMatrix::Diagonal(a_diag),
    };
    StateSpaceSystem::checked(a, b, c, d)
}

mod wire {
    use nalgebra::{DMatrix, DVector};
    use serde::{Deserialize, Serialize};

    use super::{StateMatrix, StateSpaceSystem};
    use crate::lti::LtiError;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub enum A {
        Diagonal { diagonal: Vec<f64> },
        Dense(Vec<Vec<f64>>),
    }

    /// Matrices are row-major nested arrays; dimensions are explicit so that
    /// empty matrices keep their shape.
    #[derive(Serialize, Deserialize)]
    pub struct System {
        pub states: usize,
        pub inputs: usize,
        pub outputs: usize,
        pub a: A,
        pub b: Vec<Vec<f64>>,
        pub c: Vec<Vec<f64>>,
        pub d: Vec<Vec<f64>>,
    }

    fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    fn matrix(name: &str, r: usize, c: usize, v: &[Vec<f64>]) -> Result<DMatrix<f64>, LtiError> {
        if v.len() != r || v.iter().any(|row| row.len() != c) {
            return Err(LtiError::DimensionMismatch(format!(
                "{name} should be {r}x{c}"
            )));
        }
        Ok(DMatrix::from_fn(r, c, |i, j| v[i][j]))
    }

    impl From<StateSpaceSystem> for System {
        fn from(s: StateSpaceSystem) -> Self {
            System {
                states: s.states(),
                inputs: s.inputs(),
                outputs: s.outputs(),
                a: match &s.a {
                    StateMatrix::Dense(a) => A::Dense(rows(a)),
                    StateMatrix::Diagonal(d) => A::Diagonal {
                        diagonal: d.iter().copied().collect(),
                    },
                },
                b: rows(&s.b),
                c: rows(&s.c),
                d: rows(&s.d),
            }
        }
    }

    impl TryFrom<System> for StateSpaceSystem {
        type Error = LtiError;

        fn try_from(w: System) -> Result<Self, LtiError> {
            let (n, m, p) = (w.states, w.inputs, w.outputs);
            let a = match w.a {
                A::Dense(rows) => StateMatrix::Dense(matrix("A", n, n, &rows)?),
                A::Diagonal { diagonal } => {
                    if diagonal.len() != n {
                        return Err(LtiError::DimensionMismatch(format!(
                            "A diagonal should have {n} entries"
                        )));
                    }
                    StateMatrix::Diagonal(DVector::from_vec(diagonal))
                }
            };
            StateSpaceSystem::checked(
                a,
                matrix("B", n, m, &w.b)?,
                matrix("C", p, n, &w.c)?,
                matrix("D", p, m, &w.d)?,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_order() -> StateSpaceSystem {
        StateSpaceSystem::new(
            DMatrix::from_element(1, 1, -1.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::zeros(1, 1),
        )
        .unwrap()
    }

    fn scalar(g: &DMatrix<C64>) -> C64 {
        assert_eq!(g.shape(), (1, 1));
        g[(0, 0)]
    }

    #[test]
    fn first_order_lowpass_values() {
        let s = first_order();
        let at = |w| scalar(&s.response(w).unwrap());
        assert!((at(Frequency::Finite(0.0)) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(at(Frequency::Infinity), C64::new(0.0, 0.0));
        assert!((at(Frequency::Finite(1.0)) - C64::new(0.5, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_and_dense_realizations_agree() {
        let a = DVector::from_vec(vec![-1.0, -3.0, -0.5]);
        let b = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 2.0, 1.0, -1.0]);
        let c = DMatrix::from_row_slice(2, 3, &[0.5, 1.0, 0.0, 0.0, -2.0, 1.5]);
        let d = DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, -0.2]);
        let sd =
            StateSpaceSystem::with_diagonal(a.clone(), b.clone(), c.clone(), d.clone()).unwrap();
        let sf = StateSpaceSystem::new(DMatrix::from_diagonal(&a), b, c, d).unwrap();
        for w in [0.0, 0.3, 1.0, 7.0] {
            let diff = sd.response(Frequency::Finite(w)).unwrap()
                - sf.response(Frequency::Finite(w)).unwrap();
            assert!(diff.norm() < 1e-13);
        }
    }

    #[test]
    fn pole_on_axis_is_singular() {
        let s = StateSpaceSystem::new(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
            DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            DMatrix::zeros(1, 1),
        )
        .unwrap();
        assert!(matches!(
            s.response(Frequency::Finite(1.0)),
            Err(LtiError::SingularResolvent { .. })
        ));
        let integ = StateSpaceSystem::with_diagonal(
            DVector::from_element(1, 0.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::zeros(1, 1),
        )
        .unwrap();
        assert!(integ.response(Frequency::Finite(0.0)).is_err());
    }

    #[test]
    fn hurwitz_examples() {
        assert!(is_hurwitz(&DMatrix::from_row_slice(
            2,
            2,
            &[-1.0, 0.0, 0.0, -2.0]
        )));
        assert!(!is_hurwitz(&DMatrix::from_row_slice(
            2,
            2,
            &[0.0, 1.0, -1.0, 0.0]
        )));
        // Companion form of s^2 + 3s + 2 = (s + 1)(s + 2).
        assert!(is_hurwitz(&DMatrix::from_row_slice(
            2,
            2,
            &[0.0, 1.0, -2.0, -3.0]
        )));
        assert!(!is_hurwitz(&DMatrix::from_row_slice(1, 1, &[1e-12])));
        assert!(is_hurwitz(&DMatrix::zeros(0, 0)));
    }

    #[test]
    fn block_diag_of_static_gains() {
        let g = block_diag(&[
            StateSpaceSystem::static_gain(DMatrix::from_element(1, 1, 2.0)),
            StateSpaceSystem::static_gain(DMatrix::from_element(1, 1, 3.0)),
        ])
        .unwrap();
        assert_eq!(g.states(), 0);
        assert_eq!(g.d(), &DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]));
        assert_eq!(block_diag(&[first_order()]).unwrap(), first_order());
        assert!(block_diag(&[]).is_err());
    }

    #[test]
    fn rejects_inconsistent_dimensions() {
        assert!(StateSpaceSystem::new(
            DMatrix::zeros(2, 2),
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 2),
            DMatrix::zeros(1, 1)
        )
        .is_err());
        assert!(StateSpaceSystem::new(
            DMatrix::zeros(2, 3),
            DMatrix::zeros(2, 1),
            DMatrix::zeros(1, 2),
            DMatrix::zeros(1, 1)
        )
        .is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = block_diag(&[
            first_order(),
            StateSpaceSystem::static_gain(DMatrix::from_element(1, 2, 0.5)),
        ])
        .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<StateSpaceSystem>(&text).unwrap(), s);
        let diag = StateSpaceSystem::with_diagonal(
            DVector::from_vec(vec![-1.0, -2.0]),
            DMatrix::from_element(2, 1, 1.0),
            DMatrix::from_element(1, 2, 1.0),
            DMatrix::zeros(1, 1),
        )
        .unwrap();
        let text = serde_json::to_string(&diag).unwrap();
        assert!(text.contains("diagonal"));
        assert_eq!(
            serde_json::from_str::<StateSpaceSystem>(&text).unwrap(),
            diag
        );
        let bad = r#"{"states":1,"inputs":1,"outputs":1,"a":[[1.0]],"b":[[1.0]],"c":[[1.0,2.0]],"d":[[0.0]]}"#;
        assert!(serde_json::from_str::<StateSpaceSystem>(bad).is_err());
    }
}
