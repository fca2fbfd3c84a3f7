//! Structural data of the elliptic system and its admissibility checks.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

/// Default relative tolerance for the row-sum and diagonal checks.
pub const DEFAULT_TOL_ROW: f64 = 1e-9;

/// `(N, m, A, B, c)`: dimension, component count, interior exponents,
/// boundary exponents and boundary coefficients. Matrices are row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticSystemSpec {
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    NegativeInteriorExponent,
    NegativeBoundaryExponent,
    InteriorRowSum,
    BoundaryRowSum,
    BoundaryDiagonal,
    Reducible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub row: Option<usize>,
    pub col: Option<usize>,
    pub measured: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl EllipticSystemSpec {
    pub fn new(n: usize, a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, c: Vec<f64>) -> Self {
        let m = c.len();
        Self { n, m, a, b, c }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s)?;
        spec.check_shape()?;
        Ok(spec)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// `(N+2)/(N−2)`, the required row sum of `A`.
    pub fn interior_row_sum(&self) -> f64 {
        (self.n as f64 + 2.0) / (self.n as f64 - 2.0)
    }

    /// `N/(N−2)`, the required row sum of `B`.
    pub fn boundary_row_sum(&self) -> f64 {
        self.n as f64 / (self.n as f64 - 2.0)
    }

    /// `(N−2)/2`, the decay exponent of the bubbles.
    pub fn half_weight(&self) -> f64 {
        (self.n as f64 - 2.0) / 2.0
    }

    /// Shape and finiteness checks; these are errors, not violations.
    pub fn check_shape(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::MalformedSpec(format!("N must be at least 3, got {}", self.n)));
        }
        if self.m == 0 {
            return Err(Error::MalformedSpec("m must be at least 1".into()));
        }
        let square = |name: &str, mat: &[Vec<f64>]| -> Result<()> {
            if mat.len() != self.m || mat.iter().any(|row| row.len() != self.m) {
                return Err(Error::MalformedSpec(format!("{name} must be {0}x{0}", self.m)));
            }
            if mat.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::MalformedSpec(format!("{name} has non-finite entries")));
            }
            Ok(())
        };
        square("A", &self.a)?;
        square("B", &self.b)?;
        if self.c.len() != self.m {
            return Err(Error::MalformedSpec(format!("c must have length {}", self.m)));
        }
        if self.c.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedSpec("c has non-finite entries".into()));
        }
        Ok(())
    }
}

/// Checks every structural assumption on `(A, B, c)` and lists each violation.
pub fn validate_spec(spec: &EllipticSystemSpec, tol_row: f64) -> Result<ValidationReport> {
    spec.check_shape()?;
    if !(tol_row > 0.0) {
        return Err(Error::InvalidArgument("tol_row must be positive".into()));
    }
    let mut violations = Vec::new();
    let m = spec.m;
    let p = spec.interior_row_sum();
    let q = spec.boundary_row_sum();

    for (rule, mat) in [(Rule::NegativeInteriorExponent, &spec.a), (Rule::NegativeBoundaryExponent, &spec.b)] {
        for i in 0..m {
            for j in 0..m {
                if mat[i][j] < 0.0 {
                    violations.push(Violation {
                        rule,
                        row: Some(i),
                        col: Some(j),
                        measured: mat[i][j],
                        expected: 0.0,
                    });
                }
            }
        }
    }

    for i in 0..m {
        let sa: f64 = spec.a[i].iter().sum();
        if (sa - p).abs() > tol_row * p {
            violations.push(Violation {
                rule: Rule::InteriorRowSum,
                row: Some(i),
                col: None,
                measured: sa,
                expected: p,
            });
        }
        let sb: f64 = spec.b[i].iter().sum();
        if (sb - q).abs() > tol_row * q {
            violations.push(Violation {
                rule: Rule::BoundaryRowSum,
                row: Some(i),
                col: None,
                measured: sb,
                expected: q,
            });
        }
    }

    for i in 0..m {
        if spec.c[i] < 0.0 {
            continue;
        }
        for j in 0..m {
            let expected = if i == j { q } else { 0.0 };
            if (spec.b[i][j] - expected).abs() > tol_row * q {
                violations.push(Violation {
                    rule: Rule::BoundaryDiagonal,
                    row: Some(i),
                    col: Some(j),
                    measured: spec.b[i][j],
                    expected,
                });
            }
        }
    }

    if let Some((i, j)) = reducibility_witness(&spec.a) {
        violations.push(Violation {
            rule: Rule::Reducible,
            row: Some(i),
            col: Some(j),
            measured: spec.a[i][j],
            expected: f64::MIN_POSITIVE,
        });
    }

    Ok(ValidationReport {
        passed: violations.is_empty(),
        violations,
    })
}

/// True iff the positivity digraph of `a` (edge `i → j` iff `a_ij > 0`) is
/// strongly connected. A 1×1 matrix is always irreducible.
pub fn is_irreducible(a: &[Vec<f64>]) -> bool {
    reducibility_witness(a).is_none()
}

fn reachable(a: &[Vec<f64>], start: usize, forward: bool) -> Vec<bool> {
    let m = a.len();
    let mut seen = vec![false; m];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for w in 0..m {
            let edge = if forward { a[v][w] } else { a[w][v] };
            if edge > 0.0 && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// A pair `(i, j)` with `i ∈ I₁`, `j ∈ I₂` for some partition with an
/// all-zero block `a_{I₁ I₂}`, or `None` if the matrix is irreducible.
fn reducibility_witness(a: &[Vec<f64>]) -> Option<(usize, usize)> {
    let m = a.len();
    if m <= 1 {
        return None;
    }
    // A closed set I₁ (no edges leaving it) other than the whole index set.
    let closed = {
        let fwd = reachable(a, 0, true);
        if fwd.iter().all(|&s| s) {
            let bwd = reachable(a, 0, false);
            let v = bwd.iter().position(|&s| !s)?;
            reachable(a, v, true)
        } else {
            fwd
        }
    };
    let i = closed.iter().position(|&s| s)?;
    let j = closed.iter().position(|&s| !s)?;
    Some((i, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Enumerates every nontrivial partition `I₁ ∪ I₂` and looks for a zero block.
    fn brute_force_irreducible(a: &[Vec<f64>]) -> bool {
        let m = a.len();
        if m <= 1 {
            return true;
        }
        for mask in 1u32..(1 << m) - 1 {
            let in_i1 = |k: usize| mask & (1 << k) != 0;
            let zero_block = (0..m)
                .filter(|&i| in_i1(i))
                .all(|i| (0..m).filter(|&j| !in_i1(j)).all(|j| a[i][j] == 0.0));
            if zero_block {
                return false;
            }
        }
        true
    }

    fn spec(n: usize, a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, c: Vec<f64>) -> EllipticSystemSpec {
        EllipticSystemSpec::new(n, a, b, c)
    }

    #[test]
    fn scalar_critical_spec_passes() {
        let s = spec(3, vec![vec![5.0]], vec![vec![3.0]], vec![-1.0]);
        let r = validate_spec(&s, DEFAULT_TOL_ROW).unwrap();
        assert!(r.passed, "{:?}", r.violations);
    }

    #[test]
    fn coupled_spec_with_negative_c_allows_offdiagonal_b() {
        let s = spec(
            4,
            vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![-1.0, -1.0],
        );
        assert!(validate_spec(&s, DEFAULT_TOL_ROW).unwrap().passed);
    }

    #[test]
    fn offdiagonal_b_rejected_for_nonnegative_c() {
        let s = spec(
            4,
            vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![0.0, -1.0],
        );
        let r = validate_spec(&s, DEFAULT_TOL_ROW).unwrap();
        assert!(!r.passed);
        assert!(r.violations.iter().all(|v| v.rule == Rule::BoundaryDiagonal && v.row == Some(0)));
        assert_eq!(r.violations.len(), 2);
    }

    #[test]
    fn block_diagonal_is_reducible() {
        let s = spec(
            4,
            vec![vec![3.0, 0.0], vec![0.0, 3.0]],
            vec![vec![2.0, 0.0], vec![0.0, 2.0]],
            vec![0.0, 0.0],
        );
        let r = validate_spec(&s, DEFAULT_TOL_ROW).unwrap();
        assert!(!r.passed);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].rule, Rule::Reducible);
    }

    #[test]
    fn row_sum_and_sign_violations_are_listed() {
        let s = spec(3, vec![vec![4.0]], vec![vec![-3.0]], vec![-1.0]);
        let r = validate_spec(&s, DEFAULT_TOL_ROW).unwrap();
        let rules: Vec<Rule> = r.violations.iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::NegativeBoundaryExponent));
        assert!(rules.contains(&Rule::InteriorRowSum));
        assert!(rules.contains(&Rule::BoundaryRowSum));
    }

    #[test]
    fn malformed_shapes_are_errors() {
        let s = spec(3, vec![vec![5.0, 0.0]], vec![vec![3.0]], vec![-1.0]);
        assert!(matches!(validate_spec(&s, 1e-9), Err(Error::MalformedSpec(_))));
        let s = spec(2, vec![vec![5.0]], vec![vec![3.0]], vec![-1.0]);
        assert!(matches!(validate_spec(&s, 1e-9), Err(Error::MalformedSpec(_))));
        let s = spec(3, vec![vec![f64::NAN]], vec![vec![3.0]], vec![-1.0]);
        assert!(matches!(validate_spec(&s, 1e-9), Err(Error::MalformedSpec(_))));
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&[vec![0.0, 5.0], vec![5.0, 0.0]]));
        assert!(!is_irreducible(&[vec![3.0, 0.0], vec![0.0, 3.0]]));
        let a = vec![vec![0.0, 1.0, 4.0], vec![5.0, 0.0, 0.0], vec![5.0, 0.0, 0.0]];
        assert!(brute_force_irreducible(&a));
        assert!(is_irreducible(&a));
        assert!(is_irreducible(&[vec![0.0]]));
        // lower-triangular: 1 → 0 but never 0 → 1
        assert!(!is_irreducible(&[vec![1.0, 0.0], vec![1.0, 1.0]]));
    }

    #[test]
    fn json_roundtrip_uses_uppercase_keys() {
        let s = spec(3, vec![vec![5.0]], vec![vec![3.0]], vec![0.0]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"N":3,"m":1,"A":[[5.0]],"B":[[3.0]],"c":[0.0]}"#);
        assert_eq!(EllipticSystemSpec::from_json_str(&text).unwrap(), s);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn sparse_matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
            (1usize..=8).prop_flat_map(|m| proptest::collection::vec(proptest::collection::vec(prop_oneof![3 => Just(0.0), 1 => 0.1f64..5.0], m), m))
        }

        proptest! {
            #[test]
            fn agrees_with_partition_enumeration(a in sparse_matrix()) {
                prop_assert_eq!(is_irreducible(&a), brute_force_irreducible(&a));
            }

            #[test]
            fn validation_is_pure(a in sparse_matrix()) {
                let m = a.len();
                let s = EllipticSystemSpec::new(3, a, vec![vec![1.0; m]; m], vec![-1.0; m]);
                let r1 = validate_spec(&s, 1e-9).unwrap();
                let r2 = validate_spec(&s, 1e-9).unwrap();
                prop_assert_eq!(r1.passed, r1.violations.is_empty());
                prop_assert_eq!(r1, r2);
            }
        }
    }
}
