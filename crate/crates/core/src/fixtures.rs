//! Reference systems used by the examples, the CLI tests and the acceptance suite.

use crate::bubble::BubbleParams;
use crate::error::Result;
use crate::exponent_system::EllipticSystemSpec;

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub spec: EllipticSystemSpec,
    pub sigma: f64,
}

impl Fixture {
    pub fn params(&self) -> Result<BubbleParams> {
        BubbleParams::from_spec(&self.spec, self.sigma, None)
    }
}

/// `N = 3`, `m = 1`, `A = [[5]]`, `B = [[3]]`, `c = 0`: the center sits on the boundary.
pub fn scalar_neumann() -> Fixture {
    Fixture {
        name: "n3-m1-c0",
        spec: EllipticSystemSpec::new(3, vec![vec![5.0]], vec![vec![3.0]], vec![0.0]),
        sigma: 1.0,
    }
}

/// `N = 3`, `m = 1`, `c = −1`: center at height `−√3` for `σ = 1`.
pub fn scalar_negative() -> Fixture {
    Fixture {
        name: "n3-m1-cneg",
        spec: EllipticSystemSpec::new(3, vec![vec![5.0]], vec![vec![3.0]], vec![-1.0]),
        sigma: 1.0,
    }
}

/// `N = 4`, `m = 2`, symmetric coupling `A = [[1,2],[2,1]]`, `B = [[1,1],[1,1]]`, `c = (−1, −1)`.
pub fn coupled_symmetric() -> Fixture {
    Fixture {
        name: "n4-m2-sym",
        spec: EllipticSystemSpec::new(
            4,
            vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![-1.0, -1.0],
        ),
        sigma: 1.0,
    }
}

/// `N = 4`, `A = [[2,1],[1,2]]`: `I − A` has a one-dimensional kernel.
pub fn coupled_degenerate() -> Fixture {
    Fixture {
        name: "n4-m2-degenerate",
        spec: EllipticSystemSpec::new(
            4,
            vec![vec![2.0, 1.0], vec![1.0, 2.0]],
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![-1.0, -1.0],
        ),
        sigma: 1.0,
    }
}

/// The three fixtures with a unique parameter solution.
pub fn standard() -> Vec<Fixture> {
    vec![scalar_neumann(), scalar_negative(), coupled_symmetric()]
}

pub fn by_name(name: &str) -> Option<Fixture> {
    standard()
        .into_iter()
        .chain(std::iter::once(coupled_degenerate()))
        .find(|f| f.name == name)
}
