/// A vector-valued field `y ↦ (u_1(y), …, u_m(y))` on a subset of ℝ^N.
///
/// Implementations must be pure: the same point always yields the same values.
pub trait Field {
    /// Ambient dimension `N`.
    fn dim(&self) -> usize;
    /// Number of components `m`.
    fn components(&self) -> usize;
    fn eval(&self, y: &[f64]) -> Vec<f64>;

    /// Single component, defaulting to a full evaluation.
    fn eval_component(&self, y: &[f64], i: usize) -> f64 {
        self.eval(y)[i]
    }
}

impl<F: Field + ?Sized> Field for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn components(&self) -> usize {
        (**self).components()
    }
    fn eval(&self, y: &[f64]) -> Vec<f64> {
        (**self).eval(y)
    }
    fn eval_component(&self, y: &[f64], i: usize) -> f64 {
        (**self).eval_component(y, i)
    }
}

/// Adapts a closure into a [`Field`].
pub struct FnField<F> {
    dim: usize,
    components: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> Vec<f64>> FnField<F> {
    pub fn new(dim: usize, components: usize, f: F) -> Self {
        Self { dim, components, f }
    }
}

impl<F: Fn(&[f64]) -> Vec<f64>> Field for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn components(&self) -> usize {
        self.components
    }
    fn eval(&self, y: &[f64]) -> Vec<f64> {
        (self.f)(y)
    }
}
