//! Phrases: expression trees in a vector variable `z = (z_0, .., z_{n-1})`.
//!
//! Products are ordered; `Mul(u, v)` is `u * v` and never reassociated.

use crate::algebra::CdElement;
use crate::error::{Error, Result};
use crate::linear::CdVector;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum Phrase<T> {
    /// Coordinate `z_k`.
    Var(usize),
    Const(CdElement<T>),
    Neg(Box<Phrase<T>>),
    Add(Box<Phrase<T>>, Box<Phrase<T>>),
    /// Ordered product `left * right`.
    Mul(Box<Phrase<T>>, Box<Phrase<T>>),
    Conj(Box<Phrase<T>>),
    Inv(Box<Phrase<T>>),
}

#[allow(clippy::should_implement_trait)]
impl<T: Scalar> Phrase<T> {
    pub fn var(k: usize) -> Self {
        Phrase::Var(k)
    }

    pub fn constant(c: CdElement<T>) -> Self {
        Phrase::Const(c)
    }

    pub fn real(level: u32, x: T) -> Self {
        Phrase::Const(CdElement::real(level, x))
    }

    pub fn neg(p: Self) -> Self {
        Phrase::Neg(Box::new(p))
    }

    pub fn add(a: Self, b: Self) -> Self {
        Phrase::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Self, b: Self) -> Self {
        Self::add(a, Self::neg(b))
    }

    pub fn mul(a: Self, b: Self) -> Self {
        Phrase::Mul(Box::new(a), Box::new(b))
    }

    pub fn conj(p: Self) -> Self {
        Phrase::Conj(Box::new(p))
    }

    pub fn inv(p: Self) -> Self {
        Phrase::Inv(Box::new(p))
    }

    /// Left-folded sum; `None` for an empty iterator.
    pub fn sum(terms: impl IntoIterator<Item = Self>) -> Option<Self> {
        terms.into_iter().reduce(Self::add)
    }

    /// `sum_j z_j* z_j`, the squared norm of a block of coordinates.
    pub fn norm_sqr_of(vars: impl IntoIterator<Item = usize>) -> Option<Self> {
        Self::sum(vars.into_iter().map(|j| Self::mul(Self::conj(Self::var(j)), Self::var(j))))
    }

    pub fn children(&self) -> Vec<&Self> {
        match self {
            Phrase::Var(_) | Phrase::Const(_) => vec![],
            Phrase::Neg(p) | Phrase::Conj(p) | Phrase::Inv(p) => vec![p],
            Phrase::Add(a, b) | Phrase::Mul(a, b) => vec![a, b],
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Phrase::Var(k) => Some(*k),
            _ => self.children().iter().filter_map(|c| c.max_var()).max(),
        }
    }

    /// Every variable below `input_dim`, every constant at `level`.
    pub fn validate(&self, input_dim: usize, level: u32) -> Result<()> {
        match self {
            Phrase::Var(k) if *k >= input_dim => Err(Error::IndexOutOfRange { index: *k, dim: input_dim }),
            Phrase::Const(c) if c.level() != level => Err(Error::LevelMismatch { left: level, right: c.level() }),
            _ => self.children().iter().try_for_each(|c| c.validate(input_dim, level)),
        }
    }

    pub fn eval(&self, z: &CdVector<T>) -> Result<CdElement<T>> {
        let mut path = Vec::new();
        self.eval_at(z, &mut path)
    }

    fn eval_at(&self, z: &CdVector<T>, path: &mut Vec<usize>) -> Result<CdElement<T>> {
        let child = |p: &Self, idx: usize, path: &mut Vec<usize>| {
            path.push(idx);
            let v = p.eval_at(z, path);
            path.pop();
            v
        };
        Ok(match self {
            Phrase::Var(k) => z
                .components()
                .get(*k)
                .cloned()
                .ok_or(Error::IndexOutOfRange { index: *k, dim: z.len() })?,
            Phrase::Const(c) => {
                if c.level() != z.level() {
                    return Err(Error::LevelMismatch { left: z.level(), right: c.level() });
                }
                c.clone()
            }
            Phrase::Neg(p) => -&child(p, 0, path)?,
            Phrase::Add(a, b) => child(a, 0, path)?.try_add(&child(b, 1, path)?)?,
            Phrase::Mul(a, b) => child(a, 0, path)?.try_mul(&child(b, 1, path)?)?,
            Phrase::Conj(p) => child(p, 0, path)?.conj(),
            Phrase::Inv(p) => child(p, 0, path)?.inverse().map_err(|_| Error::PhraseDomain {
                path: if path.is_empty() {
                    "root".into()
                } else {
                    path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("/")
                },
            })?,
        })
    }

    /// Replace each `Var(k)` by `values[k]`.
    pub fn substitute(&self, values: &[Self]) -> Result<Self> {
        let sub = |p: &Self| p.substitute(values).map(Box::new);
        Ok(match self {
            Phrase::Var(k) => values
                .get(*k)
                .cloned()
                .ok_or(Error::IndexOutOfRange { index: *k, dim: values.len() })?,
            Phrase::Const(c) => Phrase::Const(c.clone()),
            Phrase::Neg(p) => Phrase::Neg(sub(p)?),
            Phrase::Add(a, b) => Phrase::Add(sub(a)?, sub(b)?),
            Phrase::Mul(a, b) => Phrase::Mul(sub(a)?, sub(b)?),
            Phrase::Conj(p) => Phrase::Conj(sub(p)?),
            Phrase::Inv(p) => Phrase::Inv(sub(p)?),
        })
    }

    /// Replace every conjugation node by its generator-sum form
    /// `-(2^r - 2)^(-1) sum_p (i_p u) i_p`, leaving a phrase built from
    /// variables, constants, sums, products and inverses only.
    ///
    /// Needs a field scalar for the `(2^r - 2)^(-1)` constant.
    pub fn expand_conjugations(&self, level: u32) -> Result<Self> {
        if level < 2 && self.has_conj() {
            return Err(Error::ConjFormulaDomain(level));
        }
        Ok(self.expand_conj_unchecked(level))
    }

    fn has_conj(&self) -> bool {
        matches!(self, Phrase::Conj(_)) || self.children().iter().any(|c| c.has_conj())
    }

    fn expand_conj_unchecked(&self, level: u32) -> Self {
        let rec = |p: &Self| Box::new(p.expand_conj_unchecked(level));
        match self {
            Phrase::Var(_) | Phrase::Const(_) => self.clone(),
            Phrase::Neg(p) => Phrase::Neg(rec(p)),
            Phrase::Inv(p) => Phrase::Inv(rec(p)),
            Phrase::Add(a, b) => Phrase::Add(rec(a), rec(b)),
            Phrase::Mul(a, b) => Phrase::Mul(rec(a), rec(b)),
            Phrase::Conj(p) => {
                let inner = p.expand_conj_unchecked(level);
                let dim = 1usize << level;
                let terms = (0..dim).map(|q| {
                    let ip = Self::constant(CdElement::generator(level, q));
                    Self::mul(Self::mul(ip.clone(), inner.clone()), ip)
                });
                let sum = Self::sum(terms).expect("dim >= 1");
                let k = Self::inv(Self::real(level, T::from_count(dim - 2)));
                Self::neg(Self::mul(k, sum))
            }
        }
    }
}

/// `p` components sharing an input dimension and level.
#[derive(Clone, Debug, PartialEq)]
pub struct PhraseMap<T> {
    input_dim: usize,
    level: u32,
    components: Vec<Phrase<T>>,
}

impl<T: Scalar> PhraseMap<T> {
    pub fn new(input_dim: usize, level: u32, components: Vec<Phrase<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::ShapeMismatch("phrase map needs at least one component".into()));
        }
        for c in &components {
            c.validate(input_dim, level)?;
        }
        Ok(Self { input_dim, level, components })
    }

    /// `z -> z` on `A_r^n`.
    pub fn identity(input_dim: usize, level: u32) -> Self {
        Self { input_dim, level, components: (0..input_dim).map(Phrase::Var).collect() }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn components(&self) -> &[Phrase<T>] {
        &self.components
    }

    pub fn eval(&self, z: &CdVector<T>) -> Result<CdVector<T>> {
        if z.len() != self.input_dim || z.level() != self.level {
            return Err(Error::ShapeMismatch(format!(
                "map takes A_{}^{}, got A_{}^{}",
                self.level,
                self.input_dim,
                z.level(),
                z.len()
            )));
        }
        CdVector::new(self.components.iter().map(|p| p.eval(z)).collect::<Result<_>>()?)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.output_dim() != self.input_dim || inner.level != self.level {
            return Err(Error::ShapeMismatch(format!(
                "cannot feed A_{}^{} into a map on A_{}^{}",
                inner.level,
                inner.output_dim(),
                self.level,
                self.input_dim
            )));
        }
        let components = self.components.iter().map(|p| p.substitute(&inner.components)).collect::<Result<_>>()?;
        Self::new(inner.input_dim, self.level, components)
    }

    pub fn expand_conjugations(&self) -> Result<Self> {
        Ok(Self {
            input_dim: self.input_dim,
            level: self.level,
            components: self.components.iter().map(|p| p.expand_conjugations(self.level)).collect::<Result<_>>()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_vector, rng_for};

    type P = Phrase<f64>;
    type E = CdElement<f64>;

    fn at(coords: Vec<E>) -> CdVector<f64> {
        CdVector::new(coords).unwrap()
    }

    #[test]
    fn constant_ignores_input() {
        let c = E::new(2, [1.0, 2.0, 3.0, 4.0]).unwrap();
        let z = at(vec![E::generator(2, 1)]);
        assert_eq!(P::constant(c.clone()).eval(&z).unwrap(), c);
    }

    #[test]
    fn square_of_i1() {
        let p = P::mul(P::var(0), P::var(0));
        let z = at(vec![E::generator(2, 1)]);
        assert_eq!(p.eval(&z).unwrap(), E::real(2, -1.0));
    }

    #[test]
    fn conj_node_and_expansion_agree() {
        let mut rng = rng_for(11, &[]);
        for level in [2, 3] {
            let z = random_vector(level, 1, &mut rng);
            let p = P::conj(P::var(0));
            let direct = p.eval(&z).unwrap();
            assert_eq!(direct, z.component(0).conj());
            let expanded = p.expand_conjugations(level).unwrap();
            assert!(!expanded.has_conj());
            assert!(expanded.eval(&z).unwrap().distance(&direct) < 1e-12);
        }
    }

    #[test]
    fn expansion_rejected_below_quaternions() {
        assert_eq!(P::conj(P::var(0)).expand_conjugations(1), Err(Error::ConjFormulaDomain(1)));
        assert!(P::var(0).expand_conjugations(1).is_ok());
    }

    #[test]
    fn inverse_of_zero_reports_node() {
        let p = P::add(P::var(0), P::inv(P::sub(P::var(0), P::var(0))));
        let z = at(vec![E::one(2)]);
        assert_eq!(p.eval(&z), Err(Error::PhraseDomain { path: "1".into() }));
        let q = P::inv(P::var(0));
        assert_eq!(q.eval(&at(vec![E::zero(2)])), Err(Error::PhraseDomain { path: "root".into() }));
    }

    #[test]
    fn validation() {
        assert!(P::var(2).validate(2, 2).is_err());
        assert!(P::real(3, 1.0).validate(1, 2).is_err());
        assert!(PhraseMap::new(1, 2, vec![P::var(1)]).is_err());
        let m = PhraseMap::<f64>::identity(3, 2);
        assert_eq!(m.output_dim(), 3);
        assert!(m.eval(&CdVector::zeros(2, 2)).is_err());
    }

    #[test]
    fn composition_matches_nested_evaluation() {
        let mut rng = crate::sampling::rng_for(21, &[]);
        let outer = PhraseMap::new(
            2,
            2,
            vec![
                Phrase::mul(Phrase::var(0), Phrase::conj(Phrase::var(1))),
                Phrase::inv(Phrase::add(Phrase::var(1), Phrase::real(2, 3.0))),
            ],
        )
        .unwrap();
        let inner = PhraseMap::new(
            1,
            2,
            vec![Phrase::mul(Phrase::var(0), Phrase::var(0)), Phrase::neg(Phrase::var(0))],
        )
        .unwrap();
        let composed = outer.compose(&inner).unwrap();
        assert_eq!(composed.input_dim(), 1);
        let z = crate::sampling::random_vector(2, 1, &mut rng);
        let nested = outer.eval(&inner.eval(&z).unwrap()).unwrap();
        assert!(composed.eval(&z).unwrap().distance(&nested) < 1e-12);
        assert!(inner.compose(&outer).is_err());
    }
}
