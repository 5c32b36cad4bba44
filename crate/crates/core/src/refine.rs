//! Equality of `a^b` and `c^d` by iterated gcd extraction.
//!
//! The loop repeatedly picks a pair `(a_i, c_j)` sharing a factor
//! `g = gcd(a_i, c_j) > 1`, divides it out of both, and moves the surplus
//! power `g^|b_i - d_j|` to the side that had the larger exponent. When every
//! remaining pair is coprime the two sides are equal exactly when both lists
//! are empty.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poe::Poe;

/// The four positive-integer lists of an `a^b = c^d` instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourLists {
    pub a: Vec<BigUint>,
    pub b: Vec<BigUint>,
    pub c: Vec<BigUint>,
    pub d: Vec<BigUint>,
}

/// One refinement iteration, as recorded by [`FourLists::step`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefineStep {
    pub i: usize,
    pub j: usize,
    pub gcd: BigUint,
}

impl FourLists {
    /// Entries equal to 1 are dropped (they contribute nothing); zero bases or
    /// exponents are rejected.
    pub fn new(
        a: Vec<BigUint>,
        b: Vec<BigUint>,
        c: Vec<BigUint>,
        d: Vec<BigUint>,
    ) -> Option<Self> {
        if a.len() != b.len() || c.len() != d.len() {
            return None;
        }
        let valid = |xs: &[BigUint], ys: &[BigUint]| {
            xs.iter().chain(ys).all(|v| !v.is_zero())
        };
        if !valid(&a, &b) || !valid(&c, &d) {
            return None;
        }
        let strip = |xs: Vec<BigUint>, ys: Vec<BigUint>| -> (Vec<BigUint>, Vec<BigUint>) {
            xs.into_iter().zip(ys).filter(|(x, _)| !x.is_one()).unzip()
        };
        let (a, b) = strip(a, b);
        let (c, d) = strip(c, d);
        Some(FourLists { a, b, c, d })
    }

    /// Rearranges `x = y` into positive four-list form: positive exponents of
    /// `x` together with negated negative exponents of `y` form `(a, b)`, the
    /// rest form `(c, d)`.
    pub fn from_poe_pair(x: &Poe, y: &Poe) -> Self {
        let mut lists = FourLists { a: vec![], b: vec![], c: vec![], d: vec![] };
        let mut push = |left: bool, base: &BigUint, e: &BigInt| {
            let (bs, es) = if left { (&mut lists.a, &mut lists.b) } else { (&mut lists.c, &mut lists.d) };
            bs.push(base.clone());
            es.push(e.magnitude().clone());
        };
        for (base, e) in x.iter() {
            push(e.is_positive(), base, e);
        }
        for (base, e) in y.iter() {
            push(e.is_negative(), base, e);
        }
        lists
    }

    /// Performs one iteration on the lexicographically first pair `(i, j)`
    /// with a nontrivial gcd. Returns `None` once all pairs are coprime.
    pub fn step(&mut self) -> Option<RefineStep> {
        let (i, j, g) = self.first_shared_pair()?;
        let bi = self.b[i].clone();
        let dj = self.d[j].clone();
        self.a[i] /= &g;
        self.c[j] /= &g;
        if self.a[i].is_one() {
            self.a.remove(i);
            self.b.remove(i);
        }
        if self.c[j].is_one() {
            self.c.remove(j);
            self.d.remove(j);
        }
        if bi > dj {
            self.a.push(g.clone());
            self.b.push(bi - dj);
        } else if bi < dj {
            self.c.push(g.clone());
            self.d.push(dj - bi);
        }
        Some(RefineStep { i, j, gcd: g })
    }

    fn first_shared_pair(&self) -> Option<(usize, usize, BigUint)> {
        for (i, ai) in self.a.iter().enumerate() {
            for (j, cj) in self.c.iter().enumerate() {
                let g = ai.gcd(cj);
                if !g.is_one() {
                    return Some((i, j, g));
                }
            }
        }
        None
    }

    /// Runs the loop to completion; returns the verdict (`true` = EQUAL) and
    /// the number of iterations performed.
    pub fn decide(mut self) -> (bool, usize) {
        let mut iterations = 0;
        while self.step().is_some() {
            iterations += 1;
        }
        (self.a.is_empty() && self.c.is_empty(), iterations)
    }

    /// Both sides as exact integers, or `None` if either exceeds `bit_budget`.
    pub fn eval(&self, bit_budget: u64) -> Option<(BigUint, BigUint)> {
        let side = |bs: &[BigUint], es: &[BigUint]| -> Option<BigUint> {
            let mut bits = BigUint::zero();
            for (b, e) in bs.iter().zip(es) {
                bits += e * BigUint::from(b.bits());
            }
            if bits > BigUint::from(bit_budget) {
                return None;
            }
            let mut acc = BigUint::one();
            for (b, e) in bs.iter().zip(es) {
                let k = e.iter_u64_digits().next().unwrap_or(0);
                acc *= num_traits::pow::Pow::pow(b, k);
            }
            Some(acc)
        };
        Some((side(&self.a, &self.b)?, side(&self.c, &self.d)?))
    }
}
