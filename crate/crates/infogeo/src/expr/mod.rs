//! Scalar fields as compositions of primitive operations.
//!
//! A [`ScalarField`] is a smooth map ℝⁿ → ℝ built from +, −, ×, ÷, exp,
//! log, sqrt and integer powers, together with an explicitly declared open
//! domain. Fields are built with the [`Expr`] handle type (plain operator
//! overloading over an `Rc` expression graph) and then compiled to a flat
//! evaluation tape. Tapes evaluate either as plain `f64` or as truncated
//! Taylor jets for exact higher derivatives.
//!
//! ```
//! use infogeo::deriv::evaluate_stack;
//! use infogeo::expr::{Domain, Expr, ScalarField};
//!
//! // f(x, y) = x²·e^y on all of ℝ²
//! let f = Expr::var(0).powi(2) * Expr::var(1).exp();
//! let field = ScalarField::new(2, &f, Domain::unrestricted(2)).unwrap();
//! let stack = evaluate_stack(&field, &[3.0, 0.0], 2).unwrap();
//! assert_eq!(stack.value, 9.0);
//! assert_eq!(stack.gradient[0], 6.0); // ∂x = 2x·e^y
//! assert_eq!(stack.hessian[(0, 1)], 6.0); // ∂x∂y = 2x·e^y
//! ```

mod parse;

pub use parse::parse_expr;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::taylor::{self, JetContext};

// ---------------------------------------------------------------------------
// Builder.
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum Node {
    Const(f64),
    Var(usize),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Neg(Expr),
    Exp(Expr),
    Ln(Expr),
    Sqrt(Expr),
    Powi(Expr, i32),
}

/// Cheap handle into a shared expression graph.
#[derive(Clone, Debug)]
pub struct Expr(Rc<Node>);

impl Expr {
    pub fn constant(v: f64) -> Self {
        Expr(Rc::new(Node::Const(v)))
    }

    pub fn var(i: usize) -> Self {
        Expr(Rc::new(Node::Var(i)))
    }

    pub fn exp(&self) -> Self {
        Expr(Rc::new(Node::Exp(self.clone())))
    }

    pub fn ln(&self) -> Self {
        Expr(Rc::new(Node::Ln(self.clone())))
    }

    pub fn sqrt(&self) -> Self {
        Expr(Rc::new(Node::Sqrt(self.clone())))
    }

    pub fn powi(&self, k: i32) -> Self {
        Expr(Rc::new(Node::Powi(self.clone(), k)))
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $node:ident) => {
        impl $trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr(Rc::new(Node::$node(self, rhs)))
            }
        }
        impl $trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr(Rc::new(Node::$node(self.clone(), rhs.clone())))
            }
        }
        impl $trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr(Rc::new(Node::$node(self, Expr::constant(rhs))))
            }
        }
        impl $trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr(Rc::new(Node::$node(Expr::constant(self), rhs)))
            }
        }
    };
}

impl_binop!(Add, add, Add);
impl_binop!(Sub, sub, Sub);
impl_binop!(Mul, mul, Mul);
impl_binop!(Div, div, Div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr(Rc::new(Node::Neg(self)))
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr(Rc::new(Node::Neg(self.clone())))
    }
}

// ---------------------------------------------------------------------------
// Compiled tape.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum TapeOp {
    Const(f64),
    Var(usize),
    Add(u32, u32),
    Sub(u32, u32),
    Mul(u32, u32),
    Div(u32, u32),
    Neg(u32),
    Exp(u32),
    Ln(u32),
    Sqrt(u32),
    Powi(u32, i32),
}

/// A compiled expression: operations in dependency order, result in the
/// last slot. Shared subexpressions (same `Rc` node) are evaluated once.
#[derive(Debug, Clone, PartialEq)]
pub struct Tape {
    arity: usize,
    ops: Vec<TapeOp>,
}

impl Tape {
    pub fn compile(arity: usize, root: &Expr) -> Result<Self> {
        let mut tape = Tape {
            arity,
            ops: Vec::new(),
        };
        let mut seen: HashMap<*const Node, u32> = HashMap::new();
        tape.visit(root, &mut seen)?;
        Ok(tape)
    }

    fn visit(&mut self, e: &Expr, seen: &mut HashMap<*const Node, u32>) -> Result<u32> {
        let key = Rc::as_ptr(&e.0);
        if let Some(&slot) = seen.get(&key) {
            return Ok(slot);
        }
        let op = match &*e.0 {
            Node::Const(v) => TapeOp::Const(*v),
            Node::Var(i) => {
                if *i >= self.arity {
                    return Err(Error::InvalidInput(format!(
                        "variable index {i} out of range for arity {}",
                        self.arity
                    )));
                }
                TapeOp::Var(*i)
            }
            Node::Add(a, b) => TapeOp::Add(self.visit(a, seen)?, self.visit(b, seen)?),
            Node::Sub(a, b) => TapeOp::Sub(self.visit(a, seen)?, self.visit(b, seen)?),
            Node::Mul(a, b) => TapeOp::Mul(self.visit(a, seen)?, self.visit(b, seen)?),
            Node::Div(a, b) => TapeOp::Div(self.visit(a, seen)?, self.visit(b, seen)?),
            Node::Neg(a) => TapeOp::Neg(self.visit(a, seen)?),
            Node::Exp(a) => TapeOp::Exp(self.visit(a, seen)?),
            Node::Ln(a) => TapeOp::Ln(self.visit(a, seen)?),
            Node::Sqrt(a) => TapeOp::Sqrt(self.visit(a, seen)?),
            Node::Powi(a, k) => TapeOp::Powi(self.visit(a, seen)?, *k),
        };
        self.ops.push(op);
        let slot = (self.ops.len() - 1) as u32;
        seen.insert(key, slot);
        Ok(slot)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Plain `f64` evaluation. NaN/Inf intermediates are reported, not
    /// silently propagated.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        debug_assert_eq!(x.len(), self.arity);
        let mut slots: Vec<f64> = Vec::with_capacity(self.ops.len());
        for (i, op) in self.ops.iter().enumerate() {
            let v: f64 = match op {
                TapeOp::Const(c) => *c,
                TapeOp::Var(j) => x[*j],
                TapeOp::Add(a, b) => slots[*a as usize] + slots[*b as usize],
                TapeOp::Sub(a, b) => slots[*a as usize] - slots[*b as usize],
                TapeOp::Mul(a, b) => slots[*a as usize] * slots[*b as usize],
                TapeOp::Div(a, b) => slots[*a as usize] / slots[*b as usize],
                TapeOp::Neg(a) => -slots[*a as usize],
                TapeOp::Exp(a) => slots[*a as usize].exp(),
                TapeOp::Ln(a) => slots[*a as usize].ln(),
                TapeOp::Sqrt(a) => slots[*a as usize].sqrt(),
                TapeOp::Powi(a, k) => slots[*a as usize].powi(*k),
            };
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("tape op #{i} produced {v}")));
            }
            slots.push(v);
        }
        Ok(*slots.last().expect("tape is never empty"))
    }

    /// Jet evaluation: coefficient vector of the truncated Taylor expansion
    /// at `x`.
    pub fn eval_jet(&self, ctx: &JetContext, x: &[f64]) -> Result<Vec<f64>> {
        debug_assert_eq!(x.len(), self.arity);
        let mut slots: Vec<Vec<f64>> = Vec::with_capacity(self.ops.len());
        for (i, op) in self.ops.iter().enumerate() {
            let v = match op {
                TapeOp::Const(c) => taylor::jet_const(ctx, *c),
                TapeOp::Var(j) => taylor::jet_var(ctx, *j, x[*j]),
                TapeOp::Add(a, b) => taylor::jet_add(&slots[*a as usize], &slots[*b as usize]),
                TapeOp::Sub(a, b) => taylor::jet_sub(&slots[*a as usize], &slots[*b as usize]),
                TapeOp::Mul(a, b) => taylor::jet_mul(ctx, &slots[*a as usize], &slots[*b as usize]),
                TapeOp::Div(a, b) => taylor::jet_div(ctx, &slots[*a as usize], &slots[*b as usize]),
                TapeOp::Neg(a) => taylor::jet_neg(&slots[*a as usize]),
                TapeOp::Exp(a) => taylor::jet_exp(ctx, &slots[*a as usize]),
                TapeOp::Ln(a) => taylor::jet_ln(ctx, &slots[*a as usize]),
                TapeOp::Sqrt(a) => taylor::jet_sqrt(ctx, &slots[*a as usize]),
                TapeOp::Powi(a, k) => taylor::jet_powi(ctx, &slots[*a as usize], *k),
            };
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "tape op #{i} produced a non-finite jet"
                )));
            }
            slots.push(v);
        }
        Ok(slots.pop().expect("tape is never empty"))
    }
}

// ---------------------------------------------------------------------------
// Domain.
// ---------------------------------------------------------------------------

/// A named open semialgebraic condition `expr(x) > 0`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    tape: Tape,
}

impl Constraint {
    pub fn new(name: impl Into<String>, arity: usize, expr: &Expr) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            tape: Tape::compile(arity, expr)?,
        })
    }

    pub fn satisfied(&self, x: &[f64]) -> bool {
        matches!(self.tape.eval(x), Ok(v) if v > 0.0)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.tape.eval(x)
    }
}

/// Open domain: a coordinate-wise open box plus named nonlinear constraints.
#[derive(Debug, Clone)]
pub struct Domain {
    bounds: Vec<(f64, f64)>,
    constraints: Vec<Constraint>,
}

impl Domain {
    /// All of ℝⁿ.
    pub fn unrestricted(n: usize) -> Self {
        Self {
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); n],
            constraints: Vec::new(),
        }
    }

    pub fn with_bound(mut self, i: usize, lo: f64, hi: f64) -> Self {
        self.bounds[i] = (lo, hi);
        self
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn arity(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.bounds.len() {
            return false;
        }
        if !x.iter().all(|v| v.is_finite()) {
            return false;
        }
        for (v, (lo, hi)) in x.iter().zip(&self.bounds) {
            if !(v > lo && v < hi) {
                return false;
            }
        }
        self.constraints.iter().all(|c| c.satisfied(x))
    }

    /// Explain which condition a point violates.
    pub fn violation(&self, x: &[f64]) -> Option<String> {
        if x.len() != self.bounds.len() {
            return Some(format!(
                "expected {} coordinates, got {}",
                self.bounds.len(),
                x.len()
            ));
        }
        for (i, (v, (lo, hi))) in x.iter().zip(&self.bounds).enumerate() {
            if !(v > lo && v < hi) {
                return Some(format!("coordinate {i} = {v} outside ({lo}, {hi})"));
            }
        }
        for c in &self.constraints {
            if !c.satisfied(x) {
                return Some(format!("constraint '{}' ≤ 0", c.name));
            }
        }
        None
    }
}

// ---------------------------------------------------------------------------
// ScalarField.
// ---------------------------------------------------------------------------

/// A smooth scalar field with its declared open domain.
#[derive(Debug, Clone)]
pub struct ScalarField {
    tape: Tape,
    domain: Domain,
}

impl ScalarField {
    pub fn new(arity: usize, root: &Expr, domain: Domain) -> Result<Self> {
        if domain.arity() != arity {
            return Err(Error::InvalidInput(format!(
                "domain arity {} does not match field arity {arity}",
                domain.arity()
            )));
        }
        Ok(Self {
            tape: Tape::compile(arity, root)?,
            domain,
        })
    }

    pub fn arity(&self) -> usize {
        self.tape.arity()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn tape(&self) -> &Tape {
        &self.tape
    }

    pub fn check_in_domain(&self, x: &[f64]) -> Result<()> {
        match self.domain.violation(x) {
            None => Ok(()),
            Some(why) => Err(Error::Domain(why)),
        }
    }

    /// Value at an in-domain point.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_in_domain(x)?;
        self.tape.eval(x)
    }

    /// Value without the domain check (used by stencil code that has
    /// already validated every node).
    pub fn value_unchecked(&self, x: &[f64]) -> Result<f64> {
        self.tape.eval(x)
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ScalarField(arity={}, ops={})",
            self.tape.arity(),
            self.tape.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn shared_subexpressions_compile_once() {
        let x = Expr::var(0);
        let s = &x * &x;
        let f = &s + &s;
        let tape = Tape::compile(1, &f).unwrap();
        // var, mul, add — the square is reused, not recompiled.
        assert_eq!(tape.len(), 3);
        assert_relative_eq!(tape.eval(&[3.0]).unwrap(), 18.0);
    }

    #[test]
    fn variable_out_of_range_is_rejected() {
        let f = Expr::var(2);
        assert!(Tape::compile(2, &f).is_err());
    }

    #[test]
    fn domain_box_and_constraint() {
        // x > 0 box with constraint x·y − 1 > 0
        let c = Constraint::new("xy_gt_1", 2, &(Expr::var(0) * Expr::var(1) - 1.0)).unwrap();
        let d = Domain::unrestricted(2)
            .with_bound(0, 0.0, f64::INFINITY)
            .with_constraint(c);
        assert!(d.contains(&[2.0, 1.0]));
        assert!(!d.contains(&[2.0, 0.4]));
        assert!(!d.contains(&[-2.0, -1.0]));
        assert!(d.violation(&[2.0, 0.4]).unwrap().contains("xy_gt_1"));
    }

    #[test]
    fn non_finite_is_reported() {
        let f = Expr::var(0).ln();
        let field = ScalarField::new(1, &f, Domain::unrestricted(1)).unwrap();
        // ln of a negative number is NaN → NonFinite, not a silent NaN.
        assert!(matches!(field.value(&[-1.0]), Err(Error::NonFinite(_))));
    }
}
