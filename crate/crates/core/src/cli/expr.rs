//! Parameter functions of time given as text, e.g. `1 + 0.65*sin(10*t + atan(10))`.

use std::f64::consts::{E, PI};

use evalexpr::{
    build_operator_tree, Context, DefaultNumericTypes, EvalexprError, EvalexprResult, Node, Value,
};

use crate::error::{Error, Result};
use crate::transform::TimeFunction;

struct TimeContext {
    t: Value,
    pi: Value,
    e: Value,
}

impl Context for TimeContext {
    type NumericTypes = DefaultNumericTypes;

    fn get_value(&self, identifier: &str) -> Option<&Value> {
        match identifier {
            "t" => Some(&self.t),
            "pi" => Some(&self.pi),
            "e" => Some(&self.e),
            _ => None,
        }
    }

    fn call_function(&self, identifier: &str, argument: &Value) -> EvalexprResult<Value> {
        let f: fn(f64) -> f64 = match identifier {
            "sin" => f64::sin,
            "cos" => f64::cos,
            "tan" => f64::tan,
            "atan" => f64::atan,
            "exp" => f64::exp,
            "ln" => f64::ln,
            "sqrt" => f64::sqrt,
            "abs" => f64::abs,
            "tanh" => f64::tanh,
            _ => {
                return Err(EvalexprError::FunctionIdentifierNotFound(
                    identifier.to_string(),
                ))
            }
        };
        Ok(Value::Float(f(argument.as_number()?)))
    }

    fn are_builtin_functions_disabled(&self) -> bool {
        false
    }

    fn set_builtin_functions_disabled(&mut self, _disabled: bool) -> EvalexprResult<()> {
        Ok(())
    }
}

/// Appends ".0" to bare integer literals so that `1/2` divides as reals.
fn floatify(src: &str) -> String {
    let chars: Vec<char> = src.chars().collect();
    let mut out = String::with_capacity(src.len() + 8);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let prev_ident = i > 0 && (chars[i - 1].is_alphanumeric() || chars[i - 1] == '_');
        if (c.is_ascii_digit() || c == '.') && !prev_ident {
            let start = i;
            let mut real = false;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                real |= chars[i] == '.';
                i += 1;
            }
            if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j], '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    real = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            out.extend(&chars[start..i]);
            if !real {
                out.push_str(".0");
            }
            continue;
        }
        out.push(c);
        i += 1;
    }
    out
}

/// A parsed function of `t`.
#[derive(Debug, Clone)]
pub struct Expr {
    pub src: String,
    node: Node,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let node = build_operator_tree(&floatify(src))
            .map_err(|e| Error::Config(format!("cannot parse '{src}': {e}")))?;
        let expr = Self {
            src: src.to_string(),
            node,
        };
        expr.eval(0.0)?;
        Ok(expr)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let ctx = TimeContext {
            t: Value::Float(t),
            pi: Value::Float(PI),
            e: Value::Float(E),
        };
        self.node
            .eval_number_with_context(&ctx)
            .map_err(|e| Error::Config(format!("cannot evaluate '{}': {e}", self.src)))
    }

    /// Constant when `t` does not occur, smooth otherwise.
    pub fn to_time_function(&self) -> Result<TimeFunction> {
        if !self.node.iter_variable_identifiers().any(|v| v == "t") {
            return Ok(TimeFunction::constant(self.eval(0.0)?));
        }
        let me = self.clone();
        Ok(TimeFunction::smooth(move |t| {
            me.eval(t).unwrap_or(f64::NAN)
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_division_and_functions() {
        assert_eq!(Expr::parse("1/2").unwrap().eval(0.0).unwrap(), 0.5);
        let e = Expr::parse("1/(1+exp(5-t))").unwrap();
        assert!((e.eval(5.0).unwrap() - 0.5).abs() < 1e-15);
        let e = Expr::parse("1 + 0.65*sin(10*t + atan(10))").unwrap();
        assert!((e.eval(0.1).unwrap() - (1.0 + 0.65 * (1.0 + 10f64.atan()).sin())).abs() < 1e-15);
        assert!((Expr::parse("2.5e-1*pi").unwrap().eval(0.0).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!(Expr::parse("foo(t)").is_err());
    }

    #[test]
    fn constant_detection() {
        assert_eq!(
            Expr::parse("3")
                .unwrap()
                .to_time_function()
                .unwrap()
                .constant_value(),
            Some(3.0)
        );
        assert!(Expr::parse("-exp(-t)")
            .unwrap()
            .to_time_function()
            .unwrap()
            .constant_value()
            .is_none());
    }
}
