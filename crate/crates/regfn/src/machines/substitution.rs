//! Substitutions: total maps from variables to strings over variables and
//! output letters, composed functionally along SST runs.

use super::{Symbol, Var};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// One token of a substitution image or output expression.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Piece {
    Letter(Symbol),
    Var(Var),
}

impl Piece {
    pub fn letter(s: impl Into<Symbol>) -> Self {
        Piece::Letter(s.into())
    }

    pub fn var(v: impl Into<Var>) -> Self {
        Piece::Var(v.into())
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::Letter(s) => write!(f, "{s}"),
            Piece::Var(v) => write!(f, "${{{v}}}"),
        }
    }
}

/// A string over output letters and variables, e.g. an SST output expression.
pub type OutputExpr = Vec<Piece>;

pub fn render_expr(expr: &[Piece]) -> String {
    expr.iter().map(|p| p.to_string()).collect()
}

/// Number of occurrences of `v` in `expr`.
pub fn occurrences(expr: &[Piece], v: &str) -> usize {
    expr.iter()
        .filter(|p| matches!(p, Piece::Var(x) if x == v))
        .count()
}

/// Variables occurring in `expr`, each listed once.
pub fn vars_of(expr: &[Piece]) -> BTreeSet<Var> {
    expr.iter()
        .filter_map(|p| match p {
            Piece::Var(v) => Some(v.clone()),
            Piece::Letter(_) => None,
        })
        .collect()
}

/// `expr` is k-linear when no variable occurs more than `k` times in it.
pub fn is_k_linear(expr: &[Piece], k: usize) -> bool {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for p in expr {
        if let Piece::Var(v) = p {
            let c = counts.entry(v.as_str()).or_insert(0);
            *c += 1;
            if *c > k {
                return false;
            }
        }
    }
    true
}

/// A total map from variables to strings over variables and letters.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Substitution {
    images: BTreeMap<Var, OutputExpr>,
}

impl Substitution {
    pub fn new(images: BTreeMap<Var, OutputExpr>) -> Self {
        Substitution { images }
    }

    /// The identity substitution on `vars`: every variable maps to itself.
    pub fn identity<V: AsRef<str>>(vars: &[V]) -> Self {
        Substitution {
            images: vars
                .iter()
                .map(|v| (v.as_ref().to_string(), vec![Piece::var(v.as_ref())]))
                .collect(),
        }
    }

    /// Maps every variable of `vars` to the empty string.
    pub fn blank<V: AsRef<str>>(vars: &[V]) -> Self {
        Substitution {
            images: vars
                .iter()
                .map(|v| (v.as_ref().to_string(), Vec::new()))
                .collect(),
        }
    }

    pub fn set(&mut self, var: impl Into<Var>, image: OutputExpr) {
        self.images.insert(var.into(), image);
    }

    pub fn image(&self, var: &str) -> Option<&OutputExpr> {
        self.images.get(var)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.images.keys()
    }

    pub fn images(&self) -> impl Iterator<Item = (&Var, &OutputExpr)> {
        self.images.iter()
    }

    /// Extends `self` homomorphically to a string: variables are replaced by
    /// their images, letters are kept.
    pub fn apply(&self, expr: &[Piece]) -> OutputExpr {
        let mut out = Vec::new();
        for p in expr {
            match p {
                Piece::Letter(_) => out.push(p.clone()),
                Piece::Var(v) => match self.images.get(v) {
                    Some(image) => out.extend(image.iter().cloned()),
                    None => out.push(p.clone()),
                },
            }
        }
        out
    }

    /// Composition: `(self ∘ later)(X) = self.apply(later(X))`.
    ///
    /// Along a run this is folded left to right, the accumulated substitution
    /// being `self` and the newly read transition's update being `later`.
    pub fn compose(&self, later: &Substitution) -> Substitution {
        Substitution {
            images: later
                .images
                .iter()
                .map(|(v, image)| (v.clone(), self.apply(image)))
                .collect(),
        }
    }

    /// Every image is k-linear.
    pub fn is_k_linear(&self, k: usize) -> bool {
        self.images.values().all(|image| is_k_linear(image, k))
    }

    /// Each variable occurs at most once across all images combined.
    pub fn is_copyless(&self) -> bool {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for image in self.images.values() {
            for p in image {
                if let Piece::Var(v) = p {
                    if !seen.insert(v.as_str()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Drops letters from every image, keeping only the variable flow.
    pub fn var_projection(&self) -> Substitution {
        Substitution {
            images: self
                .images
                .iter()
                .map(|(v, image)| {
                    (
                        v.clone(),
                        image
                            .iter()
                            .filter(|p| matches!(p, Piece::Var(_)))
                            .cloned()
                            .collect(),
                    )
                })
                .collect(),
        }
    }
}

/// Parses the compact test notation "X: aXb; Y: Y" where uppercase
/// single letters are variables and anything else is a letter symbol.
#[cfg(test)]
pub fn subst(spec: &str) -> Substitution {
    let mut images = BTreeMap::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (var, image) = part
            .split_once(':')
            .expect("missing ':' in substitution spec");
        let pieces = image
            .trim()
            .chars()
            .map(|c| {
                if c.is_ascii_uppercase() {
                    Piece::var(c.to_string())
                } else {
                    Piece::letter(c.to_string())
                }
            })
            .collect();
        images.insert(var.trim().to_string(), pieces);
    }
    Substitution { images }
}
