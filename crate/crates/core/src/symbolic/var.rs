use crate::spec::Sort;
use std::fmt;

/// Where an instant variable comes from. Stream variables order before fresh
/// ones; stream variables order by instant, then by stream index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Stream { t: u64, stream: usize },
    Fresh(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub origin: Origin,
    pub sort: Sort,
}

impl Var {
    pub fn stream(stream: usize, t: u64, sort: Sort) -> Self {
        Var {
            origin: Origin::Stream { t, stream },
            sort,
        }
    }

    pub fn fresh(id: u64, sort: Sort) -> Self {
        Var {
            origin: Origin::Fresh(id),
            sort,
        }
    }

    pub fn instant(&self) -> Option<u64> {
        match self.origin {
            Origin::Stream { t, .. } => Some(t),
            Origin::Fresh(_) => None,
        }
    }

    pub fn stream_index(&self) -> Option<usize> {
        match self.origin {
            Origin::Stream { stream, .. } => Some(stream),
            Origin::Fresh(_) => None,
        }
    }

    pub fn is_fresh(&self) -> bool {
        matches!(self.origin, Origin::Fresh(_))
    }
}

/// Source of fresh variable ids. Ids are never reused.
#[derive(Debug, Clone, Default)]
pub struct FreshGen {
    next: u64,
}

impl FreshGen {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn starting_at(next: u64) -> Self {
        FreshGen { next }
    }

    pub fn next(&mut self, sort: Sort) -> Var {
        let v = Var::fresh(self.next, sort);
        self.next += 1;
        v
    }

    pub fn peek(&self) -> u64 {
        self.next
    }
}

/// Stream names used when printing variables; indices without a name print as `s<i>`.
#[derive(Debug, Clone, Default)]
pub struct Names {
    pub streams: Vec<String>,
}

impl Names {
    pub fn new(streams: Vec<String>) -> Self {
        Names { streams }
    }

    pub fn var<'a>(&'a self, v: &'a Var) -> VarDisplay<'a> {
        VarDisplay {
            names: self,
            var: v,
        }
    }
}

pub struct VarDisplay<'a> {
    names: &'a Names,
    var: &'a Var,
}

impl fmt::Display for VarDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.var.origin {
            Origin::Stream { t, stream } => match self.names.streams.get(stream) {
                Some(n) => write!(f, "{n}^{t}"),
                None => write!(f, "s{stream}^{t}"),
            },
            Origin::Fresh(id) => write!(f, "v{id}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_vars_precede_fresh() {
        let a = Var::stream(3, 100, Sort::Real);
        let b = Var::fresh(0, Sort::Real);
        assert!(a < b);
        assert!(Var::stream(5, 1, Sort::Bool) < Var::stream(0, 2, Sort::Bool));
        assert!(Var::stream(0, 2, Sort::Bool) < Var::stream(1, 2, Sort::Bool));
    }

    #[test]
    fn printing() {
        let names = Names::new(vec!["ld".into(), "acc".into()]);
        assert_eq!(
            names.var(&Var::stream(1, 3, Sort::Real)).to_string(),
            "acc^3"
        );
        assert_eq!(names.var(&Var::fresh(7, Sort::Real)).to_string(), "v7");
        assert_eq!(
            names.var(&Var::stream(9, 0, Sort::Real)).to_string(),
            "s9^0"
        );
    }
}
