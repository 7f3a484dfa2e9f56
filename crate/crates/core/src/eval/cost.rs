use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// The syntactic constructs that carry a cost constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Const {
    Var,
    Null,
    Inj,
    Case,
    Pair,
    Letp,
    Lam,
    App,
    Nil,
    Cons,
    Rec,
    Record,
    Proj1,
    Proj2,
    Empty,
    Push,
    Pop,
    Leaf,
    Node,
    Trec,
}

impl Const {
    pub const ALL: [Const; 20] = [
        Const::Var,
        Const::Null,
        Const::Inj,
        Const::Case,
        Const::Pair,
        Const::Letp,
        Const::Lam,
        Const::App,
        Const::Nil,
        Const::Cons,
        Const::Rec,
        Const::Record,
        Const::Proj1,
        Const::Proj2,
        Const::Empty,
        Const::Push,
        Const::Pop,
        Const::Leaf,
        Const::Node,
        Const::Trec,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Const::Var => "c_var",
            Const::Null => "c_null",
            Const::Inj => "c_inj",
            Const::Case => "c_case",
            Const::Pair => "c_pair",
            Const::Letp => "c_letp",
            Const::Lam => "c_lam",
            Const::App => "c_app",
            Const::Nil => "c_nil",
            Const::Cons => "c_cons",
            Const::Rec => "c_rec",
            Const::Record => "c_record",
            Const::Proj1 => "c_proj1",
            Const::Proj2 => "c_proj2",
            Const::Empty => "c_empty",
            Const::Push => "c_push",
            Const::Pop => "c_pop",
            Const::Leaf => "c_leaf",
            Const::Node => "c_node",
            Const::Trec => "c_trec",
        }
    }
}

/// One natural cost per construct.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CostModel {
    costs: [u64; 20],
}

impl Default for CostModel {
    fn default() -> CostModel {
        CostModel::uniform(1)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CostModelError {
    #[error("line {line}: expected `name = natural`")]
    Syntax { line: usize },
    #[error("line {line}: unknown cost constant `{name}`")]
    Unknown { line: usize, name: String },
    #[error("unknown cost model `{0}`; expected `default`, `paper-example` or a file")]
    Preset(String),
}

impl CostModel {
    pub fn uniform(c: u64) -> CostModel {
        CostModel { costs: [c; 20] }
    }

    /// `c_rec = c_app = 1`, everything else free.
    pub fn paper_example() -> CostModel {
        CostModel::uniform(0)
            .with(Const::Rec, 1)
            .with(Const::App, 1)
    }

    pub fn preset(name: &str) -> Result<CostModel, CostModelError> {
        match name {
            "default" => Ok(CostModel::default()),
            "paper-example" => Ok(CostModel::paper_example()),
            _ => Err(CostModelError::Preset(name.to_string())),
        }
    }

    pub fn with(mut self, c: Const, v: u64) -> CostModel {
        self.costs[c as usize] = v;
        self
    }

    pub fn get(&self, c: Const) -> u64 {
        self.costs[c as usize]
    }

    /// Parses `name = natural` lines over the default model. `#` and `--`
    /// start comments; the `c_` prefix is optional.
    pub fn parse(src: &str) -> Result<CostModel, CostModelError> {
        let mut cm = CostModel::default();
        for (i, raw) in src.lines().enumerate() {
            let line = raw.split("--").next().unwrap_or("");
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, value) = line
                .split_once('=')
                .ok_or(CostModelError::Syntax { line: i + 1 })?;
            let name = name.trim();
            let value =
                u64::from_str(value.trim()).map_err(|_| CostModelError::Syntax { line: i + 1 })?;
            let full = if name.starts_with("c_") {
                name.to_string()
            } else {
                format!("c_{name}")
            };
            let c = Const::ALL
                .into_iter()
                .find(|c| c.name() == full)
                .ok_or_else(|| CostModelError::Unknown {
                    line: i + 1,
                    name: name.to_string(),
                })?;
            cm = cm.with(c, value);
        }
        Ok(cm)
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in Const::ALL {
            writeln!(f, "{} = {}", c.name(), self.get(c))?;
        }
        Ok(())
    }
}

/// Evaluation rules, one per conclusion shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Var,
    UnitI,
    SumI,
    SumE,
    TensorI,
    TensorE,
    ArrowI,
    ArrowE,
    ListI1,
    ListI2,
    ListE1,
    ListE2,
    ProdI,
    ProdE1,
    ProdE2,
    StackI1,
    StackI2,
    StackE1,
    StackE2,
    TreeI1,
    TreeI2,
    TreeE1,
    TreeE2,
}

impl Rule {
    pub const ALL: [Rule; 23] = [
        Rule::Var,
        Rule::UnitI,
        Rule::SumI,
        Rule::SumE,
        Rule::TensorI,
        Rule::TensorE,
        Rule::ArrowI,
        Rule::ArrowE,
        Rule::ListI1,
        Rule::ListI2,
        Rule::ListE1,
        Rule::ListE2,
        Rule::ProdI,
        Rule::ProdE1,
        Rule::ProdE2,
        Rule::StackI1,
        Rule::StackI2,
        Rule::StackE1,
        Rule::StackE2,
        Rule::TreeI1,
        Rule::TreeI2,
        Rule::TreeE1,
        Rule::TreeE2,
    ];

    /// The constant this rule adds in its conclusion.
    pub fn charge(self) -> Const {
        match self {
            Rule::Var => Const::Var,
            Rule::UnitI => Const::Null,
            Rule::SumI => Const::Inj,
            Rule::SumE => Const::Case,
            Rule::TensorI => Const::Pair,
            Rule::TensorE => Const::Letp,
            Rule::ArrowI => Const::Lam,
            Rule::ArrowE => Const::App,
            Rule::ListI1 => Const::Nil,
            Rule::ListI2 => Const::Cons,
            Rule::ListE1 | Rule::ListE2 => Const::Rec,
            Rule::ProdI => Const::Record,
            Rule::ProdE1 => Const::Proj1,
            Rule::ProdE2 => Const::Proj2,
            Rule::StackI1 => Const::Empty,
            Rule::StackI2 => Const::Push,
            Rule::StackE1 | Rule::StackE2 => Const::Pop,
            Rule::TreeI1 => Const::Leaf,
            Rule::TreeI2 => Const::Node,
            Rule::TreeE1 | Rule::TreeE2 => Const::Trec,
        }
    }
}

/// How often each rule fired during one evaluation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ledger {
    counts: [u64; 23],
}

impl Ledger {
    pub fn record(&mut self, r: Rule) {
        self.counts[r as usize] += 1;
    }

    pub fn count(&self, r: Rule) -> u64 {
        self.counts[r as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// The cost implied by the rule counts.
    pub fn cost(&self, cm: &CostModel) -> u64 {
        Rule::ALL
            .into_iter()
            .map(|r| self.count(r) * cm.get(r.charge()))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let p = CostModel::paper_example();
        assert_eq!(p.get(Const::Rec), 1);
        assert_eq!(p.get(Const::App), 1);
        assert_eq!(p.get(Const::Var), 0);
        assert_eq!(CostModel::default().get(Const::Trec), 1);
        assert!(CostModel::preset("fast").is_err());
    }

    #[test]
    fn parses_files() {
        let cm = CostModel::parse("# costs\nc_var = 3\napp = 0 -- free\n\n").unwrap();
        assert_eq!(cm.get(Const::Var), 3);
        assert_eq!(cm.get(Const::App), 0);
        assert_eq!(cm.get(Const::Null), 1);
        assert_eq!(
            CostModel::parse("c_foo = 1"),
            Err(CostModelError::Unknown {
                line: 1,
                name: "c_foo".into()
            })
        );
        assert_eq!(
            CostModel::parse("c_var 1"),
            Err(CostModelError::Syntax { line: 1 })
        );
        let round = CostModel::parse(&cm.to_string()).unwrap();
        assert_eq!(round, cm);
    }
}
