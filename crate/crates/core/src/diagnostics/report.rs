use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;
use crate::trace::format_g17;

/// One named scalar with the number of replicates behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct Statistic {
    pub name: String,
    pub value: f64,
    pub replicates: usize,
}

/// Summary statistics for one method.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    pub seeds: Vec<u64>,
    pub statistics: Vec<Statistic>,
}

impl MethodSummary {
    pub fn new(method: impl Into<String>, seeds: Vec<u64>) -> Self {
        Self {
            method: method.into(),
            seeds,
            statistics: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64, replicates: usize) {
        self.statistics.push(Statistic {
            name: name.into(),
            value,
            replicates,
        });
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.statistics.iter().find(|s| s.name == name).map(|s| s.value)
    }
}

/// Side-by-side method comparison with free-form verdict lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComparisonReport {
    pub title: String,
    pub methods: Vec<MethodSummary>,
    pub verdicts: Vec<String>,
}

impl ComparisonReport {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    /// One row per statistic: `method,statistic,value,replicates`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "method,statistic,value,replicates")?;
        for m in &self.methods {
            for s in &m.statistics {
                writeln!(
                    out,
                    "{},{},{},{}",
                    m.method,
                    s.name,
                    format_g17(s.value),
                    s.replicates
                )?;
            }
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.title);
        for m in &self.methods {
            let seeds: Vec<String> = m.seeds.iter().map(u64::to_string).collect();
            let _ = writeln!(
                s,
                "\n[{}] seeds={}",
                m.method,
                seeds.join(" ")
            );
            for st in &m.statistics {
                let _ = writeln!(s, "  {:<28} {:>14.6} (n={})", st.name, st.value, st.replicates);
            }
        }
        if !self.verdicts.is_empty() {
            let _ = writeln!(s);
            for v in &self.verdicts {
                let _ = writeln!(s, "{v}");
            }
        }
        s
    }
}
