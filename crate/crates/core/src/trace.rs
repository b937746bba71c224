//! Per-iteration population traces and their CSV form.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::samplers::PopulationState;

/// Formats like C's `%.17g`, which round-trips every `f64`.
pub fn format_g17(x: f64) -> String {
    const P: i32 = 17;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..P).contains(&exp) {
        let fixed = format!("{:.*}", (P - 1 - exp) as usize, x);
        strip_zeros(&fixed).to_string()
    } else {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Positions, acceptance flags and selected slots for every chain at every
/// iteration; iteration 0 is the initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainTrace<T> {
    dim: usize,
    chains: usize,
    positions: Vec<T>,
    accepted: Vec<bool>,
    selected: Vec<Option<usize>>,
    nu: Vec<Vec<T>>,
}

impl<T: Real> ChainTrace<T> {
    pub fn new(dim: usize, chains: usize) -> Self {
        Self {
            dim,
            chains,
            positions: Vec::new(),
            accepted: Vec::new(),
            selected: Vec::new(),
            nu: Vec::new(),
        }
    }

    /// Trace whose first row is the population's current state.
    pub fn starting_at(pop: &PopulationState<T>) -> Self {
        let mut t = Self::new(pop.dim(), pop.chains());
        for p in &pop.positions {
            t.push_row(p, false, None);
        }
        t
    }

    pub fn push_row(&mut self, x: &[T], accepted: bool, selected: Option<usize>) {
        debug_assert_eq!(x.len(), self.dim);
        self.positions.extend_from_slice(x);
        self.accepted.push(accepted);
        self.selected.push(selected);
    }

    /// Appends the population's state after an iteration.
    pub fn record(&mut self, pop: &PopulationState<T>, nu: &[T]) {
        for i in 0..pop.chains() {
            self.push_row(&pop.positions[i], pop.accepted[i], pop.selected[i]);
        }
        self.nu.push(nu.to_vec());
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn chains(&self) -> usize {
        self.chains
    }

    /// Number of recorded states per chain, including the initial one.
    pub fn len(&self) -> usize {
        self.accepted.len() / self.chains.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.accepted.is_empty()
    }

    pub fn rows(&self) -> usize {
        self.accepted.len()
    }

    pub fn position(&self, iter: usize, chain: usize) -> &[T] {
        let r = iter * self.chains + chain;
        &self.positions[r * self.dim..(r + 1) * self.dim]
    }

    pub fn accepted(&self, iter: usize, chain: usize) -> bool {
        self.accepted[iter * self.chains + chain]
    }

    pub fn selected(&self, iter: usize, chain: usize) -> Option<usize> {
        self.selected[iter * self.chains + chain]
    }

    /// `ν` in force after each iteration (none for the initial state).
    pub fn nu(&self) -> &[Vec<T>] {
        &self.nu
    }

    /// Coordinate `coord` of one chain over iterations `from..`.
    pub fn series(&self, chain: usize, coord: usize, from: usize) -> Vec<T> {
        (from..self.len())
            .map(|n| self.position(n, chain)[coord])
            .collect()
    }

    /// All chains' positions over iterations `from..`, iteration-major.
    pub fn pooled(&self, from: usize) -> Vec<Vec<T>> {
        (from..self.len())
            .flat_map(|n| (0..self.chains).map(move |c| (n, c)))
            .map(|(n, c)| self.position(n, c).to_vec())
            .collect()
    }

    /// Acceptance rate over all non-initial rows.
    pub fn acceptance_rate(&self) -> f64 {
        let moves = self.rows().saturating_sub(self.chains);
        if moves == 0 {
            return 0.0;
        }
        self.accepted[self.chains..].iter().filter(|&&a| a).count() as f64 / moves as f64
    }

    /// Writes `iter,chain,accepted,J,x_1..x_d` with 1-based chain and slot
    /// indices (`J = 0` when nothing was selected).
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header = String::from("iter,chain,accepted,J");
        for k in 1..=self.dim {
            header.push_str(&format!(",x_{k}"));
        }
        writeln!(out, "{header}")?;
        let mut line = String::new();
        for r in 0..self.rows() {
            line.clear();
            let (n, c) = (r / self.chains, r % self.chains);
            line.push_str(&format!(
                "{},{},{},{}",
                n,
                c + 1,
                u8::from(self.accepted[r]),
                self.selected[r].map_or(0, |j| j + 1)
            ));
            for &v in &self.positions[r * self.dim..(r + 1) * self.dim] {
                line.push(',');
                line.push_str(&format_g17(v.as_f64()));
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

impl ChainTrace<f64> {
    /// Parses the CSV written by [`ChainTrace::write_csv`]. Errors carry the
    /// 1-based line number of the offending row.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let header = match lines.next() {
            Some((_, l)) => l?,
            None => {
                return Err(Error::Parse {
                    line: 1,
                    message: "empty trace".into(),
                })
            }
        };
        let cols: Vec<&str> = header.trim_end_matches('\r').split(',').collect();
        if cols.len() < 5 || cols[..4] != ["iter", "chain", "accepted", "J"] {
            return Err(Error::Parse {
                line: 1,
                message: "header must be iter,chain,accepted,J,x_1..x_d".into(),
            });
        }
        for (k, c) in cols[4..].iter().enumerate() {
            if *c != format!("x_{}", k + 1) {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("unexpected column `{c}`"),
                });
            }
        }
        let dim = cols.len() - 4;
        let mut raw: Vec<(usize, usize, bool, Option<usize>, Vec<f64>)> = Vec::new();
        for (i, line) in lines {
            let line = line?;
            let lineno = i + 1;
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let bad = |m: &str| Error::Parse {
                line: lineno,
                message: m.to_string(),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != dim + 4 {
                return Err(bad(&format!("expected {} fields, found {}", dim + 4, f.len())));
            }
            let iter: usize = f[0].parse().map_err(|_| bad("bad iter"))?;
            let chain: usize = f[1].parse().map_err(|_| bad("bad chain"))?;
            if chain == 0 {
                return Err(bad("chain indices are 1-based"));
            }
            let accepted = match f[2] {
                "0" => false,
                "1" => true,
                _ => return Err(bad("accepted must be 0 or 1")),
            };
            let j: usize = f[3].parse().map_err(|_| bad("bad J"))?;
            let x = f[4..]
                .iter()
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad("non-numeric coordinate"))?;
            if x.iter().any(|v| !v.is_finite()) {
                return Err(bad("non-finite coordinate"));
            }
            raw.push((iter, chain - 1, accepted, j.checked_sub(1), x));
        }
        if raw.is_empty() {
            return Err(Error::Parse {
                line: 2,
                message: "trace has no rows".into(),
            });
        }
        let chains = raw.iter().map(|r| r.1).max().unwrap() + 1;
        let mut trace = ChainTrace::new(dim, chains);
        for (r, (iter, chain, accepted, j, x)) in raw.into_iter().enumerate() {
            if iter != r / chains || chain != r % chains {
                return Err(Error::Parse {
                    line: r + 2,
                    message: "rows must be iteration-major with every chain present".into(),
                });
            }
            trace.push_row(&x, accepted, j);
        }
        if trace.rows() % chains != 0 {
            return Err(Error::Parse {
                line: trace.rows() + 1,
                message: "incomplete final iteration".into(),
            });
        }
        Ok(trace)
    }
}
