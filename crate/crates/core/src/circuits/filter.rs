use super::{Circuit, CircuitBuilder, Gate};
use crate::error::{Error, Result};

/// Circuit computing the degree-`k` homogeneous part of `c`.
///
/// Every gate is split into one copy per degree `0..=max_degree` that can
/// carry nonzero terms. Addition copies with only one contributing side reuse
/// that side's gate; multiplication copy `d` sums the products of copies
/// `r` and `s` with `r + s = d`. Parts above `max_degree` are dropped, which is
/// exact for the parts that are kept since no gate lowers degrees. Gates the
/// output does not depend on are removed.
pub fn degree_filter(c: &Circuit, k: usize, max_degree: usize) -> Result<Circuit> {
    if k > max_degree {
        return Err(Error::params(format!(
            "target degree {k} exceeds the bound {max_degree}"
        )));
    }
    let mut b = CircuitBuilder::new(c.modulus())?;
    // parts[g] lists (degree, gate) sorted by degree
    let mut parts: Vec<Vec<(usize, usize)>> = Vec::with_capacity(c.gate_count());
    for g in c.gates() {
        let split = match *g {
            Gate::Input(v) => {
                if max_degree >= 1 {
                    vec![(1, b.input(v))]
                } else {
                    Vec::new()
                }
            }
            Gate::Const(0) => Vec::new(),
            Gate::Const(k) => vec![(0, b.constant(k))],
            Gate::Add(x, y) => {
                let (px, py) = (&parts[x], &parts[y]);
                let mut out = Vec::with_capacity(px.len() + py.len());
                let (mut i, mut j) = (0, 0);
                while i < px.len() || j < py.len() {
                    let dx = px.get(i).map_or(usize::MAX, |p| p.0);
                    let dy = py.get(j).map_or(usize::MAX, |p| p.0);
                    if dx == dy {
                        let sum = b.add(px[i].1, py[j].1);
                        out.push((dx, sum));
                        i += 1;
                        j += 1;
                    } else if dx < dy {
                        out.push(px[i]);
                        i += 1;
                    } else {
                        out.push(py[j]);
                        j += 1;
                    }
                }
                out
            }
            Gate::Mul(x, y) => {
                let mut by_degree: Vec<Vec<usize>> = vec![Vec::new(); max_degree + 1];
                for &(r, gx) in &parts[x] {
                    for &(s, gy) in &parts[y] {
                        if r + s <= max_degree {
                            let prod = b.mul(gx, gy);
                            by_degree[r + s].push(prod);
                        }
                    }
                }
                by_degree
                    .iter()
                    .enumerate()
                    .filter(|(_, terms)| !terms.is_empty())
                    .map(|(d, terms)| (d, b.sum(terms)))
                    .collect()
            }
        };
        parts.push(split);
    }
    let out = match parts[c.output()].iter().find(|&&(d, _)| d == k) {
        Some(&(_, g)) => g,
        None => b.constant(0),
    };
    Ok(b.finish(out)?.pruned())
}
