//! Published reference tables and a side-by-side reproduction of each.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::qform::{make_form, LatticeVector};
use crate::vinberg::{self, Budget, RootSystem};

pub const TABLE_IDS: [&str; 4] = ["m33_vectors", "m33_completions", "m17_vectors", "m21_vectors"];

pub const M33_VECTORS: [[i64; 4]; 15] = [
    [0, 0, -1, 0],
    [1, 0, 1, 0],
    [0, 0, 0, -1],
    [33, 0, 0, 1],
    [-1, 1, 0, 0],
    [16, 2, 1, 1],
    [6, 6, 3, 1],
    [8, 4, 1, 1],
    [11, 3, 1, 1],
    [11, 11, 0, 2],
    [99, 33, 0, 10],
    [121, 22, 0, 9],
    [90, 18, 3, 7],
    [37, 8, 0, 3],
    [264, 66, 0, 23],
];

pub const M17_VECTORS: [[i64; 4]; 13] = [
    [0, 0, -1, 0],
    [1, 0, 1, 0],
    [0, 0, 0, -1],
    [17, 0, 0, 1],
    [-1, 1, 0, 0],
    [8, 2, 1, 1],
    [4, 4, 1, 1],
    [68, 34, 17, 11],
    [19, 8, 0, 3],
    [17, 9, 1, 3],
    [136, 68, 17, 23],
    [85, 51, 0, 16],
    [204, 102, 0, 35],
];

pub const M21_VECTORS: [[i64; 4]; 11] = [
    [0, 0, -1, 0],
    [1, 0, 1, 0],
    [0, 0, 0, -1],
    [21, 0, 0, 1],
    [-1, 1, 0, 0],
    [10, 2, 1, 1],
    [6, 3, 0, 1],
    [6, 4, 2, 1],
    [42, 42, 21, 8],
    [14, 14, 3, 3],
    [63, 63, 21, 13],
];

/// One row: an elliptic pair and its two completions, 1-based in the order
/// of [`M33_VECTORS`].
pub struct CompletionRow {
    pub pair: [usize; 2],
    pub first: (&'static [usize], &'static str),
    pub second: (&'static [usize], &'static str),
}

const fn row(
    pair: [usize; 2],
    first: (&'static [usize], &'static str),
    second: (&'static [usize], &'static str),
) -> CompletionRow {
    CompletionRow { pair, first, second }
}

pub const M33_COMPLETIONS: [CompletionRow; 19] = [
    row([1, 3], (&[2, 4], "2×Ã1"), (&[5], "3×A1")),
    row([1, 4], (&[2, 3], "2×Ã1"), (&[6], "A1+B2")),
    row([1, 5], (&[3], "3×A1"), (&[10], "3×A1")),
    row([1, 8], (&[10], "A1+B2"), (&[11], "A1+B2")),
    row([1, 10], (&[5], "3×A1"), (&[8], "A1+B2")),
    row([2, 3], (&[1, 4], "2×Ã1"), (&[5], "A1+A2")),
    row([2, 4], (&[1, 3], "2×Ã1"), (&[6], "3×A1")),
    row([2, 5], (&[3], "A1+A2"), (&[7], "A1+A2")),
    row([2, 6], (&[4], "3×A1"), (&[9], "B3")),
    row([2, 7], (&[5], "A1+A2"), (&[8], "A1+B2")),
    row([2, 8], (&[7], "A1+B2"), (&[9], "B3")),
    row([2, 9], (&[6], "B3"), (&[8], "B3")),
    row([3, 5], (&[1], "3×A1"), (&[2], "A1+A2")),
    row([4, 6], (&[1], "A1+B2"), (&[2], "3×A1")),
    row([5, 7], (&[2], "A1+A2"), (&[10], "3×A1")),
    row([5, 10], (&[1], "3×A1"), (&[7], "3×A1")),
    row([7, 8], (&[2], "A1+B2"), (&[10], "3×A1")),
    row([7, 10], (&[5], "3×A1"), (&[8], "3×A1")),
    row([8, 10], (&[1], "A1+B2"), (&[7], "3×A1")),
];

#[derive(Clone, Debug)]
pub struct TableReport {
    pub text: String,
    pub pass: bool,
}

fn complete_run(m: i64) -> Result<RootSystem> {
    vinberg::run(&make_form(m)?, &Budget::default())
}

/// Index in `sys` of each published vector, in published order.
fn locate(sys: &RootSystem, published: &[[i64; 4]]) -> Vec<Option<usize>> {
    published
        .iter()
        .map(|p| sys.roots().iter().position(|r| r.vec().0 == *p))
        .collect()
}

fn vectors_table(m: i64, published: &[[i64; 4]]) -> Result<TableReport> {
    let sys = complete_run(m)?;
    let idx = locate(&sys, published);
    let mut text = String::new();
    let _ = writeln!(text, "m = {m}: {} published, {} computed", published.len(), sys.roots().len());
    let _ = writeln!(text, "{:>3}  {:<22} {:>8}", "#", "published", "computed");
    for (n, (p, i)) in published.iter().zip(&idx).enumerate() {
        let here = i.map(|i| (i + 1).to_string()).unwrap_or_else(|| "missing".into());
        let _ = writeln!(text, "{:>3}  {:<22} {:>8}", n + 1, LatticeVector(*p).to_string(), here);
    }
    let pass = idx.iter().all(Option::is_some) && sys.roots().len() == published.len();
    let _ = writeln!(text, "{}", if pass { "MATCH" } else { "MISMATCH" });
    Ok(TableReport { text, pass })
}

fn completions_table() -> Result<TableReport> {
    let sys = complete_run(33)?;
    let idx = locate(&sys, &M33_VECTORS);
    if idx.iter().any(Option::is_none) {
        return Ok(TableReport { text: "m = 33: vector set differs\nMISMATCH\n".into(), pass: false });
    }
    let ours: Vec<usize> = idx.into_iter().map(Option::unwrap).collect();
    let back = |i: usize| ours.iter().position(|&o| o == i).map(|p| p + 1);
    let d = sys.diagram();
    let mut text = String::new();
    let mut pass = true;
    for r in &M33_COMPLETIONS {
        let pair = [ours[r.pair[0] - 1], ours[r.pair[1] - 1]];
        let got: BTreeSet<(Vec<usize>, String)> = d
            .completions(pair)?
            .into_iter()
            .map(|(s, c)| {
                let mut s: Vec<usize> = s.into_iter().filter_map(back).collect();
                s.sort_unstable();
                (s, c.to_string())
            })
            .collect();
        let want: BTreeSet<(Vec<usize>, String)> = [r.first, r.second]
            .iter()
            .map(|(s, c)| (s.to_vec(), c.to_string()))
            .collect();
        let ok = got == want;
        pass &= ok;
        let show = |set: &BTreeSet<(Vec<usize>, String)>| {
            set.iter()
                .map(|(s, c)| {
                    let v: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                    format!("{} ; {c}", v.join(","))
                })
                .collect::<Vec<_>>()
                .join(" | ")
        };
        let _ = writeln!(
            text,
            "{:>5}  {:<34} {}",
            format!("{},{}", r.pair[0], r.pair[1]),
            show(&got),
            if ok { "ok" } else { "differs" }
        );
    }
    let _ = writeln!(text, "{}", if pass { "MATCH" } else { "MISMATCH" });
    Ok(TableReport { text, pass })
}

pub fn reproduce_table(which: &str) -> Result<TableReport> {
    match which {
        "m33_vectors" => vectors_table(33, &M33_VECTORS),
        "m33_completions" => completions_table(),
        "m17_vectors" => vectors_table(17, &M17_VECTORS),
        "m21_vectors" => vectors_table(21, &M21_VECTORS),
        _ => Err(Error::UnknownTable(which.to_string())),
    }
}
