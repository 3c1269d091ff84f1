//! Diagram rendering: an ascii layout and a Graphviz digraph.
//!
//! The ascii form draws the pool under a horizontal line, one `*` per
//! ogroup below it, and one arc glyph (`/`, `|` or `\`) per group
//! membership.  Arc routing is straight-line nearest-column; colliding
//! glyphs shift right.  The exact glyph placement is a convention of this
//! renderer, chosen for determinism.

use crate::cirquent::Cirquent;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Ascii,
    Dot,
}

pub fn render(c: &Cirquent, format: Format) -> String {
    match format {
        Format::Ascii => ascii(c),
        Format::Dot => dot(c),
    }
}

/// Place `ch` at `col`, shifting right past occupied cells.
fn place(row: &mut Vec<char>, col: usize, ch: char) {
    let mut col = col;
    while col < row.len() && row[col] != ' ' {
        col += 1;
    }
    if col >= row.len() {
        row.resize(col + 1, ' ');
    }
    row[col] = ch;
}

fn ascii(c: &Cirquent) -> String {
    if c.pool().is_empty() && c.structure().is_empty() {
        return "----\n".to_string();
    }
    let texts: Vec<String> = c.pool().iter().map(ToString::to_string).collect();
    let mut centers = Vec::new();
    let mut formula_row = String::new();
    for (k, t) in texts.iter().enumerate() {
        if k > 0 {
            formula_row.push_str("   ");
        }
        centers.push(formula_row.chars().count() + t.chars().count() / 2);
        formula_row.push_str(t);
    }
    let width = formula_row.chars().count().max(4);
    let mut arcs: Vec<char> = vec![' '; width];
    let mut markers: Vec<char> = vec![' '; width];
    for group in c.structure() {
        let members: Vec<usize> = group.members().collect();
        if members.is_empty() {
            // an empty ogroup is a bare marker with no arcs
            place(&mut markers, 0, '*');
            continue;
        }
        let hub = (centers[members[0] - 1] + centers[members[members.len() - 1] - 1]) / 2;
        place(&mut markers, hub, '*');
        for &m in &members {
            let col = centers[m - 1];
            let glyph = match col.cmp(&hub) {
                std::cmp::Ordering::Less => '\\',
                std::cmp::Ordering::Equal => '|',
                std::cmp::Ordering::Greater => '/',
            };
            place(&mut arcs, col, glyph);
        }
    }
    let mut out = String::new();
    out.push_str(&"-".repeat(width));
    out.push('\n');
    out.push_str(formula_row.trim_end());
    out.push('\n');
    if !c.structure().is_empty() {
        out.push_str(String::from_iter(arcs).trim_end());
        out.push('\n');
        out.push_str(String::from_iter(markers).trim_end());
        out.push('\n');
    }
    out
}

fn dot(c: &Cirquent) -> String {
    let mut out = String::from("digraph cirquent {\n");
    for (k, f) in c.pool().iter().enumerate() {
        out.push_str(&format!("  f{} [shape=box, label=\"{}\"];\n", k + 1, f));
    }
    for g in 1..=c.structure().len() {
        out.push_str(&format!("  g{g} [shape=point];\n"));
    }
    for (g, group) in c.structure().iter().enumerate() {
        for m in group.members() {
            out.push_str(&format!("  g{} -> f{};\n", g + 1, m));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cirquent::parse_cirquent;

    #[test]
    fn running_example_counts() {
        let c = parse_cirquent("[ F ; G ; H ; F ] {1} {2 3} {3 4}").unwrap();
        let art = ascii(&c);
        let lines: Vec<&str> = art.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].chars().all(|ch| ch == '-'));
        assert_eq!(lines[1].split_whitespace().count(), 4);
        let arcs = lines[2].chars().filter(|ch| "/|\\".contains(*ch)).count();
        assert_eq!(arcs, 5);
        assert_eq!(lines[3].matches('*').count(), 3);
    }

    #[test]
    fn empty_cirquent_is_a_bare_line() {
        let c = parse_cirquent("[]").unwrap();
        assert_eq!(ascii(&c), "----\n");
    }

    #[test]
    fn ascii_is_deterministic() {
        let c = parse_cirquent("[ !P | Q ; Q & Q ] {1 2} {1} {2}").unwrap();
        assert_eq!(ascii(&c), ascii(&c));
        let arcs: usize = ascii(&c)
            .lines()
            .nth(2)
            .unwrap()
            .chars()
            .filter(|ch| "/|\\".contains(*ch))
            .count();
        assert_eq!(arcs, 4);
    }

    #[test]
    fn dot_counts() {
        let c = parse_cirquent("[ F ; G ; H ; F ] {1} {2 3} {3 4}").unwrap();
        let d = dot(&c);
        assert_eq!(d.matches("shape=box").count(), 4);
        assert_eq!(d.matches("shape=point").count(), 3);
        assert_eq!(d.matches("->").count(), 5);
        assert!(d.starts_with("digraph") && d.trim_end().ends_with('}'));
    }
}
