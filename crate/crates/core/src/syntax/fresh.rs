use super::ast::Declaration;

/// Names `base_1..base_n`, or with one, two, three primes on `base` when
/// the plain family clashes with a declared name.
pub fn fresh_family(base: &str, n: usize, decls: &[Declaration]) -> Option<Vec<String>> {
    (0..4).find_map(|primes| {
        let stem = format!("{base}{}", "'".repeat(primes));
        let names: Vec<String> = (1..=n).map(|i| format!("{stem}_{i}")).collect();
        let clash = names.iter().any(|f| decls.iter().any(|d| &d.name == f));
        (!clash).then_some(names)
    })
}
