use std::collections::BTreeSet;
use std::fmt::Write;

/// The internal action.
pub const TAU: &str = "tau";

/// Finite labelled transition system. Success states matter only when the
/// system is used as a test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub init: usize,
    /// Sorted and without duplicates.
    pub transitions: Vec<(usize, String, usize)>,
    pub success: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct LtsError {
    pub line: usize,
    pub message: String,
}

impl Lts {
    pub fn new(states: Vec<String>, alphabet: Vec<String>, init: usize) -> Self {
        Lts {
            states,
            alphabet,
            init,
            transitions: Vec::new(),
            success: BTreeSet::new(),
        }
    }

    /// States named `s0 .. s{n-1}`.
    pub fn with_size(n: usize, alphabet: &[&str]) -> Self {
        Lts::new(
            (0..n).map(|k| format!("s{k}")).collect(),
            alphabet.iter().map(|a| a.to_string()).collect(),
            0,
        )
    }

    pub fn add(&mut self, from: usize, label: &str, to: usize) {
        let t = (from, label.to_string(), to);
        if let Err(pos) = self.transitions.binary_search(&t) {
            self.transitions.insert(pos, t);
        }
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn succ(&self, s: usize) -> impl Iterator<Item = (&str, usize)> {
        let start = self.transitions.partition_point(|t| t.0 < s);
        self.transitions[start..]
            .iter()
            .take_while(move |t| t.0 == s)
            .map(|t| (t.1.as_str(), t.2))
    }

    pub fn succ_on<'a>(&'a self, s: usize, label: &'a str) -> impl Iterator<Item = usize> + 'a {
        self.succ(s)
            .filter(move |(l, _)| *l == label)
            .map(|(_, t)| t)
    }

    pub fn is_stable(&self, s: usize) -> bool {
        self.succ_on(s, TAU).next().is_none()
    }

    /// Visible actions enabled in `s`.
    pub fn initials(&self, s: usize) -> BTreeSet<&str> {
        self.succ(s).map(|(l, _)| l).filter(|l| *l != TAU).collect()
    }

    /// No internal moves and at most one successor per label.
    pub fn is_deterministic(&self) -> bool {
        self.transitions
            .windows(2)
            .all(|w| (w[0].0, &w[0].1) != (w[1].0, &w[1].1))
            && self.transitions.iter().all(|t| t.1 != TAU)
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut stack = vec![self.init];
        seen[self.init] = true;
        while let Some(s) = stack.pop() {
            for (_, t) in self.succ(s) {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// A reachable cycle of internal moves, if any.
    pub fn tau_cycle(&self) -> Option<Vec<usize>> {
        let reach = self.reachable();
        // 0 unvisited, 1 on stack, 2 done
        let mut color = vec![0u8; self.states.len()];
        for root in (0..self.states.len()).filter(|&s| reach[s]) {
            if color[root] != 0 {
                continue;
            }
            let mut path = vec![root];
            let mut iters: Vec<Vec<usize>> = vec![self.succ_on(root, TAU).collect()];
            color[root] = 1;
            while let Some(it) = iters.last_mut() {
                match it.pop() {
                    Some(t) if color[t] == 1 => {
                        let k = path.iter().position(|&s| s == t).expect("on stack");
                        return Some(path[k..].to_vec());
                    }
                    Some(t) if color[t] == 0 => {
                        color[t] = 1;
                        path.push(t);
                        iters.push(self.succ_on(t, TAU).collect());
                    }
                    Some(_) => {}
                    None => {
                        color[path.pop().expect("nonempty")] = 2;
                        iters.pop();
                    }
                }
            }
        }
        None
    }
}

/// Reads `alphabet`, `states`, `init`, `trans` and `success` lines. `states`
/// takes either names or a single count (names `s0 ..`). `#` starts a
/// comment.
pub fn parse_lts(text: &str) -> Result<Lts, LtsError> {
    let err = |line: usize, m: String| LtsError { line, message: m };
    let mut alphabet: Option<Vec<String>> = None;
    let mut lts: Option<Lts> = None;
    let mut init: Option<usize> = None;
    let mut last = 0;
    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        last = ln;
        let line = raw.split('#').next().unwrap_or("").trim();
        let words: Vec<&str> = line.split_whitespace().collect();
        let Some((&kw, args)) = words.split_first() else {
            continue;
        };
        match kw {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(err(ln, "duplicate alphabet".into()));
                }
                if args.contains(&TAU) {
                    return Err(err(ln, format!("`{TAU}` is reserved")));
                }
                alphabet = Some(args.iter().map(|a| a.to_string()).collect());
            }
            "states" => {
                if lts.is_some() {
                    return Err(err(ln, "duplicate states".into()));
                }
                let names: Vec<String> = match args {
                    [n] if n.parse::<usize>().is_ok() => (0..n.parse::<usize>().unwrap())
                        .map(|k| format!("s{k}"))
                        .collect(),
                    _ => args.iter().map(|a| a.to_string()).collect(),
                };
                if names.is_empty() {
                    return Err(err(ln, "no states".into()));
                }
                let unique: BTreeSet<&String> = names.iter().collect();
                if unique.len() != names.len() {
                    return Err(err(ln, "duplicate state name".into()));
                }
                lts = Some(Lts::new(names, Vec::new(), 0));
            }
            "init" | "trans" | "success" => {
                let l = lts
                    .as_mut()
                    .ok_or_else(|| err(ln, "`states` must come first".into()))?;
                let state = |name: &str| {
                    l.state(name)
                        .ok_or_else(|| err(ln, format!("unknown state `{name}`")))
                };
                match (kw, args) {
                    ("init", [s]) => {
                        if init.replace(state(s)?).is_some() {
                            return Err(err(ln, "duplicate init".into()));
                        }
                    }
                    ("trans", [s, a, t]) => {
                        let alpha = alphabet
                            .as_ref()
                            .ok_or_else(|| err(ln, "`alphabet` must come first".into()))?;
                        if *a != TAU && !alpha.iter().any(|x| x == a) {
                            return Err(err(ln, format!("label `{a}` not in the alphabet")));
                        }
                        let (s, t) = (state(s)?, state(t)?);
                        l.add(s, a, t);
                    }
                    ("success", names) if !names.is_empty() => {
                        let ids = names
                            .iter()
                            .map(|n| state(n))
                            .collect::<Result<Vec<_>, _>>()?;
                        l.success.extend(ids);
                    }
                    _ => return Err(err(ln, format!("wrong number of arguments to `{kw}`"))),
                }
            }
            other => return Err(err(ln, format!("unknown directive `{other}`"))),
        }
    }
    let mut l = lts.ok_or_else(|| err(last, "missing `states`".into()))?;
    l.alphabet = alphabet.ok_or_else(|| err(last, "missing `alphabet`".into()))?;
    l.init = init.ok_or_else(|| err(last, "missing `init`".into()))?;
    Ok(l)
}

pub fn render_lts(l: &Lts) -> String {
    let mut out = String::new();
    writeln!(out, "alphabet {}", l.alphabet.join(" ")).unwrap();
    writeln!(out, "states {}", l.states.join(" ")).unwrap();
    writeln!(out, "init {}", l.states[l.init]).unwrap();
    for (s, a, t) in &l.transitions {
        writeln!(out, "trans {} {a} {}", l.states[*s], l.states[*t]).unwrap();
    }
    if !l.success.is_empty() {
        let names: Vec<&str> = l.success.iter().map(|&s| l.states[s].as_str()).collect();
        writeln!(out, "success {}", names.join(" ")).unwrap();
    }
    out
}
