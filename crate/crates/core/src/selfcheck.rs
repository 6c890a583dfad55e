//! Exhaustive checks of the arithmetic and of the code ensemble, suitable
//! for running on a fresh build.

use std::fmt;

use rand::Rng;

use crate::code::ensemble::enumerate_ensemble;
use crate::field::{Element, Field};
use crate::prob::stream_rng;

/// Fields of at most this order are checked on every triple.
pub const EXHAUSTIVE_ORDER: usize = 16;

/// Random triples checked in larger fields.
pub const RANDOM_TRIPLES: usize = 20_000;

/// `(|F|, k, n)` of the enumerated ensembles.
pub const ENSEMBLE_CASES: [(u32, usize, usize); 3] = [(2, 1, 2), (2, 2, 2), (3, 1, 2)];

/// How to build a field: characteristic, degree and optional modulus
/// (coefficients from degree 0 upward).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub characteristic: u32,
    pub degree: u32,
    pub modulus: Option<Vec<u32>>,
}

impl FieldSpec {
    pub fn new(characteristic: u32, degree: u32) -> Self {
        FieldSpec { characteristic, degree, modulus: None }
    }

    pub fn build(&self) -> Result<Field, crate::field::FieldError> {
        Field::new(self.characteristic, self.degree, self.modulus.as_deref())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 1 {
            write!(f, "GF({})", self.characteristic)?;
        } else {
            write!(f, "GF({}^{})", self.characteristic, self.degree)?;
        }
        if let Some(m) = &self.modulus {
            write!(f, " mod {m:?}")?;
        }
        Ok(())
    }
}

/// GF(2), GF(3), GF(4), GF(5) and GF(8) with their default moduli.
pub fn default_fields() -> Vec<FieldSpec> {
    vec![FieldSpec::new(2, 1), FieldSpec::new(3, 1), FieldSpec::new(2, 2), FieldSpec::new(5, 1), FieldSpec::new(2, 3)]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: u64,
    pub total: u64,
    /// The first failing case, when there is one.
    pub counterexample: Option<String>,
}

impl SuiteOutcome {
    pub fn ok(&self) -> bool {
        self.counterexample.is_none() && self.passed == self.total
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SelfCheckReport {
    pub suites: Vec<SuiteOutcome>,
    pub warnings: Vec<String>,
}

impl SelfCheckReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteOutcome::ok)
    }
}

struct Tally {
    name: String,
    passed: u64,
    total: u64,
    counterexample: Option<String>,
}

impl Tally {
    fn new(name: String) -> Self {
        Tally { name, passed: 0, total: 0, counterexample: None }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else if self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
    }

    fn finish(self) -> SuiteOutcome {
        SuiteOutcome { name: self.name, passed: self.passed, total: self.total, counterexample: self.counterexample }
    }
}

fn violated_axiom(f: &Field, a: Element, b: Element, c: Element) -> Option<&'static str> {
    let checks: [(&'static str, bool); 9] = [
        ("commutative addition", f.add(a, b) == f.add(b, a)),
        ("commutative multiplication", f.mul(a, b) == f.mul(b, a)),
        ("associative addition", f.add(f.add(a, b), c) == f.add(a, f.add(b, c))),
        ("associative multiplication", f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))),
        ("distributivity", f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))),
        ("additive identity", f.add(a, Element::ZERO) == a),
        ("multiplicative identity", f.mul(a, Element::ONE) == a),
        ("additive inverse", f.add(a, f.neg(a)) == Element::ZERO),
        ("multiplicative inverse", a.is_zero() || f.inv(a).map(|i| f.mul(a, i)) == Ok(Element::ONE)),
    ];
    checks.into_iter().find(|(_, ok)| !ok).map(|(name, _)| name)
}

/// Field axioms on every triple of a small field, or on random triples of a larger one.
pub fn check_axioms(field: &Field, seed: u64) -> SuiteOutcome {
    let mut t = Tally::new(format!("axioms {field}"));
    let mut visit = |a: Element, b: Element, c: Element| {
        let bad = violated_axiom(field, a, b, c);
        t.record(bad.is_none(), || format!("{field}: a={a}, b={b}, c={c} violates {}", bad.unwrap_or("")));
    };
    if field.order() <= EXHAUSTIVE_ORDER {
        for a in field.elements() {
            for b in field.elements() {
                for c in field.elements() {
                    visit(a, b, c);
                }
            }
        }
    } else {
        let mut rng = stream_rng(seed, &[field.order() as u64]);
        let q = field.order() as u32;
        let mut draw = || field.element(rng.gen_range(0..q)).expect("in range");
        for _ in 0..RANDOM_TRIPLES {
            let (a, b, c) = (draw(), draw(), draw());
            visit(a, b, c);
        }
    }
    t.finish()
}

/// `a ⊕ x = b` has exactly one solution for every `(a, b)`, and `c ⊙ y = d`
/// has exactly one for every `c ≠ 0`. Together these make `x ↦ a ⊕ x` and
/// `y ↦ c ⊙ y` bijections of the field.
pub fn check_unique_solutions(field: &Field) -> SuiteOutcome {
    let mut t = Tally::new(format!("unique solutions {field}"));
    for a in field.elements() {
        for b in field.elements() {
            let n = field.elements().filter(|&x| field.add(a, x) == b).count();
            t.record(n == 1, || format!("{field}: {a} + x = {b} has {n} solutions"));
        }
    }
    for c in field.nonzero_elements() {
        for d in field.elements() {
            let n = field.elements().filter(|&y| field.mul(c, y) == d).count();
            t.record(n == 1, || format!("{field}: {c} * y = {d} has {n} solutions"));
        }
    }
    t.finish()
}

/// Uniform codewords and pairwise independence over the whole `(G, q)` ensemble.
pub fn check_ensemble(field: &Field, k: usize, n: usize) -> SuiteOutcome {
    let mut t = Tally::new(format!("ensemble {field} k={k} n={n}"));
    match enumerate_ensemble(field, k, n) {
        Ok(report) => {
            let marginal = report.marginal_counterexample();
            t.record(report.is_uniform(), || match marginal {
                Some((s, x, c)) => format!("message {s} reaches codeword {x} in {c} of {} codes", report.assignments),
                None => "codeword distribution is not uniform".to_string(),
            });
            t.record(report.is_pairwise_independent(), || format!("joint probability {:?}", report.joint()));
        }
        Err(e) => t.record(false, || e.to_string()),
    }
    t.finish()
}

/// Builds every field in `fields` and runs the axiom and unique-solution
/// suites on it, then the ensemble suites whose field order is among them.
/// A field that fails to build is a failed suite carrying the error.
pub fn run_selfcheck(fields: &[FieldSpec], seed: u64) -> SelfCheckReport {
    let mut report = SelfCheckReport::default();
    if fields.is_empty() {
        report.warnings.push("no fields to check; nothing was run".to_string());
        return report;
    }
    let mut built: Vec<Field> = Vec::new();
    for spec in fields {
        match spec.build() {
            Ok(f) => {
                report.suites.push(check_axioms(&f, seed));
                report.suites.push(check_unique_solutions(&f));
                built.push(f);
            }
            Err(e) => report.suites.push(SuiteOutcome {
                name: format!("construct {spec}"),
                passed: 0,
                total: 1,
                counterexample: Some(e.to_string()),
            }),
        }
    }
    for (q, k, n) in ENSEMBLE_CASES {
        if let Some(f) = built.iter().find(|f| f.order() == q as usize && f.degree() == 1) {
            report.suites.push(check_ensemble(f, k, n));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_fields_pass() {
        let report = run_selfcheck(&default_fields(), 0);
        assert!(report.passed(), "{report:?}");
        // Two suites per field plus three ensembles.
        assert_eq!(report.suites.len(), 13);
        let gf8 = report.suites.iter().find(|s| s.name == "axioms GF(2^3)").unwrap();
        assert_eq!(gf8.total, 512);
    }

    #[test]
    fn faulty_modulus_names_a_factor() {
        let bad = FieldSpec { characteristic: 2, degree: 2, modulus: Some(vec![1, 0, 1]) };
        let report = run_selfcheck(&[bad], 0);
        assert!(!report.passed());
        let msg = report.suites[0].counterexample.as_deref().unwrap();
        assert!(msg.contains("factor [1, 1]"), "{msg}");
    }

    #[test]
    fn empty_list_is_vacuous() {
        let report = run_selfcheck(&[], 0);
        assert!(report.passed() && report.suites.is_empty());
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn large_fields_are_sampled() {
        let f = Field::new(2, 5, None).unwrap();
        let s = check_axioms(&f, 3);
        assert!(s.ok());
        assert_eq!(s.total, RANDOM_TRIPLES as u64);
    }
}
