//! Freely reduced words over `{h_{p_k}^{±1}}` and the limit-point tests at `∞`.
//!
//! Words are enumerated in length-lexicographic order. Letters are ordered by
//! sequence position and then sign, positive first, so the enumeration and
//! every argmax witness are reproducible.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::{MoebiusMap, UpperHalfPoint};
use crate::report::{Cell, Table};
use crate::schottky::{make_generator, IndexSequence, SurfaceParameter};
use crate::tolerances;

/// `h_{p_k}` or its inverse, addressed by its 1-based sequence position `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter {
    position: u32,
    inverse: bool,
}

impl Letter {
    pub fn new(position: u32, inverse: bool) -> Result<Self> {
        if position == 0 {
            return Err(Error::InvalidParameter("letter positions start at 1".into()));
        }
        Ok(Self { position, inverse })
    }

    /// Letter with dense code `2(k−1) + [inverse]`.
    fn from_code(code: usize) -> Self {
        Self {
            position: (code / 2) as u32 + 1,
            inverse: code % 2 == 1,
        }
    }

    fn code(self) -> usize {
        2 * (self.position as usize - 1) + self.inverse as usize
    }

    pub fn position(&self) -> u32 {
        self.position
    }

    pub fn is_inverse(&self) -> bool {
        self.inverse
    }

    pub fn inverse(self) -> Self {
        Self {
            inverse: !self.inverse,
            ..self
        }
    }
}

/// The first `k` sequence generators and their inverses, evaluated for one δ.
#[derive(Debug, Clone)]
pub struct Alphabet {
    delta: SurfaceParameter,
    indices: Vec<u64>,
    // indexed by letter code
    maps: Vec<MoebiusMap>,
}

impl Alphabet {
    /// The generators `h_{p_1}, …, h_{p_size}`.
    pub fn new(sequence: &IndexSequence, size: usize) -> Result<Self> {
        if size > sequence.len() {
            return Err(Error::InvalidParameter(format!(
                "alphabet of {size} generators exceeds the {} computed indices",
                sequence.len()
            )));
        }
        Self::from_indices(sequence.delta(), &sequence.entries()[..size])
    }

    /// Generators with arbitrary distinct indices, in the given order.
    pub fn from_indices(delta: &SurfaceParameter, indices: &[u64]) -> Result<Self> {
        let mut maps = Vec::with_capacity(2 * indices.len());
        for &n in indices {
            let h = make_generator(n, delta)?.to_map();
            maps.push(h);
            maps.push(h.inverse());
        }
        Ok(Self {
            delta: *delta,
            indices: indices.to_vec(),
            maps,
        })
    }

    pub fn delta(&self) -> &SurfaceParameter {
        &self.delta
    }

    /// Number of generators `k`; there are `2k` letters.
    pub fn size(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    /// Generator index `p_k` of a letter.
    pub fn index_of(&self, letter: Letter) -> u64 {
        self.indices[letter.position as usize - 1]
    }

    pub fn map(&self, letter: Letter) -> &MoebiusMap {
        &self.maps[letter.code()]
    }

    /// All `2k` letters in enumeration order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.maps.len()).map(Letter::from_code)
    }

    /// `h2*h5^-1` style label with generator indices.
    pub fn render(&self, word: &ReducedWord) -> String {
        if word.is_empty() {
            return "id".to_owned();
        }
        word.letters
            .iter()
            .map(|&l| {
                let p = self.index_of(l);
                if l.inverse {
                    format!("h{p}^-1")
                } else {
                    format!("h{p}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    fn check(&self, letter: Letter) -> Result<()> {
        if letter.position as usize > self.size() {
            return Err(Error::InvalidParameter(format!(
                "letter position {} outside an alphabet of {} generators",
                letter.position,
                self.size()
            )));
        }
        Ok(())
    }
}

/// A freely reduced word `γ = ℓ_1 ℓ_2 ⋯ ℓ_n` with its matrix
/// `ℓ_1 ∘ ℓ_2 ∘ ⋯ ∘ ℓ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedWord {
    letters: Vec<Letter>,
    matrix: MoebiusMap,
}

impl ReducedWord {
    pub fn identity() -> Self {
        Self {
            letters: Vec::new(),
            matrix: MoebiusMap::IDENTITY,
        }
    }

    /// Freely reduces `letters` and evaluates the result.
    pub fn reduce(alphabet: &Alphabet, letters: &[Letter]) -> Result<Self> {
        let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
        for &l in letters {
            alphabet.check(l)?;
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        let matrix = evaluate(alphabet, &out);
        Ok(Self {
            letters: out,
            matrix,
        })
    }

    /// `self · other`, freely reduced.
    pub fn concat(&self, other: &Self, alphabet: &Alphabet) -> Result<Self> {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self::reduce(alphabet, &letters)
    }

    pub fn inverse(&self, alphabet: &Alphabet) -> Self {
        let letters: Vec<Letter> = self.letters.iter().rev().map(|l| l.inverse()).collect();
        let matrix = evaluate(alphabet, &letters);
        Self { letters, matrix }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn matrix(&self) -> &MoebiusMap {
        &self.matrix
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[1] != w[0].inverse())
    }

    /// `Im(γ(i))`
    pub fn height(&self) -> f64 {
        self.matrix.apply(UpperHalfPoint::I).y()
    }

    /// `||trace| − 2|`; zero exactly for parabolic words.
    pub fn parabolic_defect(&self) -> f64 {
        (self.matrix.trace().abs() - 2.0).abs()
    }
}

impl fmt::Display for ReducedWord {
    /// Position-based label, `g1*g2^-1`; use [`Alphabet::render`] for indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("id");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "g{}", l.position)?;
            if l.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

fn evaluate(alphabet: &Alphabet, letters: &[Letter]) -> MoebiusMap {
    letters
        .iter()
        .fold(MoebiusMap::IDENTITY, |m, &l| m.compose(alphabet.map(l)))
}

/// Upper bound on the number of words an enumeration may produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WordBudget {
    pub max_words: u64,
}

impl Default for WordBudget {
    fn default() -> Self {
        Self {
            max_words: 50_000_000,
        }
    }
}

/// `Σ_{L=1}^{max_length} 2k(2k−1)^{L−1}`, or `None` on overflow.
pub fn reduced_word_count(k: u64, max_length: u32) -> Option<u64> {
    if k == 0 {
        return Some(0);
    }
    let mut level = 2 * k;
    let mut total: u64 = 0;
    for length in 1..=max_length {
        total = total.checked_add(level)?;
        if length < max_length {
            level = level.checked_mul(2 * k - 1)?;
        }
    }
    Some(total)
}

/// Every reduced word of length `1..=max_length`, length-lexicographically.
pub fn enumerate_reduced_words<'a>(
    alphabet: &'a Alphabet,
    max_length: usize,
    budget: &WordBudget,
) -> Result<WordStream<'a>> {
    if alphabet.size() == 0 || max_length == 0 {
        return Err(Error::InvalidParameter(
            "word enumeration needs alphabet_size ≥ 1 and max_length ≥ 1".into(),
        ));
    }
    let count = reduced_word_count(alphabet.size() as u64, max_length as u32);
    match count {
        Some(n) if n <= budget.max_words => {}
        _ => {
            return Err(Error::CapacityExceeded(format!(
                "{} reduced words of length ≤ {max_length} over {} generators exceed the budget of {}",
                count.map_or_else(|| "more than 2^64".to_owned(), |n| n.to_string()),
                alphabet.size(),
                budget.max_words
            )))
        }
    }
    Ok(WordStream::new(alphabet, max_length, None))
}

/// Lazy length-lexicographic enumeration with cached prefix products.
pub struct WordStream<'a> {
    alphabet: &'a Alphabet,
    max_length: usize,
    first: Option<Letter>,
    // letter codes of the current word
    codes: Vec<usize>,
    // prefixes[j] = ℓ_1 ∘ ⋯ ∘ ℓ_{j+1}
    prefixes: Vec<MoebiusMap>,
    started: bool,
}

impl<'a> WordStream<'a> {
    fn new(alphabet: &'a Alphabet, max_length: usize, first: Option<Letter>) -> Self {
        Self {
            alphabet,
            max_length,
            first,
            codes: Vec::new(),
            prefixes: Vec::new(),
            started: false,
        }
    }

    /// Restricts the stream to words beginning with `first`; the partitions
    /// over all letters cover the full stream exactly once.
    pub fn starting_with(mut self, first: Letter) -> Self {
        self.first = Some(first);
        self
    }

    fn letters(&self) -> usize {
        2 * self.alphabet.size()
    }

    fn first_code(&self) -> usize {
        self.first.map_or(0, Letter::code)
    }

    /// Smallest admissible code `≥ from` after `prev`.
    fn next_admissible(&self, prev: Option<usize>, from: usize) -> Option<usize> {
        (from..self.letters()).find(|&c| prev != Some(c ^ 1))
    }

    fn rebuild_from(&mut self, j: usize) {
        self.prefixes.truncate(j);
        for k in j..self.codes.len() {
            let m = self.alphabet.maps[self.codes[k]];
            let next = match k {
                0 => m,
                _ => self.prefixes[k - 1].compose(&m),
            };
            self.prefixes.push(next);
        }
    }

    /// Smallest word of the given length, or `false` if there is none.
    fn reset_to_length(&mut self, length: usize) -> bool {
        if length > self.max_length {
            return false;
        }
        self.codes.clear();
        self.codes.push(self.first_code());
        while self.codes.len() < length {
            let prev = *self.codes.last().expect("non-empty");
            let c = self.next_admissible(Some(prev), 0).expect("2k ≥ 2 letters");
            self.codes.push(c);
        }
        self.rebuild_from(0);
        true
    }

    /// Odometer step within the current length.
    fn advance(&mut self) -> bool {
        let min_pos = usize::from(self.first.is_some());
        let mut j = self.codes.len();
        while j > min_pos {
            j -= 1;
            let prev = if j == 0 { None } else { Some(self.codes[j - 1]) };
            if let Some(c) = self.next_admissible(prev, self.codes[j] + 1) {
                self.codes[j] = c;
                for k in j + 1..self.codes.len() {
                    self.codes[k] = self
                        .next_admissible(Some(self.codes[k - 1]), 0)
                        .expect("2k ≥ 2 letters");
                }
                self.rebuild_from(j);
                return true;
            }
        }
        false
    }
}

impl Iterator for WordStream<'_> {
    type Item = ReducedWord;

    fn next(&mut self) -> Option<ReducedWord> {
        let ok = if !self.started {
            self.started = true;
            self.reset_to_length(1)
        } else {
            self.advance() || self.reset_to_length(self.codes.len() + 1)
        };
        if !ok {
            return None;
        }
        Some(ReducedWord {
            letters: self.codes.iter().map(|&c| Letter::from_code(c)).collect(),
            matrix: *self.prefixes.last().expect("non-empty word"),
        })
    }
}

/// Folds every reduced word in parallel, one partition per first letter.
/// Partition results are combined in letter order, so the result does not
/// depend on scheduling.
pub fn par_fold_words<T, F, R>(
    alphabet: &Alphabet,
    max_length: usize,
    budget: &WordBudget,
    init: T,
    fold: F,
    reduce: R,
) -> Result<T>
where
    T: Clone + Send + Sync,
    F: Fn(T, &ReducedWord) -> T + Sync,
    R: Fn(T, T) -> T,
{
    // validates the budget
    enumerate_reduced_words(alphabet, max_length, budget)?;
    let letters: Vec<Letter> = alphabet.letters().collect();
    let parts: Vec<T> = letters
        .par_iter()
        .map(|&first| {
            WordStream::new(alphabet, max_length, Some(first))
                .fold(init.clone(), |acc, w| fold(acc, &w))
        })
        .collect();
    Ok(parts.into_iter().fold(init, reduce))
}

/// Largest `Im(γ(i))` over the words with the first word attaining it;
/// `0` and `None` for an empty stream.
pub fn max_height<I: IntoIterator<Item = ReducedWord>>(words: I) -> (f64, Option<ReducedWord>) {
    words.into_iter().fold((0.0, None), |(best, arg), w| {
        let h = w.height();
        if h > best {
            (h, Some(w))
        } else {
            (best, arg)
        }
    })
}

/// `Im(h_{p_k}⁻¹(i)) = 1/(a² + c²)` for each index of the sequence.
pub fn generator_height_sequence(indices: &IndexSequence) -> Vec<f64> {
    indices
        .entries()
        .iter()
        .map(|&p| {
            let g = make_generator(p, indices.delta()).expect("sequence indices are ≥ 1");
            1.0 / (g.a * g.a + g.c * g.c)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Horocyclic,
    Discrete,
    Parabolic,
    Irregular,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Horocyclic => "horocyclic",
            Verdict::Discrete => "discrete",
            Verdict::Parabolic => "parabolic",
            Verdict::Irregular => "irregular",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Outcome of the three negative tests at `∞`, with their evidence.
///
/// Truncated evidence can rule classes out but never establish horocyclic
/// or discrete behaviour, so those two verdicts are not produced here.
#[derive(Debug, Clone, Serialize)]
pub struct LimitPointClassification {
    pub verdict: Verdict,
    /// `sup Im(γ(i))` over the enumerated words.
    pub max_height: f64,
    pub max_height_word: Option<String>,
    /// `Im(h_{p_k}⁻¹(i))` for the first `generator_count` indices.
    pub generator_heights: Vec<f64>,
    /// `min ||trace| − 2|` over the enumerated words.
    pub min_parabolic_defect: f64,
    pub min_parabolic_word: Option<String>,
    pub not_horocyclic: bool,
    pub not_discrete: bool,
    pub not_parabolic: bool,
    pub alphabet_size: usize,
    pub max_length: usize,
    pub generator_count: usize,
    pub word_count: u64,
}

#[derive(Clone)]
struct Scan {
    count: u64,
    height: (f64, Option<ReducedWord>),
    defect: (f64, Option<ReducedWord>),
}

impl Scan {
    fn empty() -> Self {
        Self {
            count: 0,
            height: (0.0, None),
            defect: (f64::INFINITY, None),
        }
    }

    fn push(mut self, w: &ReducedWord) -> Self {
        self.count += 1;
        let h = w.height();
        if h > self.height.0 {
            self.height = (h, Some(w.clone()));
        }
        let d = w.parabolic_defect();
        if d < self.defect.0 {
            self.defect = (d, Some(w.clone()));
        }
        self
    }

    // left operand wins ties: earlier partitions come first
    fn merge(self, other: Self) -> Self {
        Self {
            count: self.count + other.count,
            height: if other.height.0 > self.height.0 { other.height } else { self.height },
            defect: if other.defect.0 < self.defect.0 { other.defect } else { self.defect },
        }
    }
}

/// Runs the horocyclic, discrete and parabolic exclusion tests at `∞`.
///
/// `alphabet_size` generators are used for words of length `≤ max_length`
/// and `generator_count` sequence indices for the height sequence.
pub fn classify_infinity(
    delta: &SurfaceParameter,
    alphabet_size: usize,
    max_length: usize,
    generator_count: usize,
    budget: &WordBudget,
) -> Result<LimitPointClassification> {
    let mut out = LimitPointClassification {
        verdict: Verdict::Inconclusive,
        max_height: 0.0,
        max_height_word: None,
        generator_heights: Vec::new(),
        min_parabolic_defect: f64::INFINITY,
        min_parabolic_word: None,
        not_horocyclic: false,
        not_discrete: false,
        not_parabolic: false,
        alphabet_size,
        max_length,
        generator_count,
        word_count: 0,
    };
    if alphabet_size == 0 || max_length == 0 || generator_count < 2 {
        return Ok(out);
    }
    let sequence = crate::schottky::index_sequence(delta, generator_count.max(alphabet_size))?;
    let alphabet = Alphabet::new(&sequence, alphabet_size)?;
    let scan = par_fold_words(&alphabet, max_length, budget, Scan::empty(), Scan::push, Scan::merge)?;

    out.word_count = scan.count;
    out.max_height = scan.height.0;
    out.max_height_word = scan.height.1.as_ref().map(|w| alphabet.render(w));
    out.min_parabolic_defect = scan.defect.0;
    out.min_parabolic_word = scan.defect.1.as_ref().map(|w| alphabet.render(w));
    out.generator_heights = generator_height_sequence(&sequence.truncated(generator_count));

    let heights = &out.generator_heights;
    let last = *heights.last().expect("generator_count ≥ 2");
    let non_constant = heights.windows(2).any(|w| w[0] != w[1]);
    out.not_horocyclic = out.max_height <= 1.0 + tolerances::HEIGHT_SLACK;
    out.not_discrete = non_constant && last > 0.0;
    out.not_parabolic = out.min_parabolic_defect > tolerances::PARABOLIC_TRACE;
    out.verdict = if !out.not_parabolic {
        Verdict::Parabolic
    } else if out.not_horocyclic && out.not_discrete {
        Verdict::Irregular
    } else {
        Verdict::Inconclusive
    };
    Ok(out)
}

/// Spools words as CSV rows `word,trace,height,length`.
pub fn write_words_csv<W: Write, I>(alphabet: &Alphabet, words: I, writer: W) -> Result<()>
where
    I: IntoIterator<Item = ReducedWord>,
{
    let mut table = Table::new("words", &["word", "trace", "height", "length"]);
    for w in words {
        table.push(vec![
            Cell::from(alphabet.render(&w)),
            Cell::from(w.matrix().trace()),
            Cell::from(w.height()),
            Cell::from(w.len()),
        ]);
    }
    table.write_csv(writer)
}
