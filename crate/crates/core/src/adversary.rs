//! Corruption strategies confined to what each adversary model lets them see.
//!
//! A strategy computes replacement answer rows as a deterministic function of
//! its own randomness stream and an [`AdversaryView`]; nothing else flows in.
//! The view carries the queries and clean answers of the visible servers
//! only: every server under the secret-channel model, the pre-selected
//! observation set under the untouched-server model. Hash points, committed
//! hash values, and unobserved answers never enter a view, so replaying a
//! strategy with the same stream and view reproduces the corruption
//! byte-for-byte no matter how the hidden data changed. The one deliberate
//! exception is [`Strategy::KnownPForgery`], which smuggles in leaked hash
//! material to demonstrate why the models forbid it; it is gated behind an
//! explicit ablation switch upstream.

use crate::field::{Field, FieldMatrix};
use crate::params::{Model, SchemeParams};
use crate::scheme::AnswerSet;
use rand::RngCore;
use serde::{Deserialize, Serialize};

/// Configuration-level strategy name, before any leaked material is attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StrategyKind {
    /// Corrupts nothing.
    Passive,
    /// Replaces each target row with uniform symbols.
    RandomOverwrite,
    /// Adds a fully nonzero noise row, so the corruption always lands.
    AdditiveNoise,
    /// Guesses the hash points and adds a difference row that the guessed
    /// points cannot see.
    HashGuess,
    /// Adds the fixed difference row with the maximum number of collision
    /// points, the worst conformant row-level attack.
    MaxRoots,
    /// Ablation only: forges rows using leaked hash material.
    KnownPForgery,
}

impl StrategyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Passive => "passive",
            StrategyKind::RandomOverwrite => "random-overwrite",
            StrategyKind::AdditiveNoise => "additive-noise",
            StrategyKind::HashGuess => "hash-guess",
            StrategyKind::MaxRoots => "max-roots",
            StrategyKind::KnownPForgery => "known-p-forgery",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "passive" => Some(StrategyKind::Passive),
            "random-overwrite" => Some(StrategyKind::RandomOverwrite),
            "additive-noise" => Some(StrategyKind::AdditiveNoise),
            "hash-guess" => Some(StrategyKind::HashGuess),
            "max-roots" => Some(StrategyKind::MaxRoots),
            "known-p-forgery" => Some(StrategyKind::KnownPForgery),
            _ => None,
        }
    }

    /// Whether the strategy only uses knowledge its model grants.
    pub fn is_model_conformant(&self) -> bool {
        !matches!(self, StrategyKind::KnownPForgery)
    }
}

/// Hash material the models keep away from the adversary, injected only for
/// the ablation strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownPLeak {
    pub points: Vec<u64>,
    /// Per-server hashes of the clean answer rows, `N x alpha`.
    pub row_hashes: FieldMatrix,
}

/// A runnable strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Passive,
    RandomOverwrite,
    AdditiveNoise,
    HashGuess,
    MaxRoots,
    KnownPForgery(KnownPLeak),
}

impl Strategy {
    pub fn kind(&self) -> StrategyKind {
        match self {
            Strategy::Passive => StrategyKind::Passive,
            Strategy::RandomOverwrite => StrategyKind::RandomOverwrite,
            Strategy::AdditiveNoise => StrategyKind::AdditiveNoise,
            Strategy::HashGuess => StrategyKind::HashGuess,
            Strategy::MaxRoots => StrategyKind::MaxRoots,
            Strategy::KnownPForgery(_) => StrategyKind::KnownPForgery,
        }
    }
}

/// Everything the adversary is allowed to look at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryView {
    visible: Vec<usize>,
    /// Query rows of the visible servers, in `visible` order.
    queries: FieldMatrix,
    /// Clean answer rows of the visible servers, in `visible` order.
    answers: FieldMatrix,
}

impl AdversaryView {
    pub fn new(visible: Vec<usize>, queries: FieldMatrix, answers: FieldMatrix) -> Self {
        assert!(queries.rows() == visible.len() && answers.rows() == visible.len());
        AdversaryView {
            visible,
            queries,
            answers,
        }
    }

    pub fn visible_servers(&self) -> &[usize] {
        &self.visible
    }

    pub fn answer_row(&self, server: usize) -> Option<&[u64]> {
        self.visible
            .iter()
            .position(|&s| s == server)
            .map(|i| self.answers.row(i))
    }

    pub fn query_row(&self, server: usize) -> Option<&[u64]> {
        self.visible
            .iter()
            .position(|&s| s == server)
            .map(|i| self.queries.row(i))
    }
}

/// The adversary's fixed choices for one run: its strategy and, under the
/// untouched-server model, the observation set it committed to before the
/// protocol started.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryState {
    pub strategy: Strategy,
    /// Servers whose traffic the adversary sees.
    pub observed: Vec<usize>,
}

impl AdversaryState {
    /// Fixes the observation set up front: all servers under the
    /// secret-channel model, a uniform size-`E` subset otherwise.
    pub fn new(params: &SchemeParams, strategy: Strategy, rng: &mut dyn RngCore) -> Self {
        let observed = match params.model() {
            Model::SecretChannel => (0..params.servers()).collect(),
            Model::Untouched { observed } => {
                uniform_subset(params.servers(), observed, rng)
            }
        };
        AdversaryState { strategy, observed }
    }

    /// Restricts full protocol traffic to the observed servers.
    pub fn build_view(&self, queries: &FieldMatrix, clean: &AnswerSet) -> AdversaryView {
        AdversaryView::new(
            self.observed.clone(),
            queries.select_rows(&self.observed),
            clean.answers.select_rows(&self.observed),
        )
    }

    /// Picks the corruption targets: a uniform subset of `B` servers.
    pub fn choose_targets(&self, params: &SchemeParams, rng: &mut dyn RngCore) -> Vec<usize> {
        uniform_subset(params.servers(), params.byzantine(), rng)
    }

    /// Produces the tainted answer set. Target rows are rewritten with values
    /// computed from the strategy's stream and the view alone; all other rows
    /// pass through untouched.
    pub fn corrupt(
        &self,
        params: &SchemeParams,
        view: &AdversaryView,
        clean: &AnswerSet,
        targets: &[usize],
        rng: &mut dyn RngCore,
    ) -> AnswerSet {
        let mut tainted = clean.clone();
        if matches!(self.strategy, Strategy::Passive) {
            return tainted;
        }
        let f = params.field();
        let width = params.total_instances();
        // Difference rows shared across targets are drawn once per run.
        let shared_delta = match &self.strategy {
            Strategy::HashGuess => {
                let guesses =
                    crate::hashing::sample_hash_points(f, params.hash_count().min(width - 1), rng);
                Some(poly_with_roots(f, &guesses, width))
            }
            Strategy::MaxRoots => Some(max_roots_delta(f, width)),
            _ => None,
        };
        for &s in targets {
            let replacement = match &self.strategy {
                Strategy::Passive => unreachable!(),
                Strategy::RandomOverwrite => uniform_row(f, width, rng),
                Strategy::AdditiveNoise => match view.answer_row(s) {
                    Some(row) => {
                        let mut out = row.to_vec();
                        for v in &mut out {
                            *v = f.add(*v, f.sample_nonzero(rng));
                        }
                        out
                    }
                    // An unobserved row cannot be shifted without seeing it;
                    // the best the adversary can do is write fresh symbols.
                    None => uniform_row(f, width, rng),
                },
                Strategy::HashGuess | Strategy::MaxRoots => {
                    let delta = shared_delta.as_ref().unwrap();
                    match view.answer_row(s) {
                        Some(row) => {
                            let mut out = row.to_vec();
                            for (v, &d) in out.iter_mut().zip(delta) {
                                *v = f.add(*v, d);
                            }
                            out
                        }
                        None => delta.clone(),
                    }
                }
                Strategy::KnownPForgery(leak) => {
                    let row = view
                        .answer_row(s)
                        .expect("the ablation strategy requires full visibility");
                    forge_row_with_known_points(f, row, &leak.points, leak.row_hashes.row(s), rng)
                }
            };
            tainted.answers.set_row(s, &replacement);
            tainted.corrupted[s] = true;
        }
        tainted
    }
}

fn uniform_row(f: Field, width: usize, rng: &mut dyn RngCore) -> Vec<u64> {
    (0..width).map(|_| f.sample(rng)).collect()
}

/// Uniform size-`k` subset of `0..n` by partial Fisher-Yates, returned
/// sorted.
pub fn uniform_subset(n: usize, k: usize, rng: &mut dyn RngCore) -> Vec<usize> {
    assert!(k <= n, "subset larger than ground set");
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let remaining = (n - i) as u64;
        let cutoff = u64::MAX - (u64::MAX % remaining + 1) % remaining;
        let j = loop {
            let x = rng.next_u64();
            if x <= cutoff || cutoff == u64::MAX {
                break i + (x % remaining) as usize;
            }
        };
        pool.swap(i, j);
    }
    let mut out = pool[..k].to_vec();
    out.sort_unstable();
    out
}

/// Coefficient row of `x * prod_j (x - roots[j])`, padded with zeros to
/// `width`; entry `i` multiplies `x^(i+1)`. Adding this row to an answer row
/// collides exactly at the listed roots.
pub fn poly_with_roots(f: Field, roots: &[u64], width: usize) -> Vec<u64> {
    assert!(roots.len() < width, "polynomial degree exceeds row width");
    let mut coeffs = vec![1u64];
    for &r in roots {
        let mut next = vec![0u64; coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] = f.add(next[i + 1], c);
            next[i] = f.sub(next[i], f.mul(c, r));
        }
        coeffs = next;
    }
    coeffs.resize(width, 0);
    coeffs
}

/// The fixed difference row with `width - 1` distinct nonzero collision
/// points `1..width-1`, the extremal case of the collision bound.
pub fn max_roots_delta(f: Field, width: usize) -> Vec<u64> {
    assert!(
        (width as u64) < f.modulus(),
        "row width must stay below the modulus"
    );
    let roots: Vec<u64> = (1..width as u64).collect();
    poly_with_roots(f, &roots, width)
}

/// Given the leaked hash points and a row's committed hashes, produces a
/// different row with the same hashes: perturb and resample the trailing
/// coordinates, then solve the leading coordinates against the committed
/// values. The system is Vandermonde-shaped on distinct nonzero points, so
/// it always has exactly one solution.
pub fn forge_row_with_known_points(
    f: Field,
    row: &[u64],
    points: &[u64],
    target_hashes: &[u64],
    rng: &mut dyn RngCore,
) -> Vec<u64> {
    let alpha = points.len();
    assert_eq!(target_hashes.len(), alpha, "one committed hash per point");
    assert!(row.len() > alpha, "forgery needs a free coordinate");
    assert!(points.iter().all(|&p| p != 0), "hash points are nonzero");
    let mut forged = row.to_vec();
    forged[alpha] = f.add(forged[alpha], f.sample_nonzero(rng));
    for v in forged.iter_mut().skip(alpha + 1) {
        *v = f.sample(rng);
    }
    let mut system = FieldMatrix::zeros(f, alpha, alpha);
    let mut rhs = FieldMatrix::zeros(f, alpha, 1);
    for (j, &p) in points.iter().enumerate() {
        let mut power = p;
        for i in 0..alpha {
            system.set(j, i, power);
            power = f.mul(power, p);
        }
        let mut rest = 0u64;
        for &v in &forged[alpha..] {
            rest = f.add(rest, f.mul(v, power));
            power = f.mul(power, p);
        }
        rhs.set(j, 0, f.sub(target_hashes[j], rest));
    }
    let solution = system
        .solve(&rhs)
        .expect("distinct nonzero points give an invertible system");
    for i in 0..alpha {
        forged[i] = solution.get(i, 0);
    }
    forged
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashing::{collision_points, hash_rows, single_point_miss_bound};
    use crate::params::SchemeSpec;
    use crate::scheme::{
        build_x_matrix, generate_answers, generate_queries, sample_masks, Dataset,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn run_setup(
        params: &SchemeParams,
        seed: u64,
    ) -> (FieldMatrix, AnswerSet) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ds = Dataset::random(params, &mut rng);
        let art = generate_queries(params, 0, &mut rng).unwrap();
        let masks = sample_masks(params, &mut rng);
        let payload = build_x_matrix(params, &ds, &art, &masks).unwrap();
        let answers = generate_answers(params, &payload);
        (art.queries, answers)
    }

    #[test]
    fn passive_leaves_answers_untouched() {
        let params = SchemeSpec::secret_channel(2, 3, 1, 1, 4, 1).build().unwrap();
        let (queries, clean) = run_setup(&params, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let state = AdversaryState::new(&params, Strategy::Passive, &mut rng);
        let view = state.build_view(&queries, &clean);
        let targets = state.choose_targets(&params, &mut rng);
        let tainted = state.corrupt(&params, &view, &clean, &targets, &mut rng);
        assert_eq!(tainted, clean);
        assert!(tainted.corrupted.iter().all(|&c| !c));
    }

    #[test]
    fn target_choice_is_uniform_over_servers() {
        let params = SchemeSpec::secret_channel(2, 3, 1, 1, 4, 1).build().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let state = AdversaryState::new(&params, Strategy::RandomOverwrite, &mut rng);
        let mut counts = [0u32; 3];
        let trials = 10_000;
        for _ in 0..trials {
            let t = state.choose_targets(&params, &mut rng);
            assert_eq!(t.len(), 1);
            counts[t[0]] += 1;
        }
        // Expected a third each; 3 sigma is about 141.
        for (s, &c) in counts.iter().enumerate() {
            assert!(
                (c as i64 - 3333).unsigned_abs() < 150,
                "server {s} chosen {c} times"
            );
        }
    }

    #[test]
    fn subset_choice_covers_all_pairs_uniformly() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut counts: HashMap<Vec<usize>, u32> = HashMap::new();
        let trials = 12_000;
        for _ in 0..trials {
            *counts.entry(uniform_subset(4, 2, &mut rng)).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for (pair, &c) in &counts {
            assert!(
                (c as i64 - 2000).unsigned_abs() < 200,
                "pair {pair:?} count {c}"
            );
        }
    }

    #[test]
    fn overwrite_touches_exactly_the_targets() {
        let params = SchemeSpec::secret_channel(2, 4, 1, 1, 8, 1).build().unwrap();
        let (queries, clean) = run_setup(&params, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let state = AdversaryState::new(&params, Strategy::RandomOverwrite, &mut rng);
        let view = state.build_view(&queries, &clean);
        let tainted = state.corrupt(&params, &view, &clean, &[2], &mut rng);
        assert_eq!(tainted.corrupted, vec![false, false, true, false]);
        for s in [0usize, 1, 3] {
            assert_eq!(tainted.answers.row(s), clean.answers.row(s));
        }
    }

    #[test]
    fn additive_noise_changes_every_symbol_of_the_target() {
        let params = SchemeSpec::secret_channel(2, 3, 1, 1, 16, 1).build().unwrap();
        let (queries, clean) = run_setup(&params, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let state = AdversaryState::new(&params, Strategy::AdditiveNoise, &mut rng);
        let view = state.build_view(&queries, &clean);
        let tainted = state.corrupt(&params, &view, &clean, &[1], &mut rng);
        for c in 0..16 {
            assert_ne!(tainted.answers.get(1, c), clean.answers.get(1, c));
        }
    }

    #[test]
    fn conformant_strategies_replay_identically_under_hidden_changes() {
        // Untouched model, two servers observed. Change the answers of the
        // unobserved servers; the corruption written to the targets must not
        // move.
        let params = SchemeSpec::untouched(2, 4, 1, 1, 2, 4, 1).build().unwrap();
        let f = params.field();
        let (queries, clean_a) = run_setup(&params, 9);
        for strategy in [
            Strategy::Passive,
            Strategy::RandomOverwrite,
            Strategy::AdditiveNoise,
            Strategy::HashGuess,
            Strategy::MaxRoots,
        ] {
            assert!(strategy.kind().is_model_conformant());
            let mut setup_rng = ChaCha8Rng::seed_from_u64(10);
            let state = AdversaryState::new(&params, strategy, &mut setup_rng);
            let hidden: Vec<usize> = (0..4).filter(|s| !state.observed.contains(s)).collect();
            assert_eq!(state.observed.len(), 2);
            let mut clean_b = clean_a.clone();
            for &s in &hidden {
                let bumped: Vec<u64> = clean_b
                    .answers
                    .row(s)
                    .iter()
                    .map(|&v| f.add(v, 1))
                    .collect();
                clean_b.answers.set_row(s, &bumped);
            }
            let targets = vec![hidden[0], state.observed[0]];
            let run = |clean: &AnswerSet| {
                let view = state.build_view(&queries, clean);
                let mut gamma = ChaCha8Rng::seed_from_u64(11);
                state.corrupt(&params, &view, clean, &targets, &mut gamma)
            };
            let out_a = run(&clean_a);
            let out_b = run(&clean_b);
            for &s in &targets {
                // Conformant writes are the same raw row in both runs, and
                // conformant shifts are the same delta; either way nothing
                // about the hidden rows can show through.
                let same_raw = out_a.answers.row(s) == out_b.answers.row(s);
                let delta = |out: &AnswerSet, clean: &AnswerSet| -> Vec<u64> {
                    out.answers
                        .row(s)
                        .iter()
                        .zip(clean.answers.row(s))
                        .map(|(&x, &y)| f.sub(x, y))
                        .collect()
                };
                let same_delta = delta(&out_a, &clean_a) == delta(&out_b, &clean_b);
                assert!(
                    same_raw || same_delta,
                    "strategy {} leaked hidden data into server {s}",
                    state.strategy.kind().name()
                );
            }
        }
    }

    #[test]
    fn poly_with_roots_matches_product_evaluation() {
        let f = Field::new(31).unwrap();
        let roots = [3u64, 17, 25];
        let coeffs = poly_with_roots(f, &roots, 8);
        for x in 0..31u64 {
            // Oracle: evaluate the product form directly.
            let mut product = x;
            for &r in &roots {
                product = f.mul(product, f.sub(x, r));
            }
            let mut by_coeffs = 0u64;
            let mut power = x;
            for &c in &coeffs {
                by_coeffs = f.add(by_coeffs, f.mul(c, power));
                power = f.mul(power, x);
            }
            assert_eq!(by_coeffs, product, "x = {x}");
        }
    }

    #[test]
    fn max_roots_delta_is_collision_extremal() {
        let f = Field::new(67).unwrap();
        let delta = max_roots_delta(f, 8);
        let roots = collision_points(f, &delta);
        assert_eq!(roots, (1..8).collect::<Vec<u64>>());
        let fraction = roots.len() as f64 / 66.0;
        assert!(fraction <= single_point_miss_bound(8, 67));
    }

    #[test]
    fn hash_guess_single_point_success_stays_below_bound() {
        // q = 17, row width 4, one hash point. The guess-based difference row
        // passes only when the guess was right, so the empirical rate must
        // sit below 1/(q-1) + l/q.
        let f = Field::new(17).unwrap();
        let width = 4usize;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let trials = 20_000;
        let mut passes = 0u32;
        for _ in 0..trials {
            let true_point = f.sample_nonzero(&mut rng);
            let guess = f.sample_nonzero(&mut rng);
            let delta = poly_with_roots(f, &[guess], width);
            let mut acc = 0u64;
            let mut power = true_point;
            for &d in &delta {
                acc = f.add(acc, f.mul(d, power));
                power = f.mul(power, true_point);
            }
            if acc == 0 {
                passes += 1;
            }
        }
        let bound = 1.0 / 16.0 + single_point_miss_bound(width, 17);
        let rate = passes as f64 / trials as f64;
        // Three sigma of slack on top of the analytic bound.
        let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
        assert!(rate <= bound + 3.0 * sigma, "rate {rate} vs bound {bound}");
    }

    #[test]
    fn known_point_forgery_always_lands() {
        let f = Field::new(1031).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for alpha in 1..=3usize {
            for _ in 0..3_000 {
                let row: Vec<u64> = (0..8).map(|_| f.sample(&mut rng)).collect();
                let points = crate::hashing::sample_hash_points(f, alpha, &mut rng);
                let rows = FieldMatrix::from_rows(f, &[row.clone()]);
                let hashes = hash_rows(&rows, &points).unwrap();
                let forged =
                    forge_row_with_known_points(f, &row, &points, hashes.row(0), &mut rng);
                assert_ne!(forged, row);
                let forged_rows = FieldMatrix::from_rows(f, &[forged]);
                assert_eq!(hash_rows(&forged_rows, &points).unwrap(), hashes);
            }
        }
    }

    #[test]
    fn forgery_strategy_rewrites_targets_to_match_leaked_hashes() {
        let params = SchemeSpec::secret_channel(2, 3, 1, 1, 8, 2).build().unwrap();
        let (queries, clean) = run_setup(&params, 14);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let points = crate::hashing::sample_hash_points(params.field(), 2, &mut rng);
        let row_hashes = hash_rows(&clean.answers, &points).unwrap();
        let leak = KnownPLeak {
            points: points.clone(),
            row_hashes: row_hashes.clone(),
        };
        let state = AdversaryState::new(&params, Strategy::KnownPForgery(leak), &mut rng);
        let view = state.build_view(&queries, &clean);
        let tainted = state.corrupt(&params, &view, &clean, &[0], &mut rng);
        assert_ne!(tainted.answers.row(0), clean.answers.row(0));
        assert_eq!(
            hash_rows(&tainted.answers, &points).unwrap().row(0),
            row_hashes.row(0)
        );
    }

    #[test]
    fn observation_set_is_fixed_and_sized() {
        let params = SchemeSpec::untouched(2, 5, 1, 1, 3, 4, 2).build().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let state = AdversaryState::new(&params, Strategy::RandomOverwrite, &mut rng);
        assert_eq!(state.observed.len(), 3);
        let mut sorted = state.observed.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, state.observed);
        assert!(state.observed.iter().all(|&s| s < 5));
    }

    #[test]
    fn strategy_names_round_trip() {
        for kind in [
            StrategyKind::Passive,
            StrategyKind::RandomOverwrite,
            StrategyKind::AdditiveNoise,
            StrategyKind::HashGuess,
            StrategyKind::MaxRoots,
            StrategyKind::KnownPForgery,
        ] {
            assert_eq!(StrategyKind::parse(kind.name()), Some(kind));
        }
        assert_eq!(StrategyKind::parse("nope"), None);
    }
}
