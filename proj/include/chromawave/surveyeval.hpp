#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "chromawave/analysis.hpp"
#include "chromawave/embedding.hpp"
#include "chromawave/image.hpp"

namespace chromawave::survey {

enum class Choice { A, B };
const char* to_string(Choice c) noexcept;
Choice choice_from_string(const std::string& s);

struct TilePair {
  std::string pair_id;
  SrgbPixel tile1;
  SrgbPixel tile2;
  bool is_benchmark = false;
};

/// Two pairs shown together; indices refer to the stimulus list.
struct ComparisonSet {
  std::string set_id;
  std::size_t pair_a = 0;
  std::size_t pair_b = 0;
};

struct Judgment {
  std::string set_id;
  std::string respondent_id;
  Choice choice = Choice::A;
};

/// Similarity of the two tiles of a pair; larger means more similar.
using PairScorer = std::function<double(SrgbPixel, SrgbPixel)>;

/// Embedding vectors keyed by tile hex id ("RRGGBB").
using EmbeddingIndex = std::unordered_map<std::string, std::vector<double>>;
EmbeddingIndex index_embeddings(std::span<const Embedding> embeddings);

/// Cosine similarity of the two tiles' embeddings. Throws on a missing tile.
PairScorer embedding_scorer(const EmbeddingIndex& index);
/// Negative Euclidean distance between the tiles in JzAzBz.
PairScorer jzazbz_scorer();

struct CandidatePair {
  SrgbPixel tile1;
  SrgbPixel tile2;
};

/// Random distinct-color candidate pairs drawn from a palette.
std::vector<CandidatePair> candidate_pairs(std::span<const SrgbPixel> palette, std::size_t count, std::uint64_t seed);

struct Selection {
  std::vector<TilePair> pairs;  // disagreement pairs first, then benchmarks
  std::vector<double> scores;   // disagreement score of each selected pair
  bool fallback = false;        // every score was zero; drawn uniformly instead
};

/// Disagreement score is |rank under A - rank under B| over all candidates.
/// The top n_disagree become disagreement pairs; benchmarks are drawn
/// uniformly from the lowest-score decile of the remainder.
Selection select_stimuli(const PairScorer& a, const PairScorer& b, std::span<const CandidatePair> candidates,
                         std::size_t n_disagree, std::size_t n_benchmark, std::uint64_t seed);

enum class SetMode { replication, strict };
const char* to_string(SetMode m) noexcept;
SetMode set_mode_from_string(const std::string& s);

/// Replication: each pair is matched to a distinct other pair through a random
/// derangement, giving one set per pair. Strict: a perfect matching, n/2 sets.
std::vector<ComparisonSet> make_sets(std::size_t n_pairs, std::uint64_t seed, SetMode mode = SetMode::replication);

/// Number of benchmark pairs (0, 1, 2) in a set.
int benchmark_count(const ComparisonSet& set, std::span<const TilePair> pairs);

struct AlgorithmChoice {
  Choice choice = Choice::A;
  double score_a = 0.0;
  double score_b = 0.0;
  bool tie = false;  // exact tie, broken toward A
};

AlgorithmChoice algorithm_choice(const ComparisonSet& set, std::span<const TilePair> pairs, const PairScorer& scorer);
std::vector<AlgorithmChoice> algorithm_choices(std::span<const ComparisonSet> sets, std::span<const TilePair> pairs,
                                               const PairScorer& scorer);
std::size_t tie_count(std::span<const AlgorithmChoice> choices);

/// Uniform random A/B choices.
std::vector<AlgorithmChoice> random_choices(std::size_t n_sets, std::uint64_t seed);

struct Majority {
  std::size_t votes_a = 0;
  std::size_t votes_b = 0;
  std::optional<Choice> choice;  // empty for ties and sets without votes
  double fraction = 0.0;         // share of votes for the majority choice

  std::size_t votes() const noexcept { return votes_a + votes_b; }
  bool tie() const noexcept { return votes() > 0 && votes_a == votes_b; }
};

struct MajoritySummary {
  std::vector<Majority> per_set;  // aligned with the sets
  std::size_t ties = 0;
  std::size_t empty = 0;
};

/// Throws when a record references an unknown set.
MajoritySummary majority_judgments(std::span<const Judgment> records, std::span<const ComparisonSet> sets);

enum class Level { majority, individual };
enum class Subset { all, benchmark, non_benchmark };
const char* to_string(Level l) noexcept;
const char* to_string(Subset s) noexcept;

/// Whether a set belongs to a subset: benchmark sets contain at least one
/// benchmark pair, non-benchmark sets contain none.
bool in_subset(const ComparisonSet& set, std::span<const TilePair> pairs, Subset subset);

struct Accuracy {
  std::size_t matches = 0;
  std::size_t trials = 0;
  double fraction = 0.0;
  double p = 1.0;  // two-tailed proportion test against 0.5
};

Accuracy accuracy(std::span<const AlgorithmChoice> choices, std::span<const ComparisonSet> sets,
                  std::span<const TilePair> pairs, const MajoritySummary& majorities,
                  std::span<const Judgment> records, Level level, Subset subset);

struct StrengthRow {
  std::string set_id;
  double delta = 0.0;       // score of the majority pair minus the minority pair
  double vote_share = 0.0;  // majority fraction
};

struct StrengthResult {
  std::vector<StrengthRow> rows;
  analysis::Correlation correlation;
};

/// Spearman correlation between the score gap and the majority vote share,
/// over sets in `subset` with a defined majority.
StrengthResult agreement_strength_correlation(std::span<const ComparisonSet> sets, std::span<const TilePair> pairs,
                                              const PairScorer& scorer, const MajoritySummary& majorities,
                                              Subset subset = Subset::non_benchmark);

struct PerceptualError {
  std::string set_id;
  Choice algorithm = Choice::A;
  Choice human = Choice::A;
  std::array<JzazbzPixel, 2> pair_a;
  std::array<JzazbzPixel, 2> pair_b;
};

std::vector<PerceptualError> perceptual_error_pairs(std::span<const ComparisonSet> sets,
                                                    std::span<const TilePair> pairs,
                                                    std::span<const AlgorithmChoice> choices,
                                                    const MajoritySummary& majorities);

struct ScatterRow {
  std::string pair_id;
  double embedding_similarity = 0.0;  // minmax over pairs
  double color_similarity = 0.0;      // minmax of negative JzAzBz distance
};

std::vector<ScatterRow> similarity_scatter(std::span<const TilePair> pairs, const PairScorer& scorer);

/// Judgments from an oracle scorer. With temperature 0 every respondent picks
/// the oracle's choice; otherwise each picks A with probability
/// 1 / (1 + exp(-(score_a - score_b) / temperature)).
std::vector<Judgment> synthesize_judgments(std::span<const ComparisonSet> sets, std::span<const TilePair> pairs,
                                           const PairScorer& oracle, std::size_t respondents, double temperature,
                                           std::uint64_t seed);

/// Median |score_a - score_b| over the sets.
double median_abs_delta(std::span<const ComparisonSet> sets, std::span<const TilePair> pairs, const PairScorer& scorer);

void write_stimuli(const std::filesystem::path& path, std::span<const TilePair> pairs);
std::vector<TilePair> read_stimuli(const std::filesystem::path& path);
void write_sets(const std::filesystem::path& path, std::span<const ComparisonSet> sets,
                std::span<const TilePair> pairs);
std::vector<ComparisonSet> read_sets(const std::filesystem::path& path, std::span<const TilePair> pairs);
void write_judgments(const std::filesystem::path& path, std::span<const Judgment> records);
std::vector<Judgment> read_judgments(const std::filesystem::path& path);

}  // namespace chromawave::survey
