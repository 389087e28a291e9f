#include "chromawave/surveyeval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "chromawave/colorspace.hpp"
#include "chromawave/error.hpp"

namespace chromawave::survey {
namespace {

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04zu", prefix, i);
  return buf;
}

double jz_distance(SrgbPixel a, SrgbPixel b) {
  const auto p = colorspace::rgb_to_jzazbz(a);
  const auto q = colorspace::rgb_to_jzazbz(b);
  return std::sqrt((p.jz - q.jz) * (p.jz - q.jz) + (p.az - q.az) * (p.az - q.az) + (p.bz - q.bz) * (p.bz - q.bz));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Reads a CSV with the given header; calls fn(fields, line number) per row.
template <typename Fn>
void read_csv(const std::filesystem::path& path, const std::string& header, std::size_t columns, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw LineError(ErrorKind::format, lineno, "expected header " + header);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw LineError(ErrorKind::format, lineno, "expected header " + header);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != columns) {
      throw LineError(ErrorKind::format, lineno, "expected " + std::to_string(columns) + " columns");
    }
    fn(fields, lineno);
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

const char* to_string(Choice c) noexcept { return c == Choice::A ? "A" : "B"; }

Choice choice_from_string(const std::string& s) {
  if (s == "A") return Choice::A;
  if (s == "B") return Choice::B;
  throw Error(ErrorKind::format, "choice must be A or B, got '" + s + "'");
}

const char* to_string(SetMode m) noexcept { return m == SetMode::replication ? "replication" : "strict"; }

SetMode set_mode_from_string(const std::string& s) {
  if (s == "replication") return SetMode::replication;
  if (s == "strict") return SetMode::strict;
  throw Error(ErrorKind::invalid_argument, "unknown set mode '" + s + "'");
}

const char* to_string(Level l) noexcept { return l == Level::majority ? "majority" : "individual"; }

const char* to_string(Subset s) noexcept {
  switch (s) {
    case Subset::all:
      return "all";
    case Subset::benchmark:
      return "benchmark";
    case Subset::non_benchmark:
      return "non_benchmark";
  }
  return "?";
}

EmbeddingIndex index_embeddings(std::span<const Embedding> embeddings) {
  EmbeddingIndex index;
  for (const auto& e : embeddings) {
    if (!index.emplace(e.image_id, e.vector).second) {
      throw Error(ErrorKind::invalid_argument, "duplicate embedding id " + e.image_id);
    }
  }
  return index;
}

PairScorer embedding_scorer(const EmbeddingIndex& index) {
  return [&index](SrgbPixel a, SrgbPixel b) {
    const auto ia = index.find(to_hex(a));
    const auto ib = index.find(to_hex(b));
    if (ia == index.end()) throw Error(ErrorKind::invalid_argument, "missing embedding for tile " + to_hex(a));
    if (ib == index.end()) throw Error(ErrorKind::invalid_argument, "missing embedding for tile " + to_hex(b));
    return analysis::cosine_similarity(ia->second, ib->second);
  };
}

PairScorer jzazbz_scorer() {
  return [](SrgbPixel a, SrgbPixel b) { return -jz_distance(a, b); };
}

std::vector<CandidatePair> candidate_pairs(std::span<const SrgbPixel> palette, std::size_t count, std::uint64_t seed) {
  const auto idx = analysis::sample_pairs(palette.size(), count, seed);
  std::vector<CandidatePair> out;
  out.reserve(idx.size());
  for (const auto& [i, j] : idx) out.push_back({palette[i], palette[j]});
  return out;
}

Selection select_stimuli(const PairScorer& a, const PairScorer& b, std::span<const CandidatePair> candidates,
                         std::size_t n_disagree, std::size_t n_benchmark, std::uint64_t seed) {
  const std::size_t n = candidates.size();
  if (n < 2 || n < n_disagree + n_benchmark) {
    throw Error(ErrorKind::degenerate_input, "insufficient candidates: " + std::to_string(n) + " for " +
                                                 std::to_string(n_disagree + n_benchmark) + " pairs");
  }
  std::vector<double> sa(n), sb(n);
  for (std::size_t i = 0; i < n; ++i) {
    sa[i] = a(candidates[i].tile1, candidates[i].tile2);
    sb[i] = b(candidates[i].tile1, candidates[i].tile2);
  }
  const auto ra = analysis::average_ranks(sa);
  const auto rb = analysis::average_ranks(sb);
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) score[i] = std::abs(ra[i] - rb[i]);

  std::mt19937_64 rng(seed);
  Selection sel;
  std::vector<std::size_t> disagree, bench;
  const bool all_zero = std::all_of(score.begin(), score.end(), [](double s) { return s == 0.0; });
  if (all_zero) {
    sel.fallback = true;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    disagree.assign(order.begin(), order.begin() + n_disagree);
    bench.assign(order.begin() + n_disagree, order.begin() + n_disagree + n_benchmark);
  } else {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return score[x] > score[y]; });
    disagree.assign(order.begin(), order.begin() + n_disagree);
    // Lowest-score decile of all candidates, widened if the remainder is too small.
    std::vector<std::size_t> rest(order.begin() + n_disagree, order.end());
    std::reverse(rest.begin(), rest.end());
    const std::size_t decile = (n + 9) / 10;
    std::vector<std::size_t> pool(rest.begin(), rest.begin() + std::min(rest.size(), std::max(decile, n_benchmark)));
    std::shuffle(pool.begin(), pool.end(), rng);
    bench.assign(pool.begin(), pool.begin() + n_benchmark);
  }

  std::size_t k = 0;
  auto emit = [&](std::size_t i, bool is_benchmark) {
    sel.pairs.push_back({numbered("P", k++), candidates[i].tile1, candidates[i].tile2, is_benchmark});
    sel.scores.push_back(score[i]);
  };
  for (auto i : disagree) emit(i, false);
  for (auto i : bench) emit(i, true);
  return sel;
}

std::vector<ComparisonSet> make_sets(std::size_t n_pairs, std::uint64_t seed, SetMode mode) {
  if (n_pairs < 2) throw Error(ErrorKind::invalid_argument, "need at least two pairs to form sets");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> perm(n_pairs);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<ComparisonSet> sets;
  if (mode == SetMode::strict) {
    if (n_pairs % 2) throw Error(ErrorKind::invalid_argument, "strict mode needs an even number of pairs");
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < n_pairs; i += 2) sets.push_back({numbered("S", i / 2), perm[i], perm[i + 1]});
    return sets;
  }
  // Rejection sampling of a derangement; about e attempts on average.
  while (true) {
    std::shuffle(perm.begin(), perm.end(), rng);
    bool fixed = false;
    for (std::size_t i = 0; i < n_pairs && !fixed; ++i) fixed = perm[i] == i;
    if (!fixed) break;
  }
  for (std::size_t i = 0; i < n_pairs; ++i) sets.push_back({numbered("S", i), i, perm[i]});
  return sets;
}

int benchmark_count(const ComparisonSet& set, std::span<const TilePair> pairs) {
  return static_cast<int>(pairs[set.pair_a].is_benchmark) + static_cast<int>(pairs[set.pair_b].is_benchmark);
}

AlgorithmChoice algorithm_choice(const ComparisonSet& set, std::span<const TilePair> pairs, const PairScorer& scorer) {
  if (set.pair_a >= pairs.size() || set.pair_b >= pairs.size()) {
    throw Error(ErrorKind::invalid_argument, "set " + set.set_id + " references a missing pair");
  }
  const auto& pa = pairs[set.pair_a];
  const auto& pb = pairs[set.pair_b];
  AlgorithmChoice c;
  c.score_a = scorer(pa.tile1, pa.tile2);
  c.score_b = scorer(pb.tile1, pb.tile2);
  c.tie = c.score_a == c.score_b;
  c.choice = c.score_a >= c.score_b ? Choice::A : Choice::B;
  return c;
}

std::vector<AlgorithmChoice> algorithm_choices(std::span<const ComparisonSet> sets, std::span<const TilePair> pairs,
                                               const PairScorer& scorer) {
  std::vector<AlgorithmChoice> out;
  out.reserve(sets.size());
  for (const auto& s : sets) out.push_back(algorithm_choice(s, pairs, scorer));
  return out;
}

std::size_t tie_count(std::span<const AlgorithmChoice> choices) {
  return static_cast<std::size_t>(std::count_if(choices.begin(), choices.end(), [](const auto& c) { return c.tie; }));
}

std::vector<AlgorithmChoice> random_choices(std::size_t n_sets, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<AlgorithmChoice> out(n_sets);
  for (auto& c : out) c.choice = coin(rng) ? Choice::A : Choice::B;
  return out;
}

MajoritySummary majority_judgments(std::span<const Judgment> records, std::span<const ComparisonSet> sets) {
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (!by_id.emplace(sets[i].set_id, i).second) {
      throw Error(ErrorKind::invalid_argument, "duplicate set id " + sets[i].set_id);
    }
  }
  MajoritySummary out;
  out.per_set.resize(sets.size());
  for (const auto& r : records) {
    const auto it = by_id.find(r.set_id);
    if (it == by_id.end()) throw Error(ErrorKind::invalid_argument, "judgment references unknown set " + r.set_id);
    auto& m = out.per_set[it->second];
    (r.choice == Choice::A ? m.votes_a : m.votes_b) += 1;
  }
  for (auto& m : out.per_set) {
    if (m.votes() == 0) {
      ++out.empty;
      continue;
    }
    if (m.tie()) {
      ++out.ties;
      m.fraction = 0.5;
      continue;
    }
    m.choice = m.votes_a > m.votes_b ? Choice::A : Choice::B;
    m.fraction = static_cast<double>(std::max(m.votes_a, m.votes_b)) / static_cast<double>(m.votes());
  }
  return out;
}

bool in_subset(const ComparisonSet& set, std::span<const TilePair> pairs, Subset subset) {
  switch (subset) {
    case Subset::all:
      return true;
    case Subset::benchmark:
      return benchmark_count(set, pairs) > 0;
    case Subset::non_benchmark:
      return benchmark_count(set, pairs) == 0;
  }
  return false;
}

Accuracy accuracy(std::span<const AlgorithmChoice> choices, std::span<const ComparisonSet> sets,
                  std::span<const TilePair> pairs, const MajoritySummary& majorities,
                  std::span<const Judgment> records, Level level, Subset subset) {
  if (choices.size() != sets.size() || majorities.per_set.size() != sets.size()) {
    throw Error(ErrorKind::dimension_mismatch, "choices, majorities and sets must align");
  }
  Accuracy acc;
  if (level == Level::majority) {
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const auto& m = majorities.per_set[i];
      if (!m.choice || !in_subset(sets[i], pairs, subset)) continue;
      ++acc.trials;
      if (choices[i].choice == *m.choice) ++acc.matches;
    }
  } else {
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < sets.size(); ++i) by_id.emplace(sets[i].set_id, i);
    for (const auto& r : records) {
      const auto it = by_id.find(r.set_id);
      if (it == by_id.end()) throw Error(ErrorKind::invalid_argument, "judgment references unknown set " + r.set_id);
      if (!in_subset(sets[it->second], pairs, subset)) continue;
      ++acc.trials;
      if (choices[it->second].choice == r.choice) ++acc.matches;
    }
  }
  if (acc.trials == 0) throw Error(ErrorKind::degenerate_input, std::string("empty subset: ") + to_string(subset));
  acc.fraction = static_cast<double>(acc.matches) / static_cast<double>(acc.trials);
  acc.p = analysis::proportion_test(acc.matches, acc.trials, 0.5).p;
  return acc;
}

StrengthResult agreement_strength_correlation(std::span<const ComparisonSet> sets, std::span<const TilePair> pairs,
                                              const PairScorer& scorer, const MajoritySummary& majorities,
                                              Subset subset) {
  if (majorities.per_set.size() != sets.size()) throw Error(ErrorKind::dimension_mismatch, "majorities and sets must align");
  StrengthResult out;
  std::vector<double> delta, share;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& m = majorities.per_set[i];
    if (!m.choice || !in_subset(sets[i], pairs, subset)) continue;
    const auto c = algorithm_choice(sets[i], pairs, scorer);
    const double d = *m.choice == Choice::A ? c.score_a - c.score_b : c.score_b - c.score_a;
    out.rows.push_back({sets[i].set_id, d, m.fraction});
    delta.push_back(d);
    share.push_back(m.fraction);
  }
  if (out.rows.size() < 3) throw Error(ErrorKind::degenerate_input, "fewer than 3 usable sets");
  out.correlation = analysis::spearman(delta, share);
  return out;
}

std::vector<PerceptualError> perceptual_error_pairs(std::span<const ComparisonSet> sets,
                                                    std::span<const TilePair> pairs,
                                                    std::span<const AlgorithmChoice> choices,
                                                    const MajoritySummary& majorities) {
  if (choices.size() != sets.size() || majorities.per_set.size() != sets.size()) {
    throw Error(ErrorKind::dimension_mismatch, "choices, majorities and sets must align");
  }
  std::vector<PerceptualError> out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& m = majorities.per_set[i];
    if (!m.choice || choices[i].choice == *m.choice) continue;
    const auto& pa = pairs[sets[i].pair_a];
    const auto& pb = pairs[sets[i].pair_b];
    out.push_back({sets[i].set_id,
                   choices[i].choice,
                   *m.choice,
                   {colorspace::rgb_to_jzazbz(pa.tile1), colorspace::rgb_to_jzazbz(pa.tile2)},
                   {colorspace::rgb_to_jzazbz(pb.tile1), colorspace::rgb_to_jzazbz(pb.tile2)}});
  }
  return out;
}

std::vector<ScatterRow> similarity_scatter(std::span<const TilePair> pairs, const PairScorer& scorer) {
  std::vector<double> emb, col;
  for (const auto& p : pairs) {
    emb.push_back(scorer(p.tile1, p.tile2));
    col.push_back(-jz_distance(p.tile1, p.tile2));
  }
  const auto e = analysis::minmax(emb);
  const auto c = analysis::minmax(col);
  std::vector<ScatterRow> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) out.push_back({pairs[i].pair_id, e[i], c[i]});
  return out;
}

std::vector<Judgment> synthesize_judgments(std::span<const ComparisonSet> sets, std::span<const TilePair> pairs,
                                           const PairScorer& oracle, std::size_t respondents, double temperature,
                                           std::uint64_t seed) {
  if (respondents < 1) throw Error(ErrorKind::invalid_argument, "need at least one respondent");
  if (temperature < 0) throw Error(ErrorKind::invalid_argument, "temperature must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Judgment> out;
  out.reserve(sets.size() * respondents);
  for (const auto& s : sets) {
    const auto c = algorithm_choice(s, pairs, oracle);
    const double d = c.score_a - c.score_b;
    for (std::size_t r = 0; r < respondents; ++r) {
      Choice pick;
      if (temperature == 0.0) {
        pick = c.choice;
      } else {
        const double p_a = 1.0 / (1.0 + std::exp(-d / temperature));
        pick = unit(rng) < p_a ? Choice::A : Choice::B;
      }
      out.push_back({s.set_id, numbered("R", r), pick});
    }
  }
  return out;
}

double median_abs_delta(std::span<const ComparisonSet> sets, std::span<const TilePair> pairs, const PairScorer& scorer) {
  if (sets.empty()) throw Error(ErrorKind::degenerate_input, "no sets");
  std::vector<double> d;
  for (const auto& s : sets) {
    const auto c = algorithm_choice(s, pairs, scorer);
    d.push_back(std::abs(c.score_a - c.score_b));
  }
  std::sort(d.begin(), d.end());
  const std::size_t n = d.size();
  return n % 2 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
}

void write_stimuli(const std::filesystem::path& path, std::span<const TilePair> pairs) {
  auto out = open_out(path);
  out << "pair_id,tile1_hex,tile2_hex,is_benchmark\n";
  for (const auto& p : pairs) {
    out << p.pair_id << ',' << to_hex(p.tile1) << ',' << to_hex(p.tile2) << ',' << (p.is_benchmark ? 1 : 0) << '\n';
  }
}

std::vector<TilePair> read_stimuli(const std::filesystem::path& path) {
  std::vector<TilePair> out;
  std::unordered_map<std::string, bool> seen;
  read_csv(path, "pair_id,tile1_hex,tile2_hex,is_benchmark", 4, [&](const auto& f, std::size_t line) {
    TilePair p;
    p.pair_id = f[0];
    try {
      p.tile1 = from_hex(f[1]);
      p.tile2 = from_hex(f[2]);
    } catch (const Error& e) {
      throw LineError(ErrorKind::format, line, e.what());
    }
    if (f[3] != "0" && f[3] != "1") throw LineError(ErrorKind::format, line, "is_benchmark must be 0 or 1");
    p.is_benchmark = f[3] == "1";
    if (!seen.emplace(p.pair_id, true).second) throw LineError(ErrorKind::format, line, "duplicate pair id " + p.pair_id);
    out.push_back(p);
  });
  return out;
}

void write_sets(const std::filesystem::path& path, std::span<const ComparisonSet> sets,
                std::span<const TilePair> pairs) {
  auto out = open_out(path);
  out << "set_id,pair_a_id,pair_b_id\n";
  for (const auto& s : sets) out << s.set_id << ',' << pairs[s.pair_a].pair_id << ',' << pairs[s.pair_b].pair_id << '\n';
}

std::vector<ComparisonSet> read_sets(const std::filesystem::path& path, std::span<const TilePair> pairs) {
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < pairs.size(); ++i) by_id.emplace(pairs[i].pair_id, i);
  std::vector<ComparisonSet> out;
  read_csv(path, "set_id,pair_a_id,pair_b_id", 3, [&](const auto& f, std::size_t line) {
    const auto a = by_id.find(f[1]);
    const auto b = by_id.find(f[2]);
    if (a == by_id.end() || b == by_id.end()) throw LineError(ErrorKind::format, line, "unknown pair id");
    if (a->second == b->second) throw LineError(ErrorKind::format, line, "a set needs two different pairs");
    out.push_back({f[0], a->second, b->second});
  });
  return out;
}

void write_judgments(const std::filesystem::path& path, std::span<const Judgment> records) {
  auto out = open_out(path);
  out << "set_id,respondent_id,choice\n";
  for (const auto& r : records) out << r.set_id << ',' << r.respondent_id << ',' << to_string(r.choice) << '\n';
}

std::vector<Judgment> read_judgments(const std::filesystem::path& path) {
  std::vector<Judgment> out;
  read_csv(path, "set_id,respondent_id,choice", 3, [&](const auto& f, std::size_t line) {
    try {
      out.push_back({f[0], f[1], choice_from_string(f[2])});
    } catch (const Error& e) {
      throw LineError(ErrorKind::format, line, e.what());
    }
  });
  return out;
}

}  // namespace chromawave::survey
