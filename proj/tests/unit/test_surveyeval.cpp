#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <unistd.h>

#include "chromawave/colorspace.hpp"
#include "chromawave/datagen.hpp"
#include "chromawave/error.hpp"
#include "chromawave/surveyeval.hpp"

using namespace chromawave;
using namespace chromawave::survey;

namespace {

// Candidate i carries its index in the red channel of tile1.
std::vector<CandidatePair> indexed_candidates(std::size_t n) {
  std::vector<CandidatePair> c;
  for (std::size_t i = 0; i < n; ++i) c.push_back({{static_cast<std::uint8_t>(i), 0, 0}, {0, 0, 0}});
  return c;
}

PairScorer table_scorer(std::vector<double> table) {
  return [table](SrgbPixel t1, SrgbPixel) { return table.at(t1.r); };
}

std::vector<TilePair> toy_pairs() {
  // Distances grow with the index; P3 is a benchmark.
  return {{"P0000", {10, 10, 10}, {12, 10, 10}, false},
          {"P0001", {10, 10, 10}, {60, 10, 10}, false},
          {"P0002", {10, 10, 10}, {200, 10, 10}, false},
          {"P0003", {10, 10, 10}, {10, 10, 250}, true}};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / (name + "_" + std::to_string(::getpid()));
}

}  // namespace

TEST(Selection, DisagreementMatchesOracle) {
  const std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<double> b{10, 2, 3, 8, 5, 6, 1, 9, 4, 7};
  const auto cands = indexed_candidates(10);
  const auto sel = select_stimuli(table_scorer(a), table_scorer(b), cands, 3, 2, 4);
  ASSERT_EQ(sel.pairs.size(), 5u);
  EXPECT_FALSE(sel.fallback);
  EXPECT_EQ(sel.pairs[0].tile1.r, 0);
  EXPECT_EQ(sel.pairs[1].tile1.r, 6);
  EXPECT_EQ(sel.pairs[2].tile1.r, 8);
  EXPECT_EQ(sel.scores[0], 9.0);
  EXPECT_EQ(sel.scores[1], 6.0);
  EXPECT_EQ(sel.scores[2], 5.0);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(sel.pairs[i].pair_id, "P000" + std::to_string(i));
  for (int i = 3; i < 5; ++i) {
    EXPECT_TRUE(sel.pairs[i].is_benchmark);
    EXPECT_EQ(sel.scores[i], 0.0);
  }
  EXPECT_FALSE(sel.pairs[0].is_benchmark);
}

TEST(Selection, IdenticalScorersFallBack) {
  const auto s = table_scorer({1, 2, 3, 4, 5, 6});
  const auto cands = indexed_candidates(6);
  const auto sel = select_stimuli(s, s, cands, 2, 2, 1);
  EXPECT_TRUE(sel.fallback);
  EXPECT_EQ(sel.pairs.size(), 4u);
  EXPECT_THROW(select_stimuli(s, s, cands, 5, 2, 1), Error);
}

TEST(Selection, CandidatesAreDistinctColors) {
  const auto palette = datagen::palette(6);
  const auto c = candidate_pairs(palette, 500, 3);
  ASSERT_EQ(c.size(), 500u);
  for (const auto& p : c) EXPECT_FALSE(p.tile1 == p.tile2);
  const auto again = candidate_pairs(palette, 500, 3);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_TRUE(c[i].tile1 == again[i].tile1 && c[i].tile2 == again[i].tile2);
}

TEST(Sets, ReplicationIsDerangement) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto sets = make_sets(40, seed);
    ASSERT_EQ(sets.size(), 40u);
    std::set<std::size_t> partners;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      EXPECT_EQ(sets[i].pair_a, i);
      EXPECT_NE(sets[i].pair_b, i);
      partners.insert(sets[i].pair_b);
    }
    EXPECT_EQ(partners.size(), 40u);
  }
  EXPECT_EQ(make_sets(40, 2)[7].set_id, "S0007");
}

TEST(Sets, StrictIsPerfectMatching) {
  const auto sets = make_sets(20, 5, SetMode::strict);
  ASSERT_EQ(sets.size(), 10u);
  std::set<std::size_t> used;
  for (const auto& s : sets) {
    used.insert(s.pair_a);
    used.insert(s.pair_b);
  }
  EXPECT_EQ(used.size(), 20u);
  EXPECT_THROW(make_sets(7, 0, SetMode::strict), Error);
  EXPECT_THROW(make_sets(1, 0), Error);
}

TEST(Sets, BenchmarkCount) {
  const auto pairs = toy_pairs();
  EXPECT_EQ(benchmark_count({"S", 0, 1}, pairs), 0);
  EXPECT_EQ(benchmark_count({"S", 0, 3}, pairs), 1);
  EXPECT_TRUE(in_subset({"S", 3, 0}, pairs, Subset::benchmark));
  EXPECT_FALSE(in_subset({"S", 3, 0}, pairs, Subset::non_benchmark));
  EXPECT_TRUE(in_subset({"S", 1, 0}, pairs, Subset::all));
}

TEST(Choices, ColorDistanceAndTies) {
  const auto pairs = toy_pairs();
  const auto jz = jzazbz_scorer();
  auto c = algorithm_choice({"S", 0, 2}, pairs, jz);
  EXPECT_EQ(c.choice, Choice::A);
  EXPECT_FALSE(c.tie);
  c = algorithm_choice({"S", 2, 0}, pairs, jz);
  EXPECT_EQ(c.choice, Choice::B);
  c = algorithm_choice({"S", 1, 1}, pairs, jz);
  EXPECT_TRUE(c.tie);
  EXPECT_EQ(c.choice, Choice::A);
  const auto d = colorspace::rgb_to_jzazbz({10, 10, 10}), e = colorspace::rgb_to_jzazbz({12, 10, 10});
  EXPECT_NEAR(jz(pairs[0].tile1, pairs[0].tile2),
              -std::sqrt(std::pow(d.jz - e.jz, 2) + std::pow(d.az - e.az, 2) + std::pow(d.bz - e.bz, 2)), 1e-15);
}

TEST(Choices, EmbeddingScorer) {
  const std::vector<Embedding> emb{{"0A0A0A", "w", "t", {1, 0}}, {"0C0A0A", "w", "t", {1, 1}}};
  const auto idx = index_embeddings(emb);
  const auto s = embedding_scorer(idx);
  EXPECT_NEAR(s({10, 10, 10}, {12, 10, 10}), std::sqrt(0.5), 1e-15);
  EXPECT_THROW(s({10, 10, 10}, {1, 1, 1}), Error);
}

TEST(Choices, RandomChoicesBalanced) {
  const auto r = random_choices(10000, 1);
  const auto a = std::count_if(r.begin(), r.end(), [](const AlgorithmChoice& c) { return c.choice == Choice::A; });
  EXPECT_NEAR(a / 10000.0, 0.5, 0.02);
  EXPECT_EQ(tie_count(r), 0u);
}

TEST(Majority, VotesAndTies) {
  const std::vector<ComparisonSet> sets{{"S0", 0, 1}, {"S1", 1, 2}, {"S2", 2, 0}};
  const std::vector<Judgment> j{{"S0", "R0", Choice::A}, {"S0", "R1", Choice::A}, {"S0", "R2", Choice::B},
                                {"S1", "R0", Choice::A}, {"S1", "R1", Choice::B}};
  const auto m = majority_judgments(j, sets);
  EXPECT_EQ(m.per_set[0].choice, Choice::A);
  EXPECT_NEAR(m.per_set[0].fraction, 2.0 / 3.0, 1e-15);
  EXPECT_TRUE(m.per_set[1].tie());
  EXPECT_FALSE(m.per_set[1].choice.has_value());
  EXPECT_EQ(m.per_set[2].votes(), 0u);
  EXPECT_EQ(m.ties, 1u);
  EXPECT_EQ(m.empty, 1u);
  const std::vector<Judgment> bad{{"S9", "R0", Choice::A}};
  EXPECT_THROW(majority_judgments(bad, sets), Error);
}

TEST(Accuracy, MajorityAndIndividualLevels) {
  const auto pairs = toy_pairs();
  const std::vector<ComparisonSet> sets{{"S0", 0, 1}, {"S1", 1, 2}, {"S2", 2, 3}, {"S3", 3, 0}};
  const auto choices = algorithm_choices(sets, pairs, jzazbz_scorer());
  // Humans agree with the algorithm on S0, S1 and S3, and disagree on S2.
  std::vector<Judgment> j;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const Choice alg = choices[i].choice;
    const Choice other = alg == Choice::A ? Choice::B : Choice::A;
    const Choice human = i == 2 ? other : alg;
    j.push_back({sets[i].set_id, "R0", human});
    j.push_back({sets[i].set_id, "R1", human});
    j.push_back({sets[i].set_id, "R2", i == 0 ? other : human});
  }
  const auto m = majority_judgments(j, sets);
  auto acc = accuracy(choices, sets, pairs, m, j, Level::majority, Subset::all);
  EXPECT_EQ(acc.matches, 3u);
  EXPECT_EQ(acc.trials, 4u);
  acc = accuracy(choices, sets, pairs, m, j, Level::individual, Subset::all);
  EXPECT_EQ(acc.matches, 8u);
  EXPECT_EQ(acc.trials, 12u);
  acc = accuracy(choices, sets, pairs, m, j, Level::majority, Subset::non_benchmark);
  EXPECT_EQ(acc.trials, 2u);
  EXPECT_EQ(acc.matches, 2u);
  acc = accuracy(choices, sets, pairs, m, j, Level::majority, Subset::benchmark);
  EXPECT_EQ(acc.trials, 2u);
  EXPECT_EQ(acc.matches, 1u);
  const auto errors = perceptual_error_pairs(sets, pairs, choices, m);
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].set_id, "S2");
  const auto no_bench = std::vector<TilePair>(pairs.begin(), pairs.begin() + 3);
  const std::vector<ComparisonSet> plain{{"S0", 0, 1}};
  const std::vector<AlgorithmChoice> one{choices[0]};
  const auto m1 = majority_judgments(std::vector<Judgment>{j[0]}, plain);
  EXPECT_THROW(accuracy(one, plain, no_bench, m1, j, Level::majority, Subset::benchmark), Error);
}

TEST(Synthesis, NoiselessMatchesOracle) {
  const auto pairs = toy_pairs();
  const auto sets = make_sets(pairs.size(), 3);
  const auto oracle = jzazbz_scorer();
  const auto j = synthesize_judgments(sets, pairs, oracle, 5, 0.0, 1);
  ASSERT_EQ(j.size(), sets.size() * 5);
  const auto choices = algorithm_choices(sets, pairs, oracle);
  const auto m = majority_judgments(j, sets);
  const auto acc = accuracy(choices, sets, pairs, m, j, Level::individual, Subset::all);
  EXPECT_EQ(acc.matches, acc.trials);
  EXPECT_EQ(j[0].respondent_id, "R0000");
}

TEST(Synthesis, NoisyVoteShareTracksScoreGap) {
  // Many tiles with spread-out distances so score gaps vary widely.
  std::vector<TilePair> pairs;
  for (int i = 0; i < 60; ++i)
    pairs.push_back({"P" + std::to_string(i), {128, 128, 128}, {static_cast<std::uint8_t>(128 + 2 * i), 128, 128}, false});
  const auto sets = make_sets(pairs.size(), 9);
  const auto oracle = jzazbz_scorer();
  const double t = median_abs_delta(sets, pairs, oracle);
  EXPECT_GT(t, 0.0);
  const auto j = synthesize_judgments(sets, pairs, oracle, 50, t, 2);
  const auto m = majority_judgments(j, sets);
  const auto s = agreement_strength_correlation(sets, pairs, oracle, m, Subset::all);
  EXPECT_GT(s.correlation.rho, 0.5);
  EXPECT_LT(s.correlation.p, 0.01);
  for (const auto& row : s.rows) EXPECT_GE(row.vote_share, 0.5);
}

TEST(Scatter, MinMaxScaled) {
  const auto pairs = toy_pairs();
  const auto rows = similarity_scatter(pairs, jzazbz_scorer());
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_DOUBLE_EQ(rows[0].color_similarity, 1.0);
  EXPECT_DOUBLE_EQ(rows[0].embedding_similarity, 1.0);
  for (const auto& r : rows) {
    EXPECT_GE(r.color_similarity, 0.0);
    EXPECT_LE(r.color_similarity, 1.0);
  }
}

TEST(Csv, RoundTrips) {
  const auto pairs = toy_pairs();
  const auto sets = make_sets(pairs.size(), 1);
  const std::vector<Judgment> j{{sets[0].set_id, "R0000", Choice::B}, {sets[1].set_id, "R0001", Choice::A}};
  const auto sp = temp_path("stimuli.csv"), st = temp_path("sets.csv"), jp = temp_path("judgments.csv");
  write_stimuli(sp, pairs);
  write_sets(st, sets, pairs);
  write_judgments(jp, j);
  const auto p2 = read_stimuli(sp);
  ASSERT_EQ(p2.size(), pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(p2[i].pair_id, pairs[i].pair_id);
    EXPECT_TRUE(p2[i].tile1 == pairs[i].tile1);
    EXPECT_TRUE(p2[i].tile2 == pairs[i].tile2);
    EXPECT_EQ(p2[i].is_benchmark, pairs[i].is_benchmark);
  }
  const auto s2 = read_sets(st, p2);
  ASSERT_EQ(s2.size(), sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    EXPECT_EQ(s2[i].set_id, sets[i].set_id);
    EXPECT_EQ(s2[i].pair_a, sets[i].pair_a);
    EXPECT_EQ(s2[i].pair_b, sets[i].pair_b);
  }
  const auto j2 = read_judgments(jp);
  ASSERT_EQ(j2.size(), 2u);
  EXPECT_EQ(j2[0].choice, Choice::B);
  EXPECT_EQ(j2[1].respondent_id, "R0001");
  std::ofstream(jp) << "set_id,respondent_id,choice\nS0000,R0,C\n";
  EXPECT_THROW(read_judgments(jp), Error);
  for (const auto& p : {sp, st, jp}) std::filesystem::remove(p);
}

// 140 disagreement + 60 benchmark pairs. With a random derangement the
// expected zero/one/two-benchmark set counts are 98/84/18; the observed
// human-study composition was 96/88/16.
TEST(Sets, BenchmarkCompositionOverSeeds) {
  std::vector<TilePair> pairs(200);
  for (std::size_t i = 0; i < 200; ++i) pairs[i].is_benchmark = i >= 140;
  double counts[3] = {0, 0, 0};
  const int seeds = 300;
  for (int s = 0; s < seeds; ++s) {
    for (const auto& set : make_sets(200, s)) counts[benchmark_count(set, pairs)] += 1.0 / seeds;
  }
  EXPECT_NEAR(counts[0], 98.0, 2.0);
  EXPECT_NEAR(counts[1], 84.0, 2.0);
  EXPECT_NEAR(counts[2], 18.0, 2.0);
  EXPECT_NEAR(counts[0], 96.0, 5.0);
  EXPECT_NEAR(counts[1], 88.0, 5.0);
  EXPECT_NEAR(counts[2], 16.0, 5.0);
}

TEST(Selection, OppositeOrderGivesMaximalScores) {
  const auto cands = indexed_candidates(2);
  const auto sel = select_stimuli(table_scorer({1, 2}), table_scorer({2, 1}), cands, 2, 0, 0);
  ASSERT_EQ(sel.scores.size(), 2u);
  EXPECT_EQ(sel.scores[0], 1.0);
  EXPECT_EQ(sel.scores[1], 1.0);
}

TEST(Choices, IdenticalTilesWin) {
  const std::vector<TilePair> pairs{{"P0", {50, 60, 70}, {50, 60, 70}, false}, {"P1", {50, 60, 70}, {51, 60, 70}, false}};
  const std::vector<Embedding> emb{{"323C46", "w", "t", {1, 2}}, {"333C46", "w", "t", {2, 1}}};
  const auto idx = index_embeddings(emb);
  EXPECT_EQ(algorithm_choice({"S", 0, 1}, pairs, embedding_scorer(idx)).choice, Choice::A);
  EXPECT_EQ(algorithm_choice({"S", 1, 0}, pairs, embedding_scorer(idx)).choice, Choice::B);
  EXPECT_TRUE(algorithm_choice({"S", 0, 0}, pairs, embedding_scorer(idx)).tie);
}

TEST(Majority, SevenOfTwelve) {
  const std::vector<ComparisonSet> sets{{"S0", 0, 1}};
  std::vector<Judgment> j;
  for (int i = 0; i < 12; ++i) j.push_back({"S0", "R" + std::to_string(i), i < 7 ? Choice::A : Choice::B});
  const auto m = majority_judgments(j, sets);
  EXPECT_EQ(m.per_set[0].choice, Choice::A);
  EXPECT_DOUBLE_EQ(m.per_set[0].fraction, 7.0 / 12.0);
}
