#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "chromawave/analysis.hpp"
#include "chromawave/clustering.hpp"
#include "chromawave/colormetrics.hpp"
#include "chromawave/colorspace.hpp"
#include "chromawave/datagen.hpp"
#include "chromawave/embedio.hpp"
#include "chromawave/error.hpp"
#include "chromawave/parallel.hpp"
#include "chromawave/scattering.hpp"
#include "chromawave/surveyeval.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace chromawave;

namespace {

constexpr const char* kVersion = "1.0.0";

const char* kClusterColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

json option_value(const CLI::Option* opt) {
  if (opt->get_expected_min() == 0) return opt->count() > 0;
  const auto values = opt->count() ? opt->reduced_results() : std::vector<std::string>{};
  if (!opt->count()) return opt->get_default_str();
  if (values.size() == 1 && opt->get_expected_max() <= 1) return values.front();
  return values;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, path.string() + ": " + e.what());
  }
}

// Creates the output directory and records the exact configuration in it.
void begin_output(const fs::path& dir, const CLI::App* sub) {
  fs::create_directories(dir);
  json options = json::object();
  for (const auto* opt : sub->get_options()) {
    if (opt->get_name() == "--help") continue;
    const auto& names = opt->get_lnames();
    options[names.empty() ? opt->get_name() : names.front()] = option_value(opt);
  }
  write_json(dir / "config.json", {{"command", sub->get_name()}, {"version", kVersion}, {"options", options}});
}

json null_json(const colormetrics::NullSummary& s) {
  return {{"mean", s.mean}, {"lo95", s.lo95}, {"hi95", s.hi95}, {"realizations", s.realizations.size()}};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

unsigned resolve_threads(unsigned requested) { return requested ? requested : default_thread_count(); }

std::vector<ImageRecord> load_manifest(const std::string& path) { return datagen::load_dataset(path); }

// Orders embeddings to follow the manifest; every image needs a record.
std::vector<Embedding> align_embeddings(const std::vector<ImageRecord>& images, std::vector<Embedding> embeddings) {
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < embeddings.size(); ++i) by_id.emplace(embeddings[i].image_id, i);
  std::vector<Embedding> out;
  out.reserve(images.size());
  for (const auto& img : images) {
    const auto it = by_id.find(img.id);
    if (it == by_id.end()) throw Error(ErrorKind::dimension_mismatch, "no embedding for image " + img.id);
    out.push_back(std::move(embeddings[it->second]));
  }
  return out;
}

std::vector<int> aligned_labels(const std::vector<ImageRecord>& images, const std::string& path) {
  const auto rows = clustering::read_assignments(path);
  std::unordered_map<std::string, int> by_id;
  for (const auto& r : rows) by_id.emplace(r.image_id, r.cluster);
  std::vector<int> labels;
  labels.reserve(images.size());
  for (const auto& img : images) {
    const auto it = by_id.find(img.id);
    if (it == by_id.end()) throw Error(ErrorKind::dimension_mismatch, "no cluster assignment for image " + img.id);
    labels.push_back(it->second);
  }
  return labels;
}

// "wavelet:<mode>" renders each tile as a default block image and scatters
// it; anything else is read as an embedding file keyed by tile hex.
survey::EmbeddingIndex tile_embeddings(const std::string& source, const std::vector<SrgbPixel>& tiles,
                                       unsigned threads) {
  if (source.rfind("wavelet:", 0) == 0) {
    const auto mode = scattering::color_mode_from_string(source.substr(8));
    datagen::BlockSpec spec;
    std::vector<ImageRecord> blocks;
    for (const auto& t : tiles) blocks.push_back(datagen::render_block(to_hex(t), t, spec));
    return survey::index_embeddings(scattering::embed_all(blocks, mode, 5, 4, threads));
  }
  return survey::index_embeddings(embedio::read_embeddings(fs::path(source)).records);
}

std::vector<SrgbPixel> stimulus_tiles(const std::vector<survey::TilePair>& pairs) {
  std::vector<SrgbPixel> tiles;
  std::unordered_map<std::string, bool> seen;
  for (const auto& p : pairs) {
    for (const auto& t : {p.tile1, p.tile2}) {
      if (seen.emplace(to_hex(t), true).second) tiles.push_back(t);
    }
  }
  return tiles;
}

std::vector<double> histogram_density(const std::vector<double>& values, const std::vector<double>& edges) {
  std::vector<double> counts(edges.size() - 1, 0.0);
  for (double v : values) {
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    std::size_t bin = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
    bin = std::min(bin, counts.size() - 1);
    counts[bin] += 1;
  }
  const double width = edges[1] - edges[0];
  for (double& c : counts) c = values.empty() ? 0.0 : c / (static_cast<double>(values.size()) * width);
  return counts;
}

// ---- commands -----------------------------------------------------------

struct GenOptions {
  int n = 1000;
  std::uint64_t seed = 0;
  int size = 300;
  int border = 50;
  int stripe_width = 25;
  std::string border_color = "FFFFFF";
  int levels = 6;
  std::string out;
};

void run_gen_blocks(const GenOptions& o, const CLI::App* sub) {
  datagen::BlockSpec spec;
  spec.size = o.size;
  spec.border_width = o.border;
  spec.border_color = from_hex(o.border_color);
  spec.palette_levels = o.levels;
  spec.seed = o.seed;
  const auto images = datagen::gen_blocks(o.n, spec);
  begin_output(o.out, sub);
  datagen::export_dataset(o.out, images);
}

void run_gen_stripes(const GenOptions& o, const CLI::App* sub) {
  datagen::StripeSpec spec;
  spec.size = o.size;
  spec.border_width = o.border;
  spec.stripe_width = o.stripe_width;
  spec.border_color = from_hex(o.border_color);
  spec.palette_levels = o.levels;
  spec.seed = o.seed;
  const auto images = datagen::gen_stripes(o.n, spec);
  begin_output(o.out, sub);
  datagen::export_dataset(o.out, images);
}

struct IngestOptions {
  std::string in;
  std::string out;
  std::string source = "colorgram";
  int resize = 300;
  int limit = 0;
};

void run_ingest_dir(const IngestOptions& o, const CLI::App* sub) {
  auto loaded = datagen::load_image_dir(o.in, source_from_string(o.source));
  if (loaded.records.empty()) throw Error(ErrorKind::degenerate_input, "no readable images in " + o.in);
  begin_output(o.out, sub);
  datagen::export_dataset(o.out, loaded.records);
  std::ofstream failures(fs::path(o.out) / "failures.csv");
  failures << "id,message\n";
  for (const auto& f : loaded.failures) failures << f.id << ",\"" << f.message << "\"\n";
  std::cerr << "ingested " << loaded.records.size() << " images, " << loaded.failures.size() << " failures\n";
}

void run_ingest_cifar(const IngestOptions& o, const CLI::App* sub) {
  auto images = datagen::load_cifar10(o.in, o.resize);
  if (o.limit > 0 && static_cast<std::size_t>(o.limit) < images.size()) images.resize(o.limit);
  begin_output(o.out, sub);
  datagen::export_dataset(o.out, images);
}

struct EmbedOptions {
  std::string manifest;
  std::string mode = "jzazbz";
  int J = 5;
  int L = 4;
  std::string shuffle = "none";
  std::uint64_t shuffle_seed = 0;
  unsigned threads = 0;
  std::string out;
};

void run_embed(const EmbedOptions& o, const CLI::App* sub) {
  const auto mode = scattering::color_mode_from_string(o.mode);
  auto images = load_manifest(o.manifest);
  if (o.shuffle != "none") {
    const auto scope = o.shuffle == "global"       ? scattering::ShuffleScope::global
                       : o.shuffle == "per_column" ? scattering::ShuffleScope::per_column
                                                   : throw Error(ErrorKind::invalid_argument,
                                                                 "shuffle must be none, global or per_column");
    for (std::size_t i = 0; i < images.size(); ++i) {
      images[i] = scattering::shuffle_pixels(images[i], scope, o.shuffle_seed + i);
    }
  }
  const auto embeddings = scattering::embed_all(images, mode, o.J, o.L, resolve_threads(o.threads));
  begin_output(o.out, sub);
  embedio::write_embeddings(fs::path(o.out) / "embeddings.jsonl", embeddings,
                            embedio::FileMeta{"chromawave", kVersion, o.manifest});
}

struct ClusterOptions {
  std::string embeddings;
  int k = 10;
  std::string init = "kmeanspp";
  int n_init = 10;
  std::uint64_t seed = 0;
  std::string out;
};

void run_cluster(const ClusterOptions& o, const CLI::App* sub) {
  const auto file = embedio::read_embeddings(fs::path(o.embeddings));
  clustering::KMeansOptions opts;
  opts.k = o.k;
  opts.init = clustering::init_from_string(o.init);
  opts.n_init = o.n_init;
  opts.seed = o.seed;
  const auto model = clustering::kmeans(file.records, opts);
  begin_output(o.out, sub);
  std::vector<clustering::Assignment> rows;
  for (std::size_t i = 0; i < file.records.size(); ++i) rows.push_back({file.records[i].image_id, model.labels[i]});
  clustering::write_assignments(fs::path(o.out) / "assignments.csv", rows);
  std::vector<int> sizes(model.k, 0);
  for (int l : model.labels) ++sizes[l];
  write_json(fs::path(o.out) / "model.json", {{"k", model.k},
                                              {"init", clustering::to_string(model.init)},
                                              {"n_init", model.n_init},
                                              {"seed", model.seed},
                                              {"iterations", model.iterations},
                                              {"inertia", model.inertia},
                                              {"cluster_sizes", sizes},
                                              {"centroids", model.centroids}});
}

struct StatsOptions {
  std::string manifest;
  std::string assignments;
  int null_realizations = 100;
  std::uint64_t seed = 0;
  bool plots = false;
  std::string out;
};

void run_coherence(const StatsOptions& o, const CLI::App* sub) {
  const auto images = load_manifest(o.manifest);
  const auto labels = aligned_labels(images, o.assignments);
  std::vector<geometry::Point3> points;
  for (const auto& img : images) points.push_back(colormetrics::to_point(colormetrics::mean_color(img)));
  const auto hulls = colormetrics::coherence_fraction(points, labels);
  const auto null = colormetrics::null_coherence_fraction(points, labels, o.null_realizations, o.seed);

  begin_output(o.out, sub);
  json clusters = json::array();
  for (std::size_t c = 0; c < hulls.cluster_sizes.size(); ++c) {
    clusters.push_back({{"cluster", c},
                        {"size", hulls.cluster_sizes[c]},
                        {"hull_dimension", hulls.cluster_hull_dimension[c]},
                        {"unique_members", hulls.cluster_unique_count[c]}});
  }
  write_json(fs::path(o.out) / "coherence.json",
             {{"f", hulls.f}, {"images", images.size()}, {"null", null_json(null)}, {"per_cluster", clusters}});
  std::ofstream csv(fs::path(o.out) / "points.csv");
  csv << "image_id,cluster,jz,az,bz,containing_hulls\n";
  for (std::size_t i = 0; i < images.size(); ++i) {
    csv << images[i].id << ',' << labels[i] << ',' << fmt(points[i][0]) << ',' << fmt(points[i][1]) << ','
        << fmt(points[i][2]) << ',' << hulls.containing_hulls[i] << '\n';
  }
  if (o.plots) {
    std::vector<svg::Series> series;
    for (std::size_t c = 0; c < hulls.cluster_sizes.size(); ++c) {
      svg::Series s{"cluster " + std::to_string(c), kClusterColors[c % 10], {}, {}};
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (labels[i] == static_cast<int>(c)) {
          s.x.push_back(points[i][1]);
          s.y.push_back(points[i][2]);
        }
      }
      series.push_back(std::move(s));
    }
    svg::scatter(fs::path(o.out) / "points_az_bz.svg", "mean colors by cluster, f = " + svg::fmt(hulls.f), "Az",
                 "Bz", series);
  }
}

void run_similarity(const StatsOptions& o, const CLI::App* sub) {
  const auto images = load_manifest(o.manifest);
  const auto labels = aligned_labels(images, o.assignments);
  std::vector<colormetrics::ColorHistogram> hist;
  for (const auto& img : images) hist.push_back(colormetrics::color_histogram(img));
  const auto stats = colormetrics::within_cluster_similarity(hist, labels);
  const auto null = colormetrics::null_distribution(hist, labels, o.null_realizations, o.seed);

  // Pair-level null sample from the first few relabelings for the histogram.
  std::vector<double> null_pairs;
  for (int r = 0; r < std::min(o.null_realizations, 10); ++r) {
    const auto relabeled = clustering::random_relabel(labels, o.seed + static_cast<std::uint64_t>(r));
    for (const auto& p : colormetrics::within_cluster_similarity(hist, relabeled).pairs) {
      null_pairs.push_back(p.similarity);
    }
  }
  std::vector<double> clustered;
  for (const auto& p : stats.pairs) clustered.push_back(p.similarity);

  begin_output(o.out, sub);
  json means = json::array();
  for (std::size_t c = 0; c < stats.cluster_means.size(); ++c) {
    means.push_back({{"cluster", c},
                     {"pairs", stats.cluster_pair_counts[c]},
                     {"mean", std::isnan(stats.cluster_means[c]) ? json(nullptr) : json(stats.cluster_means[c])}});
  }
  write_json(fs::path(o.out) / "similarity.json",
             {{"grand_mean", stats.grand_mean},
              {"pairs", stats.pairs.size()},
              {"null", null_json(null)},
              {"above_null_hi95", stats.grand_mean > null.hi95},
              {"per_cluster", means}});

  std::ofstream pairs_csv(fs::path(o.out) / "pairs.csv");
  pairs_csv << "pair_id_a,pair_id_b,cluster,similarity\n";
  for (const auto& p : stats.pairs) {
    pairs_csv << images[p.a].id << ',' << images[p.b].id << ',' << p.cluster << ',' << fmt(p.similarity) << '\n';
  }

  std::vector<double> edges;
  for (int i = 0; i <= 20; ++i) edges.push_back(i * 0.05);
  const auto h_clustered = histogram_density(clustered, edges);
  const auto h_null = histogram_density(null_pairs, edges);
  std::ofstream csv(fs::path(o.out) / "histogram.csv");
  csv << "bin_lo,bin_hi,clustered_density,null_density\n";
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    csv << fmt(edges[i]) << ',' << fmt(edges[i + 1]) << ',' << fmt(h_clustered[i]) << ',' << fmt(h_null[i]) << '\n';
  }
  if (o.plots) {
    svg::histograms(fs::path(o.out) / "histogram.svg", "within-cluster color similarity", "C", edges,
                    {{"clustered", "#1f77b4", {}, h_clustered}, {"random relabeling", "#7f7f7f", {}, h_null}});
  }
}

struct VisionOptions {
  std::string manifest;
  std::string embeddings;
  int pairs = 1000;
  std::uint64_t seed = 0;
  bool plots = false;
  std::string out;
};

void run_vision_test(const VisionOptions& o, const CLI::App* sub) {
  const auto images = load_manifest(o.manifest);
  const auto emb = align_embeddings(images, embedio::read_embeddings(fs::path(o.embeddings)).records);
  std::vector<colormetrics::ColorHistogram> hist;
  std::vector<double> jz;
  for (const auto& img : images) {
    hist.push_back(colormetrics::color_histogram(img));
    jz.push_back(colormetrics::mean_color(img).jz);
  }
  const auto idx = analysis::sample_pairs(images.size(), o.pairs, o.seed);
  std::vector<analysis::PairSample> samples;
  std::vector<double> es, cs;
  for (const auto& [a, b] : idx) {
    analysis::PairSample s{images[a].id, images[b].id, analysis::cosine_similarity(emb[a], emb[b]),
                           colormetrics::color_similarity(hist[a], hist[b]), 0.5 * (jz[a] + jz[b])};
    es.push_back(s.embedding_similarity);
    cs.push_back(s.color_similarity);
    samples.push_back(std::move(s));
  }
  const auto rho = analysis::spearman(es, cs);
  const auto lum = analysis::luminance_relation(samples);
  const auto er = analysis::rank_minmax(es);
  const auto cr = analysis::rank_minmax(cs);

  begin_output(o.out, sub);
  write_json(fs::path(o.out) / "vision_test.json",
             {{"pairs", samples.size()},
              {"spearman_rho", rho.degenerate ? json(nullptr) : json(rho.rho)},
              {"p", rho.p},
              {"degenerate", rho.degenerate},
              {"luminance_asymmetry", lum.asymmetry}});
  std::ofstream csv(fs::path(o.out) / "pairs.csv");
  csv << "id_a,id_b,embedding_similarity,color_similarity,embedding_rank_minmax,color_rank_minmax,mean_jz\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    csv << s.id_a << ',' << s.id_b << ',' << fmt(s.embedding_similarity) << ',' << fmt(s.color_similarity) << ','
        << fmt(er[i]) << ',' << fmt(cr[i]) << ',' << fmt(s.mean_jz) << '\n';
  }
  std::ofstream lcsv(fs::path(o.out) / "luminance.csv");
  lcsv << "mean_jz_minmax,embedding_similarity\n";
  for (const auto& r : lum.rows) lcsv << fmt(r.mean_jz_minmax) << ',' << fmt(r.embedding_similarity) << '\n';
  if (o.plots) {
    svg::scatter(fs::path(o.out) / "pairs.svg", "rank similarity, rho = " + svg::fmt(rho.rho), "color similarity",
                 "embedding similarity", {{"", "#1f77b4", cr, er}});
  }
}

struct SurveySelectOptions {
  std::string a = "wavelet:jzazbz";
  std::string b;
  int levels = 6;
  int candidates = 0;
  int n_disagree = 140;
  int n_benchmark = 60;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
};

void run_survey_select(const SurveySelectOptions& o, const CLI::App* sub) {
  const auto palette = datagen::palette(o.levels);
  const std::size_t all = palette.size() * (palette.size() - 1) / 2;
  const std::size_t count = o.candidates > 0 ? static_cast<std::size_t>(o.candidates) : all;
  const auto candidates = survey::candidate_pairs(palette, count, o.seed);
  const unsigned threads = resolve_threads(o.threads);
  const auto ia = tile_embeddings(o.a, palette, threads);
  const auto ib = tile_embeddings(o.b, palette, threads);
  const auto sel = survey::select_stimuli(survey::embedding_scorer(ia), survey::embedding_scorer(ib), candidates,
                                          o.n_disagree, o.n_benchmark, o.seed);
  begin_output(o.out, sub);
  survey::write_stimuli(fs::path(o.out) / "stimuli.csv", sel.pairs);
  write_json(fs::path(o.out) / "selection.json", {{"candidates", candidates.size()},
                                                  {"disagreement_pairs", o.n_disagree},
                                                  {"benchmark_pairs", o.n_benchmark},
                                                  {"fallback", sel.fallback},
                                                  {"scores", sel.scores}});
}

struct SurveySetsOptions {
  std::string stimuli;
  std::string mode = "replication";
  std::uint64_t seed = 0;
  std::string out;
};

void run_survey_sets(const SurveySetsOptions& o, const CLI::App* sub) {
  const auto pairs = survey::read_stimuli(o.stimuli);
  const auto sets = survey::make_sets(pairs.size(), o.seed, survey::set_mode_from_string(o.mode));
  std::array<int, 3> composition{};
  for (const auto& s : sets) ++composition[survey::benchmark_count(s, pairs)];
  begin_output(o.out, sub);
  survey::write_sets(fs::path(o.out) / "sets.csv", sets, pairs);
  write_json(fs::path(o.out) / "composition.json",
             {{"mode", o.mode}, {"sets", sets.size()}, {"benchmark_pairs_per_set", composition}});
}

struct SurveyEvalOptions {
  std::string stimuli;
  std::string sets;
  std::string judgments;
  std::vector<std::string> algorithms;
  double synthetic_temperature = 0.0;
  int respondents = 12;
  std::uint64_t synthetic_seed = 0;
  unsigned threads = 0;
  std::string out;
};

json accuracy_json(const std::vector<survey::AlgorithmChoice>& choices, const std::vector<survey::ComparisonSet>& sets,
                   const std::vector<survey::TilePair>& pairs, const survey::MajoritySummary& maj,
                   const std::vector<survey::Judgment>& records) {
  json out;
  for (auto level : {survey::Level::majority, survey::Level::individual}) {
    for (auto subset : {survey::Subset::all, survey::Subset::benchmark, survey::Subset::non_benchmark}) {
      json entry;
      try {
        const auto a = survey::accuracy(choices, sets, pairs, maj, records, level, subset);
        entry = {{"fraction", a.fraction}, {"matches", a.matches}, {"trials", a.trials}, {"p", a.p}};
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::degenerate_input) throw;
        entry = nullptr;
      }
      out[survey::to_string(level)][survey::to_string(subset)] = entry;
    }
  }
  return out;
}

void run_survey_eval(const SurveyEvalOptions& o, const CLI::App* sub) {
  const auto pairs = survey::read_stimuli(o.stimuli);
  const auto sets = survey::read_sets(o.sets, pairs);
  const auto tiles = stimulus_tiles(pairs);
  const unsigned threads = resolve_threads(o.threads);

  std::vector<survey::Judgment> records;
  bool synthetic = false;
  if (!o.judgments.empty()) {
    records = survey::read_judgments(o.judgments);
  } else {
    const auto oracle = survey::jzazbz_scorer();
    const double t = o.synthetic_temperature < 0 ? survey::median_abs_delta(sets, pairs, oracle)
                                                 : o.synthetic_temperature;
    records = survey::synthesize_judgments(sets, pairs, oracle, o.respondents, t, o.synthetic_seed);
    synthetic = true;
  }
  const auto maj = survey::majority_judgments(records, sets);

  begin_output(o.out, sub);
  if (synthetic) survey::write_judgments(fs::path(o.out) / "judgments.csv", records);

  json results = {{"sets", sets.size()},
                  {"judgments", records.size()},
                  {"synthetic_judgments", synthetic},
                  {"majority_ties", maj.ties},
                  {"sets_without_votes", maj.empty},
                  {"algorithms", json::object()}};

  std::vector<survey::EmbeddingIndex> indices;
  indices.reserve(o.algorithms.size());
  for (const auto& spec : o.algorithms) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::invalid_argument, "algorithm must be name=source: " + spec);
    const std::string name = spec.substr(0, eq);
    const std::string source = spec.substr(eq + 1);

    survey::PairScorer scorer;
    std::vector<survey::AlgorithmChoice> choices;
    if (source == "jzazbz-distance") {
      scorer = survey::jzazbz_scorer();
    } else if (source.rfind("random:", 0) == 0) {
      choices = survey::random_choices(sets.size(), std::stoull(source.substr(7)));
    } else {
      indices.push_back(tile_embeddings(source, tiles, threads));
      scorer = survey::embedding_scorer(indices.back());
    }
    if (scorer) choices = survey::algorithm_choices(sets, pairs, scorer);

    json entry = {{"source", source}, {"ties", survey::tie_count(choices)}};
    entry["accuracy"] = accuracy_json(choices, sets, pairs, maj, records);

    if (scorer) {
      try {
        const auto strength = survey::agreement_strength_correlation(sets, pairs, scorer, maj);
        entry["agreement_strength"] = {{"rho", strength.correlation.degenerate ? json(nullptr)
                                                                               : json(strength.correlation.rho)},
                                       {"p", strength.correlation.p},
                                       {"sets", strength.rows.size()},
                                       {"degenerate", strength.correlation.degenerate}};
        std::ofstream csv(fs::path(o.out) / ("strength_" + name + ".csv"));
        csv << "set_id,delta,vote_share\n";
        for (const auto& r : strength.rows) csv << r.set_id << ',' << fmt(r.delta) << ',' << fmt(r.vote_share) << '\n';
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::degenerate_input) throw;
        entry["agreement_strength"] = nullptr;
      }
      std::ofstream sc(fs::path(o.out) / ("scatter_" + name + ".csv"));
      sc << "pair_id,embedding_similarity_minmax,color_similarity_minmax\n";
      for (const auto& r : survey::similarity_scatter(pairs, scorer)) {
        sc << r.pair_id << ',' << fmt(r.embedding_similarity) << ',' << fmt(r.color_similarity) << '\n';
      }
    }

    const auto errors = survey::perceptual_error_pairs(sets, pairs, choices, maj);
    entry["perceptual_errors"] = errors.size();
    std::ofstream ecsv(fs::path(o.out) / ("errors_" + name + ".csv"));
    ecsv << "set_id,algorithm,human,a1_jz,a1_az,a1_bz,a2_jz,a2_az,a2_bz,b1_jz,b1_az,b1_bz,b2_jz,b2_az,b2_bz\n";
    for (const auto& e : errors) {
      ecsv << e.set_id << ',' << survey::to_string(e.algorithm) << ',' << survey::to_string(e.human);
      for (const auto* side : {&e.pair_a, &e.pair_b}) {
        for (const auto& p : *side) ecsv << ',' << fmt(p.jz) << ',' << fmt(p.az) << ',' << fmt(p.bz);
      }
      ecsv << '\n';
    }
    results["algorithms"][name] = entry;
  }
  write_json(fs::path(o.out) / "results.json", results);
}

struct PcaOptions {
  std::string embeddings;
  int components = 3;
  int m = 5;
  std::string out;
};

void run_pca_extremes(const PcaOptions& o, const CLI::App* sub) {
  const auto file = embedio::read_embeddings(fs::path(o.embeddings));
  const auto result = analysis::pca_extremes(file.records, o.components, o.m);
  begin_output(o.out, sub);
  json comps = json::array();
  for (const auto& c : result.components) {
    comps.push_back({{"component", c.component},
                     {"explained_ratio", c.explained_ratio},
                     {"minimizing", c.minimizing},
                     {"maximizing", c.maximizing}});
  }
  write_json(fs::path(o.out) / "extremes.json", {{"rank_deficient", result.rank_deficient}, {"components", comps}});
}

struct ReportOptions {
  std::vector<std::string> inputs;
  std::string out;
};

void run_report(const ReportOptions& o, const CLI::App* sub) {
  static const std::map<std::string, std::string> kResultFile = {
      {"coherence", "coherence.json"},     {"similarity", "similarity.json"}, {"vision-test", "vision_test.json"},
      {"survey-eval", "results.json"},     {"survey-sets", "composition.json"}, {"survey-select", "selection.json"},
      {"cluster", "model.json"},           {"pca-extremes", "extremes.json"}};
  json report = json::object();
  std::vector<std::pair<fs::path, fs::path>> copies;
  for (const auto& in : o.inputs) {
    const auto config = read_json(fs::path(in) / "config.json");
    const std::string command = config.value("command", "");
    json entry = {{"directory", in}, {"config", config}};
    const auto it = kResultFile.find(command);
    if (it != kResultFile.end()) entry["result"] = read_json(fs::path(in) / it->second);
    const std::string key = report.contains(command) ? command + "_" + std::to_string(report.size()) : command;
    report[key] = entry;
    for (const auto& f : fs::directory_iterator(in)) {
      if (f.path().extension() == ".csv") copies.emplace_back(f.path(), key + "_" + f.path().filename().string());
    }
  }
  begin_output(o.out, sub);
  write_json(fs::path(o.out) / "report.json", report);
  for (const auto& [from, name] : copies) {
    fs::copy_file(from, fs::path(o.out) / name, fs::copy_options::overwrite_existing);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet color-perception experiments"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", kVersion);

  GenOptions gen;
  auto add_gen = [&](CLI::App* s, bool stripes) {
    s->add_option("--n", gen.n, "Number of images");
    s->add_option("--seed", gen.seed, "Random seed");
    s->add_option("--size", gen.size, "Image side in pixels");
    s->add_option("--border", gen.border, "Border width in pixels");
    if (stripes) s->add_option("--stripe-width", gen.stripe_width, "Stripe width in pixels");
    s->add_option("--border-color", gen.border_color, "Border color as RRGGBB");
    s->add_option("--levels", gen.levels, "Palette levels per channel");
    s->add_option("--out", gen.out, "Output directory")->required();
  };
  auto* gen_blocks = app.add_subcommand("gen-blocks", "Render uniform color block images");
  add_gen(gen_blocks, false);
  auto* gen_stripes = app.add_subcommand("gen-stripes", "Render two-color stripe images");
  add_gen(gen_stripes, true);

  IngestOptions ingest;
  auto* ingest_dir = app.add_subcommand("ingest-dir", "Import a directory of PNG images");
  ingest_dir->add_option("--in", ingest.in, "Input directory")->required()->check(CLI::ExistingDirectory);
  ingest_dir->add_option("--source", ingest.source, "Source tag");
  ingest_dir->add_option("--out", ingest.out, "Output directory")->required();
  auto* ingest_cifar = app.add_subcommand("ingest-cifar", "Import a CIFAR-10 binary batch");
  ingest_cifar->add_option("--in", ingest.in, "Batch file")->required()->check(CLI::ExistingFile);
  ingest_cifar->add_option("--resize", ingest.resize, "Output side in pixels");
  ingest_cifar->add_option("--limit", ingest.limit, "Keep only the first N images (0 = all)");
  ingest_cifar->add_option("--out", ingest.out, "Output directory")->required();

  EmbedOptions embed;
  auto* embed_cmd = app.add_subcommand("embed", "Compute wavelet scattering embeddings");
  embed_cmd->add_option("--manifest", embed.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  embed_cmd->add_option("--mode", embed.mode, "jzazbz | rgb | rgb-linear | grayscale");
  embed_cmd->add_option("--J", embed.J, "Number of scales");
  embed_cmd->add_option("--L", embed.L, "Number of orientations");
  embed_cmd->add_option("--shuffle", embed.shuffle, "none | global | per_column");
  embed_cmd->add_option("--shuffle-seed", embed.shuffle_seed, "Seed for pixel shuffling");
  embed_cmd->add_option("--threads", embed.threads, "Worker threads (0 = default)");
  embed_cmd->add_option("--out", embed.out, "Output directory")->required();

  ClusterOptions cluster;
  auto* cluster_cmd = app.add_subcommand("cluster", "k-means clustering of embeddings");
  cluster_cmd->add_option("--embeddings", cluster.embeddings, "Embedding file")->required()->check(CLI::ExistingFile);
  cluster_cmd->add_option("--k", cluster.k, "Number of clusters");
  cluster_cmd->add_option("--init", cluster.init, "kmeanspp | random");
  cluster_cmd->add_option("--n-init", cluster.n_init, "Restarts");
  cluster_cmd->add_option("--seed", cluster.seed, "Random seed");
  cluster_cmd->add_option("--out", cluster.out, "Output directory")->required();

  StatsOptions stats;
  auto add_stats = [&](CLI::App* s) {
    s->add_option("--manifest", stats.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
    s->add_option("--assignments", stats.assignments, "Cluster assignments CSV")->required()->check(CLI::ExistingFile);
    s->add_option("--null", stats.null_realizations, "Random relabelings for the null model");
    s->add_option("--seed", stats.seed, "Random seed");
    s->add_flag("--plots", stats.plots, "Also write SVG plots");
    s->add_option("--out", stats.out, "Output directory")->required();
  };
  auto* coherence = app.add_subcommand("coherence", "Color coherence fraction of a clustering");
  add_stats(coherence);
  auto* similarity = app.add_subcommand("similarity", "Within-cluster color similarity");
  add_stats(similarity);

  VisionOptions vision;
  auto* vision_cmd = app.add_subcommand("vision-test", "Embedding vs color similarity on random pairs");
  vision_cmd->add_option("--manifest", vision.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  vision_cmd->add_option("--embeddings", vision.embeddings, "Embedding file")->required()->check(CLI::ExistingFile);
  vision_cmd->add_option("--pairs", vision.pairs, "Number of random pairs");
  vision_cmd->add_option("--seed", vision.seed, "Random seed");
  vision_cmd->add_flag("--plots", vision.plots, "Also write SVG plots");
  vision_cmd->add_option("--out", vision.out, "Output directory")->required();

  SurveySelectOptions select;
  auto* select_cmd = app.add_subcommand("survey-select", "Choose survey tile pairs");
  select_cmd->add_option("--a", select.a, "Algorithm A: wavelet:<mode> or embedding file keyed by tile hex");
  select_cmd->add_option("--b", select.b, "Algorithm B, same forms as --a")->required();
  select_cmd->add_option("--levels", select.levels, "Palette levels per channel");
  select_cmd->add_option("--candidates", select.candidates, "Candidate pairs (0 = all palette pairs)");
  select_cmd->add_option("--n-disagree", select.n_disagree, "Disagreement pairs");
  select_cmd->add_option("--n-benchmark", select.n_benchmark, "Benchmark pairs");
  select_cmd->add_option("--seed", select.seed, "Random seed");
  select_cmd->add_option("--threads", select.threads, "Worker threads (0 = default)");
  select_cmd->add_option("--out", select.out, "Output directory")->required();

  SurveySetsOptions sets;
  auto* sets_cmd = app.add_subcommand("survey-sets", "Build comparison sets from stimuli");
  sets_cmd->add_option("--stimuli", sets.stimuli, "Stimulus CSV")->required()->check(CLI::ExistingFile);
  sets_cmd->add_option("--mode", sets.mode, "replication | strict");
  sets_cmd->add_option("--seed", sets.seed, "Random seed");
  sets_cmd->add_option("--out", sets.out, "Output directory")->required();

  SurveyEvalOptions eval;
  auto* eval_cmd = app.add_subcommand("survey-eval", "Score algorithms against judgments");
  eval_cmd->add_option("--stimuli", eval.stimuli, "Stimulus CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--sets", eval.sets, "Sets CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--judgments", eval.judgments, "Judgments CSV; omit to synthesize from the JzAzBz oracle")
      ->check(CLI::ExistingFile);
  eval_cmd
      ->add_option("--algorithm", eval.algorithms,
                   "name=source; source is wavelet:<mode>, jzazbz-distance, random:<seed> or an embedding file")
      ->required();
  eval_cmd->add_option("--synthetic-temperature", eval.synthetic_temperature,
                       "Logistic noise for synthesized judgments (0 = noiseless, <0 = median score gap)");
  eval_cmd->add_option("--respondents", eval.respondents, "Synthesized votes per set");
  eval_cmd->add_option("--synthetic-seed", eval.synthetic_seed, "Seed for synthesized judgments");
  eval_cmd->add_option("--threads", eval.threads, "Worker threads (0 = default)");
  eval_cmd->add_option("--out", eval.out, "Output directory")->required();

  PcaOptions pca;
  auto* pca_cmd = app.add_subcommand("pca-extremes", "Images at the extremes of principal components");
  pca_cmd->add_option("--embeddings", pca.embeddings, "Embedding file")->required()->check(CLI::ExistingFile);
  pca_cmd->add_option("--components", pca.components, "Number of components");
  pca_cmd->add_option("--m", pca.m, "Images per extreme");
  pca_cmd->add_option("--out", pca.out, "Output directory")->required();

  ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "Collect command outputs into one bundle");
  report_cmd->add_option("--inputs", report.inputs, "Output directories of earlier commands")
      ->required()
      ->check(CLI::ExistingDirectory);
  report_cmd->add_option("--out", report.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: usage: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*gen_blocks) run_gen_blocks(gen, gen_blocks);
    else if (*gen_stripes) run_gen_stripes(gen, gen_stripes);
    else if (*ingest_dir) run_ingest_dir(ingest, ingest_dir);
    else if (*ingest_cifar) run_ingest_cifar(ingest, ingest_cifar);
    else if (*embed_cmd) run_embed(embed, embed_cmd);
    else if (*cluster_cmd) run_cluster(cluster, cluster_cmd);
    else if (*coherence) run_coherence(stats, coherence);
    else if (*similarity) run_similarity(stats, similarity);
    else if (*vision_cmd) run_vision_test(vision, vision_cmd);
    else if (*select_cmd) run_survey_select(select, select_cmd);
    else if (*sets_cmd) run_survey_sets(sets, sets_cmd);
    else if (*eval_cmd) run_survey_eval(eval, eval_cmd);
    else if (*pca_cmd) run_pca_extremes(pca, pca_cmd);
    else if (*report_cmd) run_report(report, report_cmd);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::invalid_argument ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
