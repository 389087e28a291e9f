#include "chromawave/embedio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>

#include "chromawave/error.hpp"

namespace chromawave::embedio {
namespace {

using nlohmann::json;

void append_number(std::string& s, double v) {
  // "-0" would parse back as the integer 0 and lose its sign.
  if (v == 0.0 && std::signbit(v)) {
    s += "-0.0";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  s += buf;
}

void check_records(std::span<const Embedding> records) {
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& e = records[i];
    if (e.image_id.empty()) throw Error(ErrorKind::invalid_argument, "record " + std::to_string(i) + " has an empty id");
    if (!ids.insert(e.image_id).second) throw Error(ErrorKind::invalid_argument, "duplicate id " + e.image_id);
    if (e.algorithm != records.front().algorithm) {
      throw Error(ErrorKind::invalid_argument, "mixed algorithm tags in one file");
    }
    if (e.dim() != records.front().dim()) throw Error(ErrorKind::dimension_mismatch, "mixed dimensionality in one file");
    for (double v : e.vector) {
      if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, "non-finite value in " + e.image_id);
    }
  }
}

}  // namespace

std::string format_record(const Embedding& e) {
  std::string s = "{\"id\":";
  s += json(e.image_id).dump();
  s += ",\"alg\":";
  s += json(e.algorithm).dump();
  s += ",\"tag\":";
  s += json(e.tag).dump();
  s += ",\"dim\":";
  s += std::to_string(e.dim());
  s += ",\"v\":[";
  for (std::size_t i = 0; i < e.vector.size(); ++i) {
    if (i) s += ',';
    append_number(s, e.vector[i]);
  }
  s += "]}";
  return s;
}

void write_embeddings(std::ostream& out, std::span<const Embedding> records, const std::optional<FileMeta>& meta) {
  check_records(records);
  if (meta) {
    json m = {{"meta", {{"producer", meta->producer}, {"version", meta->version}, {"manifest", meta->manifest}}}};
    out << m.dump() << '\n';
  }
  for (const auto& e : records) out << format_record(e) << '\n';
  if (!out) throw Error(ErrorKind::io, "write failed");
}

void write_embeddings(const std::filesystem::path& path, std::span<const Embedding> records,
                      const std::optional<FileMeta>& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  write_embeddings(out, records, meta);
}

Reader::Reader(std::istream& in) : in_(in) {}

bool Reader::next(Embedding& out) {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;

    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw LineError(ErrorKind::format, line_, "malformed JSON");
    }
    if (!j.is_object()) throw LineError(ErrorKind::format, line_, "record is not an object");

    if (j.contains("meta")) {
      if (records_ > 0 || meta_) throw LineError(ErrorKind::format, line_, "meta must be the first line");
      const auto& m = j["meta"];
      if (!m.is_object()) throw LineError(ErrorKind::format, line_, "meta is not an object");
      FileMeta fm;
      fm.producer = m.value("producer", "");
      fm.version = m.value("version", "");
      fm.manifest = m.value("manifest", "");
      meta_ = fm;
      continue;
    }

    for (const char* key : {"id", "alg", "tag", "dim", "v"}) {
      if (!j.contains(key)) throw LineError(ErrorKind::format, line_, std::string("missing field ") + key);
    }
    if (!j["id"].is_string() || !j["alg"].is_string() || !j["tag"].is_string()) {
      throw LineError(ErrorKind::format, line_, "id, alg and tag must be strings");
    }
    if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 0) {
      throw LineError(ErrorKind::format, line_, "dim must be a non-negative integer");
    }
    if (!j["v"].is_array()) throw LineError(ErrorKind::format, line_, "v must be an array");

    Embedding e;
    e.image_id = j["id"].get<std::string>();
    e.algorithm = j["alg"].get<std::string>();
    e.tag = j["tag"].get<std::string>();
    if (e.image_id.empty()) throw LineError(ErrorKind::format, line_, "empty id");
    const auto dim = static_cast<std::size_t>(j["dim"].get<long long>());
    const auto& v = j["v"];
    if (v.size() != dim) {
      throw LineError(ErrorKind::dimension_mismatch, line_,
                      "dim " + std::to_string(dim) + " but vector has " + std::to_string(v.size()) + " values");
    }
    e.vector.reserve(dim);
    for (const auto& x : v) {
      if (!x.is_number()) throw LineError(ErrorKind::format, line_, "non-numeric vector entry");
      e.vector.push_back(x.get<double>());
    }

    if (records_ == 0) {
      alg_ = e.algorithm;
      dim_ = dim;
    } else {
      if (e.algorithm != alg_) throw LineError(ErrorKind::format, line_, "algorithm tag differs from first record");
      if (dim != dim_) throw LineError(ErrorKind::dimension_mismatch, line_, "dim differs from first record");
    }
    if (!ids_.insert(e.image_id).second) throw LineError(ErrorKind::format, line_, "duplicate id " + e.image_id);
    ++records_;
    out = std::move(e);
    return true;
  }
  if (in_.bad()) throw Error(ErrorKind::io, "read failed");
  return false;
}

EmbeddingFile read_embeddings(std::istream& in) {
  Reader reader(in);
  EmbeddingFile file;
  Embedding e;
  while (reader.next(e)) file.records.push_back(std::move(e));
  file.meta = reader.meta();
  return file;
}

EmbeddingFile read_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  return read_embeddings(in);
}

}  // namespace chromawave::embedio
