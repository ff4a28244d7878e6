#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "margin/types.hpp"

namespace margin {

using json = nlohmann::ordered_json;

// Writes whole-file content through a temp file + rename so readers never see
// a partially written file.
inline void atomic_write_text(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Dataset format: JSON Lines. Optional first record {"dim": d, "meta": {...}};
// sample records {"x": [...], "y": 1|-1, "p": f64} with "p" either present on
// every record or absent on all (then uniform 1/m).
inline std::string dataset_to_jsonl(const WeightedDataset& D, const json& meta = json::object()) {
  std::ostringstream os;
  json header;
  header["dim"] = D.dim;
  header["meta"] = meta;
  os << header.dump() << "\n";
  for (Eigen::Index i = 0; i < D.size(); ++i) {
    json rec;
    rec["x"] = std::vector<double>(D.X.row(i).begin(), D.X.row(i).end());
    rec["y"] = D.label(i);
    rec["p"] = D.p[i];
    os << rec.dump() << "\n";
  }
  return os.str();
}

inline void write_jsonl(const WeightedDataset& D, const std::string& path,
                        const json& meta = json::object()) {
  atomic_write_text(path, dataset_to_jsonl(D, meta));
}

inline WeightedDataset dataset_from_jsonl(const std::string& text, json* meta_out = nullptr) {
  std::istringstream in(text);
  std::string line;
  std::vector<LabeledSample> samples;
  std::vector<double> probs;
  bool first = true;
  bool any_p = false, all_p = true;
  int dim = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    if (first && rec.contains("dim") && !rec.contains("x")) {
      dim = rec.at("dim").get<int>();
      if (meta_out && rec.contains("meta")) *meta_out = rec.at("meta");
      first = false;
      continue;
    }
    first = false;
    LabeledSample s;
    auto xs = rec.at("x").get<std::vector<double>>();
    s.x = Eigen::Map<Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    s.y = rec.at("y").get<int>();
    if (s.y != 1 && s.y != -1) throw std::runtime_error("dataset: label must be 1 or -1");
    if (rec.contains("p")) {
      any_p = true;
      probs.push_back(rec.at("p").get<double>());
    } else {
      all_p = false;
      probs.push_back(0.0);
    }
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw std::runtime_error("dataset: no sample records");
  if (any_p && !all_p) throw std::runtime_error("dataset: 'p' present on some records but not all");
  if (!any_p)
    for (auto& q : probs) q = 1.0 / static_cast<double>(samples.size());
  WeightedDataset D = WeightedDataset::from_samples(samples, probs);
  if (dim >= 0 && dim != D.dim) throw std::runtime_error("dataset: header dim != sample dim");
  return D;
}

inline WeightedDataset read_jsonl(const std::string& path, json* meta_out = nullptr) {
  return dataset_from_jsonl(read_text(path), meta_out);
}

// Snake-case report schema. The four margin-error entries are mirrored as flat
// train_margin_* keys matching the sweep CSV column names.
inline json report_to_json(const LearnReport& r, bool zero_wallclock = false) {
  json j;
  j["hypothesis"] = {{"w", std::vector<double>(r.hypothesis.w.begin(), r.hypothesis.w.end())}};
  j["train_zero_one"] = r.train_zero_one;
  j["train_margin_errors"] = {{"g", r.train_margin_errors.g},
                              {"g2", r.train_margin_errors.g2},
                              {"g4", r.train_margin_errors.g4},
                              {"g099", r.train_margin_errors.g099}};
  j["train_margin_g"] = r.train_margin_errors.g;
  j["train_margin_g2"] = r.train_margin_errors.g2;
  j["train_margin_g4"] = r.train_margin_errors.g4;
  j["train_margin_099g"] = r.train_margin_errors.g099;
  j["candidates_examined"] = r.candidates_examined;
  j["wallclock_ms"] = zero_wallclock ? 0 : r.wallclock_ms;
  j["seed"] = r.seed;
  j["truncated"] = r.truncated;
  j["size_estimate"] = r.size_estimate;
  j["flags"] = r.flags;
  j["extras"] = r.extras;
  return j;
}

// Serialization with timing removed; reruns with identical inputs must match
// this byte for byte.
inline std::string canonical_report(const LearnReport& r) {
  return report_to_json(r, /*zero_wallclock=*/true).dump();
}

}  // namespace margin
