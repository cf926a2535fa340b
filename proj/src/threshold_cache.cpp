#include "copularank/threshold_cache.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace copularank {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "copularank-thresholds";

}  // namespace

ThresholdCache ThresholdCache::open(const std::filesystem::path& path) {
  ThresholdCache cache;
  cache.path_ = path;
  if (!std::filesystem::exists(path)) return cache;

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read threshold cache " + path.string());
  json doc;
  try {
    doc = json::parse(in);
    if (doc.at("format").get<std::string>() != kFormat) {
      throw std::runtime_error("not a threshold cache (format field is '" + doc.at("format").get<std::string>() + "')");
    }
    for (const auto& e : doc.at("entries")) {
      ThresholdKey key;
      key.test = e.at("test").get<std::string>();
      key.sample_size = e.at("sample_size").get<std::size_t>();
      key.subsample_size = e.at("subsample_size").get<int>();
      key.alpha = e.at("alpha").get<double>();
      key.reps = e.at("reps").get<std::size_t>();
      key.seed = e.at("seed").get<std::uint64_t>();
      key.estimator = e.at("estimator").get<std::string>();
      key.num_subsamples = e.at("num_subsamples").get<std::uint64_t>();
      cache.entries_[key] = e.at("threshold").get<double>();
    }
  } catch (const json::exception& err) {
    throw std::runtime_error("malformed threshold cache " + path.string() + ": " + err.what());
  }
  return cache;
}

std::optional<double> ThresholdCache::lookup(const ThresholdKey& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ThresholdCache::store(const ThresholdKey& key, double threshold) { entries_[key] = threshold; }

std::string ThresholdCache::serialize() const {
  json entries = json::array();
  for (const auto& [key, threshold] : entries_) {
    entries.push_back({{"test", key.test},
                       {"sample_size", key.sample_size},
                       {"subsample_size", key.subsample_size},
                       {"alpha", key.alpha},
                       {"reps", key.reps},
                       {"seed", key.seed},
                       {"estimator", key.estimator},
                       {"num_subsamples", key.num_subsamples},
                       {"threshold", threshold}});
  }
  json doc = {{"format", kFormat}, {"version", 1}, {"entries", std::move(entries)}};
  return doc.dump(2) + "\n";
}

void ThresholdCache::save() const {
  if (!path_) return;
  std::ofstream out(*path_);
  if (!out) throw std::runtime_error("cannot write threshold cache " + path_->string());
  out << serialize();
}

}  // namespace copularank
