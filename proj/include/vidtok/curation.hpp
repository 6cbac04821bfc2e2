// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vidtok/error.hpp"
#include "vidtok/geometry.hpp"

namespace vidtok {

// Text location with corners normalized to [0, 1].
struct TextBox {
  std::string text;
  std::array<double, 4> box{};  // x1, y1, x2, y2

  void validate() const {
    const auto [x1, y1, x2, y2] = box;
    for (double v : box) {
      if (!(v >= 0.0 && v <= 1.0)) throw InputError("box coordinates must lie in [0,1]");
    }
    if (x1 > x2 || y1 > y2) throw InputError("box corners must satisfy x1<=x2, y1<=y2");
  }

  friend bool operator==(const TextBox&, const TextBox&) = default;
};

struct CurationSample {
  std::string id;
  Resolution resolution;
  std::optional<std::string> caption;
  std::optional<std::vector<double>> feature;
  std::map<std::string, double> scores;
  std::vector<TextBox> boxes;
  std::vector<std::string> notes;

  friend bool operator==(const CurationSample&, const CurationSample&) = default;
};

using Batch = std::vector<CurationSample>;

struct Partition {
  Batch kept;
  Batch removed;
};

inline void validate_batch(const Batch& batch) {
  std::set<std::string> ids;
  std::optional<std::size_t> dim;
  for (const auto& s : batch) {
    if (!ids.insert(s.id).second) {
      throw InputError("duplicate sample id '" + s.id + "'");
    }
    if (s.feature) {
      if (dim && *dim != s.feature->size()) {
        throw DimensionMismatch("sample '" + s.id + "' feature dimension differs from batch");
      }
      dim = s.feature->size();
    }
    for (const auto& b : s.boxes) b.validate();
  }
}

inline Partition filter_aspect_ratio(const Batch& batch, double min_ratio = 1.0 / 3.0,
                                     double max_ratio = 3.0) {
  if (!(min_ratio > 0.0) || !(min_ratio <= max_ratio)) {
    throw ConfigError("aspect bounds must satisfy 0 < min <= max");
  }
  Partition p;
  for (const auto& s : batch) {
    const double ratio =
        static_cast<double>(s.resolution.width) / static_cast<double>(s.resolution.height);
    if (ratio >= min_ratio && ratio <= max_ratio) {
      p.kept.push_back(s);
    } else {
      CurationSample r = s;
      r.notes.push_back("aspect ratio " + std::to_string(ratio) + " outside bounds");
      p.removed.push_back(std::move(r));
    }
  }
  return p;
}

using Scorer = std::function<double(const CurationSample&)>;

// Scorer that reads a precomputed score (e.g. from an external aesthetic or
// similarity model) stored on the sample.
inline Scorer stored_score(std::string name) {
  return [name = std::move(name)](const CurationSample& s) {
    auto it = s.scores.find(name);
    if (it == s.scores.end()) throw InputError("no stored score '" + name + "'");
    return it->second;
  };
}

// Kept iff score >= threshold. A scorer that throws or returns NaN sends the
// sample to `removed` with a note instead of aborting the batch.
inline Partition filter_by_score(const Batch& batch, const Scorer& scorer,
                                 const std::string& score_name, double threshold) {
  Partition p;
  for (const auto& s : batch) {
    CurationSample out = s;
    std::optional<double> score;
    try {
      score = scorer(s);
      if (std::isnan(*score)) {
        score.reset();
        out.notes.push_back("scorer '" + score_name + "' returned NaN");
      }
    } catch (const std::exception& e) {
      out.notes.push_back("scorer '" + score_name + "' failed: " + e.what());
    }
    if (score) {
      out.scores[score_name] = *score;
    }
    if (score && *score >= threshold) {
      p.kept.push_back(std::move(out));
    } else {
      if (score) out.notes.push_back(score_name + " below " + std::to_string(threshold));
      p.removed.push_back(std::move(out));
    }
  }
  return p;
}

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i] - b[i];
    d += x * x;
  }
  return d;
}

}  // namespace detail

struct ClusterResult {
  std::vector<std::size_t> assignment;
  std::vector<std::vector<double>> centroids;
};

// Lloyd iterations from a seeded farthest-point start. Ties in assignment go
// to the lower cluster index; an empty cluster keeps its previous centroid.
inline ClusterResult lloyd_cluster(const std::vector<std::vector<double>>& features, std::size_t k,
                                   std::uint64_t seed, std::size_t max_iterations = 100) {
  const std::size_t n = features.size();
  if (n == 0 || k == 0 || k > n) {
    throw ConfigError("lloyd_cluster needs 1 <= k <= n");
  }
  const std::size_t dim = features[0].size();
  for (const auto& f : features) {
    if (f.size() != dim) throw DimensionMismatch("feature vectors differ in dimension");
  }

  // First center: the sample nearest a seeded probe drawn inside the bounding
  // box, so the start does not depend on sample order.
  std::mt19937_64 rng(seed);
  std::vector<double> lo = features[0];
  std::vector<double> hi = features[0];
  for (const auto& f : features) {
    for (std::size_t j = 0; j < dim; ++j) {
      lo[j] = std::min(lo[j], f[j]);
      hi[j] = std::max(hi[j], f[j]);
    }
  }
  std::vector<double> probe(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    probe[j] = lo[j] + static_cast<double>(rng() >> 11) * 0x1.0p-53 * (hi[j] - lo[j]);
  }
  std::size_t first = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const double di = detail::squared_distance(features[i], probe);
    const double df = detail::squared_distance(features[first], probe);
    if (di < df || (di == df && features[i] < features[first])) first = i;
  }
  std::vector<std::size_t> centers{first};
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], detail::squared_distance(features[i], features[centers.back()]));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (nearest[i] > nearest[best] ||
          (nearest[i] == nearest[best] && features[i] < features[best])) {
        best = i;
      }
    }
    centers.push_back(best);
  }

  ClusterResult res;
  for (std::size_t c : centers) res.centroids.push_back(features[c]);
  res.assignment.assign(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = detail::squared_distance(features[i], res.centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = detail::squared_distance(features[i], res.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (res.assignment[i] != best) {
        res.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = res.assignment[i];
      ++counts[c];
      for (std::size_t j = 0; j < dim; ++j) sums[c][j] += features[i][j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        res.centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
      }
    }
  }
  return res;
}

// Clusters the features into k groups and keeps the per_cluster members of
// each group nearest its centroid (ties by lower index). Returns sorted
// indices. When the batch already fits the k * per_cluster quota (including
// fewer samples than k) every sample is selected, which keeps the stage
// idempotent on its own output.
inline std::vector<std::size_t> cluster_select(const std::vector<std::vector<double>>& features,
                                               std::size_t k, std::size_t per_cluster,
                                               std::uint64_t seed) {
  if (k < 1 || per_cluster < 1) {
    throw ConfigError("cluster_select needs k >= 1 and per_cluster >= 1");
  }
  if (features.empty()) {
    throw InputError("cluster_select needs at least one feature vector");
  }
  const std::size_t n = features.size();
  if (n <= k || n <= k * per_cluster) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  const ClusterResult res = lloyd_cluster(features, k, seed);
  std::vector<std::size_t> selected;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::pair<double, std::size_t>> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (res.assignment[i] == c) {
        members.emplace_back(detail::squared_distance(features[i], res.centroids[c]), i);
      }
    }
    std::sort(members.begin(), members.end());
    for (std::size_t j = 0; j < std::min(per_cluster, members.size()); ++j) {
      selected.push_back(members[j].second);
    }
  }
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
  return selected;
}

inline Partition filter_by_cluster(const Batch& batch, std::size_t k, std::size_t per_cluster,
                                   std::uint64_t seed) {
  Partition p;
  std::vector<std::vector<double>> features;
  std::vector<std::size_t> with_feature;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].feature) {
      features.push_back(*batch[i].feature);
      with_feature.push_back(i);
    }
  }
  std::vector<bool> keep(batch.size(), false);
  if (!features.empty()) {
    for (std::size_t j : cluster_select(features, k, per_cluster, seed)) {
      keep[with_feature[j]] = true;
    }
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (keep[i]) {
      p.kept.push_back(batch[i]);
    } else {
      CurationSample r = batch[i];
      r.notes.push_back(batch[i].feature ? "not selected by clustering" : "missing feature");
      p.removed.push_back(std::move(r));
    }
  }
  return p;
}

struct CurationStage {
  enum class Kind { kAspect, kScore, kCluster };
  Kind kind = Kind::kAspect;
  std::string score_name;
  double min_ratio = 1.0 / 3.0;
  double max_ratio = 3.0;
  double threshold = 0.0;
  std::size_t clusters = 1;
  std::size_t per_cluster = 1;

  std::string label() const {
    switch (kind) {
      case Kind::kAspect:
        return "aspect";
      case Kind::kScore:
        return "score:" + score_name;
      case Kind::kCluster:
        return "cluster";
    }
    return "?";
  }
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(const std::string& s, const std::string& ctx) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError("bad number '" + s + "' in " + ctx);
  return v;
}

inline std::size_t parse_count(const std::string& s, const std::string& ctx) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("bad count '" + s + "' in " + ctx);
  }
  return std::stoul(s);
}

}  // namespace detail

// "aspect[:min:max],score:<name>:<threshold>,cluster:<k>:<per_cluster>"
inline std::vector<CurationStage> parse_stages(const std::string& spec) {
  std::vector<CurationStage> stages;
  for (const auto& token : detail::split(spec, ',')) {
    const auto parts = detail::split(token, ':');
    CurationStage st;
    if (parts[0] == "aspect" && (parts.size() == 1 || parts.size() == 3)) {
      st.kind = CurationStage::Kind::kAspect;
      if (parts.size() == 3) {
        st.min_ratio = detail::parse_double(parts[1], token);
        st.max_ratio = detail::parse_double(parts[2], token);
      }
    } else if (parts[0] == "score" && parts.size() == 3 && !parts[1].empty()) {
      st.kind = CurationStage::Kind::kScore;
      st.score_name = parts[1];
      st.threshold = detail::parse_double(parts[2], token);
    } else if (parts[0] == "cluster" && parts.size() == 3) {
      st.kind = CurationStage::Kind::kCluster;
      st.clusters = detail::parse_count(parts[1], token);
      st.per_cluster = detail::parse_count(parts[2], token);
      if (st.clusters < 1 || st.per_cluster < 1) {
        throw ConfigError("cluster stage needs k >= 1 and per_cluster >= 1");
      }
    } else {
      throw ConfigError("unknown curation stage '" + token + "'");
    }
    stages.push_back(st);
  }
  return stages;
}

// Runs the stages in order. Each removed sample is annotated with the stage
// that rejected it. Score stages default to stored_score(name) unless a
// scorer is registered under that name.
inline Partition run_curation(const Batch& batch, const std::vector<CurationStage>& stages,
                              std::uint64_t seed,
                              const std::map<std::string, Scorer>& scorers = {}) {
  validate_batch(batch);
  Partition total{batch, {}};
  for (const auto& st : stages) {
    Partition step;
    switch (st.kind) {
      case CurationStage::Kind::kAspect:
        step = filter_aspect_ratio(total.kept, st.min_ratio, st.max_ratio);
        break;
      case CurationStage::Kind::kScore: {
        auto it = scorers.find(st.score_name);
        const Scorer scorer = it != scorers.end() ? it->second : stored_score(st.score_name);
        step = filter_by_score(total.kept, scorer, st.score_name, st.threshold);
        break;
      }
      case CurationStage::Kind::kCluster:
        step = filter_by_cluster(total.kept, st.clusters, st.per_cluster, seed);
        break;
    }
    for (auto& r : step.removed) {
      r.notes.push_back("rejected_by=" + st.label());
      total.removed.push_back(std::move(r));
    }
    total.kept = std::move(step.kept);
  }
  return total;
}

}  // namespace vidtok
