/*
 * Copyright 2026 The signpose Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "signpose/distance.hpp"
#include "signpose/pose.hpp"

namespace signpose {

/// Mean absolute length error reported for the neural length predictor on
/// the original corpus. Informational; nothing here reproduces it.
inline constexpr double kReferenceMeanLengthError = 3.61;

struct LabeledSample {
  std::string id;
  std::string label;
  std::string language;
  std::string signer;
  PoseSequenced pose;
  std::optional<PoseSequenced> prediction;
};

struct RetrievalScores {
  std::map<int, double> precision;  // keyed by k
  double map = 0;
  std::size_t signs = 0;
  std::size_t queries = 0;
};

struct RankScores {
  std::map<int, double> rank;  // keyed by k
  std::size_t queries = 0;
};

struct LengthPair {
  double predicted = 0;
  double real = 0;
};

struct Histogram {
  double bin_width = 1;
  std::map<std::int64_t, std::size_t> counts;  // bin index -> count; bin i covers [i*w, (i+1)*w)

  std::size_t total() const;
};

struct SeqLenStats {
  std::size_t count = 0;
  double mean_abs_diff = 0;
  double mean_signed_pct = 0;
  Histogram abs_diff;
  Histogram signed_pct;
};

struct LanguageScores {
  std::optional<RetrievalScores> retrieval;
  std::map<std::string, RankScores> ranks;
};

struct EvalReport {
  std::string protocol;
  std::string metric;
  std::uint64_t seed = 0;
  std::optional<RetrievalScores> retrieval;
  std::map<std::string, RankScores> ranks;  // keyed by reference mode
  std::map<std::string, LanguageScores> per_language;
  std::optional<SeqLenStats> seq_len;
  /// "without_replacement", or "with_replacement" if any sign's negatives
  /// had to be drawn with replacement.
  std::string negative_sampling;
};

struct RetrievalOptions {
  std::vector<int> ks{1, 5, 10};
  int negative_ratio = 4;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Distance from sample `ref` to sample `candidate`, by dataset index.
using IndexDistance = std::function<double(std::size_t ref, std::size_t candidate)>;

/// Per-sign retrieval: positives are the other samples of the sign,
/// negatives are negative_ratio * |sign| samples of other signs. Scores are
/// averaged per sign, then across signs. Signs with a single sample are
/// skipped. Ties rank by ascending id.
EvalReport retrieval_validation(std::span<const std::string> ids,
                                std::span<const std::string> labels,
                                std::span<const std::string> languages,
                                const IndexDistance& distance,
                                const RetrievalOptions& options = {});

EvalReport retrieval_validation(std::span<const LabeledSample> dataset, const Metric& metric,
                                const RetrievalOptions& options = {});

enum class ReferenceMode { kPrediction, kGroundTruth };
std::string to_string(ReferenceMode mode);

struct RankOptions {
  std::vector<int> ks{1, 5, 10};
  std::size_t gt_gallery = 20;
  std::size_t prediction_gallery = 20;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::vector<ReferenceMode> modes{ReferenceMode::kPrediction, ReferenceMode::kGroundTruth};
};

/// For each sample with a prediction, ranks its counterpart against a
/// gallery of ground-truth samples from `pool` and predictions of the other
/// pairs. The pair's own id never enters its gallery.
EvalReport distance_ranks(std::span<const LabeledSample> pairs,
                          std::span<const LabeledSample> pool, const Metric& metric,
                          const RankOptions& options = {});

/// (train, test): test holds exactly the samples of `held_out_language`.
std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>> leave_one_out_split(
    std::span<const LabeledSample> dataset, const std::string& held_out_language);

/// Distance ranks per held-out language, with every gallery drawn from that
/// language. An empty `languages` evaluates every language present.
EvalReport leave_one_out_ranks(std::span<const LabeledSample> dataset, const Metric& metric,
                               const RankOptions& options = {},
                               std::vector<std::string> languages = {});

/// |N - N_hat| and signed percentage 100 * (N_hat - N) / N.
SeqLenStats seq_len_error_stats(std::span<const LengthPair> pairs, double abs_bin_width = 1.0,
                                double pct_bin_width = 5.0);

nlohmann::json to_json(const EvalReport& report);
void print_report(std::ostream& out, const EvalReport& report);

}  // namespace signpose
