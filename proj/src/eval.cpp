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

#include "signpose/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

#include "signpose/error.hpp"
#include "signpose/parallel.hpp"

namespace signpose {

namespace {

std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

/// `count` draws from `population`: without replacement when it is large
/// enough, otherwise with replacement. Returns whether replacement was used.
bool draw(std::span<const std::size_t> population, std::size_t count, std::mt19937_64& rng,
          std::vector<std::size_t>& out) {
  out.clear();
  if (count == 0 || population.empty()) return false;
  if (population.size() >= count) {
    std::vector<std::size_t> pool(population.begin(), population.end());
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
      out.push_back(pool[i]);
    }
    return false;
  }
  std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
  for (std::size_t i = 0; i < count; ++i) out.push_back(population[pick(rng)]);
  return true;
}

struct QueryResult {
  std::size_t sign = 0;
  std::string language;
  std::map<int, double> precision;
  double average_precision = 0;
};

/// Mean over signs of the per-sign mean of each query score.
RetrievalScores aggregate(const std::vector<const QueryResult*>& queries,
                          std::span<const int> ks) {
  std::map<std::size_t, std::vector<const QueryResult*>> by_sign;
  for (const QueryResult* q : queries) by_sign[q->sign].push_back(q);
  RetrievalScores s;
  s.signs = by_sign.size();
  s.queries = queries.size();
  for (int k : ks) s.precision[k] = 0;
  for (const auto& [sign, members] : by_sign) {
    const double n = static_cast<double>(members.size());
    for (int k : ks) {
      double sum = 0;
      for (const QueryResult* q : members) sum += q->precision.at(k);
      s.precision[k] += sum / n;
    }
    double ap = 0;
    for (const QueryResult* q : members) ap += q->average_precision;
    s.map += ap / n;
  }
  if (s.signs > 0) {
    for (int k : ks) s.precision[k] /= static_cast<double>(s.signs);
    s.map /= static_cast<double>(s.signs);
  }
  return s;
}

void require_ks(std::span<const int> ks) {
  if (ks.empty()) throw Error(ErrorCode::kInvalidArgument, "no k values requested");
  for (int k : ks) {
    if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  }
}

}  // namespace

std::size_t Histogram::total() const {
  std::size_t n = 0;
  for (const auto& [bin, count] : counts) n += count;
  return n;
}

EvalReport retrieval_validation(std::span<const std::string> ids,
                                std::span<const std::string> labels,
                                std::span<const std::string> languages,
                                const IndexDistance& distance, const RetrievalOptions& options) {
  if (ids.size() != labels.size() || ids.size() != languages.size()) {
    throw Error(ErrorCode::kInvalidArgument, "ids, labels and languages differ in length");
  }
  require_ks(options.ks);
  if (options.negative_ratio < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative ratio must be >= 0");
  }

  std::map<std::string, std::vector<std::size_t>> signs;
  for (std::size_t i = 0; i < ids.size(); ++i) signs[labels[i]].push_back(i);

  struct Query {
    std::size_t sign;
    std::size_t ref;
    std::vector<std::size_t> candidates;
  };
  std::vector<Query> queries;
  bool with_replacement = false;
  std::size_t sign_index = 0;
  std::vector<std::size_t> negatives;
  for (const auto& [label, members] : signs) {
    const std::size_t this_sign = sign_index++;
    if (members.size() < 2) continue;
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (labels[i] != label) others.push_back(i);
    }
    if (others.empty()) {
      throw Error(ErrorCode::kInsufficientSamples, "no samples of other signs to use as negatives");
    }
    auto rng = seeded_rng(options.seed, this_sign);
    const std::size_t wanted = static_cast<std::size_t>(options.negative_ratio) * members.size();
    with_replacement |= draw(others, wanted, rng, negatives);
    for (std::size_t ref : members) {
      Query q{this_sign, ref, {}};
      for (std::size_t m : members) {
        if (m != ref) q.candidates.push_back(m);
      }
      q.candidates.insert(q.candidates.end(), negatives.begin(), negatives.end());
      queries.push_back(std::move(q));
    }
  }
  if (queries.empty()) {
    throw Error(ErrorCode::kInsufficientSamples, "no sign has at least two samples");
  }

  std::vector<QueryResult> results(queries.size());
  parallel_for(queries.size(), options.threads, [&](std::size_t qi) {
    const Query& q = queries[qi];
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(q.candidates.size());
    for (std::size_t c : q.candidates) ranked.emplace_back(distance(q.ref, c), c);
    std::stable_sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return ids[a.second] < ids[b.second];
    });

    QueryResult& r = results[qi];
    r.sign = q.sign;
    r.language = languages[q.ref];
    const std::string& label = labels[q.ref];
    std::size_t hits = 0;
    double ap = 0;
    std::vector<std::size_t> hits_at(ranked.size() + 1, 0);
    for (std::size_t pos = 0; pos < ranked.size(); ++pos) {
      if (labels[ranked[pos].second] == label) {
        ++hits;
        ap += static_cast<double>(hits) / static_cast<double>(pos + 1);
      }
      hits_at[pos + 1] = hits;
    }
    r.average_precision = hits > 0 ? ap / static_cast<double>(hits) : 0.0;
    for (int k : options.ks) {
      const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
      r.precision[k] = static_cast<double>(hits_at[top]) / static_cast<double>(k);
    }
  });

  EvalReport report;
  report.protocol = "retrieval";
  report.seed = options.seed;
  report.negative_sampling = with_replacement ? "with_replacement" : "without_replacement";

  std::vector<const QueryResult*> all;
  std::map<std::string, std::vector<const QueryResult*>> by_language;
  for (const QueryResult& r : results) {
    all.push_back(&r);
    by_language[r.language].push_back(&r);
  }
  report.retrieval = aggregate(all, options.ks);
  for (const auto& [lang, members] : by_language) {
    report.per_language[lang].retrieval = aggregate(members, options.ks);
  }
  return report;
}

EvalReport retrieval_validation(std::span<const LabeledSample> dataset, const Metric& metric,
                                const RetrievalOptions& options) {
  std::vector<std::string> ids, labels, languages;
  std::vector<PoseSequenced> prepared(dataset.size());
  for (const auto& s : dataset) {
    ids.push_back(s.id);
    labels.push_back(s.label);
    languages.push_back(s.language);
  }
  parallel_for(dataset.size(), options.threads,
               [&](std::size_t i) { prepared[i] = metric.prepare(dataset[i].pose); });
  EvalReport report = retrieval_validation(
      ids, labels, languages,
      [&](std::size_t a, std::size_t b) { return metric.distance(prepared[a], prepared[b]); },
      options);
  report.metric = metric.name;
  return report;
}

std::string to_string(ReferenceMode mode) {
  return mode == ReferenceMode::kPrediction ? "prediction" : "gt";
}

EvalReport distance_ranks(std::span<const LabeledSample> pairs,
                          std::span<const LabeledSample> pool, const Metric& metric,
                          const RankOptions& options) {
  require_ks(options.ks);
  for (const auto& p : pairs) {
    if (!p.prediction) {
      throw Error(ErrorCode::kInvalidArgument, "sample '" + p.id + "' has no prediction");
    }
  }
  {
    std::set<std::string> seen;
    for (const auto& p : pairs) {
      if (!seen.insert(p.id).second) throw Error(ErrorCode::kDuplicateId, "pair id '" + p.id + "'");
    }
  }

  std::vector<PoseSequenced> pair_gt(pairs.size()), pair_pred(pairs.size()), pool_gt(pool.size());
  parallel_for(pairs.size(), options.threads, [&](std::size_t i) {
    pair_gt[i] = metric.prepare(pairs[i].pose);
    pair_pred[i] = metric.prepare(*pairs[i].prediction);
  });
  parallel_for(pool.size(), options.threads,
               [&](std::size_t i) { pool_gt[i] = metric.prepare(pool[i].pose); });

  // Gallery items are (is_prediction, index); GT items index `pool`,
  // prediction items index `pairs`.
  struct Item {
    bool prediction;
    std::size_t index;
  };
  struct Gallery {
    std::vector<Item> items;
  };
  std::vector<Gallery> galleries(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::vector<std::size_t> gt_pool, pred_pool, drawn;
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (pool[j].id != pairs[i].id) gt_pool.push_back(j);
    }
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      if (j != i) pred_pool.push_back(j);
    }
    if (gt_pool.size() < options.gt_gallery || pred_pool.size() < options.prediction_gallery) {
      throw Error(ErrorCode::kPoolTooSmall,
                  "need " + std::to_string(options.gt_gallery) + " ground-truth and " +
                      std::to_string(options.prediction_gallery) +
                      " prediction distractors per pair");
    }
    auto rng = seeded_rng(options.seed, i);
    draw(gt_pool, options.gt_gallery, rng, drawn);
    for (std::size_t j : drawn) galleries[i].items.push_back({false, j});
    draw(pred_pool, options.prediction_gallery, rng, drawn);
    for (std::size_t j : drawn) galleries[i].items.push_back({true, j});
  }

  EvalReport report;
  report.protocol = "ranks";
  report.metric = metric.name;
  report.seed = options.seed;

  for (ReferenceMode mode : options.modes) {
    std::vector<std::size_t> rank(pairs.size(), 0);
    parallel_for(pairs.size(), options.threads, [&](std::size_t i) {
      const bool ref_is_pred = mode == ReferenceMode::kPrediction;
      const PoseSequenced& reference = ref_is_pred ? pair_pred[i] : pair_gt[i];
      const PoseSequenced& counterpart = ref_is_pred ? pair_gt[i] : pair_pred[i];
      const double target = metric.distance(reference, counterpart);
      const auto target_key = std::make_pair(pairs[i].id, !ref_is_pred);
      std::size_t better = 0;
      for (const Item& item : galleries[i].items) {
        const PoseSequenced& other = item.prediction ? pair_pred[item.index] : pool_gt[item.index];
        const double d = metric.distance(reference, other);
        const auto key = std::make_pair(
            item.prediction ? pairs[item.index].id : pool[item.index].id, item.prediction);
        if (d < target || (d == target && key < target_key)) ++better;
      }
      rank[i] = better + 1;
    });

    std::map<std::string, std::vector<std::size_t>> by_language;
    for (std::size_t i = 0; i < pairs.size(); ++i) by_language[pairs[i].language].push_back(i);
    auto summarize = [&](const std::vector<std::size_t>& members) {
      RankScores s;
      s.queries = members.size();
      for (int k : options.ks) {
        std::size_t within = 0;
        for (std::size_t i : members) within += rank[i] <= static_cast<std::size_t>(k);
        s.rank[k] = members.empty() ? 0.0
                                    : static_cast<double>(within) /
                                          static_cast<double>(members.size());
      }
      return s;
    };
    std::vector<std::size_t> everyone(pairs.size());
    std::iota(everyone.begin(), everyone.end(), std::size_t{0});
    report.ranks[to_string(mode)] = summarize(everyone);
    for (const auto& [lang, members] : by_language) {
      report.per_language[lang].ranks[to_string(mode)] = summarize(members);
    }
  }
  return report;
}

std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>> leave_one_out_split(
    std::span<const LabeledSample> dataset, const std::string& held_out_language) {
  std::vector<LabeledSample> train, test;
  for (const auto& s : dataset) {
    (s.language == held_out_language ? test : train).push_back(s);
  }
  if (test.empty()) {
    throw Error(ErrorCode::kUnknownLanguage, "no samples for language '" + held_out_language + "'");
  }
  return {std::move(train), std::move(test)};
}

EvalReport leave_one_out_ranks(std::span<const LabeledSample> dataset, const Metric& metric,
                               const RankOptions& options, std::vector<std::string> languages) {
  if (languages.empty()) {
    std::set<std::string> present;
    for (const auto& s : dataset) present.insert(s.language);
    languages.assign(present.begin(), present.end());
  }
  EvalReport report;
  report.protocol = "loo";
  report.metric = metric.name;
  report.seed = options.seed;
  for (const auto& lang : languages) {
    const auto split = leave_one_out_split(dataset, lang);
    std::vector<LabeledSample> pairs;
    for (const auto& s : split.second) {
      if (s.prediction) pairs.push_back(s);
    }
    const EvalReport held_out = distance_ranks(pairs, split.second, metric, options);
    report.per_language[lang].ranks = held_out.ranks;
  }
  return report;
}

SeqLenStats seq_len_error_stats(std::span<const LengthPair> pairs, double abs_bin_width,
                                double pct_bin_width) {
  if (!(abs_bin_width > 0) || !(pct_bin_width > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "histogram bin widths must be positive");
  }
  SeqLenStats s;
  s.abs_diff.bin_width = abs_bin_width;
  s.signed_pct.bin_width = pct_bin_width;
  s.count = pairs.size();
  if (pairs.empty()) return s;
  std::vector<double> abs_diffs, pcts;
  for (const LengthPair& p : pairs) {
    if (!(p.real > 0) || !(p.predicted > 0)) {
      throw Error(ErrorCode::kInvalidArgument, "sequence lengths must be positive");
    }
    const double abs_diff = std::abs(p.real - p.predicted);
    const double pct = 100.0 * (p.predicted - p.real) / p.real;
    abs_diffs.push_back(abs_diff);
    pcts.push_back(pct);
    ++s.abs_diff.counts[static_cast<std::int64_t>(std::floor(abs_diff / abs_bin_width))];
    ++s.signed_pct.counts[static_cast<std::int64_t>(std::floor(pct / pct_bin_width))];
  }
  s.mean_abs_diff = compensated_sum(abs_diffs) / static_cast<double>(pairs.size());
  s.mean_signed_pct = compensated_sum(pcts) / static_cast<double>(pairs.size());
  return s;
}

namespace {

nlohmann::json to_json(const std::map<int, double>& at_k) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : at_k) j[std::to_string(k)] = v;
  return j;
}

nlohmann::json to_json(const std::map<std::string, RankScores>& ranks) {
  if (ranks.empty()) return nullptr;
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [mode, s] : ranks) {
    j[mode] = {{"rank", to_json(s.rank)}, {"queries", s.queries}};
  }
  return j;
}

nlohmann::json to_json(const Histogram& h) {
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& [bin, count] : h.counts) {
    bins.push_back({{"lo", static_cast<double>(bin) * h.bin_width},
                    {"hi", static_cast<double>(bin + 1) * h.bin_width},
                    {"count", count}});
  }
  return {{"bin_width", h.bin_width}, {"bins", bins}};
}

void put_retrieval(nlohmann::json& j, const std::optional<RetrievalScores>& r) {
  if (r) {
    j["precision"] = to_json(r->precision);
    j["map"] = r->map;
    j["signs"] = r->signs;
    j["queries"] = r->queries;
  } else {
    j["precision"] = nullptr;
    j["map"] = nullptr;
  }
}

}  // namespace

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j = nlohmann::json::object();
  j["protocol"] = report.protocol;
  j["metric"] = report.metric;
  j["seed"] = report.seed;
  put_retrieval(j, report.retrieval);
  if (!report.negative_sampling.empty()) j["negative_sampling"] = report.negative_sampling;
  j["ranks"] = to_json(report.ranks);
  nlohmann::json langs = nlohmann::json::object();
  for (const auto& [lang, scores] : report.per_language) {
    nlohmann::json l = nlohmann::json::object();
    put_retrieval(l, scores.retrieval);
    l["ranks"] = to_json(scores.ranks);
    langs[lang] = l;
  }
  j["per_language"] = langs;
  if (report.seq_len) {
    const SeqLenStats& s = *report.seq_len;
    j["seq_len"] = {{"count", s.count},
                    {"mean_abs_diff", s.mean_abs_diff},
                    {"mean_signed_pct", s.mean_signed_pct},
                    {"abs_diff_histogram", to_json(s.abs_diff)},
                    {"signed_pct_histogram", to_json(s.signed_pct)},
                    {"reference_mean_abs_diff", kReferenceMeanLengthError}};
  } else {
    j["seq_len"] = nullptr;
  }
  return j;
}

namespace {

void print_row(std::ostream& out, const std::string& name, const std::map<int, double>& at_k,
               const char* prefix, std::optional<double> map) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-14s", name.c_str());
  out << buf;
  for (const auto& [k, v] : at_k) {
    std::snprintf(buf, sizeof(buf), "  %s@%d %.4f", prefix, k, v);
    out << buf;
  }
  if (map) {
    std::snprintf(buf, sizeof(buf), "  mAP %.4f", *map);
    out << buf;
  }
  out << '\n';
}

}  // namespace

void print_report(std::ostream& out, const EvalReport& report) {
  out << "protocol " << report.protocol;
  if (!report.metric.empty()) out << "  metric " << report.metric;
  out << "  seed " << report.seed << '\n';
  if (report.retrieval) {
    print_row(out, "all", report.retrieval->precision, "prec", report.retrieval->map);
  }
  for (const auto& [mode, s] : report.ranks) print_row(out, "ref=" + mode, s.rank, "rank", {});
  for (const auto& [lang, scores] : report.per_language) {
    if (scores.retrieval) {
      print_row(out, lang, scores.retrieval->precision, "prec", scores.retrieval->map);
    }
    for (const auto& [mode, s] : scores.ranks) {
      print_row(out, lang + " ref=" + mode, s.rank, "rank", {});
    }
  }
  if (report.seq_len) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "seq_len n=%zu  mean |diff| %.3f  mean signed %% %.3f\n",
                  report.seq_len->count, report.seq_len->mean_abs_diff,
                  report.seq_len->mean_signed_pct);
    out << buf;
  }
}

}  // namespace signpose
