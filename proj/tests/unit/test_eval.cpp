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

#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "signpose/eval.hpp"
#include "signpose/synthetic.hpp"

using namespace signpose;

namespace {

std::vector<LabeledSample> small_benchmark(int classes = 4, int per_class = 6, std::uint64_t seed = 3) {
  synthetic::BenchmarkOptions o;
  o.classes = classes;
  o.samples_per_class = per_class;
  o.seed = seed;
  o.sample.min_frames = 12;
  o.sample.max_frames = 18;
  return synthetic::make_benchmark(o);
}

std::vector<LabeledSample> with_predictions(std::vector<LabeledSample> d) {
  for (auto& s : d) s.prediction = s.pose;
  return d;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("retrieval on a hand-computed toy") {
  const std::vector<std::string> ids{"a0", "a1", "a2", "b0", "b1", "b2"};
  const std::vector<std::string> labels{"A", "A", "A", "B", "B", "B"};
  const std::vector<std::string> langs{"DGS", "DGS", "GSL", "GSL", "DGS", "GSL"};
  const double pos[] = {0, 1, 5, 2, 3, 10};
  RetrievalOptions o;
  o.ks = {1, 5};
  o.negative_ratio = 1;
  const EvalReport r = retrieval_validation(
      ids, labels, langs, [&](std::size_t a, std::size_t b) { return std::abs(pos[a] - pos[b]); },
      o);
  REQUIRE(r.retrieval);
  const double sign_a = (0.75 + 0.75 + 5.0 / 12) / 3;
  const double sign_b = (0.45 + 0.7 + 7.0 / 12) / 3;
  CHECK(r.retrieval->map == doctest::Approx((sign_a + sign_b) / 2));
  CHECK(r.retrieval->precision.at(1) == doctest::Approx(0.5));
  CHECK(r.retrieval->precision.at(5) == doctest::Approx(0.4));
  CHECK(r.retrieval->signs == 2);
  CHECK(r.retrieval->queries == 6);
  CHECK(r.negative_sampling == "without_replacement");
  REQUIRE(r.per_language.count("DGS"));
  // DGS queries: a0, a1 (sign A) and b1 (sign B).
  CHECK(r.per_language.at("DGS").retrieval->map == doctest::Approx((0.75 + 0.7) / 2));
}

TEST_CASE("retrieval with a perfect oracle") {
  const auto data = small_benchmark();
  std::vector<std::string> ids, labels, langs;
  for (const auto& s : data) {
    ids.push_back(s.id);
    labels.push_back(s.label);
    langs.push_back(s.language);
  }
  const EvalReport r = retrieval_validation(
      ids, labels, langs,
      [&](std::size_t a, std::size_t b) { return labels[a] == labels[b] ? 0.0 : 1.0; });
  CHECK(r.retrieval->map == 1.0);
  CHECK(r.retrieval->precision.at(1) == 1.0);
  // Five positives per query, so precision@10 tops out at 0.5.
  CHECK(r.retrieval->precision.at(5) == 1.0);
  CHECK(r.retrieval->precision.at(10) == 0.5);
  CHECK(r.negative_sampling == "with_replacement");
}

TEST_CASE("retrieval with a real metric") {
  auto data = small_benchmark(3, 4);
  // A relabelled exact copy adds a zero-distance negative.
  LabeledSample copy = data[0];
  copy.id = "zcopy";
  copy.label = data.back().label;
  data.push_back(copy);
  RetrievalOptions o;
  o.ks = {1};
  const Metric m = make_metric(MetricKind::kNdtw);
  const EvalReport r1 = retrieval_validation(data, m, o);
  o.threads = 3;
  const EvalReport r3 = retrieval_validation(data, m, o);
  CHECK(to_json(r1).dump() == to_json(r3).dump());
  CHECK(r1.metric == "ndtw");
}

TEST_CASE("retrieval errors") {
  const std::vector<std::string> ids{"a", "b"};
  const std::vector<std::string> labels{"A", "B"};
  const std::vector<std::string> langs{"X", "X"};
  const IndexDistance d = [](std::size_t, std::size_t) { return 0.0; };
  CHECK_THROWS_AS(retrieval_validation(ids, labels, langs, d), Error);
  const std::vector<std::string> same{"A", "A"};
  CHECK_THROWS_AS(retrieval_validation(ids, same, langs, d), Error);
}

TEST_CASE("distance ranks") {
  const auto data = with_predictions(small_benchmark(5, 6));
  const Metric m = make_metric(MetricKind::kNdtw);
  SUBCASE("perfect predictions rank first in both modes") {
    const EvalReport r = distance_ranks(data, data, m);
    REQUIRE(r.ranks.size() == 2);
    CHECK(r.ranks.at("prediction").rank.at(1) == 1.0);
    CHECK(r.ranks.at("gt").rank.at(1) == 1.0);
    CHECK(r.ranks.at("gt").queries == data.size());
  }
  SUBCASE("empty gallery") {
    auto bad = data;
    std::mt19937_64 rng(1);
    for (auto& s : bad) s.prediction = signpose::testing::random_sequence(rng, 5);
    RankOptions o;
    o.gt_gallery = 0;
    o.prediction_gallery = 0;
    const EvalReport r = distance_ranks(bad, bad, make_metric(MetricKind::kDtw), o);
    CHECK(r.ranks.at("prediction").rank.at(1) == 1.0);
  }
  SUBCASE("pool too small") {
    const std::span<const LabeledSample> few(data.data(), 10);
    try {
      (void)distance_ranks(few, data, m);
      FAIL("expected PoolTooSmall");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kPoolTooSmall);
    }
  }
  SUBCASE("duplicate ids") {
    auto dup = data;
    dup[1].id = dup[0].id;
    try {
      (void)distance_ranks(dup, dup, m);
      FAIL("expected DuplicateId");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDuplicateId);
    }
  }
  SUBCASE("deterministic across thread counts") {
    std::mt19937_64 rng(4);
    auto noisy = data;
    for (auto& s : noisy) s.prediction->x() += 0.3 * signpose::testing::random_sequence(rng, s.pose.frames()).x();
    RankOptions o;
    o.seed = 5;
    const auto a = to_json(distance_ranks(noisy, noisy, m, o)).dump();
    o.threads = 4;
    CHECK(to_json(distance_ranks(noisy, noisy, m, o)).dump() == a);
  }
}

TEST_CASE("leave one out") {
  const auto data = with_predictions(small_benchmark(6, 12));
  SUBCASE("split") {
    const auto [train, test] = leave_one_out_split(data, "LSF");
    CHECK(train.size() + test.size() == data.size());
    for (const auto& s : test) CHECK(s.language == "LSF");
    for (const auto& s : train) CHECK(s.language != "LSF");
    try {
      (void)leave_one_out_split(data, "ASL");
      FAIL("expected UnknownLanguage");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnknownLanguage);
    }
  }
  SUBCASE("ranks per held-out language") {
    RankOptions o;
    o.gt_gallery = 5;
    o.prediction_gallery = 5;
    const EvalReport r = leave_one_out_ranks(data, make_metric(MetricKind::kNdtw), o, {"DGS", "PJM"});
    CHECK(r.protocol == "loo");
    CHECK(r.per_language.size() == 2);
    CHECK(r.per_language.at("DGS").ranks.at("gt").rank.at(1) == 1.0);
  }
}

TEST_CASE("seq_len_error_stats") {
  SUBCASE("hand-computed mean") {
    const std::vector<LengthPair> p{{13, 10}, {20, 20}};
    const SeqLenStats s = seq_len_error_stats(p);
    CHECK(s.mean_abs_diff == doctest::Approx(1.5));
    CHECK(s.mean_signed_pct == doctest::Approx(15.0));
    CHECK(s.abs_diff.total() == 2);
    CHECK(s.abs_diff.counts.at(3) == 1);
    CHECK(s.abs_diff.counts.at(0) == 1);
  }
  SUBCASE("signed percentage") {
    const std::vector<LengthPair> p{{90, 100}};
    const SeqLenStats s = seq_len_error_stats(p);
    CHECK(s.mean_signed_pct == doctest::Approx(-10.0));
    CHECK(s.signed_pct.counts.at(-2) == 1);
  }
  SUBCASE("all equal") {
    const std::vector<LengthPair> p{{7, 7}, {30, 30}, {12, 12}};
    const SeqLenStats s = seq_len_error_stats(p);
    CHECK(s.mean_abs_diff == 0.0);
    CHECK(s.abs_diff.counts.size() == 1);
    CHECK(s.abs_diff.counts.at(0) == 3);
  }
  SUBCASE("errors") {
    const std::vector<LengthPair> p{{0, 7}};
    CHECK_THROWS_AS(seq_len_error_stats(p), Error);
    CHECK_THROWS_AS(seq_len_error_stats({}, 0.0), Error);
  }
  CHECK(kReferenceMeanLengthError == 3.61);
}

TEST_CASE("report json") {
  const std::vector<std::string> ids{"a0", "a1", "b0", "b1"};
  const std::vector<std::string> labels{"A", "A", "B", "B"};
  const std::vector<std::string> langs{"DGS", "DGS", "DGS", "DGS"};
  EvalReport r = retrieval_validation(ids, labels, langs, [](std::size_t a, std::size_t b) {
    return static_cast<double>(a > b ? a - b : b - a);
  });
  const std::vector<LengthPair> p{{13, 10}};
  r.seq_len = seq_len_error_stats(p);
  const nlohmann::json j = to_json(r);
  for (const char* key : {"protocol", "metric", "seed", "precision", "map", "ranks", "per_language",
                          "seq_len", "negative_sampling"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["precision"].contains("1"));
  CHECK(j["ranks"].is_null());
  CHECK(j["seq_len"]["reference_mean_abs_diff"] == 3.61);
  std::ostringstream text;
  print_report(text, r);
  CHECK(text.str().find("mAP") != std::string::npos);
}

}  // TEST_SUITE
