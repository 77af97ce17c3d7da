#include <doctest.h>

#include <random>
#include <sstream>

#include "lrg/error.hpp"
#include "lrg/metrics.hpp"
#include "oracles.hpp"

using namespace lrg;

namespace {

InstanceLabels L(std::vector<std::int32_t> v) { return InstanceLabels(std::move(v)); }
std::vector<int> ints(const InstanceLabels& l) { return {l.ids.begin(), l.ids.end()}; }

void check_against_oracle(const InstanceLabels& a, const InstanceLabels& b) {
  const auto c = build_contingency(a, b);
  const auto x = ints(a), y = ints(b);
  CHECK(std::abs(ari(c) - oracle::ari(x, y)) < 1e-9);
  CHECK(std::abs(nmi(c) - oracle::nmi(x, y)) < 1e-9);
  CHECK(std::abs(ami(c) - oracle::ami(x, y)) < 1e-9);
}

}  // namespace

TEST_CASE("hand examples") {
  const auto c = build_contingency(L({1, 1, 1, 1}), L({1, 1, 2, 2}));
  CHECK(ari(c) == 0.0);
  CHECK(nmi(c) == 0.0);
  CHECK(ami(c) == doctest::Approx(0.0).scale(1e-12));
  const auto d = build_contingency(L({1, 1, 2, 2}), L({1, 1, 2, 3}));
  CHECK(ari(d) == doctest::Approx(4.0 / 7.0));
  CHECK(mutual_information(d) == doctest::Approx(std::log(2.0)));
  CHECK(entropy_gt(d) == doctest::Approx(std::log(2.0)));
  CHECK(entropy_pred(d) == doctest::Approx(1.5 * std::log(2.0)));
  CHECK(nmi(d) == doctest::Approx(1.0 / std::sqrt(1.5)));
}

TEST_CASE("identical partitions score exactly one") {
  for (const auto& [a, b] : std::vector<std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>>>{
           {{1, 1, 2, 2}, {5, 5, 3, 3}}, {{1, 1, 1}, {2, 2, 2}}, {{1, 2, 3}, {3, 1, 2}}}) {
    const auto c = build_contingency(L(a), L(b));
    CHECK(c.identical_partition());
    CHECK(ari(c) == 1.0);
    CHECK(nmi(c) == 1.0);
    CHECK(ami(c) == 1.0);
  }
  CHECK_FALSE(build_contingency(L({1, 1, 2}), L({1, 2, 2})).identical_partition());
}

TEST_CASE("exhaustive small labelings match the brute-force oracles") {
  for (int n = 2; n <= 6; ++n) {
    std::vector<std::int32_t> a(n), b(n);
    int total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    for (int ia = 0; ia < total; ia += 2)
      for (int ib = 0; ib < total; ib += 3) {
        for (int i = 0, x = ia, y = ib; i < n; ++i, x /= 3, y /= 3) {
          a[i] = 1 + x % 3;
          b[i] = 1 + y % 3;
        }
        check_against_oracle(L(a), L(b));
      }
  }
}

TEST_CASE("random labelings match the oracles and are symmetric") {
  std::mt19937 g(1);
  std::uniform_int_distribution<int> k(1, 5);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::int32_t> a(12), b(12);
    for (auto& v : a) v = k(g);
    for (auto& v : b) v = k(g);
    check_against_oracle(L(a), L(b));
    const auto ab = build_contingency(L(a), L(b)), ba = build_contingency(L(b), L(a));
    CHECK(ari(ab) == doctest::Approx(ari(ba)));
    CHECK(nmi(ab) == doctest::Approx(nmi(ba)));
    CHECK(ami(ab) == doctest::Approx(ami(ba)));
    // Renaming ids changes nothing.
    auto r = b;
    for (auto& v : r) v = 100 - v;
    CHECK(ari(build_contingency(L(a), L(r))) == doctest::Approx(ari(ab)));
  }
}

TEST_CASE("expected mutual information") {
  // Two singletons vs anything: every partition of 2 points has EMI equal to its MI.
  const auto c = build_contingency(L({1, 2}), L({1, 2}));
  CHECK(expected_mutual_information(c) == doctest::Approx(std::log(2.0)));
  std::mt19937 g(2);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::int32_t> a(10), b(10);
    for (auto& v : a) v = 1 + g() % 3;
    for (auto& v : b) v = 1 + g() % 4;
    const auto x = ints(L(a)), y = ints(L(b));
    CHECK(expected_mutual_information(build_contingency(L(a), L(b))) == doctest::Approx(oracle::emi(x, y)).epsilon(1e-9));
  }
}

TEST_CASE("metric errors") {
  CHECK_THROWS_AS(ari(build_contingency(L({1}), L({1}))), MetricError);
  CHECK_THROWS_AS(nmi(build_contingency(L({1}), L({2}))), MetricError);
  CHECK_THROWS_AS(build_contingency(L({1, 2}), L({1})), ContractError);
  CHECK_THROWS_AS(build_contingency(L({1, 0}), L({1, 1})), ContractError);
}

TEST_CASE("detection scores") {
  auto s = match_and_score(L({1, 1, 1, 1, 2, 2}), L({1, 1, 1, 2, 2, 2}));
  CHECK(s.true_positives == 2);  // IOU 3/4 and 2/3
  CHECK(s.precision == 1.0);
  CHECK(s.miou == doctest::Approx((0.75 + 2.0 / 3.0) / 2));
  s = match_and_score(L({1, 1, 2, 2, 2, 2}), L({1, 1, 1, 1, 2, 2}));
  CHECK(s.true_positives == 0);  // IOU 2/4 and 2/4: not above 0.5
  CHECK(s.recall == 0.0);
  CHECK(s.miou == doctest::Approx(0.5));

  s = match_and_score(L({1, 1, 2, 2}), L({7, 7, 7, 7}));
  CHECK(s.true_positives == 0);
  CHECK(s.gt_segments == 2);
  CHECK(s.pred_segments == 1);
  CHECK(s.miou == doctest::Approx(0.25));  // one match at IOU 1/2, one unmatched gt

  s = match_and_score(L({1, 1, 2, 2, 3}), L({4, 4, 5, 5, 6}));
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);
  CHECK(s.miou == 1.0);

  // Each prediction matches at most once.
  s = match_and_score(L({1, 1, 1, 2, 2, 2}), L({1, 1, 1, 1, 1, 2}));
  CHECK(s.true_positives == 1);
  CHECK(s.precision == 0.5);
}

TEST_CASE("scene evaluation, averaging and CSV") {
  const auto m = evaluate_scene(L({1, 1, 2, 2}), L({1, 1, 2, 2}), "a", 3.0);
  CHECK(m.ari == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.steps == 3.0);
  auto m2 = evaluate_scene(L({1, 1, 1, 1}), L({1, 1, 2, 2}), "b", 5.0);
  const std::vector<SceneMetrics> all{m, m2};
  const auto sum = per_room_average(all);
  CHECK(sum.scenes == 2);
  CHECK(sum.mean.ari == doctest::Approx(0.5));
  CHECK(sum.std.ari == doctest::Approx(0.5));
  CHECK(sum.mean.steps == doctest::Approx(4.0));
  CHECK(sum.std.steps == doctest::Approx(1.0));

  std::ostringstream os;
  write_metrics_csv(os, all);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "scene,NMI,AMI,ARI,PRC,RCL,mIOU,steps");
  std::vector<std::string> first;
  while (std::getline(in, line)) first.push_back(line.substr(0, line.find(',')));
  CHECK(first == std::vector<std::string>{"a", "b", "mean", "std"});
}
