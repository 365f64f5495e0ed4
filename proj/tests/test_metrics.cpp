#include <algorithm>

#include "doctest.h"
#include "medsensor/errors.hpp"
#include "medsensor/metrics.hpp"
#include "medsensor/rng.hpp"

using namespace medsensor;

namespace {

// brute-force per-element counting oracle
ConfusionCounts oracle_confusion(const std::vector<int>& p, const std::vector<int>& l) {
  ConfusionCounts c;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 1 && l[i] == 1) ++c.tp;
    if (p[i] == 1 && l[i] == 0) ++c.fp;
    if (p[i] == 0 && l[i] == 0) ++c.tn;
    if (p[i] == 0 && l[i] == 1) ++c.fn;
  }
  return c;
}

}  // namespace

TEST_CASE("confusion by definition") {
  const auto c = confusion({1, 1, 0, 0}, {1, 0, 0, 1});
  CHECK(c.tp == 1);
  CHECK(c.fp == 1);
  CHECK(c.tn == 1);
  CHECK(c.fn == 1);

  const auto perfect = confusion({1, 0}, {1, 0});
  CHECK(perfect.tp == 1);
  CHECK(perfect.tn == 1);
  CHECK(perfect.fp == 0);
  CHECK(perfect.fn == 0);
}

TEST_CASE("confusion error cases") {
  CHECK_THROWS_AS(confusion({1}, {1, 0}), LengthMismatch);
  CHECK_THROWS_AS(confusion({}, {}), EmptyInput);
}

TEST_CASE("confusion agrees with the brute-force oracle on random vectors") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> p(1000), l(1000);
    for (int i = 0; i < 1000; ++i) {
      p[i] = rng.uniform() < 0.5;
      l[i] = rng.uniform() < 0.5;
    }
    const auto a = confusion(p, l);
    const auto b = oracle_confusion(p, l);
    CHECK(a.tp == b.tp);
    CHECK(a.tn == b.tn);
    CHECK(a.fp == b.fp);
    CHECK(a.fn == b.fn);
    CHECK(a.total() == 1000);
  }
}

TEST_CASE("accuracy values") {
  CHECK(accuracy({2, 2, 0, 0}) == 1.0);
  CHECK(accuracy({3, 1, 0, 1}) == doctest::Approx(0.8));
  // a confusion realizing 97.77% on its test set
  ConfusionCounts c;
  c.tp = 4000;
  c.tn = 5777;
  c.fp = 100;
  c.fn = 123;
  CHECK(accuracy(c) == doctest::Approx(0.9777));
  CHECK_THROWS_AS(accuracy({0, 0, 0, 0}), EmptyInput);
}

TEST_CASE("accuracy is 1 iff FP == FN == 0, and stays in [0,1]") {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    ConfusionCounts c{rng.below(10), rng.below(10), rng.below(10), rng.below(10)};
    if (c.total() == 0) continue;
    const double a = accuracy(c);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
    CHECK((a == 1.0) == (c.fp == 0 && c.fn == 0));
  }
}

TEST_CASE("permuting pairs leaves counts unchanged; swapping roles swaps FP and FN") {
  Rng rng(7);
  std::vector<int> p(200), l(200);
  for (int i = 0; i < 200; ++i) {
    p[i] = rng.uniform() < 0.5;
    l[i] = rng.uniform() < 0.5;
  }
  const auto before = confusion(p, l);

  std::vector<std::size_t> order(200);
  for (std::size_t i = 0; i < 200; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<int> p2(200), l2(200);
  for (std::size_t i = 0; i < 200; ++i) {
    p2[i] = p[order[i]];
    l2[i] = l[order[i]];
  }
  const auto after = confusion(p2, l2);
  CHECK(before.tp == after.tp);
  CHECK(before.tn == after.tn);
  CHECK(before.fp == after.fp);
  CHECK(before.fn == after.fn);

  const auto swapped = confusion(l, p);
  CHECK(swapped.fp == before.fn);
  CHECK(swapped.fn == before.fp);
  CHECK(swapped.tp == before.tp);
}
