#include <cmath>

#include "doctest.h"
#include "smarena/sweep.hpp"

using namespace smarena;

namespace {

// n=1 outcomes on a grid of `units` steps, reward given by f(power).
template <class F>
std::vector<AllocationOutcome> single_table(int units, F f) {
  std::vector<AllocationOutcome> out;
  for (int u = 0; u <= units; ++u) {
    const double p = static_cast<double>(u) / units;
    const double r = f(p);
    out.push_back({static_cast<std::size_t>(u), {u}, units - u, {r}, 1.0 - r});
  }
  return out;
}

}  // namespace

TEST_CASE("enumerate_allocations") {
  auto a = enumerate_allocations({1, 0.5, Model::Fixed});
  REQUIRE(a.size() == 3);
  CHECK(a[1].malicious_units == std::vector<int>{1});
  CHECK(a[1].hm_units == 1);

  a = enumerate_allocations({2, 0.5, Model::Fixed});
  REQUIRE(a.size() == 4);
  CHECK(a[0].malicious_units == std::vector<int>{0, 0});
  CHECK(a[1].malicious_units == std::vector<int>{0, 1});
  CHECK(a[2].malicious_units == std::vector<int>{0, 2});
  CHECK(a[3].malicious_units == std::vector<int>{1, 1});

  CHECK(enumerate_allocations({1, 0.01, Model::Fixed}).size() == 101);
  for (const auto& g : enumerate_allocations({3, 0.05, Model::Fixed})) {
    CHECK(std::is_sorted(g.malicious_units.begin(), g.malicious_units.end()));
    int sum = g.hm_units;
    for (int u : g.malicious_units) sum += u;
    CHECK(sum == 20);
  }
  CHECK_THROWS_AS(enumerate_allocations({1, 0.03, Model::Fixed}), std::invalid_argument);
  CHECK(default_step(1) == 0.01);
  CHECK(default_step(4) == 0.02);
  CHECK(default_step(6) == 0.04);
  CHECK(default_step(9) == 0.05);
}

TEST_CASE("grid instances canonicalize into the planned tasks") {
  const GridSpec dyn{2, 0.05, Model::Dynamic};
  const auto allocs = enumerate_allocations(dyn);
  const auto inst = required_instances(dyn, allocs);
  CHECK(inst.size() == allocs.size() * 4);
  const auto tasks = plan_tasks(inst);
  CHECK(tasks.size() < inst.size());
  CHECK(std::is_sorted(tasks.begin(), tasks.end(),
                       [](const auto& a, const auto& b) { return a.key < b.key; }));
  ResultStore store;
  for (const auto& t : tasks) {
    SimResult r;
    r.mean_rewards = t.instance.allocation.powers;
    r.sem.assign(t.instance.size(), 0.0);
    store[t.key] = r;
  }
  for (const auto& i : inst) {
    const auto r = lookup(store, i);
    for (std::size_t j = 0; j < i.size(); ++j) {
      CHECK(r.mean_rewards[j] == doctest::Approx(i.allocation.powers[j]));
    }
  }
  store.erase(store.begin());
  CHECK_THROWS_AS(analyze(dyn, allocs, store, {}), IncompleteResults);
}

TEST_CASE("power threshold on synthetic tables") {
  const GridSpec spec{1, 0.05, Model::Fixed};
  // reward > power exactly on p >= 0.35
  auto t = single_table(20, [](double p) { return p >= 0.35 - 1e-9 ? std::min(1.0, p + 0.01) : p - 0.01; });
  auto d = power_threshold(t, spec);
  REQUIRE(d.units);
  CHECK(*d.units == 7);
  REQUIRE(d.witness);
  CHECK(d.witness->power_units == 6);

  // violation at 0.9 pushes the threshold above it
  auto v = t;
  v[18].malicious_rewards[0] = 0.85;
  d = power_threshold(v, spec);
  REQUIRE(d.units);
  CHECK(*d.units == 19);

  // violation at every power -> NOT_FOUND
  auto never = single_table(20, [](double p) { return p * 0.5; });
  CHECK_FALSE(power_threshold(never, spec).units);

  auto missing = t;
  missing.pop_back();
  CHECK_THROWS_AS(power_threshold(missing, spec), IncompleteResults);
}

TEST_CASE("safety level on synthetic tables") {
  const GridSpec spec{1, 0.05, Model::Fixed};
  auto t = single_table(20, [](double p) { return p >= 0.35 - 1e-9 ? std::min(1.0, p + 0.01) : p - 0.01; });
  auto d = safety_level(t, spec);
  REQUIRE(d.units);
  CHECK(*d.units == 14);  // malicious power <= 0.30

  // Only all-malicious rows (HM power 0), rewards above powers -> NOT_FOUND.
  const GridSpec two{2, 0.5, Model::Fixed};
  std::vector<AllocationOutcome> rows{
      {0, {0, 0}, 2, {0, 0}, 1},
      {1, {0, 1}, 1, {0, 0.6}, 0.4},
      {2, {0, 2}, 0, {0, 1}, 0},
      {3, {1, 1}, 0, {0.55, 0.45}, 0},
  };
  auto s = safety_level(rows, two);
  REQUIRE(s.units);
  CHECK(*s.units == 2);
  rows[1].malicious_rewards = {0, 0.5};
  CHECK(*safety_level(rows, two).units == 1);
}

TEST_CASE("thresholds never rise when a violation is removed") {
  const GridSpec spec{1, 0.05, Model::Fixed};
  auto t = single_table(20, [](double p) { return p >= 0.5 ? 1.0 : p * 0.9; });
  t[15].malicious_rewards[0] = 0.7;  // violation at 0.75
  const int before = *power_threshold(t, spec).units;
  t[15].malicious_rewards[0] = 0.9;
  const int after = *power_threshold(t, spec).units;
  CHECK(after <= before);
}

TEST_CASE("reward curves") {
  std::vector<AllocationOutcome> rows{
      {0, {2}, 8, {0.25}, 0.75},
      {1, {1, 2}, 7, {0.05, 0.3}, 0.65},
  };
  const auto c = reward_curves(rows, CurveGrouping::Malicious, 0.1);
  REQUIRE(c.size() == 2);
  CHECK(c[0].power_units == 1);
  CHECK(c[0].sem == 0.0);
  CHECK(c[1].n_samples == 2);
  CHECK(c[1].mean_reward == doctest::Approx(0.275));
  CHECK(c[1].sem == doctest::Approx(0.025));
  const auto h = reward_curves(rows, CurveGrouping::HmCollective, 0.1);
  CHECK(h.size() == 2);
  CHECK_THROWS(reward_curves(std::vector<AllocationOutcome>{}, CurveGrouping::Malicious, 0.1));

  // All-HM grid: identity line.
  auto id = single_table(10, [](double p) { return p; });
  for (const auto& pt : reward_curves(id, CurveGrouping::Malicious, 0.1)) {
    CHECK(pt.mean_reward == doctest::Approx(pt.power));
  }
}

TEST_CASE("serial and parallel task runs agree") {
  const GridSpec spec{1, 0.25, Model::Fixed};
  const auto tasks = plan_tasks(required_instances(spec, enumerate_allocations(spec)));
  SimConfig c;
  c.repetitions = 3;
  c.step_cap = 10000;
  c.seed = 44;
  ResultStore one, four;
  run_tasks(tasks, c, one, 1);
  run_tasks(tasks, c, four, 4);
  REQUIRE(one.size() == tasks.size());
  for (const auto& [k, r] : one) CHECK(four.at(k).mean_rewards == r.mean_rewards);
  int calls = 0;
  run_tasks(tasks, c, one, 2, [&](const CanonicalTask&, const SimResult&) { ++calls; });
  CHECK(calls == 0);  // nothing pending
}
