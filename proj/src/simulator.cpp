#include "smarena/simulator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace smarena {

void PowerAllocation::validate() const {
  if (powers.empty()) throw std::invalid_argument("power allocation is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    const double p = powers[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("power of miner " + std::to_string(i) + " outside [0,1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kPowerSumTolerance) {
    throw std::invalid_argument("powers sum to " + std::to_string(sum) + ", expected 1");
  }
}

SimConfig SimConfig::desk_scale() {
  SimConfig c;
  c.repetitions = 20;
  c.step_cap = 50000;
  return c;
}

void SimConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (window == 0) throw std::invalid_argument("window must be positive");
  if (step_cap < window) throw std::invalid_argument("step cap must be at least the window");
  if (repetitions == 0) throw std::invalid_argument("repetitions must be at least 1");
}

ConvergenceWindow::ConvergenceWindow(std::size_t n_miners, std::uint64_t window, double alpha)
    : window_(window), alpha_(alpha), max_(n_miners), min_(n_miners) {}

void ConvergenceWindow::push(std::span<const double> utilities) {
  const std::uint64_t idx = count_++;
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    const double v = utilities[i];
    auto& hi = max_[i];
    auto& lo = min_[i];
    while (!hi.empty() && hi.back().value <= v) hi.pop_back();
    hi.push_back({idx, v});
    while (!lo.empty() && lo.back().value >= v) lo.pop_back();
    lo.push_back({idx, v});
    while (hi.front().index + window_ <= idx) hi.pop_front();
    while (lo.front().index + window_ <= idx) lo.pop_front();
  }
}

bool ConvergenceWindow::converged() const {
  if (count_ < window_) return false;
  for (std::size_t i = 0; i < max_.size(); ++i) {
    if (max_[i].front().value - min_[i].front().value > alpha_) return false;
  }
  return true;
}

Simulation::Simulation(const PowerAllocation& allocation, std::span<const StrategyKind> strategies) {
  allocation.validate();
  if (strategies.size() != allocation.size()) {
    throw std::invalid_argument("strategy list length does not match the power allocation");
  }
  const std::size_t n = allocation.size();
  miners_.reserve(n);
  for (auto kind : strategies) miners_.emplace_back(kind);

  cumulative_.resize(n);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += allocation.powers[i];
    cumulative_[i] = acc;
    if (allocation.powers[i] > 0.0) last_positive = i;
  }
  for (std::size_t i = last_positive; i < n; ++i) cumulative_[i] = 1.0;

  public_.push_back(1);
  best_public_.push_back(kGenesis);
  best_all_.push_back(kGenesis);
  counts_.assign(n, 0);
  utilities_.assign(n, 0.0);
}

MinerId Simulation::sample_miner(Rng& rng) const {
  const double u = rng.uniform();
  for (std::size_t i = 0; i < cumulative_.size(); ++i) {
    if (u < cumulative_[i]) return static_cast<MinerId>(i);
  }
  return static_cast<MinerId>(cumulative_.size() - 1);
}

void Simulation::enqueue(MinerId sender, std::span<const BlockId> blocks) {
  const auto begin = static_cast<std::uint32_t>(pool_.size());
  pool_.insert(pool_.end(), blocks.begin(), blocks.end());
  pending_.push_back({sender, begin, static_cast<std::uint32_t>(blocks.size())});
}

void Simulation::advance(MinerId discoverer, Rng& rng) {
  if (discoverer >= miners_.size()) throw StructuralError("advance: unknown miner");
  pool_.clear();
  pending_.clear();
  processed_.clear();
  measured_last_ = false;

  const BlockId mined = tree_.extend(miners_[discoverer].target(), discoverer);
  public_.push_back(0);
  if (tree_.height(mined) > tree_.height(best_all_.front())) best_all_.clear();
  best_all_.push_back(mined);
  scratch_.clear();
  miners_[discoverer].on_mined(tree_, mined, scratch_);
  if (!scratch_.empty()) enqueue(discoverer, scratch_);

  while (!pending_.empty()) {
    const std::size_t j = pending_.size() > 1 ? rng.index(pending_.size()) : 0;
    const Broadcast br = pending_[j];
    pending_[j] = pending_.back();
    pending_.pop_back();
    processed_.push_back(br);

    for (std::uint32_t k = 0; k < br.count; ++k) {
      const BlockId b = pool_[br.begin + k];
      public_[b] = 1;
      const std::uint32_t h = tree_.height(b);
      if (h > best_public_height_) {
        best_public_height_ = h;
        best_public_.clear();
        best_public_.push_back(b);
      } else if (h == best_public_height_) {
        best_public_.push_back(b);
      }
    }

    const BlockId tip = pool_[br.begin + br.count - 1];
    for (MinerId r = 0; r < miners_.size(); ++r) {
      if (r == br.sender) continue;
      scratch_.clear();
      miners_[r].on_delivered(tree_, tip, scratch_);
      if (!scratch_.empty()) enqueue(r, scratch_);
    }
  }

  ++timestep_;
  if (best_all_.size() == 1) {
    measure_at(best_all_.front());
    measured_last_ = true;
  }
}

void Simulation::measure_at(BlockId tip) {
  BlockId a = measured_tip_;
  BlockId b = tip;
  while (tree_.height(a) > tree_.height(b)) {
    --counts_[tree_.owner(a)];
    a = tree_.parent(a);
  }
  while (tree_.height(b) > tree_.height(a)) {
    ++counts_[tree_.owner(b)];
    b = tree_.parent(b);
  }
  while (a != b) {
    --counts_[tree_.owner(a)];
    ++counts_[tree_.owner(b)];
    a = tree_.parent(a);
    b = tree_.parent(b);
  }
  measured_tip_ = tip;
  counted_ = tree_.height(tip);
  const double total = static_cast<double>(counted_);
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    utilities_[i] = counted_ > 0 ? static_cast<double>(counts_[i]) / total : 0.0;
  }
}

RewardVector Simulation::final_reward() {
  const bool public_tie = best_public_height_ == tree_.height(best_all_.front());
  measure_at(public_tie ? best_public_.front() : best_all_.front());
  return make_reward(counts_);
}

RunOutcome run_once(const PowerAllocation& allocation, std::span<const StrategyKind> strategies,
                    const SimConfig& config, Rng& rng) {
  config.validate();
  Simulation sim(allocation, strategies);
  sim.reserve(static_cast<std::size_t>(config.step_cap) + 1);
  ConvergenceWindow window(allocation.size(), config.window, config.alpha);

  RunOutcome out;
  while (sim.timestep() < config.step_cap) {
    sim.step(rng);
    if (sim.measured_last_step()) {
      window.push(sim.utilities());
      if (window.converged()) {
        out.converged = true;
        break;
      }
    }
  }
  out.steps = sim.timestep();
  out.reward = sim.final_reward();
  return out;
}

}  // namespace smarena
