#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ibfifo/fifo.hpp"

namespace ibfifo {

using CounterId = std::uint32_t;
using Valuation = std::vector<std::uint32_t>;

enum class CounterOp : std::uint8_t { inc, dec };

struct CounterAction {
  CounterOp op = CounterOp::inc;
  CounterId counter = 0;
  std::vector<CounterId> zero; // sorted

  friend bool operator==(const CounterAction &, const CounterAction &) = default;
};

using CounterTrace = std::vector<CounterAction>;

struct CounterTransition {
  StateId src;
  CounterAction action;
  StateId dst;
};

struct CounterConfig {
  StateId state = 0;
  Valuation valuation;

  friend bool operator==(const CounterConfig &, const CounterConfig &) = default;
  friend auto operator<=>(const CounterConfig &, const CounterConfig &) = default;
};

class CounterMachineBuilder;

class CounterMachine {
public:
  std::size_t num_states() const { return states_.size(); }
  std::size_t num_counters() const { return counters_.size(); }
  const std::string &state_name(StateId s) const { return states_[s]; }
  const std::string &counter_name(CounterId x) const { return counters_[x]; }
  std::optional<StateId> find_state(const std::string &n) const;
  std::optional<CounterId> find_counter(const std::string &n) const;
  StateId init() const { return init_; }
  const std::vector<CounterTransition> &transitions() const { return transitions_; }
  const std::vector<std::uint32_t> &outgoing(StateId s) const { return out_[s]; }
  CounterConfig initial_config() const { return {init_, Valuation(counters_.size(), 0)}; }

private:
  friend class CounterMachineBuilder;
  std::vector<std::string> states_, counters_;
  std::vector<CounterTransition> transitions_;
  std::vector<std::vector<std::uint32_t>> out_;
  std::unordered_map<std::string, StateId> state_ix_;
  std::unordered_map<std::string, CounterId> counter_ix_;
  StateId init_ = 0;
};

class CounterMachineBuilder {
public:
  CounterId add_counter(const std::string &name);
  StateId add_state(const std::string &name);
  StateId state(const std::string &name);
  void set_init(StateId s) { m_.init_ = s; }
  void add_transition(StateId src, CounterAction a, StateId dst);
  std::size_t num_states() const { return m_.states_.size(); }
  CounterMachine build();

private:
  CounterMachine m_;
};

bool zero_tests_hold(const CounterAction &a, const Valuation &v);
CounterConfig counter_fire(const CounterMachine &m, const CounterConfig &cfg, std::uint32_t t);
CounterConfig counter_step(const CounterMachine &m, const CounterConfig &cfg,
                           const CounterAction &a);
CounterConfig run_counter_trace(const CounterMachine &m, const CounterConfig &start,
                                const CounterTrace &trace);

std::string counter_action_string(const CounterMachine &m, const CounterAction &a);

} // namespace ibfifo
