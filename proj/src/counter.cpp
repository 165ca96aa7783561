#include "ibfifo/counter.hpp"

#include <algorithm>

namespace ibfifo {

std::optional<StateId> CounterMachine::find_state(const std::string &n) const {
  auto it = state_ix_.find(n);
  if (it == state_ix_.end()) return std::nullopt;
  return it->second;
}

std::optional<CounterId> CounterMachine::find_counter(const std::string &n) const {
  auto it = counter_ix_.find(n);
  if (it == counter_ix_.end()) return std::nullopt;
  return it->second;
}

CounterId CounterMachineBuilder::add_counter(const std::string &name) {
  if (m_.counter_ix_.count(name)) throw Error(Errc::invalid_machine, "duplicate counter " + name);
  CounterId x = m_.counters_.size();
  m_.counters_.push_back(name);
  m_.counter_ix_[name] = x;
  return x;
}

StateId CounterMachineBuilder::add_state(const std::string &name) {
  if (m_.state_ix_.count(name)) throw Error(Errc::invalid_machine, "duplicate state " + name);
  StateId s = m_.states_.size();
  m_.states_.push_back(name);
  m_.out_.emplace_back();
  m_.state_ix_[name] = s;
  return s;
}

StateId CounterMachineBuilder::state(const std::string &name) {
  auto it = m_.state_ix_.find(name);
  return it == m_.state_ix_.end() ? add_state(name) : it->second;
}

void CounterMachineBuilder::add_transition(StateId src, CounterAction a, StateId dst) {
  if (src >= m_.states_.size() || dst >= m_.states_.size())
    throw Error(Errc::undeclared_id, "counter transition references an undeclared state");
  if (a.counter >= m_.counters_.size())
    throw Error(Errc::undeclared_id, "counter transition references an undeclared counter");
  std::sort(a.zero.begin(), a.zero.end());
  a.zero.erase(std::unique(a.zero.begin(), a.zero.end()), a.zero.end());
  for (auto z : a.zero)
    if (z >= m_.counters_.size())
      throw Error(Errc::undeclared_id, "zero set references an undeclared counter");
  m_.out_[src].push_back(m_.transitions_.size());
  m_.transitions_.push_back({src, std::move(a), dst});
}

CounterMachine CounterMachineBuilder::build() {
  if (m_.states_.empty()) throw Error(Errc::invalid_machine, "counter machine has no states");
  return m_;
}

bool zero_tests_hold(const CounterAction &a, const Valuation &v) {
  for (auto z : a.zero)
    if (v[z] != 0) return false;
  return true;
}

static void apply(const CounterMachine &m, CounterConfig &cfg, const CounterAction &a) {
  if (!zero_tests_hold(a, cfg.valuation))
    throw Error(Errc::zero_test_failed, "zero test failed for " + counter_action_string(m, a));
  if (a.op == CounterOp::inc) {
    ++cfg.valuation[a.counter];
  } else {
    if (cfg.valuation[a.counter] == 0)
      throw Error(Errc::decrement_on_zero, "decrement of " + m.counter_name(a.counter) + " at 0");
    --cfg.valuation[a.counter];
  }
}

CounterConfig counter_fire(const CounterMachine &m, const CounterConfig &cfg, std::uint32_t t) {
  const auto &tr = m.transitions()[t];
  if (tr.src != cfg.state) throw Error(Errc::no_such_transition, "transition not enabled here");
  CounterConfig next = cfg;
  apply(m, next, tr.action);
  next.state = tr.dst;
  return next;
}

CounterConfig counter_step(const CounterMachine &m, const CounterConfig &cfg,
                           const CounterAction &a) {
  for (auto t : m.outgoing(cfg.state))
    if (m.transitions()[t].action == a) return counter_fire(m, cfg, t);
  throw Error(Errc::no_such_transition, "no transition labeled " + counter_action_string(m, a) +
                                            " from " + m.state_name(cfg.state));
}

CounterConfig run_counter_trace(const CounterMachine &m, const CounterConfig &start,
                                const CounterTrace &trace) {
  CounterConfig cur = start;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    try {
      cur = counter_step(m, cur, trace[i]);
    } catch (Error &e) {
      e.at(static_cast<long>(i));
      throw;
    }
  }
  return cur;
}

std::string counter_action_string(const CounterMachine &m, const CounterAction &a) {
  std::string s = (a.op == CounterOp::inc ? "inc " : "dec ") + m.counter_name(a.counter);
  if (!a.zero.empty()) {
    s += " zero";
    for (auto z : a.zero) s += " " + m.counter_name(z);
  }
  return s;
}

} // namespace ibfifo
