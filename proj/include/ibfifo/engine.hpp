#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ibfifo/counterize.hpp"
#include "ibfifo/normalize.hpp"
#include "ibfifo/relation.hpp"

namespace ibfifo {

enum class Answer { yes, no, unknown };
const char *answer_name(Answer a);

struct EngineOptions {
  std::size_t max_states = 2'000'000; // counter configurations per search
  std::size_t max_depth = SIZE_MAX;
  unsigned workers = 1;
  std::size_t km_budget = 200'000;
  std::size_t lp_cells = 6'000'000;
  std::size_t materialize_cap = 100'000;
};

struct Verdict {
  Answer answer = Answer::unknown;
  std::string method;
  Trace witness; // over the normalized alphabet
  Trace pump;    // repeatable suffix of self-covering witnesses
  std::optional<FifoConfig> reached; // over the original alphabet
  std::size_t explored = 0;
  std::size_t bound = 0; // exhausted budget when unknown
  std::string detail;
};

// --- brute-force FIFO exploration -------------------------------------------

struct FifoExploration {
  std::vector<FifoConfig> configs;
  std::vector<std::vector<std::uint32_t>> guard; // send-language DFA state per channel
  std::vector<char> complete;                    // every send projection is a word of L_c
  std::vector<std::int64_t> parent;
  std::vector<FifoAction> via;
  std::vector<std::uint32_t> depth;
  bool saturated = true; // no configuration was cut by a bound

  Trace trace_to(std::size_t i) const;
};

// send_langs: per channel DFA; a send is enabled only while the send projection stays a
// prefix of that language. Without it every send is enabled.
FifoExploration explore_fifo(const FifoMachine &m, std::size_t max_depth, std::size_t channel_bound,
                             const std::vector<Dfa> *send_langs = nullptr);

// --- counter-configuration search over the normal form ------------------------

struct SearchNode {
  std::uint32_t p;
  std::int64_t parent;
  FifoAction via;
  std::uint32_t depth;
};

struct SearchGoal {
  bool track_last = true;
  std::vector<char> drop_counter; // untracked counters (write-only channels)
  int cut = 0;                    // 1: v_anc < v at a same-state ancestor, 2: v_anc <= v
  bool find_cycle = false;        // after saturation, look for a cycle in the explored graph
  std::function<bool(std::uint32_t p, const std::uint32_t *v, const LetterId *last)> goal;
};

struct SearchResult {
  enum class Status { goal, dominated, cycle, saturated, budget } status = Status::budget;
  std::uint32_t node = 0;
  std::uint32_t ancestor = 0;
  std::size_t explored = 0;
  Trace path;   // init -> ancestor (or goal node)
  Trace loop;   // ancestor -> node
  Valuation valuation;
  LastSent last;
  std::uint32_t p = 0;
};

class CounterSearch {
public:
  CounterSearch(const NormalFormBundle &b, const CounterIndexing &idx, const EngineOptions &opt);
  SearchResult run(const SearchGoal &g);

private:
  const NormalFormBundle &b_;
  const CounterIndexing &idx_;
  EngineOptions opt_;
};

// --- filters --------------------------------------------------------------------

enum class Coverability { unreachable, maybe };
// Karp–Miller style: zero tests pass on 0 or omega and leave the counter at 0
Coverability coverability_filter(const CounterMachine &c, const std::vector<char> &target_states,
                                 const Valuation &min, std::size_t budget);

struct CounterConstraint {
  enum class Kind { free, eq, ge } kind = Kind::free;
  long value = 0;
};
// flow equations of the control graph plus counter balance; nullopt when too large
std::optional<bool> state_equation_feasible(const CounterMachine &c, const std::vector<char> &target_states,
                                            const std::vector<CounterConstraint> &cons,
                                            std::size_t max_cells);

// --- decision procedures --------------------------------------------------------

// q: original control state; w: contents over the original alphabet
Verdict decide_reachability(const NormalFormBundle &b, StateId q, const Contents &w,
                            const EngineOptions &opt = {});
// w over the normalized (distinct) alphabet
Verdict decide_reachability_distinct(const NormalFormBundle &b, StateId q, const Contents &w,
                                     const EngineOptions &opt = {});
// r over the original alphabet
Verdict decide_rational_reachability(const NormalFormBundle &b, StateId q, const Relation &r,
                                     const EngineOptions &opt = {});
Verdict decide_control_state(const NormalFormBundle &b, StateId q, const EngineOptions &opt = {});
Verdict decide_deadlock(const NormalFormBundle &b, const EngineOptions &opt = {});
// yes = bounded, no = unbounded (witness + pump)
Verdict decide_boundedness(const NormalFormBundle &b, const EngineOptions &opt = {});
// yes = terminating, no = a non-terminating run (witness + pump)
Verdict decide_termination(const NormalFormBundle &b, const EngineOptions &opt = {});

// plain BFS over a raw counter machine (no last-sent tracking)
struct CounterExploration {
  bool found = false;
  bool saturated = false;
  std::size_t explored = 0;
  CounterTrace witness;
};
CounterExploration explore_counter(const CounterMachine &c,
                                   const std::function<bool(const CounterConfig &)> &goal,
                                   std::size_t max_states);

} // namespace ibfifo
