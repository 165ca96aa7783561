#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ibfifo/bounded_lang.hpp"
#include "ibfifo/counter.hpp"
#include "ibfifo/engine.hpp"
#include "ibfifo/fifo.hpp"

namespace ibfifo {

enum class ReductionKind { reach_to_csr, csr_to_reach, reach_to_deadlock, bounded_to_reach, term_to_reach };

// accepts reach->csr, reach-csr, reach_to_csr ...
ReductionKind parse_reduction_kind(std::string_view s);
const char *reduction_kind_name(ReductionKind k);

struct ReachTarget {
  StateId state = 0;
  std::optional<Contents> contents; // nullopt: any contents
};

struct FifoReduction {
  FifoMachine machine;
  std::vector<BoundedLangSpec> specs;
  std::vector<ReachTarget> targets; // empty when the question is deadlock
  bool deadlock = false;
};

struct CounterReduction {
  CounterMachine machine;
  std::vector<CounterConfig> targets;
};

// (q, w) reachable in M iff q_end reachable in the result
FifoReduction reduce_reach_to_csr(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs, StateId q,
                                  const Contents &w);
// q reachable in M iff one of the (state, empty) targets is reachable in the result
FifoReduction reduce_csr_to_reach(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs, StateId q);
// (q, w) reachable in M iff the result has a reachable deadlock
FifoReduction reduce_reach_to_deadlock(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs, StateId q,
                                       const Contents &w);

// C unbounded iff some target of C' is reachable
CounterReduction reduce_bounded_to_reach(const CounterMachine &c);
// C has an infinite run iff the target of C'' is reachable
CounterReduction reduce_term_to_reach(const CounterMachine &c);

struct ReductionInput {
  FifoMachine machine;
  std::vector<BoundedLangSpec> specs;
  StateId state = 0;
  Contents contents;
};

struct ReductionArtifact {
  ReductionKind kind;
  std::optional<FifoReduction> fifo;
  std::optional<CounterReduction> counter;
};

// the counter kinds counterize the normal form of the input first
ReductionArtifact apply_reduction(ReductionKind kind, const ReductionInput &in);
std::string print_reduction(const ReductionArtifact &a);

// answers the reduced question by direct search on the artifact
// (guarded FIFO BFS up to max_depth, or counter BFS up to max_states)
Answer solve_artifact(const ReductionArtifact &a, std::size_t max_depth, std::size_t max_states);

// --- output-bounded questions -----------------------------------------------------

enum class ObKind { reach, csr, bounded, term };
ObKind parse_ob_kind(std::string_view s);

struct ObVerdict {
  Verdict verdict;     // witness and pump lifted to the letters of `machine`
  FifoMachine machine; // the input machine, or its $-augmented version
};

// receive projections are restricted instead of send projections
ObVerdict ob_decide(ObKind kind, const FifoMachine &m, const std::vector<BoundedLangSpec> &specs, StateId q,
                    const Contents &w, const EngineOptions &opt = {});

// the machine with every send duplicated as a send of a fresh per-channel $ letter and the
// send languages Pref(L_c)·$*
struct DollarAugmented {
  FifoMachine machine;
  std::vector<BoundedLangSpec> specs;
};
DollarAugmented dollar_augment(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs);

} // namespace ibfifo
