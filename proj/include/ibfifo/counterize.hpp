#pragma once

#include <optional>
#include <vector>

#include "ibfifo/bounded_lang.hpp"
#include "ibfifo/counter.hpp"
#include "ibfifo/normalize.hpp"

namespace ibfifo {

inline constexpr LetterId kBottom = UINT32_MAX;
// per channel: last letter sent, or kBottom
using LastSent = std::vector<LetterId>;

struct CounterIndexing {
  std::size_t num_channels = 0;
  std::size_t num_counters = 0;
  std::vector<std::vector<CounterId>> counter; // [c][i] = x_{c,i}
  std::vector<std::vector<Word>> tuple;        // [c][i] = w_{c,i}
  std::vector<ChannelId> letter_channel;
  std::vector<std::uint32_t> word_index; // letter -> i
  std::vector<std::uint32_t> position;   // letter -> offset inside its word
  std::vector<std::vector<CounterId>> zero_of; // letter -> {x_{c,j} | j < i}
  std::vector<Dfa> language;
  std::vector<Dfa> infix;

  CounterId counter_of(LetterId a) const { return counter[letter_channel[a]][word_index[a]]; }
};

// specs: distinct-letter, one per channel in channel order, over num_letters letters
CounterIndexing make_indexing(const std::vector<ValidatedSpec> &specs, std::size_t num_letters);

struct CounterBundle {
  CounterMachine machine; // transition t simulates transition t of the materialized FIFO machine
  CounterIndexing idx;
};

CounterBundle build_counter_machine(const NormalFormBundle &b);
CounterMachine build_counter_machine(const FifoMachine &m, const CounterIndexing &idx);

CounterAction action_image(const FifoAction &a, const CounterIndexing &idx);
CounterTrace trace_image(const Trace &t, const CounterIndexing &idx);

Valuation contents_to_valuation(const Contents &w, const CounterIndexing &idx);
bool is_good(const CounterIndexing &idx, ChannelId c, LetterId a, const Word &w);
std::vector<LastSent> pairs_of(const CounterIndexing &idx, const Contents &w);
bool in_pairs(const CounterIndexing &idx, const Contents &w, const LastSent &a);
std::optional<Word> valuation_to_word(const CounterIndexing &idx, ChannelId c, const std::uint32_t *v,
                                      LetterId last);
std::optional<Contents> valuation_to_contents(const Valuation &v, const LastSent &a,
                                              const CounterIndexing &idx);

struct Preimage {
  enum class Status { unique, none, multiple } status = Status::none;
  Trace trace;
};
// the unique sigma in Pref(V) with [[sigma]] = tau
Preimage trace_preimage(const CounterTrace &tau, const CounterIndexing &idx, const ValidAutomaton &va);

bool is_zero_restricted(const CounterTrace &tau);

} // namespace ibfifo
