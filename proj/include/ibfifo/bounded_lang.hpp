#pragma once

#include <vector>

#include "ibfifo/automaton.hpp"
#include "ibfifo/fifo.hpp"

namespace ibfifo {

struct BoundedLangSpec {
  ChannelId channel = 0;
  std::vector<Word> tuple;
  Dfa language; // over the owning machine's letter ids
};

struct ValidatedSpec {
  BoundedLangSpec spec;
  Dfa minimal;
  Dfa pattern; // w1* ... wn*
  bool distinct_letter = false;
  bool letter_bounded = false;
};

// strict_alphabet: reject Alph(L) != Alph(w1...wn) instead of tolerating unused words
ValidatedSpec validate_bounded_spec(const BoundedLangSpec &spec, bool strict_alphabet = true);

struct DistinctSpec {
  ChannelId channel = 0;
  std::vector<LetterId> image;            // local letter -> original letter
  std::vector<std::vector<Symbol>> tuple; // over local letters
  Dfa language;                           // over local letters
};

DistinctSpec distinct_letterize(const ValidatedSpec &spec);

// action alphabet of a machine: 2*letter for sends, 2*letter+1 for receives
inline Symbol action_symbol(const FifoAction &a) {
  return 2 * a.letter + (a.dir == Dir::receive ? 1 : 0);
}

// V = L! ∩ Pref(L?) as a shuffle of per-channel components; a state is
// [send_0, recv_0, send_1, recv_1, ...]
class ValidAutomaton {
public:
  ValidAutomaton() = default;
  // langs[c] over the letters of the normalized machine; letter_channel maps letters to channels
  ValidAutomaton(std::vector<Dfa> langs, std::vector<ChannelId> letter_channel);

  std::size_t num_channels() const { return comp_.size(); }
  const Dfa &component(ChannelId c) const { return comp_[c]; }
  std::vector<std::uint32_t> initial() const;
  bool step(std::vector<std::uint32_t> &st, const FifoAction &a) const;
  bool send_final(const std::vector<std::uint32_t> &st) const;
  bool recv_final(const std::vector<std::uint32_t> &st) const;
  // deterministic automaton over action symbols, accepting exactly V
  Dfa materialize() const;

private:
  std::vector<Dfa> comp_; // trimmed minimal automaton of each L_c
  std::vector<ChannelId> letter_channel_;
};

} // namespace ibfifo
