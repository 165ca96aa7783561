#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "ibfifo/automaton.hpp"
#include "ibfifo/counterize.hpp"
#include "ibfifo/fifo.hpp"
#include "ibfifo/normalize.hpp"

namespace ibfifo {

// a rational relation over channel contents; symbols are tuple letters
struct Relation {
  std::size_t num_channels = 0;
  std::vector<std::vector<LetterId>> theta; // symbol -> letter per channel (kEpsilon = none)
  Dfa dfa;
  bool universal = false;
};

Relation universal_relation(std::size_t num_channels);
// bracketed tuples [a,_]; bare letters allowed when there is one channel
Relation parse_relation(std::string_view text, const FifoMachine &m);
std::string relation_string(const Relation &r, const FifoMachine &m);

// h^-1(R): each component letter is replaced by its preimages
Relation inverse_substitute(const Relation &r, const LetterHom &h);

bool relation_contains(const Relation &r, const Contents &w);

// <v>_a defined and in R, by search under the letter-count budget given by v
bool membership_in_Ta(const Valuation &v, const LastSent &a, const Relation &r,
                      const CounterIndexing &idx);

// R ∩ prod_c Infix(L_c) when finite, otherwise nullopt
std::optional<std::vector<Contents>> finite_infix_contents(const Relation &r, const CounterIndexing &idx,
                                                            std::size_t limit = 4096);

} // namespace ibfifo
