#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ibfifo/automaton.hpp"

namespace ibfifo {

struct Regex {
  enum class Kind { empty, eps, sym, cat, alt, star, plus };
  Kind kind = Kind::empty;
  Symbol sym = 0;
  std::vector<Regex> kids;

  static Regex none() { return {}; }
  static Regex epsilon() { return {Kind::eps, 0, {}}; }
  static Regex symbol(Symbol s) { return {Kind::sym, s, {}}; }
  static Regex cat(Regex a, Regex b);
  static Regex alt(Regex a, Regex b);
  static Regex star(Regex a);
  static Regex plus(Regex a);

  friend bool operator==(const Regex &, const Regex &) = default;
};

// maps one identifier token (or bracketed tuple token) to the symbols it spells
using TokenResolver = std::function<std::vector<Symbol>(const std::string &)>;

Regex parse_regex(std::string_view text, const TokenResolver &resolve);
Nfa regex_to_nfa(const Regex &r, std::uint32_t num_symbols);
Dfa compile_regex(std::string_view text, const TokenResolver &resolve, std::uint32_t num_symbols);
Regex dfa_to_regex(const Dfa &d);
std::string regex_string(const Regex &r, const std::function<std::string(Symbol)> &name);

} // namespace ibfifo
