#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ibfifo {

using Symbol = std::uint32_t;
inline constexpr Symbol kEpsilon = UINT32_MAX;

class Nfa {
public:
  explicit Nfa(std::uint32_t num_symbols = 0) : num_symbols_(num_symbols) {}

  std::uint32_t num_symbols() const { return num_symbols_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(out_.size()); }
  std::uint32_t add_state(bool final = false);
  void add_edge(std::uint32_t from, Symbol s, std::uint32_t to);
  void add_initial(std::uint32_t s) { initial_.push_back(s); }
  void set_final(std::uint32_t s, bool f = true) { final_[s] = f; }

  const std::vector<std::uint32_t> &initial() const { return initial_; }
  bool is_final(std::uint32_t s) const { return final_[s]; }
  const std::vector<std::pair<Symbol, std::uint32_t>> &edges(std::uint32_t s) const {
    return out_[s];
  }

private:
  std::uint32_t num_symbols_;
  std::vector<std::uint32_t> initial_;
  std::vector<char> final_;
  std::vector<std::vector<std::pair<Symbol, std::uint32_t>>> out_;
};

// partial deterministic automaton; init() < 0 means the empty language with no states
class Dfa {
public:
  explicit Dfa(std::uint32_t num_symbols = 0) : num_symbols_(num_symbols) {}

  std::uint32_t num_symbols() const { return num_symbols_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(final_.size()); }
  std::uint32_t add_state(bool final = false);
  void set(std::uint32_t s, Symbol a, std::uint32_t t) {
    delta_[static_cast<std::size_t>(s) * num_symbols_ + a] = static_cast<std::int32_t>(t);
  }
  std::int32_t next(std::uint32_t s, Symbol a) const {
    return delta_[static_cast<std::size_t>(s) * num_symbols_ + a];
  }
  std::int32_t init() const { return init_; }
  void set_init(std::int32_t s) { init_ = s; }
  bool is_final(std::uint32_t s) const { return final_[s]; }
  void set_final(std::uint32_t s, bool f = true) { final_[s] = f; }

  // state reached after reading w, or -1
  std::int32_t run(const std::vector<Symbol> &w) const;
  std::int32_t run_from(std::int32_t s, const std::vector<Symbol> &w) const;
  bool accepts(const std::vector<Symbol> &w) const;

private:
  std::uint32_t num_symbols_;
  std::int32_t init_ = -1;
  std::vector<char> final_;
  std::vector<std::int32_t> delta_;
};

Dfa determinize(const Nfa &n);
Nfa to_nfa(const Dfa &d);
Dfa trim(const Dfa &d);
Dfa minimize(const Dfa &d);
Dfa complete(const Dfa &d);
Dfa complement(const Dfa &d);
Dfa intersect(const Dfa &a, const Dfa &b);
bool is_empty(const Dfa &d);
std::optional<std::vector<Symbol>> shortest_accepted(const Dfa &d);
bool included(const Dfa &sub, const Dfa &sup);
bool equivalent(const Dfa &a, const Dfa &b);
Dfa prefix_closure(const Dfa &d);
Dfa infix_closure(const Dfa &d);
// state sets reachable from init / co-reachable to final
std::vector<char> accessible(const Dfa &d);
std::vector<char> coaccessible(const Dfa &d);

Nfa nfa_concat(const Nfa &a, const Nfa &b);
Nfa nfa_union(const Nfa &a, const Nfa &b);
Nfa nfa_star(const Nfa &a);
Nfa nfa_word(std::uint32_t num_symbols, const std::vector<Symbol> &w);
Dfa dfa_concat(const Dfa &a, const Dfa &b);

// w1* w2* ... wn*
Dfa tuple_pattern(std::uint32_t num_symbols, const std::vector<std::vector<Symbol>> &words);
// language { u over new symbols | h(u) in L(d) }; h(e) == nullopt kills e
Dfa inverse_image(const Dfa &d, std::uint32_t new_num_symbols,
                  const std::function<std::optional<Symbol>(Symbol)> &h);
// injective relabelling into a (possibly larger) symbol space
Dfa relabel(const Dfa &d, std::uint32_t new_num_symbols, const std::vector<Symbol> &map);
std::vector<Symbol> used_symbols(const Dfa &d);
std::vector<std::vector<Symbol>> enumerate_words(const Dfa &d, std::size_t max_len);

} // namespace ibfifo
