#include "ibfifo/bounded_lang.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ibfifo {

ValidatedSpec validate_bounded_spec(const BoundedLangSpec &spec, bool strict_alphabet) {
  if (spec.tuple.empty()) throw Error(Errc::empty_tuple_word, "tuple has no words");
  for (const auto &w : spec.tuple)
    if (w.empty()) throw Error(Errc::empty_tuple_word, "tuple contains the empty word");
  const auto k = spec.language.num_symbols();
  for (const auto &w : spec.tuple)
    for (auto a : w)
      if (a >= k) throw Error(Errc::alphabet_mismatch, "tuple letter outside the alphabet");

  ValidatedSpec v;
  v.spec = spec;
  v.minimal = minimize(spec.language);
  if (v.minimal.init() < 0) throw Error(Errc::empty_language, "bounded language is empty");
  v.pattern = tuple_pattern(k, spec.tuple);

  std::set<Symbol> tuple_letters;
  std::size_t total = 0;
  for (const auto &w : spec.tuple) {
    tuple_letters.insert(w.begin(), w.end());
    total += w.size();
  }
  auto used = used_symbols(v.minimal);
  std::set<Symbol> lang_letters(used.begin(), used.end());
  if (strict_alphabet ? lang_letters != tuple_letters
                      : !std::includes(tuple_letters.begin(), tuple_letters.end(),
                                       lang_letters.begin(), lang_letters.end()))
    throw Error(Errc::alphabet_mismatch, "Alph(L) differs from the letters of the tuple");
  if (!included(v.minimal, v.pattern))
    throw Error(Errc::not_bounded, "language is not contained in w1*...wn*");

  v.distinct_letter = tuple_letters.size() == total;
  v.letter_bounded = std::all_of(spec.tuple.begin(), spec.tuple.end(),
                                 [](const Word &w) { return w.size() == 1; });
  return v;
}

DistinctSpec distinct_letterize(const ValidatedSpec &spec) {
  std::vector<LetterId> image;
  std::vector<std::vector<Symbol>> words;
  for (const auto &w : spec.spec.tuple) {
    std::vector<Symbol> nw;
    for (auto a : w) {
      nw.push_back(static_cast<Symbol>(image.size()));
      image.push_back(a);
    }
    words.push_back(std::move(nw));
  }
  const auto m = static_cast<std::uint32_t>(image.size());
  Dfa pre = inverse_image(spec.minimal, m, [&](Symbol e) -> std::optional<Symbol> { return image[e]; });
  Dfa lang = minimize(intersect(pre, tuple_pattern(m, words)));

  auto used = used_symbols(lang);
  std::set<Symbol> live(used.begin(), used.end());
  DistinctSpec out;
  out.channel = spec.spec.channel;
  std::vector<Symbol> renum(m, kEpsilon);
  for (const auto &w : words) {
    bool keep = std::any_of(w.begin(), w.end(), [&](Symbol a) { return live.count(a) > 0; });
    if (!keep) continue;
    std::vector<Symbol> nw;
    for (auto a : w) {
      renum[a] = static_cast<Symbol>(out.image.size());
      nw.push_back(renum[a]);
      out.image.push_back(image[a]);
    }
    out.tuple.push_back(std::move(nw));
  }
  out.language = minimize(relabel(lang, static_cast<std::uint32_t>(out.image.size()), renum));
  return out;
}

ValidAutomaton::ValidAutomaton(std::vector<Dfa> langs, std::vector<ChannelId> letter_channel)
    : letter_channel_(std::move(letter_channel)) {
  for (auto &l : langs) comp_.push_back(minimize(l));
}

std::vector<std::uint32_t> ValidAutomaton::initial() const {
  std::vector<std::uint32_t> st;
  for (const auto &d : comp_) {
    st.push_back(static_cast<std::uint32_t>(d.init()));
    st.push_back(static_cast<std::uint32_t>(d.init()));
  }
  return st;
}

bool ValidAutomaton::step(std::vector<std::uint32_t> &st, const FifoAction &a) const {
  const auto c = letter_channel_[a.letter];
  const Dfa &d = comp_[c];
  auto &slot = st[2 * c + (a.dir == Dir::receive ? 1 : 0)];
  auto t = d.next(slot, a.letter);
  if (t < 0) return false;
  slot = static_cast<std::uint32_t>(t);
  return true;
}

bool ValidAutomaton::send_final(const std::vector<std::uint32_t> &st) const {
  for (std::size_t c = 0; c < comp_.size(); ++c)
    if (!comp_[c].is_final(st[2 * c])) return false;
  return true;
}

bool ValidAutomaton::recv_final(const std::vector<std::uint32_t> &st) const {
  for (std::size_t c = 0; c < comp_.size(); ++c)
    if (!comp_[c].is_final(st[2 * c + 1])) return false;
  return true;
}

Dfa ValidAutomaton::materialize() const {
  const auto letters = static_cast<std::uint32_t>(letter_channel_.size());
  Dfa d(2 * letters);
  for (const auto &c : comp_)
    if (c.init() < 0) return d;
  std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
  std::vector<std::vector<std::uint32_t>> states;
  auto intern = [&](const std::vector<std::uint32_t> &s) {
    auto [it, fresh] = ids.try_emplace(s, d.size());
    if (fresh) {
      d.add_state(send_final(s));
      states.push_back(s);
    }
    return it->second;
  };
  d.set_init(static_cast<std::int32_t>(intern(initial())));
  for (std::size_t i = 0; i < states.size(); ++i)
    for (LetterId l = 0; l < letters; ++l)
      for (Dir dir : {Dir::send, Dir::receive}) {
        FifoAction a{dir, letter_channel_[l], l};
        auto s = states[i];
        if (!step(s, a)) continue;
        auto id = intern(s);
        d.set(static_cast<std::uint32_t>(i), action_symbol(a), id);
      }
  return trim(d);
}

} // namespace ibfifo
