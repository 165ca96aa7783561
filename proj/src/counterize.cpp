#include "ibfifo/counterize.hpp"

#include <algorithm>

namespace ibfifo {

CounterIndexing make_indexing(const std::vector<ValidatedSpec> &specs, std::size_t num_letters) {
  CounterIndexing idx;
  idx.num_channels = specs.size();
  idx.counter.resize(specs.size());
  idx.tuple.resize(specs.size());
  idx.letter_channel.assign(num_letters, 0);
  idx.word_index.assign(num_letters, UINT32_MAX);
  idx.position.assign(num_letters, 0);
  idx.zero_of.assign(num_letters, {});
  for (const auto &v : specs) {
    const auto c = v.spec.channel;
    idx.tuple[c] = v.spec.tuple;
    for (std::uint32_t i = 0; i < v.spec.tuple.size(); ++i) {
      idx.counter[c].push_back(static_cast<CounterId>(idx.num_counters++));
      const auto &w = v.spec.tuple[i];
      for (std::uint32_t k = 0; k < w.size(); ++k) {
        if (idx.word_index[w[k]] != UINT32_MAX)
          throw Error(Errc::invalid_machine, "tuple is not distinct-letter");
        idx.letter_channel[w[k]] = c;
        idx.word_index[w[k]] = i;
        idx.position[w[k]] = k;
      }
    }
  }
  idx.language.resize(specs.size());
  idx.infix.resize(specs.size());
  for (const auto &v : specs) {
    const auto c = v.spec.channel;
    idx.language[c] = v.minimal;
    idx.infix[c] = infix_closure(v.minimal);
  }
  for (LetterId a = 0; a < num_letters; ++a) {
    if (idx.word_index[a] == UINT32_MAX) continue;
    const auto &cs = idx.counter[idx.letter_channel[a]];
    idx.zero_of[a].assign(cs.begin(), cs.begin() + idx.word_index[a]);
  }
  return idx;
}

namespace {

std::vector<std::string> counter_names(const CounterIndexing &idx,
                                       const std::function<std::string(ChannelId)> &chan) {
  std::vector<std::string> names(idx.num_counters);
  const bool short_names = idx.num_channels == 1 && idx.num_counters <= 3;
  for (ChannelId c = 0; c < idx.num_channels; ++c)
    for (std::size_t i = 0; i < idx.counter[c].size(); ++i)
      names[idx.counter[c][i]] = short_names ? std::string(1, "xyz"[i])
                                             : "x_" + chan(c) + "_" + std::to_string(i + 1);
  return names;
}

} // namespace

CounterAction action_image(const FifoAction &a, const CounterIndexing &idx) {
  if (a.letter >= idx.word_index.size() || idx.word_index[a.letter] == UINT32_MAX)
    throw Error(Errc::undeclared_id, "letter outside the indexed alphabet");
  CounterAction ca;
  ca.counter = idx.counter_of(a.letter);
  if (a.dir == Dir::send) {
    ca.op = CounterOp::inc;
  } else {
    ca.op = CounterOp::dec;
    ca.zero = idx.zero_of[a.letter];
  }
  return ca;
}

CounterTrace trace_image(const Trace &t, const CounterIndexing &idx) {
  CounterTrace out;
  out.reserve(t.size());
  for (const auto &a : t) out.push_back(action_image(a, idx));
  return out;
}

CounterMachine build_counter_machine(const FifoMachine &m, const CounterIndexing &idx) {
  CounterMachineBuilder b;
  for (const auto &n : counter_names(idx, [&](ChannelId c) { return m.channel_name(c); }))
    b.add_counter(n);
  for (StateId s = 0; s < m.num_states(); ++s) b.add_state(m.state_name(s));
  b.set_init(m.init());
  for (const auto &t : m.transitions()) b.add_transition(t.src, action_image(t.action, idx), t.dst);
  return b.build();
}

CounterBundle build_counter_machine(const NormalFormBundle &b) {
  CounterBundle out;
  out.idx = make_indexing(b.specs(), b.inverse_machine().num_letters());
  out.machine = build_counter_machine(b.machine(), out.idx);
  return out;
}

Valuation contents_to_valuation(const Contents &w, const CounterIndexing &idx) {
  if (w.size() != idx.num_channels)
    throw Error(Errc::invalid_machine, "contents has the wrong number of channels");
  Valuation v(idx.num_counters, 0);
  for (ChannelId c = 0; c < w.size(); ++c)
    for (auto a : w[c]) {
      if (a >= idx.word_index.size() || idx.word_index[a] == UINT32_MAX ||
          idx.letter_channel[a] != c)
        throw Error(Errc::undeclared_id, "letter outside the indexed alphabet");
      ++v[idx.counter_of(a)];
    }
  return v;
}

bool is_good(const CounterIndexing &idx, ChannelId c, LetterId a, const Word &w) {
  if (!idx.infix[c].accepts(w)) return false;
  return w.empty() || w.back() == a;
}

std::vector<LastSent> pairs_of(const CounterIndexing &idx, const Contents &w) {
  std::vector<std::vector<LetterId>> per(idx.num_channels);
  for (ChannelId c = 0; c < idx.num_channels; ++c) {
    if (!idx.infix[c].accepts(w[c])) return {};
    if (w[c].empty()) {
      for (const auto &word : idx.tuple[c]) per[c].insert(per[c].end(), word.begin(), word.end());
      std::sort(per[c].begin(), per[c].end());
      per[c].push_back(kBottom);
    } else {
      per[c].push_back(w[c].back());
    }
  }
  std::vector<LastSent> out{LastSent{}};
  for (ChannelId c = 0; c < idx.num_channels; ++c) {
    std::vector<LastSent> next;
    for (const auto &p : out)
      for (auto a : per[c]) {
        auto q = p;
        q.push_back(a);
        next.push_back(std::move(q));
      }
    out.swap(next);
  }
  return out;
}

bool in_pairs(const CounterIndexing &idx, const Contents &w, const LastSent &a) {
  for (ChannelId c = 0; c < idx.num_channels; ++c) {
    if (!idx.infix[c].accepts(w[c])) return false;
    if (!w[c].empty() && w[c].back() != a[c]) return false;
  }
  return true;
}

std::optional<Word> valuation_to_word(const CounterIndexing &idx, ChannelId c, const std::uint32_t *v,
                                      LetterId last) {
  const auto &cs = idx.counter[c];
  const auto &tuple = idx.tuple[c];
  std::int64_t lastblock = -1;
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (v[cs[i]] > 0) lastblock = static_cast<std::int64_t>(i);
  if (lastblock < 0) return Word{};
  if (last == kBottom || idx.letter_channel[last] != c ||
      idx.word_index[last] != static_cast<std::uint32_t>(lastblock))
    return std::nullopt;
  Word w;
  for (std::size_t i = 0; i <= static_cast<std::size_t>(lastblock); ++i) {
    const auto n = v[cs[i]];
    if (n == 0) continue;
    const auto &word = tuple[i];
    // block of length n ending at `end`, read cyclically backwards through word
    std::size_t end = static_cast<std::int64_t>(i) == lastblock ? idx.position[last] : word.size() - 1;
    std::size_t start = (end + word.size() * (n / word.size() + 1) - (n - 1)) % word.size();
    for (std::uint32_t k = 0; k < n; ++k) w.push_back(word[(start + k) % word.size()]);
  }
  if (!idx.infix[c].accepts(w)) return std::nullopt;
  return w;
}

std::optional<Contents> valuation_to_contents(const Valuation &v, const LastSent &a,
                                              const CounterIndexing &idx) {
  Contents out(idx.num_channels);
  for (ChannelId c = 0; c < idx.num_channels; ++c) {
    auto w = valuation_to_word(idx, c, v.data(), a[c]);
    if (!w) return std::nullopt;
    out[c] = std::move(*w);
  }
  return out;
}

Preimage trace_preimage(const CounterTrace &tau, const CounterIndexing &idx, const ValidAutomaton &va) {
  std::vector<std::pair<ChannelId, std::uint32_t>> where(idx.num_counters);
  for (ChannelId c = 0; c < idx.num_channels; ++c)
    for (std::uint32_t i = 0; i < idx.counter[c].size(); ++i) where[idx.counter[c][i]] = {c, i};
  std::vector<std::pair<std::vector<std::uint32_t>, Trace>> frontier{{va.initial(), {}}};
  for (const auto &ca : tau) {
    if (ca.counter >= idx.num_counters) return {};
    auto [c, i] = where[ca.counter];
    decltype(frontier) next;
    for (const auto &[st, sigma] : frontier)
      for (auto letter : idx.tuple[c][i]) {
        FifoAction a{ca.op == CounterOp::inc ? Dir::send : Dir::receive, c, letter};
        if (a.dir == Dir::receive ? ca.zero != idx.zero_of[letter] : !ca.zero.empty()) continue;
        auto s = st;
        if (!va.step(s, a)) continue;
        auto t = sigma;
        t.push_back(a);
        next.emplace_back(std::move(s), std::move(t));
      }
    if (next.size() > 64) return {Preimage::Status::multiple, {}};
    frontier.swap(next);
    if (frontier.empty()) return {};
  }
  if (frontier.size() > 1) return {Preimage::Status::multiple, {}};
  return {Preimage::Status::unique, std::move(frontier[0].second)};
}

bool is_zero_restricted(const CounterTrace &tau) {
  std::vector<CounterId> tested;
  for (const auto &a : tau) {
    tested.insert(tested.end(), a.zero.begin(), a.zero.end());
    if (std::find(tested.begin(), tested.end(), a.counter) != tested.end()) return false;
  }
  return true;
}

} // namespace ibfifo
