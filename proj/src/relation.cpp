#include "ibfifo/relation.hpp"

#include <cctype>
#include <map>
#include <set>

#include "ibfifo/regex.hpp"

namespace ibfifo {

Relation universal_relation(std::size_t num_channels) {
  Relation r;
  r.num_channels = num_channels;
  r.universal = true;
  return r;
}

Relation parse_relation(std::string_view text, const FifoMachine &m) {
  Relation r;
  r.num_channels = m.num_channels();
  auto trimmed = text;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.remove_suffix(1);
  if (trimmed == "any") return universal_relation(m.num_channels());

  std::map<std::vector<LetterId>, Symbol> ids;
  auto intern = [&](std::vector<LetterId> t) {
    auto [it, fresh] = ids.try_emplace(t, static_cast<Symbol>(r.theta.size()));
    if (fresh) r.theta.push_back(std::move(t));
    return it->second;
  };
  TokenResolver resolve = [&](const std::string &tok) -> std::vector<Symbol> {
    if (tok.front() == '[') {
      std::vector<std::string> parts{""};
      for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
        if (tok[i] == ',')
          parts.emplace_back();
        else if (!std::isspace(static_cast<unsigned char>(tok[i])))
          parts.back() += tok[i];
      }
      if (parts.size() != m.num_channels())
        throw Error(Errc::syntax, "tuple " + tok + " needs " + std::to_string(m.num_channels()) +
                                      " components");
      std::vector<LetterId> t;
      for (ChannelId c = 0; c < parts.size(); ++c) {
        if (parts[c] == "_" || parts[c] == "eps") {
          t.push_back(kEpsilon);
          continue;
        }
        auto w = parse_word(m, c, parts[c]);
        if (w.size() != 1) throw Error(Errc::syntax, "tuple component '" + parts[c] + "' is not one letter");
        t.push_back(w[0]);
      }
      return {intern(std::move(t))};
    }
    if (m.num_channels() != 1) throw Error(Errc::syntax, "bare letters need a single channel: " + tok);
    std::vector<Symbol> out;
    for (auto a : parse_word(m, 0, tok)) out.push_back(intern({a}));
    return out;
  };
  Regex re = parse_regex(trimmed, resolve);
  r.dfa = minimize(determinize(regex_to_nfa(re, static_cast<std::uint32_t>(r.theta.size()))));
  return r;
}

std::string relation_string(const Relation &r, const FifoMachine &m) {
  if (r.universal) return "any";
  return regex_string(dfa_to_regex(r.dfa), [&](Symbol s) {
    std::string out = "[";
    for (std::size_t c = 0; c < r.theta[s].size(); ++c) {
      if (c) out += ',';
      out += r.theta[s][c] == kEpsilon ? "_" : m.letter_name(r.theta[s][c]);
    }
    return out + "]";
  });
}

Relation inverse_substitute(const Relation &r, const LetterHom &h) {
  if (r.universal) return r;
  std::vector<std::vector<LetterId>> pre;
  for (LetterId e = 0; e < h.image.size(); ++e) {
    if (pre.size() <= h.image[e]) pre.resize(h.image[e] + 1);
    pre[h.image[e]].push_back(e);
  }
  Relation out;
  out.num_channels = r.num_channels;
  std::map<std::vector<LetterId>, Symbol> ids;
  std::vector<std::vector<Symbol>> expand(r.theta.size());
  for (Symbol s = 0; s < r.theta.size(); ++s) {
    std::vector<std::vector<LetterId>> acc{{}};
    for (auto a : r.theta[s]) {
      std::vector<std::vector<LetterId>> next;
      std::vector<LetterId> choices;
      if (a == kEpsilon)
        choices = {kEpsilon};
      else if (a < pre.size())
        choices = pre[a];
      for (const auto &p : acc)
        for (auto e : choices) {
          auto q = p;
          q.push_back(e);
          next.push_back(std::move(q));
        }
      acc.swap(next);
    }
    for (auto &t : acc) {
      auto [it, fresh] = ids.try_emplace(t, static_cast<Symbol>(out.theta.size()));
      if (fresh) out.theta.push_back(t);
      expand[s].push_back(it->second);
    }
  }
  Nfa n(static_cast<std::uint32_t>(out.theta.size()));
  for (std::uint32_t q = 0; q < r.dfa.size(); ++q) n.add_state(r.dfa.is_final(q));
  if (r.dfa.init() >= 0) n.add_initial(static_cast<std::uint32_t>(r.dfa.init()));
  for (std::uint32_t q = 0; q < r.dfa.size(); ++q)
    for (Symbol s = 0; s < r.dfa.num_symbols(); ++s) {
      auto t = r.dfa.next(q, s);
      if (t < 0) continue;
      for (auto e : expand[s]) n.add_edge(q, e, static_cast<std::uint32_t>(t));
    }
  out.dfa = minimize(determinize(n));
  return out;
}

bool relation_contains(const Relation &r, const Contents &w) {
  if (r.universal) return true;
  if (r.dfa.init() < 0) return false;
  std::set<std::vector<std::uint32_t>> seen;
  std::vector<std::vector<std::uint32_t>> stack;
  std::vector<std::uint32_t> start(w.size() + 1, 0);
  start[0] = static_cast<std::uint32_t>(r.dfa.init());
  seen.insert(start);
  stack.push_back(start);
  while (!stack.empty()) {
    auto cur = stack.back();
    stack.pop_back();
    bool done = r.dfa.is_final(cur[0]);
    for (std::size_t c = 0; done && c < w.size(); ++c) done = cur[c + 1] == w[c].size();
    if (done) return true;
    for (Symbol s = 0; s < r.theta.size(); ++s) {
      auto t = r.dfa.next(cur[0], s);
      if (t < 0) continue;
      auto nxt = cur;
      nxt[0] = static_cast<std::uint32_t>(t);
      bool ok = true;
      for (std::size_t c = 0; ok && c < w.size(); ++c) {
        auto a = r.theta[s][c];
        if (a == kEpsilon) continue;
        if (nxt[c + 1] < w[c].size() && w[c][nxt[c + 1]] == a)
          ++nxt[c + 1];
        else
          ok = false;
      }
      if (ok && seen.insert(nxt).second) stack.push_back(std::move(nxt));
    }
  }
  return false;
}

bool membership_in_Ta(const Valuation &v, const LastSent &a, const Relation &r,
                      const CounterIndexing &idx) {
  if (r.universal) return valuation_to_contents(v, a, idx).has_value();
  if (r.dfa.init() < 0) return false;
  const auto C = idx.num_channels;
  std::vector<char> used(C, 0);
  for (ChannelId c = 0; c < C; ++c)
    for (auto x : idx.counter[c]) used[c] |= v[x] > 0;
  // node: R state, infix state per channel, remaining budget per counter, last letter per channel
  using Node = std::vector<std::uint32_t>;
  Node start;
  start.push_back(static_cast<std::uint32_t>(r.dfa.init()));
  for (ChannelId c = 0; c < C; ++c) {
    if (idx.infix[c].init() < 0) return false;
    start.push_back(static_cast<std::uint32_t>(idx.infix[c].init()));
  }
  start.insert(start.end(), v.begin(), v.end());
  for (ChannelId c = 0; c < C; ++c) start.push_back(kBottom);
  const std::size_t budget_at = 1 + C, last_at = 1 + C + idx.num_counters;
  std::set<Node> seen{start};
  std::vector<Node> stack{start};
  while (!stack.empty()) {
    Node cur = std::move(stack.back());
    stack.pop_back();
    bool done = r.dfa.is_final(cur[0]);
    for (std::size_t x = 0; done && x < idx.num_counters; ++x) done = cur[budget_at + x] == 0;
    for (ChannelId c = 0; done && c < C; ++c) done = !used[c] || cur[last_at + c] == a[c];
    if (done) return true;
    for (Symbol s = 0; s < r.theta.size(); ++s) {
      auto t = r.dfa.next(cur[0], s);
      if (t < 0) continue;
      Node nxt = cur;
      nxt[0] = static_cast<std::uint32_t>(t);
      bool ok = true;
      for (ChannelId c = 0; ok && c < C; ++c) {
        auto e = r.theta[s][c];
        if (e == kEpsilon) continue;
        if (e >= idx.word_index.size() || idx.word_index[e] == UINT32_MAX || idx.letter_channel[e] != c) {
          ok = false;
          break;
        }
        auto st = idx.infix[c].next(nxt[1 + c], e);
        auto &budget = nxt[budget_at + idx.counter_of(e)];
        if (st < 0 || budget == 0) {
          ok = false;
          break;
        }
        nxt[1 + c] = static_cast<std::uint32_t>(st);
        --budget;
        nxt[last_at + c] = e;
      }
      if (ok && seen.insert(nxt).second) stack.push_back(std::move(nxt));
    }
  }
  return false;
}

std::optional<std::vector<Contents>> finite_infix_contents(const Relation &r, const CounterIndexing &idx,
                                                            std::size_t limit) {
  if (r.universal) return std::nullopt;
  std::vector<Contents> out;
  if (r.dfa.init() < 0) return out;
  const auto C = idx.num_channels;
  using Node = std::vector<std::uint32_t>;
  std::map<Node, std::uint32_t> ids;
  std::vector<Node> nodes;
  std::vector<std::vector<std::pair<Symbol, std::uint32_t>>> succ;
  auto intern = [&](const Node &n) {
    auto [it, fresh] = ids.try_emplace(n, static_cast<std::uint32_t>(nodes.size()));
    if (fresh) {
      nodes.push_back(n);
      succ.emplace_back();
    }
    return it->second;
  };
  Node start{static_cast<std::uint32_t>(r.dfa.init())};
  for (ChannelId c = 0; c < C; ++c) {
    if (idx.infix[c].init() < 0) return out;
    start.push_back(static_cast<std::uint32_t>(idx.infix[c].init()));
  }
  intern(start);
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    if (nodes.size() > 100000) return std::nullopt;
    for (Symbol s = 0; s < r.theta.size(); ++s) {
      auto t = r.dfa.next(nodes[i][0], s);
      if (t < 0) continue;
      Node nxt = nodes[i];
      nxt[0] = static_cast<std::uint32_t>(t);
      bool ok = true;
      for (ChannelId c = 0; ok && c < C; ++c) {
        auto e = r.theta[s][c];
        if (e == kEpsilon) continue;
        if (e >= idx.word_index.size() || idx.word_index[e] == UINT32_MAX || idx.letter_channel[e] != c) {
          ok = false;
          break;
        }
        auto st = idx.infix[c].next(nxt[1 + c], e);
        if (st < 0) ok = false;
        else nxt[1 + c] = static_cast<std::uint32_t>(st);
      }
      if (ok) {
        auto id = intern(nxt);
        succ[i].emplace_back(s, id);
      }
    }
  }
  const auto n = nodes.size();
  std::vector<char> co(n, 0);
  std::vector<std::vector<std::uint32_t>> pred(n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (auto [s, j] : succ[i]) pred[j].push_back(i);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t i = 0; i < n; ++i)
    if (r.dfa.is_final(nodes[i][0])) {
      co[i] = 1;
      stack.push_back(i);
    }
  while (!stack.empty()) {
    auto i = stack.back();
    stack.pop_back();
    for (auto j : pred[i])
      if (!co[j]) {
        co[j] = 1;
        stack.push_back(j);
      }
  }
  auto reaches = [&](std::uint32_t from, std::uint32_t to) {
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> st{from};
    seen[from] = 1;
    while (!st.empty()) {
      auto i = st.back();
      st.pop_back();
      if (i == to) return true;
      for (auto [s, j] : succ[i])
        if (co[j] && !seen[j]) {
          seen[j] = 1;
          st.push_back(j);
        }
    }
    return false;
  };
  auto silent = [&](Symbol s) {
    for (auto e : r.theta[s])
      if (e != kEpsilon) return false;
    return true;
  };
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!co[i]) continue;
    for (auto [s, j] : succ[i])
      if (co[j] && !silent(s) && reaches(j, i)) return std::nullopt;
  }
  std::set<std::pair<std::uint32_t, Contents>> seen;
  std::set<Contents> found;
  std::vector<std::pair<std::uint32_t, Contents>> work{{0, Contents(C)}};
  seen.insert(work.back());
  while (!work.empty()) {
    auto [i, w] = std::move(work.back());
    work.pop_back();
    if (r.dfa.is_final(nodes[i][0])) {
      found.insert(w);
      if (found.size() > limit) return std::nullopt;
    }
    for (auto [s, j] : succ[i]) {
      if (!co[j]) continue;
      auto nw = w;
      for (ChannelId c = 0; c < C; ++c)
        if (r.theta[s][c] != kEpsilon) nw[c].push_back(r.theta[s][c]);
      if (seen.emplace(j, nw).second) work.emplace_back(j, std::move(nw));
    }
  }
  out.assign(found.begin(), found.end());
  return out;
}

} // namespace ibfifo
