#include "ibfifo/automaton.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

namespace ibfifo {

std::uint32_t Nfa::add_state(bool final) {
  out_.emplace_back();
  final_.push_back(final);
  return size() - 1;
}

void Nfa::add_edge(std::uint32_t from, Symbol s, std::uint32_t to) {
  out_[from].emplace_back(s, to);
}

std::uint32_t Dfa::add_state(bool final) {
  final_.push_back(final);
  delta_.resize(delta_.size() + num_symbols_, -1);
  return size() - 1;
}

std::int32_t Dfa::run(const std::vector<Symbol> &w) const { return run_from(init_, w); }

std::int32_t Dfa::run_from(std::int32_t s, const std::vector<Symbol> &w) const {
  for (auto a : w) {
    if (s < 0) return -1;
    if (a >= num_symbols_) return -1;
    s = next(static_cast<std::uint32_t>(s), a);
  }
  return s;
}

bool Dfa::accepts(const std::vector<Symbol> &w) const {
  auto s = run(w);
  return s >= 0 && is_final(static_cast<std::uint32_t>(s));
}

namespace {

void eps_close(const Nfa &n, std::vector<std::uint32_t> &set) {
  std::vector<char> seen(n.size(), 0);
  std::vector<std::uint32_t> stack;
  for (auto s : set)
    if (!seen[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  set.clear();
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    set.push_back(s);
    for (const auto &[sym, t] : n.edges(s))
      if (sym == kEpsilon && !seen[t]) {
        seen[t] = 1;
        stack.push_back(t);
      }
  }
  std::sort(set.begin(), set.end());
}

} // namespace

Dfa determinize(const Nfa &n) {
  Dfa d(n.num_symbols());
  if (n.initial().empty()) return d;
  std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
  std::vector<std::vector<std::uint32_t>> sets;
  auto intern = [&](std::vector<std::uint32_t> s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    bool fin = false;
    for (auto q : s) fin |= n.is_final(q);
    auto id = d.add_state(fin);
    ids.emplace(s, id);
    sets.push_back(std::move(s));
    return id;
  };
  std::vector<std::uint32_t> start = n.initial();
  eps_close(n, start);
  d.set_init(static_cast<std::int32_t>(intern(start)));
  for (std::uint32_t i = 0; i < sets.size(); ++i) {
    std::map<Symbol, std::vector<std::uint32_t>> succ;
    for (auto q : sets[i])
      for (const auto &[sym, t] : n.edges(q))
        if (sym != kEpsilon) succ[sym].push_back(t);
    for (auto &[sym, tgt] : succ) {
      eps_close(n, tgt);
      auto id = intern(tgt);
      d.set(i, sym, id);
    }
  }
  return d;
}

Nfa to_nfa(const Dfa &d) {
  Nfa n(d.num_symbols());
  for (std::uint32_t s = 0; s < d.size(); ++s) n.add_state(d.is_final(s));
  for (std::uint32_t s = 0; s < d.size(); ++s)
    for (Symbol a = 0; a < d.num_symbols(); ++a) {
      auto t = d.next(s, a);
      if (t >= 0) n.add_edge(s, a, static_cast<std::uint32_t>(t));
    }
  if (d.init() >= 0) n.add_initial(static_cast<std::uint32_t>(d.init()));
  return n;
}

std::vector<char> accessible(const Dfa &d) {
  std::vector<char> acc(d.size(), 0);
  if (d.init() < 0) return acc;
  std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(d.init())};
  acc[d.init()] = 1;
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    for (Symbol a = 0; a < d.num_symbols(); ++a) {
      auto t = d.next(s, a);
      if (t >= 0 && !acc[t]) {
        acc[t] = 1;
        stack.push_back(static_cast<std::uint32_t>(t));
      }
    }
  }
  return acc;
}

std::vector<char> coaccessible(const Dfa &d) {
  std::vector<std::vector<std::uint32_t>> rev(d.size());
  for (std::uint32_t s = 0; s < d.size(); ++s)
    for (Symbol a = 0; a < d.num_symbols(); ++a) {
      auto t = d.next(s, a);
      if (t >= 0) rev[t].push_back(s);
    }
  std::vector<char> co(d.size(), 0);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t s = 0; s < d.size(); ++s)
    if (d.is_final(s)) {
      co[s] = 1;
      stack.push_back(s);
    }
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    for (auto p : rev[s])
      if (!co[p]) {
        co[p] = 1;
        stack.push_back(p);
      }
  }
  return co;
}

Dfa trim(const Dfa &d) {
  auto acc = accessible(d);
  auto co = coaccessible(d);
  Dfa r(d.num_symbols());
  if (d.init() < 0 || !co[d.init()]) return r;
  // BFS numbering from init keeps the result canonical
  std::vector<std::int32_t> map(d.size(), -1);
  std::deque<std::uint32_t> q{static_cast<std::uint32_t>(d.init())};
  map[d.init()] = static_cast<std::int32_t>(r.add_state(d.is_final(d.init())));
  while (!q.empty()) {
    auto s = q.front();
    q.pop_front();
    for (Symbol a = 0; a < d.num_symbols(); ++a) {
      auto t = d.next(s, a);
      if (t < 0 || !acc[t] || !co[t]) continue;
      if (map[t] < 0) {
        map[t] = static_cast<std::int32_t>(r.add_state(d.is_final(t)));
        q.push_back(static_cast<std::uint32_t>(t));
      }
      r.set(map[s], a, map[t]);
    }
  }
  r.set_init(0);
  return r;
}

Dfa minimize(const Dfa &d0) {
  Dfa d = trim(d0);
  if (d.init() < 0) return d;
  const auto n = d.size();
  const auto k = d.num_symbols();
  std::vector<std::uint32_t> cls(n);
  for (std::uint32_t s = 0; s < n; ++s) cls[s] = d.is_final(s) ? 1 : 0;
  std::uint32_t ncls = 0;
  for (;;) {
    std::map<std::vector<std::int64_t>, std::uint32_t> sig_ids;
    std::vector<std::uint32_t> next_cls(n);
    for (std::uint32_t s = 0; s < n; ++s) {
      std::vector<std::int64_t> sig;
      sig.reserve(k + 1);
      sig.push_back(cls[s]);
      for (Symbol a = 0; a < k; ++a) {
        auto t = d.next(s, a);
        sig.push_back(t < 0 ? -1 : static_cast<std::int64_t>(cls[t]));
      }
      auto it = sig_ids.try_emplace(std::move(sig), static_cast<std::uint32_t>(sig_ids.size()));
      next_cls[s] = it.first->second;
    }
    auto nn = static_cast<std::uint32_t>(sig_ids.size());
    cls.swap(next_cls);
    if (nn == ncls) break;
    ncls = nn;
  }
  Dfa q(k);
  std::vector<std::int32_t> rep(ncls, -1);
  for (std::uint32_t s = 0; s < n; ++s)
    if (rep[cls[s]] < 0) rep[cls[s]] = static_cast<std::int32_t>(s);
  for (std::uint32_t c = 0; c < ncls; ++c) q.add_state(d.is_final(rep[c]));
  for (std::uint32_t c = 0; c < ncls; ++c)
    for (Symbol a = 0; a < k; ++a) {
      auto t = d.next(rep[c], a);
      if (t >= 0) q.set(c, a, cls[t]);
    }
  q.set_init(static_cast<std::int32_t>(cls[d.init()]));
  return trim(q);
}

Dfa complete(const Dfa &d) {
  Dfa r = d;
  std::int32_t sink = -1;
  auto need_sink = [&] {
    if (sink < 0) {
      sink = static_cast<std::int32_t>(r.add_state(false));
      for (Symbol a = 0; a < r.num_symbols(); ++a) r.set(sink, a, sink);
    }
    return static_cast<std::uint32_t>(sink);
  };
  if (r.init() < 0) r.set_init(static_cast<std::int32_t>(need_sink()));
  auto n = r.size();
  for (std::uint32_t s = 0; s < n; ++s)
    for (Symbol a = 0; a < r.num_symbols(); ++a)
      if (r.next(s, a) < 0) r.set(s, a, need_sink());
  return r;
}

Dfa complement(const Dfa &d) {
  Dfa r = complete(d);
  for (std::uint32_t s = 0; s < r.size(); ++s) r.set_final(s, !r.is_final(s));
  return r;
}

Dfa intersect(const Dfa &a, const Dfa &b) {
  Dfa r(a.num_symbols());
  if (a.init() < 0 || b.init() < 0) return r;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> ids;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> todo;
  auto intern = [&](std::uint32_t x, std::uint32_t y) {
    auto [it, fresh] = ids.try_emplace({x, y}, r.size());
    if (fresh) {
      r.add_state(a.is_final(x) && b.is_final(y));
      todo.emplace_back(x, y);
    }
    return it->second;
  };
  r.set_init(static_cast<std::int32_t>(
      intern(static_cast<std::uint32_t>(a.init()), static_cast<std::uint32_t>(b.init()))));
  for (std::size_t i = 0; i < todo.size(); ++i) {
    auto [x, y] = todo[i];
    for (Symbol s = 0; s < a.num_symbols() && s < b.num_symbols(); ++s) {
      auto tx = a.next(x, s), ty = b.next(y, s);
      if (tx < 0 || ty < 0) continue;
      auto id = intern(static_cast<std::uint32_t>(tx), static_cast<std::uint32_t>(ty));
      r.set(static_cast<std::uint32_t>(i), s, id);
    }
  }
  return r;
}

std::optional<std::vector<Symbol>> shortest_accepted(const Dfa &d) {
  if (d.init() < 0) return std::nullopt;
  std::vector<std::int32_t> parent(d.size(), -2);
  std::vector<Symbol> via(d.size(), 0);
  std::deque<std::uint32_t> q{static_cast<std::uint32_t>(d.init())};
  parent[d.init()] = -1;
  while (!q.empty()) {
    auto s = q.front();
    q.pop_front();
    if (d.is_final(s)) {
      std::vector<Symbol> w;
      for (std::int32_t c = static_cast<std::int32_t>(s); parent[c] >= 0; c = parent[c])
        w.push_back(via[c]);
      std::reverse(w.begin(), w.end());
      return w;
    }
    for (Symbol a = 0; a < d.num_symbols(); ++a) {
      auto t = d.next(s, a);
      if (t >= 0 && parent[t] == -2) {
        parent[t] = static_cast<std::int32_t>(s);
        via[t] = a;
        q.push_back(static_cast<std::uint32_t>(t));
      }
    }
  }
  return std::nullopt;
}

bool is_empty(const Dfa &d) { return !shortest_accepted(d).has_value(); }

bool included(const Dfa &sub, const Dfa &sup) { return is_empty(intersect(sub, complement(sup))); }

bool equivalent(const Dfa &a, const Dfa &b) { return included(a, b) && included(b, a); }

Dfa prefix_closure(const Dfa &d) {
  Dfa r = trim(d);
  for (std::uint32_t s = 0; s < r.size(); ++s) r.set_final(s);
  return r;
}

Dfa infix_closure(const Dfa &d) {
  Dfa t = trim(d);
  if (t.init() < 0) return t;
  Nfa n = to_nfa(t);
  for (std::uint32_t s = 0; s < n.size(); ++s) {
    n.set_final(s);
    if (s != static_cast<std::uint32_t>(t.init())) n.add_initial(s);
  }
  return minimize(determinize(n));
}

namespace {

std::uint32_t copy_into(Nfa &dst, const Nfa &src) {
  auto off = dst.size();
  for (std::uint32_t s = 0; s < src.size(); ++s) dst.add_state(src.is_final(s));
  for (std::uint32_t s = 0; s < src.size(); ++s)
    for (const auto &[sym, t] : src.edges(s)) dst.add_edge(s + off, sym, t + off);
  return off;
}

} // namespace

Nfa nfa_concat(const Nfa &a, const Nfa &b) {
  Nfa r(std::max(a.num_symbols(), b.num_symbols()));
  auto oa = copy_into(r, a);
  auto ob = copy_into(r, b);
  for (auto s : a.initial()) r.add_initial(s + oa);
  for (std::uint32_t s = 0; s < a.size(); ++s)
    if (a.is_final(s)) {
      r.set_final(s + oa, false);
      for (auto i : b.initial()) r.add_edge(s + oa, kEpsilon, i + ob);
    }
  return r;
}

Nfa nfa_union(const Nfa &a, const Nfa &b) {
  Nfa r(std::max(a.num_symbols(), b.num_symbols()));
  auto oa = copy_into(r, a);
  auto ob = copy_into(r, b);
  for (auto s : a.initial()) r.add_initial(s + oa);
  for (auto s : b.initial()) r.add_initial(s + ob);
  return r;
}

Nfa nfa_star(const Nfa &a) {
  Nfa r(a.num_symbols());
  auto hub = r.add_state(true);
  auto off = copy_into(r, a);
  r.add_initial(hub);
  for (auto s : a.initial()) r.add_edge(hub, kEpsilon, s + off);
  for (std::uint32_t s = 0; s < a.size(); ++s)
    if (a.is_final(s)) r.add_edge(s + off, kEpsilon, hub);
  return r;
}

Nfa nfa_word(std::uint32_t num_symbols, const std::vector<Symbol> &w) {
  Nfa r(num_symbols);
  auto cur = r.add_state(w.empty());
  r.add_initial(cur);
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto nx = r.add_state(i + 1 == w.size());
    r.add_edge(cur, w[i], nx);
    cur = nx;
  }
  return r;
}

Dfa dfa_concat(const Dfa &a, const Dfa &b) {
  return minimize(determinize(nfa_concat(to_nfa(a), to_nfa(b))));
}

Dfa tuple_pattern(std::uint32_t num_symbols, const std::vector<std::vector<Symbol>> &words) {
  Nfa n(num_symbols);
  auto hub = n.add_state(true);
  n.add_initial(hub);
  for (const auto &w : words) {
    auto h = n.add_state(true);
    n.add_edge(hub, kEpsilon, h);
    auto cur = h;
    for (std::size_t i = 0; i < w.size(); ++i) {
      auto nx = (i + 1 == w.size()) ? h : n.add_state(false);
      n.add_edge(cur, w[i], nx);
      cur = nx;
    }
    hub = h;
  }
  return minimize(determinize(n));
}

Dfa inverse_image(const Dfa &d, std::uint32_t new_num_symbols,
                  const std::function<std::optional<Symbol>(Symbol)> &h) {
  Dfa r(new_num_symbols);
  for (std::uint32_t s = 0; s < d.size(); ++s) r.add_state(d.is_final(s));
  for (Symbol e = 0; e < new_num_symbols; ++e) {
    auto img = h(e);
    if (!img || *img >= d.num_symbols()) continue;
    for (std::uint32_t s = 0; s < d.size(); ++s) {
      auto t = d.next(s, *img);
      if (t >= 0) r.set(s, e, static_cast<std::uint32_t>(t));
    }
  }
  r.set_init(d.init());
  return r;
}

Dfa relabel(const Dfa &d, std::uint32_t new_num_symbols, const std::vector<Symbol> &map) {
  Dfa r(new_num_symbols);
  for (std::uint32_t s = 0; s < d.size(); ++s) r.add_state(d.is_final(s));
  for (std::uint32_t s = 0; s < d.size(); ++s)
    for (Symbol a = 0; a < d.num_symbols(); ++a) {
      auto t = d.next(s, a);
      if (t >= 0 && map[a] != kEpsilon) r.set(s, map[a], static_cast<std::uint32_t>(t));
    }
  r.set_init(d.init());
  return r;
}

std::vector<Symbol> used_symbols(const Dfa &d0) {
  Dfa d = trim(d0);
  std::vector<Symbol> out;
  for (Symbol a = 0; a < d.num_symbols(); ++a)
    for (std::uint32_t s = 0; s < d.size(); ++s)
      if (d.next(s, a) >= 0) {
        out.push_back(a);
        break;
      }
  return out;
}

std::vector<std::vector<Symbol>> enumerate_words(const Dfa &d, std::size_t max_len) {
  std::vector<std::vector<Symbol>> out;
  if (d.init() < 0) return out;
  std::vector<Symbol> cur;
  std::function<void(std::uint32_t)> go = [&](std::uint32_t s) {
    if (d.is_final(s)) out.push_back(cur);
    if (cur.size() == max_len) return;
    for (Symbol a = 0; a < d.num_symbols(); ++a) {
      auto t = d.next(s, a);
      if (t < 0) continue;
      cur.push_back(a);
      go(static_cast<std::uint32_t>(t));
      cur.pop_back();
    }
  };
  go(static_cast<std::uint32_t>(d.init()));
  return out;
}

} // namespace ibfifo
