#include "ibfifo/engine.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "ibfifo/simplex.hpp"

namespace ibfifo {

const char *answer_name(Answer a) {
  switch (a) {
  case Answer::yes: return "yes";
  case Answer::no: return "no";
  case Answer::unknown: return "unknown";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// brute-force FIFO BFS

Trace FifoExploration::trace_to(std::size_t i) const {
  Trace t;
  for (auto j = static_cast<std::int64_t>(i); parent[j] >= 0; j = parent[j]) t.push_back(via[j]);
  std::reverse(t.begin(), t.end());
  return t;
}

namespace {

void put32(std::string &s, std::uint32_t x) { s.append(reinterpret_cast<const char *>(&x), 4); }

std::string fifo_key(const FifoConfig &c, const std::vector<std::uint32_t> &g) {
  std::string k;
  put32(k, c.state);
  for (const auto &w : c.contents) {
    put32(k, static_cast<std::uint32_t>(w.size()));
    for (auto a : w) put32(k, a);
  }
  for (auto x : g) put32(k, x);
  return k;
}

} // namespace

FifoExploration explore_fifo(const FifoMachine &m, std::size_t max_depth, std::size_t channel_bound,
                             const std::vector<Dfa> *send_langs) {
  FifoExploration ex;
  std::unordered_set<std::string> seen;
  auto root = m.initial_config();
  std::vector<std::uint32_t> g0;
  bool complete0 = true;
  if (send_langs)
    for (const auto &d : *send_langs) {
      if (d.init() < 0) return ex;
      g0.push_back(static_cast<std::uint32_t>(d.init()));
      complete0 = complete0 && d.is_final(static_cast<std::uint32_t>(d.init()));
    }
  seen.insert(fifo_key(root, g0));
  ex.configs.push_back(root);
  ex.guard.push_back(g0);
  ex.complete.push_back(complete0);
  ex.parent.push_back(-1);
  ex.via.push_back({});
  ex.depth.push_back(0);
  for (std::size_t i = 0; i < ex.configs.size(); ++i) {
    if (ex.depth[i] >= max_depth) {
      if (!m.outgoing(ex.configs[i].state).empty()) ex.saturated = false;
      continue;
    }
    for (auto t : m.outgoing(ex.configs[i].state)) {
      const auto &tr = m.transitions()[t];
      const auto &cfg = ex.configs[i];
      auto g = ex.guard[i];
      if (tr.action.dir == Dir::send) {
        if (cfg.contents[tr.action.channel].size() >= channel_bound) {
          ex.saturated = false;
          continue;
        }
        if (send_langs) {
          auto s = (*send_langs)[tr.action.channel].next(g[tr.action.channel], tr.action.letter);
          if (s < 0) continue;
          g[tr.action.channel] = static_cast<std::uint32_t>(s);
        }
      } else {
        const auto &w = cfg.contents[tr.action.channel];
        if (w.empty() || w.front() != tr.action.letter) continue;
      }
      auto next = fifo_fire(m, cfg, t);
      auto key = fifo_key(next, g);
      if (!seen.insert(std::move(key)).second) continue;
      bool complete = true;
      if (send_langs)
        for (std::size_t c = 0; c < g.size(); ++c) complete = complete && (*send_langs)[c].is_final(g[c]);
      ex.configs.push_back(std::move(next));
      ex.guard.push_back(std::move(g));
      ex.complete.push_back(complete);
      ex.parent.push_back(static_cast<std::int64_t>(i));
      ex.via.push_back(tr.action);
      ex.depth.push_back(ex.depth[i] + 1);
    }
  }
  return ex;
}

// ---------------------------------------------------------------------------
// counter search

namespace {

// sparse key: product state, then (slot, value) for every nonzero slot
std::string encode(std::uint32_t p, const std::uint32_t *d, std::size_t K, std::size_t stride) {
  std::string k;
  k.reserve(32);
  put32(k, p);
  for (std::size_t j = 0; j < stride; ++j) {
    std::uint32_t x = j < K ? d[j] : (d[j] == kBottom ? 0 : d[j] + 1);
    if (x == 0) continue;
    put32(k, static_cast<std::uint32_t>(j));
    put32(k, x);
  }
  return k;
}

void decode(const std::string &k, std::uint32_t *d, std::size_t K, std::size_t stride) {
  std::fill(d, d + K, 0u);
  std::fill(d + K, d + stride, kBottom);
  for (std::size_t off = 4; off + 8 <= k.size(); off += 8) {
    std::uint32_t j, x;
    std::memcpy(&j, k.data() + off, 4);
    std::memcpy(&x, k.data() + off + 4, 4);
    d[j] = j < K ? x : x - 1;
  }
}

} // namespace

CounterSearch::CounterSearch(const NormalFormBundle &b, const CounterIndexing &idx, const EngineOptions &opt)
    : b_(b), idx_(idx), opt_(opt) {}

SearchResult CounterSearch::run(const SearchGoal &g) {
  auto &P = b_.search_space();
  const std::size_t K = idx_.num_counters, C = idx_.num_channels, stride = K + C;
  std::vector<char> drop = g.drop_counter;
  drop.resize(K, 0);

  std::vector<SearchNode> nodes;
  std::vector<const std::string *> keys;
  std::unordered_map<std::string, std::uint32_t> ids;
  SearchResult res;

  auto trace_to = [&](std::uint32_t i, std::uint32_t stop) {
    Trace t;
    for (auto j = static_cast<std::int64_t>(i); j >= 0 && static_cast<std::uint32_t>(j) != stop;
         j = nodes[j].parent)
      if (nodes[j].parent >= 0) t.push_back(nodes[j].via);
    std::reverse(t.begin(), t.end());
    return t;
  };
  auto finish_at = [&](std::uint32_t i, SearchResult::Status st) {
    res.status = st;
    res.node = i;
    res.explored = nodes.size();
    res.path = trace_to(i, UINT32_MAX);
    std::vector<std::uint32_t> d(stride);
    decode(*keys[i], d.data(), K, stride);
    res.valuation.assign(d.begin(), d.begin() + K);
    res.last.assign(d.begin() + K, d.end());
    res.p = nodes[i].p;
    return res;
  };

  auto expand = [&](std::uint32_t i, std::vector<std::uint32_t> &buf) {
    std::vector<std::uint32_t> d(stride), nd(stride);
    decode(*keys[i], d.data(), K, stride);
    const auto &edges = P.edges_ready(nodes[i].p);
    for (std::uint32_t k = 0; k < edges.size(); ++k) {
      const auto &a = edges[k].action;
      const auto x = idx_.counter_of(a.letter);
      nd = d;
      if (a.dir == Dir::receive) {
        bool ok = nd[x] > 0;
        for (auto z : idx_.zero_of[a.letter]) ok = ok && nd[z] == 0;
        if (!ok) continue;
        --nd[x];
      } else {
        if (!drop[x]) ++nd[x];
        if (g.track_last) nd[K + a.channel] = a.letter;
      }
      buf.push_back(i);
      buf.push_back(k);
      buf.push_back(edges[k].target);
      buf.insert(buf.end(), nd.begin(), nd.end());
    }
  };

  auto dominated = [&](std::uint32_t i) -> std::int64_t {
    std::vector<std::uint32_t> d(stride), a(stride);
    decode(*keys[i], d.data(), K, stride);
    for (auto j = nodes[i].parent; j >= 0; j = nodes[j].parent) {
      if (nodes[j].p != nodes[i].p) continue;
      decode(*keys[j], a.data(), K, stride);
      bool le = true, lt = false;
      for (std::size_t x = 0; x < K && le; ++x) {
        le = a[x] <= d[x];
        lt = lt || a[x] < d[x];
      }
      if (le && (g.cut == 2 || lt)) return j;
    }
    return -1;
  };

  auto add = [&](std::uint32_t p, std::int64_t parent, FifoAction via, const std::uint32_t *d) -> std::int64_t {
    auto key = encode(p, d, K, stride);
    auto [it, fresh] = ids.try_emplace(std::move(key), static_cast<std::uint32_t>(nodes.size()));
    if (!fresh) return -1;
    std::uint32_t depth = parent < 0 ? 0 : nodes[parent].depth + 1;
    nodes.push_back({p, parent, via, depth});
    keys.push_back(&it->first);
    return it->second;
  };

  std::vector<std::uint32_t> d0(stride, 0);
  std::fill(d0.begin() + K, d0.end(), kBottom);
  add(P.init(), -1, {}, d0.data());
  if (g.goal && g.goal(P.init(), d0.data(), d0.data() + K)) return finish_at(0, SearchResult::Status::goal);

  bool truncated = false;
  const unsigned workers = std::max(1u, opt_.workers);
  std::size_t lo = 0, hi = 1;
  std::vector<std::uint32_t> nd(stride);
  while (lo < hi) {
    std::vector<std::uint32_t> frontier;
    for (std::size_t i = lo; i < hi; ++i) {
      if (nodes[i].depth >= opt_.max_depth) {
        truncated = true;
        continue;
      }
      P.ensure(nodes[i].p);
      frontier.push_back(static_cast<std::uint32_t>(i));
    }
    std::vector<std::vector<std::uint32_t>> bufs(workers);
    if (workers == 1 || frontier.size() < 64) {
      for (auto i : frontier) expand(i, bufs[0]);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (frontier.size() + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          const std::size_t a = w * chunk, e = std::min(frontier.size(), a + chunk);
          for (std::size_t j = a; j < e; ++j) expand(frontier[j], bufs[w]);
        });
      for (auto &t : pool) t.join();
    }
    for (const auto &buf : bufs)
      for (std::size_t off = 0; off < buf.size(); off += 3 + stride) {
        const auto parent = buf[off], k = buf[off + 1], p = buf[off + 2];
        const std::uint32_t *d = buf.data() + off + 3;
        const auto via = P.edges_ready(nodes[parent].p)[k].action;
        auto id = add(p, parent, via, d);
        if (id < 0) continue;
        const auto i = static_cast<std::uint32_t>(id);
        if (g.goal && g.goal(p, d, d + K)) return finish_at(i, SearchResult::Status::goal);
        if (g.cut) {
          auto anc = dominated(i);
          if (anc >= 0) {
            finish_at(i, SearchResult::Status::dominated);
            res.ancestor = static_cast<std::uint32_t>(anc);
            res.path = trace_to(static_cast<std::uint32_t>(anc), UINT32_MAX);
            res.loop = trace_to(i, static_cast<std::uint32_t>(anc));
            return res;
          }
        }
        if (nodes.size() > opt_.max_states) {
          res.status = SearchResult::Status::budget;
          res.explored = nodes.size();
          return res;
        }
      }
    lo = hi;
    hi = nodes.size();
  }
  res.explored = nodes.size();
  if (truncated) {
    res.status = SearchResult::Status::budget;
    return res;
  }
  res.status = SearchResult::Status::saturated;
  if (!g.find_cycle) return res;

  // iterative DFS over the explored (finite) graph
  const auto n = static_cast<std::uint32_t>(nodes.size());
  std::vector<char> color(n, 0);
  struct Frame {
    std::uint32_t node;
    std::vector<std::uint32_t> succ;
    std::vector<FifoAction> act;
    std::size_t next = 0;
  };
  auto frame = [&](std::uint32_t i) {
    Frame f{i, {}, {}, 0};
    std::vector<std::uint32_t> buf;
    expand(i, buf);
    for (std::size_t off = 0; off < buf.size(); off += 3 + stride) {
      auto key = encode(buf[off + 2], buf.data() + off + 3, K, stride);
      f.succ.push_back(ids.at(key));
      f.act.push_back(P.edges_ready(nodes[i].p)[buf[off + 1]].action);
    }
    return f;
  };
  for (std::uint32_t root = 0; root < n; ++root) {
    if (color[root]) continue;
    std::vector<Frame> stack;
    stack.push_back(frame(root));
    color[root] = 1;
    while (!stack.empty()) {
      auto &f = stack.back();
      if (f.next == f.succ.size()) {
        color[f.node] = 2;
        stack.pop_back();
        continue;
      }
      const auto s = f.succ[f.next];
      const auto act = f.act[f.next];
      ++f.next;
      if (color[s] == 1) {
        std::size_t at = 0;
        while (stack[at].node != s) ++at;
        res.status = SearchResult::Status::cycle;
        res.node = s;
        res.ancestor = s;
        res.path = trace_to(s, UINT32_MAX);
        res.loop.clear();
        for (std::size_t j = at; j + 1 < stack.size(); ++j) res.loop.push_back(stack[j].act[stack[j].next - 1]);
        res.loop.push_back(act);
        return res;
      }
      if (color[s] == 0) {
        color[s] = 1;
        stack.push_back(frame(s));
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// filters

Coverability coverability_filter(const CounterMachine &c, const std::vector<char> &target_states,
                                 const Valuation &min, std::size_t budget) {
  constexpr std::uint32_t kOmega = UINT32_MAX;
  struct Node {
    StateId s;
    std::vector<std::uint32_t> v;
    std::int64_t parent;
  };
  auto covers = [&](const Node &n) {
    if (!target_states[n.s]) return false;
    for (std::size_t x = 0; x < min.size(); ++x)
      if (n.v[x] != kOmega && n.v[x] < min[x]) return false;
    return true;
  };
  std::vector<Node> nodes{{c.init(), std::vector<std::uint32_t>(c.num_counters(), 0), -1}};
  std::set<std::pair<StateId, std::vector<std::uint32_t>>> seen{{nodes[0].s, nodes[0].v}};
  if (covers(nodes[0])) return Coverability::maybe;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (auto t : c.outgoing(nodes[i].s)) {
      const auto &tr = c.transitions()[t];
      auto v = nodes[i].v;
      bool ok = true;
      for (auto z : tr.action.zero) {
        if (v[z] == kOmega) v[z] = 0;
        else if (v[z] != 0) ok = false;
      }
      if (!ok) continue;
      auto &x = v[tr.action.counter];
      if (tr.action.op == CounterOp::inc) {
        if (x != kOmega) ++x;
      } else if (x != kOmega) {
        if (x == 0) continue;
        --x;
      }
      for (auto j = static_cast<std::int64_t>(i); j >= 0; j = nodes[j].parent) {
        if (nodes[j].s != tr.dst) continue;
        const auto &a = nodes[j].v;
        bool le = true, lt = false;
        for (std::size_t k = 0; k < v.size() && le; ++k) {
          if (v[k] == kOmega) {
            lt = lt || a[k] != kOmega;
            continue;
          }
          le = a[k] != kOmega && a[k] <= v[k];
          lt = lt || a[k] < v[k];
        }
        if (le && lt)
          for (std::size_t k = 0; k < v.size(); ++k)
            if (a[k] != v[k]) v[k] = kOmega;
      }
      if (!seen.emplace(tr.dst, v).second) continue;
      nodes.push_back({tr.dst, std::move(v), static_cast<std::int64_t>(i)});
      if (covers(nodes.back())) return Coverability::maybe;
      if (nodes.size() > budget) return Coverability::maybe;
    }
  }
  return Coverability::unreachable;
}

std::optional<bool> state_equation_feasible(const CounterMachine &c, const std::vector<char> &target_states,
                                            const std::vector<CounterConstraint> &cons,
                                            std::size_t max_cells) {
  LinearSystem sys;
  const auto T = static_cast<std::uint32_t>(c.transitions().size());
  std::vector<std::uint32_t> sink(c.num_states(), UINT32_MAX);
  std::uint32_t nv = T;
  for (StateId s = 0; s < c.num_states(); ++s)
    if (target_states[s]) sink[s] = nv++;
  if (nv == T) return false;
  sys.num_vars = nv;
  // only transitions on some init -> target path can carry flow
  std::vector<char> fwd(c.num_states(), 0), bwd(c.num_states(), 0);
  std::vector<std::vector<std::uint32_t>> in(c.num_states());
  for (std::uint32_t t = 0; t < T; ++t) in[c.transitions()[t].dst].push_back(t);
  std::vector<StateId> stack{c.init()};
  fwd[c.init()] = 1;
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    for (auto t : c.outgoing(s))
      if (!fwd[c.transitions()[t].dst]) fwd[c.transitions()[t].dst] = 1, stack.push_back(c.transitions()[t].dst);
  }
  for (StateId s = 0; s < c.num_states(); ++s)
    if (target_states[s] && fwd[s]) bwd[s] = 1, stack.push_back(s);
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    for (auto t : in[s])
      if (!bwd[c.transitions()[t].src]) bwd[c.transitions()[t].src] = 1, stack.push_back(c.transitions()[t].src);
  }
  if (!bwd[c.init()]) return false;
  std::vector<char> useful(T, 0);
  for (std::uint32_t t = 0; t < T; ++t)
    useful[t] = fwd[c.transitions()[t].src] && bwd[c.transitions()[t].dst];
  std::vector<LinearSystem::Row> flow(c.num_states());
  for (std::uint32_t t = 0; t < T; ++t) {
    const auto &tr = c.transitions()[t];
    if (tr.src == tr.dst || !useful[t]) continue;
    flow[tr.dst].coef.emplace_back(t, 1);
    flow[tr.src].coef.emplace_back(t, -1);
  }
  for (StateId s = 0; s < c.num_states(); ++s) {
    if (sink[s] != UINT32_MAX) flow[s].coef.emplace_back(sink[s], -1);
    flow[s].rhs = s == c.init() ? -1 : 0;
    sys.rows.push_back(std::move(flow[s]));
  }
  LinearSystem::Row one;
  for (StateId s = 0; s < c.num_states(); ++s)
    if (sink[s] != UINT32_MAX) one.coef.emplace_back(sink[s], 1);
  one.rhs = 1;
  sys.rows.push_back(std::move(one));
  for (CounterId x = 0; x < cons.size(); ++x) {
    if (cons[x].kind == CounterConstraint::Kind::free) continue;
    LinearSystem::Row r;
    for (std::uint32_t t = 0; t < T; ++t) {
      const auto &a = c.transitions()[t].action;
      if (a.counter == x && useful[t]) r.coef.emplace_back(t, a.op == CounterOp::inc ? 1 : -1);
    }
    r.rel = cons[x].kind == CounterConstraint::Kind::eq ? LinearSystem::Rel::eq : LinearSystem::Rel::ge;
    r.rhs = cons[x].value;
    sys.rows.push_back(std::move(r));
  }
  return feasible(sys, max_cells);
}

// ---------------------------------------------------------------------------
// decision procedures

namespace {

// lazily materialized counter machine for the filters; empty when too large
struct FilterContext {
  FilterContext(const NormalFormBundle &b, const EngineOptions &opt) : b(b), opt(opt) {}
  const NormalFormBundle &b;
  const EngineOptions &opt;
  bool tried = false;
  std::optional<CounterMachine> cm;

  const CounterMachine *machine() {
    if (!tried) {
      tried = true;
      if (b.product().size() <= opt.materialize_cap) {
        try {
          cm = build_counter_machine(b).machine;
        } catch (const Error &e) {
          if (e.code() != Errc::limit_exceeded) throw;
        }
      }
    }
    return cm ? &*cm : nullptr;
  }
  // materialized states over q that accept
  std::vector<char> targets(StateId q) {
    const auto &mat = b.materialized();
    std::vector<char> t(mat.machine.num_states(), 0);
    for (StateId s = 0; s < t.size(); ++s)
      t[s] = mat.accepting[s] && b.product().base(mat.product_id[s]) == q;
    return t;
  }
};

std::vector<char> write_only_counters(const NormalFormBundle &b, const CounterIndexing &idx) {
  const auto &m = b.original();
  std::vector<char> receives(m.num_channels(), 0);
  for (const auto &t : m.transitions())
    if (t.action.dir == Dir::receive) receives[t.action.channel] = 1;
  std::vector<char> drop(idx.num_counters, 0);
  for (ChannelId c = 0; c < idx.num_channels; ++c)
    if (!receives[c])
      for (auto x : idx.counter[c]) drop[x] = 1;
  return drop;
}

bool same_valuation(const Valuation &v, const std::uint32_t *d) {
  for (std::size_t x = 0; x < v.size(); ++x)
    if (v[x] != d[x]) return false;
  return true;
}

// tries to refute reaching one of `targets` (distinct contents) at q
const char *refute_targets(FilterContext &fx, StateId q, const std::vector<Contents> &targets,
                           const CounterIndexing &idx) {
  const auto *cm = fx.machine();
  if (!cm) return nullptr;
  auto all = fx.targets(q);
  const auto &mat = fx.b.materialized();
  const auto &va = fx.b.vautomaton();
  bool used_lp = false;
  for (const auto &w : targets) {
    // receiving w from the receive position must land on the send position
    auto ts = all;
    for (StateId s = 0; s < ts.size(); ++s) {
      if (!ts[s]) continue;
      const auto &st = fx.b.product().astate(mat.product_id[s]);
      for (ChannelId c = 0; c < w.size() && ts[s]; ++c)
        ts[s] = va.component(c).run_from(st[2 * c + 1], w[c]) == static_cast<std::int32_t>(st[2 * c]);
    }
    auto v = contents_to_valuation(w, idx);
    if (coverability_filter(*cm, ts, v, fx.opt.km_budget) == Coverability::unreachable) continue;
    std::vector<CounterConstraint> cons;
    for (auto x : v) cons.push_back({CounterConstraint::Kind::eq, static_cast<long>(x)});
    auto f = state_equation_feasible(*cm, ts, cons, fx.opt.lp_cells);
    if (f && !*f) {
      used_lp = true;
      continue;
    }
    return nullptr;
  }
  return used_lp ? "state-equation" : "coverability";
}

// short probe, then the refutation filters, then the full budget
SearchResult staged_search(const NormalFormBundle &b, const CounterIndexing &idx, const EngineOptions &opt,
                           const SearchGoal &g, const std::function<const char *()> &refute,
                           const char **refuted_by) {
  *refuted_by = nullptr;
  EngineOptions probe = opt;
  probe.max_states = std::min<std::size_t>(opt.max_states, 20'000);
  auto r = CounterSearch(b, idx, probe).run(g);
  if (r.status != SearchResult::Status::budget) return r;
  if ((*refuted_by = refute())) return r;
  if (opt.max_states > probe.max_states) r = CounterSearch(b, idx, opt).run(g);
  return r;
}

Verdict reach_impl(const NormalFormBundle &b, const CounterIndexing &idx, StateId q,
                   const std::vector<Contents> &targets, const EngineOptions &opt) {
  Verdict out;
  if (targets.empty()) {
    out.answer = Answer::no;
    out.method = "infix";
    out.detail = "no preimage of the contents is an infix of the bounded languages";
    return out;
  }
  auto &P = b.search_space();
  std::vector<Valuation> vals;
  for (const auto &w : targets) vals.push_back(contents_to_valuation(w, idx));
  LastSent last(idx.num_channels);
  SearchGoal g;
  g.goal = [&](std::uint32_t p, const std::uint32_t *v, const LetterId *l) {
    if (P.base(p) != q || !P.accepting(p)) return false;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (!same_valuation(vals[i], v)) continue;
      last.assign(l, l + idx.num_channels);
      if (in_pairs(idx, targets[i], last)) return true;
    }
    return false;
  };
  FilterContext fx{b, opt};
  const char *refuted = nullptr;
  auto r = staged_search(b, idx, opt, g, [&] { return refute_targets(fx, q, targets, idx); }, &refuted);
  if (refuted) {
    out.answer = Answer::no;
    out.method = refuted;
    out.explored = r.explored;
    return out;
  }
  out.explored = r.explored;
  if (r.status == SearchResult::Status::goal) {
    out.answer = Answer::yes;
    out.method = "search";
    out.witness = r.path;
    auto w = valuation_to_contents(r.valuation, r.last, idx);
    if (w) {
      FifoConfig cfg{q, {}};
      for (auto &word : *w) {
        Word orig;
        for (auto e : word) orig.push_back(b.hom().image[e]);
        cfg.contents.push_back(std::move(orig));
      }
      out.reached = cfg;
    }
    return out;
  }
  if (r.status == SearchResult::Status::saturated) {
    out.answer = Answer::no;
    out.method = "bounded-exhaustive";
    return out;
  }
  out.answer = Answer::unknown;
  out.method = "search";
  out.bound = opt.max_states;
  return out;
}

} // namespace

Verdict decide_reachability_distinct(const NormalFormBundle &b, StateId q, const Contents &w,
                                     const EngineOptions &opt) {
  auto idx = make_indexing(b.specs(), b.inverse_machine().num_letters());
  if (w.size() != idx.num_channels) throw Error(Errc::invalid_machine, "target has the wrong number of channels");
  std::vector<Contents> targets;
  bool infix = true;
  for (ChannelId c = 0; c < w.size(); ++c) infix = infix && idx.infix[c].accepts(w[c]);
  if (infix) targets.push_back(w);
  return reach_impl(b, idx, q, targets, opt);
}

Verdict decide_reachability(const NormalFormBundle &b, StateId q, const Contents &w, const EngineOptions &opt) {
  if (q >= b.original().num_states()) throw Error(Errc::undeclared_id, "target state is not declared");
  auto idx = make_indexing(b.specs(), b.inverse_machine().num_letters());
  auto v = reach_impl(b, idx, q, preimages(b, w), opt);
  if (v.answer == Answer::yes) v.reached = FifoConfig{q, w};
  return v;
}

Verdict decide_control_state(const NormalFormBundle &b, StateId q, const EngineOptions &opt) {
  auto idx = make_indexing(b.specs(), b.inverse_machine().num_letters());
  auto &P = b.search_space();
  SearchGoal g;
  g.track_last = false;
  g.drop_counter = write_only_counters(b, idx);
  g.goal = [&](std::uint32_t p, const std::uint32_t *, const LetterId *) {
    return P.base(p) == q && P.accepting(p);
  };
  FilterContext fx{b, opt};
  auto refute = [&]() -> const char * {
    const auto *cm = fx.machine();
    if (cm && coverability_filter(*cm, fx.targets(q), Valuation(idx.num_counters, 0), opt.km_budget) ==
                  Coverability::unreachable)
      return "coverability";
    return nullptr;
  };
  const char *refuted = nullptr;
  auto r = staged_search(b, idx, opt, g, refute, &refuted);
  Verdict out;
  out.explored = r.explored;
  if (refuted) {
    out.answer = Answer::no;
    out.method = refuted;
    return out;
  }
  if (r.status == SearchResult::Status::goal) {
    out.answer = Answer::yes;
    out.method = "search";
    out.witness = r.path;
    // contents were not tracked, replay the lifted run instead
    for (auto &cfg : run_trace_all(b.original(), b.original().initial_config(), b.lift(r.path)))
      if (cfg.state == q) {
        out.reached = cfg;
        break;
      }
    return out;
  }
  if (r.status == SearchResult::Status::saturated) {
    out.answer = Answer::no;
    out.method = "bounded-exhaustive";
    return out;
  }
  out.answer = Answer::unknown;
  out.method = "search";
  out.bound = opt.max_states;
  return out;
}

Verdict decide_rational_reachability(const NormalFormBundle &b, StateId q, const Relation &r0,
                                     const EngineOptions &opt) {
  if (r0.universal) return decide_control_state(b, q, opt);
  auto idx = make_indexing(b.specs(), b.inverse_machine().num_letters());
  auto r = inverse_substitute(r0, b.hom());
  auto &P = b.search_space();
  const std::size_t K = idx.num_counters, stride = K + idx.num_channels;
  std::unordered_map<std::string, bool> cache;
  SearchGoal g;
  g.goal = [&](std::uint32_t p, const std::uint32_t *v, const LetterId *l) {
    if (P.base(p) != q || !P.accepting(p)) return false;
    std::vector<std::uint32_t> d(v, v + K);
    d.insert(d.end(), l, l + idx.num_channels);
    auto key = encode(0, d.data(), K, stride);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    bool ok = membership_in_Ta(Valuation(v, v + K), LastSent(l, l + idx.num_channels), r, idx);
    cache.emplace(std::move(key), ok);
    return ok;
  };
  FilterContext fx{b, opt};
  auto refute = [&]() -> const char * {
    const auto *cm = fx.machine();
    if (!cm) return nullptr;
    if (coverability_filter(*cm, fx.targets(q), Valuation(K, 0), opt.km_budget) == Coverability::unreachable)
      return "coverability";
    if (auto fin = finite_infix_contents(r, idx)) return refute_targets(fx, q, *fin, idx);
    return nullptr;
  };
  const char *refuted = nullptr;
  auto res = staged_search(b, idx, opt, g, refute, &refuted);
  Verdict out;
  out.explored = res.explored;
  if (refuted) {
    out.answer = Answer::no;
    out.method = refuted;
    return out;
  }
  if (res.status == SearchResult::Status::goal) {
    out.answer = Answer::yes;
    out.method = "search";
    out.witness = res.path;
    if (auto w = valuation_to_contents(res.valuation, res.last, idx)) {
      FifoConfig cfg{q, {}};
      for (auto &word : *w) {
        Word orig;
        for (auto e : word) orig.push_back(b.hom().image[e]);
        cfg.contents.push_back(std::move(orig));
      }
      out.reached = cfg;
    }
    return out;
  }
  if (res.status == SearchResult::Status::saturated) {
    out.answer = Answer::no;
    out.method = "bounded-exhaustive";
    return out;
  }
  out.answer = Answer::unknown;
  out.method = "search";
  out.bound = opt.max_states;
  return out;
}

Verdict decide_deadlock(const NormalFormBundle &b, const EngineOptions &opt) {
  const auto &m = b.original();
  auto idx = make_indexing(b.specs(), b.inverse_machine().num_letters());
  auto drop = write_only_counters(b, idx);
  const auto C = idx.num_channels;
  std::vector<char> has_send(m.num_states(), 0);
  // receivable[q][letter]
  std::vector<std::vector<char>> receivable(m.num_states(), std::vector<char>(m.num_letters(), 0));
  for (const auto &t : m.transitions()) {
    if (t.action.dir == Dir::send) has_send[t.src] = 1;
    else receivable[t.src][t.action.letter] = 1;
  }
  std::vector<char> tracked(C, 0);
  for (ChannelId c = 0; c < C; ++c)
    for (auto x : idx.counter[c]) tracked[c] |= !drop[x];
  auto &P = b.search_space();
  SearchGoal g;
  g.drop_counter = drop;
  g.goal = [&](std::uint32_t p, const std::uint32_t *v, const LetterId *l) {
    const auto q = P.base(p);
    if (has_send[q] || !P.accepting(p)) return false;
    for (ChannelId c = 0; c < C; ++c) {
      if (!tracked[c]) continue;
      auto w = valuation_to_word(idx, c, v, l[c]);
      if (!w) return false;
      if (!w->empty() && receivable[q][b.hom().image[w->front()]]) return false;
    }
    return true;
  };
  FilterContext fx{b, opt};
  // every candidate state and head-letter case must be refuted by the state equation
  auto refute = [&]() -> const char * {
    const auto *cm = fx.machine();
    bool ok = cm != nullptr;
    for (StateId q = 0; ok && q < m.num_states(); ++q) {
      if (has_send[q]) continue;
      auto ts = fx.targets(q);
      if (std::none_of(ts.begin(), ts.end(), [](char x) { return x; })) continue;
      // per channel: -1 = empty, i = head letter in word i
      std::vector<std::vector<int>> cases(C);
      for (ChannelId c = 0; c < C; ++c) {
        if (!tracked[c]) {
          cases[c] = {-2};
          continue;
        }
        cases[c].push_back(-1);
        for (std::size_t i = 0; i < idx.tuple[c].size(); ++i)
          for (auto e : idx.tuple[c][i])
            if (!receivable[q][b.hom().image[e]]) {
              cases[c].push_back(static_cast<int>(i));
              break;
            }
      }
      std::vector<std::size_t> pick(C, 0);
      for (;;) {
        std::vector<CounterConstraint> cons(idx.num_counters);
        for (ChannelId c = 0; c < C; ++c) {
          int k = cases[c][pick[c]];
          if (k == -2) continue;
          for (std::size_t i = 0; i < idx.counter[c].size(); ++i) {
            auto x = idx.counter[c][i];
            if (k == -1 || static_cast<int>(i) < k) cons[x] = {CounterConstraint::Kind::eq, 0};
            else if (static_cast<int>(i) == k) cons[x] = {CounterConstraint::Kind::ge, 1};
          }
        }
        auto f = state_equation_feasible(*cm, ts, cons, opt.lp_cells);
        if (!f || *f) {
          ok = false;
          break;
        }
        std::size_t c = 0;
        while (c < C && ++pick[c] == cases[c].size()) pick[c++] = 0;
        if (c == C) break;
      }
    }
    return ok ? "state-equation" : nullptr;
  };
  const char *refuted = nullptr;
  auto r = staged_search(b, idx, opt, g, refute, &refuted);
  Verdict out;
  out.explored = r.explored;
  if (refuted) {
    out.answer = Answer::no;
    out.method = refuted;
    return out;
  }
  if (r.status == SearchResult::Status::goal) {
    out.answer = Answer::yes;
    out.method = "search";
    out.witness = r.path;
    out.detail = "deadlock at " + m.state_name(P.base(r.p));
    return out;
  }
  if (r.status == SearchResult::Status::saturated) {
    out.answer = Answer::no;
    out.method = "bounded-exhaustive";
    return out;
  }
  out.answer = Answer::unknown;
  out.method = "search";
  out.bound = opt.max_states;
  return out;
}

Verdict decide_boundedness(const NormalFormBundle &b, const EngineOptions &opt) {
  auto idx = make_indexing(b.specs(), b.inverse_machine().num_letters());
  SearchGoal g;
  g.track_last = false;
  g.cut = 1;
  CounterSearch search(b, idx, opt);
  auto r = search.run(g);
  Verdict out;
  out.explored = r.explored;
  switch (r.status) {
  case SearchResult::Status::dominated:
    out.answer = Answer::no;
    out.method = "self-covering";
    out.witness = r.path;
    out.pump = r.loop;
    break;
  case SearchResult::Status::saturated:
    out.answer = Answer::yes;
    out.method = "bounded-exhaustive";
    break;
  default:
    out.answer = Answer::unknown;
    out.method = "search";
    out.bound = opt.max_states;
  }
  return out;
}

Verdict decide_termination(const NormalFormBundle &b, const EngineOptions &opt) {
  auto idx = make_indexing(b.specs(), b.inverse_machine().num_letters());
  SearchGoal g;
  g.track_last = false;
  g.cut = 2;
  g.find_cycle = true;
  CounterSearch search(b, idx, opt);
  auto r = search.run(g);
  Verdict out;
  out.explored = r.explored;
  switch (r.status) {
  case SearchResult::Status::dominated:
  case SearchResult::Status::cycle:
    out.answer = Answer::no;
    out.method = r.status == SearchResult::Status::cycle ? "cycle" : "self-covering";
    out.witness = r.path;
    out.pump = r.loop;
    break;
  case SearchResult::Status::saturated:
    out.answer = Answer::yes;
    out.method = "bounded-exhaustive";
    break;
  default:
    out.answer = Answer::unknown;
    out.method = "search";
    out.bound = opt.max_states;
  }
  return out;
}

CounterExploration explore_counter(const CounterMachine &c,
                                   const std::function<bool(const CounterConfig &)> &goal,
                                   std::size_t max_states) {
  CounterExploration ex;
  std::vector<CounterConfig> nodes{c.initial_config()};
  std::vector<std::int64_t> parent{-1};
  std::vector<std::uint32_t> via{0};
  std::map<std::pair<StateId, Valuation>, std::uint32_t> seen{{{nodes[0].state, nodes[0].valuation}, 0}};
  auto witness = [&](std::size_t i) {
    CounterTrace t;
    for (auto j = static_cast<std::int64_t>(i); parent[j] >= 0; j = parent[j])
      t.push_back(c.transitions()[via[j]].action);
    std::reverse(t.begin(), t.end());
    return t;
  };
  if (goal(nodes[0])) {
    ex.found = true;
    ex.explored = 1;
    return ex;
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (auto t : c.outgoing(nodes[i].state)) {
      const auto &a = c.transitions()[t].action;
      if (!zero_tests_hold(a, nodes[i].valuation)) continue;
      if (a.op == CounterOp::dec && nodes[i].valuation[a.counter] == 0) continue;
      auto next = counter_fire(c, nodes[i], t);
      if (!seen.emplace(std::make_pair(next.state, next.valuation), nodes.size()).second) continue;
      nodes.push_back(std::move(next));
      parent.push_back(static_cast<std::int64_t>(i));
      via.push_back(t);
      if (goal(nodes.back())) {
        ex.found = true;
        ex.explored = nodes.size();
        ex.witness = witness(nodes.size() - 1);
        return ex;
      }
      if (nodes.size() > max_states) {
        ex.explored = nodes.size();
        return ex;
      }
    }
  }
  ex.saturated = true;
  ex.explored = nodes.size();
  return ex;
}

} // namespace ibfifo
