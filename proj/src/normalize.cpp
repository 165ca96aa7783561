#include "ibfifo/normalize.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace ibfifo {

FifoMachine inverse_hom_machine(const FifoMachine &m, const LetterHom &h,
                                std::vector<std::uint32_t> *origin) {
  FifoMachineBuilder b(m.name());
  for (ChannelId c = 0; c < m.num_channels(); ++c) b.add_channel(m.channel_name(c));
  std::vector<std::vector<LetterId>> pre(m.num_letters());
  for (LetterId e = 0; e < h.names.size(); ++e) {
    b.add_letter(h.channel[e], h.names[e]);
    pre[h.image[e]].push_back(e);
  }
  for (StateId s = 0; s < m.num_states(); ++s) b.add_state(m.state_name(s));
  b.set_init(m.init());
  if (origin) origin->clear();
  for (std::uint32_t t = 0; t < m.transitions().size(); ++t) {
    const auto &tr = m.transitions()[t];
    for (auto e : pre[tr.action.letter]) {
      b.add_transition(tr.src, {tr.action.dir, tr.action.channel, e}, tr.dst);
      if (origin) origin->push_back(t);
    }
  }
  return b.build();
}

SendPruning make_send_pruning(const ValidAutomaton &va, const LetterHom &h, std::vector<std::uint32_t> origin,
                              std::size_t max_states) {
  SendPruning out;
  out.origin = std::move(origin);
  std::uint32_t num_orig = 0;
  for (auto o : h.image) num_orig = std::max(num_orig, o + 1);
  for (ChannelId c = 0; c < va.num_channels(); ++c) {
    const Dfa &d = va.component(c);
    const auto n = d.size();
    out.size.push_back(n);
    if (n > max_states) {
      // identity only
      std::vector<char> sim(static_cast<std::size_t>(n) * n, 0);
      for (std::uint32_t s = 0; s < n; ++s) sim[s * n + s] = 1;
      out.simulates.push_back(std::move(sim));
      continue;
    }
    // succ[s][o]: send DFA states reachable from s by some copy of original letter o
    std::vector<std::vector<std::vector<std::uint32_t>>> succ(n, std::vector<std::vector<std::uint32_t>>(num_orig));
    for (std::uint32_t s = 0; s < n; ++s)
      for (LetterId e = 0; e < h.image.size(); ++e) {
        if (h.channel[e] != c || e >= d.num_symbols()) continue;
        auto t = d.next(s, e);
        if (t >= 0) succ[s][h.image[e]].push_back(static_cast<std::uint32_t>(t));
      }
    std::vector<char> sim(static_cast<std::size_t>(n) * n, 0);
    for (std::uint32_t s1 = 0; s1 < n; ++s1)
      for (std::uint32_t s2 = 0; s2 < n; ++s2) sim[s1 * n + s2] = !d.is_final(s2) || d.is_final(s1);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::uint32_t s1 = 0; s1 < n; ++s1)
        for (std::uint32_t s2 = 0; s2 < n; ++s2) {
          if (!sim[s1 * n + s2]) continue;
          bool ok = true;
          for (std::uint32_t o = 0; o < num_orig && ok; ++o)
            for (auto t2 : succ[s2][o]) {
              bool matched = false;
              for (auto t1 : succ[s1][o]) matched = matched || sim[t1 * n + t2];
              if (!matched) {
                ok = false;
                break;
              }
            }
          if (!ok) {
            sim[s1 * n + s2] = 0;
            changed = true;
          }
        }
    }
    out.simulates.push_back(std::move(sim));
  }
  return out;
}

ProductSpace::ProductSpace(std::shared_ptr<const FifoMachine> inv,
                           std::shared_ptr<const ValidAutomaton> va, bool ob,
                           std::shared_ptr<const SendPruning> pruning)
    : inv_(std::move(inv)), va_(std::move(va)), ob_(ob), pruning_(std::move(pruning)) {
  intern(inv_->init(), va_->initial());
}

std::uint32_t ProductSpace::intern(StateId q, const std::vector<std::uint32_t> &a) {
  std::string key(reinterpret_cast<const char *>(&q), sizeof q);
  key.append(reinterpret_cast<const char *>(a.data()), a.size() * sizeof(std::uint32_t));
  auto [it, fresh] = ids_.try_emplace(std::move(key), static_cast<std::uint32_t>(base_.size()));
  if (fresh) {
    base_.push_back(q);
    astate_.push_back(a);
    accepting_.push_back(va_->send_final(a) && (!ob_ || va_->recv_final(a)));
    expanded_.push_back(0);
    edges_.emplace_back();
  }
  return it->second;
}

const std::vector<ProductEdge> &ProductSpace::edges(std::uint32_t p) {
  if (!expanded_[p]) {
    std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> cand;
    for (auto t : inv_->outgoing(base_[p])) {
      const auto &tr = inv_->transitions()[t];
      auto a = astate_[p];
      if (!va_->step(a, tr.action)) continue;
      cand.emplace_back(t, std::move(a));
    }
    std::vector<char> drop(cand.size(), 0);
    if (pruning_) {
      const auto &pr = *pruning_;
      for (std::size_t i = 0; i < cand.size(); ++i) {
        const auto &ti = inv_->transitions()[cand[i].first];
        if (ti.action.dir != Dir::send) continue;
        const auto c = ti.action.channel;
        const auto n = pr.size[c];
        const auto si = cand[i].second[2 * c];
        for (std::size_t j = 0; j < cand.size() && !drop[i]; ++j) {
          if (j == i || drop[j] || pr.origin[cand[j].first] != pr.origin[cand[i].first]) continue;
          const auto sj = cand[j].second[2 * c];
          if (pr.simulates[c][sj * n + si] && (!pr.simulates[c][si * n + sj] || j < i)) drop[i] = 1;
        }
      }
    }
    std::vector<ProductEdge> out;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (drop[i]) continue;
      const auto &tr = inv_->transitions()[cand[i].first];
      auto target = intern(tr.dst, cand[i].second);
      out.push_back({target, cand[i].first, tr.action});
    }
    edges_[p] = std::move(out);
    expanded_[p] = 1;
  }
  return edges_[p];
}

void ProductSpace::expand_all(std::size_t cap) {
  for (std::uint32_t p = 0; p < base_.size(); ++p) {
    edges(p);
    if (base_.size() > cap)
      throw Error(Errc::limit_exceeded,
                  "normal form exceeds " + std::to_string(cap) + " product states");
  }
}

std::string ProductSpace::name(std::uint32_t p) const {
  std::string s = inv_->state_name(base_[p]);
  const auto &a = astate_[p];
  for (std::size_t c = 0; c + 1 < a.size(); c += 2)
    s += "|" + std::to_string(a[c]) + "," + std::to_string(a[c + 1]);
  return s;
}

const MaterializedBundle &NormalFormBundle::materialized() const {
  if (mat_) return *mat_;
  auto &P = *product_;
  P.expand_all(cap_);
  const auto n = static_cast<std::uint32_t>(P.size());
  std::vector<std::vector<std::uint32_t>> rev(n);
  for (std::uint32_t p = 0; p < n; ++p)
    for (const auto &e : P.edges(p)) rev[e.target].push_back(p);
  std::vector<char> keep(n, 0);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t p = 0; p < n; ++p)
    if (P.accepting(p)) {
      keep[p] = 1;
      stack.push_back(p);
    }
  while (!stack.empty()) {
    auto p = stack.back();
    stack.pop_back();
    for (auto r : rev[p])
      if (!keep[r]) {
        keep[r] = 1;
        stack.push_back(r);
      }
  }
  keep[P.init()] = 1;
  auto out = std::make_shared<MaterializedBundle>();
  auto b = FifoMachineBuilder::with_alphabet_of(*inverse_, inverse_->name());
  std::vector<std::int64_t> sid(n, -1);
  for (std::uint32_t p = 0; p < n; ++p)
    if (keep[p]) {
      sid[p] = b.add_state(P.name(p));
      out->product_id.push_back(p);
      out->accepting.push_back(P.accepting(p));
    }
  b.set_init(static_cast<StateId>(sid[P.init()]));
  for (std::uint32_t p = 0; p < n; ++p) {
    if (!keep[p]) continue;
    for (const auto &e : P.edges(p)) {
      if (!keep[e.target]) continue;
      b.add_transition(static_cast<StateId>(sid[p]), e.action, static_cast<StateId>(sid[e.target]));
      out->inv_transition.push_back(e.inv_transition);
    }
  }
  out->machine = b.build();
  mat_ = out;
  return *mat_;
}

FifoAction NormalFormBundle::lift(const FifoAction &a) const {
  return {a.dir, a.channel, hom_.image[a.letter]};
}

Trace NormalFormBundle::lift(const Trace &t) const {
  Trace out;
  out.reserve(t.size());
  for (const auto &a : t) out.push_back(lift(a));
  return out;
}

NormalFormBundle normalize_machine(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs,
                                   NormalizeOptions opt) {
  NormalFormBundle b;
  b.original_ = std::make_shared<FifoMachine>(m);
  b.ob_ = opt.ob_acceptance;
  b.cap_ = opt.materialize_cap;
  const auto nch = m.num_channels();
  std::vector<const BoundedLangSpec *> by_channel(nch, nullptr);
  for (const auto &s : specs) {
    if (s.channel >= nch) throw Error(Errc::undeclared_id, "bounds for an undeclared channel");
    if (by_channel[s.channel])
      throw Error(Errc::invalid_machine, "two bounds for channel " + m.channel_name(s.channel));
    by_channel[s.channel] = &s;
  }
  for (ChannelId c = 0; c < nch; ++c) {
    if (!by_channel[c]) throw Error(Errc::invalid_machine, "no bounds for channel " + m.channel_name(c));
    for (const auto &w : by_channel[c]->tuple)
      for (auto a : w)
        if (a >= m.num_letters() || m.letter_channel(a) != c)
          throw Error(Errc::alphabet_mismatch,
                      "tuple letter outside the alphabet of channel " + m.channel_name(c));
    b.original_specs_.push_back(validate_bounded_spec(*by_channel[c], false));
  }

  std::vector<DistinctSpec> ds;
  for (const auto &v : b.original_specs_) ds.push_back(distinct_letterize(v));
  std::vector<LetterId> offset(nch, 0);
  for (ChannelId c = 0; c < nch; ++c) {
    offset[c] = static_cast<LetterId>(b.hom_.names.size());
    for (std::size_t i = 0; i < ds[c].image.size(); ++i) {
      std::string name = "a" + std::to_string(i + 1);
      if (nch > 1) name += "_" + m.channel_name(c);
      b.hom_.names.push_back(name);
      b.hom_.channel.push_back(c);
      b.hom_.image.push_back(ds[c].image[i]);
    }
  }
  const auto total = static_cast<std::uint32_t>(b.hom_.names.size());
  std::vector<Dfa> langs;
  for (ChannelId c = 0; c < nch; ++c) {
    std::vector<Symbol> map(ds[c].image.size());
    for (std::size_t i = 0; i < map.size(); ++i) map[i] = offset[c] + static_cast<Symbol>(i);
    ValidatedSpec v;
    v.spec.channel = c;
    for (const auto &w : ds[c].tuple) {
      Word nw;
      for (auto a : w) nw.push_back(map[a]);
      v.spec.tuple.push_back(std::move(nw));
    }
    v.spec.language = minimize(relabel(ds[c].language, total, map));
    v.minimal = v.spec.language;
    v.pattern = tuple_pattern(total, v.spec.tuple);
    v.distinct_letter = true;
    v.letter_bounded = std::all_of(v.spec.tuple.begin(), v.spec.tuple.end(),
                                   [](const Word &w) { return w.size() == 1; });
    langs.push_back(v.minimal);
    b.specs_.push_back(std::move(v));
  }
  auto inv = std::make_shared<FifoMachine>(inverse_hom_machine(m, b.hom_, &b.inverse_origin_));
  b.inverse_ = inv;
  b.va_ = std::make_shared<ValidAutomaton>(std::move(langs), b.hom_.channel);
  b.product_ = std::make_shared<ProductSpace>(b.inverse_, b.va_, b.ob_);
  if (b.ob_) {
    b.search_ = b.product_;
  } else {
    auto pr = std::make_shared<SendPruning>(make_send_pruning(*b.va_, b.hom_, b.inverse_origin_));
    b.search_ = std::make_shared<ProductSpace>(b.inverse_, b.va_, false, pr);
  }
  return b;
}

NormalFormReport check_normal_form(const FifoMachine &m, const std::vector<ValidatedSpec> &specs) {
  NormalFormReport r;
  std::vector<Dfa> langs(m.num_channels());
  std::vector<char> seen(m.num_channels(), 0);
  for (const auto &v : specs) {
    if (!v.distinct_letter) {
      r.ok = false;
      r.reason = "language of channel " + m.channel_name(v.spec.channel) + " is not distinct-letter";
      return r;
    }
    auto used = used_symbols(v.minimal);
    for (auto a : m.alphabet(v.spec.channel))
      if (!std::binary_search(used.begin(), used.end(), a)) {
        r.ok = false;
        r.reason = "letter " + m.letter_name(a) + " does not occur in the language of channel " +
                   m.channel_name(v.spec.channel);
        return r;
      }
    langs[v.spec.channel] = v.minimal;
    seen[v.spec.channel] = 1;
  }
  for (ChannelId c = 0; c < m.num_channels(); ++c)
    if (!seen[c]) {
      r.ok = false;
      r.reason = "no language for channel " + m.channel_name(c);
      return r;
    }
  std::vector<ChannelId> lc(m.num_letters());
  for (LetterId a = 0; a < m.num_letters(); ++a) lc[a] = m.letter_channel(a);
  ValidAutomaton va(langs, lc);

  // BFS over (state, A-state); the first label A cannot read gives a shortest counterexample
  struct Node {
    StateId q;
    std::vector<std::uint32_t> a;
    std::int64_t parent;
    FifoAction via;
  };
  std::vector<Node> nodes{{m.init(), va.initial(), -1, {}}};
  std::set<std::pair<StateId, std::vector<std::uint32_t>>> seen_nodes{{m.init(), va.initial()}};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (auto t : m.outgoing(nodes[i].q)) {
      const auto &tr = m.transitions()[t];
      auto a = nodes[i].a;
      if (!va.step(a, tr.action)) {
        Trace w{tr.action};
        for (auto j = static_cast<std::int64_t>(i); nodes[j].parent >= 0; j = nodes[j].parent)
          w.push_back(nodes[j].via);
        std::reverse(w.begin(), w.end());
        r.ok = false;
        r.reason = "control-graph trace outside Pref(V)";
        r.counterexample = std::move(w);
        return r;
      }
      if (seen_nodes.emplace(tr.dst, a).second)
        nodes.push_back({tr.dst, std::move(a), static_cast<std::int64_t>(i), tr.action});
    }
  }
  return r;
}

NormalFormReport check_normal_form(const NormalFormBundle &b) {
  return check_normal_form(b.machine(), b.specs());
}

std::vector<Contents> preimages(const NormalFormBundle &b, const Contents &target) {
  const auto &orig = b.original();
  if (target.size() != orig.num_channels())
    throw Error(Errc::invalid_machine, "target has the wrong number of channels");
  std::vector<std::vector<LetterId>> pre(orig.num_letters());
  for (LetterId e = 0; e < b.hom().image.size(); ++e) pre[b.hom().image[e]].push_back(e);
  std::vector<std::vector<Word>> per(target.size());
  for (ChannelId c = 0; c < target.size(); ++c) {
    for (auto a : target[c])
      if (a >= orig.num_letters() || orig.letter_channel(a) != c)
        throw Error(Errc::undeclared_id, "target letter outside the alphabet of channel " +
                                             orig.channel_name(c));
    Dfa inf = infix_closure(b.specs()[c].minimal);
    Word cur;
    std::function<void(std::size_t, std::int32_t)> go = [&](std::size_t i, std::int32_t s) {
      if (s < 0) return;
      if (i == target[c].size()) {
        per[c].push_back(cur);
        return;
      }
      for (auto e : pre[target[c][i]]) {
        cur.push_back(e);
        go(i + 1, inf.next(static_cast<std::uint32_t>(s), e));
        cur.pop_back();
      }
    };
    go(0, inf.init());
  }
  std::vector<Contents> out{Contents{}};
  for (ChannelId c = 0; c < target.size(); ++c) {
    std::vector<Contents> next;
    for (const auto &partial : out)
      for (const auto &w : per[c]) {
        auto x = partial;
        x.push_back(w);
        next.push_back(std::move(x));
      }
    out.swap(next);
  }
  return out;
}

std::vector<StateId> states_over(const NormalFormBundle &b, StateId q) {
  const auto &mat = b.materialized();
  std::vector<StateId> out;
  for (StateId s = 0; s < mat.machine.num_states(); ++s)
    if (b.product().base(mat.product_id[s]) == q) out.push_back(s);
  return out;
}

} // namespace ibfifo
