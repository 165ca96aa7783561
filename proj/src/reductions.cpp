#include "ibfifo/reductions.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <sstream>

#include "ibfifo/counterize.hpp"
#include "ibfifo/error.hpp"
#include "ibfifo/normalize.hpp"
#include "ibfifo/text_format.hpp"

namespace ibfifo {

ReductionKind parse_reduction_kind(std::string_view s) {
  std::string k(s);
  for (const char *sep : {"->", "-", "_to_", "2"}) {
    auto at = k.find(sep);
    if (at != std::string::npos) {
      k = k.substr(0, at) + ">" + k.substr(at + std::string_view(sep).size());
      break;
    }
  }
  if (k == "reach>csr") return ReductionKind::reach_to_csr;
  if (k == "csr>reach") return ReductionKind::csr_to_reach;
  if (k == "reach>deadlock") return ReductionKind::reach_to_deadlock;
  if (k == "bounded>reach") return ReductionKind::bounded_to_reach;
  if (k == "term>reach") return ReductionKind::term_to_reach;
  throw Error(Errc::unknown_kind, "unknown reduction kind '" + std::string(s) + "'");
}

const char *reduction_kind_name(ReductionKind k) {
  switch (k) {
  case ReductionKind::reach_to_csr: return "reach->csr";
  case ReductionKind::csr_to_reach: return "csr->reach";
  case ReductionKind::reach_to_deadlock: return "reach->deadlock";
  case ReductionKind::bounded_to_reach: return "bounded->reach";
  case ReductionKind::term_to_reach: return "term->reach";
  }
  return "?";
}

namespace {

std::string unique_state(const FifoMachineBuilder &b, const std::string &base) {
  std::string n = base;
  for (int k = 2; b.peek().find_state(n); ++k) n = base + std::to_string(k);
  return n;
}

std::string unique_letter(const FifoMachineBuilder &b, const std::string &base) {
  std::string n = base;
  for (int k = 2; b.peek().find_letter(n); ++k) n = base + std::to_string(k);
  return n;
}

// copy of m (same ids) with extra room for letters and states
FifoMachineBuilder copy_of(const FifoMachine &m, const std::string &name) {
  auto b = FifoMachineBuilder::with_alphabet_of(m, name);
  for (StateId s = 0; s < m.num_states(); ++s) b.add_state(m.state_name(s));
  b.set_init(m.init());
  return b;
}

void copy_transitions(FifoMachineBuilder &b, const FifoMachine &m) {
  for (const auto &t : m.transitions()) b.add_transition(t.src, t.action, t.dst);
}

// specs moved into the symbol space of a machine with more letters
std::vector<BoundedLangSpec> widen(const std::vector<BoundedLangSpec> &specs, std::uint32_t num_letters) {
  std::vector<BoundedLangSpec> out;
  for (const auto &s : specs) {
    std::vector<Symbol> id(s.language.num_symbols());
    for (Symbol a = 0; a < id.size(); ++a) id[a] = a;
    out.push_back({s.channel, s.tuple, relabel(s.language, num_letters, id)});
  }
  std::sort(out.begin(), out.end(), [](const auto &x, const auto &y) { return x.channel < y.channel; });
  return out;
}

Dfa word_dfa(std::uint32_t k, const Word &w) { return minimize(determinize(nfa_word(k, w))); }

Dfa star_of(std::uint32_t k, Symbol a) {
  Dfa d(k);
  auto s = d.add_state(true);
  d.set_init(static_cast<std::int32_t>(s));
  d.set(s, a, s);
  return d;
}

} // namespace

FifoReduction reduce_reach_to_csr(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs, StateId q,
                                  const Contents &w) {
  if (w.size() != m.num_channels()) throw Error(Errc::invalid_machine, "target contents need one word per channel");
  auto b = copy_of(m, m.name() + "_csr");
  copy_transitions(b, m);
  std::vector<LetterId> dollar;
  for (ChannelId c = 0; c < m.num_channels(); ++c)
    dollar.push_back(b.add_letter(c, unique_letter(b, "$" + m.channel_name(c))));
  // q -!$..-> -?w_c ?$_c ...-> q_end
  std::vector<FifoAction> path;
  for (ChannelId c = 0; c < m.num_channels(); ++c) path.push_back({Dir::send, c, dollar[c]});
  for (ChannelId c = 0; c < m.num_channels(); ++c) {
    for (auto a : w[c]) path.push_back({Dir::receive, c, a});
    path.push_back({Dir::receive, c, dollar[c]});
  }
  StateId cur = q;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    auto nxt = b.add_state(unique_state(b, m.state_name(q) + "_flush" + std::to_string(i + 1)));
    b.add_transition(cur, path[i], nxt);
    cur = nxt;
  }
  auto end = b.add_state(unique_state(b, "q_end"));
  b.add_transition(cur, path.back(), end);
  FifoReduction out;
  out.machine = b.build();
  const auto k = static_cast<std::uint32_t>(out.machine.num_letters());
  for (auto &s : widen(specs, k)) {
    s.tuple.push_back({dollar[s.channel]});
    s.language = minimize(dfa_concat(s.language, word_dfa(k, {dollar[s.channel]})));
    out.specs.push_back(std::move(s));
  }
  out.targets.push_back({end, std::nullopt});
  return out;
}

FifoReduction reduce_csr_to_reach(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs, StateId q) {
  auto b = copy_of(m, m.name() + "_reach");
  copy_transitions(b, m);
  // a copy of q that only drains, so the extra receives cannot feed back into the run
  auto d = b.add_state(unique_state(b, m.state_name(q) + "_drain"));
  for (const auto &t : m.transitions())
    if (t.dst == q) b.add_transition(t.src, t.action, d);
  for (LetterId a = 0; a < m.num_letters(); ++a) b.add_transition(d, {Dir::receive, m.letter_channel(a), a}, d);
  FifoReduction out;
  out.machine = b.build();
  out.specs = widen(specs, static_cast<std::uint32_t>(out.machine.num_letters()));
  out.targets.push_back({d, Contents(m.num_channels())});
  if (q == m.init()) out.targets.push_back({m.init(), Contents(m.num_channels())});
  return out;
}

FifoReduction reduce_reach_to_deadlock(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs, StateId q,
                                       const Contents &w) {
  auto r = reduce_reach_to_csr(m, specs, q, w);
  const StateId end = r.targets.front().state;
  auto b = copy_of(r.machine, m.name() + "_deadlock");
  copy_transitions(b, r.machine);
  std::string dn = "d";
  for (int k = 2; b.peek().find_channel(dn); ++k) dn = "d" + std::to_string(k);
  auto d = b.add_channel(dn);
  auto dollar = b.add_letter(d, unique_letter(b, "$" + dn));
  for (StateId s = 0; s < r.machine.num_states(); ++s)
    if (s != end) b.add_transition(s, {Dir::send, d, dollar}, s);
  FifoReduction out;
  out.machine = b.build();
  const auto k = static_cast<std::uint32_t>(out.machine.num_letters());
  out.specs = widen(r.specs, k);
  out.specs.push_back({d, {{dollar}}, star_of(k, dollar)});
  out.deadlock = true;
  return out;
}

namespace {

CounterReduction duplicate_and_drain(const CounterMachine &c, bool strict) {
  CounterMachineBuilder b;
  const auto K = static_cast<CounterId>(c.num_counters());
  for (CounterId x = 0; x < K; ++x) b.add_counter(c.counter_name(x) + "^1");
  for (CounterId x = 0; x < K; ++x) b.add_counter(c.counter_name(x) + "^2");
  const CounterId silent = K ? K : b.add_counter("aux");
  auto one = [](CounterId x) { return x; };
  auto two = [&](CounterId x) { return K + x; };
  std::size_t fresh = 0;
  auto mid = [&](const std::string &base) { return b.add_state(base + "~" + std::to_string(++fresh)); };
  auto tau = [&](StateId s, StateId t, std::vector<CounterId> zero) {
    auto m = mid("tau");
    b.add_transition(s, {CounterOp::inc, silent, std::move(zero)}, m);
    b.add_transition(m, {CounterOp::dec, silent, {}}, t);
  };

  std::vector<StateId> p1(c.num_states());
  for (StateId q = 0; q < c.num_states(); ++q) p1[q] = b.add_state("p1:" + c.state_name(q));
  b.set_init(p1[c.init()]);
  for (const auto &t : c.transitions()) {
    std::vector<CounterId> z;
    for (auto x : t.action.zero) z.push_back(one(x));
    for (auto x : t.action.zero) z.push_back(two(x));
    std::sort(z.begin(), z.end());
    auto m = mid("p1:" + c.state_name(t.src));
    b.add_transition(p1[t.src], {t.action.op, one(t.action.counter), z}, m);
    b.add_transition(m, {t.action.op, two(t.action.counter), z}, p1[t.dst]);
  }

  auto drain = b.add_state("drain");
  auto empty = b.add_state("empty");
  // phase two: (o, q, moved), only the second set moves
  std::map<std::tuple<StateId, StateId, int>, StateId> p2;
  std::vector<std::tuple<StateId, StateId, int>> work;
  auto get = [&](StateId o, StateId q, int moved) {
    auto key = std::make_tuple(o, q, moved);
    auto it = p2.find(key);
    if (it != p2.end()) return it->second;
    auto s = b.add_state("p2:" + c.state_name(o) + "," + c.state_name(q) + "," + std::to_string(moved));
    p2.emplace(key, s);
    work.push_back(key);
    return s;
  };
  for (StateId o = 0; o < c.num_states(); ++o) tau(p1[o], get(o, o, 0), {});
  while (!work.empty()) {
    auto [o, q, moved] = work.back();
    work.pop_back();
    auto src = p2.at({o, q, moved});
    for (auto t : c.outgoing(q)) {
      const auto &tr = c.transitions()[t];
      std::vector<CounterId> z;
      for (auto x : tr.action.zero) z.push_back(two(x));
      auto dst = get(o, tr.dst, 1);
      b.add_transition(src, {tr.action.op, two(tr.action.counter), z}, dst);
    }
    if (moved && q == o) tau(src, drain, {});
  }
  for (CounterId x = 0; x < K; ++x) {
    auto m = mid("drain");
    b.add_transition(drain, {CounterOp::dec, one(x), {}}, m);
    b.add_transition(m, {CounterOp::dec, two(x), {}}, drain);
  }
  std::vector<CounterId> first;
  for (CounterId x = 0; x < K; ++x) first.push_back(one(x));
  tau(drain, empty, first);
  for (CounterId x = 0; x < K; ++x) b.add_transition(empty, {CounterOp::dec, two(x), {}}, empty);

  CounterReduction out;
  out.machine = b.build();
  const auto total = out.machine.num_counters();
  if (strict) {
    for (CounterId x = 0; x < K; ++x) {
      Valuation v(total, 0);
      v[two(x)] = 1;
      out.targets.push_back({empty, v});
    }
  } else {
    out.targets.push_back({empty, Valuation(total, 0)});
  }
  return out;
}

} // namespace

CounterReduction reduce_bounded_to_reach(const CounterMachine &c) { return duplicate_and_drain(c, true); }
CounterReduction reduce_term_to_reach(const CounterMachine &c) { return duplicate_and_drain(c, false); }

ReductionArtifact apply_reduction(ReductionKind kind, const ReductionInput &in) {
  ReductionArtifact a{kind, std::nullopt, std::nullopt};
  switch (kind) {
  case ReductionKind::reach_to_csr:
    a.fifo = reduce_reach_to_csr(in.machine, in.specs, in.state, in.contents);
    break;
  case ReductionKind::csr_to_reach:
    a.fifo = reduce_csr_to_reach(in.machine, in.specs, in.state);
    break;
  case ReductionKind::reach_to_deadlock:
    a.fifo = reduce_reach_to_deadlock(in.machine, in.specs, in.state, in.contents);
    break;
  case ReductionKind::bounded_to_reach:
  case ReductionKind::term_to_reach: {
    auto b = normalize_machine(in.machine, in.specs);
    auto cm = build_counter_machine(b).machine;
    a.counter = kind == ReductionKind::bounded_to_reach ? reduce_bounded_to_reach(cm) : reduce_term_to_reach(cm);
    break;
  }
  }
  return a;
}

std::string print_reduction(const ReductionArtifact &a) {
  std::ostringstream o;
  o << "# " << reduction_kind_name(a.kind) << "\n";
  if (a.fifo) {
    const auto &r = *a.fifo;
    o << print_machine(r.machine);
    std::istringstream bs(print_bounds(r.machine, r.specs));
    for (std::string line; std::getline(bs, line);) o << "# " << line << "\n";
    if (r.deadlock) o << "# target deadlock\n";
    for (const auto &t : r.targets)
      o << "# target " << r.machine.state_name(t.state) << ' '
        << (t.contents ? contents_string(r.machine, *t.contents) : std::string("any")) << "\n";
  }
  if (a.counter) {
    const auto &r = *a.counter;
    o << print_counter_machine(r.machine);
    for (const auto &t : r.targets) {
      o << "# target " << r.machine.state_name(t.state);
      for (CounterId x = 0; x < t.valuation.size(); ++x)
        if (t.valuation[x]) o << ' ' << r.machine.counter_name(x) << '=' << t.valuation[x];
      o << "\n";
    }
  }
  return o.str();
}

Answer solve_artifact(const ReductionArtifact &a, std::size_t max_depth, std::size_t max_states) {
  if (a.counter) {
    const auto &r = *a.counter;
    auto ex = explore_counter(
        r.machine,
        [&](const CounterConfig &cfg) {
          return std::any_of(r.targets.begin(), r.targets.end(), [&](const CounterConfig &t) { return t == cfg; });
        },
        max_states);
    if (ex.found) return Answer::yes;
    return ex.saturated ? Answer::no : Answer::unknown;
  }
  const auto &r = *a.fifo;
  const auto &m = r.machine;
  std::vector<Dfa> langs(m.num_channels());
  for (const auto &s : r.specs) langs[s.channel] = trim(minimize(s.language));
  // a channel nobody reads whose language takes anything: its sends never block and never matter
  std::vector<char> free(m.num_channels(), 0);
  if (r.deadlock) {
    for (ChannelId c = 0; c < m.num_channels(); ++c) {
      const auto &d = langs[c];
      bool any = d.size() == 1 && d.init() == 0 && d.is_final(0);
      for (LetterId l = 0; any && l < m.num_letters(); ++l)
        if (m.letter_channel(l) == c) any = d.next(0, l) == 0;
      free[c] = any;
    }
    for (const auto &t : m.transitions())
      if (t.action.dir == Dir::receive) free[t.action.channel] = 0;
  }
  auto pruned = copy_of(m, m.name());
  for (const auto &t : m.transitions())
    if (!free[t.action.channel]) pruned.add_transition(t.src, t.action, t.dst);
  auto ex = explore_fifo(pruned.build(), max_depth, SIZE_MAX, &langs);
  std::vector<char> has_send(m.num_states(), 0);
  for (const auto &t : m.transitions()) has_send[t.src] |= t.action.dir == Dir::send;
  for (std::size_t i = 0; i < ex.configs.size(); ++i) {
    if (!ex.complete[i]) continue;
    const auto &cfg = ex.configs[i];
    if (r.deadlock) {
      if (has_send[cfg.state]) continue;
      bool stuck = true;
      for (auto t : m.outgoing(cfg.state)) {
        const auto &act = m.transitions()[t].action;
        const auto &w = cfg.contents[act.channel];
        if (!w.empty() && w.front() == act.letter) stuck = false;
      }
      if (stuck) return Answer::yes;
      continue;
    }
    for (const auto &t : r.targets)
      if (cfg.state == t.state && (!t.contents || cfg.contents == *t.contents)) return Answer::yes;
  }
  return ex.saturated ? Answer::no : Answer::unknown;
}

// --- output-bounded ---------------------------------------------------------------

ObKind parse_ob_kind(std::string_view s) {
  if (s == "reach") return ObKind::reach;
  if (s == "csr") return ObKind::csr;
  if (s == "bounded") return ObKind::bounded;
  if (s == "term" || s == "terminates") return ObKind::term;
  throw Error(Errc::unknown_kind, "unknown output-bounded question '" + std::string(s) + "'");
}

namespace {

DollarAugmented augment(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs, bool prefixes) {
  auto b = copy_of(m, m.name() + "_ob");
  copy_transitions(b, m);
  std::vector<LetterId> dollar;
  for (ChannelId c = 0; c < m.num_channels(); ++c)
    dollar.push_back(b.add_letter(c, unique_letter(b, "$" + m.channel_name(c))));
  for (const auto &t : m.transitions())
    if (t.action.dir == Dir::send) b.add_transition(t.src, {Dir::send, t.action.channel, dollar[t.action.channel]}, t.dst);
  DollarAugmented out;
  out.machine = b.build();
  const auto k = static_cast<std::uint32_t>(out.machine.num_letters());
  for (auto &s : widen(specs, k)) {
    const auto c = s.channel;
    Dfa base = s.language;
    if (prefixes) {
      base = prefix_closure(base);
      std::set<Word> seen;
      auto words = s.tuple;
      for (const auto &w : words)
        for (std::size_t len = 1; len < w.size(); ++len) {
          Word p(w.begin(), w.begin() + static_cast<long>(len));
          if (seen.insert(p).second) s.tuple.push_back(p);
        }
    }
    s.tuple.push_back({dollar[c]});
    s.language = minimize(dfa_concat(base, star_of(k, dollar[c])));
    out.specs.push_back(std::move(s));
  }
  return out;
}

} // namespace

DollarAugmented dollar_augment(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs) {
  return augment(m, specs, true);
}

namespace {

ObVerdict lifted(Verdict v, const NormalFormBundle &b) {
  v.witness = b.lift(v.witness);
  v.pump = b.lift(v.pump);
  return {std::move(v), b.original()};
}

} // namespace

ObVerdict ob_decide(ObKind kind, const FifoMachine &m, const std::vector<BoundedLangSpec> &specs, StateId q,
                    const Contents &w, const EngineOptions &opt) {
  switch (kind) {
  case ObKind::reach: {
    if (w.size() != m.num_channels()) throw Error(Errc::invalid_machine, "target contents need one word per channel");
    // the received words are in L_c exactly when the sent words are in L_c.w_c
    std::vector<BoundedLangSpec> shifted;
    for (auto s : specs) {
      const auto &wc = w[s.channel];
      if (!wc.empty()) {
        s.tuple.push_back(wc);
        s.language = minimize(dfa_concat(s.language, word_dfa(s.language.num_symbols(), wc)));
      }
      shifted.push_back(std::move(s));
    }
    auto b = normalize_machine(m, shifted);
    return lifted(decide_reachability(b, q, w, opt), b);
  }
  case ObKind::csr: {
    // every input word must be complete: L_c.$* with receive acceptance
    auto a = augment(m, specs, false);
    NormalizeOptions no;
    no.ob_acceptance = true;
    auto b = normalize_machine(a.machine, a.specs, no);
    return lifted(decide_control_state(b, q, opt), b);
  }
  case ObKind::bounded:
  case ObKind::term: {
    auto a = augment(m, specs, true);
    auto b = normalize_machine(a.machine, a.specs);
    return lifted(kind == ObKind::bounded ? decide_boundedness(b, opt) : decide_termination(b, opt), b);
  }
  }
  throw Error(Errc::unknown_kind, "unknown output-bounded question");
}

} // namespace ibfifo
