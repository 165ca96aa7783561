#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "ibfifo/counterize.hpp"
#include "ibfifo/engine.hpp"
#include "ibfifo/reductions.hpp"
#include "ibfifo/text_format.hpp"
#include "support.hpp"

using namespace ibfifo;

namespace {

struct Outcome {
  bool ok = true;
  std::string note;
  double slowest_ms = 0; // per-query timing where the criterion has a limit
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

void fail(Outcome &o, const std::string &why) {
  if (o.ok) o.note = why;
  o.ok = false;
}

template <class F> double timed(F &&f) {
  auto t = Clock::now();
  f();
  return ms_since(t);
}

bool sends_in_prefix(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs, const Trace &t) {
  for (const auto &s : specs)
    if (!fixtures::in_prefix(s.language, project(t, s.channel, Dir::send))) return false;
  return true;
}

// the lifted witness runs from the initial configuration to `reached`
bool replays(const fixtures::Fixture &f, const NormalFormBundle &b, const Verdict &v) {
  if (!v.reached) return false;
  auto t = b.lift(v.witness);
  auto ends = run_trace_all(f.m, f.m.initial_config(), t);
  return std::find(ends.begin(), ends.end(), *v.reached) != ends.end() && sends_in_prefix(f.m, f.specs, t);
}

Outcome worked_example() {
  Outcome o;
  auto t = Clock::now();
  auto f = fixtures::twostate();
  auto b = normalize_machine(f.m, f.specs);
  auto text = print_normal_form(b);
  if (text.find("(a1 a2)* a3 a3*") == std::string::npos) fail(o, "language of the normal form");
  if (b.machine().num_states() != 8) fail(o, std::to_string(b.machine().num_states()) + " control states");
  auto c = parse_counter_machine(print_counter_machine(build_counter_machine(b).machine));
  if (c.num_counters() != 2 || c.counter_name(0) != "x" || c.counter_name(1) != "y") fail(o, "counter names");
  std::size_t dec_y = 0;
  for (const auto &tr : c.transitions())
    if (tr.action.op == CounterOp::dec && tr.action.counter == 1) {
      ++dec_y;
      if (tr.action.zero != std::vector<CounterId>{0}) fail(o, "dec y without zero {x}");
    }
  if (dec_y == 0) fail(o, "no dec y");
  o.slowest_ms = ms_since(t);
  if (o.slowest_ms >= 1000) fail(o, "slower than 1 s");
  return o;
}

Outcome protocol_facts() {
  Outcome o;
  auto f = fixtures::cdp();
  auto b = normalize_machine(f.m, f.specs);
  auto query = [&](const char *q, const char *w, Answer want, bool replay) {
    Verdict v;
    double ms = timed([&] { v = decide_reachability(b, *f.m.find_state(q), parse_contents(w, f.m)); });
    o.slowest_ms = std::max(o.slowest_ms, ms);
    if (v.answer != want) fail(o, std::string(q) + " " + w + " answered " + answer_name(v.answer));
    if (replay && !replays(f, b, v)) fail(o, std::string(q) + " " + w + " witness does not replay");
    if (ms >= 5000) fail(o, std::string(q) + " slower than 5 s");
  };
  query("q10", "c1=;c2=e", Answer::yes, true);
  query("q00", "c1=b;c2=e", Answer::yes, true);
  query("q00", "c1=a;c2=", Answer::no, false);
  Verdict v;
  double ms = timed([&] { v = decide_boundedness(b); });
  o.slowest_ms = std::max(o.slowest_ms, ms);
  if (v.answer != Answer::no) fail(o, "protocol not reported unbounded");
  if (v.pump.empty()) fail(o, "no pump");
  // witness then pump^k: runs, stays in the languages, and the channels keep growing
  std::size_t prev = 0;
  Trace t = b.lift(v.witness);
  for (int k = 1; k <= 4; ++k) {
    auto p = b.lift(v.pump);
    t.insert(t.end(), p.begin(), p.end());
    auto ends = run_trace_all(f.m, f.m.initial_config(), t);
    std::size_t most = 0;
    for (const auto &e : ends) {
      std::size_t n = 0;
      for (const auto &w : e.contents) n += w.size();
      most = std::max(most, n);
    }
    if (ends.empty() || !sends_in_prefix(f.m, f.specs, t) || most <= prev) fail(o, "pump does not repeat");
    prev = most;
  }
  if (ms >= 5000) fail(o, "boundedness slower than 5 s");
  return o;
}

Outcome rational() {
  Outcome o;
  auto f = fixtures::cdp();
  auto b = normalize_machine(f.m, f.specs);
  Verdict v;
  o.slowest_ms = timed([&] {
    v = decide_rational_reachability(b, *f.m.find_state("q11"), parse_relation("[b,_][a,_]*", f.m));
  });
  if (v.answer != Answer::yes) fail(o, std::string("answered ") + answer_name(v.answer));
  else if (!replays(f, b, v)) fail(o, "witness does not replay");
  if (o.slowest_ms >= 5000) fail(o, "slower than 5 s");
  return o;
}

Outcome three_sat() {
  Outcome o;
  std::size_t sat = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto n = 3 + static_cast<std::uint32_t>(seed % 3);
    const auto m = 5 + static_cast<std::uint32_t>(seed % 4);
    auto f = random_cnf(seed, n, m);
    if (seed % 3 == 0) {
      // planted contradiction on the last variable
      f.clauses[m - 2] = {{static_cast<int>(n), static_cast<int>(n), static_cast<int>(n)}};
      f.clauses[m - 1] = {{-static_cast<int>(n), -static_cast<int>(n), -static_cast<int>(n)}};
    }
    const bool truth = brute_force_sat(f);
    sat += truth;
    double ms = timed([&] {
      auto g = gen_3sat(f, seed % 2 == 0, false);
      auto b = normalize_machine(g.bundle.machine, g.bundle.specs);
      auto r = decide_reachability(b, g.target, Contents(1)).answer;
      if (r != (truth ? Answer::yes : Answer::no))
        fail(o, "seed " + std::to_string(seed) + " reach " + answer_name(r));
      auto u = gen_3sat(f, seed % 2 == 0, true);
      auto ub = normalize_machine(u.bundle.machine, u.bundle.specs);
      auto bd = decide_boundedness(ub).answer;
      auto tm = decide_termination(ub).answer;
      if (bd != (truth ? Answer::no : Answer::yes))
        fail(o, "seed " + std::to_string(seed) + " bounded " + answer_name(bd));
      if (tm != (truth ? Answer::no : Answer::yes))
        fail(o, "seed " + std::to_string(seed) + " terminates " + answer_name(tm));
    });
    o.slowest_ms = std::max(o.slowest_ms, ms);
    if (ms >= 60000) fail(o, "seed " + std::to_string(seed) + " slower than 60 s");
  }
  o.note = o.ok ? std::to_string(sat) + "/20 satisfiable" : o.note;
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::size_t configs = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    RandomParams p;
    p.states = 2 + seed % 3;
    p.channels = 1 + seed % 2;
    p.max_word_len = 1 + seed % 2;
    auto r = gen_random(seed, p);
    auto b = normalize_machine(r.machine, r.specs);
    const auto &m = b.machine();
    auto cb = build_counter_machine(b);
    const auto &c = cb.machine;

    std::set<FifoConfig> fifo;
    for (const auto &x : explore_fifo(m, 10, SIZE_MAX).configs) fifo.insert(x);

    using Node = std::tuple<StateId, Valuation, LastSent>;
    std::set<Node> seen;
    std::vector<Node> layer{{c.init(), Valuation(c.num_counters(), 0), LastSent(m.num_channels(), kBottom)}};
    seen.insert(layer[0]);
    std::set<FifoConfig> counter;
    bool undefined = false;
    for (std::size_t d = 0; d <= 10 && !layer.empty(); ++d) {
      std::vector<Node> next;
      for (const auto &[s, v, last] : layer) {
        auto w = valuation_to_contents(v, last, cb.idx);
        if (!w) undefined = true;
        else counter.insert(FifoConfig{s, *w});
        if (d == 10) continue;
        for (auto i : c.outgoing(s)) {
          const auto &ct = c.transitions()[i];
          if (!zero_tests_hold(ct.action, v)) continue;
          if (ct.action.op == CounterOp::dec && v[ct.action.counter] == 0) continue;
          auto nc = counter_fire(c, CounterConfig{s, v}, i);
          auto nl = last;
          const auto &fa = m.transitions()[i].action;
          if (fa.dir == Dir::send) nl[fa.channel] = fa.letter;
          Node k{nc.state, nc.valuation, nl};
          if (seen.insert(k).second) next.push_back(std::move(k));
        }
      }
      layer = std::move(next);
    }
    configs += fifo.size();
    if (undefined) fail(o, "seed " + std::to_string(seed) + ": valuation without contents");
    if (fifo != counter) fail(o, "seed " + std::to_string(seed) + ": reachable sets differ");
  }
  if (o.ok) o.note = std::to_string(configs) + " configurations";
  return o;
}

Outcome round_trips() {
  Outcome o;
  std::size_t checked = 0;
  std::vector<std::pair<CounterIndexing, std::size_t>> cases;
  {
    auto e = fixtures::four_letters();
    std::vector<ValidatedSpec> v;
    for (const auto &s : e.specs) v.push_back(validate_bounded_spec(s));
    cases.emplace_back(make_indexing(v, e.m.num_letters()), 1);
  }
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto r = gen_random(seed);
    auto b = normalize_machine(r.machine, r.specs);
    cases.emplace_back(build_counter_machine(b).idx, b.machine().num_channels());
  }
  for (auto &[idx, channels] : cases)
    for (ChannelId c = 0; c < channels; ++c) {
      std::vector<LetterId> letters;
      for (LetterId a = 0; a < idx.letter_channel.size(); ++a)
        if (idx.letter_channel[a] == c) letters.push_back(a);
      auto count = [&](const Word &w) {
        Valuation v(idx.num_counters, 0);
        for (auto x : w) ++v[idx.counter_of(x)];
        return v;
      };
      for (const auto &w : enumerate_words(idx.infix[c], 8)) {
        std::vector<LetterId> lasts;
        for (auto a : letters)
          if (is_good(idx, c, a, w)) lasts.push_back(a);
        if (w.empty()) lasts.push_back(kBottom);
        for (auto a : lasts) {
          auto v = count(w);
          auto back = valuation_to_word(idx, c, v.data(), a);
          ++checked;
          if (!back || *back != w) fail(o, "word does not round trip");
        }
      }
      const auto &xs = idx.counter[c];
      std::vector<std::uint32_t> cur(xs.size(), 0);
      std::function<void(std::size_t, std::uint32_t)> gen = [&](std::size_t i, std::uint32_t left) {
        if (i == xs.size()) {
          Valuation v(idx.num_counters, 0);
          for (std::size_t k = 0; k < xs.size(); ++k) v[xs[k]] = cur[k];
          auto lasts = letters;
          lasts.push_back(kBottom);
          for (auto a : lasts) {
            auto w = valuation_to_word(idx, c, v.data(), a);
            if (!w) continue;
            ++checked;
            if (count(*w) != v) fail(o, "valuation does not round trip");
          }
          return;
        }
        for (std::uint32_t k = 0; k <= left; ++k) {
          cur[i] = k;
          gen(i + 1, left - k);
        }
      };
      gen(0, 8);
    }
  if (o.ok) o.note = std::to_string(checked) + " round trips";
  return o;
}

std::vector<fixtures::Fixture> corpus() {
  std::vector<fixtures::Fixture> out{fixtures::twostate(), fixtures::cdp(), fixtures::four_letters()};
  auto sat = gen_3sat(CnfFormula{3, {{{1, -2, 3}}, {{-1, 2, -3}}}}, false, true);
  out.push_back({sat.bundle.machine, sat.bundle.specs});
  auto flat = gen_3sat(CnfFormula{2, {{{1, 2, 2}}, {{-1, -2, -2}}}}, true, false);
  out.push_back({flat.bundle.machine, flat.bundle.specs});
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto r = gen_random(seed);
    out.push_back({r.machine, r.specs});
  }
  return out;
}

// every executable trace up to the depth, grouped by the state that decides its extensions
Outcome trace_invariants() {
  Outcome o;
  std::size_t nodes = 0;
  std::size_t idx_bundle = 0;
  for (const auto &f : corpus()) {
    ++idx_bundle;
    auto b = normalize_machine(f.m, f.specs);
    const auto &m = b.machine();
    const auto &va = b.vautomaton();
    {
      using Key = std::pair<FifoConfig, std::vector<std::uint32_t>>;
      std::set<Key> seen{{m.initial_config(), va.initial()}};
      std::vector<Key> layer(seen.begin(), seen.end());
      for (std::size_t d = 0; d < 12 && !layer.empty(); ++d) {
        std::vector<Key> next;
        for (const auto &[cfg, st] : layer)
          for (auto i : m.outgoing(cfg.state)) {
            const auto &a = m.transitions()[i].action;
            const auto &w = cfg.contents[a.channel];
            if (a.dir == Dir::receive && (w.empty() || w.front() != a.letter)) continue;
            auto s2 = st;
            if (!va.step(s2, a)) {
              fail(o, "bundle " + std::to_string(idx_bundle) + ": trace leaves Pref(V)");
              continue;
            }
            Key k{fifo_fire(m, cfg, i), s2};
            if (seen.insert(k).second) next.push_back(std::move(k));
          }
        layer = std::move(next);
      }
      nodes += seen.size();
    }
    {
      auto cb = build_counter_machine(b);
      const auto &c = cb.machine;
      struct Node {
        CounterConfig cfg;
        std::vector<CounterId> tested;
        std::int64_t parent;
        CounterAction via;
      };
      std::vector<Node> all{{c.initial_config(), {}, -1, {}}};
      std::set<std::pair<CounterConfig, std::vector<CounterId>>> seen{{all[0].cfg, {}}};
      std::size_t begin = 0;
      for (std::size_t d = 0; d < 12; ++d) {
        const std::size_t end = all.size();
        for (std::size_t n = begin; n < end; ++n)
          for (auto i : c.outgoing(all[n].cfg.state)) {
            const auto &ct = c.transitions()[i];
            if (!zero_tests_hold(ct.action, all[n].cfg.valuation)) continue;
            if (ct.action.op == CounterOp::dec && all[n].cfg.valuation[ct.action.counter] == 0) continue;
            CounterTrace tau{ct.action};
            for (auto j = static_cast<std::int64_t>(n); all[j].parent >= 0; j = all[j].parent)
              tau.insert(tau.begin(), all[j].via);
            if (!is_zero_restricted(tau)) {
              fail(o, "bundle " + std::to_string(idx_bundle) + ": counter trace not zero-restricted");
              continue;
            }
            auto tested = all[n].tested;
            for (auto z : ct.action.zero)
              if (std::find(tested.begin(), tested.end(), z) == tested.end()) tested.push_back(z);
            std::sort(tested.begin(), tested.end());
            auto nc = counter_fire(c, all[n].cfg, i);
            if (seen.emplace(nc, tested).second)
              all.push_back({nc, tested, static_cast<std::int64_t>(n), ct.action});
          }
        begin = end;
      }
      nodes += all.size();
    }
  }
  if (o.ok) o.note = std::to_string(nodes) + " trace classes";
  return o;
}

Outcome reductions() {
  Outcome o;
  std::size_t checks = 0, yes = 0;
  auto flip = [](Answer a) { return a == Answer::yes ? Answer::no : a == Answer::no ? Answer::yes : a; };
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    RandomParams p;
    p.finite = true;
    p.states = 3;
    p.channels = 1 + seed % 2;
    p.transitions = 6;
    auto r = gen_random(seed, p);
    auto b = normalize_machine(r.machine, r.specs);
    auto naive = fixtures::naive_reach(r.machine, r.specs, 30);
    const FifoConfig target = *std::next(naive.all.begin(), static_cast<long>(seed % naive.all.size()));
    ReductionInput in{r.machine, r.specs, target.state, target.contents};
    const std::string at = "seed " + std::to_string(seed) + ": ";
    auto cmp = [&](ReductionKind k, std::size_t depth, std::size_t states, Answer direct) {
      ++checks;
      yes += direct == Answer::yes;
      if (direct == Answer::unknown) {
        fail(o, at + "direct procedure undecided");
        return;
      }
      auto got = solve_artifact(apply_reduction(k, in), depth, states);
      if (got != direct) fail(o, at + reduction_kind_name(k) + " gives " + answer_name(got));
    };
    auto direct = decide_reachability(b, target.state, target.contents).answer;
    cmp(ReductionKind::reach_to_csr, 40, 200000, direct);
    cmp(ReductionKind::reach_to_deadlock, 40, 200000, direct);
    cmp(ReductionKind::csr_to_reach, 40, 200000, decide_control_state(b, target.state).answer);
    cmp(ReductionKind::bounded_to_reach, 0, 500000, flip(decide_boundedness(b).answer));
    cmp(ReductionKind::term_to_reach, 0, 500000, flip(decide_termination(b).answer));
  }
  if (o.ok) o.note = std::to_string(checks) + " reduced questions, " + std::to_string(yes) + " answered yes";
  return o;
}

Outcome minsky() {
  Outcome o;
  const std::regex shape(R"(\$*a*#*b*&*\$*a*#*b*&*)");
  std::size_t yes = 0, no = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto p = random_minsky(seed, 6, 4);
    auto run = interpret_minsky(p, 4);
    auto g = gen_minsky(p);
    auto ex = explore_fifo(g.machine, SIZE_MAX, 32);
    const std::string at = "program " + std::to_string(seed) + ": ";
    if (!ex.saturated) fail(o, at + "search not exhaustive");
    std::vector<char> seen(g.machine.num_states(), 0);
    for (const auto &c : ex.configs) {
      seen[c.state] = 1;
      if (!std::regex_match(word_string(g.machine, c.contents[0]), shape))
        fail(o, at + "contents " + word_string(g.machine, c.contents[0]));
    }
    for (std::size_t q = 0; q < p.states.size(); ++q) {
      if (static_cast<bool>(seen[g.state_of[q]]) != static_cast<bool>(run.reached[q]))
        fail(o, at + "state " + p.states[q] + " disagrees");
      (run.reached[q] ? yes : no) += 1;
    }
  }
  if (o.ok) o.note = std::to_string(yes) + " reachable, " + std::to_string(no) + " unreachable states";
  return o;
}

} // namespace

int main() {
  struct Criterion {
    const char *name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all{
      {"normal form and counters of the worked example", worked_example},
      {"protocol reachability and boundedness", protocol_facts},
      {"rational reachability on the protocol", rational},
      {"3SAT gadgets against brute force", three_sat},
      {"FIFO and counter reachable sets", oracle_equivalence},
      {"contents/valuation round trips", round_trips},
      {"trace invariants to depth 12", trace_invariants},
      {"reduction cross-checks", reductions},
      {"Minsky simulation", minsky},
  };
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto t = Clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception &e) {
      fail(o, std::string("exception: ") + e.what());
    }
    double ms = ms_since(t);
    std::printf("%s %zu %s (%.0f ms%s%s)\n", o.ok ? "PASS" : "FAIL", i + 1, all[i].name, ms,
                o.note.empty() ? "" : "; ", o.note.c_str());
    std::fflush(stdout);
    failed += !o.ok;
  }
  return failed == 0 ? 0 : 1;
}
