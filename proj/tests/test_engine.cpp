#include <doctest.h>

#include <set>

#include "ibfifo/engine.hpp"
#include "ibfifo/reductions.hpp"
#include "ibfifo/relation.hpp"
#include "support.hpp"

using namespace ibfifo;

namespace {

FifoConfig cfg(const FifoMachine &m, const std::string &q, const std::string &w) {
  return {*m.find_state(q), parse_contents(w, m)};
}

std::vector<Dfa> guards(const fixtures::Fixture &f) {
  std::vector<Dfa> g(f.m.num_channels());
  for (const auto &s : f.specs) g[s.channel] = trim(minimize(s.language));
  return g;
}

bool contains(const FifoExploration &ex, const FifoConfig &c) {
  return std::find(ex.configs.begin(), ex.configs.end(), c) != ex.configs.end();
}

// the witness runs from the initial configuration to the target and respects the languages
void check_witness(const fixtures::Fixture &f, const Verdict &v, const NormalFormBundle &b) {
  REQUIRE(v.reached);
  auto t = b.lift(v.witness);
  auto ends = run_trace_all(f.m, f.m.initial_config(), t);
  CHECK(std::find(ends.begin(), ends.end(), *v.reached) != ends.end());
  for (const auto &s : f.specs) CHECK(fixtures::in_prefix(s.language, project(t, s.channel, Dir::send)));
}

fixtures::Fixture loop_a(const char *lang) {
  return fixtures::single("machine l\nchannels c\nalphabet c: a\nstates q\ninit q\ntrans q c!a q\n",
                          std::string("channel c: tuple a ; lang ") + lang + "\n");
}

} // namespace

TEST_CASE("explore_fifo on the protocol") {
  auto f = fixtures::cdp();
  auto g = guards(f);
  auto ex = explore_fifo(f.m, 8, 6, &g);
  CHECK(contains(ex, cfg(f.m, "q00", "c1=b;c2=e")));
  auto none = explore_fifo(f.m, 0, 0, &g);
  CHECK(none.configs.size() == 1);
  CHECK(none.configs[0] == f.m.initial_config());
  auto deep = explore_fifo(f.m, 10, 6, &g);
  CHECK_FALSE(contains(deep, cfg(f.m, "q00", "c1=a;c2=")));
  // agrees with an independent search
  auto naive = fixtures::naive_reach(f.m, f.specs, 8);
  std::set<FifoConfig> got;
  for (const auto &c : explore_fifo(f.m, 8, SIZE_MAX, &g).configs) got.insert(c);
  CHECK(got == naive.all);
}

TEST_CASE("protocol reachability") {
  auto f = fixtures::cdp();
  auto b = normalize_machine(f.m, f.specs);
  auto v = decide_reachability(b, *f.m.find_state("q10"), parse_contents("c1=;c2=e", f.m));
  CHECK(v.answer == Answer::yes);
  CHECK(trace_string(f.m, b.lift(v.witness)) == "c1!a c1?a c2!e");
  check_witness(f, v, b);
  auto v2 = decide_reachability(b, *f.m.find_state("q00"), parse_contents("c1=b;c2=e", f.m));
  CHECK(v2.answer == Answer::yes);
  check_witness(f, v2, b);
  auto init = decide_reachability(b, f.m.init(), Contents(2));
  CHECK(init.answer == Answer::yes);
  CHECK(init.witness.empty());
  auto no = decide_reachability(b, *f.m.find_state("q00"), parse_contents("c1=a;c2=", f.m));
  CHECK(no.answer == Answer::no);
}

TEST_CASE("initial configuration needs the empty word in the language") {
  auto f = fixtures::single("machine m\nchannels c\nalphabet c: a\nstates q r\ninit q\ntrans q c!a r\n",
                            "channel c: tuple a ; lang a\n");
  auto b = normalize_machine(f.m, f.specs);
  CHECK(decide_reachability(b, 0, {{}}).answer == Answer::no);
  CHECK(decide_reachability(b, 1, {{0}}).answer == Answer::yes);
}

TEST_CASE("boundedness") {
  auto f = fixtures::cdp();
  auto b = normalize_machine(f.m, f.specs);
  auto v = decide_boundedness(b);
  REQUIRE(v.answer == Answer::no);
  REQUIRE_FALSE(v.pump.empty());
  // pumping the loop grows the channels
  auto cb = build_counter_machine(b);
  auto start = run_counter_trace(cb.machine, cb.machine.initial_config(), trace_image(v.witness, cb.idx));
  auto prev = start;
  for (int k = 1; k <= 5; ++k) {
    auto next = run_counter_trace(cb.machine, prev, trace_image(v.pump, cb.idx));
    CHECK(next.state == prev.state);
    bool ge = true, gt = false;
    for (std::size_t i = 0; i < next.valuation.size(); ++i) {
      ge = ge && next.valuation[i] >= prev.valuation[i];
      gt = gt || next.valuation[i] > prev.valuation[i];
    }
    CHECK(ge);
    CHECK(gt);
    prev = next;
  }

  auto quiet = fixtures::single("machine m\nchannels c\nalphabet c: a\nstates q r\ninit q\ntrans q c?a r\n",
                                "channel c: tuple a ; lang a*\n");
  CHECK(decide_boundedness(normalize_machine(quiet.m, quiet.specs)).answer == Answer::yes);

  auto l = loop_a("a*");
  auto lb = normalize_machine(l.m, l.specs);
  auto lv = decide_boundedness(lb);
  CHECK(lv.answer == Answer::no);
  CHECK(lv.witness.empty());
  CHECK(trace_string(l.m, lb.lift(lv.pump)) == "c!a");
}

TEST_CASE("bounded verdicts match a saturated search") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RandomParams p;
    p.finite = seed % 2 == 0;
    p.channels = 1 + seed % 2;
    auto r = gen_random(seed, p);
    fixtures::Fixture f{r.machine, r.specs};
    auto b = normalize_machine(f.m, f.specs);
    auto v = decide_boundedness(b);
    REQUIRE(v.answer != Answer::unknown);
    auto g = guards(f);
    auto ex = explore_fifo(f.m, 60, SIZE_MAX, &g);
    CAPTURE(seed);
    if (v.answer == Answer::yes) CHECK(ex.saturated);
    else CHECK_FALSE(ex.saturated);
    if (p.finite) CHECK(v.answer == Answer::yes);
  }
}

TEST_CASE("termination") {
  auto l = loop_a("a*");
  auto v = decide_termination(normalize_machine(l.m, l.specs));
  CHECK(v.answer == Answer::no);
  auto chain = fixtures::single("machine m\nchannels c\nalphabet c: a\nstates p q r\ninit p\n"
                                "trans p c!a q\ntrans q c?a r\ntrans p c!a r\n",
                                "channel c: tuple a ; lang a*\n");
  CHECK(decide_termination(normalize_machine(chain.m, chain.specs)).answer == Answer::yes);
  CnfFormula f{2, {{{1, 2, -1}}, {{-2, -2, 1}}}};
  auto g = gen_3sat(f, false, false);
  auto gb = normalize_machine(g.bundle.machine, g.bundle.specs);
  CHECK(decide_termination(gb).answer == Answer::yes);
  // a non-terminating witness can be repeated
  auto cdp = fixtures::cdp();
  auto b = normalize_machine(cdp.m, cdp.specs);
  auto t = decide_termination(b);
  REQUIRE(t.answer == Answer::no);
  auto cb = build_counter_machine(b);
  auto c = run_counter_trace(cb.machine, cb.machine.initial_config(), trace_image(t.witness, cb.idx));
  for (int k = 0; k < 5; ++k) CHECK_NOTHROW(c = run_counter_trace(cb.machine, c, trace_image(t.pump, cb.idx)));
}

TEST_CASE("coverability filter") {
  CounterMachineBuilder cb;
  auto x = cb.add_counter("x");
  auto p = cb.add_state("p");
  cb.set_init(p);
  cb.add_transition(p, {CounterOp::dec, x, {}}, p);
  auto dec_only = cb.build();
  CHECK(coverability_filter(dec_only, {1}, {1}, 1000) == Coverability::unreachable);

  CounterMachineBuilder ib;
  auto y = ib.add_counter("x");
  auto s = ib.add_state("p");
  ib.set_init(s);
  ib.add_transition(s, {CounterOp::inc, y, {}}, s);
  CHECK(coverability_filter(ib.build(), {1}, {5}, 1000) == Coverability::maybe);

  auto f = fixtures::twostate();
  auto b = normalize_machine(f.m, f.specs);
  auto c = build_counter_machine(b).machine;
  std::vector<char> targets(c.num_states(), 0);
  for (auto q : states_over(b, 1)) targets[q] = 1;
  // a1 a2 can still sit behind the a3 block after ?a1 ?a2
  CHECK(coverability_filter(c, targets, {1, 0}, 10000) == Coverability::maybe);
  CHECK(coverability_filter(c, targets, {0, 3}, 10000) == Coverability::maybe);
  // entered only through dec y with x = 0, and x never grows there
  std::vector<char> tail(c.num_states(), 0);
  tail[*c.find_state("q1|2,2")] = 1;
  CHECK(coverability_filter(c, tail, {1, 0}, 10000) == Coverability::unreachable);
  CHECK(coverability_filter(c, tail, {0, 2}, 10000) == Coverability::maybe);
}

TEST_CASE("coverability filter never rejects a reachable configuration") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    RandomParams p;
    p.finite = true;
    p.channels = 1 + seed % 2;
    auto r = gen_random(seed, p);
    auto b = normalize_machine(r.machine, r.specs);
    auto cb = build_counter_machine(b);
    auto ex = explore_fifo(b.machine(), 12, SIZE_MAX);
    for (std::size_t i = 0; i < ex.configs.size(); i += 3) {
      std::vector<char> t(cb.machine.num_states(), 0);
      t[ex.configs[i].state] = 1;
      CHECK(coverability_filter(cb.machine, t, contents_to_valuation(ex.configs[i].contents, cb.idx), 20000) ==
            Coverability::maybe);
    }
  }
}

TEST_CASE("membership in T_a") {
  auto e = fixtures::four_letters();
  std::vector<ValidatedSpec> v{validate_bounded_spec(e.specs[0])};
  auto idx = make_indexing(v, 4);
  auto r = parse_relation("a2 a3 a1 a2", e.m);
  CHECK(membership_in_Ta({4, 0}, {1}, r, idx));
  CHECK_FALSE(membership_in_Ta({4, 0}, {2}, r, idx));
  CHECK_FALSE(membership_in_Ta({3, 1}, {2}, universal_relation(1), idx));
  CHECK(membership_in_Ta({0, 0}, {kBottom}, parse_relation("eps", e.m), idx));
  CHECK(membership_in_Ta({2, 1}, {3}, parse_relation("(a1|a2|a3|a4)*", e.m), idx));
}

TEST_CASE("rational reachability on the protocol") {
  auto f = fixtures::cdp();
  auto b = normalize_machine(f.m, f.specs);
  auto v = decide_rational_reachability(b, *f.m.find_state("q11"), parse_relation("[b,_][a,_]*", f.m));
  CHECK(v.answer == Answer::yes);
  check_witness(f, v, b);
  CHECK(decide_rational_reachability(b, f.m.init(), universal_relation(2)).answer == Answer::yes);
  CHECK(decide_rational_reachability(b, f.m.init(), parse_relation("[a,_][a,_]*", f.m)).answer == Answer::no);
}

TEST_CASE("control state and deadlock") {
  auto f = fixtures::cdp();
  auto b = normalize_machine(f.m, f.specs);
  auto v = decide_control_state(b, *f.m.find_state("q11"));
  CHECK(v.answer == Answer::yes);
  check_witness(f, v, b);
  CHECK(decide_deadlock(b).answer == Answer::no);
  auto stuck = fixtures::single("machine m\nchannels c\nalphabet c: a\nstates q\ninit q\ntrans q c?a q\n",
                                "channel c: tuple a ; lang a*\n");
  auto d = decide_deadlock(normalize_machine(stuck.m, stuck.specs));
  CHECK(d.answer == Answer::yes);
  CHECK(d.witness.empty());
}

TEST_CASE("worker count does not change verdicts") {
  auto f = fixtures::cdp();
  auto b = normalize_machine(f.m, f.specs);
  EngineOptions one, four;
  four.workers = 4;
  for (const char *q : {"q00", "q01", "q10", "q11"})
    for (const char *w : {"c1=;c2=", "c1=b;c2=e", "c1=ba;c2=", "c1=;c2=e"}) {
      auto a = decide_reachability(b, *f.m.find_state(q), parse_contents(w, f.m), one);
      auto c = decide_reachability(b, *f.m.find_state(q), parse_contents(w, f.m), four);
      CHECK(a.answer == c.answer);
      CHECK(a.witness == c.witness);
    }
}

TEST_CASE("output-bounded questions") {
  auto chain = fixtures::single("machine m\nchannels c\nalphabet c: a b\nstates q0 q1 q2\ninit q0\n"
                                "trans q0 c!a q1\ntrans q1 c!b q2\n",
                                "channel c: tuple a ; lang eps\n");
  auto w = parse_contents("c=ab", chain.m);
  CHECK(ob_decide(ObKind::reach, chain.m, chain.specs, 2, w).verdict.answer == Answer::yes);
  CHECK(ob_decide(ObKind::reach, chain.m, chain.specs, 2, parse_contents("c=b", chain.m)).verdict.answer ==
        Answer::no);
  auto l = loop_a("eps");
  CHECK(ob_decide(ObKind::term, l.m, l.specs, 0, {}).verdict.answer == Answer::no);
  CHECK(ob_decide(ObKind::bounded, l.m, l.specs, 0, {}).verdict.answer == Answer::no);
  auto single = fixtures::single("machine m\nchannels c\nalphabet c: a b\nstates q0 q1 q2\ninit q0\n"
                                 "trans q0 c!a q1\ntrans q1 c?a q2\ntrans q1 c!b q2\n",
                                 "channel c: tuple ab ; lang ab\n");
  CHECK(ob_decide(ObKind::reach, single.m, single.specs, 2, parse_contents("c=a", single.m)).verdict.answer ==
        Answer::no);
  // the receive projection a is not a complete word of L
  CHECK(ob_decide(ObKind::csr, single.m, single.specs, 2, {}).verdict.answer == Answer::no);
  auto cdp = fixtures::cdp();
  CHECK(ob_decide(ObKind::csr, cdp.m, cdp.specs, *cdp.m.find_state("q11"), {}).verdict.answer == Answer::yes);
}
