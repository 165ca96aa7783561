#include <doctest.h>

#include "ibfifo/counterize.hpp"
#include "ibfifo/engine.hpp"
#include "ibfifo/reductions.hpp"
#include "support.hpp"

using namespace ibfifo;

TEST_CASE("reduction kinds parse") {
  CHECK(parse_reduction_kind("reach->csr") == ReductionKind::reach_to_csr);
  CHECK(parse_reduction_kind("csr-reach") == ReductionKind::csr_to_reach);
  CHECK(parse_reduction_kind("reach_to_deadlock") == ReductionKind::reach_to_deadlock);
  CHECK(parse_reduction_kind("bounded->reach") == ReductionKind::bounded_to_reach);
  CHECK(parse_reduction_kind("term->reach") == ReductionKind::term_to_reach);
  CHECK_THROWS_AS(parse_reduction_kind("reach->term"), Error);
}

TEST_CASE("reach to control state builds a flushing path") {
  auto f = fixtures::twostate();
  auto w = parse_contents("c=ab", f.m);
  auto r = reduce_reach_to_csr(f.m, f.specs, 0, w);
  REQUIRE(r.targets.size() == 1);
  CHECK_FALSE(r.targets[0].contents);
  const auto end = r.targets[0].state;
  CHECK(r.machine.state_name(end) == "q_end");
  CHECK(r.machine.outgoing(end).empty());
  // !$ ?a ?b ?$
  CHECK(r.machine.num_states() == f.m.num_states() + 4);
  REQUIRE(r.specs.size() == 1);
  CHECK(r.specs[0].tuple.size() == 3);
  const auto dollar = *r.machine.find_letter("$c");
  CHECK(r.specs[0].language.accepts({1, dollar}));
  CHECK(r.specs[0].language.accepts({0, 1, 1, 1, dollar}));
  CHECK_FALSE(r.specs[0].language.accepts({0, dollar}));
  CHECK_FALSE(r.specs[0].language.accepts({0, 1, 1}));
  CHECK_NOTHROW(validate_bounded_spec(r.specs[0]));
}

TEST_CASE("control state to reach and deadlock constructions") {
  auto f = fixtures::cdp();
  const auto q = *f.m.find_state("q11");
  auto r = reduce_csr_to_reach(f.m, f.specs, q);
  REQUIRE(r.targets.size() == 1);
  CHECK(r.targets[0].contents == Contents(2));
  auto d = reduce_reach_to_deadlock(f.m, f.specs, q, Contents(2));
  CHECK(d.deadlock);
  CHECK(d.machine.num_channels() == 3);
  CHECK(d.specs.size() == 3);
  std::size_t loops = 0;
  for (const auto &t : d.machine.transitions())
    if (t.action.channel == 2) {
      ++loops;
      CHECK(t.src == t.dst);
    }
  CHECK(loops == d.machine.num_states() - 1);
}

TEST_CASE("counter duplication for boundedness and termination") {
  auto f = fixtures::twostate();
  ReductionInput in{f.m, f.specs, 0, {}};
  auto a = apply_reduction(ReductionKind::bounded_to_reach, in);
  REQUIRE(a.counter);
  const auto &c = a.counter->machine;
  CHECK(c.num_counters() == 4);
  CHECK(c.counter_name(0) == "x^1");
  CHECK(c.counter_name(3) == "y^2");
  REQUIRE(a.counter->targets.size() == 2);
  for (const auto &t : a.counter->targets) {
    CHECK(c.state_name(t.state) == "empty");
    std::uint32_t sum = 0;
    for (auto v : t.valuation) sum += v;
    CHECK(sum == 1);
    CHECK(t.valuation[0] + t.valuation[1] == 0);
  }
  auto b = apply_reduction(ReductionKind::term_to_reach, in);
  REQUIRE(b.counter->targets.size() == 1);
  CHECK(b.counter->targets[0].valuation == Valuation(4, 0));
  CHECK(print_reduction(b).find("# target empty") != std::string::npos);
}

TEST_CASE("reduced questions agree with the direct procedures") {
  std::size_t decisive = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    RandomParams p;
    p.finite = true;
    p.states = 3;
    p.channels = 1 + seed % 2;
    p.transitions = 6;
    auto r = gen_random(seed, p);
    auto b = normalize_machine(r.machine, r.specs);
    auto naive = fixtures::naive_reach(r.machine, r.specs, 30);
    const FifoConfig target = *naive.all.rbegin();
    ReductionInput in{r.machine, r.specs, target.state, target.contents};
    auto direct = decide_reachability(b, target.state, target.contents).answer;
    auto csr = decide_control_state(b, target.state).answer;
    auto bounded = decide_boundedness(b).answer;
    auto term = decide_termination(b).answer;
    CAPTURE(seed);
    CHECK(solve_artifact(apply_reduction(ReductionKind::reach_to_csr, in), 40, 200000) == direct);
    CHECK(solve_artifact(apply_reduction(ReductionKind::reach_to_deadlock, in), 40, 200000) == direct);
    CHECK(solve_artifact(apply_reduction(ReductionKind::csr_to_reach, in), 40, 200000) == csr);
    // the reduced questions ask for unboundedness and non-termination
    auto flip = [](Answer a) { return a == Answer::yes ? Answer::no : a == Answer::no ? Answer::yes : a; };
    CHECK(solve_artifact(apply_reduction(ReductionKind::bounded_to_reach, in), 0, 500000) == flip(bounded));
    CHECK(solve_artifact(apply_reduction(ReductionKind::term_to_reach, in), 0, 500000) == flip(term));
    decisive += direct != Answer::unknown;
  }
  CHECK(decisive == 30);
}

TEST_CASE("dollar augmentation") {
  auto f = fixtures::cdp();
  auto a = dollar_augment(f.m, f.specs);
  CHECK(a.machine.num_letters() == f.m.num_letters() + 2);
  std::size_t sends = 0;
  for (const auto &t : f.m.transitions()) sends += t.action.dir == Dir::send;
  CHECK(a.machine.transitions().size() == f.m.transitions().size() + sends);
  for (const auto &s : a.specs) CHECK_NOTHROW(validate_bounded_spec(s, false));
  const auto d1 = *a.machine.find_letter("$c1");
  const auto la = *a.machine.find_letter("a");
  // an unfinished word followed by $
  CHECK(a.specs[0].language.accepts({la, la, d1, d1}));
}
