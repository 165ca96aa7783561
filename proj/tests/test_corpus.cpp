#include <doctest.h>

#include <functional>

#include "ibfifo/corpus.hpp"
#include "ibfifo/engine.hpp"
#include "support.hpp"

using namespace ibfifo;

namespace {

std::vector<Dfa> guards(const Bundle &b) {
  std::vector<Dfa> g(b.machine.num_channels());
  for (const auto &s : b.specs) g[s.channel] = trim(minimize(s.language));
  return g;
}

bool brute(std::uint32_t n, const std::vector<std::array<int, 3>> &cl) {
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    bool all = true;
    for (const auto &c : cl) {
      bool any = false;
      for (int l : c) any = any || (((bits >> (std::abs(l) - 1)) & 1) == (l > 0 ? 1u : 0u));
      all = all && any;
    }
    if (all) return true;
  }
  return false;
}

// contents seen at a halting state of the Minsky gadget
std::set<std::string> halt_contents(const std::string &program, const std::string &halt) {
  auto p = parse_minsky(program);
  auto g = gen_minsky(p);
  auto ex = explore_fifo(g.machine, 60, 12);
  std::size_t h = std::find(p.states.begin(), p.states.end(), halt) - p.states.begin();
  std::set<std::string> out;
  for (const auto &c : ex.configs)
    if (c.state == g.state_of[h]) out.insert(word_string(g.machine, c.contents[0]));
  return out;
}

} // namespace

TEST_CASE("protocol generator") {
  auto b = gen_cdp();
  const auto &m = b.machine;
  CHECK(m.num_channels() == 2);
  CHECK(m.num_states() == 4);
  CHECK(m.init() == *m.find_state("q00"));
  CHECK(m.has_label(*m.find_state("q00"), parse_trace("c1!a", m)[0]));
  bool found = false;
  for (const auto &t : m.transitions())
    found = found || (m.state_name(t.src) == "q00" && action_string(m, t.action) == "c1!a" &&
                      m.state_name(t.dst) == "q10");
  CHECK(found);
  for (const auto &s : b.specs) CHECK_NOTHROW(validate_bounded_spec(s));
}

TEST_CASE("the protocol's c1 sends alternate and stay inside the tuple pattern") {
  auto b = gen_cdp();
  auto pattern = validate_bounded_spec(b.specs[0]).pattern;
  bool outside = false;
  std::function<void(StateId, Word &, std::size_t)> go = [&](StateId s, Word &w, std::size_t d) {
    if (!pattern.accepts(w) && !fixtures::in_prefix(pattern, w)) outside = true;
    if (d == 6 || outside) return;
    for (auto i : b.machine.outgoing(s)) {
      const auto &t = b.machine.transitions()[i];
      bool push = t.action.dir == Dir::send && t.action.channel == 0;
      if (push) w.push_back(t.action.letter);
      go(t.dst, w, d + 1);
      if (push) w.pop_back();
    }
  };
  Word w;
  go(b.machine.init(), w, 0);
  CHECK_FALSE(outside);
}

TEST_CASE("DIMACS round trip and brute force") {
  auto f = parse_dimacs("c example\np cnf 3 2\n1 -2 3 0\n-1 -1 -1 0\n");
  CHECK(f.num_vars == 3);
  REQUIRE(f.clauses.size() == 2);
  CHECK(f.clauses[1] == std::array<int, 3>{-1, -1, -1});
  auto again = parse_dimacs(print_dimacs(f));
  CHECK(again.num_vars == f.num_vars);
  CHECK(again.clauses == f.clauses);
  CHECK(brute_force_sat(f));
  CHECK_FALSE(brute_force_sat(CnfFormula{1, {{{1, 1, 1}}, {{-1, -1, -1}}}}));
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 2 0\n"), Error);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 2 3 0\n"), Error);
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto r = random_cnf(seed, 4, 6);
    CHECK(brute_force_sat(r) == brute(r.num_vars, r.clauses));
  }
}

TEST_CASE("3SAT gadgets") {
  for (bool flat : {false, true}) {
    auto sat = gen_3sat(CnfFormula{3, {{{1, -2, -3}}}}, flat, false);
    CHECK(sat.satisfiable);
    auto b = normalize_machine(sat.bundle.machine, sat.bundle.specs);
    CHECK(decide_reachability(b, sat.target, {{}}).answer == Answer::yes);
    auto g = guards(sat.bundle);
    auto ex = explore_fifo(sat.bundle.machine, 200, SIZE_MAX, &g);
    bool hit = false;
    std::size_t longest = 0;
    for (std::size_t i = 0; i < ex.configs.size(); ++i) {
      hit = hit || (ex.complete[i] && ex.configs[i].state == sat.target && ex.configs[i].contents[0].empty());
      longest = std::max(longest, ex.configs[i].contents[0].size());
    }
    CHECK(hit);
    CHECK(longest <= 4);

    auto unsat = gen_3sat(CnfFormula{1, {{{1, 1, 1}}, {{-1, -1, -1}}}}, flat, false);
    CHECK_FALSE(unsat.satisfiable);
    auto ub = normalize_machine(unsat.bundle.machine, unsat.bundle.specs);
    CHECK(decide_reachability(ub, unsat.target, {{}}).answer == Answer::no);
  }
}

TEST_CASE("Minsky gadgets") {
  CHECK(halt_contents("q0: inc x1 goto h\nh: halt\n", "h") == std::set<std::string>{"$a#&"});
  CHECK(halt_contents("q0: ifz x1 goto h else dec goto h\nh: halt\n", "h") == std::set<std::string>{"$#&"});
  CHECK(halt_contents("h: halt\n", "h") == std::set<std::string>{"$#&"});
  CHECK(halt_contents("q0: inc x2 goto q1\nq1: inc x1 goto h\nh: halt\n", "h") == std::set<std::string>{"$a#b&"});
  CHECK(halt_contents("q0: inc x2 goto q1\nq1: ifz x2 goto q0 else dec goto h\nh: halt\n", "h") ==
        std::set<std::string>{"$#&"});
}

TEST_CASE("Minsky interpreter and program text") {
  auto p = parse_minsky("q0: inc x1 goto q1\nq1: ifz x1 goto q0 else dec goto h\nh: halt\n");
  CHECK(p.states.size() == 3);
  auto run = interpret_minsky(p, 4);
  CHECK(run.halted);
  CHECK(run.max_counter == 1);
  auto again = parse_minsky(print_minsky(p));
  CHECK(again.states == p.states);
  CHECK_THROWS_AS(parse_minsky("q0: inc x3 goto q0\n"), Error);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto r = random_minsky(seed, 6, 4);
    auto ir = interpret_minsky(r, 4);
    CHECK(ir.halted);
    CHECK_FALSE(ir.exceeded);
  }
}

TEST_CASE("random bundles") {
  RandomParams p;
  p.states = 4;
  p.channels = 2;
  CHECK(print_machine(gen_random(9, p).machine) == print_machine(gen_random(9, p).machine));
  CHECK(print_machine(gen_random(9, p).machine) != print_machine(gen_random(10, p).machine));
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto b = gen_random(seed, p);
    for (const auto &s : b.specs) CHECK_NOTHROW(validate_bounded_spec(s));
    std::vector<ValidatedSpec> v;
    for (const auto &s : b.specs) v.push_back(validate_bounded_spec(s));
    CHECK(check_normal_form(b.machine, v).ok);
    CHECK(check_normal_form(normalize_machine(b.machine, b.specs)).ok);
  }
}
