#include <doctest.h>

#include <functional>
#include <set>

#include "ibfifo/counterize.hpp"
#include "ibfifo/engine.hpp"
#include "support.hpp"

using namespace ibfifo;

namespace {

CounterIndexing single_indexing(const fixtures::Fixture &f) {
  std::vector<ValidatedSpec> v;
  for (const auto &s : f.specs) v.push_back(validate_bounded_spec(s));
  return make_indexing(v, f.m.num_letters());
}

Word word(const FifoMachine &m, const std::string &s) { return parse_word(m, 0, s); }

std::set<LastSent> pairs_set(const CounterIndexing &idx, const Contents &w) {
  auto p = pairs_of(idx, w);
  return {p.begin(), p.end()};
}

// every control path of the counter machine up to `depth`, in counter semantics, with the
// matching FIFO path along the same transition indices
void walk(const CounterMachine &c, const FifoMachine &m, std::size_t depth,
          const std::function<void(const CounterConfig &, const FifoConfig &, const Trace &)> &visit) {
  std::function<void(const CounterConfig &, const FifoConfig &, Trace &, std::size_t)> go =
      [&](const CounterConfig &cc, const FifoConfig &fc, Trace &t, std::size_t d) {
        visit(cc, fc, t);
        if (d == depth) return;
        for (auto i : c.outgoing(cc.state)) {
          const auto &ct = c.transitions()[i];
          if (!zero_tests_hold(ct.action, cc.valuation)) continue;
          if (ct.action.op == CounterOp::dec && cc.valuation[ct.action.counter] == 0) continue;
          const auto &ft = m.transitions()[i];
          const auto &w = fc.contents[ft.action.channel];
          bool fifo_ok = ft.action.dir == Dir::send || (!w.empty() && w.front() == ft.action.letter);
          REQUIRE(fifo_ok);
          t.push_back(ft.action);
          go(counter_fire(c, cc, i), fifo_fire(m, fc, i), t, d + 1);
          t.pop_back();
        }
      };
  Trace t;
  go(c.initial_config(), m.initial_config(), t, 0);
}

LastSent last_sent(const Trace &t, std::size_t channels) {
  LastSent a(channels, kBottom);
  for (const auto &x : t)
    if (x.dir == Dir::send) a[x.channel] = x.letter;
  return a;
}

} // namespace

TEST_CASE("counter machine of the worked example") {
  auto f = fixtures::twostate();
  auto b = normalize_machine(f.m, f.specs);
  auto cb = build_counter_machine(b);
  const auto &c = cb.machine;
  CHECK(c.num_counters() == 2);
  CHECK(c.counter_name(0) == "x");
  CHECK(c.counter_name(1) == "y");
  CHECK(c.num_states() == 8);
  int dec_y = 0;
  for (const auto &t : c.transitions()) {
    if (t.action.op == CounterOp::dec && t.action.counter == 1) {
      ++dec_y;
      CHECK(t.action.zero == std::vector<CounterId>{0});
    } else {
      CHECK(t.action.zero.empty());
    }
  }
  CHECK(dec_y == 3);
  // the zero-tested edge leaves a state with x = 1 blocked
  for (const auto &t : c.transitions())
    if (!t.action.zero.empty()) {
      Valuation v{1, 1};
      CHECK_THROWS_AS(counter_step(c, {t.src, v}, t.action), Error);
    }
}

TEST_CASE("letter-bounded tuple gives one counter per word and lower zero sets") {
  auto m = parse_machine("machine m\nchannels c\nalphabet c: a b\nstates q\ninit q\n"
                         "trans q c!a q\ntrans q c!b q\ntrans q c?a q\ntrans q c?b q\n");
  auto b = normalize_machine(m, {make_spec(m, 0, {"a", "b"}, "a*b*")});
  auto cb = build_counter_machine(b);
  CHECK(cb.machine.num_counters() == 2);
  for (const auto &t : cb.machine.transitions()) {
    if (t.action.op == CounterOp::inc) CHECK(t.action.zero.empty());
    if (t.action.op == CounterOp::dec && t.action.counter == 0) CHECK(t.action.zero.empty());
    if (t.action.op == CounterOp::dec && t.action.counter == 1) CHECK(t.action.zero == std::vector<CounterId>{0});
  }
}

TEST_CASE("contents to valuation") {
  auto f = fixtures::twostate();
  auto b = normalize_machine(f.m, f.specs);
  auto idx = build_counter_machine(b).idx;
  CHECK(contents_to_valuation({{1, 2, 2}}, idx) == Valuation{1, 2});
  CHECK(contents_to_valuation({{}}, idx) == Valuation{0, 0});
  auto e = fixtures::four_letters();
  auto ei = single_indexing(e);
  CHECK(contents_to_valuation({word(e.m, "a2a3a1a2")}, ei) == Valuation{4, 0});
}

TEST_CASE("Pairs and goodness") {
  auto e = fixtures::four_letters();
  auto idx = single_indexing(e);
  const LetterId a1 = 0, a2 = 1, a3 = 2, a4 = 3;
  CHECK(pairs_set(idx, {word(e.m, "a2a3")}) == std::set<LastSent>{{a3}});
  CHECK(pairs_set(idx, {{}}) == std::set<LastSent>{{a1}, {a2}, {a3}, {a4}, {kBottom}});
  CHECK_FALSE(is_good(idx, 0, a1, word(e.m, "a4a1")));
  CHECK_FALSE(is_good(idx, 0, a3, word(e.m, "a3a1")));
  CHECK(is_good(idx, 0, a1, word(e.m, "a3a1")));
}

TEST_CASE("valuation to contents") {
  auto e = fixtures::four_letters();
  auto idx = single_indexing(e);
  auto w = valuation_to_contents({4, 0}, {1}, idx);
  REQUIRE(w);
  CHECK((*w)[0] == word(e.m, "a2a3a1a2"));
  auto u = valuation_to_contents({2, 1}, {3}, idx);
  REQUIRE(u);
  CHECK((*u)[0] == word(e.m, "a2a3a4"));
  CHECK_FALSE(valuation_to_contents({3, 1}, {2}, idx));
  auto z = valuation_to_contents({0, 0}, {kBottom}, idx);
  REQUIRE(z);
  CHECK((*z)[0].empty());
}

TEST_CASE("trace image and preimage") {
  auto f = fixtures::twostate();
  auto b = normalize_machine(f.m, f.specs);
  auto cb = build_counter_machine(b);
  const auto &m = b.machine();
  auto sigma = parse_trace("c!a1 c!a2 c?a1", m);
  CounterTrace tau{{CounterOp::inc, 0, {}}, {CounterOp::inc, 0, {}}, {CounterOp::dec, 0, {}}};
  CHECK(trace_image(sigma, cb.idx) == tau);
  auto pre = trace_preimage(tau, cb.idx, b.vautomaton());
  CHECK(pre.status == Preimage::Status::unique);
  CHECK(pre.trace == sigma);
  CHECK(trace_image({}, cb.idx).empty());
  auto empty = trace_preimage({}, cb.idx, b.vautomaton());
  CHECK(empty.status == Preimage::Status::unique);
  CHECK(empty.trace.empty());
}

TEST_CASE("zero-restricted traces") {
  CHECK_FALSE(is_zero_restricted({{CounterOp::dec, 1, {0}}, {CounterOp::inc, 0, {}}}));
  CHECK(is_zero_restricted({{CounterOp::inc, 0, {}}, {CounterOp::dec, 0, {}}, {CounterOp::dec, 1, {0}}}));
  auto f = fixtures::twostate();
  auto b = normalize_machine(f.m, f.specs);
  auto cb = build_counter_machine(b);
  std::size_t paths = 0;
  std::function<void(StateId, CounterTrace &)> go = [&](StateId s, CounterTrace &t) {
    ++paths;
    CHECK(is_zero_restricted(t));
    if (t.size() == 10) return;
    for (auto i : cb.machine.outgoing(s)) {
      t.push_back(cb.machine.transitions()[i].action);
      go(cb.machine.transitions()[i].dst, t);
      t.pop_back();
    }
  };
  CounterTrace t;
  go(cb.machine.init(), t);
  CHECK(paths > 500);
}

TEST_CASE("round trips between contents and valuations") {
  std::vector<std::pair<CounterIndexing, std::size_t>> cases;
  auto e = fixtures::four_letters();
  cases.emplace_back(single_indexing(e), 1);
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
      for (const auto &w : enumerate_words(idx.infix[c], 8)) {
        for (auto a : letters) {
          if (!is_good(idx, c, a, w)) continue;
          Valuation v(idx.num_counters, 0);
          for (auto x : w) ++v[idx.counter_of(x)];
          auto back = valuation_to_word(idx, c, v.data(), a);
          REQUIRE(back);
          CHECK(*back == w);
        }
        if (w.empty()) {
          Valuation v(idx.num_counters, 0);
          auto back = valuation_to_word(idx, c, v.data(), kBottom);
          REQUIRE(back);
          CHECK(back->empty());
        }
      }
      // valuations of the channel's counters with sum <= 8
      const auto &xs = idx.counter[c];
      std::vector<std::uint32_t> cur(xs.size(), 0);
      std::function<void(std::size_t, std::uint32_t)> gen = [&](std::size_t i, std::uint32_t left) {
        if (i == xs.size()) {
          Valuation v(idx.num_counters, 0);
          for (std::size_t k = 0; k < xs.size(); ++k) v[xs[k]] = cur[k];
          std::vector<LetterId> lasts = letters;
          lasts.push_back(kBottom);
          for (auto a : lasts) {
            auto w = valuation_to_word(idx, c, v.data(), a);
            if (!w) continue;
            Valuation back(idx.num_counters, 0);
            for (auto x : *w) ++back[idx.counter_of(x)];
            CHECK(back == v);
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
}

TEST_CASE("counter runs simulate and retrieve FIFO runs") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    RandomParams p;
    p.channels = 1 + seed % 2;
    auto r = gen_random(seed, p);
    auto b = normalize_machine(r.machine, r.specs);
    auto cb = build_counter_machine(b);
    const auto &m = b.machine();
    walk(cb.machine, m, 8, [&](const CounterConfig &cc, const FifoConfig &fc, const Trace &t) {
      CHECK(cc.state == fc.state);
      CHECK(contents_to_valuation(fc.contents, cb.idx) == cc.valuation);
      auto a = last_sent(t, m.num_channels());
      CHECK(in_pairs(cb.idx, fc.contents, a));
      auto back = valuation_to_contents(cc.valuation, a, cb.idx);
      REQUIRE(back);
      CHECK(*back == fc.contents);
      CHECK(trace_image(t, cb.idx).size() == t.size());
    });
  }
}
