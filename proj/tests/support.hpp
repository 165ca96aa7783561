#pragma once

#include <deque>
#include <set>
#include <string>
#include <vector>

#include "ibfifo/corpus.hpp"
#include "ibfifo/normalize.hpp"
#include "ibfifo/text_format.hpp"

namespace fixtures {

using namespace ibfifo;

inline const char *kTwoState = R"(machine twostate
channels c
alphabet c: a b
states q0 q1
init q0
trans q0 c!a q0
trans q0 c!b q0
trans q0 c?a q0
trans q0 c?b q1
trans q1 c?b q1
)";

inline const char *kTwoStateBounds = "mode ib\nchannel c: tuple ab b ; lang (ab)*bb*\n";

struct Fixture {
  FifoMachine m;
  std::vector<BoundedLangSpec> specs;
};

inline Fixture twostate() {
  auto m = parse_machine(kTwoState);
  auto b = parse_bounds(kTwoStateBounds, m);
  return {m, b.specs};
}

inline Fixture cdp() {
  auto b = gen_cdp();
  return {b.machine, b.specs};
}

// one channel, letters a1..a4, L = (a1a2a3)*(a4)*
inline Fixture four_letters() {
  auto m = parse_machine("machine e\nchannels c\nalphabet c: a1 a2 a3 a4\nstates q\ninit q\n");
  return {m, {make_spec(m, 0, {"a1a2a3", "a4"}, "(a1 a2 a3)* a4*")}};
}

inline Fixture single(const std::string &machine, const std::string &bounds) {
  auto m = parse_machine(machine);
  return {m, parse_bounds(bounds, m).specs};
}

// states of d from which a final state is reachable
inline std::vector<char> live_states(const Dfa &d) {
  std::vector<char> live(d.size(), 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::uint32_t s = 0; s < d.size(); ++s) {
      if (live[s]) continue;
      bool l = d.is_final(s);
      for (Symbol a = 0; a < d.num_symbols() && !l; ++a) {
        auto t = d.next(s, a);
        l = t >= 0 && live[t];
      }
      if (l) live[s] = changed = true;
    }
  }
  return live;
}

inline bool in_prefix(const Dfa &d, const Word &u) {
  auto s = d.run(u);
  return s >= 0 && live_states(d)[s];
}

// straightforward BFS over the FIFO semantics; a send is allowed while the send projection
// can still be completed to a word of its language
struct NaiveReach {
  std::set<FifoConfig> all;
  std::set<FifoConfig> complete;
};

inline NaiveReach naive_reach(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs, std::size_t depth) {
  struct Node {
    FifoConfig cfg;
    std::vector<Word> sent;
  };
  std::vector<const Dfa *> lang(m.num_channels(), nullptr);
  std::vector<std::vector<char>> live(m.num_channels());
  for (const auto &s : specs) {
    lang[s.channel] = &s.language;
    live[s.channel] = live_states(s.language);
  }
  auto ok_prefix = [&](ChannelId c, const Word &w) {
    if (!lang[c]) return true;
    auto s = lang[c]->run(w);
    return s >= 0 && live[c][s];
  };
  auto done = [&](const std::vector<Word> &sent) {
    for (ChannelId c = 0; c < m.num_channels(); ++c)
      if (lang[c] && !lang[c]->accepts(sent[c])) return false;
    return true;
  };
  NaiveReach out;
  std::set<std::pair<FifoConfig, std::vector<Word>>> seen;
  std::vector<Node> layer{{m.initial_config(), std::vector<Word>(m.num_channels())}};
  seen.insert({layer[0].cfg, layer[0].sent});
  for (std::size_t d = 0;; ++d) {
    std::vector<Node> next;
    for (const auto &n : layer) {
      out.all.insert(n.cfg);
      if (done(n.sent)) out.complete.insert(n.cfg);
      if (d == depth) continue;
      for (const auto &t : m.transitions()) {
        if (t.src != n.cfg.state) continue;
        Node k = n;
        k.cfg.state = t.dst;
        auto &w = k.cfg.contents[t.action.channel];
        if (t.action.dir == Dir::send) {
          w.push_back(t.action.letter);
          k.sent[t.action.channel].push_back(t.action.letter);
          if (!ok_prefix(t.action.channel, k.sent[t.action.channel])) continue;
        } else {
          if (w.empty() || w.front() != t.action.letter) continue;
          w.erase(w.begin());
        }
        if (seen.insert({k.cfg, k.sent}).second) next.push_back(std::move(k));
      }
    }
    if (next.empty() || d == depth) break;
    layer = std::move(next);
  }
  return out;
}

} // namespace fixtures
