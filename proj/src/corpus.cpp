#include "ibfifo/corpus.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "ibfifo/engine.hpp"
#include "ibfifo/error.hpp"
#include "ibfifo/normalize.hpp"
#include "ibfifo/text_format.hpp"

namespace ibfifo {

namespace {

FifoAction snd(ChannelId c, LetterId a) { return {Dir::send, c, a}; }
FifoAction rcv(ChannelId c, LetterId a) { return {Dir::receive, c, a}; }

// src -a1-> fresh -a2-> ... -> dst
class ChainBuilder {
public:
  explicit ChainBuilder(FifoMachineBuilder &b) : b_(b) {}
  void chain(StateId src, const std::vector<FifoAction> &acts, StateId dst) {
    StateId cur = src;
    for (std::size_t i = 0; i + 1 < acts.size(); ++i) {
      StateId nxt = b_.add_state(fresh(src));
      b_.add_transition(cur, acts[i], nxt);
      cur = nxt;
    }
    b_.add_transition(cur, acts.back(), dst);
  }
  std::string fresh(StateId base) { return b_.peek().state_name(base) + "~" + std::to_string(++n_); }

private:
  FifoMachineBuilder &b_;
  std::size_t n_ = 0;
};

} // namespace

Bundle gen_cdp() {
  FifoMachineBuilder b("cdp");
  auto c1 = b.add_channel("c1"), c2 = b.add_channel("c2");
  auto a = b.add_letter(c1, "a"), bb = b.add_letter(c1, "b"), e = b.add_letter(c2, "e");
  StateId q[2][2];
  for (int i : {0, 1})
    for (int j : {0, 1}) q[i][j] = b.add_state("q" + std::to_string(i) + std::to_string(j));
  b.set_init(q[0][0]);
  for (int j : {0, 1}) {
    b.add_transition(q[0][j], snd(c1, a), q[1][j]);
    b.add_transition(q[1][j], snd(c1, bb), q[0][j]);
    b.add_transition(q[1][j], rcv(c2, e), q[0][j]);
  }
  for (int i : {0, 1}) {
    b.add_transition(q[i][0], rcv(c1, a), q[i][1]);
    b.add_transition(q[i][1], rcv(c1, bb), q[i][0]);
    b.add_transition(q[i][1], snd(c2, e), q[i][0]);
  }
  Bundle out{b.build(), {}};
  out.specs.push_back(make_spec(out.machine, c1, {"ab", "a", "ab"}, "(ab)*(a|eps)(ab)*"));
  out.specs.push_back(make_spec(out.machine, c2, {"e"}, "e*"));
  return out;
}

// --- 3SAT ----------------------------------------------------------------------

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula f;
  std::istringstream in{std::string(text)};
  bool header = false;
  std::vector<int> cur;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == 'c' || first[0] == '%') continue;
    if (first == "p") {
      std::string fmt;
      long n = -1, m = -1;
      ls >> fmt >> n >> m;
      if (fmt != "cnf" || n < 0 || m < 0)
        throw Error(Errc::syntax, "dimacs line " + std::to_string(line_no) + ": expected 'p cnf <vars> <clauses>'");
      f.num_vars = static_cast<std::uint32_t>(n);
      header = true;
      continue;
    }
    if (!header) throw Error(Errc::syntax, "dimacs line " + std::to_string(line_no) + ": clause before header");
    std::istringstream toks(line);
    for (long lit; toks >> lit;) {
      if (lit == 0) {
        if (cur.size() != 3)
          throw Error(Errc::syntax, "dimacs line " + std::to_string(line_no) + ": clause with " +
                                        std::to_string(cur.size()) + " literals, expected 3");
        f.clauses.push_back({cur[0], cur[1], cur[2]});
        cur.clear();
        continue;
      }
      if (std::labs(lit) > static_cast<long>(f.num_vars))
        throw Error(Errc::syntax, "dimacs line " + std::to_string(line_no) + ": literal out of range");
      cur.push_back(static_cast<int>(lit));
    }
    if (toks.fail() && !toks.eof())
      throw Error(Errc::syntax, "dimacs line " + std::to_string(line_no) + ": expected integers");
  }
  if (!cur.empty()) throw Error(Errc::syntax, "dimacs: unterminated clause");
  if (!header) throw Error(Errc::syntax, "dimacs: missing header");
  return f;
}

std::string print_dimacs(const CnfFormula &f) {
  std::ostringstream o;
  o << "p cnf " << f.num_vars << ' ' << f.clauses.size() << "\n";
  for (const auto &c : f.clauses) o << c[0] << ' ' << c[1] << ' ' << c[2] << " 0\n";
  return o.str();
}

bool brute_force_sat(const CnfFormula &f) {
  if (f.num_vars > 24) throw Error(Errc::limit_exceeded, "too many variables for brute force");
  for (std::uint32_t mask = 0; mask < (1u << f.num_vars); ++mask) {
    bool all = true;
    for (const auto &c : f.clauses) {
      bool any = false;
      for (int lit : c) {
        bool val = (mask >> (std::abs(lit) - 1)) & 1u;
        any = any || (lit > 0 ? val : !val);
      }
      if (!any) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

CnfFormula random_cnf(std::uint64_t seed, std::uint32_t n, std::uint32_t m) {
  std::mt19937_64 rng(seed);
  CnfFormula f;
  f.num_vars = n;
  std::uniform_int_distribution<int> var(1, static_cast<int>(n));
  for (std::uint32_t i = 0; i < m; ++i) {
    std::array<int, 3> c{};
    for (auto &lit : c) lit = var(rng) * (rng() & 1 ? 1 : -1);
    f.clauses.push_back(c);
  }
  return f;
}

SatGadget gen_3sat(const CnfFormula &f, bool flat, bool unbounded_variant) {
  if (f.num_vars == 0) throw Error(Errc::invalid_machine, "formula without variables");
  const auto n = f.num_vars;
  const auto m = static_cast<std::uint32_t>(f.clauses.size());
  FifoMachineBuilder b(flat ? "sat_flat" : "sat");
  auto c = b.add_channel("c");
  std::vector<LetterId> pos(n + 1), neg(n + 1), sigma;
  for (std::uint32_t k = 1; k <= n; ++k) {
    pos[k] = b.add_letter(c, "l" + std::to_string(k));
    neg[k] = b.add_letter(c, "nl" + std::to_string(k));
    sigma.push_back(pos[k]);
    sigma.push_back(neg[k]);
  }
  auto hash = b.add_letter(c, "#");
  auto lit = [&](int l) { return l > 0 ? pos[l] : neg[-l]; };
  ChainBuilder ch(b);

  std::vector<StateId> v(n + 1);
  for (std::uint32_t k = 0; k <= n; ++k) v[k] = b.add_state("v" + std::to_string(k));
  b.set_init(v[0]);
  for (std::uint32_t k = 1; k <= n; ++k) {
    b.add_transition(v[k - 1], snd(c, pos[k]), v[k]);
    b.add_transition(v[k - 1], snd(c, neg[k]), v[k]);
  }
  std::vector<StateId> s(m + 2);
  for (std::uint32_t i = 1; i <= m + 1; ++i) s[i] = b.add_state(i <= m ? "s" + std::to_string(i) : "clean");
  b.add_transition(v[n], snd(c, hash), s[1]);

  for (std::uint32_t i = 1; i <= m; ++i) {
    const auto &cl = f.clauses[i - 1];
    if (!flat) {
      for (auto a : sigma) ch.chain(s[i], {rcv(c, a), snd(c, a)}, s[i]);
      for (int j = 0; j < 3; ++j) {
        auto d = b.add_state("s" + std::to_string(i) + "d" + std::to_string(j + 1));
        ch.chain(s[i], {rcv(c, lit(cl[j])), snd(c, lit(cl[j]))}, d);
        for (auto a : sigma) ch.chain(d, {rcv(c, a), snd(c, a)}, d);
        ch.chain(d, {rcv(c, hash), snd(c, hash)}, s[i + 1]);
      }
      continue;
    }
    for (int j = 0; j < 3; ++j) {
      const auto want = static_cast<std::uint32_t>(std::abs(cl[j]));
      StateId cur = s[i];
      for (std::uint32_t k = 1; k <= n; ++k) {
        auto nxt = b.add_state("s" + std::to_string(i) + "b" + std::to_string(j + 1) + "_" + std::to_string(k));
        std::vector<LetterId> opts;
        if (k == want) opts = {lit(cl[j])};
        else opts = {pos[k], neg[k]};
        for (auto a : opts) ch.chain(cur, {rcv(c, a), snd(c, a)}, nxt);
        cur = nxt;
      }
      ch.chain(cur, {rcv(c, hash), snd(c, hash)}, s[i + 1]);
    }
  }

  StateId target;
  if (!flat) {
    for (auto a : sigma) b.add_transition(s[m + 1], rcv(c, a), s[m + 1]);
    b.add_transition(s[m + 1], rcv(c, hash), s[m + 1]);
    target = s[m + 1];
  } else {
    // optional receives of l1 nl1 ... ln nln, then #
    std::vector<StateId> cs(2 * n + 1);
    cs[0] = s[m + 1];
    for (std::uint32_t t = 1; t <= 2 * n; ++t) cs[t] = b.add_state("clean" + std::to_string(t));
    target = b.add_state("done");
    for (std::uint32_t t = 0; t <= 2 * n; ++t) {
      for (std::uint32_t u = t; u < 2 * n; ++u) b.add_transition(cs[t], rcv(c, sigma[u]), cs[u + 1]);
      b.add_transition(cs[t], rcv(c, hash), target);
    }
  }
  if (unbounded_variant) b.add_transition(target, snd(c, hash), target);

  SatGadget out;
  out.bundle.machine = b.build();
  out.target = target;
  std::vector<std::string> tuple;
  std::string block;
  for (std::uint32_t k = 1; k <= n; ++k) {
    tuple.push_back("l" + std::to_string(k));
    tuple.push_back("nl" + std::to_string(k));
    block += "l" + std::to_string(k) + "* nl" + std::to_string(k) + "* ";
  }
  tuple.push_back("#");
  block += "#*";
  std::vector<std::string> full;
  std::string regex;
  for (std::uint32_t i = 0; i <= m; ++i) {
    full.insert(full.end(), tuple.begin(), tuple.end());
    regex += (i ? " " : "") + block;
  }
  out.bundle.specs.push_back(make_spec(out.bundle.machine, c, full, regex));
  out.satisfiable = brute_force_sat(f);
  return out;
}

// --- Minsky machines --------------------------------------------------------------

MinskyProgram parse_minsky(std::string_view text) {
  MinskyProgram p;
  std::map<std::string, std::uint32_t> ids;
  auto id = [&](const std::string &name) {
    auto [it, fresh] = ids.emplace(name, static_cast<std::uint32_t>(p.states.size()));
    if (fresh) {
      p.states.push_back(name);
      p.rules.emplace_back();
    }
    return it->second;
  };
  auto counter = [](const std::string &t, std::size_t line) -> std::uint32_t {
    if (t == "x1") return 0;
    if (t == "x2") return 1;
    throw Error(Errc::syntax, "minsky line " + std::to_string(line) + ": counter must be x1 or x2");
  };
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> t;
    for (std::string w; ls >> w;) t.push_back(w);
    if (t.empty()) continue;
    auto bad = [&] {
      throw Error(Errc::syntax, "minsky line " + std::to_string(line_no) +
                                    ": expected '<q>: inc xJ goto <q>' or '<q>: ifz xJ goto <q> else dec goto <q>'");
    };
    if (t[0].size() < 2 || t[0].back() != ':') bad();
    auto src = id(t[0].substr(0, t[0].size() - 1));
    MinskyRule r;
    if (t.size() == 4 && t[1] == "inc" && t[3] != "goto") bad();
    if (t.size() == 5 && t[1] == "inc" && t[3] == "goto") {
      r.kind = MinskyRule::Kind::inc;
      r.counter = counter(t[2], line_no);
      r.next = id(t[4]);
    } else if (t.size() == 9 && t[1] == "ifz" && t[3] == "goto" && t[5] == "else" && t[6] == "dec" &&
               t[7] == "goto") {
      r.kind = MinskyRule::Kind::test_dec;
      r.counter = counter(t[2], line_no);
      r.next = id(t[4]);
      r.dec_next = id(t[8]);
    } else if (t.size() == 2 && t[1] == "halt") {
      continue;
    } else {
      bad();
    }
    p.rules[src].push_back(r);
  }
  if (p.states.empty()) throw Error(Errc::syntax, "minsky program without states");
  return p;
}

std::string print_minsky(const MinskyProgram &p) {
  std::ostringstream o;
  for (std::uint32_t q = 0; q < p.states.size(); ++q) {
    if (p.rules[q].empty()) o << p.states[q] << ": halt\n";
    for (const auto &r : p.rules[q]) {
      o << p.states[q] << ": ";
      if (r.kind == MinskyRule::Kind::inc)
        o << "inc x" << r.counter + 1 << " goto " << p.states[r.next] << "\n";
      else
        o << "ifz x" << r.counter + 1 << " goto " << p.states[r.next] << " else dec goto " << p.states[r.dec_next]
          << "\n";
    }
  }
  return o.str();
}

MinskyRun interpret_minsky(const MinskyProgram &p, std::uint32_t bound, std::size_t max_configs) {
  MinskyRun run;
  run.reached.assign(p.states.size(), 0);
  using Cfg = std::array<std::uint32_t, 3>;
  std::set<Cfg> seen{{p.init, 0, 0}};
  std::deque<Cfg> queue{{p.init, 0, 0}};
  while (!queue.empty()) {
    auto [q, x1, x2] = queue.front();
    queue.pop_front();
    run.reached[q] = 1;
    run.max_counter = std::max({run.max_counter, x1, x2});
    if (p.rules[q].empty()) run.halted = true;
    for (const auto &r : p.rules[q]) {
      Cfg nxt{0, x1, x2};
      auto &x = nxt[1 + r.counter];
      if (r.kind == MinskyRule::Kind::inc) {
        nxt[0] = r.next;
        if (++x > bound) {
          run.exceeded = true;
          continue;
        }
      } else if (x == 0) {
        nxt[0] = r.next;
      } else {
        nxt[0] = r.dec_next;
        --x;
      }
      if (seen.insert(nxt).second) {
        if (seen.size() > max_configs) throw Error(Errc::limit_exceeded, "minsky interpreter budget exceeded");
        queue.push_back(nxt);
      }
    }
  }
  return run;
}

MinskyProgram random_minsky(std::uint64_t seed, std::uint32_t max_rules, std::uint32_t bound) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 10'000; ++attempt) {
    const auto r = 1 + static_cast<std::uint32_t>(rng() % std::max<std::uint32_t>(max_rules, 1));
    MinskyProgram p;
    for (std::uint32_t i = 0; i < r; ++i) p.states.push_back("q" + std::to_string(i));
    p.states.push_back("halt");
    p.rules.resize(r + 1);
    for (std::uint32_t i = 0; i < r; ++i) {
      MinskyRule rule;
      rule.kind = rng() % 2 ? MinskyRule::Kind::inc : MinskyRule::Kind::test_dec;
      rule.counter = static_cast<std::uint32_t>(rng() % 2);
      rule.next = static_cast<std::uint32_t>(rng() % (r + 1));
      rule.dec_next = static_cast<std::uint32_t>(rng() % (r + 1));
      p.rules[i].push_back(rule);
    }
    auto run = interpret_minsky(p, bound);
    if (run.halted && !run.exceeded) return p;
  }
  throw Error(Errc::limit_exceeded, "no bounded program found");
}

MinskyGadget gen_minsky(const MinskyProgram &p) {
  FifoMachineBuilder b("minsky");
  auto c = b.add_channel("c");
  auto a = b.add_letter(c, "a"), bl = b.add_letter(c, "b"), hs = b.add_letter(c, "#"),
       dl = b.add_letter(c, "$"), am = b.add_letter(c, "&");
  MinskyGadget out;
  auto start = b.add_state("start");
  b.set_init(start);
  for (const auto &name : p.states) out.state_of.push_back(b.add_state(name));
  ChainBuilder ch(b);
  ch.chain(start, {snd(c, dl), snd(c, hs), snd(c, am)}, out.state_of[p.init]);
  auto copy_loop = [&](StateId s, LetterId x) { ch.chain(s, {rcv(c, x), snd(c, x)}, s); };
  auto fresh = [&](StateId base) { return b.add_state(ch.fresh(base)); };
  for (std::uint32_t q = 0; q < p.states.size(); ++q) {
    const StateId src = out.state_of[q];
    for (const auto &r : p.rules[q]) {
      const StateId dst = out.state_of[r.next];
      auto t2 = fresh(src);
      ch.chain(src, {rcv(c, dl), snd(c, dl)}, t2);
      if (r.kind == MinskyRule::Kind::inc) {
        copy_loop(t2, a);
        auto t6 = fresh(src);
        if (r.counter == 0) ch.chain(t2, {rcv(c, hs), snd(c, a), snd(c, hs)}, t6);
        else ch.chain(t2, {rcv(c, hs), snd(c, hs)}, t6);
        copy_loop(t6, bl);
        if (r.counter == 0) ch.chain(t6, {rcv(c, am), snd(c, am)}, dst);
        else ch.chain(t6, {rcv(c, am), snd(c, bl), snd(c, am)}, dst);
        continue;
      }
      const StateId dec_dst = out.state_of[r.dec_next];
      if (r.counter == 0) {
        // head after $: a decrements, # means zero
        auto t3 = fresh(src), t5 = fresh(src), z = fresh(src);
        b.add_transition(t2, rcv(c, a), t3);
        copy_loop(t3, a);
        ch.chain(t3, {rcv(c, hs), snd(c, hs)}, t5);
        copy_loop(t5, bl);
        ch.chain(t5, {rcv(c, am), snd(c, am)}, dec_dst);
        ch.chain(t2, {rcv(c, hs), snd(c, hs)}, z);
        copy_loop(z, bl);
        ch.chain(z, {rcv(c, am), snd(c, am)}, dst);
      } else {
        // head after #: b decrements, & means zero
        copy_loop(t2, a);
        auto t4 = fresh(src), t5 = fresh(src);
        ch.chain(t2, {rcv(c, hs), snd(c, hs)}, t4);
        b.add_transition(t4, rcv(c, bl), t5);
        copy_loop(t5, bl);
        ch.chain(t5, {rcv(c, am), snd(c, am)}, dec_dst);
        ch.chain(t4, {rcv(c, am), snd(c, am)}, dst);
      }
    }
  }
  out.machine = b.build();
  return out;
}

// --- random bundles -----------------------------------------------------------------

namespace {

// states reached from init along t (all resolutions)
std::set<StateId> states_after(const FifoMachine &m, const Trace &t) {
  std::set<StateId> cur{m.init()};
  for (const auto &a : t) {
    std::set<StateId> nxt;
    for (auto s : cur)
      for (auto id : m.outgoing(s))
        if (m.transitions()[id].action == a) nxt.insert(m.transitions()[id].dst);
    cur = std::move(nxt);
  }
  return cur;
}

} // namespace

Bundle gen_random(std::uint64_t seed, const RandomParams &params) {
  if (params.states == 0 || params.channels == 0 || params.letters == 0 || params.max_word_len == 0 ||
      params.states > 16 || params.channels > 4 || params.letters > 6)
    throw Error(Errc::invalid_machine, "random parameters out of range");
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  for (int attempt = 0; attempt < 1000; ++attempt) {
    FifoMachineBuilder b("rand" + std::to_string(seed));
    std::vector<std::vector<std::vector<std::string>>> words(params.channels);
    std::vector<std::string> regex(params.channels);
    std::vector<std::vector<LetterId>> letters(params.channels);
    char next = 'a';
    for (std::uint32_t c = 0; c < params.channels; ++c) {
      b.add_channel("c" + std::to_string(c + 1));
      std::vector<std::string> names;
      for (std::uint32_t k = 0; k < params.letters; ++k) {
        names.push_back(std::string(1, next++));
        letters[c].push_back(b.add_letter(c, names.back()));
      }
      std::shuffle(names.begin(), names.end(), rng);
      // distinct-letter tuple: consecutive chunks of the shuffled letters
      for (std::size_t i = 0; i < names.size();) {
        auto len = std::min<std::size_t>(1 + pick(params.max_word_len), names.size() - i);
        words[c].emplace_back(names.begin() + static_cast<long>(i), names.begin() + static_cast<long>(i + len));
        i += len;
      }
      for (const auto &w : words[c]) {
        std::string body = "(";
        for (std::size_t k = 0; k < w.size(); ++k) body += (k ? " " : "") + w[k];
        body += ")";
        const char *forms_inf[] = {"*", "+", "*", "|eps"};
        const char *forms_fin[] = {"", "|eps", "|eps", "2"};
        std::string f = params.finite ? forms_fin[pick(4)] : forms_inf[pick(4)];
        if (f == "2") regex[c] += "(" + body + "|" + body + " " + body + "|eps) ";
        else if (f == "|eps") regex[c] += "(" + body + "|eps) ";
        else regex[c] += body + f + " ";
      }
    }
    std::vector<StateId> st;
    for (std::uint32_t k = 0; k < params.states; ++k) st.push_back(b.add_state("s" + std::to_string(k)));
    b.set_init(st[0]);
    auto bare = b.build();
    std::vector<BoundedLangSpec> specs;
    std::vector<Dfa> dfa;
    for (ChannelId c = 0; c < params.channels; ++c) {
      std::vector<std::string> tuple;
      for (const auto &w : words[c]) {
        std::string t;
        for (const auto &x : w) t += (t.empty() ? "" : ".") + x;
        tuple.push_back(t);
      }
      specs.push_back(make_spec(bare, c, tuple, regex[c]));
      dfa.push_back(trim(minimize(specs.back().language)));
    }
    if (std::any_of(dfa.begin(), dfa.end(), [](const Dfa &d) { return d.init() < 0; })) continue;
    // each state is labelled with the language state of every send and receive projection;
    // transitions only follow the labels, so every control path stays in the prefixes
    using Label = std::vector<std::int32_t>;
    auto step = [&](Label l, const FifoAction &a) {
      auto &x = l[2 * a.channel + (a.dir == Dir::receive)];
      x = dfa[a.channel].next(static_cast<std::uint32_t>(x), a.letter);
      return l;
    };
    auto random_action = [&] {
      auto c = static_cast<ChannelId>(pick(params.channels));
      return FifoAction{rng() % 2 ? Dir::send : Dir::receive, c, letters[c][pick(letters[c].size())]};
    };
    Label start;
    for (ChannelId c = 0; c < params.channels; ++c) start.insert(start.end(), 2, dfa[c].init());
    std::vector<Label> label{start};
    auto nb = FifoMachineBuilder::with_alphabet_of(bare, bare.name());
    for (StateId q = 0; q < bare.num_states(); ++q) nb.add_state(bare.state_name(q));
    nb.set_init(st[0]);
    std::set<std::tuple<StateId, FifoAction, StateId>> added;
    auto add = [&](StateId src, const FifoAction &a, StateId dst) {
      if (added.emplace(src, a, dst).second) nb.add_transition(src, a, dst);
    };
    for (std::uint32_t k = 1; k < params.states; ++k) {
      bool grown = false;
      for (int tries = 0; tries < 50 && !grown; ++tries) {
        auto src = static_cast<StateId>(pick(k));
        auto a = random_action();
        auto l = step(label[src], a);
        if (l[2 * a.channel + (a.dir == Dir::receive)] < 0) continue;
        label.push_back(l);
        add(st[src], a, st[k]);
        grown = true;
      }
      if (!grown) label.push_back(label[pick(k)]);
    }
    for (std::uint32_t k = params.states - 1; k < params.transitions; ++k)
      for (int tries = 0; tries < 50; ++tries) {
        auto src = static_cast<StateId>(pick(params.states));
        auto a = random_action();
        auto l = step(label[src], a);
        if (l[2 * a.channel + (a.dir == Dir::receive)] < 0) continue;
        std::vector<StateId> dst;
        for (StateId q = 0; q < params.states; ++q)
          if (label[q] == l) dst.push_back(q);
        if (dst.empty()) continue;
        add(st[src], a, st[dst[pick(dst.size())]]);
        break;
      }
    auto machine = nb.build();
    std::vector<ValidatedSpec> vs;
    bool valid = true;
    for (const auto &sp : specs) {
      try {
        vs.push_back(validate_bounded_spec(sp));
      } catch (const Error &) {
        valid = false;
      }
    }
    if (!valid) continue;
    // drop offending transitions until the trace property holds
    for (;;) {
      auto rep = check_normal_form(machine, vs);
      if (rep.ok) break;
      if (rep.counterexample.empty()) {
        valid = false;
        break;
      }
      Trace prefix(rep.counterexample.begin(), rep.counterexample.end() - 1);
      auto from = states_after(machine, prefix);
      const auto bad = rep.counterexample.back();
      FifoMachineBuilder nb = FifoMachineBuilder::with_alphabet_of(machine, machine.name());
      for (StateId q = 0; q < machine.num_states(); ++q) nb.add_state(machine.state_name(q));
      nb.set_init(machine.init());
      for (const auto &t : machine.transitions())
        if (!(from.count(t.src) && t.action == bad)) nb.add_transition(t.src, t.action, t.dst);
      machine = nb.build();
    }
    if (!valid || machine.transitions().size() < 2 || machine.outgoing(machine.init()).empty()) continue;
    bool sends = false;
    for (const auto &t : machine.transitions()) sends = sends || t.action.dir == Dir::send;
    if (!sends) continue;
    // some run must complete its words, otherwise the trimmed normal form is a single state
    auto norm = normalize_machine(machine, specs);
    const auto &nf = norm.machine();
    bool live_send = false;
    for (const auto &t : nf.transitions()) live_send = live_send || t.action.dir == Dir::send;
    if (nf.num_states() < 2 || !live_send || explore_fifo(nf, 6, SIZE_MAX).configs.size() < 3) continue;
    // letter ids survive the rebuilds, so the specs still apply
    return {std::move(machine), std::move(specs)};
  }
  throw Error(Errc::limit_exceeded, "no random bundle found");
}

} // namespace ibfifo
