#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ibfifo/corpus.hpp"
#include "ibfifo/counterize.hpp"
#include "ibfifo/engine.hpp"
#include "ibfifo/normalize.hpp"
#include "ibfifo/reductions.hpp"
#include "ibfifo/relation.hpp"
#include "ibfifo/text_format.hpp"

using namespace ibfifo;

namespace {

constexpr int kError = 3;

struct Common {
  std::string machine, bounds, mode, format = "human";
  std::size_t max_depth = SIZE_MAX, channel_bound = 0, max_states = 2'000'000;
  unsigned workers = 1;
  bool witness = false;
};

void add_common(CLI::App *c, Common &o, bool needs_bounds = true) {
  c->add_option("--machine", o.machine, "machine file")->required();
  auto b = c->add_option("--bounds", o.bounds, "bounds file");
  if (needs_bounds) b->required();
  c->add_option("--mode", o.mode, "ib or ob (overrides the bounds file)")->check(CLI::IsMember({"ib", "ob"}));
  c->add_option("--max-depth", o.max_depth, "search depth limit");
  c->add_option("--channel-bound", o.channel_bound,
                "search the FIFO machine directly with this many messages per channel");
  c->add_option("--max-states", o.max_states, "configurations per search");
  c->add_option("--format", o.format, "human or records")->check(CLI::IsMember({"human", "records"}));
  c->add_option("--workers", o.workers, "search threads");
  c->add_flag("--witness", o.witness, "print witness traces");
}

struct Loaded {
  FifoMachine m;
  BoundsFile bounds;
  bool ob = false;
};

Loaded load(const Common &o) {
  Loaded l;
  l.m = parse_machine(read_file(o.machine));
  if (!o.bounds.empty()) l.bounds = parse_bounds(read_file(o.bounds), l.m);
  l.ob = o.mode.empty() ? l.bounds.mode == BoundMode::ob : o.mode == "ob";
  return l;
}

EngineOptions engine_options(const Common &o) {
  EngineOptions e;
  e.max_depth = o.max_depth;
  e.max_states = o.max_states;
  e.workers = o.workers;
  return e;
}

StateId state_arg(const FifoMachine &m, const std::string &q) {
  auto s = m.find_state(q);
  if (!s) throw Error(Errc::undeclared_id, "unknown state '" + q + "'");
  return *s;
}

int exit_of(Answer a) { return a == Answer::yes ? 0 : a == Answer::no ? 1 : 2; }

struct Report {
  std::string question;
  std::string answer; // word printed for the verdict
  Answer code = Answer::unknown;
  std::string method;
  std::size_t explored = 0;
  std::optional<std::string> witness, pump, reached;
  std::string bounds;
  std::string detail;
  double ms = 0;
};

void print_report(const Report &r, const Common &o) {
  if (o.format == "records") {
    std::cout << "question=" << r.question << "\n";
    std::cout << "answer=" << r.answer << "\n";
    std::cout << "method=" << r.method << "\n";
    std::cout << "explored=" << r.explored << "\n";
    if (r.reached) std::cout << "reached=" << *r.reached << "\n";
    if (o.witness && r.witness) std::cout << "witness=" << *r.witness << "\n";
    if (o.witness && r.pump) std::cout << "pump=" << *r.pump << "\n";
    std::cout << "bounds=" << r.bounds << "\n";
    if (!r.detail.empty()) std::cout << "detail=" << r.detail << "\n";
    std::cout << "time_ms=" << static_cast<long>(r.ms) << "\n";
    return;
  }
  std::cout << r.question << ": " << r.answer << " (" << r.method << ", " << r.explored << " configurations, "
            << static_cast<long>(r.ms) << " ms)\n";
  if (r.reached) std::cout << "  reached  " << *r.reached << "\n";
  if (o.witness && r.witness) std::cout << "  witness  " << (r.witness->empty() ? "(empty)" : *r.witness) << "\n";
  if (o.witness && r.pump) std::cout << "  pump     " << *r.pump << "\n";
  if (!r.detail.empty()) std::cout << "  " << r.detail << "\n";
  std::cout << "  bounds   " << r.bounds << "\n";
}

std::string bounds_string(const Common &o, bool ob) {
  std::ostringstream s;
  s << "mode:" << (ob ? "ob" : "ib") << " max_states:" << o.max_states << " max_depth:";
  if (o.max_depth == SIZE_MAX) s << "none";
  else s << o.max_depth;
  if (o.channel_bound) s << " channel_bound:" << o.channel_bound;
  return s.str();
}

// v.witness and v.pump over the letters of m
Report from_verdict(const std::string &question, const Verdict &v, const FifoMachine &m, const char *yes,
                    const char *no) {
  Report r;
  r.question = question;
  r.code = v.answer;
  r.answer = v.answer == Answer::yes ? yes : v.answer == Answer::no ? no : "unknown";
  r.method = v.method;
  r.explored = v.explored;
  r.detail = v.detail;
  if (!v.witness.empty() || !v.pump.empty() || v.reached) r.witness = trace_string(m, v.witness);
  if (!v.pump.empty()) r.pump = trace_string(m, v.pump);
  if (v.reached) r.reached = config_string(m, *v.reached);
  return r;
}

Report lifted_report(const std::string &question, Verdict v, const NormalFormBundle &b, const char *yes,
                     const char *no) {
  v.witness = b.lift(v.witness);
  v.pump = b.lift(v.pump);
  return from_verdict(question, v, b.original(), yes, no);
}

// guarded breadth-first search of the FIFO machine itself
Report direct_search(const std::string &question, const Loaded &l, const Common &o,
                     const std::function<bool(const FifoConfig &, bool complete)> &goal) {
  std::vector<Dfa> langs(l.m.num_channels());
  for (const auto &s : l.bounds.specs) langs[s.channel] = trim(minimize(s.language));
  auto ex = explore_fifo(l.m, o.max_depth, o.channel_bound, &langs);
  Report r;
  r.question = question;
  r.method = "fifo-bfs";
  r.explored = ex.configs.size();
  for (std::size_t i = 0; i < ex.configs.size(); ++i)
    if (goal(ex.configs[i], ex.complete[i])) {
      r.code = Answer::yes;
      r.answer = "yes";
      r.witness = trace_string(l.m, ex.trace_to(i));
      r.reached = config_string(l.m, ex.configs[i]);
      return r;
    }
  r.code = ex.saturated ? Answer::no : Answer::unknown;
  r.answer = ex.saturated ? "no" : "unknown";
  return r;
}

template <class F> int timed(const Common &o, bool ob, F &&f) {
  auto t0 = std::chrono::steady_clock::now();
  Report r = f();
  r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  r.bounds = bounds_string(o, ob);
  print_report(r, o);
  return exit_of(r.code);
}

std::uint64_t env_seed() {
  if (const char *s = std::getenv("IBFIFO_SEED")) return std::strtoull(s, nullptr, 10);
  return 1;
}

void emit(const std::string &out, const std::string &text) {
  if (out.empty() || out == "-") std::cout << text;
  else write_file(out, text);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"ibfifo: verification of FIFO machines under bounded-language restrictions"};
  app.require_subcommand(1);
  int code = 0;

  Common o;
  std::string state, contents, relation, out, kind, trace;

  auto *reach = app.add_subcommand("reach", "is (state, contents) reachable");
  add_common(reach, o);
  reach->add_option("--state", state)->required();
  reach->add_option("--contents", contents, "e.g. c1=ab;c2=")->required();
  reach->callback([&] {
    auto l = load(o);
    auto w = parse_contents(contents, l.m);
    auto q = state_arg(l.m, state);
    code = timed(o, l.ob, [&] {
      if (o.channel_bound) {
        if (l.ob) throw Error(Errc::unsupported, "--channel-bound searches are input-bounded only");
        return direct_search("reach", l, o, [&](const FifoConfig &c, bool complete) {
          return complete && c.state == q && c.contents == w;
        });
      }
      if (l.ob) {
        auto v = ob_decide(ObKind::reach, l.m, l.bounds.specs, q, w, engine_options(o));
        return from_verdict("reach", v.verdict, v.machine, "yes", "no");
      }
      auto b = normalize_machine(l.m, l.bounds.specs);
      return lifted_report("reach", decide_reachability(b, q, w, engine_options(o)), b, "yes", "no");
    });
  });

  auto *rreach = app.add_subcommand("rational-reach", "is (state, w) reachable for some w in a rational relation");
  add_common(rreach, o);
  rreach->add_option("--state", state)->required();
  rreach->add_option("--relation", relation, "e.g. [b,_][a,_]*")->required();
  rreach->callback([&] {
    auto l = load(o);
    if (l.ob) throw Error(Errc::unsupported, "rational reachability is not decided for output-bounded runs");
    auto q = state_arg(l.m, state);
    auto r = parse_relation(relation, l.m);
    code = timed(o, l.ob, [&] {
      auto b = normalize_machine(l.m, l.bounds.specs);
      return lifted_report("rational-reach", decide_rational_reachability(b, q, r, engine_options(o)), b, "yes",
                           "no");
    });
  });

  auto *csr = app.add_subcommand("csr", "is a control state reachable");
  add_common(csr, o);
  csr->add_option("--state", state)->required();
  csr->callback([&] {
    auto l = load(o);
    auto q = state_arg(l.m, state);
    code = timed(o, l.ob, [&] {
      if (o.channel_bound) {
        if (l.ob) throw Error(Errc::unsupported, "--channel-bound searches are input-bounded only");
        return direct_search("csr", l, o, [&](const FifoConfig &c, bool complete) { return complete && c.state == q; });
      }
      if (l.ob) {
        auto v = ob_decide(ObKind::csr, l.m, l.bounds.specs, q, {}, engine_options(o));
        return from_verdict("csr", v.verdict, v.machine, "yes", "no");
      }
      auto b = normalize_machine(l.m, l.bounds.specs);
      return lifted_report("csr", decide_control_state(b, q, engine_options(o)), b, "yes", "no");
    });
  });

  auto *dead = app.add_subcommand("deadlock", "is a deadlock reachable");
  add_common(dead, o);
  dead->callback([&] {
    auto l = load(o);
    if (l.ob) throw Error(Errc::unsupported, "deadlock is not decided for output-bounded runs");
    code = timed(o, l.ob, [&] {
      auto b = normalize_machine(l.m, l.bounds.specs);
      return lifted_report("deadlock", decide_deadlock(b, engine_options(o)), b, "yes", "no");
    });
  });

  std::string property;
  auto *check = app.add_subcommand("check", "boundedness or termination");
  check->add_option("property", property, "bounded | terminates")
      ->required()
      ->check(CLI::IsMember({"bounded", "terminates"}));
  add_common(check, o);
  check->callback([&] {
    auto l = load(o);
    const bool bounded = property == "bounded";
    code = timed(o, l.ob, [&] {
      const char *yes = bounded ? "bounded" : "terminating";
      const char *no = bounded ? "unbounded" : "non-terminating";
      if (l.ob) {
        auto v = ob_decide(bounded ? ObKind::bounded : ObKind::term, l.m, l.bounds.specs, 0, {}, engine_options(o));
        return from_verdict(property, v.verdict, v.machine, yes, no);
      }
      auto b = normalize_machine(l.m, l.bounds.specs);
      auto e = engine_options(o);
      return lifted_report(property, bounded ? decide_boundedness(b, e) : decide_termination(b, e), b, yes, no);
    });
  });

  bool emit_flag = false;
  auto *norm = app.add_subcommand("normalize", "print the normal form");
  add_common(norm, o);
  norm->add_flag("--emit", emit_flag)->required();
  norm->add_option("--out", out);
  norm->callback([&] {
    auto l = load(o);
    NormalizeOptions no;
    no.ob_acceptance = l.ob;
    emit(out, print_normal_form(normalize_machine(l.m, l.bounds.specs, no)));
  });

  auto *cnt = app.add_subcommand("counterize", "print the counter machine of the normal form");
  add_common(cnt, o);
  cnt->add_flag("--emit", emit_flag)->required();
  cnt->add_option("--out", out);
  cnt->callback([&] {
    auto l = load(o);
    auto b = normalize_machine(l.m, l.bounds.specs);
    emit(out, print_counter_machine(build_counter_machine(b).machine));
  });

  bool solve = false;
  auto *red = app.add_subcommand("reduce", "apply a reduction between decision problems");
  add_common(red, o);
  red->add_option("--kind", kind, "reach->csr | csr->reach | reach->deadlock | bounded->reach | term->reach")
      ->required();
  red->add_flag("--emit", emit_flag);
  red->add_flag("--solve", solve, "also answer the reduced question by direct search");
  red->add_option("--state", state);
  red->add_option("--contents", contents);
  red->add_option("--out", out);
  red->callback([&] {
    auto l = load(o);
    ReductionInput in{l.m, l.bounds.specs, 0, Contents(l.m.num_channels())};
    auto k = parse_reduction_kind(kind);
    if (k == ReductionKind::reach_to_csr || k == ReductionKind::csr_to_reach || k == ReductionKind::reach_to_deadlock) {
      if (state.empty()) throw Error(Errc::syntax, "--state is required for this reduction");
      in.state = state_arg(l.m, state);
    }
    if (!contents.empty()) in.contents = parse_contents(contents, l.m);
    auto a = apply_reduction(k, in);
    if (emit_flag || !solve) emit(out, print_reduction(a));
    if (solve) {
      const auto depth = o.max_depth == SIZE_MAX ? std::size_t{16} : o.max_depth;
      auto ans = solve_artifact(a, depth, o.max_states);
      if (o.format == "records") std::cout << "answer=" << answer_name(ans) << "\nmethod=artifact-search\n";
      else std::cout << reduction_kind_name(k) << ": " << answer_name(ans) << " (artifact-search)\n";
      code = exit_of(ans);
    }
  });

  auto *gen = app.add_subcommand("gen", "generate corpus machines");
  gen->require_subcommand(1);
  std::string prefix = "out", dimacs, program;
  std::uint64_t seed = env_seed();
  std::uint32_t vars = 3, clauses = 4, rules = 6, counter_bound = 4;
  bool flat = false, unbounded = false;
  RandomParams rp;
  auto out_opts = [&](CLI::App *c) {
    c->add_option("--out", prefix, "output prefix; files <prefix>.fm, <prefix>.bl ...");
    c->add_option("--seed", seed, "defaults to IBFIFO_SEED");
  };
  auto write_bundle = [&](const Bundle &b) {
    write_file(prefix + ".fm", print_machine(b.machine));
    write_file(prefix + ".bl", print_bounds(b.machine, b.specs));
    std::cout << prefix << ".fm\n" << prefix << ".bl\n";
  };

  auto *gcdp = gen->add_subcommand("cdp", "the connection/disconnection protocol");
  out_opts(gcdp);
  gcdp->callback([&] { write_bundle(gen_cdp()); });

  auto *g3 = gen->add_subcommand("3sat", "3SAT reachability gadget");
  out_opts(g3);
  g3->add_option("--dimacs", dimacs, "CNF file; random formula when absent");
  g3->add_option("--vars", vars);
  g3->add_option("--clauses", clauses);
  g3->add_flag("--flat", flat);
  g3->add_flag("--unbounded-variant", unbounded);
  g3->callback([&] {
    auto f = dimacs.empty() ? random_cnf(seed, vars, clauses) : parse_dimacs(read_file(dimacs));
    auto g = gen_3sat(f, flat, unbounded);
    write_bundle(g.bundle);
    const auto &m = g.bundle.machine;
    write_file(prefix + ".target", "state " + m.state_name(g.target) + "\ncontents " +
                                       contents_string(m, Contents(m.num_channels())) + "\nsatisfiable " +
                                       (g.satisfiable ? "yes" : "no") + "\n");
    if (dimacs.empty()) write_file(prefix + ".cnf", print_dimacs(f));
    std::cout << prefix << ".target\n";
  });

  auto *gm = gen->add_subcommand("minsky", "two-counter machine simulation");
  out_opts(gm);
  gm->add_option("--program", program, "program file; random halting program when absent");
  gm->add_option("--rules", rules);
  gm->add_option("--counter-bound", counter_bound);
  gm->callback([&] {
    auto p = program.empty() ? random_minsky(seed, rules, counter_bound) : parse_minsky(read_file(program));
    auto g = gen_minsky(p);
    write_file(prefix + ".fm", print_machine(g.machine));
    std::string map;
    for (std::size_t i = 0; i < p.states.size(); ++i)
      map += p.states[i] + " " + g.machine.state_name(g.state_of[i]) + "\n";
    write_file(prefix + ".states", map);
    if (program.empty()) write_file(prefix + ".mk", print_minsky(p));
    std::cout << prefix << ".fm\n" << prefix << ".states\n";
  });

  auto *gr = gen->add_subcommand("random", "random machine in normal form");
  out_opts(gr);
  gr->add_option("--states", rp.states);
  gr->add_option("--channels", rp.channels);
  gr->add_option("--letters", rp.letters);
  gr->add_option("--word-len", rp.max_word_len);
  gr->add_option("--transitions", rp.transitions);
  gr->add_flag("--finite", rp.finite);
  gr->callback([&] { write_bundle(gen_random(seed, rp)); });

  auto *rep = app.add_subcommand("replay", "run a trace from the initial configuration");
  add_common(rep, o, false);
  rep->add_option("--trace", trace, "e.g. \"c1!a c1?a\"")->required();
  rep->add_option("--state", state, "expected final state");
  rep->add_option("--contents", contents, "expected final contents");
  rep->callback([&] {
    auto l = load(o);
    auto t = parse_trace(trace, l.m);
    auto ends = run_trace_all(l.m, l.m.initial_config(), t);
    bool in_lang = true;
    for (const auto &s : l.bounds.specs) {
      auto pref = trim(prefix_closure(minimize(s.language)));
      if (pref.run(project(t, s.channel, Dir::send)) < 0) in_lang = false;
    }
    std::optional<FifoConfig> want;
    if (!state.empty()) {
      FifoConfig c{state_arg(l.m, state), Contents(l.m.num_channels())};
      if (!contents.empty()) c.contents = parse_contents(contents, l.m);
      want = c;
    }
    bool hit = !ends.empty() && in_lang;
    if (hit && want) hit = std::find(ends.begin(), ends.end(), *want) != ends.end();
    if (o.format == "records") {
      std::cout << "answer=" << (hit ? "yes" : "no") << "\n";
      for (const auto &c : ends) std::cout << "reached=" << config_string(l.m, c) << "\n";
      std::cout << "bounded_prefix=" << (in_lang ? "yes" : "no") << "\n";
    } else {
      std::cout << "replay: " << (hit ? "ok" : "failed") << "\n";
      for (const auto &c : ends) std::cout << "  reached  " << config_string(l.m, c) << "\n";
      if (!in_lang) std::cout << "  a send projection leaves the bounded language\n";
    }
    code = hit ? 0 : 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kError;
  } catch (const Error &e) {
    std::cerr << "error: " << errc_name(e.code()) << ": " << e.what() << "\n";
    return kError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return code;
}
