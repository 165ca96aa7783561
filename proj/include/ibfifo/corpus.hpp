#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ibfifo/bounded_lang.hpp"
#include "ibfifo/fifo.hpp"

namespace ibfifo {

struct Bundle {
  FifoMachine machine;
  std::vector<BoundedLangSpec> specs; // channel order
};

Bundle gen_cdp();

// --- 3SAT ----------------------------------------------------------------------

struct CnfFormula {
  std::uint32_t num_vars = 0;
  std::vector<std::array<int, 3>> clauses; // signed, 1-based
};

CnfFormula parse_dimacs(std::string_view text);
std::string print_dimacs(const CnfFormula &f);
bool brute_force_sat(const CnfFormula &f);
CnfFormula random_cnf(std::uint64_t seed, std::uint32_t num_vars, std::uint32_t num_clauses);

struct SatGadget {
  Bundle bundle;
  StateId target = 0; // reach (target, empty channel) iff satisfiable
  bool satisfiable = false;
};

SatGadget gen_3sat(const CnfFormula &f, bool flat, bool unbounded_variant);

// --- Minsky machines --------------------------------------------------------------

struct MinskyRule {
  enum class Kind { inc, test_dec } kind = Kind::inc;
  std::uint32_t counter = 0; // 0 = x1, 1 = x2
  std::uint32_t next = 0;    // inc target, or the zero branch
  std::uint32_t dec_next = 0;
};

struct MinskyProgram {
  std::vector<std::string> states;
  std::vector<std::vector<MinskyRule>> rules; // per state; empty = halting
  std::uint32_t init = 0;
};

MinskyProgram parse_minsky(std::string_view text);
std::string print_minsky(const MinskyProgram &p);

struct MinskyRun {
  std::vector<char> reached; // per program state
  bool halted = false;
  bool exceeded = false; // some counter went above the bound
  std::uint32_t max_counter = 0;
};

// explores every rule choice; stops a branch when a counter exceeds `bound`
MinskyRun interpret_minsky(const MinskyProgram &p, std::uint32_t bound, std::size_t max_configs = 100'000);

// halting program with <= max_rules rules whose counters stay within bound
MinskyProgram random_minsky(std::uint64_t seed, std::uint32_t max_rules, std::uint32_t bound);

struct MinskyGadget {
  FifoMachine machine;
  std::vector<StateId> state_of; // program state -> machine state
};

MinskyGadget gen_minsky(const MinskyProgram &p);

// --- random bundles -----------------------------------------------------------------

struct RandomParams {
  std::uint32_t states = 4;
  std::uint32_t channels = 2;
  std::uint32_t letters = 3;      // per channel
  std::uint32_t max_word_len = 2;
  std::uint32_t transitions = 7;
  bool finite = false;            // finite bounded languages
};

// the machine passes check_normal_form against its specs
Bundle gen_random(std::uint64_t seed, const RandomParams &params = {});

} // namespace ibfifo
