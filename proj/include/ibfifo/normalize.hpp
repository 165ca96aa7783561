#pragma once

#include <deque>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "ibfifo/bounded_lang.hpp"
#include "ibfifo/fifo.hpp"

namespace ibfifo {

struct LetterHom {
  std::vector<std::string> names; // distinct letters
  std::vector<ChannelId> channel;
  std::vector<LetterId> image; // distinct letter -> original letter
};

FifoMachine inverse_hom_machine(const FifoMachine &m, const LetterHom &h,
                                std::vector<std::uint32_t> *origin = nullptr);

struct ProductEdge {
  std::uint32_t target;
  std::uint32_t inv_transition; // index into the h^-1 machine
  FifoAction action;
};

// copies of one original letter are interchangeable for original-level behavior; a send
// whose target send state is simulated by a sibling copy's target can be dropped
struct SendPruning {
  std::vector<std::uint32_t> origin;          // h^-1 transition -> original transition
  std::vector<std::vector<char>> simulates;   // [c][s1 * n + s2]: s1 simulates s2 under h
  std::vector<std::uint32_t> size;            // [c] send DFA states
};

SendPruning make_send_pruning(const ValidAutomaton &va, const LetterHom &h, std::vector<std::uint32_t> origin,
                              std::size_t max_states = 400);

// accessible part of h^-1(M) x A, built on demand
class ProductSpace {
public:
  ProductSpace(std::shared_ptr<const FifoMachine> inv, std::shared_ptr<const ValidAutomaton> va,
               bool ob, std::shared_ptr<const SendPruning> pruning = nullptr);

  std::uint32_t init() const { return 0; }
  std::size_t size() const { return base_.size(); }
  StateId base(std::uint32_t p) const { return base_[p]; }
  const std::vector<std::uint32_t> &astate(std::uint32_t p) const { return astate_[p]; }
  bool accepting(std::uint32_t p) const { return accepting_[p]; }
  bool expanded(std::uint32_t p) const { return expanded_[p]; }
  // not thread-safe when it has to expand; call ensure() from one thread first
  const std::vector<ProductEdge> &edges(std::uint32_t p);
  const std::vector<ProductEdge> &edges_ready(std::uint32_t p) const { return edges_[p]; }
  void ensure(std::uint32_t p) { edges(p); }
  void expand_all(std::size_t cap);
  std::string name(std::uint32_t p) const;

private:
  std::uint32_t intern(StateId q, const std::vector<std::uint32_t> &a);

  std::shared_ptr<const FifoMachine> inv_;
  std::shared_ptr<const ValidAutomaton> va_;
  bool ob_;
  std::shared_ptr<const SendPruning> pruning_;
  std::vector<StateId> base_;
  std::vector<std::vector<std::uint32_t>> astate_;
  std::vector<char> accepting_, expanded_;
  std::deque<std::vector<ProductEdge>> edges_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct MaterializedBundle {
  FifoMachine machine;                    // trimmed product
  std::vector<std::uint32_t> product_id;  // machine state -> product state
  std::vector<std::uint32_t> inv_transition; // machine transition -> h^-1 transition
  std::vector<char> accepting;
};

struct NormalizeOptions {
  // output-bounded acceptance: receive projections must also be complete words
  bool ob_acceptance = false;
  std::size_t materialize_cap = 2'000'000;
};

class NormalFormBundle {
public:
  const FifoMachine &original() const { return *original_; }
  const std::vector<ValidatedSpec> &original_specs() const { return original_specs_; }
  const FifoMachine &inverse_machine() const { return *inverse_; }
  const std::vector<std::uint32_t> &inverse_origin() const { return inverse_origin_; }
  const LetterHom &hom() const { return hom_; }
  const std::vector<ValidatedSpec> &specs() const { return specs_; }
  const ValidAutomaton &vautomaton() const { return *va_; }
  bool ob_acceptance() const { return ob_; }

  ProductSpace &product() const { return *product_; }
  // same reachable original configurations with fewer copy choices; used by the searches
  ProductSpace &search_space() const { return *search_; }
  // trimmed product as an explicit machine (cached)
  const MaterializedBundle &materialized() const;
  const FifoMachine &machine() const { return materialized().machine; }

  // original-alphabet action of a distinct-alphabet action
  FifoAction lift(const FifoAction &a) const;
  Trace lift(const Trace &t) const;

private:
  friend NormalFormBundle normalize_machine(const FifoMachine &, const std::vector<BoundedLangSpec> &,
                                            NormalizeOptions);
  std::shared_ptr<const FifoMachine> original_;
  std::vector<ValidatedSpec> original_specs_;
  std::shared_ptr<const FifoMachine> inverse_;
  std::vector<std::uint32_t> inverse_origin_;
  LetterHom hom_;
  std::vector<ValidatedSpec> specs_;
  std::shared_ptr<const ValidAutomaton> va_;
  bool ob_ = false;
  std::size_t cap_ = 0;
  std::shared_ptr<ProductSpace> product_;
  std::shared_ptr<ProductSpace> search_;
  mutable std::shared_ptr<MaterializedBundle> mat_;
};

// specs: one per channel of the machine (any order); validated non-strictly here
NormalFormBundle normalize_machine(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs,
                                   NormalizeOptions opt = {});

struct NormalFormReport {
  bool ok = true;
  std::string reason;
  Trace counterexample;
};

// specs over the letters of m, one per channel
NormalFormReport check_normal_form(const FifoMachine &m, const std::vector<ValidatedSpec> &specs);
NormalFormReport check_normal_form(const NormalFormBundle &b);

// distinct-alphabet contents w with h(w) = target and every w_c an infix of L_c
std::vector<Contents> preimages(const NormalFormBundle &b, const Contents &target);
// materialized states whose first component is q
std::vector<StateId> states_over(const NormalFormBundle &b, StateId q);

} // namespace ibfifo
