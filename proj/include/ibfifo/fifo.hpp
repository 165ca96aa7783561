#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ibfifo/error.hpp"

namespace ibfifo {

using StateId = std::uint32_t;
using ChannelId = std::uint32_t;
using LetterId = std::uint32_t;
using Word = std::vector<LetterId>;
using Contents = std::vector<Word>;

enum class Dir : std::uint8_t { send, receive };

struct FifoAction {
  Dir dir = Dir::send;
  ChannelId channel = 0;
  LetterId letter = 0;

  friend bool operator==(const FifoAction &, const FifoAction &) = default;
  friend auto operator<=>(const FifoAction &, const FifoAction &) = default;
};

using Trace = std::vector<FifoAction>;

struct FifoTransition {
  StateId src;
  FifoAction action;
  StateId dst;
};

struct FifoConfig {
  StateId state = 0;
  Contents contents;

  friend bool operator==(const FifoConfig &, const FifoConfig &) = default;
  friend auto operator<=>(const FifoConfig &, const FifoConfig &) = default;
};

class FifoMachineBuilder;

class FifoMachine {
public:
  FifoMachine() = default;

  const std::string &name() const { return name_; }
  std::size_t num_states() const { return states_.size(); }
  std::size_t num_channels() const { return channels_.size(); }
  std::size_t num_letters() const { return letters_.size(); }

  const std::string &state_name(StateId s) const { return states_[s]; }
  const std::string &channel_name(ChannelId c) const { return channels_[c]; }
  const std::string &letter_name(LetterId a) const { return letters_[a]; }
  std::optional<StateId> find_state(std::string_view n) const;
  std::optional<ChannelId> find_channel(std::string_view n) const;
  std::optional<LetterId> find_letter(std::string_view n) const;

  ChannelId letter_channel(LetterId a) const { return letter_channel_[a]; }
  const std::vector<LetterId> &alphabet(ChannelId c) const { return alphabet_[c]; }
  StateId init() const { return init_; }

  const std::vector<FifoTransition> &transitions() const { return transitions_; }
  const std::vector<std::uint32_t> &outgoing(StateId s) const { return out_[s]; }

  FifoConfig initial_config() const;
  bool has_label(StateId s, const FifoAction &a) const;

private:
  friend class FifoMachineBuilder;
  std::string name_;
  std::vector<std::string> states_, channels_, letters_;
  std::vector<ChannelId> letter_channel_;
  std::vector<std::vector<LetterId>> alphabet_;
  std::vector<FifoTransition> transitions_;
  std::vector<std::vector<std::uint32_t>> out_;
  StateId init_ = 0;
  std::unordered_map<std::string, StateId> state_ix_;
  std::unordered_map<std::string, ChannelId> channel_ix_;
  std::unordered_map<std::string, LetterId> letter_ix_;
};

class FifoMachineBuilder {
public:
  explicit FifoMachineBuilder(std::string name = "m");
  // copies channels and letters (same ids) but no states
  static FifoMachineBuilder with_alphabet_of(const FifoMachine &m, std::string name);

  ChannelId add_channel(const std::string &name);
  LetterId add_letter(ChannelId c, const std::string &name);
  StateId add_state(const std::string &name);
  StateId state(const std::string &name); // add if missing
  void set_init(StateId s);
  void add_transition(StateId src, FifoAction a, StateId dst);

  std::size_t num_states() const { return m_.states_.size(); }
  const FifoMachine &peek() const { return m_; }
  FifoMachine build();

private:
  FifoMachine m_;
  bool init_set_ = false;
};

FifoConfig fifo_fire(const FifoMachine &m, const FifoConfig &cfg, std::uint32_t transition);
FifoConfig fifo_step(const FifoMachine &m, const FifoConfig &cfg, const FifoAction &a);
FifoConfig run_trace(const FifoMachine &m, const FifoConfig &start, const Trace &trace);
// every configuration some resolution of nondeterminism can end in
std::vector<FifoConfig> run_trace_all(const FifoMachine &m, const FifoConfig &start,
                                      const Trace &trace);
Word project(const Trace &trace, ChannelId c, Dir d);

// '.'-separated pieces, each split greedily into the longest letter names of channel c
Word parse_word(const FifoMachine &m, ChannelId c, std::string_view text);

std::string action_string(const FifoMachine &m, const FifoAction &a);
std::string trace_string(const FifoMachine &m, const Trace &t);
std::string word_string(const FifoMachine &m, const Word &w);
std::string contents_string(const FifoMachine &m, const Contents &w);
std::string config_string(const FifoMachine &m, const FifoConfig &cfg);

struct ConfigHash {
  std::size_t operator()(const FifoConfig &c) const;
};

} // namespace ibfifo
