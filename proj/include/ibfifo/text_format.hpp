#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ibfifo/bounded_lang.hpp"
#include "ibfifo/counter.hpp"
#include "ibfifo/fifo.hpp"
#include "ibfifo/normalize.hpp"

namespace ibfifo {

enum class BoundMode { ib, ob };

struct BoundsFile {
  BoundMode mode = BoundMode::ib;
  std::vector<BoundedLangSpec> specs; // one per channel, in channel order
};

FifoMachine parse_machine(std::string_view text);
std::string print_machine(const FifoMachine &m);

// tuple words and regex tokens are spelled with letter names of the channel
BoundedLangSpec make_spec(const FifoMachine &m, ChannelId c, const std::vector<std::string> &tuple,
                          std::string_view regex);
BoundsFile parse_bounds(std::string_view text, const FifoMachine &m);
std::string print_bounds(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs,
                         BoundMode mode = BoundMode::ib);
std::string language_string(const FifoMachine &m, const Dfa &d);

Contents parse_contents(std::string_view text, const FifoMachine &m);
Trace parse_trace(std::string_view text, const FifoMachine &m);

std::string print_counter_machine(const CounterMachine &c);
CounterMachine parse_counter_machine(std::string_view text);

// normalized machine, distinct-letter bounds and the letter homomorphism
std::string print_normal_form(const NormalFormBundle &b);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &text);

} // namespace ibfifo
