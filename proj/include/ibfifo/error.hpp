#pragma once

#include <stdexcept>
#include <string>

namespace ibfifo {

enum class Errc {
  no_such_transition,
  receive_mismatch,
  zero_test_failed,
  decrement_on_zero,
  not_bounded,
  empty_language,
  alphabet_mismatch,
  empty_tuple_word,
  malformed_regex,
  syntax,
  undeclared_id,
  alphabet_overlap,
  invalid_machine,
  unknown_kind,
  unsupported,
  limit_exceeded,
  io,
};

const char *errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string &msg, std::string payload = {})
      : std::runtime_error(msg), code_(code), payload_(std::move(payload)) {}

  Errc code() const { return code_; }
  // "empty" / "head" for receive mismatches, free-form otherwise
  const std::string &payload() const { return payload_; }
  long index() const { return index_; }
  Error &at(long i) {
    index_ = i;
    return *this;
  }

private:
  Errc code_;
  std::string payload_;
  long index_ = -1;
};

} // namespace ibfifo
