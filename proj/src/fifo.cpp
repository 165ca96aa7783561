#include "ibfifo/fifo.hpp"

#include <algorithm>
#include <set>

namespace ibfifo {

const char *errc_name(Errc c) {
  switch (c) {
  case Errc::no_such_transition: return "NoSuchTransition";
  case Errc::receive_mismatch: return "ReceiveMismatch";
  case Errc::zero_test_failed: return "ZeroTestFailed";
  case Errc::decrement_on_zero: return "DecrementOnZero";
  case Errc::not_bounded: return "NotBounded";
  case Errc::empty_language: return "EmptyLanguage";
  case Errc::alphabet_mismatch: return "AlphabetMismatch";
  case Errc::empty_tuple_word: return "EmptyTupleWord";
  case Errc::malformed_regex: return "MalformedRegex";
  case Errc::syntax: return "SyntaxError";
  case Errc::undeclared_id: return "UndeclaredId";
  case Errc::alphabet_overlap: return "AlphabetOverlap";
  case Errc::invalid_machine: return "InvalidMachine";
  case Errc::unknown_kind: return "UnknownKind";
  case Errc::unsupported: return "Unsupported";
  case Errc::limit_exceeded: return "LimitExceeded";
  case Errc::io: return "IOError";
  }
  return "?";
}

std::optional<StateId> FifoMachine::find_state(std::string_view n) const {
  auto it = state_ix_.find(std::string(n));
  if (it == state_ix_.end()) return std::nullopt;
  return it->second;
}

std::optional<ChannelId> FifoMachine::find_channel(std::string_view n) const {
  auto it = channel_ix_.find(std::string(n));
  if (it == channel_ix_.end()) return std::nullopt;
  return it->second;
}

std::optional<LetterId> FifoMachine::find_letter(std::string_view n) const {
  auto it = letter_ix_.find(std::string(n));
  if (it == letter_ix_.end()) return std::nullopt;
  return it->second;
}

FifoConfig FifoMachine::initial_config() const {
  return FifoConfig{init_, Contents(channels_.size())};
}

bool FifoMachine::has_label(StateId s, const FifoAction &a) const {
  for (auto t : out_[s])
    if (transitions_[t].action == a) return true;
  return false;
}

FifoMachineBuilder::FifoMachineBuilder(std::string name) { m_.name_ = std::move(name); }

FifoMachineBuilder FifoMachineBuilder::with_alphabet_of(const FifoMachine &m, std::string name) {
  FifoMachineBuilder b(std::move(name));
  for (ChannelId c = 0; c < m.num_channels(); ++c) b.add_channel(m.channel_name(c));
  for (LetterId a = 0; a < m.num_letters(); ++a) b.add_letter(m.letter_channel(a), m.letter_name(a));
  return b;
}

ChannelId FifoMachineBuilder::add_channel(const std::string &name) {
  if (m_.channel_ix_.count(name))
    throw Error(Errc::invalid_machine, "duplicate channel " + name);
  ChannelId c = m_.channels_.size();
  m_.channels_.push_back(name);
  m_.alphabet_.emplace_back();
  m_.channel_ix_[name] = c;
  return c;
}

LetterId FifoMachineBuilder::add_letter(ChannelId c, const std::string &name) {
  if (c >= m_.channels_.size()) throw Error(Errc::undeclared_id, "no channel for letter " + name);
  auto it = m_.letter_ix_.find(name);
  if (it != m_.letter_ix_.end()) {
    if (m_.letter_channel_[it->second] == c)
      throw Error(Errc::invalid_machine, "duplicate letter " + name);
    throw Error(Errc::alphabet_overlap, "letter " + name + " declared on channels " +
                                            m_.channels_[m_.letter_channel_[it->second]] +
                                            " and " + m_.channels_[c]);
  }
  LetterId a = m_.letters_.size();
  m_.letters_.push_back(name);
  m_.letter_channel_.push_back(c);
  m_.alphabet_[c].push_back(a);
  m_.letter_ix_[name] = a;
  return a;
}

StateId FifoMachineBuilder::add_state(const std::string &name) {
  if (m_.state_ix_.count(name)) throw Error(Errc::invalid_machine, "duplicate state " + name);
  StateId s = m_.states_.size();
  m_.states_.push_back(name);
  m_.out_.emplace_back();
  m_.state_ix_[name] = s;
  return s;
}

StateId FifoMachineBuilder::state(const std::string &name) {
  auto it = m_.state_ix_.find(name);
  if (it != m_.state_ix_.end()) return it->second;
  return add_state(name);
}

void FifoMachineBuilder::set_init(StateId s) {
  if (s >= m_.states_.size()) throw Error(Errc::undeclared_id, "init state out of range");
  m_.init_ = s;
  init_set_ = true;
}

void FifoMachineBuilder::add_transition(StateId src, FifoAction a, StateId dst) {
  if (src >= m_.states_.size() || dst >= m_.states_.size())
    throw Error(Errc::undeclared_id, "transition references an undeclared state");
  if (a.channel >= m_.channels_.size() || a.letter >= m_.letters_.size())
    throw Error(Errc::undeclared_id, "transition references an undeclared channel or letter");
  if (m_.letter_channel_[a.letter] != a.channel)
    throw Error(Errc::invalid_machine, "letter " + m_.letters_[a.letter] +
                                           " is not in the alphabet of channel " +
                                           m_.channels_[a.channel]);
  m_.out_[src].push_back(m_.transitions_.size());
  m_.transitions_.push_back({src, a, dst});
}

FifoMachine FifoMachineBuilder::build() {
  if (m_.states_.empty()) throw Error(Errc::invalid_machine, "machine has no states");
  if (!init_set_) m_.init_ = 0;
  return m_;
}

FifoConfig fifo_fire(const FifoMachine &m, const FifoConfig &cfg, std::uint32_t t) {
  const auto &tr = m.transitions()[t];
  if (tr.src != cfg.state) throw Error(Errc::no_such_transition, "transition not enabled here");
  FifoConfig next = cfg;
  auto &w = next.contents[tr.action.channel];
  if (tr.action.dir == Dir::send) {
    w.push_back(tr.action.letter);
  } else {
    if (w.empty())
      throw Error(Errc::receive_mismatch,
                  "receive " + action_string(m, tr.action) + " on empty channel", "empty");
    if (w.front() != tr.action.letter)
      throw Error(Errc::receive_mismatch,
                  "receive " + action_string(m, tr.action) + " but head is " +
                      m.letter_name(w.front()),
                  "head");
    w.erase(w.begin());
  }
  next.state = tr.dst;
  return next;
}

FifoConfig fifo_step(const FifoMachine &m, const FifoConfig &cfg, const FifoAction &a) {
  for (auto t : m.outgoing(cfg.state))
    if (m.transitions()[t].action == a) return fifo_fire(m, cfg, t);
  throw Error(Errc::no_such_transition,
              "no transition labeled " + action_string(m, a) + " from " + m.state_name(cfg.state));
}

FifoConfig run_trace(const FifoMachine &m, const FifoConfig &start, const Trace &trace) {
  FifoConfig cur = start;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    try {
      cur = fifo_step(m, cur, trace[i]);
    } catch (Error &e) {
      e.at(static_cast<long>(i));
      throw;
    }
  }
  return cur;
}

std::vector<FifoConfig> run_trace_all(const FifoMachine &m, const FifoConfig &start,
                                      const Trace &trace) {
  std::set<FifoConfig> cur{start};
  for (const auto &a : trace) {
    std::set<FifoConfig> next;
    for (const auto &cfg : cur)
      for (auto t : m.outgoing(cfg.state)) {
        const auto &tr = m.transitions()[t];
        if (!(tr.action == a)) continue;
        const auto &w = cfg.contents[a.channel];
        if (a.dir == Dir::receive && (w.empty() || w.front() != a.letter)) continue;
        next.insert(fifo_fire(m, cfg, t));
      }
    cur.swap(next);
  }
  return {cur.begin(), cur.end()};
}

Word project(const Trace &trace, ChannelId c, Dir d) {
  Word w;
  for (const auto &a : trace)
    if (a.channel == c && a.dir == d) w.push_back(a.letter);
  return w;
}

Word parse_word(const FifoMachine &m, ChannelId c, std::string_view text) {
  Word w;
  if (text == "eps") return w;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '.') {
      ++i;
      continue;
    }
    std::size_t end = text.find('.', i);
    if (end == std::string_view::npos) end = text.size();
    std::size_t best = 0;
    LetterId letter = 0;
    for (auto a : m.alphabet(c)) {
      const auto &n = m.letter_name(a);
      if (n.size() > best && n.size() <= end - i && text.compare(i, n.size(), n) == 0) {
        best = n.size();
        letter = a;
      }
    }
    if (best == 0)
      throw Error(Errc::undeclared_id, "'" + std::string(text.substr(i, end - i)) +
                                           "' is not a word over the alphabet of " + m.channel_name(c));
    w.push_back(letter);
    i += best;
  }
  return w;
}

std::string action_string(const FifoMachine &m, const FifoAction &a) {
  return m.channel_name(a.channel) + (a.dir == Dir::send ? "!" : "?") + m.letter_name(a.letter);
}

std::string trace_string(const FifoMachine &m, const Trace &t) {
  std::string s;
  for (const auto &a : t) {
    if (!s.empty()) s += ' ';
    s += action_string(m, a);
  }
  return s;
}

std::string word_string(const FifoMachine &m, const Word &w) {
  bool dotted = false;
  for (auto a : w) dotted |= m.letter_name(a).size() > 1;
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (dotted && i) s += '.';
    s += m.letter_name(w[i]);
  }
  return s;
}

std::string contents_string(const FifoMachine &m, const Contents &w) {
  std::string s;
  for (ChannelId c = 0; c < w.size(); ++c) {
    if (c) s += ';';
    s += m.channel_name(c) + "=" + word_string(m, w[c]);
  }
  return s;
}

std::string config_string(const FifoMachine &m, const FifoConfig &cfg) {
  return "(" + m.state_name(cfg.state) + ", " + contents_string(m, cfg.contents) + ")";
}

std::size_t ConfigHash::operator()(const FifoConfig &c) const {
  std::size_t h = c.state * 0x9e3779b97f4a7c15ULL;
  for (const auto &w : c.contents) {
    h ^= 0x51ed27 + (h << 6) + (h >> 2);
    for (auto a : w) h ^= a + 0x9e3779b9 + (h << 6) + (h >> 2);
  }
  return h;
}

} // namespace ibfifo
