#include "ibfifo/text_format.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ibfifo/regex.hpp"

namespace ibfifo {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::pair<std::string, std::size_t>> words; // token, column
};

std::vector<Line> lines_of(std::string_view text) {
  std::vector<Line> out;
  std::size_t n = 0, pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    ++n;
    pos = end + 1;
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size() || line[i] == '#') {
      if (end == text.size()) break;
      continue;
    }
    Line l{n, {}};
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) l.words.emplace_back(std::string(line.substr(i, j - i)), i + 1);
      i = j;
    }
    out.push_back(std::move(l));
    if (end == text.size()) break;
  }
  return out;
}

[[noreturn]] void fail(Errc code, std::size_t line, std::size_t col, const std::string &msg) {
  throw Error(code, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
}

FifoAction parse_action(const FifoMachine &m, const std::string &tok, std::size_t line, std::size_t col) {
  auto k = tok.find_first_of("!?");
  if (k == std::string::npos || k == 0 || k + 1 == tok.size())
    fail(Errc::syntax, line, col, "expected <channel>!<letter> or <channel>?<letter>, got '" + tok + "'");
  auto c = m.find_channel(tok.substr(0, k));
  if (!c) fail(Errc::undeclared_id, line, col, "undeclared channel '" + tok.substr(0, k) + "'");
  auto a = m.find_letter(tok.substr(k + 1));
  if (!a) fail(Errc::undeclared_id, line, col, "undeclared letter '" + tok.substr(k + 1) + "'");
  if (m.letter_channel(*a) != *c)
    fail(Errc::undeclared_id, line, col, "letter '" + tok.substr(k + 1) + "' is not in the alphabet of " +
                                             tok.substr(0, k));
  return {tok[k] == '!' ? Dir::send : Dir::receive, *c, *a};
}

} // namespace

FifoMachine parse_machine(std::string_view text) {
  auto lines = lines_of(text);
  std::string name = "m";
  std::size_t i = 0;
  if (i < lines.size() && lines[i].words[0].first == "machine") {
    if (lines[i].words.size() != 2) fail(Errc::syntax, lines[i].number, 1, "expected: machine <name>");
    name = lines[i].words[1].first;
    ++i;
  }
  FifoMachineBuilder b(name);
  bool have_init = false;
  for (; i < lines.size(); ++i) {
    const auto &l = lines[i];
    const auto &kw = l.words[0].first;
    try {
      if (kw == "channels") {
        for (std::size_t k = 1; k < l.words.size(); ++k) b.add_channel(l.words[k].first);
      } else if (kw == "alphabet") {
        if (l.words.size() < 2 || l.words[1].first.back() != ':')
          fail(Errc::syntax, l.number, l.words[0].second, "expected: alphabet <channel>: <letters>");
        auto cname = l.words[1].first.substr(0, l.words[1].first.size() - 1);
        auto c = b.peek().find_channel(cname);
        if (!c) fail(Errc::undeclared_id, l.number, l.words[1].second, "undeclared channel '" + cname + "'");
        for (std::size_t k = 2; k < l.words.size(); ++k) b.add_letter(*c, l.words[k].first);
      } else if (kw == "states") {
        for (std::size_t k = 1; k < l.words.size(); ++k) b.add_state(l.words[k].first);
      } else if (kw == "init") {
        if (l.words.size() != 2) fail(Errc::syntax, l.number, 1, "expected: init <state>");
        auto s = b.peek().find_state(l.words[1].first);
        if (!s) fail(Errc::undeclared_id, l.number, l.words[1].second, "undeclared state '" + l.words[1].first + "'");
        b.set_init(*s);
        have_init = true;
      } else if (kw == "trans") {
        if (l.words.size() != 4) fail(Errc::syntax, l.number, 1, "expected: trans <q> <c>!<a> <q'>");
        auto s = b.peek().find_state(l.words[1].first);
        if (!s) fail(Errc::undeclared_id, l.number, l.words[1].second, "undeclared state '" + l.words[1].first + "'");
        auto t = b.peek().find_state(l.words[3].first);
        if (!t) fail(Errc::undeclared_id, l.number, l.words[3].second, "undeclared state '" + l.words[3].first + "'");
        auto a = parse_action(b.peek(), l.words[2].first, l.number, l.words[2].second);
        b.add_transition(*s, a, *t);
      } else {
        fail(Errc::syntax, l.number, l.words[0].second, "unknown keyword '" + kw + "'");
      }
    } catch (const Error &e) {
      if (std::string_view(e.what()).substr(0, 5) == "line ") throw;
      fail(e.code(), l.number, 1, e.what());
    }
  }
  if (!have_init) {
    if (b.num_states() == 0) throw Error(Errc::syntax, "machine declares no states");
    b.set_init(0);
  }
  return b.build();
}

std::string print_machine(const FifoMachine &m) {
  std::ostringstream o;
  o << "machine " << m.name() << "\n";
  o << "channels";
  for (ChannelId c = 0; c < m.num_channels(); ++c) o << ' ' << m.channel_name(c);
  o << "\n";
  for (ChannelId c = 0; c < m.num_channels(); ++c) {
    o << "alphabet " << m.channel_name(c) << ":";
    for (auto a : m.alphabet(c)) o << ' ' << m.letter_name(a);
    o << "\n";
  }
  o << "states";
  for (StateId s = 0; s < m.num_states(); ++s) o << ' ' << m.state_name(s);
  o << "\ninit " << m.state_name(m.init()) << "\n";
  for (const auto &t : m.transitions())
    o << "trans " << m.state_name(t.src) << ' ' << action_string(m, t.action) << ' ' << m.state_name(t.dst)
      << "\n";
  return o.str();
}

BoundedLangSpec make_spec(const FifoMachine &m, ChannelId c, const std::vector<std::string> &tuple,
                          std::string_view regex) {
  BoundedLangSpec s;
  s.channel = c;
  for (const auto &w : tuple) s.tuple.push_back(parse_word(m, c, w));
  TokenResolver resolve = [&](const std::string &tok) {
    auto w = parse_word(m, c, tok);
    return std::vector<Symbol>(w.begin(), w.end());
  };
  s.language = compile_regex(regex, resolve, static_cast<std::uint32_t>(m.num_letters()));
  return s;
}

BoundsFile parse_bounds(std::string_view text, const FifoMachine &m) {
  BoundsFile out;
  std::vector<std::optional<BoundedLangSpec>> by(m.num_channels());
  std::size_t n = 0, pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    ++n;
    pos = end + 1;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    line = line.substr(first);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (line.rfind("mode", 0) == 0) {
      std::istringstream is(line.substr(4));
      std::string mode;
      is >> mode;
      if (mode == "ib") out.mode = BoundMode::ib;
      else if (mode == "ob") out.mode = BoundMode::ob;
      else fail(Errc::syntax, n, first + 6, "mode must be ib or ob");
    } else if (line.rfind("channel", 0) == 0) {
      auto colon = line.find(':');
      if (colon == std::string::npos) fail(Errc::syntax, n, first + 1, "expected ':' after the channel name");
      std::istringstream cn(line.substr(7, colon - 7));
      std::string cname;
      cn >> cname;
      auto c = m.find_channel(cname);
      if (!c) fail(Errc::undeclared_id, n, first + 9, "undeclared channel '" + cname + "'");
      auto semi = line.find(';', colon);
      if (semi == std::string::npos) fail(Errc::syntax, n, colon + 1, "expected '; lang <regex>'");
      std::istringstream tp(line.substr(colon + 1, semi - colon - 1));
      std::string kw;
      tp >> kw;
      if (kw != "tuple") fail(Errc::syntax, n, colon + 2, "expected 'tuple'");
      std::vector<std::string> words;
      for (std::string w; tp >> w;) words.push_back(w);
      auto rest = line.substr(semi + 1);
      auto lk = rest.find_first_not_of(" \t");
      if (lk == std::string::npos || rest.compare(lk, 4, "lang") != 0)
        fail(Errc::syntax, n, semi + 2, "expected 'lang'");
      if (by[*c]) fail(Errc::syntax, n, first + 1, "second bounds line for channel " + cname);
      try {
        by[*c] = make_spec(m, *c, words, rest.substr(lk + 4));
      } catch (const Error &e) {
        fail(e.code(), n, semi + 2, e.what());
      }
    } else {
      fail(Errc::syntax, n, first + 1, "expected 'mode' or 'channel'");
    }
    if (end == text.size()) break;
  }
  for (ChannelId c = 0; c < m.num_channels(); ++c) {
    if (!by[c]) throw Error(Errc::syntax, "no bounds for channel " + m.channel_name(c));
    out.specs.push_back(std::move(*by[c]));
  }
  return out;
}

std::string language_string(const FifoMachine &m, const Dfa &d) {
  return regex_string(dfa_to_regex(minimize(d)), [&](Symbol s) { return m.letter_name(s); });
}

namespace {

// w1* ... wn* when the language is the whole pattern; state elimination can blow up on those
std::string spec_language_string(const FifoMachine &m, const BoundedLangSpec &s) {
  if (!s.tuple.empty() && equivalent(s.language, tuple_pattern(s.language.num_symbols(), s.tuple))) {
    std::string r;
    for (const auto &w : s.tuple) {
      if (!r.empty()) r += ' ';
      r += w.size() == 1 ? m.letter_name(w[0]) + "*" : "(" + word_string(m, w) + ")*";
    }
    return r;
  }
  return language_string(m, s.language);
}

} // namespace

std::string print_bounds(const FifoMachine &m, const std::vector<BoundedLangSpec> &specs, BoundMode mode) {
  std::ostringstream o;
  o << "mode " << (mode == BoundMode::ib ? "ib" : "ob") << "\n";
  for (const auto &s : specs) {
    o << "channel " << m.channel_name(s.channel) << ": tuple";
    for (const auto &w : s.tuple) o << ' ' << word_string(m, w);
    o << " ; lang " << spec_language_string(m, s) << "\n";
  }
  return o.str();
}

Contents parse_contents(std::string_view text, const FifoMachine &m) {
  Contents w(m.num_channels());
  std::vector<char> seen(m.num_channels(), 0);
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    auto part = text.substr(pos, end - pos);
    while (!part.empty() && std::isspace(static_cast<unsigned char>(part.front()))) part.remove_prefix(1);
    while (!part.empty() && std::isspace(static_cast<unsigned char>(part.back()))) part.remove_suffix(1);
    pos = end + 1;
    if (part.empty()) continue;
    auto eq = part.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::syntax, "contents: expected <channel>=<word>, got '" + std::string(part) + "'");
    auto c = m.find_channel(part.substr(0, eq));
    if (!c) throw Error(Errc::undeclared_id, "contents: undeclared channel '" + std::string(part.substr(0, eq)) + "'");
    w[*c] = parse_word(m, *c, part.substr(eq + 1));
    seen[*c] = 1;
  }
  return w;
}

Trace parse_trace(std::string_view text, const FifoMachine &m) {
  Trace t;
  std::istringstream is{std::string(text)};
  std::size_t col = 1;
  for (std::string tok; is >> tok; ++col) t.push_back(parse_action(m, tok, 1, col));
  return t;
}

std::string print_counter_machine(const CounterMachine &c) {
  std::ostringstream o;
  o << "counters";
  for (CounterId x = 0; x < c.num_counters(); ++x) o << ' ' << c.counter_name(x);
  o << "\nstates";
  for (StateId s = 0; s < c.num_states(); ++s) o << ' ' << c.state_name(s);
  o << "\ninit " << c.state_name(c.init()) << "\n";
  for (const auto &t : c.transitions())
    o << "trans " << c.state_name(t.src) << ' ' << counter_action_string(c, t.action) << ' '
      << c.state_name(t.dst) << "\n";
  return o.str();
}

CounterMachine parse_counter_machine(std::string_view text) {
  CounterMachineBuilder b;
  std::vector<std::string> counters;
  for (const auto &l : lines_of(text)) {
    const auto &kw = l.words[0].first;
    if (kw == "counters") {
      for (std::size_t k = 1; k < l.words.size(); ++k) {
        b.add_counter(l.words[k].first);
        counters.push_back(l.words[k].first);
      }
    } else if (kw == "states") {
      for (std::size_t k = 1; k < l.words.size(); ++k) b.add_state(l.words[k].first);
    } else if (kw == "init") {
      if (l.words.size() != 2) fail(Errc::syntax, l.number, 1, "expected: init <state>");
      b.set_init(b.state(l.words[1].first));
    } else if (kw == "trans") {
      if (l.words.size() < 5) fail(Errc::syntax, l.number, 1, "expected: trans <q> inc|dec <x> [zero ...] <q'>");
      auto find = [&](const std::pair<std::string, std::size_t> &w) {
        auto it = std::find(counters.begin(), counters.end(), w.first);
        if (it == counters.end()) fail(Errc::undeclared_id, l.number, w.second, "undeclared counter '" + w.first + "'");
        return static_cast<CounterId>(it - counters.begin());
      };
      CounterAction a;
      if (l.words[2].first == "inc") a.op = CounterOp::inc;
      else if (l.words[2].first == "dec") a.op = CounterOp::dec;
      else fail(Errc::syntax, l.number, l.words[2].second, "expected inc or dec");
      a.counter = find(l.words[3]);
      std::size_t k = 4;
      if (k + 1 < l.words.size() && l.words[k].first == "zero")
        for (++k; k + 1 < l.words.size(); ++k) a.zero.push_back(find(l.words[k]));
      if (k + 1 != l.words.size()) fail(Errc::syntax, l.number, l.words[k].second, "trailing tokens");
      auto src = b.state(l.words[1].first);
      auto dst = b.state(l.words.back().first);
      b.add_transition(src, a, dst);
    } else {
      fail(Errc::syntax, l.number, l.words[0].second, "unknown keyword '" + kw + "'");
    }
  }
  return b.build();
}

std::string print_normal_form(const NormalFormBundle &b) {
  std::ostringstream o;
  const auto &m = b.machine();
  o << print_machine(m);
  std::vector<BoundedLangSpec> specs;
  for (const auto &v : b.specs()) specs.push_back(v.spec);
  o << "# bounds\n";
  std::istringstream bs(print_bounds(m, specs, b.ob_acceptance() ? BoundMode::ob : BoundMode::ib));
  for (std::string line; std::getline(bs, line);) o << "# " << line << "\n";
  o << "# homomorphism\n";
  for (LetterId e = 0; e < b.hom().names.size(); ++e)
    o << "#   " << b.hom().names[e] << " -> " << b.original().letter_name(b.hom().image[e]) << "\n";
  return o.str();
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + path);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write " + path);
  out << text;
}

} // namespace ibfifo
