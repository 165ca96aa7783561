#include "ibfifo/regex.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

#include "ibfifo/error.hpp"

namespace ibfifo {

Regex Regex::cat(Regex a, Regex b) {
  if (a.kind == Kind::empty || b.kind == Kind::empty) return none();
  if (a.kind == Kind::eps) return b;
  if (b.kind == Kind::eps) return a;
  Regex r{Kind::cat, 0, {}};
  for (auto *x : {&a, &b}) {
    if (x->kind == Kind::cat)
      for (auto &k : x->kids) r.kids.push_back(std::move(k));
    else
      r.kids.push_back(std::move(*x));
  }
  return r;
}

Regex Regex::alt(Regex a, Regex b) {
  if (a.kind == Kind::empty) return b;
  if (b.kind == Kind::empty) return a;
  if (a == b) return a;
  Regex r{Kind::alt, 0, {}};
  for (auto *x : {&a, &b}) {
    if (x->kind == Kind::alt) {
      for (auto &k : x->kids)
        if (std::find(r.kids.begin(), r.kids.end(), k) == r.kids.end()) r.kids.push_back(k);
    } else if (std::find(r.kids.begin(), r.kids.end(), *x) == r.kids.end()) {
      r.kids.push_back(std::move(*x));
    }
  }
  if (r.kids.size() == 1) return r.kids[0];
  return r;
}

Regex Regex::star(Regex a) {
  if (a.kind == Kind::empty || a.kind == Kind::eps) return epsilon();
  if (a.kind == Kind::star) return a;
  if (a.kind == Kind::plus) return star(std::move(a.kids[0]));
  return {Kind::star, 0, {std::move(a)}};
}

Regex Regex::plus(Regex a) {
  if (a.kind == Kind::empty) return none();
  if (a.kind == Kind::eps) return epsilon();
  if (a.kind == Kind::star || a.kind == Kind::plus) return a;
  return {Kind::plus, 0, {std::move(a)}};
}

namespace {

struct Tok {
  enum Kind { lpar, rpar, bar, star, plus, word, end } kind;
  std::string text;
  std::size_t pos;
};

std::vector<Tok> lex(std::string_view s) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    switch (c) {
    case '(': out.push_back({Tok::lpar, "(", i++}); continue;
    case ')': out.push_back({Tok::rpar, ")", i++}); continue;
    case '|': out.push_back({Tok::bar, "|", i++}); continue;
    case '*': out.push_back({Tok::star, "*", i++}); continue;
    case '+': out.push_back({Tok::plus, "+", i++}); continue;
    default: break;
    }
    std::size_t j = i;
    if (c == '[') {
      j = s.find(']', i);
      if (j == std::string_view::npos)
        throw Error(Errc::malformed_regex, "unterminated '[' at column " + std::to_string(i + 1));
      ++j;
    } else {
      while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) &&
             std::string_view("()|*+[").find(s[j]) == std::string_view::npos)
        ++j;
    }
    out.push_back({Tok::word, std::string(s.substr(i, j - i)), i});
    i = j;
  }
  out.push_back({Tok::end, "", s.size()});
  return out;
}

class Parser {
public:
  Parser(std::vector<Tok> toks, const TokenResolver &r) : toks_(std::move(toks)), resolve_(r) {}

  Regex parse() {
    auto r = alt();
    if (peek().kind != Tok::end) fail("unexpected '" + peek().text + "'");
    return r;
  }

private:
  const Tok &peek() const { return toks_[i_]; }
  [[noreturn]] void fail(const std::string &m) const {
    throw Error(Errc::malformed_regex, m + " at column " + std::to_string(peek().pos + 1));
  }

  Regex alt() {
    Regex r = cat();
    while (peek().kind == Tok::bar) {
      ++i_;
      r = Regex::alt(std::move(r), cat());
    }
    return r;
  }

  Regex cat() {
    if (peek().kind != Tok::word && peek().kind != Tok::lpar) fail("expected an expression");
    Regex r = Regex::epsilon();
    while (peek().kind == Tok::word || peek().kind == Tok::lpar) r = Regex::cat(std::move(r), post());
    return r;
  }

  // a postfix operator after a multi-letter token binds to its last letter
  Regex post() {
    Regex head = Regex::epsilon();
    Regex r = atom(&head);
    for (;;) {
      if (peek().kind == Tok::star) {
        ++i_;
        r = Regex::star(std::move(r));
      } else if (peek().kind == Tok::plus) {
        ++i_;
        r = Regex::plus(std::move(r));
      } else {
        return Regex::cat(std::move(head), std::move(r));
      }
    }
  }

  Regex atom(Regex *head) {
    if (peek().kind == Tok::lpar) {
      ++i_;
      Regex r = alt();
      if (peek().kind != Tok::rpar) fail("expected ')'");
      ++i_;
      return r;
    }
    const auto &t = toks_[i_++];
    if (t.text == "eps") return Regex::epsilon();
    std::vector<Symbol> syms;
    try {
      syms = resolve_(t.text);
    } catch (const Error &e) {
      throw Error(Errc::malformed_regex,
                  std::string(e.what()) + " at column " + std::to_string(t.pos + 1));
    }
    if (syms.empty()) return Regex::epsilon();
    for (std::size_t k = 0; k + 1 < syms.size(); ++k) *head = Regex::cat(std::move(*head), Regex::symbol(syms[k]));
    return Regex::symbol(syms.back());
  }

  std::vector<Tok> toks_;
  const TokenResolver &resolve_;
  std::size_t i_ = 0;
};

} // namespace

Regex parse_regex(std::string_view text, const TokenResolver &resolve) {
  return Parser(lex(text), resolve).parse();
}

Nfa regex_to_nfa(const Regex &r, std::uint32_t k) {
  switch (r.kind) {
  case Regex::Kind::empty: {
    Nfa n(k);
    n.add_initial(n.add_state(false));
    return n;
  }
  case Regex::Kind::eps: return nfa_word(k, {});
  case Regex::Kind::sym: return nfa_word(k, {r.sym});
  case Regex::Kind::cat: {
    Nfa n = regex_to_nfa(r.kids[0], k);
    for (std::size_t i = 1; i < r.kids.size(); ++i) n = nfa_concat(n, regex_to_nfa(r.kids[i], k));
    return n;
  }
  case Regex::Kind::alt: {
    Nfa n = regex_to_nfa(r.kids[0], k);
    for (std::size_t i = 1; i < r.kids.size(); ++i) n = nfa_union(n, regex_to_nfa(r.kids[i], k));
    return n;
  }
  case Regex::Kind::star: return nfa_star(regex_to_nfa(r.kids[0], k));
  case Regex::Kind::plus: {
    Nfa a = regex_to_nfa(r.kids[0], k);
    return nfa_concat(a, nfa_star(a));
  }
  }
  return Nfa(k);
}

Dfa compile_regex(std::string_view text, const TokenResolver &resolve, std::uint32_t k) {
  return minimize(determinize(regex_to_nfa(parse_regex(text, resolve), k)));
}

Regex dfa_to_regex(const Dfa &d0) {
  Dfa d = trim(d0);
  if (d.init() < 0) return Regex::none();
  const std::uint32_t n = d.size();
  const std::uint32_t S = n, F = n + 1;
  std::map<std::pair<std::uint32_t, std::uint32_t>, Regex> R;
  auto add = [&](std::uint32_t p, std::uint32_t q, Regex r) {
    auto it = R.find({p, q});
    if (it == R.end())
      R.emplace(std::make_pair(p, q), std::move(r));
    else
      it->second = Regex::alt(std::move(it->second), std::move(r));
  };
  add(S, static_cast<std::uint32_t>(d.init()), Regex::epsilon());
  for (std::uint32_t s = 0; s < n; ++s) {
    if (d.is_final(s)) add(s, F, Regex::epsilon());
    for (Symbol a = 0; a < d.num_symbols(); ++a) {
      auto t = d.next(s, a);
      if (t >= 0) add(s, static_cast<std::uint32_t>(t), Regex::symbol(a));
    }
  }
  std::vector<char> gone(n, 0);
  for (std::uint32_t round = 0; round < n; ++round) {
    // cheapest state first: fewest in*out edges, ties by id
    std::int64_t best = -1, best_cost = 0;
    for (std::uint32_t k = 0; k < n; ++k) {
      if (gone[k]) continue;
      std::int64_t in = 0, out = 0;
      for (const auto &[pq, r] : R) {
        if (pq.first == k && pq.second != k) ++out;
        if (pq.second == k && pq.first != k) ++in;
      }
      if (best < 0 || in * out < best_cost) {
        best = k;
        best_cost = in * out;
      }
    }
    auto k = static_cast<std::uint32_t>(best);
    gone[k] = 1;
    Regex loop = Regex::epsilon();
    if (auto it = R.find({k, k}); it != R.end()) loop = Regex::star(it->second);
    std::vector<std::pair<std::uint32_t, Regex>> ins, outs;
    for (const auto &[pq, r] : R) {
      if (pq.second == k && pq.first != k) ins.emplace_back(pq.first, r);
      if (pq.first == k && pq.second != k) outs.emplace_back(pq.second, r);
    }
    for (auto it = R.begin(); it != R.end();)
      it = (it->first.first == k || it->first.second == k) ? R.erase(it) : std::next(it);
    for (const auto &[p, rin] : ins)
      for (const auto &[q, rout] : outs) add(p, q, Regex::cat(Regex::cat(rin, loop), rout));
  }
  auto it = R.find({S, F});
  return it == R.end() ? Regex::none() : it->second;
}

namespace {

void print(const Regex &r, const std::function<std::string(Symbol)> &name, int prec,
           std::string &out) {
  using K = Regex::Kind;
  auto sep = [&] {
    if (!out.empty() && out.back() != '(' && out.back() != '|') out += ' ';
  };
  switch (r.kind) {
  case K::empty: sep(); out += "()"; return; // not produced by the parser
  case K::eps: sep(); out += "eps"; return;
  case K::sym: sep(); out += name(r.sym); return;
  case K::cat: {
    bool par = prec > 1;
    if (par) { sep(); out += '('; }
    for (const auto &k : r.kids) print(k, name, 1, out);
    if (par) out += ')';
    return;
  }
  case K::alt: {
    bool par = prec > 0;
    if (par) { sep(); out += '('; }
    for (std::size_t i = 0; i < r.kids.size(); ++i) {
      if (i) out += '|';
      print(r.kids[i], name, 0, out);
    }
    if (par) out += ')';
    return;
  }
  case K::star:
  case K::plus:
    print(r.kids[0], name, 2, out);
    out += r.kind == K::star ? '*' : '+';
    return;
  }
}

} // namespace

std::string regex_string(const Regex &r, const std::function<std::string(Symbol)> &name) {
  std::string out;
  print(r, name, 0, out);
  return out;
}

} // namespace ibfifo
