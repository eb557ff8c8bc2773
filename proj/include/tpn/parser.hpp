#pragma once

// Line-oriented net description format.
//
//   net ptpn <name>
//   place <id> [<lo>,<hi>] [marked]          # hi may be "inf"
//   trans <id> pre <id>* post <id>*
//
//   net atpn <name>
//   place <id> [marked]
//   trans <id> pre <id>:[<lo>,<hi>]* post <id>*
//
// '#' starts a comment. Declarations may appear in any order after the header.

#include <cctype>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tpn/net.hpp"

namespace tpn {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error(format(line, column, what)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(std::size_t line, std::size_t column, const std::string& what) {
    if (line == 0) return what;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + what;
  }
  std::size_t line_;
  std::size_t column_;
};

using AnyNet = std::variant<PNet, ANet>;

namespace detail {

struct Token {
  enum Kind { ident, number, lbracket, rbracket, comma, colon } kind;
  std::string text;
  std::size_t column;
};

inline bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline std::vector<Token> tokenize(std::string_view line, std::size_t lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t col = i + 1;
    switch (c) {
      case '[': out.push_back({Token::lbracket, "[", col}); ++i; continue;
      case ']': out.push_back({Token::rbracket, "]", col}); ++i; continue;
      case ',': out.push_back({Token::comma, ",", col}); ++i; continue;
      case ':': out.push_back({Token::colon, ":", col}); ++i; continue;
      default: break;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < line.size() && ident_char(line[j])) ++j;
      out.push_back({Token::ident, std::string(line.substr(i, j - i)), col});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < line.size() &&
             (std::isdigit(static_cast<unsigned char>(line[j])) || line[j] == '.' || line[j] == '/'))
        ++j;
      out.push_back({Token::number, std::string(line.substr(i, j - i)), col});
      i = j;
    } else {
      throw ParseError(lineno, col, std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

class LineCursor {
 public:
  LineCursor(std::vector<Token> tokens, std::size_t lineno, std::size_t line_length)
      : tokens_(std::move(tokens)), lineno_(lineno), end_column_(line_length + 1) {}

  bool done() const { return pos_ >= tokens_.size(); }
  const Token* peek() const { return done() ? nullptr : &tokens_[pos_]; }
  std::size_t column() const { return done() ? end_column_ : tokens_[pos_].column; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(lineno_, column(), what); }

  const Token& expect(Token::Kind kind, const char* what) {
    if (done() || tokens_[pos_].kind != kind) fail(std::string("expected ") + what);
    return tokens_[pos_++];
  }
  bool accept_ident(std::string_view word) {
    if (!done() && tokens_[pos_].kind == Token::ident && tokens_[pos_].text == word) {
      ++pos_;
      return true;
    }
    return false;
  }

  Interval interval() {
    expect(Token::lbracket, "'['");
    const std::size_t start = column();
    const Rational lo = rational("lower bound");
    expect(Token::comma, "','");
    std::optional<Rational> hi;
    if (accept_ident("inf")) {
      hi.reset();
    } else {
      hi = rational("upper bound");
    }
    expect(Token::rbracket, "']'");
    if (hi && *hi < lo) throw ParseError(lineno_, start, "empty interval");
    return Interval(lo, hi);
  }

 private:
  Rational rational(const char* what) {
    const Token& tok = expect(Token::number, what);
    try {
      return Rational::parse(tok.text);
    } catch (const std::exception&) {
      throw ParseError(lineno_, tok.column, "malformed number '" + tok.text + "'");
    }
  }

  std::vector<Token> tokens_;
  std::size_t lineno_;
  std::size_t end_column_;
  std::size_t pos_ = 0;
};

struct PendingRef {
  std::string id;
  std::size_t line;
  std::size_t column;
};

inline bool reserved(const std::string& id) {
  return id == "pre" || id == "post" || id == "marked" || id == "inf" || id == "net" ||
         id == "place" || id == "trans" || id == "Err";
}

}  // namespace detail

/// Parses a net description. Throws ParseError with a line/column position
/// for syntax errors and with the offending id for semantic errors.
inline AnyNet parse_net(std::istream& in) {
  using detail::Token;
  enum class Kind { none, ptpn, atpn } kind = Kind::none;
  NetStructure structure;
  std::vector<Interval> isp;
  std::map<std::string, std::size_t> place_ids;
  std::map<std::string, std::size_t> trans_ids;
  struct PendingTrans {
    std::vector<std::pair<detail::PendingRef, std::optional<Interval>>> pre;
    std::vector<detail::PendingRef> post;
  };
  std::vector<PendingTrans> pending;

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    detail::LineCursor cur(detail::tokenize(raw, lineno), lineno, raw.size());
    if (cur.done()) continue;
    const Token& kw = cur.expect(Token::ident, "keyword");

    if (kind == Kind::none) {
      if (kw.text != "net") throw ParseError(lineno, kw.column, "no net header");
      const Token& k = cur.expect(Token::ident, "net kind 'ptpn' or 'atpn'");
      if (k.text == "ptpn") kind = Kind::ptpn;
      else if (k.text == "atpn") kind = Kind::atpn;
      else throw ParseError(lineno, k.column, "unknown net kind '" + k.text + "'");
      structure.name = cur.expect(Token::ident, "net name").text;
      if (!cur.done()) cur.fail("trailing input after net header");
      continue;
    }

    if (kw.text == "net") throw ParseError(lineno, kw.column, "duplicate net header");

    if (kw.text == "place") {
      const Token& id = cur.expect(Token::ident, "place id");
      if (detail::reserved(id.text)) throw ParseError(lineno, id.column, "reserved id '" + id.text + "'");
      if (place_ids.count(id.text) || trans_ids.count(id.text))
        throw ParseError(lineno, id.column, "duplicate id '" + id.text + "'");
      Interval iv;
      if (kind == Kind::ptpn) iv = cur.interval();
      bool marked = false;
      if (cur.accept_ident("marked")) marked = true;
      if (!cur.done()) cur.fail("trailing input in place declaration");
      const std::size_t index = structure.places.size();
      place_ids.emplace(id.text, index);
      structure.places.push_back(id.text);
      isp.push_back(iv);
      if (marked) structure.m0.insert(index);
    } else if (kw.text == "trans") {
      const Token& id = cur.expect(Token::ident, "transition id");
      if (detail::reserved(id.text)) throw ParseError(lineno, id.column, "reserved id '" + id.text + "'");
      if (place_ids.count(id.text) || trans_ids.count(id.text))
        throw ParseError(lineno, id.column, "duplicate id '" + id.text + "'");
      PendingTrans pt;
      if (!cur.accept_ident("pre")) cur.fail("expected 'pre'");
      while (!cur.done() && !(cur.peek()->kind == Token::ident && cur.peek()->text == "post")) {
        const Token& ref = cur.expect(Token::ident, "place id");
        std::optional<Interval> iv;
        if (kind == Kind::atpn) {
          cur.expect(Token::colon, "':' and arc interval");
          iv = cur.interval();
        }
        pt.pre.push_back({{ref.text, lineno, ref.column}, iv});
      }
      if (!cur.accept_ident("post")) cur.fail("expected 'post'");
      while (!cur.done()) {
        const Token& ref = cur.expect(Token::ident, "place id");
        pt.post.push_back({ref.text, lineno, ref.column});
      }
      trans_ids.emplace(id.text, structure.transitions.size());
      structure.transitions.push_back(id.text);
      pending.push_back(std::move(pt));
    } else {
      throw ParseError(lineno, kw.column, "unknown declaration '" + kw.text + "'");
    }
  }
  if (kind == Kind::none) throw ParseError(0, 0, "no net header");

  auto resolve = [&](const detail::PendingRef& ref) {
    auto it = place_ids.find(ref.id);
    if (it == place_ids.end())
      throw ParseError(ref.line, ref.column, "undefined place '" + ref.id + "'");
    return it->second;
  };
  auto add_unique = [&](std::vector<std::size_t>& v, std::size_t p, const detail::PendingRef& ref) {
    if (std::find(v.begin(), v.end(), p) != v.end())
      throw ParseError(ref.line, ref.column, "place '" + ref.id + "' listed twice");
    v.push_back(p);
  };

  std::map<Arc, Interval> isa;
  for (std::size_t t = 0; t < pending.size(); ++t) {
    std::vector<std::size_t> pre, post;
    for (const auto& [ref, iv] : pending[t].pre) {
      const std::size_t p = resolve(ref);
      add_unique(pre, p, ref);
      if (iv) isa.emplace(Arc{p, t}, *iv);
    }
    for (const auto& ref : pending[t].post) add_unique(post, resolve(ref), ref);
    std::sort(pre.begin(), pre.end());
    std::sort(post.begin(), post.end());
    structure.pre.push_back(std::move(pre));
    structure.post.push_back(std::move(post));
  }

  if (kind == Kind::ptpn) {
    PNet net;
    static_cast<NetStructure&>(net) = std::move(structure);
    net.isp = std::move(isp);
    net.validate();
    return net;
  }
  ANet net;
  static_cast<NetStructure&>(net) = std::move(structure);
  net.isa = std::move(isa);
  net.validate();
  return net;
}

inline AnyNet parse_net(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_net(in);
}

namespace detail {
inline void print_structure_header(std::ostream& os, const NetStructure& net, const char* kind) {
  os << "net " << kind << ' ' << (net.name.empty() ? "unnamed" : net.name) << '\n';
}
}  // namespace detail

inline std::string print_net(const PNet& net) {
  std::ostringstream os;
  detail::print_structure_header(os, net, "ptpn");
  for (std::size_t p = 0; p < net.place_count(); ++p) {
    os << "place " << net.places[p] << ' ' << net.isp[p].str();
    if (net.m0.count(p)) os << " marked";
    os << '\n';
  }
  for (std::size_t t = 0; t < net.transition_count(); ++t) {
    os << "trans " << net.transitions[t] << " pre";
    for (auto p : net.pre[t]) os << ' ' << net.places[p];
    os << " post";
    for (auto p : net.post[t]) os << ' ' << net.places[p];
    os << '\n';
  }
  return os.str();
}

inline std::string print_net(const ANet& net) {
  std::ostringstream os;
  detail::print_structure_header(os, net, "atpn");
  for (std::size_t p = 0; p < net.place_count(); ++p) {
    os << "place " << net.places[p];
    if (net.m0.count(p)) os << " marked";
    os << '\n';
  }
  for (std::size_t t = 0; t < net.transition_count(); ++t) {
    os << "trans " << net.transitions[t] << " pre";
    for (auto p : net.pre[t]) os << ' ' << net.places[p] << ':' << net.arc_interval(p, t).str();
    os << " post";
    for (auto p : net.post[t]) os << ' ' << net.places[p];
    os << '\n';
  }
  return os.str();
}

inline bool operator==(const NetStructure& a, const NetStructure& b) {
  return a.name == b.name && a.places == b.places && a.transitions == b.transitions &&
         a.pre == b.pre && a.post == b.post && a.m0 == b.m0;
}
inline bool operator==(const PNet& a, const PNet& b) {
  return static_cast<const NetStructure&>(a) == static_cast<const NetStructure&>(b) && a.isp == b.isp;
}
inline bool operator==(const ANet& a, const ANet& b) {
  return static_cast<const NetStructure&>(a) == static_cast<const NetStructure&>(b) && a.isa == b.isa;
}

}  // namespace tpn
