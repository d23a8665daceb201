#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "qcausal/locality.hpp"

namespace qcausal::locality {

ParseError::ParseError(std::vector<SyntaxIssue> issues)
    : std::runtime_error([&] {
        std::ostringstream os;
        for (std::size_t i = 0; i < issues.size(); ++i) {
          if (i) os << '\n';
          os << issues[i].line << ':' << issues[i].column << ": " << issues[i].message;
        }
        return os.str();
      }()),
      issues_(std::move(issues)) {}

namespace {

enum class Tok { Ident, Int, Punct, CellAbs, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End:
      return "end of input";
    case Tok::Int:
      return "number '" + t.text + "'";
    default:
      return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) {}

  std::vector<Token> run(std::vector<SyntaxIssue>& issues) {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= s_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = s_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                    s_[pos_] == '-'))
          advance();
        t.text = s_.substr(start, pos_ - start);
        t.kind = Tok::Ident;
        if (t.text == "cell" && pos_ < s_.size() && s_[pos_] == '@') {
          advance();
          t.text = "cell@";
          t.kind = Tok::CellAbs;
        }
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 ((c == '+' || c == '-') && pos_ + 1 < s_.size() &&
                  std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
        std::size_t start = pos_;
        advance();
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) advance();
        t.text = s_.substr(start, pos_ - start);
        t.kind = Tok::Int;
      } else if (std::string("{}(),;:.").find(c) != std::string::npos) {
        t.text = std::string(1, c);
        t.kind = Tok::Punct;
        advance();
      } else {
        issues.push_back({line_, col_, std::string("unexpected character '") + c + "'"});
        advance();
        continue;
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < s_.size()) {
      if (s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        advance();
      } else {
        break;
      }
    }
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

struct Abort {};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<SyntaxIssue>& issues) : t_(std::move(toks)), issues_(issues) {}

  ModelSpec parse() {
    ModelSpec spec;
    if (peek_ident("model")) {
      next();
      spec.name = expect_ident("model name");
    } else {
      error(peek(), "expected 'model'");
      return spec;
    }
    while (peek().kind != Tok::End) {
      try {
        if (peek_ident("object")) {
          spec.objects.push_back(object());
        } else if (peek_ident("law")) {
          spec.laws.push_back(law());
        } else {
          error(peek(), "expected 'object' or 'law', got " + describe(peek()));
          throw Abort{};
        }
      } catch (const Abort&) {
        recover();
      }
    }
    return spec;
  }

 private:
  const Token& peek() const { return t_[i_]; }
  const Token& next() { return t_[i_ < t_.size() - 1 ? i_++ : i_]; }
  bool peek_ident(const char* word) const { return peek().kind == Tok::Ident && peek().text == word; }
  bool peek_punct(char c) const { return peek().kind == Tok::Punct && peek().text[0] == c; }

  void error(const Token& at, std::string msg) { issues_.push_back({at.line, at.column, std::move(msg)}); }

  [[noreturn]] void fail(const std::string& expected) {
    error(peek(), "expected " + expected + ", got " + describe(peek()));
    throw Abort{};
  }

  std::string expect_ident(const std::string& what) {
    if (peek().kind != Tok::Ident) fail(what);
    return next().text;
  }

  void expect_punct(char c) {
    if (!peek_punct(c)) fail(std::string("'") + c + "'");
    next();
  }

  int expect_int() {
    if (peek().kind != Tok::Int) fail("integer");
    return std::stoi(next().text);
  }

  // skip to the end of the current block (or the next top-level keyword)
  void recover() {
    int depth = 0;
    while (peek().kind != Tok::End) {
      if (depth == 0 && (peek_ident("object") || peek_ident("law"))) return;
      if (peek_punct('{')) ++depth;
      if (peek_punct('}')) {
        next();
        if (--depth <= 0) return;
        continue;
      }
      next();
    }
  }

  ObjectDecl object() {
    next();
    ObjectDecl o;
    o.id = expect_ident("object id");
    expect_punct('{');
    if (peek_ident("globals")) {
      next();
      expect_punct(':');
      o.globals.push_back(expect_ident("attribute name"));
      while (peek_punct(',')) {
        next();
        o.globals.push_back(expect_ident("attribute name"));
      }
      if (peek_punct(';')) next();
    }
    expect_punct('}');
    return o;
  }

  LawSpec law() {
    const auto line = next().line;
    LawSpec l;
    l.line = line;
    l.id = expect_ident("law id");
    expect_punct('{');
    while (!peek_punct('}')) {
      std::vector<AccessRef>* target = nullptr;
      if (peek_ident("reads"))
        target = &l.footprint.reads;
      else if (peek_ident("writes"))
        target = &l.footprint.writes;
      else
        fail("'reads', 'writes' or '}'");
      next();
      expect_punct(':');
      if (!peek_punct(';')) {
        target->push_back(ref());
        while (peek_punct(',')) {
          next();
          target->push_back(ref());
        }
      }
      expect_punct(';');
    }
    expect_punct('}');
    return l;
  }

  std::vector<int> int_tuple() {
    expect_punct('(');
    std::vector<int> v{expect_int()};
    while (peek_punct(',')) {
      next();
      v.push_back(expect_int());
    }
    expect_punct(')');
    return v;
  }

  AccessRef ref() {
    if (peek().kind == Tok::CellAbs) {
      next();
      return CellAbsolute{int_tuple()};
    }
    if (peek().kind != Tok::Ident) fail("access reference");
    const std::string word = next().text;
    if (word == "cell") return CellAt{int_tuple()};
    if (word == "space") return WholeSpace{};
    if (word == "objects") return WholeObjectSet{};
    if (word == "allpaths") {
      expect_punct('(');
      auto id = expect_ident("object id");
      expect_punct(')');
      return ObjectAllPaths{id};
    }
    if (word == "global") {
      expect_punct('(');
      auto id = expect_ident("object id");
      expect_punct('.');
      auto attr = expect_ident("attribute name");
      expect_punct(')');
      return ObjectGlobal{id, attr};
    }
    --i_;
    fail("access reference (cell, cell@, global, allpaths, space, objects)");
  }

  std::vector<Token> t_;
  std::size_t i_ = 0;
  std::vector<SyntaxIssue>& issues_;
};

void check_semantics(const ModelSpec& spec, std::vector<SyntaxIssue>& issues) {
  std::map<std::string, std::set<std::string>> objects;
  for (const auto& o : spec.objects) {
    if (objects.contains(o.id)) issues.push_back({0, 0, "duplicate object '" + o.id + "'"});
    objects[o.id].insert(o.globals.begin(), o.globals.end());
  }
  std::set<std::string> laws;
  for (const auto& l : spec.laws) {
    if (!laws.insert(l.id).second) issues.push_back({l.line, 1, "duplicate law id '" + l.id + "'"});
    const auto check = [&](const AccessRef& r) {
      if (const auto* g = std::get_if<ObjectGlobal>(&r)) {
        auto it = objects.find(g->object);
        if (it == objects.end())
          issues.push_back({l.line, 1, "law '" + l.id + "' references undeclared object '" + g->object + "'"});
        else if (!it->second.contains(g->attribute))
          issues.push_back({l.line, 1,
                            "law '" + l.id + "' references undeclared attribute '" + g->object + "." + g->attribute +
                                "'"});
      } else if (const auto* a = std::get_if<ObjectAllPaths>(&r)) {
        if (!objects.contains(a->object))
          issues.push_back({l.line, 1, "law '" + l.id + "' references undeclared object '" + a->object + "'"});
      }
    };
    for (const auto& r : l.footprint.reads) check(r);
    for (const auto& r : l.footprint.writes) check(r);
  }
}

std::string join_ints(const std::vector<int>& v, bool signed_form) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    if (signed_form && v[i] > 0) s += '+';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

ModelSpec parse_model_spec(const std::string& text) {
  std::vector<SyntaxIssue> issues;
  auto toks = Lexer(text).run(issues);
  Parser p(std::move(toks), issues);
  auto spec = p.parse();
  if (issues.empty()) check_semantics(spec, issues);
  if (!issues.empty()) throw ParseError(std::move(issues));
  return spec;
}

std::string pretty_print(const ModelSpec& spec) {
  std::ostringstream os;
  os << "model " << spec.name << "\n";
  for (const auto& o : spec.objects) {
    os << "\nobject " << o.id << " {";
    if (!o.globals.empty()) {
      os << " globals: ";
      for (std::size_t i = 0; i < o.globals.size(); ++i) os << (i ? ", " : "") << o.globals[i];
      os << ";";
    }
    os << " }\n";
  }
  for (const auto& l : spec.laws) {
    os << "\nlaw " << l.id << " {\n";
    const auto list = [&](const char* key, const std::vector<AccessRef>& refs) {
      os << "  " << key << ":";
      for (std::size_t i = 0; i < refs.size(); ++i) os << (i ? ", " : " ") << to_string(refs[i]);
      os << ";\n";
    };
    list("reads", l.footprint.reads);
    list("writes", l.footprint.writes);
    os << "}\n";
  }
  return os.str();
}

}  // namespace qcausal::locality

namespace qcausal {

std::string to_string(const AccessRef& ref) {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, CellAt>)
          return "cell(" + locality::join_ints(r.offset, true) + ")";
        else if constexpr (std::is_same_v<T, CellAbsolute>)
          return "cell@(" + locality::join_ints(r.point, false) + ")";
        else if constexpr (std::is_same_v<T, ObjectGlobal>)
          return "global(" + r.object + "." + r.attribute + ")";
        else if constexpr (std::is_same_v<T, ObjectAllPaths>)
          return "allpaths(" + r.object + ")";
        else if constexpr (std::is_same_v<T, WholeSpace>)
          return "space";
        else
          return "objects";
      },
      ref);
}

}  // namespace qcausal
