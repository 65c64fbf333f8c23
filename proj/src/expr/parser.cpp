#include <cctype>
#include <cstdio>
#include <cstdlib>

#include "resdet/expr.hpp"

namespace resdet::expr {

ExprPtr Expr::number(cplx v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Number;
  e->value = v;
  return e;
}

ExprPtr Expr::leaf(Kind k, int a, int b) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->a = a;
  e->b = b;
  return e;
}

ExprPtr Expr::unary(Kind k, ExprPtr child, int a) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->a = a;
  e->children.push_back(std::move(child));
  return e;
}

ExprPtr Expr::binary(Kind k, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->children.push_back(std::move(l));
  e->children.push_back(std::move(r));
  return e;
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

std::string located(SourcePosition pos, const std::string& msg) {
  return "line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) + ": " + msg;
}

}  // namespace

ParseError::ParseError(ErrorKind kind, SourcePosition pos, std::vector<std::string> expected,
                       const std::string& message)
    : Error(kind, located(pos, expected.empty() ? message : message + "; expected one of: " + join(expected))),
      pos_(pos),
      expected_(std::move(expected)) {}

namespace {

enum class Tok { Number, Imag, Ident, LParen, RParen, LBracket, RBracket, Comma, Plus, Minus, Star, Slash, Caret, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  double number = 0.0;
  bool integral = false;
  SourcePosition pos;
};

std::string describe(const Token& t) {
  switch (t.type) {
    case Tok::End: return "end of input";
    case Tok::Number:
    case Tok::Imag: return "number '" + t.text + "'";
    case Tok::Ident: return "identifier '" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t;
    t.pos = {line_, col_};
    if (i_ >= src_.size()) return t;
    const char c = src_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))))
      return lex_number(t);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) ++j;
      t.type = Tok::Ident;
      t.text = std::string(src_.substr(i_, j - i_));
      advance(j - i_);
      return t;
    }
    static const std::string_view singles = "()[],+-*/^";
    static const Tok types[] = {Tok::LParen, Tok::RParen, Tok::LBracket, Tok::RBracket, Tok::Comma,
                                Tok::Plus,   Tok::Minus,  Tok::Star,     Tok::Slash,    Tok::Caret};
    const auto k = singles.find(c);
    if (k == std::string_view::npos)
      throw ParseError(ErrorKind::SyntaxError, t.pos, {}, std::string("unexpected character '") + c + "'");
    t.type = types[k];
    t.text = std::string(1, c);
    advance(1);
    return t;
  }

  SourcePosition end_position() const { return {line_, col_}; }

 private:
  void advance(std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      if (src_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++i_;
    }
  }

  void skip_space() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) advance(1);
  }

  Token lex_number(Token t) {
    std::size_t j = i_;
    auto digits = [&] {
      while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
    };
    digits();
    bool integral = true;
    if (j < src_.size() && src_[j] == '.') {
      integral = false;
      ++j;
      digits();
    }
    if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
      std::size_t k = j + 1;
      if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
      if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
        integral = false;
        j = k;
        digits();
      }
    }
    t.text = std::string(src_.substr(i_, j - i_));
    t.number = std::strtod(t.text.c_str(), nullptr);
    t.integral = integral;
    t.type = Tok::Number;
    if (j < src_.size() && src_[j] == 'i' &&
        !(j + 1 < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j + 1])) || src_[j + 1] == '_'))) {
      t.type = Tok::Imag;
      t.text += 'i';
      ++j;
    }
    advance(j - i_);
    return t;
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

const std::vector<std::string> kOperandStart = {"number", "identifier", "'('", "'-'"};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

  ExprPtr parse_all() {
    ExprPtr e = expression();
    if (tok_.type != Tok::End) fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
    return e;
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected) {
    throw ParseError(ErrorKind::SyntaxError, tok_.pos, std::move(expected), "unexpected " + describe(tok_));
  }

  void shift() { tok_ = lex_.next(); }

  void expect(Tok type, const std::string& name) {
    if (tok_.type != type) fail({name});
    shift();
  }

  ExprPtr expression() {
    ExprPtr l = term();
    while (tok_.type == Tok::Plus || tok_.type == Tok::Minus) {
      const Kind k = tok_.type == Tok::Plus ? Kind::Add : Kind::Sub;
      shift();
      l = Expr::binary(k, l, term());
    }
    return l;
  }

  ExprPtr term() {
    ExprPtr l = unary();
    while (tok_.type == Tok::Star || tok_.type == Tok::Slash) {
      const Kind k = tok_.type == Tok::Star ? Kind::Mul : Kind::Div;
      shift();
      l = Expr::binary(k, l, unary());
    }
    return l;
  }

  ExprPtr unary() {
    if (tok_.type == Tok::Minus) {
      shift();
      return Expr::unary(Kind::Neg, unary());
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (tok_.type != Tok::Caret) return base;
    shift();
    return Expr::unary(Kind::Pow, base, exponent());
  }

  int exponent() {
    bool paren = false;
    if (tok_.type == Tok::LParen) {
      paren = true;
      shift();
    }
    bool negative = false;
    if (tok_.type == Tok::Minus) {
      negative = true;
      shift();
    }
    if (tok_.type != Tok::Number || !tok_.integral) fail({"integer exponent"});
    const int k = static_cast<int>(tok_.number);
    shift();
    if (paren) expect(Tok::RParen, "')'");
    return negative ? -k : k;
  }

  int index_literal() {
    if (tok_.type != Tok::Number || !tok_.integral || tok_.number < 1 || tok_.number > kMaxDim)
      fail({"index 1..4"});
    const int k = static_cast<int>(tok_.number);
    shift();
    return k;
  }

  ExprPtr primary() {
    switch (tok_.type) {
      case Tok::Number: {
        const double v = tok_.number;
        shift();
        return Expr::number(v);
      }
      case Tok::Imag: {
        const double v = tok_.number;
        shift();
        return Expr::number(cplx(0.0, v));
      }
      case Tok::LParen: {
        shift();
        ExprPtr e = expression();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: return identifier();
      default: fail(kOperandStart);
    }
  }

  ExprPtr identifier() {
    const Token id = tok_;
    const std::string& name = id.text;
    shift();
    if (name == "i") return Expr::number(cplx(0.0, 1.0));
    if (name == "pi") return Expr::number(3.14159265358979323846);
    if (name == "I") return Expr::leaf(Kind::Identity);
    if (name == "sqrtdetg") return Expr::leaf(Kind::SqrtDetG);
    if (name == "absxi_g") return Expr::leaf(Kind::AbsXiG);
    if (name == "absxi") return Expr::leaf(Kind::AbsXi);
    if (name == "mat") return matrix();
    if (name == "x" || name == "xi") {
      expect(Tok::LParen, "'('");
      const int k = index_literal();
      expect(Tok::RParen, "')'");
      return Expr::leaf(name == "x" ? Kind::X : Kind::Xi, k);
    }
    if (name == "gup") {
      expect(Tok::LParen, "'('");
      const int i = index_literal();
      expect(Tok::Comma, "','");
      const int j = index_literal();
      expect(Tok::RParen, "')'");
      return Expr::leaf(Kind::Gup, i, j);
    }
    if (name == "cos" || name == "sin" || name == "exp") {
      expect(Tok::LParen, "'('");
      const SourcePosition at = tok_.pos;
      ExprPtr arg = expression();
      expect(Tok::RParen, "')'");
      if (depends_on_xi(*arg))
        throw ParseError(ErrorKind::SyntaxError, at, {"x-only expression"},
                         name + " accepts only expressions in x");
      const Kind k = name == "cos" ? Kind::Cos : name == "sin" ? Kind::Sin : Kind::Exp;
      return Expr::unary(k, arg);
    }
    if (name == "pos" || name == "neg") {
      expect(Tok::LParen, "'('");
      if (tok_.type != Tok::Ident || tok_.text != "xi") fail({"xi(k)"});
      shift();
      expect(Tok::LParen, "'('");
      const int k = index_literal();
      expect(Tok::RParen, "')'");
      expect(Tok::RParen, "')'");
      return Expr::leaf(name == "pos" ? Kind::PosRay : Kind::NegRay, k);
    }
    throw ParseError(ErrorKind::UnknownIdentifier, id.pos, {}, "unknown identifier '" + name + "'");
  }

  ExprPtr matrix() {
    expect(Tok::LBracket, "'['");
    std::vector<std::vector<ExprPtr>> rows;
    do {
      if (!rows.empty()) shift();
      expect(Tok::LBracket, "'['");
      std::vector<ExprPtr> row;
      const SourcePosition at = tok_.pos;
      row.push_back(expression());
      while (tok_.type == Tok::Comma) {
        shift();
        row.push_back(expression());
      }
      expect(Tok::RBracket, "']'");
      if (!rows.empty() && row.size() != rows[0].size())
        throw ParseError(ErrorKind::SyntaxError, at, {}, "matrix rows have different lengths");
      rows.push_back(std::move(row));
    } while (tok_.type == Tok::Comma);
    expect(Tok::RBracket, "']'");
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Matrix;
    e->a = static_cast<int>(rows.size());
    e->b = static_cast<int>(rows[0].size());
    for (auto& r : rows)
      for (auto& c : r) e->children.push_back(std::move(c));
    return e;
  }

  Lexer lex_;
  Token tok_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int precedence(const Expr& e) {
  switch (e.kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    case Kind::Number:
      // a literal with both parts prints as a sum
      return (e.value.real() != 0.0 && e.value.imag() != 0.0) || e.value.real() < 0.0 || e.value.imag() < 0.0
                 ? 1
                 : 5;
    default: return 5;
  }
}

std::string print_number(cplx v) {
  if (v.imag() == 0.0) return v.real() < 0.0 ? "-" + fmt(-v.real()) : fmt(v.real());
  const std::string im = fmt(std::abs(v.imag())) + "i";
  if (v.real() == 0.0) return v.imag() < 0.0 ? "-" + im : im;
  return fmt(v.real()) + (v.imag() < 0.0 ? " - " : " + ") + im;
}

std::string wrap(const Expr& e, bool paren) {
  const std::string s = print(e);
  return paren ? "(" + s + ")" : s;
}

}  // namespace

ExprPtr parse(std::string_view source) { return Parser(source).parse_all(); }

std::string print(const Expr& e) {
  switch (e.kind) {
    case Kind::Number: return print_number(e.value);
    case Kind::X: return "x(" + std::to_string(e.a) + ")";
    case Kind::Xi: return "xi(" + std::to_string(e.a) + ")";
    case Kind::Gup: return "gup(" + std::to_string(e.a) + "," + std::to_string(e.b) + ")";
    case Kind::SqrtDetG: return "sqrtdetg";
    case Kind::AbsXiG: return "absxi_g";
    case Kind::AbsXi: return "absxi";
    case Kind::Identity: return "I";
    case Kind::Matrix: {
      std::string s = "mat[";
      for (int r = 0; r < e.a; ++r) {
        s += r ? ",[" : "[";
        for (int c = 0; c < e.b; ++c) s += (c ? "," : "") + print(*e.children[r * e.b + c]);
        s += "]";
      }
      return s + "]";
    }
    case Kind::Neg: return "-" + wrap(*e.children[0], precedence(*e.children[0]) < 3);
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      const int p = precedence(e);
      const char* op = e.kind == Kind::Add ? " + " : e.kind == Kind::Sub ? " - " : e.kind == Kind::Mul ? "*" : "/";
      return wrap(*e.children[0], precedence(*e.children[0]) < p) + op +
             wrap(*e.children[1], precedence(*e.children[1]) <= p);
    }
    case Kind::Pow: return wrap(*e.children[0], precedence(*e.children[0]) < 5) + "^" + std::to_string(e.a);
    case Kind::Cos: return "cos(" + print(*e.children[0]) + ")";
    case Kind::Sin: return "sin(" + print(*e.children[0]) + ")";
    case Kind::Exp: return "exp(" + print(*e.children[0]) + ")";
    case Kind::PosRay: return "pos(xi(" + std::to_string(e.a) + "))";
    case Kind::NegRay: return "neg(xi(" + std::to_string(e.a) + "))";
  }
  return "?";
}

bool equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.a != b.a || a.b != b.b || a.value != b.value) return false;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!equal(*a.children[i], *b.children[i])) return false;
  return true;
}

bool depends_on_x(const Expr& e, bool flat_metric) {
  switch (e.kind) {
    case Kind::X: return true;
    case Kind::Gup:
    case Kind::SqrtDetG:
    case Kind::AbsXiG: return !flat_metric;
    default: break;
  }
  for (const auto& c : e.children)
    if (depends_on_x(*c, flat_metric)) return true;
  return false;
}

bool depends_on_xi(const Expr& e) {
  switch (e.kind) {
    case Kind::Xi:
    case Kind::AbsXiG:
    case Kind::AbsXi:
    case Kind::PosRay:
    case Kind::NegRay: return true;
    default: break;
  }
  for (const auto& c : e.children)
    if (depends_on_xi(*c)) return true;
  return false;
}

int max_index(const Expr& e) {
  int m = 0;
  switch (e.kind) {
    case Kind::X:
    case Kind::Xi:
    case Kind::PosRay:
    case Kind::NegRay: m = e.a; break;
    case Kind::Gup: m = std::max(e.a, e.b); break;
    default: break;
  }
  for (const auto& c : e.children) m = std::max(m, max_index(*c));
  return m;
}

}  // namespace resdet::expr
