#include "parser.hpp"

#include <cctype>
#include <cstdint>
#include <optional>

#include "errors.hpp"

namespace poisntt {

namespace {

struct Token {
  enum Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen,
              End } kind;
  std::string text;
  Rational value;
  int column = 0;  // 1-based
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    tok_.column = static_cast<int>(pos_) + 1;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::End;
      tok_.text = "<end of input>";
      return;
    }
    char c = src_[pos_];
    switch (c) {
      case '+': tok_.kind = Token::Plus; break;
      case '-': tok_.kind = Token::Minus; break;
      case '*': tok_.kind = Token::Star; break;
      case '/': tok_.kind = Token::Slash; break;
      case '^': tok_.kind = Token::Caret; break;
      case '(': tok_.kind = Token::LParen; break;
      case ')': tok_.kind = Token::RParen; break;
      default:
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
          lex_number();
          return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
          lex_ident();
          return;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'",
                         0, tok_.column);
    }
    tok_.text = std::string(1, c);
    ++pos_;
  }

  void lex_ident() {
    size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_')) {
      ++pos_;
    }
    tok_.kind = Token::Ident;
    tok_.text = std::string(src_.substr(start, pos_ - start));
  }

  // Integer, decimal, or scientific form, converted exactly to a rational.
  void lex_number() {
    size_t start = pos_;
    auto fail = [&]() {
      throw ParseError("malformed number '" +
                           std::string(src_.substr(start, pos_ - start)) + "'",
                       0, static_cast<int>(start) + 1);
    };
    __int128 mantissa = 0;
    int frac_digits = 0;
    bool any_digit = false;
    auto push_digit = [&](char d) {
      mantissa = mantissa * 10 + (d - '0');
      if (mantissa > static_cast<__int128>(INT64_MAX)) fail();
      any_digit = true;
    };
    while (pos_ < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      push_digit(src_[pos_++]);
    }
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        push_digit(src_[pos_++]);
        ++frac_digits;
      }
    }
    if (!any_digit) fail();
    int exponent = 0;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      size_t mark = pos_;
      ++pos_;
      int sign = 1;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
        if (src_[pos_] == '-') sign = -1;
        ++pos_;
      }
      if (pos_ >= src_.size() ||
          !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        // not an exponent after all ("2e" would otherwise eat the ident)
        pos_ = mark;
      } else {
        int ev = 0;
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          ev = ev * 10 + (src_[pos_] - '0');
          if (ev > 18) fail();
          ++pos_;
        }
        exponent = sign * ev;
      }
    }
    // value = mantissa * 10^(exponent - frac_digits)
    int shift = exponent - frac_digits;
    std::int64_t num = static_cast<std::int64_t>(mantissa);
    std::int64_t den = 1;
    while (shift > 0) {
      if (num > INT64_MAX / 10) fail();
      num *= 10;
      --shift;
    }
    while (shift < 0) {
      if (den > INT64_MAX / 10) fail();
      den *= 10;
      ++shift;
    }
    auto r = Rational::make(num, den);
    if (!r) fail();
    tok_.kind = Token::Number;
    tok_.value = *r;
    tok_.text = std::string(src_.substr(start, pos_ - start));
  }

  std::string_view src_;
  size_t pos_ = 0;
  Token tok_;
};

constexpr const char* kFunctions[] = {"sin", "cos", "exp", "ln", "sqrt",
                                      "abs"};

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> vars)
      : lex_(src), vars_(vars) {}

  Expr run() {
    Expr e = parse_expr();
    if (lex_.peek().kind != Token::End) {
      fail("expected operator or end of input");
    }
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) {
    const Token& t = lex_.peek();
    throw ParseError("syntax error: " + expected + ", found '" + t.text + "'",
                     0, t.column);
  }

  Expr parse_expr() {
    Expr e = parse_term();
    while (true) {
      Token::Kind k = lex_.peek().kind;
      if (k == Token::Plus) {
        lex_.take();
        e = Expr::add(std::move(e), parse_term());
      } else if (k == Token::Minus) {
        lex_.take();
        e = Expr::sub(std::move(e), parse_term());
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_unary();
    while (true) {
      Token::Kind k = lex_.peek().kind;
      if (k == Token::Star) {
        lex_.take();
        e = Expr::mul(std::move(e), parse_unary());
      } else if (k == Token::Slash) {
        lex_.take();
        e = Expr::div(std::move(e), parse_unary());
      } else {
        return e;
      }
    }
  }

  Expr parse_unary() {
    if (lex_.peek().kind == Token::Minus) {
      lex_.take();
      return Expr::neg(parse_unary());
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (lex_.peek().kind == Token::Caret) {
      Token caret = lex_.take();
      Expr expo = parse_unary();  // right-associative, sign allowed
      if (!expo.is_const()) {
        throw ParseError("exponent must be a rational constant", 0,
                         caret.column);
      }
      return Expr::pow(std::move(base), expo.const_value());
    }
    return base;
  }

  Expr parse_atom() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Token::Number: {
        Token num = lex_.take();
        return Expr::constant(num.value);
      }
      case Token::LParen: {
        lex_.take();
        Expr e = parse_expr();
        if (lex_.peek().kind != Token::RParen) fail("expected ')'");
        lex_.take();
        return e;
      }
      case Token::Ident: {
        Token id = lex_.take();
        if (lex_.peek().kind == Token::LParen) {
          int fn = -1;
          for (int i = 0; i < 6; ++i) {
            if (id.text == kFunctions[i]) fn = i;
          }
          if (fn < 0) {
            throw ParseError(
                "unknown function '" + id.text +
                    "' (expected sin, cos, exp, ln, sqrt or abs)",
                0, id.column);
          }
          lex_.take();  // '('
          Expr arg = parse_expr();
          if (lex_.peek().kind != Token::RParen) fail("expected ')'");
          lex_.take();
          switch (fn) {
            case 0: return Expr::sin(std::move(arg));
            case 1: return Expr::cos(std::move(arg));
            case 2: return Expr::exp(std::move(arg));
            case 3: return Expr::ln(std::move(arg));
            case 4: return Expr::sqrt(std::move(arg));
            default: return Expr::abs(std::move(arg));
          }
        }
        for (size_t i = 0; i < vars_.size(); ++i) {
          if (vars_[i] == id.text) {
            return Expr::variable(static_cast<int>(i));
          }
        }
        throw ParseError("unknown identifier '" + id.text + "'", 0,
                         id.column);
      }
      default:
        fail("expected number, identifier or '('");
    }
  }

  Lexer lex_;
  std::span<const std::string> vars_;
};

}  // namespace

Expr parse_expression(std::string_view source,
                      std::span<const std::string> vars) {
  return Parser(source, vars).run();
}

}  // namespace poisntt
