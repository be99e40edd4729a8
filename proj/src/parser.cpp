#include <cctype>

#include "tempered/poly.hpp"

namespace tempered {

namespace {

// Recursive descent over
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := integer ['/' integer] | 'x' index ['^' posint] | '(' expr ')'
class Parser {
 public:
  Parser(std::string_view text, int m) : text_(text), m_(m) {}

  MultiPoly parse() {
    MultiPoly f = expr();
    skip();
    if (pos_ != text_.size()) throw ParseError("unexpected character", pos_);
    return f;
  }

 private:
  void skip() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Integer integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (start == pos_) throw ParseError("expected integer", start);
    return Integer(std::string(text_.substr(start, pos_ - start)));
  }

  MultiPoly expr() {
    bool negate = accept('-');
    MultiPoly f = term();
    if (negate) f = -f;
    while (true) {
      if (accept('+')) f += term();
      else if (accept('-')) f -= term();
      else return f;
    }
  }

  MultiPoly term() {
    MultiPoly f = factor();
    while (accept('*')) f = f * factor();
    return f;
  }

  MultiPoly factor() {
    skip();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      MultiPoly f = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return f;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Integer num = integer();
      Integer den(1);
      if (accept('/')) {
        std::size_t at = pos_;
        den = integer();
        if (den == 0) throw ParseError("zero denominator", at);
      }
      Rational q(num, den);
      q.canonicalize();
      return MultiPoly::constant(m_, q);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      int index = -1;
      if (name.size() >= 2 && name[0] == 'x' &&
          name.find_first_not_of("0123456789", 1) == std::string::npos)
        index = std::stoi(name.substr(1));
      if (index < 0 || index >= m_)
        throw UnknownVariable("unknown variable '" + name + "' at position " +
                              std::to_string(start));
      int e = 1;
      if (accept('^')) {
        std::size_t at = pos_;
        Integer n = integer();
        if (n < 1 || n > 10000) throw ParseError("exponent must be a positive integer", at);
        e = static_cast<int>(n.get_si());
      }
      Exponent ex(m_, 0);
      ex[index] = e;
      return MultiPoly::monomial(m_, std::move(ex), Rational(1));
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  std::string_view text_;
  int m_;
  std::size_t pos_ = 0;
};

}  // namespace

MultiPoly parse_poly(std::string_view text, int m) {
  if (m < 0) throw std::invalid_argument("negative variable count");
  return Parser(text, m).parse();
}

PolyMap parse_poly_map(const std::vector<std::string>& texts, int m) {
  std::vector<MultiPoly> comps;
  for (const auto& t : texts) comps.push_back(parse_poly(t, m));
  return PolyMap(std::move(comps));
}

}  // namespace tempered
