#include "cia/error.hpp"
#include "cia/io.hpp"

#include <cctype>
#include <cmath>
#include <numeric>

namespace cia {

namespace {

Rational normalized(long long num, long long den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {static_cast<int>(num), static_cast<int>(den)};
}

Rational rationalFromDecimal(double x, std::string_view token) {
  for (int den : {1, 2, 3, 4, 6, 8, 12}) {
    const double scaled = x * den;
    if (std::abs(scaled - std::round(scaled)) < 1e-4 * den) {
      return normalized(static_cast<long long>(std::llround(scaled)), den);
    }
  }
  throw Error(Errc::BadSymOp, "translation '" + std::string(token) + "' is not a simple fraction");
}

Rational add(Rational a, Rational b) {
  return normalized(static_cast<long long>(a.num) * b.den + static_cast<long long>(b.num) * a.den,
                    static_cast<long long>(a.den) * b.den);
}

void parseComponent(std::string_view expr, Eigen::Matrix3i& linear, int row, Rational& translation) {
  std::size_t pos = 0;
  auto skipSpace = [&] {
    while (pos < expr.size() && std::isspace(static_cast<unsigned char>(expr[pos]))) ++pos;
  };
  auto bad = [&](const std::string& why) {
    return Error(Errc::BadSymOp, why + " in '" + std::string(expr) + "'");
  };
  bool sawTerm = false;
  skipSpace();
  if (pos == expr.size()) throw bad("empty expression");
  while (pos < expr.size()) {
    skipSpace();
    int sign = 1;
    if (expr[pos] == '+' || expr[pos] == '-') {
      sign = expr[pos] == '-' ? -1 : 1;
      ++pos;
      skipSpace();
    } else if (sawTerm) {
      throw bad("expected '+' or '-' at offset " + std::to_string(pos));
    }
    if (pos >= expr.size()) throw bad("dangling sign");
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(expr[pos])));
    if (c == 'x' || c == 'y' || c == 'z') {
      linear(row, c - 'x') += sign;
      ++pos;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos;
      while (pos < expr.size() &&
             (std::isdigit(static_cast<unsigned char>(expr[pos])) || expr[pos] == '.')) {
        ++pos;
      }
      const std::string numText(expr.substr(start, pos - start));
      Rational value;
      skipSpace();
      if (pos < expr.size() && expr[pos] == '/') {
        ++pos;
        skipSpace();
        const std::size_t dstart = pos;
        while (pos < expr.size() && std::isdigit(static_cast<unsigned char>(expr[pos]))) ++pos;
        if (dstart == pos || numText.find('.') != std::string::npos) throw bad("malformed fraction");
        const long long den = std::stoll(std::string(expr.substr(dstart, pos - dstart)));
        if (den == 0) throw bad("zero denominator");
        value = normalized(std::stoll(numText), den);
      } else {
        try {
          value = rationalFromDecimal(std::stod(numText), numText);
        } catch (const std::invalid_argument&) {
          throw bad("malformed number '" + numText + "'");
        }
      }
      skipSpace();
      if (pos < expr.size() && (std::isalpha(static_cast<unsigned char>(expr[pos])) || expr[pos] == '*')) {
        throw bad("coefficients other than +-1 are not supported");
      }
      value.num *= sign;
      translation = add(translation, value);
    } else {
      throw bad(std::string("unexpected token '") + expr[pos] + "'");
    }
    sawTerm = true;
    skipSpace();
  }
  for (int col = 0; col < 3; ++col) {
    if (std::abs(linear(row, col)) > 1) throw bad("coefficient outside {-1, 0, 1}");
  }
}

}  // namespace

Eigen::Vector3d SymOp::apply(const Eigen::Vector3d& frac) const {
  Eigen::Vector3d out = linear.cast<double>() * frac;
  for (int i = 0; i < 3; ++i) out[i] += translation[static_cast<std::size_t>(i)].value();
  return out;
}

SymOp parseSymOp(std::string_view text) {
  // CIF values are often quoted.
  while (!text.empty() && (text.front() == '\'' || text.front() == '"' || std::isspace(static_cast<unsigned char>(text.front()))))
    text.remove_prefix(1);
  while (!text.empty() && (text.back() == '\'' || text.back() == '"' || std::isspace(static_cast<unsigned char>(text.back()))))
    text.remove_suffix(1);

  SymOp op;
  op.linear.setZero();
  std::size_t start = 0;
  int row = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      if (row >= 3) throw Error(Errc::BadSymOp, "more than three components in '" + std::string(text) + "'");
      parseComponent(text.substr(start, i - start), op.linear, row, op.translation[static_cast<std::size_t>(row)]);
      ++row;
      start = i + 1;
    }
  }
  if (row != 3) throw Error(Errc::BadSymOp, "expected three components in '" + std::string(text) + "'");
  const int det = op.linear.determinant();
  if (det != 1 && det != -1) {
    throw Error(Errc::BadSymOp, "linear part of '" + std::string(text) + "' has determinant " + std::to_string(det));
  }
  return op;
}

std::string formatSymOp(const SymOp& op) {
  std::string out;
  for (int row = 0; row < 3; ++row) {
    if (row > 0) out += ',';
    std::string component;
    for (int col = 0; col < 3; ++col) {
      const int a = op.linear(row, col);
      if (a == 0) continue;
      if (a < 0) {
        component += '-';
      } else if (!component.empty()) {
        component += '+';
      }
      component += static_cast<char>('x' + col);
    }
    const Rational t = op.translation[static_cast<std::size_t>(row)];
    if (t.num != 0) {
      if (t.num > 0 && !component.empty()) component += '+';
      component += std::to_string(t.num);
      if (t.den != 1) component += "/" + std::to_string(t.den);
    }
    out += component.empty() ? "0" : component;
  }
  return out;
}

}  // namespace cia
