#include "tractdyn/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace tractdyn {

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 3)
    fail(ErrorKind::InvalidArgument, "polynomial needs degree >= 2");
  for (const Complex& c : coeffs_)
    if (!is_finite(c)) fail(ErrorKind::InvalidArgument, "non-finite coefficient");
  if (std::abs(coeffs_.back()) == 0.0)
    fail(ErrorKind::InvalidArgument, "leading coefficient is zero");
}

Complex Polynomial::operator()(Complex z) const noexcept {
  Complex acc = coeffs_.back();
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::pair<Complex, Complex> Polynomial::eval_with_derivative(Complex z) const noexcept {
  Complex value = coeffs_.back();
  Complex deriv = 0.0;
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) {
    deriv = deriv * z + value;
    value = value * z + *it;
  }
  return {value, deriv};
}

std::vector<Complex> Polynomial::taylor_at(Complex z0) const {
  // Repeated synthetic division by (z - z0).
  std::vector<Complex> work(coeffs_);
  const int d = degree();
  std::vector<Complex> out(d + 1);
  for (int k = 0; k <= d; ++k) {
    Complex acc = work[d];
    for (int j = d - 1; j >= k; --j) {
      acc = work[j] + acc * z0;
      work[j] = acc;
    }
    out[k] = work[k];
  }
  return out;
}

std::vector<Complex> Polynomial::derivative_coeffs() const {
  std::vector<Complex> out(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) out[k - 1] = coeffs_[k] * static_cast<double>(k);
  return out;
}

Complex Polynomial::log_eval_at_log(Complex log_z) const noexcept {
  const int d = degree();
  const Complex lead = coeffs_.back();
  Complex corr = 0.0;
  for (int j = 0; j < d; ++j) {
    if (coeffs_[j] == Complex(0.0)) continue;
    corr += coeffs_[j] / lead * std::exp(static_cast<double>(j - d) * log_z);
  }
  return std::log(lead) + static_cast<double>(d) * log_z + std::log(1.0 + corr);
}

Complex Polynomial::log_derivative_at_log(Complex log_z) const noexcept {
  const int d = degree();
  const Complex lead = coeffs_.back() * static_cast<double>(d);
  Complex corr = 0.0;
  for (int j = 1; j < d; ++j) {
    if (coeffs_[j] == Complex(0.0)) continue;
    corr += coeffs_[j] * static_cast<double>(j) / lead * std::exp(static_cast<double>(j - d) * log_z);
  }
  return std::log(lead) + static_cast<double>(d - 1) * log_z + std::log(1.0 + corr);
}

double Polynomial::max_normalized_coefficient() const noexcept {
  double m = 0.0;
  for (int k = 0; k < degree(); ++k) m = std::max(m, std::abs(coeffs_[k] / coeffs_.back()));
  return m;
}

double Polynomial::escape_radius() const noexcept {
  return 2.0 * (1.0 + max_normalized_coefficient());
}

namespace {

struct ShorthandParser {
  std::string_view s;
  std::size_t pos = 0;

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::InvalidArgument,
         "cannot parse polynomial '" + std::string(s) + "': " + msg);
  }
  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool peek(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }
  bool eat(char c) {
    if (!peek(c)) return false;
    ++pos;
    return true;
  }
  bool at_number() {
    skip_ws();
    return pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.');
  }
  double number() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) ++pos;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data() + start, s.data() + pos, v);
    if (ec != std::errc() || ptr != s.data() + pos) error("bad number");
    return v;
  }
  int integer() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + start, s.data() + pos, v);
    if (ec != std::errc() || start == pos) error("bad exponent");
    return v;
  }
};

}  // namespace

Polynomial Polynomial::parse_shorthand(std::string_view text) {
  ShorthandParser ps{text};
  std::map<int, double> terms;
  bool first = true;
  while (true) {
    ps.skip_ws();
    if (ps.pos >= text.size()) break;
    double sign = 1.0;
    if (ps.eat('+')) {
    } else if (ps.eat('-')) {
      sign = -1.0;
    } else if (!first) {
      ps.error("expected '+' or '-'");
    }
    first = false;
    double coef = 1.0;
    bool have_coef = false;
    if (ps.at_number()) {
      coef = ps.number();
      have_coef = true;
      ps.eat('*');
    }
    int power = 0;
    if (ps.eat('z')) {
      power = 1;
      if (ps.eat('^')) power = ps.integer();
    } else if (!have_coef) {
      ps.error("expected coefficient or 'z'");
    }
    terms[power] += sign * coef;
  }
  if (terms.empty()) ps.error("empty expression");
  const int deg = terms.rbegin()->first;
  std::vector<Complex> coeffs(deg + 1, 0.0);
  for (auto [k, v] : terms) coeffs[k] = v;
  return Polynomial(std::move(coeffs));
}

std::string Polynomial::to_shorthand() const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const Complex c = coeffs_[k];
    if (c == Complex(0.0)) continue;
    if (c.imag() != 0.0) {
      os << (first ? "" : "+") << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
    } else {
      double v = c.real();
      if (!first) os << (v < 0 ? "-" : "+");
      else if (v < 0) os << "-";
      v = std::abs(v);
      if (v != 1.0 || k == 0) os << v;
    }
    if (k >= 1) os << "z";
    if (k >= 2) os << "^" << k;
    first = false;
  }
  return os.str();
}

Complex poly_eval(const Polynomial& p, Complex z) noexcept { return p(z); }

}  // namespace tractdyn
