#include "tractdyn/entire.hpp"

#include <cmath>
#include <cstdio>
#include <regex>

#include <json.hpp>

namespace tractdyn {
namespace {

using json = nlohmann::json;

constexpr double kLogMax = 709.0;

Complex exp_checked(Complex log_value) {
  if (!(log_value.real() < kLogMax)) fail(ErrorKind::Overflow, "|f(z)| exceeds the double range");
  return std::exp(log_value);
}

Complex ipow(Complex z, int d) {
  Complex r = 1.0;
  for (int k = 0; k < d; ++k) r *= z;
  return r;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(Complex z) {
  if (z.imag() == 0.0) return format_number(z.real());
  return "(" + format_number(z.real()) + (z.imag() < 0 ? "-" : "+") +
         format_number(std::abs(z.imag())) + "i)";
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorKind::InvalidArgument, std::string("expected [re, im] for ") + what);
}

double number_from(std::string_view s) {
  const std::string str(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "not a number: " + str);
  }
  if (used != str.size()) fail(ErrorKind::InvalidArgument, "not a number: " + str);
  return v;
}

std::vector<std::string> split_top_level(std::string_view s) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

Polynomial polynomial_from(const json& j) {
  if (j.is_string()) return Polynomial::parse_shorthand(j.get<std::string>());
  const json* list = &j;
  if (j.is_object()) {
    if (!j.contains("coeffs")) fail(ErrorKind::InvalidArgument, "polynomial object needs coeffs");
    list = &j.at("coeffs");
  }
  if (!list->is_array()) fail(ErrorKind::InvalidArgument, "bad polynomial descriptor");
  std::vector<Complex> c;
  for (const auto& e : *list) c.push_back(complex_from(e, "coefficient"));
  return Polynomial(std::move(c));
}

EntireFunction koenigs_from(const Polynomial& p, std::optional<Complex> z0, Complex kappa,
                            std::optional<double> disjoint_R) {
  const Complex point = z0 ? *z0 : default_koenigs_point(p);
  KoenigsLinearizer L(p, point, kappa);
  if (disjoint_R) L = make_disjoint_type(L, *disjoint_R);
  return EntireFunction::koenigs(std::move(L));
}

EntireFunction from_json(const json& j) {
  if (j.is_string()) return parse_function(j.get<std::string>());
  if (!j.is_object() || !j.contains("family"))
    fail(ErrorKind::InvalidArgument, "function descriptor needs a family");
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "exp_power") {
    const Complex lambda = j.contains("lambda") ? complex_from(j.at("lambda"), "lambda") : 1.0;
    const int d = j.value("d", 1);
    return EntireFunction::exp_power(lambda, d);
  }
  if (fam == "koenigs") {
    if (!j.contains("poly")) fail(ErrorKind::InvalidArgument, "koenigs descriptor needs poly");
    const Polynomial p = polynomial_from(j.at("poly"));
    std::optional<Complex> z0;
    if (j.contains("z0") && !(j.at("z0").is_string() && j.at("z0").get<std::string>() == "auto"))
      z0 = complex_from(j.at("z0"), "z0");
    const Complex kappa = j.contains("kappa") ? complex_from(j.at("kappa"), "kappa") : 1.0;
    std::optional<double> R;
    if (j.contains("disjoint_R")) R = j.at("disjoint_R").get<double>();
    return koenigs_from(p, z0, kappa, R);
  }
  if (fam == "composite_exp") {
    if (!j.contains("inner")) fail(ErrorKind::InvalidArgument, "composite_exp needs inner");
    std::vector<int> offsets{0};
    if (j.contains("offsets")) offsets = j.at("offsets").get<std::vector<int>>();
    return EntireFunction::composite_exp(from_json(j.at("inner")), offsets);
  }
  fail(ErrorKind::InvalidArgument, "unknown family " + fam);
}

EntireFunction from_shorthand(std::string s) {
  static const std::regex exp_re(R"(^(?:([0-9.eE+-]+)\*)?exp(?:\((.*)\))?(?:/([0-9.eE+-]+))?$)");
  std::smatch m;
  if (std::regex_match(s, m, exp_re)) {
    Complex lambda = 1.0;
    if (m[1].matched) lambda *= number_from(m[1].str());
    if (m[3].matched) lambda /= number_from(m[3].str());
    int d = 1;
    if (m[2].matched) {
      const std::string arg = m[2].str();
      static const std::regex pow_re(R"(^z(?:\^([0-9]+))?$)");
      static const std::regex shift_re(R"(^z([+-][0-9.eE+-]+)$)");
      std::smatch a;
      if (std::regex_match(arg, a, pow_re)) {
        if (a[1].matched) d = std::stoi(a[1].str());
      } else if (std::regex_match(arg, a, shift_re)) {
        lambda *= std::exp(number_from(a[1].str()));
      } else {
        fail(ErrorKind::InvalidArgument, "unsupported exponent argument: " + arg);
      }
    }
    return EntireFunction::exp_power(lambda, d);
  }
  auto call = [&](std::string_view name) -> std::optional<std::string> {
    if (s.size() > name.size() + 1 && s.compare(0, name.size(), name) == 0 &&
        s[name.size()] == '(' && s.back() == ')')
      return s.substr(name.size() + 1, s.size() - name.size() - 2);
    return std::nullopt;
  };
  if (auto body = call("koenigs")) {
    const auto args = split_top_level(*body);
    if (args.empty() || args.size() > 3) fail(ErrorKind::InvalidArgument, "koenigs(p[, z0[, kappa]])");
    const Polynomial p = Polynomial::parse_shorthand(args[0]);
    std::optional<Complex> z0;
    if (args.size() >= 2 && args[1] != "auto") z0 = Complex(number_from(args[1]), 0.0);
    Complex kappa = 1.0;
    std::optional<double> R;
    if (args.size() == 3) {
      if (args[2].rfind("disjoint=", 0) == 0)
        R = number_from(std::string_view(args[2]).substr(9));
      else
        kappa = number_from(args[2]);
    }
    return koenigs_from(p, z0, kappa, R);
  }
  if (auto body = call("composite")) return EntireFunction::composite_exp(from_shorthand(*body));
  fail(ErrorKind::InvalidArgument, "unrecognised function: " + s);
}

}  // namespace

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::ExpPower: return "exp_power";
    case Family::Koenigs: return "koenigs";
    case Family::CompositeExp: return "composite_exp";
  }
  return "unknown";
}

EntireFunction EntireFunction::exp_power(Complex lambda, int d) {
  if (!is_finite(lambda) || lambda == Complex(0.0))
    fail(ErrorKind::InvalidArgument, "lambda must be finite and non-zero");
  if (d < 1) fail(ErrorKind::InvalidArgument, "exp_power needs d >= 1");
  EntireFunction f;
  f.family_ = Family::ExpPower;
  f.lambda_ = lambda;
  f.d_ = d;
  // d = 1: only the omitted value 0; d >= 2 adds the critical value lambda.
  f.singular_radius_ = d >= 2 ? std::abs(lambda) : 0.0;
  return f;
}

EntireFunction EntireFunction::koenigs(KoenigsLinearizer L) {
  EntireFunction f;
  f.family_ = Family::Koenigs;
  f.singular_radius_ = L.singular_radius();
  f.koenigs_ = std::make_shared<const KoenigsLinearizer>(std::move(L));
  return f;
}

EntireFunction EntireFunction::composite_exp(const EntireFunction& inner, std::vector<int> offsets) {
  if (offsets.empty()) fail(ErrorKind::InvalidArgument, "composite_exp needs a branch offset");
  EntireFunction f;
  f.family_ = Family::CompositeExp;
  f.inner_ = std::make_shared<const EntireFunction>(inner);
  f.offsets_ = std::move(offsets);
  // exp omits 0, so inner(0) becomes an asymptotic value of F.
  f.singular_radius_ = std::max(inner.singular_radius(), std::abs(inner.value(0.0)));
  return f;
}

const KoenigsLinearizer& EntireFunction::linearizer() const {
  if (!koenigs_) fail(ErrorKind::InvalidArgument, "not a Koenigs handle");
  return *koenigs_;
}

const EntireFunction& EntireFunction::inner() const {
  if (!inner_) fail(ErrorKind::InvalidArgument, "not a composite handle");
  return *inner_;
}

Complex EntireFunction::value(Complex z) const {
  switch (family_) {
    case Family::ExpPower: return exp_checked(std::log(lambda_) + ipow(z, d_));
    case Family::Koenigs: return koenigs_->eval(z).value;
    case Family::CompositeExp: return inner_->value(exp_checked(z));
  }
  return 0.0;
}

Complex EntireFunction::derivative(Complex z) const {
  switch (family_) {
    case Family::ExpPower:
      return exp_checked(std::log(lambda_) + ipow(z, d_) + std::log(static_cast<double>(d_)) +
                         (d_ > 1 ? static_cast<double>(d_ - 1) * std::log(z) : Complex(0.0)));
    case Family::Koenigs: return koenigs_->eval(z).deriv;
    case Family::CompositeExp: {
      const Complex e = exp_checked(z);
      const Complex d = inner_->derivative(e) * e;
      if (!is_finite(d)) fail(ErrorKind::Overflow, "non-finite derivative");
      return d;
    }
  }
  return 0.0;
}

Complex EntireFunction::log_value(Complex z) const {
  switch (family_) {
    case Family::ExpPower: return std::log(lambda_) + ipow(z, d_);
    case Family::Koenigs: return koenigs_->log_eval(z).log_value;
    case Family::CompositeExp: return inner_->log_value(exp_checked(z));
  }
  return 0.0;
}

Complex EntireFunction::log_derivative(Complex z) const {
  switch (family_) {
    case Family::ExpPower: return static_cast<double>(d_) * ipow(z, d_ - 1);
    case Family::Koenigs: return koenigs_->log_eval(z).dlog;
    case Family::CompositeExp: {
      const Complex e = exp_checked(z);
      return inner_->log_derivative(e) * e;
    }
  }
  return 0.0;
}

EntireFunction::LogPair EntireFunction::log_pair(Complex z) const {
  switch (family_) {
    case Family::ExpPower: return {log_value(z), log_derivative(z)};
    case Family::Koenigs: {
      const auto v = koenigs_->log_eval(z);
      return {v.log_value, v.dlog};
    }
    case Family::CompositeExp: {
      const Complex e = exp_checked(z);
      const LogPair inner = inner_->log_pair(e);
      return {inner.log_value, inner.dlog * e};
    }
  }
  return {};
}

std::string EntireFunction::descriptor() const {
  json j;
  j["family"] = std::string(to_string(family_));
  switch (family_) {
    case Family::ExpPower:
      j["lambda"] = complex_json(lambda_);
      j["d"] = d_;
      break;
    case Family::Koenigs: {
      json coeffs = json::array();
      for (Complex c : koenigs_->polynomial().coeffs()) coeffs.push_back(complex_json(c));
      j["poly"] = {{"coeffs", coeffs}};
      j["z0"] = complex_json(koenigs_->z0());
      j["kappa"] = complex_json(koenigs_->kappa());
      break;
    }
    case Family::CompositeExp:
      j["inner"] = json::parse(inner_->descriptor());
      j["offsets"] = offsets_;
      break;
  }
  return j.dump();
}

std::string EntireFunction::label() const {
  switch (family_) {
    case Family::ExpPower: {
      const std::string arg = d_ == 1 ? "z" : "z^" + std::to_string(d_);
      const std::string e = "exp(" + arg + ")";
      return lambda_ == Complex(1.0) ? e : format_complex(lambda_) + "*" + e;
    }
    case Family::Koenigs: {
      std::string s = "koenigs(" + koenigs_->polynomial().to_shorthand() + ", " +
                      format_complex(koenigs_->z0());
      if (koenigs_->kappa() != Complex(1.0)) s += ", " + format_complex(koenigs_->kappa());
      return s + ")";
    }
    case Family::CompositeExp: return "composite(" + inner_->label() + ")";
  }
  return "";
}

double metric_derivative(const EntireFunction& f, Complex z) {
  if (z == Complex(0.0)) fail(ErrorKind::ZeroDenominator, "metric derivative at z = 0");
  const Complex lv = f.log_value(z);
  if (!(lv.real() > std::log(1e-300))) fail(ErrorKind::ZeroDenominator, "|f(z)| below 1e-300");
  return std::abs(f.log_derivative(z)) * std::abs(z);
}

EntireFunction parse_function(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) fail(ErrorKind::InvalidArgument, "empty function description");
  if (s.front() == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      fail(ErrorKind::InvalidArgument, std::string("bad function JSON: ") + e.what());
    }
    try {
      return from_json(j);
    } catch (const json::exception& e) {
      fail(ErrorKind::InvalidArgument, std::string("bad function JSON: ") + e.what());
    }
  }
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return from_shorthand(s);
}

Polynomial parse_polynomial(std::string_view text) {
  std::string s(text);
  const auto first = s.find_first_not_of(" \t\n");
  if (first != std::string::npos && (s[first] == '{' || s[first] == '[')) {
    try {
      return polynomial_from(json::parse(s));
    } catch (const json::exception& e) {
      fail(ErrorKind::InvalidArgument, std::string("bad polynomial JSON: ") + e.what());
    }
  }
  return Polynomial::parse_shorthand(s);
}

}  // namespace tractdyn
