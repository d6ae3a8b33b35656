#include "fbasin/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fbasin/error.hpp"
#include "fbasin/polyalg.hpp"

namespace fbasin {

namespace {

constexpr double kMaxTerms = 1e7;
const double kLnOverflow = std::log(1e300);

// Accumulates ln(sum exp(x_i)) without leaving the log domain.
class LogSum {
 public:
  void add(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (empty_) {
      max_ = x;
      sum_ = 1.0L;
      empty_ = false;
    } else if (x <= max_) {
      sum_ += std::exp(static_cast<long double>(x - max_));
    } else {
      sum_ = sum_ * std::exp(static_cast<long double>(max_ - x)) + 1.0L;
      max_ = x;
    }
  }
  double value() const {
    return empty_ ? -std::numeric_limits<double>::infinity() : max_ + static_cast<double>(std::log(sum_));
  }

 private:
  bool empty_ = true;
  double max_ = 0.0;
  long double sum_ = 0.0L;
};

double ln_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

long long term_count(int p, int n) {
  const double count = std::pow(static_cast<double>(p - 1), static_cast<double>((n - 1) * (n - 1)));
  if (count > kMaxTerms) {
    std::ostringstream msg;
    msg << "sum with " << count << " terms is out of range; reduce p or n";
    throw Error(ErrorKind::kOverflow, msg.str());
  }
  return static_cast<long long>(std::llround(count));
}

void check_p(int p) {
  if (p < 2) throw Error(ErrorKind::kInvalidArgument, "p must be >= 2");
}

}  // namespace

void AttractionParams::validate() const {
  if (n < 1) throw Error(ErrorKind::kValidation, "attraction.n must be >= 1");
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::kValidation, "attraction.r must lie in (0,1)");
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::kValidation, "attraction.s must lie in (0,1)");
  if (!(s < r)) throw Error(ErrorKind::kValidation, "attraction.s must be < attraction.r");
  if (!(delta > 0.0)) throw Error(ErrorKind::kValidation, "attraction.delta must be > 0");
}

int minimal_p(double r, double s) {
  if (!(0.0 < s && s < r && r < 1.0)) throw Error(ErrorKind::kInvalidArgument, "minimal_p needs 0 < s < r < 1");
  int p = 1;
  double power = r;
  while (!(power < s)) {
    ++p;
    power = std::pow(r, p);
  }
  return p;
}

double c_constant(const AttractionParams& params, int p) {
  params.validate();
  check_p(p);
  const int n = params.n;
  const double base = std::sqrt(static_cast<double>(n)) / std::min(1.0, params.delta);
  long double total = 0.0L;
  for (int m = 2; m <= p - 1; ++m) {
    const auto q = static_cast<long double>(multi_index_count(n, m));
    total += static_cast<long double>(n) * n * q * q * std::pow(static_cast<long double>(base), m);
  }
  total *= params.r;
  if (!std::isfinite(static_cast<double>(total))) throw Error(ErrorKind::kOverflow, "C overflows double range");
  return static_cast<double>(total);
}

double ln_gamma_proof_estimate(const AttractionParams& params, int p) {
  const double c = c_constant(params, p);
  const int n = params.n;
  const double ln_k = 0.5 * std::log(static_cast<double>(n)) + ln_factorial(n - 1) +
                      (n - 1) * std::log1p(c) - n * std::log(params.s);
  const long long terms = term_count(p, n);
  const double ln_sqrt_n = 0.5 * std::log(static_cast<double>(n));
  LogSum sum;
  for (long long i = 1; i <= terms; ++i) {
    const double ln_q = std::log(static_cast<double>(multi_index_count(n, static_cast<int>(i))));
    sum.add(static_cast<double>(i) * (ln_q + ln_sqrt_n + ln_k));
  }
  return sum.value();
}

double gamma_proof_estimate(const AttractionParams& params, int p) {
  const double ln_gamma = ln_gamma_proof_estimate(params, p);
  if (ln_gamma > kLnOverflow) throw Error(ErrorKind::kOverflow, "gamma exceeds 1e300; reduce p");
  return std::exp(ln_gamma);
}

int minimal_q(double r, double ln_gamma) {
  const double ln_r = std::log(r);
  int q = std::max(1, static_cast<int>(std::floor(ln_gamma / -ln_r)) + 1);
  while (q * ln_r + ln_gamma >= 0.0) ++q;
  while (q > 1 && (q - 1) * ln_r + ln_gamma < 0.0) --q;
  return q;
}

int integer_bound(double value) { return static_cast<int>(std::floor(value)) + 1; }

double q_theorem_normal_value(const AttractionParams& params, int p) {
  const double c = c_constant(params, p);
  const int n = params.n;
  const double ln_inner = ln_factorial(n) - n * std::log(params.s) + (n - 1) * std::log1p(c);
  const long long terms = term_count(p, n);
  LogSum sum;
  for (long long i = 1; i <= terms; ++i)
    sum.add(std::log(static_cast<double>(multi_index_count(n, static_cast<int>(i)))) + static_cast<double>(i) * ln_inner);
  return sum.value() / std::log(1.0 / params.r) + 1.0;
}

double q_theorem_dim2_value(const AttractionParams& params, int p) {
  params.validate();
  check_p(p);
  if (params.n != 2) throw Error(ErrorKind::kInvalidArgument, "dimension-2 bound needs n = 2");
  const double base = std::sqrt(2.0) / std::min(1.0, params.delta);
  const double ln_x = std::log(2.0) - 2.0 * std::log(params.s) +
                      std::log1p(2.0 * params.r * p * std::pow(base, p - 1));
  LogSum sum;
  for (int i = 1; i <= p - 1; ++i) sum.add(std::log(static_cast<double>(i + 1)) + i * ln_x);
  return sum.value() / std::log(1.0 / params.r) + 1.0;
}

QBoundReport q_bounds(const AttractionParams& params, int p, QBoundOptions options) {
  params.validate();
  check_p(p);
  QBoundReport report;
  report.n = params.n;
  report.p = p;
  report.C = c_constant(params, p);
  report.shortcut = options.linear_normal_form;

  if (options.normal) {
    const double ln_gamma = ln_gamma_proof_estimate(params, p);
    report.ln_gamma_proof = ln_gamma;
    report.q_from_gamma = minimal_q(params.r, ln_gamma);
    if (ln_gamma <= kLnOverflow) {
      report.gamma_proof = std::exp(ln_gamma);
    } else if (!options.linear_normal_form) {
      throw Error(ErrorKind::kOverflow, "gamma exceeds 1e300; reduce p");
    } else {
      report.notes.push_back("gamma from the general estimate exceeds 1e300; only the linear shortcut is usable");
    }
    report.q_theorem_normal_value = q_theorem_normal_value(params, p);
    report.q_theorem_normal = integer_bound(*report.q_theorem_normal_value);
    if (params.n == 2) {
      report.q_theorem_dim2_value = q_theorem_dim2_value(params, p);
      report.q_theorem_dim2 = integer_bound(*report.q_theorem_dim2_value);
    }
    report.notes.push_back(
        "the closed-form theorem bound weights Q(i) linearly while the chain constant gamma uses (Q(i) sqrt(n))^i; "
        "q_from_gamma is the value consumed by the construction");
  } else {
    report.notes.push_back("non-normal linear part: no closed form; supply q manually");
  }

  if (options.linear_normal_form) {
    report.gamma_used = 1.0 / params.s;
    report.q_used = std::max(p, minimal_q(params.r, std::log(report.gamma_used)));
    report.notes.push_back("linear normal form: gamma = 1/s and q = p");
  } else if (report.q_from_gamma) {
    report.gamma_used = *report.gamma_proof;
    report.q_used = std::max(p, *report.q_from_gamma);
  }
  return report;
}

}  // namespace fbasin
