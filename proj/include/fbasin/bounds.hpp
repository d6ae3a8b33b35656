#pragma once

// Closed-form quantitative estimates: the minimal p with r^p < s, the
// normal-form growth constant C, the chain constant gamma and the
// resulting orders q.

#include <optional>
#include <string>
#include <vector>

namespace fbasin {

// s ||z|| < ||f_j(z)|| < r ||z|| on the ball of radius delta, for all j.
struct AttractionParams {
  int n = 2;
  double r = 0.5;
  double s = 0.25;
  double delta = 1.0;

  // Throws kValidation naming the offending field.
  void validate() const;
  bool operator==(const AttractionParams&) const = default;
};

// Smallest p >= 1 with r^p < s.
int minimal_p(double r, double s);

// C = r sum_{m=2}^{p-1} n^2 Q(m)^2 (sqrt(n) / min{1, delta})^m
double c_constant(const AttractionParams& params, int p);

// ln of gamma = sum_{i=1}^{(p-1)^{(n-1)^2}} (Q(i) sqrt(n))^i K^i with
// K = sqrt(n) (n-1)! (1+C)^{n-1} / s^n, evaluated in log space.
double ln_gamma_proof_estimate(const AttractionParams& params, int p);

// gamma itself; throws kOverflow past 1e300.
double gamma_proof_estimate(const AttractionParams& params, int p);

struct QBoundOptions {
  // d_0 f_j normal: the closed-form estimates apply.
  bool normal = true;
  // Caller asserts every G_j is linear (no special elements in degrees
  // 2..p-1, or vanishing derivatives of orders 2..p-1): gamma = 1/s, q = p.
  bool linear_normal_form = false;
};

struct QBoundReport {
  int n = 0;
  int p = 0;
  double C = 0.0;
  std::optional<double> gamma_proof;
  std::optional<double> ln_gamma_proof;
  // Minimal q with r^q gamma < 1.
  std::optional<int> q_from_gamma;
  // Theorem bound for normal linear parts: real value and the integer bound.
  std::optional<double> q_theorem_normal_value;
  std::optional<int> q_theorem_normal;
  std::optional<double> q_theorem_dim2_value;
  std::optional<int> q_theorem_dim2;
  bool shortcut = false;
  // gamma and q the pipeline uses (q >= p).
  double gamma_used = 0.0;
  int q_used = 0;
  std::vector<std::string> notes;
};

// Minimal q with r^q gamma < 1 given ln gamma; verified by direct bracketing.
int minimal_q(double r, double ln_gamma);

// Integer reported for a real-valued q bound: floor(v) + 1, i.e. the ceiling
// with exact integers rounded up.
int integer_bound(double value);

double q_theorem_normal_value(const AttractionParams& params, int p);
double q_theorem_dim2_value(const AttractionParams& params, int p);

QBoundReport q_bounds(const AttractionParams& params, int p, QBoundOptions options = {});

}  // namespace fbasin
