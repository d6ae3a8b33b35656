#include "fbasin/normal_form.hpp"

#include <algorithm>

#include "fbasin/error.hpp"

namespace fbasin {

namespace {

bool is_identity(const CMatrix& s) { return s == CMatrix::Identity(s.rows(), s.cols()); }

// S^{-1}∘f∘S for unitary S, truncated at `order`.
PolyJetMap conjugate(const PolyJetMap& f, const CMatrix& s, int order) {
  if (is_identity(s)) return f.truncated(order);
  const auto inner = compose_truncated(f, PolyJetMap::linear(s, order), order);
  return compose_truncated(PolyJetMap::linear(s.adjoint(), order), inner, order);
}

// S∘g∘S^{-1}
PolyJetMap unconjugate(const PolyJetMap& g, const CMatrix& s, int order) {
  if (is_identity(s)) return g.truncated(order);
  const auto inner = compose_truncated(g, PolyJetMap::linear(s.adjoint(), order), order);
  return compose_truncated(PolyJetMap::linear(s, order), inner, order);
}

void check_jet_depth(const PolyJetMap& f, int needed) {
  if (f.order() < needed && !f.exact())
    throw Error(ErrorKind::kInvalidArgument,
                "jet of order " + std::to_string(f.order()) + " is too short; need " + std::to_string(needed));
}

}  // namespace

CVector NormalFormResult::apply_G(const CVector& z) const {
  return S * Gtilde.evaluate(S.adjoint() * z);
}

CVector NormalFormResult::apply_G_inverse(const CVector& z) const {
  return S * Gtilde.solve(S.adjoint() * z);
}

bool NormalFormResult::residual_ok(double rel_tol) const {
  return std::all_of(residual_norms.begin(), residual_norms.end(),
                     [&](double r) { return r <= rel_tol * scale; });
}

bool low_layers_vanish(const PolyJetMap& f, int p) {
  if (p < 2) throw Error(ErrorKind::kInvalidArgument, "low_layers_vanish needs p >= 2");
  check_jet_depth(f, p - 1);
  for (int m = 2; m <= std::min(p - 1, f.order()); ++m)
    if (f.layer(m).max_abs() > 1e-12) return false;
  return true;
}

NormalFormResult normal_form(const PolyJetMap& f, int q, NormalFormOptions options) {
  if (q < 2) throw Error(ErrorKind::kInvalidArgument, "normal_form needs q >= 2");
  const int n = f.dimension();
  const int order = q - 1;
  check_jet_depth(f, order);

  const auto schur = schur_lower(f.linear_part(), options.schur);
  const CMatrix& l = schur.L;

  PolyJetMap t_tilde = PolyJetMap::identity(n, order);
  PolyJetMap g_tilde = PolyJetMap::linear(l, order);
  std::vector<DegreeStep> log;

  const bool linear_only = low_layers_vanish(f, q);
  if (!linear_only) {
    PolyJetMap f_tilde = conjugate(f, schur.S, order);
    f_tilde.layer(1) = PolyJetMap::linear(l, 1).layer(1);
    for (int m = 2; m <= order; ++m) {
      const auto defect = compose_truncated(t_tilde, f_tilde, m) - compose_truncated(g_tilde, t_tilde, m);
      DegreeStep step;
      step.degree = m;
      step.R = defect.layer(m);
      auto sol = commutator_solve(l, step.R, options.resonance);
      step.X = sol.X;
      step.H = sol.H;
      step.r_special = sol.H.is_zero();
      step.special = special_basis(schur.spectrum, m, options.resonance.tol).entries;
      g_tilde.layer(m) += sol.X;
      if (!step.r_special) t_tilde += compose_truncated(to_jet(sol.H, order), t_tilde, order);
      log.push_back(std::move(step));
    }
  }

  PolyJetMap t = unconjugate(t_tilde, schur.S, order);
  t.set_exact(true);
  g_tilde.set_exact(true);

  NormalFormResult result{
      .S = schur.S,
      .linear = l,
      .spectrum = schur.spectrum,
      .normal = schur.normal,
      .Gtilde = LowerTriangularAuto(g_tilde.trimmed()),
      .T = std::move(t),
      .q = q,
      .log = std::move(log),
      .residual_norms = {},
      .scale = 1.0,
      .vanishing_layers_fast_path = linear_only,
  };
  // Rounding in the residual grows with the largest coefficient involved.
  result.scale = std::max({1.0, f.truncated(order).max_abs(), result.T.max_abs()});
  for (const auto& layer : residual_jets(f, result, q)) result.residual_norms.push_back(layer.max_abs());
  return result;
}

std::vector<HomogeneousMap> residual_jets(const PolyJetMap& f, const NormalFormResult& nf, int q) {
  if (q < 2) throw Error(ErrorKind::kInvalidArgument, "residual_jets needs q >= 2");
  const int order = q - 1;
  check_jet_depth(f, order);
  const auto g_inverse = invert_exact(nf.Gtilde).map().truncated(order);
  const auto t = nf.T.truncated(order);
  const auto t_of_f = compose_truncated(t, f.truncated(order), order);
  const auto outer = unconjugate(g_inverse, nf.S, order);
  const auto defect = compose_truncated(outer, t_of_f, order) - t;
  std::vector<HomogeneousMap> layers;
  for (int m = 1; m <= order; ++m) layers.push_back(defect.layer(m));
  return layers;
}

}  // namespace fbasin
