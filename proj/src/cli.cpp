#include "fbasin/cli.hpp"

#include <omp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "fbasin/error.hpp"
#include "fbasin/normal_form.hpp"
#include "fbasin/resonance.hpp"
#include "fbasin/spectral.hpp"

namespace fbasin {

namespace {

Json complex12(Complex c) { return Json::array({round12(c.real()), round12(c.imag())}); }

Json matrix12(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex12(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

Json vector12(const CVector& z) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < z.size(); ++k) out.push_back(complex12(z[k]));
  return out;
}

Json map_terms(const PolyJetMap& f) {
  Json out = Json::array();
  for (int m = 1; m <= f.order(); ++m) {
    const auto& layer = f.layer(m);
    for (int v = 0; v < f.dimension(); ++v)
      for (std::size_t idx = 0; idx < layer.basis_size(); ++idx) {
        const Complex c = layer.coeff(v, idx);
        if (c == Complex{}) continue;
        const auto row = layer.table().row(idx);
        out.push_back({{"component", v + 1},
                       {"exponents", std::vector<int>(row.begin(), row.end())},
                       {"coeff", complex12(c)}});
      }
  }
  return out;
}

Json optional12(const std::optional<double>& v) { return v ? Json(round12(*v)) : Json(nullptr); }

template <typename T>
Json optional_int(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

const char* status_name(BasinStatus s) {
  switch (s) {
    case BasinStatus::kAttracted:
      return "attracted";
    case BasinStatus::kUndecided:
      return "undecided";
    case BasinStatus::kDiverged:
      return "diverged";
  }
  return "undecided";
}

NormalFormResult scenario_normal_form(const Scenario& sc, int q) {
  return normal_form(sc.sequence.jet(1, q - 1), q);
}

double reference_ratio(const Scenario& sc, const Orders& orders) {
  if (!orders.bounds_available || orders.bounds.gamma_used <= 0.0) return std::nan("");
  return std::pow(sc.sequence.params.r, orders.q) * orders.bounds.gamma_used;
}

}  // namespace

double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(format12(v));
}

std::string format12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string error_json(std::string_view kind, std::string_view message) {
  Json doc = {{"error", {{"kind", kind}, {"message", message}}}};
  return doc.dump();
}

std::pair<int, int> parse_grid_size(std::string_view text) {
  const auto x = text.find_first_of("xX");
  auto fail = [&]() -> std::pair<int, int> {
    throw Error(ErrorKind::kValidation, "grid must be WxH, got '" + std::string(text) + "'");
  };
  if (x == std::string_view::npos) return fail();
  int w = 0, h = 0;
  const auto a = std::from_chars(text.data(), text.data() + x, w);
  const auto b = std::from_chars(text.data() + x + 1, text.data() + text.size(), h);
  if (a.ec != std::errc{} || a.ptr != text.data() + x || b.ec != std::errc{} || b.ptr != text.data() + text.size())
    return fail();
  return {w, h};
}

void apply_flags(Scenario& sc, const RunFlags& flags) {
  if (flags.q) {
    if (*flags.q < 2) throw Error(ErrorKind::kValidation, "--q must be >= 2");
    sc.q = flags.q;
  }
  if (flags.p) {
    if (*flags.p < 2) throw Error(ErrorKind::kValidation, "--p must be >= 2");
    sc.p = flags.p;
  }
  if (flags.j_max) {
    if (*flags.j_max < 1) throw Error(ErrorKind::kValidation, "--jmax must be >= 1");
    sc.grid_j_max = sc.psi.j_max = sc.verify.j_max = *flags.j_max;
  }
  if (flags.grid) {
    sc.grid.width = flags.grid->first;
    sc.grid.height = flags.grid->second;
  }
  if (flags.seed) sc.sequence.perturbation.seed = *flags.seed;
  if (flags.out_dir) sc.out_dir = *flags.out_dir;
  if (flags.pgm) sc.pgm = true;
  if (flags.threads && *flags.threads < 1) throw Error(ErrorKind::kValidation, "--threads must be >= 1");
  sc.grid.validate(sc.sequence.n);
  sc.sequence.validate();
}

Orders resolve_orders(const Scenario& sc) {
  const auto& prm = sc.sequence.params;
  Orders orders;
  orders.p = sc.p.value_or(minimal_p(prm.r, prm.s));
  const auto f1 = sc.sequence.jet(1, std::max(orders.p - 1, 1));
  const auto schur = schur_lower(f1.linear_part());

  if (low_layers_vanish(f1, orders.p)) {
    orders.linear_normal_form_reason = "layers 2..p-1 of f vanish";
  } else {
    bool special = false;
    for (int m = 2; m <= orders.p - 1 && !special; ++m) special = !special_basis(schur.spectrum, m).entries.empty();
    if (!special) orders.linear_normal_form_reason = "no special basis elements in degrees 2..p-1";
  }

  QBoundOptions opts{schur.normal, !orders.linear_normal_form_reason.empty()};
  try {
    orders.bounds = q_bounds(prm, orders.p, opts);
    orders.bounds_available = orders.bounds.q_used > 0;
  } catch (const Error&) {
    if (!sc.q) throw;
  }
  if (sc.q) {
    orders.q = *sc.q;
  } else if (orders.bounds_available) {
    orders.q = orders.bounds.q_used;
  } else {
    throw Error(ErrorKind::kValidation, "q is required: no closed-form bound applies to this linear part; pass --q");
  }
  return orders;
}

Json q_bound_report(const Scenario& sc) {
  const auto orders = resolve_orders(sc);
  const auto& prm = sc.sequence.params;
  const auto& b = orders.bounds;
  Json doc;
  doc["params"] = {{"n", prm.n}, {"r", prm.r}, {"s", prm.s}, {"delta", prm.delta}};
  doc["p"] = orders.p;
  doc["q"] = orders.q;
  doc["q_override"] = sc.q.has_value();
  doc["bounds_available"] = orders.bounds_available;
  doc["linear_normal_form"] = !orders.linear_normal_form_reason.empty();
  doc["linear_normal_form_reason"] = orders.linear_normal_form_reason;
  if (orders.bounds_available) {
    doc["C"] = round12(b.C);
    doc["gamma_proof"] = optional12(b.gamma_proof);
    doc["ln_gamma_proof"] = optional12(b.ln_gamma_proof);
    doc["q_from_gamma"] = optional_int(b.q_from_gamma);
    doc["q_theorem_normal_value"] = optional12(b.q_theorem_normal_value);
    doc["q_theorem_normal"] = optional_int(b.q_theorem_normal);
    doc["q_theorem_dim2_value"] = optional12(b.q_theorem_dim2_value);
    doc["q_theorem_dim2"] = optional_int(b.q_theorem_dim2);
    doc["shortcut"] = b.shortcut;
    doc["gamma_used"] = round12(b.gamma_used);
    doc["q_used"] = b.q_used;
    doc["reference_ratio"] = round12(reference_ratio(sc, orders));
    doc["notes"] = b.notes;
  }
  return doc;
}

Json normal_form_report(const Scenario& sc) {
  const auto orders = resolve_orders(sc);
  const auto nf = scenario_normal_form(sc, orders.q);
  Json doc;
  doc["p"] = orders.p;
  doc["q"] = orders.q;
  doc["normal"] = nf.normal;
  doc["vanishing_layers_fast_path"] = nf.vanishing_layers_fast_path;
  Json spectrum = Json::array();
  for (const auto& l : nf.spectrum.eigenvalues) spectrum.push_back(complex12(l));
  doc["spectrum"] = spectrum;
  doc["S"] = matrix12(nf.S);
  doc["G_tilde"] = map_terms(nf.Gtilde.map());
  doc["T"] = map_terms(nf.T);
  Json residuals = Json::array();
  for (double r : nf.residual_norms) residuals.push_back(round12(r));
  doc["residual_norms"] = residuals;
  doc["scale"] = round12(nf.scale);
  doc["residual_ok"] = nf.residual_ok();

  Json special = Json::array();
  for (int m = 2; m <= orders.q - 1; ++m) {
    const auto rep = special_basis(nf.spectrum, m);
    Json entries = Json::array();
    for (const auto& e : rep.entries) entries.push_back({{"component", e.component + 1}, {"exponents", e.alpha.exponents}});
    special.push_back({{"degree", m}, {"entries", entries}, {"margin", round12(rep.margin)}});
  }
  doc["special_basis"] = special;
  doc["special_basis_vanishes_from_degree"] = optional_int(special_free_degree(nf.spectrum));

  Json steps = Json::array();
  for (const auto& step : nf.log)
    steps.push_back({{"degree", step.degree},
                     {"R_max", round12(step.R.max_abs())},
                     {"X_max", round12(step.X.max_abs())},
                     {"H_max", round12(step.H.max_abs())},
                     {"r_special", step.r_special}});
  doc["steps"] = steps;
  return doc;
}

Json verify_report(const Scenario& sc) {
  const auto orders = resolve_orders(sc);
  const auto& prm = sc.sequence.params;
  const auto rep = verify_hypotheses(sc.sequence, orders.q, sc.verify.j_max, sc.verify.samples, sc.verify.seed);
  const auto schur = schur_lower(sc.sequence.jet(1, 1).linear_part());
  const auto spec = spectrum_bounds_check(schur.spectrum, prm.r, prm.s);
  Json doc;
  doc["p"] = orders.p;
  doc["q"] = orders.q;
  doc["j_max"] = rep.j_max;
  doc["samples"] = rep.samples;
  doc["spectrum_within_bounds"] = spec.ok;
  doc["spectrum_margin"] = round12(spec.margin());
  doc["attraction"] = {{"checks", rep.attraction_checks},
                       {"violations", rep.attraction_violations},
                       {"max_upper_ratio", round12(rep.max_upper_ratio)},
                       {"min_lower_ratio", round12(rep.min_lower_ratio)}};
  doc["chain"] = {{"block", sc.sequence.block},
                  {"checks", rep.chain_checks},
                  {"violations", rep.chain_violations},
                  {"max_ratio", round12(rep.max_chain_ratio)}};
  doc["derivative_discrepancy"] = round12(rep.derivative_discrepancy);
  doc["ok"] = rep.ok();
  return doc;
}

PsiOutput psi_report(const Scenario& sc) {
  const auto orders = resolve_orders(sc);
  const auto& seq = sc.sequence;
  const int j_max = sc.psi.j_max;
  const int order = orders.q - 1;
  const auto first = seq.jet(1, order);
  for (int j = 2; j <= j_max + seq.block; ++j)
    if ((seq.jet(j, order) - first).max_abs() > 1e-12)
      throw Error(ErrorKind::kInvalidArgument, "psi needs every f_j to share the jet of f_1 through degree q-1");
  const auto nf = scenario_normal_form(sc, orders.q);
  const double ref = reference_ratio(sc, orders);
  const double delta = seq.params.delta;

  std::vector<CVector> points;
  const int count = sc.psi.points;
  for (int i = 0; i < count; ++i) {
    const double frac = count == 1 ? 0.5 : 0.1 + 0.8 * i / (count - 1);
    points.push_back(sphere_point(seq.n, delta * frac, sc.psi.seed, static_cast<std::uint64_t>(i)));
  }
  const auto rep = psi_convergence_report(seq, nf, points, j_max, ref);

  std::ostringstream csv;
  csv << "point_id,j,diff_norm,fitted_ratio,reference_ratio\n";
  const std::string ref_text = std::isfinite(ref) ? format12(ref) : "n/a";
  for (std::size_t p = 0; p < rep.points.size(); ++p) {
    const auto& row = rep.points[p];
    const std::string fit = row.fitted_ratio ? format12(*row.fitted_ratio) : "n/a";
    for (std::size_t k = 0; k < row.diffs.size(); ++k)
      csv << p << ',' << static_cast<int>(k) + rep.block << ',' << format12(row.diffs[k]) << ',' << fit << ','
          << ref_text << '\n';
  }

  std::vector<CVector> pool;
  std::mt19937_64 radii(sc.psi.seed + 1);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  for (int i = 0; i < sc.psi.injectivity_points; ++i)
    pool.push_back(sphere_point(seq.n, delta * frac(radii), sc.psi.seed + 1, static_cast<std::uint64_t>(i)));
  const auto inj = injectivity_check(seq, nf, pool, j_max, sc.psi.pairs, sc.psi.seed);

  Json summary;
  summary["p"] = orders.p;
  summary["q"] = orders.q;
  summary["j_max"] = j_max;
  summary["block"] = rep.block;
  summary["reference_ratio"] = std::isfinite(ref) ? Json(round12(ref)) : Json(nullptr);
  summary["det_jacobian_at_zero"] = complex12(rep.det_jacobian_at_zero);
  summary["det_error"] = round12(std::abs(rep.det_jacobian_at_zero - 1.0));
  Json pts = Json::array();
  bool all_below = std::isfinite(ref);
  std::size_t fitted = 0;
  for (std::size_t p = 0; p < rep.points.size(); ++p) {
    const auto& row = rep.points[p];
    if (row.fitted_ratio) {
      ++fitted;
      if (!(*row.fitted_ratio <= ref)) all_below = false;
    }
    pts.push_back({{"point_id", p},
                   {"point", vector12(row.point)},
                   {"fitted_ratio", optional12(row.fitted_ratio)},
                   {"diverged", row.diverged}});
  }
  summary["points"] = pts;
  summary["fitted_points"] = fitted;
  summary["all_fitted_below_reference"] = all_below && fitted > 0;
  summary["injectivity"] = {{"pairs", inj.pairs},
                            {"collisions", inj.collisions},
                            {"smallest_gap", inj.pairs ? Json(round12(inj.smallest_gap)) : Json(nullptr)}};
  return {csv.str(), summary};
}

std::string grid_csv(const BasinGrid& grid) {
  std::ostringstream csv;
  csv << "i,j,t1,t2,status,first_entry_step\n";
  for (int j = 0; j < grid.spec.height; ++j)
    for (int i = 0; i < grid.spec.width; ++i) {
      const auto& cell = grid.at(i, j);
      csv << i << ',' << j << ',' << format12(grid.spec.t1(i)) << ',' << format12(grid.spec.t2(j)) << ','
          << status_name(cell.status) << ',' << cell.step << '\n';
    }
  return csv.str();
}

// Row 0 of the image is the largest t2.
std::string grid_pgm(const BasinGrid& grid) {
  const int w = grid.spec.width;
  const int h = grid.spec.height;
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  const double scale = grid.j_max > 0 ? 253.0 / grid.j_max : 0.0;
  for (int row = 0; row < h; ++row)
    for (int i = 0; i < w; ++i) {
      const auto& cell = grid.at(i, h - 1 - row);
      unsigned char level = 0;
      if (cell.status == BasinStatus::kAttracted)
        level = static_cast<unsigned char>(1 + std::lround(scale * cell.step));
      else if (cell.status == BasinStatus::kUndecided)
        level = 255;
      out.push_back(static_cast<char>(level));
    }
  return out;
}

BasinOutput basin_report(const Scenario& sc, bool with_pgm) {
  BasinOutput out{grid_classify(sc.sequence, sc.grid, sc.grid_j_max), {}, {}};
  out.csv = grid_csv(out.grid);
  if (with_pgm) out.pgm = grid_pgm(out.grid);
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "write to " + path.string() + " failed");
}

std::vector<std::filesystem::path> run(std::string_view subcommand, Scenario sc, const RunFlags& flags) {
  apply_flags(sc, flags);
  if (flags.threads) omp_set_num_threads(*flags.threads);

  std::vector<std::pair<std::string, std::string>> files;
  if (subcommand == "normal-form") {
    files.emplace_back("normal_form.json", normal_form_report(sc).dump(2) + "\n");
  } else if (subcommand == "q-bound") {
    files.emplace_back("q_bound.json", q_bound_report(sc).dump(2) + "\n");
  } else if (subcommand == "verify") {
    files.emplace_back("verify.json", verify_report(sc).dump(2) + "\n");
  } else if (subcommand == "psi") {
    auto out = psi_report(sc);
    files.emplace_back("psi.csv", std::move(out.csv));
    files.emplace_back("psi_summary.json", out.summary.dump(2) + "\n");
  } else if (subcommand == "basin") {
    auto out = basin_report(sc, sc.pgm);
    files.emplace_back("basin.csv", std::move(out.csv));
    if (sc.pgm) files.emplace_back("basin.pgm", std::move(out.pgm));
  } else {
    throw Error(ErrorKind::kInvalidArgument, "unknown subcommand '" + std::string(subcommand) + "'");
  }

  const std::filesystem::path dir(sc.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& [name, bytes] : files) {
    written.push_back(dir / name);
    write_file(written.back(), bytes);
  }
  return written;
}

}  // namespace fbasin
