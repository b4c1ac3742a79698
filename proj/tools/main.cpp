#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blochball/geometry.hpp"
#include "blochball/mapfile.hpp"
#include "blochball/report.hpp"
#include "blochball/verify.hpp"

namespace bb = blochball;
using bb::verify::CampaignOptions;
using bb::verify::VerificationReport;

namespace {

struct CommonOpts {
  std::uint64_t seed = 1;
  std::string out;
  std::string csv;
  double quad_tol = 1e-10;
  double sup_tol = 1e-6;
  double assert_tol = 1e-9;
  double bound_scale = 1.0;
  int prenorm_samples = 4096;
  int prenorm_starts = 10;
  int prenorm_evals = 800;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--seed", c.seed, "campaign seed (64-bit)");
  cmd->add_option("--out", c.out, "write the JSON report to this path");
  cmd->add_option("--csv", c.csv, "write per-sample rows to this path");
  cmd->add_option("--quad-tol", c.quad_tol, "quadrature absolute tolerance");
  cmd->add_option("--sup-tol", c.sup_tol, "relative sup-estimation slack");
  cmd->add_option("--assert-tol", c.assert_tol, "assertion tolerance");
  cmd->add_option("--bound-scale", c.bound_scale,
                  "scale asserted bounds (testing knob)");
  cmd->add_option("--prenorm-samples", c.prenorm_samples,
                  "sample budget of the sup estimator");
  cmd->add_option("--prenorm-starts", c.prenorm_starts,
                  "local refinements of the sup estimator");
  cmd->add_option("--prenorm-evals", c.prenorm_evals,
                  "evaluations per refinement");
}

CampaignOptions campaign_options(const CommonOpts& c, bool rows) {
  CampaignOptions opt;
  opt.sup_tol = c.sup_tol;
  opt.assert_tol = c.assert_tol;
  opt.bound_scale = c.bound_scale;
  opt.collect_rows = rows;
  opt.prenorm_budget.samples = c.prenorm_samples;
  opt.prenorm_budget.refine_starts = c.prenorm_starts;
  opt.prenorm_budget.refine_max_evals = c.prenorm_evals;
  opt.quadrature.abs_tol = c.quad_tol;
  return opt;
}

std::string default_out_path(const std::string& command, std::uint64_t seed) {
  const char* dir = std::getenv("BLOCHBALL_OUTDIR");
  if (!dir || !*dir) return {};
  return std::string(dir) + "/" + command + "_seed" + std::to_string(seed) +
         ".json";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write to " + path);
  out << content;
}

// Battery spec: "random:<count>:deg<k>" or a map-file path. Maps are
// normalized to unit prenorm; the factors are echoed into the report notes.
std::vector<bb::holo::HoloMap> load_battery(const std::string& spec, int n,
                                            std::uint64_t seed,
                                            const CampaignOptions& opt,
                                            std::vector<std::string>* notes) {
  if (spec.rfind("random:", 0) == 0) {
    const auto p1 = spec.find(':', 7);
    if (p1 == std::string::npos || spec.compare(p1 + 1, 3, "deg") != 0)
      throw std::invalid_argument(
          "battery spec must be random:<count>:deg<k> or a file path");
    const int count = std::stoi(spec.substr(7, p1 - 7));
    const int degree = std::stoi(spec.substr(p1 + 4));
    std::vector<double> factors;
    auto maps = bb::verify::random_battery(count, degree, n, seed,
                                           opt.prenorm_budget, &factors);
    if (notes) {
      std::ostringstream os;
      os << "battery random:" << count << ":deg" << degree
         << ", normalization factors:";
      for (double f : factors) os << " " << f;
      notes->push_back(os.str());
    }
    return maps;
  }
  auto raw = bb::mapio::load_battery_file(spec);
  std::vector<bb::holo::HoloMap> maps;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].dim() != n)
      throw std::invalid_argument("battery map dimension differs from --n");
    double factor = 1.0;
    maps.push_back(bb::verify::normalized(raw[i], {n, 1.0}, opt.prenorm_budget,
                                          bb::mix_seed(seed, 9000 + i),
                                          &factor));
    if (notes)
      notes->push_back("map " + std::to_string(i) +
                       " normalization factor: " + std::to_string(factor));
  }
  return maps;
}

int finish(VerificationReport rep, const CommonOpts& c) {
  std::string out = c.out.empty() ? default_out_path(rep.theorem, rep.seed)
                                  : c.out;
  if (!out.empty()) write_file(out, bb::report_to_json(rep));
  if (!c.csv.empty()) write_file(c.csv, bb::report_to_csv(rep));

  std::cout << rep.theorem << ": "
            << (rep.applicable ? (rep.pass ? "PASS" : "FAIL") : "INAPPLICABLE")
            << "  max_ratio=" << rep.stats.max_ratio
            << "  bound=" << rep.stats.bound << "  margin=" << rep.stats.margin
            << "  violations=" << rep.violations.size() << "\n";
  for (const auto& note : rep.notes) std::cout << "  note: " << note << "\n";
  if (!out.empty()) std::cout << "  report: " << out << "\n";
  if (!rep.applicable) return 3;
  return rep.pass ? 0 : 2;
}

VerificationReport geometry_campaign(int n, int samples, bool variational,
                                     int pairs, int control_points,
                                     std::uint64_t seed,
                                     const CampaignOptions& opt,
                                     double var_tol) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.theorem = "geometry";
  rep.seed = seed;
  rep.params = {{"n", static_cast<double>(n)},
                {"samples", static_cast<double>(samples)},
                {"quad_tol", opt.quadrature.abs_tol},
                {"variational", variational ? 1.0 : 0.0}};

  bb::Rng rng(seed);
  auto rand_point = [&](double rmax) {
    bb::CVec v(n);
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      v[k] = {rng.gaussian(), rng.gaussian()};
      s += std::norm(v[k]);
    }
    const double r = rmax * std::pow(rng.uniform01(), 1.0 / (2.0 * n));
    for (bb::cplx& c : v) c *= r / std::sqrt(s);
    return bb::BallPoint(std::move(v));
  };

  const double tol = 1e-8;  // relative agreement of length and distance
  for (int i = 0; i < samples; ++i) {
    const bb::BallPoint z = rand_point(0.9);
    const bb::BallPoint w = rand_point(0.9);
    if (z.same_coords(w)) continue;
    const double beta = bb::geom::bergman_distance(z, w);
    const double len = bb::geom::curve_length(
        bb::geom::pulled_radius_curve(z, w), opt.quadrature);
    const double rel = std::abs(len - beta) / std::max(beta, 1e-300);
    if (rel > rep.stats.max_ratio) {
      rep.stats.max_ratio = rel;
      rep.stats.points = {z.coords(), w.coords()};
    }
    if (rel > tol)
      rep.violations.push_back({"pulled-radius length vs closed-form distance",
                                -1,
                                {z.coords(), w.coords()},
                                len,
                                beta,
                                rel});
    if (opt.collect_rows) {
      bb::verify::SampleRow row{-1, {}};
      for (const bb::cplx& c : z.coords()) {
        row.values.push_back(c.real());
        row.values.push_back(c.imag());
      }
      for (const bb::cplx& c : w.coords()) {
        row.values.push_back(c.real());
        row.values.push_back(c.imag());
      }
      row.values.push_back(beta);
      row.values.push_back(len);
      row.values.push_back(rel);
      rep.rows.push_back(std::move(row));
    }
  }
  rep.stats.bound = tol;
  rep.stats.margin = tol - rep.stats.max_ratio;

  if (variational) {
    bb::geom::CurveFamily fam;
    fam.control_points = control_points;
    bb::geom::OptimizerBudget budget;
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
      const bb::BallPoint z = rand_point(0.85);
      const bb::BallPoint w = rand_point(0.85);
      if (z.same_coords(w)) continue;
      const double beta = bb::geom::bergman_distance(z, w);
      const auto res =
          bb::geom::geodesic_infimum(z, w, fam, budget, opt.quadrature);
      const double rel = std::abs(res.length - beta) / beta;
      worst = std::max(worst, rel);
      if (rel > var_tol)
        rep.violations.push_back({"variational infimum vs closed form",
                                  -1,
                                  {z.coords(), w.coords()},
                                  res.length,
                                  beta,
                                  rel});
    }
    std::ostringstream os;
    os << "variational worst relative gap: " << worst << " over " << pairs
       << " pairs";
    rep.notes.push_back(os.str());
  }

  rep.pass = rep.violations.empty();
  if (opt.collect_rows) {
    rep.row_columns = {"pair"};
    for (int k = 0; k < n; ++k) {
      rep.row_columns.push_back("z_" + std::to_string(k) + "_re");
      rep.row_columns.push_back("z_" + std::to_string(k) + "_im");
    }
    for (int k = 0; k < n; ++k) {
      rep.row_columns.push_back("w_" + std::to_string(k) + "_re");
      rep.row_columns.push_back("w_" + std::to_string(k) + "_im");
    }
    rep.row_columns.push_back("beta");
    rep.row_columns.push_back("length");
    rep.row_columns.push_back("rel_err");
  }
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "blochball: Bergman-ball geometry and sharp Lipschitz bounds for "
      "Bloch-type densities"};
  app.require_subcommand(1);

  // constants
  auto* c_const = app.add_subcommand(
      "constants", "print the sharp constant M(n) and related closed forms");
  int const_n = 1;
  double const_alpha = 1.0;
  std::string const_out;
  c_const->add_option("--n", const_n, "complex dimension")->required();
  c_const->add_option("--alpha", const_alpha, "Bloch weight exponent");
  c_const->add_option("--out", const_out, "write the values as JSON");

  // geometry
  auto* c_geo = app.add_subcommand(
      "geometry", "distance/quadrature consistency and variational checks");
  CommonOpts geo_c;
  int geo_n = 2, geo_samples = 100, geo_pairs = 20, geo_cp = 8;
  bool geo_var = false;
  double geo_var_tol = 1e-4;
  c_geo->add_option("--n", geo_n, "complex dimension")->required();
  c_geo->add_option("--samples", geo_samples, "random pairs for the metric check");
  c_geo->add_flag("--variational", geo_var, "also run the geodesic minimizer");
  c_geo->add_option("--pairs", geo_pairs, "pairs for the variational check");
  c_geo->add_option("--control-points", geo_cp, "spline control points");
  c_geo->add_option("--var-tol", geo_var_tol, "variational relative tolerance");
  add_common(c_geo, geo_c);

  // thm1
  auto* c_t1 = app.add_subcommand(
      "thm1", "Lipschitz bound with the sharp constant M(n)");
  CommonOpts t1_c;
  int t1_n = 1, t1_pairs = 10000;
  std::string t1_battery = "random:50:deg4";
  c_t1->add_option("--n", t1_n, "complex dimension")->required();
  c_t1->add_option("--battery", t1_battery, "random:<count>:deg<k> or map file");
  c_t1->add_option("--pairs", t1_pairs, "sampled pairs per map");
  add_common(c_t1, t1_c);

  // sharpness
  auto* c_sh = app.add_subcommand("sharpness",
                                  "extremal family ratio against M(n) - eps");
  CommonOpts sh_c;
  int sh_n = 1;
  std::vector<double> sh_eps{0.01};
  c_sh->add_option("--n", sh_n, "complex dimension")->required();
  c_sh->add_option("--eps", sh_eps, "one or more eps values");
  add_common(c_sh, sh_c);

  // thm2
  auto* c_t2 = app.add_subcommand(
      "thm2", "disk derivative bounds for the alpha = 1 density");
  CommonOpts t2_c;
  int t2_grid = 10000;
  std::string t2_battery = "random:20:deg4";
  c_t2->add_option("--battery", t2_battery, "random:<count>:deg<k> or map file");
  c_t2->add_option("--grid", t2_grid, "interior grid points");
  add_common(c_t2, t2_c);

  // thmD
  auto* c_td = app.add_subcommand(
      "thmD", "distortion bounds and extremal saturation");
  CommonOpts td_c;
  int td_n = 1, td_samples = 1000;
  double td_alpha = 1.0;
  std::vector<double> td_lambdas{0.25, 0.5, 0.75, 1.0};
  std::string td_battery = "random:10:deg4";
  c_td->add_option("--n", td_n, "complex dimension")->required();
  c_td->add_option("--alpha", td_alpha, "Bloch weight exponent");
  c_td->add_option("--lambdas", td_lambdas, "lambda grid");
  c_td->add_option("--samples", td_samples, "points per validity region");
  c_td->add_option("--battery", td_battery, "random:<count>:deg<k> or map file");
  add_common(c_td, td_c);

  // thm3
  auto* c_t3 = app.add_subcommand(
      "thm3", "composition operator bounded below under the (r, eps) hypothesis");
  CommonOpts t3_c;
  int t3_n = 1, t3_wgrid = 64;
  double t3_r = 0.1, t3_eps = 0.5;
  std::string t3_battery = "random:10:deg4";
  std::string t3_mobius, t3_phi_file;
  c_t3->add_option("--n", t3_n, "complex dimension")->required();
  c_t3->add_option("--r", t3_r, "hypothesis radius r")->required();
  c_t3->add_option("--eps", t3_eps, "hypothesis tau lower bound")->required();
  c_t3->add_option("--mobius", t3_mobius,
                   "use the automorphism with this anchor, e.g. 0.3 or "
                   "0.3+0.1i,0.2");
  c_t3->add_option("--phi", t3_phi_file, "self-map from a map file (one entry)");
  c_t3->add_option("--battery", t3_battery, "random:<count>:deg<k> or map file");
  c_t3->add_option("--wgrid", t3_wgrid, "hypothesis scan grid size");
  add_common(c_t3, t3_c);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_const->parsed()) {
      const double m_n = bb::bloch::constant_M(const_n);
      const double a = bb::bloch::a0(const_alpha, const_n);
      const double cap = bb::verify::theorem3_r_cap(const_n);
      const double emax = bb::verify::sharpness_eps_max(const_n);
      std::cout << "M(" << const_n << ") = " << m_n << "\n"
                << "a0(alpha=" << const_alpha << ", n=" << const_n
                << ") = " << a << "\n"
                << "theorem-3 r cap = " << cap << "\n"
                << "sharpness eps max = " << emax << "\n";
      if (const_n == 1)
        std::cout << "earlier disk bound (baseline): 3.31, improved to " << m_n
                  << "\n";
      if (!const_out.empty()) {
        std::ostringstream os;
        os << "{\n  \"command\": \"constants\",\n  \"version\": \""
           << bb::kVersion << "\",\n  \"params\": {\"n\": " << const_n
           << ", \"alpha\": " << const_alpha << "},\n  \"M\": " << m_n
           << ",\n  \"a0\": " << a << ",\n  \"r_cap\": " << cap
           << ",\n  \"eps_max\": " << emax
           << ",\n  \"baseline_disk_bound\": 3.31\n}\n";
        write_file(const_out, os.str());
      }
      return 0;
    }

    if (c_geo->parsed()) {
      const auto opt = campaign_options(geo_c, !geo_c.csv.empty());
      return finish(geometry_campaign(geo_n, geo_samples, geo_var, geo_pairs,
                                      geo_cp, geo_c.seed, opt, geo_var_tol),
                    geo_c);
    }

    if (c_t1->parsed()) {
      const auto opt = campaign_options(t1_c, !t1_c.csv.empty());
      std::vector<std::string> notes;
      const auto battery = load_battery(t1_battery, t1_n, t1_c.seed, opt, &notes);
      auto rep = bb::verify::check_theorem1(battery, t1_n, t1_pairs, t1_c.seed,
                                            opt);
      rep.str_params.emplace_back("battery", t1_battery);
      for (auto& s : notes) rep.notes.push_back(std::move(s));
      return finish(std::move(rep), t1_c);
    }

    if (c_sh->parsed()) {
      VerificationReport rep;
      rep.theorem = "sharpness";
      rep.seed = sh_c.seed;
      rep.params = {{"n", static_cast<double>(sh_n)}};
      double min_margin = 1e300;
      const double m_n = bb::bloch::constant_M(sh_n);
      for (double eps : sh_eps) {
        const auto res = bb::verify::sharpness_run(eps, sh_n);
        const double margin = res.ratio - (m_n - eps - 1e-9);
        min_margin = std::min(min_margin, margin);
        std::ostringstream os;
        os << "eps=" << eps << ": m=" << res.m << " ratio=" << res.ratio
           << " (M(n)-eps=" << m_n - eps << ")";
        rep.notes.push_back(os.str());
        if (margin < 0.0)
          rep.violations.push_back({"sharpness ratio below M(n)-eps",
                                    -1,
                                    {},
                                    res.ratio,
                                    m_n - eps - 1e-9,
                                    -margin});
        rep.rows.push_back({-1, {eps, res.m, res.ratio}});
        rep.stats.max_ratio = std::max(rep.stats.max_ratio, res.ratio);
      }
      rep.row_columns = {"i", "eps", "m", "ratio"};
      rep.stats.bound = m_n;
      rep.stats.margin = min_margin;
      rep.pass = rep.violations.empty();
      return finish(std::move(rep), sh_c);
    }

    if (c_t2->parsed()) {
      const auto opt = campaign_options(t2_c, !t2_c.csv.empty());
      std::vector<std::string> notes;
      const auto battery = load_battery(t2_battery, 1, t2_c.seed, opt, &notes);
      auto rep = bb::verify::check_theorem2(battery, t2_grid, t2_c.seed, opt);
      rep.str_params.emplace_back("battery", t2_battery);
      for (auto& s : notes) rep.notes.push_back(std::move(s));
      return finish(std::move(rep), t2_c);
    }

    if (c_td->parsed()) {
      const auto opt = campaign_options(td_c, !td_c.csv.empty());
      std::vector<std::string> notes;
      const auto battery = load_battery(td_battery, td_n, td_c.seed, opt, &notes);
      auto rep = bb::verify::check_theoremD(td_lambdas, td_alpha, td_n,
                                            td_samples, td_c.seed, battery, opt);
      rep.str_params.emplace_back("battery", td_battery);
      for (auto& s : notes) rep.notes.push_back(std::move(s));
      return finish(std::move(rep), td_c);
    }

    if (c_t3->parsed()) {
      auto opt = campaign_options(t3_c, !t3_c.csv.empty());
      opt.wgrid = t3_wgrid;
      if (t3_mobius.empty() == t3_phi_file.empty())
        throw std::invalid_argument("thm3 needs exactly one of --mobius/--phi");
      bb::holo::HoloMap phi = bb::holo::HoloMap::identity(t3_n);
      if (!t3_mobius.empty()) {
        bb::CVec a;
        std::stringstream ss(t3_mobius);
        std::string item;
        while (std::getline(ss, item, ','))
          a.push_back(bb::mapio::parse_complex_literal(item));
        if (static_cast<int>(a.size()) != t3_n)
          throw std::invalid_argument("--mobius anchor has wrong dimension");
        const double an = bb::vec_norm(a);
        phi = an == 0.0 ? bb::holo::mobius_auto(bb::BallPoint::origin(t3_n))
                        : bb::holo::mobius_auto(bb::BallPoint(a));
      } else {
        auto maps = bb::mapio::load_battery_file(t3_phi_file);
        if (maps.size() != 1)
          throw std::invalid_argument("--phi file must hold exactly one map");
        phi = maps[0];
        if (phi.dim() != t3_n)
          throw std::invalid_argument("--phi map has wrong dimension");
      }
      std::vector<std::string> notes;
      const auto battery = load_battery(t3_battery, t3_n, t3_c.seed, opt, &notes);
      auto rep = bb::verify::check_theorem3(phi, t3_r, t3_eps, battery,
                                            t3_c.seed, opt);
      rep.str_params.emplace_back("battery", t3_battery);
      for (auto& s : notes) rep.notes.push_back(std::move(s));
      return finish(std::move(rep), t3_c);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
