#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "warpgeo/curvature.hpp"
#include "warpgeo/errors.hpp"
#include "warpgeo/geodesics.hpp"
#include "warpgeo/statistics.hpp"
#include "warpgeo/version.hpp"
#include "warpgeo/warp_models.hpp"

namespace warpgeo::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 1729;

struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  if (!std::isfinite(v)) throw NonFiniteError("non-finite value in output");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Tabular output shared by every subcommand: stable CSV header order and a
// JSON mirror with a meta block.
class Table {
public:
  Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(const std::vector<double>& values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_double(v));
    rows_.push_back(std::move(row));
  }

  void add_row_raw(std::vector<std::string> values) { rows_.push_back(std::move(values)); }

  void write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
      os << columns_[i] << (i + 1 < columns_.size() ? "," : "\n");
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i)
        os << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
  }

  void write_json(std::ostream& os, const std::string& command, const std::string& model,
                  std::uint64_t seed) const {
    os << "{\"meta\":{\"command\":\"" << command << "\",\"model\":\"" << model
       << "\",\"seed\":" << seed << ",\"version\":\"" << kVersion << "\"},\"columns\":{";
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      os << "\"" << columns_[c] << "\":[";
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        os << rows_[r][c];
        if (r + 1 < rows_.size()) os << ",";
      }
      os << "]" << (c + 1 < columns_.size() ? "," : "");
    }
    os << "}}\n";
  }

private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct OutputOptions {
  std::string format = "csv";
  std::string path = "-";
};

void emit(const Table& table, const OutputOptions& out, const std::string& command,
          const std::string& model, std::uint64_t seed) {
  std::string path = out.path;
  if (path != "-" && !path.empty() && path.front() != '/') {
    if (const char* dir = std::getenv("WARPGEO_OUTPUT_DIR"))
      path = std::string(dir) + "/" + path;
  }
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (path != "-") {
    file.open(path);
    if (!file) throw std::invalid_argument("cannot open output path: " + path);
    os = &file;
  }
  if (out.format == "json")
    table.write_json(*os, command, model, seed);
  else
    table.write_csv(*os);
}

ModelSpec parse_model(const std::string& s) {
  if (s == "normal") return ModelSpec::normal_line();
  if (s == "vmf") return ModelSpec::von_mises_fisher_s2();
  if (s == "rgauss") return ModelSpec::riemannian_gaussian_h2();
  throw std::invalid_argument("unknown model '" + s + "' (expected normal|vmf|rgauss)");
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

// Chart-native point encoding: real line "x", sphere "x,y,z" (normalized on
// input, warning past 1e-6), half-plane "u,w".
BasePoint parse_point(const ModelSpec& model, const std::string& text) {
  std::vector<double> v = parse_numbers(text);
  switch (model.base) {
    case Manifold::RealLine:
      if (v.size() != 1) throw std::invalid_argument("real-line point needs 1 coordinate");
      return BasePoint::line(v[0]);
    case Manifold::Sphere2: {
      if (v.size() != 3) throw std::invalid_argument("sphere point needs 3 coordinates");
      double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      if (!(n > 0.0)) throw std::invalid_argument("sphere point must be nonzero");
      if (std::abs(n - 1.0) > 1e-6)
        std::cerr << "{\"warning\":{\"kind\":\"normalization\",\"message\":\"sphere point "
                     "renormalized\"}}\n";
      return BasePoint::sphere(v[0] / n, v[1] / n, v[2] / n);
    }
    case Manifold::Hyperbolic2:
      if (v.size() != 2) throw std::invalid_argument("half-plane point needs 2 coordinates");
      return BasePoint::half_plane(v[0], v[1]);
  }
  throw std::invalid_argument("bad point");
}

std::vector<std::string> point_columns(const ModelSpec& model, const std::string& prefix) {
  switch (model.base) {
    case Manifold::RealLine: return {prefix + "x"};
    case Manifold::Sphere2: return {prefix + "x", prefix + "y", prefix + "z"};
    case Manifold::Hyperbolic2: return {prefix + "u", prefix + "w"};
  }
  return {};
}

void append_point(std::vector<double>& row, const ModelSpec& model, const BasePoint& p) {
  int n = model.base == Manifold::RealLine ? 1 : model.base == Manifold::Sphere2 ? 3 : 2;
  for (int i = 0; i < n; ++i) row.push_back(p.c[i]);
}

// "min:max:count:log|lin"
std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4) throw std::invalid_argument("grid must be min:max:count:log|lin");
  double lo = std::stod(parts[0]), hi = std::stod(parts[1]);
  int count = std::stoi(parts[2]);
  bool log_spaced = parts[3] == "log";
  if (!log_spaced && parts[3] != "lin")
    throw std::invalid_argument("grid spacing must be 'log' or 'lin'");
  if (count < 1 || !(lo > 0.0) || !(hi >= lo))
    throw std::invalid_argument("grid bounds must satisfy 0 < min <= max, count >= 1");
  std::vector<double> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out.push_back(log_spaced ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
  }
  return out;
}

std::vector<std::vector<double>> read_numeric_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    // skip a header line of non-numeric fields
    try {
      rows.push_back(parse_numbers(line));
    } catch (const std::invalid_argument&) {
      if (rows.empty()) continue;
      throw;
    }
  }
  return rows;
}

BasePoint point_from_row(const ModelSpec& model, const std::vector<double>& v, std::size_t n) {
  switch (model.base) {
    case Manifold::RealLine: return BasePoint::line(v[0]);
    case Manifold::Sphere2: {
      double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      return BasePoint::sphere(v[0] / norm, v[1] / norm, v[2] / norm);
    }
    case Manifold::Hyperbolic2: return BasePoint::half_plane(v[0], v[1]);
  }
  (void)n;
  throw std::invalid_argument("bad point row");
}

int base_coord_count(const ModelSpec& model) {
  return model.base == Manifold::RealLine ? 1 : model.base == Manifold::Sphere2 ? 3 : 2;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"warpgeo: warped Riemannian geometry of location-scale models"};
  app.require_subcommand(1);

  std::string model_name = "normal";
  OutputOptions out;
  std::uint64_t seed = kDefaultSeed;

  auto add_common = [&](CLI::App* cmd, bool needs_model = true) {
    if (needs_model)
      cmd->add_option("--model", model_name, "model: normal|vmf|rgauss")->required();
    cmd->add_option("--format", out.format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output", out.path, "output path ('-' for stdout)");
    cmd->add_option("--seed", seed, "rng seed");
  };

  // --- coeffs ---------------------------------------------------------------
  auto* coeffs = app.add_subcommand("coeffs", "warp coefficients I0, I1 and derivatives");
  double sigma_opt = 0.0;
  std::string grid_spec;
  add_common(coeffs);
  auto* coeffs_sigma = coeffs->add_option("--sigma", sigma_opt, "single sigma value");
  coeffs->add_option("--grid", grid_spec, "sigma grid min:max:count:log|lin")
      ->excludes(coeffs_sigma);

  // --- curvature --------------------------------------------------------------
  auto* curv = app.add_subcommand("curvature", "sectional curvature scan");
  add_common(curv);
  auto* curv_sigma = curv->add_option("--sigma", sigma_opt, "single sigma value");
  curv->add_option("--grid", grid_spec, "sigma grid min:max:count:log|lin")->excludes(curv_sigma);

  // --- geodesic ---------------------------------------------------------------
  auto* geo = app.add_subcommand("geodesic", "shoot a geodesic and sample it");
  std::string loc_text, vbase_text;
  double sigma0 = 1.0, vsigma = 0.0, tmax = 1.0;
  int steps = 50;
  bool use_oracle = false;
  add_common(geo);
  geo->add_option("--location", loc_text, "starting location (chart coordinates)")->required();
  geo->add_option("--sigma", sigma0, "starting sigma")->required();
  geo->add_option("--vbase", vbase_text, "base velocity components (chart)");
  geo->add_option("--vsigma", vsigma, "vertical velocity component");
  geo->add_option("--tmax", tmax, "final affine time");
  geo->add_option("--steps", steps, "number of sample points")->check(CLI::PositiveNumber);
  geo->add_flag("--oracle", use_oracle, "integrate with the ODE oracle instead");

  // --- distance ---------------------------------------------------------------
  auto* dist = app.add_subcommand("distance", "Rao distance between two warped points");
  std::string z1_text, z2_text;
  double sigma1 = 1.0, sigma2 = 1.0;
  add_common(dist);
  dist->add_option("--location1", z1_text, "first location")->required();
  dist->add_option("--sigma1", sigma1, "first sigma")->required();
  dist->add_option("--location2", z2_text, "second location")->required();
  dist->add_option("--sigma2", sigma2, "second sigma")->required();

  // --- extrinsic-distance -------------------------------------------------------
  auto* extr = app.add_subcommand("extrinsic-distance",
                                  "Mahalanobis-type distance on the slice at fixed sigma");
  std::string x_text, y_text;
  add_common(extr);
  extr->add_option("--x", x_text, "first base point")->required();
  extr->add_option("--y", y_text, "second base point")->required();
  extr->add_option("--sigma", sigma_opt, "slice sigma")->required();

  // --- mean ---------------------------------------------------------------------
  auto* mean_cmd = app.add_subcommand("mean", "Fréchet mean of warped points from a file");
  std::string points_path;
  add_common(mean_cmd);
  mean_cmd
      ->add_option("--points", points_path,
                   "csv file: location coords then sigma (optional trailing weight)")
      ->required();

  // --- estimate --------------------------------------------------------------------
  auto* est = app.add_subcommand("estimate", "natural-gradient online estimation");
  std::string samples_path, init_loc_text, true_loc_text;
  double init_sigma = 1.0, true_sigma = 1.0, gain_a = 1.0;
  std::size_t est_n = 10000;
  int stride = 1;
  add_common(est);
  est->add_option("--samples", samples_path, "csv file of base points (one per row)");
  est->add_option("--true-location", true_loc_text, "generate the stream from this location");
  est->add_option("--true-sigma", true_sigma, "generate the stream with this sigma");
  est->add_option("--n", est_n, "generated stream length");
  est->add_option("--init-location", init_loc_text, "initial location estimate")->required();
  est->add_option("--init-sigma", init_sigma, "initial sigma estimate")->required();
  est->add_option("--gain-a", gain_a, "gain schedule gamma_t = a/t");
  est->add_option("--stride", stride, "emit every k-th state")->check(CLI::PositiveNumber);

  // --- sample -----------------------------------------------------------------------
  auto* samp = app.add_subcommand("sample", "draw i.i.d. samples from the model");
  std::size_t sample_n = 100;
  add_common(samp);
  samp->add_option("--location", loc_text, "location parameter")->required();
  samp->add_option("--sigma", sigma0, "scale/concentration parameter")->required();
  samp->add_option("--n", sample_n, "number of samples");

  // --- validate-fisher ---------------------------------------------------------------
  auto* vf = app.add_subcommand("validate-fisher",
                                "Monte-Carlo check of the warp coefficients from scores");
  std::size_t vf_n = 100000;
  std::string vf_loc_text;
  add_common(vf);
  vf->add_option("--sigma", sigma_opt, "sigma at which to validate")->required();
  vf->add_option("--n", vf_n, "Monte-Carlo sample size");
  vf->add_option("--location", vf_loc_text, "location parameter (defaults per model)");

  // --- completeness ---------------------------------------------------------------------
  auto* comp = app.add_subcommand("completeness", "classify the completeness integrals");
  std::string comp_model;
  comp->add_option("--model", comp_model, "model: normal|vmf|rgauss (default: all)");
  comp->add_option("--format", out.format, "output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  comp->add_option("--output", out.path, "output path ('-' for stdout)");
  comp->add_option("--seed", seed, "rng seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << "{\"error\":{\"kind\":\"argument\",\"message\":\"" << e.what() << "\"}}\n";
    return 2;
  }

  auto default_location = [&](const ModelSpec& model) {
    switch (model.base) {
      case Manifold::RealLine: return BasePoint::line(0.0);
      case Manifold::Sphere2: return BasePoint::sphere(0.0, 0.0, 1.0);
      case Manifold::Hyperbolic2: return BasePoint::half_plane(0.0, 1.0);
    }
    return BasePoint::line(0.0);
  };

  try {
    if (*coeffs) {
      ModelSpec model = parse_model(model_name);
      std::vector<double> grid =
          grid_spec.empty() ? std::vector<double>{sigma_opt} : parse_grid(grid_spec);
      if (grid_spec.empty() && coeffs_sigma->count() == 0)
        throw std::invalid_argument("coeffs: provide --sigma or --grid");
      Table table({"sigma", "i0", "i1", "di0_dsigma", "di1_dsigma", "d2i1_dsigma2"});
      for (double s : grid) {
        WarpCoefficients c = warp_coefficients(model, s);
        table.add_row({s, c.i0, c.i1, c.di0_dsigma, c.di1_dsigma, c.d2i1_dsigma2});
      }
      emit(table, out, "coeffs", model_name, seed);
      return 0;
    }

    if (*curv) {
      ModelSpec model = parse_model(model_name);
      std::vector<double> grid =
          grid_spec.empty() ? std::vector<double>{sigma_opt} : parse_grid(grid_spec);
      if (grid_spec.empty() && curv_sigma->count() == 0)
        throw std::invalid_argument("curvature: provide --sigma or --grid");
      bool has_tangential = model.dim >= 2;
      std::vector<std::string> cols{"sigma"};
      if (has_tangential) cols.push_back("k_tangential");
      cols.push_back("k_mixed");
      cols.push_back("shape_coefficient");
      Table table(cols);
      for (const CurvatureReport& rep : curvature_scan(model, grid)) {
        std::vector<double> row{rep.sigma};
        if (has_tangential) row.push_back(*rep.tangential);
        row.push_back(rep.mixed);
        row.push_back(rep.shape_coefficient);
        table.add_row(row);
      }
      emit(table, out, "curvature", model_name, seed);
      return 0;
    }

    if (*geo) {
      ModelSpec model = parse_model(model_name);
      BasePoint x0 = parse_point(model, loc_text);
      std::vector<double> vb =
          vbase_text.empty() ? std::vector<double>(base_coord_count(model), 0.0)
                             : parse_numbers(vbase_text);
      if (static_cast<int>(vb.size()) != base_coord_count(model))
        throw std::invalid_argument("geodesic: --vbase has the wrong number of components");
      std::array<double, 3> vc{};
      for (std::size_t i = 0; i < vb.size(); ++i) vc[i] = vb[i];
      WarpedPoint z0(x0, sigma0);
      WarpedTangent zdot0{BaseTangent::make(x0, vc), vsigma};

      auto gens = isometry_generators(model.base);
      double e0 = energy(model, z0, zdot0);
      std::vector<double> j0;
      for (const auto& g : gens) j0.push_back(moment(model, z0, zdot0, g));

      std::vector<std::string> cols{"t"};
      for (const auto& c : point_columns(model, "")) cols.push_back(c);
      cols.push_back("sigma");
      cols.push_back("energy");
      cols.push_back("energy_drift");
      cols.push_back("max_moment_drift");
      Table table(cols);

      GeodesicPath path = geodesic_closed_form(model, z0, zdot0);
      std::vector<double> times;
      for (int i = 0; i < steps; ++i)
        times.push_back(tmax * static_cast<double>(i) / std::max(1, steps - 1));

      auto states = use_oracle ? std::vector<std::pair<WarpedPoint, WarpedTangent>>{}
                               : path.sample(times);
      for (int i = 0; i < steps; ++i) {
        std::pair<WarpedPoint, WarpedTangent> state =
            use_oracle ? geodesic_ode_oracle(model, z0, zdot0, times[i]) : states[i];
        double e = energy(model, state.first, state.second);
        double drift = std::abs(e - e0) / (1.0 + std::abs(e0));
        double jdrift = 0.0;
        for (std::size_t g = 0; g < gens.size(); ++g) {
          double j = moment(model, state.first, state.second, gens[g]);
          jdrift = std::max(jdrift, std::abs(j - j0[g]) / (1.0 + std::abs(j0[g])));
        }
        std::vector<double> row{times[i]};
        append_point(row, model, state.first.location);
        row.push_back(state.first.sigma);
        row.push_back(e);
        row.push_back(drift);
        row.push_back(jdrift);
        table.add_row(row);
      }
      emit(table, out, "geodesic", model_name, seed);
      return 0;
    }

    if (*dist) {
      ModelSpec model = parse_model(model_name);
      WarpedPoint z1(parse_point(model, z1_text), sigma1);
      WarpedPoint z2(parse_point(model, z2_text), sigma2);
      Table table({"rao_distance"});
      table.add_row({rao_distance(model, z1, z2)});
      emit(table, out, "distance", model_name, seed);
      return 0;
    }

    if (*extr) {
      ModelSpec model = parse_model(model_name);
      BasePoint x = parse_point(model, x_text);
      BasePoint y = parse_point(model, y_text);
      Table table({"sigma", "extrinsic_distance"});
      table.add_row({sigma_opt, extrinsic_distance(model, x, y, sigma_opt)});
      emit(table, out, "extrinsic-distance", model_name, seed);
      return 0;
    }

    if (*mean_cmd) {
      ModelSpec model = parse_model(model_name);
      int nc = base_coord_count(model);
      std::vector<WarpedPoint> pts;
      std::vector<double> weights;
      for (const auto& row : read_numeric_rows(points_path)) {
        if (static_cast<int>(row.size()) < nc + 1)
          throw std::invalid_argument("mean: each row needs location coords then sigma");
        pts.emplace_back(point_from_row(model, row, row.size()), row[nc]);
        if (static_cast<int>(row.size()) > nc + 1) weights.push_back(row[nc + 1]);
      }
      if (!weights.empty() && weights.size() != pts.size())
        throw std::invalid_argument("mean: weights must be given for all rows or none");
      WarpedPoint m = frechet_mean(model, pts, weights);
      std::vector<std::string> cols = point_columns(model, "mean_");
      cols.push_back("mean_sigma");
      Table table(cols);
      std::vector<double> row;
      append_point(row, model, m.location);
      row.push_back(m.sigma);
      table.add_row(row);
      emit(table, out, "mean", model_name, seed);
      return 0;
    }

    if (*est) {
      ModelSpec model = parse_model(model_name);
      std::vector<BasePoint> stream;
      if (!samples_path.empty()) {
        for (const auto& row : read_numeric_rows(samples_path))
          stream.push_back(point_from_row(model, row, row.size()));
      } else {
        if (true_loc_text.empty())
          throw std::invalid_argument("estimate: provide --samples or --true-location");
        WarpedPoint truth(parse_point(model, true_loc_text), true_sigma);
        stream = sample(model, truth, est_n, seed);
      }
      WarpedPoint init(parse_point(model, init_loc_text), init_sigma);
      EstimatorTrajectory traj =
          natural_gradient_estimate(model, stream, GainSchedule{gain_a}, init);
      std::vector<std::string> cols{"step"};
      for (const auto& c : point_columns(model, "")) cols.push_back(c);
      cols.push_back("sigma");
      Table table(cols);
      for (std::size_t i = 0; i < traj.states.size(); i += stride) {
        const EstimatorState& st = traj.states[i];
        std::vector<double> row{static_cast<double>(st.step)};
        append_point(row, model, st.estimate.location);
        row.push_back(st.estimate.sigma);
        table.add_row(row);
      }
      if ((traj.states.size() - 1) % stride != 0) {
        const EstimatorState& st = traj.states.back();
        std::vector<double> row{static_cast<double>(st.step)};
        append_point(row, model, st.estimate.location);
        row.push_back(st.estimate.sigma);
        table.add_row(row);
      }
      emit(table, out, "estimate", model_name, seed);
      if (traj.diverged) {
        std::cerr << "{\"error\":{\"kind\":\"divergence\",\"message\":\"estimator sigma left "
                     "its bounds\"}}\n";
        return 3;
      }
      return 0;
    }

    if (*samp) {
      ModelSpec model = parse_model(model_name);
      WarpedPoint z(parse_point(model, loc_text), sigma0);
      Table table(point_columns(model, ""));
      for (const BasePoint& p : sample(model, z, sample_n, seed)) {
        std::vector<double> row;
        append_point(row, model, p);
        table.add_row(row);
      }
      emit(table, out, "sample", model_name, seed);
      return 0;
    }

    if (*vf) {
      ModelSpec model = parse_model(model_name);
      BasePoint loc = vf_loc_text.empty() ? default_location(model)
                                          : parse_point(model, vf_loc_text);
      WarpedPoint z(loc, sigma_opt);
      FisherEstimate fe = mc_fisher(model, z, vf_n, seed);
      WarpCoefficients c = warp_coefficients(model, sigma_opt);
      Table table({"sigma", "i0", "i1", "i0_hat", "i1_hat", "i0_stderr", "i1_stderr",
                   "i0_ratio", "i1_ratio"});
      table.add_row({sigma_opt, c.i0, c.i1, fe.i0_hat, fe.i1_hat, fe.i0_stderr, fe.i1_stderr,
                     fe.i0_hat / c.i0, fe.i1_hat / c.i1});
      emit(table, out, "validate-fisher", model_name, seed);
      return 0;
    }

    if (*comp) {
      std::vector<std::string> names =
          comp_model.empty() ? std::vector<std::string>{"normal", "vmf", "rgauss"}
                             : std::vector<std::string>{comp_model};
      Table table({"model", "diverges_at_zero", "diverges_at_infinity", "complete"});
      for (const auto& nm : names) {
        ModelSpec model = parse_model(nm);
        CompletenessReport rep = completeness_check(model);
        auto text = [](TailClass t) {
          return t == TailClass::Divergent ? std::string("divergent")
                 : t == TailClass::Convergent ? std::string("convergent")
                                              : std::string("undetermined");
        };
        table.add_row_raw({nm, text(rep.at_zero), text(rep.at_infinity),
                           rep.complete() ? "true" : "false"});
      }
      emit(table, out, "completeness", comp_model.empty() ? "all" : comp_model, seed);
      return 0;
    }
  } catch (const ConvergenceError& e) {
    std::cerr << "{\"error\":{\"kind\":\"convergence\",\"message\":\"" << e.what() << "\"}}\n";
    return 3;
  } catch (const BoundaryEscapeError& e) {
    std::cerr << "{\"error\":{\"kind\":\"boundary_escape\",\"message\":\"" << e.what()
              << "\",\"escape_time\":" << e.escape_time() << "}}\n";
    return 3;
  } catch (const NonFiniteError& e) {
    std::cerr << "{\"error\":{\"kind\":\"non_finite\",\"message\":\"" << e.what() << "\"}}\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "{\"error\":{\"kind\":\"domain\",\"message\":\"" << e.what() << "\"}}\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "{\"error\":{\"kind\":\"argument\",\"message\":\"" << e.what() << "\"}}\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":{\"kind\":\"internal\",\"message\":\"" << e.what() << "\"}}\n";
    return 3;
  }
  return 2;
}

}  // namespace warpgeo::cli
