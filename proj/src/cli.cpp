#include "mfact/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfact/factor.hpp"
#include "mfact/frechet.hpp"
#include "mfact/matrix_io.hpp"
#include "mfact/newton.hpp"
#include "mfact/verify.hpp"

namespace mfact::cli {

namespace fs = std::filesystem;

namespace {

using NamedMatrices = std::vector<std::pair<std::string, DenseMatrix>>;

struct Options {
  std::string kind;
  std::vector<std::string> inputs;
  std::string perturbation;
  std::string output;
  std::string format = "csv";
  std::string family = "linear";
  int steps = kDefaultPathSteps;
  std::uint64_t seed = 0;
  std::string report;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish_write(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("error while writing " + path.string());
}

// CSV: a directory with <name>.csv per matrix and scalars as one-value
// files. JSON: a single object holding every matrix and scalar.
void write_outputs(const Options& opt, const NamedMatrices& matrices,
                   const std::vector<std::pair<std::string, double>>& scalars) {
  const fs::path out_path(opt.output);
  if (opt.format == "json") {
    nlohmann::json j;
    j["kind"] = opt.kind;
    for (const auto& [name, m] : matrices) j[name] = matrix_to_json(m);
    for (const auto& [name, v] : scalars) j[name] = v;
    std::ofstream f = open_for_write(out_path);
    f << j.dump(2) << '\n';
    finish_write(f, out_path);
    return;
  }
  std::error_code ec;
  fs::create_directories(out_path, ec);
  if (ec || !fs::is_directory(out_path)) {
    throw IoError("cannot create output directory " + out_path.string());
  }
  for (const auto& [name, m] : matrices) {
    const fs::path p = out_path / (name + ".csv");
    std::ofstream f = open_for_write(p);
    write_matrix_csv(f, m);
    finish_write(f, p);
  }
  for (const auto& [name, v] : scalars) {
    const fs::path p = out_path / (name + ".csv");
    std::ofstream f = open_for_write(p);
    f << format_exact(v) << '\n';
    finish_write(f, p);
  }
}

DenseMatrix load_input(const std::string& path) {
  try {
    return load_matrix(path);
  } catch (const Error& e) {
    throw IoError(path + ": " + e.what());
  }
}

int cmd_factor(const Options& opt) {
  const DenseMatrix a = load_input(opt.inputs.front());
  NamedMatrices out;
  if (opt.kind == "qr") {
    QRPair f = qr_factor(a);
    out = {{"q", std::move(f.q)}, {"r", std::move(f.r)}};
  } else if (opt.kind == "cholesky") {
    out = {{"l", cholesky_factor(a).l}};
  } else {
    LDUTriple f = ldu_factor(a);
    out = {{"l", std::move(f.l)}, {"d", std::move(f.d)}, {"u", std::move(f.u)}};
  }
  write_outputs(opt, out, {});
  return kExitOk;
}

int cmd_derivative(const Options& opt, std::ostream& err) {
  const DenseMatrix a = load_input(opt.inputs.front());
  const DenseMatrix e = load_input(opt.perturbation);
  if (a.n() != e.n()) throw IoError("input and perturbation have different dimensions");

  NamedMatrices out;
  double residual = 0.0;
  if (opt.kind == "qr") {
    const QRPair f = qr_factor(a);
    QRTangent tan = qr_derivative_solve(f.q, f.r, e);
    residual = hs_norm(qr_derivative_apply(f.q, f.r, tan) - e);
    out = {{"u", std::move(tan.u)}, {"v", std::move(tan.v)}};
  } else if (opt.kind == "cholesky") {
    const CholeskyFactor f = cholesky_factor(a);
    DenseMatrix v = cholesky_derivative_solve(f.l, e);
    residual = hs_norm(cholesky_derivative_apply(f.l, v) - e);
    out = {{"v", std::move(v)}};
  } else {
    const LDUTriple f = ldu_factor(a);
    LDUTangent tan = ldu_derivative_solve(f.l, f.d, f.u, e);
    residual = hs_norm(ldu_derivative_apply(f.l, f.d, f.u, tan) - e);
    out = {{"a", std::move(tan.a)}, {"s", std::move(tan.s)}, {"b", std::move(tan.b)}};
  }
  write_outputs(opt, out, {{"residual", residual}});
  const double bound = 1e-8 * (1.0 + hs_norm(e));
  if (residual > bound) {
    err << "derivative residual " << format_exact(residual) << " exceeds " << format_exact(bound)
        << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

template <class Factors>
void write_trajectory(const fs::path& path, const std::vector<std::string>& norm_columns,
                      const TrackReport<Factors>& report,
                      const std::function<std::vector<double>(const Factors&)>& norms) {
  std::ofstream f = open_for_write(path);
  f << 't';
  for (const auto& c : norm_columns) f << ',' << c;
  f << ",newton_iters,residual\n";
  for (std::size_t i = 0; i < report.ts.size(); ++i) {
    f << format_exact(report.ts[i]);
    for (double v : norms(report.factors[i])) f << ',' << format_exact(v);
    f << ',' << report.newton_iters[i] << ',' << format_exact(report.residuals[i]) << '\n';
  }
  finish_write(f, path);
}

int cmd_track(const Options& opt) {
  std::vector<DenseMatrix> samples;
  for (const auto& p : opt.inputs) samples.push_back(load_input(p));
  PathSpec path;
  if (opt.family == "linear") {
    if (samples.size() != 2) throw IoError("linear family needs exactly two --input files");
    path = linear_path(samples[0], samples[1], opt.steps);
  } else {
    if (samples.size() < 2) throw IoError("custom-samples family needs at least two --input files");
    path = piecewise_linear_path(std::move(samples), opt.steps);
  }

  const fs::path out(opt.output);
  if (opt.kind == "qr") {
    write_trajectory<QRPair>(out, {"q_norm", "r_norm"}, track_qr(path), [](const QRPair& f) {
      return std::vector<double>{hs_norm(f.q), hs_norm(f.r)};
    });
  } else if (opt.kind == "cholesky") {
    write_trajectory<CholeskyFactor>(out, {"l_norm"}, track_cholesky(path),
                                     [](const CholeskyFactor& f) {
                                       return std::vector<double>{hs_norm(f.l)};
                                     });
  } else {
    write_trajectory<LDUTriple>(out, {"l_norm", "d_norm", "u_norm"}, track_ldu(path),
                                [](const LDUTriple& f) {
                                  return std::vector<double>{hs_norm(f.l), hs_norm(f.d),
                                                             hs_norm(f.u)};
                                });
  }
  return kExitOk;
}

int cmd_verify(const Options& opt, std::ostream& out) {
  const fs::path path(opt.report);
  std::ofstream f = open_for_write(path);
  const std::vector<CheckResult> results = run_all(ToleranceConfig{}, opt.seed);
  f << report_json(results).dump(2) << '\n';
  finish_write(f, path);

  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " worst=" << format_exact(r.worst_violation)
        << '\n';
    all = all && r.passed;
  }
  return all ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dense QR, Cholesky and LDU factorizations with their derivatives"};
  app.require_subcommand(1);
  Options opt;

  const std::vector<std::string> kinds = {"qr", "cholesky", "ldu"};
  const std::vector<std::string> formats = {"csv", "json"};

  auto* factor = app.add_subcommand("factor", "factor a matrix file");
  factor->add_option("--kind", opt.kind)->required()->check(CLI::IsMember(kinds));
  factor->add_option("--input", opt.inputs, "matrix file (CSV or JSON)")->required()->expected(1);
  factor->add_option("--output", opt.output)->required();
  factor->add_option("--format", opt.format)->check(CLI::IsMember(formats));

  auto* derivative = app.add_subcommand("derivative", "solve the derivative equation DF(x) = E");
  derivative->add_option("--kind", opt.kind)->required()->check(CLI::IsMember(kinds));
  derivative->add_option("--input", opt.inputs)->required()->expected(1);
  derivative->add_option("--perturbation", opt.perturbation)->required();
  derivative->add_option("--output", opt.output)->required();
  derivative->add_option("--format", opt.format)->check(CLI::IsMember(formats));

  auto* track = app.add_subcommand("track", "continue factors along a matrix path");
  track->add_option("--kind", opt.kind)->required()->check(CLI::IsMember(kinds));
  track->add_option("--family", opt.family)
      ->check(CLI::IsMember(std::vector<std::string>{"linear", "custom-samples"}));
  track->add_option("--input", opt.inputs, "endpoint or sample matrices, in order")->required();
  track->add_option("--output", opt.output, "trajectory CSV")->required();
  track->add_option("--steps", opt.steps)->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "run the property suite");
  verify->add_option("--seed", opt.seed);
  verify->add_option("--report", opt.report, "JSON report path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsageOrIo;
  }

  try {
    if (factor->parsed()) return cmd_factor(opt);
    if (derivative->parsed()) return cmd_derivative(opt, err);
    if (track->parsed()) return cmd_track(opt);
    return cmd_verify(opt, out);
  } catch (const IoError& e) {
    err << e.what() << '\n';
    return kExitUsageOrIo;
  } catch (const Error& e) {
    err << e.what() << '\n';
    switch (error_class(e.code())) {
      case ErrorClass::Domain: return kExitDomain;
      case ErrorClass::Numerical: return kExitNumerical;
      case ErrorClass::Usage: return kExitUsageOrIo;
    }
    return kExitUsageOrIo;
  }
}

}  // namespace mfact::cli
