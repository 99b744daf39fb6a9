#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfact/cli.hpp"
#include "mfact/factor.hpp"
#include "mfact/matrix_io.hpp"
#include "mfact/random.hpp"

using namespace mfact;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mfact");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("mfact_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

  std::string write(const std::string& name, const DenseMatrix& m) const {
    std::ofstream f(path_ / name);
    write_matrix_csv(f, m);
    return file(name);
  }

  std::string write_text(const std::string& name, const std::string& text) const {
    std::ofstream f(path_ / name);
    f << text;
    return file(name);
  }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("factor writes CSV factors") {
  TempDir dir;
  const std::string in = dir.write("a.csv", DenseMatrix::identity(3));
  const Outcome r = run_cli({"factor", "--kind", "qr", "--input", in, "--output", dir.file("qr")});
  CHECK(r.code == cli::kExitOk);
  CHECK(load_matrix(dir.file("qr/q.csv")) == DenseMatrix::identity(3));
  CHECK(load_matrix(dir.file("qr/r.csv")) == DenseMatrix::identity(3));

  const std::string spd = dir.write("s.csv", DenseMatrix{{4, 2}, {2, 5}});
  const Outcome c =
      run_cli({"factor", "--kind", "cholesky", "--input", spd, "--output", dir.file("ch")});
  CHECK(c.code == cli::kExitOk);
  CHECK(load_matrix(dir.file("ch/l.csv")) == DenseMatrix{{2, 0}, {1, 2}});

  const std::string p = dir.write("p.csv", DenseMatrix{{2, 1}, {4, 5}});
  CHECK(run_cli({"factor", "--kind", "ldu", "--input", p, "--output", dir.file("ldu")}).code == 0);
  CHECK(load_matrix(dir.file("ldu/l.csv")) == DenseMatrix{{1, 0}, {2, 1}});
  CHECK(load_matrix(dir.file("ldu/d.csv")) == DenseMatrix{{2, 0}, {0, 3}});
  CHECK(load_matrix(dir.file("ldu/u.csv")) == DenseMatrix{{1, 0.5}, {0, 1}});
}

TEST_CASE("factor output round-trips through CSV and JSON exactly") {
  TempDir dir;
  Rng rng(601);
  const DenseMatrix a = random_matrix(rng, 6);
  const std::string in = dir.write("a.csv", a);
  REQUIRE(load_matrix(in) == a);
  const QRPair f = qr_factor(a);

  REQUIRE(run_cli({"factor", "--kind", "qr", "--input", in, "--output", dir.file("csv")}).code == 0);
  CHECK(load_matrix(dir.file("csv/q.csv")) == f.q);
  CHECK(load_matrix(dir.file("csv/r.csv")) == f.r);

  REQUIRE(run_cli({"factor", "--kind", "qr", "--input", in, "--output", dir.file("f.json"),
                   "--format", "json"})
              .code == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(dir.file("f.json")));
  CHECK(j["kind"] == "qr");
  CHECK(matrix_from_json(j["q"]) == f.q);
  CHECK(matrix_from_json(j["r"]) == f.r);

  // JSON input is accepted as well.
  const std::string jin = dir.write_text("a.json", matrix_to_json(a).dump());
  REQUIRE(run_cli({"factor", "--kind", "qr", "--input", jin, "--output", dir.file("j2")}).code == 0);
  CHECK(load_matrix(dir.file("j2/r.csv")) == f.r);
}

TEST_CASE("factor maps domain errors to exit 2") {
  TempDir dir;
  const std::string swap = dir.write("swap.csv", DenseMatrix{{0, 1}, {1, 0}});
  const Outcome r = run_cli({"factor", "--kind", "ldu", "--input", swap, "--output", dir.file("o")});
  CHECK(r.code == cli::kExitDomain);
  CHECK(r.err.find("NotInDomainP k=1") != std::string::npos);

  const std::string indef = dir.write("i.csv", DenseMatrix{{1, 2}, {2, 1}});
  const Outcome c =
      run_cli({"factor", "--kind", "cholesky", "--input", indef, "--output", dir.file("o")});
  CHECK(c.code == cli::kExitDomain);
  CHECK(c.err.find("NotPositiveSemiDefinite k=2") != std::string::npos);

  const std::string asym = dir.write("n.csv", DenseMatrix{{1, 2}, {0, 1}});
  const Outcome n =
      run_cli({"factor", "--kind", "cholesky", "--input", asym, "--output", dir.file("o")});
  CHECK(n.code == cli::kExitDomain);
  CHECK(n.err.find("NotSymmetric") != std::string::npos);
}

TEST_CASE("usage and I/O failures exit 1") {
  TempDir dir;
  const std::string ok = dir.write("a.csv", DenseMatrix::identity(2));
  CHECK(run_cli({}).code == cli::kExitUsageOrIo);
  CHECK(run_cli({"factor", "--kind", "lu", "--input", ok, "--output", dir.file("o")}).code == 1);
  CHECK(run_cli({"factor", "--kind", "qr", "--output", dir.file("o")}).code == 1);
  CHECK(run_cli({"factor", "--kind", "qr", "--input", dir.file("missing.csv"), "--output",
                 dir.file("o")})
            .code == 1);
  const std::string ragged = dir.write_text("r.csv", "1,2\n3\n");
  CHECK(run_cli({"factor", "--kind", "qr", "--input", ragged, "--output", dir.file("o")}).code == 1);
  const std::string rect = dir.write_text("rect.csv", "1,2,3\n4,5,6\n");
  CHECK(run_cli({"factor", "--kind", "qr", "--input", rect, "--output", dir.file("o")}).code == 1);
  const std::string junk = dir.write_text("j.csv", "1,x\n3,4\n");
  CHECK(run_cli({"factor", "--kind", "qr", "--input", junk, "--output", dir.file("o")}).code == 1);
  // Output directory cannot be created beneath a regular file.
  CHECK(run_cli({"factor", "--kind", "qr", "--input", ok, "--output", ok + "/sub"}).code == 1);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("derivative subcommand") {
  TempDir dir;
  const std::string id = dir.write("i.csv", DenseMatrix::identity(2));
  const std::string zero = dir.write("z.csv", DenseMatrix(2));
  const Outcome z = run_cli({"derivative", "--kind", "qr", "--input", id, "--perturbation", zero,
                             "--output", dir.file("z")});
  CHECK(z.code == 0);
  CHECK(load_matrix(dir.file("z/u.csv")) == DenseMatrix(2));
  CHECK(load_matrix(dir.file("z/v.csv")) == DenseMatrix(2));
  CHECK(slurp(dir.file("z/residual.csv")) == "0\n");

  const std::string e21 = dir.write("e.csv", DenseMatrix{{0, 0}, {1, 0}});
  const Outcome q = run_cli({"derivative", "--kind", "qr", "--input", id, "--perturbation", e21,
                             "--output", dir.file("q")});
  CHECK(q.code == 0);
  CHECK(load_matrix(dir.file("q/u.csv")) == DenseMatrix{{0, -1}, {1, 0}});
  CHECK(load_matrix(dir.file("q/v.csv")) == DenseMatrix{{0, 1}, {0, 0}});

  const std::string sym = dir.write("s.csv", DenseMatrix{{2, 1}, {1, 2}});
  CHECK(run_cli({"derivative", "--kind", "cholesky", "--input", id, "--perturbation", sym,
                 "--output", dir.file("c"), "--format", "json"})
            .code == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(dir.file("c")));
  CHECK(matrix_from_json(j["v"]) == DenseMatrix{{1, 0}, {1, 1}});
  CHECK(j["residual"] == 0.0);

  const std::string swap = dir.write("w.csv", DenseMatrix{{0, 1}, {1, 0}});
  CHECK(run_cli({"derivative", "--kind", "ldu", "--input", swap, "--perturbation", e21,
                 "--output", dir.file("l")})
            .code == cli::kExitDomain);

  const std::string three = dir.write("3.csv", DenseMatrix::identity(3));
  CHECK(run_cli({"derivative", "--kind", "qr", "--input", three, "--perturbation", e21,
                 "--output", dir.file("m")})
            .code == cli::kExitUsageOrIo);
}

TEST_CASE("derivative subcommand reports an inaccurate solve as a numerical failure") {
  TempDir dir;
  // A tiny leading pivot keeps the input inside the LDU domain but makes the
  // factors of size 1/eps; the round trip then loses more than 1e-8.
  const std::string a = dir.write("a.csv", DenseMatrix{{3e-5, 1}, {1, 1}});
  const std::string e = dir.write("e.csv", DenseMatrix{{0.3, -0.7}, {0.9, 0.1}});
  const Outcome r = run_cli({"derivative", "--kind", "ldu", "--input", a, "--perturbation", e,
                             "--output", dir.file("o")});
  CHECK(r.code == cli::kExitNumerical);
  CHECK(r.err.find("residual") != std::string::npos);
}

TEST_CASE("track subcommand") {
  TempDir dir;
  const std::string id = dir.write("i.csv", DenseMatrix::identity(3));
  const Outcome flat = run_cli({"track", "--kind", "qr", "--input", id, "--input", id, "--output",
                                dir.file("flat.csv"), "--steps", "8"});
  CHECK(flat.code == 0);
  const auto rows = lines_of(slurp(dir.file("flat.csv")));
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == "t,q_norm,r_norm,newton_iters,residual");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].substr(rows[i].find(',')) == rows[1].substr(rows[1].find(',')));
  }

  Rng rng(602);
  const DenseMatrix end = DenseMatrix::identity(3) + 0.4 * random_unit_direction(rng, 3);
  const std::string e = dir.write("end.csv", end);
  CHECK(run_cli({"track", "--kind", "qr", "--input", id, "--input", e, "--output",
                 dir.file("t.csv")})
            .code == 0);
  const auto trows = lines_of(slurp(dir.file("t.csv")));
  REQUIRE(trows.size() == 66);
  REQUIRE(run_cli({"factor", "--kind", "qr", "--input", e, "--output", dir.file("ef")}).code == 0);
  const double r_norm = hs_norm(load_matrix(dir.file("ef/r.csv")));
  std::istringstream last(trows.back());
  std::string t, qn, rn;
  std::getline(last, t, ',');
  std::getline(last, qn, ',');
  std::getline(last, rn, ',');
  CHECK(t == "1");
  CHECK(std::stod(rn) == doctest::Approx(r_norm).epsilon(1e-10));

  const std::string neg = dir.write("neg.csv", -1.0 * DenseMatrix::identity(3));
  const Outcome bad = run_cli({"track", "--kind", "qr", "--input", id, "--input", neg, "--output",
                               dir.file("bad.csv")});
  CHECK(bad.code == cli::kExitDomain);
  CHECK(bad.err.find("PathLeavesDomain t=0.5") != std::string::npos);

  const std::string two = dir.write("two.csv", 2.0 * DenseMatrix::identity(3));
  CHECK(run_cli({"track", "--kind", "ldu", "--family", "custom-samples", "--input", id, "--input",
                 two, "--input", id, "--output", dir.file("c.csv"), "--steps", "16"})
            .code == 0);
  CHECK(lines_of(slurp(dir.file("c.csv"))).front() == "t,l_norm,d_norm,u_norm,newton_iters,residual");
  CHECK(run_cli({"track", "--kind", "qr", "--input", id, "--output", dir.file("x.csv")}).code == 1);
  CHECK(run_cli({"track", "--kind", "qr", "--input", id, "--input", id, "--output",
                 dir.file("x.csv"), "--steps", "0"})
            .code == 1);
}

TEST_CASE("verify subcommand") {
  TempDir dir;
  const Outcome a = run_cli({"verify", "--seed", "0", "--report", dir.file("a.json")});
  CHECK(a.code == cli::kExitOk);
  const Outcome b = run_cli({"verify", "--seed", "0", "--report", dir.file("b.json")});
  CHECK(b.code == cli::kExitOk);
  const std::string ra = slurp(dir.file("a.json"));
  CHECK(ra == slurp(dir.file("b.json")));
  const nlohmann::json j = nlohmann::json::parse(ra);
  CHECK(j["all_passed"] == true);
  CHECK(j["checks"].size() == 6);
  CHECK(lines_of(a.out).size() == 6);
  CHECK(a.out.rfind("PASS ", 0) == 0);

  CHECK(run_cli({"verify", "--seed", "0", "--report", dir.file("no/such/dir/r.json")}).code ==
        cli::kExitUsageOrIo);
}
