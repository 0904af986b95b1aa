#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sgn/config.hpp"

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  explicit Sandbox(const std::string& name) : dir(fs::temp_directory_path() / ("sgn_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }

  fs::path write(const std::string& file, const std::string& text) const {
    std::ofstream(dir / file) << text;
    return dir / file;
  }

  /// Runs the CLI with stdout and stderr captured; returns the exit status.
  int run(const std::string& args) const {
    const std::string cmd = std::string("\"") + SGN_CLI_PATH + "\" " + args + " >\"" +
                            (dir / "stdout.txt").string() + "\" 2>\"" +
                            (dir / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const fs::path& p) const {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::string err() const { return read(dir / "stderr.txt"); }

  fs::path dir;
};

std::string small_run(const fs::path& out) {
  return "scheme = box\n"
         "scenario.name = solitary\n"
         "grid.n = 65\n"
         "time.dt = 0.04\n"
         "time.t_end = 0.2\n"
         "output.dir = " + out.string() + "\n"
         "output.snapshot_stride = 2\n";
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("negative dt is a configuration error and writes nothing") {
    Sandbox box("negdt");
    const fs::path out = box.dir / "out";
    const auto cfg = box.write("neg.cfg", "scheme = box\ntime.dt = -0.01\noutput.dir = " +
                                              out.string() + "\n");
    CHECK(box.run("run " + cfg.string()) == 2);
    CHECK(box.err().find("\"error\"") != std::string::npos);
    CHECK(box.err().find("time.dt") != std::string::npos);
    CHECK_FALSE(fs::exists(out));
  }

  TEST_CASE("unknown keys report their line") {
    Sandbox box("unknown");
    const auto cfg = box.write("bad.cfg", "# comment\nscheme = box\ngrid.nn = 65\n");
    CHECK(box.run("run " + cfg.string()) == 2);
    CHECK(box.err().find("grid.nn") != std::string::npos);
    CHECK(box.err().find("\"line\":3") != std::string::npos);
  }

  TEST_CASE("parser rejects duplicates and accepts comments") {
    CHECK_THROWS_AS(sgn::parse_config("grid.n = 65\ngrid.n = 129\n"), sgn::ConfigError);
    const auto cfg = sgn::parse_config("grid.n = 129  # odd\ntime.dt = 0.01\n");
    CHECK(cfg.n == 129);
    CHECK(cfg.dt.value() == 0.01);
  }

  TEST_CASE("missing subcommand is a usage error") {
    Sandbox box("usage");
    CHECK(box.run("") == 2);
    CHECK(box.run("run") == 2);
  }

  TEST_CASE("verify passes") {
    Sandbox box("verify");
    CHECK(box.run("verify --seed 3") == 0);
  }

  TEST_CASE("reruns are byte identical and carry metadata") {
    Sandbox box("rerun");
    std::string diag[2];
    for (int i = 0; i < 2; ++i) {
      const fs::path out = box.dir / ("out" + std::to_string(i));
      const auto cfg = box.write("run.cfg", small_run(out));
      REQUIRE(box.run("run " + cfg.string()) == 0);
      diag[i] = box.read(out / "diagnostics.csv");
      CHECK(fs::exists(out / "metadata.json"));
      CHECK(fs::exists(out / "snap_00000.csv"));
      const std::string meta = box.read(out / "metadata.json");
      CHECK(meta.find("\"status\"") != std::string::npos);
      CHECK(meta.find("\"config\"") != std::string::npos);
    }
    CHECK_FALSE(diag[0].empty());
    CHECK(diag[0] == diag[1]);
  }

  TEST_CASE("run failures exit with status 1") {
    Sandbox box("evenn");
    const fs::path out = box.dir / "out";
    auto text = small_run(out);
    text.replace(text.find("grid.n = 65"), 11, "grid.n = 64");
    const auto cfg = box.write("even.cfg", text);
    CHECK(box.run("run " + cfg.string()) == 1);
    CHECK(box.err().find("SingularJacobian") != std::string::npos);
  }
}
