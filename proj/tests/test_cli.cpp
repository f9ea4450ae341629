#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

#ifndef DELAN_CLI_PATH
#error "DELAN_CLI_PATH must point at the command-line binary"
#endif

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "delan_cli_test") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(DELAN_CLI_PATH) + " " + args + " > " +
                          log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

}  // namespace

TEST_CASE("derivative validation subcommand succeeds") {
  TempDir dir;
  const auto log = dir.path / "log.txt";
  write(dir.path / "cfg.json",
        R"({"gradcheck": {"configurations": 5}, "out": ")" +
            (dir.path / "out").string() + R"("})");
  CHECK(run("gradcheck --config " + (dir.path / "cfg.json").string(), log) ==
        0);
  CHECK(slurp(log).find("PASS") != std::string::npos);
  CHECK(fs::exists(dir.path / "out" / "config_echo.json"));
}

TEST_CASE("invalid configuration exits with status 1") {
  TempDir dir;
  const auto log = dir.path / "log.txt";
  write(dir.path / "bad.json", "this is not json {");
  CHECK(run("offline --config " + (dir.path / "bad.json").string(), log) == 1);
  CHECK(slurp(log).find("config error") != std::string::npos);

  CHECK(run("offline --config " + (dir.path / "missing.json").string(),
            log) == 1);
  CHECK(run("offline --model bogus --out " + (dir.path / "o").string(),
            log) == 1);
  CHECK(run("offline --noise-sigmas abc", log) == 1);  // unparseable list
  CHECK(run("", log) == 1);                            // missing subcommand
}

TEST_CASE("degenerate split trains but warns and leaves test column empty") {
  TempDir dir;
  const auto out = dir.path / "out";
  write(dir.path / "cfg.json", R"({
    "experiment": "offline-characters",
    "models": ["si"],
    "seeds": [0],
    "characters": {"count": 3, "train_sizes": [3]},
    "train": {"steps": 0},
    "out": ")" + out.string() + R"("
  })");
  const auto log = dir.path / "log.txt";
  CHECK(run("offline --config " + (dir.path / "cfg.json").string(), log) == 0);
  CHECK(slurp(log).find("warning") != std::string::npos);
  const std::string csv = slurp(out / "offline_mse.csv");
  // the final (test) column of the data row is empty
  const auto row_start = csv.find('\n') + 1;
  const auto row = csv.substr(row_start, csv.find('\n', row_start) - row_start);
  CHECK(row.back() == ',');
}

TEST_CASE("flags override configuration fields") {
  TempDir dir;
  const auto out = dir.path / "out";
  write(dir.path / "cfg.json", R"({
    "experiment": "offline-characters",
    "models": ["delan"],
    "seeds": [0, 1, 2],
    "characters": {"count": 2, "train_sizes": [1]},
    "train": {"steps": 0},
    "out": "/tmp/should_be_overridden"
  })");
  const auto log = dir.path / "log.txt";
  CHECK(run("offline --config " + (dir.path / "cfg.json").string() +
                " --model si --seed 7 --out " + out.string(),
            log) == 0);
  const std::string csv = slurp(out / "offline_mse.csv");
  CHECK(csv.find("si,1,0,7,") != std::string::npos);   // seed 7 only
  CHECK(csv.find("delan") == std::string::npos);       // model overridden
  CHECK(!fs::exists("/tmp/should_be_overridden"));
  const std::string echo = slurp(out / "config_echo.json");
  CHECK(echo.find("\"command\": \"offline\"") != std::string::npos);
}
