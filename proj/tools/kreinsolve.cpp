#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "krein/io.hpp"

namespace {

using krein::io::Json;
using krein::io::ResultFile;

struct CliOverrides {
  bool has_tol = false, has_psd = false, has_seed = false, has_samples = false;
  double tol = 1e-10;
  double psd_tol = 1e-10;
  std::uint64_t seed = 0;
  int samples = 1000;
  std::optional<krein::io::ProblemType> type;
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in)
    krein::fail(krein::ErrorCode::ParseError, "$: cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ResultFile process(const std::string& text, const CliOverrides& cli) {
  try {
    Json file = Json::parse(text, nullptr, true);
    if (cli.type && file.is_object() && file.contains("problem") &&
        file["problem"].is_object())
      file["problem"]["type"] = krein::io::to_string(*cli.type);
    krein::io::ProblemInstance inst = krein::io::parse_problem(file);
    if (cli.has_tol) inst.options.tol.residual_tol = cli.tol;
    if (cli.has_psd) inst.options.tol.psd_tol = cli.psd_tol;
    if (cli.has_seed) inst.options.seed = cli.seed;
    if (cli.has_samples) inst.options.n_samples = cli.samples;
    ResultFile res = krein::io::run(inst);
    if (res.status == krein::io::Status::Solved)
      res = krein::io::certify(inst, std::move(res));
    return res;
  } catch (const Json::parse_error& e) {
    return krein::io::invalid_result(
        krein::KreinError(krein::ErrorCode::ParseError, std::string("$: ") + e.what()));
  } catch (const krein::KreinError& e) {
    return krein::io::invalid_result(e);
  }
}

void emit(const ResultFile& res, const std::string& json_out) {
  const std::string text = res.to_json().dump(2) + "\n";
  std::cout << text;
  if (!json_out.empty()) {
    std::ofstream out(json_out, std::ios::binary);
    out << text;
  }
}

int run_batch(const std::string& dir, const CliOverrides& cli, bool strict) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const fs::path& p = entry.path();
    if (p.extension() != ".json") continue;
    if (p.stem().extension() == ".result") continue;
    files.push_back(p);
  }
  std::sort(files.begin(), files.end());

  int worst = 0;
  Json summary = Json::array();
  for (const fs::path& p : files) {
    ResultFile res;
    try {
      res = process(read_input(p.string()), cli);
    } catch (const krein::KreinError& e) {
      res = krein::io::invalid_result(e);
    }
    const int code = res.exit_code(strict);
    worst = std::max(worst, code);
    fs::path out = p;
    out.replace_extension(".result.json");
    std::ofstream sink(out, std::ios::binary);
    sink << res.to_json().dump(2) << "\n";
    std::cerr << p.filename().string() << ": " << krein::io::to_string(res.status)
              << " (exit " << code << ")\n";
    Json row;
    row["file"] = p.filename().string();
    row["status"] = krein::io::to_string(res.status);
    row["exit_code"] = code;
    summary.push_back(row);
  }
  std::cout << summary.dump(2) << "\n";
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kreinsolve: indefinite least squares, splines and smoothing in "
               "Krein spaces"};
  app.set_version_flag("--version", KREINLSQ_VERSION);

  CliOverrides cli;
  std::vector<std::string> positionals;
  std::string json_out;
  std::string batch_dir;
  bool strict = false;

  app.add_option("args", positionals,
                 "[type] file - optional problem-type override (ilsq, spline, "
                 "smoothing, schur, optimal_inverse, adjoint, jtrace) and the "
                 "problem file ('-' reads stdin)")
      ->expected(0, 2);
  auto* tol_opt = app.add_option("--tol", cli.tol, "residual tolerance override");
  auto* psd_opt = app.add_option("--psd-tol", cli.psd_tol,
                                 "positivity tolerance override");
  auto* seed_opt = app.add_option("--seed", cli.seed, "certificate sampling seed");
  auto* samples_opt = app.add_option("--samples", cli.samples,
                                     "certificate sample count");
  app.add_flag("--strict", strict,
               "exit 4 when any certificate margin is out of tolerance");
  app.add_option("--json-out", json_out, "also write the result file here");
  app.add_option("--batch", batch_dir,
                 "process every *.json in a directory, writing *.result.json");

  CLI11_PARSE(app, argc, argv);
  cli.has_tol = tol_opt->count() > 0;
  cli.has_psd = psd_opt->count() > 0;
  cli.has_seed = seed_opt->count() > 0;
  cli.has_samples = samples_opt->count() > 0;

  std::string input;
  for (const std::string& arg : positionals) {
    if (auto t = krein::io::problem_type_from(arg); t && cli.type == std::nullopt)
      cli.type = t;
    else
      input = arg;
  }

  if (!batch_dir.empty()) {
    if (!std::filesystem::is_directory(batch_dir)) {
      std::cerr << "kreinsolve: '" << batch_dir << "' is not a directory\n";
      return 3;
    }
    return run_batch(batch_dir, cli, strict);
  }

  if (input.empty()) {
    std::cerr << "kreinsolve: no input file (see --help)\n";
    return 3;
  }

  ResultFile res;
  try {
    res = process(read_input(input), cli);
  } catch (const krein::KreinError& e) {
    res = krein::io::invalid_result(e);
  }
  emit(res, json_out);
  if (res.status != krein::io::Status::Solved && !res.message.empty())
    std::cerr << "kreinsolve: " << res.message << "\n";
  return res.exit_code(strict);
}
