// Command-line front end: characterize, norms, verify, report.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "morrey/config.hpp"

namespace fs = std::filesystem;
using namespace morrey;

namespace {

constexpr int exit_failed_verification = 1;

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream s;
  for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return s.str();
}

/// Writes to `dir/name`, or to stdout when no directory is given.
void emit(const std::string& dir, const std::string& name, const std::string& content) {
  if (dir.empty()) {
    std::cout << content;
    return;
  }
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / name, std::ios::binary);
  if (!out) fail(ErrorCode::invalid_input, "cannot write to '" + dir + "'");
  out << content;
}

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> levels;
  bool audit = false;
  std::string function_file;
  std::string report_file;
};

RunConfig load(const Options& o) { return parse_config(load_json(o.config), o.seed, o.levels, o.audit); }

std::string bool_text(std::optional<bool> b) { return b ? (*b ? "true" : "false") : "unknown"; }

int cmd_characterize(const Options& o) {
  const RunConfig cfg = load(o);
  std::ostringstream csv;
  csv << "weight,class,p,family,value,base,extended,refined,stable,claimed\n";
  for (const auto& req : cfg.characterize) {
    const Weight& w = cfg.weight(req.weight);
    const BallFamily family(cfg.grid, cfg.family(req.family));
    const std::string fam = req.family.empty() ? "default" : req.family;
    const ClassClaims claims = w.claims(cfg.grid.dim());
    auto row = [&](const std::string& cls, const std::string& p, const ScaleStudy& s, const std::string& claimed) {
      csv << csv_escape(req.weight) << ',' << cls << ',' << p << ',' << csv_escape(fam) << ',' << format_double(s.base)
          << ',' << format_double(s.base) << ',' << format_double(s.extended) << ',' << format_double(s.refined) << ','
          << (s.stable(default_growth_threshold) ? "true" : "false") << ',' << claimed << '\n';
    };
    for (const auto& cls : req.classes) {
      if (cls == "A1") {
        row("A1", "1", ap_study(w, 1.0, family), bool_text(claims.a1));
      } else if (cls == "Ap") {
        for (double p : req.p) row("Ap", format_double(p), ap_study(w, p, family), bool_text(claims.ap(p)));
      } else if (cls == "Ainf") {
        row("Ainf", "", scale_study(family, [&](const BallFamily& f) { return ainf_characteristic(w, f); }),
            bool_text(claims.a_infinity));
      } else if (cls == "doubling") {
        row("doubling", "", scale_study(family, [&](const BallFamily& f) {
              return doubling_and_comparability(w.sample(f.grid()), f).doubling;
            }),
            "");
        const auto est = doubling_and_comparability(w.sample(family.grid()), family);
        csv << csv_escape(req.weight) << ",comparability_delta,," << csv_escape(fam) << ',' << format_double(est.delta)
            << ",,,,,\n";
      } else if (cls == "RH") {
        const auto s = reverse_holder_exponent(w, family, {1.5, 2.0, 3.0, 4.0});
        csv << csv_escape(req.weight) << ",RH,," << csv_escape(fam) << ',' << (s ? format_double(*s) : "none")
            << ",,,,,\n";
      }
    }
  }
  emit(o.out, "characteristics.csv", csv.str());
  return 0;
}

int cmd_norms(const Options& o) {
  const RunConfig cfg = load(o);
  const auto functions = load_functions(o.function_file);
  if (functions.front().grid() != cfg.grid) fail(ErrorCode::invalid_input, "function file grid differs from config grid");
  std::ostringstream csv;
  csv << "function,space,p,kappa,weight,value\n";
  for (const auto& f : functions)
    for (const auto& req : cfg.norms) {
      std::optional<SampledFunction> w;
      if (!req.weight.empty()) w = cfg.weight(req.weight).sample(cfg.grid);
      const BallFamily family(cfg.grid, cfg.family(req.family));
      const double v = evaluate_norm(f, req.spec, w ? &*w : nullptr, &family);
      csv << csv_escape(f.name()) << ',' << space_name(req.spec.kind) << ',' << format_double(req.spec.p) << ','
          << format_double(req.spec.kappa) << ',' << csv_escape(req.weight.empty() ? "lebesgue" : req.weight) << ','
          << format_double(v) << '\n';
    }
  emit(o.out, "norms.csv", csv.str());
  return 0;
}

int cmd_verify(const Options& o) {
  const RunConfig cfg = load(o);
  std::vector<VerificationReport> reports;
  json entries = json::array();
  bool all_pass = true;
  for (const auto& spec : cfg.presets) {
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport r = verify_inequality(spec, cfg.grid, cfg.levels);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all_pass = all_pass && r.pass();
    std::cerr << (r.pass() ? "PASS " : "FAIL ") << r.label << " [" << r.preset << "] C_obs=" << format_double(r.c_obs())
              << " verdict=" << r.verdict();
    for (double d : r.drift) std::cerr << " drift=" << format_double(d);
    if (std::isfinite(r.ladder_growth)) std::cerr << " ladder_growth=" << format_double(r.ladder_growth);
    std::cerr << " (" << std::fixed << std::setprecision(2) << secs << "s)" << std::defaultfloat << '\n';
    entries.push_back(report_json(r));
    reports.push_back(std::move(r));
  }
  const std::string canonical = cfg.source.dump();
  json doc = {{"config", cfg.source},
              {"config_sha256", sha256_hex(canonical)},
              {"grid", grid_json(cfg.grid)},
              {"levels", cfg.levels},
              {"presets", entries},
              {"pass", all_pass}};
  std::ostringstream csv;
  write_ratio_csv(csv, reports);
  const std::string dir = o.out.empty() ? "." : o.out;
  emit(dir, "report.json", doc.dump(2) + "\n");
  emit(dir, "ratios.csv", csv.str());
  return all_pass ? 0 : exit_failed_verification;
}

int cmd_report(const Options& o) {
  const json doc = load_json(o.report_file);
  std::ostringstream csv;
  csv << "label,preset,negative_control,c_obs,drift,ladder_growth,verdict,pass\n";
  bool all_pass = true;
  try {
    for (const auto& p : doc.at("presets")) {
      std::string drift;
      for (const auto& d : p.at("drift")) drift += (drift.empty() ? "" : ";") + (d.is_null() ? std::string("nan") : format_double(d.get<double>()));
      const auto& levels = p.at("levels");
      const double c = levels.empty() || levels[0].at("c_obs").is_null() ? NAN : levels[0].at("c_obs").get<double>();
      const double g = p.contains("ladder_growth") && !p.at("ladder_growth").is_null() ? p.at("ladder_growth").get<double>() : NAN;
      const bool pass = p.at("pass").get<bool>();
      all_pass = all_pass && pass;
      csv << csv_escape(p.at("label").get<std::string>()) << ',' << p.at("preset").get<std::string>() << ','
          << (p.at("negative_control").get<bool>() ? "true" : "false") << ',' << format_double(c) << ',' << drift << ','
          << format_double(g) << ',' << csv_escape(p.at("verdict").get<std::string>()) << ','
          << (pass ? "true" : "false") << '\n';
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::invalid_input, std::string("malformed report: ") + e.what());
  }
  emit(o.out, "summary.csv", csv.str());
  return all_pass ? 0 : exit_failed_verification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Morrey and multilinear operator verification harness"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "corpus seed override");
    cmd->add_flag("--audit", o.audit, "assert the kernel size condition on every visited tuple");
    cmd->add_option("--levels", o.levels, "refinement depth")->check(CLI::PositiveNumber);
  };

  auto* characterize = app.add_subcommand("characterize", "weight characteristics as CSV");
  add_common(characterize);
  auto* norms = app.add_subcommand("norms", "norms of sampled functions as CSV");
  add_common(norms);
  norms->add_option("function-file", o.function_file, "binary sampled-function file")->required();
  auto* verify = app.add_subcommand("verify", "run the configured presets and write reports");
  add_common(verify);
  auto* report = app.add_subcommand("report", "summarize an existing report.json");
  report->add_option("report-file", o.report_file, "report.json from a verify run")->required()->check(CLI::ExistingFile);
  report->add_option("--out", o.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCode::invalid_input);
  }

  try {
    if (*characterize) return cmd_characterize(o);
    if (*norms) return cmd_norms(o);
    if (*verify) return cmd_verify(o);
    if (*report) return cmd_report(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorCode::invalid_input);
  }
  return 0;
}
