// symcube: paramodular level and local data of the symmetric cube lift of
// an elliptic curve over Q.
//
//   symcube "[0,0,1,-1,0]"
//   symcube --json --input curves.txt --jobs 8

#include "symcube/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

using namespace symcube;

int main(int argc, char **argv) {
  CLI::App app{"Symmetric cube lift of an elliptic curve over Q: conductor, paramodular "
               "level, Atkin-Lehner signs and local L-factors."};

  std::string curve_arg;
  bool minimize = false, assume_minimal = false, json_out = false, text_out = false;
  std::string root_number, input;
  unsigned jobs = 1;

  app.add_option("curve", curve_arg, "Weierstrass coefficients \"[a1,a2,a3,a4,a6]\"");
  // Unquoted input such as [0, 0, 1, -1, 0] arrives as several arguments.
  app.allow_extras();
  app.add_flag("--minimize", minimize, "Replace the model by a global minimal model first");
  app.add_flag("--assume-minimal", assume_minimal,
               "Skip the minimality check (results are wrong for non-minimal models)");
  app.add_option("--root-number-3", root_number, "Local root number w(E/Q_3), +1 or -1")
      ->check(CLI::IsMember({"+1", "1", "-1"}));
  app.add_flag("--json", json_out, "JSON output");
  app.add_flag("--text", text_out, "Text output (default)");
  app.add_option("--input", input, "Batch input file, one curve per line or CSV")
      ->check(CLI::ExistingFile);
  app.add_option("--jobs", jobs, "Worker threads for batch input")
      ->check(CLI::Range(1u, 1024u));
  app.get_option("--minimize")->excludes("--assume-minimal");
  app.get_option("--json")->excludes("--text");
  app.get_option("--input")->excludes("curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  for (const std::string &extra : app.remaining()) {
    if (curve_arg.empty() || extra.rfind("--", 0) == 0) {
      std::cerr << "unexpected argument: " << extra << "\n";
      return 1;
    }
  }

  Options options;
  if (minimize)
    options.minimality = MinimalityMode::Minimize;
  else if (assume_minimal)
    options.minimality = MinimalityMode::AssumeMinimal;
  if (!root_number.empty())
    options.root_number = constant_root_number(root_number == "-1" ? -1 : 1);

  if (!curve_arg.empty()) {
    std::string text = curve_arg;
    for (const std::string &a : app.remaining())
      text += " " + a;
    const ReportEnvelope env = analyze_text(text, options);
    if (json_out)
      std::cout << to_json(env).dump(2) << "\n";
    else
      std::cout << to_text(env);
    return exit_code(env.status);
  }

  std::vector<ReportEnvelope> envs;
  if (!input.empty()) {
    std::ifstream in(input);
    if (!in) {
      std::cerr << "cannot read " << input << "\n";
      return 1;
    }
    envs = batch(in, options, jobs);
  } else {
    envs = batch(std::cin, options, jobs);
  }

  for (const ReportEnvelope &env : envs) {
    if (json_out)
      std::cout << to_json(env).dump() << "\n";
    else
      std::cout << to_text(env);
  }
  if (json_out)
    std::cout << summary_json(envs).dump() << "\n";
  else
    std::cout << summary_text(envs) << "\n";

  for (const ReportEnvelope &env : envs)
    if (env.status != Status::Ok)
      return 2;
  return 0;
}
