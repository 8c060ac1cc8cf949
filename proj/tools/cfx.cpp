// cfx: counterfactual subset analysis from the command line.
//
//   cfx analyze data.csv --outcome two_year_recid --filter "sex=Female" [--json]
//   cfx summary data.csv
//   cfx serve --port 8080 --root ./cfx-data

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "cfx/audit.hpp"
#include "cfx/error.hpp"
#include "cfx/service.hpp"

namespace {

constexpr int kExitInput = 1;
constexpr int kExitDomain = 2;

cfx::LoadOptions load_options(const std::vector<std::string>& type_specs) {
  cfx::LoadOptions options;
  for (const auto& spec : type_specs) {
    const auto colon = spec.rfind(':');
    const auto hint = colon == std::string::npos ? std::nullopt : cfx::parse_type_hint(spec.substr(colon + 1));
    if (!hint) throw cfx::Error(cfx::ErrorCode::MalformedRequest, "--type expects column:numerical|categorical");
    options.type_hints[spec.substr(0, colon)] = *hint;
  }
  return options;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counterfactual subset exploration engine"};
  app.require_subcommand(1);

  std::string data_path;
  std::string outcome;
  std::vector<std::string> filters;
  std::vector<std::string> types;
  std::string mode_text = "counterfactual";
  std::optional<std::string> feature;
  bool as_json = false;
  cfx::SimilarityConfig config;

  auto* analyze = app.add_subcommand("analyze", "Apply filters and report filter strength and subsets");
  analyze->add_option("data", data_path, "CSV file")->required();
  analyze->add_option("--outcome", outcome, "Outcome column")->required();
  analyze->add_option("--filter", filters, "Constraint col:lo..hi or col=a|b (repeatable, applied in order)");
  analyze->add_option("--mode", mode_text, "counterfactual or control")
      ->check(CLI::IsMember({"counterfactual", "control"}));
  analyze->add_option("--cf-fraction", config.cf_fraction, "Share of non-matching rows placed in CF");
  analyze->add_option("--seed", config.seed, "Seed for sampling included rows");
  analyze->add_option("--sample-cap", config.in_sample_cap, "Included rows compared per candidate (0 = all)");
  analyze->add_option("--feature", feature, "Selected feature for per-subset distributions");
  analyze->add_option("--type", types, "Type override col:numerical|categorical (repeatable)");
  analyze->add_flag("--json", as_json, "Emit the audit report as JSON");

  auto* summary = app.add_subcommand("summary", "Print the inferred column manifest");
  summary->add_option("data", data_path, "CSV file")->required();
  summary->add_option("--type", types, "Type override col:numerical|categorical (repeatable)");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string root;
  if (const char* env = std::getenv("CFX_DATA_ROOT")) root = env;
  if (root.empty()) root = "cfx-data";
  auto* serve = app.add_subcommand("serve", "Run the HTTP JSON API");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--root", root, "Data directory (default $CFX_DATA_ROOT or ./cfx-data)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*analyze) {
      auto dataset = std::make_shared<const cfx::Dataset>(cfx::load_csv_file(data_path, load_options(types)));
      std::vector<cfx::FilterConstraint> constraints;
      for (const auto& text : filters) {
        constraints.push_back(cfx::parse_constraint(text));
        // Reject bad constraints before any analysis runs.
        cfx::validate(*dataset, constraints.back(), outcome);
      }
      dataset->column(outcome);
      const auto report = cfx::run_audit(dataset, outcome, constraints, *cfx::parse_mode(mode_text), config, feature);
      if (as_json) {
        std::cout << cfx::canonical(cfx::json(report)) << "\n";
      } else {
        std::cout << cfx::render_text(report);
      }
      return 0;
    }
    if (*summary) {
      const auto dataset = cfx::load_csv_file(data_path, load_options(types));
      std::cout << cfx::column_manifest(dataset).dump(2) << "\n";
      return 0;
    }
    cfx::Store store(root);
    httplib::Server server;
    cfx::install_routes(server, store);
    std::cerr << "listening on http://" << host << ":" << port << " (data root " << store.root().string() << ")\n";
    if (!server.listen(host, port)) {
      std::cerr << "error: cannot bind " << host << ":" << port << "\n";
      return kExitInput;
    }
    return 0;
  } catch (const cfx::Error& e) {
    std::cerr << "error [" << e.name() << "]: " << e.what() << "\n";
    return cfx::kind_of(e.code()) == cfx::ErrorKind::Domain ? kExitDomain : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
