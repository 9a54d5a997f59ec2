// ora_bob: batch front end for the online allocation engine.
//
//   ora_bob run    --generator pacing --T 2000 --seeds 0..9 --out out/
//   ora_bob sweep  --generator pacing --T 500,2000,8000 --seeds 0..29 --jobs 4
//   ora_bob oracle --instance inst.json
//   ora_bob audit  out/run_0.csv out/run_1.csv
//   ora_bob gen    --generator example1-general --T 100 --out ex1.json
//
// Exit codes: 0 success, 1 audit failures, 2 usage or validation error.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ora/experiment.hpp"

namespace {

using ora::json;

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto dots = item.find("..");
    if (dots != std::string::npos) {
      const auto lo = std::stoull(item.substr(0, dots));
      const auto hi = std::stoull(item.substr(dots + 2));
      if (hi < lo) throw ora::ValidationError("empty seed range '" + item + "'");
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    } else if (!item.empty()) {
      out.push_back(std::stoull(item));
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ora::ValidationError("no seeds given");
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  for (auto s : parse_seeds(text)) out.push_back(static_cast<std::size_t>(s));
  return out;
}

void parse_params(const std::vector<std::string>& raw, ora::ExperimentConfig& cfg) {
  for (const auto& kv : raw) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ora::ValidationError("--param expects key=value, got '" + kv + "'");
    cfg.params[kv.substr(0, eq)] = ora::parse_double(kv.substr(eq + 1));
  }
}

int fail(const std::string& kind, const std::string& message, json extra = json::object()) {
  extra["error"] = kind;
  extra["message"] = message;
  std::cerr << extra.dump() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online resource allocation with budget and long-term constraints"};
  app.require_subcommand(1);

  ora::ExperimentConfig cfg;
  std::string instance, seeds = "0", T_spec = "1000", out = "out";
  std::vector<std::string> params;
  std::optional<double> eta;
  std::size_t pairs = 100;
  std::vector<std::string> traces;

  auto add_source = [&](CLI::App* sub) {
    sub->add_option("--instance", instance, "instance or model JSON file");
    sub->add_option("--generator", cfg.generator, "named generator")
        ->check(CLI::IsMember(ora::generator_names()));
    sub->add_option("--param", params, "generator parameter key=value (repeatable)");
    sub->add_option("--seeds", seeds, "seed list, e.g. 1,2,3 or 0..29");
    sub->add_option("--oracle", cfg.oracle, "none | auto | lp | brute");
    sub->add_option("--guard", cfg.guard, "node guard for exhaustive oracles");
  };
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--delta", cfg.delta, "confidence parameter in the learning rate");
    sub->add_option("--eta", eta, "learning-rate override");
    sub->add_option("--jobs", cfg.jobs, "parallel cells");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--name", cfg.name, "output file prefix");
  };

  auto* run = app.add_subcommand("run", "run the allocator once per seed");
  add_source(run);
  add_run_flags(run);
  run->add_option("--T", T_spec, "horizon");

  auto* sweep = app.add_subcommand("sweep", "cross product of horizons and seeds");
  add_source(sweep);
  add_run_flags(sweep);
  sweep->add_option("--T", T_spec, "horizon list, e.g. 500,2000,8000");

  auto* oracle = app.add_subcommand("oracle", "print the offline oracle report as JSON");
  add_source(oracle);
  oracle->add_option("--T", T_spec, "horizon for generated or sampled instances");
  oracle->add_option("--num-samples", cfg.num_samples, "Monte Carlo draws for stochastic models");

  auto* audit = app.add_subcommand("audit", "audit trace files");
  audit->add_option("traces", traces, "trace CSV files")->required();
  audit->add_option("--pairs", pairs, "interval-regret pairs per trace");

  auto* gen = app.add_subcommand("gen", "write a generated fixture to a JSON file");
  add_source(gen);
  gen->add_option("--T", T_spec, "horizon");
  gen->add_option("--out", out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what());
  }

  try {
    if (*audit) {
      const auto res = ora::cmd_audit(traces, {pairs, 0});
      std::cout << res.report.dump(1) << "\n";
      return res.failures ? 1 : 0;
    }

    if (!instance.empty()) cfg.instance_path = instance;
    parse_params(params, cfg);
    cfg.seeds = parse_seeds(seeds);
    cfg.eta = eta;
    cfg.out_dir = out;

    if (*sweep) {
      cfg.T_list = parse_sizes(T_spec);
      const auto agg = ora::cmd_sweep(cfg);
      std::cout << agg.fit_json;
      return 0;
    }
    const auto Ts = parse_sizes(T_spec);
    if (Ts.size() != 1) return fail("usage", "--T takes a single horizon for this subcommand");
    cfg.T = Ts.front();

    if (*run) {
      for (const auto& p : ora::cmd_run(cfg)) std::cout << p.string() << "\n";
      return 0;
    }
    if (*oracle) {
      std::cout << ora::cmd_oracle(cfg).dump(1) << "\n";
      return 0;
    }
    if (*gen) {
      std::cout << ora::cmd_gen(cfg, out).string() << "\n";
      return 0;
    }
  } catch (const ora::IoError& e) {
    return fail("io", e.what(), {{"path", e.path()}});
  } catch (const ora::SchemaError& e) {
    return fail("schema", e.what(), {{"pointer", e.pointer()}});
  } catch (const ora::ParseError& e) {
    return fail("parse", e.what(), {{"byte", e.byte()}});
  } catch (const ora::ValidationError& e) {
    return fail("validation", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 2;
}
