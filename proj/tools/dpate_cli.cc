// Copyright 2026 The dpate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// dpate: differentially private ATE estimation from the command line.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 ledger violation.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpate/data_io.h"
#include "dpate/estimation.h"
#include "dpate/harness.h"
#include "dpate/matching.h"
#include "dpate/pipeline.h"
#include "dpate/propensity.h"
#include "dpate/status.h"
#include "fmt/format.h"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

constexpr const char* kSeedEnv = "DPATE_SEED";

using json = nlohmann::ordered_json;

std::uint64_t DefaultSeed() {
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == nullptr || *end != '\0') {
    std::cerr << "warning: ignoring non-numeric " << kSeedEnv << "\n";
    return 0;
  }
  return v;
}

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status.ToString() << "\n";
  if (status.code() == absl::StatusCode::kInternal) return kExitInternal;
  return kExitData;
}

int Usage(const std::string& message) {
  std::cerr << "usage error: " << message << "\n";
  return kExitUsage;
}

// Writes to `path`, or stdout when the path is empty or "-".
absl::Status Emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    return absl::OkStatus();
  }
  return dpate::WriteFile(path, contents);
}

struct InputFlags {
  std::string input;
  std::string schema = "t,y";
  double b_range = 0.0;
};

void AddInputFlags(CLI::App* cmd, InputFlags& f) {
  cmd->add_option("--input", f.input, "CSV file with a header row")->required();
  cmd->add_option("--schema", f.schema,
                  "treatment,outcome[,covariates...]; empty covariate list "
                  "means every other column")
      ->capture_default_str();
  cmd->add_option("--b-range", f.b_range,
                  "public outcome range B (never inferred from data)")
      ->required();
}

absl::StatusOr<dpate::Dataset> LoadInput(const InputFlags& f) {
  absl::StatusOr<dpate::CsvSchema> schema = dpate::ParseSchema(f.schema);
  if (!schema.ok()) return schema.status();
  return dpate::LoadCsv(f.input, *schema, f.b_range);
}

// ---------------------------------------------------------------------------

struct EstimateFlags {
  InputFlags in;
  std::string level = "label";
  double eps = 1.0;
  int neighbors = 5;
  std::optional<double> coeff;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  std::optional<int> fixed_k;
  std::string output;
  std::string audit;
  std::string provenance;
  bool oracle_mode = false;
  bool unsafe = false;
};

int RunEstimate(const EstimateFlags& f) {
  absl::StatusOr<dpate::PrivacyLevel> level = dpate::ParsePrivacyLevel(f.level);
  if (!level.ok()) return Usage(std::string(level.status().message()));
  if (f.oracle_mode && !f.unsafe && !f.output.empty() && f.output != "-") {
    return Usage(
        "--oracle-mode results are non-private; pass --unsafe to "
        "write them to a file");
  }
  absl::StatusOr<dpate::Dataset> data = LoadInput(f.in);
  if (!data.ok()) return Fail(data.status());

  dpate::RunConfig config = dpate::DefaultConfig(*level, f.eps);
  config.match.neighbors = f.neighbors;
  if (f.coeff) config.match.error_coeff = *f.coeff;
  if (f.fixed_k) {
    config.match.limit_mode = dpate::LimitMode::kFixed;
    config.match.fixed_k = *f.fixed_k;
  }
  config.train.lambda = f.lambda;
  config.seed = f.seed;
  if (f.oracle_mode) {
    config.oracle_mode = true;
    config.match.limit_mode = dpate::LimitMode::kUnlimited;
  }

  absl::StatusOr<dpate::RunOutput> out = dpate::Run(*data, config);
  if (!out.ok()) return Fail(out.status());

  if (absl::Status s = Emit(f.output, dpate::AteResultJson(out->result) + "\n");
      !s.ok()) {
    return Fail(s);
  }
  if (!f.audit.empty()) {
    if (absl::Status s = dpate::WriteFile(f.audit, out->ledger.AuditLog());
        !s.ok()) {
      return Fail(s);
    }
  }
  if (!f.provenance.empty()) {
    if (absl::Status s =
            dpate::WriteFile(f.provenance, dpate::ProvenanceJson(config, *out));
        !s.ok()) {
      return Fail(s);
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct OracleFlags {
  InputFlags in;
  int neighbors = 5;
  double lambda = 1.0;
  std::string output;
  bool unsafe = false;
};

int RunOracle(const OracleFlags& f) {
  if (!f.unsafe && !f.output.empty() && f.output != "-") {
    return Usage(
        "the oracle is non-private; pass --unsafe to write it to a "
        "file");
  }
  absl::StatusOr<dpate::Dataset> data = LoadInput(f.in);
  if (!data.ok()) return Fail(data.status());
  dpate::TrainOptions train;
  train.lambda = f.lambda;
  absl::StatusOr<double> tau = dpate::RunOraclePsm(*data, f.neighbors, train);
  if (!tau.ok()) return Fail(tau.status());
  const json j{{"tau", *tau},
               {"neighbors", f.neighbors},
               {"lambda", f.lambda},
               {"n", data->size()},
               {"private", false}};
  if (absl::Status s = Emit(f.output, j.dump() + "\n"); !s.ok()) return Fail(s);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SynthFlags {
  dpate::SynthParams params;
  std::string out;
  std::string sidecar;
};

int RunSynth(SynthFlags f) {
  absl::StatusOr<dpate::SynthData> data = dpate::GenerateSynth(f.params);
  if (!data.ok()) return Fail(data.status());
  if (absl::Status s = Emit(f.out, dpate::DatasetToCsv(data->dataset));
      !s.ok()) {
    return Fail(s);
  }
  std::string sidecar = f.sidecar;
  if (sidecar.empty() && !f.out.empty() && f.out != "-") {
    sidecar = f.out + ".json";
  }
  if (!sidecar.empty()) {
    if (absl::Status s =
            dpate::WriteFile(sidecar, dpate::SynthSidecarJson(f.params, *data));
        !s.ok()) {
      return Fail(s);
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchFlags {
  std::string spec;
  std::string input;
  std::string schema = "t,y";
  double b_range = 0.0;
  dpate::SynthParams synth;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
  std::string results;
  std::string summary;
};

int RunBench(BenchFlags f) {
  dpate::SweepSpec spec;
  if (!f.spec.empty()) {
    absl::StatusOr<std::string> text = dpate::ReadFile(f.spec);
    if (!text.ok()) return Fail(text.status());
    absl::StatusOr<dpate::SweepSpec> parsed = dpate::ParseSweepSpec(*text);
    if (!parsed.ok()) return Usage(std::string(parsed.status().message()));
    spec = *std::move(parsed);
  }
  if (f.seed) spec.seed_base = *f.seed;
  if (f.trials) spec.trials = *f.trials;
  if (f.threads) spec.threads = *f.threads;

  std::optional<dpate::Dataset> data;
  if (!f.input.empty()) {
    if (!(f.b_range > 0.0)) return Usage("--input requires --b-range");
    absl::StatusOr<dpate::Dataset> loaded =
        LoadInput(InputFlags{f.input, f.schema, f.b_range});
    if (!loaded.ok()) return Fail(loaded.status());
    data = *std::move(loaded);
  } else {
    absl::StatusOr<dpate::SynthData> synth = dpate::GenerateSynth(f.synth);
    if (!synth.ok()) return Fail(synth.status());
    data = std::move(synth->dataset);
  }

  absl::StatusOr<dpate::SweepResult> result = dpate::RunSweep(*data, spec);
  if (!result.ok()) return Fail(result.status());
  if (absl::Status s = Emit(f.results, dpate::ResultsToCsv(result->records));
      !s.ok()) {
    return Fail(s);
  }
  if (!f.summary.empty()) {
    if (absl::Status s = Emit(f.summary, dpate::SummaryToCsv(result->summary));
        !s.ok()) {
      return Fail(s);
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BoundFlags {
  InputFlags in;
  double eps = 1.0;
  int neighbors = 5;
  std::optional<int> k;
  double coeff = dpate::kDefaultLabelCoeff;
  double lambda = 1.0;
  std::string output;
};

int RunBound(const BoundFlags& f) {
  absl::StatusOr<dpate::Dataset> data = LoadInput(f.in);
  if (!data.ok()) return Fail(data.status());
  dpate::TrainOptions train;
  train.lambda = f.lambda;
  absl::StatusOr<dpate::LogisticModel> model = dpate::Train(*data, train);
  if (!model.ok()) return Fail(model.status());
  absl::StatusOr<dpate::PropensityScores> scores = dpate::Score(*model, *data);
  if (!scores.ok()) return Fail(scores.status());
  dpate::NoiseSource off = dpate::NoiseSource::Disabled();
  absl::StatusOr<dpate::TreatmentView> view = dpate::PerturbTreatment(
      *data, dpate::PrivacyLevel::kLabelLevel, f.eps, off, nullptr);
  if (!view.ok()) return Fail(view.status());
  absl::StatusOr<dpate::SortedMatrices> matrices =
      dpate::BuildSortedMatrices(*scores, *view);
  if (!matrices.ok()) return Fail(matrices.status());

  int k = 0;
  if (f.k) {
    k = *f.k;
  } else {
    dpate::MatchConfig match;
    match.neighbors = f.neighbors;
    match.error_coeff = f.coeff;
    absl::StatusOr<dpate::MatchPlan> plan =
        dpate::PlanMatching(dpate::PrivacyLevel::kLabelLevel, f.eps, match,
                            *matrices, view->counts);
    if (!plan.ok()) return Fail(plan.status());
    k = plan->k_f;
  }
  if (k < 1) return Usage("--k must be >= 1");
  const dpate::ErrorBound bound = dpate::ErrorBoundLabel(
      *data, *matrices, f.neighbors, k, data->outcome_range(), f.eps);
  const json j{{"k", k},
               {"neighbors", f.neighbors},
               {"eps", f.eps},
               {"B", data->outcome_range()},
               {"replacements", bound.replacements},
               {"variance_term", bound.variance_term},
               {"bias_term", bound.bias_term},
               {"bound", bound.bound}};
  if (absl::Status s = Emit(f.output, j.dump(2) + "\n"); !s.ok()) {
    return Fail(s);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private average treatment effect estimation"};
  app.require_subcommand(1);
  const std::uint64_t default_seed = DefaultSeed();

  EstimateFlags est;
  est.seed = default_seed;
  CLI::App* estimate = app.add_subcommand("estimate", "one private ATE run");
  AddInputFlags(estimate, est.in);
  estimate->add_option("--level", est.level, "label or sample")
      ->capture_default_str();
  estimate->add_option("--eps", est.eps, "total privacy budget")
      ->capture_default_str();
  estimate->add_option("--neighbors", est.neighbors, "neighbours per sample")
      ->capture_default_str();
  estimate->add_option("--coeff", est.coeff,
                       "error coefficient (c for label, h for sample)");
  estimate->add_option("--lambda", est.lambda, "L2 regularisation")
      ->capture_default_str();
  estimate->add_option("--seed", est.seed, "noise seed (default $DPATE_SEED)");
  estimate->add_option("--fixed-k", est.fixed_k,
                       "fixed matching limit instead of the adaptive one");
  estimate->add_option("--output", est.output, "result JSON (default stdout)");
  estimate->add_option("--audit", est.audit, "write the budget audit log");
  estimate->add_option("--provenance", est.provenance,
                       "write config, ledger and result as JSON");
  estimate->add_flag("--oracle-mode", est.oracle_mode,
                     "disable noise and caps (non-private)");
  estimate->add_flag("--unsafe", est.unsafe,
                     "allow writing non-private results to a file");

  OracleFlags orc;
  CLI::App* oracle = app.add_subcommand("oracle", "non-private PSM estimate");
  AddInputFlags(oracle, orc.in);
  oracle->add_option("--neighbors", orc.neighbors)->capture_default_str();
  oracle->add_option("--lambda", orc.lambda)->capture_default_str();
  oracle->add_option("--output", orc.output, "default stdout");
  oracle->add_flag("--unsafe", orc.unsafe,
                   "allow writing the non-private value to a file");

  SynthFlags syn;
  syn.params.seed = default_seed;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--n", syn.params.n)->capture_default_str();
  synth->add_option("--d", syn.params.d)->capture_default_str();
  synth->add_option("--tau", syn.params.tau)->capture_default_str();
  synth->add_option("--seed", syn.params.seed);
  synth->add_option("--out", syn.out, "CSV path (default stdout)");
  synth->add_option("--sidecar", syn.sidecar,
                    "metadata JSON (default <out>.json)");

  BenchFlags ben;
  ben.synth.seed = default_seed;
  CLI::App* bench = app.add_subcommand("bench", "repeated-trial sweep");
  bench->add_option("--spec", ben.spec, "key=value sweep spec");
  bench->add_option("--input", ben.input, "CSV input (default: synthetic)");
  bench->add_option("--schema", ben.schema)->capture_default_str();
  bench->add_option("--b-range", ben.b_range);
  bench->add_option("--n", ben.synth.n)->capture_default_str();
  bench->add_option("--d", ben.synth.d)->capture_default_str();
  bench->add_option("--tau", ben.synth.tau)->capture_default_str();
  bench->add_option("--data-seed", ben.synth.seed, "synthetic data seed");
  bench->add_option("--seed", ben.seed, "trial seed base (overrides spec)");
  bench->add_option("--trials", ben.trials);
  bench->add_option("--threads", ben.threads);
  bench->add_option("--results", ben.results, "per-trial CSV (default stdout)");
  bench->add_option("--summary", ben.summary, "per-cell summary CSV");

  BoundFlags bnd;
  CLI::App* bound =
      app.add_subcommand("bound", "label-level error bound diagnostic");
  AddInputFlags(bound, bnd.in);
  bound->add_option("--eps", bnd.eps)->capture_default_str();
  bound->add_option("--neighbors", bnd.neighbors)->capture_default_str();
  bound->add_option("--k", bnd.k, "matching limit (default: adaptive)");
  bound->add_option("--coeff", bnd.coeff)->capture_default_str();
  bound->add_option("--lambda", bnd.lambda)->capture_default_str();
  bound->add_option("--output", bnd.output, "default stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (estimate->parsed()) return RunEstimate(est);
  if (oracle->parsed()) return RunOracle(orc);
  if (synth->parsed()) return RunSynth(syn);
  if (bench->parsed()) return RunBench(ben);
  if (bound->parsed()) return RunBound(bnd);
  return kExitUsage;
}
