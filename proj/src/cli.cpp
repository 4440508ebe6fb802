// Copyright 2026 The Q2Q Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "q2q/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "q2q/data.hpp"
#include "q2q/errors.hpp"
#include "q2q/prediction.hpp"
#include "q2q/report.hpp"
#include "q2q/textproc.hpp"

namespace q2q {

namespace {

struct ModelFlags {
  std::string provider = "static_table";
  std::string encoder = "trainable_bilstm";
  std::string head = "dpad";
  ModelSpec defaults;
  std::string embeddings;
  std::string contextual;
};

void add_train_flags(CLI::App* cmd, ModelFlags& f) {
  TrainConfig& t = f.defaults.train;
  ArchConfig& a = f.defaults.arch;
  cmd->add_option("--hidden", a.hidden, "LSTM hidden units (0: 256 for static_table, 512 for contextual_file)")
      ->capture_default_str();
  cmd->add_option("--rand-dim", a.rand_dim, "RandLSTM output dimension")->capture_default_str();
  cmd->add_option("--conv-depth", a.conv_depth, "focus classifier conv layers (odd)")->capture_default_str();
  cmd->add_option("--conv-fmaps", a.conv_fmaps, "focus classifier feature maps")->capture_default_str();
  cmd->add_option("--fc-units", a.fc_units, "focus classifier fully-connected units")->capture_default_str();
  cmd->add_option("--max-len", t.max_len, "tokens kept per question")->capture_default_str();
  cmd->add_option("--lr", t.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--l2", t.l2, "L2 coefficient on weights")->capture_default_str();
  cmd->add_option("--batch", t.batch_size, "batch size (0: 64 for contextual_file+dpad, else 128)")
      ->capture_default_str();
  cmd->add_option("--epochs", t.epochs, "training epochs")->capture_default_str();
  cmd->add_option("--seed", t.seed, "run seed")->capture_default_str();
  cmd->add_option("--embeddings", f.embeddings, "static embedding table (text format)");
  cmd->add_option("--contextual", f.contextual, "contextual vectors (JSON lines)");
}

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--provider", f.provider, "static_table | contextual_file")->capture_default_str();
  cmd->add_option("--encoder", f.encoder, "sif_average | average | trainable_bilstm | rand_lstm")
      ->capture_default_str();
  cmd->add_option("--head", f.head, "dpad | focus")->capture_default_str();
  add_train_flags(cmd, f);
}

ModelSpec spec_from_flags(const ModelFlags& f) {
  ModelSpec s = f.defaults;
  s.provider = parse_provider(f.provider);
  s.encoder = parse_encoder(f.encoder);
  s.head = parse_head(f.head);
  validate_spec(s);
  return resolve_defaults(s);
}

std::shared_ptr<const EmbeddingProvider> load_static(const std::string& path) {
  return std::make_shared<StaticProvider>(std::make_shared<EmbeddingTable>(load_table(path)));
}

std::shared_ptr<const EmbeddingProvider> load_contextual_provider(const std::string& path) {
  return std::make_shared<ContextualProvider>(std::make_shared<ContextualStore>(load_contextual(path)));
}

std::shared_ptr<const EmbeddingProvider> provider_for(ProviderKind kind, const ModelFlags& f) {
  if (kind == ProviderKind::static_table) {
    if (f.embeddings.empty()) throw ConfigError("provider static_table needs --embeddings");
    return load_static(f.embeddings);
  }
  if (f.contextual.empty()) throw ConfigError("provider contextual_file needs --contextual");
  return load_contextual_provider(f.contextual);
}

nlohmann::json epoch_line(const EpochReport& r) {
  return {{"epoch", r.epoch}, {"loss", r.loss}, {"dev_f1", r.dev_f1 ? nlohmann::json(*r.dev_f1) : nlohmann::json()}};
}

int cmd_normalize(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw DataError("cannot open " + in_path);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw DataError("cannot write " + out_path);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      out << normalize(line) << '\n';
    } catch (const EncodingError& e) {
      throw FormatError(e.what(), lineno);
    }
  }
  if (!out) throw DataError("write failed: " + out_path);
  return kExitOk;
}

int cmd_genpairs(const std::string& corpus, const std::string& out_path, int per_dialect, std::uint64_t seed,
                 std::ostream& out, std::ostream& err) {
  auto entries = read_parallel_tsv(corpus);
  GeneratedPairs gen;
  try {
    gen = generate_dialect_pairs(entries, per_dialect, seed);
  } catch (const ConfigError& e) {
    // A bad target is reported as a data error by this command.
    throw DataError(e.what());
  }
  for (const auto& w : gen.warnings) err << "warning: " << w << '\n';
  write_q2q_tsv(out_path, gen.pairs, true);
  std::set<std::string> cities;
  for (const auto& p : gen.pairs) cities.insert(p.origin);
  out << nlohmann::json{{"corpus", corpus},
                        {"out", out_path},
                        {"per_dialect", per_dialect},
                        {"seed", seed},
                        {"pairs", gen.pairs.size()},
                        {"cities", cities.size()},
                        {"warnings", gen.warnings.size()}}
             .dump()
      << '\n';
  return kExitOk;
}

int cmd_train(const std::string& train_path, const std::string& dev_path, const std::string& out_path,
              const ModelFlags& flags, std::ostream& out) {
  ModelSpec spec = spec_from_flags(flags);
  auto provider = provider_for(spec.provider, flags);
  auto train_pairs = read_q2q_tsv(train_path);
  auto dev_pairs = read_q2q_tsv(dev_path);
  Checkpoint ck = train(spec, *provider, train_pairs, dev_pairs,
                        [&](const EpochReport& r) { out << epoch_line(r).dump() << '\n' << std::flush; });
  ck.meta["config"] = {{"train", train_path},
                       {"dev", dev_path},
                       {"embeddings", flags.embeddings},
                       {"contextual", flags.contextual},
                       {"spec", to_json(spec)}};
  save_checkpoint(ck, out_path);
  return kExitOk;
}

int cmd_predict(const std::string& ck_path, const std::string& pairs_path, const ModelFlags& flags,
                std::ostream& out) {
  Checkpoint ck = load_checkpoint(ck_path);
  ModelFlags f = flags;
  if (ck.meta.contains("config")) {
    const auto& c = ck.meta["config"];
    if (f.embeddings.empty()) f.embeddings = c.value("embeddings", "");
    if (f.contextual.empty()) f.contextual = c.value("contextual", "");
  }
  Predictor predictor(ck, provider_for(ck.spec.provider, f));
  auto pairs = read_q2q_tsv(pairs_path);
  auto preds = predictor.predict_all(pairs);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out << nlohmann::json{{"index", i}, {"probability", preds[i].probability}, {"label", preds[i].label}}.dump()
        << '\n';
  }
  return kExitOk;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

int cmd_matrix(const std::vector<std::string>& paths, const ModelFlags& flags, std::ostream& out,
               std::ostream& err) {
  if (paths.size() < 3) throw ConfigError("matrix needs TRAIN TEST... OUT_DIR");
  const std::string& train_path = paths.front();
  const std::filesystem::path out_dir = paths.back();
  std::vector<ModelSpec> specs = all_valid_specs(flags.defaults.train, flags.defaults.arch);
  for (const auto& s : specs) validate_spec(s);

  Providers providers;
  if (!flags.embeddings.empty()) providers.static_table = load_static(flags.embeddings);
  if (!flags.contextual.empty()) providers.contextual = load_contextual_provider(flags.contextual);
  if (!providers.static_table && !providers.contextual) {
    throw ConfigError("matrix needs --embeddings and/or --contextual");
  }
  auto train_pairs = read_q2q_tsv(train_path);
  std::vector<TestSet> tests;
  std::set<std::string> names;
  for (std::size_t i = 1; i + 1 < paths.size(); ++i) {
    std::string name = std::filesystem::path(paths[i]).stem().string();
    if (!names.insert(name).second) name += "#" + std::to_string(i);
    names.insert(name);
    tests.push_back({name, read_q2q_tsv(paths[i])});
  }

  MatrixOptions opts;
  opts.split_seed = flags.defaults.train.seed;
  MatrixReport rep = matrix_report(specs, providers, train_pairs, tests, opts);
  rep.metadata["config"] = {{"train", train_path},
                            {"embeddings", flags.embeddings},
                            {"contextual", flags.contextual},
                            {"seed", flags.defaults.train.seed}};

  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "report.csv", report_csv(rep));
  write_text(out_dir / "report.json", report_json(rep).dump(2) + "\n");
  const std::string msa = tests[0].name;
  const std::string dialect = tests.size() > 1 ? tests[1].name : tests[0].name;
  write_text(out_dir / "plot.json", plot_data(rep, msa, dialect).dump(2) + "\n");
  write_text(out_dir / "gap.json", gap_json(rep, msa, dialect).dump(2) + "\n");

  int ok = 0;
  for (const auto& r : rep.rows) {
    nlohmann::json line = {{"model", model_name(r.spec)}, {"testset", r.testset}};
    if (r.result) {
      ++ok;
      line["f1"] = r.result->f1;
    } else {
      line["error"] = r.error;
      err << "row failed: " << model_name(r.spec) << " on " << r.testset << ": " << r.error << '\n';
    }
    out << line.dump() << '\n';
  }
  return ok > 0 ? kExitOk : kExitData;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Question-to-question similarity models: preprocessing, pair generation, training, evaluation"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string in_path, out_path, corpus, train_path, dev_path, ck_path, pairs_path;
  int per_dialect = 1686;
  std::uint64_t gen_seed = 1;
  ModelFlags train_flags, predict_flags, matrix_flags;
  std::vector<std::string> matrix_paths;

  auto* norm = app.add_subcommand("normalize", "normalize a text file line by line");
  norm->add_option("input", in_path, "input file")->required();
  norm->add_option("output", out_path, "output file")->required();

  auto* gen = app.add_subcommand("genpairs", "generate balanced dialect pairs from a parallel corpus");
  gen->add_option("corpus", corpus, "parallel corpus TSV (city, msa, dialect)")->required();
  gen->add_option("output", out_path, "output Q2Q TSV with origin column")->required();
  gen->add_option("--per-dialect", per_dialect, "pairs per city, half of each label")->capture_default_str();
  gen->add_option("--seed", gen_seed, "sampling seed")->capture_default_str();

  auto* tr = app.add_subcommand("train", "train one model and write its checkpoint");
  tr->add_option("train", train_path, "training Q2Q TSV")->required();
  tr->add_option("dev", dev_path, "dev Q2Q TSV, used for checkpoint selection")->required();
  tr->add_option("checkpoint", out_path, "output checkpoint JSON")->required();
  add_model_flags(tr, train_flags);

  auto* pr = app.add_subcommand("predict", "score pairs with a checkpoint");
  pr->add_option("checkpoint", ck_path, "checkpoint JSON")->required();
  pr->add_option("pairs", pairs_path, "Q2Q TSV to score")->required();
  pr->add_option("--embeddings", predict_flags.embeddings, "static embedding table (defaults to the training one)");
  pr->add_option("--contextual", predict_flags.contextual, "contextual vectors (defaults to the training ones)");

  auto* mx = app.add_subcommand("matrix", "train and evaluate every valid model combination");
  mx->add_option("paths", matrix_paths, "TRAIN TEST... OUT_DIR (first test set is MSA, second dialect)")
      ->required()
      ->expected(3, -1);
  add_train_flags(mx, matrix_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (*norm) return cmd_normalize(in_path, out_path);
    if (*gen) return cmd_genpairs(corpus, out_path, per_dialect, gen_seed, out, err);
    if (*tr) return cmd_train(train_path, dev_path, out_path, train_flags, out);
    if (*pr) return cmd_predict(ck_path, pairs_path, predict_flags, out);
    if (*mx) return cmd_matrix(matrix_paths, matrix_flags, out, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitConfig;
}

}  // namespace q2q
