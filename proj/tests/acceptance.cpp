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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "q2q/cli.hpp"
#include "q2q/data.hpp"
#include "q2q/errors.hpp"
#include "q2q/eval.hpp"
#include "q2q/prediction.hpp"
#include "q2q/textproc.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

using namespace q2q;
using q2q::testing::param_gradient_error;
using q2q::testing::random_matrix;
using q2q::testing::random_tensor;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Index dim_upto(Rng& rng, Index hi) { return 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(hi))); }

Outcome gradient_suite() {
  const auto t0 = Clock::now();
  const int instances = 20;
  std::map<std::string, double> max_err;
  Rng rng(2024);

  for (int k = 0; k < instances; ++k) {  // LSTM cell over a sequence
    Index D = dim_upto(rng, 8), H = dim_upto(rng, 8), T = dim_upto(rng, 6);
    auto p = LstmParams<double>::zeros(D, H, "lstm", true);
    init_lstm_trainable(p, rng);
    Tensor<double> x = random_tensor({T, D}, rng);
    Eigen::MatrixXd G = random_matrix(T, H, rng);
    auto loss = [&] { return (lstm_forward(x.matrix(), p).cwiseProduct(G)).sum(); };
    for (auto* q : p.parameters()) q->zero_grad();
    Eigen::MatrixXd dx = lstm_backward(p, x.matrix(), lstm_trace(x.matrix(), p), G);
    double e = 0;
    for (auto* q : p.parameters()) e = std::max(e, param_gradient_error(*q, loss));
    auto num = finite_diff_grad<double>(
        [&](const Tensor<double>& xi) { return (lstm_forward(xi.matrix(), p).cwiseProduct(G)).sum(); }, x);
    e = std::max(e, relative_error(Tensor<double>::from_matrix(dx), num));
    max_err["lstm"] = std::max(max_err["lstm"], e);
  }

  for (int k = 0; k < instances; ++k) {  // BiLSTM through states and pooled vector
    Index D = dim_upto(rng, 8), H = dim_upto(rng, 8), T = dim_upto(rng, 6);
    auto f = LstmParams<double>::zeros(D, H, "f", true);
    auto b = LstmParams<double>::zeros(D, H, "b", true);
    init_lstm_trainable(f, rng);
    init_lstm_trainable(b, rng);
    Eigen::MatrixXd x = random_matrix(T, D, rng);
    Eigen::MatrixXd GF = random_matrix(T, H, rng), GB = random_matrix(T, H, rng);
    Eigen::VectorXd gp = random_matrix(2 * H, 1, rng);
    auto loss = [&] {
      auto s = bilstm_encode(x, f, b);
      return s.forward_states.cwiseProduct(GF).sum() + s.backward_states.cwiseProduct(GB).sum() + s.pooled->dot(gp);
    };
    for (auto* q : f.parameters()) q->zero_grad();
    for (auto* q : b.parameters()) q->zero_grad();
    auto tr = bilstm_trace(x, f, b);
    auto [pf, pb] = pooled_backward<double>(T, H, gp);
    Eigen::MatrixXd dF = GF + pf, dB = GB + pb;
    bilstm_backward(f, b, x, tr, dF, dB);
    double e = 0;
    for (auto* q : f.parameters()) e = std::max(e, param_gradient_error(*q, loss));
    for (auto* q : b.parameters()) e = std::max(e, param_gradient_error(*q, loss));
    max_err["bilstm"] = std::max(max_err["bilstm"], e);
  }

  for (int k = 0; k < instances; ++k) {  // conv stem and residual block, then the fully-connected layers
    ConvClassifierConfig cfg{dim_upto(rng, 4), 3, dim_upto(rng, 4), dim_upto(rng, 8)};
    auto p = ConvClassifierParams<double>::zeros(cfg);
    p.init(rng);
    // Non-zero biases so no relu sits exactly at its kink.
    for (auto* q : p.parameters())
      if (!q->decay) q->value = random_tensor(q->value.shape(), rng, 0.1);
    Index L1 = dim_upto(rng, 6), L2 = dim_upto(rng, 6);
    Tensor<double> x = random_tensor({cfg.in_channels, L1, L2}, rng);
    int y = static_cast<int>(rng.below(2));
    auto loss = [&] { return -classify(x, p)[y]; };
    for (auto* q : p.parameters()) q->zero_grad();
    Tensor<double> dlp({2});
    dlp[y] = -1;
    Tensor<double> dx = classify_backward(p, classify_trace(x, p), dlp);
    double conv = relative_error(dx, finite_diff_grad<double>([&](const Tensor<double>& xi) {
                                   return -classify(xi, p)[y];
                                 }, x));
    for (auto* q : {&p.stem_k, &p.stem_b, &p.blocks[0].k1, &p.blocks[0].b1, &p.blocks[0].k2, &p.blocks[0].b2}) {
      conv = std::max(conv, param_gradient_error(*q, loss));
    }
    double fc = 0;
    for (auto* q : {&p.fc1_w, &p.fc1_b, &p.fc2_w, &p.fc2_b, &p.out_w, &p.out_b}) {
      fc = std::max(fc, param_gradient_error(*q, loss));
    }
    max_err["conv_blocks"] = std::max(max_err["conv_blocks"], conv);
    max_err["fully_connected"] = std::max(max_err["fully_connected"], fc);
  }

  for (int k = 0; k < instances; ++k) {  // logistic regression on DPAD features
    Index D = dim_upto(rng, 8);
    ModelSpec spec{ProviderKind::static_table, EncoderKind::average, HeadKind::dpad, {}, {}};
    Q2QModel model(spec, D);
    model.initialize(static_cast<std::uint64_t>(k));
    EncodedPair pair;
    Index T1 = dim_upto(rng, 5), T2 = dim_upto(rng, 5);
    pair.first.vectors = random_matrix(T1, D, rng);
    pair.second.vectors = random_matrix(T2, D, rng);
    pair.first.tokens.assign(static_cast<std::size_t>(T1), "a");
    pair.second.tokens.assign(static_cast<std::size_t>(T2), "b");
    int y = k % 2;
    for (auto* q : model.parameters()) q->zero_grad();
    model.accumulate_gradient(pair, y);
    double e = 0;
    for (auto* q : model.parameters()) e = std::max(e, param_gradient_error(*q, [&] { return model.loss(pair, y); }));
    max_err["logistic"] = std::max(max_err["logistic"], e);
  }

  double secs = seconds_since(t0);
  double overall = 0;
  std::string detail;
  for (const auto& [layer, e] : max_err) {
    overall = std::max(overall, e);
    detail += layer + " " + fmt("%.1e", e) + ", ";
  }
  detail += fmt("%.0f instances per layer, %.1f s", instances, secs);
  return {overall < 1e-4 && secs < 60 && max_err.size() == 5, detail};
}

Outcome triplet_oracle() {
  Rng rng(7);
  double worst_err = 0;
  bool in_range = true;
  for (int k = 0; k < 1000; ++k) {
    Index d = dim_upto(rng, 16);
    Eigen::VectorXd a = random_matrix(d, 1, rng), b = random_matrix(d, 1, rng);
    if (k % 10 == 0) b = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.5 + rng.uniform()) * a;  // (anti)parallel
    double dot = 0, na = 0, nb = 0, l2 = 0;
    for (Index i = 0; i < d; ++i) {
      dot += a(i) * b(i);
      na += a(i) * a(i);
      nb += b(i) * b(i);
      l2 += (a(i) - b(i)) * (a(i) - b(i));
    }
    double cos_oracle = std::max(-1.0, std::min(1.0, dot / (std::sqrt(na) * std::sqrt(nb))));
    auto t = sim_triplet(a, b);
    worst_err = std::max({worst_err, std::abs(t.cosine - cos_oracle), std::abs(t.l2_distance - std::sqrt(l2)),
                          std::abs(t.dot - dot)});
    in_range = in_range && t.cosine >= -1 && t.cosine <= 1;
  }
  return {worst_err <= 1e-12 && in_range, fmt("max abs deviation %.2e over 1000 pairs", worst_err)};
}

HiddenStateSequence<double> random_states(Rng& rng, Index T, Index H, bool coarse) {
  HiddenStateSequence<double> s{random_matrix(T, H, rng), random_matrix(T, H, rng), std::nullopt};
  if (coarse) {  // a few distinct values so similarity ties are common
    s.forward_states = s.forward_states.unaryExpr([](double v) { return std::round(v); });
    s.backward_states = s.backward_states.unaryExpr([](double v) { return std::round(v); });
  }
  return s;
}

Outcome cube_transposition() {
  Rng rng(11);
  int bad = 0;
  for (int k = 0; k < 200; ++k) {
    Index H = dim_upto(rng, 5);
    auto a = random_states(rng, dim_upto(rng, 10), H, k % 4 == 0);
    auto b = random_states(rng, dim_upto(rng, 10), H, k % 4 == 0);
    SimCubeOptions opt;
    opt.max_len = dim_upto(rng, 12);
    auto ab = build_sim_cube(a, b, opt);
    auto ba = build_sim_cube(b, a, opt);
    bool same = ab.valid1 == ba.valid2 && ab.valid2 == ba.valid1;
    for (Index c = 0; c < kSimCubeChannels && same; ++c)
      for (Index i = 0; i < opt.max_len; ++i)
        for (Index j = 0; j < opt.max_len; ++j) same = same && ab.values(c, i, j) == ba.values(c, j, i);
    bad += !same;
  }
  return {bad == 0, fmt("%.0f of 200 instances not exact transposes", bad)};
}

Outcome focus_mask() {
  Rng rng(13);
  int bad = 0;
  for (int k = 0; k < 500; ++k) {
    Index H = dim_upto(rng, 4);
    auto a = random_states(rng, dim_upto(rng, 8), H, k % 2 == 0);
    auto b = random_states(rng, dim_upto(rng, 8), H, k % 2 == 0);
    SimCubeOptions opt;
    opt.max_len = 8;
    auto cube = build_sim_cube(a, b, opt);
    auto mask = focus_reweight(cube);

    // Replay: repeatedly take the largest cosine among free rows and
    // columns, first in row-major order on ties.
    std::vector<std::pair<Index, Index>> replay;
    std::vector<bool> ru(8, false), cu(8, false);
    for (;;) {
      Index bi = -1, bj = -1;
      for (Index i = 0; i < cube.valid1; ++i)
        for (Index j = 0; j < cube.valid2; ++j) {
          if (ru[i] || cu[j]) continue;
          if (bi < 0 || cube.values(kFocusSelectChannel, i, j) > cube.values(kFocusSelectChannel, bi, bj)) {
            bi = i;
            bj = j;
          }
        }
      if (bi < 0) break;
      ru[bi] = cu[bj] = true;
      replay.emplace_back(bi, bj);
    }

    bool ok = mask.selected == replay;
    std::set<Index> rows, cols;
    for (auto [i, j] : mask.selected) ok = ok && rows.insert(i).second && cols.insert(j).second;
    ok = ok && static_cast<Index>(mask.selected.size()) == std::min(cube.valid1, cube.valid2);
    for (Index i = 0; i < 8; ++i)
      for (Index j = 0; j < 8; ++j) {
        bool sel = std::find(mask.selected.begin(), mask.selected.end(), std::make_pair(i, j)) != mask.selected.end();
        ok = ok && mask.weights(i, j) == (sel ? 1.0 : 0.1);
        // Maximal: every valid cell left out shares a row or column with a selected one.
        if (!sel && i < cube.valid1 && j < cube.valid2) ok = ok && (rows.count(i) || cols.count(j));
      }
    bad += !ok;
  }
  return {bad == 0, fmt("%.0f of 500 cubes disagree with the replay oracle", bad)};
}

Outcome sif_component() {
  Rng rng(17);
  double worst_proj = 0, worst_dir = 0;
  for (int k = 0; k < 50; ++k) {
    Eigen::MatrixXd X = random_matrix(10, 6, rng);
    Eigen::VectorXd u = principal_direction(X);
    Eigen::MatrixXd R = remove_principal_component(X);
    worst_proj = std::max(worst_proj, (R * u).cwiseAbs().maxCoeff());
    worst_dir = std::max(worst_dir, q2q::testing::direction_distance(
                                        u, q2q::testing::jacobi_top_eigenvector(X.transpose() * X)));
  }
  return {worst_proj < 1e-8 && worst_dir < 1e-6,
          fmt("max projection %.1e, max direction error %.1e over 50 matrices", worst_proj, worst_dir)};
}

Outcome rand_lstm() {
  bool bounded = true;
  for (Index d : {1, 3, 8, 64}) {
    auto p = rand_lstm_init<double>(d, 5, 99 + static_cast<std::uint64_t>(d));
    const double bound = 1.0 / std::sqrt(static_cast<double>(d));
    for (auto* q : p.parameters()) bounded = bounded && q->value.data().cwiseAbs().maxCoeff() <= bound && !q->trainable;
  }
  bool repro = rand_lstm_init<double>(16, 4, 5).W.value == rand_lstm_init<double>(16, 4, 5).W.value &&
               !(rand_lstm_init<double>(16, 4, 5).W.value == rand_lstm_init<double>(16, 4, 6).W.value);

  auto table = q2q::testing::synthetic_table(30, 6, 1);
  StaticProvider provider(table);
  auto pairs = q2q::testing::separable_pairs(60, 30, 3);
  bool frozen = true;
  for (HeadKind h : {HeadKind::dpad, HeadKind::focus}) {
    ModelSpec spec{ProviderKind::static_table, EncoderKind::rand_lstm, h, {}, {}};
    spec.train.learning_rate = 0.05;
    spec.train.batch_size = 8;
    spec.train.epochs = 5;
    spec.train.max_len = 6;
    spec.arch.rand_dim = 8;
    spec.arch.conv_depth = 3;
    spec.arch.conv_fmaps = 4;
    spec.arch.fc_units = 8;
    Checkpoint ck = train(spec, provider, pairs, {});
    Q2QModel fresh(spec, 6);
    fresh.initialize(spec.train.seed);
    Q2QModel trained = model_from_checkpoint(ck);
    auto fp = fresh.parameters();
    auto tp = trained.parameters();
    int checked = 0;
    for (std::size_t i = 0; i < fp.size(); ++i) {
      if (fp[i]->name.rfind("rand_lstm", 0) != 0) continue;
      ++checked;
      const double bound = 1.0 / std::sqrt(8.0);
      frozen = frozen && fp[i]->value == tp[i]->value;
      bounded = bounded && tp[i]->value.data().cwiseAbs().maxCoeff() <= bound;
    }
    frozen = frozen && checked == 6;
  }
  return {bounded && frozen && repro,
          std::string("bounded ") + (bounded ? "yes" : "no") + ", frozen through 5 epochs " + (frozen ? "yes" : "no") +
              ", seed-reproducible " + (repro ? "yes" : "no")};
}

Outcome end_to_end() {
  auto table = q2q::testing::synthetic_table(30, 8, 21);
  StaticProvider provider(table);
  auto all = q2q::testing::separable_pairs(200, 30, 22);
  auto [fit, dev] = stratified_split(all, 0.8, 23);
  bool pass = true;
  std::string detail;
  for (HeadKind h : {HeadKind::dpad, HeadKind::focus}) {
    ModelSpec spec{ProviderKind::static_table, EncoderKind::trainable_bilstm, h, {}, {}};
    spec.train.learning_rate = 0.01;
    spec.train.batch_size = 16;
    spec.train.epochs = 30;
    spec.train.max_len = 8;
    spec.train.seed = 3;
    spec.arch.hidden = 8;
    spec.arch.conv_depth = 3;
    spec.arch.conv_fmaps = 8;
    spec.arch.fc_units = 16;
    const auto t0 = Clock::now();
    bool finite = true;
    Checkpoint ck = train(spec, provider, fit, dev, [&](const EpochReport& r) { finite = finite && std::isfinite(r.loss); });
    double secs = seconds_since(t0);
    Predictor pred(ck, std::make_shared<StaticProvider>(table));
    std::vector<int> p, y;
    for (const auto& x : pred.predict_all(dev)) p.push_back(x.label);
    for (const auto& x : dev) y.push_back(x.label);
    double f1 = f1_positive(p, y).f1;
    double need = h == HeadKind::dpad ? 0.95 : 0.90;
    pass = pass && finite && f1 >= need && secs < 300;
    detail += to_string(h) + " dev F1 " + fmt("%.3f (need %.2f) in %.1f s; ", f1, need, secs);
  }
  detail += fmt("%.0f train / %.0f dev pairs, 30 epochs", static_cast<double>(fit.size()), static_cast<double>(dev.size()));
  return {pass, detail};
}

Outcome pair_generator() {
  std::vector<ParallelEntry> corpus;
  for (int c = 0; c < 24; ++c) {
    std::string city = "City" + std::to_string(c);
    for (int i = 0; i < 950; ++i) {
      // Every fifth dialect rendering repeats, so a careless sampler would
      // produce translation negatives.
      std::string msa = "msa " + std::to_string(i) + " " + city + " ?";
      std::string dia = "dia " + std::to_string(i % 5 == 0 ? 0 : i) + " " + city + " ؟";
      corpus.push_back({city, msa, dia});
    }
    for (int i = 0; i < 40; ++i) corpus.push_back({city, "msa stmt " + std::to_string(i), "dia stmt ."});
  }
  std::set<std::pair<std::string, std::string>> translations;
  for (const auto& e : corpus) translations.emplace(normalize(e.msa_sentence), normalize(e.dialect_sentence));
  auto gen = generate_dialect_pairs(corpus, 1686, 42);
  std::map<std::string, LabelCounts> per_city;
  long translation_negatives = 0;
  for (const auto& p : gen.pairs) {
    (p.label ? per_city[p.origin].positives : per_city[p.origin].negatives)++;
    if (p.label == 0 && translations.count({p.question1, p.question2})) ++translation_negatives;
  }
  bool balanced = per_city.size() == 24;
  for (const auto& [city, c] : per_city) balanced = balanced && c.positives == 843 && c.negatives == 843;
  bool pass = gen.pairs.size() == 40464 && balanced && translation_negatives == 0 && gen.warnings.empty();
  return {pass, fmt("%.0f pairs, %.0f cities at 843/843, %.0f translation negatives",
                    static_cast<double>(gen.pairs.size()), balanced ? 24.0 : 0.0,
                    static_cast<double>(translation_negatives))};
}

Outcome gap_fixture() {
  std::vector<GapInput> rows{
      {"Word2vec + TrainableLSTM + FocusLayer", "focus", 0.84, 0.70},
      {"Word2vec + RandLSTM + FocusLayer", "focus", 0.72, 0.69},
      {"ELMo + TrainableLSTM + FocusLayer", "focus", 0.90, 0.82},
      {"ELMo + RandLSTM + FocusLayer", "focus", 0.75, 0.71},
      {"Word2vec + TrainableLSTM + DPAD", "dpad_lstm", 0.81, 0.66},
      {"Word2vec + RandLSTM + DPAD", "dpad_lstm", 0.62, 0.44},
      {"ELMo + TrainableLSTM + DPAD", "dpad_lstm", 0.93, 0.69},
      {"ELMo + RandLSTM + DPAD", "dpad_lstm", 0.83, 0.47},
  };
  auto g = gap_report(rows);
  double focus = round_decimals(g.at(0).average_gap, 3);
  double dpad = round_decimals(g.at(1).average_gap, 3);
  return {focus == 0.073 && dpad == 0.233, fmt("focus %.3f, dpad_lstm %.3f", focus, dpad)};
}

Outcome matrix_determinism() {
  q2q::testing::TempDir dir;
  auto table = q2q::testing::synthetic_table(30, 6, 31);
  q2q::testing::write_table_file(dir.file("emb.txt"), *table);
  auto tr = q2q::testing::separable_pairs(60, 30, 32);
  auto m = q2q::testing::separable_pairs(20, 30, 33);
  auto d = q2q::testing::separable_pairs(20, 30, 34);
  write_q2q_tsv(dir.file("train.tsv"), tr);
  write_q2q_tsv(dir.file("msa.tsv"), m);
  write_q2q_tsv(dir.file("dialect.tsv"), d);
  std::vector<QuestionPair> all = tr;
  all.insert(all.end(), m.begin(), m.end());
  all.insert(all.end(), d.begin(), d.end());
  q2q::testing::write_contextual_file(dir.file("ctx.jsonl"), q2q::testing::contextual_vectors(*table, all));
  auto run = [&](const std::string& out) {
    std::vector<std::string> args{"q2q", "matrix", dir.file("train.tsv"), dir.file("msa.tsv"), dir.file("dialect.tsv"),
                                  out, "--embeddings", dir.file("emb.txt"), "--contextual", dir.file("ctx.jsonl"),
                                  "--seed", "9", "--hidden", "4", "--rand-dim", "4", "--conv-depth", "3",
                                  "--conv-fmaps", "2", "--fc-units", "4", "--max-len", "6", "--lr", "0.01",
                                  "--batch", "16", "--epochs", "3"};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    return run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  };
  int c1 = run(dir.file("a")), c2 = run(dir.file("b"));
  std::string csv1 = q2q::testing::read_file(dir.file("a") + "/report.csv");
  std::string csv2 = q2q::testing::read_file(dir.file("b") + "/report.csv");
  long rows = std::count(csv1.begin(), csv1.end(), '\n') - 1;
  bool pass = c1 == 0 && c2 == 0 && !csv1.empty() && csv1 == csv2 && rows == 20;
  return {pass, fmt("%.0f rows, %.0f bytes, ", static_cast<double>(rows), static_cast<double>(csv1.size())) +
                    "reruns identical: " + (csv1 == csv2 ? "yes" : "no")};
}

Outcome tsv_fixture() {
  Rng rng(41);
  std::ostringstream file;
  file << "question1\tquestion2\tlabel\n";
  std::vector<int> labels(11997, 0);
  std::fill(labels.begin() + 6600, labels.end(), 1);
  rng.shuffle(std::span<int>(labels));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    file << "ما هو سؤال رقم " << i << "؟\tكيف حال " << i << " ؟\t" << labels[i] << '\n';
  }
  std::istringstream in(file.str());
  auto pairs = read_q2q_tsv(in);
  LabelCounts c = count_labels(pairs);
  std::ostringstream out;
  write_q2q_tsv(out, pairs);
  std::istringstream again(out.str());
  auto reread = read_q2q_tsv(again);
  LabelCounts c2 = count_labels(reread);
  bool pass = pairs.size() == 11997 && c.negatives == 6600 && c.positives == 5397 && reread == pairs &&
              c2.negatives == 6600 && c2.positives == 5397;
  return {pass, fmt("%.0f pairs, %.0f labeled 0, %.0f labeled 1, rewrite identical",
                    static_cast<double>(pairs.size()), static_cast<double>(c.negatives),
                    static_cast<double>(c.positives))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient_suite", gradient_suite},       {"triplet_scalar_oracle", triplet_oracle},
      {"simcube_transposition", cube_transposition}, {"focus_mask_greedy_matching", focus_mask},
      {"sif_principal_component", sif_component},    {"rand_lstm_bounds_frozen_seeded", rand_lstm},
      {"end_to_end_learning", end_to_end},      {"pair_generator_counts", pair_generator},
      {"gap_report_fixture", gap_fixture},      {"matrix_rerun_identical", matrix_determinism},
      {"tsv_fixture_counts", tsv_fixture},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
