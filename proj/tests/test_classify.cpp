#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "lexica/classify.hpp"
#include "lexica/util.hpp"
#include "test_support.hpp"

using namespace lexica;

namespace {

EmbeddingModel tiny_model() {
  EmbeddingModel model;
  model.vocab = Vocabulary({"east", "north", "both"}, {3, 3, 3}, 1);
  model.dim = 2;
  model.w_in = {1, 0, 0, 1, 1, 1};
  return model;
}

std::vector<TitleVector> toy_points(std::size_t per_class, Rng& rng) {
  // linearly separable in the first coordinate with margin 1
  std::vector<TitleVector> points;
  for (std::size_t i = 0; i < per_class; ++i) {
    TitleVector pos, neg;
    pos.values = {1.0 + rng.next_double() * 2.0, rng.uniform(-1, 1)};
    pos.label = "pos";
    pos.source_id = "p" + std::to_string(i);
    neg.values = {-1.0 - rng.next_double() * 2.0, rng.uniform(-1, 1)};
    neg.label = "neg";
    neg.source_id = "n" + std::to_string(i);
    points.push_back(std::move(pos));
    points.push_back(std::move(neg));
  }
  return points;
}

}  // namespace

TEST_CASE("title_vector: single word, mean, OOV skipping") {
  EmbeddingModel model = tiny_model();
  CHECK(title_vector(model, {"east"}).values == std::vector<double>{1, 0});
  CHECK(title_vector(model, {"east", "north"}).values == std::vector<double>{0.5, 0.5});
  CHECK(title_vector(model, {"unknown", "east"}).values == std::vector<double>{1, 0});
  CHECK_THROWS_AS(title_vector(model, {"unknown", "words"}), Error);
}

TEST_CASE("split_train_validation: sizes, disjointness, determinism") {
  Rng rng(29);
  std::vector<TitleVector> items;
  for (int i = 0; i < 100; ++i) {
    TitleVector tv;
    tv.values = {rng.uniform(-1, 1)};
    tv.label = "only";
    tv.source_id = std::to_string(i);
    items.push_back(std::move(tv));
  }
  SplitOptions opts;
  opts.train_n = 70;
  opts.valid_n = 30;
  opts.seed = 77;
  auto [train, valid] = split_train_validation(items, opts);
  CHECK(train.size() == 70);
  CHECK(valid.size() == 30);
  std::set<std::string> seen;
  for (const auto& tv : train) seen.insert(tv.source_id);
  for (const auto& tv : valid) CHECK(seen.insert(tv.source_id).second);
  CHECK(seen.size() == 100);

  auto [train2, valid2] = split_train_validation(items, opts);
  for (std::size_t i = 0; i < train.size(); ++i)
    CHECK(train[i].source_id == train2[i].source_id);
  for (std::size_t i = 0; i < valid.size(); ++i)
    CHECK(valid[i].source_id == valid2[i].source_id);
}

TEST_CASE("split_train_validation: insufficient data names the class") {
  std::vector<TitleVector> items(10);
  for (auto& tv : items) {
    tv.values = {0.0};
    tv.label = "tiny";
  }
  SplitOptions opts;
  opts.train_n = 8;
  opts.valid_n = 5;
  try {
    split_train_validation(items, opts);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("tiny") != std::string::npos);
  }
  opts.proportional_fallback = true;
  auto [train, valid] = split_train_validation(items, opts);
  CHECK(train.size() + valid.size() == 10);
  CHECK(train.size() == 6);  // 8/13 of 10, rounded down
}

TEST_CASE("train_svm: separable toy reaches perfect training accuracy") {
  Rng rng(31);
  auto points = toy_points(100, rng);
  SvmConfig config;
  config.seed = 5;
  SvmModel svm = train_svm(points, config);
  CHECK(svm.classes == std::vector<std::string>{"neg", "pos"});
  std::size_t correct = 0;
  for (const auto& p : points)
    if (predict(svm, p) == p.label) ++correct;
  CHECK(correct == points.size());
}

TEST_CASE("train_svm: deterministic under a fixed seed") {
  Rng rng(37);
  auto points = toy_points(50, rng);
  SvmConfig config;
  config.seed = 11;
  SvmModel a = train_svm(points, config);
  SvmModel b = train_svm(points, config);
  CHECK(a.weights == b.weights);
  CHECK(a.biases == b.biases);
}

TEST_CASE("train_svm: indistinguishable classes score chance") {
  // every sample of both classes has the identical feature vector
  std::vector<TitleVector> data;
  for (int i = 0; i < 200; ++i) {
    TitleVector tv;
    tv.values = {0.5, -0.25};
    tv.label = i % 2 == 0 ? "one" : "two";
    tv.source_id = std::to_string(i);
    data.push_back(std::move(tv));
  }
  SplitOptions opts;
  opts.train_n = 50;
  opts.valid_n = 50;
  opts.seed = 3;
  auto [train, valid] = split_train_validation(data, opts);
  SvmModel svm = train_svm(train, {.seed = 3});
  ConfusionMatrix cm = evaluate(svm, valid);
  CHECK(cm.accuracy() == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("train_svm: argument validation") {
  std::vector<TitleVector> one_class(3);
  for (auto& tv : one_class) {
    tv.values = {1.0};
    tv.label = "same";
  }
  CHECK_THROWS_AS(train_svm(one_class, {}), Error);
  CHECK_THROWS_AS(train_svm({}, {}), Error);

  std::vector<TitleVector> bad(2);
  bad[0].values = {1.0};
  bad[0].label = "a";
  bad[1].values = {std::nan("")};
  bad[1].label = "b";
  CHECK_THROWS_AS(train_svm(bad, {}), Error);
}

TEST_CASE("predict: hand scores, tie-break, bias-shift invariance") {
  SvmModel svm;
  svm.classes = {"c1", "c2"};
  svm.dim = 2;
  svm.weights = {{1, 0}, {0, 1}};
  svm.biases = {0, 0};

  TitleVector v;
  v.values = {1, 0};
  CHECK(predict(svm, v) == "c1");

  SvmModel zero;
  zero.classes = {"first", "second"};
  zero.dim = 2;
  zero.weights = {{0, 0}, {0, 0}};
  zero.biases = {0, 0};
  CHECK(predict(zero, v) == "first");  // exact tie goes to class order

  // adding a common constant to every bias never changes the argmax
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    SvmModel m;
    m.classes = {"a", "b", "c"};
    m.dim = 3;
    for (int c = 0; c < 3; ++c) {
      m.weights.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
      m.biases.push_back(rng.uniform(-1, 1));
    }
    TitleVector x;
    x.values = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const std::string before = predict(m, x);
    const double shift = rng.uniform(-5, 5);
    for (auto& b : m.biases) b += shift;
    CHECK(predict(m, x) == before);
  }

  TitleVector wrong;
  wrong.values = {1, 2, 3};
  CHECK_THROWS_AS(predict(svm, wrong), Error);
}

TEST_CASE("evaluate: perfect predictor yields a diagonal matrix") {
  Rng rng(43);
  auto points = toy_points(50, rng);
  SvmModel svm = train_svm(points, {.seed = 7});
  ConfusionMatrix cm = evaluate(svm, points);
  CHECK(cm.accuracy() == doctest::Approx(1.0));
  CHECK(cm.at("pos", "neg") == 0);
  CHECK(cm.at("neg", "pos") == 0);
  CHECK(cm.trace() == 100);
}

TEST_CASE("confusion matrix row sums equal per-class validation counts") {
  Rng rng(47);
  auto points = toy_points(60, rng);
  SplitOptions opts{.train_n = 40, .valid_n = 20, .seed = 9};
  auto [train, valid] = split_train_validation(points, opts);
  SvmModel svm = train_svm(train, {.seed = 9});
  ConfusionMatrix cm = evaluate(svm, valid);
  auto sums = cm.row_sums();
  for (auto s : sums) CHECK(s == 20);
  CHECK(cm.total() == 40);
  const double acc = static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
  CHECK(cm.accuracy() == acc);
}

TEST_CASE("published five-section matrix: accuracy and grouped reduction") {
  ConfusionMatrix cm =
      ConfusionMatrix::load_csv(testsup::published_dir() / "cm_fivesection.csv");
  CHECK(cm.total() == 65000);
  CHECK(cm.trace() == 42329);
  // printed as 65.1%
  CHECK(std::round(cm.accuracy() * 1000.0) / 10.0 == doctest::Approx(65.1));
  for (auto s : cm.row_sums()) CHECK(s == 13000);

  LabelGrouping grouping = {
      {"formal", {"hep-th", "gr-qc", "math-ph"}},
      {"pheno", {"hep-ph", "hep-lat"}},
  };
  ConfusionMatrix reduced = reduce_confusion(cm, grouping);
  CHECK(reduced.at("formal", "formal") == 35530);
  CHECK(reduced.at("formal", "pheno") == 3470);
  CHECK(reduced.at("pheno", "formal") == 4890);
  CHECK(reduced.at("pheno", "pheno") == 21110);
  CHECK(reduced.total() == cm.total());
  CHECK(std::round(reduced.accuracy() * 1000.0) / 10.0 == doctest::Approx(87.1));
}

TEST_CASE("published binary matrices: times, natural science, HEP") {
  auto check = [](const char* file, double printed) {
    ConfusionMatrix cm = ConfusionMatrix::load_csv(testsup::published_dir() / file);
    CHECK(std::round(cm.accuracy() * 1000.0) / 10.0 == doctest::Approx(printed));
  };
  check("cm_times.csv", 99.3);
  check("cm_natsci.csv", 94.6);
  check("cm_hep.csv", 92.0);
}

TEST_CASE("reduce_confusion: identity grouping and validation") {
  ConfusionMatrix cm({"a", "b"});
  cm.add_count("a", "a", 3);
  cm.add_count("a", "b", 1);
  cm.add_count("b", "b", 2);
  LabelGrouping identity = {{"a", {"a"}}, {"b", {"b"}}};
  ConfusionMatrix same = reduce_confusion(cm, identity);
  CHECK(same.counts() == cm.counts());

  LabelGrouping incomplete = {{"g", {"a"}}};
  CHECK_THROWS_AS(reduce_confusion(cm, incomplete), Error);
}

TEST_CASE("confusion matrix CSV round-trip") {
  auto dir = testsup::fresh_dir("cm_csv");
  ConfusionMatrix cm({"x", "y"});
  cm.add_count("x", "x", 5);
  cm.add_count("x", "y", 2);
  cm.add_count("y", "x", 1);
  cm.add_count("y", "y", 9);
  cm.save_csv(dir / "cm.csv");
  ConfusionMatrix back = ConfusionMatrix::load_csv(dir / "cm.csv");
  CHECK(back.labels() == cm.labels());
  CHECK(back.counts() == cm.counts());
}

TEST_CASE("one_hot_baseline: deterministic and sane on synthetic data") {
  auto corpus = testsup::synthetic_sections({.sections = 2,
                                             .titles_per_section = 300,
                                             .vocab_per_section = 50,
                                             .seed = 51});
  Titles titles;
  std::vector<std::string> labels;
  for (const auto& rec : corpus.records()) {
    titles.push_back(raw_tokens(rec.title));
    labels.push_back(rec.section);
  }
  OneHotConfig config;
  config.split = {.train_n = 200, .valid_n = 100, .seed = 13};
  config.svm.seed = 13;
  ConfusionMatrix a = one_hot_baseline(titles, labels, config);
  ConfusionMatrix b = one_hot_baseline(titles, labels, config);
  CHECK(a.counts() == b.counts());
  CHECK(a.total() == 200);
}

TEST_CASE("svm save/load round-trip") {
  auto dir = testsup::fresh_dir("svm_io");
  Rng rng(53);
  auto points = toy_points(30, rng);
  SvmModel svm = train_svm(points, {.lambda = 1e-4, .epochs = 20, .seed = 15});
  svm.train_n = 30;
  svm.valid_n = 30;
  svm.split_seed = 15;
  save_svm(svm, dir / "clf.svm");
  SvmModel back = load_svm(dir / "clf.svm");
  CHECK(back.classes == svm.classes);
  CHECK(back.weights == svm.weights);
  CHECK(back.biases == svm.biases);
  CHECK(back.config.lambda == svm.config.lambda);
  CHECK(back.train_n == 30);
  CHECK(back.split_per_class == svm.split_per_class);
}
