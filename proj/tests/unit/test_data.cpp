#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "prevsim/csv.hpp"
#include "prevsim/dataset.hpp"
#include "prevsim/error.hpp"
#include "prevsim/models.hpp"
#include "prevsim/roc.hpp"
#include "support.hpp"

using namespace prevsim;
using prevsim::fixtures::TempDir;
using prevsim::fixtures::write_text;

namespace {

Dataset counted(std::size_t pos, std::size_t neg) {
  const std::size_t n = pos + neg;
  Matrix x(n, 2);
  std::vector<std::uint8_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = static_cast<double>(i);
    x(i, 1) = static_cast<double>(i % 7);
    y[i] = i < pos;
  }
  return Dataset("counted", {"a", "b"}, std::move(x), std::move(y));
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::Io;
}

double holdout_auc(const Dataset& ds, ModelKind kind, Seed seed) {
  const auto split = train_test_split(ds, 0.2, seed);
  const auto model = fit_classifier(kind, ModelSpec::defaults(kind).grid.front(), split.train, seed);
  return auc({model->predict(split.test.features()), split.test.labels()});
}

}  // namespace

TEST(LoadCsv, TwoRows) {
  TempDir dir;
  write_text(dir / "two.csv", "x,y\n1.5,yes\n2.5,no\n");
  const auto ds = load_csv(dir / "two.csv", "y", "yes");
  EXPECT_EQ(ds.rows(), 2u);
  EXPECT_EQ(ds.cols(), 1u);
  EXPECT_DOUBLE_EQ(prevalence(ds), 0.5);
  EXPECT_EQ(ds.labels(), (std::vector<std::uint8_t>{1, 0}));
}

TEST(LoadCsv, OneHotEncodesTextColumns) {
  TempDir dir;
  write_text(dir / "cat.csv",
             "age,colour,label\n30,red,1\n41,blue,0\n25,green,0\n52,red,1\n");
  const auto ds = load_csv(dir / "cat.csv", "label", "1");
  const std::vector<std::string> names{"age", "colour=blue", "colour=green", "colour=red"};
  EXPECT_EQ(ds.feature_names(), names);
  const Matrix expected(4, 4, {30, 0, 0, 1, 41, 1, 0, 0, 25, 0, 1, 0, 52, 0, 0, 1});
  EXPECT_EQ(ds.features(), expected);
}

TEST(LoadCsv, QuotedFieldsAndCrlf) {
  TempDir dir;
  write_text(dir / "q.csv", "\xEF\xBB\xBF\"x\",\"city\",label\r\n1,\"New York, NY\",1\r\n2,Paris,0\r\n");
  const auto ds = load_csv(dir / "q.csv", "label", "1");
  EXPECT_EQ(ds.cols(), 3u);
  EXPECT_EQ(ds.feature_names()[1], "city=New York, NY");
}

TEST(LoadCsv, Errors) {
  TempDir dir;
  EXPECT_EQ(code_of([&] { load_csv(dir / "missing.csv", "label", "1"); }), Errc::MissingFile);

  write_text(dir / "nolabel.csv", "a,b\n1,2\n");
  EXPECT_EQ(code_of([&] { load_csv(dir / "nolabel.csv", "label", "1"); }),
            Errc::MissingLabelColumn);

  write_text(dir / "dup.csv", "label,label\n1,0\n");
  EXPECT_EQ(code_of([&] { load_csv(dir / "dup.csv", "label", "1"); }),
            Errc::AmbiguousLabelColumn);

  write_text(dir / "empty.csv", "a,label\n");
  EXPECT_EQ(code_of([&] { load_csv(dir / "empty.csv", "label", "1"); }), Errc::EmptyDataset);

  write_text(dir / "three.csv", "a,label\n1,x\n2,y\n3,z\n");
  EXPECT_EQ(code_of([&] { load_csv(dir / "three.csv", "label", "x"); }),
            Errc::TooManyLabelValues);

  write_text(dir / "bad.csv", "a,label\n1,1\n2,0\nfoo,1\n");
  EXPECT_EQ(code_of([&] { load_csv(dir / "bad.csv", "label", "1"); }), Errc::UnparsableNumeric);

  write_text(dir / "ragged.csv", "a,label\n1,1,3\n");
  EXPECT_EQ(code_of([&] { load_csv(dir / "ragged.csv", "label", "1"); }), Errc::MalformedCsv);
}

TEST(Prevalence, Values) {
  EXPECT_DOUBLE_EQ(prevalence(counted(2775, 3439)), 2775.0 / 6214.0);
  EXPECT_DOUBLE_EQ(prevalence(counted(5, 0)), 1.0);
  EXPECT_NEAR(prevalence(counted(495, 5719)), 0.0797, 1e-4);
  EXPECT_THROW(prevalence(Dataset{}), Error);
}

TEST(Split, SizesAndDeterminism) {
  const auto ds = counted(2775, 3439);
  const auto split = train_test_split(ds, 0.2, Seed{1});
  EXPECT_EQ(split.test.rows(), 1243u);
  EXPECT_EQ(split.train.rows(), 6214u - 1243u);

  const auto small = counted(5, 5);
  const auto a = train_test_split(small, 0.5, Seed{9});
  const auto b = train_test_split(small, 0.5, Seed{9});
  EXPECT_EQ(a.test.features(), b.test.features());
  EXPECT_EQ(a.train.labels(), b.train.labels());
}

TEST(Split, DifferentSeedsDiffer) {
  const auto ds = counted(40, 60);
  const auto a = train_test_split(ds, 0.2, Seed{1});
  const auto b = train_test_split(ds, 0.2, Seed{2});
  EXPECT_NE(a.test.features(), b.test.features());
}

TEST(Split, PartitionsTheRows) {
  const auto ds = counted(40, 60);
  const auto s = train_test_split(ds, 0.3, Seed{5});
  std::multiset<double> ids;
  for (const auto* part : {&s.train, &s.test}) {
    for (std::size_t r = 0; r < part->rows(); ++r) ids.insert(part->features()(r, 0));
  }
  EXPECT_EQ(ids.size(), 100u);
  EXPECT_EQ(std::set<double>(ids.begin(), ids.end()).size(), 100u);
}

TEST(Split, RejectsDegenerateFractions) {
  const auto ds = counted(5, 5);
  EXPECT_EQ(code_of([&] { train_test_split(ds, 0.0, Seed{1}); }), Errc::DegenerateSplit);
  EXPECT_EQ(code_of([&] { train_test_split(ds, 1.0, Seed{1}); }), Errc::DegenerateSplit);
  EXPECT_EQ(code_of([&] { train_test_split(ds, 0.01, Seed{1}); }), Errc::DegenerateSplit);
}

TEST(Kfold, Sizes) {
  auto folds = kfold_indices(23, 10, Seed{3});
  std::vector<std::size_t> sizes;
  for (const auto& f : folds) sizes.push_back(f.size());
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{2, 2, 2, 2, 2, 2, 2, 3, 3, 3}));

  for (const auto& f : kfold_indices(10, 10, Seed{3})) EXPECT_EQ(f.size(), 1u);
}

TEST(Kfold, Partition) {
  const auto folds = kfold_indices(100, 10, Seed{4});
  std::vector<int> seen(100, 0);
  for (const auto& f : folds) {
    EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
    for (auto i : f) ++seen[i];
  }
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  EXPECT_THROW(kfold_indices(5, 10, Seed{1}), Error);
  EXPECT_THROW(kfold_indices(5, 1, Seed{1}), Error);
}

TEST(Swap, OneStep) {
  const auto ds = counted(2775, 3439);
  const auto down = swap_step(ds, 30, SwapDirection::ReducePrevalence, Seed{7});
  EXPECT_EQ(down.positives(), 2745u);
  EXPECT_EQ(down.negatives(), 3469u);
  EXPECT_EQ(down.rows(), 6214u);
  const auto up = swap_step(ds, 30, SwapDirection::IncreasePrevalence, Seed{7});
  EXPECT_EQ(up.positives(), 2805u);
  EXPECT_EQ(up.rows(), 6214u);
}

TEST(Swap, ZeroIsIdentity) {
  const auto ds = counted(20, 30);
  const auto same = swap_step(ds, 0, SwapDirection::ReducePrevalence, Seed{1});
  EXPECT_EQ(same.labels(), ds.labels());
  EXPECT_EQ(same.features(), ds.features());
}

TEST(Swap, SeventySixSteps) {
  auto ds = counted(2775, 3439);
  for (int i = 1; i <= 76; ++i) {
    ds = swap_step(ds, 30, SwapDirection::ReducePrevalence, derive_seed(Seed{11}, -i));
    ASSERT_EQ(ds.rows(), 6214u);
  }
  EXPECT_EQ(ds.positives(), 495u);
  EXPECT_EQ(ds.negatives(), 5719u);
}

TEST(Swap, NewRowsComeFromTheGrowingClass) {
  const auto ds = counted(20, 30);
  const auto down = swap_step(ds, 5, SwapDirection::ReducePrevalence, Seed{2});
  for (std::size_t r = 45; r < 50; ++r) {
    EXPECT_EQ(down.labels()[r], 0);
    EXPECT_GE(down.features()(r, 0), 20.0);
  }
}

TEST(Swap, ExhaustedClass) {
  const auto ds = counted(30, 30);
  EXPECT_EQ(code_of([&] { swap_step(ds, 30, SwapDirection::ReducePrevalence, Seed{1}); }),
            Errc::ClassExhausted);
}

TEST(Correlation, AffineCopyIsPerfectlyCorrelated) {
  Matrix x(6, 2);
  const double xs[] = {1.0, -2.0, 3.5, 0.0, 7.0, 2.0};
  for (std::size_t i = 0; i < 6; ++i) {
    x(i, 0) = xs[i];
    x(i, 1) = 2 * xs[i] + 3;
  }
  const Dataset ds("affine", {"x", "y"}, x, {1, 0, 1, 0, 0, 1});
  const auto cm = correlation_matrix(ds);
  EXPECT_EQ(cm.dimension, 3u);
  EXPECT_NEAR(cm.at(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(cm.at(0, 1), 1.0, 1e-14);
  EXPECT_NEAR(cm.at(1, 0), 1.0, 1e-14);
}

TEST(Correlation, HandComputedFourRows) {
  // x = (1,2,3,4), z = (2,1,4,3), label = (0,0,1,1).
  // Centred: x (-1.5,-.5,.5,1.5), z (-.5,-1.5,1.5,.5), l (-.5,-.5,.5,.5).
  // Sxz = .75+.75+.75+.75 = 3; Sxx = Szz = 5; Sll = 1; Sxl = 2; Szl = 2.
  const Matrix x(4, 2, {1, 2, 2, 1, 3, 4, 4, 3});
  const Dataset ds("hand", {"x", "z"}, x, {0, 0, 1, 1});
  const auto cm = correlation_matrix(ds);
  EXPECT_NEAR(cm.at(0, 1), 0.6, 1e-15);
  EXPECT_NEAR(cm.at(0, 2), 2.0 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(cm.at(1, 2), 2.0 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(max_abs_deviation(cm, cm), 0.0, 0.0);
}

TEST(Correlation, ConstantColumnsReportZero) {
  const Matrix x(3, 2, {1, 5, 2, 5, 3, 5});
  const Dataset ds("flat", {"x", "c"}, x, {0, 1, 1});
  const auto cm = correlation_matrix(ds);
  EXPECT_TRUE(cm.constant[1]);
  EXPECT_EQ(cm.at(0, 1), 0.0);
}

TEST(Synth, ExactPositiveCounts) {
  EXPECT_EQ(synth_dataset(100, 3, 0.5, 1.0, Seed{1}).positives(), 50u);
  EXPECT_EQ(synth_dataset(6214, 2, 0.45, 1.0, Seed{1}).positives(), 2796u);
}

TEST(Synth, Deterministic) {
  const auto a = synth_dataset(200, 4, 0.3, 1.0, Seed{8});
  const auto b = synth_dataset(200, 4, 0.3, 1.0, Seed{8});
  EXPECT_EQ(a.features(), b.features());
  EXPECT_EQ(a.labels(), b.labels());
  const auto c = synth_dataset(200, 4, 0.3, 1.0, Seed{9});
  EXPECT_NE(a.features(), c.features());
}

TEST(Synth, SeparationControlsDifficulty) {
  const auto separated = synth_dataset(1000, 5, 0.45, 1.0, Seed{3});
  EXPECT_GT(holdout_auc(separated, ModelKind::LogisticRegression, Seed{3}), 0.7);
  const auto easy = synth_dataset(1000, 5, 0.45, 2.0, Seed{3});
  EXPECT_GT(holdout_auc(easy, ModelKind::LogisticRegression, Seed{3}), 0.85);
  const auto noise = synth_dataset(3000, 5, 0.45, 0.0, Seed{3});
  for (auto kind : {ModelKind::LogisticRegression, ModelKind::LDA, ModelKind::GradientBoosting}) {
    EXPECT_NEAR(holdout_auc(noise, kind, Seed{3}), 0.5, 0.05) << model_name(kind);
  }
}

TEST(Synth, Errors) {
  EXPECT_THROW(synth_dataset(5, 2, 0.5, 1.0, Seed{1}), Error);
  EXPECT_THROW(synth_dataset(100, 0, 0.5, 1.0, Seed{1}), Error);
  EXPECT_THROW(synth_dataset(100, 2, 1.0, 1.0, Seed{1}), Error);
}

TEST(WriteCsv, RoundTrip) {
  TempDir dir;
  const auto ds = synth_dataset(150, 3, 0.4, 0.7, Seed{12});
  write_csv(ds, dir / "ds.csv");
  const auto back = load_csv(dir / "ds.csv", "label", "1");
  EXPECT_EQ(back.labels(), ds.labels());
  EXPECT_EQ(back.feature_names(), ds.feature_names());
  ASSERT_EQ(back.features().values().size(), ds.features().values().size());
  for (std::size_t i = 0; i < ds.features().values().size(); ++i) {
    EXPECT_NEAR(back.features().values()[i], ds.features().values()[i], 1e-9);
  }
}

TEST(Csv, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6214.0, 0.452}) {
    EXPECT_EQ(csv::parse_double(csv::format_double(v)).value(), v);
  }
  EXPECT_FALSE(csv::parse_double("1.2x").has_value());
  EXPECT_EQ(csv::parse_double(" 3 ").value(), 3.0);
}

TEST(Csv, EscapeAndParse) {
  EXPECT_EQ(csv::escape("plain"), "plain");
  EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  const auto t = csv::parse("a,b\n\"x\ny\",\"q\"\"\"\n");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][0], "x\ny");
  EXPECT_EQ(t.rows[0][1], "q\"");
}
