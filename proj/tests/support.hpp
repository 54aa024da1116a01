#pragma once

#include <array>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unistd.h>

#include "prevsim/metrics.hpp"
#include "prevsim/models.hpp"

namespace prevsim::fixtures {

/// Confusion matrices of the six reference classifiers and their expected
/// metric values (three decimals).
struct ReferenceColumn {
  ModelKind model;
  ConfusionMatrix cm;
  std::map<MetricKind, double> values;
};

// The reference columns are labelled GBM, GLM, KNN, LDA, RF and random guess; they map
// onto the closest models of this library.
inline const std::array<ReferenceColumn, 6>& reference_columns() {
  using M = MetricKind;
  static const std::array<ReferenceColumn, 6> columns{{
      {ModelKind::GradientBoosting,
       {339, 223, 517, 164},
       {{M::TPR, .603}, {M::TNR, .759}, {M::PPV, .674}, {M::NPV, .699}, {M::Accuracy, .689},
        {M::BA, .681}, {M::BI, .362}, {M::F1, .637}, {M::MCC, .367}, {M::Gmean, .677},
        {M::FowlkesMallows, .638}, {M::Markedness, .373}, {M::DiagOddsRatio, 4.792},
        {M::JaccardIndex, .467}, {M::CohensKappa, .366}, {M::AUC, .734}}},
      {ModelKind::LogisticRegression,
       {292, 270, 537, 144},
       {{M::TPR, .520}, {M::TNR, .789}, {M::PPV, .670}, {M::NPV, .665}, {M::Accuracy, .667},
        {M::BA, .654}, {M::BI, .308}, {M::F1, .585}, {M::MCC, .321}, {M::Gmean, .640},
        {M::FowlkesMallows, .590}, {M::Markedness, .335}, {M::DiagOddsRatio, 4.033},
        {M::JaccardIndex, .414}, {M::CohensKappa, .314}, {M::AUC, .718}}},
      {ModelKind::KNN,
       {296, 266, 521, 160},
       {{M::TPR, .527}, {M::TNR, .765}, {M::PPV, .649}, {M::NPV, .662}, {M::Accuracy, .657},
        {M::BA, .646}, {M::BI, .292}, {M::F1, .582}, {M::MCC, .301}, {M::Gmean, .635},
        {M::FowlkesMallows, .585}, {M::Markedness, .311}, {M::DiagOddsRatio, 3.623},
        {M::JaccardIndex, .410}, {M::CohensKappa, .297}, {M::AUC, .694}}},
      {ModelKind::LDA,
       {286, 276, 543, 138},
       {{M::TPR, .509}, {M::TNR, .797}, {M::PPV, .675}, {M::NPV, .663}, {M::Accuracy, .667},
        {M::BA, .653}, {M::BI, .306}, {M::F1, .580}, {M::MCC, .322}, {M::Gmean, .637},
        {M::FowlkesMallows, .586}, {M::Markedness, .338}, {M::DiagOddsRatio, 4.077},
        {M::JaccardIndex, .409}, {M::CohensKappa, .313}, {M::AUC, .717}}},
      {ModelKind::RandomForest,
       {311, 251, 543, 138},
       {{M::TPR, .553}, {M::TNR, .797}, {M::PPV, .693}, {M::NPV, .684}, {M::Accuracy, .687},
        {M::BA, .675}, {M::BI, .351}, {M::F1, .615}, {M::MCC, .363}, {M::Gmean, .664},
        {M::FowlkesMallows, .619}, {M::Markedness, .377}, {M::DiagOddsRatio, 4.875},
        {M::JaccardIndex, .444}, {M::CohensKappa, .357}, {M::AUC, .727}}},
      {ModelKind::RandomGuess,
       {267, 295, 386, 295},
       {{M::TPR, .475}, {M::TNR, .567}, {M::PPV, .475}, {M::NPV, .567}, {M::Accuracy, .525},
        {M::BA, .521}, {M::BI, .042}, {M::F1, .475}, {M::MCC, .042}, {M::Gmean, .519},
        {M::FowlkesMallows, .475}, {M::Markedness, .042}, {M::DiagOddsRatio, 1.184},
        {M::JaccardIndex, .312}, {M::CohensKappa, .042}, {M::AUC, .524}}},
  }};
  return columns;
}

/// Expected ranks, columns in reference_columns() order.
inline const std::map<MetricKind, std::array<double, 6>>& reference_ranks() {
  using M = MetricKind;
  static const std::map<MetricKind, std::array<double, 6>> ranks{
      {M::TP, {1, 4, 3, 5, 2, 6}},         {M::FN, {1, 4, 3, 5, 2, 6}},
      {M::TN, {5, 3, 4, 1.5, 1.5, 6}},     {M::FP, {5, 3, 4, 1.5, 1.5, 6}},
      {M::TPR, {1, 4, 3, 5, 2, 6}},        {M::TNR, {5, 3, 4, 1.5, 1.5, 6}},
      {M::PPV, {3, 4, 5, 2, 1, 6}},        {M::NPV, {1, 3, 5, 4, 2, 6}},
      {M::Accuracy, {1, 3.5, 5, 3.5, 2, 6}}, {M::BA, {1, 3, 5, 4, 2, 6}},
      {M::BI, {1, 3, 5, 4, 2, 6}},         {M::F1, {1, 3, 4, 5, 2, 6}},
      {M::MCC, {1, 4, 5, 3, 2, 6}},        {M::Gmean, {1, 3, 5, 4, 2, 6}},
      {M::FowlkesMallows, {1, 3, 5, 4, 2, 6}}, {M::Markedness, {2, 4, 5, 3, 1, 6}},
      {M::DiagOddsRatio, {2, 4, 5, 3, 1, 6}}, {M::JaccardIndex, {1, 3, 4, 5, 2, 6}},
      {M::CohensKappa, {1, 3, 5, 4, 2, 6}}, {M::AUC, {1, 3, 5, 4, 2, 6}},
  };
  return ranks;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("prevsim_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace prevsim::fixtures
