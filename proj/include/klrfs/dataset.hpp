#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "klrfs/kernel.hpp"

namespace klrfs {

struct CsvOptions {
  std::string label_column = "label";
  std::string positive_class = "1";
  std::string id_column;  // optional column to ignore
};

// CSV with a header row, samples as rows. The label column maps
// `positive_class` to +1 and the single other value present to -1; a third
// distinct value is an error. Errors carry line and column.
DataMatrix LoadDataset(const std::string& path, const CsvOptions& options = {});
DataMatrix ParseDataset(std::istream& in, const std::string& source_name, const CsvOptions& options = {});

// Writes values with round-trip precision; labels as "1" / "-1".
void SaveDataset(const DataMatrix& data, const std::string& path, const std::string& label_column = "label");

// Per-feature affine scaling learned on a training set.
struct Scaler {
  Vector mean;
  Vector scale;                      // population standard deviation, or 1
  std::vector<bool> zero_variance;   // columns left unscaled
};

Scaler FitScaler(const Matrix& train);
Matrix ApplyScaler(const Scaler& scaler, const Matrix& x);

struct SplitSpec {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  int repeat = 0;
  std::uint64_t seed = 0;
};

// Stratified random split: per class round(train_fraction * n_c) samples
// go to train, clamped so both sides keep at least one sample per class.
SplitSpec StratifiedSplit(std::span<const int> labels, double train_fraction, std::uint64_t seed, int repeat = 0);

// Stratified k-fold assignment; returns the fold id of every sample.
std::vector<int> StratifiedFolds(std::span<const int> labels, int folds, std::uint64_t seed);

// Deterministic child seed (splitmix64 mixing of the parent and tags).
std::uint64_t DeriveSeed(std::uint64_t parent, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

struct SyntheticData {
  DataMatrix data;
  std::vector<std::size_t> planted;  // informative column indices, ascending
  double shift = 0.0;
  std::uint64_t seed = 0;
};

// Balanced two-class Gaussian data. Informative columns have class means
// +-shift/2 (unit within-class deviation); the rest are pure N(0, 1) noise.
SyntheticData GenerateSynthetic(Index samples, Index features, Index informative, double shift, std::uint64_t seed);

}  // namespace klrfs
