#include "klrfs/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "klrfs/error.hpp"

namespace klrfs {

namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  std::string out(s.substr(b, e - b + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
      cur.push_back(ch);
    } else if (ch == ',' && !quoted) {
      cells.push_back(Trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(Trim(cur));
  return cells;
}

std::string Where(const std::string& source, std::size_t line, std::size_t column) {
  return source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": ";
}

}  // namespace

DataMatrix ParseDataset(std::istream& in, const std::string& source, const CsvOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!Trim(line).empty()) {
      header = SplitCsvLine(line);
      break;
    }
  }
  if (header.empty()) Fail(ErrorKind::kData, source + ": empty file, expected a header row");
  if (!header.empty() && header[0].size() >= 3 && header[0].compare(0, 3, "\xEF\xBB\xBF") == 0) {
    header[0].erase(0, 3);
  }

  std::ptrdiff_t label_col = -1, id_col = -1;
  std::unordered_set<std::string> names;
  std::vector<std::size_t> feature_cols;
  DataMatrix data;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!names.insert(header[c]).second) {
      Fail(ErrorKind::kData, Where(source, line_no, c + 1) + "duplicate column name '" + header[c] + "'");
    }
    if (header[c] == options.label_column) {
      label_col = static_cast<std::ptrdiff_t>(c);
    } else if (!options.id_column.empty() && header[c] == options.id_column) {
      id_col = static_cast<std::ptrdiff_t>(c);
    } else {
      feature_cols.push_back(c);
      data.feature_names.push_back(header[c]);
    }
  }
  if (label_col < 0) Fail(ErrorKind::kData, source + ": missing label column '" + options.label_column + "'");
  if (!options.id_column.empty() && id_col < 0) {
    Fail(ErrorKind::kData, source + ": missing id column '" + options.id_column + "'");
  }
  if (feature_cols.empty()) Fail(ErrorKind::kData, source + ": no feature columns");

  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::string negative_class;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto cells = SplitCsvLine(line);
    if (cells.size() != header.size()) {
      Fail(ErrorKind::kData, Where(source, line_no, 1) + "expected " + std::to_string(header.size()) +
                                 " cells, found " + std::to_string(cells.size()));
    }
    const std::string& lab = cells[static_cast<std::size_t>(label_col)];
    if (lab != options.positive_class) {
      if (negative_class.empty()) {
        negative_class = lab;
      } else if (lab != negative_class) {
        Fail(ErrorKind::kData, Where(source, line_no, static_cast<std::size_t>(label_col) + 1) +
                                   "third class value '" + lab + "' (positive '" + options.positive_class +
                                   "', negative '" + negative_class + "')");
      }
    }
    data.labels.push_back(lab == options.positive_class ? 1 : -1);
    for (std::size_t c : feature_cols) {
      const std::string& cell = cells[c];
      double v = 0.0;
      const char* b = cell.data();
      const char* e = b + cell.size();
      auto [ptr, ec] = std::from_chars(b, e, v);
      if (cell.empty() || ec != std::errc() || ptr != e || !std::isfinite(v)) {
        Fail(ErrorKind::kData, Where(source, line_no, c + 1) + "non-numeric value '" + cell + "' in column '" +
                                   header[c] + "'");
      }
      values.push_back(v);
    }
  }
  const auto m = static_cast<Index>(data.labels.size());
  const auto n = static_cast<Index>(feature_cols.size());
  data.values.resize(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) data.values(i, j) = values[static_cast<std::size_t>(i * n + j)];
  }
  try {
    data.Validate();
  } catch (const Error& e) {
    Fail(ErrorKind::kData, source + ": " + e.what());
  }
  if (std::find(data.labels.begin(), data.labels.end(), 1) == data.labels.end()) {
    Fail(ErrorKind::kData, source + ": positive class '" + options.positive_class + "' does not occur in column '" +
                               options.label_column + "'");
  }
  if (negative_class.empty()) {
    Fail(ErrorKind::kData, source + ": column '" + options.label_column + "' holds a single class");
  }
  return data;
}

DataMatrix LoadDataset(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open dataset " + path);
  return ParseDataset(in, path, options);
}

void SaveDataset(const DataMatrix& data, const std::string& path, const std::string& label_column) {
  std::ofstream out(path);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path);
  out << label_column;
  for (Index j = 0; j < data.features(); ++j) {
    out << ',' << (data.feature_names.empty() ? "f" + std::to_string(j) : data.feature_names[static_cast<std::size_t>(j)]);
  }
  out << '\n';
  char buf[64];
  for (Index i = 0; i < data.samples(); ++i) {
    out << (data.labels[static_cast<std::size_t>(i)] == 1 ? "1" : "-1");
    for (Index j = 0; j < data.features(); ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), data.values(i, j));
      out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
  if (!out) Fail(ErrorKind::kIo, "write failed for " + path);
}

Scaler FitScaler(const Matrix& train) {
  if (train.rows() < 2) Fail(ErrorKind::kData, "scaler needs at least 2 training samples");
  Scaler s;
  s.mean = train.colwise().mean().transpose();
  s.scale.resize(train.cols());
  s.zero_variance.assign(static_cast<std::size_t>(train.cols()), false);
  for (Index j = 0; j < train.cols(); ++j) {
    const double var = (train.col(j).array() - s.mean(j)).square().mean();
    const double sd = std::sqrt(var);
    if (sd > 0.0) {
      s.scale(j) = sd;
    } else {
      s.scale(j) = 1.0;
      s.zero_variance[static_cast<std::size_t>(j)] = true;
    }
  }
  return s;
}

Matrix ApplyScaler(const Scaler& scaler, const Matrix& x) {
  if (x.cols() != scaler.mean.size()) Fail(ErrorKind::kData, "scaler feature count mismatch");
  Matrix out = x.rowwise() - scaler.mean.transpose();
  out.array().rowwise() /= scaler.scale.transpose().array();
  return out;
}

std::uint64_t DeriveSeed(std::uint64_t parent, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(parent);
  h = mix(h ^ a);
  h = mix(h ^ b);
  return mix(h ^ c);
}

namespace {

std::vector<std::vector<std::size_t>> ShuffledClasses(std::span<const int> labels, std::mt19937_64& rng) {
  std::vector<std::vector<std::size_t>> classes(2);
  for (std::size_t i = 0; i < labels.size(); ++i) classes[labels[i] == 1 ? 0 : 1].push_back(i);
  for (auto& c : classes) std::shuffle(c.begin(), c.end(), rng);
  return classes;
}

}  // namespace

SplitSpec StratifiedSplit(std::span<const int> labels, double train_fraction, std::uint64_t seed, int repeat) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    Fail(ErrorKind::kParameter, "train_fraction must lie in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  SplitSpec split;
  split.repeat = repeat;
  split.seed = seed;
  for (const auto& cls : ShuffledClasses(labels, rng)) {
    if (cls.size() < 2) Fail(ErrorKind::kDegenerate, "each class needs at least 2 samples to split");
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(cls.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, cls.size() - 1);
    split.train.insert(split.train.end(), cls.begin(), cls.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.insert(split.test.end(), cls.begin() + static_cast<std::ptrdiff_t>(n_train), cls.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<int> StratifiedFolds(std::span<const int> labels, int folds, std::uint64_t seed) {
  if (folds < 2) Fail(ErrorKind::kParameter, "cross-validation needs at least 2 folds");
  std::mt19937_64 rng(seed);
  std::vector<int> fold(labels.size(), 0);
  int offset = 0;
  for (const auto& cls : ShuffledClasses(labels, rng)) {
    if (static_cast<int>(cls.size()) < folds) {
      Fail(ErrorKind::kDegenerate, "a class has fewer samples than cross-validation folds");
    }
    for (std::size_t k = 0; k < cls.size(); ++k) fold[cls[k]] = static_cast<int>((k + static_cast<std::size_t>(offset)) % static_cast<std::size_t>(folds));
    offset += static_cast<int>(cls.size() % static_cast<std::size_t>(folds));
  }
  return fold;
}

SyntheticData GenerateSynthetic(Index samples, Index features, Index informative, double shift, std::uint64_t seed) {
  if (samples < 4) Fail(ErrorKind::kParameter, "synthetic data needs at least 4 samples");
  if (features < 1) Fail(ErrorKind::kParameter, "synthetic data needs at least 1 feature");
  if (informative < 0 || informative > features) {
    Fail(ErrorKind::kParameter, "informative count must lie in [0, features]");
  }
  if (!std::isfinite(shift)) Fail(ErrorKind::kParameter, "shift must be finite");

  std::mt19937_64 rng(seed);
  SyntheticData out;
  out.shift = shift;
  out.seed = seed;

  std::vector<int> labels(static_cast<std::size_t>(samples));
  for (Index i = 0; i < samples; ++i) labels[static_cast<std::size_t>(i)] = i < (samples + 1) / 2 ? 1 : -1;
  std::shuffle(labels.begin(), labels.end(), rng);

  std::vector<std::size_t> cols(static_cast<std::size_t>(features));
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
  std::shuffle(cols.begin(), cols.end(), rng);
  out.planted.assign(cols.begin(), cols.begin() + informative);
  std::sort(out.planted.begin(), out.planted.end());
  std::vector<char> is_planted(cols.size(), 0);
  for (std::size_t j : out.planted) is_planted[j] = 1;

  std::normal_distribution<double> normal(0.0, 1.0);
  out.data.values.resize(samples, features);
  for (Index i = 0; i < samples; ++i) {
    for (Index j = 0; j < features; ++j) {
      double v = normal(rng);
      if (is_planted[static_cast<std::size_t>(j)]) v += 0.5 * shift * labels[static_cast<std::size_t>(i)];
      out.data.values(i, j) = v;
    }
  }
  out.data.labels = std::move(labels);
  const int width = static_cast<int>(std::to_string(features - 1).size());
  for (Index j = 0; j < features; ++j) {
    std::ostringstream name;
    name << 'f' << std::setw(width) << std::setfill('0') << j;
    out.data.feature_names.push_back(name.str());
  }
  return out;
}

}  // namespace klrfs
