#include "odml/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "odml/error.hpp"

namespace odml {

Dataset::Dataset(Matrix features, std::vector<int> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
    throw Error(ErrorKind::InvalidInput, "dataset: feature rows and labels differ in length");
  }
  if (features_.rows() < 2) {
    throw Error(ErrorKind::InvalidDataset, "dataset needs at least 2 examples");
  }
  if (features_.cols() < 1) {
    throw Error(ErrorKind::InvalidDataset, "dataset needs at least 1 feature");
  }
  if (!features_.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "dataset has non-finite features");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    class_index_[labels_[i]].push_back(static_cast<Index>(i));
  }
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
  Matrix f(static_cast<Index>(rows.size()), dim());
  std::vector<int> l(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    f.row(static_cast<Index>(i)) = features_.row(rows[i]);
    l[i] = labels_[static_cast<std::size_t>(rows[i])];
  }
  return Dataset(std::move(f), std::move(l));
}

Matrix Dataset::class_means() const {
  Matrix means(static_cast<Index>(class_index_.size()), dim());
  Index k = 0;
  for (const auto& [label, rows] : class_index_) {
    Vector sum = Vector::Zero(dim());
    for (Index r : rows) sum += features_.row(r).transpose();
    means.row(k++) = (sum / static_cast<double>(rows.size())).transpose();
  }
  return means;
}

void SynthSpec::validate() const {
  if (num_classes < 2) throw Error(ErrorKind::InvalidInput, "synth: need at least 2 classes");
  if (dim < 1) throw Error(ErrorKind::InvalidInput, "synth: dim must be >= 1");
  if (class_sizes.size() != static_cast<std::size_t>(num_classes)) {
    throw Error(ErrorKind::InvalidInput, "synth: class_sizes length must equal num_classes");
  }
  for (int s : class_sizes) {
    if (s < 1) throw Error(ErrorKind::InvalidInput, "synth: class sizes must be >= 1");
  }
  if (means && (means->rows() != num_classes || means->cols() != dim)) {
    throw Error(ErrorKind::InvalidInput, "synth: means must be num_classes x dim");
  }
  if (!(within_class_std >= 0.0)) {
    throw Error(ErrorKind::InvalidInput, "synth: within_class_std must be >= 0");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

Dataset parse_csv(const std::string& text, bool has_header) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t width = 0;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (has_header && line_no == 1) continue;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto cells = split_commas(view);
    if (cells.size() < 2) {
      throw Error(ErrorKind::ParseError, "row needs a label and at least one feature", line_no);
    }
    if (width == 0) {
      width = cells.size();
    } else if (cells.size() != width) {
      throw Error(ErrorKind::ParseError,
                  "ragged row: expected " + std::to_string(width) + " columns, got " +
                      std::to_string(cells.size()),
                  line_no);
    }
    int label = 0;
    {
      const auto cell = cells[0];
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), label);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw Error(ErrorKind::ParseError, "class id '" + std::string(cell) + "' is not an integer",
                    line_no);
      }
    }
    std::vector<double> feats(cells.size() - 1);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto cell = cells[c];
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw Error(ErrorKind::ParseError, "feature '" + std::string(cell) + "' is not numeric",
                    line_no);
      }
      feats[c - 1] = v;
    }
    rows.push_back(std::move(feats));
    labels.push_back(label);
  }
  if (rows.size() < 2) {
    throw Error(ErrorKind::InvalidDataset, "csv holds fewer than 2 examples");
  }
  Matrix f(static_cast<Index>(rows.size()), static_cast<Index>(width - 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j + 1 < width; ++j) {
      f(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  Dataset d(std::move(f), std::move(labels));
  if (d.num_classes() < 2) {
    throw Error(ErrorKind::InvalidDataset, "csv holds fewer than 2 classes");
  }
  return d;
}

Dataset load_csv(const std::string& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), has_header);
}

std::string to_csv(const Dataset& d) {
  std::string out;
  const Matrix& f = d.features();
  for (Index i = 0; i < d.size(); ++i) {
    out += std::to_string(d.labels()[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < d.dim(); ++j) {
      out += ',';
      append_double(out, f(i, j));
    }
    out += '\n';
  }
  return out;
}

void save_csv(const std::string& path, const Dataset& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  out << to_csv(d);
}

Dataset minmax_normalize(const Dataset& d) {
  Matrix f = d.features();
  for (Index j = 0; j < f.cols(); ++j) {
    const double lo = f.col(j).minCoeff();
    const double hi = f.col(j).maxCoeff();
    const double range = hi - lo;
    if (range > 0.0) {
      f.col(j) = ((f.col(j).array() - lo) / range).matrix();
    } else {
      f.col(j).setZero();
    }
  }
  return Dataset(std::move(f), d.labels());
}

Matrix PcaModel::project(const Matrix& features) const {
  return (features.rowwise() - mean.transpose()) * components;
}

Matrix PcaModel::back_project(const Matrix& reduced) const {
  return (reduced * components.transpose()).rowwise() + mean.transpose();
}

PcaModel fit_pca(const Dataset& d, Index target_dim) {
  if (target_dim < 1 || target_dim > std::min(d.size(), d.dim())) {
    throw Error(ErrorKind::InvalidInput, "pca: target_dim must lie in [1, min(N, D)]");
  }
  PcaModel model;
  model.mean = d.features().colwise().mean().transpose();
  const Matrix centered = d.features().rowwise() - model.mean.transpose();
  const SymMatrix cov(centered.transpose() * centered / static_cast<double>(d.size() - 1));
  const EigenDecomposition eig = sym_eig(cov);
  model.components = eig.vectors.leftCols(target_dim);
  model.variances = eig.values.head(target_dim);
  model.total_variance = cov.trace();
  return model;
}

Dataset pca_reduce(const Dataset& d, Index target_dim) {
  const PcaModel model = fit_pca(d, target_dim);
  return Dataset(model.project(d.features()), d.labels());
}

PairBatch sample_batch(const Dataset& d, int batch_size, Rng& rng) {
  if (batch_size < 2 || batch_size % 2 != 0) {
    throw Error(ErrorKind::InvalidInput, "batch_size must be even and >= 2");
  }
  if (d.num_classes() < 2) {
    throw Error(ErrorKind::InvalidDataset, "sampling pairs needs at least 2 classes");
  }
  std::vector<const std::vector<Index>*> classes;
  std::vector<double> same_weights;
  for (const auto& [label, rows] : d.class_index()) {
    const double n = static_cast<double>(rows.size());
    classes.push_back(&rows);
    same_weights.push_back(n * (n - 1.0) / 2.0);
  }
  if (std::all_of(same_weights.begin(), same_weights.end(), [](double w) { return w == 0.0; })) {
    throw Error(ErrorKind::InvalidDataset, "no class has two members; no similar pair exists");
  }

  const int half = batch_size / 2;
  const Index dim = d.dim();
  const Matrix& f = d.features();
  PairBatch batch;
  batch.similar_x.resize(half, dim);
  batch.similar_y.resize(half, dim);
  batch.dissimilar_x.resize(half, dim);
  batch.dissimilar_y.resize(half, dim);

  std::discrete_distribution<std::size_t> pick_class(same_weights.begin(), same_weights.end());
  for (int b = 0; b < half; ++b) {
    const auto& rows = *classes[pick_class(rng)];
    std::uniform_int_distribution<std::size_t> first(0, rows.size() - 1);
    std::uniform_int_distribution<std::size_t> second(0, rows.size() - 2);
    const std::size_t i = first(rng);
    std::size_t j = second(rng);
    if (j >= i) ++j;
    batch.similar_x.row(b) = f.row(rows[i]);
    batch.similar_y.row(b) = f.row(rows[j]);
  }

  // Ordered cross-class pairs are equally likely: pick the first row's class
  // with weight n_k (N - n_k), the row uniformly within it, then a partner
  // uniformly among rows of other classes.
  const auto& labels = d.labels();
  const double total = static_cast<double>(d.size());
  std::vector<double> cross_weights;
  for (const auto* rows : classes) {
    const double n = static_cast<double>(rows->size());
    cross_weights.push_back(n * (total - n));
  }
  std::discrete_distribution<std::size_t> pick_cross(cross_weights.begin(), cross_weights.end());
  std::uniform_int_distribution<Index> any_row(0, d.size() - 1);
  for (int b = 0; b < half; ++b) {
    const auto& rows = *classes[pick_cross(rng)];
    std::uniform_int_distribution<std::size_t> within(0, rows.size() - 1);
    const Index i = rows[within(rng)];
    Index j = any_row(rng);
    while (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(i)]) {
      j = any_row(rng);
    }
    batch.dissimilar_x.row(b) = f.row(i);
    batch.dissimilar_y.row(b) = f.row(j);
  }
  return batch;
}

PairBatch all_pairs(const Dataset& d) {
  const auto& labels = d.labels();
  const Index n = d.size();
  Index n_same = 0;
  for (const auto& [label, rows] : d.class_index()) {
    const auto k = static_cast<Index>(rows.size());
    n_same += k * (k - 1) / 2;
  }
  const Index n_diff = n * (n - 1) / 2 - n_same;
  PairBatch batch;
  batch.similar_x.resize(n_same, d.dim());
  batch.similar_y.resize(n_same, d.dim());
  batch.dissimilar_x.resize(n_diff, d.dim());
  batch.dissimilar_y.resize(n_diff, d.dim());
  Index s = 0;
  Index t = 0;
  const Matrix& f = d.features();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) {
        batch.similar_x.row(s) = f.row(i);
        batch.similar_y.row(s++) = f.row(j);
      } else {
        batch.dissimilar_x.row(t) = f.row(i);
        batch.dissimilar_y.row(t++) = f.row(j);
      }
    }
  }
  return batch;
}

Dataset oversample(const Dataset& d, Rng& rng) {
  std::size_t target = 0;
  for (const auto& [label, rows] : d.class_index()) target = std::max(target, rows.size());
  std::vector<Index> order(static_cast<std::size_t>(d.size()));
  for (Index i = 0; i < d.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  for (const auto& [label, rows] : d.class_index()) {
    std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
    for (std::size_t k = rows.size(); k < target; ++k) order.push_back(rows[pick(rng)]);
  }
  return d.subset(order);
}

Dataset synth_generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix means;
  if (spec.means) {
    means = *spec.means;
  } else {
    means.resize(spec.num_classes, spec.dim);
    for (int k = 0; k < spec.num_classes; ++k) {
      Vector v(spec.dim);
      do {
        for (int j = 0; j < spec.dim; ++j) v(j) = normal(rng);
      } while (v.norm() == 0.0);
      means.row(k) = (spec.sphere_radius / v.norm()) * v.transpose();
    }
  }
  Index total = 0;
  for (int s : spec.class_sizes) total += s;
  Matrix f(total, spec.dim);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(total));
  Index row = 0;
  for (int k = 0; k < spec.num_classes; ++k) {
    for (int i = 0; i < spec.class_sizes[static_cast<std::size_t>(k)]; ++i) {
      for (int j = 0; j < spec.dim; ++j) {
        f(row, j) = means(k, j) + spec.within_class_std * normal(rng);
      }
      labels.push_back(k);
      ++row;
    }
  }
  return Dataset(std::move(f), std::move(labels));
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& d, double test_fraction, Rng& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidInput, "test_fraction must lie in (0, 1)");
  }
  std::vector<Index> train;
  std::vector<Index> test;
  for (const auto& [label, rows] : d.class_index()) {
    std::vector<Index> shuffled = rows;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto n = static_cast<long>(shuffled.size());
    long n_test = std::lround(test_fraction * static_cast<double>(n));
    if (n >= 2) n_test = std::clamp(n_test, 1L, n - 1);
    else n_test = 0;
    test.insert(test.end(), shuffled.begin(), shuffled.begin() + n_test);
    train.insert(train.end(), shuffled.begin() + n_test, shuffled.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {d.subset(train), d.subset(test)};
}

}  // namespace odml
