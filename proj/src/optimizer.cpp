#include "odml/optimizer.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "odml/error.hpp"

namespace odml {

void TrainConfig::validate() const {
  if (!(stepsize > 0.0)) throw Error(ErrorKind::InvalidInput, "stepsize must be > 0");
  if (batch_size < 2 || batch_size % 2 != 0) {
    throw Error(ErrorKind::InvalidInput, "batch_size must be even and >= 2");
  }
  if (!(margin > 0.0)) throw Error(ErrorKind::InvalidInput, "margin must be > 0");
  if (max_epochs < 0) throw Error(ErrorKind::InvalidInput, "max_epochs must be >= 0");
  if (!(rel_tol >= 0.0)) throw Error(ErrorKind::InvalidInput, "rel_tol must be >= 0");
  if (npv < 1) throw Error(ErrorKind::InvalidInput, "npv must be >= 1");
  if (restarts < 1) throw Error(ErrorKind::InvalidInput, "restarts must be >= 1");
  if (iters_per_epoch < 0) throw Error(ErrorKind::InvalidInput, "iters_per_epoch must be >= 0");
  if (probe_pairs < 2 || probe_pairs % 2 != 0) {
    throw Error(ErrorKind::InvalidInput, "probe_pairs must be even and >= 2");
  }
  regularizer.validate();
}

std::string TrainLog::to_csv() const {
  std::string out = "epoch,objective,regularizer_value,rank\n";
  for (const auto& e : epochs) {
    out += std::to_string(e.epoch) + "," + format_real(e.objective) + "," +
           format_real(e.regularizer_value) + "," + std::to_string(e.rank) + "\n";
  }
  return out;
}

namespace {

void check_batch(const PairBatch& batch, Index dim) {
  if (batch.num_similar() == 0 || batch.num_dissimilar() == 0) {
    throw Error(ErrorKind::InvalidBatch, "batch needs both similar and dissimilar pairs");
  }
  if (batch.similar_x.cols() != dim || batch.dissimilar_x.cols() != dim) {
    throw Error(ErrorKind::InvalidInput, "batch feature dimension does not match the metric");
  }
}

Vector quad_forms(const Matrix& z, const Matrix& m) {
  return (z * m).cwiseProduct(z).rowwise().sum();
}

double loss_from_distances(const Vector& sim, const Vector& dis, double margin) {
  double hinge = 0.0;
  for (Index i = 0; i < dis.size(); ++i) hinge += std::max(0.0, margin - dis(i));
  return sim.sum() / static_cast<double>(sim.size()) + hinge / static_cast<double>(dis.size());
}

// Rows of the dissimilar difference matrix with margin - d > 0.
Matrix active_rows(const Matrix& z, const Vector& dist, double margin) {
  Index count = 0;
  for (Index i = 0; i < dist.size(); ++i) {
    if (margin - dist(i) > 0.0) ++count;
  }
  Matrix out(count, z.cols());
  Index r = 0;
  for (Index i = 0; i < dist.size(); ++i) {
    if (margin - dist(i) > 0.0) out.row(r++) = z.row(i);
  }
  return out;
}

}  // namespace

double mdml_loss(const SymMatrix& m, const PairBatch& batch, double margin) {
  check_batch(batch, m.dim());
  const Matrix zs = batch.similar_x - batch.similar_y;
  const Matrix zd = batch.dissimilar_x - batch.dissimilar_y;
  return loss_from_distances(quad_forms(zs, m.matrix()), quad_forms(zd, m.matrix()), margin);
}

SymMatrix mdml_subgradient(const SymMatrix& m, const PairBatch& batch, double margin) {
  check_batch(batch, m.dim());
  const Matrix zs = batch.similar_x - batch.similar_y;
  const Matrix zd = batch.dissimilar_x - batch.dissimilar_y;
  const Matrix za = active_rows(zd, quad_forms(zd, m.matrix()), margin);
  Matrix g = zs.transpose() * zs / static_cast<double>(zs.rows());
  if (za.rows() > 0) g -= za.transpose() * za / static_cast<double>(zd.rows());
  return SymMatrix(g);
}

double pdml_loss(const Matrix& a, const PairBatch& batch, double margin) {
  check_batch(batch, a.cols());
  const Matrix ps = (batch.similar_x - batch.similar_y) * a.transpose();
  const Matrix pd = (batch.dissimilar_x - batch.dissimilar_y) * a.transpose();
  return loss_from_distances(ps.rowwise().squaredNorm(), pd.rowwise().squaredNorm(), margin);
}

Matrix pdml_subgradient(const Matrix& a, const PairBatch& batch, double margin) {
  check_batch(batch, a.cols());
  const Matrix zs = batch.similar_x - batch.similar_y;
  const Matrix zd = batch.dissimilar_x - batch.dissimilar_y;
  const Vector dist = (zd * a.transpose()).rowwise().squaredNorm();
  const Matrix za = active_rows(zd, dist, margin);
  Matrix c = zs.transpose() * zs / static_cast<double>(zs.rows());
  if (za.rows() > 0) c -= za.transpose() * za / static_cast<double>(zd.rows());
  return 2.0 * a * c;
}

double mdml_objective(const MahalanobisMetric& m, const PairBatch& batch,
                      const TrainConfig& config) {
  const double reg = config.regularizer.gamma == 0.0
                         ? 0.0
                         : config.regularizer.gamma * omega_convex(config.regularizer, m);
  return mdml_loss(m.matrix(), batch, config.margin) + reg;
}

double pdml_objective(const Matrix& a, const PairBatch& batch, const TrainConfig& config) {
  const double reg = config.regularizer.gamma == 0.0
                         ? 0.0
                         : config.regularizer.gamma *
                               omega_nonconvex(config.regularizer.family, a);
  return pdml_loss(a, batch, config.margin) + reg;
}

namespace {

void check_training_inputs(const Dataset& data, const TrainConfig& config, Form form) {
  config.validate();
  if (config.regularizer.form != form) {
    throw Error(ErrorKind::InvalidInput,
                form == Form::ConvexOnM ? "MDML training needs a convex regularizer (CSFN/CVND/CLDD)"
                                        : "PDML training needs a nonconvex regularizer (SFN/VND/LDD)");
  }
  if (data.num_classes() < 2) {
    throw Error(ErrorKind::InvalidDataset, "training needs at least 2 classes");
  }
  if (form == Form::NonconvexOnA && config.regularizer.family != Family::SFN &&
      config.npv > data.dim()) {
    throw Error(ErrorKind::InvalidInput, "npv " + std::to_string(config.npv) +
                                             " exceeds the feature dimension " +
                                             std::to_string(data.dim()) +
                                             "; AA^T would be singular");
  }
}

int iterations_per_epoch(const Dataset& data, const TrainConfig& config) {
  if (config.full_batch) return 1;
  if (config.iters_per_epoch > 0) return config.iters_per_epoch;
  return std::max<int>(1, static_cast<int>(data.size() / config.batch_size));
}

PairBatch make_probe(const Dataset& data, const TrainConfig& config) {
  if (config.full_batch) return all_pairs(data);
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32), 0x9e3779b9u};
  Rng probe_rng(seq);
  return sample_batch(data, config.probe_pairs, probe_rng);
}

Rng stream(std::uint64_t seed, std::uint32_t a, std::uint32_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), a, b};
  return Rng(seq);
}

bool converged(double prev, double cur, double rel_tol) {
  if (rel_tol <= 0.0) return false;
  return std::abs(cur - prev) < rel_tol * std::abs(prev) || cur == prev;
}

double step_at(const TrainConfig& config, long t) {
  return config.decay_stepsize ? config.stepsize / std::sqrt(static_cast<double>(t))
                               : config.stepsize;
}

}  // namespace

MdmlResult train_mdml(const Dataset& data, const TrainConfig& config) {
  check_training_inputs(data, config, Form::ConvexOnM);
  const Index dim = data.dim();
  const PairBatch probe = make_probe(data, config);
  Rng rng = stream(config.seed, 1, 0);

  MahalanobisMetric m = MahalanobisMetric::identity(dim);
  TrainLog log;
  auto record = [&](int epoch) {
    const double reg = omega_convex(config.regularizer, m);
    const double obj = mdml_loss(m.matrix(), probe, config.margin) +
                       (config.regularizer.gamma == 0.0 ? 0.0 : config.regularizer.gamma * reg);
    log.epochs.push_back({epoch, obj, reg, count_above(m.eigen().values, kDefaultRankTol)});
    return obj;
  };
  double prev = record(0);

  const int iters = iterations_per_epoch(data, config);
  long t = 0;
  int epochs_run = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (int it = 0; it < iters; ++it) {
      ++t;
      const double step = step_at(config, t);
      const SymMatrix grad = config.full_batch
                                 ? mdml_subgradient(m.matrix(), probe, config.margin)
                                 : mdml_subgradient(m.matrix(),
                                                    sample_batch(data, config.batch_size, rng),
                                                    config.margin);
      const SymMatrix m_tilde(m.matrix().matrix() - step * grad.matrix());
      m = prox_matrix(config.regularizer, m_tilde, step);
    }
    epochs_run = epoch;
    const double cur = record(epoch);
    if (converged(prev, cur, config.rel_tol)) break;
    prev = cur;
  }
  m.provenance.config_hash = config_hash(config);
  m.provenance.epochs_run = epochs_run;
  m.provenance.final_objective = log.epochs.back().objective;
  return MdmlResult{std::move(m), std::move(log)};
}

PdmlResult train_pdml(const Dataset& data, const TrainConfig& config) {
  check_training_inputs(data, config, Form::NonconvexOnA);
  const Index dim = data.dim();
  const Index rows = config.npv;
  const PairBatch probe = make_probe(data, config);
  const int iters = iterations_per_epoch(data, config);
  const double gamma = config.regularizer.gamma;
  const Family family = config.regularizer.family;

  std::vector<double> finals;
  Matrix best_a;
  TrainLog best_log;
  int best_epochs = 0;
  double best_obj = std::numeric_limits<double>::infinity();

  for (int r = 0; r < config.restarts; ++r) {
    Rng rng = stream(config.seed, 2, static_cast<std::uint32_t>(r));
    std::normal_distribution<double> init(0.0, 1.0 / std::sqrt(static_cast<double>(dim)));
    Matrix a(rows, dim);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < dim; ++j) a(i, j) = init(rng);
    }
    TrainLog log;
    auto record = [&](int epoch) {
      const double reg = omega_nonconvex(family, a);
      const double obj = pdml_loss(a, probe, config.margin) + (gamma == 0.0 ? 0.0 : gamma * reg);
      const EigenDecomposition eig = sym_eig(SymMatrix(a * a.transpose()));
      log.epochs.push_back({epoch, obj, reg, count_above(eig.values, kDefaultRankTol)});
      return obj;
    };
    double prev = record(0);
    long t = 0;
    int epochs_run = 0;
    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
      for (int it = 0; it < iters; ++it) {
        ++t;
        Matrix grad = config.full_batch
                          ? pdml_subgradient(a, probe, config.margin)
                          : pdml_subgradient(a, sample_batch(data, config.batch_size, rng),
                                             config.margin);
        if (gamma != 0.0) grad += gamma * grad_nonconvex(family, a);
        a -= step_at(config, t) * grad;
      }
      epochs_run = epoch;
      const double cur = record(epoch);
      if (converged(prev, cur, config.rel_tol)) break;
      prev = cur;
    }
    const double final_obj = log.epochs.back().objective;
    finals.push_back(final_obj);
    if (final_obj < best_obj) {
      best_obj = final_obj;
      best_a = a;
      best_log = std::move(log);
      best_epochs = epochs_run;
    }
  }
  ProjectionMatrix projection(best_a);
  projection.provenance.config_hash = config_hash(config);
  projection.provenance.epochs_run = best_epochs;
  projection.provenance.final_objective = best_obj;
  return PdmlResult{std::move(projection), std::move(best_log), std::move(finals)};
}

std::string config_hash(const TrainConfig& c) {
  std::string canon;
  auto add = [&canon](double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    canon.append(buf, res.ptr);
    canon += ';';
  };
  add(c.stepsize);
  add(c.batch_size);
  add(c.margin);
  add(c.max_epochs);
  add(c.rel_tol);
  canon += std::to_string(c.seed) + ';';
  canon += c.regularizer.name() + ';';
  add(c.regularizer.gamma);
  add(c.regularizer.epsilon);
  add(c.npv);
  add(c.restarts);
  add(c.iters_per_epoch);
  add(c.full_batch ? 1 : 0);
  add(c.decay_stepsize ? 1 : 0);
  add(c.probe_pairs);

  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace odml
