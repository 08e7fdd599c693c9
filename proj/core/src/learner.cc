/*
 * Copyright 2026 The jbal Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "jbal/learner.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "jbal/errors.h"
#include "jbal/mmd.h"
#include "jbal/rng.h"

namespace jbal {
namespace {

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t)) - y t, stable for large |t|.
double CrossEntropy(double t, int y) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))) - y * t;
}

std::string Format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

RowMatrix Rows(const RowMatrix& x, std::span<const std::size_t> rows) {
  RowMatrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

struct Forward {
  RowMatrix pre;     // hidden pre-activations (two-layer model only)
  RowMatrix hidden;  // hidden activations
  Eigen::VectorXd logits;
};

Forward Run(const ModelParams& params, const RowMatrix& x) {
  Forward f;
  if (params.layers.size() == 1) {
    const Layer& l = params.layers[0];
    f.logits = (x * l.weight.transpose()).col(0).array() + l.bias(0);
    return f;
  }
  const Layer& l1 = params.layers[0];
  const Layer& l2 = params.layers[1];
  f.pre = x * l1.weight.transpose();
  f.pre.rowwise() += l1.bias.transpose();
  f.hidden = params.activation == Activation::kRelu ? RowMatrix(f.pre.cwiseMax(0.0)) : f.pre;
  f.logits = (f.hidden * l2.weight.transpose()).col(0).array() + l2.bias(0);
  return f;
}

ModelParams ZerosLike(const ModelParams& p) {
  ModelParams out = p;
  for (Layer& l : out.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
  return out;
}

void CheckFinite(double v, const char* component) {
  if (!std::isfinite(v)) {
    throw NumericsError(std::string("non-finite ") + component + " in training loss");
  }
}

}  // namespace

const char* ActivationName(Activation a) { return a == Activation::kRelu ? "relu" : "identity"; }

const char* ArchitectureName(Architecture a) { return a == Architecture::kMlp ? "mlp" : "linear"; }

Architecture ParseArchitecture(const std::string& name) {
  if (name == "linear") return Architecture::kLinear;
  if (name == "mlp") return Architecture::kMlp;
  throw ArgumentError("unknown architecture '" + name + "'");
}

const char* MmdModeName(MmdMode m) {
  switch (m) {
    case MmdMode::kMarginal:
      return "marginal";
    case MmdMode::kConditional:
      return "conditional";
    case MmdMode::kNone:
      break;
  }
  return "none";
}

MmdMode ParseMmdMode(const std::string& name) {
  if (name == "none") return MmdMode::kNone;
  if (name == "marginal") return MmdMode::kMarginal;
  if (name == "conditional") return MmdMode::kConditional;
  throw ArgumentError("unknown MMD mode '" + name + "'");
}

std::size_t ModelParams::input_dim() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weight.cols());
}

void ModelParams::Validate(std::size_t dim) const {
  if (layers.empty() || layers.size() > 2) throw ArgumentError("model needs one or two layers");
  std::size_t in = dim;
  for (const Layer& l : layers) {
    if (static_cast<std::size_t>(l.weight.cols()) != in || l.bias.size() != l.weight.rows() ||
        l.weight.rows() == 0) {
      throw ArgumentError("model layer shapes do not chain");
    }
    in = static_cast<std::size_t>(l.weight.rows());
  }
  if (in != 1) throw ArgumentError("model output must be a single logit");
}

std::size_t ModelParams::NumParameters() const {
  std::size_t n = 0;
  for (const Layer& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Eigen::VectorXd ModelParams::Flatten() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(NumParameters()));
  Eigen::Index at = 0;
  for (const Layer& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out(at++) = l.weight(r, c);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out(at++) = l.bias(r);
  }
  return out;
}

void ModelParams::Unflatten(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != NumParameters()) {
    throw ArgumentError("flat parameter vector has the wrong length");
  }
  Eigen::Index at = 0;
  for (Layer& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat(at++);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = flat(at++);
  }
}

bool operator==(const ModelParams& a, const ModelParams& b) {
  if (a.activation != b.activation || a.layers.size() != b.layers.size()) return false;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    const Layer& x = a.layers[i];
    const Layer& y = b.layers[i];
    if (x.weight.rows() != y.weight.rows() || x.weight.cols() != y.weight.cols() ||
        x.weight != y.weight || x.bias != y.bias) {
      return false;
    }
  }
  return true;
}

ModelParams InitModel(Architecture arch, std::size_t input_dim, std::size_t hidden,
                      std::uint64_t seed) {
  if (input_dim == 0) throw ArgumentError("input dimension must be positive");
  Rng rng(seed);
  auto gaussian = [&rng](Eigen::Index rows, Eigen::Index cols, double sd) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = sd * rng.Normal();
    }
    return m;
  };
  const auto d = static_cast<Eigen::Index>(input_dim);
  ModelParams p;
  if (arch == Architecture::kLinear) {
    p.activation = Activation::kIdentity;
    p.layers.push_back({gaussian(1, d, 1.0 / std::sqrt(static_cast<double>(d))),
                        Eigen::VectorXd::Zero(1)});
    return p;
  }
  if (hidden == 0) throw ArgumentError("hidden width must be positive");
  const auto h = static_cast<Eigen::Index>(hidden);
  p.activation = Activation::kRelu;
  p.layers.push_back({gaussian(h, d, std::sqrt(2.0 / static_cast<double>(d))),
                      Eigen::VectorXd::Zero(h)});
  p.layers.push_back({gaussian(1, h, 1.0 / std::sqrt(static_cast<double>(h))),
                      Eigen::VectorXd::Zero(1)});
  return p;
}

Eigen::VectorXd Logits(const ModelParams& params, const RowMatrix& x) {
  params.Validate(static_cast<std::size_t>(x.cols()));
  return Run(params, x).logits;
}

Eigen::VectorXd Scores(const ModelParams& params, const RowMatrix& x) {
  return Logits(params, x).unaryExpr([](double t) { return Sigmoid(t); });
}

RowMatrix Representation(const ModelParams& params, const RowMatrix& x) {
  params.Validate(static_cast<std::size_t>(x.cols()));
  Forward f = Run(params, x);
  if (params.layers.size() == 2) return f.hidden;
  return RowMatrix(f.logits);
}

void TrainSpec::Validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ArgumentError("learning rate must be finite and non-negative");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ArgumentError("momentum must lie in [0, 1)");
  if (!(l2 >= 0.0)) throw ArgumentError("l2 must be non-negative");
  if (batch_size == 0) throw ArgumentError("batch size must be positive");
  if (arch == Architecture::kMlp && hidden == 0) throw ArgumentError("hidden width must be positive");
  if (!(mmd.strength >= 0.0) || !std::isfinite(mmd.strength)) {
    throw ArgumentError("MMD strength must be finite and non-negative");
  }
  if (!(mmd.bandwidth >= 0.0) || !std::isfinite(mmd.bandwidth)) {
    throw ArgumentError("MMD bandwidth must be positive (0 selects the heuristic)");
  }
}

LossValue ComputeLoss(const ModelParams& params, const Dataset& data,
                      std::span<const std::size_t> rows, const TrainSpec& spec) {
  if (rows.empty()) throw ArgumentError("loss needs a nonempty batch");
  params.Validate(data.dim());
  const bool penalized = spec.mmd.mode != MmdMode::kNone && spec.mmd.strength > 0.0;
  if (penalized && !(spec.mmd.bandwidth > 0.0)) {
    throw ArgumentError("MMD bandwidth must be resolved before computing the loss");
  }
  const RowMatrix x = Rows(data.x, rows);
  const Forward f = Run(params, x);
  const auto m = static_cast<Eigen::Index>(rows.size());
  const bool mlp = params.layers.size() == 2;

  LossValue out;
  out.gradient = ZerosLike(params);
  Eigen::VectorXd dlogit = Eigen::VectorXd::Zero(m);
  RowMatrix dhidden;
  if (mlp) dhidden = RowMatrix::Zero(f.hidden.rows(), f.hidden.cols());

  double total = 0.0;
  for (std::size_t r : rows) total += data.weights[r];
  if (total > 0.0) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::size_t r = rows[static_cast<std::size_t>(i)];
      const double w = data.weights[r] / total;
      out.ce += w * CrossEntropy(f.logits(i), data.y[r]);
      dlogit(i) += w * (Sigmoid(f.logits(i)) - data.y[r]);
    }
  }
  CheckFinite(out.ce, "cross-entropy");

  for (std::size_t li = 0; li < params.layers.size(); ++li) {
    const Eigen::MatrixXd& w = params.layers[li].weight;
    out.l2 += spec.l2 * w.squaredNorm();
    out.gradient.layers[li].weight += 2.0 * spec.l2 * w;
  }
  CheckFinite(out.l2, "l2 penalty");

  if (penalized) {
    const bool on_rep = spec.mmd.on_representation;
    RowMatrix points;
    Eigen::VectorXd scores;
    if (on_rep) {
      points = mlp ? f.hidden : RowMatrix(f.logits);
    } else {
      scores = f.logits.unaryExpr([](double t) { return Sigmoid(t); });
      points = RowMatrix(scores);
    }
    RowMatrix dpoints = RowMatrix::Zero(points.rows(), points.cols());
    auto term = [&](const std::vector<Eigen::Index>& ga, const std::vector<Eigen::Index>& gb) {
      auto mass = [&](const std::vector<Eigen::Index>& g) {
        std::size_t positive = 0;
        for (Eigen::Index i : g) positive += data.weights[rows[static_cast<std::size_t>(i)]] > 0.0;
        return positive;
      };
      if (mass(ga) < 2 || mass(gb) < 2) {
        ++out.skipped_strata;
        return;
      }
      auto gather = [&](const std::vector<Eigen::Index>& g, RowMatrix& p, std::vector<double>& w) {
        p.resize(static_cast<Eigen::Index>(g.size()), points.cols());
        w.resize(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
          p.row(static_cast<Eigen::Index>(k)) = points.row(g[k]);
          w[k] = data.weights[rows[static_cast<std::size_t>(g[k])]];
        }
      };
      RowMatrix pa, pb;
      std::vector<double> wa, wb;
      gather(ga, pa, wa);
      gather(gb, pb, wb);
      const MmdGradient g = Mmd2WithGradient(pa, wa, pb, wb, spec.mmd.bandwidth);
      out.mmd += spec.mmd.strength * g.value;
      for (std::size_t k = 0; k < ga.size(); ++k) {
        dpoints.row(ga[k]) += spec.mmd.strength * g.grad_a.row(static_cast<Eigen::Index>(k));
      }
      for (std::size_t k = 0; k < gb.size(); ++k) {
        dpoints.row(gb[k]) += spec.mmd.strength * g.grad_b.row(static_cast<Eigen::Index>(k));
      }
    };
    if (spec.mmd.mode == MmdMode::kMarginal) {
      std::vector<Eigen::Index> g[2];
      for (Eigen::Index i = 0; i < m; ++i) g[data.z[rows[static_cast<std::size_t>(i)]]].push_back(i);
      term(g[0], g[1]);
    } else {
      for (int y = 0; y < 2; ++y) {
        std::vector<Eigen::Index> g[2];
        for (Eigen::Index i = 0; i < m; ++i) {
          const std::size_t r = rows[static_cast<std::size_t>(i)];
          if (data.y[r] == y) g[data.z[r]].push_back(i);
        }
        term(g[0], g[1]);
      }
    }
    CheckFinite(out.mmd, "MMD penalty");
    if (!on_rep) {
      for (Eigen::Index i = 0; i < m; ++i) {
        dlogit(i) += dpoints(i, 0) * scores(i) * (1.0 - scores(i));
      }
    } else if (mlp) {
      dhidden += dpoints;
    } else {
      dlogit += dpoints.col(0);
    }
  }

  if (!mlp) {
    out.gradient.layers[0].weight += (dlogit.transpose() * x);
    out.gradient.layers[0].bias(0) += dlogit.sum();
  } else {
    const Layer& l2 = params.layers[1];
    out.gradient.layers[1].weight += dlogit.transpose() * f.hidden;
    out.gradient.layers[1].bias(0) += dlogit.sum();
    dhidden += dlogit * l2.weight;
    if (params.activation == Activation::kRelu) {
      dhidden = dhidden.cwiseProduct(RowMatrix((f.pre.array() > 0.0).cast<double>()));
    }
    out.gradient.layers[0].weight += dhidden.transpose() * x;
    out.gradient.layers[0].bias += dhidden.colwise().sum().transpose();
  }
  out.value = out.ce + out.l2 + out.mmd;
  CheckFinite(out.value, "total");
  return out;
}

LossValue ComputeLoss(const ModelParams& params, const Dataset& data, const TrainSpec& spec) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return ComputeLoss(params, data, rows, spec);
}

TrainResult Train(const Dataset& data, const TrainSpec& spec) {
  spec.Validate();
  return Train(data, spec, InitModel(spec.arch, data.dim(), spec.hidden, DeriveSeed(spec.seed, 0)));
}

TrainResult Train(const Dataset& data, const TrainSpec& spec, ModelParams init) {
  spec.Validate();
  data.Validate();
  if (data.size() == 0) throw ArgumentError("training data is empty");
  init.Validate(data.dim());
  TrainResult result;
  result.params = std::move(init);
  TrainSpec resolved = spec;

  const Rng shuffle_root(DeriveSeed(spec.seed, 1));
  std::vector<std::size_t> order(data.size());
  auto shuffled = [&](std::size_t epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = shuffle_root.Split(epoch);
    rng.Shuffle(order);
  };
  auto batches = [&](auto&& visit) {
    for (std::size_t at = 0; at < order.size(); at += spec.batch_size) {
      const std::size_t end = std::min(order.size(), at + spec.batch_size);
      visit(std::span<const std::size_t>(order.data() + at, end - at));
    }
  };

  shuffled(1);
  const bool penalized = spec.mmd.mode != MmdMode::kNone && spec.mmd.strength > 0.0;
  if (penalized && spec.mmd.bandwidth == 0.0) {
    const std::size_t first = std::min(order.size(), spec.batch_size);
    const RowMatrix x = Rows(data.x, std::span<const std::size_t>(order.data(), first));
    RowMatrix points = spec.mmd.on_representation
                           ? Representation(result.params, x)
                           : RowMatrix(Scores(result.params, x));
    resolved.mmd.bandwidth = MedianHeuristic(points);
  }
  result.bandwidth = resolved.mmd.bandwidth;

  auto record = [&](std::size_t epoch, bool update, Eigen::VectorXd& velocity) {
    EpochLog log;
    log.epoch = epoch;
    std::size_t count = 0;
    batches([&](std::span<const std::size_t> rows) {
      LossValue lv = ComputeLoss(result.params, data, rows, resolved);
      log.loss += lv.value;
      log.ce += lv.ce;
      log.l2 += lv.l2;
      log.mmd += lv.mmd;
      log.skipped_strata += lv.skipped_strata;
      ++count;
      if (!update) return;
      const Eigen::VectorXd g = lv.gradient.Flatten();
      velocity = spec.momentum * velocity + g;
      Eigen::VectorXd p = result.params.Flatten();
      p -= spec.learning_rate * (g + spec.momentum * velocity);
      if (!p.allFinite()) throw NumericsError("parameters diverged during training");
      result.params.Unflatten(p);
    });
    log.loss /= static_cast<double>(count);
    log.ce /= static_cast<double>(count);
    log.l2 /= static_cast<double>(count);
    log.mmd /= static_cast<double>(count);
    result.log.push_back(log);
  };

  Eigen::VectorXd velocity = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(result.params.NumParameters()));
  record(0, false, velocity);
  for (std::size_t epoch = 1; epoch <= spec.epochs; ++epoch) {
    shuffled(epoch);
    record(epoch, true, velocity);
  }
  return result;
}

double ProbeEncoding(const ModelParams& params, const Dataset& data, ProbeTarget target,
                     std::uint64_t seed) {
  data.Validate();
  if (data.size() == 0) throw ArgumentError("probe data is empty");
  if (target == ProbeTarget::kV && !data.v) throw ArgumentError("dataset has no V column");
  const std::vector<int>& t = target == ProbeTarget::kZ ? data.z : *data.v;
  if (std::all_of(t.begin(), t.end(), [&](int s) { return s == t.front(); })) {
    throw DegenerateTarget("probe target has a single class");
  }
  const RowMatrix phi = Representation(params, data.x);
  const std::size_t n = data.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.Shuffle(perm);
  const std::size_t n_train = (n * 7) / 10;
  if (n_train == 0 || n_train == n) throw SampleSizeError("probe split leaves an empty side");

  const Eigen::Index k = phi.cols() + 1;
  // Standardized features plus an intercept column.
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(phi.cols());
  Eigen::RowVectorXd sd = Eigen::RowVectorXd::Zero(phi.cols());
  for (std::size_t i = 0; i < n_train; ++i) mean += phi.row(static_cast<Eigen::Index>(perm[i]));
  mean /= static_cast<double>(n_train);
  for (std::size_t i = 0; i < n_train; ++i) {
    sd += (phi.row(static_cast<Eigen::Index>(perm[i])) - mean).array().square().matrix();
  }
  sd = (sd / static_cast<double>(n_train)).cwiseSqrt();
  for (Eigen::Index j = 0; j < sd.size(); ++j) {
    if (!(sd(j) > 1e-12)) sd(j) = 1.0;
  }
  auto features = [&](std::size_t r) {
    Eigen::VectorXd f(k);
    f.head(phi.cols()) =
        ((phi.row(static_cast<Eigen::Index>(r)) - mean).array() / sd.array()).transpose();
    f(k - 1) = 1.0;
    return f;
  };

  // Ridge-regularized Newton iterations for the logistic likelihood.
  constexpr double kRidge = 1e-3;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::MatrixXd h = kRidge * Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd g = kRidge * beta;
    for (std::size_t i = 0; i < n_train; ++i) {
      const std::size_t r = perm[i];
      const Eigen::VectorXd f = features(r);
      const double p = Sigmoid(f.dot(beta));
      const double w = data.weights[r];
      g += w * (p - t[r]) * f;
      h += w * p * (1.0 - p) * f * f.transpose();
    }
    const Eigen::VectorXd step = h.ldlt().solve(g);
    if (!step.allFinite()) break;
    beta -= step;
    if (step.norm() < 1e-10) break;
  }
  double correct = 0.0;
  double mass = 0.0;
  for (std::size_t i = n_train; i < n; ++i) {
    const std::size_t r = perm[i];
    const int pred = features(r).dot(beta) > 0.0 ? 1 : 0;
    correct += data.weights[r] * (pred == t[r] ? 1.0 : 0.0);
    mass += data.weights[r];
  }
  if (!(mass > 0.0)) throw SampleSizeError("probe test split has no weight");
  return correct / mass;
}

std::string SerializeModel(const ModelParams& params) {
  std::string out = "jbal-model 1\n";
  out += std::string("activation ") + ActivationName(params.activation) + "\n";
  out += "layers " + std::to_string(params.layers.size()) + "\n";
  for (const Layer& l : params.layers) {
    out += "weight " + std::to_string(l.weight.rows()) + " " + std::to_string(l.weight.cols()) + "\n";
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
        out += (c ? " " : "") + Format(l.weight(r, c));
      }
      out += "\n";
    }
    out += "bias " + std::to_string(l.bias.size()) + "\n";
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out += (r ? " " : "") + Format(l.bias(r));
    out += "\n";
  }
  return out;
}

ModelParams ParseModel(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  auto expect = [&](const char* token) {
    if (!(in >> word) || word != token) {
      throw ParseError(std::string("model document: expected '") + token + "'");
    }
  };
  auto number = [&]() {
    if (!(in >> word)) throw ParseError("model document truncated");
    try {
      std::size_t used = 0;
      const double v = std::stod(word, &used);
      if (used != word.size()) throw std::invalid_argument(word);
      return v;
    } catch (const std::exception&) {
      throw ParseError("model document: bad number '" + word + "'");
    }
  };
  auto count = [&]() {
    const double v = number();
    if (v < 0 || v != std::floor(v) || v > 1e7) throw ParseError("model document: bad count");
    return static_cast<Eigen::Index>(v);
  };
  expect("jbal-model");
  expect("1");
  expect("activation");
  ModelParams p;
  if (!(in >> word)) throw ParseError("model document truncated");
  if (word == "relu") {
    p.activation = Activation::kRelu;
  } else if (word == "identity") {
    p.activation = Activation::kIdentity;
  } else {
    throw ParseError("model document: unknown activation '" + word + "'");
  }
  expect("layers");
  const Eigen::Index layers = count();
  for (Eigen::Index li = 0; li < layers; ++li) {
    Layer l;
    expect("weight");
    const Eigen::Index rows = count();
    const Eigen::Index cols = count();
    l.weight.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) l.weight(r, c) = number();
    }
    expect("bias");
    l.bias.resize(count());
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = number();
    p.layers.push_back(std::move(l));
  }
  if (in >> word) throw ParseError("model document has trailing content");
  try {
    p.Validate(p.input_dim());
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("model document: ") + e.what());
  }
  return p;
}

std::string SerializeTrainLog(const std::vector<EpochLog>& log) {
  std::string out = "epoch,loss,ce,l2,mmd,skipped_strata\n";
  for (const EpochLog& e : log) {
    out += std::to_string(e.epoch) + "," + Format(e.loss) + "," + Format(e.ce) + "," +
           Format(e.l2) + "," + Format(e.mmd) + "," + std::to_string(e.skipped_strata) + "\n";
  }
  return out;
}

}  // namespace jbal
