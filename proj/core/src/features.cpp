// Copyright 2026 The adlradar Authors
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

#include "adlradar/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "binio.hpp"

namespace adlradar {

Eigen::MatrixXd to_eigen(const RealMatrix& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
  return out;
}

RealMatrix from_eigen(const Eigen::MatrixXd& m) {
  RealMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = m(r, c);
  return out;
}

Eigen::MatrixXd covariance2d(std::span<const Eigen::MatrixXd> images, Eigen::MatrixXd* mean) {
  if (images.empty()) throw InvalidArgument("pca2d: need at least one image");
  const Eigen::Index eta = images.front().rows();
  if (eta == 0 || images.front().cols() != eta) throw InvalidArgument("pca2d: images must be square and nonempty");
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(eta, eta);
  for (const auto& x : images) {
    if (x.rows() != eta || x.cols() != eta) throw InvalidArgument("pca2d: images differ in size");
    mu += x;
  }
  mu /= static_cast<double>(images.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(eta, eta);
  for (const auto& x : images) {
    const Eigen::MatrixXd d = x - mu;
    h.noalias() += d.transpose() * d;
  }
  h /= static_cast<double>(images.size());
  h = 0.5 * (h + h.transpose());
  if (mean != nullptr) *mean = std::move(mu);
  return h;
}

Pca2d pca2d_train(std::span<const Eigen::MatrixXd> images, std::size_t d) {
  if (images.empty()) throw InvalidArgument("pca2d: need at least one image");
  const auto eta = static_cast<std::size_t>(images.front().rows());
  if (d < 1 || d > eta) throw InvalidArgument("pca2d: d must be in [1, eta]");
  Pca2d out;
  const Eigen::MatrixXd h = covariance2d(images, &out.mean);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw ProcessingError("pca2d: eigendecomposition failed");
  const auto n = static_cast<Eigen::Index>(eta);
  const auto dd = static_cast<Eigen::Index>(d);
  out.phi.resize(n, dd);
  out.eigvals.resize(dd);
  for (Eigen::Index k = 0; k < dd; ++k) {
    const Eigen::Index src = n - 1 - k;  // solver sorts ascending
    Eigen::VectorXd v = es.eigenvectors().col(src);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    out.phi.col(k) = v;
    out.eigvals(k) = std::max(0.0, es.eigenvalues()(src));
  }
  return out;
}

Eigen::MatrixXd project(const Eigen::MatrixXd& x, const Eigen::MatrixXd& phi) {
  if (x.cols() != phi.rows()) throw InvalidArgument("project: shape mismatch");
  return x * phi;
}

Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& y, const Eigen::MatrixXd& phi) {
  if (y.cols() != phi.cols()) throw InvalidArgument("reconstruct: shape mismatch");
  const Eigen::MatrixXd g = phi.transpose() * phi;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  if (!lu.isInvertible()) throw ProcessingError("reconstruct: phi is rank deficient");
  return y * lu.solve(phi.transpose());
}

Eigen::VectorXd fuse(const Eigen::MatrixXd& y_md, const Eigen::MatrixXd& y_rm) {
  Eigen::VectorXd v(y_md.size() + y_rm.size());
  v.head(y_md.size()) = Eigen::Map<const Eigen::VectorXd>(y_md.data(), y_md.size());
  v.tail(y_rm.size()) = Eigen::Map<const Eigen::VectorXd>(y_rm.data(), y_rm.size());
  return v;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> unfuse(const Eigen::VectorXd& v, std::size_t eta, std::size_t d_md,
                                                   std::size_t d_rm) {
  const auto n = static_cast<Eigen::Index>(eta);
  const auto a = static_cast<Eigen::Index>(d_md);
  const auto b = static_cast<Eigen::Index>(d_rm);
  if (v.size() != n * (a + b)) throw InvalidArgument("unfuse: length mismatch");
  Eigen::MatrixXd md = Eigen::Map<const Eigen::MatrixXd>(v.data(), n, a);
  Eigen::MatrixXd rm = Eigen::Map<const Eigen::MatrixXd>(v.data() + n * a, n, b);
  return {md, rm};
}

Eigen::VectorXd select_dims(const Eigen::VectorXd& v, std::size_t eta, FeatureDims full, FeatureDims use) {
  if (use.d_md > full.d_md || use.d_rm > full.d_rm) throw InvalidArgument("select_dims: requested dims exceed model dims");
  const auto n = static_cast<Eigen::Index>(eta);
  if (v.size() != n * static_cast<Eigen::Index>(full.d_md + full.d_rm)) throw InvalidArgument("select_dims: length mismatch");
  if (use == full) return v;
  const auto a = n * static_cast<Eigen::Index>(use.d_md);
  const auto b = n * static_cast<Eigen::Index>(use.d_rm);
  Eigen::VectorXd out(a + b);
  out.head(a) = v.head(a);
  out.tail(b) = v.segment(n * static_cast<Eigen::Index>(full.d_md), b);
  return out;
}

Eigen::VectorXd FeatureModel::features(const Snippet& s) const {
  const Eigen::MatrixXd x_md = to_eigen(s.md);
  const Eigen::MatrixXd x_rm = to_eigen(s.rm);
  if (static_cast<std::size_t>(x_md.rows()) != eta || static_cast<std::size_t>(x_rm.rows()) != eta)
    throw InvalidArgument("features: snippet size does not match the model");
  return fuse(project(x_md, md.phi), project(x_rm, rm.phi));
}

FeatureModel train_model(std::span<const Snippet> snippets, FeatureDims dims) {
  if (snippets.empty()) throw InvalidArgument("train_model: empty training set");
  std::vector<Eigen::MatrixXd> md;
  std::vector<Eigen::MatrixXd> rm;
  md.reserve(snippets.size());
  rm.reserve(snippets.size());
  for (const auto& s : snippets) {
    if (s.md.rows() != s.md.cols() || s.rm.rows() != s.rm.cols() || s.md.rows() != s.rm.rows())
      throw InvalidArgument("train_model: snippets must be square with equal size");
    md.push_back(to_eigen(s.md));
    rm.push_back(to_eigen(s.rm));
  }
  FeatureModel m;
  m.eta = snippets.front().md.rows();
  m.dims = dims;
  m.md = pca2d_train(md, dims.d_md);
  m.rm = pca2d_train(rm, dims.d_rm);
  m.train.reserve(snippets.size());
  for (std::size_t i = 0; i < snippets.size(); ++i)
    m.train.push_back({snippets[i].label, fuse(project(md[i], m.md.phi), project(rm[i], m.rm.phi))});
  return m;
}

Classification nn_classify(const Eigen::VectorXd& query, const FeatureModel& model, std::span<const int> class_set,
                           FeatureDims use, std::size_t k) {
  if (class_set.empty()) throw InvalidArgument("nn_classify: empty class set");
  if (k < 1) throw InvalidArgument("nn_classify: k must be >= 1");
  const Eigen::VectorXd q = select_dims(query, model.eta, model.dims, use);
  struct Hit {
    double dist;
    int label;
  };
  std::vector<Hit> hits;
  for (const auto& e : model.train) {
    if (std::find(class_set.begin(), class_set.end(), e.label) == class_set.end()) continue;
    const Eigen::VectorXd v = select_dims(e.vec, model.eta, model.dims, use);
    hits.push_back({(v - q).norm(), e.label});
  }
  if (hits.empty()) throw InvalidArgument("nn_classify: no training vectors for the class set");
  std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.dist < b.dist; });

  Classification c;
  c.label = hits.front().label;
  if (k > 1) {
    std::map<int, std::size_t> votes;
    const std::size_t kk = std::min(k, hits.size());
    for (std::size_t i = 0; i < kk; ++i) ++votes[hits[i].label];
    std::size_t best = 0;
    for (std::size_t i = 0; i < kk; ++i)  // ties go to the closer neighbour
      if (votes[hits[i].label] > best) {
        best = votes[hits[i].label];
        c.label = hits[i].label;
      }
  }
  const auto own = std::find_if(hits.begin(), hits.end(), [&](const Hit& h) { return h.label == c.label; });
  const auto other = std::find_if(hits.begin(), hits.end(), [&](const Hit& h) { return h.label != c.label; });
  c.d1 = own->dist;
  if (other == hits.end()) {
    c.d2 = std::numeric_limits<double>::infinity();
    c.margin = 1.0;
  } else {
    c.d2 = other->dist;
    c.margin = c.d2 > 0.0 ? (c.d2 - c.d1) / c.d2 : 0.0;
  }
  return c;
}

double ConfusionMatrix::accuracy() const {
  std::size_t total = 0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < counts.rows(); ++i)
    for (std::size_t j = 0; j < counts.cols(); ++j) {
      total += counts(i, j);
      if (i == j) hit += counts(i, j);
    }
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

ConfusionMatrix confusion_from_pairs(std::span<const int> classes, std::span<const std::pair<int, int>> truth_pred) {
  ConfusionMatrix cm;
  cm.classes.assign(classes.begin(), classes.end());
  const std::size_t n = classes.size();
  cm.counts = Matrix<std::size_t>(n, n, 0);
  cm.rates = RealMatrix(n, n, 0.0);
  auto index = [&](int label) {
    const auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end()) throw InvalidArgument("confusion: label " + std::to_string(label) + " not in class set");
    return static_cast<std::size_t>(it - classes.begin());
  };
  for (const auto& [t, p] : truth_pred) ++cm.counts(index(t), index(p));
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t row = 0;
    for (std::size_t j = 0; j < n; ++j) row += cm.counts(i, j);
    if (row == 0) continue;
    for (std::size_t j = 0; j < n; ++j)
      cm.rates(i, j) = 100.0 * static_cast<double>(cm.counts(i, j)) / static_cast<double>(row);
  }
  return cm;
}

ConfusionMatrix evaluate(const FeatureModel& model, std::span<const Snippet> test, std::span<const int> class_set,
                         FeatureDims use, std::size_t k) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(test.size());
  for (const auto& s : test) pairs.emplace_back(s.label, nn_classify(model.features(s), model, class_set, use, k).label);
  return confusion_from_pairs(class_set, pairs);
}

void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& cm,
                         const std::vector<std::string>& names) {
  auto name = [&](std::size_t i) { return i < names.size() ? names[i] : std::to_string(cm.classes[i]); };
  std::ostringstream os;
  os << "true\\predicted";
  for (std::size_t j = 0; j < cm.classes.size(); ++j) os << ',' << name(j);
  os << '\n';
  char buf[32];
  for (std::size_t i = 0; i < cm.classes.size(); ++i) {
    os << name(i);
    for (std::size_t j = 0; j < cm.classes.size(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.2f", cm.rates(i, j));
      os << buf;
    }
    os << '\n';
  }
  detail::write_text(path, os.str());
}

namespace {

void put_matrix(detail::BinWriter& w, const Eigen::MatrixXd& m) {
  std::vector<float> buf(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.size(); ++i) buf[static_cast<std::size_t>(i)] = static_cast<float>(m.data()[i]);
  w.put_array(buf.data(), buf.size());
}

Eigen::MatrixXd get_matrix(detail::BinReader& r, Eigen::Index rows, Eigen::Index cols) {
  std::vector<float> buf(static_cast<std::size_t>(rows * cols));
  r.get_array(buf.data(), buf.size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = buf[static_cast<std::size_t>(i)];
  return m;
}

}  // namespace

void write_model(const std::filesystem::path& path, const FeatureModel& model) {
  detail::BinWriter w(path);
  w.magic("PCA2");
  w.put(static_cast<std::uint32_t>(model.eta));
  w.put(static_cast<std::uint32_t>(model.dims.d_md));
  w.put(static_cast<std::uint32_t>(model.dims.d_rm));
  put_matrix(w, model.md.mean);
  put_matrix(w, model.rm.mean);
  put_matrix(w, model.md.phi);
  put_matrix(w, model.rm.phi);
  put_matrix(w, model.md.eigvals);
  put_matrix(w, model.rm.eigvals);
  w.put(static_cast<std::uint32_t>(model.train.size()));
  for (const auto& e : model.train) {
    w.put(static_cast<std::uint32_t>(e.label));
    put_matrix(w, e.vec);
  }
  w.close();
}

FeatureModel read_model(const std::filesystem::path& path) {
  detail::BinReader r(path);
  r.expect_magic("PCA2");
  FeatureModel m;
  m.eta = r.get<std::uint32_t>();
  m.dims.d_md = r.get<std::uint32_t>();
  m.dims.d_rm = r.get<std::uint32_t>();
  if (m.eta == 0 || m.dims.d_md == 0 || m.dims.d_rm == 0 || m.dims.d_md > m.eta || m.dims.d_rm > m.eta)
    throw IoError("PCA2: inconsistent header in " + path.string());
  const auto n = static_cast<Eigen::Index>(m.eta);
  const auto a = static_cast<Eigen::Index>(m.dims.d_md);
  const auto b = static_cast<Eigen::Index>(m.dims.d_rm);
  m.md.mean = get_matrix(r, n, n);
  m.rm.mean = get_matrix(r, n, n);
  m.md.phi = get_matrix(r, n, a);
  m.rm.phi = get_matrix(r, n, b);
  m.md.eigvals = get_matrix(r, a, 1);
  m.rm.eigvals = get_matrix(r, b, 1);
  const auto count = r.get<std::uint32_t>();
  m.train.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    TrainEntry e;
    e.label = static_cast<int>(r.get<std::uint32_t>());
    e.vec = get_matrix(r, n * (a + b), 1);
    m.train.push_back(std::move(e));
  }
  r.expect_eof();
  return m;
}

}  // namespace adlradar
