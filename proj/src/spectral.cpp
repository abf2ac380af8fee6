#include "hodgeflow/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

namespace hodgeflow {

namespace {

void check_volumes(const Vector& v, const char* what) {
  if ((v.array() < 0.0).any() || !v.allFinite()) throw InvalidInput(std::string("negative or non-finite ") + what);
}

void fix_signs(Matrix& v) {
  for (Index c = 0; c < v.cols(); ++c) {
    const double peak = v.col(c).cwiseAbs().maxCoeff();
    Index at = 0;
    for (Index r = 0; r < v.rows(); ++r) {
      if (std::abs(v(r, c)) >= peak * (1.0 - 1e-12)) {
        at = r;
        break;
      }
    }
    if (v(at, c) < 0.0) v.col(c) *= -1.0;
  }
}

double inf_norm(const SparseOperator& a) {
  double best = 0.0;
  for (Index r = 0; r < a.outerSize(); ++r) {
    double s = 0.0;
    for (SparseOperator::InnerIterator it(a, r); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

// Ascending eigenpairs of the full spectrum, dense.
void dense_eigen(const SparseOperator& lap, Vector& values, Matrix& vectors, double& norm) {
  Eigen::SelfAdjointEigenSolver<Matrix> es{Matrix(lap)};
  if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed", 0.0, 0);
  values = es.eigenvalues();
  vectors = es.eigenvectors();
  norm = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
}

// Shift-invert subspace iteration with Rayleigh–Ritz. Returns the `block`
// smallest Ritz pairs once the first `wanted(θ)` of them meet the residual
// bound.
template <typename Wanted>
void subspace_eigen(const SparseOperator& lap, Index block, const EigenOptions& opts, Wanted&& wanted,
                    Vector& values, Matrix& vectors, double& norm) {
  const Index n = lap.rows();
  norm = inf_norm(lap);
  const Eigen::SparseMatrix<double> colmajor = lap;
  Eigen::SparseMatrix<double> shifted = colmajor;
  const double shift = std::max(norm, 1e-300) * 1e-6;
  for (Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw SolverError("shifted factorization failed", 0.0, 0);

  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal;
  Matrix x(n, block);
  for (Index j = 0; j < block; ++j)
    for (Index i = 0; i < n; ++i) x(i, j) = normal(rng);

  double worst = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 1000; ++it) {
    Matrix y = ldlt.solve(x);
    Eigen::HouseholderQR<Matrix> qr(y);
    Matrix q = qr.householderQ() * Matrix::Identity(n, block);
    Matrix h = q.transpose() * (colmajor * q);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    values = es.eigenvalues();
    vectors = q * es.eigenvectors();
    x = vectors;

    const Index need = std::min<Index>(wanted(values), block);
    worst = 0.0;
    for (Index j = 0; j < need; ++j)
      worst = std::max(worst, (colmajor * vectors.col(j) - values[j] * vectors.col(j)).norm());
    if (worst <= opts.tol * norm) return;
  }
  throw SolverError("subspace iteration did not converge", worst / std::max(norm, 1e-300), 1000);
}

}  // namespace

Vector symmetrize_mean(const Vector& fwd, const Vector& rev) {
  if (fwd.size() != rev.size()) throw InvalidInput("forward and reverse volume lengths differ");
  check_volumes(fwd, "forward volume");
  check_volumes(rev, "reverse volume");
  return 0.5 * (fwd + rev);
}

double median_nonzero(const Vector& values) {
  std::vector<double> nz;
  for (double v : values)
    if (v != 0.0) nz.push_back(std::abs(v));
  if (nz.empty()) return 1.0;
  std::sort(nz.begin(), nz.end());
  const std::size_t mid = nz.size() / 2;
  return nz.size() % 2 ? nz[mid] : 0.5 * (nz[mid - 1] + nz[mid]);
}

SimilarityMatrix gaussian_similarity(const FlowGraph& g, const Vector& volumes, double sigma) {
  if (!(sigma > 0.0)) throw InvalidInput("kernel bandwidth must be positive");
  if (volumes.size() != g.edge_count()) throw InvalidInput("volume length does not match edge count");
  check_volumes(volumes, "volume");
  std::vector<Triplet> t;
  t.reserve(2 * static_cast<std::size_t>(g.edge_count()));
  for (Index e = 0; e < g.edge_count(); ++e) {
    const double m = volumes[e];
    const double s = -std::expm1(-m * m / (2.0 * sigma * sigma));
    t.emplace_back(g.edge(e).tail, g.edge(e).head, s);
    t.emplace_back(g.edge(e).head, g.edge(e).tail, s);
  }
  SimilarityMatrix out(g.node_count(), g.node_count());
  out.setFromTriplets(t.begin(), t.end());
  out.prune(0.0);
  return out;
}

SimilarityMatrix blend_distance(const SimilarityMatrix& s_flow, const std::vector<Point2>& coords, double sigma_d,
                                double alpha) {
  const Index n = s_flow.rows();
  if (static_cast<Index>(coords.size()) != n) throw InvalidInput("missing coordinates for distance blend");
  if (!(sigma_d > 0.0)) throw InvalidInput("distance bandwidth must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("alpha must lie in [0, 1]");

  std::vector<Triplet> t;
  for (Index r = 0; r < n; ++r)
    for (SimilarityMatrix::InnerIterator it(s_flow, r); it; ++it) t.emplace_back(r, it.col(), alpha * it.value());
  if (alpha < 1.0) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const double dx = coords[i].x - coords[j].x;
        const double dy = coords[i].y - coords[j].y;
        const double k = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_d * sigma_d));
        if (k <= 1e-12) continue;
        t.emplace_back(i, j, (1.0 - alpha) * k);
        t.emplace_back(j, i, (1.0 - alpha) * k);
      }
    }
  }
  SimilarityMatrix out(n, n);
  out.setFromTriplets(t.begin(), t.end());
  out.prune(0.0);
  return out;
}

SparseOperator similarity_laplacian(const SimilarityMatrix& s) {
  if (s.rows() != s.cols()) throw InvalidInput("similarity matrix must be square");
  std::vector<Triplet> t;
  for (Index r = 0; r < s.rows(); ++r) {
    double deg = 0.0;
    for (SimilarityMatrix::InnerIterator it(s, r); it; ++it) {
      if (it.col() == r) continue;
      deg += it.value();
      t.emplace_back(r, it.col(), -it.value());
    }
    t.emplace_back(r, r, deg);
  }
  SparseOperator lap(s.rows(), s.cols());
  lap.setFromTriplets(t.begin(), t.end());
  return lap;
}

SpectralEmbedding smallest_eigenpairs(const SparseOperator& lap, Index k, bool skip_null, const EigenOptions& opts) {
  const Index n = lap.rows();
  if (lap.cols() != n) throw InvalidInput("operator must be square");
  if (k < 1 || k > n)
    throw InvalidInput("k = " + std::to_string(k) + " is out of range for dimension " + std::to_string(n));

  Vector values;
  Matrix vectors;
  double norm = 0.0;
  auto count_null = [&](const Vector& v) {
    return static_cast<Index>((v.array() < opts.null_threshold).count());
  };

  if (n <= opts.dense_limit) {
    dense_eigen(lap, values, vectors, norm);
  } else {
    Index block = std::min<Index>(n, k + 10);
    while (true) {
      subspace_eigen(
          lap, block, opts, [&](const Vector& v) { return skip_null ? count_null(v) + k : k; }, values, vectors,
          norm);
      const Index nulls = count_null(values);
      if (!skip_null || nulls + k + 2 <= block || block == n) break;
      block = std::min<Index>(n, nulls + k + 10);
    }
  }

  const Index first = skip_null ? count_null(values) : 0;
  if (first + k > values.size())
    throw InvalidInput("k = " + std::to_string(k) + " exceeds the non-null spectrum (" +
                       std::to_string(values.size() - first) + " available)");

  SpectralEmbedding out;
  out.eigenvalues = values.segment(first, k);
  out.vectors = vectors.middleCols(first, k);
  fix_signs(out.vectors);

  for (Index j = 0; j < k; ++j) {
    const double res = (lap * out.vectors.col(j) - out.eigenvalues[j] * out.vectors.col(j)).norm();
    if (res > opts.tol * std::max(norm, 1.0))
      throw SolverError("eigenpair residual " + std::to_string(res) + " exceeds tolerance", res, 0);
  }
  return out;
}

SpectralEmbedding spectral_embedding(const SimilarityMatrix& s, Index k, CutVariant variant, bool skip_null,
                                     const EigenOptions& opts) {
  const SparseOperator lap = similarity_laplacian(s);
  if (variant == CutVariant::ratio_cut) return smallest_eigenpairs(lap, k, skip_null, opts);

  const Vector deg = lap.diagonal();
  if ((deg.array() <= 0.0).any()) throw InvalidInput("isolated node: zero degree in normalized Laplacian");
  const Vector inv_sqrt = deg.cwiseSqrt().cwiseInverse();
  SparseOperator norm_lap = inv_sqrt.asDiagonal() * lap * inv_sqrt.asDiagonal();
  SpectralEmbedding out = smallest_eigenpairs(norm_lap, k, skip_null, opts);
  out.vectors = inv_sqrt.asDiagonal() * out.vectors;
  fix_signs(out.vectors);
  out.variant = CutVariant::normalized_cut;
  return out;
}

ClusterAssignment spectral_cluster(const SimilarityMatrix& s, Index k, CutVariant variant, std::uint64_t seed) {
  const Index n = s.rows();
  if (s.cols() != n) throw InvalidInput("similarity matrix must be square");
  if (!s.isApprox(SimilarityMatrix(s.transpose()), 0.0)) throw InvalidInput("similarity matrix is not symmetric");
  for (Index r = 0; r < n; ++r) {
    double row = 0.0;
    for (SimilarityMatrix::InnerIterator it(s, r); it; ++it)
      if (it.col() != r) row += it.value();
    if (!(row > 0.0)) throw InvalidInput("isolated node " + std::to_string(r) + " has no similarity");
  }
  if (k < 1 || k > n) throw InvalidInput("cluster count out of range");
  const SpectralEmbedding emb = spectral_embedding(s, k, variant, false);
  ClusterAssignment out = kmeans(emb.vectors, k, seed);
  return out;
}

ClusterAssignment kmeans(const Matrix& points, Index k, std::uint64_t seed, const KMeansOptions& opts) {
  const Index n = points.rows();
  if (k < 1) throw InvalidInput("k must be at least 1");
  if (n < k) throw InvalidInput("fewer points (" + std::to_string(n) + ") than clusters (" + std::to_string(k) + ")");

  std::mt19937_64 master(seed);
  ClusterAssignment best;
  best.inertia = std::numeric_limits<double>::infinity();

  for (int run = 0; run < std::max(1, opts.n_init); ++run) {
    std::mt19937_64 rng(master());

    // k-means++ seeding
    Matrix centers(k, points.cols());
    std::uniform_int_distribution<Index> pick(0, n - 1);
    centers.row(0) = points.row(pick(rng));
    Vector d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (Index c = 1; c < k; ++c) {
      const double total = d2.sum();
      Index chosen = 0;
      if (total > 0.0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        chosen = n - 1;
        for (Index i = 0; i < n; ++i) {
          target -= d2[i];
          if (target < 0.0 && d2[i] > 0.0) {
            chosen = i;
            break;
          }
        }
      } else {
        chosen = pick(rng);
      }
      centers.row(c) = points.row(chosen);
      d2 = d2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<Index> labels(static_cast<std::size_t>(n), -1);
    std::vector<double> trace;
    double inertia = 0.0;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
      bool changed = false;
      inertia = 0.0;
      for (Index i = 0; i < n; ++i) {
        Index cur = labels[static_cast<std::size_t>(i)];
        double best_d = cur >= 0 ? (points.row(i) - centers.row(cur)).squaredNorm()
                                 : std::numeric_limits<double>::infinity();
        for (Index c = 0; c < k; ++c) {
          const double d = (points.row(i) - centers.row(c)).squaredNorm();
          if (d < best_d) {
            best_d = d;
            cur = c;
          }
        }
        if (cur != labels[static_cast<std::size_t>(i)]) changed = true;
        labels[static_cast<std::size_t>(i)] = cur;
        inertia += best_d;
      }

      // Empty clusters take the farthest point of the cluster with the
      // largest within-cluster scatter.
      std::vector<Index> size(static_cast<std::size_t>(k), 0);
      for (Index l : labels) ++size[static_cast<std::size_t>(l)];
      for (Index c = 0; c < k; ++c) {
        if (size[static_cast<std::size_t>(c)] > 0) continue;
        Vector scatter = Vector::Zero(k);
        for (Index i = 0; i < n; ++i) {
          const Index l = labels[static_cast<std::size_t>(i)];
          scatter[l] += (points.row(i) - centers.row(l)).squaredNorm();
        }
        Index donor = -1;
        for (Index d = 0; d < k; ++d)
          if (size[static_cast<std::size_t>(d)] > 1 && (donor < 0 || scatter[d] > scatter[donor])) donor = d;
        Index far = -1;
        double far_d = -1.0;
        for (Index i = 0; i < n; ++i) {
          if (labels[static_cast<std::size_t>(i)] != donor) continue;
          const double d = (points.row(i) - centers.row(donor)).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        labels[static_cast<std::size_t>(far)] = c;
        --size[static_cast<std::size_t>(donor)];
        size[static_cast<std::size_t>(c)] = 1;
        inertia -= far_d;
        changed = true;
      }
      trace.push_back(inertia);

      // centroid update
      centers.setZero();
      for (Index i = 0; i < n; ++i) centers.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
      for (Index c = 0; c < k; ++c) centers.row(c) /= static_cast<double>(size[static_cast<std::size_t>(c)]);

      if (!changed) break;
    }

    inertia = 0.0;
    for (Index i = 0; i < n; ++i) inertia += (points.row(i) - centers.row(labels[static_cast<std::size_t>(i)])).squaredNorm();

    if (inertia < best.inertia) {
      best.labels = labels;
      best.inertia = inertia;
      best.inertia_trace = std::move(trace);
    }
  }
  best.k = k;
  best.seed = seed;
  return best;
}

double ratio_cut(const SimilarityMatrix& s, const std::vector<Index>& labels) {
  std::map<Index, double> cut, size;
  for (Index r = 0; r < s.rows(); ++r) {
    const Index lr = labels[static_cast<std::size_t>(r)];
    size[lr] += 1.0;
    for (SimilarityMatrix::InnerIterator it(s, r); it; ++it)
      if (labels[static_cast<std::size_t>(it.col())] != lr) cut[lr] += it.value();
  }
  double total = 0.0;
  for (const auto& [l, sz] : size) total += cut[l] / sz;
  return total;
}

double normalized_cut(const SimilarityMatrix& s, const std::vector<Index>& labels) {
  std::map<Index, double> cut, vol;
  for (Index r = 0; r < s.rows(); ++r) {
    const Index lr = labels[static_cast<std::size_t>(r)];
    for (SimilarityMatrix::InnerIterator it(s, r); it; ++it) {
      vol[lr] += it.value();
      if (labels[static_cast<std::size_t>(it.col())] != lr) cut[lr] += it.value();
    }
  }
  double total = 0.0;
  for (const auto& [l, v] : vol) total += v > 0.0 ? cut[l] / v : 0.0;
  return total;
}

double adjusted_rand_index(const std::vector<Index>& a, const std::vector<Index>& b) {
  if (a.size() != b.size()) throw InvalidInput("label vectors differ in length");
  std::map<std::pair<Index, Index>, double> joint;
  std::map<Index, double> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  auto c2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [key, v] : joint) index += c2(v);
  for (const auto& [key, v] : ra) sa += c2(v);
  for (const auto& [key, v] : rb) sb += c2(v);
  const double total = c2(static_cast<double>(a.size()));
  const double expected = total > 0.0 ? sa * sb / total : 0.0;
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

double silhouette(const Matrix& points, const std::vector<Index>& labels) {
  const Index n = points.rows();
  if (static_cast<Index>(labels.size()) != n) throw InvalidInput("label count does not match point count");
  std::map<Index, Index> sizes;
  for (Index l : labels) ++sizes[l];
  if (sizes.size() < 2) return 0.0;

  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    std::map<Index, double> dist;
    for (Index j = 0; j < n; ++j)
      if (j != i) dist[labels[static_cast<std::size_t>(j)]] += (points.row(i) - points.row(j)).norm();
    const Index own = labels[static_cast<std::size_t>(i)];
    if (sizes[own] < 2) continue;
    const double a = dist[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [l, d] : dist)
      if (l != own) b = std::min(b, d / static_cast<double>(sizes[l]));
    const double m = std::max(a, b);
    total += m > 0.0 ? (b - a) / m : 0.0;
  }
  return total / static_cast<double>(n);
}

}  // namespace hodgeflow
